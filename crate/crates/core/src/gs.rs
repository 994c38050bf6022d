//! Gerstenhaber–Schack differential on `Hom(A^{⊗m}, A^{⊗n})`, fraction
//! compositions and the HKR-type corolla map.
//!
//! `d1` is the Hochschild-type part (`m → m+1`), `d2` the coHochschild-type
//! part (`n → n+1`).  Each exists in two forms: a symbolic one acting on
//! records, and a literal one that evaluates the three groups of terms on
//! monomial inputs with Sweedler sums expanded.  The total differential on
//! the bigraded complex is `D = d1 + τ(m,n)·d2`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::cochain::{monomial_tuples, Bounds, Cochain, OpKey, SymbolicOp};
use crate::error::OpError;
use crate::graph_ops::{compile, corolla};
use crate::poly::{binomial, monomial_coproduct, Monomial, Poly, Rational, TensorPoly};
use crate::tensor::StructTensor;

/// Sign applied to `d2` in the total differential on the `(m,n)` component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Twist {
    One,
    ParityM,
    ParityN,
    ParityMN,
}

impl Twist {
    pub fn sign(self, m: usize, n: usize) -> i32 {
        let e = match self {
            Twist::One => 0,
            Twist::ParityM => m,
            Twist::ParityN => n,
            Twist::ParityMN => m + n,
        };
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub const ALL: [Twist; 4] = [Twist::One, Twist::ParityM, Twist::ParityN, Twist::ParityMN];
}

/// Extra signs on the boundary terms relative to the printed formulas
/// (`+`, `(−1)^{m−1}` for `d1`; `+`, `(−1)^{n+1}` for `d2`) and the twist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GsSigns {
    pub d1_first: i32,
    pub d1_last: i32,
    pub d2_first: i32,
    pub d2_last: i32,
    pub twist: Twist,
}

impl Default for GsSigns {
    /// Printed boundary signs with `τ = (−1)^m`; the search in the test suite
    /// confirms this is a convention with `D² = 0`.
    fn default() -> Self {
        GsSigns { d1_first: 1, d1_last: 1, d2_first: 1, d2_last: 1, twist: Twist::ParityM }
    }
}

impl GsSigns {
    /// All 2⁴ boundary sign choices combined with every twist.
    pub fn all() -> Vec<GsSigns> {
        let mut out = Vec::new();
        for bits in 0..16u32 {
            let s = |k: u32| if bits >> k & 1 == 0 { 1 } else { -1 };
            for twist in Twist::ALL {
                out.push(GsSigns { d1_first: s(0), d1_last: s(1), d2_first: s(2), d2_last: s(3), twist });
            }
        }
        out
    }
}

fn sgn(e: usize) -> i32 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn qi(v: i32) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// `(D', D − D', binom(D, D'))` over all `D' ≤ D`.
fn leibniz_splits(d: &Monomial) -> Vec<(Monomial, Monomial, BigInt)> {
    d.splits()
        .into_iter()
        .map(|(a, b)| {
            let w: BigInt = d.exps().iter().zip(a.exps()).map(|(&n, &k)| binomial(n, k)).product();
            (a, b, w)
        })
        .collect()
}

/// Symbolic `d1`.
pub fn d_gs1_symbolic(op: &SymbolicOp, signs: GsSigns) -> SymbolicOp {
    let (dim, m, n) = (op.dim, op.m, op.n);
    let one = Monomial::one(dim);
    let mut out = SymbolicOp::zero(dim, m + 1, n);
    for (key, c) in &op.terms {
        // Δ^n(a_0) * Ψ(a_1..a_m)
        let mut derivs = vec![one.clone()];
        derivs.extend(key.derivs.iter().cloned());
        out.add_term(OpKey { derivs, monos: key.monos.clone() }, c * qi(signs.d1_first));
        // Σ (−1)^{i+1} Ψ(.., a_i a_{i+1}, ..)
        for i in 0..m {
            let sign = qi(sgn(i + 1));
            for (d1, d2, w) in leibniz_splits(&key.derivs[i]) {
                let mut derivs = Vec::with_capacity(m + 1);
                derivs.extend_from_slice(&key.derivs[..i]);
                derivs.push(d1);
                derivs.push(d2);
                derivs.extend_from_slice(&key.derivs[i + 1..]);
                out.add_term(OpKey { derivs, monos: key.monos.clone() }, c * &sign * Rational::from_integer(w));
            }
        }
        // (−1)^{m−1} Ψ(a_0..a_{m−1}) * Δ^n(a_m)
        let mut derivs = key.derivs.clone();
        derivs.push(one.clone());
        let sign = signs.d1_last * sgn(m + 1);
        out.add_term(OpKey { derivs, monos: key.monos.clone() }, c * qi(sign));
    }
    out
}

/// Symbolic `d2`.
pub fn d_gs2_symbolic(op: &SymbolicOp, signs: GsSigns) -> SymbolicOp {
    let (dim, m, n) = (op.dim, op.m, op.n);
    let one = Monomial::one(dim);
    let mut out = SymbolicOp::zero(dim, m, n + 1);
    for (key, c) in &op.terms {
        // (∏ a_i') ⊗ Ψ(a_1'', ..): Δ^{n+1}(∏ ∂^D a) · (1 ⊗ M)
        let mut monos = vec![one.clone()];
        monos.extend(key.monos.iter().cloned());
        out.add_term(OpKey { derivs: key.derivs.clone(), monos }, c * qi(signs.d2_first));
        // Σ (−1)^i Δ_i Ψ
        for i in 0..n {
            let sign = qi(sgn(i + 1));
            for (parts, w) in monomial_coproduct(&key.monos[i], 2) {
                let mut monos = Vec::with_capacity(n + 1);
                monos.extend_from_slice(&key.monos[..i]);
                monos.extend(parts);
                monos.extend_from_slice(&key.monos[i + 1..]);
                out.add_term(OpKey { derivs: key.derivs.clone(), monos }, c * &sign * Rational::from_integer(w));
            }
        }
        // (−1)^{n+1} Ψ(a_1', ..) ⊗ (∏ a_i'')
        let mut monos = key.monos.clone();
        monos.push(one.clone());
        out.add_term(OpKey { derivs: key.derivs.clone(), monos }, c * qi(signs.d2_last * sgn(n + 1)));
    }
    out
}

/// `d1` evaluated term by term on monomial inputs.
pub fn d_gs1_literal(psi: &Cochain, signs: GsSigns) -> Cochain {
    let psi = psi.clone();
    let (dim, m, n) = (psi.dim, psi.m, psi.n);
    let bounds = psi.bounds();
    Cochain::from_fn(dim, m + 1, n, bounds, move |a: &[Monomial]| {
        let mut out = TensorPoly::zero(dim, n);
        let delta = |x: &Monomial| Poly::monomial(x.clone(), Rational::one()).iterated_coproduct(n).expect("n >= 1");
        let first = delta(&a[0]).tensor_mul(&psi.eval_monomials(&a[1..])).expect("arity n");
        out.add_scaled(&first, &qi(signs.d1_first)).unwrap();
        for i in 0..m {
            let mut merged: Vec<Monomial> = a[..i].to_vec();
            merged.push(a[i].mul(&a[i + 1]));
            merged.extend_from_slice(&a[i + 2..]);
            out.add_scaled(&psi.eval_monomials(&merged), &qi(sgn(i + 1))).unwrap();
        }
        let last = psi.eval_monomials(&a[..m]).tensor_mul(&delta(&a[m])).expect("arity n");
        out.add_scaled(&last, &qi(signs.d1_last * sgn(m + 1))).unwrap();
        out
    })
}

/// `d2` evaluated term by term on monomial inputs, Sweedler sums expanded.
pub fn d_gs2_literal(psi: &Cochain, signs: GsSigns) -> Cochain {
    let psi = psi.clone();
    let (dim, m, n) = (psi.dim, psi.m, psi.n);
    let bounds = psi.bounds();
    Cochain::from_fn(dim, m, n + 1, bounds, move |a: &[Monomial]| {
        let mut out = TensorPoly::zero(dim, n + 1);
        // Sweedler expansion of all inputs at once
        let mut sweedler: Vec<(Vec<Monomial>, Vec<Monomial>, Rational)> = vec![(vec![], vec![], Rational::one())];
        for x in a {
            let mut next = Vec::new();
            for (l, r, c) in &sweedler {
                for (parts, w) in monomial_coproduct(x, 2) {
                    let mut l2 = l.clone();
                    l2.push(parts[0].clone());
                    let mut r2 = r.clone();
                    r2.push(parts[1].clone());
                    next.push((l2, r2, c * Rational::from_integer(w)));
                }
            }
            sweedler = next;
        }
        let prod = |xs: &[Monomial]| xs.iter().fold(Monomial::one(dim), |acc, x| acc.mul(x));
        for (l, r, c) in &sweedler {
            let left = TensorPoly::from_poly(&Poly::monomial(prod(l), Rational::one()));
            let first = left.tensor(&psi.eval_monomials(r)).unwrap();
            out.add_scaled(&first, &(c * qi(signs.d2_first))).unwrap();
            let right = TensorPoly::from_poly(&Poly::monomial(prod(r), Rational::one()));
            let last = psi.eval_monomials(l).tensor(&right).unwrap();
            out.add_scaled(&last, &(c * qi(signs.d2_last * sgn(n + 1)))).unwrap();
        }
        let value = psi.eval_monomials(a);
        for i in 0..n {
            out.add_scaled(&value.coproduct_at(i).unwrap(), &qi(sgn(i + 1))).unwrap();
        }
        out
    })
}

pub fn d_gs1(psi: &Cochain, signs: GsSigns) -> Cochain {
    match psi.as_symbolic() {
        Some(op) => Cochain::symbolic(d_gs1_symbolic(op, signs)),
        None => d_gs1_literal(psi, signs),
    }
}

pub fn d_gs2(psi: &Cochain, signs: GsSigns) -> Cochain {
    match psi.as_symbolic() {
        Some(op) => Cochain::symbolic(d_gs2_symbolic(op, signs)),
        None => d_gs2_literal(psi, signs),
    }
}

/// `(d1 Ψ, d2 Ψ)`.
pub fn d_gs(psi: &Cochain, signs: GsSigns) -> (Cochain, Cochain) {
    (d_gs1(psi, signs), d_gs2(psi, signs))
}

/// Element of the bigraded complex: components indexed by `(m, n)`.
pub type GsElement = BTreeMap<(usize, usize), Cochain>;

/// Total differential `D = d1 + τ d2` applied componentwise.
pub fn total_d(x: &GsElement, signs: GsSigns) -> Result<GsElement, OpError> {
    let mut out: GsElement = BTreeMap::new();
    for (&(m, n), c) in x {
        let (a, b) = d_gs(c, signs);
        let b = b.scale(&qi(signs.twist.sign(m, n)));
        for (key, part) in [((m + 1, n), a), ((m, n + 1), b)] {
            let merged = match out.remove(&key) {
                Some(prev) => prev.add(&part)?,
                None => part,
            };
            out.insert(key, merged);
        }
    }
    Ok(out)
}

/// `D(D(Ψ))` for a single homogeneous cochain.
pub fn d_squared(psi: &Cochain, signs: GsSigns) -> Result<GsElement, OpError> {
    let mut x = BTreeMap::new();
    x.insert((psi.m, psi.n), psi.clone());
    total_d(&total_d(&x, signs)?, signs)
}

/// `true` if every component vanishes: symbolically when possible, otherwise
/// on monomial tuples up to the recorded testability bound.
pub fn is_zero_element(x: &GsElement) -> bool {
    x.values().all(|c| match c.as_symbolic() {
        Some(op) => op.is_zero(),
        None => {
            let deg = c.bounds().map(|b| b.test_degree()).unwrap_or(3);
            monomial_tuples(c.dim, c.m, deg).iter().all(|t| c.eval_monomials(t).is_zero())
        }
    })
}

/// Applies `Ψ_1 ⊗ … ⊗ Ψ_k` to an element of `A^{⊗(Σ m_i)}`.
pub fn tensor_apply(maps: &[Cochain], input: &TensorPoly) -> Result<TensorPoly, OpError> {
    let total_in: usize = maps.iter().map(|c| c.m).sum();
    let total_out: usize = maps.iter().map(|c| c.n).sum();
    if input.arity() != total_in {
        return Err(OpError::Arity(format!("tensor_apply: arity {} vs {}", input.arity(), total_in)));
    }
    let dim = input.dim();
    let mut out = TensorPoly::zero(dim, total_out);
    for (key, c) in input.terms() {
        let mut acc: Option<TensorPoly> = None;
        let mut pos = 0;
        for f in maps {
            let v = f.eval_monomials(&key[pos..pos + f.m]);
            pos += f.m;
            acc = Some(match acc {
                None => v,
                Some(a) => a.tensor(&v)?,
            });
            if acc.as_ref().unwrap().is_zero() {
                break;
            }
        }
        let acc = acc.unwrap_or_else(|| TensorPoly::one(dim, 0));
        if acc.arity() == total_out {
            out.add_scaled(&acc, c)?;
        }
    }
    Ok(out)
}

/// Fraction composition `Ψ_1⋯Ψ_{ℓ₂} / Θ_1⋯Θ_{ℓ₁}`: `F = Θ_1 ⊗ … ⊗ Θ_{ℓ₁}` on
/// consecutive input blocks, then `Ψ_i` takes output slot `i` of every `Θ_j`.
pub fn fraction(psis: &[Cochain], thetas: &[Cochain]) -> Result<Cochain, OpError> {
    let l2 = psis.len();
    let l1 = thetas.len();
    if l1 == 0 || l2 == 0 {
        return Err(OpError::Arity("fraction needs at least one Ψ and one Θ".into()));
    }
    for (i, p) in psis.iter().enumerate() {
        if p.m != l1 {
            return Err(OpError::Arity(format!("Ψ_{} has {} inputs, expected ℓ₁ = {l1}", i + 1, p.m)));
        }
    }
    for (j, t) in thetas.iter().enumerate() {
        if t.n != l2 {
            return Err(OpError::Arity(format!("Θ_{} has {} outputs, expected ℓ₂ = {l2}", j + 1, t.n)));
        }
    }
    let dim = psis[0].dim;
    let m: usize = thetas.iter().map(|t| t.m).sum();
    let n: usize = psis.iter().map(|p| p.n).sum();
    let bounds = psis
        .iter()
        .chain(thetas)
        .try_fold(Bounds::new(0, 0), |acc, c| c.bounds().map(|b| Bounds::new(acc.order + b.order, acc.coeff_degree + b.coeff_degree)));
    // slot (j, i) of F sits at j·ℓ₂ + i; G wants group i = [(0,i), (1,i), …]
    let perm: Vec<usize> = (0..l2).flat_map(|i| (0..l1).map(move |j| j * l2 + i)).collect();
    let psis = psis.to_vec();
    let thetas = thetas.to_vec();
    Ok(Cochain::from_fn(dim, m, n, bounds, move |v: &[Monomial]| {
        let mut pos = 0;
        let mut f: Option<TensorPoly> = None;
        for t in &thetas {
            let val = t.eval_monomials(&v[pos..pos + t.m]);
            pos += t.m;
            f = Some(match f {
                None => val,
                Some(acc) => acc.tensor(&val).expect("dims agree"),
            });
        }
        let f = f.unwrap().permute_slots(&perm);
        tensor_apply(&psis, &f).expect("arities checked")
    }))
}

/// Codimension-1 fraction: `Ψ` at position `q` among `ℓ₂ = n₁+1` factors with
/// `ℓ₁`-fold products elsewhere, `Θ` at position `p` among `ℓ₁ = m₁+1` factors
/// with `ℓ₂`-fold coproducts elsewhere.
pub fn fraction_codim1(psi: &Cochain, q: usize, theta: &Cochain, p: usize) -> Result<Cochain, OpError> {
    let l1 = psi.m;
    let l2 = theta.n;
    if p >= l1 || q >= l2 {
        return Err(OpError::Arity(format!("positions ({p},{q}) outside ({l1},{l2})")));
    }
    let dim = psi.dim;
    let psis: Vec<Cochain> = (0..l2).map(|i| if i == q { psi.clone() } else { Cochain::product_like(dim, l1, 1) }).collect();
    let thetas: Vec<Cochain> = (0..l1).map(|j| if j == p { theta.clone() } else { Cochain::product_like(dim, 1, l2) }).collect();
    fraction(&psis, &thetas)
}

/// Degree defect `A − B` of the codim-1 fraction with parameters `(m₁, n₁)`,
/// computed from the degrees of the factors; `m₀, n₀` cancel.
pub fn degree_defect(m1: usize, n1: usize) -> i64 {
    let (m0, n0) = (2i64, 2i64);
    let (m1, n1) = (m1 as i64, n1 as i64);
    let (l1, l2) = (m1 + 1, n1 + 1);
    let deg = |a: i64, b: i64| a + b - 2;
    // Ψ: ℓ₁ → n₀ plus n₁ products ℓ₁ → 1; Θ: m₀ → ℓ₂ plus m₁ coproducts 1 → ℓ₂
    let sum_deg = deg(l1, n0) + n1 * deg(l1, 1) + deg(m0, l2) + m1 * deg(1, l2);
    let a = sum_deg - m1 - n1;
    let b = m0 + m1 + n0 + n1 - 2;
    a - b
}

/// Codimension-1 strata bracket of a `(2,1)` cochain `ψ` with a `(1,2)`
/// cochain `θ`: the plain composite `θ∘ψ` minus the four codim-1 fractions
/// with `ψ` on top and `θ` below, fillers `*` and `Δ` elsewhere.
pub fn strata_bracket(psi: &Cochain, theta: &Cochain) -> Result<Cochain, OpError> {
    if (psi.m, psi.n, theta.m, theta.n) != (2, 1, 1, 2) {
        return Err(OpError::Arity(format!(
            "strata bracket needs (2,1) and (1,2), got ({},{}) and ({},{})",
            psi.m, psi.n, theta.m, theta.n
        )));
    }
    let mut acc = fraction(std::slice::from_ref(theta), std::slice::from_ref(psi))?;
    for p in 0..2 {
        for q in 0..2 {
            acc = acc.lincomb(&fraction_codim1(psi, q, theta, p)?, &-Rational::one())?;
        }
    }
    Ok(acc)
}

/// Outcome of matching `op` against `λ·target` modulo the image of `D`.
#[derive(Clone, Debug)]
pub struct BracketFit {
    /// `λ` with `op − λ·target ∈ im D` on the test space, when one exists.
    pub lambda: Option<Rational>,
    /// `rank[target, im D, op] − rank[target, im D]`: 0 when `op` lies in
    /// the span, 1 otherwise.
    pub residual_rank: usize,
    /// `true` when `target` alone is already exact on the test space, so
    /// `λ` is not determined.
    pub target_exact: bool,
    pub equations: usize,
    pub basis_size: usize,
}

/// Solves `op = λ·target + D(χ_{21} + χ_{12})` exactly, with `χ` ranging over
/// [`record_basis`] records of derivative order ≤ `order` and coefficient
/// degree ≤ `coeff_degree` in bidegrees `(1,2)` and `(2,1)`, tested on all
/// monomial pairs of per-slot degree ≤ `test_degree`.
pub fn bracket_identification(
    op: &Cochain,
    target: &Cochain,
    signs: GsSigns,
    order: u32,
    coeff_degree: u32,
    test_degree: u32,
) -> BracketFit {
    let dim = op.dim;
    let mut exact: Vec<Cochain> = Vec::new();
    for rec in record_basis(dim, 1, 2, order, coeff_degree) {
        exact.push(d_gs1(&Cochain::symbolic(rec), signs));
    }
    let twist = qi(signs.twist.sign(2, 1));
    for rec in record_basis(dim, 2, 1, order, coeff_degree) {
        exact.push(d_gs2(&Cochain::symbolic(rec), signs).scale(&twist));
    }
    let tuples = monomial_tuples(dim, 2, test_degree);
    let mut index = BTreeMap::new();
    let mut cols = vec![value_vector(op, &tuples, &mut index), value_vector(target, &tuples, &mut index)];
    for c in &exact {
        cols.push(value_vector(c, &tuples, &mut index));
    }
    let with_op = nullspace(&cols);
    let without_op = nullspace(&cols[1..]);
    let rank_with = cols.len() - with_op.len();
    let rank_without = cols.len() - 1 - without_op.len();
    let target_exact = without_op.iter().any(|v| !v[0].is_zero());
    let lambda = with_op.iter().find(|v| !v[0].is_zero()).and_then(|v| if target_exact { None } else { Some(-(&v[1] / &v[0])) });
    BracketFit { lambda, residual_rank: rank_with - rank_without, target_exact, equations: index.len(), basis_size: exact.len() }
}

/// HKR-type image: the corolla graph compiled with `γ`.
pub fn hkr(gamma: &StructTensor) -> Cochain {
    compile(&corolla(gamma.a, gamma.b), std::slice::from_ref(gamma), gamma.dim).expect("one tensor")
}

/// Symbolic basis of records with `m` inputs, `n` outputs, per-slot
/// derivative order ≤ `order` and total coefficient degree ≤ `coeff_degree`.
pub fn record_basis(dim: usize, m: usize, n: usize, order: u32, coeff_degree: u32) -> Vec<SymbolicOp> {
    let ders = Monomial::all_up_to(dim, order);
    let mut deriv_tuples: Vec<Vec<Monomial>> = vec![vec![]];
    for _ in 0..m {
        deriv_tuples = deriv_tuples
            .into_iter()
            .flat_map(|p| {
                ders.iter().map(move |d| {
                    let mut q = p.clone();
                    q.push(d.clone());
                    q
                })
            })
            .collect();
    }
    let monos = Monomial::all_up_to(dim, coeff_degree);
    let mut mono_tuples: Vec<Vec<Monomial>> = vec![vec![]];
    for _ in 0..n {
        mono_tuples = mono_tuples
            .into_iter()
            .flat_map(|p| {
                monos.iter().map(move |x| {
                    let mut q = p.clone();
                    q.push(x.clone());
                    q
                })
            })
            .collect();
    }
    mono_tuples.retain(|t| t.iter().map(Monomial::degree).sum::<u32>() <= coeff_degree);
    let mut out = Vec::new();
    for d in &deriv_tuples {
        for mm in &mono_tuples {
            let mut op = SymbolicOp::zero(dim, m, n);
            op.add_term(OpKey { derivs: d.clone(), monos: mm.clone() }, Rational::one());
            out.push(op);
        }
    }
    out
}

/// Result of an exact least-squares-free linear solve `Σ u_k b_k = target`.
#[derive(Clone, Debug)]
pub struct LinearFit {
    pub solvable: bool,
    /// One solution (free variables set to zero) when solvable.
    pub solution: Vec<Rational>,
    /// Number of equations that stay violated by the best elimination
    /// (0 iff solvable).
    pub residual_equations: usize,
    pub rank: usize,
}

/// Exact Gaussian elimination on the augmented system `M u = t`.
pub fn solve_exact(columns: &[Vec<Rational>], target: &[Rational]) -> LinearFit {
    let rows = target.len();
    let cols = columns.len();
    let mut a: Vec<Vec<Rational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rational> = columns.iter().map(|c| c[r].clone()).collect();
            row.push(target[r].clone());
            row
        })
        .filter(|row| row.iter().any(|x| !x.is_zero()))
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = Rational::one() / a[r][c].clone();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let pivot_row = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(pivot_row.iter()) {
                    *x = &*x - &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    let residual_equations = a[r..].iter().filter(|row| !row[cols].is_zero()).count();
    let mut solution = vec![Rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        solution[c] = a[i][cols].clone();
    }
    LinearFit { solvable: residual_equations == 0, solution, residual_equations, rank: pivots.len() }
}

/// Basis of the exact nullspace of the matrix whose sparse columns are given
/// (row index → entry).  Rows are eliminated one at a time, so memory stays
/// bounded by the square of the column count.
pub fn nullspace(columns: &[BTreeMap<usize, Rational>]) -> Vec<Vec<Rational>> {
    let cols = columns.len();
    let mut rows: BTreeMap<usize, BTreeMap<usize, Rational>> = BTreeMap::new();
    for (c, col) in columns.iter().enumerate() {
        for (&r, v) in col {
            if !v.is_zero() {
                rows.entry(r).or_default().insert(c, v.clone());
            }
        }
    }
    // reduced rows keyed by pivot column, each with pivot entry 1
    let mut basis: BTreeMap<usize, BTreeMap<usize, Rational>> = BTreeMap::new();
    for (_, mut row) in rows {
        for (&p, prow) in &basis {
            if let Some(f) = row.get(&p).cloned() {
                for (&c, v) in prow {
                    let e = row.entry(c).or_insert_with(Rational::zero);
                    *e = &*e - &f * v;
                }
                row.retain(|_, v| !v.is_zero());
            }
        }
        let Some((&p, pv)) = row.iter().next() else { continue };
        let inv = Rational::one() / pv.clone();
        for v in row.values_mut() {
            *v = &*v * &inv;
        }
        for prow in basis.values_mut() {
            if let Some(f) = prow.get(&p).cloned() {
                for (&c, v) in &row {
                    let e = prow.entry(c).or_insert_with(Rational::zero);
                    *e = &*e - &f * v;
                }
                prow.retain(|_, v| !v.is_zero());
            }
        }
        basis.insert(p, row);
        if basis.len() == cols {
            break;
        }
    }
    (0..cols)
        .filter(|c| !basis.contains_key(c))
        .map(|f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (&p, prow) in &basis {
                if let Some(x) = prow.get(&f) {
                    v[p] = -x.clone();
                }
            }
            v
        })
        .collect()
}

/// Flattens the values of a cochain on the given tuples into a coefficient
/// vector indexed by `(tuple, output key)`.
pub fn value_vector(
    c: &Cochain,
    tuples: &[Vec<Monomial>],
    index: &mut BTreeMap<(usize, Vec<Monomial>), usize>,
) -> BTreeMap<usize, Rational> {
    let mut out = BTreeMap::new();
    for (t, x) in tuples.iter().enumerate() {
        for (k, v) in c.eval_monomials(x).terms() {
            let next = index.len();
            let id = *index.entry((t, k.clone())).or_insert(next);
            out.insert(id, v.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::cochain_eq;

    #[test]
    fn identity_differentials() {
        let d = 2;
        let id = Cochain::identity(d);
        let s = GsSigns::default();
        // d1(id)(a0, a1) = a0 a1 − a0 a1 + a0 a1
        assert!(cochain_eq(&d_gs1(&id, s), &Cochain::mul(d)).unwrap());
        assert!(cochain_eq(&d_gs2(&id, s), &Cochain::coproduct(d)).unwrap());
    }

    #[test]
    fn product_and_coproduct_are_cocycles() {
        let d = 2;
        let s = GsSigns::default();
        assert!(d_gs1(&Cochain::mul(d), s).as_symbolic().unwrap().is_zero());
        assert!(d_gs2(&Cochain::coproduct(d), s).as_symbolic().unwrap().is_zero());
    }

    #[test]
    fn defect_table_matches_closed_form() {
        for m1 in 0..=4 {
            for n1 in 0..=4 {
                let closed = 2 * (m1 * n1) as i64 - m1 as i64 - n1 as i64;
                assert_eq!(degree_defect(m1, n1), closed);
            }
        }
    }

    #[test]
    fn exact_solver() {
        let c = |v: &[i64]| v.iter().map(|&x| crate::poly::q(x)).collect::<Vec<_>>();
        let fit = solve_exact(&[c(&[1, 0, 1]), c(&[0, 1, 1])], &c(&[2, 3, 5]));
        assert!(fit.solvable);
        assert_eq!(fit.solution, c(&[2, 3]));
        let fit = solve_exact(&[c(&[1, 0, 1])], &c(&[2, 3, 5]));
        assert!(!fit.solvable);
    }
}
