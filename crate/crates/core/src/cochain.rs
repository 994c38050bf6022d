//! Polydifferential cochains `A^{⊗m} → A^{⊗n}`.
//!
//! A cochain is either *symbolic*, a finite sum of records
//! `c · Δ^{(n)}(∏_i ∂^{D_i} f_i) · (M_1 ⊗ … ⊗ M_n)`, or *extensional*, a
//! procedure on monomial input tuples extended multilinearly.  Symbolic
//! cochains evaluate through the same interface.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::OpError;
use crate::poly::{derive_monomial, monomial_coproduct, parse_rational, Monomial, Poly, Rational, TensorPoly};

/// Derivative order and coefficient degree bounds recorded with a cochain.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Bounds {
    pub order: u32,
    pub coeff_degree: u32,
}

impl Bounds {
    pub fn new(order: u32, coeff_degree: u32) -> Self {
        Bounds { order, coeff_degree }
    }

    /// Per-slot monomial degree up to which agreement decides equality.
    pub fn test_degree(&self) -> u32 {
        self.order + self.coeff_degree + 1
    }

    pub fn max(self, other: Bounds) -> Bounds {
        Bounds { order: self.order.max(other.order), coeff_degree: self.coeff_degree.max(other.coeff_degree) }
    }
}

/// Index of one symbolic record: a derivative multi-index per input slot and
/// a coefficient monomial per output slot.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct OpKey {
    pub derivs: Vec<Monomial>,
    pub monos: Vec<Monomial>,
}

/// Finite sum of symbolic records with exact coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymbolicOp {
    pub dim: usize,
    pub m: usize,
    pub n: usize,
    pub terms: BTreeMap<OpKey, Rational>,
}

impl SymbolicOp {
    pub fn zero(dim: usize, m: usize, n: usize) -> Self {
        SymbolicOp { dim, m, n, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, key: OpKey, c: Rational) {
        debug_assert_eq!(key.derivs.len(), self.m);
        debug_assert_eq!(key.monos.len(), self.n);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &SymbolicOp, c: &Rational) {
        assert_eq!((self.dim, self.m, self.n), (other.dim, other.m, other.n));
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v * c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn bounds(&self) -> Bounds {
        let mut b = Bounds::new(0, 0);
        for k in self.terms.keys() {
            for d in &k.derivs {
                b.order = b.order.max(d.degree());
            }
            let cdeg: u32 = k.monos.iter().map(Monomial::degree).sum();
            b.coeff_degree = b.coeff_degree.max(cdeg);
        }
        b
    }

    /// Text form: header `op dim m n`, then one record per line,
    /// `num/den : D_1 | … | D_m > C_1 | … | C_n` with each `D_i` the exponents
    /// of the derivative on input `i` and each `C_j` the exponents of the
    /// coefficient monomial on output `j`.
    pub fn to_text(&self) -> String {
        let exps = |m: &Monomial| m.exps().iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ");
        let slots = |ms: &[Monomial]| ms.iter().map(exps).collect::<Vec<_>>().join(" | ");
        let mut s = format!("op {} {} {}\n", self.dim, self.m, self.n);
        for (k, c) in &self.terms {
            s.push_str(&format!("{}/{} : {} > {}\n", c.numer(), c.denom(), slots(&k.derivs), slots(&k.monos)));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<SymbolicOp, OpError> {
        let mut op: Option<SymbolicOp> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| OpError::Parse { line: lineno + 1, msg: msg.to_string() };
            let Some(cur) = op.as_mut() else {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 4 || toks[0] != "op" {
                    return Err(err("expected header 'op dim m n'"));
                }
                let nums: Vec<usize> = toks[1..].iter().map(|t| t.parse()).collect::<Result<_, _>>().map_err(|_| err("bad header"))?;
                op = Some(SymbolicOp::zero(nums[0], nums[1], nums[2]));
                continue;
            };
            let (coef, rest) = line.split_once(':').ok_or_else(|| err("record needs ':'"))?;
            let c = parse_rational(coef).ok_or_else(|| err("bad coefficient"))?;
            let (ds, cs) = rest.split_once('>').ok_or_else(|| err("record needs '>'"))?;
            let dim = cur.dim;
            let slots = |part: &str, count: usize| -> Result<Vec<Monomial>, OpError> {
                if count == 0 {
                    return if part.trim().is_empty() { Ok(Vec::new()) } else { Err(err("unexpected slot")) };
                }
                let pieces: Vec<&str> = part.split('|').collect();
                if pieces.len() != count {
                    return Err(err("wrong number of slots"));
                }
                pieces
                    .iter()
                    .map(|p| {
                        let e: Vec<u32> =
                            p.split_whitespace().map(str::parse).collect::<Result<_, _>>().map_err(|_| err("bad exponent"))?;
                        if e.len() != dim {
                            return Err(err("exponent count differs from dim"));
                        }
                        Ok(Monomial::new(e))
                    })
                    .collect()
            };
            let key = OpKey { derivs: slots(ds, cur.m)?, monos: slots(cs, cur.n)? };
            cur.add_term(key, c);
        }
        op.ok_or_else(|| OpError::Parse { line: 0, msg: "empty cochain file".into() })
    }

    /// Value on a tuple of monomials.
    pub fn eval_monomials(&self, inputs: &[Monomial]) -> TensorPoly {
        assert_eq!(inputs.len(), self.m);
        let mut out = TensorPoly::zero(self.dim, self.n);
        for (key, c) in &self.terms {
            let mut h = Monomial::one(self.dim);
            let mut coef = BigInt::one();
            let mut dead = false;
            for (x, d) in inputs.iter().zip(&key.derivs) {
                match derive_monomial(x, d) {
                    Some((mm, f)) => {
                        h = h.mul(&mm);
                        coef *= f;
                    }
                    None => {
                        dead = true;
                        break;
                    }
                }
            }
            if dead {
                continue;
            }
            let c = c * Rational::from_integer(coef);
            if self.n == 0 {
                continue;
            }
            for (parts, w) in monomial_coproduct(&h, self.n) {
                let slots: Vec<Monomial> = parts.iter().zip(&key.monos).map(|(p, m)| p.mul(m)).collect();
                out.add_term(slots, &c * Rational::from_integer(w));
            }
        }
        out
    }
}

type EvalFn = dyn Fn(&[Monomial]) -> TensorPoly + Send + Sync;

#[derive(Clone)]
enum Repr {
    Symbolic(SymbolicOp),
    Extensional(Arc<EvalFn>),
}

/// Multilinear operator `A^{⊗m} → A^{⊗n}` with optional recorded bounds.
#[derive(Clone)]
pub struct Cochain {
    pub dim: usize,
    pub m: usize,
    pub n: usize,
    bounds: Option<Bounds>,
    repr: Repr,
}

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Symbolic(s) => write!(f, "Cochain({},{}; {} records)", self.m, self.n, s.terms.len()),
            Repr::Extensional(_) => write!(f, "Cochain({},{}; extensional, {:?})", self.m, self.n, self.bounds),
        }
    }
}

impl Cochain {
    pub fn symbolic(op: SymbolicOp) -> Self {
        let bounds = Some(op.bounds());
        Cochain { dim: op.dim, m: op.m, n: op.n, bounds, repr: Repr::Symbolic(op) }
    }

    /// Extensional cochain given by its values on monomial tuples.
    pub fn from_fn<F>(dim: usize, m: usize, n: usize, bounds: Option<Bounds>, f: F) -> Self
    where
        F: Fn(&[Monomial]) -> TensorPoly + Send + Sync + 'static,
    {
        Cochain { dim, m, n, bounds, repr: Repr::Extensional(Arc::new(f)) }
    }

    pub fn zero(dim: usize, m: usize, n: usize) -> Self {
        Cochain::symbolic(SymbolicOp::zero(dim, m, n))
    }

    /// `id_A`.
    pub fn identity(dim: usize) -> Self {
        Self::product_like(dim, 1, 1)
    }

    /// The commutative product `A ⊗ A → A`.
    pub fn mul(dim: usize) -> Self {
        Self::product_like(dim, 2, 1)
    }

    /// The coproduct `Δ: A → A ⊗ A`.
    pub fn coproduct(dim: usize) -> Self {
        Self::product_like(dim, 1, 2)
    }

    /// `f_1 ⊗ … ⊗ f_m ↦ Δ^{(n)}(f_1 ⋯ f_m)`.
    pub fn product_like(dim: usize, m: usize, n: usize) -> Self {
        let mut op = SymbolicOp::zero(dim, m, n);
        op.add_term(OpKey { derivs: vec![Monomial::one(dim); m], monos: vec![Monomial::one(dim); n] }, Rational::one());
        Cochain::symbolic(op)
    }

    pub fn bounds(&self) -> Option<Bounds> {
        self.bounds
    }

    pub fn with_bounds(mut self, b: Bounds) -> Self {
        self.bounds = Some(b);
        self
    }

    pub fn as_symbolic(&self) -> Option<&SymbolicOp> {
        match &self.repr {
            Repr::Symbolic(s) => Some(s),
            Repr::Extensional(_) => None,
        }
    }

    pub fn is_symbolic(&self) -> bool {
        self.as_symbolic().is_some()
    }

    /// The same operator with the symbolic form forgotten.
    pub fn to_extensional(&self) -> Cochain {
        let me = self.clone();
        Cochain::from_fn(self.dim, self.m, self.n, self.bounds, move |x| me.eval_monomials(x))
    }

    pub fn eval_monomials(&self, inputs: &[Monomial]) -> TensorPoly {
        match &self.repr {
            Repr::Symbolic(s) => s.eval_monomials(inputs),
            Repr::Extensional(f) => f(inputs),
        }
    }

    /// Value on a pure tensor `f_1 ⊗ … ⊗ f_m`.
    pub fn eval(&self, inputs: &[Poly]) -> Result<TensorPoly, OpError> {
        if inputs.len() != self.m {
            return Err(OpError::Arity(format!("expected {} inputs, got {}", self.m, inputs.len())));
        }
        if self.m == 0 {
            return Ok(self.eval_monomials(&[]));
        }
        let t = TensorPoly::pure(inputs)?;
        self.eval_tensor(&t)
    }

    /// Multilinear extension to `A^{⊗m}`.
    pub fn eval_tensor(&self, input: &TensorPoly) -> Result<TensorPoly, OpError> {
        if input.arity() != self.m {
            return Err(OpError::Arity(format!("expected arity {}, got {}", self.m, input.arity())));
        }
        let mut out = TensorPoly::zero(self.dim, self.n);
        for (key, c) in input.terms() {
            out.add_scaled(&self.eval_monomials(key), c)?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Cochain {
        match &self.repr {
            Repr::Symbolic(s) => {
                let mut z = SymbolicOp::zero(self.dim, self.m, self.n);
                z.add_scaled(s, c);
                Cochain::symbolic(z)
            }
            Repr::Extensional(f) => {
                let f = f.clone();
                let c = c.clone();
                Cochain::from_fn(self.dim, self.m, self.n, self.bounds, move |x| f(x).scale(&c))
            }
        }
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain, OpError> {
        self.lincomb(other, &Rational::one())
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain, OpError> {
        self.lincomb(other, &-Rational::one())
    }

    /// `self + c · other`.
    pub fn lincomb(&self, other: &Cochain, c: &Rational) -> Result<Cochain, OpError> {
        if (self.dim, self.m, self.n) != (other.dim, other.m, other.n) {
            return Err(OpError::Arity(format!("cannot add ({},{}) and ({},{})", self.m, self.n, other.m, other.n)));
        }
        if let (Repr::Symbolic(a), Repr::Symbolic(b)) = (&self.repr, &other.repr) {
            let mut z = a.clone();
            z.add_scaled(b, c);
            return Ok(Cochain::symbolic(z));
        }
        let bounds = match (self.bounds, other.bounds) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        let (a, b, c) = (self.clone(), other.clone(), c.clone());
        Ok(Cochain::from_fn(self.dim, self.m, self.n, bounds, move |x| {
            let mut v = a.eval_monomials(x);
            v.add_scaled(&b.eval_monomials(x), &c).expect("same shape");
            v
        }))
    }

    /// Sum of many cochains of one shape.
    pub fn sum(dim: usize, m: usize, n: usize, parts: &[Cochain]) -> Result<Cochain, OpError> {
        let mut acc = Cochain::zero(dim, m, n);
        for p in parts {
            acc = acc.add(p)?;
        }
        Ok(acc)
    }
}

/// All `m`-tuples of monomials in `dim` variables with per-slot degree ≤ `deg`.
pub fn monomial_tuples(dim: usize, m: usize, deg: u32) -> Vec<Vec<Monomial>> {
    let basis = Monomial::all_up_to(dim, deg);
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::with_capacity(out.len() * basis.len());
        for prefix in &out {
            for b in &basis {
                let mut p = prefix.clone();
                p.push(b.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Extensional equality up to the testability bound of the larger recorded bounds.
pub fn cochain_eq(a: &Cochain, b: &Cochain) -> Result<bool, OpError> {
    if (a.dim, a.m, a.n) != (b.dim, b.m, b.n) {
        return Err(OpError::Arity(format!("({},{}) vs ({},{})", a.m, a.n, b.m, b.n)));
    }
    let bounds = a.bounds.ok_or(OpError::MissingBounds)?.max(b.bounds.ok_or(OpError::MissingBounds)?);
    Ok(agree_up_to(a, b, bounds.test_degree()))
}

/// Agreement on all monomial tuples of per-slot degree ≤ `deg`.
pub fn agree_up_to(a: &Cochain, b: &Cochain, deg: u32) -> bool {
    monomial_tuples(a.dim, a.m, deg).iter().all(|x| a.eval_monomials(x) == b.eval_monomials(x))
}

/// First monomial tuple (up to `deg`) on which the cochain is non-zero.
pub fn first_nonzero(c: &Cochain, deg: u32) -> Option<(Vec<Monomial>, TensorPoly)> {
    monomial_tuples(c.dim, c.m, deg).into_iter().find_map(|x| {
        let v = c.eval_monomials(&x);
        (!v.is_zero()).then_some((x, v))
    })
}
