//! Two-parameter product and coproduct series and their bialgebra axioms.
//!
//! The coefficient of `ℏ₁^{ℓ₁} ℏ₂^{ℓ₂}` in `f * g` is
//! `(1/ℓ₁!ℓ₂!) Σ_Γ w_Γ Alt Φ_Γ(α,…,α,β,…,β)(f⊗g)` over labeled graphs of
//! `Γ_{2,1;ℓ₁+ℓ₂}` with edge budget `3(ℓ₁+ℓ₂)`; the coproduct uses
//! `Γ_{1,2;ℓ₁+ℓ₂}`.  Weights stay symbolic: every coefficient is a linear
//! form in weight variables, so axiom defects are exact polynomials in the
//! weights, evaluated numerically only at the end with first-order error
//! propagation.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::bracket::is_lie_bialgebra;
use crate::cochain::{monomial_tuples, Cochain};
use crate::error::{GeometryError, QuantizeError};
use crate::geometry::mc::{McParams, WeightEstimate};
use crate::geometry::propagator::PropagatorParams;
use crate::geometry::weights::{class_representative, WeightCache, WeightConvention};
use crate::graph::{enumerate, AdmissibleGraph};
use crate::graph_ops::alternated_compile;
use crate::poly::{factorial, Monomial, Rational, TensorPoly};
use crate::tensor::StructTensor;

/// `(ℓ₁, ℓ₂)`: powers of `ℏ₁` (bracket) and `ℏ₂` (cobracket).
pub type Bidegree = (usize, usize);

/// Sorted multiset of weight variables.
pub type WMono = Vec<String>;

fn mono_mul(a: &WMono, b: &WMono) -> WMono {
    let mut m: WMono = a.iter().chain(b).cloned().collect();
    m.sort();
    m
}

/// Operator `A^{⊗m} → A^{⊗n}` whose coefficients are polynomials in weight
/// variables: `Σ_μ μ · C_μ`.
#[derive(Clone, Debug)]
pub struct WeightedOp {
    pub dim: usize,
    pub m: usize,
    pub n: usize,
    pub parts: BTreeMap<WMono, Cochain>,
}

impl WeightedOp {
    pub fn zero(dim: usize, m: usize, n: usize) -> Self {
        WeightedOp { dim, m, n, parts: BTreeMap::new() }
    }

    pub fn constant(c: Cochain) -> Self {
        let mut op = WeightedOp::zero(c.dim, c.m, c.n);
        op.parts.insert(Vec::new(), c);
        op
    }

    /// Adds `c · μ · op`.
    pub fn add_part(&mut self, mono: WMono, op: &Cochain, c: &Rational) -> Result<(), QuantizeError> {
        let cur = self.parts.remove(&mono).unwrap_or_else(|| Cochain::zero(self.dim, self.m, self.n));
        let next = cur.lincomb(op, c)?;
        if !next.as_symbolic().is_some_and(|s| s.is_zero()) {
            self.parts.insert(mono, next);
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.parts.values().all(|c| c.as_symbolic().is_some_and(|s| s.is_zero()))
    }

    /// The weight-free operator obtained by substituting exact values.
    pub fn substitute(&self, values: &BTreeMap<String, Rational>) -> Result<Cochain, QuantizeError> {
        let mut acc = Cochain::zero(self.dim, self.m, self.n);
        for (mono, c) in &self.parts {
            let mut k = Rational::from_integer(1.into());
            for v in mono {
                k *= values.get(v).ok_or_else(|| QuantizeError::MissingWeight(v.clone()))?;
            }
            acc = acc.lincomb(c, &k)?;
        }
        Ok(acc)
    }

    fn eval_key(&self, key: &[Monomial]) -> WTensor {
        let mut out = WTensor::zero(self.dim, self.n);
        for (mono, c) in &self.parts {
            let v = c.eval_monomials(key);
            if !v.is_zero() {
                out.add(mono.clone(), &v, &Rational::from_integer(1.into()));
            }
        }
        out
    }
}

/// Element of `A^{⊗k}` with coefficients polynomial in weight variables.
#[derive(Clone, Debug, PartialEq)]
pub struct WTensor {
    pub dim: usize,
    pub arity: usize,
    pub parts: BTreeMap<WMono, TensorPoly>,
}

impl WTensor {
    pub fn zero(dim: usize, arity: usize) -> Self {
        WTensor { dim, arity, parts: BTreeMap::new() }
    }

    /// The pure tensor of monomials `x_1 ⊗ … ⊗ x_k`.
    pub fn monomials(dim: usize, key: &[Monomial]) -> Self {
        let mut t = TensorPoly::zero(dim, key.len());
        t.add_term(key.to_vec(), Rational::from_integer(1.into()));
        let mut w = WTensor::zero(dim, key.len());
        w.parts.insert(Vec::new(), t);
        w
    }

    fn add(&mut self, mono: WMono, t: &TensorPoly, c: &Rational) {
        let e = self.parts.entry(mono.clone()).or_insert_with(|| TensorPoly::zero(self.dim, self.arity));
        e.add_scaled(t, c).expect("same shape");
        if e.is_zero() {
            self.parts.remove(&mono);
        }
    }

    /// `self + c · other`.
    pub fn add_scaled(&mut self, other: &WTensor, c: &Rational) {
        assert_eq!(self.arity, other.arity);
        for (mono, t) in &other.parts {
            self.add(mono.clone(), t, c);
        }
    }

    /// Outer tensor product.
    pub fn tensor(&self, other: &WTensor) -> WTensor {
        let mut out = WTensor::zero(self.dim, self.arity + other.arity);
        for (ma, ta) in &self.parts {
            for (mb, tb) in &other.parts {
                out.add(mono_mul(ma, mb), &ta.tensor(tb).expect("dims agree"), &Rational::from_integer(1.into()));
            }
        }
        out
    }

    pub fn permute_slots(&self, perm: &[usize]) -> WTensor {
        WTensor { dim: self.dim, arity: self.arity, parts: self.parts.iter().map(|(m, t)| (m.clone(), t.permute_slots(perm))).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }
}

/// Applies `ops[0] ⊗ ops[1] ⊗ …` to consecutive slot groups of `input`.
pub fn apply_parallel(ops: &[&WeightedOp], input: &WTensor) -> WTensor {
    let total_in: usize = ops.iter().map(|o| o.m).sum();
    let total_out: usize = ops.iter().map(|o| o.n).sum();
    assert_eq!(input.arity, total_in, "apply_parallel arity");
    let mut cache: HashMap<(usize, Vec<Monomial>), WTensor> = HashMap::new();
    let mut out = WTensor::zero(input.dim, total_out);
    for (mono, t) in &input.parts {
        for (key, c) in t.terms() {
            let mut acc = WTensor::zero(input.dim, 0);
            acc.parts.insert(mono.clone(), TensorPoly::one(input.dim, 0));
            let mut pos = 0;
            for (i, op) in ops.iter().enumerate() {
                let group = key[pos..pos + op.m].to_vec();
                pos += op.m;
                let v = cache.entry((i, group)).or_insert_with_key(|(_, g)| op.eval_key(g));
                acc = acc.tensor(v);
                if acc.is_zero() {
                    break;
                }
            }
            if !acc.is_zero() {
                out.add_scaled(&acc, c);
            }
        }
    }
    out
}

fn apply(op: &WeightedOp, input: &WTensor) -> WTensor {
    apply_parallel(&[op], input)
}

/// Weights of labeled graphs read from a table, one variable per class of
/// graphs sharing a literal integral.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightTable {
    pub profile: String,
    pub convention: WeightConvention,
    pub seed: u64,
    pub samples: u64,
    pub version: String,
    /// Labeled canonical key → estimates per `ε`, extrapolated last (`ε = 0`).
    pub entries: BTreeMap<String, Vec<WeightEstimate>>,
}

pub fn convention_name(c: WeightConvention) -> &'static str {
    match c {
        WeightConvention::LabelSign => "label-sign",
        WeightConvention::Literal => "literal",
    }
}

pub fn parse_convention(s: &str) -> Option<WeightConvention> {
    match s {
        "label-sign" => Some(WeightConvention::LabelSign),
        "literal" => Some(WeightConvention::Literal),
        _ => None,
    }
}

impl WeightTable {
    pub fn new(profile: &str, convention: WeightConvention, seed: u64, samples: u64) -> Self {
        WeightTable {
            profile: profile.to_string(),
            convention,
            seed,
            samples,
            version: crate::VERSION.to_string(),
            entries: BTreeMap::new(),
        }
    }

    /// Weight-table text: `#` header lines, then `canonical_key value stderr samples eps`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# biquant weight table").unwrap();
        writeln!(s, "# version {}", self.version).unwrap();
        writeln!(s, "# profile {}", self.profile).unwrap();
        writeln!(s, "# convention {}", convention_name(self.convention)).unwrap();
        writeln!(s, "# seed {}", self.seed).unwrap();
        writeln!(s, "# samples {}", self.samples).unwrap();
        for (key, ests) in &self.entries {
            for e in ests {
                writeln!(s, "{key} {} {} {} {}", e.value, e.stderr, e.samples, e.eps).unwrap();
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<WeightTable, QuantizeError> {
        let mut header: BTreeMap<String, String> = BTreeMap::new();
        let mut entries: BTreeMap<String, Vec<WeightEstimate>> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |msg: &str| QuantizeError::Parse { line: lineno + 1, msg: msg.to_string() };
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.trim().split_once(' ') {
                    let (k, v) = (k.to_string(), v.trim().to_string());
                    if let Some(old) = header.get(&k) {
                        if k == "profile" && *old != v {
                            return Err(QuantizeError::MixedProfiles(old.clone(), v));
                        }
                    }
                    header.insert(k, v);
                }
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 5 {
                return Err(err("expected 'canonical_key value stderr samples eps'"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| err("bad number"));
            let est = WeightEstimate {
                value: num(f[1])?,
                stderr: num(f[2])?,
                samples: f[3].parse().map_err(|_| err("bad sample count"))?,
                seed: 0,
                eps: num(f[4])?,
                nonfinite: 0,
            };
            entries.entry(f[0].to_string()).or_default().push(est);
        }
        let get = |k: &str| header.get(k).cloned().ok_or_else(|| QuantizeError::Parse { line: 0, msg: format!("missing header '{k}'") });
        let seed: u64 = get("seed")?.parse().map_err(|_| QuantizeError::Parse { line: 0, msg: "bad seed".into() })?;
        let samples: u64 = get("samples")?.parse().map_err(|_| QuantizeError::Parse { line: 0, msg: "bad samples".into() })?;
        let convention =
            parse_convention(&get("convention")?).ok_or_else(|| QuantizeError::Parse { line: 0, msg: "unknown convention".into() })?;
        for ests in entries.values_mut() {
            for e in ests.iter_mut() {
                e.seed = seed;
            }
            ests.sort_by(|a, b| b.eps.total_cmp(&a.eps));
        }
        Ok(WeightTable { profile: get("profile")?, convention, seed, samples, version: get("version")?, entries })
    }

    /// Adds the entries of `other`; profiles and conventions must agree.
    pub fn merge(&mut self, other: &WeightTable) -> Result<(), QuantizeError> {
        if self.profile != other.profile {
            return Err(QuantizeError::MixedProfiles(self.profile.clone(), other.profile.clone()));
        }
        if self.convention != other.convention {
            return Err(QuantizeError::MixedProfiles(convention_name(self.convention).into(), convention_name(other.convention).into()));
        }
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
        Ok(())
    }

    /// `ε` values present in the table, coarse to fine, extrapolated (`0`) last.
    pub fn eps_values(&self) -> Vec<f64> {
        let mut eps: Vec<f64> = Vec::new();
        for ests in self.entries.values() {
            for e in ests {
                if !eps.contains(&e.eps) {
                    eps.push(e.eps);
                }
            }
        }
        eps.sort_by(|a, b| b.total_cmp(a));
        eps
    }

    pub fn estimate(&self, key: &str, eps: f64) -> Option<&WeightEstimate> {
        self.entries.get(key)?.iter().find(|e| e.eps == eps)
    }
}

/// Computes weight series for `graphs` into a table; graphs sharing a
/// literal integral share one Monte-Carlo run.
pub fn compute_table(
    graphs: &[AdmissibleGraph],
    conv: WeightConvention,
    base: &PropagatorParams,
    schedule: &[f64],
    mc: &McParams,
) -> Result<WeightTable, GeometryError> {
    let mut table = WeightTable::new(&base.profile, conv, mc.seed, mc.samples);
    let mut cache = WeightCache::new();
    for g in graphs {
        let s = cache.series(g, conv, base, schedule, mc)?;
        let mut ests = s.per_eps.clone();
        ests.push(s.extrapolated.clone());
        table.entries.insert(g.canonical_key(), ests);
    }
    Ok(table)
}

/// Variable name and sign for a labeled graph: `w(Γ) = sign · var`.
pub fn weight_variable(g: &AdmissibleGraph, conv: WeightConvention) -> (String, i32) {
    match conv {
        WeightConvention::Literal => (g.canonical_key(), 1),
        WeightConvention::LabelSign => {
            let (rep, sign) = class_representative(g);
            (rep.canonical_key(), sign)
        }
    }
}

/// One weight variable at one `ε`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightValue {
    pub value: f64,
    pub stderr: f64,
}

/// A product or coproduct series truncated at its caps.
#[derive(Clone, Debug)]
pub struct StarSeries {
    pub caps: Bidegree,
    /// `(2,1)` for the product, `(1,2)` for the coproduct.
    pub shape: (usize, usize),
    pub terms: BTreeMap<Bidegree, WeightedOp>,
    /// Variable → labeled graphs carrying it with their signs.
    pub variables: BTreeMap<String, Vec<(String, i32)>>,
    pub convention: WeightConvention,
}

impl StarSeries {
    pub fn term(&self, b: Bidegree) -> Option<&WeightedOp> {
        self.terms.get(&b)
    }

    /// Variable values at one `ε` of the table.
    pub fn values(&self, table: &WeightTable, eps: f64) -> Result<BTreeMap<String, WeightValue>, QuantizeError> {
        let mut out = BTreeMap::new();
        for (var, graphs) in &self.variables {
            let (key, sign) = &graphs[0];
            let e = table.estimate(key, eps).ok_or_else(|| QuantizeError::MissingWeight(format!("{key} at eps {eps}")))?;
            out.insert(var.clone(), WeightValue { value: e.value * *sign as f64, stderr: e.stderr });
        }
        Ok(out)
    }
}

/// Per-order rescaling of the literal `1/ℓ₁!ℓ₂!` prefactors; missing orders use 1.
pub type Rescaling = BTreeMap<Bidegree, Rational>;

/// Labeled graphs contributing to one series at bidegree `(ℓ₁, ℓ₂)`.
pub fn series_graphs(shape: (usize, usize), l: Bidegree) -> Vec<AdmissibleGraph> {
    let s = l.0 + l.1;
    enumerate(shape.0, shape.1, s, 3 * s)
        .into_iter()
        .filter(|g| {
            let mut a = 0;
            let mut b = 0;
            for k in 0..g.s {
                match (g.star[k].len(), g.end[k].len()) {
                    (2, 1) => a += 1,
                    (1, 2) => b += 1,
                    _ => return false,
                }
            }
            (a, b) == l
        })
        .collect()
}

fn build_series(
    shape: (usize, usize),
    alpha: &StructTensor,
    beta: &StructTensor,
    caps: Bidegree,
    table: &WeightTable,
    rescale: &Rescaling,
) -> Result<StarSeries, QuantizeError> {
    let report = is_lie_bialgebra(alpha, beta);
    if !report.passed() {
        return Err(QuantizeError::NotBialgebra(format!("{report:?}")));
    }
    let dim = alpha.dim;
    let conv = table.convention;
    let mut terms = BTreeMap::new();
    let mut variables: BTreeMap<String, Vec<(String, i32)>> = BTreeMap::new();
    for l1 in 0..=caps.0 {
        for l2 in 0..=caps.1 {
            let l = (l1, l2);
            let scale = rescale.get(&l).cloned().unwrap_or_else(|| Rational::from_integer(1.into()))
                / Rational::from_integer(factorial(l1 as u32) * factorial(l2 as u32));
            let mut op = WeightedOp::zero(dim, shape.0, shape.1);
            if l == (0, 0) {
                let base = if shape == (2, 1) { Cochain::mul(dim) } else { Cochain::coproduct(dim) };
                op.add_part(Vec::new(), &base, &scale)?;
                terms.insert(l, op);
                continue;
            }
            let mut tensors = vec![alpha.clone(); l1];
            tensors.extend(std::iter::repeat_n(beta.clone(), l2));
            for g in series_graphs(shape, l) {
                let c = alternated_compile(&g, &tensors, dim)?;
                if c.as_symbolic().is_some_and(|s| s.is_zero()) {
                    continue;
                }
                let key = g.canonical_key();
                if !table.entries.contains_key(&key) {
                    return Err(QuantizeError::MissingWeight(key));
                }
                let (var, sign) = weight_variable(&g, conv);
                variables.entry(var.clone()).or_default().push((key, sign));
                op.add_part(vec![var], &c, &(&scale * Rational::from_integer(sign.into())))?;
            }
            terms.insert(l, op);
        }
    }
    Ok(StarSeries { caps, shape, terms, variables, convention: conv })
}

/// The product series `f * g` up to `caps`.
pub fn build_star(
    alpha: &StructTensor,
    beta: &StructTensor,
    caps: Bidegree,
    table: &WeightTable,
    rescale: &Rescaling,
) -> Result<StarSeries, QuantizeError> {
    build_series((2, 1), alpha, beta, caps, table, rescale)
}

/// The coproduct series `Δ_*(f)` up to `caps`.
pub fn build_costar(
    alpha: &StructTensor,
    beta: &StructTensor,
    caps: Bidegree,
    table: &WeightTable,
    rescale: &Rescaling,
) -> Result<StarSeries, QuantizeError> {
    build_series((1, 2), alpha, beta, caps, table, rescale)
}

/// Labeled graphs whose weights a quantization up to `caps` needs.
pub fn required_graphs(caps: Bidegree) -> Vec<AdmissibleGraph> {
    let mut out = Vec::new();
    for l1 in 0..=caps.0 {
        for l2 in 0..=caps.1 {
            if l1 + l2 > 0 {
                out.extend(series_graphs((2, 1), (l1, l2)));
                out.extend(series_graphs((1, 2), (l1, l2)));
            }
        }
    }
    out
}

/// The three bialgebra axioms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axiom {
    Associativity,
    Coassociativity,
    Compatibility,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::Associativity => "associativity",
            Axiom::Coassociativity => "coassociativity",
            Axiom::Compatibility => "compatibility",
        }
    }
}

fn splits(l: Bidegree) -> Vec<(Bidegree, Bidegree)> {
    let mut out = Vec::new();
    for a1 in 0..=l.0 {
        for a2 in 0..=l.1 {
            out.push(((a1, a2), (l.0 - a1, l.1 - a2)));
        }
    }
    out
}

/// Defect of one axiom at bidegree `l` on one input tuple:
/// associator `Σ P_A(P_B(f,g),h) − P_A(f,P_B(g,h))`, coassociator
/// `Σ (D_A⊗id)D_B f − (id⊗D_A)D_B f`, compatibility
/// `Σ D_A(P_B(f,g)) − Σ (P_{K₁}⊗P_{K₂})(D_A f ⊗ D_B g)` with the slotwise
/// product on `A⊗A`.
pub fn axiom_defect(axiom: Axiom, star: &StarSeries, costar: &StarSeries, l: Bidegree, inputs: &[Monomial]) -> WTensor {
    let dim = star.terms[&(0, 0)].dim;
    let id = WeightedOp::constant(Cochain::identity(dim));
    let one = Rational::from_integer(1.into());
    let minus = -one.clone();
    let x = WTensor::monomials(dim, inputs);
    match axiom {
        Axiom::Associativity => {
            let mut out = WTensor::zero(dim, 1);
            for (a, b) in splits(l) {
                let (Some(pa), Some(pb)) = (star.term(a), star.term(b)) else { continue };
                out.add_scaled(&apply(pa, &apply_parallel(&[pb, &id], &x)), &one);
                out.add_scaled(&apply(pa, &apply_parallel(&[&id, pb], &x)), &minus);
            }
            out
        }
        Axiom::Coassociativity => {
            let mut out = WTensor::zero(dim, 3);
            for (a, b) in splits(l) {
                let (Some(da), Some(db)) = (costar.term(a), costar.term(b)) else { continue };
                let y = apply(db, &x);
                out.add_scaled(&apply_parallel(&[da, &id], &y), &one);
                out.add_scaled(&apply_parallel(&[&id, da], &y), &minus);
            }
            out
        }
        Axiom::Compatibility => {
            let mut out = WTensor::zero(dim, 2);
            for (a, b) in splits(l) {
                let (Some(da), Some(pb)) = (costar.term(a), star.term(b)) else { continue };
                out.add_scaled(&apply(da, &apply(pb, &x)), &one);
            }
            let f = WTensor::monomials(dim, &inputs[..1]);
            let g = WTensor::monomials(dim, &inputs[1..]);
            for (a, rest) in splits(l) {
                let Some(da) = costar.term(a) else { continue };
                let df = apply(da, &f);
                for (b, k) in splits(rest) {
                    let Some(db) = costar.term(b) else { continue };
                    // (x1 ⊗ x2) ⊗ (y1 ⊗ y2) → x1 ⊗ y1 ⊗ x2 ⊗ y2
                    let pair = df.tensor(&apply(db, &g)).permute_slots(&[0, 2, 1, 3]);
                    for (k1, k2) in splits(k) {
                        let (Some(p1), Some(p2)) = (star.term(k1), star.term(k2)) else { continue };
                        out.add_scaled(&apply_parallel(&[p1, p2], &pair), &minus);
                    }
                }
            }
            out
        }
    }
}

/// One scalar component of a defect as a polynomial in weight variables.
pub type DefectComponent = BTreeMap<WMono, Rational>;

/// Input tuple and output monomial key of a component.
pub type ComponentKey = (Vec<Monomial>, Vec<Monomial>);

/// All components of an axiom defect at `l` over monomial input tuples of
/// per-slot degree ≤ `test_degree`, keyed by input tuple and output term.
pub fn defect_components(
    axiom: Axiom,
    star: &StarSeries,
    costar: &StarSeries,
    l: Bidegree,
    test_degree: u32,
) -> BTreeMap<ComponentKey, DefectComponent> {
    let dim = star.terms[&(0, 0)].dim;
    let arity = match axiom {
        Axiom::Associativity => 3,
        Axiom::Coassociativity => 1,
        Axiom::Compatibility => 2,
    };
    let tuples = monomial_tuples(dim, arity, test_degree);
    let per_tuple: Vec<Vec<(ComponentKey, DefectComponent)>> = tuples
        .par_iter()
        .map(|t| {
            let d = axiom_defect(axiom, star, costar, l, t);
            let mut comps: BTreeMap<Vec<Monomial>, DefectComponent> = BTreeMap::new();
            for (mono, tp) in &d.parts {
                for (key, c) in tp.terms() {
                    comps.entry(key.clone()).or_default().insert(mono.clone(), c.clone());
                }
            }
            comps.into_iter().map(|(k, c)| ((t.clone(), k), c)).collect()
        })
        .collect();
    per_tuple.into_iter().flatten().collect()
}

/// Outcome of one identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    ExactZero,
    ZeroWithin3Sigma,
    Violation,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::ExactZero => "exact-zero",
            Verdict::ZeroWithin3Sigma => "zero-within-3sigma",
            Verdict::Violation => "violation",
        }
    }
}

/// Numeric value and first-order standard error of a defect component.
pub fn evaluate_component(c: &DefectComponent, values: &BTreeMap<String, WeightValue>) -> (f64, f64, f64) {
    let mut r = 0.0;
    let mut scale = 0.0;
    let mut grad: BTreeMap<&str, f64> = BTreeMap::new();
    for (mono, coef) in c {
        let k = coef.to_f64().unwrap_or(f64::NAN);
        let prod: f64 = mono.iter().map(|v| values[v].value).product();
        r += k * prod;
        scale += (k * prod).abs();
        for (i, v) in mono.iter().enumerate() {
            let rest: f64 = mono.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, u)| values[u].value).product();
            *grad.entry(v.as_str()).or_insert(0.0) += k * rest;
        }
    }
    let var: f64 = grad.iter().map(|(v, g)| (g * values[*v].stderr).powi(2)).sum();
    (r, var.sqrt(), scale)
}

/// Verdict over all components: the reported residual and `σ` belong to the
/// component with the largest `|r|/σ`.
pub fn judge(components: &BTreeMap<ComponentKey, DefectComponent>, values: &BTreeMap<String, WeightValue>) -> (Verdict, f64, f64) {
    if components.values().all(|c| c.values().all(Zero::is_zero)) {
        return (Verdict::ExactZero, 0.0, 0.0);
    }
    let mut worst: Option<(f64, f64, f64)> = None;
    for c in components.values() {
        let (r, s, scale) = evaluate_component(c, values);
        let tol = 1e-12 * (1.0 + scale);
        let z = if r.abs() <= tol {
            0.0
        } else if s > 0.0 {
            r.abs() / s
        } else {
            f64::INFINITY
        };
        if worst.is_none_or(|(wz, _, _)| z > wz) {
            worst = Some((z, r.abs(), s));
        }
    }
    let (z, r, s) = worst.unwrap_or((0.0, 0.0, 0.0));
    let verdict = if z <= 3.0 { Verdict::ZeroWithin3Sigma } else { Verdict::Violation };
    (verdict, r, s)
}

/// Maximum `|r|` over components and the `σ` of that component.
pub fn max_residual(components: &BTreeMap<ComponentKey, DefectComponent>, values: &BTreeMap<String, WeightValue>) -> (f64, f64) {
    let mut best = (0.0, 0.0);
    for c in components.values() {
        let (r, s, _) = evaluate_component(c, values);
        if r.abs() > best.0 {
            best = (r.abs(), s);
        }
    }
    best
}

/// Report line for one axiom at one bidegree.
#[derive(Clone, Debug, PartialEq)]
pub struct AxiomLine {
    pub axiom: Axiom,
    pub bidegree: Bidegree,
    pub verdict: Verdict,
    pub residual: f64,
    pub sigma: f64,
    /// `(ε, max |r|, σ at that component)` for every `ε` of the table.
    pub per_eps: Vec<(f64, f64, f64)>,
}

/// Least-squares rescaling `c` of the order-`(1,1)` terms of both series
/// minimizing the compatibility defect `A + c·B` at the extrapolated weights.
#[derive(Clone, Debug, PartialEq)]
pub struct RescalingFit {
    pub best: f64,
    pub residual_at_best: f64,
    /// `(c, max |r|)` at the literal factor and simple alternatives.
    pub scan: Vec<(f64, f64)>,
}

/// Full axiom report.
#[derive(Clone, Debug, PartialEq)]
pub struct AxiomReport {
    pub lines: Vec<AxiomLine>,
    pub rescaling: Option<RescalingFit>,
}

impl AxiomReport {
    pub fn violations(&self) -> usize {
        self.lines.iter().filter(|l| l.verdict == Verdict::Violation).count()
    }

    /// `axiom bidegree verdict residual sigma` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for l in &self.lines {
            writeln!(s, "{} {},{} {} {:e} {:e}", l.axiom.name(), l.bidegree.0, l.bidegree.1, l.verdict.name(), l.residual, l.sigma)
                .unwrap();
        }
        for l in &self.lines {
            for (eps, r, sg) in &l.per_eps {
                writeln!(s, "# eps {} {} {},{} max_residual {:e} sigma {:e}", eps, l.axiom.name(), l.bidegree.0, l.bidegree.1, r, sg)
                    .unwrap();
            }
        }
        if let Some(f) = &self.rescaling {
            writeln!(s, "# rescaling (1,1) best {} max_residual {:e}", f.best, f.residual_at_best).unwrap();
            for (c, r) in &f.scan {
                writeln!(s, "# rescaling (1,1) factor {} max_residual {:e}", c, r).unwrap();
            }
        }
        s
    }
}

fn combined_values(
    star: &StarSeries,
    costar: &StarSeries,
    table: &WeightTable,
    eps: f64,
) -> Result<BTreeMap<String, WeightValue>, QuantizeError> {
    let mut v = star.values(table, eps)?;
    v.extend(costar.values(table, eps)?);
    Ok(v)
}

/// Evaluates all axioms at every bidegree `≤ cap`.  Verdicts use the
/// extrapolated weights; per-`ε` residuals are listed alongside.
pub fn check_axioms(
    star: &StarSeries,
    costar: &StarSeries,
    cap: Bidegree,
    table: &WeightTable,
    test_degree: u32,
) -> Result<AxiomReport, QuantizeError> {
    let eps_list = table.eps_values();
    let final_eps = if eps_list.contains(&0.0) { 0.0 } else { *eps_list.last().unwrap_or(&0.0) };
    let mut per_eps_values = Vec::new();
    for &e in &eps_list {
        per_eps_values.push((e, combined_values(star, costar, table, e)?));
    }
    let needs_weights = !star.variables.is_empty() || !costar.variables.is_empty();
    let values = if needs_weights { combined_values(star, costar, table, final_eps)? } else { BTreeMap::new() };
    let mut lines = Vec::new();
    for axiom in [Axiom::Associativity, Axiom::Coassociativity, Axiom::Compatibility] {
        for l1 in 0..=cap.0 {
            for l2 in 0..=cap.1 {
                let l = (l1, l2);
                let comps = defect_components(axiom, star, costar, l, test_degree);
                let (verdict, residual, sigma) = judge(&comps, &values);
                let per_eps = if verdict == Verdict::ExactZero {
                    Vec::new()
                } else {
                    per_eps_values
                        .iter()
                        .filter(|(e, _)| *e != 0.0)
                        .map(|(e, v)| {
                            let (r, s) = max_residual(&comps, v);
                            (*e, r, s)
                        })
                        .collect()
                };
                lines.push(AxiomLine { axiom, bidegree: l, verdict, residual, sigma, per_eps });
            }
        }
    }
    Ok(AxiomReport { lines, rescaling: None })
}

/// Fits the order-`(1,1)` rescaling of both series to the compatibility
/// defect at `(1,1)`.
pub fn fit_rescaling(
    alpha: &StructTensor,
    beta: &StructTensor,
    table: &WeightTable,
    test_degree: u32,
) -> Result<RescalingFit, QuantizeError> {
    let caps = (1, 1);
    let build = |c: Rational| -> Result<BTreeMap<ComponentKey, DefectComponent>, QuantizeError> {
        let mut r = Rescaling::new();
        r.insert((1, 1), c);
        let star = build_star(alpha, beta, caps, table, &r)?;
        let costar = build_costar(alpha, beta, caps, table, &r)?;
        Ok(defect_components(Axiom::Compatibility, &star, &costar, (1, 1), test_degree))
    };
    let star = build_star(alpha, beta, caps, table, &Rescaling::new())?;
    let costar = build_costar(alpha, beta, caps, table, &Rescaling::new())?;
    let eps = table.eps_values();
    let e = if eps.contains(&0.0) { 0.0 } else { *eps.last().unwrap_or(&0.0) };
    let values = combined_values(&star, &costar, table, e)?;
    let zero = build(Rational::zero())?;
    let one = build(Rational::from_integer(1.into()))?;
    let mut keys: Vec<&ComponentKey> = zero.keys().chain(one.keys()).collect();
    keys.sort();
    keys.dedup();
    let eval = |m: &BTreeMap<ComponentKey, DefectComponent>, k: &ComponentKey| m.get(k).map_or(0.0, |c| evaluate_component(c, &values).0);
    let a: Vec<f64> = keys.iter().map(|k| eval(&zero, k)).collect();
    let b: Vec<f64> = keys.iter().zip(&a).map(|(k, x)| eval(&one, k) - x).collect();
    let bb: f64 = b.iter().map(|x| x * x).sum();
    let ab: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    let best = if bb > 0.0 { -ab / bb + 0.0 } else { 1.0 };
    let at = |c: f64| a.iter().zip(&b).map(|(x, y)| (x + c * y).abs()).fold(0.0, f64::max);
    let scan = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0].iter().map(|&c| (c, at(c))).collect();
    Ok(RescalingFit { best, residual_at_best: at(best), scan })
}

/// `true` when the maximum residual does not grow as `ε` decreases beyond
/// the combined `3σ` of consecutive values.
pub fn trend_toward_zero(per_eps: &[(f64, f64, f64)]) -> bool {
    per_eps.windows(2).all(|w| {
        let (_, r0, s0) = w[0];
        let (_, r1, s1) = w[1];
        r1 <= r0 + 3.0 * (s0 * s0 + s1 * s1).sqrt()
    })
}
