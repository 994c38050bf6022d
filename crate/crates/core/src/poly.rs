//! Exact polynomials over Q in `d` commuting variables and their tensor powers.
//!
//! `A = S(V*)` is realised as `Q[x_1, ..., x_d]`; `A^{⊗k}` as polynomials in `k`
//! independent copies of the variables.  The coproduct is the algebra morphism
//! with primitive generators.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::PolyError;

pub type Rational = BigRational;

/// Integer `n` as a rational.
pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num/den` as a rational. Panics on a zero denominator.
pub fn qq(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Exponent vector of a monomial.  Ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(d: usize) -> Self {
        Monomial(vec![0; d])
    }

    /// The generator `x^i`, 0-based.
    pub fn var(d: usize, i: usize) -> Self {
        let mut e = vec![0; d];
        e[i] = 1;
        Monomial(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.dim(), other.dim());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise `self <= other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller guarantees divisibility.
    pub fn quotient(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    /// All monomials in `d` variables of total degree at most `max_deg`, sorted.
    pub fn all_up_to(d: usize, max_deg: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; d];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if i == cur.len() {
                out.push(Monomial(cur.clone()));
                return;
            }
            for e in 0..=left {
                cur[i] = e;
                rec(i + 1, left - e, cur, out);
            }
            cur[i] = 0;
        }
        rec(0, max_deg, &mut cur, &mut out);
        out.sort();
        out
    }

    /// All `(a, b)` with `a * b = self`.
    pub fn splits(&self) -> Vec<(Monomial, Monomial)> {
        self.sub_monomials()
            .into_iter()
            .map(|a| {
                let b = a.quotient(self);
                (a, b)
            })
            .collect()
    }

    /// All monomials dividing `self`.
    pub fn sub_monomials(&self) -> Vec<Monomial> {
        let mut out = vec![Vec::with_capacity(self.dim())];
        for &e in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for prefix in &out {
                for k in 0..=e {
                    let mut p = prefix.clone();
                    p.push(k);
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter().map(Monomial).collect()
    }

    /// Product of `e_i!` over the exponents.
    pub fn factorial(&self) -> BigInt {
        self.0.iter().map(|&e| factorial(e)).product()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Polynomial in `dim` variables with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    dim: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Poly { dim, terms: BTreeMap::new() }
    }

    pub fn one(dim: usize) -> Self {
        Poly::monomial(Monomial::one(dim), Rational::one())
    }

    /// The coordinate function `x^i`, 0-based.
    pub fn var(dim: usize, i: usize) -> Self {
        Poly::monomial(Monomial::var(dim, i), Rational::one())
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Poly::monomial(Monomial::one(dim), c)
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Poly::zero(m.dim());
        p.add_term(m, c);
        p
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Poly::zero(dim);
        for (m, c) in terms {
            assert_eq!(m.dim(), dim, "monomial dimension");
            p.add_term(m, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
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

    pub fn add(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.dim);
        }
        Poly { dim: self.dim, terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-Rational::one())
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check_dim(other)?;
        let mut out = Poly::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    /// Formal derivative in `x^i`, 0-based.
    pub fn partial(&self, i: usize) -> Result<Poly, PolyError> {
        if i >= self.dim {
            return Err(PolyError::VariableOutOfRange { index: i, dim: self.dim });
        }
        let mut out = Poly::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut ex = m.0.clone();
            ex[i] -= 1;
            out.add_term(Monomial(ex), c * Rational::from_integer(BigInt::from(e)));
        }
        Ok(out)
    }

    /// Mixed derivative `∂^D`, where `D` is an exponent vector.
    pub fn partial_multi(&self, d: &Monomial) -> Poly {
        assert_eq!(d.dim(), self.dim, "derivative multi-index dimension");
        let mut out = Poly::zero(self.dim);
        for (m, c) in &self.terms {
            if let Some((mm, f)) = derive_monomial(m, d) {
                out.add_term(mm, c * Rational::from_integer(f));
            }
        }
        out
    }

    /// Δ(f) ∈ A ⊗ A.
    pub fn coproduct(&self) -> TensorPoly {
        self.iterated_coproduct(2).expect("n = 2")
    }

    /// Δ^{(n)}: A → A^{⊗n}, `n - 1` applications of Δ; Δ^{(1)} is the identity.
    pub fn iterated_coproduct(&self, n: usize) -> Result<TensorPoly, PolyError> {
        if n == 0 {
            return Err(PolyError::ZeroArity);
        }
        let mut out = TensorPoly::zero(self.dim, n);
        for (m, c) in &self.terms {
            for (parts, mult) in monomial_coproduct(m, n) {
                out.add_term(parts, c * Rational::from_integer(mult));
            }
        }
        Ok(out)
    }

    fn check_dim(&self, other: &Poly) -> Result<(), PolyError> {
        if self.dim != other.dim {
            Err(PolyError::DimensionMismatch { left: self.dim, right: other.dim })
        } else {
            Ok(())
        }
    }

    /// One term per line: `num/den : e1 e2 ... ed`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (m, c) in &self.terms {
            s.push_str(&format_term(c, std::slice::from_ref(m)));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str, dim: usize) -> Result<Poly, PolyError> {
        let t = TensorPoly::from_text(text, dim, 1)?;
        Ok(t.into_poly().expect("arity 1"))
    }
}

/// ∂^D x^m = (m!/(m-D)!) x^{m-D}, or `None` if it vanishes.
pub fn derive_monomial(m: &Monomial, d: &Monomial) -> Option<(Monomial, BigInt)> {
    if !d.divides(m) {
        return None;
    }
    let mut f = BigInt::one();
    for (&a, &b) in m.0.iter().zip(&d.0) {
        for k in 0..b {
            f *= BigInt::from(a - k);
        }
    }
    Some((d.quotient(m), f))
}

/// Terms of Δ^{(n)}(x^m): all splittings of each exponent into `n` parts with
/// multinomial multiplicities.
pub fn monomial_coproduct(m: &Monomial, n: usize) -> Vec<(Vec<Monomial>, BigInt)> {
    let d = m.dim();
    let mut acc: Vec<(Vec<Vec<u32>>, BigInt)> = vec![(vec![vec![0; d]; n], BigInt::one())];
    for (var, &e) in m.0.iter().enumerate() {
        let comps = compositions(e, n);
        let mut next = Vec::with_capacity(acc.len() * comps.len());
        for (parts, mult) in &acc {
            for (comp, w) in &comps {
                let mut p = parts.clone();
                for (slot, &k) in comp.iter().enumerate() {
                    p[slot][var] = k;
                }
                next.push((p, mult * w));
            }
        }
        acc = next;
    }
    acc.into_iter().map(|(parts, w)| (parts.into_iter().map(Monomial).collect(), w)).collect()
}

/// Ordered compositions of `e` into `n` non-negative parts with multinomial weights.
fn compositions(e: u32, n: usize) -> Vec<(Vec<u32>, BigInt)> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur[i] = k;
            rec(i + 1, left - k, cur, out);
        }
    }
    let mut raw = Vec::new();
    rec(0, e, &mut cur, &mut raw);
    let fe = factorial(e);
    for c in raw {
        let denom: BigInt = c.iter().map(|&k| factorial(k)).product();
        out.push((c, &fe / denom));
    }
    out
}

fn format_term(c: &Rational, slots: &[Monomial]) -> String {
    let mut s = format!("{}/{} :", c.numer(), c.denom());
    for (k, m) in slots.iter().enumerate() {
        if k > 0 {
            s.push_str(" |");
        }
        for e in &m.0 {
            s.push_str(&format!(" {e}"));
        }
    }
    s
}

/// Element of `A^{⊗k}`: a finite sum of pure tensors of monomials.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TensorPoly {
    dim: usize,
    arity: usize,
    terms: BTreeMap<Vec<Monomial>, Rational>,
}

impl TensorPoly {
    pub fn zero(dim: usize, arity: usize) -> Self {
        TensorPoly { dim, arity, terms: BTreeMap::new() }
    }

    /// `1 ⊗ ... ⊗ 1`.
    pub fn one(dim: usize, arity: usize) -> Self {
        let mut t = TensorPoly::zero(dim, arity);
        t.add_term(vec![Monomial::one(dim); arity], Rational::one());
        t
    }

    pub fn from_poly(p: &Poly) -> Self {
        TensorPoly { dim: p.dim, arity: 1, terms: p.terms.iter().map(|(m, c)| (vec![m.clone()], c.clone())).collect() }
    }

    /// `p_1 ⊗ ... ⊗ p_k`.
    pub fn pure(slots: &[Poly]) -> Result<Self, PolyError> {
        let first = slots.first().ok_or(PolyError::ZeroArity)?;
        let mut acc = TensorPoly::from_poly(first);
        for p in &slots[1..] {
            acc = acc.tensor(&TensorPoly::from_poly(p))?;
        }
        Ok(acc)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Monomial>, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &[Monomial]) -> Rational {
        self.terms.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn into_poly(self) -> Option<Poly> {
        if self.arity != 1 {
            return None;
        }
        Some(Poly { dim: self.dim, terms: self.terms.into_iter().map(|(mut k, c)| (k.pop().unwrap(), c)).collect() })
    }

    pub fn add_term(&mut self, key: Vec<Monomial>, c: Rational) {
        debug_assert_eq!(key.len(), self.arity);
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

    /// In-place `self += c * other`.
    pub fn add_scaled(&mut self, other: &TensorPoly, c: &Rational) -> Result<(), PolyError> {
        self.check_shape(other)?;
        if c.is_zero() {
            return Ok(());
        }
        for (k, a) in &other.terms {
            self.add_term(k.clone(), a * c);
        }
        Ok(())
    }

    pub fn add(&self, other: &TensorPoly) -> Result<TensorPoly, PolyError> {
        let mut out = self.clone();
        out.add_scaled(other, &Rational::one())?;
        Ok(out)
    }

    pub fn sub(&self, other: &TensorPoly) -> Result<TensorPoly, PolyError> {
        let mut out = self.clone();
        out.add_scaled(other, &-Rational::one())?;
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> TensorPoly {
        if c.is_zero() {
            return TensorPoly::zero(self.dim, self.arity);
        }
        TensorPoly { dim: self.dim, arity: self.arity, terms: self.terms.iter().map(|(k, a)| (k.clone(), a * c)).collect() }
    }

    pub fn neg(&self) -> TensorPoly {
        self.scale(&-Rational::one())
    }

    /// Slotwise product `(a_1⊗a_2)(b_1⊗b_2) = a_1 b_1 ⊗ a_2 b_2`.
    pub fn tensor_mul(&self, other: &TensorPoly) -> Result<TensorPoly, PolyError> {
        self.check_shape(other)?;
        let mut out = TensorPoly::zero(self.dim, self.arity);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let key = ka.iter().zip(kb).map(|(a, b)| a.mul(b)).collect();
                out.add_term(key, ca * cb);
            }
        }
        Ok(out)
    }

    /// Outer tensor product `A^{⊗k} × A^{⊗l} → A^{⊗(k+l)}`.
    pub fn tensor(&self, other: &TensorPoly) -> Result<TensorPoly, PolyError> {
        if self.dim != other.dim {
            return Err(PolyError::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let mut out = TensorPoly::zero(self.dim, self.arity + other.arity);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let mut key = ka.clone();
                key.extend(kb.iter().cloned());
                out.add_term(key, ca * cb);
            }
        }
        Ok(out)
    }

    /// Apply Δ to slot `i` (0-based), raising the arity by one.
    pub fn coproduct_at(&self, i: usize) -> Result<TensorPoly, PolyError> {
        if i >= self.arity {
            return Err(PolyError::SlotOutOfRange { slot: i, arity: self.arity });
        }
        let mut out = TensorPoly::zero(self.dim, self.arity + 1);
        for (k, c) in &self.terms {
            for (parts, w) in monomial_coproduct(&k[i], 2) {
                let mut key = Vec::with_capacity(self.arity + 1);
                key.extend_from_slice(&k[..i]);
                key.extend(parts);
                key.extend_from_slice(&k[i + 1..]);
                out.add_term(key, c * Rational::from_integer(w));
            }
        }
        Ok(out)
    }

    /// Multiply slots `i` and `i+1` together, lowering the arity by one.
    pub fn multiply_adjacent(&self, i: usize) -> Result<TensorPoly, PolyError> {
        if i + 1 >= self.arity {
            return Err(PolyError::SlotOutOfRange { slot: i + 1, arity: self.arity });
        }
        let mut out = TensorPoly::zero(self.dim, self.arity - 1);
        for (k, c) in &self.terms {
            let mut key = Vec::with_capacity(self.arity - 1);
            key.extend_from_slice(&k[..i]);
            key.push(k[i].mul(&k[i + 1]));
            key.extend_from_slice(&k[i + 2..]);
            out.add_term(key, c.clone());
        }
        Ok(out)
    }

    /// Reorder slots: output slot `j` is input slot `perm[j]`.
    pub fn permute_slots(&self, perm: &[usize]) -> TensorPoly {
        assert_eq!(perm.len(), self.arity);
        let mut out = TensorPoly::zero(self.dim, self.arity);
        for (k, c) in &self.terms {
            out.add_term(perm.iter().map(|&p| k[p].clone()).collect(), c.clone());
        }
        out
    }

    /// Largest absolute coefficient, 0 for the zero tensor.
    pub fn max_abs_coeff(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Rational::zero)
    }

    fn check_shape(&self, other: &TensorPoly) -> Result<(), PolyError> {
        if self.dim != other.dim {
            return Err(PolyError::DimensionMismatch { left: self.dim, right: other.dim });
        }
        if self.arity != other.arity {
            return Err(PolyError::ArityMismatch { left: self.arity, right: other.arity });
        }
        Ok(())
    }

    /// One term per line: `num/den : e1 .. ed | e1 .. ed | ...`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, c) in &self.terms {
            s.push_str(&format_term(c, k));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str, dim: usize, arity: usize) -> Result<TensorPoly, PolyError> {
        let mut out = TensorPoly::zero(dim, arity);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| PolyError::Parse { line: lineno + 1, msg: msg.to_string() };
            let (coef, rest) = line.split_once(':').ok_or_else(|| bad("missing ':'"))?;
            let c = parse_rational(coef.trim()).ok_or_else(|| bad("bad coefficient"))?;
            let slots: Vec<&str> = rest.split('|').collect();
            if slots.len() != arity {
                return Err(bad(&format!("expected {arity} slots, found {}", slots.len())));
            }
            let mut key = Vec::with_capacity(arity);
            for slot in slots {
                let exps: Result<Vec<u32>, _> = slot.split_whitespace().map(str::parse).collect();
                let exps = exps.map_err(|_| bad("bad exponent"))?;
                if exps.len() != dim {
                    return Err(bad(&format!("expected {dim} exponents, found {}", exps.len())));
                }
                key.push(Monomial(exps));
            }
            out.add_term(key, c);
        }
        Ok(out)
    }
}

/// Parses `n`, `-n` or `n/d`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rational::new(n, d))
    } else {
        Some(Rational::from_integer(s.parse().ok()?))
    }
}

/// Parses a polynomial expression such as `3/2*x1^2*x2 - x2 + 1`.
/// Variables are `x1..xd` (1-based).
pub fn parse_expr(s: &str, dim: usize) -> Result<Poly, PolyError> {
    let bad = |msg: String| PolyError::Parse { line: 1, msg };
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad("empty expression".into()));
    }
    let mut out = Poly::zero(dim);
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = compact.as_bytes();
    for i in 1..bytes.len() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' {
            terms.push(&compact[start..i]);
            start = i;
        }
    }
    terms.push(&compact[start..]);
    for term in terms {
        let (sign, body) = match term.as_bytes()[0] {
            b'+' => (Rational::one(), &term[1..]),
            b'-' => (-Rational::one(), &term[1..]),
            _ => (Rational::one(), term),
        };
        if body.is_empty() {
            return Err(bad(format!("dangling sign in '{term}'")));
        }
        let mut coef = sign;
        let mut mono = vec![0u32; dim];
        for factor in body.split('*') {
            if let Some(v) = factor.strip_prefix('x') {
                let (idx, pow) = match v.split_once('^') {
                    Some((i, p)) => (i, p.parse::<u32>().map_err(|_| bad(format!("bad power in '{factor}'")))?),
                    None => (v, 1),
                };
                let idx: usize = idx.parse().map_err(|_| bad(format!("bad variable '{factor}'")))?;
                if idx == 0 || idx > dim {
                    return Err(PolyError::VariableOutOfRange { index: idx, dim });
                }
                mono[idx - 1] += pow;
            } else {
                let c = parse_rational(factor).ok_or_else(|| bad(format!("bad factor '{factor}'")))?;
                coef *= c;
            }
        }
        out.add_term(Monomial(mono), coef);
    }
    Ok(out)
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            write_monomial(f, m)?;
        }
        Ok(())
    }
}

impl fmt::Display for TensorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (key, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (i, m) in key.iter().enumerate() {
                write!(f, "{}", if i == 0 { "·(" } else { "⊗" })?;
                if m.is_one() {
                    write!(f, "1")?;
                } else {
                    write_monomial_bare(f, m)?;
                }
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial) -> fmt::Result {
    if !m.is_one() {
        write!(f, "*")?;
        write_monomial_bare(f, m)?;
    }
    Ok(())
}

fn write_monomial_bare(f: &mut fmt::Formatter<'_>, m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        if e == 1 {
            write!(f, "x{}", i + 1)?;
        } else {
            write!(f, "x{}^{}", i + 1, e)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(d: usize, i: usize) -> Poly {
        Poly::var(d, i)
    }

    #[test]
    fn grlex_order_puts_lower_degree_first() {
        let a = Monomial::new(vec![0, 1]);
        let b = Monomial::new(vec![2, 0]);
        let c = Monomial::new(vec![1, 0]);
        assert!(a < b);
        assert!(c < a);
    }

    #[test]
    fn ring_identity() {
        let d = 2;
        let s = x(d, 0).add(&x(d, 1)).unwrap();
        let t = x(d, 0).sub(&x(d, 1)).unwrap();
        let lhs = s.mul(&t).unwrap();
        let rhs = x(d, 0).mul(&x(d, 0)).unwrap().sub(&x(d, 1).mul(&x(d, 1)).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn coproduct_of_square() {
        let d = 1;
        let f = x(d, 0).mul(&x(d, 0)).unwrap();
        let cop = f.coproduct();
        let m = |e| Monomial::new(vec![e]);
        assert_eq!(cop.len(), 3);
        assert_eq!(cop.coeff(&[m(2), m(0)]), q(1));
        assert_eq!(cop.coeff(&[m(1), m(1)]), q(2));
        assert_eq!(cop.coeff(&[m(0), m(2)]), q(1));
    }

    #[test]
    fn iterated_coproduct_zero_is_error() {
        assert!(matches!(Poly::one(2).iterated_coproduct(0), Err(PolyError::ZeroArity)));
    }

    #[test]
    fn partial_examples() {
        let d = 2;
        let f = x(d, 0).mul(&x(d, 0)).unwrap();
        assert_eq!(f.partial(0).unwrap(), x(d, 0).scale(&q(2)));
        assert!(x(d, 0).partial(1).unwrap().is_zero());
        let g = x(d, 0).mul(&x(d, 1)).unwrap();
        assert_eq!(g.partial(0).unwrap().partial(1).unwrap(), Poly::one(d));
        assert!(x(d, 0).partial(2).is_err());
    }

    #[test]
    fn text_round_trip() {
        let d = 2;
        let f = parse_expr("3/2*x1^2*x2 - x2 + 7", d).unwrap();
        let t = f.iterated_coproduct(3).unwrap();
        let back = TensorPoly::from_text(&t.to_text(), d, 3).unwrap();
        assert_eq!(back, t);
        assert_eq!(Poly::from_text(&f.to_text(), d).unwrap(), f);
    }

    #[test]
    fn expression_parser() {
        let f = parse_expr("x1^2 - 2*x1*x2 + 1/3", 2).unwrap();
        assert_eq!(f.coeff(&Monomial::new(vec![2, 0])), q(1));
        assert_eq!(f.coeff(&Monomial::new(vec![1, 1])), q(-2));
        assert_eq!(f.coeff(&Monomial::new(vec![0, 0])), qq(1, 3));
        assert!(parse_expr("x3", 2).is_err());
    }

    #[test]
    fn multiply_adjacent_inverts_coproduct_count() {
        // m ∘ Δ (x^k) = 2^k x^k
        let f = Poly::monomial(Monomial::new(vec![3, 1]), q(1));
        let back = f.coproduct().multiply_adjacent(0).unwrap().into_poly().unwrap();
        assert_eq!(back, f.scale(&q(16)));
    }
}
