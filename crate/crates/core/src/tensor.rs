//! Structure tensors `γ ∈ Hom(∧^a V, ∧^b V)` stored as full antisymmetric
//! component arrays `comps[i_1..i_a; j_1..j_b] = <γ(e_{i_1}∧…∧e_{i_a}), e^{j_1}∧…∧e^{j_b}>`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::OpError;
use crate::graph::{perm_sign, permutations};
use crate::poly::{parse_rational, q, Rational};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct StructTensor {
    pub dim: usize,
    pub a: usize,
    pub b: usize,
    comps: Vec<Rational>,
}

impl StructTensor {
    pub fn zero(dim: usize, a: usize, b: usize) -> Self {
        StructTensor { dim, a, b, comps: vec![Rational::zero(); dim.pow((a + b) as u32)] }
    }

    /// Degree `a + b - 2`.
    pub fn degree(&self) -> i64 {
        self.a as i64 + self.b as i64 - 2
    }

    fn flat(&self, ins: &[usize], outs: &[usize]) -> usize {
        ins.iter().chain(outs).fold(0, |acc, &i| acc * self.dim + i)
    }

    /// Component with 0-based indices.
    pub fn get(&self, ins: &[usize], outs: &[usize]) -> &Rational {
        &self.comps[self.flat(ins, outs)]
    }

    /// Sets one antisymmetric orbit: the entry at `(ins; outs)` becomes `value`
    /// and all index permutations get the corresponding signed value.
    /// Repeated indices inside a block force zero and are ignored.
    pub fn set(&mut self, ins: &[usize], outs: &[usize], value: Rational) {
        assert_eq!(ins.len(), self.a);
        assert_eq!(outs.len(), self.b);
        if has_repeat(ins) || has_repeat(outs) {
            return;
        }
        for pi in permutations(self.a) {
            let ii: Vec<usize> = pi.iter().map(|&k| ins[k]).collect();
            let si = perm_sign(&pi);
            for po in permutations(self.b) {
                let oo: Vec<usize> = po.iter().map(|&k| outs[k]).collect();
                let sign = si * perm_sign(&po);
                let idx = self.flat(&ii, &oo);
                self.comps[idx] = if sign > 0 { value.clone() } else { -value.clone() };
            }
        }
    }

    /// Non-zero entries `(ins, outs, value)` over all index tuples, in
    /// lexicographic index order.
    pub fn nonzero(&self) -> Vec<(Vec<usize>, Vec<usize>, Rational)> {
        let k = self.a + self.b;
        let mut out = Vec::new();
        for (flat, v) in self.comps.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let mut idx = vec![0usize; k];
            let mut r = flat;
            for slot in (0..k).rev() {
                idx[slot] = r % self.dim;
                r /= self.dim;
            }
            let outs = idx.split_off(self.a);
            out.push((idx, outs, v.clone()));
        }
        out
    }

    /// Entries with strictly increasing index blocks; these determine the tensor.
    pub fn independent_entries(&self) -> Vec<(Vec<usize>, Vec<usize>, Rational)> {
        self.nonzero().into_iter().filter(|(i, o, _)| is_increasing(i) && is_increasing(o)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Zero::is_zero)
    }

    pub fn is_antisymmetric(&self) -> bool {
        let mut rebuilt = StructTensor::zero(self.dim, self.a, self.b);
        for (i, o, v) in self.independent_entries() {
            rebuilt.set(&i, &o, v);
        }
        rebuilt == *self
    }

    pub fn add(&self, other: &StructTensor) -> StructTensor {
        assert_eq!((self.dim, self.a, self.b), (other.dim, other.a, other.b));
        StructTensor { dim: self.dim, a: self.a, b: self.b, comps: self.comps.iter().zip(&other.comps).map(|(x, y)| x + y).collect() }
    }

    pub fn scale(&self, c: &Rational) -> StructTensor {
        StructTensor { dim: self.dim, a: self.a, b: self.b, comps: self.comps.iter().map(|x| x * c).collect() }
    }

    /// Raw component array (row-major over `ins` then `outs`).
    pub fn comps(&self) -> &[Rational] {
        &self.comps
    }

    /// Random antisymmetric tensor with small integer entries in `[-range, range]`.
    pub fn random<R: Rng + ?Sized>(dim: usize, a: usize, b: usize, range: i64, rng: &mut R) -> StructTensor {
        let mut t = StructTensor::zero(dim, a, b);
        for ins in increasing_tuples(dim, a) {
            for outs in increasing_tuples(dim, b) {
                t.set(&ins, &outs, q(rng.random_range(-range..=range)));
            }
        }
        t
    }

    /// Structure constants of a Lie bracket: `[e_i, e_j] = Σ_k c[i][j][k] e_k`.
    pub fn from_bracket(dim: usize, entries: &[((usize, usize), usize, Rational)]) -> StructTensor {
        let mut t = StructTensor::zero(dim, 2, 1);
        for ((i, j), k, v) in entries {
            t.set(&[*i, *j], &[*k], v.clone());
        }
        t
    }

    /// Cobracket `δ(e_i) = Σ_{j<k} d e_j ∧ e_k`.
    pub fn from_cobracket(dim: usize, entries: &[(usize, (usize, usize), Rational)]) -> StructTensor {
        let mut t = StructTensor::zero(dim, 1, 2);
        for (i, (j, k), v) in entries {
            t.set(&[*i], &[*j, *k], v.clone());
        }
        t
    }
}

fn has_repeat(v: &[usize]) -> bool {
    (0..v.len()).any(|i| (i + 1..v.len()).any(|j| v[i] == v[j]))
}

fn is_increasing(v: &[usize]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

/// Strictly increasing `k`-tuples from `0..dim`.
pub fn increasing_tuples(dim: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, dim: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(i + 1, dim, k, cur, out);
            cur.pop();
        }
    }
    rec(0, dim, k, &mut cur, &mut out);
    out
}

/// The 2-dimensional Lie bialgebra `[e1, e2] = e2`, `δ(e1) = 0`, `δ(e2) = e1 ∧ e2`.
pub fn example_bialgebra() -> (StructTensor, StructTensor) {
    let alpha = StructTensor::from_bracket(2, &[((0, 1), 1, Rational::one())]);
    let beta = StructTensor::from_cobracket(2, &[(1, (0, 1), Rational::one())]);
    (alpha, beta)
}

/// Parses a structure-tensor file: blocks `gamma k : a b` followed by entries
/// `i1 .. ia ; j1 .. jb = num/den` with 1-based indices; each entry sets its
/// antisymmetric orbit.
pub fn parse_tensors(text: &str, dim: usize) -> Result<BTreeMap<usize, StructTensor>, OpError> {
    let mut out: BTreeMap<usize, StructTensor> = BTreeMap::new();
    let mut current: Option<usize> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| OpError::Parse { line: lineno + 1, msg: msg.to_string() };
        if let Some(rest) = line.strip_prefix("gamma") {
            let (k, ab) = rest.split_once(':').ok_or_else(|| err("expected 'gamma k : a b'"))?;
            let k: usize = k.trim().parse().map_err(|_| err("bad gamma index"))?;
            let ab: Vec<usize> = ab.split_whitespace().map(str::parse).collect::<Result<_, _>>().map_err(|_| err("bad arities"))?;
            if ab.len() != 2 {
                return Err(err("expected two arities"));
            }
            if out.insert(k, StructTensor::zero(dim, ab[0], ab[1])).is_some() {
                return Err(err("duplicate gamma block"));
            }
            current = Some(k);
            continue;
        }
        let k = current.ok_or_else(|| err("entry before any gamma block"))?;
        let t = out.get_mut(&k).unwrap();
        let (idx, val) = line.split_once('=').ok_or_else(|| err("entry needs '='"))?;
        let (ins, outs) = idx.split_once(';').ok_or_else(|| err("entry needs ';'"))?;
        let parse_block = |s: &str| -> Result<Vec<usize>, OpError> {
            s.split_whitespace()
                .map(|x| match x.parse::<usize>() {
                    Ok(i) if i >= 1 && i <= dim => Ok(i - 1),
                    _ => Err(err("index out of range")),
                })
                .collect()
        };
        let ins = parse_block(ins)?;
        let outs = parse_block(outs)?;
        if ins.len() != t.a || outs.len() != t.b {
            return Err(err("entry arity does not match block"));
        }
        let v = parse_rational(val).ok_or_else(|| err("bad value"))?;
        t.set(&ins, &outs, v);
    }
    Ok(out)
}

/// Serializes tensors in the format read by [`parse_tensors`], increasing blocks only.
pub fn tensors_to_text(tensors: &BTreeMap<usize, StructTensor>) -> String {
    let mut s = String::new();
    for (k, t) in tensors {
        s.push_str(&format!("gamma {k} : {} {}\n", t.a, t.b));
        for (i, o, v) in t.independent_entries() {
            let ii: Vec<String> = i.iter().map(|x| (x + 1).to_string()).collect();
            let oo: Vec<String> = o.iter().map(|x| (x + 1).to_string()).collect();
            s.push_str(&format!("{} ; {} = {}/{}\n", ii.join(" "), oo.join(" "), v.numer(), v.denom()));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antisymmetric_set() {
        let (alpha, beta) = example_bialgebra();
        assert_eq!(*alpha.get(&[0, 1], &[1]), q(1));
        assert_eq!(*alpha.get(&[1, 0], &[1]), q(-1));
        assert_eq!(*beta.get(&[1], &[1, 0]), q(-1));
        assert!(alpha.is_antisymmetric());
        assert_eq!(alpha.independent_entries().len(), 1);
    }

    #[test]
    fn file_round_trip() {
        let (alpha, beta) = example_bialgebra();
        let mut m = BTreeMap::new();
        m.insert(1, alpha);
        m.insert(2, beta);
        let back = parse_tensors(&tensors_to_text(&m), 2).unwrap();
        assert_eq!(back, m);
    }
}
