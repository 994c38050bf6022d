//! Graph → polydifferential operator compiler.
//!
//! For an admissible graph with structure tensors at its inner vertices,
//! `Φ_Γ = Σ_I Δ^{(n)}(∏_v Ψ_v) · (⊗_i Ψ_{ū_i})` where the index map `I` runs
//! over edge labellings by `1..d`.  Inner vertices contribute matrix elements
//! of their tensors, lower vertices derivatives of the inputs, upper vertices
//! coordinate monomials.

use num_traits::One;

use crate::cochain::{Cochain, OpKey, SymbolicOp};
use crate::error::OpError;
use crate::graph::{permutations, AdmissibleGraph, Edge, Vertex};
use crate::poly::{Monomial, Rational};
use crate::tensor::StructTensor;

/// Matrix element of `γ_v` for the index labelling of its Star and End blocks
/// read in label order.  Every label-order sign of `Φ_Γ` enters here.
/// `(Star labels, End labels, value)` of a non-zero tensor entry.
type TensorEntry = (Vec<usize>, Vec<usize>, Rational);

pub fn vertex_factor<'a>(gamma: &'a StructTensor, star_idx: &[usize], end_idx: &[usize]) -> &'a Rational {
    gamma.get(star_idx, end_idx)
}

fn check_tensors(g: &AdmissibleGraph, gammas: &[StructTensor], dim: usize) -> Result<(), OpError> {
    if gammas.len() != g.s {
        return Err(OpError::TensorCount { expected: g.s, got: gammas.len() });
    }
    for t in gammas {
        if t.dim != dim {
            return Err(OpError::TensorDimension { expected: dim, got: t.dim });
        }
    }
    Ok(())
}

/// `true` when every `γ_k` has arities `(#Star(k), #End(k))`.
pub fn types_match(g: &AdmissibleGraph, gammas: &[StructTensor]) -> bool {
    gammas.len() == g.s && (0..g.s).all(|k| gammas[k].a == g.star[k].len() && gammas[k].b == g.end[k].len())
}

/// `Φ_Γ(γ_1, …, γ_s)` as a symbolic cochain `A^{⊗m} → A^{⊗n}`.
pub fn compile(g: &AdmissibleGraph, gammas: &[StructTensor], dim: usize) -> Result<Cochain, OpError> {
    check_tensors(g, gammas, dim)?;
    let mut op = SymbolicOp::zero(dim, g.m, g.n);
    if !types_match(g, gammas) {
        return Ok(Cochain::symbolic(op));
    }
    // Non-zero entries indexed by (Star labels; End labels) in label order.
    let entries: Vec<Vec<TensorEntry>> = gammas
        .iter()
        .map(|t| {
            t.nonzero()
                .into_iter()
                .map(|(i, o, _)| {
                    let v = vertex_factor(t, &i, &o).clone();
                    (i, o, v)
                })
                .collect()
        })
        .collect();
    let mut assign: Vec<Option<usize>> = vec![None; g.edges.len()];
    let mut records: Vec<(Vec<usize>, Rational)> = Vec::new();
    assign_vertex(0, g, &entries, &mut assign, Rational::one(), &mut records);
    for (idx, coef) in records {
        let mut derivs = vec![Monomial::one(dim); g.m];
        let mut monos = vec![Monomial::one(dim); g.n];
        for (e, &i) in g.edges.iter().zip(&idx) {
            let unit = Monomial::var(dim, i);
            match (e.src, e.dst) {
                (_, Vertex::Lower(j)) => derivs[j - 1] = derivs[j - 1].mul(&unit),
                (Vertex::Upper(j), _) => monos[j - 1] = monos[j - 1].mul(&unit),
                _ => {}
            }
        }
        op.add_term(OpKey { derivs, monos }, coef);
    }
    Ok(Cochain::symbolic(op))
}

/// Backtracking over inner vertices: choose a non-zero entry of `γ_k`
/// consistent with the indices already fixed on shared inner edges.
fn assign_vertex(
    k: usize,
    g: &AdmissibleGraph,
    entries: &[Vec<TensorEntry>],
    assign: &mut Vec<Option<usize>>,
    coef: Rational,
    out: &mut Vec<(Vec<usize>, Rational)>,
) {
    if k == g.s {
        // every edge touches an inner vertex, so all indices are fixed
        out.push((assign.iter().map(|x| x.unwrap()).collect(), coef));
        return;
    }
    let star = &g.star[k];
    let end = &g.end[k];
    'entry: for (ins, outs, v) in &entries[k] {
        let mut newly = Vec::new();
        for (&e, &i) in star.iter().zip(ins).chain(end.iter().zip(outs)) {
            match assign[e] {
                Some(j) if j != i => {
                    for &u in &newly {
                        assign[u] = None;
                    }
                    continue 'entry;
                }
                Some(_) => {}
                None => {
                    assign[e] = Some(i);
                    newly.push(e);
                }
            }
        }
        assign_vertex(k + 1, g, entries, assign, &coef * v, out);
        for &u in &newly {
            assign[u] = None;
        }
    }
}

/// Degree bookkeeping failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeDefect {
    pub detail: String,
}

/// Checks `Σ(a_ℓ + b_ℓ − 2) = 2#E_inner + #E_external − 2s` and the per-vertex
/// valences against the tensor arities.
pub fn degree_audit(g: &AdmissibleGraph, gammas: &[StructTensor]) -> Result<(), DegreeDefect> {
    if gammas.len() != g.s {
        return Err(DegreeDefect { detail: format!("{} tensors for {} inner vertices", gammas.len(), g.s) });
    }
    for (k, t) in gammas.iter().enumerate() {
        if t.a != g.star[k].len() || t.b != g.end[k].len() {
            return Err(DegreeDefect {
                detail: format!("vertex i{}: tensor ({},{}) but valence ({},{})", k + 1, t.a, t.b, g.star[k].len(), g.end[k].len()),
            });
        }
    }
    let lhs: i64 = gammas.iter().map(StructTensor::degree).sum();
    let rhs = 2 * g.inner_edge_count() as i64 + g.external_edge_count() as i64 - 2 * g.s as i64;
    if lhs != rhs {
        return Err(DegreeDefect { detail: format!("Σ deg γ = {lhs} but 2#E_in + #E_ext − 2s = {rhs}") });
    }
    Ok(())
}

/// Koszul sign of reordering graded elements of the given degrees by `perm`
/// (new position `j` holds old element `perm[j]`).
pub fn koszul_sign(perm: &[usize], degrees: &[i64]) -> i32 {
    let mut sign = 1;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] && (degrees[perm[i]] * degrees[perm[j]]).rem_euclid(2) == 1 {
                sign = -sign;
            }
        }
    }
    sign
}

/// Sign with which `Φ_Γ(γ_{π(1)}, …)` enters the graded antisymmetrization:
/// permutation sign times the Koszul sign for `deg γ = a + b − 2`.
pub fn alt_sign(perm: &[usize], degrees: &[i64]) -> i32 {
    crate::graph::perm_sign(perm) * koszul_sign(perm, degrees)
}

/// `(1/s!) Σ_π ε(π) Φ_Γ(γ_{π(1)}, …, γ_{π(s)})`.
pub fn alternated_compile(g: &AdmissibleGraph, gammas: &[StructTensor], dim: usize) -> Result<Cochain, OpError> {
    check_tensors(g, gammas, dim)?;
    let degrees: Vec<i64> = gammas.iter().map(StructTensor::degree).collect();
    let mut acc = SymbolicOp::zero(dim, g.m, g.n);
    let perms = permutations(g.s);
    let norm = Rational::new(1.into(), (perms.len() as i64).into());
    for p in &perms {
        let permuted: Vec<StructTensor> = p.iter().map(|&i| gammas[i].clone()).collect();
        if !types_match(g, &permuted) {
            continue;
        }
        let c = compile(g, &permuted, dim)?;
        let sign = Rational::from_integer(alt_sign(p, &degrees).into());
        acc.add_scaled(c.as_symbolic().expect("compile is symbolic"), &(&sign * &norm));
    }
    Ok(Cochain::symbolic(acc))
}

/// Γ₁: `s = 0`, two lower vertices, one upper, no edges.
pub fn gamma1() -> AdmissibleGraph {
    AdmissibleGraph::with_default_labels(0, 2, 1, vec![])
}

/// Γ₂: `s = 0`, one lower vertex, two upper, no edges.
pub fn gamma2() -> AdmissibleGraph {
    AdmissibleGraph::with_default_labels(0, 1, 2, vec![])
}

/// Corolla with one inner vertex, edges to each of `a` lower vertices and
/// from each of `b` upper vertices, labels in vertex order.
pub fn corolla(a: usize, b: usize) -> AdmissibleGraph {
    let mut edges: Vec<Edge> = (1..=a).map(|j| Edge::new(Vertex::Inner(1), Vertex::Lower(j))).collect();
    edges.extend((1..=b).map(|j| Edge::new(Vertex::Upper(j), Vertex::Inner(1))));
    AdmissibleGraph::with_default_labels(1, a, b, edges)
}

/// Γ₃: the bracket corolla `(2,1)`.
pub fn gamma3() -> AdmissibleGraph {
    corolla(2, 1)
}

/// Γ₄: the cobracket corolla `(1,2)`.
pub fn gamma4() -> AdmissibleGraph {
    corolla(1, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_expr, Poly};
    use crate::tensor::example_bialgebra;

    #[test]
    fn gamma1_is_product() {
        let c = compile(&gamma1(), &[], 2).unwrap();
        let f = parse_expr("x1^2 + x2", 2).unwrap();
        let g = parse_expr("x1*x2 - 1", 2).unwrap();
        assert_eq!(c.eval(&[f.clone(), g.clone()]).unwrap().into_poly().unwrap(), f.mul(&g).unwrap());
    }

    #[test]
    fn bracket_on_generators() {
        let (alpha, _) = example_bialgebra();
        let c = compile(&gamma3(), &[alpha], 2).unwrap();
        let v = c.eval(&[Poly::var(2, 0), Poly::var(2, 1)]).unwrap().into_poly().unwrap();
        assert_eq!(v, Poly::var(2, 1));
    }

    #[test]
    fn type_mismatch_gives_zero() {
        let (_, beta) = example_bialgebra();
        let c = compile(&gamma3(), std::slice::from_ref(&beta), 2).unwrap();
        assert!(c.as_symbolic().unwrap().is_zero());
        assert!(degree_audit(&gamma3(), &[beta]).is_err());
        assert!(degree_audit(&gamma1(), &[]).is_ok());
    }

    #[test]
    fn koszul_signs() {
        assert_eq!(koszul_sign(&[1, 0], &[1, 1]), -1);
        assert_eq!(koszul_sign(&[1, 0], &[1, 2]), 1);
        assert_eq!(alt_sign(&[1, 0], &[1, 1]), 1);
        assert_eq!(alt_sign(&[1, 0], &[0, 2]), -1);
    }
}
