//! The graph form `Ω_Γ` as a density on the gauge-fixed chart.
//!
//! Every edge contributes exact forms: a lower external edge `k → d_j` the
//! 1-form `d F((p_j − x_k)/λ_k)`, an upper edge `u_j → k` the 1-form
//! `d F(λ_k (q_j − y_k))`, an inner edge `a → b` the 2-form `dU ∧ dV` of the
//! propagator at the gauge-fixed position of `t_b` relative to `t_a`.  The
//! wedge is taken vertex by vertex: for each inner vertex `k` its Star edges
//! in label order, then the upper external edges of `End(k)` in label order.
//! The density is the determinant of the Jacobian of the resulting functions.
//!
//! Chart for `s ≥ 1`: `t₁ = (0,0,1)`, coordinates
//! `p₁ < … < p_m, q₁ < … < q_n, (x₂, y₂, λ₂), …, (x_s, y_s, λ_s)` in this
//! order and orientation.

use crate::error::GeometryError;
use crate::geometry::config::{chart_dim, Config, G3};
use crate::geometry::jet::{jacobian_det, Jet, MAX_VARS};
use crate::geometry::propagator::{cdf_jet, potentials, PropagatorParams};
use crate::graph::{AdmissibleGraph, Vertex};

/// Functions whose differentials wedge to `Ω_Γ`, in wedge order.
pub fn form_rows(g: &AdmissibleGraph, p: &[Jet], q: &[Jet], t: &[[Jet; 3]], prm: &PropagatorParams) -> Vec<Jet> {
    let mut rows = Vec::with_capacity(g.weighted_edge_count());
    let pos = |v: Vertex| match v {
        Vertex::Inner(k) => k - 1,
        _ => unreachable!("inner vertex expected"),
    };
    for k in 0..g.s {
        let tk = t[k];
        for &e in &g.star[k] {
            let edge = g.edges[e];
            match edge.dst {
                Vertex::Inner(_) => {
                    let tb = t[pos(edge.dst)];
                    let x = (tb[0] - tk[0]) / tk[2];
                    let y = (tb[1] - tk[1]) * tk[2];
                    let lam = tb[2] / tk[2];
                    let (u, v) = potentials(x, y, lam, prm);
                    rows.push(u);
                    rows.push(v);
                }
                Vertex::Lower(j) => rows.push(cdf_jet((p[j - 1] - tk[0]) / tk[2])),
                Vertex::Upper(_) => unreachable!("edges never end at upper vertices"),
            }
        }
        for &e in &g.end[k] {
            if let Vertex::Upper(j) = g.edges[e].src {
                rows.push(cdf_jet((q[j - 1] - tk[1]) * tk[2]));
            }
        }
    }
    rows
}

/// Chart coordinates of a configuration with `s ≥ 1`, after moving `t₁` to
/// `(0,0,1)`.
pub fn chart_coordinates(cfg: &Config) -> Vec<f64> {
    let g = G3::fixing(cfg.t[0]);
    let c = cfg.act(&g);
    let mut out: Vec<f64> = c.p.clone();
    out.extend(&c.q);
    for t in &c.t[1..] {
        out.extend(t);
    }
    out
}

/// Jets for the chart coordinates of a graph with `s ≥ 1`.
pub fn chart_jets(m: usize, n: usize, s: usize, coords: &[f64]) -> (Vec<Jet>, Vec<Jet>, Vec<[Jet; 3]>) {
    let p: Vec<Jet> = (0..m).map(|i| Jet::var(coords[i], i)).collect();
    let q: Vec<Jet> = (0..n).map(|j| Jet::var(coords[m + j], m + j)).collect();
    let mut t = vec![[Jet::constant(0.0), Jet::constant(0.0), Jet::constant(1.0)]];
    for k in 1..s {
        let base = m + n + 3 * (k - 1);
        t.push([Jet::var(coords[base], base), Jet::var(coords[base + 1], base + 1), Jet::var(coords[base + 2], base + 2)]);
    }
    (p, q, t)
}

/// Density of `Ω_Γ` at chart coordinates.  Zero unless the edge budget
/// equals the chart dimension.
pub fn omega_chart(g: &AdmissibleGraph, coords: &[f64], prm: &PropagatorParams) -> f64 {
    let dim = chart_dim(g.m, g.n, g.s);
    if g.weighted_edge_count() != dim {
        return 0.0;
    }
    if g.s == 0 {
        return 1.0;
    }
    assert!(dim <= MAX_VARS, "chart dimension {dim} exceeds {MAX_VARS}");
    let (p, q, t) = chart_jets(g.m, g.n, g.s, coords);
    let rows = form_rows(g, &p, &q, &t, prm);
    jacobian_det(&rows, dim)
}

/// `Ω_Γ` at a configuration, evaluated in the gauge chart.
pub fn omega_gamma(g: &AdmissibleGraph, cfg: &Config, prm: &PropagatorParams) -> Result<f64, GeometryError> {
    cfg.validate()?;
    if cfg.p.len() != g.m || cfg.q.len() != g.n || cfg.t.len() != g.s {
        return Err(GeometryError::MalformedSample(format!(
            "configuration ({},{};{}) for a ({},{};{}) graph",
            cfg.p.len(),
            cfg.q.len(),
            cfg.t.len(),
            g.m,
            g.n,
            g.s
        )));
    }
    if g.weighted_edge_count() != chart_dim(g.m, g.n, g.s) {
        return Ok(0.0);
    }
    if g.s == 0 {
        return Ok(1.0);
    }
    Ok(omega_chart(g, &chart_coordinates(cfg), prm))
}
