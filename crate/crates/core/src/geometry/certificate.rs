//! Numerical certificate of the propagator conditions and the Fubini
//! identity for weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GeometryError;
use crate::geometry::config::chart_dim;
use crate::geometry::form::form_rows;
use crate::geometry::jet::{jacobian_det, Jet};
use crate::geometry::mc::{weight_literal, McParams, WeightEstimate};
use crate::geometry::propagator::{propagator1, propagator2, EyePoint, PropagatorParams};
use crate::geometry::quad::composite;
use crate::graph::AdmissibleGraph;

/// `∫ φ` over the cut sphere of radius `r₀` around `(0,0,1)`, oriented as a
/// boundary component of the Eye (normal pointing to the centre).
/// Composite Gauss–Legendre in `(ψ, χ)` with
/// `(X, Y, Λ−1) = r₀ (cos ψ cos χ, sin ψ, cos ψ sin χ)`.
pub fn sphere_mass(prm: &PropagatorParams, panels: usize) -> Result<f64, GeometryError> {
    prm.validate()?;
    let r = prm.r0;
    let psi = composite(-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2, panels, 8);
    let chi = composite(-std::f64::consts::PI, std::f64::consts::PI, panels, 8);
    let mut total = 0.0;
    for &(a, wa) in &psi {
        let (sa, ca) = a.sin_cos();
        for &(b, wb) in &chi {
            let (sb, cb) = b.sin_cos();
            let n = [ca * cb, sa, ca * sb];
            let e = EyePoint { x: r * n[0], y: r * n[1], lambda: 1.0 + r * n[2] };
            let v = propagator2(e, prm)?;
            let flux = v[0] * n[0] + v[1] * n[1] + v[2] * n[2];
            total -= flux * r * r * ca * wa * wb;
        }
    }
    Ok(total)
}

/// Largest component of `φ` on the four faces at infinity in `x, y` and the
/// face `λ → ∞`, probed at distance `far` on a grid of finite coordinates.
pub fn face_restriction_max(prm: &PropagatorParams, far: f64) -> Result<f64, GeometryError> {
    prm.validate()?;
    let finite: Vec<f64> = (-8..=8).map(|k| k as f64 * 0.25).collect();
    let lams: Vec<f64> = [0.01, 0.1, 0.5, 0.9, 0.99, 1.5, 4.0].to_vec();
    let mut worst: f64 = 0.0;
    let mut probe = |x: f64, y: f64, l: f64| -> Result<(), GeometryError> {
        let v = propagator2(EyePoint { x, y, lambda: l }, prm)?;
        worst = worst.max(v.iter().fold(0.0, |a: f64, c| a.max(c.abs())));
        Ok(())
    };
    for &c in &finite {
        for &l in &lams {
            probe(far, c, l)?;
            probe(-far, c, l)?;
            probe(c, far, l)?;
            probe(c, -far, l)?;
        }
        for &d in &finite {
            probe(c, d, far)?;
        }
    }
    Ok(worst)
}

fn channel_points(prm: &PropagatorParams, count: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: f64 = rng.random_range(-1.2..1.2);
        let y: f64 = rng.random_range(-1.2 * prm.eps..1.2 * prm.eps);
        let l: f64 = rng.random_range(0.05..1.2);
        if (x * x + y * y + (l - 1.0) * (l - 1.0)).sqrt() >= 2.0 * prm.r0 {
            out.push([x, y, l]);
        }
    }
    out
}

/// Maximum of the discrete exterior derivative of `φ` at step `h`: the flux
/// of `φ` through the boundary of the cube of half-side `h` around each
/// point, divided by the cube's volume, with four 6-point Gauss–Legendre
/// panels per face direction.  Sampled at `count` random points of the
/// channel region away from the sphere.
pub fn closedness_residual(prm: &PropagatorParams, h: f64, count: usize, seed: u64) -> Result<f64, GeometryError> {
    prm.validate()?;
    let face = composite(-h, h, 4, 6);
    let mut worst: f64 = 0.0;
    for c in channel_points(prm, count, seed) {
        let mut flux = 0.0;
        for axis in 0..3 {
            let (a1, a2) = ((axis + 1) % 3, (axis + 2) % 3);
            for side in [-1.0, 1.0] {
                for &(u, wu) in &face {
                    for &(v, wv) in &face {
                        let mut pt = c;
                        pt[axis] += side * h;
                        pt[a1] += u;
                        pt[a2] += v;
                        let comp = propagator2(EyePoint { x: pt[0], y: pt[1], lambda: pt[2] }, prm)?;
                        flux += side * comp[axis] * wu * wv;
                    }
                }
            }
        }
        worst = worst.max((flux / (8.0 * h * h * h)).abs());
    }
    Ok(worst)
}

/// Maximum of `|d φ|` from second-order central differences of the
/// components; a diagnostic whose truncation error grows like `(εs)^{−4}`
/// inside the channel.
pub fn central_difference_residual(prm: &PropagatorParams, h: f64, count: usize, seed: u64) -> Result<f64, GeometryError> {
    prm.validate()?;
    let comp = |x: f64, y: f64, l: f64, i: usize| -> Result<f64, GeometryError> { Ok(propagator2(EyePoint { x, y, lambda: l }, prm)?[i]) };
    let mut worst: f64 = 0.0;
    for [x, y, l] in channel_points(prm, count, seed) {
        let dx = (comp(x + h, y, l, 0)? - comp(x - h, y, l, 0)?) / (2.0 * h);
        let dy = (comp(x, y + h, l, 1)? - comp(x, y - h, l, 1)?) / (2.0 * h);
        let dl = (comp(x, y, l + h, 2)? - comp(x, y, l - h, 2)?) / (2.0 * h);
        worst = worst.max((dx + dy + dl).abs());
    }
    Ok(worst)
}

/// Largest deviation of the `y`-integral of `φ|_{P_λ}` from `f(x)`, relative
/// to `max f`, on a grid of `x`.
pub fn channel_profile_error(prm: &PropagatorParams, lambda: f64) -> Result<f64, GeometryError> {
    prm.validate()?;
    let fmax = propagator1(0.0);
    let ys = composite(-2.0 * prm.eps, 2.0 * prm.eps, 64, 8);
    let mut worst: f64 = 0.0;
    for k in -40..=40 {
        let x = k as f64 * 0.03;
        let mut int = 0.0;
        for &(y, w) in &ys {
            int += w * propagator2(EyePoint { x, y, lambda }, prm)?[2];
        }
        worst = worst.max((int - propagator1(x)).abs() / fmax);
    }
    Ok(worst)
}

/// The propagator certificate at one representative.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub eps: f64,
    pub sphere_mass: f64,
    pub face_max: f64,
    pub closedness: f64,
    pub channel_error: f64,
}

impl Certificate {
    /// Tolerances: mass `1 ± 1e−3`, faces `≤ 1e−6`, closedness `≤ 1e−4`,
    /// channel profile within 2%.
    pub fn passed(&self) -> bool {
        (self.sphere_mass - 1.0).abs() <= 1e-3 && self.face_max <= 1e-6 && self.closedness <= 1e-4 && self.channel_error <= 0.02
    }
}

/// Runs every check at each `ε` of the schedule.
pub fn certify(base: &PropagatorParams, schedule: &[f64], seed: u64) -> Result<Vec<Certificate>, GeometryError> {
    schedule
        .iter()
        .map(|&eps| {
            let prm = PropagatorParams { eps, ..base.clone() };
            Ok(Certificate {
                eps,
                sphere_mass: sphere_mass(&prm, 200)?,
                face_max: face_restriction_max(&prm, 1e3)?,
                closedness: closedness_residual(&prm, 1e-3, 2000, seed)?,
                channel_error: channel_profile_error(&prm, 0.01 * prm.lambda0)?,
            })
        })
        .collect()
}

/// Direct chart integral and fiber-then-base integral of a `(2,2;s)` graph.
#[derive(Clone, Debug)]
pub struct FubiniCheck {
    pub direct: WeightEstimate,
    pub iterated: f64,
    pub iterated_stderr: f64,
}

impl FubiniCheck {
    pub fn agrees(&self) -> bool {
        let sigma = (self.direct.stderr.powi(2) + self.iterated_stderr.powi(2)).sqrt();
        (self.direct.value - self.iterated).abs() <= 3.0 * sigma.max(1e-12)
    }
}

/// Integrates `Ω_Γ` for a graph on `K(2,2;s)` twice: on the `t₁`-gauge chart,
/// and in the boundary gauge `p = (0,1)`, `q = (0,c)` as an integral over the
/// fibre `(t₁, …, t_s)` for each base point `c` of `K(2,2)`, then over `c`.
/// The boundary chart is ordered fibre first, which matches the orientation
/// of the `t₁`-gauge chart.
pub fn fubini_check(
    g: &AdmissibleGraph,
    prm: &PropagatorParams,
    direct_mc: &McParams,
    fiber_samples: u64,
) -> Result<FubiniCheck, GeometryError> {
    if (g.m, g.n) != (2, 2) || g.s == 0 {
        return Err(GeometryError::MalformedSample("Fubini check needs a (2,2;s) graph with s ≥ 1".into()));
    }
    let dim = chart_dim(2, 2, g.s);
    if g.weighted_edge_count() != dim {
        return Err(GeometryError::NotTopDegree { budget: g.weighted_edge_count(), dim });
    }
    let direct = weight_literal(g, prm, direct_mc)?;
    let fdim = 3 * g.s;
    let base_nodes = composite(-6.0, 6.0, 6, 8);
    let mut total = 0.0;
    let mut var = 0.0;
    for (node, &(z, wz)) in base_nodes.iter().enumerate() {
        let c = z.exp();
        let mut rng = ChaCha8Rng::seed_from_u64(direct_mc.seed ^ 0x9e37_79b9_7f4a_7c15);
        rng.set_stream(node as u64);
        let (mut sum, mut sumsq) = (0.0, 0.0);
        for _ in 0..fiber_samples {
            let mut t = Vec::with_capacity(g.s);
            let mut jac = 1.0;
            for k in 0..g.s {
                let mut tk = [Jet::constant(0.0); 3];
                for (i, slot) in tk.iter_mut().enumerate() {
                    let u: f64 = rng.random_range(f64::EPSILON..1.0 - f64::EPSILON);
                    let zz = (u / (1.0 - u)).ln();
                    let dz = 1.0 / (u * (1.0 - u));
                    let v = if i == 2 { zz.exp() } else { zz };
                    jac *= if i == 2 { dz * v } else { dz };
                    *slot = Jet::var(v, 3 * k + i);
                }
                t.push(tk);
            }
            let p = [Jet::constant(0.0), Jet::constant(1.0)];
            let q = [Jet::constant(0.0), Jet::var(c, fdim)];
            let rows = form_rows(g, &p, &q, &t, prm);
            let v = jacobian_det(&rows, dim) * jac;
            sum += v;
            sumsq += v * v;
        }
        let n = fiber_samples as f64;
        let mean = sum / n;
        let fvar = ((sumsq / n - mean * mean) * n / (n - 1.0)).max(0.0) / n;
        // dc = c dz
        total += wz * c * mean;
        var += (wz * c).powi(2) * fvar;
    }
    Ok(FubiniCheck { direct, iterated: total, iterated_stderr: var.sqrt() })
}
