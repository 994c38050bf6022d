//! The bump `f`, its distribution function, and the regularized propagator
//! 2-form on the 3-dimensional Eye.
//!
//! With `t₁` gauge-fixed to `(0,0,1)` the second point is `(X, Y, Λ)`.  The
//! propagator is `φ = dU ∧ dV` for the potentials
//! `U = F(X / s(Λ))`, `V = F(Y / (ε s(Λ)))` when `Λ < 1` and `U, V` locally
//! constant when `Λ ≥ 1`, where `F` is the distribution function of `f` and
//! `s` shrinks from 1 (for `Λ ≤ λ₀`) to 0 at `Λ = 1`.  `(U, V)` maps the Eye
//! onto the unit square, sending everything outside the pyramid
//! `{|X| < s, |Y| < ε s, Λ < 1}` to its boundary; `φ` is the pull-back of the
//! unit area form, so it is closed, has unit mass around `(0,0,1)`, vanishes
//! on the faces at infinity and restricts to `f(x) f_ε(y) dx∧dy` on every
//! `P_λ` with `λ ≤ λ₀`.

use crate::error::GeometryError;
use crate::geometry::jet::Jet;

/// Version tag of the frozen propagator representative.
pub const PROFILE_ID: &str = "biquant-prop-v1";

/// `f(x) = (315/256)(1 − x²)⁴` on `(−1, 1)`, zero outside.
pub fn propagator1(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        return 0.0;
    }
    let u = 1.0 - x * x;
    315.0 / 256.0 * u * u * u * u
}

/// `F(x) = ∫_{−1}^{x} f`.
pub fn propagator1_cdf(x: f64) -> f64 {
    if x <= -1.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let x2 = x * x;
    // ∫₀ˣ (1 − t²)⁴ dt
    let p = x * (1.0 + x2 * (-4.0 / 3.0 + x2 * (6.0 / 5.0 + x2 * (-4.0 / 7.0 + x2 / 9.0))));
    0.5 + 315.0 / 256.0 * p
}

/// `F` applied to a jet.
pub fn cdf_jet(x: Jet) -> Jet {
    x.chain(propagator1_cdf(x.v), propagator1(x.v))
}

/// Shape parameters of the propagator representative.
#[derive(Clone, Debug, PartialEq)]
pub struct PropagatorParams {
    /// Channel half-width in `y`.
    pub eps: f64,
    /// Radius of the cut sphere around `(0,0,1)`.
    pub r0: f64,
    /// Channel onset: below `λ₀` the section is exactly `f(x) f_ε(y)`.
    pub lambda0: f64,
    pub profile: String,
}

impl Default for PropagatorParams {
    fn default() -> Self {
        PropagatorParams { eps: 0.1, r0: 0.1, lambda0: 0.5, profile: PROFILE_ID.to_string() }
    }
}

impl PropagatorParams {
    pub fn with_eps(eps: f64) -> Self {
        PropagatorParams { eps, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.eps > 0.0 && self.eps < self.lambda0 && self.lambda0 < 1.0) {
            return Err(GeometryError::Params(format!("need 0 < ε < λ₀ < 1, got ε = {}, λ₀ = {}", self.eps, self.lambda0)));
        }
        if !(self.r0 > 0.0 && self.r0 < 1.0 - self.lambda0) {
            return Err(GeometryError::Params(format!("need 0 < r₀ < 1 − λ₀, got r₀ = {}", self.r0)));
        }
        if self.profile != PROFILE_ID {
            return Err(GeometryError::Params(format!("unknown profile {}", self.profile)));
        }
        Ok(())
    }

    /// Channel scale `s(Λ)`: 1 up to `λ₀`, then `1 − u³` with
    /// `u = (Λ − λ₀)/(1 − λ₀)`, reaching 0 at `Λ = 1`.
    pub fn scale(&self, lam: Jet) -> Jet {
        if lam.v <= self.lambda0 {
            return Jet::constant(1.0);
        }
        let u = (lam - self.lambda0) * (1.0 / (1.0 - self.lambda0));
        -(u.powi(3)) + 1.0
    }
}

/// Gauge-fixed position of the second point of a pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EyePoint {
    pub x: f64,
    pub y: f64,
    pub lambda: f64,
}

/// Potentials `(U, V)` at an Eye point given as jets.
pub fn potentials(x: Jet, y: Jet, lam: Jet, prm: &PropagatorParams) -> (Jet, Jet) {
    if lam.v >= 1.0 {
        let step = |z: f64| Jet::constant(if z > 0.0 { 1.0 } else { 0.0 });
        return (step(x.v), step(y.v));
    }
    let s = prm.scale(lam);
    (cdf_jet(x / s), cdf_jet(y / (s * prm.eps)))
}

/// Components `(A, B, C)` of `φ = A dy∧dλ + B dλ∧dx + C dx∧dy`, i.e. the
/// flux vector `∇U × ∇V`.
pub fn propagator2(e: EyePoint, prm: &PropagatorParams) -> Result<[f64; 3], GeometryError> {
    if e.lambda <= 0.0 {
        return Err(GeometryError::NonPositiveScale(e.lambda));
    }
    if e.x == 0.0 && e.y == 0.0 && e.lambda == 1.0 {
        return Err(GeometryError::Singular);
    }
    let (u, v) = potentials(Jet::var(e.x, 0), Jet::var(e.y, 1), Jet::var(e.lambda, 2), prm);
    let (gu, gv) = (u.d, v.d);
    Ok([gu[1] * gv[2] - gu[2] * gv[1], gu[2] * gv[0] - gu[0] * gv[2], gu[0] * gv[1] - gu[1] * gv[0]])
}
