//! Configurations in `K(m,n;s)`, the group `G³`, gauge fixing, 4-point
//! ratios and boundary-stratum classification.

use crate::error::GeometryError;
use crate::geometry::propagator::EyePoint;

/// Points `p` on the lower line, `q` on the upper line and interior points
/// `t = (x, y, λ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub t: Vec<[f64; 3]>,
}

impl Config {
    pub fn new(p: Vec<f64>, q: Vec<f64>, t: Vec<[f64; 3]>) -> Config {
        Config { p, q, t }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&self.p) || !increasing(&self.q) {
            return Err(GeometryError::MalformedSample("boundary points must be strictly increasing".into()));
        }
        if let Some(t) = self.t.iter().find(|t| t[2] <= 0.0) {
            return Err(GeometryError::NonPositiveScale(t[2]));
        }
        for i in 0..self.t.len() {
            for j in i + 1..self.t.len() {
                if self.t[i] == self.t[j] {
                    return Err(GeometryError::Coincident);
                }
            }
        }
        if self.p.len() + self.q.len() + 3 * self.t.len() < 3 {
            return Err(GeometryError::MalformedSample("m + n + 3s < 3".into()));
        }
        Ok(())
    }

    /// Image under `g`.
    pub fn act(&self, g: &G3) -> Config {
        Config {
            p: self.p.iter().map(|&p| g.lambda * p + g.a).collect(),
            q: self.q.iter().map(|&q| q / g.lambda + g.b).collect(),
            t: self.t.iter().map(|t| g.act_point(*t)).collect(),
        }
    }
}

/// Element `(a, b, λ)` of `G³`: `x ↦ λx + a`, `y ↦ y/λ + b`, scale `↦ λ·scale`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct G3 {
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
}

impl G3 {
    pub fn identity() -> G3 {
        G3 { a: 0.0, b: 0.0, lambda: 1.0 }
    }

    /// `self ∘ other`: `(a′,b′,λ′)∘(a,b,λ) = (λ′a + a′, b/λ′ + b′, λλ′)`.
    pub fn compose(&self, other: &G3) -> G3 {
        G3 { a: self.lambda * other.a + self.a, b: other.b / self.lambda + self.b, lambda: self.lambda * other.lambda }
    }

    pub fn inverse(&self) -> G3 {
        G3 { a: -self.a / self.lambda, b: -self.b * self.lambda, lambda: 1.0 / self.lambda }
    }

    pub fn act_point(&self, t: [f64; 3]) -> [f64; 3] {
        [self.lambda * t[0] + self.a, t[1] / self.lambda + self.b, self.lambda * t[2]]
    }

    /// The element sending `t` to `(0, 0, 1)`.
    pub fn fixing(t: [f64; 3]) -> G3 {
        G3 { a: -t[0] / t[2], b: -t[1] * t[2], lambda: 1.0 / t[2] }
    }
}

/// Position of `dst` after the gauge transformation that moves `src` to
/// `(0,0,1)`: `((x_d − x_s)/λ_s, (y_d − y_s)λ_s, λ_d/λ_s)`.
pub fn gauge_fix_pair(src: [f64; 3], dst: [f64; 3]) -> Result<EyePoint, GeometryError> {
    if src[2] <= 0.0 {
        return Err(GeometryError::NonPositiveScale(src[2]));
    }
    if dst[2] <= 0.0 {
        return Err(GeometryError::NonPositiveScale(dst[2]));
    }
    if src == dst {
        return Err(GeometryError::Coincident);
    }
    Ok(EyePoint { x: (dst[0] - src[0]) / src[2], y: (dst[1] - src[1]) * src[2], lambda: dst[2] / src[2] })
}

/// Four boundary points: indices into `p` and into `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub p: Vec<usize>,
    pub q: Vec<usize>,
}

/// Invariant coordinate of a 4-point sample: the gap product
/// `(p₂ − p₁)(q₂ − q₁)` for `(2,2)`, and for `(1,3)` / `(3,1)` the ratio of
/// consecutive gaps `(z₃ − z₂)/(z₂ − z₁)` of the three points on one line.
pub fn four_point_ratio(cfg: &Config, sample: &Sample) -> Result<f64, GeometryError> {
    let pick = |idx: &[usize], pts: &[f64]| -> Result<Vec<f64>, GeometryError> {
        let mut v = Vec::with_capacity(idx.len());
        for &i in idx {
            v.push(*pts.get(i).ok_or_else(|| GeometryError::MalformedSample(format!("index {i} out of range")))?);
        }
        if !v.windows(2).all(|w| w[0] < w[1]) {
            return Err(GeometryError::MalformedSample("sample points must be increasing".into()));
        }
        Ok(v)
    };
    let p = pick(&sample.p, &cfg.p)?;
    let q = pick(&sample.q, &cfg.q)?;
    let gap_ratio = |z: &[f64]| (z[2] - z[1]) / (z[1] - z[0]);
    match (p.len(), q.len()) {
        (2, 2) => Ok((p[1] - p[0]) * (q[1] - q[0])),
        (1, 3) => Ok(gap_ratio(&q)),
        (3, 1) => Ok(gap_ratio(&p)),
        (a, b) => Err(GeometryError::MalformedSample(format!("({a},{b}) is not a 4-point sample"))),
    }
}

/// Boundary stratum of a configuration near the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stratum {
    Interior,
    /// Interior points colliding at finite `λ`.
    S11,
    /// Interior points running off with exactly one of `x, y` unbounded.
    S12,
    /// A degeneration visible on `K(m,n)`: boundary points colliding or
    /// separating, or interior points reaching the boundary lines.
    S2,
}

/// Thresholds: distances below `close` count as collisions, magnitudes above
/// `far` as escapes to infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    pub close: f64,
    pub far: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { close: 1e-6, far: 1e6 }
    }
}

/// Classifies by which pair or 4-point ratios degenerate.  Several
/// simultaneous degenerations (codimension ≥ 2) are reported as ambiguous.
pub fn stratum_classify(cfg: &Config, th: &Thresholds) -> Result<Stratum, GeometryError> {
    cfg.validate()?;
    let mut found: Vec<(Stratum, String)> = Vec::new();
    let mut corners: Vec<String> = Vec::new();
    // S1.1: a pair of interior points with gauge-fixed offset near (0,0,1)
    for i in 0..cfg.t.len() {
        for j in i + 1..cfg.t.len() {
            let e = gauge_fix_pair(cfg.t[i], cfg.t[j])?;
            let dist = e.x.abs().max(e.y.abs()).max((e.lambda - 1.0).abs());
            if dist < th.close {
                found.push((Stratum::S11, format!("t{} and t{} collide", i + 1, j + 1)));
            }
        }
    }
    // relative to the other points, an interior point escaping in x or y
    let finite_x: Vec<f64> = cfg.p.iter().copied().chain(cfg.t.iter().map(|t| t[0])).collect();
    let finite_y: Vec<f64> = cfg.q.iter().copied().chain(cfg.t.iter().map(|t| t[1])).collect();
    for (k, t) in cfg.t.iter().enumerate() {
        if t[2] < th.close || t[2] > th.far {
            found.push((Stratum::S2, format!("t{} reaches a boundary line", k + 1)));
            continue;
        }
        let spread = |vals: &[f64], own: f64| vals.iter().map(|v| (v - own).abs()).fold(f64::INFINITY, f64::min);
        let others_x: Vec<f64> = finite_x.iter().copied().filter(|&v| v != t[0]).collect();
        let others_y: Vec<f64> = finite_y.iter().copied().filter(|&v| v != t[1]).collect();
        let far_x = !others_x.is_empty() && spread(&others_x, t[0]) > th.far;
        let far_y = !others_y.is_empty() && spread(&others_y, t[1]) > th.far;
        match (far_x, far_y) {
            (true, true) => corners.push(format!("t{} escapes in both x and y", k + 1)),
            (true, false) | (false, true) => found.push((Stratum::S12, format!("t{} escapes in one coordinate", k + 1))),
            (false, false) => {}
        }
    }
    // boundary collisions on either line
    for (name, pts) in [("p", &cfg.p), ("q", &cfg.q)] {
        for w in pts.windows(2) {
            if w[1] - w[0] < th.close {
                found.push((Stratum::S2, format!("{name}-points collide")));
            }
        }
    }
    if found.len() == 1 && corners.is_empty() {
        return Ok(found[0].0);
    }
    if found.is_empty() && corners.is_empty() {
        return Ok(Stratum::Interior);
    }
    let detail: Vec<String> = found.into_iter().map(|(_, d)| d).chain(corners).collect();
    Err(GeometryError::MalformedSample(format!("ambiguous: {}", detail.join("; "))))
}

/// `dim K(m,n;s) = m + n + 3s − 3` (and `m + n − 3` for `s = 0`).
pub fn chart_dim(m: usize, n: usize, s: usize) -> usize {
    (m + n + 3 * s).saturating_sub(3)
}

/// Dimension of the quotient by `G³` at `cfg`: the number of coordinates minus
/// the numerical rank of the infinitesimal action.
pub fn orbit_quotient_dim(cfg: &Config) -> usize {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    // generators: shift a, shift b, log-dilatation
    let mut da = Vec::new();
    let mut db = Vec::new();
    let mut dl = Vec::new();
    for &p in &cfg.p {
        da.push(1.0);
        db.push(0.0);
        dl.push(p);
    }
    for &q in &cfg.q {
        da.push(0.0);
        db.push(1.0);
        dl.push(-q);
    }
    for t in &cfg.t {
        da.extend([1.0, 0.0, 0.0]);
        db.extend([0.0, 1.0, 0.0]);
        dl.extend([t[0], -t[1], t[2]]);
    }
    rows.push(da);
    rows.push(db);
    rows.push(dl);
    let total = rows[0].len();
    total - numeric_rank(rows, 1e-10)
}

fn numeric_rank(mut a: Vec<Vec<f64>>, tol: f64) -> usize {
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())) else { break };
        if a[p][c].abs() <= tol {
            continue;
        }
        a.swap(rank, p);
        let pivot = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            let f = row[c] / pivot[c];
            for k in c..cols {
                row[k] -= f * pivot[k];
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauge_fix_examples() {
        let e = gauge_fix_pair([0.0, 0.0, 1.0], [1.0, 2.0, 3.0]).unwrap();
        assert_eq!((e.x, e.y, e.lambda), (1.0, 2.0, 3.0));
        let e = gauge_fix_pair([0.0, 0.0, 2.0], [0.0, 0.0, 4.0]).unwrap();
        assert_eq!((e.x, e.y, e.lambda), (0.0, 0.0, 2.0));
        assert!(gauge_fix_pair([1.0, 1.0, 1.0], [1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn fixing_moves_to_base_point() {
        let t = [0.3, -1.2, 2.5];
        let g = G3::fixing(t);
        let z = g.act_point(t);
        assert!(z[0].abs() < 1e-15 && z[1].abs() < 1e-15 && (z[2] - 1.0).abs() < 1e-15);
        let h = g.compose(&g.inverse());
        assert!((h.a).abs() < 1e-15 && (h.b).abs() < 1e-15 && (h.lambda - 1.0).abs() < 1e-15);
    }
}
