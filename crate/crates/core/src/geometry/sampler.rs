//! Graph-adapted proposal for chart samples.
//!
//! Each factor of `Ω_Γ` is a bump of width `λ_k` (lower edge), `1/λ_k`
//! (upper edge) or `ε s` (channel of an inner edge) in its own relative
//! coordinate, so uniform-scale sampling of the chart has heavy tails.  The
//! proposal samples points in a fixed plan derived from the graph:
//!
//! 1. inner vertices reachable from `t₁` through inner edges, each in the
//!    Eye coordinates of an edge to its parent: `ln Λ` standard logistic,
//!    `X/σ` logistic of scale 1/2 and `Y/σ` a logistic mixture over scales
//!    1/2 and `ε/2` for every `ε` of the schedule, where `σ = s(Λ)` is the
//!    channel scale below `Λ = 1` and 1 above, so the proposal follows the
//!    channel into its pinch at `(0,0,1)`;
//! 2. boundary points next to sampled inner vertices, from an equal mixture
//!    of `p = x_k + λ_k u` (resp. `q = y_k + u/λ_k`) over those neighbours;
//! 3. remaining inner vertices next to sampled boundary points, then back to
//!    step 1 from them; anything left is drawn from the baseline.
//!
//! The baseline draws every coordinate standard logistic and `ln λ` standard
//! logistic.  Samples come from the defensive mixture `(1−η)·adapted +
//! η·baseline`; boundary points are then sorted, so the density of a sorted
//! sample is the sum of the mixture density over the `m! n!` orderings.

use rand::RngCore;
use rand_chacha::ChaCha8Rng;

use crate::geometry::jet::Jet;
use crate::geometry::propagator::PropagatorParams;
use crate::graph::{permutations, AdmissibleGraph, Vertex};

const ETA: f64 = 0.2;

fn open_uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn logistic(rng: &mut ChaCha8Rng, scale: f64) -> f64 {
    let u = open_uniform(rng);
    scale * (u / (1.0 - u)).ln()
}

fn logistic_pdf(x: f64, scale: f64) -> f64 {
    let a = (-(x / scale).abs()).exp();
    a / (scale * (1.0 + a) * (1.0 + a))
}

fn scale_pdf(lam: f64) -> f64 {
    logistic_pdf(lam.ln(), 1.0) / lam
}

#[derive(Clone, Debug)]
enum Step {
    /// `t_k` from `t_parent` through the Eye coordinates of their edge.
    Eye {
        k: usize,
        parent: usize,
        k_is_src: bool,
    },
    /// `t_k` from a sampled lower and/or upper neighbour.
    FromBoundary {
        k: usize,
        lower: Option<usize>,
        upper: Option<usize>,
    },
    InnerFree {
        k: usize,
    },
    Lower {
        j: usize,
        from: Vec<usize>,
    },
    Upper {
        j: usize,
        from: Vec<usize>,
    },
    LowerFree {
        j: usize,
    },
    UpperFree {
        j: usize,
    },
}

/// Configuration in chart form: `t[0] = (0,0,1)`.
#[derive(Clone, Debug)]
pub struct ChartPoint {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub t: Vec<[f64; 3]>,
}

impl ChartPoint {
    /// `p…, q…, t₂…` as in the gauge chart.
    pub fn coords(&self, out: &mut [f64]) {
        let (m, n) = (self.p.len(), self.q.len());
        out[..m].copy_from_slice(&self.p);
        out[m..m + n].copy_from_slice(&self.q);
        for (k, t) in self.t.iter().enumerate().skip(1) {
            out[m + n + 3 * (k - 1)..m + n + 3 * k].copy_from_slice(t);
        }
    }
}

/// Sampling plan for one graph.
#[derive(Clone, Debug)]
pub struct Proposal {
    m: usize,
    n: usize,
    s: usize,
    steps: Vec<Step>,
    y_scales: Vec<f64>,
    prm: PropagatorParams,
    orderings: Vec<(Vec<usize>, Vec<usize>)>,
}

impl Proposal {
    /// Plan for `g` (`s ≥ 1`) with the channel shape of `prm` and widths
    /// from `eps`.
    pub fn new(g: &AdmissibleGraph, prm: &PropagatorParams, eps: &[f64]) -> Self {
        assert!(g.s >= 1, "the proposal needs an inner vertex");
        let (m, n, s) = (g.m, g.n, g.s);
        let mut inner_done = vec![false; s];
        let mut lower_done = vec![false; m];
        let mut upper_done = vec![false; n];
        inner_done[0] = true;
        let mut steps = Vec::new();
        let mut frontier = vec![0usize];
        loop {
            // 1. inner-edge search from the frontier
            while let Some(i) = frontier.pop() {
                for e in &g.edges {
                    let (a, b) = match (e.src, e.dst) {
                        (Vertex::Inner(a), Vertex::Inner(b)) => (a - 1, b - 1),
                        _ => continue,
                    };
                    let (k, k_is_src) = if a == i && !inner_done[b] {
                        (b, false)
                    } else if b == i && !inner_done[a] {
                        (a, true)
                    } else {
                        continue;
                    };
                    inner_done[k] = true;
                    steps.push(Step::Eye { k, parent: i, k_is_src });
                    frontier.push(k);
                }
            }
            // 2. boundary points next to sampled inner vertices
            for (j, done) in lower_done.iter_mut().enumerate() {
                if *done {
                    continue;
                }
                let from: Vec<usize> = g
                    .edges
                    .iter()
                    .filter_map(|e| match (e.src, e.dst) {
                        (Vertex::Inner(k), Vertex::Lower(l)) if l == j + 1 && inner_done[k - 1] => Some(k - 1),
                        _ => None,
                    })
                    .collect();
                if !from.is_empty() {
                    *done = true;
                    steps.push(Step::Lower { j, from });
                }
            }
            for (j, done) in upper_done.iter_mut().enumerate() {
                if *done {
                    continue;
                }
                let from: Vec<usize> = g
                    .edges
                    .iter()
                    .filter_map(|e| match (e.src, e.dst) {
                        (Vertex::Upper(l), Vertex::Inner(k)) if l == j + 1 && inner_done[k - 1] => Some(k - 1),
                        _ => None,
                    })
                    .collect();
                if !from.is_empty() {
                    *done = true;
                    steps.push(Step::Upper { j, from });
                }
            }
            // 3. one remaining inner vertex, from boundary neighbours or free
            let Some(k) = (0..s).find(|&k| !inner_done[k]) else { break };
            let next = (0..s).filter(|&k| !inner_done[k]).find_map(|k| {
                let lower = g.edges.iter().find_map(|e| match (e.src, e.dst) {
                    (Vertex::Inner(a), Vertex::Lower(l)) if a == k + 1 && lower_done[l - 1] => Some(l - 1),
                    _ => None,
                });
                let upper = g.edges.iter().find_map(|e| match (e.src, e.dst) {
                    (Vertex::Upper(l), Vertex::Inner(a)) if a == k + 1 && upper_done[l - 1] => Some(l - 1),
                    _ => None,
                });
                (lower.is_some() || upper.is_some()).then_some((k, lower, upper))
            });
            match next {
                Some((k, lower, upper)) => {
                    inner_done[k] = true;
                    steps.push(Step::FromBoundary { k, lower, upper });
                    frontier.push(k);
                }
                None => {
                    inner_done[k] = true;
                    steps.push(Step::InnerFree { k });
                    frontier.push(k);
                }
            }
        }
        for (j, done) in lower_done.iter().enumerate() {
            if !done {
                steps.push(Step::LowerFree { j });
            }
        }
        for (j, done) in upper_done.iter().enumerate() {
            if !done {
                steps.push(Step::UpperFree { j });
            }
        }
        let mut y_scales = vec![0.5];
        y_scales.extend(eps.iter().map(|e| 0.5 * e));
        let mut orderings = Vec::new();
        for pp in permutations(m) {
            for qq in permutations(n) {
                orderings.push((pp.clone(), qq));
            }
        }
        Proposal { m, n, s, steps, y_scales, prm: prm.clone(), orderings }
    }

    fn sigma(&self, lam: f64) -> f64 {
        if lam < 1.0 {
            self.prm.scale(Jet::constant(lam)).v
        } else {
            1.0
        }
    }

    fn y_pdf(&self, y: f64) -> f64 {
        self.y_scales.iter().map(|&c| logistic_pdf(y, c)).sum::<f64>() / self.y_scales.len() as f64
    }

    fn sample_y(&self, rng: &mut ChaCha8Rng) -> f64 {
        let i = (open_uniform(rng) * self.y_scales.len() as f64) as usize;
        logistic(rng, self.y_scales[i.min(self.y_scales.len() - 1)])
    }

    fn baseline(&self, rng: &mut ChaCha8Rng, pt: &mut ChartPoint) {
        for x in pt.p.iter_mut().chain(pt.q.iter_mut()) {
            *x = logistic(rng, 1.0);
        }
        for t in pt.t.iter_mut().skip(1) {
            *t = [logistic(rng, 1.0), logistic(rng, 1.0), logistic(rng, 1.0).exp()];
        }
    }

    fn baseline_pdf(&self, pt: &ChartPoint) -> f64 {
        let mut d: f64 = pt.p.iter().chain(&pt.q).map(|&x| logistic_pdf(x, 1.0)).product();
        for t in pt.t.iter().skip(1) {
            d *= logistic_pdf(t[0], 1.0) * logistic_pdf(t[1], 1.0) * scale_pdf(t[2]);
        }
        d
    }

    fn adapted(&self, rng: &mut ChaCha8Rng, pt: &mut ChartPoint) {
        for step in &self.steps {
            match step {
                Step::Eye { k, parent, k_is_src } => {
                    let lam = logistic(rng, 1.0).exp();
                    let sg = self.sigma(lam);
                    let (x, y) = (sg * logistic(rng, 0.5), sg * self.sample_y(rng));
                    let ti = pt.t[*parent];
                    pt.t[*k] = if *k_is_src {
                        let lk = ti[2] / lam;
                        [ti[0] - x * lk, ti[1] - y / lk, lk]
                    } else {
                        [ti[0] + x * ti[2], ti[1] + y / ti[2], lam * ti[2]]
                    };
                }
                Step::FromBoundary { k, lower, upper } => {
                    let lk = logistic(rng, 1.0).exp();
                    let x = match lower {
                        Some(j) => pt.p[*j] - lk * logistic(rng, 0.5),
                        None => logistic(rng, 1.0),
                    };
                    let y = match upper {
                        Some(j) => pt.q[*j] - logistic(rng, 0.5) / lk,
                        None => logistic(rng, 1.0),
                    };
                    pt.t[*k] = [x, y, lk];
                }
                Step::InnerFree { k } => pt.t[*k] = [logistic(rng, 1.0), logistic(rng, 1.0), logistic(rng, 1.0).exp()],
                Step::Lower { j, from } => {
                    let i = (open_uniform(rng) * from.len() as f64) as usize;
                    let tk = pt.t[from[i.min(from.len() - 1)]];
                    pt.p[*j] = tk[0] + tk[2] * logistic(rng, 0.5);
                }
                Step::Upper { j, from } => {
                    let i = (open_uniform(rng) * from.len() as f64) as usize;
                    let tk = pt.t[from[i.min(from.len() - 1)]];
                    pt.q[*j] = tk[1] + logistic(rng, 0.5) / tk[2];
                }
                Step::LowerFree { j } => pt.p[*j] = logistic(rng, 1.0),
                Step::UpperFree { j } => pt.q[*j] = logistic(rng, 1.0),
            }
        }
    }

    fn adapted_pdf(&self, pt: &ChartPoint) -> f64 {
        let mut d = 1.0;
        for step in &self.steps {
            d *= match step {
                Step::Eye { k, parent, k_is_src } => {
                    let (ti, tk) = (pt.t[*parent], pt.t[*k]);
                    let (x, y, lam, jac) = if *k_is_src {
                        ((ti[0] - tk[0]) / tk[2], (ti[1] - tk[1]) * tk[2], ti[2] / tk[2], ti[2] / (tk[2] * tk[2]))
                    } else {
                        ((tk[0] - ti[0]) / ti[2], (tk[1] - ti[1]) * ti[2], tk[2] / ti[2], 1.0 / ti[2])
                    };
                    let sg = self.sigma(lam);
                    logistic_pdf(x / sg, 0.5) * self.y_pdf(y / sg) / (sg * sg) * scale_pdf(lam) * jac
                }
                Step::FromBoundary { k, lower, upper } => {
                    let tk = pt.t[*k];
                    let px = match lower {
                        Some(j) => logistic_pdf((pt.p[*j] - tk[0]) / tk[2], 0.5) / tk[2],
                        None => logistic_pdf(tk[0], 1.0),
                    };
                    let py = match upper {
                        Some(j) => logistic_pdf((pt.q[*j] - tk[1]) * tk[2], 0.5) * tk[2],
                        None => logistic_pdf(tk[1], 1.0),
                    };
                    px * py * scale_pdf(tk[2])
                }
                Step::InnerFree { k } => {
                    let tk = pt.t[*k];
                    logistic_pdf(tk[0], 1.0) * logistic_pdf(tk[1], 1.0) * scale_pdf(tk[2])
                }
                Step::Lower { j, from } => {
                    from.iter().map(|&k| logistic_pdf((pt.p[*j] - pt.t[k][0]) / pt.t[k][2], 0.5) / pt.t[k][2]).sum::<f64>()
                        / from.len() as f64
                }
                Step::Upper { j, from } => {
                    from.iter().map(|&k| logistic_pdf((pt.q[*j] - pt.t[k][1]) * pt.t[k][2], 0.5) * pt.t[k][2]).sum::<f64>()
                        / from.len() as f64
                }
                Step::LowerFree { j } => logistic_pdf(pt.p[*j], 1.0),
                Step::UpperFree { j } => logistic_pdf(pt.q[*j], 1.0),
            };
            if d == 0.0 {
                break;
            }
        }
        d
    }

    fn mixture_pdf(&self, pt: &ChartPoint) -> f64 {
        (1.0 - ETA) * self.adapted_pdf(pt) + ETA * self.baseline_pdf(pt)
    }

    pub fn empty_point(&self) -> ChartPoint {
        let mut t = vec![[0.0, 0.0, 1.0]; self.s];
        t[0] = [0.0, 0.0, 1.0];
        ChartPoint { p: vec![0.0; self.m], q: vec![0.0; self.n], t }
    }

    /// Draws a chart point with sorted boundary points and returns the
    /// density of the proposal at it.
    pub fn draw(&self, rng: &mut ChaCha8Rng, pt: &mut ChartPoint) -> f64 {
        if open_uniform(rng) < ETA {
            self.baseline(rng, pt);
        } else {
            self.adapted(rng, pt);
        }
        pt.p.sort_by(f64::total_cmp);
        pt.q.sort_by(f64::total_cmp);
        self.sorted_pdf(pt)
    }

    /// Density of a sorted sample: the mixture density summed over orderings.
    pub fn sorted_pdf(&self, pt: &ChartPoint) -> f64 {
        let mut perm = pt.clone();
        let mut total = 0.0;
        for (pp, qq) in &self.orderings {
            for (i, &j) in pp.iter().enumerate() {
                perm.p[i] = pt.p[j];
            }
            for (i, &j) in qq.iter().enumerate() {
                perm.q[i] = pt.q[j];
            }
            total += self.mixture_pdf(&perm);
        }
        total
    }
}
