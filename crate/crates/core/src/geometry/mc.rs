//! Monte-Carlo weights `∫_{K(m,n;s)} Ω_Γ` on the gauge chart.
//!
//! Chart points come from the graph-adapted [`Proposal`]; each sample
//! contributes `Ω_Γ / q`.  Samples are split into fixed blocks; block `b`
//! uses a ChaCha8 stream `b` seeded from `(seed, graph key)`, and block sums
//! are combined in block order, so estimates do not depend on the worker
//! count.  All `ε` of a schedule are evaluated on common samples.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::GeometryError;
use crate::geometry::config::chart_dim;
use crate::geometry::form::omega_chart;
use crate::geometry::propagator::PropagatorParams;
use crate::geometry::sampler::Proposal;
use crate::graph::AdmissibleGraph;

/// Monte-Carlo controls.
#[derive(Clone, Debug, PartialEq)]
pub struct McParams {
    pub samples: u64,
    pub seed: u64,
    pub block: u64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl McParams {
    pub fn new(samples: u64, seed: u64) -> Self {
        McParams { samples, seed, block: 1 << 14, workers: None }
    }
}

/// Estimate of one weight at one propagator representative.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    /// `ε` of the representative; `0` marks an extrapolated value.
    pub eps: f64,
    /// Samples whose density was not finite (counted as zero).
    pub nonfinite: u64,
}

/// Estimates at each `ε` of a schedule plus the linear extrapolation to
/// `ε = 0` from the two finest values, evaluated on common samples.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSeries {
    pub per_eps: Vec<WeightEstimate>,
    pub extrapolated: WeightEstimate,
}

/// FNV-1a, stable across platforms and releases.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn stream_seed(seed: u64, key: &str) -> u64 {
    let mut z = seed ^ fnv1a(key.as_bytes());
    // splitmix64 finalizer
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Default)]
struct BlockSums {
    sum: Vec<f64>,
    sumsq: Vec<f64>,
    nonfinite: Vec<u64>,
}

fn run_blocks<F>(nblocks: u64, workers: Option<usize>, f: F) -> Vec<BlockSums>
where
    F: Fn(u64) -> BlockSums + Sync + Send,
{
    let job = || (0..nblocks).into_par_iter().map(&f).collect::<Vec<_>>();
    match workers {
        Some(k) => rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build().expect("thread pool").install(job),
        None => job(),
    }
}

/// Literal chart integral of `Ω_Γ` at several representatives on common
/// samples.  Output slot `i` is the estimate for `prms[i]`; the extra last
/// slot, when `extrapolate` names two indices `(coarse, fine)`, is the
/// per-sample linear extrapolation to `ε = 0`.
fn integrate(
    g: &AdmissibleGraph,
    prms: &[PropagatorParams],
    mc: &McParams,
    extrapolate: Option<(usize, usize)>,
) -> Result<Vec<WeightEstimate>, GeometryError> {
    for prm in prms {
        prm.validate()?;
    }
    let dim = chart_dim(g.m, g.n, g.s);
    if g.weighted_edge_count() != dim {
        return Err(GeometryError::NotTopDegree { budget: g.weighted_edge_count(), dim });
    }
    let slots = prms.len() + usize::from(extrapolate.is_some());
    let exact = |v: f64, eps: f64| WeightEstimate { value: v, stderr: 0.0, samples: mc.samples, seed: mc.seed, eps, nonfinite: 0 };
    if g.s == 0 {
        // zero-dimensional chart: the empty wedge integrates to 1
        let mut out: Vec<WeightEstimate> = prms.iter().map(|p| exact(1.0, p.eps)).collect();
        if extrapolate.is_some() {
            out.push(exact(1.0, 0.0));
        }
        return Ok(out);
    }
    let (coef_c, coef_f) = match extrapolate {
        Some((c, f)) => {
            let (ec, ef) = (prms[c].eps, prms[f].eps);
            (-ef / (ec - ef), ec / (ec - ef))
        }
        None => (0.0, 0.0),
    };
    let eps: Vec<f64> = prms.iter().map(|p| p.eps).collect();
    let proposal = Proposal::new(g, &prms[0], &eps);
    let base = stream_seed(mc.seed, &g.canonical_key());
    let block = mc.block.max(1);
    let nblocks = mc.samples.div_ceil(block);
    let sums = run_blocks(nblocks, mc.workers, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(base);
        rng.set_stream(b);
        let count = block.min(mc.samples - b * block);
        let mut acc = BlockSums { sum: vec![0.0; slots], sumsq: vec![0.0; slots], nonfinite: vec![0; slots] };
        let mut coords = vec![0.0; dim];
        let mut vals = vec![0.0; slots];
        let mut pt = proposal.empty_point();
        for _ in 0..count {
            let q = proposal.draw(&mut rng, &mut pt);
            pt.coords(&mut coords);
            for (i, prm) in prms.iter().enumerate() {
                vals[i] = omega_chart(g, &coords, prm) / q;
            }
            if let Some((c, f)) = extrapolate {
                vals[prms.len()] = coef_c * vals[c] + coef_f * vals[f];
            }
            for (i, &v) in vals.iter().enumerate().take(slots) {
                if v.is_finite() {
                    acc.sum[i] += v;
                    acc.sumsq[i] += v * v;
                } else {
                    acc.nonfinite[i] += 1;
                }
            }
        }
        acc
    });
    let mut total = BlockSums { sum: vec![0.0; slots], sumsq: vec![0.0; slots], nonfinite: vec![0; slots] };
    for s in &sums {
        for i in 0..slots {
            total.sum[i] += s.sum[i];
            total.sumsq[i] += s.sumsq[i];
            total.nonfinite[i] += s.nonfinite[i];
        }
    }
    let n = mc.samples as f64;
    Ok((0..slots)
        .map(|i| {
            let mean = total.sum[i] / n;
            let var = ((total.sumsq[i] / n - mean * mean) * n / (n - 1.0).max(1.0)).max(0.0);
            WeightEstimate {
                value: mean,
                stderr: (var / n).sqrt(),
                samples: mc.samples,
                seed: mc.seed,
                eps: if i < prms.len() { prms[i].eps } else { 0.0 },
                nonfinite: total.nonfinite[i],
            }
        })
        .collect())
}

/// Literal chart integral of `Ω_Γ` with the labels of `g` as given.
pub fn weight_literal(g: &AdmissibleGraph, prm: &PropagatorParams, mc: &McParams) -> Result<WeightEstimate, GeometryError> {
    Ok(integrate(g, std::slice::from_ref(prm), mc, None)?.remove(0))
}

/// Literal integrals over an `ε` schedule (coarse to fine) with the
/// extrapolation from the two finest entries.
pub fn weight_series_literal(
    g: &AdmissibleGraph,
    base: &PropagatorParams,
    schedule: &[f64],
    mc: &McParams,
) -> Result<WeightSeries, GeometryError> {
    if schedule.len() < 2 {
        return Err(GeometryError::Params("an ε schedule needs at least two entries".into()));
    }
    let prms: Vec<PropagatorParams> = schedule.iter().map(|&eps| PropagatorParams { eps, ..base.clone() }).collect();
    let k = prms.len();
    let mut all = integrate(g, &prms, mc, Some((k - 2, k - 1)))?;
    let extrapolated = all.pop().unwrap();
    Ok(WeightSeries { per_eps: all, extrapolated })
}

/// The default `ε` schedule.
pub const EPS_SCHEDULE: [f64; 3] = [0.1, 0.05, 0.025];
