//! Weights of labeled graphs from literal integrals of class representatives.
//!
//! `Ω_Γ` is a wedge of even 2-forms for inner edges, so reordering labels
//! of inner edges does not change its integral, while `Φ_Γ` changes sign.
//! Under [`WeightConvention::LabelSign`] the weight carries the label sign,
//! `w(Γ) = label_sign(Γ)·W(ref Γ)`, and graphs that differ by renaming inner
//! vertices share one literal integral `W` of a class representative, with
//! the graded sign that makes `Alt Φ_Γ · w(Γ)` independent of the naming.

use std::collections::BTreeMap;

use crate::error::GeometryError;
use crate::geometry::mc::{weight_literal, weight_series_literal, McParams, WeightEstimate, WeightSeries};
use crate::geometry::propagator::PropagatorParams;
use crate::graph::{permutations, AdmissibleGraph};
use crate::graph_ops::alt_sign;

/// How labels and vertex names enter a weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WeightConvention {
    /// Label sign times the representative's integral (default).
    #[default]
    LabelSign,
    /// The chart integral with the wedge order of the given labels.
    Literal,
}

/// Class representative of `g` under inner-vertex renaming, with the factor
/// `c` such that `w(g) = c·W(rep)`.
pub fn class_representative(g: &AdmissibleGraph) -> (AdmissibleGraph, i32) {
    let reference = g.reference_labeling();
    let mut best: Option<(String, AdmissibleGraph, Vec<usize>)> = None;
    for perm in permutations(g.s) {
        let cand = reference.relabel_inner(&perm).reference_labeling();
        let key = cand.canonical_key();
        if best.as_ref().is_none_or(|(k, _, _)| key < *k) {
            best = Some((key, cand, perm));
        }
    }
    let (_, rep, perm) = best.expect("at least the identity permutation");
    // reference = relabel(rep, σ) with σ inverse to perm
    let mut sigma = vec![0usize; perm.len()];
    for (j, &old) in perm.iter().enumerate() {
        sigma[old] = j;
    }
    let carried = rep.relabel_inner(&sigma);
    let sign = g.label_sign() * carried.label_sign() * alt_sign(&sigma, &rep.vertex_degrees());
    (rep, sign)
}

/// Literal integrals shared across labeled graphs.
#[derive(Default)]
pub struct WeightCache {
    literal: BTreeMap<String, WeightSeries>,
}

impl WeightCache {
    pub fn new() -> Self {
        WeightCache::default()
    }

    /// Weight series of `g` under `conv`.
    pub fn series(
        &mut self,
        g: &AdmissibleGraph,
        conv: WeightConvention,
        base: &PropagatorParams,
        schedule: &[f64],
        mc: &McParams,
    ) -> Result<WeightSeries, GeometryError> {
        let (target, sign) = match conv {
            WeightConvention::Literal => (g.clone(), 1),
            WeightConvention::LabelSign => class_representative(g),
        };
        let key = target.canonical_key();
        if !self.literal.contains_key(&key) {
            let s = weight_series_literal(&target, base, schedule, mc)?;
            self.literal.insert(key.clone(), s);
        }
        Ok(scale_series(&self.literal[&key], sign))
    }
}

fn scale_est(e: &WeightEstimate, sign: i32) -> WeightEstimate {
    WeightEstimate { value: e.value * sign as f64, ..e.clone() }
}

fn scale_series(s: &WeightSeries, sign: i32) -> WeightSeries {
    WeightSeries { per_eps: s.per_eps.iter().map(|e| scale_est(e, sign)).collect(), extrapolated: scale_est(&s.extrapolated, sign) }
}

/// Weight of `g` at one representative under `conv`.
pub fn weight(g: &AdmissibleGraph, conv: WeightConvention, prm: &PropagatorParams, mc: &McParams) -> Result<WeightEstimate, GeometryError> {
    match conv {
        WeightConvention::Literal => weight_literal(g, prm, mc),
        WeightConvention::LabelSign => {
            let (rep, sign) = class_representative(g);
            Ok(scale_est(&weight_literal(&rep, prm, mc)?, sign))
        }
    }
}
