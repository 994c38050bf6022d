//! Configuration spaces `K(m,n;s)`, the propagator, graph forms and weights.

pub mod certificate;
pub mod config;
pub mod form;
pub mod jet;
pub mod mc;
pub mod propagator;
pub mod quad;
pub mod sampler;
pub mod weights;

pub use config::{chart_dim, four_point_ratio, gauge_fix_pair, stratum_classify, Config, Sample, Stratum, Thresholds, G3};
pub use form::omega_gamma;
pub use mc::{McParams, WeightEstimate, WeightSeries, EPS_SCHEDULE};
pub use propagator::{propagator1, propagator2, EyePoint, PropagatorParams, PROFILE_ID};
pub use weights::{class_representative, weight, WeightCache, WeightConvention};
