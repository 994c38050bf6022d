//! Quantization machinery for finite-dimensional Lie bialgebras.
//!
//! * [`poly`]: exact polynomials on `A = S(V*)` and `A^{⊗k}`, product and coproducts.
//! * [`graph`]: admissible graphs, enumeration by edge budget, canonical keys.
//! * [`tensor`], [`cochain`], [`graph_ops`]: structure tensors, polydifferential
//!   cochains and the graph-to-operator compiler.
//! * [`gs`]: Gerstenhaber–Schack differential, fraction compositions, HKR map.
//! * [`bracket`]: the big bracket and the Lie bialgebra validator.
//! * [`geometry`]: configuration spaces, the propagator, graph forms and
//!   Monte-Carlo weights.
//! * [`quantize`]: the two-parameter product/coproduct series and axiom checks.

pub mod bracket;
pub mod cochain;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod graph_ops;
pub mod gs;
pub mod poly;
pub mod quantize;
pub mod tensor;

pub use cochain::{Bounds, Cochain};
pub use error::{GeometryError, GraphError, OpError, PolyError, QuantizeError};
pub use graph::{AdmissibleGraph, Edge, Vertex};
pub use poly::{Monomial, Poly, Rational, TensorPoly};
pub use tensor::StructTensor;

/// Version string embedded in every artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
