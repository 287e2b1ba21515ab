//! Chart-based tensor calculus on jet-evaluable fields.

mod calculus;
mod curvature;
pub mod fd;
mod fields;

pub use calculus::{
    conformal_deviation, covariant_derivative_form, covariant_derivative_vector, divergence,
    exterior_wedge, laplacian_of_jet, lie_bracket, lie_derivative_metric, yamabe_coefficient,
    yamabe_residual, yamabe_weight, ConformalDeviation, ExteriorData,
};
pub use curvature::{
    christoffel, christoffel_from_jet, invert_metric, ricci_from_parts, ricci_scalar, Christoffel,
    MetricJet,
};
pub use fields::{
    flat_bargmann_gram, Chart, ComplexField, JetComplexFn, JetMap, JetScalarFn, MetricField,
    OneForm, ScalarField, VectorField,
};
