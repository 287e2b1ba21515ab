//! The homogeneous spaces M̂_λ of the Schrödinger group, their boundary M,
//! and the audit of the Schrödinger-manifold axioms.

mod audit;
mod boundary;
mod einstein;
mod isometry;
mod isotropy;
mod manifold;

pub use audit::{
    schrodinger_axiom_audit, schrodinger_axiom_audit_with, AUDIT_SAMPLES, AUDIT_SEED, DECAY_RADII,
    DECAY_WINDOW,
};
pub use boundary::{
    boundary_metric, boundary_representative, boundary_representative_jets, boundary_sampler,
    boundary_structure, boundary_tangent_jets, boundary_theta, boundary_xi, cone_kernel, f0,
    f0_jets, ConeKernel, MIN_F0,
};
pub use einstein::{
    cosmological_constant, einstein_check, einstein_factor, einstein_residual, nullfluid_check,
    nullfluid_residual, EinsteinResidual, NullFluidResidual,
};
pub use isometry::{
    bulk_action_jets, in_stabilizer, isometry_check, null_plane_boost, pullback_residual,
    random_isometries_check, PullbackResidual,
};
pub use isotropy::{
    boundary_isotropy_dimension, boundary_isotropy_element, boundary_origin,
    bulk_isotropy_dimension, bulk_isotropy_element, bulk_origin, isotropy_check, random_orthogonal,
};
pub use manifold::{
    bs_gram, bs_recovery_check, bulk_metric, bulk_sampler, chart_of, chart_of_jets,
    dual_path_check, embed, embedding_jacobian, embedding_jets, induced_metric,
    integrability_check, poincare_metric, signature_check, theta_hat, theta_hat_form, xi_hat_check,
    xi_hat_consistency, xi_hat_field, DualPath, EmbeddedPoint, EmbeddingResiduals,
    SchrodingerManifoldConfig, XiHatConsistency,
};
