//! The ambient space R^{d+2,2}, the commutant of Z₀ in o(d+2,2), the matrix
//! Schrödinger group and its projective action on Bargmann space.

mod algebra;
mod checks;
mod group;
mod metric;
mod witness;

pub use algebra::{
    assemble_sch, bracket_compatibility, closure_residual, commutant_basis, commutant_dimension,
    decompose_sch, realize_field, sch_dimension, skew_basis, AlgebraElement, RealizedField,
    SchParams, BRACKET_SIGN,
};
pub use checks::{
    coadjoint_check, conformal_killing_check, evaluation_kernel_dimension, group_check,
    lie_algebra_check, ACTION_STEP,
};
pub use group::{
    ambient_vector, assemble_group_element, constraint_residuals, group_element_from_matrix,
    projective_action, projective_action_jets, projective_map, random_group_element, GroupBlocks,
    GroupElement, CONSTRAINT_LABELS, GROUP_TOL, MIN_DENOMINATOR, POLE_MARGIN,
};
pub use metric::{build_z0, make_special, AmbientMetric, Layout, SpecialNullVector};
pub use witness::{
    coadjoint_oneform, component_generators, component_witnesses, CoadjointValue,
    ComponentGenerators,
};
