use schrogeo_core::ambient::{
    ambient_vector, assemble_group_element, assemble_sch, build_z0, commutant_basis,
    component_witnesses, constraint_residuals, group_check, projective_action,
    projective_action_jets, random_group_element, AmbientMetric, GroupBlocks, GroupElement,
    SchParams,
};
use schrogeo_core::bargmann::jacobian_determinant;
use schrogeo_core::error::Error;
use schrogeo_core::numkernel::{commutator, DenseVector, Jet2, SeededSampler};

#[test]
fn fifty_sampled_elements_satisfy_constraints() {
    for d in 1..=3 {
        let m = AmbientMetric::new(d).unwrap();
        let z0 = build_z0(d).unwrap().z;
        let basis = commutant_basis(d).unwrap();
        let mut rng = SeededSampler::new(42, Vec::new());
        for _ in 0..50 {
            let a = random_group_element(&m, &basis, &mut rng, 0.5).unwrap();
            assert!(constraint_residuals(&m, &a.blocks)
                .iter()
                .all(|r| *r < 1e-10));
            assert!(m.isometry_defect(&a.matrix) < 1e-10);
            assert!(commutator(&a.matrix, &z0).amax() < 1e-10);
        }
    }
}

#[test]
fn pure_translation_shifts_points() {
    let m = AmbientMetric::new(2).unwrap();
    let gamma = DenseVector::from_vec(vec![0.3, -0.1, 0.7, 0.0]);
    let z = assemble_sch(&m, &SchParams::translation(gamma)).unwrap();
    let a = GroupElement::exp(&m, &z).unwrap();
    let (x, r) = projective_action(&a, &[0.1, 0.2, 0.3, 0.4], 1.5).unwrap();
    let want = [0.4, 0.1, 1.0];
    for i in 0..3 {
        assert!((x[i] - want[i]).abs() < 1e-14);
    }
    assert!((r - 1.5).abs() < 1e-14);
    let ax = &a.matrix * ambient_vector(2, &[0.1, 0.2, 0.3, 0.4], 1.5);
    assert!((ax - ambient_vector(2, &x, r)).amax() < 1e-14);
}

#[test]
fn violated_constraint_is_named() {
    let m = AmbientMetric::new(1).unwrap();
    let mut bl = GroupBlocks::identity(1);
    bl.l[(0, 0)] = 2.0;
    match assemble_group_element(&m, bl) {
        Err(Error::Constraint { index, label, .. }) => {
            assert!(index >= 1);
            assert!(!label.is_empty());
        }
        other => panic!("expected a constraint error, got {other:?}"),
    }
}

#[test]
fn projective_jacobian_closed_form() {
    // |det DΦ_A(x)| = |e − aξ*x|^{−(d+2)}
    let m = AmbientMetric::new(2).unwrap();
    let z = assemble_sch(&m, &SchParams::expansion(2, 0.4)).unwrap();
    let a = GroupElement::exp(&m, &z).unwrap();
    let p = [0.2, -0.3, 0.5, 0.1];
    let (det, _) = jacobian_determinant(|x| projective_action_jets(&a.blocks, x).0, &p).unwrap();
    let den = projective_action_jets(&a.blocks, &Jet2::constants(&p))
        .1
        .value();
    assert!((det - den.abs().powi(-4)).abs() < 1e-12);
}

#[test]
fn group_suite_passes() {
    for d in 1..=3 {
        let r = group_check(d, 20, 5, 7, 1e-8).unwrap();
        assert!(r.all_pass(), "{r:?}");
    }
}

#[test]
fn component_witnesses_d1_to_d3() {
    for d in 1..=3 {
        let r = component_witnesses(d).unwrap();
        assert!(r.all_pass(), "{r:?}");
    }
}
