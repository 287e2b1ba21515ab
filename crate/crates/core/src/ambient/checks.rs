use crate::error::{Error, Result};
use crate::geometry::{conformal_deviation, lie_bracket, MetricField, VectorField};
use crate::numkernel::{
    expm, rank_nullspace, DenseMatrix, DenseVector, SeededSampler, DEFAULT_RANK_TOL,
};
use crate::report::{CheckRecord, MaxResidual, VerificationReport};

use super::algebra::{
    bracket_compatibility, closure_residual, commutant_basis, commutant_dimension, realize_field,
    sch_dimension, skew_basis, AlgebraElement,
};
use super::group::{
    ambient_vector, constraint_residuals, projective_action, random_group_element, GroupElement,
    POLE_MARGIN,
};
use super::metric::{build_z0, AmbientMetric};
use super::witness::{coadjoint_oneform, component_witnesses};
use crate::bargmann::flow_rk4;
use crate::numkernel::commutator;

/// Step of the central differences of the infinitesimal action.
pub const ACTION_STEP: f64 = 1e-5;

fn bargmann_sampler(d: usize, seed: u64) -> SeededSampler {
    SeededSampler::cube(seed, d + 2, -1.0, 1.0)
}

/// L_Z g = φ_Z g with φ_Z = 2·(δr/r) and [X_Z, ξ] = 0 for every commutant
/// basis element realized on flat Bargmann space.
pub fn conformal_killing_check(d: usize, samples: usize, seed: u64) -> Result<VerificationReport> {
    let g = MetricField::flat_bargmann(d);
    let xi = VectorField::coordinate(d + 2, d + 1);
    let basis = commutant_basis(d)?;
    let pts = bargmann_sampler(d, seed).samples(samples)?;
    let mut conf = MaxResidual::default();
    let mut rate = MaxResidual::default();
    let mut vertical = MaxResidual::default();
    for b in &basis {
        let params = b
            .params
            .as_ref()
            .ok_or_else(|| Error::Contract("untagged basis element".into()))?;
        let rf = realize_field(params)?;
        for p in &pts {
            let cd = conformal_deviation(&g, &rf.field, p)?;
            conf.add(cd.residual);
            rate.add(cd.phi - 2.0 * rf.rate.at(p));
            vertical.add_all(lie_bracket(&rf.field, &xi, p));
        }
    }
    let mut r = VerificationReport::new();
    let tag = |rec: CheckRecord| {
        rec.with_samples(samples, seed)
            .note("elements", basis.len())
    };
    r.push(tag(CheckRecord::below(
        "conformal_killing",
        "L_Z g = phi_Z g for every commutant basis element",
        conf.get(),
        1e-9,
    )));
    r.push(tag(CheckRecord::below(
        "conformal_factor_rate",
        "phi_Z = 2 dr/r",
        rate.get(),
        1e-9,
    )));
    r.push(tag(CheckRecord::below(
        "xi_invariance",
        "L_Z xi = 0",
        vertical.get(),
        1e-12,
    )));
    Ok(r)
}

/// dim of {Z : X_Z(x₀) = 0} at a point x₀.
pub fn evaluation_kernel_dimension(d: usize, x0: &[f64]) -> Result<usize> {
    let basis = commutant_basis(d)?;
    let mut m = DenseMatrix::zeros(d + 2, basis.len());
    for (k, b) in basis.iter().enumerate() {
        let rf = realize_field(
            b.params
                .as_ref()
                .ok_or_else(|| Error::Contract("untagged basis element".into()))?,
        )?;
        m.set_column(k, &DenseVector::from_vec(rf.field.at(x0)));
    }
    Ok(rank_nullspace(&m, DEFAULT_RANK_TOL)?.nullity())
}

/// Dimension, closure, bracket sign, conformal-Killing pair, transitivity
/// on Bargmann space and the component witnesses.
pub fn lie_algebra_check(
    d: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let expected = sch_dimension(d);
    let dim = commutant_dimension(d, DEFAULT_RANK_TOL)?;
    let mut unstable = 0;
    for t in [DEFAULT_RANK_TOL * 10.0, DEFAULT_RANK_TOL / 10.0] {
        unstable += usize::from(commutant_dimension(d, t)? != dim);
    }
    let basis = commutant_basis(d)?;
    let mut r = VerificationReport::new();
    r.push(CheckRecord::count(
        "commutant_dim",
        "dim sch = (d^2+3d+8)/2",
        expected,
        dim,
    ));
    r.push(CheckRecord::count(
        "commutant_dim_stability",
        "commutant dimension unchanged at rank tolerance x10 and /10",
        0,
        unstable,
    ));
    r.push(CheckRecord::below(
        "closure",
        "brackets of basis elements stay in the span",
        closure_residual(&basis),
        1e-10,
    ));

    let mut bracket = MaxResidual::default();
    let pair_samples = samples.clamp(1, 5);
    for (i, a) in basis.iter().enumerate() {
        for b in &basis[i..] {
            let rep = bracket_compatibility(a, b, pair_samples, seed, tol)?;
            bracket.add(rep.records[0].residual);
        }
    }
    r.push(
        CheckRecord::below(
            "bracket_compatibility",
            "[X_Z1, X_Z2] = -X_[Z1,Z2] for all basis pairs",
            bracket.get(),
            1e-9,
        )
        .with_samples(pair_samples, seed),
    );

    let x0 = bargmann_sampler(d, seed).sample()?;
    r.push(CheckRecord::count(
        "evaluation_kernel_dim",
        "the fields X_Z vanishing at a point form a subalgebra of dimension dim sch - (d+2)",
        expected - (d + 2),
        evaluation_kernel_dimension(d, &x0)?,
    ));
    for rec in conformal_killing_check(d, samples, seed)?.records {
        r.push(rec);
    }
    r.absorb("components", component_witnesses(d)?);
    Ok(r)
}

fn relative_membership(metric: &AmbientMetric, a: &DenseMatrix, z0: &DenseMatrix) -> f64 {
    let scale = a.amax().max(1.0).powi(2);
    metric.isometry_defect(a).max(commutator(a, z0).amax()) / scale
}

/// Random stabilizer elements: constraints, group axioms, projective against
/// ambient action, the infinitesimal action, RK4 flows and the coadjoint
/// one-form.
pub fn group_check(
    d: usize,
    elements: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let metric = AmbientMetric::new(d)?;
    let z0 = build_z0(d)?.z;
    let basis = commutant_basis(d)?;
    let mut rng = SeededSampler::new(seed, Vec::new());

    let mut constraints = MaxResidual::default();
    let mut membership = MaxResidual::default();
    let mut closure = MaxResidual::default();
    let mut rejected_elements = 0;
    let mut group = Vec::with_capacity(elements);
    for _ in 0..elements {
        match random_group_element(&metric, &basis, &mut rng, 0.5) {
            Ok(a) => {
                constraints.add_all(constraint_residuals(&metric, &a.blocks));
                membership.add(relative_membership(&metric, &a.matrix, &z0));
                group.push(a);
            }
            Err(Error::Constraint { .. } | Error::Contract(_)) => rejected_elements += 1,
            Err(e) => return Err(e),
        }
    }
    for (k, a) in group.iter().enumerate() {
        let b = &group[(k + 1) % group.len()];
        match (a.compose(&metric, b), a.inverse(&metric)) {
            (Ok(ab), Ok(ai)) => {
                closure.add(relative_membership(&metric, &ab.matrix, &z0));
                closure.add(relative_membership(&metric, &ai.matrix, &z0));
                closure.add(
                    (&ai.matrix * &a.matrix - DenseMatrix::identity(metric.n(), metric.n())).amax(),
                );
            }
            _ => rejected_elements += 1,
        }
    }

    let mut r = VerificationReport::new();
    r.push(
        CheckRecord::below(
            "stabilizer_constraints",
            "the seven block constraints hold",
            constraints.get(),
            1e-10,
        )
        .note("elements", elements)
        .with_rejected(rejected_elements)
        .with_samples(elements, seed),
    );
    r.push(
        CheckRecord::below(
            "stabilizer_membership",
            "Abar A = 1 and A Z0 = Z0 A",
            membership.get(),
            1e-10,
        )
        .with_samples(elements, seed),
    );
    r.push(CheckRecord::count(
        "elements_assembled",
        "every sampled exponential assembles into the stabilizer",
        0,
        rejected_elements,
    ));
    r.push(
        CheckRecord::below(
            "group_closure",
            "products and inverses stay in the stabilizer",
            closure.get(),
            1e-10,
        )
        .with_samples(elements, seed),
    );

    // projective action against the ambient action on X(x, r)
    let mut proj = MaxResidual::default();
    let mut skipped = 0;
    let mut pts = bargmann_sampler(d, seed.wrapping_add(1));
    for a in &group {
        for _ in 0..samples {
            let x = pts.sample()?;
            let rr = rng.uniform(0.5, 2.0);
            let den = a.blocks.e - a.blocks.a * x[d];
            if den.abs() <= POLE_MARGIN {
                skipped += 1;
                continue;
            }
            let (xp, rp) = projective_action(a, &x, rr)?;
            let ax = &a.matrix * ambient_vector(d, &x, rr);
            let xx = ambient_vector(d, &xp, rp);
            proj.add((&ax - &xx).amax() / ax.amax().max(1.0));
        }
    }
    r.push(
        CheckRecord::below(
            "projective_consistency",
            "A X(x, r) = X(x', r')",
            proj.get(),
            1e-10,
        )
        .with_samples(samples * group.len(), seed)
        .with_rejected(skipped),
    );

    // d/dε of exp(εZ) acting projectively against X_Z and δr/r
    let mut infinitesimal = MaxResidual::default();
    let mut rk4 = MaxResidual::default();
    let pts_inf = bargmann_sampler(d, seed.wrapping_add(2)).samples(samples.max(1))?;
    for b in &basis {
        let params = b
            .params
            .as_ref()
            .ok_or_else(|| Error::Contract("untagged basis element".into()))?;
        let rf = realize_field(params)?;
        let plus = GroupElement::exp(&metric, &scaled(b, ACTION_STEP))?;
        let minus = GroupElement::exp(&metric, &scaled(b, -ACTION_STEP))?;
        let finite = GroupElement::exp(&metric, &scaled(b, 0.3))?;
        let flow = VectorField::new(d + 2, {
            let f = rf.field.clone();
            move |x| f.eval(x).iter().map(|c| c.scale(0.3)).collect()
        });
        for p in &pts_inf {
            let (xp, rp) = projective_action(&plus, p, 1.0)?;
            let (xm, rm) = projective_action(&minus, p, 1.0)?;
            let field = rf.field.at(p);
            for i in 0..d + 2 {
                infinitesimal.add((xp[i] - xm[i]) / (2.0 * ACTION_STEP) - field[i]);
            }
            infinitesimal.add((rp - rm) / (2.0 * ACTION_STEP) - rf.rate.at(p));
            let (xf, _) = projective_action(&finite, p, 1.0)?;
            let xr = flow_rk4(&flow, p, 1.0, 1e-3);
            rk4.add_all(xf.iter().zip(&xr).map(|(a, b)| a - b));
        }
    }
    r.push(
        CheckRecord::below(
            "infinitesimal_action",
            "d/de of exp(eZ) acting projectively is X_Z, and of r is (dr/r) r",
            infinitesimal.get(),
            1e-8,
        )
        .with_samples(pts_inf.len() * basis.len(), seed)
        .note("step", ACTION_STEP),
    );
    r.push(
        CheckRecord::below(
            "rk4_matches_exp",
            "RK4 flow of 0.3 X_Z for unit time equals exp(0.3 Z)",
            rk4.get(),
            1e-7,
        )
        .with_samples(pts_inf.len() * basis.len(), seed),
    );

    r.absorb(
        "coadjoint",
        coadjoint_check(&metric, &group, &mut rng, tol)?,
    );
    Ok(r)
}

fn scaled(z: &AlgebraElement, c: f64) -> AlgebraElement {
    AlgebraElement {
        matrix: &z.matrix * c,
        params: None,
    }
}

fn random_skew(
    metric: &AmbientMetric,
    skew: &[DenseMatrix],
    rng: &mut SeededSampler,
    scale: f64,
) -> DenseMatrix {
    let n = metric.n();
    skew.iter().fold(DenseMatrix::zeros(n, n), |acc, b| {
        acc + b * rng.uniform(-scale, scale)
    })
}

/// Left invariance and antisymmetry of ϖ, and the observed sign of
/// ϖ against P̄δQ.
pub fn coadjoint_check(
    metric: &AmbientMetric,
    elements: &[GroupElement],
    rng: &mut SeededSampler,
    tol: f64,
) -> Result<VerificationReport> {
    let skew = skew_basis(metric);
    let mut invariance = MaxResidual::default();
    let mut antisym = MaxResidual::default();
    let mut signs: Vec<f64> = Vec::new();
    for a in elements {
        let y1 = random_skew(metric, &skew, rng, 0.5);
        let y2 = random_skew(metric, &skew, rng, 0.5);
        let b = expm(&random_skew(metric, &skew, rng, 0.3));
        let (da, da2) = (&a.matrix * &y1, &a.matrix * &y2);
        let v = coadjoint_oneform(metric, &a.matrix, &da, &da2)?;
        let w = coadjoint_oneform(metric, &(&b * &a.matrix), &(&b * &da), &(&b * &da2))?;
        let scale = v.varpi.abs().max(1.0);
        invariance.add((v.varpi - w.varpi) / scale);
        let back = coadjoint_oneform(metric, &a.matrix, &da2, &da)?;
        antisym.add(v.d_varpi + back.d_varpi);
        if let Some(s) = v.sign {
            signs.push(s);
        }
    }
    let first = signs.first().copied().unwrap_or(f64::NAN);
    let spread = signs.iter().fold(0.0f64, |m, s| m.max((s - first).abs()));
    let mut r = VerificationReport::new();
    r.push(
        CheckRecord::below(
            "left_invariance",
            "varpi(BA, B dA) = varpi(A, dA)",
            invariance.get(),
            tol.min(1e-10),
        )
        .with_samples(elements.len(), 0),
    );
    r.push(
        CheckRecord::below(
            "d_varpi_antisymmetric",
            "d varpi(d, d') = -d varpi(d', d)",
            antisym.get(),
            0.0,
        )
        .with_samples(elements.len(), 0),
    );
    r.push(
        CheckRecord::below(
            "sign_consistency",
            "varpi / (Pbar dQ) is the same sign at every sample",
            spread,
            1e-6,
        )
        .with_samples(signs.len(), 0)
        .note("observed_sign", first),
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conformal_killing_d1_to_d3() {
        for d in 1..=3 {
            let r = conformal_killing_check(d, 20, 5).unwrap();
            assert!(r.all_pass(), "{r:?}");
        }
    }

    #[test]
    fn lie_algebra_d3() {
        let r = lie_algebra_check(3, 5, 1, 1e-8).unwrap();
        assert!(r.all_pass(), "{r:?}");
        assert_eq!(r.get("commutant_dim").unwrap().observed, Some(13.0));
    }

    #[test]
    fn evaluation_kernel() {
        for d in 1..=3 {
            assert_eq!(
                evaluation_kernel_dimension(d, &vec![0.3; d + 2]).unwrap(),
                sch_dimension(d) - d - 2
            );
        }
    }

    #[test]
    fn group_d2() {
        let r = group_check(2, 10, 5, 3, 1e-8).unwrap();
        assert!(r.all_pass(), "{r:?}");
        assert_eq!(
            r.get("coadjoint.sign_consistency").unwrap().notes["observed_sign"],
            "1"
        );
    }
}
