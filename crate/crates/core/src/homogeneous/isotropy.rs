use crate::ambient::{
    assemble_group_element, commutant_basis, sch_dimension, AmbientMetric, GroupBlocks,
    GroupElement,
};
use crate::error::{Error, Result};
use crate::numkernel::{
    expm, rank_nullspace, DenseMatrix, DenseVector, SeededSampler, DEFAULT_RANK_TOL,
};
use crate::report::{CheckRecord, MaxResidual, VerificationReport};

use super::manifold::SchrodingerManifoldConfig;

/// Q₀ = λe_u + e_v, the image of x̂ = 0, r = 1.
pub fn bulk_origin(metric: &AmbientMetric, lambda: f64) -> DenseVector {
    let l = metric.layout();
    metric.unit(l.u()) * lambda + metric.unit(l.v())
}

/// X = e_v, the boundary origin.
pub fn boundary_origin(metric: &AmbientMetric) -> DenseVector {
    metric.unit(metric.layout().v())
}

/// Dimension of {Z ∈ sch : Z·Q₀ = 0} at rank tolerance `tol`.
pub fn bulk_isotropy_dimension(d: usize, lambda: f64, tol: f64) -> Result<usize> {
    let metric = AmbientMetric::new(d)?;
    let q0 = bulk_origin(&metric, lambda);
    let basis = commutant_basis(d)?;
    let mut m = DenseMatrix::zeros(metric.n(), basis.len());
    for (k, b) in basis.iter().enumerate() {
        m.set_column(k, &(&b.matrix * &q0));
    }
    Ok(rank_nullspace(&m, tol)?.nullity())
}

/// Dimension of {Z ∈ sch : Z·X ∈ R·X} for X = e_v.
pub fn boundary_isotropy_dimension(d: usize, tol: f64) -> Result<usize> {
    let metric = AmbientMetric::new(d)?;
    let x = boundary_origin(&metric);
    let proj =
        DenseMatrix::identity(metric.n(), metric.n()) - &x * x.transpose() / x.norm_squared();
    let basis = commutant_basis(d)?;
    let mut m = DenseMatrix::zeros(metric.n(), basis.len());
    for (k, b) in basis.iter().enumerate() {
        m.set_column(k, &(&proj * (&b.matrix * &x)));
    }
    Ok(rank_nullspace(&m, tol)?.nullity())
}

fn check_rotation(r: &DenseMatrix, d: usize) -> Result<()> {
    if r.shape() != (d, d) {
        return Err(Error::Dimension("R must be d x d".into()));
    }
    let defect = (r.transpose() * r - DenseMatrix::identity(d, d)).amax();
    if defect > 1e-12 {
        return Err(Error::Contract(format!(
            "R is not orthogonal ({defect:.3e})"
        )));
    }
    Ok(())
}

/// Element of the stabilizer of Q₀ with parameters (R, u, a):
/// L = [[R, u, 0], [0, 1, 0], [−uᵀR, −½uᵀu + λa², 1]], B = −C = λaξ,
/// b = e = 1, d = 0.
pub fn bulk_isotropy_element(
    metric: &AmbientMetric,
    lambda: f64,
    r: &DenseMatrix,
    u: &DenseVector,
    a: f64,
) -> Result<GroupElement> {
    let d = metric.d();
    check_rotation(r, d)?;
    let l = metric.layout();
    let mut bl = GroupBlocks::identity(d);
    bl.l.view_mut((0, 0), (d, d)).copy_from(r);
    bl.l.view_mut((0, l.t()), (d, 1)).copy_from(u);
    let v = -(u.transpose() * r);
    bl.l.view_mut((l.s(), 0), (1, d)).copy_from(&v);
    bl.l[(l.s(), l.t())] = -0.5 * u.norm_squared() + lambda * a * a;
    bl.a = a;
    bl.b_vec[l.s()] = lambda * a;
    bl.c[l.s()] = -lambda * a;
    assemble_group_element(metric, bl)
}

/// Element of the stabilizer of the ray through e_v with parameters
/// (R, v, a, e): L = [[R, −Rv/e, 0], [0, 1/e, 0], [vᵀ, −vᵀv/(2e), e]],
/// B = C = 0, b = 1/e, d = 0.
pub fn boundary_isotropy_element(
    metric: &AmbientMetric,
    r: &DenseMatrix,
    v: &DenseVector,
    a: f64,
    e: f64,
) -> Result<GroupElement> {
    let d = metric.d();
    check_rotation(r, d)?;
    if e == 0.0 {
        return Err(Error::Contract("e must be nonzero".into()));
    }
    let l = metric.layout();
    let mut bl = GroupBlocks::identity(d);
    bl.l.view_mut((0, 0), (d, d)).copy_from(r);
    bl.l.view_mut((0, l.t()), (d, 1)).copy_from(&(-(r * v) / e));
    bl.l[(l.t(), l.t())] = 1.0 / e;
    bl.l.view_mut((l.s(), 0), (1, d)).copy_from(&v.transpose());
    bl.l[(l.s(), l.t())] = -0.5 * v.norm_squared() / e;
    bl.l[(l.s(), l.s())] = e;
    bl.a = a;
    bl.b = 1.0 / e;
    bl.e = e;
    assemble_group_element(metric, bl)
}

/// Random element of O(d): exp of a random skew matrix, times a reflection
/// when `reflect`.
pub fn random_orthogonal(sampler: &mut SeededSampler, d: usize, reflect: bool) -> DenseMatrix {
    let mut s = DenseMatrix::zeros(d, d);
    for i in 0..d {
        for j in (i + 1)..d {
            let w = sampler.uniform(-1.0, 1.0);
            s[(i, j)] = w;
            s[(j, i)] = -w;
        }
    }
    let mut r = expm(&s);
    if reflect {
        r.row_mut(0).neg_mut();
    }
    r
}

/// Isotropy dimensions of Q₀ and of the boundary ray, the resulting space
/// dimensions, and sample stabilizer elements.
pub fn isotropy_check(
    cfg: &SchrodingerManifoldConfig,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let d = cfg.d;
    let metric = AmbientMetric::new(d)?;
    let sch = sch_dimension(d);
    let bulk = bulk_isotropy_dimension(d, cfg.lambda, DEFAULT_RANK_TOL)?;
    let bdry = boundary_isotropy_dimension(d, DEFAULT_RANK_TOL)?;
    let mut unstable = 0usize;
    for tol in [DEFAULT_RANK_TOL * 10.0, DEFAULT_RANK_TOL / 10.0] {
        unstable += usize::from(bulk_isotropy_dimension(d, cfg.lambda, tol)? != bulk);
        unstable += usize::from(boundary_isotropy_dimension(d, tol)? != bdry);
    }
    let mut r = VerificationReport::new();
    r.push(CheckRecord::count(
        "bulk_isotropy_dim",
        "dim K = d(d+1)/2 + 1",
        d * (d + 1) / 2 + 1,
        bulk,
    ));
    r.push(CheckRecord::count(
        "bulk_space_dim",
        "dim M_lambda = d + 3",
        d + 3,
        sch.saturating_sub(bulk),
    ));
    r.push(CheckRecord::count(
        "boundary_isotropy_dim",
        "dim S = (d^2+d+4)/2",
        (d * d + d + 4) / 2,
        bdry,
    ));
    r.push(CheckRecord::count(
        "boundary_space_dim",
        "dim M = d + 2",
        d + 2,
        sch.saturating_sub(bdry),
    ));
    r.push(CheckRecord::count(
        "isotropy_tolerance_stability",
        "dimensions unchanged at rank tolerance x10 and /10",
        0,
        unstable,
    ));

    let mut sampler = SeededSampler::new(seed, Vec::new());
    let q0 = bulk_origin(&metric, cfg.lambda);
    let x0 = boundary_origin(&metric);
    let mut bulk_res = MaxResidual::default();
    let mut ray_res = MaxResidual::default();
    let id = DenseMatrix::identity(d, d);
    let fixed = bulk_isotropy_element(&metric, cfg.lambda, &id, &DenseVector::zeros(d), 0.7)?;
    bulk_res.add((&fixed.matrix * &q0 - &q0).amax());
    for k in 0..samples {
        let rot = random_orthogonal(&mut sampler, d, k % 2 == 1);
        let u = DenseVector::from_vec(sampler.uniform_vec(d, -1.0, 1.0));
        let a = sampler.uniform(-1.0, 1.0);
        let g = bulk_isotropy_element(&metric, cfg.lambda, &rot, &u, a)?;
        bulk_res.add((&g.matrix * &q0 - &q0).amax());
        let e = sampler.uniform(0.5, 2.0) * if k % 3 == 0 { -1.0 } else { 1.0 };
        let g = boundary_isotropy_element(&metric, &rot, &u, a, e)?;
        let img = &g.matrix * &x0;
        ray_res.add((&img - &x0 * e).amax());
    }
    r.push(
        CheckRecord::below(
            "bulk_isotropy_fixes_origin",
            "A Q0 = Q0 for sampled (R, u, a)",
            bulk_res.get(),
            1e-10,
        )
        .with_samples(samples + 1, seed),
    );
    r.push(
        CheckRecord::below(
            "boundary_isotropy_fixes_ray",
            "A X = e X for sampled (R, v, a, e)",
            ray_res.get(),
            1e-10,
        )
        .with_samples(samples, seed),
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_d3() {
        assert_eq!(
            bulk_isotropy_dimension(3, -0.5, DEFAULT_RANK_TOL).unwrap(),
            7
        );
        assert_eq!(boundary_isotropy_dimension(3, DEFAULT_RANK_TOL).unwrap(), 8);
    }

    #[test]
    fn fixed_origin_element() {
        let m = AmbientMetric::new(2).unwrap();
        let g = bulk_isotropy_element(
            &m,
            -0.5,
            &DenseMatrix::identity(2, 2),
            &DenseVector::zeros(2),
            0.7,
        )
        .unwrap();
        let q0 = bulk_origin(&m, -0.5);
        assert!((&g.matrix * &q0 - &q0).amax() < 1e-15);
    }

    #[test]
    fn non_orthogonal_rotation_rejected() {
        let m = AmbientMetric::new(1).unwrap();
        let r = DenseMatrix::from_element(1, 1, 2.0);
        assert!(bulk_isotropy_element(&m, -0.5, &r, &DenseVector::zeros(1), 0.0).is_err());
    }

    #[test]
    fn check_passes_d1_to_d4() {
        for d in 1..=4 {
            let c = SchrodingerManifoldConfig::new(d, -0.8, 1.0).unwrap();
            let r = isotropy_check(&c, 10, 4).unwrap();
            assert!(r.all_pass(), "{r:?}");
        }
    }
}
