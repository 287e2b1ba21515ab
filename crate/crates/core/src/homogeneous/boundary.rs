use crate::ambient::{build_z0, AmbientMetric};
use crate::error::{Error, Result};
use crate::geometry::{
    covariant_derivative_form, covariant_derivative_vector, exterior_wedge, flat_bargmann_gram,
    Chart, MetricField, OneForm, VectorField,
};
use crate::numkernel::{
    rank_nullspace, DenseMatrix, DenseVector, Jet2, SeededSampler, DEFAULT_RANK_TOL,
};
use crate::report::{CheckRecord, MaxResidual, VerificationReport};

/// Samples with F₀ below this are outside M and rejected.
pub const MIN_F0: f64 = 1e-6;

fn jet_inner(g: &DenseMatrix, a: &[Jet2], b: &[Jet2]) -> Jet2 {
    let mut out = Jet2::constant(0.0);
    for i in 0..a.len() {
        for j in 0..b.len() {
            if g[(i, j)] != 0.0 {
                out += (&a[i] * &b[j]).scale(g[(i, j)]);
            }
        }
    }
    out
}

fn mat_jets(m: &DenseMatrix, x: &[Jet2]) -> Vec<Jet2> {
    (0..m.nrows())
        .map(|i| {
            let mut v = Jet2::constant(0.0);
            for (j, xj) in x.iter().enumerate() {
                if m[(i, j)] != 0.0 {
                    v += xj.scale(m[(i, j)]);
                }
            }
            v
        })
        .collect()
}

/// Normalized representative X = (x, −½x*x, 1) of the boundary point with
/// chart coordinates (x, t, s), x*x = Σxⁱxⁱ + 2ts.
pub fn boundary_representative_jets(d: usize, p: &[Jet2]) -> Vec<Jet2> {
    let mut xx = (&p[d] * &p[d + 1]).scale(2.0);
    for xi in &p[..d] {
        xx += xi.square();
    }
    let mut x: Vec<Jet2> = p[..d + 2].to_vec();
    x.push(xx.scale(-0.5));
    x.push(Jet2::constant(1.0));
    x
}

pub fn boundary_representative(d: usize, p: &[f64]) -> DenseVector {
    DenseVector::from_vec(
        boundary_representative_jets(d, &Jet2::constants(p))
            .iter()
            .map(Jet2::value)
            .collect(),
    )
}

/// Coordinate derivatives ∂_aX of the normalized representative, written
/// out by hand: ∂_{xⁱ}X = e_i − xⁱe_u, ∂_tX = e_t − s e_u, ∂_sX = e_s − t e_u.
pub fn boundary_tangent_jets(d: usize, p: &[Jet2]) -> Vec<Vec<Jet2>> {
    let n = d + 4;
    let u = d + 2;
    (0..d + 2)
        .map(|a| {
            let mut v = vec![Jet2::constant(0.0); n];
            v[a] = Jet2::constant(1.0);
            let partner = if a < d {
                a
            } else if a == d {
                d + 1
            } else {
                d
            };
            v[u] = -p[partner].clone();
            v
        })
        .collect()
}

/// F₀(X) = (X̄P₀)² + (X̄Q₀)².
pub fn f0_jets(metric: &AmbientMetric, x: &[Jet2]) -> Result<Jet2> {
    let z0 = build_z0(metric.d())?;
    let g = metric.gram();
    let pj: Vec<Jet2> = z0.p.iter().map(|v| Jet2::constant(*v)).collect();
    let qj: Vec<Jet2> = z0.q.iter().map(|v| Jet2::constant(*v)).collect();
    Ok(jet_inner(g, x, &pj).square() + jet_inner(g, x, &qj).square())
}

pub fn f0(metric: &AmbientMetric, x: &DenseVector) -> Result<f64> {
    let xj: Vec<Jet2> = x.iter().map(|v| Jet2::constant(*v)).collect();
    Ok(f0_jets(metric, &xj)?.value())
}

/// g_{F₀} = δX̄δ'X / F₀(X) on the boundary chart.
pub fn boundary_metric(d: usize) -> Result<MetricField> {
    let metric = AmbientMetric::new(d)?;
    let n = d + 2;
    MetricField::new(Chart::bargmann(d), (d + 1, 1), move |p| {
        let x = boundary_representative_jets(d, p);
        let tangents = boundary_tangent_jets(d, p);
        let inv = f0_jets(&metric, &x)
            .and_then(|f| f.try_recip())
            .unwrap_or_else(|_| Jet2::constant(f64::NAN));
        let mut g = vec![Jet2::constant(0.0); n * n];
        for a in 0..n {
            for b in a..n {
                let v = &jet_inner(metric.gram(), &tangents[a], &tangents[b]) * &inv;
                g[a * n + b] = v.clone();
                g[b * n + a] = v;
            }
        }
        g
    })
}

/// θ_{F₀}(δX) = −X̄Z₀δX / F₀(X).
pub fn boundary_theta(d: usize) -> Result<OneForm> {
    let metric = AmbientMetric::new(d)?;
    let z0 = build_z0(d)?.z;
    Ok(OneForm::new(d + 2, move |p| {
        let x = boundary_representative_jets(d, p);
        let inv = f0_jets(&metric, &x)
            .and_then(|f| f.try_recip())
            .unwrap_or_else(|_| Jet2::constant(f64::NAN));
        boundary_tangent_jets(d, p)
            .iter()
            .map(|dx| &jet_inner(metric.gram(), &x, &mat_jets(&z0, dx)) * &inv.scale(-1.0))
            .collect()
    }))
}

/// ξ = ∂/∂s on the boundary chart.
pub fn boundary_xi(d: usize) -> VectorField {
    VectorField::coordinate(d + 2, d + 1)
}

/// Sampling box [−1, 1]^{d+2} of the boundary chart, with F₀ < MIN_F0
/// rejected.
pub fn boundary_sampler(d: usize, seed: u64) -> Result<SeededSampler> {
    let metric = AmbientMetric::new(d)?;
    Ok(
        SeededSampler::cube(seed, d + 2, -1.0, 1.0).exclude(move |p| {
            f0(&metric, &boundary_representative(d, p)).map_or(true, |f| !(f >= MIN_F0))
        }),
    )
}

/// Kernel of the cone form δX̄δ'X restricted to {δX : X̄δX = 0}.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeKernel {
    pub nullity: usize,
    /// 1 − |cos| of the angle between the kernel vector and X, when the
    /// kernel is one-dimensional.
    pub misalignment: Option<f64>,
}

pub fn cone_kernel(metric: &AmbientMetric, x: &DenseVector, tol: f64) -> Result<ConeKernel> {
    let n = metric.n();
    if x.len() != n {
        return Err(Error::Dimension(format!(
            "ambient vectors must have {n} components"
        )));
    }
    let row = x.transpose() * metric.gram();
    let tangent = rank_nullspace(&DenseMatrix::from_row_slice(1, n, row.as_slice()), tol)?;
    let b = DenseMatrix::from_columns(&tangent.nullspace);
    let form = b.transpose() * metric.gram() * &b;
    let k = rank_nullspace(&form, tol)?;
    let misalignment = (k.nullity() == 1).then(|| {
        let v = &b * &k.nullspace[0];
        1.0 - (v.dot(x)).abs() / (v.norm() * x.norm())
    });
    Ok(ConeKernel {
        nullity: k.nullity(),
        misalignment,
    })
}

fn conformal_factor(gf: &DenseMatrix, flat: &DenseMatrix) -> (f64, f64) {
    let omega2 = gf.component_mul(flat).sum() / flat.component_mul(flat).sum();
    let off = (gf - flat * omega2).amax() / gf.amax();
    (omega2, off)
}

/// Conformal Bargmann structure of the boundary M on the normalized chart:
/// well-definedness of g_{F₀}, closedness and parallelism of θ_{F₀},
/// ξ null, nowhere zero and parallel, the one-dimensional kernel of the cone
/// form, and conformal flatness with a factor depending on t only.
pub fn boundary_structure(
    d: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let metric = AmbientMetric::new(d)?;
    let z0 = build_z0(d)?.z;
    let gf = boundary_metric(d)?;
    let theta = boundary_theta(d)?;
    let xi = boundary_xi(d);
    let n = d + 2;
    let flat = DenseMatrix::from_row_slice(n, n, &flat_bargmann_gram(d));
    let mut sampler = boundary_sampler(d, seed)?;
    let pts = sampler.samples(samples)?;
    let mut rng = SeededSampler::new(seed ^ 0x5eed, Vec::new());
    let alpha = 3.7;

    let mut scale = MaxResidual::default();
    let mut closed = MaxResidual::default();
    let mut par_theta = MaxResidual::default();
    let mut par_xi = MaxResidual::default();
    let mut null = MaxResidual::default();
    let mut push = MaxResidual::default();
    let mut flat_xi = MaxResidual::default();
    let mut metric_dp = MaxResidual::default();
    let mut theta_dp = MaxResidual::default();
    let mut off = MaxResidual::default();
    let mut time_only = MaxResidual::default();
    let mut align = MaxResidual::default();
    let mut min_xi = f64::INFINITY;
    let mut kernel_dim = 1usize;

    for p in &pts {
        let pj = Jet2::seed(p);
        let xj = boundary_representative_jets(d, &pj);
        let x = DenseVector::from_vec(xj.iter().map(Jet2::value).collect());
        let jac = DenseMatrix::from_fn(n + 2, n, |i, a| xj[i].d(a));
        let f = f0(&metric, &x)?;
        let g = gf.gram_at(p)?;
        let th = theta.at(p);
        let t = p[d];

        // g_{F₀} via the jets of X against the chart closed form g/(1+t²)
        let via_jets = jac.transpose() * metric.gram() * &jac / f;
        let closed_form = &flat / (1.0 + t * t);
        metric_dp.add(
            (&via_jets - &closed_form)
                .amax()
                .max((&g - &closed_form).amax()),
        );
        let mut th_closed = vec![0.0; n];
        th_closed[d] = 1.0 / (1.0 + t * t);
        theta_dp.add(
            th.iter()
                .zip(&th_closed)
                .fold(0.0, |m, (a, b)| m.max((a - b).abs())),
        );

        let u = DenseVector::from_vec(rng.uniform_vec(n, -1.0, 1.0));
        let w = DenseVector::from_vec(rng.uniform_vec(n, -1.0, 1.0));
        let (dx, dx2) = (&jac * &u, &jac * &w);
        let base = metric.inner(&dx, &dx2) / f;
        let scaled = metric.inner(&(&dx * alpha), &(&dx2 * alpha)) / f0(&metric, &(&x * alpha))?;
        scale.add((scaled - base).abs() / base.abs().max(1.0));

        closed.add(exterior_wedge(&theta, p).d_omega.amax());
        par_theta.add(covariant_derivative_form(&gf, &theta, p)?.amax());
        par_xi.add(covariant_derivative_vector(&gf, &xi, p)?.amax());
        let xv = xi.at(p);
        null.add(
            (0..n)
                .map(|a| (0..n).map(|b| g[(a, b)] * xv[a] * xv[b]).sum::<f64>())
                .sum::<f64>()
                .abs(),
        );
        let gxi = &g * DenseVector::from_vec(xv.clone());
        flat_xi.add(
            gxi.iter()
                .zip(&th)
                .fold(0.0, |m, (a, b)| m.max((a - b).abs())),
        );
        let z0x = &z0 * &x;
        push.add((&jac * DenseVector::from_vec(xv) - &z0x).amax());
        min_xi = min_xi.min(z0x.amax());

        let ck = cone_kernel(&metric, &x, DEFAULT_RANK_TOL)?;
        if ck.nullity != 1 && kernel_dim == 1 {
            kernel_dim = ck.nullity;
        }
        if let Some(m) = ck.misalignment {
            align.add(m);
        }

        let (omega2, o) = conformal_factor(&g, &flat);
        off.add(o);
        let mut q = rng.uniform_vec(n, -1.0, 1.0);
        q[d] = t;
        let (omega2_q, _) = conformal_factor(&gf.gram_at(&q)?, &flat);
        time_only.add((omega2 - omega2_q).abs());
    }

    let mut r = VerificationReport::new();
    let tag = |rec: CheckRecord| {
        rec.with_samples(samples, seed)
            .with_rejected(sampler.rejected())
    };
    r.push(tag(CheckRecord::below(
        "scale_invariance",
        "dX.d'X / F0(X) is invariant under X -> 3.7 X",
        scale.get(),
        1e-13,
    )));
    r.push(tag(CheckRecord::below(
        "metric_dual_path",
        "jets of X and g/(1+t^2) give the same g_F0",
        metric_dp.get(),
        1e-12,
    )));
    r.push(tag(CheckRecord::below(
        "theta_dual_path",
        "-Xbar Z0 dX / F0 = dt/(1+t^2)",
        theta_dp.get(),
        1e-12,
    )));
    r.push(tag(CheckRecord::below(
        "closed_theta",
        "d theta_F0 = 0",
        closed.get(),
        tol.min(1e-9),
    )));
    r.push(tag(CheckRecord::below(
        "parallel_theta",
        "nabla theta_F0 = 0",
        par_theta.get(),
        tol,
    )));
    r.push(tag(CheckRecord::below(
        "parallel_xi",
        "nabla xi = 0",
        par_xi.get(),
        tol,
    )));
    r.push(tag(CheckRecord::below(
        "xi_null",
        "g_F0(xi, xi) = 0",
        null.get(),
        tol,
    )));
    r.push(tag(CheckRecord::below(
        "theta_is_flat_of_xi",
        "g_F0(xi) = theta_F0",
        flat_xi.get(),
        tol,
    )));
    r.push(tag(CheckRecord::below(
        "pushforward_xi",
        "dX(d/ds) = Z0 X",
        push.get(),
        tol,
    )));
    r.push(tag(CheckRecord::above(
        "xi_nonvanishing",
        "Z0 X is nowhere zero",
        min_xi,
        MIN_F0,
    )));
    r.push(tag(CheckRecord::count(
        "cone_kernel_dim",
        "the cone form on {dX : Xbar dX = 0} has a one-dimensional kernel",
        1,
        kernel_dim,
    )));
    r.push(tag(CheckRecord::below(
        "cone_kernel_alignment",
        "the cone-form kernel is spanned by X",
        align.get(),
        tol,
    )));
    r.push(tag(CheckRecord::below(
        "conformal_to_flat",
        "g_F0 is proportional to the flat Bargmann metric",
        off.get(),
        1e-9,
    )));
    r.push(tag(CheckRecord::below(
        "conformal_factor_time_only",
        "the conformal factor of g_F0 depends on t only",
        time_only.get(),
        1e-12,
    )));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representative_is_null() {
        let m = AmbientMetric::new(2).unwrap();
        let x = boundary_representative(2, &[0.3, -0.2, 0.7, 1.1]);
        assert!(m.inner(&x, &x).abs() < 1e-15);
        assert!((f0(&m, &x).unwrap() - (1.0 + 0.49)).abs() < 1e-15);
    }

    #[test]
    fn hand_tangents_match_jets() {
        let p = [0.3, -0.2, 0.7, 1.1];
        let pj = Jet2::seed(&p);
        let xj = boundary_representative_jets(2, &pj);
        let hand = boundary_tangent_jets(2, &Jet2::constants(&p));
        for (a, v) in hand.iter().enumerate() {
            for (i, c) in v.iter().enumerate() {
                assert!((c.value() - xj[i].d(a)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn cone_kernel_at_origin() {
        let m = AmbientMetric::new(3).unwrap();
        let ck = cone_kernel(&m, &m.unit(m.layout().v()), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(ck.nullity, 1);
        assert!(ck.misalignment.unwrap() < 1e-12);
    }

    #[test]
    fn structure_d1_to_d3() {
        for d in 1..=3 {
            let r = boundary_structure(d, 15, 9, 1e-8).unwrap();
            assert!(r.all_pass(), "{r:?}");
        }
    }
}
