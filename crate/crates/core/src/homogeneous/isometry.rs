use crate::ambient::{build_z0, commutant_basis, random_group_element, AmbientMetric};
use crate::error::{Error, Result};
use crate::numkernel::{commutator, DenseMatrix, DenseVector, Jet2, SeededSampler};
use crate::report::{CheckRecord, MaxResidual, VerificationReport};

use super::manifold::{
    bulk_metric, bulk_sampler, chart_of_jets, embedding_jets, theta_hat_form,
    SchrodingerManifoldConfig,
};

/// Image radius window kept when sampling points for a pull-back.
const IMAGE_RADIUS: (f64, f64) = (0.1, 20.0);

/// The chart map p ↦ chart(A·Q(p)) on jets.
pub fn bulk_action_jets(
    cfg: &SchrodingerManifoldConfig,
    a: &DenseMatrix,
    p: &[Jet2],
) -> Result<Vec<Jet2>> {
    let q = embedding_jets(cfg, p)?;
    let aq: Vec<Jet2> = (0..q.len())
        .map(|i| {
            let mut v = Jet2::constant(0.0);
            for (j, qj) in q.iter().enumerate() {
                if a[(i, j)] != 0.0 {
                    v += qj.scale(a[(i, j)]);
                }
            }
            v
        })
        .collect();
    chart_of_jets(cfg, &aq)
}

/// Relative defects of Φ_A*ĝ_{λ,μ} = ĝ_{λ,μ} and Φ_A*θ̂ = θ̂ at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PullbackResidual {
    pub metric: f64,
    pub theta: f64,
}

pub fn pullback_residual(
    cfg: &SchrodingerManifoldConfig,
    a: &DenseMatrix,
    p: &[f64],
) -> Result<PullbackResidual> {
    let n = cfg.dim();
    let img = bulk_action_jets(cfg, a, &Jet2::seed(p))?;
    let y: Vec<f64> = img.iter().map(Jet2::value).collect();
    let jac = DenseMatrix::from_fn(n, n, |i, b| img[i].d(b));
    let metric = bulk_metric(cfg);
    let g = metric.gram_at(p)?;
    let pulled = jac.transpose() * metric.gram_at(&y)? * &jac;
    let theta = theta_hat_form(cfg);
    let th = DenseVector::from_vec(theta.at(p));
    let th_pulled = jac.transpose() * DenseVector::from_vec(theta.at(&y));
    Ok(PullbackResidual {
        metric: (pulled - &g).amax() / g.amax(),
        theta: (th_pulled - &th).amax() / th.amax(),
    })
}

/// Boost e_u ↦ k e_u, e_v ↦ e_v/k: a G-isometry that does not commute with Z₀.
pub fn null_plane_boost(d: usize, k: f64) -> Result<DenseMatrix> {
    let metric = AmbientMetric::new(d)?;
    let l = metric.layout();
    let mut b = DenseMatrix::identity(l.n(), l.n());
    b[(l.u(), l.u())] = k;
    b[(l.v(), l.v())] = 1.0 / k;
    Ok(b)
}

fn image_sampler(cfg: &SchrodingerManifoldConfig, a: &DenseMatrix, seed: u64) -> SeededSampler {
    let (c, a) = (*cfg, a.clone());
    bulk_sampler(cfg, seed).exclude(
        move |p| match bulk_action_jets(&c, &a, &Jet2::constants(p)) {
            Ok(img) => {
                let r = img[c.r()].value().abs();
                !(r >= IMAGE_RADIUS.0 && r <= IMAGE_RADIUS.1)
            }
            Err(_) => true,
        },
    )
}

/// Whether A ∈ O(d+2,2) commutes with Z₀, to 1e-10 relative.
pub fn in_stabilizer(metric: &AmbientMetric, a: &DenseMatrix) -> Result<bool> {
    let z0 = build_z0(metric.d())?.z;
    let scale = a.amax().max(1.0).powi(2);
    Ok(metric.isometry_defect(a) <= 1e-10 * scale && commutator(a, &z0).amax() <= 1e-10 * scale)
}

#[derive(Clone, Copy, Debug, Default)]
struct ActionResiduals {
    ads: MaxResidual,
    z0y: MaxResidual,
    metric: MaxResidual,
    theta: MaxResidual,
    rejected: usize,
}

fn action_residuals(
    cfg: &SchrodingerManifoldConfig,
    a: &DenseMatrix,
    samples: usize,
    seed: u64,
) -> Result<ActionResiduals> {
    let metric = AmbientMetric::new(cfg.d)?;
    let l = metric.layout();
    let z0 = build_z0(cfg.d)?.z;
    let mut sampler = image_sampler(cfg, a, seed);
    let pts = sampler.samples(samples).map_err(|e| match e {
        Error::SamplerExhausted(_) => {
            Error::ChartEscape("the action moves every sample out of the chart".into())
        }
        other => other,
    })?;
    let mut out = ActionResiduals {
        rejected: sampler.rejected(),
        ..Default::default()
    };
    for p in pts {
        let q = DenseVector::from_vec(
            embedding_jets(cfg, &Jet2::constants(&p))?
                .iter()
                .map(Jet2::value)
                .collect(),
        );
        let aq = a * &q;
        out.ads
            .add((metric.inner(&aq, &aq) - 2.0 * cfg.lambda).abs() / aq.amax().max(1.0).powi(2));
        let y = metric.unit(l.u()) * (p[cfg.r()] / cfg.radius());
        out.z0y.add((&z0 * (a * &y)).amax());
        let pr = pullback_residual(cfg, a, &p)?;
        out.metric.add(pr.metric);
        out.theta.add(pr.theta);
    }
    Ok(out)
}

/// Preservation of the quadric, of Z₀Y = 0, of ĝ_{λ,μ} and of θ̂ under Q ↦ AQ.
/// Matrices outside the stabilizer of Z₀ are run as negative controls:
/// θ̂ must then move, and so must ĝ_{λ,μ} when μ ≠ 0.
pub fn isometry_check(
    cfg: &SchrodingerManifoldConfig,
    a: &DenseMatrix,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let metric = AmbientMetric::new(cfg.d)?;
    let stab = in_stabilizer(&metric, a)?;
    let res = action_residuals(cfg, a, samples, seed)?;
    let mut r = VerificationReport::new();
    let tag = |rec: CheckRecord| {
        rec.with_samples(samples, seed)
            .with_rejected(res.rejected)
            .note("stabilizer", stab)
    };
    r.push(tag(CheckRecord::below(
        "ads_preserved",
        "Qbar Q = 2 lambda is preserved",
        res.ads.get(),
        tol,
    )));
    if stab {
        r.push(tag(CheckRecord::below(
            "z0y_preserved",
            "Z0 (A Y) = 0",
            res.z0y.get(),
            tol,
        )));
        r.push(tag(CheckRecord::below(
            "metric_preserved",
            "pull-back of g(lambda, mu) is g(lambda, mu)",
            res.metric.get(),
            tol,
        )));
        r.push(tag(CheckRecord::below(
            "theta_preserved",
            "pull-back of theta is theta",
            res.theta.get(),
            tol,
        )));
    } else {
        r.push(tag(CheckRecord::above(
            "negative_control_theta",
            "a non-stabilizer isometry moves theta",
            res.theta.get(),
            1e-3,
        )));
        if cfg.mu != 0.0 {
            r.push(tag(CheckRecord::above(
                "negative_control_metric",
                "a non-stabilizer isometry does not preserve g(lambda, mu) for mu != 0",
                res.metric.get(),
                1e-3,
            )));
        }
    }
    Ok(r)
}

/// `count` random exponentials of Schrödinger elements and their pairwise
/// products, each checked on `samples` points, with the null-plane boost
/// k = 2 as negative control.
pub fn random_isometries_check(
    cfg: &SchrodingerManifoldConfig,
    count: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let metric = AmbientMetric::new(cfg.d)?;
    let basis = commutant_basis(cfg.d)?;
    let mut rng = SeededSampler::new(seed, Vec::new());
    let mut elements = Vec::with_capacity(count);
    for _ in 0..count {
        elements.push(random_group_element(&metric, &basis, &mut rng, 0.3)?);
    }
    let mut single = MaxResidual::default();
    let mut product = MaxResidual::default();
    let mut rejected = 0;
    for (k, a) in elements.iter().enumerate() {
        let res = action_residuals(cfg, &a.matrix, samples, seed.wrapping_add(k as u64))?;
        single.add_all([
            res.ads.get(),
            res.z0y.get(),
            res.metric.get(),
            res.theta.get(),
        ]);
        rejected += res.rejected;
        let b = &elements[(k + 1) % count];
        let ab = a.compose(&metric, b)?;
        let res = action_residuals(
            cfg,
            &ab.matrix,
            samples,
            seed.wrapping_add((count + k) as u64),
        )?;
        product.add_all([
            res.ads.get(),
            res.z0y.get(),
            res.metric.get(),
            res.theta.get(),
        ]);
        rejected += res.rejected;
    }
    let mut r = VerificationReport::new();
    r.push(
        CheckRecord::below(
            "random_exponentials",
            "exp of random Schrodinger elements preserve g(lambda, mu) and theta",
            single.get(),
            tol,
        )
        .with_samples(samples * count, seed)
        .with_rejected(rejected)
        .note("elements", count),
    );
    r.push(
        CheckRecord::below(
            "products",
            "products of sampled elements remain isometries",
            product.get(),
            1e-7,
        )
        .with_samples(samples * count, seed)
        .note("elements", count),
    );
    r.absorb(
        "boost_k2",
        isometry_check(cfg, &null_plane_boost(cfg.d, 2.0)?, samples, seed, tol)?,
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{assemble_sch, GroupElement, SchParams};

    fn cfg(d: usize, lambda: f64, mu: f64) -> SchrodingerManifoldConfig {
        SchrodingerManifoldConfig::new(d, lambda, mu).unwrap()
    }

    #[test]
    fn identity_is_isometry() {
        let c = cfg(2, -0.5, 1.0);
        let r = isometry_check(&c, &DenseMatrix::identity(6, 6), 5, 1, 1e-12).unwrap();
        assert!(r.all_pass(), "{r:?}");
    }

    #[test]
    fn boost_exponential_is_isometry() {
        let c = cfg(2, -0.7, 1.3);
        let m = AmbientMetric::new(2).unwrap();
        let z = assemble_sch(&m, &SchParams::boost(&[0.4, -0.4])).unwrap();
        let a = GroupElement::exp(&m, &z).unwrap();
        let r = isometry_check(&c, &a.matrix, 20, 2, 1e-8).unwrap();
        assert!(r.all_pass(), "{r:?}");
    }

    #[test]
    fn null_boost_is_negative_control() {
        let c = cfg(1, -0.5, 1.0);
        let b = null_plane_boost(1, 2.0).unwrap();
        let m = AmbientMetric::new(1).unwrap();
        assert!(m.isometry_defect(&b) < 1e-15);
        assert!(!in_stabilizer(&m, &b).unwrap());
        let r = isometry_check(&c, &b, 10, 3, 1e-8).unwrap();
        assert!(r.all_pass(), "{r:?}");
        assert!(r.get("negative_control_metric").unwrap().residual > 0.1);
        // μ = 0: ĝ_λ itself is preserved by every G-isometry
        let p = [0.3, 0.1, -0.2, 1.1];
        assert!(pullback_residual(&c.with_mu(0.0), &b, &p).unwrap().metric < 1e-14);
    }

    #[test]
    fn random_elements() {
        let r = random_isometries_check(&cfg(2, -0.3, 1.7), 4, 5, 11, 1e-8).unwrap();
        assert!(r.all_pass(), "{r:?}");
    }
}
