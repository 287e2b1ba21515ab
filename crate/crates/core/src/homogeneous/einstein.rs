use crate::error::Result;
use crate::geometry::ricci_scalar;
use crate::numkernel::DenseMatrix;
use crate::report::{CheckRecord, MaxResidual, VerificationReport};

use super::manifold::{
    bulk_metric, bulk_sampler, poincare_metric, theta_hat_form, SchrodingerManifoldConfig,
};

/// (d+2)(1+2λ)/(2λ): the multiple of g⁺ that Ric(g⁺) + (d+2)g⁺ equals.
pub fn einstein_factor(d: usize, lambda: f64) -> f64 {
    (d as f64 + 2.0) * (1.0 + 2.0 * lambda) / (2.0 * lambda)
}

/// Λ = (d+1)(d+2)/(4λ).
pub fn cosmological_constant(d: usize, lambda: f64) -> f64 {
    (d as f64 + 1.0) * (d as f64 + 2.0) / (4.0 * lambda)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EinsteinResidual {
    /// Ric(g⁺) + (d+2)g⁺
    pub residual: DenseMatrix,
    /// einstein_factor·g⁺
    pub predicted: DenseMatrix,
    pub factor: f64,
}

/// Ric(g⁺) + (d+2)g⁺ at `p` for g⁺ = ĝ_{λ,μ} + μθ̂⊗θ̂, which is ĝ_{λ,0}
/// whatever μ is.
pub fn einstein_residual(cfg: &SchrodingerManifoldConfig, p: &[f64]) -> Result<EinsteinResidual> {
    let gp = poincare_metric(cfg);
    let g = gp.gram_at(p)?;
    let (ric, _) = ricci_scalar(&gp, p)?;
    let n = cfg.d as f64 + 2.0;
    let factor = einstein_factor(cfg.d, cfg.lambda);
    Ok(EinsteinResidual {
        residual: ric + &g * n,
        predicted: g * factor,
        factor,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NullFluidResidual {
    /// Ric(ĝ) − ((d+2)/(2λ))ĝ + μ(d+4)/(2λ)·θ̂⊗θ̂
    pub residual: DenseMatrix,
    pub cosmological_constant: f64,
}

pub fn nullfluid_residual(cfg: &SchrodingerManifoldConfig, p: &[f64]) -> Result<NullFluidResidual> {
    let metric = bulk_metric(cfg);
    let g = metric.gram_at(p)?;
    let (ric, _) = ricci_scalar(&metric, p)?;
    let th = theta_hat_form(cfg).at(p);
    let n = cfg.dim();
    let (d, l) = (cfg.d as f64, cfg.lambda);
    let tt = DenseMatrix::from_fn(n, n, |a, b| th[a] * th[b]);
    Ok(NullFluidResidual {
        residual: ric - g * ((d + 2.0) / (2.0 * l)) + tt * (cfg.mu * (d + 4.0) / (2.0 * l)),
        cosmological_constant: cosmological_constant(cfg.d, cfg.lambda),
    })
}

/// Einstein normalization at sampled points: the residual of
/// Ric(g⁺)+(d+2)g⁺ against its predicted multiple of g⁺, and whether it
/// vanishes exactly when λ = −½.
pub fn einstein_check(
    cfg: &SchrodingerManifoldConfig,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let mut sampler = bulk_sampler(cfg, seed);
    let mut pred = MaxResidual::default();
    let mut raw = MaxResidual::default();
    let mut factor = 0.0;
    for p in sampler.samples(samples)? {
        let e = einstein_residual(cfg, &p)?;
        pred.add((&e.residual - &e.predicted).amax());
        raw.add(e.residual.amax());
        factor = e.factor;
    }
    let vanishes = raw.get() <= tol;
    let expected_vanishing = cfg.lambda == -0.5;
    let mut r = VerificationReport::new();
    r.push(
        CheckRecord::below(
            "einstein_prediction",
            "Ric(g+) + (d+2) g+ = ((d+2)(1+2 lambda)/(2 lambda)) g+",
            pred.get(),
            tol,
        )
        .with_samples(samples, seed)
        .note("factor", factor),
    );
    r.push(
        CheckRecord::below(
            "einstein_vanishing",
            "Ric(g+) + (d+2) g+ vanishes iff lambda = -1/2",
            if vanishes == expected_vanishing {
                0.0
            } else {
                raw.get()
            },
            if expected_vanishing { tol } else { 0.0 },
        )
        .with_samples(samples, seed)
        .note("max_residual", format!("{:.3e}", raw.get()))
        .note("vanishes", vanishes),
    );
    Ok(r)
}

/// Null-fluid form of the field equations at sampled points.
pub fn nullfluid_check(
    cfg: &SchrodingerManifoldConfig,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let mut sampler = bulk_sampler(cfg, seed);
    let mut res = MaxResidual::default();
    for p in sampler.samples(samples)? {
        res.add(nullfluid_residual(cfg, &p)?.residual.amax());
    }
    let mut r = VerificationReport::new();
    r.push(
        CheckRecord::below(
            "nullfluid",
            "Ric(g) - ((d+2)/(2 lambda)) g + mu (d+4)/(2 lambda) theta theta = 0",
            res.get(),
            tol,
        )
        .with_samples(samples, seed)
        .note(
            "cosmological_constant",
            cosmological_constant(cfg.d, cfg.lambda),
        ),
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(d: usize, lambda: f64, mu: f64) -> SchrodingerManifoldConfig {
        SchrodingerManifoldConfig::new(d, lambda, mu).unwrap()
    }

    #[test]
    fn factors() {
        assert_eq!(einstein_factor(3, -1.0), 2.5);
        assert_eq!(einstein_factor(3, -0.5), 0.0);
        assert_eq!(cosmological_constant(3, -0.5), -10.0);
    }

    #[test]
    fn einstein_at_half_and_minus_one() {
        let p = [0.2, -0.4, 0.1, 0.3, 0.9];
        let e = einstein_residual(&cfg(2, -0.5, 1.0), &p).unwrap();
        assert!(e.residual.amax() < 1e-10);
        let e = einstein_residual(&cfg(3, -1.0, 0.0), &[0.2, -0.4, 0.1, 0.3, 0.5, 1.3]).unwrap();
        assert!((&e.residual - &e.predicted).amax() < 1e-10);
        assert!(e.residual.amax() > 0.1);
    }

    #[test]
    fn nullfluid_d3() {
        let c = cfg(3, -0.5, 1.0);
        let p = [0.2, -0.4, 0.1, 0.3, 0.5, 1.3];
        let nf = nullfluid_residual(&c, &p).unwrap();
        assert!(nf.residual.amax() < 1e-9, "{}", nf.residual);
        assert_eq!(nf.cosmological_constant, -10.0);
        // Ric + 5 g = 7 θ⊗θ
        let metric = bulk_metric(&c);
        let (ric, _) = ricci_scalar(&metric, &p).unwrap();
        let th = theta_hat_form(&c).at(&p);
        let lhs = ric + metric.gram_at(&p).unwrap() * 5.0;
        assert!((lhs[(3, 3)] - 7.0 * th[3] * th[3]).abs() < 1e-9);
    }

    #[test]
    fn checks_pass_on_grid() {
        for (d, l, m) in [(1, -0.5, 1.0), (2, -0.3, 1.7), (3, -2.0, -1.0)] {
            let c = cfg(d, l, m);
            assert!(einstein_check(&c, 5, 1, 1e-8).unwrap().all_pass());
            assert!(nullfluid_check(&c, 5, 1, 1e-8).unwrap().all_pass());
        }
    }
}
