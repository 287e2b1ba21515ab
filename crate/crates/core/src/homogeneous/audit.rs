use crate::error::Result;
use crate::geometry::invert_metric;
use crate::numkernel::{DenseMatrix, Jet2};
use crate::report::{CheckRecord, MaxResidual, VerificationReport};

use super::einstein::{einstein_factor, einstein_residual};
use super::manifold::{
    bulk_metric, bulk_sampler, embedding_jets, poincare_metric, SchrodingerManifoldConfig,
};

pub const AUDIT_SAMPLES: usize = 10;
pub const AUDIT_SEED: u64 = 42;
/// The two radii of the decay test; their squared ratio is 100.
pub const DECAY_RADII: (f64, f64) = (1e-2, 1e-3);
pub const DECAY_WINDOW: (f64, f64) = (80.0, 120.0);

/// Boundary chart image (Q_x, Q_t, Q_s)/Q_v of a bulk point, on jets.
fn boundary_projection(cfg: &SchrodingerManifoldConfig, p: &[Jet2]) -> Result<Vec<Jet2>> {
    let l = cfg.layout();
    let q = embedding_jets(cfg, p)?;
    let inv = q[l.v()].try_recip()?;
    Ok(q[..l.m()].iter().map(|c| c * &inv).collect())
}

/// ‖ĝ^{-1} − μ ∂ŝ⊗∂ŝ‖ at the chart point `p` with r̂ replaced by `rhat`.
fn inverse_remainder(cfg: &SchrodingerManifoldConfig, p: &[f64], rhat: f64) -> Result<f64> {
    let mut q = p.to_vec();
    q[cfg.r()] = rhat;
    let mut inv = invert_metric(&bulk_metric(cfg).gram_at(&q)?)?;
    inv[(cfg.s(), cfg.s())] -= cfg.mu;
    Ok(inv.amax())
}

/// The three axioms of a Schrödinger manifold checked on M̂_λ with
/// g⁺ = ĝ_{λ,μ} + μθ̂⊗θ̂ and ξ̂ = ∂/∂ŝ. Every record carries the axiom it
/// belongs to; all pass exactly when λ = −½ and μ = 1.
pub fn schrodinger_axiom_audit(
    cfg: &SchrodingerManifoldConfig,
    tol: f64,
) -> Result<VerificationReport> {
    schrodinger_axiom_audit_with(cfg, AUDIT_SAMPLES, AUDIT_SEED, tol)
}

pub fn schrodinger_axiom_audit_with(
    cfg: &SchrodingerManifoldConfig,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let n = cfg.dim();
    let m = cfg.d + 2;
    let pts = bulk_sampler(cfg, seed).samples(samples)?;
    let gplus = poincare_metric(cfg);
    let g_lambda0 = bulk_metric(&cfg.with_mu(0.0));

    let mut extends = MaxResidual::default();
    let mut ratio_dev = MaxResidual::default();
    let mut ratio_seen = 0.0;
    let mut gplus_id = MaxResidual::default();
    let mut einstein = MaxResidual::default();
    let mut observed_factor = 0.0;
    let mut conformal = MaxResidual::default();
    let mut conformal_factor = 0.0;
    let mut defining = f64::INFINITY;

    for p in &pts {
        let proj = boundary_projection(cfg, &Jet2::seed(p))?;
        for (a, c) in proj.iter().enumerate() {
            let want = if a == cfg.s() { 1.0 } else { 0.0 };
            extends.add((c.d(cfg.s()) - want).abs());
        }

        let ratio =
            inverse_remainder(cfg, p, DECAY_RADII.0)? / inverse_remainder(cfg, p, DECAY_RADII.1)?;
        let dev = (ratio - 100.0).abs();
        if dev >= ratio_dev.get() {
            ratio_seen = ratio;
        }
        ratio_dev.add(dev);

        let a = gplus.gram_at(p)?;
        let b = g_lambda0.gram_at(p)?;
        gplus_id.add((&a - &b).amax() / b.amax());

        let e = einstein_residual(cfg, p)?;
        einstein.add(e.residual.amax());
        observed_factor = (invert_metric(&a)? * &e.residual).trace() / n as f64;

        let mut q = p.clone();
        q[cfg.r()] = DECAY_RADII.1;
        let rescaled = gplus.gram_at(&q)? * (DECAY_RADII.1 * DECAY_RADII.1);
        let tangential = rescaled.view((0, 0), (m, m)).into_owned();
        let flat = DenseMatrix::from_fn(m, m, |i, j| {
            if (i < cfg.d && i == j) || (i, j) == (cfg.t(), cfg.s()) || (i, j) == (cfg.s(), cfg.t())
            {
                1.0
            } else {
                0.0
            }
        });
        conformal_factor = tangential.component_mul(&flat).sum() / flat.component_mul(&flat).sum();
        conformal.add((&tangential - &flat * conformal_factor).amax() / tangential.amax());

        // r̂ > 0 inside and |dr̂|² = (r̂²g⁺)^{r̂r̂} > 0
        let grad = invert_metric(&(a * (p[cfg.r()] * p[cfg.r()])))?[(cfg.r(), cfg.r())];
        defining = defining.min(p[cfg.r()].min(grad));
    }

    let predicted = einstein_factor(cfg.d, cfg.lambda);
    let mut r = VerificationReport::new();
    let tag = |rec: CheckRecord, axiom: usize| rec.with_samples(samples, seed).note("axiom", axiom);
    r.push(tag(
        CheckRecord::below(
            "axiom1_xi_extends",
            "d/d(s hat) projects to d/ds on the boundary chart",
            extends.get(),
            tol,
        ),
        1,
    ));
    r.push(
        tag(
            CheckRecord::below(
                "axiom2_inverse_decay_ratio",
                "g^-1 - mu xi xi decays as r^2 between r = 1e-2 and 1e-3",
                ratio_dev.get(),
                DECAY_WINDOW.1 - 100.0,
            ),
            2,
        )
        .with_values(100.0, ratio_seen),
    );
    r.push(tag(
        CheckRecord::below("axiom2_normalization", "mu = 1", (cfg.mu - 1.0).abs(), 0.0)
            .with_values(1.0, cfg.mu),
        2,
    ));
    r.push(tag(
        CheckRecord::below(
            "axiom3_gplus_identity",
            "g + mu theta theta = g(lambda, 0)",
            gplus_id.get(),
            1e-12,
        ),
        3,
    ));
    r.push(tag(
        CheckRecord::below(
            "axiom3_einstein",
            "Ric(g+) + (d+2) g+ = 0",
            einstein.get(),
            tol,
        )
        .with_values(predicted, observed_factor)
        .note("predicted_factor", predicted),
        3,
    ));
    r.push(tag(
        CheckRecord::below(
            "conformal_infinity",
            "r^2 g+ restricted to the boundary directions at r = 1e-3 is proportional to the flat Bargmann metric",
            conformal.get(),
            tol,
        )
        .note("factor", format!("{conformal_factor:.12}")),
        3,
    ));
    r.push(tag(
        CheckRecord::above(
            "defining_function",
            "r > 0 inside and |dr|^2 > 0 for r^2 g+",
            defining,
            0.0,
        ),
        3,
    ));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(d: usize, lambda: f64, mu: f64) -> SchrodingerManifoldConfig {
        SchrodingerManifoldConfig::new(d, lambda, mu).unwrap()
    }

    #[test]
    fn passes_at_half_and_one() {
        let r = schrodinger_axiom_audit(&cfg(3, -0.5, 1.0), 1e-8).unwrap();
        assert!(r.all_pass(), "{r:?}");
    }

    #[test]
    fn lambda_minus_one_fails_axiom3_only() {
        let r = schrodinger_axiom_audit(&cfg(3, -1.0, 1.0), 1e-8).unwrap();
        let e = r.get("axiom3_einstein").unwrap();
        assert!(!e.passed());
        assert_eq!(e.expected, Some(2.5));
        assert!((e.observed.unwrap() - 2.5).abs() < 1e-8);
        assert!(r.get("axiom1_xi_extends").unwrap().passed());
        assert!(r.get("axiom2_normalization").unwrap().passed());
    }

    #[test]
    fn mu_two_flags_normalization() {
        let r = schrodinger_axiom_audit(&cfg(3, -0.5, 2.0), 1e-8).unwrap();
        let failing: Vec<_> = r
            .records
            .iter()
            .filter(|c| !c.passed())
            .map(|c| c.name.as_str())
            .collect();
        assert_eq!(failing, ["axiom2_normalization"]);
        let ratio = r
            .get("axiom2_inverse_decay_ratio")
            .unwrap()
            .observed
            .unwrap();
        assert!((80.0..=120.0).contains(&ratio), "{ratio}");
    }
}
