use crate::ambient::{build_z0, AmbientMetric, Layout};
use crate::error::{Error, Result};
use crate::geometry::{
    exterior_wedge, lie_derivative_metric, Chart, MetricField, OneForm, VectorField,
};
use crate::numkernel::{sym_eigen, DenseMatrix, DenseVector, Jet2, SeededSampler};
use crate::report::{CheckRecord, MaxResidual, VerificationReport};

/// Parameters (d, λ, μ) of the metric family ĝ_{λ,μ} on M̂_λ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchrodingerManifoldConfig {
    pub d: usize,
    pub lambda: f64,
    pub mu: f64,
}

impl SchrodingerManifoldConfig {
    pub fn new(d: usize, lambda: f64, mu: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Contract(
                "spatial dimension must be at least 1".into(),
            ));
        }
        if !(lambda < 0.0) || !lambda.is_finite() {
            return Err(Error::Contract(format!(
                "bulk constructions need lambda < 0, got {lambda}"
            )));
        }
        if !mu.is_finite() {
            return Err(Error::Contract("mu must be finite".into()));
        }
        Ok(Self { d, lambda, mu })
    }

    pub fn with_mu(self, mu: f64) -> Self {
        Self { mu, ..self }
    }

    /// √(−2λ), the AdS radius.
    pub fn radius(&self) -> f64 {
        (-2.0 * self.lambda).sqrt()
    }

    /// Bulk chart dimension d+3.
    pub fn dim(&self) -> usize {
        self.d + 3
    }

    pub fn layout(&self) -> Layout {
        Layout { d: self.d }
    }

    pub(crate) fn t(&self) -> usize {
        self.d
    }

    pub(crate) fn s(&self) -> usize {
        self.d + 1
    }

    pub(crate) fn r(&self) -> usize {
        self.d + 2
    }
}

/// Default sampling box of the bulk chart: x̂, t̂, ŝ ∈ [−1, 1], r̂ ∈ [0.5, 2].
pub fn bulk_sampler(cfg: &SchrodingerManifoldConfig, seed: u64) -> SeededSampler {
    let mut boxes = vec![(-1.0, 1.0); cfg.d + 2];
    boxes.push((0.5, 2.0));
    SeededSampler::new(seed, boxes)
}

/// ĝ_{λ,μ} = (−2λ/r̂²)[Σ dx̂ⁱdx̂ⁱ + 2dt̂dŝ + dr̂² + 2λμ dt̂²/r̂²] on the bulk chart.
pub fn bulk_metric(cfg: &SchrodingerManifoldConfig) -> MetricField {
    let c = *cfg;
    let n = c.dim();
    MetricField::new(Chart::bulk(c.d), (c.d + 2, 1), move |x| {
        let rinv2 = x[c.r()].powi(-2);
        let k = rinv2.scale(-2.0 * c.lambda);
        let mut g = vec![Jet2::constant(0.0); n * n];
        for i in 0..c.d {
            g[i * n + i] = k.clone();
        }
        g[c.t() * n + c.s()] = k.clone();
        g[c.s() * n + c.t()] = k.clone();
        g[c.r() * n + c.r()] = k.clone();
        g[c.t() * n + c.t()] = (&k * &rinv2).scale(2.0 * c.lambda * c.mu);
        g
    })
    .expect("bulk metric is well formed")
}

/// θ̂ = −2λ dt̂ / r̂², i.e. dt/r² with r = r̂/√(−2λ).
pub fn theta_hat_form(cfg: &SchrodingerManifoldConfig) -> OneForm {
    let c = *cfg;
    OneForm::new(c.dim(), move |x| {
        let mut w = vec![Jet2::constant(0.0); c.dim()];
        w[c.t()] = x[c.r()].powi(-2).scale(-2.0 * c.lambda);
        w
    })
}

/// g⁺ = ĝ_{λ,μ} + μ θ̂⊗θ̂.
pub fn poincare_metric(cfg: &SchrodingerManifoldConfig) -> MetricField {
    bulk_metric(cfg).plus_form_square(cfg.mu, theta_hat_form(cfg))
}

/// ξ̂ = ∂/∂ŝ.
pub fn xi_hat_field(cfg: &SchrodingerManifoldConfig) -> VectorField {
    VectorField::coordinate(cfg.dim(), cfg.s())
}

/// Q = (√(−2λ)/r̂)(x̂, −½x̂*x̂ − ½r̂², 1) on jets of the bulk chart.
pub fn embedding_jets(cfg: &SchrodingerManifoldConfig, p: &[Jet2]) -> Result<Vec<Jet2>> {
    let l = cfg.layout();
    let k = p[cfg.r()].try_recip()?.scale(cfg.radius());
    let mut xx = (&p[cfg.t()] * &p[cfg.s()]).scale(2.0);
    for xi in &p[..cfg.d] {
        xx += xi.square();
    }
    let mut q: Vec<Jet2> = p[..l.m()].iter().map(|xi| xi * &k).collect();
    q.push(&(xx + p[cfg.r()].square()).scale(-0.5) * &k);
    q.push(k);
    Ok(q)
}

/// Bulk chart coordinates of an ambient vector: x̂ = Q_{x,t,s}/Q_v, r̂ = √(−2λ)/Q_v.
pub fn chart_of_jets(cfg: &SchrodingerManifoldConfig, q: &[Jet2]) -> Result<Vec<Jet2>> {
    let l = cfg.layout();
    if q[l.v()].value() == 0.0 {
        return Err(Error::ChartEscape("Q_v = 0 has no bulk chart image".into()));
    }
    let inv = q[l.v()].try_recip()?;
    let mut p: Vec<Jet2> = q[..l.m()].iter().map(|qi| qi * &inv).collect();
    p.push(inv.scale(cfg.radius()));
    Ok(p)
}

pub fn chart_of(cfg: &SchrodingerManifoldConfig, q: &DenseVector) -> Result<Vec<f64>> {
    let jets = Jet2::constants(q.as_slice());
    Ok(chart_of_jets(cfg, &jets)?.iter().map(Jet2::value).collect())
}

/// Defects of the defining relations of M̂_λ at an embedded point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EmbeddingResiduals {
    /// |Q̄Q − 2λ|
    pub quadric: f64,
    /// |X̄X|
    pub xx: f64,
    /// |ȲY|
    pub yy: f64,
    /// |X̄Y − 1|
    pub xy: f64,
    /// ‖Z₀Y‖∞
    pub z0y: f64,
    /// ‖X + λY − Q‖∞ relative to ‖Q‖∞
    pub decomposition: f64,
}

impl EmbeddingResiduals {
    pub fn max(&self) -> f64 {
        [
            self.quadric,
            self.xx,
            self.yy,
            self.xy,
            self.z0y,
            self.decomposition,
        ]
        .iter()
        .fold(0.0f64, |m, v| m.max(*v))
    }
}

/// A bulk chart point with its ambient image Q = X + λY.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddedPoint {
    /// (x̂, t̂, ŝ, r̂)
    pub chart: Vec<f64>,
    pub q: DenseVector,
    pub x: DenseVector,
    pub y: DenseVector,
    /// Gauge parameter of the decomposition; the chart uses q = 0.
    pub gauge_q: f64,
    pub residuals: EmbeddingResiduals,
    /// ‖Z₀Q‖∞
    pub z0q_norm: f64,
}

/// Embeds a bulk chart point; X = (1/r)(x̂, −½x̂*x̂, 1), Y = r·e_u.
pub fn embed(cfg: &SchrodingerManifoldConfig, p: &[f64]) -> Result<EmbeddedPoint> {
    if p.len() != cfg.dim() {
        return Err(Error::Dimension(format!(
            "bulk point needs {} coordinates",
            cfg.dim()
        )));
    }
    if p[cfg.r()] == 0.0 {
        return Err(Error::BoundaryPoint);
    }
    let metric = AmbientMetric::new(cfg.d)?;
    let l = cfg.layout();
    let qj = embedding_jets(cfg, &Jet2::constants(p))?;
    let q = DenseVector::from_iterator(l.n(), qj.iter().map(Jet2::value));
    let r = p[cfg.r()] / cfg.radius();
    let x = crate::ambient::ambient_vector(cfg.d, &p[..l.m()], r);
    let y = metric.unit(l.u()) * r;
    let z0 = build_z0(cfg.d)?.z;
    let scale = q.amax().max(1.0).powi(2);
    let residuals = EmbeddingResiduals {
        quadric: (metric.inner(&q, &q) - 2.0 * cfg.lambda).abs() / scale,
        xx: metric.inner(&x, &x).abs() / scale,
        yy: metric.inner(&y, &y).abs(),
        xy: (metric.inner(&x, &y) - 1.0).abs(),
        z0y: (&z0 * &y).amax(),
        decomposition: (&x + &y * cfg.lambda - &q).amax() / q.amax().max(1.0),
    };
    let z0q_norm = (&z0 * &q).amax();
    Ok(EmbeddedPoint {
        chart: p.to_vec(),
        residuals,
        q,
        x,
        y,
        gauge_q: 0.0,
        z0q_norm,
    })
}

/// Jacobian ∂Q/∂(x̂, t̂, ŝ, r̂), one column per chart direction.
pub fn embedding_jacobian(cfg: &SchrodingerManifoldConfig, p: &[f64]) -> Result<DenseMatrix> {
    if p[cfg.r()] == 0.0 {
        return Err(Error::BoundaryPoint);
    }
    let q = embedding_jets(cfg, &Jet2::seed(p))?;
    Ok(DenseMatrix::from_fn(q.len(), cfg.dim(), |i, a| q[i].d(a)))
}

/// A quantity computed along two independent routes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualPath {
    pub ambient: f64,
    pub chart: f64,
}

impl DualPath {
    pub fn difference(&self) -> f64 {
        (self.ambient - self.chart).abs()
    }
}

/// −Q̄Z₀δQ for an ambient tangent δQ.
fn ambient_theta(
    metric: &AmbientMetric,
    z0: &DenseMatrix,
    q: &DenseVector,
    dq: &DenseVector,
) -> f64 {
    -metric.inner(q, &(z0 * dq))
}

/// ĝ_{λ,μ}(δ, δ'): δQ̄δ'Q − μθ̂(δ)θ̂(δ') through the embedding against the
/// chart Gram matrix.
pub fn induced_metric(
    cfg: &SchrodingerManifoldConfig,
    p: &[f64],
    u: &[f64],
    w: &[f64],
) -> Result<DualPath> {
    let metric = AmbientMetric::new(cfg.d)?;
    let z0 = build_z0(cfg.d)?.z;
    let q = embed(cfg, p)?.q;
    let jac = embedding_jacobian(cfg, p)?;
    let du = &jac * DenseVector::from_column_slice(u);
    let dw = &jac * DenseVector::from_column_slice(w);
    let th_u = ambient_theta(&metric, &z0, &q, &du);
    let th_w = ambient_theta(&metric, &z0, &q, &dw);
    let ambient = metric.inner(&du, &dw) - cfg.mu * th_u * th_w;
    let g = bulk_metric(cfg).gram_at(p)?;
    let chart = (DenseVector::from_column_slice(u).transpose()
        * g
        * DenseVector::from_column_slice(w))[(0, 0)];
    Ok(DualPath { ambient, chart })
}

/// θ̂(δ) as −Q̄Z₀δQ and as dt̂(δ)/r².
pub fn theta_hat(cfg: &SchrodingerManifoldConfig, p: &[f64], u: &[f64]) -> Result<DualPath> {
    let metric = AmbientMetric::new(cfg.d)?;
    let z0 = build_z0(cfg.d)?.z;
    let q = embed(cfg, p)?.q;
    let du = embedding_jacobian(cfg, p)? * DenseVector::from_column_slice(u);
    let ambient = ambient_theta(&metric, &z0, &q, &du);
    let r = p[cfg.r()] / cfg.radius();
    Ok(DualPath {
        ambient,
        chart: u[cfg.t()] / (r * r),
    })
}

/// Pointwise data on ξ̂ = Z₀Q.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XiHatConsistency {
    /// ‖Z₀Q − (∂Q/∂ŝ)‖∞
    pub pushforward: f64,
    /// ‖Z₀Q‖∞
    pub norm: f64,
    /// |ĝ_{λ,μ}(ξ̂, ξ̂)|
    pub nullity: f64,
    /// max |L_ξ̂ ĝ_{λ,μ}|
    pub killing: f64,
}

pub fn xi_hat_consistency(cfg: &SchrodingerManifoldConfig, p: &[f64]) -> Result<XiHatConsistency> {
    let e = embed(cfg, p)?;
    let z0 = build_z0(cfg.d)?.z;
    let zq = &z0 * &e.q;
    let jac = embedding_jacobian(cfg, p)?;
    let pushforward = (&zq - jac.column(cfg.s())).amax();
    let metric = bulk_metric(cfg);
    let g = metric.gram_at(p)?;
    let xi = xi_hat_field(cfg);
    let v = DenseVector::from_vec(xi.at(p));
    let nullity = (v.transpose() * g * &v)[(0, 0)].abs();
    let killing = lie_derivative_metric(&metric, &xi, p)?.amax();
    Ok(XiHatConsistency {
        pushforward,
        norm: zq.amax(),
        nullity,
        killing,
    })
}

/// Chart Gram of (1/r²)[Σdxⁱ² + 2dtds + dr² − dt²/r²] on (x, t, s, r).
pub fn bs_gram(d: usize, p: &[f64]) -> DenseMatrix {
    let n = d + 3;
    let r = p[d + 2];
    let k = 1.0 / (r * r);
    let mut g = DenseMatrix::zeros(n, n);
    for i in 0..d {
        g[(i, i)] = k;
    }
    g[(d, d + 1)] = k;
    g[(d + 1, d)] = k;
    g[(d + 2, d + 2)] = k;
    g[(d, d)] = -k * k;
    g
}

fn random_tangent(sampler: &mut SeededSampler, n: usize) -> Vec<f64> {
    sampler.uniform_vec(n, -1.0, 1.0)
}

/// Embedding invariants, round trip, and dual-path agreement of ĝ_{λ,μ} and θ̂.
pub fn dual_path_check(
    cfg: &SchrodingerManifoldConfig,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let mut sampler = bulk_sampler(cfg, seed);
    let mut emb = MaxResidual::default();
    let mut round = MaxResidual::default();
    let mut metric_res = MaxResidual::default();
    let mut theta_res = MaxResidual::default();
    let mut min_z0q = f64::INFINITY;
    for p in sampler.samples(samples)? {
        let e = embed(cfg, &p)?;
        emb.add(e.residuals.max());
        min_z0q = min_z0q.min(e.z0q_norm);
        let back = chart_of(cfg, &e.q)?;
        round.add_all(back.iter().zip(&p).map(|(a, b)| (a - b).abs()));
        let u = random_tangent(&mut sampler, cfg.dim());
        let w = random_tangent(&mut sampler, cfg.dim());
        let gp = induced_metric(cfg, &p, &u, &w)?;
        metric_res.add(gp.difference());
        theta_res.add(theta_hat(cfg, &p, &u)?.difference());
    }
    let mut r = VerificationReport::new();
    let with = |rec: CheckRecord| rec.with_samples(samples, seed);
    r.push(with(CheckRecord::below(
        "embedding_constraints",
        "QbarQ = 2 lambda, XbarX = YbarY = 0, XbarY = 1, Z0 Y = 0",
        emb.get(),
        1e-12,
    )));
    r.push(with(CheckRecord::below(
        "embedding_round_trip",
        "chart -> Q -> chart is the identity",
        round.get(),
        1e-12,
    )));
    r.push(with(CheckRecord::above(
        "z0q_nonvanishing",
        "min |Z0 Q| > 1e-6",
        min_z0q,
        1e-6,
    )));
    r.push(with(CheckRecord::below(
        "metric_dual_path",
        "dQbar d'Q - mu theta(d) theta(d') equals the chart Gram form",
        metric_res.get(),
        tol,
    )));
    r.push(with(CheckRecord::below(
        "theta_dual_path",
        "-Qbar Z0 dQ equals dt/r^2",
        theta_res.get(),
        tol,
    )));
    Ok(r)
}

/// ξ̂ = Z₀Q = ∂/∂ŝ, nowhere zero, null and Killing at sampled points.
pub fn xi_hat_check(
    cfg: &SchrodingerManifoldConfig,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let mut sampler = bulk_sampler(cfg, seed);
    let mut push = MaxResidual::default();
    let mut null = MaxResidual::default();
    let mut kill = MaxResidual::default();
    let mut min_norm = f64::INFINITY;
    for p in sampler.samples(samples)? {
        let x = xi_hat_consistency(cfg, &p)?;
        push.add(x.pushforward);
        null.add(x.nullity);
        kill.add(x.killing);
        min_norm = min_norm.min(x.norm);
    }
    let mut r = VerificationReport::new();
    for rec in [
        CheckRecord::below(
            "xi_hat_pushforward",
            "Z0 Q is the image of d/ds",
            push.get(),
            tol,
        ),
        CheckRecord::above("xi_hat_nonvanishing", "min |Z0 Q| > 1e-6", min_norm, 1e-6),
        CheckRecord::below("xi_hat_null", "g(xi, xi) = 0", null.get(), tol),
        CheckRecord::below("xi_hat_killing", "L_xi g = 0", kill.get(), tol),
    ] {
        r.push(rec.with_samples(samples, seed));
    }
    Ok(r)
}

/// Exactly one negative eigenvalue of ĝ_{λ,μ} at every sample.
pub fn signature_check(
    cfg: &SchrodingerManifoldConfig,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let mut sampler = bulk_sampler(cfg, seed);
    let metric = bulk_metric(cfg);
    // negative-eigenvalue count at the first offending sample, 1 if none;
    // a numerically zero eigenvalue counts as offending
    let mut observed = 1usize;
    for p in sampler.samples(samples)? {
        let ev = sym_eigen(&metric.gram_at(&p)?)?;
        let scale = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let neg = ev.iter().filter(|v| **v < -1e-12 * scale).count();
        let zero = ev.iter().any(|v| v.abs() <= 1e-12 * scale);
        if neg != 1 || zero {
            observed = if zero { 0 } else { neg };
            break;
        }
    }
    let mut r = VerificationReport::new();
    r.push(
        CheckRecord::count(
            "lorentz_signature",
            "exactly one negative eigenvalue",
            1,
            observed,
        )
        .with_samples(samples, seed),
    );
    Ok(r)
}

/// θ̂∧dθ̂ = 0 at sampled points.
pub fn integrability_check(
    cfg: &SchrodingerManifoldConfig,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let mut sampler = bulk_sampler(cfg, seed);
    let theta = theta_hat_form(cfg);
    let mut res = MaxResidual::default();
    for p in sampler.samples(samples)? {
        res.add(exterior_wedge(&theta, &p).wedge_max_abs());
    }
    let mut r = VerificationReport::new();
    r.push(
        CheckRecord::below("theta_integrable", "theta ^ d theta = 0", res.get(), tol)
            .with_samples(samples, seed),
    );
    Ok(r)
}

/// The chart Gram of ĝ_{−½,1} against the closed-form metric on (x, t, s, r).
pub fn bs_recovery_check(
    d: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let cfg = SchrodingerManifoldConfig::new(d, -0.5, 1.0)?;
    let metric = bulk_metric(&cfg);
    let mut sampler = bulk_sampler(&cfg, seed);
    let mut res = MaxResidual::default();
    for p in sampler.samples(samples)? {
        res.add((metric.gram_at(&p)? - bs_gram(d, &p)).amax());
    }
    let mut r = VerificationReport::new();
    r.push(
        CheckRecord::below(
            "bs_metric_recovery",
            "g(-1/2, 1) = (1/r^2)[dx^2 + 2 dt ds + dr^2 - dt^2/r^2]",
            res.get(),
            tol,
        )
        .with_samples(samples, seed),
    );
    Ok(r)
}
