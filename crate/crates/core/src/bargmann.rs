//! Bargmann structures, the covariant Schrödinger operator on densities and
//! the transport of solutions by Schrödinger transformations.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{
    covariant_derivative_vector, divergence, exterior_wedge, yamabe_residual, yamabe_weight,
    ComplexField, JetMap, JetScalarFn, MetricField, OneForm, ScalarField, VectorField,
};
use crate::numkernel::{DenseMatrix, Jet2, SeededSampler};
use crate::report::{CheckRecord, MaxResidual, VerificationReport};

/// Half-width of the default sampling box of Bargmann charts.
pub const BOX: f64 = 1.0;

/// Metric g, null vector field ξ and clock θ = g(ξ) on a (d+2)-dimensional chart.
#[derive(Clone, Debug)]
pub struct BargmannStructure {
    metric: MetricField,
    xi: VectorField,
    theta: OneForm,
    d: usize,
}

impl BargmannStructure {
    pub fn new(metric: MetricField, xi: VectorField, d: usize) -> Result<Self> {
        if d == 0 || metric.dim() != d + 2 || xi.dim() != d + 2 {
            return Err(Error::Dimension(format!(
                "Bargmann structure with d = {d} needs fields of dimension {}",
                d + 2
            )));
        }
        let theta = xi.lower(&metric);
        Ok(Self {
            metric,
            xi,
            theta,
            d,
        })
    }

    /// Σ dxⁱdxⁱ + 2 dt ds with ξ = ∂_s, θ = dt.
    pub fn flat(d: usize) -> Self {
        let n = d + 2;
        Self::new(
            MetricField::flat_bargmann(d),
            VectorField::coordinate(n, d + 1),
            d,
        )
        .expect("flat structure is well formed")
    }

    /// Same ξ, metric rescaled to Ω²g.
    pub fn conformal(&self, omega: ScalarField) -> Self {
        Self::new(self.metric.conformal(omega), self.xi.clone(), self.d)
            .expect("dimensions unchanged")
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn xi(&self) -> &VectorField {
        &self.xi
    }

    pub fn theta(&self) -> &OneForm {
        &self.theta
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.d + 2
    }

    fn sampler(&self, seed: u64) -> SeededSampler {
        let chart = self.metric.chart().clone();
        SeededSampler::cube(seed, self.dim(), -BOX, BOX).exclude(move |p| chart.is_singular(p))
    }
}

/// Weight d/(2d+4) of the densities the Schrödinger equation acts on.
pub fn schrodinger_weight(d: usize) -> f64 {
    yamabe_weight(d + 2)
}

/// The other weight (d+4)/(2d+4) of the intertwined pair.
pub fn dual_weight(d: usize) -> f64 {
    (d as f64 + 4.0) / (2.0 * d as f64 + 4.0)
}

/// Complex coefficient of a density together with its weight.
#[derive(Clone, Debug)]
pub struct DensityFunction {
    pub coefficient: ComplexField,
    pub weight: f64,
}

impl DensityFunction {
    pub fn new(coefficient: ComplexField, weight: f64) -> Self {
        Self {
            coefficient,
            weight,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchrodingerParams {
    pub mass: f64,
    pub hbar: f64,
}

impl Default for SchrodingerParams {
    fn default() -> Self {
        Self {
            mass: 1.0,
            hbar: 1.0,
        }
    }
}

impl SchrodingerParams {
    pub fn new(mass: f64, hbar: f64) -> Result<Self> {
        if !(mass > 0.0 && hbar > 0.0) {
            return Err(Error::Contract(format!(
                "mass and hbar must be positive, got {mass}, {hbar}"
            )));
        }
        Ok(Self { mass, hbar })
    }

    /// m/ħ, the eigenvalue of −i∂_s on solutions.
    pub fn ratio(&self) -> f64 {
        self.mass / self.hbar
    }
}

/// exp(i(k·x − ωt + M s)) on the chart x1..xd, t, s.
pub fn plane_wave_phase(k: &[f64], omega: f64, m_ratio: f64) -> ComplexField {
    let k = k.to_vec();
    let d = k.len();
    ComplexField::phase(ScalarField::new(move |x| {
        let mut ph = x[d].scale(-omega) + x[d + 1].scale(m_ratio);
        for (i, ki) in k.iter().enumerate() {
            ph += x[i].scale(*ki);
        }
        ph
    }))
}

/// Plane-wave solution with the free dispersion ω = |k|²/(2M).
pub fn plane_wave(k: &[f64], sp: &SchrodingerParams) -> ComplexField {
    let m = sp.ratio();
    let k2: f64 = k.iter().map(|v| v * v).sum();
    plane_wave_phase(k, k2 / (2.0 * m), m)
}

fn complex_of(re: &Jet2, im: &Jet2) -> Complex64 {
    Complex64::new(re.value(), im.value())
}

fn jet_derivative(x: &[f64], f: &Jet2) -> f64 {
    x.iter().enumerate().map(|(a, xa)| xa * f.d(a)).sum()
}

/// X(f) + w·Div(X)·f, with Div taken against the metric volume.
pub fn density_lie_derivative(
    metric: &MetricField,
    x: &VectorField,
    psi: &DensityFunction,
    p: &[f64],
) -> Result<Complex64> {
    let xv = x.at(p);
    let (re, im) = psi.coefficient.eval(&Jet2::seed(p));
    let dir = Complex64::new(jet_derivative(&xv, &re), jet_derivative(&xv, &im));
    let div = if psi.weight == 0.0 {
        0.0
    } else {
        divergence(metric, x, p)?
    };
    Ok(dir + complex_of(&re, &im) * (psi.weight * div))
}

/// Residuals of the pair Δ^conf Ψ = 0 and (ħ/i)L_ξ Ψ = mΨ at `p`.
pub fn schrodinger_residual(
    b: &BargmannStructure,
    psi: &DensityFunction,
    sp: &SchrodingerParams,
    p: &[f64],
) -> Result<(Complex64, Complex64)> {
    let w = schrodinger_weight(b.d);
    if (psi.weight - w).abs() > 1e-12 {
        return Err(Error::Contract(format!(
            "Schrödinger densities carry weight {w}, got {}",
            psi.weight
        )));
    }
    let r1 = Complex64::new(
        yamabe_residual(&b.metric, &psi.coefficient.re(), p)?,
        yamabe_residual(&b.metric, &psi.coefficient.im(), p)?,
    );
    let lie = density_lie_derivative(&b.metric, &b.xi, psi, p)?;
    let f = psi.coefficient.at(p);
    let r2 = lie * Complex64::new(0.0, -sp.hbar) - f * sp.mass;
    Ok((r1, r2))
}

/// Samples admissible points, evaluating `f` at each; points where `f`
/// reports a chart or metric failure are rejected and replaced.
fn for_samples(
    sampler: &mut SeededSampler,
    samples: usize,
    mut f: impl FnMut(&[f64]) -> Result<()>,
) -> Result<usize> {
    let mut done = 0;
    let mut rejected = 0;
    while done < samples {
        let p = sampler.sample()?;
        match f(&p) {
            Ok(()) => done += 1,
            Err(Error::SingularLocus | Error::DegenerateMetric | Error::ChartEscape(_)) => {
                rejected += 1;
                if rejected > 100 * samples.max(1) {
                    return Err(Error::SamplerExhausted(rejected));
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(rejected + sampler.rejected())
}

/// Nullity of ξ, ∇ξ = 0, dθ = 0 and Div ξ = 0 at seeded samples.
pub fn bargmann_axioms_check(
    b: &BargmannStructure,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let mut null = MaxResidual::default();
    let mut parallel = MaxResidual::default();
    let mut closed = MaxResidual::default();
    let mut div = MaxResidual::default();
    let mut sampler = b.sampler(seed);
    let n = b.dim();
    let rejected = for_samples(&mut sampler, samples, |p| {
        let g = b.metric.gram_at(p)?;
        let xi = DenseMatrix::from_column_slice(n, 1, &b.xi.at(p));
        let nabla = covariant_derivative_vector(&b.metric, &b.xi, p)?;
        let dv = divergence(&b.metric, &b.xi, p)?;
        null.add((xi.transpose() * g * &xi)[(0, 0)]);
        parallel.add(nabla.amax());
        closed.add(exterior_wedge(&b.theta, p).d_omega.amax());
        div.add(dv);
        Ok(())
    })?;
    let mut r = VerificationReport::new();
    for (name, claim, m) in [
        ("null_xi", "g(xi, xi) = 0", null),
        ("parallel_xi", "nabla xi = 0", parallel),
        ("closed_theta", "d theta = 0", closed),
        ("divergence_free_xi", "Div xi = 0", div),
    ] {
        r.push(
            CheckRecord::below(name, claim, m.get(), tol)
                .with_samples(samples, seed)
                .with_rejected(rejected),
        );
    }
    Ok(r)
}

/// Whether Ω²g is Bargmann-equivalent to g, i.e. dΩ∧θ = 0 at every sample.
pub fn conformal_equivalence_check(
    omega: &ScalarField,
    b: &BargmannStructure,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<(bool, VerificationReport)> {
    let mut wedge = MaxResidual::default();
    let mut sampler = b.sampler(seed);
    let n = b.dim();
    let rejected = for_samples(&mut sampler, samples, |p| {
        let o = omega.jet_at(p);
        if !(o.value() > 0.0) {
            return Err(Error::Contract(format!(
                "conformal factor must be positive, got {}",
                o.value()
            )));
        }
        let th = b.theta.at(p);
        let mut norm = 0.0;
        for a in 0..n {
            for c in 0..n {
                let w = o.d(a) * th[c] - o.d(c) * th[a];
                norm += w * w;
            }
        }
        wedge.add(norm.sqrt());
        Ok(())
    })?;
    let rec = CheckRecord::below(
        "d_omega_wedge_theta",
        "d Omega ^ theta = 0",
        wedge.get(),
        tol,
    )
    .with_samples(samples, seed)
    .with_rejected(rejected);
    let ok = rec.passed();
    let mut r = VerificationReport::new();
    r.push(rec);
    Ok((ok, r))
}

/// Invertible chart transformation, evaluable on jets, with the absolute
/// Jacobian determinant of its inverse.
#[derive(Clone)]
pub struct ChartMap {
    dim: usize,
    forward: JetMap,
    inverse: JetMap,
    inverse_jacobian: JetScalarFn,
    inverse_domain: Arc<dyn Fn(&[f64]) -> Result<()> + Send + Sync>,
}

impl std::fmt::Debug for ChartMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ChartMap(dim={})", self.dim)
    }
}

impl ChartMap {
    pub fn new(
        dim: usize,
        forward: impl Fn(&[Jet2]) -> Vec<Jet2> + Send + Sync + 'static,
        inverse: impl Fn(&[Jet2]) -> Vec<Jet2> + Send + Sync + 'static,
        inverse_jacobian: impl Fn(&[Jet2]) -> Jet2 + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
            inverse_jacobian: Arc::new(inverse_jacobian),
            inverse_domain: Arc::new(|_| Ok(())),
        }
    }

    /// Restricts where the inverse may be evaluated; the predicate reports
    /// a chart escape for inadmissible points.
    pub fn with_inverse_domain(
        mut self,
        check: impl Fn(&[f64]) -> Result<()> + Send + Sync + 'static,
    ) -> Self {
        self.inverse_domain = Arc::new(check);
        self
    }

    /// x ↦ x + δ.
    pub fn translation(delta: Vec<f64>) -> Self {
        let n = delta.len();
        let back = delta.clone();
        Self::new(
            n,
            move |x| x.iter().zip(&delta).map(|(a, b)| a + *b).collect(),
            move |y| y.iter().zip(&back).map(|(a, b)| a - *b).collect(),
            |_| Jet2::constant(1.0),
        )
    }

    /// (x, t, s) ↦ (e^χ x, e^{2χ} t, s).
    pub fn dilation(d: usize, chi: f64) -> Self {
        let n = d + 2;
        let scale = move |x: &[Jet2], c: f64| -> Vec<Jet2> {
            let mut y: Vec<Jet2> = x[..d].iter().map(|v| v.scale(c.exp())).collect();
            y.push(x[d].scale((2.0 * c).exp()));
            y.push(x[d + 1].clone());
            y
        };
        Self::new(
            n,
            move |x| scale(x, chi),
            move |y| scale(y, -chi),
            move |_| Jet2::constant((-(d as f64 + 2.0) * chi).exp()),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn forward(&self, x: &[Jet2]) -> Vec<Jet2> {
        (self.forward)(x)
    }

    pub fn inverse(&self, y: &[Jet2]) -> Vec<Jet2> {
        (self.inverse)(y)
    }

    pub fn inverse_jacobian(&self, y: &[Jet2]) -> Jet2 {
        (self.inverse_jacobian)(y)
    }

    pub fn check_inverse_domain(&self, y: &[f64]) -> Result<()> {
        (self.inverse_domain)(y)
    }

    pub fn forward_at(&self, x: &[f64]) -> Vec<f64> {
        self.forward(&Jet2::constants(x))
            .iter()
            .map(Jet2::value)
            .collect()
    }

    pub fn inverse_at(&self, y: &[f64]) -> Vec<f64> {
        self.inverse(&Jet2::constants(y))
            .iter()
            .map(Jet2::value)
            .collect()
    }
}

/// |det DΦ| and its gradient at `p` from jets of Φ: ∂_k det J = det J·tr(J⁻¹∂_k J).
pub fn jacobian_determinant(
    map: impl Fn(&[Jet2]) -> Vec<Jet2>,
    p: &[f64],
) -> Result<(f64, Vec<f64>)> {
    let n = p.len();
    let y = map(&Jet2::seed(p));
    let j = DenseMatrix::from_fn(n, n, |i, a| y[i].d(a));
    let det = j.determinant();
    let jinv = j
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::ChartEscape("singular Jacobian".into()))?;
    let grad = (0..n)
        .map(|k| {
            let dk = DenseMatrix::from_fn(n, n, |i, a| y[i].dd(a, k));
            det.abs() * (&jinv * dk).trace()
        })
        .collect();
    Ok((det.abs(), grad))
}

/// (Φ_w)_*Ψ: coefficient (f∘Φ⁻¹)·|det DΦ⁻¹|^exponent. The result keeps the
/// weight of `psi`; a different `exponent` models wrong weight bookkeeping.
pub fn transport_density(map: &ChartMap, psi: &DensityFunction, exponent: f64) -> DensityFunction {
    let m = map.clone();
    let coeff = psi.coefficient.clone();
    DensityFunction::new(
        ComplexField::new(move |y| {
            let x = m.inverse(y);
            let (re, im) = coeff.eval(&x);
            let j = m.inverse_jacobian(y).powf(exponent);
            (&re * &j, &im * &j)
        }),
        psi.weight,
    )
}

/// Transports `psi` by `map` with the given exponent and re-checks both
/// equations at seeded samples.
pub fn symmetry_transport_check(
    map: &ChartMap,
    psi: &DensityFunction,
    b: &BargmannStructure,
    sp: &SchrodingerParams,
    exponent: f64,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let moved = transport_density(map, psi, exponent);
    let mut wave = MaxResidual::default();
    let mut mass = MaxResidual::default();
    let m = map.clone();
    let mut sampler = b
        .sampler(seed)
        .exclude(move |y| m.check_inverse_domain(y).is_err());
    let rejected = for_samples(&mut sampler, samples, |y| {
        let (r1, r2) = schrodinger_residual(b, &moved, sp, y)?;
        wave.add(r1.norm());
        mass.add(r2.norm());
        Ok(())
    })
    .map_err(|e| match e {
        Error::SamplerExhausted(k) => Error::ChartEscape(format!(
            "inverse map undefined on the sample box ({k} rejections)"
        )),
        e => e,
    })?;
    let mut r = VerificationReport::new();
    r.push(
        CheckRecord::below(
            "transported_wave_equation",
            "conformal Laplacian of the transported density vanishes",
            wave.get(),
            tol,
        )
        .with_samples(samples, seed)
        .with_rejected(rejected),
    );
    r.push(
        CheckRecord::below(
            "transported_mass_equation",
            "(hbar/i) L_xi Psi = m Psi for the transported density",
            mass.get(),
            tol,
        )
        .with_samples(samples, seed)
        .with_rejected(rejected),
    );
    Ok(r)
}

/// Classical fourth-order Runge–Kutta flow of `field` for time `time`.
pub fn flow_rk4(field: &VectorField, p: &[f64], time: f64, step: f64) -> Vec<f64> {
    let steps = (time.abs() / step).ceil().max(1.0) as usize;
    let h = time / steps as f64;
    let mut x = p.to_vec();
    let add = |x: &[f64], k: &[f64], c: f64| -> Vec<f64> {
        x.iter().zip(k).map(|(a, b)| a + c * b).collect()
    };
    for _ in 0..steps {
        let k1 = field.at(&x);
        let k2 = field.at(&add(&x, &k1, h / 2.0));
        let k3 = field.at(&add(&x, &k2, h / 2.0));
        let k4 = field.at(&add(&x, &k3, h));
        for i in 0..x.len() {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    x
}

/// Flat Bargmann axioms, the same for a time-only conformal rescaling, and
/// conformal equivalence for time-only against space-dependent factors.
pub fn bargmann_check(d: usize, samples: usize, seed: u64, tol: f64) -> Result<VerificationReport> {
    let flat = BargmannStructure::flat(d);
    let time_factor = ScalarField::new(move |x| (x[d].square() + Jet2::constant(1.0)).powf(-0.5));
    let space_factor = ScalarField::new(|x| x[0].exp());
    let mut r = VerificationReport::new();
    r.absorb("flat", bargmann_axioms_check(&flat, samples, seed, tol)?);
    r.absorb(
        "time_rescaled",
        bargmann_axioms_check(&flat.conformal(time_factor.clone()), samples, seed, tol)?,
    );
    let (_, eq) = conformal_equivalence_check(&time_factor, &flat, samples, seed, tol)?;
    r.absorb("time_rescaled", eq);
    let (_, neq) = conformal_equivalence_check(&space_factor, &flat, samples, seed, tol)?;
    let wedge = neq.records[0].residual;
    r.push(
        CheckRecord::above(
            "space_rescaled.negative_control",
            "a factor depending on x is not Bargmann-equivalent",
            wedge,
            1e-3,
        )
        .with_samples(samples, seed),
    );
    Ok(r)
}

fn transport_residual(
    map: &ChartMap,
    psi: &DensityFunction,
    b: &BargmannStructure,
    sp: &SchrodingerParams,
    exponent: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let rep = symmetry_transport_check(map, psi, b, sp, exponent, samples, seed, f64::INFINITY)?;
    Ok(rep.records.iter().fold(0.0, |m, c| m.max(c.residual)))
}

/// Plane-wave solutions of weight d/(2d+4), their transport by
/// translations, boosts, dilations, expansions and random group elements,
/// and the wrong-weight negative control.
pub fn schrodinger_equation_check(
    d: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    use crate::ambient::{
        assemble_sch, commutant_basis, projective_map, random_group_element, AmbientMetric,
        GroupElement, SchParams,
    };

    let b = BargmannStructure::flat(d);
    let sp = SchrodingerParams::default();
    let w = schrodinger_weight(d);
    let mut rng = SeededSampler::new(seed, Vec::new());
    let waves: Vec<DensityFunction> = (0..5)
        .map(|_| DensityFunction::new(plane_wave(&rng.uniform_vec(d, -1.5, 1.5), &sp), w))
        .collect();

    let mut direct = MaxResidual::default();
    let mut sampler = b.sampler(seed);
    for p in sampler.samples(samples)? {
        for psi in &waves {
            let (r1, r2) = schrodinger_residual(&b, psi, &sp, &p)?;
            direct.add(r1.norm().max(r2.norm()));
        }
    }
    let mut r = VerificationReport::new();
    r.push(
        CheckRecord::below(
            "plane_waves",
            "plane waves of weight d/(2d+4) solve both equations",
            direct.get(),
            tol.min(1e-10),
        )
        .with_samples(samples, seed)
        .note("weight", w),
    );

    let metric = AmbientMetric::new(d)?;
    let exp_of = |p: &SchParams| -> Result<GroupElement> {
        GroupElement::exp(&metric, &assemble_sch(&metric, p)?)
    };
    let mut gamma = crate::numkernel::DenseVector::from_vec(rng.uniform_vec(d + 2, -0.5, 0.5));
    gamma[d + 1] = 0.0;
    let boost: Vec<f64> = rng.uniform_vec(d, -0.5, 0.5);
    let flows: Vec<(&str, ChartMap)> = vec![
        (
            "translation",
            ChartMap::translation(gamma.iter().copied().collect()),
        ),
        (
            "boost",
            projective_map(&metric, &exp_of(&SchParams::boost(&boost))?)?,
        ),
        ("dilation", ChartMap::dilation(d, 0.3)),
        (
            "expansion",
            projective_map(&metric, &exp_of(&SchParams::expansion(d, 0.2))?)?,
        ),
    ];
    for (name, map) in &flows {
        let mut res = MaxResidual::default();
        for psi in &waves {
            res.add(transport_residual(map, psi, &b, &sp, w, samples, seed)?);
        }
        r.push(
            CheckRecord::below(
                format!("transport_{name}"),
                "transported solutions remain solutions",
                res.get(),
                1e-7,
            )
            .with_samples(samples * waves.len(), seed),
        );
    }

    let basis = commutant_basis(d)?;
    let mut res = MaxResidual::default();
    for (k, psi) in waves.iter().enumerate() {
        let a = random_group_element(&metric, &basis, &mut rng, 0.3)?;
        res.add(transport_residual(
            &projective_map(&metric, &a)?,
            psi,
            &b,
            &sp,
            w,
            samples,
            seed.wrapping_add(k as u64),
        )?);
    }
    r.push(
        CheckRecord::below(
            "transport_random_elements",
            "exponentials of random Schrodinger elements map solutions to solutions",
            res.get(),
            1e-7,
        )
        .with_samples(samples * waves.len(), seed),
    );

    // a dilation has constant Jacobian, so every weight transports solutions
    // to solutions; the expansion does not
    let expansion = &flows[3].1;
    let wrong = transport_residual(expansion, &waves[0], &b, &sp, dual_weight(d), samples, seed)?;
    r.push(
        CheckRecord::above(
            "wrong_weight_negative_control",
            "expansion transport with weight (d+4)/(2d+4) breaks the wave equation",
            wrong,
            1e-3,
        )
        .with_samples(samples, seed),
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_structure_axioms() {
        let r = bargmann_axioms_check(&BargmannStructure::flat(3), 10, 1, 1e-12).unwrap();
        assert!(r.all_pass(), "{r:?}");
        assert_eq!(
            r.records.iter().map(|c| c.residual).fold(0.0, f64::max),
            0.0
        );
    }

    #[test]
    fn tilted_xi_is_not_null() {
        let d = 2;
        let xi = VectorField::new(4, |_| {
            vec![
                Jet2::constant(0.0),
                Jet2::constant(0.0),
                Jet2::constant(0.1),
                Jet2::constant(1.0),
            ]
        });
        let b = BargmannStructure::new(MetricField::flat_bargmann(d), xi, d).unwrap();
        let r = bargmann_axioms_check(&b, 5, 1, 1e-12).unwrap();
        // g(ξ', ξ') = 2·0.1·1
        assert!((r.get("null_xi").unwrap().residual - 0.2).abs() < 1e-15);
        assert!(!r.all_pass());
    }

    #[test]
    fn time_rescaling_keeps_xi_parallel() {
        // ∇θ' = ½ L_ξ(e^{2t} g) = 0 for θ' = e^{2t} dt
        let b = BargmannStructure::flat(2).conformal(ScalarField::new(|x| x[2].exp()));
        let r = bargmann_axioms_check(&b, 5, 3, 1e-12).unwrap();
        assert!(r.all_pass(), "{r:?}");
    }

    #[test]
    fn spatial_rescaling_breaks_parallelism() {
        let b = BargmannStructure::flat(2).conformal(ScalarField::new(|x| x[0].exp()));
        let r = bargmann_axioms_check(&b, 5, 3, 1e-10).unwrap();
        assert!(!r.get("parallel_xi").unwrap().passed());
        assert!(!r.get("closed_theta").unwrap().passed());
    }

    #[test]
    fn conformal_factors() {
        let b = BargmannStructure::flat(2);
        let (ok, _) =
            conformal_equivalence_check(&ScalarField::constant(1.0), &b, 5, 1, 1e-12).unwrap();
        assert!(ok);
        let (ok, _) =
            conformal_equivalence_check(&ScalarField::new(|x| x[2].exp()), &b, 5, 1, 1e-12)
                .unwrap();
        assert!(ok);
        let (ok, r) =
            conformal_equivalence_check(&ScalarField::new(|x| x[0].exp()), &b, 5, 1, 1e-12)
                .unwrap();
        assert!(!ok);
        assert!(r.records[0].residual > 0.1);
        let bad = conformal_equivalence_check(&ScalarField::constant(-1.0), &b, 5, 1, 1e-12);
        assert!(matches!(bad, Err(Error::Contract(_))));
    }

    #[test]
    fn vertical_derivative_of_phase() {
        let m = MetricField::flat_bargmann(1);
        let psi = DensityFunction::new(
            ComplexField::phase(ScalarField::new(|x| x[2].clone())),
            0.25,
        );
        let p = [0.3, 0.1, 0.7];
        let v = density_lie_derivative(&m, &VectorField::coordinate(3, 2), &psi, &p).unwrap();
        let f = psi.coefficient.at(&p);
        assert!((v - Complex64::i() * f).norm() < 1e-15);
    }

    #[test]
    fn plane_wave_solves() {
        let b = BargmannStructure::flat(3);
        let sp = SchrodingerParams::default();
        let psi = DensityFunction::new(plane_wave(&[0.6, 0.0, 0.8], &sp), schrodinger_weight(3));
        let (r1, r2) = schrodinger_residual(&b, &psi, &sp, &[0.1, 0.2, -0.3, 0.4, 0.5]).unwrap();
        assert!(r1.norm() < 1e-12 && r2.norm() < 1e-12);
    }

    #[test]
    fn weight_is_enforced() {
        let b = BargmannStructure::flat(3);
        let psi = DensityFunction::new(
            plane_wave(&[1.0, 0.0, 0.0], &SchrodingerParams::default()),
            0.5,
        );
        let r = schrodinger_residual(&b, &psi, &SchrodingerParams::default(), &[0.0; 5]);
        assert!(matches!(r, Err(Error::Contract(_))));
    }

    #[test]
    fn dilation_jacobian_matches_jets() {
        let m = ChartMap::dilation(2, 0.3);
        let p = [0.2, -0.5, 0.4, 0.9];
        let (det, grad) = jacobian_determinant(|y| m.inverse(y), &p).unwrap();
        assert!((det - m.inverse_jacobian(&Jet2::constants(&p)).value()).abs() < 1e-14);
        assert!(grad.iter().all(|g| g.abs() < 1e-14));
    }

    #[test]
    fn suites_pass_d1_d2() {
        for d in 1..=2 {
            let r = bargmann_check(d, 5, 2, 1e-10).unwrap();
            assert!(r.all_pass(), "{r:?}");
            let r = schrodinger_equation_check(d, 5, 2, 1e-10).unwrap();
            assert!(r.all_pass(), "{r:?}");
        }
    }

    #[test]
    fn rk4_integrates_linear_field() {
        let f = VectorField::new(2, |x| vec![x[0].clone(), x[1].scale(2.0)]);
        let y = flow_rk4(&f, &[1.0, 1.0], 1.0, 1e-3);
        assert!((y[0] - 1f64.exp()).abs() < 1e-12);
        assert!((y[1] - 2f64.exp()).abs() < 1e-11);
    }
}
