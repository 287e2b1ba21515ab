use crate::error::{Error, Result};
use crate::geometry::{lie_bracket, ScalarField, VectorField};
use crate::numkernel::{
    commutator, frobenius_dot, orthonormalize_matrices, rank_nullspace, DenseMatrix, DenseVector,
    Jet2, SeededSampler, DEFAULT_RANK_TOL,
};
use crate::report::{CheckRecord, MaxResidual, VerificationReport};

use super::metric::{build_z0, AmbientMetric};

/// Block data (Λ, Γ, α, χ) of a commutant element: Λ ∈ o(d+1,1), Γ a
/// Bargmann vector, α the expansion and χ the dilation rate.
#[derive(Clone, Debug, PartialEq)]
pub struct SchParams {
    pub lambda: DenseMatrix,
    pub gamma: DenseVector,
    pub alpha: f64,
    pub chi: f64,
}

impl SchParams {
    pub fn zero(d: usize) -> Self {
        Self {
            lambda: DenseMatrix::zeros(d + 2, d + 2),
            gamma: DenseVector::zeros(d + 2),
            alpha: 0.0,
            chi: 0.0,
        }
    }

    pub fn d(&self) -> usize {
        self.gamma.len() - 2
    }

    pub fn translation(gamma: DenseVector) -> Self {
        let mut p = Self::zero(gamma.len() - 2);
        p.gamma = gamma;
        p
    }

    /// (x, t, s) ↦ (e^χ x, e^{2χ} t, s) at the infinitesimal level.
    pub fn dilation(d: usize, chi: f64) -> Self {
        let mut p = Self::zero(d);
        p.lambda[(d, d)] = chi;
        p.lambda[(d + 1, d + 1)] = -chi;
        p.chi = chi;
        p
    }

    pub fn expansion(d: usize, alpha: f64) -> Self {
        let mut p = Self::zero(d);
        p.alpha = alpha;
        p
    }

    /// Rotation in the (xⁱ, xʲ) plane.
    pub fn rotation(d: usize, i: usize, j: usize, angle: f64) -> Self {
        let mut p = Self::zero(d);
        p.lambda[(i, j)] = -angle;
        p.lambda[(j, i)] = angle;
        p
    }

    /// Galilean boost x ↦ x + bt, s ↦ s − b·x − ½|b|²t.
    pub fn boost(b: &[f64]) -> Self {
        let d = b.len();
        let mut p = Self::zero(d);
        for (i, bi) in b.iter().enumerate() {
            p.lambda[(i, d)] = *bi;
            p.lambda[(d + 1, i)] = -bi;
        }
        p
    }
}

/// A G-skew matrix, optionally tagged with its commutant block data.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    pub matrix: DenseMatrix,
    pub params: Option<SchParams>,
}

/// Basis of o(d+2,2) = {G⁻¹S : S antisymmetric}.
pub fn skew_basis(metric: &AmbientMetric) -> Vec<DenseMatrix> {
    let n = metric.n();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in (a + 1)..n {
            let mut s = DenseMatrix::zeros(n, n);
            s[(a, b)] = 1.0;
            s[(b, a)] = -1.0;
            out.push(metric.gram_inv() * s);
        }
    }
    out
}

/// Matrix of Y ↦ [Y, Z₀] on the skew basis, one column per basis element.
fn ad_z0_matrix(basis: &[DenseMatrix], z0: &DenseMatrix) -> DenseMatrix {
    let n2 = z0.len();
    let mut m = DenseMatrix::zeros(n2, basis.len());
    for (k, y) in basis.iter().enumerate() {
        m.column_mut(k)
            .copy_from_slice(commutator(y, z0).as_slice());
    }
    m
}

/// Kernel of ad_{Z₀} restricted to o(d+2,2), as matrices (not orthonormalized).
fn commutant_raw(d: usize, tol: f64) -> Result<Vec<DenseMatrix>> {
    let metric = AmbientMetric::new(d)?;
    let z0 = build_z0(d)?.z;
    let basis = skew_basis(&metric);
    let rn = rank_nullspace(&ad_z0_matrix(&basis, &z0), tol)?;
    Ok(rn
        .nullspace
        .iter()
        .map(|c| {
            basis
                .iter()
                .zip(c.iter())
                .fold(DenseMatrix::zeros(d + 4, d + 4), |acc, (b, w)| acc + b * *w)
        })
        .collect())
}

/// dim{Z ∈ o(d+2,2) : [Z, Z₀] = 0} at the given relative rank tolerance.
pub fn commutant_dimension(d: usize, tol: f64) -> Result<usize> {
    Ok(commutant_raw(d, tol)?.len())
}

/// Frobenius-orthonormal basis of the commutant of Z₀ in o(d+2,2).
pub fn commutant_basis(d: usize) -> Result<Vec<AlgebraElement>> {
    let metric = AmbientMetric::new(d)?;
    let raw = commutant_raw(d, DEFAULT_RANK_TOL)?;
    orthonormalize_matrices(&raw, 1e-10)
        .into_iter()
        .map(|m| {
            let params = decompose_sch(&metric, &m)?;
            Ok(AlgebraElement {
                matrix: m,
                params: Some(params),
            })
        })
        .collect()
}

/// Expected commutant dimension (d² + 3d + 8)/2.
pub fn sch_dimension(d: usize) -> usize {
    (d * d + 3 * d + 8) / 2
}

/// Reads (Λ, Γ, α, χ) off a matrix commuting with Z₀ and checks that the
/// blocks reassemble to it.
pub fn decompose_sch(metric: &AmbientMetric, z: &DenseMatrix) -> Result<SchParams> {
    let l = metric.layout();
    let m = l.m();
    let z0 = build_z0(l.d)?.z;
    let scale = z.amax().max(1.0);
    let defect = commutator(z, &z0).amax();
    if defect > 1e-10 * scale {
        return Err(Error::Contract(format!(
            "element does not commute with Z0 (defect {defect:.3e})"
        )));
    }
    let params = SchParams {
        lambda: z.view((0, 0), (m, m)).into_owned(),
        gamma: z.view((0, l.v()), (m, 1)).column(0).into_owned(),
        alpha: z[(l.s(), l.u())],
        chi: z[(l.u(), l.u())],
    };
    let back = assemble_sch_unchecked(metric, &params);
    let err = (&back - z).amax();
    if err > 1e-12 * scale {
        return Err(Error::Contract(format!(
            "block reassembly mismatch {err:.3e}"
        )));
    }
    Ok(params)
}

fn assemble_sch_unchecked(metric: &AmbientMetric, p: &SchParams) -> DenseMatrix {
    let l = metric.layout();
    let m = l.m();
    let g = metric.bargmann_gram();
    let mut z = DenseMatrix::zeros(l.n(), l.n());
    z.view_mut((0, 0), (m, m)).copy_from(&p.lambda);
    // αξ in column u, Γ in column v
    z[(l.s(), l.u())] = p.alpha;
    z.view_mut((0, l.v()), (m, 1)).copy_from(&p.gamma);
    // row u: −Γ*, χ; row v: −αξ*, −χ
    let gamma_star = p.gamma.transpose() * &g;
    for j in 0..m {
        z[(l.u(), j)] = -gamma_star[j];
    }
    z[(l.u(), l.u())] = p.chi;
    z[(l.v(), l.t())] = -p.alpha;
    z[(l.v(), l.v())] = -p.chi;
    z
}

/// Matrix of a commutant element from its blocks; Λ must lie in o(d+1,1)
/// and satisfy Λξ + χξ = 0.
pub fn assemble_sch(metric: &AmbientMetric, p: &SchParams) -> Result<AlgebraElement> {
    check_params(metric, p)?;
    Ok(AlgebraElement {
        matrix: assemble_sch_unchecked(metric, p),
        params: Some(p.clone()),
    })
}

fn check_params(metric: &AmbientMetric, p: &SchParams) -> Result<()> {
    let l = metric.layout();
    if p.gamma.len() != l.m() || p.lambda.shape() != (l.m(), l.m()) {
        return Err(Error::Dimension(
            "Schrödinger block sizes do not match d".into(),
        ));
    }
    let g = metric.bargmann_gram();
    let scale = p.lambda.amax().max(p.chi.abs()).max(1.0);
    let gl = &g * &p.lambda;
    let skew = (&gl + gl.transpose()).amax();
    if skew > 1e-12 * scale {
        return Err(Error::Contract(format!(
            "Λ is not g-skew (defect {skew:.3e})"
        )));
    }
    let mut lx = p.lambda.column(l.s()).into_owned();
    lx[l.s()] += p.chi;
    if lx.amax() > 1e-12 * scale {
        return Err(Error::Contract(format!(
            "Λξ + χξ = 0 violated ({:.3e})",
            lx.amax()
        )));
    }
    Ok(())
}

/// Infinitesimal action of a commutant element on Bargmann space: the
/// vector field δx and the rate δr/r.
#[derive(Clone, Debug)]
pub struct RealizedField {
    pub field: VectorField,
    /// δr = rate·r.
    pub rate: ScalarField,
}

/// δx = Λx + Γ − ½α g(x,x) ξ + α g(ξ,x) x + χx and δr = (α ξ*x + χ) r.
pub fn realize_field(p: &SchParams) -> Result<RealizedField> {
    let d = p.d();
    let metric = AmbientMetric::new(d)?;
    check_params(&metric, p)?;
    let m = d + 2;
    let (t, s) = (d, d + 1);
    let lambda = p.lambda.clone();
    let gamma = p.gamma.clone();
    let (alpha, chi) = (p.alpha, p.chi);
    let field = VectorField::new(m, move |x| {
        // g(x,x) = Σ xᵢ² + 2ts, g(ξ,x) = t
        let mut gxx = (&x[t] * &x[s]).scale(2.0);
        for xi in &x[..d] {
            gxx += xi.square();
        }
        let gxi = &x[t];
        (0..m)
            .map(|a| {
                let mut v = Jet2::constant(gamma[a]);
                for b in 0..m {
                    if lambda[(a, b)] != 0.0 {
                        v += x[b].scale(lambda[(a, b)]);
                    }
                }
                if a == s {
                    v -= gxx.scale(0.5 * alpha);
                }
                v += (gxi * &x[a]).scale(alpha);
                v += x[a].scale(chi);
                v
            })
            .collect()
    });
    let rate = ScalarField::new(move |x| x[t].scale(alpha) + Jet2::constant(chi));
    Ok(RealizedField { field, rate })
}

/// Sign σ with [X_{Z₁}, X_{Z₂}] = σ·X_{[Z₁,Z₂]}: the realization of a left
/// action is an anti-homomorphism.
pub const BRACKET_SIGN: f64 = -1.0;

/// Field bracket of realized elements against the realized matrix commutator.
pub fn bracket_compatibility(
    z1: &AlgebraElement,
    z2: &AlgebraElement,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let (p1, p2) = match (&z1.params, &z2.params) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::Contract(
                "bracket compatibility needs Schrödinger-tagged elements".into(),
            ))
        }
    };
    let d = p1.d();
    let metric = AmbientMetric::new(d)?;
    let x1 = realize_field(p1)?;
    let x2 = realize_field(p2)?;
    let p12 = decompose_sch(&metric, &commutator(&z1.matrix, &z2.matrix))?;
    let x12 = realize_field(&p12)?;
    let mut sampler = SeededSampler::cube(seed, d + 2, -1.0, 1.0);
    let mut res = MaxResidual::default();
    let mut opposite = MaxResidual::default();
    for p in sampler.samples(samples)? {
        let br = lie_bracket(&x1.field, &x2.field, &p);
        let rhs = x12.field.at(&p);
        res.add_all(br.iter().zip(&rhs).map(|(a, b)| a - BRACKET_SIGN * b));
        opposite.add_all(br.iter().zip(&rhs).map(|(a, b)| a + BRACKET_SIGN * b));
    }
    let mut r = VerificationReport::new();
    r.push(
        CheckRecord::below(
            "bracket_compatibility",
            "[X_Z1, X_Z2] = -X_[Z1,Z2] for realized fields",
            res.get(),
            tol,
        )
        .with_samples(samples, seed)
        .note("sign", BRACKET_SIGN)
        .note(
            "residual_with_opposite_sign",
            format!("{:.3e}", opposite.get()),
        ),
    );
    Ok(r)
}

/// Residual of the commutant's closure under brackets: the largest
/// component of [Bᵢ, Bⱼ] orthogonal to the span.
pub fn closure_residual(basis: &[AlgebraElement]) -> f64 {
    let mut res = MaxResidual::default();
    for (i, a) in basis.iter().enumerate() {
        for b in &basis[i + 1..] {
            let c = commutator(&a.matrix, &b.matrix);
            let mut rest = c.clone();
            for e in basis {
                rest -= &e.matrix * frobenius_dot(&e.matrix, &c);
            }
            res.add(rest.amax());
        }
    }
    res.get()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutant_dimensions() {
        for d in 1..=4 {
            assert_eq!(commutant_basis(d).unwrap().len(), sch_dimension(d));
        }
        assert_eq!(sch_dimension(3), 13);
    }

    #[test]
    fn z0_decomposes_as_vertical_translation() {
        let m = AmbientMetric::new(2).unwrap();
        let p = decompose_sch(&m, &build_z0(2).unwrap().z).unwrap();
        assert_eq!(p.lambda.amax(), 0.0);
        assert_eq!(p.alpha, 0.0);
        assert_eq!(p.chi, 0.0);
        assert_eq!(p.gamma.as_slice(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn named_generators_commute_with_z0() {
        let d = 3;
        let m = AmbientMetric::new(d).unwrap();
        let z0 = build_z0(d).unwrap().z;
        for p in [
            SchParams::dilation(d, 0.7),
            SchParams::expansion(d, 0.3),
            SchParams::rotation(d, 0, 2, 1.0),
            SchParams::boost(&[0.1, 0.2, 0.3]),
            SchParams::translation(DenseVector::from_vec(vec![1.0, 2.0, 3.0, 4.0, 5.0])),
        ] {
            let z = assemble_sch(&m, &p).unwrap().matrix;
            assert!(m.skew_defect(&z) < 1e-15);
            assert_eq!(commutator(&z, &z0).amax(), 0.0);
            assert_eq!(decompose_sch(&m, &z).unwrap(), p);
        }
    }

    #[test]
    fn non_commuting_input_rejected() {
        let m = AmbientMetric::new(1).unwrap();
        let z0 = build_z0(1).unwrap().z;
        let y = skew_basis(&m)
            .into_iter()
            .find(|y| commutator(y, &z0).amax() > 0.5)
            .unwrap();
        let y = &y;
        assert!(matches!(decompose_sch(&m, y), Err(Error::Contract(_))));
    }

    #[test]
    fn dilation_and_expansion_fields() {
        let d = 2;
        let p = [0.3, -0.2, 0.5, 0.7];
        let dil = realize_field(&SchParams::dilation(d, 0.4)).unwrap();
        let v = dil.field.at(&p);
        let want = [0.4 * 0.3, 0.4 * -0.2, 2.0 * 0.4 * 0.5, 0.0];
        for (a, b) in v.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        let exp = realize_field(&SchParams::expansion(d, 0.2)).unwrap();
        let v = exp.field.at(&p);
        let want = [
            0.2 * 0.5 * 0.3,
            0.2 * 0.5 * -0.2,
            0.2 * 0.25,
            -0.1 * (0.09 + 0.04),
        ];
        for (a, b) in v.iter().zip(want) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
    }

    #[test]
    fn constraint_violation_rejected() {
        let mut p = SchParams::dilation(1, 1.0);
        p.chi = 0.5;
        assert!(realize_field(&p).is_err());
    }

    #[test]
    fn translation_dilation_bracket() {
        let d = 2;
        let m = AmbientMetric::new(d).unwrap();
        let mut e1 = DenseVector::zeros(4);
        e1[0] = 1.0;
        let mut et = DenseVector::zeros(4);
        et[2] = 1.0;
        let dil = realize_field(&SchParams::dilation(d, 1.0)).unwrap();
        let p = [0.1, 0.2, 0.3, 0.4];
        for (gamma, weight) in [(e1, 1.0), (et, 2.0)] {
            let tr = realize_field(&SchParams::translation(gamma.clone())).unwrap();
            // [∂, D] = weight·∂
            let br = lie_bracket(&tr.field, &dil.field, &p);
            for (a, g) in br.iter().zip(gamma.iter()) {
                assert!((a - weight * g).abs() < 1e-15);
            }
        }
        let z1 = assemble_sch(&m, &SchParams::dilation(d, 1.0)).unwrap();
        let z2 = assemble_sch(&m, &SchParams::expansion(d, 1.0)).unwrap();
        assert!(bracket_compatibility(&z1, &z2, 5, 1, 1e-12)
            .unwrap()
            .all_pass());
    }

    #[test]
    fn closure() {
        assert!(closure_residual(&commutant_basis(2).unwrap()) < 1e-10);
    }
}
