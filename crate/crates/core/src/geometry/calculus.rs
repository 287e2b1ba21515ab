use crate::error::Result;
use crate::numkernel::{DenseMatrix, Jet2};

use super::curvature::{christoffel_from_jet, ricci_scalar, MetricJet};
use super::fields::{MetricField, OneForm, ScalarField, VectorField};

/// ∇_a ω_b = ∂_a ω_b − Γ^c_ab ω_c, as the matrix `[a][b]`.
pub fn covariant_derivative_form(
    metric: &MetricField,
    w: &OneForm,
    p: &[f64],
) -> Result<DenseMatrix> {
    let mj = MetricJet::at(metric, p)?;
    let gamma = christoffel_from_jet(&mj);
    let n = mj.n;
    let wj = w.jets_at(p);
    Ok(DenseMatrix::from_fn(n, n, |a, b| {
        let mut v = wj[b].d(a);
        for c in 0..n {
            v -= gamma.get(c, a, b) * wj[c].value();
        }
        v
    }))
}

/// ∇_a V^b = ∂_a V^b + Γ^b_ac V^c, as the matrix `[a][b]`.
pub fn covariant_derivative_vector(
    metric: &MetricField,
    v: &VectorField,
    p: &[f64],
) -> Result<DenseMatrix> {
    let mj = MetricJet::at(metric, p)?;
    let gamma = christoffel_from_jet(&mj);
    let n = mj.n;
    let vj = v.jets_at(p);
    Ok(DenseMatrix::from_fn(n, n, |a, b| {
        let mut r = vj[b].d(a);
        for c in 0..n {
            r += gamma.get(b, a, c) * vj[c].value();
        }
        r
    }))
}

/// (L_Z g)_ab = Z^c ∂_c g_ab + g_cb ∂_a Z^c + g_ac ∂_b Z^c.
pub fn lie_derivative_metric(
    metric: &MetricField,
    z: &VectorField,
    p: &[f64],
) -> Result<DenseMatrix> {
    let n = metric.dim();
    let g = metric.gram_jets(p)?;
    let zj = z.jets_at(p);
    Ok(DenseMatrix::from_fn(n, n, |a, b| {
        let mut v = 0.0;
        for c in 0..n {
            v += zj[c].value() * g[a * n + b].d(c);
            v += g[c * n + b].value() * zj[c].d(a);
            v += g[a * n + c].value() * zj[c].d(b);
        }
        v
    }))
}

/// Vector-field bracket [X, Y]^a = X^b ∂_b Y^a − Y^b ∂_b X^a at `p`.
pub fn lie_bracket(x: &VectorField, y: &VectorField, p: &[f64]) -> Vec<f64> {
    let n = p.len();
    let xj = x.jets_at(p);
    let yj = y.jets_at(p);
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| xj[b].value() * yj[a].d(b) - yj[b].value() * xj[a].d(b))
                .sum()
        })
        .collect()
}

/// Conformal factor φ_Z with L_Z g ≈ φ_Z·g, and the relative residual
/// ‖L_Z g − φ_Z g‖ / ‖g‖ (Frobenius).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConformalDeviation {
    pub phi: f64,
    pub residual: f64,
}

pub fn conformal_deviation(
    metric: &MetricField,
    z: &VectorField,
    p: &[f64],
) -> Result<ConformalDeviation> {
    let mj = MetricJet::at(metric, p)?;
    let lg = lie_derivative_metric(metric, z, p)?;
    let n = mj.n as f64;
    let phi = (&mj.ginv * &lg).trace() / n;
    let residual = (&lg - &mj.g * phi).norm() / mj.g.norm();
    Ok(ConformalDeviation { phi, residual })
}

/// Exterior derivative dω and the 3-form ω∧dω, the latter stored at
/// `(a·n + b)·n + c` without 1/k! normalization.
#[derive(Clone, Debug)]
pub struct ExteriorData {
    pub d_omega: DenseMatrix,
    pub wedge: Vec<f64>,
}

impl ExteriorData {
    pub fn wedge_max_abs(&self) -> f64 {
        self.wedge.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn exterior_wedge(w: &OneForm, p: &[f64]) -> ExteriorData {
    let n = p.len();
    let wj = w.jets_at(p);
    let d_omega = DenseMatrix::from_fn(n, n, |a, b| wj[b].d(a) - wj[a].d(b));
    let mut wedge = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                wedge[(a * n + b) * n + c] = wj[a].value() * d_omega[(b, c)]
                    + wj[b].value() * d_omega[(c, a)]
                    + wj[c].value() * d_omega[(a, b)];
            }
        }
    }
    ExteriorData { d_omega, wedge }
}

/// Divergence with respect to the metric volume |det g|^{1/2}:
/// Div X = ∂_a X^a + Γ^b_ba X^a.
pub fn divergence(metric: &MetricField, x: &VectorField, p: &[f64]) -> Result<f64> {
    let mj = MetricJet::at(metric, p)?;
    let gamma = christoffel_from_jet(&mj);
    let n = mj.n;
    let xj = x.jets_at(p);
    let mut div = 0.0;
    for a in 0..n {
        div += xj[a].d(a);
        for b in 0..n {
            div += gamma.get(b, b, a) * xj[a].value();
        }
    }
    Ok(div)
}

/// Laplace–Beltrami operator g^ab(∂_a∂_b f − Γ^c_ab ∂_c f) on a jet of f
/// already evaluated at `p`.
pub fn laplacian_of_jet(mj: &MetricJet, f: &Jet2) -> f64 {
    let gamma = christoffel_from_jet(mj);
    let n = mj.n;
    let mut out = 0.0;
    for a in 0..n {
        for b in 0..n {
            let mut h = f.dd(a, b);
            for c in 0..n {
                h -= gamma.get(c, a, b) * f.d(c);
            }
            out += mj.ginv[(a, b)] * h;
        }
    }
    out
}

/// Coefficient (n−2)/(4(n−1)) of the scalar curvature in the conformal Laplacian.
pub fn yamabe_coefficient(n: usize) -> f64 {
    (n as f64 - 2.0) / (4.0 * (n as f64 - 1.0))
}

/// Density weight (n−2)/(2n) of the conformal Laplacian's domain.
pub fn yamabe_weight(n: usize) -> f64 {
    (n as f64 - 2.0) / (2.0 * n as f64)
}

/// (Δ_g f − ((n−2)/(4(n−1))) R f)(p).
pub fn yamabe_residual(metric: &MetricField, f: &ScalarField, p: &[f64]) -> Result<f64> {
    let mj = MetricJet::at(metric, p)?;
    let fj = f.jet_at(p);
    let (_, r) = ricci_scalar(metric, p)?;
    Ok(laplacian_of_jet(&mj, &fj) - yamabe_coefficient(mj.n) * r * fj.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MetricField;

    fn rotation_x1x2() -> VectorField {
        // −x2 ∂1 + x1 ∂2 on x1,x2,t,s
        VectorField::new(4, |x| {
            vec![
                -&x[1],
                x[0].clone(),
                Jet2::constant(0.0),
                Jet2::constant(0.0),
            ]
        })
    }

    #[test]
    fn rotation_is_killing_for_flat() {
        let m = MetricField::flat_bargmann(2);
        let lg = lie_derivative_metric(&m, &rotation_x1x2(), &[0.4, -1.1, 0.3, 2.0]).unwrap();
        assert_eq!(lg.amax(), 0.0);
        let cd = conformal_deviation(&m, &rotation_x1x2(), &[0.4, -1.1, 0.3, 2.0]).unwrap();
        assert_eq!(cd.phi, 0.0);
        assert_eq!(cd.residual, 0.0);
    }

    #[test]
    fn dilation_scales_flat_metric() {
        let chi = 0.7;
        let z = VectorField::new(4, move |x| {
            vec![
                x[0].scale(chi),
                x[1].scale(chi),
                x[2].scale(2.0 * chi),
                Jet2::constant(0.0),
            ]
        });
        let m = MetricField::flat_bargmann(2);
        let p = [0.2, 0.5, -0.4, 1.0];
        let lg = lie_derivative_metric(&m, &z, &p).unwrap();
        let g = m.gram_at(&p).unwrap();
        assert!((lg - g * (2.0 * chi)).amax() < 1e-15);
        assert!((divergence(&m, &z, &p).unwrap() - 4.0 * chi).abs() < 1e-15);
    }

    #[test]
    fn shear_is_not_conformal() {
        let z = VectorField::new(4, |x| {
            vec![
                Jet2::constant(0.0),
                x[0].clone(),
                Jet2::constant(0.0),
                Jet2::constant(0.0),
            ]
        });
        let cd =
            conformal_deviation(&MetricField::flat_bargmann(2), &z, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(cd.residual > 0.1);
    }

    #[test]
    fn dt_is_closed() {
        let w = OneForm::coordinate(3, 1);
        let e = exterior_wedge(&w, &[0.1, 0.2, 0.3]);
        assert_eq!(e.d_omega.amax(), 0.0);
        assert_eq!(e.wedge_max_abs(), 0.0);
    }

    #[test]
    fn wedge_convention() {
        // ω = x dy on (x, y, z): dω = dx∧dy, ω∧dω = 0 since ω ∝ dy
        let w = OneForm::new(3, |x| {
            vec![Jet2::constant(0.0), x[0].clone(), Jet2::constant(0.0)]
        });
        let e = exterior_wedge(&w, &[0.5, 0.0, 0.0]);
        assert_eq!(e.d_omega[(0, 1)], 1.0);
        assert_eq!(e.d_omega[(1, 0)], -1.0);
        assert_eq!(e.wedge_max_abs(), 0.0);
        // ω = dz + x dy: ω∧dω = dz∧dx∧dy ≠ 0
        let w = OneForm::new(3, |x| {
            vec![Jet2::constant(0.0), x[0].clone(), Jet2::constant(1.0)]
        });
        let e = exterior_wedge(&w, &[0.5, 0.0, 0.0]);
        assert_eq!(e.wedge[(2 * 3) * 3 + 1], 1.0);
    }

    #[test]
    fn harmonic_function_on_flat() {
        let m = MetricField::flat_bargmann(3);
        let f = ScalarField::new(|x| x[0].clone());
        assert_eq!(
            yamabe_residual(&m, &f, &[0.1, 0.2, 0.3, 0.4, 0.5]).unwrap(),
            0.0
        );
    }

    #[test]
    fn covariant_derivative_of_xi_on_flat() {
        let m = MetricField::flat_bargmann(1);
        let xi = VectorField::coordinate(3, 2);
        let nab = covariant_derivative_vector(&m, &xi, &[0.3, 0.2, 0.1]).unwrap();
        assert_eq!(nab.amax(), 0.0);
    }
}
