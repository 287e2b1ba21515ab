//! Levi-Civita connection and Ricci curvature from second-order jets of the
//! metric. Nothing is cached between points.

use crate::error::{Error, Result};
use crate::numkernel::DenseMatrix;

use super::fields::MetricField;

/// Metric, inverse and first/second coordinate derivatives at one point.
#[derive(Clone, Debug)]
pub struct MetricJet {
    pub n: usize,
    pub g: DenseMatrix,
    pub ginv: DenseMatrix,
    /// `dg[c]` = ∂_c g.
    pub dg: Vec<DenseMatrix>,
    /// `ddg[c * n + e]` = ∂_c ∂_e g.
    pub ddg: Vec<DenseMatrix>,
}

impl MetricJet {
    pub fn at(metric: &MetricField, p: &[f64]) -> Result<Self> {
        let n = metric.dim();
        let jets = metric.gram_jets(p)?;
        let g = DenseMatrix::from_fn(n, n, |a, b| jets[a * n + b].value());
        let ginv = invert_metric(&g)?;
        let dg = (0..n)
            .map(|c| DenseMatrix::from_fn(n, n, |a, b| jets[a * n + b].d(c)))
            .collect();
        let mut ddg = Vec::with_capacity(n * n);
        for c in 0..n {
            for e in 0..n {
                ddg.push(DenseMatrix::from_fn(n, n, |a, b| jets[a * n + b].dd(c, e)));
            }
        }
        Ok(Self {
            n,
            g,
            ginv,
            dg,
            ddg,
        })
    }
}

/// Inverse of a Gram matrix, refusing (numerically) singular input.
pub fn invert_metric(g: &DenseMatrix) -> Result<DenseMatrix> {
    let n = g.nrows();
    let scale = g.amax();
    if scale == 0.0 {
        return Err(Error::DegenerateMetric);
    }
    let inv = g.clone().try_inverse().ok_or(Error::DegenerateMetric)?;
    if inv.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateMetric);
    }
    let resid = (g * &inv - DenseMatrix::identity(n, n)).amax();
    if resid > 1e-6 {
        return Err(Error::DegenerateMetric);
    }
    Ok(inv)
}

/// Christoffel symbols Γ^a_{bc}, stored at `a·n² + b·n + c`.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.n + b) * self.n + c]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    data[(a * n + b) * n + c] = f(a, b, c);
                }
            }
        }
        Self { n, data }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Γ_{dbc} = ½(∂_b g_dc + ∂_c g_db − ∂_d g_bc), first kind.
fn first_kind(mj: &MetricJet, d: usize, b: usize, c: usize) -> f64 {
    0.5 * (mj.dg[b][(d, c)] + mj.dg[c][(d, b)] - mj.dg[d][(b, c)])
}

pub fn christoffel_from_jet(mj: &MetricJet) -> Christoffel {
    let n = mj.n;
    let mut data = vec![0.0; n * n * n];
    for b in 0..n {
        for c in b..n {
            let lower: Vec<f64> = (0..n).map(|d| first_kind(mj, d, b, c)).collect();
            for a in 0..n {
                let v: f64 = (0..n).map(|d| mj.ginv[(a, d)] * lower[d]).sum();
                data[(a * n + b) * n + c] = v;
                data[(a * n + c) * n + b] = v;
            }
        }
    }
    Christoffel { n, data }
}

/// Levi-Civita Christoffel symbols at `p`.
pub fn christoffel(metric: &MetricField, p: &[f64]) -> Result<Christoffel> {
    Ok(christoffel_from_jet(&MetricJet::at(metric, p)?))
}

/// ∂_e Γ^a_{bc} at index `((e·n + a)·n + b)·n + c`.
fn christoffel_derivative(mj: &MetricJet, gamma: &Christoffel) -> Vec<f64> {
    let n = mj.n;
    let mut out = vec![0.0; n * n * n * n];
    for e in 0..n {
        // ∂_e Γ^a_bc = −g^{af} ∂_e g_{fh} Γ^h_bc + g^{ad} ∂_e Γ_{dbc}
        let ginv_dg = &mj.ginv * &mj.dg[e];
        for b in 0..n {
            for c in b..n {
                let d_lower: Vec<f64> = (0..n)
                    .map(|d| {
                        0.5 * (mj.ddg[e * n + b][(d, c)] + mj.ddg[e * n + c][(d, b)]
                            - mj.ddg[e * n + d][(b, c)])
                    })
                    .collect();
                for a in 0..n {
                    let mut v = 0.0;
                    for h in 0..n {
                        v -= ginv_dg[(a, h)] * gamma.get(h, b, c);
                    }
                    for d in 0..n {
                        v += mj.ginv[(a, d)] * d_lower[d];
                    }
                    out[((e * n + a) * n + b) * n + c] = v;
                    out[((e * n + a) * n + c) * n + b] = v;
                }
            }
        }
    }
    out
}

/// Ricci tensor R_bc = ∂_a Γ^a_bc − ∂_c Γ^a_ab + Γ^a_ae Γ^e_bc − Γ^a_ce Γ^e_ab.
pub fn ricci_from_parts(n: usize, gamma: &Christoffel, dgamma: &[f64]) -> DenseMatrix {
    let dg = |e: usize, a: usize, b: usize, c: usize| dgamma[((e * n + a) * n + b) * n + c];
    DenseMatrix::from_fn(n, n, |b, c| {
        let mut r = 0.0;
        for a in 0..n {
            r += dg(a, a, b, c) - dg(c, a, a, b);
            for e in 0..n {
                r += gamma.get(a, a, e) * gamma.get(e, b, c)
                    - gamma.get(a, c, e) * gamma.get(e, a, b);
            }
        }
        r
    })
}

/// Ricci tensor and scalar curvature at `p`.
pub fn ricci_scalar(metric: &MetricField, p: &[f64]) -> Result<(DenseMatrix, f64)> {
    let mj = MetricJet::at(metric, p)?;
    let gamma = christoffel_from_jet(&mj);
    let dgamma = christoffel_derivative(&mj, &gamma);
    let ric = ricci_from_parts(mj.n, &gamma, &dgamma);
    let r = (0..mj.n)
        .flat_map(|b| (0..mj.n).map(move |c| (b, c)))
        .map(|(b, c)| mj.ginv[(b, c)] * ric[(b, c)])
        .sum();
    Ok((ric, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Chart, MetricField};
    use crate::numkernel::Jet2;

    /// Round 2-sphere of radius 2: Ric = g/4·… constant curvature 1/4.
    fn sphere() -> MetricField {
        MetricField::new(Chart::new(["th", "ph"]).unwrap(), (2, 0), |x| {
            let s = x[0].sin();
            vec![
                Jet2::constant(4.0),
                Jet2::constant(0.0),
                Jet2::constant(0.0),
                (&s * &s).scale(4.0),
            ]
        })
        .unwrap()
    }

    #[test]
    fn flat_metric_has_no_connection() {
        let m = MetricField::flat_bargmann(2);
        let p = [0.3, -0.1, 2.0, 0.7];
        assert_eq!(christoffel(&m, &p).unwrap().max_abs(), 0.0);
        let (ric, r) = ricci_scalar(&m, &p).unwrap();
        assert_eq!(ric.amax(), 0.0);
        assert_eq!(r, 0.0);
    }

    #[test]
    fn sphere_curvature() {
        let m = sphere();
        let p = [0.9, 0.2];
        let g = christoffel(&m, &p).unwrap();
        // Γ^θ_φφ = −sinθ cosθ, Γ^φ_θφ = cotθ
        assert!((g.get(0, 1, 1) + 0.9f64.sin() * 0.9f64.cos()).abs() < 1e-14);
        assert!((g.get(1, 0, 1) - 1.0 / 0.9f64.tan()).abs() < 1e-14);
        let (ric, r) = ricci_scalar(&m, &p).unwrap();
        let gram = m.gram_at(&p).unwrap();
        assert!((ric - gram * 0.25).amax() < 1e-13);
        assert!((r - 0.5).abs() < 1e-13);
    }

    #[test]
    fn degenerate_metric_reported() {
        let m = MetricField::new(Chart::new(["a", "b"]).unwrap(), (1, 1), |x| {
            vec![
                x[0].clone(),
                Jet2::constant(0.0),
                Jet2::constant(0.0),
                Jet2::constant(1.0),
            ]
        })
        .unwrap();
        assert_eq!(christoffel(&m, &[0.0, 1.0]), Err(Error::DegenerateMetric));
    }
}
