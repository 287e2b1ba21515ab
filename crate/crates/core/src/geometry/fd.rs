//! Finite-difference oracle, independent of the jet machinery: only plain
//! values of the metric and fields are sampled.
//!
//! First derivatives use central differences at step `h`, extrapolated once
//! (Richardson with h and h/2). Second derivatives difference first
//! derivatives at an outer step `FD_OUTER_STEP`; nesting two 1e-5 steps would
//! drown the result in rounding noise.

use crate::error::Result;
use crate::numkernel::{DenseMatrix, Jet2};

use super::curvature::{invert_metric, ricci_from_parts, Christoffel};
use super::fields::{MetricField, OneForm, ScalarField};

pub const FD_STEP: f64 = 1e-5;
pub const FD_OUTER_STEP: f64 = 1e-3;

fn shifted(p: &[f64], i: usize, h: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[i] += h;
    q
}

/// Richardson-extrapolated central difference of a vector-valued map along
/// coordinate `i`.
pub fn central_diff<F>(f: &F, p: &[f64], i: usize, h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let step = |h: f64| -> Result<Vec<f64>> {
        let a = f(&shifted(p, i, h))?;
        let b = f(&shifted(p, i, -h))?;
        Ok(a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * h)).collect())
    };
    let coarse = step(h)?;
    let fine = step(h / 2.0)?;
    Ok(fine
        .iter()
        .zip(&coarse)
        .map(|(f, c)| (4.0 * f - c) / 3.0)
        .collect())
}

/// Gram matrix and its first derivatives by finite differences.
pub fn metric_derivatives(
    metric: &MetricField,
    p: &[f64],
    h: f64,
) -> Result<(DenseMatrix, Vec<DenseMatrix>)> {
    let n = metric.dim();
    let g = metric.gram_at(p)?;
    let flat = |q: &[f64]| -> Result<Vec<f64>> { Ok(metric.gram_at(q)?.as_slice().to_vec()) };
    let mut dg = Vec::with_capacity(n);
    for c in 0..n {
        let d = central_diff(&flat, p, c, h)?;
        dg.push(DenseMatrix::from_column_slice(n, n, &d));
    }
    Ok((g, dg))
}

/// Christoffel symbols from finite-difference metric derivatives.
pub fn christoffel_fd(metric: &MetricField, p: &[f64]) -> Result<Christoffel> {
    let (g, dg) = metric_derivatives(metric, p, FD_STEP)?;
    let ginv = invert_metric(&g)?;
    let n = metric.dim();
    Ok(Christoffel::from_fn(n, |a, b, c| {
        (0..n)
            .map(|d| 0.5 * ginv[(a, d)] * (dg[b][(d, c)] + dg[c][(d, b)] - dg[d][(b, c)]))
            .sum()
    }))
}

/// Ricci tensor from finite differences of the finite-difference
/// Christoffel symbols.
pub fn ricci_fd(metric: &MetricField, p: &[f64]) -> Result<DenseMatrix> {
    let n = metric.dim();
    let gamma = christoffel_fd(metric, p)?;
    let flat =
        |q: &[f64]| -> Result<Vec<f64>> { Ok(christoffel_fd(metric, q)?.as_slice().to_vec()) };
    let mut dgamma = Vec::with_capacity(n * n * n * n);
    for e in 0..n {
        dgamma.extend(central_diff(&flat, p, e, FD_OUTER_STEP)?);
    }
    Ok(ricci_from_parts(n, &gamma, &dgamma))
}

/// ∇_a ω_b from finite differences of ω and of the metric.
pub fn covariant_derivative_form_fd(
    metric: &MetricField,
    w: &OneForm,
    p: &[f64],
) -> Result<DenseMatrix> {
    let n = metric.dim();
    let gamma = christoffel_fd(metric, p)?;
    let wv = w.at(p);
    let f = |q: &[f64]| -> Result<Vec<f64>> { Ok(w.at(q)) };
    let mut dw = Vec::with_capacity(n);
    for a in 0..n {
        dw.push(central_diff(&f, p, a, FD_STEP)?);
    }
    Ok(DenseMatrix::from_fn(n, n, |a, b| {
        dw[a][b] - (0..n).map(|c| gamma.get(c, a, b) * wv[c]).sum::<f64>()
    }))
}

/// Value, gradient and Hessian of a scalar field by finite differences,
/// packed as a jet so the exact operators can be applied to it.
pub fn scalar_jet_fd(f: &ScalarField, p: &[f64]) -> Result<Jet2> {
    let n = p.len();
    let value = f.at(p);
    let first = |q: &[f64]| -> Result<Vec<f64>> { Ok(vec![f.at(q)]) };
    let grad: Vec<f64> = (0..n)
        .map(|i| central_diff(&first, p, i, FD_STEP).map(|v| v[0]))
        .collect::<Result<_>>()?;
    let gradient = |q: &[f64]| -> Result<Vec<f64>> {
        (0..n)
            .map(|i| central_diff(&first, q, i, FD_STEP).map(|v| v[0]))
            .collect()
    };
    let mut hess = vec![0.0; n * n];
    for i in 0..n {
        let row = central_diff(&gradient, p, i, FD_OUTER_STEP)?;
        hess[i * n..(i + 1) * n].copy_from_slice(&row);
    }
    Jet2::new(value, grad, hess)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{christoffel, ricci_scalar, Chart};

    fn warped() -> MetricField {
        MetricField::new(Chart::new(["a", "b", "c"]).unwrap(), (3, 0), |x| {
            let w = (&x[0] * &x[1]).scale(0.3).exp();
            let z = Jet2::constant(0.0);
            vec![
                Jet2::constant(1.0) + x[2].square(),
                x[0].scale(0.1),
                z.clone(),
                x[0].scale(0.1),
                w,
                z.clone(),
                z.clone(),
                z,
                Jet2::constant(2.0) + x[1].sin().scale(0.5),
            ]
        })
        .unwrap()
    }

    #[test]
    fn christoffel_agrees_with_jets() {
        let m = warped();
        let p = [0.3, -0.4, 0.5];
        let exact = christoffel(&m, &p).unwrap();
        let approx = christoffel_fd(&m, &p).unwrap();
        for (a, b) in exact.as_slice().iter().zip(approx.as_slice()) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn ricci_agrees_with_jets() {
        let m = warped();
        let p = [0.3, -0.4, 0.5];
        let (exact, _) = ricci_scalar(&m, &p).unwrap();
        let approx = ricci_fd(&m, &p).unwrap();
        assert!((exact - approx).amax() < 1e-6);
    }

    #[test]
    fn scalar_hessian() {
        let f = ScalarField::new(|x| (&x[0] * &x[1]).sin());
        let j = scalar_jet_fd(&f, &[0.4, 0.9]).unwrap();
        let exact = f.jet_at(&[0.4, 0.9]);
        for i in 0..2 {
            assert!((j.d(i) - exact.d(i)).abs() < 1e-9);
            for k in 0..2 {
                assert!((j.dd(i, k) - exact.dd(i, k)).abs() < 1e-7);
            }
        }
    }
}
