use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numkernel::{DenseMatrix, Jet2};

pub type JetMap = Arc<dyn Fn(&[Jet2]) -> Vec<Jet2> + Send + Sync>;
pub type JetScalarFn = Arc<dyn Fn(&[Jet2]) -> Jet2 + Send + Sync>;
pub type JetComplexFn = Arc<dyn Fn(&[Jet2]) -> (Jet2, Jet2) + Send + Sync>;
type Locus = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// Coordinate chart: coordinate labels plus the locus where fields defined
/// on it may not be evaluated.
#[derive(Clone)]
pub struct Chart {
    names: Vec<String>,
    singular: Option<Locus>,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("names", &self.names)
            .field("has_singular_locus", &self.singular.is_some())
            .finish()
    }
}

impl Chart {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() < 2 {
            return Err(Error::Contract(format!(
                "a chart needs at least two coordinates, got {}",
                names.len()
            )));
        }
        let distinct: HashSet<&str> = names.iter().map(String::as_str).collect();
        if distinct.len() != names.len() {
            return Err(Error::Contract(
                "chart coordinate names must be distinct".into(),
            ));
        }
        Ok(Self {
            names,
            singular: None,
        })
    }

    pub fn with_singular_locus(
        mut self,
        pred: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
    ) -> Self {
        self.singular = Some(Arc::new(pred));
        self
    }

    /// `x1..xd, t, s`.
    pub fn bargmann(d: usize) -> Self {
        let mut names: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
        names.push("t".into());
        names.push("s".into());
        Self::new(names).expect("bargmann chart labels are valid")
    }

    /// `x̂1..x̂d, t̂, ŝ, r̂`, singular at r̂ = 0.
    pub fn bulk(d: usize) -> Self {
        let mut names: Vec<String> = (1..=d).map(|i| format!("xh{i}")).collect();
        names.push("th".into());
        names.push("sh".into());
        names.push("rh".into());
        let r = d + 2;
        Self::new(names)
            .expect("bulk chart labels are valid")
            .with_singular_locus(move |p| p[r] == 0.0)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_singular(&self, p: &[f64]) -> bool {
        self.singular.as_ref().is_some_and(|s| s(p))
    }

    pub(crate) fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, chart has {}",
                p.len(),
                self.dim()
            )));
        }
        if self.is_singular(p) {
            return Err(Error::SingularLocus);
        }
        Ok(())
    }
}

/// Pseudo-Riemannian metric given by its Gram matrix as a function of chart
/// coordinates, evaluable on jets.
#[derive(Clone)]
pub struct MetricField {
    chart: Chart,
    signature: (usize, usize),
    gram: JetMap,
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("chart", &self.chart)
            .field("signature", &self.signature)
            .finish()
    }
}

impl MetricField {
    /// `gram` returns the n×n matrix row-major.
    pub fn new(
        chart: Chart,
        signature: (usize, usize),
        gram: impl Fn(&[Jet2]) -> Vec<Jet2> + Send + Sync + 'static,
    ) -> Result<Self> {
        if signature.0 + signature.1 != chart.dim() {
            return Err(Error::Dimension(format!(
                "signature {:?} does not match chart dimension {}",
                signature,
                chart.dim()
            )));
        }
        Ok(Self {
            chart,
            signature,
            gram: Arc::new(gram),
        })
    }

    /// Flat Bargmann metric Σ dxⁱdxⁱ + 2 dt ds on `x1..xd, t, s`.
    pub fn flat_bargmann(d: usize) -> Self {
        let n = d + 2;
        Self::new(Chart::bargmann(d), (d + 1, 1), move |_x| {
            let g = flat_bargmann_gram(d);
            (0..n * n).map(|k| Jet2::constant(g[k])).collect()
        })
        .expect("flat Bargmann metric is well formed")
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    /// Gram matrix on arbitrary jet inputs, symmetrized.
    pub fn gram_on(&self, x: &[Jet2]) -> Vec<Jet2> {
        let n = self.dim();
        let mut g = (self.gram)(x);
        assert_eq!(g.len(), n * n, "gram callback returned wrong size");
        for i in 0..n {
            for j in (i + 1)..n {
                let m = (&g[i * n + j] + &g[j * n + i]).scale(0.5);
                g[i * n + j] = m.clone();
                g[j * n + i] = m;
            }
        }
        g
    }

    /// Gram matrix with first and second derivatives at `p`.
    pub fn gram_jets(&self, p: &[f64]) -> Result<Vec<Jet2>> {
        self.chart.check_point(p)?;
        let g = self.gram_on(&Jet2::seed(p));
        if g.iter().any(|j| !j.is_finite()) {
            return Err(Error::NonFinite("metric".into()));
        }
        Ok(g)
    }

    /// Gram matrix values at `p`.
    pub fn gram_at(&self, p: &[f64]) -> Result<DenseMatrix> {
        self.chart.check_point(p)?;
        let n = self.dim();
        let g = self.gram_on(&Jet2::constants(p));
        let m = DenseMatrix::from_fn(n, n, |i, j| g[i * n + j].value());
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("metric".into()));
        }
        Ok(m)
    }

    /// Conformally rescaled metric Ω²·g.
    pub fn conformal(&self, omega: ScalarField) -> MetricField {
        let base = self.clone();
        MetricField {
            chart: self.chart.clone(),
            signature: self.signature,
            gram: Arc::new(move |x: &[Jet2]| {
                let o = omega.eval(x);
                let o2 = &o * &o;
                base.gram_on(x).iter().map(|g| g * &o2).collect()
            }),
        }
    }

    /// g + k·(ω ⊗ ω) for a one-form ω.
    pub fn plus_form_square(&self, k: f64, omega: OneForm) -> MetricField {
        let base = self.clone();
        let n = self.dim();
        MetricField {
            chart: self.chart.clone(),
            signature: self.signature,
            gram: Arc::new(move |x: &[Jet2]| {
                let w = omega.eval(x);
                let mut g = base.gram_on(x);
                for a in 0..n {
                    for b in 0..n {
                        g[a * n + b] += (&w[a] * &w[b]).scale(k);
                    }
                }
                g
            }),
        }
    }
}

/// Gram matrix of the flat Bargmann metric, row-major (d+2)².
pub fn flat_bargmann_gram(d: usize) -> Vec<f64> {
    let n = d + 2;
    let mut g = vec![0.0; n * n];
    for i in 0..d {
        g[i * n + i] = 1.0;
    }
    g[d * n + d + 1] = 1.0;
    g[(d + 1) * n + d] = 1.0;
    g
}

/// Vector field with jet-evaluable components.
#[derive(Clone)]
pub struct VectorField {
    dim: usize,
    comps: JetMap,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorField(dim={})", self.dim)
    }
}

impl VectorField {
    pub fn new(dim: usize, comps: impl Fn(&[Jet2]) -> Vec<Jet2> + Send + Sync + 'static) -> Self {
        Self {
            dim,
            comps: Arc::new(comps),
        }
    }

    /// Coordinate vector field ∂/∂x_index.
    pub fn coordinate(dim: usize, index: usize) -> Self {
        Self::new(dim, move |_| {
            (0..dim)
                .map(|i| Jet2::constant(if i == index { 1.0 } else { 0.0 }))
                .collect()
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[Jet2]) -> Vec<Jet2> {
        let v = (self.comps)(x);
        assert_eq!(v.len(), self.dim, "vector field returned wrong size");
        v
    }

    pub fn jets_at(&self, p: &[f64]) -> Vec<Jet2> {
        self.eval(&Jet2::seed(p))
    }

    pub fn at(&self, p: &[f64]) -> Vec<f64> {
        self.eval(&Jet2::constants(p))
            .iter()
            .map(Jet2::value)
            .collect()
    }

    /// Metric dual g(V, ·).
    pub fn lower(&self, metric: &MetricField) -> OneForm {
        let v = self.clone();
        let m = metric.clone();
        let n = self.dim;
        OneForm::new(n, move |x| {
            let g = m.gram_on(x);
            let vx = v.eval(x);
            (0..n)
                .map(|a| (0..n).map(|b| &g[a * n + b] * &vx[b]).sum())
                .collect()
        })
    }

    pub fn plus(&self, other: &VectorField, k: f64) -> VectorField {
        let (a, b) = (self.clone(), other.clone());
        VectorField::new(self.dim, move |x| {
            a.eval(x)
                .iter()
                .zip(b.eval(x))
                .map(|(u, v)| u + v.scale(k))
                .collect()
        })
    }
}

/// One-form with jet-evaluable components.
#[derive(Clone)]
pub struct OneForm {
    dim: usize,
    comps: JetMap,
}

impl fmt::Debug for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OneForm(dim={})", self.dim)
    }
}

impl OneForm {
    pub fn new(dim: usize, comps: impl Fn(&[Jet2]) -> Vec<Jet2> + Send + Sync + 'static) -> Self {
        Self {
            dim,
            comps: Arc::new(comps),
        }
    }

    /// dx_index.
    pub fn coordinate(dim: usize, index: usize) -> Self {
        Self::new(dim, move |_| {
            (0..dim)
                .map(|i| Jet2::constant(if i == index { 1.0 } else { 0.0 }))
                .collect()
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[Jet2]) -> Vec<Jet2> {
        let w = (self.comps)(x);
        assert_eq!(w.len(), self.dim, "one-form returned wrong size");
        w
    }

    pub fn jets_at(&self, p: &[f64]) -> Vec<Jet2> {
        self.eval(&Jet2::seed(p))
    }

    pub fn at(&self, p: &[f64]) -> Vec<f64> {
        self.eval(&Jet2::constants(p))
            .iter()
            .map(Jet2::value)
            .collect()
    }

    /// ω(V) as a scalar field.
    pub fn contract(&self, v: &VectorField) -> ScalarField {
        let (w, v) = (self.clone(), v.clone());
        ScalarField::new(move |x| crate::numkernel::dot(&w.eval(x), &v.eval(x)))
    }
}

/// Real scalar function of the chart coordinates.
#[derive(Clone)]
pub struct ScalarField {
    f: JetScalarFn,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarField")
    }
}

impl ScalarField {
    pub fn new(f: impl Fn(&[Jet2]) -> Jet2 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f) }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| Jet2::constant(c))
    }

    pub fn eval(&self, x: &[Jet2]) -> Jet2 {
        (self.f)(x)
    }

    pub fn jet_at(&self, p: &[f64]) -> Jet2 {
        self.eval(&Jet2::seed(p))
    }

    pub fn at(&self, p: &[f64]) -> f64 {
        self.eval(&Jet2::constants(p)).value()
    }
}

/// Complex scalar function stored as a (real, imaginary) pair of jets.
#[derive(Clone)]
pub struct ComplexField {
    f: JetComplexFn,
}

impl fmt::Debug for ComplexField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexField")
    }
}

impl ComplexField {
    pub fn new(f: impl Fn(&[Jet2]) -> (Jet2, Jet2) + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f) }
    }

    pub fn from_real(f: ScalarField) -> Self {
        Self::new(move |x| (f.eval(x), Jet2::constant(0.0)))
    }

    /// exp(i·phase).
    pub fn phase(phase: ScalarField) -> Self {
        Self::new(move |x| {
            let p = phase.eval(x);
            (p.cos(), p.sin())
        })
    }

    pub fn eval(&self, x: &[Jet2]) -> (Jet2, Jet2) {
        (self.f)(x)
    }

    pub fn re(&self) -> ScalarField {
        let c = self.clone();
        ScalarField::new(move |x| c.eval(x).0)
    }

    pub fn im(&self) -> ScalarField {
        let c = self.clone();
        ScalarField::new(move |x| c.eval(x).1)
    }

    pub fn at(&self, p: &[f64]) -> num_complex::Complex64 {
        let (r, i) = self.eval(&Jet2::constants(p));
        num_complex::Complex64::new(r.value(), i.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_rejects_bad_labels() {
        assert!(Chart::new(["x"]).is_err());
        assert!(Chart::new(["x", "x"]).is_err());
        let c = Chart::bargmann(2);
        assert_eq!(c.names(), &["x1", "x2", "t", "s"]);
        assert_eq!(c.index_of("t"), Some(2));
    }

    #[test]
    fn bulk_chart_singular_at_boundary() {
        let c = Chart::bulk(1);
        assert!(c.is_singular(&[0.1, 0.2, 0.3, 0.0]));
        assert!(!c.is_singular(&[0.1, 0.2, 0.3, 0.5]));
    }

    #[test]
    fn flat_gram_for_one_spatial_dimension() {
        let g = MetricField::flat_bargmann(1)
            .gram_at(&[0.3, 0.1, -0.2])
            .unwrap();
        let expect =
            DenseMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        assert_eq!(g, expect);
    }

    #[test]
    fn signature_must_match_dimension() {
        assert!(MetricField::new(Chart::bargmann(1), (1, 1), |_| vec![]).is_err());
    }
}
