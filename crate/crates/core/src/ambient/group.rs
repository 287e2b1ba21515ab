use crate::bargmann::ChartMap;
use crate::error::{Error, Result};
use crate::numkernel::{expm, DenseMatrix, DenseVector, Jet2, SeededSampler};

use super::algebra::AlgebraElement;
use super::metric::{build_z0, AmbientMetric, Layout};

/// Block data of a stabilizer element:
///
/// ```text
///     [ L    aξ  C ]
/// A = [ B*   b   d ]
///     [ −aξ* 0   e ]
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct GroupBlocks {
    pub l: DenseMatrix,
    pub b_vec: DenseVector,
    pub c: DenseVector,
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub e: f64,
}

impl GroupBlocks {
    pub fn identity(d: usize) -> Self {
        Self {
            l: DenseMatrix::identity(d + 2, d + 2),
            b_vec: DenseVector::zeros(d + 2),
            c: DenseVector::zeros(d + 2),
            a: 0.0,
            b: 1.0,
            d: 0.0,
            e: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    pub matrix: DenseMatrix,
    pub blocks: GroupBlocks,
}

/// Labels of the stabilizer constraints, in the order they are checked.
pub const CONSTRAINT_LABELS: [&str; 7] = [
    "L xi = e xi",
    "L* xi = b xi",
    "L* L - a(xi B* + B xi*) = 1",
    "L* C - a d xi + e B = 0",
    "a xi* C + b e = 1",
    "xi*(B + C) = 0",
    "C* C + 2 d e = 0",
];

/// Tolerance of the constraint and membership checks, relative to the
/// size of the blocks.
pub const GROUP_TOL: f64 = 1e-10;

fn matrix_from_blocks(l: Layout, g: &DenseMatrix, bl: &GroupBlocks) -> DenseMatrix {
    let m = l.m();
    let mut a = DenseMatrix::zeros(l.n(), l.n());
    a.view_mut((0, 0), (m, m)).copy_from(&bl.l);
    a[(l.s(), l.u())] = bl.a;
    a.view_mut((0, l.v()), (m, 1)).copy_from(&bl.c);
    let b_star = bl.b_vec.transpose() * g;
    for j in 0..m {
        a[(l.u(), j)] = b_star[j];
    }
    a[(l.u(), l.u())] = bl.b;
    a[(l.u(), l.v())] = bl.d;
    a[(l.v(), l.t())] = -bl.a;
    a[(l.v(), l.v())] = bl.e;
    a
}

/// Residuals of the seven stabilizer constraints, in order.
pub fn constraint_residuals(metric: &AmbientMetric, bl: &GroupBlocks) -> [f64; 7] {
    let l = metric.layout();
    let m = l.m();
    let g = metric.bargmann_gram();
    let g_inv = g.clone(); // the Bargmann block is an involution too
    let star = |x: &DenseMatrix| &g_inv * x.transpose() * &g;
    let xi = {
        let mut v = DenseVector::zeros(m);
        v[l.s()] = 1.0;
        v
    };
    let xi_star = xi.transpose() * &g;
    let b_star = bl.b_vec.transpose() * &g;
    let l_star = star(&bl.l);
    let id = DenseMatrix::identity(m, m);
    let r1 = (&bl.l * &xi - &xi * bl.e).amax();
    let r2 = (&l_star * &xi - &xi * bl.b).amax();
    let r3 = (&l_star * &bl.l - (&xi * &b_star + &bl.b_vec * &xi_star) * bl.a - id).amax();
    let r4 = (&l_star * &bl.c - &xi * (bl.a * bl.d) + &bl.b_vec * bl.e).amax();
    let r5 = (bl.a * (&xi_star * &bl.c)[(0, 0)] + bl.b * bl.e - 1.0).abs();
    let r6 = (&xi_star * (&bl.b_vec + &bl.c))[(0, 0)].abs();
    let r7 = ((bl.c.transpose() * &g * &bl.c)[(0, 0)] + 2.0 * bl.d * bl.e).abs();
    [r1, r2, r3, r4, r5, r6, r7]
}

fn block_scale(bl: &GroupBlocks) -> f64 {
    [
        bl.l.amax(),
        bl.b_vec.amax(),
        bl.c.amax(),
        bl.a.abs(),
        bl.b.abs(),
        bl.d.abs(),
        bl.e.abs(),
    ]
    .iter()
    .fold(1.0f64, |m, v| m.max(*v))
}

/// Builds the stabilizer element from its blocks, reporting the first
/// violated constraint.
pub fn assemble_group_element(metric: &AmbientMetric, bl: GroupBlocks) -> Result<GroupElement> {
    let l = metric.layout();
    let m = l.m();
    if bl.l.shape() != (m, m) || bl.b_vec.len() != m || bl.c.len() != m {
        return Err(Error::Dimension("group block sizes do not match d".into()));
    }
    let scale = block_scale(&bl);
    let tol = GROUP_TOL * scale * scale;
    for (k, r) in constraint_residuals(metric, &bl).into_iter().enumerate() {
        if !(r <= tol) {
            return Err(Error::Constraint {
                index: k + 1,
                label: CONSTRAINT_LABELS[k],
                residual: r,
            });
        }
    }
    let a = matrix_from_blocks(l, &metric.bargmann_gram(), &bl);
    let iso = metric.isometry_defect(&a);
    if !(iso <= tol) {
        return Err(Error::Contract(format!(
            "assembled matrix is not a G-isometry ({iso:.3e})"
        )));
    }
    let z0 = build_z0(l.d)?.z;
    let comm = (&a * &z0 - &z0 * &a).amax();
    if !(comm <= tol) {
        return Err(Error::Contract(format!(
            "assembled matrix does not commute with Z0 ({comm:.3e})"
        )));
    }
    Ok(GroupElement {
        matrix: a,
        blocks: bl,
    })
}

/// Reads the blocks of a matrix and assembles it, checking that the entries
/// outside the blocks have the prescribed form.
pub fn group_element_from_matrix(metric: &AmbientMetric, a: &DenseMatrix) -> Result<GroupElement> {
    let l = metric.layout();
    let m = l.m();
    if a.shape() != (l.n(), l.n()) {
        return Err(Error::Dimension("group matrix has the wrong size".into()));
    }
    let g = metric.bargmann_gram();
    let b_row = a.view((l.u(), 0), (1, m)).into_owned();
    let bl = GroupBlocks {
        l: a.view((0, 0), (m, m)).into_owned(),
        b_vec: (b_row * &g).transpose().column(0).into_owned(),
        c: a.view((0, l.v()), (m, 1)).column(0).into_owned(),
        a: a[(l.s(), l.u())],
        b: a[(l.u(), l.u())],
        d: a[(l.u(), l.v())],
        e: a[(l.v(), l.v())],
    };
    let rebuilt = matrix_from_blocks(l, &g, &bl);
    let shape = (&rebuilt - a).amax();
    let scale = a.amax().max(1.0);
    if shape > GROUP_TOL * scale {
        return Err(Error::Contract(format!(
            "matrix is not of stabilizer block form ({shape:.3e})"
        )));
    }
    assemble_group_element(metric, bl)
}

impl GroupElement {
    pub fn identity(metric: &AmbientMetric) -> Self {
        assemble_group_element(metric, GroupBlocks::identity(metric.d()))
            .expect("identity is in the group")
    }

    /// exp(Z) of a commutant element.
    pub fn exp(metric: &AmbientMetric, z: &AlgebraElement) -> Result<Self> {
        group_element_from_matrix(metric, &expm(&z.matrix))
    }

    pub fn inverse(&self, metric: &AmbientMetric) -> Result<Self> {
        group_element_from_matrix(metric, &metric.adjoint(&self.matrix))
    }

    pub fn compose(&self, metric: &AmbientMetric, other: &GroupElement) -> Result<Self> {
        group_element_from_matrix(metric, &(&self.matrix * &other.matrix))
    }

    pub fn layout(&self) -> Layout {
        Layout {
            d: self.blocks.l.nrows() - 2,
        }
    }
}

/// exp of a random combination of `basis` with coefficients uniform in
/// [−scale, scale].
pub fn random_group_element(
    metric: &AmbientMetric,
    basis: &[AlgebraElement],
    sampler: &mut SeededSampler,
    scale: f64,
) -> Result<GroupElement> {
    let n = metric.n();
    let mut z = DenseMatrix::zeros(n, n);
    for b in basis {
        z += &b.matrix * sampler.uniform(-scale, scale);
    }
    GroupElement::exp(
        metric,
        &AlgebraElement {
            matrix: z,
            params: None,
        },
    )
}

/// X(x, r) = (1/r)(x, −½x*x, 1) in the ambient space.
pub fn ambient_vector(d: usize, x: &[f64], r: f64) -> DenseVector {
    let l = Layout { d };
    let mut v = DenseVector::zeros(l.n());
    let mut xx = 2.0 * x[l.t()] * x[l.s()];
    for xi in &x[..d] {
        xx += xi * xi;
    }
    for (i, xi) in x.iter().enumerate() {
        v[i] = xi / r;
    }
    v[l.u()] = -0.5 * xx / r;
    v[l.v()] = 1.0 / r;
    v
}

/// Minimum |e − aξ*x| on which the projective action is evaluated.
pub const MIN_DENOMINATOR: f64 = 1e-8;

/// Projective action on jets: returns (x', e − aξ*x).
pub fn projective_action_jets(bl: &GroupBlocks, x: &[Jet2]) -> (Vec<Jet2>, Jet2) {
    let m = bl.l.nrows();
    let d = m - 2;
    let (t, s) = (d, d + 1);
    let mut xx = (&x[t] * &x[s]).scale(2.0);
    for xi in &x[..d] {
        xx += xi.square();
    }
    let den = Jet2::constant(bl.e) - x[t].scale(bl.a);
    let inv = den.recip();
    let out = (0..m)
        .map(|i| {
            let mut num = Jet2::constant(bl.c[i]);
            for j in 0..m {
                if bl.l[(i, j)] != 0.0 {
                    num += x[j].scale(bl.l[(i, j)]);
                }
            }
            if i == s {
                num -= xx.scale(0.5 * bl.a);
            }
            &num * &inv
        })
        .collect();
    (out, den)
}

/// x' = (Lx − ½a(x*x)ξ + C)/(e − aξ*x), r' = r/(e − aξ*x).
pub fn projective_action(a: &GroupElement, x: &[f64], r: f64) -> Result<(Vec<f64>, f64)> {
    let m = a.blocks.l.nrows();
    if x.len() != m {
        return Err(Error::Dimension(format!(
            "Bargmann point must have {m} coordinates"
        )));
    }
    let (xs, den) = projective_action_jets(&a.blocks, &Jet2::constants(x));
    let den = den.value();
    if !(den.abs() > MIN_DENOMINATOR) {
        return Err(Error::ChartEscape(format!("e - a xi*x = {den:.3e}")));
    }
    Ok((xs.iter().map(Jet2::value).collect(), r / den))
}

/// Margin kept between sample points and the pole of a projective map.
pub const POLE_MARGIN: f64 = 0.05;

/// Φ_A on Bargmann space as a chart map. The inverse is Φ_{A⁻¹} and
/// |det DΦ_{A⁻¹}(y)| = |e' − a'ξ*y|^{−(d+2)} with (a', e') the blocks of A⁻¹.
pub fn projective_map(metric: &AmbientMetric, a: &GroupElement) -> Result<ChartMap> {
    let inv = a.inverse(metric)?;
    let n = metric.layout().m() as i32;
    let t = metric.layout().t();
    let fwd = a.blocks.clone();
    let back = inv.blocks.clone();
    let jac = inv.blocks.clone();
    let dom = inv.blocks.clone();
    Ok(ChartMap::new(
        metric.layout().m(),
        move |x| projective_action_jets(&fwd, x).0,
        move |y| projective_action_jets(&back, y).0,
        move |y| {
            let den = Jet2::constant(jac.e) - y[t].scale(jac.a);
            den.abs().powi(-n)
        },
    )
    .with_inverse_domain(move |y| {
        let den = dom.e - dom.a * y[t];
        if den.abs() > POLE_MARGIN {
            Ok(())
        } else {
            Err(Error::ChartEscape(format!("e - a xi*y = {den:.3e}")))
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::algebra::{assemble_sch, SchParams};

    fn metric(d: usize) -> AmbientMetric {
        AmbientMetric::new(d).unwrap()
    }

    #[test]
    fn identity_blocks() {
        let m = metric(2);
        let id = GroupElement::identity(&m);
        assert_eq!(id.matrix, DenseMatrix::identity(6, 6));
        let (x, r) = projective_action(&id, &[0.1, 0.2, 0.3, 0.4], 2.0).unwrap();
        assert_eq!(x, vec![0.1, 0.2, 0.3, 0.4]);
        assert_eq!(r, 2.0);
    }

    #[test]
    fn dilation_exponential_is_in_group() {
        let m = metric(1);
        let z = assemble_sch(&m, &SchParams::dilation(1, 0.5)).unwrap();
        let a = GroupElement::exp(&m, &z).unwrap();
        assert!((a.blocks.e - (-0.5f64).exp()).abs() < 1e-13);
        assert!((a.blocks.b - 0.5f64.exp()).abs() < 1e-13);
    }

    #[test]
    fn broken_metric_constraint_is_named() {
        let m = metric(1);
        let mut bl = GroupBlocks::identity(1);
        bl.l[(0, 0)] = 2.0;
        match assemble_group_element(&m, bl) {
            Err(Error::Constraint { index, label, .. }) => {
                assert_eq!(index, 3);
                assert_eq!(label, CONSTRAINT_LABELS[2]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn translation_shifts_points() {
        let m = metric(2);
        let gamma = DenseVector::from_vec(vec![0.5, -1.0, 0.25, 2.0]);
        let z = assemble_sch(&m, &SchParams::translation(gamma.clone())).unwrap();
        let a = GroupElement::exp(&m, &z).unwrap();
        let x = [0.1, 0.2, 0.3, 0.4];
        let (y, r) = projective_action(&a, &x, 1.5).unwrap();
        for i in 0..4 {
            assert!((y[i] - x[i] - gamma[i]).abs() < 1e-15);
        }
        assert_eq!(r, 1.5);
    }

    #[test]
    fn expansion_closed_form() {
        let m = metric(1);
        let alpha = 0.2;
        let a = GroupElement::exp(
            &m,
            &assemble_sch(&m, &SchParams::expansion(1, alpha)).unwrap(),
        )
        .unwrap();
        let x = [0.7, 0.5, -0.3];
        let (y, _) = projective_action(&a, &x, 1.0).unwrap();
        let k = 1.0 - alpha * x[1];
        assert!((y[0] - x[0] / k).abs() < 1e-15);
        assert!((y[1] - x[1] / k).abs() < 1e-15);
        assert!((y[2] - (x[2] - 0.5 * alpha * x[0] * x[0] / k)).abs() < 1e-15);
    }

    #[test]
    fn pole_is_chart_escape() {
        let m = metric(1);
        let a = GroupElement::exp(
            &m,
            &assemble_sch(&m, &SchParams::expansion(1, 1.0)).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            projective_action(&a, &[0.0, 1.0, 0.0], 1.0),
            Err(Error::ChartEscape(_))
        ));
    }
}
