use crate::error::{Error, Result};
use crate::numkernel::{DenseMatrix, DenseVector};

/// Index layout of R^{d+2,2}: x¹..x^d, t, s, then the null pair u, v.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub d: usize,
}

impl Layout {
    pub fn n(self) -> usize {
        self.d + 4
    }
    /// Dimension of the Bargmann block (x, t, s).
    pub fn m(self) -> usize {
        self.d + 2
    }
    pub fn t(self) -> usize {
        self.d
    }
    pub fn s(self) -> usize {
        self.d + 1
    }
    pub fn u(self) -> usize {
        self.d + 2
    }
    pub fn v(self) -> usize {
        self.d + 3
    }
}

/// The ambient metric G of signature (d+2, 2), its alternate diagonal form
/// G' = diag(1_d, D, D) with D = diag(1, −1), and the change of basis
/// `basis` with basisᵀ G basis = G'.
#[derive(Clone, Debug, PartialEq)]
pub struct AmbientMetric {
    layout: Layout,
    g: DenseMatrix,
    g_inv: DenseMatrix,
    g_prime: DenseMatrix,
    basis: DenseMatrix,
    basis_inv: DenseMatrix,
}

impl AmbientMetric {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Contract(
                "spatial dimension must be at least 1".into(),
            ));
        }
        let l = Layout { d };
        let n = l.n();
        let mut g = DenseMatrix::zeros(n, n);
        for i in 0..d {
            g[(i, i)] = 1.0;
        }
        for (a, b) in [(l.t(), l.s()), (l.u(), l.v())] {
            g[(a, b)] = 1.0;
            g[(b, a)] = 1.0;
        }
        let mut g_prime = DenseMatrix::identity(n, n);
        g_prime[(l.s(), l.s())] = -1.0;
        g_prime[(l.v(), l.v())] = -1.0;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut basis = DenseMatrix::zeros(n, n);
        for i in 0..d {
            basis[(i, i)] = 1.0;
        }
        for (a, b) in [(l.t(), l.s()), (l.u(), l.v())] {
            // columns (e_a + e_b)/√2 and (e_a − e_b)/√2
            basis[(a, a)] = h;
            basis[(b, a)] = h;
            basis[(a, b)] = h;
            basis[(b, b)] = -h;
        }
        let g_inv = g.clone(); // G is an involution
        let basis_inv = basis
            .clone()
            .try_inverse()
            .expect("basis change is invertible");
        Ok(Self {
            layout: l,
            g,
            g_inv,
            g_prime,
            basis,
            basis_inv,
        })
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn d(&self) -> usize {
        self.layout.d
    }

    pub fn n(&self) -> usize {
        self.layout.n()
    }

    pub fn gram(&self) -> &DenseMatrix {
        &self.g
    }

    pub fn gram_inv(&self) -> &DenseMatrix {
        &self.g_inv
    }

    pub fn gram_prime(&self) -> &DenseMatrix {
        &self.g_prime
    }

    pub fn basis_change(&self) -> &DenseMatrix {
        &self.basis
    }

    /// Bargmann-block Gram g (spatial identity, t–s null pair).
    pub fn bargmann_gram(&self) -> DenseMatrix {
        let m = self.layout.m();
        self.g.view((0, 0), (m, m)).into_owned()
    }

    /// Ū·V = Uᵀ G V.
    pub fn inner(&self, u: &DenseVector, v: &DenseVector) -> f64 {
        (u.transpose() * &self.g * v)[(0, 0)]
    }

    /// G-adjoint Ā = G⁻¹AᵀG.
    pub fn adjoint(&self, a: &DenseMatrix) -> DenseMatrix {
        &self.g_inv * a.transpose() * &self.g
    }

    /// Max entry of G·Z + (G·Z)ᵀ; zero iff Z is G-skew.
    pub fn skew_defect(&self, z: &DenseMatrix) -> f64 {
        let gz = &self.g * z;
        (&gz + gz.transpose()).amax()
    }

    /// Max entry of ĀA − 1; zero iff A is a G-isometry.
    pub fn isometry_defect(&self, a: &DenseMatrix) -> f64 {
        (self.adjoint(a) * a - DenseMatrix::identity(self.n(), self.n())).amax()
    }

    /// Representation of an endomorphism in the G' basis.
    pub fn to_prime(&self, z: &DenseMatrix) -> DenseMatrix {
        &self.basis_inv * z * &self.basis
    }

    pub fn from_prime(&self, z: &DenseMatrix) -> DenseMatrix {
        &self.basis * z * &self.basis_inv
    }

    pub fn unit(&self, i: usize) -> DenseVector {
        let mut e = DenseVector::zeros(self.n());
        e[i] = 1.0;
        e
    }
}

/// Totally null pair (P, Q) with Z = P·Q̄ − Q·P̄.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecialNullVector {
    pub p: DenseVector,
    pub q: DenseVector,
    pub z: DenseMatrix,
}

/// Z = P·Q̄ − Q·P̄ for a totally null pair spanning a plane.
pub fn make_special(
    metric: &AmbientMetric,
    p: &DenseVector,
    q: &DenseVector,
) -> Result<SpecialNullVector> {
    let n = metric.n();
    if p.len() != n || q.len() != n {
        return Err(Error::Dimension(format!(
            "ambient vectors must have {n} components"
        )));
    }
    let scale = p.norm() * q.norm();
    let pbar = p.transpose() * metric.gram();
    let qbar = q.transpose() * metric.gram();
    let z = p * &qbar - q * &pbar;
    if !(scale > 0.0) || z.norm() <= 1e-12 * scale {
        return Err(Error::DegeneratePair);
    }
    let nullity = [metric.inner(p, p), metric.inner(p, q), metric.inner(q, q)]
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if nullity > 1e-12 * scale.max(1.0) {
        return Err(Error::Contract(format!(
            "P and Q must span a totally null plane (defect {nullity:.3e})"
        )));
    }
    Ok(SpecialNullVector {
        p: p.clone(),
        q: q.clone(),
        z,
    })
}

/// The distinguished element with P₀ = e_s, Q₀ = e_u.
pub fn build_z0(d: usize) -> Result<SpecialNullVector> {
    let m = AmbientMetric::new(d)?;
    let l = m.layout();
    make_special(&m, &m.unit(l.s()), &m.unit(l.u()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{rank_nullspace, signature, DEFAULT_RANK_TOL};

    #[test]
    fn signature_and_prime_form() {
        for d in 1..=4 {
            let m = AmbientMetric::new(d).unwrap();
            assert_eq!(signature(m.gram(), 1e-12).unwrap(), (d + 2, 2));
            let bt = m.basis_change().transpose() * m.gram() * m.basis_change();
            assert!((bt - m.gram_prime()).amax() < 1e-15);
        }
    }

    #[test]
    fn z0_entries() {
        let z = build_z0(1).unwrap();
        let nonzero: Vec<(usize, usize, f64)> = (0..5)
            .flat_map(|i| (0..5).map(move |j| (i, j)))
            .filter(|&(i, j)| z.z[(i, j)] != 0.0)
            .map(|(i, j)| (i, j, z.z[(i, j)]))
            .collect();
        assert_eq!(nonzero, vec![(2, 4, 1.0), (3, 1, -1.0)]);
        assert_eq!((&z.z * &z.z).amax(), 0.0);
        assert_eq!(rank_nullspace(&z.z, DEFAULT_RANK_TOL).unwrap().rank, 2);
        let m = AmbientMetric::new(1).unwrap();
        assert_eq!(m.skew_defect(&z.z), 0.0);
    }

    #[test]
    fn parallel_pair_is_degenerate() {
        let m = AmbientMetric::new(2).unwrap();
        let p = m.unit(3);
        assert_eq!(
            make_special(&m, &p, &(&p * 2.0)),
            Err(Error::DegeneratePair)
        );
    }

    #[test]
    fn z0_in_prime_basis() {
        let m = AmbientMetric::new(2).unwrap();
        let zp = m.to_prime(&build_z0(2).unwrap().z);
        // blocks U at (t,s)×(u,v) and V at (u,v)×(t,s)
        let expected = [
            ((2, 4), 0.5),
            ((2, 5), -0.5),
            ((3, 4), -0.5),
            ((3, 5), 0.5),
            ((4, 2), -0.5),
            ((4, 3), -0.5),
            ((5, 2), -0.5),
            ((5, 3), -0.5),
        ];
        let mut want = DenseMatrix::zeros(6, 6);
        for ((i, j), v) in expected {
            want[(i, j)] = v;
        }
        assert!((zp - want).amax() < 1e-15);
    }
}
