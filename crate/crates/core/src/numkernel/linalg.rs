//! Small dense linear algebra on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};

use crate::error::{Error, Result};

pub type DenseMatrix = DMatrix<f64>;
pub type DenseVector = DVector<f64>;

/// Relative singular-value cutoff used for every dimension count.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct RankNullspace {
    pub rank: usize,
    /// Orthonormal basis of the kernel, one vector per entry.
    pub nullspace: Vec<DenseVector>,
    pub sigma_max: f64,
}

impl RankNullspace {
    pub fn nullity(&self) -> usize {
        self.nullspace.len()
    }
}

/// Numerical rank and kernel of `m`: singular values above `tol·σ_max` count
/// towards the rank, the right singular vectors of the rest span the kernel.
pub fn rank_nullspace(m: &DenseMatrix, tol: f64) -> Result<RankNullspace> {
    if !(tol > 0.0) {
        return Err(Error::Contract(format!(
            "rank tolerance must be positive, got {tol}"
        )));
    }
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Ok(RankNullspace {
            rank: 0,
            nullspace: Vec::new(),
            sigma_max: 0.0,
        });
    }
    // nalgebra returns a thin SVD; pad with zero rows so that V is square.
    let padded = if rows < cols {
        let mut p = DenseMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.as_ref().expect("SVD requested V^T");
    let sigma = &svd.singular_values;
    let sigma_max = sigma.iter().cloned().fold(0.0, f64::max);
    let cutoff = tol * sigma_max;
    let mut rank = 0;
    let mut nullspace = Vec::new();
    for (k, &s) in sigma.iter().enumerate() {
        if sigma_max > 0.0 && s > cutoff {
            rank += 1;
        } else {
            nullspace.push(v_t.row(k).transpose());
        }
    }
    Ok(RankNullspace {
        rank,
        nullspace,
        sigma_max,
    })
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sym_eigen(m: &DenseMatrix) -> Result<Vec<f64>> {
    Ok(sym_eigen_pairs(m)?.into_iter().map(|(l, _)| l).collect())
}

/// Eigenpairs of a symmetric matrix, ascending by eigenvalue.
pub fn sym_eigen_pairs(m: &DenseMatrix) -> Result<Vec<(f64, DenseVector)>> {
    if !m.is_square() {
        return Err(Error::Contract("sym_eigen needs a square matrix".into()));
    }
    let scale = m.amax().max(1.0);
    let asym = (m - m.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::Contract(format!(
            "sym_eigen input is not symmetric (max |M - Mᵀ| = {asym:.3e})"
        )));
    }
    let sym = 0.5 * (m + m.transpose());
    let eig = SymmetricEigen::new(sym);
    let mut pairs: Vec<(f64, DenseVector)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &l)| (l, eig.eigenvectors.column(k).into_owned()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs)
}

/// Counts of positive and negative eigenvalues, with zero threshold
/// `tol·max|λ|`.
pub fn signature(m: &DenseMatrix, tol: f64) -> Result<(usize, usize)> {
    let ev = sym_eigen(m)?;
    let big = ev.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    let pos = ev.iter().filter(|&&l| l > tol * big).count();
    let neg = ev.iter().filter(|&&l| l < -tol * big).count();
    Ok((pos, neg))
}

pub fn commutator(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    a * b - b * a
}

pub fn frobenius(a: &DenseMatrix) -> f64 {
    a.norm()
}

/// Frobenius inner product ⟨A, B⟩ = Tr(AᵀB).
pub fn frobenius_dot(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
///
/// Nilpotent inputs terminate the series exactly once a power vanishes.
pub fn expm(a: &DenseMatrix) -> DenseMatrix {
    let n = a.nrows();
    let norm = a.norm();
    if norm == 0.0 {
        return DenseMatrix::identity(n, n);
    }
    let mut squarings = 0u32;
    let mut scaled = a.clone();
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
        scaled /= 2f64.powi(squarings as i32);
    }
    let mut result = DenseMatrix::identity(n, n);
    let mut term = DenseMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / (k as f64);
        let tn = term.norm();
        if tn == 0.0 {
            break;
        }
        result += &term;
        if tn < 1e-18 * result.norm() {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Orthonormalizes a set of matrices in the Frobenius inner product.
/// Directions below `tol` relative norm are dropped.
pub fn orthonormalize_matrices(mats: &[DenseMatrix], tol: f64) -> Vec<DenseMatrix> {
    let mut out: Vec<DenseMatrix> = Vec::new();
    for m in mats {
        let mut v = m.clone();
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for q in &out {
                let c = frobenius_dot(q, &v);
                v -= q * c;
            }
        }
        let nv = v.norm();
        if nv > tol * m.norm().max(f64::MIN_POSITIVE) {
            out.push(v / nv);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_full_rank() {
        let r = rank_nullspace(&DenseMatrix::identity(4, 4), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.rank, 4);
        assert!(r.nullspace.is_empty());
    }

    #[test]
    fn zero_matrix_has_full_kernel() {
        let r = rank_nullspace(&DenseMatrix::zeros(3, 5), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.rank, 0);
        assert_eq!(r.nullity(), 5);
    }

    #[test]
    fn wide_matrix_kernel_is_complete() {
        let m = DenseMatrix::from_row_slice(2, 4, &[1.0, 2.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0]);
        let r = rank_nullspace(&m, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.rank, 2);
        assert_eq!(r.nullity(), 2);
        for v in &r.nullspace {
            assert!((&m * v).norm() <= 10.0 * DEFAULT_RANK_TOL * r.sigma_max);
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
        assert!(r.nullspace[0].dot(&r.nullspace[1]).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_tolerance_rejected() {
        assert!(rank_nullspace(&DenseMatrix::identity(2, 2), 0.0).is_err());
    }

    #[test]
    fn eigen_of_diagonal() {
        let m = DenseMatrix::from_diagonal(&DenseVector::from_vec(vec![1.0, 1.0, -1.0]));
        assert_eq!(sym_eigen(&m).unwrap(), vec![-1.0, 1.0, 1.0]);
    }

    #[test]
    fn asymmetric_rejected() {
        let m = DenseMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(sym_eigen(&m), Err(Error::Contract(_))));
    }

    #[test]
    fn eigen_residuals_small() {
        let m = DenseMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.5, 1.0, -3.0, 0.0, 0.5, 0.0, 1.0]);
        for (l, v) in sym_eigen_pairs(&m).unwrap() {
            assert!((&m * &v - &v * l).norm() < 1e-10 * m.norm());
        }
    }

    #[test]
    fn expm_of_rotation_generator() {
        let a = DenseMatrix::from_row_slice(2, 2, &[0.0, -1.3, 1.3, 0.0]);
        let e = expm(&a);
        assert!((e[(0, 0)] - 1.3f64.cos()).abs() < 1e-14);
        assert!((e[(1, 0)] - 1.3f64.sin()).abs() < 1e-14);
        let big = a * 7.0;
        let e = expm(&big);
        assert!((e[(0, 0)] - 9.1f64.cos()).abs() < 1e-12);
    }

    #[test]
    fn expm_of_nilpotent_is_exact() {
        let a = DenseMatrix::from_row_slice(3, 3, &[0.0, 0.3, 0.0, 0.0, 0.0, 0.2, 0.0, 0.0, 0.0]);
        let e = expm(&a);
        let expect =
            DenseMatrix::from_row_slice(3, 3, &[1.0, 0.3, 0.03, 0.0, 1.0, 0.2, 0.0, 0.0, 1.0]);
        assert!((e - expect).amax() < 1e-16);
    }
}
