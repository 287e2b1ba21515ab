use crate::error::{Error, Result};
use crate::numkernel::{commutator, frobenius, DenseMatrix};
use crate::report::{CheckRecord, VerificationReport};

use super::metric::{build_z0, AmbientMetric};

/// The generators I, P, T, PT of the four components of O(d+2,2), written
/// in the G' basis, with S = diag(−1, 1, …, 1).
#[derive(Clone, Debug)]
pub struct ComponentGenerators {
    pub i: DenseMatrix,
    pub p: DenseMatrix,
    pub t: DenseMatrix,
    pub pt: DenseMatrix,
    pub z0_prime: DenseMatrix,
}

pub fn component_generators(d: usize) -> Result<ComponentGenerators> {
    let metric = AmbientMetric::new(d)?;
    let n = metric.n();
    let i = DenseMatrix::identity(n, n);
    let mut p = i.clone();
    p[(0, 0)] = -1.0;
    let mut t = i.clone();
    t[(n - 1, n - 1)] = -1.0;
    let pt = &p * &t;
    let z0_prime = metric.to_prime(&build_z0(d)?.z);
    Ok(ComponentGenerators {
        i,
        p,
        t,
        pt,
        z0_prime,
    })
}

/// Commutators of the component generators with Z₀'.
pub fn component_witnesses(d: usize) -> Result<VerificationReport> {
    let metric = AmbientMetric::new(d)?;
    let c = component_generators(d)?;
    let gp = metric.gram_prime();
    let mut r = VerificationReport::new();
    for (name, m) in [("i", &c.i), ("p", &c.p)] {
        let comm = frobenius(&commutator(m, &c.z0_prime));
        r.push(CheckRecord::below(
            format!("commutes_{name}"),
            format!("[{}, Z0'] = 0", name.to_uppercase()),
            comm,
            0.0,
        ));
    }
    for (name, m) in [("t", &c.t), ("pt", &c.pt)] {
        let comm = frobenius(&commutator(m, &c.z0_prime));
        r.push(CheckRecord::above(
            format!("noncommuting_{name}"),
            format!("|[{}, Z0']| > 0.1", name.to_uppercase()),
            comm,
            0.1,
        ));
    }
    let mut iso = 0.0f64;
    for m in [&c.p, &c.t, &c.pt] {
        iso = iso.max((m.transpose() * gp * m - gp).amax());
    }
    r.push(CheckRecord::below(
        "generators_are_isometries",
        "P, T, PT preserve G'",
        iso,
        0.0,
    ));
    let s = c.p.view((0, 0), (d, d)).into_owned();
    let sq = (&s * &s - DenseMatrix::identity(d, d)).amax();
    r.push(
        CheckRecord::below(
            "reflection_s",
            "S^2 = 1 and det S = -1",
            sq + (s.determinant() + 1.0).abs(),
            0.0,
        )
        .with_values(-1.0, s.determinant()),
    );
    Ok(r)
}

/// ϖ and dϖ at A along tangent vectors δA, δ'A, with the comparison
/// against P̄δQ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoadjointValue {
    /// −½Tr(Z₀A⁻¹δA)
    pub varpi: f64,
    /// δP̄·δ'Q − δ'P̄·δQ
    pub d_varpi: f64,
    /// P̄·δQ with P = Ae_s, Q = Ae_u
    pub pbar_dq: f64,
    /// Observed ratio ϖ / P̄δQ when the latter is not negligible.
    pub sign: Option<f64>,
}

fn tangent_defect(metric: &AmbientMetric, a_inv: &DenseMatrix, da: &DenseMatrix) -> f64 {
    metric.skew_defect(&(a_inv * da)) / da.amax().max(1.0)
}

pub fn coadjoint_oneform(
    metric: &AmbientMetric,
    a: &DenseMatrix,
    da: &DenseMatrix,
    da2: &DenseMatrix,
) -> Result<CoadjointValue> {
    let iso = metric.isometry_defect(a);
    if iso > 1e-10 * a.amax().max(1.0).powi(2) {
        return Err(Error::Contract(format!(
            "base point is not a G-isometry ({iso:.3e})"
        )));
    }
    let a_inv = metric.adjoint(a);
    for dm in [da, da2] {
        let def = tangent_defect(metric, &a_inv, dm);
        if def > 1e-10 * a.amax().max(1.0).powi(2) {
            return Err(Error::Contract(format!(
                "tangent vector is not tangent to O(d+2,2) ({def:.3e})"
            )));
        }
    }
    let l = metric.layout();
    let z0 = build_z0(l.d)?.z;
    let varpi = -0.5 * (&z0 * &a_inv * da).trace();
    let g = metric.gram();
    let col = |m: &DenseMatrix, k: usize| m.column(k).into_owned();
    let p = col(a, l.s());
    let dq = col(da, l.u());
    let pbar_dq = (p.transpose() * g * &dq)[(0, 0)];
    let (dp, dq1) = (col(da, l.s()), col(da, l.u()));
    let (dp2, dq2) = (col(da2, l.s()), col(da2, l.u()));
    let d_varpi = (dp.transpose() * g * &dq2)[(0, 0)] - (dp2.transpose() * g * &dq1)[(0, 0)];
    let sign = if pbar_dq.abs() > 1e-8 {
        Some((varpi / pbar_dq * 1e6).round() / 1e6)
    } else {
        None
    };
    Ok(CoadjointValue {
        varpi,
        d_varpi,
        pbar_dq,
        sign,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witnesses_d1() {
        let r = component_witnesses(1).unwrap();
        assert!(r.all_pass(), "{r:?}");
        let c = component_generators(1).unwrap();
        assert!((frobenius(&commutator(&c.t, &c.z0_prime)) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn varpi_of_z0_at_identity() {
        let m = AmbientMetric::new(2).unwrap();
        let z0 = build_z0(2).unwrap().z;
        let id = DenseMatrix::identity(6, 6);
        let v = coadjoint_oneform(&m, &id, &z0, &z0).unwrap();
        assert_eq!(v.varpi, 0.0);
        assert_eq!(v.d_varpi, 0.0);
    }

    #[test]
    fn non_tangent_rejected() {
        let m = AmbientMetric::new(1).unwrap();
        let id = DenseMatrix::identity(5, 5);
        assert!(matches!(
            coadjoint_oneform(&m, &id, &id, &id),
            Err(Error::Contract(_))
        ));
    }
}
