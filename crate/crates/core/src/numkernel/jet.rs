//! Second-order jets: a value together with its gradient and Hessian with
//! respect to the chart coordinates.
//!
//! A jet with empty `grad`/`hess` is a constant; it combines with jets of any
//! dimension. Non-constant jets must share the same dimension.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    value: f64,
    grad: Vec<f64>,
    /// Row-major n×n, exactly symmetric.
    hess: Vec<f64>,
}

impl Jet2 {
    /// Builds a jet from explicit parts. The Hessian is symmetrized.
    pub fn new(value: f64, grad: Vec<f64>, hess: Vec<f64>) -> Result<Self> {
        let n = grad.len();
        if hess.len() != n * n {
            return Err(Error::Dimension(format!(
                "jet hessian has {} entries, expected {}",
                hess.len(),
                n * n
            )));
        }
        let mut hess = hess;
        for i in 0..n {
            for j in (i + 1)..n {
                let m = 0.5 * (hess[i * n + j] + hess[j * n + i]);
                hess[i * n + j] = m;
                hess[j * n + i] = m;
            }
        }
        Ok(Self { value, grad, hess })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            value,
            grad: Vec::new(),
            hess: Vec::new(),
        }
    }

    /// The coordinate function `x_index` of an `n`-dimensional chart, at `value`.
    pub fn variable(value: f64, index: usize, n: usize) -> Self {
        assert!(
            index < n,
            "variable index {index} out of range for dimension {n}"
        );
        let mut grad = vec![0.0; n];
        grad[index] = 1.0;
        Self {
            value,
            grad,
            hess: vec![0.0; n * n],
        }
    }

    /// Seeds all coordinates of a point.
    pub fn seed(point: &[f64]) -> Vec<Jet2> {
        let n = point.len();
        point
            .iter()
            .enumerate()
            .map(|(i, &v)| Jet2::variable(v, i, n))
            .collect()
    }

    /// Constant jets for a point (values only, no derivatives).
    pub fn constants(point: &[f64]) -> Vec<Jet2> {
        point.iter().map(|&v| Jet2::constant(v)).collect()
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Dimension of the jet; 0 for constants.
    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn is_constant(&self) -> bool {
        self.grad.is_empty()
    }

    /// ∂f/∂x_i, zero for constants.
    pub fn d(&self, i: usize) -> f64 {
        self.grad.get(i).copied().unwrap_or(0.0)
    }

    /// ∂²f/∂x_i∂x_j, zero for constants.
    pub fn dd(&self, i: usize, j: usize) -> f64 {
        let n = self.grad.len();
        if n == 0 {
            0.0
        } else {
            self.hess[i * n + j]
        }
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad
    }

    pub fn hess(&self) -> &[f64] {
        &self.hess
    }

    /// Gradient padded to dimension `n`.
    pub fn grad_n(&self, n: usize) -> Vec<f64> {
        (0..n).map(|i| self.d(i)).collect()
    }

    /// Applies a scalar function given its value and first two derivatives at
    /// `self.value`.
    pub fn chain(&self, f: f64, df: f64, ddf: f64) -> Jet2 {
        let n = self.grad.len();
        if n == 0 {
            return Jet2::constant(f);
        }
        let grad: Vec<f64> = self.grad.iter().map(|g| df * g).collect();
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] = df * self.hess[i * n + j] + ddf * self.grad[i] * self.grad[j];
            }
        }
        Jet2 {
            value: f,
            grad,
            hess,
        }
    }

    pub fn recip(&self) -> Jet2 {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    /// Division that refuses a zero denominator.
    pub fn try_div(&self, rhs: &Jet2) -> Result<Jet2> {
        if rhs.value == 0.0 || !rhs.value.is_finite() {
            return Err(Error::JetSingularity);
        }
        Ok(self * &rhs.recip())
    }

    pub fn try_recip(&self) -> Result<Jet2> {
        Jet2::constant(1.0).try_div(self)
    }

    pub fn exp(&self) -> Jet2 {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Jet2 {
        let v = self.value;
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    pub fn sin(&self) -> Jet2 {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Jet2 {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn sqrt(&self) -> Jet2 {
        let r = self.value.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * self.value))
    }

    pub fn powi(&self, k: i32) -> Jet2 {
        let v = self.value;
        let kf = k as f64;
        self.chain(
            v.powi(k),
            kf * v.powi(k - 1),
            kf * (kf - 1.0) * v.powi(k - 2),
        )
    }

    pub fn powf(&self, p: f64) -> Jet2 {
        let v = self.value;
        self.chain(
            v.powf(p),
            p * v.powf(p - 1.0),
            p * (p - 1.0) * v.powf(p - 2.0),
        )
    }

    pub fn abs(&self) -> Jet2 {
        if self.value < 0.0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn square(&self) -> Jet2 {
        self * self
    }

    pub fn scale(&self, k: f64) -> Jet2 {
        Jet2 {
            value: k * self.value,
            grad: self.grad.iter().map(|g| k * g).collect(),
            hess: self.hess.iter().map(|h| k * h).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|g| g.is_finite())
            && self.hess.iter().all(|h| h.is_finite())
    }
}

impl From<f64> for Jet2 {
    fn from(v: f64) -> Self {
        Jet2::constant(v)
    }
}

fn check_dims(a: &Jet2, b: &Jet2) -> usize {
    match (a.grad.len(), b.grad.len()) {
        (0, n) | (n, 0) => n,
        (n, m) => {
            assert_eq!(n, m, "jet dimension mismatch");
            n
        }
    }
}

fn zip_add(a: &[f64], b: &[f64], sign: f64) -> Vec<f64> {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => Vec::new(),
        (false, true) => a.to_vec(),
        (true, false) => b.iter().map(|y| sign * y).collect(),
        (false, false) => a.iter().zip(b).map(|(x, y)| x + sign * y).collect(),
    }
}

fn add_jets(a: &Jet2, b: &Jet2, sign: f64) -> Jet2 {
    check_dims(a, b);
    Jet2 {
        value: a.value + sign * b.value,
        grad: zip_add(&a.grad, &b.grad, sign),
        hess: zip_add(&a.hess, &b.hess, sign),
    }
}

fn mul_jets(a: &Jet2, b: &Jet2) -> Jet2 {
    let n = check_dims(a, b);
    match (a.grad.is_empty(), b.grad.is_empty()) {
        (true, true) => Jet2::constant(a.value * b.value),
        (true, false) => b.scale(a.value),
        (false, true) => a.scale(b.value),
        (false, false) => {
            let grad: Vec<f64> = (0..n)
                .map(|i| a.value * b.grad[i] + b.value * a.grad[i])
                .collect();
            let mut hess = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    let k = i * n + j;
                    hess[k] = a.value * b.hess[k]
                        + b.value * a.hess[k]
                        + (a.grad[i] * b.grad[j] + b.grad[i] * a.grad[j]);
                }
            }
            Jet2 {
                value: a.value * b.value,
                grad,
                hess,
            }
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a, 'b> $tr<&'b Jet2> for &'a Jet2 {
            type Output = Jet2;
            fn $method(self, rhs: &'b Jet2) -> Jet2 {
                let f: fn(&Jet2, &Jet2) -> Jet2 = $body;
                f(self, rhs)
            }
        }
        impl $tr<Jet2> for Jet2 {
            type Output = Jet2;
            fn $method(self, rhs: Jet2) -> Jet2 {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Jet2> for Jet2 {
            type Output = Jet2;
            fn $method(self, rhs: &'a Jet2) -> Jet2 {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<Jet2> for &'a Jet2 {
            type Output = Jet2;
            fn $method(self, rhs: Jet2) -> Jet2 {
                self.$method(&rhs)
            }
        }
        impl $tr<f64> for Jet2 {
            type Output = Jet2;
            fn $method(self, rhs: f64) -> Jet2 {
                (&self).$method(&Jet2::constant(rhs))
            }
        }
        impl<'a> $tr<f64> for &'a Jet2 {
            type Output = Jet2;
            fn $method(self, rhs: f64) -> Jet2 {
                self.$method(&Jet2::constant(rhs))
            }
        }
        impl $tr<Jet2> for f64 {
            type Output = Jet2;
            fn $method(self, rhs: Jet2) -> Jet2 {
                (&Jet2::constant(self)).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Jet2> for f64 {
            type Output = Jet2;
            fn $method(self, rhs: &'a Jet2) -> Jet2 {
                (&Jet2::constant(self)).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| add_jets(a, b, 1.0));
forward_binop!(Sub, sub, |a, b| add_jets(a, b, -1.0));
forward_binop!(Mul, mul, mul_jets);
// Plain division follows IEEE semantics; use `try_div` where a zero
// denominator must be reported.
forward_binop!(Div, div, |a, b| mul_jets(a, &b.recip()));

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl AddAssign<&Jet2> for Jet2 {
    fn add_assign(&mut self, rhs: &Jet2) {
        *self = add_jets(self, rhs, 1.0);
    }
}

impl AddAssign<Jet2> for Jet2 {
    fn add_assign(&mut self, rhs: Jet2) {
        *self = add_jets(self, &rhs, 1.0);
    }
}

impl SubAssign<&Jet2> for Jet2 {
    fn sub_assign(&mut self, rhs: &Jet2) {
        *self = add_jets(self, rhs, -1.0);
    }
}

impl SubAssign<Jet2> for Jet2 {
    fn sub_assign(&mut self, rhs: Jet2) {
        *self = add_jets(self, &rhs, -1.0);
    }
}

impl MulAssign<&Jet2> for Jet2 {
    fn mul_assign(&mut self, rhs: &Jet2) {
        *self = mul_jets(self, rhs);
    }
}

impl MulAssign<f64> for Jet2 {
    fn mul_assign(&mut self, rhs: f64) {
        *self = self.scale(rhs);
    }
}

impl std::iter::Sum for Jet2 {
    fn sum<I: Iterator<Item = Jet2>>(iter: I) -> Jet2 {
        iter.fold(Jet2::constant(0.0), |acc, x| acc + x)
    }
}

/// Sum of products Σ aᵢ·bᵢ over jets.
pub fn dot(a: &[Jet2], b: &[Jet2]) -> Jet2 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_at_three() {
        let x = Jet2::variable(3.0, 0, 1);
        let f = &x * &x;
        assert_eq!(f.value(), 9.0);
        assert_eq!(f.grad(), &[6.0]);
        assert_eq!(f.hess(), &[2.0]);
    }

    #[test]
    fn reciprocal_at_two() {
        let x = Jet2::variable(2.0, 0, 1);
        let f = Jet2::constant(1.0).try_div(&x).unwrap();
        assert_eq!(f.value(), 0.5);
        assert_eq!(f.grad(), &[-0.25]);
        assert_eq!(f.hess(), &[0.25]);
    }

    #[test]
    fn zero_denominator_is_singular() {
        let x = Jet2::variable(0.0, 0, 1);
        assert!(matches!(
            Jet2::constant(1.0).try_div(&x),
            Err(Error::JetSingularity)
        ));
    }

    #[test]
    fn product_xy_hessian() {
        let p = Jet2::seed(&[0.37, -1.2]);
        let f = &p[0] * &p[1];
        assert_eq!(f.dd(0, 0), 0.0);
        assert_eq!(f.dd(1, 1), 0.0);
        assert_eq!(f.dd(0, 1), 1.0);
        assert_eq!(f.dd(1, 0), 1.0);
    }

    #[test]
    fn constants_mix_with_variables() {
        let x = Jet2::variable(1.5, 1, 3);
        let f = 2.0 * &x + 1.0;
        assert_eq!(f.value(), 4.0);
        assert_eq!(f.grad(), &[0.0, 2.0, 0.0]);
        let g = Jet2::constant(5.0) - &x;
        assert_eq!(g.grad(), &[0.0, -1.0, 0.0]);
    }

    #[test]
    fn new_symmetrizes() {
        let j = Jet2::new(1.0, vec![0.0, 0.0], vec![1.0, 2.0, 4.0, 1.0]).unwrap();
        assert_eq!(j.dd(0, 1), 3.0);
        assert_eq!(j.dd(1, 0), 3.0);
        assert!(Jet2::new(1.0, vec![0.0], vec![]).is_err());
    }

    #[test]
    fn transcendental_chain_rule() {
        let x = Jet2::variable(0.3, 0, 1);
        let f = x.sin().exp();
        let s = 0.3f64.sin();
        let c = 0.3f64.cos();
        let e = s.exp();
        assert!((f.d(0) - e * c).abs() < 1e-15);
        assert!((f.dd(0, 0) - (e * c * c - e * s)).abs() < 1e-15);
        let r = Jet2::variable(4.0, 0, 1).sqrt();
        assert_eq!(r.value(), 2.0);
        assert!((r.d(0) - 0.25).abs() < 1e-16);
        assert!((r.dd(0, 0) + 1.0 / 32.0).abs() < 1e-16);
    }
}
