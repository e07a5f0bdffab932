//! Forward-mode dual numbers and the scalar abstraction densities are written against.
//!
//! A density written once over [`Scalar`] evaluates on `f64` for values and on
//! [`Dual`] for directional derivatives. A full gradient over `C(d, p)`
//! coefficients costs one dual pass per coefficient.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

pub trait Scalar:
    Copy
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    fn re(self) -> f64;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn tanh(self) -> Self;
    fn abs(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn powf(self, e: f64) -> Self;
    /// `self ^ e` with both operands variable.
    fn pow(self, e: Self) -> Self;

    fn zero() -> Self {
        Self::cst(0.0)
    }
}

impl Scalar for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn re(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn powf(self, e: f64) -> Self {
        f64::powf(self, e)
    }
    fn pow(self, e: Self) -> Self {
        f64::powf(self, e)
    }
}

/// `re + eps * e` with `e^2 = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Dual {
    pub re: f64,
    pub eps: f64,
}

impl Dual {
    pub fn new(re: f64, eps: f64) -> Self {
        Dual { re, eps }
    }

    pub fn constant(re: f64) -> Self {
        Dual { re, eps: 0.0 }
    }

    pub fn variable(re: f64) -> Self {
        Dual { re, eps: 1.0 }
    }

    fn chain(self, value: f64, slope: f64) -> Self {
        Dual {
            re: value,
            eps: slope * self.eps,
        }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.re + o.re, self.eps + o.eps)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual::new(self.re - o.re, self.eps - o.eps)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual::new(self.re * o.re, self.eps * o.re + self.re * o.eps)
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let inv = 1.0 / o.re;
        Dual::new(self.re * inv, (self.eps * o.re - self.re * o.eps) * inv * inv)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.re, -self.eps)
    }
}

impl AddAssign for Dual {
    fn add_assign(&mut self, o: Dual) {
        *self = *self + o;
    }
}

impl SubAssign for Dual {
    fn sub_assign(&mut self, o: Dual) {
        *self = *self - o;
    }
}

impl MulAssign for Dual {
    fn mul_assign(&mut self, o: Dual) {
        *self = *self * o;
    }
}

impl Add<f64> for Dual {
    type Output = Dual;
    fn add(self, o: f64) -> Dual {
        Dual::new(self.re + o, self.eps)
    }
}

impl Sub<f64> for Dual {
    type Output = Dual;
    fn sub(self, o: f64) -> Dual {
        Dual::new(self.re - o, self.eps)
    }
}

impl Mul<f64> for Dual {
    type Output = Dual;
    fn mul(self, o: f64) -> Dual {
        Dual::new(self.re * o, self.eps * o)
    }
}

impl Div<f64> for Dual {
    type Output = Dual;
    fn div(self, o: f64) -> Dual {
        Dual::new(self.re / o, self.eps / o)
    }
}

impl Scalar for Dual {
    fn cst(v: f64) -> Self {
        Dual::constant(v)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn sqrt(self) -> Self {
        let r = self.re.sqrt();
        self.chain(r, 0.5 / r)
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.re.ln(), 1.0 / self.re)
    }
    fn sin(self) -> Self {
        let (s, c) = self.re.sin_cos();
        self.chain(s, c)
    }
    fn cos(self) -> Self {
        let (s, c) = self.re.sin_cos();
        self.chain(c, -s)
    }
    fn tan(self) -> Self {
        let t = self.re.tan();
        self.chain(t, 1.0 + t * t)
    }
    fn sinh(self) -> Self {
        self.chain(self.re.sinh(), self.re.cosh())
    }
    fn cosh(self) -> Self {
        self.chain(self.re.cosh(), self.re.sinh())
    }
    fn tanh(self) -> Self {
        let t = self.re.tanh();
        self.chain(t, 1.0 - t * t)
    }
    fn abs(self) -> Self {
        let sign = if self.re < 0.0 { -1.0 } else { 1.0 };
        self.chain(self.re.abs(), sign)
    }
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Dual::constant(1.0);
        }
        self.chain(self.re.powi(n), n as f64 * self.re.powi(n - 1))
    }
    fn powf(self, e: f64) -> Self {
        if e == 0.0 {
            return Dual::constant(1.0);
        }
        self.chain(self.re.powf(e), e * self.re.powf(e - 1.0))
    }
    fn pow(self, e: Self) -> Self {
        if e.eps == 0.0 {
            return self.powf(e.re);
        }
        let v = self.re.powf(e.re);
        Dual::new(
            v,
            e.re * self.re.powf(e.re - 1.0) * self.eps + v * self.re.ln() * e.eps,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let h = 1e-6 * (1.0 + x.abs());
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn polynomial_derivative() {
        let x = Dual::variable(3.0);
        let f = x * x + x * 2.0;
        assert_eq!(f.re, 15.0);
        assert_eq!(f.eps, 8.0);
    }

    #[test]
    fn transcendental_derivatives_match_finite_differences() {
        let x0 = 0.37;
        let cases: Vec<(fn(Dual) -> Dual, fn(f64) -> f64)> = vec![
            (|x| x.sqrt(), |x| x.sqrt()),
            (|x| x.exp(), |x| x.exp()),
            (|x| x.ln(), |x| x.ln()),
            (|x| x.sin() * x.cos(), |x| x.sin() * x.cos()),
            (|x| x.tan(), |x| x.tan()),
            (|x| x.sinh() / x.cosh(), |x| x.sinh() / x.cosh()),
            (|x| x.tanh(), |x| x.tanh()),
            (|x| x.powf(2.5), |x| x.powf(2.5)),
            (|x| x.powi(-3), |x| x.powi(-3)),
            (|x| x.pow(x), |x| x.powf(x)),
            (|x| (-x).abs(), |x| (-x).abs()),
        ];
        for (dual_f, real_f) in cases {
            let d = dual_f(Dual::variable(x0));
            assert!((d.re - real_f(x0)).abs() < 1e-15);
            let g = fd(real_f, x0);
            assert!((d.eps - g).abs() < 1e-7 * (1.0 + g.abs()), "{} vs {}", d.eps, g);
        }
    }

    #[test]
    fn sqrt_at_zero_is_not_finite() {
        let d = Dual::variable(0.0).sqrt();
        assert!(!d.eps.is_finite());
    }
}
