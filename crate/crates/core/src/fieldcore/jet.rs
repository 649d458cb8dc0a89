//! Second-order forward-mode jets.
//!
//! A [`Jet`] carries a value together with its gradient and Hessian with
//! respect to the chart coordinates. Derivatives propagate through every
//! arithmetic operation by the order-2 chain rule, so a metric evaluated on
//! coordinate jets yields exact first and second partials.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Largest chart dimension supported by the fixed-size jet storage.
pub const MAX_DIM: usize = 8;

/// Truncated Taylor value: `value`, `grad[i] = ∂_i`, `hess[i][j] = ∂_i ∂_j`.
///
/// Slots beyond the chart dimension stay zero.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: [f64; MAX_DIM],
    pub hess: [[f64; MAX_DIM]; MAX_DIM],
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = (0..MAX_DIM)
            .rev()
            .find(|&i| self.grad[i] != 0.0 || self.hess[i].iter().any(|&h| h != 0.0))
            .map_or(0, |i| i + 1);
        f.debug_struct("Jet")
            .field("value", &self.value)
            .field("grad", &&self.grad[..last])
            .field(
                "hess",
                &self.hess[..last].iter().map(|r| &r[..last]).collect::<Vec<_>>(),
            )
            .finish()
    }
}

impl Default for Jet {
    fn default() -> Self {
        Jet::constant(0.0)
    }
}

impl From<f64> for Jet {
    fn from(value: f64) -> Self {
        Jet::constant(value)
    }
}

impl Jet {
    pub const fn constant(value: f64) -> Self {
        Jet {
            value,
            grad: [0.0; MAX_DIM],
            hess: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }

    /// The coordinate function `x_index`, evaluated at `value`.
    pub fn variable(value: f64, index: usize) -> Self {
        assert!(index < MAX_DIM, "jet index {index} exceeds MAX_DIM");
        let mut j = Jet::constant(value);
        j.grad[index] = 1.0;
        j
    }

    /// Coordinate jets for every component of `point`.
    pub fn variables(point: &[f64]) -> Vec<Jet> {
        point
            .iter()
            .enumerate()
            .map(|(i, &x)| Jet::variable(x, i))
            .collect()
    }

    pub fn zero() -> Self {
        Jet::constant(0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.grad.iter().all(|&g| g == 0.0) && self.hess.iter().flatten().all(|&h| h == 0.0)
    }

    /// The jet of `∂_index` of this function.
    ///
    /// The result is valid to first order only: its Hessian would need third
    /// derivatives and is left at zero.
    pub fn partial(&self, index: usize) -> Jet {
        Jet {
            value: self.grad[index],
            grad: self.hess[index],
            hess: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }

    /// Drops all derivative information.
    pub fn frozen(&self) -> Jet {
        Jet::constant(self.value)
    }

    /// Lift a scalar function given its value and first two derivatives at `self.value`.
    pub fn chain(&self, f: f64, df: f64, d2f: f64) -> Jet {
        let mut out = Jet::constant(f);
        for i in 0..MAX_DIM {
            out.grad[i] = df * self.grad[i];
        }
        for i in 0..MAX_DIM {
            for j in 0..MAX_DIM {
                out.hess[i][j] = df * self.hess[i][j] + d2f * self.grad[i] * self.grad[j];
            }
        }
        out
    }

    pub fn recip(&self) -> Jet {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    pub fn exp(&self) -> Jet {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Jet {
        let v = self.value;
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn sinh(&self) -> Jet {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(s, c, s)
    }

    pub fn cosh(&self) -> Jet {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(c, s, c)
    }

    pub fn tanh(&self) -> Jet {
        let th = self.value.tanh();
        let sech2 = 1.0 - th * th;
        self.chain(th, sech2, -2.0 * th * sech2)
    }

    pub fn sqrt(&self) -> Jet {
        let r = self.value.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * self.value))
    }

    pub fn powf(&self, p: f64) -> Jet {
        let v = self.value;
        if p == 0.0 {
            return Jet::constant(1.0);
        }
        self.chain(
            v.powf(p),
            p * v.powf(p - 1.0),
            p * (p - 1.0) * v.powf(p - 2.0),
        )
    }

    /// General power `self^exponent`; constant exponents go through [`Jet::powf`].
    pub fn pow(&self, exponent: &Jet) -> Jet {
        if exponent.is_constant() {
            self.powf(exponent.value)
        } else {
            (*exponent * self.ln()).exp()
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut out = *self;
        out.value *= s;
        for g in out.grad.iter_mut() {
            *g *= s;
        }
        for h in out.hess.iter_mut().flatten() {
            *h *= s;
        }
        out
    }

    /// `self += a * b` without an intermediate allocation.
    pub fn add_product(&mut self, a: &Jet, b: &Jet) {
        self.value += a.value * b.value;
        for i in 0..MAX_DIM {
            self.grad[i] += a.grad[i] * b.value + a.value * b.grad[i];
        }
        for i in 0..MAX_DIM {
            for j in 0..MAX_DIM {
                self.hess[i][j] += a.hess[i][j] * b.value
                    + a.value * b.hess[i][j]
                    + a.grad[i] * b.grad[j]
                    + a.grad[j] * b.grad[i];
            }
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        self += rhs;
        self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        self.value += rhs.value;
        for i in 0..MAX_DIM {
            self.grad[i] += rhs.grad[i];
            for j in 0..MAX_DIM {
                self.hess[i][j] += rhs.hess[i][j];
            }
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        self -= rhs;
        self
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        self.value -= rhs.value;
        for i in 0..MAX_DIM {
            self.grad[i] -= rhs.grad[i];
            for j in 0..MAX_DIM {
                self.hess[i][j] -= rhs.hess[i][j];
            }
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut out = Jet::zero();
        out.add_product(&self, &rhs);
        out
    }
}

impl MulAssign for Jet {
    fn mul_assign(&mut self, rhs: Jet) {
        *self = *self * rhs;
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs.scale(self)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self.scale(1.0 / rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_at_three() {
        let t = Jet::variable(3.0, 0);
        let sq = t * t;
        assert_eq!(sq.value, 9.0);
        assert_eq!(sq.grad[0], 6.0);
        assert_eq!(sq.hess[0][0], 2.0);
    }

    #[test]
    fn exp_at_zero() {
        let e = Jet::variable(0.0, 0).exp();
        assert_eq!((e.value, e.grad[0], e.hess[0][0]), (1.0, 1.0, 1.0));
    }

    #[test]
    fn constant_has_no_derivatives() {
        let c = Jet::constant(2.5).cosh();
        assert!(c.is_constant());
    }

    #[test]
    fn mixed_partial_of_product() {
        let x = Jet::variable(2.0, 0);
        let y = Jet::variable(-1.5, 1);
        let p = x * y * y;
        assert_eq!(p.grad[0], 2.25);
        assert_eq!(p.grad[1], 2.0 * 2.0 * -1.5);
        assert_eq!(p.hess[0][1], 2.0 * -1.5);
        assert_eq!(p.hess[1][0], p.hess[0][1]);
        assert_eq!(p.hess[1][1], 4.0);
    }

    #[test]
    fn partial_shifts_the_jet() {
        let x = Jet::variable(0.7, 0);
        let y = Jet::variable(0.2, 1);
        let f = (x * y).sin();
        let fx = f.partial(0);
        assert!((fx.value - 0.2 * (0.14f64).cos()).abs() < 1e-15);
        assert!((fx.grad[1] - f.hess[0][1]).abs() < 1e-15);
    }

    #[test]
    fn pow_with_variable_exponent() {
        let x = Jet::variable(1.3, 0);
        let p = x.pow(&x);
        // d/dx x^x = x^x (ln x + 1)
        let expect = 1.3f64.powf(1.3) * (1.3f64.ln() + 1.0);
        assert!((p.grad[0] - expect).abs() < 1e-12);
    }
}
