//! Elements of the quadratic étale algebra `E` over `F`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::rational::{fmt_q, q, val, Val, Q};
use crate::error::{Error, Result};

/// Which quadratic algebra `E` is: the unramified field `F(sqrt eps)` or `F x F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algebra {
    Inert { eps: i64 },
    Split,
}

/// Inert: `a + b*sqrt(eps)`. Split: the pair `(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ext {
    pub alg: Algebra,
    pub a: Q,
    pub b: Q,
}

/// Valuation of an element of `E`; a pair of component valuations when `E` is split.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtVal {
    Inert(Val),
    Split(Val, Val),
}

impl ExtVal {
    /// Smallest component valuation; `x` is integral iff this is non-negative.
    pub fn min(self) -> Val {
        match self {
            ExtVal::Inert(v) => v,
            ExtVal::Split(l, r) => l.min(r),
        }
    }
}

impl Ext {
    pub fn new(alg: Algebra, a: Q, b: Q) -> Self {
        Ext { alg, a, b }
    }

    pub fn zero(alg: Algebra) -> Self {
        Ext::new(alg, Q::zero(), Q::zero())
    }

    pub fn one(alg: Algebra) -> Self {
        Ext::from_f(alg, Q::one())
    }

    /// The image of `x` under `F -> E`.
    pub fn from_f(alg: Algebra, x: Q) -> Self {
        match alg {
            Algebra::Inert { .. } => Ext::new(alg, x, Q::zero()),
            Algebra::Split => Ext::new(alg, x.clone(), x),
        }
    }

    pub fn from_int(alg: Algebra, n: i64) -> Self {
        Ext::from_f(alg, q(n))
    }

    /// `sqrt(eps)` in the inert case.
    pub fn sqrt_eps(alg: Algebra) -> Result<Self> {
        match alg {
            Algebra::Inert { .. } => Ok(Ext::new(alg, Q::zero(), Q::one())),
            Algebra::Split => Err(Error::InertOnly),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        *self == Ext::one(self.alg)
    }

    pub fn conj(&self) -> Self {
        match self.alg {
            Algebra::Inert { .. } => Ext::new(self.alg, self.a.clone(), -self.b.clone()),
            Algebra::Split => Ext::new(self.alg, self.b.clone(), self.a.clone()),
        }
    }

    /// `x` lies in `F` (is fixed by the Galois involution).
    pub fn is_in_f(&self) -> bool {
        *self == self.conj()
    }

    pub fn is_purely_imaginary(&self) -> bool {
        self.conj() == -self.clone()
    }

    /// The element of `F` represented by a sigma-fixed `x`.
    pub fn to_f(&self) -> Option<Q> {
        self.is_in_f().then(|| self.a.clone())
    }

    /// `x * conj(x)`, an element of `F`.
    pub fn norm(&self) -> Q {
        match self.alg {
            Algebra::Inert { eps } => &self.a * &self.a - q(eps) * &self.b * &self.b,
            Algebra::Split => &self.a * &self.b,
        }
    }

    /// `x + conj(x)`.
    pub fn trace(&self) -> Q {
        match self.alg {
            Algebra::Inert { .. } => q(2) * &self.a,
            Algebra::Split => &self.a + &self.b,
        }
    }

    pub fn is_invertible(&self) -> bool {
        !self.norm().is_zero()
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::NotInvertible(self.to_string()));
        }
        let c = self.conj();
        Ok(Ext::new(self.alg, c.a / &n, c.b / &n))
    }

    pub fn scale(&self, s: &Q) -> Self {
        Ext::new(self.alg, &self.a * s, &self.b * s)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut out = Ext::one(self.alg);
        for _ in 0..e.unsigned_abs() {
            out = &out * &base;
        }
        Ok(out)
    }

    pub fn valuation(&self, p: u64) -> ExtVal {
        match self.alg {
            // sqrt(eps) is a unit and E/F is unramified, so the valuation is the minimum.
            Algebra::Inert { .. } => ExtVal::Inert(val(&self.a, p).min(val(&self.b, p))),
            Algebra::Split => ExtVal::Split(val(&self.a, p), val(&self.b, p)),
        }
    }

    pub fn is_integral(&self, p: u64) -> bool {
        self.valuation(p).min().is_nonneg()
    }

    pub fn is_unit(&self, p: u64) -> bool {
        match self.valuation(p) {
            ExtVal::Inert(v) => v == Val::Fin(0),
            ExtVal::Split(l, r) => l == Val::Fin(0) && r == Val::Fin(0),
        }
    }

    /// Components `(a, b)` as F-coordinates of `E = F^2`.
    pub fn coords(&self) -> [Q; 2] {
        [self.a.clone(), self.b.clone()]
    }

    fn check(&self, other: &Ext) {
        debug_assert_eq!(self.alg, other.alg, "mixing elements of different algebras");
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.alg {
            Algebra::Inert { .. } => write!(f, "{} + {}*sqrt(eps)", fmt_q(&self.a), fmt_q(&self.b)),
            Algebra::Split => write!(f, "({}, {})", fmt_q(&self.a), fmt_q(&self.b)),
        }
    }
}

impl Add for &Ext {
    type Output = Ext;
    fn add(self, rhs: &Ext) -> Ext {
        self.check(rhs);
        Ext::new(self.alg, &self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl Sub for &Ext {
    type Output = Ext;
    fn sub(self, rhs: &Ext) -> Ext {
        self.check(rhs);
        Ext::new(self.alg, &self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl Mul for &Ext {
    type Output = Ext;
    fn mul(self, rhs: &Ext) -> Ext {
        self.check(rhs);
        match self.alg {
            Algebra::Inert { eps } => {
                Ext::new(self.alg, &self.a * &rhs.a + q(eps) * &self.b * &rhs.b, &self.a * &rhs.b + &self.b * &rhs.a)
            }
            Algebra::Split => Ext::new(self.alg, &self.a * &rhs.a, &self.b * &rhs.b),
        }
    }
}

impl Neg for Ext {
    type Output = Ext;
    fn neg(self) -> Ext {
        Ext::new(self.alg, -self.a, -self.b)
    }
}

impl Add for Ext {
    type Output = Ext;
    fn add(self, rhs: Ext) -> Ext {
        &self + &rhs
    }
}

impl Sub for Ext {
    type Output = Ext;
    fn sub(self, rhs: Ext) -> Ext {
        &self - &rhs
    }
}

impl Mul for Ext {
    type Output = Ext;
    fn mul(self, rhs: Ext) -> Ext {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::rational::qf;

    const INERT: Algebra = Algebra::Inert { eps: 2 };

    #[test]
    fn inert_valuation_is_componentwise_min() {
        let x = Ext::new(INERT, q(1), q(3));
        assert_eq!(x.valuation(3), ExtVal::Inert(Val::Fin(0)));
        let y = Ext::new(INERT, q(9), q(3));
        assert_eq!(y.valuation(3), ExtVal::Inert(Val::Fin(1)));
    }

    #[test]
    fn split_valuation_is_a_pair() {
        let x = Ext::new(Algebra::Split, q(25), qf(1, 5));
        assert_eq!(x.valuation(5), ExtVal::Split(Val::Fin(2), Val::Fin(-1)));
    }

    #[test]
    fn conj_is_an_involutive_automorphism() {
        for alg in [INERT, Algebra::Split] {
            let x = Ext::new(alg, qf(3, 7), q(-2));
            let y = Ext::new(alg, q(5), qf(1, 3));
            assert_eq!(x.conj().conj(), x);
            assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
            assert_eq!((&x + &y).conj(), &x.conj() + &y.conj());
            assert!(Ext::from_f(alg, qf(4, 9)).is_in_f());
        }
    }

    #[test]
    fn inverse_and_norm() {
        let x = Ext::new(INERT, q(1), q(1));
        assert_eq!(x.norm(), q(-1));
        assert!((&x * &x.inv().unwrap()).is_one());
        assert!(Ext::new(Algebra::Split, q(0), q(1)).inv().is_err());
        let s = Ext::sqrt_eps(INERT).unwrap();
        assert!(s.is_purely_imaginary());
        assert_eq!(s.norm(), q(-2));
    }
}
