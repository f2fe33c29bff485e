//! The base local field `F = Q_p`, the quadratic algebra `E`, the characters `eta`, `mu`,
//! `psi'`, and the measure constants.

pub mod cyclotomic;
pub mod ext;
pub mod laurent;
pub mod rational;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use cyclotomic::{CycAccum, CycValue};
pub use ext::{Algebra, Ext, ExtVal};
pub use laurent::LaurentValue;
pub use rational::{p_pow, q, qf, val, Val, Q};

use crate::error::{Error, Result};

/// Value of the unramified character `mu` (or `mu_1` at split places) on the uniformizer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MuAtP {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "-1")]
    MinusOne,
    #[serde(rename = "i")]
    I,
    #[serde(rename = "-i")]
    MinusI,
}

impl MuAtP {
    /// Exponent `k` with `mu(p) = i^k`.
    fn i_power(self) -> i64 {
        match self {
            MuAtP::One => 0,
            MuAtP::I => 1,
            MuAtP::MinusOne => 2,
            MuAtP::MinusI => 3,
        }
    }

    pub fn value(self) -> CycValue {
        CycValue::root_of_unity(4, self.i_power()).simplify()
    }
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// A validated local configuration: `p`, the algebra `E`, the fixed purely imaginary unit `j`
/// and the unramified characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalField {
    p: u64,
    alg: Algebra,
    j: Ext,
    mu_p: MuAtP,
}

impl LocalField {
    /// Inert configuration with `j = sqrt(eps)` and `mu(p) = -1`.
    pub fn inert(p: u64, eps: i64) -> Result<Self> {
        let alg = Algebra::Inert { eps };
        LocalField::new(p, alg, Ext::sqrt_eps(alg)?, MuAtP::MinusOne)
    }

    /// Inert configuration with the least positive non-residue as `eps`.
    pub fn inert_default(p: u64) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::Config(format!("inert places need an odd prime, got {p}")));
        }
        let eps = (2..p).find(|&a| cyclotomic::legendre(a, p) == -1).unwrap();
        LocalField::inert(p, eps as i64)
    }

    /// Split configuration with `j = (1, -1)`.
    pub fn split(p: u64, mu_p: MuAtP) -> Result<Self> {
        let j = Ext::new(Algebra::Split, Q::one(), -Q::one());
        LocalField::new(p, Algebra::Split, j, mu_p)
    }

    pub fn new(p: u64, alg: Algebra, j: Ext, mu_p: MuAtP) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Config(format!("{p} is not prime")));
        }
        if let Algebra::Inert { eps } = alg {
            if p == 2 {
                return Err(Error::Config("inert places of residue characteristic 2 are not supported".into()));
            }
            if cyclotomic::legendre(eps.rem_euclid(p as i64) as u64, p) != -1 {
                return Err(Error::Config(format!("eps = {eps} is not a non-residue mod {p}")));
            }
            if mu_p != MuAtP::MinusOne {
                return Err(Error::Config("mu restricted to F must be eta, forcing mu(p) = -1".into()));
            }
        }
        if j.alg != alg {
            return Err(Error::Config("j lives in a different algebra".into()));
        }
        if !j.is_purely_imaginary() || !j.is_unit(p) {
            return Err(Error::Config(format!("j = {j} must be a purely imaginary unit")));
        }
        Ok(LocalField { p, alg, j, mu_p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Residue field size of `F`.
    pub fn q(&self) -> u64 {
        self.p
    }

    pub fn alg(&self) -> Algebra {
        self.alg
    }

    pub fn is_split(&self) -> bool {
        self.alg == Algebra::Split
    }

    pub fn j(&self) -> &Ext {
        &self.j
    }

    pub fn mu_p(&self) -> MuAtP {
        self.mu_p
    }

    pub fn epsilon(&self) -> Option<i64> {
        match self.alg {
            Algebra::Inert { eps } => Some(eps),
            Algebra::Split => None,
        }
    }

    /// `j^2`, an element of `F`.
    pub fn j_squared(&self) -> Q {
        (&self.j * &self.j).to_f().expect("j^2 is sigma-fixed")
    }

    pub fn f(&self, x: Q) -> Ext {
        Ext::from_f(self.alg, x)
    }

    pub fn f_int(&self, n: i64) -> Ext {
        Ext::from_int(self.alg, n)
    }

    pub fn valuation(&self, x: &Q) -> Val {
        val(x, self.p)
    }

    pub fn ext_valuation(&self, x: &Ext) -> ExtVal {
        x.valuation(self.p)
    }

    /// The quadratic character of `F^x` attached to `E/F`.
    pub fn eta(&self, x: &Q) -> Result<CycValue> {
        let v = val(x, self.p).expect_finite()?;
        Ok(match self.alg {
            Algebra::Inert { .. } => CycValue::from_int(if v.rem_euclid(2) == 0 { 1 } else { -1 }),
            Algebra::Split => CycValue::one(),
        })
    }

    /// The unramified character `mu` of `E^x`.
    pub fn mu(&self, x: &Ext) -> Result<CycValue> {
        if !x.is_invertible() {
            return Err(Error::NotInvertible(x.to_string()));
        }
        let k = match x.valuation(self.p) {
            ExtVal::Inert(v) => v.expect_finite()?,
            ExtVal::Split(l, r) => l.expect_finite()? - r.expect_finite()?,
        };
        let e = (self.mu_p.i_power() * k).rem_euclid(4);
        Ok(CycValue::root_of_unity(4, e).simplify())
    }

    /// `mu_1(x)` for `x` in `F^x`; at inert places this is `mu` restricted to `F`, i.e. `eta`.
    pub fn mu1(&self, x: &Q) -> Result<CycValue> {
        let v = val(x, self.p).expect_finite()?;
        Ok(CycValue::root_of_unity(4, (self.mu_p.i_power() * v).rem_euclid(4)).simplify())
    }

    /// The additive character `psi'` of conductor `O_F`, valued in `Q(zeta_{p^k})`.
    pub fn psi(&self, x: &Q, k: u32) -> Result<CycValue> {
        let (order, e) = self.psi_exponent(x, k)?;
        Ok(CycValue::root_of_unity(order, e as i64).simplify())
    }

    /// `psi'(x) = zeta_{order}^{e}` with `order = p^k`.
    pub fn psi_exponent(&self, x: &Q, k: u32) -> Result<(u64, u64)> {
        let order = rational::u64_pow(self.p, k);
        if x.is_zero() {
            return Ok((order, 0));
        }
        let v = val(x, self.p).finite().unwrap();
        if v >= 0 {
            return Ok((order, 0));
        }
        if (-v) as u32 > k {
            return Err(Error::Precision { needed: (-v) as u32, have: k });
        }
        // x * p^k lies in Z_p; its residue mod p^k encodes the fractional part of x.
        let scaled = x * p_pow(self.p, k as i64);
        Ok((order, rational::residue(&scaled, order)))
    }

    /// `psi'` with the smallest sufficient root-of-unity order.
    pub fn psi_auto(&self, x: &Q) -> CycValue {
        let k = match val(x, self.p) {
            Val::Fin(v) if v < 0 => (-v) as u32,
            _ => 0,
        };
        self.psi(x, k).expect("order chosen from the valuation")
    }

    /// `psi(x) = psi'(Tr(x) / 2)` on `E`.
    pub fn psi_e(&self, x: &Ext) -> CycValue {
        self.psi_auto(&(x.trace() / q(2)))
    }

    /// Volume of `GL_n(O_F)`.
    pub fn vol_gl(&self, n: usize) -> Result<Q> {
        vol_gl(n, self.q())
    }

    /// Volume of the hyperspecial `U_n(O_F)` at an inert place.
    pub fn vol_u(&self, n: usize) -> Result<Q> {
        if self.is_split() {
            return Err(Error::InertOnly);
        }
        vol_u(n, self.q())
    }

    /// Volume of `GL_n(O_E)` with the analogous normalization over `E`.
    pub fn vol_gl_e(&self, n: usize) -> Result<Q> {
        match self.alg {
            Algebra::Inert { .. } => vol_gl(n, self.q() * self.q()),
            Algebra::Split => {
                let v = vol_gl(n, self.q())?;
                Ok(&v * &v)
            }
        }
    }

    /// `zeta_F(1) = (1 - q^{-1})^{-1}`.
    pub fn zeta_f1(&self) -> Q {
        local_zeta(self.q(), 1)
    }

    /// `zeta_E(1)`.
    pub fn zeta_e1(&self) -> Q {
        match self.alg {
            Algebra::Inert { .. } => local_zeta(self.q() * self.q(), 1),
            Algebra::Split => self.zeta_f1() * self.zeta_f1(),
        }
    }

    /// `|x|^{1/2}` for `x` in `F^x`, exact through `sqrt(q)` in a cyclotomic field.
    pub fn abs_sqrt(&self, x: &Q) -> Result<CycValue> {
        let v = val(x, self.p).expect_finite()?;
        Ok(q_power_half(self.p, -v))
    }
}

/// `q^{e/2}` for `q = p`.
pub fn q_power_half(p: u64, e: i64) -> CycValue {
    let whole = CycValue::rational(p_pow(p, e.div_euclid(2)));
    if e.rem_euclid(2) == 0 {
        whole
    } else {
        &whole * &CycValue::sqrt_prime(p)
    }
}

fn local_zeta(q: u64, s: u32) -> Q {
    let qs = Q::from_integer(BigInt::from(q).pow(s));
    &qs / (&qs - Q::one())
}

fn check_rank(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::Precondition("rank must be at least 1".into()));
    }
    Ok(())
}

/// `prod_{i=2..n} (1 - q^{-i})`.
pub fn vol_gl(n: usize, q: u64) -> Result<Q> {
    check_rank(n)?;
    Ok((2..=n).map(|i| Q::one() - Q::one() / local_q_pow(q, i)).fold(Q::one(), |a, b| a * b))
}

/// `prod_{i=1..n} L(i, eta^i)^{-1}` with `L(s, eta) = (1 + q^{-s})^{-1}`.
pub fn vol_u(n: usize, q: u64) -> Result<Q> {
    check_rank(n)?;
    Ok((1..=n)
        .map(|i| {
            let t = Q::one() / local_q_pow(q, i);
            if i % 2 == 1 {
                Q::one() + t
            } else {
                Q::one() - t
            }
        })
        .fold(Q::one(), |a, b| a * b))
}

fn local_q_pow(q: u64, i: usize) -> Q {
    Q::from_integer(BigInt::from(q).pow(i as u32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(LocalField::inert(3, 2).is_ok());
        assert!(LocalField::inert(3, 1).is_err());
        assert!(LocalField::inert(2, 3).is_err());
        assert!(LocalField::inert(9, 2).is_err());
        assert!(LocalField::split(2, MuAtP::I).is_ok());
        let alg = Algebra::Inert { eps: 2 };
        assert!(LocalField::new(3, alg, Ext::sqrt_eps(alg).unwrap().scale(&q(3)), MuAtP::MinusOne).is_err());
        assert!(LocalField::new(3, alg, Ext::sqrt_eps(alg).unwrap(), MuAtP::I).is_err());
    }

    #[test]
    fn eta_examples() {
        let f = LocalField::inert(3, 2).unwrap();
        assert_eq!(f.eta(&q(3)).unwrap(), CycValue::from_int(-1));
        assert_eq!(f.eta(&qf(2, 7)).unwrap(), CycValue::one());
        assert!(f.eta(&q(0)).is_err());
        let s = LocalField::split(5, MuAtP::I).unwrap();
        assert_eq!(s.eta(&q(125)).unwrap(), CycValue::one());
    }

    #[test]
    fn mu_examples() {
        let f = LocalField::inert(3, 2).unwrap();
        assert_eq!(f.mu(&f.f_int(9)).unwrap(), CycValue::one());
        assert_eq!(f.mu(&Ext::new(f.alg(), q(1), q(1))).unwrap(), CycValue::one());
        assert_eq!(f.mu(&f.f_int(3)).unwrap(), CycValue::from_int(-1));
        let s = LocalField::split(3, MuAtP::I).unwrap();
        assert_eq!(s.mu(&Ext::new(Algebra::Split, q(3), q(1))).unwrap(), CycValue::i());
        assert_eq!(s.mu(&Ext::new(Algebra::Split, q(1), q(3))).unwrap(), -CycValue::i());
        assert!(s.mu(&Ext::new(Algebra::Split, q(0), q(3))).is_err());
    }

    #[test]
    fn mu_restricts_to_eta() {
        for f in [LocalField::inert(5, 2).unwrap(), LocalField::split(5, MuAtP::MinusI).unwrap()] {
            for x in [qf(5, 3), q(25), qf(1, 125), q(7)] {
                assert_eq!(f.mu(&f.f(x.clone())).unwrap(), f.eta(&x).unwrap());
            }
        }
    }

    #[test]
    fn psi_examples() {
        let f = LocalField::inert(3, 2).unwrap();
        assert_eq!(f.psi(&q(7), 2).unwrap(), CycValue::one());
        let w = f.psi(&qf(1, 3), 1).unwrap();
        assert_eq!(w, CycValue::root_of_unity(3, 1));
        assert_eq!(f.psi(&qf(2, 3), 1).unwrap(), &w * &w);
        assert!(matches!(f.psi(&qf(1, 9), 1), Err(Error::Precision { .. })));
        // translation by O_F changes nothing, and psi(x) psi(-x) = 1
        assert_eq!(f.psi(&qf(4, 9), 2).unwrap(), f.psi(&qf(13, 9), 2).unwrap());
        let x = qf(5, 27);
        assert_eq!(&f.psi_auto(&x) * &f.psi_auto(&-x), CycValue::one());
    }

    #[test]
    fn volumes() {
        assert_eq!(vol_gl(1, 3).unwrap(), q(1));
        assert_eq!(vol_gl(2, 3).unwrap(), qf(8, 9));
        assert_eq!(vol_u(1, 3).unwrap(), qf(4, 3));
        assert!(vol_gl(0, 3).is_err());
    }

    #[test]
    fn half_powers() {
        let r = q_power_half(3, 1);
        assert_eq!(&r * &r, CycValue::from_int(3));
        assert_eq!(q_power_half(5, -2), CycValue::rational(qf(1, 5)));
    }
}
