//! Rational numbers viewed as elements of `Q_p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

/// A p-adic valuation; `Inf` is the valuation of zero and compares above every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Val {
    Fin(i64),
    Inf,
}

impl Val {
    pub fn finite(self) -> Option<i64> {
        match self {
            Val::Fin(v) => Some(v),
            Val::Inf => None,
        }
    }

    pub fn expect_finite(self) -> Result<i64> {
        self.finite().ok_or(Error::InfiniteValuation)
    }

    pub fn is_nonneg(self) -> bool {
        self >= Val::Fin(0)
    }
}

impl std::ops::Add for Val {
    type Output = Val;
    fn add(self, rhs: Val) -> Val {
        match (self, rhs) {
            (Val::Fin(a), Val::Fin(b)) => Val::Fin(a + b),
            _ => Val::Inf,
        }
    }
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn val_int(n: &BigInt, p: u64) -> Val {
    if n.is_zero() {
        return Val::Inf;
    }
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (d, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return Val::Fin(v);
        }
        m = d;
        v += 1;
    }
}

pub fn val(x: &Q, p: u64) -> Val {
    if x.is_zero() {
        return Val::Inf;
    }
    match (val_int(x.numer(), p), val_int(x.denom(), p)) {
        (Val::Fin(a), Val::Fin(b)) => Val::Fin(a - b),
        _ => unreachable!("nonzero rational"),
    }
}

pub fn is_integral(x: &Q, p: u64) -> bool {
    val(x, p).is_nonneg()
}

pub fn is_unit(x: &Q, p: u64) -> bool {
    val(x, p) == Val::Fin(0)
}

/// `p^e` as a rational, for any integer `e`.
pub fn p_pow(p: u64, e: i64) -> Q {
    let base = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Q::from_integer(base)
    } else {
        Q::new(BigInt::one(), base)
    }
}

pub fn u64_pow(p: u64, e: u32) -> u64 {
    p.checked_pow(e).expect("prime power overflows u64")
}

fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m))
}

fn bigint_mod(n: &BigInt, m: u64) -> i128 {
    n.mod_floor(&BigInt::from(m)).to_i128().expect("residue fits")
}

/// Image of an integral `x` in `Z/modulus`, where `modulus` is a power of `p`.
pub fn residue(x: &Q, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as i128;
    let num = bigint_mod(x.numer(), modulus);
    let den = bigint_mod(x.denom(), modulus);
    let inv = mod_inverse(den, m).expect("denominator must be prime to p");
    ((num * inv).rem_euclid(m)) as u64
}

/// Parse `"a"` or `"a/b"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(Q::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
    }
}

pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(val(&qf(9, 2), 3), Val::Fin(2));
        assert_eq!(val(&qf(2, 45), 3), Val::Fin(-2));
        assert_eq!(val(&q(0), 3), Val::Inf);
        assert_eq!(val(&qf(25, 1), 5) + val(&qf(1, 5), 5), Val::Fin(1));
    }

    #[test]
    fn residues() {
        assert_eq!(residue(&qf(1, 2), 3), 2);
        assert_eq!(residue(&qf(-1, 1), 9), 8);
        assert_eq!(residue(&qf(7, 5), 27), (7 * 11) % 27);
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["0", "-3", "7/9", "-12/35"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }
}
