//! Exact values in cyclotomic fields `Q(zeta_N)`.
//!
//! A [`CycValue`] stores its coordinates in the power basis `1, zeta, ..., zeta^(phi(N)-1)`,
//! i.e. as a polynomial reduced modulo the cyclotomic polynomial `Phi_N`. Values of different
//! orders are combined by lifting both into `Q(zeta_lcm)`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::rational::{fmt_q, q, Q};

fn cyclotomic_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients (lowest degree first) of the `n`-th cyclotomic polynomial.
pub fn cyclotomic_poly(n: u64) -> Arc<Vec<i64>> {
    assert!(n >= 1);
    if let Some(c) = cyclotomic_cache().lock().unwrap().get(&n) {
        return c.clone();
    }
    // x^n - 1 divided by Phi_d for every proper divisor d.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let phi_d = cyclotomic_poly(d);
            num = exact_div_monic(&num, &phi_d);
        }
    }
    let out = Arc::new(num);
    cyclotomic_cache().lock().unwrap().insert(n, out.clone());
    out
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dd = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![0i64; num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        for (k, dk) in den.iter().enumerate() {
            rem[i + k] -= c * dk;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

pub fn euler_phi(n: u64) -> usize {
    cyclotomic_poly(n).len() - 1
}

/// Reduce a polynomial in `zeta_n` (lowest degree first) modulo `Phi_n`.
fn reduce(mut v: Vec<Q>, n: u64) -> Vec<Q> {
    let phi = cyclotomic_poly(n);
    let deg = phi.len() - 1;
    for d in (deg..v.len()).rev() {
        if v[d].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut v[d]);
        for (i, pi) in phi.iter().enumerate().take(deg) {
            if *pi != 0 {
                v[d - deg + i] -= &c * q(*pi);
            }
        }
    }
    v.truncate(deg);
    v.resize(deg, Q::zero());
    v
}

#[derive(Clone, Debug)]
pub struct CycValue {
    order: u64,
    coeffs: Vec<Q>,
}

impl CycValue {
    pub fn from_coeffs(order: u64, coeffs: Vec<Q>) -> Self {
        assert!(order >= 1);
        CycValue { order, coeffs: reduce(coeffs, order) }
    }

    pub fn rational(x: Q) -> Self {
        CycValue { order: 1, coeffs: vec![x] }
    }

    pub fn from_int(n: i64) -> Self {
        CycValue::rational(q(n))
    }

    pub fn zero() -> Self {
        CycValue::rational(Q::zero())
    }

    pub fn one() -> Self {
        CycValue::rational(Q::one())
    }

    /// `zeta_order^e`.
    pub fn root_of_unity(order: u64, e: i64) -> Self {
        let mut v = vec![Q::zero(); order as usize];
        v[e.rem_euclid(order as i64) as usize] = Q::one();
        CycValue::from_coeffs(order, v)
    }

    /// `i = zeta_4`.
    pub fn i() -> Self {
        CycValue::root_of_unity(4, 1)
    }

    /// The positive square root of an odd prime `p` (or 2), realised through a quadratic
    /// Gauss sum inside `Q(zeta_{4p})`.
    pub fn sqrt_prime(p: u64) -> Self {
        if p == 2 {
            return &CycValue::root_of_unity(8, 1) + &CycValue::root_of_unity(8, -1);
        }
        let mut v = vec![Q::zero(); p as usize];
        for a in 1..p {
            v[a as usize] = q(legendre(a, p));
        }
        let gauss = CycValue::from_coeffs(p, v);
        if p % 4 == 1 {
            gauss
        } else {
            // g^2 = -p, so sqrt(p) = -i g.
            -(&CycValue::i() * &gauss)
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<Q> {
        self.coeffs[1..].iter().all(Zero::is_zero).then(|| self.coeffs[0].clone())
    }

    /// Rewrite in the smallest order when the value is rational.
    pub fn simplify(self) -> Self {
        match self.as_rational() {
            Some(r) if self.order != 1 => CycValue::rational(r),
            _ => self,
        }
    }

    /// The same value viewed in `Q(zeta_m)`; `m` must be a multiple of the current order.
    pub fn lift(&self, m: u64) -> Self {
        if m == self.order {
            return self.clone();
        }
        assert_eq!(m % self.order, 0, "lift target must be a multiple of the order");
        let step = (m / self.order) as usize;
        let mut v = vec![Q::zero(); m as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[(i * step) % m as usize] += c;
        }
        CycValue::from_coeffs(m, v)
    }

    /// Complex conjugation, `zeta -> zeta^{-1}`.
    pub fn conj(&self) -> Self {
        let n = self.order as usize;
        let mut v = vec![Q::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[(n - i) % n] += c;
        }
        CycValue::from_coeffs(self.order, v)
    }

    pub fn scale(&self, s: &Q) -> Self {
        CycValue { order: self.order, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = CycValue::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    fn common(&self, other: &CycValue) -> (CycValue, CycValue) {
        let m = self.order.lcm(&other.order);
        (self.lift(m), other.lift(m))
    }
}

/// Legendre symbol `(a/p)` for an odd prime `p` via Euler's criterion.
pub fn legendre(a: u64, p: u64) -> i64 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    let mut r = 1u128;
    let mut b = a as u128;
    let mut e = (p - 1) / 2;
    let m = p as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

impl PartialEq for CycValue {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.common(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycValue {}

impl Add for &CycValue {
    type Output = CycValue;
    fn add(self, rhs: &CycValue) -> CycValue {
        let (a, b) = self.common(rhs);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        CycValue { order: a.order, coeffs }
    }
}

impl Sub for &CycValue {
    type Output = CycValue;
    fn sub(self, rhs: &CycValue) -> CycValue {
        let (a, b) = self.common(rhs);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
        CycValue { order: a.order, coeffs }
    }
}

impl Mul for &CycValue {
    type Output = CycValue;
    fn mul(self, rhs: &CycValue) -> CycValue {
        if let Some(r) = rhs.as_rational() {
            return self.scale(&r);
        }
        if let Some(r) = self.as_rational() {
            return rhs.scale(&r);
        }
        let (a, b) = self.common(rhs);
        let (na, da) = numerators(&a.coeffs);
        let (nb, db) = numerators(&b.coeffs);
        let mut v = vec![BigInt::zero(); na.len() + nb.len() - 1];
        for (i, x) in na.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in nb.iter().enumerate() {
                if !y.is_zero() {
                    v[i + j] += x * y;
                }
            }
        }
        let phi = cyclotomic_poly(a.order);
        let deg = phi.len() - 1;
        for d in (deg..v.len()).rev() {
            if v[d].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut v[d]);
            for (i, pi) in phi.iter().enumerate().take(deg) {
                if *pi != 0 {
                    v[d - deg + i] -= &c * *pi;
                }
            }
        }
        v.truncate(deg);
        let den = da * db;
        let coeffs = v.into_iter().map(|c| Q::new(c, den.clone())).collect();
        CycValue { order: a.order, coeffs }
    }
}

/// Integer numerators over the least common denominator.
fn numerators(coeffs: &[Q]) -> (Vec<BigInt>, BigInt) {
    let den = coeffs.iter().fold(BigInt::one(), |acc, c| if c.is_zero() { acc } else { acc.lcm(c.denom()) });
    let nums = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
    (nums, den)
}

impl Neg for CycValue {
    type Output = CycValue;
    fn neg(self) -> CycValue {
        CycValue { order: self.order, coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl Add for CycValue {
    type Output = CycValue;
    fn add(self, rhs: CycValue) -> CycValue {
        &self + &rhs
    }
}

impl Sub for CycValue {
    type Output = CycValue;
    fn sub(self, rhs: CycValue) -> CycValue {
        &self - &rhs
    }
}

impl Mul for CycValue {
    type Output = CycValue;
    fn mul(self, rhs: CycValue) -> CycValue {
        &self * &rhs
    }
}

impl std::iter::Sum for CycValue {
    fn sum<I: Iterator<Item = CycValue>>(iter: I) -> CycValue {
        let mut acc = CycAccum::new(1);
        for v in iter {
            acc.add(&v, 0, &Q::one());
        }
        acc.finish()
    }
}

impl fmt::Display for CycValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{}", fmt_q(&r));
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{}*z{}^{}", fmt_q(c), self.order, i))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Accumulates sums `sum c_k * zeta_M^{e_k} * s_k` in the group ring `Q[Z/M]`, reducing to the
/// power basis only once at the end. The order grows on demand.
#[derive(Clone, Debug)]
pub struct CycAccum {
    order: u64,
    v: Vec<Q>,
}

impl CycAccum {
    pub fn new(order: u64) -> Self {
        CycAccum { order, v: vec![Q::zero(); order as usize] }
    }

    fn grow(&mut self, m: u64) {
        if m == self.order {
            return;
        }
        let step = (m / self.order) as usize;
        let mut v = vec![Q::zero(); m as usize];
        for (i, c) in self.v.drain(..).enumerate() {
            v[i * step] = c;
        }
        self.v = v;
        self.order = m;
    }

    /// Add `value * zeta_{root_order}^e * scale`, with `root_order` dividing the current order
    /// after growth; pass `root_order = 1, e = 0` for no root of unity.
    pub fn add_twisted(&mut self, value: &CycValue, root_order: u64, e: i64, scale: &Q) {
        if value.is_zero() || scale.is_zero() {
            return;
        }
        let m = self.order.lcm(&value.order).lcm(&root_order);
        self.grow(m);
        let vstep = (m / value.order) as usize;
        let shift = (e.rem_euclid(root_order as i64) as u64 * (m / root_order)) as usize;
        let mm = m as usize;
        for (i, c) in value.coeffs.iter().enumerate() {
            if !c.is_zero() {
                self.v[(i * vstep + shift) % mm] += c * scale;
            }
        }
    }

    pub fn add(&mut self, value: &CycValue, e: i64, scale: &Q) {
        let o = self.order;
        self.add_twisted(value, o, e, scale);
    }

    pub fn finish(self) -> CycValue {
        CycValue::from_coeffs(self.order, self.v)
    }
}
