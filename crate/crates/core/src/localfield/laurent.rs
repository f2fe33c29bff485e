//! Laurent polynomials in a formal variable `t` standing for `q^{-(s - 1/2)}`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use super::cyclotomic::CycValue;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentValue {
    terms: BTreeMap<i64, CycValue>,
}

impl LaurentValue {
    pub fn zero() -> Self {
        LaurentValue::default()
    }

    pub fn constant(c: CycValue) -> Self {
        LaurentValue::monomial(0, c)
    }

    pub fn monomial(exp: i64, c: CycValue) -> Self {
        let mut out = LaurentValue::zero();
        out.add_term(exp, &c);
        out
    }

    pub fn add_term(&mut self, exp: i64, c: &CycValue) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(CycValue::zero);
        *entry = &*entry + c;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &CycValue)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    /// Value at `t = 1`, i.e. at `s = 1/2`.
    pub fn eval_at_one(&self) -> CycValue {
        self.terms.values().cloned().sum()
    }

    pub fn scale(&self, c: &CycValue) -> Self {
        let mut out = LaurentValue::zero();
        for (e, v) in &self.terms {
            out.add_term(*e, &(v * c));
        }
        out
    }
}

impl Add for &LaurentValue {
    type Output = LaurentValue;
    fn add(self, rhs: &LaurentValue) -> LaurentValue {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c);
        }
        out
    }
}

impl Mul for &LaurentValue {
    type Output = LaurentValue;
    fn mul(self, rhs: &LaurentValue) -> LaurentValue {
        let mut out = LaurentValue::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, &(c1 * c2));
            }
        }
        out
    }
}

impl fmt::Display for LaurentValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.terms.iter().map(|(e, c)| if *e == 0 { format!("({c})") } else { format!("({c})*t^{e}") }).collect();
        write!(f, "{}", parts.join(" + "))
    }
}
