//! Exact linear algebra and polynomial gcds over a field of coefficients.

use num_traits::{One, Zero};

use crate::localfield::{Ext, Q};

/// The handful of field operations Gaussian elimination and Euclid need.
pub trait FieldElem: Clone + PartialEq {
    fn f_zero(&self) -> Self;
    fn f_one(&self) -> Self;
    fn f_is_zero(&self) -> bool;
    fn f_inv(&self) -> Self;
    fn f_mul(&self, rhs: &Self) -> Self;
    fn f_sub(&self, rhs: &Self) -> Self;
}

impl FieldElem for Q {
    fn f_zero(&self) -> Self {
        Q::zero()
    }
    fn f_one(&self) -> Self {
        Q::one()
    }
    fn f_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn f_inv(&self) -> Self {
        self.recip()
    }
    fn f_mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn f_sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
}

/// Only meaningful when `E` is a field; split elements go through their components instead.
impl FieldElem for Ext {
    fn f_zero(&self) -> Self {
        Ext::zero(self.alg)
    }
    fn f_one(&self) -> Self {
        Ext::one(self.alg)
    }
    fn f_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn f_inv(&self) -> Self {
        self.inv().expect("nonzero element of a field")
    }
    fn f_mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn f_sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
}

/// Row-reduces `m` in place and returns the pivot columns.
#[allow(clippy::needless_range_loop)]
pub fn row_reduce<T: FieldElem>(m: &mut [Vec<T>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !m[i][c].f_is_zero()) else { continue };
        m.swap(r, piv);
        let inv = m[r][c].f_inv();
        for x in m[r].iter_mut() {
            *x = x.f_mul(&inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].f_is_zero() {
                let factor = m[i][c].clone();
                for j in 0..cols {
                    let t = factor.f_mul(&m[r][j]);
                    m[i][j] = m[i][j].f_sub(&t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<T: FieldElem>(m: &[Vec<T>]) -> usize {
    let mut work = m.to_vec();
    row_reduce(&mut work).len()
}

/// The unique solution of `a * x = b`, or `None` if the system is inconsistent or underdetermined.
pub fn solve_unique<T: FieldElem>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let unknowns = a.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = row_reduce(&mut aug);
    if pivots.contains(&unknowns) || pivots.len() != unknowns {
        return None;
    }
    Some((0..unknowns).map(|i| aug[i][unknowns].clone()).collect())
}

fn trim<T: FieldElem>(p: &mut Vec<T>) {
    while p.last().is_some_and(|c| c.f_is_zero()) {
        p.pop();
    }
}

/// Remainder of `a` modulo a nonzero `b`, coefficients listed from the constant term up.
pub fn poly_rem<T: FieldElem>(a: &[T], b: &[T]) -> Vec<T> {
    let mut r = a.to_vec();
    let mut d = b.to_vec();
    trim(&mut r);
    trim(&mut d);
    let lead_inv = d.last().expect("division by the zero polynomial").f_inv();
    while r.len() >= d.len() {
        let shift = r.len() - d.len();
        let factor = r.last().unwrap().f_mul(&lead_inv);
        for (i, c) in d.iter().enumerate() {
            let t = factor.f_mul(c);
            r[shift + i] = r[shift + i].f_sub(&t);
        }
        r.pop();
        trim(&mut r);
    }
    r
}

/// Monic-free gcd; only its degree is meaningful to callers.
pub fn poly_gcd<T: FieldElem>(a: &[T], b: &[T]) -> Vec<T> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
    }
    x
}

/// Formal derivative; `int` embeds the integers into the coefficient field.
pub fn derivative<T: FieldElem>(p: &[T], int: impl Fn(i64) -> T) -> Vec<T> {
    p.iter().enumerate().skip(1).map(|(i, c)| c.f_mul(&int(i as i64))).collect()
}

/// A nonzero polynomial is squarefree iff it is coprime to its derivative.
pub fn is_squarefree<T: FieldElem>(p: &[T], int: impl Fn(i64) -> T) -> bool {
    let d = derivative(p, int);
    poly_gcd(p, &d).len() == 1
}
