//! Dense matrices over `E`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::localfield::{q, Algebra, Ext, Val, Q};

use super::linalg;

/// A matrix over `F` as rows.
pub type FRows = Vec<Vec<Q>>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatE {
    alg: Algebra,
    rows: usize,
    cols: usize,
    data: Vec<Ext>,
}

impl MatE {
    pub fn new(alg: Algebra, rows: usize, cols: usize, data: Vec<Ext>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Precondition(format!("{} entries do not fill a {rows}x{cols} matrix", data.len())));
        }
        if data.iter().any(|e| e.alg != alg) {
            return Err(Error::Precondition("entries from a different algebra".into()));
        }
        Ok(MatE { alg, rows, cols, data })
    }

    pub fn from_rows(alg: Algebra, rows: Vec<Vec<Ext>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Precondition("ragged rows".into()));
        }
        MatE::new(alg, r, c, rows.into_iter().flatten().collect())
    }

    /// Matrix with entries in `F`, given as integers.
    pub fn from_ints(alg: Algebra, rows: &[&[i64]]) -> Self {
        let rows = rows.iter().map(|r| r.iter().map(|&v| Ext::from_int(alg, v)).collect()).collect();
        MatE::from_rows(alg, rows).expect("rectangular literal")
    }

    pub fn from_f(alg: Algebra, rows: &[Vec<Q>]) -> Self {
        let rows = rows.iter().map(|r| r.iter().map(|v| Ext::from_f(alg, v.clone())).collect()).collect();
        MatE::from_rows(alg, rows).expect("rectangular rows")
    }

    pub fn zeros(alg: Algebra, rows: usize, cols: usize) -> Self {
        MatE { alg, rows, cols, data: vec![Ext::zero(alg); rows * cols] }
    }

    pub fn identity(alg: Algebra, n: usize) -> Self {
        MatE::scalar(n, &Ext::one(alg))
    }

    pub fn scalar(n: usize, c: &Ext) -> Self {
        let mut m = MatE::zeros(c.alg, n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    pub fn diag(alg: Algebra, d: &[Ext]) -> Self {
        let mut m = MatE::zeros(alg, d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        m
    }

    pub fn row_vector(alg: Algebra, v: Vec<Ext>) -> Self {
        let n = v.len();
        MatE::new(alg, 1, n, v).expect("row vector")
    }

    pub fn col_vector(alg: Algebra, v: Vec<Ext>) -> Self {
        let n = v.len();
        MatE::new(alg, n, 1, v).expect("column vector")
    }

    pub fn alg(&self) -> Algebra {
        self.alg
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Ext] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &Ext {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Ext) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> MatE {
        MatE::row_vector(self.alg, self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn col(&self, j: usize) -> MatE {
        MatE::col_vector(self.alg, (0..self.rows).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn to_rows(&self) -> Vec<Vec<Ext>> {
        self.data.chunks(self.cols.max(1)).map(|c| c.to_vec()).take(self.rows).collect()
    }

    /// Stack row vectors (or matrices) vertically.
    pub fn vstack(parts: &[MatE]) -> Result<MatE> {
        let first = parts.first().ok_or_else(|| Error::Precondition("nothing to stack".into()))?;
        if parts.iter().any(|m| m.cols != first.cols) {
            return Err(Error::Precondition("column counts differ".into()));
        }
        let rows = parts.iter().map(|m| m.rows).sum();
        MatE::new(first.alg, rows, first.cols, parts.iter().flat_map(|m| m.data.clone()).collect())
    }

    /// Place column vectors (or matrices) side by side.
    pub fn hstack(parts: &[MatE]) -> Result<MatE> {
        let ts: Vec<MatE> = parts.iter().map(MatE::transpose).collect();
        Ok(MatE::vstack(&ts)?.transpose())
    }

    pub fn map(&self, f: impl Fn(&Ext) -> Ext) -> MatE {
        MatE { alg: self.alg, rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> MatE {
        let mut out = MatE::zeros(self.alg, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Entrywise Galois conjugate.
    pub fn conj(&self) -> MatE {
        self.map(Ext::conj)
    }

    /// `g* = transpose(conj(g))`.
    pub fn conj_transpose(&self) -> MatE {
        self.conj().transpose()
    }

    pub fn scale(&self, c: &Ext) -> MatE {
        self.map(|e| c * e)
    }

    pub fn scale_f(&self, c: &Q) -> MatE {
        self.map(|e| e.scale(c))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Ext::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == MatE::identity(self.alg, self.rows)
    }

    /// All entries fixed by the Galois involution.
    pub fn is_over_f(&self) -> bool {
        self.data.iter().all(Ext::is_in_f)
    }

    /// Minimum entry valuation (componentwise minimum at split places).
    pub fn vmin(&self, p: u64) -> Val {
        self.data.iter().map(|e| e.valuation(p).min()).min().unwrap_or(Val::Inf)
    }

    pub fn is_integral(&self, p: u64) -> bool {
        self.vmin(p).is_nonneg()
    }

    /// Membership in `GL_n(O_E)`.
    pub fn is_in_gl_o(&self, p: u64) -> bool {
        self.is_square() && self.is_integral(p) && self.det().is_unit(p)
    }

    pub fn trace(&self) -> Ext {
        (0..self.rows.min(self.cols)).fold(Ext::zero(self.alg), |acc, i| &acc + self.get(i, i))
    }

    pub fn try_mul(&self, rhs: &MatE) -> Result<MatE> {
        if self.cols != rhs.rows {
            return Err(Error::Precondition(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = MatE::zeros(self.alg, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let t = a * rhs.get(k, j);
                    let cur = &out.data[i * rhs.cols + j] + &t;
                    out.data[i * rhs.cols + j] = cur;
                }
            }
        }
        Ok(out)
    }

    fn zip(&self, rhs: &MatE, f: impl Fn(&Ext, &Ext) -> Ext) -> MatE {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        MatE {
            alg: self.alg,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> MatE {
        let mut out = MatE::identity(self.alg, self.rows);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// `I, A, A^2, ..., A^{k-1}`.
    pub fn powers(&self, k: usize) -> Vec<MatE> {
        let mut out = Vec::with_capacity(k);
        let mut cur = MatE::identity(self.alg, self.rows);
        for _ in 0..k {
            let next = &cur * self;
            out.push(cur);
            cur = next;
        }
        out
    }

    /// `sum c_i A^i`, coefficients from the constant term up.
    pub fn eval_poly(&self, coeffs: &[Ext]) -> MatE {
        let mut acc = MatE::zeros(self.alg, self.rows, self.cols);
        for c in coeffs.iter().rev() {
            acc = &(&acc * self) + &MatE::scalar(self.rows, c);
        }
        acc
    }

    /// Faddeev-LeVerrier: returns the monic characteristic polynomial `det(X - A)` from the
    /// constant term up, together with the auxiliary matrix `M_n` satisfying `A M_n = -c_0 I`.
    fn leverrier(&self) -> (Vec<Ext>, MatE) {
        assert!(self.is_square(), "characteristic polynomial of a non-square matrix");
        let n = self.rows;
        let mut coeffs = vec![Ext::zero(self.alg); n + 1];
        coeffs[n] = Ext::one(self.alg);
        let mut m = MatE::zeros(self.alg, n, n);
        for k in 1..=n {
            m = &(self * &m) + &MatE::scalar(n, &coeffs[n - k + 1]);
            let t = (self * &m).trace();
            coeffs[n - k] = t.scale(&(-Q::new(1.into(), (k as i64).into())));
        }
        (coeffs, m)
    }

    pub fn charpoly(&self) -> Vec<Ext> {
        self.leverrier().0
    }

    pub fn det(&self) -> Ext {
        let n = self.rows;
        if n == 0 {
            return Ext::one(self.alg);
        }
        let c0 = self.leverrier().0[0].clone();
        if n.is_multiple_of(2) {
            c0
        } else {
            -c0
        }
    }

    pub fn adjugate(&self) -> MatE {
        let n = self.rows;
        if n == 1 {
            return MatE::identity(self.alg, 1);
        }
        let m = self.leverrier().1;
        if n % 2 == 1 {
            m
        } else {
            -m
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.det().is_invertible()
    }

    pub fn inverse(&self) -> Result<MatE> {
        if !self.is_square() {
            return Err(Error::Singular);
        }
        let d = self.det();
        let di = d.inv().map_err(|_| Error::Singular)?;
        Ok(self.adjugate().scale(&di))
    }

    /// Left and right components of a matrix over `F x F`.
    pub fn split_components(&self) -> Result<(FRows, FRows)> {
        if self.alg != Algebra::Split {
            return Err(Error::SplitOnly);
        }
        let rows = self.to_rows();
        let left = rows.iter().map(|r| r.iter().map(|e| e.a.clone()).collect()).collect();
        let right = rows.iter().map(|r| r.iter().map(|e| e.b.clone()).collect()).collect();
        Ok((left, right))
    }

    pub fn from_split_components(left: &[Vec<Q>], right: &[Vec<Q>]) -> Result<MatE> {
        let rows = left
            .iter()
            .zip(right)
            .map(|(l, r)| l.iter().zip(r).map(|(a, b)| Ext::new(Algebra::Split, a.clone(), b.clone())).collect())
            .collect();
        MatE::from_rows(Algebra::Split, rows)
    }

    /// Rank over `E`; at split places the pair of component ranks.
    pub fn rank(&self) -> (usize, usize) {
        match self.alg {
            Algebra::Inert { .. } => {
                let r = linalg::rank(&self.to_rows());
                (r, r)
            }
            Algebra::Split => {
                let (l, r) = self.split_components().unwrap();
                (linalg::rank(&l), linalg::rank(&r))
            }
        }
    }

    pub fn has_full_rank(&self) -> bool {
        let (l, r) = self.rank();
        let full = self.rows.min(self.cols);
        l == full && r == full
    }
}

/// Solve `a * x = b` for `x` with entries in `E`, requiring a unique solution.
pub fn solve_unique_e(a: &[Vec<Ext>], b: &[Ext], alg: Algebra) -> Option<Vec<Ext>> {
    match alg {
        Algebra::Inert { .. } => linalg::solve_unique(a, b),
        Algebra::Split => {
            let part = |pick: fn(&Ext) -> Q| {
                let am: Vec<Vec<Q>> = a.iter().map(|r| r.iter().map(pick).collect()).collect();
                let bm: Vec<Q> = b.iter().map(pick).collect();
                linalg::solve_unique(&am, &bm)
            };
            let l = part(|e| e.a.clone())?;
            let r = part(|e| e.b.clone())?;
            Some(l.into_iter().zip(r).map(|(a, b)| Ext::new(Algebra::Split, a, b)).collect())
        }
    }
}

/// Squarefreeness of a polynomial over `E`, componentwise at split places.
pub fn is_squarefree_e(poly: &[Ext], alg: Algebra) -> bool {
    match alg {
        Algebra::Inert { .. } => linalg::is_squarefree(poly, |n| Ext::from_int(alg, n)),
        Algebra::Split => {
            let l: Vec<Q> = poly.iter().map(|e| e.a.clone()).collect();
            let r: Vec<Q> = poly.iter().map(|e| e.b.clone()).collect();
            linalg::is_squarefree(&l, q) && linalg::is_squarefree(&r, q)
        }
    }
}

impl Mul for &MatE {
    type Output = MatE;
    fn mul(self, rhs: &MatE) -> MatE {
        self.try_mul(rhs).expect("shape mismatch")
    }
}

impl Add for &MatE {
    type Output = MatE;
    fn add(self, rhs: &MatE) -> MatE {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &MatE {
    type Output = MatE;
    fn sub(self, rhs: &MatE) -> MatE {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Neg for MatE {
    type Output = MatE;
    fn neg(self) -> MatE {
        self.map(|e| -e.clone())
    }
}

impl fmt::Display for MatE {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_rows()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::qf;

    const INERT: Algebra = Algebra::Inert { eps: 2 };

    fn e(a: i64, b: i64) -> Ext {
        Ext::new(INERT, q(a), q(b))
    }

    #[test]
    fn charpoly_of_companion() {
        // companion of x^2 - 3x + 5
        let c = MatE::from_ints(INERT, &[&[0, -5], &[1, 3]]);
        assert_eq!(c.charpoly(), vec![e(5, 0), e(-3, 0), e(1, 0)]);
        assert_eq!(c.det(), e(5, 0));
    }

    #[test]
    fn inverse_via_adjugate() {
        let m = MatE::from_rows(
            INERT,
            vec![vec![e(1, 1), e(2, 0), e(0, 1)], vec![e(0, 0), e(3, -1), e(1, 0)], vec![e(1, 0), e(0, 0), e(2, 2)]],
        )
        .unwrap();
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).is_identity());
        assert!((&inv * &m).is_identity());
        let sing = MatE::from_ints(INERT, &[&[1, 2], &[2, 4]]);
        assert!(matches!(sing.inverse(), Err(Error::Singular)));
    }

    #[test]
    fn split_inverse_is_componentwise() {
        let s = Algebra::Split;
        let m = MatE::from_split_components(
            &[vec![q(1), q(2)], vec![q(3), q(4)]],
            &[vec![q(2), q(0)], vec![q(0), qf(1, 2)]],
        )
        .unwrap();
        assert!((&m * &m.inverse().unwrap()).is_identity());
        assert_eq!(m.det(), Ext::new(s, q(-2), q(1)));
        let half = MatE::from_split_components(&[vec![q(1)]], &[vec![q(0)]]).unwrap();
        assert!(half.inverse().is_err());
    }

    #[test]
    fn conj_transpose_examples() {
        let s = MatE::from_rows(INERT, vec![vec![e(0, 1)]]).unwrap();
        assert_eq!(s.conj_transpose(), MatE::from_rows(INERT, vec![vec![e(0, -1)]]).unwrap());
        let split =
            MatE::from_split_components(&[vec![q(1), q(2)], vec![q(3), q(4)]], &[vec![q(5), q(6)], vec![q(7), q(8)]])
                .unwrap();
        let expect =
            MatE::from_split_components(&[vec![q(5), q(7)], vec![q(6), q(8)]], &[vec![q(1), q(3)], vec![q(2), q(4)]])
                .unwrap();
        assert_eq!(split.conj_transpose(), expect);
    }

    #[test]
    fn stacking() {
        let r1 = MatE::row_vector(INERT, vec![e(1, 0), e(2, 0)]);
        let r2 = MatE::row_vector(INERT, vec![e(3, 0), e(4, 0)]);
        let m = MatE::vstack(&[r1.clone(), r2]).unwrap();
        assert_eq!(m.row(0), r1);
        let h = MatE::hstack(&[m.col(1), m.col(0)]).unwrap();
        assert_eq!(h.get(0, 0), &e(2, 0));
    }
}
