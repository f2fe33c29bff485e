//! Finite models of Schwartz functions on `F_n`, `E_n` and `F_n x F^{-,n}`, their transforms,
//! and locally constant compactly supported functions on `GL_n`.

mod action;
mod group;
mod transform;

pub use action::{materialize, pullback_f, r_mu, weil_act_split, Conj, Pullback, Tensor};
pub use group::{coset_volume, f_tilde, frames, split_transfer_pair, GroupFn};
pub use transform::{
    ddagger_point, fourier, haar_integrate, pft_dagger, pft_dagger_at, pft_ddagger, pft_ddagger_at, PairingSign,
};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localfield::{p_pow, q, rational, val, Algebra, CycValue, Ext, LocalField, Val, Q};
use crate::matalg::MatE;

/// Largest table a [`LatticeFn`] may hold.
pub const MAX_TABLE: usize = 1 << 22;

/// Which coordinate space a function lives on. All are identified with `F^D`:
/// `E_n` through the basis `1, sqrt(eps)` (inert) or the two components (split), blocked as
/// `[first coordinates..., second coordinates...]`; `F_n x F^{-,n}` through `(x, y0)` with `y = j y0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    #[serde(rename = "F_n")]
    FRow,
    #[serde(rename = "E_n")]
    ERow,
    #[serde(rename = "F_n x F^-n")]
    Prod,
}

impl Space {
    pub fn dim(self, n: usize) -> usize {
        match self {
            Space::FRow => n,
            Space::ERow | Space::Prod => 2 * n,
        }
    }
}

/// Anything that can be evaluated as a Schwartz function on `F^D`: it vanishes outside
/// `p^{-support} O^D` and is invariant under `p^{depth} O^D`.
pub trait Schwartz: Sync {
    fn dim(&self) -> usize;
    fn support(&self) -> i64;
    fn depth(&self) -> i64;
    fn eval(&self, v: &[Q]) -> CycValue;
}

/// A Schwartz function tabulated on `p^{-m} O^D / p^k O^D`.
#[derive(Clone, Debug)]
pub struct LatticeFn {
    space: Space,
    n: usize,
    p: u64,
    m: i64,
    k: i64,
    table: Vec<CycValue>,
}

/// `v * g` for a row vector `v`.
pub fn row_times(v: &[Q], g: &[Vec<Q>]) -> Vec<Q> {
    let cols = g.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|j| v.iter().zip(g).fold(Q::zero(), |acc, (a, row)| if a.is_zero() { acc } else { acc + a * &row[j] }))
        .collect()
}

/// Minimum valuation over a list of rationals.
pub fn vmin_q(v: &[Q], p: u64) -> Val {
    v.iter().map(|x| val(x, p)).min().unwrap_or(Val::Inf)
}

pub fn vmin_qmat(g: &[Vec<Q>], p: u64) -> Val {
    g.iter().map(|r| vmin_q(r, p)).min().unwrap_or(Val::Inf)
}

impl LatticeFn {
    pub fn zero(space: Space, n: usize, p: u64, m: i64, k: i64) -> Result<Self> {
        if m + k < 0 {
            return Err(Error::Precondition(format!("support level {m} and depth {k} leave no cosets")));
        }
        let side = rational::u64_pow(p, (m + k) as u32) as usize;
        let size = side
            .checked_pow(space.dim(n) as u32)
            .filter(|s| *s <= MAX_TABLE)
            .ok_or_else(|| Error::Budget(format!("table for (m, k) = ({m}, {k}) is too large")))?;
        Ok(LatticeFn { space, n, p, m, k, table: vec![CycValue::zero(); size] })
    }

    /// Indicator of `p^a O^D`.
    pub fn indicator(space: Space, n: usize, p: u64, a: i64) -> Self {
        let mut f = LatticeFn::zero(space, n, p, -a, a).expect("single coset");
        f.table[0] = CycValue::one();
        f
    }

    /// The indicator of the integral lattice.
    pub fn basic(space: Space, n: usize, p: u64) -> Self {
        LatticeFn::indicator(space, n, p, 0)
    }

    pub fn from_fn(
        space: Space,
        n: usize,
        p: u64,
        m: i64,
        k: i64,
        f: impl Fn(&[Q]) -> CycValue + Sync,
    ) -> Result<Self> {
        let mut out = LatticeFn::zero(space, n, p, m, k)?;
        for (idx, slot) in out.table.iter_mut().enumerate() {
            let pt = point_of(idx, space.dim(n), p, m, k);
            *slot = f(&pt);
        }
        Ok(out)
    }

    /// Build from `(point, value)` pairs; every point must lie in the support.
    pub fn from_entries(
        space: Space,
        n: usize,
        p: u64,
        m: i64,
        k: i64,
        entries: &[(Vec<Q>, CycValue)],
    ) -> Result<Self> {
        let mut out = LatticeFn::zero(space, n, p, m, k)?;
        for (pt, v) in entries {
            let idx =
                out.index_of(pt).ok_or_else(|| Error::Precondition("point outside the declared support".into()))?;
            out.table[idx] = v.clone();
        }
        Ok(out)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn table(&self) -> &[CycValue] {
        &self.table
    }

    pub(crate) fn table_mut(&mut self) -> &mut [CycValue] {
        &mut self.table
    }

    fn side(&self) -> u64 {
        rational::u64_pow(self.p, (self.m + self.k) as u32)
    }

    fn index_of(&self, v: &[Q]) -> Option<usize> {
        assert_eq!(v.len(), self.space.dim(self.n), "point of the wrong dimension");
        let side = self.side();
        let shift = p_pow(self.p, self.m);
        let mut idx = 0usize;
        for x in v.iter().rev() {
            if val(x, self.p) < Val::Fin(-self.m) {
                return None;
            }
            idx = idx * side as usize + rational::residue(&(x * &shift), side) as usize;
        }
        Some(idx)
    }

    /// Representative point of the coset with table index `idx`.
    pub fn point(&self, idx: usize) -> Vec<Q> {
        point_of(idx, self.space.dim(self.n), self.p, self.m, self.k)
    }

    /// Nonzero `(point, value)` pairs in table order.
    pub fn entries(&self) -> Vec<(Vec<Q>, CycValue)> {
        self.table.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (self.point(i), v.clone())).collect()
    }

    pub fn map_values(&self, f: impl Fn(&CycValue) -> CycValue) -> LatticeFn {
        LatticeFn { table: self.table.iter().map(f).collect(), ..self.clone() }
    }

    pub fn conj(&self) -> LatticeFn {
        self.map_values(CycValue::conj)
    }

    pub fn scale(&self, c: &CycValue) -> LatticeFn {
        self.map_values(|v| v * c)
    }

    /// `x -> phi(-x)`.
    pub fn reflect(&self) -> LatticeFn {
        LatticeFn::from_fn(self.space, self.n, self.p, self.m, self.k, |v| {
            let neg: Vec<Q> = v.iter().map(|x| -x.clone()).collect();
            self.eval(&neg)
        })
        .expect("same shape")
    }

    /// The same function tabulated with a larger support and finer depth.
    pub fn refine(&self, m: i64, k: i64) -> Result<LatticeFn> {
        if m < self.m || k < self.k {
            return Err(Error::Precondition("refinement cannot shrink support or depth".into()));
        }
        LatticeFn::from_fn(self.space, self.n, self.p, m, k, |v| self.eval(v))
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(CycValue::is_zero)
    }
}

fn point_of(mut idx: usize, dim: usize, p: u64, m: i64, k: i64) -> Vec<Q> {
    let side = rational::u64_pow(p, (m + k) as u32) as usize;
    let scale = p_pow(p, -m);
    (0..dim)
        .map(|_| {
            let r = idx % side;
            idx /= side;
            q(r as i64) * &scale
        })
        .collect()
}

impl Schwartz for LatticeFn {
    fn dim(&self) -> usize {
        self.space.dim(self.n)
    }
    fn support(&self) -> i64 {
        self.m
    }
    fn depth(&self) -> i64 {
        self.k
    }
    fn eval(&self, v: &[Q]) -> CycValue {
        match self.index_of(v) {
            Some(i) => self.table[i].clone(),
            None => CycValue::zero(),
        }
    }
}

impl PartialEq for LatticeFn {
    /// Equality as functions, comparing on a common refinement.
    fn eq(&self, other: &Self) -> bool {
        if self.space != other.space || self.n != other.n || self.p != other.p {
            return false;
        }
        let (m, k) = (self.m.max(other.m), self.k.max(other.k));
        let dim = self.space.dim(self.n);
        let side = rational::u64_pow(self.p, (m + k) as u32) as usize;
        (0..side.pow(dim as u32)).all(|i| {
            let pt = point_of(i, dim, self.p, m, k);
            self.eval(&pt) == other.eval(&pt)
        })
    }
}

/// F-coordinates of a row vector in `E_n`.
pub fn erow_coords(z: &MatE) -> Vec<Q> {
    let e = z.entries();
    e.iter().map(|x| x.a.clone()).chain(e.iter().map(|x| x.b.clone())).collect()
}

pub fn erow_from_coords(alg: Algebra, v: &[Q]) -> MatE {
    let n = v.len() / 2;
    MatE::row_vector(alg, (0..n).map(|i| Ext::new(alg, v[i].clone(), v[n + i].clone())).collect())
}

/// Matrix of `z -> z g` on the coordinates of `E_n`.
pub fn erow_right_mult(g: &MatE) -> Vec<Vec<Q>> {
    let n = g.rows();
    let mut out = vec![vec![Q::zero(); 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let e = g.get(i, j);
            match g.alg() {
                Algebra::Inert { eps } => {
                    // (a + b s)(A + B s) = (aA + eps bB) + (aB + bA) s
                    out[i][j] = e.a.clone();
                    out[i][n + j] = e.b.clone();
                    out[n + i][j] = &e.b * q(eps);
                    out[n + i][n + j] = e.a.clone();
                }
                Algebra::Split => {
                    out[i][j] = e.a.clone();
                    out[n + i][n + j] = e.b.clone();
                }
            }
        }
    }
    out
}

/// Rational matrix of a matrix over `F`.
pub fn f_matrix(g: &MatE) -> Result<Vec<Vec<Q>>> {
    if !g.is_over_f() {
        return Err(Error::Precondition("matrix has entries outside F".into()));
    }
    Ok(g.to_rows().iter().map(|r| r.iter().map(|e| e.a.clone()).collect()).collect())
}

/// The coordinate `y0` of a purely imaginary `y = j y0`.
pub fn imaginary_coords(field: &LocalField, y: &MatE) -> Result<Vec<Q>> {
    let ji = field.j().inv()?;
    y.entries()
        .iter()
        .map(|e| (&ji * e).to_f().ok_or_else(|| Error::Precondition("entry is not purely imaginary".into())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::qf;

    #[test]
    fn basic_function_shape() {
        let f = LatticeFn::basic(Space::FRow, 2, 3);
        assert_eq!((f.m(), f.k(), f.table().len()), (0, 0, 1));
        assert_eq!(f.eval(&[q(4), q(-7)]), CycValue::one());
        assert_eq!(f.eval(&[qf(1, 3), q(0)]), CycValue::zero());
    }

    #[test]
    fn coset_independence() {
        let f = LatticeFn::from_fn(Space::FRow, 1, 3, 1, 1, |v| CycValue::rational(v[0].clone() * q(3))).unwrap();
        // value depends only on the coset of p^1 O
        assert_eq!(f.eval(&[qf(1, 3)]), f.eval(&[qf(1, 3) + q(3)]));
        assert_eq!(f.eval(&[qf(1, 9)]), CycValue::zero());
        assert_eq!(f.refine(2, 2).unwrap(), f);
    }

    #[test]
    fn from_entries_rejects_outside_support() {
        let e = vec![(vec![qf(1, 9)], CycValue::one())];
        assert!(LatticeFn::from_entries(Space::FRow, 1, 3, 1, 0, &e).is_err());
    }

    #[test]
    fn right_multiplication_matrix() {
        let alg = Algebra::Inert { eps: 2 };
        let z = MatE::row_vector(alg, vec![Ext::new(alg, q(1), q(2)), Ext::new(alg, q(0), q(1))]);
        let g = MatE::from_rows(
            alg,
            vec![
                vec![Ext::new(alg, q(1), q(1)), Ext::new(alg, q(3), q(0))],
                vec![Ext::new(alg, q(0), q(2)), Ext::new(alg, q(1), q(-1))],
            ],
        )
        .unwrap();
        assert_eq!(row_times(&erow_coords(&z), &erow_right_mult(&g)), erow_coords(&(&z * &g)));
        let s = Algebra::Split;
        let zs = MatE::row_vector(s, vec![Ext::new(s, q(1), q(2))]);
        let gs = MatE::scalar(1, &Ext::new(s, q(5), q(7)));
        assert_eq!(row_times(&erow_coords(&zs), &erow_right_mult(&gs)), erow_coords(&(&zs * &gs)));
    }
}
