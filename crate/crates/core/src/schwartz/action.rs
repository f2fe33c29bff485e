//! Lazy wrappers: linear pullbacks (the actions `R_mu` and `omega`), tensor products, conjugation.

use crate::error::{Error, Result};
use crate::localfield::{q_power_half, Algebra, CycValue, ExtVal, LocalField, Val, Q};
use crate::matalg::MatE;

use super::{erow_right_mult, f_matrix, row_times, vmin_qmat, LatticeFn, Schwartz, Space};

/// `v -> scalar * inner(v G)`.
pub struct Pullback<'a> {
    inner: &'a dyn Schwartz,
    g: Vec<Vec<Q>>,
    scalar: CycValue,
    support: i64,
    depth: i64,
}

fn level(v: Val) -> Result<i64> {
    v.finite().ok_or_else(|| Error::Precondition("zero transformation matrix".into()))
}

impl<'a> Pullback<'a> {
    pub fn new(inner: &'a dyn Schwartz, g: Vec<Vec<Q>>, scalar: CycValue, p: u64) -> Result<Self> {
        if g.len() != inner.dim() {
            return Err(Error::Precondition("transformation has the wrong size".into()));
        }
        let inv = MatE::from_f(Algebra::Split, &g).inverse()?;
        let inv: Vec<Vec<Q>> = inv.to_rows().iter().map(|r| r.iter().map(|e| e.a.clone()).collect()).collect();
        let support = inner.support() - level(vmin_qmat(&inv, p))?;
        let depth = inner.depth() - level(vmin_qmat(&g, p))?;
        Ok(Pullback { inner, g, scalar, support, depth })
    }
}

impl Schwartz for Pullback<'_> {
    fn dim(&self) -> usize {
        self.g.len()
    }
    fn support(&self) -> i64 {
        self.support
    }
    fn depth(&self) -> i64 {
        self.depth
    }
    fn eval(&self, v: &[Q]) -> CycValue {
        let w = self.inner.eval(&row_times(v, &self.g));
        if w.is_zero() {
            w
        } else {
            &w * &self.scalar
        }
    }
}

/// `R_mu(g) phi'(z) = mu(det g) |det g|_E^{1/2} phi'(z g)` on `E_n`.
pub fn r_mu<'a>(field: &LocalField, g: &MatE, phi: &'a dyn Schwartz) -> Result<Pullback<'a>> {
    let d = g.det();
    if !d.is_invertible() {
        return Err(Error::Singular);
    }
    let v = match field.ext_valuation(&d) {
        ExtVal::Inert(v) => 2 * v.expect_finite()?,
        ExtVal::Split(l, r) => l.expect_finite()? + r.expect_finite()?,
    };
    let scalar = &field.mu(&d)? * &q_power_half(field.p(), -v);
    Pullback::new(phi, erow_right_mult(g), scalar, field.p())
}

/// `omega(g) phi(x) = mu_1(det g_1) |det g_1|^{1/2} phi(x g_1)` for `g = (g_1, g_1^{-T})`.
pub fn weil_act_split<'a>(field: &LocalField, g: &MatE, phi: &'a dyn Schwartz) -> Result<Pullback<'a>> {
    if !field.is_split() {
        return Err(Error::SplitOnly);
    }
    let (g1, g2) = g.split_components()?;
    let m1 = MatE::from_f(Algebra::Split, &g1);
    let m2 = MatE::from_f(Algebra::Split, &g2);
    if !(&m1.transpose() * &m2).is_identity() {
        return Err(Error::Precondition("g is not unitary for the split form".into()));
    }
    let d = m1.det().a;
    let v = field.valuation(&d).expect_finite()?;
    let scalar = &field.mu1(&d)? * &q_power_half(field.p(), -v);
    Pullback::new(phi, g1, scalar, field.p())
}

/// `phi_a (x) phi_b` on concatenated coordinates.
pub struct Tensor<'a>(pub &'a dyn Schwartz, pub &'a dyn Schwartz);

impl Schwartz for Tensor<'_> {
    fn dim(&self) -> usize {
        self.0.dim() + self.1.dim()
    }
    fn support(&self) -> i64 {
        self.0.support().max(self.1.support())
    }
    fn depth(&self) -> i64 {
        self.0.depth().max(self.1.depth())
    }
    fn eval(&self, v: &[Q]) -> CycValue {
        let (a, b) = v.split_at(self.0.dim());
        let x = self.0.eval(a);
        if x.is_zero() {
            return x;
        }
        &x * &self.1.eval(b)
    }
}

/// Pointwise complex conjugate.
pub struct Conj<'a>(pub &'a dyn Schwartz);

impl Schwartz for Conj<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn support(&self) -> i64 {
        self.0.support()
    }
    fn depth(&self) -> i64 {
        self.0.depth()
    }
    fn eval(&self, v: &[Q]) -> CycValue {
        self.0.eval(v).conj()
    }
}

/// Tabulates a lazy function on its declared support and depth.
pub fn materialize(f: &dyn Schwartz, space: Space, n: usize, p: u64) -> Result<LatticeFn> {
    if space.dim(n) != f.dim() {
        return Err(Error::Precondition("space does not match the function's dimension".into()));
    }
    LatticeFn::from_fn(space, n, p, f.support(), f.depth(), |v| f.eval(v))
}

/// `phi(x g)` for `g` over `F`, on `F_n`; used for the action of `GL_n(F)` on Lagrangians.
pub fn pullback_f<'a>(g: &MatE, phi: &'a dyn Schwartz, p: u64) -> Result<Pullback<'a>> {
    Pullback::new(phi, f_matrix(g)?, CycValue::one(), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::{q, qf, Ext, MuAtP};

    #[test]
    fn r_mu_identity_and_scalar() {
        let field = LocalField::inert(3, 2).unwrap();
        let basic = LatticeFn::basic(Space::ERow, 1, 3);
        let id = MatE::identity(field.alg(), 1);
        assert_eq!(materialize(&r_mu(&field, &id, &basic).unwrap(), Space::ERow, 1, 3).unwrap(), basic);
        // g = p: mu(p) = -1, |p|_E^{1/2} = 1/3, support becomes p^{-1} O_E
        let g = MatE::scalar(1, &field.f_int(3));
        let out = materialize(&r_mu(&field, &g, &basic).unwrap(), Space::ERow, 1, 3).unwrap();
        let expect = LatticeFn::indicator(Space::ERow, 1, 3, -1).scale(&CycValue::rational(qf(-1, 3)));
        assert_eq!(out, expect);
    }

    #[test]
    fn weil_split_support_shift() {
        let field = LocalField::split(3, MuAtP::I).unwrap();
        let basic = LatticeFn::basic(Space::FRow, 1, 3);
        let g = MatE::scalar(1, &Ext::new(Algebra::Split, q(3), qf(1, 3)));
        let out = materialize(&weil_act_split(&field, &g, &basic).unwrap(), Space::FRow, 1, 3).unwrap();
        let c = &CycValue::i() * &q_power_half(3, -1);
        assert_eq!(out, LatticeFn::indicator(Space::FRow, 1, 3, -1).scale(&c));
        let bad = MatE::scalar(1, &Ext::new(Algebra::Split, q(3), q(3)));
        assert!(weil_act_split(&field, &bad, &basic).is_err());
    }

    #[test]
    fn tensor_and_conj() {
        let a = LatticeFn::from_entries(Space::FRow, 1, 3, 0, 1, &[(vec![q(1)], CycValue::i())]).unwrap();
        let b = LatticeFn::basic(Space::FRow, 1, 3);
        let t = Tensor(&a, &b);
        assert_eq!(t.eval(&[q(4), q(2)]), CycValue::i());
        assert_eq!(Conj(&t).eval(&[q(4), q(2)]), -CycValue::i());
        assert!(t.eval(&[q(0), q(2)]).is_zero());
    }
}
