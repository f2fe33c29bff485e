//! Locally constant functions on `GL_n(E)` or `GL_n(F)`, supported on `GL_n(O_E)`, as finite
//! sums over left cosets of the congruence subgroup `K_k = 1 + p^k Mat_n(O)`.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::localfield::{p_pow, q, rational, Algebra, CycValue, Ext, LocalField, Q};
use crate::matalg::MatE;

use super::{LatticeFn, Schwartz, Space, Tensor};

#[derive(Clone, Debug)]
pub struct GroupFn {
    field: LocalField,
    n: usize,
    level: u32,
    over_f: bool,
    entries: Vec<(MatE, CycValue)>,
    index: HashMap<Vec<u64>, usize>,
}

fn key(g: &MatE, p: u64, level: u32) -> Option<Vec<u64>> {
    if !g.is_in_gl_o(p) {
        return None;
    }
    let m = rational::u64_pow(p, level);
    Some(g.entries().iter().flat_map(|e| [rational::residue(&e.a, m), rational::residue(&e.b, m)]).collect())
}

/// Order of `GL_n(O/p^level)` for residue field size `q`.
fn gl_order(n: usize, q: u64, level: u32) -> BigInt {
    if level == 0 {
        return BigInt::one();
    }
    let qn = BigInt::from(q).pow(n as u32);
    let base: BigInt = (0..n).map(|i| &qn - BigInt::from(q).pow(i as u32)).product();
    base * BigInt::from(q).pow((n * n) as u32 * (level - 1))
}

/// Residues of `O_E` (or `O_F` when `over_f`) modulo `p^level`.
fn residues(alg: Algebra, p: u64, level: u32, over_f: bool) -> Vec<Ext> {
    let m = rational::u64_pow(p, level) as i64;
    let base: Vec<Q> = (0..m).map(q).collect();
    if over_f {
        return base.into_iter().map(|a| Ext::from_f(alg, a)).collect();
    }
    base.iter().flat_map(|a| base.iter().map(move |b| Ext::new(alg, a.clone(), b.clone()))).collect()
}

fn all_matrices(alg: Algebra, n: usize, entries: &[Ext]) -> impl Iterator<Item = MatE> + '_ {
    let total = entries.len().pow((n * n) as u32);
    (0..total).map(move |mut idx| {
        let data = (0..n * n)
            .map(|_| {
                let e = entries[idx % entries.len()].clone();
                idx /= entries.len();
                e
            })
            .collect();
        MatE::new(alg, n, n, data).expect("n x n data")
    })
}

/// Representatives of `GL_n(O) / K_level`, over `O_E` or `O_F`, in a fixed order.
pub fn frames(field: &LocalField, n: usize, level: u32, over_f: bool) -> Vec<MatE> {
    let alg = field.alg();
    if level == 0 {
        return vec![MatE::identity(alg, n)];
    }
    let p = field.p();
    let res = residues(alg, p, level, over_f);
    all_matrices(alg, n, &res).filter(|g| g.det().is_unit(p)).collect()
}

/// Representatives of `K_from / K_to`.
fn kernel_reps(field: &LocalField, n: usize, from: u32, to: u32, over_f: bool) -> Vec<MatE> {
    if from == 0 {
        return frames(field, n, to, over_f);
    }
    let alg = field.alg();
    let scale = Ext::from_f(alg, p_pow(field.p(), from as i64));
    let res = residues(alg, field.p(), to - from, over_f);
    let id = MatE::identity(alg, n);
    all_matrices(alg, n, &res).map(|x| &id + &x.scale(&scale)).collect()
}

impl GroupFn {
    /// Merges entries lying in the same coset; every representative must lie in `GL_n(O_E)`.
    pub fn new(field: &LocalField, n: usize, level: u32, over_f: bool, entries: Vec<(MatE, CycValue)>) -> Result<Self> {
        let p = field.p();
        let mut f = GroupFn { field: field.clone(), n, level, over_f, entries: Vec::new(), index: HashMap::new() };
        for (g, v) in entries {
            if g.rows() != n || !g.is_square() {
                return Err(Error::Precondition("coset representative has the wrong size".into()));
            }
            if over_f && !g.is_over_f() {
                return Err(Error::Precondition("representative must lie in GL_n(F)".into()));
            }
            let k =
                key(&g, p, level).ok_or_else(|| Error::Precondition("representatives must lie in GL_n(O)".into()))?;
            match f.index.get(&k) {
                Some(&i) => f.entries[i].1 = &f.entries[i].1 + &v,
                None => {
                    f.index.insert(k, f.entries.len());
                    f.entries.push((g, v));
                }
            }
        }
        f.prune();
        Ok(f)
    }

    fn prune(&mut self) {
        let kept: Vec<(MatE, CycValue)> = self.entries.drain(..).filter(|(_, v)| !v.is_zero()).collect();
        self.index.clear();
        for (i, (g, _)) in kept.iter().enumerate() {
            self.index.insert(key(g, self.field.p(), self.level).expect("checked on insert"), i);
        }
        self.entries = kept;
    }

    /// `c * 1_{GL_n(O)}`.
    pub fn constant_on_maximal(field: &LocalField, n: usize, over_f: bool, c: CycValue) -> Self {
        GroupFn::new(field, n, 0, over_f, vec![(MatE::identity(field.alg(), n), c)]).expect("identity is integral")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn over_f(&self) -> bool {
        self.over_f
    }

    pub fn entries(&self) -> &[(MatE, CycValue)] {
        &self.entries
    }

    pub fn eval(&self, g: &MatE) -> CycValue {
        key(g, self.field.p(), self.level)
            .and_then(|k| self.index.get(&k))
            .map_or_else(CycValue::zero, |&i| self.entries[i].1.clone())
    }

    /// Volume of one coset `g K_level`.
    pub fn coset_volume(&self) -> Result<Q> {
        coset_volume(&self.field, self.n, self.level, self.over_f)
    }

    pub fn haar_mass(&self) -> Result<CycValue> {
        let w = self.coset_volume()?;
        Ok(self.entries.iter().fold(CycValue::zero(), |acc, (_, v)| &acc + v).scale(&w))
    }

    /// The same function on cosets of a deeper congruence subgroup.
    pub fn refine(&self, level: u32) -> Result<GroupFn> {
        let field = &self.field;
        if level < self.level {
            return Err(Error::Precondition("refinement cannot lower the level".into()));
        }
        if level == self.level {
            return Ok(self.clone());
        }
        let ks = kernel_reps(field, self.n, self.level, level, self.over_f);
        let entries = self.entries.iter().flat_map(|(g, v)| ks.iter().map(move |u| (g * u, v.clone()))).collect();
        GroupFn::new(field, self.n, level, self.over_f, entries)
    }

    /// `g -> f(g^T)`.
    pub fn transpose(&self) -> GroupFn {
        let entries = self.entries.iter().map(|(g, v)| (g.transpose(), v.clone())).collect();
        GroupFn::new(&self.field, self.n, self.level, self.over_f, entries).expect("transpose preserves GL_n(O)")
    }

    pub fn scale(&self, c: &CycValue) -> GroupFn {
        let mut out = self.clone();
        for (_, v) in out.entries.iter_mut() {
            *v = &*v * c;
        }
        out.prune();
        out
    }

    /// Distinct first components of the support at a split place, as matrices over `F`.
    pub fn first_components(&self) -> Result<Vec<MatE>> {
        let alg = self.field.alg();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (g, _) in &self.entries {
            let (l, _) = g.split_components()?;
            let m = MatE::from_f(alg, &l);
            let k = key(&m, self.field.p(), self.level).expect("support lies in GL_n(O)");
            if seen.insert(k) {
                out.push(m);
            }
        }
        Ok(out)
    }

    /// `(g_1, g_2) -> f_1(g_1) f_2(g_2)` on `GL_n(E) = GL_n(F) x GL_n(F)` at a split place.
    pub fn tensor_split(field: &LocalField, f1: &GroupFn, f2: &GroupFn) -> Result<GroupFn> {
        if !field.is_split() {
            return Err(Error::SplitOnly);
        }
        if !f1.over_f || !f2.over_f || f1.n != f2.n {
            return Err(Error::Precondition("both factors must be functions on GL_n(F)".into()));
        }
        let level = f1.level.max(f2.level);
        let (a, b) = (f1.refine(level)?, f2.refine(level)?);
        let mut entries = Vec::with_capacity(a.entries.len() * b.entries.len());
        for (g1, c1) in &a.entries {
            let (l, _) = g1.split_components()?;
            for (g2, c2) in &b.entries {
                let (r, _) = g2.split_components()?;
                entries.push((MatE::from_split_components(&l, &r)?, c1 * c2));
            }
        }
        GroupFn::new(field, f1.n, level, false, entries)
    }
}

pub fn coset_volume(field: &LocalField, n: usize, level: u32, over_f: bool) -> Result<Q> {
    let qf = field.q();
    let (vol, order) = if over_f {
        (field.vol_gl(n)?, gl_order(n, qf, level))
    } else {
        match field.alg() {
            Algebra::Inert { .. } => (field.vol_gl_e(n)?, gl_order(n, qf * qf, level)),
            Algebra::Split => {
                let o = gl_order(n, qf, level);
                (field.vol_gl_e(n)?, &o * &o)
            }
        }
    };
    Ok(vol / Q::from_integer(order))
}

/// `f~'(g) = int f_1'(g h) f_2'(conj h) dh` for `f' = f_1' (x) f_2'` on `GL_n(E) x GL_n(E)`.
pub fn f_tilde(field: &LocalField, f1: &GroupFn, f2: &GroupFn, budget: u64) -> Result<GroupFn> {
    if f1.over_f || f2.over_f || f1.n != f2.n {
        return Err(Error::Precondition("both factors must be functions on GL_n(E)".into()));
    }
    let level = f1.level.max(f2.level);
    let (a, b) = (f1.refine(level)?, f2.refine(level)?);
    let pairs = a.entries.len() as u64 * b.entries.len() as u64;
    if pairs > budget {
        return Err(Error::Budget(format!("{pairs} coset pairs exceed the budget of {budget}")));
    }
    let w = coset_volume(field, f1.n, level, false)?;
    let mut entries = Vec::with_capacity(pairs as usize);
    for (ga, ca) in &a.entries {
        for (gb, cb) in &b.entries {
            let rep = ga * &gb.conj().inverse()?;
            entries.push((rep, (ca * cb).scale(&w)));
        }
    }
    GroupFn::new(field, f1.n, level, false, entries)
}

/// The matched pair `f~' = zeta_E(1)^{-1} (f_1 (x) f_2^T)` and `phi' = phi_1 (x) conj(phi_2)`
/// at a split place.
pub fn split_transfer_pair(
    field: &LocalField,
    f1: &GroupFn,
    f2: &GroupFn,
    phi1: &LatticeFn,
    phi2: &LatticeFn,
) -> Result<(GroupFn, LatticeFn)> {
    if phi1.space() != Space::FRow || phi2.space() != Space::FRow || phi1.n() != phi2.n() {
        return Err(Error::Precondition("Schwartz factors must live on F_n".into()));
    }
    let f = GroupFn::tensor_split(field, f1, &f2.transpose())?;
    let f = f.scale(&CycValue::rational(Q::one() / field.zeta_e1()));
    let c2 = phi2.conj();
    let t = Tensor(phi1, &c2);
    let phi = LatticeFn::from_fn(Space::ERow, phi1.n(), field.p(), t.support(), t.depth(), |v| t.eval(v))?;
    Ok((f, phi))
}

impl PartialEq for GroupFn {
    /// Equality as functions on a common refinement.
    fn eq(&self, other: &Self) -> bool {
        if self.n != other.n || self.over_f != other.over_f || self.field != other.field {
            return false;
        }
        let l = self.level.max(other.level);
        match (self.refine(l), other.refine(l)) {
            (Ok(a), Ok(b)) => a.entries.len() == b.entries.len() && a.entries.iter().all(|(g, v)| b.eval(g) == *v),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::MuAtP;

    #[test]
    fn frame_counts() {
        let f = LocalField::split(3, MuAtP::One).unwrap();
        assert_eq!(frames(&f, 1, 1, true).len(), 2);
        assert_eq!(frames(&f, 2, 1, true).len(), 48);
        assert_eq!(frames(&f, 1, 2, true).len(), 6);
        let e = LocalField::inert(3, 2).unwrap();
        assert_eq!(frames(&e, 1, 1, false).len(), 8);
        assert_eq!(gl_order(2, 3, 1), BigInt::from(48));
    }

    #[test]
    fn refinement_preserves_mass() {
        let f = LocalField::split(3, MuAtP::One).unwrap();
        let one = GroupFn::constant_on_maximal(&f, 2, true, CycValue::one());
        let fine = one.refine(1).unwrap();
        assert_eq!(fine.entries().len(), 48);
        assert_eq!(fine.haar_mass().unwrap(), CycValue::rational(f.vol_gl(2).unwrap()));
        assert_eq!(fine, one);
    }

    #[test]
    fn f_tilde_unramified() {
        let field = LocalField::inert(3, 2).unwrap();
        let vol = field.vol_gl_e(2).unwrap();
        let c = CycValue::rational(Q::one() / (&vol * &vol));
        let fp = GroupFn::constant_on_maximal(&field, 2, false, c);
        let ft = f_tilde(&field, &fp, &GroupFn::constant_on_maximal(&field, 2, false, CycValue::one()), 10).unwrap();
        let expect = GroupFn::constant_on_maximal(&field, 2, false, CycValue::rational(Q::one() / &vol));
        assert_eq!(ft, expect);
        assert_eq!(ft.haar_mass().unwrap(), CycValue::one());
    }

    #[test]
    fn f_tilde_delta_cosets() {
        let field = LocalField::split(3, MuAtP::One).unwrap();
        let alg = field.alg();
        let a = MatE::scalar(1, &Ext::new(alg, q(2), q(1)));
        let b = MatE::scalar(1, &Ext::new(alg, q(1), q(2)));
        let fa = GroupFn::new(&field, 1, 1, false, vec![(a.clone(), CycValue::from_int(3))]).unwrap();
        let fb = GroupFn::new(&field, 1, 1, false, vec![(b.clone(), CycValue::i())]).unwrap();
        let ft = f_tilde(&field, &fa, &fb, 10).unwrap();
        assert_eq!(ft.entries().len(), 1);
        let rep = &a * &b.conj().inverse().unwrap();
        let w = coset_volume(&field, 1, 1, false).unwrap();
        assert_eq!(ft.eval(&rep), CycValue::i().scale(&(q(3) * w)));
        assert!(f_tilde(&field, &fa, &fb, 0).is_err());
    }

    #[test]
    fn rejects_non_integral_reps() {
        let field = LocalField::split(3, MuAtP::One).unwrap();
        let g = MatE::scalar(1, &field.f_int(3));
        assert!(GroupFn::new(&field, 1, 1, true, vec![(g, CycValue::one())]).is_err());
    }
}
