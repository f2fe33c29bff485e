//! Haar integration, the Fourier transform on `F_n` and the partial Fourier transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localfield::cyclotomic::cyclotomic_poly;
use crate::localfield::{p_pow, q, rational, Algebra, CycAccum, CycValue, LocalField, Val, Q};
use crate::matalg::MatE;

use super::{vmin_q, LatticeFn, Schwartz, Space};

/// Sum of the table against the self-dual measure, which gives `O^D` volume 1.
pub fn haar_integrate(f: &LatticeFn) -> CycValue {
    let w = p_pow(f.p(), -f.k() * f.dim() as i64);
    f.table().iter().fold(CycValue::zero(), |acc, v| &acc + v).scale(&w)
}

/// `phi^(y) = int phi(x) psi'(x . y) dx`, one coordinate at a time.
pub fn fourier(f: &LatticeFn) -> Result<LatticeFn> {
    if f.space() != Space::FRow {
        return Err(Error::Precondition("the Fourier transform acts on F_n".into()));
    }
    let (p, m, k, dim) = (f.p(), f.m(), f.k(), f.dim());
    let side = rational::u64_pow(p, (m + k) as u32);
    let values = match IntTable::new(f.table(), side, dim) {
        Some(t) => t.dft(side as usize, dim),
        None => fourier_generic(f.table(), side as usize, dim),
    };
    let scale = p_pow(p, -k * dim as i64);
    let mut out = LatticeFn::zero(Space::FRow, f.n(), p, k, m)?;
    for (slot, v) in out.table_mut().iter_mut().zip(values) {
        *slot = v.scale(&scale).simplify();
    }
    Ok(out)
}

/// `x = p^{-m} r` and `y = p^{-k} s` give `psi'(x y) = zeta_side^{r s}`; the measure factor is
/// left to the caller.
fn fourier_generic(table: &[CycValue], side: usize, dim: usize) -> Vec<CycValue> {
    let mut cur = table.to_vec();
    let mut stride = 1usize;
    let one = Q::one();
    for _ in 0..dim {
        let mut next = vec![CycValue::zero(); cur.len()];
        for (idx, slot) in next.iter_mut().enumerate() {
            let s = (idx / stride) % side;
            let base = idx - s * stride;
            let mut acc = CycAccum::new(side as u64);
            for r in 0..side {
                acc.add_twisted(&cur[base + r * stride], side as u64, ((r * s) % side) as i64, &one);
            }
            *slot = acc.finish();
        }
        cur = next;
        stride *= side;
    }
    cur
}

/// Values `den^{-1} sum_i c_i zeta_L^i` held in the integral group ring `Z[Z/L]`, which is
/// enough for sums of twists; reduction modulo the cyclotomic polynomial happens once at the end.
struct IntTable {
    order: u64,
    den: BigInt,
    rows: Vec<Vec<i128>>,
}

impl IntTable {
    /// `None` when the coefficients or the `side^dim` growth of the transform could overflow.
    fn new(table: &[CycValue], side: u64, dim: usize) -> Option<IntTable> {
        let order = table.iter().fold(side, |acc, v| acc.lcm(&v.order()));
        let den = table
            .iter()
            .flat_map(|v| v.coeffs().iter().map(|c| c.denom().clone()))
            .fold(BigInt::one(), |acc, d| acc.lcm(&d));
        let growth = (side as f64).powi(dim as i32);
        let mut max = 0f64;
        let rows = table
            .iter()
            .map(|v| {
                let lifted = v.lift(order);
                let mut row = vec![0i128; order as usize];
                for (slot, c) in row.iter_mut().zip(lifted.coeffs()) {
                    let x = (c * Q::from_integer(den.clone())).to_integer().to_i128()?;
                    max = f64::max(max, x.unsigned_abs() as f64);
                    *slot = x;
                }
                Some(row)
            })
            .collect::<Option<Vec<_>>>()?;
        (max * growth * 4.0 < 2f64.powi(120)).then_some(IntTable { order, den, rows })
    }

    fn dft(self, side: usize, dim: usize) -> Vec<CycValue> {
        let l = self.order as usize;
        let step = l / side;
        let mut cur = self.rows;
        let mut stride = 1usize;
        for _ in 0..dim {
            let mut next = vec![vec![0i128; l]; cur.len()];
            for (idx, out) in next.iter_mut().enumerate() {
                let s = (idx / stride) % side;
                let base = idx - s * stride;
                for r in 0..side {
                    let src = &cur[base + r * stride];
                    let shift = ((r * s) % side) * step;
                    for (i, c) in src.iter().enumerate() {
                        if *c != 0 {
                            out[(i + shift) % l] += c;
                        }
                    }
                }
            }
            cur = next;
            stride *= side;
        }
        let inv = Q::one() / Q::from_integer(self.den);
        cur.into_iter().map(|row| reduce_int(row, self.order, &inv)).collect()
    }
}

fn reduce_int(mut v: Vec<i128>, order: u64, scale: &Q) -> CycValue {
    let phi = cyclotomic_poly(order);
    let deg = phi.len() - 1;
    for d in (deg..v.len()).rev() {
        let c = v[d];
        if c == 0 {
            continue;
        }
        v[d] = 0;
        for (i, pi) in phi.iter().enumerate().take(deg) {
            v[d - deg + i] -= c * *pi as i128;
        }
    }
    v.truncate(deg);
    let coeffs = v.into_iter().map(|c| Q::from_integer(BigInt::from(c)) * scale).collect();
    CycValue::from_coeffs(order, coeffs)
}

fn v2(p: u64) -> i64 {
    i64::from(p == 2)
}

/// Levels `(M, K)` of the `w`-grid `p^{-M} O^n / p^K O^n` for an integrand of the given
/// support and depth, paired against `psi'(w . y)`.
fn w_grid(support: i64, depth: i64, y: &[Q], p: u64) -> (i64, i64) {
    let big_m = support;
    let from_y = match vmin_q(y, p) {
        Val::Fin(v) => -v,
        Val::Inf => i64::MIN,
    };
    (big_m, depth.max(from_y).max(-big_m))
}

/// Enumerates `r` in `[0, side)^n` in the fixed little-endian order.
fn for_each_residue(n: usize, side: u64, mut f: impl FnMut(&[u64])) {
    let mut r = vec![0u64; n];
    loop {
        f(&r);
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            r[i] += 1;
            if r[i] < side {
                break;
            }
            r[i] = 0;
            i += 1;
        }
    }
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

/// `phi'^dagger(x, y)` with `y = j y0`: `int phi'(x + j w) psi'(j w y) dw` over `F_n`.
pub fn pft_dagger_at(field: &LocalField, phi: &dyn Schwartz, x: &[Q], y0: &[Q]) -> Result<CycValue> {
    let n = x.len();
    if phi.dim() != 2 * n || y0.len() != n {
        return Err(Error::Precondition("dimension mismatch in the partial Fourier transform".into()));
    }
    let p = field.p();
    let j = field.j();
    let support = phi.support() + if field.is_split() { v2(p) } else { 0 };
    let (big_m, big_k) = w_grid(support, phi.depth(), y0, p);
    let side = rational::u64_pow(p, (big_m + big_k) as u32);
    let step = p_pow(p, -big_m);
    let j2 = field.j_squared();
    let twist: Vec<Q> = y0.iter().map(|t| t * &j2).collect();
    let mut acc = CycAccum::new(side);
    let one = Q::one();
    let mut pt = vec![Q::zero(); 2 * n];
    for_each_residue(n, side, |r| {
        let w: Vec<Q> = r.iter().map(|&ri| q(ri as i64) * &step).collect();
        for i in 0..n {
            match field.alg() {
                Algebra::Inert { .. } => {
                    pt[i] = x[i].clone();
                    pt[n + i] = &j.b * &w[i];
                }
                Algebra::Split => {
                    let jw = &j.a * &w[i];
                    pt[i] = &x[i] + &jw;
                    pt[n + i] = &x[i] - &jw;
                }
            }
        }
        let v = phi.eval(&pt);
        if v.is_zero() {
            return;
        }
        let arg = dot(&w, &twist);
        let (order, e) = field.psi_exponent(&arg, (big_m + big_k) as u32).expect("grid fits the character");
        acc.add_twisted(&v, order, e as i64, &one);
    });
    Ok(acc.finish().scale(&p_pow(p, -big_k * n as i64)).simplify())
}

/// Tabulates `phi'^dagger` on `F_n x F^{-,n}` in the coordinates `(x, y0)`.
pub fn pft_dagger(field: &LocalField, phi: &LatticeFn) -> Result<LatticeFn> {
    if phi.space() != Space::ERow {
        return Err(Error::Precondition("the dagger transform acts on E_n".into()));
    }
    let n = phi.n();
    let s = phi.m() + if field.is_split() { v2(field.p()) } else { 0 };
    let (m, k) = (s.max(phi.k()), phi.k().max(s));
    let mut out = LatticeFn::zero(Space::Prod, n, field.p(), m, k)?;
    for idx in 0..out.table().len() {
        let pt = out.point(idx);
        let v = pft_dagger_at(field, phi, &pt[..n], &pt[n..])?;
        out.table_mut()[idx] = v;
    }
    Ok(out)
}

/// Sign of the pairing `psi'(+- w . y)` in the inert-place model of `double dagger`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairingSign {
    #[default]
    Plus,
    Minus,
}

/// `(phi_a (x) phi_b)^ddagger(x, y) = int phi_a(x + w) phi_b(x - w) psi'(s w . y) dw`.
pub fn pft_ddagger_at(
    field: &LocalField,
    a: &dyn Schwartz,
    b: &dyn Schwartz,
    x: &[Q],
    y: &[Q],
    sign: PairingSign,
) -> Result<CycValue> {
    let n = x.len();
    if a.dim() != n || b.dim() != n || y.len() != n {
        return Err(Error::Precondition("dimension mismatch in the partial Fourier transform".into()));
    }
    let p = field.p();
    let support = a.support().max(b.support()) + v2(p);
    let (big_m, big_k) = w_grid(support, a.depth().max(b.depth()), y, p);
    let side = rational::u64_pow(p, (big_m + big_k) as u32);
    let step = p_pow(p, -big_m);
    let twist: Vec<Q> = match sign {
        PairingSign::Plus => y.to_vec(),
        PairingSign::Minus => y.iter().map(|t| -t.clone()).collect(),
    };
    let mut acc = CycAccum::new(side);
    let one = Q::one();
    for_each_residue(n, side, |r| {
        let w: Vec<Q> = r.iter().map(|&ri| q(ri as i64) * &step).collect();
        let plus: Vec<Q> = x.iter().zip(&w).map(|(s, t)| s + t).collect();
        let va = a.eval(&plus);
        if va.is_zero() {
            return;
        }
        let minus: Vec<Q> = x.iter().zip(&w).map(|(s, t)| s - t).collect();
        let vb = b.eval(&minus);
        if vb.is_zero() {
            return;
        }
        let (order, e) = field.psi_exponent(&dot(&w, &twist), (big_m + big_k) as u32).expect("grid fits the character");
        acc.add_twisted(&(&va * &vb), order, e as i64, &one);
    });
    Ok(acc.finish().scale(&p_pow(p, -big_k * n as i64)).simplify())
}

/// The `(x, y)` at which `double dagger` is evaluated for a point `z` of `E_n`: the two
/// components at split places, and `z = x + j y` at inert places.
pub fn ddagger_point(field: &LocalField, z: &MatE) -> Result<(Vec<Q>, Vec<Q>)> {
    let e = z.entries();
    match field.alg() {
        Algebra::Split => Ok((e.iter().map(|t| t.a.clone()).collect(), e.iter().map(|t| t.b.clone()).collect())),
        Algebra::Inert { .. } => {
            let c = field.j().b.clone();
            Ok((e.iter().map(|t| t.a.clone()).collect(), e.iter().map(|t| &t.b / &c).collect()))
        }
    }
}

/// Tabulates `(phi_a (x) phi_b)^ddagger` on `E_n`.
pub fn pft_ddagger(field: &LocalField, a: &LatticeFn, b: &LatticeFn, sign: PairingSign) -> Result<LatticeFn> {
    if a.space() != Space::FRow || b.space() != Space::FRow || a.n() != b.n() {
        return Err(Error::Precondition("the double dagger transform pairs two functions on F_n".into()));
    }
    let n = a.n();
    let s = a.m().max(b.m()) + v2(field.p());
    let d = a.k().max(b.k());
    let (m, k) = (s.max(d), s.max(d));
    let mut out = LatticeFn::zero(Space::ERow, n, field.p(), m, k)?;
    let alg = field.alg();
    for idx in 0..out.table().len() {
        let z = super::erow_from_coords(alg, &out.point(idx));
        let (x, y) = ddagger_point(field, &z)?;
        out.table_mut()[idx] = pft_ddagger_at(field, a, b, &x, &y, sign)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::MuAtP;

    #[test]
    fn haar_of_indicators() {
        for (a, expect) in [(0, q(1)), (1, crate::localfield::qf(1, 3)), (-1, q(3))] {
            let f = LatticeFn::indicator(Space::FRow, 1, 3, a);
            assert_eq!(haar_integrate(&f), CycValue::rational(expect));
        }
    }

    #[test]
    fn fourier_of_indicators() {
        let basic = LatticeFn::basic(Space::FRow, 2, 5);
        assert_eq!(fourier(&basic).unwrap(), basic);
        let f = LatticeFn::indicator(Space::FRow, 1, 3, 1);
        let expect =
            LatticeFn::indicator(Space::FRow, 1, 3, -1).scale(&CycValue::rational(crate::localfield::qf(1, 3)));
        assert_eq!(fourier(&f).unwrap(), expect);
    }

    #[test]
    fn fourier_inversion_small() {
        let f = LatticeFn::from_fn(Space::FRow, 1, 3, 1, 1, |v| {
            let r = rational::residue(&(&v[0] * q(3)), 9) as i64;
            CycValue::from_int(r * r - 2 * r)
        })
        .unwrap();
        assert_eq!(fourier(&fourier(&f).unwrap()).unwrap(), f.reflect());
    }

    #[test]
    fn dagger_of_basic_vector() {
        for field in [LocalField::inert(3, 2).unwrap(), LocalField::split(3, MuAtP::I).unwrap()] {
            let basic = LatticeFn::basic(Space::ERow, 1, 3);
            let d = pft_dagger(&field, &basic).unwrap();
            assert_eq!(d, LatticeFn::basic(Space::Prod, 1, 3));
        }
    }

    #[test]
    fn ddagger_of_basic_vectors() {
        for field in [LocalField::inert(3, 2).unwrap(), LocalField::split(5, MuAtP::One).unwrap()] {
            let b = LatticeFn::basic(Space::FRow, 2, field.p());
            let out = pft_ddagger(&field, &b, &b, PairingSign::Plus).unwrap();
            assert_eq!(out, LatticeFn::basic(Space::ERow, 2, field.p()));
        }
    }

    #[test]
    fn split_ddagger_single_coset() {
        // phi_a = 1_{1 + 3O}, phi_b = 1_{O}: the integrand is supported on w in 1 + 3O
        let field = LocalField::split(3, MuAtP::One).unwrap();
        let a = LatticeFn::from_entries(Space::FRow, 1, 3, 0, 1, &[(vec![q(1)], CycValue::one())]).unwrap();
        let b = LatticeFn::basic(Space::FRow, 1, 3);
        let y = crate::localfield::qf(1, 3);
        let v = pft_ddagger_at(&field, &a, &b, &[q(0)], &[y], PairingSign::Plus).unwrap();
        let expect = CycValue::root_of_unity(3, 1).scale(&crate::localfield::qf(1, 3));
        assert_eq!(v, expect);
    }
}
