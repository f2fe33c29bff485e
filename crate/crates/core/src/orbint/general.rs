//! Orbital integrals of finite-model test functions as finite coset sums.
//!
//! Every contributing `g` is written `g = H u` with `H` running over `GL_n(F) / GL_n(O_F)`
//! (a lattice in the sandwich cut out by the supports) and `u` over `GL_n(O) / K_kappa`,
//! where `kappa` is deep enough for the integrand to be right `K_kappa`-invariant.

use crate::error::{Error, Result};
use crate::localfield::{CycValue, LaurentValue, LocalField, Q};
use crate::matalg::{norm_map, sigma_conjugate, MatE};
use crate::orbitspace::{is_kottwitz, GLOrbitRep, UOrbitRep};
use crate::schwartz::{
    coset_volume, frames, imaginary_coords, pft_dagger_at, pft_ddagger_at, r_mu, weil_act_split, Conj, GroupFn,
    LatticeFn, PairingSign, Space,
};

use super::{gl_sandwich, is_stable, map_items, EngineOptions, OrbResult};

fn v2(p: u64) -> i64 {
    i64::from(p == 2)
}

fn check_rank(n: usize) -> Result<()> {
    if n > 2 {
        return Err(Error::Precondition("general engines support n <= 2".into()));
    }
    Ok(())
}

fn f_coords(m: &MatE) -> Vec<Q> {
    m.entries().iter().map(|e| e.a.clone()).collect()
}

fn level(m: i64, k: i64, f: &GroupFn) -> u32 {
    (m + k).max(0).max(f.level() as i64) as u32
}

/// `int f~'(g^{-1} gamma conj(g)) conj((R_mu(g) phi')^dagger(x, y)) t^{val det g} dg`.
///
/// At split places `gamma = (1, delta)` and the support of `f~'` must lie in `GL_n(O_E)`; at inert
/// places `gamma` must be Kottwitz and the integral is taken over `GL_n(F) GL_n(O_E)`.
pub fn orb_gl_general(
    field: &LocalField,
    r: &GLOrbitRep,
    ftilde: &GroupFn,
    phi: &LatticeFn,
    s_formal: bool,
    opts: &EngineOptions,
) -> Result<OrbResult> {
    let n = r.n();
    check_rank(n)?;
    if phi.space() != Space::ERow || phi.n() != n || ftilde.n() != n || ftilde.over_f() {
        return Err(Error::Precondition("expected f~' on GL_n(E) and phi' on E_n of matching rank".into()));
    }
    let p = field.p();
    let alg = field.alg();
    let delta = if field.is_split() {
        let (g1, g2) = r.gamma.split_components()?;
        if !MatE::from_f(alg, &g1).is_identity() {
            return Err(Error::Precondition("split representatives must have gamma = (1, delta)".into()));
        }
        MatE::from_f(alg, &g2)
    } else {
        if !is_kottwitz(field, &r.gamma)? {
            return Err(Error::Precondition("gamma is not Kottwitz".into()));
        }
        norm_map(&r.gamma)?
    };
    let x = r.x.clone();
    let y0 = MatE::col_vector(alg, imaginary_coords(field, &r.y)?.into_iter().map(|c| field.f(c)).collect());
    let m = phi.m() + if field.is_split() { v2(p) } else { 0 };
    let k = phi.k();
    let kappa = level(m, k, ftilde);
    let ft = ftilde.refine(kappa)?;
    let Some(sw) = gl_sandwich(&delta, &x, &y0, m, k, p)? else {
        return Ok(OrbResult::empty(0));
    };
    let frames: Vec<MatE> = if field.is_split() {
        let us = frames(field, n, kappa, true);
        let firsts = ft.first_components()?;
        let mut out = Vec::with_capacity(us.len() * firsts.len());
        for u in &us {
            let (ul, _) = u.split_components()?;
            for a in &firsts {
                let (ua, _) = (u * a).split_components()?;
                out.push(MatE::from_split_components(&ul, &ua)?);
            }
        }
        out
    } else {
        frames(field, n, kappa, false)
    };
    let candidates = sw.candidates(field.q(), None) * frames.len();
    if !opts.admits(&candidates) {
        return Err(Error::Budget(format!("{candidates} cosets exceed the budget of {}", opts.budget)));
    }
    let weight = coset_volume(field, n, kappa, false)?;
    let lattices = sw.lattices(p, true, None)?;
    let terms = map_items(opts, &lattices, |mm| {
        let h = &sw.outer * mm;
        if !is_stable(&delta, &h, p)? {
            return Ok(None);
        }
        let det = h.det().a;
        let e = field.valuation(&det).expect_finite()?;
        let eta = field.eta(&det)?;
        let hi = h.inverse()?;
        let xh = f_coords(&(&x * &h));
        let yh = f_coords(&(&hi * &y0));
        let mut acc = CycValue::zero();
        let mut hits = 0u64;
        for u in &frames {
            let g = &h * u;
            let fv = ft.eval(&sigma_conjugate(&r.gamma, &g)?);
            if fv.is_zero() {
                continue;
            }
            let acted = r_mu(field, u, phi)?;
            let dag = pft_dagger_at(field, &acted, &xh, &yh)?;
            if dag.is_zero() {
                continue;
            }
            // (R_mu(H u) phi')^dagger(x, y) = eta(det H) (R_mu(u) phi')^dagger(x H, H^{-1} y)
            acc = &acc + &(&fv * &(&eta * &dag).conj());
            hits += 1;
        }
        Ok(Some((e, acc.scale(&weight), hits)))
    })?;
    let mut value = LaurentValue::zero();
    let mut enumerated = 0;
    for (e, c, hits) in terms.into_iter().flatten() {
        value.add_term(e, &c);
        enumerated += hits;
    }
    if !s_formal {
        value = LaurentValue::constant(value.eval_at_one());
    }
    Ok(OrbResult { value, enumerated, bound_used: sw.depth, complete: true })
}

/// `int int f(g^{-1} zeta h) (phi_2 (x) conj(omega(h^{-1} g) phi_1))^ddagger(z h) dg dh` over
/// `U x U`. Split places need `zeta = (1, zeta_2)` and `f` supported in `GL_n(O_E)`; at inert places
/// only `n = 1` with basic Schwartz data and `f` of level 0 is supported.
pub fn orb_u_general(
    field: &LocalField,
    r: &UOrbitRep,
    f: &GroupFn,
    phi1: &LatticeFn,
    phi2: &LatticeFn,
    opts: &EngineOptions,
) -> Result<OrbResult> {
    let n = r.n();
    check_rank(n)?;
    if f.over_f() || f.n() != n {
        return Err(Error::Precondition("expected f on GL_n(E) of matching rank".into()));
    }
    for phi in [phi1, phi2] {
        if phi.space() != Space::FRow || phi.n() != n {
            return Err(Error::Precondition("Schwartz factors must live on F_n".into()));
        }
    }
    if !field.is_split() {
        return orb_u_inert_rank_one(field, r, f, phi1, phi2);
    }
    let p = field.p();
    let alg = field.alg();
    let (z1, z2) = r.zeta.split_components()?;
    if !MatE::from_f(alg, &z1).is_identity() {
        return Err(Error::Precondition("split representatives must have zeta = (1, zeta_2)".into()));
    }
    let delta = MatE::from_f(alg, &z2).transpose();
    let zl = MatE::row_vector(alg, r.z.entries().iter().map(|e| field.f(e.a.clone())).collect());
    let zr = MatE::col_vector(alg, r.z.entries().iter().map(|e| field.f(e.b.clone())).collect());
    let m = phi1.m().max(phi2.m()) + v2(p);
    let k = phi1.k().max(phi2.k());
    let kappa = level(m, k, f);
    let fr = f.refine(kappa)?;
    let Some(sw) = gl_sandwich(&delta, &zl, &zr, m, k, p)? else {
        return Ok(OrbResult::empty(0));
    };
    let us = frames(field, n, kappa, true);
    let firsts = fr.first_components()?;
    let candidates = sw.candidates(field.q(), None) * us.len() * firsts.len();
    if !opts.admits(&candidates) {
        return Err(Error::Budget(format!("{candidates} cosets exceed the budget of {}", opts.budget)));
    }
    let vol = coset_volume(field, n, kappa, true)? / field.zeta_f1();
    let weight = &vol * &vol;
    // omega((a^{-1}, a^T)) phi_1, one per first component a
    let actors: Vec<MatE> = firsts.iter().map(|a| unitary_of(&a.inverse()?)).collect::<Result<_>>()?;
    let lattices = sw.lattices(p, true, None)?;
    let terms = map_items(opts, &lattices, |mm| {
        let hf = &sw.outer * mm;
        if !is_stable(&delta, &hf, p)? {
            return Ok(None);
        }
        let mut acc = CycValue::zero();
        let mut hits = 0u64;
        for u in &us {
            let g1 = &hf * u;
            let g = unitary_of(&g1)?;
            let gi = g.inverse()?;
            for (a, act) in firsts.iter().zip(&actors) {
                let h1 = &g1 * a;
                let h = unitary_of(&h1)?;
                let fv = fr.eval(&(&(&gi * &r.zeta) * &h));
                if fv.is_zero() {
                    continue;
                }
                let w = weil_act_split(field, act, phi1)?;
                let cw = Conj(&w);
                let zh = &r.z * &h;
                let (x, y) = (
                    zh.entries().iter().map(|e| e.a.clone()).collect::<Vec<_>>(),
                    zh.entries().iter().map(|e| e.b.clone()).collect::<Vec<_>>(),
                );
                let v = pft_ddagger_at(field, phi2, &cw, &x, &y, PairingSign::Plus)?;
                if v.is_zero() {
                    continue;
                }
                acc = &acc + &(&fv * &v);
                hits += 1;
            }
        }
        Ok(Some((acc.scale(&weight), hits)))
    })?;
    let mut total = CycValue::zero();
    let mut enumerated = 0;
    for (c, hits) in terms.into_iter().flatten() {
        total = &total + &c;
        enumerated += hits;
    }
    Ok(OrbResult { value: LaurentValue::constant(total), enumerated, bound_used: sw.depth, complete: true })
}

/// `(g, g^{-T})` for `g` over `F`.
fn unitary_of(g: &MatE) -> Result<MatE> {
    let (l, _) = g.split_components()?;
    let inv_t = MatE::from_f(g.alg(), &l).inverse()?.transpose();
    let (r, _) = inv_t.split_components()?;
    MatE::from_split_components(&l, &r)
}

/// `U_1(F)` is compact and fixes the basic vector, so the integral is
/// `vol(U_1(O))^2 f(zeta) 1_{O_E}(z)`.
fn orb_u_inert_rank_one(
    field: &LocalField,
    r: &UOrbitRep,
    f: &GroupFn,
    phi1: &LatticeFn,
    phi2: &LatticeFn,
) -> Result<OrbResult> {
    let basic = LatticeFn::basic(Space::FRow, 1, field.p());
    if r.n() != 1 || f.level() != 0 || *phi1 != basic || *phi2 != basic {
        return Err(Error::Precondition("inert places support n = 1 with level-0 f and basic Schwartz data".into()));
    }
    let vol = field.vol_u(1)?;
    let v = if r.z.is_integral(field.p()) { f.eval(&r.zeta) } else { CycValue::zero() };
    let enumerated = u64::from(!v.is_zero());
    Ok(OrbResult { value: LaurentValue::constant(v.scale(&(&vol * &vol))), enumerated, bound_used: 0, complete: true })
}
