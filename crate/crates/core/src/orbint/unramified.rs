//! The unramified orbital integrals as signed lattice counts.

use crate::error::{Error, Result};
use crate::localfield::{CycValue, LaurentValue, LocalField, Q};
use crate::matalg::{MatE, SkewHermForm};
use crate::orbitspace::{
    gl_to_mtriple, is_kottwitz, is_kottwitz_u, is_rss_mtriple, u_to_mtriple, GLOrbitRep, MTriple, UOrbitRep,
};

use super::lattice::Sandwich;
use super::{gl_sandwich, is_stable, map_items, EngineOptions, OrbResult};

fn require_inert(field: &LocalField) -> Result<()> {
    if field.is_split() {
        Err(Error::InertOnly)
    } else {
        Ok(())
    }
}

fn require_integral_corner(field: &LocalField, d: &Q) -> Result<()> {
    if field.valuation(d).is_nonneg() {
        Ok(())
    } else {
        Err(Error::Precondition("corner entry d must be integral".into()))
    }
}

/// `1_{O^x}(det delta) sum_L eta(det L) t^{val det L}` over lattices `L` in `F_n` with
/// `delta L <= L`, `j y in L` and `x L <= O`.
pub fn orb_gl_unramified(
    field: &LocalField,
    r: &GLOrbitRep,
    d: &Q,
    s_formal: bool,
    opts: &EngineOptions,
) -> Result<OrbResult> {
    require_inert(field)?;
    require_integral_corner(field, d)?;
    let m = gl_to_mtriple(r)?;
    if !is_rss_mtriple(&m) {
        return Err(Error::NotRss("GL-side triple".into()));
    }
    if !is_kottwitz(field, &r.gamma)? {
        return Err(Error::Precondition("gamma is not Kottwitz".into()));
    }
    let p = field.p();
    let delta = m.xi;
    if !delta.det().is_unit(p) {
        return Ok(OrbResult::empty(0));
    }
    let jy = r.y.scale(field.j());
    let Some(sw) = gl_sandwich(&delta, &r.x, &jy, 0, 0, p)? else {
        return Ok(OrbResult::empty(0));
    };
    if !opts.admits(&sw.candidates(field.q(), None)) {
        return Ok(OrbResult::over_budget(sw.depth));
    }
    let lattices = sw.lattices(p, true, None)?;
    let terms = map_items(opts, &lattices, |mm| {
        let h = &sw.outer * mm;
        if !is_stable(&delta, &h, p)? {
            return Ok(None);
        }
        if !(&(&h.inverse()? * &r.gamma) * &h).is_in_gl_o(p) {
            return Err(Error::Internal("a Kottwitz gamma failed to be integral on a counted lattice".into()));
        }
        let det = h.det().a;
        let e = field.valuation(&det).expect_finite()?;
        Ok(Some((e, field.eta(&det)?)))
    })?;
    let mut value = LaurentValue::zero();
    let mut enumerated = 0;
    for (e, c) in terms.into_iter().flatten() {
        value.add_term(e, &c);
        enumerated += 1;
    }
    debug_assert!(value.terms().all(|(_, c)| c.as_rational().is_some_and(|x| x.is_integer())));
    if !s_formal {
        value = LaurentValue::constant(value.eval_at_one());
    }
    Ok(OrbResult { value, enumerated, bound_used: sw.depth, complete: true })
}

/// Self-dual lattices `Lambda` in `E_n` (for `<u, v> = u* v`) between `P O_E^n` and
/// `(P*)^{-1} O_E^n`, where `P = [z*, delta z*, ...]`.
pub fn self_dual_sandwich(delta: &MatE, zs: &MatE, p: u64) -> Result<Option<Sandwich>> {
    let pm = MTriple::new(delta.clone(), zs.conj_transpose(), zs.clone())?.col_stack();
    if !pm.is_invertible() {
        return Err(Error::NotRss("degenerate vector".into()));
    }
    Sandwich::new(pm.conj_transpose().inverse()?, &pm, p)
}

/// `H* H` in `GL_n(O_E)`.
pub fn is_self_dual(h: &MatE, p: u64) -> bool {
    (&h.conj_transpose() * h).is_in_gl_o(p)
}

/// `1_{O^x}(det zeta* zeta) #{Lambda self-dual : zeta* zeta Lambda <= Lambda, z* in Lambda}`.
pub fn orb_u_unramified(field: &LocalField, r: &UOrbitRep, d: &Q, opts: &EngineOptions) -> Result<OrbResult> {
    require_inert(field)?;
    require_integral_corner(field, d)?;
    if r.form != SkewHermForm::beta_plus(field, r.n()) {
        return Err(Error::Precondition("the unramified integral uses the form j I".into()));
    }
    if !is_rss_mtriple(&u_to_mtriple(r)) {
        return Err(Error::NotRss("unitary-side triple".into()));
    }
    if !is_kottwitz_u(field, &r.zeta, &r.form)? {
        return Err(Error::Precondition("zeta is not Kottwitz".into()));
    }
    let p = field.p();
    let delta = &r.zeta.conj_transpose() * &r.zeta;
    if !delta.charpoly().iter().all(|c| c.is_in_f()) {
        return Err(Error::Internal("zeta* zeta has a characteristic polynomial outside F".into()));
    }
    if !delta.det().is_unit(p) {
        return Ok(OrbResult::empty(0));
    }
    let zs = r.z.conj_transpose();
    let Some(sw) = self_dual_sandwich(&delta, &zs, p)? else {
        return Ok(OrbResult::empty(0));
    };
    if sw.depth % 2 == 1 {
        return Ok(OrbResult::empty(sw.depth));
    }
    let half = sw.depth / 2;
    if !opts.admits(&sw.candidates(field.q() * field.q(), Some(half))) {
        return Ok(OrbResult::over_budget(sw.depth));
    }
    let lattices = sw.lattices(p, false, Some(half))?;
    let hits = map_items(opts, &lattices, |mm| {
        let h = &sw.outer * mm;
        if !is_self_dual(&h, p) || !is_stable(&delta, &h, p)? {
            return Ok(false);
        }
        if !is_stable(&r.zeta, &h, p)? {
            return Err(Error::Internal("a Kottwitz zeta failed to be integral on a counted lattice".into()));
        }
        Ok(true)
    })?;
    let count = hits.into_iter().filter(|b| *b).count() as i64;
    Ok(OrbResult {
        value: LaurentValue::constant(CycValue::from_int(count)),
        enumerated: count as u64,
        bound_used: sw.depth,
        complete: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::{q, Ext};

    fn field() -> LocalField {
        LocalField::inert(3, 2).unwrap()
    }

    fn gl1(field: &LocalField, x: i64, y: Q) -> GLOrbitRep {
        let alg = field.alg();
        GLOrbitRep::new(MatE::identity(alg, 1), MatE::scalar(1, &field.f_int(x)), MatE::scalar(1, &field.j().scale(&y)))
            .unwrap()
    }

    fn value(r: &OrbResult) -> CycValue {
        assert!(r.complete);
        r.value.eval_at_one()
    }

    #[test]
    fn gl_n1_examples() {
        let f = field();
        let opts = EngineOptions::sequential();
        // y = j: (j y) = eps, a unit
        assert_eq!(value(&orb_gl_unramified(&f, &gl1(&f, 1, q(1)), &q(0), false, &opts).unwrap()), CycValue::one());
        assert_eq!(value(&orb_gl_unramified(&f, &gl1(&f, 1, q(3)), &q(0), false, &opts).unwrap()), CycValue::zero());
        let r = GLOrbitRep::new(
            MatE::identity(f.alg(), 1),
            MatE::scalar(1, &f.f(crate::localfield::qf(1, 3))),
            MatE::scalar(1, &f.j().scale(&q(3))),
        )
        .unwrap();
        let res = orb_gl_unramified(&f, &r, &q(0), true, &opts).unwrap();
        assert_eq!(value(&res), CycValue::from_int(-1));
        assert_eq!(res.enumerated, 1);
    }

    #[test]
    fn u_n1_examples() {
        let f = field();
        let opts = EngineOptions::sequential();
        let form = SkewHermForm::beta_plus(&f, 1);
        let unit =
            UOrbitRep::new(MatE::identity(f.alg(), 1), MatE::scalar(1, &Ext::new(f.alg(), q(1), q(1))), form.clone())
                .unwrap();
        assert_eq!(value(&orb_u_unramified(&f, &unit, &q(0), &opts).unwrap()), CycValue::one());
        let deep = UOrbitRep::new(MatE::identity(f.alg(), 1), MatE::scalar(1, &f.f_int(3)), form.clone()).unwrap();
        assert_eq!(value(&orb_u_unramified(&f, &deep, &q(0), &opts).unwrap()), CycValue::one());
        let wide = UOrbitRep::new(MatE::identity(f.alg(), 1), MatE::scalar(1, &f.f(crate::localfield::qf(1, 3))), form)
            .unwrap();
        assert_eq!(value(&orb_u_unramified(&f, &wide, &q(0), &opts).unwrap()), CycValue::zero());
    }

    #[test]
    fn self_dual_lattices_between_p_and_p_inverse() {
        // Lambda != Lambda_0 is determined by the isotropic line (Lambda + Lambda_0) / Lambda_0 over
        // F_{q^2} and one of q self-dual choices inside it: 1 + q (q + 1) in total.
        let f = field();
        let p = 3;
        let outer = MatE::scalar(2, &f.f(crate::localfield::qf(1, 3)));
        let sw = Sandwich::new(outer, &MatE::scalar(2, &f.f_int(3)), p).unwrap().unwrap();
        assert_eq!(sw.depth, 4);
        let dual: Vec<MatE> =
            sw.lattices(p, false, Some(2)).unwrap().into_iter().filter(|m| is_self_dual(&(&sw.outer * m), p)).collect();
        assert_eq!(dual.len(), 1 + 3 * 4);
        let mut lines = std::collections::HashMap::new();
        for m in &dual {
            let rows = m.to_rows();
            let col = (0..2)
                .map(|c| [rows[0][c].clone(), rows[1][c].clone()])
                .find(|v| !v.iter().all(|e| e.valuation(p).min() >= crate::localfield::Val::Fin(1)));
            if let Some(v) = col {
                *lines.entry(projective_key(&v, p)).or_insert(0) += 1;
            }
        }
        // isotropic lines of the standard hermitian plane over F_9: q + 1 = |U_2(F_q)| / |B(F_q)|
        let iso = isotropic_lines(&f);
        assert_eq!(iso.len(), 4);
        assert_eq!(lines.len(), iso.len());
        assert!(lines.values().all(|&c| c == 3));
        assert!(lines.keys().all(|k| iso.contains(k)));
    }

    fn residue_pair(e: &Ext, p: u64) -> (u64, u64) {
        (crate::localfield::rational::residue(&e.a, p), crate::localfield::rational::residue(&e.b, p))
    }

    /// Residues of `v` scaled so that its first unit coordinate becomes 1.
    fn projective_key(v: &[Ext; 2], p: u64) -> Vec<(u64, u64)> {
        let lead = v.iter().find(|e| e.is_unit(p)).unwrap().inv().unwrap();
        v.iter().map(|e| residue_pair(&(e * &lead), p)).collect()
    }

    fn isotropic_lines(f: &LocalField) -> std::collections::HashSet<Vec<(u64, u64)>> {
        let p = f.p();
        let res: Vec<Ext> = (0..p as i64)
            .flat_map(|a| (0..p as i64).map(move |b| (a, b)))
            .map(|(a, b)| Ext::new(f.alg(), q(a), q(b)))
            .collect();
        let mut out = std::collections::HashSet::new();
        for a in &res {
            for b in &res {
                let v = [a.clone(), b.clone()];
                if !v.iter().any(|e| e.is_unit(p)) {
                    continue;
                }
                let norm = &(&a.conj() * a) + &(&b.conj() * b);
                if norm.valuation(p).min() >= crate::localfield::Val::Fin(1) {
                    out.insert(projective_key(&v, p));
                }
            }
        }
        out
    }

    #[test]
    fn rejects_split_and_non_kottwitz() {
        let s = LocalField::split(3, crate::localfield::MuAtP::One).unwrap();
        let r =
            GLOrbitRep::new(MatE::identity(s.alg(), 1), MatE::identity(s.alg(), 1), MatE::scalar(1, s.j())).unwrap();
        assert_eq!(orb_gl_unramified(&s, &r, &q(0), false, &EngineOptions::default()), Err(Error::InertOnly));
    }
}
