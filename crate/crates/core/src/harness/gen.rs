//! Side-first instance generators.
//!
//! Inert instances take `gamma = zeta = g(C)` with `C` symmetric for the form in use, so that
//! `beta^{-1} zeta* beta = conj(gamma)` and the two sides are compatible with `h = 1`. Split
//! instances take `gamma = (1, delta)` and `zeta = (1, k^T delta^T k^{-T})` for an integral `k` of
//! unit determinant.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localfield::{p_pow, q, Ext, LocalField, Q};
use crate::matalg::{express_in_norm_powers, is_squarefree_e, norm_map, MatE, SkewHermForm};
use crate::orbitspace::{
    choose_d, compatible_unitary_rep, embed_gl_to_gln1, embed_u_to_hn1, gl_to_mtriple, invariants, is_k_kottwitz_split,
    is_kottwitz, is_kottwitz_u, is_relatively_rss, is_rss_mtriple, orbits_match, transfer_factor, u_to_mtriple,
    GLOrbitRep, MTriple, UOrbitRep,
};

use super::rng_for;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Bounds {
    /// Invariants `b_i` must have valuation in `[-val_bound, val_bound]`.
    pub val_bound: i64,
    /// Integer coefficients are drawn from `[-coeff, coeff]`.
    pub coeff: i64,
    pub max_attempts: usize,
    /// Keep only `gamma` in `GL_n(O_E)`; otherwise both unramified integrals vanish trivially.
    pub unit_det: bool,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { val_bound: 2, coeff: 3, max_attempts: 5000, unit_det: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Recipe {
    #[serde(rename = "symmetric")]
    Symmetric,
    #[serde(rename = "beta-minus")]
    BetaMinus,
    #[serde(rename = "split")]
    Split,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub field: LocalField,
    pub gl: GLOrbitRep,
    pub u: UOrbitRep,
    pub d: Q,
    pub seed: u64,
    pub index: u64,
    pub recipe: Recipe,
}

fn int(rng: &mut ChaCha8Rng, c: i64) -> Q {
    q(rng.gen_range(-c..=c))
}

/// `p^v u` with `u` a unit, `v` uniform in `[lo, hi]`, or zero with probability `1 / 8`.
fn scaled(rng: &mut ChaCha8Rng, p: u64, lo: i64, hi: i64) -> Q {
    if rng.gen_ratio(1, 8) {
        return q(0);
    }
    let p = p as i64;
    let unit = rng.gen_range(1..p) + p * rng.gen_range(-1..=1);
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    p_pow(p as u64, rng.gen_range(lo..=hi)) * q(sign * unit)
}

#[allow(clippy::needless_range_loop)]
fn symmetric(rng: &mut ChaCha8Rng, n: usize, c: i64) -> Vec<Vec<Q>> {
    let mut s = vec![vec![q(0); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = int(rng, c);
            s[i][j] = v.clone();
            s[j][i] = v;
        }
    }
    s
}

fn poly_coeffs(field: &LocalField, rng: &mut ChaCha8Rng, n: usize, c: i64) -> Vec<Ext> {
    (0..n)
        .map(|i| {
            let e = Ext::new(field.alg(), int(rng, c), int(rng, c));
            // the top coefficient sometimes picks up a factor p to keep g(C) integral
            if i > 0 && rng.gen_bool(0.5) {
                e.scale(&p_pow(field.p(), 1))
            } else {
                e
            }
        })
        .collect()
}

fn valuations_within(field: &LocalField, m: &MTriple, bound: i64) -> bool {
    invariants(m).b.iter().all(|b| match field.ext_valuation(b).min().finite() {
        Some(v) => (-bound..=bound).contains(&v),
        None => true,
    })
}

/// `y = (x; x delta; ...)^{-1} b`, landing in `F^{-,n}` when `b` comes from a matched unitary triple.
fn solve_gl_side(
    field: &LocalField,
    rng: &mut ChaCha8Rng,
    gamma: &MatE,
    b: Vec<Ext>,
    half: i64,
) -> Result<Option<GLOrbitRep>> {
    let n = gamma.rows();
    let alg = field.alg();
    let x = MatE::row_vector(alg, (0..n).map(|_| field.f(scaled(rng, field.p(), -half, half))).collect());
    let t = MTriple::new(norm_map(gamma)?, x.clone(), MatE::zeros(alg, n, 1))?;
    let rows = t.row_stack();
    if !rows.is_invertible() {
        return Ok(None);
    }
    let y = &rows.inverse()? * &MatE::col_vector(alg, b);
    Ok(GLOrbitRep::new(gamma.clone(), x, y).ok())
}

fn require_inert(field: &LocalField, n: usize) -> Result<()> {
    if field.is_split() {
        return Err(Error::InertOnly);
    }
    if !(1..=2).contains(&n) {
        return Err(Error::Precondition(format!("generators support n in {{1, 2}}, got {n}")));
    }
    Ok(())
}

/// One attempt of the inert recipe for the form `j D`, `D = diag(1, ..., 1, last)`.
fn try_inert(
    field: &LocalField,
    rng: &mut ChaCha8Rng,
    n: usize,
    bounds: &Bounds,
    form: &SkewHermForm,
) -> Result<Option<(GLOrbitRep, UOrbitRep)>> {
    let p = field.p();
    let alg = field.alg();
    let last = form.beta().get(n - 1, n - 1).clone() * field.j().inv()?;
    let last = last.to_f().ok_or_else(|| Error::Internal("form is not j times a rational diagonal".into()))?;
    // D C symmetric makes every polynomial in C self-adjoint for j D. An integral charpoly
    // with unit constant term forces `last` to divide the rest of the last column.
    let mut c = symmetric(rng, n, bounds.coeff);
    for row in c.iter_mut().take(n - 1) {
        row[n - 1] = &row[n - 1] * &last;
    }
    let cm = MatE::from_f(alg, &c);
    let cp = cm.charpoly();
    if !is_squarefree_e(&cp, alg) || !cp.iter().all(|a| a.is_integral(p)) || !cp[0].is_unit(p) {
        return Ok(None);
    }
    let gamma = cm.eval_poly(&poly_coeffs(field, rng, n, bounds.coeff));
    if !gamma.is_invertible() || (bounds.unit_det && !gamma.is_in_gl_o(p)) {
        return Ok(None);
    }
    match express_in_norm_powers(&gamma) {
        Ok(cs) if cs.iter().all(|c| c.is_integral(p)) => {}
        _ => return Ok(None),
    }
    let half = bounds.val_bound.div_euclid(2);
    let z = MatE::row_vector(
        alg,
        (0..n).map(|_| Ext::new(alg, scaled(rng, p, -half, half), scaled(rng, p, -half, half))).collect(),
    );
    let Ok(u) = UOrbitRep::new(gamma.clone(), z, form.clone()) else {
        return Ok(None);
    };
    let mu = u_to_mtriple(&u);
    if !is_rss_mtriple(&mu) || !valuations_within(field, &mu, bounds.val_bound) {
        return Ok(None);
    }
    let Some(gl) = solve_gl_side(field, rng, &gamma, invariants(&mu).b, half)? else {
        return Ok(None);
    };
    if !is_rss_mtriple(&gl_to_mtriple(&gl)?) {
        return Ok(None);
    }
    Ok(Some((gl, u)))
}

fn generate(
    field: &LocalField,
    seed: u64,
    index: u64,
    bounds: &Bounds,
    recipe: Recipe,
    attempt: impl Fn(&mut ChaCha8Rng) -> Result<Option<(GLOrbitRep, UOrbitRep)>>,
) -> Result<Instance> {
    let mut rng = rng_for(seed, index);
    for _ in 0..bounds.max_attempts {
        let Some((gl, u)) = attempt(&mut rng)? else {
            continue;
        };
        let d = choose_d(field, |d| {
            let gl_ok = embed_gl_to_gln1(field, &gl, d).is_ok_and(|e| is_relatively_rss(&e));
            let u_ok = recipe != Recipe::Symmetric || embed_u_to_hn1(field, &u, d).is_ok_and(|e| is_relatively_rss(&e));
            gl_ok && u_ok
        })?;
        let inst = Instance { field: field.clone(), gl, u, d, seed, index, recipe };
        check_instance(&inst)?;
        return Ok(inst);
    }
    Err(Error::Generation { attempts: bounds.max_attempts, seed })
}

/// A `beta^+`-matched pair `[gamma, x, y]`, `[zeta, z]` at an inert place.
pub fn gen_matched_pair(field: &LocalField, n: usize, seed: u64, index: u64, bounds: &Bounds) -> Result<Instance> {
    require_inert(field, n)?;
    let form = SkewHermForm::beta_plus(field, n);
    generate(field, seed, index, bounds, Recipe::Symmetric, |rng| try_inert(field, rng, n, bounds, &form))
}

/// A GL-side triple matching a unitary triple for `beta^- = j diag(1, ..., 1, p)`.
pub fn gen_beta_minus_instance(
    field: &LocalField,
    n: usize,
    seed: u64,
    index: u64,
    bounds: &Bounds,
) -> Result<Instance> {
    require_inert(field, n)?;
    let form = SkewHermForm::beta_minus(field, n);
    generate(field, seed, index, bounds, Recipe::BetaMinus, |rng| try_inert(field, rng, n, bounds, &form))
}

/// Integral `k` with determinant `+-1`: a product of random elementary matrices.
fn unimodular(rng: &mut ChaCha8Rng, n: usize, c: i64) -> Vec<Vec<Q>> {
    let mut k: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|j| q(i64::from(i == j))).collect()).collect();
    for _ in 0..2 * n {
        if n < 2 {
            break;
        }
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a == b {
            continue;
        }
        let t = int(rng, c);
        let shift: Vec<Q> = k[b].iter().map(|v| v * &t).collect();
        for (slot, v) in k[a].iter_mut().zip(shift) {
            *slot = &*slot + &v;
        }
    }
    if rng.gen_bool(0.5) {
        for v in k[0].iter_mut() {
            *v = -v.clone();
        }
    }
    k
}

/// A matched pair at a split place: `gamma = (1, delta)` with `delta` in `GL_n(O_F)`,
/// `zeta = (1, k^T delta^T k^{-T})`, `z = (x k, (k^{-1} y_0)^T)`.
pub fn gen_split_pair(field: &LocalField, n: usize, seed: u64, index: u64, bounds: &Bounds) -> Result<Instance> {
    if !field.is_split() {
        return Err(Error::SplitOnly);
    }
    if !(1..=2).contains(&n) {
        return Err(Error::Precondition(format!("generators support n in {{1, 2}}, got {n}")));
    }
    let p = field.p();
    let alg = field.alg();
    let one: Vec<Vec<Q>> = MatE::identity(alg, n).split_components()?.0;
    let attempt = |rng: &mut ChaCha8Rng| -> Result<Option<(GLOrbitRep, UOrbitRep)>> {
        let delta =
            MatE::from_f(alg, &(0..n).map(|_| (0..n).map(|_| int(rng, bounds.coeff)).collect()).collect::<Vec<_>>());
        if !delta.is_in_gl_o(p) || !is_squarefree_e(&delta.charpoly(), alg) {
            return Ok(None);
        }
        let (dl, _) = delta.split_components()?;
        let gamma = MatE::from_split_components(&one, &dl)?;
        let half = bounds.val_bound.div_euclid(2);
        let x = MatE::row_vector(alg, (0..n).map(|_| field.f(scaled(rng, p, -half, half))).collect());
        let y0: Vec<Q> = (0..n).map(|_| scaled(rng, p, -half, half)).collect();
        let y = MatE::col_vector(alg, y0.iter().map(|v| field.j().scale(v)).collect());
        let Ok(gl) = GLOrbitRep::new(gamma, x.clone(), y) else {
            return Ok(None);
        };
        if !is_rss_mtriple(&gl_to_mtriple(&gl)?) || !valuations_within(field, &gl_to_mtriple(&gl)?, bounds.val_bound) {
            return Ok(None);
        }
        let k = MatE::from_f(alg, &unimodular(rng, n, bounds.coeff));
        let ki = k.inverse()?;
        let zeta2 = &(&k.transpose() * &delta.transpose()) * &ki.transpose();
        let (z2, _) = zeta2.split_components()?;
        let zeta = MatE::from_split_components(&one, &z2)?;
        let xk = &x * &k;
        let ky = &ki * &MatE::col_vector(alg, y0.iter().map(|v| field.f(v.clone())).collect());
        let z = MatE::row_vector(
            alg,
            xk.entries().iter().zip(ky.entries()).map(|(l, r)| Ext::new(alg, l.a.clone(), r.a.clone())).collect(),
        );
        let Ok(u) = UOrbitRep::new(zeta, z, SkewHermForm::beta_plus(field, n)) else {
            return Ok(None);
        };
        Ok(Some((gl, u)))
    };
    generate(field, seed, index, bounds, Recipe::Split, attempt)
}

/// Re-derives every property an instance is supposed to have.
pub fn check_instance(inst: &Instance) -> Result<()> {
    let field = &inst.field;
    let fail = |what: &str| Err(Error::Internal(format!("instance {} (seed {}): {what}", inst.index, inst.seed)));
    if !orbits_match(&inst.gl, &inst.u)? {
        return fail("orbits do not match");
    }
    match inst.recipe {
        Recipe::Symmetric | Recipe::BetaMinus => {
            if !is_kottwitz(field, &inst.gl.gamma)? {
                return fail("gamma is not Kottwitz");
            }
            if inst.recipe == Recipe::Symmetric && !is_kottwitz_u(field, &inst.u.zeta, &inst.u.form)? {
                return fail("zeta is not Kottwitz");
            }
            let identity = MatE::identity(field.alg(), inst.gl.n());
            if compatible_unitary_rep(&inst.gl.gamma, &inst.u.form, &identity)? != inst.u.zeta {
                return fail("representatives are not compatible");
            }
            let omega = transfer_factor(field, &gl_to_mtriple(&inst.gl)?)?;
            if omega.as_rational().is_none_or(|w| w != q(1) && w != q(-1)) {
                return fail("transfer factor is not a sign");
            }
        }
        Recipe::Split => {
            if !is_k_kottwitz_split(field, &inst.gl.gamma, 0)? {
                return fail("gamma is not 0-Kottwitz");
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::MuAtP;

    #[test]
    fn generators_are_deterministic() {
        let field = LocalField::inert_default(3).unwrap();
        let b = Bounds::default();
        assert_eq!(gen_matched_pair(&field, 2, 9, 1, &b).unwrap(), gen_matched_pair(&field, 2, 9, 1, &b).unwrap());
        assert_ne!(gen_matched_pair(&field, 2, 9, 1, &b).unwrap(), gen_matched_pair(&field, 2, 9, 2, &b).unwrap());
    }

    #[test]
    fn inert_instances_are_unit_and_within_bounds() {
        let field = LocalField::inert_default(5).unwrap();
        let b = Bounds::default();
        for index in 0..8 {
            for inst in [
                gen_matched_pair(&field, 1, 2, index, &b).unwrap(),
                gen_beta_minus_instance(&field, 2, 2, index, &b).unwrap(),
            ] {
                assert!(inst.gl.gamma.is_in_gl_o(5));
                assert!(valuations_within(&field, &gl_to_mtriple(&inst.gl).unwrap(), b.val_bound));
                check_instance(&inst).unwrap();
            }
        }
    }

    #[test]
    fn generators_check_the_place() {
        let inert = LocalField::inert_default(3).unwrap();
        let split = LocalField::split(3, MuAtP::One).unwrap();
        let b = Bounds::default();
        assert!(matches!(gen_split_pair(&inert, 1, 0, 0, &b), Err(Error::SplitOnly)));
        assert!(gen_matched_pair(&split, 1, 0, 0, &b).is_err());
        assert!(gen_matched_pair(&inert, 3, 0, 0, &b).is_err());
    }

    #[test]
    fn exhausted_attempts_report_the_seed() {
        let field = LocalField::inert_default(3).unwrap();
        let b = Bounds { max_attempts: 0, ..Bounds::default() };
        assert!(matches!(gen_matched_pair(&field, 1, 77, 0, &b), Err(Error::Generation { attempts: 0, seed: 77 })));
    }

    #[test]
    fn unimodular_has_unit_determinant() {
        let field = LocalField::split(3, MuAtP::One).unwrap();
        let mut rng = rng_for(3, 0);
        for _ in 0..20 {
            let k = MatE::from_f(field.alg(), &unimodular(&mut rng, 2, 3));
            let det = k.det().a;
            assert!(det == q(1) || det == q(-1));
        }
    }
}
