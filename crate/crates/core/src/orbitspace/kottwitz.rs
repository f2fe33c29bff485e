//! Kottwitz predicates and the local existence of Kottwitz representatives.

use num_traits::One;

use crate::error::{Error, Result};
use crate::localfield::{p_pow, Algebra, Ext, LocalField, Val, Q};
use crate::matalg::{
    express_in_norm_powers, express_in_powers, is_normal_gl, is_normal_u, is_rss_matrix, MatE, SkewHermForm,
};

/// For rss `delta`: some conjugate lies in `GL_n(O_E)` iff the characteristic polynomial is
/// integral with unit constant term (the companion matrix is such a conjugate).
fn has_integral_conjugate(delta: &MatE, p: u64) -> bool {
    let cp = delta.charpoly();
    cp.iter().all(|c| c.is_integral(p)) && cp[0].is_unit(p)
}

fn all_integral(cs: &[Ext], p: u64) -> bool {
    cs.iter().all(|c| c.is_integral(p))
}

pub fn is_kottwitz(field: &LocalField, gamma: &MatE) -> Result<bool> {
    if !is_normal_gl(gamma) {
        return Err(Error::Precondition("gamma must be invertible and normal".into()));
    }
    let cs = express_in_norm_powers(gamma)?;
    if all_integral(&cs, field.p()) {
        return Ok(true);
    }
    let delta = &gamma.conj() * gamma;
    Ok(!has_integral_conjugate(&delta, field.p()))
}

/// Clause 2 is decided over `GL_n(E)` rather than the unitary group, which can only
/// turn a true answer into false.
pub fn is_kottwitz_u(field: &LocalField, zeta: &MatE, form: &SkewHermForm) -> Result<bool> {
    if !is_normal_u(zeta, form) {
        return Err(Error::Precondition("zeta must be invertible and normal for the form".into()));
    }
    let delta = form.norm_type(zeta);
    if !is_rss_matrix(&delta) {
        return Err(Error::NotRss("norm of zeta".into()));
    }
    let cs = express_in_powers(zeta, &delta)
        .ok_or_else(|| Error::Internal("normal zeta with rss norm lies outside E[norm]".into()))?;
    if all_integral(&cs, field.p()) {
        return Ok(true);
    }
    Ok(!has_integral_conjugate(&delta, field.p()))
}

/// `gamma_1 = sum c_i (gamma_2 gamma_1)^i` with `c_0 in 1 + p^k O` and `c_i in p^k O` otherwise.
pub fn is_k_kottwitz_split(field: &LocalField, gamma: &MatE, k: u32) -> Result<bool> {
    if !field.is_split() {
        return Err(Error::SplitOnly);
    }
    let (g1, g2) = gamma.split_components()?;
    let g1 = MatE::from_f(Algebra::Split, &g1);
    let g2 = MatE::from_f(Algebra::Split, &g2);
    let base = &g2 * &g1;
    if !is_rss_matrix(&base) {
        return Err(Error::NotRss("gamma_2 gamma_1".into()));
    }
    let cs = express_in_powers(&g1, &base)
        .ok_or_else(|| Error::NoSolution("gamma_1 is not a polynomial in gamma_2 gamma_1".into()))?;
    let deep = |x: &Q| field.valuation(x) >= Val::Fin(k as i64);
    Ok(cs.iter().enumerate().all(|(i, c)| {
        let v = if i == 0 { &c.a - Q::one() } else { c.a.clone() };
        deep(&v)
    }))
}

/// `zeta = h^{-1} gamma h`, checking `beta^{-1} zeta* beta = h^{-1} conj(gamma) h`.
pub fn compatible_unitary_rep(gamma: &MatE, form: &SkewHermForm, h: &MatE) -> Result<MatE> {
    let hi = h.inverse()?;
    let zeta = &(&hi * gamma) * h;
    let expected = &(&hi * &gamma.conj()) * h;
    if form.adjoint(&zeta) != expected {
        return Err(Error::Precondition("h does not relate the two norms".into()));
    }
    Ok(zeta)
}

/// A solution of `conj(gamma) gamma = delta` modulo `p^precision`; exact when `precision` is `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxKottwitz {
    pub gamma: MatE,
    pub precision: Option<u32>,
}

/// Solves the norm equation inside `O_E[delta]` by residue search and Hensel-style lifting.
pub fn find_local_kottwitz(field: &LocalField, delta: &MatE, precision: u32) -> Result<ApproxKottwitz> {
    if !delta.is_over_f() || !is_rss_matrix(delta) {
        return Err(Error::Precondition("delta must be an rss matrix over F".into()));
    }
    let alg = field.alg();
    if field.is_split() {
        let (d, _) = delta.split_components()?;
        let n = delta.rows();
        let one: Vec<Vec<Q>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::from_integer(0.into()) }).collect())
            .collect();
        return Ok(ApproxKottwitz { gamma: MatE::from_split_components(&one, &d)?, precision: None });
    }
    let p = field.p();
    if !has_integral_conjugate(delta, p) || !delta.is_integral(p) {
        return Err(Error::Precondition("delta must be integral with unit determinant".into()));
    }
    let n = delta.rows();
    let pows = delta.powers(n);
    let residues: Vec<Ext> = (0..p as i64)
        .flat_map(|a| (0..p as i64).map(move |b| Ext::new(alg, Q::from_integer(a.into()), Q::from_integer(b.into()))))
        .collect();
    let eval =
        |cs: &[Ext]| -> MatE { cs.iter().zip(&pows).fold(MatE::zeros(alg, n, n), |acc, (c, m)| &acc + &m.scale(c)) };
    let holds = |cs: &[Ext], level: u32| {
        let g = eval(cs);
        (&(&g.conj() * &g) - delta).vmin(p) >= Val::Fin(level as i64)
    };

    fn search(
        cs: &mut Vec<Ext>,
        level: u32,
        target: u32,
        residues: &[Ext],
        p: u64,
        holds: &dyn Fn(&[Ext], u32) -> bool,
    ) -> bool {
        if level > target {
            return true;
        }
        let n = cs.len();
        let step = p_pow(p, level as i64 - 1);
        let base = cs.clone();
        let total = residues.len().pow(n as u32);
        for idx in 0..total {
            let mut rest = idx;
            for i in 0..n {
                let r = &residues[rest % residues.len()];
                rest /= residues.len();
                cs[i] = &base[i] + &r.scale(&step);
            }
            if holds(cs, level) && search(cs, level + 1, target, residues, p, holds) {
                return true;
            }
        }
        cs.clone_from(&base);
        false
    }

    let mut cs = vec![Ext::zero(alg); n];
    if search(&mut cs, 1, precision.max(1), &residues, p, &holds) {
        Ok(ApproxKottwitz { gamma: eval(&cs), precision: Some(precision.max(1)) })
    } else {
        Err(Error::NoSolution("norm equation has no solution at this precision".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::{q, MuAtP};
    use crate::matalg::norm_map;

    fn inert() -> LocalField {
        LocalField::inert(3, 2).unwrap()
    }

    #[test]
    fn identity_is_kottwitz() {
        let f = inert();
        assert!(is_kottwitz(&f, &MatE::identity(f.alg(), 1)).unwrap());
        let form = SkewHermForm::beta_plus(&f, 1);
        assert!(is_kottwitz_u(&f, &MatE::identity(f.alg(), 1), &form).unwrap());
    }

    #[test]
    fn clause_two_for_non_unit_norm() {
        let f = inert();
        // gamma = 1/3: c_0 = 1/3 is not integral, but the norm 1/9 has no integral conjugate either
        let g = MatE::scalar(1, &Ext::from_f(f.alg(), crate::localfield::qf(1, 3)));
        assert_eq!(express_in_norm_powers(&g).unwrap(), vec![Ext::from_f(f.alg(), crate::localfield::qf(1, 3))]);
        assert!(is_kottwitz(&f, &g).unwrap());
    }

    #[test]
    fn polynomials_in_a_companion_matrix() {
        let f = inert();
        let s = f.j().clone();
        // symmetric, with characteristic polynomial X^2 - X - 1
        let c = MatE::from_ints(f.alg(), &[&[0, 1], &[1, 1]]);
        let zero = Ext::zero(f.alg());
        let clause1 = c.eval_poly(&[zero, s.clone()]);
        let cs = express_in_norm_powers(&clause1).unwrap();
        assert!(cs.iter().all(|x| x.is_integral(3)));
        assert!(is_kottwitz(&f, &clause1).unwrap());

        // 1 + 3 sqrt(eps) C has norm -17 - 18 C, forcing c_1 = -sqrt(eps)/6
        let bad = c.eval_poly(&[f.f_int(1), s.scale(&q(3))]);
        assert!(!express_in_norm_powers(&bad).unwrap().iter().all(|x| x.is_integral(3)));
        assert!(!is_kottwitz(&f, &bad).unwrap());
        let form = SkewHermForm::beta_plus(&f, 2);
        assert!(!is_kottwitz_u(&f, &bad, &form).unwrap());
        assert!(is_kottwitz_u(&f, &clause1, &form).unwrap());
    }

    #[test]
    fn split_k_kottwitz() {
        let f = LocalField::split(3, MuAtP::One).unwrap();
        let one = vec![vec![q(1), q(0)], vec![q(0), q(1)]];
        let delta = vec![vec![q(0), q(-1)], vec![q(1), q(4)]];
        let g = MatE::from_split_components(&one, &delta).unwrap();
        for k in 0..4 {
            assert!(is_k_kottwitz_split(&f, &g, k).unwrap());
        }
        let rev = MatE::from_split_components(&delta, &one).unwrap();
        assert!(!is_k_kottwitz_split(&f, &rev, 1).unwrap());
        assert!(is_k_kottwitz_split(&f, &rev, 0).unwrap());
        assert!(is_k_kottwitz_split(&inert(), &g, 0).is_err());
    }

    #[test]
    fn compatible_rep_examples() {
        let f = inert();
        let form = SkewHermForm::beta_plus(&f, 2);
        let c = MatE::from_ints(f.alg(), &[&[1, 1], &[1, 2]]);
        let gamma = c.eval_poly(&[Ext::new(f.alg(), q(1), q(1)), Ext::new(f.alg(), q(2), q(0))]);
        let zeta = compatible_unitary_rep(&gamma, &form, &MatE::identity(f.alg(), 2)).unwrap();
        assert_eq!(zeta, gamma);
        assert!(is_normal_u(&zeta, &form));
        let asym = MatE::from_ints(f.alg(), &[&[1, 1], &[0, 2]])
            .eval_poly(&[Ext::new(f.alg(), q(0), q(1)), Ext::new(f.alg(), q(1), q(1))]);
        assert!(compatible_unitary_rep(&asym, &form, &MatE::identity(f.alg(), 2)).is_err());
    }

    #[test]
    fn local_kottwitz_split_is_exact() {
        let f = LocalField::split(5, MuAtP::I).unwrap();
        let d = MatE::from_ints(Algebra::Split, &[&[0, -1], &[1, 3]]);
        let k = find_local_kottwitz(&f, &d, 3).unwrap();
        assert_eq!(k.precision, None);
        assert_eq!(norm_map(&k.gamma).unwrap(), d);
    }

    #[test]
    fn local_kottwitz_inert_lifts() {
        let f = inert();
        let id = MatE::identity(f.alg(), 1);
        let k = find_local_kottwitz(&f, &id, 2).unwrap();
        assert!((&(&k.gamma.conj() * &k.gamma) - &id).vmin(3) >= Val::Fin(2));
        // every unit of Z_3 is a norm from the unramified extension
        let d = MatE::scalar(1, &f.f_int(7));
        let k = find_local_kottwitz(&f, &d, 3).unwrap();
        assert!((&(&k.gamma.conj() * &k.gamma) - &d).vmin(3) >= Val::Fin(3));
        let d2 = MatE::from_ints(f.alg(), &[&[0, -1], &[1, 1]]);
        let k = find_local_kottwitz(&f, &d2, 2).unwrap();
        assert!((&(&k.gamma.conj() * &k.gamma) - &d2).vmin(3) >= Val::Fin(2));
    }
}
