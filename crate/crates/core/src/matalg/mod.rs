//! Matrices over `E`, the involutions on them, the norm map, and skew-Hermitian forms.

pub mod linalg;
pub mod mat;

pub use mat::{is_squarefree_e, solve_unique_e, MatE};

use crate::error::{Error, Result};
use crate::localfield::{p_pow, Ext, LocalField};

/// An invertible matrix `beta` with `beta* = -beta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewHermForm {
    beta: MatE,
    beta_inv: MatE,
}

impl SkewHermForm {
    pub fn new(beta: MatE) -> Result<Self> {
        if !beta.is_square() {
            return Err(Error::Precondition("form must be square".into()));
        }
        if beta.conj_transpose() != -beta.clone() {
            return Err(Error::Precondition("form is not skew-Hermitian".into()));
        }
        let beta_inv = beta.inverse()?;
        Ok(SkewHermForm { beta, beta_inv })
    }

    /// `j * I`.
    pub fn beta_plus(field: &LocalField, n: usize) -> Self {
        SkewHermForm::new(MatE::scalar(n, field.j())).expect("j I is skew-Hermitian")
    }

    /// `j * diag(1, ..., 1, p)`, whose Hermitian form `j^{-1} beta` has odd determinant valuation.
    pub fn beta_minus(field: &LocalField, n: usize) -> Self {
        let mut d = vec![field.j().clone(); n];
        d[n - 1] = field.j().scale(&p_pow(field.p(), 1));
        SkewHermForm::new(MatE::diag(field.alg(), &d)).expect("j times a rational diagonal is skew-Hermitian")
    }

    pub fn beta(&self) -> &MatE {
        &self.beta
    }

    pub fn beta_inv(&self) -> &MatE {
        &self.beta_inv
    }

    pub fn n(&self) -> usize {
        self.beta.rows()
    }

    /// `g -> beta^{-1} g* beta`, an anti-automorphism of order two.
    pub fn adjoint(&self, g: &MatE) -> MatE {
        &(&self.beta_inv * &g.conj_transpose()) * &self.beta
    }

    /// `beta^{-1} zeta* beta zeta`.
    pub fn norm_type(&self, zeta: &MatE) -> MatE {
        &self.adjoint(zeta) * zeta
    }

    pub fn is_unitary(&self, h: &MatE) -> bool {
        h.rows() == self.n() && &(&h.conj_transpose() * &self.beta) * h == self.beta
    }
}

/// `conj(gamma) * gamma`.
pub fn norm_map(gamma: &MatE) -> Result<MatE> {
    if !gamma.is_invertible() {
        return Err(Error::Singular);
    }
    Ok(&gamma.conj() * gamma)
}

/// `gamma . g = g^{-1} gamma conj(g)`.
pub fn sigma_conjugate(gamma: &MatE, g: &MatE) -> Result<MatE> {
    let gi = g.inverse()?;
    Ok(&(&gi * gamma) * &g.conj())
}

pub fn is_normal_gl(gamma: &MatE) -> bool {
    norm_map(gamma).is_ok_and(|d| d.is_over_f())
}

pub fn is_normal_u(zeta: &MatE, form: &SkewHermForm) -> bool {
    if !zeta.is_invertible() {
        return false;
    }
    let d = form.norm_type(zeta);
    zeta * &d == &d * zeta
}

pub fn is_unitary(h: &MatE, form: &SkewHermForm) -> bool {
    form.is_unitary(h)
}

/// Squarefree characteristic polynomial.
pub fn is_rss_matrix(xi: &MatE) -> bool {
    xi.is_square() && is_squarefree_e(&xi.charpoly(), xi.alg())
}

/// Coefficients `c_0..c_{n-1}` with `target = sum c_i base^i`, if they exist.
pub fn express_in_powers(target: &MatE, base: &MatE) -> Option<Vec<Ext>> {
    let n = base.rows();
    let pows = base.powers(n);
    let mut a = Vec::with_capacity(n * n);
    let mut b = Vec::with_capacity(n * n);
    for r in 0..n {
        for s in 0..n {
            a.push(pows.iter().map(|m| m.get(r, s).clone()).collect());
            b.push(target.get(r, s).clone());
        }
    }
    solve_unique_e(&a, &b, base.alg())
}

/// Writes a normal `gamma` as a polynomial in `conj(gamma) gamma`.
pub fn express_in_norm_powers(gamma: &MatE) -> Result<Vec<Ext>> {
    let delta = norm_map(gamma)?;
    if !delta.is_over_f() {
        return Err(Error::Precondition("gamma is not normal".into()));
    }
    if !is_rss_matrix(&delta) {
        return Err(Error::NotRss("norm of gamma".into()));
    }
    express_in_powers(gamma, &delta)
        .ok_or_else(|| Error::Internal("normal gamma with rss norm lies outside E[norm]".into()))
}
