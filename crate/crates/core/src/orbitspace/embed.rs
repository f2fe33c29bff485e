//! Block embeddings of orbit representatives into rank `n + 1`.

use crate::error::{Error, Result};
use crate::localfield::{Ext, LocalField, Q};
use crate::matalg::{norm_map, MatE, SkewHermForm};

use super::{is_rss_mtriple, GLOrbitRep, MTriple, UOrbitRep};

/// `[[xi, col], [row, d]]`, with `d` in `O_F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gl1Embedding {
    pub a: MatE,
    pub d: Q,
}

impl Gl1Embedding {
    fn assemble(xi: &MatE, col: &MatE, row: &MatE, d: &Q) -> Self {
        let n = xi.rows();
        let alg = xi.alg();
        let mut a = MatE::zeros(alg, n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, xi.get(i, j).clone());
            }
            a.set(i, n, col.get(i, 0).clone());
            a.set(n, i, row.get(0, i).clone());
        }
        a.set(n, n, Ext::from_f(alg, d.clone()));
        Gl1Embedding { a, d: d.clone() }
    }

    pub fn n(&self) -> usize {
        self.a.rows() - 1
    }

    /// The triple (upper-left block, bottom row fragment, right column fragment).
    pub fn triple(&self) -> MTriple {
        let n = self.n();
        let alg = self.a.alg();
        let block = (0..n).map(|i| (0..n).map(|j| self.a.get(i, j).clone()).collect()).collect();
        MTriple {
            xi: MatE::from_rows(alg, block).expect("square block"),
            x: MatE::row_vector(alg, (0..n).map(|j| self.a.get(n, j).clone()).collect()),
            y: MatE::col_vector(alg, (0..n).map(|i| self.a.get(i, n).clone()).collect()),
        }
    }
}

fn require_integral(field: &LocalField, d: &Q) -> Result<()> {
    if !field.valuation(d).is_nonneg() {
        return Err(Error::Precondition(format!("corner entry {d} is not integral")));
    }
    Ok(())
}

/// `[[conj(gamma) gamma, j y], [x, d]]`, a matrix over `F`.
pub fn embed_gl_to_gln1(field: &LocalField, r: &GLOrbitRep, d: &Q) -> Result<Gl1Embedding> {
    require_integral(field, d)?;
    let jy = r.y.scale(field.j());
    debug_assert!(jy.is_over_f());
    Ok(Gl1Embedding::assemble(&norm_map(&r.gamma)?, &jy, &r.x, d))
}

/// `[[beta^{-1} zeta* beta zeta, z*], [z, d]]` for the scalar form `beta = j I`.
pub fn embed_u_to_hn1(field: &LocalField, r: &UOrbitRep, d: &Q) -> Result<Gl1Embedding> {
    require_integral(field, d)?;
    if r.form != SkewHermForm::beta_plus(field, r.n()) {
        return Err(Error::Precondition("only the scalar form j I embeds".into()));
    }
    let e = Gl1Embedding::assemble(&r.form.norm_type(&r.zeta), &r.z.conj_transpose(), &r.z, d);
    let big = SkewHermForm::beta_plus(field, r.n() + 1);
    if e.a.conj_transpose() != &(big.beta() * &e.a) * big.beta_inv() {
        return Err(Error::Internal("embedded matrix is not twisted-Hermitian".into()));
    }
    Ok(e)
}

/// Tested through the associated triple; the corner entry plays no role.
pub fn is_relatively_rss(e: &Gl1Embedding) -> bool {
    is_rss_mtriple(&e.triple())
}

/// First `d` in `0, 1, ..., p - 1` accepted by `ok`.
pub fn choose_d(field: &LocalField, ok: impl Fn(&Q) -> bool) -> Result<Q> {
    (0..field.p() as i64)
        .map(|d| Q::from_integer(d.into()))
        .find(|d| ok(d))
        .ok_or_else(|| Error::NoSolution(format!("none of the {} corner candidates works", field.p())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::q;

    #[test]
    fn n1_gl_embedding() {
        let f = LocalField::inert(3, 2).unwrap();
        let alg = f.alg();
        let r = GLOrbitRep::new(MatE::identity(alg, 1), MatE::identity(alg, 1), MatE::scalar(1, f.j())).unwrap();
        let e = embed_gl_to_gln1(&f, &r, &q(0)).unwrap();
        assert_eq!(e.a, MatE::from_ints(alg, &[&[1, 2], &[1, 0]]));
        assert!(e.a.is_over_f());
        assert!(is_relatively_rss(&e));
        assert!(embed_gl_to_gln1(&f, &r, &crate::localfield::qf(1, 3)).is_err());
        let d = choose_d(&f, |d| embed_gl_to_gln1(&f, &r, d).is_ok_and(|e| is_relatively_rss(&e))).unwrap();
        assert_eq!(d, q(0));
    }

    #[test]
    fn n1_u_embedding() {
        let f = LocalField::inert(3, 2).unwrap();
        let alg = f.alg();
        let z = MatE::scalar(1, &Ext::new(alg, q(1), q(1)));
        let r = UOrbitRep::new(MatE::identity(alg, 1), z, SkewHermForm::beta_plus(&f, 1)).unwrap();
        let e = embed_u_to_hn1(&f, &r, &q(1)).unwrap();
        assert_eq!(e.a.conj_transpose(), e.a);
        assert!(is_relatively_rss(&e));
        let r2 = UOrbitRep::new(MatE::identity(alg, 1), r.z.clone(), SkewHermForm::beta_minus(&f, 1)).unwrap();
        assert!(embed_u_to_hn1(&f, &r2, &q(0)).is_err());
    }

    #[test]
    fn degenerate_embeddings() {
        let f = LocalField::inert(5, 2).unwrap();
        let alg = f.alg();
        let y = MatE::col_vector(alg, vec![f.j().clone(), f.j().clone()]);
        let zero_x =
            GLOrbitRep::new(MatE::from_ints(alg, &[&[1, 0], &[0, 2]]), MatE::zeros(alg, 1, 2), y.clone()).unwrap();
        assert!(!is_relatively_rss(&embed_gl_to_gln1(&f, &zero_x, &q(0)).unwrap()));
        let rep = GLOrbitRep::new(MatE::identity(alg, 2), MatE::from_ints(alg, &[&[1, 1]]), y).unwrap();
        assert!(!is_relatively_rss(&embed_gl_to_gln1(&f, &rep, &q(0)).unwrap()));
    }
}
