//! The invariant space `M_n(E)`, orbit representatives on both sides, matching and transfer factors.

mod embed;
mod kottwitz;

pub use embed::{choose_d, embed_gl_to_gln1, embed_u_to_hn1, is_relatively_rss, Gl1Embedding};
pub use kottwitz::{
    compatible_unitary_rep, find_local_kottwitz, is_k_kottwitz_split, is_kottwitz, is_kottwitz_u, ApproxKottwitz,
};

use crate::error::{Error, Result};
use crate::localfield::{CycValue, Ext, LocalField};
use crate::matalg::{is_normal_gl, is_normal_u, is_rss_matrix, norm_map, MatE, SkewHermForm};

/// `[xi, x, y]` with `xi` square, `x` a row and `y` a column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MTriple {
    pub xi: MatE,
    pub x: MatE,
    pub y: MatE,
}

impl MTriple {
    pub fn new(xi: MatE, x: MatE, y: MatE) -> Result<Self> {
        let n = xi.rows();
        if !xi.is_square() || (x.rows(), x.cols()) != (1, n) || (y.rows(), y.cols()) != (n, 1) {
            return Err(Error::Precondition("triple shapes must be n x n, 1 x n, n x 1".into()));
        }
        Ok(MTriple { xi, x, y })
    }

    pub fn n(&self) -> usize {
        self.xi.rows()
    }

    /// `[xi, x, y].h = [h^{-1} xi h, x h, h^{-1} y]`.
    pub fn act(&self, h: &MatE) -> Result<MTriple> {
        let hi = h.inverse()?;
        Ok(MTriple { xi: &(&hi * &self.xi) * h, x: &self.x * h, y: &hi * &self.y })
    }

    /// Rows `x, x xi, ..., x xi^{n-1}`.
    pub fn row_stack(&self) -> MatE {
        let rows: Vec<MatE> = self.xi.powers(self.n()).iter().map(|p| &self.x * p).collect();
        MatE::vstack(&rows).expect("rows of equal length")
    }

    /// Columns `y, xi y, ..., xi^{n-1} y`.
    pub fn col_stack(&self) -> MatE {
        let cols: Vec<MatE> = self.xi.powers(self.n()).iter().map(|p| p * &self.y).collect();
        MatE::hstack(&cols).expect("columns of equal length")
    }
}

/// `a_i` are the signed characteristic polynomial coefficients, `b_i = x xi^{i-1} y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants {
    pub a: Vec<Ext>,
    pub b: Vec<Ext>,
}

pub fn invariants(m: &MTriple) -> Invariants {
    let n = m.n();
    let cp = m.xi.charpoly();
    let a = (1..=n)
        .map(|i| {
            let c = cp[n - i].clone();
            if i % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect();
    let b = m.xi.powers(n).iter().map(|p| (&(&m.x * p) * &m.y).get(0, 0).clone()).collect();
    Invariants { a, b }
}

pub fn is_rss_mtriple(m: &MTriple) -> bool {
    is_rss_matrix(&m.xi) && m.row_stack().is_invertible() && m.col_stack().is_invertible()
}

/// `gamma` normal, `x` over `F`, `y` purely imaginary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GLOrbitRep {
    pub gamma: MatE,
    pub x: MatE,
    pub y: MatE,
}

impl GLOrbitRep {
    pub fn new(gamma: MatE, x: MatE, y: MatE) -> Result<Self> {
        MTriple::new(gamma.clone(), x.clone(), y.clone())?;
        if !is_normal_gl(&gamma) {
            return Err(Error::Precondition("gamma is not normal".into()));
        }
        if !x.is_over_f() {
            return Err(Error::Precondition("x must have entries in F".into()));
        }
        if !y.entries().iter().all(Ext::is_purely_imaginary) {
            return Err(Error::Precondition("y must be purely imaginary".into()));
        }
        Ok(GLOrbitRep { gamma, x, y })
    }

    pub fn n(&self) -> usize {
        self.gamma.rows()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UOrbitRep {
    pub zeta: MatE,
    pub z: MatE,
    pub form: SkewHermForm,
}

impl UOrbitRep {
    pub fn new(zeta: MatE, z: MatE, form: SkewHermForm) -> Result<Self> {
        let n = zeta.rows();
        if !zeta.is_square() || (z.rows(), z.cols()) != (1, n) || form.n() != n {
            return Err(Error::Precondition("unitary representative has inconsistent shapes".into()));
        }
        if !is_normal_u(&zeta, &form) {
            return Err(Error::Precondition("zeta is not normal for the form".into()));
        }
        Ok(UOrbitRep { zeta, z, form })
    }

    pub fn n(&self) -> usize {
        self.zeta.rows()
    }

    /// `beta^{-1} z*`.
    pub fn z_dual(&self) -> MatE {
        self.form.beta_inv() * &self.z.conj_transpose()
    }
}

pub fn gl_to_mtriple(r: &GLOrbitRep) -> Result<MTriple> {
    MTriple::new(norm_map(&r.gamma)?, r.x.clone(), r.y.clone())
}

pub fn u_to_mtriple(r: &UOrbitRep) -> MTriple {
    MTriple { xi: r.form.norm_type(&r.zeta), x: r.z.clone(), y: r.z_dual() }
}

fn require_rss(m: &MTriple, side: &str) -> Result<()> {
    if is_rss_mtriple(m) {
        Ok(())
    } else {
        Err(Error::NotRss(format!("{side} triple")))
    }
}

/// Equality of invariants of the two associated triples.
pub fn orbits_match(g: &GLOrbitRep, u: &UOrbitRep) -> Result<bool> {
    let mg = gl_to_mtriple(g)?;
    let mu = u_to_mtriple(u);
    require_rss(&mg, "GL-side")?;
    require_rss(&mu, "unitary-side")?;
    Ok(invariants(&mg) == invariants(&mu))
}

/// `mu(det(x; x xi; ...; x xi^{n-1}))`.
pub fn transfer_factor(field: &LocalField, m: &MTriple) -> Result<CycValue> {
    let d = m.row_stack().det();
    if !d.is_invertible() {
        return Err(Error::Singular);
    }
    field.mu(&d)
}

/// Matching of the Lie-algebra triples `[A, x, y]` and `[A', z, beta^{-1} z*]`.
pub fn lie_match(a: &MTriple, a_prime: &MatE, z: &MatE, form: &SkewHermForm) -> Result<bool> {
    let u = MTriple::new(a_prime.clone(), z.clone(), form.beta_inv() * &z.conj_transpose())?;
    require_rss(a, "GL-side")?;
    require_rss(&u, "unitary-side")?;
    Ok(invariants(a) == invariants(&u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::{q, Algebra, MuAtP};

    fn inert() -> LocalField {
        LocalField::inert(3, 2).unwrap()
    }

    fn swap_example(alg: Algebra) -> MTriple {
        MTriple::new(
            MatE::from_ints(alg, &[&[0, 1], &[1, 0]]),
            MatE::from_ints(alg, &[&[1, 0]]),
            MatE::from_ints(alg, &[&[0], &[1]]),
        )
        .unwrap()
    }

    #[test]
    fn invariants_of_swap_example() {
        let f = inert();
        let m = swap_example(f.alg());
        let inv = invariants(&m);
        assert_eq!(inv.a, vec![f.f_int(0), f.f_int(-1)]);
        assert_eq!(inv.b, vec![f.f_int(0), f.f_int(1)]);
        assert!(is_rss_mtriple(&m));
        assert_eq!(transfer_factor(&f, &m).unwrap(), CycValue::one());
    }

    #[test]
    fn invariants_n1() {
        let f = inert();
        let e = |a, b| Ext::new(f.alg(), q(a), q(b));
        let m = MTriple::new(MatE::scalar(1, &e(2, 1)), MatE::scalar(1, &e(1, 1)), MatE::scalar(1, &e(3, 0))).unwrap();
        let inv = invariants(&m);
        assert_eq!(inv.a, vec![e(2, 1)]);
        assert_eq!(inv.b, vec![e(3, 3)]);
    }

    #[test]
    fn rss_failures() {
        let f = inert();
        let mut m = swap_example(f.alg());
        m.x = MatE::zeros(f.alg(), 1, 2);
        assert!(!is_rss_mtriple(&m));
        let mut m = swap_example(f.alg());
        m.xi = MatE::identity(f.alg(), 2);
        assert!(!is_rss_mtriple(&m));
    }

    #[test]
    fn transfer_factor_examples() {
        let f = inert();
        let one =
            MTriple::new(MatE::identity(f.alg(), 1), MatE::identity(f.alg(), 1), MatE::identity(f.alg(), 1)).unwrap();
        assert_eq!(transfer_factor(&f, &one).unwrap(), CycValue::one());
        let mut px = one.clone();
        px.x = MatE::scalar(1, &f.f_int(3));
        assert_eq!(transfer_factor(&f, &px).unwrap(), CycValue::from_int(-1));
        let mut zero = one;
        zero.x = MatE::zeros(f.alg(), 1, 1);
        assert!(transfer_factor(&f, &zero).is_err());
    }

    #[test]
    fn mtriple_images() {
        let f = inert();
        let s = f.j().clone();
        let g = GLOrbitRep::new(MatE::scalar(1, &s), MatE::scalar(1, &f.f_int(1)), MatE::scalar(1, &s)).unwrap();
        assert_eq!(gl_to_mtriple(&g).unwrap().xi, MatE::scalar(1, &f.f_int(-2)));
        let form = SkewHermForm::beta_plus(&f, 1);
        let z = MatE::scalar(1, &Ext::new(f.alg(), q(1), q(1)));
        let u = UOrbitRep::new(MatE::identity(f.alg(), 1), z.clone(), form).unwrap();
        let m = u_to_mtriple(&u);
        assert!(m.xi.is_identity());
        assert_eq!(m.y, &MatE::scalar(1, &s.inv().unwrap()) * &z.conj());
        assert!(GLOrbitRep::new(MatE::identity(f.alg(), 1), MatE::scalar(1, &s), MatE::scalar(1, &s)).is_err());

        let sp = LocalField::split(3, MuAtP::One).unwrap();
        let gs = MatE::scalar(1, &Ext::new(Algebra::Split, q(2), q(5)));
        let y = MatE::scalar(1, sp.j());
        let gr = GLOrbitRep::new(gs, MatE::identity(Algebra::Split, 1), y).unwrap();
        assert_eq!(gl_to_mtriple(&gr).unwrap().xi, MatE::scalar(1, &sp.f_int(10)));
    }

    #[test]
    fn degenerate_pairs_are_rejected() {
        let f = inert();
        let id = MatE::identity(f.alg(), 2);
        let x = MatE::from_ints(f.alg(), &[&[1, 0]]);
        let y = MatE::col_vector(f.alg(), vec![f.j().clone(), Ext::zero(f.alg())]);
        let g = GLOrbitRep::new(id.clone(), x.clone(), y).unwrap();
        let u = UOrbitRep::new(id, x, SkewHermForm::beta_plus(&f, 2)).unwrap();
        assert!(matches!(orbits_match(&g, &u), Err(Error::NotRss(_))));
    }
}
