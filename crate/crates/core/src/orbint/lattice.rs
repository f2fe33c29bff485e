//! Hermite bases of sublattices and the per-instance sandwich `L_min <= L <= L_max`.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::localfield::{p_pow, q, rational, Algebra, Ext, Val};
use crate::matalg::MatE;

/// Compositions of `s` into `n` non-negative parts.
fn compositions(s: u32, n: usize) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![s]];
    }
    (0..=s)
        .flat_map(|first| {
            compositions(s - first, n - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// Number of sublattices of index `q^s` in `O^n`, with `q` the residue field size.
pub fn count_sublattices(q: u64, n: usize, s: u32) -> BigInt {
    compositions(s, n)
        .iter()
        .map(|a| {
            a.iter().enumerate().fold(BigInt::one(), |acc, (i, &ai)| acc * BigInt::from(q).pow(ai * (n - 1 - i) as u32))
        })
        .sum()
}

/// Upper-triangular bases with diagonal `p^{a_i}` and entries right of the diagonal in row `i`
/// reduced modulo `p^{a_i}`; one per sublattice of `O^n` (`O = O_E` unless `over_f`) of index `q^s`.
pub fn hermite_bases(alg: Algebra, p: u64, n: usize, s: u32, over_f: bool) -> Vec<MatE> {
    let mut out = Vec::new();
    for a in compositions(s, n) {
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
        let choices: Vec<Vec<Ext>> = slots
            .iter()
            .map(|&(i, _)| {
                let m = rational::u64_pow(p, a[i]) as i64;
                if over_f || m == 1 {
                    (0..m).map(|r| Ext::from_f(alg, q(r))).collect()
                } else {
                    (0..m).flat_map(|r| (0..m).map(move |t| Ext::new(alg, q(r), q(t)))).collect()
                }
            })
            .collect();
        let total: usize = choices.iter().map(Vec::len).product();
        for mut idx in 0..total {
            let mut m = MatE::zeros(alg, n, n);
            for (i, &ai) in a.iter().enumerate() {
                m.set(i, i, Ext::from_f(alg, p_pow(p, ai as i64)));
            }
            for (slot, c) in slots.iter().zip(&choices) {
                m.set(slot.0, slot.1, c[idx % c.len()].clone());
                idx /= c.len();
            }
            out.push(m);
        }
    }
    out
}

/// `L_max = outer O^n` and `L_min = outer inner O^n` with `inner` integral of determinant
/// valuation `depth`; every lattice of interest is `outer M O^n` with `M` a Hermite basis of
/// index at most `depth` containing `inner`.
#[derive(Clone, Debug)]
pub struct Sandwich {
    pub outer: MatE,
    pub inner: MatE,
    pub depth: u32,
}

impl Sandwich {
    /// Both bases square and invertible; `None` when `L_min` is not inside `L_max`.
    pub fn new(outer: MatE, lower: &MatE, p: u64) -> Result<Option<Sandwich>> {
        let inner = &outer.inverse()? * lower;
        if !inner.is_integral(p) {
            return Ok(None);
        }
        let d = inner.det();
        let depth = match d.valuation(p).min() {
            Val::Fin(v) => v,
            Val::Inf => return Err(Error::Singular),
        };
        Ok(Some(Sandwich { outer, inner, depth: depth as u32 }))
    }

    /// Hermite bases `M` in the sandwich, i.e. with `M^{-1} inner` integral.
    pub fn lattices(&self, p: u64, over_f: bool, exact_index: Option<u32>) -> Result<Vec<MatE>> {
        let n = self.outer.rows();
        let range: Vec<u32> = match exact_index {
            Some(s) => vec![s],
            None => (0..=self.depth).collect(),
        };
        let mut out = Vec::new();
        for s in range {
            for m in hermite_bases(self.outer.alg(), p, n, s, over_f) {
                if (&m.inverse()? * &self.inner).is_integral(p) {
                    out.push(m);
                }
            }
        }
        Ok(out)
    }

    /// Number of Hermite bases examined by [`Sandwich::lattices`].
    pub fn candidates(&self, q: u64, exact_index: Option<u32>) -> BigInt {
        let n = self.outer.rows();
        match exact_index {
            Some(s) => count_sublattices(q, n, s),
            None => (0..=self.depth).map(|s| count_sublattices(q, n, s)).sum(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_counts_match_formula() {
        let alg = Algebra::Split;
        for s in 0..4 {
            let bases = hermite_bases(alg, 3, 2, s, true);
            assert_eq!(BigInt::from(bases.len()), count_sublattices(3, 2, s));
            // 1 + p + ... + p^s sublattices of index p^s in Z_p^2
            assert_eq!(bases.len() as u64, (3u64.pow(s + 1) - 1) / 2);
        }
        let e = Algebra::Inert { eps: 2 };
        assert_eq!(hermite_bases(e, 3, 2, 1, false).len(), 10);
    }

    #[test]
    fn hermite_bases_are_distinct_lattices() {
        let alg = Algebra::Split;
        let bases = hermite_bases(alg, 2, 2, 2, true);
        for (i, a) in bases.iter().enumerate() {
            for b in &bases[i + 1..] {
                let t = &a.inverse().unwrap() * b;
                assert!(!(t.is_integral(2) && t.det().is_unit(2)), "{a} and {b} span the same lattice");
            }
        }
    }

    #[test]
    fn sandwich_between_scalar_lattices() {
        let alg = Algebra::Split;
        let outer = MatE::identity(alg, 2);
        let lower = MatE::scalar(2, &Ext::from_int(alg, 3));
        let s = Sandwich::new(outer, &lower, 3).unwrap().unwrap();
        assert_eq!(s.depth, 2);
        // lattices between 3 Z_3^2 and Z_3^2: 1 + 4 + 1
        assert_eq!(s.lattices(3, true, None).unwrap().len(), 6);
        let none = Sandwich::new(MatE::scalar(2, &Ext::from_int(alg, 3)), &MatE::identity(alg, 2), 3).unwrap();
        assert!(none.is_none());
    }
}
