//! Orbital integrals: lattice counts for the unramified data and finite coset sums for general
//! finite-model test functions.

mod general;
pub mod lattice;
mod unramified;

pub use general::{orb_gl_general, orb_u_general};
pub use unramified::{orb_gl_unramified, orb_u_unramified};

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::localfield::{p_pow, LaurentValue};
use crate::matalg::MatE;
use crate::orbitspace::MTriple;

use lattice::Sandwich;

/// Default cap on the number of lattices or cosets an engine examines.
pub const DEFAULT_BUDGET: u64 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbResult {
    pub value: LaurentValue,
    /// Lattices or cosets with a nonzero contribution.
    pub enumerated: u64,
    /// Length of the sandwich `L_min <= L_max` that bounds the enumeration.
    pub bound_used: u32,
    pub complete: bool,
}

impl OrbResult {
    fn empty(bound_used: u32) -> Self {
        OrbResult { value: LaurentValue::zero(), enumerated: 0, bound_used, complete: true }
    }

    fn over_budget(bound_used: u32) -> Self {
        OrbResult { value: LaurentValue::zero(), enumerated: 0, bound_used, complete: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineOptions {
    pub budget: u64,
    pub parallel: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { budget: DEFAULT_BUDGET, parallel: true }
    }
}

impl EngineOptions {
    pub fn sequential() -> Self {
        EngineOptions { parallel: false, ..Default::default() }
    }

    fn admits(&self, candidates: &BigInt) -> bool {
        *candidates <= BigInt::from(self.budget)
    }
}

/// Runs `f` on every item, in parallel when allowed, keeping the input order.
fn map_items<T: Sync, R: Send>(
    opts: &EngineOptions,
    items: &[T],
    f: impl Fn(&T) -> Result<R> + Sync + Send,
) -> Result<Vec<R>> {
    if opts.parallel {
        items.par_iter().map(f).collect()
    } else {
        items.iter().map(f).collect()
    }
}

/// Lattices `L` over `O_F` with `p^k <y, delta y, ...> <= L <= p^{-m} {v : x delta^i v in O}`.
fn gl_sandwich(delta: &MatE, x: &MatE, y: &MatE, m: i64, k: i64, p: u64) -> Result<Option<Sandwich>> {
    let t = MTriple::new(delta.clone(), x.clone(), y.clone())?;
    let rows = t.row_stack();
    if !rows.is_invertible() || !t.col_stack().is_invertible() {
        return Err(Error::NotRss("degenerate vector pair".into()));
    }
    let outer = rows.inverse()?.scale_f(&p_pow(p, -m));
    let lower = t.col_stack().scale_f(&p_pow(p, k));
    Sandwich::new(outer, &lower, p)
}

/// `H^{-1} delta H` integral, i.e. `delta H O^n <= H O^n`.
fn is_stable(delta: &MatE, h: &MatE, p: u64) -> Result<bool> {
    Ok((&(&h.inverse()? * delta) * h).is_integral(p))
}
