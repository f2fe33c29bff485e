//! Seeded instance generation and verification campaigns.
//!
//! Every instance draws from its own ChaCha stream `(seed, index)`, so reports do not depend on
//! scheduling; instances run in parallel and are merged in index order.

mod gen;

pub use gen::{check_instance, gen_beta_minus_instance, gen_matched_pair, gen_split_pair, Bounds, Instance, Recipe};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::io::{
    cyc_to_json, group_fn_to_json, instance_to_json, lattice_fn_to_json, orb_result_to_json, SCHEMA_VERSION,
};
use crate::localfield::{q, CycValue, LocalField};
use crate::matalg::MatE;
use crate::orbint::{orb_gl_general, orb_gl_unramified, orb_u_general, orb_u_unramified, EngineOptions, OrbResult};
use crate::orbitspace::{gl_to_mtriple, transfer_factor};
use crate::schwartz::{fourier, frames, haar_integrate, split_transfer_pair, GroupFn, LatticeFn, Space};

pub(crate) fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Debug)]
pub struct CampaignParams {
    pub field: LocalField,
    pub n: usize,
    pub count: u64,
    pub seed: u64,
    pub bounds: Bounds,
    pub opts: EngineOptions,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseRecord {
    pub index: u64,
    pub verdict: Verdict,
    /// The GL-side value is nonzero, so the check is not satisfied by `0 = 0`.
    pub nontrivial: bool,
    pub detail: Value,
    /// Full instance and test data, kept for failures.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignReport {
    pub schema: u32,
    pub campaign: String,
    pub p: u64,
    pub n: usize,
    pub seed: u64,
    pub count: u64,
    pub passed: u64,
    pub failed: u64,
    pub inconclusive: u64,
    pub nontrivial: u64,
    pub cases: Vec<CaseRecord>,
}

impl CampaignReport {
    fn collect(campaign: &str, params: &CampaignParams, cases: Vec<CaseRecord>) -> Self {
        let tally = |v: Verdict| cases.iter().filter(|c| c.verdict == v).count() as u64;
        CampaignReport {
            schema: SCHEMA_VERSION,
            campaign: campaign.into(),
            p: params.field.p(),
            n: params.n,
            seed: params.seed,
            count: params.count,
            passed: tally(Verdict::Pass),
            failed: tally(Verdict::Fail),
            inconclusive: tally(Verdict::Inconclusive),
            nontrivial: cases.iter().filter(|c| c.nontrivial).count() as u64,
            cases,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.inconclusive == 0
    }

    /// 0 when every case passed, 1 on any failure, 2 when only inconclusive cases remain.
    pub fn exit_code(&self) -> i32 {
        if self.failed > 0 {
            1
        } else if self.inconclusive > 0 {
            2
        } else {
            0
        }
    }
}

fn run_cases(params: &CampaignParams, case: impl Fn(u64) -> CaseRecord + Sync + Send) -> Vec<CaseRecord> {
    if params.opts.parallel {
        (0..params.count).into_par_iter().map(case).collect()
    } else {
        (0..params.count).map(case).collect()
    }
}

fn inconclusive(index: u64, e: &Error) -> CaseRecord {
    CaseRecord {
        index,
        verdict: Verdict::Inconclusive,
        nontrivial: false,
        detail: json!({"error": e.to_string()}),
        dump: None,
    }
}

fn incomplete(r: &OrbResult) -> bool {
    !r.complete
}

/// Engines inside a campaign run sequentially; the campaign parallelizes over instances.
fn inner(opts: &EngineOptions) -> EngineOptions {
    EngineOptions { parallel: false, ..*opts }
}

/// `Orb_GL = Omega * Orb_U` on `beta^+`-matched pairs with unramified data.
pub fn verify_fl(params: &CampaignParams) -> Result<CampaignReport> {
    if params.field.is_split() {
        return Err(Error::InertOnly);
    }
    let opts = inner(&params.opts);
    let cases = run_cases(params, |index| {
        let run = || -> Result<CaseRecord> {
            let inst = gen_matched_pair(&params.field, params.n, params.seed, index, &params.bounds)?;
            let gl = orb_gl_unramified(&params.field, &inst.gl, &q(0), false, &opts)?;
            let u = orb_u_unramified(&params.field, &inst.u, &q(0), &opts)?;
            let omega = transfer_factor(&params.field, &gl_to_mtriple(&inst.gl)?)?;
            let lhs = gl.value.eval_at_one();
            let rhs = &omega * &u.value.eval_at_one();
            let verdict = if incomplete(&gl) || incomplete(&u) {
                Verdict::Inconclusive
            } else if lhs == rhs {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            let detail = json!({
                "gl": orb_result_to_json(&gl),
                "u": orb_result_to_json(&u),
                "transfer_factor": cyc_to_json(&omega),
            });
            let dump = (verdict == Verdict::Fail).then(|| instance_to_json(&inst));
            Ok(CaseRecord { index, verdict, nontrivial: !lhs.is_zero(), detail, dump })
        };
        run().unwrap_or_else(|e| inconclusive(index, &e))
    });
    Ok(CampaignReport::collect("verify-fl", params, cases))
}

/// `Orb_GL = 0` at `s = 1/2` on GL-side triples matching a `beta^-` unitary triple. The formal
/// Laurent polynomial itself need not vanish.
pub fn verify_vanishing(params: &CampaignParams) -> Result<CampaignReport> {
    if params.field.is_split() {
        return Err(Error::InertOnly);
    }
    let opts = inner(&params.opts);
    let cases = run_cases(params, |index| {
        let run = || -> Result<CaseRecord> {
            let inst = gen_beta_minus_instance(&params.field, params.n, params.seed, index, &params.bounds)?;
            let gl = orb_gl_unramified(&params.field, &inst.gl, &q(0), true, &opts)?;
            let verdict = if incomplete(&gl) {
                Verdict::Inconclusive
            } else if gl.value.eval_at_one().is_zero() {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            // lattices were actually counted and cancelled
            let nontrivial = gl.enumerated > 0;
            let dump = (verdict == Verdict::Fail).then(|| instance_to_json(&inst));
            Ok(CaseRecord { index, verdict, nontrivial, detail: json!({"gl": orb_result_to_json(&gl)}), dump })
        };
        run().unwrap_or_else(|e| inconclusive(index, &e))
    });
    Ok(CampaignReport::collect("verify-vanishing", params, cases))
}

/// Finite test data for the split comparison.
#[derive(Clone, Debug)]
pub struct SplitData {
    pub f1: GroupFn,
    pub f2: GroupFn,
    pub phi1: LatticeFn,
    pub phi2: LatticeFn,
}

fn random_group_fn(field: &LocalField, rng: &mut ChaCha8Rng, n: usize, level: u32) -> Result<GroupFn> {
    let reps = frames(field, n, level, true);
    let terms = if level == 0 { 1 } else { rng.gen_range(1..=3) };
    let entries = (0..terms)
        .map(|_| {
            let g: MatE = reps[rng.gen_range(0..reps.len())].clone();
            (g, CycValue::from_int(rng.gen_range(1..=3)))
        })
        .collect();
    GroupFn::new(field, n, level, true, entries)
}

fn random_lattice_fn(rng: &mut ChaCha8Rng, n: usize, p: u64, m: i64, k: i64) -> Result<LatticeFn> {
    let mut f = LatticeFn::zero(Space::FRow, n, p, m, k)?;
    for v in f.table_mut() {
        *v = CycValue::from_int(rng.gen_range(-2..=2));
    }
    Ok(f)
}

/// Random `f_1, f_2` of level at most 1 and `phi_1, phi_2` inside a common shape `(m, k)` with
/// `m + k` at most `2 / n`, which keeps the coset level of both engines at most `2 / n`.
pub fn gen_split_data(field: &LocalField, n: usize, seed: u64, index: u64) -> Result<SplitData> {
    // a separate stream from the orbit generator
    let mut rng = rng_for(seed ^ 0x5eed_da7a, index);
    let p = field.p();
    let budget = if n == 1 { 2 } else { 1 };
    let m = rng.gen_range(0..=budget);
    let k = rng.gen_range(0..=budget - m);
    let (m1, k1) = (rng.gen_range(0..=m), rng.gen_range(0..=k));
    let (m2, k2) = (rng.gen_range(0..=m), rng.gen_range(0..=k));
    let l1 = rng.gen_range(0..=1);
    let l2 = rng.gen_range(0..=1);
    Ok(SplitData {
        f1: random_group_fn(field, &mut rng, n, l1)?,
        f2: random_group_fn(field, &mut rng, n, l2)?,
        phi1: random_lattice_fn(&mut rng, n, p, m1, k1)?,
        phi2: random_lattice_fn(&mut rng, n, p, m2, k2)?,
    })
}

/// Both sides of the split-place comparison for one instance.
pub fn split_sides(
    field: &LocalField,
    inst: &Instance,
    data: &SplitData,
    opts: &EngineOptions,
) -> Result<(OrbResult, OrbResult)> {
    let (ftilde, phi) = split_transfer_pair(field, &data.f1, &data.f2, &data.phi1, &data.phi2)?;
    let gl = orb_gl_general(field, &inst.gl, &ftilde, &phi, false, opts)?;
    let f = GroupFn::tensor_split(field, &data.f1, &data.f2)?;
    let u = orb_u_general(field, &inst.u, &f, &data.phi1, &data.phi2, opts)?;
    Ok((gl, u))
}

/// `Orb_GL(f~', phi') = Orb_U(f, phi_1 (x) phi_2)` for the split matched test functions.
pub fn verify_split_transfer(params: &CampaignParams) -> Result<CampaignReport> {
    if !params.field.is_split() {
        return Err(Error::SplitOnly);
    }
    let opts = inner(&params.opts);
    let cases = run_cases(params, |index| {
        let run = || -> Result<CaseRecord> {
            let inst = gen_split_pair(&params.field, params.n, params.seed, index, &params.bounds)?;
            let data = gen_split_data(&params.field, params.n, params.seed, index)?;
            let (gl, u) = split_sides(&params.field, &inst, &data, &opts)?;
            let lhs = gl.value.eval_at_one();
            let verdict = if lhs == u.value.eval_at_one() { Verdict::Pass } else { Verdict::Fail };
            let dump = (verdict == Verdict::Fail).then(|| {
                json!({
                    "instance": instance_to_json(&inst),
                    "f1": group_fn_to_json(&data.f1),
                    "f2": group_fn_to_json(&data.f2),
                    "phi1": lattice_fn_to_json(&data.phi1),
                    "phi2": lattice_fn_to_json(&data.phi2),
                })
            });
            let detail = json!({"gl": orb_result_to_json(&gl), "u": orb_result_to_json(&u)});
            Ok(CaseRecord { index, verdict, nontrivial: !lhs.is_zero(), detail, dump })
        };
        run().unwrap_or_else(|e| inconclusive(index, &e))
    });
    Ok(CampaignReport::collect("verify-split", params, cases))
}

/// Fourier inversion `F F phi = phi(-.)` and Plancherel on random functions on `F_n`, `n <= 2`,
/// with table size at most `p^6`.
pub fn fourier_selftest(field: &LocalField, seed: u64, count: u64) -> Result<CampaignReport> {
    let p = field.p();
    let mut shapes = Vec::new();
    for n in 1..=2usize {
        for m in -1..=2i64 {
            for k in -1..=2i64 {
                if m + k >= 0 && (m + k) as usize * n <= 6 {
                    shapes.push((n, m, k));
                }
            }
        }
    }
    let params = CampaignParams {
        field: field.clone(),
        n: 0,
        count,
        seed,
        bounds: Bounds::default(),
        opts: EngineOptions::default(),
    };
    let cases = run_cases(&params, |index| {
        let (n, m, k) = shapes[index as usize % shapes.len()];
        let run = || -> Result<CaseRecord> {
            let mut rng = rng_for(seed, index);
            let mut f = LatticeFn::zero(Space::FRow, n, p, m, k)?;
            for v in f.table_mut() {
                *v = &CycValue::from_int(rng.gen_range(-3..=3))
                    + &CycValue::root_of_unity(p, rng.gen_range(0..p as i64));
            }
            let hat = fourier(&f)?;
            let inversion = fourier(&hat)? == f.reflect();
            let norm = |g: &LatticeFn| haar_integrate(&g.map_values(|v| v * &v.conj()));
            let plancherel = norm(&f) == norm(&hat);
            let verdict = if inversion && plancherel { Verdict::Pass } else { Verdict::Fail };
            let detail = json!({"n": n, "m": m, "k": k, "inversion": inversion, "plancherel": plancherel});
            Ok(CaseRecord { index, verdict, nontrivial: !f.is_zero(), detail, dump: None })
        };
        run().unwrap_or_else(|e| inconclusive(index, &e))
    });
    Ok(CampaignReport::collect("fourier-selftest", &params, cases))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::MuAtP;
    use rand::RngCore;

    #[test]
    fn streams_are_independent_and_reproducible() {
        assert_eq!(rng_for(5, 3).next_u64(), rng_for(5, 3).next_u64());
        assert_ne!(rng_for(5, 3).next_u64(), rng_for(5, 4).next_u64());
        assert_ne!(rng_for(5, 3).next_u64(), rng_for(6, 3).next_u64());
    }

    #[test]
    fn exit_codes_follow_the_worst_verdict() {
        let field = LocalField::inert_default(3).unwrap();
        let params = CampaignParams {
            field,
            n: 1,
            count: 3,
            seed: 0,
            bounds: Bounds::default(),
            opts: EngineOptions::default(),
        };
        let case = |index, verdict| CaseRecord { index, verdict, nontrivial: false, detail: Value::Null, dump: None };
        let report = |vs: &[Verdict]| {
            CampaignReport::collect("t", &params, vs.iter().enumerate().map(|(i, v)| case(i as u64, *v)).collect())
        };
        assert_eq!(report(&[Verdict::Pass, Verdict::Pass]).exit_code(), 0);
        assert_eq!(report(&[Verdict::Pass, Verdict::Inconclusive]).exit_code(), 2);
        assert_eq!(report(&[Verdict::Inconclusive, Verdict::Fail]).exit_code(), 1);
    }

    #[test]
    fn parallel_and_sequential_reports_agree() {
        let field = LocalField::inert_default(3).unwrap();
        let mut params = CampaignParams {
            field,
            n: 1,
            count: 12,
            seed: 4,
            bounds: Bounds::default(),
            opts: EngineOptions::default(),
        };
        let par = verify_fl(&params).unwrap();
        params.opts = EngineOptions::sequential();
        assert_eq!(par, verify_fl(&params).unwrap());
        assert!(par.all_passed());
    }

    #[test]
    fn campaigns_reject_the_wrong_place() {
        let inert = LocalField::inert_default(3).unwrap();
        let split = LocalField::split(3, MuAtP::One).unwrap();
        let params = |field| CampaignParams {
            field,
            n: 1,
            count: 1,
            seed: 0,
            bounds: Bounds::default(),
            opts: EngineOptions::default(),
        };
        assert!(verify_split_transfer(&params(inert)).is_err());
        assert!(verify_fl(&params(split)).is_err());
    }

    #[test]
    fn split_data_respects_the_shape_bound() {
        let field = LocalField::split(3, MuAtP::One).unwrap();
        for index in 0..20 {
            let data = gen_split_data(&field, 2, 1, index).unwrap();
            for phi in [&data.phi1, &data.phi2] {
                assert!(phi.m() + phi.k() <= 1);
            }
        }
    }

    #[test]
    fn fourier_selftest_passes() {
        let field = LocalField::inert_default(3).unwrap();
        let report = fourier_selftest(&field, 1, 12).unwrap();
        assert_eq!(report.passed, 12);
    }
}
