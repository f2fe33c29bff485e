//! JSON encodings of field configurations, matrices, orbit representatives, test functions and
//! results. Rationals are strings `"n"` or `"n/d"`; elements of `E` are `{"a", "b"}` (inert) or
//! `{"l", "r"}` (split); cyclotomic values are `{"order", "coeffs"}`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::harness::{Bounds, Instance, Recipe};
use crate::localfield::{rational, Algebra, CycValue, Ext, LaurentValue, LocalField, MuAtP, Q};
use crate::matalg::{MatE, SkewHermForm};
use crate::orbint::OrbResult;
use crate::orbitspace::{gl_to_mtriple, u_to_mtriple, GLOrbitRep, Invariants, MTriple, UOrbitRep};
use crate::schwartz::{GroupFn, LatticeFn, Space};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest cyclotomic order accepted from input.
pub const MAX_ORDER: u64 = 4096;
/// Largest matrix side accepted from input.
pub const MAX_DIM: usize = 8;
/// Largest table a parsed Schwartz function may have.
pub const MAX_PARSED_TABLE: u64 = 1 << 16;

fn bad(path: &str, what: &str) -> Error {
    Error::Parse(format!("{path}: {what}"))
}

fn field_of<'a>(v: &'a Value, path: &str, key: &str) -> Result<&'a Value> {
    v.as_object()
        .ok_or_else(|| bad(path, "expected an object"))?
        .get(key)
        .ok_or_else(|| bad(path, &format!("missing field {key:?}")))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(path, "expected an array"))
}

fn uint(v: &Value, path: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| bad(path, "expected a non-negative integer"))
}

fn sint(v: &Value, path: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| bad(path, "expected an integer"))
}

/// Parses JSON text, reporting line and column on syntax errors.
pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))
}

pub fn q_to_json(x: &Q) -> Value {
    Value::String(rational::fmt_q(x))
}

pub fn q_from_json(v: &Value, path: &str) -> Result<Q> {
    match v {
        Value::String(s) => rational::parse_q(s).map_err(|e| bad(path, &e.to_string())),
        Value::Number(n) => n
            .as_i64()
            .map(|i| Q::from_integer(i.into()))
            .ok_or_else(|| bad(path, "expected an integer or a rational string")),
        _ => Err(bad(path, "expected a rational")),
    }
}

pub fn ext_to_json(x: &Ext) -> Value {
    match x.alg {
        Algebra::Inert { .. } => json!({"a": q_to_json(&x.a), "b": q_to_json(&x.b)}),
        Algebra::Split => json!({"l": q_to_json(&x.a), "r": q_to_json(&x.b)}),
    }
}

pub fn ext_from_json(alg: Algebra, v: &Value, path: &str) -> Result<Ext> {
    if let Ok(x) = q_from_json(v, path) {
        return Ok(Ext::from_f(alg, x));
    }
    let (ka, kb) = match alg {
        Algebra::Inert { .. } => ("a", "b"),
        Algebra::Split => ("l", "r"),
    };
    let a = q_from_json(field_of(v, path, ka)?, &format!("{path}.{ka}"))?;
    let b = q_from_json(field_of(v, path, kb)?, &format!("{path}.{kb}"))?;
    Ok(Ext::new(alg, a, b))
}

pub fn mat_to_json(m: &MatE) -> Value {
    let rows: Vec<Value> = m.to_rows().iter().map(|r| Value::Array(r.iter().map(ext_to_json).collect())).collect();
    json!({"n": m.rows(), "entries": rows})
}

pub fn mat_from_json(alg: Algebra, v: &Value, path: &str) -> Result<MatE> {
    let rows = array(field_of(v, path, "entries")?, &format!("{path}.entries"))?;
    if rows.is_empty() || rows.len() > MAX_DIM {
        return Err(bad(path, "matrix must have between 1 and 8 rows"));
    }
    let mut out = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let rp = format!("{path}.entries[{i}]");
        let cells = array(r, &rp)?;
        if cells.is_empty() || cells.len() > MAX_DIM {
            return Err(bad(&rp, "row must have between 1 and 8 entries"));
        }
        out.push(
            cells
                .iter()
                .enumerate()
                .map(|(j, c)| ext_from_json(alg, c, &format!("{rp}[{j}]")))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    if let Some(n) = v.get("n") {
        if uint(n, &format!("{path}.n"))? as usize != out.len() {
            return Err(bad(path, "\"n\" disagrees with the number of rows"));
        }
    }
    MatE::from_rows(alg, out).map_err(|e| bad(path, &e.to_string()))
}

fn square(alg: Algebra, v: &Value, path: &str) -> Result<MatE> {
    let m = mat_from_json(alg, v, path)?;
    if !m.is_square() {
        return Err(bad(path, "expected a square matrix"));
    }
    Ok(m)
}

pub fn cyc_to_json(c: &CycValue) -> Value {
    json!({"order": c.order(), "coeffs": c.coeffs().iter().map(q_to_json).collect::<Vec<_>>()})
}

pub fn cyc_from_json(v: &Value, path: &str) -> Result<CycValue> {
    if let Ok(x) = q_from_json(v, path) {
        return Ok(CycValue::rational(x));
    }
    let order = uint(field_of(v, path, "order")?, &format!("{path}.order"))?;
    if order == 0 || order > MAX_ORDER {
        return Err(bad(path, "order must lie in 1..=4096"));
    }
    let coeffs = array(field_of(v, path, "coeffs")?, &format!("{path}.coeffs"))?;
    if coeffs.len() as u64 > order {
        return Err(bad(path, "more coefficients than the order"));
    }
    let cs = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| q_from_json(c, &format!("{path}.coeffs[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Ok(CycValue::from_coeffs(order, cs))
}

pub fn laurent_to_json(l: &LaurentValue) -> Value {
    let terms: Vec<Value> = l.terms().map(|(e, c)| json!({"exp": e, "coeff": cyc_to_json(c)})).collect();
    json!({"terms": terms, "at_one": cyc_to_json(&l.eval_at_one())})
}

pub fn laurent_from_json(v: &Value, path: &str) -> Result<LaurentValue> {
    let mut out = LaurentValue::zero();
    for (i, t) in array(field_of(v, path, "terms")?, &format!("{path}.terms"))?.iter().enumerate() {
        let tp = format!("{path}.terms[{i}]");
        let e = sint(field_of(t, &tp, "exp")?, &format!("{tp}.exp"))?;
        out.add_term(e, &cyc_from_json(field_of(t, &tp, "coeff")?, &format!("{tp}.coeff"))?);
    }
    Ok(out)
}

/// The local configuration as it appears in config files.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub p: u64,
    #[serde(default)]
    pub split: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_p: Option<MuAtP>,
}

impl FieldConfig {
    pub fn of(field: &LocalField) -> Self {
        FieldConfig {
            p: field.p(),
            split: field.is_split(),
            epsilon: field.epsilon(),
            j: Some(ext_to_json(field.j())),
            mu_p: Some(field.mu_p()),
        }
    }

    pub fn build(&self) -> Result<LocalField> {
        let base = if self.split {
            if self.epsilon.is_some() {
                return Err(Error::Config("epsilon only applies to inert configurations".into()));
            }
            LocalField::split(self.p, self.mu_p.unwrap_or(MuAtP::One))?
        } else {
            match self.epsilon {
                Some(eps) => LocalField::inert(self.p, eps)?,
                None => LocalField::inert_default(self.p)?,
            }
        };
        let j = match &self.j {
            Some(v) => ext_from_json(base.alg(), v, "j")?,
            None => base.j().clone(),
        };
        LocalField::new(self.p, base.alg(), j, self.mu_p.unwrap_or(base.mu_p()))
    }
}

/// A config file: the field plus campaign parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub p: u64,
    #[serde(default)]
    pub split: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_p: Option<MuAtP>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub bounds: Bounds,
}

fn default_n() -> usize {
    1
}

impl RunConfig {
    pub fn field(&self) -> FieldConfig {
        FieldConfig { p: self.p, split: self.split, epsilon: self.epsilon, j: self.j.clone(), mu_p: self.mu_p }
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    if !(1..=MAX_DIM).contains(&cfg.n) {
        return Err(Error::Config(format!("n = {} is out of range", cfg.n)));
    }
    cfg.field().build()?;
    Ok(cfg)
}

fn field_from(v: &Value, path: &str) -> Result<LocalField> {
    let cfg: FieldConfig = serde_json::from_value(v.clone()).map_err(|e| bad(path, &e.to_string()))?;
    cfg.build().map_err(|e| bad(path, &e.to_string()))
}

pub fn gl_rep_to_json(r: &GLOrbitRep) -> Value {
    json!({"gamma": mat_to_json(&r.gamma), "x": mat_to_json(&r.x), "y": mat_to_json(&r.y)})
}

pub fn gl_rep_from_json(alg: Algebra, v: &Value, path: &str) -> Result<GLOrbitRep> {
    let gamma = square(alg, field_of(v, path, "gamma")?, &format!("{path}.gamma"))?;
    let x = mat_from_json(alg, field_of(v, path, "x")?, &format!("{path}.x"))?;
    let y = mat_from_json(alg, field_of(v, path, "y")?, &format!("{path}.y"))?;
    GLOrbitRep::new(gamma, x, y).map_err(|e| bad(path, &e.to_string()))
}

pub fn u_rep_to_json(r: &UOrbitRep) -> Value {
    json!({"zeta": mat_to_json(&r.zeta), "z": mat_to_json(&r.z), "beta": mat_to_json(r.form.beta())})
}

/// `beta` defaults to `j I` when absent.
pub fn u_rep_from_json(field: &LocalField, v: &Value, path: &str) -> Result<UOrbitRep> {
    let alg = field.alg();
    let zeta = square(alg, field_of(v, path, "zeta")?, &format!("{path}.zeta"))?;
    let z = mat_from_json(alg, field_of(v, path, "z")?, &format!("{path}.z"))?;
    let form = match v.get("beta") {
        Some(b) => {
            SkewHermForm::new(square(alg, b, &format!("{path}.beta"))?).map_err(|e| bad(path, &e.to_string()))?
        }
        None => SkewHermForm::beta_plus(field, zeta.rows()),
    };
    UOrbitRep::new(zeta, z, form).map_err(|e| bad(path, &e.to_string()))
}

pub fn mtriple_to_json(m: &MTriple) -> Value {
    json!({"xi": mat_to_json(&m.xi), "x": mat_to_json(&m.x), "y": mat_to_json(&m.y)})
}

pub fn mtriple_from_json(alg: Algebra, v: &Value, path: &str) -> Result<MTriple> {
    let xi = square(alg, field_of(v, path, "xi")?, &format!("{path}.xi"))?;
    let x = mat_from_json(alg, field_of(v, path, "x")?, &format!("{path}.x"))?;
    let y = mat_from_json(alg, field_of(v, path, "y")?, &format!("{path}.y"))?;
    MTriple::new(xi, x, y).map_err(|e| bad(path, &e.to_string()))
}

/// A triple given directly (`xi`), as a GL-side representative (`gamma`) or as a unitary one (`zeta`).
pub fn any_triple_from_json(field: &LocalField, v: &Value, path: &str) -> Result<MTriple> {
    if v.get("xi").is_some() {
        mtriple_from_json(field.alg(), v, path)
    } else if v.get("gamma").is_some() {
        gl_to_mtriple(&gl_rep_from_json(field.alg(), v, path)?).map_err(|e| bad(path, &e.to_string()))
    } else if v.get("zeta").is_some() {
        Ok(u_to_mtriple(&u_rep_from_json(field, v, path)?))
    } else {
        Err(bad(path, "expected a triple with \"xi\", \"gamma\" or \"zeta\""))
    }
}

pub fn invariants_to_json(inv: &Invariants) -> Value {
    json!({"a": inv.a.iter().map(ext_to_json).collect::<Vec<_>>(), "b": inv.b.iter().map(ext_to_json).collect::<Vec<_>>()})
}

pub fn instance_to_json(inst: &Instance) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "config": FieldConfig::of(&inst.field),
        "recipe": inst.recipe,
        "seed": inst.seed,
        "index": inst.index,
        "d": q_to_json(&inst.d),
        "gl": gl_rep_to_json(&inst.gl),
        "u": u_rep_to_json(&inst.u),
    })
}

pub fn instance_from_json(v: &Value) -> Result<Instance> {
    check_schema(v)?;
    let field = field_from(field_of(v, "$", "config")?, "$.config")?;
    let recipe: Recipe =
        serde_json::from_value(field_of(v, "$", "recipe")?.clone()).map_err(|e| bad("$.recipe", &e.to_string()))?;
    Ok(Instance {
        gl: gl_rep_from_json(field.alg(), field_of(v, "$", "gl")?, "$.gl")?,
        u: u_rep_from_json(&field, field_of(v, "$", "u")?, "$.u")?,
        d: q_from_json(field_of(v, "$", "d")?, "$.d")?,
        seed: uint(field_of(v, "$", "seed")?, "$.seed")?,
        index: uint(field_of(v, "$", "index")?, "$.index")?,
        recipe,
        field,
    })
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    instance_from_json(&parse_json(text)?)
}

fn check_schema(v: &Value) -> Result<()> {
    match v.get("schema") {
        None => Ok(()),
        Some(s) if s.as_u64() == Some(u64::from(SCHEMA_VERSION)) => Ok(()),
        Some(s) => Err(bad("$.schema", &format!("unsupported schema version {s}"))),
    }
}

pub fn lattice_fn_to_json(f: &LatticeFn) -> Value {
    let entries: Vec<Value> = f
        .entries()
        .iter()
        .map(|(pt, v)| json!({"rep": pt.iter().map(q_to_json).collect::<Vec<_>>(), "val": cyc_to_json(v)}))
        .collect();
    json!({"space": f.space(), "n": f.n(), "p": f.p(), "m": f.m(), "k": f.k(), "entries": entries})
}

pub fn lattice_fn_from_json(v: &Value, path: &str) -> Result<LatticeFn> {
    let space: Space =
        serde_json::from_value(field_of(v, path, "space")?.clone()).map_err(|e| bad(path, &e.to_string()))?;
    let n = uint(field_of(v, path, "n")?, &format!("{path}.n"))? as usize;
    let p = uint(field_of(v, path, "p")?, &format!("{path}.p"))?;
    let m = sint(field_of(v, path, "m")?, &format!("{path}.m"))?;
    let k = sint(field_of(v, path, "k")?, &format!("{path}.k"))?;
    if !(1..=MAX_DIM).contains(&n) || !crate::localfield::is_prime(p) || p > 1 << 20 || m.abs() > 64 || k.abs() > 64 {
        return Err(bad(path, "n, p, m or k out of range"));
    }
    let cells =
        u32::try_from(m + k).ok().and_then(|e| p.checked_pow(e)).and_then(|s| s.checked_pow(space.dim(n) as u32));
    if !cells.is_some_and(|c| c <= MAX_PARSED_TABLE) {
        return Err(bad(path, "support and depth give an empty or oversized table"));
    }
    let mut entries = Vec::new();
    for (i, e) in array(field_of(v, path, "entries")?, &format!("{path}.entries"))?.iter().enumerate() {
        let ep = format!("{path}.entries[{i}]");
        let rep = array(field_of(e, &ep, "rep")?, &format!("{ep}.rep"))?
            .iter()
            .map(|c| q_from_json(c, &format!("{ep}.rep")))
            .collect::<Result<Vec<_>>>()?;
        if rep.len() != space.dim(n) {
            return Err(bad(&ep, "representative has the wrong length"));
        }
        entries.push((rep, cyc_from_json(field_of(e, &ep, "val")?, &format!("{ep}.val"))?));
    }
    LatticeFn::from_entries(space, n, p, m, k, &entries).map_err(|e| bad(path, &e.to_string()))
}

pub fn parse_lattice_fn(text: &str) -> Result<LatticeFn> {
    lattice_fn_from_json(&parse_json(text)?, "$")
}

pub fn group_fn_to_json(f: &GroupFn) -> Value {
    let entries: Vec<Value> =
        f.entries().iter().map(|(g, v)| json!({"rep": mat_to_json(g), "val": cyc_to_json(v)})).collect();
    json!({"n": f.n(), "level": f.level(), "over_f": f.over_f(), "entries": entries})
}

pub fn group_fn_from_json(field: &LocalField, v: &Value, path: &str) -> Result<GroupFn> {
    let n = uint(field_of(v, path, "n")?, &format!("{path}.n"))? as usize;
    let level = uint(field_of(v, path, "level")?, &format!("{path}.level"))?;
    let over_f = field_of(v, path, "over_f")?.as_bool().ok_or_else(|| bad(path, "over_f must be a boolean"))?;
    if !(1..=MAX_DIM).contains(&n) || level > 8 {
        return Err(bad(path, "n or level out of range"));
    }
    let mut entries = Vec::new();
    for (i, e) in array(field_of(v, path, "entries")?, &format!("{path}.entries"))?.iter().enumerate() {
        let ep = format!("{path}.entries[{i}]");
        let g = square(field.alg(), field_of(e, &ep, "rep")?, &format!("{ep}.rep"))?;
        entries.push((g, cyc_from_json(field_of(e, &ep, "val")?, &format!("{ep}.val"))?));
    }
    GroupFn::new(field, n, level as u32, over_f, entries).map_err(|e| bad(path, &e.to_string()))
}

pub fn orb_result_to_json(r: &OrbResult) -> Value {
    json!({
        "value": laurent_to_json(&r.value),
        "enumerated": r.enumerated,
        "bound_used": r.bound_used,
        "complete": r.complete,
    })
}

pub fn orb_result_from_json(v: &Value, path: &str) -> Result<OrbResult> {
    Ok(OrbResult {
        value: laurent_from_json(field_of(v, path, "value")?, &format!("{path}.value"))?,
        enumerated: uint(field_of(v, path, "enumerated")?, &format!("{path}.enumerated"))?,
        bound_used: u32::try_from(uint(field_of(v, path, "bound_used")?, &format!("{path}.bound_used"))?)
            .map_err(|_| bad(path, "bound_used out of range"))?,
        complete: field_of(v, path, "complete")?.as_bool().ok_or_else(|| bad(path, "complete must be a boolean"))?,
    })
}

/// Reads the field configuration embedded in a document under `"config"`, or the document itself.
pub fn field_in(v: &Value) -> Result<LocalField> {
    match v.get("config") {
        Some(c) => field_from(c, "$.config"),
        None => {
            let mut m = Map::new();
            for key in ["p", "split", "epsilon", "j", "mu_p"] {
                if let Some(x) = v.get(key) {
                    m.insert(key.into(), x.clone());
                }
            }
            field_from(&Value::Object(m), "$")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::{q, qf};

    #[test]
    fn rationals_and_elements_round_trip() {
        assert_eq!(q_from_json(&json!("-3/6"), "$").unwrap(), qf(-1, 2));
        assert_eq!(q_from_json(&json!(4), "$").unwrap(), q(4));
        assert!(q_from_json(&json!("1/0"), "$").is_err());
        let alg = Algebra::Inert { eps: 2 };
        let x = Ext::new(alg, qf(1, 3), q(-2));
        assert_eq!(ext_to_json(&x), json!({"a": "1/3", "b": "-2"}));
        assert_eq!(ext_from_json(alg, &ext_to_json(&x), "$").unwrap(), x);
        let s = Ext::new(Algebra::Split, q(1), q(-1));
        assert_eq!(ext_to_json(&s), json!({"l": "1", "r": "-1"}));
    }

    #[test]
    fn matrices_and_values_round_trip() {
        let alg = Algebra::Split;
        let m = MatE::from_ints(alg, &[&[1, 2], &[3, 4]]);
        assert_eq!(mat_from_json(alg, &mat_to_json(&m), "$").unwrap(), m);
        let c = &CycValue::root_of_unity(3, 1) + &CycValue::from_int(2);
        assert_eq!(cyc_from_json(&cyc_to_json(&c), "$").unwrap(), c);
        let mut l = LaurentValue::zero();
        l.add_term(-1, &c);
        l.add_term(2, &CycValue::from_int(5));
        assert_eq!(laurent_from_json(&laurent_to_json(&l), "$").unwrap(), l);
    }

    #[test]
    fn parse_errors_carry_locations() {
        let e = parse_json("{\"p\": 3,\n  oops}").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let alg = Algebra::Split;
        let e = mat_from_json(alg, &json!({"entries": [[1, 2], [3]]}), "$.gamma").unwrap_err();
        assert!(e.to_string().contains("$.gamma"), "{e}");
        let e = cyc_from_json(&json!({"order": 0, "coeffs": []}), "$.v").unwrap_err();
        assert!(e.to_string().contains("$.v"), "{e}");
    }

    #[test]
    fn configs_validate() {
        let cfg = parse_config(r#"{"p": 3, "split": false, "epsilon": 2, "n": 2, "seed": 7}"#).unwrap();
        assert_eq!(cfg.n, 2);
        assert_eq!(cfg.bounds, Bounds::default());
        let f = cfg.field().build().unwrap();
        assert_eq!(FieldConfig::of(&f).build().unwrap(), f);
        assert!(matches!(parse_config(r#"{"p": 3, "epsilon": 1}"#), Err(Error::Config(_))));
        assert!(matches!(parse_config(r#"{"p": 4, "split": true}"#), Err(Error::Config(_))));
        assert!(matches!(parse_config(r#"{"p": 3, "bogus": 1}"#), Err(Error::Parse(_))));
    }

    #[test]
    fn lattice_and_group_functions_round_trip() {
        let phi = LatticeFn::indicator(Space::ERow, 1, 3, 1);
        let back = lattice_fn_from_json(&lattice_fn_to_json(&phi), "$").unwrap();
        assert_eq!(back, phi);
        let field = LocalField::split(3, MuAtP::One).unwrap();
        let f = GroupFn::constant_on_maximal(&field, 2, true, CycValue::from_int(3));
        assert_eq!(group_fn_from_json(&field, &group_fn_to_json(&f), "$").unwrap(), f);
    }
}
