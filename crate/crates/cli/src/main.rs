//! `ggp`: orbital-integral calculators and verification campaigns over JSON.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ggp_local::harness::{
    fourier_selftest, gen_beta_minus_instance, gen_matched_pair, gen_split_pair, verify_fl, verify_split_transfer,
    verify_vanishing, CampaignParams, CampaignReport,
};
use ggp_local::io::{
    any_triple_from_json, cyc_to_json, field_in, gl_rep_from_json, group_fn_from_json, instance_to_json,
    invariants_to_json, lattice_fn_from_json, orb_result_to_json, parse_config, parse_json, q_from_json,
    u_rep_from_json, RunConfig,
};
use ggp_local::localfield::{LocalField, MuAtP, Q};
use ggp_local::orbint::{orb_gl_general, orb_gl_unramified, orb_u_general, orb_u_unramified, EngineOptions};
use ggp_local::orbitspace::{invariants, is_rss_mtriple, orbits_match, transfer_factor};

mod error;

use error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "ggp",
    version,
    about = "Exact orbital integrals and fundamental-lemma checks for U(V) inside GL(V) at a p-adic place"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Residue characteristic.
    #[arg(long, global = true)]
    p: Option<u64>,
    /// Rank of the orbit space.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Number of campaign cases.
    #[arg(long, global = true, default_value_t = 20)]
    count: u64,
    /// Campaign seed; each case draws from its own stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Largest number of lattices or cosets an engine may enumerate.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Valuation bound on the generated invariants.
    #[arg(long, global = true)]
    bound: Option<i64>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    /// Run configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Use a split place.
    #[arg(long, global = true)]
    split: bool,
    /// Non-square unit for an inert place.
    #[arg(long, global = true, allow_hyphen_values = true)]
    epsilon: Option<i64>,
    /// mu(p) (or mu_1(p) at split places): 1, -1, i or -i.
    #[arg(long, global = true, allow_hyphen_values = true)]
    mu_p: Option<String>,
    /// Single-threaded everywhere.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariants (a_i, b_i) of a triple, GL-side or unitary representative.
    Invariants {
        /// JSON document, or `-` for stdin.
        input: PathBuf,
    },
    /// Whether the two representatives of an instance match.
    Match {
        /// JSON document, or `-` for stdin.
        input: PathBuf,
    },
    /// Transfer factor of a triple.
    TransferFactor {
        /// JSON document, or `-` for stdin.
        input: PathBuf,
    },
    /// GL-side orbital integral; general engine when `f_tilde` and `phi` are present.
    OrbGl {
        /// JSON document, or `-` for stdin.
        input: PathBuf,
        /// Keep the formal variable instead of the unitary normalization.
        #[arg(long)]
        formal: bool,
    },
    /// Unitary orbital integral; general engine when `f`, `phi1` and `phi2` are present.
    OrbU {
        /// JSON document, or `-` for stdin.
        input: PathBuf,
    },
    /// Fundamental-lemma campaign on random matching pairs at an inert place.
    VerifyFl,
    /// Vanishing campaign on beta-minus instances at an inert place.
    VerifyVanishing,
    /// Split-place transfer campaign with random Schwartz data.
    VerifySplit,
    /// Fourier inversion and Plancherel on random functions.
    FourierSelftest,
    /// Print one generated instance as JSON.
    GenInstance {
        #[arg(long, value_enum, default_value_t = RecipeArg::Symmetric)]
        recipe: RecipeArg,
        /// Position in the seeded stream.
        #[arg(long, default_value_t = 0)]
        index: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RecipeArg {
    Symmetric,
    BetaMinus,
    Split,
}

/// What a subcommand produced: a JSON document and the process status it implies.
struct Output {
    doc: Value,
    code: u8,
    summary: Option<String>,
}

impl Output {
    fn ok(doc: Value) -> Self {
        Output { doc, code: 0, summary: None }
    }
}

impl Cli {
    fn run_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => parse_config(&read(path)?)?,
            None => parse_config(r#"{"p": 3}"#)?,
        };
        if let Some(p) = self.p {
            cfg.p = p;
        }
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(b) = self.bound {
            cfg.bounds.val_bound = b;
        }
        if self.split {
            cfg.split = true;
        }
        if self.epsilon.is_some() {
            cfg.epsilon = self.epsilon;
        }
        if let Some(mu) = &self.mu_p {
            let mu: MuAtP = serde_json::from_value(Value::String(mu.clone()))
                .map_err(|_| CliError::Usage(format!("--mu-p must be 1, -1, i or -i, got {mu}")))?;
            cfg.mu_p = Some(mu);
        }
        // re-validate after overrides
        parse_config(&serde_json::to_string(&cfg).expect("config serializes"))?;
        Ok(cfg)
    }

    fn field(&self) -> Result<LocalField, CliError> {
        Ok(self.run_config()?.field().build()?)
    }

    fn engine_options(&self) -> EngineOptions {
        let mut opts = if self.sequential { EngineOptions::sequential() } else { EngineOptions::default() };
        if let Some(b) = self.budget {
            opts.budget = b;
        }
        opts
    }

    fn campaign(&self) -> Result<CampaignParams, CliError> {
        let cfg = self.run_config()?;
        Ok(CampaignParams {
            field: cfg.field().build()?,
            n: cfg.n,
            count: self.count,
            seed: cfg.seed,
            bounds: cfg.bounds,
            opts: self.engine_options(),
        })
    }

    /// Input document and the field it lives over: its own configuration when it carries one.
    fn document(&self, path: &PathBuf) -> Result<(Value, LocalField), CliError> {
        let doc = parse_json(&read(path)?)?;
        let field = if doc.get("config").is_some() || doc.get("p").is_some() { field_in(&doc)? } else { self.field()? };
        Ok((doc, field))
    }
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        return std::io::read_to_string(std::io::stdin()).map_err(|e| CliError::Io { path: path.clone(), source: e });
    }
    std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.clone(), source: e })
}

/// `doc[key]` when present (an instance), otherwise the document itself.
fn part<'a>(doc: &'a Value, key: &str) -> (&'a Value, String) {
    match doc.get(key) {
        Some(v) => (v, format!("$.{key}")),
        None => (doc, "$".into()),
    }
}

fn d_of(doc: &Value) -> Result<Q, CliError> {
    Ok(match doc.get("d") {
        Some(v) => q_from_json(v, "$.d")?,
        None => Q::from_integer(0.into()),
    })
}

fn report(r: CampaignReport) -> Output {
    let code = r.exit_code() as u8;
    let summary = format!(
        "{}: {} passed, {} failed, {} inconclusive, {} nontrivial",
        r.campaign, r.passed, r.failed, r.inconclusive, r.nontrivial
    );
    Output { doc: serde_json::to_value(&r).expect("report serializes"), code, summary: Some(summary) }
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Invariants { input } => {
            let (doc, field) = cli.document(input)?;
            let (v, path) = part(&doc, "gl");
            let m = any_triple_from_json(&field, v, &path)?;
            let mut out = invariants_to_json(&invariants(&m));
            out["rss"] = json!(is_rss_mtriple(&m));
            Ok(Output::ok(out))
        }
        Command::Match { input } => {
            let (doc, field) = cli.document(input)?;
            let gl = gl_rep_from_json(field.alg(), part(&doc, "gl").0, &part(&doc, "gl").1)?;
            let u = u_rep_from_json(&field, part(&doc, "u").0, &part(&doc, "u").1)?;
            Ok(Output::ok(json!({"match": orbits_match(&gl, &u)?})))
        }
        Command::TransferFactor { input } => {
            let (doc, field) = cli.document(input)?;
            let (v, path) = part(&doc, "gl");
            let m = any_triple_from_json(&field, v, &path)?;
            Ok(Output::ok(json!({"omega": cyc_to_json(&transfer_factor(&field, &m)?)})))
        }
        Command::OrbGl { input, formal } => {
            let (doc, field) = cli.document(input)?;
            let (v, path) = part(&doc, "gl");
            let gl = gl_rep_from_json(field.alg(), v, &path)?;
            let opts = cli.engine_options();
            let r = match (doc.get("f_tilde"), doc.get("phi")) {
                (Some(f), Some(phi)) => orb_gl_general(
                    &field,
                    &gl,
                    &group_fn_from_json(&field, f, "$.f_tilde")?,
                    &lattice_fn_from_json(phi, "$.phi")?,
                    *formal,
                    &opts,
                )?,
                (None, None) => orb_gl_unramified(&field, &gl, &d_of(&doc)?, *formal, &opts)?,
                _ => return Err(CliError::Usage("f_tilde and phi must be given together".into())),
            };
            Ok(Output { code: if r.complete { 0 } else { 2 }, ..Output::ok(orb_result_to_json(&r)) })
        }
        Command::OrbU { input } => {
            let (doc, field) = cli.document(input)?;
            let (v, path) = part(&doc, "u");
            let u = u_rep_from_json(&field, v, &path)?;
            let opts = cli.engine_options();
            let r = match (doc.get("f"), doc.get("phi1"), doc.get("phi2")) {
                (Some(f), Some(a), Some(b)) => orb_u_general(
                    &field,
                    &u,
                    &group_fn_from_json(&field, f, "$.f")?,
                    &lattice_fn_from_json(a, "$.phi1")?,
                    &lattice_fn_from_json(b, "$.phi2")?,
                    &opts,
                )?,
                (None, None, None) => orb_u_unramified(&field, &u, &d_of(&doc)?, &opts)?,
                _ => return Err(CliError::Usage("f, phi1 and phi2 must be given together".into())),
            };
            Ok(Output { code: if r.complete { 0 } else { 2 }, ..Output::ok(orb_result_to_json(&r)) })
        }
        Command::VerifyFl => Ok(report(verify_fl(&cli.campaign()?)?)),
        Command::VerifyVanishing => Ok(report(verify_vanishing(&cli.campaign()?)?)),
        Command::VerifySplit => Ok(report(verify_split_transfer(&cli.campaign()?)?)),
        Command::FourierSelftest => {
            let params = cli.campaign()?;
            Ok(report(fourier_selftest(&params.field, params.seed, params.count)?))
        }
        Command::GenInstance { recipe, index } => {
            let cfg = cli.run_config()?;
            let field = cfg.field().build()?;
            let gen = match recipe {
                RecipeArg::Symmetric => gen_matched_pair,
                RecipeArg::BetaMinus => gen_beta_minus_instance,
                RecipeArg::Split => gen_split_pair,
            };
            let inst = gen(&field, cfg.n, cfg.seed, *index, &cfg.bounds)?;
            Ok(Output::ok(instance_to_json(&inst)))
        }
    }
}

fn emit(cli: &Cli, out: &Output) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&out.doc).expect("json serializes") + "\n";
    match &cli.json_out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io { path: path.clone(), source: e }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(error::USAGE);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let start = Instant::now();
    let outcome = run(&cli).and_then(|out| emit(&cli, &out).map(|()| out));
    match outcome {
        Ok(out) => {
            if let Some(s) = &out.summary {
                eprintln!("{s} in {:.2?}", start.elapsed());
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
