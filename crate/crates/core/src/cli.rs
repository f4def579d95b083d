//! Command-line front end. Every command produces one JSON report; the
//! plain-text output is a flattened rendering of the same JSON.
//!
//! Exit codes: 0 ok, 1 verdict mismatch (`--expect` or scenario
//! expectations), 2 error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::coarsening::{coarse_value, compose_check, residue_series};
use crate::coeff::CoeffField;
use crate::diagnostics::{
    aat_check, chardist_check, classify_with, coarsening_transfer_check, immediacy_check,
    initial_segment_check, sd_check, tower_check, ClassifyConfig, DEFAULT_MIN_IN_COSET,
};
use crate::disjointness::{certify_degree_drop, residue_membership_evidence};
use crate::error::{Error, Result};
use crate::expr::parse_polynomial;
use crate::hensel::{hensel_root, lift_factorization, simple_residue_roots};
use crate::poly::ValPolynomial;
use crate::scenario;
use crate::series::{TruncatedSeries, Valuation};
use crate::session::SessionConfig;
use crate::sweep::{compose_sweep, law_sweep, seed_from_env, SeriesShape};
use crate::value_group::Exponent;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug, Clone)]
#[command(
    name = "henselium",
    version,
    about = "Exact truncated-series arithmetic for higher-rank valued fields",
    args_override_self = true
)]
pub struct Cli {
    #[command(flatten)]
    pub session: SessionArgs,

    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,

    /// Expected value of the report's `verdict`; a mismatch exits with 1.
    #[arg(long, global = true)]
    pub expect: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SessionArgs {
    /// Variable names, most significant first.
    #[arg(long, global = true)]
    pub vars: Option<String>,

    /// Coefficient field: `q` or `fp:<p>`.
    #[arg(long, global = true)]
    pub field: Option<String>,

    /// Working precision, e.g. "(0,32)".
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub prec: Option<String>,

    /// Sampling horizon, e.g. "(0,50)".
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub horizon: Option<String>,
}

impl SessionArgs {
    pub fn config(&self) -> Result<SessionConfig> {
        let vars = SessionConfig::parse_vars(self.vars.as_deref().unwrap_or("t"));
        let field: CoeffField = self.field.as_deref().unwrap_or("q").parse()?;
        let probe = SessionConfig::new(vars.clone(), field, None, None)?;
        let prec = self.prec.as_deref().map(|p| probe.exponent(p)).transpose()?;
        let horizon = self.horizon.as_deref().map(|h| probe.exponent(h)).transpose()?;
        SessionConfig::new(vars, field, prec, horizon)
    }

    /// The flags as arguments, for replaying a session inside a scenario.
    pub fn to_args(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (flag, v) in [
            ("--vars", &self.vars),
            ("--field", &self.field),
            ("--prec", &self.prec),
            ("--horizon", &self.horizon),
        ] {
            if let Some(v) = v {
                out.push(flag.to_string());
                out.push(v.clone());
            }
        }
        out
    }
}

/// An element of the session: either a literal series, or a Hensel root of
/// `--poly` lifted from `--start`, optionally mapped to `scale·root + shift`.
#[derive(Args, Debug, Clone)]
pub struct ElementArgs {
    /// Polynomial whose Hensel root is the element.
    #[arg(long, conflicts_with = "series")]
    pub poly: Option<String>,

    /// Residue start for the lift; default: the first simple residue root.
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<String>,

    /// A literal series instead of a Hensel root.
    #[arg(long, allow_hyphen_values = true)]
    pub series: Option<String>,

    /// Multiply the element by this element of K.
    #[arg(long, allow_hyphen_values = true)]
    pub scale: Option<String>,

    /// Add this element of K.
    #[arg(long, allow_hyphen_values = true)]
    pub shift: Option<String>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Newton-Hensel lift of a simple residue root.
    Lift {
        #[arg(long)]
        poly: String,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
    },
    /// Coarse value, residue and composition check for a series.
    Coarsen {
        #[arg(long)]
        delta: usize,
        #[arg(allow_hyphen_values = true)]
        series: String,
    },
    /// Sample v(z - K) and classify z up to the horizon.
    Diagnose {
        #[command(flatten)]
        element: ElementArgs,
        /// Report whether the winning subgroup is this Δ_j.
        #[arg(long)]
        delta: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_MIN_IN_COSET)]
        min_in_coset: usize,
    },
    /// Structural checks on approximation sets.
    Check {
        #[command(subcommand)]
        check: CheckCommand,
    },
    /// Lift a residue factorization f v_Δ = g0 h0 to precision.
    Factor {
        #[arg(long)]
        poly: String,
        /// Residue factor over the rank-j residue field (last j variables).
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
        #[arg(long, default_value_t = 0)]
        level: usize,
    },
    /// Certify a degree drop for z = a + shift.
    Disjoint {
        /// Minimal polynomial of z over K.
        #[arg(long)]
        minpoly: String,
        /// Defining polynomial of the Hensel root a.
        #[arg(long)]
        henspoly: String,
        #[arg(long, allow_hyphen_values = true)]
        shift: String,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
    },
    /// Run a scenario file.
    Scenario { file: PathBuf },
    /// Randomized law sweep seeded by HENSELIUM_SEED.
    Sweep {
        #[arg(value_enum)]
        kind: SweepKind,
        #[arg(long, default_value_t = 1000)]
        count: usize,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum CheckCommand {
    /// v(bz + c - K) = vb + v(z - K).
    Aat {
        #[command(flatten)]
        element: ElementArgs,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        c: String,
    },
    /// The residue of z at Δ_j lies in the completion but not in K v_Δ.
    Chardist {
        #[command(flatten)]
        element: ElementArgs,
        #[arg(long)]
        delta: usize,
    },
    /// Strict-distinction axioms SD1-SD3 (uses --poly as f).
    Sd {
        #[command(flatten)]
        element: ElementArgs,
        #[arg(long)]
        delta: usize,
    },
    /// Weakly distinguished for v_Δ implies weakly distinguished for v.
    Transfer {
        #[command(flatten)]
        element: ElementArgs,
        #[arg(long)]
        delta: usize,
    },
    /// Transitivity through K ⊆ K(x) ⊆ K(x, z).
    Tower {
        #[arg(long)]
        f1: String,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        x0: String,
        /// Polynomial in Y with coefficients in K[X].
        #[arg(long)]
        f2: String,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        z0: String,
    },
    /// Every value below a gap is a gap; the gaps have no maximum.
    Segment {
        #[command(flatten)]
        element: ElementArgs,
    },
    /// Gaps and residues of the samples already occur in K.
    Immediacy {
        #[command(flatten)]
        element: ElementArgs,
    },
    /// The scaled residue is a Hensel root over the residue field.
    Residue {
        #[command(flatten)]
        element: ElementArgs,
        #[arg(long)]
        delta: usize,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum SweepKind {
    Laws,
    Compose,
}

/// A report together with whether its expectations held.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Value,
    pub matched: bool,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn rendered_fields(report: &mut Value, fields: &[(&str, String)]) {
    if let Value::Object(map) = report {
        for (k, v) in fields {
            map.insert((*k).to_string(), Value::String(v.clone()));
        }
    }
}

fn first_simple_root(session: &SessionConfig, f: &ValPolynomial) -> Result<TruncatedSeries> {
    let roots = simple_residue_roots(f)?;
    let r = roots.into_iter().next().ok_or_else(|| {
        Error::Precondition(format!(
            "{} has no simple root in the residue field",
            session.render_polynomial(f)
        ))
    })?;
    Ok(TruncatedSeries::constant(session.rank(), r))
}

fn start_of(session: &SessionConfig, f: &ValPolynomial, start: &Option<String>) -> Result<TruncatedSeries> {
    match start {
        Some(s) => session.series(s),
        None => first_simple_root(session, f),
    }
}

impl ElementArgs {
    /// The root is lifted to `precision − v(scale)`, so that the scaled
    /// element is known to the session precision.
    fn base(
        &self,
        session: &SessionConfig,
        scale: Option<&TruncatedSeries>,
    ) -> Result<(TruncatedSeries, Option<ValPolynomial>)> {
        match (&self.series, &self.poly) {
            (Some(s), _) => Ok((session.series(s)?, None)),
            (None, Some(p)) => {
                let f = session.polynomial(p)?;
                let c0 = start_of(session, &f, &self.start)?;
                let vb = match scale.map(|b| b.valuation()) {
                    Some(Valuation::Known(v)) if v.is_finite() => v,
                    Some(_) => return Err(Error::Precondition("--scale must be non-zero".into())),
                    None => Exponent::zero(session.rank()),
                };
                let target = &session.default_precision - &vb;
                let root = hensel_root(&f, &c0, &target)?.root;
                Ok((root, Some(f)))
            }
            (None, None) => Err(Error::Precondition("give --poly or --series".into())),
        }
    }

    fn resolve(&self, session: &SessionConfig) -> Result<(TruncatedSeries, Option<ValPolynomial>)> {
        let scale = self.scale.as_deref().map(|b| session.series(b)).transpose()?;
        let (mut z, f) = self.base(session, scale.as_ref())?;
        if let Some(b) = &scale {
            z = b * &z;
        }
        if let Some(c) = &self.shift {
            z = &z + &session.series(c)?;
        }
        Ok((z, f))
    }
}

fn render_samples(report: &mut Value, session: &SessionConfig, samples: &[TruncatedSeries]) {
    if let Some(Value::Array(items)) = report.get_mut("samples") {
        for (item, x) in items.iter_mut().zip(samples) {
            if let Value::Object(m) = item {
                m.insert("approximant".into(), Value::String(session.render(x)));
            }
        }
    }
}

fn element_fields(session: &SessionConfig, z: &TruncatedSeries) -> Vec<(&'static str, String)> {
    vec![("element", session.render(z))]
}

/// Runs one parsed command and returns its report.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let session = cli.session.config()?;
    let horizon = session.horizon.clone();
    let precision = session.default_precision.clone();
    let mut report = match &cli.command {
        Command::Lift { poly, start } => {
            let f = session.polynomial(poly)?;
            let c0 = start_of(&session, &f, start)?;
            let r = hensel_root(&f, &c0, &precision)?;
            let mut v = to_value(&r);
            rendered_fields(
                &mut v,
                &[
                    ("command", "lift".into()),
                    ("poly", session.render_polynomial(&f)),
                    ("start", session.render(&c0)),
                    ("root", session.render(&r.root)),
                ],
            );
            v["iterations"] = json!(r.iterations());
            v
        }
        Command::Coarsen { delta, series } => {
            let x = session.series(series)?;
            let d = session.subgroup(*delta)?;
            let cv = match coarse_value(&x, &d) {
                Valuation::Known(c) => c.0.to_string(),
                Valuation::UnknownBelow(c) => format!(">={}", c.0),
            };
            let residue = residue_series(&x, &d)
                .map(|r| Value::String(crate::expr::format_series(&r, &session.residue_names(&d))))
                .unwrap_or_else(|e| json!({ "error": e.to_string() }));
            let compose = compose_check(&x, &d)
                .map(|r| to_value(&r))
                .unwrap_or_else(|e| json!({ "error": e.to_string() }));
            json!({
                "command": "coarsen",
                "series": session.render(&x),
                "delta": d,
                "coarse_value": cv,
                "residue": residue,
                "compose_check": compose,
            })
        }
        Command::Diagnose {
            element,
            delta,
            min_in_coset,
        } => {
            let (z, _) = element.resolve(&session)?;
            let config = ClassifyConfig {
                min_in_coset: *min_in_coset,
            };
            let rep = classify_with(&z, &horizon, &config)?;
            let approximants: Vec<TruncatedSeries> =
                rep.samples.iter().map(|r| r.approximant.clone()).collect();
            let mut v = to_value(&rep);
            render_samples(&mut v, &session, &approximants);
            rendered_fields(&mut v, &element_fields(&session, &z));
            v["command"] = json!("diagnose");
            if let Some(j) = delta {
                let want = session.subgroup(*j)?;
                v["delta_matches"] = json!(rep.candidate_delta == Some(want));
            }
            v
        }
        Command::Check { check } => run_check(&session, check)?,
        Command::Factor { poly, g, h, level } => {
            let f = session.polynomial(poly)?;
            let lvl = session.subgroup(*level)?;
            let names = session.residue_names(&lvl);
            let g0 = parse_polynomial(g, &names, session.field())?;
            let h0 = parse_polynomial(h, &names, session.field())?;
            let lift = lift_factorization(&f, &g0, &h0, &precision, &lvl)?;
            let mut v = to_value(&lift);
            rendered_fields(
                &mut v,
                &[
                    ("command", "factor".into()),
                    ("g", session.render_polynomial(&lift.g)),
                    ("h", session.render_polynomial(&lift.h)),
                ],
            );
            v["factor_degrees"] = json!([lift.g.degree(), lift.h.degree()]);
            v
        }
        Command::Disjoint {
            minpoly,
            henspoly,
            shift,
            start,
        } => run_disjoint(&session, minpoly, henspoly, shift, start)?,
        Command::Scenario { file } => {
            let text = std::fs::read_to_string(file)
                .map_err(|e| Error::Session(format!("cannot read {}: {e}", file.display())))?;
            let sc = scenario::parse_scenario(&text)?;
            let name = file
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let run = scenario::run_scenario(&sc, &cli.session.to_args());
            let matched = run.error.is_none() && run.mismatches == 0;
            if let Some(e) = &run.error {
                return Err(e.clone());
            }
            return Ok(Outcome {
                report: json!({ "scenario": name, "reports": run.reports, "mismatches": run.mismatches }),
                matched,
            });
        }
        Command::Sweep { kind, count } => {
            let seed = seed_from_env();
            let shape = SeriesShape::default();
            let rep = match kind {
                SweepKind::Laws => law_sweep(seed, *count, &shape),
                SweepKind::Compose => compose_sweep(seed, *count, &shape),
            };
            let mut v = to_value(&rep);
            v["command"] = json!("sweep");
            v["verdict"] = json!(if rep.passed() { "PASS" } else { "FAIL" });
            v
        }
    };
    if let Value::Object(m) = &mut report {
        m.entry("horizon").or_insert_with(|| json!(horizon.to_string()));
        m.entry("precision").or_insert_with(|| json!(precision.to_string()));
    }
    let matched = match &cli.expect {
        None => true,
        Some(want) => report.get("verdict").and_then(Value::as_str) == Some(want.as_str()),
    };
    Ok(Outcome { report, matched })
}

fn require_poly(f: Option<ValPolynomial>) -> Result<ValPolynomial> {
    f.ok_or_else(|| Error::Precondition("this check needs --poly".into()))
}

fn run_check(session: &SessionConfig, check: &CheckCommand) -> Result<Value> {
    let horizon = &session.horizon;
    let (name, mut v, fields) = match check {
        CheckCommand::Aat { element, b, c } => {
            let (z, _) = element.resolve(session)?;
            let rep = aat_check(&z, &session.series(b)?, &session.series(c)?, horizon)?;
            ("aat", to_value(&rep), element_fields(session, &z))
        }
        CheckCommand::Chardist { element, delta } => {
            let (z, _) = element.resolve(session)?;
            let d = session.subgroup(*delta)?;
            let rep = chardist_check(&z, &d, horizon)?;
            let mut fields = element_fields(session, &z);
            fields.push((
                "residue",
                crate::expr::format_series(&rep.residue, &session.residue_names(&d)),
            ));
            ("chardist", to_value(&rep), fields)
        }
        CheckCommand::Sd { element, delta } => {
            let (z, f) = element.resolve(session)?;
            let f = require_poly(f)?;
            let rep = sd_check(&z, &f, &session.subgroup(*delta)?, horizon)?;
            let mut v = to_value(&rep);
            let all = [rep.sd1, rep.sd2, rep.sd3];
            v["verdict"] = json!(if all.iter().all(|c| c.passed()) { "PASS_AT_HORIZON" } else { "FAIL" });
            ("sd", v, element_fields(session, &z))
        }
        CheckCommand::Transfer { element, delta } => {
            let (z, _) = element.resolve(session)?;
            let rep = coarsening_transfer_check(&z, &session.subgroup(*delta)?, horizon)?;
            ("transfer", to_value(&rep), element_fields(session, &z))
        }
        CheckCommand::Tower { f1, x0, f2, z0 } => {
            let rep = tower_check(
                &session.polynomial(f1)?,
                &session.series(x0)?,
                &session.bivariate(f2)?,
                &session.series(z0)?,
                horizon,
            )?;
            let fields = vec![("x", session.render(&rep.x)), ("z", session.render(&rep.z))];
            ("tower", to_value(&rep), fields)
        }
        CheckCommand::Segment { element } => {
            let (z, _) = element.resolve(session)?;
            let rep = initial_segment_check(&z, horizon)?;
            ("segment", to_value(&rep), element_fields(session, &z))
        }
        CheckCommand::Immediacy { element } => {
            let (z, _) = element.resolve(session)?;
            let rep = immediacy_check(&z, horizon)?;
            ("immediacy", to_value(&rep), element_fields(session, &z))
        }
        CheckCommand::Residue { element, delta } => {
            let (z, f) = element.resolve(session)?;
            let f = require_poly(f)?;
            if element.scale.is_some() || element.shift.is_some() {
                return Err(Error::Precondition(
                    "residue evidence needs the Hensel root itself (no --scale/--shift)".into(),
                ));
            }
            let d = session.subgroup(*delta)?;
            let rep = residue_membership_evidence(&f, &z, &d, horizon)?;
            let fields = vec![(
                "residue",
                crate::expr::format_series(&rep.residue, &session.residue_names(&d)),
            )];
            ("residue", to_value(&rep), fields)
        }
    };
    rendered_fields(&mut v, &fields);
    v["command"] = json!(format!("check {name}"));
    Ok(v)
}

fn run_disjoint(
    session: &SessionConfig,
    minpoly: &str,
    henspoly: &str,
    shift: &str,
    start: &Option<String>,
) -> Result<Value> {
    let f = session.polynomial(minpoly)?;
    let p = session.polynomial(henspoly)?;
    let s = session.series(shift)?;
    let target = &session.default_precision;
    let candidates = match start {
        Some(c) => vec![session.series(c)?],
        None => simple_residue_roots(&p)?
            .into_iter()
            .map(|r| TruncatedSeries::constant(session.rank(), r))
            .collect(),
    };
    // the Hensel root a for which a + shift is a root of the minimal polynomial
    let mut last_err = Error::Precondition("henspoly has no simple residue root".into());
    for c0 in candidates {
        let a = match hensel_root(&p, &c0, target) {
            Ok(r) => r.root,
            Err(e) => {
                last_err = e;
                continue;
            }
        };
        match certify_degree_drop(&f, &a, &s, &session.horizon, target) {
            Err(e @ Error::NotApproximateRoot { .. }) => last_err = e,
            Err(e) => return Err(e),
            Ok(rep) => {
                let mut v = to_value(&rep);
                let factors: Vec<String> =
                    rep.factors.iter().map(|g| session.render_polynomial(g)).collect();
                v["factors"] = json!(factors);
                let mut fields = vec![
                    ("command", "disjoint".to_string()),
                    ("a", session.render(&a)),
                    ("start", session.render(&c0)),
                ];
                if let Some(d) = &rep.scaling_d {
                    fields.push(("scaling_d", session.render(d)));
                }
                rendered_fields(&mut v, &fields);
                return Ok(v);
            }
        }
    }
    Err(last_err)
}

pub fn error_report(e: &Error) -> Value {
    json!({ "error": { "kind": e.kind(), "message": e.to_string() } })
}

/// Flattens a report into `key: value` lines; long arrays are elided.
pub fn render_text(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<String>) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, x, out);
                }
            }
            Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
                let shown: Vec<String> = items.iter().take(12).map(scalar).collect();
                let more = if items.len() > 12 {
                    format!(", ... ({} total)", items.len())
                } else {
                    String::new()
                };
                out.push(format!("{prefix}: [{}{more}]", shown.join(", ")));
            }
            Value::Array(items) => {
                for (i, x) in items.iter().enumerate().take(12) {
                    walk(&format!("{prefix}[{i}]"), x, out);
                }
                if items.len() > 12 {
                    out.push(format!("{prefix}: ... ({} total)", items.len()));
                }
            }
            _ => out.push(format!("{prefix}: {}", scalar(v))),
        }
    }
    fn scalar(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out.join("\n")
}

/// Write errors (e.g. a closed pipe) are ignored.
fn emit(v: &Value, as_json: bool) {
    let text = if as_json {
        serde_json::to_string_pretty(v).expect("json")
    } else {
        render_text(v)
    };
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

/// Entry point shared by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            emit(&out.report, cli.json);
            if out.matched {
                EXIT_OK
            } else {
                EXIT_MISMATCH
            }
        }
        Err(e) => {
            if cli.json {
                emit(&error_report(&e), true);
            } else {
                eprintln!("error: {e}");
            }
            EXIT_ERROR
        }
    }
}

/// Parses one scenario command line under the given session flags.
pub fn parse_command(session_args: &[String], words: &[String]) -> Result<Cli> {
    let argv = std::iter::once("henselium".to_string())
        .chain(session_args.iter().cloned())
        .chain(words.iter().cloned());
    Cli::try_parse_from(argv).map_err(|e| Error::Session(e.to_string().trim().to_string()))
}

/// A JSON object with `command` first, for scenario bundles.
pub fn tag_command(report: Value, line: &str) -> Value {
    let mut m = Map::new();
    m.insert("line".into(), Value::String(line.to_string()));
    if let Value::Object(rest) = report {
        m.extend(rest);
    }
    Value::Object(m)
}
