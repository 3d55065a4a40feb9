//! Argument parsing, dispatch and report rendering for the `k3cusps` binary.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::catalog::Catalog;
use crate::codes::{self, TernaryCode};
use crate::elliptic::{self, FiberConfiguration, SectionData};
use crate::error::{Error, Result};
use crate::exact::{self, format_rational, parse_rational};
use crate::fqf;
use crate::glue::{self, AmbientSpec};
use crate::lattice::Sign;
use crate::par::Strategy;
use crate::report::Report;
use crate::reproduce;
use crate::traces::{self, EigenvalueMultiset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "k3cusps", version, about = "Exact lattice computations for K3 surfaces with nine A2 cusps")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Lattice catalog (JSON); defaults to $K3CUSPS_CATALOG, then the built-in table.
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
    /// Report elapsed_ms as 0 so that JSON output is byte-reproducible.
    #[arg(long, global = true)]
    pub no_timing: bool,
    /// Run the data-parallel kernels on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lattice invariants
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Discriminant forms
    #[command(subcommand)]
    Fqf(FqfCmd),
    /// Ternary codes and their lattices
    #[command(subcommand)]
    Code(CodeCmd),
    /// Gluing and embedding obstructions
    #[command(subcommand)]
    Glue(GlueCmd),
    /// Traces of order-3 automorphisms and endomorphism types
    #[command(subcommand)]
    Trace(TraceCmd),
    /// Néron–Severi computations for elliptic fibrations
    #[command(subcommand)]
    Ns(NsCmd),
    /// Run the end-to-end checks
    #[command(subcommand)]
    Reproduce(ReproduceCmd),
}

#[derive(Debug, Args)]
#[group(multiple = false)]
pub struct SignFlags {
    /// Bare root names (A2, E6, ...) are negative definite
    #[arg(long)]
    pub neg: bool,
    /// Bare root names are positive definite
    #[arg(long)]
    pub pos: bool,
}

impl SignFlags {
    fn sign(&self) -> Option<Sign> {
        match (self.neg, self.pos) {
            (true, _) => Some(Sign::Negative),
            (_, true) => Some(Sign::Positive),
            _ => None,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum LatticeCmd {
    Invariants {
        /// catalog name, JSON file, or sum such as `U,2E6-,A4-,A1-`
        lattice: String,
        #[command(flatten)]
        sign: SignFlags,
    },
}

#[derive(Debug, Subcommand)]
pub enum FqfCmd {
    Show {
        lattice: String,
        #[command(flatten)]
        sign: SignFlags,
    },
}

#[derive(Debug, Subcommand)]
pub enum CodeCmd {
    Search {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<usize>,
        #[arg(long, default_value_t = 9)]
        length: usize,
    },
    ToLattice {
        file: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum GlueCmd {
    Theorem2 {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        sigma: u32,
    },
    Embed {
        lattice: String,
        /// `k3` or `ss:P:SIGMA`
        #[arg(long)]
        ambient: String,
        #[command(flatten)]
        sign: SignFlags,
    },
}

#[derive(Debug, Subcommand)]
pub enum TraceCmd {
    Lefschetz {
        /// H^1 eigenvalues, e.g. `w,w,w2,w2`
        #[arg(long)]
        eigs: String,
    },
    Mumford {
        #[arg(long)]
        p_rank: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum NsCmd {
    Height {
        config: PathBuf,
        section: PathBuf,
    },
    Disc {
        config: PathBuf,
        /// heights of Mordell–Weil generators (diagonal height matrix)
        #[arg(long, value_delimiter = ',')]
        height: Vec<String>,
        #[arg(long, default_value_t = 1)]
        torsion: u64,
    },
    Scan {
        lattice: String,
        #[command(flatten)]
        sign: SignFlags,
    },
}

#[derive(Debug, Subcommand)]
pub enum ReproduceCmd {
    All,
}

#[derive(Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn parse_json(path: &PathBuf) -> Result<Value> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| Error::InvalidInput(format!("{}: line {} column {}: {e}", path.display(), e.line(), e.column())))
}

struct Ctx {
    catalog: Catalog,
    strategy: Strategy,
}

/// What a command produced: `(inputs, result, witnesses, anchor)`.
type Body = (Value, Value, Value, String);

fn lattice_invariants(ctx: &Ctx, arg: &str, sign: Option<Sign>) -> Result<Body> {
    let l = ctx.catalog.lattice(arg, sign)?;
    let mut result = serde_json::to_value(l.invariants()).expect("serializable");
    result["definite"] = json!(match l.definiteness() {
        Some(Sign::Positive) => "positive",
        Some(Sign::Negative) => "negative",
        None => "indefinite",
    });
    let gram = l.gram().to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect::<Vec<Vec<_>>>();
    Ok((
        json!({ "lattice": arg, "label": l.label() }),
        result,
        json!({ "gram": gram }),
        "rank, signature, determinant and parity".into(),
    ))
}

fn fqf_show(ctx: &Ctx, arg: &str, sign: Option<Sign>) -> Result<Body> {
    let l = ctx.catalog.lattice(arg, sign)?;
    let disc = fqf::disc_form(&l)?;
    let primes: Vec<u64> =
        (2..=disc.form.exponent()).filter(|p| disc.form.exponent() % p == 0 && (2..*p).all(|d| p % d != 0)).collect();
    let lengths: serde_json::Map<String, Value> =
        primes.iter().map(|&p| (p.to_string(), json!(disc.form.p_length(p)))).collect();
    let isotropic = disc.form.nonzero_isotropic_count().ok();
    let lifts: Vec<Vec<String>> = disc.lifts.iter().map(|v| v.iter().map(format_rational).collect()).collect();
    Ok((
        json!({ "lattice": arg }),
        json!({
            "form": disc.form.to_json(),
            "order": disc.form.order().to_string(),
            "p_lengths": lengths,
            "nonzero_isotropic": isotropic,
        }),
        json!({ "lifts": lifts }),
        "discriminant form q_L on L^v/L".into(),
    ))
}

fn code_search(ctx: &Ctx, dim: usize, weights: &[usize], length: usize) -> Result<Body> {
    let allowed: BTreeSet<usize> = weights.iter().copied().collect();
    let found = codes::search_codes(length, dim, &allowed, ctx.strategy)?;
    let rows: Vec<Value> = found
        .iter()
        .map(|c| {
            let en: serde_json::Map<String, Value> =
                c.weight_enumerator().into_iter().map(|(w, n)| (w.to_string(), json!(n))).collect();
            json!({ "code": c.to_json(), "weight_enumerator": en })
        })
        .collect();
    Ok((
        json!({ "length": length, "dim": dim, "weights": allowed }),
        json!({ "classes": found.len() }),
        json!({ "codes": rows }),
        "monomial classes of ternary codes with prescribed weights".into(),
    ))
}

fn code_to_lattice(ctx: &Ctx, file: &PathBuf) -> Result<Body> {
    let code = TernaryCode::from_json(&parse_json(file)?)?;
    let cl = codes::code_to_overlattice(&code)?;
    let (roots, outside) = codes::verify_no_extra_roots(&cl.lattice, &cl.root_sublattice, ctx.strategy)?;
    let inv = serde_json::to_value(cl.lattice.invariants()).expect("serializable");
    let gram =
        cl.lattice.gram().to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect::<Vec<Vec<_>>>();
    Ok((
        json!({ "file": file.display().to_string(), "code": code.to_json() }),
        json!({ "invariants": inv, "root_pairs": roots, "roots_outside_9A2": outside }),
        json!({ "gram": gram }),
        "overlattice of A2^n glued along a code; new roots come from light words".into(),
    ))
}

fn glue_theorem2(p: u64, sigma: u32) -> Result<Body> {
    let v = glue::theorem2_pipeline(p, sigma)?;
    let witnesses = v.details.clone();
    Ok((
        json!({ "p": p, "sigma": sigma }),
        json!({ "feasible": v.feasible, "obstruction": v.obstruction }),
        witnesses,
        "L embeds in a supersingular NS lattice only for sigma = 2 and p = 2 mod 3".into(),
    ))
}

fn glue_embed(ctx: &Ctx, arg: &str, ambient: &str, sign: Option<Sign>) -> Result<Body> {
    let l = ctx.catalog.lattice(arg, sign)?;
    let spec = AmbientSpec::parse(ambient)?;
    let v = glue::embedding_obstruction(&l, &spec)?;
    Ok((
        json!({ "lattice": arg, "ambient": ambient }),
        json!({ "feasible": v.feasible, "obstruction": v.obstruction }),
        v.details,
        "p-length of A_L + A_Lambda bounded by the complement rank".into(),
    ))
}

fn trace_lefschetz(eigs: &str) -> Result<Body> {
    let h1 = EigenvalueMultiset::parse(eigs)?;
    let fixed = traces::lefschetz_number(&h1)?;
    let h2 = traces::exterior_square(&h1)?;
    Ok((
        json!({ "eigs": h1.labels() }),
        json!({ "fixed_points": fixed, "h2": h2.labels(), "invariant_h2": traces::invariant_dimension(&h2) }),
        json!({ "trace_h1": h1.trace().to_string(), "trace_h2": h2.trace().to_string() }),
        "holomorphic Lefschetz count 1 - tr H1 + tr H2 - tr H3 + 1".into(),
    ))
}

fn trace_mumford(p_rank: u32) -> Result<Body> {
    let rows = traces::mumford_filter(p_rank)?;
    let excluded: Vec<&str> = rows.iter().filter(|r| !r.admissible).map(|r| r.label).collect();
    Ok((
        json!({ "p_rank": p_rank }),
        json!({ "max_admissible_rho": traces::max_admissible_rho(&rows), "excluded": excluded }),
        json!({ "rows": rows }),
        "endomorphism types of an abelian surface allowed by the p-rank".into(),
    ))
}

fn ns_height(config: &PathBuf, section: &PathBuf) -> Result<Body> {
    let c = FiberConfiguration::from_json_str(&read(config)?)?;
    let s = SectionData::from_json_str(&read(section)?)?;
    let h = elliptic::section_height(&c, &s)?;
    Ok((
        json!({ "config": c.to_json(), "section": s }),
        json!({ "height": format_rational(&h.value), "positive": h.positive }),
        json!({ "contributions": h.contributions.iter().map(format_rational).collect::<Vec<_>>() }),
        "h(P) = 4 + 2 P.O - sum of local contributions".into(),
    ))
}

fn ns_disc(config: &PathBuf, heights: &[String], torsion: u64) -> Result<Body> {
    let c = FiberConfiguration::from_json_str(&read(config)?)?;
    let hs = heights.iter().map(|h| parse_rational(h)).collect::<Result<Vec<_>>>()?;
    let gram: Vec<Vec<exact::Rational>> = (0..hs.len())
        .map(|i| (0..hs.len()).map(|j| if i == j { hs[i].clone() } else { exact::rat(0, 1) }).collect())
        .collect();
    let d = elliptic::shioda_tate_disc(&c, &gram, torsion)?;
    let (triv, euler) = elliptic::trivial_lattice(&c);
    Ok((
        json!({ "config": c.to_json(), "heights": heights, "torsion": torsion }),
        json!({ "determinant": format_rational(&d) }),
        json!({ "trivial_determinant": triv.determinant().to_string(), "trivial_rank": triv.rank(), "euler": euler }),
        "det NS = det Triv * (-1)^r det(heights) / |tors|^2".into(),
    ))
}

fn ns_scan(ctx: &Ctx, arg: &str, sign: Option<Sign>) -> Result<Body> {
    let l = ctx.catalog.lattice(arg, sign)?;
    let r = elliptic::ns_overlattice_scan(&l)?;
    Ok((
        json!({ "lattice": arg }),
        serde_json::to_value(&r).expect("serializable"),
        json!({}),
        "proper even overlattices correspond to nonzero isotropic elements".into(),
    ))
}

fn reproduce_all(ctx: &Ctx) -> (Body, bool) {
    let rows = reproduce::run_all(&ctx.catalog, ctx.strategy);
    let passed = rows.iter().filter(|r| r.passed).count();
    let all = passed == rows.len();
    let summary: Vec<Value> = rows
        .iter()
        .map(|r| json!({ "id": r.id, "name": r.name, "anchor": r.anchor, "passed": r.passed, "elapsed_ms": r.elapsed_ms }))
        .collect();
    let details: serde_json::Map<String, Value> = rows.iter().map(|r| (r.id.to_string(), r.detail.clone())).collect();
    (
        (
            json!({}),
            json!({ "criteria": summary, "passed": passed, "total": rows.len() }),
            Value::Object(details),
            format!("PASS {passed}/{}", rows.len()),
        ),
        all,
    )
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Lattice(LatticeCmd::Invariants { .. }) => "lattice invariants",
        Command::Fqf(FqfCmd::Show { .. }) => "fqf show",
        Command::Code(CodeCmd::Search { .. }) => "code search",
        Command::Code(CodeCmd::ToLattice { .. }) => "code to-lattice",
        Command::Glue(GlueCmd::Theorem2 { .. }) => "glue theorem2",
        Command::Glue(GlueCmd::Embed { .. }) => "glue embed",
        Command::Trace(TraceCmd::Lefschetz { .. }) => "trace lefschetz",
        Command::Trace(TraceCmd::Mumford { .. }) => "trace mumford",
        Command::Ns(NsCmd::Height { .. }) => "ns height",
        Command::Ns(NsCmd::Disc { .. }) => "ns disc",
        Command::Ns(NsCmd::Scan { .. }) => "ns scan",
        Command::Reproduce(ReproduceCmd::All) => "reproduce all",
    }
}

/// Returns the body and whether the run counts as an internal failure.
fn dispatch(ctx: &Ctx, command: &Command) -> Result<(Body, bool)> {
    let ok = |b: Body| Ok((b, false));
    match command {
        Command::Lattice(LatticeCmd::Invariants { lattice, sign }) => {
            ok(lattice_invariants(ctx, lattice, sign.sign())?)
        }
        Command::Fqf(FqfCmd::Show { lattice, sign }) => ok(fqf_show(ctx, lattice, sign.sign())?),
        Command::Code(CodeCmd::Search { dim, weights, length }) => ok(code_search(ctx, *dim, weights, *length)?),
        Command::Code(CodeCmd::ToLattice { file }) => ok(code_to_lattice(ctx, file)?),
        Command::Glue(GlueCmd::Theorem2 { p, sigma }) => ok(glue_theorem2(*p, *sigma)?),
        Command::Glue(GlueCmd::Embed { lattice, ambient, sign }) => ok(glue_embed(ctx, lattice, ambient, sign.sign())?),
        Command::Trace(TraceCmd::Lefschetz { eigs }) => ok(trace_lefschetz(eigs)?),
        Command::Trace(TraceCmd::Mumford { p_rank }) => ok(trace_mumford(*p_rank)?),
        Command::Ns(NsCmd::Height { config, section }) => ok(ns_height(config, section)?),
        Command::Ns(NsCmd::Disc { config, height, torsion }) => ok(ns_disc(config, height, *torsion)?),
        Command::Ns(NsCmd::Scan { lattice, sign }) => ok(ns_scan(ctx, lattice, sign.sign())?),
        Command::Reproduce(ReproduceCmd::All) => {
            let (body, all) = reproduce_all(ctx);
            Ok((body, !all))
        }
    }
}

/// Canonical JSON: keys sorted, two-space indentation, trailing newline.
pub fn render_json(report: &Report) -> String {
    let v = serde_json::to_value(report).expect("serializable");
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

pub fn render_text(report: &Report) -> String {
    let mut out = format!("command: {}\n", report.command);
    if report.command == "reproduce all" {
        for row in report.result["criteria"].as_array().into_iter().flatten() {
            let verdict = if row["passed"].as_bool() == Some(true) { "PASS" } else { "FAIL" };
            out += &format!(
                "{verdict} [{}] {}: \"{}\"\n",
                row["id"],
                row["name"].as_str().unwrap_or(""),
                row["anchor"].as_str().unwrap_or("")
            );
        }
        out += &format!("elapsed_ms: {}\n{}\n", report.elapsed_ms, report.anchor);
        return out;
    }
    out += &format!("inputs: {}\n", report.inputs);
    out += &format!("result: {}\n", report.result);
    out += &format!("witnesses: {}\n", report.witnesses);
    out += &format!("elapsed_ms: {}\n", report.elapsed_ms);
    out += &format!("anchor: \"{}\"\n", report.anchor);
    out
}

/// Parses `argv` (including the program name), runs the command and renders
/// the report. Exit codes: 0 on a clean run whatever the verdict, 2 on
/// malformed input, 1 when `reproduce all` has a failing check.
pub fn execute<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let fail = |e: Error| Outcome { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") };
    let catalog = match Catalog::resolve(cli.catalog.as_deref()) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let strategy = if cli.sequential { Strategy::Sequential } else { Strategy::default() };
    let ctx = Ctx { catalog, strategy };
    let start = Instant::now();
    let ((inputs, result, witnesses, anchor), internal_failure) = match dispatch(&ctx, &cli.command) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let elapsed_ms = if cli.no_timing { 0 } else { start.elapsed().as_millis() as u64 };
    let report = Report { command: command_name(&cli.command).into(), inputs, result, witnesses, elapsed_ms, anchor };
    let stdout = match cli.format {
        Format::Json => render_json(&report),
        Format::Text => render_text(&report),
    };
    Outcome { code: if internal_failure { 1 } else { 0 }, stdout, stderr: String::new() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Outcome {
        execute(std::iter::once("k3cusps").chain(args.iter().copied()))
    }

    fn json_of(o: &Outcome) -> Value {
        serde_json::from_str(&o.stdout).unwrap()
    }

    #[test]
    fn lefschetz_command() {
        let o = run(&["trace", "lefschetz", "--eigs", "w,w,w2,w2"]);
        assert_eq!(o.code, 0);
        assert_eq!(json_of(&o)["result"]["fixed_points"], 9);
    }

    #[test]
    fn theorem2_command_reports_mismatch() {
        let o = run(&["glue", "theorem2", "--p", "7", "--sigma", "2"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        assert_eq!(json_of(&o)["result"]["obstruction"], "FormMismatch");
    }

    #[test]
    fn malformed_input_exits_2() {
        assert_eq!(run(&["trace", "lefschetz", "--eigs", "w,x"]).code, 2);
        assert_eq!(run(&["glue", "theorem2", "--p", "3", "--sigma", "2"]).code, 2);
        assert_eq!(run(&["lattice", "invariants", "A2"]).code, 2);
        assert_eq!(run(&["nonsense"]).code, 2);
        assert_eq!(run(&["--help"]).code, 0);
    }

    #[test]
    fn json_is_canonical_and_round_trips() {
        let o = run(&["--no-timing", "lattice", "invariants", "N0"]);
        let v = json_of(&o);
        let again = serde_json::to_string_pretty(&v).unwrap() + "\n";
        assert_eq!(again, o.stdout);
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(o, run(&["--no-timing", "lattice", "invariants", "N0"]));
    }

    #[test]
    fn text_mode_has_timing_and_anchor() {
        let o = run(&["--format", "text", "lattice", "invariants", "A2", "--neg"]);
        assert!(o.stdout.contains("elapsed_ms: "));
        assert!(o.stdout.contains("anchor: \""));
    }
}
