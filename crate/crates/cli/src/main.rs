//! Command-line driver: parse curves and points over F_p(t) or Q(t), run
//! divisor-sequence scans and growth checks, and emit text, JSON, or CSV
//! reports.
//!
//! Every JSON report starts with a one-line header object carrying the full
//! run configuration; `verify` re-reads that header, recomputes the report,
//! and compares byte-for-byte. Results go to stdout, progress and warnings
//! to stderr. Exit codes: 0 success, 1 verification mismatch, 2 input error.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use eds_core::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde_json::{json, Value};
use std::fmt::Write as _;

#[derive(Parser)]
#[command(name = "eds", about = "Effective divisor sequences on elliptic curves over rational function fields", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the divisor sequence D_(nP+Q) for n = 1..=n_max
    Seq(ScanArgs),
    /// Scan for primitive divisors: support accumulation and new-place flags
    Zsigmondy(ScanArgs),
    /// Check the valuation growth law place by place along multiples of P
    Growth(GrowthArgs),
    /// Tabulate naive height against twice the divisor degree
    Heights(ScanArgs),
    /// Certified admissibility criterion queries
    Criterion {
        #[command(subcommand)]
        which: CriterionCommand,
    },
    /// Built-in demonstrations
    Demo {
        #[command(subcommand)]
        which: DemoCommand,
    },
    /// Re-read a JSON report and recompute it, comparing byte-for-byte
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum CriterionCommand {
    /// Admissibility of (p, r) pairs over a grid
    Table(TableArgs),
    /// Partial divisor-weight sum and its certified closed bound
    Sum(SumArgs),
}

#[derive(Subcommand)]
enum DemoCommand {
    /// Supersingular counterexample: supports trapped in a fixed set
    Supersingular(DemoArgs),
}

/// Curve and point flags shared by the sequence-style subcommands.
#[derive(Args)]
struct CurveArgs {
    /// Field characteristic: 0 for the rationals, otherwise a prime
    #[arg(long = "p")]
    p: u64,
    /// Coefficient A of y^2 = x^3 + A*x + B, e.g. "-t^2"
    #[arg(long = "A", allow_hyphen_values = true)]
    a: String,
    /// Coefficient B, e.g. "t^2"
    #[arg(long = "B", allow_hyphen_values = true)]
    b: String,
    /// Base point P: "(x, y)" with coordinate expressions
    #[arg(long = "P", allow_hyphen_values = true)]
    point: String,
    /// Torsion translate Q: "(x, y)" or "O" for the zero point
    #[arg(long = "Q", default_value = "O", allow_hyphen_values = true)]
    q: String,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    curve: CurveArgs,
    /// Largest index n to compute
    #[arg(long, default_value_t = 40)]
    n_max: u32,
    /// Seed for randomized equal-degree splitting
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Track supports only, skipping multiplicities (required when p = 3)
    #[arg(long)]
    support_only: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct GrowthArgs {
    #[command(flatten)]
    curve: CurveArgs,
    /// Place to check: "inf" or a monic irreducible polynomial; when omitted,
    /// every place entering the sequence by n = 6 is checked
    #[arg(long)]
    place: Option<String>,
    #[arg(long, default_value_t = 30)]
    n_max: u32,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct TableArgs {
    /// Comma-separated characteristics, 0 for the rationals
    #[arg(long, default_value = "0,5,7,11,13,17,19,23,29")]
    p_list: String,
    /// Largest torsion order r in the grid (rows run from r = 2)
    #[arg(long, default_value_t = 24)]
    r_max: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SumArgs {
    /// Number of terms of the partial sum
    #[arg(long)]
    n: u64,
    /// Field characteristic, 0 for the rationals
    #[arg(long)]
    p: u64,
    /// Torsion order
    #[arg(long)]
    r: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct DemoArgs {
    /// Field characteristic (an odd prime; 3 and 5 are the stock examples)
    #[arg(long)]
    p: u64,
    /// Largest Frobenius exponent l in the indices p^l
    #[arg(long, default_value_t = 3)]
    l_max: u32,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// File holding a JSON report produced by this tool
    #[arg(long)]
    input: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

impl Format {
    fn label(self) -> &'static str {
        match self {
            Format::Text => "text",
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
    fn from_label(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => bail!("unknown format {s:?}"),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    };
    std::process::exit(code);
}

/// Builds the header for the requested report, renders it, prints, and maps
/// assertion failures to exit code 1.
fn dispatch(cli: Cli) -> Result<i32> {
    let header = match &cli.command {
        Command::Seq(args) => scan_header("seq", args),
        Command::Zsigmondy(args) => scan_header("zsigmondy", args),
        Command::Heights(args) => scan_header("heights", args),
        Command::Growth(args) => json!({
            "report": "growth",
            "p": args.curve.p,
            "A": args.curve.a,
            "B": args.curve.b,
            "P": args.curve.point,
            "Q": args.curve.q,
            "place": args.place,
            "n_max": args.n_max,
            "seed": args.seed,
            "format": args.format.label(),
        }),
        Command::Criterion { which: CriterionCommand::Table(args) } => json!({
            "report": "criterion-table",
            "p_list": args.p_list,
            "r_max": args.r_max,
            "format": args.format.label(),
        }),
        Command::Criterion { which: CriterionCommand::Sum(args) } => json!({
            "report": "criterion-sum",
            "n": args.n,
            "p": args.p,
            "r": args.r,
            "format": args.format.label(),
        }),
        Command::Demo { which: DemoCommand::Supersingular(args) } => json!({
            "report": "demo-supersingular",
            "p": args.p,
            "l_max": args.l_max,
            "seed": args.seed,
            "format": args.format.label(),
        }),
        Command::Verify(args) => return verify(args),
    };
    let (out, code) = render_report(&header, true)?;
    print!("{out}");
    Ok(code)
}

fn scan_header(report: &str, args: &ScanArgs) -> Value {
    json!({
        "report": report,
        "p": args.curve.p,
        "A": args.curve.a,
        "B": args.curve.b,
        "P": args.curve.point,
        "Q": args.curve.q,
        "n_max": args.n_max,
        "seed": args.seed,
        "support_only": args.support_only,
        "format": args.format.label(),
    })
}

// --- verify ---------------------------------------------------------------------

fn verify(args: &VerifyArgs) -> Result<i32> {
    let content = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input))?;
    let first_line = content.lines().next().unwrap_or("");
    let header: Value = serde_json::from_str(first_line)
        .context("first line is not a JSON report header")?;
    let kind = header
        .get("report")
        .and_then(Value::as_str)
        .ok_or_else(|| anyhow!("header has no \"report\" field"))?
        .to_owned();
    if field_str(&header, "format")? != "json" {
        bail!("only JSON reports carry a header and can be verified");
    }
    eprintln!("verify: recomputing {kind} report");
    let (expected, _) = render_report(&header, false)?;
    if expected == content {
        let lines = content.lines().count();
        println!("ok: {kind} report verified, {lines} lines identical");
        Ok(0)
    } else {
        let at = content
            .lines()
            .zip(expected.lines())
            .position(|(a, b)| a != b)
            .map_or_else(|| content.lines().count().min(expected.lines().count()) + 1, |i| i + 1);
        println!("mismatch: {kind} report differs from recomputation at line {at}");
        Ok(1)
    }
}

// --- shared rendering machinery ---------------------------------------------------

/// Renders the report described by `header` to a stdout string plus exit
/// code. Pure given the header, so `verify` can recompute byte-identically;
/// `diag` gates the stderr warnings emitted on the direct command path.
fn render_report(header: &Value, diag: bool) -> Result<(String, i32)> {
    match field_str(header, "report")? {
        "seq" | "zsigmondy" | "heights" => with_field(field_u64(header, "p")?, header, diag, render_scan),
        "growth" => with_field(field_u64(header, "p")?, header, diag, render_growth),
        "criterion-table" => render_criterion_table(header),
        "criterion-sum" => render_criterion_sum(header),
        "demo-supersingular" => render_demo(header, diag),
        other => bail!("unknown report kind {other:?}"),
    }
}

/// Dispatches on the characteristic: 0 runs over Q, a prime over F_p.
fn with_field(
    p: u64,
    header: &Value,
    diag: bool,
    run: impl Fn(&dyn FieldOps, &Value, bool) -> Result<(String, i32)>,
) -> Result<(String, i32)> {
    if p == 0 {
        run(&Rationals, header, diag)
    } else {
        let field = PrimeField::new(p).map_err(|e| anyhow!("--p {p}: {e}"))?;
        run(&field, header, diag)
    }
}

/// Object-safe shim over the two base fields, so the renderers stay
/// monomorphic while the field choice happens at runtime.
trait FieldOps {
    fn render_scan(&self, header: &Value, diag: bool) -> Result<(String, i32)>;
    fn render_growth(&self, header: &Value, diag: bool) -> Result<(String, i32)>;
}

impl<F: Field + PlaceSplit> FieldOps for F {
    fn render_scan(&self, header: &Value, diag: bool) -> Result<(String, i32)> {
        render_scan_typed(self, header, diag)
    }
    fn render_growth(&self, header: &Value, diag: bool) -> Result<(String, i32)> {
        render_growth_typed(self, header, diag)
    }
}

fn render_scan(field: &dyn FieldOps, header: &Value, diag: bool) -> Result<(String, i32)> {
    field.render_scan(header, diag)
}

fn render_growth(field: &dyn FieldOps, header: &Value, diag: bool) -> Result<(String, i32)> {
    field.render_growth(header, diag)
}

fn field_str<'a>(header: &'a Value, key: &str) -> Result<&'a str> {
    header
        .get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| anyhow!("header field {key:?} missing or not a string"))
}

fn field_u64(header: &Value, key: &str) -> Result<u64> {
    header
        .get(key)
        .and_then(Value::as_u64)
        .ok_or_else(|| anyhow!("header field {key:?} missing or not an integer"))
}

fn field_bool(header: &Value, key: &str) -> Result<bool> {
    header
        .get(key)
        .and_then(Value::as_bool)
        .ok_or_else(|| anyhow!("header field {key:?} missing or not a boolean"))
}

fn header_line(header: &Value) -> String {
    let mut line = serde_json::to_string(header).expect("header serializes");
    line.push('\n');
    line
}

// --- curve construction and diagnostics ---------------------------------------------

struct ScanSetup<F: Field> {
    curve: CurveModel<F>,
    p: CurvePoint<F>,
    q: CurvePoint<F>,
}

/// Parses and validates the curve block of a header: points must lie on the
/// curve and P must not be torsion. Diagnostics (Q's torsion order, constant
/// j, inconclusive torsion) go to stderr when `diag` is set.
fn build_scan_setup<F: Field + PlaceSplit>(
    field: &F,
    header: &Value,
    diag: bool,
) -> Result<ScanSetup<F>> {
    let a = parse_ratfunc(field, field_str(header, "A")?).map_err(|e| anyhow!("--A: {e}"))?;
    let b = parse_ratfunc(field, field_str(header, "B")?).map_err(|e| anyhow!("--B: {e}"))?;
    let curve = CurveModel::new(a, b)?;
    let p = build_point(field, &curve, field_str(header, "P")?, "--P")?;
    let q = build_point(field, &curve, field_str(header, "Q")?, "--Q")?;
    if diag {
        if curve.has_constant_j() {
            eprintln!("warning: the curve has constant j-invariant");
        }
        match is_torsion(&curve, &q)? {
            TorsionStatus::Torsion { order } => eprintln!("Q torsion order: {order}"),
            TorsionStatus::NonTorsion => {
                eprintln!("warning: Q is not a torsion point; translate semantics do not apply")
            }
            TorsionStatus::Inconclusive { reason } => {
                eprintln!("warning: torsion status of Q is inconclusive: {reason}")
            }
        }
    }
    match is_torsion(&curve, &p)? {
        TorsionStatus::Torsion { order } => {
            bail!("--P: point is torsion of order {order}; the sequence needs a non-torsion base")
        }
        TorsionStatus::Inconclusive { reason } => {
            if diag {
                eprintln!("warning: torsion status of P is inconclusive: {reason}");
            }
        }
        TorsionStatus::NonTorsion => {}
    }
    Ok(ScanSetup { curve, p, q })
}

fn build_point<F: Field>(
    field: &F,
    curve: &CurveModel<F>,
    src: &str,
    flag: &str,
) -> Result<CurvePoint<F>> {
    match parse_point(field, src).map_err(|e| anyhow!("{flag}: {e}"))? {
        None => Ok(CurvePoint::Zero),
        Some((x, y)) => curve.point(x, y).map_err(|e| anyhow!("{flag}: {e}")),
    }
}

// --- seq / zsigmondy / heights -----------------------------------------------------

fn render_scan_typed<F: Field + PlaceSplit>(
    field: &F,
    header: &Value,
    diag: bool,
) -> Result<(String, i32)> {
    let kind = field_str(header, "report")?.to_owned();
    let format = Format::from_label(field_str(header, "format")?)?;
    let n_max = u32::try_from(field_u64(header, "n_max")?).context("--n-max too large")?;
    let seed = field_u64(header, "seed")?;
    let support_only = field_bool(header, "support_only")?;
    let setup = build_scan_setup(field, header, diag)?;
    if diag {
        eprintln!("{kind}: walking n = 1..={n_max}");
    }

    if kind == "heights" {
        return render_heights_rows(&setup, n_max, seed, header, format);
    }

    let opts = ScanOptions { n_max, seed, support_only };
    let records = zsigmondy_scan(&setup.curve, &setup.p, &setup.q, &opts)?;
    let mut out = String::new();
    match format {
        Format::Json => {
            out.push_str(&header_line(header));
            for record in &records {
                if kind == "seq" {
                    let row = json!({
                        "n": record.n,
                        "zero": record.point_is_zero,
                        "degree": record.degree,
                        "divisor": record.divisor.as_ref().map(|d| d.to_string()),
                    });
                    let _ = writeln!(out, "{row}");
                } else {
                    let _ = writeln!(out, "{}", record.to_json());
                }
            }
        }
        Format::Csv => {
            if kind == "seq" {
                out.push_str("n,zero,degree,divisor\n");
                for record in &records {
                    let divisor = record.divisor.as_ref().map_or(String::new(), |d| d.to_string());
                    let degree = record.degree.map_or(String::new(), |d| d.to_string());
                    let _ = writeln!(
                        out,
                        "{},{},{},\"{}\"",
                        record.n, record.point_is_zero, degree, divisor
                    );
                }
            } else {
                out.push_str(ScanRecord::<F>::csv_header());
                out.push('\n');
                for record in &records {
                    let _ = writeln!(out, "{}", record.to_csv_row());
                }
            }
        }
        Format::Text => {
            if kind == "seq" {
                let _ = writeln!(out, "{:>4}  {:>6}  divisor", "n", "degree");
                for record in &records {
                    if record.point_is_zero {
                        let _ = writeln!(out, "{:>4}  {:>6}  (zero point)", record.n, "-");
                        continue;
                    }
                    match (&record.divisor, record.degree) {
                        (Some(d), Some(deg)) => {
                            let _ = writeln!(out, "{:>4}  {:>6}  {}", record.n, deg, d);
                        }
                        _ => {
                            let _ = writeln!(
                                out,
                                "{:>4}  {:>6}  support {}",
                                record.n,
                                "-",
                                support_text(&record.support)
                            );
                        }
                    }
                }
            } else {
                let _ = writeln!(out, "{:>4}  {:>6}  {:>9}  new places", "n", "degree", "primitive");
                for record in &records {
                    let degree = record.degree.map_or("-".to_owned(), |d| d.to_string());
                    let new = if record.new_places.is_empty() {
                        "-".to_owned()
                    } else {
                        support_text(&record.new_places)
                    };
                    let _ = writeln!(
                        out,
                        "{:>4}  {:>6}  {:>9}  {}",
                        record.n,
                        degree,
                        if record.has_primitive { "yes" } else { "no" },
                        new
                    );
                }
                let misses: Vec<String> = records
                    .iter()
                    .filter(|r| !r.has_primitive)
                    .map(|r| r.n.to_string())
                    .collect();
                if misses.is_empty() {
                    let _ = writeln!(out, "primitive divisor at every index");
                } else {
                    let _ = writeln!(out, "no primitive divisor at: {}", misses.join(", "));
                }
            }
        }
    }
    Ok((out, 0))
}

fn render_heights_rows<F: Field + PlaceSplit>(
    setup: &ScanSetup<F>,
    n_max: u32,
    seed: u64,
    header: &Value,
    format: Format,
) -> Result<(String, i32)> {
    let rows = height_gap_report(&setup.curve, &setup.p, &setup.q, n_max, seed)?;
    let summary = max_gap(&rows);
    let mut out = String::new();
    match format {
        Format::Json => {
            out.push_str(&header_line(header));
            for row in &rows {
                let _ = writeln!(
                    out,
                    "{}",
                    json!({
                        "n": row.n,
                        "naive": row.naive,
                        "twice_degree": row.twice_degree,
                        "gap": row.gap,
                    })
                );
            }
            if let Some((at, max)) = summary {
                let _ = writeln!(out, "{}", json!({ "max_gap": max, "attained_at": at }));
            }
        }
        Format::Csv => {
            out.push_str("n,naive,twice_degree,gap\n");
            for row in &rows {
                let _ = writeln!(out, "{},{},{},{}", row.n, row.naive, row.twice_degree, row.gap);
            }
        }
        Format::Text => {
            let _ = writeln!(out, "{:>4}  {:>8}  {:>12}  {:>4}", "n", "naive", "twice_degree", "gap");
            for row in &rows {
                let _ = writeln!(
                    out,
                    "{:>4}  {:>8}  {:>12}  {:>4}",
                    row.n, row.naive, row.twice_degree, row.gap
                );
            }
            if let Some((at, max)) = summary {
                let _ = writeln!(out, "max |gap| = {max}, first attained at n = {at}");
            }
        }
    }
    Ok((out, 0))
}

fn support_text<F: Field>(set: &SupportSet<F>) -> String {
    let finite = set.finite_part();
    match (finite.is_one(), set.at_infinity()) {
        (true, false) => "(empty)".to_owned(),
        (true, true) => "inf".to_owned(),
        (false, false) => finite.to_string(),
        (false, true) => format!("{finite}, inf"),
    }
}

// --- growth -----------------------------------------------------------------------

fn render_growth_typed<F: Field + PlaceSplit>(
    field: &F,
    header: &Value,
    diag: bool,
) -> Result<(String, i32)> {
    let format = Format::from_label(field_str(header, "format")?)?;
    let n_max = u32::try_from(field_u64(header, "n_max")?).context("--n-max too large")?;
    let seed = field_u64(header, "seed")?;
    let setup = build_scan_setup(field, header, diag)?;

    let places: Vec<Place<F>> = match header.get("place").and_then(Value::as_str) {
        Some(src) => vec![parse_place(field, src).map_err(|e| anyhow!("--place: {e}"))?],
        None => discover_places(&setup.curve, &setup.p, seed)?,
    };
    if places.is_empty() {
        bail!("no places entered the sequence by n = 6; pass --place explicitly");
    }
    if diag {
        eprintln!("growth: checking {} place(s) up to n = {n_max}", places.len());
    }

    let mut reports = Vec::with_capacity(places.len());
    for place in &places {
        reports.push(growth_law_verify(&setup.curve, &setup.p, place, n_max)?);
    }
    let total_mismatches: u32 = reports.iter().map(|r| r.mismatches).sum();

    let mut out = String::new();
    match format {
        Format::Json => {
            out.push_str(&header_line(header));
            for report in &reports {
                let rows: Vec<Value> = report
                    .rows
                    .iter()
                    .map(|row| {
                        json!({
                            "n": row.n,
                            "branch": row.branch.label(),
                            "expected": row.expected,
                            "actual": row.actual,
                            "matched": row.matched,
                        })
                    })
                    .collect();
                let _ = writeln!(
                    out,
                    "{}",
                    json!({
                        "place": report.place.to_string(),
                        "apparition": report.apparition,
                        "hasse_order": report.hasse_order,
                        "mismatches": report.mismatches,
                        "rows": rows,
                    })
                );
            }
        }
        Format::Csv => {
            out.push_str("place,n,branch,expected,actual,matched\n");
            for report in &reports {
                for row in &report.rows {
                    let expected = row.expected.map_or(String::new(), |e| e.to_string());
                    let _ = writeln!(
                        out,
                        "\"{}\",{},{},{},{},{}",
                        report.place,
                        row.n,
                        row.branch.label(),
                        expected,
                        row.actual,
                        row.matched
                    );
                }
            }
        }
        Format::Text => {
            for report in &reports {
                let hasse = report
                    .hasse_order
                    .map_or("-".to_owned(), |h| h.to_string());
                let _ = writeln!(
                    out,
                    "place {} (apparition {}, local hasse order {}): {} mismatch(es)",
                    report.place, report.apparition, hasse, report.mismatches
                );
                for row in &report.rows {
                    if row.actual == 0 && row.expected == Some(0) {
                        continue;
                    }
                    let expected = row.expected.map_or("-".to_owned(), |e| e.to_string());
                    let _ = writeln!(
                        out,
                        "  n = {:>3}  {:<12}  expected {:>3}  actual {:>3}  {}",
                        row.n,
                        row.branch.label(),
                        expected,
                        row.actual,
                        if row.matched { "ok" } else { "MISMATCH" }
                    );
                }
            }
            let _ = writeln!(out, "total mismatches: {total_mismatches}");
        }
    }
    Ok((out, if total_mismatches > 0 { 1 } else { 0 }))
}

/// Places entering supp D_nP for n <= 6, in order of apparition.
fn discover_places<F: Field + PlaceSplit>(
    curve: &CurveModel<F>,
    p: &CurvePoint<F>,
    seed: u64,
) -> Result<Vec<Place<F>>> {
    let mut walker = CurvePoint::Zero;
    let mut places: Vec<Place<F>> = Vec::new();
    for _ in 1..=6u32 {
        walker = curve.add(&walker, p)?;
        if walker.is_zero() {
            continue;
        }
        let divisor = divisor_of_point(curve, &walker, seed)?;
        for (factor, _) in divisor.entries() {
            // over Q the factors are only gcd-free, not irreducible; skip
            // anything Place::finite rejects
            if let Ok(place) = Place::finite(factor.clone()) {
                if !places.contains(&place) {
                    places.push(place);
                }
            }
        }
        if divisor.infinity() > 0 && !places.contains(&Place::Infinity) {
            places.push(Place::Infinity);
        }
    }
    Ok(places)
}

// --- criterion ----------------------------------------------------------------------

fn render_criterion_table(header: &Value) -> Result<(String, i32)> {
    let format = Format::from_label(field_str(header, "format")?)?;
    let r_max = field_u64(header, "r_max")?;
    if r_max < 2 {
        bail!("--r-max must be at least 2");
    }
    let p_list: Vec<u64> = field_str(header, "p_list")?
        .split(',')
        .map(|s| s.trim().parse::<u64>().with_context(|| format!("--p-list entry {s:?}")))
        .collect::<Result<_>>()?;
    if p_list.is_empty() {
        bail!("--p-list is empty");
    }

    let mut grid = Vec::new();
    for &p in &p_list {
        for r in 2..=r_max {
            grid.push((p, r, pair_admissible(p, r)?));
        }
    }

    let mut out = String::new();
    match format {
        Format::Json => {
            out.push_str(&header_line(header));
            for (p, r, ok) in &grid {
                let _ = writeln!(out, "{}", json!({ "p": p, "r": r, "admissible": ok }));
            }
        }
        Format::Csv => {
            out.push_str("p,r,admissible\n");
            for (p, r, ok) in &grid {
                let _ = writeln!(out, "{p},{r},{ok}");
            }
        }
        Format::Text => {
            let _ = write!(out, "{:>4}", "r\\p");
            for p in &p_list {
                let _ = write!(out, "  {:>3}", p);
            }
            out.push('\n');
            for r in 2..=r_max {
                let _ = write!(out, "{:>4}", r);
                for &p in &p_list {
                    let ok = grid
                        .iter()
                        .find(|(gp, gr, _)| *gp == p && *gr == r)
                        .map(|(_, _, ok)| *ok)
                        .expect("grid covers the full rectangle");
                    let _ = write!(out, "  {:>3}", if ok { "yes" } else { "no" });
                }
                out.push('\n');
            }
        }
    }
    Ok((out, 0))
}

fn render_criterion_sum(header: &Value) -> Result<(String, i32)> {
    let format = Format::from_label(field_str(header, "format")?)?;
    let n = field_u64(header, "n")?;
    let p = field_u64(header, "p")?;
    let r = field_u64(header, "r")?;
    let sum = s_sum(n, p, r)?;
    let bound = closed_bound(p, r)?;
    let within = sum <= bound.upper;
    let half = one_half();
    let side = if bound.certified_below(&half) {
        "below"
    } else if bound.certified_at_least(&half) {
        "at-least"
    } else {
        "undecided"
    };

    let mut out = String::new();
    match format {
        Format::Json => {
            out.push_str(&header_line(header));
            let _ = writeln!(
                out,
                "{}",
                json!({
                    "exact": sum.to_string(),
                    "decimal": decimal(&sum, 8),
                    "bound_upper": bound.upper.to_string(),
                    "bound_upper_decimal": decimal(&bound.upper, 8),
                    "within_bound": within,
                    "half_side": side,
                })
            );
        }
        Format::Csv => {
            out.push_str("n,p,r,exact,decimal,bound_upper_decimal,within_bound,half_side\n");
            let _ = writeln!(
                out,
                "{n},{p},{r},{},{},{},{within},{side}",
                sum,
                decimal(&sum, 8),
                decimal(&bound.upper, 8)
            );
        }
        Format::Text => {
            let _ = writeln!(out, "s(n = {n}, p = {p}, r = {r}) = {} ~ {}", sum, decimal(&sum, 8));
            let _ = writeln!(
                out,
                "closed bound upper = {} ~ {}",
                bound.upper,
                decimal(&bound.upper, 8)
            );
            let _ = writeln!(out, "within bound: {}", if within { "yes" } else { "NO" });
            let _ = writeln!(out, "certified side of 1/2: {side}");
        }
    }
    Ok((out, if within { 0 } else { 1 }))
}

/// Fixed-point rendering of a rational, truncated toward zero. Exact integer
/// arithmetic keeps the output byte-stable across platforms.
fn decimal(value: &BigRational, places: u32) -> String {
    let sign = if value.is_negative() { "-" } else { "" };
    let magnitude = value.abs();
    let scale = BigInt::from(10u32).pow(places);
    let scaled = (magnitude.numer() * &scale) / magnitude.denom();
    let int_part = &scaled / &scale;
    let frac_part = &scaled % &scale;
    let mut frac = frac_part.to_string();
    while (frac.len() as u32) < places {
        frac.insert(0, '0');
    }
    format!("{sign}{int_part}.{frac}")
}

// --- demo ----------------------------------------------------------------------------

fn render_demo(header: &Value, diag: bool) -> Result<(String, i32)> {
    let format = Format::from_label(field_str(header, "format")?)?;
    let p = field_u64(header, "p")?;
    let l_max = u32::try_from(field_u64(header, "l_max")?).context("--l-max too large")?;
    let seed = field_u64(header, "seed")?;
    let field = PrimeField::new(p).map_err(|e| anyhow!("--p {p}: {e}"))?;
    if diag {
        eprintln!("demo: building the supersingular example over F_{p}");
    }
    let demo = build_demo(field)?;
    let q = build_torsion_q(&demo)?;
    let frobenius_ok = frobenius_identity_check(&demo, 1, &demo.point)?
        && frobenius_identity_check(&demo, 1, &demo.curve.add(&demo.point, &q)?)?;
    let non_torsion = matches!(is_torsion(&demo.curve, &demo.point)?, TorsionStatus::NonTorsion);
    if diag {
        eprintln!("demo: scanning indices p^l for l = 0..={l_max}");
    }
    let report = failure_demonstration(&demo, &q, l_max, seed)?;
    let ok = frobenius_ok && non_torsion && report.all_contained;

    let mut out = String::new();
    match format {
        Format::Json => {
            out.push_str(&header_line(header));
            let _ = writeln!(
                out,
                "{}",
                json!({ "frobenius_k1": frobenius_ok, "point_non_torsion": non_torsion })
            );
            let _ = writeln!(out, "{}", report.to_json());
        }
        Format::Csv => {
            out.push_str("l,index,route,support_finite,support_infinity,contained,has_primitive\n");
            for row in &report.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},\"{}\",{},{},{}",
                    row.ell,
                    row.index,
                    row.route.label(),
                    row.support.finite_part(),
                    row.support.at_infinity(),
                    row.contained,
                    row.has_primitive
                );
            }
        }
        Format::Text => {
            let _ = writeln!(
                out,
                "supersingular demo over F_{p}: curve y^2 = x^3 + {}*s^2*x + {}*s^3, s = {}",
                demo.alpha, demo.beta, demo.s
            );
            let _ = writeln!(out, "fixed set F: {}", support_text(&report.fixed_set));
            let _ = writeln!(
                out,
                "frobenius identity at k = 1: {}",
                if frobenius_ok { "exact" } else { "FAILED" }
            );
            let _ = writeln!(
                out,
                "base point non-torsion: {}",
                if non_torsion { "certified" } else { "NOT CERTIFIED" }
            );
            for row in &report.rows {
                let _ = writeln!(
                    out,
                    "  l = {}  index = {:>5}  route = {:<11}  contained = {:<3}  primitive = {}",
                    row.ell,
                    row.index,
                    row.route.label(),
                    if row.contained { "yes" } else { "NO" },
                    if row.has_primitive { "yes" } else { "no" }
                );
            }
            let _ = writeln!(
                out,
                "all supports contained in F: {}",
                if report.all_contained { "yes" } else { "NO" }
            );
        }
    }
    Ok((out, if ok { 0 } else { 1 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn decimal_truncates_toward_zero() {
        let r = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert_eq!(decimal(&r, 6), "0.333333");
        let neg = BigRational::new(BigInt::from(-7), BigInt::from(2));
        assert_eq!(decimal(&neg, 3), "-3.500");
        assert_eq!(decimal(&BigRational::zero(), 2), "0.00");
    }

    #[test]
    fn format_labels_round_trip() {
        for f in [Format::Text, Format::Json, Format::Csv] {
            assert!(matches!(Format::from_label(f.label()), Ok(g) if g == f));
        }
        assert!(Format::from_label("yaml").is_err());
    }

    #[test]
    fn header_round_trips_through_serde() {
        let header = json!({
            "report": "zsigmondy",
            "p": 5u64,
            "A": "-t^2",
            "B": "t^2",
            "P": "(t, t)",
            "Q": "O",
            "n_max": 10u32,
            "seed": 1u64,
            "support_only": false,
            "format": "json",
        });
        let line = header_line(&header);
        let parsed: Value = serde_json::from_str(line.trim_end()).unwrap();
        assert_eq!(header_line(&parsed), line);
        assert_eq!(field_u64(&parsed, "p").unwrap(), 5);
        assert_eq!(field_str(&parsed, "A").unwrap(), "-t^2");
        assert!(!field_bool(&parsed, "support_only").unwrap());
    }
}
