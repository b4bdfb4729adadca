//! Command-line front end: parse a field and an equation, count solutions,
//! cross-check closed forms against enumeration, sweep parameter grids, and
//! verify the fiber bijections.
//!
//! Exit codes are fixed so shell harnesses can assert precisely:
//! 0 ok / 1 mismatch or internal failure / 2 parse error / 3 work cap /
//! 4 no applicable closed form.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Serialize;

use ffcount::bijections::{verify_bijection, verify_identities, BijectionError, FiberFamily};
use ffcount::counting::{
    count, BruteForceSettings, CountError, CountMethod, CountReport, Equation,
};
use ffcount::ff::FfError;
use ffcount::parse::{format_equation, parse_equation, parse_field, parse_field_size, ParseError};
use ffcount::sample::{random_carlitz, random_diagonal, random_nonzero_element};
use ffcount::{CarlitzEquation, FieldSpec};

#[derive(Parser)]
#[command(
    name = "ffcount",
    version,
    about = "Exact solution counts for diagonal and Carlitz-type equations over small finite fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count solutions of one equation over one field
    Count(CountArgs),
    /// Run the closed-form and enumeration routes side by side
    Verify(VerifyArgs),
    /// Tabulate counts over a field list and random instances
    Sweep(SweepArgs),
    /// Materialize the solution fibers and verify bijections and identities
    BijectionCheck(BijectionCheckArgs),
    /// Print the element index / polynomial table of a field
    ShowElements(ShowElementsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Tsv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Auto,
    ForceBrute,
    ForceFormula,
}

impl From<MethodArg> for CountMethod {
    fn from(arg: MethodArg) -> CountMethod {
        match arg {
            MethodArg::Auto => CountMethod::Auto,
            MethodArg::ForceBrute => CountMethod::ForceBrute,
            MethodArg::ForceFormula => CountMethod::ForceFormula,
        }
    }
}

#[derive(Args)]
struct EngineArgs {
    /// Work cap in tuple evaluations
    #[arg(long, env = "FFCOUNT_CAP", default_value_t = ffcount::DEFAULT_WORK_CAP)]
    cap: u64,
    /// Worker threads for the enumeration oracle
    #[arg(long, env = "FFCOUNT_WORKERS", default_value_t = 1)]
    workers: usize,
}

impl EngineArgs {
    fn settings(&self) -> BruteForceSettings {
        BruteForceSettings {
            work_cap: self.cap,
            workers: self.workers.max(1),
            ..BruteForceSettings::default()
        }
    }
}

#[derive(Args)]
struct CountArgs {
    /// Field, e.g. 7 or 3^2
    #[arg(long)]
    field: String,
    /// Equation, e.g. "diag a=1,1 m=1,3" (see README for the grammar)
    #[arg(long)]
    eq: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    /// Count only solutions with every coordinate nonzero
    #[arg(long)]
    restricted: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    output: OutputFormat,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    field: String,
    #[arg(long)]
    eq: String,
    #[arg(long)]
    restricted: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    output: OutputFormat,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepFamily {
    Diag,
    Carlitz,
    CarlitzClassical,
}

#[derive(Args)]
struct SweepArgs {
    /// Equation family to sample
    #[arg(long, value_enum)]
    family: SweepFamily,
    /// Comma-separated list of field sizes, e.g. 3,5,7,9
    #[arg(long, value_delimiter = ',', required = true)]
    q_list: Vec<String>,
    /// Variable-count range, e.g. 3 or 2:4
    #[arg(long, default_value = "2:3")]
    n_range: String,
    /// Largest sampled inner exponent
    #[arg(long, default_value_t = 6)]
    m_max: u64,
    /// Largest sampled outer power and right-hand exponent
    #[arg(long, default_value_t = 6)]
    k_max: u64,
    /// Random instances per (field, n) cell
    #[arg(long, default_value_t = 5)]
    per_cell: u32,
    /// Seed for the instance sampler
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    restricted: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Tsv)]
    output: OutputFormat,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args)]
struct BijectionCheckArgs {
    #[arg(long)]
    field: String,
    /// Diagonal or Carlitz equation (qh has no fiber family)
    #[arg(long)]
    eq: String,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args)]
struct ShowElementsArgs {
    #[arg(long)]
    field: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Tsv)]
    output: OutputFormat,
}

/// Failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<ParseError> for Failure {
    fn from(err: ParseError) -> Self {
        let code = match err {
            ParseError::Field(FfError::FieldTooLarge { .. }) => 3,
            _ => 2,
        };
        Failure::new(code, err.to_string())
    }
}

impl From<CountError> for Failure {
    fn from(err: CountError) -> Self {
        let code = match err {
            CountError::WorkCapExceeded { .. } => 3,
            CountError::NoApplicableFormula => 4,
            _ => 1,
        };
        Failure::new(code, err.to_string())
    }
}

impl From<BijectionError> for Failure {
    fn from(err: BijectionError) -> Self {
        let code = match err {
            BijectionError::WorkCapExceeded { .. } => 3,
            BijectionError::HypothesisFailed { .. } => 4,
            _ => 1,
        };
        Failure::new(code, err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Count(args) => cmd_count(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::BijectionCheck(args) => cmd_bijection_check(args),
        Command::ShowElements(args) => cmd_show_elements(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn hypotheses_string(report: &CountReport) -> String {
    report
        .hypotheses
        .iter()
        .map(|h| format!("{}={}", h.name, h.holds))
        .collect::<Vec<_>>()
        .join(";")
}

fn print_count_report(report: &CountReport, output: OutputFormat) {
    match output {
        OutputFormat::Json => {
            println!("{}", serde_json::to_string(report).expect("serializable"))
        }
        OutputFormat::Tsv => {
            println!("q\tn\tvalue\tmethod\trestricted\thypotheses");
            println!(
                "{}\t{}\t{}\t{}\t{}\t{}",
                report.q,
                report.n,
                report.value,
                report.method.as_str(),
                report.restricted,
                hypotheses_string(report)
            );
        }
    }
}

fn cmd_count(args: CountArgs) -> Result<(), Failure> {
    let field = parse_field(&args.field)?;
    let equation = parse_equation(&args.eq, &field)?;
    let report = count(
        &field,
        &equation,
        args.restricted,
        args.method.into(),
        &args.engine.settings(),
    )?;
    print_count_report(&report, args.output);
    Ok(())
}

#[derive(Serialize)]
struct VerifyRow {
    q: u64,
    n: usize,
    eq: String,
    restricted: bool,
    formula_method: Option<&'static str>,
    formula_value: Option<String>,
    brute_value: String,
    hypotheses: String,
    #[serde(rename = "match")]
    matches: Option<bool>,
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let field = parse_field(&args.field)?;
    let equation = parse_equation(&args.eq, &field)?;
    let settings = args.engine.settings();

    let formula = match count(
        &field,
        &equation,
        args.restricted,
        CountMethod::ForceFormula,
        &settings,
    ) {
        Ok(report) => Some(report),
        Err(CountError::NoApplicableFormula) => None,
        Err(err) => return Err(err.into()),
    };
    let brute = count(
        &field,
        &equation,
        args.restricted,
        CountMethod::ForceBrute,
        &settings,
    )?;

    let matches = formula.as_ref().map(|f| f.value == brute.value);
    let row = VerifyRow {
        q: field.q(),
        n: equation.var_count(),
        eq: format_equation(&equation),
        restricted: args.restricted,
        formula_method: formula.as_ref().map(|f| f.method.as_str()),
        formula_value: formula.as_ref().map(|f| f.value.to_string()),
        brute_value: brute.value.to_string(),
        hypotheses: formula.as_ref().map(hypotheses_string).unwrap_or_default(),
        matches,
    };
    match args.output {
        OutputFormat::Json => {
            println!("{}", serde_json::to_string(&row).expect("serializable"))
        }
        OutputFormat::Tsv => {
            println!("q\tn\teq\trestricted\tformula_method\tformula_value\tbrute_value\thypotheses\tmatch");
            println!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                row.q,
                row.n,
                row.eq,
                row.restricted,
                row.formula_method.unwrap_or(""),
                row.formula_value.as_deref().unwrap_or(""),
                row.brute_value,
                row.hypotheses,
                row.matches.map(|m| m.to_string()).unwrap_or_default(),
            );
        }
    }
    if matches == Some(false) {
        return Err(Failure::new(1, "formula and enumeration disagree"));
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepRow {
    q: u64,
    n: usize,
    eq: String,
    restricted: bool,
    hypotheses: String,
    formula_method: Option<&'static str>,
    formula_value: Option<String>,
    brute_value: Option<String>,
    #[serde(rename = "match")]
    matches: Option<bool>,
}

fn parse_n_range(text: &str) -> Result<(usize, usize), Failure> {
    let parse_one = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Failure::new(2, format!("malformed n-range {text:?}")))
    };
    let (lo, hi) = match text.split_once(':') {
        Some((lo, hi)) => (parse_one(lo)?, parse_one(hi)?),
        None => {
            let n = parse_one(text)?;
            (n, n)
        }
    };
    if lo < 2 || hi < lo {
        return Err(Failure::new(2, format!("invalid n-range {text:?}")));
    }
    Ok((lo, hi))
}

fn sweep_instance(
    family: SweepFamily,
    f: &FieldSpec,
    n: usize,
    m_max: u64,
    k_max: u64,
    rng: &mut StdRng,
) -> Equation {
    match family {
        SweepFamily::Diag => Equation::Diagonal(random_diagonal(f, n, m_max, rng)),
        SweepFamily::Carlitz => Equation::Carlitz(random_carlitz(f, n, m_max, k_max, rng)),
        SweepFamily::CarlitzClassical => {
            let b = random_nonzero_element(f, rng);
            Equation::Carlitz(
                CarlitzEquation::new(f, vec![f.one(); n], vec![1; n], 2, b, vec![1; n])
                    .expect("classical shape is valid"),
            )
        }
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    if args.q_list.is_empty() {
        return Err(Failure::new(2, "empty q-list"));
    }
    let fields: Vec<FieldSpec> = args
        .q_list
        .iter()
        .map(|text| parse_field_size(text))
        .collect::<Result<_, _>>()?;
    let (n_lo, n_hi) = parse_n_range(&args.n_range)?;
    if args.per_cell == 0 {
        return Err(Failure::new(2, "per-cell must be at least 1"));
    }
    let settings = args.engine.settings();
    let mut rng = StdRng::seed_from_u64(args.seed);

    if args.output == OutputFormat::Tsv {
        println!(
            "q\tn\teq\trestricted\thypotheses\tformula_method\tformula_value\tbrute_value\tmatch"
        );
    }
    for field in &fields {
        for n in n_lo..=n_hi {
            for _ in 0..args.per_cell {
                let equation =
                    sweep_instance(args.family, field, n, args.m_max, args.k_max, &mut rng);
                let formula = match count(
                    field,
                    &equation,
                    args.restricted,
                    CountMethod::ForceFormula,
                    &settings,
                ) {
                    Ok(report) => Some(report),
                    Err(CountError::NoApplicableFormula) => None,
                    Err(CountError::WorkCapExceeded { .. }) => None,
                    Err(err) => return Err(err.into()),
                };
                let brute = match count(
                    field,
                    &equation,
                    args.restricted,
                    CountMethod::ForceBrute,
                    &settings,
                ) {
                    Ok(report) => Some(report),
                    Err(CountError::WorkCapExceeded { .. }) => None,
                    Err(err) => return Err(err.into()),
                };
                let matches = match (&formula, &brute) {
                    (Some(f), Some(b)) => Some(f.value == b.value),
                    _ => None,
                };
                let row = SweepRow {
                    q: field.q(),
                    n,
                    eq: format_equation(&equation),
                    restricted: args.restricted,
                    hypotheses: formula.as_ref().map(hypotheses_string).unwrap_or_default(),
                    formula_method: formula.as_ref().map(|r| r.method.as_str()),
                    formula_value: formula.as_ref().map(|r| r.value.to_string()),
                    brute_value: brute.as_ref().map(|r| r.value.to_string()),
                    matches,
                };
                match args.output {
                    OutputFormat::Json => {
                        println!("{}", serde_json::to_string(&row).expect("serializable"))
                    }
                    OutputFormat::Tsv => println!(
                        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                        row.q,
                        row.n,
                        row.eq,
                        row.restricted,
                        row.hypotheses,
                        row.formula_method.unwrap_or(""),
                        row.formula_value.as_deref().unwrap_or(""),
                        row.brute_value.as_deref().unwrap_or(""),
                        row.matches.map(|m| m.to_string()).unwrap_or_default(),
                    ),
                }
                if matches == Some(false) {
                    return Err(Failure::new(1, "formula and enumeration disagree"));
                }
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct BijectionSummary {
    c: u64,
    size: u64,
    pairing_hash: String,
}

#[derive(Serialize)]
struct BijectionCheckReport<'a> {
    field: String,
    q: u64,
    n: usize,
    eq: String,
    kind: ffcount::bijections::FiberKind,
    fiber_sizes: &'a [ffcount::bijections::FiberSize],
    identities: &'a [ffcount::bijections::IdentityCheck],
    bijections: Vec<BijectionSummary>,
    pass: bool,
}

fn cmd_bijection_check(args: BijectionCheckArgs) -> Result<(), Failure> {
    let field = parse_field(&args.field)?;
    let equation = parse_equation(&args.eq, &field)?;
    let family = match &equation {
        Equation::Diagonal(eq) => FiberFamily::diagonal_with_cap(&field, eq, args.engine.cap)?,
        Equation::Carlitz(eq) => FiberFamily::carlitz_with_cap(&field, eq, args.engine.cap)?,
        Equation::QuasiHomogeneous(_) => {
            return Err(Failure::new(
                2,
                "bijection-check supports diag and carlitz equations",
            ))
        }
    };
    let mut bijections = Vec::new();
    for c in field.nonzero_elements() {
        let cert = verify_bijection(&family, c)?;
        bijections.push(BijectionSummary {
            c: c.index(),
            size: cert.size,
            pairing_hash: cert.pairing_hash,
        });
    }
    let identities = verify_identities(&family)?;
    let report = BijectionCheckReport {
        field: field.to_string(),
        q: field.q(),
        n: family.var_count(),
        eq: format_equation(&equation),
        kind: family.kind(),
        fiber_sizes: &identities.fiber_sizes,
        identities: &identities.checks,
        bijections,
        pass: identities.pass,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("serializable")
    );
    if !report.pass {
        return Err(Failure::new(1, "identity checks failed"));
    }
    Ok(())
}

#[derive(Serialize)]
struct ElementRow {
    index: u64,
    poly: String,
}

fn cmd_show_elements(args: ShowElementsArgs) -> Result<(), Failure> {
    let field = parse_field(&args.field)?;
    match args.output {
        OutputFormat::Json => {
            let rows: Vec<ElementRow> = field
                .elements()
                .map(|x| ElementRow {
                    index: x.index(),
                    poly: field.poly_string(x),
                })
                .collect();
            println!("{}", serde_json::to_string(&rows).expect("serializable"));
        }
        OutputFormat::Tsv => {
            println!("index\tpoly");
            for x in field.elements() {
                println!("{}\t{}", x.index(), field.poly_string(x));
            }
        }
    }
    Ok(())
}
