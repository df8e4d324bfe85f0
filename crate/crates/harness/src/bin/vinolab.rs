// vinolab: exact Vinogradov-system counts, sumsets, extraction traces and
// sum-product reports from the command line.
//
//   vinolab gen --family ap --start 1 --step 1 --n 16 -o set.json
//   vinolab count j --set set.json --s 3 --k 2 [--naive] [--cap 1e8]
//   vinolab extract --set set.json --s 6 --k 2 --eps 1/10 --delta 1/100 --l 2,3 --trace out.json
//   vinolab verify --suite core --seed 42
//
// Exit codes: 0 ok, 1 a check failed, 2 usage or input error, 3 resource cap hit.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::json;
use vinolab::{
    emit_report, j_sweep, parse_positive_rational, read_set, render_report, resolve_cap, run_suite, ExperimentConfig,
    Format, HarnessError, Report, CAP_ENV,
};
use vinolab_core::caps::Caps;
use vinolab_core::check::{rational_string, CheckRecord, Kind};
use vinolab_core::counting::{
    additive_energy, lower_bound_from_stats, quotient_counts, upper_bound_oracle, vinogradov_count,
    vinogradov_count_naive,
};
use vinolab_core::exactset::{generate, moment_embed, FamilySpec};
use vinolab_core::extraction::{run_pipeline, Outcome, PipelineParams};
use vinolab_core::sumproduct::{absmain_report, lambda_empirical, main_report, vmvtsp_report};
use vinolab_core::sumsets::{iterated_sum_difference, moment_sumset, plunnecke_check, product_set, quotient_set, VectorSet};
use vinolab_core::{Error, GroundSet};

#[derive(Parser)]
#[command(name = "vinolab", version, about = "Exact Vinogradov-system arithmetic on integer sets")]
struct Cli {
    /// Resource cap for tables and enumerations, e.g. 1e8. Overrides VINOLAB_CAP.
    #[arg(long, global = true)]
    cap: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a set file.
    Gen(GenArgs),
    /// Solution counts and energies.
    Count {
        #[command(subcommand)]
        what: CountCmd,
    },
    /// Sumsets and product sets.
    Sumset {
        #[command(subcommand)]
        what: SumsetCmd,
    },
    /// Run the extraction pipeline and write its trace.
    Extract(ExtractArgs),
    /// Sum-product reports.
    Sumprod(SumprodArgs),
    /// Run an invariant suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Ap,
    Gp,
    Random,
    Explicit,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    start: BigInt,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    step: BigInt,
    #[arg(long, default_value = "2", allow_hyphen_values = true)]
    ratio: BigInt,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    lo: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    hi: Option<i64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated elements for the explicit family.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    elements: Vec<BigInt>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SetArg {
    #[arg(long)]
    set: PathBuf,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CountCmd {
    /// J_{s,k}(A).
    J {
        #[command(flatten)]
        io: SetArg,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        k: usize,
        /// Enumerate all 2s-tuples instead of meeting in the middle.
        #[arg(long)]
        naive: bool,
        /// ε for the decoupling-bound oracle.
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Additive energy of the moment-curve image.
    Energy {
        #[command(flatten)]
        io: SetArg,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Quotient multiplicities: |A/A| and M(A).
    Quotients {
        #[command(flatten)]
        io: SetArg,
    },
    /// J over A = {1..N} for N in [from, to], as csv or json.
    Sweep {
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "csv")]
        format: Format,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SumsetCmd {
    /// l𝒜 for the degree-k moment curve.
    Moment {
        #[command(flatten)]
        io: SetArg,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        members: bool,
    },
    /// mA - nA with the Plünnecke bound.
    Plunnecke {
        #[command(flatten)]
        io: SetArg,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// A^l and A/A.
    Product {
        #[command(flatten)]
        io: SetArg,
        #[arg(long, default_value_t = 2)]
        l: usize,
    },
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    set: PathBuf,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "1/10")]
    eps: String,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    l: Vec<usize>,
    /// Replace the computed α, as p/q.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long, default_value = "json")]
    format: Format,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Theorem {
    Vmvtsp,
    Absmain,
    Main,
}

#[derive(Args)]
struct SumprodArgs {
    #[arg(long)]
    set: PathBuf,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "1/10")]
    eps: String,
    #[arg(long, value_enum, default_value = "vmvtsp")]
    theorem: Theorem,
    #[arg(long)]
    u: Option<usize>,
    /// Diameter exponent m to test X_A <= N^m against (recorded only).
    #[arg(long)]
    m: Option<String>,
    /// Λ for the absmain report, as p/q.
    #[arg(long, default_value = "0")]
    lambda: String,
    #[arg(long, default_value_t = 2)]
    l: usize,
    #[arg(long, default_value_t = 1)]
    b: usize,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "json")]
    format: Format,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn write_or_print(text: &str, out: Option<&Path>) -> Result<(), HarnessError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| HarnessError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_value(v: serde_json::Value, out: Option<&Path>) -> Result<(), HarnessError> {
    write_or_print(&render_report(&Report::Value(v), Format::Json)?, out)
}

fn gen(args: &GenArgs) -> Result<i32, HarnessError> {
    let need_n = || args.n.ok_or_else(|| HarnessError::Config("--n is required for this family".into()));
    let spec = match args.family {
        Family::Ap => FamilySpec::Arithmetic {
            start: args.start.clone(),
            step: args.step.clone(),
            n: need_n()?,
        },
        Family::Gp => FamilySpec::Geometric {
            start: args.start.clone(),
            ratio: args.ratio.clone(),
            n: need_n()?,
        },
        Family::Random => FamilySpec::RandomSubset {
            lo: args.lo.ok_or_else(|| HarnessError::Config("--lo is required".into()))?,
            hi: args.hi.ok_or_else(|| HarnessError::Config("--hi is required".into()))?,
            n: need_n()?,
            seed: args.seed,
        },
        Family::Explicit => FamilySpec::Explicit {
            elements: args.elements.clone(),
        },
    };
    let set = generate(&spec)?;
    write_or_print(&format!("{}\n", set.to_json()), args.out.as_deref())?;
    Ok(0)
}

fn count(cmd: &CountCmd, caps: &Caps) -> Result<i32, HarnessError> {
    match cmd {
        CountCmd::J { io, s, k, naive, eps } => {
            let a = read_set(&io.set)?;
            if *naive {
                let j = vinogradov_count_naive(&a, *s, *k, caps)?;
                emit_value(json!({"N": a.len(), "s": s, "k": k, "J": j.to_string(), "method": "naive"}), io.out.as_deref())?;
                return Ok(0);
            }
            let st = vinogradov_count(&a, *s, *k, caps)?;
            let lower = lower_bound_from_stats(&st);
            let upper = upper_bound_oracle(&a, &st, *eps);
            let pass = lower.pass;
            emit_value(
                json!({
                    "N": a.len(), "s": s, "k": k, "method": "meet-in-the-middle",
                    "stats": st, "sumset_size": st.sumset_size, "lower_bound": lower, "upper_bound": upper,
                }),
                io.out.as_deref(),
            )?;
            Ok(if pass { 0 } else { 1 })
        }
        CountCmd::Energy { io, k } => {
            let a = read_set(&io.set)?;
            let pts = moment_embed(&a, *k)?.coords();
            let e = additive_energy(&pts, &pts)?;
            emit_value(json!({"N": a.len(), "k": k, "energy": e.to_string()}), io.out.as_deref())?;
            Ok(0)
        }
        CountCmd::Quotients { io } => {
            let a = read_set(&io.set)?;
            let q = quotient_counts(&a)?;
            emit_value(json!({"N": a.len(), "quotient_size": q.support(), "M": q.m.to_string()}), io.out.as_deref())?;
            Ok(0)
        }
        CountCmd::Sweep { from, to, s, k, format, out } => {
            if from > to || *from == 0 {
                return Err(HarnessError::Config("need 1 <= from <= to".into()));
            }
            let rows = j_sweep(*from..=*to, *s, *k, caps)?;
            match out {
                Some(p) => emit_report(&Report::Sweep(&rows), *format, p)?,
                None => print!("{}", render_report(&Report::Sweep(&rows), *format)?),
            }
            Ok(0)
        }
    }
}

fn sumset(cmd: &SumsetCmd, caps: &Caps) -> Result<i32, HarnessError> {
    match cmd {
        SumsetCmd::Moment { io, k, l, members } => {
            let a = read_set(&io.set)?;
            let v = moment_sumset(&moment_embed(&a, *k)?, *l, caps)?;
            let mut out = json!({"N": a.len(), "k": k, "l": l, "size": v.len()});
            if *members {
                let list: Vec<Vec<String>> = v.iter().map(|p| p.to_strings()).collect();
                out["members"] = json!(list);
            }
            emit_value(out, io.out.as_deref())?;
            Ok(0)
        }
        SumsetCmd::Plunnecke { io, m, n } => {
            let a = read_set(&io.set)?;
            let x = VectorSet::from_ground(&a);
            let rep = plunnecke_check(&x, *m, *n, caps)?;
            let size = iterated_sum_difference(&x, *m, *n, caps)?.len();
            let pass = rep.pass;
            emit_value(json!({"report": rep, "size": size}), io.out.as_deref())?;
            Ok(if pass { 0 } else { 1 })
        }
        SumsetCmd::Product { io, l } => {
            let a = read_set(&io.set)?;
            let p = product_set(&a, *l, caps)?.len();
            let q = quotient_set(&a)?.len();
            emit_value(json!({"N": a.len(), "l": l, "product_size": p, "quotient_size": q}), io.out.as_deref())?;
            Ok(0)
        }
    }
}

fn extract(args: &ExtractArgs, caps: &Caps) -> Result<i32, HarnessError> {
    let a = read_set(&args.set)?;
    let mut params = PipelineParams::new(args.s, args.k, parse_positive_rational(&args.eps)?);
    if let Some(d) = &args.delta {
        params.delta = parse_positive_rational(d)?;
    }
    params.l_list = args.l.clone();
    params.alpha_override = args.alpha.as_deref().map(parse_positive_rational).transpose()?;
    let trace = run_pipeline(&a, &params, caps)?;
    match &args.trace {
        Some(p) => emit_report(&Report::Trace(&trace), args.format, p)?,
        None => print!("{}", render_report(&Report::Trace(&trace), args.format)?),
    }
    if let Outcome::Stopped { stage, error } = &trace.outcome {
        eprintln!("stopped at {stage}: {error}");
        if let Error::ResourceLimit { .. } = error {
            return Ok(3);
        }
    }
    let failures = trace.unconditional_failures();
    for r in &failures {
        eprintln!("unconditional check failed: {}: {}", r.stage, r.name);
    }
    Ok(if failures.is_empty() { 0 } else { 1 })
}

fn diameter(a: &GroundSet, m: Option<&BigRational>) -> Result<serde_json::Value, HarnessError> {
    let m_emp = a.diameter_exponent();
    let Some(m) = m else {
        return Ok(json!({"m_emp": m_emp}));
    };
    // X_A <= N^m  <=>  X_A^q <= N^p for m = p/q.
    let small = |v: &BigInt| v.to_usize().filter(|&e| e <= 4096);
    let (Some(p), Some(q)) = (small(m.numer()), small(m.denom())) else {
        return Err(HarnessError::Config("m numerator and denominator must be <= 4096".into()));
    };
    let holds = num_traits::pow(a.diameter(), q) <= num_traits::pow(BigInt::from(a.len()), p);
    Ok(json!({"m_emp": m_emp, "m": rational_string(m), "holds": holds}))
}

fn unconditional_ok(records: &[CheckRecord]) -> bool {
    records.iter().filter(|r| r.kind == Kind::Unconditional).all(|r| r.holds())
}

fn sumprod(args: &SumprodArgs, caps: &Caps) -> Result<i32, HarnessError> {
    let a = read_set(&args.set)?;
    let eps = parse_positive_rational(&args.eps)?;
    let m = args.m.as_deref().map(parse_positive_rational).transpose()?;
    let diam = diameter(&a, m.as_ref())?;
    let (body, ok) = match args.theorem {
        Theorem::Vmvtsp => {
            let rep = vmvtsp_report(&a, args.s, args.k, &eps, args.u, caps)?;
            let lambda = lambda_empirical(&a, args.s, args.k, caps).ok();
            let ok = rep.exact_chain_ok();
            (json!({"report": rep, "lambda_emp": lambda, "diameter": diam}), ok)
        }
        Theorem::Absmain => {
            let lambda = vinolab::parse_rational(&args.lambda)?;
            let rep = absmain_report(&a, args.s, args.k, &lambda, args.l, args.b, caps)?;
            let ok = unconditional_ok(&rep.records);
            (json!({"report": rep, "diameter": diam}), ok)
        }
        Theorem::Main => {
            let rep = main_report(&a, args.s, args.k, &eps, caps)?;
            let ok = unconditional_ok(&rep.records);
            (json!({"report": rep, "diameter": diam}), ok)
        }
    };
    emit_value(body, args.report.as_deref())?;
    Ok(if ok { 0 } else { 1 })
}

fn verify(args: &VerifyArgs, cap: Option<u64>) -> Result<i32, HarnessError> {
    let config = ExperimentConfig {
        command: "verify".into(),
        seed: args.seed,
        cap,
        outputs: args.report.iter().cloned().collect(),
        ..Default::default()
    };
    let result = run_suite(&args.suite, &config)?;
    match &args.report {
        Some(p) => emit_report(&Report::Suite(&result), args.format, p)?,
        None => print!("{}", render_report(&Report::Suite(&result), args.format)?),
    }
    for c in result.failures() {
        eprintln!("FAIL {}: {}", c.name, c.details);
    }
    Ok(result.exit_status)
}

fn run(cli: Cli) -> Result<i32, HarnessError> {
    let env = std::env::var(CAP_ENV).ok();
    let cap = resolve_cap(cli.cap.as_deref(), env.as_deref())?;
    let caps = cap.map(Caps::uniform).unwrap_or_default();
    match &cli.command {
        Command::Gen(args) => gen(args),
        Command::Count { what } => count(what, &caps),
        Command::Sumset { what } => sumset(what, &caps),
        Command::Extract(args) => extract(args, &caps),
        Command::Sumprod(args) => sumprod(args, &caps),
        Command::Verify(args) => verify(args, cap),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
