use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use exactq::algos::RunOptions;
use exactq::boolfn::{max_granularity, real_poly_degree, Anf, TruthTable};
use exactq::classes::{count_gamma_raw, count_main_thm_functions};
use exactq::classical::{brute_force_d, brute_force_dplus, dplus_lower_bound, BRUTE_DPLUS_MAX_VARS};
use exactq::verify::{parse_input, report_rows, verify_job, Algorithm, FunctionSpec, Job, VerifyOutcome};

#[derive(Parser)]
#[command(name = "exactq", version, about = "Exact quantum query algorithms: run, verify, analyze")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Spectral and classical measures of one function.
    Analyze(AnalyzeArgs),
    /// Run an algorithm on one input.
    Run(RunArgs),
    /// Check an algorithm on every input.
    Verify(VerifyArgs),
    /// Size of a function family.
    Count(CountArgs),
    /// Comparison table for a list of n.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Out {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum CountClass {
    Pdsp,
    Main,
    Gamma,
}

#[derive(Args)]
struct FunctionArgs {
    /// Function spec as JSON.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Algebraic normal form, e.g. "x1*x2 + x3".
    #[arg(long, conflicts_with = "spec")]
    anf: Option<String>,
    /// Truth table in hex, most significant digit first (needs --n).
    #[arg(long, conflicts_with_all = ["spec", "anf"], requires = "n")]
    hex: Option<String>,
    /// Number of variables.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    f: FunctionArgs,
    #[arg(long, value_enum, default_value = "json")]
    out: Out,
}

#[derive(Args)]
struct AlgoArgs {
    #[arg(long, value_parser = parse_algo)]
    algo: Algorithm,
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Seed for generated gamma specs (ChaCha8 from a 64-bit seed).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Drop the gate with this step index (fault injection).
    #[arg(long, hide = true)]
    skip_step: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    out: Out,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    a: AlgoArgs,
    /// Input bits, character i is x_{i+1}.
    #[arg(long)]
    input: Option<String>,
    /// Write the gate trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Also check every input.
    #[arg(long)]
    verify: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    a: AlgoArgs,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long, value_enum)]
    class: CountClass,
    #[arg(long)]
    n: usize,
}

#[derive(Args)]
struct ReportArgs {
    /// Comma-separated list of n.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, value_enum, default_value = "json")]
    out: Out,
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: exactq::verify::VerifyError| e.to_string())
}

enum Failure {
    Usage(String),
    Verification,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Res = Result<(), Failure>;

fn emit<T: Serialize>(rows: &[T], out: Out) -> Res {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match out {
        Out::Json => {
            let text = if rows.len() == 1 {
                serde_json::to_string_pretty(&rows[0])?
            } else {
                serde_json::to_string_pretty(rows)?
            };
            writeln!(lock, "{text}")?;
        }
        Out::Csv => {
            let mut w = csv::Writer::from_writer(lock);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn read_spec(path: &PathBuf) -> Result<FunctionSpec, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(FunctionSpec::from_json(&text)?)
}

#[derive(Serialize)]
struct Analysis {
    n: usize,
    weight: u64,
    hex: String,
    anf: String,
    anf_degree: u32,
    pdeg: u32,
    gran_m: u32,
    dplus_lb: u32,
    brute_d: Option<u32>,
    brute_dplus: Option<u32>,
}

fn analyze(a: AnalyzeArgs) -> Res {
    let tt: TruthTable = if let Some(p) = &a.f.spec {
        read_spec(p)?.truth_table()?
    } else if let Some(s) = &a.f.anf {
        Anf::parse(s, a.f.n)?.to_truth_table()
    } else if let Some(h) = &a.f.hex {
        TruthTable::from_hex(h, a.f.n.expect("clap requires --n"))?
    } else {
        return Err(Failure::Usage("give --spec, --anf or --hex".into()));
    };
    let small = tt.n() <= BRUTE_DPLUS_MAX_VARS;
    let anf = tt.to_anf();
    let row = Analysis {
        n: tt.n(),
        weight: tt.weight(),
        hex: tt.to_hex(),
        anf: anf.to_string(),
        anf_degree: anf.degree(),
        pdeg: real_poly_degree(&tt),
        gran_m: max_granularity(&tt),
        dplus_lb: dplus_lower_bound(&tt),
        brute_d: if small { Some(brute_force_d(&tt)?) } else { None },
        brute_dplus: if small { Some(brute_force_dplus(&tt)?) } else { None },
    };
    emit(&[row], a.out)
}

fn make_job(a: &AlgoArgs) -> Result<Job, Failure> {
    let spec = a.spec.as_ref().map(read_spec).transpose()?;
    Ok(Job::new(a.algo, spec.as_ref(), a.n, a.seed)?)
}

#[derive(Serialize)]
struct VerifyRow {
    name: String,
    algorithm: String,
    n: usize,
    verified: bool,
    inputs_checked: usize,
    budget: usize,
    queries: String,
    max_deviation: f64,
    counterexample: Option<String>,
    reason: Option<String>,
}

fn verify_row(job: &Job, v: &VerifyOutcome) -> VerifyRow {
    VerifyRow {
        name: job.name.clone(),
        algorithm: job.algorithm.name().into(),
        n: job.n,
        verified: v.verified,
        inputs_checked: v.inputs_checked,
        budget: v.budget,
        queries: v
            .queries_seen
            .iter()
            .map(|q| q.to_string())
            .collect::<Vec<_>>()
            .join(" "),
        max_deviation: v.max_deviation,
        counterexample: v.first_counterexample.as_ref().map(|c| c.input.clone()),
        reason: v.first_counterexample.as_ref().map(|c| c.reason.clone()),
    }
}

fn do_verify(job: &Job, jobs: usize, opts: &RunOptions, out: Out) -> Res {
    let v = verify_job(job, jobs, opts)?;
    emit(&[verify_row(job, &v)], out)?;
    if v.verified {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

#[derive(Serialize)]
struct RunRow {
    name: String,
    input: String,
    output: bool,
    expected: bool,
    queries: usize,
    final_state_purity: Option<f64>,
    gate_count: Option<usize>,
}

fn run(r: RunArgs) -> Res {
    let job = make_job(&r.a)?;
    let opts = RunOptions {
        trace: r.trace.is_some(),
        skip_step: r.a.skip_step,
    };
    if let Some(input) = &r.input {
        let x = parse_input(input)?;
        let e = job.run(&x, &opts)?;
        let expected = job.target.eval(&x)?;
        if let (Some(path), exactq::verify::Execution::Quantum(t)) = (&r.trace, &e) {
            let mut w = csv::Writer::from_path(path)?;
            for row in t.steps.iter().flatten() {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        match r.a.out {
            Out::Json => emit(&[&e], Out::Json)?,
            Out::Csv => {
                let (purity, gates) = match &e {
                    exactq::verify::Execution::Quantum(t) => (Some(t.final_state_purity), Some(t.gate_count)),
                    exactq::verify::Execution::Parity(_) => (None, None),
                };
                emit(
                    &[RunRow {
                        name: job.name.clone(),
                        input: input.clone(),
                        output: e.output(),
                        expected,
                        queries: e.queries(),
                        final_state_purity: purity,
                        gate_count: gates,
                    }],
                    Out::Csv,
                )?;
            }
        }
        if r.verify && e.output() != expected {
            return Err(Failure::Verification);
        }
    } else if !r.verify {
        return Err(Failure::Usage("give --input or --verify".into()));
    }
    if r.verify {
        let opts = RunOptions {
            trace: false,
            skip_step: r.a.skip_step,
        };
        do_verify(&job, r.jobs, &opts, r.a.out)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CountRow {
    class: &'static str,
    n: usize,
    count: String,
    quotient: Option<String>,
}

fn count(c: CountArgs) -> Res {
    let row = match c.class {
        CountClass::Pdsp | CountClass::Main => CountRow {
            class: "main",
            n: c.n,
            count: count_main_thm_functions(c.n)?.to_string(),
            quotient: None,
        },
        CountClass::Gamma => {
            let (raw, q) = count_gamma_raw(c.n)?;
            CountRow {
                class: "gamma",
                n: c.n,
                count: raw.to_string(),
                quotient: Some(q.to_string()),
            }
        }
    };
    emit(&[row], Out::Json)
}

fn report(r: ReportArgs) -> Res {
    let mut rows = Vec::new();
    for &n in &r.n {
        rows.extend(report_rows(n, r.seed, r.jobs)?);
    }
    emit(&rows, r.out)?;
    if rows.iter().all(|row| row.verified) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match cli.cmd {
        Cmd::Analyze(a) => analyze(a),
        Cmd::Run(r) => run(r),
        Cmd::Verify(v) => {
            let opts = RunOptions {
                trace: false,
                skip_step: v.a.skip_step,
            };
            make_job(&v.a).and_then(|job| do_verify(&job, v.jobs, &opts, v.a.out))
        }
        Cmd::Count(c) => count(c),
        Cmd::Report(r) => report(r),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(2),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
