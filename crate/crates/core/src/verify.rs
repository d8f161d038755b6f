//! Function specifications, algorithm dispatch, exhaustive verification and
//! report rows.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algos::{self, AlgoError, RunOptions, RunTrace};
use crate::boolfn::{index_to_input, max_granularity, real_poly_degree, BoolFnError, TruthTable};
use crate::classes::{
    make_f_id, make_gamma, make_main_thm_function, make_mm_bent, make_pdsp, random_gamma_spec, three_quarters_floor,
    ClassError, GammaSpec, MMBentSpec, MainThmSpec, PdspSpec,
};
use crate::classical::{
    brute_force_d, mm_generalized_parity_tree, pdsp_parity_tree, ClassicalError, ParityTreeTrace,
};
use crate::qsim::PURITY_TOL;

/// Largest `n` the exhaustive verifier accepts.
pub const VERIFY_MAX_VARS: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("{0}")]
    Usage(String),
    #[error("2^{n} inputs exceed the verifier limit of 2^{VERIFY_MAX_VARS}")]
    TooManyInputs { n: usize },
    #[error(transparent)]
    Algo(#[from] AlgoError),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(transparent)]
    BoolFn(#[from] BoolFnError),
}

/// A function from one of the supported families, as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum FunctionSpec {
    Pdsp(PdspSpec),
    Main(MainThmSpec),
    Mm(MMBentSpec),
    Gamma(GammaSpec),
    FId { n: usize },
}

impl FunctionSpec {
    pub fn n(&self) -> usize {
        match self {
            FunctionSpec::Pdsp(s) => s.n,
            FunctionSpec::Main(s) => s.n,
            FunctionSpec::Mm(s) => s.n,
            FunctionSpec::Gamma(s) => s.n,
            FunctionSpec::FId { n } => *n,
        }
    }

    pub fn class_name(&self) -> &'static str {
        match self {
            FunctionSpec::Pdsp(_) => "pdsp",
            FunctionSpec::Main(_) => "main",
            FunctionSpec::Mm(_) => "mm",
            FunctionSpec::Gamma(_) => "gamma",
            FunctionSpec::FId { .. } => "f_id",
        }
    }

    pub fn truth_table(&self) -> Result<TruthTable, ClassError> {
        match self {
            FunctionSpec::Pdsp(s) => make_pdsp(s),
            FunctionSpec::Main(s) => Ok(make_main_thm_function(s)?.0),
            FunctionSpec::Mm(s) => make_mm_bent(s),
            FunctionSpec::Gamma(s) => Ok(make_gamma(s)?.0),
            FunctionSpec::FId { n } => make_f_id(*n),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, VerifyError> {
        serde_json::from_str(text).map_err(|e| VerifyError::Usage(format!("bad function spec: {e}")))
    }
}

/// `x1...x_{n/2} xor x_{n/2+1}...x_n`.
pub fn f1_spec(n: usize) -> Result<PdspSpec, ClassError> {
    let k = n / 2;
    PdspSpec::new(n, vec![(1..=k).collect(), (k + 1..=n).collect()], Vec::new())
}

/// `x1...x_{floor(3n/4)} xor x_{n/2+1}...x_n`, written as a pdsp.
pub fn f2_spec(n: usize) -> Result<PdspSpec, ClassError> {
    let k = n / 2;
    let t = three_quarters_floor(n);
    // (x1..xk xor x_{t+1}..xn) * x_{k+1}..x_t
    PdspSpec::new(n, vec![(1..=k).collect(), (t + 1..=n).collect()], (k + 1..=t).collect())
}

/// The main-family instance with `g` a single product over `x'`.
pub fn main_t1_spec(n: usize) -> Result<MainThmSpec, ClassError> {
    MainThmSpec::new(n, vec![(three_quarters_floor(n) + 1..=n).collect()])
}

/// Seeded random restricted MM spec. The generator is ChaCha8 seeded with
/// the 64-bit `seed`.
pub fn seeded_gamma(n: usize, seed: u64) -> Result<GammaSpec, ClassError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_gamma_spec(n, &mut rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Algorithm1,
    Cor2,
    Main,
    FId,
    Gamma,
    GammaOdd,
    ParityPdsp,
    ParityMm,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Algorithm1,
        Algorithm::Cor2,
        Algorithm::Main,
        Algorithm::FId,
        Algorithm::Gamma,
        Algorithm::GammaOdd,
        Algorithm::ParityPdsp,
        Algorithm::ParityMm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Algorithm1 => "algorithm1",
            Algorithm::Cor2 => "cor2",
            Algorithm::Main => "main",
            Algorithm::FId => "f_id",
            Algorithm::Gamma => "gamma",
            Algorithm::GammaOdd => "gamma_odd",
            Algorithm::ParityPdsp => "parity_pdsp",
            Algorithm::ParityMm => "parity_mm",
        }
    }

    pub fn is_quantum(self) -> bool {
        !matches!(self, Algorithm::ParityPdsp | Algorithm::ParityMm)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = VerifyError;
    fn from_str(s: &str) -> Result<Self, VerifyError> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| VerifyError::Usage(format!("unknown algorithm {s:?}")))
    }
}

/// Output of one execution, quantum or classical.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Execution {
    Quantum(RunTrace),
    Parity(ParityTreeTrace),
}

impl Execution {
    pub fn output(&self) -> bool {
        match self {
            Execution::Quantum(t) => t.output,
            Execution::Parity(t) => t.output,
        }
    }

    pub fn queries(&self) -> usize {
        match self {
            Execution::Quantum(t) => t.queries,
            Execution::Parity(t) => t.queries,
        }
    }

    /// Measurement deviation; 0 for classical trees.
    pub fn deviation(&self) -> f64 {
        match self {
            Execution::Quantum(t) => t.final_state_purity,
            Execution::Parity(_) => 0.0,
        }
    }
}

/// An algorithm bound to the function it evaluates.
#[derive(Debug, Clone)]
pub struct Job {
    pub algorithm: Algorithm,
    /// Oracle arity (input length).
    pub n: usize,
    pub name: String,
    pub target: TruthTable,
    pub budget: usize,
    kind: JobKind,
}

#[derive(Debug, Clone)]
enum JobKind {
    Plain,
    Main(MainThmSpec),
    Gamma(GammaSpec),
    Pdsp(PdspSpec),
    Mm(MMBentSpec),
}

fn usage<T>(msg: impl Into<String>) -> Result<T, VerifyError> {
    Err(VerifyError::Usage(msg.into()))
}

impl Job {
    /// Binds `algorithm` to `spec`, or to the algorithm's own default
    /// function at arity `n` when no spec is given. Gamma defaults are drawn
    /// from `seed`.
    pub fn new(algorithm: Algorithm, spec: Option<&FunctionSpec>, n: Option<usize>, seed: u64) -> Result<Self, VerifyError> {
        let n = match (spec, n) {
            (Some(s), Some(m)) if algorithm != Algorithm::GammaOdd && s.n() != m => {
                return usage(format!("--n {m} disagrees with the spec's n = {}", s.n()));
            }
            (Some(s), _) => s.n(),
            (None, Some(m)) => m,
            (None, None) => return usage("give --spec or --n"),
        };
        let fixed = |own: PdspSpec, what: &str| -> Result<PdspSpec, VerifyError> {
            if let Some(s) = spec {
                if s.truth_table()? != make_pdsp(&own)? {
                    return usage(format!("{} evaluates {what}; the spec describes another function", algorithm));
                }
            }
            Ok(own)
        };
        let job = |name: String, target: TruthTable, budget: usize, kind: JobKind| Job {
            algorithm,
            n,
            name,
            target,
            budget,
            kind,
        };
        Ok(match algorithm {
            Algorithm::Algorithm1 | Algorithm::Cor2 => {
                if n % 4 != 2 {
                    return Err(AlgoError::Residue {
                        algo: algorithm.name(),
                        n,
                        need: "n ≡ 2 mod 4",
                    }
                    .into());
                }
                let (own, label) = if algorithm == Algorithm::Algorithm1 {
                    (f1_spec(n)?, "f1")
                } else {
                    (f2_spec(n)?, "f2")
                };
                let own = fixed(own, label)?;
                job(format!("{label}_{n}"), make_pdsp(&own)?, algos::pdsp_budget(n), JobKind::Plain)
            }
            Algorithm::Main => {
                let s = match spec {
                    Some(FunctionSpec::Main(s)) => s.clone(),
                    Some(other) => return usage(format!("main needs a main spec, got {}", other.class_name())),
                    None => main_t1_spec(n)?,
                };
                s.validate()?;
                if n % 4 != 2 {
                    return Err(AlgoError::Residue {
                        algo: "main",
                        n,
                        need: "n ≡ 2 mod 4",
                    }
                    .into());
                }
                let tt = make_main_thm_function(&s)?.0;
                job(format!("main_{n}_t{}", s.t), tt, algos::pdsp_budget(n), JobKind::Main(s))
            }
            Algorithm::FId => {
                if let Some(s) = spec {
                    if s.truth_table()? != make_f_id(n)? {
                        return usage("f_id evaluates the identity MM function; the spec describes another function");
                    }
                }
                if n < 4 || n % 2 != 0 {
                    return Err(AlgoError::Residue {
                        algo: "f_id",
                        n,
                        need: "an even n >= 4",
                    }
                    .into());
                }
                job(format!("f_id_{n}"), make_f_id(n)?, algos::mm_budget(n), JobKind::Plain)
            }
            Algorithm::Gamma => {
                let s = match spec {
                    Some(FunctionSpec::Gamma(s)) => s.clone(),
                    Some(other) => return usage(format!("gamma needs a gamma spec, got {}", other.class_name())),
                    None => seeded_gamma(n, seed)?,
                };
                s.validate()?;
                let tt = make_gamma(&s)?.0;
                job(format!("gamma_{n}"), tt, algos::mm_budget(n), JobKind::Gamma(s))
            }
            Algorithm::GammaOdd => {
                let s = match spec {
                    Some(FunctionSpec::Gamma(s)) => s.clone(),
                    Some(other) => return usage(format!("gamma_odd needs a gamma spec, got {}", other.class_name())),
                    None if n % 2 == 1 && n >= 5 => seeded_gamma(n - 1, seed)?,
                    None => return usage(format!("gamma_odd needs an odd n >= 5, got {n}")),
                };
                s.validate()?;
                let n = s.n + 1;
                let tt = algos::odd_extension(&make_gamma(&s)?.0)?;
                Job {
                    algorithm,
                    n,
                    name: format!("gamma_odd_{n}"),
                    target: tt,
                    budget: algos::gamma_odd_budget(n),
                    kind: JobKind::Gamma(s),
                }
            }
            Algorithm::ParityPdsp => {
                let s = match spec {
                    Some(FunctionSpec::Pdsp(s)) => s.clone(),
                    Some(FunctionSpec::Main(m)) => m.pdsp()?,
                    Some(other) => return usage(format!("parity_pdsp needs a pdsp or main spec, got {}", other.class_name())),
                    None => f1_spec(n)?,
                };
                s.validate()?;
                let budget = s.n - s.q() + 1;
                job(format!("pdsp_{n}_q{}", s.q()), make_pdsp(&s)?, budget, JobKind::Pdsp(s))
            }
            Algorithm::ParityMm => {
                let s = match spec {
                    Some(FunctionSpec::Mm(s)) => s.clone(),
                    Some(FunctionSpec::Gamma(g)) => g.to_mm()?,
                    Some(FunctionSpec::FId { n }) => MMBentSpec::identity(*n)?,
                    Some(other) => return usage(format!("parity_mm needs an mm, gamma or f_id spec, got {}", other.class_name())),
                    None => MMBentSpec::identity(n)?,
                };
                s.validate()?;
                job(format!("mm_{n}"), make_mm_bent(&s)?, s.n / 2 + 1, JobKind::Mm(s))
            }
        })
    }

    /// Runs once on `x`.
    pub fn run(&self, x: &[bool], opts: &RunOptions) -> Result<Execution, VerifyError> {
        if x.len() != self.n {
            return Err(AlgoError::InputLength {
                expected: self.n,
                got: x.len(),
            }
            .into());
        }
        let n = self.n;
        Ok(match (&self.kind, self.algorithm) {
            (JobKind::Plain, Algorithm::Algorithm1) => Execution::Quantum(algos::run_algorithm1(n, x, opts)?),
            (JobKind::Plain, Algorithm::Cor2) => Execution::Quantum(algos::run_cor2(n, x, opts)?),
            (JobKind::Plain, _) => Execution::Quantum(algos::run_f_id(n, x, opts)?),
            (JobKind::Main(s), _) => Execution::Quantum(algos::run_main_thm(s, x, opts)?),
            (JobKind::Gamma(s), Algorithm::GammaOdd) => Execution::Quantum(algos::run_gamma_odd(s, x, opts)?),
            (JobKind::Gamma(s), _) => Execution::Quantum(algos::run_gamma(s, x, opts)?),
            (JobKind::Pdsp(s), _) => Execution::Parity(pdsp_parity_tree(s, x)?),
            (JobKind::Mm(s), _) => Execution::Parity(mm_generalized_parity_tree(s, x)?),
        })
    }
}

/// First input on which a run went wrong.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    /// Character `i` is `x_{i+1}`.
    pub input: String,
    pub expected: bool,
    pub got: Option<bool>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOutcome {
    pub verified: bool,
    pub inputs_checked: usize,
    pub budget: usize,
    /// Distinct query counts seen.
    pub queries_seen: BTreeSet<usize>,
    pub max_deviation: f64,
    pub first_counterexample: Option<Counterexample>,
}

/// Renders an input with character `i` holding `x_{i+1}`.
pub fn input_string(x: &[bool]) -> String {
    x.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Parses a bit string, character `i` is `x_{i+1}`.
pub fn parse_input(s: &str) -> Result<Vec<bool>, VerifyError> {
    s.chars()
        .enumerate()
        .map(|(i, c)| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => usage(format!("input character {i} is {c:?}, expected 0 or 1")),
        })
        .collect()
}

struct Partial {
    checked: usize,
    queries: BTreeSet<usize>,
    deviation: f64,
    bad: Option<(usize, Counterexample)>,
}

fn check_range(job: &Job, opts: &RunOptions, lo: usize, hi: usize) -> Partial {
    let mut p = Partial {
        checked: 0,
        queries: BTreeSet::new(),
        deviation: 0.0,
        bad: None,
    };
    for a in lo..hi {
        let x = index_to_input(a, job.n);
        let expected = job.target.get(a);
        p.checked += 1;
        let fail = |got, reason: String| {
            Some((
                a,
                Counterexample {
                    input: input_string(&x),
                    expected,
                    got,
                    reason,
                },
            ))
        };
        match job.run(&x, opts) {
            Ok(e) => {
                p.queries.insert(e.queries());
                p.deviation = p.deviation.max(e.deviation());
                if p.bad.is_some() {
                    continue;
                }
                if e.output() != expected {
                    p.bad = fail(Some(e.output()), "wrong output".into());
                } else if e.queries() != job.budget {
                    p.bad = fail(Some(e.output()), format!("{} queries, budget {}", e.queries(), job.budget));
                } else if e.deviation() > PURITY_TOL {
                    p.bad = fail(Some(e.output()), format!("measurement deviation {:e}", e.deviation()));
                }
            }
            Err(err) => {
                if p.bad.is_none() {
                    p.bad = fail(None, err.to_string());
                }
            }
        }
    }
    p
}

/// Runs `job` on all `2^n` inputs, split into `jobs` contiguous ranges.
/// Results merge in input order, so the outcome does not depend on `jobs`.
pub fn verify_job(job: &Job, jobs: usize, opts: &RunOptions) -> Result<VerifyOutcome, VerifyError> {
    if job.n > VERIFY_MAX_VARS {
        return Err(VerifyError::TooManyInputs { n: job.n });
    }
    let total = 1usize << job.n;
    let jobs = jobs.clamp(1, total);
    let chunk = total.div_ceil(jobs);
    let ranges: Vec<(usize, usize)> = (0..jobs)
        .map(|j| (j * chunk, ((j + 1) * chunk).min(total)))
        .filter(|(lo, hi)| lo < hi)
        .collect();
    let run = || -> Vec<Partial> {
        ranges
            .par_iter()
            .map(|&(lo, hi)| check_range(job, opts, lo, hi))
            .collect()
    };
    let parts = if jobs == 1 {
        ranges.iter().map(|&(lo, hi)| check_range(job, opts, lo, hi)).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| VerifyError::Usage(format!("thread pool: {e}")))?
            .install(run)
    };
    let mut out = VerifyOutcome {
        verified: false,
        inputs_checked: 0,
        budget: job.budget,
        queries_seen: BTreeSet::new(),
        max_deviation: 0.0,
        first_counterexample: None,
    };
    for p in parts {
        out.inputs_checked += p.checked;
        out.queries_seen.extend(p.queries);
        out.max_deviation = out.max_deviation.max(p.deviation);
        if out.first_counterexample.is_none() {
            out.first_counterexample = p.bad.map(|b| b.1);
        }
    }
    assert_eq!(out.inputs_checked, total, "every input is visited once");
    out.verified = out.first_counterexample.is_none();
    Ok(out)
}

/// One row of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub name: String,
    pub class: String,
    pub algorithm: String,
    pub n: usize,
    pub qc_algo: usize,
    pub qc_formula: usize,
    pub dplus_lower: u32,
    pub dplus_tree_cost: usize,
    pub dplus_formula: usize,
    pub pdeg: u32,
    pub d_formula: usize,
    pub brute_d: Option<u32>,
    pub verified: bool,
    pub inputs_checked: usize,
    /// Milliseconds; the only field that varies between identical runs.
    pub wall_time_ms: u64,
}

/// Largest `n` for which report rows include the brute-force `D`.
pub const REPORT_BRUTE_D_MAX: usize = 10;

fn report_row(job: &Job, class: &str, qc_formula: usize, dplus_formula: usize, tree: &Job, jobs: usize) -> Result<ReportRow, VerifyError> {
    let start = Instant::now();
    let v = verify_job(job, jobs, &RunOptions::default())?;
    let wall = start.elapsed().as_millis() as u64;
    let tree_v = verify_job(tree, jobs, &RunOptions::default())?;
    let qc = v.queries_seen.iter().copied().max().unwrap_or(0);
    Ok(ReportRow {
        name: job.name.clone(),
        class: class.into(),
        algorithm: job.algorithm.name().into(),
        n: job.n,
        qc_algo: qc,
        qc_formula,
        dplus_lower: max_granularity(&job.target) + 1,
        dplus_tree_cost: tree_v.queries_seen.iter().copied().max().unwrap_or(0),
        dplus_formula,
        pdeg: real_poly_degree(&job.target),
        d_formula: job.n,
        brute_d: if job.n <= REPORT_BRUTE_D_MAX {
            Some(brute_force_d(&job.target)?)
        } else {
            None
        },
        verified: v.verified && tree_v.verified,
        inputs_checked: v.inputs_checked,
        wall_time_ms: wall,
    })
}

/// Rows for every family that admits `n`: on `n ≡ 2 mod 4` the pdsp
/// runners and both MM runners, on `n ≡ 0 mod 4` the MM runners, on odd
/// `n >= 5` the odd-arity gamma runner.
pub fn report_rows(n: usize, seed: u64, jobs: usize) -> Result<Vec<ReportRow>, VerifyError> {
    let mut rows = Vec::new();
    if n % 2 == 1 {
        if n < 5 {
            return usage(format!("no family is defined at n = {n}"));
        }
        let job = Job::new(Algorithm::GammaOdd, None, Some(n), seed)?;
        let JobKind::Gamma(s) = &job.kind else { unreachable!() };
        let tree = Job::new(Algorithm::ParityMm, Some(&FunctionSpec::Gamma(s.clone())), None, seed)?;
        let mut row = report_row(&job, "gamma_odd", job.budget, n.div_ceil(2) + 1, &tree, jobs)?;
        // the tree covers the even part; x_n costs one more query
        row.dplus_tree_cost += 1;
        rows.push(row);
        return Ok(rows);
    }
    if n % 4 == 2 {
        for (algo, class) in [(Algorithm::Algorithm1, "f1"), (Algorithm::Cor2, "f2")] {
            let job = Job::new(algo, None, Some(n), seed)?;
            let own = if algo == Algorithm::Algorithm1 { f1_spec(n)? } else { f2_spec(n)? };
            let tree = Job::new(Algorithm::ParityPdsp, Some(&FunctionSpec::Pdsp(own.clone())), None, seed)?;
            rows.push(report_row(&job, class, algos::pdsp_budget(n), n - own.q() + 1, &tree, jobs)?);
        }
        let spec = main_t1_spec(n)?;
        let job = Job::new(Algorithm::Main, Some(&FunctionSpec::Main(spec.clone())), None, seed)?;
        let tree = Job::new(Algorithm::ParityPdsp, Some(&FunctionSpec::Main(spec.clone())), None, seed)?;
        rows.push(report_row(&job, "pdsp", algos::pdsp_budget(n), n - spec.t, &tree, jobs)?);
    }
    if n >= 4 {
        let job = Job::new(Algorithm::FId, None, Some(n), seed)?;
        let tree = Job::new(Algorithm::ParityMm, Some(&FunctionSpec::FId { n }), None, seed)?;
        rows.push(report_row(&job, "f_id", algos::mm_budget(n), n / 2 + 1, &tree, jobs)?);
        let job = Job::new(Algorithm::Gamma, None, Some(n), seed)?;
        let JobKind::Gamma(s) = &job.kind else { unreachable!() };
        let tree = Job::new(Algorithm::ParityMm, Some(&FunctionSpec::Gamma(s.clone())), None, seed)?;
        rows.push(report_row(&job, "gamma", algos::mm_budget(n), n / 2 + 1, &tree, jobs)?);
    }
    if rows.is_empty() {
        return usage(format!("no family is defined at n = {n}"));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("grover".parse::<Algorithm>().is_err());
    }

    #[test]
    fn spec_json_tagging() {
        let s = FunctionSpec::FId { n: 6 };
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"class":"f_id","n":6}"#);
        let g = FunctionSpec::Gamma(seeded_gamma(8, 3).unwrap());
        let back = FunctionSpec::from_json(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn input_strings() {
        assert_eq!(parse_input("101").unwrap(), vec![true, false, true]);
        assert!(parse_input("12").is_err());
        assert_eq!(input_string(&[false, true]), "01");
    }

    #[test]
    fn job_rejects_wrong_spec() {
        let spec = FunctionSpec::FId { n: 6 };
        assert!(matches!(
            Job::new(Algorithm::Algorithm1, Some(&spec), None, 0),
            Err(VerifyError::Usage(_))
        ));
    }
}
