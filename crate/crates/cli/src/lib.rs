//! Command-line front end for `qcompare`.
//!
//! Every subcommand builds a report struct, which is rendered as JSON, CSV or
//! plain text. Reports are plain data so JSON output can be parsed back into
//! the same type.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use qcompare::comparison::{
    label_for, success_probability_analytic, success_probability_mc, InputEnsemble,
};
use qcompare::discrimination::{
    bayes, build_hypotheses, errorfree_plus_guess, helstrom, simulate_strategy, trine_scenario,
    ComparisonScenario, CostMatrix, Verdict,
};
use qcompare::hilbert::MAX_DIM;
use qcompare::multiport::{
    dft_multiport, output_distribution, realization_efficiency_mc, unambiguous_firing_patterns,
    unambiguous_patterns, Detection, MultiportInput, Statistics,
};
use qcompare::reproduce::{run_all, ReproduceOptions};
use qcompare::rng::RngStreams;
use qcompare::symmetry::{max_identical, partitions_of, subspace_dimension};
use qcompare::{PureState, C64};

pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const ACCEPTANCE_FAILURE: i32 = 1;
    pub const BAD_INPUT: i32 = 2;
    pub const SELF_CHECK: i32 = 3;
    pub const DEGENERATE: i32 = 4;
}

/// Tolerance on state norms and prior sums in scenario files.
pub const SCENARIO_TOL: f64 = 1e-9;
/// Sampled values must lie within this many standard errors of the exact ones.
pub const SELF_CHECK_SIGMA: f64 = 5.0;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Library(#[from] qcompare::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed scenario file: {0}")]
    Scenario(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("self-check failed: {0}")]
    SelfCheck(String),
    #[error("cannot render output: {0}")]
    Render(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(qcompare::Error::DegenerateScenario(_)) => exit::DEGENERATE,
            CliError::Library(qcompare::Error::Numerical(_)) => exit::SELF_CHECK,
            CliError::Library(_) => exit::BAD_INPUT,
            CliError::Io { .. } | CliError::Scenario(_) | CliError::Argument(_) => exit::BAD_INPUT,
            CliError::SelfCheck(_) | CliError::Render(_) => exit::SELF_CHECK,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatisticsArg {
    Boson,
    Fermion,
}

impl From<StatisticsArg> for Statistics {
    fn from(s: StatisticsArg) -> Self {
        match s {
            StatisticsArg::Boson => Statistics::Boson,
            StatisticsArg::Fermion => Statistics::Fermion,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qcompare",
    version,
    about = "Compare the states of many quantum systems"
)]
pub struct RunConfig {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimensions of the permutation-invariant subspaces of N qudits.
    Dims {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Success probability of universal error-free comparison.
    Universal {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Minimum-error or minimum-cost comparison for a known set of states.
    Discriminate {
        /// Scenario file, or `trine` for the built-in trine states.
        #[arg(long, default_value = "trine")]
        scenario: String,
        /// Cost matrix `c_ss,c_dd,c_sd,c_ds`; without it the error probability is minimized.
        #[arg(long, value_parser = parse_costs, allow_hyphen_values = true)]
        costs: Option<[f64; 4]>,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Linear-optics comparison with a balanced multiport.
    Multiport {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value_t = StatisticsArg::Boson)]
        statistics: StatisticsArg,
        /// Use detectors that only report whether they fired.
        #[arg(long)]
        threshold: bool,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Run every acceptance check; exit 1 if any fails.
    Reproduce {
        #[arg(long, default_value_t = ReproduceOptions::default().seed)]
        seed: u64,
        /// Corrupt the symmetric projector, to confirm the checks catch it.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct McArgs {
    /// Monte Carlo samples.
    #[arg(long, default_value_t = 20_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl McArgs {
    fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::Argument("--trials must be at least 1".into()));
        }
        Ok(())
    }
}

fn parse_costs(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 4 comma-separated costs, got {}", v.len()))
}

/// A scenario as stored on disk: amplitudes as `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub states: Vec<Vec<[f64; 2]>>,
    pub priors: Vec<f64>,
    pub n_systems: usize,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<ComparisonScenario, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        let file: ScenarioFile =
            serde_json::from_str(&text).map_err(|e| CliError::Scenario(e.to_string()))?;
        file.into_scenario()
    }

    /// Checks norms and the prior sum to [`SCENARIO_TOL`], then renormalizes.
    pub fn into_scenario(self) -> Result<ComparisonScenario, CliError> {
        let mut states = Vec::with_capacity(self.states.len());
        for (i, amps) in self.states.into_iter().enumerate() {
            let v: Vec<C64> = amps.into_iter().map(|[re, im]| C64::new(re, im)).collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > SCENARIO_TOL {
                return Err(CliError::Scenario(format!("state {i} has norm {norm}")));
            }
            states.push(PureState::normalized(v)?);
        }
        let total: f64 = self.priors.iter().sum();
        if (total - 1.0).abs() > SCENARIO_TOL {
            return Err(CliError::Scenario(format!("priors sum to {total}")));
        }
        let priors = self.priors.iter().map(|p| p / total).collect();
        Ok(ComparisonScenario::new(states, priors, self.n_systems)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub std_error: f64,
}

impl From<qcompare::rng::McEstimate> for Estimate {
    fn from(e: qcompare::rng::McEstimate) -> Self {
        Self {
            estimate: e.estimate,
            std_error: e.std_error,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimsRow {
    pub partition: Vec<usize>,
    pub outcome: String,
    pub dimension: u64,
    pub max_identical: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimsReport {
    pub n: usize,
    pub d: usize,
    pub rows: Vec<DimsRow>,
    pub total: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniversalReport {
    pub n: usize,
    pub d: usize,
    pub analytic: f64,
    pub mc_estimate: f64,
    pub std_error: f64,
    pub trials: usize,
    pub seed: u64,
    pub reference: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscriminateReport {
    pub scenario: String,
    pub n_systems: usize,
    pub p_same: f64,
    pub p_diff: f64,
    pub eigenvalues: Vec<f64>,
    /// Present when the error probability is minimized.
    pub p_error: Option<f64>,
    /// Present when a cost matrix is given.
    pub bayes_cost: Option<f64>,
    pub errorfree_plus_guess: f64,
    pub empirical_error: Estimate,
    pub trials: usize,
    pub seed: u64,
    pub reference: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternProbability {
    pub pattern: Vec<usize>,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiportReport {
    pub n: usize,
    pub d: usize,
    pub statistics: StatisticsArg,
    pub threshold: bool,
    /// Patterns (or, with threshold detectors, 0/1 firing vectors) that
    /// certify a difference, in lexicographic order.
    pub unambiguous_patterns: Vec<Vec<usize>>,
    /// Output patterns for identical inputs with nonzero probability.
    pub identical_distribution: Vec<PatternProbability>,
    pub efficiency: Estimate,
    pub analytic_bound: f64,
    pub trials: usize,
    pub seed: u64,
    pub reference: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub criterion: u8,
    pub name: String,
    pub expected: String,
    pub got: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReproduceReport {
    pub seed: u64,
    pub checks: Vec<CheckLine>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Report {
    Dims(DimsReport),
    Universal(UniversalReport),
    Discriminate(DiscriminateReport),
    Multiport(MultiportReport),
    Reproduce(ReproduceReport),
}

/// A report and the exit code it implies.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let report = match &config.command {
        Command::Dims { n, d } => Report::Dims(dims(*n, *d)?),
        Command::Universal { n, d, mc } => Report::Universal(universal(*n, *d, mc)?),
        Command::Discriminate {
            scenario,
            costs,
            mc,
        } => Report::Discriminate(discriminate(scenario, *costs, mc)?),
        Command::Multiport {
            n,
            d,
            statistics,
            threshold,
            mc,
        } => Report::Multiport(multiport(*n, *d, *statistics, *threshold, mc)?),
        Command::Reproduce { seed, inject_fault } => {
            Report::Reproduce(reproduce(*seed, *inject_fault)?)
        }
    };
    let exit_code = match &report {
        Report::Reproduce(r) if !r.passed => exit::ACCEPTANCE_FAILURE,
        _ => exit::SUCCESS,
    };
    Ok(Outcome { report, exit_code })
}

fn check_sizes(n: usize, d: usize) -> Result<(), CliError> {
    if n == 0 || d == 0 {
        return Err(CliError::Argument("--n and --d must be at least 1".into()));
    }
    match d.checked_pow(n as u32) {
        Some(dim) if dim <= MAX_DIM => Ok(()),
        _ => Err(qcompare::Error::Capacity {
            what: "joint Hilbert space",
            requested: d.checked_pow(n as u32).unwrap_or(usize::MAX),
            cap: MAX_DIM,
        }
        .into()),
    }
}

pub fn dims(n: usize, d: usize) -> Result<DimsReport, CliError> {
    check_sizes(n, d)?;
    let rows: Vec<DimsRow> = partitions_of(n, d)
        .iter()
        .map(|lambda| DimsRow {
            partition: lambda.rows().to_vec(),
            outcome: label_for(lambda).to_string(),
            dimension: subspace_dimension(lambda, d) as u64,
            max_identical: max_identical(lambda),
        })
        .collect();
    let total: u64 = rows.iter().map(|r| r.dimension).sum();
    let want = (d as u64).pow(n as u32);
    if total != want {
        return Err(CliError::SelfCheck(format!(
            "dimensions sum to {total}, not {want}"
        )));
    }
    Ok(DimsReport { n, d, rows, total })
}

pub fn universal(n: usize, d: usize, mc: &McArgs) -> Result<UniversalReport, CliError> {
    mc.validate()?;
    check_sizes(n, d)?;
    let analytic = success_probability_analytic(n, d);
    let est = success_probability_mc(
        n,
        d,
        mc.trials,
        &RngStreams::new(mc.seed),
        InputEnsemble::Entangled,
    )?;
    let z = est.z_score(analytic);
    if z > SELF_CHECK_SIGMA {
        return Err(CliError::SelfCheck(format!(
            "sampled success {} +- {} is {z:.1} std errors from {analytic}",
            est.estimate, est.std_error
        )));
    }
    Ok(UniversalReport {
        n,
        d,
        analytic,
        mc_estimate: est.estimate,
        std_error: est.std_error,
        trials: mc.trials,
        seed: mc.seed,
        reference: "1 - C(D+N-1, N) / D^N".into(),
    })
}

pub fn discriminate(
    scenario_arg: &str,
    costs: Option<[f64; 4]>,
    mc: &McArgs,
) -> Result<DiscriminateReport, CliError> {
    mc.validate()?;
    let scenario = if scenario_arg == "trine" {
        trine_scenario()
    } else {
        ScenarioFile::load(Path::new(scenario_arg))?
    };
    let costs = costs
        .map(|[ss, dd, sd, ds]| CostMatrix::new(ss, dd, sd, ds))
        .transpose()?;
    let h = build_hypotheses(&scenario)?;
    let (decision, p_error, bayes_cost) = match &costs {
        None => {
            let dec = helstrom(&h)?;
            let v = dec.value;
            (dec, Some(v), None)
        }
        Some(c) => {
            let dec = bayes(&h, c)?;
            let v = dec.value;
            (dec, None, Some(v))
        }
    };
    let guessed = errorfree_plus_guess(&scenario)?;
    let empirical = simulate_strategy(
        &decision.strategy,
        &scenario,
        mc.trials,
        &RngStreams::new(mc.seed),
        Verdict::Different,
    )?;
    if let Some(p) = p_error {
        let z = empirical.z_score(p);
        if z > SELF_CHECK_SIGMA {
            return Err(CliError::SelfCheck(format!(
                "simulated error {} +- {} is {z:.1} std errors from {p}",
                empirical.estimate, empirical.std_error
            )));
        }
    }
    Ok(DiscriminateReport {
        scenario: scenario_arg.to_string(),
        n_systems: scenario.n_systems(),
        p_same: h.p_same,
        p_diff: h.p_diff,
        eigenvalues: decision.eigenvalues,
        p_error,
        bayes_cost,
        errorfree_plus_guess: guessed.p_error,
        empirical_error: empirical.into(),
        trials: mc.trials,
        seed: mc.seed,
        reference: match costs {
            None => "(1 - sum |eigenvalues of p_S rho_S - p_D rho_D|) / 2".into(),
            Some(_) => "sign decomposition of the cost-weighted hypothesis operator".into(),
        },
    })
}

pub fn multiport(
    n: usize,
    d: usize,
    statistics: StatisticsArg,
    threshold: bool,
    mc: &McArgs,
) -> Result<MultiportReport, CliError> {
    mc.validate()?;
    if n == 0 || d == 0 {
        return Err(CliError::Argument("--n and --d must be at least 1".into()));
    }
    let stats: Statistics = statistics.into();
    let unambiguous: Vec<Vec<usize>> = if threshold {
        unambiguous_firing_patterns(n, stats)?
            .into_iter()
            .map(|f| f.fired().iter().map(|&b| b as usize).collect())
            .collect()
    } else {
        unambiguous_patterns(n, stats)?
            .into_iter()
            .map(|p| p.occupations().to_vec())
            .collect()
    };
    let identical = MultiportInput::identical(n, PureState::basis(1, 0)?, stats)?;
    let identical_distribution = output_distribution(&identical, &dft_multiport(n)?)?
        .iter()
        .filter(|&(_, q)| q >= qcompare::multiport::ZERO_PROBABILITY_TOL)
        .map(|(p, q)| PatternProbability {
            pattern: p.occupations().to_vec(),
            probability: q,
        })
        .collect();
    let detection = if threshold {
        Detection::Threshold
    } else {
        Detection::NumberResolving
    };
    let efficiency =
        realization_efficiency_mc(n, d, stats, mc.trials, &RngStreams::new(mc.seed), detection)?;
    Ok(MultiportReport {
        n,
        d,
        statistics,
        threshold,
        unambiguous_patterns: unambiguous,
        identical_distribution,
        efficiency: efficiency.into(),
        analytic_bound: success_probability_analytic(n, d),
        trials: mc.trials,
        seed: mc.seed,
        reference: "efficiency bounded by the projective value 1 - C(D+N-1, N) / D^N".into(),
    })
}

pub fn reproduce(seed: u64, inject_fault: bool) -> Result<ReproduceReport, CliError> {
    let checks: Vec<CheckLine> = run_all(&ReproduceOptions {
        seed,
        corrupt_symmetric_projector: inject_fault,
    })?
    .into_iter()
    .map(|c| CheckLine {
        criterion: c.criterion,
        name: c.name,
        expected: c.expected,
        got: c.got,
        passed: c.passed,
    })
    .collect();
    let passed = checks.iter().all(|c| c.passed);
    Ok(ReproduceReport {
        seed,
        checks,
        passed,
    })
}

fn fmt_pattern(p: &[usize]) -> String {
    let inner: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("({})", inner.join(","))
}

impl Report {
    pub fn render(&self, format: OutputFormat) -> Result<String, CliError> {
        match format {
            OutputFormat::Json => {
                serde_json::to_string_pretty(self).map_err(|e| CliError::Render(e.to_string()))
            }
            OutputFormat::Text => Ok(self.text()),
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                for row in self.csv_rows() {
                    w.write_record(&row)
                        .map_err(|e| CliError::Render(e.to_string()))?;
                }
                let bytes = w
                    .into_inner()
                    .map_err(|e| CliError::Render(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| CliError::Render(e.to_string()))
            }
        }
    }

    fn text(&self) -> String {
        let mut out = String::new();
        match self {
            Report::Dims(r) => {
                out += &format!(
                    "{:<16} {:>10} {:>14}  outcome\n",
                    "partition", "dimension", "max_identical"
                );
                for row in &r.rows {
                    out += &format!(
                        "{:<16} {:>10} {:>14}  {}\n",
                        fmt_pattern(&row.partition),
                        row.dimension,
                        row.max_identical,
                        row.outcome
                    );
                }
                out += &format!("sum {} = {}^{}\n", r.total, r.d, r.n);
            }
            Report::Universal(r) => {
                out += &format!("N={} D={}\n", r.n, r.d);
                out += &format!("analytic     {}\n", r.analytic);
                out += &format!(
                    "monte carlo  {} +- {} ({} trials, seed {})\n",
                    r.mc_estimate, r.std_error, r.trials, r.seed
                );
            }
            Report::Discriminate(r) => {
                out += &format!("scenario {} (N={})\n", r.scenario, r.n_systems);
                out += &format!("p_same {}  p_diff {}\n", r.p_same, r.p_diff);
                let eig: Vec<String> = r.eigenvalues.iter().map(|x| x.to_string()).collect();
                out += &format!("eigenvalues {}\n", eig.join(" "));
                if let Some(p) = r.p_error {
                    out += &format!("minimum error probability {p}\n");
                }
                if let Some(c) = r.bayes_cost {
                    out += &format!("minimum Bayes cost {c}\n");
                }
                out += &format!(
                    "error-free comparison plus best guess {}\n",
                    r.errorfree_plus_guess
                );
                out += &format!(
                    "simulated error {} +- {} ({} trials, seed {})\n",
                    r.empirical_error.estimate, r.empirical_error.std_error, r.trials, r.seed
                );
            }
            Report::Multiport(r) => {
                out += &format!(
                    "N={} D={} {:?}{}\n",
                    r.n,
                    r.d,
                    r.statistics,
                    if r.threshold {
                        " threshold detectors"
                    } else {
                        ""
                    }
                );
                out += "identical-input distribution:\n";
                for pp in &r.identical_distribution {
                    out += &format!("  {} {}\n", fmt_pattern(&pp.pattern), pp.probability);
                }
                let pats: Vec<String> = r
                    .unambiguous_patterns
                    .iter()
                    .map(|p| fmt_pattern(p))
                    .collect();
                out += &format!("unambiguous: {}\n", pats.join(" "));
                out += &format!(
                    "efficiency {} +- {} (projective value {})\n",
                    r.efficiency.estimate, r.efficiency.std_error, r.analytic_bound
                );
            }
            Report::Reproduce(r) => {
                for c in &r.checks {
                    out += &format!(
                        "{} [{}] {}: expected {}, got {}\n",
                        if c.passed { "PASS" } else { "FAIL" },
                        c.criterion,
                        c.name,
                        c.expected,
                        c.got
                    );
                }
                let failed = r.checks.iter().filter(|c| !c.passed).count();
                out += &format!("{} checks, {} failed\n", r.checks.len(), failed);
            }
        }
        out
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let s = |x: &dyn ToString| x.to_string();
        match self {
            Report::Dims(r) => {
                let mut rows = vec![vec![
                    "partition".into(),
                    "dimension".into(),
                    "max_identical".into(),
                    "outcome".into(),
                ]];
                rows.extend(r.rows.iter().map(|row| {
                    vec![
                        fmt_pattern(&row.partition),
                        s(&row.dimension),
                        s(&row.max_identical),
                        row.outcome.clone(),
                    ]
                }));
                rows
            }
            Report::Universal(r) => vec![
                vec![
                    "n".into(),
                    "d".into(),
                    "analytic".into(),
                    "mc_estimate".into(),
                    "std_error".into(),
                    "trials".into(),
                    "seed".into(),
                ],
                vec![
                    s(&r.n),
                    s(&r.d),
                    s(&r.analytic),
                    s(&r.mc_estimate),
                    s(&r.std_error),
                    s(&r.trials),
                    s(&r.seed),
                ],
            ],
            Report::Discriminate(r) => {
                let mut rows = vec![vec!["quantity".into(), "value".into()]];
                rows.push(vec!["p_same".into(), s(&r.p_same)]);
                rows.push(vec!["p_diff".into(), s(&r.p_diff)]);
                for (i, e) in r.eigenvalues.iter().enumerate() {
                    rows.push(vec![format!("eigenvalue_{i}"), s(e)]);
                }
                if let Some(p) = r.p_error {
                    rows.push(vec!["p_error".into(), s(&p)]);
                }
                if let Some(c) = r.bayes_cost {
                    rows.push(vec!["bayes_cost".into(), s(&c)]);
                }
                rows.push(vec![
                    "errorfree_plus_guess".into(),
                    s(&r.errorfree_plus_guess),
                ]);
                rows.push(vec![
                    "empirical_error".into(),
                    s(&r.empirical_error.estimate),
                ]);
                rows.push(vec![
                    "empirical_std_error".into(),
                    s(&r.empirical_error.std_error),
                ]);
                rows
            }
            Report::Multiport(r) => {
                let mut rows = vec![vec!["kind".into(), "pattern".into(), "value".into()]];
                for pp in &r.identical_distribution {
                    rows.push(vec![
                        "identical".into(),
                        fmt_pattern(&pp.pattern),
                        s(&pp.probability),
                    ]);
                }
                for p in &r.unambiguous_patterns {
                    rows.push(vec!["unambiguous".into(), fmt_pattern(p), String::new()]);
                }
                rows.push(vec![
                    "efficiency".into(),
                    String::new(),
                    s(&r.efficiency.estimate),
                ]);
                rows.push(vec![
                    "efficiency_std_error".into(),
                    String::new(),
                    s(&r.efficiency.std_error),
                ]);
                rows.push(vec![
                    "analytic_bound".into(),
                    String::new(),
                    s(&r.analytic_bound),
                ]);
                rows
            }
            Report::Reproduce(r) => {
                let mut rows = vec![vec![
                    "status".into(),
                    "criterion".into(),
                    "name".into(),
                    "expected".into(),
                    "got".into(),
                ]];
                rows.extend(r.checks.iter().map(|c| {
                    vec![
                        if c.passed { "PASS" } else { "FAIL" }.into(),
                        s(&c.criterion),
                        c.name.clone(),
                        c.expected.clone(),
                        c.got.clone(),
                    ]
                }));
                rows
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_parsing() {
        assert_eq!(parse_costs("0,0,2,1").unwrap(), [0.0, 0.0, 2.0, 1.0]);
        assert_eq!(parse_costs("-1, -1, 0, 0").unwrap(), [-1.0, -1.0, 0.0, 0.0]);
        assert!(parse_costs("0,0,1").is_err());
        assert!(parse_costs("a,0,1,1").is_err());
    }

    #[test]
    fn dims_rows() {
        let r = dims(4, 2).unwrap();
        let got: Vec<(Vec<usize>, u64)> = r
            .rows
            .iter()
            .map(|x| (x.partition.clone(), x.dimension))
            .collect();
        assert_eq!(got, vec![(vec![4], 5), (vec![3, 1], 9), (vec![2, 2], 2)]);
        assert_eq!(r.total, 16);
        let r = dims(1, 5).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].dimension, 5);
        assert!(matches!(dims(14, 2), Err(e) if e.exit_code() == exit::BAD_INPUT));
    }

    #[test]
    fn scenario_file_validation() {
        let ok = ScenarioFile {
            states: vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [0.0, 1.0]]],
            priors: vec![0.5, 0.5],
            n_systems: 2,
        };
        assert!(ok.clone().into_scenario().is_ok());
        let mut bad = ok.clone();
        bad.states[0][0] = [1.1, 0.0];
        assert!(bad.into_scenario().is_err());
        let mut bad = ok;
        bad.priors = vec![0.5, 0.6];
        assert!(bad.into_scenario().is_err());
    }

    #[test]
    fn trine_text_report() {
        let r = discriminate(
            "trine",
            None,
            &McArgs {
                trials: 2000,
                seed: 3,
            },
        )
        .unwrap();
        assert!((r.p_error.unwrap() - 0.25).abs() < 1e-10);
        assert!((r.errorfree_plus_guess - 1.0 / 3.0).abs() < 1e-10);
        let text = Report::Discriminate(r).render(OutputFormat::Text).unwrap();
        assert!(text.contains("minimum error probability"));
    }
}
