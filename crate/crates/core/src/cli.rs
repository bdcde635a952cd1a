//! Command-line interface.
//!
//! Numbers on stdout are printed with 6 decimals; files carry full precision.
//! Every command that writes files also writes a `manifest.json` next to them.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::information::TeamPolicy;
use crate::model::BinaryMultiplierSpec;
use crate::optimize::{
    exhaustive_oracle_kernel, maximize_cooperative_kernel, maximize_team_objective, OptimizerConfig, OracleObjective,
};
use crate::regions::{
    lambda_grid, outer_sum_rate_for_problem, region_for_problem, resolve_scenario, save_region, Problem,
    ScenarioDescriptor, ScenarioKind, DEFAULT_LAMBDA_SAMPLES,
};
use crate::simulate::{estimate_error, write_reports_csv, SimulationParams, DEFAULT_CODEWORD_BUDGET, DEFAULT_EPSILON};
use crate::spec_file::{load_spec, save_channel, ChannelModel, SpecFile};
use crate::verify::{
    verify_auxiliary_equivalence, verify_binary_multiplier, verify_modulo_example, AuxiliaryCheck, VerificationReport,
};

/// Largest tolerated gap by which the grid oracle may beat the optimizer.
pub const ORACLE_AGREEMENT: f64 = 1e-4;

const MODULO_Q2: &str = include_str!("../data/modulo_q2.json");
const COOPERATIVE_BINARY: &str = include_str!("../data/cooperative_binary.json");

#[derive(Parser, Debug)]
#[command(name = "fsmac", version, about = "Finite-state MAC capacity bounds, regions and random-coding simulation")]
pub struct Cli {
    /// Maximum number of worker threads.
    #[arg(long, global = true, env = "FSMAC_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check that a specification file is well formed.
    Validate { path: PathBuf },
    /// Maximize the sum rate over team policies.
    Sumrate(SumrateArgs),
    /// Compute the inner-bound rate region and the outer sum-rate bound.
    Region(RegionArgs),
    /// Estimate the error probability of random coding.
    Simulate(SimulateArgs),
    /// Run one of the built-in verification examples.
    Verify {
        #[command(subcommand)]
        example: VerifyExample,
    },
    /// Write the complete-CSIR equivalent channel of a specification.
    Equivalent {
        path: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ScenarioArgs {
    /// Scenario name; defaults to the natural one for the model kind.
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long)]
    pub delay_a: Option<u32>,
    #[arg(long)]
    pub delay_b: Option<u32>,
    /// Map from receiver CSI to encoder a CSI, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub fa: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub fb: Option<Vec<usize>>,
}

#[derive(Args, Debug, Clone)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct SumrateArgs {
    pub path: PathBuf,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    /// Cross-check against the exhaustive grid oracle at this resolution.
    #[arg(long)]
    pub oracle_grid: Option<usize>,
    /// For noisy-receiver models, also compute the sum rate of the reduced
    /// channel and require a bit-identical result.
    #[arg(long)]
    pub check_equivalent: bool,
    /// Directory for `sumrate.csv`, `policy.json` and the manifest.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RegionArgs {
    pub path: PathBuf,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[arg(long, default_value_t = DEFAULT_LAMBDA_SAMPLES)]
    pub lambdas: usize,
    /// Directory for `hull.csv`, `pieces.csv` and the manifest.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    pub path: PathBuf,
    /// Policy file as written by `sumrate --out-dir`.
    #[arg(long, conflicts_with = "optimal", required_unless_present = "optimal")]
    pub policy: Option<PathBuf>,
    /// Use the sum-rate maximizing policy.
    #[arg(long)]
    pub optimal: bool,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub ra: f64,
    #[arg(long)]
    pub rb: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Largest total number of codewords.
    #[arg(long, default_value_t = DEFAULT_CODEWORD_BUDGET)]
    pub budget: u64,
    /// Directory for `simulation.csv` and the manifest.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum VerifyExample {
    /// Modulo-additive channel: sum rate equals log q - H_min.
    Modulo {
        /// A `modulo_additive` specification; the bundled binary instance by default.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Binary multiplier channel with noisy receiver CSI.
    Multiplier {
        #[arg(long, default_value_t = 0.5)]
        ps: f64,
        #[arg(long, default_value_t = 0.1)]
        pr: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Strategy and auxiliary-variable forms of the cooperative region agree.
    Auxiliary {
        /// An `fsmac` specification; the bundled binary instance by default.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Record of a run, written next to its outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub config: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub version: String,
    pub timestamp: u64,
}

impl RunManifest {
    fn new(command: &str, inputs: &[&Path], seed: Option<u64>) -> Self {
        RunManifest {
            command: command.to_string(),
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            config: BTreeMap::new(),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        }
    }

    fn set(mut self, key: &str, value: impl ToString) -> Self {
        self.config.insert(key.to_string(), value.to_string());
        self
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))?;
        write_file(path, &(text + "\n"))
    }
}

/// Policy file written by `sumrate` and read by `simulate`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PolicyFile {
    pub pi_a: Vec<f64>,
    pub pi_b: Vec<f64>,
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

fn optimizer_config(args: &OptimizerArgs) -> Result<OptimizerConfig> {
    let config = OptimizerConfig {
        restarts: args.restarts,
        max_outer_iters: args.max_iters,
        objective_tolerance: args.tolerance,
        rng_seed: args.seed,
        ..OptimizerConfig::default()
    };
    config.validate()?;
    Ok(config)
}

fn scenario_for(model: &ChannelModel, args: &ScenarioArgs) -> Result<ScenarioDescriptor> {
    let mut s = match &args.scenario {
        Some(name) => ScenarioDescriptor::new(ScenarioKind::parse(name)?),
        None => ScenarioDescriptor::default_for(model),
    };
    if let Some(d) = args.delay_a {
        s.delay_a = d;
    }
    if let Some(d) = args.delay_b {
        s.delay_b = d;
    }
    s.f_a = args.fa.clone();
    s.f_b = args.fb.clone();
    Ok(s)
}

fn load_model(path: &Path) -> Result<ChannelModel> {
    load_spec(path)?.model()
}

/// Sum rate, optimal team policy (if any), named rates and convergence flag.
type SumRateSolution = (f64, Option<TeamPolicy>, Vec<(String, f64)>, bool);

/// Best sum rate of a problem, with the team policy when there is one.
fn solve_sum_rate(problem: &Problem, config: &OptimizerConfig) -> Result<SumRateSolution> {
    match problem {
        Problem::Team(k) => {
            let r = maximize_team_objective(k, (1.0, 0.0, 0.0), config)?;
            let rates = vec![
                ("Ra".to_string(), r.rates.r_a),
                ("Rb".to_string(), r.rates.r_b),
                ("Rsum".to_string(), r.rates.r_sum),
            ];
            Ok((r.value, Some(r.policy), rates, r.converged))
        }
        Problem::Cooperative(k) => {
            let r = maximize_cooperative_kernel(k, 1.0, config)?;
            let rates = vec![("Rb".to_string(), r.rates.r_b), ("Rsum".to_string(), r.rates.r_sum)];
            Ok((r.value, None, rates, r.converged))
        }
    }
}

fn cmd_validate(path: &Path, out: &mut dyn Write) -> Result<()> {
    let spec = load_spec(path)?;
    let model = spec.model()?;
    let channel = model.reduced()?;
    let a = channel.alphabets();
    writeln!(
        out,
        "valid {} nS={} nSa={} nSb={} nXa={} nXb={} nY={}",
        spec.kind(),
        a.n_s,
        a.n_sa,
        a.n_sb,
        a.n_xa,
        a.n_xb,
        a.n_y
    )
    .ok();
    Ok(())
}

fn cmd_sumrate(args: &SumrateArgs, out: &mut dyn Write) -> Result<()> {
    let model = load_model(&args.path)?;
    let scenario = scenario_for(&model, &args.scenario)?;
    let config = optimizer_config(&args.optimizer)?;
    let problem = resolve_scenario(&model, &scenario, config.enumeration_limit)?;
    let (value, policy, rates, converged) = solve_sum_rate(&problem, &config)?;
    writeln!(out, "sum_rate={value:.6}").ok();
    for (label, v) in &rates {
        writeln!(out, "{label}={v:.6}").ok();
    }
    if let Some(p) = &policy {
        writeln!(out, "piA={}", fmt_vec(p.pi_a())).ok();
        writeln!(out, "piB={}", fmt_vec(p.pi_b())).ok();
    }
    writeln!(out, "converged={converged}").ok();

    if let Some(g) = args.oracle_grid {
        let objective = match problem {
            Problem::Team(_) => OracleObjective::SumRate,
            Problem::Cooperative(_) => OracleObjective::Cooperative(1.0),
        };
        let oracle = exhaustive_oracle_kernel(problem.kernel(), objective, g)?;
        writeln!(out, "oracle={:.6}", oracle.value).ok();
        if value < oracle.value - ORACLE_AGREEMENT {
            return Err(Error::NumericalInconsistency(format!(
                "grid oracle {:.9} exceeds ascent {:.9} by more than {ORACLE_AGREEMENT:e}",
                oracle.value, value
            )));
        }
    }

    if args.check_equivalent {
        let ChannelModel::NoisyReceiver(_) = &model else {
            return Err(Error::ScenarioMismatch("--check-equivalent requires a noisy_receiver model".into()));
        };
        let reduced = ChannelModel::FsMac(model.reduced()?);
        let direct = resolve_scenario(&reduced, &ScenarioDescriptor::default_for(&reduced), config.enumeration_limit)?;
        let (other, ..) = solve_sum_rate(&direct, &config)?;
        if other.to_bits() != value.to_bits() {
            return Err(Error::NumericalInconsistency(format!(
                "equivalent-channel sum rate {other:e} differs from scenario sum rate {value:e}"
            )));
        }
        writeln!(out, "equivalent=identical").ok();
    }

    if let Some(dir) = &args.out_dir {
        prepare_dir(dir)?;
        let mut csv = String::from("quantity,value\n");
        csv.push_str(&format!("sumRate,{value}\n"));
        for (label, v) in &rates {
            csv.push_str(&format!("{label},{v}\n"));
        }
        write_file(&dir.join("sumrate.csv"), &csv)?;
        if let Some(p) = &policy {
            let file = PolicyFile {
                pi_a: p.pi_a().to_vec(),
                pi_b: p.pi_b().to_vec(),
            };
            let text = serde_json::to_string_pretty(&file).map_err(|e| Error::Parse(e.to_string()))?;
            write_file(&dir.join("policy.json"), &(text + "\n"))?;
        }
        RunManifest::new("sumrate", &[&args.path], Some(config.rng_seed))
            .set("scenario", scenario.kind.name())
            .set("restarts", config.restarts)
            .set("maxIters", config.max_outer_iters)
            .set("tolerance", config.objective_tolerance)
            .save(&dir.join("manifest.json"))?;
    }
    Ok(())
}

fn cmd_region(args: &RegionArgs, out: &mut dyn Write) -> Result<()> {
    let model = load_model(&args.path)?;
    let scenario = scenario_for(&model, &args.scenario)?;
    let config = optimizer_config(&args.optimizer)?;
    if args.lambdas == 0 {
        return Err(Error::InvalidConfig("--lambdas must be at least 1".into()));
    }
    let problem = resolve_scenario(&model, &scenario, config.enumeration_limit)?;
    let region = region_for_problem(&problem, &lambda_grid(args.lambdas), &config)?;
    let outer = match region.outer_sum_rate {
        Some(v) => v,
        None => outer_sum_rate_for_problem(&problem, &config)?,
    };
    writeln!(out, "outer_sum_rate={outer:.6}").ok();
    writeln!(out, "hull_vertices={}", region.hull.len()).ok();
    for (ra, rb) in &region.hull {
        writeln!(out, "{ra:.6},{rb:.6}").ok();
    }
    if let Some(dir) = &args.out_dir {
        prepare_dir(dir)?;
        save_region(&region, &dir.join("hull.csv"), &dir.join("pieces.csv"))?;
        write_file(&dir.join("outer.txt"), &format!("{outer}\n"))?;
        RunManifest::new("region", &[&args.path], Some(config.rng_seed))
            .set("scenario", scenario.kind.name())
            .set("lambdas", args.lambdas)
            .set("restarts", config.restarts)
            .save(&dir.join("manifest.json"))?;
    }
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let model = load_model(&args.path)?;
    let channel = model.reduced()?;
    let policy = match &args.policy {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            let file: PolicyFile = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
            TeamPolicy::new(file.pi_a, file.pi_b)?
        }
        None => {
            let config = OptimizerConfig {
                rng_seed: args.seed,
                ..OptimizerConfig::default()
            };
            crate::optimize::maximize_sum_rate(&channel, &config)?.policy
        }
    };
    let params = SimulationParams {
        n: args.n,
        rate_a: args.ra,
        rate_b: args.rb,
        epsilon: args.epsilon,
        trials: args.trials,
        rng_seed: args.seed,
        codeword_budget: args.budget,
    };
    let report = estimate_error(&channel, &policy, &params)?;
    writeln!(
        out,
        "errors={} trials={} error_rate={:.6} wilson=[{:.6}, {:.6}] atypical={} ambiguous={} wrong_unique={}",
        report.errors,
        report.trials,
        report.error_rate,
        report.wilson_lo,
        report.wilson_hi,
        report.atypical,
        report.ambiguous,
        report.wrong_unique
    )
    .ok();
    if let Some(dir) = &args.out_dir {
        prepare_dir(dir)?;
        let mut buf = Vec::new();
        write_reports_csv(&[report], &mut buf).expect("writing to memory");
        write_file(&dir.join("simulation.csv"), &String::from_utf8_lossy(&buf))?;
        let mut inputs: Vec<&Path> = vec![&args.path];
        if let Some(p) = &args.policy {
            inputs.push(p);
        }
        RunManifest::new("simulate", &inputs, Some(args.seed))
            .set("n", args.n)
            .set("rateA", args.ra)
            .set("rateB", args.rb)
            .set("trials", args.trials)
            .set("epsilon", args.epsilon)
            .set("policy", if args.optimal { "optimal" } else { "file" })
            .save(&dir.join("manifest.json"))?;
    }
    Ok(())
}

fn seeded(seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        rng_seed: seed,
        ..OptimizerConfig::default()
    }
}

fn run_verify(example: &VerifyExample) -> Result<VerificationReport> {
    match example {
        VerifyExample::Modulo { spec, seed } => {
            let file = match spec {
                Some(p) => load_spec(p)?,
                None => SpecFile::from_json(MODULO_Q2)?,
            };
            let SpecFile::ModuloAdditive(m) = file else {
                return Err(Error::ScenarioMismatch("verify modulo needs a modulo_additive specification".into()));
            };
            verify_modulo_example(&m, &seeded(*seed))
        }
        VerifyExample::Multiplier { ps, pr, seed } => {
            let spec = BinaryMultiplierSpec { p_s: *ps, p_r: *pr };
            spec.validate()?;
            verify_binary_multiplier(&spec, &seeded(*seed))
        }
        VerifyExample::Auxiliary { spec, samples, seed } => {
            let file = match spec {
                Some(p) => load_spec(p)?,
                None => SpecFile::from_json(COOPERATIVE_BINARY)?,
            };
            let channel = file.model()?.reduced()?;
            let check = AuxiliaryCheck {
                samples: *samples,
                ..AuxiliaryCheck::default()
            };
            verify_auxiliary_equivalence(&channel, &check, &seeded(*seed))
        }
    }
}

fn cmd_verify(example: &VerifyExample, out: &mut dyn Write) -> Result<()> {
    let report = run_verify(example)?;
    write!(out, "{}", report.to_text()).ok();
    if report.passed() {
        Ok(())
    } else {
        Err(Error::VerificationFailed(format!("verify {} failed", report.name)))
    }
}

fn cmd_equivalent(path: &Path, output: &Path, out: &mut dyn Write) -> Result<()> {
    let model = load_model(path)?;
    let reduced = ChannelModel::FsMac(model.reduced()?);
    save_channel(&reduced, output)?;
    let mut manifest_path = output.as_os_str().to_owned();
    manifest_path.push(".manifest.json");
    RunManifest::new("equivalent", &[path], None).save(Path::new(&manifest_path))?;
    writeln!(out, "wrote {}", output.display()).ok();
    Ok(())
}

/// Executes a parsed command line, printing results to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidConfig("--threads must be at least 1".into()));
        }
        // Fails only if a pool already exists, in which case it is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Validate { path } => cmd_validate(path, out),
        Command::Sumrate(a) => cmd_sumrate(a, out),
        Command::Region(a) => cmd_region(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Verify { example } => cmd_verify(example, out),
        Command::Equivalent { path, output } => cmd_equivalent(path, output, out),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(name: &str) -> String {
        format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
    }

    fn run_capture(args: &[&str]) -> (Result<()>, String) {
        let cli = Cli::try_parse_from(std::iter::once("fsmac").chain(args.iter().copied())).unwrap();
        let mut buf = Vec::new();
        let r = execute(&cli, &mut buf);
        (r, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn xor_sum_rate_prints_one() {
        let (r, out) = run_capture(&["sumrate", &data("xor_mac.json")]);
        r.unwrap();
        assert!(out.starts_with("sum_rate=1.000000"), "{out}");
    }

    #[test]
    fn oracle_line_added() {
        let (r, out) = run_capture(&["sumrate", &data("xor_mac.json"), "--oracle-grid", "8"]);
        r.unwrap();
        assert!(out.contains("oracle=1.000000"), "{out}");
    }

    #[test]
    fn multiplier_bad_probability_is_validation_error() {
        let (r, _) = run_capture(&["verify", "multiplier", "--pr", "1.5"]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
    }

    #[test]
    fn scenario_flags_parse() {
        let cli = Cli::try_parse_from(["fsmac", "region", "x.json", "--scenario", "deterministic_csit_of_csir", "--fa", "0,1", "--fb", "1,0"]).unwrap();
        let Command::Region(a) = cli.command else { panic!() };
        assert_eq!(a.scenario.fa, Some(vec![0, 1]));
        assert_eq!(a.lambdas, DEFAULT_LAMBDA_SAMPLES);
    }

    #[test]
    fn simulate_requires_policy_source() {
        assert!(Cli::try_parse_from(["fsmac", "simulate", "x.json", "--n", "10", "--ra", "0.1", "--rb", "0.1"]).is_err());
    }
}
