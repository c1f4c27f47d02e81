//! Command-line front end: load or generate instances, compute bounds,
//! and run the verification chains.
//!
//! Exit codes are stable: 0 success (all checks pass), 1 input error,
//! 2 verification failure, 3 numerical/solver failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ratiobound::generators::{
    gen_constant_ratio, gen_random, gen_ski_rental, random_distributions, SkiRentalParams,
};
use ratiobound::verify::{format_sig, CheckStatus, FaultInjection, VerifyOptions};
use ratiobound::{
    best_adversary_eor, best_adversary_roe, eor_lower_bound, pure_minimax, roe_lower_bound,
    verify_instance, Distribution, Error, GameInstance, ToleranceConfig,
};

const EXIT_OK: i32 = 0;
const EXIT_INPUT: i32 = 1;
const EXIT_VERIFY_FAIL: i32 = 2;
const EXIT_SOLVER: i32 = 3;

#[derive(Parser)]
#[command(
    name = "ratiobound",
    version,
    about = "Minimax lower bounds for ratio-cost games: pure, EOR and ROE objectives, \
             with a numerical verifier for the whole bound chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the pure minimax value or an optimal adversary mixture.
    Solve {
        /// Instance file (JSON).
        instance: PathBuf,
        /// Objective: pure min-max, EOR game value, or ROE game value.
        #[arg(long, value_enum)]
        objective: Objective,
        #[command(flatten)]
        tol: TolOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Evaluate the EOR and ROE lower bounds for fixed distributions.
    Bound {
        /// Instance file (JSON).
        instance: PathBuf,
        /// Distribution file; repeat for several distributions.
        #[arg(long = "dist", value_name = "PATH", required = true)]
        dists: Vec<PathBuf>,
        #[command(flatten)]
        tol: TolOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Run every verification chain on an instance.
    Verify {
        /// Instance file (JSON).
        instance: PathBuf,
        /// Distribution file; repeat for several distributions.
        #[arg(long = "dist", value_name = "PATH")]
        dists: Vec<PathBuf>,
        /// Synthesize this many seeded random fixed distributions.
        #[arg(long, value_name = "K")]
        random_dists: Option<usize>,
        /// Seed for synthesized distributions and deep sampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also confirm the mixed-state equalities by random sampling.
        #[arg(long)]
        deep: bool,
        /// Mixtures sampled per instance in deep mode.
        #[arg(long, default_value_t = 100_000, value_name = "N")]
        deep_samples: usize,
        /// Self-test fault injection: offset every solver output by this
        /// amount before checking. The run should then fail (exit 2).
        #[arg(long, value_name = "EPS")]
        perturb: Option<f64>,
        #[command(flatten)]
        tol: TolOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Generate an instance file.
    Gen {
        #[command(subcommand)]
        generator: GenCommand,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Rent-or-buy game: thresholds vs. adversary stopping days.
    Ski {
        /// Purchase price in rent units (>= 2).
        #[arg(long)]
        buy: u32,
        /// Number of stopping days (>= buy + 1).
        #[arg(long)]
        horizon: u32,
        /// Output path for the instance JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// Random instance with entries uniform in [lo, hi).
    Random {
        #[arg(long)]
        designs: usize,
        #[arg(long)]
        states: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.1)]
        lo: f64,
        #[arg(long, default_value_t = 10.0)]
        hi: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Instance with benchmark = ratio x algorithm, so every bound equals
    /// the ratio.
    Const {
        #[arg(long)]
        ratio: f64,
        #[arg(long)]
        designs: usize,
        #[arg(long)]
        states: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Objective {
    Pure,
    Eor,
    Roe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct OutputOpts {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TolOpts {
    /// Absolute comparison tolerance (default 1e-9).
    #[arg(long, value_name = "FLOAT")]
    tol: Option<f64>,
    /// Relative tolerance, applied only above magnitude 1 (default 1e-9).
    #[arg(long, value_name = "FLOAT")]
    rel_tol: Option<f64>,
    /// Zero-sum certificate tolerance (default 1e-10).
    #[arg(long, value_name = "FLOAT")]
    lp_tol: Option<f64>,
    /// Bisection iteration cap for the ROE solve (default 200).
    #[arg(long, value_name = "N")]
    max_bisection_iters: Option<usize>,
    /// Simplex pivot cap per game solve (default 10000).
    #[arg(long, value_name = "N")]
    max_lp_iters: Option<usize>,
}

impl TolOpts {
    fn build(&self) -> Result<ToleranceConfig, Error> {
        let mut cfg = ToleranceConfig::default();
        if let Some(v) = self.tol {
            cfg.abs_tol = v;
        }
        if let Some(v) = self.rel_tol {
            cfg.rel_tol = v;
        }
        if let Some(v) = self.lp_tol {
            cfg.lp_tol = v;
        }
        if let Some(v) = self.max_bisection_iters {
            cfg.max_bisection_iters = v;
        }
        if let Some(v) = self.max_lp_iters {
            cfg.max_lp_iters = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            let _ = e.print();
            process::exit(code);
        }
    };
    process::exit(run(cli));
}

fn run(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Solver(_) => EXIT_SOLVER,
                _ => EXIT_INPUT,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Solve { instance, objective, tol, output } => {
            let inst = read_instance(&instance)?;
            let tol = tol.build()?;
            let report = solve_report(&inst, objective, &tol)?;
            emit(&output, &report, || render_solve_text(&report))?;
            Ok(EXIT_OK)
        }
        Command::Bound { instance, dists, tol, output } => {
            let inst = read_instance(&instance)?;
            tol.build()?;
            let mut bounds = Vec::new();
            for path in &dists {
                let dist = read_distribution(path, &inst)?;
                bounds.push(dist_bound(&inst, &dist, &path.display().to_string())?);
            }
            let report = BoundReport { instance: inst.name().to_string(), bounds };
            emit(&output, &report, || render_bound_text(&report))?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            instance,
            dists,
            random_dists,
            seed,
            deep,
            deep_samples,
            perturb,
            tol,
            output,
        } => {
            let inst = read_instance(&instance)?;
            let tol = tol.build()?;
            let mut fixed: Vec<Distribution> = Vec::new();
            for path in &dists {
                fixed.push(read_distribution(path, &inst)?);
            }
            if let Some(k) = random_dists {
                fixed.extend(random_distributions(inst.num_states(), k, seed));
            }
            let opts = VerifyOptions {
                deep,
                deep_samples,
                deep_seed: seed,
                faults: perturb.map(FaultInjection::uniform).unwrap_or_default(),
            };
            let report = verify_instance(&inst, &fixed, &tol, &opts)?;
            emit(&output, &report, || report.to_text())?;
            Ok(match report.overall {
                CheckStatus::Pass => EXIT_OK,
                CheckStatus::Fail => EXIT_VERIFY_FAIL,
                CheckStatus::Unverified => EXIT_SOLVER,
            })
        }
        Command::Gen { generator } => {
            let (inst, out) = match generator {
                GenCommand::Ski { buy, horizon, out } => {
                    (gen_ski_rental(SkiRentalParams { buy_cost: buy, horizon })?, out)
                }
                GenCommand::Random { designs, states, seed, lo, hi, out } => {
                    (gen_random(designs, states, seed, lo, hi)?, out)
                }
                GenCommand::Const { ratio, designs, states, seed, out } => {
                    (gen_constant_ratio(designs, states, ratio, seed)?, out)
                }
            };
            write_file(&out, &inst.to_json())?;
            let pure = pure_minimax(&inst);
            println!(
                "wrote {}: {} designs x {} states, pure={}",
                out.display(),
                inst.num_designs(),
                inst.num_states(),
                format_sig(pure.value, 12)
            );
            Ok(EXIT_OK)
        }
    }
}

fn read_instance(path: &Path) -> Result<GameInstance, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    GameInstance::from_json(&text)
}

fn read_distribution(path: &Path, inst: &GameInstance) -> Result<Distribution, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let dist = Distribution::from_json(&text)?;
    if dist.len() != inst.num_states() {
        return Err(Error::validation(format!(
            "{}: distribution has {} weights but instance has {} states",
            path.display(),
            dist.len(),
            inst.num_states()
        )));
    }
    Ok(dist)
}

fn write_file(path: &Path, content: &str) -> Result<(), Error> {
    fs::write(path, content)
        .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}

fn emit<T: Serialize>(
    output: &OutputOpts,
    report: &T,
    text: impl FnOnce() -> String,
) -> Result<(), Error> {
    let rendered = match output.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("valid json");
            s.push('\n');
            s
        }
        Format::Text => text(),
    };
    match &output.out {
        Some(path) => write_file(path, &rendered),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SolveReport {
    objective: String,
    instance: String,
    value: f64,
    best_design: usize,
    best_design_label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    worst_state: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    worst_state_label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    adversary_dist: Option<Vec<f64>>,
    iterations: usize,
    residual: f64,
}

fn solve_report(
    inst: &GameInstance,
    objective: Objective,
    tol: &ToleranceConfig,
) -> Result<SolveReport, Error> {
    let report = match objective {
        Objective::Pure => {
            let v = pure_minimax(inst);
            let design = v.argmin_design.expect("recorded");
            let state = v.argmax_state.expect("recorded");
            SolveReport {
                objective: "pure".to_string(),
                instance: inst.name().to_string(),
                value: v.value,
                best_design: design,
                best_design_label: inst.designs()[design].clone(),
                worst_state: Some(state),
                worst_state_label: Some(inst.states()[state].clone()),
                adversary_dist: None,
                iterations: 0,
                residual: 0.0,
            }
        }
        Objective::Eor | Objective::Roe => {
            let result = match objective {
                Objective::Eor => best_adversary_eor(inst, tol)?,
                _ => best_adversary_roe(inst, tol)?,
            };
            SolveReport {
                objective: if objective == Objective::Eor { "eor" } else { "roe" }.to_string(),
                instance: inst.name().to_string(),
                value: result.value,
                best_design: result.best_design,
                best_design_label: inst.designs()[result.best_design].clone(),
                worst_state: None,
                worst_state_label: None,
                adversary_dist: Some(result.adversary_dist.weights().to_vec()),
                iterations: result.iterations,
                residual: result.residual,
            }
        }
    };
    Ok(report)
}

fn render_solve_text(r: &SolveReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("objective:   {}\n", r.objective));
    out.push_str(&format!("instance:    {}\n", r.instance));
    out.push_str(&format!("value:       {}\n", format_sig(r.value, 12)));
    out.push_str(&format!("best design: {} ({})\n", r.best_design, r.best_design_label));
    if let (Some(s), Some(label)) = (&r.worst_state, &r.worst_state_label) {
        out.push_str(&format!("worst state: {s} ({label})\n"));
    }
    if let Some(dist) = &r.adversary_dist {
        let weights: Vec<String> = dist.iter().map(|&w| format_sig(w, 12)).collect();
        out.push_str(&format!("adversary:   [{}]\n", weights.join(", ")));
    }
    out.push_str(&format!("iterations:  {}\n", r.iterations));
    out.push_str(&format!("residual:    {}\n", format_sig(r.residual, 12)));
    out
}

#[derive(Serialize)]
struct BoundReport {
    instance: String,
    bounds: Vec<DistBound>,
}

#[derive(Serialize)]
struct DistBound {
    dist: String,
    eor_bound: f64,
    eor_design: usize,
    eor_design_label: String,
    roe_bound: f64,
    roe_design: usize,
    roe_design_label: String,
}

fn dist_bound(inst: &GameInstance, dist: &Distribution, label: &str) -> Result<DistBound, Error> {
    let eor = eor_lower_bound(inst, dist)?;
    let roe = roe_lower_bound(inst, dist)?;
    Ok(DistBound {
        dist: label.to_string(),
        eor_bound: eor.value,
        eor_design: eor.best_design,
        eor_design_label: inst.designs()[eor.best_design].clone(),
        roe_bound: roe.value,
        roe_design: roe.best_design,
        roe_design_label: inst.designs()[roe.best_design].clone(),
    })
}

fn render_bound_text(r: &BoundReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("instance: {}\n", r.instance));
    for b in &r.bounds {
        out.push_str(&format!("dist: {}\n", b.dist));
        out.push_str(&format!(
            "  eor_bound {:>20}  design {} ({})\n",
            format_sig(b.eor_bound, 12),
            b.eor_design,
            b.eor_design_label
        ));
        out.push_str(&format!(
            "  roe_bound {:>20}  design {} ({})\n",
            format_sig(b.roe_bound, 12),
            b.roe_design,
            b.roe_design_label
        ));
    }
    out
}
