//! Command-line driver: simulate, optimize, sweep, bound and validate
//! subcommands over YAML scenario configs. Errors leave machine-readable
//! JSON on stderr and a nonzero exit code.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use repeaterforge::config::ScenarioConfig;
use repeaterforge::hardware::ParamName;
use repeaterforge::optimizer::{absolute_minimal_sweep, genetic_optimize, SweepConfig};
use repeaterforge::report::{config_hash, simulate_report, CSV_HEADER};
use repeaterforge::targetmetric::vbqc_min_fidelity;

#[derive(Parser)]
#[command(
    name = "repeaterforge",
    version,
    about = "Quantum-repeater chain simulation and hardware-requirement search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct CommonRunArgs {
    /// Scenario configuration file (YAML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's number of simulation runs.
    #[arg(long)]
    runs: Option<usize>,
    /// Directory for result artifacts (defaults to the working directory).
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Result format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Runs the configured scenario (expanding any sweep stanza) and writes
    /// metrics with replay metadata.
    Simulate {
        #[command(flatten)]
        common: CommonRunArgs,
        /// Includes every delivery record (with density matrices) in the
        /// JSON output.
        #[arg(long)]
        deliveries: bool,
        /// Writes the first run's newline-delimited event trace (time, node,
        /// event) next to the results for replay diffing.
        #[arg(long)]
        trace: bool,
    },
    /// Searches for minimal hardware improvements with the genetic
    /// algorithm; emits a generation history file and the best candidate.
    Optimize {
        #[command(flatten)]
        common: CommonRunArgs,
    },
    /// Sweeps one hardware parameter from its baseline with everything else
    /// perfect, reporting the absolute minimal requirement.
    Sweep {
        #[command(flatten)]
        common: CommonRunArgs,
        /// Hardware parameter to sweep (snake_case table name).
        #[arg(long)]
        parameter: String,
    },
    /// Prints the minimum teleportation fidelity supporting two-qubit VBQC
    /// at the given entangling rate (Hz) and server coherence time (s).
    Bound { rate_hz: f64, coherence_time: f64 },
    /// Runs the independent oracle suites (POVM brute force, quadrature,
    /// Monte-Carlo) and reports pass counts.
    Validate {
        /// Random (a, b, T, tau) tuples for the time-window suite.
        #[arg(long, default_value_t = 50)]
        tuples: usize,
        /// Random parameter draws for the double-click POVM suite.
        #[arg(long, default_value_t = 500)]
        draws: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() {
    if let Ok(threads) = std::env::var("REPEATERFORGE_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("{}", serde_json::json!({ "error": format!("{err:#}") }));
        std::process::exit(1);
    }
}

fn load(common: &CommonRunArgs) -> Result<ScenarioConfig> {
    let mut config = ScenarioConfig::load(&common.config)
        .with_context(|| format!("loading {}", common.config.display()))?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(runs) = common.runs {
        config.n_runs = runs;
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { common, deliveries, trace } => {
            let config = load(&common)?;
            std::fs::create_dir_all(&common.out_dir)?;
            let expanded = config.expand_sweep()?;
            let mut csv = vec![CSV_HEADER.to_string()];
            for cfg in &expanded {
                let report = simulate_report(cfg, deliveries)?;
                if trace {
                    let topology = cfg.to_topology()?;
                    let hardware = cfg.to_hardware()?;
                    let mut protocol = cfg.to_protocol();
                    protocol.collect_trace = true;
                    let output =
                        repeaterforge::engine::run_simulation(&topology, &hardware, &protocol)?;
                    let path = common.out_dir.join(format!("{}.trace", sanitize(&cfg.name)));
                    let mut lines = vec![
                        format!("# config_hash={}", config_hash(cfg)),
                        format!("# seed={}", cfg.seed),
                        format!("# version={}", env!("CARGO_PKG_VERSION")),
                    ];
                    lines.extend(output.trace);
                    std::fs::write(&path, lines.join("\n") + "\n")?;
                }
                match common.format {
                    OutputFormat::Json => {
                        let path = common.out_dir.join(format!("{}.json", sanitize(&cfg.name)));
                        std::fs::write(&path, report.to_json())?;
                        println!(
                            "{}: rate {:.6} Hz (±{:.2e}), F_tel {:.6} (±{:.2e}), targets met: {} -> {}",
                            cfg.name,
                            report.metrics.rate_hz,
                            report.metrics.sem_rate,
                            report.metrics.f_tel,
                            report.metrics.sem_f_tel,
                            report.margins.met,
                            path.display()
                        );
                    }
                    OutputFormat::Csv => {
                        csv.push(report.csv_row());
                        println!("{}", report.csv_row());
                    }
                }
            }
            if common.format == OutputFormat::Csv {
                let path = common.out_dir.join(format!("{}.csv", sanitize(&config.name)));
                std::fs::write(&path, csv.join("\n") + "\n")?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Optimize { common } => {
            let config = load(&common)?;
            std::fs::create_dir_all(&common.out_dir)?;
            let scenario = config.to_scenario()?;
            let ga = config.to_ga_config();
            let result = genetic_optimize(&scenario, &ga)?;
            let history_path = common
                .out_dir
                .join(format!("{}-history.jsonl", sanitize(&config.name)));
            let mut lines = Vec::new();
            for record in &result.history {
                lines.push(serde_json::to_string(&serde_json::json!({
                    "generation": record.generation,
                    "best_cost": record.best_cost,
                    "best_candidate": record.best_candidate,
                }))?);
            }
            std::fs::write(&history_path, lines.join("\n") + "\n")?;
            let best_path = common
                .out_dir
                .join(format!("{}-best.json", sanitize(&config.name)));
            std::fs::write(
                &best_path,
                serde_json::to_string_pretty(&serde_json::json!({
                    "config_hash": config_hash(&config),
                    "seed": config.seed,
                    "version": env!("CARGO_PKG_VERSION"),
                    "terminated_by_var": result.terminated_by_var,
                    "generations_run": result.history.len(),
                    "best": result.best,
                }))?,
            )?;
            let eval = result.best.evaluation.expect("best candidate evaluated");
            println!(
                "best cost {:.6e} (H_C {:.3}) rate {:.6} Hz F_tel {:.6} targets met: {}",
                eval.cost, eval.hardware_cost, eval.rate_hz, eval.f_tel, eval.targets_met
            );
            println!("history -> {}", history_path.display());
            println!("best    -> {}", best_path.display());
            Ok(())
        }
        Command::Sweep { common, parameter } => {
            let config = load(&common)?;
            std::fs::create_dir_all(&common.out_dir)?;
            let name: ParamName = serde_yaml::from_str(&parameter)
                .map_err(|_| anyhow::anyhow!("unknown hardware parameter {parameter:?}"))?;
            let scenario = config.to_scenario()?;
            let result = absolute_minimal_sweep(&scenario, name, &SweepConfig::default())?;
            let path = common
                .out_dir
                .join(format!("{}-sweep-{parameter}.json", sanitize(&config.name)));
            std::fs::write(
                &path,
                serde_json::to_string_pretty(&serde_json::json!({
                    "config_hash": config_hash(&config),
                    "seed": config.seed,
                    "version": env!("CARGO_PKG_VERSION"),
                    "result": result,
                }))?,
            )?;
            match (&result.feasible, result.minimal_value) {
                (true, Some(value)) => println!(
                    "absolute minimal {parameter}: {value:.6e} (factor {:.3}) -> {}",
                    result.improvement_factor.unwrap_or(f64::NAN),
                    path.display()
                ),
                _ => println!(
                    "targets infeasible over the swept range -> {}",
                    path.display()
                ),
            }
            Ok(())
        }
        Command::Bound {
            rate_hz,
            coherence_time,
        } => {
            let bound = vbqc_min_fidelity(rate_hz, coherence_time)?;
            println!("{bound:.4}");
            Ok(())
        }
        Command::Validate { tuples, draws, seed } => {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
            let mut failures = 0usize;
            println!("time-window closed forms vs adaptive quadrature ({tuples} tuples):");
            for report in repeaterforge::validate::run_time_window_suite(tuples, &mut rng) {
                println!(
                    "  {:<28} {:>4} passed, {:>2} failed (worst rel dev {:.2e})",
                    report.name, report.passed, report.failed, report.worst_deviation
                );
                failures += report.failed;
            }
            let (passed, failed, worst) = run_povm_suite(draws, &mut rng);
            println!(
                "double-click closed form vs POVM brute force: {passed} passed, {failed} failed (worst dev {worst:.2e})"
            );
            failures += failed;
            for (name, pass) in run_mc_suite(&mut rng) {
                println!("  {:<46} {}", name, if pass { "passed" } else { "FAILED" });
                if !pass {
                    failures += 1;
                }
            }
            if failures > 0 {
                bail!("{failures} oracle checks failed");
            }
            println!("all oracle suites passed");
            Ok(())
        }
    }
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Randomized double-click agreement suite; returns (passed, failed, worst).
fn run_povm_suite(draws: usize, rng: &mut rand_chacha::ChaCha12Rng) -> (usize, usize, f64) {
    use rand::Rng;
    use repeaterforge::linkmodels::{
        double_click_oracle, double_click_outcome, CoincidenceProbs, DetectorMode,
        DoubleClickParams,
    };
    let mut passed = 0;
    let mut failed = 0;
    let mut worst = 0.0f64;
    for trial in 0..draws {
        let coincidence = (trial % 2 == 1).then(|| CoincidenceProbs {
            ph_ph: rng.gen_range(0.1..1.0),
            ph_dc: rng.gen_range(0.1..1.0),
            dc_dc: rng.gen_range(0.1..1.0),
        });
        let params = DoubleClickParams::<f64> {
            p_a: rng.gen_range(0.0..1.0),
            p_b: rng.gen_range(0.0..1.0),
            visibility: rng.gen_range(0.0..1.0),
            p_dc: rng.gen_range(0.0..0.2),
            f_em_a: rng.gen_range(0.25..1.0),
            f_em_b: rng.gen_range(0.25..1.0),
            detector_mode: if rng.gen_bool(0.5) {
                DetectorMode::NR
            } else {
                DetectorMode::NNR
            },
            coincidence,
        };
        let closed = double_click_outcome(&params).expect("valid params");
        let oracle = double_click_oracle(&params).expect("valid params");
        let dev: f64 = (closed.success_prob - oracle.success_prob)
            .abs()
            .max(
                closed
                    .state_plus
                    .matrix()
                    .max_abs_diff(oracle.state_plus.matrix()),
            )
            .max(
                closed
                    .state_minus
                    .matrix()
                    .max_abs_diff(oracle.state_minus.matrix()),
            );
        worst = worst.max(dev);
        if dev <= 1e-10 {
            passed += 1;
        } else {
            failed += 1;
        }
    }
    (passed, failed, worst)
}

fn run_mc_suite(rng: &mut rand_chacha::ChaCha12Rng) -> Vec<(&'static str, bool)> {
    use repeaterforge::qstate::avg_teleportation_fidelity;
    use repeaterforge::validate::{
        collective_gaussian_z_error_mc, haar_teleportation_fidelity_mc, random_density_matrix,
    };
    let mut out = Vec::new();
    let sigma = random_density_matrix(rng, 2);
    let six = avg_teleportation_fidelity(&sigma).expect("valid state");
    let (mc, sem) = haar_teleportation_fidelity_mc(&sigma, 100_000, rng);
    out.push((
        "Haar teleportation fidelity vs six-state average",
        (mc - six).abs() < 4.0 * sem.max(1e-6),
    ));
    let (t, tau) = (0.4, 1.0);
    let (mean, sem) = collective_gaussian_z_error_mc(t, tau, 100_000, rng);
    let expect = 0.5 * (1.0 - (-2.0 * t * t / (tau * tau)).exp());
    out.push((
        "collective Gaussian dephasing vs closed form",
        (mean - expect).abs() < 3.0 * sem.max(1e-6),
    ));
    out
}
