//! Command-line front end: parses and validates an experiment
//! configuration, runs the selected engine, and writes figure-ready CSV
//! tables plus a metrics JSON with a full config echo.
//!
//! Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 internal
//! invariant violation (a conservation breach aborts the run).

mod output;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use boxwalk_core::activespin::{run_active, SpinParams};
use boxwalk_core::analysis::{
    aggregate_trials, aggregate_with, convergence_sweep, spreading_moments, total_variation,
    Distribution, TrialAggregate, TrialOutcome,
};
use boxwalk_core::boxball::RunConfig;
use boxwalk_core::coin::{CoinParams, CoinSchedule, QubitSpec};
use boxwalk_core::quantum::AmplitudeField;
use boxwalk_core::rng::stream_rng;
use clap::{Parser, ValueEnum};

use output::{ConfigEcho, Metrics, SweepRow};

/// Discrete-time walk simulator: an exact amplitude engine plus two
/// classical lattice engines (balls in boxes, biased active spins) whose
/// statistics converge to the exact walk as the population grows.
#[derive(Debug, Parser)]
#[command(name = "boxwalk", version)]
struct Cli {
    /// Engine to run.
    #[arg(long, value_enum, default_value_t = Engine::Exact)]
    engine: Engine,

    /// Coin phase xi, radians.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    xi: f64,

    /// Coin rotation theta, radians in [0, pi/2].
    #[arg(long, default_value_t = FRAC_PI_4)]
    theta: f64,

    /// Coin phase zeta, radians.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    zeta: f64,

    /// Initial magnitude on internal state 0.
    #[arg(long, default_value_t = FRAC_1_SQRT_2)]
    r0: f64,

    /// Initial phase on internal state 0, radians.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi0: f64,

    /// Initial magnitude on internal state 1.
    #[arg(long, default_value_t = FRAC_1_SQRT_2)]
    r1: f64,

    /// Initial phase on internal state 1, radians.
    #[arg(long, default_value_t = -FRAC_PI_2, allow_negative_numbers = true)]
    phi1: f64,

    /// Ball / particle count for the classical engines.
    #[arg(short = 'N', value_name = "COUNT", default_value_t = 1_000_000)]
    n: u64,

    /// Number of walk steps.
    #[arg(long, default_value_t = 100)]
    steps: u32,

    /// Independent trials; trial i runs on RNG stream i of the seed.
    #[arg(long, default_value_t = 1)]
    trials: u64,

    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Comma-separated ball counts for the compare engine's sweep.
    #[arg(long, value_delimiter = ',', value_name = "N1,N2,...")]
    n_sweep: Option<Vec<u64>>,

    /// Spin-engine hop rate D; per-step hop probabilities are D(1 +/- eps*s).
    #[arg(long, value_name = "D")]
    hop_rate: Option<f64>,

    /// Spin-engine hop bias eps, in [0, 1].
    #[arg(long, value_name = "EPS")]
    bias: Option<f64>,

    /// Directory for result files (created if missing).
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    /// Exact amplitude evolution (the oracle).
    Exact,
    /// Balls in boxes with phase tags and a marked ball.
    Boxball,
    /// Active spins with biased hopping and occupation-driven flips.
    Activespin,
    /// Box-engine convergence sweep against the exact walk.
    Compare,
}

impl Engine {
    fn name(self) -> &'static str {
        match self {
            Engine::Exact => "exact",
            Engine::Boxball => "boxball",
            Engine::Activespin => "activespin",
            Engine::Compare => "compare",
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Engine(#[from] boxwalk_core::Error),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Engine(boxwalk_core::Error::InvalidParameter { .. }) => 2,
            CliError::Engine(boxwalk_core::Error::ConservationViolation { .. }) => 4,
            CliError::Io { .. } => 3,
        }
    }
}

/// Fully validated experiment; every engine input is range-checked here so
/// the run functions cannot fail on configuration.
#[derive(Debug)]
struct Experiment {
    engine: Engine,
    coins: CoinSchedule,
    initial: QubitSpec,
    n: u64,
    steps: u32,
    trials: u64,
    seed: u64,
    sweep_totals: Vec<u64>,
    spin: Option<SpinParams>,
    out_dir: PathBuf,
    echo: ConfigEcho,
}

fn validate(cli: &Cli) -> Result<Experiment, CliError> {
    if !(0.0..=FRAC_PI_2).contains(&cli.theta) {
        return Err(CliError::Config(format!(
            "--theta {} is outside the accepted range [0, pi/2] radians",
            cli.theta
        )));
    }
    let coin = CoinParams::new(cli.xi, cli.theta, cli.zeta)?;

    let norm_sq = cli.r0 * cli.r0 + cli.r1 * cli.r1;
    if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > 1e-9 {
        return Err(CliError::Config(format!(
            "--r0/--r1 must satisfy r0^2 + r1^2 = 1 within 1e-9, got {norm_sq}"
        )));
    }
    let initial = QubitSpec::new(cli.r0, cli.phi0, cli.r1, cli.phi1)?;

    if cli.n == 0 {
        return Err(CliError::Config(
            "-N must be at least 1 ball or particle".into(),
        ));
    }
    if cli.trials == 0 {
        return Err(CliError::Config("--trials must be at least 1".into()));
    }

    if cli.n_sweep.is_some() && cli.engine != Engine::Compare {
        return Err(CliError::Config(
            "--n-sweep only applies to the compare engine".into(),
        ));
    }
    if (cli.hop_rate.is_some() || cli.bias.is_some()) && cli.engine != Engine::Activespin {
        return Err(CliError::Config(
            "--hop-rate and --bias only apply to the activespin engine".into(),
        ));
    }

    let spin = if cli.engine == Engine::Activespin {
        let d = cli.hop_rate.unwrap_or(0.5);
        let epsilon = cli.bias.unwrap_or(1.0);
        if !(0.0..=0.5).contains(&d) {
            return Err(CliError::Config(format!(
                "--hop-rate {d} is outside the accepted range [0, 0.5] \
                 (2D <= 1 keeps the per-step hop probabilities below 1)"
            )));
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(CliError::Config(format!(
                "--bias {epsilon} is outside the accepted range [0, 1]"
            )));
        }
        Some(SpinParams::new(d, epsilon, coin)?)
    } else {
        None
    };

    let sweep_totals = if cli.engine == Engine::Compare {
        let totals = cli
            .n_sweep
            .clone()
            .unwrap_or_else(|| vec![100, 10_000, 1_000_000]);
        if totals.contains(&0) {
            return Err(CliError::Config(
                "--n-sweep entries must be at least 1".into(),
            ));
        }
        totals
    } else {
        Vec::new()
    };

    let echo = ConfigEcho {
        engine: cli.engine.name(),
        xi: cli.xi,
        theta: cli.theta,
        zeta: cli.zeta,
        r0: cli.r0,
        phi0: cli.phi0,
        r1: cli.r1,
        phi1: cli.phi1,
        n: cli.n,
        steps: cli.steps,
        trials: cli.trials,
        seed: cli.seed,
        n_sweep: (cli.engine == Engine::Compare).then(|| sweep_totals.clone()),
        hop_rate: spin.as_ref().map(SpinParams::d),
        bias: spin.as_ref().map(SpinParams::epsilon),
        out_dir: cli.out_dir.display().to_string(),
    };

    Ok(Experiment {
        engine: cli.engine,
        coins: CoinSchedule::homogeneous(coin),
        initial,
        n: cli.n,
        steps: cli.steps,
        trials: cli.trials,
        seed: cli.seed,
        sweep_totals,
        spin,
        out_dir: cli.out_dir.clone(),
        echo,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let exp = validate(cli)?;
    std::fs::create_dir_all(&exp.out_dir).map_err(|source| CliError::Io {
        path: exp.out_dir.clone(),
        source,
    })?;

    let started = Instant::now();
    let (metrics, mut files) = match exp.engine {
        Engine::Exact => run_exact(&exp)?,
        Engine::Boxball => run_boxball(&exp)?,
        Engine::Activespin => run_activespin(&exp)?,
        Engine::Compare => run_compare(&exp)?,
    };
    let elapsed = started.elapsed();

    // Wall-clock timing is reported here rather than in metrics.json so
    // that identical configurations produce byte-identical files.
    output::write_metrics(&exp.out_dir.join("metrics.json"), &metrics).map_err(|source| {
        CliError::Io {
            path: exp.out_dir.join("metrics.json"),
            source,
        }
    })?;
    files.push("metrics.json".to_string());

    Ok(format!(
        "engine={} seed={} steps={} runtime={:.3?}\nwrote {} -> {}",
        exp.engine.name(),
        exp.seed,
        exp.steps,
        elapsed,
        files.join(" "),
        exp.out_dir.display()
    ))
}

fn oracle_distribution(exp: &Experiment) -> Distribution {
    AmplitudeField::evolve(&exp.initial, &exp.coins, exp.steps).position_distribution()
}

fn run_exact(exp: &Experiment) -> Result<(Metrics, Vec<String>), CliError> {
    let dist = oracle_distribution(exp);
    let path = exp.out_dir.join("distribution.csv");
    output::write_oracle_distribution(&path, &dist)
        .map_err(|source| CliError::Io { path, source })?;
    let (mean, std_dev) = spreading_moments(&dist);
    Ok((
        Metrics {
            engine: "exact",
            seed: exp.seed,
            tv_to_oracle: Some(0.0),
            endpoint_tv_to_oracle: None,
            mean: Some(mean),
            std_dev: Some(std_dev),
            sweep: None,
            config: exp.echo.clone(),
        },
        vec!["distribution.csv".to_string()],
    ))
}

fn classical_outputs(
    exp: &Experiment,
    engine: &'static str,
    agg: &TrialAggregate,
) -> Result<(Metrics, Vec<String>), CliError> {
    let endpoint = agg.endpoint_distribution();
    let mut files = Vec::new();

    let path = exp.out_dir.join("distribution.csv");
    output::write_classical_distribution(&path, agg.mean_occupation(), &endpoint)
        .map_err(|source| CliError::Io { path, source })?;
    files.push("distribution.csv".to_string());

    let trajectories = agg.trajectories().expect("trajectories were kept");
    for (trial, trajectory) in trajectories.iter().enumerate() {
        let name = format!("trajectory_{trial}.csv");
        let path = exp.out_dir.join(&name);
        output::write_trajectory(&path, trajectory)
            .map_err(|source| CliError::Io { path, source })?;
        files.push(name);
    }

    let oracle = oracle_distribution(exp);
    let (mean, std_dev) = spreading_moments(agg.mean_occupation());
    Ok((
        Metrics {
            engine,
            seed: exp.seed,
            tv_to_oracle: Some(total_variation(agg.mean_occupation(), &oracle)),
            endpoint_tv_to_oracle: Some(total_variation(&endpoint, &oracle)),
            mean: Some(mean),
            std_dev: Some(std_dev),
            sweep: None,
            config: exp.echo.clone(),
        },
        files,
    ))
}

fn run_boxball(exp: &Experiment) -> Result<(Metrics, Vec<String>), CliError> {
    let cfg = RunConfig::new(
        exp.coins.clone(),
        exp.initial,
        exp.n,
        exp.steps,
        exp.seed,
        exp.trials,
    )?;
    let agg = aggregate_trials(&cfg, true)?;
    classical_outputs(exp, "boxball", &agg)
}

fn run_activespin(exp: &Experiment) -> Result<(Metrics, Vec<String>), CliError> {
    let params = exp.spin.as_ref().expect("validated for activespin");
    let cfg = RunConfig::new(
        exp.coins.clone(),
        exp.initial,
        exp.n,
        exp.steps,
        exp.seed,
        exp.trials,
    )?;
    let agg = aggregate_with(exp.trials, true, |trial| {
        let mut rng = stream_rng(exp.seed, trial);
        let (state, trajectory) = run_active(&cfg, params, &mut rng)?;
        Ok(TrialOutcome {
            endpoint: *trajectory.last().expect("trajectory holds the start"),
            occupation: state.density_profile(),
            trajectory,
        })
    })?;
    classical_outputs(exp, "activespin", &agg)
}

fn run_compare(exp: &Experiment) -> Result<(Metrics, Vec<String>), CliError> {
    let points = convergence_sweep(
        &exp.coins,
        &exp.initial,
        exp.steps,
        exp.trials,
        exp.seed,
        &exp.sweep_totals,
    )?;
    let sweep = points
        .iter()
        .map(|p| SweepRow {
            n: p.total,
            tv: p.tv,
        })
        .collect();
    Ok((
        Metrics {
            engine: "compare",
            seed: exp.seed,
            tv_to_oracle: None,
            endpoint_tv_to_oracle: None,
            mean: None,
            std_dev: None,
            sweep: Some(sweep),
            config: exp.echo.clone(),
        },
        Vec::new(),
    ))
}
