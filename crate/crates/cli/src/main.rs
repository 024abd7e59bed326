use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use lcgate::dynamics::{format_trajectory, parse_trajectory, InputAssignment, Simulator, StateVector, DEFAULT_CYCLE_STEPS};
use lcgate::evaluator::{measure_error_rate, EvalMode};
use lcgate::gate::{GateSpec, GunSpec, Pattern, DEFAULT_RADIUS, DEFAULT_TRAVEL_STEPS};
use lcgate::gate_trainer::{train_gate, GateTrainConfig, SimLimits};
use lcgate::geometry::Point;
use lcgate::gun_trainer::{shape_glider, trace_csv, tune_period, GunTraceRow, GunTrainConfig};
use lcgate::network::{calibrate_connection_law_with, generate_network, measure_graph_stats, CalibrationOptions, Network, NetworkParams};
use lcgate::regions::{build_layout, fitness, RegionLayout};
use lcgate::render::{parse_layout_dump, render_frames, write_frames, RenderOptions};
use lcgate::rewiring::RewireJournal;
use lcgate::rng::child_rng;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "lcgate", version, about = "Glider guns and Boolean gates in spatial threshold networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Calibrate the connection law and draw a network.
    Generate(GenerateArgs),
    /// Designate an input node, tune its period, and shape its gliders.
    TrainGun(TrainGunArgs),
    /// Train a gate by rewiring under randomized activation.
    TrainGate(TrainGateArgs),
    /// Measure a gate's error rate.
    Eval(EvalArgs),
    /// Render a trajectory to PPM frames.
    Render(RenderArgs),
    /// Record the limit cycle of a gun or gate pattern, with its region layout.
    Trajectory(TrajectoryArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    h: i32,
    #[arg(long, default_value_t = 10.0)]
    k: f64,
    #[arg(long, default_value_t = 0.4)]
    c: f64,
    #[arg(long, default_value_t = 0.5)]
    excitatory: f64,
    /// Monte-Carlo pair samples used to fit the amplitude.
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Statistics sidecar; defaults to `<out>.stats.json`.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args)]
struct GunArgs {
    /// Input node id.
    #[arg(long, conflicts_with = "near")]
    input_node: Option<usize>,
    /// Use the excitatory non-input node nearest to X,Y.
    #[arg(long, value_parser = parse_point)]
    near: Option<Point>,
    #[arg(long, value_parser = parse_point)]
    target: Point,
    #[arg(long)]
    period: usize,
    #[arg(long, default_value_t = DEFAULT_TRAVEL_STEPS)]
    t_steps: usize,
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    radius_d: f64,
}

#[derive(Args)]
struct TrainGunArgs {
    #[arg(long)]
    net: PathBuf,
    #[command(flatten)]
    gun: GunArgs,
    /// Glider-shaping attempts.
    #[arg(long, default_value_t = 2000)]
    budget: usize,
    /// Period-tuning attempts.
    #[arg(long, default_value_t = 50_000)]
    period_budget: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    journal: Option<PathBuf>,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct TrainGateArgs {
    #[arg(long)]
    net: PathBuf,
    #[arg(long)]
    gate: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    budget: usize,
    #[arg(long)]
    seed: u64,
    /// Attempts between error-rate measurements (0 disables them).
    #[arg(long, default_value_t = 1000)]
    eval_every: usize,
    /// Trials per pattern in each measurement.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Keep training after a measurement reports zero error.
    #[arg(long)]
    no_early_stop: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    journal: Option<PathBuf>,
    #[arg(long)]
    trace: Option<PathBuf>,
    /// CSV of periodic error measurements.
    #[arg(long)]
    errors: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    net: PathBuf,
    #[arg(long)]
    gate: PathBuf,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Also test relaxation from every cycle phase.
    #[arg(long)]
    certify: bool,
    #[arg(long)]
    seed: u64,
    /// JSON report.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    net: PathBuf,
    #[arg(long)]
    trajectory: PathBuf,
    #[arg(long)]
    layout: Option<PathBuf>,
    #[arg(long, default_value_t = 400)]
    size: usize,
    /// Accepted for uniformity; rendering draws no random numbers.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrajectoryArgs {
    #[arg(long)]
    net: PathBuf,
    /// Gate file; use with --pattern.
    #[arg(long, requires = "pattern", conflicts_with = "input_node")]
    gate: Option<PathBuf>,
    /// Active guns as a bitstring, e.g. 11.
    #[arg(long)]
    pattern: Option<String>,
    /// Single gun: input node id (with --target and --period).
    #[arg(long, requires_all = ["target", "period"])]
    input_node: Option<usize>,
    #[arg(long, value_parser = parse_point)]
    target: Option<Point>,
    #[arg(long)]
    period: Option<usize>,
    /// States to record; defaults to one cycle.
    #[arg(long)]
    steps: Option<usize>,
    /// Accepted for uniformity; inputs switch on together from rest.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Region layout dump aligned with the trajectory.
    #[arg(long)]
    layout: Option<PathBuf>,
}

fn parse_point(s: &str) -> std::result::Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected X,Y, got {s:?}"))?;
    let x: f64 = x.trim().parse().map_err(|_| format!("bad x in {s:?}"))?;
    let y: f64 = y.trim().parse().map_err(|_| format!("bad y in {s:?}"))?;
    Ok(Point::new(x, y))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn load_net(path: &Path) -> Result<Network> {
    Network::from_json_text(&read(path)?).with_context(|| format!("loading network {}", path.display()))
}

fn meta(command: &str, seed: u64) -> Vec<(&'static str, String)> {
    vec![("tool", format!("lcgate {VERSION}")), ("command", command.to_string()), ("seed", seed.to_string())]
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(a) => generate(a),
        Command::TrainGun(a) => train_gun(a),
        Command::TrainGate(a) => train_gate_cmd(a),
        Command::Eval(a) => eval(a),
        Command::Render(a) => render(a),
        Command::Trajectory(a) => trajectory(a),
    }
}

fn generate(a: GenerateArgs) -> Result<()> {
    let params = NetworkParams {
        n_nodes: a.n,
        threshold_h: a.h,
        target_mean_degree_k: a.k,
        target_clustering_c: a.c,
        excitatory_fraction: a.excitatory,
        rng_seed: a.seed,
    };
    let cal = calibrate_connection_law_with(&params, a.samples, &CalibrationOptions::default(), &mut child_rng(a.seed, "calibration"))
        .context("calibrating connection law")?;
    let net = generate_network(&params, &cal.law, &mut child_rng(a.seed, "generation"))?;
    let stats = measure_graph_stats(&net);
    write(&a.out, net.to_json_text_with_meta(&meta("generate", a.seed)))?;
    let stats_path = a.stats.unwrap_or_else(|| PathBuf::from(format!("{}.stats.json", a.out.display())));
    let sidecar = json!({
        "tool": format!("lcgate {VERSION}"),
        "seed": a.seed,
        "law": {"K": cal.law.amplitude_k, "lambda": cal.law.decay_lambda},
        "target": {"mean_degree": a.k, "clustering": a.c},
        "measured": {"mean_degree": stats.mean_degree, "clustering": stats.clustering},
        "edges": net.edge_count(),
    });
    write(&stats_path, serde_json::to_string_pretty(&sidecar)? + "\n")?;
    println!(
        "generate ok seed={} n={} mean_degree={:.4} clustering={:.4} K={:.6} lambda={:.6} out={}",
        a.seed,
        a.n,
        stats.mean_degree,
        stats.clustering,
        cal.law.amplitude_k,
        cal.law.decay_lambda,
        a.out.display()
    );
    Ok(())
}

fn resolve_input(net: &mut Network, gun: &GunArgs) -> Result<usize> {
    let node = match (gun.input_node, gun.near) {
        (Some(i), _) => i,
        (None, Some(p)) => (0..net.n_nodes())
            .filter(|&i| net.sign(i) > 0 && !net.is_input(i))
            .min_by(|&a, &b| net.position(a).dist(p).total_cmp(&net.position(b).dist(p)))
            .context("network has no free excitatory node")?,
        (None, None) => bail!("give --input-node or --near"),
    };
    if node >= net.n_nodes() {
        bail!("input node {node} not in network of {} nodes", net.n_nodes());
    }
    if !net.is_input(node) {
        net.designate_input_node(node)?;
    }
    Ok(node)
}

fn train_gun(a: TrainGunArgs) -> Result<()> {
    let mut net = load_net(&a.net)?;
    let node = resolve_input(&mut net, &a.gun)?;
    let gun = GunSpec { input_node: node, target: a.gun.target, period: a.gun.period, travel_steps: a.gun.t_steps, radius: a.gun.radius_d };
    gun.validate()?;
    let cfg = GunTrainConfig {
        period_budget: a.period_budget,
        shape_budget: a.budget,
        local_radius: a.gun.radius_d,
        ..GunTrainConfig::new(a.gun.period)
    };
    let mut journal = RewireJournal::new();
    let tuning = tune_period(&mut net, &mut journal, &gun, &cfg, &mut child_rng(a.seed, "gun-tune"))?;
    let mut rows: Vec<GunTraceRow> = tuning.trace.clone();
    let shaping = if tuning.success {
        let s = shape_glider(&mut net, &mut journal, &gun, &cfg, &mut child_rng(a.seed, "gun-shape"))?;
        let offset = rows.len();
        rows.extend(s.trace.iter().map(|r| GunTraceRow { attempt: r.attempt + offset, ..*r }));
        Some(s)
    } else {
        None
    };
    write(&a.out, net.to_json_text_with_meta(&meta("train-gun", a.seed)))?;
    if let Some(j) = &a.journal {
        write(j, journal.to_text())?;
    }
    if let Some(t) = &a.trace {
        write(t, trace_csv(&rows))?;
    }
    println!(
        "train-gun {} seed={} input_node={} period={} tuned={} tune_attempts={} shaped={} accepted={} fitness={} journal_len={} out={}",
        if tuning.success { "ok" } else { "failed" },
        a.seed,
        node,
        tuning.period.map_or("none".to_string(), |p| p.to_string()),
        tuning.success,
        tuning.attempts,
        shaping.as_ref().is_some_and(|s| s.success),
        shaping.as_ref().map_or(0, |s| s.accepted),
        shaping.as_ref().map_or(f64::NAN, |s| s.final_fitness),
        journal.len(),
        a.out.display()
    );
    Ok(())
}

fn load_gate(path: &Path, net: &Network) -> Result<GateSpec> {
    GateSpec::from_json(&read(path)?, net).with_context(|| format!("loading gate {}", path.display()))
}

fn train_gate_cmd(a: TrainGateArgs) -> Result<()> {
    let mut net = load_net(&a.net)?;
    let gate = load_gate(&a.gate, &net)?;
    let cfg = GateTrainConfig {
        budget: a.budget,
        eval_every: a.eval_every,
        eval_trials: a.trials,
        eval_seed: a.seed,
        stop_at_zero: !a.no_early_stop,
        ..Default::default()
    };
    let mut journal = RewireJournal::new();
    let training = train_gate(&mut net, &mut journal, &gate, &cfg, &mut child_rng(a.seed, "gate-train"))?;
    write(&a.out, net.to_json_text_with_meta(&meta("train-gate", a.seed)))?;
    if let Some(j) = &a.journal {
        write(j, journal.to_text())?;
    }
    if let Some(t) = &a.trace {
        write(t, training.trace_csv(gate.n_guns()))?;
    }
    if let Some(e) = &a.errors {
        write(e, training.errors_csv())?;
    }
    println!(
        "train-gate ok seed={} attempts={} accepted={} best_E={} best_attempt={} journal_len={} out={}",
        a.seed,
        training.trace.len(),
        training.accepted,
        training.best.as_ref().map_or("none".to_string(), |b| b.error_rate.to_string()),
        training.best.as_ref().map_or("none".to_string(), |b| b.attempt.to_string()),
        journal.len(),
        a.out.display()
    );
    Ok(())
}

fn eval(a: EvalArgs) -> Result<()> {
    let net = load_net(&a.net)?;
    let gate = load_gate(&a.gate, &net)?;
    let mode = if a.certify { EvalMode::Certification } else { EvalMode::Training };
    let mut report = measure_error_rate(&net, &gate, a.trials, mode, SimLimits::default(), &mut child_rng(a.seed, "eval"))?;
    report.seed = Some(a.seed);
    write(&a.out, report.to_json())?;
    if let Some(c) = &a.csv {
        write(c, report.to_csv())?;
    }
    println!(
        "eval ok seed={} mode={} trials={} errors={} E={} out={}",
        a.seed,
        if a.certify { "certification" } else { "training" },
        report.total_trials,
        report.total_errors,
        report.error_rate,
        a.out.display()
    );
    Ok(())
}

fn render(a: RenderArgs) -> Result<()> {
    let net = load_net(&a.net)?;
    let traj = parse_trajectory(&read(&a.trajectory)?, net.n_nodes())?;
    let layout = match &a.layout {
        Some(p) => parse_layout_dump(&read(p)?)?,
        None => Vec::new(),
    };
    let frames = render_frames(&net, &traj, &layout, RenderOptions { size: a.size })?;
    let paths = write_frames(&a.out, &frames)?;
    println!("render ok seed={} frames={} size={} out={}", a.seed, paths.len(), a.size, a.out.display());
    Ok(())
}

fn trajectory(a: TrajectoryArgs) -> Result<()> {
    let net = load_net(&a.net)?;
    let (inputs, mut layout) = match (&a.gate, a.input_node) {
        (Some(g), _) => {
            let gate = load_gate(g, &net)?;
            let bits = a.pattern.as_deref().context("--pattern is required with --gate")?;
            if bits.len() != gate.n_guns() {
                bail!("pattern {bits:?} should have {} characters", gate.n_guns());
            }
            let pattern = Pattern::from_bits(bits)?;
            if pattern.0 == 0 {
                bail!("pattern must activate at least one gun");
            }
            let inputs: Vec<usize> = pattern.active_guns(gate.n_guns()).iter().map(|&g| gate.guns[g].input_node).collect();
            (inputs, build_layout(&net, &gate, pattern))
        }
        (None, Some(node)) => {
            if node >= net.n_nodes() || !net.is_input(node) {
                bail!("node {node} is not an input node of the network");
            }
            let gun = GunSpec::new(node, a.target.context("--target required")?, a.period.context("--period required")?);
            gun.validate()?;
            (vec![node], RegionLayout::single_gun(&net, &gun))
        }
        (None, None) => bail!("give --gate with --pattern, or --input-node with --target and --period"),
    };
    let assignment = InputAssignment::with_on(inputs);
    let mut sim = Simulator::new(&net);
    let cycle = sim
        .find_cycle(&StateVector::zeros(net.n_nodes()), &assignment, DEFAULT_CYCLE_STEPS * 10, None)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let report = fitness(&net, &cycle, &layout);
    layout.set_phases(&report.phases);
    let steps = a.steps.unwrap_or(cycle.period());
    let states: Vec<StateVector> = (0..steps).map(|t| cycle.states[t % cycle.period()].clone()).collect();
    write(&a.out, format_trajectory(&states))?;
    if let Some(l) = &a.layout {
        write(l, layout.dump(steps))?;
    }
    println!(
        "trajectory ok seed={} period={} transient={} steps={} fitness={} out={}",
        a.seed,
        cycle.period(),
        cycle.transient_length,
        steps,
        report.value.total,
        a.out.display()
    );
    Ok(())
}
