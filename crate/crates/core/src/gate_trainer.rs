//! Gate training under randomized activation.
//!
//! Each attempt evaluates one input pattern: inputs are dropped, the
//! network runs a random number of steps, then the pattern's input nodes
//! are switched on one by one in random order with random gaps. The macro
//! cycle reached is scored with the pattern's region layout, one swap is
//! tried, and the same schedule is replayed from the same start state.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dynamics::{InputAssignment, LimitCycle, Simulator, StateVector, DEFAULT_CYCLE_STEPS, DEFAULT_REST_STEPS};
use crate::error::{Error, Result};
use crate::evaluator::{all_phases_rest, measure_error_rate, read_output, ErrorReport, EvalMode};
use crate::gate::{max_edge_length, GateSpec, Pattern, Strategy};
use crate::geometry::{axis_coords, Capsule, Disk, Point};
use crate::network::Network;
use crate::regions::{build_layout, fitness, FitnessValue};
use crate::rewiring::{self, propose_swap, RewireJournal, DEFAULT_ATTEMPT_BUDGET};
use crate::rng::{child_rng, SimRng};

/// Step caps shared by training and evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimLimits {
    pub max_steps: usize,
    pub rest_steps: usize,
}

impl Default for SimLimits {
    fn default() -> Self {
        Self { max_steps: DEFAULT_CYCLE_STEPS, rest_steps: DEFAULT_REST_STEPS }
    }
}

/// Order and timing of input activations for one pattern evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivationSchedule {
    /// Gun indices in activation order.
    pub order: Vec<usize>,
    /// `delays[k]` steps are run before activating `order[k]`, with
    /// `order[..k]` switched on. `delays[0]` runs with every input off.
    pub delays: Vec<usize>,
    /// Raw draw for the rest-test phase, taken modulo the cycle period.
    pub rest_draw: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternResult {
    pub pattern: Pattern,
    /// `total` is `-inf` when no cycle was found.
    pub fitness: FitnessValue,
    pub period: Option<usize>,
    pub macro_period_ok: bool,
    pub rest_ok: bool,
    /// Observed value of each output.
    pub outputs: Vec<bool>,
    /// Nodes active at any time during the evaluation.
    pub active_nodes: StateVector,
    /// Normalized distance each gun's shot reached along its axis. `None`
    /// for inactive guns and for terminated shots already within `D` of
    /// the target.
    pub progress: Vec<Option<f64>>,
    /// For common outputs that must be TRUE: normalized distance reached
    /// from the target toward the far end of the output region.
    pub output_progress: Option<f64>,
    pub cycle: Option<LimitCycle>,
    /// State left behind: the rest-test phase with inputs dropped.
    pub end_state: StateVector,
}

impl PatternResult {
    pub fn is_sound(&self) -> bool {
        self.macro_period_ok && self.rest_ok
    }
}

/// Draws a fresh schedule for `pattern`, simulating from `start` to size
/// each delay by the first cycle reached at that stage.
pub fn draw_schedule(
    net: &Network,
    gate: &GateSpec,
    pattern: Pattern,
    start: &StateVector,
    limits: SimLimits,
    rng: &mut SimRng,
) -> ActivationSchedule {
    let mut order = pattern.active_guns(gate.n_guns());
    order.shuffle(rng);
    let mut sim = Simulator::new(net);
    let mut inputs = InputAssignment::none();
    let mut state = start.clone();
    let mut delays = Vec::with_capacity(order.len());
    for &g in &order {
        let bound = match sim.find_cycle(&state, &inputs, limits.max_steps, None) {
            Ok(c) => c.transient_length + c.period(),
            Err(_) => limits.max_steps,
        };
        let u = rng.gen_range(0..=bound);
        state = sim.advance(&state, &inputs, u);
        delays.push(u);
        inputs.activate(gate.guns[g].input_node);
    }
    ActivationSchedule { order, delays, rest_draw: rng.gen_range(0..usize::MAX / 2) }
}

/// Runs `schedule` from `start` and scores the resulting macro cycle.
pub fn evaluate_with_schedule(
    net: &Network,
    gate: &GateSpec,
    pattern: Pattern,
    start: &StateVector,
    schedule: &ActivationSchedule,
    limits: SimLimits,
) -> PatternResult {
    let mut sim = Simulator::new(net);
    let mut inputs = InputAssignment::none();
    let mut state = start.clone();
    let mut active = StateVector::zeros(net.n_nodes());
    for (&g, &u) in schedule.order.iter().zip(&schedule.delays) {
        for _ in 0..u {
            state = sim.step(&state, &inputs);
            active.union_with(&state);
        }
        inputs.activate(gate.guns[g].input_node);
    }
    let n_outputs = gate.outputs.len();
    let cycle = match sim.find_cycle(&state, &inputs, limits.max_steps, Some(&mut active)) {
        Ok(c) => c,
        Err(_) => {
            return PatternResult {
                pattern,
                fitness: FitnessValue { total: f64::NEG_INFINITY, ..Default::default() },
                period: None,
                macro_period_ok: false,
                rest_ok: false,
                outputs: vec![false; n_outputs],
                active_nodes: active,
                progress: vec![None; gate.n_guns()],
                output_progress: None,
                cycle: None,
                end_state: drop_inputs(net, &state),
            }
        }
    };
    let period = cycle.period();
    let layout = build_layout(net, gate, pattern);
    let fit = fitness(net, &cycle, &layout).value;
    let end_state = drop_inputs(net, &cycle.states[schedule.rest_draw % period]);
    let rest_ok = sim.relaxes_to_rest(&end_state, limits.rest_steps);
    let outputs = gate.outputs.iter().map(|o| read_output(net, &cycle, o)).collect();
    let mut cycle_active = StateVector::zeros(net.n_nodes());
    for s in &cycle.states {
        cycle_active.union_with(s);
    }
    let (progress, output_progress) = pattern_progress(net, gate, pattern, &cycle_active);
    PatternResult {
        pattern,
        fitness: fit,
        period: Some(period),
        macro_period_ok: period == gate.macro_period(pattern),
        rest_ok,
        outputs,
        active_nodes: active,
        progress,
        output_progress,
        cycle: Some(cycle),
        end_state,
    }
}

/// Evaluates `pattern` under a fresh schedule.
pub fn evaluate_pattern(
    net: &Network,
    gate: &GateSpec,
    pattern: Pattern,
    start: &StateVector,
    limits: SimLimits,
    rng: &mut SimRng,
) -> (PatternResult, ActivationSchedule) {
    let schedule = draw_schedule(net, gate, pattern, start, limits, rng);
    (evaluate_with_schedule(net, gate, pattern, start, &schedule, limits), schedule)
}

/// Sum of fitness over all non-empty patterns in fixed order, each started
/// from the state the previous one left behind.
pub fn total_fitness(net: &Network, gate: &GateSpec, limits: SimLimits, rng: &mut SimRng) -> (f64, Vec<PatternResult>) {
    let mut state = StateVector::zeros(net.n_nodes());
    let mut results = Vec::new();
    for p in gate.patterns() {
        let (r, _) = evaluate_pattern(net, gate, p, &state, limits, rng);
        state = r.end_state.clone();
        results.push(r);
    }
    (results.iter().map(|r| r.fitness.total).sum(), results)
}

fn drop_inputs(net: &Network, state: &StateVector) -> StateVector {
    let mut s = state.clone();
    for i in net.input_nodes() {
        s.set(i, false);
    }
    s
}

/// Normalized distance covered contiguously from `from` toward `to` by
/// active non-input nodes lying within `radius` of the axis. Gaps wider
/// than `radius` end the run.
pub fn axis_reach(net: &Network, from: Point, to: Point, radius: f64, active: &StateVector) -> f64 {
    let len = from.dist(to).max(1e-12);
    let gap = radius / len;
    let mut s: Vec<f64> = active
        .iter_ones()
        .filter(|&i| !net.is_input(i))
        .map(|i| axis_coords(net.position(i), from, to))
        .filter(|&(s, lateral)| s > 0.0 && lateral <= radius)
        .map(|(s, _)| s)
        .collect();
    s.sort_by(f64::total_cmp);
    let mut reach = 0.0;
    for v in s {
        if v - reach > gap {
            break;
        }
        reach = v;
    }
    reach
}

fn shot_passes(gate: &GateSpec, pattern: Pattern, g: usize) -> bool {
    gate.strategy == Strategy::PerInput && gate.desired(pattern)[g]
}

fn pattern_progress(net: &Network, gate: &GateSpec, pattern: Pattern, cycle_active: &StateVector) -> (Vec<Option<f64>>, Option<f64>) {
    let d = gate.radius();
    let progress = (0..gate.n_guns())
        .map(|g| {
            if !pattern.is_active(g) {
                return None;
            }
            let origin = net.position(gate.guns[g].input_node);
            let target = gate.target();
            let reach = axis_reach(net, origin, target, d, cycle_active);
            let left = (1.0 - reach) * origin.dist(target);
            if !shot_passes(gate, pattern, g) && left <= d {
                None
            } else {
                Some(reach)
            }
        })
        .collect();
    let output_progress = (gate.strategy == Strategy::Common && gate.desired(pattern)[0]).then(|| {
        let end = output_end(net, gate);
        axis_reach(net, gate.target(), end, d, cycle_active)
    });
    (progress, output_progress)
}

/// Far end of the common output region.
fn output_end(net: &Network, gate: &GateSpec) -> Point {
    let o = gate.outputs[0];
    let axis = gate.common_axis(net);
    Point::new(o.center.x + o.readout_radius * axis.x, o.center.y + o.readout_radius * axis.y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    /// Radius-`D` disks at the slowest shots' positions.
    Anchors,
    /// Whole glider paths up to those positions.
    Paths,
}

/// Flips between the two window kinds on every call.
#[derive(Debug, Clone, Default)]
pub struct WindowSelector {
    paths_next: bool,
}

impl WindowSelector {
    pub fn next_kind(&mut self) -> WindowKind {
        let kind = if self.paths_next { WindowKind::Paths } else { WindowKind::Anchors };
        self.paths_next = !self.paths_next;
        kind
    }
}

/// Spatial predicate restricting the new targets of a swap.
#[derive(Debug, Clone, PartialEq)]
pub struct RewiringWindow {
    pub kind: WindowKind,
    pub disks: Vec<Disk>,
    pub paths: Vec<Capsule>,
}

impl RewiringWindow {
    pub fn contains(&self, p: Point) -> bool {
        self.disks.iter().any(|d| d.contains(p)) || self.paths.iter().any(|c| c.contains(p))
    }
}

/// Segments from each glider's start to the point reached by its slowest
/// shot across `results`. Once every shot is done, common gates switch to
/// the corridor from the target toward the output; otherwise the target
/// itself is the anchor.
pub fn window_segments(net: &Network, gate: &GateSpec, results: &[&PatternResult]) -> Vec<(Point, Point)> {
    let target = gate.target();
    let mut segments = Vec::new();
    for (g, gun) in gate.guns.iter().enumerate() {
        let slowest = results.iter().filter_map(|r| r.progress[g]).min_by(f64::total_cmp);
        if let Some(s) = slowest {
            let origin = net.position(gun.input_node);
            segments.push((origin, origin.lerp(target, s)));
        }
    }
    if !segments.is_empty() {
        return segments;
    }
    let paths = gate.guns.iter().map(|g| (net.position(g.input_node), target));
    if gate.strategy == Strategy::Common {
        if let Some(r) = results.iter().filter_map(|r| r.output_progress).min_by(f64::total_cmp) {
            let end = output_end(net, gate);
            let mut out: Vec<_> = paths.collect();
            out.push((target, target.lerp(end, r)));
            return out;
        }
    }
    paths.collect()
}

/// Window for the next swap, alternating between anchor disks and paths.
pub fn rewiring_window(net: &Network, gate: &GateSpec, results: &[&PatternResult], selector: &mut WindowSelector) -> RewiringWindow {
    let d = gate.radius();
    let segments = window_segments(net, gate, results);
    let kind = selector.next_kind();
    match kind {
        WindowKind::Anchors => RewiringWindow { kind, disks: segments.iter().map(|&(_, b)| Disk::new(b, d)).collect(), paths: vec![] },
        WindowKind::Paths => RewiringWindow { kind, disks: vec![], paths: segments.iter().map(|&(a, b)| Capsule::new(a, b, d)).collect() },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateTrainConfig {
    /// Rewiring attempts.
    pub budget: usize,
    pub limits: SimLimits,
    /// A pattern is skipped when its fitness falls below the previous
    /// pattern's by more than this fraction of the latter's magnitude.
    pub skip_fraction: f64,
    /// Consecutive skips that trigger a rollback.
    pub skip_limit: usize,
    /// Failed swaps on one pattern before moving on to the next.
    pub max_reuse: usize,
    /// Attempts between error-rate measurements; 0 disables them.
    pub eval_every: usize,
    pub eval_trials: usize,
    /// Seed of the evaluation streams, kept apart from training draws.
    pub eval_seed: u64,
    /// Stop as soon as a measurement reports zero error.
    pub stop_at_zero: bool,
    pub swap_draws: usize,
}

impl Default for GateTrainConfig {
    fn default() -> Self {
        Self {
            budget: 10_000,
            limits: SimLimits::default(),
            skip_fraction: 0.25,
            skip_limit: 100,
            max_reuse: 100,
            eval_every: 1000,
            eval_trials: 100,
            eval_seed: 0,
            stop_at_zero: true,
            swap_draws: DEFAULT_ATTEMPT_BUDGET,
        }
    }
}

impl GateTrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.budget < 1 {
            return Err(Error::InvalidParams("training budget must be >= 1".into()));
        }
        if self.skip_fraction.is_nan() || self.skip_fraction < 0.0 || self.skip_limit < 1 {
            return Err(Error::InvalidParams("skip rule needs fraction >= 0 and limit >= 1".into()));
        }
        if self.max_reuse < 1 {
            return Err(Error::InvalidParams("pattern reuse limit must be >= 1".into()));
        }
        if self.eval_every > 0 && self.eval_trials < 1 {
            return Err(Error::InvalidParams("eval trials must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateTraceRow {
    pub attempt: usize,
    pub pattern: Pattern,
    /// Cached fitness of the pattern before the swap.
    pub fitness: f64,
    /// Fitness after the swap, if one was applied.
    pub candidate: Option<f64>,
    pub accepted: bool,
    /// Patterns skipped since the previous attempt.
    pub skips: usize,
    /// Journal entries undone by rollbacks since the previous attempt.
    pub undos: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorPoint {
    pub attempt: usize,
    pub error_rate: f64,
}

#[derive(Debug, Clone)]
pub struct GateTraining {
    pub trace: Vec<GateTraceRow>,
    pub errors: Vec<ErrorPoint>,
    /// Lowest measured error and the attempt where it was measured.
    pub best: Option<ErrorPoint>,
    /// Report of the measurement behind `best`.
    pub best_report: Option<ErrorReport>,
    pub accepted: usize,
}

impl GateTraining {
    pub fn trace_csv(&self, n_guns: usize) -> String {
        let mut out = String::from("attempt,pattern,fitness,candidate,accepted,skips,undos\n");
        for r in &self.trace {
            let cand = r.candidate.map(|c| c.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.attempt,
                r.pattern.to_bits(n_guns),
                r.fitness,
                cand,
                u8::from(r.accepted),
                r.skips,
                r.undos
            );
        }
        out
    }

    pub fn errors_csv(&self) -> String {
        let mut out = String::from("attempt,E\n");
        for e in &self.errors {
            let _ = writeln!(out, "{},{}", e.attempt, e.error_rate);
        }
        out
    }
}

struct Cached {
    pattern: Pattern,
    failures: usize,
    start: StateVector,
    schedule: ActivationSchedule,
    result: PatternResult,
}

/// Trains `gate` by stochastic rewiring. The network ends in the state
/// with the lowest measured error rate when measurements are enabled, or
/// the final state otherwise. Journal entries present on entry are never
/// undone.
pub fn train_gate(
    net: &mut Network,
    journal: &mut RewireJournal,
    gate: &GateSpec,
    cfg: &GateTrainConfig,
    rng: &mut SimRng,
) -> Result<GateTraining> {
    cfg.validate()?;
    gate.validate_against(net)?;
    let baseline = journal.len();
    let max_len = max_edge_length(gate.radius());
    let patterns = gate.patterns();
    let limits = cfg.limits;
    let mut next_pattern = 0usize;
    let mut state = StateVector::zeros(net.n_nodes());
    let mut cached: Option<Cached> = None;
    let mut latest: BTreeMap<Pattern, PatternResult> = BTreeMap::new();
    let mut selector = WindowSelector::default();
    let mut prev_fitness: Option<f64> = None;
    let mut consecutive_skips = 0usize;
    let mut skips_since = 0usize;
    let mut undos_since = 0usize;
    let mut training = GateTraining { trace: Vec::new(), errors: Vec::new(), best: None, best_report: None, accepted: 0 };
    let mut best_snapshot: Option<(Network, RewireJournal)> = None;

    let mut attempt = 0usize;
    while attempt < cfg.budget {
        if cached.is_none() {
            let pattern = patterns[next_pattern % patterns.len()];
            next_pattern += 1;
            let start = state.clone();
            let schedule = draw_schedule(net, gate, pattern, &start, limits, rng);
            let mut result = evaluate_with_schedule(net, gate, pattern, &start, &schedule, limits);
            if !result.is_sound() {
                undos_since += roll_back(net, journal, baseline, |n| {
                    result = evaluate_with_schedule(n, gate, pattern, &start, &schedule, limits);
                    result.is_sound()
                })?;
            }
            let threshold = |prev: f64| prev - cfg.skip_fraction * prev.abs();
            if let Some(prev) = prev_fitness {
                if result.fitness.total < threshold(prev) {
                    consecutive_skips += 1;
                    skips_since += 1;
                    if consecutive_skips < cfg.skip_limit {
                        state = result.end_state.clone();
                        latest.insert(pattern, result);
                        continue;
                    }
                    undos_since += roll_back(net, journal, baseline, |n| {
                        result = evaluate_with_schedule(n, gate, pattern, &start, &schedule, limits);
                        result.is_sound() && result.fitness.total >= threshold(prev)
                    })?;
                }
            }
            consecutive_skips = 0;
            prev_fitness = Some(result.fitness.total);
            latest.insert(pattern, result.clone());
            cached = Some(Cached { pattern, failures: 0, start, schedule, result });
        }
        let current = cached.as_mut().expect("pattern evaluated");
        attempt += 1;

        let results: Vec<&PatternResult> = latest.values().collect();
        let window = rewiring_window(net, gate, &results, &mut selector);
        let active = &current.result.active_nodes;
        let swap = propose_swap(net, &|i| active.get(i), &|p| window.contains(p), max_len, cfg.swap_draws, rng);
        let mut row = GateTraceRow {
            attempt,
            pattern: current.pattern,
            fitness: current.result.fitness.total,
            candidate: None,
            accepted: false,
            skips: std::mem::take(&mut skips_since),
            undos: std::mem::take(&mut undos_since),
        };
        if let Some(swap) = swap {
            rewiring::apply(net, journal, swap)?;
            let after = evaluate_with_schedule(net, gate, current.pattern, &current.start, &current.schedule, limits);
            row.candidate = Some(after.fitness.total);
            let sound = after.is_sound() && after.cycle.as_ref().is_some_and(|c| all_phases_rest(net, c, limits.rest_steps));
            if sound && after.fitness.total > current.result.fitness.total {
                assert_eq!(after.period, Some(gate.macro_period(current.pattern)), "accepted state must keep the macro period");
                row.accepted = true;
                training.accepted += 1;
                state = after.end_state.clone();
                prev_fitness = Some(after.fitness.total);
                latest.insert(current.pattern, after);
                cached = None;
            } else {
                rewiring::undo_last(net, journal, 1)?;
                current.failures += 1;
            }
        } else {
            current.failures += 1;
        }
        if cached.as_ref().is_some_and(|c| c.failures >= cfg.max_reuse) {
            let c = cached.take().expect("checked");
            state = c.result.end_state;
        }
        training.trace.push(row);

        if cfg.eval_every > 0 && attempt.is_multiple_of(cfg.eval_every) {
            let mut eval_rng = child_rng(cfg.eval_seed, &format!("eval-{attempt}"));
            let report = measure_error_rate(net, gate, cfg.eval_trials, EvalMode::Training, limits, &mut eval_rng)?;
            let point = ErrorPoint { attempt, error_rate: report.error_rate };
            training.errors.push(point.clone());
            if training.best.as_ref().is_none_or(|b| point.error_rate < b.error_rate) {
                training.best = Some(point);
                training.best_report = Some(report);
                best_snapshot = Some((net.clone(), journal.clone()));
            }
            if cfg.stop_at_zero && training.best.as_ref().is_some_and(|b| b.error_rate == 0.0) {
                break;
            }
        }
    }
    if let Some((n, j)) = best_snapshot {
        *net = n;
        *journal = j;
    }
    Ok(training)
}

/// Undoes journal entries one at a time until `passes` holds or the
/// journal is back at `baseline`. Returns the number of entries undone.
fn roll_back(net: &mut Network, journal: &mut RewireJournal, baseline: usize, mut passes: impl FnMut(&Network) -> bool) -> Result<usize> {
    let mut undone = 0;
    while journal.len() > baseline {
        rewiring::undo_last(net, journal, 1)?;
        undone += 1;
        if passes(net) {
            break;
        }
    }
    Ok(undone)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::GunSpec;
    use crate::network::{ConnectionLaw, NetworkParams};
    use crate::rng::seeded_rng;

    /// Two inputs each driving a row of three nodes toward a shared target at (0.5, 0.5).
    fn chain_net() -> (Network, GateSpec) {
        let mut pos = vec![Point::new(0.2, 0.5), Point::new(0.8, 0.5)];
        for k in 1..=3 {
            pos.push(Point::new(0.2 + 0.05 * k as f64, 0.5));
        }
        for k in 1..=3 {
            pos.push(Point::new(0.8 - 0.05 * k as f64, 0.5));
        }
        pos.push(Point::new(0.9, 0.9));
        let n = pos.len();
        let edges = [(0, 2), (0, 3), (0, 4), (1, 5), (1, 6), (1, 7)];
        let params = NetworkParams { n_nodes: n, target_mean_degree_k: 0.5, ..Default::default() };
        let mut net = Network::from_parts(params, ConnectionLaw::new(1.0, 0.0).unwrap(), pos, vec![1; n], &edges, &[]).unwrap();
        net.designate_input_node(0).unwrap();
        net.designate_input_node(1).unwrap();
        let t = Point::new(0.5, 0.5);
        let gate = GateSpec::two_input(
            &net,
            [GunSpec::new(0, t, 2), GunSpec::new(1, t, 3)],
            Strategy::PerInput,
            [&[false, false], &[false, false], &[true, true]],
        )
        .unwrap();
        (net, gate)
    }

    #[test]
    fn axis_reach_stops_at_gaps() {
        let (net, _) = chain_net();
        let from = Point::new(0.2, 0.5);
        let to = Point::new(0.5, 0.5);
        let all = StateVector::from_active(net.n_nodes(), &[2, 3, 4]);
        assert!((axis_reach(&net, from, to, 0.07, &all) - 0.5).abs() < 1e-12);
        let gap = StateVector::from_active(net.n_nodes(), &[2, 4]);
        assert!((axis_reach(&net, from, to, 0.07, &gap) - 1.0 / 6.0).abs() < 1e-12);
        let none = StateVector::zeros(net.n_nodes());
        assert_eq!(axis_reach(&net, from, to, 0.07, &none), 0.0);
    }

    #[test]
    fn alternation() {
        let mut s = WindowSelector::default();
        assert_eq!(s.next_kind(), WindowKind::Anchors);
        assert_eq!(s.next_kind(), WindowKind::Paths);
        assert_eq!(s.next_kind(), WindowKind::Anchors);
    }

    #[test]
    fn chain_pattern_evaluation() {
        let (net, gate) = chain_net();
        let start = StateVector::zeros(net.n_nodes());
        let (r, schedule) = evaluate_pattern(&net, &gate, Pattern(0b01), &start, SimLimits::default(), &mut seeded_rng(4));
        assert_eq!(schedule.order, vec![0]);
        // the row lights up and stays on: fixed point, period 1 != 2
        assert_eq!(r.period, Some(1));
        assert!(!r.macro_period_ok);
        assert!(r.rest_ok);
        assert!((r.progress[0].unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(r.progress[1], None);
        let replay = evaluate_with_schedule(&net, &gate, Pattern(0b01), &start, &schedule, SimLimits::default());
        assert_eq!(replay, r);
    }

    #[test]
    fn window_anchors_at_slowest_shot() {
        let (net, gate) = chain_net();
        let start = StateVector::zeros(net.n_nodes());
        let limits = SimLimits::default();
        let mut rng = seeded_rng(5);
        let (mut a, _) = evaluate_pattern(&net, &gate, Pattern(0b11), &start, limits, &mut rng);
        let mut b = a.clone();
        a.progress = vec![Some(1.2), Some(0.5)];
        b.progress = vec![Some(0.9), Some(0.8)];
        let segs = window_segments(&net, &gate, &[&a, &b]);
        assert!(segs[0].1.dist(Point::new(0.47, 0.5)) < 1e-12);
        assert!(segs[1].1.dist(Point::new(0.65, 0.5)) < 1e-12);
        let mut sel = WindowSelector::default();
        let w = rewiring_window(&net, &gate, &[&a, &b], &mut sel);
        assert!(w.contains(Point::new(0.65, 0.52)) && !w.contains(Point::new(0.56, 0.5)));
        let w = rewiring_window(&net, &gate, &[&a, &b], &mut sel);
        assert_eq!(w.kind, WindowKind::Paths);
        assert!(w.contains(Point::new(0.75, 0.5)) && !w.contains(Point::new(0.56, 0.5)));
    }

    #[test]
    fn nothing_moved_anchors_at_inputs() {
        let (net, gate) = chain_net();
        let mut r =
            evaluate_pattern(&net, &gate, Pattern(0b11), &StateVector::zeros(net.n_nodes()), SimLimits::default(), &mut seeded_rng(6)).0;
        r.progress = vec![Some(0.0), Some(0.0)];
        let segs = window_segments(&net, &gate, &[&r]);
        assert_eq!(segs, vec![(Point::new(0.2, 0.5), Point::new(0.2, 0.5)), (Point::new(0.8, 0.5), Point::new(0.8, 0.5))]);
    }

    #[test]
    fn rollback_never_passes_baseline() {
        let (mut net, _) = chain_net();
        let mut j = RewireJournal::new();
        let swap = propose_swap(&net, &|_| true, &|_| true, 1.0, 100, &mut seeded_rng(7)).unwrap();
        rewiring::apply(&mut net, &mut j, swap).unwrap();
        let n = roll_back(&mut net, &mut j, 1, |_| false).unwrap();
        assert_eq!((n, j.len()), (0, 1));
        let n = roll_back(&mut net, &mut j, 0, |_| false).unwrap();
        assert_eq!((n, j.len()), (1, 0));
    }
}
