//! Building a single glider gun: first tune the period of the attractor
//! around the input node, then shape it into gliders by fitness
//! hill-climbing.

use std::fmt::Write as _;

use rand::Rng;

use crate::dynamics::{InputAssignment, LimitCycle, Simulator, StateVector, DEFAULT_CYCLE_STEPS, DEFAULT_REST_STEPS};
use crate::error::{Error, Result};
use crate::evaluator::all_phases_rest;
use crate::gate::{is_prime, max_edge_length, GunSpec};
use crate::gate_trainer::{axis_reach, WindowKind, WindowSelector};
use crate::geometry::{Capsule, Disk, Point};
use crate::network::Network;
use crate::regions::{fitness, RegionLayout};
use crate::rewiring::{self, propose_swap, RewireJournal, DEFAULT_ATTEMPT_BUDGET};
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GunTrainConfig {
    pub desired_period: usize,
    pub period_budget: usize,
    pub shape_budget: usize,
    /// Radius around the input node where period tuning may rewire.
    pub local_radius: f64,
    pub max_steps: usize,
    pub rest_steps: usize,
    pub swap_draws: usize,
}

impl GunTrainConfig {
    pub fn new(desired_period: usize) -> Self {
        Self {
            desired_period,
            period_budget: 50_000,
            shape_budget: 2_000,
            local_radius: crate::gate::DEFAULT_RADIUS,
            max_steps: DEFAULT_CYCLE_STEPS,
            rest_steps: DEFAULT_REST_STEPS,
            swap_draws: DEFAULT_ATTEMPT_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.desired_period < 2 || !is_prime(self.desired_period) {
            return Err(Error::InvalidParams(format!("desired period {} must be a prime", self.desired_period)));
        }
        if self.period_budget < 1 || self.shape_budget < 1 {
            return Err(Error::InvalidParams("budgets must be >= 1".into()));
        }
        if self.local_radius.is_nan() || self.local_radius <= 0.0 {
            return Err(Error::InvalidParams("local radius must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GunTraceRow {
    pub attempt: usize,
    pub accepted: bool,
    /// Fitness of the network kept after this attempt; NaN while tuning
    /// the period.
    pub fitness: f64,
    /// Period of the network kept after this attempt.
    pub period: Option<usize>,
}

pub fn trace_csv(rows: &[GunTraceRow]) -> String {
    let mut out = String::from("attempt,accepted,fitness,period\n");
    for r in rows {
        let period = r.period.map(|p| p.to_string()).unwrap_or_default();
        let fitness = if r.fitness.is_nan() { String::new() } else { r.fitness.to_string() };
        let _ = writeln!(out, "{},{},{},{}", r.attempt, u8::from(r.accepted), fitness, period);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodTuning {
    pub success: bool,
    pub attempts: usize,
    pub period: Option<usize>,
    pub trace: Vec<GunTraceRow>,
}

/// Period of the cycle reached from rest with only `input` on.
pub fn gun_period(net: &Network, input: usize, max_steps: usize) -> Option<usize> {
    let inputs = InputAssignment::with_on([input]);
    let start = StateVector::zeros(net.n_nodes());
    Simulator::new(net).find_cycle(&start, &inputs, max_steps, None).ok().map(|c| c.period())
}

fn period_distance(p: Option<usize>, desired: usize) -> usize {
    p.map_or(usize::MAX, |p| p.abs_diff(desired))
}

/// Rewires around the input node until the gun's period equals the
/// desired one. Swaps that move the period further away are undone, so the
/// network always holds the best period found.
pub fn tune_period(
    net: &mut Network,
    journal: &mut RewireJournal,
    gun: &GunSpec,
    cfg: &GunTrainConfig,
    rng: &mut SimRng,
) -> Result<PeriodTuning> {
    cfg.validate()?;
    check_input(net, gun)?;
    let center = net.position(gun.input_node);
    let window = Disk::new(center, cfg.local_radius);
    let max_len = max_edge_length(gun.radius);
    let mut period = gun_period(net, gun.input_node, cfg.max_steps);
    let mut distance = period_distance(period, cfg.desired_period);
    let mut trace = Vec::new();
    let mut attempts = 0;
    while distance != 0 && attempts < cfg.period_budget {
        attempts += 1;
        let mut accepted = false;
        if let Some(swap) = propose_swap(net, &|_| true, &|p| window.contains(p), max_len, cfg.swap_draws, rng) {
            rewiring::apply(net, journal, swap)?;
            let p = gun_period(net, gun.input_node, cfg.max_steps);
            let d = period_distance(p, cfg.desired_period);
            if d <= distance {
                accepted = true;
                period = p;
                distance = d;
            } else {
                rewiring::undo_last(net, journal, 1)?;
            }
        }
        trace.push(GunTraceRow { attempt: attempts, accepted, fitness: f64::NAN, period });
    }
    Ok(PeriodTuning { success: distance == 0, attempts, period, trace })
}

fn check_input(net: &Network, gun: &GunSpec) -> Result<()> {
    if gun.input_node >= net.n_nodes() {
        return Err(Error::UnknownNode(gun.input_node));
    }
    if !net.is_input(gun.input_node) {
        return Err(Error::Mismatch(format!("node {} is not an input node", gun.input_node)));
    }
    gun.validate()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GliderShaping {
    /// Shots reach within `D` of the target in the final state.
    pub success: bool,
    pub accepted: usize,
    pub final_fitness: f64,
    pub trace: Vec<GunTraceRow>,
}

struct Measurement {
    cycle: Option<LimitCycle>,
    fitness: f64,
    active: StateVector,
}

fn measure(sim: &mut Simulator<'_>, start: &StateVector, input: &InputAssignment, layout: &RegionLayout, max_steps: usize) -> Measurement {
    let net = sim.network();
    let mut active = StateVector::zeros(net.n_nodes());
    match sim.find_cycle(start, input, max_steps, Some(&mut active)) {
        Ok(c) => {
            let f = fitness(net, &c, layout).value.total;
            Measurement { cycle: Some(c), fitness: f, active }
        }
        Err(_) => Measurement { cycle: None, fitness: f64::NEG_INFINITY, active },
    }
}

/// Normalized distance the gun's shots travel toward the target.
pub fn glider_reach(net: &Network, gun: &GunSpec, cycle: &LimitCycle) -> f64 {
    let mut on = StateVector::zeros(net.n_nodes());
    for s in &cycle.states {
        on.union_with(s);
    }
    axis_reach(net, net.position(gun.input_node), gun.target, gun.radius, &on)
}

fn reached_target(net: &Network, gun: &GunSpec, reach: f64) -> bool {
    (1.0 - reach) * net.position(gun.input_node).dist(gun.target) <= gun.radius
}

/// Hill-climbs the single-gun fitness. Each attempt drops the input, runs
/// a random number of steps, switches the input back on and measures; then
/// one swap is applied and the measurement repeated from the same state.
/// The swap is kept only if the period is unchanged (both from that state
/// and from rest), a cycle is found, the network relaxes when the input is
/// dropped at any cycle phase, and fitness did not drop.
pub fn shape_glider(
    net: &mut Network,
    journal: &mut RewireJournal,
    gun: &GunSpec,
    cfg: &GunTrainConfig,
    rng: &mut SimRng,
) -> Result<GliderShaping> {
    cfg.validate()?;
    check_input(net, gun)?;
    let layout = RegionLayout::single_gun(net, gun);
    let input = InputAssignment::with_on([gun.input_node]);
    let off = InputAssignment::none();
    let max_len = max_edge_length(gun.radius);
    let origin = net.position(gun.input_node);
    let mut selector = WindowSelector::default();
    let mut state = StateVector::zeros(net.n_nodes());
    let mut trace = Vec::with_capacity(cfg.shape_budget);
    let mut accepted_count = 0;
    let mut last = (f64::NEG_INFINITY, None, 0.0);

    for attempt in 1..=cfg.shape_budget {
        let (before, start, rest_draw) = {
            let mut sim = Simulator::new(net);
            let start = match sim.settle_random_steps(&state, &off, cfg.max_steps, rng) {
                Ok((s, _)) => s,
                Err(_) => StateVector::zeros(net.n_nodes()),
            };
            let before = measure(&mut sim, &start, &input, &layout, cfg.max_steps);
            (before, start, rng.gen_range(0..usize::MAX / 2))
        };
        let before_period = before.cycle.as_ref().map(LimitCycle::period);
        let reach = before.cycle.as_ref().map_or(0.0, |c| glider_reach(net, gun, c));
        let anchor = if reached_target(net, gun, reach) { gun.target } else { origin.lerp(gun.target, reach) };
        let window_kind = selector.next_kind();
        let in_window = |p: Point| match window_kind {
            WindowKind::Anchors => Disk::new(anchor, gun.radius).contains(p),
            WindowKind::Paths => Capsule::new(origin, anchor, gun.radius).contains(p),
        };
        let active = &before.active;
        let swap = propose_swap(net, &|i| active.get(i), &in_window, max_len, cfg.swap_draws, rng);

        let mut kept = (before.fitness, before_period, before.cycle.clone());
        let mut accepted = false;
        if let Some(swap) = swap {
            rewiring::apply(net, journal, swap)?;
            let mut sim = Simulator::new(net);
            let after = measure(&mut sim, &start, &input, &layout, cfg.max_steps);
            let ok = match &after.cycle {
                Some(c) if c.period() == cfg.desired_period && after.fitness >= before.fitness => {
                    all_phases_rest(net, c, cfg.rest_steps) && gun_period(net, gun.input_node, cfg.max_steps) == Some(cfg.desired_period)
                }
                _ => false,
            };
            if ok {
                accepted = true;
                accepted_count += 1;
                kept = (after.fitness, after.cycle.as_ref().map(LimitCycle::period), after.cycle);
            } else {
                rewiring::undo_last(net, journal, 1)?;
            }
        }
        let (fit, period, cycle) = kept;
        state = match &cycle {
            Some(c) => {
                let mut s = c.states[rest_draw % c.period()].clone();
                s.set(gun.input_node, false);
                s
            }
            None => StateVector::zeros(net.n_nodes()),
        };
        let reach = cycle.as_ref().map_or(0.0, |c| glider_reach(net, gun, c));
        last = (fit, period, reach);
        trace.push(GunTraceRow { attempt, accepted, fitness: fit, period });
    }
    Ok(GliderShaping { success: reached_target(net, gun, last.2), accepted: accepted_count, final_fitness: last.0, trace })
}
