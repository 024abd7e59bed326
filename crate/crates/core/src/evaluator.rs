//! Error-rate measurement and output readout.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dynamics::{LimitCycle, Simulator, StateVector};
use crate::error::{Error, Result};
use crate::gate::{GateSpec, OutputSpec, Pattern};
use crate::gate_trainer::{evaluate_pattern, SimLimits};
use crate::geometry::Disk;
use crate::network::Network;
use crate::rng::SimRng;

pub const TRAINING_TRIALS: usize = 100;
pub const CERTIFICATION_TRIALS: usize = 1000;

/// TRUE iff some node inside the readout disk is on in some cycle state.
pub fn read_output(net: &Network, cycle: &LimitCycle, out: &OutputSpec) -> bool {
    let disk = Disk::new(out.center, out.readout_radius);
    let inside: Vec<usize> = (0..net.n_nodes()).filter(|&i| disk.contains(net.position(i))).collect();
    cycle.states.iter().any(|s| inside.iter().any(|&i| s.get(i)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMode {
    /// Rest test at one random cycle phase per trial.
    Training,
    /// Additionally tests every cycle phase.
    Certification,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    pub pattern: Pattern,
    pub outputs_observed: Vec<bool>,
    pub outputs_ok: bool,
    pub macro_period_ok: bool,
    pub rest_ok: bool,
    pub is_error: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternCounts {
    pub pattern: String,
    pub trials: usize,
    pub wrong_output: usize,
    pub wrong_period: usize,
    pub no_rest: usize,
    pub errors: usize,
    pub error_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub mode: EvalMode,
    pub trials_per_pattern: usize,
    pub patterns: Vec<PatternCounts>,
    pub total_trials: usize,
    pub total_errors: usize,
    pub error_rate: f64,
}

impl ErrorReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("pattern,trials,wrong_output,wrong_period,no_rest,E\n");
        for p in &self.patterns {
            let _ = writeln!(out, "{},{},{},{},{},{}", p.pattern, p.trials, p.wrong_output, p.wrong_period, p.no_rest, p.error_rate);
        }
        out
    }
}

/// Runs `trials_per_pattern` trials of every non-empty pattern, cycling
/// through the patterns so each trial starts from the state the previous
/// one left behind.
pub fn run_trials(
    net: &Network,
    gate: &GateSpec,
    trials_per_pattern: usize,
    mode: EvalMode,
    limits: SimLimits,
    rng: &mut SimRng,
) -> Result<Vec<TrialOutcome>> {
    if trials_per_pattern < 1 {
        return Err(Error::InvalidParams("trials per pattern must be >= 1".into()));
    }
    gate.validate_against(net)?;
    let mut state = StateVector::zeros(net.n_nodes());
    let mut outcomes = Vec::with_capacity(trials_per_pattern * gate.patterns().len());
    for _ in 0..trials_per_pattern {
        for pattern in gate.patterns() {
            let (r, _) = evaluate_pattern(net, gate, pattern, &state, limits, rng);
            let mut rest_ok = r.rest_ok;
            if mode == EvalMode::Certification && rest_ok {
                if let Some(cycle) = &r.cycle {
                    rest_ok = all_phases_rest(net, cycle, limits.rest_steps);
                }
            }
            let outputs_ok = r.outputs == gate.desired(pattern);
            outcomes.push(TrialOutcome {
                pattern,
                outputs_observed: r.outputs.clone(),
                outputs_ok,
                macro_period_ok: r.macro_period_ok,
                rest_ok,
                is_error: !outputs_ok || !r.macro_period_ok || !rest_ok,
            });
            state = r.end_state;
        }
    }
    Ok(outcomes)
}

/// True iff dropping all inputs at every phase of `cycle` relaxes to rest.
pub fn all_phases_rest(net: &Network, cycle: &LimitCycle, rest_steps: usize) -> bool {
    let mut sim = Simulator::new(net);
    let inputs = net.input_nodes();
    cycle.states.iter().all(|s| {
        let mut s = s.clone();
        for &i in &inputs {
            s.set(i, false);
        }
        sim.relaxes_to_rest(&s, rest_steps)
    })
}

pub fn summarize(gate: &GateSpec, outcomes: &[TrialOutcome], trials_per_pattern: usize, mode: EvalMode) -> ErrorReport {
    let n = gate.n_guns();
    let patterns: Vec<PatternCounts> = gate
        .patterns()
        .into_iter()
        .map(|p| {
            let mine: Vec<&TrialOutcome> = outcomes.iter().filter(|o| o.pattern == p).collect();
            let errors = mine.iter().filter(|o| o.is_error).count();
            PatternCounts {
                pattern: p.to_bits(n),
                trials: mine.len(),
                wrong_output: mine.iter().filter(|o| !o.outputs_ok).count(),
                wrong_period: mine.iter().filter(|o| !o.macro_period_ok).count(),
                no_rest: mine.iter().filter(|o| !o.rest_ok).count(),
                errors,
                error_rate: errors as f64 / mine.len().max(1) as f64,
            }
        })
        .collect();
    let total_trials = outcomes.len();
    let total_errors = outcomes.iter().filter(|o| o.is_error).count();
    ErrorReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: None,
        mode,
        trials_per_pattern,
        patterns,
        total_trials,
        total_errors,
        error_rate: total_errors as f64 / total_trials.max(1) as f64,
    }
}

/// Fraction of trials with a wrong output, wrong macro period, or failed
/// rest test.
pub fn measure_error_rate(
    net: &Network,
    gate: &GateSpec,
    trials_per_pattern: usize,
    mode: EvalMode,
    limits: SimLimits,
    rng: &mut SimRng,
) -> Result<ErrorReport> {
    let outcomes = run_trials(net, gate, trials_per_pattern, mode, limits, rng)?;
    Ok(summarize(gate, &outcomes, trials_per_pattern, mode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::{GunSpec, Strategy};
    use crate::geometry::Point;
    use crate::network::{ConnectionLaw, NetworkParams};
    use crate::rng::seeded_rng;

    fn cycle(n: usize, states: &[&[usize]]) -> LimitCycle {
        LimitCycle { transient_length: 0, states: states.iter().map(|a| StateVector::from_active(n, a)).collect() }
    }

    fn two_node_net() -> Network {
        let params = NetworkParams { n_nodes: 2, target_mean_degree_k: 0.5, ..Default::default() };
        let pos = vec![Point::new(0.5, 0.5), Point::new(0.9, 0.9)];
        Network::from_parts(params, ConnectionLaw::new(1.0, 0.0).unwrap(), pos, vec![1; 2], &[], &[]).unwrap()
    }

    #[test]
    fn readout() {
        let net = two_node_net();
        let out = OutputSpec { kind: Strategy::Common, center: Point::new(0.52, 0.5), readout_radius: 0.07 };
        assert!(!read_output(&net, &cycle(2, &[&[]]), &out));
        assert!(!read_output(&net, &cycle(2, &[&[1]]), &out));
        assert!(read_output(&net, &cycle(2, &[&[], &[0]]), &out));
        let empty = OutputSpec { center: Point::new(0.1, 0.1), ..out };
        assert!(!read_output(&net, &cycle(2, &[&[0, 1]]), &empty));
    }

    #[test]
    fn zero_trials_rejected() {
        let mut net = two_node_net();
        net.designate_input_node(0).unwrap();
        net.designate_input_node(1).unwrap();
        let t = Point::new(0.7, 0.7);
        let gate =
            GateSpec::two_input(&net, [GunSpec::new(0, t, 2), GunSpec::new(1, t, 3)], Strategy::Common, [&[false], &[false], &[true]])
                .unwrap();
        let r = measure_error_rate(&net, &gate, 0, EvalMode::Training, SimLimits::default(), &mut seeded_rng(1));
        assert!(matches!(r, Err(Error::InvalidParams(_))));
    }

    #[test]
    fn csv_columns() {
        let report = ErrorReport {
            version: "0".into(),
            seed: Some(3),
            mode: EvalMode::Training,
            trials_per_pattern: 2,
            patterns: vec![PatternCounts {
                pattern: "10".into(),
                trials: 2,
                wrong_output: 1,
                wrong_period: 0,
                no_rest: 0,
                errors: 1,
                error_rate: 0.5,
            }],
            total_trials: 2,
            total_errors: 1,
            error_rate: 0.5,
        };
        assert_eq!(report.to_csv(), "pattern,trials,wrong_output,wrong_period,no_rest,E\n10,2,1,0,0,0.5\n");
        let back: ErrorReport = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(back, report);
    }
}
