//! Synchronous threshold dynamics.
//!
//! `sigma_i(t+1) = 1` iff `S_i = sum_j c_ij sigma_j(t) > h`, for every node
//! that is not an input; input nodes are pinned from outside.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::network::Network;
use crate::rng::SimRng;

pub const DEFAULT_CYCLE_STEPS: usize = 1000;
pub const DEFAULT_REST_STEPS: usize = 500;

/// Packed binary network state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateVector {
    words: Vec<u64>,
    len: usize,
}

impl StateVector {
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn from_active(len: usize, active: &[usize]) -> Self {
        let mut s = Self::zeros(len);
        for &i in active {
            s.set(i, true);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, on: bool) {
        let mask = 1u64 << (i % 64);
        if on {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn union_with(&mut self, other: &StateVector) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    /// Indices of active nodes in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }
}

/// Which input nodes are currently pinned ON. Input nodes not listed are
/// pinned OFF.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InputAssignment {
    on: Vec<usize>,
}

impl InputAssignment {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn with_on(nodes: impl IntoIterator<Item = usize>) -> Self {
        let mut on: Vec<usize> = nodes.into_iter().collect();
        on.sort_unstable();
        on.dedup();
        Self { on }
    }

    pub fn on(&self) -> &[usize] {
        &self.on
    }

    pub fn is_on(&self, node: usize) -> bool {
        self.on.binary_search(&node).is_ok()
    }

    pub fn activate(&mut self, node: usize) {
        if let Err(pos) = self.on.binary_search(&node) {
            self.on.insert(pos, node);
        }
    }

    pub fn validate(&self, net: &Network) -> Result<()> {
        match self.on.iter().find(|&&i| i >= net.n_nodes() || !net.is_input(i)) {
            Some(&i) => Err(Error::Mismatch(format!("node {i} is not an input node"))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitCycle {
    pub transient_length: usize,
    pub states: Vec<StateVector>,
}

impl LimitCycle {
    pub fn period(&self) -> usize {
        self.states.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no limit cycle found within {max_steps} steps")]
pub struct CycleTimeout {
    pub max_steps: usize,
}

/// Stepper with reusable scratch buffers. Borrowing the network immutably
/// means no rewiring can happen while a simulator is alive.
pub struct Simulator<'a> {
    net: &'a Network,
    sums: Vec<i32>,
    touched: Vec<u32>,
}

impl<'a> Simulator<'a> {
    pub fn new(net: &'a Network) -> Self {
        Self { net, sums: vec![0; net.n_nodes()], touched: Vec::new() }
    }

    pub fn network(&self) -> &'a Network {
        self.net
    }

    /// One synchronous update.
    pub fn step(&mut self, state: &StateVector, inputs: &InputAssignment) -> StateVector {
        let mut next = StateVector::zeros(state.len());
        self.step_into(state, inputs, &mut next);
        next
    }

    pub fn step_into(&mut self, state: &StateVector, inputs: &InputAssignment, next: &mut StateVector) {
        debug_assert_eq!(state.len(), self.net.n_nodes());
        let net = self.net;
        for j in state.iter_ones() {
            let w = net.weight(j);
            for &i in net.out_neighbors(j) {
                let s = &mut self.sums[i as usize];
                if *s == 0 {
                    self.touched.push(i);
                }
                *s += w;
                // may push duplicates; later visits see a zeroed sum
            }
        }
        next.clear();
        let h = net.threshold();
        for &i in &self.touched {
            let i = i as usize;
            if self.sums[i] > h && !net.is_input(i) {
                next.set(i, true);
            }
            self.sums[i] = 0;
        }
        self.touched.clear();
        for &i in inputs.on() {
            next.set(i, true);
        }
    }

    /// Incoming signal `S_i` for every node under `state`.
    pub fn input_sums(&self, state: &StateVector) -> Vec<i32> {
        let mut sums = vec![0; self.net.n_nodes()];
        for j in state.iter_ones() {
            let w = self.net.weight(j);
            for &i in self.net.out_neighbors(j) {
                sums[i as usize] += w;
            }
        }
        sums
    }

    pub fn advance(&mut self, state: &StateVector, inputs: &InputAssignment, steps: usize) -> StateVector {
        let mut cur = state.clone();
        let mut next = StateVector::zeros(state.len());
        for _ in 0..steps {
            self.step_into(&cur, inputs, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        cur
    }

    /// Iterates from `start` until a state repeats. If `ever_active` is
    /// given, every visited state is OR-ed into it.
    pub fn find_cycle(
        &mut self,
        start: &StateVector,
        inputs: &InputAssignment,
        max_steps: usize,
        mut ever_active: Option<&mut StateVector>,
    ) -> std::result::Result<LimitCycle, CycleTimeout> {
        let mut seen: HashMap<StateVector, usize> = HashMap::new();
        let mut trajectory = vec![start.clone()];
        seen.insert(start.clone(), 0);
        if let Some(acc) = ever_active.as_deref_mut() {
            acc.union_with(start);
        }
        for t in 1..=max_steps {
            let next = self.step(&trajectory[t - 1], inputs);
            if let Some(acc) = ever_active.as_deref_mut() {
                acc.union_with(&next);
            }
            if let Some(&first) = seen.get(&next) {
                trajectory.truncate(t);
                let states = trajectory.split_off(first);
                return Ok(LimitCycle { transient_length: first, states });
            }
            seen.insert(next.clone(), t);
            trajectory.push(next);
        }
        Err(CycleTimeout { max_steps })
    }

    /// True iff, with all inputs off, the all-zero state is reached within
    /// `max_steps` steps.
    pub fn relaxes_to_rest(&mut self, state: &StateVector, max_steps: usize) -> bool {
        let off = InputAssignment::none();
        let mut cur = state.clone();
        let mut next = StateVector::zeros(state.len());
        for _ in 0..max_steps {
            if cur.is_zero() {
                return true;
            }
            self.step_into(&cur, &off, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        cur.is_zero()
    }

    /// Runs a uniformly random number of steps in `[0, transient + period]`
    /// of the first cycle reached from `state`. Returns the new state and the
    /// number of steps taken.
    pub fn settle_random_steps(
        &mut self,
        state: &StateVector,
        inputs: &InputAssignment,
        max_steps: usize,
        rng: &mut SimRng,
    ) -> std::result::Result<(StateVector, usize), CycleTimeout> {
        let cycle = self.find_cycle(state, inputs, max_steps, None)?;
        let u = rng.gen_range(0..=cycle.transient_length + cycle.period());
        Ok((self.advance(state, inputs, u), u))
    }
}

pub fn step(net: &Network, state: &StateVector, inputs: &InputAssignment) -> StateVector {
    Simulator::new(net).step(state, inputs)
}

pub fn find_limit_cycle(
    net: &Network,
    start: &StateVector,
    inputs: &InputAssignment,
    max_steps: usize,
) -> std::result::Result<LimitCycle, CycleTimeout> {
    Simulator::new(net).find_cycle(start, inputs, max_steps, None)
}

pub fn relaxes_to_rest(net: &Network, state: &StateVector, max_steps: usize) -> bool {
    Simulator::new(net).relaxes_to_rest(state, max_steps)
}

pub fn settle_random_steps(
    net: &Network,
    state: &StateVector,
    inputs: &InputAssignment,
    max_steps: usize,
    rng: &mut SimRng,
) -> std::result::Result<StateVector, CycleTimeout> {
    Simulator::new(net).settle_random_steps(state, inputs, max_steps, rng).map(|(s, _)| s)
}

/// One line per state: the step index followed by the active node ids.
pub fn format_trajectory(states: &[StateVector]) -> String {
    let mut out = String::new();
    for (t, s) in states.iter().enumerate() {
        let _ = write!(out, "{t}");
        for i in s.iter_ones() {
            let _ = write!(out, " {i}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_trajectory(text: &str, n_nodes: usize) -> Result<Vec<StateVector>> {
    let mut states = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let t: usize = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| Error::Parse(format!("trajectory line {}: missing step index", line_no + 1)))?;
        if t != states.len() {
            return Err(Error::Parse(format!("trajectory line {}: expected step {}, got {t}", line_no + 1, states.len())));
        }
        let mut s = StateVector::zeros(n_nodes);
        for f in fields {
            let i: usize = f.parse().map_err(|_| Error::Parse(format!("trajectory line {}: bad id {f}", line_no + 1)))?;
            if i >= n_nodes {
                return Err(Error::Mismatch(format!("trajectory references node {i} but network has {n_nodes} nodes")));
            }
            s.set(i, true);
        }
        states.push(s);
    }
    Ok(states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::network::{ConnectionLaw, NetworkParams};
    use crate::rng::seeded_rng;

    fn build(n: usize, h: i32, signs: Vec<i8>, edges: &[(usize, usize)], inputs: &[usize]) -> Network {
        let params = NetworkParams { n_nodes: n, threshold_h: h, target_mean_degree_k: 0.5, ..Default::default() };
        let pos = (0..n).map(|i| Point::new(i as f64 / n as f64, 0.5)).collect();
        Network::from_parts(params, ConnectionLaw::new(1.0, 0.0).unwrap(), pos, signs, edges, inputs).unwrap()
    }

    #[test]
    fn quiet_network_stays_quiet() {
        let net = build(4, 2, vec![1; 4], &[(0, 1), (1, 2), (2, 3)], &[]);
        let z = StateVector::zeros(4);
        assert_eq!(step(&net, &z, &InputAssignment::none()), z);
    }

    #[test]
    fn threshold_rule() {
        // nodes 0..3 excitatory feed node 3
        let net = build(4, 2, vec![1; 4], &[(0, 3), (1, 3), (2, 3)], &[]);
        let s = StateVector::from_active(4, &[0, 1, 2]);
        assert!(step(&net, &s, &InputAssignment::none()).get(3));
        let s = StateVector::from_active(4, &[0, 1]);
        assert!(!step(&net, &s, &InputAssignment::none()).get(3));
    }

    #[test]
    fn input_drive_alone_fires_but_not_against_inhibition() {
        // 0 input, 1 inhibitory, 2 target
        let net = build(3, 2, vec![1, -1, 1], &[(0, 2), (1, 2)], &[0]);
        let on = InputAssignment::with_on([0]);
        let s = StateVector::from_active(3, &[0]);
        assert!(step(&net, &s, &on).get(2));
        let s = StateVector::from_active(3, &[0, 1]);
        assert!(!step(&net, &s, &on).get(2));
    }

    #[test]
    fn pinned_input_ignores_its_own_input() {
        let net = build(2, 0, vec![1, -1], &[(1, 0)], &[0]);
        let s = StateVector::from_active(2, &[1]);
        let next = step(&net, &s, &InputAssignment::with_on([0]));
        assert!(next.get(0));
        let next = step(&net, &StateVector::from_active(2, &[0]), &InputAssignment::none());
        assert!(!next.get(0));
    }

    #[test]
    fn zero_state_is_a_fixed_point() {
        let net = build(3, 0, vec![1; 3], &[(0, 1), (1, 2), (2, 0)], &[]);
        let c = find_limit_cycle(&net, &StateVector::zeros(3), &InputAssignment::none(), 10).unwrap();
        assert_eq!((c.transient_length, c.period()), (0, 1));
    }

    #[test]
    fn ring_rotates_with_period_three() {
        let net = build(3, 0, vec![1; 3], &[(0, 1), (1, 2), (2, 0)], &[]);
        let c = find_limit_cycle(&net, &StateVector::from_active(3, &[0]), &InputAssignment::none(), 10).unwrap();
        assert_eq!((c.transient_length, c.period()), (0, 3));
        assert!(c.states[1].get(1) && c.states[2].get(2));
    }

    #[test]
    fn timeout_is_reported() {
        let net = build(3, 0, vec![1; 3], &[(0, 1), (1, 2), (2, 0)], &[]);
        let err = find_limit_cycle(&net, &StateVector::from_active(3, &[0]), &InputAssignment::none(), 2).unwrap_err();
        assert_eq!(err, CycleTimeout { max_steps: 2 });
    }

    #[test]
    fn rest_test() {
        let net = build(4, 0, vec![1; 4], &[(0, 2), (1, 3), (2, 0), (3, 1)], &[]);
        assert!(relaxes_to_rest(&net, &StateVector::zeros(4), 0));
        assert!(!relaxes_to_rest(&net, &StateVector::from_active(4, &[0, 1]), 50));
        let chain = build(3, 0, vec![1; 3], &[(0, 1), (1, 2)], &[]);
        assert!(relaxes_to_rest(&chain, &StateVector::from_active(3, &[0]), 3));
        assert!(!relaxes_to_rest(&chain, &StateVector::from_active(3, &[0]), 2));
    }

    #[test]
    fn settle_on_fixed_point_stays_put() {
        let net = build(3, 0, vec![1; 3], &[(0, 1)], &[]);
        let z = StateVector::zeros(3);
        let mut rng = seeded_rng(1);
        for _ in 0..10 {
            let s = settle_random_steps(&net, &z, &InputAssignment::none(), 10, &mut rng).unwrap();
            assert_eq!(s, z);
        }
    }

    #[test]
    fn trajectory_round_trip() {
        let states = vec![StateVector::from_active(70, &[0, 65]), StateVector::zeros(70), StateVector::from_active(70, &[69])];
        let text = format_trajectory(&states);
        assert_eq!(text, "0 0 65\n1\n2 69\n");
        assert_eq!(parse_trajectory(&text, 70).unwrap(), states);
        assert!(parse_trajectory(&text, 60).is_err());
    }

    #[test]
    fn iter_ones_across_words() {
        let s = StateVector::from_active(200, &[3, 64, 127, 199]);
        assert_eq!(s.iter_ones().collect::<Vec<_>>(), vec![3, 64, 127, 199]);
        assert_eq!(s.count_ones(), 4);
    }
}
