//! Gun and gate specifications and the gate file format.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::network::Network;

pub const DEFAULT_TRAVEL_STEPS: usize = 10;
pub const DEFAULT_RADIUS: f64 = 0.07;
/// Passing shots (and per-input readouts) extend this fraction of the
/// input-to-target distance beyond the target.
pub const DEFAULT_OVERSHOOT: f64 = 0.5;

/// Maximum length of any edge created by rewiring, `L = 3D`.
pub fn max_edge_length(radius: f64) -> f64 {
    3.0 * radius
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GunSpec {
    pub input_node: usize,
    pub target: Point,
    pub period: usize,
    pub travel_steps: usize,
    pub radius: f64,
}

impl GunSpec {
    pub fn new(input_node: usize, target: Point, period: usize) -> Self {
        Self { input_node, target, period, travel_steps: DEFAULT_TRAVEL_STEPS, radius: DEFAULT_RADIUS }
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.period) {
            return Err(Error::InvalidGate(format!("gun period {} is not prime", self.period)));
        }
        if self.travel_steps < 1 {
            return Err(Error::InvalidGate("travel steps must be >= 1".into()));
        }
        if !(self.radius > 0.0 && self.radius < 0.5) {
            return Err(Error::InvalidGate(format!("radius {} outside (0, 0.5)", self.radius)));
        }
        if !self.target.in_unit_square() {
            return Err(Error::InvalidGate(format!("target {:?} outside unit square", self.target)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// One output per gun, TRUE when that gun's glider passes the target.
    #[serde(rename = "per-input")]
    PerInput,
    /// One shared output region fed by a static corridor from the target.
    #[serde(rename = "common")]
    Common,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputSpec {
    pub kind: Strategy,
    pub center: Point,
    pub readout_radius: f64,
}

/// Set of active guns as a bitmask; bit `g` is gun `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern(pub u32);

impl Pattern {
    pub fn is_active(self, gun: usize) -> bool {
        self.0 >> gun & 1 == 1
    }

    pub fn active_guns(self, n_guns: usize) -> Vec<usize> {
        (0..n_guns).filter(|&g| self.is_active(g)).collect()
    }

    /// Bitstring with character `g` standing for gun `g`.
    pub fn to_bits(self, n_guns: usize) -> String {
        (0..n_guns).map(|g| if self.is_active(g) { '1' } else { '0' }).collect()
    }

    pub fn from_bits(bits: &str) -> Result<Self> {
        let mut mask = 0u32;
        for (g, c) in bits.chars().enumerate() {
            match c {
                '1' => mask |= 1 << g,
                '0' => {}
                _ => return Err(Error::Parse(format!("bad pattern bitstring {bits:?}"))),
            }
        }
        Ok(Pattern(mask))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateSpec {
    pub guns: Vec<GunSpec>,
    pub strategy: Strategy,
    pub outputs: Vec<OutputSpec>,
    /// Desired output values for every non-empty pattern.
    pub truth_table: BTreeMap<Pattern, Vec<bool>>,
    pub overshoot: f64,
}

impl GateSpec {
    /// Builds a gate with default output geometry and validates it.
    pub fn new(net: &Network, guns: Vec<GunSpec>, strategy: Strategy, truth_table: BTreeMap<Pattern, Vec<bool>>) -> Result<Self> {
        if guns.is_empty() {
            return Err(Error::InvalidGate("gate needs at least one gun".into()));
        }
        if let Some(g) = guns.iter().find(|g| g.input_node >= net.n_nodes()) {
            return Err(Error::Mismatch(format!("gate input node {} not in network", g.input_node)));
        }
        let outputs = default_outputs_at(&guns, strategy, DEFAULT_OVERSHOOT, |g| net.position(g.input_node));
        let gate = Self { guns, strategy, outputs, truth_table, overshoot: DEFAULT_OVERSHOOT };
        gate.validate()?;
        Ok(gate)
    }

    /// Two-gun gate from a 3-row table `[A only, B only, both]`.
    pub fn two_input(net: &Network, guns: [GunSpec; 2], strategy: Strategy, rows: [&[bool]; 3]) -> Result<Self> {
        let table = [(Pattern(0b01), rows[0]), (Pattern(0b10), rows[1]), (Pattern(0b11), rows[2])]
            .into_iter()
            .map(|(p, r)| (p, r.to_vec()))
            .collect();
        Self::new(net, guns.to_vec(), strategy, table)
    }

    pub fn n_guns(&self) -> usize {
        self.guns.len()
    }

    pub fn target(&self) -> Point {
        self.guns[0].target
    }

    pub fn radius(&self) -> f64 {
        self.guns[0].radius
    }

    pub fn travel_steps(&self) -> usize {
        self.guns[0].travel_steps
    }

    /// Every non-empty pattern in increasing bitmask order.
    pub fn patterns(&self) -> Vec<Pattern> {
        (1..1u32 << self.n_guns()).map(Pattern).collect()
    }

    /// Period of the joint cycle when the active guns do not interact.
    pub fn macro_period(&self, pattern: Pattern) -> usize {
        pattern.active_guns(self.n_guns()).iter().map(|&g| self.guns[g].period).product()
    }

    pub fn desired(&self, pattern: Pattern) -> &[bool] {
        &self.truth_table[&pattern]
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGate(m));
        if self.guns.is_empty() {
            return bad("gate needs at least one gun".into());
        }
        if self.guns.len() > 16 {
            return bad("at most 16 guns supported".into());
        }
        for g in &self.guns {
            g.validate()?;
        }
        let first = self.guns[0];
        for g in &self.guns[1..] {
            if g.target != first.target {
                return bad("all guns must share one target".into());
            }
            if g.travel_steps != first.travel_steps || g.radius != first.radius {
                return bad("all guns must share travel steps and radius".into());
            }
        }
        for (i, a) in self.guns.iter().enumerate() {
            for b in &self.guns[i + 1..] {
                if a.period == b.period {
                    return bad(format!("gun periods must be distinct primes, {} repeats", a.period));
                }
                if a.input_node == b.input_node {
                    return bad(format!("input node {} used twice", a.input_node));
                }
            }
        }
        let n_outputs = match self.strategy {
            Strategy::PerInput => self.n_guns(),
            Strategy::Common => 1,
        };
        if self.outputs.len() != n_outputs {
            return bad(format!("{:?} strategy needs {n_outputs} outputs, got {}", self.strategy, self.outputs.len()));
        }
        if let Some(o) = self.outputs.iter().find(|o| o.kind != self.strategy) {
            return bad(format!("output kind {:?} inconsistent with strategy {:?}", o.kind, self.strategy));
        }
        for p in self.patterns() {
            let Some(row) = self.truth_table.get(&p) else {
                return bad(format!("truth table lacks pattern {}", p.to_bits(self.n_guns())));
            };
            if row.len() != n_outputs {
                return bad(format!("pattern {} has {} outputs, expected {n_outputs}", p.to_bits(self.n_guns()), row.len()));
            }
            if self.strategy == Strategy::PerInput {
                for (g, &want) in row.iter().enumerate() {
                    if want && !p.is_active(g) {
                        return bad(format!("output {g} cannot be TRUE on pattern {} where its gun is inactive", p.to_bits(self.n_guns())));
                    }
                }
            }
        }
        if self.truth_table.keys().any(|p| p.0 == 0 || p.0 >= 1 << self.n_guns()) {
            return bad("truth table contains an out-of-range pattern".into());
        }
        Ok(())
    }

    /// Checks that every gun's input node is a designated input of `net`.
    pub fn validate_against(&self, net: &Network) -> Result<()> {
        for g in &self.guns {
            if g.input_node >= net.n_nodes() {
                return Err(Error::Mismatch(format!("gate input node {} not in network", g.input_node)));
            }
            if !net.is_input(g.input_node) {
                return Err(Error::Mismatch(format!("node {} is not an input node of the network", g.input_node)));
            }
        }
        Ok(())
    }

    /// Axis of the common output: unit bisector of the incoming gun
    /// directions.
    pub fn common_axis(&self, net: &Network) -> Point {
        common_axis(&self.guns, |g| net.position(g.input_node))
    }

    pub fn to_json(&self) -> String {
        let file = GateFile {
            strategy: self.strategy,
            t_steps: Some(self.travel_steps()),
            radius_d: Some(self.radius()),
            overshoot: Some(self.overshoot),
            guns: self
                .guns
                .iter()
                .map(|g| GunFile { input_node: g.input_node, target: [g.target.x, g.target.y], period: g.period })
                .collect(),
            outputs: Some(self.outputs.iter().map(|o| OutputFile { kind: o.kind, center: [o.center.x, o.center.y] }).collect()),
            truth_table: self.truth_table.iter().map(|(p, v)| (p.to_bits(self.n_guns()), v.clone())).collect(),
        };
        serde_json::to_string_pretty(&file).expect("gate spec serializes") + "\n"
    }

    /// Parses a gate file. Missing output centers are placed by default
    /// geometry, which needs the input positions from `net`.
    pub fn from_json(text: &str, net: &Network) -> Result<Self> {
        let file: GateFile = serde_json::from_str(text)?;
        let t = file.t_steps.unwrap_or(DEFAULT_TRAVEL_STEPS);
        let d = file.radius_d.unwrap_or(DEFAULT_RADIUS);
        let overshoot = file.overshoot.unwrap_or(DEFAULT_OVERSHOOT);
        let guns: Vec<GunSpec> = file
            .guns
            .iter()
            .map(|g| GunSpec {
                input_node: g.input_node,
                target: Point::new(g.target[0], g.target[1]),
                period: g.period,
                travel_steps: t,
                radius: d,
            })
            .collect();
        if let Some(g) = guns.iter().find(|g| g.input_node >= net.n_nodes()) {
            return Err(Error::Mismatch(format!("gate input node {} not in network", g.input_node)));
        }
        let n = guns.len();
        let mut truth_table = BTreeMap::new();
        for (bits, row) in &file.truth_table {
            if bits.len() != n {
                return Err(Error::Parse(format!("pattern {bits:?} should have {n} characters")));
            }
            truth_table.insert(Pattern::from_bits(bits)?, row.clone());
        }
        let outputs = match file.outputs {
            Some(list) => {
                list.iter().map(|o| OutputSpec { kind: o.kind, center: Point::new(o.center[0], o.center[1]), readout_radius: d }).collect()
            }
            None => default_outputs_at(&guns, file.strategy, overshoot, |g| net.position(g.input_node)),
        };
        let gate = Self { guns, strategy: file.strategy, outputs, truth_table, overshoot };
        gate.validate()?;
        gate.validate_against(net)?;
        Ok(gate)
    }
}

fn common_axis(guns: &[GunSpec], input_pos: impl Fn(&GunSpec) -> Point) -> Point {
    let (mut x, mut y) = (0.0, 0.0);
    for g in guns {
        let p = input_pos(g);
        let len = p.dist(g.target).max(1e-12);
        x += (g.target.x - p.x) / len;
        y += (g.target.y - p.y) / len;
    }
    let len = (x * x + y * y).sqrt();
    if len < 1e-9 {
        // head-on guns: pick the perpendicular of the first gun's direction
        let p = input_pos(&guns[0]);
        let (dx, dy) = (guns[0].target.x - p.x, guns[0].target.y - p.y);
        let l = (dx * dx + dy * dy).sqrt().max(1e-12);
        return Point::new(-dy / l, dx / l);
    }
    Point::new(x / len, y / len)
}

/// Per-input outputs sit `overshoot` input-to-target distances beyond the
/// target on each gun's axis; a common output sits `2D` beyond the target on
/// the bisector of the incoming guns.
pub fn default_outputs_at(guns: &[GunSpec], strategy: Strategy, overshoot: f64, input_pos: impl Fn(&GunSpec) -> Point) -> Vec<OutputSpec> {
    let d = guns[0].radius;
    match strategy {
        Strategy::PerInput => guns
            .iter()
            .map(|g| OutputSpec { kind: strategy, center: input_pos(g).lerp(g.target, 1.0 + overshoot), readout_radius: d })
            .collect(),
        Strategy::Common => {
            let axis = common_axis(guns, &input_pos);
            let t = guns[0].target;
            let center = Point::new(t.x + 2.0 * d * axis.x, t.y + 2.0 * d * axis.y);
            vec![OutputSpec { kind: strategy, center, readout_radius: d }]
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::PerInput => "per-input",
            Strategy::Common => "common",
        })
    }
}

#[derive(Serialize, Deserialize)]
struct GateFile {
    strategy: Strategy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius_d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    overshoot: Option<f64>,
    guns: Vec<GunFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outputs: Option<Vec<OutputFile>>,
    truth_table: BTreeMap<String, Vec<bool>>,
}

#[derive(Serialize, Deserialize)]
struct GunFile {
    input_node: usize,
    target: [f64; 2],
    period: usize,
}

#[derive(Serialize, Deserialize)]
struct OutputFile {
    kind: Strategy,
    center: [f64; 2],
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{ConnectionLaw, NetworkParams};

    fn net() -> Network {
        let params = NetworkParams { n_nodes: 4, target_mean_degree_k: 0.5, ..Default::default() };
        let pos = vec![Point::new(0.3, 0.35), Point::new(0.7, 0.35), Point::new(0.5, 0.9), Point::new(0.1, 0.1)];
        let mut net = Network::from_parts(params, ConnectionLaw::new(1.0, 0.0).unwrap(), pos, vec![1; 4], &[], &[]).unwrap();
        net.designate_input_node(0).unwrap();
        net.designate_input_node(1).unwrap();
        net
    }

    fn guns() -> [GunSpec; 2] {
        let t = Point::new(0.5, 0.55);
        [GunSpec::new(0, t, 7), GunSpec::new(1, t, 11)]
    }

    #[test]
    fn primes() {
        let small: Vec<usize> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn pattern_bits() {
        let p = Pattern::from_bits("101").unwrap();
        assert_eq!(p, Pattern(0b101));
        assert_eq!(p.active_guns(3), vec![0, 2]);
        assert_eq!(p.to_bits(3), "101");
        assert!(Pattern::from_bits("1x").is_err());
    }

    #[test]
    fn and_gate_common() {
        let net = net();
        let gate = GateSpec::two_input(&net, guns(), Strategy::Common, [&[false], &[false], &[true]]).unwrap();
        assert_eq!(gate.patterns(), vec![Pattern(1), Pattern(2), Pattern(3)]);
        assert_eq!(gate.macro_period(Pattern(3)), 77);
        assert_eq!(gate.macro_period(Pattern(2)), 11);
        // symmetric guns: output straight up from the target, 2D away
        let c = gate.outputs[0].center;
        assert!((c.x - 0.5).abs() < 1e-12 && (c.y - 0.69).abs() < 1e-12);
        gate.validate_against(&net).unwrap();
    }

    #[test]
    fn per_input_outputs_overshoot_target() {
        let net = net();
        let gate = GateSpec::two_input(&net, guns(), Strategy::PerInput, [&[false, false], &[false, false], &[true, true]]).unwrap();
        let c = gate.outputs[0].center;
        assert!((c.x - 0.6).abs() < 1e-12 && (c.y - 0.65).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_gates() {
        let net = net();
        let [a, b] = guns();
        let same_period = [a, GunSpec { period: 7, ..b }];
        assert!(GateSpec::two_input(&net, same_period, Strategy::Common, [&[false], &[false], &[true]]).is_err());
        let composite = [a, GunSpec { period: 9, ..b }];
        assert!(GateSpec::two_input(&net, composite, Strategy::Common, [&[false], &[false], &[true]]).is_err());
        let other_target = [a, GunSpec { target: Point::new(0.4, 0.5), ..b }];
        assert!(GateSpec::two_input(&net, other_target, Strategy::Common, [&[false], &[false], &[true]]).is_err());
        // output B cannot be TRUE while only A fires
        assert!(GateSpec::two_input(&net, guns(), Strategy::PerInput, [&[false, true], &[false, false], &[true, true]]).is_err());
        assert!(GateSpec::two_input(&net, guns(), Strategy::Common, [&[false, true], &[false], &[true]]).is_err());
        let mut table = BTreeMap::new();
        table.insert(Pattern(1), vec![false]);
        assert!(GateSpec::new(&net, guns().to_vec(), Strategy::Common, table).is_err());
    }

    #[test]
    fn undesignated_input_is_a_mismatch() {
        let params = NetworkParams { n_nodes: 4, target_mean_degree_k: 0.5, ..Default::default() };
        let pos = vec![Point::new(0.3, 0.35), Point::new(0.7, 0.35), Point::new(0.5, 0.9), Point::new(0.1, 0.1)];
        let plain = Network::from_parts(params, ConnectionLaw::new(1.0, 0.0).unwrap(), pos, vec![1; 4], &[], &[]).unwrap();
        let gate = GateSpec::two_input(&plain, guns(), Strategy::Common, [&[false], &[false], &[true]]).unwrap();
        assert!(matches!(gate.validate_against(&plain), Err(Error::Mismatch(_))));
    }

    #[test]
    fn json_round_trip() {
        let net = net();
        let gate = GateSpec::two_input(&net, guns(), Strategy::Common, [&[false], &[true], &[true]]).unwrap();
        let back = GateSpec::from_json(&gate.to_json(), &net).unwrap();
        assert_eq!(back, gate);
    }

    #[test]
    fn minimal_json_uses_defaults() {
        let net = net();
        let text = r#"{"strategy":"per-input","guns":[
            {"input_node":0,"target":[0.5,0.55],"period":7},
            {"input_node":1,"target":[0.5,0.55],"period":11}],
            "truth_table":{"10":[false,false],"01":[false,false],"11":[true,true]}}"#;
        let gate = GateSpec::from_json(text, &net).unwrap();
        assert_eq!(gate.travel_steps(), DEFAULT_TRAVEL_STEPS);
        assert_eq!(gate.desired(Pattern(3)), &[true, true]);
        assert_eq!(gate.outputs.len(), 2);
        assert!(GateSpec::from_json(&text.replace("\"10\"", "\"1\""), &net).is_err());
    }
}
