//! Time-dependent region geometry and the glider fitness function.
//!
//! Space is split into region I (activity penalized), region II (strong
//! input rewarded) and region III (anything goes). Region II is made of
//! moving "shot" disks emitted once per gun period at the input node and
//! travelling to the target in `T` steps, plus static corridors for common
//! outputs. Overlaps resolve by layer, highest first:
//!
//! 1. static region II (common output that must be TRUE)
//! 2. shots that must pass the target (TRUE per-input outputs)
//! 3. the target zone (III)
//! 4. shots terminated at the target
//! 5. input-node zones (III)
//! 6. static region I (common output that must be FALSE)
//! 7. everything else is region I

use std::fmt::Write as _;

use crate::dynamics::{LimitCycle, StateVector};
use crate::gate::{GateSpec, GunSpec, Pattern, Strategy};
use crate::geometry::{axis_coords, Capsule, Disk, Point};
use crate::network::{fmt_f64, Network};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    I,
    II,
    III,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
        }
    }
}

/// What decided a point's region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cause {
    StaticII,
    Shot(usize),
    TargetZone,
    InputZone,
    StaticI,
    Background,
}

/// Periodic stream of shot disks from one gun.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotTrack {
    /// Index of the gun within its gate.
    pub gun: usize,
    pub origin: Point,
    pub target: Point,
    pub period: usize,
    pub travel_steps: usize,
    /// Oldest age a shot can have before it is dropped.
    pub max_age: usize,
    /// Shot continues past the target and outranks the target zone.
    pub passes: bool,
    /// Emission times are `t ≡ phase (mod period)`.
    pub phase: usize,
}

impl ShotTrack {
    /// Track that stops at the target.
    pub fn terminated(gun: usize, spec: &GunSpec, origin: Point) -> Self {
        Self {
            gun,
            origin,
            target: spec.target,
            period: spec.period,
            travel_steps: spec.travel_steps,
            max_age: spec.travel_steps,
            passes: false,
            phase: 0,
        }
    }

    /// Track that continues to `terminus` (measured along the gun axis).
    pub fn passing(gun: usize, spec: &GunSpec, origin: Point, terminus: Point) -> Self {
        let (s, _) = axis_coords(terminus, origin, spec.target);
        let max_age = (s.max(1.0) * spec.travel_steps as f64 + 1e-9).floor() as usize;
        Self { max_age, passes: true, ..Self::terminated(gun, spec, origin) }
    }

    pub fn center_at_age(&self, age: usize) -> Point {
        self.origin.lerp(self.target, age as f64 / self.travel_steps as f64)
    }

    /// Ages of the shots in flight at time `t`, youngest first.
    pub fn ages_at(&self, t: usize) -> impl Iterator<Item = usize> + '_ {
        let p = self.period;
        let first = (t % p + p - self.phase % p) % p;
        (first..=self.max_age).step_by(p)
    }

    /// Centers of the shot disks in flight at time `t`.
    pub fn disks(&self, t: usize) -> Vec<Point> {
        self.ages_at(t).map(|a| self.center_at_age(a)).collect()
    }
}

/// Disk centers of `track`'s shots at time `t`.
pub fn shot_disks(track: &ShotTrack, t: usize) -> Vec<Point> {
    track.disks(t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionLayout {
    pub radius: f64,
    pub tracks: Vec<ShotTrack>,
    pub input_zones: Vec<Disk>,
    pub target_zone: Option<Disk>,
    pub static_ii: Vec<Capsule>,
    pub static_i: Vec<Capsule>,
}

impl RegionLayout {
    /// Layout for training a lone gun: shots end at the target, and the
    /// input and target zones are free.
    pub fn single_gun(net: &Network, gun: &GunSpec) -> Self {
        let origin = net.position(gun.input_node);
        Self {
            radius: gun.radius,
            tracks: vec![ShotTrack::terminated(0, gun, origin)],
            input_zones: vec![Disk::new(origin, gun.radius)],
            target_zone: Some(Disk::new(gun.target, gun.radius)),
            static_ii: Vec::new(),
            static_i: Vec::new(),
        }
    }

    pub fn phases(&self) -> Vec<usize> {
        self.tracks.iter().map(|t| t.phase).collect()
    }

    pub fn set_phases(&mut self, phases: &[usize]) {
        for (track, &p) in self.tracks.iter_mut().zip(phases) {
            track.phase = p;
        }
    }

    pub fn classify(&self, p: Point, t: usize) -> Region {
        self.classify_detailed(p, t, |_| true).0
    }

    /// Region of `p` at time `t`, considering only the tracks accepted by
    /// `include`, together with the layer that decided it.
    pub fn classify_detailed(&self, p: Point, t: usize, include: impl Fn(usize) -> bool) -> (Region, Cause) {
        if self.static_ii.iter().any(|c| c.contains(p)) {
            return (Region::II, Cause::StaticII);
        }
        let in_shot = |track: &ShotTrack| {
            let r2 = self.radius * self.radius;
            track.ages_at(t).any(|a| track.center_at_age(a).dist_sq(p) <= r2)
        };
        for (i, track) in self.tracks.iter().enumerate() {
            if track.passes && include(i) && in_shot(track) {
                return (Region::II, Cause::Shot(i));
            }
        }
        if self.target_zone.is_some_and(|z| z.contains(p)) {
            return (Region::III, Cause::TargetZone);
        }
        for (i, track) in self.tracks.iter().enumerate() {
            if !track.passes && include(i) && in_shot(track) {
                return (Region::II, Cause::Shot(i));
            }
        }
        if self.input_zones.iter().any(|z| z.contains(p)) {
            return (Region::III, Cause::InputZone);
        }
        if self.static_i.iter().any(|c| c.contains(p)) {
            return (Region::I, Cause::StaticI);
        }
        (Region::I, Cause::Background)
    }

    /// Debug dump, one line per region element and step:
    /// `step label x y radius`. Elements are listed from lowest to highest
    /// precedence so that painting them in order reproduces `classify`.
    pub fn dump(&self, steps: usize) -> String {
        let mut out = String::new();
        let line = |out: &mut String, t: usize, region: Region, c: Point, r: f64| {
            let _ = writeln!(out, "{t} {} {} {} {}", region.label(), fmt_f64(c.x), fmt_f64(c.y), fmt_f64(r));
        };
        for t in 0..steps {
            for cap in &self.static_i {
                for c in capsule_samples(cap) {
                    line(&mut out, t, Region::I, c, cap.radius);
                }
            }
            for z in &self.input_zones {
                line(&mut out, t, Region::III, z.center, z.radius);
            }
            for track in self.tracks.iter().filter(|tr| !tr.passes) {
                for c in track.disks(t) {
                    line(&mut out, t, Region::II, c, self.radius);
                }
            }
            if let Some(z) = self.target_zone {
                line(&mut out, t, Region::III, z.center, z.radius);
            }
            for track in self.tracks.iter().filter(|tr| tr.passes) {
                for c in track.disks(t) {
                    line(&mut out, t, Region::II, c, self.radius);
                }
            }
            for cap in &self.static_ii {
                for c in capsule_samples(cap) {
                    line(&mut out, t, Region::II, c, cap.radius);
                }
            }
        }
        out
    }
}

/// Disk centers covering a capsule at half-radius spacing.
fn capsule_samples(cap: &Capsule) -> Vec<Point> {
    let len = cap.from.dist(cap.to);
    let n = (len / (0.5 * cap.radius)).ceil().max(1.0) as usize;
    (0..=n).map(|i| cap.from.lerp(cap.to, i as f64 / n as f64)).collect()
}

/// Region layout for `pattern` of `gate`, all phases zero.
///
/// Every input node and the target get a zone III disk. Each active gun
/// fires shots; they pass the target only for a per-input gate whose
/// output for that gun must be TRUE. A common output gets a static corridor
/// from the target to the readout disk, fixed to II when TRUE is wanted and
/// to I otherwise.
pub fn build_layout(net: &Network, gate: &GateSpec, pattern: Pattern) -> RegionLayout {
    let d = gate.radius();
    let desired = gate.desired(pattern);
    let mut tracks = Vec::new();
    for g in pattern.active_guns(gate.n_guns()) {
        let spec = &gate.guns[g];
        let origin = net.position(spec.input_node);
        let track = if gate.strategy == Strategy::PerInput && desired[g] {
            ShotTrack::passing(g, spec, origin, gate.outputs[g].center)
        } else {
            ShotTrack::terminated(g, spec, origin)
        };
        tracks.push(track);
    }
    let mut layout = RegionLayout {
        radius: d,
        tracks,
        input_zones: gate.guns.iter().map(|g| Disk::new(net.position(g.input_node), d)).collect(),
        target_zone: Some(Disk::new(gate.target(), d)),
        static_ii: Vec::new(),
        static_i: Vec::new(),
    };
    if gate.strategy == Strategy::Common {
        let out = gate.outputs[0];
        let zones = vec![Capsule::new(gate.target(), out.center, 0.5 * d), Capsule::new(out.center, out.center, out.readout_radius)];
        if desired[0] {
            layout.static_ii = zones;
        } else {
            layout.static_i = zones;
        }
    }
    layout
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FitnessValue {
    pub total: f64,
    /// Sum of `min(h - S, 0)` over region I (non-positive).
    pub penalty: f64,
    /// Sum of `max(S - (h + 1), 0)` over region II (non-negative).
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitnessReport {
    pub value: FitnessValue,
    /// Emission phase chosen for each track.
    pub phases: Vec<usize>,
}

/// Nodes with `S > h` in `state`, the only ones `g` can score. Input nodes
/// are pinned from outside and never scored.
pub fn superthreshold_nodes(net: &Network, state: &StateVector) -> Vec<(usize, i32)> {
    let mut sums = std::collections::BTreeMap::new();
    for j in state.iter_ones() {
        let w = net.weight(j);
        for &i in net.out_neighbors(j) {
            *sums.entry(i as usize).or_insert(0) += w;
        }
    }
    let h = net.threshold();
    sums.into_iter().filter(|&(i, s)| s > h && !net.is_input(i)).collect()
}

/// `g(S, region)`.
pub fn node_score(region: Region, s: i32, h: i32) -> i32 {
    match region {
        Region::I => (h - s).min(0),
        Region::II => (s - (h + 1)).max(0),
        Region::III => 0,
    }
}

/// Fitness of `cycle` under `layout`: the average over cycle states of the
/// summed node scores. Cycle state `k` is evaluated at layout time `k`.
/// Each track's emission phase is chosen independently to maximize that
/// track's own region II reward.
pub fn fitness(net: &Network, cycle: &LimitCycle, layout: &RegionLayout) -> FitnessReport {
    let hot: Vec<Vec<(usize, i32)>> = cycle.states.iter().map(|s| superthreshold_nodes(net, s)).collect();
    fitness_from_hot(net, &hot, layout)
}

pub(crate) fn fitness_from_hot(net: &Network, hot: &[Vec<(usize, i32)>], layout: &RegionLayout) -> FitnessReport {
    let h = net.threshold();
    let mut layout = layout.clone();
    let mut phases = Vec::with_capacity(layout.tracks.len());
    for g in 0..layout.tracks.len() {
        let mut best = (i64::MIN, 0);
        for phase in 0..layout.tracks[g].period {
            layout.tracks[g].phase = phase;
            let reward = track_reward(net, hot, &layout, g, h);
            if reward > best.0 {
                best = (reward, phase);
            }
        }
        layout.tracks[g].phase = best.1;
        phases.push(best.1);
    }
    let mut penalty = 0i64;
    let mut reward = 0i64;
    for (t, nodes) in hot.iter().enumerate() {
        for &(i, s) in nodes {
            let region = layout.classify(net.position(i), t);
            let score = i64::from(node_score(region, s, h));
            if score < 0 {
                penalty += score;
            } else {
                reward += score;
            }
        }
    }
    let states = hot.len().max(1) as f64;
    let value = FitnessValue { total: (penalty + reward) as f64 / states, penalty: penalty as f64, reward: reward as f64 };
    FitnessReport { value, phases }
}

/// Region II reward earned inside track `g`'s own shots, ignoring the
/// other tracks.
fn track_reward(net: &Network, hot: &[Vec<(usize, i32)>], layout: &RegionLayout, g: usize, h: i32) -> i64 {
    let mut total = 0i64;
    for (t, nodes) in hot.iter().enumerate() {
        for &(i, s) in nodes {
            if let (Region::II, Cause::Shot(k)) = layout.classify_detailed(net.position(i), t, |k| k == g) {
                debug_assert_eq!(k, g);
                total += i64::from(node_score(Region::II, s, h));
            }
        }
    }
    total
}
