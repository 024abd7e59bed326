//! Degree-preserving target swaps with an exactly reversible journal.
//!
//! A swap picks edges `a.src -> a.dst` and `b.src -> b.dst` and replaces
//! them by `a.src -> b.dst` and `b.src -> a.dst`. In- and out-degrees are
//! untouched, and since edge weights live on the source node the moved
//! edges keep their strengths.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::network::Network;
use crate::rng::SimRng;

/// Draws per proposal before giving up.
pub const DEFAULT_ATTEMPT_BUDGET: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
}

impl Edge {
    pub fn new(src: usize, dst: usize) -> Self {
        Self { src, dst }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Swap {
    pub edge_a: Edge,
    pub edge_b: Edge,
}

impl Swap {
    pub fn new(edge_a: Edge, edge_b: Edge) -> Self {
        Self { edge_a, edge_b }
    }

    /// The two edges the swap creates.
    pub fn new_edges(&self) -> (Edge, Edge) {
        (Edge::new(self.edge_a.src, self.edge_b.dst), Edge::new(self.edge_b.src, self.edge_a.dst))
    }

    /// The swap that undoes this one once applied.
    pub fn inverse(&self) -> Swap {
        let (a, b) = self.new_edges();
        Swap::new(a, b)
    }

    /// Structural validity against `net`: both old edges exist, the new
    /// edges are neither self-loops nor duplicates, and (if given) no new
    /// edge is longer than `max_len`.
    pub fn is_valid(&self, net: &Network, max_len: Option<f64>) -> bool {
        let (a, b) = (self.edge_a, self.edge_b);
        if a.src == b.src || a.dst == b.dst {
            return false;
        }
        if !net.has_edge(a.src, a.dst) || !net.has_edge(b.src, b.dst) {
            return false;
        }
        let (na, nb) = self.new_edges();
        for e in [na, nb] {
            if e.src == e.dst || net.has_edge(e.src, e.dst) {
                return false;
            }
            if let Some(l) = max_len {
                if net.position(e.src).dist(net.position(e.dst)) > l {
                    return false;
                }
            }
        }
        true
    }

    fn apply_unchecked(&self, net: &mut Network) {
        let (a, b) = (self.edge_a, self.edge_b);
        let ok = net.retarget(a.src, a.dst, b.dst) && net.retarget(b.src, b.dst, a.dst);
        debug_assert!(ok, "swap validated before application");
    }
}

/// Ordered log of applied swaps.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RewireJournal {
    applied: Vec<Swap>,
}

impl RewireJournal {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.applied.len()
    }

    pub fn is_empty(&self) -> bool {
        self.applied.is_empty()
    }

    pub fn swaps(&self) -> &[Swap] {
        &self.applied
    }

    /// One swap per line: `srcA oldDstA srcB oldDstB`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for sw in &self.applied {
            let _ = writeln!(s, "{} {} {} {}", sw.edge_a.src, sw.edge_a.dst, sw.edge_b.src, sw.edge_b.dst);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut applied = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<usize> = line
                .split_whitespace()
                .map(|f| f.parse().map_err(|_| Error::Parse(format!("journal line {}: bad integer {f:?}", n + 1))))
                .collect::<Result<_>>()?;
            let [sa, da, sb, db] = fields[..] else {
                return Err(Error::Parse(format!("journal line {}: expected 4 integers", n + 1)));
            };
            applied.push(Swap::new(Edge::new(sa, da), Edge::new(sb, db)));
        }
        Ok(Self { applied })
    }

    /// Re-applies every recorded swap to a copy of `original`.
    pub fn replay(&self, original: &Network) -> Result<Network> {
        let mut net = original.clone();
        let mut scratch = RewireJournal::new();
        for sw in &self.applied {
            apply(&mut net, &mut scratch, *sw)?;
        }
        Ok(net)
    }
}

/// Applies `swap` and records it. Fails with `StaleSwap` if the swap is no
/// longer structurally valid.
pub fn apply(net: &mut Network, journal: &mut RewireJournal, swap: Swap) -> Result<()> {
    if !swap.is_valid(net, None) {
        let e = if net.has_edge(swap.edge_a.src, swap.edge_a.dst) { swap.edge_b } else { swap.edge_a };
        return Err(Error::StaleSwap { src: e.src, dst: e.dst });
    }
    swap.apply_unchecked(net);
    journal.applied.push(swap);
    Ok(())
}

/// Inverts the newest `count` swaps, newest first.
pub fn undo_last(net: &mut Network, journal: &mut RewireJournal, count: usize) -> Result<()> {
    if count > journal.len() {
        return Err(Error::JournalUnderflow { requested: count, available: journal.len() });
    }
    for _ in 0..count {
        let sw = journal.applied.pop().expect("length checked");
        let inv = sw.inverse();
        if !inv.is_valid(net, None) {
            journal.applied.push(sw);
            return Err(Error::StaleSwap { src: inv.edge_a.src, dst: inv.edge_a.dst });
        }
        inv.apply_unchecked(net);
    }
    Ok(())
}

/// Samples a valid swap. Both edges must currently end on nodes accepted by
/// `window` (those become the post-swap targets), the first edge's source
/// must pass `source_filter`, and neither new edge may exceed `max_len`.
/// Returns `None` after `attempt_budget` fruitless draws.
pub fn propose_swap(
    net: &Network,
    source_filter: &dyn Fn(usize) -> bool,
    window: &dyn Fn(Point) -> bool,
    max_len: f64,
    attempt_budget: usize,
    rng: &mut SimRng,
) -> Option<Swap> {
    let in_window: Vec<bool> = net.positions().iter().map(|&p| window(p)).collect();
    let candidates: Vec<Edge> = net.edges().filter(|&(_, dst, _)| in_window[dst]).map(|(s, d, _)| Edge::new(s, d)).collect();
    let anchored: Vec<Edge> = candidates.iter().copied().filter(|e| source_filter(e.src)).collect();
    if anchored.is_empty() || candidates.len() < 2 {
        return None;
    }
    for _ in 0..attempt_budget {
        let a = *anchored.choose(rng).expect("non-empty");
        let b = candidates[rng.gen_range(0..candidates.len())];
        // randomize which slot the anchored edge takes
        let swap = if rng.gen::<bool>() { Swap::new(a, b) } else { Swap::new(b, a) };
        if swap.is_valid(net, Some(max_len)) {
            return Some(swap);
        }
    }
    None
}
