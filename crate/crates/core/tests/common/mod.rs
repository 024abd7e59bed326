#![allow(dead_code)]

use rand::Rng;

use lcgate::dynamics::StateVector;
use lcgate::geometry::Point;
use lcgate::network::{ConnectionLaw, Network, NetworkParams};
use lcgate::rng::seeded_rng;

/// Small random network with explicit parts; node 0 is an input when
/// `with_input`.
pub fn random_net(seed: u64, with_input: bool) -> Network {
    let mut rng = seeded_rng(seed);
    let n = rng.gen_range(2..=20);
    let h = rng.gen_range(0..=2);
    let p_edge = rng.gen_range(0.05..0.5);
    let positions: Vec<Point> = (0..n).map(|_| Point::new(rng.gen(), rng.gen())).collect();
    let signs: Vec<i8> = (0..n).map(|_| if rng.gen_bool(0.6) { 1 } else { -1 }).collect();
    let mut edges = Vec::new();
    for s in 0..n {
        for d in 0..n {
            if s != d && rng.gen_bool(p_edge) {
                edges.push((s, d));
            }
        }
    }
    let params = NetworkParams { n_nodes: n, threshold_h: h, target_mean_degree_k: 1.0, ..Default::default() };
    let inputs: &[usize] = if with_input && signs[0] > 0 { &[0] } else { &[] };
    Network::from_parts(params, ConnectionLaw::new(1.0, 0.0).unwrap(), positions, signs, &edges, inputs).unwrap()
}

/// Threshold rule written from the edge list alone.
pub fn naive_step(net: &Network, s: &[bool], on: &[usize]) -> Vec<bool> {
    let n = net.n_nodes();
    let h = net.threshold();
    let mut sum = vec![0i32; n];
    for (src, dst, _) in net.edges() {
        if s[src] {
            let w = if net.is_input(src) { h + 1 } else { i32::from(net.sign(src)) };
            sum[dst] += w;
        }
    }
    (0..n).map(|i| if net.is_input(i) { on.contains(&i) } else { sum[i] > h }).collect()
}

pub fn bits(s: &StateVector) -> Vec<bool> {
    (0..s.len()).map(|i| s.get(i)).collect()
}

pub fn naive_cycle(net: &Network, start: Vec<bool>, on: &[usize], max_steps: usize) -> Option<(usize, Vec<Vec<bool>>)> {
    let mut traj = vec![start];
    for _ in 0..max_steps {
        let next = naive_step(net, traj.last().unwrap(), on);
        if let Some(first) = traj.iter().position(|s| *s == next) {
            return Some((first, traj[first..].to_vec()));
        }
        traj.push(next);
    }
    None
}
