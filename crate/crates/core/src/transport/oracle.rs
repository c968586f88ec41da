//! Brute-force Wasserstein-1: minimizes the transport cost directly over
//! couplings instead of relying on sorted matching. Meant for small
//! instances in tests.
//!
//! Equal sizes up to [`PERMUTATION_LIMIT`] enumerate every permutation
//! (extreme points of the coupling polytope for uniform weights). Other
//! shapes are solved as an integer transportation problem: both marginals
//! are scaled by `lcm(|p|, |q|)` to integer supplies and a min-cost flow is
//! pushed with successive shortest paths, which yields the LP optimum.

use super::EmpiricalDistribution;
use crate::error::{Error, Result};

pub const PERMUTATION_LIMIT: usize = 8;
pub const MAX_COUPLING_CELLS: usize = 10_000;

pub fn wasserstein_oracle(p: &EmpiricalDistribution, q: &EmpiricalDistribution) -> Result<f64> {
    let (a, b) = (p.sorted_values(), q.sorted_values());
    if a.len() * b.len() > MAX_COUPLING_CELLS {
        return Err(Error::SizeCap(format!(
            "{}x{} coupling exceeds {MAX_COUPLING_CELLS} cells",
            a.len(),
            b.len()
        )));
    }
    if a.len() == b.len() && a.len() <= PERMUTATION_LIMIT {
        Ok(permutation_search(a, b))
    } else {
        Ok(transportation_lp(a, b))
    }
}

/// Minimum over all bijections of the mean matched distance (Heap's algorithm).
pub fn permutation_search(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let cost = |perm: &[usize]| -> f64 { perm.iter().enumerate().map(|(i, &j)| (a[i] - b[j]).abs()).sum() };
    let mut best = cost(&perm);
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.min(cost(&perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best / n as f64
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

struct Edge {
    to: usize,
    cap: i64,
    cost: f64,
}

/// Min-cost flow on source → a-nodes → b-nodes → sink with integer masses.
pub fn transportation_lp(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len(), b.len());
    let total = na / gcd(na, nb) * nb;
    let (supply, demand) = ((total / na) as i64, (total / nb) as i64);

    let source = na + nb;
    let sink = source + 1;
    let nodes = sink + 1;
    let mut edges: Vec<Edge> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    let mut add = |edges: &mut Vec<Edge>, from: usize, to: usize, cap: i64, cost: f64| {
        adj[from].push(edges.len());
        edges.push(Edge { to, cap, cost });
        adj[to].push(edges.len());
        edges.push(Edge { to: from, cap: 0, cost: -cost });
    };
    for i in 0..na {
        add(&mut edges, source, i, supply, 0.0);
    }
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            add(&mut edges, i, na + j, i64::MAX / 4, (x - y).abs());
        }
    }
    for j in 0..nb {
        add(&mut edges, na + j, sink, demand, 0.0);
    }

    let mut remaining = total as i64;
    let mut cost = 0.0;
    while remaining > 0 {
        // Bellman-Ford; residual graph may carry negative reverse costs.
        let mut dist = vec![f64::INFINITY; nodes];
        let mut via: Vec<Option<usize>> = vec![None; nodes];
        dist[source] = 0.0;
        for _ in 0..nodes {
            let mut changed = false;
            for u in 0..nodes {
                if dist[u].is_infinite() {
                    continue;
                }
                for &e in &adj[u] {
                    let edge = &edges[e];
                    if edge.cap > 0 && dist[u] + edge.cost < dist[edge.to] - 1e-12 {
                        dist[edge.to] = dist[u] + edge.cost;
                        via[edge.to] = Some(e);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        assert!(dist[sink].is_finite(), "transportation problem is infeasible");

        let mut push = remaining;
        let mut v = sink;
        while let Some(e) = via[v] {
            push = push.min(edges[e].cap);
            v = edges[e ^ 1].to;
        }
        let mut v = sink;
        while let Some(e) = via[v] {
            edges[e].cap -= push;
            edges[e ^ 1].cap += push;
            cost += push as f64 * edges[e].cost;
            v = edges[e ^ 1].to;
        }
        remaining -= push;
    }
    cost / total as f64
}
