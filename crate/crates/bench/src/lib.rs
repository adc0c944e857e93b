//! Shared input builders for the pipeline benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thrg_core::temporal::{size_quantize, EdgeEvent, TemporalGraph};
use thrg_core::StaticGraph;

/// A growing random graph: each new vertex attaches to `attach` existing
/// vertices picked uniformly, yielding a connected cumulative edgelist.
pub fn growing_graph(n: usize, attach: usize, beta: u32, seed: u64) -> TemporalGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events = Vec::new();
    let mut t = 0.0;
    events.push(EdgeEvent {
        u: 0,
        v: 1,
        timestamp: t,
    });
    for v in 2..n as i64 {
        for _ in 0..attach {
            let u = rng.gen_range(0..v);
            t += 1.0;
            events.push(EdgeEvent {
                u,
                v,
                timestamp: t,
            });
        }
    }
    let simple = thrg_core::temporal::simplify(&events);
    size_quantize(&simple, beta).unwrap()
}

pub fn er_graph(n: u32, p: f64, seed: u64) -> StaticGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = StaticGraph::new();
    for v in 0..n {
        g.add_vertex(v);
    }
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}
