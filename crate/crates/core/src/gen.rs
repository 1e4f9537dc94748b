//! Synthetic graphs with known community structure.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, NodeId};

/// A generated graph together with the community each node was planted in.
#[derive(Debug, Clone)]
pub struct Planted {
    pub graph: Graph,
    pub truth: Vec<u32>,
}

/// `cliques` disjoint cliques of `size` nodes followed by `bridges` random
/// edges between distinct cliques.
///
/// Clique edges are streamed clique by clique in lexicographic order and the
/// bridges come last, so intra-community edges precede inter-community ones.
pub fn planted_cliques(cliques: usize, size: usize, bridges: usize, seed: u64) -> Planted {
    assert!(cliques >= 2 && size >= 2, "need at least two cliques of two nodes");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = cliques * size;
    let mut edges = Vec::with_capacity(cliques * size * (size - 1) / 2 + bridges);
    for c in 0..cliques {
        let base = c * size;
        for i in 0..size {
            for j in i + 1..size {
                edges.push(((base + i) as NodeId, (base + j) as NodeId));
            }
        }
    }
    for _ in 0..bridges {
        let a = rng.gen_range(0..cliques);
        let mut b = rng.gen_range(0..cliques - 1);
        if b >= a {
            b += 1;
        }
        let u = a * size + rng.gen_range(0..size);
        let v = b * size + rng.gen_range(0..size);
        edges.push((u as NodeId, v as NodeId));
    }
    let truth = (0..n).map(|v| (v / size) as u32).collect();
    Planted {
        graph: Graph::from_edges(n, edges).expect("generated endpoints are in range"),
        truth,
    }
}

/// Stochastic block model with `communities` blocks of `size` nodes, each
/// intra pair linked with probability `p_in`, plus `inter_edges` uniformly
/// random edges between different blocks.
///
/// Each block's edges are shuffled and emitted block by block; the
/// inter-block edges are scattered uniformly through the stream.
pub fn planted_partition(
    communities: usize,
    size: usize,
    p_in: f64,
    inter_edges: usize,
    seed: u64,
) -> Planted {
    assert!(communities >= 2 && size >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = communities * size;
    let mut edges = Vec::new();
    for c in 0..communities {
        let base = c * size;
        let mut block = Vec::new();
        for i in 0..size {
            for j in i + 1..size {
                if rng.gen_bool(p_in) {
                    block.push(((base + i) as NodeId, (base + j) as NodeId));
                }
            }
        }
        block.shuffle(&mut rng);
        edges.extend(block);
    }
    let mut inter: Vec<(usize, (NodeId, NodeId))> = (0..inter_edges)
        .map(|_| {
            let a = rng.gen_range(0..communities);
            let mut b = rng.gen_range(0..communities - 1);
            if b >= a {
                b += 1;
            }
            let u = (a * size + rng.gen_range(0..size)) as NodeId;
            let v = (b * size + rng.gen_range(0..size)) as NodeId;
            (rng.gen_range(0..=edges.len()), (u, v))
        })
        .collect();
    inter.sort_by_key(|&(at, _)| at);
    let intra = std::mem::take(&mut edges);
    let mut pending = inter.into_iter().peekable();
    for (i, e) in intra.into_iter().enumerate() {
        while let Some((_, x)) = pending.next_if(|&(at, _)| at <= i) {
            edges.push(x);
        }
        edges.push(e);
    }
    edges.extend(pending.map(|(_, x)| x));
    let truth = (0..n).map(|v| (v / size) as u32).collect();
    Planted {
        graph: Graph::from_edges(n, edges).expect("generated endpoints are in range"),
        truth,
    }
}

/// Number of planted communities whose members carry one label that no other
/// node carries.
pub fn exactly_recovered(truth: &[u32], labels: &[u32]) -> usize {
    use std::collections::HashMap;
    let mut label_size: HashMap<u32, usize> = HashMap::new();
    for &l in labels {
        *label_size.entry(l).or_default() += 1;
    }
    let mut groups: HashMap<u32, Vec<usize>> = HashMap::new();
    for (v, &t) in truth.iter().enumerate() {
        groups.entry(t).or_default().push(v);
    }
    groups
        .values()
        .filter(|members| {
            let l = labels[members[0]];
            members.iter().all(|&v| labels[v] == l) && label_size[&l] == members.len()
        })
        .count()
}
