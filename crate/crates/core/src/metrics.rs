//! Partition quality measures.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::community::CommunityAssignment;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Edge counts of one community: both endpoints inside, or exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CommunityStats {
    pub intra_edges: u64,
    pub boundary_edges: u64,
}

impl CommunityStats {
    pub fn total(&self) -> u64 {
        self.intra_edges + self.boundary_edges
    }
}

/// Newman modularity of the partition, counting duplicate edges with
/// multiplicity.
///
/// Uses `Q = sum_c [ l_c / m - (d_c / 2m)^2 ]` where `l_c` is the number of
/// intra-community edges and `d_c` the degree sum of community `c`.
pub fn modularity(g: &Graph, a: &CommunityAssignment) -> Result<f64> {
    if g.edge_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if a.labels().len() != g.node_count() {
        return Err(Error::invalid("assignment does not match graph size"));
    }
    let n = g.node_count();
    let labels = a.labels();
    let mut intra = vec![0u64; n];
    let mut degree_sum = vec![0u64; n];
    for &(u, v) in g.edges() {
        let c = labels[u as usize];
        if c == labels[v as usize] {
            intra[c as usize] += 1;
        }
    }
    for (v, &d) in g.degrees().iter().enumerate() {
        degree_sum[labels[v] as usize] += d as u64;
    }
    let m = g.edge_count() as f64;
    let q = intra
        .iter()
        .zip(&degree_sum)
        .filter(|(_, &d)| d > 0)
        .map(|(&l, &d)| {
            let frac = d as f64 / (2.0 * m);
            l as f64 / m - frac * frac
        })
        .sum();
    Ok(q)
}

/// Intra and boundary edge counts for every community, keyed by id.
pub fn community_stats(g: &Graph, a: &CommunityAssignment) -> BTreeMap<NodeId, CommunityStats> {
    let labels = a.labels();
    let mut out: BTreeMap<NodeId, CommunityStats> = BTreeMap::new();
    for &l in labels {
        out.entry(l).or_default();
    }
    for &(u, v) in g.edges() {
        let (cu, cv) = (labels[u as usize], labels[v as usize]);
        if cu == cv {
            out.get_mut(&cu).unwrap().intra_edges += 1;
        } else {
            out.get_mut(&cu).unwrap().boundary_edges += 1;
            out.get_mut(&cv).unwrap().boundary_edges += 1;
        }
    }
    out
}

/// Probability that `k` edges drawn without replacement from the edges
/// touching a community are all intra-community edges:
/// `prod_{l<k} (e_in - l) / (e - l)`.
pub fn intra_probability(stats: &CommunityStats, k: u64) -> Result<f64> {
    let total = stats.total();
    if k > total {
        return Err(Error::TooManyDraws { draws: k, edges: total });
    }
    let mut p = 1.0;
    for l in 0..k {
        if l >= stats.intra_edges {
            return Ok(0.0);
        }
        p *= (stats.intra_edges - l) as f64 / (total - l) as f64;
    }
    Ok(p)
}

/// Community member counts bucketed by powers of two: bucket `i` holds
/// sizes in `[2^i, 2^(i+1))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeBucket {
    pub min_size: usize,
    pub max_size: usize,
    pub communities: usize,
}

pub fn size_histogram(a: &CommunityAssignment) -> Vec<SizeBucket> {
    let mut sizes = vec![0usize; a.labels().len()];
    for &l in a.labels() {
        sizes[l as usize] += 1;
    }
    let mut buckets: Vec<usize> = Vec::new();
    for &s in sizes.iter().filter(|&&s| s > 0) {
        let b = (usize::BITS - 1 - s.leading_zeros()) as usize;
        if buckets.len() <= b {
            buckets.resize(b + 1, 0);
        }
        buckets[b] += 1;
    }
    buckets
        .into_iter()
        .enumerate()
        .map(|(b, communities)| SizeBucket {
            min_size: 1 << b,
            max_size: (1 << (b + 1)) - 1,
            communities,
        })
        .collect()
}
