//! Contraction of a community assignment into a weighted supergraph.
//!
//! Supernode weights are the sum of member degrees, estimated with a
//! count-min sketch keyed by community id. Superedges carry the number of
//! original edges between the two communities.

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;

use crate::community::CommunityAssignment;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::sketch::CountMinSketch;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperNode {
    /// Community id (a node id of the input graph).
    pub id: NodeId,
    /// Estimated sum of member degrees.
    pub weight: u64,
    pub members: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuperEdge {
    /// Indices into [`SuperGraph::nodes`], `src < dst`.
    pub src: u32,
    pub dst: u32,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperGraph {
    nodes: Vec<SuperNode>,
    edges: Vec<SuperEdge>,
    members: Vec<Vec<NodeId>>,
}

impl SuperGraph {
    /// Supernodes sorted by community id.
    pub fn nodes(&self) -> &[SuperNode] {
        &self.nodes
    }

    /// Superedges sorted by `(src, dst)`.
    pub fn edges(&self) -> &[SuperEdge] {
        &self.edges
    }

    /// Original node ids of each supernode, aligned with `nodes()`.
    pub fn members(&self) -> &[Vec<NodeId>] {
        &self.members
    }

    pub fn index_of(&self, community: NodeId) -> Option<usize> {
        self.nodes.binary_search_by_key(&community, |n| n.id).ok()
    }

    pub fn weights(&self) -> Vec<u64> {
        self.nodes.iter().map(|n| n.weight).collect()
    }

    pub fn write_nodes_tsv<W: Write>(&self, g: &Graph, mut out: W) -> Result<()> {
        writeln!(out, "id\tweight\tmembers")?;
        for n in &self.nodes {
            writeln!(out, "{}\t{}\t{}", g.external_id(n.id), n.weight, n.members)?;
        }
        Ok(())
    }

    pub fn write_edges_tsv<W: Write>(&self, g: &Graph, mut out: W) -> Result<()> {
        writeln!(out, "src\tdst\tmultiplicity")?;
        for e in &self.edges {
            writeln!(
                out,
                "{}\t{}\t{}",
                g.external_id(self.nodes[e.src as usize].id),
                g.external_id(self.nodes[e.dst as usize].id),
                e.multiplicity
            )?;
        }
        Ok(())
    }
}

fn check_sizes(g: &Graph, a: &CommunityAssignment) -> Result<()> {
    if a.labels().len() != g.node_count() {
        return Err(Error::invalid("assignment does not match graph size"));
    }
    Ok(())
}

/// Adds each node's degree to the sketch under its community id.
pub fn accumulate_sizes(g: &Graph, a: &CommunityAssignment, sketch: &CountMinSketch) -> Result<()> {
    check_sizes(g, a)?;
    a.labels()
        .par_iter()
        .zip(g.degrees().par_iter())
        .for_each(|(&label, &deg)| sketch.add(label as u64, deg as u64));
    Ok(())
}

/// Builds the supergraph. Sizes must already be accumulated into `sketch`.
pub fn contract(g: &Graph, a: &CommunityAssignment, sketch: &CountMinSketch) -> Result<SuperGraph> {
    check_sizes(g, a)?;
    let ids = a.community_ids();
    let mut index = vec![u32::MAX; g.node_count()];
    for (i, &id) in ids.iter().enumerate() {
        index[id as usize] = i as u32;
    }
    let mut members: Vec<Vec<NodeId>> = vec![Vec::new(); ids.len()];
    for (v, &l) in a.labels().iter().enumerate() {
        members[index[l as usize] as usize].push(v as NodeId);
    }
    let nodes = ids
        .iter()
        .zip(&members)
        .map(|(&id, m)| SuperNode {
            id,
            weight: sketch.estimate(id as u64),
            members: m.len(),
        })
        .collect();

    let labels = a.labels();
    let merged = g
        .edges()
        .par_chunks(1 << 16)
        .map(|part| {
            let mut local: HashMap<(u32, u32), u64> = HashMap::new();
            for &(u, v) in part {
                let x = index[labels[u as usize] as usize];
                let y = index[labels[v as usize] as usize];
                if x != y {
                    *local.entry((x.min(y), x.max(y))).or_default() += 1;
                }
            }
            local
        })
        .reduce(HashMap::new, |mut acc, part| {
            if acc.len() < part.len() {
                return merge_into(part, acc);
            }
            merge_into(std::mem::take(&mut acc), part)
        });
    let mut edges: Vec<SuperEdge> = merged
        .into_iter()
        .map(|((src, dst), multiplicity)| SuperEdge { src, dst, multiplicity })
        .collect();
    edges.sort_unstable_by_key(|e| (e.src, e.dst));

    Ok(SuperGraph { nodes, edges, members })
}

fn merge_into(mut big: HashMap<(u32, u32), u64>, small: HashMap<(u32, u32), u64>) -> HashMap<(u32, u32), u64> {
    for (k, m) in small {
        *big.entry(k).or_default() += m;
    }
    big
}
