//! Multi-round streaming community detection.
//!
//! Each round streams edges once. For an edge `(u, v)` both counter degrees
//! are bumped, and if both are still within the round threshold the endpoint
//! with the smaller counter copies the other's community label. Edges with an
//! endpoint over the threshold are skipped.
//!
//! Between rounds the partition is contracted: every community becomes one
//! supernode, inter-community edges become weighted superedges in order of
//! first appearance, and intra-community edge mass is kept as the supernode's
//! starting counter degree. A supernode's counter therefore tracks its degree
//! in the contracted multigraph, which is what the growing threshold `base^i`
//! is compared against. The threshold is capped at the input graph's maximum
//! degree, so large dense communities stop absorbing once they outgrow it.
//!
//! In parallel execution the stream is cut into waves of `workers * chunk`
//! edges. Inside a wave each worker walks its own contiguous chunk in stream
//! order while the chunks race each other; counters and labels are atomics
//! and label copies are last-writer-wins. Waves are separated by a barrier.

use std::collections::HashMap;
use std::io::Write;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DegreeStats, Graph, NodeId};

pub const DEFAULT_ROUNDS: usize = 10;
pub const DEFAULT_CHUNK: usize = 1024;

type WeightedEdge = (u32, u32, u64);

/// Who moves when both counter degrees are equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieRule {
    #[default]
    SrcJoinsDst,
    DstJoinsSrc,
    /// Leave both endpoints alone on ties.
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdBase {
    ModeDegree,
    AverageDegree,
    Explicit(u64),
}

/// What later rounds stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoundMode {
    /// Superedges of the previous round's partition.
    #[default]
    Contract,
    /// The original edges again, with labels carried over per node.
    Restream,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Sequential,
    /// Runs on the current rayon pool; `chunk` edges per worker per wave.
    Parallel { chunk: usize },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DetectOptions {
    pub tie_rule: TieRule,
    pub round_mode: RoundMode,
    pub execution: Execution,
}

/// Threshold `base^i` for rounds `i = 1..=rounds`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThresholdSchedule {
    base: u64,
    rounds: usize,
}

impl ThresholdSchedule {
    /// A base of 1 would never grow, so it is replaced by 2.
    pub fn new(base: u64, rounds: usize) -> Result<Self> {
        if base == 0 {
            return Err(Error::invalid("threshold base must be positive"));
        }
        if rounds == 0 {
            return Err(Error::invalid("at least one round is required"));
        }
        Ok(ThresholdSchedule {
            base: base.max(2),
            rounds,
        })
    }

    pub fn from_stats(stats: &DegreeStats, base: ThresholdBase, rounds: usize) -> Result<Self> {
        let base = match base {
            ThresholdBase::ModeDegree => stats.mode_degree as u64,
            ThresholdBase::AverageDegree => stats.average_degree.ceil() as u64,
            ThresholdBase::Explicit(b) => b,
        };
        Self::new(base, rounds)
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Uncapped threshold for 1-based round `round`.
    pub fn threshold(&self, round: usize) -> u64 {
        self.base.saturating_pow(round.min(u32::MAX as usize) as u32)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityAssignment {
    labels: Vec<NodeId>,
    counter_degree: Vec<u64>,
    history: Vec<Vec<NodeId>>,
    thresholds: Vec<u64>,
}

impl CommunityAssignment {
    /// Every node in its own community.
    pub fn singletons(n: usize) -> Self {
        CommunityAssignment {
            labels: (0..n as NodeId).collect(),
            counter_degree: vec![0; n],
            history: Vec::new(),
            thresholds: Vec::new(),
        }
    }

    /// Wraps an explicit labelling. Labels must be node ids.
    pub fn from_labels(labels: Vec<NodeId>) -> Result<Self> {
        let n = labels.len();
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= n) {
            return Err(Error::invalid(format!("label {bad} is not a node id below {n}")));
        }
        Ok(CommunityAssignment {
            counter_degree: vec![0; n],
            labels,
            history: Vec::new(),
            thresholds: Vec::new(),
        })
    }

    pub fn labels(&self) -> &[NodeId] {
        &self.labels
    }

    pub fn label(&self, v: NodeId) -> NodeId {
        self.labels[v as usize]
    }

    /// Counter degree of each node (or of the supernode containing it) at the
    /// end of the last round.
    pub fn counter_degree(&self) -> &[u64] {
        &self.counter_degree
    }

    /// Per-round label snapshots, oldest first.
    pub fn history(&self) -> &[Vec<NodeId>] {
        &self.history
    }

    /// Effective threshold used in each round that ran.
    pub fn thresholds(&self) -> &[u64] {
        &self.thresholds
    }

    pub fn rounds_run(&self) -> usize {
        self.history.len()
    }

    /// Sorted distinct community ids.
    pub fn community_ids(&self) -> Vec<NodeId> {
        let mut seen = vec![false; self.labels.len()];
        for &l in &self.labels {
            seen[l as usize] = true;
        }
        seen.iter()
            .enumerate()
            .filter_map(|(id, &s)| s.then_some(id as NodeId))
            .collect()
    }

    pub fn community_count(&self) -> usize {
        self.community_ids().len()
    }

    /// TSV with columns node, label, round_1..round_k, all as input ids.
    pub fn write_tsv<W: Write>(&self, g: &Graph, mut out: W) -> Result<()> {
        write!(out, "node\tlabel")?;
        for r in 1..=self.history.len() {
            write!(out, "\tround_{r}")?;
        }
        writeln!(out)?;
        for v in 0..self.labels.len() {
            write!(out, "{}\t{}", g.external_id(v as NodeId), g.external_id(self.labels[v]))?;
            for snap in &self.history {
                write!(out, "\t{}", g.external_id(snap[v]))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum Move {
    SrcJoins,
    DstJoins,
}

#[inline]
fn decide(du: u64, dv: u64, tie: TieRule) -> Option<Move> {
    use std::cmp::Ordering::*;
    match du.cmp(&dv) {
        Less => Some(Move::SrcJoins),
        Greater => Some(Move::DstJoins),
        Equal => match tie {
            TieRule::SrcJoinsDst => Some(Move::SrcJoins),
            TieRule::DstJoinsSrc => Some(Move::DstJoins),
            TieRule::Skip => None,
        },
    }
}

/// One streaming pass. `labels` is updated in place; the returned counters
/// saturate at `threshold + 1`.
fn stream_round(
    stream: &[WeightedEdge],
    seeds: Option<&[u64]>,
    labels: &mut [u32],
    threshold: u64,
    tie: TieRule,
    execution: Execution,
) -> Vec<u64> {
    let n = labels.len();
    let cap = threshold.saturating_add(1);
    let start = |v: usize| seeds.map_or(0, |s| s[v].min(cap));

    match execution {
        Execution::Sequential => {
            let mut counters: Vec<u64> = (0..n).map(start).collect();
            for &(u, v, w) in stream {
                let (u, v) = (u as usize, v as usize);
                let du = counters[u].saturating_add(w).min(cap);
                let dv = counters[v].saturating_add(w).min(cap);
                counters[u] = du;
                counters[v] = dv;
                if du <= threshold && dv <= threshold {
                    match decide(du, dv, tie) {
                        Some(Move::SrcJoins) => labels[u] = labels[v],
                        Some(Move::DstJoins) => labels[v] = labels[u],
                        None => {}
                    }
                }
            }
            counters
        }
        Execution::Parallel { chunk } => {
            let chunk = chunk.max(1);
            let counters: Vec<AtomicU64> = (0..n).map(|v| AtomicU64::new(start(v))).collect();
            let shared: Vec<AtomicU32> = labels.iter().map(|&l| AtomicU32::new(l)).collect();
            let bump = |c: &AtomicU64, w: u64| -> u64 {
                match c.fetch_update(Ordering::Relaxed, Ordering::Relaxed, |x| {
                    (x < cap).then(|| x.saturating_add(w).min(cap))
                }) {
                    Ok(x) => x.saturating_add(w).min(cap),
                    Err(x) => x,
                }
            };
            let wave = chunk.saturating_mul(rayon::current_num_threads().max(1));
            for block in stream.chunks(wave) {
                block.par_chunks(chunk).for_each(|part| {
                    for &(u, v, w) in part {
                        let (u, v) = (u as usize, v as usize);
                        let du = bump(&counters[u], w);
                        let dv = bump(&counters[v], w);
                        if du <= threshold && dv <= threshold {
                            match decide(du, dv, tie) {
                                Some(Move::SrcJoins) => shared[u]
                                    .store(shared[v].load(Ordering::Relaxed), Ordering::Relaxed),
                                Some(Move::DstJoins) => shared[v]
                                    .store(shared[u].load(Ordering::Relaxed), Ordering::Relaxed),
                                None => {}
                            }
                        }
                    }
                });
            }
            for (l, s) in labels.iter_mut().zip(shared) {
                *l = s.into_inner();
            }
            counters.into_iter().map(AtomicU64::into_inner).collect()
        }
    }
}

/// Renames every community after one of its own members: the label node
/// itself while it still belongs to the community, otherwise its smallest
/// member. The partition is unchanged.
fn resolve(labels: &mut [u32]) {
    let mut name = vec![u32::MAX; labels.len()];
    for (v, &l) in labels.iter().enumerate() {
        let l = l as usize;
        if labels[l] as usize == l {
            name[l] = l as u32;
        } else if name[l] == u32::MAX {
            name[l] = v as u32;
        }
    }
    for l in labels.iter_mut() {
        *l = name[*l as usize];
    }
}

fn unit_stream(g: &Graph) -> Vec<WeightedEdge> {
    g.edges().iter().map(|&(u, v)| (u, v, 1)).collect()
}

/// One pass over the original edges starting from `a`'s labels with all
/// counter degrees reset to zero.
pub fn scoda_round(
    g: &Graph,
    a: &CommunityAssignment,
    threshold: u64,
    tie: TieRule,
    execution: Execution,
) -> Result<CommunityAssignment> {
    if threshold == 0 {
        return Err(Error::invalid("threshold must be at least 1"));
    }
    if a.labels.len() != g.node_count() {
        return Err(Error::invalid("assignment does not match graph size"));
    }
    let mut labels = a.labels.clone();
    let counters = stream_round(&unit_stream(g), None, &mut labels, threshold, tie, execution);
    resolve(&mut labels);
    let mut history = a.history.clone();
    history.push(labels.clone());
    let mut thresholds = a.thresholds.clone();
    thresholds.push(threshold);
    Ok(CommunityAssignment {
        labels,
        counter_degree: counters,
        history,
        thresholds,
    })
}

/// Runs up to `schedule.rounds()` rounds and stops early once a round leaves
/// the partition unchanged.
pub fn detect_communities(
    g: &Graph,
    schedule: &ThresholdSchedule,
    options: &DetectOptions,
) -> Result<CommunityAssignment> {
    let stats = g.degree_stats()?;
    let cap = (stats.max_degree as u64).max(1);
    match options.round_mode {
        RoundMode::Contract => Ok(detect_contracting(g, schedule, options, cap)),
        RoundMode::Restream => Ok(detect_restreaming(g, schedule, options, cap)),
    }
}

fn detect_restreaming(
    g: &Graph,
    schedule: &ThresholdSchedule,
    options: &DetectOptions,
    cap: u64,
) -> CommunityAssignment {
    let stream = unit_stream(g);
    let mut out = CommunityAssignment::singletons(g.node_count());
    for round in 1..=schedule.rounds() {
        let t = schedule.threshold(round).min(cap);
        let before = out.labels.clone();
        out.counter_degree =
            stream_round(&stream, None, &mut out.labels, t, options.tie_rule, options.execution);
        resolve(&mut out.labels);
        out.history.push(out.labels.clone());
        out.thresholds.push(t);
        if out.labels == before {
            break;
        }
    }
    out
}

fn detect_contracting(
    g: &Graph,
    schedule: &ThresholdSchedule,
    options: &DetectOptions,
    cap: u64,
) -> CommunityAssignment {
    let n = g.node_count();
    let mut stream = unit_stream(g);
    let mut seeds = vec![0u64; n];
    // level supernode -> community id (an original node id)
    let mut rep: Vec<NodeId> = (0..n as NodeId).collect();
    // original node -> level supernode
    let mut level_of: Vec<u32> = (0..n as u32).collect();
    let mut out = CommunityAssignment::singletons(n);

    for round in 1..=schedule.rounds() {
        let level_n = rep.len();
        let t = schedule.threshold(round).min(cap);
        let mut labels: Vec<u32> = (0..level_n as u32).collect();
        let counters =
            stream_round(&stream, Some(&seeds), &mut labels, t, options.tie_rule, options.execution);
        resolve(&mut labels);

        let mut new_index = vec![u32::MAX; level_n];
        let mut new_rep = Vec::new();
        for s in 0..level_n {
            let l = labels[s] as usize;
            if new_index[l] == u32::MAX {
                new_index[l] = new_rep.len() as u32;
                new_rep.push(rep[l]);
            }
        }
        for v in 0..n {
            let s = level_of[v] as usize;
            out.counter_degree[v] = counters[s];
            level_of[v] = new_index[labels[s] as usize];
        }
        out.labels = level_of.iter().map(|&s| new_rep[s as usize]).collect();
        out.history.push(out.labels.clone());
        out.thresholds.push(t);

        if new_rep.len() == level_n {
            break;
        }

        let mut new_seeds = vec![0u64; new_rep.len()];
        for s in 0..level_n {
            new_seeds[new_index[labels[s] as usize] as usize] += seeds[s];
        }
        let mut slot: HashMap<(u32, u32), usize> = HashMap::new();
        let mut next: Vec<WeightedEdge> = Vec::new();
        for &(u, v, w) in &stream {
            let a = new_index[labels[u as usize] as usize];
            let b = new_index[labels[v as usize] as usize];
            if a == b {
                new_seeds[a as usize] = new_seeds[a as usize].saturating_add(2 * w);
                continue;
            }
            match slot.entry((a.min(b), a.max(b))) {
                std::collections::hash_map::Entry::Occupied(e) => next[*e.get()].2 += w,
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(next.len());
                    next.push((a, b, w));
                }
            }
        }
        stream = next;
        seeds = new_seeds;
        rep = new_rep;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clique_edges(nodes: &[u32]) -> Vec<(u32, u32)> {
        let mut e = Vec::new();
        for (i, &a) in nodes.iter().enumerate() {
            for &b in &nodes[i + 1..] {
                e.push((a, b));
            }
        }
        e
    }

    /// Plain reference of one sequential pass, written independently of
    /// `stream_round`: unbounded degrees, src joins dst on ties.
    fn reference_pass(n: usize, edges: &[(u32, u32)], threshold: u64) -> Vec<u32> {
        let mut deg = vec![0u64; n];
        let mut label: Vec<u32> = (0..n as u32).collect();
        for &(u, v) in edges {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
            let (du, dv) = (deg[u as usize], deg[v as usize]);
            if du > threshold || dv > threshold {
                continue;
            }
            if du <= dv {
                label[u as usize] = label[v as usize];
            } else {
                label[v as usize] = label[u as usize];
            }
        }
        label
    }

    fn partition_count(labels: &[u32]) -> usize {
        let mut l = labels.to_vec();
        l.sort_unstable();
        l.dedup();
        l.len()
    }

    #[test]
    fn disjoint_edges_pair_up() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let a = scoda_round(
            &g,
            &CommunityAssignment::singletons(4),
            1,
            TieRule::SrcJoinsDst,
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(a.labels(), &[1, 1, 3, 3]);
        assert_eq!(a.community_count(), 2);
    }

    #[test]
    fn skip_tie_rule_is_inert_on_first_edge() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let a = scoda_round(&g, &CommunityAssignment::singletons(4), 1, TieRule::Skip, Execution::Sequential)
            .unwrap();
        assert_eq!(a.community_count(), 4);
        let b = scoda_round(
            &g,
            &CommunityAssignment::singletons(4),
            1,
            TieRule::DstJoinsSrc,
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(b.labels(), &[0, 0, 2, 2]);
    }

    #[test]
    fn bridged_k4s_split_at_bridge() {
        let mut edges = clique_edges(&[0, 1, 2, 3]);
        edges.extend(clique_edges(&[4, 5, 6, 7]));
        edges.push((3, 4));
        let g = Graph::from_edges(8, edges.clone()).unwrap();
        let a = scoda_round(
            &g,
            &CommunityAssignment::singletons(8),
            3,
            TieRule::SrcJoinsDst,
            Execution::Sequential,
        )
        .unwrap();
        let oracle = reference_pass(8, &edges, 3);
        assert_same_partition(a.labels(), &oracle);
        assert_eq!(a.community_count(), 2);
        // bridge endpoints were over threshold when it arrived
        assert_eq!(a.counter_degree()[3], 4);
        assert_eq!(a.counter_degree()[4], 4);
    }

    fn assert_same_partition(a: &[u32], b: &[u32]) {
        assert_eq!(a.len(), b.len());
        for i in 0..a.len() {
            for j in 0..a.len() {
                assert_eq!(a[i] == a[j], b[i] == b[j], "nodes {i} and {j}: {a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn reference_agrees_on_random_streams() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.gen_range(2..40);
            let edges: Vec<(u32, u32)> = (0..rng.gen_range(1..120))
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                .filter(|(a, b)| a != b)
                .collect();
            if edges.is_empty() {
                continue;
            }
            let g = Graph::from_edges(n as usize, edges.clone()).unwrap();
            let t = rng.gen_range(1..6);
            let a = scoda_round(
                &g,
                &CommunityAssignment::singletons(n as usize),
                t,
                TieRule::SrcJoinsDst,
                Execution::Sequential,
            )
            .unwrap();
            assert_same_partition(a.labels(), &reference_pass(n as usize, &edges, t));
            assert!(a.labels().iter().all(|&l| a.labels()[l as usize] == l));
            assert!(a.counter_degree().iter().all(|&c| c <= t + 1));
        }
    }

    #[test]
    fn k5_collapses_in_first_round_at_mode_degree() {
        let g = Graph::from_edges(5, clique_edges(&[0, 1, 2, 3, 4])).unwrap();
        let stats = g.degree_stats().unwrap();
        let schedule = ThresholdSchedule::from_stats(&stats, ThresholdBase::ModeDegree, 10).unwrap();
        let a = detect_communities(&g, &schedule, &DetectOptions::default()).unwrap();
        assert_eq!(a.community_count(), 1);
        assert!(a.rounds_run() <= 2);
    }

    #[test]
    fn k5_with_base_two_and_path_first_stream() {
        // Hamiltonian path first, then the remaining chords.
        let mut edges = vec![(0, 1), (1, 2), (2, 3), (3, 4)];
        for e in clique_edges(&[0, 1, 2, 3, 4]) {
            if !edges.contains(&e) {
                edges.push(e);
            }
        }
        let g = Graph::from_edges(5, edges).unwrap();
        let schedule = ThresholdSchedule::new(2, 10).unwrap();
        let a = detect_communities(&g, &schedule, &DetectOptions::default()).unwrap();
        assert_eq!(a.community_count(), 1);
        assert!(a.rounds_run() <= 2);
    }

    #[test]
    fn k5_base_two_lexicographic_keeps_two_dense_parts() {
        // Round 1 saturates 0, 1 and 2 early and yields {0,1,2}, {3}, {4}.
        // Round 2 joins 3 and 4; after that both supernodes carry more mass
        // than the capped threshold and nothing moves.
        let g = Graph::from_edges(5, clique_edges(&[0, 1, 2, 3, 4])).unwrap();
        let a = detect_communities(&g, &ThresholdSchedule::new(2, 10).unwrap(), &DetectOptions::default())
            .unwrap();
        assert_eq!(a.history()[0], vec![1, 1, 1, 3, 4]);
        assert_eq!(a.labels(), &[1, 1, 1, 4, 4]);
        assert_eq!(a.community_count(), 2);
    }

    #[test]
    fn schedule_rules() {
        assert!(ThresholdSchedule::new(0, 3).is_err());
        assert!(ThresholdSchedule::new(3, 0).is_err());
        let s = ThresholdSchedule::new(1, 4).unwrap();
        assert_eq!(s.base(), 2);
        let t: Vec<u64> = (1..=4).map(|i| s.threshold(i)).collect();
        assert_eq!(t, vec![2, 4, 8, 16]);
        assert_eq!(ThresholdSchedule::new(1 << 40, 10).unwrap().threshold(10), u64::MAX);
    }

    #[test]
    fn average_degree_base_rounds_up() {
        let star = Graph::from_edges(6, (1..6).map(|v| (0, v))).unwrap();
        let stats = star.degree_stats().unwrap();
        let s = ThresholdSchedule::from_stats(&stats, ThresholdBase::AverageDegree, 2).unwrap();
        assert_eq!(s.base(), 2);
    }

    #[test]
    fn community_count_non_increasing_and_counters_bounded() {
        let p = crate::gen::planted_partition(12, 15, 0.4, 40, 9);
        let stats = p.graph.degree_stats().unwrap();
        for mode in [RoundMode::Contract, RoundMode::Restream] {
            let opts = DetectOptions {
                round_mode: mode,
                ..Default::default()
            };
            let schedule = ThresholdSchedule::new(stats.mode_degree as u64, 10).unwrap();
            let a = detect_communities(&p.graph, &schedule, &opts).unwrap();
            let counts: Vec<usize> = a.history().iter().map(|h| partition_count(h)).collect();
            assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{mode:?}: {counts:?}");
            let last_t = *a.thresholds().last().unwrap();
            assert!(a.counter_degree().iter().all(|&c| c <= last_t + 1));
            assert_eq!(a.labels(), a.history().last().unwrap().as_slice());
        }
    }

    #[test]
    fn single_chunk_parallel_equals_sequential() {
        let p = crate::gen::planted_cliques(4, 8, 4, 1);
        let schedule = ThresholdSchedule::new(7, 10).unwrap();
        let seq = detect_communities(&p.graph, &schedule, &DetectOptions::default()).unwrap();
        let par = detect_communities(
            &p.graph,
            &schedule,
            &DetectOptions {
                execution: Execution::Parallel { chunk: 1 << 20 },
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn sequential_is_deterministic() {
        let p = crate::gen::planted_partition(8, 20, 0.3, 30, 4);
        let schedule = ThresholdSchedule::new(4, 10).unwrap();
        let a = detect_communities(&p.graph, &schedule, &DetectOptions::default()).unwrap();
        let b = detect_communities(&p.graph, &schedule, &DetectOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tsv_has_round_columns() {
        let g = Graph::parse_str("10 20\n30 40\n").unwrap();
        let a = detect_communities(&g, &ThresholdSchedule::new(2, 3).unwrap(), &DetectOptions::default())
            .unwrap();
        let mut buf = Vec::new();
        a.write_tsv(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "node\tlabel\tround_1\tround_2");
        assert_eq!(lines.next().unwrap(), "10\t20\t20\t20");
    }

    #[test]
    fn from_labels_validates() {
        assert!(CommunityAssignment::from_labels(vec![0, 5]).is_err());
        assert_eq!(CommunityAssignment::from_labels(vec![1, 1]).unwrap().community_count(), 1);
    }
}
