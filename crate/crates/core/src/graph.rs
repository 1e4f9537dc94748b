//! Immutable undirected edge-list graph with dense node ids.
//!
//! Input is SNAP-style text: one edge per line as two integer tokens, with
//! `#` or `%` starting a comment line. External ids are remapped to dense
//! `0..node_count` ids in first-seen order. Self-loops are dropped, duplicate
//! edges are kept, and the stream order of the edges is preserved because the
//! streaming community detector is order dependent.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub type NodeId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    edges: Vec<(NodeId, NodeId)>,
    degree: Vec<u32>,
    external: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    /// Most frequent nonzero degree; ties go to the smaller degree.
    pub mode_degree: u32,
    pub average_degree: f64,
    pub max_degree: u32,
}

impl Graph {
    /// Builds a graph over dense ids `0..node_count`. Self-loops are dropped.
    pub fn from_edges(node_count: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        let mut degree = vec![0u32; node_count];
        let mut kept = Vec::new();
        for (src, dst) in edges {
            if src as usize >= node_count || dst as usize >= node_count {
                return Err(Error::EndpointOutOfRange { src, dst, node_count });
            }
            if src == dst {
                continue;
            }
            degree[src as usize] += 1;
            degree[dst as usize] += 1;
            kept.push((src, dst));
        }
        Ok(Graph {
            edges: kept,
            degree,
            external: (0..node_count as i64).collect(),
        })
    }

    /// Parses an edge list from any buffered reader.
    ///
    /// Only the first two tokens of a line are read, so SNAP files with extra
    /// columns (timestamps, signs) load as plain edge lists. An id that only
    /// ever appears in self-loops is not assigned a node.
    pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<Self> {
        let mut ids: HashMap<i64, NodeId> = HashMap::new();
        let mut external = Vec::new();
        let mut degree: Vec<u32> = Vec::new();
        let mut edges = Vec::new();

        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
                continue;
            }
            let mut tokens = trimmed.split_whitespace();
            let src = parse_token(tokens.next(), lineno, trimmed)?;
            let dst = parse_token(tokens.next(), lineno, trimmed)?;
            if src == dst {
                continue;
            }
            let mut intern = |ext: i64| -> NodeId {
                *ids.entry(ext).or_insert_with(|| {
                    external.push(ext);
                    degree.push(0);
                    (external.len() - 1) as NodeId
                })
            };
            let (s, d) = (intern(src), intern(dst));
            degree[s as usize] += 1;
            degree[d as usize] += 1;
            edges.push((s, d));
        }

        if edges.is_empty() {
            return Err(Error::NoEdges);
        }
        Ok(Graph { edges, degree, external })
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        Self::parse_edge_list(text.as_bytes())
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        let file = File::open(path)?;
        Self::parse_edge_list(BufReader::with_capacity(1 << 20, file))
    }

    /// Writes the edges back as text using the external ids.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for &(s, d) in &self.edges {
            writeln!(out, "{}\t{}", self.external[s as usize], self.external[d as usize])?;
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.degree.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degree
    }

    pub fn degree(&self, v: NodeId) -> u32 {
        self.degree[v as usize]
    }

    /// The id this node had in the input file.
    pub fn external_id(&self, v: NodeId) -> i64 {
        self.external[v as usize]
    }

    pub fn degree_stats(&self) -> Result<DegreeStats> {
        if self.edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let max_degree = self.degree.iter().copied().max().unwrap_or(0);
        let mut freq = vec![0usize; max_degree as usize + 1];
        for &d in &self.degree {
            freq[d as usize] += 1;
        }
        let mut mode_degree = 1;
        let mut best = 0;
        // strict > keeps the smallest degree on ties
        for (d, &count) in freq.iter().enumerate().skip(1) {
            if count > best {
                best = count;
                mode_degree = d as u32;
            }
        }
        Ok(DegreeStats {
            mode_degree,
            average_degree: 2.0 * self.edges.len() as f64 / self.node_count() as f64,
            max_degree,
        })
    }
}

fn parse_token(token: Option<&str>, line: usize, text: &str) -> Result<i64> {
    let token = token.ok_or_else(|| Error::Malformed {
        line,
        token: text.to_string(),
    })?;
    token.parse().map_err(|_| Error::Malformed {
        line,
        token: token.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_path() {
        let g = Graph::parse_str("1 2\n2 3").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g.degrees(), &[1, 2, 1]);
    }

    #[test]
    fn drops_self_loops() {
        let g = Graph::parse_str("5 5\n5 6").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edges(), &[(0, 1)]);
        assert_eq!(g.degrees(), &[1, 1]);
        assert_eq!(g.external_id(0), 5);
    }

    #[test]
    fn keeps_duplicates_and_skips_comments() {
        let g = Graph::parse_str("# header\n% other\n\n10 20\n20 10\n10\t20 1234\n").unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.degrees(), &[3, 3]);
    }

    #[test]
    fn malformed_reports_line() {
        match Graph::parse_str("1 2\n3 x\n") {
            Err(Error::Malformed { line, token }) => {
                assert_eq!(line, 2);
                assert_eq!(token, "x");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(Graph::parse_str("1 2\n3\n"), Err(Error::Malformed { line: 2, .. })));
    }

    #[test]
    fn empty_input_is_error() {
        assert!(matches!(Graph::parse_str(""), Err(Error::NoEdges)));
        assert!(matches!(Graph::parse_str("# nothing\n4 4\n"), Err(Error::NoEdges)));
    }

    #[test]
    fn mode_degree_examples() {
        let path = Graph::parse_str("1 2\n2 3").unwrap();
        assert_eq!(path.degree_stats().unwrap().mode_degree, 1);

        // degrees [3,3,2,2]: K4 minus one edge
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        assert_eq!(g.degrees(), &[3, 3, 2, 2]);
        assert_eq!(g.degree_stats().unwrap().mode_degree, 2);

        let star = Graph::from_edges(6, (1..6).map(|v| (0, v))).unwrap();
        let stats = star.degree_stats().unwrap();
        assert_eq!(stats.mode_degree, 1);
        assert_eq!(stats.max_degree, 5);
        assert!((stats.average_degree - 10.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn from_edges_checks_range() {
        assert!(matches!(
            Graph::from_edges(2, [(0, 2)]),
            Err(Error::EndpointOutOfRange { .. })
        ));
    }

    proptest! {
        #[test]
        fn roundtrip_and_degree_sum(edges in prop::collection::vec((-50i64..50, -50i64..50), 1..200)) {
            let text: String = edges.iter().map(|(a, b)| format!("{a} {b}\n")).collect();
            match Graph::parse_str(&text) {
                Ok(g) => {
                    let sum: u64 = g.degrees().iter().map(|&d| d as u64).sum();
                    prop_assert_eq!(sum, 2 * g.edge_count() as u64);
                    for &(s, d) in g.edges() {
                        prop_assert!((s as usize) < g.node_count() && (d as usize) < g.node_count());
                    }
                    // first-seen external id gets dense id 0
                    let first = edges.iter().find(|(a, b)| a != b).unwrap().0;
                    prop_assert_eq!(g.external_id(0), first);

                    let mut buf = Vec::new();
                    g.write_edge_list(&mut buf).unwrap();
                    let again = Graph::parse_edge_list(&buf[..]).unwrap();
                    prop_assert_eq!(again, g);
                }
                Err(Error::NoEdges) => prop_assert!(edges.iter().all(|(a, b)| a == b)),
                Err(e) => prop_assert!(false, "unexpected error {}", e),
            }
        }
    }
}
