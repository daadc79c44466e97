//! Simple undirected graphs, edge-list ingestion and preprocessing.
//!
//! Every [`Graph`] is simple: adjacency is symmetric, sorted, free of
//! duplicates and self-loops. Input edge lists are binarized (weights are
//! ignored), symmetrized and densified before a graph is built.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::prob::ProbMatrix;

/// Largest node count for which dense matrices are materialized.
pub const DEFAULT_DENSE_CAP: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
}

impl Graph {
    /// Graph on `n` isolated nodes.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    /// Builds a simple graph from an arbitrary edge iterator. Duplicates and
    /// self-loops are dropped and both orientations are implied.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n {
                return Err(Error::NodeOutOfRange { id: u, n });
            }
            if v >= n {
                return Err(Error::NodeOutOfRange { id: v, n });
            }
            if u == v {
                continue;
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        let m = adj.iter().map(Vec::len).sum::<usize>() / 2;
        let g = Graph { adj, m };
        debug_assert!(g.check_invariants());
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    /// Undirected edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Degree sequence `d = A·1`.
    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Symmetry, no self-loops, no duplicates and the handshake identity.
    pub fn check_invariants(&self) -> bool {
        let mut degree_sum = 0;
        for (u, list) in self.adj.iter().enumerate() {
            degree_sum += list.len();
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
            for &v in list {
                if v == u || v >= self.n() || !self.has_edge(v, u) {
                    return false;
                }
            }
        }
        degree_sum == 2 * self.m
    }

    /// Subgraph induced on `nodes`; node `nodes[k]` becomes `k`.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n()];
        for (k, &u) in nodes.iter().enumerate() {
            index[u] = k;
        }
        let mut adj = vec![Vec::new(); nodes.len()];
        for (k, &u) in nodes.iter().enumerate() {
            adj[k] = self.adj[u]
                .iter()
                .filter_map(|&v| (index[v] != usize::MAX).then_some(index[v]))
                .collect();
            adj[k].sort_unstable();
        }
        let m = adj.iter().map(Vec::len).sum::<usize>() / 2;
        Graph { adj, m }
    }

    /// Connected components, each sorted, ordered by their smallest node.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && self.connected_components().len() == 1
    }

    /// Serializes as a `# n=<n> m=<m>` header followed by sorted `u v` lines.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(16 * self.m + 32);
        let _ = writeln!(out, "# n={} m={}", self.n(), self.m);
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Binary adjacency as a probability matrix.
    pub fn to_dense(&self) -> Result<ProbMatrix> {
        self.to_dense_with_cap(DEFAULT_DENSE_CAP)
    }

    pub fn to_dense_with_cap(&self, cap: usize) -> Result<ProbMatrix> {
        if self.n() > cap {
            return Err(Error::Capacity { n: self.n(), cap });
        }
        Ok(ProbMatrix::from_graph(self))
    }
}

/// Bijection between original node ids and dense indices `0..n`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NodeIdMap {
    index: BTreeMap<u64, usize>,
    original: Vec<u64>,
}

impl NodeIdMap {
    /// Identity map on `0..n`.
    pub fn identity(n: usize) -> Self {
        Self::from_originals((0..n as u64).collect())
    }

    fn from_originals(original: Vec<u64>) -> Self {
        let index = original.iter().enumerate().map(|(k, &id)| (id, k)).collect();
        NodeIdMap { index, original }
    }

    pub fn len(&self) -> usize {
        self.original.len()
    }

    pub fn is_empty(&self) -> bool {
        self.original.is_empty()
    }

    pub fn dense(&self, original: u64) -> Option<usize> {
        self.index.get(&original).copied()
    }

    pub fn original(&self, dense: usize) -> u64 {
        self.original[dense]
    }

    pub fn originals(&self) -> &[u64] {
        &self.original
    }

    /// Map applied after `self`: the result sends ids of `self`'s domain
    /// straight to `next`'s dense indices.
    pub fn then(&self, next: &NodeIdMap) -> NodeIdMap {
        let original = next
            .original
            .iter()
            .map(|&mid| self.original[mid as usize])
            .collect();
        Self::from_originals(original)
    }

    /// Tab-separated `dense<TAB>original` lines.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("# dense\toriginal\n");
        for (k, id) in self.original.iter().enumerate() {
            let _ = writeln!(out, "{k}\t{id}");
        }
        out
    }
}

/// Parses a whitespace-separated edge list.
///
/// Lines starting with `#` or `%` are comments. A third column is treated
/// as a weight: zero-weight lines are skipped, any other weight becomes 1.
/// Original ids are densified in increasing order. A `# n=<n>` header (as
/// written by [`Graph::to_edge_list`]) switches to verbatim ids on `0..n`,
/// which keeps isolated nodes and allows edge-free graphs.
pub fn load_edge_list(text: &str) -> Result<(Graph, NodeIdMap)> {
    let mut header_n: Option<usize> = None;
    let mut raw = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if raw.is_empty() && header_n.is_none() {
                header_n = parse_header(rest);
            }
            continue;
        }
        if trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let u = parse_id(tokens.next(), line_no)?;
        let v = parse_id(tokens.next(), line_no)?;
        if let Some(w) = tokens.next() {
            let w: f64 = w.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid weight {w:?}"),
            })?;
            if w == 0.0 {
                continue;
            }
        }
        raw.push((u, v));
    }

    if let Some(n) = header_n {
        let edges = raw.into_iter().map(|(u, v)| (u as usize, v as usize));
        let g = Graph::from_edges(n, edges)?;
        return Ok((g, NodeIdMap::identity(n)));
    }

    let mut ids: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let map = NodeIdMap::from_originals(ids);
    let edges = raw.iter().map(|&(u, v)| (map.index[&u], map.index[&v]));
    let g = Graph::from_edges(map.len(), edges)?;
    if g.m() == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok((g, map))
}

fn parse_header(rest: &str) -> Option<usize> {
    rest.split_whitespace()
        .find_map(|tok| tok.strip_prefix("n="))
        .and_then(|v| v.parse().ok())
}

fn parse_id(token: Option<&str>, line: usize) -> Result<u64> {
    let token = token.ok_or_else(|| Error::Parse {
        line,
        msg: "expected two node ids".into(),
    })?;
    token.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid node id {token:?}"),
    })
}

/// Induced subgraph on the largest connected component. Ties go to the
/// component holding the smallest node id.
pub fn largest_connected_component(g: &Graph) -> (Graph, NodeIdMap) {
    let components = g.connected_components();
    // components are ordered by their minimum, so the first maximum wins ties
    let best = components
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.len().cmp(&b.len()).then(ib.cmp(ia)))
        .map(|(_, c)| c.clone())
        .unwrap_or_default();
    let sub = g.induced_subgraph(&best);
    let map = NodeIdMap::from_originals(best.iter().map(|&u| u as u64).collect());
    (sub, map)
}

/// Full ingestion pipeline: parse (binarize, symmetrize, drop self-loops),
/// then keep the largest connected component. The returned map goes from
/// the file's ids to the final dense indices.
pub fn preprocess(text: &str) -> Result<(Graph, NodeIdMap)> {
    let (g, map) = load_edge_list(text)?;
    let (lcc, lcc_map) = largest_connected_component(&g);
    Ok((lcc, map.then(&lcc_map)))
}
