use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::FormationError;

/// Undirected sensing topology over `n` agents.
///
/// Agents are indexed from zero. Edges are stored once, as `(i, j)` with `i < j`,
/// in lexicographic order, so two graphs with the same edge set compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct SensingGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawGraph> for SensingGraph {
    type Error = FormationError;

    fn try_from(raw: RawGraph) -> Result<Self, Self::Error> {
        Self::new(raw.n, raw.edges)
    }
}

impl From<SensingGraph> for RawGraph {
    fn from(g: SensingGraph) -> Self {
        RawGraph { n: g.n, edges: g.edges }
    }
}

impl SensingGraph {
    /// Builds a graph from an edge list. Each unordered pair may appear at most once.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, FormationError> {
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(FormationError::EdgeOutOfRange { i, j, n });
            }
            if i == j {
                return Err(FormationError::SelfLoop(i));
            }
            let e = (i.min(j), i.max(j));
            if !set.insert(e) {
                return Err(FormationError::DuplicateEdge(e.0, e.1));
            }
        }
        Ok(Self::from_sorted(n, set.into_iter().collect()))
    }

    fn from_sorted(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in &edges {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Self { n, edges, adjacency }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Self::from_sorted(n, edges)
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<_> = (0..n).map(|i| {
            let j = (i + 1) % n;
            (i.min(j), i.max(j))
        }).collect();
        edges.sort_unstable();
        edges.dedup();
        Self::from_sorted(n, edges)
    }

    pub fn path(n: usize) -> Self {
        Self::from_sorted(n, (1..n).map(|j| (j - 1, j)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency.get(i).is_some_and(|n| n.binary_search(&j).is_ok())
    }

    /// Position of edge `{i, j}` in [`Self::edges`].
    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        self.edges.binary_search(&(i.min(j), i.max(j))).ok()
    }

    fn components(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }
}

/// Connectivity summary of a sensing graph. Universal rigidity is not certified here;
/// a graph that cannot support a stabilizing gain matrix is reported by the gain solver.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphReport {
    pub n: usize,
    pub edge_count: usize,
    pub degrees: Vec<usize>,
    pub min_degree: usize,
    pub components: usize,
    pub connected: bool,
}

pub fn validate_graph(g: &SensingGraph) -> Result<GraphReport, FormationError> {
    if g.n < 3 {
        return Err(FormationError::TooFewAgents(g.n));
    }
    let degrees: Vec<usize> = (0..g.n).map(|i| g.degree(i)).collect();
    let components = g.components();
    Ok(GraphReport {
        n: g.n,
        edge_count: g.edge_count(),
        min_degree: degrees.iter().copied().min().unwrap_or(0),
        degrees,
        components,
        connected: components == 1,
    })
}
