use nalgebra::{DMatrix, Matrix2};

use crate::formation::{SensingGraph, Vec2};

use super::GainError;

/// `[[a, b], [-b, a]]`.
pub fn gain_block(a: f64, b: f64) -> Matrix2<f64> {
    Matrix2::new(a, b, -b, a)
}

/// Gain pair of one undirected edge, stored for the orientation `i < j`.
/// The reverse block uses `(a, -b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeGain {
    pub i: usize,
    pub j: usize,
    pub a: f64,
    pub b: f64,
}

/// Symmetric block-Laplacian gain matrix over a sensing graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMatrix {
    graph: SensingGraph,
    params: Vec<(f64, f64)>,
    dense: DMatrix<f64>,
}

impl GainMatrix {
    /// `params[e]` is `(a, b)` for `graph.edges()[e]`.
    pub fn new(graph: SensingGraph, params: Vec<(f64, f64)>) -> Result<Self, GainError> {
        if params.len() != graph.edge_count() {
            return Err(GainError::DimensionMismatch { expected: graph.edge_count(), got: params.len() });
        }
        if params.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(GainError::NonFinite);
        }
        let dense = assemble(&graph, &params);
        Ok(Self { graph, params, dense })
    }

    pub fn from_edge_gains(n: usize, gains: &[EdgeGain]) -> Result<Self, GainError> {
        let graph = SensingGraph::new(n, gains.iter().map(|g| (g.i, g.j)))?;
        let mut params = vec![(0.0, 0.0); graph.edge_count()];
        for g in gains {
            let e = graph.edge_index(g.i, g.j).expect("edge was just inserted");
            params[e] = if g.i < g.j { (g.a, g.b) } else { (g.a, -g.b) };
        }
        Self::new(graph, params)
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn graph(&self) -> &SensingGraph {
        &self.graph
    }

    pub fn params(&self) -> &[(f64, f64)] {
        &self.params
    }

    pub fn edge_gains(&self) -> Vec<EdgeGain> {
        self.graph
            .edges()
            .iter()
            .zip(&self.params)
            .map(|(&(i, j), &(a, b))| EdgeGain { i, j, a, b })
            .collect()
    }

    pub fn dense(&self) -> &DMatrix<f64> {
        &self.dense
    }

    /// `(a_ij, b_ij)` for the ordered pair, if `{i, j}` is an edge.
    pub fn pair(&self, i: usize, j: usize) -> Option<(f64, f64)> {
        let e = self.graph.edge_index(i, j)?;
        let (a, b) = self.params[e];
        Some(if i < j { (a, b) } else { (a, -b) })
    }

    pub fn block(&self, i: usize, j: usize) -> Option<Matrix2<f64>> {
        self.pair(i, j).map(|(a, b)| gain_block(a, b))
    }

    /// Off-diagonal blocks of row `i`, ordered by neighbor index.
    pub fn block_row(&self, i: usize) -> Vec<(usize, Matrix2<f64>)> {
        self.graph
            .neighbors(i)
            .iter()
            .map(|&j| (j, self.block(i, j).expect("neighbor has a block")))
            .collect()
    }

    /// `Σ_j A_ij (q_j - q_i)` for agent `i` from the stacked configuration.
    pub fn consensus_term(&self, i: usize, q: &[f64]) -> Vec2 {
        let qi = Vec2::new(q[2 * i], q[2 * i + 1]);
        self.block_row(i)
            .iter()
            .map(|(j, blk)| blk * (Vec2::new(q[2 * j], q[2 * j + 1]) - qi))
            .sum()
    }

    /// Largest absolute entry-wise asymmetry `max |A - Aᵀ|`.
    pub fn asymmetry(&self) -> f64 {
        (&self.dense - self.dense.transpose()).amax()
    }

    /// `trace(A) = -4 Σ_e a_e`.
    pub fn trace(&self) -> f64 {
        self.dense.trace()
    }
}

fn assemble(graph: &SensingGraph, params: &[(f64, f64)]) -> DMatrix<f64> {
    let n = graph.n();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let mut diag = Matrix2::zeros();
        for &j in graph.neighbors(i) {
            let e = graph.edge_index(i, j).expect("neighbor implies edge");
            let (a, b) = params[e];
            let blk = if i < j { gain_block(a, b) } else { gain_block(a, -b) };
            m.fixed_view_mut::<2, 2>(2 * i, 2 * j).copy_from(&blk);
            diag -= blk;
        }
        m.fixed_view_mut::<2, 2>(2 * i, 2 * i).copy_from(&diag);
    }
    m
}
