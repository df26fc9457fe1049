//! Exact combinatorial invariants of exclusivity graphs.

mod cliques;
mod independent;
mod packing;
mod product;
pub mod simplex;

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::Rational;

pub use cliques::maximal_cliques;
pub use independent::{independence_number, IndependentSetResult};
pub use packing::{fractional_packing, PackingResult};
pub use product::{strong_product, two_copy_e_bound, TwoCopyBound};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("{operation}: graph has {size} vertices, exceeding the exact-solve limit of {limit}")]
    Capacity {
        operation: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("{0} requires an unweighted graph")]
    RequiresUnweighted(&'static str),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) is out of range for {2} vertices")]
    VertexOutOfRange(usize, usize, usize),
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("weight of vertex {0} is negative")]
    NegativeWeight(usize),
    #[error("vertex weights are too large to scale to a common integer denominator")]
    WeightOverflow,
}

pub type Result<T, E = GraphError> = std::result::Result<T, E>;

/// Vertex-count limits for the exact solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactLimits {
    pub unweighted_vertices: usize,
    pub weighted_vertices: usize,
    pub product_vertices: usize,
}

impl Default for ExactLimits {
    fn default() -> Self {
        ExactLimits {
            unweighted_vertices: 64,
            weighted_vertices: 50,
            product_vertices: 4096,
        }
    }
}

/// The bitmask solvers address vertices with `u64`.
pub(crate) const BITMASK_CAPACITY: usize = 64;

impl ExactLimits {
    pub(crate) fn check(&self, g: &ExclusivityGraph, operation: &'static str) -> Result<()> {
        let limit = if g.is_weighted() {
            self.weighted_vertices
        } else {
            self.unweighted_vertices
        }
        .min(BITMASK_CAPACITY);
        if g.n() > limit {
            return Err(GraphError::Capacity {
                operation,
                size: g.n(),
                limit,
            });
        }
        Ok(())
    }
}

/// Simple undirected graph on `0..n` with optional nonnegative rational
/// vertex weights (all 1 when absent).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusivityGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    #[serde(with = "opt_weights", default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<Rational>>,
}

mod opt_weights {
    use crate::exact::{serde_rational_vec, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(w: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
        match w {
            Some(w) => serde_rational_vec::serialize(w, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Rational>>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "serde_rational_vec")] Vec<Rational>);
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

impl ExclusivityGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange(u, v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(ExclusivityGraph {
            n,
            edges: set,
            weights: None,
        })
    }

    pub fn empty(n: usize) -> Self {
        Self::new(n, []).unwrap()
    }

    pub fn complete(n: usize) -> Self {
        Self::new(n, (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))).unwrap()
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    pub fn with_weights(mut self, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != self.n {
            return Err(GraphError::WeightCount {
                expected: self.n,
                got: weights.len(),
            });
        }
        if let Some(i) = weights.iter().position(|w| *w < Rational::zero()) {
            return Err(GraphError::NegativeWeight(i));
        }
        // All-ones weights are stored as unweighted so the unweighted limits apply.
        self.weights = if weights.iter().all(One::is_one) {
            None
        } else {
            Some(weights)
        };
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn weight(&self, v: usize) -> Rational {
        self.weights.as_ref().map_or_else(Rational::one, |w| w[v].clone())
    }

    pub fn weights(&self) -> Vec<Rational> {
        (0..self.n).map(|v| self.weight(v)).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|(a, b)| *a == v || *b == v).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn adjacency_matrix(&self) -> Vec<Vec<bool>> {
        let mut adj = vec![vec![false; self.n]; self.n];
        for &(u, v) in &self.edges {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        adj
    }

    /// Neighbourhood bitmasks; only meaningful for `n <= 64`.
    pub(crate) fn neighbor_masks(&self) -> Vec<u64> {
        debug_assert!(self.n <= BITMASK_CAPACITY);
        let mut masks = vec![0u64; self.n];
        for &(u, v) in &self.edges {
            masks[u] |= 1 << v;
            masks[v] |= 1 << u;
        }
        masks
    }

    pub fn is_independent(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &u)| vertices[i + 1..].iter().all(|&v| u != v && !self.has_edge(u, v)))
    }

    pub fn remove_edge(&self, u: usize, v: usize) -> Self {
        let mut g = self.clone();
        g.edges.remove(&(u.min(v), u.max(v)));
        g
    }

    /// Deletes vertex `v` and relabels the vertices above it down by one.
    pub fn remove_vertex(&self, v: usize) -> Self {
        let shift = |x: usize| if x > v { x - 1 } else { x };
        let edges = self
            .edges
            .iter()
            .filter(|(a, b)| *a != v && *b != v)
            .map(|&(a, b)| (shift(a), shift(b)));
        let mut g = Self::new(self.n - 1, edges).unwrap();
        if let Some(w) = &self.weights {
            let mut w = w.clone();
            w.remove(v);
            g.weights = Some(w);
        }
        g
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &ExclusivityGraph) -> Self {
        let off = self.n;
        let edges = self.edges().chain(other.edges().map(|(a, b)| (a + off, b + off)));
        let g = Self::new(self.n + other.n, edges).unwrap();
        if self.is_weighted() || other.is_weighted() {
            let mut w = self.weights();
            w.extend(other.weights());
            g.with_weights(w).unwrap()
        } else {
            g
        }
    }
}
