use serde::{Deserialize, Serialize};

use super::{independence_number, ExactLimits, ExclusivityGraph, GraphError, IndependentSetResult, Result};
use crate::exact::to_f64;

/// Strong product `g ⊠ h`. Vertex `(u, v)` is numbered `u * h.n() + v`;
/// distinct pairs are adjacent when each coordinate is equal or adjacent.
pub fn strong_product(g: &ExclusivityGraph, h: &ExclusivityGraph, limits: &ExactLimits) -> Result<ExclusivityGraph> {
    if g.is_weighted() || h.is_weighted() {
        return Err(GraphError::RequiresUnweighted("strong_product"));
    }
    let size = g.n() * h.n();
    if size > limits.product_vertices {
        return Err(GraphError::Capacity {
            operation: "strong_product",
            size,
            limit: limits.product_vertices,
        });
    }
    let ga = g.adjacency_matrix();
    let ha = h.adjacency_matrix();
    let hn = h.n();
    let mut edges = Vec::new();
    for a in 0..size {
        let (u1, v1) = (a / hn, a % hn);
        for b in (a + 1)..size {
            let (u2, v2) = (b / hn, b % hn);
            if (u1 == u2 || ga[u1][u2]) && (v1 == v2 || ha[v1][v2]) {
                edges.push((a, b));
            }
        }
    }
    ExclusivityGraph::new(size, edges)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoCopyBound {
    /// `sqrt(α(G ⊠ G))`.
    pub value: f64,
    pub product_independence: IndependentSetResult,
}

/// Per-copy bound from applying the exclusivity principle to two
/// independent copies of the inequality.
pub fn two_copy_e_bound(g: &ExclusivityGraph, limits: &ExactLimits) -> Result<TwoCopyBound> {
    if g.is_weighted() {
        return Err(GraphError::RequiresUnweighted("two_copy_e_bound"));
    }
    let product = strong_product(g, g, limits)?;
    let alpha = independence_number(&product, limits)?;
    Ok(TwoCopyBound {
        value: to_f64(&alpha.value).sqrt(),
        product_independence: alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn product_with_single_vertex_is_identity() {
        let c5 = ExclusivityGraph::cycle(5);
        let p = strong_product(&c5, &ExclusivityGraph::empty(1), &ExactLimits::default()).unwrap();
        assert_eq!(p, c5);
    }

    #[test]
    fn k2_times_k2_is_k4() {
        let k2 = ExclusivityGraph::complete(2);
        let p = strong_product(&k2, &k2, &ExactLimits::default()).unwrap();
        assert_eq!(p, ExclusivityGraph::complete(4));
    }

    #[test]
    fn pentagon_square_is_eight_regular() {
        let c5 = ExclusivityGraph::cycle(5);
        let p = strong_product(&c5, &c5, &ExactLimits::default()).unwrap();
        assert_eq!(p.n(), 25);
        assert_eq!(p.edge_count(), 100);
        assert!(p.degrees().iter().all(|&d| d == 8));
    }

    #[test]
    fn two_copy_bounds() {
        let limits = ExactLimits::default();
        let c5 = two_copy_e_bound(&ExclusivityGraph::cycle(5), &limits).unwrap();
        assert_eq!(c5.product_independence.value, int(5));
        assert!((c5.value - 5f64.sqrt()).abs() < 1e-12);
        assert_eq!(
            two_copy_e_bound(&ExclusivityGraph::complete(3), &limits).unwrap().value,
            1.0
        );
        assert_eq!(
            two_copy_e_bound(&ExclusivityGraph::empty(4), &limits).unwrap().value,
            4.0
        );
    }

    #[test]
    fn product_limits() {
        let limits = ExactLimits {
            product_vertices: 20,
            ..ExactLimits::default()
        };
        let c5 = ExclusivityGraph::cycle(5);
        assert_eq!(
            strong_product(&c5, &c5, &limits).unwrap_err(),
            GraphError::Capacity {
                operation: "strong_product",
                size: 25,
                limit: 20
            }
        );
        let weighted = c5.clone().with_weights(vec![int(2); 5]).unwrap();
        assert_eq!(
            strong_product(&weighted, &c5, &ExactLimits::default()).unwrap_err(),
            GraphError::RequiresUnweighted("strong_product")
        );
    }
}
