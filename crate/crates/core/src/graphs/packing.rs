use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::simplex::{maximize, LpOutcome};
use super::{maximal_cliques, ExactLimits, ExclusivityGraph, Result};
use crate::exact::Rational;

/// Optimum of the clique-constrained probability assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingResult {
    #[serde(with = "crate::exact::serde_rational")]
    pub value: Rational,
    #[serde(with = "crate::exact::serde_rational_vec")]
    pub vertex_probabilities: Vec<Rational>,
    pub cliques: Vec<Vec<usize>>,
    /// Optimal clique multipliers; `Σ dual = value` certifies optimality.
    #[serde(with = "crate::exact::serde_rational_vec")]
    pub clique_duals: Vec<Rational>,
}

/// Exact LP `max Σ w_i p_i` subject to `p >= 0` and `Σ_{i∈Q} p_i <= 1` for
/// every maximal clique `Q`: the most a single copy of the inequality can
/// reach when every set of pairwise exclusive events has total probability
/// at most one.
pub fn fractional_packing(g: &ExclusivityGraph, limits: &ExactLimits) -> Result<PackingResult> {
    let cliques = maximal_cliques(g, limits)?;
    let n = g.n();
    let rows: Vec<Vec<Rational>> = cliques
        .iter()
        .map(|q| {
            let mut row = vec![Rational::zero(); n];
            for &v in q {
                row[v] = Rational::one();
            }
            row
        })
        .collect();
    let rhs = vec![Rational::one(); rows.len()];
    let LpOutcome::Optimal(sol) = maximize(&g.weights(), &rows, &rhs) else {
        unreachable!("every vertex lies in a clique row, so the LP is bounded");
    };
    debug_assert!(rows
        .iter()
        .all(|row| row.iter().zip(&sol.primal).map(|(a, p)| a * p).sum::<Rational>() <= Rational::one()));
    Ok(PackingResult {
        value: sol.value,
        vertex_probabilities: sol.primal,
        cliques,
        clique_duals: sol.dual,
    })
}
