use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::{ExactLimits, ExclusivityGraph, GraphError, Result};
use crate::exact::Rational;

/// Maximum-weight independent set with a deterministic witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependentSetResult {
    #[serde(with = "crate::exact::serde_rational")]
    pub value: Rational,
    /// Sorted vertex indices.
    pub witness: Vec<usize>,
}

/// Exact (weighted) independence number by branch and bound.
///
/// Branching follows descending degree (ties by index) and prunes with a
/// greedy clique cover: an independent set meets each clique at most once,
/// so the sum of per-clique maximum weights bounds what is left. Among
/// optimal sets the witness prefers lower vertex indices: scanning `0..n`,
/// a vertex is kept whenever an optimum containing it and the vertices kept
/// so far still exists.
pub fn independence_number(g: &ExclusivityGraph, limits: &ExactLimits) -> Result<IndependentSetResult> {
    limits.check(g, "independence_number")?;
    let (scaled, denom) = integer_weights(g)?;
    let solver = Solver::new(g, &scaled);

    let all = solver.full_mask();
    let optimum = solver.max_weight(all);

    let mut target = optimum;
    let mut remaining = all;
    let mut witness = Vec::new();
    for v in 0..g.n() {
        let k = solver.pos[v];
        let bit = 1u64 << k;
        let after = remaining & solver.later[v];
        if remaining & bit == 0 {
            remaining = after;
            continue;
        }
        let rest = after & !solver.nbr[k];
        let w = solver.weights[k];
        if w <= target && solver.reaches(rest, target - w) {
            witness.push(v);
            target -= w;
            remaining = rest;
        } else {
            remaining = after;
        }
    }
    debug_assert_eq!(target, 0);
    debug_assert!(g.is_independent(&witness), "witness {witness:?} is not independent");

    let value = Rational::new(BigInt::from(optimum), denom);
    debug_assert_eq!(
        witness.iter().map(|&v| g.weight(v)).sum::<Rational>(),
        value,
        "witness weight disagrees with the optimum"
    );
    Ok(IndependentSetResult { value, witness })
}

/// Scales rational weights to integers over their common denominator.
fn integer_weights(g: &ExclusivityGraph) -> Result<(Vec<u64>, BigInt)> {
    let weights = g.weights();
    let denom = weights.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let scaled = weights
        .iter()
        .map(|w| (w.numer() * (&denom / w.denom())).to_u64())
        .collect::<Option<Vec<_>>>()
        .ok_or(GraphError::WeightOverflow)?;
    Ok((scaled, denom))
}

struct Solver {
    /// Position of each original vertex in branching order.
    pos: Vec<usize>,
    /// Neighbour masks indexed by position.
    nbr: Vec<u64>,
    /// Weights indexed by position.
    weights: Vec<u128>,
    /// For each original vertex `v`, the positions of vertices with index > v.
    later: Vec<u64>,
    n: usize,
}

impl Solver {
    fn new(g: &ExclusivityGraph, scaled: &[u64]) -> Self {
        let n = g.n();
        let deg = g.degrees();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(deg[v]), v));
        let mut pos = vec![0; n];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        let orig = g.neighbor_masks();
        let nbr = order
            .iter()
            .map(|&v| {
                let mut m = 0u64;
                let mut bits = orig[v];
                while bits != 0 {
                    let u = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    m |= 1 << pos[u];
                }
                m
            })
            .collect();
        let weights = order.iter().map(|&v| scaled[v] as u128).collect();
        let later = (0..n)
            .map(|v| ((v + 1)..n).fold(0u64, |m, u| m | (1 << pos[u])))
            .collect();
        Solver {
            pos,
            nbr,
            weights,
            later,
            n,
        }
    }

    fn full_mask(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    fn max_weight(&self, candidates: u64) -> u128 {
        let mut best = 0;
        self.expand(candidates, 0, &mut best, None);
        best
    }

    /// Whether some independent subset of `candidates` weighs at least `goal`.
    fn reaches(&self, candidates: u64, goal: u128) -> bool {
        if goal == 0 {
            return true;
        }
        let mut best = goal - 1;
        self.expand(candidates, 0, &mut best, Some(goal))
    }

    /// Returns true once `stop_at` has been reached.
    fn expand(&self, p: u64, current: u128, best: &mut u128, stop_at: Option<u128>) -> bool {
        if current > *best {
            *best = current;
            if stop_at.is_some_and(|goal| current >= goal) {
                return true;
            }
        }
        if p == 0 || current + self.cover_bound(p) <= *best {
            return false;
        }
        let k = p.trailing_zeros() as usize;
        let bit = 1u64 << k;
        if self.expand(p & !bit & !self.nbr[k], current + self.weights[k], best, stop_at) {
            return true;
        }
        self.expand(p & !bit, current, best, stop_at)
    }

    /// Greedy partition of `p` into cliques; sum of each clique's heaviest vertex.
    fn cover_bound(&self, p: u64) -> u128 {
        let mut classes: Vec<(u64, u128)> = Vec::new();
        let mut bits = p;
        while bits != 0 {
            let k = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let w = self.weights[k];
            match classes.iter_mut().find(|(mask, _)| mask & !self.nbr[k] == 0) {
                Some((mask, max)) => {
                    *mask |= 1 << k;
                    *max = (*max).max(w);
                }
                None => classes.push((1 << k, w)),
            }
        }
        classes.iter().map(|(_, w)| w).sum()
    }
}
