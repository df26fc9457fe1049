//! Lovász number of an exclusivity graph.
//!
//! Solves `max ⟨W, X⟩` over `tr X = 1`, `X_ij = 0` on edges, `X ⪰ 0`, with
//! `W_ij = sqrt(w_i w_j)`. Small programs go through a primal-dual
//! interior-point method; larger ones, and any the interior-point pass fails
//! to certify, through ADMM (affine projection alternated with a PSD-cone
//! projection via Jacobi eigendecomposition). ADMM alone stalls on graphs
//! whose optimal face is degenerate, which is common when ϑ = α.
//!
//! Every answer is bracketed, whichever solver produced the iterates:
//!
//! * lower bounds: an iterate projected onto the affine constraints and
//!   shifted by its most negative eigenvalue, or a PSD iterate whose Gram
//!   vectors are orthogonalised across edges; both are feasible;
//! * upper bound: for any edge-supported symmetric `Y`, `ϑ ≤ λ_max(W + Y)`.
//!
//! The solve stops once `upper − lower ≤ tolerance`.

mod interior;
mod jacobi;
mod kcbs;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::to_f64;
use crate::graphs::ExclusivityGraph;
use crate::scenario::{Inequality, Scenario, ScenarioError};

pub use jacobi::{symmetric_eigen, SymmetricEigen};
pub use kcbs::{kcbs_realization_check, KcbsRealization};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThetaError {
    #[error("theta SDP did not converge in {iterations} iterations (best bounds [{lower}, {upper}])")]
    Convergence { lower: f64, upper: f64, iterations: usize },
    #[error("lovasz_theta: graph has {size} vertices, exceeding the SDP limit of {limit}")]
    Capacity { size: usize, limit: usize },
    #[error("lovasz_theta needs at least one vertex")]
    EmptyGraph,
    #[error("tolerance must be positive")]
    InvalidTolerance,
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Reserved for randomised initialisation; the solver currently starts
    /// from `I/n` and does not consume it.
    pub seed: u64,
    pub sdp_vertex_limit: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-7,
            max_iterations: 10_000,
            seed: 0,
            sdp_vertex_limit: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ThetaResult {
    /// Midpoint of `[lower, upper]`.
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// `upper − lower`; the true value lies within this of `value`.
    pub dual_gap: f64,
    /// Feasible matrix attaining `lower`.
    pub primal_matrix: DMatrix<f64>,
    pub iterations: usize,
}

const EIGEN_TOLERANCE: f64 = 1e-11;
const CHECK_EVERY: usize = 5;
const RHO_UPDATE_EVERY: usize = 20;
/// The interior-point Schur complement is dense in the constraint count.
const INTERIOR_CONSTRAINT_LIMIT: usize = 1500;
const INTERIOR_MAX_ITERATIONS: usize = 100;

pub fn lovasz_theta(g: &ExclusivityGraph, cfg: &SolverConfig) -> Result<ThetaResult, ThetaError> {
    if cfg.tolerance.is_nan() || cfg.tolerance <= 0.0 {
        return Err(ThetaError::InvalidTolerance);
    }
    let n = g.n();
    if n == 0 {
        return Err(ThetaError::EmptyGraph);
    }
    if n > cfg.sdp_vertex_limit {
        return Err(ThetaError::Capacity {
            size: n,
            limit: cfg.sdp_vertex_limit,
        });
    }

    let roots: Vec<f64> = g.weights().iter().map(|w| to_f64(w).sqrt()).collect();
    let scale = roots.iter().fold(0.0f64, |m, &r| m.max(r * r));
    if scale == 0.0 {
        return Ok(ThetaResult {
            value: 0.0,
            lower: 0.0,
            upper: 0.0,
            dual_gap: 0.0,
            primal_matrix: DMatrix::identity(n, n) / n as f64,
            iterations: 0,
        });
    }
    // Solve with weights normalised so the largest is 1.
    let w = DMatrix::from_fn(n, n, |i, j| roots[i] * roots[j] / scale);
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let problem = Problem {
        w,
        edges,
        tolerance: cfg.tolerance / scale,
    };

    let mut best = Bracket::new(n);
    let mut spent = 0;
    if problem.edges.len() < INTERIOR_CONSTRAINT_LIMIT {
        spent = interior::solve(&problem, cfg.max_iterations.min(INTERIOR_MAX_ITERATIONS), &mut best);
    }
    if !best.certified(problem.tolerance) {
        spent += admm(&problem, cfg.max_iterations.saturating_sub(spent), &mut best);
    }
    if best.certified(problem.tolerance) {
        let lower = best.lower * scale;
        let upper = best.upper * scale;
        Ok(ThetaResult {
            value: 0.5 * (lower + upper),
            lower,
            upper,
            dual_gap: upper - lower,
            primal_matrix: best.matrix,
            iterations: spent,
        })
    } else {
        Err(ThetaError::Convergence {
            lower: best.lower * scale,
            upper: best.upper * scale,
            iterations: cfg.max_iterations,
        })
    }
}

/// Weighted ϑ of the inequality's exclusivity graph, coefficients as weights.
pub fn qm_upper_bound(
    scenario: &Scenario,
    inequality: &Inequality,
    cfg: &SolverConfig,
) -> Result<ThetaResult, ThetaError> {
    let graph = inequality.weighted_graph(scenario)?;
    lovasz_theta(&graph, cfg)
}

/// The normalised SDP shared by both solvers.
struct Problem {
    w: DMatrix<f64>,
    edges: Vec<(usize, usize)>,
    tolerance: f64,
}

impl Problem {
    fn n(&self) -> usize {
        self.w.nrows()
    }

    /// Orthogonal projection onto `{tr X = 1, X_ij = 0 on edges}`.
    fn project_affine(&self, mut m: DMatrix<f64>) -> DMatrix<f64> {
        let n = self.n();
        m = (&m + m.transpose()) * 0.5;
        for &(i, j) in &self.edges {
            m[(i, j)] = 0.0;
            m[(j, i)] = 0.0;
        }
        let shift = (1.0 - m.trace()) / n as f64;
        for i in 0..n {
            m[(i, i)] += shift;
        }
        m
    }

    /// Projects onto the affine constraints, then shifts by the most negative
    /// eigenvalue and renormalises.
    fn shifted_lower(&self, x: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
        let n = self.n();
        let mut feasible = self.project_affine(x.clone());
        let shift = (-symmetric_eigen(&feasible, EIGEN_TOLERANCE).min()).max(0.0);
        for i in 0..n {
            feasible[(i, i)] += shift;
        }
        feasible /= 1.0 + n as f64 * shift;
        (self.w.component_mul(&feasible).sum(), feasible)
    }

    /// Factors a PSD matrix as the Gram matrix of vertex vectors and makes
    /// each vector orthogonal to the already repaired vectors of its
    /// lower-indexed neighbours. The new Gram matrix is PSD and exactly zero
    /// on edges.
    fn repaired_lower(&self, z: &DMatrix<f64>) -> Option<(f64, DMatrix<f64>)> {
        let n = self.n();
        let eig = symmetric_eigen(z, EIGEN_TOLERANCE);
        let cols: Vec<usize> = (0..n).filter(|&k| eig.values[k] > 0.0).collect();
        if cols.is_empty() {
            return None;
        }
        let mut vecs: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                cols.iter()
                    .map(|&k| eig.vectors[(i, k)] * eig.values[k].sqrt())
                    .collect()
            })
            .collect();
        let mut earlier: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(i, j) in &self.edges {
            earlier[i.max(j)].push(i.min(j));
        }
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        for i in 0..n {
            let mut basis: Vec<Vec<f64>> = Vec::new();
            for &j in &earlier[i] {
                let mut b = vecs[j].clone();
                for q in &basis {
                    let c = dot(&b, q);
                    b.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                }
                let norm = dot(&b, &b).sqrt();
                if norm > 1e-13 {
                    b.iter_mut().for_each(|x| *x /= norm);
                    basis.push(b);
                }
            }
            let mut v = std::mem::take(&mut vecs[i]);
            for q in &basis {
                let c = dot(&v, q);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
            vecs[i] = v;
        }
        let mut gram = DMatrix::from_fn(n, n, |i, j| dot(&vecs[i], &vecs[j]));
        for &(i, j) in &self.edges {
            gram[(i, j)] = 0.0;
            gram[(j, i)] = 0.0;
        }
        let trace = gram.trace();
        if trace.is_nan() || trace <= 0.0 {
            return None;
        }
        gram /= trace;
        Some((self.w.component_mul(&gram).sum(), gram))
    }

    /// `λ_max(W + Y)` for the edge-supported symmetric `Y` with `Y_ij = y(e)`.
    fn edge_multiplier_upper(&self, y: impl Fn(usize) -> f64) -> f64 {
        let mut m = self.w.clone();
        for (e, &(i, j)) in self.edges.iter().enumerate() {
            m[(i, j)] += y(e);
            m[(j, i)] += y(e);
        }
        symmetric_eigen(&m, EIGEN_TOLERANCE).max()
    }
}

/// Best certified bounds seen so far.
struct Bracket {
    lower: f64,
    upper: f64,
    matrix: DMatrix<f64>,
}

impl Bracket {
    fn new(n: usize) -> Self {
        Bracket {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
            matrix: DMatrix::identity(n, n) / n as f64,
        }
    }

    fn offer_lower(&mut self, candidate: Option<(f64, DMatrix<f64>)>) {
        if let Some((value, matrix)) = candidate {
            if value > self.lower {
                self.lower = value;
                self.matrix = matrix;
            }
        }
    }

    fn offer_upper(&mut self, value: f64) {
        self.upper = self.upper.min(value);
    }

    fn certified(&self, tolerance: f64) -> bool {
        self.upper - self.lower <= tolerance
    }
}

/// Runs ADMM for at most `budget` iterations; returns the iterations used.
fn admm(problem: &Problem, budget: usize, best: &mut Bracket) -> usize {
    let mut state = Admm::new(problem);
    for it in 1..=budget {
        state.step(problem);
        if it % RHO_UPDATE_EVERY == 0 {
            state.balance_penalty();
        }
        if it % CHECK_EVERY == 0 || it == budget {
            best.offer_lower(Some(problem.shifted_lower(&state.x)));
            best.offer_lower(problem.repaired_lower(&state.z));
            let rho = state.rho;
            let u = &state.u;
            best.offer_upper(problem.edge_multiplier_upper(|e| {
                let (i, j) = problem.edges[e];
                rho * 0.5 * (u[(i, j)] + u[(j, i)]) - problem.w[(i, j)]
            }));
            if best.certified(problem.tolerance) {
                return it;
            }
        }
    }
    budget
}

struct Admm {
    rho: f64,
    /// Affine-feasible iterate.
    x: DMatrix<f64>,
    /// PSD iterate.
    z: DMatrix<f64>,
    /// Scaled multiplier for `X = Z`.
    u: DMatrix<f64>,
    primal_residual: f64,
    dual_residual: f64,
}

impl Admm {
    fn new(problem: &Problem) -> Self {
        let n = problem.n();
        let start = DMatrix::identity(n, n) / n as f64;
        Admm {
            rho: 1.0,
            x: start.clone(),
            z: start,
            u: DMatrix::zeros(n, n),
            primal_residual: 0.0,
            dual_residual: 0.0,
        }
    }

    fn step(&mut self, problem: &Problem) {
        let target = &self.z - &self.u + &problem.w / self.rho;
        self.x = problem.project_affine(target);
        let eig = symmetric_eigen(&(&self.x + &self.u), EIGEN_TOLERANCE);
        let z_new = eig.reconstruct(|l| l.max(0.0));
        let diff = &self.x - &z_new;
        self.primal_residual = diff.norm();
        self.dual_residual = self.rho * (&z_new - &self.z).norm();
        self.u += diff;
        self.z = z_new;
    }

    fn balance_penalty(&mut self) {
        const MU: f64 = 10.0;
        if self.primal_residual > MU * self.dual_residual {
            self.rho *= 2.0;
            self.u /= 2.0;
        } else if self.dual_residual > MU * self.primal_residual {
            self.rho /= 2.0;
            self.u *= 2.0;
        }
    }
}
