//! Infeasible primal-dual path following with the HKM search direction and a
//! Mehrotra predictor-corrector.
//!
//! Standard form: minimise `⟨C, X⟩` with `C = −W` subject to `⟨I, X⟩ = 1` and
//! `⟨A_e, X⟩ = 0` for `A_e = E_ij + E_ji` on every edge. The dual maximises
//! `y_0` subject to `S = C − y_0 I − Σ y_e A_e ⪰ 0`, so the edge components of
//! `y` feed the upper bound `λ_max(W + Σ y_e A_e)` directly.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, LU};

use super::{Bracket, Problem};

const STEP_FRACTION: f64 = 0.98;
const MIN_MU: f64 = 1e-16;
const CERTIFY_BELOW: f64 = 100.0;

/// Runs at most `budget` iterations; returns the iterations used.
pub(super) fn solve(problem: &Problem, budget: usize, best: &mut Bracket) -> usize {
    let n = problem.n();
    let m = problem.edges.len() + 1;
    let c = -&problem.w;
    let mut b = DVector::zeros(m);
    b[0] = 1.0;

    let mut x = DMatrix::identity(n, n) / n as f64;
    let mut y = DVector::zeros(m);
    y[0] = -(problem.w.norm() + 1.0);
    let mut s = &c - adjoint(problem, &y);

    let certify = |x: &DMatrix<f64>, y: &DVector<f64>, best: &mut Bracket| {
        best.offer_lower(Some(problem.shifted_lower(x)));
        best.offer_lower(problem.repaired_lower(x));
        best.offer_upper(problem.edge_multiplier_upper(|e| y[e + 1]));
        best.certified(problem.tolerance)
    };

    for it in 1..=budget {
        let mu = x.dot(&s) / n as f64;
        let Some(newton) = Newton::new(problem, &x, &s).filter(|_| mu > MIN_MU) else {
            certify(&x, &y, best);
            return it - 1;
        };
        let rp = &b - apply(problem, &x);
        let rd = &c - adjoint(problem, &y) - &s;

        let none = DMatrix::zeros(n, n);
        let Some((dxa, _, dsa)) = newton.direction(problem, &x, &rp, &rd, &none) else {
            certify(&x, &y, best);
            return it - 1;
        };
        let ap = max_step(&x, &dxa).min(1.0);
        let ad = max_step(&s, &dsa).min(1.0);
        let mu_aff = (&x + &dxa * ap).dot(&(&s + &dsa * ad)) / n as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let target = DMatrix::identity(n, n) * (sigma * mu) - &dxa * &dsa;
        let Some((dx, dy, ds)) = newton.direction(problem, &x, &rp, &rd, &target) else {
            certify(&x, &y, best);
            return it - 1;
        };
        let ap = (STEP_FRACTION * max_step(&x, &dx)).min(1.0);
        let ad = (STEP_FRACTION * max_step(&s, &ds)).min(1.0);
        x += dx * ap;
        x = (&x + x.transpose()) * 0.5;
        y += dy * ad;
        s += ds * ad;
        s = (&s + s.transpose()) * 0.5;

        // The certificates cost several eigendecompositions; skip them
        // while the duality gap is far from the tolerance.
        let near = x.dot(&s) <= CERTIFY_BELOW * problem.tolerance;
        if (near || it == budget) && certify(&x, &y, best) {
            return it;
        }
    }
    budget
}

/// `A(Y)`: the trace, then `Y_ij + Y_ji` per edge. `Y` need not be symmetric.
fn apply(problem: &Problem, m: &DMatrix<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(problem.edges.len() + 1);
    out[0] = m.trace();
    for (e, &(i, j)) in problem.edges.iter().enumerate() {
        out[e + 1] = m[(i, j)] + m[(j, i)];
    }
    out
}

fn adjoint(problem: &Problem, y: &DVector<f64>) -> DMatrix<f64> {
    let n = problem.n();
    let mut out = DMatrix::identity(n, n) * y[0];
    for (e, &(i, j)) in problem.edges.iter().enumerate() {
        out[(i, j)] += y[e + 1];
        out[(j, i)] += y[e + 1];
    }
    out
}

/// Factorised Newton system at the current point.
struct Newton {
    s_inv: DMatrix<f64>,
    schur: Schur,
}

/// The Schur complement is positive definite in exact arithmetic, but near
/// the optimum of a degenerate program rounding can defeat Cholesky.
enum Schur {
    Cholesky(Cholesky<f64, Dyn>),
    Lu(LU<f64, Dyn, Dyn>),
}

impl Schur {
    fn factor(m: DMatrix<f64>) -> Self {
        match m.clone().cholesky() {
            Some(c) => Schur::Cholesky(c),
            None => Schur::Lu(m.lu()),
        }
    }

    fn solve(&self, rhs: &DVector<f64>) -> Option<DVector<f64>> {
        match self {
            Schur::Cholesky(c) => Some(c.solve(rhs)),
            Schur::Lu(lu) => lu.solve(rhs),
        }
    }
}

impl Newton {
    fn new(problem: &Problem, x: &DMatrix<f64>, s: &DMatrix<f64>) -> Option<Self> {
        let s_inv = s.clone().cholesky()?.inverse();
        let g = &s_inv;
        let p = g * x;
        let m = problem.edges.len() + 1;
        let mut schur = DMatrix::zeros(m, m);
        schur[(0, 0)] = p.trace();
        for (e, &(a, b)) in problem.edges.iter().enumerate() {
            let v = p[(a, b)] + p[(b, a)];
            schur[(0, e + 1)] = v;
            schur[(e + 1, 0)] = v;
            for (f, &(c, d)) in problem.edges.iter().enumerate().skip(e) {
                let v = x[(b, c)] * g[(d, a)] + x[(b, d)] * g[(c, a)] + x[(a, c)] * g[(d, b)] + x[(a, d)] * g[(c, b)];
                schur[(e + 1, f + 1)] = v;
                schur[(f + 1, e + 1)] = v;
            }
        }
        Some(Newton {
            s_inv,
            schur: Schur::factor(schur),
        })
    }

    /// Solves for the step whose complementarity target is
    /// `XS + ΔX S + X ΔS = target`.
    fn direction(
        &self,
        problem: &Problem,
        x: &DMatrix<f64>,
        rp: &DVector<f64>,
        rd: &DMatrix<f64>,
        target: &DMatrix<f64>,
    ) -> Option<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
        let g = &self.s_inv;
        let kg = target * g;
        let rhs = rp - apply(problem, &kg) + apply(problem, x) + apply(problem, &(x * rd * g));
        let dy = self.schur.solve(&rhs)?;
        if dy.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let ds = rd - adjoint(problem, &dy);
        let dx = kg - x - x * &ds * g;
        let dx = (&dx + dx.transpose()) * 0.5;
        Some((dx, dy, ds))
    }
}

/// Largest `α` with `base + α·step ⪰ 0`, from the spectrum of
/// `L⁻¹ step L⁻ᵀ` where `base = L Lᵀ`. Only a step length, so the faster
/// QR-based eigenvalues suffice here.
fn max_step(base: &DMatrix<f64>, step: &DMatrix<f64>) -> f64 {
    let Some(chol) = base.clone().cholesky() else {
        return 0.0;
    };
    let l = chol.l();
    let Some(half) = l.solve_lower_triangular(step) else {
        return 0.0;
    };
    let Some(whole) = l.solve_lower_triangular(&half.transpose()) else {
        return 0.0;
    };
    let whole = (&whole + whole.transpose()) * 0.5;
    let lowest = whole.symmetric_eigenvalues().min();
    if lowest >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lowest
    }
}
