//! Brute-force oracles kept independent of the library's solvers.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ncbounds::ExclusivityGraph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> ExclusivityGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(density) {
                edges.push((i, j));
            }
        }
    }
    ExclusivityGraph::new(n, edges).unwrap()
}

pub fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<BigRational> {
    (0..n)
        .map(|_| BigRational::new(rng.random_range(0..6i64).into(), rng.random_range(1..4i64).into()))
        .collect()
}

fn adjacency_masks(g: &ExclusivityGraph) -> Vec<u64> {
    let mut m = vec![0u64; g.n()];
    for (a, b) in g.edges() {
        m[a] |= 1 << b;
        m[b] |= 1 << a;
    }
    m
}

/// Exhaustive subset scan. Returns the maximum weight and, among optimal
/// sets, the one that includes the lowest differing vertex.
pub fn brute_force_independence(g: &ExclusivityGraph) -> (BigRational, Vec<usize>) {
    let n = g.n();
    assert!(n <= 20, "brute force is exponential");
    let adj = adjacency_masks(g);
    let weights = g.weights();
    let mut best = BigRational::zero();
    let mut best_mask = 0u64;
    for mask in 0u64..(1 << n) {
        let independent = (0..n).all(|v| mask & (1 << v) == 0 || adj[v] & mask == 0);
        if !independent {
            continue;
        }
        let w: BigRational = (0..n)
            .filter(|v| mask & (1 << v) != 0)
            .map(|v| weights[v].clone())
            .sum();
        let prefer = mask.reverse_bits() > best_mask.reverse_bits();
        if w > best || (w == best && prefer) {
            best = w;
            best_mask = mask;
        }
    }
    (best, (0..n).filter(|v| best_mask & (1 << v) != 0).collect())
}

/// Largest independent set size by enumerating every independent set
/// (plain backtracking, no bounds). Usable beyond 20 vertices when the
/// graph is dense enough.
pub fn enumerate_independent_sets(g: &ExclusivityGraph) -> (usize, usize) {
    let adj = g.adjacency_matrix();
    let n = g.n();
    let mut count = 0usize;
    let mut best = 0usize;
    let mut chosen = Vec::new();
    fn rec(v: usize, n: usize, adj: &[Vec<bool>], chosen: &mut Vec<usize>, count: &mut usize, best: &mut usize) {
        if v == n {
            *count += 1;
            *best = (*best).max(chosen.len());
            return;
        }
        rec(v + 1, n, adj, chosen, count, best);
        if chosen.iter().all(|&u| !adj[u][v]) {
            chosen.push(v);
            rec(v + 1, n, adj, chosen, count, best);
            chosen.pop();
        }
    }
    rec(0, n, &adj, &mut chosen, &mut count, &mut best);
    (best, count)
}

pub fn brute_force_maximal_cliques(g: &ExclusivityGraph) -> Vec<Vec<usize>> {
    let n = g.n();
    let adj = adjacency_masks(g);
    let is_clique = |m: u64| (0..n).all(|v| m & (1 << v) == 0 || (m & !(1 << v)) & !adj[v] == 0);
    let mut out: Vec<Vec<usize>> = (1u64..(1 << n))
        .filter(|&m| is_clique(m) && (0..n).all(|v| m & (1 << v) != 0 || !is_clique(m | (1 << v))))
        .map(|m| (0..n).filter(|v| m & (1 << v) != 0).collect())
        .collect();
    out.sort();
    out
}

/// Permanent as the sum over all permutations.
pub fn naive_permanent(m: &DMatrix<Complex64>) -> Complex64 {
    let n = m.nrows();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = Complex64::zero();
    fn rec(k: usize, perm: &mut Vec<usize>, m: &DMatrix<Complex64>, total: &mut Complex64) {
        let n = perm.len();
        if k == n {
            *total += (0..n).map(|i| m[(i, perm[i])]).product::<Complex64>();
            return;
        }
        for i in k..n {
            perm.swap(k, i);
            rec(k + 1, perm, m, total);
            perm.swap(k, i);
        }
    }
    rec(0, &mut perm, m, &mut total);
    total
}

pub fn random_complex_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// Haar-ish random unitary from QR of a random complex matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, m: usize) -> DMatrix<Complex64> {
    let a = random_complex_matrix(rng, m, m);
    a.qr().q()
}

/// Output distribution by expanding the creation-operator product: every
/// photon independently picks an output mode, weighted by the matrix entry;
/// sequences are bucketed by their occupation pattern.
pub fn symmetrized_state_distribution(input: &[u32], u: &DMatrix<Complex64>) -> Vec<(Vec<u32>, f64)> {
    let m = input.len();
    let ins: Vec<usize> = input
        .iter()
        .enumerate()
        .flat_map(|(mode, &k)| std::iter::repeat_n(mode, k as usize))
        .collect();
    let photons = ins.len();
    let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
    let input_norm: f64 = input.iter().map(|&k| fact(k)).product::<f64>().sqrt();

    let mut buckets: std::collections::BTreeMap<Vec<u32>, Complex64> = Default::default();
    let total = m.pow(photons as u32);
    for code in 0..total {
        let mut c = code;
        let mut occupation = vec![0u32; m];
        let mut amp = Complex64::one();
        for &i in &ins {
            let j = c % m;
            c /= m;
            occupation[j] += 1;
            amp *= u[(j, i)];
        }
        *buckets.entry(occupation).or_insert(Complex64::zero()) += amp;
    }
    buckets
        .into_iter()
        .map(|(t, sum)| {
            let out_norm: f64 = t.iter().map(|&k| fact(k)).product::<f64>().sqrt();
            let amp = sum * out_norm / input_norm;
            (t, amp.norm_sqr())
        })
        .collect()
}

/// Solves a square rational system by Gauss-Jordan elimination; `None` if singular.
pub fn solve_rational(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v /= &p;
        }
        b[col] /= &p;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let row = a[col].clone();
                for (v, x) in a[r].iter_mut().zip(&row) {
                    *v -= &f * x;
                }
                let bc = b[col].clone();
                b[r] -= f * bc;
            }
        }
    }
    Some(b)
}

/// Optimum of `max Σ p_i` over `p >= 0` and the given clique rows, by
/// enumerating every basic solution (every choice of `n` tight constraints).
pub fn enumerate_basic_solutions(n: usize, cliques: &[Vec<usize>]) -> BigRational {
    // constraint rows: cliques (≤ 1), then -p_i ≤ 0
    let mut rows: Vec<(Vec<BigRational>, BigRational)> = cliques
        .iter()
        .map(|q| {
            let mut r = vec![BigRational::zero(); n];
            for &v in q {
                r[v] = BigRational::one();
            }
            (r, BigRational::one())
        })
        .collect();
    for i in 0..n {
        let mut r = vec![BigRational::zero(); n];
        r[i] = -BigRational::one();
        rows.push((r, BigRational::zero()));
    }
    let k = rows.len();
    let mut best: Option<BigRational> = None;
    for mask in 0u64..(1 << k) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let chosen: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let a = chosen.iter().map(|&i| rows[i].0.clone()).collect();
        let b = chosen.iter().map(|&i| rows[i].1.clone()).collect();
        let Some(p) = solve_rational(a, b) else { continue };
        let feasible = rows
            .iter()
            .all(|(r, rhs)| r.iter().zip(&p).map(|(x, y)| x * y).sum::<BigRational>() <= *rhs);
        if feasible {
            let v: BigRational = p.iter().cloned().sum();
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
    }
    best.expect("origin is a basic feasible solution")
}
