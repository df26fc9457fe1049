use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// The symmetric qutrit realisation of the pentagon inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KcbsRealization {
    pub vectors: [[f64; 3]; 5],
    pub state: [f64; 3],
    /// `|⟨v_j|ψ⟩|²` per projector.
    pub probabilities: [f64; 5],
    pub value: f64,
    /// Largest `|⟨v_j|v_{j+1}⟩|` around the cycle.
    pub max_consecutive_overlap: f64,
}

/// Five unit vectors on a cone around `ψ = (0, 0, 1)`, spaced by `4π/5` in
/// azimuth, with the opening angle chosen so consecutive vectors are
/// orthogonal: `cos²θ = cos(π/5) / (1 + cos(π/5)) = 1/√5`.
pub fn kcbs_realization_check() -> KcbsRealization {
    let c = (PI / 5.0).cos();
    let cos_theta = (c / (1.0 + c)).sqrt();
    let sin_theta = (1.0 - cos_theta * cos_theta).sqrt();
    let state = [0.0, 0.0, 1.0];

    let vectors: [[f64; 3]; 5] = std::array::from_fn(|j| {
        let phi = 4.0 * PI * j as f64 / 5.0;
        [sin_theta * phi.cos(), sin_theta * phi.sin(), cos_theta]
    });
    let dot = |a: &[f64; 3], b: &[f64; 3]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let probabilities: [f64; 5] = std::array::from_fn(|j| dot(&vectors[j], &state).powi(2));
    let max_consecutive_overlap = (0..5)
        .map(|j| dot(&vectors[j], &vectors[(j + 1) % 5]).abs())
        .fold(0.0, f64::max);

    KcbsRealization {
        vectors,
        state,
        probabilities,
        value: probabilities.iter().sum(),
        max_consecutive_overlap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attains_sqrt5() {
        let r = kcbs_realization_check();
        assert!((r.value - 5f64.sqrt()).abs() < 1e-9);
        for p in r.probabilities {
            assert!((p - 5f64.sqrt() / 5.0).abs() < 1e-9);
        }
        assert!(r.max_consecutive_overlap <= 1e-12);
        for v in r.vectors {
            let norm: f64 = v.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }
}
