//! Fock-state propagation through passive linear interferometers with
//! threshold detectors.
//!
//! Convention: input mode `i` maps as `a_i† → Σ_j U_ji a_j†`. The amplitude
//! from occupation `s` to occupation `t` is `perm(U[t, s]) / sqrt(Π s_i! Π t_j!)`
//! where `U[t, s]` repeats output row `j` `t_j` times and input column `i`
//! `s_i` times.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::Event;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpticsError {
    #[error("{what} of {size} exceeds the configured limit of {limit}")]
    Capacity {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("matrix is not unitary (max |UU† − I| entry {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("input has {input} modes but the interferometer has {modes}")]
    ModeMismatch { input: usize, modes: usize },
    #[error("detector mode {mode} is out of range for {modes} modes")]
    DetectorOutOfRange { mode: usize, modes: usize },
}

pub type Result<T, E = OpticsError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpticsConfig {
    pub max_photons: usize,
    pub max_permanent: usize,
}

impl Default for OpticsConfig {
    fn default() -> Self {
        OpticsConfig {
            max_photons: 6,
            max_permanent: 6,
        }
    }
}

/// Photons per mode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FockState(pub Vec<u32>);

impl FockState {
    pub fn new(occupations: &[u32]) -> Self {
        FockState(occupations.to_vec())
    }

    pub fn vacuum(modes: usize) -> Self {
        FockState(vec![0; modes])
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn photons(&self) -> usize {
        self.0.iter().map(|&k| k as usize).sum()
    }

    /// Mode index of each photon, in mode order.
    pub fn mode_list(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(mode, &k)| std::iter::repeat_n(mode, k as usize))
            .collect()
    }

    fn factorial_product(&self) -> f64 {
        self.0
            .iter()
            .map(|&k| (1..=k).map(f64::from).product::<f64>())
            .product()
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "⟩")
    }
}

/// All occupation patterns of `photons` photons over `modes` modes, in
/// lexicographic order.
pub fn occupation_patterns(modes: usize, photons: usize) -> Vec<FockState> {
    fn rec(modes: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<FockState>) {
        if prefix.len() + 1 == modes {
            prefix.push(left);
            out.push(FockState(prefix.clone()));
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(modes, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if modes == 0 {
        if photons == 0 {
            out.push(FockState(vec![]));
        }
        return out;
    }
    rec(modes, photons as u32, &mut Vec::with_capacity(modes), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interferometer {
    unitary: DMatrix<Complex64>,
}

const UNITARITY_TOLERANCE: f64 = 1e-10;

impl Interferometer {
    pub fn new(unitary: DMatrix<Complex64>) -> Result<Self> {
        let (rows, cols) = unitary.shape();
        if rows != cols {
            return Err(OpticsError::NotSquare { rows, cols });
        }
        let product = &unitary * unitary.adjoint();
        let deviation = (product - DMatrix::<Complex64>::identity(rows, rows))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if deviation > UNITARITY_TOLERANCE {
            return Err(OpticsError::NotUnitary { deviation });
        }
        Ok(Interferometer { unitary })
    }

    pub fn identity(modes: usize) -> Self {
        Interferometer {
            unitary: DMatrix::identity(modes, modes),
        }
    }

    /// `(1/√2) [[1, 1], [1, −1]]`.
    pub fn balanced_beam_splitter() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Interferometer {
            unitary: DMatrix::from_row_slice(2, 2, &[h, h, h, -h]),
        }
    }

    pub fn modes(&self) -> usize {
        self.unitary.nrows()
    }

    pub fn unitary(&self) -> &DMatrix<Complex64> {
        &self.unitary
    }

    pub fn adjoint(&self) -> Self {
        Interferometer {
            unitary: self.unitary.adjoint(),
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Interferometer) -> Result<Self> {
        if self.modes() != next.modes() {
            return Err(OpticsError::ModeMismatch {
                input: self.modes(),
                modes: next.modes(),
            });
        }
        Ok(Interferometer {
            unitary: &next.unitary * &self.unitary,
        })
    }
}

/// Permanent by Ryser's formula, visiting column subsets in Gray-code order
/// so each step adds or removes one column from the running row sums.
pub fn permanent(m: &DMatrix<Complex64>, cfg: &OpticsConfig) -> Result<Complex64> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(OpticsError::NotSquare { rows, cols });
    }
    let n = rows;
    if n > cfg.max_permanent {
        return Err(OpticsError::Capacity {
            what: "permanent size",
            size: n,
            limit: cfg.max_permanent,
        });
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut gray = 0u64;
    for k in 1u64..(1 << n) {
        let j = k.trailing_zeros() as usize;
        gray ^= 1 << j;
        if gray & (1 << j) != 0 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += m[(i, j)];
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= m[(i, j)];
            }
        }
        let term: Complex64 = row_sums.iter().product();
        if gray.count_ones().is_multiple_of(2) {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(if n % 2 == 0 { total } else { -total })
}

pub fn transition_amplitude(
    input: &FockState,
    output: &FockState,
    u: &Interferometer,
    cfg: &OpticsConfig,
) -> Result<Complex64> {
    check_modes(input, u)?;
    check_modes(output, u)?;
    if input.photons() != output.photons() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let ins = input.mode_list();
    let outs = output.mode_list();
    let sub = DMatrix::from_fn(outs.len(), ins.len(), |r, c| u.unitary[(outs[r], ins[c])]);
    let norm = (input.factorial_product() * output.factorial_product()).sqrt();
    Ok(permanent(&sub, cfg)? / norm)
}

/// Probability of every photon-number-conserving output pattern.
pub fn output_distribution(
    input: &FockState,
    u: &Interferometer,
    cfg: &OpticsConfig,
) -> Result<BTreeMap<FockState, f64>> {
    check_modes(input, u)?;
    let photons = input.photons();
    if photons > cfg.max_photons {
        return Err(OpticsError::Capacity {
            what: "photon number",
            size: photons,
            limit: cfg.max_photons,
        });
    }
    occupation_patterns(u.modes(), photons)
        .into_iter()
        .map(|out| {
            let amp = transition_amplitude(input, &out, u, cfg)?;
            Ok((out, amp.norm_sqr()))
        })
        .collect()
}

fn check_modes(state: &FockState, u: &Interferometer) -> Result<()> {
    if state.modes() != u.modes() {
        return Err(OpticsError::ModeMismatch {
            input: state.modes(),
            modes: u.modes(),
        });
    }
    Ok(())
}

/// Threshold detection on one output mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionModel {
    pub detector_mode: usize,
}

impl DetectionModel {
    pub fn clicks(&self, output: &FockState) -> bool {
        output.0[self.detector_mode] >= 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Predicate {
    Clicks,
    DoesNotClick,
}

impl Predicate {
    /// Outcome label used for the detector test in scenario files.
    pub fn outcome_label(self) -> &'static str {
        match self {
            Predicate::Clicks => "click",
            Predicate::DoesNotClick => "no-click",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BunchingEventSpec {
    pub label: String,
    pub preparation: String,
    pub input: FockState,
    pub interferometer: Interferometer,
    pub detector: DetectionModel,
    pub predicate: Predicate,
}

/// Name of the detector test in the bunching scenarios.
pub const DETECTOR_TEST: &str = "D";

impl BunchingEventSpec {
    fn two_port(label: &str, preparation: &str, upper: u32, lower: u32, predicate: Predicate) -> Self {
        BunchingEventSpec {
            label: label.into(),
            preparation: preparation.into(),
            input: FockState::new(&[upper, lower]),
            interferometer: Interferometer::balanced_beam_splitter(),
            detector: DetectionModel { detector_mode: 0 },
            predicate,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_modes(&self.input, &self.interferometer)?;
        if self.detector.detector_mode >= self.interferometer.modes() {
            return Err(OpticsError::DetectorOutOfRange {
                mode: self.detector.detector_mode,
                modes: self.interferometer.modes(),
            });
        }
        Ok(())
    }

    /// The scenario event this spec describes: its preparation, with the
    /// detector test assigned the predicate's outcome.
    pub fn as_event(&self) -> Event {
        Event::new(
            self.preparation.as_str(),
            [(DETECTOR_TEST, self.predicate.outcome_label())],
        )
    }
}

/// Marginal probability that the spec's predicate holds.
pub fn click_probability(spec: &BunchingEventSpec, cfg: &OpticsConfig) -> Result<f64> {
    spec.validate()?;
    let dist = output_distribution(&spec.input, &spec.interferometer, cfg)?;
    let want_click = spec.predicate == Predicate::Clicks;
    Ok(dist
        .iter()
        .filter(|(out, _)| spec.detector.clicks(out) == want_click)
        .map(|(_, p)| p)
        .sum())
}

/// The five events of the pentagon-style bunching experiment.
///
/// Fibers `A..E` sit around a cycle; every event uses one balanced beam
/// splitter with detector `D` on the upper output. Events alternate between
/// the two templates: one photon from a fiber into the upper port with `D`
/// clicking, and two photons from neighbouring fibers into the upper and
/// lower ports with `D` silent. This is one concrete routing; any
/// alternation of the two templates gives probability 1/2 per event.
pub fn bunching_kcbs_specs() -> Vec<BunchingEventSpec> {
    use Predicate::*;
    vec![
        BunchingEventSpec::two_port("event-1", "one-photon-A", 1, 0, Clicks),
        BunchingEventSpec::two_port("event-2", "two-photon-AB", 1, 1, DoesNotClick),
        BunchingEventSpec::two_port("event-3", "one-photon-C", 1, 0, Clicks),
        BunchingEventSpec::two_port("event-4", "two-photon-CD", 1, 1, DoesNotClick),
        BunchingEventSpec::two_port("event-5", "one-photon-E", 1, 0, Clicks),
    ]
}

/// The three two-photon events of the triangle-style bunching experiment.
pub fn bunching_specker_specs() -> Vec<BunchingEventSpec> {
    use Predicate::*;
    vec![
        BunchingEventSpec::two_port("event-1'", "two-photon-AB", 1, 1, DoesNotClick),
        BunchingEventSpec::two_port("event-2'", "two-photon-AC", 1, 1, Clicks),
        BunchingEventSpec::two_port("event-3'", "two-photon-BC", 1, 1, DoesNotClick),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BunchingTerm {
    pub label: String,
    pub preparation: String,
    pub input: FockState,
    pub predicate: Predicate,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BunchingSum {
    pub terms: Vec<BunchingTerm>,
    pub total: f64,
}

pub fn simulate_events(specs: &[BunchingEventSpec], cfg: &OpticsConfig) -> Result<BunchingSum> {
    let terms = specs
        .iter()
        .map(|s| {
            Ok(BunchingTerm {
                label: s.label.clone(),
                preparation: s.preparation.clone(),
                input: s.input.clone(),
                predicate: s.predicate,
                probability: click_probability(s, cfg)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total = terms.iter().map(|t| t.probability).sum();
    Ok(BunchingSum { terms, total })
}

pub fn bunching_kcbs_value() -> BunchingSum {
    simulate_events(&bunching_kcbs_specs(), &OpticsConfig::default()).expect("built-in specs are valid")
}

pub fn bunching_specker_value() -> BunchingSum {
    simulate_events(&bunching_specker_specs(), &OpticsConfig::default()).expect("built-in specs are valid")
}
