mod support;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use ncbounds::optics::{
    occupation_patterns, output_distribution, permanent, transition_amplitude, FockState, Interferometer, OpticsConfig,
};

fn cfg() -> OpticsConfig {
    OpticsConfig::default()
}

#[test]
fn permanent_matches_permutation_expansion() {
    let mut rng = support::rng(0x9e3);
    for case in 0..100 {
        let n = rng.random_range(1..=5);
        let m = support::random_complex_matrix(&mut rng, n, n);
        let fast = permanent(&m, &cfg()).unwrap();
        let slow = support::naive_permanent(&m);
        assert!((fast - slow).norm() <= 1e-12, "case {case}: {fast} vs {slow}");
    }
}

#[test]
fn distributions_match_symmetrized_states() {
    let mut rng = support::rng(0x51);
    for case in 0..60 {
        let modes = rng.random_range(1..=3);
        let photons = rng.random_range(0..=3);
        let input = occupation_patterns(modes, photons)
            .into_iter()
            .nth(rng.random_range(0..occupation_patterns(modes, photons).len()))
            .unwrap();
        let u = support::random_unitary(&mut rng, modes);
        let dist = output_distribution(&input, &Interferometer::new(u.clone()).unwrap(), &cfg()).unwrap();
        let oracle = support::symmetrized_state_distribution(&input.0, &u);
        assert_eq!(dist.len(), oracle.len(), "case {case}");
        for (pattern, p) in oracle {
            let got = dist[&FockState(pattern.clone())];
            assert!((got - p).abs() <= 1e-10, "case {case} {pattern:?}: {got} vs {p}");
        }
    }
}

#[test]
fn single_photon_follows_the_matrix_entries() {
    let mut rng = support::rng(3);
    for _ in 0..20 {
        let modes = rng.random_range(1..=4);
        let u = support::random_unitary(&mut rng, modes);
        let ifm = Interferometer::new(u.clone()).unwrap();
        let i = rng.random_range(0..modes);
        let mut input = vec![0; modes];
        input[i] = 1;
        let dist = output_distribution(&FockState(input), &ifm, &cfg()).unwrap();
        for (out, p) in dist {
            let j = out.0.iter().position(|&k| k == 1).unwrap();
            assert!((p - u[(j, i)].norm_sqr()).abs() <= 1e-12);
        }
    }
}

#[test]
fn hong_ou_mandel_dip() {
    let bs = Interferometer::balanced_beam_splitter();
    let coincidence = transition_amplitude(&FockState::new(&[1, 1]), &FockState::new(&[1, 1]), &bs, &cfg()).unwrap();
    assert!(coincidence.norm() <= 1e-15);
    let dist = output_distribution(&FockState::new(&[1, 1]), &bs, &cfg()).unwrap();
    assert!((dist[&FockState::new(&[2, 0])] - 0.5).abs() <= 1e-12);
    assert!((dist[&FockState::new(&[0, 2])] - 0.5).abs() <= 1e-12);
}

#[test]
fn capacity_limits_are_reported() {
    let small = OpticsConfig {
        max_photons: 2,
        max_permanent: 2,
    };
    let m = nalgebra::DMatrix::from_element(3, 3, Complex64::new(1.0, 0.0));
    assert!(permanent(&m, &small).is_err());
    let input = FockState::new(&[3, 0]);
    assert!(output_distribution(&input, &Interferometer::balanced_beam_splitter(), &small).is_err());
}

proptest! {
    #[test]
    fn distributions_are_normalised(seed in any::<u64>(), modes in 1usize..=4, photons in 0usize..=4) {
        let mut rng = support::rng(seed);
        let u = Interferometer::new(support::random_unitary(&mut rng, modes)).unwrap();
        let patterns = occupation_patterns(modes, photons);
        let input = &patterns[rng.random_range(0..patterns.len())];
        let total: f64 = output_distribution(input, &u, &cfg()).unwrap().values().sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn undoing_an_interferometer_restores_the_input(seed in any::<u64>(), modes in 1usize..=3, photons in 1usize..=3) {
        let mut rng = support::rng(seed);
        let u = Interferometer::new(support::random_unitary(&mut rng, modes)).unwrap();
        let round_trip = u.then(&u.adjoint()).unwrap();
        let patterns = occupation_patterns(modes, photons);
        let input = &patterns[rng.random_range(0..patterns.len())];
        let dist = output_distribution(input, &round_trip, &cfg()).unwrap();
        prop_assert!((dist[input] - 1.0).abs() <= 1e-10);
    }
}
