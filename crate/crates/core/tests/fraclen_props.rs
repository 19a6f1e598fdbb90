mod common;

use fraclen_core::oracle::segment_len_sigma;
use fraclen_core::{
    len_sigma, len_sigma_with, limit_sweep, LengthOptions, Orthogonal, SigmaParam, Unbiasing, VecN,
    Window,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sigma(s: f64) -> SigmaParam {
    SigmaParam::new(s).unwrap()
}

#[test]
fn segment_matches_closed_form_reference() {
    let curve = common::segment();
    let window = common::ball(&[0.0, 0.0, 0.0], 2.0);
    for (k, s) in [0.3, 0.5, 0.7].into_iter().enumerate() {
        let result = len_sigma(&curve, &window, sigma(s), 100_000, 100 + k as u64).unwrap();
        let reference = segment_len_sigma(1.0, 2.0, s, 64);
        assert!(
            (result.estimate - reference).abs() < 3.0 * result.std_error,
            "sigma = {s}: {} ± {} vs {reference}",
            result.estimate,
            result.std_error
        );
    }
}

#[test]
fn estimates_are_reproducible_and_worker_independent() {
    let curve = common::helix();
    let window = common::ball(&[0.0, 0.0, 0.8], 2.5);
    let mut options = LengthOptions::new(20_000, 42);
    let base = len_sigma_with(&curve, &window, sigma(0.6), &options).unwrap();
    options.sampling.workers = Some(1);
    let one = len_sigma_with(&curve, &window, sigma(0.6), &options).unwrap();
    options.sampling.workers = Some(5);
    let five = len_sigma_with(&curve, &window, sigma(0.6), &options).unwrap();
    assert_eq!(base, one);
    assert_eq!(one.estimate.to_bits(), five.estimate.to_bits());
    assert_eq!(one.std_error.to_bits(), five.std_error.to_bits());
}

#[test]
fn scaling_exponent_is_two_minus_sigma() {
    let curve = common::segment();
    let window = common::ball(&[0.0, 0.0, 0.0], 2.0);
    let s = 0.7;
    let base = len_sigma(&curve, &window, sigma(s), 100_000, 1).unwrap();
    for (k, lambda) in [0.5, 3.0].into_iter().enumerate() {
        let q = Orthogonal::identity(3);
        let scaled = curve.transformed(&q, lambda, &VecN::zeros(3)).unwrap();
        let w = Window::new(VecN::zeros(3), 2.0 * lambda).unwrap();
        let result = len_sigma(&scaled, &w, sigma(s), 100_000, 2 + k as u64).unwrap();
        let factor = lambda.powf(2.0 - s);
        assert!(
            common::within(
                result.estimate,
                result.std_error,
                factor * base.estimate,
                factor * base.std_error,
                3.0
            ),
            "lambda = {lambda}: {} vs {}",
            result.estimate,
            factor * base.estimate
        );
    }
}

#[test]
fn relative_error_stays_small_across_sigma() {
    let curve = common::segment();
    let window = common::ball(&[0.0, 0.0, 0.0], 2.0);
    for (k, s) in [0.3, 0.6, 0.95].into_iter().enumerate() {
        let result = len_sigma(&curve, &window, sigma(s), 1_000_000, 10 + k as u64).unwrap();
        assert!(result.estimate.is_finite());
        assert!(
            result.std_error <= 0.05 * result.estimate,
            "sigma = {s}: {result:?}"
        );
    }
}

#[test]
fn std_error_scales_as_inverse_square_root() {
    let curve = common::segment();
    let window = common::ball(&[0.0, 0.0, 0.0], 2.0);
    let scaled: Vec<f64> = [10_000u64, 100_000, 1_000_000]
        .iter()
        .map(|&n| {
            let r = len_sigma(&curve, &window, sigma(0.7), n, 20).unwrap();
            r.std_error * (n as f64).sqrt()
        })
        .collect();
    for pair in scaled.windows(2) {
        let ratio = pair[1] / pair[0];
        assert!((0.8..=1.2).contains(&ratio), "{scaled:?}");
    }
}

#[test]
fn unbiasing_schemes_agree_on_a_closed_curve() {
    let curve = common::unit_circle();
    let window = common::ball(&[0.0, 0.0, 0.0], 1.5);
    let mut options = LengthOptions::new(20_000, 30);
    let canonical = len_sigma_with(&curve, &window, sigma(0.7), &options).unwrap();
    options.unbiasing = Unbiasing::MultiplicityDivision;
    options.sampling.seed = 31;
    let divided = len_sigma_with(&curve, &window, sigma(0.7), &options).unwrap();
    assert!(
        common::within(
            canonical.estimate,
            canonical.std_error,
            divided.estimate,
            divided.std_error,
            3.0
        ),
        "{canonical:?} vs {divided:?}"
    );
}

#[test]
fn invalid_configurations_are_rejected() {
    let curve = common::segment();
    let small = common::ball(&[0.0, 0.0, 0.0], 0.4);
    assert!(len_sigma(&curve, &small, sigma(0.5), 10_000, 1).is_err());
    let window = common::ball(&[0.0, 0.0, 0.0], 2.0);
    assert!(len_sigma(&curve, &window, sigma(0.5), 10, 1).is_err());
    assert!(SigmaParam::new(1.0).is_err());
    assert!(SigmaParam::new(0.0).is_err());
    let four_d = common::ball(&[0.0, 0.0, 0.0, 0.0], 2.0);
    assert!(len_sigma(&curve, &four_d, sigma(0.5), 10_000, 1).is_err());
}

#[test]
fn limit_sweep_extrapolates_the_oracle_values() {
    let curve = common::segment();
    let window = common::ball(&[0.0, 0.0, 0.0], 2.0);
    let sigmas: Vec<SigmaParam> = [0.5, 0.7, 0.9].into_iter().map(sigma).collect();
    let sweep = limit_sweep(&curve, &window, &sigmas, &LengthOptions::new(50_000, 3)).unwrap();
    assert_eq!(sweep.rows.len(), 3);
    assert!((sweep.arclength - 1.0).abs() < 1e-9);
    let xs: Vec<f64> = sigmas.iter().map(|s| 1.0 - s.value()).collect();
    let ys: Vec<f64> = sigmas
        .iter()
        .map(|s| (1.0 - s.value()) * segment_len_sigma(1.0, 2.0, s.value(), 64))
        .collect();
    // Same linear fit applied to the exact values.
    let m = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let intercept = ybar - sxy / sxx * xbar;
    assert!(
        (sweep.extrapolated - intercept).abs() < 3.0 * sweep.extrapolated_std_error,
        "{} ± {} vs {intercept}",
        sweep.extrapolated,
        sweep.extrapolated_std_error
    );
}

/// Random rigid motions from fixed seeds, so the statistical check is
/// reproducible.
#[test]
fn rigid_motion_leaves_length_unchanged() {
    let curve = common::helix();
    let window = common::ball(&[0.0, 0.0, 0.8], 2.5);
    for seed in [5u64, 6, 7] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = Orthogonal::random(3, &mut rng);
        let v = VecN::from_fn(3, |_| 6.0 * rng.random::<f64>() - 3.0);
        let moved = curve.transformed(&q, 1.0, &v).unwrap();
        let mut center = q.apply(&window.center);
        center += &v;
        let moved_window = Window::new(center, window.radius).unwrap();
        let a = len_sigma(&curve, &window, sigma(0.6), 200_000, seed).unwrap();
        let b = len_sigma(&moved, &moved_window, sigma(0.6), 200_000, seed ^ 1).unwrap();
        assert!(
            common::within(a.estimate, a.std_error, b.estimate, b.std_error, 3.0),
            "{a:?} vs {b:?}"
        );
    }
}
