mod common;

use fraclen_core::{
    el_residual, kappa_sigma, kappa_sigma_split, CurvatureOptions, CurvatureResult, Orthogonal,
    SigmaParam, VecN,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sigma(s: f64) -> SigmaParam {
    SigmaParam::new(s).unwrap()
}

fn assert_zero_vector(v: &VecN, se: &VecN, what: &str) {
    for i in 0..v.dim() {
        assert!(
            v[i].abs() <= 3.0 * se[i] + 1e-12,
            "{what}: component {i} = {} ± {}",
            v[i],
            se[i]
        );
    }
}

/// `κ·t` and its standard error, treating components as independent.
fn tangential_part(result: &CurvatureResult, t: &VecN) -> (f64, f64) {
    let along = result.kappa_vector.dot(t);
    let se = (0..t.dim())
        .map(|i| (t[i] * result.std_error_vector[i]).powi(2))
        .sum::<f64>()
        .sqrt();
    (along, se)
}

#[test]
fn curvature_is_normal_to_the_curve() {
    let cases = [
        (common::unit_circle(), 0.0),
        (common::unit_circle(), 0.3),
        (common::helix(), 2.0),
        (common::helix(), 4.0),
        (common::closed_spline(), 0.4),
    ];
    for (k, (curve, s)) in cases.iter().enumerate() {
        let result = kappa_sigma(
            curve,
            *s,
            sigma(0.5),
            &CurvatureOptions::new(200_000, k as u64),
        )
        .unwrap();
        let t = curve.tangent(*s);
        let (along, se) = tangential_part(&result, t.as_vec());
        assert!(
            along.abs() <= 3.0 * se + 1e-9,
            "case {k}: κ·t = {along} ± {se}"
        );
        assert!(
            (result.kappa_scalar - result.kappa_vector.norm()).abs()
                < 1e-12 * result.kappa_scalar.max(1.0)
        );
    }
}

#[test]
fn segment_midpoint_is_flat_across_the_sweep() {
    let curve = common::segment();
    let result = kappa_sigma(&curve, 0.5, sigma(0.4), &CurvatureOptions::new(200_000, 5)).unwrap();
    assert_eq!(result.sweep.len(), 4);
    for row in &result.sweep {
        assert_zero_vector(
            &row.kappa_vector,
            &row.std_error_vector,
            &format!("r_min = {}", row.r_min),
        );
    }
    let residual =
        el_residual(&curve, 0.5, sigma(0.4), &CurvatureOptions::new(200_000, 6)).unwrap();
    assert_zero_vector(
        &residual.kappa_vector,
        &residual.std_error_vector,
        "residual",
    );
}

#[test]
fn residual_is_the_rescaled_curvature() {
    let curve = common::helix();
    let options = CurvatureOptions::new(30_000, 9);
    let s = 0.7;
    let kappa = kappa_sigma(&curve, 1.0, sigma(s), &options).unwrap();
    let residual = el_residual(&curve, 1.0, sigma(s), &options).unwrap();
    let factor = 2f64.powf(-(1.0 + s));
    for i in 0..3 {
        let expected = factor * kappa.kappa_vector[i];
        assert!(
            (residual.kappa_vector[i] - expected).abs()
                <= 1e-14 * expected.abs().max(1e-300) * 10.0
        );
    }
}

#[test]
fn circle_residual_is_nonzero() {
    let curve = common::unit_circle();
    let result = el_residual(
        &curve,
        0.0,
        sigma(0.5),
        &CurvatureOptions::new(1_000_000, 12),
    )
    .unwrap();
    let se = result.std_error_vector.norm();
    assert!(
        result.kappa_scalar > 5.0 * se,
        "{} ± {}",
        result.kappa_scalar,
        se
    );
}

#[test]
fn antipodal_circle_points_are_related_by_rotation() {
    let curve = common::unit_circle();
    let a = kappa_sigma(&curve, 0.0, sigma(0.5), &CurvatureOptions::new(200_000, 21)).unwrap();
    let b = kappa_sigma(&curve, 0.5, sigma(0.5), &CurvatureOptions::new(200_000, 22)).unwrap();
    // Rotation by π about the z axis.
    let rotated = VecN::new(&[-a.kappa_vector[0], -a.kappa_vector[1], a.kappa_vector[2]]).unwrap();
    for i in 0..3 {
        // The tangential component vanishes sample by sample, so its error
        // bars are at roundoff level.
        let tol = 3.0 * a.std_error_vector[i].hypot(b.std_error_vector[i]) + 1e-9;
        assert!(
            (rotated[i] - b.kappa_vector[i]).abs() <= tol,
            "component {i}: {} vs {}",
            rotated[i],
            b.kappa_vector[i]
        );
    }
}

/// The signed estimator's per-sample variance exceeds the split one's by
/// `2 m_odd·m_even` per component, which is small next to either; the 5%
/// margin covers the sampling error of the two variance estimates.
#[test]
fn shared_samples_do_not_inflate_variance() {
    let curve = common::unit_circle();
    let options = CurvatureOptions::new(100_000, 31);
    let signed = kappa_sigma(&curve, 0.0, sigma(0.5), &options).unwrap();
    let split = kappa_sigma_split(&curve, 0.0, sigma(0.5), &options).unwrap();
    for i in [0, 2] {
        assert!(
            signed.std_error_vector[i] <= 1.05 * split.std_error_vector[i],
            "component {i}: {} vs {}",
            signed.std_error_vector[i],
            split.std_error_vector[i]
        );
    }
    for i in 0..3 {
        assert!(common::within(
            signed.kappa_vector[i],
            signed.std_error_vector[i],
            split.kappa_vector[i],
            split.std_error_vector[i],
            3.0
        ));
    }
}

#[test]
fn results_are_worker_independent() {
    let curve = common::helix();
    let mut options = CurvatureOptions::new(10_000, 4);
    options.sampling.workers = Some(1);
    let one = kappa_sigma(&curve, 3.0, sigma(0.5), &options).unwrap();
    options.sampling.workers = Some(4);
    let four = kappa_sigma(&curve, 3.0, sigma(0.5), &options).unwrap();
    assert_eq!(one, four);
}

#[test]
fn invalid_radii_are_rejected() {
    let curve = common::helix();
    let bad = CurvatureOptions::new(1000, 1).with_radii(0.0, 1.0);
    assert!(kappa_sigma(&curve, 1.0, sigma(0.5), &bad).is_err());
    let inverted = CurvatureOptions::new(1000, 1).with_radii(1.0, 0.5);
    assert!(kappa_sigma(&curve, 1.0, sigma(0.5), &inverted).is_err());
    let outside = CurvatureOptions::new(1000, 1);
    assert!(kappa_sigma(&curve, 100.0, sigma(0.5), &outside).is_err());
}

/// Random rigid motions from fixed seeds, so the statistical check is
/// reproducible.
#[test]
fn curvature_rotates_with_the_curve() {
    let curve = common::helix();
    for seed in [3u64, 17, 29] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = Orthogonal::random(3, &mut rng);
        let shift = VecN::from_fn(3, |_| 4.0 * rng.random::<f64>() - 2.0);
        let moved = curve.transformed(&q, 1.0, &shift).unwrap();
        let s = 2.5;
        let a = kappa_sigma(&curve, s, sigma(0.5), &CurvatureOptions::new(100_000, seed)).unwrap();
        let b = kappa_sigma(
            &moved,
            s,
            sigma(0.5),
            &CurvatureOptions::new(100_000, seed ^ 7),
        )
        .unwrap();
        let qa = q.apply(&a.kappa_vector);
        // Componentwise errors of Qκ from independent component errors.
        let se_qa = VecN::from_fn(3, |i| {
            (0..3)
                .map(|j| (q.apply(&VecN::basis(3, j))[i] * a.std_error_vector[j]).powi(2))
                .sum::<f64>()
                .sqrt()
        });
        for i in 0..3 {
            let tol = 3.0 * se_qa[i].hypot(b.std_error_vector[i]) + 1e-9;
            assert!(
                (qa[i] - b.kappa_vector[i]).abs() <= tol,
                "seed {seed}, component {i}: {} vs {}",
                qa[i],
                b.kappa_vector[i]
            );
        }
    }
}
