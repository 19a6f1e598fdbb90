//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use fraclen_core::oracle::segment_len_sigma;
use fraclen_core::{
    boundary_tangent_vectors, jacobian_report, kappa_sigma, len_sigma_with, limit_constant,
    limit_sweep, make_curve, normal_vector_m, random_manifold_point, sample_perp_pair,
    verify_lemma_int, CurvatureOptions, Curve, CurveSpec, LengthOptions, MapId, Orthogonal,
    SampleStream, SamplingOptions, SigmaParam, Unbiasing, UnitVecN, VecN, Window,
};
use rand::Rng;

const SEED: u64 = 20_240_601;
const SIGMA_GRID: [f64; 5] = [0.5, 0.7, 0.9, 0.95, 0.99];

struct Outcome {
    pass: bool,
    detail: String,
}

fn bundled(name: &str) -> Curve {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("specs")
        .join(format!("{name}.toml"));
    let text = std::fs::read_to_string(path).unwrap();
    let spec: CurveSpec = toml::from_str(&text).unwrap();
    make_curve(&spec).unwrap()
}

fn sigma(s: f64) -> SigmaParam {
    SigmaParam::new(s).unwrap()
}

fn origin_ball(radius: f64) -> Window {
    Window::new(VecN::zeros(3), radius).unwrap()
}

fn sigma_to_one_limit() -> Outcome {
    let sigmas: Vec<SigmaParam> = SIGMA_GRID.iter().map(|&s| sigma(s)).collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, seed) in [("segment", SEED), ("circle", SEED + 1)] {
        let curve = bundled(name);
        let started = Instant::now();
        let sweep = limit_sweep(
            &curve,
            &origin_ball(2.0),
            &sigmas,
            &LengthOptions::new(1_000_000, seed),
        )
        .unwrap();
        let seconds = started.elapsed().as_secs_f64();
        let target = limit_constant(3).unwrap() * sweep.arclength;
        let rel = (sweep.extrapolated - target).abs() / target;
        pass &= rel <= 0.10 && seconds <= 300.0;
        parts.push(format!(
            "{name}: {:.4} ± {:.4} vs {target:.4} (rel {rel:.3}, {seconds:.0} s)",
            sweep.extrapolated, sweep.extrapolated_std_error
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn projection_integral() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 3..=5 {
        let c = UnitVecN::basis(n, 0);
        let started = Instant::now();
        let rep =
            verify_lemma_int(n, &c, &SamplingOptions::new(1_000_000, SEED + n as u64)).unwrap();
        let rel_se = rep.result.std_error / rep.target;
        pass &= rep.z_score.abs() <= 3.0 && rel_se <= 3e-3;
        parts.push(format!(
            "n={n}: {:.4} ± {:.4} vs {:.4} (z {:.1}, {:.1} s)",
            rep.result.estimate,
            rep.result.std_error,
            rep.target,
            rep.z_score,
            started.elapsed().as_secs_f64()
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn jacobians() -> Outcome {
    let stream = SampleStream::new(SEED);
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, n) in [("helix", 3), ("fourier4", 4)] {
        let curve = bundled(name);
        for (m, map) in MapId::ALL.into_iter().enumerate() {
            let mut worst = 0.0f64;
            let mut within = 0;
            for i in 0..100u64 {
                let mut rng = stream.rng((n * 1000 + m * 100) as u64 + i);
                let point = random_manifold_point(&curve, map, 1e-3, &mut rng).unwrap();
                let rep = jacobian_report(&curve, map, &point, 1e-5).unwrap();
                worst = worst.max(rep.rel_error);
                if rep.rel_error <= 1e-5 {
                    within += 1;
                }
            }
            pass &= within == 100;
            parts.push(format!("n={n} {map}: {within}/100, max {worst:.1e}"));
        }
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn boundary_normal() -> Outcome {
    let curve = bundled("helix");
    let (s0, s1) = curve.param_range();
    let stream = SampleStream::new(SEED);
    let mut worst_norm = 0.0f64;
    let mut worst_dot = 0.0f64;
    let mut done = 0;
    let mut index = 0u64;
    while done < 100 {
        let mut rng = stream.rng(index);
        index += 1;
        let s = s0 + (s1 - s0) * rng.random::<f64>();
        let z = curve.eval(s);
        let t = curve.tangent(s);
        let pair = sample_perp_pair(3, &mut rng).unwrap();
        if pair.b.dot(t.as_vec()).abs() < 1e-3 {
            continue;
        }
        let r = 0.1 + 2.0 * rng.random::<f64>();
        let mut p = z.clone();
        p.axpy(r, pair.a.as_vec());
        let m = normal_vector_m(&p, &pair.b, r, &z, &t).unwrap();
        worst_norm = worst_norm.max((m.norm() - 1.0).abs());
        for v in boundary_tangent_vectors(&pair.a, &pair.b, r, &t) {
            worst_dot = worst_dot.max(m.dot(&v).abs() / v.norm());
        }
        done += 1;
    }
    Outcome {
        pass: worst_norm <= 1e-12 && worst_dot <= 1e-8,
        detail: format!(
            "max | |m| - 1 | {worst_norm:.1e}, max |m.v| {worst_dot:.1e} over 100 configurations"
        ),
    }
}

fn straight_line_curvature() -> Outcome {
    let curve = bundled("segment");
    let (s0, s1) = curve.param_range();
    let mid = 0.5 * (s0 + s1);
    let mut pass = true;
    let mut worst = 0.0f64;
    for (k, s) in [0.3, 0.5, 0.8].into_iter().enumerate() {
        let mut options = CurvatureOptions::new(1_000_000, SEED + k as u64);
        options.r_min = Some(1e-3);
        let result = kappa_sigma(&curve, mid, sigma(s), &options).unwrap();
        for row in &result.sweep {
            for (x, se) in row
                .kappa_vector
                .as_slice()
                .iter()
                .zip(row.std_error_vector.as_slice())
            {
                let z = x.abs() / (se + 1e-9);
                worst = worst.max(z);
                pass &= z <= 3.0;
            }
        }
    }
    Outcome {
        pass,
        detail: format!("largest |component| / std_error {worst:.2} over sigma {{0.3, 0.5, 0.8}} and 4 r_min values"),
    }
}

fn circle_curvature() -> Outcome {
    let curve = bundled("circle");
    let result = kappa_sigma(
        &curve,
        0.0,
        sigma(0.5),
        &CurvatureOptions::new(1_000_000, SEED),
    )
    .unwrap();
    let k = result.kappa_vector.as_slice();
    let se = result.std_error_vector.as_slice();
    let inward = -k[0] / se[0];
    let out_of_plane = k[2].abs() / se[2];
    Outcome {
        pass: inward > 5.0 && out_of_plane <= 3.0,
        detail: format!(
            "point {:?}; kappa.(-1,0,0) = {:.3} ({inward:.1} se); kappa_z = {:.3} ({out_of_plane:.2} se)",
            result.point.as_slice(),
            -k[0],
            k[2]
        ),
    }
}

fn scaling_covariance() -> Outcome {
    let curve = bundled("segment");
    let lambda = 2.0;
    let s = 0.7;
    let scaled = curve
        .transformed(&Orthogonal::identity(3), lambda, &VecN::zeros(3))
        .unwrap();
    let base = len_sigma_with(
        &curve,
        &origin_ball(2.0),
        sigma(s),
        &LengthOptions::new(1_000_000, SEED),
    )
    .unwrap();
    let big = len_sigma_with(
        &scaled,
        &origin_ball(2.0 * lambda),
        sigma(s),
        &LengthOptions::new(1_000_000, SEED + 1),
    )
    .unwrap();
    let ratio = big.estimate / base.estimate;
    let se = ratio
        * ((big.std_error / big.estimate).powi(2) + (base.std_error / base.estimate).powi(2))
            .sqrt();
    let expected = lambda.powf(2.0 - s);
    Outcome {
        pass: (ratio - expected).abs() <= 3.0 * se,
        detail: format!("ratio {ratio:.4} ± {se:.4} vs {expected:.4}"),
    }
}

fn unbiasing_agreement() -> Outcome {
    let curve = bundled("segment");
    let run = |unbiasing, seed| {
        let options = LengthOptions {
            unbiasing,
            ..LengthOptions::new(100_000, seed)
        };
        len_sigma_with(&curve, &origin_ball(2.0), sigma(0.7), &options).unwrap()
    };
    let a = run(Unbiasing::CanonicalSelection, SEED);
    let b = run(Unbiasing::MultiplicityDivision, SEED + 1);
    let se = a.std_error.hypot(b.std_error);
    Outcome {
        pass: (a.estimate - b.estimate).abs() <= 3.0 * se,
        detail: format!(
            "canonical {:.3} ± {:.3}, multiplicity {:.3} ± {:.3}",
            a.estimate, a.std_error, b.estimate, b.std_error
        ),
    }
}

fn quadrature_oracle() -> Outcome {
    let curve = bundled("segment");
    let reference = segment_len_sigma(1.0, 2.0, 0.9, 64);
    let oracle_error = (segment_len_sigma(1.0, 2.0, 0.9, 128) - reference).abs();
    let result = len_sigma_with(
        &curve,
        &origin_ball(2.0),
        sigma(0.9),
        &LengthOptions::new(1_000_000, SEED),
    )
    .unwrap();
    let combined = result.std_error.hypot(oracle_error);
    Outcome {
        pass: (result.estimate - reference).abs() <= 3.0 * combined,
        detail: format!(
            "Monte Carlo {:.4} ± {:.4}, quadrature {reference:.6} ± {oracle_error:.1e}",
            result.estimate, result.std_error
        ),
    }
}

fn run_binary(args: &[&str], workers: &str) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_fraclen"))
        .args(args)
        .args(["--workers", workers])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn determinism() -> Outcome {
    let commands: [&[&str]; 7] = [
        &[
            "length",
            "--curve",
            "helix",
            "--sigma",
            "0.6",
            "--samples",
            "20000",
        ],
        &["limit-sweep", "--curve", "segment", "--samples", "5000"],
        &[
            "curvature",
            "--curve",
            "circle",
            "--s",
            "1.0",
            "--sigma",
            "0.5",
            "--samples",
            "20000",
        ],
        &[
            "el-residual",
            "--curve",
            "segment",
            "--s",
            "0.5",
            "--sigma",
            "0.4",
            "--samples",
            "20000",
        ],
        &[
            "classify", "--curve", "circle", "--center", "0.5,0,0", "--normal", "0,1,0",
            "--radius", "1",
        ],
        &["verify-jacobians", "--n", "4", "--points", "10"],
        &["verify-lemma-int", "--n", "4", "--samples", "50000"],
    ];
    let mut failed = Vec::new();
    for args in commands {
        let first = run_binary(args, "1");
        let again = run_binary(args, "1");
        let parallel = run_binary(args, "4");
        if first != again || first != parallel {
            failed.push(args[0]);
        }
    }
    Outcome {
        pass: failed.is_empty(),
        detail: if failed.is_empty() {
            "7 commands byte-identical across reruns and 1 vs 4 workers".into()
        } else {
            format!("differing output: {}", failed.join(", "))
        },
    }
}

type Check = fn() -> Outcome;

fn main() {
    let criteria: [(&str, Check); 10] = [
        (
            "limit of (1-sigma) Len_sigma: segment -> 4 pi, circle -> 8 pi^2, within 10%",
            sigma_to_one_limit,
        ),
        (
            "integral of |b.c| within 3 se of 4 alpha_(n-1) alpha_(n-2), n = 3, 4, 5",
            projection_integral,
        ),
        (
            "finite-difference Jacobians match the closed forms (phi, xi, psi; n = 3, 4)",
            jacobians,
        ),
        (
            "boundary normal is unit and orthogonal to the tangent space",
            boundary_normal,
        ),
        (
            "segment midpoint curvature is zero within 3 se",
            straight_line_curvature,
        ),
        (
            "unit circle curvature points inward, no out-of-plane part",
            circle_curvature,
        ),
        ("Len_sigma scales as lambda^(2 - sigma)", scaling_covariance),
        (
            "canonical selection agrees with multiplicity division",
            unbiasing_agreement,
        ),
        (
            "Monte Carlo Len_sigma agrees with deterministic quadrature",
            quadrature_oracle,
        ),
        (
            "CLI output is byte-identical across reruns and worker counts",
            determinism,
        ),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        if !outcome.pass {
            failures += 1;
        }
        println!(
            "{status} criterion {:>2}: {name} | {}",
            i + 1,
            outcome.detail
        );
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
