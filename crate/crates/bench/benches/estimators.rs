use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use fraclen_bench::{helix, segment, window_about};
use fraclen_core::{
    kappa_sigma, len_sigma_with, sample_perp_pair, sample_unit_sphere, Classifier,
    CurvatureOptions, Disc, LengthOptions, SigmaParam, Tolerances, VecN,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn perp_pairs(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_perp_pair");
    for n in [3, 5, 8] {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        group.bench_function(format!("n={n}"), |b| {
            b.iter(|| sample_perp_pair(n, &mut rng).unwrap())
        });
    }
    group.finish();
}

fn classify(c: &mut Criterion) {
    let curve = helix();
    let classifier = Classifier::new(&curve, Tolerances::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    c.bench_function("classify/helix", |b| {
        b.iter_batched(
            || {
                let center = VecN::from_fn(3, |_| 2.0 * rng.random::<f64>() - 1.0);
                let normal = sample_unit_sphere(3, &mut rng).unwrap();
                Disc::new(center, normal, 0.1 + rng.random::<f64>()).unwrap()
            },
            |disc| classifier.classify(&disc),
            BatchSize::SmallInput,
        )
    });
}

fn estimators(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimators");
    group.sample_size(10);
    let sigma = SigmaParam::new(0.7).unwrap();
    let seg = segment();
    let seg_window = window_about(&seg, 2.0);
    group.bench_function("len_sigma/segment/10k", |b| {
        b.iter(|| len_sigma_with(&seg, &seg_window, sigma, &LengthOptions::new(10_000, 3)).unwrap())
    });
    let hel = helix();
    let hel_window = window_about(&hel, 2.5);
    group.bench_function("len_sigma/helix/10k", |b| {
        b.iter(|| len_sigma_with(&hel, &hel_window, sigma, &LengthOptions::new(10_000, 4)).unwrap())
    });
    group.bench_function("kappa_sigma/helix/10k", |b| {
        b.iter(|| kappa_sigma(&hel, 1.0, sigma, &CurvatureOptions::new(10_000, 5)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, perp_pairs, classify, estimators);
criterion_main!(benches);
