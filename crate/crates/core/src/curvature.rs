//! The nonlocal curvature vector at a curve point `z`:
//!
//! `κ_σ(z) = (∫_odd − ∫_even) [−a + (α/β) b] √(α² + β²) / (r^{1+σ} √(2 + (1+r²)(α/β)²))`
//!
//! over orthonormal pairs `(a, b)` and radii `r`, with `α = a·t(z)`,
//! `β = b·t(z)`, and the parity taken for the disc `D(z + ra, b, r)`, whose
//! rim passes through `z`. The Euler–Lagrange residual is the same integral
//! with `(2r)^{1+σ}` in place of `r^{1+σ}`.

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curve::{bounding_radius, Curve};
use crate::disc::{Classifier, Disc, DiscLabel, Tolerances};
use crate::error::{Error, Result};
use crate::fraclen::{EstimatorResult, SigmaParam};
use crate::geometry::{measure_uperp2, sample_perp_pair, UnitVecN, VecN};
use crate::mc::{derive_seed, open01, run_blocks, Draw, SamplingOptions};

/// Truncation multipliers applied to `r_min` in every result's sweep.
pub const SWEEP_FACTORS: [f64; 4] = [1.0, 2.0, 4.0, 8.0];
/// Smallest `|b·t|` accepted before a draw is resampled.
pub const TANGENT_CUTOFF: f64 = 1e-9;

/// Radial normalization of the integrand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Normalization {
    /// `r^{1+σ}`: the curvature vector.
    Curvature,
    /// `(2r)^{1+σ}`: the Euler–Lagrange integrand.
    EulerLagrange,
}

impl Normalization {
    fn factor(self, sigma: f64) -> f64 {
        match self {
            Normalization::Curvature => 1.0,
            Normalization::EulerLagrange => 2f64.powf(-(1.0 + sigma)),
        }
    }
}

/// The vector integrand at `(a, b, r)` for unit tangent `t`.
pub fn el_integrand(
    a: &UnitVecN,
    b: &UnitVecN,
    t: &UnitVecN,
    r: f64,
    sigma: SigmaParam,
    normalization: Normalization,
) -> Result<VecN> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "radius must be positive, got {r}"
        )));
    }
    let alpha = a.dot(t.as_vec());
    let beta = b.dot(t.as_vec());
    if beta.abs() <= TANGENT_CUTOFF {
        return Err(Error::Degenerate(format!(
            "|b·t| = {} is tangential",
            beta.abs()
        )));
    }
    let s = sigma.value();
    let mut v = integrand_direction(a, b, alpha, beta, r);
    let scale = normalization.factor(s) * r.powf(-(1.0 + s));
    v = v.scaled(scale);
    Ok(v)
}

/// `[−a + (α/β) b] √(α² + β²) / √(2 + (1+r²)(α/β)²)`, without the radial power.
fn integrand_direction(a: &VecN, b: &VecN, alpha: f64, beta: f64, r: f64) -> VecN {
    let ratio = alpha / beta;
    let magnitude =
        (alpha * alpha + beta * beta).sqrt() / (2.0 + (1.0 + r * r) * ratio * ratio).sqrt();
    let mut v = a.scaled(-magnitude);
    v.axpy(ratio * magnitude, b);
    v
}

/// Which parity classes a run integrates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Parity {
    /// `+1` on odd discs, `−1` on even discs.
    Signed,
    OddOnly,
    EvenOnly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureOptions {
    pub sampling: SamplingOptions,
    pub tolerances: Tolerances,
    /// Defaults to `1e−3 ×` curve scale.
    pub r_min: Option<f64>,
    /// Defaults to `2 × bounding_radius + scale`.
    pub r_max: Option<f64>,
}

impl CurvatureOptions {
    pub fn new(n_samples: u64, seed: u64) -> Self {
        Self {
            sampling: SamplingOptions::new(n_samples, seed),
            tolerances: Tolerances::default(),
            r_min: None,
            r_max: None,
        }
    }

    pub fn with_radii(mut self, r_min: f64, r_max: f64) -> Self {
        self.r_min = Some(r_min);
        self.r_max = Some(r_max);
        self
    }

    /// Resolved `(r_min, r_max)` for a curve.
    pub fn radii(&self, curve: &Curve) -> Result<(f64, f64)> {
        let r_min = self.r_min.unwrap_or(1e-3 * curve.scale());
        let r_max = self
            .r_max
            .unwrap_or(2.0 * bounding_radius(curve) + curve.scale());
        if !(r_min > 0.0) || !r_min.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "r_min must be positive, got {r_min}"
            )));
        }
        if !(r_max > r_min) || !r_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "r_max must exceed r_min, got r_min = {r_min}, r_max = {r_max}"
            )));
        }
        Ok((r_min, r_max))
    }
}

/// One row of the truncation sweep: the estimate restricted to `r ≥ r_min`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub r_min: f64,
    pub kappa_vector: VecN,
    pub std_error_vector: VecN,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureResult {
    pub s: f64,
    pub point: VecN,
    pub sigma: f64,
    pub normalization: Normalization,
    pub kappa_vector: VecN,
    pub kappa_scalar: f64,
    pub std_error_vector: VecN,
    pub r_min: f64,
    pub r_max: f64,
    pub sweep: Vec<SweepRow>,
    pub n_samples: u64,
    pub n_rejected_degenerate: u64,
    pub seed: u64,
    pub warnings: Vec<String>,
}

struct CurvatureSampler<'c> {
    curve: &'c Curve,
    classifier: Classifier<'c>,
    s: f64,
    z: VecN,
    t: UnitVecN,
    sigma: f64,
    r_min: f64,
    /// `r_min^{−σ} − r_max^{−σ}`.
    span: f64,
    /// `measure_uperp2(n) · (r_min^{−σ} − r_max^{−σ}) / σ · normalization`.
    weight: f64,
    parity: Parity,
}

impl<'c> CurvatureSampler<'c> {
    fn new(
        curve: &'c Curve,
        s: f64,
        sigma: SigmaParam,
        options: &CurvatureOptions,
        normalization: Normalization,
        parity: Parity,
    ) -> Result<Self> {
        let (s0, s1) = curve.param_range();
        if !(s >= s0 && s <= s1) {
            return Err(Error::InvalidParameter(format!(
                "parameter {s} lies outside the curve's range [{s0}, {s1}]"
            )));
        }
        let (r_min, r_max) = options.radii(curve)?;
        let sg = sigma.value();
        let span = r_min.powf(-sg) - r_max.powf(-sg);
        let weight = measure_uperp2(curve.dim())? * span / sg * normalization.factor(sg);
        Ok(Self {
            curve,
            classifier: Classifier::new(curve, options.tolerances)?,
            s,
            z: curve.eval(s),
            t: curve.tangent(s),
            sigma: sg,
            r_min,
            span,
            weight,
            parity,
        })
    }

    /// Writes the vector sample for each sweep threshold, `n` values each.
    fn sample(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<Draw> {
        let n = self.curve.dim();
        let pair = sample_perp_pair(n, rng)?;
        let u = open01(rng);
        // Inverse CDF of r^{−1−σ} on [r_min, r_max].
        let r = (self.r_min.powf(-self.sigma) - u * self.span).powf(-1.0 / self.sigma);
        let alpha = pair.a.dot(self.t.as_vec());
        let beta = pair.b.dot(self.t.as_vec());
        if beta.abs() < TANGENT_CUTOFF {
            return Ok(Draw::Degenerate);
        }
        let mut center = self.z.clone();
        center.axpy(r, pair.a.as_vec());
        let disc = Disc {
            center,
            normal: pair.b.clone(),
            radius: r,
        };
        let class = self.classifier.classify_with_rim_point(&disc, self.s);
        let sign = match (class.label, self.parity) {
            (DiscLabel::Odd, Parity::Signed | Parity::OddOnly) => 1.0,
            (DiscLabel::Even, Parity::Signed) => -1.0,
            (DiscLabel::Even, Parity::EvenOnly) => 1.0,
            (DiscLabel::Odd | DiscLabel::Even, _) => 0.0,
            _ => return Ok(Draw::Degenerate),
        };
        if sign == 0.0 {
            return Ok(Draw::Accepted);
        }
        let v = integrand_direction(&pair.a, &pair.b, alpha, beta, r);
        let w = sign * self.weight;
        for (k, factor) in SWEEP_FACTORS.iter().enumerate() {
            if r >= self.r_min * factor {
                for i in 0..n {
                    out[k * n + i] = w * v[i];
                }
            }
        }
        Ok(Draw::Accepted)
    }
}

fn run_curvature(
    curve: &Curve,
    s: f64,
    sigma: SigmaParam,
    options: &CurvatureOptions,
    normalization: Normalization,
) -> Result<CurvatureResult> {
    let sampler = CurvatureSampler::new(curve, s, sigma, options, normalization, Parity::Signed)?;
    let n = curve.dim();
    let run = run_blocks(&options.sampling, n * SWEEP_FACTORS.len(), |rng, out| {
        sampler.sample(rng, out)
    })?;
    let m = &run.moments;
    let sweep: Vec<SweepRow> = SWEEP_FACTORS
        .iter()
        .enumerate()
        .map(|(k, f)| SweepRow {
            r_min: sampler.r_min * f,
            kappa_vector: VecN::from_fn(n, |i| m.mean(k * n + i)),
            std_error_vector: VecN::from_fn(n, |i| m.std_error(k * n + i)),
        })
        .collect();
    let kappa_vector = sweep[0].kappa_vector.clone();
    if !kappa_vector.is_finite() {
        return Err(Error::Numerical("curvature estimate is not finite".into()));
    }
    let (_, r_max) = options.radii(curve)?;
    Ok(CurvatureResult {
        s,
        point: sampler.z.clone(),
        sigma: sigma.value(),
        normalization,
        kappa_scalar: kappa_vector.norm(),
        std_error_vector: sweep[0].std_error_vector.clone(),
        kappa_vector,
        r_min: sampler.r_min,
        r_max,
        sweep,
        n_samples: options.sampling.n_samples,
        n_rejected_degenerate: run.n_rejected,
        seed: options.sampling.seed,
        warnings: EstimatorResult::rejection_warning(run.n_rejected, options.sampling.n_samples),
    })
}

/// Estimates `κ_σ(eval(s))` with one signed integral over shared samples.
pub fn kappa_sigma(
    curve: &Curve,
    s: f64,
    sigma: SigmaParam,
    options: &CurvatureOptions,
) -> Result<CurvatureResult> {
    run_curvature(curve, s, sigma, options, Normalization::Curvature)
}

/// The Euler–Lagrange residual at `eval(s)`: the curvature estimator with
/// `(2r)^{1+σ}` normalization.
pub fn el_residual(
    curve: &Curve,
    s: f64,
    sigma: SigmaParam,
    options: &CurvatureOptions,
) -> Result<CurvatureResult> {
    run_curvature(curve, s, sigma, options, Normalization::EulerLagrange)
}

/// Odd and even integrals estimated from independent sample sets and
/// differenced. Only the full truncation (`r ≥ r_min`) is reported.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitCurvature {
    pub kappa_vector: VecN,
    pub std_error_vector: VecN,
    pub odd: VecN,
    pub even: VecN,
}

pub fn kappa_sigma_split(
    curve: &Curve,
    s: f64,
    sigma: SigmaParam,
    options: &CurvatureOptions,
) -> Result<SplitCurvature> {
    let n = curve.dim();
    let mut parts = Vec::with_capacity(2);
    for (i, parity) in [Parity::OddOnly, Parity::EvenOnly].into_iter().enumerate() {
        let sampler =
            CurvatureSampler::new(curve, s, sigma, options, Normalization::Curvature, parity)?;
        let mut sampling = options.sampling.clone();
        sampling.seed = derive_seed(options.sampling.seed, i as u64 + 1);
        let run = run_blocks(&sampling, n * SWEEP_FACTORS.len(), |rng, out| {
            sampler.sample(rng, out)
        })?;
        parts.push(run.moments);
    }
    let (odd, even) = (&parts[0], &parts[1]);
    Ok(SplitCurvature {
        kappa_vector: VecN::from_fn(n, |i| odd.mean(i) - even.mean(i)),
        std_error_vector: VecN::from_fn(n, |i| odd.std_error(i).hypot(even.std_error(i))),
        odd: VecN::from_fn(n, |i| odd.mean(i)),
        even: VecN::from_fn(n, |i| even.mean(i)),
    })
}
