//! Monte-Carlo estimation of the fractional length
//!
//! `Len_σ(C, Ω) = ∫ r^{1−n−σ} dℋ^{2n}(p, u, r)` over discs that meet the curve
//! an odd number of times and whose rim meets the window `Ω`.
//!
//! Discs are parametrized from the curve as `(z + ξa, b, r)` with `z ∈ C`,
//! `(a, b)` an orthonormal pair and `0 < ξ < r < ξ + d(Ω)`; the change of
//! variables contributes `ξ^{n−2} |b·t(z)|`. Each disc is counted once,
//! either by keeping only samples whose `z` is the disc's canonical hit or by
//! dividing by the number of interior hits.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use serde::Serialize;
use statrs::function::beta::ln_beta;

use crate::curve::{arclength, ArclengthTable, Curve};
use crate::disc::{boundary_meets_window, Classifier, Disc, DiscLabel, Tolerances, Window};
use crate::error::{Error, Result};
use crate::geometry::{ball_volume, measure_uperp2, sample_perp_pair};
use crate::mc::{derive_seed, open01, run_blocks, Draw, SamplingOptions};

/// Smallest sample count accepted by the length estimators.
pub const MIN_SAMPLES: u64 = 1000;
/// Discs with `r` below this multiple of the curve scale are counted as a
/// single crossing at the sampled point without a grid scan.
pub const DEFAULT_NEAR_FIELD: f64 = 1e-6;
/// Rejection fraction above which a result carries a warning.
pub const REJECTION_WARNING: f64 = 0.01;

/// The fractional order `σ ∈ (0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct SigmaParam(f64);

impl SigmaParam {
    pub fn new(sigma: f64) -> Result<Self> {
        if sigma > 0.0 && sigma < 1.0 {
            Ok(Self(sigma))
        } else {
            Err(Error::InvalidParameter(format!(
                "sigma must lie in (0, 1), got {sigma}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Parameters of the sampling distribution, echoed with every result.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProposalDescriptor {
    pub name: String,
    pub params: Vec<(String, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimatorResult {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub n_rejected_degenerate: u64,
    pub seed: u64,
    pub proposal: ProposalDescriptor,
    pub warnings: Vec<String>,
}

impl EstimatorResult {
    pub(crate) fn rejection_warning(rejected: u64, n: u64) -> Vec<String> {
        let rate = rejected as f64 / n as f64;
        if rate >= REJECTION_WARNING {
            vec![format!(
                "degenerate draws were resampled at rate {rate:.4} (threshold {REJECTION_WARNING})"
            )]
        } else {
            Vec::new()
        }
    }
}

/// How multiply-covered discs are counted once.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Unbiasing {
    /// Keep a sample only when its curve point is the disc's canonical hit.
    CanonicalSelection,
    /// Weight every sample by one over the disc's interior hit count,
    /// counted on a four times finer grid without chunk culling.
    MultiplicityDivision,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LengthOptions {
    pub sampling: SamplingOptions,
    pub tolerances: Tolerances,
    pub unbiasing: Unbiasing,
    /// Near-field cutoff relative to the curve scale.
    pub near_field: f64,
}

impl LengthOptions {
    pub fn new(n_samples: u64, seed: u64) -> Self {
        Self {
            sampling: SamplingOptions::new(n_samples, seed),
            tolerances: Tolerances::default(),
            unbiasing: Unbiasing::CanonicalSelection,
            near_field: DEFAULT_NEAR_FIELD,
        }
    }
}

/// Joint proposal for `(ξ, r)` with density proportional to
/// `ξ^{n−2} r^{1−n−σ}` on `0 < ξ < r < ξ + d`.
///
/// With `ρ = ξ/r` the density factorizes: `ρ ~ Beta(n−1, σ)` and, given `ρ`,
/// `r` has density `∝ r^{−σ}` on `(0, d/(1−ρ))`. The importance weight is the
/// constant normalizer `d^{1−σ} B(n−1, σ)/(1−σ)`.
#[derive(Clone, Debug)]
pub(crate) struct RadialProposal {
    beta: Beta<f64>,
    diameter: f64,
    inv_exponent: f64,
    pub(crate) normalizer: f64,
}

impl RadialProposal {
    pub(crate) fn new(n: usize, sigma: f64, diameter: f64) -> Result<Self> {
        let beta = Beta::new((n - 1) as f64, sigma)
            .map_err(|e| Error::Configuration(format!("proposal: {e}")))?;
        let log_norm =
            (1.0 - sigma) * diameter.ln() + ln_beta((n - 1) as f64, sigma) - (1.0 - sigma).ln();
        let normalizer = log_norm.exp();
        if !normalizer.is_finite() || normalizer <= 0.0 {
            return Err(Error::Configuration(format!(
                "proposal normalizer is not finite (log value {log_norm})"
            )));
        }
        Ok(Self {
            beta,
            diameter,
            inv_exponent: 1.0 / (1.0 - sigma),
            normalizer,
        })
    }

    /// Draws `(ξ, r)`.
    pub(crate) fn sample(&self, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let rho: f64 = self.beta.sample(rng).min(1.0 - f64::EPSILON);
        let log_r = self.diameter.ln() - (-rho).ln_1p() + self.inv_exponent * open01(rng).ln();
        let r = log_r.exp();
        (rho * r, r)
    }

    fn descriptor(&self, n: usize, sigma: f64) -> ProposalDescriptor {
        ProposalDescriptor {
            name: "xi/r ~ Beta(n-1, sigma); r | xi/r ~ r^-sigma on (0, d/(1-xi/r))".into(),
            params: vec![
                ("n".into(), n as f64),
                ("sigma".into(), sigma),
                ("diameter".into(), self.diameter),
                ("normalizer".into(), self.normalizer),
            ],
        }
    }
}

/// Everything a length sample needs, built once per run.
struct LengthSampler<'c> {
    curve: &'c Curve,
    window: &'c Window,
    table: ArclengthTable,
    classifier: Classifier<'c>,
    proposal: RadialProposal,
    unbiasing: Unbiasing,
    near_field: f64,
    tangent_tol: f64,
    /// `ℋ¹(C) · measure_uperp2(n) · proposal normalizer`.
    weight: f64,
}

impl<'c> LengthSampler<'c> {
    fn new(
        curve: &'c Curve,
        window: &'c Window,
        sigma: SigmaParam,
        options: &LengthOptions,
    ) -> Result<Self> {
        let n = curve.dim();
        if window.center.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: window.center.dim(),
            });
        }
        if options.sampling.n_samples < MIN_SAMPLES {
            return Err(Error::InvalidParameter(format!(
                "length estimation needs at least {MIN_SAMPLES} samples, got {}",
                options.sampling.n_samples
            )));
        }
        if !window.contains_curve(curve) {
            return Err(Error::Precondition(
                "the curve is not contained in the window".into(),
            ));
        }
        let table = ArclengthTable::new(curve);
        let classifier = match options.unbiasing {
            Unbiasing::CanonicalSelection => Classifier::new(curve, options.tolerances)?,
            Unbiasing::MultiplicityDivision => {
                let fine = Tolerances {
                    grid: 4 * options.tolerances.grid,
                    ..options.tolerances
                };
                Classifier::exhaustive(curve, fine)?
            }
        };
        let proposal = RadialProposal::new(n, sigma.value(), window.diameter())?;
        let weight = table.total() * measure_uperp2(n)? * proposal.normalizer;
        Ok(Self {
            curve,
            window,
            table,
            classifier,
            proposal,
            unbiasing: options.unbiasing,
            near_field: options.near_field * curve.scale(),
            tangent_tol: options.tolerances.tangent,
            weight,
        })
    }

    fn sample(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<Draw> {
        let n = self.curve.dim();
        let s = self
            .table
            .param_at(self.curve, rng.random::<f64>() * self.table.total());
        let z = self.curve.eval(s);
        let t = self.curve.tangent(s);
        let pair = sample_perp_pair(n, rng)?;
        let (xi, r) = self.proposal.sample(rng);
        let bt = pair.b.dot(t.as_vec()).abs();
        if bt < self.tangent_tol {
            return Ok(Draw::Degenerate);
        }
        let mut p = z;
        p.axpy(xi, pair.a.as_vec());
        let disc = Disc {
            center: p,
            normal: pair.b,
            radius: r,
        };
        if !boundary_meets_window(&disc, self.window) {
            return Ok(Draw::Accepted);
        }
        let share = if r < self.near_field {
            1.0
        } else {
            let class = self.classifier.classify_with_member(&disc, s);
            match class.label {
                DiscLabel::Odd => {}
                DiscLabel::Even => return Ok(Draw::Accepted),
                _ => return Ok(Draw::Degenerate),
            }
            match self.unbiasing {
                Unbiasing::CanonicalSelection => {
                    let own = class
                        .interior_hits
                        .iter()
                        .find(|h| h.s == s)
                        .map(|h| (h.distance, h.s))
                        .expect("the sampled point is an interior hit");
                    let canonical = class
                        .interior_hits
                        .iter()
                        .all(|h| h.s == s || (h.distance, h.s) > own);
                    if canonical {
                        1.0
                    } else {
                        0.0
                    }
                }
                Unbiasing::MultiplicityDivision => 1.0 / class.count as f64,
            }
        };
        out[0] = self.weight * bt * share;
        Ok(Draw::Accepted)
    }
}

/// `Len_σ(C, Ω)` with default options.
pub fn len_sigma(
    curve: &Curve,
    window: &Window,
    sigma: SigmaParam,
    n_samples: u64,
    seed: u64,
) -> Result<EstimatorResult> {
    len_sigma_with(curve, window, sigma, &LengthOptions::new(n_samples, seed))
}

pub fn len_sigma_with(
    curve: &Curve,
    window: &Window,
    sigma: SigmaParam,
    options: &LengthOptions,
) -> Result<EstimatorResult> {
    let sampler = LengthSampler::new(curve, window, sigma, options)?;
    let run = run_blocks(&options.sampling, 1, |rng, out| sampler.sample(rng, out))?;
    let n = options.sampling.n_samples;
    let estimate = run.moments.mean(0);
    if !estimate.is_finite() {
        return Err(Error::Numerical("length estimate is not finite".into()));
    }
    let mut proposal = sampler.proposal.descriptor(curve.dim(), sigma.value());
    proposal
        .params
        .push(("arclength".into(), sampler.table.total()));
    proposal
        .params
        .push(("near_field".into(), sampler.near_field));
    Ok(EstimatorResult {
        estimate,
        std_error: run.moments.std_error(0),
        n_samples: n,
        n_rejected_degenerate: run.n_rejected,
        seed: options.sampling.seed,
        proposal,
        warnings: EstimatorResult::rejection_warning(run.n_rejected, n),
    })
}

/// `4 α_{n−1} α_{n−2} / (n−1)`, the limit constant as stated for the σ ↑ 1
/// limit of `(1−σ) Len_σ / ℋ¹(C)`.
pub fn limit_constant(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidDimension {
            got: n,
            reason: "the limit constant is defined for n >= 3",
        });
    }
    Ok(4.0 * ball_volume(n - 1) * ball_volume(n - 2) / (n - 1) as f64)
}

/// `2 α_{n−1}²`: the limit constant obtained from the exact value
/// `2(n−1) α_{n−1}²` of `∫|b·c|` over orthonormal pairs, divided by `n − 1`.
pub fn projection_limit_constant(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidDimension {
            got: n,
            reason: "the limit constant is defined for n >= 3",
        });
    }
    Ok(2.0 * ball_volume(n - 1).powi(2))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitSweepRow {
    pub sigma: f64,
    /// `(1−σ) Len_σ`.
    pub scaled_estimate: f64,
    pub std_error: f64,
    pub result: EstimatorResult,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitSweep {
    pub rows: Vec<LimitSweepRow>,
    /// Least-squares value of `(1−σ) Len_σ` at `σ = 1`.
    pub extrapolated: f64,
    /// Monte-Carlo error of `extrapolated`, propagated through the fit.
    pub extrapolated_std_error: f64,
    pub slope: f64,
    pub residuals: Vec<f64>,
    pub arclength: f64,
}

/// Runs one length estimate per σ (row seeds derived from `seed`) and fits
/// `(1−σ) Len_σ` linearly in `1−σ`.
pub fn limit_sweep(
    curve: &Curve,
    window: &Window,
    sigmas: &[SigmaParam],
    options: &LengthOptions,
) -> Result<LimitSweep> {
    if sigmas.len() < 2 {
        return Err(Error::InvalidParameter(
            "the sweep needs at least two sigma values".into(),
        ));
    }
    if sigmas.windows(2).any(|w| w[1].value() <= w[0].value()) {
        return Err(Error::InvalidParameter(
            "sigma values must be strictly increasing".into(),
        ));
    }
    let mut rows = Vec::with_capacity(sigmas.len());
    for (i, &sigma) in sigmas.iter().enumerate() {
        let mut row_options = options.clone();
        row_options.sampling.seed = derive_seed(options.sampling.seed, i as u64);
        let result = len_sigma_with(curve, window, sigma, &row_options)?;
        let k = 1.0 - sigma.value();
        rows.push(LimitSweepRow {
            sigma: sigma.value(),
            scaled_estimate: k * result.estimate,
            std_error: k * result.std_error,
            result,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| 1.0 - r.sigma).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.scaled_estimate).collect();
    let fit = ols(&xs, &ys);
    let extrapolated_std_error = fit
        .intercept_coefficients
        .iter()
        .zip(&rows)
        .map(|(c, r)| (c * r.std_error).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(LimitSweep {
        residuals: xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| y - fit.intercept - fit.slope * x)
            .collect(),
        rows,
        extrapolated: fit.intercept,
        extrapolated_std_error,
        slope: fit.slope,
        arclength: arclength(curve, 1e-10 * curve.scale())?,
    })
}

pub(crate) struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    /// `intercept = Σ cᵢ yᵢ`.
    pub intercept_coefficients: Vec<f64>,
}

pub(crate) fn ols(xs: &[f64], ys: &[f64]) -> LinearFit {
    let m = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    LinearFit {
        intercept: ybar - slope * xbar,
        slope,
        intercept_coefficients: xs
            .iter()
            .map(|x| 1.0 / m - xbar * (x - xbar) / sxx)
            .collect(),
    }
}
