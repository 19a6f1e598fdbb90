//! Deterministic reference values for tests, computed without the
//! curve-based parametrization used by the estimators.
//!
//! For a straight segment of length `L` centered in a ball window of radius
//! `R` in ℝ³, integrate over discs `(p, u, r)` directly. Writing
//! `p = x e₁ + v` with `x e₁` the crossing point of the disc's plane with the
//! segment line and `v` in the plane, `dp = |u₁| dx dv`. For fixed `(x, u)`
//! the set of `v` with `|v| < r` whose rim meets the window has area
//! `π r²` for `r ≤ ρ` and `π (2rρ − ρ²)` for `r > ρ`, with
//! `ρ² = R² − x² u₁²` the squared radius of the window's planar section.
//! Integrating `r^{−2−σ}` against that area gives `c(σ) ρ^{1−σ}` and leaves
//!
//! `Len_σ = 4π c(σ) ∫₀¹ t ∫_{−L/2}^{L/2} (R² − x² t²)^{(1−σ)/2} dx dt`,
//!
//! `c(σ) = π [1/(1−σ) + 2/σ − 1/(1+σ)]`.

use std::f64::consts::PI;

use crate::quadrature::gauss_legendre;

/// `∫₀^∞ A(r, ρ) r^{−2−σ} dr / ρ^{1−σ}`.
pub fn radial_factor(sigma: f64) -> f64 {
    PI * (1.0 / (1.0 - sigma) + 2.0 / sigma - 1.0 / (1.0 + sigma))
}

/// Area of `{v : |v − c| < r, | |v − o| − r | < ρ}` in the plane when
/// `|c − o| < ρ`.
pub fn section_area(r: f64, rho: f64) -> f64 {
    if r <= rho {
        PI * r * r
    } else {
        PI * (2.0 * r * rho - rho * rho)
    }
}

/// `Len_σ` of a segment of length `length` centered in a ball window of
/// radius `window_radius` in ℝ³, by an `order × order` Gauss–Legendre rule.
pub fn segment_len_sigma(length: f64, window_radius: f64, sigma: f64, order: usize) -> f64 {
    assert!(
        length < 2.0 * window_radius,
        "segment must lie inside the window"
    );
    let (nodes, weights) = gauss_legendre(order);
    let exponent = 0.5 * (1.0 - sigma);
    let r2 = window_radius * window_radius;
    let mut total = 0.0;
    for (ti, wt) in nodes.iter().zip(&weights) {
        let t = 0.5 * (ti + 1.0);
        let mut inner = 0.0;
        for (xi, wx) in nodes.iter().zip(&weights) {
            let x = 0.5 * length * xi;
            inner += wx * (r2 - x * x * t * t).powf(exponent);
        }
        total += wt * t * inner * 0.5 * length;
    }
    total *= 0.5;
    4.0 * PI * radial_factor(sigma) * total
}
