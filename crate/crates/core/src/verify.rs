//! Numerical checks of the change-of-variables identities used by the
//! estimators: Gram-determinant Jacobians of the maps
//!
//! - `Φ(z, a, b, ξ) = (z + ξa, b)`
//! - `Ξ(z, a, b, ξ, r) = (z + ξa, b, r)`
//! - `Ψ(z, a, b, r) = (z + ra, b, r)`
//!
//! the unit normal of the boundary-disc manifold, and the integral of
//! `|b·c|` over orthonormal pairs.
//!
//! Finite differences run along an orthonormal basis of the domain tangent
//! space as embedded in `ℝⁿ × ℝⁿ`, whose only coupled direction is
//! `(b, −a)/√2`. That embedded measure is `√2` times the product measure
//! used by the estimators, so [`fd_gram_jacobian`] reports the product-measure
//! value and [`fd_gram_jacobian_embedded`] the raw one.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::fraclen::{EstimatorResult, ProposalDescriptor};
use crate::geometry::{
    ball_volume, measure_uperp2, orthonormal_complement, sample_perp_pair,
    uperp2_abs_projection_integral, PerpPair, UnitVecN, VecN, EMBEDDED_TO_PRODUCT_DENSITY,
};
use crate::mc::{run_blocks, Draw, SamplingOptions};

/// Smallest `|b·t|` accepted at a Jacobian test point for `Φ` and `Ξ`.
pub const MIN_TANGENT_PROJECTION: f64 = 1e-6;
/// Smallest `(a·t)² + (b·t)²` accepted at a `Ψ` test point.
pub const MIN_PSI_PROJECTION: f64 = 1e-12;
/// Floor on the denominator of a relative error.
pub const REL_ERROR_FLOOR: f64 = 1e-300;
/// Default boundary-membership tolerance for [`normal_vector_m`], relative to
/// `max(r, 1)`.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MapId {
    Phi,
    Xi,
    Psi,
}

impl MapId {
    pub const ALL: [MapId; 3] = [MapId::Phi, MapId::Xi, MapId::Psi];

    /// Dimension of the domain for a curve in ℝⁿ.
    pub fn domain_dim(self, n: usize) -> usize {
        match self {
            MapId::Phi | MapId::Psi => 2 * n - 1,
            MapId::Xi => 2 * n,
        }
    }
}

impl fmt::Display for MapId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapId::Phi => "phi",
            MapId::Xi => "xi",
            MapId::Psi => "psi",
        })
    }
}

impl FromStr for MapId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "phi" => Ok(MapId::Phi),
            "xi" => Ok(MapId::Xi),
            "psi" => Ok(MapId::Psi),
            other => Err(Error::InvalidParameter(format!(
                "unknown map '{other}' (expected phi, xi or psi)"
            ))),
        }
    }
}

/// A point of `C × 𝒰⊥² × ℝ⁺ [× ℝ⁺]`: curve parameter, orthonormal pair and
/// the scalar coordinates. `Φ` reads `xi`, `Ψ` reads `r`, `Ξ` reads both.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldPoint {
    pub s: f64,
    pub pair: PerpPair,
    pub xi: f64,
    pub r: f64,
}

impl ManifoldPoint {
    pub fn new(s: f64, pair: PerpPair, xi: f64, r: f64) -> Result<Self> {
        if !(xi > 0.0 && r > 0.0 && xi.is_finite() && r.is_finite() && s.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "manifold point needs finite s and positive xi, r; got s = {s}, xi = {xi}, r = {r}"
            )));
        }
        let tol = 1e-12;
        let (a, b) = (&pair.a, &pair.b);
        if (a.norm() - 1.0).abs() > tol || (b.norm() - 1.0).abs() > tol || a.dot(b).abs() > tol {
            return Err(Error::Precondition("pair is not orthonormal".into()));
        }
        Ok(Self { s, pair, xi, r })
    }

    /// Flat list of coordinates `(s, a, b, xi, r)`.
    pub fn coordinates(&self) -> Vec<f64> {
        let mut v = vec![self.s];
        v.extend_from_slice(self.pair.a.as_slice());
        v.extend_from_slice(self.pair.b.as_slice());
        v.push(self.xi);
        v.push(self.r);
        v
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JacobianReport {
    pub map: MapId,
    #[serde(skip)]
    pub point: ManifoldPoint,
    /// Product-measure Jacobian from finite differences.
    pub fd_gram_sqrt: f64,
    /// Raw `√det` of the Gram matrix in the embedded basis.
    pub fd_gram_embedded: f64,
    /// The closed-form factor being checked.
    pub closed_form: f64,
    pub rel_error: f64,
    /// The product-measure Jacobian derived for this map.
    pub exact: f64,
    pub exact_rel_error: f64,
}

fn rel_error(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(REL_ERROR_FLOOR)
}

fn check_point(curve: &Curve, map: MapId, point: &ManifoldPoint) -> Result<(f64, f64)> {
    if point.pair.dim() != curve.dim() {
        return Err(Error::DimensionMismatch {
            expected: curve.dim(),
            got: point.pair.dim(),
        });
    }
    let (s0, s1) = curve.param_range();
    if !(point.s >= s0 && point.s <= s1) {
        return Err(Error::Precondition(format!(
            "s = {} outside [{s0}, {s1}]",
            point.s
        )));
    }
    let t = curve.tangent(point.s);
    let alpha = point.pair.a.dot(t.as_vec());
    let beta = point.pair.b.dot(t.as_vec());
    match map {
        MapId::Phi | MapId::Xi if beta.abs() <= MIN_TANGENT_PROJECTION => {
            Err(Error::Precondition(format!(
                "|b·t| = {} is at or below {MIN_TANGENT_PROJECTION}",
                beta.abs()
            )))
        }
        MapId::Psi if alpha * alpha + beta * beta <= MIN_PSI_PROJECTION => {
            Err(Error::Precondition(format!(
                "(a·t)² + (b·t)² = {} is at or below {MIN_PSI_PROJECTION}",
                alpha * alpha + beta * beta
            )))
        }
        _ => Ok((alpha, beta)),
    }
}

/// The factor stated for each map: `ξ^{n−2}|b·t|` for `Φ` and `Ξ`, and
/// `(2r)^{n−2}√((a·t)² + (b·t)²)` for `Ψ`.
pub fn closed_form_jacobian(curve: &Curve, map: MapId, point: &ManifoldPoint) -> Result<f64> {
    let (alpha, beta) = check_point(curve, map, point)?;
    Ok(closed_form_factor(map, curve.dim(), point, alpha, beta))
}

/// [`closed_form_jacobian`] from the projections `a·t`, `b·t` directly, with
/// no degeneracy check.
pub fn closed_form_factor(
    map: MapId,
    n: usize,
    point: &ManifoldPoint,
    alpha: f64,
    beta: f64,
) -> f64 {
    let k = n as i32 - 2;
    match map {
        MapId::Phi | MapId::Xi => point.xi.powi(k) * beta.abs(),
        MapId::Psi => (2.0 * point.r).powi(k) * alpha.hypot(beta),
    }
}

/// Product-measure Jacobian: `ξ^{n−2}|b·t|` for `Φ` and `Ξ`, and
/// `r^{n−2}√(2(b·t)² + (1 + r²)(a·t)²)` for `Ψ`.
pub fn exact_jacobian(curve: &Curve, map: MapId, point: &ManifoldPoint) -> Result<f64> {
    let (alpha, beta) = check_point(curve, map, point)?;
    let k = curve.dim() as i32 - 2;
    Ok(match map {
        MapId::Phi | MapId::Xi => point.xi.powi(k) * beta.abs(),
        MapId::Psi => {
            point.r.powi(k) * (2.0 * beta * beta + (1.0 + point.r * point.r) * alpha * alpha).sqrt()
        }
    })
}

/// Evaluates a map at `(s, a, b, xi, r)`.
fn apply_map(curve: &Curve, map: MapId, s: f64, a: &VecN, b: &VecN, xi: f64, r: f64) -> Vec<f64> {
    let z = curve.eval(s);
    let n = z.dim();
    let radius = if map == MapId::Psi { r } else { xi };
    let mut out = Vec::with_capacity(2 * n + 1);
    out.extend((0..n).map(|i| z[i] + radius * a[i]));
    out.extend_from_slice(b.as_slice());
    if map != MapId::Phi {
        out.push(r);
    }
    out
}

fn rotate_towards(v: &VecN, e: &VecN, angle: f64) -> VecN {
    let (s, c) = angle.sin_cos();
    let mut out = v.scaled(c);
    out.axpy(s, e);
    out
}

/// `√det` of the Gram matrix of central-difference images of the embedded
/// orthonormal tangent basis: the unit curve direction, `(e_i, 0)`,
/// `(0, e_i)` for `e_i ⊥ a, b`, `(b, −a)/√2`, and the scalar directions.
/// Sphere factors move along great circles.
pub fn fd_gram_jacobian_embedded(
    curve: &Curve,
    map: MapId,
    point: &ManifoldPoint,
    h: f64,
) -> Result<f64> {
    if !(1e-7..=1e-3).contains(&h) {
        return Err(Error::InvalidParameter(format!(
            "step h = {h} outside [1e-7, 1e-3]"
        )));
    }
    check_point(curve, map, point)?;
    let n = curve.dim();
    let (a, b) = (point.pair.a.as_vec(), point.pair.b.as_vec());
    let (s, xi, r) = (point.s, point.xi, point.r);
    let complement = orthonormal_complement(&[a, b], n);
    let eval = |sign: f64, dir: usize| -> Vec<f64> {
        let step = sign * h;
        let mut idx = dir;
        if idx == 0 {
            let ds = step / curve.speed(s);
            return apply_map(curve, map, s + ds, a, b, xi, r);
        }
        idx -= 1;
        if idx < n - 2 {
            let a2 = rotate_towards(a, &complement[idx], step);
            return apply_map(curve, map, s, &a2, b, xi, r);
        }
        idx -= n - 2;
        if idx < n - 2 {
            let b2 = rotate_towards(b, &complement[idx], step);
            return apply_map(curve, map, s, a, &b2, xi, r);
        }
        idx -= n - 2;
        if idx == 0 {
            // (a, b) ↦ (cos θ a + sin θ b, cos θ b − sin θ a) has speed √2.
            let rotated = point.pair.rotated(step / std::f64::consts::SQRT_2);
            return apply_map(curve, map, s, &rotated.a, &rotated.b, xi, r);
        }
        idx -= 1;
        match (map, idx) {
            (MapId::Phi, 0) | (MapId::Xi, 0) => apply_map(curve, map, s, a, b, xi + step, r),
            (MapId::Xi, 1) | (MapId::Psi, 0) => apply_map(curve, map, s, a, b, xi, r + step),
            _ => unreachable!("direction index out of range"),
        }
    };
    let dim = map.domain_dim(n);
    let rows = apply_map(curve, map, s, a, b, xi, r).len();
    let mut jac = DMatrix::<f64>::zeros(rows, dim);
    for dir in 0..dim {
        let plus = eval(1.0, dir);
        let minus = eval(-1.0, dir);
        for i in 0..rows {
            jac[(i, dir)] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    let gram = jac.transpose() * &jac;
    Ok(gram.determinant().max(0.0).sqrt())
}

/// Product-measure Jacobian from finite differences.
pub fn fd_gram_jacobian(curve: &Curve, map: MapId, point: &ManifoldPoint, h: f64) -> Result<f64> {
    Ok(EMBEDDED_TO_PRODUCT_DENSITY * fd_gram_jacobian_embedded(curve, map, point, h)?)
}

/// Compares the finite-difference Jacobian with both closed forms.
pub fn jacobian_report(
    curve: &Curve,
    map: MapId,
    point: &ManifoldPoint,
    h: f64,
) -> Result<JacobianReport> {
    let embedded = fd_gram_jacobian_embedded(curve, map, point, h)?;
    let fd = EMBEDDED_TO_PRODUCT_DENSITY * embedded;
    let closed = closed_form_jacobian(curve, map, point)?;
    let exact = exact_jacobian(curve, map, point)?;
    Ok(JacobianReport {
        map,
        point: point.clone(),
        fd_gram_sqrt: fd,
        fd_gram_embedded: embedded,
        closed_form: closed,
        rel_error: rel_error(fd, closed),
        exact,
        exact_rel_error: rel_error(fd, exact),
    })
}

/// Draws a test point with `s` away from the ends of the parameter range,
/// `ξ, r ∈ [0.1, 2] ×` curve scale and `|b·t| ≥ min_projection`.
pub fn random_manifold_point<R: Rng + ?Sized>(
    curve: &Curve,
    map: MapId,
    min_projection: f64,
    rng: &mut R,
) -> Result<ManifoldPoint> {
    let n = curve.dim();
    let (s0, s1) = curve.param_range();
    let scale = curve.scale().max(1e-3);
    for _ in 0..10_000 {
        let s = s0 + (s1 - s0) * (0.05 + 0.9 * rng.random::<f64>());
        let pair = sample_perp_pair(n, rng)?;
        let t = curve.tangent(s);
        let (alpha, beta) = (pair.a.dot(t.as_vec()), pair.b.dot(t.as_vec()));
        let projection = match map {
            MapId::Phi | MapId::Xi => beta.abs(),
            MapId::Psi => alpha.hypot(beta),
        };
        if projection < min_projection.max(MIN_TANGENT_PROJECTION) {
            continue;
        }
        let xi = scale * (0.1 + 1.9 * rng.random::<f64>());
        let r = scale * (0.1 + 1.9 * rng.random::<f64>());
        return ManifoldPoint::new(s, pair, xi, r);
    }
    Err(Error::Degenerate("no non-degenerate point found".into()))
}

/// Unit normal of the boundary-disc manifold at `(p, u, r)`, where `z` is the
/// curve point on the rim and `t` the tangent there:
///
/// `m = (z − p + k u, k (p − z), r) / √(|p−z|² + k²|z−p|² + k² + r²)`,
/// `k = ((p − z)·t)/(u·t)`.
pub fn normal_vector_m(p: &VecN, u: &UnitVecN, r: f64, z: &VecN, t: &UnitVecN) -> Result<VecN> {
    normal_vector_m_with_tol(p, u, r, z, t, BOUNDARY_TOL)
}

/// [`normal_vector_m`] with an explicit boundary-membership tolerance
/// (relative to `max(r, 1)`).
pub fn normal_vector_m_with_tol(
    p: &VecN,
    u: &UnitVecN,
    r: f64,
    z: &VecN,
    t: &UnitVecN,
    tol: f64,
) -> Result<VecN> {
    let n = p.dim();
    for d in [u.dim(), z.dim(), t.dim()] {
        if d != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: d,
            });
        }
    }
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "radius must be positive, got {r}"
        )));
    }
    let d = p - z;
    let tol_abs = tol * r.max(1.0);
    let plane_gap = d.dot(u.as_vec()).abs();
    let rim_gap = (d.norm() - r).abs();
    if plane_gap > tol_abs || rim_gap > tol_abs {
        return Err(Error::Precondition(format!(
            "z is not on the disc's rim (plane gap {plane_gap:.3e}, rim gap {rim_gap:.3e})"
        )));
    }
    let ut = u.dot(t.as_vec());
    if ut.abs() < 1e-9 {
        return Err(Error::Precondition(format!(
            "|u·t| = {} is tangential",
            ut.abs()
        )));
    }
    let k = d.dot(t.as_vec()) / ut;
    let dd = d.norm_squared();
    let normalizer = (dd + k * k * dd + k * k + r * r).sqrt();
    let mut out = Vec::with_capacity(2 * n + 1);
    out.extend((0..n).map(|i| (-d[i] + k * u[i]) / normalizer));
    out.extend((0..n).map(|i| k * d[i] / normalizer));
    out.push(r / normalizer);
    VecN::new(&out)
}

/// Tangent vectors of the boundary-disc manifold at `(z + ra, b, r)`:
/// `(t, 0, 0)`, `(c, 0, 0)`, `(0, d, 0)`, `(a, 0, 1)`, `(rb, −a, 0)`, with
/// `c` and `d` running over an orthonormal basis of `{a, b}⊥`.
pub fn boundary_tangent_vectors(a: &UnitVecN, b: &UnitVecN, r: f64, t: &UnitVecN) -> Vec<VecN> {
    let n = a.dim();
    let complement = orthonormal_complement(&[a.as_vec(), b.as_vec()], n);
    let stack = |x: &VecN, y: &VecN, w: f64| {
        let mut v: Vec<f64> = x.as_slice().to_vec();
        v.extend_from_slice(y.as_slice());
        v.push(w);
        VecN::new(&v).expect("finite")
    };
    let zero = VecN::zeros(n);
    let mut out = vec![stack(t.as_vec(), &zero, 0.0)];
    for c in &complement {
        out.push(stack(c.as_vec(), &zero, 0.0));
    }
    for d in &complement {
        out.push(stack(&zero, d.as_vec(), 0.0));
    }
    out.push(stack(a.as_vec(), &zero, 1.0));
    out.push(stack(&b.scaled(r), &a.scaled(-1.0), 0.0));
    out
}

/// Monte-Carlo value of `∫ |b·c|` over orthonormal pairs (product measure)
/// compared with the stated value `4α_{n−1}α_{n−2}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaIntReport {
    pub n: usize,
    pub result: EstimatorResult,
    pub target: f64,
    /// `(estimate − target) / std_error`.
    pub z_score: f64,
    /// `2(n−1)α_{n−1}²`.
    pub exact: f64,
    pub exact_z_score: f64,
}

/// The stated value `4α_{n−1}α_{n−2}`.
pub fn lemma_int_target(n: usize) -> f64 {
    4.0 * ball_volume(n - 1) * ball_volume(n - 2)
}

pub fn verify_lemma_int(
    n: usize,
    c: &UnitVecN,
    options: &SamplingOptions,
) -> Result<LemmaIntReport> {
    let measure = measure_uperp2(n)?;
    if c.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: c.dim(),
        });
    }
    let run = run_blocks(options, 1, |rng, out| {
        let pair = sample_perp_pair(n, rng)?;
        out[0] = measure * pair.b.dot(c.as_vec()).abs();
        Ok(Draw::Accepted)
    })?;
    let estimate = run.moments.mean(0);
    let std_error = run.moments.std_error(0);
    let target = lemma_int_target(n);
    let exact = uperp2_abs_projection_integral(n)?;
    Ok(LemmaIntReport {
        n,
        result: EstimatorResult {
            estimate,
            std_error,
            n_samples: options.n_samples,
            n_rejected_degenerate: run.n_rejected,
            seed: options.seed,
            proposal: ProposalDescriptor {
                name: "uniform_perp_pair".into(),
                params: vec![("n".into(), n as f64), ("measure".into(), measure)],
            },
            warnings: Vec::new(),
        },
        target,
        z_score: (estimate - target) / std_error,
        exact,
        exact_z_score: (estimate - exact) / std_error,
    })
}
