//! Vector arithmetic in ℝⁿ, uniform sampling on spheres and on the manifold
//! of orthonormal pairs, and the ball/sphere measure constants.
//!
//! The pair manifold `{(a, b) : |a| = |b| = 1, a·b = 0}` is always measured
//! with the iterated product measure: surface measure on the sphere for `a`,
//! then surface measure on the great sphere of `{a}⊥` for `b`. Its total mass
//! is [`measure_uperp2`]. This differs from the Hausdorff measure of the pair
//! manifold embedded in ℝ²ⁿ by a constant factor of √2 (see
//! [`EMBEDDED_TO_PRODUCT_DENSITY`]).

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::StandardNormal;
use smallvec::SmallVec;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Density of the embedded Hausdorff measure of the orthonormal-pair manifold
/// relative to the iterated product measure. The projection `(a, b) ↦ a` has
/// normal Jacobian `1/√2` because the coupled tangent direction `(b, −a)/√2`
/// maps to `b/√2`.
pub const EMBEDDED_TO_PRODUCT_DENSITY: f64 = std::f64::consts::SQRT_2;

type Components = SmallVec<[f64; 6]>;

/// A point or direction in ℝⁿ.
#[derive(Clone, Debug, PartialEq)]
pub struct VecN(Components);

impl VecN {
    /// Builds a vector, rejecting NaN and infinite components.
    pub fn new(components: &[f64]) -> Result<Self> {
        if components.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(Components::from_slice(components)))
    }

    pub fn zeros(n: usize) -> Self {
        Self(smallvec::smallvec![0.0; n])
    }

    /// The `i`-th standard basis vector of ℝⁿ.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = 1.0;
        v
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> f64) -> Self {
        Self((0..n).map(f).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn dot(&self, other: &VecN) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(x, y)| x * y).sum()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn distance(&self, other: &VecN) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, k: f64) -> VecN {
        Self(self.0.iter().map(|x| k * x).collect())
    }

    /// `self += k·x`
    pub fn axpy(&mut self, k: f64, x: &VecN) {
        for (s, xi) in self.0.iter_mut().zip(&x.0) {
            *s += k * xi;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl serde::Serialize for VecN {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter())
    }
}

impl Index<usize> for VecN {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &VecN {
    type Output = VecN;

    fn add(self, rhs: &VecN) -> VecN {
        VecN(self.0.iter().zip(&rhs.0).map(|(x, y)| x + y).collect())
    }
}

impl Sub for &VecN {
    type Output = VecN;

    fn sub(self, rhs: &VecN) -> VecN {
        VecN(self.0.iter().zip(&rhs.0).map(|(x, y)| x - y).collect())
    }
}

impl Add for VecN {
    type Output = VecN;

    fn add(self, rhs: VecN) -> VecN {
        &self + &rhs
    }
}

impl Sub for VecN {
    type Output = VecN;

    fn sub(self, rhs: VecN) -> VecN {
        &self - &rhs
    }
}

impl AddAssign<&VecN> for VecN {
    fn add_assign(&mut self, rhs: &VecN) {
        self.axpy(1.0, rhs);
    }
}

impl Mul<f64> for &VecN {
    type Output = VecN;

    fn mul(self, k: f64) -> VecN {
        self.scaled(k)
    }
}

impl Mul<f64> for VecN {
    type Output = VecN;

    fn mul(self, k: f64) -> VecN {
        self.scaled(k)
    }
}

impl Neg for &VecN {
    type Output = VecN;

    fn neg(self) -> VecN {
        self.scaled(-1.0)
    }
}

/// A unit vector; renormalized on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitVecN(VecN);

impl UnitVecN {
    pub fn new(v: VecN) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::NonFinite);
        }
        let norm = v.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        let mut u = v.scaled(1.0 / norm);
        // A second pass brings |u| to within an ulp or two of 1.
        let again = u.norm();
        if again != 1.0 {
            u = u.scaled(1.0 / again);
        }
        Ok(Self(u))
    }

    pub fn from_slice(components: &[f64]) -> Result<Self> {
        Self::new(VecN::new(components)?)
    }

    pub fn basis(n: usize, i: usize) -> Self {
        Self(VecN::basis(n, i))
    }

    pub fn as_vec(&self) -> &VecN {
        &self.0
    }

    pub fn into_vec(self) -> VecN {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn dot(&self, other: &VecN) -> f64 {
        self.0.dot(other)
    }
}

impl std::ops::Deref for UnitVecN {
    type Target = VecN;

    fn deref(&self) -> &VecN {
        &self.0
    }
}

/// An ordered pair of orthonormal vectors `(a, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PerpPair {
    pub a: UnitVecN,
    pub b: UnitVecN,
}

impl PerpPair {
    /// Re-orthogonalizes `b` against `a` (one Gram–Schmidt step) and
    /// renormalizes.
    pub fn new(a: UnitVecN, b: VecN) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: b.dim(),
            });
        }
        let mut b = b;
        for _ in 0..2 {
            let k = a.dot(&b);
            b.axpy(-k, a.as_vec());
        }
        let b = UnitVecN::new(b)?;
        Ok(Self { a, b })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// Rotates the pair by angle `theta` inside its own plane:
    /// `a ↦ cos θ a + sin θ b`, `b ↦ cos θ b − sin θ a`.
    pub fn rotated(&self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let a = &self.a.scaled(c) + &self.b.scaled(s);
        let b = &self.b.scaled(c) - &self.a.scaled(s);
        Self {
            a: UnitVecN::new(a).expect("rotation of a unit pair"),
            b: UnitVecN::new(b).expect("rotation of a unit pair"),
        }
    }
}

/// Splits `v` into its component along `u` and the orthogonal remainder.
pub fn perp_decompose(v: &VecN, u: &UnitVecN) -> (VecN, VecN) {
    let parallel = u.scaled(u.dot(v));
    let perpendicular = v - &parallel;
    (parallel, perpendicular)
}

/// Orthonormal basis of the complement of `span(vectors)`, built by
/// Gram–Schmidt against the standard basis. The inputs must be orthonormal.
pub fn orthonormal_complement(vectors: &[&VecN], n: usize) -> Vec<UnitVecN> {
    let mut basis: Vec<VecN> = vectors.iter().map(|v| (*v).clone()).collect();
    let mut out = Vec::with_capacity(n.saturating_sub(vectors.len()));
    for i in 0..n {
        if basis.len() == n {
            break;
        }
        let mut e = VecN::basis(n, i);
        for _ in 0..2 {
            for q in &basis {
                let k = q.dot(&e);
                e.axpy(-k, q);
            }
        }
        let norm = e.norm();
        if norm > 1e-8 {
            let e = e.scaled(1.0 / norm);
            basis.push(e.clone());
            out.push(UnitVecN::new(e).expect("nonzero"));
        }
    }
    out
}

fn check_dimension(n: usize, min: usize, reason: &'static str) -> Result<()> {
    if n < min {
        Err(Error::InvalidDimension { got: n, reason })
    } else {
        Ok(())
    }
}

/// Uniform sample on the unit sphere of ℝⁿ (normalized Gaussian).
pub fn sample_unit_sphere<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<UnitVecN> {
    check_dimension(n, 1, "sphere sampling needs n >= 1")?;
    loop {
        let g = VecN::from_fn(n, |_| rng.sample(StandardNormal));
        let norm = g.norm();
        if norm > 1e-150 {
            return UnitVecN::new(g.scaled(1.0 / norm));
        }
    }
}

/// Samples `(a, b)` with `a` uniform on the sphere and `b` uniform on the
/// great sphere of `{a}⊥`.
pub fn sample_perp_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PerpPair> {
    check_dimension(n, 3, "orthonormal pairs are sampled for n >= 3")?;
    let a = sample_unit_sphere(n, rng)?;
    loop {
        let mut g = VecN::from_fn(n, |_| rng.sample(StandardNormal));
        let k = a.dot(&g);
        g.axpy(-k, a.as_vec());
        if g.norm() > 1e-150 {
            return PerpPair::new(a, g);
        }
    }
}

/// Volume of the unit ball in ℝᵏ, `π^{k/2} / Γ(k/2 + 1)`.
pub fn ball_volume(k: usize) -> f64 {
    let half = k as f64 / 2.0;
    (half * PI.ln() - ln_gamma(half + 1.0)).exp()
}

/// Surface area of the unit sphere in ℝᵏ, `2π^{k/2} / Γ(k/2)`.
pub fn sphere_area(k: usize) -> Result<f64> {
    check_dimension(k, 1, "sphere area needs k >= 1")?;
    let half = k as f64 / 2.0;
    Ok(2.0 * (half * PI.ln() - ln_gamma(half)).exp())
}

/// Total product measure of the orthonormal-pair manifold in ℝⁿ.
pub fn measure_uperp2(n: usize) -> Result<f64> {
    check_dimension(n, 3, "orthonormal-pair measure needs n >= 3")?;
    Ok(sphere_area(n)? * sphere_area(n - 1)?)
}

/// Exact value of `∫ |b·c|` over the orthonormal-pair manifold (product
/// measure) for any unit `c`: the marginal of `b` is uniform, so the
/// integral is `sphere_area(n−1) · ∫_{Sⁿ⁻¹}|x·c| = sphere_area(n−1) · 2α_{n−1}`,
/// which equals `2(n−1)α_{n−1}²`.
pub fn uperp2_abs_projection_integral(n: usize) -> Result<f64> {
    check_dimension(n, 3, "orthonormal-pair integral needs n >= 3")?;
    Ok(sphere_area(n - 1)? * 2.0 * ball_volume(n - 1))
}

/// An orthogonal `n × n` matrix, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Orthogonal {
    n: usize,
    rows: Vec<f64>,
}

impl Orthogonal {
    pub fn identity(n: usize) -> Self {
        let mut rows = vec![0.0; n * n];
        for i in 0..n {
            rows[i * n + i] = 1.0;
        }
        Self { n, rows }
    }

    /// Rotation by `angle` in the coordinate plane `(i, j)`.
    pub fn plane_rotation(n: usize, i: usize, j: usize, angle: f64) -> Self {
        let mut q = Self::identity(n);
        let (s, c) = angle.sin_cos();
        q.rows[i * n + i] = c;
        q.rows[i * n + j] = -s;
        q.rows[j * n + i] = s;
        q.rows[j * n + j] = c;
        q
    }

    /// Haar-random orthogonal matrix (Gram–Schmidt on Gaussian columns).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut cols: Vec<VecN> = Vec::with_capacity(n);
        while cols.len() < n {
            let mut g = VecN::from_fn(n, |_| rng.sample(StandardNormal));
            for _ in 0..2 {
                for q in &cols {
                    let k = q.dot(&g);
                    g.axpy(-k, q);
                }
            }
            let norm = g.norm();
            if norm > 1e-6 {
                cols.push(g.scaled(1.0 / norm));
            }
        }
        let mut rows = vec![0.0; n * n];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..n {
                rows[i * n + j] = col[i];
            }
        }
        Self { n, rows }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn apply(&self, v: &VecN) -> VecN {
        let n = self.n;
        VecN::from_fn(n, |i| {
            self.rows[i * n..(i + 1) * n]
                .iter()
                .zip(v.as_slice())
                .map(|(q, x)| q * x)
                .sum()
        })
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Orthogonal) -> Orthogonal {
        let n = self.n;
        let mut rows = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                rows[i * n + j] = (0..n)
                    .map(|k| self.rows[i * n + k] * other.rows[k * n + j])
                    .sum();
            }
        }
        Orthogonal { n, rows }
    }
}
