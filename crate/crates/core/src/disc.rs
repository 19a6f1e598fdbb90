//! Flat (n−1)-discs, curve–disc intersection counting with parity and
//! degeneracy labels, the canonical-hit selection, and the ball window.
//!
//! Roots of `g(s) = (eval(s) − p)·u` are isolated by sign changes on a
//! uniform parameter grid and refined by bisection. Grid points are
//! precomputed once per curve in a [`CurveIndex`], which also groups grid
//! cells into chunks with bounding balls so that chunks far from a disc are
//! skipped without evaluating the curve.

use smallvec::SmallVec;

use crate::curve::{bounding_radius_about, Curve};
use crate::error::{Error, Result};
use crate::geometry::{perp_decompose, UnitVecN, VecN};

/// Default number of grid intervals for root isolation.
pub const DEFAULT_GRID: usize = 2048;
/// Smallest accepted grid.
pub const MIN_GRID: usize = 64;
const CHUNK_CELLS: usize = 32;
const MAX_BISECTIONS: usize = 200;

/// The disc `D(p, u, r)`: points `p + ξv` with `v ⊥ u` unit and `0 ≤ ξ < r`.
#[derive(Clone, Debug, PartialEq)]
pub struct Disc {
    pub center: VecN,
    pub normal: UnitVecN,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: VecN, normal: UnitVecN, radius: f64) -> Result<Self> {
        if center.dim() != normal.dim() {
            return Err(Error::DimensionMismatch {
                expected: center.dim(),
                got: normal.dim(),
            });
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "disc radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            center,
            normal,
            radius,
        })
    }
}

/// An open ball `Ω` restricting which discs are counted.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    pub center: VecN,
    pub radius: f64,
}

impl Window {
    pub fn new(center: VecN, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "window radius must be positive, got {radius}"
            )));
        }
        Ok(Self { center, radius })
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    /// Whether the curve lies inside the open ball.
    pub fn contains_curve(&self, curve: &Curve) -> bool {
        bounding_radius_about(curve, &self.center) < self.radius
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiscLabel {
    Odd,
    Even,
    /// The curve meets the rim `∂D` (within `tol_radius`).
    Boundary,
    /// The curve is tangent to the hyperplane at a point of the closed disc.
    Tangential,
    /// Root refinement could not decide a crossing.
    Degenerate,
}

impl DiscLabel {
    pub fn is_regular(self) -> bool {
        matches!(self, DiscLabel::Odd | DiscLabel::Even)
    }
}

/// A curve point inside the disc.
#[derive(Clone, Debug, PartialEq)]
pub struct Hit {
    pub s: f64,
    pub point: VecN,
    /// `ξ = |z − p|`.
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscClass {
    pub interior_hits: Vec<Hit>,
    pub label: DiscLabel,
    pub count: usize,
}

/// A root of `g` on the hyperplane, as returned by [`hyperplane_crossings`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub s: f64,
    /// `|g|` stayed below tolerance over a whole grid interval.
    pub tangential_suspect: bool,
    /// Bisection stalled before reaching tolerance.
    pub ambiguous: bool,
}

/// Classification tolerances. `plane` and `radius` are relative to the
/// curve scale; `tangent` bounds `|t·u|` and is dimensionless.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub plane: f64,
    pub radius: f64,
    pub tangent: f64,
    pub grid: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            plane: 1e-12,
            radius: 1e-9,
            tangent: 1e-9,
            grid: DEFAULT_GRID,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("plane", self.plane),
            ("radius", self.radius),
            ("tangent", self.tangent),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "tolerance {name} must be positive, got {v}"
                )));
            }
        }
        if self.grid < MIN_GRID {
            return Err(Error::InvalidParameter(format!(
                "grid must have at least {MIN_GRID} intervals, got {}",
                self.grid
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct Chunk {
    first_cell: usize,
    end_cell: usize,
    center: VecN,
    radius: f64,
}

/// Precomputed grid samples of a curve with chunk bounding balls.
#[derive(Clone, Debug)]
pub struct CurveIndex {
    s0: f64,
    step: f64,
    cells: usize,
    dim: usize,
    points: Vec<f64>,
    chunks: Vec<Chunk>,
    cull: bool,
}

impl CurveIndex {
    pub fn new(curve: &Curve, grid: usize) -> Self {
        Self::build(curve, grid, true)
    }

    /// An index that scans every cell (no chunk culling).
    pub fn exhaustive(curve: &Curve, grid: usize) -> Self {
        Self::build(curve, grid, false)
    }

    fn build(curve: &Curve, grid: usize, cull: bool) -> Self {
        let (s0, s1) = curve.param_range();
        let step = (s1 - s0) / grid as f64;
        let dim = curve.dim();
        let mut points = Vec::with_capacity((grid + 1) * dim);
        for i in 0..=grid {
            let s = if i == grid { s1 } else { s0 + step * i as f64 };
            points.extend_from_slice(curve.eval(s).as_slice());
        }
        let margin = 0.5 * curve.max_speed() * step;
        let mut chunks = Vec::new();
        let mut first = 0;
        while first < grid {
            let end = (first + CHUNK_CELLS).min(grid);
            let mut center = VecN::zeros(dim);
            let count = (end - first + 1) as f64;
            for i in first..=end {
                let p = &points[i * dim..(i + 1) * dim];
                for (c, x) in center.as_mut_slice().iter_mut().zip(p) {
                    *c += x / count;
                }
            }
            let radius = (first..=end)
                .map(|i| dist(&points[i * dim..(i + 1) * dim], center.as_slice()))
                .fold(0.0, f64::max)
                + margin;
            chunks.push(Chunk {
                first_cell: first,
                end_cell: end,
                center,
                radius,
            });
            first = end;
        }
        Self {
            s0,
            step,
            cells: grid,
            dim,
            points,
            chunks,
            cull,
        }
    }

    pub fn grid(&self) -> usize {
        self.cells
    }

    fn param(&self, i: usize) -> f64 {
        self.s0 + self.step * i as f64
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn plane_value(point: &[f64], p: &VecN, u: &UnitVecN) -> f64 {
    point
        .iter()
        .zip(p.as_slice())
        .zip(u.as_slice())
        .map(|((x, c), n)| (x - c) * n)
        .sum()
}

/// How a known curve point `eval(s)` on the hyperplane enters a scan.
#[derive(Clone, Copy, Debug, PartialEq)]
enum PinKind {
    /// Counted as an interior hit.
    Member,
    /// Lies on the rim by construction; excluded from the count.
    Rim,
}

#[derive(Clone, Copy, Debug)]
struct Pin {
    s: f64,
    kind: PinKind,
    sign_right: f64,
}

#[derive(Clone, Copy, Debug)]
struct RawRoot {
    s: f64,
    tangential_suspect: bool,
    ambiguous: bool,
}

/// Region of interest for culling: the hyperplane alone, or the closed disc.
#[derive(Clone, Copy)]
enum Region {
    Plane,
    Disc { radius: f64 },
}

/// Curve–disc classifier bound to one curve, grid and tolerance set.
#[derive(Clone, Debug)]
pub struct Classifier<'c> {
    curve: &'c Curve,
    index: CurveIndex,
    tol: Tolerances,
    tol_plane: f64,
    tol_radius: f64,
    span: f64,
}

impl<'c> Classifier<'c> {
    pub fn new(curve: &'c Curve, tol: Tolerances) -> Result<Self> {
        tol.validate()?;
        Ok(Self::with_index(
            curve,
            CurveIndex::new(curve, tol.grid),
            tol,
        ))
    }

    /// A classifier that scans every grid cell.
    pub fn exhaustive(curve: &'c Curve, tol: Tolerances) -> Result<Self> {
        tol.validate()?;
        Ok(Self::with_index(
            curve,
            CurveIndex::exhaustive(curve, tol.grid),
            tol,
        ))
    }

    fn with_index(curve: &'c Curve, index: CurveIndex, tol: Tolerances) -> Self {
        let (s0, s1) = curve.param_range();
        Self {
            curve,
            index,
            tol,
            tol_plane: tol.plane * curve.scale(),
            tol_radius: tol.radius * curve.scale(),
            span: s1 - s0,
        }
    }

    pub fn curve(&self) -> &Curve {
        self.curve
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    fn g(&self, s: f64, p: &VecN, u: &UnitVecN) -> f64 {
        plane_value(self.curve.eval(s).as_slice(), p, u)
    }

    /// Bisection on `[a, b]` where `ga` and `gb` have opposite signs.
    fn refine(&self, p: &VecN, u: &UnitVecN, mut a: f64, mut ga: f64, mut b: f64) -> (f64, bool) {
        for _ in 0..MAX_BISECTIONS {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                return (m, true);
            }
            let gm = self.g(m, p, u);
            if gm.abs() <= self.tol_plane {
                return (m, false);
            }
            if (gm > 0.0) == (ga > 0.0) {
                a = m;
                ga = gm;
            } else {
                b = m;
            }
        }
        (0.5 * (a + b), true)
    }

    fn chunk_relevant(&self, chunk: &Chunk, p: &VecN, u: &UnitVecN, region: Region) -> bool {
        if !self.index.cull {
            return true;
        }
        let c = chunk.center.as_slice();
        if plane_value(c, p, u).abs() > chunk.radius + self.tol_plane {
            return false;
        }
        match region {
            Region::Plane => true,
            Region::Disc { radius } => {
                dist(c, p.as_slice()) <= radius + chunk.radius + self.tol_radius
            }
        }
    }

    /// Roots of `g` in the scanned cells, excluding the pin itself.
    fn scan(
        &self,
        p: &VecN,
        u: &UnitVecN,
        region: Region,
        pin: Option<Pin>,
    ) -> SmallVec<[RawRoot; 8]> {
        let idx = &self.index;
        let closed = self.curve.closed();
        let (s0, s1) = self.curve.param_range();
        let mut pins: SmallVec<[f64; 2]> = SmallVec::new();
        if let Some(pin) = pin {
            pins.push(pin.s);
            if closed && pin.s >= s1 {
                pins.push(s0);
            } else if closed && pin.s <= s0 {
                pins.push(s1);
            }
        }
        let mut roots = SmallVec::new();
        let mut g = Vec::with_capacity(CHUNK_CELLS + 1);
        for chunk in &idx.chunks {
            if !self.chunk_relevant(chunk, p, u, region) {
                continue;
            }
            g.clear();
            for i in chunk.first_cell..=chunk.end_cell {
                // The seam of a closed curve is one point; evaluate it once.
                let node = if closed && i == idx.cells { 0 } else { i };
                g.push(plane_value(idx.point(node), p, u));
            }
            for cell in chunk.first_cell..chunk.end_cell {
                let k = cell - chunk.first_cell;
                let (ga, gb) = (g[k], g[k + 1]);
                let (sa, sb) = (
                    idx.param(cell),
                    if cell + 1 == idx.cells {
                        s1
                    } else {
                        idx.param(cell + 1)
                    },
                );
                let pinned = pins.iter().copied().find(|&s| s >= sa && s <= sb);
                match (pinned, pin) {
                    (Some(sz), Some(pin)) => {
                        let sign_left = -pin.sign_right;
                        if sz > sa && ga != 0.0 && (ga > 0.0) != (sign_left > 0.0) {
                            let (s, amb) = self.refine(p, u, sa, ga, sz);
                            roots.push(self.near_pin(s, amb, sz));
                        }
                        if sz < sb {
                            if gb == 0.0 {
                                roots.push(RawRoot {
                                    s: sb,
                                    tangential_suspect: false,
                                    ambiguous: false,
                                });
                            } else if (gb > 0.0) != (pin.sign_right > 0.0) {
                                let (s, amb) = self.refine(p, u, sz, pin.sign_right, sb);
                                roots.push(self.near_pin(s, amb, sz));
                            }
                        }
                    }
                    _ => {
                        if cell == 0 && !closed && ga == 0.0 && pins.is_empty() {
                            roots.push(RawRoot {
                                s: sa,
                                tangential_suspect: false,
                                ambiguous: false,
                            });
                        }
                        if ga.abs() < self.tol_plane && gb.abs() < self.tol_plane {
                            let mid = 0.5 * (sa + sb);
                            if self.g(mid, p, u).abs() < self.tol_plane {
                                roots.push(RawRoot {
                                    s: mid,
                                    tangential_suspect: true,
                                    ambiguous: false,
                                });
                                continue;
                            }
                        }
                        if gb == 0.0 && ga != 0.0 {
                            roots.push(RawRoot {
                                s: sb,
                                tangential_suspect: false,
                                ambiguous: false,
                            });
                        } else if ga * gb < 0.0 {
                            let (s, amb) = self.refine(p, u, sa, ga, sb);
                            roots.push(RawRoot {
                                s,
                                tangential_suspect: false,
                                ambiguous: amb,
                            });
                        }
                    }
                }
            }
        }
        roots
    }

    /// A root that bisection pushed onto the pin cannot be told apart from
    /// the pin itself.
    fn near_pin(&self, s: f64, ambiguous: bool, pin: f64) -> RawRoot {
        RawRoot {
            s,
            tangential_suspect: false,
            ambiguous: ambiguous || (s - pin).abs() <= 1e-12 * self.span,
        }
    }

    /// All roots of `g` on the full hyperplane.
    pub fn hyperplane_roots(&self, p: &VecN, u: &UnitVecN) -> Vec<Root> {
        let mut roots: Vec<Root> = self
            .scan(p, u, Region::Plane, None)
            .into_iter()
            .map(|r| Root {
                s: r.s,
                tangential_suspect: r.tangential_suspect,
                ambiguous: r.ambiguous,
            })
            .collect();
        roots.sort_by(|a, b| a.s.total_cmp(&b.s));
        roots
    }

    fn label_roots(
        &self,
        disc: &Disc,
        roots: &[RawRoot],
        mut hits: Vec<Hit>,
        forced: Option<DiscLabel>,
    ) -> DiscClass {
        let r = disc.radius;
        let (mut tangential, mut boundary, mut degenerate) = (false, false, false);
        match forced {
            Some(DiscLabel::Tangential) => tangential = true,
            Some(DiscLabel::Boundary) => boundary = true,
            Some(DiscLabel::Degenerate) => degenerate = true,
            _ => {}
        }
        for root in roots {
            let z = self.curve.eval(root.s);
            let d = z.distance(&disc.center);
            if d >= r + self.tol_radius {
                continue;
            }
            if root.tangential_suspect {
                tangential = true;
                continue;
            }
            if root.ambiguous {
                degenerate = true;
            }
            if self.curve.tangent(root.s).dot(disc.normal.as_vec()).abs() < self.tol.tangent {
                tangential = true;
            }
            if (d - r).abs() < self.tol_radius {
                boundary = true;
            } else {
                hits.push(Hit {
                    s: root.s,
                    point: z,
                    distance: d,
                });
            }
        }
        hits.sort_by(|a, b| a.s.total_cmp(&b.s));
        let count = hits.len();
        let label = if tangential {
            DiscLabel::Tangential
        } else if boundary {
            DiscLabel::Boundary
        } else if degenerate {
            DiscLabel::Degenerate
        } else if count % 2 == 1 {
            DiscLabel::Odd
        } else {
            DiscLabel::Even
        };
        DiscClass {
            interior_hits: hits,
            label,
            count,
        }
    }

    pub fn classify(&self, disc: &Disc) -> DiscClass {
        let region = Region::Disc {
            radius: disc.radius,
        };
        let roots = self.scan(&disc.center, &disc.normal, region, None);
        self.label_roots(disc, &roots, Vec::new(), None)
    }

    fn pin(&self, disc: &Disc, s: f64, kind: PinKind) -> (Pin, Option<DiscLabel>) {
        let slope = self.curve.derivative(s).dot(disc.normal.as_vec());
        let forced = if self.curve.tangent(s).dot(disc.normal.as_vec()).abs() < self.tol.tangent {
            Some(DiscLabel::Tangential)
        } else {
            None
        };
        let sign_right = if slope >= 0.0 { 1.0 } else { -1.0 };
        (
            Pin {
                s,
                kind,
                sign_right,
            },
            forced,
        )
    }

    /// Classifies a disc whose hyperplane is known to contain `eval(s)`
    /// with `|eval(s) − p| < r`. That point is counted exactly once.
    pub fn classify_with_member(&self, disc: &Disc, s: f64) -> DiscClass {
        let (pin, mut forced) = self.pin(disc, s, PinKind::Member);
        let z = self.curve.eval(s);
        let d = z.distance(&disc.center);
        if forced.is_none() && (d - disc.radius).abs() < self.tol_radius {
            forced = Some(DiscLabel::Boundary);
        }
        let hits = if d < disc.radius {
            vec![Hit {
                s,
                point: z,
                distance: d,
            }]
        } else {
            Vec::new()
        };
        let region = Region::Disc {
            radius: disc.radius,
        };
        let roots = self.scan(&disc.center, &disc.normal, region, Some(pin));
        debug_assert_eq!(pin.kind, PinKind::Member);
        self.label_roots(disc, &roots, hits, forced)
    }

    /// Classifies a disc whose rim is known to pass through `eval(s)`. That
    /// point is excluded from the count and from the rim test.
    pub fn classify_with_rim_point(&self, disc: &Disc, s: f64) -> DiscClass {
        let (pin, forced) = self.pin(disc, s, PinKind::Rim);
        let region = Region::Disc {
            radius: disc.radius,
        };
        let roots = self.scan(&disc.center, &disc.normal, region, Some(pin));
        debug_assert_eq!(pin.kind, PinKind::Rim);
        self.label_roots(disc, &roots, Vec::new(), forced)
    }
}

/// All isolated roots of `g(s) = (eval(s) − p)·u` on a uniform grid of
/// `grid` intervals, refined to `|g| ≤ tol` (absolute).
pub fn hyperplane_crossings(
    curve: &Curve,
    p: &VecN,
    u: &UnitVecN,
    grid: usize,
    tol: f64,
) -> Result<Vec<Root>> {
    let tol_rel = tol / curve.scale();
    let tolerances = Tolerances {
        plane: tol_rel,
        grid,
        ..Tolerances::default()
    };
    Ok(Classifier::new(curve, tolerances)?.hyperplane_roots(p, u))
}

/// Classifies a disc against a curve. `tol_plane` and `tol_radius` are
/// relative to the curve scale.
pub fn classify_disc(
    curve: &Curve,
    disc: &Disc,
    tol_plane: f64,
    tol_radius: f64,
    tol_tangent: f64,
    grid: usize,
) -> Result<DiscClass> {
    let tol = Tolerances {
        plane: tol_plane,
        radius: tol_radius,
        tangent: tol_tangent,
        grid,
    };
    Ok(Classifier::new(curve, tol)?.classify(disc))
}

/// The interior hit closest to the disc center, ties broken by the smaller
/// parameter. `None` for degenerate labels or when there are no hits.
pub fn canonical_hit(class: &DiscClass) -> Option<&Hit> {
    if !class.label.is_regular() {
        return None;
    }
    class
        .interior_hits
        .iter()
        .min_by(|a, b| a.distance.total_cmp(&b.distance).then(a.s.total_cmp(&b.s)))
}

/// Whether the rim `∂D` meets the open window ball.
pub fn boundary_meets_window(disc: &Disc, window: &Window) -> bool {
    rim_distance(disc, &window.center) < window.radius
}

/// Distance from `x` to the rim of the disc.
pub fn rim_distance(disc: &Disc, x: &VecN) -> f64 {
    let q = &disc.center - x;
    let (par, perp) = perp_decompose(&q, &disc.normal);
    let across = perp.norm() - disc.radius;
    (par.norm_squared() + across * across).sqrt()
}
