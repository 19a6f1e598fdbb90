//! Regular parametric curves in ℝⁿ: analytic test shapes, cubic splines,
//! similarity transforms, arclength, and bounding radii.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Orthogonal, UnitVecN, VecN};
use crate::quadrature::{gauss_legendre, integrate_adaptive};

/// Declarative description of a curve; the serialized form is one TOML
/// document with a `dimension` key and a `kind` tag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub dimension: usize,
    #[serde(flatten)]
    pub shape: ShapeSpec,
}

fn default_angle_end() -> f64 {
    TAU
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeSpec {
    /// `start + s (end − start)`, `s ∈ [0, 1]`.
    Segment { start: Vec<f64>, end: Vec<f64> },
    /// `center + radius (cos θ axis_u + sin θ axis_v)` with
    /// `θ = angle_start + s (angle_end − angle_start)`, `s ∈ [0, 1]`.
    /// Closed when the sweep is a full turn.
    CircleArc {
        center: Vec<f64>,
        radius: f64,
        axis_u: Vec<f64>,
        axis_v: Vec<f64>,
        #[serde(default)]
        angle_start: f64,
        #[serde(default = "default_angle_end")]
        angle_end: f64,
    },
    /// `center + radius (cos t axis_u + sin t axis_v) + pitch t axis_w`,
    /// parametrized directly by `t ∈ [t_start, t_end]`.
    Helix {
        center: Vec<f64>,
        radius: f64,
        pitch: f64,
        axis_u: Vec<f64>,
        axis_v: Vec<f64>,
        axis_w: Vec<f64>,
        t_start: f64,
        t_end: f64,
    },
    /// Closed trigonometric curve
    /// `center + Σ_k cos[k−1] cos(2πks) + sin[k−1] sin(2πks)`, `s ∈ [0, 1]`.
    Fourier {
        center: Vec<f64>,
        cos: Vec<Vec<f64>>,
        sin: Vec<Vec<f64>>,
    },
    /// Interpolating cubic spline with chord-length knots on `[0, 1]`.
    /// Natural end conditions when open; periodic when closed (the first
    /// node is not repeated).
    Spline {
        nodes: Vec<Vec<f64>>,
        #[serde(default)]
        closed: bool,
    },
}

#[derive(Clone, Debug)]
struct CubicSpline {
    knots: Vec<f64>,
    values: Vec<VecN>,
    second: Vec<VecN>,
}

impl CubicSpline {
    fn build(nodes: &[VecN], closed: bool) -> Result<Self> {
        let n = nodes[0].dim();
        let mut values: Vec<VecN> = nodes.to_vec();
        if closed {
            values.push(nodes[0].clone());
        }
        let segments = values.len() - 1;
        let mut knots = vec![0.0];
        for i in 0..segments {
            let h = values[i].distance(&values[i + 1]);
            if h <= 0.0 {
                return Err(Error::CurveSpec(format!(
                    "spline nodes {i} and {} coincide",
                    (i + 1) % nodes.len()
                )));
            }
            knots.push(knots[i] + h);
        }
        let total = knots[segments];
        knots.iter_mut().for_each(|k| *k /= total);
        let h: Vec<f64> = (0..segments).map(|i| knots[i + 1] - knots[i]).collect();

        let mut second = vec![VecN::zeros(n); values.len()];
        if closed {
            let m = segments;
            let mut a = DMatrix::<f64>::zeros(m, m);
            for i in 0..m {
                let prev = (i + m - 1) % m;
                let hp = h[prev];
                let hi = h[i];
                a[(i, prev)] += hp;
                a[(i, i)] += 2.0 * (hp + hi);
                a[(i, (i + 1) % m)] += hi;
            }
            let lu = a.lu();
            for c in 0..n {
                let rhs = DVector::from_fn(m, |i, _| {
                    let prev = (i + m - 1) % m;
                    let y = |j: usize| values[j][c];
                    6.0 * ((y(i + 1) - y(i)) / h[i] - (y(i) - y(prev)) / h[prev])
                });
                let sol = lu
                    .solve(&rhs)
                    .ok_or_else(|| Error::CurveSpec("periodic spline system is singular".into()))?;
                for i in 0..m {
                    second[i].as_mut_slice()[c] = sol[i];
                }
                second[m].as_mut_slice()[c] = sol[0];
            }
        } else {
            let m = segments + 1;
            let interior = m - 2;
            let mut a = DMatrix::<f64>::zeros(interior, interior);
            for k in 0..interior {
                let i = k + 1;
                if k > 0 {
                    a[(k, k - 1)] = h[i - 1];
                }
                a[(k, k)] = 2.0 * (h[i - 1] + h[i]);
                if k + 1 < interior {
                    a[(k, k + 1)] = h[i];
                }
            }
            let lu = a.lu();
            for c in 0..n {
                let rhs = DVector::from_fn(interior, |k, _| {
                    let i = k + 1;
                    let y = |j: usize| values[j][c];
                    6.0 * ((y(i + 1) - y(i)) / h[i] - (y(i) - y(i - 1)) / h[i - 1])
                });
                let sol = lu
                    .solve(&rhs)
                    .ok_or_else(|| Error::CurveSpec("natural spline system is singular".into()))?;
                for k in 0..interior {
                    second[k + 1].as_mut_slice()[c] = sol[k];
                }
            }
        }
        Ok(Self {
            knots,
            values,
            second,
        })
    }

    fn interval(&self, s: f64) -> usize {
        let last = self.knots.len() - 2;
        match self.knots.binary_search_by(|k| k.total_cmp(&s)) {
            Ok(i) => i.min(last),
            Err(i) => i.saturating_sub(1).min(last),
        }
    }

    fn eval(&self, s: f64) -> VecN {
        let i = self.interval(s);
        let (t0, t1) = (self.knots[i], self.knots[i + 1]);
        let h = t1 - t0;
        let (l, r) = (t1 - s, s - t0);
        let (m0, m1) = (&self.second[i], &self.second[i + 1]);
        let (y0, y1) = (&self.values[i], &self.values[i + 1]);
        VecN::from_fn(y0.dim(), |c| {
            m0[c] * l * l * l / (6.0 * h)
                + m1[c] * r * r * r / (6.0 * h)
                + (y0[c] / h - m0[c] * h / 6.0) * l
                + (y1[c] / h - m1[c] * h / 6.0) * r
        })
    }

    fn derivative(&self, s: f64) -> VecN {
        let i = self.interval(s);
        let (t0, t1) = (self.knots[i], self.knots[i + 1]);
        let h = t1 - t0;
        let (l, r) = (t1 - s, s - t0);
        let (m0, m1) = (&self.second[i], &self.second[i + 1]);
        let (y0, y1) = (&self.values[i], &self.values[i + 1]);
        VecN::from_fn(y0.dim(), |c| {
            -m0[c] * l * l / (2.0 * h) + m1[c] * r * r / (2.0 * h) - (y0[c] / h - m0[c] * h / 6.0)
                + (y1[c] / h - m1[c] * h / 6.0)
        })
    }
}

#[derive(Clone, Debug)]
enum Shape {
    Segment {
        start: VecN,
        delta: VecN,
    },
    Arc {
        center: VecN,
        u: VecN,
        v: VecN,
        radius: f64,
        theta0: f64,
        sweep: f64,
    },
    Helix {
        center: VecN,
        u: VecN,
        v: VecN,
        w: VecN,
        radius: f64,
        pitch: f64,
    },
    Fourier {
        center: VecN,
        cos: Vec<VecN>,
        sin: Vec<VecN>,
    },
    Spline(CubicSpline),
}

impl Shape {
    fn eval(&self, s: f64) -> VecN {
        match self {
            Shape::Segment { start, delta } => {
                let mut p = start.clone();
                p.axpy(s, delta);
                p
            }
            Shape::Arc {
                center,
                u,
                v,
                radius,
                theta0,
                sweep,
            } => {
                let (sn, cs) = (theta0 + s * sweep).sin_cos();
                let mut p = center.clone();
                p.axpy(radius * cs, u);
                p.axpy(radius * sn, v);
                p
            }
            Shape::Helix {
                center,
                u,
                v,
                w,
                radius,
                pitch,
            } => {
                let (sn, cs) = s.sin_cos();
                let mut p = center.clone();
                p.axpy(radius * cs, u);
                p.axpy(radius * sn, v);
                p.axpy(pitch * s, w);
                p
            }
            Shape::Fourier { center, cos, sin } => {
                let mut p = center.clone();
                for (k, (c, sv)) in cos.iter().zip(sin).enumerate() {
                    let (sn, cs) = (TAU * (k + 1) as f64 * s).sin_cos();
                    p.axpy(cs, c);
                    p.axpy(sn, sv);
                }
                p
            }
            Shape::Spline(spline) => spline.eval(s),
        }
    }

    fn derivative(&self, s: f64) -> VecN {
        match self {
            Shape::Segment { delta, .. } => delta.clone(),
            Shape::Arc {
                u,
                v,
                radius,
                theta0,
                sweep,
                ..
            } => {
                let (sn, cs) = (theta0 + s * sweep).sin_cos();
                let mut d = u.scaled(-radius * sweep * sn);
                d.axpy(radius * sweep * cs, v);
                d
            }
            Shape::Helix {
                u,
                v,
                w,
                radius,
                pitch,
                ..
            } => {
                let (sn, cs) = s.sin_cos();
                let mut d = u.scaled(-radius * sn);
                d.axpy(radius * cs, v);
                d.axpy(*pitch, w);
                d
            }
            Shape::Fourier { center, cos, sin } => {
                let mut d = VecN::zeros(center.dim());
                for (k, (c, sv)) in cos.iter().zip(sin).enumerate() {
                    let omega = TAU * (k + 1) as f64;
                    let (sn, cs) = (omega * s).sin_cos();
                    d.axpy(-omega * sn, c);
                    d.axpy(omega * cs, sv);
                }
                d
            }
            Shape::Spline(spline) => spline.derivative(s),
        }
    }

    fn breakpoints(&self, range: (f64, f64)) -> Vec<f64> {
        match self {
            Shape::Spline(spline) => spline.knots.clone(),
            _ => vec![range.0, range.1],
        }
    }
}

/// `x ↦ scale · Q x + shift`.
#[derive(Clone, Debug)]
struct Similarity {
    rotation: Orthogonal,
    scale: f64,
    shift: VecN,
}

/// Samples used to estimate curve-wide constants.
const DENSE_SAMPLES: usize = 4096;

/// A compact, regular, single-component C¹ curve.
#[derive(Clone, Debug)]
pub struct Curve {
    shape: Shape,
    similarity: Option<Similarity>,
    range: (f64, f64),
    closed: bool,
    dim: usize,
    scale: f64,
    max_speed: f64,
    centroid: VecN,
}

impl Curve {
    fn build(
        shape: Shape,
        range: (f64, f64),
        closed: bool,
        dim: usize,
        similarity: Option<Similarity>,
    ) -> Result<Self> {
        let mut curve = Curve {
            shape,
            similarity,
            range,
            closed,
            dim,
            scale: 1.0,
            max_speed: 0.0,
            centroid: VecN::zeros(dim),
        };
        let points: Vec<VecN> = (0..=DENSE_SAMPLES)
            .map(|i| curve.eval(curve.dense_param(i)))
            .collect();
        let mut centroid = VecN::zeros(dim);
        points
            .iter()
            .for_each(|p| centroid.axpy(1.0 / points.len() as f64, p));
        let scale = points
            .iter()
            .map(|p| p.distance(&centroid))
            .fold(0.0, f64::max);
        let (mut min_speed, mut max_speed) = (f64::INFINITY, 0.0f64);
        for i in 0..=DENSE_SAMPLES {
            let speed = curve.speed(curve.dense_param(i));
            min_speed = min_speed.min(speed);
            max_speed = max_speed.max(speed);
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::CurveSpec("curve has zero extent".into()));
        }
        let span = range.1 - range.0;
        if !(min_speed > 1e-9 * scale / span) {
            return Err(Error::CurveSpec(
                "curve is not regular (speed vanishes)".into(),
            ));
        }
        curve.scale = scale;
        curve.max_speed = max_speed;
        curve.centroid = centroid;
        Ok(curve)
    }

    fn dense_param(&self, i: usize) -> f64 {
        self.range.0 + (self.range.1 - self.range.0) * i as f64 / DENSE_SAMPLES as f64
    }

    pub fn eval(&self, s: f64) -> VecN {
        let p = self.shape.eval(s);
        match &self.similarity {
            None => p,
            Some(t) => {
                let mut q = t.rotation.apply(&p).scaled(t.scale);
                q += &t.shift;
                q
            }
        }
    }

    /// Parametric velocity `eval′(s)`.
    pub fn derivative(&self, s: f64) -> VecN {
        let d = self.shape.derivative(s);
        match &self.similarity {
            None => d,
            Some(t) => t.rotation.apply(&d).scaled(t.scale),
        }
    }

    pub fn speed(&self, s: f64) -> f64 {
        self.derivative(s).norm()
    }

    pub fn tangent(&self, s: f64) -> UnitVecN {
        UnitVecN::new(self.derivative(s)).expect("curve is regular")
    }

    pub fn param_range(&self) -> (f64, f64) {
        self.range
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Largest distance from the sample centroid; the length unit that
    /// relative tolerances refer to.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn centroid(&self) -> &VecN {
        &self.centroid
    }

    /// Upper estimate of `max |eval′|` (dense sampling, 10% margin).
    pub fn max_speed(&self) -> f64 {
        1.1 * self.max_speed
    }

    /// Parameters where the curve is only C² from one side (spline knots),
    /// including both ends of the range.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.shape.breakpoints(self.range)
    }

    /// Image under `x ↦ scale · Q x + shift`.
    pub fn transformed(&self, rotation: &Orthogonal, scale: f64, shift: &VecN) -> Result<Curve> {
        if rotation.dim() != self.dim || shift.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: shift.dim(),
            });
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "scale must be positive, got {scale}"
            )));
        }
        let composed = match &self.similarity {
            None => Similarity {
                rotation: rotation.clone(),
                scale,
                shift: shift.clone(),
            },
            Some(t) => {
                let mut new_shift = rotation.apply(&t.shift).scaled(scale);
                new_shift += shift;
                Similarity {
                    rotation: rotation.compose(&t.rotation),
                    scale: scale * t.scale,
                    shift: new_shift,
                }
            }
        };
        Curve::build(
            self.shape.clone(),
            self.range,
            self.closed,
            self.dim,
            Some(composed),
        )
    }
}

fn vec_of(values: &[f64], n: usize, what: &str) -> Result<VecN> {
    if values.len() != n {
        return Err(Error::CurveSpec(format!(
            "{what} has {} components, expected {n}",
            values.len()
        )));
    }
    VecN::new(values).map_err(|_| Error::CurveSpec(format!("{what} has a non-finite component")))
}

fn orthonormal_axes(axes: &[&VecN], names: &str) -> Result<()> {
    for (i, a) in axes.iter().enumerate() {
        if (a.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::CurveSpec(format!(
                "{names}: axis {i} is not a unit vector"
            )));
        }
        for b in &axes[i + 1..] {
            if a.dot(b).abs() > 1e-9 {
                return Err(Error::CurveSpec(format!(
                    "{names}: axes are not orthogonal"
                )));
            }
        }
    }
    Ok(())
}

fn positive(x: f64, what: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::CurveSpec(format!(
            "{what} must be positive and finite, got {x}"
        )))
    }
}

/// Validates a spec and builds the curve.
pub fn make_curve(spec: &CurveSpec) -> Result<Curve> {
    let n = spec.dimension;
    if n < 3 {
        return Err(Error::InvalidDimension {
            got: n,
            reason: "curves live in n >= 3 dimensions",
        });
    }
    match &spec.shape {
        ShapeSpec::Segment { start, end } => {
            let start = vec_of(start, n, "segment start")?;
            let end = vec_of(end, n, "segment end")?;
            let delta = &end - &start;
            if delta.norm() == 0.0 {
                return Err(Error::CurveSpec("segment endpoints coincide".into()));
            }
            Curve::build(Shape::Segment { start, delta }, (0.0, 1.0), false, n, None)
        }
        ShapeSpec::CircleArc {
            center,
            radius,
            axis_u,
            axis_v,
            angle_start,
            angle_end,
        } => {
            positive(*radius, "arc radius")?;
            let center = vec_of(center, n, "arc center")?;
            let u = vec_of(axis_u, n, "arc axis_u")?;
            let v = vec_of(axis_v, n, "arc axis_v")?;
            orthonormal_axes(&[&u, &v], "circle_arc")?;
            let sweep = angle_end - angle_start;
            if !sweep.is_finite() || sweep == 0.0 || sweep.abs() > TAU * (1.0 + 1e-12) {
                return Err(Error::CurveSpec(format!(
                    "arc sweep must be nonzero and at most a full turn, got {sweep}"
                )));
            }
            let closed = (sweep.abs() - TAU).abs() <= 1e-12 * TAU;
            let sweep = if closed { TAU * sweep.signum() } else { sweep };
            let shape = Shape::Arc {
                center,
                u,
                v,
                radius: *radius,
                theta0: *angle_start,
                sweep,
            };
            Curve::build(shape, (0.0, 1.0), closed, n, None)
        }
        ShapeSpec::Helix {
            center,
            radius,
            pitch,
            axis_u,
            axis_v,
            axis_w,
            t_start,
            t_end,
        } => {
            positive(*radius, "helix radius")?;
            if !pitch.is_finite() {
                return Err(Error::CurveSpec("helix pitch must be finite".into()));
            }
            if !(t_end > t_start) || !t_start.is_finite() || !t_end.is_finite() {
                return Err(Error::CurveSpec("helix needs t_start < t_end".into()));
            }
            let center = vec_of(center, n, "helix center")?;
            let u = vec_of(axis_u, n, "helix axis_u")?;
            let v = vec_of(axis_v, n, "helix axis_v")?;
            let w = vec_of(axis_w, n, "helix axis_w")?;
            orthonormal_axes(&[&u, &v, &w], "helix")?;
            let shape = Shape::Helix {
                center,
                u,
                v,
                w,
                radius: *radius,
                pitch: *pitch,
            };
            Curve::build(shape, (*t_start, *t_end), false, n, None)
        }
        ShapeSpec::Fourier { center, cos, sin } => {
            if cos.is_empty() || cos.len() != sin.len() {
                return Err(Error::CurveSpec(
                    "fourier curve needs equally many (and at least one) cos and sin coefficients"
                        .into(),
                ));
            }
            let center = vec_of(center, n, "fourier center")?;
            let cos = cos
                .iter()
                .map(|c| vec_of(c, n, "fourier cos coefficient"))
                .collect::<Result<Vec<_>>>()?;
            let sin = sin
                .iter()
                .map(|c| vec_of(c, n, "fourier sin coefficient"))
                .collect::<Result<Vec<_>>>()?;
            Curve::build(
                Shape::Fourier { center, cos, sin },
                (0.0, 1.0),
                true,
                n,
                None,
            )
        }
        ShapeSpec::Spline { nodes, closed } => {
            if nodes.len() < 4 {
                return Err(Error::CurveSpec(format!(
                    "spline needs at least 4 nodes, got {}",
                    nodes.len()
                )));
            }
            let nodes = nodes
                .iter()
                .map(|p| vec_of(p, n, "spline node"))
                .collect::<Result<Vec<_>>>()?;
            let spline = CubicSpline::build(&nodes, *closed)?;
            Curve::build(Shape::Spline(spline), (0.0, 1.0), *closed, n, None)
        }
    }
}

/// Arclength by adaptive Gauss–Kronrod quadrature of the speed, to absolute
/// error `tol`.
pub fn arclength(curve: &Curve, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let breaks = curve.breakpoints();
    let pieces = (breaks.len() - 1) as f64;
    let mut total = 0.0;
    let mut failure = None;
    for w in breaks.windows(2) {
        match integrate_adaptive(|s| curve.speed(s), w[0], w[1], tol / pieces, 4000) {
            Ok(v) => total += v,
            Err(Error::Quadrature {
                best,
                error_estimate,
            }) => {
                total += best;
                let e = failure.get_or_insert(0.0);
                *e += error_estimate;
            }
            Err(e) => return Err(e),
        }
    }
    match failure {
        None => Ok(total),
        Some(error_estimate) => Err(Error::Quadrature {
            best: total,
            error_estimate,
        }),
    }
}

/// Radius of a ball about the origin that contains the curve.
pub fn bounding_radius(curve: &Curve) -> f64 {
    bounding_radius_about(curve, &VecN::zeros(curve.dim()))
}

/// Radius of a ball about `center` that contains the curve: the largest
/// distance over a dense sample plus half a sample spacing times the speed
/// bound.
pub fn bounding_radius_about(curve: &Curve, center: &VecN) -> f64 {
    let (s0, s1) = curve.param_range();
    let step = (s1 - s0) / DENSE_SAMPLES as f64;
    let far = (0..=DENSE_SAMPLES)
        .map(|i| curve.eval(curve.dense_param(i)).distance(center))
        .fold(0.0, f64::max);
    far + 0.5 * curve.max_speed() * step
}

/// Cumulative arclength on a fixed parameter grid, with inversion.
#[derive(Clone, Debug)]
pub struct ArclengthTable {
    cells: Vec<f64>,
    cumulative: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

const TABLE_CELLS: usize = 1024;
const TABLE_ORDER: usize = 8;

impl ArclengthTable {
    pub fn new(curve: &Curve) -> Self {
        let (s0, s1) = curve.param_range();
        let (nodes, weights) = gauss_legendre(TABLE_ORDER);
        let cells: Vec<f64> = (0..=TABLE_CELLS)
            .map(|i| s0 + (s1 - s0) * i as f64 / TABLE_CELLS as f64)
            .collect();
        let mut table = Self {
            cells,
            cumulative: vec![0.0],
            nodes,
            weights,
        };
        let mut acc = 0.0;
        for i in 0..TABLE_CELLS {
            acc += table.partial(curve, table.cells[i], table.cells[i + 1]);
            table.cumulative.push(acc);
        }
        table
    }

    fn partial(&self, curve: &Curve, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * curve.speed(c + h * x))
            .sum::<f64>()
            * h
    }

    pub fn total(&self) -> f64 {
        self.cumulative[TABLE_CELLS]
    }

    /// Parameter at which the arclength from the start equals `length`.
    pub fn param_at(&self, curve: &Curve, length: f64) -> f64 {
        let length = length.clamp(0.0, self.total());
        let cell = match self.cumulative.binary_search_by(|c| c.total_cmp(&length)) {
            Ok(i) => return self.cells[i],
            Err(i) => (i - 1).min(TABLE_CELLS - 1),
        };
        let (lo, hi) = (self.cells[cell], self.cells[cell + 1]);
        let target = length - self.cumulative[cell];
        let (mut a, mut b) = (lo, hi);
        let mut s = lo + (hi - lo) * target / (self.cumulative[cell + 1] - self.cumulative[cell]);
        for _ in 0..50 {
            let f = self.partial(curve, lo, s) - target;
            if f.abs() <= 1e-14 * self.total().max(1.0) {
                break;
            }
            if f > 0.0 {
                b = s;
            } else {
                a = s;
            }
            let newton = s - f / curve.speed(s);
            s = if newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn segment() -> Curve {
        make_curve(&CurveSpec {
            dimension: 3,
            shape: ShapeSpec::Segment {
                start: vec![-1.0, 0.0, 0.0],
                end: vec![1.0, 0.0, 0.0],
            },
        })
        .unwrap()
    }

    fn unit_circle() -> Curve {
        make_curve(&CurveSpec {
            dimension: 3,
            shape: ShapeSpec::CircleArc {
                center: vec![0.0; 3],
                radius: 1.0,
                axis_u: vec![1.0, 0.0, 0.0],
                axis_v: vec![0.0, 1.0, 0.0],
                angle_start: 0.0,
                angle_end: TAU,
            },
        })
        .unwrap()
    }

    fn helix() -> Curve {
        make_curve(&CurveSpec {
            dimension: 3,
            shape: ShapeSpec::Helix {
                center: vec![0.0; 3],
                radius: 1.0,
                pitch: 0.25,
                axis_u: vec![1.0, 0.0, 0.0],
                axis_v: vec![0.0, 1.0, 0.0],
                axis_w: vec![0.0, 0.0, 1.0],
                t_start: 0.0,
                t_end: TAU,
            },
        })
        .unwrap()
    }

    #[test]
    fn segment_midpoint_and_tangent() {
        let c = segment();
        assert_eq!(c.eval(0.5).as_slice(), &[0.0, 0.0, 0.0]);
        assert_eq!(c.tangent(0.1).as_slice(), &[1.0, 0.0, 0.0]);
        assert!(!c.closed());
    }

    #[test]
    fn circle_is_closed_and_parametrized_by_turns() {
        let c = unit_circle();
        assert!(c.closed());
        let p = c.eval(0.125);
        let q = (TAU * 0.125).cos();
        assert!((p[0] - q).abs() < 1e-15 && (p[1] - q).abs() < 1e-15 && p[2] == 0.0);
        assert!(c.eval(0.0).distance(&c.eval(1.0)) < 1e-12);
    }

    #[test]
    fn helix_tangent_at_start() {
        let t = helix().tangent(0.0);
        let k = 1.0 / (1.0f64 + 1.0 / 16.0).sqrt();
        assert!((t[0]).abs() < 1e-15);
        assert!((t[1] - k).abs() < 1e-15);
        assert!((t[2] - 0.25 * k).abs() < 1e-15);
    }

    #[test]
    fn arclengths_of_standard_curves() {
        assert!((arclength(&segment(), 1e-12).unwrap() - 2.0).abs() < 1e-12);
        assert!((arclength(&unit_circle(), 1e-10).unwrap() - TAU).abs() < 1e-10);
        let helix_len = TAU * (1.0f64 + 1.0 / 16.0).sqrt();
        assert!((arclength(&helix(), 1e-10).unwrap() - helix_len).abs() < 1e-10);
    }

    #[test]
    fn bounding_radii() {
        let r = bounding_radius(&unit_circle());
        assert!((1.0..=1.01).contains(&r));
        let r = bounding_radius(&segment());
        assert!((1.0..=1.01).contains(&r));
        let shifted = segment()
            .transformed(
                &Orthogonal::identity(3),
                1.0,
                &VecN::new(&[10.0, 0.0, 0.0]).unwrap(),
            )
            .unwrap();
        let grown = bounding_radius(&shifted) - bounding_radius(&segment());
        assert!((grown - 10.0).abs() < 0.01);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let bad = [
            ShapeSpec::Segment {
                start: vec![1.0, 0.0, 0.0],
                end: vec![1.0, 0.0, 0.0],
            },
            ShapeSpec::CircleArc {
                center: vec![0.0; 3],
                radius: -1.0,
                axis_u: vec![1.0, 0.0, 0.0],
                axis_v: vec![0.0, 1.0, 0.0],
                angle_start: 0.0,
                angle_end: 1.0,
            },
            ShapeSpec::Spline {
                nodes: vec![vec![0.0; 3], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
                closed: false,
            },
            ShapeSpec::Segment {
                start: vec![0.0; 2],
                end: vec![1.0, 0.0, 0.0],
            },
        ];
        for shape in bad {
            let spec = CurveSpec {
                dimension: 3,
                shape,
            };
            assert!(
                matches!(make_curve(&spec), Err(Error::CurveSpec(_))),
                "{spec:?}"
            );
        }
        let flat = CurveSpec {
            dimension: 2,
            shape: ShapeSpec::Segment {
                start: vec![0.0; 2],
                end: vec![1.0, 0.0],
            },
        };
        assert!(matches!(
            make_curve(&flat),
            Err(Error::InvalidDimension { .. })
        ));
    }

    #[test]
    fn splines_interpolate_and_are_c1() {
        let nodes = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.5, 0.0],
            vec![2.0, 0.0, 0.3],
            vec![3.0, -0.4, 0.0],
            vec![4.0, 0.2, 0.1],
        ];
        for closed in [false, true] {
            let spec = CurveSpec {
                dimension: 3,
                shape: ShapeSpec::Spline {
                    nodes: nodes.clone(),
                    closed,
                },
            };
            let c = make_curve(&spec).unwrap();
            let Shape::Spline(sp) = &c.shape else {
                unreachable!()
            };
            for (i, node) in nodes.iter().enumerate() {
                let p = c.eval(sp.knots[i]);
                for k in 0..3 {
                    assert!((p[k] - node[k]).abs() < 1e-12);
                }
            }
            for &k in &sp.knots[1..sp.knots.len() - 1] {
                let jump = sp.derivative(k - 1e-13).distance(&sp.derivative(k + 1e-13));
                assert!(jump < 1e-9, "jump {jump}");
            }
            if closed {
                let jump = c.derivative(0.0).distance(&c.derivative(1.0));
                assert!(jump < 1e-10);
                assert!(c.eval(0.0).distance(&c.eval(1.0)) < 1e-12);
            }
        }
    }

    #[test]
    fn arclength_table_inverts() {
        let c = helix();
        let table = ArclengthTable::new(&c);
        let total = arclength(&c, 1e-12).unwrap();
        assert!((table.total() - total).abs() < 1e-10);
        for frac in [0.0, 0.1, 0.37, 0.5, 0.99, 1.0] {
            let s = table.param_at(&c, frac * total);
            // constant speed helix: s/(2π) is the length fraction
            assert!((s / TAU - frac).abs() < 1e-10, "{frac} -> {s}");
        }
    }
}
