//! Shared fixtures for the benchmarks.

use std::f64::consts::TAU;

use fraclen_core::{make_curve, Curve, CurveSpec, ShapeSpec, Window};

/// Unit segment along the x axis, centered at the origin.
pub fn segment() -> Curve {
    make_curve(&CurveSpec {
        dimension: 3,
        shape: ShapeSpec::Segment {
            start: vec![-0.5, 0.0, 0.0],
            end: vec![0.5, 0.0, 0.0],
        },
    })
    .expect("valid segment")
}

/// One turn of a unit-radius helix with pitch 0.25.
pub fn helix() -> Curve {
    make_curve(&CurveSpec {
        dimension: 3,
        shape: ShapeSpec::Helix {
            center: vec![0.0, 0.0, 0.0],
            radius: 1.0,
            pitch: 0.25,
            axis_u: vec![1.0, 0.0, 0.0],
            axis_v: vec![0.0, 1.0, 0.0],
            axis_w: vec![0.0, 0.0, 1.0],
            t_start: 0.0,
            t_end: TAU,
        },
    })
    .expect("valid helix")
}

/// Ball of the given radius about the curve's centroid.
pub fn window_about(curve: &Curve, radius: f64) -> Window {
    Window::new(curve.centroid().clone(), radius).expect("positive radius")
}
