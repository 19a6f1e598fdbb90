#![allow(dead_code)]

use std::f64::consts::TAU;

use fraclen_core::{make_curve, Curve, CurveSpec, ShapeSpec, VecN, Window};

pub fn segment() -> Curve {
    make_curve(&CurveSpec {
        dimension: 3,
        shape: ShapeSpec::Segment {
            start: vec![-0.5, 0.0, 0.0],
            end: vec![0.5, 0.0, 0.0],
        },
    })
    .unwrap()
}

pub fn unit_circle() -> Curve {
    make_curve(&CurveSpec {
        dimension: 3,
        shape: ShapeSpec::CircleArc {
            center: vec![0.0, 0.0, 0.0],
            radius: 1.0,
            axis_u: vec![1.0, 0.0, 0.0],
            axis_v: vec![0.0, 1.0, 0.0],
            angle_start: 0.0,
            angle_end: TAU,
        },
    })
    .unwrap()
}

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
    .unwrap()
}

pub fn open_spline() -> Curve {
    make_curve(&CurveSpec {
        dimension: 4,
        shape: ShapeSpec::Spline {
            nodes: vec![
                vec![0.0, 0.0, 0.0, 0.0],
                vec![1.0, 0.5, 0.0, 0.2],
                vec![1.5, 1.5, 0.5, 0.0],
                vec![1.0, 2.5, 1.0, -0.3],
                vec![0.0, 3.0, 0.5, 0.0],
            ],
            closed: false,
        },
    })
    .unwrap()
}

pub fn closed_spline() -> Curve {
    make_curve(&CurveSpec {
        dimension: 3,
        shape: ShapeSpec::Spline {
            nodes: vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.2, 0.3],
                vec![-1.1, 0.0, -0.2],
                vec![0.0, -0.9, 0.1],
                vec![0.7, -0.6, 0.4],
            ],
            closed: true,
        },
    })
    .unwrap()
}

pub fn all_curves() -> Vec<(&'static str, Curve)> {
    vec![
        ("segment", segment()),
        ("circle", unit_circle()),
        ("helix", helix()),
        ("open_spline", open_spline()),
        ("closed_spline", closed_spline()),
    ]
}

pub fn ball(center: &[f64], radius: f64) -> Window {
    Window::new(VecN::new(center).unwrap(), radius).unwrap()
}

/// `|x − y| ≤ k √(se_x² + se_y²)`.
pub fn within(x: f64, se_x: f64, y: f64, se_y: f64, k: f64) -> bool {
    (x - y).abs() <= k * se_x.hypot(se_y)
}
