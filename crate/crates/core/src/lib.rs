//! Fractional length of curves in ℝⁿ: disc-parity geometry, Monte-Carlo
//! estimators for the σ-length and the nonlocal curvature vector, and
//! numerical checks of the change-of-variables identities behind them.

pub mod curvature;
pub mod curve;
pub mod disc;
pub mod error;
pub mod fraclen;
pub mod geometry;
pub mod mc;
#[cfg(any(test, feature = "test-oracles"))]
pub mod oracle;
pub mod quadrature;
pub mod verify;

pub use curvature::{
    el_integrand, el_residual, kappa_sigma, kappa_sigma_split, CurvatureOptions, CurvatureResult,
    Normalization, SplitCurvature, SweepRow,
};
pub use curve::{
    arclength, bounding_radius, bounding_radius_about, make_curve, ArclengthTable, Curve,
    CurveSpec, ShapeSpec,
};
pub use disc::{
    boundary_meets_window, canonical_hit, classify_disc, hyperplane_crossings, rim_distance,
    Classifier, CurveIndex, Disc, DiscClass, DiscLabel, Hit, Root, Tolerances, Window,
};
pub use error::{Error, Result};
pub use fraclen::{
    len_sigma, len_sigma_with, limit_constant, limit_sweep, projection_limit_constant,
    EstimatorResult, LengthOptions, LimitSweep, LimitSweepRow, ProposalDescriptor, SigmaParam,
    Unbiasing,
};
pub use geometry::{
    ball_volume, measure_uperp2, orthonormal_complement, perp_decompose, sample_perp_pair,
    sample_unit_sphere, sphere_area, uperp2_abs_projection_integral, Orthogonal, PerpPair,
    UnitVecN, VecN,
};
pub use mc::{derive_seed, Moments, SampleStream, SamplingOptions};
pub use verify::{
    boundary_tangent_vectors, closed_form_jacobian, exact_jacobian, fd_gram_jacobian,
    fd_gram_jacobian_embedded, jacobian_report, lemma_int_target, normal_vector_m,
    normal_vector_m_with_tol, random_manifold_point, verify_lemma_int, JacobianReport,
    LemmaIntReport, ManifoldPoint, MapId,
};
