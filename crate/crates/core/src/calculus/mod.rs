//! Multi-scale estimates of strict and directional derivatives, and the
//! finite-precision classification of points.
//!
//! Every verdict is a claim at a stated scale: quotients are sampled on balls
//! `B(a, j)` for `j = j0..=jmax`, and the value is certified only modulo
//! `p^certified_scale`.

mod estimate;

pub use estimate::{
    bounded_quotients, classify_point, difference_quotient, directional_derivative,
    strict_derivative, DiffConfig, DiffEstimate, DirectionalReport, PointClass, ScaleSummary,
    Verdict,
};
