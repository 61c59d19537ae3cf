//! Exact Haar measure on residue-described sets, integration of `|Df|`
//! over ball decompositions, and the change-of-variables comparison.
//!
//! Measures are exact rationals normalized by `μ(ℤ_p) = 1`; a ball of
//! radius `r` has measure `p^(−r)`.

mod cov;
mod haar;

pub use cov::{
    decompose_by_df, decompose_by_df_with, integrate_abs_df, integrate_abs_df_with,
    verify_change_of_variables, verify_change_of_variables_with, BallDecomposition,
    ChangeOfVariables, DecomposedBall, Integral,
};
pub use haar::{ball_measure, residue_set_measure, MeasureValue};
