//! Local inversion by contraction, exhaustive certificates for the Jacobian
//! property and for local monotonicity, and the U/V/I partition of a domain.
//!
//! Certificates are finite-precision statements: every residue of the ball
//! modulo `p^k` is enumerated, and all failures are reported inside the
//! certificate together with a witness.

mod jacobian;
mod monotone;
mod partition;
mod solve;

use serde::Serialize;

use crate::calculus::DiffConfig;

pub use jacobian::{
    certify_jacobian, certify_jacobian_with, local_image_ball, local_image_ball_with, CheckA,
    CheckB, CheckC, CheckD, JacobianCertificate, PairWitness, PointDerivative,
};
pub use monotone::{
    certify_monotone, certify_monotone_with, MonotoneMode, MonotonicityCertificate, TripleWitness,
};
pub use partition::{
    partition_domain, partition_domain_with, DomainPartition, PartitionEntry, Tag,
    CERTIFICATION_MARGIN, DEFAULT_DEPTH,
};
pub use solve::{local_solve, local_solve_estimated, SolveReport, SolveStep};

pub(crate) use partition::{depth_cap, test_ball, BallTest};

/// Enumeration budget and derivative sampling used by the certifiers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertifyOptions {
    /// Maximum number of residues enumerated for one ball.
    pub budget: u64,
    /// Strict-derivative settings for checks (b) and (c); the scale window
    /// is moved inside each ball.
    pub diff: DiffConfig,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            budget: 1_000_000,
            diff: DiffConfig {
                j0: 1,
                jmax: 6,
                s: 4,
                budget: 20_000,
                samples: 16,
                seed: 0,
            },
        }
    }
}
