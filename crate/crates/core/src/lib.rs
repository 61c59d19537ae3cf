pub mod calculus;
pub mod certify;
pub mod cosets;
pub mod error;
pub mod func;
pub mod measure;
pub mod padic;

pub use error::{Error, Result};
pub use padic::{Ball, Padic, Valuation};
