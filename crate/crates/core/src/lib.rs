pub mod clifford;
pub mod covariance;
pub mod designs;
pub mod error;
pub mod ffield;
pub mod groups;
pub mod linalg;
pub mod pauli;
pub mod stabilizer;
pub mod suite;
pub mod symplectic;

pub use error::{Error, Result};
