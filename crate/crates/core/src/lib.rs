//! Numerical verification of minimal and singular minimal graph surfaces in
//! Euclidean and Lorentz-Minkowski three-space equipped with semi-symmetric
//! connections.

pub mod catalog;
pub mod connection;
pub mod error;
pub mod exec;
pub mod export;
pub mod ode;
pub mod poly;
pub mod surface;
pub mod types;
pub mod verify;

pub use connection::ConnectionKind;
pub use error::{Error, Result};
pub use surface::{DirectionVector, GraphAxis, GraphSurface, Jet, ScalarField};
pub use types::{Signature, Vec3};
