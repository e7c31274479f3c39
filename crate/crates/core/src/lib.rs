pub mod classify;
pub mod cocycle;
pub mod element;
pub mod error;
pub mod expr;
pub mod norm;
pub mod params;
pub mod sample;
pub mod scalar;
pub mod traces;
pub mod verify;

pub use error::{Error, Result};
pub use expr::{Expr, Var};
pub use params::Params;
pub use scalar::ExactScalar;
