//! Exact sample complexity of agnostic PAC learning on finite problems,
//! decided through polynomial sign conditions over the probability simplex.

pub mod algebra;
pub mod driver;
pub mod error;
pub mod model;
pub mod oracle;
pub mod realdecide;
pub mod systems;

pub use error::{Error, Resource, Result};
