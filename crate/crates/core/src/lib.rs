//! Exact construction of the space of axially symmetric phylogenetic trees
//! (ASPTs) as a polyhedral fan, together with the type C cluster variety it
//! tropicalizes and the classification of its signed tropicalizations.

pub mod cluster;
pub mod error;
pub mod fan;
pub mod linalg;
pub mod polygon;
pub mod poset;
pub mod trees;

pub use error::{Error, Result};
