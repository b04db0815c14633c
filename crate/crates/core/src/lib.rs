pub mod audit;
pub mod bounds;
pub mod cli;
pub mod cmi;
pub mod counterexample;
pub mod error;
pub mod lemmacov;
pub mod limits;
pub mod probcore;
pub mod report;
pub mod setting;

pub use error::{Error, Result};
pub use limits::Limits;
