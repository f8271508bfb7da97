pub mod arith;
pub mod cli;
pub mod collar;
pub mod complex;
pub mod efs;
pub mod error;
pub mod gaplabels;
pub mod homology;
pub mod measure;
pub mod oracle;
pub mod report;
pub mod ruleset;

pub use error::{Error, Result};
