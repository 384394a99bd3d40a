//! Ultragraph groupoids and their topological full groups.

pub mod cli;
pub mod conditions;
pub mod constructions;
pub mod cylinder;
pub mod epset;
pub mod error;
pub mod fullgroup;
pub mod groupoid;
pub mod oracle;
pub mod path;
pub mod script;
pub mod syntax;
pub mod ultragraph;

pub use epset::EpSet;
pub use error::{Result, UgkError};
