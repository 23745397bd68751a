//! Ideal-relative packing indices, largeness and smallness of subsets of groups, and
//! invariant measures, computed at an explicit finite scale.

pub mod bits;
pub mod cli;
pub mod combi;
pub mod completion;
pub mod config;
pub mod error;
pub mod expr;
pub mod free;
pub mod group;
pub mod ideal;
pub mod largeness;
pub mod measure;
pub mod packing;
pub mod report;
pub mod set;
pub mod verify;

pub use error::{Error, Result};
