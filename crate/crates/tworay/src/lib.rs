//! Reports, fixtures and search plumbing around `tworay-core`, shared by the
//! `tworay` binary and its tests.

pub mod error;
pub mod fixtures;
pub mod format;
pub mod report;
pub mod search;

pub use error::CliError;
pub use report::{canonical_json, Family, LinkReport, Params};
pub use search::{parse_bounds, Bounds, SearchReport};
