//! Structure files, reports and the command-line front end for `pqnb-core`.

pub mod cli;
pub mod format;
pub mod report;
