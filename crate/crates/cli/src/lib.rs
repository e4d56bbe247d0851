//! Command-line harness for `tritile`.
//!
//! The binary is a thin wrapper over [`run`], so everything it does can be
//! driven from tests with in-memory output.

mod commands;
pub mod config;
pub mod generate;
pub mod scan;

pub use commands::run;

/// Exit codes. They are part of the interface and do not change.
pub mod exit {
    /// Factor found, certificate valid, witness found, or plain success.
    pub const OK: i32 = 0;
    /// `verify`: the certificate does not hold.
    pub const INVALID: i32 = 1;
    /// `generate`: the construction does not exist for these parameters.
    pub const INFEASIBLE: i32 = 2;
    /// `solve`: no factor, with a certificate.
    pub const NO_FACTOR: i32 = 3;
    /// `solve`: undecided. `detect`: no witness found.
    pub const UNKNOWN: i32 = 4;
    /// `solve`: undecided, but the graph was placed in a structural branch.
    pub const STRUCTURE: i32 = 5;
    /// Malformed input files or command line.
    pub const PARSE: i32 = 64;
    pub const USAGE: i32 = 64;
    /// Well-formed input that the command cannot work with, e.g. `h ∤ N`.
    pub const DATA: i32 = 65;
    pub const SOFTWARE: i32 = 70;
    pub const IO: i32 = 74;
}
