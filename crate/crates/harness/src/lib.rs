//! Command-line front end and experiment drivers for the rainbow Hamiltonian
//! path solver: single-instance commands, a theorem verification suite, and
//! cycle-existence sweeps with counterexample minimization.

pub mod cli;
pub mod pool;
pub mod report;
pub mod sweep;
pub mod verify;

/// Process exit codes.
pub mod exit {
    pub const PATH: i32 = 0;
    pub const VIOLATION: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const EXTREMAL: i32 = 10;
    pub const UNKNOWN: i32 = 20;
}

pub use report::{Record, Report, Source, Status, Task};
