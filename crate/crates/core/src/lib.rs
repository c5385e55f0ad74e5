//! Rainbow Hamiltonian paths in graph collections under Ore-type degree conditions.
//!
//! Given `n` graphs on a shared vertex set `0..n` (graph `i` is color `i`) with
//! every Ore sum at least `n + k`, a prescribed rainbow linear forest `H` with
//! `k` edges and a compatible terminal pair `u, v`, [`solver::solve`] returns
//! either a rainbow Hamiltonian `u,v`-path containing `H` or an extremal
//! certificate showing that none exists. [`oracle`] decides the same questions
//! by exhaustive search on small instances.

pub mod error;
pub mod forest;
pub mod gen;
pub mod graph;
pub mod instance;
pub mod model;
pub mod oracle;
pub mod solver;
pub mod structures;

pub use error::{Error, Result};
pub use forest::{RainbowLinearForest, ReductionPlan};
pub use graph::{Edge, Graph};
pub use instance::Instance;
pub use model::{Color, ColorAssignment, CycleCertificate, GraphCollection, PathCertificate, Sigma2, Vertex};
pub use structures::{ExtremalCertificate, ExtremalKind};

pub(crate) mod clock {
    use std::time::{Duration, Instant};

    /// `None` where the platform has no monotonic clock (browser wasm).
    pub fn start() -> Option<Instant> {
        if cfg!(target_arch = "wasm32") {
            None
        } else {
            Some(Instant::now())
        }
    }

    pub fn exceeded(start: Option<Instant>, limit: Duration) -> bool {
        start.is_some_and(|t| t.elapsed() > limit)
    }
}
