//! Fixed-point iteration engines and empirical checkers for generalized
//! contraction conditions.
//!
//! The crate is `no_std` (with `alloc`). It provides
//!
//! * concrete spaces, points and premetrics ([`space`], [`premetric`]),
//!   including the clamped cyclic gap `max(0, d - d(A,B))` and compositions
//!   `G(q)`;
//! * gauges `F`, `G`, `psi` and iterated families with numeric regularity
//!   checks ([`gauge`]);
//! * three-valued checkers for the asymptotic conditions on sequences and
//!   mappings, Meir-Keeler type families, `(F, psi)`-contractions and cyclic
//!   structure ([`certificates`]);
//! * Picard, cyclic and alternating iteration, Cauchy diagnostics and
//!   fixed-point / best-proximity / common-fixed-point extraction
//!   ([`solvers`]).
//!
//! Every check is finite: a `pass` verdict means witnesses were found for
//! every probed value and no counterexample exists within the
//! [`SearchBudget`]; reports say what was searched.

#![no_std]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod certificates;
pub mod error;
pub mod expr;
pub mod gauge;
pub mod map;
pub mod math;
pub mod premetric;
pub mod report;
pub mod solvers;
pub mod space;

pub use error::{Error, Result};
pub use expr::Expr;
pub use gauge::{Gauge, GaugeFamily, Grid, Profile};
pub use map::SelfMap;
pub use premetric::{Claims, Premetric, PremetricKind};
pub use report::{CertificateReport, ConditionId, Regularity, SearchBudget, Verdict, Witness};
pub use solvers::trace::IterationTrace;
pub use space::{CyclicSetting, Norm, Point, Region, Space, SpaceId};

/// Deterministic RNG used for every sampled check.
pub type Rng = rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
