//! Injective endomaps of a countably infinite set as exactly queryable
//! symbolic objects, with explicit factorization witnesses.
//!
//! Given cycle types `T_f`, `T_g`, `T_h` whose forward-cycle counts add up,
//! [`pipeline::synthesize`] builds maps `f`, `g`, `h = fg` of those types and
//! [`pipeline::extract_witnesses`] turns them into permutations `a`, `b` with
//! `h0 = a f0 a⁻¹ b g0 b⁻¹` for the canonical representatives `f0`, `g0`, `h0`.
//! Maps act on the right: `fg` applies `f` first.

pub mod analysis;
pub mod canonical;
pub mod cardinal;
pub mod carrier;
pub mod conjugacy;
pub mod constructions;
pub mod describe;
pub mod dot;
pub mod element;
pub mod error;
pub mod injection;
pub mod piecewise;
pub mod pipeline;

mod walk;

pub use cardinal::{CycleType, ExtNat};
pub use carrier::{Bijection, Carrier};
pub use element::Element;
pub use error::Error;
pub use injection::{Certificate, CycleClass, CycleId, Injection, Location};

/// Orbit-tracing step budget used when none is given.
pub const DEFAULT_BUDGET: usize = 4096;

/// Window size used when none is given.
pub const DEFAULT_WINDOW: usize = 512;

/// Window size from `INJFACTOR_DEFAULT_WINDOW`, else [`DEFAULT_WINDOW`].
pub fn default_window() -> usize {
    std::env::var("INJFACTOR_DEFAULT_WINDOW")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_WINDOW)
}
