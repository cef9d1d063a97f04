//! Simulation and closed-form analysis of reading attacks on quantum seals.
//!
//! A quantum seal encodes one of `N` classical messages into a pure state over
//! a public register (readable by anyone) and a private register (held by a
//! verifier). Reading the message disturbs the state; this crate quantifies the
//! tradeoff between how often a reader guesses the message correctly and how
//! much fidelity the sealed state keeps.
//!
//! Modules, bottom-up:
//!
//! - [`qcore`]: dense complex linear algebra, kets, density matrices, channels.
//! - [`seal`]: sealing schemes, the canonical most-stringent scheme, and the
//!   JSON scheme document.
//! - [`discrimination`]: minimum-error discrimination of the public reduced
//!   states, an optimality checker and a fixed-point solver.
//! - [`attack`]: the interpolating attack measurement, competing attacks, and
//!   metrics computed by direct simulation on the purified states.
//! - [`theory`]: closed-form bounds used as oracles against the simulation.
//! - [`sampling`]: seeded random states, POVMs and channels for property checks.

pub mod attack;
pub mod discrimination;
mod error;
pub mod qcore;
pub mod sampling;
pub mod seal;
pub mod theory;

pub use error::{Error, Result};
