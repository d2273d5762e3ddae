//! Simulator and analysis toolkit for a measurement-device-independent QKD
//! protocol certified by CHSH violation.
//!
//! Alice and Bob prepare single qubits in the Z–X plane of the Bloch sphere and
//! send them to an untrusted relay that announces Bell-state measurement
//! outcomes. Rounds announced as ψ⁺ with both parties in CHSH bases estimate
//! the Bell statistic `g`; rounds with both parties in the Z basis and a ψ±
//! announcement form the raw key and give the QBER `e`. The certified secret
//! fraction is `f(g) − h(e)` with `f(g) = 1 − log₂(1 + √(2 − g²/4))`.
//!
//! Modules:
//! - [`quantum`] — exact one/two-qubit states, observables, Born rule, channels
//! - [`protocol`] — the three-party round state machine and sifting
//! - [`estimation`] — conditional-probability tables, CHSH value, QBER, and the
//!   closed-form table for quantum relay strategies
//! - [`keyrate`] — binary entropy, the min-entropy bound, rates and thresholds
//! - [`postprocess`] — cascade-style reconciliation and Toeplitz hashing
//! - [`cli`] — the `qkdsim` command-line surface

pub mod cli;
pub mod config;
pub mod error;
pub mod estimation;
pub mod keyrate;
pub mod postprocess;
pub mod protocol;
pub mod quantum;
pub mod report;

pub use error::{Error, Result};
