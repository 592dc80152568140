//! Two-party process-matrix causal games and the work they let two
//! cooperating demons extract from a pair of shared singlets.
//!
//! Alice and Bob each hold a "square" and a "circle" qubit. The square of
//! one party and the circle of the other form a singlet. Each party is fed a
//! bit through a process matrix `W`, guesses the other's bit, and rotates its
//! circle qubit conditioned on the guess. The probability that both circles
//! end in the ground state equals the success probability of the
//! guess-your-neighbour's-input game, and the average work extracted is
//! `2ε − ⟨E⟩ = (p_succ − p₂)ε`.
//!
//! Tensor factor conventions (fixed crate-wide):
//!
//! * process matrices and instrument pairs: `(A_I, A_O, B_I, B_O)`;
//! * the four-qubit physical state: `(Alice square, Bob circle, Alice circle,
//!   Bob square)`, so subsystems `{0, 1}` are the red pair and `{2, 3}` the
//!   blue pair;
//! * `|φ⁺⟩ = Σ_i |ii⟩` is unnormalized, and CJ operators carry a full
//!   transpose in the computational basis.
//!
//! A physical realization with spinless fermions (number operators in place
//! of qubit projectors, with the circle–circle coupling `−ε n_blue^A n_red^B`)
//! is equivalent and not modelled separately.

#![forbid(unsafe_code)]
#![allow(clippy::needless_range_loop)]

pub mod appendix;
pub mod cli;
pub mod error;
pub mod expected;
pub mod game;
pub mod info;
pub mod instrument;
pub mod io;
pub mod operator;
pub mod pauli;
pub mod process;
pub mod random;
pub mod scenarios;
pub mod search;
pub mod thermo;

pub use error::{Error, Result};
pub use game::{born_probability, bound_gap, game_stats, GameStats, InputDistribution};

pub use instrument::{Instrument, Party};
pub use operator::Operator;
pub use pauli::{pauli_compose, pauli_decompose, PauliDecomposition, PauliString};
pub use process::{validate, ProcessMatrix, ValidationReport};

/// Absolute tolerance for Hermiticity, positivity and linear constraints.
pub const TOL: f64 = 1e-9;

/// Eigenvalues at or below this are dropped before taking logarithms.
pub const EIG_CUTOFF: f64 = 1e-12;
