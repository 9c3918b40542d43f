//! Analysis toolkit for sequences defined as the summed output of a finite
//! transducer reading q-ary digit expansions.
//!
//! The crate is organized around a pipeline:
//!
//! * [`transducer`] — the automaton data model, digit expansions, evaluation
//!   and graph-structural analysis (final components, periods, reset words),
//!   plus the line-oriented text format.
//! * [`recursion`] — compiles recursion systems of the shape
//!   `a(q^κ·n + λ) = a(q^{κ_λ}·n + r_λ) + t_λ` into an equivalent transducer
//!   and decides well-posedness.
//! * [`spectral`] — transition matrices, dominant eigenstructure and the
//!   asymptotic constants of the expected value and variance.
//! * [`dirichlet`] — Dirichlet-series machinery producing the Fourier
//!   coefficients of the periodic fluctuation in the expected value (d = 1).
//! * [`empirical`] — exact prefix moments through order-2 jet arithmetic,
//!   empirical fluctuation extraction and distribution checks.
//!
//! Everything is a pure function over immutable inputs; all reports are plain
//! data and safe to share across threads.

pub mod dirichlet;
pub mod empirical;
pub mod fixtures;
pub mod rational;
pub mod recursion;
pub mod spectral;
pub mod transducer;

pub use rational::Rat;
pub use recursion::{RecursionSystem, WellPosednessReport};
pub use spectral::AsymptoticReport;
pub use transducer::{InputSymbol, StructureReport, Transducer};
