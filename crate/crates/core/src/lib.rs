//! Computational laboratory for the distribution of `αp² + β` modulo one over
//! Piatetski-Shapiro primes `p = ⌊n^{1/γ}⌋`.
//!
//! The crate is layered bottom-up:
//!
//! * [`numerics`]: fixed-point reals, `{x}`, `‖x‖`, `ψ`, `e(x)`, `n^γ`.
//! * [`diophantine`]: continued fractions of `α` and Dirichlet approximants of `αh`.
//! * [`primes`]: segmented sieve with `Λ`, `μ`, `τ` and Piatetski-Shapiro membership.
//! * [`expsums`]: exponential sums over primes and bound-ratio checkers.
//! * [`vaughan`]: Vaughan's identity coefficients and the four-sum split.
//! * [`experiment`]: the parameter cascade, `F_Δ`, `Γ = Γ₁ + Γ₂` and the solution search.
//! * [`report`]: CSV/JSON report emission shared by the command-line tool.
//! * [`cli`]: the `pslab` subcommands, callable in-process through [`cli::run`].

pub mod numerics;
pub mod diophantine;
pub mod primes;
pub mod expsums;
pub mod vaughan;
pub mod experiment;
pub mod report;
pub mod cli;
