//! Every chapter of `book/` is included as a module doc so that `cargo test`
//! runs its listings as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/fixed-point.md")]
pub mod fixed_point {}
#[doc = include_str!("../../../book/src/continued-fractions.md")]
pub mod continued_fractions {}
#[doc = include_str!("../../../book/src/ps-primes.md")]
pub mod ps_primes {}
#[doc = include_str!("../../../book/src/exponential-sums.md")]
pub mod exponential_sums {}
#[doc = include_str!("../../../book/src/vaughan.md")]
pub mod vaughan {}
#[doc = include_str!("../../../book/src/experiment.md")]
pub mod experiment {}
