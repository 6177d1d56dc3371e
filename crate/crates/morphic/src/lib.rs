//! Decide whether two primitive morphisms generate the same infinite word.
//!
//! Iterating a morphism `g` from a letter `x` with `g(x) = x·u` (and growing
//! iterates) yields a unique infinite word `g^ω(x)`. Given two primitive
//! morphisms `g` and `h` over one alphabet with both infinite words defined,
//! [`decide::decide_equality`] answers exactly whether `g^ω(x) = h^ω(x)`:
//!
//! 1. build the towers `f₁ = g^{2n−2}h^{2n−2}` and `f₂ = h^{2n−2}g^{2n−2}`;
//! 2. require the length-difference supremum `BAL(f₁, f₂)` to be finite,
//!    decided exactly through minimal annihilators and cyclotomic
//!    factorization ([`balance`]);
//! 3. check that `f₁(W)` and `f₂(W)` are prefix-comparable for the single
//!    word `W = f₁^{A(n)}(x)`, where `A(n) = ⌊9n³√(n ln n)⌋` — without ever
//!    materializing `W`, whose length is astronomical ([`engine`]).
//!
//! Both tests pass exactly when the infinite words are equal; a failed
//! comparison even reports the first position where they differ.
//!
//! The supporting modules are usable on their own: [`words`] and [`matrix`]
//! for morphism and Parikh arithmetic, [`analysis`] for structural predicates
//! (primitive, growing, ω-existence) and word utilities, [`poly`] for integer
//! polynomial and cyclotomic arithmetic, [`numeric`] for certified interval
//! evaluation of the transcendental thresholds, and [`oracle`] for
//! brute-force reference implementations used in tests. The `morphic` binary
//! ([`cli`]) exposes everything as subcommands with text or JSON output.

pub mod analysis;
pub mod balance;
pub mod cli;
pub mod decide;
pub mod engine;
pub mod error;
pub mod matrix;
pub mod numeric;
pub mod oracle;
pub mod poly;
pub mod words;

pub use error::{Error, Result};
