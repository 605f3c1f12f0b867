//! Exact arithmetic for Eisenstein series, character sums, and p-adic
//! L-functions over the rationals.
//!
//! The crate is organized around a small exact-arithmetic substrate and the
//! number-theoretic layers built on top of it:
//!
//! - [`exactmath`] — big rationals, cyclotomic numbers, truncated p-adic
//!   rings and power series. Everything downstream works over these value
//!   types; no floating point is used anywhere.
//! - [`characters`] — primitive Dirichlet characters, conductors, parities,
//!   local components, and the Teichmüller character.
//! - [`localsums`] — Gauss sums, Jacobi sums, local epsilon factors as
//!   monomials in `q^{-s}`, degenerate intertwining constants, and a
//!   brute-force local-integral oracle that certifies every closed form.
//! - [`eisenstein`] — q-expansions of Eisenstein series, Dirichlet L-values
//!   at non-positive integers via generalized Bernoulli numbers, Hecke
//!   operators, eta-product cusp forms, and coefficientwise congruences.
//! - [`cusps`] — cusp enumeration for `Γ0(N)`/`Γ1(N)`, constant terms at
//!   every cusp by two independent routes, the boundary constant-term map,
//!   the Hecke action on cusp divisors, and the ordinary projector.
//! - [`lambda_adic`] — one-variable families of Eisenstein coefficients over
//!   truncated Iwasawa algebras, weight specialization, the Kubota–Leopoldt
//!   p-adic L-function, and congruence-module order reports.
//! - [`report`] — run manifests and deterministic report serialization used
//!   by the command line driver and the verification batteries.
//!
//! Every identity the crate claims is checked exactly: test suites compare
//! closed forms against independent finite summations (unit-group sums,
//! shell-by-shell Haar integrals, divisor sums) with no tolerances.
//!
//! Most capabilities have a runnable demo under `examples/`; start with
//! `cargo run --example gauss_sums`.

pub mod characters;
pub mod cusps;
pub mod eisenstein;
pub mod exactmath;
pub mod lambda_adic;
pub mod localsums;
pub mod report;
pub mod verify;

pub use exactmath::cyc::CycNum;
pub use exactmath::rat::Rat;
