//! Exact arithmetic substrate: big rationals, cyclotomic numbers, and
//! truncated p-adic rings and power series.

pub mod bernoulli;
pub mod cyc;
pub mod padic;
pub mod rat;
