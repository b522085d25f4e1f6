//! Exact scalar arithmetic: big rationals, binomial coefficients, and the
//! real quadratic-radical ring used for code amplitudes and residuals.

mod decimal;
mod factor;
mod radical;
mod rational;

pub use decimal::{sqrt_decimal, to_scientific};
pub use factor::{squarefree_decompose, DEFAULT_TRIAL_BOUND};
pub use radical::{sqrt_canonical, sqrt_canonical_with, Radical, RadicalSum};
pub use rational::{binom_gen, binom_int, parse_rational, rat, Rational};
