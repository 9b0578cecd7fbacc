//! Exact rational, cyclotomic and capped-precision p-adic arithmetic.

mod cyclotomic;
mod ntheory;
mod padic;
mod rational;
mod zmod;

pub use cyclotomic::{cyclotomic_polynomial, CyclotomicNumber};
pub use ntheory::{
    discrete_log, divisor_power_sum, divisors, euler_phi, factorize, is_prime, kronecker_symbol,
    mod_inverse, moebius, multiplicative_order, primitive_root, require_odd_prime, valuation,
    valuation_u64,
};
pub use padic::{PadicApprox, Valuation};
pub use rational::{parse_rational, rat, rational_to_string, rational_valuation, Rational};
pub use zmod::ZmodPk;
