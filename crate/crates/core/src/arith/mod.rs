//! Exact scalar layers: rationals, `Z/mZ`, cyclotomic fields and truncated series.

mod cyclo;
mod poly;
mod rational;
mod residue;
mod series;

pub use cyclo::CycloElement;
pub use poly::{cyclo_poly, euler_phi, IntPoly};
pub use rational::{
    binomial, binomial_signed, factorial, format_rational, frac, int, p_adic_valuation,
    parse_rational, pow, rat, serde_rational, Rational,
};
pub use residue::{is_zero_mod, mod_u64, Residue};
pub use series::PuiseuxSeries;
