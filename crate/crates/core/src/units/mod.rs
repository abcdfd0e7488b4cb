//! Elliptic units on the Tate curve, their cusp behaviour, and the cyclotomic units they restrict to.

mod cusp;
mod residue;
mod theta;
mod xi;

pub use cusp::{cusp_value_closed, epsilon_cusp_eval, epsilon_qexp, eta_qexp, squaring_identity, CuspValue};
pub use residue::{
    compare_norm, fiber_valuations, first_difference, norm_check_theta, norm_factors,
    residue_elliptic_soule, NormReport,
};
pub use theta::{
    predicted_valuation, theta_qexp, theta_series, theta_shift, theta_valuation, ThetaSpec,
    TorsionPoint,
};
pub use xi::{norm_under_power, xi, xi_c, RationalFunction};
