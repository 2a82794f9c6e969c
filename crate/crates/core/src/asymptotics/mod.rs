//! Numerical asymptotics: growth constants, the first-entry density,
//! order statistics and block gap functions.

pub mod growth;
pub mod orderstat;
pub mod phi;
pub mod theta;

pub use growth::{
    c3_closed_form, denominator, denominator_derivative, denominator_finite, growth_rate,
    warlimont_bounds, GrowthProfile,
};
pub use orderstat::{discrete_order_stat, order_stat_density, DiscreteOrderStat, OrderStatSpec};
pub use phi::{phi3_closed_form, phi_diagnostics, PhiDiagnostics, PhiEvaluator, PhiMode};
pub use theta::{theta, theta_flank, theta_mc_check, ThetaCheck};
