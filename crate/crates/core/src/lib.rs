//! Exact enumeration and asymptotics of permutations by their `k`-descent sets.
//!
//! A `k`-descent of `w ∈ S_n` starts at position `i` when
//! `w(i) > w(i+1) > ... > w(i+k-1)`. The crate computes
//!
//! * the triangle `f_k(m, n)` of `k`-descent-avoiding permutations by first entry,
//! * `d_k(I, n)` and `d_k(I, m, n)` for an arbitrary prescribed set `I`,
//! * brute-force counts for checking both,
//! * the growth constants, limiting densities and limit ratios of these counts.
//!
//! ```
//! use kdescent_core::{build_triangle, count_with_set, DescentSpec};
//!
//! let tri = build_triangle(3, 8).unwrap();
//! assert_eq!(tri.f_total(7).unwrap().to_string(), "2017");
//! let spec = DescentSpec::new(3, [1]).unwrap();
//! assert_eq!(count_with_set(&spec, 4).to_string(), "3");
//! ```

pub mod asymptotics;
pub mod combin;
pub mod descent;
pub mod error;
pub mod integrals;
pub mod oracle;
pub mod quadrature;
pub mod sampling;
pub mod series;
pub mod triangle;

pub use asymptotics::{
    discrete_order_stat, growth_rate, order_stat_density, phi_diagnostics, theta, theta_flank,
    theta_mc_check, GrowthProfile, OrderStatSpec, PhiEvaluator, PhiMode,
};
pub use descent::{
    count_with_set, last_value_distribution, parametrized_count, parametrized_row, DescentSpec,
    GeneralTable,
};
pub use error::{Error, Result};
pub use integrals::{
    c_constant, convergence_report, dasy_integral_direct, dudu_table, equidist_constant,
    ConstantResult, EquidistReport,
};
pub use oracle::{enumerate, enumerate_table, joint_counts, Grouping, OracleReport, PatternQuery};
pub use series::{build_series, verify_gen_identity, TruncatedSeries2D};
pub use triangle::{build_triangle, CountTriangle};

/// Big integers as used throughout the public API.
pub use num_bigint::BigInt;
