//! The limiting first-entry density `φ_k(x) = -x1 D'(x1 x)` on `[0, 1]`.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::growth::{denominator_derivative, growth_rate, GrowthProfile};
use crate::error::{ensure, Result};
use crate::quadrature::integrate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiMode {
    Series,
    RootsOfUnity,
    ClosedFormK3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiEvaluator {
    profile: GrowthProfile,
    truncation_order: usize,
    mode: PhiMode,
}

pub const DEFAULT_TRUNCATION: usize = 200;

impl PhiEvaluator {
    pub fn new(k: usize, mode: PhiMode) -> Result<Self> {
        ensure!(
            mode != PhiMode::ClosedFormK3 || k == 3,
            Parameter,
            "the closed form exists only for k = 3"
        );
        Ok(PhiEvaluator {
            profile: growth_rate(k, 1e-14)?,
            truncation_order: DEFAULT_TRUNCATION,
            mode,
        })
    }

    pub fn series(k: usize) -> Result<Self> {
        Self::new(k, PhiMode::Series)
    }

    /// Caps the number of series terms; the series also stops once terms are negligible.
    pub fn with_truncation(mut self, order: usize) -> Self {
        self.truncation_order = order.max(1);
        self
    }

    pub fn k(&self) -> usize {
        self.profile.k
    }

    pub fn profile(&self) -> &GrowthProfile {
        &self.profile
    }

    pub fn mode(&self) -> PhiMode {
        self.mode
    }

    pub fn truncation_order(&self) -> usize {
        self.truncation_order
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        ensure!(
            (0.0..=1.0).contains(&x),
            Range,
            "φ is defined on [0, 1], got x = {x}"
        );
        Ok(self.eval_unchecked(x))
    }

    /// Evaluation without the domain check, for quadrature inner loops.
    pub fn eval_unchecked(&self, x: f64) -> f64 {
        match self.mode {
            PhiMode::Series => self.series_value(x),
            PhiMode::RootsOfUnity => self.roots_of_unity(x),
            PhiMode::ClosedFormK3 => phi3_closed_form(x),
        }
    }

    /// `x1 (1 - u^{k-1}/(k-1)! + u^k/k! - u^{2k-1}/(2k-1)! + ...)`, `u = x1 x`.
    fn series_value(&self, x: f64) -> f64 {
        let k = self.profile.k;
        let u = self.profile.x1 * x;
        let mut sum = 1.0;
        let mut power = 1.0;
        let mut used = 1;
        for i in 1.. {
            power *= u / i as f64;
            let sign = match i % k {
                0 => 1.0,
                r if r == k - 1 => -1.0,
                _ => continue,
            };
            sum += sign * power;
            used += 1;
            if used >= self.truncation_order || power < 1e-17 * sum.abs() {
                break;
            }
        }
        self.profile.x1 * sum
    }

    /// `(x1/k) Σ_{j=1}^{k-1} (1 - ω^j) e^{ω^j x1 x}`.
    fn roots_of_unity(&self, x: f64) -> f64 {
        let k = self.profile.k;
        let u = self.profile.x1 * x;
        let sum: Complex64 = (1..k)
            .map(|j| {
                let w =
                    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / k as f64);
                (Complex64::new(1.0, 0.0) - w) * (w * u).exp()
            })
            .sum();
        self.profile.x1 * sum.re / k as f64
    }

    /// `φ^{(p)}(x) = -x1^{p+1} D^{(p+1)}(x1 x)`, from the shifted series.
    pub fn derivative(&self, x: f64, p: usize) -> f64 {
        let x1 = self.profile.x1;
        -x1.powi(p as i32 + 1) * denominator_derivative(self.profile.k, x1 * x, p + 1)
    }

    /// `x,phi` rows on `grid + 1` equally spaced points of `[0, 1]`.
    pub fn curve_csv(&self, grid: usize) -> Result<String> {
        ensure!(grid >= 1, Parameter, "grid must have at least one interval");
        let mut out = String::from("x,phi\n");
        for i in 0..=grid {
            let x = i as f64 / grid as f64;
            writeln!(out, "{x},{}", self.eval_unchecked(x)).expect("writing to a String");
        }
        Ok(out)
    }
}

/// `φ_3(x) = (4π/9) e^{-πx/(3√3)} sin((x+1)π/3)`.
pub fn phi3_closed_form(x: f64) -> f64 {
    use std::f64::consts::PI;
    4.0 * PI / 9.0 * (-PI * x / (3.0 * 3f64.sqrt())).exp() * ((x + 1.0) * PI / 3.0).sin()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiDiagnostics {
    pub k: usize,
    pub grid: usize,
    /// `max |φ^{(k)} - r_k^{-k} φ|` over the grid.
    pub ode_residual: f64,
    /// Same with the factor `r_k^{k}`, for comparison.
    pub ode_residual_alt: f64,
    /// `φ^{(j)}(0)` for `j = 1..=k-2`.
    pub derivatives_at_zero: Vec<f64>,
    /// `φ^{(k-1)}(1)`.
    pub derivative_at_one: f64,
    pub integral: f64,
    pub integral_error: f64,
    /// `sup |φ_k - 1|` over the grid.
    pub sup_deviation: f64,
}

pub fn phi_diagnostics(k: usize, grid: usize) -> Result<PhiDiagnostics> {
    ensure!(grid >= 1, Parameter, "grid must have at least one interval");
    let phi = PhiEvaluator::series(k)?;
    let x1 = phi.profile.x1;
    let mut ode_residual = 0.0f64;
    let mut ode_residual_alt = 0.0f64;
    let mut sup_deviation = 0.0f64;
    for i in 0..=grid {
        let x = i as f64 / grid as f64;
        let value = phi.eval_unchecked(x);
        let top = phi.derivative(x, k);
        ode_residual = ode_residual.max((top - x1.powi(k as i32) * value).abs());
        ode_residual_alt = ode_residual_alt.max((top - x1.powi(-(k as i32)) * value).abs());
        sup_deviation = sup_deviation.max((value - 1.0).abs());
    }
    let q = integrate(|x| phi.eval_unchecked(x), 0.0, 1.0, 1e-12)?;
    Ok(PhiDiagnostics {
        k,
        grid,
        ode_residual,
        ode_residual_alt,
        derivatives_at_zero: (1..k - 1).map(|p| phi.derivative(0.0, p)).collect(),
        derivative_at_one: phi.derivative(1.0, k - 1),
        integral: q.value,
        integral_error: q.error,
        sup_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        let phi = PhiEvaluator::series(3).unwrap();
        assert!((phi.eval(0.0).unwrap() - 1.209199576).abs() < 1e-8);
        let at_one = phi3_closed_form(1.0);
        assert!((at_one - 0.6606).abs() < 1e-4);
        assert!((phi.eval(1.0).unwrap() - at_one).abs() < 1e-12);
        assert!((phi.eval(0.5).unwrap() - 1.0320).abs() < 1e-4);
        assert!(phi.eval(1.5).is_err());
        assert!(PhiEvaluator::new(4, PhiMode::ClosedFormK3).is_err());
    }

    #[test]
    fn modes_agree() {
        for k in 3..=8 {
            let a = PhiEvaluator::new(k, PhiMode::Series).unwrap();
            let b = PhiEvaluator::new(k, PhiMode::RootsOfUnity).unwrap();
            for i in 0..=1000 {
                let x = i as f64 / 1000.0;
                assert!((a.eval_unchecked(x) - b.eval_unchecked(x)).abs() < 1e-10);
                if k == 3 {
                    assert!((a.eval_unchecked(x) - phi3_closed_form(x)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn decreasing_and_normalized() {
        for k in 3..=6 {
            let d = phi_diagnostics(k, 1000).unwrap();
            assert!((d.integral - 1.0).abs() < 1e-8);
            assert!(d.ode_residual < 1e-6, "k={k}: {}", d.ode_residual);
            assert!(d.ode_residual_alt > 1e-3);
            assert!(d.derivative_at_one.abs() < 1e-12);
            assert!(d.derivatives_at_zero.iter().all(|v| v.abs() < 1e-12));
            let phi = PhiEvaluator::series(k).unwrap();
            let values: Vec<f64> = (0..=200)
                .map(|i| phi.eval_unchecked(i as f64 / 200.0))
                .collect();
            assert!(values.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn flattens_as_k_grows() {
        let sups: Vec<f64> = (3..=10)
            .map(|k| phi_diagnostics(k, 1000).unwrap().sup_deviation)
            .collect();
        assert!(sups.windows(2).all(|w| w[1] < w[0]), "{sups:?}");
    }

    #[test]
    fn curve_export() {
        let csv = PhiEvaluator::series(3).unwrap().curve_csv(4).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,phi");
        assert_eq!(lines.len(), 6);
        assert!(lines[5].starts_with("1,"));
    }
}
