//! The e.g.f. denominator `D(z) = Σ z^{kℓ}/(kℓ)! - z^{kℓ+1}/(kℓ+1)!` and the
//! growth constants read off its smallest positive zero `x1`:
//! `f_k(n) ~ n! c_k r_k^n` with `r_k = 1/x1` and `c_k = -1/(x1 D'(x1))`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::combin::factorial_f64;
use crate::error::{ensure, Result};

const MAX_TERMS: usize = 400;

/// Coefficient sign of `z^j / j!` in `D`: `+1` for `j ≡ 0`, `-1` for `j ≡ 1 (mod k)`.
#[inline]
fn coeff(k: usize, j: usize) -> f64 {
    match j % k {
        0 => 1.0,
        1 => -1.0,
        _ => 0.0,
    }
}

/// `D^{(p)}(z) = Σ_i coeff(i + p) z^i / i!`.
pub fn denominator_derivative(k: usize, z: f64, p: usize) -> f64 {
    let mut sum = 0.0;
    let mut peak = 0.0f64;
    let mut power = 1.0; // z^i / i!
    for i in 0..MAX_TERMS {
        let c = coeff(k, i + p);
        if c != 0.0 {
            sum += c * power;
            peak = peak.max(sum.abs());
        }
        if i as f64 > z.abs() && power.abs() < 1e-17 * peak.max(1e-300) {
            break;
        }
        power *= z / (i + 1) as f64;
    }
    sum
}

pub fn denominator(k: usize, z: f64) -> f64 {
    denominator_derivative(k, z, 0)
}

/// `D(z) = (1/k) Σ_{j=1}^{k-1} (1 - ω^{-j}) e^{ω^j z}` with `ω = e^{2πi/k}`.
pub fn denominator_finite(k: usize, z: f64) -> f64 {
    let sum: Complex64 = (1..k)
        .map(|j| {
            let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / k as f64);
            (Complex64::new(1.0, 0.0) - w.inv()) * (w * z).exp()
        })
        .sum();
    sum.re / k as f64
}

/// Bounds on `1/r_k` for `k >= 4`: `1 + (1 - g)/k!` and `1 + (1 + h)/k!`.
pub fn warlimont_bounds(k: usize) -> Option<(f64, f64)> {
    if k < 4 {
        return None;
    }
    let kf = factorial_f64(k as u64);
    let g = (kf + 1.0) / (factorial_f64(k as u64 + 1) + 1.0);
    let h = 2.0 * (k as f64 + 1.0) / (kf - 2.0 * (k as f64 + 1.0));
    Some((1.0 + (1.0 - g) / kf, 1.0 + (1.0 + h) / kf))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthProfile {
    pub k: usize,
    pub x1: f64,
    pub r_k: f64,
    pub c_k: f64,
    pub gamma_hint: Option<f64>,
}

impl GrowthProfile {
    pub fn to_json(&self) -> serde_json::Value {
        let (lo, hi) = match warlimont_bounds(self.k) {
            Some((lo, hi)) => (serde_json::json!(lo), serde_json::json!(hi)),
            None => (serde_json::Value::Null, serde_json::Value::Null),
        };
        serde_json::json!({
            "k": self.k,
            "x1": self.x1,
            "r_k": self.r_k,
            "c_k": self.c_k,
            "warlimont_lower": lo,
            "warlimont_upper": hi,
        })
    }

    /// Whether `1/r_k` lies in the Warlimont interval (`None` for `k = 3`).
    pub fn within_warlimont(&self) -> Option<bool> {
        warlimont_bounds(self.k).map(|(lo, hi)| lo <= self.x1 && self.x1 <= hi)
    }
}

/// Locates `x1` by bisection on `[1, √2]`, where `D` changes sign for every `k >= 3`.
pub fn growth_rate(k: usize, tol: f64) -> Result<GrowthProfile> {
    ensure!(k >= 3, Parameter, "growth constants need k >= 3, got {k}");
    ensure!(tol >= 1e-14, Parameter, "tolerance {tol:e} below 1e-14");
    let (mut lo, mut hi) = (1.0f64, std::f64::consts::SQRT_2);
    let (f_lo, f_hi) = (denominator(k, lo), denominator(k, hi));
    ensure!(
        f_lo > 0.0 && f_hi < 0.0,
        Numerical,
        "no sign change of the denominator on [{lo}, {hi}] for k = {k}"
    );
    while hi - lo > tol * 0.5 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if denominator(k, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x1 = 0.5 * (lo + hi);
    let slope = denominator_derivative(k, x1, 1);
    ensure!(
        slope < 0.0,
        Numerical,
        "denominator slope at the root is not negative"
    );
    Ok(GrowthProfile {
        k,
        x1,
        r_k: 1.0 / x1,
        c_k: -1.0 / (x1 * slope),
        gamma_hint: (k == 3).then_some(0.5),
    })
}

/// `c_3 = (3√3/(2π)) e^{π/(3√3)}`.
pub fn c3_closed_form() -> f64 {
    let s = 3.0 * 3f64.sqrt();
    s / (2.0 * std::f64::consts::PI) * (std::f64::consts::PI / s).exp()
}
