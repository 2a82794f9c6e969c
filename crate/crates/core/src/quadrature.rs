//! Adaptive 7/15-point Gauss–Kronrod quadrature with interval bisection.

use crate::error::{ensure, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_119,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// One G7/K15 panel: (Kronrod estimate, |Kronrod - Gauss|).
fn panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// `∫_a^b f` to absolute tolerance `tol`, bisecting panels until each
/// meets its share of the tolerance.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Quadrature> {
    ensure!(
        a.is_finite() && b.is_finite() && tol > 0.0,
        Parameter,
        "integration needs finite limits and a positive tolerance"
    );
    let mut evaluations = 0;
    let mut stack = vec![(a, b, tol, 0u32)];
    let mut value = 0.0;
    let mut error = 0.0;
    while let Some((lo, hi, share, depth)) = stack.pop() {
        let (est, err) = panel(&mut f, lo, hi);
        evaluations += 15;
        ensure!(
            est.is_finite(),
            Numerical,
            "integrand is not finite on [{lo}, {hi}]"
        );
        if err <= share || hi - lo <= f64::EPSILON * (1.0 + lo.abs()) {
            value += est;
            error += err;
        } else {
            ensure!(
                depth < MAX_DEPTH,
                Numerical,
                "quadrature did not converge on [{lo}, {hi}] (error {err:e} > {share:e})"
            );
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, 0.5 * share, depth + 1));
            stack.push((lo, mid, 0.5 * share, depth + 1));
        }
    }
    Ok(Quadrature {
        value,
        error,
        evaluations,
    })
}

/// Same as [`integrate`] but splits `[a, b]` at the given interior points first.
pub fn integrate_split<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<Quadrature> {
    let mut points = vec![a];
    points.extend(breaks.iter().copied().filter(|&p| p > a && p < b));
    points.push(b);
    let pieces = (points.len() - 1) as f64;
    let mut total = Quadrature {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };
    for w in points.windows(2) {
        let q = integrate(&mut f, w[0], w[1], tol / pieces)?;
        total.value += q.value;
        total.error += q.error;
        total.evaluations += q.evaluations;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn polynomials_are_exact() {
        let q = integrate(|x| x.powi(20), 0.0, 1.0, 1e-14).unwrap();
        assert!((q.value - 1.0 / 21.0).abs() < 1e-15);
        let q = integrate(|x| 3.0 * x * x - 2.0 * x + 7.0, -1.0, 2.0, 1e-12).unwrap();
        assert!((q.value - 27.0).abs() < 1e-12);
    }

    #[test]
    fn smooth_and_kinked() {
        let q = integrate(f64::exp, 0.0, 1.0, 1e-13).unwrap();
        assert!((q.value - (1f64.exp() - 1.0)).abs() < 1e-13);
        let q = integrate(|x| (x - 0.3).abs(), 0.0, 1.0, 1e-10).unwrap();
        assert!((q.value - 0.29).abs() < 1e-10);
        let q = integrate_split(|x| (x - 0.3).abs(), 0.0, 1.0, &[0.3], 1e-13).unwrap();
        assert!((q.value - 0.29).abs() < 1e-14);
        assert!(q.evaluations <= 60);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(integrate(|x| x, 0.0, f64::INFINITY, 1e-8).is_err());
        assert!(integrate(|x| x, 0.0, 1.0, 0.0).is_err());
        assert!(matches!(
            integrate(|x| 1.0 / x, 0.0, 1.0, 1e-8),
            Err(Error::Numerical(_))
        ));
    }
}
