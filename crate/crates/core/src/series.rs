//! Exact bivariate power series truncated at a total degree, and the `k = 3`
//! generating-function identity
//! `T (x³y³ - (1-x)³) = P F(y) + Q G(xy) + R`.

use std::fmt::{self, Write as _};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{ensure, Result};
use crate::triangle::CountTriangle;

/// Coefficients `c(i, j)` of `x^i y^j` for `i + j <= cap`.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries2D {
    cap: usize,
    coeffs: Vec<BigInt>,
}

#[inline]
fn slot(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

impl TruncatedSeries2D {
    pub fn zero(cap: usize) -> Self {
        TruncatedSeries2D {
            cap,
            coeffs: vec![BigInt::zero(); slot(0, cap) + 1],
        }
    }

    /// Polynomial from `(i, j, coefficient)` terms; terms above the cap are dropped.
    pub fn from_terms(cap: usize, terms: &[(usize, usize, i64)]) -> Self {
        let mut s = Self::zero(cap);
        for &(i, j, c) in terms {
            if i + j <= cap {
                s.coeffs[slot(i, j)] += c;
            }
        }
        s
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Coefficient of `x^i y^j`; `None` above the cap.
    pub fn get(&self, i: usize, j: usize) -> Option<&BigInt> {
        (i + j <= self.cap).then(|| &self.coeffs[slot(i, j)])
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        assert!(
            i + j <= self.cap,
            "({i}, {j}) lies above the cap {}",
            self.cap
        );
        self.coeffs[slot(i, j)] = value;
    }

    /// `(i, j, c)` for every nonzero coefficient, by total degree then `j`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        (0..=self.cap)
            .flat_map(|d| (0..=d).map(move |j| (d - j, j)))
            .map(|(i, j)| (i, j, &self.coeffs[slot(i, j)]))
            .filter(|(_, _, c)| !c.is_zero())
    }

    /// `Σ_n g_n (xy)^n`.
    pub fn diagonal(cap: usize, g: &[BigInt]) -> Self {
        let mut s = Self::zero(cap);
        for (n, c) in g.iter().enumerate() {
            if 2 * n <= cap {
                s.coeffs[slot(n, n)] = c.clone();
            }
        }
        s
    }

    /// `Σ_n f_n y^n`.
    pub fn in_y(cap: usize, f: &[BigInt]) -> Self {
        let mut s = Self::zero(cap);
        for (n, c) in f.iter().enumerate().take(cap + 1) {
            s.coeffs[slot(0, n)] = c.clone();
        }
        s
    }

    /// Largest `|c(i, j)|` with `i + j <= degree`.
    pub fn max_abs_up_to(&self, degree: usize) -> BigInt {
        self.terms()
            .filter(|(i, j, _)| i + j <= degree)
            .map(|(_, _, c)| c.abs())
            .max()
            .unwrap_or_default()
    }

    pub fn first_nonzero_up_to(&self, degree: usize) -> Option<(usize, usize)> {
        self.terms()
            .find(|(i, j, _)| i + j <= degree)
            .map(|(i, j, _)| (i, j))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,coefficient\n");
        for (i, j, c) in self.terms() {
            writeln!(out, "{i},{j},{c}").expect("writing to a String");
        }
        out
    }

    fn same_cap(&self, other: &Self) {
        assert_eq!(self.cap, other.cap, "series caps differ");
    }
}

impl fmt::Debug for TruncatedSeries2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TruncatedSeries2D")
            .field("cap", &self.cap)
            .field(
                "terms",
                &self
                    .terms()
                    .map(|(i, j, c)| (i, j, c.to_string()))
                    .collect::<Vec<_>>(),
            )
            .finish()
    }
}

impl Add for &TruncatedSeries2D {
    type Output = TruncatedSeries2D;

    fn add(self, rhs: Self) -> TruncatedSeries2D {
        self.same_cap(rhs);
        TruncatedSeries2D {
            cap: self.cap,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &TruncatedSeries2D {
    type Output = TruncatedSeries2D;

    fn sub(self, rhs: Self) -> TruncatedSeries2D {
        self.same_cap(rhs);
        TruncatedSeries2D {
            cap: self.cap,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &TruncatedSeries2D {
    type Output = TruncatedSeries2D;

    fn neg(self) -> TruncatedSeries2D {
        TruncatedSeries2D {
            cap: self.cap,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &TruncatedSeries2D {
    type Output = TruncatedSeries2D;

    fn mul(self, rhs: Self) -> TruncatedSeries2D {
        self.same_cap(rhs);
        let cap = self.cap;
        let mut out = TruncatedSeries2D::zero(cap);
        let left: Vec<_> = self.terms().collect();
        let right: Vec<_> = rhs.terms().collect();
        for &(i, j, a) in &left {
            for &(p, q, b) in &right {
                if i + j + p + q <= cap {
                    out.coeffs[slot(i + p, j + q)] += a * b;
                }
            }
        }
        out
    }
}

/// `T(x, y)`, `F(y)` and `G(z)` built from a `k = 3` triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSet {
    /// Coefficient of `x^m y^n` is `f_3(m, n)` for `m <= n`, zero otherwise.
    pub t: TruncatedSeries2D,
    /// `Σ_{n>=1} f_3(n) y^n`.
    pub f: TruncatedSeries2D,
    /// `G(z) = Σ_{n>=1} g_3(n) z^n` as a univariate coefficient list (index `n`).
    pub g: Vec<BigInt>,
}

pub fn build_series(triangle: &CountTriangle, cap: usize) -> Result<SeriesSet> {
    ensure!(
        triangle.k() == 3,
        Parameter,
        "the identity is stated for k = 3"
    );
    ensure!(
        triangle.max_n() >= cap,
        Range,
        "triangle covers n <= {}, need {cap}",
        triangle.max_n()
    );
    let mut t = TruncatedSeries2D::zero(cap);
    for n in 1..cap {
        for m in 1..=n.min(cap - n) {
            t.set(m, n, triangle.entry(m, n)?.clone());
        }
    }
    let mut f_coeffs = vec![BigInt::zero()];
    for n in 1..=cap {
        f_coeffs.push(triangle.f_total(n)?.clone());
    }
    let mut g = vec![BigInt::zero()];
    for n in 1..=cap / 2 {
        g.push(triangle.g3(n)?.clone());
    }
    Ok(SeriesSet {
        t,
        f: TruncatedSeries2D::in_y(cap, &f_coeffs),
        g,
    })
}

/// `(T (x³y³ - (1-x)³), P F + Q G(xy) + R)`.
pub fn gen_identity_sides(
    triangle: &CountTriangle,
    cap: usize,
) -> Result<(TruncatedSeries2D, TruncatedSeries2D)> {
    let s = build_series(triangle, cap)?;
    let poly = |terms: &[(usize, usize, i64)]| TruncatedSeries2D::from_terms(cap, terms);
    // x³y³ - (1-x)³
    let multiplier = poly(&[(3, 3, 1), (0, 0, -1), (1, 0, 3), (2, 0, -3), (3, 0, 1)]);
    // P = xy (x²y² - (1-x)²)
    let p = poly(&[(3, 3, 1), (1, 1, -1), (2, 1, 2), (3, 1, -1)]);
    // Q = (x-1) x² y (xy + x - 1)
    let q = poly(&[(4, 2, 1), (3, 2, -1), (4, 1, 1), (3, 1, -2), (2, 1, 1)]);
    // R = (x-1) x y ((x-1)² - x²y²)
    let r = poly(&[
        (4, 1, 1),
        (3, 1, -3),
        (2, 1, 3),
        (1, 1, -1),
        (4, 3, -1),
        (3, 3, 1),
    ]);
    let g_xy = TruncatedSeries2D::diagonal(cap, &s.g);
    let lhs = &s.t * &multiplier;
    let rhs = &(&(&p * &s.f) + &(&q * &g_xy)) + &r;
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenIdentityReport {
    pub cap: usize,
    /// Residuals are inspected for total degree up to `cap - 4`.
    pub checked_degree: usize,
    pub max_abs_residual: BigInt,
    pub first_nonzero: Option<(usize, usize)>,
}

impl GenIdentityReport {
    pub fn holds(&self) -> bool {
        self.max_abs_residual.is_zero()
    }
}

pub fn verify_gen_identity(triangle: &CountTriangle, cap: usize) -> Result<GenIdentityReport> {
    ensure!(cap >= 8, Parameter, "cap must be at least 8, got {cap}");
    let (lhs, rhs) = gen_identity_sides(triangle, cap)?;
    let residual = &lhs - &rhs;
    let checked_degree = cap - 4;
    Ok(GenIdentityReport {
        cap,
        checked_degree,
        max_abs_residual: residual.max_abs_up_to(checked_degree),
        first_nonzero: residual.first_nonzero_up_to(checked_degree),
    })
}
