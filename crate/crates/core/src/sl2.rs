//! The Lie algebra sl(2, R) and the spectral classification of unitary
//! irreducibles by their Casimir parameter.
//!
//! The fixed basis is
//! ```text
//! U = [0 1; 0 0]   V = [0 0; 1 0]
//! X = [1 0; 0 -1]  Y = [0 -1; -1 0]  Theta = [0 1; -1 0]
//! ```
//! with commutation relations [X, Y] = -2 Theta, [Theta, X] = 2 Y,
//! [Theta, Y] = -2 X, and U = (Theta - Y)/2, V = (-Y - Theta)/2.  The
//! one-parameter group generated by U is the horocycle flow
//! exp(t U) = [1 t; 0 1].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HoromapError, Result};

/// How far sqrt(1 - mu) may sit from an odd integer and still classify
/// as a discrete-series parameter.
pub const DISCRETE_NU_TOLERANCE: f64 = 1e-9;

/// A 2x2 real matrix, row-major.
pub type Mat2 = [[f64; 2]; 2];

/// An element of sl(2, R) with its matrix realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LieElement {
    pub name: BasisName,
    pub matrix: Mat2,
}

/// Names for the distinguished basis elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisName {
    U,
    V,
    X,
    Y,
    Theta,
}

impl BasisName {
    pub const ALL: [BasisName; 5] =
        [BasisName::U, BasisName::V, BasisName::X, BasisName::Y, BasisName::Theta];

    pub fn element(self) -> LieElement {
        let matrix = match self {
            BasisName::U => [[0.0, 1.0], [0.0, 0.0]],
            BasisName::V => [[0.0, 0.0], [1.0, 0.0]],
            BasisName::X => [[1.0, 0.0], [0.0, -1.0]],
            BasisName::Y => [[0.0, -1.0], [-1.0, 0.0]],
            BasisName::Theta => [[0.0, 1.0], [-1.0, 0.0]],
        };
        LieElement { name: self, matrix }
    }
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat_sub(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][j] - b[i][j];
        }
    }
    out
}

pub fn mat_scale(a: &Mat2, s: f64) -> Mat2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

/// Matrix commutator [a, b] = ab - ba.  Exact in floating point for the
/// integer-entry basis matrices.
pub fn commutator(a: &Mat2, b: &Mat2) -> Mat2 {
    mat_sub(&mat_mul(a, b), &mat_mul(b, a))
}

/// The horocycle one-parameter subgroup exp(t U) = [1 t; 0 1].
pub fn horocycle_matrix(t: f64) -> Mat2 {
    [[1.0, t], [0.0, 1.0]]
}

/// Series type of the unitary irreducible with Casimir parameter mu.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesKind {
    /// mu >= 1, spectral parameter nu purely imaginary.
    Principal,
    /// 0 < mu < 1, nu in (0, 1).
    Complementary,
    /// mu <= 0, nu an odd positive integer (mu = 0 is the mock discrete
    /// series and is treated as discrete throughout).
    Discrete,
}

/// Classification data for a Casimir parameter: the series kind, the
/// spectral parameter nu with mu = 1 - nu^2, and for the discrete series
/// the lowest weight n = (1 + nu)/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesClass {
    pub kind: SeriesKind,
    pub mu: f64,
    /// Principal branch: nu = i sqrt(mu - 1) for mu >= 1, nu = sqrt(1 - mu)
    /// otherwise.
    pub nu: Complex64,
    /// Lowest weight for the discrete series, None otherwise.
    pub lowest_weight: Option<i64>,
}

impl SeriesClass {
    /// Real part of nu; 0 in the principal series.
    pub fn re_nu(&self) -> f64 {
        self.nu.re
    }

    /// nu as a real number; valid outside the principal series.
    pub fn real_nu(&self) -> f64 {
        debug_assert!(self.nu.im == 0.0);
        self.nu.re
    }

    /// 1 + nu, the exponent weight appearing throughout the basis formulas.
    pub fn one_plus_nu(&self) -> Complex64 {
        Complex64::new(1.0, 0.0) + self.nu
    }

    /// Lowest admissible coefficient index: n for the discrete series,
    /// unbounded below (represented as None) otherwise.
    pub fn k_floor(&self) -> Option<i64> {
        self.lowest_weight
    }
}

/// Classify a Casimir parameter mu into its series, computing nu on the
/// principal branch of the square root.
///
/// For mu <= 0 the parameter is admitted only when sqrt(1 - mu) lies within
/// `DISCRETE_NU_TOLERANCE` of an odd positive integer; nu is then snapped to
/// that integer exactly.
pub fn classify(mu: f64) -> Result<SeriesClass> {
    if !mu.is_finite() {
        return Err(HoromapError::Config(format!("mu = {mu} is not finite")));
    }
    if mu >= 1.0 {
        return Ok(SeriesClass {
            kind: SeriesKind::Principal,
            mu,
            nu: Complex64::new(0.0, (mu - 1.0).sqrt()),
            lowest_weight: None,
        });
    }
    if mu > 0.0 {
        return Ok(SeriesClass {
            kind: SeriesKind::Complementary,
            mu,
            nu: Complex64::new((1.0 - mu).sqrt(), 0.0),
            lowest_weight: None,
        });
    }
    let nu = (1.0 - mu).sqrt();
    // Nearest odd integer to nu.
    let odd = {
        let m = ((nu - 1.0) / 2.0).round() as i64;
        (2 * m + 1).max(1)
    };
    let distance = (nu - odd as f64).abs();
    if distance > DISCRETE_NU_TOLERANCE {
        return Err(HoromapError::InvalidDiscreteParameter { mu, nu, distance });
    }
    Ok(SeriesClass {
        kind: SeriesKind::Discrete,
        mu,
        nu: Complex64::new(odd as f64, 0.0),
        lowest_weight: Some((odd + 1) / 2),
    })
}
