//! Core geometric types: radii vectors, the diagonal involution `P`, and
//! exact action values shared by the spectrum, capacity, and solver modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Default relative tolerance for float comparisons throughout the crate.
/// Overridable per call site or through the `SYMCAP_TOL` environment variable
/// in the CLI.
pub const DEFAULT_REL_TOL: f64 = 1e-12;

/// Relative equality with an absolute floor for values near zero.
pub fn approx_eq_rel(a: f64, b: f64, tol: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(1.0);
    (a - b).abs() <= tol * scale
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DomainError {
    #[error("radius entry {index} is not strictly positive and finite: {value}")]
    NonPositiveRadius { index: usize, value: String },
    #[error("radii vector must have at least one entry")]
    LengthZero,
    #[error("expected vector of length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("kappa = {kappa} out of range for n = {n}")]
    KappaOutOfRange { kappa: usize, n: usize },
}

/// Semiaxes r = (r_1, ..., r_n) of an ellipsoid E(r) or polydisc D(r).
///
/// Each squared radius may carry an exact rational representation.  All
/// spectrum arithmetic stays exact when every entry does, which is what makes
/// multiplicity counting well-posed under coincidences like rational ratios
/// of squares.
#[derive(Debug, Clone, PartialEq)]
pub struct Radii {
    values: Vec<f64>,
    squares_exact: Vec<Option<BigRational>>,
}

impl Radii {
    /// Validate a float radii vector. No exact representation is attached.
    pub fn new(values: &[f64]) -> Result<Self, DomainError> {
        if values.is_empty() {
            return Err(DomainError::LengthZero);
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return Err(DomainError::NonPositiveRadius {
                    index: i,
                    value: format!("{v}"),
                });
            }
        }
        Ok(Radii {
            values: values.to_vec(),
            squares_exact: vec![None; values.len()],
        })
    }

    /// Build radii from exact rational squares r_j^2.
    pub fn from_exact_squares(squares: &[BigRational]) -> Result<Self, DomainError> {
        if squares.is_empty() {
            return Err(DomainError::LengthZero);
        }
        let mut values = Vec::with_capacity(squares.len());
        for (i, q) in squares.iter().enumerate() {
            if !q.is_positive() {
                return Err(DomainError::NonPositiveRadius {
                    index: i,
                    value: q.to_string(),
                });
            }
            let f = q.to_f64().unwrap_or(f64::NAN);
            if !(f.is_finite() && f > 0.0) {
                return Err(DomainError::NonPositiveRadius {
                    index: i,
                    value: q.to_string(),
                });
            }
            values.push(f.sqrt());
        }
        Ok(Radii {
            values,
            squares_exact: squares.iter().cloned().map(Some).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Semiaxis r_j, zero-based index.
    pub fn value(&self, j: usize) -> f64 {
        self.values[j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// r_j^2 as a float.
    pub fn square(&self, j: usize) -> f64 {
        match &self.squares_exact[j] {
            Some(q) => q.to_f64().unwrap(),
            None => self.values[j] * self.values[j],
        }
    }

    /// Exact r_j^2 if this entry carries one.
    pub fn square_exact(&self, j: usize) -> Option<&BigRational> {
        self.squares_exact[j].as_ref()
    }

    /// True when every entry has an exact rational square.
    pub fn is_exact(&self) -> bool {
        self.squares_exact.iter().all(|q| q.is_some())
    }

    /// Scale every semiaxis by `lambda` (squares scale by `lambda^2`).
    pub fn scaled(&self, lambda: f64) -> Result<Self, DomainError> {
        let scaled: Vec<f64> = self.values.iter().map(|v| v * lambda).collect();
        Radii::new(&scaled)
    }

    /// Scale exactly: r_j^2 -> lambda2 * r_j^2 with rational lambda2.
    pub fn scaled_exact(&self, lambda2: &BigRational) -> Result<Self, DomainError> {
        let squares: Option<Vec<BigRational>> = self
            .squares_exact
            .iter()
            .map(|q| q.as_ref().map(|q| q * lambda2))
            .collect();
        match squares {
            Some(sq) => Radii::from_exact_squares(&sq),
            None => self.scaled(lambda2.to_f64().unwrap().sqrt()),
        }
    }
}

/// The involution P = diag(-I_{n-kappa}, I_kappa, -I_{n-kappa}, I_kappa).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PSymmetry {
    n: usize,
    kappa: usize,
}

impl PSymmetry {
    /// `kappa = n` is admitted at the type level (Theorem-level relation
    /// statements allow it); operations that need `kappa < n` reject it.
    pub fn new(n: usize, kappa: usize) -> Result<Self, DomainError> {
        if n == 0 || kappa > n {
            return Err(DomainError::KappaOutOfRange { kappa, n });
        }
        Ok(PSymmetry { n, kappa })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    /// Number of axes in the first (negated, odd-multiplier) group.
    pub fn first_group(&self) -> usize {
        self.n - self.kappa
    }

    /// Sign of P on ambient coordinate `i` in 0..2n.
    /// Coordinates 0..n-kappa and n..2n-kappa are negated.
    pub fn sign(&self, i: usize) -> f64 {
        debug_assert!(i < 2 * self.n);
        let pos = i % self.n;
        if pos < self.n - self.kappa {
            -1.0
        } else {
            1.0
        }
    }

    /// Apply P to a 2n-vector.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>, DomainError> {
        if v.len() != 2 * self.n {
            return Err(DomainError::DimensionMismatch {
                expected: 2 * self.n,
                actual: v.len(),
            });
        }
        Ok(v.iter()
            .enumerate()
            .map(|(i, &x)| self.sign(i) * x)
            .collect())
    }

    /// The induced 2n x 2n diagonal matrix as a dense vector of diagonal
    /// entries.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..2 * self.n).map(|i| self.sign(i)).collect()
    }

    /// dim ker(P + I) = 2(n - kappa).
    pub fn dim_negated(&self) -> usize {
        2 * (self.n - self.kappa)
    }

    /// dim ker(P - I) = 2 kappa.
    pub fn dim_fixed(&self) -> usize {
        2 * self.kappa
    }
}

/// Parity class of an ellipsoid spectrum generator: odd multipliers for axes
/// in the first group, even multipliers for the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Odd,
    Even,
}

/// Which polydisc generator family a term belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolydiscGroup {
    /// Odd multiples of pi * r-hat^2 (minimum over the first axis group).
    Hat,
    /// Even multiples of pi * r'^2 (minimum over the second axis group).
    Prime,
}

/// Tagged origin of a spectrum value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Provenance {
    /// m * pi * r_j^2 from axis `axis` (1-based) of an ellipsoid.
    EllipsoidTerm {
        m: u64,
        axis: usize,
        parity: Parity,
    },
    /// Polydisc term: odd multiple of pi r-hat^2 or even multiple of pi r'^2.
    PolydiscTerm { m: u64, group: PolydiscGroup },
    /// 2n cos(theta_{k,n}) from the bidisk cosine family.
    BidiskCos { n: u64, k: u64 },
    /// 2 n pi from the bidisk round family.
    BidiskRound { n: u64 },
}

impl Provenance {
    /// Human-readable exact expression, e.g. `3*pi*r1^2`.
    pub fn exact_expr(&self) -> String {
        match self {
            Provenance::EllipsoidTerm { m, axis, .. } => format!("{m}*pi*r{axis}^2"),
            Provenance::PolydiscTerm { m, group } => match group {
                PolydiscGroup::Hat => format!("{m}*pi*rhat^2"),
                PolydiscGroup::Prime => format!("{m}*pi*rprime^2"),
            },
            Provenance::BidiskCos { n, k } => {
                if n % 2 == 1 {
                    format!("2*{n}*cos({}*pi/{})", 2 * k - 1, 2 * n)
                } else {
                    format!("2*{n}*cos({k}*pi/{n})")
                }
            }
            Provenance::BidiskRound { n } => format!("2*{n}*pi"),
        }
    }

    /// Re-evaluate the numeric value this provenance describes.
    /// `radii` supplies r_j^2 for ellipsoid terms; polydisc terms need the
    /// (rhat^2, rprime^2) pair.
    pub fn numeric(&self, radii: Option<&Radii>, hat_prime: Option<(f64, f64)>) -> Option<f64> {
        match self {
            Provenance::EllipsoidTerm { m, axis, .. } => {
                radii.map(|r| *m as f64 * PI * r.square(axis - 1))
            }
            Provenance::PolydiscTerm { m, group } => hat_prime.map(|(hat2, prime2)| match group {
                PolydiscGroup::Hat => *m as f64 * PI * hat2,
                PolydiscGroup::Prime => *m as f64 * PI * prime2,
            }),
            Provenance::BidiskCos { n, k } => {
                let nn = *n as f64;
                let theta = if n % 2 == 1 {
                    (2 * k - 1) as f64 * PI / (2.0 * nn)
                } else {
                    *k as f64 * PI / nn
                };
                Some(2.0 * nn * theta.cos())
            }
            Provenance::BidiskRound { n } => Some(2.0 * *n as f64 * PI),
        }
    }
}

/// One element of an action spectrum, with exact coefficient-of-pi key when
/// the source radii are exact, full provenance, and merged multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionValue {
    /// Action in absolute units (includes the pi factor where applicable).
    pub numeric: f64,
    /// Exact value as a rational multiple of pi, when available.
    /// (Bidisk cosine values are irrational and never carry this.)
    pub pi_coefficient: Option<BigRational>,
    /// Every generator term merged into this value.
    pub provenance: Vec<Provenance>,
    pub multiplicity: usize,
}

impl ActionValue {
    pub fn single(numeric: f64, pi_coefficient: Option<BigRational>, p: Provenance) -> Self {
        ActionValue {
            numeric,
            pi_coefficient,
            provenance: vec![p],
            multiplicity: 1,
        }
    }

    /// Exact integer coefficient of pi, if the value is an integer multiple.
    pub fn integer_pi_multiple(&self) -> Option<BigInt> {
        self.pi_coefficient.as_ref().and_then(|q| {
            if q.denom() == &BigInt::from(1) {
                Some(q.numer().clone())
            } else {
                None
            }
        })
    }
}

/// Rational from a non-negative integer, convenience for spectrum code.
pub fn big_ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parse a decimal string like "1.5" or "3/2" into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let num: BigInt = a.trim().parse().ok()?;
        let den: BigInt = b.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let digits = format!("{int_part}{frac_part}");
        let num: BigInt = digits.parse().ok()?;
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        return Some(BigRational::new(num, den));
    }
    let num: BigInt = s.parse().ok()?;
    Some(BigRational::from(num))
}

/// Exact square of a parsed radius: r^2 from the rational r.
pub fn rational_square(r: &BigRational) -> BigRational {
    r * r
}

#[allow(unused)]
fn _from_u64(m: u64) -> BigRational {
    BigRational::from_u64(m).unwrap()
}
