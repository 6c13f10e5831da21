//! Capacity values c_P^j for ellipsoids, polydiscs, and balls, the relations
//! between c_P^1, c_EH^1, and c_EHZ^P, and the monotonicity-based embedding
//! obstruction check.

use crate::domain::{ActionValue, Parity, Provenance, PSymmetry, Radii, DEFAULT_REL_TOL};
use crate::spectrum::{self, ActionStream, SpectrumError};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CapacityError {
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error("the two domains carry different symmetries: (n={n_a}, kappa={k_a}) vs (n={n_b}, kappa={k_b})")]
    MixedSymmetry {
        n_a: usize,
        k_a: usize,
        n_b: usize,
        k_b: usize,
    },
    #[error("operation not defined for this domain kind: {0}")]
    UnsupportedKind(String),
}

/// A domain whose capacity sequence is computable in closed form.
#[derive(Debug, Clone)]
pub enum DomainSpec {
    Ellipsoid { radii: Radii, sym: PSymmetry },
    Polydisc { radii: Radii, sym: PSymmetry },
    Ball { sym: PSymmetry, radius: f64 },
    /// The Lagrangian bidisk; fixed to n = 2, handled by the bidisk module.
    LagrangianBidisk,
}

impl DomainSpec {
    pub fn symmetry(&self) -> Option<PSymmetry> {
        match self {
            DomainSpec::Ellipsoid { sym, .. }
            | DomainSpec::Polydisc { sym, .. }
            | DomainSpec::Ball { sym, .. } => Some(*sym),
            DomainSpec::LagrangianBidisk => None,
        }
    }

    /// Capacity sequence stream, where one exists in closed form.
    pub fn capacity_stream(&self) -> Result<ActionStream, CapacityError> {
        match self {
            DomainSpec::Ellipsoid { radii, sym } => {
                Ok(spectrum::sigma_p_stream(radii, sym)?)
            }
            DomainSpec::Polydisc { radii, sym } => {
                Ok(spectrum::sigma_p_prime_stream(radii, sym)?)
            }
            DomainSpec::Ball { sym, radius } => {
                let radii = Radii::new(&vec![*radius; sym.n()])
                    .expect("ball radius validated on construction");
                Ok(spectrum::sigma_p_stream(&radii, sym)?)
            }
            DomainSpec::LagrangianBidisk => Err(CapacityError::UnsupportedKind(
                "LagrangianBidisk has no closed-form capacity sequence".into(),
            )),
        }
    }
}

/// c_P^j(E(r)) = d_j(sigma_P(r)).
pub fn capacity_ellipsoid(
    r: &Radii,
    sym: &PSymmetry,
    j: usize,
) -> Result<ActionValue, CapacityError> {
    let s = spectrum::sigma_p_stream(r, sym)?;
    Ok(s.nth(j))
}

/// c_P^j(D(r)) = d_j(sigma'_P(r)).
///
/// With kappa = 0 the even family of sigma'_P is empty; the returned stream
/// value comes from the flagged odd-family extrapolation.
pub fn capacity_polydisc(
    r: &Radii,
    sym: &PSymmetry,
    j: usize,
) -> Result<ActionValue, CapacityError> {
    let s = spectrum::sigma_p_prime_stream(r, sym)?;
    Ok(s.nth(j))
}

/// c_P^j(B^{2n}(R)) from the closed piecewise table, scaled by R^2.
///
/// In one period of length 2n in j the value steps pi, 2pi, 3pi, 4pi over the
/// blocks (n-kappa, kappa, n-kappa, kappa); each further period adds 4pi.
pub fn capacity_ball(sym: &PSymmetry, radius: f64, j: usize) -> ActionValue {
    assert!(j >= 1);
    assert!(radius > 0.0 && radius.is_finite());
    let n = sym.n();
    let kappa = sym.kappa();
    let period = (j - 1) / (2 * n);
    let pos = (j - 1) % (2 * n) + 1;
    let base = if pos <= n - kappa {
        1
    } else if pos <= n {
        2
    } else if pos <= 2 * n - kappa {
        3
    } else {
        4
    };
    let multiple = (base + 4 * period) as u64;
    // Table axis bookkeeping: which axis the j-th value sits on is not part
    // of the closed form; record multiplier and parity only.
    let parity = if multiple % 2 == 1 {
        Parity::Odd
    } else {
        Parity::Even
    };
    let axis = if pos <= n - kappa || (pos > n && pos <= 2 * n - kappa) {
        1
    } else {
        n - kappa + 1
    };
    // The f64 square is itself an exact rational; the table value is the
    // integer multiple times it.
    let square = BigRational::from_float(radius * radius);
    ActionValue::single(
        multiple as f64 * PI * radius * radius,
        square.map(|s| BigRational::from(BigInt::from(multiple)) * s),
        Provenance::EllipsoidTerm {
            m: multiple,
            axis,
            parity,
        },
    )
}

/// The relations of c_P^1 to c_EH^1 and c_EHZ^P on a convex domain.
#[derive(Debug, Clone, Serialize)]
pub struct RelatedCapacities {
    pub c_p_1: f64,
    /// Equal to c_P^1 when kappa = 0.
    pub c_eh_1: Option<f64>,
    /// c_P^1 / 2 when 1 <= kappa < n; derived by relation, not independently
    /// computed.
    pub c_ehz_p: Option<f64>,
    pub derived_by_relation: bool,
}

pub fn related_capacities(d: &DomainSpec) -> Result<RelatedCapacities, CapacityError> {
    let sym = d.symmetry().ok_or_else(|| {
        CapacityError::UnsupportedKind("c_P^1 of the bidisk is only bracketed".into())
    })?;
    if matches!(d, DomainSpec::LagrangianBidisk) {
        return Err(CapacityError::UnsupportedKind(
            "c_P^1 of the bidisk is only bracketed".into(),
        ));
    }
    let c1 = d.capacity_stream()?.nth(1).numeric;
    if sym.kappa() == 0 {
        Ok(RelatedCapacities {
            c_p_1: c1,
            c_eh_1: Some(c1),
            c_ehz_p: None,
            derived_by_relation: true,
        })
    } else {
        Ok(RelatedCapacities {
            c_p_1: c1,
            c_eh_1: None,
            c_ehz_p: Some(c1 / 2.0),
            derived_by_relation: true,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ObstructionStatus {
    Obstructed,
    /// Prefixes agree up to the checked depth; equality of all prefixes is
    /// only evidence, never a proof of embeddability.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstructionVerdict {
    pub status: ObstructionStatus,
    /// First index j with c_P^j(a) > c_P^j(b), with the two values.
    pub witness: Option<(usize, f64, f64)>,
    pub checked_up_to: usize,
}

/// Monotonicity obstruction: if c_P^j(a) > c_P^j(b) for some j <= depth there
/// is no P-equivariant symplectomorphism taking a into b.
pub fn embedding_obstruction(
    a: &DomainSpec,
    b: &DomainSpec,
    depth: usize,
) -> Result<ObstructionVerdict, CapacityError> {
    embedding_obstruction_tol(a, b, depth, DEFAULT_REL_TOL)
}

pub fn embedding_obstruction_tol(
    a: &DomainSpec,
    b: &DomainSpec,
    depth: usize,
    tol: f64,
) -> Result<ObstructionVerdict, CapacityError> {
    let sa = a.symmetry().ok_or_else(|| {
        CapacityError::UnsupportedKind("bidisk has no computable capacity sequence".into())
    })?;
    let sb = b.symmetry().ok_or_else(|| {
        CapacityError::UnsupportedKind("bidisk has no computable capacity sequence".into())
    })?;
    if sa != sb {
        return Err(CapacityError::MixedSymmetry {
            n_a: sa.n(),
            k_a: sa.kappa(),
            n_b: sb.n(),
            k_b: sb.kappa(),
        });
    }
    let stream_a = a.capacity_stream()?;
    let stream_b = b.capacity_stream()?;
    for j in 1..=depth {
        let va = stream_a.nth(j);
        let vb = stream_b.nth(j);
        let exceeds = match (&va.pi_coefficient, &vb.pi_coefficient) {
            (Some(qa), Some(qb)) => qa > qb,
            _ => va.numeric > vb.numeric * (1.0 + tol) + tol,
        };
        if exceeds {
            return Ok(ObstructionVerdict {
                status: ObstructionStatus::Obstructed,
                witness: Some((j, va.numeric, vb.numeric)),
                checked_up_to: depth,
            });
        }
    }
    Ok(ObstructionVerdict {
        status: ObstructionStatus::Inconclusive,
        witness: None,
        checked_up_to: depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{approx_eq_rel, big_ratio};

    fn exact_radii(squares: &[(i64, i64)]) -> Radii {
        let sq: Vec<BigRational> = squares.iter().map(|&(n, d)| big_ratio(n, d)).collect();
        Radii::from_exact_squares(&sq).unwrap()
    }

    #[test]
    fn ellipsoid_examples() {
        let sym = PSymmetry::new(2, 1).unwrap();
        let r11 = exact_radii(&[(1, 1), (1, 1)]);
        let v = capacity_ellipsoid(&r11, &sym, 2).unwrap();
        assert!(approx_eq_rel(v.numeric, 2.0 * PI, 1e-12));

        // r = (3, 1), kappa = 1: c_P^1 = pi * min(9, 2) = 2 pi.
        let r31 = exact_radii(&[(9, 1), (1, 1)]);
        let v1 = capacity_ellipsoid(&r31, &sym, 1).unwrap();
        assert!(approx_eq_rel(v1.numeric, 2.0 * PI, 1e-12));

        let sym0 = PSymmetry::new(2, 0).unwrap();
        let r12 = exact_radii(&[(1, 1), (4, 1)]);
        let v3 = capacity_ellipsoid(&r12, &sym0, 3).unwrap();
        assert!(approx_eq_rel(v3.numeric, 4.0 * PI, 1e-12));
    }

    #[test]
    fn polydisc_examples() {
        let sym = PSymmetry::new(2, 1).unwrap();
        let r21 = exact_radii(&[(4, 1), (1, 1)]);
        assert!(approx_eq_rel(
            capacity_polydisc(&r21, &sym, 1).unwrap().numeric,
            2.0 * PI,
            1e-12
        ));
        let r11 = exact_radii(&[(1, 1), (1, 1)]);
        assert!(approx_eq_rel(
            capacity_polydisc(&r11, &sym, 4).unwrap().numeric,
            4.0 * PI,
            1e-12
        ));
    }

    #[test]
    fn polydisc_j1_equals_ellipsoid_j1() {
        let cases = [
            (vec![(4i64, 1i64), (1, 1)], 1usize),
            (vec![(3, 2), (5, 3), (7, 4)], 2),
            (vec![(1, 1), (1, 3), (8, 3)], 1),
        ];
        for (squares, kappa) in cases {
            let r = exact_radii(&squares);
            let sym = PSymmetry::new(squares.len(), kappa).unwrap();
            let e = capacity_ellipsoid(&r, &sym, 1).unwrap();
            let d = capacity_polydisc(&r, &sym, 1).unwrap();
            assert_eq!(e.pi_coefficient, d.pi_coefficient);
        }
    }

    #[test]
    fn ball_examples() {
        let sym = PSymmetry::new(2, 1).unwrap();
        assert!(approx_eq_rel(capacity_ball(&sym, 1.0, 2).numeric, 2.0 * PI, 1e-12));
        assert!(approx_eq_rel(capacity_ball(&sym, 2.0, 2).numeric, 8.0 * PI, 1e-12));
        let sym31 = PSymmetry::new(3, 1).unwrap();
        assert!(approx_eq_rel(capacity_ball(&sym31, 1.0, 5).numeric, 3.0 * PI, 1e-12));
    }

    #[test]
    fn ball_table_matches_stream() {
        for n in 1..=4 {
            for kappa in 0..n {
                let sym = PSymmetry::new(n, kappa).unwrap();
                let ones = exact_radii(&vec![(1, 1); n]);
                let s = spectrum::sigma_p_stream(&ones, &sym).unwrap();
                for j in 1..=6 * n {
                    let table = capacity_ball(&sym, 1.0, j);
                    let stream = s.nth(j);
                    assert!(
                        approx_eq_rel(table.numeric, stream.numeric, 1e-12),
                        "n={n} kappa={kappa} j={j}: {} vs {}",
                        table.numeric,
                        stream.numeric
                    );
                }
            }
        }
    }

    #[test]
    fn relations() {
        let sym0 = PSymmetry::new(2, 0).unwrap();
        let e = DomainSpec::Ellipsoid {
            radii: exact_radii(&[(1, 1), (4, 1)]),
            sym: sym0,
        };
        let rel = related_capacities(&e).unwrap();
        assert!(approx_eq_rel(rel.c_p_1, PI, 1e-12));
        assert_eq!(rel.c_eh_1, Some(rel.c_p_1));
        assert!(rel.c_ehz_p.is_none());

        let sym1 = PSymmetry::new(2, 1).unwrap();
        let e31 = DomainSpec::Ellipsoid {
            radii: exact_radii(&[(9, 1), (1, 1)]),
            sym: sym1,
        };
        let rel31 = related_capacities(&e31).unwrap();
        assert!(approx_eq_rel(rel31.c_p_1, 2.0 * PI, 1e-12));
        assert!(approx_eq_rel(rel31.c_ehz_p.unwrap(), PI, 1e-12));

        let ball = DomainSpec::Ball { sym: sym1, radius: 1.0 };
        let relb = related_capacities(&ball).unwrap();
        assert!(approx_eq_rel(relb.c_p_1, PI, 1e-12));
        assert!(approx_eq_rel(relb.c_ehz_p.unwrap(), PI / 2.0, 1e-12));

        assert!(matches!(
            related_capacities(&DomainSpec::LagrangianBidisk),
            Err(CapacityError::UnsupportedKind(_))
        ));
    }

    #[test]
    fn obstruction_swapped_axes() {
        let sym = PSymmetry::new(2, 1).unwrap();
        let a = DomainSpec::Ellipsoid {
            radii: exact_radii(&[(1, 1), (4, 1)]),
            sym,
        };
        let b = DomainSpec::Ellipsoid {
            radii: exact_radii(&[(4, 1), (1, 1)]),
            sym,
        };
        let v = embedding_obstruction(&a, &b, 5).unwrap();
        assert_eq!(v.status, ObstructionStatus::Obstructed);
        let (j, va, vb) = v.witness.unwrap();
        assert_eq!(j, 3);
        assert!(approx_eq_rel(va, 5.0 * PI, 1e-12));
        assert!(approx_eq_rel(vb, 4.0 * PI, 1e-12));

        let back = embedding_obstruction(&b, &a, 1).unwrap();
        assert_eq!(back.status, ObstructionStatus::Obstructed);
        let (j, va, vb) = back.witness.unwrap();
        assert_eq!(j, 1);
        assert!(approx_eq_rel(va, 2.0 * PI, 1e-12));
        assert!(approx_eq_rel(vb, PI, 1e-12));
    }

    #[test]
    fn obstruction_reflexive_is_inconclusive() {
        let sym = PSymmetry::new(2, 1).unwrap();
        let a = DomainSpec::Ellipsoid {
            radii: exact_radii(&[(1, 1), (4, 1)]),
            sym,
        };
        let v = embedding_obstruction(&a, &a.clone(), 16).unwrap();
        assert_eq!(v.status, ObstructionStatus::Inconclusive);
        assert_eq!(v.checked_up_to, 16);
    }

    #[test]
    fn obstruction_subset_never_obstructed() {
        // a componentwise smaller than b with matching groups.
        let sym = PSymmetry::new(3, 1).unwrap();
        let a = DomainSpec::Ellipsoid {
            radii: exact_radii(&[(1, 1), (2, 1), (1, 2)]),
            sym,
        };
        let b = DomainSpec::Ellipsoid {
            radii: exact_radii(&[(2, 1), (3, 1), (2, 2)]),
            sym,
        };
        let v = embedding_obstruction(&a, &b, 48).unwrap();
        assert_eq!(v.status, ObstructionStatus::Inconclusive);
    }

    #[test]
    fn mixed_symmetry_rejected() {
        let a = DomainSpec::Ball {
            sym: PSymmetry::new(2, 1).unwrap(),
            radius: 1.0,
        };
        let b = DomainSpec::Ball {
            sym: PSymmetry::new(2, 0).unwrap(),
            radius: 1.0,
        };
        assert!(matches!(
            embedding_obstruction(&a, &b, 4),
            Err(CapacityError::MixedSymmetry { .. })
        ));
    }
}
