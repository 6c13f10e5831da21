//! Lazy enumeration of the action spectra sigma_P(r), sigma'_P(r), and the
//! classical Ekeland-Hofer spectrum of an ellipsoid.
//!
//! Each axis (or axis group, for polydiscs) contributes an arithmetic
//! progression of multiples of pi r^2; the stream is a k-way merge over
//! per-generator cursors keyed by exact rational coefficients of pi when the
//! radii are exact, and by floats with tolerance merging otherwise.

use crate::domain::{
    approx_eq_rel, ActionValue, Parity, PolydiscGroup, Provenance, PSymmetry, Radii,
    DEFAULT_REL_TOL,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpectrumError {
    #[error("sigma_P is undefined for kappa = n = {n}; the paper defines P with kappa < n")]
    KappaEqualsN { n: usize },
    #[error("radii length {radii_n} does not match symmetry dimension {sym_n}")]
    DimensionMismatch { radii_n: usize, sym_n: usize },
    #[error("two distinct exact values collide within tolerance {tol}; use exact radii")]
    AmbiguousInFloatMode { tol: f64 },
}

/// Generator family descriptor for one arithmetic progression.
#[derive(Debug, Clone)]
enum GenKind {
    Ellipsoid { axis: usize, parity: Parity },
    Polydisc { group: PolydiscGroup },
    Eh { axis: usize },
}

#[derive(Debug, Clone)]
struct Generator {
    kind: GenKind,
    /// Current multiplier of pi r^2.
    multiplier: u64,
    /// Multiplier stride: 2 for parity-filtered families, 1 for EH.
    step: u64,
    square: f64,
    square_exact: Option<BigRational>,
}

impl Generator {
    fn value(&self) -> f64 {
        self.multiplier as f64 * PI * self.square
    }

    fn key_exact(&self) -> Option<BigRational> {
        self.square_exact
            .as_ref()
            .map(|q| q * BigRational::from(BigInt::from(self.multiplier)))
    }

    fn provenance(&self) -> Provenance {
        match &self.kind {
            GenKind::Ellipsoid { axis, parity } => Provenance::EllipsoidTerm {
                m: self.multiplier,
                axis: *axis,
                parity: *parity,
            },
            GenKind::Polydisc { group } => Provenance::PolydiscTerm {
                m: self.multiplier,
                group: *group,
            },
            GenKind::Eh { axis } => Provenance::EllipsoidTerm {
                m: self.multiplier,
                axis: *axis,
                parity: if self.multiplier % 2 == 1 {
                    Parity::Odd
                } else {
                    Parity::Even
                },
            },
        }
    }

    fn advance(&mut self) {
        self.multiplier += self.step;
    }
}

/// Merge key: exact rational coefficient of pi, or the float value itself.
#[derive(Debug, Clone, PartialEq)]
enum Key {
    Exact(BigRational),
    Float(f64),
}

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Key::Exact(a), Key::Exact(b)) => a.cmp(b),
            (Key::Float(a), Key::Float(b)) => a.partial_cmp(b).expect("finite spectrum values"),
            // A stream never mixes key kinds.
            _ => unreachable!("mixed exact/float keys in one stream"),
        }
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct HeapEntry {
    key: Key,
    gen_index: usize,
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed for a min-heap on BinaryHeap.
        other
            .key
            .cmp(&self.key)
            .then_with(|| other.gen_index.cmp(&self.gen_index))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Nondecreasing stream of merged spectrum values with multiplicities.
///
/// Single-consumer stateful iterator; `Clone` snapshots the cursor state.
#[derive(Debug, Clone)]
pub struct ActionStream {
    generators: Vec<Generator>,
    heap: BinaryHeap<HeapEntry>,
    exact: bool,
    tol: f64,
    /// Set when sigma'_P was requested with kappa = 0: the even family is
    /// empty and only the odd family over r-hat is emitted.
    pub extrapolated_kappa0: bool,
}

impl ActionStream {
    fn from_generators(generators: Vec<Generator>, exact: bool, tol: f64) -> Self {
        let mut heap = BinaryHeap::with_capacity(generators.len());
        for (i, g) in generators.iter().enumerate() {
            heap.push(HeapEntry {
                key: key_of(g, exact),
                gen_index: i,
            });
        }
        ActionStream {
            generators,
            heap,
            exact,
            tol,
            extrapolated_kappa0: false,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// j-th element (1-based) of the multiplicity-expanded nondecreasing
    /// sequence; repeated values count once per multiplicity unit.
    /// Operates on a snapshot, leaving the stream untouched.
    pub fn nth(&self, j: usize) -> ActionValue {
        assert!(j >= 1, "spectrum indices are 1-based");
        let mut s = self.clone();
        let mut remaining = j;
        loop {
            let v = s.next().expect("spectrum streams are infinite");
            if v.multiplicity >= remaining {
                return v;
            }
            remaining -= v.multiplicity;
        }
    }

    /// First `count` merged values (not multiplicity-expanded).
    pub fn take_merged(&self, count: usize) -> Vec<ActionValue> {
        self.clone().take(count).collect()
    }

    /// Number of generator pairs (m, axis) mapping to `value`.
    ///
    /// Exact mode groups candidates by exact key and counts the group nearest
    /// to `value`; float mode counts within `tol` and errors if the count is
    /// unstable under tolerance halving.
    pub fn multiplicity_of(&self, value: f64, tol: f64) -> Result<usize, SpectrumError> {
        assert!(value > 0.0);
        let candidates = self.candidates_within(value, tol);
        if self.exact {
            // Group by exact key, keep the group closest to the query.
            let mut groups: Vec<(BigRational, usize, f64)> = Vec::new();
            for (g, key) in &candidates {
                let key = key.clone().expect("exact stream");
                let dist = (g.value() - value).abs();
                match groups.iter_mut().find(|(k, _, _)| k == &key) {
                    Some((_, count, best)) => {
                        *count += 1;
                        if dist < *best {
                            *best = dist;
                        }
                    }
                    None => groups.push((key, 1, dist)),
                }
            }
            Ok(groups
                .into_iter()
                .min_by(|a, b| a.2.partial_cmp(&b.2).unwrap())
                .map(|(_, count, _)| count)
                .unwrap_or(0))
        } else {
            let half = self.candidates_within(value, tol / 2.0);
            if half.len() != candidates.len() {
                return Err(SpectrumError::AmbiguousInFloatMode { tol });
            }
            Ok(candidates.len())
        }
    }

    fn candidates_within(&self, value: f64, tol: f64) -> Vec<(Generator, Option<BigRational>)> {
        let mut out = Vec::new();
        for g in &self.generators {
            let base = PI * g.square;
            let raw = value / base;
            // Snap to the generator's residue class.
            let offset = g.multiplier % g.step.max(1);
            let step = g.step as f64;
            let first = if g.step == 1 {
                raw.round()
            } else {
                // Nearest m with m mod step == offset.
                let k = ((raw - offset as f64) / step).round();
                k * step + offset as f64
            };
            if first < 1.0 {
                continue;
            }
            let m = first as u64;
            let v = m as f64 * base;
            if approx_eq_rel(v, value, tol) {
                let mut cand = g.clone();
                cand.multiplier = m;
                let key = cand.key_exact();
                out.push((cand, key));
            }
        }
        out
    }
}

fn key_of(g: &Generator, exact: bool) -> Key {
    if exact {
        Key::Exact(g.key_exact().expect("exact stream requires exact squares"))
    } else {
        Key::Float(g.value())
    }
}

impl Iterator for ActionStream {
    type Item = ActionValue;

    fn next(&mut self) -> Option<ActionValue> {
        let head = self.heap.pop()?;
        let g = &self.generators[head.gen_index];
        let mut value = ActionValue {
            numeric: g.value(),
            pi_coefficient: if self.exact { g.key_exact() } else { None },
            provenance: vec![g.provenance()],
            multiplicity: 1,
        };
        self.advance_generator(head.gen_index);

        // Merge every cursor with an equal head.
        loop {
            let equal = match self.heap.peek() {
                None => false,
                Some(entry) => match (&entry.key, &head.key) {
                    (Key::Exact(a), Key::Exact(b)) => a == b,
                    (Key::Float(a), Key::Float(b)) => approx_eq_rel(*a, *b, self.tol),
                    _ => false,
                },
            };
            if !equal {
                break;
            }
            let entry = self.heap.pop().unwrap();
            let g = &self.generators[entry.gen_index];
            value.provenance.push(g.provenance());
            value.multiplicity += 1;
            self.advance_generator(entry.gen_index);
        }
        Some(value)
    }
}

impl ActionStream {
    fn advance_generator(&mut self, i: usize) {
        self.generators[i].advance();
        let key = key_of(&self.generators[i], self.exact);
        self.heap.push(HeapEntry { key, gen_index: i });
    }
}

fn check_dims(r: &Radii, sym: &PSymmetry) -> Result<(), SpectrumError> {
    if r.n() != sym.n() {
        return Err(SpectrumError::DimensionMismatch {
            radii_n: r.n(),
            sym_n: sym.n(),
        });
    }
    Ok(())
}

/// sigma_P(r): odd multiples of pi r_j^2 for j <= n - kappa, even multiples
/// for j > n - kappa, merged nondecreasingly.
pub fn sigma_p_stream(r: &Radii, sym: &PSymmetry) -> Result<ActionStream, SpectrumError> {
    sigma_p_stream_tol(r, sym, DEFAULT_REL_TOL)
}

pub fn sigma_p_stream_tol(
    r: &Radii,
    sym: &PSymmetry,
    tol: f64,
) -> Result<ActionStream, SpectrumError> {
    check_dims(r, sym)?;
    if sym.kappa() == sym.n() {
        return Err(SpectrumError::KappaEqualsN { n: sym.n() });
    }
    let exact = r.is_exact();
    let mut gens = Vec::with_capacity(r.n());
    for j in 0..r.n() {
        let parity = if j < sym.first_group() {
            Parity::Odd
        } else {
            Parity::Even
        };
        gens.push(Generator {
            kind: GenKind::Ellipsoid {
                axis: j + 1,
                parity,
            },
            multiplier: match parity {
                Parity::Odd => 1,
                Parity::Even => 2,
            },
            step: 2,
            square: r.square(j),
            square_exact: r.square_exact(j).cloned(),
        });
    }
    Ok(ActionStream::from_generators(gens, exact, tol))
}

/// Minimum of r_j over an axis range, preferring exact comparison.
fn group_min(r: &Radii, range: std::ops::Range<usize>) -> (f64, Option<BigRational>, usize) {
    let mut best = range.start;
    for j in range.clone().skip(1) {
        let smaller = match (r.square_exact(j), r.square_exact(best)) {
            (Some(a), Some(b)) => a < b,
            _ => r.square(j) < r.square(best),
        };
        if smaller {
            best = j;
        }
    }
    (r.square(best), r.square_exact(best).cloned(), best)
}

/// sigma'_P(r): odd multiples of pi rhat^2 merged with even multiples of
/// pi r'^2.  With kappa = 0 the second family is empty and the stream is
/// flagged `extrapolated_kappa0`.
pub fn sigma_p_prime_stream(r: &Radii, sym: &PSymmetry) -> Result<ActionStream, SpectrumError> {
    sigma_p_prime_stream_tol(r, sym, DEFAULT_REL_TOL)
}

pub fn sigma_p_prime_stream_tol(
    r: &Radii,
    sym: &PSymmetry,
    tol: f64,
) -> Result<ActionStream, SpectrumError> {
    check_dims(r, sym)?;
    if sym.kappa() == sym.n() {
        return Err(SpectrumError::KappaEqualsN { n: sym.n() });
    }
    let exact = r.is_exact();
    let (hat2, hat2_exact, _) = group_min(r, 0..sym.first_group());
    let mut gens = vec![Generator {
        kind: GenKind::Polydisc {
            group: PolydiscGroup::Hat,
        },
        multiplier: 1,
        step: 2,
        square: hat2,
        square_exact: hat2_exact,
    }];
    let kappa0 = sym.kappa() == 0;
    if !kappa0 {
        let (prime2, prime2_exact, _) = group_min(r, sym.first_group()..r.n());
        gens.push(Generator {
            kind: GenKind::Polydisc {
                group: PolydiscGroup::Prime,
            },
            multiplier: 2,
            step: 2,
            square: prime2,
            square_exact: prime2_exact,
        });
    }
    let mut s = ActionStream::from_generators(gens, exact, tol);
    s.extrapolated_kappa0 = kappa0;
    Ok(s)
}

/// Classical Ekeland-Hofer spectrum of E(r): all positive multiples of
/// pi r_j^2 over every axis.
pub fn eh_stream(r: &Radii) -> ActionStream {
    eh_stream_tol(r, DEFAULT_REL_TOL)
}

pub fn eh_stream_tol(r: &Radii, tol: f64) -> ActionStream {
    let exact = r.is_exact();
    let gens = (0..r.n())
        .map(|j| Generator {
            kind: GenKind::Eh { axis: j + 1 },
            multiplier: 1,
            step: 1,
            square: r.square(j),
            square_exact: r.square_exact(j).cloned(),
        })
        .collect();
    ActionStream::from_generators(gens, exact, tol)
}

/// The hat/prime squared minima used by polydisc provenance re-evaluation.
pub fn hat_prime_squares(r: &Radii, sym: &PSymmetry) -> (f64, Option<f64>) {
    let (hat2, _, _) = group_min(r, 0..sym.first_group());
    if sym.kappa() == 0 {
        (hat2, None)
    } else {
        let (prime2, _, _) = group_min(r, sym.first_group()..r.n());
        (hat2, Some(prime2))
    }
}

/// Exact coefficient-of-pi of the j-th value, helper for tests and capacities.
pub fn nth_pi_coefficient(s: &ActionStream, j: usize) -> Option<BigRational> {
    s.nth(j).pi_coefficient
}

/// Float value of an exact coefficient times pi.
pub fn pi_times(q: &BigRational) -> f64 {
    q.to_f64().unwrap() * PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::big_ratio;
    use proptest::prelude::*;

    fn radii(vals: &[f64]) -> Radii {
        Radii::new(vals).unwrap()
    }

    fn exact_radii(squares: &[(i64, i64)]) -> Radii {
        let sq: Vec<BigRational> = squares.iter().map(|&(n, d)| big_ratio(n, d)).collect();
        Radii::from_exact_squares(&sq).unwrap()
    }

    fn first_values(s: &ActionStream, count: usize) -> Vec<f64> {
        (1..=count).map(|j| s.nth(j).numeric).collect()
    }

    #[test]
    fn ball_kappa1_stream() {
        let r = radii(&[1.0, 1.0]);
        let sym = PSymmetry::new(2, 1).unwrap();
        let s = sigma_p_stream(&r, &sym).unwrap();
        let vals = first_values(&s, 4);
        for (v, expect) in vals.iter().zip([PI, 2.0 * PI, 3.0 * PI, 4.0 * PI]) {
            assert!(approx_eq_rel(*v, expect, 1e-12), "{v} vs {expect}");
        }
    }

    #[test]
    fn sigma_p_12_kappa0() {
        // r = (1, 2), kappa = 0: {m pi, 4 m pi : m odd} sorted.
        let r = exact_radii(&[(1, 1), (4, 1)]);
        let sym = PSymmetry::new(2, 0).unwrap();
        let s = sigma_p_stream(&r, &sym).unwrap();
        let vals = first_values(&s, 8);
        let expect = [1.0, 3.0, 4.0, 5.0, 7.0, 9.0, 11.0, 12.0].map(|m| m * PI);
        for (v, e) in vals.iter().zip(expect) {
            assert!(approx_eq_rel(*v, e, 1e-12), "{v} vs {e}");
        }
    }

    #[test]
    fn ball3_kappa1_multiplicities() {
        let r = exact_radii(&[(1, 1), (1, 1), (1, 1)]);
        let sym = PSymmetry::new(3, 1).unwrap();
        let mut s = sigma_p_stream(&r, &sym).unwrap();
        let a = s.next().unwrap();
        assert!(approx_eq_rel(a.numeric, PI, 1e-12));
        assert_eq!(a.multiplicity, 2);
        let b = s.next().unwrap();
        assert!(approx_eq_rel(b.numeric, 2.0 * PI, 1e-12));
        assert_eq!(b.multiplicity, 1);
        let c = s.next().unwrap();
        assert!(approx_eq_rel(c.numeric, 3.0 * PI, 1e-12));
        assert_eq!(c.multiplicity, 2);
        let d = s.next().unwrap();
        assert!(approx_eq_rel(d.numeric, 4.0 * PI, 1e-12));
        assert_eq!(d.multiplicity, 1);
    }

    #[test]
    fn sigma_prime_21_kappa1() {
        let r = exact_radii(&[(4, 1), (1, 1)]);
        let sym = PSymmetry::new(2, 1).unwrap();
        let mut s = sigma_p_prime_stream(&r, &sym).unwrap();
        let a = s.next().unwrap();
        assert!(approx_eq_rel(a.numeric, 2.0 * PI, 1e-12));
        let b = s.next().unwrap();
        assert!(approx_eq_rel(b.numeric, 4.0 * PI, 1e-12));
        assert_eq!(b.multiplicity, 2, "4pi comes from both families");
        let c = s.next().unwrap();
        assert!(approx_eq_rel(c.numeric, 6.0 * PI, 1e-12));
    }

    #[test]
    fn sigma_prime_min_formula() {
        // first(sigma'_P(r)) = pi * min(rhat^2, 2 r'^2).
        let cases = [
            (vec![(4i64, 1i64), (1, 1)], 1usize),
            (vec![(1, 1), (9, 1), (1, 4)], 1),
            (vec![(3, 2), (5, 3), (7, 4)], 2),
        ];
        for (squares, kappa) in cases {
            let r = exact_radii(&squares);
            let sym = PSymmetry::new(squares.len(), kappa).unwrap();
            let s = sigma_p_prime_stream(&r, &sym).unwrap();
            let (hat2, prime2) = hat_prime_squares(&r, &sym);
            let expect = PI * hat2.min(2.0 * prime2.unwrap());
            assert!(approx_eq_rel(s.nth(1).numeric, expect, 1e-12));
        }
    }

    #[test]
    fn eh_stream_12() {
        let r = exact_radii(&[(1, 1), (4, 1)]);
        let s = eh_stream(&r);
        let vals = first_values(&s, 6);
        let expect = [1.0, 2.0, 3.0, 4.0, 4.0, 5.0].map(|m| m * PI);
        for (v, e) in vals.iter().zip(expect) {
            assert!(approx_eq_rel(*v, e, 1e-12), "{v} vs {e}");
        }
        // All-equal radii: first value has multiplicity n.
        let ball = exact_radii(&[(1, 1), (1, 1), (1, 1)]);
        let first = eh_stream(&ball).clone().next().unwrap();
        assert_eq!(first.multiplicity, 3);
    }

    #[test]
    fn nth_expands_multiplicity() {
        let r = exact_radii(&[(1, 1), (1, 1)]);
        let sym0 = PSymmetry::new(2, 0).unwrap();
        let s = sigma_p_stream(&r, &sym0).unwrap();
        assert!(approx_eq_rel(s.nth(2).numeric, PI, 1e-12));
        let sym1 = PSymmetry::new(2, 1).unwrap();
        let s1 = sigma_p_stream(&r, &sym1).unwrap();
        assert!(approx_eq_rel(s1.nth(3).numeric, 3.0 * PI, 1e-12));
    }

    #[test]
    fn multiplicity_queries() {
        let r = exact_radii(&[(1, 1), (1, 1)]);
        let sym = PSymmetry::new(2, 0).unwrap();
        let s = sigma_p_stream(&r, &sym).unwrap();
        assert_eq!(s.multiplicity_of(PI, 1e-12).unwrap(), 2);
        assert_eq!(s.multiplicity_of(2.0 * PI, 1e-12).unwrap(), 0);

        let r12 = exact_radii(&[(1, 1), (4, 1)]);
        let s12 = sigma_p_stream(&r12, &sym).unwrap();
        assert_eq!(s12.multiplicity_of(4.0 * PI, 1e-12).unwrap(), 1);
    }

    #[test]
    fn ambiguous_in_float_mode() {
        // Two float generators separated by less than tol but more than tol/2.
        let r = Radii::new(&[1.0, (1.0 + 3e-13_f64).sqrt()]).unwrap();
        let sym = PSymmetry::new(2, 0).unwrap();
        let s = sigma_p_stream(&r, &sym).unwrap();
        let res = s.multiplicity_of(PI, 5e-13);
        assert!(matches!(res, Err(SpectrumError::AmbiguousInFloatMode { .. })));
    }

    #[test]
    fn kappa_n_rejected() {
        let r = radii(&[1.0, 2.0]);
        let sym = PSymmetry::new(2, 2).unwrap();
        assert!(matches!(
            sigma_p_stream(&r, &sym),
            Err(SpectrumError::KappaEqualsN { n: 2 })
        ));
        assert!(matches!(
            sigma_p_prime_stream(&r, &sym),
            Err(SpectrumError::KappaEqualsN { n: 2 })
        ));
    }

    #[test]
    fn kappa0_prime_stream_is_flagged() {
        let r = exact_radii(&[(1, 1), (4, 1)]);
        let sym = PSymmetry::new(2, 0).unwrap();
        let s = sigma_p_prime_stream(&r, &sym).unwrap();
        assert!(s.extrapolated_kappa0);
        let vals = first_values(&s, 3);
        let expect = [1.0, 3.0, 5.0].map(|m| m * PI);
        for (v, e) in vals.iter().zip(expect) {
            assert!(approx_eq_rel(*v, e, 1e-12));
        }
    }

    /// Brute-force oracle: enumerate m pi r_j^2 with the parity rule up to a
    /// bound, sort, return (value, count-at-value) pairs expanded.
    pub(crate) fn brute_force_sigma_p(r: &Radii, sym: &PSymmetry, bound_pi: f64) -> Vec<f64> {
        let mut all = Vec::new();
        for j in 0..r.n() {
            let sq = r.square(j);
            let (start, step) = if j < sym.first_group() { (1u64, 2) } else { (2, 2) };
            let mut m = start;
            while m as f64 * sq <= bound_pi + 1e-9 {
                all.push(m as f64 * sq * PI);
                m += step;
            }
        }
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        all
    }

    #[test]
    fn oracle_equivalence_small() {
        let r = exact_radii(&[(1, 1), (4, 1), (9, 4)]);
        let sym = PSymmetry::new(3, 1).unwrap();
        let brute = brute_force_sigma_p(&r, &sym, 30.0);
        let s = sigma_p_stream(&r, &sym).unwrap();
        for (j, expect) in brute.iter().enumerate() {
            let got = s.nth(j + 1).numeric;
            assert!(approx_eq_rel(got, *expect, 1e-12), "j={j}: {got} vs {expect}");
        }
    }

    proptest! {
        #[test]
        fn monotone_nondecreasing(
            squares in proptest::collection::vec((1i64..40, 1i64..10), 1..5),
            kappa_frac in 0usize..4,
        ) {
            let n = squares.len();
            let kappa = kappa_frac % n; // kappa < n
            let r = exact_radii(&squares);
            let sym = PSymmetry::new(n, kappa).unwrap();
            let s = sigma_p_stream(&r, &sym).unwrap();
            let mut prev = 0.0;
            for j in 1..=25 {
                let v = s.nth(j).numeric;
                prop_assert!(v >= prev - 1e-12);
                prev = v;
            }
        }

        #[test]
        fn conformality_exact(
            squares in proptest::collection::vec((1i64..20, 1i64..6), 1..4),
            lam in (1i64..9, 1i64..5),
        ) {
            let n = squares.len();
            let r = exact_radii(&squares);
            let sym = PSymmetry::new(n, n - 1).unwrap();
            let lambda2 = big_ratio(lam.0, lam.1);
            let scaled = r.scaled_exact(&lambda2).unwrap();
            let s = sigma_p_stream(&r, &sym).unwrap();
            let ss = sigma_p_stream(&scaled, &sym).unwrap();
            for j in 1..=15 {
                let a = s.nth(j);
                let b = ss.nth(j);
                prop_assert_eq!(
                    a.pi_coefficient.clone().unwrap() * lambda2.clone(),
                    b.pi_coefficient.clone().unwrap()
                );
                prop_assert_eq!(a.provenance.len(), b.provenance.len());
            }
        }

        #[test]
        fn domination_monotone(
            squares in proptest::collection::vec((1i64..20, 1i64..6), 2..5),
            bumps in proptest::collection::vec(0i64..5, 2..5),
        ) {
            let n = squares.len();
            let r = exact_radii(&squares);
            let bigger: Vec<(i64, i64)> = squares
                .iter()
                .zip(bumps.iter().chain(std::iter::repeat(&0)))
                .map(|(&(num, den), &b)| (num + b * den, den))
                .collect();
            let r2 = exact_radii(&bigger);
            let sym = PSymmetry::new(n, 1).unwrap();
            let s = sigma_p_stream(&r, &sym).unwrap();
            let s2 = sigma_p_stream(&r2, &sym).unwrap();
            for j in 1..=20 {
                prop_assert!(s.nth(j).numeric <= s2.nth(j).numeric + 1e-9);
            }
        }
    }
}
