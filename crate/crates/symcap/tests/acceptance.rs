//! End-to-end acceptance checks, one per criterion, each printing a single
//! pass/fail line (visible with `--nocapture`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::Instant;

use symcap::capacities::{capacity_ball, capacity_ellipsoid, capacity_polydisc};
use symcap::domain::{approx_eq_rel, big_ratio, PSymmetry, Radii};
use symcap::loopspace;
use symcap::solver::{self, GaugeModel, ShootOptions, SurveyBudget};
use symcap::spectrum::{eh_stream, sigma_p_prime_stream, sigma_p_stream};

fn report(criterion: u32, desc: &str, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    println!("[acceptance] criterion {criterion}: {status} - {desc}{detail}");
    assert!(ok, "criterion {criterion} failed: {desc}{detail}");
}

fn exact_radii(squares: &[(i64, i64)]) -> Radii {
    let sq: Vec<BigRational> = squares.iter().map(|&(n, d)| big_ratio(n, d)).collect();
    Radii::from_exact_squares(&sq).unwrap()
}

fn random_squares(rng: &mut ChaCha8Rng, n: usize) -> Vec<(i64, i64)> {
    (0..n)
        .map(|_| (rng.gen_range(1..=30), rng.gen_range(1..=8)))
        .collect()
}

/// Expanded, sorted exact sigma_P as rational coefficients of pi.
fn brute_sigma_p(squares: &[(i64, i64)], kappa: usize, count: usize) -> Vec<BigRational> {
    let n = squares.len();
    let mut all: Vec<BigRational> = Vec::new();
    for (j, &(num, den)) in squares.iter().enumerate() {
        let sq = big_ratio(num, den);
        let (start, step) = if j < n - kappa { (1i64, 2) } else { (2, 2) };
        let mut m = start;
        while m <= 201 {
            all.push(&sq * BigRational::from(BigInt::from(m)));
            m += step;
        }
    }
    all.sort();
    all.truncate(count);
    all
}

/// Expanded, sorted exact sigma'_P as rational coefficients of pi.
fn brute_sigma_p_prime(squares: &[(i64, i64)], kappa: usize, count: usize) -> Vec<BigRational> {
    let n = squares.len();
    let hat = squares[..n - kappa]
        .iter()
        .map(|&(a, b)| big_ratio(a, b))
        .min()
        .unwrap();
    let mut all: Vec<BigRational> = Vec::new();
    let mut m = 1i64;
    while m <= 401 {
        all.push(&hat * BigRational::from(BigInt::from(m)));
        m += 2;
    }
    if kappa > 0 {
        let prime = squares[n - kappa..]
            .iter()
            .map(|&(a, b)| big_ratio(a, b))
            .min()
            .unwrap();
        let mut m = 2i64;
        while m <= 402 {
            all.push(&prime * BigRational::from(BigInt::from(m)));
            m += 2;
        }
    }
    all.sort();
    all.truncate(count);
    all
}

#[test]
fn criterion_1_ball_table() {
    let t0 = Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    'outer: for n in 1..=6 {
        for kappa in 0..n {
            let sym = PSymmetry::new(n, kappa).unwrap();
            let ones = exact_radii(&vec![(1, 1); n]);
            let oracle = brute_sigma_p(&vec![(1, 1); n], kappa, 4 * n);
            let stream = sigma_p_stream(&ones, &sym).unwrap();
            for j in 1..=4 * n {
                let table = capacity_ball(&sym, 1.0, j);
                let want = &oracle[j - 1];
                let table_coeff = table.pi_coefficient.clone().unwrap();
                let stream_coeff = stream.nth(j).pi_coefficient.unwrap();
                if &table_coeff != want || &stream_coeff != want {
                    ok = false;
                    detail = format!(" (n={n} kappa={kappa} j={j}: table {table_coeff}, oracle {want})");
                    break 'outer;
                }
                if table.integer_pi_multiple().is_none() {
                    ok = false;
                    detail = format!(" (n={n} kappa={kappa} j={j}: not an integer pi multiple)");
                    break 'outer;
                }
            }
        }
    }
    let elapsed = t0.elapsed();
    let ok = ok && elapsed.as_secs_f64() < 1.0;
    report(
        1,
        "ball table matches brute-force spectrum for n <= 6, j <= 4n",
        ok,
        &format!("{detail} [{elapsed:.2?}]"),
    );
}

#[test]
fn criterion_2_spectrum_oracle() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut ok = true;
    let mut detail = String::new();
    'outer: for case in 0..200 {
        let n = rng.gen_range(1..=5);
        let kappa = rng.gen_range(0..n);
        let squares = random_squares(&mut rng, n);
        let r = exact_radii(&squares);
        let sym = PSymmetry::new(n, kappa).unwrap();
        let r_float = Radii::new(r.values()).unwrap();

        let oracle_p = brute_sigma_p(&squares, kappa, 50);
        let s = sigma_p_stream(&r, &sym).unwrap();
        let sf = sigma_p_stream(&r_float, &sym).unwrap();
        for j in 1..=50 {
            let got = s.nth(j).pi_coefficient.unwrap();
            if got != oracle_p[j - 1] {
                ok = false;
                detail = format!(" (case {case} sigma_P j={j}: {got} vs {})", oracle_p[j - 1]);
                break 'outer;
            }
            let fv = sf.nth(j).numeric;
            let want = oracle_p[j - 1].to_f64().unwrap() * PI;
            if !approx_eq_rel(fv, want, 1e-12) {
                ok = false;
                detail = format!(" (case {case} float sigma_P j={j}: {fv} vs {want})");
                break 'outer;
            }
        }

        let oracle_pp = brute_sigma_p_prime(&squares, kappa, 50);
        let sp = sigma_p_prime_stream(&r, &sym).unwrap();
        let spf = sigma_p_prime_stream(&r_float, &sym).unwrap();
        for j in 1..=50 {
            let got = sp.nth(j).pi_coefficient.unwrap();
            if got != oracle_pp[j - 1] {
                ok = false;
                detail = format!(" (case {case} sigma'_P j={j}: {got} vs {})", oracle_pp[j - 1]);
                break 'outer;
            }
            let fv = spf.nth(j).numeric;
            let want = oracle_pp[j - 1].to_f64().unwrap() * PI;
            if !approx_eq_rel(fv, want, 1e-12) {
                ok = false;
                detail = format!(" (case {case} float sigma'_P j={j}: {fv} vs {want})");
                break 'outer;
            }
        }
    }
    let elapsed = t0.elapsed();
    let ok = ok && elapsed.as_secs_f64() < 10.0;
    report(
        2,
        "lazy spectra equal brute-force enumeration on 200 exact instances",
        ok,
        &format!("{detail} [{elapsed:.2?}]"),
    );
}

#[test]
fn criterion_3_minimum_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut ok = true;
    let mut detail = String::new();
    for case in 0..200 {
        let n = rng.gen_range(1..=5);
        let kappa = rng.gen_range(0..n);
        let squares = random_squares(&mut rng, n);
        let r = exact_radii(&squares);
        let sym = PSymmetry::new(n, kappa).unwrap();

        let hat = squares[..n - kappa]
            .iter()
            .map(|&(a, b)| big_ratio(a, b))
            .min()
            .unwrap();
        let expect = if kappa > 0 {
            let prime = squares[n - kappa..]
                .iter()
                .map(|&(a, b)| big_ratio(a, b))
                .min()
                .unwrap();
            hat.min(prime * big_ratio(2, 1))
        } else {
            hat
        };
        let first = capacity_polydisc(&r, &sym, 1).unwrap();
        if first.pi_coefficient.as_ref() != Some(&expect) {
            ok = false;
            detail = format!(" (case {case}: min sigma'_P {:?} vs {expect})", first.pi_coefficient);
            break;
        }
        let e1 = capacity_ellipsoid(&r, &sym, 1).unwrap();
        if e1.pi_coefficient != first.pi_coefficient {
            ok = false;
            detail = format!(" (case {case}: polydisc and ellipsoid first capacities differ)");
            break;
        }
    }
    report(
        3,
        "min sigma'_P = pi*min(rhat^2, 2 r'^2) and first capacities of D(r), E(r) agree",
        ok,
        &detail,
    );
}

#[test]
fn criterion_4_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut ok = true;
    let mut detail = String::new();
    // kappa = 0: the first symmetric capacity equals the first classical one.
    for case in 0..100 {
        let n = rng.gen_range(1..=5);
        let squares = random_squares(&mut rng, n);
        let r = exact_radii(&squares);
        let sym = PSymmetry::new(n, 0).unwrap();
        let cp1 = capacity_ellipsoid(&r, &sym, 1).unwrap();
        let ceh1 = eh_stream(&r).nth(1);
        if cp1.pi_coefficient != ceh1.pi_coefficient {
            ok = false;
            detail = format!(" (kappa=0 case {case}: {:?} vs {:?})", cp1.pi_coefficient, ceh1.pi_coefficient);
            break;
        }
    }
    // kappa >= 1 counterexample family: min first-group square > 2 * min
    // second-group square forces c_P^1 = 2 c_EH^1.
    if ok {
        for case in 0..100 {
            let n = rng.gen_range(2..=5);
            let kappa = rng.gen_range(1..n);
            let mut squares = random_squares(&mut rng, n);
            // Inflate the first group so its min square exceeds twice the
            // second group's min square.
            let second_min = squares[n - kappa..]
                .iter()
                .map(|&(a, b)| big_ratio(a, b))
                .min()
                .unwrap();
            for s in squares[..n - kappa].iter_mut() {
                while big_ratio(s.0, s.1) <= &second_min * big_ratio(2, 1) {
                    *s = (s.0 * 17, s.1); // push well past the threshold
                }
            }
            let r = exact_radii(&squares);
            let sym = PSymmetry::new(n, kappa).unwrap();
            let cp1 = capacity_ellipsoid(&r, &sym, 1).unwrap().pi_coefficient.unwrap();
            let ceh1 = eh_stream(&r).nth(1).pi_coefficient.unwrap();
            if cp1 != &ceh1 * big_ratio(2, 1) {
                ok = false;
                detail = format!(" (counterexample case {case}: c_P^1 {cp1} vs 2*c_EH^1 {})", &ceh1 * big_ratio(2, 1));
                break;
            }
            // Reported EHZ-type value is c_P^1 / 2 by construction.
            let dom = symcap::DomainSpec::Ellipsoid { radii: r.clone(), sym };
            let rel = symcap::related_capacities(&dom).unwrap();
            if !approx_eq_rel(rel.c_ehz_p.unwrap(), rel.c_p_1 / 2.0, 1e-15) || !rel.derived_by_relation {
                ok = false;
                detail = format!(" (case {case}: EHZ relation not derived as c_P^1/2)");
                break;
            }
        }
    }
    report(
        4,
        "capacity relations at kappa = 0 and the kappa >= 1 counterexample family",
        ok,
        &detail,
    );
}

#[test]
fn criterion_5_bidisk() {
    use symcap::bidisk::{
        bidisk_interval_intersection, bidisk_spectrum_values, cp1_upper_endpoint,
        cp2_upper_endpoint, BidiskSpectrumQuery,
    };
    let t0 = Instant::now();
    let mut ok = true;
    let mut detail = String::new();

    let values = bidisk_spectrum_values(40);
    for want in [4.0, 3.0 * 3.0_f64.sqrt(), 8.0] {
        if !values.iter().any(|v| approx_eq_rel(v.numeric, want, 1e-12)) {
            ok = false;
            detail = format!(" (missing spectrum value {want})");
        }
    }

    if ok {
        let q2 = BidiskSpectrumQuery::new(2.0 * PI, cp2_upper_endpoint()).unwrap();
        let r2 = bidisk_interval_intersection(&q2);
        let nums: Vec<f64> = r2.values.iter().map(|v| v.numeric).collect();
        if !(r2.certified
            && nums.len() == 2
            && approx_eq_rel(nums[0], 2.0 * PI, 1e-12)
            && approx_eq_rel(nums[1], 8.0, 1e-12))
        {
            ok = false;
            detail = format!(" (second window gave {nums:?}, certified {})", r2.certified);
        }
    }

    if ok {
        let q1 = BidiskSpectrumQuery::new(4.0, cp1_upper_endpoint()).unwrap();
        let r1 = bidisk_interval_intersection(&q1);
        let nums: Vec<f64> = r1.values.iter().map(|v| v.numeric).collect();
        let has4 = nums.iter().any(|v| approx_eq_rel(*v, 4.0, 1e-12));
        let has8 = nums.iter().any(|v| approx_eq_rel(*v, 8.0, 1e-12));
        let has2pi = nums.iter().any(|v| approx_eq_rel(*v, 2.0 * PI, 1e-12));
        if !(r1.certified && has4 && !has8 && !has2pi) {
            ok = false;
            detail = format!(
                " (first window gave {nums:?}, certified {}, 4 in: {has4})",
                r1.certified
            );
        }
    }

    let elapsed = t0.elapsed();
    let ok = ok && elapsed.as_secs_f64() < 1.0;
    report(
        5,
        "bidisk spectrum anchors and certified capacity windows",
        ok,
        &format!("{detail} [{elapsed:.2?}]"),
    );
}

fn random_loop(sym: PSymmetry, trunc: usize, rng: &mut ChaCha8Rng) -> loopspace::FourierLoop {
    let raw: Vec<Vec<f64>> = (0..2 * trunc + 1)
        .map(|_| (0..2 * sym.n()).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    loopspace::FourierLoop::project(sym, trunc, &raw).unwrap().0
}

fn random_invariant_h(n: usize, rng: &mut ChaCha8Rng) -> loopspace::HamiltonianModel {
    let coefs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
    let quartic = rng.gen_range(0.0..0.3);
    let c2 = coefs.clone();
    loopspace::HamiltonianModel::new(
        move |z| {
            let n = coefs.len();
            (0..n)
                .map(|i| {
                    let rho = z[i] * z[i] + z[n + i] * z[n + i];
                    coefs[i] * rho + quartic * rho * rho
                })
                .sum()
        },
        move |z| {
            let n = c2.len();
            let mut g = vec![0.0; 2 * n];
            for i in 0..n {
                let rho = z[i] * z[i] + z[n + i] * z[n + i];
                let f = 2.0 * (c2[i] + 2.0 * quartic * rho);
                g[i] = f * z[i];
                g[n + i] = f * z[n + i];
            }
            g
        },
        "rotation-invariant test Hamiltonian",
    )
}

#[test]
fn criterion_6_loop_space() {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let mut ok = true;
    let mut detail = String::new();

    'dims: for n in 1..=6 {
        for kappa in 0..n {
            let sym = PSymmetry::new(n, kappa).unwrap();
            for j in 1..=20 {
                let closed = loopspace::constrained_dim(j, &sym);
                let brute = loopspace::constrained_dim_brute(j, &sym);
                let formula = if j % 2 == 0 { n * j } else { n * (j - 1) + 2 * (n - kappa) };
                if closed != brute || closed != formula {
                    ok = false;
                    detail = format!(" (dim n={n} kappa={kappa} j={j}: {closed} vs {brute}/{formula})");
                    break 'dims;
                }
            }
        }
    }

    if ok {
        for case in 0..100 {
            let n = rng.gen_range(1..=3);
            let kappa = rng.gen_range(0..n);
            let sym = PSymmetry::new(n, kappa).unwrap();
            let trunc = rng.gen_range(4..=64);
            let x = random_loop(sym, trunc, &mut rng);
            let spectral = loopspace::action(&x);
            let quad = loopspace::action_quadrature(&x, 4 * trunc + 3);
            if !approx_eq_rel(spectral, quad, 1e-10) {
                ok = false;
                detail = format!(" (action case {case}: {spectral} vs {quad})");
                break;
            }
        }
    }

    if ok {
        for case in 0..50 {
            let n = rng.gen_range(1..=3);
            let kappa = rng.gen_range(0..n);
            let sym = PSymmetry::new(n, kappa).unwrap();
            let trunc = rng.gen_range(2..=6);
            let h = random_invariant_h(n, &mut rng);
            let x = random_loop(sym, trunc, &mut rng);
            let dir = random_loop(sym, trunc, &mut rng);
            let analytic = loopspace::grad_action_h(&x, &h).h_half_inner(&dir);
            let m = (4 * trunc + 1).max(65);
            let mut best = f64::INFINITY;
            for &eps in &[1e-4, 1e-5, 1e-6] {
                let mut plus = x.clone();
                let mut minus = x.clone();
                for (j, coeff) in dir.modes() {
                    for (i, &c) in coeff.iter().enumerate() {
                        plus.mode_mut(j)[i] += eps * c;
                        minus.mode_mut(j)[i] -= eps * c;
                    }
                }
                let fd = (loopspace::action_h(&plus, &h, m) - loopspace::action_h(&minus, &h, m))
                    / (2.0 * eps);
                best = best.min((fd - analytic).abs() / analytic.abs().max(1e-8));
            }
            if best > 1e-6 {
                ok = false;
                detail = format!(" (gradient case {case}: rel err {best})");
                break;
            }
        }
    }

    report(
        6,
        "loop-space dimension formula, action quadrature, and gradient checks",
        ok,
        &detail,
    );
}

#[test]
fn criterion_7_solver_vs_closed_form() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut ok = true;
    let mut detail = String::new();

    for case in 0..10 {
        let n = if case % 2 == 0 { 2 } else { 3 };
        let kappa = rng.gen_range(1..n);
        let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(0.75..1.35)).collect();
        let r = Radii::new(&vals).unwrap();
        let sym = PSymmetry::new(n, kappa).unwrap();
        let cap = capacity_ellipsoid(&r, &sym, 1).unwrap().numeric;
        let gauge = GaugeModel::ellipsoid(&r);
        let budget = SurveyBudget {
            action_bound: 3.0 * PI * vals.iter().map(|v| v * v).fold(0.0, f64::max),
            shoot: ShootOptions::default(),
        };
        let res = solver::min_action_survey(&gauge, &sym, 64, &budget);
        if !approx_eq_rel(res.estimate, cap, 1e-6) {
            ok = false;
            detail = format!(" (case {case}: estimate {} vs capacity {cap})", res.estimate);
            break;
        }
        // Every converged action must be a spectrum member.
        let stream = sigma_p_stream(&r, &sym).unwrap();
        let mut members: Vec<f64> = Vec::new();
        let mut s = stream.clone();
        let top = res.found.iter().map(|c| c.action).fold(0.0, f64::max);
        while let Some(v) = s.next() {
            members.push(v.numeric);
            if v.numeric > top * (1.0 + 1e-6) + 1.0 {
                break;
            }
        }
        for c in &res.found {
            if !members.iter().any(|m| (m - c.action).abs() <= 1e-6 * c.action) {
                ok = false;
                detail = format!(" (case {case}: action {} not in the spectrum)", c.action);
                break;
            }
        }
        if !ok {
            break;
        }
    }

    // RK4 order on the linear round flow.
    if ok {
        let h = GaugeModel::ellipsoid(&Radii::new(&[1.0, 1.0]).unwrap());
        let z0 = h.normalize(&[0.6, -0.3, 0.5, 0.4]);
        let err_at = |steps: usize| -> f64 {
            let traj =
                solver::integrate_hamiltonian(&h, &z0, PI, steps, solver::Integrator::Rk4).unwrap();
            let end = traj.last().unwrap();
            end.iter()
                .zip(&z0)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        };
        let ratio = err_at(64) / err_at(128);
        if !(12.0 < ratio && ratio < 20.0) {
            ok = false;
            detail = format!(" (RK4 halving ratio {ratio}, expected about 16)");
        }
    }

    let elapsed = t0.elapsed();
    let ok = ok && elapsed.as_secs_f64() < 60.0;
    report(
        7,
        "multistart solver recovers the first capacity and stays inside the spectrum",
        ok,
        &format!("{detail} [{elapsed:.2?}]"),
    );
}

#[test]
fn criterion_8_brake_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut ok = true;
    let mut detail = String::new();
    for case in 0..10 {
        let n = rng.gen_range(2..=3);
        let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(0.7..1.5)).collect();
        let r = Radii::new(&vals).unwrap();
        let gauge = GaugeModel::ellipsoid(&r);
        let min_sq = vals.iter().map(|v| v * v).fold(f64::MAX, f64::min);
        let expect = PI * min_sq;
        let budget = SurveyBudget {
            action_bound: 1.5 * PI * vals.iter().map(|v| v * v).fold(0.0, f64::max),
            shoot: ShootOptions::default(),
        };
        let res = solver::min_brake_action_survey(&gauge, n, 4 * n, &budget);
        if !approx_eq_rel(res.estimate, expect, 1e-6) {
            ok = false;
            detail = format!(" (case {case}: brake minimum {} vs {expect})", res.estimate);
            break;
        }
    }
    report(
        8,
        "brake shooting recovers the minimal brake action pi*min r_j^2",
        ok,
        &detail,
    );
}
