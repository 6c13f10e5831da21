//! Truncated Fourier model of the constrained loop space: action functional,
//! perturbed action, gradients, symmetry constraints, and the dimension
//! count of the truncated positive subspaces.
//!
//! A loop is x(t) = sum_j e^{2 pi j t J0} x_j with real 2n-vector
//! coefficients.  Membership in the constrained space means P x_j = -x_j for
//! odd j and P x_j = x_j for even j (mode 0 included), so odd-mode
//! coefficients vanish on the coordinates fixed by P and even-mode
//! coefficients vanish on the negated ones.

use crate::domain::{DomainError, PSymmetry, Radii};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoopError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("newton iteration did not converge within {iters} steps; best residual {residual:.3e}")]
    MaxIterationsExceeded { iters: usize, residual: f64 },
}

/// Apply the standard complex structure J0 (x, y) -> (-y, x) blockwise.
pub fn apply_j0(v: &[f64]) -> Vec<f64> {
    let n = v.len() / 2;
    let mut out = vec![0.0; 2 * n];
    for i in 0..n {
        out[i] = -v[n + i];
        out[n + i] = v[i];
    }
    out
}

/// Apply e^{theta J0} blockwise to a 2n-vector.
fn rotate(theta: f64, v: &[f64], out: &mut [f64]) {
    let n = v.len() / 2;
    let (s, c) = theta.sin_cos();
    for i in 0..n {
        let (x, y) = (v[i], v[n + i]);
        out[i] = c * x - s * y;
        out[n + i] = c * y + s * x;
    }
}

/// Truncated Fourier loop in the constrained space.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierLoop {
    sym: PSymmetry,
    /// Truncation order N: modes j in [-N, N].
    trunc: i64,
    /// coeffs[idx] is the coefficient of mode j = idx - N.
    coeffs: Vec<Vec<f64>>,
}

impl FourierLoop {
    /// Zero loop.
    pub fn zero(sym: PSymmetry, trunc: usize) -> Self {
        FourierLoop {
            sym,
            trunc: trunc as i64,
            coeffs: vec![vec![0.0; 2 * sym.n()]; 2 * trunc + 1],
        }
    }

    /// Project raw coefficients onto the constraint mask.  Returns the loop
    /// and the Euclidean norm of the discarded component.
    pub fn project(
        sym: PSymmetry,
        trunc: usize,
        raw: &[Vec<f64>],
    ) -> Result<(Self, f64), LoopError> {
        if raw.len() != 2 * trunc + 1 {
            return Err(DomainError::DimensionMismatch {
                expected: 2 * trunc + 1,
                actual: raw.len(),
            }
            .into());
        }
        let mut loop_ = FourierLoop::zero(sym, trunc);
        let mut discarded_sq = 0.0;
        for (idx, coeff) in raw.iter().enumerate() {
            if coeff.len() != 2 * sym.n() {
                return Err(DomainError::DimensionMismatch {
                    expected: 2 * sym.n(),
                    actual: coeff.len(),
                }
                .into());
            }
            let j = idx as i64 - trunc as i64;
            for (i, &v) in coeff.iter().enumerate() {
                if mode_coord_allowed(&sym, j, i) {
                    loop_.coeffs[idx][i] = v;
                } else {
                    discarded_sq += v * v;
                }
            }
        }
        Ok((loop_, discarded_sq.sqrt()))
    }

    pub fn symmetry(&self) -> PSymmetry {
        self.sym
    }

    pub fn trunc(&self) -> usize {
        self.trunc as usize
    }

    pub fn mode(&self, j: i64) -> &[f64] {
        &self.coeffs[(j + self.trunc) as usize]
    }

    pub fn mode_mut(&mut self, j: i64) -> &mut [f64] {
        let idx = (j + self.trunc) as usize;
        &mut self.coeffs[idx]
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, &[f64])> {
        let trunc = self.trunc;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(idx, c)| (idx as i64 - trunc, c.as_slice()))
    }

    /// Point x(t) on the loop.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let dim = 2 * self.sym.n();
        let mut out = vec![0.0; dim];
        let mut tmp = vec![0.0; dim];
        for (j, coeff) in self.modes() {
            if coeff.iter().all(|&v| v == 0.0) {
                continue;
            }
            rotate(2.0 * PI * j as f64 * t, coeff, &mut tmp);
            for i in 0..dim {
                out[i] += tmp[i];
            }
        }
        out
    }

    /// Velocity dx/dt at t.
    pub fn eval_velocity(&self, t: f64) -> Vec<f64> {
        let dim = 2 * self.sym.n();
        let mut out = vec![0.0; dim];
        let mut tmp = vec![0.0; dim];
        for (j, coeff) in self.modes() {
            if j == 0 || coeff.iter().all(|&v| v == 0.0) {
                continue;
            }
            rotate(2.0 * PI * j as f64 * t, coeff, &mut tmp);
            let rotated = apply_j0(&tmp);
            let w = 2.0 * PI * j as f64;
            for i in 0..dim {
                out[i] += w * rotated[i];
            }
        }
        out
    }

    /// H^{1/2} inner product <x, y> = x_0 . y_0 + 2 pi sum |j| x_j . y_j.
    pub fn h_half_inner(&self, other: &FourierLoop) -> f64 {
        assert_eq!(self.trunc, other.trunc);
        let mut acc = 0.0;
        for (j, a) in self.modes() {
            let b = other.mode(j);
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            if j == 0 {
                acc += dot;
            } else {
                acc += 2.0 * PI * j.abs() as f64 * dot;
            }
        }
        acc
    }

    pub fn h_half_norm(&self) -> f64 {
        self.h_half_inner(self).sqrt()
    }

    /// True if every coefficient obeys the constraint mask.
    pub fn satisfies_mask(&self) -> bool {
        self.modes().all(|(j, coeff)| {
            coeff
                .iter()
                .enumerate()
                .all(|(i, &v)| v == 0.0 || mode_coord_allowed(&self.sym, j, i))
        })
    }
}

/// Whether ambient coordinate `i` may be nonzero in mode `j`.
/// Odd modes live in ker(P + I), even modes (and mode 0) in ker(P - I).
fn mode_coord_allowed(sym: &PSymmetry, j: i64, i: usize) -> bool {
    let negated = sym.sign(i) < 0.0;
    if j.rem_euclid(2) == 1 {
        negated
    } else {
        !negated
    }
}

/// A Hamiltonian with value and gradient callables.
pub struct HamiltonianModel {
    value: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    gradient: Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
    /// Quadratic-growth coefficient a of the admissible class, if declared.
    pub quadratic_coefficient: Option<f64>,
    pub description: String,
}

impl HamiltonianModel {
    pub fn new(
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        description: &str,
    ) -> Self {
        HamiltonianModel {
            value: Box::new(value),
            gradient: Box::new(gradient),
            quadratic_coefficient: None,
            description: description.to_string(),
        }
    }

    /// H(z) = a |z|^2.
    pub fn quadratic(a: f64) -> Self {
        let mut h = HamiltonianModel::new(
            move |z| a * z.iter().map(|v| v * v).sum::<f64>(),
            move |z| z.iter().map(|v| 2.0 * a * v).collect(),
            "a|z|^2",
        );
        h.quadratic_coefficient = Some(a);
        h
    }

    pub fn value(&self, z: &[f64]) -> f64 {
        (self.value)(z)
    }

    pub fn gradient(&self, z: &[f64]) -> Vec<f64> {
        (self.gradient)(z)
    }

    /// Sampled check of condition (H1): H(Pz) = H(z).
    pub fn check_p_invariance(&self, sym: &PSymmetry, samples: usize, seed: u64) -> bool {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let z: Vec<f64> = (0..2 * sym.n()).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let pz = sym.apply(&z).unwrap();
            let a = self.value(&z);
            let b = self.value(&pz);
            if !crate::domain::approx_eq_rel(a, b, 1e-9) {
                return false;
            }
        }
        true
    }
}

impl std::fmt::Debug for HamiltonianModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HamiltonianModel")
            .field("description", &self.description)
            .field("quadratic_coefficient", &self.quadratic_coefficient)
            .finish()
    }
}

/// A(x) = pi * sum_j j |x_j|^2, the spectral form of the symplectic action.
pub fn action(x: &FourierLoop) -> f64 {
    let mut acc = 0.0;
    for (j, coeff) in x.modes() {
        let norm_sq: f64 = coeff.iter().map(|v| v * v).sum();
        acc += j as f64 * norm_sq;
    }
    PI * acc
}

/// Quadrature oracle for the action: 1/2 integral <-J0 x', x> dt over one
/// period, with x and x' evaluated pointwise by mode summation.
pub fn action_quadrature(x: &FourierLoop, quad_pts: usize) -> f64 {
    let m = quad_pts.max(2);
    let mut acc = 0.0;
    for k in 0..m {
        let t = k as f64 / m as f64;
        let z = x.eval(t);
        let v = x.eval_velocity(t);
        let mj0v = apply_j0(&v);
        // <-J0 x', x> = <x', J0 x>; use -J0 v directly.
        let dot: f64 = mj0v.iter().zip(&z).map(|(a, b)| -a * b).sum();
        acc += dot;
    }
    0.5 * acc / m as f64
}

/// A_H(x) = A(x) - integral_0^1 H(x(t)) dt with uniform quadrature.
pub fn action_h(x: &FourierLoop, h: &HamiltonianModel, quad_pts: usize) -> f64 {
    let m = quad_pts.max(2 * x.trunc() + 1);
    let mut b = 0.0;
    for k in 0..m {
        let t = k as f64 / m as f64;
        b += h.value(&x.eval(t));
    }
    action(x) - b / m as f64
}

/// A_H with the sample count doubled until the value stabilizes within
/// 1e-12 relative, quantifying the aliasing error of the quadrature.
pub fn action_h_auto(x: &FourierLoop, h: &HamiltonianModel) -> (f64, usize) {
    let mut m = (4 * x.trunc() + 1).max(16);
    let mut prev = action_h(x, h, m);
    for _ in 0..12 {
        let next_m = 2 * m;
        let next = action_h(x, h, next_m);
        if crate::domain::approx_eq_rel(next, prev, 1e-12) {
            return (next, next_m);
        }
        prev = next;
        m = next_m;
    }
    (prev, m)
}

/// Fourier coefficients of t -> grad H(x(t)) on `m` uniform samples:
/// a_j = 1/m sum_k e^{-2 pi j t_k J0} grad H(x(t_k)).
fn gradient_coefficients(x: &FourierLoop, h: &HamiltonianModel, m: usize) -> Vec<Vec<f64>> {
    let dim = 2 * x.symmetry().n();
    let trunc = x.trunc() as i64;
    let samples: Vec<Vec<f64>> = (0..m)
        .map(|k| h.gradient(&x.eval(k as f64 / m as f64)))
        .collect();
    let mut out = vec![vec![0.0; dim]; 2 * x.trunc() + 1];
    let mut tmp = vec![0.0; dim];
    for j in -trunc..=trunc {
        let idx = (j + trunc) as usize;
        for (k, y) in samples.iter().enumerate() {
            let t = k as f64 / m as f64;
            rotate(-2.0 * PI * j as f64 * t, y, &mut tmp);
            for i in 0..dim {
                out[idx][i] += tmp[i];
            }
        }
        for v in out[idx].iter_mut() {
            *v /= m as f64;
        }
    }
    out
}

/// Gradient of A_H in the H^{1/2} metric, projected onto the constraint
/// mask: modes sign(j) x_j - a_j / (2 pi |j|) for j != 0 and -a_0 at j = 0,
/// where a_j are the Fourier coefficients of grad H along the loop.
pub fn grad_action_h(x: &FourierLoop, h: &HamiltonianModel) -> FourierLoop {
    grad_action_h_with_samples(x, h, (4 * x.trunc() + 1).max(33))
}

pub fn grad_action_h_with_samples(
    x: &FourierLoop,
    h: &HamiltonianModel,
    m: usize,
) -> FourierLoop {
    let sym = x.symmetry();
    let trunc = x.trunc() as i64;
    let coeffs = gradient_coefficients(x, h, m);
    let mut g = FourierLoop::zero(sym, x.trunc());
    for j in -trunc..=trunc {
        let idx = (j + trunc) as usize;
        let a = &coeffs[idx];
        let gm = g.mode_mut(j);
        for i in 0..gm.len() {
            let grad_i = if j == 0 {
                -a[i]
            } else {
                let sign = if j > 0 { 1.0 } else { -1.0 };
                sign * x.mode(j)[i] - a[i] / (2.0 * PI * j.abs() as f64)
            };
            // Projection onto the tangent space of the constrained space.
            if mode_coord_allowed(&sym, j, i) {
                gm[i] = grad_i;
            }
        }
    }
    g
}

/// Dimension of X_j = {x in E_P^+ : x_k = 0 for k > j}, computed by summing
/// eigenspace dimensions over modes 1..j.  Equals n j for even j and
/// n (j - 1) + 2 (n - kappa) for odd j.
pub fn constrained_dim(j: usize, sym: &PSymmetry) -> usize {
    (1..=j)
        .map(|k| {
            if k % 2 == 1 {
                sym.dim_negated()
            } else {
                sym.dim_fixed()
            }
        })
        .sum()
}

/// Brute-force dimension from the coordinate mask, the oracle for
/// `constrained_dim`.
pub fn constrained_dim_brute(j: usize, sym: &PSymmetry) -> usize {
    let mut count = 0;
    for k in 1..=j as i64 {
        for i in 0..2 * sym.n() {
            if mode_coord_allowed(sym, k, i) {
                count += 1;
            }
        }
    }
    count
}

/// Smooth ramp f for admissible Hamiltonians f o q: zero up to level 1,
/// quintic-smooth transition of width `delta`, then constant slope `alpha`.
#[derive(Debug, Clone, Copy)]
pub struct Ramp {
    pub alpha: f64,
    pub delta: f64,
}

impl Ramp {
    fn smoothstep(u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
    }

    fn smoothstep_integral(u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        u.powi(4) * (2.5 - 3.0 * u + u * u)
    }

    pub fn f(&self, s: f64) -> f64 {
        if s <= 1.0 {
            0.0
        } else if s <= 1.0 + self.delta {
            let u = (s - 1.0) / self.delta;
            self.alpha * self.delta * Self::smoothstep_integral(u)
        } else {
            self.alpha * self.delta * 0.5 + self.alpha * (s - 1.0 - self.delta)
        }
    }

    pub fn fp(&self, s: f64) -> f64 {
        if s <= 1.0 {
            0.0
        } else if s <= 1.0 + self.delta {
            self.alpha * Self::smoothstep((s - 1.0) / self.delta)
        } else {
            self.alpha
        }
    }

    /// Solve f'(s0) = slope by bisection on the transition interval.
    pub fn level_for_slope(&self, slope: f64) -> Option<f64> {
        if slope <= 0.0 || slope >= self.alpha {
            return None;
        }
        let (mut lo, mut hi) = (1.0, 1.0 + self.delta);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.fp(mid) < slope {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    /// The critical action f'(s0) s0 - f(s0) reached at slope `slope`.
    pub fn critical_action(&self, slope: f64) -> Option<f64> {
        let s0 = self.level_for_slope(slope)?;
        Some(self.fp(s0) * s0 - self.f(s0))
    }
}

/// Ellipsoid gauge q(z) = sum (x_i^2 + y_i^2) / r_i^2.
pub fn ellipsoid_gauge_sq(r: &Radii) -> HamiltonianModel {
    let squares: Vec<f64> = (0..r.n()).map(|j| r.square(j)).collect();
    let sq2 = squares.clone();
    HamiltonianModel::new(
        move |z| {
            let n = squares.len();
            (0..n)
                .map(|i| (z[i] * z[i] + z[n + i] * z[n + i]) / squares[i])
                .sum()
        },
        move |z| {
            let n = sq2.len();
            let mut g = vec![0.0; 2 * n];
            for i in 0..n {
                g[i] = 2.0 * z[i] / sq2[i];
                g[n + i] = 2.0 * z[n + i] / sq2[i];
            }
            g
        },
        "ellipsoid gauge squared",
    )
}

/// Admissible ramp Hamiltonian f o q on E(r).
pub fn ramp_hamiltonian(r: &Radii, ramp: Ramp) -> HamiltonianModel {
    let q = ellipsoid_gauge_sq(r);
    let q2 = ellipsoid_gauge_sq(r);
    HamiltonianModel::new(
        move |z| ramp.f(q.value(z)),
        move |z| {
            let s = q2.value(z);
            let fp = ramp.fp(s);
            q2.gradient(z).into_iter().map(|g| fp * g).collect()
        },
        "ramp f(q) on ellipsoid",
    )
}

/// Check that a ramp slope avoids the P-symmetric spectrum of the ellipsoid
/// within a guard band, per the admissible-class shape constraint.
pub fn validate_ramp_slope(
    alpha: f64,
    spectrum: &crate::spectrum::ActionStream,
    guard: f64,
) -> bool {
    let mut s = spectrum.clone();
    loop {
        match s.next() {
            Some(v) if v.numeric < alpha + 1.0 => {
                if (v.numeric - alpha).abs() <= guard {
                    return false;
                }
            }
            _ => return true,
        }
    }
}

/// Single-mode loop supported on one coordinate axis: the truncated Fourier
/// form of a planar characteristic.
pub fn axis_circle_loop(
    sym: PSymmetry,
    trunc: usize,
    axis: usize,
    mode: i64,
    amplitude: f64,
    phase: f64,
) -> FourierLoop {
    let mut x = FourierLoop::zero(sym, trunc);
    let n = sym.n();
    let c = x.mode_mut(mode);
    c[axis] = amplitude * phase.cos();
    c[n + axis] = amplitude * phase.sin();
    x
}

#[derive(Debug)]
pub struct NewtonResult {
    pub loop_: FourierLoop,
    /// H^{1/2} norm of grad A_H at the returned iterate.
    pub residual: f64,
    pub action: f64,
    pub action_h: f64,
    pub iterations: usize,
}

/// Damped Newton iteration on grad A_H = 0 in the truncated constrained
/// space.  Finds critical points near the seed only; no minimax structure is
/// implied.  On failure the best iterate is still returned inside the error.
pub fn spectral_newton(
    h: &HamiltonianModel,
    seed: &FourierLoop,
    max_iters: usize,
    tol: f64,
) -> Result<NewtonResult, (LoopError, NewtonResult)> {
    let sym = seed.symmetry();
    let trunc = seed.trunc();
    // Free coordinates: (mode, ambient index) pairs allowed by the mask.
    let free: Vec<(i64, usize)> = (-(trunc as i64)..=trunc as i64)
        .flat_map(|j| {
            (0..2 * sym.n())
                .filter(move |&i| true_allowed(&sym, j, i))
                .map(move |i| (j, i))
        })
        .collect();
    let d = free.len();
    let pack = |x: &FourierLoop| -> DVector<f64> {
        DVector::from_iterator(d, free.iter().map(|&(j, i)| x.mode(j)[i]))
    };
    let unpack = |v: &DVector<f64>| -> FourierLoop {
        let mut x = FourierLoop::zero(sym, trunc);
        for (idx, &(j, i)) in free.iter().enumerate() {
            x.mode_mut(j)[i] = v[idx];
        }
        x
    };
    let residual_vec = |v: &DVector<f64>| -> DVector<f64> {
        let x = unpack(v);
        pack(&grad_action_h(&x, h))
    };

    let quad = (4 * trunc + 1).max(33);
    let mut u = pack(seed);
    let mut r = residual_vec(&u);
    let mut best_u = u.clone();
    let mut best_norm = r.norm();
    let mut iters = 0;

    for it in 0..max_iters {
        iters = it;
        let x = unpack(&u);
        if grad_action_h(&x, h).h_half_norm() < tol {
            break;
        }
        // Finite-difference Jacobian of the residual.
        let fd = 1e-6 * (1.0 + u.norm());
        let mut jac = DMatrix::zeros(d, d);
        for col in 0..d {
            let mut up = u.clone();
            up[col] += fd;
            let rp = residual_vec(&up);
            for row in 0..d {
                jac[(row, col)] = (rp[row] - r[row]) / fd;
            }
        }
        let delta = match jac.clone().lu().solve(&r) {
            Some(dlt) => dlt,
            None => jac
                .svd(true, true)
                .solve(&r, 1e-12)
                .expect("svd solve"),
        };
        // Backtracking line search on |residual|.
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = &u - step * &delta;
            let rt = residual_vec(&trial);
            if rt.norm() < r.norm() * (1.0 - 1e-4 * step) {
                u = trial;
                r = rt;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        if r.norm() < best_norm {
            best_norm = r.norm();
            best_u = u.clone();
        }
    }

    let x = unpack(&best_u);
    let g = grad_action_h(&x, h);
    let res = NewtonResult {
        residual: g.h_half_norm(),
        action: action(&x),
        action_h: action_h(&x, h, quad),
        loop_: x,
        iterations: iters,
    };
    if res.residual < tol {
        Ok(res)
    } else {
        let err = LoopError::MaxIterationsExceeded {
            iters: max_iters,
            residual: res.residual,
        };
        Err((err, res))
    }
}

fn true_allowed(sym: &PSymmetry, j: i64, i: usize) -> bool {
    mode_coord_allowed(sym, j, i)
}
