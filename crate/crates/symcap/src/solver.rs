//! Numerical closed-characteristic finder on convex energy levels: analytic
//! planar families on ellipsoids, shooting with half-period or brake
//! boundary conditions for general smooth gauges, and a multistart survey
//! estimating the minimum of the symmetric action spectrum from above.

use crate::domain::{PSymmetry, Radii};
use crate::loopspace::{apply_j0, HamiltonianModel};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("integration needs at least 16 steps, got {0}")]
    StepCountTooSmall(usize),
    #[error("shooting did not converge: residual {residual:.3e} after {iters} iterations")]
    NoConvergence { residual: f64, iters: usize },
    #[error("shooting Jacobian is numerically singular")]
    SingularJacobian,
    #[error("brake seed must lie on the real part y = 0 (max |y| = {max_y:.3e})")]
    SeedNotOnRealPart { max_y: f64 },
}

/// Boundary condition satisfied by a characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryKind {
    /// z(t + T/2) = P z(t).
    PHalfPeriod,
    /// z(T - t) = tau0 z(t), i.e. the orbit meets {y = 0} at t = 0 and T/2.
    Brake,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// max |dz/dt - J0 grad H(z)| over interior samples (4th-order stencil).
    pub ode: f64,
    /// |z(T/2) - P z(0)| or the larger distance of the two brake endpoints
    /// to the real part.
    pub symmetry: f64,
    /// max |H(z(t)) - 1| over samples.
    pub energy_drift: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.ode.max(self.symmetry).max(self.energy_drift)
    }
}

/// A numerically represented closed characteristic on the level {H = 1}.
#[derive(Debug, Clone)]
pub struct Characteristic {
    pub period: f64,
    pub action: f64,
    /// Time-ordered (t, z(t)) samples over one full period.
    pub samples: Vec<(f64, Vec<f64>)>,
    pub symmetry: SymmetryKind,
    pub residuals: Residuals,
}

/// Positively 2-homogeneous Hamiltonian (squared Minkowski gauge).
pub struct GaugeModel {
    pub model: HamiltonianModel,
}

impl GaugeModel {
    pub fn new(model: HamiltonianModel) -> Self {
        GaugeModel { model }
    }

    pub fn value(&self, z: &[f64]) -> f64 {
        self.model.value(z)
    }

    pub fn gradient(&self, z: &[f64]) -> Vec<f64> {
        self.model.gradient(z)
    }

    /// q(z) = sum (x_i^2 + y_i^2) / r_i^2 for the ellipsoid E(r).
    pub fn ellipsoid(r: &Radii) -> Self {
        GaugeModel::new(crate::loopspace::ellipsoid_gauge_sq(r))
    }

    /// Smoothed gauge of the Lagrangian bidisk
    /// {x1^2 + x2^2 < 1} x {y1^2 + y2^2 < 1}:
    /// q_p = ((x1^2 + x2^2)^p + (y1^2 + y2^2)^p)^{1/p}, p in [4, 12].
    /// As p grows this approaches the max-gauge of the product body.
    pub fn smoothed_bidisk(p: f64) -> Self {
        let p = p.clamp(4.0, 12.0);
        let model = HamiltonianModel::new(
            move |z| {
                let a = z[0] * z[0] + z[1] * z[1];
                let b = z[2] * z[2] + z[3] * z[3];
                (a.powf(p) + b.powf(p)).powf(1.0 / p)
            },
            move |z| {
                let a = z[0] * z[0] + z[1] * z[1];
                let b = z[2] * z[2] + z[3] * z[3];
                let s = a.powf(p) + b.powf(p);
                if s == 0.0 {
                    return vec![0.0; 4];
                }
                let outer = s.powf(1.0 / p - 1.0);
                let fa = outer * a.powf(p - 1.0);
                let fb = outer * b.powf(p - 1.0);
                vec![2.0 * fa * z[0], 2.0 * fa * z[1], 2.0 * fb * z[2], 2.0 * fb * z[3]]
            },
            "smoothed bidisk gauge",
        );
        GaugeModel::new(model)
    }

    /// Sampled check of q(lambda z) = lambda^2 q(z); returns the max
    /// relative error over random (lambda, z).
    pub fn check_homogeneity(&self, dim: usize, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0_f64;
        for _ in 0..samples {
            let z: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let lambda: f64 = rng.gen_range(0.1..3.0);
            let scaled: Vec<f64> = z.iter().map(|v| lambda * v).collect();
            let lhs = self.value(&scaled);
            let rhs = lambda * lambda * self.value(&z);
            let err = (lhs - rhs).abs() / rhs.abs().max(1e-12);
            worst = worst.max(err);
        }
        worst
    }

    /// Rescale z onto the level set {q = 1}.
    pub fn normalize(&self, z: &[f64]) -> Vec<f64> {
        let q = self.value(z);
        let s = 1.0 / q.sqrt();
        z.iter().map(|v| s * v).collect()
    }
}

impl std::fmt::Debug for GaugeModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GaugeModel").field("model", &self.model).finish()
    }
}

fn vector_field(h: &GaugeModel, z: &[f64]) -> Vec<f64> {
    apply_j0(&h.gradient(z))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    Rk4,
    /// Symplectic option for long periods; fixed-point implicit midpoint.
    ImplicitMidpoint,
}

/// Steps used by default: 2^11 per unit of period.
pub fn default_steps(t: f64) -> usize {
    ((2048.0 * t.abs()).ceil() as usize).max(2048)
}

/// Fixed-step integration of dz/dt = J0 grad H(z) from z0 over [0, T].
/// Returns the `steps + 1` trajectory points including both endpoints.
pub fn integrate_hamiltonian(
    h: &GaugeModel,
    z0: &[f64],
    t: f64,
    steps: usize,
    method: Integrator,
) -> Result<Vec<Vec<f64>>, SolverError> {
    if t == 0.0 {
        return Ok(vec![z0.to_vec()]);
    }
    if steps < 16 {
        return Err(SolverError::StepCountTooSmall(steps));
    }
    let dt = t / steps as f64;
    let dim = z0.len();
    let mut traj = Vec::with_capacity(steps + 1);
    let mut z = z0.to_vec();
    traj.push(z.clone());
    match method {
        Integrator::Rk4 => {
            for _ in 0..steps {
                let k1 = vector_field(h, &z);
                let z2: Vec<f64> = (0..dim).map(|i| z[i] + 0.5 * dt * k1[i]).collect();
                let k2 = vector_field(h, &z2);
                let z3: Vec<f64> = (0..dim).map(|i| z[i] + 0.5 * dt * k2[i]).collect();
                let k3 = vector_field(h, &z3);
                let z4: Vec<f64> = (0..dim).map(|i| z[i] + dt * k3[i]).collect();
                let k4 = vector_field(h, &z4);
                for i in 0..dim {
                    z[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
                traj.push(z.clone());
            }
        }
        Integrator::ImplicitMidpoint => {
            for _ in 0..steps {
                let mut mid = z.clone();
                // Fixed-point iteration on z_{k+1} = z_k + dt f((z_k + z_{k+1})/2).
                let mut next = z.clone();
                for _ in 0..20 {
                    for i in 0..dim {
                        mid[i] = 0.5 * (z[i] + next[i]);
                    }
                    let f = vector_field(h, &mid);
                    let mut delta = 0.0_f64;
                    for i in 0..dim {
                        let v = z[i] + dt * f[i];
                        delta = delta.max((v - next[i]).abs());
                        next[i] = v;
                    }
                    if delta < 1e-14 {
                        break;
                    }
                }
                z = next;
                traj.push(z.clone());
            }
        }
    }
    Ok(traj)
}

/// Max |H(z) - H(z0)| along a trajectory.
pub fn energy_drift(h: &GaugeModel, traj: &[Vec<f64>]) -> f64 {
    let h0 = h.value(&traj[0]);
    traj.iter()
        .map(|z| (h.value(z) - h0).abs())
        .fold(0.0, f64::max)
}

fn flow_endpoint(h: &GaugeModel, z0: &[f64], t: f64, steps: usize) -> Vec<f64> {
    integrate_hamiltonian(h, z0, t, steps.max(16), Integrator::Rk4)
        .expect("step count validated")
        .pop()
        .unwrap()
}

/// Mean of H along the loop samples times T: the action of a characteristic
/// via 1/2 <grad H(z), z> = H(z) for 2-homogeneous H.
fn action_from_samples(h: &GaugeModel, samples: &[(f64, Vec<f64>)], period: f64) -> f64 {
    let m = samples.len();
    let mean: f64 = samples
        .iter()
        .map(|(_, z)| {
            let g = h.gradient(z);
            0.5 * g.iter().zip(z).map(|(a, b)| a * b).sum::<f64>()
        })
        .sum::<f64>()
        / m as f64;
    mean * period
}

/// ODE residual of the first `half` samples via a 4th-order central stencil
/// (the integrated half is smooth; the glued half is its exact image).
fn ode_residual(h: &GaugeModel, samples: &[(f64, Vec<f64>)], half: usize) -> f64 {
    if half < 5 {
        return 0.0;
    }
    let dt = samples[1].0 - samples[0].0;
    let mut worst = 0.0_f64;
    // A handful of interior checkpoints is enough for a max-norm estimate.
    let stride = (half / 64).max(1);
    let mut k = 2;
    while k + 2 < half {
        let f = vector_field(h, &samples[k].1);
        let dim = f.len();
        for i in 0..dim {
            let d = (samples[k - 2].1[i] - 8.0 * samples[k - 1].1[i]
                + 8.0 * samples[k + 1].1[i]
                - samples[k + 2].1[i])
                / (12.0 * dt);
            worst = worst.max((d - f[i]).abs());
        }
        k += stride;
    }
    worst
}

/// All planar P-symmetric characteristics of the ellipsoid E(r) with action
/// at most `action_bound`, in closed form.  Axis j in the first group
/// carries periods (2m+1) pi r_j^2; axes in the second group 2m pi r_j^2.
pub fn ellipsoid_characteristics(
    r: &Radii,
    sym: &PSymmetry,
    action_bound: f64,
) -> Vec<Characteristic> {
    let n = r.n();
    let gauge = GaugeModel::ellipsoid(r);
    let mut out = Vec::new();
    for axis in 0..n {
        let base = PI * r.square(axis);
        let odd_family = axis < sym.first_group();
        let mut m = 0u64;
        loop {
            let period = if odd_family {
                (2 * m + 1) as f64 * base
            } else {
                (2 * (m + 1)) as f64 * base
            };
            if period > action_bound * (1.0 + 1e-12) {
                break;
            }
            out.push(analytic_planar(r, &gauge, sym, axis, period, odd_family));
            m += 1;
        }
    }
    out.sort_by(|a, b| a.action.total_cmp(&b.action));
    out
}

/// Sample the analytic planar orbit on one axis: z_axis(t) rotates with
/// angular speed 2 / r_axis^2, all other components zero.
fn analytic_planar(
    r: &Radii,
    gauge: &GaugeModel,
    sym: &PSymmetry,
    axis: usize,
    period: f64,
    _odd_family: bool,
) -> Characteristic {
    let n = r.n();
    let omega = 2.0 / r.square(axis);
    let m = 256;
    let samples: Vec<(f64, Vec<f64>)> = (0..m)
        .map(|k| {
            let t = period * k as f64 / m as f64;
            let mut z = vec![0.0; 2 * n];
            let theta = omega * t;
            z[axis] = r.value(axis) * theta.cos();
            z[n + axis] = r.value(axis) * theta.sin();
            (t, z)
        })
        .collect();
    let half = flow_half_image(&samples, period);
    let sym_res = {
        let p_img = sym.apply(&samples[0].1).unwrap();
        half.iter()
            .zip(&p_img)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let drift = samples
        .iter()
        .map(|(_, z)| (gauge.value(z) - 1.0).abs())
        .fold(0.0, f64::max);
    Characteristic {
        period,
        action: period,
        residuals: Residuals {
            ode: analytic_ode_residual(gauge, &samples, axis, omega, n),
            symmetry: sym_res,
            energy_drift: drift,
        },
        samples,
        symmetry: SymmetryKind::PHalfPeriod,
    }
}

fn flow_half_image(samples: &[(f64, Vec<f64>)], period: f64) -> Vec<f64> {
    // z(T/2) from the sampled orbit; T/2 lands exactly on index m/2.
    let m = samples.len();
    debug_assert!((samples[m / 2].0 - period / 2.0).abs() < 1e-9 * period.max(1.0));
    samples[m / 2].1.clone()
}

fn analytic_ode_residual(
    gauge: &GaugeModel,
    samples: &[(f64, Vec<f64>)],
    axis: usize,
    omega: f64,
    n: usize,
) -> f64 {
    samples
        .iter()
        .map(|(_, z)| {
            let f = vector_field(gauge, z);
            let mut worst = 0.0_f64;
            for i in 0..2 * n {
                let exact = if i == axis {
                    -omega * z[n + axis]
                } else if i == n + axis {
                    omega * z[axis]
                } else {
                    0.0
                };
                worst = worst.max((f[i] - exact).abs());
            }
            worst
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy)]
pub struct ShootOptions {
    pub tol: f64,
    pub max_iters: usize,
    /// Integration steps per unit of period during Newton iterations.
    pub coarse_steps_per_unit: f64,
    /// Steps per unit of period for the final assembled trajectory.
    pub fine_steps_per_unit: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        ShootOptions {
            tol: 1e-8,
            max_iters: 60,
            coarse_steps_per_unit: 512.0,
            fine_steps_per_unit: 2048.0,
        }
    }
}

fn steps_for(t: f64, per_unit: f64) -> usize {
    ((per_unit * t.abs()).ceil() as usize).max(64)
}

/// Find a characteristic with z(t + T/2) = P z(t) by Gauss-Newton shooting.
/// Unknowns (z0, T); residuals (Phi_{T/2}(z0) - P z0, H(z0) - 1, phase),
/// where the phase condition <z'(0), z0 - seed> = 0 pins down the time
/// shift along the orbit.
pub fn shoot_p_symmetric(
    h: &GaugeModel,
    sym: &PSymmetry,
    seed_z0: &[f64],
    seed_t: f64,
    opts: &ShootOptions,
) -> Result<Characteristic, SolverError> {
    let dim = seed_z0.len();
    let p_diag: Vec<f64> = (0..dim).map(|i| sym.sign(i)).collect();
    let seed = seed_z0.to_vec();

    let residual = |u: &DVector<f64>, per_unit: f64| -> DVector<f64> {
        let z0 = &u.as_slice()[..dim];
        let t = u[dim];
        let endpoint = flow_endpoint(h, z0, t / 2.0, steps_for(t / 2.0, per_unit));
        let mut f = DVector::zeros(dim + 2);
        for i in 0..dim {
            f[i] = endpoint[i] - p_diag[i] * z0[i];
        }
        f[dim] = h.value(z0) - 1.0;
        let v0 = vector_field(h, z0);
        f[dim + 1] = v0
            .iter()
            .zip(z0.iter().zip(&seed))
            .map(|(v, (a, b))| v * (a - b))
            .sum();
        f
    };

    let mut u = DVector::from_iterator(dim + 1, seed_z0.iter().copied().chain([seed_t]));
    let mut r = residual(&u, opts.coarse_steps_per_unit);
    let mut iters = 0;

    while r.amax() > opts.tol * 0.1 && iters < opts.max_iters {
        if u[dim] <= 0.0 {
            return Err(SolverError::NoConvergence { residual: r.amax(), iters });
        }
        let fd = 1e-7 * (1.0 + u.amax());
        let mut jac = DMatrix::zeros(dim + 2, dim + 1);
        for col in 0..dim + 1 {
            let mut up = u.clone();
            up[col] += fd;
            let rp = residual(&up, opts.coarse_steps_per_unit);
            for row in 0..dim + 2 {
                jac[(row, col)] = (rp[row] - r[row]) / fd;
            }
        }
        let svd = jac.svd(true, true);
        let max_sv = svd.singular_values.amax();
        if max_sv == 0.0 {
            return Err(SolverError::SingularJacobian);
        }
        let delta = svd
            .solve(&r, 1e-12 * max_sv)
            .map_err(|_| SolverError::SingularJacobian)?;
        let mut step = 1.0;
        let mut advanced = false;
        for _ in 0..25 {
            let trial = &u - step * &delta;
            let rt = residual(&trial, opts.coarse_steps_per_unit);
            if rt.norm() < r.norm() * (1.0 - 1e-4 * step) || rt.amax() <= opts.tol * 0.1 {
                u = trial;
                r = rt;
                advanced = true;
                break;
            }
            step *= 0.5;
        }
        iters += 1;
        if !advanced {
            break;
        }
    }

    if r.amax() > opts.tol {
        return Err(SolverError::NoConvergence { residual: r.amax(), iters });
    }

    assemble_p_symmetric(h, sym, &u.as_slice()[..dim], u[dim], opts)
}

fn assemble_p_symmetric(
    h: &GaugeModel,
    sym: &PSymmetry,
    z0: &[f64],
    period: f64,
    opts: &ShootOptions,
) -> Result<Characteristic, SolverError> {
    let steps = steps_for(period / 2.0, opts.fine_steps_per_unit);
    let traj = integrate_hamiltonian(h, z0, period / 2.0, steps, Integrator::Rk4)?;
    let half_dt = period / 2.0 / steps as f64;
    let mut samples: Vec<(f64, Vec<f64>)> = traj
        .iter()
        .enumerate()
        .take(steps)
        .map(|(k, z)| (k as f64 * half_dt, z.clone()))
        .collect();
    // Second half by the half-period twist.
    for k in 0..steps {
        let t = period / 2.0 + k as f64 * half_dt;
        samples.push((t, sym.apply(&traj[k]).unwrap()));
    }
    let endpoint = &traj[steps];
    let p_z0 = sym.apply(z0).unwrap();
    let sym_res = endpoint
        .iter()
        .zip(&p_z0)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let drift = traj
        .iter()
        .map(|z| (h.value(z) - 1.0).abs())
        .fold(0.0, f64::max);
    let action = action_from_samples(h, &samples, period);
    Ok(Characteristic {
        period,
        action,
        residuals: Residuals {
            ode: ode_residual(h, &samples, steps),
            symmetry: sym_res,
            energy_drift: drift,
        },
        samples,
        symmetry: SymmetryKind::PHalfPeriod,
    })
}

/// Find a brake characteristic z(T - t) = tau0 z(t): unknowns are the real
/// starting point x in R^n and T; residuals are the y-components of the
/// half-period endpoint and the energy constraint.
pub fn shoot_brake(
    h: &GaugeModel,
    seed_z0: &[f64],
    seed_t: f64,
    opts: &ShootOptions,
) -> Result<Characteristic, SolverError> {
    let dim = seed_z0.len();
    let n = dim / 2;
    let max_y = seed_z0[n..].iter().map(|v| v.abs()).fold(0.0, f64::max);
    if max_y > 1e-12 {
        return Err(SolverError::SeedNotOnRealPart { max_y });
    }

    let residual = |u: &DVector<f64>| -> DVector<f64> {
        let mut z0 = vec![0.0; dim];
        z0[..n].copy_from_slice(&u.as_slice()[..n]);
        let t = u[n];
        let endpoint = flow_endpoint(h, &z0, t / 2.0, steps_for(t / 2.0, opts.coarse_steps_per_unit));
        let mut f = DVector::zeros(n + 1);
        for i in 0..n {
            f[i] = endpoint[n + i];
        }
        f[n] = h.value(&z0) - 1.0;
        f
    };

    let mut u = DVector::from_iterator(n + 1, seed_z0[..n].iter().copied().chain([seed_t]));
    let mut r = residual(&u);
    let mut iters = 0;

    while r.amax() > opts.tol * 0.1 && iters < opts.max_iters {
        if u[n] <= 0.0 {
            return Err(SolverError::NoConvergence { residual: r.amax(), iters });
        }
        let fd = 1e-7 * (1.0 + u.amax());
        let mut jac = DMatrix::zeros(n + 1, n + 1);
        for col in 0..n + 1 {
            let mut up = u.clone();
            up[col] += fd;
            let rp = residual(&up);
            for row in 0..n + 1 {
                jac[(row, col)] = (rp[row] - r[row]) / fd;
            }
        }
        let svd = jac.svd(true, true);
        let max_sv = svd.singular_values.amax();
        if max_sv == 0.0 {
            return Err(SolverError::SingularJacobian);
        }
        let delta = svd
            .solve(&r, 1e-10 * max_sv)
            .map_err(|_| SolverError::SingularJacobian)?;
        let mut step = 1.0;
        let mut advanced = false;
        for _ in 0..25 {
            let trial = &u - step * &delta;
            let rt = residual(&trial);
            if rt.norm() < r.norm() * (1.0 - 1e-4 * step) || rt.amax() <= opts.tol * 0.1 {
                u = trial;
                r = rt;
                advanced = true;
                break;
            }
            step *= 0.5;
        }
        iters += 1;
        if !advanced {
            break;
        }
    }

    if r.amax() > opts.tol {
        return Err(SolverError::NoConvergence { residual: r.amax(), iters });
    }

    let mut z0 = vec![0.0; dim];
    z0[..n].copy_from_slice(&u.as_slice()[..n]);
    assemble_brake(h, &z0, u[n], opts)
}

fn assemble_brake(
    h: &GaugeModel,
    z0: &[f64],
    period: f64,
    opts: &ShootOptions,
) -> Result<Characteristic, SolverError> {
    let dim = z0.len();
    let n = dim / 2;
    let steps = steps_for(period / 2.0, opts.fine_steps_per_unit);
    let traj = integrate_hamiltonian(h, z0, period / 2.0, steps, Integrator::Rk4)?;
    let half_dt = period / 2.0 / steps as f64;
    let mut samples: Vec<(f64, Vec<f64>)> = traj
        .iter()
        .enumerate()
        .take(steps)
        .map(|(k, z)| (k as f64 * half_dt, z.clone()))
        .collect();
    // z(T - t) = tau0 z(t): traverse the tau0-image of the half backwards.
    for k in 0..steps {
        let t = period / 2.0 + k as f64 * half_dt;
        let src = &traj[steps - k];
        let mut img = src.clone();
        for i in 0..n {
            img[n + i] = -img[n + i];
        }
        samples.push((t, img));
    }
    let endpoint = &traj[steps];
    let boundary = |z: &[f64]| z[n..].iter().map(|v| v.abs()).fold(0.0, f64::max);
    let sym_res = boundary(z0).max(boundary(endpoint));
    let drift = traj
        .iter()
        .map(|z| (h.value(z) - 1.0).abs())
        .fold(0.0, f64::max);
    let action = action_from_samples(h, &samples, period);
    Ok(Characteristic {
        period,
        action,
        residuals: Residuals {
            ode: ode_residual(h, &samples, steps),
            symmetry: sym_res,
            energy_drift: drift,
        },
        samples,
        symmetry: SymmetryKind::Brake,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct SurveyBudget {
    /// Trial periods above this bound are not seeded.
    pub action_bound: f64,
    pub shoot: ShootOptions,
}

impl Default for SurveyBudget {
    fn default() -> Self {
        SurveyBudget {
            action_bound: 8.0 * PI,
            shoot: ShootOptions::default(),
        }
    }
}

#[derive(Debug)]
pub struct SurveyResult {
    /// Minimal action found; +infinity when nothing converged.  This is an
    /// upper estimate of the spectrum minimum, with no global guarantee.
    pub estimate: f64,
    pub found: Vec<Characteristic>,
}

/// Per-axis scale estimates s_i = 1 / q(e_i): for the ellipsoid gauge this
/// recovers r_i^2, the planar period unit up to pi.
fn axis_scales(h: &GaugeModel, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let mut e = vec![0.0; 2 * n];
            e[i] = 1.0;
            1.0 / h.value(&e)
        })
        .collect()
}

/// Multistart upper estimate of the minimal P-symmetric action: axis-biased
/// seeds on the level set with a parity-separated ladder of trial periods.
pub fn min_action_survey(
    h: &GaugeModel,
    sym: &PSymmetry,
    starts: usize,
    budget: &SurveyBudget,
) -> SurveyResult {
    let n = sym.n();
    let scales = axis_scales(h, n);
    // (axis, trial period) ladder: odd multiples of pi s_i for the first
    // group, even multiples for the second.
    let mut ladder: Vec<(usize, f64)> = Vec::new();
    for (i, &s) in scales.iter().enumerate() {
        let base = PI * s;
        let mut m = 0u64;
        loop {
            let t = if i < sym.first_group() {
                (2 * m + 1) as f64 * base
            } else {
                (2 * (m + 1)) as f64 * base
            };
            if t > budget.action_bound {
                break;
            }
            ladder.push((i, t));
            m += 1;
        }
    }
    if ladder.is_empty() {
        return SurveyResult { estimate: f64::INFINITY, found: Vec::new() };
    }
    ladder.sort_by(|a, b| a.1.total_cmp(&b.1));

    let mut rng = ChaCha8Rng::seed_from_u64(0x53594d43);
    let mut found: Vec<Characteristic> = Vec::new();
    for start in 0..starts {
        let (axis, t) = ladder[start % ladder.len()];
        let jitter = 0.05 * (start / ladder.len()) as f64;
        let mut z0 = vec![0.0; 2 * n];
        z0[axis] = 1.0;
        for v in z0.iter_mut() {
            *v += jitter * rng.gen_range(-1.0..1.0);
        }
        let z0 = h.normalize(&z0);
        let t_seed = t * (1.0 + 0.02 * jitter * rng.gen_range(-1.0..1.0));
        if let Ok(ch) = shoot_p_symmetric(h, sym, &z0, t_seed, &budget.shoot) {
            if ch.action > 1e-9 {
                merge_found(&mut found, ch);
            }
        }
    }
    found.sort_by(|a, b| a.action.total_cmp(&b.action));
    let estimate = found.first().map(|c| c.action).unwrap_or(f64::INFINITY);
    SurveyResult { estimate, found }
}

/// Multistart brake-orbit survey over real-part axis seeds; returns the
/// minimal brake action found.
pub fn min_brake_action_survey(
    h: &GaugeModel,
    n: usize,
    starts: usize,
    budget: &SurveyBudget,
) -> SurveyResult {
    let scales = axis_scales(h, n);
    let mut ladder: Vec<(usize, f64)> = Vec::new();
    for (i, &s) in scales.iter().enumerate() {
        let base = PI * s;
        let mut m = 1u64;
        while m as f64 * base <= budget.action_bound {
            ladder.push((i, m as f64 * base));
            m += 1;
        }
    }
    if ladder.is_empty() {
        return SurveyResult { estimate: f64::INFINITY, found: Vec::new() };
    }
    ladder.sort_by(|a, b| a.1.total_cmp(&b.1));

    let mut rng = ChaCha8Rng::seed_from_u64(0x42524b45);
    let mut found: Vec<Characteristic> = Vec::new();
    for start in 0..starts {
        let (axis, t) = ladder[start % ladder.len()];
        let jitter = 0.05 * (start / ladder.len()) as f64;
        let mut z0 = vec![0.0; 2 * n];
        z0[axis] = 1.0;
        for v in z0[..n].iter_mut() {
            *v += jitter * rng.gen_range(-1.0..1.0);
        }
        let z0 = h.normalize(&z0);
        if let Ok(ch) = shoot_brake(h, &z0, t, &budget.shoot) {
            if ch.action > 1e-9 {
                merge_found(&mut found, ch);
            }
        }
    }
    found.sort_by(|a, b| a.action.total_cmp(&b.action));
    let estimate = found.first().map(|c| c.action).unwrap_or(f64::INFINITY);
    SurveyResult { estimate, found }
}

fn merge_found(found: &mut Vec<Characteristic>, ch: Characteristic) {
    let dup = found
        .iter()
        .any(|c| (c.action - ch.action).abs() <= 1e-7 * ch.action.max(1.0));
    if !dup {
        found.push(ch);
    }
}
