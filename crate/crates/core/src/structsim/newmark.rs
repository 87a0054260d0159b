//! Newmark average-acceleration integration (gamma = 1/2, beta = 1/4) for a
//! linear single-mass oscillator and for the hysteretic shear building.

use alloc::vec;
use alloc::vec::Vec;

use super::hysteresis::{BilinearSpring, SpringState};
use super::EdpPair;
use crate::linalg::solve_tridiagonal;
use crate::{Error, Result};

const GAMMA: f64 = 0.5;
const BETA: f64 = 0.25;
const NEWTON_TOL: f64 = 1e-8;
const NEWTON_MAX_ITER: usize = 30;
/// Roof displacement beyond this multiple of the building height is collapse.
pub const COLLAPSE_HEIGHT_FACTOR: f64 = 1e3;

/// Peak relative displacement of a linear oscillator of the given period and
/// damping ratio under base acceleration `accel` (zero initial conditions).
pub fn sdof_peak_displacement(accel: &[f64], dt: f64, period: f64, damping: f64) -> f64 {
    let mut peak = 0.0f64;
    sdof_response(accel, dt, period, damping, |u| peak = peak.max(libm::fabs(u)));
    peak
}

/// Drives a linear oscillator `u'' + 2 zeta w u' + w^2 u = -a_g` and feeds
/// each displacement (including the initial zero) to `visit`.
pub fn sdof_response(accel: &[f64], dt: f64, period: f64, damping: f64, mut visit: impl FnMut(f64)) {
    let w = 2.0 * core::f64::consts::PI / period;
    let k = w * w;
    let c = 2.0 * damping * w;
    let (mut u, mut v) = (0.0, 0.0);
    let Some(&a_first) = accel.first() else {
        return;
    };
    let mut a = -a_first;
    visit(u);
    let k_eff = k + GAMMA / (BETA * dt) * c + 1.0 / (BETA * dt * dt);
    for &ag in &accel[1..] {
        let p = -ag
            + (u / (BETA * dt * dt) + v / (BETA * dt) + (0.5 / BETA - 1.0) * a)
            + c * (GAMMA / (BETA * dt) * u + (GAMMA / BETA - 1.0) * v + dt * (0.5 * GAMMA / BETA - 1.0) * a);
        let u_new = p / k_eff;
        let a_new = (u_new - u) / (BETA * dt * dt) - v / (BETA * dt) - (0.5 / BETA - 1.0) * a;
        let v_new = v + dt * ((1.0 - GAMMA) * a + GAMMA * a_new);
        u = u_new;
        v = v_new;
        a = a_new;
        visit(u);
    }
}

/// Which stiffness the stiffness-proportional damping term multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DampingStiffness {
    /// Tangent stiffness of the last converged step.
    #[default]
    Tangent,
    Initial,
}

/// Assembled shear building: lumped floor masses, one bilinear spring per
/// story, Rayleigh damping `C = a0 M + a1 K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShearBuilding {
    pub masses: Vec<f64>,
    pub springs: Vec<BilinearSpring>,
    pub rayleigh_mass: f64,
    pub rayleigh_stiffness: f64,
    pub damping_stiffness: DampingStiffness,
    pub height: f64,
}

#[derive(Debug, Clone, Default)]
pub struct IntegrationOptions {
    /// Floor displacements at t = 0 (relative to the ground).
    pub initial_displacement: Option<Vec<f64>>,
    pub record_history: bool,
}

/// Per-step traces, recorded on request.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct History {
    pub roof_displacement: Vec<f64>,
    pub base_shear: Vec<f64>,
    /// Work done by the effective earthquake force on the relative motion.
    pub input_energy: Vec<f64>,
    pub kinetic_energy: Vec<f64>,
    pub damping_energy: Vec<f64>,
    /// Work absorbed by the story springs (elastic plus hysteretic).
    pub absorbed_energy: Vec<f64>,
    /// Elastic energy held in the springs at the committed forces.
    pub recoverable_energy: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub edp: EdpPair,
    pub yielded: bool,
    pub max_newton_iterations: usize,
    pub history: Option<History>,
}

struct Tridiag {
    sub: Vec<f64>,
    diag: Vec<f64>,
}

impl Tridiag {
    /// Shear-building pattern from per-story coefficients: story k couples
    /// floors k-1 and k.
    fn from_story(coeff: &[f64]) -> Self {
        let n = coeff.len();
        let mut diag = vec![0.0; n];
        let mut sub = vec![0.0; n.saturating_sub(1)];
        for k in 0..n {
            diag[k] += coeff[k];
            if k + 1 < n {
                diag[k] += coeff[k + 1];
                sub[k] = -coeff[k + 1];
            }
        }
        Tridiag { sub, diag }
    }

    fn mul(&self, x: &[f64], out: &mut [f64]) {
        let n = x.len();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.sub[i] * x[i + 1];
            }
            out[i] = s;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(libm::fabs(*x)))
}

impl ShearBuilding {
    pub fn n_dof(&self) -> usize {
        self.masses.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.masses.len();
        if n == 0 || self.springs.len() != n {
            return Err(Error::dims(
                alloc::format!("{n} springs for {n} floors"),
                alloc::format!("{}", self.springs.len()),
            ));
        }
        if self.masses.iter().any(|m| !(*m > 0.0) || !m.is_finite()) {
            return Err(Error::invalid("floor masses must be positive"));
        }
        for s in &self.springs {
            if !(s.k0 > 0.0) || !s.k0.is_finite() || !(s.fy > 0.0) || !(0.0..1.0).contains(&s.alpha) {
                return Err(Error::invalid(alloc::format!("invalid story spring {s:?}")));
            }
        }
        if !(self.rayleigh_mass >= 0.0) || !(self.rayleigh_stiffness >= 0.0) {
            return Err(Error::invalid("Rayleigh coefficients must be non-negative"));
        }
        Ok(())
    }

    /// Story restoring forces and tangents at floor displacements `u`.
    fn story_forces(&self, states: &[SpringState], u: &[f64], force: &mut [f64], tangent: &mut [f64]) -> bool {
        let mut any_yield = false;
        for k in 0..u.len() {
            let drift = u[k] - if k > 0 { u[k - 1] } else { 0.0 };
            let (f, kt, y) = self.springs[k].trial(&states[k], drift);
            force[k] = f;
            tangent[k] = kt;
            any_yield |= y;
        }
        any_yield
    }

    fn floor_forces(story: &[f64], out: &mut [f64]) {
        let n = story.len();
        for k in 0..n {
            out[k] = story[k] - if k + 1 < n { story[k + 1] } else { 0.0 };
        }
    }

    /// Integrates `M u'' + C u' + R(u) = -M 1 a_g(t)` over the record.
    pub fn integrate(&self, accel: &[f64], dt: f64, opts: &IntegrationOptions) -> Result<Response> {
        self.validate()?;
        if !(dt > 0.0) {
            return Err(Error::invalid("time step must be positive"));
        }
        let n = self.n_dof();
        let m = &self.masses;
        let (a0, a1) = (self.rayleigh_mass, self.rayleigh_stiffness);
        let collapse_at = COLLAPSE_HEIGHT_FACTOR * self.height;

        let mut u = match &opts.initial_displacement {
            Some(u0) if u0.len() == n => u0.clone(),
            Some(u0) => {
                return Err(Error::dims(alloc::format!("{n} initial displacements"), alloc::format!("{}", u0.len())))
            }
            None => vec![0.0; n],
        };
        let mut v = vec![0.0; n];
        let mut states = vec![SpringState::default(); n];
        let mut f_story = vec![0.0; n];
        let mut kt_story = vec![0.0; n];
        let mut yielded = self.story_forces(&states, &u, &mut f_story, &mut kt_story);
        for k in 0..n {
            let drift = u[k] - if k > 0 { u[k - 1] } else { 0.0 };
            states[k] = SpringState { drift, force: f_story[k], yielding: kt_story[k] < self.springs[k].k0 };
        }
        let mut r_floor = vec![0.0; n];
        Self::floor_forces(&f_story, &mut r_floor);

        let damping_story = |states: &[SpringState]| -> Vec<f64> {
            states
                .iter()
                .zip(&self.springs)
                .map(|(s, sp)| {
                    a1 * match self.damping_stiffness {
                        DampingStiffness::Tangent => sp.tangent(s),
                        DampingStiffness::Initial => sp.k0,
                    }
                })
                .collect()
        };

        let ag0 = accel.first().copied().unwrap_or(0.0);
        let mut c_story = damping_story(&states);
        let mut c_mat = Tridiag::from_story(&c_story);
        let mut cv = vec![0.0; n];
        c_mat.mul(&v, &mut cv);
        let mut a: Vec<f64> = (0..n)
            .map(|i| (-m[i] * ag0 - a0 * m[i] * v[i] - cv[i] - r_floor[i]) / m[i])
            .collect();

        let base_shear = |f1: f64, c1: f64, v1: f64| libm::fabs(f1 + c1 * v1);
        let mut peak_roof = libm::fabs(u[n - 1]);
        let mut peak_shear = base_shear(f_story[0], c_story[0], v[0]);

        let mut hist = opts.record_history.then(|| {
            let mut h = History::default();
            h.roof_displacement.push(u[n - 1]);
            h.base_shear.push(f_story[0] + c_story[0] * v[0]);
            h.input_energy.push(0.0);
            h.kinetic_energy.push(0.0);
            h.damping_energy.push(0.0);
            h.absorbed_energy.push(0.0);
            h.recoverable_energy
                .push(self.springs.iter().zip(&states).map(|(s, st)| s.recoverable_energy(st)).sum());
            h
        });
        let (mut e_in, mut e_damp, mut e_abs) = (0.0, 0.0, 0.0);

        let c1 = 1.0 / (BETA * dt * dt);
        let c2 = 1.0 / (BETA * dt);
        let c3 = 0.5 / BETA - 1.0;
        let cg = GAMMA / (BETA * dt);

        let mut u_trial = vec![0.0; n];
        let mut a_new = vec![0.0; n];
        let mut v_new = vec![0.0; n];
        let mut r_trial = vec![0.0; n];
        let mut resid = vec![0.0; n];
        let mut jac_sub = vec![0.0; n.saturating_sub(1)];
        let mut jac_diag = vec![0.0; n];
        let mut max_iter = 0usize;

        for (step, &ag) in accel.iter().enumerate().skip(1) {
            let ag_prev = accel[step - 1];
            u_trial.copy_from_slice(&u);
            let mut converged = false;
            let mut last_norm = f64::INFINITY;
            for iter in 0..=NEWTON_MAX_ITER {
                let step_yield = self.story_forces(&states, &u_trial, &mut f_story, &mut kt_story);
                Self::floor_forces(&f_story, &mut r_trial);
                for i in 0..n {
                    a_new[i] = c1 * (u_trial[i] - u[i]) - c2 * v[i] - c3 * a[i];
                    v_new[i] = v[i] + dt * ((1.0 - GAMMA) * a[i] + GAMMA * a_new[i]);
                }
                c_mat.mul(&v_new, &mut cv);
                let mut scale = 0.0f64;
                for i in 0..n {
                    let inertia = m[i] * a_new[i];
                    let damp = a0 * m[i] * v_new[i] + cv[i];
                    let ext = m[i] * ag;
                    resid[i] = inertia + damp + r_trial[i] + ext;
                    scale = scale.max(libm::fabs(inertia)).max(libm::fabs(damp)).max(libm::fabs(r_trial[i])).max(libm::fabs(ext));
                }
                last_norm = inf_norm(&resid);
                if last_norm <= NEWTON_TOL * scale || last_norm == 0.0 {
                    converged = true;
                    yielded |= step_yield;
                    max_iter = max_iter.max(iter);
                    break;
                }
                if iter == NEWTON_MAX_ITER {
                    break;
                }
                let kt_j = Tridiag::from_story(&kt_story);
                for i in 0..n {
                    jac_diag[i] = c1 * m[i] + cg * (a0 * m[i] + c_mat.diag[i]) + kt_j.diag[i];
                    if i + 1 < n {
                        jac_sub[i] = cg * c_mat.sub[i] + kt_j.sub[i];
                    }
                    resid[i] = -resid[i];
                }
                solve_tridiagonal(&jac_sub, &jac_diag, &jac_sub, &mut resid)?;
                for i in 0..n {
                    u_trial[i] += resid[i];
                }
            }
            if !converged {
                return Err(Error::NewtonDivergence { step, residual: last_norm });
            }

            if hist.is_some() {
                // Trapezoidal work increments, consistent with the
                // average-acceleration kinematics.
                let du: Vec<f64> = (0..n).map(|i| u_trial[i] - u[i]).collect();
                let mut cv_old = vec![0.0; n];
                c_mat.mul(&v, &mut cv_old);
                let mut r_old = vec![0.0; n];
                let old_forces: Vec<f64> = states.iter().map(|s| s.force).collect();
                Self::floor_forces(&old_forces, &mut r_old);
                let mass_du: f64 = (0..n).map(|i| m[i] * du[i]).sum();
                e_in += -0.5 * (ag_prev + ag) * mass_du;
                let damp_old: Vec<f64> = (0..n).map(|i| a0 * m[i] * v[i] + cv_old[i]).collect();
                let damp_new: Vec<f64> = (0..n).map(|i| a0 * m[i] * v_new[i] + cv[i]).collect();
                e_damp += 0.5 * (dot(&damp_old, &du) + dot(&damp_new, &du));
                e_abs += 0.5 * (dot(&r_old, &du) + dot(&r_trial, &du));
            }

            for k in 0..n {
                let drift = u_trial[k] - if k > 0 { u_trial[k - 1] } else { 0.0 };
                states[k] = SpringState {
                    drift,
                    force: f_story[k],
                    yielding: kt_story[k] < self.springs[k].k0,
                };
            }
            let shear_now = f_story[0] + c_story[0] * v_new[0];
            u.copy_from_slice(&u_trial);
            v.copy_from_slice(&v_new);
            a.copy_from_slice(&a_new);

            peak_roof = peak_roof.max(libm::fabs(u[n - 1]));
            peak_shear = peak_shear.max(base_shear(f_story[0], c_story[0], v[0]));

            if let Some(h) = hist.as_mut() {
                h.roof_displacement.push(u[n - 1]);
                h.base_shear.push(shear_now);
                h.input_energy.push(e_in);
                h.kinetic_energy.push(0.5 * (0..n).map(|i| m[i] * v[i] * v[i]).sum::<f64>());
                h.damping_energy.push(e_damp);
                h.absorbed_energy.push(e_abs);
                h.recoverable_energy
                    .push(self.springs.iter().zip(&states).map(|(s, st)| s.recoverable_energy(st)).sum());
            }

            if !(libm::fabs(u[n - 1]) <= collapse_at) {
                return Err(Error::Collapse { step, peak_base_shear: peak_shear });
            }

            // Damping for the next step follows the newly committed tangent.
            if self.damping_stiffness == DampingStiffness::Tangent {
                c_story = damping_story(&states);
                c_mat = Tridiag::from_story(&c_story);
            }
        }

        Ok(Response {
            edp: EdpPair {
                max_top_disp: peak_roof,
                max_base_shear: peak_shear,
            },
            yielded,
            max_newton_iterations: max_iter,
            history: hist,
        })
    }
}
