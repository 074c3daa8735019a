//! Fixed-step classic RK4 integration of the second-moment equations and
//! of the Lorentz force. Fixed step, fixed order: identical inputs give
//! bit-identical trajectories, which the golden-file tests rely on.

use crate::classical::ClassicalState;
use crate::constants::{ParticleSpecies, C, HBAR};
use crate::error::{Error, Result};

/// Right-hand side of the coupled moment system
///   d r2 / dt   = v
///   d v / dt    = 2 u2 + ell_term - r2 (omega_c^2 - 2 e_term)
///   d u2 / dt   = e_term v
/// in SI units (r2 m^2, u2 m^2/s^2). Covers the free packet
/// (omega_c = e_term = 0), the solenoid (e_term = 0), the electrostatic
/// lens (omega_c = 0) and the crossed lens.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSystem {
    /// Signed cyclotron frequency (rad/s).
    pub omega_c: f64,
    /// q E'_rho / m (1/s^2).
    pub e_term: f64,
    /// 2 omega_c l hbar / m (m^2/s^2).
    pub ell_term: f64,
}

impl MomentSystem {
    pub fn free() -> Self {
        MomentSystem {
            omega_c: 0.0,
            e_term: 0.0,
            ell_term: 0.0,
        }
    }

    pub fn solenoid(species: &ParticleSpecies, h_signed: f64, ell: f64) -> Self {
        let mass = species.mass_kg();
        let omega_c = species.charge() * h_signed / mass;
        MomentSystem {
            omega_c,
            e_term: 0.0,
            ell_term: 2.0 * omega_c * ell * HBAR / mass,
        }
    }

    pub fn electrostatic(species: &ParticleSpecies, e_rho_prime: f64) -> Self {
        MomentSystem {
            omega_c: 0.0,
            e_term: species.charge() * e_rho_prime / species.mass_kg(),
            ell_term: 0.0,
        }
    }

    pub fn crossed(species: &ParticleSpecies, h_signed: f64, e_rho_prime: f64, ell: f64) -> Self {
        let mass = species.mass_kg();
        let omega_c = species.charge() * h_signed / mass;
        MomentSystem {
            omega_c,
            e_term: species.charge() * e_rho_prime / mass,
            ell_term: 2.0 * omega_c * ell * HBAR / mass,
        }
    }

    fn rhs(&self, y: [f64; 3]) -> [f64; 3] {
        let [r2, v, u2] = y;
        [
            v,
            2.0 * u2 + self.ell_term - r2 * (self.omega_c * self.omega_c - 2.0 * self.e_term),
            self.e_term * v,
        ]
    }

    /// Characteristic angular frequency for step-size selection.
    pub fn frequency_scale(&self) -> f64 {
        (self.omega_c * self.omega_c - 4.0 * self.e_term)
            .abs()
            .sqrt()
    }
}

/// One integration request. `steps` must resolve the motion: at least 200
/// steps per oscillation period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeRun {
    pub t_end: f64,
    pub steps: usize,
}

impl OdeRun {
    /// Validate the step budget against the system's oscillation scale.
    pub fn check(&self, sys: &MomentSystem) -> Result<()> {
        if self.steps == 0 || self.t_end <= 0.0 {
            return Err(Error::NonPositive {
                name: "steps/t_end",
                value: self.t_end,
            });
        }
        let w = sys.frequency_scale();
        if w > 0.0 {
            let per_period = self.steps as f64 / (self.t_end * w / std::f64::consts::TAU);
            if per_period < 200.0 {
                return Err(Error::GridTooCoarse(format!(
                    "{per_period:.0} steps per period, need >= 200"
                )));
            }
        }
        Ok(())
    }
}

/// Integrate the moment system from `y0 = [r2, dr2/dt, u2]`; returns the
/// dense trajectory including both endpoints.
pub fn rk4_moments(sys: &MomentSystem, y0: [f64; 3], run: &OdeRun) -> Result<Vec<(f64, [f64; 3])>> {
    run.check(sys)?;
    let h = run.t_end / run.steps as f64;
    let mut out = Vec::with_capacity(run.steps + 1);
    let mut y = y0;
    let mut t = 0.0;
    out.push((t, y));
    for _ in 0..run.steps {
        y = rk4_step(|yy| sys.rhs(yy), y, h);
        t += h;
        out.push((t, y));
    }
    Ok(out)
}

fn rk4_step<const N: usize>(f: impl Fn([f64; N]) -> [f64; N], y: [f64; N], h: f64) -> [f64; N] {
    let k1 = f(y);
    let k2 = f(add(y, scale(k1, h / 2.0)));
    let k3 = f(add(y, scale(k2, h / 2.0)));
    let k4 = f(add(y, scale(k3, h)));
    let mut out = y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn add<const N: usize>(a: [f64; N], b: [f64; N]) -> [f64; N] {
    let mut out = a;
    for i in 0..N {
        out[i] += b[i];
    }
    out
}

fn scale<const N: usize>(a: [f64; N], s: f64) -> [f64; N] {
    let mut out = a;
    for i in 0..N {
        out[i] *= s;
    }
    out
}

/// RK4 integration of the Lorentz force in a uniform axial field
/// (velocities in c units, positions in m). Step must satisfy
/// step <= T_c / 500.
pub fn lorentz_orbit(
    init: &ClassicalState,
    species: &ParticleSpecies,
    h_tesla: f64,
    t_end: f64,
    step: f64,
) -> Result<Vec<ClassicalState>> {
    if h_tesla <= 0.0 {
        return Err(Error::NonPositive {
            name: "H",
            value: h_tesla,
        });
    }
    let omega_c = species.charge() * h_tesla / species.mass_kg();
    let period = std::f64::consts::TAU / omega_c.abs();
    if step > period / 500.0 {
        return Err(Error::GridTooCoarse(format!(
            "step {step:.3e} s exceeds T_c/500 = {:.3e} s",
            period / 500.0
        )));
    }
    let steps = (t_end / step).ceil() as usize;
    let h = t_end / steps as f64;
    let rhs = |y: [f64; 6]| -> [f64; 6] {
        // y = [x, y, z, ux, uy, uz]; du/dt = omega_c (u x e_z-hat form)
        [
            y[3] * C,
            y[4] * C,
            y[5] * C,
            omega_c * y[4],
            -omega_c * y[3],
            0.0,
        ]
    };
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = [
        init.position[0],
        init.position[1],
        init.position[2],
        init.velocity[0],
        init.velocity[1],
        init.velocity[2],
    ];
    let mut t = init.time;
    out.push(*init);
    for _ in 0..steps {
        y = rk4_step(rhs, y, h);
        t += h;
        out.push(ClassicalState {
            position: [y[0], y[1], y[2]],
            velocity: [y[3], y[4], y[5]],
            time: t,
        });
    }
    Ok(out)
}
