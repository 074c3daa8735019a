//! Closed-form classical helix in a uniform magnetic field and its
//! invariants. This is the benchmark the Lorentz-force oracle integrator is
//! checked against; nothing here integrates anything.

use crate::constants::{FieldScales, ParticleSpecies, C, HBAR};
use crate::error::{Error, Result};

/// Phase-space point of a point particle. Velocities are in units of c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalState {
    /// Position (m).
    pub position: [f64; 3],
    /// Velocity (c units); |velocity| < 1.
    pub velocity: [f64; 3],
    /// Time (s).
    pub time: f64,
}

impl ClassicalState {
    pub fn new(position: [f64; 3], velocity: [f64; 3], time: f64) -> Result<Self> {
        let v2: f64 = velocity.iter().map(|u| u * u).sum();
        if v2 >= 1.0 {
            return Err(Error::NonPhysical(format!(
                "|u| = {} c, must be < 1",
                v2.sqrt()
            )));
        }
        Ok(ClassicalState {
            position,
            velocity,
            time,
        })
    }
}

/// Conserved quantities of the helical orbit.
///
/// `action`, `lz_intrinsic` and `lz_canonical_intrinsic` are in units of
/// hbar and signed: for H along +z their signs follow the charge sign, with
/// L_z^can(int) = L_z^int / 2 = -I exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitInvariants {
    /// Adiabatic invariant I = p_perp^2 / (2 q H) (hbar).
    pub action: f64,
    /// Magnetic flux through the cyclotron circle (T m^2), positive.
    pub flux: f64,
    /// Intrinsic kinetic angular momentum, -2I (hbar).
    pub lz_intrinsic: f64,
    /// Intrinsic canonical angular momentum, -I (hbar).
    pub lz_canonical_intrinsic: f64,
    /// Signed cyclotron radius p_perp/(q H) (m).
    pub rho_c: f64,
}

/// Evaluate the helix at time `t` (closed form, no integration).
pub fn classical_orbit(
    init: &ClassicalState,
    species: &ParticleSpecies,
    h_tesla: f64,
    t: f64,
) -> Result<ClassicalState> {
    let scales = FieldScales::for_field(species, h_tesla)?;
    let wc = scales.omega_c;
    let [ux0, uy0, uz] = init.velocity;
    let uperp = (ux0 * ux0 + uy0 * uy0).sqrt();

    // u_x = u_perp cos(w t + a), u_y = -u_perp sin(w t + a); the guiding
    // center is fixed by the initial position.
    let phase0 = (-uy0).atan2(ux0);
    let phase = wc * t + phase0;
    let rho_c = uperp * C / wc; // signed
    let center_x = init.position[0] - rho_c * phase0.sin();
    let center_y = init.position[1] - rho_c * phase0.cos();

    Ok(ClassicalState {
        position: [
            center_x + rho_c * phase.sin(),
            center_y + rho_c * phase.cos(),
            init.position[2] + uz * C * t,
        ],
        velocity: [uperp * phase.cos(), -uperp * phase.sin(), uz],
        time: init.time + t,
    })
}

/// Invariants of the orbit through `init`.
pub fn orbit_invariants(
    init: &ClassicalState,
    species: &ParticleSpecies,
    h_tesla: f64,
) -> Result<OrbitInvariants> {
    FieldScales::for_field(species, h_tesla)?;
    let [ux, uy, _] = init.velocity;
    let uperp2 = ux * ux + uy * uy;
    let p_perp = species.mass_kg() * uperp2.sqrt() * C; // kg m/s (non-relativistic transverse)
    let q = species.charge();
    let action = p_perp * p_perp / (2.0 * q * h_tesla * HBAR);
    let rho_c = p_perp / (q * h_tesla);
    let flux = std::f64::consts::PI * rho_c * rho_c * h_tesla;
    Ok(OrbitInvariants {
        action,
        flux,
        lz_intrinsic: -2.0 * action,
        lz_canonical_intrinsic: -action,
        rho_c,
    })
}
