//! Particle species data, natural-unit conversions, and the field/frequency
//! scales the transport modules consume.
//!
//! All public interfaces take SI (T, m, s, eV). Internally the dynamics
//! modules work with dimensionless ratios (t/T_c, rho/lambda_c, H/H_c, u/c)
//! so that doubles stay well conditioned across the ~13 orders of magnitude
//! separating a Compton time from a lens dwell time.
//!
//! Constant sources: SI-2019 exact values for c, e, h-bar, k_B; CODATA 2018
//! for the particle masses.

use crate::error::{Error, Result};

/// Speed of light (m/s, exact).
pub const C: f64 = 299_792_458.0;
/// Reduced Planck constant (J s, exact since SI-2019).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge (C, exact).
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Boltzmann constant (J/K, exact).
pub const K_BOLTZMANN: f64 = 1.380_649e-23;

/// Electron mass (eV/c^2), CODATA 2018.
pub const ELECTRON_MASS_EV: f64 = 510_998.950_00;
/// Proton mass (eV/c^2), CODATA 2018.
pub const PROTON_MASS_EV: f64 = 938_272_088.16;
/// H- ion mass (eV/c^2): proton plus two electrons; the ~0.75 eV binding
/// energy is far below the precision anything here needs.
pub const HMINUS_MASS_EV: f64 = PROTON_MASS_EV + 2.0 * ELECTRON_MASS_EV;

/// A charged particle species with its derived Compton-scale quantities.
///
/// Immutable after construction; everything downstream (cyclotron
/// frequencies, magnetic lengths, emittance floors) is fixed by `mass_ev`
/// and `charge_number`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSpecies {
    pub name: String,
    /// Rest mass (eV/c^2).
    pub mass_ev: f64,
    /// Signed charge number Z (electron = -1).
    pub charge_number: i32,
    /// Reduced Compton wavelength lambda_c = hbar/(m c) (m).
    pub compton_wavelength: f64,
    /// Critical (Schwinger-type) field H_c = m^2 c^2/(|Z| e hbar) (T).
    pub critical_field: f64,
    /// Compton time t_c = lambda_c/c (s).
    pub compton_time: f64,
}

impl ParticleSpecies {
    /// Build a species from a rest mass in eV and a signed charge number.
    pub fn from_mass_z(name: &str, mass_ev: f64, charge_number: i32) -> Result<Self> {
        if mass_ev <= 0.0 {
            return Err(Error::NonPositive {
                name: "mass",
                value: mass_ev,
            });
        }
        if charge_number == 0 {
            return Err(Error::NonPhysical(
                "charge number must be nonzero for a transportable species".into(),
            ));
        }
        let mass_kg = mass_ev * E_CHARGE / (C * C);
        let compton_wavelength = HBAR / (mass_kg * C);
        let critical_field =
            mass_kg * mass_kg * C * C / (charge_number.unsigned_abs() as f64 * E_CHARGE * HBAR);
        Ok(ParticleSpecies {
            name: name.to_string(),
            mass_ev,
            charge_number,
            compton_wavelength,
            critical_field,
            compton_time: compton_wavelength / C,
        })
    }

    /// Look up a built-in species by name.
    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "electron" | "e-" => Self::from_mass_z("electron", ELECTRON_MASS_EV, -1),
            "positron" | "e+" => Self::from_mass_z("positron", ELECTRON_MASS_EV, 1),
            "proton" | "p" => Self::from_mass_z("proton", PROTON_MASS_EV, 1),
            "hminus" | "h-" => Self::from_mass_z("hminus", HMINUS_MASS_EV, -1),
            other => Err(Error::UnknownSpecies(other.to_string())),
        }
    }

    /// Rest mass in kg.
    pub fn mass_kg(&self) -> f64 {
        self.mass_ev * E_CHARGE / (C * C)
    }

    /// sgn(q): the sign of the particle's charge.
    pub fn charge_sign(&self) -> f64 {
        if self.charge_number < 0 {
            -1.0
        } else {
            1.0
        }
    }

    /// Signed charge q = Z e (C).
    pub fn charge(&self) -> f64 {
        self.charge_number as f64 * E_CHARGE
    }
}

/// Field-dependent frequency and length scales for one species in a uniform
/// magnetic field of magnitude `h_tesla` along +z. The direction sign is
/// carried separately by callers that allow signed fields (the source
/// calculators); here H > 0 throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldScales {
    /// Signed cyclotron frequency omega_c = Z e H / m (rad/s).
    pub omega_c: f64,
    /// Signed Larmor frequency omega_L = omega_c / 2 (rad/s).
    pub omega_l: f64,
    /// Cyclotron period T_c = 2 pi / |omega_c| (s).
    pub period: f64,
    /// Magnetic length rho_H = 2 lambda_c sqrt(H_c/H) = sqrt(4 hbar/(|Z| e H)) (m).
    pub rho_h: f64,
}

impl FieldScales {
    pub fn for_field(species: &ParticleSpecies, h_tesla: f64) -> Result<Self> {
        if h_tesla <= 0.0 {
            return Err(Error::NonPositive {
                name: "H",
                value: h_tesla,
            });
        }
        let omega_c = species.charge() * h_tesla / species.mass_kg();
        let rho_h = (4.0 * HBAR
            / (species.charge_number.unsigned_abs() as f64 * E_CHARGE * h_tesla))
            .sqrt();
        Ok(FieldScales {
            omega_c,
            omega_l: omega_c / 2.0,
            period: std::f64::consts::TAU / omega_c.abs(),
            rho_h,
        })
    }
}

/// Gamma(k/2) for positive half-integer or integer arguments, by direct
/// recurrence from Gamma(1/2) = sqrt(pi) and Gamma(1) = 1. Covers every
/// normalization constant in the packet catalog without pulling in a full
/// lgamma implementation (arguments stay far below the f64 overflow point
/// for any usable quantum number).
pub(crate) fn gamma_half(twice_arg: u32) -> f64 {
    debug_assert!(twice_arg >= 1);
    let mut value = if twice_arg % 2 == 0 {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    let mut k = if twice_arg % 2 == 0 { 2 } else { 1 };
    while k + 2 <= twice_arg {
        value *= k as f64 / 2.0;
        k += 2;
    }
    value
}

/// n! as f64.
pub(crate) fn factorial(n: u32) -> f64 {
    gamma_half(2 * (n + 1))
}
