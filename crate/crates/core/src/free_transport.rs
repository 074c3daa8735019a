//! Free-space moment propagation, Courant-Snyder bookkeeping, and the
//! generalized van Cittert-Zernike relation between source and detected
//! rms sizes.

use crate::error::{Error, Result};
use crate::packets::{Moments1D, TransverseMoments};

/// Courant-Snyder (Twiss) parameters of a packet's phase-space ellipse.
/// `beta_hat` is time-like (rest frame): beta_hat = <x^2>_c / (eps c);
/// multiply by the mean velocity for a distance-parameterized beta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwissParams {
    /// alpha = -correlation / eps (dimensionless).
    pub alpha: f64,
    /// beta = spread^2 / (eps c) (s).
    pub beta: f64,
    /// gamma = velocity-spread^2 c / eps (1/s).
    pub gamma: f64,
    /// Normalized emittance (m, velocities in c units).
    pub emittance: f64,
}

impl TwissParams {
    /// beta*gamma - alpha^2, identically 1 for a consistent set.
    pub fn determinant(&self) -> f64 {
        self.beta * self.gamma - self.alpha * self.alpha
    }
}

/// Propagate 1D moments through a field-free interval `dt`.
pub fn free_spread_1d(m0: &Moments1D, dt: f64) -> Moments1D {
    let c = crate::constants::C;
    Moments1D {
        mean_x: m0.mean_x + m0.mean_u * c * dt,
        mean_u: m0.mean_u,
        x2_central: m0.x2_central + 2.0 * m0.xu_central * c * dt + m0.u2_central * (c * dt).powi(2),
        xu_central: m0.xu_central + m0.u2_central * c * dt,
        u2_central: m0.u2_central,
        time: m0.time + dt,
    }
}

/// Propagate transverse moments through a field-free interval `dt`.
/// The centroid drifts ballistically; the canonical OAM is untouched.
pub fn free_spread_transverse(m0: &TransverseMoments, dt: f64) -> TransverseMoments {
    let c = crate::constants::C;
    let r2c = m0.central_rho2()
        + 2.0 * m0.central_rho_u() * c * dt
        + m0.central_uperp2() * (c * dt).powi(2);
    let ruc = m0.central_rho_u() + m0.central_uperp2() * c * dt;
    let centroid = [
        m0.centroid[0] + m0.centroid_velocity[0] * c * dt,
        m0.centroid[1] + m0.centroid_velocity[1] * c * dt,
    ];
    let cv = m0.centroid_velocity;
    let c2 = centroid[0] * centroid[0] + centroid[1] * centroid[1];
    TransverseMoments {
        rho2: r2c + c2,
        rho_u: ruc + centroid[0] * cv[0] + centroid[1] * cv[1],
        uperp2: m0.uperp2,
        centroid,
        centroid_velocity: cv,
        ell: m0.ell,
        time: m0.time + dt,
    }
}

/// Invariant diffraction time t_d = eps_rho / (<u_perp^2> c) (s): the
/// half-width of the rms-size hyperbola, independent of where on it the
/// state currently sits.
pub fn diffraction_time(m: &TransverseMoments) -> Result<f64> {
    let u2 = m.central_uperp2();
    if u2 <= 0.0 {
        return Err(Error::Degenerate("zero transverse velocity spread".into()));
    }
    Ok(m.emittance() / (u2 * crate::constants::C))
}

/// Rayleigh length z_R = beta c t_d for longitudinal velocity `beta`.
pub fn rayleigh_length(m: &TransverseMoments, beta: f64) -> Result<f64> {
    Ok(beta * crate::constants::C * diffraction_time(m)?)
}

pub fn twiss_1d(m: &Moments1D) -> Result<TwissParams> {
    twiss_from(
        m.central_x2(),
        m.central_xu(),
        m.central_u2(),
        m.emittance(),
    )
}

pub fn twiss_transverse(m: &TransverseMoments) -> Result<TwissParams> {
    twiss_from(
        m.central_rho2(),
        m.central_rho_u(),
        m.central_uperp2(),
        m.emittance(),
    )
}

fn twiss_from(spread2: f64, corr: f64, vel2: f64, eps: f64) -> Result<TwissParams> {
    if eps <= 0.0 {
        return Err(Error::Degenerate("zero emittance".into()));
    }
    let c = crate::constants::C;
    Ok(TwissParams {
        alpha: -corr / eps,
        beta: spread2 / (eps * c),
        gamma: vel2 * c / eps,
        emittance: eps,
    })
}

/// Rotate a focused ellipse (alpha = 0) by `delta`:
/// alpha(d) = sin d cos d (1/beta0 - beta0),
/// beta(d)  = cos^2 d beta0 + sin^2 d / beta0,
/// gamma(d) = sin^2 d beta0 + cos^2 d / beta0.
/// The determinant identity holds for every delta.
pub fn twiss_rotate(at_focus: &TwissParams, delta: f64) -> Result<TwissParams> {
    if at_focus.alpha.abs() > 1e-9 {
        return Err(Error::NonPhysical(format!(
            "twiss_rotate needs a focused input (alpha = 0), got alpha = {}",
            at_focus.alpha
        )));
    }
    let b0 = at_focus.beta;
    if b0 <= 0.0 {
        return Err(Error::Degenerate("nonpositive beta function".into()));
    }
    let (s, c) = delta.sin_cos();
    Ok(TwissParams {
        alpha: s * c * (1.0 / b0 - b0),
        beta: c * c * b0 + s * s / b0,
        gamma: s * s * b0 + c * c / b0,
        emittance: at_focus.emittance,
    })
}

// ---------------------------------------------------------------------------
// Generalized van Cittert-Zernike
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VczDirection {
    /// Given the detected rms, infer the source rms.
    SourceFromDetected,
    /// Given the source rms, predict the detected rms.
    DetectedFromSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VczRegime {
    /// Far field: sqrt<rho^2>(z) = z lambda_dB M / (2 pi sqrt<rho^2>(0)).
    FarField,
    /// Fresnel zone: the full spreading hyperbola, whose leading correction
    /// to the far-field relation is the quadratic (z_R/z)^2/2 term.
    Fresnel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VczResult {
    /// Source rms radius sqrt<rho^2>(0) (m).
    pub source_rms: f64,
    /// Detected rms radius sqrt<rho^2>(z) (m).
    pub detected_rms: f64,
    /// Source-detector distance (m).
    pub distance: f64,
    /// de Broglie wavelength (m).
    pub de_broglie: f64,
    /// Quality factor M >= 1.
    pub m_factor: f64,
    pub regime: VczRegime,
    /// Rayleigh length 2 pi <rho^2>(0) / (M lambda_dB) (m).
    pub rayleigh: f64,
    /// Whether the far-field condition z >> z_R holds (z >= 10 z_R here).
    pub far_field_ok: bool,
    /// Classic-theorem variables: transverse coherence length
    /// sqrt(2) detected rms and effective source radius sqrt(2) source rms.
    pub coherence_length: f64,
    pub effective_source_radius: f64,
    /// Second positive root of the Fresnel inversion, when one exists. The
    /// canonical root is the far-field-connected (smaller) one; a state on
    /// the near side of its waist would instead satisfy the larger root.
    pub alt_source_rms: Option<f64>,
}

/// Relate source and detected rms sizes across `distance`.
pub fn vcz(
    distance: f64,
    de_broglie: f64,
    known_rms: f64,
    m_factor: f64,
    direction: VczDirection,
    regime: VczRegime,
) -> Result<VczResult> {
    for (name, v) in [
        ("distance", distance),
        ("de_broglie", de_broglie),
        ("rms", known_rms),
    ] {
        if v <= 0.0 {
            return Err(Error::NonPositive { name, value: v });
        }
    }
    if m_factor < 1.0 {
        return Err(Error::NonPhysical(format!("M = {m_factor} < 1")));
    }
    // K = z lambda_dB M / (2 pi): geometric mean of source and detected
    // <rho^2> in the far field.
    let k = distance * de_broglie * m_factor / std::f64::consts::TAU;
    let mut alt = None;
    let (r0, rz) = match (direction, regime) {
        (VczDirection::DetectedFromSource, VczRegime::FarField) => {
            (known_rms * known_rms, k * k / (known_rms * known_rms))
        }
        (VczDirection::SourceFromDetected, VczRegime::FarField) => {
            (k * k / (known_rms * known_rms), known_rms * known_rms)
        }
        (VczDirection::DetectedFromSource, VczRegime::Fresnel) => {
            let r0 = known_rms * known_rms;
            (r0, r0 + k * k / r0)
        }
        (VczDirection::SourceFromDetected, VczRegime::Fresnel) => {
            // rho2(z) = rho2(0) + K^2/rho2(0) is quadratic in rho2(0).
            let rz = known_rms * known_rms;
            let disc = rz * rz - 4.0 * k * k;
            if disc < 0.0 {
                return Err(Error::NonPhysical(format!(
                    "detected rms {known_rms:.3e} m is below the minimum 2K = {:.3e} m^2 \
                     reachable at this distance; no real source size",
                    2.0 * k
                )));
            }
            let root = disc.sqrt();
            let small = 0.5 * (rz - root);
            let large = 0.5 * (rz + root);
            if disc > 0.0 {
                alt = Some(large.sqrt());
            }
            (small, rz)
        }
    };
    let rayleigh = std::f64::consts::TAU * r0 / (m_factor * de_broglie);
    Ok(VczResult {
        source_rms: r0.sqrt(),
        detected_rms: rz.sqrt(),
        distance,
        de_broglie,
        m_factor,
        regime,
        rayleigh,
        far_field_ok: distance >= 10.0 * rayleigh,
        coherence_length: std::f64::consts::SQRT_2 * rz.sqrt(),
        effective_source_radius: std::f64::consts::SQRT_2 * r0.sqrt(),
        alt_source_rms: alt,
    })
}
