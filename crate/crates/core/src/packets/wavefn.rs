//! Pointwise evaluation of the exact non-stationary wavefunctions.
//!
//! Everything is computed in focal units: xi = x / sigma0, tau = t / t_d,
//! and momenta in units of hbar / sigma0. In these units the free
//! Schroedinger equation reads i d_tau psi = -(1/2) d_xi^2 psi, which is
//! what the oracle's residual check differentiates. SI callers rescale by
//! 1/sqrt(sigma0) per dimension.
//!
//! Branch handling: the elegant-family Hermite/Laguerre arguments carry the
//! complex factor (1 - i tau), whose real part stays positive for all tau,
//! so principal-branch roots are continuous in time.

use num_complex::Complex64;

use crate::constants::{factorial, gamma_half};
use crate::error::{Error, Result};
use crate::packets::{PacketFamily, PacketSpec};

/// Hermite polynomial H_n(z) by upward recurrence (stable for the n <= ~50
/// used here).
pub fn hermite(n: u32, z: Complex64) -> Complex64 {
    let mut h_prev = Complex64::new(1.0, 0.0);
    if n == 0 {
        return h_prev;
    }
    let mut h = 2.0 * z;
    for k in 1..n {
        let next = 2.0 * z * h - 2.0 * k as f64 * h_prev;
        h_prev = h;
        h = next;
    }
    h
}

/// Associated Laguerre polynomial L_n^a(z) by upward recurrence.
pub fn laguerre(n: u32, a: f64, z: Complex64) -> Complex64 {
    let mut l_prev = Complex64::new(1.0, 0.0);
    if n == 0 {
        return l_prev;
    }
    let mut l = Complex64::new(1.0 + a, 0.0) - z;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + a + 1.0 - z) * l - (kf + a) * l_prev) / (kf + 1.0);
        l_prev = l;
        l = next;
    }
    l
}

fn gouy_factor(prefactor: f64, tau: f64) -> Complex64 {
    Complex64::from_polar(1.0, -prefactor * tau.atan())
}

/// Evaluate a 1D family at dimensionless (xi, tau) with dimensionless mean
/// momentum p0 = <p> sigma0 / hbar. Normalized so that the integral of
/// |psi|^2 d xi is 1.
pub fn eval_1d_dimensionless(spec: &PacketSpec, xi: f64, tau: f64, p0: f64) -> Result<Complex64> {
    let n = spec.n;
    let s2 = 1.0 + tau * tau;
    let s = s2.sqrt();
    let xc = xi - p0 * tau;
    let one_minus_itau = Complex64::new(1.0, -tau);
    // exp(i p0 xi - i p0^2 tau / 2 - xc^2 (1 - i tau) / (2 s^2))
    let envelope = (Complex64::i() * (p0 * xi - 0.5 * p0 * p0 * tau)
        - xc * xc / (2.0 * s2) * one_minus_itau)
        .exp();
    let pi_quarter = std::f64::consts::PI.powf(-0.25);
    match spec.family {
        PacketFamily::Gaussian => Ok(pi_quarter / s.sqrt() * gouy_factor(0.5, tau) * envelope),
        PacketFamily::StandardHg => {
            let norm = (2.0f64.powi(n as i32) * factorial(n)).sqrt().recip() * pi_quarter;
            let h = hermite(n, Complex64::new(xc / s, 0.0));
            Ok(norm / s.sqrt() * h * gouy_factor(n as f64 + 0.5, tau) * envelope)
        }
        PacketFamily::ElegantHg => {
            let norm = (2.0f64.powi(n as i32) * gamma_half(2 * n + 1))
                .sqrt()
                .recip();
            let arg = xc * (one_minus_itau / (2.0 * s2)).sqrt();
            let h = hermite(n, arg);
            Ok(norm
                * s2.powf(-0.25 * (n as f64 + 1.0))
                * h
                * gouy_factor(0.5 * (n as f64 + 1.0), tau)
                * envelope)
        }
        _ => Err(Error::UnsupportedFamily {
            op: "eval_1d",
            family: spec.family.label(),
        }),
    }
}

/// Evaluate a transverse (2D) family at dimensionless ((xi, eta), tau).
/// HG families factorize into per-axis 1D functions with orders (n, j);
/// the mean momentum rides the longitudinal axis and does not appear here.
pub fn eval_transverse_dimensionless(
    spec: &PacketSpec,
    xi: f64,
    eta: f64,
    tau: f64,
) -> Result<Complex64> {
    match spec.family {
        PacketFamily::Gaussian | PacketFamily::StandardHg | PacketFamily::ElegantHg => {
            let x_axis = eval_1d_dimensionless(spec, xi, tau, 0.0)?;
            let y_spec = PacketSpec {
                n: spec.j,
                ..spec.clone()
            };
            let y_axis = eval_1d_dimensionless(&y_spec, eta, tau, 0.0)?;
            Ok(x_axis * y_axis)
        }
        PacketFamily::StandardLg | PacketFamily::ElegantLg => {
            let n = spec.n;
            let a = spec.ell.unsigned_abs();
            let af = a as f64;
            let r2 = xi * xi + eta * eta;
            let r = r2.sqrt();
            let phi = eta.atan2(xi);
            let s2 = 1.0 + tau * tau;
            let one_minus_itau = Complex64::new(1.0, -tau);
            let vortex = Complex64::from_polar(1.0, spec.ell as f64 * phi);
            let envelope = (-r2 / (2.0 * s2) * one_minus_itau).exp();
            if spec.family == PacketFamily::StandardLg {
                let norm =
                    (factorial(n) / (std::f64::consts::PI * gamma_half(2 * (n + a + 1)))).sqrt();
                let radial = r.powi(a as i32) / s2.powf(0.5 * (af + 1.0));
                let lag = laguerre(n, af, Complex64::new(r2 / s2, 0.0));
                Ok(norm
                    * radial
                    * lag
                    * gouy_factor(2.0 * n as f64 + af + 1.0, tau)
                    * vortex
                    * envelope)
            } else {
                let norm = factorial(n) * 2.0f64.powi(n as i32)
                    / (std::f64::consts::PI * gamma_half(2 * (2 * n + a + 1))).sqrt();
                let radial = r.powi(a as i32) / s2.powf(0.5 * (n as f64 + af + 1.0));
                let lag = laguerre(n, af, r2 / (2.0 * s2) * one_minus_itau);
                Ok(norm * radial * lag * gouy_factor(n as f64 + af + 1.0, tau) * vortex * envelope)
            }
        }
    }
}

/// SI wrapper: sample psi(x, t) for a 1D family on coordinates in meters.
/// Units of the returned amplitudes are m^(-1/2).
pub fn wavefunction_1d(spec: &PacketSpec, xs: &[f64], t: f64) -> Result<Vec<Complex64>> {
    let tau = t / spec.diffraction_time();
    let p0 = spec.dimensionless_momentum();
    let scale = spec.sigma0.sqrt().recip();
    xs.iter()
        .map(|&x| eval_1d_dimensionless(spec, x / spec.sigma0, tau, p0).map(|v| v * scale))
        .collect()
}

/// SI wrapper: sample the transverse psi(x, y, t) on points in meters.
/// Units of the returned amplitudes are 1/m.
pub fn wavefunction_transverse(
    spec: &PacketSpec,
    points: &[[f64; 2]],
    t: f64,
) -> Result<Vec<Complex64>> {
    let tau = t / spec.diffraction_time();
    let scale = spec.sigma0.recip();
    points
        .iter()
        .map(|&[x, y]| {
            eval_transverse_dimensionless(spec, x / spec.sigma0, y / spec.sigma0, tau)
                .map(|v| v * scale)
        })
        .collect()
}
