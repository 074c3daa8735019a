//! Beamline description format and the transport pipeline: parse a
//! line-oriented lattice file, fold the source state through the element
//! sequence, and emit sampled trajectory records.

mod parse;
mod writer;

pub use parse::{parse_lattice, serialize_lattice, ParseError};
pub use writer::{fmt_sig12, write_csv, write_jsonl};

use crate::busch::{cathode_oam, foil_oam, SourceScenario};
use crate::constants::{ParticleSpecies, C, HBAR};
use crate::elements::{Element, ElementKind, ElementMap, LensClass};
use crate::error::{Error, Result};
use crate::free_transport::{free_spread_transverse, twiss_transverse};
use crate::packets::{moments_transverse, PacketSpec, TransverseMoments};

/// What launches the beam: an analytic packet at its focus, or a packet
/// born on a magnetized cathode.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Packet(PacketSpec),
    Cathode {
        /// Signed field at the cathode plane (T).
        h_signed: f64,
        /// rms radius at birth (m).
        rms: f64,
        /// Longitudinal momentum after extraction (eV/c).
        p_ev: f64,
    },
}

/// One lattice line: a finite element or a zero-length charge-changing
/// foil that steps the canonical OAM.
#[derive(Debug, Clone, PartialEq)]
pub enum LatticeItem {
    Element(Element),
    Foil {
        z_in: i32,
        z_out: i32,
        h_signed: f64,
    },
}

/// A parsed beamline.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub species: ParticleSpecies,
    pub source: Source,
    pub items: Vec<LatticeItem>,
    /// Samples per element (both faces included).
    pub samples_per_element: usize,
    /// Optional Lorentz-factor override: when set, reported times are lab
    /// frame (gamma times the rest-frame dwell) and the dwell uses this
    /// gamma instead of the momentum-derived one.
    pub lorentz_gamma: Option<f64>,
}

/// One sampled point of a transport run. Second moments are canonical
/// (continuous at element faces, since the wavefunction is); the emittance
/// and kinetic-AM columns use the kinetic velocity channel, which jumps at
/// magnetic faces and oscillates inside lenses around the thick-lens mean.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    /// Time (s): rest frame, or lab frame when the lattice sets gamma.
    pub t: f64,
    /// Longitudinal position (m).
    pub z: f64,
    /// <rho^2> (m^2).
    pub rho2: f64,
    /// <rho . u_perp> (m, c units).
    pub rho_u: f64,
    /// <u_perp^2>, canonical channel (c^2 units).
    pub uperp2: f64,
    /// In-field (kinetic) emittance (m, c units).
    pub eps_rho: f64,
    /// eps_rho / lambda_c.
    pub m_factor: f64,
    /// Canonical OAM (hbar).
    pub ell: f64,
    /// Kinetic AM l - m omega_L <rho^2> / hbar (hbar); equals l outside
    /// magnetic fields.
    pub lz_kin: f64,
    /// Twiss parameters (alpha unitless, beta s, gamma 1/s).
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Index of the element in the lattice (source = 0).
    pub element_index: usize,
    pub element_kind: &'static str,
    pub classification: &'static str,
}

/// Transport failure with the offending element attached.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportError {
    /// Element index (None: source setup).
    pub element_index: Option<usize>,
    pub source: Error,
}

impl std::fmt::Display for TransportError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.element_index {
            Some(i) => write!(f, "element {i}: {}", self.source),
            None => write!(f, "source: {}", self.source),
        }
    }
}

impl std::error::Error for TransportError {}

fn source_state(lat: &Lattice) -> Result<(TransverseMoments, f64)> {
    match &lat.source {
        Source::Packet(spec) => Ok((moments_transverse(spec, 0.0)?, spec.mean_momentum_ev)),
        Source::Cathode {
            h_signed,
            rms,
            p_ev,
        } => {
            let scen = SourceScenario::cathode(lat.species.clone(), *h_signed, *rms)?;
            let ell = cathode_oam(&scen)?.ell_exact;
            // Birth moments: the measured rms with the minimal velocity
            // spread a state of that OAM allows (the n = 0 LG relation
            // <u_perp^2> = (|l|+1) lambda_c^2 / <rho^2>).
            let lam = lat.species.compton_wavelength;
            let rho2 = rms * rms;
            let uperp2 = (ell.abs() + 1.0) * lam * lam / rho2;
            Ok((
                TransverseMoments::on_axis(rho2, 0.0, uperp2, ell, 0.0),
                *p_ev,
            ))
        }
    }
}

fn kinematics(species: &ParticleSpecies, p_ev: f64, gamma_override: Option<f64>) -> (f64, f64) {
    match gamma_override {
        Some(g) => {
            let beta = (1.0 - 1.0 / (g * g)).max(0.0).sqrt();
            (beta, g)
        }
        None => {
            let m = species.mass_ev;
            let e = (p_ev * p_ev + m * m).sqrt();
            (p_ev / e, e / m)
        }
    }
}

fn classify(map: &ElementMap, free_rho2: f64, kind: ElementKind) -> &'static str {
    if kind == ElementKind::Drift {
        return "drift";
    }
    match (map.period(), map.center()) {
        (Some(_), Some(center)) => {
            if center > free_rho2 {
                LensClass::DefocusingShortTime.label()
            } else {
                LensClass::FocusingShortTime.label()
            }
        }
        (Some(_), None) => LensClass::GloballyDefocusing.label(),
        _ => LensClass::Frozen.label(),
    }
}

/// Fold the source through the lattice, sampling each element uniformly in
/// its rest-frame dwell time (faces included). The canonical OAM column is
/// constant except at foils, where it steps by the charge-change rule; the
/// canonical second moments are continuous at every face.
pub fn transport(lat: &Lattice) -> std::result::Result<Vec<TrajectoryRecord>, TransportError> {
    let samples = lat.samples_per_element.max(2);
    let wrap = |idx: Option<usize>| {
        move |e: Error| TransportError {
            element_index: idx,
            source: e,
        }
    };
    let (mut state, mut p_ev) = source_state(lat).map_err(wrap(None))?;
    let mut records = Vec::new();
    let mut t_out = 0.0;
    let mut z = 0.0;
    let species = &lat.species;
    let lam = species.compton_wavelength;

    // `u2_kin` is the kinetic velocity spread at the sample (equals the
    // canonical one outside magnetic fields).
    let push = |records: &mut Vec<TrajectoryRecord>,
                m: &TransverseMoments,
                u2_kin: f64,
                t_out: f64,
                z: f64,
                h_here: f64,
                idx: usize,
                kind: &'static str,
                class: &'static str|
     -> Result<()> {
        let tw = twiss_transverse(m)?;
        let lz_kin = m.ell - species.charge() * h_here * m.rho2 / (2.0 * HBAR);
        let eps_kin = (m.central_rho2() * u2_kin - m.central_rho_u() * m.central_rho_u())
            .max(0.0)
            .sqrt();
        records.push(TrajectoryRecord {
            t: t_out,
            z,
            rho2: m.rho2,
            rho_u: m.rho_u,
            uperp2: m.uperp2,
            eps_rho: eps_kin,
            m_factor: eps_kin / lam,
            ell: m.ell,
            lz_kin,
            alpha: tw.alpha,
            beta: tw.beta,
            gamma: tw.gamma,
            element_index: idx,
            element_kind: kind,
            classification: class,
        });
        Ok(())
    };

    // Source record.
    let source_h = match &lat.source {
        Source::Cathode { h_signed, .. } => *h_signed,
        _ => 0.0,
    };
    push(
        &mut records,
        &state,
        state.central_uperp2(),
        t_out,
        z,
        source_h,
        0,
        "source",
        "source",
    )
    .map_err(wrap(None))?;

    for (i, item) in lat.items.iter().enumerate() {
        let idx = i + 1;
        match item {
            LatticeItem::Foil {
                z_in,
                z_out,
                h_signed,
            } => {
                let scen = SourceScenario::foil(
                    species.clone(),
                    *h_signed,
                    state.rho2.sqrt(),
                    *z_in,
                    *z_out,
                )
                .map_err(wrap(Some(idx)))?;
                let step = foil_oam(&scen).map_err(wrap(Some(idx)))?;
                state.ell += step.ell_exact;
                push(
                    &mut records,
                    &state,
                    state.central_uperp2(),
                    t_out,
                    z,
                    *h_signed,
                    idx,
                    "foil",
                    "foil",
                )
                .map_err(wrap(Some(idx)))?;
            }
            LatticeItem::Element(el) => {
                let (beta, gamma) = kinematics(species, p_ev, lat.lorentz_gamma);
                if beta <= 0.0 {
                    return Err(TransportError {
                        element_index: Some(idx),
                        source: Error::NonPositive {
                            name: "beta",
                            value: beta,
                        },
                    });
                }
                let dwell = el.length / (beta * C * gamma);
                let t_scale = if lat.lorentz_gamma.is_some() {
                    gamma
                } else {
                    1.0
                };
                let map = (el.kind != ElementKind::Drift)
                    .then(|| ElementMap::from_entry(&state, species, el.h_tesla, el.e_rho_prime))
                    .transpose()
                    .map_err(wrap(Some(idx)))?;
                let class = match &map {
                    Some(m) => classify(m, state.central_rho2(), el.kind),
                    None => "drift",
                };
                let entry = state;
                for k in 0..samples {
                    let dt = dwell * k as f64 / (samples - 1) as f64;
                    let (m, u2_kin) = match &map {
                        Some(map) => (
                            map.eval(&entry, dt).map_err(wrap(Some(idx)))?,
                            map.kinetic_uperp2(dt),
                        ),
                        None => {
                            let m = free_spread_transverse(&entry, dt);
                            let u2 = m.central_uperp2();
                            (m, u2)
                        }
                    };
                    push(
                        &mut records,
                        &m,
                        u2_kin,
                        t_out + dt * t_scale,
                        z + el.length * k as f64 / (samples - 1) as f64,
                        el.h_tesla,
                        idx,
                        el.kind_label(),
                        class,
                    )
                    .map_err(wrap(Some(idx)))?;
                    if k == samples - 1 {
                        state = m;
                    }
                }
                t_out += dwell * t_scale;
                z += el.length;
                // Longitudinal acceleration bookkeeping at the exit face.
                if el.e_z != 0.0 {
                    let gain_ev = species.charge_number as f64 * el.e_z * el.length;
                    let m = species.mass_ev;
                    let e_tot = (p_ev * p_ev + m * m).sqrt() + gain_ev;
                    if e_tot <= m {
                        return Err(TransportError {
                            element_index: Some(idx),
                            source: Error::NonPhysical(format!(
                                "deceleration below rest energy (E = {e_tot:.3e} eV)"
                            )),
                        });
                    }
                    p_ev = (e_tot * e_tot - m * m).sqrt();
                }
            }
        }
    }
    Ok(records)
}
