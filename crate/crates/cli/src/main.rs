//! `twistline`: second-moment transport of quantum wave packets through
//! axially symmetric beamline elements, with machine-readable JSON/CSV
//! output and a built-in numeric verification suite.
//!
//! Exit codes: 0 success, 1 usage, 2 lattice parse error, 3 domain or
//! transport error, 4 verification failure.

mod out;
mod verify;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use out::Json;
use twistline_core::busch::{
    cathode_oam, coherence_model, foil_oam, instantaneity_check, oam_broadening, rayleigh_plan,
    CoherenceModel, CoherenceReference, SourceScenario,
};
use twistline_core::classical::{classical_orbit, orbit_invariants, ClassicalState};
use twistline_core::constants::{FieldScales, ParticleSpecies};
use twistline_core::elements::{lens_report_solenoid, match_landau, solenoid_angular, ElementMap};
use twistline_core::error::Error as CoreError;
use twistline_core::free_transport::{
    diffraction_time, rayleigh_length, twiss_transverse, vcz, VczDirection, VczRegime,
};
use twistline_core::lattice::{
    fmt_sig12, parse_lattice, transport, write_csv, write_jsonl, ParseError,
};
use twistline_core::packets::{
    emittance_1d, emittance_transverse, gouy_phase, moments_1d, moments_transverse, packet_entropy,
    PacketFamily, PacketSpec,
};
use twistline_core::units::{parse_quantity, Kind};

#[derive(Parser)]
#[command(
    name = "twistline",
    version,
    about = "Beamline transport for single-particle quantum wave packets",
    disable_help_subcommand = true
)]
struct Cli {
    /// Suppress per-check output where applicable (verify).
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

fn q_len(s: &str) -> Result<f64, String> {
    parse_quantity(s, Kind::Length).map_err(|e| e.to_string())
}
fn q_field(s: &str) -> Result<f64, String> {
    parse_quantity(s, Kind::Field).map_err(|e| e.to_string())
}
fn q_energy(s: &str) -> Result<f64, String> {
    parse_quantity(s, Kind::Energy).map_err(|e| e.to_string())
}
fn q_time(s: &str) -> Result<f64, String> {
    parse_quantity(s, Kind::Time).map_err(|e| e.to_string())
}
fn q_egrad(s: &str) -> Result<f64, String> {
    parse_quantity(s, Kind::EFieldGradient).map_err(|e| e.to_string())
}
fn q_temp(s: &str) -> Result<f64, String> {
    parse_quantity(s, Kind::Temperature).map_err(|e| e.to_string())
}
fn q_angle(s: &str) -> Result<f64, String> {
    parse_quantity(s, Kind::Angle).map_err(|e| e.to_string())
}

#[derive(Args, Clone)]
struct SpeciesArgs {
    /// Built-in species name (electron, positron, proton, hminus).
    #[arg(long, conflicts_with_all = ["mass", "charge_z"])]
    species: Option<String>,
    /// Custom species rest mass (eV), together with --Z.
    #[arg(long, value_parser = q_energy, requires = "charge_z")]
    mass: Option<f64>,
    /// Custom species charge number (signed).
    #[arg(long = "Z", requires = "mass", allow_hyphen_values = true)]
    charge_z: Option<i32>,
}

impl SpeciesArgs {
    fn resolve(&self) -> Result<ParticleSpecies, CoreError> {
        match (&self.species, self.mass, self.charge_z) {
            (Some(name), _, _) => ParticleSpecies::by_name(name),
            (None, Some(mass), Some(z)) => ParticleSpecies::from_mass_z("custom", mass, z),
            _ => ParticleSpecies::by_name("electron"),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form moments, emittance, quality factors, Gouy phase, and
    /// entropy of an analytic packet.
    PacketInfo {
        #[command(flatten)]
        species: SpeciesArgs,
        /// Packet family: gaussian, hg-standard, hg-elegant, lg-standard,
        /// lg-elegant.
        #[arg(long)]
        family: String,
        /// Radial (LG) or x-axis (HG) order.
        #[arg(long, default_value_t = 0)]
        n: u32,
        /// Topological charge (LG families).
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        l: i32,
        /// y-axis order (factorized HG).
        #[arg(long, default_value_t = 0)]
        j: u32,
        /// Focal width sigma(0) (length, e.g. 10nm).
        #[arg(long, value_parser = q_len)]
        sigma: f64,
        /// Mean longitudinal momentum (energy units per c, e.g. 100keV).
        #[arg(long, value_parser = q_energy, default_value = "0")]
        p: f64,
        /// Evaluation time (e.g. 1ps; bare numbers are seconds).
        #[arg(long, value_parser = q_time, default_value = "0")]
        t: f64,
    },
    /// Closed-form classical helix and its invariants.
    Classical {
        #[command(flatten)]
        species: SpeciesArgs,
        /// Field magnitude (T), along +z.
        #[arg(long = "H", value_parser = q_field)]
        h: f64,
        /// Transverse velocity at t = 0 (c units), along x.
        #[arg(long, default_value_t = 0.01, allow_hyphen_values = true)]
        uperp: f64,
        /// Longitudinal velocity (c units).
        #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
        uz: f64,
        /// Evaluation time (defaults to one cyclotron period).
        #[arg(long, value_parser = q_time)]
        t: Option<f64>,
    },
    /// Thin/thick-lens report for a standard LG packet entering a solenoid.
    ElementReport {
        #[command(flatten)]
        species: SpeciesArgs,
        /// Signed axial field (T).
        #[arg(long = "H", value_parser = q_field, allow_hyphen_values = true)]
        h: f64,
        /// Radial electric gradient (V/m2); nonzero selects a crossed lens.
        #[arg(long, value_parser = q_egrad, default_value = "0", allow_hyphen_values = true)]
        eprime: f64,
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        l: i32,
        #[arg(long, value_parser = q_len)]
        sigma: f64,
        /// Longitudinal momentum (sets the dwell time with --length).
        #[arg(long, value_parser = q_energy)]
        p: f64,
        /// Element length.
        #[arg(long, value_parser = q_len)]
        length: f64,
    },
    /// Orbital angular momentum acquired at a magnetized source.
    Busch {
        #[command(subcommand)]
        cmd: BuschCmd,
    },
    /// Generalized van Cittert-Zernike source/detector relation.
    Vcz {
        /// Source-detector distance.
        #[arg(long, value_parser = q_len)]
        z: f64,
        /// de Broglie wavelength.
        #[arg(long = "lambda-db", value_parser = q_len)]
        lambda_db: f64,
        /// Known detected rms radius (solves for the source).
        #[arg(long = "detected-rms", value_parser = q_len, conflicts_with = "source_rms")]
        detected_rms: Option<f64>,
        /// Known source rms radius (predicts the detected size).
        #[arg(long = "source-rms", value_parser = q_len)]
        source_rms: Option<f64>,
        /// Quality factor M >= 1.
        #[arg(long = "M", default_value_t = 1.0)]
        m_factor: f64,
        /// far or fresnel.
        #[arg(long, default_value = "far")]
        regime: String,
    },
    /// Fold a lattice file and emit the sampled trajectory.
    Transport {
        /// Lattice file path.
        #[arg(long)]
        lattice: String,
        /// Samples per element (overrides the file).
        #[arg(long)]
        samples: Option<usize>,
        /// csv or jsonl.
        #[arg(long, default_value = "csv")]
        format: String,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<String>,
    },
    /// Run the numeric verification suites.
    Verify {
        /// all, packets, elements, or classical.
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Subcommand)]
enum BuschCmd {
    /// Packet born on a magnetized cathode.
    Cathode {
        #[command(flatten)]
        species: SpeciesArgs,
        /// Signed field at the cathode (T).
        #[arg(long = "H", value_parser = q_field, allow_hyphen_values = true)]
        h: f64,
        /// rms radius at birth; omit to derive from --temperature.
        #[arg(long, value_parser = q_len)]
        rms: Option<f64>,
        /// Source temperature (K), used with --model when --rms is absent.
        #[arg(long, value_parser = q_temp)]
        temperature: Option<f64>,
        /// maxwellian or fermi (fermi needs --ref-t and --ref-rms).
        #[arg(long, default_value = "maxwellian")]
        model: String,
        #[arg(long = "ref-t", value_parser = q_temp)]
        ref_t: Option<f64>,
        #[arg(long = "ref-rms", value_parser = q_len)]
        ref_rms: Option<f64>,
        /// Emission energy width (eV), enables the instantaneity check.
        #[arg(long = "energy-width", value_parser = q_energy)]
        energy_width: Option<f64>,
    },
    /// Charge-changing stripping foil inside a field.
    Foil {
        #[command(flatten)]
        species: SpeciesArgs,
        #[arg(long = "H", value_parser = q_field, allow_hyphen_values = true)]
        h: f64,
        #[arg(long, value_parser = q_len)]
        rms: f64,
        #[arg(long, allow_hyphen_values = true)]
        zin: i32,
        #[arg(long, allow_hyphen_values = true)]
        zout: i32,
        /// Angular straggling in the foil (e.g. 0.19mrad) for the OAM
        /// broadening estimate.
        #[arg(long, value_parser = q_angle)]
        straggling: Option<f64>,
        /// Longitudinal beta for the broadening estimate.
        #[arg(long)]
        beta: Option<f64>,
    },
}

enum AppError {
    Domain(String),
    LatticeParse(Vec<ParseError>),
    Transport(String),
    VerifyFailed,
    Io(String),
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        AppError::Domain(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::LatticeParse(errors)) => {
            for e in errors {
                eprintln!("error: {e}");
            }
            ExitCode::from(2)
        }
        Err(AppError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(AppError::Transport(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(AppError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(AppError::VerifyFailed) => ExitCode::from(4),
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.cmd {
        Cmd::PacketInfo {
            species,
            family,
            n,
            l,
            j,
            sigma,
            p,
            t,
        } => {
            let sp = species.resolve()?;
            let family = PacketFamily::parse(&family)?;
            let spec = PacketSpec::new(family, n, j, 0, l, sigma, p, sp)?;
            packet_info(&spec, t)
        }
        Cmd::Classical {
            species,
            h,
            uperp,
            uz,
            t,
        } => {
            let sp = species.resolve()?;
            let scales = FieldScales::for_field(&sp, h)?;
            let t = t.unwrap_or(scales.period);
            let init = ClassicalState::new([0.0, 0.0, 0.0], [uperp, 0.0, uz], 0.0)?;
            let state = classical_orbit(&init, &sp, h, t)?;
            let inv = orbit_invariants(&init, &sp, h)?;
            let json = Json::new()
                .str("species", &sp.name)
                .num("h_tesla", h)
                .num("t", t)
                .num("period", scales.period)
                .num("omega_c", scales.omega_c)
                .num("x", state.position[0])
                .num("y", state.position[1])
                .num("z", state.position[2])
                .num("ux", state.velocity[0])
                .num("uy", state.velocity[1])
                .num("uz", state.velocity[2])
                .num("action", inv.action)
                .num("flux", inv.flux)
                .num("lz_intrinsic", inv.lz_intrinsic)
                .num("lz_canonical_intrinsic", inv.lz_canonical_intrinsic)
                .num("rho_c", inv.rho_c)
                .finish();
            println!("{json}");
            Ok(())
        }
        Cmd::ElementReport {
            species,
            h,
            eprime,
            n,
            l,
            sigma,
            p,
            length,
        } => {
            let sp = species.resolve()?;
            element_report(&sp, h, eprime, n, l, sigma, p, length)
        }
        Cmd::Busch { cmd } => busch(cmd),
        Cmd::Vcz {
            z,
            lambda_db,
            detected_rms,
            source_rms,
            m_factor,
            regime,
        } => {
            let regime = match regime.as_str() {
                "far" => VczRegime::FarField,
                "fresnel" => VczRegime::Fresnel,
                other => {
                    return Err(AppError::Domain(format!(
                        "unknown regime `{other}` (far, fresnel)"
                    )))
                }
            };
            let (rms, direction) = match (detected_rms, source_rms) {
                (Some(r), None) => (r, VczDirection::SourceFromDetected),
                (None, Some(r)) => (r, VczDirection::DetectedFromSource),
                _ => {
                    return Err(AppError::Domain(
                        "give exactly one of --detected-rms / --source-rms".into(),
                    ))
                }
            };
            let r = vcz(z, lambda_db, rms, m_factor, direction, regime)?;
            let json = Json::new()
                .num("source_rms", r.source_rms)
                .num("detected_rms", r.detected_rms)
                .num("distance", r.distance)
                .num("de_broglie", r.de_broglie)
                .num("m", r.m_factor)
                .str(
                    "regime",
                    match r.regime {
                        VczRegime::FarField => "far",
                        VczRegime::Fresnel => "fresnel",
                    },
                )
                .num("rayleigh", r.rayleigh)
                .bool("far_field_ok", r.far_field_ok)
                .num("coherence_length", r.coherence_length)
                .num("effective_source_radius", r.effective_source_radius)
                .opt_num("alt_source_rms", r.alt_source_rms)
                .finish();
            println!("{json}");
            Ok(())
        }
        Cmd::Transport {
            lattice,
            samples,
            format,
            out,
        } => {
            let text = std::fs::read_to_string(&lattice)
                .map_err(|e| AppError::Io(format!("{lattice}: {e}")))?;
            let mut lat = parse_lattice(&text).map_err(AppError::LatticeParse)?;
            if let Some(s) = samples {
                if s < 2 {
                    return Err(AppError::Domain("--samples must be >= 2".into()));
                }
                lat.samples_per_element = s;
            }
            let records = transport(&lat).map_err(|e| AppError::Transport(e.to_string()))?;
            let mut buf: Vec<u8> = Vec::new();
            match format.as_str() {
                "csv" => write_csv(&mut buf, &records),
                "jsonl" => write_jsonl(&mut buf, &records),
                other => {
                    return Err(AppError::Domain(format!(
                        "unknown format `{other}` (csv, jsonl)"
                    )))
                }
            }
            .map_err(|e| AppError::Io(e.to_string()))?;
            match out {
                Some(path) => {
                    std::fs::write(&path, &buf).map_err(|e| AppError::Io(format!("{path}: {e}")))?
                }
                None => std::io::stdout()
                    .write_all(&buf)
                    .map_err(|e| AppError::Io(e.to_string()))?,
            }
            Ok(())
        }
        Cmd::Verify { suite } => {
            let checks = verify::run_suite(&suite).map_err(AppError::Domain)?;
            let mut failed = 0usize;
            for c in &checks {
                if !c.pass {
                    failed += 1;
                }
                if !cli.quiet || !c.pass {
                    println!(
                        "{} {} ({})",
                        if c.pass { "PASS" } else { "FAIL" },
                        c.name,
                        c.detail
                    );
                }
            }
            println!("{} checks, {} failed", checks.len(), failed);
            if failed > 0 {
                return Err(AppError::VerifyFailed);
            }
            Ok(())
        }
    }
}

fn packet_info(spec: &PacketSpec, t: f64) -> Result<(), AppError> {
    let m = moments_transverse(spec, t)?;
    let em = emittance_transverse(spec)?;
    let g = gouy_phase(spec, t);
    let s = packet_entropy(spec, t)?;
    let mut json = Json::new()
        .str("species", &spec.species.name)
        .str("family", spec.family.label())
        .int("n", spec.n as i64)
        .int("l", spec.ell as i64)
        .int("j", spec.j as i64)
        .num("sigma", spec.sigma0)
        .num("p_ev", spec.mean_momentum_ev)
        .num("t", t)
        .num("t_d", spec.diffraction_time())
        .num("beta", spec.beta())
        .num("lorentz_gamma", spec.lorentz_gamma())
        .num("rho2", m.rho2)
        .num("rho_u", m.rho_u)
        .num("uperp2", m.uperp2)
        .num("eps_rho", em.epsilon_rho)
        .num("m", em.m_factor)
        .num("eps_rho_mode_index", em.epsilon_rho_mode_index)
        .num("m_mode_index", em.m_mode_index);
    // 1D channel where the family factorizes
    if !spec.family.is_lg() {
        let m1 = moments_1d(spec, t)?;
        let e1 = emittance_1d(spec)?;
        json = json
            .num("x2_central", m1.central_x2())
            .num("xu_central", m1.central_xu())
            .num("u2_central", m1.central_u2())
            .num("mean_x", m1.mean_x)
            .num("eps_x", e1.epsilon_x)
            .num("m_1d", e1.m_factor);
    }
    let tw = twiss_transverse(&m)?;
    let json = json
        .num("gouy_phase", g.phase)
        .num("gouy_unit_phase", g.unit_phase)
        .num("gouy_prefactor", g.prefactor)
        .num("entropy", s)
        .num("alpha", tw.alpha)
        .num("beta_twiss", tw.beta)
        .num("gamma_twiss", tw.gamma)
        .num("diffraction_time", diffraction_time(&m)?)
        .opt_num(
            "rayleigh",
            (spec.beta() > 0.0)
                .then(|| rayleigh_length(&m, spec.beta()))
                .transpose()?,
        )
        .num("mean_energy_ev", spec.mean_energy_ev()?)
        .finish();
    println!("{json}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn element_report(
    sp: &ParticleSpecies,
    h: f64,
    eprime: f64,
    n: u32,
    l: i32,
    sigma: f64,
    p: f64,
    length: f64,
) -> Result<(), AppError> {
    let spec = PacketSpec::standard_lg(sp.clone(), n, l, sigma, p)?;
    let m = moments_transverse(&spec, 0.0)?;
    let beta = spec.beta();
    if beta <= 0.0 {
        return Err(AppError::Domain(
            "element-report needs a nonzero momentum".into(),
        ));
    }
    let dwell = length / (beta * twistline_core::constants::C * spec.lorentz_gamma());
    if eprime == 0.0 {
        let rep = lens_report_solenoid(&m, sp, h, dwell)?;
        let matched = match_landau(&spec, sp, h.abs())?;
        let ang = solenoid_angular(&m, sp, h, 0.0)?;
        let json = Json::new()
            .str("element", "solenoid")
            .str("classification", rep.classification.label())
            .opt_num("period", rep.period)
            .opt_num("t_d_thin", rep.t_d_thin)
            .num("gouy_sign", rep.gouy_sign)
            .num("mean_rho2", rep.mean_rho2)
            .num("mean_emittance", rep.mean_emittance)
            .num("effective_m", rep.effective_m)
            .num("n_h_continuous", rep.n_h_continuous)
            .int("n_h_nearest", matched.n_h_nearest as i64)
            .num("width_ratio", matched.width_ratio)
            .num("dwell", dwell)
            .num("dwell_over_period", rep.dwell_over_period)
            .bool("paraxial_ok", rep.paraxial_ok)
            .num("lz_kin_entry", ang.lz_kin)
            .num("lz_kin_jump", ang.jump)
            .num("flux", ang.flux)
            .num("flux_quantum_count", ang.flux_quantum_count)
            .finish();
        println!("{json}");
    } else {
        let map = ElementMap::from_entry(&m, sp, h, eprime)?;
        let class = match (map.period(), map.center()) {
            (Some(_), Some(c)) if c > m.rho2 => "defocusing",
            (Some(_), Some(_)) => "focusing",
            (Some(_), None) => "globally-defocusing",
            _ => "frozen",
        };
        let json = Json::new()
            .str("element", "crossed")
            .str("classification", class)
            .opt_num("period", map.period())
            .opt_num("mean_rho2", map.center())
            .num("dwell", dwell)
            .num("kinetic_uperp2_entry", map.kinetic_uperp2(0.0))
            .finish();
        println!("{json}");
    }
    Ok(())
}

fn busch(cmd: BuschCmd) -> Result<(), AppError> {
    match cmd {
        BuschCmd::Cathode {
            species,
            h,
            rms,
            temperature,
            model,
            ref_t,
            ref_rms,
            energy_width,
        } => {
            let sp = species.resolve()?;
            // A user-supplied rms always wins; the temperature models only
            // fill the gap.
            let (rms, rms_source) = match (rms, temperature) {
                (Some(r), _) => (r, "given"),
                (None, Some(t)) => {
                    let m = match model.as_str() {
                        "maxwellian" => CoherenceModel::Maxwellian,
                        "fermi" => CoherenceModel::FermiScaled,
                        other => {
                            return Err(AppError::Domain(format!(
                                "unknown model `{other}` (maxwellian, fermi)"
                            )))
                        }
                    };
                    let reference = match (ref_t, ref_rms) {
                        (Some(t0), Some(r0)) => Some(CoherenceReference {
                            t_ref: t0,
                            rms_ref: r0,
                            mass_ref_ev: None,
                        }),
                        _ => None,
                    };
                    (coherence_model(&sp, t, m, reference)?, "model")
                }
                (None, None) => return Err(AppError::Domain("give --rms or --temperature".into())),
            };
            let mut scen = SourceScenario::cathode(sp, h, rms)?;
            if let Some(w) = energy_width {
                scen = scen.with_energy_width(w);
            }
            let p = cathode_oam(&scen)?;
            let mut json = Json::new()
                .str("kind", "cathode")
                .str("species", &scen.species.name)
                .num("h_tesla", h)
                .num("rms", rms)
                .str("rms_source", rms_source)
                .num("ell_exact", p.ell_exact)
                .num("ell_coefficient_form", p.ell_coefficient_form)
                .num("coefficient_ratio", p.coefficient_ratio)
                .num("flux", p.flux)
                .opt_bool("instantaneous_ok", p.instantaneous_ok);
            if scen.energy_width_ev.is_some() {
                let chk = instantaneity_check(&scen)?;
                json = json
                    .num("instantaneity_threshold_ev", chk.threshold_ev)
                    .num("instantaneity_margin", chk.margin);
            }
            println!("{}", json.finish());
            Ok(())
        }
        BuschCmd::Foil {
            species,
            h,
            rms,
            zin,
            zout,
            straggling,
            beta,
        } => {
            let sp = species.resolve()?;
            let scen = SourceScenario::foil(sp.clone(), h, rms, zin, zout)?;
            let p = foil_oam(&scen)?;
            let mut json = Json::new()
                .str("kind", "foil")
                .str("species", &sp.name)
                .num("h_tesla", h)
                .num("rms", rms)
                .int("zin", zin as i64)
                .int("zout", zout as i64)
                .num("ell_exact", p.ell_exact)
                .num("ell_coefficient_form", p.ell_coefficient_form)
                .num("coefficient_ratio", p.coefficient_ratio)
                .num("flux", p.flux);
            if let (Some(straggle), Some(beta)) = (straggling, beta) {
                let lam_ratio = sp.compton_wavelength / rms;
                let b = oam_broadening(p.ell_exact, beta, lam_ratio, straggle)?;
                json = json
                    .num("opening_angle", b.opening_angle)
                    .num("delta_ell", b.delta_ell)
                    .bool("exceeds_reported_straggling", b.exceeds_reported_straggling);
                let z_r = rayleigh_plan(rms, 1.0f64.max(p.ell_exact.abs()), beta, &sp)?;
                json = json.num("rayleigh_plan", z_r);
            }
            println!("{}", json.finish());
            Ok(())
        }
    }
}

// keep fmt_sig12 linked for the doc examples in out.rs
#[allow(dead_code)]
fn _fmt(v: f64) -> String {
    fmt_sig12(v)
}
