//! Line-oriented lattice grammar: one statement per line, `key=value`
//! pairs with unit-suffixed numbers, `#` comments. All errors in a file
//! are collected in one pass rather than failing on the first.
//!
//! ```text
//! species electron
//! packet lg-standard n=0 l=3 sigma=10nm p=100keV
//! drift L=1mm
//! solenoid H=1T L=5cm
//! lens Eprime=-2e8V/m2 L=2cm
//! drift L=1mm
//! ```

use std::collections::BTreeMap;

use crate::constants::ParticleSpecies;
use crate::elements::Element;
use crate::packets::{PacketFamily, PacketSpec};
use crate::units::{parse_quantity, Kind};

use super::{Lattice, LatticeItem, Source};

/// A located syntax or semantic error in a lattice file.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    /// 1-based line number.
    pub line: usize,
    /// 1-based column of the offending token.
    pub column: usize,
    /// The offending token (may be empty for missing-key errors).
    pub token: String,
    /// What would have been accepted here.
    pub expected: String,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "line {}, col {}: {}",
            self.line, self.column, self.message
        )?;
        if !self.token.is_empty() {
            write!(f, " (got `{}`)", self.token)?;
        }
        if !self.expected.is_empty() {
            write!(f, "; expected {}", self.expected)?;
        }
        Ok(())
    }
}

struct LineCtx<'a> {
    line_no: usize,
    text: &'a str,
    errors: &'a mut Vec<ParseError>,
}

impl<'a> LineCtx<'a> {
    fn err(&mut self, column: usize, token: &str, expected: &str, message: String) {
        self.errors.push(ParseError {
            line: self.line_no,
            column,
            token: token.to_string(),
            expected: expected.to_string(),
            message,
        });
    }

    fn col_of(&self, token: &str) -> usize {
        self.text.find(token).map(|p| p + 1).unwrap_or(1)
    }
}

/// key=value pairs after the keyword, with duplicate/unknown-key checks.
struct Pairs<'a> {
    map: BTreeMap<&'a str, (&'a str, usize)>,
}

impl<'a> Pairs<'a> {
    fn collect(ctx: &mut LineCtx<'a>, tokens: &[&'a str], allowed: &[&str]) -> Pairs<'a> {
        let mut map = BTreeMap::new();
        for tok in tokens {
            let col = ctx.col_of(tok);
            match tok.split_once('=') {
                Some((k, v)) if !k.is_empty() && !v.is_empty() => {
                    if !allowed.contains(&k) {
                        ctx.err(
                            col,
                            tok,
                            &format!("one of: {}", allowed.join(", ")),
                            format!("unknown key `{k}`"),
                        );
                    } else if map.insert(k, (v, col)).is_some() {
                        ctx.err(col, tok, "", format!("duplicate key `{k}`"));
                    }
                }
                _ => ctx.err(col, tok, "key=value", "malformed pair".to_string()),
            }
        }
        Pairs { map }
    }

    fn quantity(&self, ctx: &mut LineCtx<'_>, key: &str, kind: Kind) -> Option<f64> {
        match self.map.get(key) {
            Some(&(v, col)) => match parse_quantity(v, kind) {
                Ok(x) => Some(x),
                Err(e) => {
                    ctx.err(col, v, kind.base_unit(), e.to_string());
                    None
                }
            },
            None => {
                ctx.err(
                    1,
                    "",
                    &format!("{key}=<{}>", kind.base_unit()),
                    format!("missing key `{key}`"),
                );
                None
            }
        }
    }

    fn quantity_or(
        &self,
        ctx: &mut LineCtx<'_>,
        key: &str,
        kind: Kind,
        default: f64,
    ) -> Option<f64> {
        match self.map.get(key) {
            Some(&(v, col)) => match parse_quantity(v, kind) {
                Ok(x) => Some(x),
                Err(e) => {
                    ctx.err(col, v, kind.base_unit(), e.to_string());
                    None
                }
            },
            None => Some(default),
        }
    }

    fn integer(&self, ctx: &mut LineCtx<'_>, key: &str) -> Option<i64> {
        match self.map.get(key) {
            Some(&(v, col)) => match v.parse::<i64>() {
                Ok(x) => Some(x),
                Err(_) => {
                    ctx.err(col, v, "integer", format!("cannot parse `{v}` as integer"));
                    None
                }
            },
            None => {
                ctx.err(
                    1,
                    "",
                    &format!("{key}=<int>"),
                    format!("missing key `{key}`"),
                );
                None
            }
        }
    }

    fn integer_or(&self, ctx: &mut LineCtx<'_>, key: &str, default: i64) -> Option<i64> {
        if self.map.contains_key(key) {
            self.integer(ctx, key)
        } else {
            Some(default)
        }
    }
}

/// Parse a lattice file; either a complete `Lattice` or every error found.
pub fn parse_lattice(text: &str) -> Result<Lattice, Vec<ParseError>> {
    let mut errors = Vec::new();
    let mut species: Option<ParticleSpecies> = None;
    // Deferred packet lines (species may legally come later in the file).
    let mut packet_line: Option<(usize, String)> = None;
    let mut cathode: Option<(f64, f64, f64)> = None;
    let mut items: Vec<LatticeItem> = Vec::new();
    let mut samples: usize = 16;
    let mut lorentz_gamma: Option<f64> = None;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let keyword = tokens[0];
        let rest = &tokens[1..];
        let mut ctx = LineCtx {
            line_no,
            text: raw,
            errors: &mut errors,
        };
        match keyword {
            "species" => {
                if rest.is_empty() {
                    ctx.err(
                        1,
                        "",
                        "species <name> [mass=<eV> Z=<int>]",
                        "missing species name".into(),
                    );
                    continue;
                }
                let name = rest[0];
                if rest.len() > 1 {
                    let pairs = Pairs::collect(&mut ctx, &rest[1..], &["mass", "Z"]);
                    let mass = pairs.quantity(&mut ctx, "mass", Kind::Energy);
                    let z = pairs.integer(&mut ctx, "Z");
                    if let (Some(mass), Some(z)) = (mass, z) {
                        match ParticleSpecies::from_mass_z(name, mass, z as i32) {
                            Ok(s) => species = Some(s),
                            Err(e) => ctx.err(ctx.col_of(name), name, "", e.to_string()),
                        }
                    }
                } else {
                    match ParticleSpecies::by_name(name) {
                        Ok(s) => species = Some(s),
                        Err(e) => ctx.err(
                            ctx.col_of(name),
                            name,
                            "electron, proton, hminus, or mass=/Z=",
                            e.to_string(),
                        ),
                    }
                }
            }
            "packet" => {
                if packet_line.is_some() || cathode.is_some() {
                    ctx.err(
                        1,
                        keyword,
                        "",
                        "a lattice has exactly one source line".into(),
                    );
                } else {
                    packet_line = Some((line_no, raw.to_string()));
                }
            }
            "cathode" => {
                if packet_line.is_some() || cathode.is_some() {
                    ctx.err(
                        1,
                        keyword,
                        "",
                        "a lattice has exactly one source line".into(),
                    );
                    continue;
                }
                let pairs = Pairs::collect(&mut ctx, rest, &["H", "rms", "p"]);
                let h = pairs.quantity(&mut ctx, "H", Kind::Field);
                let rms = pairs.quantity(&mut ctx, "rms", Kind::Length);
                let p = pairs.quantity(&mut ctx, "p", Kind::Energy);
                if let (Some(h), Some(rms), Some(p)) = (h, rms, p) {
                    cathode = Some((h, rms, p));
                }
            }
            "drift" => {
                let pairs = Pairs::collect(&mut ctx, rest, &["L"]);
                if let Some(l) = pairs.quantity(&mut ctx, "L", Kind::Length) {
                    push_element(&mut ctx, &mut items, Element::drift(l));
                }
            }
            "solenoid" => {
                let pairs = Pairs::collect(&mut ctx, rest, &["H", "L", "Ez"]);
                let h = pairs.quantity(&mut ctx, "H", Kind::Field);
                let l = pairs.quantity(&mut ctx, "L", Kind::Length);
                let ez = pairs.quantity_or(&mut ctx, "Ez", Kind::EField, 0.0);
                if let (Some(h), Some(l), Some(ez)) = (h, l, ez) {
                    push_element(
                        &mut ctx,
                        &mut items,
                        Element::solenoid(h, l).map(|e| e.with_e_z(ez)),
                    );
                }
            }
            "lens" => {
                let pairs = Pairs::collect(&mut ctx, rest, &["Eprime", "L", "Ez"]);
                let ep = pairs.quantity(&mut ctx, "Eprime", Kind::EFieldGradient);
                let l = pairs.quantity(&mut ctx, "L", Kind::Length);
                let ez = pairs.quantity_or(&mut ctx, "Ez", Kind::EField, 0.0);
                if let (Some(ep), Some(l), Some(ez)) = (ep, l, ez) {
                    push_element(
                        &mut ctx,
                        &mut items,
                        Element::electrostatic(ep, l).map(|e| e.with_e_z(ez)),
                    );
                }
            }
            "crossed" => {
                let pairs = Pairs::collect(&mut ctx, rest, &["H", "Eprime", "L", "Ez"]);
                let h = pairs.quantity(&mut ctx, "H", Kind::Field);
                let ep = pairs.quantity(&mut ctx, "Eprime", Kind::EFieldGradient);
                let l = pairs.quantity(&mut ctx, "L", Kind::Length);
                let ez = pairs.quantity_or(&mut ctx, "Ez", Kind::EField, 0.0);
                if let (Some(h), Some(ep), Some(l), Some(ez)) = (h, ep, l, ez) {
                    push_element(
                        &mut ctx,
                        &mut items,
                        Element::crossed(h, ep, l).map(|e| e.with_e_z(ez)),
                    );
                }
            }
            "trap" => {
                let pairs = Pairs::collect(&mut ctx, rest, &["a", "H", "L"]);
                let a = pairs.quantity(&mut ctx, "a", Kind::EFieldGradient);
                let h = pairs.quantity(&mut ctx, "H", Kind::Field);
                let l = pairs.quantity(&mut ctx, "L", Kind::Length);
                if let (Some(a), Some(h), Some(l)) = (a, h, l) {
                    push_element(&mut ctx, &mut items, Element::penning_trap(a, h, l));
                }
            }
            "foil" => {
                let pairs = Pairs::collect(&mut ctx, rest, &["zin", "zout", "H"]);
                let zin = pairs.integer(&mut ctx, "zin");
                let zout = pairs.integer(&mut ctx, "zout");
                let h = pairs.quantity(&mut ctx, "H", Kind::Field);
                if let (Some(zin), Some(zout), Some(h)) = (zin, zout, h) {
                    if zin == zout {
                        ctx.err(
                            1,
                            keyword,
                            "zout != zin",
                            "foil must change the charge state".into(),
                        );
                    } else {
                        items.push(LatticeItem::Foil {
                            z_in: zin as i32,
                            z_out: zout as i32,
                            h_signed: h,
                        });
                    }
                }
            }
            "samples" => {
                if rest.len() != 1 {
                    ctx.err(
                        1,
                        line,
                        "samples <int >= 2>",
                        "samples takes one integer".into(),
                    );
                } else {
                    match rest[0].parse::<usize>() {
                        Ok(n) if n >= 2 => samples = n,
                        _ => ctx.err(
                            ctx.col_of(rest[0]),
                            rest[0],
                            "integer >= 2",
                            "invalid sample count".into(),
                        ),
                    }
                }
            }
            "gamma" => {
                if rest.len() != 1 {
                    ctx.err(
                        1,
                        line,
                        "gamma <float >= 1>",
                        "gamma takes one number".into(),
                    );
                } else {
                    match rest[0].parse::<f64>() {
                        Ok(g) if g >= 1.0 => lorentz_gamma = Some(g),
                        _ => ctx.err(
                            ctx.col_of(rest[0]),
                            rest[0],
                            "float >= 1",
                            "invalid Lorentz factor".into(),
                        ),
                    }
                }
            }
            other => {
                ctx.err(
                    1,
                    other,
                    "species, packet, cathode, drift, solenoid, lens, crossed, trap, foil, samples, gamma",
                    format!("unknown statement `{other}`"),
                );
            }
        }
    }

    // Second pass for the packet line (needs the species).
    let species = match species {
        Some(s) => s,
        None => {
            errors.push(ParseError {
                line: 1,
                column: 1,
                token: String::new(),
                expected: "species <name>".to_string(),
                message: "missing species".to_string(),
            });
            return Err(errors);
        }
    };
    let source = if let Some((line_no, raw)) = packet_line {
        parse_packet_line(&raw, line_no, &species, &mut errors).map(Source::Packet)
    } else if let Some((h, rms, p)) = cathode {
        Some(Source::Cathode {
            h_signed: h,
            rms,
            p_ev: p,
        })
    } else {
        errors.push(ParseError {
            line: 1,
            column: 1,
            token: String::new(),
            expected: "packet ... or cathode ...".to_string(),
            message: "missing source".to_string(),
        });
        None
    };
    match source {
        Some(source) if errors.is_empty() => Ok(Lattice {
            species,
            source,
            items,
            samples_per_element: samples,
            lorentz_gamma,
        }),
        _ => Err(errors),
    }
}

fn push_element(
    ctx: &mut LineCtx<'_>,
    items: &mut Vec<LatticeItem>,
    el: crate::error::Result<Element>,
) {
    match el {
        Ok(e) => items.push(LatticeItem::Element(e)),
        Err(e) => ctx.err(1, "", "", e.to_string()),
    }
}

fn parse_packet_line(
    raw: &str,
    line_no: usize,
    species: &ParticleSpecies,
    errors: &mut Vec<ParseError>,
) -> Option<PacketSpec> {
    let line = raw.split('#').next().unwrap_or("").trim();
    let tokens: Vec<&str> = line.split_whitespace().collect();
    let mut ctx = LineCtx {
        line_no,
        text: raw,
        errors,
    };
    if tokens.len() < 2 {
        ctx.err(
            1,
            line,
            "packet <family> ...",
            "missing packet family".into(),
        );
        return None;
    }
    let family = match PacketFamily::parse(tokens[1]) {
        Ok(f) => f,
        Err(e) => {
            ctx.err(
                ctx.col_of(tokens[1]),
                tokens[1],
                "gaussian, hg-standard, hg-elegant, lg-standard, lg-elegant",
                e.to_string(),
            );
            return None;
        }
    };
    let pairs = Pairs::collect(&mut ctx, &tokens[2..], &["n", "l", "j", "k", "sigma", "p"]);
    let n = pairs.integer_or(&mut ctx, "n", 0)?;
    let l = pairs.integer_or(&mut ctx, "l", 0)?;
    let j = pairs.integer_or(&mut ctx, "j", 0)?;
    let k = pairs.integer_or(&mut ctx, "k", 0)?;
    let sigma = pairs.quantity(&mut ctx, "sigma", Kind::Length)?;
    let p = pairs.quantity(&mut ctx, "p", Kind::Energy)?;
    if n < 0 || j < 0 || k < 0 {
        ctx.err(1, line, "n, j, k >= 0", "negative order".into());
        return None;
    }
    match PacketSpec::new(
        family,
        n as u32,
        j as u32,
        k as u32,
        l as i32,
        sigma,
        p,
        species.clone(),
    ) {
        Ok(spec) => Some(spec),
        Err(e) => {
            ctx.err(1, line, "", e.to_string());
            None
        }
    }
}

/// Canonical text form; parse(serialize(parse(x))) == parse(x).
pub fn serialize_lattice(lat: &Lattice) -> String {
    let mut out = String::new();
    let builtin = ParticleSpecies::by_name(&lat.species.name).is_ok();
    if builtin {
        out.push_str(&format!("species {}\n", lat.species.name));
    } else {
        out.push_str(&format!(
            "species {} mass={:e}eV Z={}\n",
            lat.species.name, lat.species.mass_ev, lat.species.charge_number
        ));
    }
    match &lat.source {
        Source::Packet(s) => {
            out.push_str(&format!(
                "packet {} n={} l={} j={} k={} sigma={:e}m p={:e}eV\n",
                s.family.label(),
                s.n,
                s.ell,
                s.j,
                s.k,
                s.sigma0,
                s.mean_momentum_ev
            ));
        }
        Source::Cathode {
            h_signed,
            rms,
            p_ev,
        } => {
            out.push_str(&format!(
                "cathode H={h_signed:e}T rms={rms:e}m p={p_ev:e}eV\n"
            ));
        }
    }
    for item in &lat.items {
        match item {
            LatticeItem::Element(e) => {
                let ez = if e.e_z != 0.0 {
                    format!(" Ez={:e}V/m", e.e_z)
                } else {
                    String::new()
                };
                match e.kind {
                    crate::elements::ElementKind::Drift => {
                        out.push_str(&format!("drift L={:e}m\n", e.length));
                    }
                    crate::elements::ElementKind::Solenoid => {
                        out.push_str(&format!(
                            "solenoid H={:e}T L={:e}m{ez}\n",
                            e.h_tesla, e.length
                        ));
                    }
                    crate::elements::ElementKind::ElectrostaticLens => {
                        out.push_str(&format!(
                            "lens Eprime={:e}V/m2 L={:e}m{ez}\n",
                            e.e_rho_prime, e.length
                        ));
                    }
                    crate::elements::ElementKind::CrossedLens => {
                        out.push_str(&format!(
                            "crossed H={:e}T Eprime={:e}V/m2 L={:e}m{ez}\n",
                            e.h_tesla, e.e_rho_prime, e.length
                        ));
                    }
                    crate::elements::ElementKind::PenningTrap => {
                        out.push_str(&format!(
                            "trap a={:e}V/m2 H={:e}T L={:e}m\n",
                            e.penning_a, e.h_tesla, e.length
                        ));
                    }
                }
            }
            LatticeItem::Foil {
                z_in,
                z_out,
                h_signed,
            } => {
                out.push_str(&format!("foil zin={z_in} zout={z_out} H={h_signed:e}T\n"));
            }
        }
    }
    out.push_str(&format!("samples {}\n", lat.samples_per_element));
    if let Some(g) = lat.lorentz_gamma {
        out.push_str(&format!("gamma {g:e}\n"));
    }
    out
}
