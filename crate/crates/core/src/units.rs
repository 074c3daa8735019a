//! Unit-suffixed quantity parsing shared by the lattice format and the CLI
//! (`10nm`, `1T`, `100keV`, `-2e8V/m2`, `295K`, `0.19mrad`, `5cm`, `1ps`).
//! Bare numbers are taken in the SI base unit of the requested kind.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// meters
    Length,
    /// tesla
    Field,
    /// eV
    Energy,
    /// V/m^2
    EFieldGradient,
    /// V/m
    EField,
    /// kelvin
    Temperature,
    /// radians
    Angle,
    /// seconds
    Time,
    /// unitless
    Dimensionless,
}

impl Kind {
    fn suffixes(&self) -> &'static [(&'static str, f64)] {
        match self {
            Kind::Length => &[
                ("pm", 1e-12),
                ("nm", 1e-9),
                ("um", 1e-6),
                ("mm", 1e-3),
                ("cm", 1e-2),
                ("km", 1e3),
                ("m", 1.0),
            ],
            Kind::Field => &[
                ("mT", 1e-3),
                ("uT", 1e-6),
                ("kG", 0.1),
                ("G", 1e-4),
                ("T", 1.0),
            ],
            Kind::Energy => &[
                ("meV", 1e-3),
                ("keV", 1e3),
                ("MeV", 1e6),
                ("GeV", 1e9),
                ("eV", 1.0),
            ],
            Kind::EFieldGradient => &[("kV/m2", 1e3), ("V/m2", 1.0), ("V/m^2", 1.0)],
            Kind::EField => &[("kV/m", 1e3), ("MV/m", 1e6), ("V/m", 1.0)],
            Kind::Temperature => &[("mK", 1e-3), ("K", 1.0)],
            Kind::Angle => &[
                ("mrad", 1e-3),
                ("urad", 1e-6),
                ("rad", 1.0),
                ("deg", std::f64::consts::PI / 180.0),
            ],
            Kind::Time => &[
                ("fs", 1e-15),
                ("ps", 1e-12),
                ("ns", 1e-9),
                ("us", 1e-6),
                ("ms", 1e-3),
                ("s", 1.0),
            ],
            Kind::Dimensionless => &[],
        }
    }

    pub fn base_unit(&self) -> &'static str {
        match self {
            Kind::Length => "m",
            Kind::Field => "T",
            Kind::Energy => "eV",
            Kind::EFieldGradient => "V/m2",
            Kind::EField => "V/m",
            Kind::Temperature => "K",
            Kind::Angle => "rad",
            Kind::Time => "s",
            Kind::Dimensionless => "",
        }
    }
}

/// Parse a quantity like `10nm` or `-2e8V/m2` into SI base units.
/// Bare numbers are taken in the base unit of `kind`.
pub fn parse_quantity(text: &str, kind: Kind) -> Result<f64> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::NonPhysical("empty quantity".into()));
    }
    for (suffix, factor) in kind.suffixes() {
        if let Some(num) = s.strip_suffix(suffix) {
            let num = num.trim_end();
            if num.is_empty() {
                break;
            }
            return num
                .parse::<f64>()
                .map(|v| v * factor)
                .map_err(|_| bad(text, kind));
        }
    }
    s.parse::<f64>().map_err(|_| bad(text, kind))
}

fn bad(text: &str, kind: Kind) -> Error {
    let units: Vec<&str> = kind.suffixes().iter().map(|(s, _)| *s).collect();
    Error::NonPhysical(format!(
        "cannot parse `{text}` as {:?} (bare numbers are {}; accepted suffixes: {})",
        kind,
        if kind.base_unit().is_empty() {
            "unitless"
        } else {
            kind.base_unit()
        },
        units.join(", ")
    ))
}
