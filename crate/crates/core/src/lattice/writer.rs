//! Trajectory output: CSV (RFC-4180 quoting) and JSON lines. Numbers are
//! printed with 12 significant digits so repeated runs are byte-identical.

use std::io::{self, Write};

use super::TrajectoryRecord;

/// 12-significant-digit scientific form used for every number the tools
/// emit.
pub fn fmt_sig12(v: f64) -> String {
    if v == 0.0 {
        // avoid the "-0" artifact
        return "0.00000000000e0".to_string();
    }
    format!("{v:.11e}")
}

const COLUMNS: [&str; 15] = [
    "t",
    "z",
    "rho2",
    "rho_u",
    "uperp2",
    "eps_rho",
    "m",
    "ell",
    "lz_kin",
    "alpha",
    "beta",
    "gamma",
    "element",
    "kind",
    "classification",
];

fn csv_quote(field: &str) -> String {
    if field.contains(['"', ',', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Write records as CSV with a header row.
pub fn write_csv(out: &mut dyn Write, records: &[TrajectoryRecord]) -> io::Result<()> {
    writeln!(out, "{}", COLUMNS.join(","))?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_sig12(r.t),
            fmt_sig12(r.z),
            fmt_sig12(r.rho2),
            fmt_sig12(r.rho_u),
            fmt_sig12(r.uperp2),
            fmt_sig12(r.eps_rho),
            fmt_sig12(r.m_factor),
            fmt_sig12(r.ell),
            fmt_sig12(r.lz_kin),
            fmt_sig12(r.alpha),
            fmt_sig12(r.beta),
            fmt_sig12(r.gamma),
            r.element_index,
            csv_quote(r.element_kind),
            csv_quote(r.classification),
        )?;
    }
    Ok(())
}

/// Write records as JSON lines (one object per record, fixed key order).
pub fn write_jsonl(out: &mut dyn Write, records: &[TrajectoryRecord]) -> io::Result<()> {
    for r in records {
        writeln!(
            out,
            "{{\"t\":{},\"z\":{},\"rho2\":{},\"rho_u\":{},\"uperp2\":{},\"eps_rho\":{},\
             \"m\":{},\"ell\":{},\"lz_kin\":{},\"alpha\":{},\"beta\":{},\"gamma\":{},\
             \"element\":{},\"kind\":\"{}\",\"classification\":\"{}\"}}",
            fmt_sig12(r.t),
            fmt_sig12(r.z),
            fmt_sig12(r.rho2),
            fmt_sig12(r.rho_u),
            fmt_sig12(r.uperp2),
            fmt_sig12(r.eps_rho),
            fmt_sig12(r.m_factor),
            fmt_sig12(r.ell),
            fmt_sig12(r.lz_kin),
            fmt_sig12(r.alpha),
            fmt_sig12(r.beta),
            fmt_sig12(r.gamma),
            r.element_index,
            r.element_kind,
            r.classification,
        )?;
    }
    Ok(())
}
