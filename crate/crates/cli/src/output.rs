//! Report formatting.
//!
//! CSV output uses fixed 12-significant-digit scientific notation so repeat
//! runs diff byte for byte; every CSV starts with a header row. JSON reports
//! are pretty-printed with the effective config embedded.

use std::io::Write;

use statedet::PartnerSet64;

use crate::experiments::{ConvergeReport, JSymmetryReport, ScatterReport};

/// 12 significant digits, scientific.
pub fn fmt_sig(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn scatter_csv(report: &ScatterReport) -> String {
    let mut out = String::from("d_before,d_after\n");
    for (before, after) in &report.rows {
        out.push_str(&fmt_sig(*before));
        out.push(',');
        out.push_str(&fmt_sig(*after));
        out.push('\n');
    }
    out
}

pub fn converge_csv(report: &ConvergeReport) -> String {
    let mut out = String::from("cycle,distance,residual\n");
    for (cycle, distance, residual) in &report.rows {
        out.push_str(&format!(
            "{cycle},{},{}\n",
            fmt_sig(*distance),
            fmt_sig(*residual)
        ));
    }
    out.push_str(&format!(
        "# median_contraction_factor = {}\n",
        fmt_sig(report.median_contraction)
    ));
    out
}

/// Trace rows as `cycle,residual,distance`; the distance column is empty
/// when no reference state was available.
pub fn trace_csv(entries: &[(usize, f64, Option<f64>)]) -> String {
    let mut out = String::from("cycle,residual,distance\n");
    for (cycle, residual, distance) in entries {
        out.push_str(&format!(
            "{cycle},{},{}\n",
            fmt_sig(*residual),
            distance.map(fmt_sig).unwrap_or_default()
        ));
    }
    out
}

pub fn partners_csv(set: &PartnerSet64) -> String {
    let mut out = String::from("partner_id,hits,max_residual\n");
    for (id, (hits, residuals)) in set
        .hit_counts()
        .iter()
        .zip(set.residual_matrix())
        .enumerate()
    {
        let max_residual = residuals.iter().cloned().fold(0.0f64, f64::max);
        out.push_str(&format!("{id},{hits},{}\n", fmt_sig(max_residual)));
    }
    out
}

pub fn j_symmetry_csv(report: &JSymmetryReport) -> String {
    let mut out = String::from("family,samples,verified,enum_checked,enum_confirmed\n");
    for f in &report.families {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            f.family, f.samples, f.verified, f.enumeration_checked, f.enumeration_confirmed
        ));
    }
    out
}

pub fn to_json_pretty<T: serde::Serialize>(value: &T) -> anyhow::Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// Writes to the path, or stdout when none is given.
pub fn emit(out: Option<&str>, content: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content)?;
            Ok(())
        }
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}
