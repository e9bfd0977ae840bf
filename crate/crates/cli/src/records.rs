//! `records.csv`: one row per emitted diagnostics record.
//!
//! Columns are [`DiagnosticsRecord::scalar_columns`] followed by one
//! `E_sup_<k>` column per configured radius. Floats are written as
//! `{:.16e}` (17 significant digits), which round-trips every `f64`.

use std::fmt::Write as _;

use pwf_core::diagnostics::DiagnosticsRecord;

pub fn header(radii: usize) -> String {
    let mut cols: Vec<String> = DiagnosticsRecord::scalar_columns()
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.extend((0..radii).map(|k| format!("E_sup_{k}")));
    cols.join(",")
}

fn float(out: &mut String, x: f64) {
    write!(out, ",{x:.16e}").unwrap();
}

pub fn row(r: &DiagnosticsRecord) -> String {
    let mut out = format!("{}", r.step);
    float(&mut out, r.t);
    float(&mut out, r.dt);
    write!(out, ",{}", r.retries).unwrap();
    for x in [
        r.w,
        r.sff_energy,
        r.gauss_bonnet_defect,
        r.defect_sup,
        r.alpha_min,
        r.alpha_max,
        r.alpha_osc,
        r.l_star,
        r.a,
        r.b,
        r.dlogb_dt,
        r.dh_dt_norm,
        r.tangential_l1,
        r.dh_dt_l1,
        r.alpha_rate_residual,
        r.codazzi_r1,
        r.codazzi_r2,
    ] {
        float(&mut out, x);
    }
    for &e in &r.e_sup {
        float(&mut out, e);
    }
    out
}

pub fn to_csv(records: &[DiagnosticsRecord]) -> String {
    let radii = records.first().map_or(0, |r| r.e_sup.len());
    let mut out = header(radii);
    out.push('\n');
    for r in records {
        out.push_str(&row(r));
        out.push('\n');
    }
    out
}

/// Reads one named column back as floats.
pub fn column(csv: &str, name: &str) -> Option<Vec<f64>> {
    let mut lines = csv.lines();
    let idx = lines.next()?.split(',').position(|c| c == name)?;
    lines
        .map(|l| l.split(',').nth(idx).and_then(|v| v.parse().ok()))
        .collect()
}
