//! CSV emission with a fixed column set: resolved-spec echo as leading
//! `#` comments, one row per snapshot, and a trailing `#` gate summary.
//! Floats are written with Rust's shortest round-trip formatting, so
//! identical runs produce byte-identical files.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::diagnostics::DiagnosticsReport;
use crate::error::Result;
use crate::harness::{ExperimentSpec, Gate};
use crate::solver::SimulationRecord;

pub const CSV_COLUMNS: &[&str] = &[
    "t",
    "l2_phi",
    "h1_phi",
    "h2_phi",
    "h3_phi",
    "sup_phi",
    "sup_dx_phi",
    "sup_dx2_phi",
    "weighted_l2",
    "energy_residual",
    "apriori_accum",
    "sup_err_u",
    "sup_err_dxu",
    "sup_err_dx2u",
    "sobolev_margin_0",
    "sobolev_margin_1",
    "sobolev_margin_2",
];

pub fn render_csv(
    spec: &ExperimentSpec,
    record: &SimulationRecord,
    reports: &[DiagnosticsReport],
    gates: &[Gate],
) -> String {
    let mut out = String::new();
    for line in spec.echo_lines() {
        out.push_str("# ");
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str(&CSV_COLUMNS.join(","));
    out.push('\n');
    for r in reports {
        let row = [
            r.t,
            r.l2_phi,
            r.h1_phi,
            r.h2_phi,
            r.h3_phi,
            r.sup_phi,
            r.sup_dx_phi,
            r.sup_dx2_phi,
            r.weighted_l2,
            r.energy_residual,
            r.apriori_accum,
            r.sup_err_u,
            r.sup_err_dxu,
            r.sup_err_dx2u,
            r.sobolev_margin_0,
            r.sobolev_margin_1,
            r.sobolev_margin_2,
        ];
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out.push_str(&format!(
        "# leak_warnings={}\n",
        record.leak_warnings.len()
    ));
    for gate in gates {
        out.push_str(&format!(
            "# gate {}: {} ({})\n",
            gate.name,
            if gate.passed { "PASS" } else { "FAIL" },
            gate.detail
        ));
    }
    let all_pass = gates.iter().all(|g| g.passed);
    out.push_str(&format!(
        "# result: {}\n",
        if all_pass { "PASS" } else { "FAIL" }
    ));
    out
}

pub fn write_csv(
    spec: &ExperimentSpec,
    record: &SimulationRecord,
    reports: &[DiagnosticsReport],
    gates: &[Gate],
) -> Result<()> {
    write_text(&spec.output_path, &render_csv(spec, record, reports, gates))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut file = fs::File::create(path)?;
    file.write_all(text.as_bytes())?;
    Ok(())
}
