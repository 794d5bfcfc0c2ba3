//! Parameter sweeps: independent experiments run in parallel, each writing
//! its own CSV, with one merged index file. Experiments share no mutable
//! state, so per-experiment outputs are deterministic regardless of how the
//! pool schedules them.

use std::path::Path;

use rayon::prelude::*;

use crate::error::Result;
use crate::harness::{run_experiment, ExperimentSpec};

/// One sweep member: either a resolved spec or the reason it was rejected.
#[derive(Debug)]
pub enum SweepItem {
    Valid { label: String, spec: Box<ExperimentSpec> },
    Invalid { label: String, reason: String },
}

#[derive(Debug)]
pub struct SweepEntry {
    pub label: String,
    pub output: String,
    /// None when the experiment never ran (rejected spec or runtime error).
    pub passed: Option<bool>,
    pub detail: String,
}

#[derive(Debug)]
pub struct SweepSummary {
    pub entries: Vec<SweepEntry>,
}

impl SweepSummary {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed == Some(true))
    }

    pub fn render(&self) -> String {
        let mut out = String::from("label,output,result,detail\n");
        for e in &self.entries {
            let result = match e.passed {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "ERROR",
            };
            out.push_str(&format!(
                "{},{},{},{}\n",
                e.label,
                e.output,
                result,
                e.detail.replace(',', ";")
            ));
        }
        out
    }
}

/// Run every valid item (per-experiment failures are recorded, the sweep
/// continues) and write the merged index, preserving item order.
pub fn sweep(items: Vec<SweepItem>, index_path: &Path) -> Result<SweepSummary> {
    let entries: Vec<SweepEntry> = items
        .par_iter()
        .map(|item| match item {
            SweepItem::Invalid { label, reason } => SweepEntry {
                label: label.clone(),
                output: String::new(),
                passed: None,
                detail: reason.clone(),
            },
            SweepItem::Valid { label, spec } => match run_experiment(spec) {
                Ok(outcome) => SweepEntry {
                    label: label.clone(),
                    output: spec.output_path.display().to_string(),
                    passed: Some(outcome.passed()),
                    detail: format!("{} gates", outcome.gates.len()),
                },
                Err(e) => SweepEntry {
                    label: label.clone(),
                    output: spec.output_path.display().to_string(),
                    passed: None,
                    detail: e.to_string(),
                },
            },
        })
        .collect();
    let summary = SweepSummary { entries };
    super::csv::write_text(index_path, &summary.render())?;
    Ok(summary)
}
