//! Plain-text `key=value` configuration with `#` comments.
//!
//! Keys mirror the experiment fields in snake_case; a `scenario` key selects
//! preset defaults and every other key overrides them. Unknown keys are
//! rejected with their line number.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::harness::{ExperimentSpec, InitialProfile, Scenario};

/// One parsed `key = value` assignment with its source line.
#[derive(Debug, Clone)]
pub struct ConfigEntry {
    pub line: usize,
    pub value: String,
}

pub const KNOWN_KEYS: &[&str] = &[
    "scenario",
    "alpha",
    "beta",
    "gamma",
    "delta",
    "flux",
    "u_minus",
    "u_plus",
    "eps",
    "half_length",
    "n_points",
    "dt",
    "t_end",
    "snapshot_every",
    "initial_profile",
    "output_path",
    "refinement_levels",
];

/// Split config text into entries, rejecting unknown keys and bad syntax.
pub fn parse_entries(text: &str) -> Result<BTreeMap<String, ConfigEntry>> {
    let mut entries = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::config(line, format!("expected key=value, got '{raw}'")));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::config(line, format!("unknown key '{key}'")));
        }
        if entries
            .insert(key.clone(), ConfigEntry { line, value })
            .is_some()
        {
            return Err(Error::config(line, format!("duplicate key '{key}'")));
        }
    }
    Ok(entries)
}

fn parse_f64(key: &str, entry: &ConfigEntry) -> Result<f64> {
    entry.value.parse::<f64>().map_err(|_| {
        Error::config(
            entry.line,
            format!("key '{key}' expects a real number, got '{}'", entry.value),
        )
    })
}

fn parse_usize(key: &str, entry: &ConfigEntry) -> Result<usize> {
    entry.value.parse::<usize>().map_err(|_| {
        Error::config(
            entry.line,
            format!("key '{key}' expects a non-negative integer, got '{}'", entry.value),
        )
    })
}

fn parse_scenario(entry: &ConfigEntry) -> Result<Scenario> {
    Scenario::from_name(&entry.value)
        .ok_or_else(|| Error::config(entry.line, format!("unknown scenario '{}'", entry.value)))
}

fn parse_profile(entry: &ConfigEntry) -> Result<InitialProfile> {
    let v = entry.value.as_str();
    if v == "zero_deviation" {
        return Ok(InitialProfile::ZeroDeviation);
    }
    if v == "riemann_step" {
        return Ok(InitialProfile::RiemannStep);
    }
    if let Some(args) = v.strip_prefix("gaussian_bump:") {
        let parts: Vec<&str> = args.split(',').collect();
        if parts.len() == 2 {
            if let (Ok(amplitude), Ok(width)) =
                (parts[0].trim().parse::<f64>(), parts[1].trim().parse::<f64>())
            {
                if width > 0.0 {
                    return Ok(InitialProfile::GaussianBump { amplitude, width });
                }
            }
        }
    }
    Err(Error::config(
        entry.line,
        format!(
            "initial_profile must be zero_deviation, riemann_step, or gaussian_bump:<amp>,<width>; got '{v}'"
        ),
    ))
}

/// Flux spelled as `burgers`, `quartic`, or `poly:a0,a1,...` (ascending powers).
#[derive(Debug, Clone, PartialEq)]
pub enum FluxSpec {
    Burgers,
    Quartic,
    Polynomial(Vec<f64>),
}

fn parse_flux(entry: &ConfigEntry) -> Result<FluxSpec> {
    match entry.value.as_str() {
        "burgers" => Ok(FluxSpec::Burgers),
        "quartic" => Ok(FluxSpec::Quartic),
        other => {
            if let Some(list) = other.strip_prefix("poly:") {
                let coeffs: std::result::Result<Vec<f64>, _> =
                    list.split(',').map(|c| c.trim().parse::<f64>()).collect();
                if let Ok(coeffs) = coeffs {
                    if !coeffs.is_empty() {
                        return Ok(FluxSpec::Polynomial(coeffs));
                    }
                }
            }
            Err(Error::config(
                entry.line,
                format!("flux must be burgers, quartic, or poly:a0,a1,...; got '{other}'"),
            ))
        }
    }
}

/// Parse config text into a fully validated experiment.
///
/// Resolution order: scenario presets first, then every explicit key as an
/// override, then the scenario's variant constraints and the solver-level
/// invariants. Derived quantities (dt, snapshot cadence) are recomputed from
/// the final values unless given explicitly.
pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    let entries = parse_entries(text)?;

    let scenario = match entries.get("scenario") {
        Some(entry) => parse_scenario(entry)?,
        None => Scenario::Custom,
    };
    let mut draft = super::SpecDraft::for_scenario(scenario);

    for (key, entry) in &entries {
        match key.as_str() {
            "scenario" => {}
            "alpha" => draft.alpha = parse_f64(key, entry)?,
            "beta" => draft.beta = parse_f64(key, entry)?,
            "gamma" => draft.gamma = (parse_f64(key, entry)?, Some(entry.line)).into(),
            "delta" => draft.delta = (parse_f64(key, entry)?, Some(entry.line)).into(),
            "flux" => draft.flux = parse_flux(entry)?,
            "u_minus" => draft.u_minus = (parse_f64(key, entry)?, Some(entry.line)).into(),
            "u_plus" => draft.u_plus = (parse_f64(key, entry)?, Some(entry.line)).into(),
            "eps" => draft.eps = parse_f64(key, entry)?,
            "half_length" => draft.half_length = parse_f64(key, entry)?,
            "n_points" => draft.n_points = parse_usize(key, entry)?,
            "dt" => draft.dt = Some(parse_f64(key, entry)?),
            "t_end" => draft.t_end = parse_f64(key, entry)?,
            "snapshot_every" => draft.snapshot_every = Some(parse_usize(key, entry)?),
            "initial_profile" => draft.initial_profile = parse_profile(entry)?,
            "output_path" => draft.output_path = entry.value.clone().into(),
            "refinement_levels" => draft.refinement_levels = parse_usize(key, entry)?,
            _ => unreachable!("unknown keys rejected above"),
        }
    }
    draft.resolve()
}
