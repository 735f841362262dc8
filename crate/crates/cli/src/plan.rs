//! Channel plans: bundled presets A–G and a small plan-file format.
//!
//! ```text
//! # metro ring, east span
//! name = east
//! quantum_channel = 39
//! power_dbm = 0
//!
//! [channels]
//! # channel  [power_dbm]
//! 40
//! 38  -3
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use raman_qkd::raman::{measured_combination, REFERENCE_QUANTUM_CHANNEL};
use raman_qkd::{ChannelPlan, DataChannel, Direction, ItuChannel, Power};

use crate::error::{CliError, CliResult};

/// Canonical preset name if `spec` names one.
pub fn preset_name(spec: &str) -> Option<String> {
    let upper = spec.trim().to_ascii_uppercase();
    measured_combination(&upper).map(|_| upper)
}

/// Plan from a preset name or a plan file; `power_override` replaces every channel power.
pub fn resolve_plan(
    spec: &str,
    direction: Direction,
    default_power_dbm: f64,
    power_override: Option<f64>,
) -> CliResult<ChannelPlan<f64>> {
    let plan = if let Some(name) = preset_name(spec) {
        let power = Power::from_dbm(power_override.unwrap_or(default_power_dbm))?;
        raman_qkd::raman::combination_plan(&name, power, direction)?
    } else {
        let path = Path::new(spec);
        if !path.is_file() {
            return Err(CliError::config(format!("`{spec}` is neither a preset (A–G) nor a readable plan file")));
        }
        let text = std::fs::read_to_string(path)?;
        parse_plan(&text, spec, direction, default_power_dbm)?
    };
    match power_override {
        Some(p) => Ok(plan.with_uniform_power(Power::from_dbm(p)?)),
        None => Ok(plan),
    }
}

/// Parses plan-file text; `origin` prefixes error messages.
pub fn parse_plan(text: &str, origin: &str, direction: Direction, default_power_dbm: f64) -> CliResult<ChannelPlan<f64>> {
    let err = |line: usize, msg: String| CliError::config(format!("{origin}:{line}: {msg}"));
    let mut keys: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut rows: Vec<(usize, i32, Option<f64>)> = Vec::new();
    let mut in_table = false;

    for (idx, raw) in text.lines().enumerate() {
        let n = idx + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            if line != "[channels]" {
                return Err(err(n, format!("unknown section `{line}`")));
            }
            if in_table {
                return Err(err(n, "second [channels] section".into()));
            }
            in_table = true;
            continue;
        }
        if !in_table {
            let Some((k, v)) = line.split_once('=') else {
                return Err(err(n, format!("expected `key = value`, got `{line}`")));
            };
            let k = k.trim().to_string();
            if !["name", "quantum_channel", "power_dbm"].contains(&k.as_str()) {
                return Err(err(n, format!("unknown key `{k}` (expected name, quantum_channel, power_dbm)")));
            }
            if let Some((first, _)) = keys.get(&k) {
                return Err(err(n, format!("key `{k}` already set on line {first}")));
            }
            keys.insert(k, (n, v.trim().to_string()));
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|f| !f.is_empty()).collect();
        if fields.len() > 2 {
            return Err(err(n, format!("expected `channel [power_dbm]`, got `{line}`")));
        }
        let ch: i32 = fields[0].parse().map_err(|_| err(n, format!("invalid channel number `{}`", fields[0])))?;
        let power = match fields.get(1) {
            Some(p) => Some(p.parse::<f64>().map_err(|_| err(n, format!("invalid power `{p}` dBm")))?),
            None => None,
        };
        rows.push((n, ch, power));
    }

    let parse_key = |k: &str| -> CliResult<Option<f64>> {
        match keys.get(k) {
            None => Ok(None),
            Some((n, v)) => v.parse::<f64>().map(Some).map_err(|_| err(*n, format!("`{k}` must be a number, got `{v}`"))),
        }
    };
    let quantum = match keys.get("quantum_channel") {
        None => ItuChannel::new(REFERENCE_QUANTUM_CHANNEL)?,
        Some((n, v)) => {
            let idx: i32 = v.parse().map_err(|_| err(*n, format!("invalid quantum channel `{v}`")))?;
            ItuChannel::new(idx).map_err(|e| err(*n, e.to_string()))?
        }
    };
    let file_power = parse_key("power_dbm")?.unwrap_or(default_power_dbm);

    let mut seen: BTreeMap<i32, usize> = BTreeMap::new();
    let mut data = Vec::with_capacity(rows.len());
    for (n, ch, power) in rows {
        if ch == quantum.index() {
            return Err(err(n, format!("channel {ch} is the quantum channel and cannot carry classical traffic")));
        }
        if let Some(first) = seen.insert(ch, n) {
            return Err(err(n, format!("channel {ch} already listed on line {first}")));
        }
        let channel = ItuChannel::new(ch).map_err(|e| err(n, e.to_string()))?;
        let power = Power::from_dbm(power.unwrap_or(file_power)).map_err(|e| err(n, e.to_string()))?;
        data.push(DataChannel { channel, power });
    }
    Ok(ChannelPlan::new(quantum, data, direction)?)
}
