//! Count-record CSV input: `plan_id,direction,length_km,counts_per_gate,n_gates`.

use std::collections::BTreeMap;
use std::io::Read;

use raman_qkd::calib::CountRecord;
use raman_qkd::{ChannelPlan, Direction};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Deserialize)]
struct Row {
    plan_id: String,
    direction: String,
    length_km: f64,
    counts_per_gate: f64,
    n_gates: u64,
}

/// Reads records; `plans` maps every `plan_id` to its channel plan.
///
/// `#` lines are skipped, so files written by this tool can be read back.
pub fn read_records<R: Read>(
    input: R,
    origin: &str,
    plans: &mut dyn FnMut(&str, Direction) -> CliResult<ChannelPlan<f64>>,
) -> CliResult<Vec<CountRecord<f64>>> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(input);
    let mut cache: BTreeMap<(String, String), ChannelPlan<f64>> = BTreeMap::new();
    let mut out = Vec::new();
    for result in reader.deserialize::<Row>() {
        let row = result.map_err(|e| CliError::config(format!("{origin}: {e}")))?;
        let at = |msg: String| CliError::config(format!("{origin}: record {}: {msg}", out.len() + 1));
        let direction: Direction = row.direction.parse().map_err(|e: raman_qkd::Error| at(e.to_string()))?;
        if !(row.length_km >= 0.0 && row.length_km.is_finite()) {
            return Err(at(format!("length_km must be non-negative, got {}", row.length_km)));
        }
        if !(row.counts_per_gate >= 0.0 && row.counts_per_gate.is_finite()) {
            return Err(at(format!("counts_per_gate must be non-negative, got {}", row.counts_per_gate)));
        }
        if row.n_gates == 0 {
            return Err(at("n_gates must be positive".into()));
        }
        let key = (row.plan_id.clone(), direction.to_string());
        let plan = match cache.get(&key) {
            Some(p) => p.clone(),
            None => {
                let p = plans(&row.plan_id, direction).map_err(|e| at(e.to_string()))?;
                cache.insert(key, p.clone());
                p
            }
        };
        out.push(CountRecord {
            plan_id: row.plan_id,
            plan,
            z_km: row.length_km,
            counts_per_gate: row.counts_per_gate,
            n_gates: row.n_gates,
        });
    }
    if out.is_empty() {
        return Err(CliError::config(format!("{origin}: no records")));
    }
    Ok(out)
}
