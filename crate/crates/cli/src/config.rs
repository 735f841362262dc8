//! Scenario options shared by `noise`, `keyrate` and `maxdist`.

use std::collections::BTreeMap;

use clap::Args;
use raman_qkd::qkd::ErrorCorrection;
use raman_qkd::{DetectionParams, Direction, FiberParams, Modulation, QkdSystemParams, RamanSlopes, Scenario};

use crate::error::{CliError, CliResult};
use crate::output::Argv;
use crate::plan::{preset_name, resolve_plan};

/// Keys accepted by `--set`, with their defaults.
pub const OVERRIDE_KEYS: [(&str, &str); 16] = [
    ("qkd.mu", "0.5"),
    ("qkd.eta_bob", "0.045"),
    ("qkd.eta_spd", "1"),
    ("qkd.p_dark", "0.85e-6"),
    ("qkd.misalignment", "0.033"),
    ("qkd.alpha_per_km", "0.0484"),
    ("qkd.ec_inefficiency", "1.22"),
    ("detection.efficiency", "qkd.eta_bob * qkd.eta_spd"),
    ("detection.gate_ns", "--gate-ns"),
    ("detection.bandwidth_ghz", "--bandwidth-ghz"),
    ("fiber.alpha_mean_per_km", "0.0484"),
    ("fiber.alpha_quantum_per_km", "fiber.alpha_mean_per_km"),
    ("fiber.excess_loss_db", "0"),
    ("slopes.stokes_per_km", "measured, per direction"),
    ("slopes.anti_stokes_per_km", "measured, per direction"),
    ("slopes.ref_bandwidth_ghz", "10"),
];

#[derive(Args, Debug, Clone)]
pub struct ScenarioArgs {
    /// Channel plan: preset A–G or a plan file
    #[arg(long)]
    pub plan: String,

    /// Propagation direction of the classical traffic (co|counter)
    #[arg(long, default_value = "co")]
    pub direction: Direction,

    /// Launch power of every classical channel, dBm [presets: 0]
    #[arg(long, value_name = "DBM", allow_negative_numbers = true)]
    pub power_dbm: Option<f64>,

    /// Quantum-channel filter bandwidth, GHz
    #[arg(long, default_value_t = 10.0)]
    pub bandwidth_ghz: f64,

    /// Detector gate width, ns
    #[arg(long, default_value_t = 1.0)]
    pub gate_ns: f64,

    /// Parameter override KEY=VALUE (repeatable)
    ///
    /// Keys: qkd.{mu, eta_bob, eta_spd, p_dark, misalignment, alpha_per_km, ec_inefficiency},
    /// detection.{efficiency, gate_ns, bandwidth_ghz},
    /// fiber.{alpha_mean_per_km, alpha_quantum_per_km, excess_loss_db},
    /// slopes.{stokes_per_km, anti_stokes_per_km, ref_bandwidth_ghz}.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl ScenarioArgs {
    fn parsed_overrides(&self) -> CliResult<BTreeMap<String, f64>> {
        let mut map = BTreeMap::new();
        for o in &self.overrides {
            let Some((k, v)) = o.split_once('=') else {
                return Err(CliError::config(format!("override `{o}` is not KEY=VALUE")));
            };
            let k = k.trim();
            if !OVERRIDE_KEYS.iter().any(|(key, _)| *key == k) {
                let known: Vec<&str> = OVERRIDE_KEYS.iter().map(|(k, _)| *k).collect();
                return Err(CliError::config(format!("unknown override key `{k}`; known keys: {}", known.join(", "))));
            }
            let value: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::config(format!("override `{k}` needs a number, got `{}`", v.trim())))?;
            map.insert(k.to_string(), value);
        }
        Ok(map)
    }

    /// Appends the canonical form of these options.
    pub fn echo(&self, argv: &mut Argv) -> CliResult<()> {
        let plan = preset_name(&self.plan).unwrap_or_else(|| self.plan.clone());
        argv.flag("plan", plan)
            .flag("direction", self.direction)
            .opt_flag("power-dbm", self.power_dbm)
            .flag("bandwidth-ghz", self.bandwidth_ghz)
            .flag("gate-ns", self.gate_ns);
        for (k, v) in self.parsed_overrides()? {
            argv.flag("set", format!("{k}={}", crate::output::num(v)));
        }
        Ok(())
    }

    pub fn scenario(&self, modulation: Modulation) -> CliResult<Scenario<f64>> {
        let o = self.parsed_overrides()?;
        let get = |k: &str, default: f64| o.get(k).copied().unwrap_or(default);

        let qkd = QkdSystemParams {
            mu: get("qkd.mu", 0.5),
            eta_bob: get("qkd.eta_bob", 0.045),
            eta_spd: get("qkd.eta_spd", 1.0),
            p_dark: get("qkd.p_dark", 0.85e-6),
            misalignment: get("qkd.misalignment", 0.033),
            alpha_per_km: get("qkd.alpha_per_km", 0.0484),
            error_correction: ErrorCorrection::Constant(get("qkd.ec_inefficiency", 1.22)),
        };
        qkd.validate()?;

        let detection = DetectionParams::new(
            get("detection.efficiency", qkd.detection_efficiency()),
            get("detection.gate_ns", self.gate_ns) * 1e-9,
            get("detection.bandwidth_ghz", self.bandwidth_ghz) * 1e9,
            qkd.p_dark,
        )?;

        let mut fiber = FiberParams::new(get("fiber.alpha_mean_per_km", 0.0484), get("fiber.excess_loss_db", 0.0))?;
        fiber.alpha_quantum_per_km = get("fiber.alpha_quantum_per_km", fiber.alpha_mean_per_km);
        fiber.validate()?;

        let measured = RamanSlopes::measured(self.direction);
        let slopes = RamanSlopes::new(
            get("slopes.stokes_per_km", measured.stokes_per_km),
            get("slopes.anti_stokes_per_km", measured.anti_stokes_per_km),
            get("slopes.ref_bandwidth_ghz", 10.0) * 1e9,
            self.direction,
        )?;

        let plan = resolve_plan(&self.plan, self.direction, 0.0, self.power_dbm)?;
        let scenario = Scenario { plan, slopes, fiber, detection, qkd, modulation };
        scenario.validate()?;
        Ok(scenario)
    }
}

/// Inclusive `start:stop:step` range.
pub fn parse_range(s: &str, what: &str) -> CliResult<raman_qkd::scan::Grid<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(CliError::config(format!("{what} range must be start:stop:step, got `{s}`")));
    };
    let num = |x: &str| {
        x.trim().parse::<f64>().map_err(|_| CliError::config(format!("{what} range: `{x}` is not a number")))
    };
    raman_qkd::scan::Grid::new(num(a)?, num(b)?, num(c)?).map_err(|e| CliError::config(format!("{what} range: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(overrides: &[&str]) -> ScenarioArgs {
        ScenarioArgs {
            plan: "a".into(),
            direction: Direction::Counter,
            power_dbm: None,
            bandwidth_ghz: 10.0,
            gate_ns: 1.0,
            overrides: overrides.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn defaults() {
        let s = args(&[]).scenario(Modulation::Psk).unwrap();
        assert_eq!(s.qkd, QkdSystemParams::gys());
        assert_eq!(s.detection.efficiency, 0.045);
        assert_eq!(s.detection.gate_s, 1e-9);
        assert_eq!(s.detection.filter_bandwidth_hz, 10e9);
        assert_eq!(s.slopes, RamanSlopes::measured(Direction::Counter));
        assert_eq!(s.fiber.alpha_quantum_per_km, 0.0484);
    }

    #[test]
    fn overrides_apply_and_win() {
        let s = args(&["qkd.mu=0.4", "detection.bandwidth_ghz=100", "fiber.alpha_mean_per_km=0.05", "qkd.mu=0.3"])
            .scenario(Modulation::Psk)
            .unwrap();
        assert_eq!(s.qkd.mu, 0.3);
        assert_eq!(s.detection.filter_bandwidth_hz, 100e9);
        assert_eq!(s.fiber.alpha_quantum_per_km, 0.05);
    }

    #[test]
    fn bad_overrides() {
        assert!(args(&["qkd.nu=0.4"]).scenario(Modulation::Psk).unwrap_err().to_string().contains("unknown override"));
        assert!(args(&["qkd.mu"]).scenario(Modulation::Psk).is_err());
        assert!(args(&["qkd.mu=abc"]).scenario(Modulation::Psk).is_err());
        assert!(args(&["qkd.mu=-1"]).scenario(Modulation::Psk).is_err());
    }

    #[test]
    fn echo_is_canonical() {
        let mut argv = Argv::new("keyrate");
        args(&["qkd.mu=0.4", "fiber.excess_loss_db=1", "qkd.mu=0.3"]).echo(&mut argv).unwrap();
        assert_eq!(
            argv.shell_line(),
            "raman-qkd keyrate --plan A --direction counter --bandwidth-ghz 10 --gate-ns 1 --set fiber.excess_loss_db=1 --set qkd.mu=0.3"
        );
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0:60:10", "length").unwrap().len(), 7);
        assert!(parse_range("0:60", "length").is_err());
        assert!(parse_range("10:0:1", "length").is_err());
        assert!(parse_range("0:1:0", "length").is_err());
    }
}
