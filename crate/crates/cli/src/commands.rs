use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use raman_qkd::calib::{fit_per_plan, fit_single_side, fit_slopes, FitOptions, FitResult, Side, Weighting};
use raman_qkd::fwm::{
    delta_k, effective_length, equivalent_separation, fwm_efficiency, fwm_negligible, grid_products, nonlinear_gamma,
    suppression_ratio, DispersionParams, NonlinearParams, PhaseTerm,
};
use raman_qkd::scan::{keyrate_curve, max_distance_vs_power, SweepSpec, SweepVariable};
use raman_qkd::units::{db_per_km_to_per_km, db_to_linear_loss};
use raman_qkd::{DetectionParams, FiberParams, ItuChannel, Modulation, Parallelism, Power, Reach, SearchOptions};

use crate::config::{parse_range, ScenarioArgs};
use crate::error::{CliError, CliResult};
use crate::output::{sci, Argv, Table};
use crate::plan::resolve_plan;
use crate::records::read_records;

/// A finished run: the CSV table, a human-readable summary, and where the table goes.
pub struct Report {
    pub table: Table,
    pub summary: String,
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct NoiseArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,

    /// Fiber lengths start:stop:step, km
    #[arg(long, allow_hyphen_values = true)]
    pub length_km: String,

    /// Write the CSV here instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct KeyrateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,

    /// Modulation of the classical traffic (psk|ook-rz)
    #[arg(long, default_value = "psk")]
    pub modulation: Modulation,

    /// Fiber lengths start:stop:step, km
    #[arg(long, default_value = "0:200:1", allow_hyphen_values = true)]
    pub length_km: String,

    /// Pulse repetition rate; adds an r_bps column
    #[arg(long)]
    pub clock_hz: Option<f64>,

    /// Write the CSV here instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct MaxdistArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,

    #[arg(long, default_value = "psk")]
    pub modulation: Modulation,

    /// Per-channel launch powers start:stop:step, dBm
    #[arg(long, default_value = "-10:0:1", allow_hyphen_values = true)]
    pub power_dbm_range: String,

    /// Upper end of the distance search, km
    #[arg(long, default_value_t = 200.0)]
    pub max_km: f64,

    /// Coarse scan step, km
    #[arg(long, default_value_t = 1.0)]
    pub coarse_step_km: f64,

    /// Bisection tolerance, km
    #[arg(long, default_value_t = 0.01)]
    pub tolerance_km: f64,

    /// Write the CSV here instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    Poisson,
    Unweighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Stokes,
    AntiStokes,
}

#[derive(Args, Debug, Clone)]
pub struct FitArgs {
    /// Count-record CSV (plan_id,direction,length_km,counts_per_gate,n_gates)
    #[arg(long)]
    pub records: PathBuf,

    /// Plan file for a non-preset plan_id, as ID=PATH (repeatable)
    #[arg(long = "plan-file", value_name = "ID=PATH")]
    pub plan_files: Vec<String>,

    /// Launch power of every classical channel, dBm
    #[arg(long, default_value_t = -10.5, allow_negative_numbers = true)]
    pub power_dbm: f64,

    /// Detector gate width, ns
    #[arg(long, default_value_t = 2.5)]
    pub gate_ns: f64,

    /// Quantum-channel filter bandwidth, GHz
    #[arg(long, default_value_t = 10.0)]
    pub bandwidth_ghz: f64,

    /// Single-photon detector efficiency
    #[arg(long, default_value_t = 0.15)]
    pub spd_efficiency: f64,

    /// Receiver insertion loss ahead of the detector, dB
    #[arg(long, default_value_t = 8.4)]
    pub insertion_loss_db: f64,

    /// Fiber attenuation, km⁻¹
    #[arg(long, default_value_t = 0.0484)]
    pub alpha_per_km: f64,

    /// Dark/background probability per gate, subtracted before fitting
    #[arg(long, default_value_t = 3.6e-5)]
    pub background_per_gate: f64,

    /// Bandwidth the fitted slopes refer to, GHz
    #[arg(long, default_value_t = 10.0)]
    pub ref_bandwidth_ghz: f64,

    #[arg(long, value_enum, default_value = "poisson")]
    pub weighting: WeightingArg,

    /// Fit the background as a free intercept
    #[arg(long)]
    pub fit_intercept: bool,

    /// Fit only one slope (data on one side of the quantum channel)
    #[arg(long, value_enum)]
    pub only_side: Option<SideArg>,

    /// Write the CSV here instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhaseArg {
    Half,
    Full,
}

#[derive(Args, Debug, Clone)]
pub struct FwmArgs {
    /// Channel triple i,j,k; the product lands on i + j − k
    #[arg(long)]
    pub channels: String,

    /// Dispersion at the evaluation wavelength, ps·km⁻¹·nm⁻¹
    #[arg(long, default_value_t = 16.0, allow_negative_numbers = true)]
    pub dc_ps_km_nm: f64,

    /// Dispersion slope, ps·km⁻¹·nm⁻²
    #[arg(long, default_value_t = 0.0667, allow_negative_numbers = true)]
    pub slope_ps_km_nm2: f64,

    /// Wavelength the dispersion is specified at, nm
    #[arg(long, default_value_t = 1550.0)]
    pub lambda_eval_nm: f64,

    /// Fiber length, km
    #[arg(long)]
    pub length_km: f64,

    /// Fiber attenuation, dB/km
    #[arg(long, default_value_t = 0.2)]
    pub alpha_db_km: f64,

    /// Nonlinear index, m²/W
    #[arg(long, default_value = "2.6e-20")]
    pub n2_m2_w: f64,

    /// Effective area, µm²
    #[arg(long, default_value_t = 50.0)]
    pub aeff_um2: f64,

    /// Launch power per channel, dBm
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub power_dbm: f64,

    /// Oscillating term: sin²(ΔkL/2) (half) or sin²(ΔkL) (full)
    #[arg(long, value_enum, default_value = "half")]
    pub phase: PhaseArg,

    /// Write the CSV here instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn scenario_metadata(scenario: &raman_qkd::Scenario<f64>, skip: &[&str]) -> Vec<(String, String)> {
    scenario.describe().into_iter().filter(|(k, _)| !skip.contains(&k.as_str())).collect()
}

const QKD_ONLY_KEYS: [&str; 7] =
    ["mu", "eta_bob", "eta_spd", "misalignment", "alpha_qkd_per_km", "ec_inefficiency", "modulation"];

pub fn noise(args: &NoiseArgs) -> CliResult<Report> {
    let scenario = args.scenario.scenario(Modulation::Psk)?;
    let grid = parse_range(&args.length_km, "length")?;
    if grid.start < 0.0 {
        return Err(CliError::config("lengths must be non-negative"));
    }
    let mut argv = Argv::new("noise");
    args.scenario.echo(&mut argv)?;
    argv.flag("length-km", &args.length_km);

    let xs = grid.points();
    let mut rows = Vec::with_capacity(xs.len());
    let mut last = 0.0;
    for &l in &xs {
        last = scenario.p_srs(l)?;
        rows.push(vec![l.to_string(), sci(last)]);
    }
    let summary = format!(
        "SRS counts per gate, plan {} ({}, {} channels): {} points, {} at {} km\n",
        args.scenario.plan,
        scenario.plan.direction(),
        scenario.plan.data().len(),
        xs.len(),
        sci(last),
        xs.last().unwrap(),
    );
    Ok(Report {
        table: Table {
            argv,
            metadata: scenario_metadata(&scenario, &QKD_ONLY_KEYS),
            columns: vec!["length_km", "counts_per_gate"],
            rows,
        },
        summary,
        output: args.output.clone(),
    })
}

pub fn keyrate(args: &KeyrateArgs, par: Parallelism) -> CliResult<Report> {
    let scenario = args.scenario.scenario(args.modulation)?;
    let grid = parse_range(&args.length_km, "length")?;
    if let Some(c) = args.clock_hz {
        if !(c > 0.0 && c.is_finite()) {
            return Err(CliError::config(format!("clock rate must be positive, got {c} Hz")));
        }
    }
    let mut argv = Argv::new("keyrate");
    args.scenario.echo(&mut argv)?;
    argv.flag("modulation", args.modulation).flag("length-km", &args.length_km).opt_flag("clock-hz", args.clock_hz);

    let spec = SweepSpec { variable: SweepVariable::LengthKm, grid, scenario };
    let curve = keyrate_curve(&spec, par)?;
    let mut columns = vec!["length_km", "q", "e", "y0", "r"];
    if args.clock_hz.is_some() {
        columns.push("r_bps");
    }
    let rows = curve
        .abscissa
        .iter()
        .zip(&curve.values)
        .map(|(l, k)| {
            let mut row = vec![l.to_string(), sci(k.q), sci(k.e), sci(k.y0), sci(k.r)];
            if let Some(c) = args.clock_hz {
                row.push(sci(k.r * c));
            }
            row
        })
        .collect();

    let positive: Vec<f64> = curve.abscissa.iter().zip(&curve.values).filter(|(_, k)| k.r > 0.0).map(|(l, _)| *l).collect();
    let mut summary = format!(
        "key rate, plan {} ({}, {}, {} GHz): {} points\n",
        args.scenario.plan,
        spec.scenario.plan.direction(),
        args.modulation,
        spec.scenario.detection.filter_bandwidth_hz / 1e9,
        curve.values.len()
    );
    match positive.last() {
        Some(l) => writeln!(summary, "  R > 0 up to {l} km on this grid; R(first point) = {}", sci(curve.values[0].r)).unwrap(),
        None => writeln!(summary, "  no positive key rate on this grid").unwrap(),
    }
    Ok(Report {
        table: Table { argv, metadata: curve.metadata, columns, rows },
        summary,
        output: args.output.clone(),
    })
}

fn reach_label(r: Reach) -> &'static str {
    match r {
        Reach::Bounded => "bounded",
        Reach::Infeasible => "infeasible",
        Reach::BeyondRange => "beyond_range",
    }
}

pub fn maxdist(args: &MaxdistArgs, par: Parallelism) -> CliResult<Report> {
    if args.scenario.power_dbm.is_some() {
        return Err(CliError::config("maxdist sweeps the launch power; use --power-dbm-range instead of --power-dbm"));
    }
    let scenario = args.scenario.scenario(args.modulation)?;
    let grid = parse_range(&args.power_dbm_range, "power")?;
    let opts = SearchOptions { max_km: args.max_km, coarse_step_km: args.coarse_step_km, tolerance_km: args.tolerance_km };
    let mut argv = Argv::new("maxdist");
    args.scenario.echo(&mut argv)?;
    argv.flag("modulation", args.modulation)
        .flag("power-dbm-range", &args.power_dbm_range)
        .flag("max-km", args.max_km)
        .flag("coarse-step-km", args.coarse_step_km)
        .flag("tolerance-km", args.tolerance_km);

    let powers = grid.points();
    let sweep = max_distance_vs_power(&scenario, &powers, &opts, par)?;
    let rows = sweep
        .abscissa
        .iter()
        .zip(&sweep.values)
        .map(|(p, d)| vec![p.to_string(), d.length_km.to_string(), reach_label(d.reach).to_string()])
        .collect();
    let mut summary = format!(
        "maximum distance, plan {} ({}, {}, {} GHz)\n",
        args.scenario.plan,
        scenario.plan.direction(),
        args.modulation,
        scenario.detection.filter_bandwidth_hz / 1e9
    );
    for (p, d) in sweep.abscissa.iter().zip(&sweep.values) {
        writeln!(summary, "  {p:>6} dBm  {:>8} km  {}", d.length_km, reach_label(d.reach)).unwrap();
    }
    let mut metadata = vec![("power_dbm_range".to_string(), args.power_dbm_range.clone())];
    metadata.push(("search".into(), format!("0..{} km, coarse {} km, tolerance {} km", args.max_km, args.coarse_step_km, args.tolerance_km)));
    metadata.extend(sweep.metadata.into_iter().filter(|(k, _)| k != "variable"));
    Ok(Report {
        table: Table { argv, metadata, columns: vec!["power_dbm", "max_distance_km", "status"], rows },
        summary,
        output: args.output.clone(),
    })
}

fn fit_row(scope: &str, f: &FitResult<f64>, intercept: bool) -> Vec<String> {
    let mut row = vec![scope.to_string(), sci(f.s_hat), sci(f.s_sigma), sci(f.a_hat), sci(f.a_sigma)];
    if intercept {
        let (b, sb) = f.intercept.unwrap_or((f64::NAN, f64::NAN));
        row.push(sci(b));
        row.push(sci(sb));
    }
    row.push(sci(f.residual_norm));
    row.push(f.n_records.to_string());
    row
}

pub fn fit(args: &FitArgs) -> CliResult<Report> {
    let mut files = std::collections::BTreeMap::new();
    for pf in &args.plan_files {
        let (id, path) = pf
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("--plan-file expects ID=PATH, got `{pf}`")))?;
        files.insert(id.trim().to_string(), path.trim().to_string());
    }
    let power = args.power_dbm;
    let mut plans = |id: &str, dir| match files.get(id) {
        Some(path) => resolve_plan(path, dir, power, None),
        None => resolve_plan(id, dir, power, Some(power)),
    };
    let origin = args.records.display().to_string();
    let file = std::fs::File::open(&args.records)
        .map_err(|e| CliError::config(format!("cannot open records `{origin}`: {e}")))?;
    let records = read_records(file, &origin, &mut plans)?;

    let efficiency = args.spd_efficiency * db_to_linear_loss(args.insertion_loss_db);
    let det = DetectionParams::new(efficiency, args.gate_ns * 1e-9, args.bandwidth_ghz * 1e9, args.background_per_gate)?;
    let fiber = FiberParams::new(args.alpha_per_km, 0.0)?;
    let opts = FitOptions {
        weighting: match args.weighting {
            WeightingArg::Poisson => Weighting::Poisson,
            WeightingArg::Unweighted => Weighting::Unweighted,
        },
        fit_intercept: args.fit_intercept,
        ref_bandwidth_hz: args.ref_bandwidth_ghz * 1e9,
    };

    let mut argv = Argv::new("fit");
    argv.flag("records", &origin);
    for (id, path) in &files {
        argv.flag("plan-file", format!("{id}={path}"));
    }
    argv.flag("power-dbm", args.power_dbm)
        .flag("gate-ns", args.gate_ns)
        .flag("bandwidth-ghz", args.bandwidth_ghz)
        .flag("spd-efficiency", args.spd_efficiency)
        .flag("insertion-loss-db", args.insertion_loss_db)
        .flag("alpha-per-km", args.alpha_per_km)
        .flag("background-per-gate", args.background_per_gate)
        .flag("ref-bandwidth-ghz", args.ref_bandwidth_ghz)
        .flag("weighting", format!("{:?}", args.weighting).to_lowercase())
        .switch("fit-intercept", args.fit_intercept);
    match args.only_side {
        Some(SideArg::Stokes) => argv.flag("only-side", "stokes"),
        Some(SideArg::AntiStokes) => argv.flag("only-side", "anti-stokes"),
        None => &mut argv,
    };

    let direction = records[0].plan.direction();
    let metadata = vec![
        ("records".to_string(), records.len().to_string()),
        ("direction".to_string(), direction.to_string()),
        ("detection_efficiency".to_string(), sci(efficiency)),
        ("gate_s".to_string(), sci(det.gate_s)),
        ("filter_bandwidth_hz".to_string(), sci(det.filter_bandwidth_hz)),
        ("alpha_per_km".to_string(), args.alpha_per_km.to_string()),
        ("background_per_gate".to_string(), sci(args.background_per_gate)),
    ];

    if let Some(side) = args.only_side {
        let side = match side {
            SideArg::Stokes => Side::Stokes,
            SideArg::AntiStokes => Side::AntiStokes,
        };
        let f = fit_single_side(&records, &det, &fiber, args.background_per_gate, &opts, side)?;
        let summary = format!("{side} slope = {} ± {} km⁻¹ ({} records)\n", sci(f.slope), sci(f.sigma), records.len());
        return Ok(Report {
            table: Table {
                argv,
                metadata,
                columns: vec!["side", "slope_per_km", "sigma_per_km"],
                rows: vec![vec![
                    match side {
                        Side::Stokes => "stokes".into(),
                        Side::AntiStokes => "anti-stokes".into(),
                    },
                    sci(f.slope),
                    sci(f.sigma),
                ]],
            },
            summary,
            output: args.output.clone(),
        });
    }

    let joint = fit_slopes(&records, &det, &fiber, args.background_per_gate, &opts)?;
    let mut rows = vec![fit_row("joint", &joint, args.fit_intercept)];
    let mut summary = format!(
        "joint fit ({} records, {direction}): s = {} ± {} km⁻¹, a = {} ± {} km⁻¹, residual {}\n",
        joint.n_records,
        sci(joint.s_hat),
        sci(joint.s_sigma),
        sci(joint.a_hat),
        sci(joint.a_sigma),
        sci(joint.residual_norm)
    );
    let n_plans = records.iter().map(|r| r.plan_id.as_str()).collect::<std::collections::BTreeSet<_>>().len();
    if n_plans >= 3 {
        let spread = fit_per_plan(&records, &det, &fiber, args.background_per_gate, &opts)?;
        for (id, f) in &spread.per_plan {
            rows.push(fit_row(&format!("without_{id}"), f, args.fit_intercept));
        }
        writeln!(
            summary,
            "leave-one-plan-out over {} plans: s = {} ± {} km⁻¹, a = {} ± {} km⁻¹",
            spread.per_plan.len(),
            sci(spread.s_mean),
            sci(spread.s_std),
            sci(spread.a_mean),
            sci(spread.a_std)
        )
        .unwrap();
    }
    let mut columns = vec!["scope", "s_per_km", "s_sigma_per_km", "a_per_km", "a_sigma_per_km"];
    if args.fit_intercept {
        columns.extend(["intercept", "intercept_sigma"]);
    }
    columns.extend(["residual_norm", "n_records"]);
    Ok(Report { table: Table { argv, metadata, columns, rows }, summary, output: args.output.clone() })
}

fn parse_triple(s: &str) -> CliResult<[ItuChannel; 3]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [i, j, k] = parts.as_slice() else {
        return Err(CliError::config(format!("--channels expects i,j,k, got `{s}`")));
    };
    let ch = |x: &str| -> CliResult<ItuChannel> {
        let n: i32 = x.parse().map_err(|_| CliError::config(format!("invalid channel `{x}`")))?;
        Ok(ItuChannel::new(n)?)
    };
    Ok([ch(i)?, ch(j)?, ch(k)?])
}

pub fn fwm(args: &FwmArgs) -> CliResult<Report> {
    let [i, j, k] = parse_triple(&args.channels)?;
    if k == i || k == j {
        return Err(CliError::config("channel k must differ from both pumps i and j"));
    }
    if !(args.length_km > 0.0 && args.length_km.is_finite()) {
        return Err(CliError::config(format!("length must be positive, got {} km", args.length_km)));
    }
    let nl = NonlinearParams::new(args.n2_m2_w, args.aeff_um2 * 1e-12)?;
    let disp = DispersionParams::from_engineering_units(args.dc_ps_km_nm, args.slope_ps_km_nm2, args.lambda_eval_nm * 1e-9)?;
    let alpha_per_m = db_per_km_to_per_km(args.alpha_db_km) / 1e3;
    let length_m = args.length_km * 1e3;
    let p0 = Power::from_dbm(args.power_dbm)?;
    let phase = match args.phase {
        PhaseArg::Half => PhaseTerm::HalfArgument,
        PhaseArg::Full => PhaseTerm::FullArgument,
    };

    let (fi, fj, fk) = (i.frequency::<f64>(), j.frequency::<f64>(), k.frequency::<f64>());
    let gamma = nonlinear_gamma(&nl, fk.hz());
    let neg = fwm_negligible(gamma, p0, length_m);
    let l_eff = effective_length(alpha_per_m, length_m);
    let dk = delta_k(&disp, fi, fj, fk);
    let eta = fwm_efficiency(alpha_per_m, dk, length_m, phase)?;
    let eta0 = fwm_efficiency(alpha_per_m, 0.0, length_m, phase)?;
    let ratio = suppression_ratio(alpha_per_m, dk, length_m, phase)?;
    let product = i.index() + j.index() - k.index();

    let rows: Vec<Vec<String>> = [
        ("gamma_per_w_per_m", sci(gamma)),
        ("nonlinear_phase", sci(neg.nonlinear_phase)),
        ("negligible", neg.negligible.to_string()),
        ("margin", sci(neg.margin)),
        ("effective_length_m", sci(l_eff)),
        ("nonlinear_phase_effective_length", sci(gamma * p0.watts() * l_eff)),
        ("delta_f_eq_hz", sci(equivalent_separation(fi.hz(), fj.hz(), fk.hz()))),
        ("delta_k_per_m", sci(dk)),
        ("eta_fwm", sci(eta)),
        ("eta_fwm_matched", sci(eta0)),
        ("suppression_ratio", sci(ratio)),
        ("product_channel", product.to_string()),
    ]
    .into_iter()
    .map(|(q, v)| vec![q.to_string(), v])
    .collect();

    let mut argv = Argv::new("fwm");
    argv.flag("channels", format!("{},{},{}", i.index(), j.index(), k.index()))
        .flag("dc-ps-km-nm", args.dc_ps_km_nm)
        .flag("slope-ps-km-nm2", args.slope_ps_km_nm2)
        .flag("lambda-eval-nm", args.lambda_eval_nm)
        .flag("length-km", args.length_km)
        .flag("alpha-db-km", args.alpha_db_km)
        .flag("n2-m2-w", args.n2_m2_w)
        .flag("aeff-um2", args.aeff_um2)
        .flag("power-dbm", args.power_dbm)
        .flag("phase", format!("{:?}", args.phase).to_lowercase());

    let mut summary = format!(
        "FWM, pumps {i} and {j}, channel {k}, product on {product}\n  γ = {} W⁻¹m⁻¹, γP₀L = {} ({}), with L_eff: {}\n  Δk = {} m⁻¹, η_FWM = {}, suppression ratio = {}\n",
        sci(gamma),
        sci(neg.nonlinear_phase),
        if neg.negligible { "negligible" } else { "not negligible" },
        sci(gamma * p0.watts() * l_eff),
        sci(dk),
        sci(eta),
        sci(ratio),
    );
    let products = grid_products(&[i, j, k]);
    let listed: Vec<String> = products
        .iter()
        .map(|g| format!("{}+{}-{}→{}", g.i, g.j, g.k, g.product))
        .collect();
    writeln!(summary, "  grid products of these channels: {}", listed.join(", ")).unwrap();

    let metadata = vec![
        ("alpha_per_m".to_string(), sci(alpha_per_m)),
        ("d_c_s_per_m2".to_string(), sci(disp.d_c)),
        ("d_slope_s_per_m3".to_string(), sci(disp.d_slope)),
        ("a_eff_m2".to_string(), sci(nl.a_eff_m2)),
        ("power_w".to_string(), sci(p0.watts())),
    ];
    Ok(Report {
        table: Table { argv, metadata, columns: vec!["quantity", "value"], rows },
        summary,
        output: args.output.clone(),
    })
}
