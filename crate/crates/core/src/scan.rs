//! Sweeps of the key-rate model and maximum-reach search.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qkd::{secure_key_rate, KeyRatePoint, Modulation, QkdSystemParams};
use crate::raman::{srs_counts_multi, ChannelPlan, DetectionParams, FiberParams, RamanSlopes};
use crate::scalar::Scalar;
use crate::units::Power;

/// Full description of one coexistence scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub plan: ChannelPlan<T>,
    pub slopes: RamanSlopes<T>,
    pub fiber: FiberParams<T>,
    pub detection: DetectionParams<T>,
    pub qkd: QkdSystemParams<T>,
    pub modulation: Modulation,
}

impl<T: Scalar> Scenario<T> {
    pub fn validate(&self) -> Result<()> {
        if self.plan.direction() != self.slopes.direction {
            return Err(Error::DirectionMismatch { plan: self.plan.direction(), slopes: self.slopes.direction });
        }
        self.fiber.validate()?;
        self.detection.validate()?;
        self.qkd.validate()
    }

    /// SRS counts per gate reaching the receiver after `length_km`.
    pub fn p_srs(&self, length_km: T) -> Result<T> {
        srs_counts_multi(&self.plan, length_km, &self.slopes, &self.fiber, &self.detection)
    }

    pub fn key_rate(&self, length_km: T) -> Result<KeyRatePoint<T>> {
        secure_key_rate(&self.qkd, self.modulation, self.p_srs(length_km)?, length_km)
    }

    pub fn with_power(&self, power: Power<T>) -> Self {
        Scenario { plan: self.plan.with_uniform_power(power), ..self.clone() }
    }

    pub fn with_bandwidth(&self, bandwidth_hz: T) -> Self {
        let mut s = self.clone();
        s.detection.filter_bandwidth_hz = bandwidth_hz;
        s
    }

    /// Key/value echo of every input, in a fixed order.
    pub fn describe(&self) -> Vec<(String, String)> {
        let channels: Vec<String> = self
            .plan
            .data()
            .iter()
            .map(|d| format!("{}@{:e}W", d.channel, d.power.watts()))
            .collect();
        let ec = match &self.qkd.error_correction {
            crate::qkd::ErrorCorrection::Constant(f) => format!("{f}"),
            crate::qkd::ErrorCorrection::Table(points) => {
                points.iter().map(|(e, f)| format!("{e}:{f}")).collect::<Vec<_>>().join(" ")
            }
        };
        vec![
            ("quantum_channel".into(), self.plan.quantum().to_string()),
            ("direction".into(), self.plan.direction().to_string()),
            ("data_channels".into(), channels.join(" ")),
            ("slope_stokes_per_km".into(), format!("{:e}", self.slopes.stokes_per_km)),
            ("slope_anti_stokes_per_km".into(), format!("{:e}", self.slopes.anti_stokes_per_km)),
            ("slope_ref_bandwidth_hz".into(), format!("{:e}", self.slopes.ref_bandwidth_hz)),
            ("alpha_mean_per_km".into(), format!("{}", self.fiber.alpha_mean_per_km)),
            ("alpha_quantum_per_km".into(), format!("{}", self.fiber.alpha_quantum_per_km)),
            ("excess_loss_db".into(), format!("{}", self.fiber.excess_loss_db)),
            ("detection_efficiency".into(), format!("{}", self.detection.efficiency)),
            ("gate_s".into(), format!("{:e}", self.detection.gate_s)),
            ("filter_bandwidth_hz".into(), format!("{:e}", self.detection.filter_bandwidth_hz)),
            ("mu".into(), format!("{}", self.qkd.mu)),
            ("eta_bob".into(), format!("{}", self.qkd.eta_bob)),
            ("eta_spd".into(), format!("{}", self.qkd.eta_spd)),
            ("p_dark".into(), format!("{:e}", self.qkd.p_dark)),
            ("misalignment".into(), format!("{}", self.qkd.misalignment)),
            ("alpha_qkd_per_km".into(), format!("{}", self.qkd.alpha_per_km)),
            ("ec_inefficiency".into(), ec),
            ("modulation".into(), self.modulation.to_string()),
        ]
    }
}

/// Inclusive arithmetic grid `start, start + step, …, ≤ stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T> {
    pub start: T,
    pub stop: T,
    pub step: T,
}

impl<T: Scalar> Grid<T> {
    pub fn new(start: T, stop: T, step: T) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(Error::Config("grid bounds must be finite".into()));
        }
        if start > stop {
            return Err(Error::Config(format!("grid start {start} exceeds stop {stop}")));
        }
        if !(step > T::zero()) {
            return Err(Error::Config(format!("grid step must be positive, got {step}")));
        }
        Ok(Grid { start, stop, step })
    }

    pub fn len(&self) -> usize {
        let n = ((self.stop - self.start) / self.step + T::lit(1e-9)).floor();
        n.to_usize().unwrap() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid points, snapped to 12 significant digits so `0.1`-style steps print cleanly.
    pub fn points(&self) -> Vec<T> {
        (0..self.len())
            .map(|i| {
                let x = self.start + T::from_usize(i).unwrap() * self.step;
                let snapped: f64 = format!("{:.11e}", x.to_f64().unwrap()).parse().unwrap();
                T::lit(snapped)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    LengthKm,
    PowerDbm,
    BandwidthHz,
}

impl SweepVariable {
    pub fn column(self) -> &'static str {
        match self {
            SweepVariable::LengthKm => "length_km",
            SweepVariable::PowerDbm => "power_dbm",
            SweepVariable::BandwidthHz => "bandwidth_hz",
        }
    }
}

/// How sweep points are evaluated; results are identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    #[default]
    Sequential,
    /// Rayon's current thread pool.
    Parallel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec<T> {
    pub variable: SweepVariable,
    pub grid: Grid<T>,
    pub scenario: Scenario<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<T, P> {
    pub variable: SweepVariable,
    pub abscissa: Vec<T>,
    pub values: Vec<P>,
    pub metadata: Vec<(String, String)>,
}

fn evaluate<T, P, F>(xs: &[T], parallelism: Parallelism, f: F) -> Result<Vec<P>>
where
    T: Scalar,
    P: Send,
    F: Fn(T) -> Result<P> + Sync,
{
    match parallelism {
        Parallelism::Sequential => xs.iter().map(|&x| f(x)).collect(),
        Parallelism::Parallel => xs.par_iter().map(|&x| f(x)).collect::<Vec<_>>().into_iter().collect(),
    }
}

fn metadata<T: Scalar>(spec_variable: SweepVariable, grid: &Grid<T>, scenario: &Scenario<T>) -> Vec<(String, String)> {
    let mut m = vec![
        ("variable".to_string(), spec_variable.column().to_string()),
        ("grid".to_string(), format!("{}:{}:{}", grid.start, grid.stop, grid.step)),
    ];
    m.extend(scenario.describe());
    m
}

/// Key rate at every length of the grid; SRS is recomputed per point.
pub fn keyrate_curve<T: Scalar>(spec: &SweepSpec<T>, parallelism: Parallelism) -> Result<SweepResult<T, KeyRatePoint<T>>> {
    if spec.variable != SweepVariable::LengthKm {
        return Err(Error::Config(format!("key-rate curves sweep length_km, not {}", spec.variable.column())));
    }
    spec.scenario.validate()?;
    if spec.grid.start < T::zero() {
        return Err(Error::Config("lengths must be non-negative".into()));
    }
    let xs = spec.grid.points();
    let values = evaluate(&xs, parallelism, |l| spec.scenario.key_rate(l))?;
    Ok(SweepResult { variable: spec.variable, abscissa: xs, values, metadata: metadata(spec.variable, &spec.grid, &spec.scenario) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions<T> {
    pub max_km: T,
    pub coarse_step_km: T,
    pub tolerance_km: T,
}

impl<T: Scalar> Default for SearchOptions<T> {
    fn default() -> Self {
        SearchOptions { max_km: T::lit(200.0), coarse_step_km: T::one(), tolerance_km: T::lit(0.01) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reach {
    /// Key rate turns non-positive inside the search range.
    Bounded,
    /// No positive rate even at zero length.
    Infeasible,
    /// Still positive at the end of the search range.
    BeyondRange,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxDistance<T> {
    pub length_km: T,
    pub reach: Reach,
}

impl<T: Scalar> MaxDistance<T> {
    pub fn feasible(&self) -> bool {
        self.reach != Reach::Infeasible
    }
}

/// Largest length with a positive key rate: coarse scan, then bisection.
///
/// The coarse scan must show at most one sign change, from positive to
/// non-positive; anything else is reported as [`Error::AmbiguousRoot`].
pub fn max_distance<T: Scalar>(scenario: &Scenario<T>, opts: &SearchOptions<T>) -> Result<MaxDistance<T>> {
    scenario.validate()?;
    max_distance_by(opts, |l| scenario.key_rate(l))
}

/// [`max_distance`] for an arbitrary rate-vs-length model.
pub fn max_distance_by<T, F>(opts: &SearchOptions<T>, rate: F) -> Result<MaxDistance<T>>
where
    T: Scalar,
    F: Fn(T) -> Result<KeyRatePoint<T>>,
{
    if !(opts.coarse_step_km > T::zero() && opts.tolerance_km > T::zero() && opts.max_km > T::zero()) {
        return Err(Error::Config("search step, tolerance and range must be positive".into()));
    }
    let positive = |l: T| -> Result<bool> { Ok(rate(l)?.r > T::zero()) };

    let grid = Grid::new(T::zero(), opts.max_km, opts.coarse_step_km)?.points();
    let signs = grid.iter().map(|&l| positive(l)).collect::<Result<Vec<bool>>>()?;
    let changes: Vec<usize> = (1..signs.len()).filter(|&i| signs[i] != signs[i - 1]).collect();

    if !signs[0] {
        if changes.is_empty() {
            return Ok(MaxDistance { length_km: T::zero(), reach: Reach::Infeasible });
        }
        return Err(Error::AmbiguousRoot { sign_changes: changes.len(), first_km: grid[changes[0]].to_f64().unwrap() });
    }
    match changes.as_slice() {
        [] => Ok(MaxDistance { length_km: *grid.last().unwrap(), reach: Reach::BeyondRange }),
        [i] => {
            let (mut lo, mut hi) = (grid[i - 1], grid[*i]);
            while hi - lo > opts.tolerance_km {
                let mid = (lo + hi) / T::two();
                if positive(mid)? {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(MaxDistance { length_km: lo, reach: Reach::Bounded })
        }
        _ => Err(Error::AmbiguousRoot { sign_changes: changes.len(), first_km: grid[changes[0]].to_f64().unwrap() }),
    }
}

/// Maximum reach as a function of the uniform per-channel launch power.
pub fn max_distance_vs_power<T: Scalar>(
    scenario: &Scenario<T>,
    powers_dbm: &[T],
    opts: &SearchOptions<T>,
    parallelism: Parallelism,
) -> Result<SweepResult<T, MaxDistance<T>>> {
    let values = evaluate(powers_dbm, parallelism, |p| max_distance(&scenario.with_power(Power::from_dbm(p)?), opts))?;
    let mut meta = vec![("variable".to_string(), SweepVariable::PowerDbm.column().to_string())];
    meta.extend(scenario.describe());
    Ok(SweepResult { variable: SweepVariable::PowerDbm, abscissa: powers_dbm.to_vec(), values, metadata: meta })
}

/// Maximum reach swept over launch power or filter bandwidth.
pub fn max_distance_sweep<T: Scalar>(
    spec: &SweepSpec<T>,
    opts: &SearchOptions<T>,
    parallelism: Parallelism,
) -> Result<SweepResult<T, MaxDistance<T>>> {
    let xs = spec.grid.points();
    let values = match spec.variable {
        SweepVariable::PowerDbm => {
            evaluate(&xs, parallelism, |p| max_distance(&spec.scenario.with_power(Power::from_dbm(p)?), opts))?
        }
        SweepVariable::BandwidthHz => {
            if !(spec.grid.start > T::zero()) {
                return Err(Error::Config("bandwidths must be positive".into()));
            }
            evaluate(&xs, parallelism, |b| max_distance(&spec.scenario.with_bandwidth(b), opts))?
        }
        SweepVariable::LengthKm => {
            return Err(Error::Config("maximum reach cannot be swept over length".into()));
        }
    };
    Ok(SweepResult { variable: spec.variable, abscissa: xs, values, metadata: metadata(spec.variable, &spec.grid, &spec.scenario) })
}
