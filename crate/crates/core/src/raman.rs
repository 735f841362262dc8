//! Spontaneous Raman scattering (SRS) noise leaking into the quantum channel.
//!
//! A classical channel at launch power `P₀` produces, per detection gate of
//! length `τ`, the following number of noise counts after a fiber of length `z`:
//!
//! ```text
//! co:      P₀ · β · z · exp(−ᾱz)              · η τ / (hν)
//! counter: P₀ · β · (1 − exp(−2ᾱz)) / (2α_q)  · η τ / (hν)
//! ```
//!
//! `β` follows a v-shaped linear model around the quantum channel: the Stokes
//! slope `s` applies to data channels on lower grid numbers, the anti-Stokes
//! slope `a` to data channels on higher grid numbers, both per 100 GHz of
//! separation and normalized to a reference filter bandwidth. Several channels
//! add up linearly since they share the same propagation kernel.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::units::{db_to_linear_loss, photon_energy, ItuChannel, OpticalFrequency, Power};

/// Largest channel separation for which the linear slope model is trusted.
pub const LINEAR_MODEL_MAX_SEPARATION: i32 = 15;

/// Channel number of the quantum channel used in the measured channel combinations.
pub const REFERENCE_QUANTUM_CHANNEL: i32 = 39;

/// Propagation direction of the classical traffic relative to the quantum signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Co,
    Counter,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Co => "co",
            Direction::Counter => "counter",
        })
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "co" | "co-propagating" => Ok(Direction::Co),
            "counter" | "counter-propagating" => Ok(Direction::Counter),
            other => Err(Error::invalid(format!("unknown direction `{other}` (expected co|counter)"))),
        }
    }
}

/// Slopes of the per-channel SRS coefficient, km⁻¹ per 100 GHz of separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanSlopes<T> {
    pub stokes_per_km: T,
    pub anti_stokes_per_km: T,
    pub ref_bandwidth_hz: T,
    pub direction: Direction,
}

impl<T: Scalar> RamanSlopes<T> {
    pub fn new(stokes_per_km: T, anti_stokes_per_km: T, ref_bandwidth_hz: T, direction: Direction) -> Result<Self> {
        if !(stokes_per_km > T::zero() && stokes_per_km.is_finite()) {
            return Err(Error::invalid(format!("Stokes slope must be positive, got {stokes_per_km}")));
        }
        if !(anti_stokes_per_km > T::zero() && anti_stokes_per_km.is_finite()) {
            return Err(Error::invalid(format!("anti-Stokes slope must be positive, got {anti_stokes_per_km}")));
        }
        if !(ref_bandwidth_hz > T::zero() && ref_bandwidth_hz.is_finite()) {
            return Err(Error::invalid(format!("reference bandwidth must be positive, got {ref_bandwidth_hz}")));
        }
        Ok(RamanSlopes { stokes_per_km, anti_stokes_per_km, ref_bandwidth_hz, direction })
    }

    /// Measured SMF-28 slopes at 10 GHz detection bandwidth.
    pub fn measured(direction: Direction) -> Self {
        let (s, a) = match direction {
            Direction::Co => (6.9e-12, 11.5e-12),
            Direction::Counter => (6.8e-12, 10.8e-12),
        };
        RamanSlopes {
            stokes_per_km: T::lit(s),
            anti_stokes_per_km: T::lit(a),
            ref_bandwidth_hz: T::lit(10.0e9),
            direction,
        }
    }

    /// One standard deviation of the measured slopes, same layout as [`RamanSlopes::measured`].
    pub fn measured_spread(direction: Direction) -> (T, T) {
        match direction {
            Direction::Co => (T::lit(1.6e-12), T::lit(1.0e-12)),
            Direction::Counter => (T::lit(1.3e-12), T::lit(0.9e-12)),
        }
    }
}

/// A populated classical channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataChannel<T> {
    pub channel: ItuChannel,
    pub power: Power<T>,
}

/// Quantum channel plus the classical channels sharing the fiber.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPlan<T> {
    quantum: ItuChannel,
    data: Vec<DataChannel<T>>,
    direction: Direction,
}

impl<T: Scalar> ChannelPlan<T> {
    pub fn new(quantum: ItuChannel, data: Vec<DataChannel<T>>, direction: Direction) -> Result<Self> {
        for (i, d) in data.iter().enumerate() {
            if d.channel == quantum {
                return Err(Error::invalid(format!("channel {} is the quantum channel and cannot carry data", d.channel)));
            }
            if data[..i].iter().any(|o| o.channel == d.channel) {
                return Err(Error::invalid(format!("channel {} listed twice", d.channel)));
            }
        }
        Ok(ChannelPlan { quantum, data, direction })
    }

    /// Plan with the same launch power on every listed channel.
    pub fn uniform(quantum: ItuChannel, channels: &[ItuChannel], power: Power<T>, direction: Direction) -> Result<Self> {
        let data = channels.iter().map(|&channel| DataChannel { channel, power }).collect();
        Self::new(quantum, data, direction)
    }

    pub fn quantum(&self) -> ItuChannel {
        self.quantum
    }

    pub fn data(&self) -> &[DataChannel<T>] {
        &self.data
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn with_uniform_power(&self, power: Power<T>) -> Self {
        let data = self.data.iter().map(|d| DataChannel { channel: d.channel, power }).collect();
        ChannelPlan { quantum: self.quantum, data, direction: self.direction }
    }

    pub fn scaled_powers(&self, k: T) -> Result<Self> {
        let data = self
            .data
            .iter()
            .map(|d| Ok(DataChannel { channel: d.channel, power: d.power.scaled(k)? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(ChannelPlan { quantum: self.quantum, data, direction: self.direction })
    }

    pub fn total_power(&self) -> Power<T> {
        let w = self.data.iter().fold(T::zero(), |acc, d| acc + d.power.watts());
        Power::from_watts(w).expect("sum of non-negative powers")
    }
}

/// Populated channels of the measured combinations `A`..`G` around quantum channel 39.
pub fn measured_combination(name: &str) -> Option<&'static [i32]> {
    const A: &[i32] = &[40, 38, 37];
    const B: &[i32] = &[40, 38, 37, 36];
    const C: &[i32] = &[44, 40, 38, 37, 36, 35];
    const D: &[i32] = &[44, 40, 38, 37, 36, 35, 30, 29];
    const E: &[i32] = &[45, 44, 40, 38, 37, 36, 35, 30, 29, 28];
    const F: &[i32] = &[45, 44, 40, 38, 37, 36, 35, 30, 29, 28, 27];
    const G: &[i32] = &[50, 49, 45, 44, 40, 38, 37, 36, 35, 30, 29, 28, 27, 25];
    match name {
        "A" => Some(A),
        "B" => Some(B),
        "C" => Some(C),
        "D" => Some(D),
        "E" => Some(E),
        "F" => Some(F),
        "G" => Some(G),
        _ => None,
    }
}

pub const COMBINATION_NAMES: [&str; 7] = ["A", "B", "C", "D", "E", "F", "G"];

/// Builds one of the measured combinations with a uniform per-channel power.
pub fn combination_plan<T: Scalar>(name: &str, power: Power<T>, direction: Direction) -> Result<ChannelPlan<T>> {
    let channels = measured_combination(name)
        .ok_or_else(|| Error::Config(format!("unknown channel combination `{name}` (expected A..G)")))?
        .iter()
        .map(|&n| ItuChannel::new(n))
        .collect::<Result<Vec<_>>>()?;
    ChannelPlan::uniform(ItuChannel::new(REFERENCE_QUANTUM_CHANNEL)?, &channels, power, direction)
}

/// Detection side of the quantum receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionParams<T> {
    /// End-to-end detection efficiency.
    pub efficiency: T,
    pub gate_s: T,
    pub filter_bandwidth_hz: T,
    /// Dark-count probability per gate and per detector.
    pub p_dark: T,
}

impl<T: Scalar> DetectionParams<T> {
    pub fn new(efficiency: T, gate_s: T, filter_bandwidth_hz: T, p_dark: T) -> Result<Self> {
        let d = DetectionParams { efficiency, gate_s, filter_bandwidth_hz, p_dark };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.efficiency > T::zero() && self.efficiency <= T::one()) {
            return Err(Error::invalid(format!("detection efficiency must be in (0, 1], got {}", self.efficiency)));
        }
        if !(self.gate_s > T::zero() && self.gate_s.is_finite()) {
            return Err(Error::invalid(format!("gate duration must be positive, got {}", self.gate_s)));
        }
        if !(self.filter_bandwidth_hz > T::zero() && self.filter_bandwidth_hz.is_finite()) {
            return Err(Error::invalid(format!("filter bandwidth must be positive, got {}", self.filter_bandwidth_hz)));
        }
        if !(self.p_dark >= T::zero() && self.p_dark < T::one()) {
            return Err(Error::invalid(format!("dark-count probability must be in [0, 1), got {}", self.p_dark)));
        }
        Ok(())
    }
}

/// Fiber attenuation seen by the Raman kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberParams<T> {
    /// Average attenuation over data and quantum wavelengths, km⁻¹ (natural log).
    pub alpha_mean_per_km: T,
    /// Attenuation at the quantum wavelength, km⁻¹; enters the counter-propagating prefactor.
    pub alpha_quantum_per_km: T,
    /// Lumped non-fiber loss applied after the kernel, dB.
    pub excess_loss_db: T,
}

impl<T: Scalar> FiberParams<T> {
    pub fn new(alpha_mean_per_km: T, excess_loss_db: T) -> Result<Self> {
        let f = FiberParams { alpha_mean_per_km, alpha_quantum_per_km: alpha_mean_per_km, excess_loss_db };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_mean_per_km > T::zero() && self.alpha_mean_per_km.is_finite()) {
            return Err(Error::invalid(format!("mean attenuation must be positive, got {}", self.alpha_mean_per_km)));
        }
        if !(self.alpha_quantum_per_km > T::zero() && self.alpha_quantum_per_km.is_finite()) {
            return Err(Error::invalid(format!("quantum-channel attenuation must be positive, got {}", self.alpha_quantum_per_km)));
        }
        if !(self.excess_loss_db >= T::zero() && self.excess_loss_db.is_finite()) {
            return Err(Error::invalid(format!("excess loss must be non-negative, got {} dB", self.excess_loss_db)));
        }
        Ok(())
    }
}

/// Effective SRS coefficient (km⁻¹) of data channel `ch` into quantum channel `q`.
pub fn beta_coefficient<T: Scalar>(slopes: &RamanSlopes<T>, ch: ItuChannel, q: ItuChannel, bandwidth_hz: T) -> Result<T> {
    if ch == q {
        return Err(Error::invalid(format!("data channel {ch} coincides with the quantum channel")));
    }
    if !(bandwidth_hz > T::zero()) {
        return Err(Error::invalid(format!("bandwidth must be positive, got {bandwidth_hz}")));
    }
    let sep = q.separation(ch);
    if sep.abs() > LINEAR_MODEL_MAX_SEPARATION {
        log::warn!(
            "channel {ch} is {} slots from quantum channel {q}; linear Raman model validated only up to {LINEAR_MODEL_MAX_SEPARATION}",
            sep.abs()
        );
    }
    let slope = if sep < 0 { slopes.stokes_per_km } else { slopes.anti_stokes_per_km };
    Ok(slope * T::from_i32(sep.abs()).unwrap() * (bandwidth_hz / slopes.ref_bandwidth_hz))
}

/// Co-propagating kernel `z·exp(−ᾱz)`, km.
pub fn co_kernel<T: Scalar>(z_km: T, fiber: &FiberParams<T>) -> T {
    z_km * (-fiber.alpha_mean_per_km * z_km).exp()
}

/// Counter-propagating kernel `(1 − exp(−2ᾱz)) / (2α_q)`, km.
pub fn counter_kernel<T: Scalar>(z_km: T, fiber: &FiberParams<T>) -> T {
    -(-T::two() * fiber.alpha_mean_per_km * z_km).exp_m1() / (T::two() * fiber.alpha_quantum_per_km)
}

pub fn kernel<T: Scalar>(direction: Direction, z_km: T, fiber: &FiberParams<T>) -> T {
    match direction {
        Direction::Co => co_kernel(z_km, fiber),
        Direction::Counter => counter_kernel(z_km, fiber),
    }
}

/// `η·τ/(hν)` times the excess-loss factor: converts scattered power (W) into counts per gate.
pub fn photons_per_gate_per_watt<T: Scalar>(fiber: &FiberParams<T>, det: &DetectionParams<T>, f_q: OpticalFrequency<T>) -> T {
    det.efficiency * det.gate_s / photon_energy(f_q) * db_to_linear_loss(fiber.excess_loss_db)
}

fn check_length<T: Scalar>(z_km: T) -> Result<()> {
    if z_km >= T::zero() && z_km.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("fiber length must be finite and non-negative, got {z_km} km")))
    }
}

/// SRS counts per gate from a single classical channel.
pub fn srs_counts_single<T: Scalar>(
    direction: Direction,
    p0: Power<T>,
    z_km: T,
    beta_per_km: T,
    fiber: &FiberParams<T>,
    det: &DetectionParams<T>,
    f_q: OpticalFrequency<T>,
) -> Result<T> {
    check_length(z_km)?;
    Ok(p0.watts() * beta_per_km * kernel(direction, z_km, fiber) * photons_per_gate_per_watt(fiber, det, f_q))
}

/// `Σᵢ βᵢ·P₀,ᵢ` over the plan, W·km⁻¹.
pub fn weighted_beta_power<T: Scalar>(plan: &ChannelPlan<T>, slopes: &RamanSlopes<T>, bandwidth_hz: T) -> Result<T> {
    plan.data().iter().try_fold(T::zero(), |acc, d| {
        Ok(acc + beta_coefficient(slopes, d.channel, plan.quantum(), bandwidth_hz)? * d.power.watts())
    })
}

/// SRS counts per gate summed over every classical channel of `plan`.
pub fn srs_counts_multi<T: Scalar>(
    plan: &ChannelPlan<T>,
    z_km: T,
    slopes: &RamanSlopes<T>,
    fiber: &FiberParams<T>,
    det: &DetectionParams<T>,
) -> Result<T> {
    if plan.direction() != slopes.direction {
        return Err(Error::DirectionMismatch { plan: plan.direction(), slopes: slopes.direction });
    }
    check_length(z_km)?;
    let source = weighted_beta_power(plan, slopes, det.filter_bandwidth_hz)?;
    let f_q = plan.quantum().frequency::<T>();
    Ok(source * kernel(plan.direction(), z_km, fiber) * photons_per_gate_per_watt(fiber, det, f_q))
}
