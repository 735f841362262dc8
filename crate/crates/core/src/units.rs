//! ITU-T 100 GHz DWDM grid, optical frequency, power and photon-energy conversions.
//!
//! The grid is anchored at 190.0 THz: channel `n` sits at `190.0 THz + n × 100 GHz`,
//! which puts channel 39 at 193.9 THz (1546.12 nm).

use std::fmt;
use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Planck constant, J·s (exact in SI 2019).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const GRID_ANCHOR_HZ: f64 = 190.0e12;
pub const GRID_SPACING_HZ: f64 = 100.0e9;
pub const DEFAULT_CHANNEL_RANGE: RangeInclusive<i32> = 1..=80;

/// Channel number on the 100 GHz ITU-T grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItuChannel(i32);

impl ItuChannel {
    /// Channel within the default validity range 1..=80.
    pub fn new(index: i32) -> Result<Self> {
        Self::with_range(index, DEFAULT_CHANNEL_RANGE)
    }

    pub fn with_range(index: i32, valid: RangeInclusive<i32>) -> Result<Self> {
        if valid.contains(&index) {
            Ok(ItuChannel(index))
        } else {
            Err(Error::invalid(format!(
                "ITU channel {index} outside valid range {}..={}",
                valid.start(),
                valid.end()
            )))
        }
    }

    pub fn index(self) -> i32 {
        self.0
    }

    /// Signed number of grid slots from `self` to `other`.
    pub fn separation(self, other: ItuChannel) -> i32 {
        other.0 - self.0
    }

    pub fn frequency<T: Scalar>(self) -> OpticalFrequency<T> {
        channel_to_frequency(self)
    }

    /// Frequency shift `f(quantum) − f(self)`, the Table-style "shift relative to the quantum channel".
    pub fn shift_from<T: Scalar>(self, quantum: ItuChannel) -> T {
        quantum.frequency::<T>().hz() - self.frequency::<T>().hz()
    }
}

impl fmt::Display for ItuChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Optical carrier frequency in Hz.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct OpticalFrequency<T>(T);

impl<T: Scalar> OpticalFrequency<T> {
    pub fn from_hz(hz: T) -> Result<Self> {
        if hz.is_finite() && hz > T::zero() {
            Ok(OpticalFrequency(hz))
        } else {
            Err(Error::invalid(format!("optical frequency must be positive and finite, got {hz} Hz")))
        }
    }

    pub fn from_wavelength_m(lambda: T) -> Result<Self> {
        if !(lambda.is_finite() && lambda > T::zero()) {
            return Err(Error::invalid(format!("wavelength must be positive, got {lambda} m")));
        }
        Self::from_hz(T::lit(SPEED_OF_LIGHT) / lambda)
    }

    pub fn hz(self) -> T {
        self.0
    }

    pub fn wavelength_m(self) -> T {
        T::lit(SPEED_OF_LIGHT) / self.0
    }

    pub fn angular(self) -> T {
        T::TAU() * self.0
    }
}

/// Optical power in watts.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Power<T>(T);

impl<T: Scalar> Power<T> {
    pub fn from_watts(w: T) -> Result<Self> {
        if w.is_finite() && w >= T::zero() {
            Ok(Power(w))
        } else {
            Err(Error::invalid(format!("power must be finite and non-negative, got {w} W")))
        }
    }

    pub fn from_dbm(dbm: T) -> Result<Self> {
        dbm_to_watts(dbm)
    }

    pub fn zero() -> Self {
        Power(T::zero())
    }

    pub fn watts(self) -> T {
        self.0
    }

    pub fn dbm(self) -> T {
        watts_to_dbm(self)
    }

    pub fn scaled(self, k: T) -> Result<Self> {
        Self::from_watts(self.0 * k)
    }
}

pub fn channel_to_frequency<T: Scalar>(ch: ItuChannel) -> OpticalFrequency<T> {
    let hz = T::lit(GRID_ANCHOR_HZ) + T::from_i32(ch.0).unwrap() * T::lit(GRID_SPACING_HZ);
    OpticalFrequency(hz)
}

/// Nearest grid channel; fails when `f` is more than 1 GHz off-grid or outside 1..=80.
pub fn frequency_to_channel<T: Scalar>(f: OpticalFrequency<T>) -> Result<ItuChannel> {
    let slots = ((f.hz() - T::lit(GRID_ANCHOR_HZ)) / T::lit(GRID_SPACING_HZ))
        .to_f64()
        .unwrap();
    let nearest = slots.round();
    if (slots - nearest).abs() * GRID_SPACING_HZ > 1.0e9 {
        return Err(Error::invalid(format!("{} Hz is not on the 100 GHz grid", f.hz())));
    }
    ItuChannel::new(nearest as i32)
}

pub fn dbm_to_watts<T: Scalar>(dbm: T) -> Result<Power<T>> {
    if dbm.is_nan() {
        return Err(Error::invalid("power in dBm is NaN"));
    }
    Power::from_watts(T::lit(1.0e-3) * T::lit(10.0).powf(dbm / T::lit(10.0)))
}

pub fn watts_to_dbm<T: Scalar>(p: Power<T>) -> T {
    T::lit(10.0) * (p.watts() / T::lit(1.0e-3)).log10()
}

/// Photon energy `h·f` in joules.
pub fn photon_energy<T: Scalar>(f: OpticalFrequency<T>) -> T {
    T::lit(PLANCK) * f.hz()
}

/// Converts a loss in dB into a linear transmission factor.
pub fn db_to_linear_loss<T: Scalar>(db: T) -> T {
    T::lit(10.0).powf(-db / T::lit(10.0))
}

/// Attenuation in dB/km to a natural-log coefficient per km.
pub fn db_per_km_to_per_km<T: Scalar>(db_km: T) -> T {
    db_km * T::LN_10() / T::lit(10.0)
}
