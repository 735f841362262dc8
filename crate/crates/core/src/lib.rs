//! Noise and key-rate models for quantum key distribution sharing a DWDM fiber
//! with classical traffic.
//!
//! Spontaneous Raman scattering from the classical channels is the dominant
//! impairment; four-wave mixing is checked for negligibility. The key rate uses
//! the decoy-state BB84 bound with the Raman counts folded into the vacuum
//! yield.
//!
//! All models are generic over [`Scalar`] (`f32` or `f64`). The `*64` aliases
//! below are the usual entry points.

pub mod calib;
pub mod error;
pub mod fwm;
pub mod qkd;
pub mod raman;
pub mod scalar;
pub mod scan;
pub mod units;

pub use error::{Error, Result};
pub use qkd::{ErrorCorrection, KeyRatePoint, Modulation, QkdSystemParams};
pub use raman::{ChannelPlan, DataChannel, DetectionParams, Direction, FiberParams, RamanSlopes};
pub use scalar::Scalar;
pub use scan::{MaxDistance, Parallelism, Reach, Scenario, SearchOptions};
pub use units::{ItuChannel, OpticalFrequency, Power};

pub type ChannelPlan64 = ChannelPlan<f64>;
pub type RamanSlopes64 = RamanSlopes<f64>;
pub type FiberParams64 = FiberParams<f64>;
pub type DetectionParams64 = DetectionParams<f64>;
pub type QkdSystemParams64 = QkdSystemParams<f64>;
pub type Scenario64 = Scenario<f64>;
pub type KeyRatePoint64 = KeyRatePoint<f64>;
pub type FitResult64 = calib::FitResult<f64>;
pub type CountRecord64 = calib::CountRecord<f64>;

pub type ChannelPlan32 = ChannelPlan<f32>;
pub type Scenario32 = Scenario<f32>;
pub type KeyRatePoint32 = KeyRatePoint<f32>;
