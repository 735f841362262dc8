//! Decoy-state BB84 secure key rate in the infinite-decoy limit.
//!
//! Noise from the fiber enters only through the vacuum yield
//! `Y₀ = 2·p_dark + κ·p_srs`, where κ is the duty-cycle factor of the
//! classical modulation format. Everything else follows the weak-coherent
//! source model: Poisson photon numbers with mean μ, yields
//! `Yₙ = Y₀ + 1 − (1 − η)ⁿ`, and the GLLP-style lower bound on the rate.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Modulation format of the classical traffic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modulation {
    /// Phase-shift keying, constant envelope.
    Psk,
    /// On-off keying, return to zero.
    OokRz,
}

impl Modulation {
    pub fn kappa<T: Scalar>(self) -> T {
        match self {
            Modulation::Psk => T::one(),
            Modulation::OokRz => T::lit(0.25),
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modulation::Psk => "psk",
            Modulation::OokRz => "ook-rz",
        })
    }
}

impl FromStr for Modulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "psk" => Ok(Modulation::Psk),
            "ook-rz" | "ook_rz" | "ookrz" => Ok(Modulation::OokRz),
            other => Err(Error::invalid(format!("unknown modulation `{other}` (expected psk|ook-rz)"))),
        }
    }
}

/// Error-correction inefficiency f(E) relative to the Shannon limit.
#[derive(Debug, Clone, PartialEq)]
pub enum ErrorCorrection<T> {
    Constant(T),
    /// Piecewise-linear over `(E, f)` points sorted by E, held constant beyond the ends.
    Table(Vec<(T, T)>),
}

/// Fallback inefficiency used when no table is supplied.
pub const DEFAULT_EC_INEFFICIENCY: f64 = 1.22;

impl<T: Scalar> Default for ErrorCorrection<T> {
    fn default() -> Self {
        ErrorCorrection::Constant(T::lit(DEFAULT_EC_INEFFICIENCY))
    }
}

impl<T: Scalar> ErrorCorrection<T> {
    pub fn table(mut points: Vec<(T, T)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("error-correction table is empty"));
        }
        if points.iter().any(|&(e, f)| !(e.is_finite() && f.is_finite() && f >= T::one())) {
            return Err(Error::invalid("error-correction table entries must be finite with f ≥ 1"));
        }
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid("error-correction table has duplicate QBER abscissae"));
        }
        Ok(ErrorCorrection::Table(points))
    }

    pub fn factor(&self, e: T) -> T {
        match self {
            ErrorCorrection::Constant(f) => *f,
            ErrorCorrection::Table(points) => {
                let first = points[0];
                let last = points[points.len() - 1];
                if e <= first.0 {
                    return first.1;
                }
                if e >= last.0 {
                    return last.1;
                }
                let hi = points.partition_point(|p| p.0 <= e);
                let (e0, f0) = points[hi - 1];
                let (e1, f1) = points[hi];
                f0 + (f1 - f0) * (e - e0) / (e1 - e0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QkdSystemParams<T> {
    /// Mean photon number per signal pulse.
    pub mu: T,
    pub eta_bob: T,
    pub eta_spd: T,
    /// Dark-count probability per gate, per detector.
    pub p_dark: T,
    pub misalignment: T,
    /// Fiber attenuation at the quantum wavelength, km⁻¹ (natural log).
    pub alpha_per_km: T,
    pub error_correction: ErrorCorrection<T>,
}

impl<T: Scalar> QkdSystemParams<T> {
    /// GYS system values used for the coexistence study: μ = 0.5, η_bob·η_spd = 0.045,
    /// p_dark = 0.85e-6, α = 0.0484 km⁻¹, misalignment 0.033, f(E) = 1.22.
    pub fn gys() -> Self {
        QkdSystemParams {
            mu: T::lit(0.5),
            eta_bob: T::lit(0.045),
            eta_spd: T::one(),
            p_dark: T::lit(0.85e-6),
            misalignment: T::lit(0.033),
            alpha_per_km: T::lit(0.0484),
            error_correction: ErrorCorrection::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |x: T| x > T::zero() && x <= T::one();
        if !(self.mu > T::zero() && self.mu.is_finite()) {
            return Err(Error::invalid(format!("mu must be positive, got {}", self.mu)));
        }
        if !unit(self.eta_bob) || !unit(self.eta_spd) {
            return Err(Error::invalid("efficiencies must lie in (0, 1]"));
        }
        if !(self.misalignment >= T::zero() && self.misalignment < T::half()) {
            return Err(Error::invalid(format!("misalignment must be in [0, 0.5), got {}", self.misalignment)));
        }
        if !(self.p_dark >= T::zero() && self.p_dark < T::one()) {
            return Err(Error::invalid(format!("dark-count probability must be in [0, 1), got {}", self.p_dark)));
        }
        if !(self.alpha_per_km >= T::zero() && self.alpha_per_km.is_finite()) {
            return Err(Error::invalid(format!("attenuation must be non-negative, got {}", self.alpha_per_km)));
        }
        Ok(())
    }

    pub fn detection_efficiency(&self) -> T {
        self.eta_bob * self.eta_spd
    }
}

/// One evaluated point of the key-rate model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRatePoint<T> {
    pub length_km: T,
    pub q: T,
    pub e: T,
    pub y0: T,
    /// Secure bits per signal interval; negative values are kept.
    pub r: T,
    /// Set when E ≥ 1/2: no key can be distilled.
    pub saturated: bool,
}

/// Channel transmittance `exp(−αL)·η_bob·η_spd`.
pub fn transmittance<T: Scalar>(params: &QkdSystemParams<T>, length_km: T) -> T {
    (-params.alpha_per_km * length_km).exp() * params.detection_efficiency()
}

pub fn vacuum_yield<T: Scalar>(p_dark: T, kappa: T, p_srs: T) -> T {
    T::two() * p_dark + kappa * p_srs
}

/// `Yₙ = Y₀ + 1 − (1 − η)ⁿ`.
pub fn yield_n<T: Scalar>(y0: T, eta: T, n: u32) -> T {
    if n == 0 {
        return y0;
    }
    // 1 − (1−η)ⁿ = −expm1(n·ln(1−η)), accurate for small η
    y0 - (T::from_u32(n).unwrap() * (-eta).ln_1p()).exp_m1()
}

/// Overall gain `Q = Y₀ + 1 − exp(−μη)`.
pub fn gain<T: Scalar>(y0: T, eta: T, mu: T) -> T {
    y0 - (-mu * eta).exp_m1()
}

/// Overall QBER `E = (Y₀/2 + γ(1 − exp(−μη)))/Q`.
pub fn qber<T: Scalar>(y0: T, eta: T, mu: T, misalignment: T) -> Result<T> {
    let q = gain(y0, eta, mu);
    if !(q > T::zero()) {
        return Err(Error::UndefinedQber);
    }
    Ok(qber_numerator(y0, eta, mu, misalignment) / q)
}

fn qber_numerator<T: Scalar>(y0: T, eta: T, mu: T, misalignment: T) -> T {
    T::half() * y0 - misalignment * (-mu * eta).exp_m1()
}

/// Binary Shannon entropy in bits.
pub fn binary_entropy<T: Scalar>(x: T) -> Result<T> {
    if !(x >= T::zero() && x <= T::one()) {
        return Err(Error::invalid(format!("binary entropy argument must be in [0, 1], got {x}")));
    }
    if x == T::zero() || x == T::one() {
        return Ok(T::zero());
    }
    Ok(-x * x.log2() - (T::one() - x) * (-x).ln_1p() / T::LN_2())
}

/// Lower bound on the secure key rate after `length_km` of fiber with SRS noise `p_srs` per gate.
pub fn secure_key_rate<T: Scalar>(
    params: &QkdSystemParams<T>,
    modulation: Modulation,
    p_srs: T,
    length_km: T,
) -> Result<KeyRatePoint<T>> {
    if !(length_km >= T::zero()) {
        return Err(Error::invalid(format!("length must be non-negative, got {length_km} km")));
    }
    if !(p_srs >= T::zero() && p_srs.is_finite()) {
        return Err(Error::invalid(format!("SRS probability must be finite and non-negative, got {p_srs}")));
    }
    let eta = transmittance(params, length_km);
    let y0 = vacuum_yield(params.p_dark, modulation.kappa(), p_srs);
    let mu = params.mu;
    let q = gain(y0, eta, mu);
    let e = qber(y0, eta, mu, params.misalignment)?;

    let y1 = yield_n(y0, eta, 1);
    let q1 = y1 * mu * (-mu).exp();
    let e1 = ((T::half() * y0 + params.misalignment * eta) / y1).min(T::one());

    let f_ec = params.error_correction.factor(e);
    let r = T::half() * (q1 * (T::one() - binary_entropy(e1)?) - q * f_ec * binary_entropy(e.min(T::one()))?);
    let saturated = e >= T::half();
    let r = if saturated { r.min(T::zero()) } else { r };
    Ok(KeyRatePoint { length_km, q, e, y0, r, saturated })
}
