//! Four-wave mixing (FWM) relevance checks.
//!
//! Three waves at `f_i`, `f_j`, `f_k` generate a product whose strength relative
//! to perfect phase matching is `η_FWM(Δk)`. Far from the zero-dispersion
//! wavelength `Δk` is large and the product collapses by several orders of
//! magnitude; the `γ·P₀·L < 0.1` rule decides whether FWM matters at all.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::units::{ItuChannel, OpticalFrequency, Power, SPEED_OF_LIGHT};

/// Threshold on `γ·P₀·L` below which FWM is negligible.
pub const NEGLIGIBLE_NONLINEAR_PHASE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearParams<T> {
    /// Nonlinear index, m²/W.
    pub n2_m2_per_w: T,
    /// Effective mode area, m².
    pub a_eff_m2: T,
}

impl<T: Scalar> NonlinearParams<T> {
    pub fn new(n2_m2_per_w: T, a_eff_m2: T) -> Result<Self> {
        if !(n2_m2_per_w > T::zero() && a_eff_m2 > T::zero()) {
            return Err(Error::invalid("n2 and effective area must be positive"));
        }
        Ok(NonlinearParams { n2_m2_per_w, a_eff_m2 })
    }

    /// Standard SMF-28: n2 = 2.6e-20 m²/W, A_eff = 50 µm².
    pub fn smf28() -> Self {
        NonlinearParams { n2_m2_per_w: T::lit(2.6e-20), a_eff_m2: T::lit(50.0e-12) }
    }
}

/// Chromatic dispersion around `lambda_eval_m`, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionParams<T> {
    /// D_c, s/m².
    pub d_c: T,
    /// dD_c/dλ, s/m³.
    pub d_slope: T,
    pub lambda_eval_m: T,
}

impl<T: Scalar> DispersionParams<T> {
    /// From the customary ps·km⁻¹·nm⁻¹ and ps·km⁻¹·nm⁻² units.
    pub fn from_engineering_units(d_ps_km_nm: T, slope_ps_km_nm2: T, lambda_eval_m: T) -> Result<Self> {
        if !(lambda_eval_m > T::zero()) {
            return Err(Error::invalid(format!("evaluation wavelength must be positive, got {lambda_eval_m}")));
        }
        // 1 ps/(km·nm) = 1e-12 s / (1e3 m · 1e-9 m) = 1e-6 s/m²
        Ok(DispersionParams {
            d_c: d_ps_km_nm * T::lit(1.0e-6),
            d_slope: slope_ps_km_nm2 * T::lit(1.0e3),
            lambda_eval_m,
        })
    }

    /// D_c carried linearly from the evaluation wavelength to `lambda_m`.
    pub fn dispersion_at(&self, lambda_m: T) -> T {
        self.d_c + self.d_slope * (lambda_m - self.lambda_eval_m)
    }
}

/// Form of the oscillating term in the efficiency formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseTerm {
    /// `sin²(ΔkL/2)`, the usual phase-mismatch expression.
    #[default]
    HalfArgument,
    /// `sin²(ΔkL)`, as sometimes printed.
    FullArgument,
}

/// Nonlinear parameter `γ = n2·ω/(c·A_eff)`, W⁻¹·m⁻¹.
pub fn nonlinear_gamma<T: Scalar>(nl: &NonlinearParams<T>, f: T) -> T {
    nl.n2_m2_per_w * T::TAU() * f / (T::lit(SPEED_OF_LIGHT) * nl.a_eff_m2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Negligibility<T> {
    pub nonlinear_phase: T,
    pub negligible: bool,
    /// `0.1 − γ·P₀·L`; negative when FWM must be accounted for.
    pub margin: T,
}

pub fn fwm_negligible<T: Scalar>(gamma: T, p0: Power<T>, length_m: T) -> Negligibility<T> {
    let phase = gamma * p0.watts() * length_m;
    let limit = T::lit(NEGLIGIBLE_NONLINEAR_PHASE);
    Negligibility { nonlinear_phase: phase, negligible: phase < limit, margin: limit - phase }
}

/// Effective nonlinear length `(1 − exp(−αL))/α`, m; equals `L` for a lossless fiber.
pub fn effective_length<T: Scalar>(alpha_per_m: T, length_m: T) -> T {
    if alpha_per_m == T::zero() {
        return length_m;
    }
    -(-alpha_per_m * length_m).exp_m1() / alpha_per_m
}

/// Equivalent frequency separation `(|f_i − f_k|·|f_j − f_k|)^½`, Hz.
pub fn equivalent_separation<T: Scalar>(f_i: T, f_j: T, f_k: T) -> T {
    ((f_i - f_k).abs() * (f_j - f_k).abs()).sqrt()
}

/// Propagation-constant mismatch Δk (m⁻¹) for the wave triple (i, j, k).
///
/// `Δk = (2πλ_k²/c)·Δf_eq²·[D_c + (λ_k²/2c)·Δf_eq·dD_c/dλ]` with `λ_k = c/f_k`.
pub fn delta_k<T: Scalar>(
    disp: &DispersionParams<T>,
    f_i: OpticalFrequency<T>,
    f_j: OpticalFrequency<T>,
    f_k: OpticalFrequency<T>,
) -> T {
    let c = T::lit(SPEED_OF_LIGHT);
    let lambda_k = f_k.wavelength_m();
    let lambda_sq = lambda_k * lambda_k;
    let df = equivalent_separation(f_i.hz(), f_j.hz(), f_k.hz());
    let slope_term = lambda_sq / (T::two() * c) * df * disp.d_slope;
    T::TAU() * lambda_sq / c * df * df * (disp.dispersion_at(lambda_k) + slope_term)
}

/// Phase-match efficiency `η_FWM`; equals 1 at Δk = 0.
pub fn fwm_efficiency<T: Scalar>(alpha_per_m: T, dk_per_m: T, length_m: T, phase: PhaseTerm) -> Result<T> {
    if !(alpha_per_m > T::zero()) {
        return Err(Error::invalid(format!("attenuation must be positive, got {alpha_per_m} /m")));
    }
    if !(length_m > T::zero()) {
        return Err(Error::invalid(format!("length must be positive, got {length_m} m")));
    }
    let a2 = alpha_per_m * alpha_per_m;
    let prefactor = a2 / (a2 + dk_per_m * dk_per_m);
    let decay = (-alpha_per_m * length_m).exp();
    let arg = match phase {
        PhaseTerm::HalfArgument => dk_per_m * length_m / T::two(),
        PhaseTerm::FullArgument => dk_per_m * length_m,
    };
    let s = arg.sin();
    let denom = -(-alpha_per_m * length_m).exp_m1();
    Ok(prefactor * (T::one() + T::lit(4.0) * decay * s * s / (denom * denom)))
}

/// Efficiency relative to perfect phase matching; the "suppression ratio".
pub fn suppression_ratio<T: Scalar>(alpha_per_m: T, dk_per_m: T, length_m: T, phase: PhaseTerm) -> Result<T> {
    Ok(fwm_efficiency(alpha_per_m, dk_per_m, length_m, phase)? / fwm_efficiency(alpha_per_m, T::zero(), length_m, phase)?)
}

/// An FWM product `f_i + f_j − f_k` that lands on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridProduct {
    pub i: ItuChannel,
    pub j: ItuChannel,
    pub k: ItuChannel,
    pub product: ItuChannel,
}

/// All distinct products `i + j − k` (i ≤ j, k ∉ {i, j}) of the given channels that fall in 1..=80.
///
/// Degenerate pumping (i = j) is included.
pub fn grid_products(channels: &[ItuChannel]) -> Vec<GridProduct> {
    let mut out: Vec<GridProduct> = Vec::new();
    for (a, &i) in channels.iter().enumerate() {
        for &j in &channels[a..] {
            for &k in channels {
                if k == i || k == j {
                    continue;
                }
                let idx = i.index() + j.index() - k.index();
                let Ok(product) = ItuChannel::new(idx) else { continue };
                let (i, j) = if i <= j { (i, j) } else { (j, i) };
                let g = GridProduct { i, j, k, product };
                if !out.contains(&g) {
                    out.push(g);
                }
            }
        }
    }
    out.sort_by_key(|g| (g.product, g.i, g.j, g.k));
    out
}
