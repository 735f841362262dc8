//! Extraction of the Stokes / anti-Stokes slopes from photon-counting records.
//!
//! Each record carries the channel plan, fiber length and measured counts per
//! gate. With the instrument constants known, the model is linear in the two
//! slopes:
//!
//! ```text
//! counts = dark + s·X_s + a·X_a
//! X_s = Σ_{i < q} |i − q|·P₀,ᵢ · K(z) · (B/B_ref) · ητ/(hν)
//! X_a = Σ_{i > q} |i − q|·P₀,ᵢ · K(z) · (B/B_ref) · ητ/(hν)
//! ```
//!
//! and is solved by (weighted) linear least squares.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::raman::{kernel, photons_per_gate_per_watt, ChannelPlan, DetectionParams, Direction, FiberParams, RamanSlopes};
use crate::scalar::Scalar;

/// Which branch of the v-shaped Raman model a slope belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Data channels on lower grid numbers than the quantum channel.
    Stokes,
    /// Data channels on higher grid numbers than the quantum channel.
    AntiStokes,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Stokes => "Stokes (lower-channel)",
            Side::AntiStokes => "anti-Stokes (higher-channel)",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountRecord<T> {
    /// Label used to group records per channel combination.
    pub plan_id: String,
    pub plan: ChannelPlan<T>,
    pub z_km: T,
    pub counts_per_gate: T,
    pub n_gates: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    /// Inverse Poisson variance `n_gates / counts`.
    #[default]
    Poisson,
    /// Ordinary least squares.
    Unweighted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions<T> {
    pub weighting: Weighting,
    /// Fit the background as a free intercept instead of subtracting it.
    pub fit_intercept: bool,
    /// Filter bandwidth the fitted slopes are normalized to.
    pub ref_bandwidth_hz: T,
}

impl<T: Scalar> Default for FitOptions<T> {
    fn default() -> Self {
        FitOptions { weighting: Weighting::Poisson, fit_intercept: false, ref_bandwidth_hz: T::lit(10.0e9) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult<T> {
    pub s_hat: T,
    pub a_hat: T,
    pub s_sigma: T,
    pub a_sigma: T,
    /// Fitted background when `fit_intercept` is set.
    pub intercept: Option<(T, T)>,
    /// `sqrt(Σ w·r² / Σ w·y²)` on the background-subtracted counts.
    pub residual_norm: T,
    pub n_records: usize,
}

impl<T: Scalar> FitResult<T> {
    pub fn slopes(&self, direction: Direction, ref_bandwidth_hz: T) -> Result<RamanSlopes<T>> {
        RamanSlopes::new(self.s_hat, self.a_hat, ref_bandwidth_hz, direction)
    }
}

/// One-sided fit: only the identified slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideFit<T> {
    pub side: Side,
    pub slope: T,
    pub sigma: T,
}

/// Slope statistics over leave-one-combination-out fits.
///
/// A single combination only pins `s·X_s + a·X_a` along one direction, so
/// each entry is the joint fit with that combination removed. The `*_std`
/// fields are jackknife standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadSummary<T> {
    /// `(left-out plan id, fit without it)`, sorted by id.
    pub per_plan: Vec<(String, FitResult<T>)>,
    pub s_mean: T,
    pub s_std: T,
    pub a_mean: T,
    pub a_std: T,
}

/// Design-matrix row of one record.
#[derive(Debug, Clone, Copy)]
struct Row<T> {
    x_s: T,
    x_a: T,
    y: T,
    w: T,
}

/// Regressors `(X_s, X_a)` of a plan at length `z`.
pub fn regressors<T: Scalar>(
    plan: &ChannelPlan<T>,
    z_km: T,
    det: &DetectionParams<T>,
    fiber: &FiberParams<T>,
    ref_bandwidth_hz: T,
) -> (T, T) {
    let q = plan.quantum();
    let (mut sum_s, mut sum_a) = (T::zero(), T::zero());
    for d in plan.data() {
        let sep = q.separation(d.channel);
        let term = T::from_i32(sep.abs()).unwrap() * d.power.watts();
        if sep < 0 {
            sum_s = sum_s + term;
        } else {
            sum_a = sum_a + term;
        }
    }
    let common = kernel(plan.direction(), z_km, fiber)
        * (det.filter_bandwidth_hz / ref_bandwidth_hz)
        * photons_per_gate_per_watt(fiber, det, q.frequency());
    (sum_s * common, sum_a * common)
}

/// Noiseless counts per gate predicted for each `(plan_id, plan, z)`; the forward model of the fit.
pub fn synthesize<T: Scalar>(
    cases: &[(String, ChannelPlan<T>, T)],
    slopes: &RamanSlopes<T>,
    det: &DetectionParams<T>,
    fiber: &FiberParams<T>,
    dark: T,
    n_gates: u64,
) -> Result<Vec<CountRecord<T>>> {
    cases
        .iter()
        .map(|(id, plan, z)| {
            let counts = dark + crate::raman::srs_counts_multi(plan, *z, slopes, fiber, det)?;
            Ok(CountRecord { plan_id: id.clone(), plan: plan.clone(), z_km: *z, counts_per_gate: counts, n_gates })
        })
        .collect()
}

fn validate_records<T: Scalar>(records: &[CountRecord<T>]) -> Result<Direction> {
    let first = records.first().ok_or_else(|| Error::invalid("no count records"))?;
    let direction = first.plan.direction();
    for (i, r) in records.iter().enumerate() {
        if r.plan.direction() != direction {
            return Err(Error::invalid(format!("record {i} is {} but record 0 is {direction}", r.plan.direction())));
        }
        if !(r.counts_per_gate >= T::zero() && r.counts_per_gate.is_finite()) {
            return Err(Error::invalid(format!("record {i}: counts per gate must be non-negative")));
        }
        if !(r.z_km >= T::zero() && r.z_km.is_finite()) {
            return Err(Error::invalid(format!("record {i}: fiber length must be non-negative")));
        }
        if r.n_gates == 0 {
            return Err(Error::invalid(format!("record {i}: n_gates must be positive")));
        }
    }
    let mut lengths: Vec<T> = records.iter().map(|r| r.z_km).collect();
    lengths.sort_by(|a, b| a.partial_cmp(b).unwrap());
    lengths.dedup();
    if lengths.len() < 2 {
        return Err(Error::invalid("records must span at least two distinct fiber lengths"));
    }
    Ok(direction)
}

fn build_rows<T: Scalar>(
    records: &[CountRecord<T>],
    det: &DetectionParams<T>,
    fiber: &FiberParams<T>,
    background: T,
    opts: &FitOptions<T>,
) -> Vec<Row<T>> {
    let mut rows: Vec<Row<T>> = records
        .iter()
        .map(|r| {
            let (x_s, x_a) = regressors(&r.plan, r.z_km, det, fiber, opts.ref_bandwidth_hz);
            let n = T::from_u64(r.n_gates).unwrap();
            let w = match opts.weighting {
                Weighting::Poisson => n / r.counts_per_gate.max(T::one() / n),
                Weighting::Unweighted => T::one(),
            };
            let y = if opts.fit_intercept { r.counts_per_gate } else { r.counts_per_gate - background };
            Row { x_s, x_a, y, w }
        })
        .collect();
    // canonical order: the sums below then do not depend on record order
    rows.sort_by(|a, b| {
        [a.x_s, a.x_a, a.y, a.w]
            .iter()
            .zip([b.x_s, b.x_a, b.y, b.w].iter())
            .map(|(p, q)| p.partial_cmp(q).unwrap_or(Ordering::Equal))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    });
    rows
}

/// Solves the symmetric positive-definite system `a·x = b` by Cholesky; `None` if not positive definite.
fn cholesky_solve<T: Scalar, const N: usize>(a: &[[T; N]; N], b: &[T; N]) -> Option<([T; N], [[T; N]; N])> {
    let mut l = [[T::zero(); N]; N];
    for i in 0..N {
        for j in 0..=i {
            let mut sum = a[i][j];
            for k in 0..j {
                sum = sum - l[i][k] * l[j][k];
            }
            if i == j {
                if !(sum > T::zero()) {
                    return None;
                }
                l[i][i] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    let solve = |rhs: &[T; N]| {
        let mut y = [T::zero(); N];
        for i in 0..N {
            let mut s = rhs[i];
            for k in 0..i {
                s = s - l[i][k] * y[k];
            }
            y[i] = s / l[i][i];
        }
        let mut x = [T::zero(); N];
        for i in (0..N).rev() {
            let mut s = y[i];
            for k in i + 1..N {
                s = s - l[k][i] * x[k];
            }
            x[i] = s / l[i][i];
        }
        x
    };
    let x = solve(b);
    let mut inv = [[T::zero(); N]; N];
    for c in 0..N {
        let mut e = [T::zero(); N];
        e[c] = T::one();
        let col = solve(&e);
        for r in 0..N {
            inv[r][c] = col[r];
        }
    }
    Some((x, inv))
}

/// Weighted least squares on the given columns of each row.
fn solve_rows<T: Scalar, const N: usize>(rows: &[Row<T>], columns: impl Fn(&Row<T>) -> [T; N]) -> Option<([T; N], [T; N], T)> {
    // column scaling keeps the normal matrix well conditioned (regressors are ~1e7)
    let mut scale = [T::zero(); N];
    for r in rows {
        let c = columns(r);
        for i in 0..N {
            scale[i] = scale[i].max(c[i].abs());
        }
    }
    if scale.iter().any(|s| !(*s > T::zero())) {
        return None;
    }
    let mut ata = [[T::zero(); N]; N];
    let mut atb = [T::zero(); N];
    let mut wyy = T::zero();
    for r in rows {
        let c = columns(r);
        for i in 0..N {
            let xi = c[i] / scale[i];
            atb[i] = atb[i] + r.w * xi * r.y;
            for j in 0..N {
                ata[i][j] = ata[i][j] + r.w * xi * c[j] / scale[j];
            }
        }
        wyy = wyy + r.w * r.y * r.y;
    }
    // rank check on the correlation matrix
    let mut corr = ata;
    for i in 0..N {
        for j in 0..N {
            corr[i][j] = ata[i][j] / (ata[i][i] * ata[j][j]).sqrt();
        }
    }
    let (_, corr_inv) = cholesky_solve(&corr, &[T::zero(); N])?;
    let cond_guard = T::lit(1.0e10);
    if (0..N).any(|i| corr_inv[i][i] > cond_guard) {
        return None;
    }
    let (beta_scaled, cov_scaled) = cholesky_solve(&ata, &atb)?;

    let mut beta = [T::zero(); N];
    let mut var = [T::zero(); N];
    for i in 0..N {
        beta[i] = beta_scaled[i] / scale[i];
        var[i] = cov_scaled[i][i] / (scale[i] * scale[i]);
    }
    let mut wrr = T::zero();
    for r in rows {
        let c = columns(r);
        let pred = (0..N).fold(T::zero(), |acc, i| acc + beta[i] * c[i]);
        let res = r.y - pred;
        wrr = wrr + r.w * res * res;
    }
    let rel = if wyy > T::zero() { (wrr / wyy).sqrt() } else { T::zero() };
    Some((beta, var, rel))
}

fn side_totals<T: Scalar>(rows: &[Row<T>]) -> (T, T) {
    rows.iter().fold((T::zero(), T::zero()), |(s, a), r| (s + r.x_s.abs(), a + r.x_a.abs()))
}

/// Joint fit of both slopes (and optionally the background).
pub fn fit_slopes<T: Scalar>(
    records: &[CountRecord<T>],
    det: &DetectionParams<T>,
    fiber: &FiberParams<T>,
    p_dark_background: T,
    opts: &FitOptions<T>,
) -> Result<FitResult<T>> {
    validate_records(records)?;
    let rows = build_rows(records, det, fiber, p_dark_background, opts);
    let (tot_s, tot_a) = side_totals(&rows);
    if tot_s == T::zero() {
        return Err(Error::Unidentifiable { missing: Side::Stokes, reason: "no data channel below the quantum channel".into() });
    }
    if tot_a == T::zero() {
        return Err(Error::Unidentifiable { missing: Side::AntiStokes, reason: "no data channel above the quantum channel".into() });
    }

    let ols_scale = |rel: T, n_params: usize| -> T {
        // unweighted: estimate the residual variance from the data
        match opts.weighting {
            Weighting::Poisson => T::one(),
            Weighting::Unweighted => {
                let n = rows.len();
                if n <= n_params {
                    return T::zero();
                }
                let yy = rows.iter().fold(T::zero(), |acc, r| acc + r.y * r.y);
                rel * rel * yy / T::from_usize(n - n_params).unwrap()
            }
        }
    };

    let collinear = || {
        Error::RankDeficient(
            "Stokes and anti-Stokes regressors are collinear; add combinations with a different channel balance".into(),
        )
    };

    if opts.fit_intercept {
        let (b, var, rel) = solve_rows(&rows, |r| [r.x_s, r.x_a, T::one()]).ok_or_else(collinear)?;
        let k = ols_scale(rel, 3);
        Ok(FitResult {
            s_hat: b[0],
            a_hat: b[1],
            s_sigma: (var[0] * k).sqrt(),
            a_sigma: (var[1] * k).sqrt(),
            intercept: Some((b[2], (var[2] * k).sqrt())),
            residual_norm: rel,
            n_records: rows.len(),
        })
    } else {
        let (b, var, rel) = solve_rows(&rows, |r| [r.x_s, r.x_a]).ok_or_else(collinear)?;
        let k = ols_scale(rel, 2);
        Ok(FitResult {
            s_hat: b[0],
            a_hat: b[1],
            s_sigma: (var[0] * k).sqrt(),
            a_sigma: (var[1] * k).sqrt(),
            intercept: None,
            residual_norm: rel,
            n_records: rows.len(),
        })
    }
}

/// Fits a single slope when only one side of the quantum channel is populated.
pub fn fit_single_side<T: Scalar>(
    records: &[CountRecord<T>],
    det: &DetectionParams<T>,
    fiber: &FiberParams<T>,
    p_dark_background: T,
    opts: &FitOptions<T>,
    side: Side,
) -> Result<SideFit<T>> {
    validate_records(records)?;
    let opts = FitOptions { fit_intercept: false, ..*opts };
    let rows = build_rows(records, det, fiber, p_dark_background, &opts);
    let column = |r: &Row<T>| match side {
        Side::Stokes => [r.x_s],
        Side::AntiStokes => [r.x_a],
    };
    let (b, var, rel) = solve_rows(&rows, column)
        .ok_or_else(|| Error::Unidentifiable { missing: side, reason: "no data channel on this side".into() })?;
    let k = match opts.weighting {
        Weighting::Poisson => T::one(),
        Weighting::Unweighted if rows.len() > 1 => {
            let yy = rows.iter().fold(T::zero(), |acc, r| acc + r.y * r.y);
            rel * rel * yy / T::from_usize(rows.len() - 1).unwrap()
        }
        Weighting::Unweighted => T::zero(),
    };
    Ok(SideFit { side, slope: b[0], sigma: (var[0] * k).sqrt() })
}

/// Leave-one-combination-out fits and the jackknife spread of the slopes.
pub fn fit_per_plan<T: Scalar>(
    records: &[CountRecord<T>],
    det: &DetectionParams<T>,
    fiber: &FiberParams<T>,
    p_dark_background: T,
    opts: &FitOptions<T>,
) -> Result<SpreadSummary<T>> {
    let ids: BTreeSet<&str> = records.iter().map(|r| r.plan_id.as_str()).collect();
    if ids.len() < 3 {
        return Err(Error::invalid(format!(
            "spread needs at least three channel combinations, got {}",
            ids.len()
        )));
    }
    let per_plan = ids
        .iter()
        .map(|&id| {
            let rest: Vec<CountRecord<T>> = records.iter().filter(|r| r.plan_id != id).cloned().collect();
            Ok((id.to_string(), fit_slopes(&rest, det, fiber, p_dark_background, opts)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = T::from_usize(per_plan.len()).unwrap();
    let mean = |f: &dyn Fn(&FitResult<T>) -> T| per_plan.iter().fold(T::zero(), |acc, (_, r)| acc + f(r)) / n;
    let std = |f: &dyn Fn(&FitResult<T>) -> T, m: T| {
        let ss = per_plan.iter().fold(T::zero(), |acc, (_, r)| acc + (f(r) - m) * (f(r) - m));
        (ss * (n - T::one()) / n).sqrt()
    };
    let s_mean = mean(&|r| r.s_hat);
    let a_mean = mean(&|r| r.a_hat);
    Ok(SpreadSummary {
        s_std: std(&|r| r.s_hat, s_mean),
        a_std: std(&|r| r.a_hat, a_mean),
        s_mean,
        a_mean,
        per_plan,
    })
}
