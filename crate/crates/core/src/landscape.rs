//! The energy landscape at desk scale: the renormalized interaction energy
//! of the symmetric ring, a two-term model energy in the configuration
//! radius with an opaque correlation constant, and its k^(-1/4) minimizer.
//!
//! The second-order coefficient of the model is the correlation coefficient
//! divided by the squared radius; since that coefficient vanishes
//! identically, the term contributes nothing for any N and m, which is the
//! point the default report makes by pairing it with the counterfactual
//! one-sided value.

use crate::algebra::{correlation_coefficient, partial_coefficient};
use crate::error::{Error, Result};
use crate::numerics::fit_loglog_slope;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Parameters of the two-term model energy 3πl⁶ + J(lk)⁻².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelEnergyParams {
    /// Correlation constant; opaque, no ground-truth value.
    pub j: f64,
    /// Ginzburg-Landau parameter.
    pub k: f64,
}

impl ModelEnergyParams {
    /// Build parameters, rejecting nonpositive or non-finite k.
    pub fn new(j: f64, k: f64) -> Result<Self> {
        if !j.is_finite() {
            return Err(Error::Domain(format!("correlation constant {j} must be finite")));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Domain(format!("parameter k must be positive, got {k}")));
        }
        Ok(ModelEnergyParams { j, k })
    }
}

/// Renormalized energy of the radius-l ring: −6π ln3 − 6π ln(1−l⁶); the
/// higher-order remainder of the underlying expansion is dropped.  The
/// logarithm is taken in ln(1+x) form so the l⁶ growth near l = 0 survives
/// in full precision.
pub fn renormalized_w(l: f64) -> Result<f64> {
    if !(l.is_finite() && (0.0..1.0).contains(&l)) {
        return Err(Error::Domain(format!("ring radius must lie in [0, 1), got {l}")));
    }
    let l6 = l.powi(6);
    Ok(-6.0 * PI * 3.0f64.ln() - 6.0 * PI * (-l6).ln_1p())
}

/// The two-term model energy 3πl⁶ + J·(lk)⁻².
pub fn model_energy(l: f64, p: ModelEnergyParams) -> Result<f64> {
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::Domain(format!("ring radius must be positive, got {l}")));
    }
    let lk = l * p.k;
    Ok(3.0 * PI * l.powi(6) + p.j / (lk * lk))
}

/// Closed-form interior minimizer l* = (J/9π)^(1/8) · k^(−1/4) of the model.
pub fn minimize_model(p: &ModelEnergyParams) -> Result<f64> {
    if p.j <= 0.0 {
        return Err(Error::Domain(format!(
            "the model energy has no interior minimum for J = {} ≤ 0",
            p.j
        )));
    }
    Ok((p.j / (9.0 * PI)).powf(0.125) * p.k.powf(-0.25))
}

/// Numeric minimizer: 200 deterministic golden-section shrinks of [1/k, 1),
/// then Newton steps on the stationarity residual 18πl⁵ − 2J/(l³k²).  The
/// energy is flat to rounding within ~l·√ε of the minimum, so section search
/// alone stalls there; the residual is a clean difference of monomials and
/// restores full precision.
pub fn minimize_model_numeric(p: &ModelEnergyParams) -> Result<f64> {
    if p.j <= 0.0 {
        return Err(Error::Domain(format!(
            "the model energy has no interior minimum for J = {} ≤ 0",
            p.j
        )));
    }
    if p.k <= 1.0 {
        return Err(Error::Domain(format!(
            "golden-section bracket [1/k, 1) is empty for k = {}",
            p.k
        )));
    }
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut a, mut b) = (1.0 / p.k, 1.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = model_energy(x1, *p)?;
    let mut f2 = model_energy(x2, *p)?;
    for _ in 0..200 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = model_energy(x1, *p)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = model_energy(x2, *p)?;
        }
    }
    let mut l = 0.5 * (a + b);
    for _ in 0..6 {
        let grad = 18.0 * PI * l.powi(5) - 2.0 * p.j / (l.powi(3) * p.k * p.k);
        let curv = 90.0 * PI * l.powi(4) + 6.0 * p.j / (l.powi(4) * p.k * p.k);
        let step = grad / curv;
        l -= step;
        if step.abs() <= f64::EPSILON * l {
            break;
        }
    }
    Ok(l)
}

/// Second-order term of the two-ring expansion at radius a: A₀/a², which is
/// identically zero because the correlation coefficient vanishes.
pub fn second_order_term(n: u32, m: i64, a: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::Domain(format!("ring radius must be positive, got {a}")));
    }
    Ok(correlation_coefficient(n, m) / (a * a))
}

/// The counterfactual second-order term with the one-sided coefficient in
/// place of A₀: πm⁴N(N²−1)/(12a²) — what the expansion would contribute if
/// the second term did not cancel the first.
pub fn counterfactual_second_order_term(n: u32, m: i64, a: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::Domain(format!("ring radius must be positive, got {a}")));
    }
    Ok(partial_coefficient(n, m) / (a * a))
}

/// One row of a minimizer sweep at fixed J.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: f64,
    pub j: f64,
    pub l_star: f64,
    pub energy_at_min: f64,
}

/// Closed-form minimizer sweep over a list of k values at fixed J.
pub fn sweep_minimizers(j: f64, ks: &[f64]) -> Result<Vec<SweepRow>> {
    if ks.is_empty() {
        return Err(Error::Domain("minimizer sweep needs at least one k".into()));
    }
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let p = ModelEnergyParams::new(j, k)?;
        let l_star = minimize_model(&p)?;
        let energy_at_min = model_energy(l_star, p)?;
        rows.push(SweepRow { k, j, l_star, energy_at_min });
    }
    Ok(rows)
}

/// Least-squares slope of ln l* against ln k over a sweep.
pub fn fitted_scaling_slope(rows: &[SweepRow]) -> f64 {
    let ks: Vec<f64> = rows.iter().map(|r| r.k).collect();
    let ls: Vec<f64> = rows.iter().map(|r| r.l_star).collect();
    fit_loglog_slope(&ks, &ls)
}
