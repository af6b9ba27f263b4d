//! Pointwise evaluation of the correlation integrand, the counterterm that
//! makes it absolutely integrable away from the origin, and the local
//! singular models at the origin and at each polygon vertex.
//!
//! Every singular object here has a pure high-harmonic angular dependence
//! around its own singularity, so its averages on centered circles vanish;
//! that is what gives the principal-value integrals their meaning.

use crate::algebra::{alpha, alpha_prime_at_vortex, beta, roots_of_unity};
use crate::config::{make_symmetric_config, VortexConfiguration};
use crate::error::{Error, Result};
use crate::numerics::pairwise_sum;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use std::f64::consts::PI;

/// The quartic correlation density |Σ n_j/(x−a_j)|⁴ − Σ |n_j/(x−a_j)|⁴.
pub fn raw_integrand(x: Complex64, cfg: &VortexConfiguration) -> Result<f64> {
    let mut field = Complex64::new(0.0, 0.0);
    let mut fourth = 0.0;
    for v in cfg.vortices() {
        let d = x - v.position;
        if d.norm_sqr() == 0.0 {
            return Err(Error::Pole(x));
        }
        let term = v.charge_f64() * d.inv();
        field += term;
        let t2 = term.norm_sqr();
        fourth += t2 * t2;
    }
    let f2 = field.norm_sqr();
    Ok(f2 * f2 - fourth)
}

/// The j-th counterterm summand Re[β_N a_j²/((x−a_j)²(1+|x−a_j|²))],
/// 1-based j; a pure second harmonic around a_j at every radius.
pub fn counterterm_term(x: Complex64, n: u32, j: usize) -> Result<f64> {
    if j < 1 || j > n as usize {
        return Err(Error::InvalidIndex { index: j, size: n as usize });
    }
    counterterm_term_at_offset(x - roots_of_unity(n)[j - 1], n, j)
}

/// The j-th counterterm summand evaluated from the displacement d = x − a_j.
/// Taking the offset directly avoids the cancellation in x − a_j, which at
/// small radii would otherwise dominate the (exactly zero) circle averages.
pub fn counterterm_term_at_offset(d: Complex64, n: u32, j: usize) -> Result<f64> {
    assert!(n >= 2);
    if j < 1 || j > n as usize {
        return Err(Error::InvalidIndex { index: j, size: n as usize });
    }
    let a = roots_of_unity(n)[j - 1];
    let r2 = d.norm_sqr();
    if r2 == 0.0 {
        return Err(Error::Pole(a));
    }
    let b = beta(n).to_f64().expect("beta fits in f64");
    Ok(b * ((a * a) / (d * d * (1.0 + r2))).re)
}

/// The full counterterm Σ_{j=1..N} Re[β_N a_j²/((x−a_j)²(1+|x−a_j|²))].
pub fn counterterm(x: Complex64, n: u32) -> Result<f64> {
    let mut terms = Vec::with_capacity(n as usize);
    for j in 1..=n as usize {
        terms.push(counterterm_term(x, n, j)?);
    }
    Ok(pairwise_sum(&terms))
}

/// Singular model of the unit-charge integrand at the origin:
/// −N(N−1)³/2 · Re(x^N/((x^N−1)|x|⁴)), valid for 0 < |x| < 1.
pub fn near_zero_model(x: Complex64, n: u32) -> Result<f64> {
    assert!(n >= 2);
    let r2 = x.norm_sqr();
    if r2 == 0.0 {
        return Err(Error::Pole(x));
    }
    if r2 >= 1.0 {
        return Err(Error::Domain(format!(
            "near-zero model needs |x| < 1, got |x| = {}",
            r2.sqrt()
        )));
    }
    let xn = x.powu(n);
    let coeff = -(n as f64) * ((n - 1) as f64).powi(3) / 2.0;
    Ok(coeff * (xn / (xn - 1.0)).re / (r2 * r2))
}

/// Singular model of the unit-charge integrand at vertex a_k:
/// 4|x−a_k|⁻⁴ · Re[α_k'(a_k)(x−a_k)²], valid for 0 < |x−a_k| < 1/2.
pub fn near_vortex_model(x: Complex64, n: u32, k: usize) -> Result<f64> {
    if k < 1 || k > n as usize {
        return Err(Error::InvalidIndex { index: k, size: n as usize });
    }
    near_vortex_model_at_offset(x - roots_of_unity(n)[k - 1], n, k)
}

/// Near-vortex model evaluated from the displacement d = x − a_k, free of
/// the rounding incurred by forming x and re-subtracting the vertex.
pub fn near_vortex_model_at_offset(d: Complex64, n: u32, k: usize) -> Result<f64> {
    assert!(n >= 2);
    if k < 1 || k > n as usize {
        return Err(Error::InvalidIndex { index: k, size: n as usize });
    }
    let r2 = d.norm_sqr();
    if r2 == 0.0 {
        return Err(Error::Pole(roots_of_unity(n)[k - 1]));
    }
    if r2 >= 0.25 {
        return Err(Error::Domain(format!(
            "near-vortex model needs |x - a_k| < 1/2, got {}",
            r2.sqrt()
        )));
    }
    let ap = alpha_prime_at_vortex(n, k);
    Ok(4.0 * (ap * d * d).re / (r2 * r2))
}

/// Stable value of raw_integrand − m⁴·counterterm at x = a_k + d, for
/// 0 < |d| < 1/2.  Expanding |1/d + α_k|⁴ analytically cancels the |d|⁻⁴
/// pole against the vertex's own quartic term before any arithmetic, so the
/// result keeps full precision where the naive difference is pure noise.
pub fn vertex_residual_at_offset(d: Complex64, n: u32, m: i64, k: usize) -> Result<f64> {
    assert!(n >= 2);
    if k < 1 || k > n as usize {
        return Err(Error::InvalidIndex { index: k, size: n as usize });
    }
    let roots = roots_of_unity(n);
    let a = roots[k - 1];
    let r2 = d.norm_sqr();
    if r2 == 0.0 {
        return Err(Error::Pole(a));
    }
    if r2 >= 0.25 {
        return Err(Error::Domain(format!(
            "vertex residual expansion needs |x - a_k| < 1/2, got {}",
            r2.sqrt()
        )));
    }
    let x = a + d;
    let m4 = (m * m * m * m) as f64;
    let al = alpha(n, k, x)?;
    let ap = alpha_prime_at_vortex(n, k);
    let h = al - ap * d;
    let r4 = r2 * r2;
    // 4Re[α d] minus the k-th counterterm summand, combined analytically:
    // their O(|d|²) second harmonics cancel, leaving O(|d|³)/|d|⁴ = O(1/|d|).
    let own = 4.0 * (ap * d * d).re * r2 / ((1.0 + r2) * r4) + 4.0 * (h * d).re / r4;
    let w = 2.0 * (al * d).re / r2 + al.norm_sqr();
    let mut value = m4 * (own + 2.0 * al.norm_sqr() / r2 + w * w);
    // Quartic self-terms of the other vortices and the center charge.
    let n0 = -((n as i64 - 1) as f64) * m as f64 / 2.0;
    value -= n0.powi(4) / x.norm_sqr().powi(2);
    for (j, aj) in roots.iter().enumerate() {
        if j + 1 == k {
            continue;
        }
        value -= m4 / (x - aj).norm_sqr().powi(2);
        value -= m4 * counterterm_term(x, n, j + 1)?;
    }
    Ok(value)
}

/// Trapezoidal angular mean of `f` over the circle |x − center| = radius,
/// from `samples` equispaced points; exact to rounding for trigonometric
/// polynomials of degree below samples/2.
///
/// When `samples` is divisible by 4 the points are generated in quadrant
/// quadruples by exact multiplication with i, and each quadruple is summed
/// before the global sum.  Rotation by i and complex squaring commute at the
/// bit level, so second-harmonic fields cancel exactly within a quadruple
/// instead of leaving O(eps·|f|) summation noise.
pub fn circle_average<F>(f: F, center: Complex64, radius: f64, samples: usize) -> Result<f64>
where
    F: Fn(Complex64) -> Result<f64>,
{
    if samples < 16 {
        return Err(Error::Domain(format!("need at least 16 samples, got {samples}")));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {radius}")));
    }
    let eval = |d: Complex64| -> Result<f64> {
        let v = f(center + d)?;
        if !v.is_finite() {
            return Err(Error::Evaluation(format!("non-finite sample {v} at offset {d}")));
        }
        Ok(v)
    };
    if samples.is_multiple_of(4) {
        let quarter = samples / 4;
        let mut groups = Vec::with_capacity(quarter);
        for i in 0..quarter {
            let theta = 2.0 * PI * i as f64 / samples as f64;
            let d = Complex64::from_polar(radius, theta);
            let g = (eval(d)? + eval(Complex64::new(-d.im, d.re))?)
                + (eval(-d)? + eval(Complex64::new(d.im, -d.re))?);
            groups.push(g);
        }
        Ok(pairwise_sum(&groups) / samples as f64)
    } else {
        let mut values = Vec::with_capacity(samples);
        for i in 0..samples {
            let theta = 2.0 * PI * i as f64 / samples as f64;
            values.push(eval(Complex64::from_polar(radius, theta))?);
        }
        Ok(pairwise_sum(&values) / samples as f64)
    }
}

/// Leading far-field coefficient: raw_integrand ~ C₄/|x|⁴ with
/// C₄ = (Σ n_j)⁴ − Σ n_j⁴, computed exactly from the rational charges.
pub fn far_field_constant(cfg: &VortexConfiguration) -> f64 {
    let q = cfg.total_charge();
    let q4 = q * q * q * q;
    let sum4: num_rational::Rational64 =
        cfg.vortices().iter().map(|v| v.charge * v.charge * v.charge * v.charge).sum();
    (q4 - sum4).to_f64().expect("far-field constant fits in f64")
}

/// The symmetric-configuration integrand with optional subtraction of the
/// counterterm and/or the near-zero model (both scaled by m⁴).
#[derive(Debug, Clone)]
pub struct RegularizedField {
    cfg: VortexConfiguration,
    n: u32,
    scale: f64,
    pub subtract_counterterm: bool,
    pub subtract_near_zero_model: bool,
}

impl RegularizedField {
    pub fn symmetric(
        n: u32,
        m: i64,
        subtract_counterterm: bool,
        subtract_near_zero_model: bool,
    ) -> Result<Self> {
        let cfg = make_symmetric_config(n, m)?;
        Ok(RegularizedField {
            cfg,
            n,
            scale: (m * m * m * m) as f64,
            subtract_counterterm,
            subtract_near_zero_model,
        })
    }

    pub fn cfg(&self) -> &VortexConfiguration {
        &self.cfg
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn evaluate(&self, x: Complex64) -> Result<f64> {
        let mut v = raw_integrand(x, &self.cfg)?;
        if self.subtract_counterterm {
            v -= self.scale * counterterm(x, self.n)?;
        }
        if self.subtract_near_zero_model {
            v -= self.scale * near_zero_model(x, self.n)?;
        }
        Ok(v)
    }
}
