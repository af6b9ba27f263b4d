//! Radial reduction of the direct quartic term: after expanding the squared
//! field in angular Fourier series, its plane integral I collapses to 1D
//! integrals of two radial densities with exactly known integer coefficients.
//!
//! The densities converge geometrically away from the unit circle (term
//! ratio ρ^{2N}) and slow down near it; evaluation carries a rigorous tail
//! bound and the thin annulus around ρ = 1 is handled by the closed
//! antiderivative instead.

use crate::algebra::f_bracket;
use crate::error::{Error, Result};
use crate::numerics::{extrapolate_polynomial, integrate_refining_par, pairwise_sum};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Mutex;

/// Which side of the unit circle a radial density describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Inner,
    Outer,
}

/// Truncated-series evaluator for the radial densities
///   inner: (1/16) Σ_{k≥1} c_k² ρ^{2kN−3} − N Σ_{k≥0} (k+1)² ρ^{2k+1}
///   outer: (1/16) Σ_{k≥1} d_k² ρ^{−2kN−3} + N(N²+1)/(2ρ³)
///          − N Σ_{k≥0} (k+1)² ρ^{−2k−3}
/// with c_k = 4N(kN−1), d_k = 4N(kN+1); every evaluation is summed until a
/// geometric tail estimate drops below the requested tolerance.
#[derive(Debug, Clone)]
pub struct RadialDensity {
    n: u32,
    region: Region,
    tolerance: f64,
    max_terms: u64,
}

/// Hard ceiling on series length before reporting a truncation failure.
const TERM_CAP: u64 = 1_000_000;

impl RadialDensity {
    pub fn new(n: u32, region: Region, tolerance: f64) -> Result<Self> {
        assert!(n >= 2);
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::Domain(format!("tolerance must be positive, got {tolerance}")));
        }
        Ok(RadialDensity { n, region, tolerance, max_terms: TERM_CAP })
    }

    /// Same density with a custom term cap (used to exercise the failure path).
    pub fn with_max_terms(mut self, cap: u64) -> Self {
        self.max_terms = cap;
        self
    }

    pub fn region(&self) -> Region {
        self.region
    }

    /// Density value at ρ; tail bound at most the configured tolerance.
    pub fn eval(&self, rho: f64) -> Result<f64> {
        Ok(self.eval_with_terms(rho)?.0)
    }

    /// Density value together with the number of series terms consumed.
    pub fn eval_with_terms(&self, rho: f64) -> Result<(f64, u64)> {
        self.check_domain(rho)?;
        let (quartic, used_a) = self.sum_quartic(rho, None)?;
        let (square, used_b) = self.sum_square(rho, None)?;
        Ok((quartic + self.middle(rho) - square, used_a + used_b))
    }

    /// Density truncated at exactly `kmax` terms per series, without a tail
    /// bound; the doubling invariant compares this against the bound.
    pub fn eval_truncated(&self, rho: f64, kmax: u64) -> Result<f64> {
        self.check_domain(rho)?;
        let (quartic, _) = self.sum_quartic(rho, Some(kmax))?;
        let (square, _) = self.sum_square(rho, Some(kmax))?;
        Ok(quartic + self.middle(rho) - square)
    }

    /// Tail bound the last evaluation honored (half tolerance per series).
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    fn check_domain(&self, rho: f64) -> Result<()> {
        let ok = match self.region {
            Region::Inner => (0.0..1.0).contains(&rho),
            Region::Outer => rho > 1.0,
        };
        if !ok {
            return Err(Error::Domain(format!(
                "rho = {rho} is on the wrong side of the unit circle for {:?}",
                self.region
            )));
        }
        Ok(())
    }

    fn middle(&self, rho: f64) -> f64 {
        match self.region {
            Region::Inner => 0.0,
            // ((N+1)^4 - (N-1)^4) / 16 = N(N^2+1)/2.
            Region::Outer => {
                let nn = self.n as f64;
                nn * (nn * nn + 1.0) / (2.0 * rho * rho * rho)
            }
        }
    }

    /// (1/16) Σ_{k≥1} c_k² ρ^{±(2kN+3)−6}, i.e. N²(kN∓1)² against the
    /// running power ρ^{2kN−3} (inner) or ρ^{−2kN−3} (outer).
    fn sum_quartic(&self, rho: f64, fixed: Option<u64>) -> Result<(f64, u64)> {
        if rho == 0.0 {
            return Ok((0.0, 0));
        }
        let nn = self.n as f64;
        let (q, p1, shift) = match self.region {
            Region::Inner => (rho.powi(2 * self.n as i32), rho.powi(2 * self.n as i32 - 3), -1.0),
            Region::Outer => {
                (rho.powi(-2 * self.n as i32), rho.powi(-2 * self.n as i32 - 3), 1.0)
            }
        };
        let coeff = move |k: u64| {
            let c = nn * (k as f64 * nn + shift);
            c * c
        };
        self.sum_geometric(1, p1, q, coeff, fixed, rho)
    }

    /// N Σ_{k≥0} (k+1)² against the running power ρ^{2k+1} or ρ^{−2k−3}.
    fn sum_square(&self, rho: f64, fixed: Option<u64>) -> Result<(f64, u64)> {
        if rho == 0.0 {
            return Ok((0.0, 0));
        }
        let nn = self.n as f64;
        let (q, p0) = match self.region {
            Region::Inner => (rho * rho, rho),
            Region::Outer => (1.0 / (rho * rho), rho.powi(-3)),
        };
        let coeff = move |k: u64| {
            let kk = (k + 1) as f64;
            nn * kk * kk
        };
        self.sum_geometric(0, p0, q, coeff, fixed, rho)
    }

    /// Sums Σ_{k≥k0} coeff(k)·p0·q^{k−k0} until the geometric tail bound
    /// coeff-growth-adjusted ratio drops the remainder below tolerance/2.
    fn sum_geometric<C>(
        &self,
        k0: u64,
        p0: f64,
        q: f64,
        coeff: C,
        fixed: Option<u64>,
        rho: f64,
    ) -> Result<(f64, u64)>
    where
        C: Fn(u64) -> f64,
    {
        let mut terms = Vec::new();
        let mut power = p0;
        let mut k = k0;
        loop {
            let t = coeff(k) * power;
            terms.push(t);
            if let Some(cap) = fixed {
                if (k - k0 + 1) >= cap {
                    break;
                }
            } else {
                // |t_{k+1}/t_k| ≤ q·coeff(k+1)/coeff(k), decreasing in k.
                let r = q * coeff(k + 1) / coeff(k);
                if r < 1.0 && t.abs() * r / (1.0 - r) <= 0.5 * self.tolerance {
                    break;
                }
            }
            k += 1;
            if k - k0 >= self.max_terms {
                return Err(Error::TruncationFailure { rho, terms: self.max_terms as usize });
            }
            power *= q;
        }
        Ok((pairwise_sum(&terms), terms.len() as u64))
    }
}

/// Convenience single-shot density evaluation at default tolerance 1e−12.
pub fn radial_density(n: u32, rho: f64, region: Region) -> Result<f64> {
    RadialDensity::new(n, region, 1e-12)?.eval(rho)
}

/// Both sides of Parseval's identity for the sequence `coeffs`: the angular
/// quadrature of |Σ g_k e^{ikθ}|² against 2π, and Σ |g_k|².  They agree to
/// rounding whenever samples > 2·(len−1), since the integrand is then a
/// trigonometric polynomial below the aliasing limit.
pub fn parseval_check(coeffs: &[Complex64], samples: usize) -> (f64, f64) {
    assert!(samples >= 2, "need at least two angular samples");
    let mut values = Vec::with_capacity(samples);
    for i in 0..samples {
        let theta = 2.0 * PI * i as f64 / samples as f64;
        let z = Complex64::from_polar(1.0, theta);
        // Horner evaluation of the trigonometric polynomial at z.
        let mut acc = Complex64::new(0.0, 0.0);
        for g in coeffs.iter().rev() {
            acc = acc * z + g;
        }
        values.push(acc.norm_sqr());
    }
    let lhs = pairwise_sum(&values) / samples as f64;
    let squares: Vec<f64> = coeffs.iter().map(|g| g.norm_sqr()).collect();
    (lhs, pairwise_sum(&squares))
}

/// Numeric value of 2π·[∫₀ᵗ inner + ∫_{1/t}^∞ outer] for t strictly inside
/// the fast-convergence region (t ≤ 0.99): adaptive quadrature on both
/// finite legs plus the term-by-term analytic tail of the outer density.
pub fn i_truncated_numeric(n: u32, t: f64, tol: f64) -> Result<f64> {
    assert!(n >= 2);
    if t.is_nan() || t <= 0.1 || t > 0.99 {
        return Err(Error::Domain(format!("annulus edge t = {t} outside (0.1, 0.99]")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let series_tol = (tol * 1e-3).max(1e-14);
    let quad_tol = 0.125 * tol;
    let inner = RadialDensity::new(n, Region::Inner, series_tol)?;
    let outer = RadialDensity::new(n, Region::Outer, series_tol)?;
    let outer_edge = 1.0 / t;
    let cut = 10.0f64;

    let inner_split = t.min(0.9);
    let outer_split = outer_edge.max(1.0 / 0.9);
    let inner_val = integrate_density(&inner, 0.0, inner_split, quad_tol)?
        + integrate_density(&inner, inner_split, t, quad_tol)?;
    let outer_val = integrate_density(&outer, outer_edge, outer_split, quad_tol)?
        + integrate_density(&outer, outer_split, cut, quad_tol)?;
    Ok(2.0 * PI * (inner_val + outer_val + outer_tail(n, cut, series_tol)))
}

/// Exact antiderivative route for the same truncated integral:
/// 2πN f(t) + N(N²+1)(π/2) t².  The two paths must agree for every t.
pub fn i_antiderivative_path(n: u32, t: f64) -> Result<f64> {
    let nn = n as f64;
    Ok(2.0 * PI * nn * f_bracket(n, t)? + nn * (nn * nn + 1.0) * (PI / 2.0) * t * t)
}

/// Richardson table and extrapolated limit of the series route.
#[derive(Debug, Clone)]
pub struct SeriesIntegral {
    pub value: f64,
    pub error_estimate: f64,
    /// Rows (ε, I(ε)) for the excluded annulus 1−ε ≤ ρ ≤ 1/(1−ε).
    pub table: Vec<(f64, f64)>,
}

/// The direct quartic term I by the series route: numeric densities away
/// from the unit circle, the closed antiderivative inside the thin annulus
/// |ρ−1| < 1e−2, and Richardson extrapolation of the annulus parameter over
/// ε ∈ {1e−2, 5e−3, 2.5e−3}.
pub fn i_by_series(n: u32, tol: f64) -> Result<SeriesIntegral> {
    assert!(n >= 2);
    if tol.is_nan() || tol < 1e-12 {
        return Err(Error::Domain(format!("tolerance must be at least 1e-12, got {tol}")));
    }
    const SCHEDULE: [f64; 3] = [1e-2, 5e-3, 2.5e-3];
    let t0 = 1.0 - SCHEDULE[0];
    let base = i_truncated_numeric(n, t0, tol)?;
    let anchor = i_antiderivative_path(n, t0)?;
    let mut table = Vec::with_capacity(SCHEDULE.len());
    for eps in SCHEDULE {
        let band = i_antiderivative_path(n, 1.0 - eps)? - anchor;
        table.push((eps, base + band));
    }
    // The rows must approach a limit: successive differences of an analytic
    // ε-expansion shrink by the schedule's step ratio.
    let d1 = (table[1].1 - table[0].1).abs();
    let d2 = (table[2].1 - table[1].1).abs();
    if d2 >= d1 && d2 > 10.0 * tol {
        return Err(Error::NonConvergence { table });
    }
    let ex = extrapolate_polynomial(&table)?;
    Ok(SeriesIntegral {
        value: ex.value,
        error_estimate: ex.error_estimate + tol,
        table,
    })
}

/// Adaptive integral of a density over [a, b], bit-reproducible across
/// thread counts; failures inside parallel evaluation are carried out.
fn integrate_density(density: &RadialDensity, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a >= b {
        return Ok(0.0);
    }
    let failure: Mutex<Option<Error>> = Mutex::new(None);
    let f = |rho: f64| -> (f64, u64) {
        match density.eval_with_terms(rho) {
            Ok((v, terms)) => (v, terms),
            Err(e) => {
                *failure.lock().expect("poisoned") = Some(e);
                (f64::NAN, 1)
            }
        }
    };
    let result = integrate_refining_par(&f, a, b, tol, 8, 14);
    if let Some(e) = failure.into_inner().expect("poisoned") {
        return Err(e);
    }
    Ok(result.value)
}

/// Term-by-term tail ∫_R^∞ outer density dρ, summed to the tolerance.
fn outer_tail(n: u32, cut: f64, tol: f64) -> f64 {
    let nn = n as f64;
    let q = cut.powi(-2 * n as i32);
    let mut terms = vec![nn * (nn * nn + 1.0) / (4.0 * cut * cut)];
    let mut k = 1u64;
    loop {
        let kk = k as f64;
        let c = nn * (kk * nn + 1.0);
        let t = c * c * cut.powi(-2 * (k * n as u64) as i32 - 2) / (2.0 * kk * nn + 2.0);
        terms.push(t);
        if t.abs() * q / (1.0 - q) <= 0.5 * tol {
            break;
        }
        k += 1;
    }
    let mut k = 0u64;
    let q2 = 1.0 / (cut * cut);
    loop {
        let kk = (k + 1) as f64;
        let t = -nn * kk * kk * cut.powi(-2 * k as i32 - 2) / (2.0 * k as f64 + 2.0);
        terms.push(t);
        if t.abs() * q2 / (1.0 - q2) <= 0.5 * tol {
            break;
        }
        k += 1;
    }
    pairwise_sum(&terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::i_value;
    use crate::config::make_symmetric_config;
    use crate::integrand::{circle_average, raw_integrand};
    use crate::numerics::fit_loglog_slope;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inner_density_vanishes_at_the_origin() {
        for n in [2u32, 3, 7] {
            let d = RadialDensity::new(n, Region::Inner, 1e-12).unwrap();
            assert_eq!(d.eval(0.0).unwrap(), 0.0);
            let near = d.eval(1e-6).unwrap();
            assert!(near.abs() < 1e-5, "n={n}: {near}");
        }
    }

    #[test]
    fn inner_density_matches_angular_oracle() {
        // (ρ/2π)·∮ raw dθ over the circle of radius ρ equals the density.
        for (n, rho) in [(2u32, 0.5), (2, 0.3), (3, 0.5), (5, 0.8)] {
            let cfg = make_symmetric_config(n, 1).unwrap();
            let avg = circle_average(
                |x| raw_integrand(x, &cfg),
                Complex64::new(0.0, 0.0),
                rho,
                4096,
            )
            .unwrap();
            let d = radial_density(n, rho, Region::Inner).unwrap();
            assert!((d - rho * avg).abs() <= 1e-9, "n={n} rho={rho}: {d} vs {}", rho * avg);
        }
    }

    #[test]
    fn outer_density_matches_angular_oracle() {
        for (n, rho) in [(2u32, 1.5), (3, 3.0), (5, 1.5)] {
            let cfg = make_symmetric_config(n, 1).unwrap();
            let avg = circle_average(
                |x| raw_integrand(x, &cfg),
                Complex64::new(0.0, 0.0),
                rho,
                4096,
            )
            .unwrap();
            let d = radial_density(n, rho, Region::Outer).unwrap();
            assert!((d - rho * avg).abs() <= 1e-9, "n={n} rho={rho}: {d} vs {}", rho * avg);
        }
    }

    #[test]
    fn outer_density_decays_cubically_with_the_far_field_constant() {
        for n in [2u32, 4, 6] {
            let radii: Vec<f64> = (0..8).map(|i| 10.0 * 1.4f64.powi(i)).collect();
            let vals: Vec<f64> = radii
                .iter()
                .map(|&r| radial_density(n, r, Region::Outer).unwrap())
                .collect();
            let slope = fit_loglog_slope(&radii, &vals);
            assert!((slope + 3.0).abs() <= 0.05, "n={n}: slope {slope}");
            // Leading coefficient is the far-field constant (N³−N)/2.
            let c = vals[7] * radii[7].powi(3);
            let expected = ((n as f64).powi(3) - n as f64) / 2.0;
            assert!((c / expected - 1.0).abs() < 0.01, "n={n}: {c} vs {expected}");
        }
    }

    #[test]
    fn densities_are_on_sided() {
        let inner = RadialDensity::new(3, Region::Inner, 1e-12).unwrap();
        let outer = RadialDensity::new(3, Region::Outer, 1e-12).unwrap();
        assert!(inner.eval(1.2).is_err());
        assert!(outer.eval(0.8).is_err());
        assert!(outer.eval(1.0).is_err());
    }

    #[test]
    fn truncation_cap_is_reported() {
        let d = RadialDensity::new(2, Region::Inner, 1e-12).unwrap().with_max_terms(10);
        match d.eval(0.999) {
            Err(Error::TruncationFailure { rho, terms }) => {
                assert_eq!(terms, 10);
                assert!((rho - 0.999).abs() < 1e-15);
            }
            other => panic!("expected truncation failure, got {other:?}"),
        }
    }

    #[test]
    fn doubling_the_truncation_stays_within_the_tail_bound() {
        for (n, rho, region) in [(2u32, 0.9, Region::Inner), (5, 1.1, Region::Outer)] {
            let d = RadialDensity::new(n, region, 1e-10).unwrap();
            let (bounded, used) = d.eval_with_terms(rho).unwrap();
            let refined = d.eval_truncated(rho, 4 * used).unwrap();
            assert!(
                (bounded - refined).abs() <= 1e-10,
                "n={n} rho={rho}: {bounded} vs {refined}"
            );
        }
    }

    #[test]
    fn parseval_trivial_sequences() {
        let (lhs, rhs) = parseval_check(&[Complex64::new(1.0, 0.0)], 64);
        assert!((lhs - 1.0).abs() < 1e-14 && (rhs - 1.0).abs() < 1e-14);

        let (lhs, rhs) = parseval_check(
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
            64,
        );
        assert!((lhs - 2.0).abs() < 1e-13 && (rhs - 2.0).abs() < 1e-13);
    }

    #[test]
    fn parseval_on_geometric_derivative_series() {
        // Coefficients of (1 − ρ e^{iθ})⁻² at ρ = 1/2 are (k+1)/2^k.
        let coeffs: Vec<Complex64> = (0..30)
            .map(|k| Complex64::new((k as f64 + 1.0) * 0.5f64.powi(k), 0.0))
            .collect();
        let expected: f64 = (0..30).map(|k| ((k + 1) * (k + 1)) as f64 / 4.0f64.powi(k)).sum();
        let (lhs, rhs) = parseval_check(&coeffs, 128);
        assert!((lhs - expected).abs() < 1e-12, "{lhs} vs {expected}");
        assert!((rhs - expected).abs() < 1e-12, "{rhs} vs {expected}");
    }

    #[test]
    fn parseval_on_random_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let len = rng.gen_range(1..=64);
            let coeffs: Vec<Complex64> = (0..len)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let (lhs, rhs) = parseval_check(&coeffs, 256);
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn numeric_and_antiderivative_paths_agree() {
        for (n, t) in [(2u32, 0.9), (3, 0.8), (6, 0.9)] {
            let numeric = i_truncated_numeric(n, t, 1e-10).unwrap();
            let closed = i_antiderivative_path(n, t).unwrap();
            assert!(
                (numeric - closed).abs() <= 1e-9 * closed.abs().max(1.0),
                "n={n} t={t}: {numeric} vs {closed}"
            );
        }
    }

    #[test]
    fn series_route_reproduces_the_closed_value() {
        for n in [2u32, 3, 8] {
            let got = i_by_series(n, 1e-8).unwrap();
            let expected = i_value(n);
            assert!(
                (got.value - expected).abs() <= 1e-6 * expected,
                "n={n}: {} vs {expected}",
                got.value
            );
            assert!((got.value - expected).abs() <= got.error_estimate.max(1e-6 * expected));
            assert_eq!(got.table.len(), 3);
        }
    }

    #[test]
    fn series_route_rejects_loose_tolerance_inputs() {
        assert!(i_by_series(3, 1e-13).is_err());
        assert!(i_truncated_numeric(3, 0.995, 1e-8).is_err());
    }
}
