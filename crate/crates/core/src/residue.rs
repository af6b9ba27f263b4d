//! Unit-circle contour integration by residues: an independent route to the
//! counterterm's angular integral Γ(ρ) and, through it, the second term II.
//!
//! On the circle |x| = ρ each counterterm summand becomes a rational
//! function of w = e^{iθ} with one double pole at a_j/ρ and two simple poles
//! at ρ₋a_j and ρ₊a_j, the roots of w² − ((2+ρ²)/ρ)a_j w + a_j².

use crate::algebra::{beta, roots_of_unity};
use crate::error::{Error, Result};
use crate::numerics::{integrate_refining_par, pairwise_sum};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use std::f64::consts::PI;
use std::sync::Mutex;

/// A pole location with its multiplicity (only orders 1 and 2 arise here).
#[derive(Debug, Clone, Copy)]
pub struct Pole {
    pub location: Complex64,
    pub order: u8,
}

/// scale / Π_p (w − location_p)^order_p, with all pole locations distinct.
#[derive(Debug, Clone)]
pub struct ContourIntegrand {
    scale: Complex64,
    poles: Vec<Pole>,
}

impl ContourIntegrand {
    pub fn new(scale: Complex64, poles: Vec<Pole>) -> Result<Self> {
        for p in &poles {
            if p.order == 0 || p.order > 2 {
                return Err(Error::UnsupportedPoleOrder(p.order));
            }
        }
        for (i, p) in poles.iter().enumerate() {
            for q in poles.iter().skip(i + 1) {
                if (p.location - q.location).norm() < 1e-12 {
                    return Err(Error::DegenerateConfiguration(format!(
                        "coincident poles at {}",
                        p.location
                    )));
                }
            }
        }
        Ok(ContourIntegrand { scale, poles })
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    /// Pointwise value, for quadrature cross-checks.
    pub fn evaluate(&self, w: Complex64) -> Result<Complex64> {
        let mut den = Complex64::new(1.0, 0.0);
        for p in &self.poles {
            let d = w - p.location;
            if d.norm() == 0.0 {
                return Err(Error::Pole(w));
            }
            den *= d;
            if p.order == 2 {
                den *= d;
            }
        }
        Ok(self.scale / den)
    }

    /// Residue at the pole with index `at`.
    fn residue(&self, at: usize) -> Complex64 {
        let p = self.poles[at];
        let mut den = Complex64::new(1.0, 0.0);
        let mut log_derivative = Complex64::new(0.0, 0.0);
        for (i, q) in self.poles.iter().enumerate() {
            if i == at {
                continue;
            }
            let d = p.location - q.location;
            den *= d;
            if q.order == 2 {
                den *= d;
            }
            log_derivative -= (q.order as f64) * d.inv();
        }
        match p.order {
            1 => self.scale / den,
            // d/dw [scale / Π (w−q)^{o_q}] at p, by the logarithmic derivative.
            _ => self.scale / den * log_derivative,
        }
    }
}

/// 2πi · Σ residues of `f` at its poles strictly inside the unit circle.
pub fn unit_circle_integral(f: &ContourIntegrand) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, p) in f.poles().iter().enumerate() {
        let distance = (p.location.norm() - 1.0).abs();
        if distance <= 1e-9 {
            return Err(Error::IllConditioned { pole: p.location, distance });
        }
        if p.location.norm() < 1.0 {
            acc += f.residue(i);
        }
    }
    Ok(Complex64::new(0.0, 2.0 * PI) * acc)
}

/// The radius pair ρ₋ρ₊ = 1 splitting the angular denominator
/// 1 + |ρe^{iθ} − a|²: roots of w² − ((2+ρ²)/ρ)aw + a² are ρ±·a.
#[derive(Debug, Clone, Copy)]
pub struct QuadraticRoots {
    pub rho: f64,
    pub rho_minus: f64,
    pub rho_plus: f64,
}

/// ρ± = c ± √(c²−1) with c = (2+ρ²)/(2ρ); ρ₋ is computed as 1/ρ₊ to stay
/// fully accurate when the discriminant subtraction would cancel.
pub fn rho_pm(rho: f64) -> Result<QuadraticRoots> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Domain(format!("rho must be positive, got {rho}")));
    }
    let c = (2.0 + rho * rho) / (2.0 * rho);
    let root = (c * c - 1.0).sqrt();
    let rho_plus = c + root;
    Ok(QuadraticRoots { rho, rho_minus: 1.0 / rho_plus, rho_plus })
}

/// Γ(ρ) assembled from residues: for each vertex the integrand
/// (i a_j³/ρ³) / ((w − a_j/ρ)² (w − ρ₋a_j)(w − ρ₊a_j)) over the unit circle.
pub fn gamma_by_residue(n: u32, rho: f64) -> Result<f64> {
    assert!(n >= 2);
    if rho == 1.0 {
        return Err(Error::JumpPoint);
    }
    let roots = rho_pm(rho)?;
    let scale_base = Complex64::new(0.0, 1.0) / (rho * rho * rho);
    let mut parts = Vec::with_capacity(n as usize);
    for a in roots_of_unity(n) {
        let f = ContourIntegrand::new(
            scale_base * a * a * a,
            vec![
                Pole { location: a / rho, order: 2 },
                Pole { location: roots.rho_minus * a, order: 1 },
                Pole { location: roots.rho_plus * a, order: 1 },
            ],
        )?;
        parts.push(unit_circle_integral(&f)?);
    }
    let total: Complex64 = parts.iter().sum();
    if total.im.abs() > 1e-8 * (1.0 + total.re.abs()) {
        return Err(Error::Evaluation(format!(
            "angular integral should be real, got imaginary part {}",
            total.im
        )));
    }
    Ok(total.re)
}

/// Γ(ρ) by direct angular quadrature of the complex counterterm summands;
/// spectrally accurate away from ρ = 1.
pub fn gamma_by_angular_quadrature(n: u32, rho: f64) -> Result<f64> {
    assert!(n >= 2);
    if rho == 1.0 {
        return Err(Error::JumpPoint);
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Domain(format!("rho must be positive, got {rho}")));
    }
    const SAMPLES: usize = 4096;
    let roots = roots_of_unity(n);
    let mut values = Vec::with_capacity(SAMPLES);
    for i in 0..SAMPLES {
        let theta = 2.0 * PI * i as f64 / SAMPLES as f64;
        let x = Complex64::from_polar(rho, theta);
        let mut v = 0.0;
        for a in &roots {
            let d = x - a;
            let r2 = d.norm_sqr();
            if r2 == 0.0 {
                return Err(Error::Pole(x));
            }
            v += ((a * a) / (d * d * (1.0 + r2))).re;
        }
        values.push(v);
    }
    Ok(2.0 * PI * pairwise_sum(&values) / SAMPLES as f64)
}

/// Antiderivative of (1/2)[(s²+2)/√(s²+4) − s]: T(s) = s/(√(s²+4)+s),
/// written so no cancellation occurs for large s; T(∞) = 1/2.
pub fn tail_antiderivative(s: f64) -> f64 {
    s / ((s * s + 4.0).sqrt() + s)
}

/// (s²+2)/√(s²+4) − s in cancellation-free form.
fn tail_integrand(s: f64) -> f64 {
    let root = (s * s + 4.0).sqrt();
    4.0 / (root * (s * s + 2.0 + s * root))
}

/// Numeric check of the normalized tail integral
/// (1/2)∫₀^∞ [(s²+2)/√(s²+4) − s] ds, equal to 1/2 exactly.
pub fn tail_integral_check() -> f64 {
    let cut = 100.0;
    let f = |s: f64| (0.5 * tail_integrand(s), 1);
    let numeric = integrate_refining_par(&f, 0.0, cut, 1e-12, 8, 16).value;
    // Asymptotic remainder of (1/2)∫_M^∞: (1/2)(M⁻² − 2M⁻⁴ + 5M⁻⁶) + O(M⁻⁸).
    let m2 = cut * cut;
    numeric + 0.5 * (1.0 / m2 - 2.0 / (m2 * m2) + 5.0 / (m2 * m2 * m2))
}

/// Remaining radial mass πN⁻¹·∫_R^∞ ρΓ(ρ)dρ = 1/2 − T(R²), in closed
/// cancellation-free form 2/(√(R⁴+4)+R²)².
pub fn gamma_radial_tail(r: f64) -> f64 {
    let s = r * r;
    let den = (s * s + 4.0).sqrt() + s;
    2.0 / (den * den)
}

/// The radial integral ∫₀^∞ ρΓ(ρ)dρ and the second term II = β_N times it.
#[derive(Debug, Clone)]
pub struct GammaIntegral {
    pub value: f64,
    pub radial_integral: f64,
    pub inner_part: f64,
    pub outer_part: f64,
    pub tail_part: f64,
}

/// II by the residue route: β_N ∫₀^∞ ρΓ(ρ)dρ with Γ from gamma_by_residue,
/// numeric up to ρ = 50 (split at the jump) plus the closed tail beyond.
pub fn ii_by_gamma(n: u32, tol: f64) -> Result<GammaIntegral> {
    assert!(n >= 2);
    if tol.is_nan() || tol < 1e-12 {
        return Err(Error::Domain(format!("tolerance must be at least 1e-12, got {tol}")));
    }
    let cut = 50.0;
    let inner_part = integrate_rho_gamma(n, 0.0, 1.0, 0.25 * tol)?;
    let outer_part = integrate_rho_gamma(n, 1.0, cut, 0.25 * tol)?;
    let tail_part = PI * n as f64 * gamma_radial_tail(cut);
    let radial_integral = inner_part + outer_part + tail_part;
    let b = beta(n).to_f64().expect("beta fits in f64");
    Ok(GammaIntegral {
        value: b * radial_integral,
        radial_integral,
        inner_part,
        outer_part,
        tail_part,
    })
}

fn integrate_rho_gamma(n: u32, a: f64, b: f64, tol: f64) -> Result<f64> {
    let failure: Mutex<Option<Error>> = Mutex::new(None);
    let f = |rho: f64| -> (f64, u64) {
        if rho == 0.0 {
            return (0.0, 1);
        }
        match gamma_by_residue(n, rho) {
            Ok(v) => (rho * v, 1),
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{gamma_closed, gamma_closed_limits_at_one, ii_value};
    use crate::numerics::complex_step_derivative;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// 4096-point trapezoidal contour integral ∮ f dw for cross-checks.
    fn contour_by_quadrature(f: &ContourIntegrand) -> Complex64 {
        const SAMPLES: usize = 4096;
        let mut re = Vec::with_capacity(SAMPLES);
        let mut im = Vec::with_capacity(SAMPLES);
        for i in 0..SAMPLES {
            let theta = 2.0 * PI * i as f64 / SAMPLES as f64;
            let w = Complex64::from_polar(1.0, theta);
            let v = f.evaluate(w).unwrap() * Complex64::new(0.0, 1.0) * w;
            re.push(v.re);
            im.push(v.im);
        }
        2.0 * PI * Complex64::new(pairwise_sum(&re), pairwise_sum(&im)) / SAMPLES as f64
    }

    #[test]
    fn residues_match_quadrature_on_random_configurations() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut checked = 0;
        'outer: while checked < 100 {
            let count = rng.gen_range(1..=4);
            let mut poles = Vec::with_capacity(count);
            for _ in 0..count {
                let radius = if rng.gen_bool(0.5) {
                    rng.gen_range(0.2..0.9)
                } else {
                    rng.gen_range(1.1..3.0)
                };
                let location = Complex64::from_polar(radius, rng.gen_range(0.0..2.0 * PI));
                if poles.iter().any(|p: &Pole| (p.location - location).norm() < 0.05) {
                    continue 'outer;
                }
                poles.push(Pole { location, order: rng.gen_range(1..=2) });
            }
            let scale = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let f = ContourIntegrand::new(scale, poles).unwrap();
            let exact = unit_circle_integral(&f).unwrap();
            let quad = contour_by_quadrature(&f);
            assert!(
                (exact - quad).norm() <= 1e-10 * (1.0 + exact.norm()),
                "residues {exact} vs quadrature {quad}"
            );
            checked += 1;
        }
    }

    #[test]
    fn derivative_test_vector_at_the_double_pole() {
        // (1/(w² − ((2+ρ²)/ρ)a w + a²))' evaluated at a/ρ equals a^{N−3}ρ⁵.
        for (n, j, rho) in [(5u32, 2usize, 0.7), (3, 1, 1.8), (8, 5, 0.4)] {
            let a = roots_of_unity(n)[j - 1];
            let roots = rho_pm(rho).unwrap();
            let inv_q = move |w: Complex64| {
                ((w - roots.rho_minus * a) * (w - roots.rho_plus * a)).inv()
            };
            let d = complex_step_derivative(inv_q, a / rho, 1e-4);
            let expected = a.powi(n as i32 - 3) * rho.powi(5);
            assert!(
                (d - expected).norm() <= 1e-8 * expected.norm(),
                "n={n} j={j} rho={rho}: {d} vs {expected}"
            );
        }
    }

    #[test]
    fn quadratic_roots_satisfy_their_identities() {
        for i in 0..50 {
            let rho = 10f64.powf(-3.0 + 6.0 * i as f64 / 49.0);
            let r = rho_pm(rho).unwrap();
            assert!((r.rho_minus * r.rho_plus - 1.0).abs() <= 1e-13);
            let c = (2.0 + rho * rho) / (2.0 * rho);
            assert!((r.rho_minus + r.rho_plus - 2.0 * c).abs() <= 1e-13 * (1.0 + 2.0 * c));
            assert!(r.rho_minus < 1.0 && r.rho_plus > 1.0);
        }
    }

    #[test]
    fn gamma_by_residue_matches_closed_form_on_both_branches() {
        for n in [2u32, 3, 5, 8] {
            for i in 0..50 {
                let rho = 0.05 + 3.0 * i as f64 / 49.0;
                if (rho - 1.0).abs() < 0.02 {
                    continue;
                }
                let by_residue = gamma_by_residue(n, rho).unwrap();
                let closed = gamma_closed(n, rho).unwrap();
                assert!(
                    (by_residue - closed).abs() <= 1e-10 * (1.0 + closed.abs()),
                    "n={n} rho={rho}: {by_residue} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn gamma_three_routes_agree_at_reference_radii() {
        for n in [2u32, 3, 5] {
            for rho in [0.3, 0.9, 1.1, 3.0] {
                let a = gamma_by_residue(n, rho).unwrap();
                let b = gamma_closed(n, rho).unwrap();
                let c = gamma_by_angular_quadrature(n, rho).unwrap();
                assert!((a - b).abs() <= 1e-9, "n={n} rho={rho}: residue {a} closed {b}");
                assert!((a - c).abs() <= 1e-9, "n={n} rho={rho}: residue {a} quadrature {c}");
            }
        }
    }

    #[test]
    fn gamma_jump_at_one_is_2_pi_n() {
        for n in [2u32, 4, 7] {
            let eps = 1e-6;
            let below = gamma_by_residue(n, 1.0 - eps).unwrap();
            let above = gamma_by_residue(n, 1.0 + eps).unwrap();
            let jump = below - above;
            let expected = 2.0 * PI * n as f64;
            assert!(
                (jump - expected).abs() <= 1e-3,
                "n={n}: jump {jump} vs {expected}"
            );
            let (limit_below, limit_above) = gamma_closed_limits_at_one(n);
            assert!((limit_below - limit_above - expected).abs() <= 1e-12);
        }
    }

    #[test]
    fn gamma_rejects_the_jump_radius_and_near_circle_poles() {
        assert!(matches!(gamma_by_residue(3, 1.0), Err(Error::JumpPoint)));
        assert!(matches!(
            gamma_by_residue(3, 1.0 + 1e-12),
            Err(Error::IllConditioned { .. })
        ));
        let f = ContourIntegrand::new(
            Complex64::new(1.0, 0.0),
            vec![Pole { location: Complex64::new(1.0 + 1e-10, 0.0), order: 1 }],
        )
        .unwrap();
        assert!(matches!(unit_circle_integral(&f), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn integrand_construction_guards() {
        let p = |re: f64, order: u8| Pole { location: Complex64::new(re, 0.0), order };
        assert!(matches!(
            ContourIntegrand::new(Complex64::new(1.0, 0.0), vec![p(0.5, 3)]),
            Err(Error::UnsupportedPoleOrder(3))
        ));
        assert!(matches!(
            ContourIntegrand::new(Complex64::new(1.0, 0.0), vec![p(0.5, 1), p(0.5, 2)]),
            Err(Error::DegenerateConfiguration(_))
        ));
    }

    #[test]
    fn tail_integral_is_one_half() {
        let v = tail_integral_check();
        assert!((v - 0.5).abs() <= 1e-9, "got {v}");
    }

    #[test]
    fn tail_antiderivative_matches_partial_numeric_integral() {
        let f = |s: f64| (0.5 * tail_integrand(s), 1u64);
        let numeric = integrate_refining_par(&f, 0.0, 10.0, 1e-12, 8, 16).value;
        assert!((numeric - tail_antiderivative(10.0)).abs() <= 1e-6);
        assert!((gamma_radial_tail(10.0) - (0.5 - tail_antiderivative(100.0))).abs() <= 1e-15);
    }

    #[test]
    fn radial_gamma_integral_is_pi_n() {
        for n in [2u32, 3, 6] {
            let g = ii_by_gamma(n, 1e-9).unwrap();
            let expected = PI * n as f64;
            assert!(
                (g.radial_integral - expected).abs() <= 1e-8 * expected,
                "n={n}: {} vs {expected}",
                g.radial_integral
            );
            // Inner-branch decomposition: the extra 2πNρ² branch contributes
            // exactly πN/2, and the continuous part integrates to πN/2.
            let extra = 2.0 * PI * n as f64 / 4.0;
            let continuous = g.inner_part - extra + g.outer_part + g.tail_part;
            assert!((continuous - expected / 2.0).abs() <= 1e-7, "n={n}: {continuous}");
        }
    }

    #[test]
    fn ii_by_gamma_matches_closed_value() {
        for n in [2u32, 3, 8] {
            let g = ii_by_gamma(n, 1e-9).unwrap();
            let expected = ii_value(n);
            assert!(
                (g.value - expected).abs() <= 1e-6 * expected,
                "n={n}: {} vs {expected}",
                g.value
            );
        }
    }

    #[test]
    fn gamma_is_positive_before_and_heavy_after_the_jump() {
        // Γ > 0 on (0,1); beyond 1 it decays like 2πN/ρ⁶ but stays positive.
        for n in [2u32, 5] {
            for rho in [0.1, 0.5, 0.99, 1.01, 2.0, 10.0] {
                let v = gamma_by_residue(n, rho).unwrap();
                assert!(v > 0.0, "n={n} rho={rho}: {v}");
            }
        }
    }
}
