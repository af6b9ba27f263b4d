//! Closed forms on the unit roots: power sums, simple-pole sums, the local
//! field coefficients at a polygon vertex, the interaction constant
//! beta_N = (N^2 - 1)/3, squared-field Taylor coefficients, and the exact
//! values of the two halves of the correlation coefficient.
//!
//! Every closed form ships with a direct-summation twin (`*_direct`) used as
//! an independent oracle in tests and in the verification suite.

use crate::error::{Error, Result};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::ToPrimitive;
use std::f64::consts::PI;

/// The N-th roots of unity a_j = exp(2*pi*i*(j-1)/N), j = 1..=N, in order.
/// Index 0 of the returned vector is a_1 = 1.
pub fn roots_of_unity(n: u32) -> Vec<Complex64> {
    assert!(n >= 1);
    (0..n)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))
        .collect()
}

fn rational_to_f64(q: Rational64) -> f64 {
    q.to_f64().expect("rational fits in f64")
}

/// Sum of a_j^l over the N-th roots of unity: N when N divides l, else 0.
/// Exact for every integer exponent, including |l| >= N.
pub fn power_sum(n: u32, l: i64) -> Complex64 {
    assert!(n >= 1);
    if l.rem_euclid(n as i64) == 0 {
        Complex64::new(n as f64, 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Direct-summation oracle for `power_sum`.
pub fn power_sum_direct(n: u32, l: i64) -> Complex64 {
    let l32 = i32::try_from(l).expect("exponent fits in i32");
    roots_of_unity(n).iter().map(|a| a.powi(l32)).sum()
}

/// Sum over the roots of 1/(x - a_j), in closed form N x^{N-1} / (x^N - 1).
pub fn pole_sum_closed(n: u32, x: Complex64) -> Result<Complex64> {
    assert!(n >= 1);
    let xn = x.powi(n as i32);
    let den = xn - 1.0;
    if den.norm() == 0.0 {
        return Err(Error::Pole(x));
    }
    Ok(n as f64 * x.powi(n as i32 - 1) / den)
}

/// Direct-summation oracle for `pole_sum_closed`.
pub fn pole_sum_direct(n: u32, x: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for a in roots_of_unity(n) {
        let d = x - a;
        if d.norm() == 0.0 {
            return Err(Error::Pole(x));
        }
        acc += d.inv();
    }
    Ok(acc)
}

/// Local field at vertex k (1-based): the full field with the k-th pole
/// removed, alpha_k(x) = -(N-1)/(2x) + sum_{j != k} 1/(x - a_j).
/// Vanishes at x = a_k; that zero is what makes the polygon forceless.
pub fn alpha(n: u32, k: usize, x: Complex64) -> Result<Complex64> {
    assert!(n >= 2);
    if k < 1 || k > n as usize {
        return Err(Error::InvalidIndex { index: k, size: n as usize });
    }
    if x.norm() == 0.0 {
        return Err(Error::Pole(x));
    }
    let roots = roots_of_unity(n);
    let mut acc = -Complex64::new((n as f64 - 1.0) / 2.0, 0.0) / x;
    for (j, a) in roots.iter().enumerate() {
        if j + 1 == k {
            continue;
        }
        let d = x - a;
        if d.norm() == 0.0 {
            return Err(Error::Pole(x));
        }
        acc += d.inv();
    }
    Ok(acc)
}

/// Derivative of alpha_k at its own vertex: (beta_N / 4) * a_k^{N-2}.
pub fn alpha_prime_at_vortex(n: u32, k: usize) -> Complex64 {
    assert!(n >= 2);
    assert!(k >= 1 && k <= n as usize, "vertex index out of range");
    let a_k = Complex64::from_polar(1.0, 2.0 * PI * (k as f64 - 1.0) / n as f64);
    let b = rational_to_f64(beta(n));
    0.25 * b * a_k.powi(n as i32 - 2)
}

/// The interaction constant beta_N = sum_{j=2}^N 4/|1 - a_j|^2 = (N^2 - 1)/3,
/// exact as a rational.
pub fn beta(n: u32) -> Rational64 {
    assert!(n >= 2);
    let n = n as i64;
    Rational64::new(n * n - 1, 3)
}

/// Direct-summation oracle for `beta`.
pub fn beta_direct(n: u32) -> f64 {
    assert!(n >= 2);
    let roots = roots_of_unity(n);
    let terms: Vec<f64> = roots[1..]
        .iter()
        .map(|a| 4.0 / (Complex64::new(1.0, 0.0) - a).norm_sqr())
        .collect();
    crate::numerics::pairwise_sum(&terms)
}

/// Closed forms of the vertex products: the full product
/// prod_{j=2}^N (1 - a_j) = N, and the k-deleted product
/// prod_{j=2, j != k}^N (1 - a_j) = sum_{l=0}^{N-2} (N - l - 1) a_k^l.
/// Requires 2 <= k <= N.
pub fn poly_products(n: u32, k: usize) -> Result<(Complex64, Complex64)> {
    assert!(n >= 2);
    if k < 2 || k > n as usize {
        return Err(Error::InvalidIndex { index: k, size: n as usize });
    }
    let a_k = Complex64::from_polar(1.0, 2.0 * PI * (k as f64 - 1.0) / n as f64);
    let full = Complex64::new(n as f64, 0.0);
    let mut deleted = Complex64::new(0.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    for l in 0..=(n as i64 - 2) {
        deleted += (n as f64 - l as f64 - 1.0) * pow;
        pow *= a_k;
    }
    Ok((full, deleted))
}

/// Direct-product oracle for `poly_products`.
pub fn poly_products_direct(n: u32, k: usize) -> Result<(Complex64, Complex64)> {
    assert!(n >= 2);
    if k < 2 || k > n as usize {
        return Err(Error::InvalidIndex { index: k, size: n as usize });
    }
    let roots = roots_of_unity(n);
    let one = Complex64::new(1.0, 0.0);
    let mut full = one;
    let mut deleted = one;
    for (j, a) in roots.iter().enumerate().skip(1) {
        full *= one - a;
        if j + 1 != k {
            deleted *= one - a;
        }
    }
    Ok((full, deleted))
}

/// Taylor coefficients of the two squared-field expansions
///   ((N+1) x^N + (N-1))^2 / (1 - x^N)^2 = sum_k c_k x^{kN}   (|x| < 1)
///   ((N-1) x^N + (N+1))^2 / (1 - x^N)^2 = sum_k d_k x^{kN}   (used for |x| > 1)
/// with c_0 = (N-1)^2, c_k = 4N(kN - 1) for k >= 1, d_0 = (N+1)^2,
/// d_k = 4N(kN + 1) for k >= 1. Returns (c, d), each of length kmax + 1.
pub fn taylor_coeffs(n: u32, kmax: usize) -> (Vec<i64>, Vec<i64>) {
    assert!(n >= 2);
    let nn = n as i64;
    let mut c = Vec::with_capacity(kmax + 1);
    let mut d = Vec::with_capacity(kmax + 1);
    for k in 0..=(kmax as i64) {
        let (ck, dk) = if k == 0 {
            ((nn - 1) * (nn - 1), (nn + 1) * (nn + 1))
        } else {
            (4 * nn * (k * nn - 1), 4 * nn * (k * nn + 1))
        };
        // The piecewise form coincides with max{4N(kN -+ 1), (N -+ 1)^2}.
        debug_assert_eq!(ck, (4 * nn * (k * nn - 1)).max((nn - 1) * (nn - 1)));
        debug_assert_eq!(dk, (4 * nn * (k * nn + 1)).max((nn + 1) * (nn + 1)));
        c.push(ck);
        d.push(dk);
    }
    (c, d)
}

/// The combined radial antiderivative of the series route, in closed form:
/// f(rho) = [N^2 rho^{2N-2}(1 + rho^4) - N rho^{2N-2}(1 - rho^4)(1 - rho^{2N})
///           - 2 rho^2 (sum_{j=0}^{N-1} rho^{2j})^2] / (2 (1 - rho^{2N})^2).
/// Defined for 0 < rho < 1; the rho -> 1 limit is `f_limit_at_one`.
pub fn f_bracket(n: u32, rho: f64) -> Result<f64> {
    assert!(n >= 2);
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!("f_bracket needs 0 < rho < 1, got {rho}")));
    }
    let r2 = rho * rho;
    let r4 = r2 * r2;
    let r2n = rho.powi(2 * n as i32 - 2) * r2;
    let nn = n as f64;
    let mut geom = 0.0;
    let mut p = 1.0;
    for _ in 0..n {
        geom += p;
        p *= r2;
    }
    let num = nn * nn * (r2n / r2) * (1.0 + r4) - nn * (r2n / r2) * (1.0 - r4) * (1.0 - r2n)
        - 2.0 * r2 * geom * geom;
    let den = (1.0 - r2n) * (1.0 - r2n);
    Ok(0.5 * num / den)
}

/// Limit of `f_bracket` as rho -> 1: -(N^2 + 5)/12.
pub fn f_limit_at_one(n: u32) -> f64 {
    assert!(n >= 2);
    -((n as f64) * (n as f64) + 5.0) / 12.0
}

/// First half of the correlation coefficient as a multiple of pi:
/// I / pi = N (N^2 - 1) / 3.
pub fn i_value_pi_multiple(n: u32) -> Rational64 {
    assert!(n >= 2);
    let nn = n as i64;
    Rational64::new(nn * (nn * nn - 1), 3)
}

/// First half of the correlation coefficient, I = pi N (N^2 - 1) / 3.
pub fn i_value(n: u32) -> f64 {
    PI * rational_to_f64(i_value_pi_multiple(n))
}

/// Angular integral of the counterterm kernel over the circle of radius rho
/// (without the beta_N factor):
/// Gamma(rho) = pi N (rho^4 + 2)/sqrt(rho^4 + 4) - pi N rho^2 + {2 pi N rho^2 if rho < 1}.
/// Jumps by 2 pi N across rho = 1; requesting rho = 1 is an error
/// (see `gamma_closed_limits_at_one` for the one-sided values).
pub fn gamma_closed(n: u32, rho: f64) -> Result<f64> {
    assert!(n >= 2);
    if rho.is_nan() || rho <= 0.0 {
        return Err(Error::Domain(format!("gamma_closed needs rho > 0, got {rho}")));
    }
    if rho == 1.0 {
        return Err(Error::JumpPoint);
    }
    let r2 = rho * rho;
    let r4 = r2 * r2;
    let pin = PI * n as f64;
    let smooth = pin * (r4 + 2.0) / (r4 + 4.0).sqrt() - pin * r2;
    Ok(if rho < 1.0 { smooth + 2.0 * pin * r2 } else { smooth })
}

/// One-sided limits (left, right) of `gamma_closed` at rho = 1.
/// The difference is exactly 2 pi N.
pub fn gamma_closed_limits_at_one(n: u32) -> (f64, f64) {
    assert!(n >= 2);
    let pin = PI * n as f64;
    let smooth = pin * 3.0 / 5.0f64.sqrt() - pin;
    (smooth + 2.0 * pin, smooth)
}

/// Second half of the correlation coefficient as a multiple of pi, computed
/// through beta_N: II / pi = beta_N * N = N (N^2 - 1) / 3.
pub fn ii_value_pi_multiple(n: u32) -> Rational64 {
    assert!(n >= 2);
    beta(n) * Rational64::from_integer(n as i64)
}

/// Second half of the correlation coefficient, II = beta_N * pi N.
/// Bit-identical to `i_value`: the shared rational prefactor is converted to
/// f64 once and multiplied by pi the same way.
pub fn ii_value(n: u32) -> f64 {
    PI * rational_to_f64(ii_value_pi_multiple(n))
}

/// The correlation coefficient A_0 = m^4 (I - II) / 4 as a multiple of pi.
/// The subtraction happens in exact rational arithmetic, so the result is
/// exactly zero for every N >= 2 and integer m.
pub fn correlation_coefficient_pi_multiple(n: u32, m: i64) -> Rational64 {
    assert!(n >= 2);
    let m4 = Rational64::from_integer(m.pow(4));
    m4 * (i_value_pi_multiple(n) - ii_value_pi_multiple(n)) / Rational64::from_integer(4)
}

/// The correlation coefficient A_0 = m^4 (I - II) / 4. Exactly 0.0.
pub fn correlation_coefficient(n: u32, m: i64) -> f64 {
    PI * rational_to_f64(correlation_coefficient_pi_multiple(n, m))
}

/// The coefficient obtained if the counterterm half is dropped:
/// m^4 I / 4, as a multiple of pi: m^4 N (N^2 - 1) / 12.
pub fn partial_coefficient_pi_multiple(n: u32, m: i64) -> Rational64 {
    assert!(n >= 2);
    let nn = n as i64;
    Rational64::from_integer(m.pow(4)) * Rational64::new(nn * (nn * nn - 1), 12)
}

/// The counterfactual one-sided coefficient m^4 I / 4 (the value the energy
/// expansion would carry if only the first half survived).
pub fn partial_coefficient(n: u32, m: i64) -> f64 {
    PI * rational_to_f64(partial_coefficient_pi_multiple(n, m))
}

/// Exact constants attached to a polygon order N, bundled for reporting.
#[derive(Debug, Clone)]
pub struct ClosedFormConstants {
    pub n: u32,
    pub beta: Rational64,
    pub i_over_pi: Rational64,
    pub ii_over_pi: Rational64,
    pub a0_over_pi: Rational64,
}

impl ClosedFormConstants {
    pub fn new(n: u32) -> Self {
        ClosedFormConstants {
            n,
            beta: beta(n),
            i_over_pi: i_value_pi_multiple(n),
            ii_over_pi: ii_value_pi_multiple(n),
            a0_over_pi: correlation_coefficient_pi_multiple(n, 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn power_sum_follows_divisibility_rule() {
        for n in 2..=12u32 {
            for l in -(3 * n as i64)..=(3 * n as i64) {
                let closed = power_sum(n, l);
                let direct = power_sum_direct(n, l);
                assert!(
                    (closed - direct).norm() < 1e-12,
                    "n={n} l={l}: {closed} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn power_sum_at_exponent_n_is_n_not_zero() {
        // The naive reading "zero for all 0 < |l| <= N" fails at |l| = N;
        // the divisibility rule is the correct statement.
        for n in 2..=16u32 {
            assert_eq!(power_sum(n, n as i64).re, n as f64);
            assert!((power_sum_direct(n, n as i64).re - n as f64).abs() < 1e-12);
            assert_eq!(power_sum(n, -(n as i64)).re, n as f64);
        }
    }

    #[test]
    fn pole_sum_closed_matches_direct_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for n in [2u32, 3, 5, 8, 13] {
            for _ in 0..40 {
                let x = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                if (x.powi(n as i32) - 1.0).norm() < 1e-3 {
                    continue;
                }
                let c = pole_sum_closed(n, x).unwrap();
                let d = pole_sum_direct(n, x).unwrap();
                assert!((c - d).norm() <= 1e-10 * d.norm().max(1.0), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn pole_sum_frozen_value() {
        // N = 2, x = 2i: 2 * (2i) / ((2i)^2 - 1) = 4i / (-5).
        let v = pole_sum_closed(2, Complex64::new(0.0, 2.0)).unwrap();
        assert!((v - Complex64::new(0.0, -0.8)).norm() < 1e-15);
    }

    #[test]
    fn pole_sum_rejects_roots_of_unity() {
        assert!(matches!(
            pole_sum_closed(4, Complex64::new(1.0, 0.0)),
            Err(Error::Pole(_))
        ));
    }

    #[test]
    fn alpha_frozen_value_and_zero() {
        // N = 2, k = 1, x = 2: -1/4 + 1/3 = 1/12.
        let v = alpha(2, 1, Complex64::new(2.0, 0.0)).unwrap();
        assert!((v - Complex64::new(1.0 / 12.0, 0.0)).norm() < 1e-15);
        for n in 2..=32u32 {
            let roots = roots_of_unity(n);
            for k in 1..=n as usize {
                let z = alpha(n, k, roots[k - 1]).unwrap();
                assert!(z.norm() <= 1e-11, "n={n} k={k}: |alpha| = {}", z.norm());
            }
        }
    }

    #[test]
    fn alpha_prime_matches_complex_step() {
        for n in 2..=16u32 {
            let roots = roots_of_unity(n);
            for k in 1..=n as usize {
                let closed = alpha_prime_at_vortex(n, k);
                let stencil = crate::numerics::complex_step_derivative(
                    |z| alpha(n, k, z).unwrap(),
                    roots[k - 1],
                    1e-3,
                );
                assert!(
                    (closed - stencil).norm() <= 1e-10 * closed.norm(),
                    "n={n} k={k}: {closed} vs {stencil}"
                );
            }
        }
    }

    #[test]
    fn alpha_prime_frozen_values() {
        // N = 2: beta_2/4 * a_1^0 = 1/4. N = 3, k = 1: beta_3/4 = 2/3.
        assert!((alpha_prime_at_vortex(2, 1) - Complex64::new(0.25, 0.0)).norm() < 1e-15);
        assert!((alpha_prime_at_vortex(3, 1) - Complex64::new(2.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn beta_closed_matches_direct_sum() {
        for n in 2..=64u32 {
            let closed = rational_to_f64(beta(n));
            let direct = beta_direct(n);
            assert!(
                (closed - direct).abs() <= 1e-10 * closed,
                "n={n}: {closed} vs {direct}"
            );
        }
        assert_eq!(beta(5), Rational64::from_integer(8));
        assert_eq!(beta(2), Rational64::from_integer(1));
    }

    #[test]
    fn poly_products_match_direct_products() {
        for n in 2..=24u32 {
            for k in 2..=n as usize {
                let (full_c, del_c) = poly_products(n, k).unwrap();
                let (full_d, del_d) = poly_products_direct(n, k).unwrap();
                assert!((full_c - full_d).norm() < 1e-9 * n as f64);
                assert!((del_c - del_d).norm() < 1e-9 * n as f64, "n={n} k={k}");
            }
        }
        // Frozen: N = 4, k = 2 (a_2 = i): 3 + 2i - 1 = 2 + 2i; N = 2, k = 2: 1.
        let (_, d) = poly_products(4, 2).unwrap();
        assert!((d - Complex64::new(2.0, 2.0)).norm() < 1e-14);
        let (_, d) = poly_products(2, 2).unwrap();
        assert!((d - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn taylor_coeffs_frozen_rows() {
        let (c, d) = taylor_coeffs(3, 2);
        assert_eq!(c, vec![4, 24, 60]);
        assert_eq!(d, vec![16, 48, 84]);
        let (c, d) = taylor_coeffs(2, 3);
        assert_eq!(c, vec![1, 8, 24, 40]);
        assert_eq!(d, vec![9, 24, 40, 56]);
    }

    #[test]
    fn taylor_partial_sums_match_rational_function() {
        // sum c_k x^{kN} must converge to ((N+1)x^N + (N-1))^2 / (1-x^N)^2.
        for n in [2u32, 3, 5] {
            let x = 0.45f64;
            let xn = x.powi(n as i32);
            let target = ((n as f64 + 1.0) * xn + (n as f64 - 1.0)).powi(2) / (1.0 - xn).powi(2);
            let kmax = 160;
            let (c, d) = taylor_coeffs(n, kmax);
            let mut acc = 0.0;
            let mut p = 1.0;
            for ck in &c {
                acc += *ck as f64 * p;
                p *= xn;
            }
            assert!((acc - target).abs() < 1e-10, "n={n}: {acc} vs {target}");
            let target_d =
                ((n as f64 - 1.0) * xn + (n as f64 + 1.0)).powi(2) / (1.0 - xn).powi(2);
            let mut acc_d = 0.0;
            let mut p = 1.0;
            for dk in &d {
                acc_d += *dk as f64 * p;
                p *= xn;
            }
            assert!((acc_d - target_d).abs() < 1e-10);
        }
    }

    #[test]
    fn f_bracket_approaches_its_limit_linearly() {
        for n in [2u32, 3, 6, 10] {
            let lim = f_limit_at_one(n);
            let d2 = (f_bracket(n, 1.0 - 1e-2).unwrap() - lim).abs();
            let d3 = (f_bracket(n, 1.0 - 1e-3).unwrap() - lim).abs();
            let d4 = (f_bracket(n, 1.0 - 1e-4).unwrap() - lim).abs();
            let r23 = d2 / d3;
            let r34 = d3 / d4;
            assert!((r23 - 10.0).abs() < 3.0, "n={n}: ratio {r23}");
            assert!((r34 - 10.0).abs() < 3.0, "n={n}: ratio {r34}");
        }
        assert!((f_limit_at_one(2) + 0.75).abs() < 1e-15);
    }

    #[test]
    fn f_bracket_rejects_out_of_domain() {
        assert!(f_bracket(3, 1.0).is_err());
        assert!(f_bracket(3, 0.0).is_err());
        assert!(f_bracket(3, 1.5).is_err());
    }

    #[test]
    fn i_and_ii_values_are_bit_identical() {
        for n in 2..=64u32 {
            assert_eq!(i_value(n).to_bits(), ii_value(n).to_bits(), "n={n}");
        }
        assert_eq!(i_value(2), 2.0 * PI);
        assert_eq!(i_value(3), 8.0 * PI);
        assert_eq!(i_value(4), 20.0 * PI);
        assert_eq!(i_value(6), 70.0 * PI);
        assert_eq!(ii_value(5), 40.0 * PI);
    }

    #[test]
    fn correlation_coefficient_is_exactly_zero() {
        for n in 2..=64u32 {
            for m in [-3i64, -1, 1, 2, 3, 7] {
                assert_eq!(correlation_coefficient(n, m), 0.0);
                assert_eq!(
                    correlation_coefficient_pi_multiple(n, m),
                    Rational64::from_integer(0)
                );
            }
        }
    }

    #[test]
    fn partial_coefficient_frozen_values() {
        assert_eq!(partial_coefficient_pi_multiple(2, 2), Rational64::from_integer(8));
        assert_eq!(partial_coefficient_pi_multiple(4, 2), Rational64::from_integer(80));
        assert_eq!(partial_coefficient_pi_multiple(3, 1), Rational64::from_integer(2));
        assert_eq!(partial_coefficient(2, 2), 8.0 * PI);
        assert_eq!(partial_coefficient(4, 2), 80.0 * PI);
    }

    #[test]
    fn gamma_closed_jump_is_two_pi_n() {
        for n in 2..=12u32 {
            let (left, right) = gamma_closed_limits_at_one(n);
            assert!((left - right - 2.0 * PI * n as f64).abs() < 1e-12);
            // One-sided closed values continue the two branches.
            let below = gamma_closed(n, 1.0 - 1e-9).unwrap();
            let above = gamma_closed(n, 1.0 + 1e-9).unwrap();
            assert!((below - left).abs() < 1e-6);
            assert!((above - right).abs() < 1e-6);
        }
        assert!(matches!(gamma_closed(3, 1.0), Err(Error::JumpPoint)));
    }

    #[test]
    fn gamma_closed_limits_at_zero_and_infinity() {
        for n in [2u32, 5] {
            let g0 = gamma_closed(n, 1e-8).unwrap();
            assert!((g0 - PI * n as f64).abs() < 1e-6);
            let ginf = gamma_closed(n, 1e4).unwrap();
            assert!(ginf.abs() < 1e-6);
        }
    }
}
