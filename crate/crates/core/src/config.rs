//! Vortex configurations: positions in the plane with exact rational
//! charges, the induced meromorphic field sum, and the pairwise logarithmic
//! interaction energy with its gradient.
//!
//! The distinguished family is the symmetric polygon: charge -(N-1)m/2 at
//! the origin (a half-integer when (N-1)m is odd) and charge m at each of
//! the N unit roots. That family is forceless: the energy gradient vanishes
//! at every vortex.

use crate::algebra::roots_of_unity;
use crate::error::{Error, Result};
use crate::numerics::pairwise_sum;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A point vortex: planar position and exact rational charge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vortex {
    pub position: Complex64,
    pub charge: Rational64,
}

impl Vortex {
    pub fn charge_f64(&self) -> f64 {
        self.charge.to_f64().expect("charge fits in f64")
    }
}

/// An ordered collection of pairwise-distinct vortices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfiguration", into = "RawConfiguration")]
pub struct VortexConfiguration {
    vortices: Vec<Vortex>,
}

#[derive(Serialize, Deserialize, Clone)]
struct RawVortex {
    re: f64,
    im: f64,
    charge_num: i64,
    charge_den: i64,
}

#[derive(Serialize, Deserialize, Clone)]
struct RawConfiguration {
    vortices: Vec<RawVortex>,
}

impl TryFrom<RawConfiguration> for VortexConfiguration {
    type Error = Error;

    fn try_from(raw: RawConfiguration) -> Result<Self> {
        let mut vortices = Vec::with_capacity(raw.vortices.len());
        for v in raw.vortices {
            if v.charge_den == 0 {
                return Err(Error::DegenerateConfiguration("zero charge denominator".into()));
            }
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::DegenerateConfiguration("non-finite position".into()));
            }
            vortices.push(Vortex {
                position: Complex64::new(v.re, v.im),
                charge: Rational64::new(v.charge_num, v.charge_den),
            });
        }
        VortexConfiguration::new(vortices)
    }
}

impl From<VortexConfiguration> for RawConfiguration {
    fn from(cfg: VortexConfiguration) -> Self {
        RawConfiguration {
            vortices: cfg
                .vortices
                .iter()
                .map(|v| RawVortex {
                    re: v.position.re,
                    im: v.position.im,
                    charge_num: *v.charge.numer(),
                    charge_den: *v.charge.denom(),
                })
                .collect(),
        }
    }
}

impl VortexConfiguration {
    /// Build a configuration, rejecting empty sets and coincident positions.
    pub fn new(vortices: Vec<Vortex>) -> Result<Self> {
        if vortices.is_empty() {
            return Err(Error::DegenerateConfiguration("no vortices".into()));
        }
        for i in 0..vortices.len() {
            for j in (i + 1)..vortices.len() {
                if (vortices[i].position - vortices[j].position).norm() == 0.0 {
                    return Err(Error::DegenerateConfiguration(format!(
                        "vortices {i} and {j} share position {}",
                        vortices[i].position
                    )));
                }
            }
        }
        Ok(VortexConfiguration { vortices })
    }

    pub fn vortices(&self) -> &[Vortex] {
        &self.vortices
    }

    pub fn len(&self) -> usize {
        self.vortices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vortices.is_empty()
    }

    pub fn total_charge(&self) -> Rational64 {
        self.vortices.iter().map(|v| v.charge).sum()
    }

    /// Smallest distance between distinct vortices.
    pub fn min_pairwise_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.vortices.len() {
            for j in (i + 1)..self.vortices.len() {
                best = best.min((self.vortices[i].position - self.vortices[j].position).norm());
            }
        }
        best
    }

    /// The same charges at positions scaled by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda != 0.0) {
            return Err(Error::Domain(format!("scale factor must be finite nonzero, got {lambda}")));
        }
        VortexConfiguration::new(
            self.vortices
                .iter()
                .map(|v| Vortex { position: lambda * v.position, charge: v.charge })
                .collect(),
        )
    }
}

/// The symmetric polygon family, parametrised by order N >= 2 and ring
/// charge m.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetricPolygonConfig {
    pub n: u32,
    pub m: i64,
}

impl SymmetricPolygonConfig {
    pub fn new(n: u32, m: i64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidOrder(n as i64));
        }
        Ok(SymmetricPolygonConfig { n, m })
    }

    /// Charge at the origin: -(N-1)m/2, kept exact (possibly half-integer).
    pub fn center_charge(&self) -> Rational64 {
        Rational64::new(-((self.n as i64 - 1) * self.m), 2)
    }

    /// The induced configuration: origin vortex first, then the unit roots
    /// a_1 = 1, a_2, ..., a_N in counterclockwise order.
    pub fn configuration(&self) -> VortexConfiguration {
        let mut vortices = vec![Vortex {
            position: Complex64::new(0.0, 0.0),
            charge: self.center_charge(),
        }];
        let ring = Rational64::from_integer(self.m);
        for a in roots_of_unity(self.n) {
            vortices.push(Vortex { position: a, charge: ring });
        }
        VortexConfiguration { vortices }
    }
}

/// Convenience constructor for the symmetric polygon configuration.
pub fn make_symmetric_config(n: u32, m: i64) -> Result<VortexConfiguration> {
    Ok(SymmetricPolygonConfig::new(n, m)?.configuration())
}

/// The meromorphic field sum at x: sum_j n_j / (x - a_j).
pub fn field_sum(x: Complex64, cfg: &VortexConfiguration) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for v in cfg.vortices() {
        let d = x - v.position;
        if d.norm() == 0.0 {
            return Err(Error::Pole(x));
        }
        acc += v.charge_f64() * d.inv();
    }
    Ok(acc)
}

/// Interaction energy and its position gradient.
#[derive(Debug, Clone)]
pub struct EnergyGradient {
    /// H = -pi * sum over ordered pairs i != j of n_i n_j ln|a_i - a_j|.
    pub energy: f64,
    /// gradient[i] = dH/da_i as a complex number (d/dx + i d/dy);
    /// aggregating both ordered pairs containing i gives
    /// -2 pi n_i sum_{j != i} n_j (a_i - a_j)/|a_i - a_j|^2.
    pub gradient: Vec<Complex64>,
}

impl EnergyGradient {
    /// Largest gradient magnitude over the vortices.
    pub fn max_gradient_norm(&self) -> f64 {
        self.gradient.iter().map(|g| g.norm()).fold(0.0, f64::max)
    }
}

/// Pairwise logarithmic energy of the configuration with its gradient.
pub fn pairwise_energy(cfg: &VortexConfiguration) -> Result<EnergyGradient> {
    let vs = cfg.vortices();
    let mut log_terms = Vec::with_capacity(vs.len() * vs.len());
    let mut gradient = vec![Complex64::new(0.0, 0.0); vs.len()];
    for (i, vi) in vs.iter().enumerate() {
        let ni = vi.charge_f64();
        for (j, vj) in vs.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = vi.position - vj.position;
            let dist2 = d.norm_sqr();
            if dist2 == 0.0 {
                return Err(Error::DegenerateConfiguration(format!(
                    "vortices {i} and {j} coincide"
                )));
            }
            let nj = vj.charge_f64();
            log_terms.push(-PI * ni * nj * 0.5 * dist2.ln());
            gradient[i] += -2.0 * PI * ni * nj * d / dist2;
        }
    }
    Ok(EnergyGradient { energy: pairwise_sum(&log_terms), gradient })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn symmetric_config_charges_and_layout() {
        let cfg = make_symmetric_config(2, 1).unwrap();
        let vs = cfg.vortices();
        assert_eq!(vs.len(), 3);
        assert_eq!(vs[0].charge, Rational64::new(-1, 2));
        assert_eq!(vs[1].charge, Rational64::from_integer(1));
        assert!((vs[1].position - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((vs[2].position - Complex64::new(-1.0, 0.0)).norm() < 1e-12);

        // (N=3, m=2): center charge -2, total 3*2 - 2 = 4.
        let cfg = make_symmetric_config(3, 2).unwrap();
        assert_eq!(cfg.vortices()[0].charge, Rational64::from_integer(-2));
        assert_eq!(cfg.total_charge(), Rational64::from_integer(4));

        // Half-integer center charge for even N, odd m.
        let cfg = make_symmetric_config(4, 1).unwrap();
        assert_eq!(cfg.vortices()[0].charge, Rational64::new(-3, 2));

        assert!(matches!(make_symmetric_config(1, 1), Err(Error::InvalidOrder(1))));
    }

    #[test]
    fn field_sum_frozen_value() {
        // N = 2, m = 1 at x = 2: -1/4 + 1/1 + 1/3 = 13/12.
        let cfg = make_symmetric_config(2, 1).unwrap();
        let v = field_sum(Complex64::new(2.0, 0.0), &cfg).unwrap();
        assert!((v - Complex64::new(13.0 / 12.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn field_sum_errors_at_vortex_positions() {
        let cfg = make_symmetric_config(3, 1).unwrap();
        assert!(matches!(
            field_sum(Complex64::new(0.0, 0.0), &cfg),
            Err(Error::Pole(_))
        ));
        assert!(matches!(
            field_sum(Complex64::new(1.0, 0.0), &cfg),
            Err(Error::Pole(_))
        ));
    }

    #[test]
    fn field_sum_decomposes_into_center_plus_pole_sum() {
        // For the symmetric family the field is n0/x + m * pole_sum.
        let cfg = make_symmetric_config(5, 2).unwrap();
        let x = Complex64::new(0.3, -0.7);
        let f = field_sum(x, &cfg).unwrap();
        let n0 = -(5.0 - 1.0) * 2.0 / 2.0;
        let expected = n0 / x + 2.0 * crate::algebra::pole_sum_closed(5, x).unwrap();
        assert!((f - expected).norm() < 1e-12);
    }

    #[test]
    fn pairwise_energy_frozen_value() {
        // N = 2, m = 1: only the two ring vortices at distance 2 contribute.
        let cfg = make_symmetric_config(2, 1).unwrap();
        let e = pairwise_energy(&cfg).unwrap();
        assert!((e.energy - (-2.0 * PI * std::f64::consts::LN_2)).abs() < 1e-12);
    }

    #[test]
    fn symmetric_polygons_are_forceless() {
        for n in 2..=16u32 {
            for m in [1i64, 2, 3] {
                let cfg = make_symmetric_config(n, m).unwrap();
                let e = pairwise_energy(&cfg).unwrap();
                assert!(
                    e.max_gradient_norm() <= 1e-10,
                    "n={n} m={m}: grad {}",
                    e.max_gradient_norm()
                );
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences_on_asymmetric_config() {
        // Finite-difference oracle on a configuration with no symmetry.
        let cfg = VortexConfiguration::new(vec![
            Vortex { position: Complex64::new(0.2, 0.1), charge: Rational64::new(3, 2) },
            Vortex { position: Complex64::new(-0.9, 0.4), charge: Rational64::from_integer(-1) },
            Vortex { position: Complex64::new(0.5, -1.1), charge: Rational64::from_integer(2) },
        ])
        .unwrap();
        let base = pairwise_energy(&cfg).unwrap();
        let h = 1e-6;
        for i in 0..cfg.len() {
            for (dx, dy) in [(h, 0.0), (0.0, h)] {
                let mut vs = cfg.vortices().to_vec();
                vs[i].position += Complex64::new(dx, dy);
                let plus = pairwise_energy(&VortexConfiguration::new(vs.clone()).unwrap())
                    .unwrap()
                    .energy;
                vs[i].position -= Complex64::new(2.0 * dx, 2.0 * dy);
                let minus = pairwise_energy(&VortexConfiguration::new(vs).unwrap())
                    .unwrap()
                    .energy;
                let fd = (plus - minus) / (2.0 * h);
                let analytic = if dx > 0.0 { base.gradient[i].re } else { base.gradient[i].im };
                assert!(
                    (fd - analytic).abs() <= 1e-5 * analytic.abs().max(1.0),
                    "i={i} fd={fd} analytic={analytic}"
                );
            }
        }
    }

    #[test]
    fn energy_shifts_by_log_under_scaling() {
        // H(lambda a) = H(a) - pi ln(lambda) sum_{i != j} n_i n_j.
        let cfg = make_symmetric_config(3, 2).unwrap();
        let lambda = 2.5;
        let scaled = cfg.scaled(lambda).unwrap();
        let e0 = pairwise_energy(&cfg).unwrap().energy;
        let e1 = pairwise_energy(&scaled).unwrap().energy;
        let mut cross = 0.0;
        for (i, vi) in cfg.vortices().iter().enumerate() {
            for (j, vj) in cfg.vortices().iter().enumerate() {
                if i != j {
                    cross += vi.charge_f64() * vj.charge_f64();
                }
            }
        }
        assert!((e1 - (e0 - PI * lambda.ln() * cross)).abs() < 1e-10);
    }

    #[test]
    fn serde_round_trip_preserves_configuration() {
        let cfg = make_symmetric_config(4, 3).unwrap();
        let json = serde_json::to_string(&cfg).unwrap();
        assert!(json.contains("charge_num"));
        let back: VortexConfiguration = serde_json::from_str(&json).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn deserialization_rejects_coincident_vortices() {
        let json = r#"{"vortices":[
            {"re":1.0,"im":0.0,"charge_num":1,"charge_den":1},
            {"re":1.0,"im":0.0,"charge_num":-1,"charge_den":2}
        ]}"#;
        assert!(serde_json::from_str::<VortexConfiguration>(json).is_err());
    }

    proptest! {
        #[test]
        fn field_sum_scales_inversely(re in -2.0f64..2.0, im in -2.0f64..2.0,
                                      lambda in 0.25f64..4.0) {
            let cfg = make_symmetric_config(3, 1).unwrap();
            let x = Complex64::new(re, im);
            prop_assume!(cfg.vortices().iter().all(|v| (x - v.position).norm() > 1e-3));
            let f = field_sum(x, &cfg).unwrap();
            let scaled = cfg.scaled(lambda).unwrap();
            let fs = field_sum(lambda * x, &scaled).unwrap();
            prop_assert!((fs * lambda - f).norm() <= 1e-9 * f.norm().max(1.0));
        }

        #[test]
        fn field_sum_commutes_with_conjugation(re in -2.0f64..2.0, im in 0.1f64..2.0) {
            let cfg = make_symmetric_config(4, 2).unwrap();
            let x = Complex64::new(re, im);
            prop_assume!(cfg.vortices().iter().all(|v| (x - v.position).norm() > 1e-3));
            let f = field_sum(x, &cfg).unwrap();
            let fc = field_sum(x.conj(), &cfg).unwrap();
            prop_assert!((fc - f.conj()).norm() <= 1e-10 * f.norm().max(1.0));
        }
    }
}
