//! Principal-value quadrature of the correlation density over the plane.
//!
//! The plane is swept in origin-centred polar rings.  Rings that cross no
//! exclusion ball are averaged by the quadrant-grouped trapezoid rule and
//! integrated radially with adaptive Gauss-Legendre panels; rings that cross
//! a ball keep only the complementary arcs, meshed with geometric grading
//! toward the arc endpoints where the integrand is steepest.  The exclusion
//! schedule is realized incrementally: the widest radius is integrated once
//! and each smaller radius adds the exact vortex-local annuli uncovered by
//! shrinking the balls.  The schedule column is then extrapolated to zero
//! exclusion radius with the convergence order fitted from the table, and
//! the plane beyond `outer_radius` is restored from the leading far-field
//! moment.

use crate::algebra::beta;
use crate::config::{make_symmetric_config, VortexConfiguration};
use crate::error::{Error, Result};
use crate::integrand::{
    circle_average, counterterm, far_field_constant, raw_integrand, vertex_residual_at_offset,
};
use crate::numerics::{
    extrapolate_geometric, extrapolate_polynomial, gl16_nodes, graded_breakpoints,
    integrate_on_mesh_par, integrate_refining_par, pairwise_sum, PanelResult,
};
use crate::residue::gamma_radial_tail;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Mutex;

const ORIGIN: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Radius of the vertex patches used by the regularized sweep.
const PATCH_RADIUS: f64 = 0.2;

/// Controls for the planar principal-value sweeps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Exclusion-ball radii, strictly decreasing; the integral is computed
    /// per entry and extrapolated to radius zero.
    pub epsilon_schedule: Vec<f64>,
    /// Radius beyond which the integral is restored analytically.
    pub outer_radius: f64,
    /// Baseline trapezoid count per ring; a power of two, at least 64.
    pub angular_samples: usize,
    /// Absolute tolerance of the adaptive radial integrations.
    pub radial_tol: f64,
    /// Whether the regularized route subtracts the counterterm.
    pub use_counterterm: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            epsilon_schedule: vec![0.1, 0.05, 0.025],
            outer_radius: 50.0,
            angular_samples: 512,
            radial_tol: 1e-8,
            use_counterterm: false,
        }
    }
}

impl QuadratureSpec {
    /// Check the spec against a configuration: the schedule must be strictly
    /// decreasing with at least three entries, the widest ball must not reach
    /// half-way to a neighbouring vortex, and the outer radius must leave the
    /// whole configuration deep inside the swept disk.
    pub fn validate(&self, cfg: &VortexConfiguration) -> Result<()> {
        if self.epsilon_schedule.len() < 3 {
            return Err(Error::InvalidSpec(format!(
                "epsilon schedule needs at least three entries, got {}",
                self.epsilon_schedule.len()
            )));
        }
        for &e in &self.epsilon_schedule {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::InvalidSpec(format!("exclusion radius {e} must be positive")));
            }
        }
        for w in self.epsilon_schedule.windows(2) {
            if w[1] >= w[0] {
                return Err(Error::InvalidSpec(format!(
                    "epsilon schedule must decrease strictly, got {} after {}",
                    w[1], w[0]
                )));
            }
        }
        let d_min = cfg.min_pairwise_distance();
        let eps0 = self.epsilon_schedule[0];
        if 2.0 * eps0 >= d_min {
            return Err(Error::InvalidSpec(format!(
                "exclusion radius {eps0} reaches a neighbouring ball: minimum vortex separation is {d_min}"
            )));
        }
        if !self.angular_samples.is_power_of_two() || self.angular_samples < 64 {
            return Err(Error::InvalidSpec(format!(
                "angular_samples must be a power of two of at least 64, got {}",
                self.angular_samples
            )));
        }
        if !(self.radial_tol.is_finite() && self.radial_tol > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "radial tolerance must be positive, got {}",
                self.radial_tol
            )));
        }
        let r_max = cfg.vortices().iter().map(|v| v.position.norm()).fold(0.0, f64::max);
        if !self.outer_radius.is_finite()
            || self.outer_radius < 10.0
            || self.outer_radius < 2.0 * (r_max + 1.0)
        {
            return Err(Error::InvalidSpec(format!(
                "outer radius {} too small for a configuration of extent {r_max}",
                self.outer_radius
            )));
        }
        Ok(())
    }
}

/// Outcome of one extrapolated principal-value integral.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    /// Number of integrand evaluations across the whole sweep.
    pub evaluations: u64,
    /// (exclusion radius, integral) rows feeding the extrapolation.
    pub extrapolation_table: Vec<(f64, f64)>,
    /// Convergence order fitted from the table, when it exposes one.
    pub fitted_order: Option<f64>,
}

fn poison(slot: &Mutex<Option<Error>>, e: Error) {
    let mut guard = slot.lock().expect("error slot lock");
    if guard.is_none() {
        *guard = Some(e);
    }
}

fn drain(slot: &Mutex<Option<Error>>) -> Result<()> {
    match slot.lock().expect("error slot lock").take() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Exact quartic charge factor m⁴ as a float.
fn exact_m4(m: i64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidSpec("charge multiplier m must be nonzero".into()));
    }
    if m.abs() > (1 << 13) {
        return Err(Error::InvalidSpec(format!(
            "charge multiplier {m} too large for exact quartic scaling"
        )));
    }
    let m2 = (m * m) as f64;
    Ok(m2 * m2)
}

/// Merge the radial bands [|c|−eps, |c|+eps] met by the exclusion balls.
fn merged_bands(balls: &[(Complex64, f64)], outer: f64) -> Vec<(f64, f64)> {
    let mut bands: Vec<(f64, f64)> = balls
        .iter()
        .map(|&(c, eps)| {
            let r = c.norm();
            ((r - eps).max(0.0), (r + eps).min(outer))
        })
        .collect();
    bands.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite band edges"));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for band in bands {
        if let Some(last) = merged.last_mut() {
            if band.0 <= last.1 {
                last.1 = last.1.max(band.1);
                continue;
            }
        }
        merged.push(band);
    }
    merged
}

/// Radial intervals of [0, outer] not covered by any band.
fn complement_legs(bands: &[(f64, f64)], outer: f64) -> Vec<(f64, f64)> {
    let mut legs = Vec::new();
    let mut cursor = 0.0;
    for &(lo, hi) in bands {
        if lo > cursor {
            legs.push((cursor, lo));
        }
        cursor = cursor.max(hi);
    }
    if cursor < outer {
        legs.push((cursor, outer));
    }
    legs
}

/// Split long outer legs at fixed interior radii so each adaptive pass sees
/// a comparable dynamic range.
fn split_leg(lo: f64, hi: f64) -> Vec<(f64, f64)> {
    const CUTS: [f64; 4] = [2.0, 5.0, 15.0, 35.0];
    let mut pts = vec![lo];
    for c in CUTS {
        if c > lo + 1e-9 && c < hi - 1e-9 {
            pts.push(c);
        }
    }
    pts.push(hi);
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Arcs of the ring of radius `rho` that survive all exclusion balls, as
/// (start, end) angle pairs covering a subset of [0, 2π).  An empty list
/// means the whole ring is excluded.
fn kept_arcs(rho: f64, balls: &[(Complex64, f64)]) -> Vec<(f64, f64)> {
    let tau = 2.0 * PI;
    let mut excluded: Vec<(f64, f64)> = Vec::new();
    for &(c, eps) in balls {
        let rv = c.norm();
        if (rho - rv).abs() >= eps {
            continue;
        }
        if rv < 1e-12 {
            // Ball centred on the origin swallows the whole ring.
            return Vec::new();
        }
        let arg = (rho * rho + rv * rv - eps * eps) / (2.0 * rho * rv);
        if arg <= -1.0 {
            return Vec::new();
        }
        if arg >= 1.0 {
            continue;
        }
        let w = arg.acos();
        let phi = c.arg();
        let mut start = phi - w;
        let mut end = phi + w;
        let shift = start.div_euclid(tau) * tau;
        start -= shift;
        end -= shift;
        if end <= tau {
            excluded.push((start, end));
        } else {
            excluded.push((start, tau));
            excluded.push((0.0, end - tau));
        }
    }
    if excluded.is_empty() {
        return vec![(0.0, tau)];
    }
    excluded.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite arc angles"));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for seg in excluded {
        if let Some(last) = merged.last_mut() {
            if seg.0 <= last.1 {
                last.1 = last.1.max(seg.1);
                continue;
            }
        }
        merged.push(seg);
    }
    let mut kept = Vec::new();
    let mut cursor = 0.0;
    for &(s, e) in &merged {
        if s > cursor {
            kept.push((cursor, s));
        }
        cursor = cursor.max(e);
    }
    if cursor < tau {
        kept.push((cursor, tau));
    }
    kept
}

/// Insert the midpoint of every cell of `mesh`.
fn refine_mesh(mesh: &[f64]) -> Vec<f64> {
    let mut fine = Vec::with_capacity(mesh.len() * 2 - 1);
    for w in mesh.windows(2) {
        fine.push(w[0]);
        fine.push(0.5 * (w[0] + w[1]));
    }
    fine.push(*mesh.last().expect("nonempty mesh"));
    fine
}

/// Trapezoid count resolving every vortex from a ring of radius `rho`: the
/// closest pole at radial distance δ needs ~50·rho/δ samples for its angular
/// spectrum to decay below rounding.
fn angular_count(base: usize, rho: f64, vortex_radii: &[f64]) -> usize {
    let mut delta = f64::INFINITY;
    for &rv in vortex_radii {
        delta = delta.min((rho - rv).abs());
    }
    let needed = 50.0 * rho / delta.max(1e-3);
    let mut m = base.max(64);
    while (m as f64) < needed && m < (1 << 14) {
        m *= 2;
    }
    m
}

/// Integral of `field` over the full rings rho in [a, b], none of which may
/// cross an exclusion ball.
fn ring_sweep<F>(
    field: &F,
    a: f64,
    b: f64,
    vortex_radii: &[f64],
    spec: &QuadratureSpec,
    slot: &Mutex<Option<Error>>,
) -> PanelResult
where
    F: Fn(Complex64) -> Result<f64> + Sync + ?Sized,
{
    integrate_refining_par(
        &|rho: f64| {
            if rho == 0.0 {
                return (0.0, 0);
            }
            let m = angular_count(spec.angular_samples, rho, vortex_radii);
            match circle_average(field, ORIGIN, rho, m) {
                Ok(mean) => (2.0 * PI * rho * mean, m as u64),
                Err(e) => {
                    poison(slot, e);
                    (f64::NAN, m as u64)
                }
            }
        },
        a,
        b,
        spec.radial_tol,
        8,
        9,
    )
}

/// θ-integral of `field` over the kept arcs of one ring, on meshes graded
/// toward the arc endpoints down to cells of ~`finest` radians.
fn arc_integral<F>(field: &F, rho: f64, arcs: &[(f64, f64)], finest: f64) -> Result<(f64, u64)>
where
    F: Fn(Complex64) -> Result<f64> + ?Sized,
{
    let mut cells = Vec::new();
    let mut evals = 0u64;
    for &(a, b) in arcs {
        let span = b - a;
        if span <= 0.0 {
            continue;
        }
        let levels = ((span / finest).log2().ceil() as i64).clamp(3, 12) as u32;
        let mesh = graded_breakpoints(a, b, levels);
        for w in mesh.windows(2) {
            let mut cell = Vec::with_capacity(16);
            for (theta, wt) in gl16_nodes(w[0], w[1]) {
                let v = field(Complex64::from_polar(rho, theta))?;
                if !v.is_finite() {
                    return Err(Error::Evaluation(format!(
                        "non-finite sample {v} on the ring of radius {rho}"
                    )));
                }
                cell.push(wt * v);
                evals += 1;
            }
            cells.push(pairwise_sum(&cell));
        }
    }
    Ok((pairwise_sum(&cells), evals))
}

/// Integral of `field` over the partial rings rho in [lo, hi] with the balls
/// cut out.  The radial mesh is graded toward the tangency radii at the leg
/// ends, refined once for the error estimate.
fn band_sweep<F>(
    field: &F,
    lo: f64,
    hi: f64,
    balls: &[(Complex64, f64)],
    slot: &Mutex<Option<Error>>,
) -> Result<(f64, f64, u64)>
where
    F: Fn(Complex64) -> Result<f64> + Sync + ?Sized,
{
    let min_eps = balls.iter().map(|b| b.1).fold(f64::INFINITY, f64::min);
    let mut cuts = vec![lo];
    for &(c, eps) in balls {
        let rv = c.norm();
        for t in [rv - eps, rv, rv + eps] {
            if t > lo + 1e-9 && t < hi - 1e-9 {
                cuts.push(t);
            }
        }
    }
    cuts.push(hi);
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite cuts"));
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let g = |rho: f64| -> (f64, u64) {
        let arcs = kept_arcs(rho, balls);
        if arcs.is_empty() {
            return (0.0, 0);
        }
        match arc_integral(field, rho, &arcs, 0.15 * min_eps / rho) {
            Ok((v, e)) => (rho * v, e),
            Err(e) => {
                poison(slot, e);
                (f64::NAN, 0)
            }
        }
    };
    let mut parts = Vec::new();
    let mut err = 0.0;
    let mut evals = 0u64;
    for w in cuts.windows(2) {
        let mesh = graded_breakpoints(w[0], w[1], 7);
        let (v1, e1) = integrate_on_mesh_par(&g, &mesh);
        let (v2, e2) = integrate_on_mesh_par(&g, &refine_mesh(&mesh));
        drain(slot)?;
        parts.push(v2);
        err += (v2 - v1).abs();
        evals += e1 + e2;
    }
    Ok((pairwise_sum(&parts), err, evals))
}

/// Integral of `field` over the annulus lo ≤ |x − center| ≤ hi in polar
/// coordinates around `center`, where the singular harmonics average out.
fn local_annulus<F>(
    field: &F,
    center: Complex64,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
    slot: &Mutex<Option<Error>>,
) -> PanelResult
where
    F: Fn(Complex64) -> Result<f64> + Sync + ?Sized,
{
    let m = spec.angular_samples;
    integrate_refining_par(
        &|s: f64| match circle_average(field, center, s, m) {
            Ok(mean) => (2.0 * PI * s * mean, m as u64),
            Err(e) => {
                poison(slot, e);
                (f64::NAN, m as u64)
            }
        },
        lo,
        hi,
        spec.radial_tol,
        4,
        9,
    )
}

/// Assemble the extrapolated result from schedule rows plus accumulated
/// quadrature error, rejecting tables that change direction above the noise.
fn extrapolated_result(
    rows: Vec<(f64, f64)>,
    quad_err: f64,
    evals: u64,
) -> Result<QuadratureResult> {
    let noise = quad_err.max(1e-12);
    for w in rows.windows(3) {
        let d1 = w[1].1 - w[0].1;
        let d2 = w[2].1 - w[1].1;
        if d1 * d2 < 0.0 && d2.abs() > 10.0 * noise {
            return Err(Error::NonConvergence { table: rows });
        }
    }
    let ex = extrapolate_geometric(&rows, noise)?;
    Ok(QuadratureResult {
        value: ex.value,
        error_estimate: ex.error_estimate + quad_err,
        evaluations: evals,
        extrapolation_table: rows,
        fitted_order: ex.fitted_order,
    })
}

/// Principal-value sweep of `field` with balls of scheduled radius around
/// every center: one base pass at the widest radius, then exact local
/// annulus increments per smaller radius.
fn pv_over_region<F>(
    field: &F,
    centers: &[Complex64],
    spec: &QuadratureSpec,
    tail_correction: f64,
    tail_error: f64,
) -> Result<QuadratureResult>
where
    F: Fn(Complex64) -> Result<f64> + Sync + ?Sized,
{
    let eps0 = spec.epsilon_schedule[0];
    let radii: Vec<f64> = centers.iter().map(|c| c.norm()).collect();
    let balls: Vec<(Complex64, f64)> = centers.iter().map(|&c| (c, eps0)).collect();
    let slot = Mutex::new(None);
    let mut evals = 0u64;
    let mut quad_err = tail_error;

    let bands = merged_bands(&balls, spec.outer_radius);
    let mut parts = vec![tail_correction];
    for (lo, hi) in complement_legs(&bands, spec.outer_radius) {
        for (a, b) in split_leg(lo, hi) {
            let rr = ring_sweep(field, a, b, &radii, spec, &slot);
            drain(&slot)?;
            parts.push(rr.value);
            quad_err += rr.error_estimate;
            evals += rr.evaluations;
        }
    }
    for &(lo, hi) in &bands {
        let (v, e, n) = band_sweep(field, lo, hi, &balls, &slot)?;
        parts.push(v);
        quad_err += e;
        evals += n;
    }

    let mut cumulative = pairwise_sum(&parts);
    let mut rows = vec![(eps0, cumulative)];
    for w in spec.epsilon_schedule.windows(2) {
        let mut increments = Vec::with_capacity(centers.len());
        for &c in centers {
            let rr = local_annulus(field, c, w[1], w[0], spec, &slot);
            drain(&slot)?;
            increments.push(rr.value);
            quad_err += rr.error_estimate;
            evals += rr.evaluations;
        }
        cumulative += pairwise_sum(&increments);
        rows.push((w[1], cumulative));
    }
    extrapolated_result(rows, quad_err, evals)
}

/// Principal-value integral of the raw density with exclusion balls around
/// every vortex, extrapolated over the schedule and corrected for the
/// far-field tail beyond `outer_radius`.
pub fn pv_integral(cfg: &VortexConfiguration, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    spec.validate(cfg)?;
    let centers: Vec<Complex64> = cfg.vortices().iter().map(|v| v.position).collect();
    let c4 = far_field_constant(cfg);
    let r = spec.outer_radius;
    let tail = PI * c4 / (r * r);
    let tail_err = 32.0 * PI * c4.abs() / (r * r * r * r);
    pv_over_region(&|x| raw_integrand(x, cfg), &centers, spec, tail, tail_err)
}

/// The same principal-value sweep applied to the counterterm alone; its
/// per-ball exclusion integral tends to zero, so the result is a null test
/// of the engine.  The tail uses the closed counterterm profile.
pub fn pv_counterterm_integral(n: u32, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    let cfg = make_symmetric_config(n, 1)?;
    spec.validate(&cfg)?;
    let centers: Vec<Complex64> = cfg.vortices().iter().map(|v| v.position).collect();
    let b = beta(n).to_f64().expect("beta fits in f64");
    let tail = b * PI * n as f64 * gamma_radial_tail(spec.outer_radius);
    pv_over_region(&|x| counterterm(x, n), &centers, spec, tail, 1e-12)
}

/// Integral of raw − m⁴·counterterm over the plane minus an origin ball.
/// Vertex neighbourhoods are covered by polar patches of the analytically
/// cancelled residual, so no exclusion is needed there; the origin ball
/// follows the schedule and is extrapolated away.
pub fn regularized_integral(n: u32, m: i64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    if !spec.use_counterterm {
        return Err(Error::InvalidSpec(
            "the regularized route needs use_counterterm enabled".into(),
        ));
    }
    let cfg = make_symmetric_config(n, 1)?;
    spec.validate(&cfg)?;
    let m4 = exact_m4(m)?;
    let eps0 = spec.epsilon_schedule[0];
    let slot = Mutex::new(None);
    let mut evals = 0u64;
    let r = spec.outer_radius;
    let c4 = far_field_constant(&cfg);
    let b = beta(n).to_f64().expect("beta fits in f64");
    let tail =
        PI * c4 / (r * r) - b * PI * n as f64 * gamma_radial_tail(r);
    let mut quad_err = 32.0 * PI * c4.abs() / (r * r * r * r);

    let field = |x: Complex64| Ok(raw_integrand(x, &cfg)? - counterterm(x, n)?);
    let radii = [0.0, 1.0];
    let mut parts = vec![tail];

    // Full rings between the origin ball and the vertex band, and beyond it.
    for (lo, hi) in [(eps0, 1.0 - PATCH_RADIUS), (1.0 + PATCH_RADIUS, r)] {
        for (a, c) in split_leg(lo, hi) {
            let rr = ring_sweep(&field, a, c, &radii, spec, &slot);
            drain(&slot)?;
            parts.push(rr.value);
            quad_err += rr.error_estimate;
            evals += rr.evaluations;
        }
    }

    // The vertex band with the patch disks cut out.
    let patch_balls: Vec<(Complex64, f64)> = cfg
        .vortices()
        .iter()
        .filter(|v| v.position.norm() > 0.5)
        .map(|v| (v.position, PATCH_RADIUS))
        .collect();
    let (v, e, n_band) = band_sweep(
        &field,
        1.0 - PATCH_RADIUS,
        1.0 + PATCH_RADIUS,
        &patch_balls,
        &slot,
    )?;
    parts.push(v);
    quad_err += e;
    evals += n_band;

    // Vertex patches: the analytically cancelled residual over each disk.
    for k in 1..=n as usize {
        let m_ang = spec.angular_samples;
        let rr = integrate_refining_par(
            &|s: f64| {
                match circle_average(|d| vertex_residual_at_offset(d, n, 1, k), ORIGIN, s, m_ang) {
                    Ok(mean) => (2.0 * PI * s * mean, m_ang as u64),
                    Err(e) => {
                        poison(&slot, e);
                        (f64::NAN, m_ang as u64)
                    }
                }
            },
            0.0,
            PATCH_RADIUS,
            spec.radial_tol,
            8,
            9,
        );
        drain(&slot)?;
        parts.push(rr.value);
        quad_err += rr.error_estimate;
        evals += rr.evaluations;
    }

    // Origin-ball schedule and extrapolation.
    let mut cumulative = pairwise_sum(&parts);
    let mut rows = vec![(eps0, cumulative)];
    for w in spec.epsilon_schedule.windows(2) {
        let rr = local_annulus(&field, ORIGIN, w[1], w[0], spec, &slot);
        drain(&slot)?;
        cumulative += rr.value;
        quad_err += rr.error_estimate;
        evals += rr.evaluations;
        rows.push((w[1], cumulative));
    }
    let base = extrapolated_result(rows, quad_err, evals)?;
    Ok(QuadratureResult {
        value: m4 * base.value,
        error_estimate: m4 * base.error_estimate,
        evaluations: base.evaluations,
        extrapolation_table: base
            .extrapolation_table
            .iter()
            .map(|&(eps, v)| (eps, m4 * v))
            .collect(),
        fitted_order: base.fitted_order,
    })
}

/// Radial mesh for [0, 1−eps], graded geometrically into the edge where the
/// ring means grow like (1−rho)⁻².
fn inner_band_mesh(eps: f64) -> Vec<f64> {
    let mut pts = vec![0.0, 0.2, 0.4, 0.5];
    let mut w = 0.25;
    while w > 1.5 * eps {
        pts.push(1.0 - w);
        w *= 0.5;
    }
    pts.push(1.0 - eps);
    pts
}

/// Radial mesh for [1/(1−eps), outer], graded away from the inner edge.
fn outer_band_mesh(eps: f64, outer: f64) -> Vec<f64> {
    let edge = 1.0 / (1.0 - eps);
    let mut pts = vec![edge];
    let mut w = 2.0 * (edge - 1.0);
    while 1.0 + w < 2.0 {
        pts.push(1.0 + w);
        w *= 2.0;
    }
    pts.push(2.0);
    for t in [3.0, 5.0, 8.0, 13.0, 21.0, 34.0] {
        if t < outer - 1e-9 {
            pts.push(t);
        }
    }
    pts.push(outer);
    pts
}

/// First and second terms computed separately over the annulus-regularized
/// region {rho ≤ 1−eps} ∪ {rho ≥ 1/(1−eps)}: the raw density alone and the
/// counterterm alone, each extrapolated over the schedule.  Unlike the
/// per-ball exclusion, this region shape gives the counterterm its full
/// second-term value.
pub fn band_split_integrals(
    n: u32,
    m: i64,
    spec: &QuadratureSpec,
) -> Result<(QuadratureResult, QuadratureResult)> {
    let cfg = make_symmetric_config(n, 1)?;
    spec.validate(&cfg)?;
    let m4 = exact_m4(m)?;
    let radii = [0.0, 1.0];
    let slot = Mutex::new(None);
    let r = spec.outer_radius;
    let b = beta(n).to_f64().expect("beta fits in f64");
    let c4 = far_field_constant(&cfg);
    let tails = [PI * c4 / (r * r), b * PI * n as f64 * gamma_radial_tail(r)];
    let raw = |x: Complex64| raw_integrand(x, &cfg);
    let ct = |x: Complex64| counterterm(x, n);
    let fields: [&(dyn Fn(Complex64) -> Result<f64> + Sync); 2] = [&raw, &ct];

    let mut rows = [Vec::new(), Vec::new()];
    let mut errs = [32.0 * PI * c4.abs() / (r * r * r * r), 1e-12];
    let mut evals = 0u64;
    for &eps in &spec.epsilon_schedule {
        let meshes = [inner_band_mesh(eps), outer_band_mesh(eps, r)];
        for (i, field) in fields.iter().enumerate() {
            let g = |rho: f64| -> (f64, u64) {
                let ms = angular_count(spec.angular_samples, rho, &radii);
                match circle_average(field, ORIGIN, rho, ms) {
                    Ok(mean) => (2.0 * PI * rho * mean, ms as u64),
                    Err(e) => {
                        poison(&slot, e);
                        (f64::NAN, ms as u64)
                    }
                }
            };
            let mut total = tails[i];
            for mesh in &meshes {
                let (v1, e1) = integrate_on_mesh_par(&g, mesh);
                let (v2, e2) = integrate_on_mesh_par(&g, &refine_mesh(mesh));
                drain(&slot)?;
                total += v2;
                errs[i] += (v2 - v1).abs();
                evals += e1 + e2;
            }
            rows[i].push((eps, total));
        }
    }

    let mut out = Vec::with_capacity(2);
    for (row, err) in rows.iter().zip(errs) {
        let ex = extrapolate_polynomial(row)?;
        out.push(QuadratureResult {
            value: m4 * ex.value,
            error_estimate: m4 * (ex.error_estimate + err),
            evaluations: evals,
            extrapolation_table: row.iter().map(|&(eps, v)| (eps, m4 * v)).collect(),
            fitted_order: None,
        });
    }
    let second = out.pop().expect("second part");
    let first = out.pop().expect("first part");
    Ok((first, second))
}

/// The correlation coefficient by direct quadrature: a quarter of the
/// principal-value integral.  The sweep always runs at unit charge and the
/// quartic charge factor is applied as an exact scalar, so results for any m
/// are exact multiples of the m = 1 sweep.
pub fn a0_numeric(n: u32, m: i64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    if !(2..=8).contains(&n) {
        return Err(Error::InvalidSpec(format!(
            "vortex count {n} outside the supported range 2..=8"
        )));
    }
    let scale = exact_m4(m)? / 4.0;
    let cfg = make_symmetric_config(n, 1)?;
    let base = pv_integral(&cfg, spec)?;
    Ok(QuadratureResult {
        value: scale * base.value,
        error_estimate: scale * base.error_estimate,
        evaluations: base.evaluations,
        extrapolation_table: base
            .extrapolation_table
            .iter()
            .map(|&(eps, v)| (eps, scale * v))
            .collect(),
        fitted_order: base.fitted_order,
    })
}
