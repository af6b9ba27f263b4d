//! Shared numerical kernels: deterministic pairwise summation, panel-refined
//! Gauss-Legendre integration, geometric sequence extrapolation and a
//! four-point complex derivative stencil.
//!
//! Every routine here is deterministic for a fixed input; parallel callers
//! collect results in index order and reduce with `pairwise_sum`, so values
//! are bit-identical regardless of the number of worker threads.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

/// A numeric value with an accompanying absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueWithError {
    pub value: f64,
    pub error_estimate: f64,
}

/// 16-point Gauss-Legendre abscissae on [0, 1] folded from the symmetric
/// nodes on [-1, 1] (positive half; the rule is applied symmetrically).
const GL16_X: [f64; 8] = [
    0.095_012_509_837_637_44,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_7,
    0.755_404_408_355_003,
    0.865_631_202_387_831_7,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];
const GL16_W: [f64; 8] = [
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_5,
    0.149_595_988_816_576_7,
    0.124_628_971_255_533_9,
    0.095_158_511_682_492_78,
    0.062_253_523_938_647_89,
    0.027_152_459_411_754_09,
];

/// Sum by recursive halving. The reduction tree depends only on the slice
/// length, never on thread scheduling.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// The 16 (node, weight) pairs of the 16-point rule mapped onto [a, b],
/// emitted in ascending node order.
pub(crate) fn gl16_nodes(a: f64, b: f64) -> [(f64, f64); 16] {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [(0.0, 0.0); 16];
    for i in 0..8 {
        // Descending offsets first so the array is ascending in x.
        let x = GL16_X[7 - i];
        let w = GL16_W[7 - i];
        out[i] = (mid - half * x, w * half);
        out[15 - i] = (mid + half * x, w * half);
    }
    out
}

/// Result of a panel-refined integration.
#[derive(Debug, Clone, Copy)]
pub struct PanelResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: u64,
}

fn panel_pass<F>(f: &F, a: f64, b: f64, panels: usize) -> (f64, u64)
where
    F: Fn(f64) -> f64 + ?Sized,
{
    let width = (b - a) / panels as f64;
    let mut vals = Vec::with_capacity(panels * 16);
    for p in 0..panels {
        let lo = a + width * p as f64;
        let hi = a + width * (p + 1) as f64;
        for (x, w) in gl16_nodes(lo, hi) {
            vals.push(w * f(x));
        }
    }
    (pairwise_sum(&vals), (panels * 16) as u64)
}

/// Integrate `f` over [a, b] with 16-point Gauss-Legendre panels, doubling
/// the panel count until two passes agree within `tol` (absolute).
pub fn integrate_refining<F>(f: &F, a: f64, b: f64, tol: f64, min_panels: usize, max_levels: u32) -> PanelResult
where
    F: Fn(f64) -> f64 + ?Sized,
{
    assert!(b >= a, "inverted interval");
    if a == b {
        return PanelResult { value: 0.0, error_estimate: 0.0, evaluations: 0 };
    }
    let mut evals = 0u64;
    let mut prev: Option<f64> = None;
    let mut panels = min_panels.max(1);
    let mut last_delta = f64::INFINITY;
    let mut value = 0.0;
    for _ in 0..=max_levels {
        let (v, e) = panel_pass(f, a, b, panels);
        evals += e;
        value = v;
        if let Some(pv) = prev {
            last_delta = (v - pv).abs();
            if last_delta <= tol {
                return PanelResult { value, error_estimate: last_delta, evaluations: evals };
            }
        }
        prev = Some(v);
        panels *= 2;
    }
    PanelResult { value, error_estimate: last_delta, evaluations: evals }
}

/// Same refinement loop with the per-panel work spread over the rayon pool.
/// Node values are collected in index order and reduced pairwise, so the
/// result does not depend on the pool size.
pub fn integrate_refining_par<F>(f: &F, a: f64, b: f64, tol: f64, min_panels: usize, max_levels: u32) -> PanelResult
where
    F: Fn(f64) -> (f64, u64) + Sync + ?Sized,
{
    assert!(b >= a, "inverted interval");
    if a == b {
        return PanelResult { value: 0.0, error_estimate: 0.0, evaluations: 0 };
    }
    let mut evals = 0u64;
    let mut prev: Option<f64> = None;
    let mut panels = min_panels.max(1);
    let mut last_delta = f64::INFINITY;
    let mut value = 0.0;
    for _ in 0..=max_levels {
        let width = (b - a) / panels as f64;
        let pairs: Vec<(f64, u64)> = (0..panels)
            .into_par_iter()
            .map(|p| {
                let lo = a + width * p as f64;
                let hi = a + width * (p + 1) as f64;
                let mut acc = Vec::with_capacity(16);
                let mut e = 0u64;
                for (x, w) in gl16_nodes(lo, hi) {
                    let (fx, fe) = f(x);
                    acc.push(w * fx);
                    e += fe;
                }
                (pairwise_sum(&acc), e)
            })
            .collect();
        let vals: Vec<f64> = pairs.iter().map(|t| t.0).collect();
        evals += pairs.iter().map(|t| t.1).sum::<u64>();
        let v = pairwise_sum(&vals);
        value = v;
        if let Some(pv) = prev {
            last_delta = (v - pv).abs();
            if last_delta <= tol {
                return PanelResult { value, error_estimate: last_delta, evaluations: evals };
            }
        }
        prev = Some(v);
        panels *= 2;
    }
    PanelResult { value, error_estimate: last_delta, evaluations: evals }
}

/// Breakpoints of a mesh on [a, b] graded geometrically towards both ends
/// (ratio 1/2, `levels` refinements per side). Endpoint neighbourhoods get
/// panels of width ~(b-a)/2^levels; interior panels stay coarse.
pub fn graded_breakpoints(a: f64, b: f64, levels: u32) -> Vec<f64> {
    let len = b - a;
    let mut pts = vec![a];
    for j in (1..=levels).rev() {
        pts.push(a + len * 0.5f64.powi(j as i32 + 1));
    }
    pts.push(a + 0.5 * len);
    for j in 1..=levels {
        pts.push(b - len * 0.5f64.powi(j as i32 + 1));
    }
    pts.push(b);
    pts
}

/// Extrapolation of a geometric refinement table to its limit.
#[derive(Debug, Clone)]
pub struct Extrapolation {
    pub value: f64,
    pub error_estimate: f64,
    /// Observed convergence order p in value(eps) = limit + c * eps^p,
    /// when the table exposes one above the noise floor.
    pub fitted_order: Option<f64>,
}

/// Extrapolate `table` of (eps, value) rows, eps strictly decreasing, to
/// eps -> 0 under the model value(eps) = limit + c * eps^p. The order p is
/// fitted from the last three rows. `noise_floor` is the absolute level
/// below which differences are treated as quadrature noise.
pub fn extrapolate_geometric(table: &[(f64, f64)], noise_floor: f64) -> Result<Extrapolation> {
    if table.is_empty() {
        return Err(Error::Domain("empty extrapolation table".into()));
    }
    if table.len() == 1 {
        return Ok(Extrapolation {
            value: table[0].1,
            error_estimate: noise_floor.max(f64::MIN_POSITIVE),
            fitted_order: None,
        });
    }
    for w in table.windows(2) {
        if w[1].0 >= w[0].0 {
            return Err(Error::Domain("epsilon schedule must be strictly decreasing".into()));
        }
    }
    let k = table.len();
    let (e1, v1) = table[k - 2];
    let (e2, v2) = table[k - 1];
    let d_last = v2 - v1;
    if k == 2 {
        return Ok(Extrapolation {
            value: v2,
            error_estimate: d_last.abs().max(noise_floor),
            fitted_order: None,
        });
    }
    let (e0, v0) = table[k - 3];
    let d_prev = v1 - v0;
    // Noise-dominated tables are already converged.
    if d_last.abs() <= noise_floor && d_prev.abs() <= noise_floor {
        return Ok(Extrapolation { value: v2, error_estimate: noise_floor, fitted_order: None });
    }
    let q = d_last / d_prev;
    if !q.is_finite() || q.abs() >= 0.9 {
        if d_last.abs() <= 4.0 * noise_floor {
            // Differences at the noise level cannot contract further.
            return Ok(Extrapolation {
                value: v2,
                error_estimate: d_last.abs().max(noise_floor),
                fitted_order: None,
            });
        }
        return Err(Error::NonConvergence { table: table.to_vec() });
    }
    // Constant-ratio schedules admit a closed-form order estimate; otherwise
    // fall back to the observed contraction against the last step ratio.
    let r1 = e1 / e0;
    let r2 = e2 / e1;
    let fitted_order = if q > 0.0 {
        let r = if (r1 - r2).abs() < 1e-9 * r2 { r2 } else { (r1 * r2).sqrt() };
        Some(q.ln() / r.ln())
    } else {
        None
    };
    // Geometric continuation: limit = v2 + d_last * q / (1 - q).
    let correction = d_last * q / (1.0 - q);
    let value = v2 + correction;
    let error_estimate = (correction.abs() * 0.5 + 0.1 * d_last.abs()).max(noise_floor);
    Ok(Extrapolation { value, error_estimate, fitted_order })
}

/// Neville polynomial extrapolation of (eps, value) rows to eps -> 0, for
/// tables whose eps-dependence is analytic (value = limit + c1 eps + ...).
/// The error estimate is the last tableau correction.
pub fn extrapolate_polynomial(table: &[(f64, f64)]) -> Result<Extrapolation> {
    if table.len() < 2 {
        return Err(Error::Domain("polynomial extrapolation needs at least two rows".into()));
    }
    for w in table.windows(2) {
        if w[1].0 >= w[0].0 {
            return Err(Error::Domain("epsilon schedule must be strictly decreasing".into()));
        }
    }
    let eps: Vec<f64> = table.iter().map(|r| r.0).collect();
    let mut col: Vec<f64> = table.iter().map(|r| r.1).collect();
    let rows = col.len();
    let mut prev_tip = col[0];
    let mut last_correction = f64::INFINITY;
    for level in 1..rows {
        for i in 0..(rows - level) {
            // Lagrange recursion evaluated at eps = 0.
            col[i] = (eps[i] * col[i + 1] - eps[i + level] * col[i]) / (eps[i] - eps[i + level]);
        }
        last_correction = (col[0] - prev_tip).abs();
        prev_tip = col[0];
    }
    Ok(Extrapolation {
        value: prev_tip,
        error_estimate: last_correction.max(f64::MIN_POSITIVE),
        fitted_order: None,
    })
}

/// One 16-point Gauss-Legendre pass per consecutive pair of mesh points.
pub fn integrate_on_mesh<F>(f: &F, mesh: &[f64]) -> (f64, u64)
where
    F: Fn(f64) -> f64 + ?Sized,
{
    assert!(mesh.len() >= 2, "mesh needs at least two points");
    let mut vals = Vec::with_capacity((mesh.len() - 1) * 16);
    for w in mesh.windows(2) {
        for (x, wt) in gl16_nodes(w[0], w[1]) {
            vals.push(wt * f(x));
        }
    }
    (pairwise_sum(&vals), ((mesh.len() - 1) * 16) as u64)
}

/// Parallel variant of `integrate_on_mesh` for costly integrands returning
/// (value, cost); the reduction order is fixed, so results are identical
/// across thread counts.
pub fn integrate_on_mesh_par<F>(f: &F, mesh: &[f64]) -> (f64, u64)
where
    F: Fn(f64) -> (f64, u64) + Sync + ?Sized,
{
    assert!(mesh.len() >= 2, "mesh needs at least two points");
    let nodes: Vec<(f64, f64)> = mesh
        .windows(2)
        .flat_map(|w| gl16_nodes(w[0], w[1]))
        .collect();
    let evaluated: Vec<(f64, u64)> = nodes
        .par_iter()
        .map(|&(x, wt)| {
            let (v, cost) = f(x);
            (wt * v, cost)
        })
        .collect();
    let values: Vec<f64> = evaluated.iter().map(|e| e.0).collect();
    let cost = evaluated.iter().map(|e| e.1).sum();
    (pairwise_sum(&values), cost)
}

/// Derivative of a holomorphic function by central differences along the
/// real and imaginary axes, averaged so the h^2 terms cancel (error O(h^4)).
pub fn complex_step_derivative<F>(f: F, z: Complex64, h: f64) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    let hr = Complex64::new(h, 0.0);
    let hi = Complex64::new(0.0, h);
    let d_re = (f(z + hr) - f(z - hr)) / (2.0 * hr);
    let d_im = (f(z + hi) - f(z - hi)) / (2.0 * hi);
    0.5 * (d_re + d_im)
}

/// Least-squares slope of ln(y) against ln(x).
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points for a slope");
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let mx = pairwise_sum(&lx) / n;
    let my = pairwise_sum(&ly) / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..xs.len() {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    num / den
}
