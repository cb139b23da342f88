//! Multistart solution of the symmetric extremal equations.
//!
//! Each start runs a damped Newton iteration on the stationarity condition of
//! the overlap magnitude in `z = r e^{i theta}`, switching to `1/z` beyond the
//! unit circle. Converged points get `Theta` and `N` by elimination, are
//! checked against the three extremal residuals, gauge-fixed and classified
//! by the reduced Hessian.
//! The global answer is the smallest distance among interior minima and the
//! two edge candidates `r = 0`, `r -> infinity`.

use std::f64::consts::TAU;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::qstate::{FVector, WeightedFVector};
use crate::symmetric::{
    self, boundary_distances, distance_sq, hessian_at, phase_symmetry, phases_real,
    ratio_polynomial, residual_norm, residual_scale, scaled_residuals, BoundaryReport,
    DistancePair, HessianParts, Spectrum, SymParams, SymmetricError,
};

pub const DEFAULT_STARTS: usize = 64;

/// Two interior extrema closer than this in `r` and in every supported
/// phase `Theta + p theta` are merged.
pub const DEDUP_TOL: f64 = 1e-6;

/// Newton steps in `ln x` rather than `x` beyond this chart radius.
const POLAR_MIN: f64 = 0.05;

/// `|kappa - 1|` below this marks a flat direction; see [`flatness`].
pub const FLATNESS_TOL: f64 = 1e-8;

/// `|sin(Theta + p theta)|` below this on the support counts as real.
pub const PHASE_TOL: f64 = 1e-6;

/// Default multistart size for a given qubit count.
pub fn default_starts(q: usize) -> usize {
    if q <= 8 {
        DEFAULT_STARTS
    } else {
        2 * DEFAULT_STARTS
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    pub max_iters: usize,
    /// Gradient-ascent steps on the overlap before Newton takes over. Newton
    /// alone converges to whichever stationary point is nearest, and the
    /// global optimum's basin can be small; the multistart runs half its
    /// starts with this and half without, so saddles are still found.
    pub ascent_steps: usize,
    /// Largest Newton step allowed in the local chart coordinate.
    pub max_step: f64,
    /// Residual acceptance. Newton stops relative to `sum_p |f̃_p|`; the final
    /// extremal residuals relative to [`crate::symmetric::residual_scale`].
    pub residual_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: 200,
            ascent_steps: 200,
            max_step: 1.0,
            residual_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Start {
    pub ratio: f64,
    pub phase: f64,
    pub global_phase: f64,
}

impl Start {
    pub fn new(ratio: f64, phase: f64, global_phase: f64) -> Self {
        Self {
            ratio,
            phase,
            global_phase,
        }
    }

    /// Start number `index` of the stream keyed by `seed`: a uniform point on
    /// the Bloch sphere (`r = tan(alpha/2)`, `cos alpha` uniform) and a uniform
    /// global phase. The global phase is eliminated by the iteration and only
    /// kept for reporting.
    pub fn random(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        // In (-1, 1], so r stays finite.
        let cos_alpha: f64 = -rng.random_range(-1.0..1.0);
        Self {
            ratio: ((1.0 - cos_alpha) / (1.0 + cos_alpha)).sqrt(),
            phase: rng.random_range(0.0..TAU),
            global_phase: rng.random_range(0.0..TAU),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ExtremumKind {
    Minimum,
    DegenerateMinimum,
    Saddle,
    Maximum,
}

impl ExtremumKind {
    pub fn is_minimum(self) -> bool {
        matches!(self, Self::Minimum | Self::DegenerateMinimum)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremumReport {
    pub params: SymParams,
    pub residual_norm: f64,
    pub distances: DistancePair,
    pub hessian: HessianParts,
    pub spectrum: Spectrum,
    pub kind: ExtremumKind,
    /// Eigenvector of the smallest-magnitude eigenvalue, for degenerate minima.
    pub null_direction: Option<[f64; 4]>,
    /// Every supported `Theta + p theta` is a multiple of pi.
    pub real_phases: bool,
    pub starts_converged: usize,
}

impl ExtremumReport {
    pub fn is_real(&self) -> bool {
        self.real_phases
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FailureReason {
    MaxIterations,
    SingularJacobian,
    Stalled,
    /// `r` ran towards 0 or infinity.
    LeftDomain,
    NonPositiveOverlap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Error)]
#[error("no convergence ({reason:?}), last residual {residual_norm:e}")]
pub struct NoConvergence {
    pub reason: FailureReason,
    pub last: Start,
    pub residual_norm: f64,
}

/// Minimum-norm least-squares step. Targets whose phases enter only through
/// one combination (a single Dicke term, say) have a rank-deficient
/// Jacobian on a whole circle of solutions, so a plain solve would fail.
fn solve_linear(jac: [[f64; 2]; 2], rhs: [f64; 2]) -> Option<[f64; 2]> {
    let m = Matrix2::new(jac[0][0], jac[0][1], jac[1][0], jac[1][1]);
    let svd = m.svd(true, true);
    let top = svd.singular_values.max();
    if !(top > 0.0) || !top.is_finite() {
        return None;
    }
    let x = svd.solve(&Vector2::new(rhs[0], rhs[1]), top * 1e-12).ok()?;
    if x.iter().all(|v| v.is_finite()) {
        Some([x[0], x[1]])
    } else {
        None
    }
}

/// `P(z)`, `P'(z)`, `P''(z)` for real coefficients.
fn horner(coeffs: &[f64], z: Complex64) -> [Complex64; 3] {
    let zero = Complex64::new(0.0, 0.0);
    coeffs.iter().rev().fold([zero; 3], |[p, d1, d2], &c| {
        [p * z + c, d1 * z + p, d2 * z + 2.0 * d1]
    })
}

/// Stationarity of `|P(z)|^2 / (1 + |z|^2)^q` in one chart, with
/// `P(z) = sum_p f̃_p z^p` and `z = r e^{i theta}`. The global phase drops
/// out of the overlap magnitude and is recovered afterwards as `-arg P(z)`.
///
/// Returns `F = P'(z)(1 + |z|^2) - q conj(z) P(z)` and its real Jacobian in
/// `(Re z, Im z)`.
fn chart_system(coeffs: &[f64], z: Complex64) -> (Complex64, [[f64; 2]; 2]) {
    let q = (coeffs.len() - 1) as f64;
    let [p, d1, d2] = horner(coeffs, z);
    let s = 1.0 + z.norm_sqr();
    let zc = z.conj();
    let f = d1 * s - q * zc * p;
    // Wirtinger derivatives.
    let f_z = d2 * s + (1.0 - q) * zc * d1;
    let f_zc = d1 * z - q * p;
    let dx = f_z + f_zc;
    let dy = Complex64::i() * (f_z - f_zc);
    (f, [[dx.re, dy.re], [dx.im, dy.im]])
}

/// Where a Newton run currently lives: near `r = 0` in `z`, or near
/// `r = infinity` in `w = 1/z`, where the bit flip `p -> q - p` turns the
/// problem into the same one with reversed coefficients. Both poles are then
/// ordinary points of a chart rather than asymptotes.
struct Charts {
    forward: Vec<f64>,
    reversed: Vec<f64>,
    scale: f64,
}

impl Charts {
    fn new(wf: &WeightedFVector) -> Self {
        let forward = wf.values().to_vec();
        let reversed = forward.iter().rev().copied().collect();
        let scale = forward
            .iter()
            .map(|c| c.abs())
            .sum::<f64>()
            .max(f64::MIN_POSITIVE);
        Self {
            forward,
            reversed,
            scale,
        }
    }

    fn local(&self, z: Complex64) -> (&[f64], Complex64, bool) {
        if z.norm_sqr() > 1.0 {
            (&self.reversed, z.inv(), true)
        } else {
            (&self.forward, z, false)
        }
    }
}

/// `ln|P|^2 - q ln(1 + |x|^2)` in a chart; equal in both charts at the same
/// product state.
fn log_overlap(coeffs: &[f64], x: Complex64) -> f64 {
    let q = (coeffs.len() - 1) as f64;
    horner(coeffs, x)[0].norm_sqr().ln() - q * (1.0 + x.norm_sqr()).ln()
}

/// Backtracking gradient ascent of [`log_overlap`].
fn ascend_overlap(charts: &Charts, mut z: Complex64, steps: usize) -> Complex64 {
    let mut t: f64 = 0.1;
    for _ in 0..steps {
        let (coeffs, x, flipped) = charts.local(z);
        let (f, _) = chart_system(coeffs, x);
        let p = horner(coeffs, x)[0];
        // (d/dx + i d/dy) of the log overlap.
        let grad = 2.0 * (f / (p * (1.0 + x.norm_sqr()))).conj();
        let g2 = grad.norm_sqr();
        if !g2.is_finite() || g2 < 1e-12 {
            break;
        }
        let here = log_overlap(coeffs, x);
        t = (2.0 * t).min(0.5 / g2.sqrt());
        let next = loop {
            let trial = x + t * grad;
            if log_overlap(coeffs, trial) >= here + 1e-4 * t * g2 {
                break Some(trial);
            }
            t *= 0.5;
            if t < 1e-12 {
                break None;
            }
        };
        match next {
            Some(x) => z = if flipped { x.inv() } else { x },
            None => break,
        }
    }
    z
}

/// Product states closer than this to either pole are left to the edge
/// candidates.
const EDGE_RATIO: f64 = 1e-9;

/// Damped Newton from `start`; returns `(r, theta, Theta)`.
fn newton(
    wf: &WeightedFVector,
    start: Start,
    opts: &SolverOptions,
) -> Result<(f64, f64, f64), NoConvergence> {
    let charts = Charts::new(wf);
    let tol = opts.residual_tol * charts.scale;
    let fail = |reason, z: Complex64, rn: f64| NoConvergence {
        reason,
        last: Start::new(z.norm(), z.arg(), start.global_phase),
        residual_norm: rn,
    };
    let mut z = ascend_overlap(
        &charts,
        Complex64::from_polar(start.ratio, start.phase),
        opts.ascent_steps,
    );
    let mut polishing = 0;
    let mut converged = false;
    for _ in 0..opts.max_iters {
        let (coeffs, x, flipped) = charts.local(z);
        let (f, jac) = chart_system(coeffs, x);
        let norm = f.norm();
        if norm <= tol {
            converged = true;
            polishing += 1;
            if polishing > 3 || norm <= 1e-15 * charts.scale {
                break;
            }
        }
        // Polar steps away from the chart origin: circular valleys, such as
        // the one of a nearly single-term target, become straight in
        // `u = ln x`, where `dx = x du`.
        let polar = x.norm() > POLAR_MIN;
        let jac = if polar {
            [
                [
                    jac[0][0] * x.re + jac[0][1] * x.im,
                    jac[0][1] * x.re - jac[0][0] * x.im,
                ],
                [
                    jac[1][0] * x.re + jac[1][1] * x.im,
                    jac[1][1] * x.re - jac[1][0] * x.im,
                ],
            ]
        } else {
            jac
        };
        let Some(mut step) = solve_linear(jac, [-f.re, -f.im]) else {
            if converged {
                break;
            }
            return Err(fail(FailureReason::SingularJacobian, z, norm));
        };
        let biggest = step[0].hypot(step[1]);
        if biggest > opts.max_step {
            step.iter_mut().for_each(|s| *s *= opts.max_step / biggest);
        }
        let mut lambda = 1.0;
        let accepted = loop {
            let delta = Complex64::new(lambda * step[0], lambda * step[1]);
            let trial = if polar { x * delta.exp() } else { x + delta };
            let tnorm = chart_system(coeffs, trial).0.norm();
            if tnorm.is_finite() && tnorm < norm * (1.0 - 1e-4 * lambda) {
                break Some(trial);
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                break None;
            }
        };
        match accepted {
            Some(trial) => z = if flipped { trial.inv() } else { trial },
            None if converged => break,
            None => return Err(fail(FailureReason::Stalled, z, norm)),
        }
        if !z.is_finite() {
            return Err(fail(FailureReason::LeftDomain, z, f64::NAN));
        }
    }
    let (coeffs, x, _) = charts.local(z);
    let norm = chart_system(coeffs, x).0.norm();
    if !converged && norm > tol {
        return Err(fail(FailureReason::MaxIterations, z, norm));
    }
    if x.norm() < EDGE_RATIO {
        return Err(fail(FailureReason::LeftDomain, z, norm));
    }
    let p = horner(&charts.forward, z)[0];
    Ok((z.norm(), z.arg(), -p.arg()))
}

/// Relocates a root of the ratio residual that Newton only approached
/// linearly because it has multiplicity above one.
///
/// With real phases the ratio residual is `P(r)/(1+r^2)` for a polynomial
/// `P`. A root of multiplicity `k` is a simple root of `P^{(k-1)}`, which
/// double precision can pin down far more tightly than the root of `P`.
fn polish_multiple_root(wf: &WeightedFVector, r: f64, phase: f64, global_phase: f64) -> f64 {
    if !phases_real(wf, phase, global_phase, PHASE_TOL) {
        return r;
    }
    let cos_coeffs: Vec<f64> = wf
        .values()
        .iter()
        .enumerate()
        .map(|(p, &w)| 2.0 * w * (global_phase + p as f64 * phase).cos())
        .collect();
    let poly = ratio_polynomial(&cos_coeffs);
    let deg = poly.len() - 1;
    let scale: f64 = poly.iter().map(|a| a.abs()).sum::<f64>() * r.max(1.0).powi(deg as i32);
    if scale == 0.0 {
        return r;
    }
    let rel = |k: usize, x: f64| {
        symmetric::poly_derivative_at(&poly, k, x).abs() * x.powi(k as i32) / scale
    };
    if rel(1, r) > 1e-4 {
        return r;
    }
    let Some(order) = (2..=deg).find(|&k| rel(k, r) > 1e-3) else {
        return r;
    };
    let mut x = r;
    for _ in 0..60 {
        let num = symmetric::poly_derivative_at(&poly, order - 1, x);
        let den = symmetric::poly_derivative_at(&poly, order, x);
        if den == 0.0 {
            return r;
        }
        let dx = num / den;
        x -= dx;
        if !(x > 0.0) || (x - r).abs() > 1e-2 * r.max(1e-3) {
            return r;
        }
        if dx.abs() <= 1e-16 * x {
            break;
        }
    }
    let before = residual_norm(&scaled_residuals(wf, r, phase, global_phase));
    let after = residual_norm(&scaled_residuals(wf, x, phase, global_phase));
    if after <= before {
        x
    } else {
        r
    }
}

/// Flat direction of the distance that comes from a symmetry of the target
/// rather than from the extremum itself. A single Dicke term `p` depends on
/// the phases only through `Theta + p*theta`, so `(theta, Theta) ~ (1, -p)`
/// is always flat.
fn gauge_direction(wf: &WeightedFVector) -> Option<[f64; 4]> {
    let (p, 0) = phase_symmetry(wf)? else {
        return None;
    };
    let p = p as f64;
    let n = (1.0 + p * p).sqrt();
    Some([0.0, 0.0, 1.0 / n, -p / n])
}

/// Coordinate-free flatness of the overlap at a stationary point:
/// `kappa = |L_xx| (1 + |x|^2)^2 / q` for `L = ln|P|^2 - q ln(1 + |x|^2)` in
/// the local chart. Since `L_{x conj(x)} = -q / (1 + |x|^2)^2`, the chart
/// Hessian of `L` has eigenvalues proportional to `-1 ± kappa`: below 1 the
/// overlap has a strict local maximum, above 1 a saddle, and at 1 it is flat
/// in one direction. The `(N, r, theta, Theta)` eigenvalues themselves span
/// many orders of magnitude away from `r = 1`, so comparing them against each
/// other cannot tell a flat direction from a badly scaled one.
fn flatness(charts: &Charts, r: f64, phase: f64) -> f64 {
    let (coeffs, x, _) = charts.local(Complex64::from_polar(r, phase));
    let q = (coeffs.len() - 1) as f64;
    let [p, d1, d2] = horner(coeffs, x);
    let s = 1.0 + x.norm_sqr();
    let l_xx = (d2 * p - d1 * d1) / (p * p) + q * x.conj().powi(2) / (s * s);
    l_xx.norm() * s * s / q
}

/// `flat` marks a direction of zero curvature other than the gauge one; it
/// is attributed to the eigenvalue of smallest magnitude.
fn classify(
    spectrum: &Spectrum,
    gauge: Option<[f64; 4]>,
    flat: bool,
) -> (ExtremumKind, Option<[f64; 4]>) {
    let scale = spectrum.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    // Eigensolver noise only.
    let noise = 64.0 * f64::EPSILON * scale;
    let is_gauge = |k: usize| {
        gauge.is_some_and(|g| {
            let dot: f64 = (0..4).map(|i| g[i] * spectrum.vectors[k][i]).sum();
            dot.abs() > 0.999
        })
    };
    let candidates: Vec<usize> = (0..4).filter(|&k| !is_gauge(k)).collect();
    let zero = flat
        .then(|| {
            candidates.iter().copied().min_by(|&i, &j| {
                spectrum.values[i]
                    .abs()
                    .total_cmp(&spectrum.values[j].abs())
            })
        })
        .flatten();
    let negatives = candidates
        .iter()
        .filter(|&&k| Some(k) != zero && spectrum.values[k] < -noise)
        .count();
    match (negatives, zero) {
        (0, None) => (ExtremumKind::Minimum, None),
        (0, Some(k)) => (ExtremumKind::DegenerateMinimum, Some(spectrum.vectors[k])),
        // The N direction always curves upwards; the other three define a maximum.
        (3, _) => (ExtremumKind::Maximum, None),
        _ => (ExtremumKind::Saddle, None),
    }
}

/// Runs one damped Newton solve and classifies the stationary point.
pub fn solve_from_start(
    wf: &WeightedFVector,
    start: Start,
    opts: &SolverOptions,
) -> Result<ExtremumReport, NoConvergence> {
    let (r, phase, global_phase) = newton(wf, start, opts)?;
    let r = polish_multiple_root(wf, r, phase, global_phase);
    let nonpositive = |rn| NoConvergence {
        reason: FailureReason::NonPositiveOverlap,
        last: Start::new(r, phase, global_phase),
        residual_norm: rn,
    };
    let params =
        SymParams::canonical(wf, r, phase, global_phase).map_err(|_| nonpositive(f64::NAN))?;
    let res = scaled_residuals(wf, params.ratio, params.phase, params.global_phase);
    let rn = residual_norm(&res);
    if rn > opts.residual_tol * residual_scale(wf, params.ratio) {
        return Err(NoConvergence {
            reason: FailureReason::Stalled,
            last: start,
            residual_norm: rn,
        });
    }
    let hessian = match hessian_at(wf, &params) {
        Ok(h) => h,
        Err(SymmetricError::NonPositiveOverlap(_)) => return Err(nonpositive(rn)),
        Err(_) => {
            return Err(NoConvergence {
                reason: FailureReason::Stalled,
                last: start,
                residual_norm: rn,
            })
        }
    };
    let spectrum = hessian.spectrum();
    let gauge = gauge_direction(wf);
    // A single Dicke term is flat along its gauge direction and nowhere else.
    let flat = gauge.is_none()
        && (flatness(&Charts::new(wf), params.ratio, params.phase) - 1.0).abs() <= FLATNESS_TOL;
    let (kind, null_direction) = classify(&spectrum, gauge, flat);
    Ok(ExtremumReport {
        params,
        residual_norm: rn,
        distances: distance_sq(wf, &params),
        hessian,
        spectrum,
        kind,
        null_direction,
        real_phases: phases_real(wf, params.phase, params.global_phase, PHASE_TOL),
        starts_converged: 1,
    })
}

fn phase_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Compares ratios and the phase of every supported term, which is
/// insensitive to the target's phase symmetry.
fn same_extremum(wf: &WeightedFVector, a: &SymParams, b: &SymParams) -> bool {
    let term = |s: &SymParams, p: usize| s.global_phase + p as f64 * s.phase;
    (a.ratio - b.ratio).abs() / a.ratio.max(1.0) < DEDUP_TOL
        && wf
            .values()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .all(|(p, _)| phase_gap(term(a, p), term(b, p)) < DEDUP_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundarySide {
    R0,
    RInf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type")]
pub enum Winner {
    Interior(ExtremumReport),
    Boundary {
        side: BoundarySide,
        distances: DistancePair,
    },
}

impl Winner {
    pub fn distances(&self) -> DistancePair {
        match self {
            Winner::Interior(rep) => rep.distances,
            Winner::Boundary { distances, .. } => *distances,
        }
    }

    /// Optimal ratio; 0 or infinity for the edges.
    pub fn ratio(&self) -> f64 {
        match self {
            Winner::Interior(rep) => rep.params.ratio,
            Winner::Boundary {
                side: BoundarySide::R0,
                ..
            } => 0.0,
            Winner::Boundary {
                side: BoundarySide::RInf,
                ..
            } => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CensusClass {
    RealInterior,
    RealInteriorZeroEig,
    ComplexInterior,
    BoundaryR0,
    BoundaryRInf,
}

impl CensusClass {
    pub const ALL: [CensusClass; 5] = [
        CensusClass::RealInterior,
        CensusClass::RealInteriorZeroEig,
        CensusClass::ComplexInterior,
        CensusClass::BoundaryR0,
        CensusClass::BoundaryRInf,
    ];
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct FailureCounts {
    pub max_iterations: usize,
    pub singular_jacobian: usize,
    pub stalled: usize,
    pub left_domain: usize,
    pub non_positive_overlap: usize,
}

impl FailureCounts {
    fn record(&mut self, reason: FailureReason) {
        match reason {
            FailureReason::MaxIterations => self.max_iterations += 1,
            FailureReason::SingularJacobian => self.singular_jacobian += 1,
            FailureReason::Stalled => self.stalled += 1,
            FailureReason::LeftDomain => self.left_domain += 1,
            FailureReason::NonPositiveOverlap => self.non_positive_overlap += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.max_iterations
            + self.singular_jacobian
            + self.stalled
            + self.left_domain
            + self.non_positive_overlap
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveSummary {
    pub f: FVector,
    pub winner: Winner,
    pub interior: Vec<ExtremumReport>,
    pub boundary: BoundaryReport,
    pub census_class: CensusClass,
    pub n_starts: usize,
    pub seed: u64,
    pub failures: FailureCounts,
}

impl SolveSummary {
    /// True when every start failed and an edge candidate won by default.
    pub fn no_interior_solution(&self) -> bool {
        !self.interior.iter().any(|e| e.kind.is_minimum())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("n_starts must be at least 1")]
    NoStarts,
    #[error("no interior minimum found and both edge coefficients vanish")]
    TotalFailure { failures: FailureCounts },
}

pub fn multistart_solve(
    f: &FVector,
    n_starts: usize,
    seed: u64,
) -> Result<SolveSummary, SolveError> {
    multistart_solve_with(f, n_starts, seed, &SolverOptions::default())
}

pub fn multistart_solve_with(
    f: &FVector,
    n_starts: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<SolveSummary, SolveError> {
    if n_starts == 0 {
        return Err(SolveError::NoStarts);
    }
    let wf = f.weighted();
    let outcomes: Vec<Result<ExtremumReport, NoConvergence>> = (0..n_starts as u64)
        .into_par_iter()
        .map(|i| {
            let plain = SolverOptions {
                ascent_steps: 0,
                ..*opts
            };
            solve_from_start(
                &wf,
                Start::random(seed, i),
                if i % 2 == 0 { opts } else { &plain },
            )
        })
        .collect();

    let mut failures = FailureCounts::default();
    let mut interior: Vec<ExtremumReport> = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(rep) => match interior
                .iter_mut()
                .find(|e| same_extremum(&wf, &e.params, &rep.params))
            {
                Some(existing) => {
                    existing.starts_converged += 1;
                    if rep.residual_norm < existing.residual_norm {
                        let count = existing.starts_converged;
                        *existing = rep;
                        existing.starts_converged = count;
                    }
                }
                None => interior.push(rep),
            },
            Err(nc) => failures.record(nc.reason),
        }
    }

    let boundary = boundary_distances(f);
    let best_interior = interior
        .iter()
        .filter(|e| e.kind.is_minimum())
        .min_by(|a, b| a.distances.d2_unnorm.total_cmp(&b.distances.d2_unnorm));
    let mut edge: Option<(BoundarySide, DistancePair)> = None;
    for (side, cand) in [
        (BoundarySide::R0, boundary.at_r0),
        (BoundarySide::RInf, boundary.at_rinf),
    ] {
        if cand.valid && edge.is_none_or(|(_, d)| cand.distances.d2_unnorm < d.d2_unnorm) {
            edge = Some((side, cand.distances));
        }
    }

    // Ties go to the edge, whose value is exact.
    let winner = match (best_interior, edge) {
        (Some(rep), Some((side, d))) if d.d2_unnorm <= rep.distances.d2_unnorm + 1e-12 => {
            Winner::Boundary { side, distances: d }
        }
        (Some(rep), _) => Winner::Interior(rep.clone()),
        (None, Some((side, d))) => Winner::Boundary { side, distances: d },
        (None, None) => return Err(SolveError::TotalFailure { failures }),
    };
    let census_class = match &winner {
        Winner::Boundary {
            side: BoundarySide::R0,
            ..
        } => CensusClass::BoundaryR0,
        Winner::Boundary {
            side: BoundarySide::RInf,
            ..
        } => CensusClass::BoundaryRInf,
        Winner::Interior(rep) if !rep.is_real() => CensusClass::ComplexInterior,
        Winner::Interior(rep) if rep.kind == ExtremumKind::DegenerateMinimum => {
            CensusClass::RealInteriorZeroEig
        }
        Winner::Interior(_) => CensusClass::RealInterior,
    };
    Ok(SolveSummary {
        f: f.clone(),
        winner,
        interior,
        boundary,
        census_class,
        n_starts,
        seed,
        failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DickeRow {
    pub p: usize,
    pub d2_norm: f64,
    pub d2_unnorm: f64,
    pub r_opt: f64,
}

/// Entanglement of every Dicke state `|D_p>`, `p = 0..=q`.
pub fn dicke_sweep(q: usize) -> Result<Vec<DickeRow>, SolveError> {
    (0..=q)
        .map(|p| {
            let f = FVector::dicke(q, p).expect("p <= q");
            let s = multistart_solve(&f, default_starts(q), 0)?;
            let d = s.winner.distances();
            Ok(DickeRow {
                p,
                d2_norm: d.d2_norm,
                d2_unnorm: d.d2_unnorm,
                r_opt: s.winner.ratio(),
            })
        })
        .collect()
}
