//! The distance to a permutation-symmetric product state.
//!
//! The product state is `e^{i Theta} (a_1, e^{i theta} a_2)^{⊗q}` with
//! `a_2 = r a_1` and `a_1 = sqrt(N / (1 + r^2))`. Everything here is a
//! function of the weighted coefficients `f̃_p = sqrt(C(q,p)) f_p`.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix4, SymmetricEigen};
use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::qstate::{FVector, WeightedFVector};

/// Residual norm above which the simplified Hessian entries are refused.
pub const EXTREMUM_GUARD: f64 = 1e-8;

/// Eigenvalues with magnitude below this fraction of the largest one are
/// reported as zero. Only meaningful near `r = 1`: far from it the four
/// coordinates scale so differently that the solver classifies flatness by
/// a coordinate-free test instead.
pub const ZERO_EIGEN_REL: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmetricError {
    #[error("g_R(q,0) = {0} is not positive; shift Theta by pi")]
    NonPositiveOverlap(f64),
    #[error("residual norm {0:e} exceeds the extremum guard")]
    NotAtExtremum(f64),
    #[error("invalid symmetric parameters: {0}")]
    InvalidParams(&'static str),
    #[error("moment order {0} is not supported (only 0, 1, 2)")]
    UnsupportedOrder(u32),
}

/// Parameters `(N, r, theta, Theta)` of the symmetric product state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymParams {
    #[serde(rename = "N")]
    pub norm: f64,
    #[serde(rename = "r")]
    pub ratio: f64,
    #[serde(rename = "theta")]
    pub phase: f64,
    #[serde(rename = "Theta")]
    pub global_phase: f64,
}

impl SymParams {
    pub fn new(
        norm: f64,
        ratio: f64,
        phase: f64,
        global_phase: f64,
    ) -> Result<Self, SymmetricError> {
        if !(norm.is_finite() && norm > 0.0) {
            return Err(SymmetricError::InvalidParams(
                "N must be finite and positive",
            ));
        }
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(SymmetricError::InvalidParams(
                "r must be finite and positive",
            ));
        }
        if !(phase.is_finite() && global_phase.is_finite()) {
            return Err(SymmetricError::InvalidParams("phases must be finite"));
        }
        Ok(Self {
            norm,
            ratio,
            phase,
            global_phase,
        })
    }

    /// Gauge-fixed stationary parameters: `Theta` shifted by pi if that
    /// makes `g_R(q,0)` positive, `theta` reduced by the phase symmetry of the
    /// target (see [`phase_symmetry`]), phases wrapped into `[0, 2pi)`, and
    /// `N` taken from the N-equation.
    pub fn canonical(
        wf: &WeightedFVector,
        ratio: f64,
        phase: f64,
        global_phase: f64,
    ) -> Result<Self, SymmetricError> {
        let (mut phase, mut global_phase) = (phase, global_phase);
        if g_moment(wf, 0, ratio, phase, global_phase).re < 0.0 {
            global_phase += PI;
        }
        match phase_symmetry(wf) {
            Some((p0, 0)) => {
                global_phase += p0 as f64 * phase;
                phase = 0.0;
            }
            Some((p0, d)) if d > 1 => {
                let period = TAU / d as f64;
                let k = ((wrap_phase(phase) + 1e-12) / period).floor();
                phase -= k * period;
                global_phase += p0 as f64 * k * period;
            }
            _ => {}
        }
        let phase = wrap_phase(phase);
        let global_phase = wrap_phase(global_phase);
        let norm = eliminate_norm(wf, ratio, phase, global_phase)?;
        Self::new(norm, ratio, phase, global_phase)
    }
}

/// Phase shifts that leave the target invariant. With support `p0 < p1 < ...`
/// and `d = gcd(p_i - p0)`, the moves `theta -> theta + 2pi k/d`,
/// `Theta -> Theta - p0 2pi k/d` change no `Theta + p theta` on the support.
/// Returns `(p0, d)`, with `d = 0` for a single term (a continuous symmetry),
/// or `None` for an all-zero vector.
pub fn phase_symmetry(wf: &WeightedFVector) -> Option<(usize, usize)> {
    let mut support = wf
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(p, _)| p);
    let p0 = support.next()?;
    Some((p0, support.fold(0, |d, p| d.gcd(&(p - p0)))))
}

/// `true` if every supported term `Theta + p theta` is a multiple of pi.
pub fn phases_real(wf: &WeightedFVector, phase: f64, global_phase: f64, tol: f64) -> bool {
    wf.values()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .all(|(p, _)| (global_phase + p as f64 * phase).sin().abs() < tol)
}

pub fn wrap_phase(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Real and imaginary moment sums `g_R(q,m)` and `g_I(q,m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GPair {
    pub re: f64,
    pub im: f64,
}

/// `g_R = 2 sum_p p^m f̃_p cos(Theta + p theta) r^p`, `g_I` with sine.
/// `p^0 = 1` for every `p`, including `p = 0`.
pub fn g_moment(wf: &WeightedFVector, m: u32, r: f64, phase: f64, global_phase: f64) -> GPair {
    let mut re = 0.0;
    let mut im = 0.0;
    for (p, &w) in wf.values().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let weight = (p as f64).powi(m as i32) * w * r.powi(p as i32);
        let (s, c) = (global_phase + p as f64 * phase).sin_cos();
        re += weight * c;
        im += weight * s;
    }
    GPair {
        re: 2.0 * re,
        im: 2.0 * im,
    }
}

/// Checked variant of [`g_moment`] for the orders the analysis uses.
pub fn g_fn(
    wf: &WeightedFVector,
    m: u32,
    r: f64,
    phase: f64,
    global_phase: f64,
) -> Result<GPair, SymmetricError> {
    if m > 2 {
        return Err(SymmetricError::UnsupportedOrder(m));
    }
    Ok(g_moment(wf, m, r, phase, global_phase))
}

/// Squared distances and the critical-angle cosine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistancePair {
    pub d2_unnorm: f64,
    pub d2_norm: f64,
    pub cos_theta_c: f64,
}

impl DistancePair {
    /// Distances to the closest unnormalized and normalized product states
    /// for a given maximal overlap.
    pub fn from_cos(cos_theta_c: f64) -> Self {
        Self {
            d2_unnorm: 1.0 - cos_theta_c * cos_theta_c,
            d2_norm: 2.0 * (1.0 - cos_theta_c),
            cos_theta_c,
        }
    }
}

/// `D^2 = 1 + N^q - [N/(1+r^2)]^{q/2} g_R(q,0)` at the given parameters, plus
/// the N-independent overlap modulus `cos theta_c`.
pub fn distance_sq(wf: &WeightedFVector, params: &SymParams) -> DistancePair {
    let q = wf.q() as i32;
    let big_r = 1.0 + params.ratio * params.ratio;
    let g = g_moment(wf, 0, params.ratio, params.phase, params.global_phase);
    let factor = (params.norm / big_r).powf(q as f64 / 2.0);
    let d2_unnorm = 1.0 + params.norm.powi(q) - factor * g.re;
    let cos_theta_c = 0.5 * big_r.powf(-(q as f64) / 2.0) * g.re.hypot(g.im);
    DistancePair {
        d2_unnorm,
        d2_norm: 2.0 * (1.0 - cos_theta_c),
        cos_theta_c,
    }
}

/// Analytic gradient of `D^2` in the order `(N, r, theta, Theta)`.
pub fn distance_gradient(wf: &WeightedFVector, params: &SymParams) -> [f64; 4] {
    let q = wf.q() as f64;
    let (n, r) = (params.norm, params.ratio);
    let big_r = 1.0 + r * r;
    let g0 = g_moment(wf, 0, r, params.phase, params.global_phase);
    let g1 = g_moment(wf, 1, r, params.phase, params.global_phase);
    let factor = (n / big_r).powf(q / 2.0);
    let d_norm =
        q * n.powf(q / 2.0 - 1.0) / big_r.powf(q / 2.0) * ((n * big_r).powf(q / 2.0) - 0.5 * g0.re);
    let residual = ratio_residual(wf, r, params.phase, params.global_phase);
    [d_norm, -factor * residual, factor * g1.im, factor * g0.im]
}

/// Positive N from `g_R(q,0) = 2 [N (1+r^2)]^{q/2}`.
pub fn eliminate_norm(
    wf: &WeightedFVector,
    r: f64,
    phase: f64,
    global_phase: f64,
) -> Result<f64, SymmetricError> {
    let g0 = g_moment(wf, 0, r, phase, global_phase).re;
    if !(g0 > 0.0) {
        return Err(SymmetricError::NonPositiveOverlap(g0));
    }
    Ok((g0 / 2.0).powf(2.0 / wf.q() as f64) / (1.0 + r * r))
}

/// Per-p phase coefficients `c_p = 2 f̃_p cos(Theta + p theta)` and
/// `s_p = 2 f̃_p sin(Theta + p theta)`.
fn phase_coeffs(wf: &WeightedFVector, phase: f64, global_phase: f64) -> (Vec<f64>, Vec<f64>) {
    wf.values()
        .iter()
        .enumerate()
        .map(|(p, &w)| {
            let (s, c) = (global_phase + p as f64 * phase).sin_cos();
            (2.0 * w * c, 2.0 * w * s)
        })
        .unzip()
}

/// Coefficients of the polynomial `P(r) = (1 + r^2) R1(r)`, where
/// `R1 = g_R(q,1)/r - q r g_R(q,0)/(1+r^2)`. Index k is the coefficient of
/// `r^k`; the degree is at most `q + 1`.
pub(crate) fn ratio_polynomial(cos_coeffs: &[f64]) -> Vec<f64> {
    let q = cos_coeffs.len() - 1;
    let mut poly = vec![0.0; q + 2];
    for (p, &c) in cos_coeffs.iter().enumerate() {
        if p >= 1 {
            poly[p - 1] += p as f64 * c;
        }
        poly[p + 1] += (p as f64 - q as f64) * c;
    }
    poly
}

/// k-th derivative of a polynomial given by ascending coefficients.
pub(crate) fn poly_derivative_at(poly: &[f64], k: usize, x: f64) -> f64 {
    poly.iter()
        .enumerate()
        .skip(k)
        .rev()
        .fold(0.0, |acc, (j, &a)| {
            let falling: f64 = (0..k).map(|i| (j - i) as f64).product();
            acc * x + falling * a
        })
}

/// Unscaled first residual `g_R(q,1)/r - q r g_R(q,0)/(1+r^2)`, with the
/// `1/r` absorbed into the sum so `r -> 0` is regular.
fn ratio_residual(wf: &WeightedFVector, r: f64, phase: f64, global_phase: f64) -> f64 {
    let (c, _) = phase_coeffs(wf, phase, global_phase);
    let poly = ratio_polynomial(&c);
    poly_derivative_at(&poly, 0, r) / (1.0 + r * r)
}

/// Residuals of the three N-free extremal equations,
/// `(g_R(q,1)/r - q r g_R(q,0)/(1+r^2), g_I(q,1), g_I(q,0))`, each multiplied
/// by `(1+r^2)^{-q/2}` so that they stay O(1) over the whole range of `r`.
pub fn extremal_residuals(
    wf: &WeightedFVector,
    r: f64,
    phase: f64,
    global_phase: f64,
) -> Result<[f64; 3], SymmetricError> {
    let g0 = g_moment(wf, 0, r, phase, global_phase).re;
    if !(g0 > 0.0) {
        return Err(SymmetricError::NonPositiveOverlap(g0));
    }
    Ok(scaled_residuals(wf, r, phase, global_phase))
}

/// [`extremal_residuals`] without the sign check on `g_R(q,0)`.
pub(crate) fn scaled_residuals(
    wf: &WeightedFVector,
    r: f64,
    phase: f64,
    global_phase: f64,
) -> [f64; 3] {
    let big_r = 1.0 + r * r;
    let scale = big_r.powf(-(wf.q() as f64) / 2.0);
    let g0 = g_moment(wf, 0, r, phase, global_phase);
    let g1 = g_moment(wf, 1, r, phase, global_phase);
    [
        scale * ratio_residual(wf, r, phase, global_phase),
        scale * g1.im,
        scale * g0.im,
    ]
}

pub fn residual_norm(res: &[f64; 3]) -> f64 {
    res.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Typical size of the terms summed into the scaled residuals at ratio `r`,
/// capped at 1. Both the residuals and the overlap decay like
/// `(1+r^2)^{-q/2}` times the dominant term as `r` runs off to either edge,
/// so an absolute tolerance alone would accept points there that are not
/// stationary.
pub fn residual_scale(wf: &WeightedFVector, r: f64) -> f64 {
    let q = wf.q() as f64;
    let sum: f64 = wf
        .values()
        .iter()
        .enumerate()
        .map(|(p, w)| 2.0 * w.abs() * (1.0 + p as f64) * r.powi(p as i32))
        .sum();
    (sum * (1.0 + r * r).powf(-q / 2.0)).min(1.0)
}

/// Entries of the reduced Hessian in the order `(N, r, theta, Theta)`:
///
/// ```text
/// | A 0 0 0 |
/// | 0 B X Y |
/// | 0 X C W |
/// | 0 Y W D |
/// ```
///
/// with `Y = 0`. The entries are the true Hessian of `D^2` divided by the
/// positive factor `[N/(1+r^2)]^{q/2}`, which is kept in `factor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HessianParts {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub x: f64,
    pub w: f64,
    pub factor: f64,
    /// `A`, `B` and `(C+D-X)/2 ± sqrt((C-D-X)^2 + 4W^2)/2`.
    pub eigenvalues: [f64; 4],
}

/// Eigen-decomposition of the assembled 4x4 matrix, ascending.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spectrum {
    pub values: [f64; 4],
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: [[f64; 4]; 4],
}

impl HessianParts {
    pub fn matrix(&self) -> [[f64; 4]; 4] {
        [
            [self.a, 0.0, 0.0, 0.0],
            [0.0, self.b, self.x, 0.0],
            [0.0, self.x, self.c, self.w],
            [0.0, 0.0, self.w, self.d],
        ]
    }

    /// Exact spectrum of [`Self::matrix`]. Agrees with `eigenvalues` when
    /// `X = 0`, which holds at every real extremum; for complex extrema the
    /// closed form drops the `X^2` coupling between `r` and `theta`.
    pub fn spectrum(&self) -> Spectrum {
        let m = self.matrix();
        let mat = Matrix4::from_fn(|i, j| m[i][j]);
        let eig = SymmetricEigen::new(mat);
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let mut values = [0.0; 4];
        let mut vectors = [[0.0; 4]; 4];
        for (k, &i) in order.iter().enumerate() {
            values[k] = eig.eigenvalues[i];
            for row in 0..4 {
                vectors[k][row] = eig.eigenvectors[(row, i)];
            }
        }
        Spectrum { values, vectors }
    }

    /// `D(C - X) > W^2`: both eigenvalues of the phase block are positive.
    pub fn phase_block_positive(&self) -> bool {
        self.d * (self.c - self.x) > self.w * self.w
    }
}

pub fn hessian_at(
    wf: &WeightedFVector,
    params: &SymParams,
) -> Result<HessianParts, SymmetricError> {
    let (n, r, phase, global_phase) =
        (params.norm, params.ratio, params.phase, params.global_phase);
    let res = extremal_residuals(wf, r, phase, global_phase)?;
    let rn = residual_norm(&res);
    if rn > EXTREMUM_GUARD {
        return Err(SymmetricError::NotAtExtremum(rn));
    }
    let q = wf.q() as f64;
    let big_r = 1.0 + r * r;
    let k = (n * big_r).powf(q / 2.0);
    let g0 = g_moment(wf, 0, r, phase, global_phase);
    let g1 = g_moment(wf, 1, r, phase, global_phase);
    let g2 = g_moment(wf, 2, r, phase, global_phase);

    // X = g_I(q,2)/r, summed with the 1/r folded in.
    let x: f64 = wf
        .values()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(p, &w)| {
            let pf = p as f64;
            2.0 * pf * pf * w * (global_phase + pf * phase).sin() * r.powi(p as i32 - 1)
        })
        .sum();

    let a = q * q / 2.0 * n.powf(q / 2.0 - 2.0) * big_r.powf(q / 2.0);
    let b = (2.0 * q * r * r / (big_r * big_r) * k * (2.0 + q * r * r) - g2.re) / (r * r);
    let c = g2.re;
    let d = g0.re;
    let w = g1.re;
    let disc = ((c - d - x).powi(2) + 4.0 * w * w).sqrt();
    let eigenvalues = [
        a,
        b,
        0.5 * (c + d - x) + 0.5 * disc,
        0.5 * (c + d - x) - 0.5 * disc,
    ];
    Ok(HessianParts {
        a,
        b,
        c,
        d,
        x,
        w,
        factor: (n / big_r).powf(q / 2.0),
        eigenvalues,
    })
}

/// Candidate at one edge of the ratio range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryCandidate {
    pub distances: DistancePair,
    /// False when the edge coefficient vanishes, so the edge is a maximum.
    pub valid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryReport {
    /// `r = 0`: the all-zeros product state.
    pub at_r0: BoundaryCandidate,
    /// `r -> infinity`: the all-ones product state.
    pub at_rinf: BoundaryCandidate,
}

/// Distances at `r = 0` and `r -> infinity`, where the overlap reduces to
/// `f_0` and `f_q` and the optimal `cos Theta` is `±1`.
pub fn boundary_distances(f: &FVector) -> BoundaryReport {
    let edge = |c: f64| BoundaryCandidate {
        distances: DistancePair::from_cos(c.abs()),
        valid: c != 0.0,
    };
    BoundaryReport {
        at_r0: edge(f.first()),
        at_rinf: edge(f.last()),
    }
}
