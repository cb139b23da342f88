//! Entanglement against coefficient spread: random non-negative f-vectors
//! alongside three structured families.

use rayon::prelude::*;
use serde::Serialize;

use crate::census::{ensemble_member, mix_seed, Convention, Sampler};
use crate::qstate::FVector;
use crate::solver::{multistart_solve, SolveError};

/// Number of widths on the log grid for each structured family.
pub const WIDTH_POINTS: usize = 20;
pub const MIN_WIDTH: f64 = 0.1;
pub const MAX_WIDTH: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    Random,
    /// Bell shape peaked at `p = q/2`.
    GaussianPeak,
    /// Largest at both ends, smallest at `p = q/2`.
    InvertedGaussian,
    /// One side of a Gaussian, peaked at `p = 0` or (mirrored) at `p = q`.
    HalfGaussian,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Random => "Random",
            Family::GaussianPeak => "GaussianPeak",
            Family::InvertedGaussian => "InvertedGaussian",
            Family::HalfGaussian => "HalfGaussian",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceRow {
    pub family: Family,
    /// Width parameter of structured rows; `None` for random rows.
    pub width: Option<f64>,
    pub f: FVector,
    pub variance: f64,
    pub d2_norm: f64,
}

pub fn width_grid() -> Vec<f64> {
    let (lo, hi) = (MIN_WIDTH.ln(), MAX_WIDTH.ln());
    (0..WIDTH_POINTS)
        .map(|i| (lo + (hi - lo) * i as f64 / (WIDTH_POINTS - 1) as f64).exp())
        .collect()
}

fn gaussian(p: usize, center: f64, width: f64) -> f64 {
    // Zero width keeps the one or two levels nearest the center.
    if width == 0.0 {
        return if (p as f64 - center).abs() <= 0.5 {
            1.0
        } else {
            0.0
        };
    }
    (-(p as f64 - center).powi(2) / (2.0 * width * width)).exp()
}

/// Raw (unnormalized) members of a structured family, tagged with width.
/// `GaussianPeak` also carries the zero-width limit, the Dicke state at the
/// center.
pub fn family_members(q: usize, family: Family) -> Vec<(f64, Vec<f64>)> {
    let center = q as f64 / 2.0;
    let peak = |w: f64| {
        (0..=q)
            .map(|p| gaussian(p, center, w))
            .collect::<Vec<f64>>()
    };
    match family {
        Family::Random => Vec::new(),
        Family::GaussianPeak => std::iter::once(0.0)
            .chain(width_grid())
            .map(|w| (w, peak(w)))
            .collect(),
        Family::InvertedGaussian => width_grid()
            .into_iter()
            .map(|w| {
                let g = peak(w);
                let top = g.iter().cloned().fold(f64::MIN, f64::max);
                (w, g.iter().map(|x| top - x).collect::<Vec<f64>>())
            })
            .filter(|(_, v)| v.iter().any(|x| *x > 1e-300))
            .collect(),
        Family::HalfGaussian => width_grid()
            .into_iter()
            .flat_map(|w| {
                let left: Vec<f64> = (0..=q).map(|p| gaussian(p, 0.0, w)).collect();
                let right: Vec<f64> = left.iter().rev().cloned().collect();
                [(w, left), (w, right)]
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceStudyConfig {
    pub q: usize,
    pub n_random: usize,
    pub seed: u64,
    pub n_starts: usize,
}

pub fn variance_study(cfg: &VarianceStudyConfig) -> Result<Vec<VarianceRow>, SolveError> {
    let q = cfg.q;
    let mut jobs: Vec<(Family, Option<f64>, FVector)> = (0..cfg.n_random as u64)
        .map(|i| {
            let f = ensemble_member(q, cfg.seed, i, Sampler::NonNegativeSphere, Convention::Bare);
            (Family::Random, None, f)
        })
        .collect();
    for family in [
        Family::GaussianPeak,
        Family::InvertedGaussian,
        Family::HalfGaussian,
    ] {
        for (w, raw) in family_members(q, family) {
            let f = FVector::new(q, &raw).expect("family members are finite and nonzero");
            jobs.push((family, Some(w), f));
        }
    }
    jobs.into_par_iter()
        .enumerate()
        .map(|(i, (family, width, f))| {
            let s = multistart_solve(&f, cfg.n_starts, mix_seed(cfg.seed, i as u64))?;
            Ok(VarianceRow {
                family,
                width,
                variance: f.stats().variance,
                d2_norm: s.winner.distances().d2_norm,
                f,
            })
        })
        .collect()
}

/// Comparison of the random cloud with the bell-shaped family inside one
/// variance bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WedgeBin {
    pub lo: f64,
    pub hi: f64,
    pub n_random: usize,
    pub n_peak: usize,
    pub random_max: f64,
    pub peak_max: f64,
    /// `peak_max >= random_max - tol` whenever both are populated.
    pub holds: bool,
}

/// Splits `[0, max variance]` into `n_bins` equal bins and checks, in every
/// bin populated by both, that the best `GaussianPeak` row is at least as
/// entangled as the best random row.
pub fn wedge_check(rows: &[VarianceRow], n_bins: usize, tol: f64) -> Vec<WedgeBin> {
    let top = rows.iter().map(|r| r.variance).fold(0.0f64, f64::max);
    let width = if top > 0.0 { top / n_bins as f64 } else { 1.0 };
    let mut bins: Vec<WedgeBin> = (0..n_bins)
        .map(|k| WedgeBin {
            lo: k as f64 * width,
            hi: (k + 1) as f64 * width,
            n_random: 0,
            n_peak: 0,
            random_max: f64::NEG_INFINITY,
            peak_max: f64::NEG_INFINITY,
            holds: true,
        })
        .collect();
    for row in rows {
        let k = ((row.variance / width) as usize).min(n_bins - 1);
        let bin = &mut bins[k];
        match row.family {
            Family::Random => {
                bin.n_random += 1;
                bin.random_max = bin.random_max.max(row.d2_norm);
            }
            Family::GaussianPeak => {
                bin.n_peak += 1;
                bin.peak_max = bin.peak_max.max(row.d2_norm);
            }
            _ => {}
        }
    }
    for bin in &mut bins {
        bin.holds = bin.n_random == 0 || bin.n_peak == 0 || bin.peak_max >= bin.random_max - tol;
    }
    bins
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn peak_family_endpoints() {
        let members = family_members(4, Family::GaussianPeak);
        assert_eq!(members.len(), WIDTH_POINTS + 1);
        assert_eq!(members[0].1, vec![0.0, 0.0, 1.0, 0.0, 0.0]);
        let widest = FVector::new(4, &members.last().unwrap().1).unwrap();
        assert!(widest.stats().variance < 1e-5);
    }

    #[test]
    fn inverted_family_is_smallest_in_the_middle() {
        for (_, v) in family_members(4, Family::InvertedGaussian) {
            assert!(v[2] <= v[1] && v[1] <= v[0]);
            assert_eq!(v[2], 0.0);
        }
    }

    #[test]
    fn half_family_has_both_orientations() {
        let m = family_members(4, Family::HalfGaussian);
        assert_eq!(m.len(), 2 * WIDTH_POINTS);
        assert!(m[0].1[0] >= m[0].1[4]);
        assert!(m[1].1[4] >= m[1].1[0]);
    }

    #[test]
    fn width_grid_is_logarithmic() {
        let g = width_grid();
        assert_abs_diff_eq!(g[0], MIN_WIDTH, epsilon = 1e-15);
        assert_abs_diff_eq!(g[WIDTH_POINTS - 1], MAX_WIDTH, epsilon = 1e-12);
        let ratios: Vec<f64> = g.windows(2).map(|w| w[1] / w[0]).collect();
        assert!(ratios.windows(2).all(|r| (r[0] - r[1]).abs() < 1e-12));
    }

    #[test]
    fn odd_q_zero_width_splits_center() {
        let members = family_members(3, Family::GaussianPeak);
        assert_eq!(members[0].1, vec![0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn small_study_is_deterministic() {
        let cfg = VarianceStudyConfig {
            q: 4,
            n_random: 10,
            seed: 3,
            n_starts: 16,
        };
        let a = variance_study(&cfg).unwrap();
        let b = variance_study(&cfg).unwrap();
        assert_eq!(a, b);
        for row in &a {
            assert_eq!(row.variance, row.f.stats().variance);
        }
    }

    #[test]
    fn wedge_bins_cover_rows() {
        let f = FVector::dicke(4, 2).unwrap();
        let row = |family, variance, d2_norm| VarianceRow {
            family,
            width: None,
            f: f.clone(),
            variance,
            d2_norm,
        };
        let rows = vec![
            row(Family::Random, 0.05, 0.3),
            row(Family::GaussianPeak, 0.06, 0.4),
            row(Family::Random, 0.19, 0.6),
            row(Family::GaussianPeak, 0.2, 0.5),
        ];
        let bins = wedge_check(&rows, 2, 1e-9);
        assert!(bins[0].holds);
        assert!(!bins[1].holds);
        assert_eq!(bins.iter().map(|b| b.n_random + b.n_peak).sum::<usize>(), 4);
    }
}
