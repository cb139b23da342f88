//! End-to-end acceptance checks. Each test prints one PASS/FAIL line to
//! stderr (bypassing libtest capture) and then asserts.

use std::io::Write;
use std::time::{Duration, Instant};

use geoment::census::{census_with, ensemble_member, Convention, Sampler};
use geoment::evenodd::{
    evenodd_distance, evenodd_sweep, ra_sq_closed, stationarity_residuals, EvenOddSpec,
};
use geoment::experiments::{variance_study, wedge_check, Family, VarianceStudyConfig};
use geoment::oracle::{oracle_min_distance, symmetric_gap};
use geoment::qstate::{binomial, superpose_dicke, FVector, StateVector};
use geoment::solver::{
    default_starts, dicke_sweep, multistart_solve, CensusClass, ExtremumReport, Winner,
};
use geoment::symmetric::{hessian_at, SymParams, ZERO_EIGEN_REL};
use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;

fn report(id: u32, name: &str, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr(),
        "acceptance {id:>2} [{verdict}] {name}: {detail}"
    );
}

fn fv(q: usize, raw: &[f64]) -> FVector {
    FVector::new(q, raw).unwrap()
}

/// `2 - 2 sqrt(C(q,p) (p/q)^p ((q-p)/q)^(q-p))`.
fn dicke_d2_norm(q: usize, p: usize) -> f64 {
    let (qf, pf) = (q as f64, p as f64);
    2.0 - 2.0 * (binomial(q, p) * (pf / qf).powf(pf) * ((qf - pf) / qf).powf(qf - pf)).sqrt()
}

/// Dense product state `e^{i Theta} (a1, a2 e^{i theta})^{⊗q}`, built without
/// the library's symmetric formulas.
fn dense_product(q: usize, n: f64, r: f64, theta: f64, big_theta: f64) -> Vec<Complex64> {
    let a1 = (n / (1.0 + r * r)).sqrt();
    let a2 = Complex64::from_polar(r * a1, theta);
    (0..1usize << q)
        .map(|i| {
            let k = i.count_ones() as i32;
            Complex64::from_polar(1.0, big_theta) * a1.powi(q as i32 - k) * a2.powi(k)
        })
        .collect()
}

/// `|psi - phi|^2` from dense amplitudes.
fn dense_distance(psi: &StateVector, x: [f64; 4]) -> f64 {
    let phi = dense_product(psi.q(), x[0], x[1], x[2], x[3]);
    psi.amplitudes()
        .iter()
        .zip(&phi)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum()
}

/// Central-difference Hessian of the dense distance in `(N, r, theta, Theta)`.
fn fd_hessian(psi: &StateVector, x: [f64; 4], h: f64) -> [[f64; 4]; 4] {
    let eval = |dx: [f64; 4]| {
        dense_distance(
            psi,
            [x[0] + dx[0], x[1] + dx[1], x[2] + dx[2], x[3] + dx[3]],
        )
    };
    let unit = |i: usize, s: f64| {
        let mut d = [0.0; 4];
        d[i] = s;
        d
    };
    let add = |a: [f64; 4], b: [f64; 4]| [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]];
    let mut out = [[0.0; 4]; 4];
    let f0 = eval([0.0; 4]);
    for i in 0..4 {
        out[i][i] = (eval(unit(i, h)) - 2.0 * f0 + eval(unit(i, -h))) / (h * h);
        for j in 0..i {
            let v = (eval(add(unit(i, h), unit(j, h)))
                - eval(add(unit(i, h), unit(j, -h)))
                - eval(add(unit(i, -h), unit(j, h)))
                + eval(add(unit(i, -h), unit(j, -h))))
                / (4.0 * h * h);
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

fn sorted_eigenvalues(m: [[f64; 4]; 4]) -> [f64; 4] {
    let eig = SymmetricEigen::new(Matrix4::from_fn(|i, j| m[i][j]));
    let mut v = [0.0; 4];
    v.copy_from_slice(eig.eigenvalues.as_slice());
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn criterion_01_w_state() {
    let f = fv(4, &[0.0, 1.0, 0.0, 0.0, 0.0]);
    let want = 2.0 - 2.0 * 0.75f64.powf(1.5);
    let t = Instant::now();
    let s = multistart_solve(&f, default_starts(4), 0).unwrap();
    let elapsed = t.elapsed();
    let got = s.winner.distances().d2_norm;
    let oracle = oracle_min_distance(&superpose_dicke(&f).unwrap(), 32, 0).unwrap();
    let pass = (got - want).abs() < 1e-9
        && (got - oracle.d2_norm).abs() < 1e-6
        && elapsed < Duration::from_secs(1);
    report(
        1,
        "W state",
        pass,
        format!(
            "d2_norm={got:.12} formula={want:.12} oracle={:.12} time={elapsed:.2?}",
            oracle.d2_norm
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_02_dicke_sweep() {
    let t = Instant::now();
    let rows = dicke_sweep(4).unwrap();
    let elapsed = t.elapsed();
    let worst = rows
        .iter()
        .map(|r| (r.d2_norm - dicke_d2_norm(4, r.p)).abs())
        .fold(0.0f64, f64::max);
    let argmax = rows
        .iter()
        .max_by(|a, b| a.d2_norm.total_cmp(&b.d2_norm))
        .unwrap();
    let pass = rows.len() == 5
        && worst < 1e-8
        && argmax.p == 2
        && (argmax.d2_norm - 0.775255).abs() < 1e-6
        && elapsed < Duration::from_secs(5);
    report(
        2,
        "Dicke sweep q=4",
        pass,
        format!(
            "max err={worst:.2e} argmax p={} d2_norm={:.6} time={elapsed:.2?}",
            argmax.p, argmax.d2_norm
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_03_ghz_boundary() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let f = fv(4, &[h, 0.0, 0.0, 0.0, h]);
    let s = multistart_solve(&f, default_starts(4), 0).unwrap();
    let d = s.winner.distances();
    let at_edge = matches!(s.winner, Winner::Boundary { .. });
    let oracle = oracle_min_distance(&superpose_dicke(&f).unwrap(), 32, 0).unwrap();
    let exact = 1.0 - f.first() * f.first();
    let pass = at_edge
        && d.d2_unnorm == exact
        && (d.d2_unnorm - 0.5).abs() < 1e-15
        && (d.d2_norm - (2.0 - 2f64.sqrt())).abs() < 1e-9
        && (d.d2_norm - oracle.d2_norm).abs() < 1e-6;
    report(
        3,
        "GHZ boundary",
        pass,
        format!(
            "boundary={at_edge} d2_unnorm={:.17} d2_norm={:.12} oracle={:.12}",
            d.d2_unnorm, d.d2_norm, oracle.d2_norm
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_04_degenerate_minimum() {
    // Uniform in the weighted convention: f̃_p all equal.
    let f = FVector::from_weighted(4, &[1.0; 5]).unwrap();
    let s = multistart_solve(&f, default_starts(4), 0).unwrap();
    let Winner::Interior(rep) = &s.winner else {
        report(
            4,
            "degenerate minimum",
            false,
            "winner on the boundary".into(),
        );
        panic!("winner on the boundary");
    };
    let values = rep.spectrum.values;
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let zeros: Vec<usize> = (0..4)
        .filter(|&k| values[k].abs() <= ZERO_EIGEN_REL * scale)
        .collect();
    let cosine = zeros
        .first()
        .map(|&k| rep.spectrum.vectors[k][1].abs())
        .unwrap_or(0.0);
    let pass = (rep.params.ratio - 1.0).abs() < 1e-8
        && zeros.len() == 1
        && cosine > 0.999
        && s.census_class == CensusClass::RealInteriorZeroEig;
    report(
        4,
        "degenerate minimum",
        pass,
        format!(
            "r-1={:.2e} zero eigenvalues={} cos(null, r)={cosine:.6} class={:?}",
            rep.params.ratio - 1.0,
            zeros.len(),
            s.census_class
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_05_extremal_identity() {
    let t = Instant::now();
    let mut checked = 0usize;
    let mut worst_identity = 0.0f64;
    let mut worst_residual = 0.0f64;
    let mut worst_dense = 0.0f64;
    for i in 0..200 {
        let f = ensemble_member(4, 5, i, Sampler::UniformSphere, Convention::Bare);
        let psi = superpose_dicke(&f).unwrap();
        let s = multistart_solve(&f, default_starts(4), i).unwrap();
        for e in s.interior.iter().filter(|e| e.kind.is_minimum()) {
            let p = e.params;
            let one_minus = 1.0 - p.norm.powi(4);
            let dense = dense_distance(&psi, [p.norm, p.ratio, p.phase, p.global_phase]);
            worst_identity = worst_identity.max((e.distances.d2_unnorm - one_minus).abs());
            worst_dense = worst_dense.max((dense - one_minus).abs());
            worst_residual = worst_residual.max(e.residual_norm);
            checked += 1;
        }
    }
    let elapsed = t.elapsed();
    let pass = checked > 0
        && worst_identity < 1e-10
        && worst_dense < 1e-10
        && worst_residual < 1e-10
        && elapsed < Duration::from_secs(60);
    report(
        5,
        "extremal identity",
        pass,
        format!(
            "{checked} minima; |d2-(1-N^q)| max={worst_identity:.2e} (dense {worst_dense:.2e}) \
             residual max={worst_residual:.2e} time={elapsed:.2?}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_06_hessian_fidelity() {
    let mut extrema: Vec<(FVector, ExtremumReport)> = Vec::new();
    let mut i = 0;
    while extrema.len() < 50 {
        let f = ensemble_member(4, 6, i, Sampler::UniformSphere, Convention::Bare);
        let s = multistart_solve(&f, 32, i).unwrap();
        // At most two extrema per target keeps the sample varied.
        for e in s.interior.into_iter().take(2) {
            extrema.push((f.clone(), e));
        }
        i += 1;
    }
    extrema.truncate(50);

    let (mut worst_closed, mut worst_exact) = (0.0f64, 0.0f64);
    let mut n_real = 0;
    for (f, e) in &extrema {
        let p = e.params;
        let psi = superpose_dicke(f).unwrap();
        let factor = (p.norm / (1.0 + p.ratio * p.ratio)).powi(2);
        let mut fd = fd_hessian(&psi, [p.norm, p.ratio, p.phase, p.global_phase], 1e-4);
        fd.iter_mut().flatten().for_each(|v| *v /= factor);
        let fd_values = sorted_eigenvalues(fd);
        let scale = fd_values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let rel = |vals: [f64; 4]| {
            vals.iter()
                .zip(&fd_values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max)
                / scale
        };
        let h = hessian_at(
            &f.weighted(),
            &SymParams::new(p.norm, p.ratio, p.phase, p.global_phase).unwrap(),
        )
        .unwrap();
        worst_exact = worst_exact.max(rel(h.spectrum().values));
        if e.is_real() {
            let mut closed = h.eigenvalues;
            closed.sort_by(f64::total_cmp);
            worst_closed = worst_closed.max(rel(closed));
            n_real += 1;
        }
    }
    let pass = worst_closed < 1e-4 && worst_exact < 1e-4;
    report(
        6,
        "Hessian fidelity",
        pass,
        format!(
            "50 extrema ({n_real} real): closed-form rel err={worst_closed:.2e}, \
             assembled-matrix rel err={worst_exact:.2e}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_07_oracle_equivalence() {
    let mut worst = 0.0f64;
    let mut count = 0;
    for q in [3usize, 4] {
        for i in 0..200 {
            let f = ensemble_member(q, 7, i, Sampler::UniformSphere, Convention::Bare);
            worst = worst.max(symmetric_gap(&f, 32, i).unwrap());
            count += 1;
        }
    }
    let pass = worst < 1e-6;
    report(
        7,
        "oracle equivalence",
        pass,
        format!("{count} f-vectors at q=3,4: max gap={worst:.2e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_08_census() {
    let nonneg = census_with(
        4,
        2000,
        8,
        Sampler::NonNegativeSphere,
        Convention::Weighted,
        default_starts(4),
    );
    let signed = census_with(
        4,
        2000,
        8,
        Sampler::UniformSphere,
        Convention::Weighted,
        default_starts(4),
    );
    let frac = signed.counts.fraction(CensusClass::ComplexInterior);
    let pass = nonneg.counts.complex_interior == 0
        && frac > 0.0
        && frac < 0.15
        && signed.counts.failed == 0;
    report(
        8,
        "census",
        pass,
        format!(
            "non-negative complex={} ; signed complex fraction={:.4} ({} of {}), failed={}",
            nonneg.counts.complex_interior,
            frac,
            signed.counts.complex_interior,
            signed.counts.total(),
            signed.counts.failed
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_09_even_odd() {
    let mut ok = true;
    let mut notes = Vec::new();

    let mut worst_w = 0.0f64;
    for q in [4usize, 6, 8] {
        let x = 1.0 / (q as f64).sqrt();
        worst_w = worst_w.max((ra_sq_closed(x, x, q).unwrap() - 1.0 / (q as f64 - 1.0)).abs());
    }
    ok &= worst_w < 1e-12;
    notes.push(format!("r_a^2 at f=m err={worst_w:.1e}"));

    let mut worst_stat = 0.0f64;
    for q in [4usize, 6, 8] {
        let top = (2.0 / q as f64).sqrt();
        for k in 1..20 {
            let f = top * k as f64 / 20.0;
            let spec = EvenOddSpec::from_odd_amplitude(q, f).unwrap();
            let res = evenodd_distance(&spec).unwrap();
            let r =
                stationarity_residuals(spec.f(), spec.m(), q, res.ra_sq.sqrt(), res.rb_sq.sqrt());
            worst_stat = worst_stat.max(r[0].abs()).max(r[1].abs());
        }
    }
    ok &= worst_stat < 1e-9;
    notes.push(format!("stationarity max={worst_stat:.1e}"));

    let w_value = 2.0 - 2.0 * 0.75f64.powf(1.5);
    let rows = evenodd_sweep(4, 21).unwrap();
    let best = rows
        .iter()
        .max_by(|a, b| a.d2_norm.total_cmp(&b.d2_norm))
        .unwrap();
    let sweep_ok = best.is_w_point && (best.d2_norm - w_value).abs() < 1e-9;
    ok &= sweep_ok;
    notes.push(format!(
        "sweep max at f=m: {} ({:.10})",
        best.is_w_point, best.d2_norm
    ));

    let edge = EvenOddSpec::from_odd_amplitude(4, 0.0).unwrap();
    let closed = evenodd_distance(&edge).unwrap().d2_norm;
    let oracle = oracle_min_distance(&edge.state(), 32, 0).unwrap().d2_norm;
    let edge_ok = (closed - oracle).abs() < 1e-6 && (closed - (2.0 - 2f64.sqrt())).abs() < 1e-6;
    ok &= edge_ok;
    notes.push(format!("m->0 closed={closed:.10} oracle={oracle:.10}"));

    report(9, "even/odd family", ok, notes.join("; "));
    assert!(ok);
}

#[test]
fn criterion_10_wedge() {
    let t = Instant::now();
    let cfg = VarianceStudyConfig {
        q: 4,
        n_random: 2000,
        seed: 10,
        n_starts: default_starts(4),
    };
    let rows = variance_study(&cfg).unwrap();
    let elapsed = t.elapsed();
    let bins = wedge_check(&rows, 10, 1e-9);
    let violations: Vec<String> = bins
        .iter()
        .filter(|b| !b.holds)
        .map(|b| {
            format!(
                "[{:.3},{:.3}) random max {:.4} > peak max {:.4}",
                b.lo, b.hi, b.random_max, b.peak_max
            )
        })
        .collect();
    let shared = bins
        .iter()
        .filter(|b| b.n_random > 0 && b.n_peak > 0)
        .count();
    let top = rows
        .iter()
        .map(|r| r.d2_norm)
        .fold(f64::NEG_INFINITY, f64::max);
    let dicke_top = rows.iter().any(|r| {
        r.family == Family::GaussianPeak && r.width == Some(0.0) && r.d2_norm >= top - 1e-12
    });
    let pass = violations.is_empty() && elapsed < Duration::from_secs(300);
    report(
        10,
        "variance wedge",
        pass,
        format!(
            "{} rows, {shared} shared bins, {} violations{}{}; Dicke p=2 is global max: {dicke_top}; time={elapsed:.2?}",
            rows.len(),
            violations.len(),
            if violations.is_empty() { "" } else { ": " },
            violations.join(", ")
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_11_translation_counterexample() {
    let psi = StateVector::from_basis_terms(4, &[(0b0101, 1.0), (0b1010, 1.0)]).unwrap();
    let res = oracle_min_distance(&psi, 32, 11).unwrap();
    let basis = res.best_product.iter().all(|b| b.alpha.sin().abs() < 1e-6);
    let pass = (res.g_max - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8 && basis;
    report(
        11,
        "translation-invariance counterexample",
        pass,
        format!("g_max={:.12} basis product={basis}", res.g_max),
    );
    assert!(pass);
}
