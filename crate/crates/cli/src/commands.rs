use std::process::ExitCode;

use geoment::census::{census_with, ensemble_member, mix_seed, Convention, Sampler};
use geoment::evenodd::{evenodd_sweep as sweep_evenodd, EvenOddError};
use geoment::experiments::{
    variance_study as run_variance_study, wedge_check, VarianceStudyConfig,
};
use geoment::oracle::{symmetric_gap, OracleError, MAX_ORACLE_QUBITS};
use geoment::qstate::{FVector, QStateError};
use geoment::solver::{
    default_starts, dicke_sweep as sweep_dicke, multistart_solve_with, BoundarySide, CensusClass,
    SolveError, SolverOptions, Winner,
};
use serde::Serialize;
use serde_json::Value;

use crate::output::{num, Plot, Table};
use crate::{
    CensusArgs, ConventionArg, DickeArgs, EvenOddArgs, Format, OracleArgs, SamplerArg, SolveArgs,
    VarianceArgs,
};

/// Tolerance of the per-bin wedge comparison.
const WEDGE_TOL: f64 = 1e-9;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Solver(String),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "invalid input: {m}"),
            CliError::Solver(m) => write!(f, "solver failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Io(_) => ExitCode::from(1),
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Solver(_) => ExitCode::from(3),
        }
    }
}

impl From<QStateError> for CliError {
    fn from(e: QStateError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<EvenOddError> for CliError {
    fn from(e: EvenOddError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::NoStarts => CliError::Usage(e.to_string()),
            SolveError::TotalFailure { .. } => CliError::Solver(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Solve(s) => s.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// Everything a subcommand produced, before formatting.
pub struct Report {
    pub json: Value,
    pub table: Option<Table>,
    pub plot: Option<Plot>,
    pub default_format: Format,
    /// Human-readable summary lines for stderr.
    pub notes: Vec<String>,
    pub exit: ExitCode,
}

impl Report {
    fn new(json: Value, table: Option<Table>, default_format: Format) -> Self {
        Self {
            json,
            table,
            plot: None,
            default_format,
            notes: Vec::new(),
            exit: ExitCode::SUCCESS,
        }
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialize")
}

fn sampler(s: SamplerArg) -> Sampler {
    match s {
        SamplerArg::UniformSphere => Sampler::UniformSphere,
        SamplerArg::NonNegativeSphere => Sampler::NonNegativeSphere,
        SamplerArg::SmallInteger => Sampler::SmallInteger,
    }
}

fn convention(c: ConventionArg) -> Convention {
    match c {
        ConventionArg::Bare => Convention::Bare,
        ConventionArg::Weighted => Convention::Weighted,
    }
}

fn f_columns(q: usize) -> impl Iterator<Item = String> {
    (0..=q).map(|p| format!("f{p}"))
}

pub fn solve(a: &SolveArgs) -> Result<Report, CliError> {
    let q = match a.q {
        Some(q) if q + 1 != a.f.len() => {
            return Err(CliError::Usage(format!(
                "--q {q} needs {} coefficients, got {}",
                q + 1,
                a.f.len()
            )))
        }
        Some(q) => q,
        None if a.f.is_empty() => return Err(CliError::Usage("--f is empty".into())),
        None => a.f.len() - 1,
    };
    if !(a.residual_tol > 0.0) {
        return Err(CliError::Usage("--residual-tol must be positive".into()));
    }
    let f = if a.weighted {
        FVector::from_weighted(q, &a.f)?
    } else {
        FVector::new(q, &a.f)?
    };
    let opts = SolverOptions {
        max_iters: a.max_iters,
        ascent_steps: a.ascent_steps,
        residual_tol: a.residual_tol,
        ..SolverOptions::default()
    };
    let s = multistart_solve_with(&f, a.n_starts.unwrap_or(default_starts(q)), a.seed, &opts)?;

    let mut table = Table::new([
        "candidate",
        "kind",
        "N",
        "r",
        "theta",
        "Theta",
        "d2_unnorm",
        "d2_norm",
        "residual_norm",
        "real_phases",
        "starts_converged",
        "winner",
    ]);
    for e in &s.interior {
        let won = matches!(&s.winner, Winner::Interior(w) if w == e);
        table.push(vec![
            "interior".into(),
            format!("{:?}", e.kind),
            num(e.params.norm),
            num(e.params.ratio),
            num(e.params.phase),
            num(e.params.global_phase),
            num(e.distances.d2_unnorm),
            num(e.distances.d2_norm),
            num(e.residual_norm),
            e.real_phases.to_string(),
            e.starts_converged.to_string(),
            won.to_string(),
        ]);
    }
    for (side, cand, r) in [
        (BoundarySide::R0, s.boundary.at_r0, 0.0),
        (BoundarySide::RInf, s.boundary.at_rinf, f64::INFINITY),
    ] {
        let won = matches!(&s.winner, Winner::Boundary { side: w, .. } if *w == side);
        let name = match side {
            BoundarySide::R0 => "boundary_r0",
            BoundarySide::RInf => "boundary_rinf",
        };
        table.push(vec![
            name.into(),
            if cand.valid { "Edge" } else { "EdgeMaximum" }.into(),
            String::new(),
            num(r),
            String::new(),
            String::new(),
            num(cand.distances.d2_unnorm),
            num(cand.distances.d2_norm),
            String::new(),
            String::new(),
            String::new(),
            won.to_string(),
        ]);
    }
    let d = s.winner.distances();
    let mut report = Report::new(to_value(&s), Some(table), Format::Json);
    report.notes.push(format!(
        "winner: {:?}, d2_norm = {}, no_interior_solution = {}",
        s.census_class,
        num(d.d2_norm),
        s.no_interior_solution()
    ));
    Ok(report)
}

pub fn dicke_sweep(a: &DickeArgs) -> Result<Report, CliError> {
    if a.q < 2 {
        return Err(QStateError::TooFewQubits(a.q).into());
    }
    let rows = sweep_dicke(a.q)?;
    let mut table = Table::new(["p", "d2_norm", "d2_unnorm", "r_opt"]);
    for r in &rows {
        table.push(vec![
            r.p.to_string(),
            num(r.d2_norm),
            num(r.d2_unnorm),
            num(r.r_opt),
        ]);
    }
    let mut report = Report::new(to_value(&rows), Some(table), Format::Csv);
    report.plot = Some(Plot {
        x: "p",
        y: "d2_norm",
        group: None,
    });
    Ok(report)
}

pub fn variance_study(a: &VarianceArgs) -> Result<Report, CliError> {
    if a.q < 2 {
        return Err(QStateError::TooFewQubits(a.q).into());
    }
    if a.bins == 0 {
        return Err(CliError::Usage("--bins must be at least 1".into()));
    }
    let cfg = VarianceStudyConfig {
        q: a.q,
        n_random: a.n_states,
        seed: a.seed,
        n_starts: a.n_starts.unwrap_or(default_starts(a.q)),
    };
    let rows = run_variance_study(&cfg)?;
    let wedge = wedge_check(&rows, a.bins, WEDGE_TOL);

    let mut table = Table::new(
        ["family", "width", "variance", "d2_norm"]
            .into_iter()
            .map(String::from)
            .chain(f_columns(a.q)),
    );
    for r in &rows {
        let mut row = vec![
            r.family.name().to_string(),
            r.width.map(num).unwrap_or_default(),
            num(r.variance),
            num(r.d2_norm),
        ];
        row.extend(r.f.coeffs().iter().map(|x| num(*x)));
        table.push(row);
    }
    let violations = wedge.iter().filter(|b| !b.holds).count();
    let mut report = Report::new(
        serde_json::json!({ "rows": rows, "wedge": wedge }),
        Some(table),
        Format::Csv,
    );
    report.plot = Some(Plot {
        x: "variance",
        y: "d2_norm",
        group: Some("family"),
    });
    report.notes.push(format!(
        "wedge: {violations} of {} bins have a random row above the GaussianPeak maximum",
        wedge.len()
    ));
    Ok(report)
}

pub fn evenodd_sweep(a: &EvenOddArgs) -> Result<Report, CliError> {
    let rows = sweep_evenodd(a.q, a.n_points)?;
    let mut table = Table::new(["f", "m", "d2_norm", "is_w_point"]);
    for r in &rows {
        table.push(vec![
            num(r.f),
            num(r.m),
            num(r.d2_norm),
            r.is_w_point.to_string(),
        ]);
    }
    let mut report = Report::new(to_value(&rows), Some(table), Format::Csv);
    report.plot = Some(Plot {
        x: "f",
        y: "d2_norm",
        group: Some("is_w_point"),
    });
    Ok(report)
}

pub fn census(a: &CensusArgs) -> Result<Report, CliError> {
    if a.q < 2 {
        return Err(QStateError::TooFewQubits(a.q).into());
    }
    let n_starts = a.n_starts.unwrap_or(default_starts(a.q));
    if n_starts == 0 {
        return Err(SolveError::NoStarts.into());
    }
    let rep = census_with(
        a.q,
        a.n_states,
        a.seed,
        sampler(a.sampler),
        convention(a.convention),
        n_starts,
    );
    let mut table = Table::new(["class", "count", "fraction"]);
    let fractions: Vec<(String, usize, f64)> = CensusClass::ALL
        .iter()
        .map(|c| {
            (
                format!("{c:?}"),
                rep.counts.get(*c),
                rep.counts.fraction(*c),
            )
        })
        .chain(std::iter::once((
            "Failed".to_string(),
            rep.counts.failed,
            rep.counts.failed as f64 / rep.counts.total().max(1) as f64,
        )))
        .collect();
    for (name, count, frac) in &fractions {
        table.push(vec![name.clone(), count.to_string(), num(*frac)]);
    }
    let mut json = to_value(&rep);
    json["fractions"] = fractions
        .iter()
        .map(|(name, _, frac)| (name.clone(), Value::from(*frac)))
        .collect::<serde_json::Map<_, _>>()
        .into();
    Ok(Report::new(json, Some(table), Format::Json))
}

#[derive(Debug, Serialize)]
struct GapRow {
    index: usize,
    f: FVector,
    gap: f64,
}

pub fn oracle_check(a: &OracleArgs) -> Result<Report, CliError> {
    if a.q < 2 {
        return Err(QStateError::TooFewQubits(a.q).into());
    }
    if a.q > MAX_ORACLE_QUBITS {
        return Err(OracleError::TooLarge { q: a.q }.into());
    }
    let n_starts = a.n_starts.unwrap_or(default_starts(a.q));
    let targets: Vec<FVector> = if a.dicke {
        (0..=a.q)
            .map(|p| FVector::dicke(a.q, p))
            .collect::<Result<_, _>>()?
    } else {
        (0..a.n_states as u64)
            .map(|i| ensemble_member(a.q, a.seed, i, sampler(a.sampler), convention(a.convention)))
            .collect()
    };
    let rows: Vec<GapRow> = targets
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            let gap = symmetric_gap(&f, n_starts, mix_seed(a.seed, i as u64))?;
            Ok(GapRow { index: i, f, gap })
        })
        .collect::<Result<_, OracleError>>()?;

    let max_gap = rows.iter().map(|r| r.gap).fold(0.0f64, f64::max);
    let mean_gap = rows.iter().map(|r| r.gap).sum::<f64>() / rows.len().max(1) as f64;
    let passed = max_gap <= a.max_gap;

    let mut table = Table::new(
        ["index", "gap"]
            .into_iter()
            .map(String::from)
            .chain(f_columns(a.q)),
    );
    for r in &rows {
        let mut row = vec![r.index.to_string(), num(r.gap)];
        row.extend(r.f.coeffs().iter().map(|x| num(*x)));
        table.push(row);
    }
    let json = serde_json::json!({
        "n_checked": rows.len(),
        "max_gap": max_gap,
        "mean_gap": mean_gap,
        "threshold": a.max_gap,
        "passed": passed,
        "rows": rows,
    });
    let mut report = Report::new(json, Some(table), Format::Json);
    report.notes.push(format!(
        "oracle-check: max gap {} (threshold {}), mean gap {}",
        num(max_gap),
        num(a.max_gap),
        num(mean_gap)
    ));
    if !passed {
        report.exit = ExitCode::from(4);
    }
    Ok(report)
}
