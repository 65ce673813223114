mod args;
mod figures;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use g2lab::analysis::{self, Inequality, RegimeReport};
use g2lab::coherence::{self, CoherencePoint};
use g2lab::fock;
use g2lab::numerics::linspace;
use g2lab::AmplitudeForm;
use serde_json::json;

use args::{Axis, Cli, Command, Format, LagArgs, OutputArgs, StateArgs};
use output::{emit, pretty, Cell, Table};

/// Relative deviation accepted by `oracle-check`.
const ORACLE_TOLERANCE: f64 = 1e-6;

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Truncation(String),
    Numerical(String),
    Io(String),
    CheckFailed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Truncation(_) => 3,
            CliError::Numerical(_) | CliError::Io(_) | CliError::CheckFailed(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Truncation(m) => write!(f, "oracle unavailable: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::CheckFailed(m) => write!(f, "{m}"),
        }
    }
}

impl From<g2lab::Error> for CliError {
    fn from(e: g2lab::Error) -> Self {
        use g2lab::Error as E;
        match e {
            E::TruncationError { .. } | E::OutsideEnvelope(_) => CliError::Truncation(e.to_string()),
            E::EigenFailure(_) | E::NegativeDiscriminant(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

fn point_table(points: &[CoherencePoint]) -> Table {
    let mut t = Table::new(vec!["omega_tau", "tau_over_t", "g2", "mean_n"]);
    for p in points {
        t.push(vec![p.omega_tau.into(), p.tau_over_t.into(), p.g2.into(), p.mean_n.into()]);
    }
    t
}

fn write_table(table: &Table, out: &OutputArgs) -> Result<(), CliError> {
    emit(&table.render(out.format), out.output.as_deref())
}

/// g² at one lag. With `r = 0` only `τ/t` is meaningful.
fn evaluate(state: &StateArgs, omega_tau: Option<f64>, tau_over_t: Option<f64>) -> Result<CoherencePoint, CliError> {
    let g = state.params()?;
    if state.is_unsqueezed() {
        let tt = tau_over_t.ok_or_else(|| {
            CliError::Invalid("r = 0 has no Ωτ axis (Ω = r/t vanishes); use --tau-over-t".into())
        })?;
        return Ok(coherence::g2_displaced_thermal(g.nbar(), g.alpha_mag(), tt)?);
    }
    let x = match (omega_tau, tau_over_t) {
        (Some(x), _) => x,
        (None, Some(tt)) => g.r() * tt,
        (None, None) => return Err(CliError::Invalid("a lag is required".into())),
    };
    Ok(coherence::g2(&g, x, state.form.into())?)
}

fn cmd_eval(state: &StateArgs, lag: &LagArgs, out: &OutputArgs) -> Result<(), CliError> {
    let p = evaluate(state, lag.omega_tau, lag.tau_over_t)?;
    match out.format {
        Format::Csv => write_table(&point_table(&[p]), out),
        Format::Json => emit(&pretty(&point_table(&[p]).to_json()[0]), out.output.as_deref()),
    }
}

fn cmd_sweep(state: &StateArgs, axis: Axis, start: f64, stop: f64, points: usize, out: &OutputArgs) -> Result<(), CliError> {
    if points < 2 {
        return Err(CliError::Invalid(format!("--points = {points} must be at least 2")));
    }
    if !(start >= 0.0 && stop > start && stop.is_finite()) {
        return Err(CliError::Invalid(format!("need 0 <= start < stop, got {start}..{stop}")));
    }
    if state.is_unsqueezed() && axis == Axis::OmegaTau {
        return Err(CliError::Invalid("r = 0 sweeps need --axis tau-over-t".into()));
    }
    let rows = linspace(start, stop, points)
        .into_iter()
        .map(|v| match axis {
            Axis::OmegaTau => evaluate(state, Some(v), None),
            Axis::TauOverT => evaluate(state, None, Some(v)),
        })
        .collect::<Result<Vec<_>, _>>()?;
    write_table(&point_table(&rows), out)
}

fn sidecar_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    csv.with_file_name(format!("{stem}.checkpoints.json"))
}

fn cmd_figure(id: args::FigureId, form: AmplitudeForm, out: &OutputArgs) -> Result<(), CliError> {
    let fig = figures::build(id, form)?;
    let sidecar = pretty(&fig.sidecar(id, form));
    write_table(&fig.table, out)?;
    match &out.output {
        Some(path) => emit(&sidecar, Some(&sidecar_path(path)))?,
        None => eprint!("{sidecar}"),
    }
    if fig.all_pass() {
        Ok(())
    } else {
        let failed: Vec<_> = fig.checkpoints.iter().filter(|c| !c.pass).map(|c| c.name).collect();
        Err(CliError::CheckFailed(format!("checkpoints outside caption tolerance: {}", failed.join(", "))))
    }
}

fn inequality_name(i: Inequality) -> &'static str {
    match i {
        Inequality::NoAntibunching => "violation_no_antibunching",
        Inequality::NeverFartherFromUnity => "violation_never_farther_from_unity",
    }
}

fn regime_table(rep: &RegimeReport) -> Table {
    let mut t = Table::new(vec!["record", "lag_lo", "lag_hi", "g2"]);
    let nan = f64::NAN;
    t.push(vec!["g2_zero".into(), 0.0.into(), 0.0.into(), rep.g2_zero.into()]);
    t.push(vec!["sub_poissonian".into(), 0.0.into(), 0.0.into(), Cell::Bool(rep.sub_poissonian)]);
    if let Some((x, v)) = rep.minimum {
        t.push(vec!["minimum".into(), x.into(), x.into(), v.into()]);
    }
    for &x in &rep.crossings_g2zero {
        t.push(vec!["crossing_g2zero".into(), x.into(), x.into(), rep.g2_zero.into()]);
    }
    for &x in &rep.crossings_mirror {
        t.push(vec!["crossing_mirror".into(), x.into(), x.into(), (2.0 - rep.g2_zero).into()]);
    }
    for v in &rep.violation_intervals {
        t.push(vec![inequality_name(v.inequality).into(), v.lo.into(), v.hi.into(), nan.into()]);
    }
    t.push(vec!["asymptote".into(), f64::INFINITY.into(), f64::INFINITY.into(), rep.asymptote.into()]);
    t
}

fn cmd_classify(state: &StateArgs, max_lag: f64, grid: usize, out: &OutputArgs) -> Result<(), CliError> {
    let g = state.params()?;
    let rep = if state.is_unsqueezed() {
        analysis::classify_displaced_thermal_with_grid(g.nbar(), g.alpha_mag(), max_lag, grid)?
    } else {
        analysis::classify(&g, max_lag, grid, state.form.into())?
    };
    match out.format {
        Format::Csv => write_table(&regime_table(&rep), out),
        Format::Json => {
            let mut v = serde_json::to_value(&rep).map_err(|e| CliError::Numerical(e.to_string()))?;
            v["classical"] = json!(rep.is_classical());
            emit(&pretty(&v), out.output.as_deref())
        }
    }
}

fn cmd_optimize(nbar: f64, r: f64, omega_tau: f64, form: AmplitudeForm, out: &OutputArgs) -> Result<(), CliError> {
    let opt = analysis::minimize_over_alpha(nbar, r, omega_tau, form)?;
    let mut t = Table::new(vec!["nbar", "r", "omega_tau", "alpha_mag", "g2_min", "branch_valid"]);
    t.push(vec![
        nbar.into(),
        r.into(),
        omega_tau.into(),
        opt.alpha_mag.into(),
        opt.g2_min.into(),
        opt.branch_valid.into(),
    ]);
    match out.format {
        Format::Csv => write_table(&t, out),
        Format::Json => emit(&pretty(&t.to_json()[0]), out.output.as_deref()),
    }
}

fn cmd_oracle_check(state: &StateArgs, omega_tau: f64, dim_max: Option<usize>, out: &OutputArgs) -> Result<(), CliError> {
    let g = state.params()?;
    fock::ENVELOPE.check(&g, omega_tau)?;
    let closed = coherence::g2(&g, omega_tau, AmplitudeForm::Exact)?.g2;
    let dim_max = dim_max.unwrap_or_else(fock::dim_max_from_env);
    let oracle = fock::g2_oracle(&g, omega_tau, dim_max)?;
    let abs_dev = (closed - oracle.g2).abs();
    let rel_dev = abs_dev / closed.abs();
    let pass = rel_dev <= ORACLE_TOLERANCE;
    let mut t = Table::new(vec!["omega_tau", "g2_closed", "g2_oracle", "abs_deviation", "rel_deviation", "dim", "tail", "pass"]);
    t.push(vec![
        omega_tau.into(),
        closed.into(),
        oracle.g2.into(),
        abs_dev.into(),
        rel_dev.into(),
        oracle.dim.into(),
        oracle.tail.into(),
        pass.into(),
    ]);
    match out.format {
        Format::Csv => write_table(&t, out)?,
        Format::Json => emit(&pretty(&t.to_json()[0]), out.output.as_deref())?,
    }
    if pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!("relative deviation {rel_dev:e} exceeds {ORACLE_TOLERANCE:e}")))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Eval { state, lag, out } => cmd_eval(&state, &lag, &out),
        Command::Sweep { state, axis, start, stop, points, out } => cmd_sweep(&state, axis, start, stop, points, &out),
        Command::Figure { id, form, out } => cmd_figure(id, form.into(), &out),
        Command::Classify { state, max_lag, grid, out } => cmd_classify(&state, max_lag, grid, &out),
        Command::OptimizeAlpha { nbar, r, omega_tau, form, out } => cmd_optimize(nbar, r, omega_tau, form.into(), &out),
        Command::OracleCheck { state, omega_tau, dim_max, out } => cmd_oracle_check(&state, omega_tau, dim_max, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("g2lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
