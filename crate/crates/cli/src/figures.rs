//! Curves and caption checkpoints for the five published figures.

use g2lab::analysis::{classify, Inequality, RegimeReport, DEFAULT_GRID};
use g2lab::coherence::{g2, g2_asymptote, g2_displaced_thermal};
use g2lab::numerics::linspace;
use g2lab::{AmplitudeForm, GaussianParams};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::FigureId;
use crate::output::{Cell, Table};
use crate::CliError;

pub const POINTS: usize = 1000;

#[derive(Debug, Clone, Serialize)]
pub struct Checkpoint {
    pub name: &'static str,
    pub value: Option<f64>,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Checkpoint {
    fn new(name: &'static str, value: Option<f64>, expected: f64, tolerance: f64) -> Self {
        let pass = value.is_some_and(|v| (v - expected).abs() <= tolerance);
        Checkpoint { name, value, expected, tolerance, pass }
    }
}

pub struct Figure {
    pub table: Table,
    pub checkpoints: Vec<Checkpoint>,
    pub parameters: Value,
}

impl Figure {
    pub fn all_pass(&self) -> bool {
        self.checkpoints.iter().all(|c| c.pass)
    }

    pub fn sidecar(&self, id: FigureId, form: AmplitudeForm) -> Value {
        json!({
            "figure": format!("{id:?}").to_lowercase(),
            "amplitude_form": form,
            "parameters": self.parameters,
            "checkpoints": self.checkpoints,
            "all_pass": self.all_pass(),
        })
    }
}

fn state(nbar: f64, r: f64, alpha: f64) -> Result<GaussianParams, CliError> {
    Ok(GaussianParams::amplitude_squeezed(nbar, r, alpha)?)
}

fn single_curve(g: &GaussianParams, max: f64, form: AmplitudeForm) -> Result<Table, CliError> {
    let mut table = Table::new(vec!["axis_value", "g2"]);
    for x in linspace(0.0, max, POINTS) {
        table.push(vec![x.into(), g2(g, x, form)?.g2.into()]);
    }
    Ok(table)
}

/// Red: displaced thermal on τ/t. Blue: the squeezed state on τ/t = Ωτ/r.
fn paired_curves(nbar: f64, alpha: f64, blue: &GaussianParams, form: AmplitudeForm) -> Result<Table, CliError> {
    let mut table = Table::new(vec!["axis_value", "g2_red", "g2_blue"]);
    for tt in linspace(0.0, 10.0, POINTS) {
        let red = g2_displaced_thermal(nbar, alpha, tt)?.g2;
        let b = g2(blue, blue.r() * tt, form)?.g2;
        table.push(vec![Cell::Num(tt), red.into(), b.into()]);
    }
    Ok(table)
}

fn minimum_lag(rep: &RegimeReport) -> Option<f64> {
    rep.minimum.map(|(x, _)| x)
}

fn params_json(nbar: f64, r: f64, alpha: f64) -> Value {
    json!({ "nbar": nbar, "r": r, "alpha_mag": alpha, "theta_minus_2phi": 0.0 })
}

pub fn build(id: FigureId, form: AmplitudeForm) -> Result<Figure, CliError> {
    let c = Checkpoint::new;
    match id {
        FigureId::Fig1 => {
            let g = state(0.1, 0.3, 0.8)?;
            let rep = classify(&g, 3.0, DEFAULT_GRID, form)?;
            Ok(Figure {
                table: single_curve(&g, 3.0, form)?,
                checkpoints: vec![
                    c("g2_zero", Some(rep.g2_zero), 0.961, 1e-3),
                    c("min_omega_tau", minimum_lag(&rep), 0.0300, 5e-4),
                    c("crossing_g2zero_omega_tau", rep.crossings_g2zero.first().copied(), 0.0674, 5e-4),
                    c("crossing_mirror_omega_tau", rep.crossings_mirror.first().copied(), 0.593, 5e-3),
                    c("asymptote", Some(rep.asymptote), 1.238, 1e-3),
                ],
                parameters: params_json(0.1, 0.3, 0.8),
            })
        }
        FigureId::Fig2 => {
            let g = state(0.0, 0.3, 0.4)?;
            let rep = classify(&g, 5.0, DEFAULT_GRID, form)?;
            Ok(Figure {
                table: single_curve(&g, 5.0, form)?,
                checkpoints: vec![
                    c("g2_zero", Some(rep.g2_zero), 1.590, 2e-3),
                    c("min_omega_tau", minimum_lag(&rep), 0.264, 2e-3),
                    c("min_g2", rep.minimum.map(|(_, v)| v), 1.211, 2e-3),
                    c("crossing_g2zero_omega_tau", rep.crossings_g2zero.last().copied(), 3.113, 1e-2),
                    c("asymptote", Some(rep.asymptote), 1.624, 2e-3),
                ],
                parameters: params_json(0.0, 0.3, 0.4),
            })
        }
        FigureId::Fig3 => {
            let blue = state(1.0, 0.3, 1.0)?;
            Ok(Figure {
                table: paired_curves(1.0, 1.0, &blue, form)?,
                checkpoints: vec![
                    c("red_g2_zero", Some(g2_displaced_thermal(1.0, 1.0, 0.0)?.g2), 1.750, 1e-3),
                    c("blue_g2_zero", Some(g2(&blue, 0.0, form)?.g2), 1.615, 1e-3),
                    c("blue_asymptote", Some(g2_asymptote(&blue, form)?), 1.586, 1e-3),
                ],
                parameters: json!({ "red": params_json(1.0, 0.0, 1.0), "blue": params_json(1.0, 0.3, 1.0) }),
            })
        }
        FigureId::Fig4 => {
            let blue = state(0.1, 0.3, 0.8)?;
            let rep = classify(&blue, 3.0, DEFAULT_GRID, form)?;
            let r = blue.r();
            let per_r = |x: Option<f64>| x.map(|v| v / r);
            Ok(Figure {
                table: paired_curves(0.1, 0.8, &blue, form)?,
                checkpoints: vec![
                    c("red_g2_zero", Some(g2_displaced_thermal(0.1, 0.8, 0.0)?.g2), 1.252, 1e-3),
                    c("blue_g2_zero", Some(rep.g2_zero), 0.961, 1e-3),
                    c("blue_asymptote", Some(rep.asymptote), 1.238, 1e-3),
                    c("blue_min_tau_over_t", per_r(minimum_lag(&rep)), 0.1002, 1e-3),
                    c("blue_tau0_over_t", per_r(rep.crossings_g2zero.first().copied()), 0.2249, 1e-3),
                    c("blue_tau1_over_t", per_r(rep.crossings_mirror.first().copied()), 1.978, 1e-2),
                ],
                parameters: json!({ "red": params_json(0.1, 0.0, 0.8), "blue": params_json(0.1, 0.3, 0.8) }),
            })
        }
        FigureId::Fig5 => {
            let g = state(1.0, 0.2, 0.0)?;
            let rep = classify(&g, 3.0, DEFAULT_GRID, form)?;
            let violation_end = |which| {
                let v: Vec<_> = rep.violations_of(which).collect();
                (v.len() == 1 && v[0].lo == 0.0).then(|| v[0].hi)
            };
            Ok(Figure {
                table: single_curve(&g, 3.0, form)?,
                checkpoints: vec![
                    c("g2_zero", Some(rep.g2_zero), 2.301, 2e-3),
                    c("crossing_g2zero_omega_tau", rep.crossings_g2zero.first().copied(), 0.794, 5e-3),
                    c("asymptote", Some(rep.asymptote), 2.203, 2e-3),
                    c("no_antibunching_violation_end", violation_end(Inequality::NoAntibunching), 0.794, 5e-3),
                    c(
                        "never_farther_violation_end",
                        violation_end(Inequality::NeverFartherFromUnity),
                        0.794,
                        5e-3,
                    ),
                ],
                parameters: params_json(1.0, 0.2, 0.0),
            })
        }
    }
}
