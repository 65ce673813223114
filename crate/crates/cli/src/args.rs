use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use g2lab::{AmplitudeForm, GaussianParams};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "g2lab", version, about = "Second-order coherence of displaced-squeezed thermal light")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate g² at a single lag
    #[command(allow_negative_numbers = true)]
    Eval {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        lag: LagArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Evaluate g² on an evenly spaced grid of lags
    #[command(allow_negative_numbers = true)]
    Sweep {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, value_enum, default_value_t = Axis::OmegaTau)]
        axis: Axis,
        #[arg(long, default_value_t = 0.0)]
        start: f64,
        #[arg(long)]
        stop: f64,
        #[arg(long, default_value_t = 1000)]
        points: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Reproduce a figure: curve CSV plus a checkpoints JSON sidecar
    Figure {
        #[arg(value_enum)]
        id: FigureId,
        #[arg(long, value_enum, default_value_t = FormArg::Legacy)]
        form: FormArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Locate minima, crossings and classical-inequality violations
    #[command(allow_negative_numbers = true)]
    Classify {
        #[command(flatten)]
        state: StateArgs,
        /// Scan range in Ωτ, or in τ/t when r = 0
        #[arg(long, default_value_t = 3.0)]
        max_lag: f64,
        #[arg(long, default_value_t = g2lab::analysis::DEFAULT_GRID)]
        grid: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Displacement that minimises g² for amplitude squeezing
    #[command(allow_negative_numbers = true)]
    OptimizeAlpha {
        #[arg(long)]
        nbar: f64,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 0.0)]
        omega_tau: f64,
        #[arg(long, value_enum, default_value_t = FormArg::Exact)]
        form: FormArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare the closed form against the truncated Fock-space evaluation
    #[command(allow_negative_numbers = true)]
    OracleCheck {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        omega_tau: f64,
        /// Truncation cap; defaults to G2LAB_ORACLE_DIM_MAX or 1024
        #[arg(long)]
        dim_max: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// Thermal photon number n̄
    #[arg(long)]
    pub nbar: f64,
    /// Squeeze magnitude r
    #[arg(long)]
    pub r: f64,
    /// Displacement magnitude |α|
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// θ − 2φ; the only phase g² depends on
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["theta", "phi"])]
    pub theta_minus_2phi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Preparation time t
    #[arg(long, default_value_t = 1.0)]
    pub prep_time: f64,
    #[arg(long, value_enum, default_value_t = FormArg::Exact)]
    pub form: FormArg,
}

impl StateArgs {
    pub fn params(&self) -> Result<GaussianParams, CliError> {
        let (theta, phi) = match self.theta_minus_2phi {
            Some(offset) => (offset, 0.0),
            None => (self.theta.unwrap_or(0.0), self.phi.unwrap_or(0.0)),
        };
        Ok(GaussianParams::new(self.nbar, self.r, theta, self.alpha, phi, self.prep_time)?)
    }

    pub fn is_unsqueezed(&self) -> bool {
        self.r <= g2lab::gaussian::R_EPS
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct LagArgs {
    #[arg(long)]
    pub omega_tau: Option<f64>,
    #[arg(long)]
    pub tau_over_t: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    OmegaTau,
    TauOverT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Exact,
    Legacy,
}

impl From<FormArg> for AmplitudeForm {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Exact => AmplitudeForm::Exact,
            FormArg::Legacy => AmplitudeForm::Legacy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}
