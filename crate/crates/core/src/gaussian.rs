//! State parameters, the parametric-amplifier Hamiltonian coefficients that
//! prepare a given displaced-squeezed thermal state, and the displaced
//! amplitude `A(τ)` of the evolved annihilation operator.
//!
//! Units: ħ = 1. Only the products `Ωτ` and `τ/t` are observable, so the
//! preparation time `t` is carried along but never changes an output.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{cosh_m1, coth};

pub type ComplexAmplitude = Complex64;

/// Squeeze magnitudes at or below this are treated as `r = 0`.
pub const R_EPS: f64 = 1e-8;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Which closed form to use for the displaced amplitude `A(τ)`.
///
/// `Exact` is the Heisenberg-picture solution: the conjugate term is
/// `-i α* e^{iχ} sinh(Ωτ)`, i.e. `-α* e^{iθ} sinh(Ωτ)` after the
/// preparation phase link `e^{iθ} = i e^{iχ}`. It agrees with brute-force
/// Fock-space evolution.
///
/// `Legacy` writes that term as `-i α* e^{iθ} sinh(Ωτ)`. This is the algebra
/// behind the widely quoted figure checkpoints for these states (for example
/// the minimum at `Ωτ = 0.0300` for `n̄ = 0.1, r = 0.3, |α| = 0.8`), so it is
/// kept to regenerate them. It does not describe the Hamiltonian dynamics
/// for `τ > 0`. Both forms coincide at `τ = 0`, for `α = 0`, and as `r → 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmplitudeForm {
    #[default]
    Exact,
    Legacy,
}

impl AmplitudeForm {
    /// Coefficient of `e^{i(θ-2φ)} sinh(Ωτ)` in `A(τ)/α` coming from the
    /// conjugate term plus the `sinh` part of `α(τ)/α`.
    pub(crate) fn conjugate_sinh_coefficient(self) -> Complex64 {
        match self {
            AmplitudeForm::Exact => Complex64::new(-0.5, 0.0),
            AmplitudeForm::Legacy => Complex64::new(0.5, -1.0),
        }
    }
}

impl std::str::FromStr for AmplitudeForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(AmplitudeForm::Exact),
            "legacy" => Ok(AmplitudeForm::Legacy),
            other => Err(Error::InvalidParameter(format!(
                "unknown amplitude form {other:?} (expected exact or legacy)"
            ))),
        }
    }
}

/// Reduce a phase to `[0, 2π)`.
pub fn reduce_phase(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if y >= TAU {
        0.0
    } else {
        y
    }
}

/// Parameters of a displaced-squeezed thermal state `D(α) S(ξ) ρ_th S(-ξ) D(-α)`
/// together with the time `t` the amplifier needs to prepare it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    nbar: f64,
    r: f64,
    theta: f64,
    alpha_mag: f64,
    phi: f64,
    prep_time: f64,
}

impl GaussianParams {
    pub fn new(nbar: f64, r: f64, theta: f64, alpha_mag: f64, phi: f64, prep_time: f64) -> Result<Self> {
        let finite = [nbar, r, theta, alpha_mag, phi, prep_time].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("all parameters must be finite".into()));
        }
        if nbar < 0.0 {
            return Err(Error::InvalidParameter(format!("nbar = {nbar} must be >= 0")));
        }
        if r < 0.0 {
            return Err(Error::InvalidParameter(format!("r = {r} must be >= 0")));
        }
        if alpha_mag < 0.0 {
            return Err(Error::InvalidParameter(format!("|alpha| = {alpha_mag} must be >= 0")));
        }
        if prep_time <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "preparation time t = {prep_time} must be > 0"
            )));
        }
        let phi = if alpha_mag == 0.0 { 0.0 } else { reduce_phase(phi) };
        Ok(GaussianParams {
            nbar,
            r,
            theta: reduce_phase(theta),
            alpha_mag,
            phi,
            prep_time,
        })
    }

    /// `φ = 0`, `θ = offset`, `t = 1`. Every coherence output depends on the
    /// phases only through `θ - 2φ`, so this covers the whole family.
    pub fn with_phase_offset(nbar: f64, r: f64, alpha_mag: f64, offset: f64) -> Result<Self> {
        Self::new(nbar, r, offset, alpha_mag, 0.0, 1.0)
    }

    /// Amplitude-quadrature squeezing, `θ = 2φ`.
    pub fn amplitude_squeezed(nbar: f64, r: f64, alpha_mag: f64) -> Result<Self> {
        Self::with_phase_offset(nbar, r, alpha_mag, 0.0)
    }

    pub fn with_prep_time(self, prep_time: f64) -> Result<Self> {
        Self::new(self.nbar, self.r, self.theta, self.alpha_mag, self.phi, prep_time)
    }

    pub fn with_alpha_mag(self, alpha_mag: f64) -> Result<Self> {
        Self::new(self.nbar, self.r, self.theta, alpha_mag, self.phi, self.prep_time)
    }

    pub fn with_r(self, r: f64) -> Result<Self> {
        Self::new(self.nbar, r, self.theta, self.alpha_mag, self.phi, self.prep_time)
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn alpha_mag(&self) -> f64 {
        self.alpha_mag
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn prep_time(&self) -> f64 {
        self.prep_time
    }

    pub fn alpha(&self) -> ComplexAmplitude {
        Complex64::from_polar(self.alpha_mag, self.phi)
    }

    pub fn xi(&self) -> ComplexAmplitude {
        Complex64::from_polar(self.r, self.theta)
    }

    /// `θ - 2φ` reduced to `[0, 2π)`.
    pub fn phase_offset(&self) -> f64 {
        reduce_phase(self.theta - 2.0 * self.phi)
    }

    /// `Ω = r/t`.
    pub fn omega(&self) -> f64 {
        self.r / self.prep_time
    }

    pub(crate) fn require_squeezed(&self) -> Result<()> {
        if self.r <= R_EPS {
            Err(Error::DegenerateSqueeze { r: self.r, cutoff: R_EPS })
        } else {
            Ok(())
        }
    }
}

/// Coefficients of `H = c a†² + c* a² + b a + b* a†`, stored as `t·c` and
/// `t·b` (ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpaParams {
    pub tc: Complex64,
    pub tb: Complex64,
    /// `arg c`
    pub chi: f64,
    /// `Ω = 2|c|`
    pub omega: f64,
    pub prep_time: f64,
}

impl DpaParams {
    pub fn c(&self) -> Complex64 {
        self.tc / self.prep_time
    }

    pub fn b(&self) -> Complex64 {
        self.tb / self.prep_time
    }
}

/// Hamiltonian coefficients whose evolution over `t` maps the thermal state
/// onto `g`.
pub fn invert_to_dpa(g: &GaussianParams) -> Result<DpaParams> {
    g.require_squeezed()?;
    let r = g.r;
    let e_theta = Complex64::from_polar(1.0, g.theta);
    let alpha = g.alpha();
    let tc = -0.5 * I * r * e_theta;
    let tb = -0.5 * I * (alpha * e_theta.conj() + alpha.conj() * coth(0.5 * r)) * r;
    Ok(DpaParams {
        tc,
        tb,
        // e^{iθ} = i e^{iχ}
        chi: reduce_phase(g.theta - 0.5 * PI),
        omega: r / g.prep_time,
        prep_time: g.prep_time,
    })
}

/// `ξ(τ) = 2icτ`.
pub fn xi_of_tau(d: &DpaParams, tau: f64) -> ComplexAmplitude {
    2.0 * I * d.c() * tau
}

/// Inhomogeneous part of the Heisenberg solution for `a(τ)`.
pub fn alpha_of_tau(d: &DpaParams, tau: f64) -> ComplexAmplitude {
    if tau == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let b = d.b();
    let two_abs_c = 2.0 * d.c().norm();
    if two_abs_c == 0.0 {
        // c = 0: a(τ) = a - i b* τ
        return -I * b.conj() * tau;
    }
    let x = d.omega * tau;
    -I * b.conj() * x.sinh() / two_abs_c + b * Complex64::from_polar(1.0, d.chi) * cosh_m1(x) / two_abs_c
}

/// `A(τ)`, the c-number part of `a(τ)` in the displaced-squeezed frame, at
/// lag `Ωτ = omega_tau`.
pub fn displaced_amplitude(g: &GaussianParams, omega_tau: f64, form: AmplitudeForm) -> Result<ComplexAmplitude> {
    check_lag(omega_tau)?;
    let alpha = g.alpha();
    if omega_tau == 0.0 {
        return Ok(alpha);
    }
    let d = invert_to_dpa(g)?;
    let tau = omega_tau / d.omega;
    let rotation = match form {
        AmplitudeForm::Exact => Complex64::from_polar(1.0, d.chi),
        AmplitudeForm::Legacy => Complex64::from_polar(1.0, g.theta),
    };
    Ok(alpha * omega_tau.cosh() - I * alpha.conj() * rotation * omega_tau.sinh() + alpha_of_tau(&d, tau))
}

/// `A(τ)/α` written in terms of `r`, `Ωτ` and `θ - 2φ` only, given
/// `cosh`, `sinh` and `cosh - 1` of the lag (possibly all rescaled by the
/// same factor).
pub(crate) fn amplitude_ratio(
    cosh: f64,
    sinh: f64,
    cosh_minus_one: f64,
    coth_half_r: f64,
    offset: f64,
    form: AmplitudeForm,
) -> Complex64 {
    let rotated = Complex64::from_polar(1.0, offset);
    let direct = cosh + 0.5 * coth_half_r * sinh - 0.5 * cosh_minus_one;
    let conjugate = form.conjugate_sinh_coefficient() * sinh - 0.5 * coth_half_r * cosh_minus_one;
    direct + rotated * conjugate
}

/// `|A(τ)|²` from the phase-reduced closed form.
pub fn abs_a_squared(g: &GaussianParams, omega_tau: f64, form: AmplitudeForm) -> Result<f64> {
    check_lag(omega_tau)?;
    g.require_squeezed()?;
    let w = amplitude_ratio(
        omega_tau.cosh(),
        omega_tau.sinh(),
        cosh_m1(omega_tau),
        coth(0.5 * g.r),
        g.phase_offset(),
        form,
    );
    Ok(g.alpha_mag * g.alpha_mag * w.norm_sqr())
}

/// Invert to the amplifier, run it for the preparation time and read the
/// state parameters back off `ξ(t)` and `α(t)`.
pub fn round_trip(g: &GaussianParams) -> Result<GaussianParams> {
    let d = invert_to_dpa(g)?;
    let xi = xi_of_tau(&d, d.prep_time);
    let alpha = alpha_of_tau(&d, d.prep_time);
    GaussianParams::new(g.nbar, xi.norm(), xi.arg(), alpha.norm(), alpha.arg(), d.prep_time)
}

pub(crate) fn check_lag(omega_tau: f64) -> Result<()> {
    if omega_tau.is_finite() && omega_tau >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("lag Ωτ = {omega_tau} must be finite and >= 0")))
    }
}
