//! Closed-form evaluators for the photon number and the second-order
//! coherence `g²(τ)` of displaced-squeezed thermal states evolving under the
//! preparing amplifier, plus the `r = 0` and `α = 0` limits.
//!
//! All lags are dimensionless: `Ωτ` for squeezed states, `τ/t` on the
//! `r = 0` route where `Ω` vanishes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{amplitude_ratio, check_lag, displaced_amplitude, AmplitudeForm, GaussianParams};
use crate::numerics::{cosh_m1, coth};

/// Above this value of `Ωτ + 2r` the hyperbolic factors are divided out
/// before evaluation (`cosh` overflows near 710).
pub const SCALED_ABOVE: f64 = 300.0;

/// Squeeze used by the large-`r` probe.
pub const LARGE_R_PROBE: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherencePoint {
    pub omega_tau: f64,
    pub tau_over_t: f64,
    pub g2: f64,
    pub mean_n: f64,
}

/// `n(τ)`, `s(τ)`, `u(τ)`, `v(τ)` and the mixed term `u n - v s`, the latter
/// both from the complex amplitude and from the phase-reduced expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicHelpers {
    pub n_tau: f64,
    pub s_tau: f64,
    pub u_tau: f64,
    pub v_tau: f64,
    pub un_minus_vs_direct: f64,
    pub un_minus_vs_expanded: f64,
}

fn thermal_correlations(nbar: f64, r: f64, omega_tau: f64) -> (f64, f64) {
    let h = nbar + 0.5;
    let n = nbar + h * cosh_m1(2.0 * r + omega_tau) - 0.5 * cosh_m1(omega_tau);
    let s = h * (2.0 * r + omega_tau).sinh() - 0.5 * omega_tau.sinh();
    (n, s)
}

/// `⟨a†(τ) a(τ)⟩` without the coherent contribution, `(n̄+½)cosh 2(r+Ωτ) - ½`.
fn thermal_number(nbar: f64, r_plus_lag: f64) -> f64 {
    nbar + (nbar + 0.5) * cosh_m1(2.0 * r_plus_lag)
}

/// `(n e^{-Ωτ}, s e^{-Ωτ}, [thermal number at τ] e^{-2Ωτ})`.
fn thermal_correlations_scaled(nbar: f64, r: f64, omega_tau: f64) -> (f64, f64, f64) {
    let h = nbar + 0.5;
    let up = (2.0 * r).exp();
    let down = (-2.0 * r - 2.0 * omega_tau).exp();
    let e2 = (-2.0 * omega_tau).exp();
    let n = 0.5 * h * (up + down) - 0.25 * (1.0 + e2);
    let s = 0.5 * h * (up - down) - 0.25 * (1.0 - e2);
    let number = 0.5 * h * (up + down * e2) - 0.5 * e2;
    (n, s, number)
}

/// `u n - v s` from the phase-reduced closed form, which needs only `|α|`,
/// `r`, `Ωτ` and `θ - 2φ`.
fn mixed_term_expanded(
    alpha_sq: f64,
    n: f64,
    s: f64,
    (unit, cosh, sinh, cosh_minus_one): (f64, f64, f64, f64),
    coth_half_r: f64,
    offset: f64,
    form: AmplitudeForm,
) -> f64 {
    let k = form.conjugate_sinh_coefficient();
    let (sin_d, cos_d) = offset.sin_cos();
    let direct = unit + cosh + coth_half_r * sinh;
    let conjugate = 2.0 * k.re * sinh - coth_half_r * cosh_minus_one;
    alpha_sq
        * (direct * (n - s * cos_d) + conjugate * (n * cos_d - s) - 2.0 * k.im * sinh * n * sin_d)
}

/// Photon number at lag `Ωτ`. At zero lag this is `(n̄+½)cosh 2r - ½ + |α|²`.
pub fn mean_photon_number(g: &GaussianParams, omega_tau: f64, form: AmplitudeForm) -> Result<f64> {
    check_lag(omega_tau)?;
    g.require_squeezed()?;
    let a_sq = crate::gaussian::abs_a_squared(g, omega_tau, form)?;
    Ok(thermal_number(g.nbar(), g.r() + omega_tau) + a_sq)
}

pub fn helpers(g: &GaussianParams, omega_tau: f64, form: AmplitudeForm) -> Result<HyperbolicHelpers> {
    check_lag(omega_tau)?;
    g.require_squeezed()?;
    let (n, s) = thermal_correlations(g.nbar(), g.r(), omega_tau);
    let alpha = g.alpha();
    let amp = displaced_amplitude(g, omega_tau, form)?;
    let e_theta = Complex64::from_polar(1.0, g.theta());
    let u = (alpha * amp.conj() + alpha.conj() * amp).re;
    let v = (alpha * amp * e_theta.conj() + alpha.conj() * amp.conj() * e_theta).re;
    let expanded = mixed_term_expanded(
        g.alpha_mag() * g.alpha_mag(),
        n,
        s,
        (1.0, omega_tau.cosh(), omega_tau.sinh(), cosh_m1(omega_tau)),
        coth(0.5 * g.r()),
        g.phase_offset(),
        form,
    );
    Ok(HyperbolicHelpers {
        n_tau: n,
        s_tau: s,
        u_tau: u,
        v_tau: v,
        un_minus_vs_direct: u * n - v * s,
        un_minus_vs_expanded: expanded,
    })
}

/// Second-order coherence at lag `Ωτ` for a state with `r > 0`.
///
/// For `Ωτ + 2r > SCALED_ABOVE` the evaluation switches to the rescaled
/// form with `e^{Ωτ}` divided out of `n`, `s`, `A` and `e^{2Ωτ}` out of
/// the photon number at `τ`; the reported `mean_n` may then be infinite.
pub fn g2(g: &GaussianParams, omega_tau: f64, form: AmplitudeForm) -> Result<CoherencePoint> {
    check_lag(omega_tau)?;
    g.require_squeezed()?;
    let (nbar, r) = (g.nbar(), g.r());
    let alpha_sq = g.alpha_mag() * g.alpha_mag();
    let n0 = thermal_number(nbar, r) + alpha_sq;
    if !(n0 > 0.0) || !n0.is_finite() {
        return Err(Error::ZeroDenominator("photon number at τ = 0"));
    }
    let tau_over_t = omega_tau / r;

    if omega_tau + 2.0 * r <= SCALED_ABOVE {
        let h = helpers(g, omega_tau, form)?;
        let amp_sq = displaced_amplitude(g, omega_tau, form)?.norm_sqr();
        let nt = thermal_number(nbar, r + omega_tau) + amp_sq;
        let numer = h.n_tau * h.n_tau + h.s_tau * h.s_tau + h.un_minus_vs_direct;
        return Ok(CoherencePoint {
            omega_tau,
            tau_over_t,
            g2: 1.0 + numer / (n0 * nt),
            mean_n: nt,
        });
    }

    let (n, s, number) = thermal_correlations_scaled(nbar, r, omega_tau);
    let decay = (-omega_tau).exp();
    let (c, sh) = (0.5 * (1.0 + decay * decay), 0.5 * (1.0 - decay * decay));
    let cm1 = c - decay;
    let cth = coth(0.5 * r);
    let w = amplitude_ratio(c, sh, cm1, cth, g.phase_offset(), form);
    let nt = number + alpha_sq * w.norm_sqr();
    let mixed = mixed_term_expanded(alpha_sq, n, s, (decay, c, sh, cm1), cth, g.phase_offset(), form);
    let numer = n * n + s * s + mixed;
    Ok(CoherencePoint {
        omega_tau,
        tau_over_t,
        g2: 1.0 + numer / (n0 * nt),
        mean_n: nt * (2.0 * omega_tau).exp(),
    })
}

/// `g²(0)` for any `r ≥ 0`; needs no amplifier coefficients, so it also
/// covers the squeeze cutoff. `offset` is `θ - 2φ`.
pub fn g2_zero_lag(nbar: f64, r: f64, alpha_mag: f64, offset: f64) -> Result<f64> {
    if !(nbar >= 0.0 && r >= 0.0 && alpha_mag >= 0.0) {
        return Err(Error::InvalidParameter("nbar, r and |alpha| must be >= 0".into()));
    }
    let (n, s) = thermal_correlations(nbar, r, 0.0);
    let alpha_sq = alpha_mag * alpha_mag;
    let n0 = n + alpha_sq;
    if !(n0 > 0.0) || !n0.is_finite() {
        return Err(Error::ZeroDenominator("photon number at τ = 0"));
    }
    Ok(1.0 + (n * n + s * s + 2.0 * alpha_sq * (n - s * offset.cos())) / (n0 * n0))
}

/// Photon number on the `r = 0` route, `|α|²(τ/t + 1)² + n̄`.
pub fn mean_photon_number_displaced(nbar: f64, alpha_mag: f64, tau_over_t: f64) -> f64 {
    let grow = tau_over_t + 1.0;
    alpha_mag * alpha_mag * grow * grow + nbar
}

/// `g²` for a displaced thermal state (`r → 0`). The natural lag here is
/// `τ/t`; `omega_tau` in the result is 0 because `Ω = r/t` vanishes.
pub fn g2_displaced_thermal(nbar: f64, alpha_mag: f64, tau_over_t: f64) -> Result<CoherencePoint> {
    if !(nbar >= 0.0 && alpha_mag >= 0.0 && nbar.is_finite() && alpha_mag.is_finite()) {
        return Err(Error::InvalidParameter("nbar and |alpha| must be finite and >= 0".into()));
    }
    if !(tau_over_t >= 0.0 && tau_over_t.is_finite()) {
        return Err(Error::InvalidParameter(format!("τ/t = {tau_over_t} must be finite and >= 0")));
    }
    let alpha_sq = alpha_mag * alpha_mag;
    if alpha_sq + nbar == 0.0 {
        return Err(Error::ZeroDenominator("vacuum has no photons to correlate"));
    }
    let grow = tau_over_t + 1.0;
    let g2 = 1.0
        + nbar / (alpha_sq + nbar) * (2.0 * alpha_sq * grow + nbar) / (alpha_sq * grow * grow + nbar);
    Ok(CoherencePoint {
        omega_tau: 0.0,
        tau_over_t,
        g2,
        mean_n: mean_photon_number_displaced(nbar, alpha_mag, tau_over_t),
    })
}

/// `g²` for a squeezed thermal state (`α = 0`). `r = 0` is allowed when
/// `n̄ > 0`; the lag then cannot advance (`Ω = 0`), and `τ/t` is reported
/// as 0.
pub fn g2_squeezed_thermal(nbar: f64, r: f64, omega_tau: f64) -> Result<CoherencePoint> {
    check_lag(omega_tau)?;
    if !(nbar >= 0.0 && r >= 0.0 && nbar.is_finite() && r.is_finite()) {
        return Err(Error::InvalidParameter("nbar and r must be finite and >= 0".into()));
    }
    if nbar == 0.0 && r == 0.0 {
        return Err(Error::ZeroDenominator("vacuum has no photons to correlate"));
    }
    let n0 = thermal_number(nbar, r);
    let tau_over_t = if r > 0.0 { omega_tau / r } else { 0.0 };
    if omega_tau + 2.0 * r <= SCALED_ABOVE {
        let (n, s) = thermal_correlations(nbar, r, omega_tau);
        let nt = thermal_number(nbar, r + omega_tau);
        return Ok(CoherencePoint {
            omega_tau,
            tau_over_t,
            g2: 1.0 + (n * n + s * s) / (n0 * nt),
            mean_n: nt,
        });
    }
    let (n, s, nt) = thermal_correlations_scaled(nbar, r, omega_tau);
    Ok(CoherencePoint {
        omega_tau,
        tau_over_t,
        g2: 1.0 + (n * n + s * s) / (n0 * nt),
        mean_n: nt * (2.0 * omega_tau).exp(),
    })
}

/// `lim_{Ωτ→∞} g²`, from the leading `e^{Ωτ}` / `e^{2Ωτ}` coefficients.
pub fn g2_asymptote(g: &GaussianParams, form: AmplitudeForm) -> Result<f64> {
    g.require_squeezed()?;
    let (nbar, r) = (g.nbar(), g.r());
    let alpha_sq = g.alpha_mag() * g.alpha_mag();
    let n0 = thermal_number(nbar, r) + alpha_sq;
    // n(τ) and s(τ) share the leading coefficient
    let kappa = 0.25 * ((2.0 * nbar + 1.0) * (2.0 * r).exp() - 1.0);
    let offset = g.phase_offset();
    let w = amplitude_ratio(0.5, 0.5, 0.5, coth(0.5 * r), offset, form);
    let rotated = (w * Complex64::from_polar(1.0, -offset)).re;
    let numer = 2.0 * kappa * kappa + 2.0 * alpha_sq * kappa * (w.re - rotated);
    let denom = n0 * (0.5 * (nbar + 0.5) * (2.0 * r).exp() + alpha_sq * w.norm_sqr());
    Ok(1.0 + numer / denom)
}

/// Largest `|g² - 3|` over `check_points` at `r = LARGE_R_PROBE`.
pub fn g2_large_r_limit(nbar: f64, alpha_mag: f64, check_points: &[f64], form: AmplitudeForm) -> Result<f64> {
    if check_points.is_empty() {
        return Err(Error::InvalidParameter("no check points".into()));
    }
    let g = GaussianParams::amplitude_squeezed(nbar, LARGE_R_PROBE, alpha_mag)?;
    check_points.iter().try_fold(0.0f64, |worst, &x| {
        let p = g2(&g, x, form)?;
        Ok(worst.max((p.g2 - 3.0).abs()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const FORMS: [AmplitudeForm; 2] = [AmplitudeForm::Exact, AmplitudeForm::Legacy];

    fn params(nbar: f64, r: f64, alpha: f64) -> GaussianParams {
        GaussianParams::amplitude_squeezed(nbar, r, alpha).unwrap()
    }

    #[test]
    fn zero_lag_photon_number() {
        let g = params(0.1, 0.3, 0.8);
        let expected = 0.6 * 0.6f64.cosh() - 0.5 + 0.64;
        for form in FORMS {
            let n = mean_photon_number(&g, 0.0, form).unwrap();
            assert!((n - expected).abs() < 1e-14);
        }
        assert!((expected - 0.851_279_130_945_36).abs() < 1e-12);
    }

    #[test]
    fn vacuum_photon_number_vanishes_as_r_shrinks() {
        let g = params(0.0, 1e-6, 0.0);
        let n = mean_photon_number(&g, 0.0, AmplitudeForm::Exact).unwrap();
        assert!(n < 1e-11);
    }

    #[test]
    fn helpers_at_zero_lag() {
        let g = params(0.1, 0.3, 0.8);
        let h = helpers(&g, 0.0, AmplitudeForm::Exact).unwrap();
        assert!((h.n_tau - (0.6 * 0.6f64.cosh() - 0.5)).abs() < 1e-15);
        assert!((h.s_tau - 0.6 * 0.6f64.sinh()).abs() < 1e-15);
        assert!((h.n_tau - 0.211_279_130_945).abs() < 1e-11);
        assert!((h.s_tau - 0.381_992_149_289).abs() < 1e-11);
        assert!((h.u_tau - 2.0 * 0.64).abs() < 1e-14);
        assert!((h.v_tau - 2.0 * 0.64).abs() < 1e-14);
    }

    #[test]
    fn expanded_mixed_term_matches_direct_with_phase_offset() {
        let g = GaussianParams::new(0.4, 0.7, 2.2, 1.3, 0.4, 1.0).unwrap();
        for form in FORMS {
            for x in [0.0, 0.2, 1.0, 2.5] {
                let h = helpers(&g, x, form).unwrap();
                let scale = h.un_minus_vs_direct.abs().max(h.n_tau * h.n_tau);
                assert!(
                    (h.un_minus_vs_direct - h.un_minus_vs_expanded).abs() <= 1e-11 * scale,
                    "{form:?} x={x}: {h:?}"
                );
            }
        }
    }

    #[test]
    fn zero_lag_caption_values() {
        let cases = [((0.1, 0.3, 0.8), 0.961), ((1.0, 0.3, 1.0), 1.615), ((0.0, 0.3, 0.4), 1.590)];
        for ((nbar, r, a), expected) in cases {
            for form in FORMS {
                let p = g2(&params(nbar, r, a), 0.0, form).unwrap();
                assert!((p.g2 - expected).abs() < 1e-3, "{nbar} {r} {a}: {}", p.g2);
            }
        }
    }

    #[test]
    fn displaced_thermal_values() {
        assert!((g2_displaced_thermal(1.0, 1.0, 0.0).unwrap().g2 - 1.75).abs() < 1e-12);
        assert!((g2_displaced_thermal(0.1, 0.8, 0.0).unwrap().g2 - 1.252).abs() < 1e-3);
        for tt in [0.0, 0.5, 7.0] {
            assert_eq!(g2_displaced_thermal(0.0, 1.3, tt).unwrap().g2, 1.0);
        }
        assert!(matches!(g2_displaced_thermal(0.0, 0.0, 1.0), Err(Error::ZeroDenominator(_))));
        let p = g2_displaced_thermal(1.0, 2.0, 3.0).unwrap();
        assert_eq!(p.mean_n, 4.0 * 16.0 + 1.0);
    }

    #[test]
    fn squeezed_thermal_values() {
        let p0 = g2_squeezed_thermal(1.0, 0.2, 0.0).unwrap();
        assert!((p0.g2 - 2.301).abs() < 1e-3, "{}", p0.g2);
        let p1 = g2_squeezed_thermal(1.0, 0.2, 0.794).unwrap();
        assert!((p1.g2 - 2.301).abs() < 2e-3, "{}", p1.g2);
        let thermal = g2_squeezed_thermal(0.7, 1e-9, 0.0).unwrap();
        assert!((thermal.g2 - 2.0).abs() < 1e-8);
        assert!((g2_squeezed_thermal(0.7, 0.0, 0.0).unwrap().g2 - 2.0).abs() < 1e-15);
        assert!(matches!(g2_squeezed_thermal(0.0, 0.0, 0.0), Err(Error::ZeroDenominator(_))));
    }

    #[test]
    fn asymptote_caption_values() {
        let l = AmplitudeForm::Legacy;
        assert!((g2_asymptote(&params(0.1, 0.3, 0.8), l).unwrap() - 1.238).abs() < 1e-3);
        assert!((g2_asymptote(&params(1.0, 0.3, 1.0), l).unwrap() - 1.586).abs() < 1e-3);
        for form in FORMS {
            assert!((g2_asymptote(&params(1.0, 0.2, 0.0), form).unwrap() - 2.203).abs() < 1e-3);
        }
    }

    #[test]
    fn asymptote_matches_far_lag() {
        for form in FORMS {
            for g in [
                params(0.1, 0.3, 0.8),
                params(0.0, 0.3, 0.4),
                GaussianParams::new(0.7, 1.1, 1.0, 2.0, 2.5, 1.0).unwrap(),
            ] {
                let far = g2(&g, 40.0, form).unwrap().g2;
                let lim = g2_asymptote(&g, form).unwrap();
                assert!((far - lim).abs() <= 1e-8, "{form:?} {far} {lim}");
            }
        }
    }

    #[test]
    fn scaled_branch_is_continuous() {
        let g = GaussianParams::new(0.3, 0.5, 0.3, 1.2, 0.1, 1.0).unwrap();
        for form in FORMS {
            let below = g2(&g, SCALED_ABOVE - 1.0 - 1e-9, form).unwrap().g2;
            let above = g2(&g, SCALED_ABOVE - 1.0 + 1e-9, form).unwrap().g2;
            assert!((below - above).abs() < 1e-12, "{below} {above}");
            let huge = g2(&g, 5000.0, form).unwrap();
            assert!(huge.g2.is_finite());
            assert!((huge.g2 - g2_asymptote(&g, form).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn alpha_zero_reduces_to_squeezed_thermal() {
        let g = GaussianParams::new(0.6, 0.45, 1.7, 0.0, 0.0, 1.0).unwrap();
        for form in FORMS {
            for x in [0.0, 0.3, 1.0, 4.0, 20.0] {
                let a = g2(&g, x, form).unwrap().g2;
                let b = g2_squeezed_thermal(0.6, 0.45, x).unwrap().g2;
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn large_squeezing_tends_to_three() {
        for form in FORMS {
            assert!(g2_large_r_limit(0.1, 0.8, &[0.0, 1.0, 5.0], form).unwrap() < 1e-3);
            assert!(g2_large_r_limit(0.0, 0.0, &[0.0, 1.0, 5.0], form).unwrap() < 1e-3);
        }
        assert!(g2_large_r_limit(0.1, 0.8, &[], AmplitudeForm::Exact).is_err());
    }

    #[test]
    fn large_displacement_tends_to_one() {
        let g = params(0.1, 0.3, 1e3);
        for form in FORMS {
            for x in [0.0, 1.0, 5.0] {
                assert!((g2(&g, x, form).unwrap().g2 - 1.0).abs() < 1e-2);
            }
        }
    }

    #[test]
    fn photon_number_grows_with_lag() {
        let g = GaussianParams::new(0.2, 0.3, PI / 3.0, 0.9, 0.2, 1.0).unwrap();
        let mut last = mean_photon_number(&g, 0.0, AmplitudeForm::Exact).unwrap();
        for i in 1..200 {
            let n = mean_photon_number(&g, 0.02 * i as f64, AmplitudeForm::Exact).unwrap();
            assert!(n > last);
            last = n;
        }
    }

    #[test]
    fn degenerate_squeeze_refused() {
        let g = params(0.1, 0.0, 0.8);
        assert!(matches!(g2(&g, 0.0, AmplitudeForm::Exact), Err(Error::DegenerateSqueeze { .. })));
        assert!(matches!(g2_asymptote(&g, AmplitudeForm::Exact), Err(Error::DegenerateSqueeze { .. })));
    }
}
