//! Regime classification of `g²(τ)` against the classical bounds
//! `g²(0) ≥ 1`, `g²(0) ≥ g²(τ)` and `|g²(0) - 1| > |g²(τ) - 1|`, and
//! minimisation of `g²` over the displacement magnitude.

use serde::{Deserialize, Serialize};

use crate::coherence::{self, g2_displaced_thermal, SCALED_ABOVE};
use crate::error::{Error, Result};
use crate::gaussian::{amplitude_ratio, AmplitudeForm, GaussianParams, R_EPS};
use crate::numerics::{bisect, cosh_m1, coth, golden_section, linspace};

pub const DEFAULT_GRID: usize = 4096;
pub const MIN_GRID: usize = 64;
pub const ROOT_TOL: f64 = 1e-10;
pub const MIN_TOL: f64 = 1e-10;
/// Differences smaller than this are not counted as violations or sign changes.
const LEVEL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LagAxis {
    OmegaTau,
    TauOverT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// `g²(0) ≥ g²(τ)`; violated means antibunching.
    NoAntibunching,
    /// `|g²(0) - 1| > |g²(τ) - 1|`.
    NeverFartherFromUnity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingTarget {
    /// `g²(τ) = g²(0)`
    ZeroLag,
    /// `g²(τ) = 2 - g²(0)`
    Mirror,
}

/// An interval of lags where `inequality` fails. `hi` is infinite when the
/// asymptote shows the violation persists past the scanned range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub lo: f64,
    pub hi: f64,
    pub inequality: Inequality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub axis: LagAxis,
    pub scan_max: f64,
    pub g2_zero: f64,
    pub sub_poissonian: bool,
    pub crossings_g2zero: Vec<f64>,
    pub crossings_mirror: Vec<f64>,
    /// Interior minimum `(lag, g²)`, if the scan has one.
    pub minimum: Option<(f64, f64)>,
    pub asymptote: f64,
    pub violation_intervals: Vec<Violation>,
    /// Targets crossed somewhere in `(scan_max, ∞)` according to the asymptote.
    pub unresolved_crossings: Vec<CrossingTarget>,
}

impl RegimeReport {
    pub fn violations_of(&self, inequality: Inequality) -> impl Iterator<Item = &Violation> {
        self.violation_intervals.iter().filter(move |v| v.inequality == inequality)
    }

    pub fn is_classical(&self) -> bool {
        !self.sub_poissonian && self.violation_intervals.is_empty()
    }
}

fn level_sign(d: f64) -> i8 {
    if d > LEVEL_TOL {
        1
    } else if d < -LEVEL_TOL {
        -1
    } else {
        0
    }
}

/// Ascending roots of `f - target` on the grid, skipping index 0 when
/// `skip_origin` (where the zero-lag target is met trivially).
fn crossings<F: Fn(f64) -> f64>(f: &F, xs: &[f64], ys: &[f64], target: f64, skip_origin: bool) -> Vec<f64> {
    let start = usize::from(skip_origin);
    let mut roots = Vec::new();
    let mut last: Option<(usize, i8)> = None;
    for i in start..xs.len() {
        let s = level_sign(ys[i] - target);
        if s == 0 {
            continue;
        }
        if let Some((j, prev)) = last {
            if prev != s {
                if let Some(root) = bisect(|x| f(x) - target, xs[j], xs[i], ROOT_TOL) {
                    roots.push(root);
                }
            }
        }
        last = Some((i, s));
    }
    roots
}

fn scan<F: Fn(f64) -> f64>(f: F, axis: LagAxis, x_max: f64, grid: usize, asymptote: f64) -> RegimeReport {
    let xs = linspace(0.0, x_max, grid);
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let g0 = ys[0];
    let mirror = 2.0 - g0;

    let crossings_g2zero = crossings(&f, &xs, &ys, g0, true);
    let crossings_mirror = crossings(&f, &xs, &ys, mirror, false);

    let (k, _) = ys
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, &y)| if y < best.1 { (i, y) } else { best });
    let minimum = (k > 0 && k + 1 < xs.len()).then(|| golden_section(&f, xs[k - 1], xs[k + 1], MIN_TOL));

    let last = *ys.last().unwrap();
    let mut unresolved_crossings = Vec::new();
    for (target, kind) in [(g0, CrossingTarget::ZeroLag), (mirror, CrossingTarget::Mirror)] {
        let now = level_sign(last - target);
        let then = level_sign(asymptote - target);
        if now != 0 && then != 0 && now != then {
            unresolved_crossings.push(kind);
        }
    }

    let mut bounds: Vec<f64> = crossings_g2zero.iter().chain(&crossings_mirror).copied().collect();
    bounds.sort_by(f64::total_cmp);
    bounds.dedup();
    bounds.insert(0, 0.0);
    bounds.push(x_max);

    let mut violation_intervals = Vec::new();
    for inequality in [Inequality::NoAntibunching, Inequality::NeverFartherFromUnity] {
        let violated = |x: f64| {
            let g = f(x);
            match inequality {
                Inequality::NoAntibunching => g - g0 > LEVEL_TOL,
                Inequality::NeverFartherFromUnity => (g - 1.0).abs() - (g0 - 1.0).abs() > LEVEL_TOL,
            }
        };
        let mut open: Option<f64> = None;
        for pair in bounds.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            if hi <= lo {
                continue;
            }
            match (violated(0.5 * (lo + hi)), open) {
                (true, None) => open = Some(lo),
                (false, Some(start)) => {
                    violation_intervals.push(Violation { lo: start, hi: lo, inequality });
                    open = None;
                }
                _ => {}
            }
        }
        if let Some(start) = open {
            let bounded_by = |t: &CrossingTarget| match inequality {
                Inequality::NoAntibunching => *t == CrossingTarget::ZeroLag,
                Inequality::NeverFartherFromUnity => true,
            };
            let persists = !unresolved_crossings.iter().any(bounded_by);
            let hi = if persists { f64::INFINITY } else { x_max };
            violation_intervals.push(Violation { lo: start, hi, inequality });
        }
    }

    RegimeReport {
        axis,
        scan_max: x_max,
        g2_zero: g0,
        sub_poissonian: g0 < 1.0 - LEVEL_TOL,
        crossings_g2zero,
        crossings_mirror,
        minimum,
        asymptote,
        violation_intervals,
        unresolved_crossings,
    }
}

fn check_scan(x_max: f64, grid: usize) -> Result<()> {
    if !(x_max > 0.0 && x_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("scan range {x_max} must be finite and > 0")));
    }
    if grid < MIN_GRID {
        return Err(Error::InvalidParameter(format!("grid {grid} must be at least {MIN_GRID}")));
    }
    Ok(())
}

/// Scan `g²` over `0 ≤ Ωτ ≤ omega_tau_max` and classify it.
pub fn classify(g: &GaussianParams, omega_tau_max: f64, grid: usize, form: AmplitudeForm) -> Result<RegimeReport> {
    check_scan(omega_tau_max, grid)?;
    coherence::g2(g, 0.0, form)?;
    let asymptote = coherence::g2_asymptote(g, form)?;
    let f = |x: f64| coherence::g2(g, x, form).map_or(f64::NAN, |p| p.g2);
    Ok(scan(f, LagAxis::OmegaTau, omega_tau_max, grid, asymptote))
}

/// Same scan for the `r = 0` route, over `0 ≤ τ/t ≤ tau_over_t_max`.
pub fn classify_displaced_thermal(nbar: f64, alpha_mag: f64, tau_over_t_max: f64) -> Result<RegimeReport> {
    classify_displaced_thermal_with_grid(nbar, alpha_mag, tau_over_t_max, DEFAULT_GRID)
}

pub fn classify_displaced_thermal_with_grid(
    nbar: f64,
    alpha_mag: f64,
    tau_over_t_max: f64,
    grid: usize,
) -> Result<RegimeReport> {
    check_scan(tau_over_t_max, grid)?;
    g2_displaced_thermal(nbar, alpha_mag, 0.0)?;
    let asymptote = if alpha_mag > 0.0 { 1.0 } else { 2.0 };
    let f = |x: f64| g2_displaced_thermal(nbar, alpha_mag, x).map_or(f64::NAN, |p| p.g2);
    Ok(scan(f, LagAxis::TauOverT, tau_over_t_max, grid, asymptote))
}

/// Coefficients of `g² - 1 = (A + B y) / ((C + y)(E + D y))`, `y = |α|²`,
/// at fixed `n̄`, `r`, `Ωτ` and `θ = 2φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
}

impl AlphaCoefficients {
    pub fn discriminant(&self) -> f64 {
        let AlphaCoefficients { a, b, c, d, e } = *self;
        d * (a * d - b * e) * (a - b * c)
    }
}

pub fn alpha_coefficients(nbar: f64, r: f64, omega_tau: f64, form: AmplitudeForm) -> Result<AlphaCoefficients> {
    if r <= R_EPS {
        return Err(Error::DegenerateSqueeze { r, cutoff: R_EPS });
    }
    if !(nbar >= 0.0 && omega_tau >= 0.0 && omega_tau + 2.0 * r <= SCALED_ABOVE) {
        return Err(Error::InvalidParameter(format!(
            "need nbar >= 0 and 0 <= Ωτ with Ωτ + 2r <= {SCALED_ABOVE}"
        )));
    }
    let x = omega_tau;
    let h = nbar + 0.5;
    let n = nbar + h * cosh_m1(2.0 * r + x) - 0.5 * cosh_m1(x);
    let s = h * (2.0 * r + x).sinh() - 0.5 * x.sinh();
    let (cosh, sinh, cm1) = (x.cosh(), x.sinh(), cosh_m1(x));
    let cth = coth(0.5 * r);
    let k = form.conjugate_sinh_coefficient();
    let bracket = 1.0 + cosh + cth * sinh + 2.0 * k.re * sinh - cth * cm1;
    Ok(AlphaCoefficients {
        a: n * n + s * s,
        b: bracket * (n - s),
        c: nbar + h * cosh_m1(2.0 * r),
        d: amplitude_ratio(cosh, sinh, cm1, cth, 0.0, form).norm_sqr(),
        e: nbar + h * cosh_m1(2.0 * (r + x)),
    })
}

/// Both stationary points of `g²` in `y = |α|²`. Only `upper` can be a
/// positive minimiser (when `B < 0`); `lower` is for inspection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryRoots {
    pub coefficients: AlphaCoefficients,
    pub upper: f64,
    pub lower: f64,
}

pub fn stationary_roots(nbar: f64, r: f64, omega_tau: f64, form: AmplitudeForm) -> Result<StationaryRoots> {
    let coefficients = alpha_coefficients(nbar, r, omega_tau, form)?;
    let AlphaCoefficients { a, b, d, .. } = coefficients;
    let disc = coefficients.discriminant();
    if disc < 0.0 {
        return Err(Error::NegativeDiscriminant(disc));
    }
    let root = disc.sqrt();
    Ok(StationaryRoots {
        coefficients,
        upper: -(a * d + root) / (b * d),
        lower: -(a * d - root) / (b * d),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaOptimum {
    pub alpha_mag: f64,
    pub g2_min: f64,
    /// `false` when `B ≥ 0`: `g²` then has no interior minimum in `|α|` and
    /// the reported optimum is the `α = 0` endpoint.
    pub branch_valid: bool,
}

/// `r` above which an interior minimum in `|α|` exists, `ln(2n̄+1)/2`.
pub fn existence_threshold(nbar: f64) -> f64 {
    0.5 * (2.0 * nbar).ln_1p()
}

/// Displacement minimising `g²` at lag `Ωτ` for amplitude squeezing (`θ = 2φ`).
pub fn minimize_over_alpha(nbar: f64, r: f64, omega_tau: f64, form: AmplitudeForm) -> Result<AlphaOptimum> {
    let coefficients = alpha_coefficients(nbar, r, omega_tau, form)?;
    if coefficients.b >= 0.0 {
        let g = GaussianParams::amplitude_squeezed(nbar, r, 0.0)?;
        return Ok(AlphaOptimum {
            alpha_mag: 0.0,
            g2_min: coherence::g2(&g, omega_tau, form)?.g2,
            branch_valid: false,
        });
    }
    let roots = stationary_roots(nbar, r, omega_tau, form)?;
    let alpha_mag = roots.upper.sqrt();
    let g = GaussianParams::amplitude_squeezed(nbar, r, alpha_mag)?;
    Ok(AlphaOptimum {
        alpha_mag,
        g2_min: coherence::g2(&g, omega_tau, form)?.g2,
        branch_valid: true,
    })
}

/// Zero-lag optimum in closed form; requires `r > ln(2n̄+1)/2`.
pub fn alpha_optimum_tau0(nbar: f64, r: f64) -> Result<AlphaOptimum> {
    let threshold = existence_threshold(nbar);
    if !(r > threshold) || !r.is_finite() {
        return Err(Error::ExistenceViolation { r, threshold });
    }
    let m = 2.0 * nbar + 1.0;
    let e2r = (2.0 * r).exp();
    let alpha_mag = 0.5 * (m * (4.0 * r).exp_m1() * (m * e2r - 1.0) / (e2r - m)).sqrt();
    Ok(AlphaOptimum {
        alpha_mag,
        g2_min: coherence::g2_zero_lag(nbar, r, alpha_mag, 0.0)?,
        branch_valid: true,
    })
}

/// Squeeze for which `|α|` is the zero-lag optimum of a displaced squeezed
/// vacuum, `ln(4|α|²+1)/4`.
pub fn vacuum_optimal_squeeze(alpha_mag: f64) -> f64 {
    0.25 * (4.0 * alpha_mag * alpha_mag).ln_1p()
}

/// Zero-lag `g²` of a displaced squeezed vacuum at its optimal displacement,
/// expressed through `|α|`.
pub fn g2_min_vacuum(alpha_mag: f64) -> Result<f64> {
    if !(alpha_mag > 0.0 && alpha_mag.is_finite()) {
        return Err(Error::InvalidParameter(format!("|alpha| = {alpha_mag} must be > 0")));
    }
    let r = vacuum_optimal_squeeze(alpha_mag);
    let a2 = alpha_mag * alpha_mag;
    let sh = (2.0 * r).sinh();
    let denom = cosh_m1(2.0 * r) + 2.0 * a2;
    Ok(2.0 + (sh * (sh - 4.0 * a2) - 4.0 * a2 * a2) / (denom * denom))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> GaussianParams {
        GaussianParams::amplitude_squeezed(0.1, 0.3, 0.8).unwrap()
    }

    #[test]
    fn fig1_regime_with_legacy_amplitude() {
        let rep = classify(&fig1(), 3.0, DEFAULT_GRID, AmplitudeForm::Legacy).unwrap();
        assert!(rep.sub_poissonian);
        let (x_min, _) = rep.minimum.unwrap();
        assert!((x_min - 0.0300).abs() < 5e-4, "{x_min}");
        assert_eq!(rep.crossings_g2zero.len(), 1);
        assert!((rep.crossings_g2zero[0] - 0.0674).abs() < 5e-4);
        assert_eq!(rep.crossings_mirror.len(), 1);
        assert!((rep.crossings_mirror[0] - 0.593).abs() < 5e-3);
        let unity: Vec<_> = rep.violations_of(Inequality::NeverFartherFromUnity).collect();
        assert_eq!(unity.len(), 2);
        assert_eq!(unity[0].lo, 0.0);
        assert_eq!(unity[0].hi, rep.crossings_g2zero[0]);
        assert_eq!(unity[1].lo, rep.crossings_mirror[0]);
        assert!(unity[1].hi.is_infinite());
    }

    #[test]
    fn crossings_satisfy_their_equations() {
        let g = fig1();
        for form in [AmplitudeForm::Exact, AmplitudeForm::Legacy] {
            let rep = classify(&g, 3.0, DEFAULT_GRID, form).unwrap();
            for &x in &rep.crossings_g2zero {
                let v = coherence::g2(&g, x, form).unwrap().g2;
                assert!((v - rep.g2_zero).abs() <= 1e-9);
            }
            for &x in &rep.crossings_mirror {
                let v = coherence::g2(&g, x, form).unwrap().g2;
                assert!((v - (2.0 - rep.g2_zero)).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn coherent_state_is_flat_and_classical() {
        let rep = classify_displaced_thermal(0.0, 1.5, 10.0).unwrap();
        assert!(rep.crossings_g2zero.is_empty());
        assert!(rep.crossings_mirror.is_empty());
        assert!(rep.violation_intervals.is_empty());
        assert!(rep.minimum.is_none());
        assert_eq!(rep.g2_zero, 1.0);
        assert!(!rep.sub_poissonian);
    }

    #[test]
    fn displaced_thermal_decays_classically() {
        let rep = classify_displaced_thermal(1.0, 1.0, 10.0).unwrap();
        assert!((rep.g2_zero - 1.75).abs() < 1e-12);
        assert!(rep.is_classical());
        assert_eq!(rep.asymptote, 1.0);
    }

    #[test]
    fn scan_validation() {
        assert!(classify(&fig1(), 0.0, 100, AmplitudeForm::Exact).is_err());
        assert!(classify(&fig1(), 1.0, 10, AmplitudeForm::Exact).is_err());
        let flat = GaussianParams::amplitude_squeezed(0.1, 0.0, 0.8).unwrap();
        assert!(matches!(
            classify(&flat, 1.0, 100, AmplitudeForm::Exact),
            Err(Error::DegenerateSqueeze { .. })
        ));
    }

    #[test]
    fn vacuum_optimum_at_zero_lag() {
        let expected = 0.5 * (1f64.exp().powi(2) - 1.0).sqrt();
        let closed = alpha_optimum_tau0(0.0, 0.5).unwrap();
        assert!((closed.alpha_mag - expected).abs() < 1e-12);
        assert!((expected - 1.264).abs() < 1e-3);
        let general = minimize_over_alpha(0.0, 0.5, 0.0, AmplitudeForm::Exact).unwrap();
        assert!(general.branch_valid);
        assert!((general.alpha_mag - expected).abs() < 1e-10);
    }

    #[test]
    fn existence_gate() {
        let opt = minimize_over_alpha(0.2, 0.1, 0.0, AmplitudeForm::Exact).unwrap();
        assert!(!opt.branch_valid);
        assert_eq!(opt.alpha_mag, 0.0);
        assert!((existence_threshold(0.2) - 0.5 * 1.4f64.ln()).abs() < 1e-15);
        assert!(matches!(alpha_optimum_tau0(0.2, 0.1), Err(Error::ExistenceViolation { .. })));
    }

    #[test]
    fn optimum_is_a_local_minimum() {
        for form in [AmplitudeForm::Exact, AmplitudeForm::Legacy] {
            for &(nbar, r, x) in &[(0.1, 0.5, 0.0), (0.0, 0.3, 0.7), (0.4, 0.9, 1.5)] {
                let opt = minimize_over_alpha(nbar, r, x, form).unwrap();
                assert!(opt.branch_valid);
                let at = |a: f64| {
                    let g = GaussianParams::amplitude_squeezed(nbar, r, a).unwrap();
                    coherence::g2(&g, x, form).unwrap().g2
                };
                let centre = at(opt.alpha_mag);
                assert!((centre - opt.g2_min).abs() < 1e-14);
                assert!(at(opt.alpha_mag + 1e-3) >= centre);
                assert!(at(opt.alpha_mag - 1e-3) >= centre);
            }
        }
    }

    #[test]
    fn lower_root_is_never_positive_on_valid_branch() {
        let roots = stationary_roots(0.1, 0.6, 0.4, AmplitudeForm::Exact).unwrap();
        assert!(roots.coefficients.b < 0.0);
        assert!(roots.upper > 0.0);
        assert!(roots.lower < 0.0);
    }

    #[test]
    fn vacuum_minimum_inverse_pair() {
        let r = vacuum_optimal_squeeze(0.5);
        assert!((r - 0.25 * 2f64.ln()).abs() < 1e-15);
        assert!((r - 0.1733).abs() < 1e-4);
        let back = alpha_optimum_tau0(0.0, r).unwrap();
        assert!((back.alpha_mag - 0.5).abs() < 1e-12);
        let direct = coherence::g2_zero_lag(0.0, r, 0.5, 0.0).unwrap();
        assert!((g2_min_vacuum(0.5).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn vacuum_minimum_small_displacement_series() {
        // leading terms: r ≈ |α|² - 2|α|⁴, g² ≈ 4|α|² (1 + O(|α|²))
        for a in [1e-2f64, 1e-3] {
            let v = g2_min_vacuum(a).unwrap();
            assert!((v / (4.0 * a * a) - 1.0).abs() < 10.0 * a * a, "{a}: {v}");
        }
        assert!(g2_min_vacuum(0.0).is_err());
    }
}
