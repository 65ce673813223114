//! Brute-force evaluation of `g²(τ)` on a truncated Fock basis.
//!
//! The amplifier Hamiltonian is built as a dense matrix, diagonalised once,
//! and used both to prepare the Gaussian state from the thermal state over
//! the preparation time `t` and to evolve `a` over the lag `τ`. Nothing here
//! uses the closed forms of [`crate::coherence`].

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{invert_to_dpa, DpaParams, GaussianParams, R_EPS};

pub const MIN_DIM: usize = 4;
pub const START_DIM: usize = 32;
pub const DEFAULT_DIM_MAX: usize = 1024;
/// Number of top basis levels whose population measures truncation error.
pub const TAIL_LEVELS: usize = 8;
pub const TAIL_TARGET: f64 = 1e-10;
pub const DIM_MAX_ENV: &str = "G2LAB_ORACLE_DIM_MAX";

/// Thermal populations below this are dropped from the mixture.
const POPULATION_FLOOR: f64 = 1e-18;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Dimension cap from `G2LAB_ORACLE_DIM_MAX`, falling back to
/// [`DEFAULT_DIM_MAX`] when unset or unparsable.
pub fn dim_max_from_env() -> usize {
    std::env::var(DIM_MAX_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&d: &usize| d >= MIN_DIM)
        .unwrap_or(DEFAULT_DIM_MAX)
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < MIN_DIM {
        Err(Error::DimensionTooSmall(dim))
    } else {
        Ok(())
    }
}

fn hermiticity_residual(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    pub dim: usize,
    pub entries: DMatrix<Complex64>,
}

impl FockOperator {
    pub fn from_matrix(entries: DMatrix<Complex64>) -> Self {
        assert!(entries.is_square(), "Fock operators are square");
        FockOperator { dim: entries.nrows(), entries }
    }

    /// `a` with `a[n-1, n] = √n`.
    pub fn annihilation(dim: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        for n in 1..dim {
            m[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
        }
        FockOperator { dim, entries: m }
    }

    pub fn creation(dim: usize) -> Self {
        Self::annihilation(dim).adjoint()
    }

    pub fn number(dim: usize) -> Self {
        FockOperator {
            dim,
            entries: DMatrix::from_fn(dim, dim, |i, j| if i == j { Complex64::new(i as f64, 0.0) } else { ZERO }),
        }
    }

    pub fn identity(dim: usize) -> Self {
        FockOperator { dim, entries: DMatrix::identity(dim, dim) }
    }

    pub fn adjoint(&self) -> Self {
        FockOperator { dim: self.dim, entries: self.entries.adjoint() }
    }

    pub fn mul(&self, other: &FockOperator) -> Self {
        FockOperator { dim: self.dim, entries: &self.entries * &other.entries }
    }

    pub fn commutator(&self, other: &FockOperator) -> Self {
        FockOperator {
            dim: self.dim,
            entries: &self.entries * &other.entries - &other.entries * &self.entries,
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        FockOperator { dim: self.dim, entries: &self.entries * factor }
    }

    pub fn hermiticity_residual(&self) -> f64 {
        hermiticity_residual(&self.entries)
    }

    /// Largest entry-wise deviation from `other` restricted to the leading
    /// `block × block` corner.
    pub fn block_distance(&self, other: &FockOperator, block: usize) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..block {
            for i in 0..block {
                worst = worst.max((self.entries[(i, j)] - other.entries[(i, j)]).norm());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub dim: usize,
    pub entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn expectation(&self, op: &FockOperator) -> Complex64 {
        (&self.entries * &op.entries).trace()
    }

    pub fn mean_photon_number(&self) -> f64 {
        (0..self.dim).map(|n| n as f64 * self.entries[(n, n)].re).sum()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        hermiticity_residual(&self.entries)
    }

    /// Population of the top `levels` basis states.
    pub fn top_population(&self, levels: usize) -> f64 {
        (self.dim.saturating_sub(levels)..self.dim).map(|n| self.entries[(n, n)].re).sum()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eigen(&self.entries)?.values)
    }

    /// `½ Σ |λ_i(ρ - σ)|`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        let diff = &self.entries - &other.entries;
        let herm = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(0.5 * hermitian_eigen(&herm)?.values.iter().map(|v| v.abs()).sum::<f64>())
    }
}

/// `H = c a†² + c* a² + b a + b* a†` with `c = tc/t`, `b = tb/t`.
pub fn build_hamiltonian(d: &DpaParams, dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    let (c, b) = (d.c(), d.b());
    let mut h = DMatrix::zeros(dim, dim);
    for n in 0..dim {
        // ⟨n+2| a†² |n⟩ = √((n+1)(n+2))
        if n + 2 < dim {
            let amp = (((n + 1) * (n + 2)) as f64).sqrt();
            h[(n + 2, n)] += c * amp;
            h[(n, n + 2)] += c.conj() * amp;
        }
        // ⟨n+1| a† |n⟩ = √(n+1)
        if n + 1 < dim {
            let amp = ((n + 1) as f64).sqrt();
            h[(n + 1, n)] += b.conj() * amp;
            h[(n, n + 1)] += b * amp;
        }
    }
    Ok(FockOperator { dim, entries: h })
}

/// Truncated thermal state with populations `∝ (n̄/(n̄+1))^n`.
pub fn thermal_density(nbar: f64, dim: usize) -> Result<DensityMatrix> {
    check_dim(dim)?;
    let p = thermal_populations(nbar, dim)?;
    let mut m = DMatrix::zeros(dim, dim);
    for (n, &w) in p.iter().enumerate() {
        m[(n, n)] = Complex64::new(w, 0.0);
    }
    Ok(DensityMatrix { dim, entries: m })
}

fn thermal_populations(nbar: f64, dim: usize) -> Result<Vec<f64>> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::InvalidParameter(format!("nbar = {nbar} must be finite and >= 0")));
    }
    let q = nbar / (nbar + 1.0);
    let mut p: Vec<f64> = std::iter::successors(Some(1.0), |w| Some(w * q)).take(dim).collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|w| *w /= total);
    Ok(p)
}

/// Eigen-decomposition `H = V diag(λ) V†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl HermitianEigen {
    /// `e^{-iHs}`
    pub fn propagator(&self, s: f64) -> DMatrix<Complex64> {
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.values.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -l * s);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= phase);
        }
        scaled * self.vectors.adjoint()
    }

    /// `e^{-iHs} X` for a block of column vectors.
    pub fn propagate(&self, s: f64, block: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut coeffs = self.vectors.adjoint() * block;
        for (i, &l) in self.values.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -l * s);
            coeffs.row_mut(i).iter_mut().for_each(|z| *z *= phase);
        }
        &self.vectors * coeffs
    }
}

pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> Result<HermitianEigen> {
    let n = m.nrows();
    let mat = faer::Mat::<faer::c64>::from_fn(n, n, |i, j| {
        let z = m[(i, j)];
        faer::c64::new(z.re, z.im)
    });
    let eig = mat
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::EigenFailure(format!("{e:?}")))?;
    let (s, u) = (eig.S(), eig.U());
    let values: Vec<f64> = (0..n).map(|i| s[i].re).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenFailure("non-finite eigenvalue".into()));
    }
    let vectors = DMatrix::from_fn(n, n, |i, j| {
        let z = u[(i, j)];
        Complex64::new(z.re, z.im)
    });
    Ok(HermitianEigen { values, vectors })
}

fn unitarity_residual(u: &DMatrix<Complex64>) -> f64 {
    let prod = u * u.adjoint();
    let n = u.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

/// `e^{iHτ} X e^{-iHτ}`.
pub fn evolve_operator(h: &FockOperator, x: &FockOperator, tau: f64) -> Result<FockOperator> {
    if h.dim != x.dim {
        return Err(Error::InvalidParameter(format!("dimension mismatch {} vs {}", h.dim, x.dim)));
    }
    if tau == 0.0 {
        return Ok(x.clone());
    }
    let eig = hermitian_eigen(&h.entries)?;
    let u = eig.propagator(tau);
    let residual = unitarity_residual(&u);
    if residual > 1e-10 {
        return Err(Error::EigenFailure(format!("propagator unitarity residual {residual:e}")));
    }
    Ok(FockOperator { dim: h.dim, entries: u.adjoint() * &x.entries * u })
}

fn require_squeezed(g: &GaussianParams) -> Result<DpaParams> {
    if g.r() <= R_EPS {
        return Err(Error::DegenerateSqueeze { r: g.r(), cutoff: R_EPS });
    }
    invert_to_dpa(g)
}

fn check_tail(rho: DensityMatrix) -> Result<DensityMatrix> {
    let tail = rho.top_population(TAIL_LEVELS);
    if tail > TAIL_TARGET {
        Err(Error::TruncationError { dim_max: rho.dim, tail, target: TAIL_TARGET })
    } else {
        Ok(rho)
    }
}

/// `ρ_G = e^{-iHt} ρ_th e^{iHt}` with the amplifier that prepares `g`.
pub fn gaussian_density(g: &GaussianParams, dim: usize) -> Result<DensityMatrix> {
    let d = require_squeezed(g)?;
    let h = build_hamiltonian(&d, dim)?;
    let rho0 = thermal_density(g.nbar(), dim)?;
    let u = hermitian_eigen(&h.entries)?.propagator(d.prep_time);
    check_tail(DensityMatrix { dim, entries: &u * rho0.entries * u.adjoint() })
}

/// `ρ_G = D(α) S(ξ) ρ_th S(-ξ) D(-α)` from matrix exponentials of the
/// displacement and squeeze generators.
pub fn gaussian_density_product(g: &GaussianParams, dim: usize) -> Result<DensityMatrix> {
    check_dim(dim)?;
    let a = FockOperator::annihilation(dim).entries;
    let ad = a.adjoint();
    let (alpha, xi) = (g.alpha(), g.xi());
    let displace = (&ad * alpha - &a * alpha.conj()).exp();
    let a2 = &a * &a;
    let ad2 = &ad * &ad;
    let squeeze = (&ad2 * (-0.5 * xi) + &a2 * (0.5 * xi.conj())).exp();
    let rho0 = thermal_density(g.nbar(), dim)?;
    let ds = displace * squeeze;
    check_tail(DensityMatrix { dim, entries: &ds * rho0.entries * ds.adjoint() })
}

/// Result of one brute-force evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleValue {
    pub g2: f64,
    pub dim: usize,
    /// Worst relative population of the top [`TAIL_LEVELS`] levels among the
    /// prepared state, the state evolved by `τ`, and `a`-applied evolved state.
    pub tail: f64,
    pub mean_n_zero: f64,
    pub mean_n_tau: f64,
}

/// Apply the truncated `a` to every column.
fn lower(block: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (rows, cols) = block.shape();
    let mut out = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        for n in 1..rows {
            out[(n - 1, j)] = block[(n, j)] * (n as f64).sqrt();
        }
    }
    out
}

fn column_norms_sq(block: &DMatrix<Complex64>) -> Vec<f64> {
    block.column_iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum()).collect()
}

fn column_tails(block: &DMatrix<Complex64>) -> Vec<f64> {
    let rows = block.nrows();
    let from = rows.saturating_sub(TAIL_LEVELS);
    block
        .column_iter()
        .map(|c| c.iter().skip(from).map(|z| z.norm_sqr()).sum())
        .collect()
}

/// `g²` from `Tr[ρ_G a† a†(τ) a(τ) a] / (Tr[ρ_G a† a] Tr[ρ_G a†(τ) a(τ)])`
/// at a fixed truncation. The thermal mixture is propagated level by level:
/// for `|ψ_k⟩ = e^{-iHt}|k⟩` the numerator term is `‖a e^{-iHτ} a ψ_k‖²`.
pub fn g2_oracle_at_dim(g: &GaussianParams, omega_tau: f64, dim: usize) -> Result<OracleValue> {
    check_dim(dim)?;
    if !(omega_tau >= 0.0 && omega_tau.is_finite()) {
        return Err(Error::InvalidParameter(format!("lag Ωτ = {omega_tau} must be finite and >= 0")));
    }
    let d = require_squeezed(g)?;
    let tau = omega_tau / d.omega;
    let h = build_hamiltonian(&d, dim)?;
    let eig = hermitian_eigen(&h.entries)?;

    let weights: Vec<f64> = thermal_populations(g.nbar(), dim)?
        .into_iter()
        .take_while(|&w| w > POPULATION_FLOOR)
        .collect();
    let levels = weights.len();
    let basis = DMatrix::from_fn(dim, levels, |i, j| if i == j { ONE } else { ZERO });

    let prepared = eig.propagate(d.prep_time, &basis);
    let lowered = lower(&prepared);
    let evolved = eig.propagate(tau, &prepared);
    let lowered_evolved = eig.propagate(tau, &lowered);

    let weigh = |v: Vec<f64>| v.iter().zip(&weights).map(|(x, w)| x * w).sum::<f64>();
    let n_zero = weigh(column_norms_sq(&lowered));
    let n_tau = weigh(column_norms_sq(&lower(&evolved)));
    let pair = weigh(column_norms_sq(&lower(&lowered_evolved)));
    if !(n_zero > 0.0 && n_tau > 0.0) {
        return Err(Error::ZeroDenominator("truncated photon number"));
    }

    let tail = [
        (&prepared, 1.0),
        (&evolved, 1.0),
        (&lowered_evolved, n_zero),
    ]
    .into_iter()
    .map(|(block, norm)| weigh(column_tails(block)) / norm)
    .fold(0.0f64, f64::max);

    Ok(OracleValue {
        g2: pair / (n_zero * n_tau),
        dim,
        tail,
        mean_n_zero: n_zero,
        mean_n_tau: n_tau,
    })
}

/// Brute-force `g²` with adaptive truncation: start at [`START_DIM`] and
/// double until the tail is below [`TAIL_TARGET`], up to `dim_max`.
pub fn g2_oracle(g: &GaussianParams, omega_tau: f64, dim_max: usize) -> Result<OracleValue> {
    check_dim(dim_max)?;
    let mut dim = START_DIM.min(dim_max);
    loop {
        let value = g2_oracle_at_dim(g, omega_tau, dim)?;
        if value.tail < TAIL_TARGET {
            return Ok(value);
        }
        if dim >= dim_max {
            return Err(Error::TruncationError { dim_max, tail: value.tail, target: TAIL_TARGET });
        }
        dim = (2 * dim).min(dim_max);
    }
}

/// Diagnostic: the same ratio written on the thermal state with operators
/// evolved over `t` and `t + τ`, using dense Heisenberg-picture operators.
pub fn g2_oracle_from_thermal(g: &GaussianParams, omega_tau: f64, dim: usize) -> Result<f64> {
    let d = require_squeezed(g)?;
    let h = build_hamiltonian(&d, dim)?;
    let a = FockOperator::annihilation(dim);
    let t = d.prep_time;
    let a_t = evolve_operator(&h, &a, t)?;
    let a_tt = evolve_operator(&h, &a, t + omega_tau / d.omega)?;
    let rho0 = thermal_density(g.nbar(), dim)?;
    let pair = a_t.adjoint().mul(&a_tt.adjoint()).mul(&a_tt).mul(&a_t);
    let n_zero = rho0.expectation(&a_t.adjoint().mul(&a_t)).re;
    let n_tau = rho0.expectation(&a_tt.adjoint().mul(&a_tt)).re;
    Ok(rho0.expectation(&pair).re / (n_zero * n_tau))
}

/// Parameter region where the truncated-basis check is affordable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub r_max: f64,
    pub alpha_max: f64,
    pub nbar_max: f64,
    pub omega_tau_max: f64,
}

pub const ENVELOPE: Envelope = Envelope { r_max: 1.0, alpha_max: 2.0, nbar_max: 2.0, omega_tau_max: 3.0 };

impl Envelope {
    pub fn check(&self, g: &GaussianParams, omega_tau: f64) -> Result<()> {
        let mut out = Vec::new();
        if g.r() > self.r_max {
            out.push(format!("r = {} > {}", g.r(), self.r_max));
        }
        if g.r() <= R_EPS {
            out.push(format!("r = {} is not squeezed", g.r()));
        }
        if g.alpha_mag() > self.alpha_max {
            out.push(format!("|alpha| = {} > {}", g.alpha_mag(), self.alpha_max));
        }
        if g.nbar() > self.nbar_max {
            out.push(format!("nbar = {} > {}", g.nbar(), self.nbar_max));
        }
        if omega_tau > self.omega_tau_max {
            out.push(format!("Ωτ = {omega_tau} > {}", self.omega_tau_max));
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(Error::OutsideEnvelope(out.join(", ")))
        }
    }
}
