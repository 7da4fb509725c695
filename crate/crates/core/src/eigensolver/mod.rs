//! Paired causal/retrocausal stationary wave equations in 1D.
//!
//! Both `ψ₊` and `ψ₋` satisfy `ψ'' + (2m/ħ²)(E − V)ψ = 0` with the same
//! energy, so one spatial eigenfunction serves the pair; they differ only in
//! the time phase, `e^{−iEt/ħ}` for `ψ₊` and `e^{+iEt/ħ}` for `ψ₋`. That
//! makes `ψ₋ = conj(ψ₊)` and `ψ₊ψ₋ = |ψ|²`.
//!
//! The Hamiltonian `−ħ²/(2m) d²/dx² + V` is discretized with second-order
//! central differences on the interior nodes of the grid; the two endpoints
//! carry Dirichlet zeros.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::config::{Tolerances, DEFAULT_TOLERANCES};
use crate::grid::{Grid, GridError, GridFunction};
use crate::lagrangian::PotentialSpec;

mod tridiag;

pub use tridiag::SymTridiagonal;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("grid needs at least {required} points (got {got})")]
    GridTooSmall { required: usize, got: usize },
    #[error("potential cannot be evaluated on this grid: {0}")]
    Potential(String),
    #[error("requested {requested} eigenpairs but the matrix has dimension {dim}")]
    TooManyStates { requested: usize, dim: usize },
    #[error("inverse iteration for eigenpair {index} did not converge (residual {residual:e})")]
    NoConvergence { index: usize, residual: f64 },
    #[error("eigenstate index {index} out of range ({count} states)")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("coefficient vector has norm² {0}, expected 1")]
    Unnormalized(f64),
    #[error("{given} coefficients given but only {available} eigenstates")]
    TooManyCoefficients { given: usize, available: usize },
    #[error("perturbation scale must lie in (0, 0.1] (got {0})")]
    BadPerturbation(f64),
    #[error("invalid units: {0}")]
    Units(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

pub const MIN_GRID_POINTS: usize = 16;

/// `ħ`, particle mass and speed of light; natural units by default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitsConfig {
    pub hbar: f64,
    pub mass: f64,
    pub c_light: f64,
}

impl Default for UnitsConfig {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0, c_light: 1.0 }
    }
}

impl UnitsConfig {
    pub fn validate(&self) -> Result<(), EigenError> {
        for (name, v) in [("hbar", self.hbar), ("mass", self.mass), ("c_light", self.c_light)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(EigenError::Units(format!("{name} must be finite and > 0 (got {v})")));
            }
        }
        Ok(())
    }

    /// `ħ²/(2m)`.
    pub fn kinetic_prefactor(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass)
    }
}

/// `V(x)` at every grid node. The hard-wall well must coincide with the grid
/// interval; its walls are the Dirichlet endpoints.
pub fn potential_on_grid(potential: &PotentialSpec, grid: &Grid) -> Result<Vec<f64>, EigenError> {
    potential.validate().map_err(EigenError::Potential)?;
    if let PotentialSpec::InfiniteWell { length } = potential {
        if (grid.length() - length).abs() > 1e-12 * length {
            return Err(EigenError::Potential(format!(
                "well width {length} does not match grid interval [{}, {}]",
                grid.a(),
                grid.b()
            )));
        }
        return Ok(vec![0.0; grid.len()]);
    }
    let values: Vec<f64> =
        grid.points().map(|x| potential.value(x).expect("non-well potentials evaluate")).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(EigenError::Potential(format!("V({}) is not finite", grid.x(i))));
    }
    Ok(values)
}

/// Discrete Hamiltonian acting on the interior nodes of `grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    pub matrix: SymTridiagonal,
    pub grid: Grid,
    pub potential: PotentialSpec,
    pub units: UnitsConfig,
}

impl Hamiltonian {
    /// `Hψ` for a grid function with Dirichlet endpoints (endpoint samples
    /// are ignored and the result has zero endpoints).
    pub fn apply(&self, psi: &GridFunction<f64>) -> Result<GridFunction<f64>, EigenError> {
        if !psi.grid().same_as(&self.grid) {
            return Err(GridError::GridMismatch.into());
        }
        let n = self.grid.len();
        let inner = self.matrix.mul_vec(&psi.samples()[1..n - 1]);
        let mut out = vec![0.0; n];
        out[1..n - 1].copy_from_slice(&inner);
        Ok(GridFunction::new(self.grid, out)?)
    }

    /// `⟨ψ|H|ψ⟩ / ⟨ψ|ψ⟩` over the interior nodes.
    pub fn rayleigh_quotient(&self, psi: &GridFunction<f64>) -> Result<f64, EigenError> {
        let hpsi = self.apply(psi)?;
        let num: f64 = hpsi.samples().iter().zip(psi.samples()).map(|(a, b)| a * b).sum();
        let n = self.grid.len();
        let den: f64 = psi.samples()[1..n - 1].iter().map(|v| v * v).sum();
        Ok(num / den)
    }
}

/// Diagonal `ħ²/(m h²) + V(x_i)`, off-diagonal `−ħ²/(2m h²)`.
pub fn build_hamiltonian(
    potential: &PotentialSpec,
    grid: &Grid,
    units: &UnitsConfig,
) -> Result<Hamiltonian, EigenError> {
    units.validate()?;
    if grid.len() < MIN_GRID_POINTS {
        return Err(EigenError::GridTooSmall { required: MIN_GRID_POINTS, got: grid.len() });
    }
    let v = potential_on_grid(potential, grid)?;
    let h2 = grid.h() * grid.h();
    let kinetic = units.hbar * units.hbar / (units.mass * h2);
    let n = grid.len();
    let diag = v[1..n - 1].iter().map(|vi| kinetic + vi).collect();
    let off = vec![-0.5 * kinetic; n - 3];
    Ok(Hamiltonian {
        matrix: SymTridiagonal::new(diag, off),
        grid: *grid,
        potential: potential.clone(),
        units: *units,
    })
}

/// Lowest eigenpairs, each eigenfunction normalized so `Σψ²h = 1` and with
/// its leading lobe positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolution {
    pub energies: Vec<f64>,
    pub eigenfunctions: Vec<GridFunction<f64>>,
    /// `|Hψ − Eψ| / |ψ|` of each pair.
    pub residuals: Vec<f64>,
    pub potential: PotentialSpec,
    pub units: UnitsConfig,
    pub grid: Grid,
}

impl EigenSolution {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn spectrum_json(&self) -> serde_json::Value {
        json!({
            "potential": serde_json::to_value(&self.potential).expect("plain data"),
            "energies": self.energies,
            "units": serde_json::to_value(self.units).expect("plain data"),
        })
    }
}

pub fn solve_spectrum(h: &Hamiltonian, count: usize) -> Result<EigenSolution, EigenError> {
    solve_spectrum_with(h, count, &DEFAULT_TOLERANCES)
}

pub fn solve_spectrum_with(
    h: &Hamiltonian,
    count: usize,
    tol: &Tolerances,
) -> Result<EigenSolution, EigenError> {
    let t = &h.matrix;
    if count > t.dim() {
        return Err(EigenError::TooManyStates { requested: count, dim: t.dim() });
    }
    // roundoff floor of |Tx − λx| for a unit vector
    let floor = 16.0 * f64::EPSILON * t.norm_inf();
    let accept = tol.eigen_residual.max(floor);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut energies = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    for index in 0..count {
        let lambda = t.bisect_eigenvalue(index);
        let (x, residual, _) = tridiag::inverse_iteration(
            t,
            lambda,
            &vectors,
            accept,
            tol.max_inverse_iterations,
            0x5eed_0000 + index as u64,
        )
        .map_err(|residual| EigenError::NoConvergence { index, residual })?;
        vectors.push(x);
        energies.push(lambda);
        residuals.push(residual);
    }
    let eigenfunctions = vectors.iter().map(|x| to_grid_function(&h.grid, x)).collect();
    Ok(EigenSolution {
        energies,
        eigenfunctions,
        residuals,
        potential: h.potential.clone(),
        units: h.units,
        grid: h.grid,
    })
}

fn to_grid_function(grid: &Grid, interior: &[f64]) -> GridFunction<f64> {
    let n = grid.len();
    let mut s = vec![0.0; n];
    s[1..n - 1].copy_from_slice(interior);
    let norm = (s.iter().map(|v| v * v).sum::<f64>() * grid.h()).sqrt();
    let peak = s.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let lead = s.iter().find(|v| v.abs() > 1e-3 * peak).copied().unwrap_or(1.0);
    let scale = lead.signum() / norm;
    s.iter_mut().for_each(|v| *v *= scale);
    GridFunction::new(*grid, s).expect("length matches grid")
}

/// Causal and retrocausal spectra, each from its own discretized problem.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSpectrum {
    pub causal: EigenSolution,
    pub retrocausal: EigenSolution,
}

impl PairedSpectrum {
    pub fn max_energy_deviation(&self) -> f64 {
        self.causal
            .energies
            .iter()
            .zip(&self.retrocausal.energies)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn solve_paired_spectrum(
    potential: &PotentialSpec,
    grid: &Grid,
    units: &UnitsConfig,
    count: usize,
) -> Result<PairedSpectrum, EigenError> {
    let causal = solve_spectrum(&build_hamiltonian(potential, grid, units)?, count)?;
    let retrocausal = solve_spectrum(&build_hamiltonian(potential, grid, units)?, count)?;
    Ok(PairedSpectrum { causal, retrocausal })
}

/// Shared spatial eigenfunction with the two opposite time phases.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunctionPair {
    pub spatial: GridFunction<f64>,
    pub energy: f64,
    pub hbar: f64,
}

impl WaveFunctionPair {
    /// `e^{−iEt/ħ}`.
    pub fn causal_phase(&self, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, -self.energy * t / self.hbar)
    }

    /// `ψ₊(x, t) = ψ(x) e^{−iEt/ħ}`.
    pub fn psi_plus(&self, t: f64) -> GridFunction<Complex64> {
        let phase = self.causal_phase(t);
        self.spatial.map(|v| phase * v)
    }

    /// `ψ₋(x, t) = ψ(x) e^{+iEt/ħ}`, built from the conjugated causal phase.
    pub fn psi_minus(&self, t: f64) -> GridFunction<Complex64> {
        let phase = self.causal_phase(t).conj();
        self.spatial.map(|v| phase * v)
    }
}

pub fn make_pair(sol: &EigenSolution, index: usize) -> Result<WaveFunctionPair, EigenError> {
    if index >= sol.len() {
        return Err(EigenError::IndexOutOfRange { index, count: sol.len() });
    }
    Ok(WaveFunctionPair {
        spatial: sol.eigenfunctions[index].clone(),
        energy: sol.energies[index],
        hbar: sol.units.hbar,
    })
}

/// Pointwise `ψ₊ψ₋` before discarding the imaginary part.
pub fn density_complex(pair: &WaveFunctionPair, t: f64) -> GridFunction<Complex64> {
    pair.psi_plus(t).zip_with(&pair.psi_minus(t), |p, m| p * m).expect("same grid")
}

/// `ρ(x) = ψ₊(x)ψ₋(x)`.
pub fn density(pair: &WaveFunctionPair, t: f64) -> GridFunction<f64> {
    density_complex(pair, t).map(|z| z.re)
}

/// `Ψ₊ = Σ c_n ψ_n e^{−iE_n t/ħ}` and its retrocausal partner
/// `Ψ₋ = Σ c_n* ψ_n e^{+iE_n t/ħ}`.
pub fn superposition_pair(
    sol: &EigenSolution,
    coeffs: &[Complex64],
    t: f64,
) -> Result<(GridFunction<Complex64>, GridFunction<Complex64>), EigenError> {
    superposition_pair_with(sol, coeffs, t, &DEFAULT_TOLERANCES)
}

pub fn superposition_pair_with(
    sol: &EigenSolution,
    coeffs: &[Complex64],
    t: f64,
    tol: &Tolerances,
) -> Result<(GridFunction<Complex64>, GridFunction<Complex64>), EigenError> {
    if coeffs.len() > sol.len() {
        return Err(EigenError::TooManyCoefficients { given: coeffs.len(), available: sol.len() });
    }
    let norm2: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if (norm2 - 1.0).abs() > tol.coefficient_norm {
        return Err(EigenError::Unnormalized(norm2));
    }
    let mut plus = GridFunction::<Complex64>::zeros(sol.grid);
    let mut minus = GridFunction::<Complex64>::zeros(sol.grid);
    for (n, &c) in coeffs.iter().enumerate() {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let weight = c * Complex64::from_polar(1.0, -sol.energies[n] * t / sol.units.hbar);
        let partner = weight.conj();
        let psi = sol.eigenfunctions[n].samples();
        for ((p, m), &v) in plus.samples_mut().iter_mut().zip(minus.samples_mut()).zip(psi) {
            *p += weight * v;
            *m += partner * v;
        }
    }
    Ok((plus, minus))
}

/// `ρ(x, t) = Ψ₊Ψ₋` of a normalized superposition.
pub fn superposition_density(
    sol: &EigenSolution,
    coeffs: &[Complex64],
    t: f64,
) -> Result<GridFunction<f64>, EigenError> {
    let (plus, minus) = superposition_pair(sol, coeffs, t)?;
    Ok(plus.zip_with(&minus, |p, m| (p * m).re)?)
}

/// `∫ [ħ²/(2m) ψ₊'ψ₋' + (V − E) ψ₊ψ₋] dx`.
///
/// The gradient product is taken cell by cell from forward differences and
/// the potential term by the trapezoid rule, which makes the functional
/// `h(ψᵀHψ − Eψᵀψ)` for the discrete Hamiltonian when `ψ` vanishes at the
/// endpoints.
pub fn energy_functional(
    psi_plus: &GridFunction<f64>,
    psi_minus: &GridFunction<f64>,
    potential: &PotentialSpec,
    energy: f64,
    units: &UnitsConfig,
) -> Result<f64, EigenError> {
    units.validate()?;
    let grid = psi_plus.grid();
    if !grid.same_as(psi_minus.grid()) {
        return Err(GridError::GridMismatch.into());
    }
    let v = potential_on_grid(potential, grid)?;
    let h = grid.h();
    let (p, m) = (psi_plus.samples(), psi_minus.samples());
    let n = p.len();
    let gradient: f64 = (0..n - 1).map(|i| (p[i + 1] - p[i]) * (m[i + 1] - m[i])).sum::<f64>() / h;
    let mut potential_term = 0.0;
    for i in 0..n {
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        potential_term += w * (v[i] - energy) * p[i] * m[i];
    }
    Ok(units.kinetic_prefactor() * gradient + potential_term * h)
}

/// `F(ψ + εη, ψ + εη; E) − F(ψ, ψ; E)` for eigenstate `index`.
pub fn functional_change(
    sol: &EigenSolution,
    index: usize,
    energy: f64,
    eta: &GridFunction<f64>,
    eps: f64,
) -> Result<f64, EigenError> {
    if index >= sol.len() {
        return Err(EigenError::IndexOutOfRange { index, count: sol.len() });
    }
    let psi = &sol.eigenfunctions[index];
    let perturbed = psi.zip_with(eta, |a, b| a + eps * b)?;
    let f = |x: &GridFunction<f64>| energy_functional(x, x, &sol.potential, energy, &sol.units);
    Ok(f(&perturbed)? - f(psi)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationarityReport {
    pub energy: f64,
    pub epsilon: f64,
    /// `|ΔF|` at `ε` for each perturbation.
    pub delta_large: Vec<f64>,
    /// `|ΔF|` at `ε/10` for each perturbation.
    pub delta_small: Vec<f64>,
    /// `log10(|ΔF(ε)| / |ΔF(ε/10)|)` per perturbation.
    pub exponents: Vec<f64>,
    pub min_exponent: f64,
    pub stationary: bool,
}

pub const STATIONARITY_PERTURBATIONS: usize = 10;

/// Random smooth perturbation vanishing at both endpoints: a mix of the first
/// five sine modes of the interval.
pub fn dirichlet_perturbation(grid: &Grid, rng: &mut impl Rng) -> GridFunction<f64> {
    let amps: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut eta = GridFunction::from_fn(*grid, |x| {
        let s = (x - grid.a()) / grid.length();
        amps.iter().enumerate().map(|(j, a)| a * (std::f64::consts::PI * (j + 1) as f64 * s).sin()).sum()
    });
    let n = grid.len();
    eta.samples_mut()[0] = 0.0;
    eta.samples_mut()[n - 1] = 0.0;
    eta
}

/// Stationarity of the energy functional at eigenpair `index`: the response
/// to perturbations must scale as `ε²`.
pub fn stationarity_check(
    sol: &EigenSolution,
    index: usize,
    eps: f64,
) -> Result<StationarityReport, EigenError> {
    let energy =
        sol.energies.get(index).copied().ok_or(EigenError::IndexOutOfRange { index, count: sol.len() })?;
    stationarity_check_at(sol, index, energy, eps, &DEFAULT_TOLERANCES)
}

/// As [`stationarity_check`] but evaluating the functional at an arbitrary
/// `energy`, which is how a non-eigenvalue shows up as a linear response.
pub fn stationarity_check_at(
    sol: &EigenSolution,
    index: usize,
    energy: f64,
    eps: f64,
    tol: &Tolerances,
) -> Result<StationarityReport, EigenError> {
    if !(eps > 0.0 && eps <= 0.1) {
        return Err(EigenError::BadPerturbation(eps));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x57a7_1017 + index as u64);
    let mut delta_large = Vec::new();
    let mut delta_small = Vec::new();
    let mut exponents = Vec::new();
    for _ in 0..STATIONARITY_PERTURBATIONS {
        let eta = dirichlet_perturbation(&sol.grid, &mut rng);
        let big = functional_change(sol, index, energy, &eta, eps)?.abs();
        let small = functional_change(sol, index, energy, &eta, eps / 10.0)?.abs();
        delta_large.push(big);
        delta_small.push(small);
        exponents.push(if big == 0.0 && small == 0.0 { f64::INFINITY } else { (big / small).log10() });
    }
    let min_exponent = exponents.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(StationarityReport {
        energy,
        epsilon: eps,
        delta_large,
        delta_small,
        exponents,
        min_exponent,
        stationary: min_exponent >= tol.stationarity_exponent,
    })
}
