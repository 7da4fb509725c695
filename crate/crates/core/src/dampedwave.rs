//! Damped stationary wave equation `ψ'' + 2ξψ' + (2mE/ħ²)ψ = 0`.
//!
//! The causal and retrocausal equations carry identical coefficients, so the
//! pair shares one stable equation (unlike the classical oscillator pair,
//! whose damping terms have opposite signs). Writing `ψ = e^{−ξx}u` turns the
//! equation into `u'' = (ξ² − k²)u` with `k² = 2mE/ħ²`, which gives both the
//! closed-form free solution and the hard-wall well spectrum
//! `E_n = ħ²/(2m) (n²π²/L² + ξ²)`.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::config::{Tolerances, DEFAULT_TOLERANCES};
use crate::eigensolver::UnitsConfig;
use crate::grid::{Grid, GridError, GridFunction};
use crate::lagrangian::ClassicalOde;
use crate::ode::rk4_second_order;
use crate::oscillator::DampingRegime;
use crate::Direction;

/// Regime of the damped wave equation: same taxonomy as the oscillator, by
/// the sign of `ξ² − k²`.
pub type DampedRegime = DampingRegime;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DampedError {
    #[error("{op}: {name} = {value} {reason}")]
    Precondition { op: &'static str, name: &'static str, value: f64, reason: &'static str },
    #[error("solution unstable at x = {x}: |psi| = {magnitude:e} exceeds {limit:e}")]
    Unstable { x: f64, magnitude: f64, limit: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

fn require_positive(op: &'static str, name: &'static str, value: f64) -> Result<(), DampedError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(DampedError::Precondition { op, name, value, reason: "must be finite and > 0" })
    }
}

fn require_non_negative(op: &'static str, name: &'static str, value: f64) -> Result<(), DampedError> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(DampedError::Precondition { op, name, value, reason: "must be finite and >= 0" })
    }
}

fn check_units(op: &'static str, units: &UnitsConfig) -> Result<(), DampedError> {
    require_positive(op, "hbar", units.hbar)?;
    require_positive(op, "mass", units.mass)?;
    require_positive(op, "c_light", units.c_light)
}

/// `ξ = m²c / (2ħB)`. The undamped limit is `B → ∞`, so `B = 0` is refused.
pub fn xi_from_params(m: f64, c_light: f64, hbar: f64, b: f64) -> Result<f64, DampedError> {
    const OP: &str = "xi_from_params";
    require_positive(OP, "m", m)?;
    require_positive(OP, "c_light", c_light)?;
    require_positive(OP, "hbar", hbar)?;
    require_positive(OP, "B", b)?;
    Ok(m * m * c_light / (2.0 * hbar * b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DampedWaveParams {
    pub xi: f64,
    pub energy: f64,
    pub units: UnitsConfig,
}

impl DampedWaveParams {
    pub fn new(xi: f64, energy: f64, units: UnitsConfig) -> Result<Self, DampedError> {
        let p = Self { xi, energy, units };
        p.validate()?;
        Ok(p)
    }

    /// Parameters whose free wavenumber is `k` (`E = ħ²k²/(2m)`).
    pub fn from_wavenumber(xi: f64, k: f64, units: UnitsConfig) -> Result<Self, DampedError> {
        require_non_negative("DampedWaveParams", "k", k)?;
        Self::new(xi, units.hbar * units.hbar * k * k / (2.0 * units.mass), units)
    }

    pub fn validate(&self) -> Result<(), DampedError> {
        const OP: &str = "DampedWaveParams";
        require_non_negative(OP, "xi", self.xi)?;
        require_non_negative(OP, "E", self.energy)?;
        check_units(OP, &self.units)
    }

    /// `k² = 2mE/ħ²`.
    pub fn k_squared(&self) -> f64 {
        2.0 * self.units.mass * self.energy / (self.units.hbar * self.units.hbar)
    }

    /// Free-particle wavenumber `√(2mE)/ħ`.
    pub fn k_wave(&self) -> f64 {
        (2.0 * self.units.mass * self.energy).sqrt() / self.units.hbar
    }

    /// Characteristic roots `−ξ ± √(ξ² − k²)`, `+` first.
    pub fn roots(&self) -> [Complex64; 2] {
        let s = self.s();
        [-self.xi + s, -self.xi - s]
    }

    /// `√(ξ² − k²)` on the principal branch.
    fn s(&self) -> Complex64 {
        Complex64::new(self.xi * self.xi - self.k_squared(), 0.0).sqrt()
    }

    /// The equation as `1·ψ'' + 2ξ·ψ' + k²·ψ`; both directions carry the same
    /// coefficients.
    pub fn ode(&self, _direction: Direction) -> ClassicalOde {
        ClassicalOde { mass_coeff: 1.0, damping_coeff: 2.0 * self.xi, stiffness_coeff: self.k_squared() }
    }
}

pub fn classify_damped(p: &DampedWaveParams) -> DampedRegime {
    classify_damped_with(p, &DEFAULT_TOLERANCES)
}

pub fn classify_damped_with(p: &DampedWaveParams, tol: &Tolerances) -> DampedRegime {
    let xi2 = p.xi * p.xi;
    let k2 = p.k_squared();
    DampingRegime::from_discriminant(p.xi == 0.0, xi2 - k2, xi2.max(k2), tol.critical_band)
}

/// `{"xi", "k", "regime", "roots": [[re, im], [re, im]]}`.
pub fn regime_report(p: &DampedWaveParams) -> serde_json::Value {
    json!({
        "xi": p.xi,
        "k": p.k_wave(),
        "regime": classify_damped(p).as_str(),
        "roots": p.roots(),
    })
}

/// Closed-form solution with `ψ(a) = psi0`, `ψ'(a) = dpsi0`:
/// `e^{−ξx}[ψ0 cosh(sx) + (ψ0' + ξψ0) sinh(sx)/s]`, `s = √(ξ² − k²)`, with
/// `x` measured from `grid.a`.
pub fn closed_form_free(
    p: &DampedWaveParams,
    grid: &Grid,
    psi0: Complex64,
    dpsi0: Complex64,
) -> GridFunction<Complex64> {
    let s = p.s();
    let [lp, lm] = p.roots();
    let slope = dpsi0 + psi0 * p.xi;
    GridFunction::from_fn(*grid, |x| {
        let x = x - grid.a();
        let ep = (lp * x).exp();
        let em = (lm * x).exp();
        let cosh = (ep + em) * 0.5;
        let z = s * x;
        let sinh_over_s = if z.norm() < 1e-3 {
            let z2 = z * z;
            (-p.xi * x).exp() * x * (Complex64::new(1.0, 0.0) + z2 / 6.0 + z2 * z2 / 120.0)
        } else {
            (ep - em) / (s * 2.0)
        };
        psi0 * cosh + slope * sinh_over_s
    })
}

/// RK4 integration of the equation for `direction` from `grid.a`.
pub fn integrate_damped(
    p: &DampedWaveParams,
    direction: Direction,
    grid: &Grid,
    psi0: Complex64,
    dpsi0: Complex64,
    tol: &Tolerances,
) -> Result<GridFunction<Complex64>, DampedError> {
    p.validate()?;
    let ode = p.ode(direction);
    let amplitude = psi0.norm().max(dpsi0.norm());
    let limit = if amplitude > 0.0 { tol.instability_factor * amplitude } else { f64::INFINITY };
    let accel = |y: Complex64, v: Complex64| -(v * ode.damping_coeff + y * ode.stiffness_coeff);
    let (ys, _) = rk4_second_order(accel, psi0, dpsi0, grid.h(), grid.len() - 1, limit)
        .map_err(|b| DampedError::Unstable { x: grid.x(b.step), magnitude: b.magnitude, limit: b.limit })?;
    Ok(GridFunction::new(*grid, ys)?)
}

/// Free-particle solution by both routes.
#[derive(Debug, Clone, PartialEq)]
pub struct DampedSolution {
    /// RK4 integration.
    pub psi: GridFunction<Complex64>,
    /// Characteristic-root closed form.
    pub closed_form: GridFunction<Complex64>,
    /// `max |psi − closed_form|`.
    pub max_deviation: f64,
    pub regime: DampedRegime,
}

pub fn solve_damped_free(
    p: &DampedWaveParams,
    grid: &Grid,
    psi0: Complex64,
    dpsi0: Complex64,
) -> Result<DampedSolution, DampedError> {
    let psi = integrate_damped(p, Direction::Causal, grid, psi0, dpsi0, &DEFAULT_TOLERANCES)?;
    let closed_form = closed_form_free(p, grid, psi0, dpsi0);
    let max_deviation = psi.max_abs_diff(&closed_form)?;
    Ok(DampedSolution { psi, closed_form, max_deviation, regime: classify_damped(p) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SameFormReport {
    pub max_deviation: f64,
    pub causal_decays: bool,
    pub retrocausal_decays: bool,
}

/// Solves the causal and the retrocausal equation from the same data and
/// compares them pointwise.
pub fn retrocausal_same_form_check(
    p: &DampedWaveParams,
    grid: &Grid,
    psi0: Complex64,
    dpsi0: Complex64,
) -> Result<SameFormReport, DampedError> {
    let plus = integrate_damped(p, Direction::Causal, grid, psi0, dpsi0, &DEFAULT_TOLERANCES)?;
    let minus = integrate_damped(p, Direction::Retrocausal, grid, psi0, dpsi0, &DEFAULT_TOLERANCES)?;
    Ok(SameFormReport {
        max_deviation: plus.max_abs_diff(&minus)?,
        causal_decays: decays(&plus),
        retrocausal_decays: decays(&minus),
    })
}

/// Largest `|ψ|` over the last tenth of the window is below that over the
/// first tenth.
fn decays(psi: &GridFunction<Complex64>) -> bool {
    let s = psi.samples();
    let w = (s.len() / 10).max(1);
    let peak = |part: &[Complex64]| part.iter().map(|z| z.norm()).fold(0.0, f64::max);
    peak(&s[s.len() - w..]) < peak(&s[..w]) * (1.0 - 1e-6)
}

/// Decay rate of the envelope of `|ψ|`, from a least-squares line through
/// `ln|ψ|` at its local maxima (each refined by parabolic interpolation).
/// `None` when fewer than three interior maxima exist.
pub fn envelope_decay_rate(psi: &GridFunction<Complex64>) -> Option<f64> {
    let grid = psi.grid();
    let m: Vec<f64> = psi.samples().iter().map(|z| z.norm()).collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 1..m.len().saturating_sub(1) {
        if m[i] > m[i - 1] && m[i] >= m[i + 1] && m[i] > 0.0 {
            let denom = m[i - 1] - 2.0 * m[i] + m[i + 1];
            let (offset, peak) = if denom < 0.0 {
                let d = 0.5 * (m[i - 1] - m[i + 1]) / denom;
                (d, m[i] - 0.25 * (m[i - 1] - m[i + 1]) * d)
            } else {
                (0.0, m[i])
            };
            xs.push(grid.x(i) + offset * grid.h());
            ys.push(peak.ln());
        }
    }
    if xs.len() < 3 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(-sxy / sxx)
}

/// One Dirichlet mode of the damped hard-wall well on `[0, L]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DampedWellMode {
    pub n: usize,
    pub energy: f64,
    /// `|ψ(L)| / max|ψ|` of a shooting integration at this energy.
    pub shooting_residual: f64,
}

pub const SHOOTING_POINTS: usize = 20_001;

/// First `count` energies of the damped well, each cross-checked by shooting.
pub fn damped_well_modes(
    xi: f64,
    length: f64,
    units: &UnitsConfig,
    count: usize,
) -> Result<Vec<DampedWellMode>, DampedError> {
    const OP: &str = "damped_well_modes";
    require_non_negative(OP, "xi", xi)?;
    require_positive(OP, "L", length)?;
    check_units(OP, units)?;
    (1..=count)
        .map(|n| {
            let energy = damped_well_energy(xi, length, units, n);
            let shooting_residual = shooting_residual(xi, energy, length, units, SHOOTING_POINTS)?;
            Ok(DampedWellMode { n, energy, shooting_residual })
        })
        .collect()
}

/// `E_n = ħ²/(2m) (n²π²/L² + ξ²)`.
pub fn damped_well_energy(xi: f64, length: f64, units: &UnitsConfig, n: usize) -> f64 {
    let kn = n as f64 * std::f64::consts::PI / length;
    units.kinetic_prefactor() * (kn * kn + xi * xi)
}

/// `e^{−ξx} sin(nπx/L)`, unnormalized.
pub fn damped_well_shape(xi: f64, length: f64, n: usize, grid: &Grid) -> GridFunction<f64> {
    let kn = n as f64 * std::f64::consts::PI / length;
    GridFunction::from_fn(*grid, |x| (-xi * x).exp() * (kn * x).sin())
}

/// Integrates the damped equation on `[0, L]` from `ψ(0) = 0`, `ψ'(0) = 1`
/// and returns `ψ(L)` relative to `max|ψ|`.
pub fn shooting_residual(
    xi: f64,
    energy: f64,
    length: f64,
    units: &UnitsConfig,
    points: usize,
) -> Result<f64, DampedError> {
    let (end, peak) = shoot(xi, energy, length, units, points)?;
    Ok(end.abs() / peak)
}

/// Signed `ψ(L)` and `max|ψ|` of the shooting integration.
pub fn shoot(
    xi: f64,
    energy: f64,
    length: f64,
    units: &UnitsConfig,
    points: usize,
) -> Result<(f64, f64), DampedError> {
    let grid = Grid::new(0.0, length, points)?;
    let k2 = 2.0 * units.mass * energy / (units.hbar * units.hbar);
    let (ys, _) = rk4_second_order(
        |y: f64, v: f64| -(2.0 * xi * v + k2 * y),
        0.0,
        1.0,
        grid.h(),
        points - 1,
        f64::INFINITY,
    )
    .expect("guard disabled");
    let peak = ys.iter().fold(0.0_f64, |m, y| m.max(y.abs()));
    Ok((ys[points - 1], peak))
}
