//! Built-in property checks run by `fracvar verify`.
//!
//! Each check compares a solver against a closed form or a structural
//! identity on a small problem and reports the worst deviation it saw.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dampedwave::{damped_well_modes, envelope_decay_rate, solve_damped_free, DampedWaveParams};
use crate::eigensolver::{
    build_hamiltonian, density, make_pair, solve_spectrum, stationarity_check, superposition_density,
    UnitsConfig,
};
use crate::fracops::{compose_half, frac_deriv, FracOrder, Scheme};
use crate::grid::{Grid, GridFunction};
use crate::lagrangian::{
    derive_causal_eom, derive_retrocausal_eom, parse_lagrangian, reduce_integer_orders, ClassicalOde,
    LagrangianSpec, PotentialSpec, ProductTerm,
};
use crate::oscillator::{solve_causal, solve_retrocausal, time_reverse, OscillatorParams};
use crate::special::gamma_fn;
use crate::Direction;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn bound(module: &'static str, name: &'static str, worst: f64, limit: f64) -> Self {
        Self {
            module,
            name,
            passed: worst <= limit,
            detail: format!("worst {worst:.3e} (limit {limit:.1e})"),
        }
    }

    fn failed(module: &'static str, name: &'static str, err: impl std::fmt::Display) -> Self {
        Self { module, name, passed: false, detail: format!("error: {err}") }
    }

    /// `PASS fracops power-law: worst 1.2e-3 (limit 1.0e-2)`.
    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} {} {}: {}", self.module, self.name, self.detail)
    }
}

fn check<E: std::fmt::Display>(
    module: &'static str,
    name: &'static str,
    limit: f64,
    worst: impl FnOnce() -> Result<f64, E>,
) -> CheckResult {
    match worst() {
        Ok(w) => CheckResult::bound(module, name, w, limit),
        Err(e) => CheckResult::failed(module, name, e),
    }
}

pub fn run_all() -> Vec<CheckResult> {
    vec![
        check("fracops", "power-law", 1e-2, power_law),
        check("fracops", "integer-reduction", 1e-3, integer_reduction),
        check("fracops", "half-composition", 2e-2, half_composition),
        check("lagrangian", "damped-pair", 0.0, damped_pair),
        check("lagrangian", "direction-symmetry", 0.0, direction_symmetry),
        check("oscillator", "reflection", 1e-5, reflection),
        check("eigensolver", "well-spectrum", 1e-3, well_spectrum),
        check("eigensolver", "harmonic-spectrum", 1e-3, harmonic_spectrum),
        check("eigensolver", "density", 1e-12, density_identity),
        check("eigensolver", "superposition-norm", 1e-10, superposition_norm),
        check("eigensolver", "stationarity", 0.1, stationarity),
        check("dampedwave", "closed-form", 1e-6, damped_closed_form),
        check("dampedwave", "well-shooting", 1e-8, damped_well),
        check("dampedwave", "envelope", 1e-2, envelope),
    ]
}

fn rel(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

fn power_law() -> Result<f64, String> {
    let grid = Grid::new(0.0, 1.0, 2048).map_err(|e| e.to_string())?;
    let start = grid.index_from_fraction(0.1);
    let mut worst = 0.0_f64;
    for k in 1..=3 {
        for alpha in [0.25, 0.5, 0.75] {
            let f = GridFunction::from_fn(grid, |t| t.powi(k));
            let order = FracOrder::new(alpha).map_err(|e| e.to_string())?;
            let d = frac_deriv(&f, order, Scheme::GrunwaldLetnikov, Direction::Causal)
                .map_err(|e| e.to_string())?;
            let kf = k as f64;
            let c = gamma_fn(kf + 1.0).map_err(|e| e.to_string())?
                / gamma_fn(kf + 1.0 - alpha).map_err(|e| e.to_string())?;
            for i in start..grid.len() {
                worst = worst.max(rel(d.samples()[i], c * grid.x(i).powf(kf - alpha)));
            }
        }
    }
    Ok(worst)
}

fn integer_reduction() -> Result<f64, String> {
    let grid = Grid::new(0.0, 1.0, 1001).map_err(|e| e.to_string())?;
    let f = GridFunction::from_fn(grid, f64::sin);
    let one = FracOrder::new(1.0).map_err(|e| e.to_string())?;
    let zero = FracOrder::new(0.0).map_err(|e| e.to_string())?;
    let mut worst = 0.0_f64;
    for dir in [Direction::Causal, Direction::Retrocausal] {
        let id = frac_deriv(&f, zero, Scheme::default(), dir).map_err(|e| e.to_string())?;
        if id != f {
            return Err(format!("order 0 is not the identity ({dir})"));
        }
    }
    let retro = frac_deriv(&f, one, Scheme::default(), Direction::Retrocausal).map_err(|e| e.to_string())?;
    for (i, v) in retro.samples().iter().enumerate() {
        worst = worst.max((v + grid.x(i).cos()).abs());
    }
    Ok(worst)
}

fn half_composition() -> Result<f64, String> {
    let grid = Grid::new(0.0, 1.0, 2048).map_err(|e| e.to_string())?;
    let start = grid.index_from_fraction(0.1);
    let mut worst = 0.0_f64;
    for k in [1, 2] {
        let f = GridFunction::from_fn(grid, |t| t.powi(k));
        let out = compose_half(&f, Direction::Causal).map_err(|e| e.to_string())?;
        for i in start..grid.len() - 1 {
            let want = k as f64 * grid.x(i).powi(k - 1);
            worst = worst.max(rel(out.result.samples()[i], want));
        }
    }
    Ok(worst)
}

fn damped_pair() -> Result<f64, String> {
    let spec = parse_lagrangian("1*q[1] + 0.3*q[0.5] + 4*q[0]").map_err(|e| e.to_string())?;
    let causal = reduce_integer_orders(&derive_causal_eom(&spec).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let retro = reduce_integer_orders(&derive_retrocausal_eom(&spec).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let want_c = ClassicalOde { mass_coeff: 1.0, damping_coeff: 0.3, stiffness_coeff: 4.0 };
    let want_r = ClassicalOde { damping_coeff: -0.3, ..want_c };
    Ok(if causal == want_c && retro == want_r { 0.0 } else { 1.0 })
}

fn direction_symmetry() -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let mut mismatches = 0.0;
    for _ in 0..100 {
        let mut orders: Vec<i64> = (0..rng.random_range(0..5)).map(|_| rng.random_range(0..8)).collect();
        orders.sort_unstable();
        orders.dedup();
        let terms = orders
            .iter()
            .map(|&o| ProductTerm {
                coeff: rng.random_range(0.1..5.0),
                order: num_rational::Rational64::new(o, 4),
            })
            .collect();
        let spec = LagrangianSpec { terms, potential: PotentialSpec::Harmonic { k: 2.0 } };
        let c = derive_causal_eom(&spec).map_err(|e| e.to_string())?;
        let r = derive_retrocausal_eom(&spec).map_err(|e| e.to_string())?;
        if c.terms != r.terms || c.gradient != r.gradient || c.direction == r.direction {
            mismatches += 1.0;
        }
    }
    Ok(mismatches)
}

fn reflection() -> Result<f64, String> {
    let grid = Grid::with_spacing(0.0, 10.0, 1e-3).map_err(|e| e.to_string())?;
    let mut worst = 0.0_f64;
    for c in [0.5, 2.0, 5.0] {
        let p = OscillatorParams::new(1.0, c, 1.0, 1.0, 0.3).map_err(|e| e.to_string())?;
        let causal = solve_causal(&p, &grid).map_err(|e| e.to_string())?;
        let retro = solve_retrocausal(&p.reflected(), &grid).map_err(|e| e.to_string())?;
        let dev =
            retro.position().max_abs_diff(&time_reverse(&causal.position())).map_err(|e| e.to_string())?;
        worst = worst.max(dev);
    }
    Ok(worst)
}

fn well_spectrum() -> Result<f64, String> {
    let grid = Grid::new(0.0, 1.0, 2000).map_err(|e| e.to_string())?;
    let h = build_hamiltonian(&PotentialSpec::InfiniteWell { length: 1.0 }, &grid, &UnitsConfig::default())
        .map_err(|e| e.to_string())?;
    let sol = solve_spectrum(&h, 5).map_err(|e| e.to_string())?;
    Ok(sol
        .energies
        .iter()
        .enumerate()
        .map(|(i, &e)| rel(e, ((i + 1) * (i + 1)) as f64 * PI * PI / 2.0))
        .fold(0.0, f64::max))
}

fn harmonic_spectrum() -> Result<f64, String> {
    let grid = Grid::new(-12.0, 12.0, 2000).map_err(|e| e.to_string())?;
    let h = build_hamiltonian(&PotentialSpec::Harmonic { k: 1.0 }, &grid, &UnitsConfig::default())
        .map_err(|e| e.to_string())?;
    let sol = solve_spectrum(&h, 6).map_err(|e| e.to_string())?;
    Ok(sol.energies.iter().enumerate().map(|(i, &e)| rel(e, i as f64 + 0.5)).fold(0.0, f64::max))
}

fn well_solution(n: usize, count: usize) -> Result<crate::eigensolver::EigenSolution, String> {
    let grid = Grid::new(0.0, 1.0, n).map_err(|e| e.to_string())?;
    let h = build_hamiltonian(&PotentialSpec::InfiniteWell { length: 1.0 }, &grid, &UnitsConfig::default())
        .map_err(|e| e.to_string())?;
    solve_spectrum(&h, count).map_err(|e| e.to_string())
}

fn density_identity() -> Result<f64, String> {
    let sol = well_solution(500, 3)?;
    let mut worst = 0.0_f64;
    for index in 0..3 {
        let pair = make_pair(&sol, index).map_err(|e| e.to_string())?;
        let still = density(&pair, 0.0);
        for t in [0.1, 1.0, 7.3] {
            let plus = pair.psi_plus(t);
            let minus = pair.psi_minus(t);
            if plus.samples().iter().zip(minus.samples()).any(|(p, m)| p.conj() != *m) {
                return Err(format!("psi_minus is not conj(psi_plus) at t = {t}"));
            }
            let rho = density(&pair, t);
            let abs2 = plus.map(|z| z.norm_sqr());
            worst = worst.max(rho.max_abs_diff(&abs2).map_err(|e| e.to_string())?);
            worst = worst.max(rho.max_abs_diff(&still).map_err(|e| e.to_string())?);
        }
    }
    Ok(worst)
}

fn superposition_norm() -> Result<f64, String> {
    let sol = well_solution(500, 3)?;
    let c = [Complex64::new(0.6, 0.0), Complex64::from_polar(0.48, 1.1), Complex64::from_polar(0.64, -0.4)];
    let mut rng = ChaCha8Rng::seed_from_u64(38);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let t = rng.random_range(0.0..10.0);
        let rho = superposition_density(&sol, &c, t).map_err(|e| e.to_string())?;
        worst = worst.max((rho.integrate() - 1.0).abs());
    }
    Ok(worst)
}

/// Distance of the smallest fitted exponent below 2.
fn stationarity() -> Result<f64, String> {
    let sol = well_solution(1000, 3)?;
    let mut worst = 0.0_f64;
    for index in 0..3 {
        let report = stationarity_check(&sol, index, 1e-2).map_err(|e| e.to_string())?;
        worst = worst.max(2.0 - report.min_exponent);
    }
    Ok(worst)
}

fn damped_closed_form() -> Result<f64, String> {
    let grid = Grid::with_spacing(0.0, 10.0, 1e-3).map_err(|e| e.to_string())?;
    let mut worst = 0.0_f64;
    for (xi, k) in [(0.0, 1.0), (0.1, 1.0), (1.0, 1.0), (2.0, 1.0)] {
        let p =
            DampedWaveParams::from_wavenumber(xi, k, UnitsConfig::default()).map_err(|e| e.to_string())?;
        let sol = solve_damped_free(&p, &grid, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
            .map_err(|e| e.to_string())?;
        worst = worst.max(sol.max_deviation);
    }
    Ok(worst)
}

fn damped_well() -> Result<f64, String> {
    let mut worst = 0.0_f64;
    for xi in [0.0, 0.5, 1.0, 2.0] {
        let modes = damped_well_modes(xi, 1.0, &UnitsConfig::default(), 5).map_err(|e| e.to_string())?;
        worst = modes.iter().map(|m| m.shooting_residual).fold(worst, f64::max);
    }
    Ok(worst)
}

fn envelope() -> Result<f64, String> {
    let grid = Grid::with_spacing(0.0, 40.0, 1e-3).map_err(|e| e.to_string())?;
    let mut worst = 0.0_f64;
    for xi in [0.05, 0.1, 0.3] {
        let p =
            DampedWaveParams::from_wavenumber(xi, 1.0, UnitsConfig::default()).map_err(|e| e.to_string())?;
        let sol = solve_damped_free(&p, &grid, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
            .map_err(|e| e.to_string())?;
        let rate = envelope_decay_rate(&sol.psi).ok_or("too few envelope maxima")?;
        worst = worst.max(rel(rate, xi));
    }
    Ok(worst)
}
