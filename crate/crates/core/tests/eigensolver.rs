mod common;

use std::f64::consts::PI;

use common::{rel_err, well_energy, well_state};
use fracvar::eigensolver::{
    build_hamiltonian, density, density_complex, energy_functional, make_pair, solve_paired_spectrum,
    solve_spectrum, stationarity_check, superposition_density, superposition_pair, EigenError, EigenSolution,
    UnitsConfig,
};
use fracvar::lagrangian::PotentialSpec;
use fracvar::Grid;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn well(length: f64, n: usize, units: UnitsConfig, count: usize) -> EigenSolution {
    let grid = Grid::new(0.0, length, n).unwrap();
    let h = build_hamiltonian(&PotentialSpec::InfiniteWell { length }, &grid, &units).unwrap();
    solve_spectrum(&h, count).unwrap()
}

fn harmonic(k: f64, units: UnitsConfig, count: usize) -> EigenSolution {
    let grid = Grid::new(-12.0, 12.0, 2000).unwrap();
    let h = build_hamiltonian(&PotentialSpec::Harmonic { k }, &grid, &units).unwrap();
    solve_spectrum(&h, count).unwrap()
}

#[test]
fn well_energies_and_states() {
    let sol = well(1.0, 2000, UnitsConfig::default(), 5);
    for (i, (&e, psi)) in sol.energies.iter().zip(&sol.eigenfunctions).enumerate() {
        let n = i + 1;
        assert!(rel_err(e, well_energy(n, 1.0, 1.0, 1.0)) <= 1e-3, "n={n}");
        let err = sol
            .grid
            .points()
            .zip(psi.samples())
            .map(|(x, &v)| (v - well_state(n, 1.0, x)).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-4, "n={n}: {err:e}");
    }
}

#[test]
fn well_with_physical_units() {
    let units = UnitsConfig { hbar: 0.5, mass: 3.0, c_light: 1.0 };
    let sol = well(2.5, 2000, units, 5);
    for (i, &e) in sol.energies.iter().enumerate() {
        assert!(rel_err(e, well_energy(i + 1, 2.5, 0.5, 3.0)) <= 1e-3);
    }
}

#[test]
fn harmonic_ladder() {
    for (k, units) in
        [(1.0, UnitsConfig::default()), (4.0, UnitsConfig { hbar: 1.0, mass: 2.0, c_light: 1.0 })]
    {
        let sol = harmonic(k, units, 6);
        let omega = (k / units.mass).sqrt();
        for (n, &e) in sol.energies.iter().enumerate() {
            let want = units.hbar * omega * (n as f64 + 0.5);
            assert!(rel_err(e, want) <= 1e-3, "n={n}: {e} vs {want}");
        }
    }
}

/// The `n`-th state has `n` interior nodes.
#[test]
fn node_counts() {
    let sol = harmonic(1.0, UnitsConfig::default(), 6);
    for (n, psi) in sol.eigenfunctions.iter().enumerate() {
        assert_eq!(psi.sign_changes(1e-6), n);
    }
}

#[test]
fn rayleigh_quotients_and_residuals() {
    let grid = Grid::new(-12.0, 12.0, 2000).unwrap();
    let h = build_hamiltonian(
        &PotentialSpec::Polynomial { coeffs: vec![0.0, 0.3, 0.5, 0.0, 0.05] },
        &grid,
        &UnitsConfig::default(),
    )
    .unwrap();
    let sol = solve_spectrum(&h, 5).unwrap();
    for ((&e, psi), &res) in sol.energies.iter().zip(&sol.eigenfunctions).zip(&sol.residuals) {
        let rq = h.rayleigh_quotient(psi).unwrap();
        assert!(rel_err(rq, e) <= 1e-8);
        assert!(res <= 1e-7, "{res:e}");
    }
    assert!(sol.energies.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn orthonormal_eigenfunctions() {
    let sol = harmonic(1.0, UnitsConfig::default(), 5);
    let h = sol.grid.h();
    for (i, a) in sol.eigenfunctions.iter().enumerate() {
        for (j, b) in sol.eigenfunctions.iter().enumerate() {
            let dot: f64 = a.samples().iter().zip(b.samples()).map(|(x, y)| x * y).sum::<f64>() * h;
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((dot - want).abs() <= 1e-9, "({i},{j}): {dot}");
        }
    }
}

#[test]
fn both_directions_share_a_spectrum() {
    let grid = Grid::new(0.0, 1.0, 2000).unwrap();
    let paired = solve_paired_spectrum(
        &PotentialSpec::InfiniteWell { length: 1.0 },
        &grid,
        &UnitsConfig::default(),
        5,
    )
    .unwrap();
    assert!(paired.max_energy_deviation() <= 1e-12);
}

#[test]
fn conjugacy_and_density_identity() {
    let sol = harmonic(1.0, UnitsConfig::default(), 3);
    let pair = make_pair(&sol, 2).unwrap();
    for t in [0.0, 0.37, 5.0, 123.4] {
        let plus = pair.psi_plus(t);
        let minus = pair.psi_minus(t);
        for (p, m) in plus.samples().iter().zip(minus.samples()) {
            assert_eq!(*m, p.conj());
        }
        let rho = density(&pair, t);
        for (r, p) in rho.samples().iter().zip(plus.samples()) {
            assert!((r - p.norm_sqr()).abs() <= 1e-12);
        }
        assert!(density_complex(&pair, t).samples().iter().all(|z| z.im.abs() <= 1e-12));
        let rho0 = density(&pair, 0.0);
        assert!(rho.max_abs_diff(&rho0).unwrap() <= 1e-12);
    }
}

/// Two-level superposition: the density oscillates at `(E2 − E1)/ħ`, so it is
/// mirrored `x → L − x` after half a period in the well.
#[test]
fn two_level_density_beats() {
    let sol = well(1.0, 2000, UnitsConfig::default(), 2);
    let c = Complex64::new(0.5_f64.sqrt(), 0.0);
    let coeffs = [c, c];
    let half_period = PI / (sol.energies[1] - sol.energies[0]);
    let rho0 = superposition_density(&sol, &coeffs, 0.0).unwrap();
    let rho1 = superposition_density(&sol, &coeffs, half_period).unwrap();
    let mirrored = rho0.reversed();
    assert!(rho1.max_abs_diff(&mirrored).unwrap() <= 1e-8);
    assert!(rho1.max_abs_diff(&rho0).unwrap() > 0.1);
}

#[test]
fn superposition_norm_is_conserved() {
    let sol = harmonic(1.0, UnitsConfig::default(), 4);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let raw: Vec<Complex64> =
        (0..4).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let coeffs: Vec<Complex64> = raw.iter().map(|c| c / norm).collect();
    for _ in 0..20 {
        let t = rng.random_range(0.0..50.0);
        let (plus, minus) = superposition_pair(&sol, &coeffs, t).unwrap();
        for (p, m) in plus.samples().iter().zip(minus.samples()) {
            assert!((m - p.conj()).norm() <= 1e-15);
        }
        let total = superposition_density(&sol, &coeffs, t).unwrap().integrate();
        assert!((total - 1.0).abs() <= 1e-10, "t={t}: {total}");
    }
}

#[test]
fn unnormalized_coefficients_are_rejected() {
    let sol = harmonic(1.0, UnitsConfig::default(), 2);
    let bad = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
    assert!(matches!(superposition_pair(&sol, &bad, 0.0), Err(EigenError::Unnormalized(_))));
    let many = [Complex64::new(1.0, 0.0); 3];
    assert!(matches!(superposition_pair(&sol, &many, 0.0), Err(EigenError::TooManyCoefficients { .. })));
}

#[test]
fn functional_vanishes_at_eigenpairs_and_is_stationary() {
    let sol = harmonic(1.0, UnitsConfig::default(), 3);
    for (i, psi) in sol.eigenfunctions.iter().enumerate() {
        let f = energy_functional(psi, psi, &sol.potential, sol.energies[i], &sol.units).unwrap();
        assert!(f.abs() <= 1e-6, "{f:e}");
        let report = stationarity_check(&sol, i, 1e-3).unwrap();
        assert!(report.stationary && report.min_exponent >= 1.9, "{report:?}");
    }
}

#[test]
fn wrong_energy_is_not_stationary() {
    use fracvar::config::DEFAULT_TOLERANCES;
    use fracvar::eigensolver::stationarity_check_at;
    let sol = harmonic(1.0, UnitsConfig::default(), 1);
    let report = stationarity_check_at(&sol, 0, sol.energies[0] + 0.3, 1e-3, &DEFAULT_TOLERANCES).unwrap();
    assert!(report.min_exponent < 1.5, "{report:?}");
}

#[test]
fn preconditions() {
    let tiny = Grid::new(0.0, 1.0, 8).unwrap();
    let units = UnitsConfig::default();
    assert!(matches!(
        build_hamiltonian(&PotentialSpec::Free, &tiny, &units),
        Err(EigenError::GridTooSmall { .. })
    ));
    let grid = Grid::new(0.0, 1.0, 100).unwrap();
    assert!(build_hamiltonian(&PotentialSpec::InfiniteWell { length: 2.0 }, &grid, &units).is_err());
    let bad_units = UnitsConfig { hbar: 0.0, ..units };
    assert!(build_hamiltonian(&PotentialSpec::Free, &grid, &bad_units).is_err());
    let h = build_hamiltonian(&PotentialSpec::Free, &grid, &units).unwrap();
    assert!(matches!(solve_spectrum(&h, 1000), Err(EigenError::TooManyStates { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Scaling `ħ²/m` scales every well energy by the same factor.
    #[test]
    fn well_scaling(hbar in 0.2..3.0_f64, mass in 0.2..3.0_f64, length in 0.5..4.0_f64) {
        let units = UnitsConfig { hbar, mass, c_light: 1.0 };
        let sol = well(length, 400, units, 3);
        let base = well(length, 400, UnitsConfig::default(), 3);
        for (a, b) in sol.energies.iter().zip(&base.energies) {
            prop_assert!(rel_err(*a, b * hbar * hbar / mass) <= 1e-10);
        }
    }
}
