//! Oracles shared by the integration and acceptance tests. None of them call
//! into the solver they are used to check.

#![allow(dead_code)]

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

/// `Γ(k+1)/Γ(k+1−α) (t−a)^{k−α}`: causal derivative of `(t−a)^k`.
pub fn power_law_causal(k: f64, alpha: f64, a: f64, t: f64) -> f64 {
    gamma(k + 1.0) / gamma(k + 1.0 - alpha) * (t - a).powf(k - alpha)
}

/// Retrocausal derivative of `(b−t)^k`, the mirror of [`power_law_causal`].
pub fn power_law_retro(k: f64, alpha: f64, b: f64, t: f64) -> f64 {
    gamma(k + 1.0) / gamma(k + 1.0 - alpha) * (b - t).powf(k - alpha)
}

/// Right-sided derivative of order `0 < α < 1` by direct quadrature:
///
/// `tD^α_b f(t) = [f(b)(b−t)^{−α} − ∫_0^{b−t} s^{−α} f'(t+s) ds] / Γ(1−α)`,
///
/// with `u = s^{1−α}` removing the weak singularity and composite Simpson on
/// the smooth remainder.
pub fn right_derivative_quadrature(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    alpha: f64,
    b: f64,
    t: f64,
) -> f64 {
    assert!(alpha > 0.0 && alpha < 1.0);
    let p = 1.0 - alpha;
    let upper = (b - t).powf(p);
    let panels = 4000;
    let du = upper / panels as f64;
    let g = |u: f64| df(t + u.powf(1.0 / p));
    let mut acc = g(0.0) + g(upper);
    for i in 1..panels {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * du);
    }
    let integral = acc * du / 3.0 / p;
    (f(b) * (b - t).powf(-alpha) - integral) / gamma(1.0 - alpha)
}

/// Closed-form solution of `y'' + 2γ y' + ω0² y = 0` with `y(0) = y0`,
/// `y'(0) = v0`, split by regime by hand.
pub fn damped_closed_form(gamma_: f64, omega0_sq: f64, y0: f64, v0: f64, t: f64) -> f64 {
    let disc = gamma_ * gamma_ - omega0_sq;
    if disc == 0.0 {
        (y0 + (v0 + gamma_ * y0) * t) * (-gamma_ * t).exp()
    } else if disc < 0.0 {
        let w = (-disc).sqrt();
        (-gamma_ * t).exp() * (y0 * (w * t).cos() + (v0 + gamma_ * y0) / w * (w * t).sin())
    } else {
        let s = disc.sqrt();
        let (r1, r2) = (-gamma_ + s, -gamma_ - s);
        let c1 = (v0 - r2 * y0) / (r1 - r2);
        let c2 = y0 - c1;
        c1 * (r1 * t).exp() + c2 * (r2 * t).exp()
    }
}

/// Oscillator `m q'' + c q' + k q = 0` from `(q0, v0)` at `t = 0`.
pub fn oscillator_closed_form(m: f64, c: f64, k: f64, q0: f64, v0: f64, t: f64) -> f64 {
    damped_closed_form(c / (2.0 * m), k / m, q0, v0, t)
}

/// `n²π²ħ²/(2mL²)`, `n ≥ 1`.
pub fn well_energy(n: usize, length: f64, hbar: f64, mass: f64) -> f64 {
    (n * n) as f64 * PI * PI * hbar * hbar / (2.0 * mass * length * length)
}

/// `√(2/L) sin(nπx/L)`.
pub fn well_state(n: usize, length: f64, x: f64) -> f64 {
    (2.0 / length).sqrt() * (n as f64 * PI * x / length).sin()
}

/// Plain RK4 for `y'' = −2ξ y' − k² y`, independent of the crate's integrator;
/// returns `y` at the end of `[0, length]`.
pub fn shoot_end(xi: f64, k2: f64, length: f64, steps: usize) -> (f64, f64) {
    let h = length / steps as f64;
    let f = |y: f64, v: f64| (v, -2.0 * xi * v - k2 * y);
    let (mut y, mut v) = (0.0_f64, 1.0_f64);
    let mut peak = 0.0_f64;
    for _ in 0..steps {
        let (a1, b1) = f(y, v);
        let (a2, b2) = f(y + 0.5 * h * a1, v + 0.5 * h * b1);
        let (a3, b3) = f(y + 0.5 * h * a2, v + 0.5 * h * b2);
        let (a4, b4) = f(y + h * a3, v + h * b3);
        y += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        v += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
        peak = peak.max(y.abs());
    }
    (y, peak)
}

/// Energy of the `n`-th Dirichlet mode of the damped equation on `[0, L]`,
/// found by bisection on the sign of the shooting endpoint between the
/// `(n−1)`-th and `n`-th roots of the undamped-shifted bracket.
pub fn damped_well_energy_by_bisection(xi: f64, length: f64, n: usize) -> f64 {
    // with ħ = m = 1, E = k²/2; bracket k² around (nπ/L)² + ξ²
    let centre = (n as f64 * PI / length).powi(2) + xi * xi;
    let width = 0.5 * (2 * n - 1) as f64 * (PI / length).powi(2);
    let (mut lo, mut hi) = (centre - width, centre + width);
    let steps = 20_000;
    let end = |k2: f64| shoot_end(xi, k2, length, steps).0;
    let mut f_lo = end(lo);
    assert!(f_lo * end(hi) < 0.0, "bracket does not straddle a root");
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let f_mid = end(mid);
        if f_mid == 0.0 {
            return 0.5 * mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.25 * (lo + hi)
}

/// Second-order finite-difference first derivative, one-sided at the ends.
pub fn fd_first(samples: &[f64], h: f64) -> Vec<f64> {
    let n = samples.len();
    (0..n)
        .map(|i| {
            if i == 0 {
                (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / (2.0 * h)
            } else if i == n - 1 {
                (3.0 * samples[n - 1] - 4.0 * samples[n - 2] + samples[n - 3]) / (2.0 * h)
            } else {
                (samples[i + 1] - samples[i - 1]) / (2.0 * h)
            }
        })
        .collect()
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}
