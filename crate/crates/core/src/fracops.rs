//! Causal (left-sided) and retrocausal (right-sided) Riemann-Liouville
//! derivatives on uniform grids.
//!
//! The causal operator integrates from the past endpoint `a` up to `t`:
//!
//! ```text
//! aD^α_t f(t) = d^m/dt^m [ 1/Γ(m−α) ∫_a^t f(τ) (t−τ)^(m−α−1) dτ ]
//! ```
//!
//! and the retrocausal operator integrates from `t` to the future endpoint `b`
//! with an extra `(−1)^m`. Substituting `s = a + b − t` maps one onto the
//! other, so the retrocausal operator is computed by reflecting the samples,
//! applying the causal operator and reflecting back.
//!
//! Integer orders bypass the fractional kernel and use second-order finite
//! differences. Orders are limited to `0 ≤ α ≤ 2` with non-integer `α < 2`.

use thiserror::Error;

use crate::config::{Tolerances, DEFAULT_TOLERANCES};
use crate::grid::{GridFunction, Sample};
use crate::special::{gamma_fn, GammaError};
use crate::Direction;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FracError {
    #[error("fractional order must be >= 0 (got {0})")]
    NegativeOrder(f64),
    #[error("fractional order {0} unsupported (integer orders up to 2, non-integer below 2)")]
    UnsupportedOrder(f64),
    #[error("grid too coarse: order needs at least {required} samples, got {got}")]
    GridTooCoarse { required: usize, got: usize },
    #[error("input samples contain NaN")]
    NaNSamples,
    #[error("weight count must be >= 1")]
    EmptyWeights,
    #[error(transparent)]
    Gamma(#[from] GammaError),
}

/// Derivative order `α` together with the integer `m` of the kernel.
///
/// For non-integer `α`, `m` is the smallest integer strictly above `α`.
/// Integer orders keep `m = α` and are evaluated as ordinary derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder {
    alpha: f64,
    m: u32,
}

impl FracOrder {
    pub fn new(alpha: f64) -> Result<Self, FracError> {
        if alpha.is_nan() || alpha < 0.0 {
            return Err(FracError::NegativeOrder(alpha));
        }
        if alpha > 2.0 || !alpha.is_finite() {
            return Err(FracError::UnsupportedOrder(alpha));
        }
        let m = if alpha.fract() == 0.0 { alpha as u32 } else { alpha.floor() as u32 + 1 };
        Ok(Self { alpha, m })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn is_integer(&self) -> bool {
        self.alpha.fract() == 0.0
    }

    /// Minimum number of samples the operator accepts.
    pub fn min_samples(&self) -> usize {
        self.m as usize + 2
    }
}

/// Discretization of the fractional kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Grünwald-Letnikov sum, first-order accurate.
    #[default]
    GrunwaldLetnikov,
    /// Product-trapezoid quadrature of the convolution integral followed by
    /// finite differencing.
    ProductTrapezoid,
}

/// Grünwald-Letnikov weights `w_0 = 1`, `w_k = w_{k−1} (k − 1 − α) / k`.
pub fn gl_weights(alpha: f64, count: usize) -> Result<Vec<f64>, FracError> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(FracError::NegativeOrder(alpha));
    }
    if count == 0 {
        return Err(FracError::EmptyWeights);
    }
    let mut w = Vec::with_capacity(count);
    w.push(1.0);
    for k in 1..count {
        let prev = w[k - 1];
        w.push(prev * ((k as f64 - 1.0 - alpha) / k as f64));
    }
    Ok(w)
}

fn check_input<T: Sample>(f: &GridFunction<T>, order: FracOrder) -> Result<(), FracError> {
    if f.has_nan() {
        return Err(FracError::NaNSamples);
    }
    let required = order.min_samples();
    if f.grid().len() < required {
        return Err(FracError::GridTooCoarse { required, got: f.grid().len() });
    }
    Ok(())
}

/// `aD^α_t f`, the causal derivative on the same grid.
pub fn causal_frac_deriv<T: Sample>(
    f: &GridFunction<T>,
    order: FracOrder,
    scheme: Scheme,
) -> Result<GridFunction<T>, FracError> {
    check_input(f, order)?;
    if order.is_integer() {
        return Ok(finite_difference(f, order.m()));
    }
    match scheme {
        Scheme::GrunwaldLetnikov => Ok(grunwald_letnikov(f, order.alpha())),
        Scheme::ProductTrapezoid => product_trapezoid(f, order),
    }
}

/// Sign applied after reflecting through the causal operator.
///
/// The `(−1)^m` in the right-sided definition cancels the `(−1)^m` from
/// `d/dt = −d/ds` under `s = a + b − t`, so the factor is always one. Integer
/// orders still come out as `(−1)^n dⁿf/dtⁿ` because reflecting the samples
/// already flips odd derivatives.
pub const fn reflection_parity(_order: FracOrder) -> f64 {
    1.0
}

/// `tD^α_b f`, the retrocausal derivative on the same grid.
pub fn retrocausal_frac_deriv<T: Sample>(
    f: &GridFunction<T>,
    order: FracOrder,
    scheme: Scheme,
) -> Result<GridFunction<T>, FracError> {
    let reflected = causal_frac_deriv(&f.reversed(), order, scheme)?.reversed();
    let parity = reflection_parity(order);
    Ok(if parity == 1.0 { reflected } else { reflected.map(|v| v * parity) })
}

pub fn frac_deriv<T: Sample>(
    f: &GridFunction<T>,
    order: FracOrder,
    scheme: Scheme,
    direction: Direction,
) -> Result<GridFunction<T>, FracError> {
    match direction {
        Direction::Causal => causal_frac_deriv(f, order, scheme),
        Direction::Retrocausal => retrocausal_frac_deriv(f, order, scheme),
    }
}

/// Result of applying the order-1/2 operator twice.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfComposition<T: Sample = f64> {
    pub result: GridFunction<T>,
    /// Set when `f` does not vanish at the start boundary of the direction,
    /// in which case the composition picks up a `(t−a)^(−1)` singular term.
    pub boundary_warning: bool,
}

/// `D^(1/2) ∘ D^(1/2) f`, which approximates `f'` (causal) or `−f'`
/// (retrocausal) when `f` vanishes at the start boundary.
pub fn compose_half<T: Sample>(
    f: &GridFunction<T>,
    direction: Direction,
) -> Result<HalfComposition<T>, FracError> {
    compose_half_with(f, direction, Scheme::default(), &DEFAULT_TOLERANCES)
}

pub fn compose_half_with<T: Sample>(
    f: &GridFunction<T>,
    direction: Direction,
    scheme: Scheme,
    tol: &Tolerances,
) -> Result<HalfComposition<T>, FracError> {
    let half = FracOrder::new(0.5)?;
    let once = frac_deriv(f, half, scheme, direction)?;
    let result = frac_deriv(&once, half, scheme, direction)?;
    let start = match direction {
        Direction::Causal => f.samples()[0],
        Direction::Retrocausal => f.samples()[f.samples().len() - 1],
    };
    let scale = f.max_modulus();
    let boundary_warning = scale > 0.0 && start.modulus() > tol.boundary_value * scale;
    Ok(HalfComposition { result, boundary_warning })
}

fn grunwald_letnikov<T: Sample>(f: &GridFunction<T>, alpha: f64) -> GridFunction<T> {
    let n = f.grid().len();
    let scale = f.grid().h().powf(-alpha);
    let w = gl_weights(alpha, n).expect("alpha validated by FracOrder");
    let s = f.samples();
    let out = (0..n)
        .map(|i| {
            let mut acc = T::zero();
            for (k, &wk) in w[..=i].iter().enumerate() {
                acc = acc + s[i - k] * wk;
            }
            acc * scale
        })
        .collect();
    GridFunction::new(*f.grid(), out).expect("same length")
}

fn product_trapezoid<T: Sample>(f: &GridFunction<T>, order: FracOrder) -> Result<GridFunction<T>, FracError> {
    let n = f.grid().len();
    let h = f.grid().h();
    let mu = order.m() as f64 - order.alpha();
    let p = mu + 1.0;
    let prefactor = h.powf(mu) / gamma_fn(mu + 2.0)?;
    let s = f.samples();

    // interior weights depend only on the offset d = j − i ≥ 1
    let interior: Vec<f64> = (0..n)
        .map(|d| {
            if d == 0 {
                return 0.0;
            }
            let d = d as f64;
            (d + 1.0).powf(p) - 2.0 * d.powf(p) + (d - 1.0).powf(p)
        })
        .collect();

    let mut integral = vec![T::zero(); n];
    for j in 1..n {
        let jf = j as f64;
        let first = (jf - 1.0).powf(p) - (jf - 1.0 - mu) * jf.powf(mu);
        let mut acc = s[0] * first + s[j];
        for i in 1..j {
            acc = acc + s[i] * interior[j - i];
        }
        integral[j] = acc * prefactor;
    }
    let integral = GridFunction::new(*f.grid(), integral).expect("same length");
    Ok(finite_difference(&integral, order.m()))
}

/// Second-order finite-difference derivative of integer order 0, 1 or 2.
fn finite_difference<T: Sample>(f: &GridFunction<T>, order: u32) -> GridFunction<T> {
    let h = f.grid().h();
    let s = f.samples();
    let n = s.len();
    let out: Vec<T> = match order {
        0 => s.to_vec(),
        1 => {
            let inv = 1.0 / (2.0 * h);
            (0..n)
                .map(|i| {
                    if i == 0 {
                        (s[1] * 4.0 - s[0] * 3.0 - s[2]) * inv
                    } else if i == n - 1 {
                        (s[n - 1] * 3.0 - s[n - 2] * 4.0 + s[n - 3]) * inv
                    } else {
                        (s[i + 1] - s[i - 1]) * inv
                    }
                })
                .collect()
        }
        2 => {
            let inv = 1.0 / (h * h);
            (0..n)
                .map(|i| {
                    if i == 0 {
                        (s[0] * 2.0 - s[1] * 5.0 + s[2] * 4.0 - s[3]) * inv
                    } else if i == n - 1 {
                        (s[n - 1] * 2.0 - s[n - 2] * 5.0 + s[n - 3] * 4.0 - s[n - 4]) * inv
                    } else {
                        (s[i + 1] - s[i] * 2.0 + s[i - 1]) * inv
                    }
                })
                .collect()
        }
        _ => unreachable!("FracOrder caps integer orders at 2"),
    };
    GridFunction::new(*f.grid(), out).expect("same length")
}
