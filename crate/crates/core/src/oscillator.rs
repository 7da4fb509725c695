//! Damped (causal) and anti-damped (retrocausal) oscillators.
//!
//! The causal equation `m q'' + C q' + k q = 0` is posed as an initial-value
//! problem at `grid.a` and integrated forward. The retrocausal equation
//! `m q'' − C q' + k q = 0` is posed as a terminal-value problem at `grid.b`
//! and integrated backward, which is its stable direction. With terminal
//! state `(q0, −v0)` the retrocausal trajectory is the causal one played in
//! reverse: `r(t) = q(a + b − t)`.

use serde::Serialize;
use thiserror::Error;

use crate::config::{Tolerances, DEFAULT_TOLERANCES};
use crate::grid::{Grid, GridFunction, Sample};
use crate::lagrangian::ClassicalOde;
use crate::ode::rk4_second_order;
use crate::Direction;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OscillatorError {
    #[error("invalid oscillator parameter {name} = {value}: {reason}")]
    InvalidParam { name: &'static str, value: f64, reason: &'static str },
    #[error("trajectory unstable at t = {t}: |q| = {magnitude:e} exceeds {limit:e} after {step} steps")]
    Unstable { step: usize, t: f64, magnitude: f64, limit: f64 },
}

/// `m`, damping `C`, stiffness `k` (interchangeable with `mω²`) and the
/// position/velocity pair the integration starts from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatorParams {
    pub m: f64,
    pub c: f64,
    pub k: f64,
    pub q0: f64,
    pub v0: f64,
}

impl OscillatorParams {
    pub fn new(m: f64, c: f64, k: f64, q0: f64, v0: f64) -> Result<Self, OscillatorError> {
        let p = Self { m, c, k, q0, v0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), OscillatorError> {
        let bad = |name, value, reason| Err(OscillatorError::InvalidParam { name, value, reason });
        if !(self.m.is_finite() && self.m > 0.0) {
            return bad("m", self.m, "mass must be finite and > 0");
        }
        if !(self.c.is_finite() && self.c >= 0.0) {
            return bad("C", self.c, "damping must be finite and >= 0");
        }
        if !(self.k.is_finite() && self.k >= 0.0) {
            return bad("k", self.k, "stiffness must be finite and >= 0");
        }
        if !self.q0.is_finite() {
            return bad("q0", self.q0, "must be finite");
        }
        if !self.v0.is_finite() {
            return bad("v0", self.v0, "must be finite");
        }
        Ok(())
    }

    /// Same oscillator with the velocity flipped: the state a time-reversed
    /// trajectory has where the original one started.
    pub fn reflected(&self) -> Self {
        Self { v0: -self.v0, ..*self }
    }

    /// The signed ODE integrated for `direction`.
    pub fn ode(&self, direction: Direction) -> ClassicalOde {
        let sign = match direction {
            Direction::Causal => 1.0,
            Direction::Retrocausal => -1.0,
        };
        ClassicalOde { mass_coeff: self.m, damping_coeff: sign * self.c, stiffness_coeff: self.k }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DampingRegime {
    Undamped,
    Underdamped,
    Critical,
    Overdamped,
}

impl DampingRegime {
    /// Classifies by the sign of `discriminant`, treating
    /// `|discriminant| <= band * scale` as critical.
    pub(crate) fn from_discriminant(zero_damping: bool, discriminant: f64, scale: f64, band: f64) -> Self {
        if zero_damping {
            DampingRegime::Undamped
        } else if discriminant.abs() <= band * scale {
            DampingRegime::Critical
        } else if discriminant < 0.0 {
            DampingRegime::Underdamped
        } else {
            DampingRegime::Overdamped
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DampingRegime::Undamped => "undamped",
            DampingRegime::Underdamped => "underdamped",
            DampingRegime::Critical => "critical",
            DampingRegime::Overdamped => "overdamped",
        }
    }
}

pub fn classify_damping(p: &OscillatorParams) -> DampingRegime {
    classify_damping_with(p, &DEFAULT_TOLERANCES)
}

pub fn classify_damping_with(p: &OscillatorParams, tol: &Tolerances) -> DampingRegime {
    let c2 = p.c * p.c;
    let four_mk = 4.0 * p.m * p.k;
    DampingRegime::from_discriminant(p.c == 0.0, c2 - four_mk, c2.max(four_mk), tol.critical_band)
}

/// Positions and velocities sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: Grid,
    q: Vec<f64>,
    v: Vec<f64>,
    m: f64,
    k: f64,
}

impl Trajectory {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn position(&self) -> GridFunction<f64> {
        GridFunction::new(self.grid, self.q.clone()).expect("trajectory length matches grid")
    }

    pub fn velocity(&self) -> GridFunction<f64> {
        GridFunction::new(self.grid, self.v.clone()).expect("trajectory length matches grid")
    }

    /// `½ m q'² + ½ k q²` at every sample.
    pub fn energy(&self) -> GridFunction<f64> {
        let e =
            self.q.iter().zip(&self.v).map(|(&q, &v)| 0.5 * self.m * v * v + 0.5 * self.k * q * q).collect();
        GridFunction::new(self.grid, e).expect("trajectory length matches grid")
    }

    /// Trajectory played backwards: positions reversed, velocities reversed
    /// and negated.
    pub fn time_reversed(&self) -> Self {
        let mut q = self.q.clone();
        q.reverse();
        let mut v: Vec<f64> = self.v.iter().map(|v| -v).collect();
        v.reverse();
        Self { q, v, ..self.clone() }
    }
}

/// Where the integration starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    /// Initial value at `grid.a`, stepping forward.
    Start,
    /// Terminal value at `grid.b`, stepping backward.
    End,
}

/// RK4 integration of `ode` from `(q, v)` at `anchor`.
pub fn integrate(
    ode: &ClassicalOde,
    grid: &Grid,
    anchor: Anchor,
    q: f64,
    v: f64,
    tol: &Tolerances,
) -> Result<Trajectory, OscillatorError> {
    let (mass, damping, stiffness) = (ode.mass_coeff, ode.damping_coeff, ode.stiffness_coeff);
    if mass == 0.0 || !mass.is_finite() {
        return Err(OscillatorError::InvalidParam {
            name: "m",
            value: mass,
            reason: "leading coefficient must be nonzero",
        });
    }
    let amplitude = q.abs().max(v.abs());
    let limit = if amplitude > 0.0 { tol.instability_factor * amplitude } else { f64::INFINITY };
    let steps = grid.len() - 1;
    let h = match anchor {
        Anchor::Start => grid.h(),
        Anchor::End => -grid.h(),
    };
    let accel = |y: f64, yd: f64| -(damping * yd + stiffness * y) / mass;
    let (mut qs, mut vs) = rk4_second_order(accel, q, v, h, steps, limit).map_err(|b| {
        let t = match anchor {
            Anchor::Start => grid.x(b.step),
            Anchor::End => grid.x(steps - b.step),
        };
        OscillatorError::Unstable { step: b.step, t, magnitude: b.magnitude, limit: b.limit }
    })?;
    if anchor == Anchor::End {
        qs.reverse();
        vs.reverse();
    }
    Ok(Trajectory { grid: *grid, q: qs, v: vs, m: mass, k: stiffness })
}

/// `m q'' + C q' + k q = 0` from `(q0, v0)` at `grid.a`.
pub fn solve_causal(p: &OscillatorParams, grid: &Grid) -> Result<Trajectory, OscillatorError> {
    p.validate()?;
    integrate(&p.ode(Direction::Causal), grid, Anchor::Start, p.q0, p.v0, &DEFAULT_TOLERANCES)
}

/// `m q'' − C q' + k q = 0` from terminal `(q0, v0)` at `grid.b`, integrated
/// backward.
pub fn solve_retrocausal(p: &OscillatorParams, grid: &Grid) -> Result<Trajectory, OscillatorError> {
    p.validate()?;
    integrate(&p.ode(Direction::Retrocausal), grid, Anchor::End, p.q0, p.v0, &DEFAULT_TOLERANCES)
}

pub fn solve(p: &OscillatorParams, grid: &Grid, direction: Direction) -> Result<Trajectory, OscillatorError> {
    match direction {
        Direction::Causal => solve_causal(p, grid),
        Direction::Retrocausal => solve_retrocausal(p, grid),
    }
}

/// Value at `t` moved to `a + b − t`.
pub fn time_reverse<T: Sample>(f: &GridFunction<T>) -> GridFunction<T> {
    f.reversed()
}
