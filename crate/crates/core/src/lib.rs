//! Causal/retrocausal fractional variational mechanics.
//!
//! * [`fracops`]: left/right Riemann-Liouville derivatives on uniform grids.
//! * [`lagrangian`]: a small DSL for product-form lagrangians and the
//!   generalized Euler-Lagrange derivation of paired equations of motion.
//! * [`oscillator`]: damped / anti-damped oscillator integration.
//! * [`eigensolver`]: paired causal/retrocausal stationary wave equations.
//! * [`dampedwave`]: the damped stationary wave equation.
//! * [`cli`]: command-line front end, with [`output`] for the file formats
//!   and [`verify`] for the built-in property checks.

use serde::{Deserialize, Serialize};

pub mod cli;
pub mod config;
pub mod dampedwave;
pub mod eigensolver;
pub mod fracops;
pub mod grid;
pub mod lagrangian;
pub mod ode;
pub mod oscillator;
pub mod output;
pub mod special;
pub mod verify;

pub use config::Tolerances;
pub use grid::{Grid, GridError, GridFunction, Sample};

/// Direction of time integration of an operator or equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Integrates from the past endpoint forward.
    Causal,
    /// Integrates from the future endpoint backward.
    Retrocausal,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Causal => "causal",
            Direction::Retrocausal => "retrocausal",
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
