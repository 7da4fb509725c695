use serde::{Deserialize, Serialize};

use super::fmt_real;

/// Potential energy `V(q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PotentialSpec {
    Free,
    /// `V = k q² / 2`.
    Harmonic {
        k: f64,
    },
    /// `V = Σ c_i q^i`, lowest power first.
    #[serde(rename = "poly")]
    Polynomial {
        coeffs: Vec<f64>,
    },
    /// Zero on `[a, a + length]`, infinite outside. Only meaningful for the
    /// eigensolver, where the walls become Dirichlet boundaries.
    #[serde(rename = "well")]
    InfiniteWell {
        length: f64,
    },
}

/// Symbolic `∂V/∂q = Σ c_i q^i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialGradient {
    pub coeffs: Vec<f64>,
}

impl PotentialGradient {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, q: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * q + c)
    }
}

impl PotentialSpec {
    /// Rejects negative stiffness, non-positive well widths and non-finite
    /// coefficients.
    pub fn validate(&self) -> Result<(), String> {
        match self {
            PotentialSpec::Free => Ok(()),
            PotentialSpec::Harmonic { k } if !k.is_finite() || *k < 0.0 => {
                Err(format!("harmonic stiffness must be finite and >= 0 (got {k})"))
            }
            PotentialSpec::Harmonic { .. } => Ok(()),
            PotentialSpec::Polynomial { coeffs } if coeffs.is_empty() => {
                Err("polynomial potential needs at least one coefficient".into())
            }
            PotentialSpec::Polynomial { coeffs } if coeffs.iter().any(|c| !c.is_finite()) => {
                Err("polynomial coefficients must be finite".into())
            }
            PotentialSpec::Polynomial { .. } => Ok(()),
            PotentialSpec::InfiniteWell { length } if !length.is_finite() || *length <= 0.0 => {
                Err(format!("well width must be finite and > 0 (got {length})"))
            }
            PotentialSpec::InfiniteWell { .. } => Ok(()),
        }
    }

    /// `V(q)`; `None` for the hard-wall well, whose value is a boundary
    /// condition rather than a function.
    pub fn value(&self, q: f64) -> Option<f64> {
        match self {
            PotentialSpec::Free => Some(0.0),
            PotentialSpec::Harmonic { k } => Some(0.5 * k * q * q),
            PotentialSpec::Polynomial { coeffs } => {
                Some(coeffs.iter().rev().fold(0.0, |acc, &c| acc * q + c))
            }
            PotentialSpec::InfiniteWell { .. } => None,
        }
    }

    /// `∂V/∂q`, or `None` for the hard-wall well.
    pub fn gradient(&self) -> Option<PotentialGradient> {
        match self {
            PotentialSpec::Free => Some(PotentialGradient { coeffs: vec![] }),
            PotentialSpec::Harmonic { k } => Some(PotentialGradient { coeffs: vec![0.0, *k] }),
            PotentialSpec::Polynomial { coeffs } => Some(PotentialGradient {
                coeffs: coeffs.iter().enumerate().skip(1).map(|(i, &c)| i as f64 * c).collect(),
            }),
            PotentialSpec::InfiniteWell { .. } => None,
        }
    }

    /// Text form accepted by the potential grammar, e.g. `harmonic, 4`.
    pub fn render(&self) -> String {
        match self {
            PotentialSpec::Free => "free".to_string(),
            PotentialSpec::Harmonic { k } => format!("harmonic, {}", fmt_real(*k)),
            PotentialSpec::Polynomial { coeffs } => {
                let parts: Vec<String> = coeffs.iter().map(|&c| fmt_real(c)).collect();
                format!("poly, {}", parts.join(", "))
            }
            PotentialSpec::InfiniteWell { length } => format!("well, {}", fmt_real(*length)),
        }
    }
}
