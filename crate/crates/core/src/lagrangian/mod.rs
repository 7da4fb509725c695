//! Product-form causal/retrocausal lagrangians and their equations of motion.
//!
//! A lagrangian is a sum `Σ_β C_β (aq^β_t)(tq^β_b) − V(q)`. The generalized
//! Euler-Lagrange rule maps every product term of order β onto a derivative
//! of total order 2β: causal derivatives in one equation, retrocausal in the
//! other, with identical coefficients. Orders are exact rationals, so the
//! doubling and the integer test in [`reduce_integer_orders`] never drift.

use num_rational::Rational64;
use serde_json::json;
use thiserror::Error;

use crate::Direction;

mod parser;
mod potential;

pub use parser::{parse_lagrangian, parse_potential, ParseError};
pub use potential::{PotentialGradient, PotentialSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LagrangianError {
    #[error("the hard-wall well has no gradient; it is only usable by the eigensolver")]
    NoGradient,
    #[error("order {0} is not an integer; substitute a fractional order first")]
    NonIntegerOrder(String),
    #[error("order {0} exceeds the second-order classical form")]
    OrderTooHigh(String),
    #[error("potential gradient is not linear in q")]
    NonLinearPotential,
    #[error("substituting order {alpha} makes two terms share order {order}")]
    SubstitutionCollision { alpha: String, order: String },
    #[error("order {0} is not a finite non-negative decimal")]
    InvalidOrder(f64),
}

/// `C_β (aq^β_t)(tq^β_b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductTerm {
    pub coeff: f64,
    pub order: Rational64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianSpec {
    pub terms: Vec<ProductTerm>,
    pub potential: PotentialSpec,
}

impl LagrangianSpec {
    /// No product terms and no potential: nothing to derive.
    pub fn is_degenerate(&self) -> bool {
        self.terms.is_empty() && self.potential == PotentialSpec::Free
    }

    /// Replaces the order of every non-integer-order term by `alpha`.
    pub fn with_fractional_order(&self, alpha: f64) -> Result<Self, LagrangianError> {
        let exact = rational_from_f64(alpha)?;
        let mut terms = self.terms.clone();
        for t in terms.iter_mut().filter(|t| !t.order.is_integer()) {
            t.order = exact;
        }
        for (i, t) in terms.iter().enumerate() {
            if terms[..i].iter().any(|u| u.order == t.order) {
                return Err(LagrangianError::SubstitutionCollision {
                    alpha: fmt_order(exact),
                    order: fmt_order(t.order),
                });
            }
        }
        Ok(Self { terms, potential: self.potential.clone() })
    }

    /// DSL text that parses back to this spec.
    pub fn render(&self) -> String {
        let mut out = self
            .terms
            .iter()
            .map(|t| format!("{}*q[{}]", fmt_real(t.coeff), fmt_order(t.order)))
            .collect::<Vec<_>>()
            .join(" + ");
        if self.potential != PotentialSpec::Free {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(&format!("- V({})", self.potential.render()));
        }
        out
    }
}

/// One derivative term `coeff · D^order[q]` of an equation of motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EomTerm {
    pub coeff: f64,
    /// Total derivative order, `2β` of the source product term.
    pub order: Rational64,
}

/// `Σ coeff · D^order[q] + ∂V/∂q = 0` with every `D` in one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct EquationOfMotion {
    pub direction: Direction,
    pub terms: Vec<EomTerm>,
    pub potential: PotentialSpec,
    pub gradient: PotentialGradient,
    pub degenerate: bool,
}

impl EquationOfMotion {
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<_> =
            self.terms.iter().map(|t| json!({"coeff": t.coeff, "order": rational_to_f64(t.order)})).collect();
        json!({
            "direction": self.direction.as_str(),
            "terms": terms,
            "potential": serde_json::to_value(&self.potential).expect("plain data"),
        })
    }
}

fn derive(spec: &LagrangianSpec, direction: Direction) -> Result<EquationOfMotion, LagrangianError> {
    let gradient = spec.potential.gradient().ok_or(LagrangianError::NoGradient)?;
    let terms = spec.terms.iter().map(|t| EomTerm { coeff: t.coeff, order: t.order * 2 }).collect();
    Ok(EquationOfMotion {
        direction,
        terms,
        potential: spec.potential.clone(),
        gradient,
        degenerate: spec.is_degenerate(),
    })
}

/// Causal equation `Σ C_β aD^{2β}_t q + ∂V/∂q = 0`.
pub fn derive_causal_eom(spec: &LagrangianSpec) -> Result<EquationOfMotion, LagrangianError> {
    derive(spec, Direction::Causal)
}

/// Retrocausal equation `Σ C_β tD^{2β}_b q + ∂V/∂q = 0`.
pub fn derive_retrocausal_eom(spec: &LagrangianSpec) -> Result<EquationOfMotion, LagrangianError> {
    derive(spec, Direction::Retrocausal)
}

/// `m q'' + c q' + k q = 0`; the sign of `c` tells the damped (causal) and
/// anti-damped (retrocausal) equations apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalOde {
    pub mass_coeff: f64,
    pub damping_coeff: f64,
    pub stiffness_coeff: f64,
}

impl ClassicalOde {
    pub fn render(&self) -> String {
        let parts = [(self.mass_coeff, "q''"), (self.damping_coeff, "q'"), (self.stiffness_coeff, "q")];
        render_sum(parts.iter().filter(|(c, _)| *c != 0.0).map(|&(c, s)| (c, s.to_string())))
            .map(|lhs| format!("{lhs} = 0"))
            .unwrap_or_else(|| "0 = 0".to_string())
    }
}

/// Rewrites integer-order terms as ordinary derivatives: causal `Dⁿ → dⁿ/dtⁿ`,
/// retrocausal `Dⁿ → (−1)ⁿ dⁿ/dtⁿ`. A linear potential gradient `k q` adds to
/// the stiffness.
pub fn reduce_integer_orders(eom: &EquationOfMotion) -> Result<ClassicalOde, LagrangianError> {
    let mut slots = [0.0_f64; 3];
    for t in &eom.terms {
        if !t.order.is_integer() {
            return Err(LagrangianError::NonIntegerOrder(fmt_order(t.order)));
        }
        let n = *t.order.numer();
        if !(0..=2).contains(&n) {
            return Err(LagrangianError::OrderTooHigh(fmt_order(t.order)));
        }
        let sign = match eom.direction {
            Direction::Retrocausal if n % 2 == 1 => -1.0,
            _ => 1.0,
        };
        slots[n as usize] += sign * t.coeff;
    }
    let g = &eom.gradient.coeffs;
    if g.first().is_some_and(|&c| c != 0.0) || g.iter().skip(2).any(|&c| c != 0.0) {
        return Err(LagrangianError::NonLinearPotential);
    }
    if let Some(&k) = g.get(1) {
        slots[0] += k;
    }
    Ok(ClassicalOde { mass_coeff: slots[2], damping_coeff: slots[1], stiffness_coeff: slots[0] })
}

/// e.g. `1·D^2[q] + 0.3·D^1[q] + 4·D^0[q] = 0 (causal)`.
pub fn render_eom(eom: &EquationOfMotion) -> String {
    let mut parts: Vec<(f64, String)> =
        eom.terms.iter().map(|t| (t.coeff, format!("D^{}[q]", fmt_order(t.order)))).collect();
    for (p, &c) in eom.gradient.coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let sym = match p {
            0 => String::new(),
            1 => "q".to_string(),
            _ => format!("q^{p}"),
        };
        parts.push((c, sym));
    }
    match render_sum(parts.into_iter()) {
        Some(lhs) => format!("{lhs} = 0 ({})", eom.direction),
        None => "0 = 0".to_string(),
    }
}

fn render_sum(parts: impl Iterator<Item = (f64, String)>) -> Option<String> {
    let mut out = String::new();
    for (i, (c, sym)) in parts.enumerate() {
        let term = if sym.is_empty() { fmt_real(c.abs()) } else { format!("{}·{}", fmt_real(c.abs()), sym) };
        match (i, c < 0.0) {
            (0, false) => out.push_str(&term),
            (0, true) => out.push_str(&format!("-{term}")),
            (_, false) => out.push_str(&format!(" + {term}")),
            (_, true) => out.push_str(&format!(" - {term}")),
        }
    }
    (!out.is_empty()).then_some(out)
}

/// Shortest round-trip decimal form of a coefficient.
pub(crate) fn fmt_real(x: f64) -> String {
    format!("{x}")
}

/// Exact decimal form of an order when the denominator is `2^i 5^j`,
/// `p/q` otherwise.
pub fn fmt_order(r: Rational64) -> String {
    let (n, d) = (*r.numer(), *r.denom());
    if d == 1 {
        return n.to_string();
    }
    let mut rest = d;
    let (mut twos, mut fives) = (0u32, 0u32);
    while rest % 2 == 0 {
        rest /= 2;
        twos += 1;
    }
    while rest % 5 == 0 {
        rest /= 5;
        fives += 1;
    }
    if rest != 1 {
        return format!("{n}/{d}");
    }
    let places = twos.max(fives);
    let scaled = n as i128 * 10_i128.pow(places) / d as i128;
    let sign = if scaled < 0 { "-" } else { "" };
    let scaled = scaled.unsigned_abs();
    let pow = 10_u128.pow(places);
    format!("{sign}{}.{:0width$}", scaled / pow, scaled % pow, width = places as usize)
}

pub fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Exact rational of a finite, non-negative `f64` via its shortest decimal form.
pub fn rational_from_f64(x: f64) -> Result<Rational64, LagrangianError> {
    if !x.is_finite() || x < 0.0 {
        return Err(LagrangianError::InvalidOrder(x));
    }
    parser::decimal_to_rational(&format!("{x}")).ok_or(LagrangianError::InvalidOrder(x))
}
