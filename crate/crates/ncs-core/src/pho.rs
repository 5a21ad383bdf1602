//! The pseudoharmonic oscillator `V(r) = (m ω²/8) r₀² (r/r₀ − r₀/r)²`.
//!
//! Its radial spectrum is linear, `E = ħω(n + k) − m ω² r₀²/4`, with the
//! Bargmann index
//!
//! ```text
//! k = 1/2 + 1/2 √((J + 1/2)² + c²),      c = m ω r₀² / (2ħ),
//! ```
//!
//! and its coherent states are the family with `ρ(n) = (k+1)ₙ`, i.e. the
//! model `a = [1]`, `b = [k+1]`. Physical inputs are SI; everything
//! downstream is dimensionless.

use crate::error::{Error, Result};
use crate::hyper::HypergeometricModel;
use serde::{Deserialize, Serialize};

/// Reduced Planck constant in J·s (exact in the 2019 SI).
pub const HBAR: f64 = 1.054_571_817e-34;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhoParams {
    /// Reduced mass in kg.
    pub reduced_mass: f64,
    /// Angular frequency in rad/s.
    pub omega: f64,
    /// Equilibrium distance in m.
    pub r0: f64,
    /// Rotational quantum number.
    pub j: u32,
    pub hbar: f64,
}

impl PhoParams {
    pub fn new(reduced_mass: f64, omega: f64, r0: f64, j: u32) -> Result<Self> {
        for (name, v) in [("reduced mass", reduced_mass), ("omega", omega), ("r0", r0)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        Ok(PhoParams {
            reduced_mass,
            omega,
            r0,
            j,
            hbar: HBAR,
        })
    }

    /// The dimensionless coupling `c = m ω r₀² / (2ħ)`.
    pub fn coupling(&self) -> f64 {
        self.reduced_mass * self.omega * self.r0 * self.r0 / (2.0 * self.hbar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BargmannIndex {
    pub k: f64,
}

impl BargmannIndex {
    /// Dimensionless level `e_k(n) = n + k`.
    pub fn level(&self, n: usize) -> f64 {
        n as f64 + self.k
    }
}

pub fn bargmann_k(params: &PhoParams) -> BargmannIndex {
    bargmann_k_from_coupling(params.coupling(), params.j)
}

pub fn bargmann_k_from_coupling(coupling: f64, j: u32) -> BargmannIndex {
    BargmannIndex {
        k: 0.5 + 0.5 * (j as f64 + 0.5).hypot(coupling),
    }
}

/// The model `a = [1]`, `b = [k+1]`. Physical states have k > 1/2, but any
/// k ≥ 0 is a valid family; k = 0 is the canonical one.
pub fn pho_model(k: &BargmannIndex) -> Result<HypergeometricModel> {
    if !(k.k >= 0.0 && k.k.is_finite()) {
        return Err(Error::InvalidParameter(format!("Bargmann index {} must be >= 0", k.k)));
    }
    HypergeometricModel::new(vec![1.0], vec![k.k + 1.0])
}

/// Full energy `ħω(n + k) − m ω² r₀²/4` in joules.
///
/// Since `m ω² r₀²/4 = ħω c/2`, the constant part is rewritten as
/// `1/2 + (J+1/2)² / (2(√((J+1/2)² + c²) + c))`, which avoids cancelling two
/// large terms when c is large.
pub fn pho_energy(params: &PhoParams, n: usize) -> f64 {
    let j = params.j as f64 + 0.5;
    let c = params.coupling();
    let offset = 0.5 + 0.5 * j * j / (j.hypot(c) + c);
    params.hbar * params.omega * (n as f64 + offset)
}
