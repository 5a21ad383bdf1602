//! Barut–Girardello and Klauder–Perelomov coherent-state families.
//!
//! ```text
//! |z⟩ = N(|z|²)^{−1/2} Σₙ zⁿ/√ρ(n) |n⟩,      N(x) = Σₙ xⁿ/ρ(n)
//! ```
//!
//! The KP family is the same construction with ρ replaced by the dual
//! ρ̃(n) = (n!)²/ρ(n), i.e. with the model's `a` and `b` exchanged, so every
//! routine here works on the *effective* model of the flavor.
//!
//! Angular integrals are done analytically: `∫ dφ/2π (z*)ⁿ z^m = xⁿ δ_{nm}`
//! turns every phase-space integral of a radial function into a radial one.
//! [`angular_moment_numeric`] exists only to test that reduction.

use crate::error::{Error, Result};
use crate::hyper::{
    pfq_eval, pfq_eval_complex, radius_classify, structure_ln_rho, structure_rho, HypergeometricModel, Radius,
    SeriesBudget,
};
use crate::meijer::{bg_weight, kp_weight, rule_for, weight_eval, ContourSpec, MeijerWeight};
use crate::quadrature::{integrate_vec, RadialQuadrature};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Barut–Girardello: eigenstates of the deformed annihilator.
    Bg,
    /// Klauder–Perelomov: displaced vacuum.
    Kp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFamily {
    model: HypergeometricModel,
    flavor: Flavor,
    #[serde(skip)]
    effective: Option<HypergeometricModel>,
}

impl StateFamily {
    pub fn new(model: HypergeometricModel, flavor: Flavor) -> Result<Self> {
        let effective = match flavor {
            Flavor::Bg => model.clone(),
            Flavor::Kp => model.swapped(),
        };
        if radius_classify(&effective).radius == Radius::Zero {
            return Err(Error::InvalidModel(format!(
                "{flavor:?} states of this model have zero radius of convergence"
            )));
        }
        Ok(StateFamily {
            model,
            flavor,
            effective: Some(effective),
        })
    }

    pub fn canonical() -> Self {
        StateFamily::new(HypergeometricModel::canonical(), Flavor::Bg).expect("canonical family is valid")
    }

    pub fn model(&self) -> &HypergeometricModel {
        &self.model
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// The model whose ρ is this family's structure function.
    pub fn effective_model(&self) -> HypergeometricModel {
        self.effective.clone().unwrap_or_else(|| match self.flavor {
            Flavor::Bg => self.model.clone(),
            Flavor::Kp => self.model.swapped(),
        })
    }

    /// Radius of the label domain in x = |z|².
    pub fn radius(&self) -> f64 {
        radius_classify(&self.effective_model()).radius.value()
    }

    /// ρ(n) for BG, ρ̃(n) for KP.
    pub fn rho(&self, n: usize) -> Result<f64> {
        structure_rho(&self.effective_model(), n)
    }

    pub fn ln_rho(&self, n: usize) -> f64 {
        structure_ln_rho(&self.effective_model(), n)
    }

    /// The reduced measure weight `h_red = C·G`, as a Meijer weight with its
    /// prefactor.
    pub fn weight(&self) -> MeijerWeight {
        match self.flavor {
            Flavor::Bg => bg_weight(&self.model),
            Flavor::Kp => kp_weight(&self.model),
        }
    }

    /// True when all quantities coincide with the canonical family.
    pub fn is_canonical(&self) -> bool {
        self.model.is_canonical()
    }

    pub(crate) fn check_x(&self, x: f64) -> Result<()> {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(Error::InvalidParameter(format!("|z|² = {x} must be finite and nonnegative")));
        }
        let radius = self.radius();
        if x != 0.0 && x >= radius {
            return Err(Error::OutsideRadius { x, radius });
        }
        Ok(())
    }
}

/// A label `z = √x e^{iφ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexLabel {
    pub modulus_sq: f64,
    pub phase: f64,
}

impl ComplexLabel {
    pub fn new(modulus_sq: f64, phase: f64) -> Result<Self> {
        if !(modulus_sq >= 0.0 && modulus_sq.is_finite() && phase.is_finite()) {
            return Err(Error::InvalidParameter(format!("bad label |z|² = {modulus_sq}, φ = {phase}")));
        }
        Ok(ComplexLabel {
            modulus_sq,
            phase: phase.rem_euclid(2.0 * PI),
        })
    }

    pub fn from_complex(z: Complex64) -> Self {
        ComplexLabel {
            modulus_sq: z.norm_sqr(),
            phase: z.arg().rem_euclid(2.0 * PI),
        }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.modulus_sq.sqrt(), self.phase)
    }
}

/// N(x): pFq(a; b; x) for BG, qFp(b; a; x) for KP.
pub fn normalization(fam: &StateFamily, x: f64, budget: &SeriesBudget) -> Result<f64> {
    fam.check_x(x)?;
    if fam.is_canonical() {
        let v = x.exp();
        return if v.is_finite() { Ok(v) } else { Err(Error::Overflow("normalization")) };
    }
    pfq_eval(&fam.effective_model(), x, budget)
}

/// `⟨n|z⟩ = zⁿ / √(ρ(n) N(|z|²))`.
pub fn fock_coefficient(fam: &StateFamily, z: &ComplexLabel, n: usize, budget: &SeriesBudget) -> Result<Complex64> {
    fam.check_x(z.modulus_sq)?;
    if z.modulus_sq == 0.0 {
        return Ok(Complex64::new(if n == 0 { 1.0 } else { 0.0 }, 0.0));
    }
    let ln_n = normalization(fam, z.modulus_sq, budget)?.ln();
    let ln_mod = 0.5 * (n as f64 * z.modulus_sq.ln() - fam.ln_rho(n) - ln_n);
    Ok(Complex64::from_polar(ln_mod.exp(), n as f64 * z.phase))
}

/// `⟨z₁|z₂⟩ = N(z₁* z₂) / √(N(x₁) N(x₂))`.
pub fn overlap(fam: &StateFamily, z1: &ComplexLabel, z2: &ComplexLabel, budget: &SeriesBudget) -> Result<Complex64> {
    fam.check_x(z1.modulus_sq)?;
    fam.check_x(z2.modulus_sq)?;
    if z1 == z2 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let w = Complex64::from_polar((z1.modulus_sq * z2.modulus_sq).sqrt(), z2.phase - z1.phase);
    let n1 = normalization(fam, z1.modulus_sq, budget)?;
    let n2 = normalization(fam, z2.modulus_sq, budget)?;
    let cross = if fam.is_canonical() {
        w.exp()
    } else {
        pfq_eval_complex(&fam.effective_model(), w, budget)?
    };
    Ok(cross / (n1.sqrt() * n2.sqrt()))
}

/// `‖ |z₁⟩ − |z₂⟩ ‖ = √(2 − 2 Re⟨z₁|z₂⟩)`.
///
/// Summed as `Σ |⟨n|z₁⟩ − ⟨n|z₂⟩|²` so that nearby labels do not lose their
/// digits to the cancellation in `2 − 2 Re⟨z₁|z₂⟩`.
pub fn continuity_distance(fam: &StateFamily, z1: &ComplexLabel, z2: &ComplexLabel, budget: &SeriesBudget) -> Result<f64> {
    fam.check_x(z1.modulus_sq)?;
    fam.check_x(z2.modulus_sq)?;
    if z1 == z2 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    let mut mass = 0.0;
    for n in 0..budget.max_terms {
        let c1 = fock_coefficient(fam, z1, n, budget)?;
        let c2 = fock_coefficient(fam, z2, n, budget)?;
        sum += (c1 - c2).norm_sqr();
        mass += 0.5 * (c1.norm_sqr() + c2.norm_sqr());
        let past_peak = n as f64 > 2.0 * z1.modulus_sq.max(z2.modulus_sq) + 10.0;
        if past_peak && 1.0 - mass < budget.rel_tol.max(1e-15) * sum.max(f64::MIN_POSITIVE) {
            return Ok(sum.sqrt());
        }
        if past_peak && c1.norm_sqr() + c2.norm_sqr() == 0.0 {
            return Ok(sum.sqrt());
        }
    }
    // slowly converging unit-radius family: fall back to the overlap form
    let o = overlap(fam, z1, z2, budget)?;
    Ok((2.0 - 2.0 * o.re).max(0.0).sqrt())
}

/// The radial measure density `h(x) = C·G(x)·N(x)`, with
/// `∫ dφ/2π ∫ h(x) dx |z⟩⟨z| = 1`.
pub fn measure_weight(fam: &StateFamily, x: f64, contour: &ContourSpec, budget: &SeriesBudget) -> Result<f64> {
    Ok(reduced_measure_weight(fam, x, contour, budget)? * normalization(fam, x, budget)?)
}

/// `h_red(x) = h(x)/N(x) = C·G(x)`, whose moments are ρ(n).
pub fn reduced_measure_weight(fam: &StateFamily, x: f64, contour: &ContourSpec, budget: &SeriesBudget) -> Result<f64> {
    fam.check_x(x)?;
    if fam.is_canonical() {
        return Ok((-x).exp());
    }
    let w = fam.weight();
    Ok(w.prefactor() * weight_eval(&w, x, contour, budget)?)
}

/// One row of [`identity_resolution_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolutionRow {
    pub n: usize,
    pub computed: f64,
    pub expected: f64,
    pub rel_err: f64,
}

/// Check `∫ h_red(x) xⁿ dx = ρ(n)` for n = 0..=n_max. The right side comes
/// from the structure function, not from the weight's Mellin transform.
pub fn identity_resolution_check(
    fam: &StateFamily,
    n_max: usize,
    quad: &RadialQuadrature,
    contour: &ContourSpec,
    budget: &SeriesBudget,
) -> Result<Vec<ResolutionRow>> {
    let w = fam.weight();
    let rule = rule_for(&w, quad);
    let c = w.prefactor();
    let (values, _) = integrate_vec(&rule, n_max + 1, |x, out| {
        let mut p = c * weight_eval(&w, x, contour, budget)?;
        for o in out.iter_mut() {
            *o = p;
            p *= x;
        }
        Ok(())
    })?;
    values
        .into_iter()
        .enumerate()
        .map(|(n, computed)| {
            let expected = fam.rho(n)?;
            Ok(ResolutionRow {
                n,
                computed,
                expected,
                rel_err: (computed - expected).abs() / expected,
            })
        })
        .collect()
}

/// Number of nodes of the diagnostic angular rule.
pub const ANGULAR_NODES: usize = 256;

/// `∫₀^{2π} dφ/2π (z*)ⁿ z^m` at |z|² = x by the trapezoid rule, for testing
/// the analytic reduction `xⁿ δ_{nm}`.
pub fn angular_moment_numeric(x: f64, n: usize, m: usize) -> Complex64 {
    let h = 2.0 * PI / ANGULAR_NODES as f64;
    let r = x.sqrt();
    let sum: Complex64 = (0..ANGULAR_NODES)
        .map(|j| {
            let z = Complex64::from_polar(r, j as f64 * h);
            z.conj().powu(n as u32) * z.powu(m as u32)
        })
        .sum();
    sum / ANGULAR_NODES as f64
}
