//! Thermal states of a linear spectrum and their phase-space functions.
//!
//! With r = n̄/(n̄+1) the state is `ρ̂ = Σ pₙ |n⟩⟨n|`, `pₙ = rⁿ/(n̄+1)`. For a
//! family with structure function ρ and normalization N:
//!
//! ```text
//! Q(x) = ⟨z|ρ̂|z⟩ = (1/(n̄+1)) · N(r x) / N(x)
//! P(x)           = (1/n̄) · G(x/r) / G(x)          (G the measure weight)
//! ∫ h_red(x) P(x) xⁿ dx = pₙ ρ(n)
//! ```
//!
//! The spectrum offset e₀ cancels against the partition function and only
//! enters [`ThermalParams::energy`].

use crate::error::{Error, Result};
use crate::hyper::SeriesBudget;
use crate::meijer::{weight_eval, ContourSpec, MomentRow, WeightForm};
use crate::quadrature::{integrate_vec, RadialQuadrature};
use crate::states::{normalization, reduced_measure_weight, Flavor, StateFamily};
use crate::transform::{FockDiagonal, RadialFunction, Support};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalParams {
    /// Mean occupation n̄.
    pub nbar: f64,
    /// Spectrum offset: E_n = ħω(n + e₀).
    pub e0: f64,
}

impl ThermalParams {
    /// n̄ = 0 is accepted (the vacuum); only the P function refuses it.
    pub fn new(nbar: f64, e0: f64) -> Result<Self> {
        if !(nbar >= 0.0 && nbar.is_finite()) || !e0.is_finite() {
            return Err(Error::InvalidParameter(format!("mean occupation {nbar} must be finite and >= 0")));
        }
        Ok(ThermalParams { nbar, e0 })
    }

    /// From inverse temperature β_T and level spacing ħω (same energy units):
    /// n̄ = 1/(e^{β_T ħω} − 1).
    pub fn from_temperature(beta_t: f64, hbar_omega: f64, e0: f64) -> Result<Self> {
        if !(beta_t > 0.0 && hbar_omega > 0.0) {
            return Err(Error::InvalidParameter("β_T and ħω must be positive".into()));
        }
        Self::new(1.0 / (beta_t * hbar_omega).exp_m1(), e0)
    }

    /// r = n̄/(n̄+1), the ratio of consecutive weights.
    pub fn ratio(&self) -> f64 {
        self.nbar / (self.nbar + 1.0)
    }

    /// pₙ = rⁿ/(n̄+1).
    pub fn weight(&self, n: usize) -> f64 {
        self.ratio().powi(n as i32) / (self.nbar + 1.0)
    }

    /// E_n = ħω(n + e₀).
    pub fn energy(&self, hbar_omega: f64, n: usize) -> f64 {
        hbar_omega * (n as f64 + self.e0)
    }

    /// Smallest n_max whose neglected tail r^{n_max+1} is below 1e−14.
    pub fn default_n_max(&self) -> usize {
        let r = self.ratio();
        if r == 0.0 {
            return 0;
        }
        ((1e-14f64).ln() / r.ln()).ceil().max(1.0) as usize
    }
}

/// Fock-diagonal weights p₀ … p_{n_max} and the neglected mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalWeights {
    pub weights: Vec<f64>,
    pub tail_mass: f64,
}

pub fn thermal_weights(t: &ThermalParams, n_max: usize) -> DiagonalWeights {
    let weights = (0..=n_max).map(|n| t.weight(n)).collect();
    DiagonalWeights {
        weights,
        tail_mass: t.ratio().powi(n_max as i32 + 1),
    }
}

/// Which series to use for the KP diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HusimiForm {
    /// Ratio of the family's own normalization function (ρ̃ for KP).
    #[default]
    Family,
    /// Ratio of the BG series pFq(a; b; ·) regardless of flavor. For KP this
    /// is not the diagonal of the thermal state; it is kept for comparison.
    BgRatio,
}

/// Husimi function `⟨z|ρ̂|z⟩` at x = |z|².
pub fn husimi_q(fam: &StateFamily, t: &ThermalParams, x: f64, budget: &SeriesBudget) -> Result<f64> {
    husimi_q_with(fam, t, x, budget, HusimiForm::Family)
}

pub fn husimi_q_with(
    fam: &StateFamily,
    t: &ThermalParams,
    x: f64,
    budget: &SeriesBudget,
    form: HusimiForm,
) -> Result<f64> {
    fam.check_x(x)?;
    let series = match (form, fam.flavor()) {
        (HusimiForm::BgRatio, Flavor::Kp) => StateFamily::new(fam.model().clone(), Flavor::Bg)?,
        _ => fam.clone(),
    };
    let pre = 1.0 / (t.nbar + 1.0);
    if series.is_canonical() {
        return Ok(pre * (-x / (t.nbar + 1.0)).exp());
    }
    Ok(pre * normalization(&series, t.ratio() * x, budget)? / normalization(&series, x, budget)?)
}

/// Glauber–Sudarshan P function at x = |z|².
///
/// Closed forms are used for the canonical family, `(1/n̄) e^{−x/n̄}`, and for
/// BG pseudoharmonic families, `(1/n̄) ((n̄+1)/n̄)^k e^{−x/n̄}`; everything else
/// goes through [`p_quasi_weight_ratio`].
pub fn p_quasi(fam: &StateFamily, t: &ThermalParams, x: f64, contour: &ContourSpec, budget: &SeriesBudget) -> Result<f64> {
    check_p_args(fam, t, x)?;
    let n = t.nbar;
    if fam.is_canonical() {
        return Ok((-x / n).exp() / n);
    }
    if let (Flavor::Bg, Some(k)) = (fam.flavor(), fam.model().pho_index()) {
        return Ok(((n + 1.0) / n).powf(k) * (-x / n).exp() / n);
    }
    p_quasi_weight_ratio(fam, t, x, contour, budget)
}

/// `(1/n̄) G(x(n̄+1)/n̄) / G(x)` evaluated literally.
pub fn p_quasi_weight_ratio(
    fam: &StateFamily,
    t: &ThermalParams,
    x: f64,
    contour: &ContourSpec,
    budget: &SeriesBudget,
) -> Result<f64> {
    check_p_args(fam, t, x)?;
    if x == 0.0 {
        return Err(Error::InvalidParameter("the weight ratio needs x > 0".into()));
    }
    let w = fam.weight();
    let den = weight_eval(&w, x, contour, budget)?;
    if den < budget.abs_tol {
        return Err(Error::DivisionUnstable { x, value: den });
    }
    let num = weight_eval(&w, x / t.ratio(), contour, budget)?;
    Ok(num / den / t.nbar)
}

fn check_p_args(fam: &StateFamily, t: &ThermalParams, x: f64) -> Result<()> {
    if t.nbar == 0.0 {
        return Err(Error::InvalidParameter(
            "the P function of the vacuum (n̄ = 0) is a distribution, not a function".into(),
        ));
    }
    fam.check_x(x)
}

/// Quadrature for integrands `h_red(x) · P(x) · (smooth)`, which decay like
/// `x^power e^{−x/(r·scale)}` for exponential weights.
pub(crate) fn rule_for_p(fam: &StateFamily, t: &ThermalParams, quad: &RadialQuadrature) -> RadialQuadrature {
    let w = fam.weight();
    match w.form() {
        WeightForm::Exponential { power } => quad.resolve(true, power, t.ratio() / w.scale()),
        WeightForm::Beta { .. } => quad
            .on(crate::quadrature::Domain::Interval(w.support_end()))
            .resolve(false, 0.0, 1.0),
        _ => quad.resolve(false, 0.0, 1.0),
    }
}

/// Check `∫ h_red(x) P(x) xⁿ dx = pₙ ρ(n)` for n = 0..=n_max.
pub fn p_moment_condition_check(
    fam: &StateFamily,
    t: &ThermalParams,
    n_max: usize,
    quad: &RadialQuadrature,
    contour: &ContourSpec,
    budget: &SeriesBudget,
) -> Result<Vec<MomentRow>> {
    let rule = rule_for_p(fam, t, quad);
    let (values, _) = integrate_vec(&rule, n_max + 1, |x, out| {
        let mut v = reduced_measure_weight(fam, x, contour, budget)? * p_quasi(fam, t, x, contour, budget)?;
        for o in out.iter_mut() {
            *o = v;
            v *= x;
        }
        Ok(())
    })?;
    values
        .into_iter()
        .enumerate()
        .map(|(n, computed)| Ok(MomentRow::new(n, computed, t.weight(n) * fam.rho(n)?)))
        .collect()
}

/// Fock-diagonal symbol of the thermal state, `d(s) = r^s/(n̄+1)`.
pub fn thermal_diagonal(t: &ThermalParams) -> FockDiagonal {
    FockDiagonal::geometric(1.0 / (t.nbar + 1.0), t.ratio())
}

/// The Husimi function as a transformable radial function.
pub fn husimi_function(fam: &StateFamily, t: &ThermalParams, budget: &SeriesBudget) -> RadialFunction {
    let (fam2, t2, b2) = (fam.clone(), *t, *budget);
    RadialFunction::new(Arc::new(move |x| husimi_q(&fam2, &t2, x, &b2)), support_of(fam))
        .with_diagonal(thermal_diagonal(t))
}

/// The P function as a transformable radial function, with an exponential
/// decay hint of 1/n̄ for the quadrature.
pub fn p_function(fam: &StateFamily, t: &ThermalParams, contour: &ContourSpec, budget: &SeriesBudget) -> RadialFunction {
    let (fam2, t2, c2, b2) = (fam.clone(), *t, *contour, *budget);
    RadialFunction::new(Arc::new(move |x| p_quasi(&fam2, &t2, x, &c2, &b2)), support_of(fam))
        .with_diagonal(thermal_diagonal(t))
        .with_decay(1.0 / t.nbar)
}

fn support_of(fam: &StateFamily) -> Support {
    let r = fam.radius();
    if r.is_finite() {
        Support::Finite(r)
    } else {
        Support::Entire
    }
}
