//! Hypergeometric models and their series.
//!
//! A model `(p, q, a, b)` fixes the structure function
//!
//! ```text
//! ρ(n) = n! ∏ⱼ (b_j)_n / ∏ᵢ (a_i)_n
//! ```
//!
//! and with it the series `Σ xⁿ/ρ(n) = pFq(a; b; x)`. The dual structure
//! function `ρ̃(n) = (n!)²/ρ(n)` is the structure function of the model with
//! `a` and `b` exchanged, which is how the Klauder–Perelomov family is handled
//! throughout the crate.

use crate::error::{Error, Result};
use crate::special::{ln_gamma, ln_pochhammer};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// The parameter record `(p, q, a, b)` with all parameters strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct HypergeometricModel {
    a: Vec<f64>,
    b: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawModel {
    p: usize,
    q: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl TryFrom<RawModel> for HypergeometricModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        if raw.p != raw.a.len() || raw.q != raw.b.len() {
            return Err(Error::InvalidModel(format!(
                "p = {}, q = {} do not match parameter lists of length {} and {}",
                raw.p,
                raw.q,
                raw.a.len(),
                raw.b.len()
            )));
        }
        HypergeometricModel::new(raw.a, raw.b)
    }
}

impl From<HypergeometricModel> for RawModel {
    fn from(m: HypergeometricModel) -> Self {
        RawModel {
            p: m.a.len(),
            q: m.b.len(),
            a: m.a,
            b: m.b,
        }
    }
}

impl HypergeometricModel {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        for (name, list) in [("a", &a), ("b", &b)] {
            if let Some(v) = list.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return Err(Error::InvalidModel(format!(
                    "parameter {name} = {v} must be a positive real"
                )));
            }
        }
        Ok(HypergeometricModel { a, b })
    }

    /// p = q = 0, the Heisenberg–Weyl case with ρ(n) = n!.
    pub fn canonical() -> Self {
        HypergeometricModel {
            a: Vec::new(),
            b: Vec::new(),
        }
    }

    /// Parse `canonical` or `pho:<k>`.
    pub fn from_preset(name: &str) -> Result<Self> {
        let name = name.trim();
        if name == "canonical" {
            return Ok(Self::canonical());
        }
        if let Some(k) = name.strip_prefix("pho:") {
            let k: f64 = k
                .parse()
                .map_err(|_| Error::InvalidModel(format!("cannot parse Bargmann index in `{name}`")))?;
            if !(k.is_finite() && k >= 0.0) {
                return Err(Error::InvalidModel(format!("Bargmann index {k} must be >= 0")));
            }
            return Self::new(vec![1.0], vec![k + 1.0]);
        }
        Err(Error::InvalidModel(format!("unknown preset `{name}`")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidModel(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serialization is infallible")
    }

    pub fn p(&self) -> usize {
        self.a.len()
    }

    pub fn q(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// The model `(q, p, b, a)`; its structure function is the dual ρ̃.
    pub fn swapped(&self) -> Self {
        HypergeometricModel {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }

    /// Drop numerator/denominator pairs that cancel in every Pochhammer ratio.
    pub fn reduced(&self) -> Self {
        let mut a = self.a.clone();
        let mut b = Vec::with_capacity(self.b.len());
        for &bj in &self.b {
            if let Some(i) = a.iter().position(|&ai| (ai - bj).abs() <= 1e-14 * bj.max(1.0)) {
                a.swap_remove(i);
            } else {
                b.push(bj);
            }
        }
        HypergeometricModel { a, b }
    }

    /// True when the structure function is n! after cancellation.
    pub fn is_canonical(&self) -> bool {
        let r = self.reduced();
        r.a.is_empty() && r.b.is_empty()
    }

    /// Bargmann index k if this is the pseudoharmonic model `(1, 1, [1], [k+1])`.
    pub fn pho_index(&self) -> Option<f64> {
        match (self.a.as_slice(), self.b.as_slice()) {
            ([a], [b]) if *a == 1.0 => Some(b - 1.0),
            _ => None,
        }
    }

    /// `t_{n+1}/t_n` of the series Σ xⁿ/ρ(n), without the factor x.
    fn step(&self, n: usize) -> f64 {
        let n = n as f64;
        let num: f64 = self.a.iter().map(|a| a + n).product();
        let den: f64 = self.b.iter().map(|b| b + n).product();
        num / ((n + 1.0) * den)
    }
}

/// Truncation control for the infinite series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesBudget {
    pub max_terms: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for SeriesBudget {
    fn default() -> Self {
        SeriesBudget {
            max_terms: 100_000,
            rel_tol: 1e-16,
            abs_tol: 1e-300,
        }
    }
}

impl SeriesBudget {
    pub fn new(max_terms: usize, rel_tol: f64, abs_tol: f64) -> Result<Self> {
        let unit = |v: f64| v > 0.0 && v < 1.0;
        if max_terms == 0 || !unit(rel_tol) || !unit(abs_tol) {
            return Err(Error::InvalidParameter(format!(
                "series budget needs max_terms >= 1 and tolerances in (0, 1), got {max_terms}, {rel_tol}, {abs_tol}"
            )));
        }
        Ok(SeriesBudget {
            max_terms,
            rel_tol,
            abs_tol,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Radius {
    Infinite,
    One,
    Zero,
}

impl Radius {
    pub fn value(self) -> f64 {
        match self {
            Radius::Infinite => f64::INFINITY,
            Radius::One => 1.0,
            Radius::Zero => 0.0,
        }
    }
}

/// Convergence radius of Σ xⁿ/ρ(n) together with the growth exponent of
/// `ρ(n+1)/ρ(n) ~ n^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadiusClass {
    pub radius: Radius,
    pub exponent: i64,
}

impl RadiusClass {
    fn from_exponent(exponent: i64) -> Self {
        let radius = match exponent.signum() {
            1 => Radius::Infinite,
            0 => Radius::One,
            _ => Radius::Zero,
        };
        RadiusClass { radius, exponent }
    }
}

/// Radius of Σ xⁿ/ρ(n) by the ratio test, `R = lim ρ(n+1)/ρ(n)`.
pub fn radius_classify(model: &HypergeometricModel) -> RadiusClass {
    RadiusClass::from_exponent(1 + model.q() as i64 - model.p() as i64)
}

/// The classification obtained from the inverted limit `lim ρ(n)/ρ(n+1)`.
///
/// Kept for comparison only: it calls the exponential series a zero-radius
/// series, so nothing in the crate relies on it.
pub fn radius_classify_inverted(model: &HypergeometricModel) -> RadiusClass {
    RadiusClass::from_exponent(-(1 + model.q() as i64 - model.p() as i64))
}

/// Rising factorial `(a)_n = a(a+1)…(a+n−1)`.
pub fn pochhammer(a: f64, n: usize) -> f64 {
    (0..n).map(|s| a + s as f64).product()
}

/// `∏ Γ(b_j) / ∏ Γ(a_i)`.
pub fn gamma_ratio(model: &HypergeometricModel) -> Result<f64> {
    let ln: f64 = model.b.iter().map(|&b| ln_gamma(b)).sum::<f64>()
        - model.a.iter().map(|&a| ln_gamma(a)).sum::<f64>();
    let v = ln.exp();
    if !v.is_finite() {
        return Err(Error::Overflow("gamma ratio"));
    }
    Ok(v)
}

const EXACT_PRODUCT_MAX: usize = 30;
const LOG_SUM_MAX: usize = 2000;

/// ln ρ(n).
pub fn structure_ln_rho(model: &HypergeometricModel, n: usize) -> f64 {
    if n <= LOG_SUM_MAX {
        (0..n)
            .map(|s| {
                let s = s as f64;
                let b: f64 = model.b.iter().map(|b| (b + s).ln()).sum();
                let a: f64 = model.a.iter().map(|a| (a + s).ln()).sum();
                (s + 1.0).ln() + b - a
            })
            .sum()
    } else {
        let nf = n as f64;
        ln_gamma(nf + 1.0) + model.b.iter().map(|&b| ln_pochhammer(b, nf)).sum::<f64>()
            - model.a.iter().map(|&a| ln_pochhammer(a, nf)).sum::<f64>()
    }
}

/// ρ(n) = n! ∏(b)_n / ∏(a)_n.
pub fn structure_rho(model: &HypergeometricModel, n: usize) -> Result<f64> {
    if n <= EXACT_PRODUCT_MAX {
        let num: f64 = model.b.iter().map(|&b| pochhammer(b, n)).product::<f64>() * pochhammer(1.0, n);
        let den: f64 = model.a.iter().map(|&a| pochhammer(a, n)).product();
        let v = num / den;
        if v.is_finite() && v > 0.0 {
            return Ok(v);
        }
    }
    let v = structure_ln_rho(model, n).exp();
    if !v.is_finite() {
        return Err(Error::Overflow("structure function"));
    }
    Ok(v)
}

/// ln ρ̃(n) = 2 ln n! − ln ρ(n).
pub fn structure_ln_rho_dual(model: &HypergeometricModel, n: usize) -> f64 {
    structure_ln_rho(&model.swapped(), n)
}

/// ρ̃(n) = (n!)²/ρ(n) = n! ∏(a)_n / ∏(b)_n.
pub fn structure_rho_dual(model: &HypergeometricModel, n: usize) -> Result<f64> {
    structure_rho(&model.swapped(), n)
}

fn check_radius(model: &HypergeometricModel, modulus: f64) -> Result<()> {
    let radius = radius_classify(model).radius.value();
    if modulus != 0.0 && modulus >= radius {
        return Err(Error::OutsideRadius { x: modulus, radius });
    }
    Ok(())
}

/// Sum Σ tₙ given the recurrence `t_{n+1} = tₙ · w · step(n)`.
///
/// Stops once two consecutive terms fall below `max(rel_tol·|sum|, abs_tol)`
/// while the term ratio is below one, and the geometric tail bound built
/// from the current ratio (or |w| on the unit-radius class, whichever is
/// larger) is below the same threshold.
fn sum_series<T>(model: &HypergeometricModel, w: T, budget: &SeriesBudget) -> Result<T>
where
    T: Copy + std::ops::AddAssign + std::ops::Mul<f64, Output = T> + std::ops::Mul<T, Output = T>,
    T: SeriesScalar,
{
    let finite_radius = radius_classify(model).radius == Radius::One;
    let modulus = w.modulus();
    let mut sum = T::one();
    let mut term = T::one();
    let mut quiet = 0;
    for n in 0..budget.max_terms {
        let ratio = modulus * model.step(n);
        term = term * w * model.step(n);
        sum += term;
        if !sum.modulus().is_finite() {
            return Err(Error::Overflow("hypergeometric series"));
        }
        let threshold = (budget.rel_tol * sum.modulus()).max(budget.abs_tol);
        let next_ratio = modulus * model.step(n + 1);
        let bound_ratio = if finite_radius { next_ratio.max(modulus) } else { next_ratio };
        let small = term.modulus() <= threshold && ratio < 1.0 && next_ratio < 1.0;
        quiet = if small { quiet + 1 } else { 0 };
        if quiet >= 2 {
            let tail = term.modulus() * bound_ratio / (1.0 - bound_ratio);
            if tail <= threshold || term.modulus() == 0.0 {
                return Ok(sum);
            }
        }
    }
    Err(Error::non_convergent(
        "hypergeometric series",
        format!("tail still above tolerance after {} terms at |x| = {modulus}", budget.max_terms),
    ))
}

#[doc(hidden)]
pub trait SeriesScalar {
    fn one() -> Self;
    fn modulus(&self) -> f64;
}

impl SeriesScalar for f64 {
    fn one() -> Self {
        1.0
    }
    fn modulus(&self) -> f64 {
        self.abs()
    }
}

impl SeriesScalar for Complex64 {
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn modulus(&self) -> f64 {
        self.norm()
    }
}

/// `pFq(a; b; x) = Σ xⁿ/ρ(n)` for real x inside the radius.
pub fn pfq_eval(model: &HypergeometricModel, x: f64, budget: &SeriesBudget) -> Result<f64> {
    check_radius(model, x.abs())?;
    sum_series(model, x, budget)
}

/// The same series at a complex argument, by the same term recurrence.
pub fn pfq_eval_complex(model: &HypergeometricModel, w: Complex64, budget: &SeriesBudget) -> Result<Complex64> {
    check_radius(model, w.norm())?;
    sum_series(model, w, budget)
}
