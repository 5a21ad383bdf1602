//! Weight functions of the class G^{m,0}_{p,m}.
//!
//! A weight is described by its Mellin transform
//!
//! ```text
//! M(s) = ∏ⱼ Γ(bottom_j + s) / ∏ᵢ Γ(top_i + s),      ∫₀^∞ x^{s−1} G(x) dx = M(s)
//! ```
//!
//! and evaluated at `scale · x`, so that its moments are `scale^{−s} M(s)`.
//! After cancelling parameters common to both lists, three cases are known in
//! closed form (the registry):
//!
//! | bottom | top | G(x) |
//! |--------|-----|------|
//! | `[b]`  | `[]`  | `e^{−x} x^b` |
//! | `[b]`  | `[a]`, a > b | `x^b (1−x)^{a−b−1} / Γ(a−b)` on (0, 1) |
//!
//! Everything with more Γ factors on top than on the bottom is evaluated by
//! the inverse Mellin integral along a vertical line (see [`inverse_mellin`]).
//! More factors on top than on the bottom, or a bare polynomial ratio, do not
//! define a positive weight and are rejected.

use crate::error::{Error, Result};
use crate::hyper::{HypergeometricModel, SeriesBudget};
use crate::quadrature::{integrate_vec, Domain, RadialQuadrature};
use crate::special::{gamma, ln_gamma, ln_gamma_complex};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// How a weight is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightForm {
    /// `e^{−x} x^power`.
    Exponential { power: f64 },
    /// `x^b (1−x)^{a−b−1} / Γ(a−b)` on (0, 1).
    Beta { b: f64, a: f64 },
    /// Numerical inverse Mellin transform.
    Contour,
    /// The Mellin transform is not that of a positive weight.
    Invalid,
}

/// `G^{m,0}_{p,q}(scale·x | top; bottom)` with `m = q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeijerWeight {
    top: Vec<f64>,
    bottom: Vec<f64>,
    scale: f64,
    /// ln of the constant turning G into the reduced measure weight.
    ln_prefactor: f64,
    // parameter lists after cancellation, used for evaluation
    live_top: Vec<f64>,
    live_bottom: Vec<f64>,
    form: WeightForm,
}

impl MeijerWeight {
    pub fn new(top: Vec<f64>, bottom: Vec<f64>, scale: f64, ln_prefactor: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("weight scale {scale} must be positive")));
        }
        if top.iter().chain(&bottom).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("weight parameters must be finite".into()));
        }
        let (live_bottom, live_top) = cancel(&bottom, &top);
        let form = classify(&live_bottom, &live_top);
        Ok(MeijerWeight {
            top,
            bottom,
            scale,
            ln_prefactor,
            live_top,
            live_bottom,
            form,
        })
    }

    pub fn m(&self) -> usize {
        self.bottom.len()
    }
    pub fn n_idx(&self) -> usize {
        0
    }
    pub fn p(&self) -> usize {
        self.top.len()
    }
    pub fn q(&self) -> usize {
        self.bottom.len()
    }
    pub fn top(&self) -> &[f64] {
        &self.top
    }
    pub fn bottom(&self) -> &[f64] {
        &self.bottom
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }
    pub fn form(&self) -> WeightForm {
        self.form
    }

    /// The constant `C` with `h_red(x) = C · G(x)`.
    pub fn prefactor(&self) -> f64 {
        self.ln_prefactor.exp()
    }

    pub fn ln_prefactor(&self) -> f64 {
        self.ln_prefactor
    }

    pub fn with_scale(&self, scale: f64) -> Result<Self> {
        MeijerWeight::new(self.top.clone(), self.bottom.clone(), scale, self.ln_prefactor)
    }

    /// Upper end of the support in x, infinite unless the weight is of beta type.
    pub fn support_end(&self) -> f64 {
        match self.form {
            WeightForm::Beta { .. } => 1.0 / self.scale,
            _ => f64::INFINITY,
        }
    }

    /// ln M(s) of the unit-scale weight.
    pub fn ln_mellin(&self, s: Complex64) -> Complex64 {
        let num: Complex64 = self.live_bottom.iter().map(|&b| ln_gamma_complex(s + b)).sum();
        let den: Complex64 = self.live_top.iter().map(|&a| ln_gamma_complex(s + a)).sum();
        num - den
    }

    /// `scale^{−s} M(s)` for real s right of every pole.
    pub fn mellin(&self, s: f64) -> f64 {
        let num: f64 = self.live_bottom.iter().map(|&b| ln_gamma(s + b)).sum();
        let den: f64 = self.live_top.iter().map(|&a| ln_gamma(s + a)).sum();
        (num - den - s * self.scale.ln()).exp()
    }

    /// Real part of the rightmost pole of M(s).
    pub fn pole_edge(&self) -> f64 {
        self.live_bottom.iter().map(|b| -b).fold(f64::NEG_INFINITY, f64::max)
    }
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-14 * a.abs().max(b.abs()).max(1.0)
}

fn cancel(bottom: &[f64], top: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut top = top.to_vec();
    let mut live_bottom = Vec::new();
    for &b in bottom {
        if let Some(i) = top.iter().position(|&a| same(a, b)) {
            top.swap_remove(i);
        } else {
            live_bottom.push(b);
        }
    }
    (live_bottom, top)
}

fn classify(bottom: &[f64], top: &[f64]) -> WeightForm {
    match (bottom, top) {
        ([b], []) => WeightForm::Exponential { power: *b },
        ([b], [a]) if a > b => WeightForm::Beta { b: *b, a: *a },
        _ if bottom.len() > top.len() => WeightForm::Contour,
        _ => WeightForm::Invalid,
    }
}

/// Weight of the Barut–Girardello measure: Mellin transform
/// `Γ(s) ∏Γ(b−1+s) / ∏Γ(a−1+s)`, prefactor `∏Γ(a)/∏Γ(b)`.
pub fn bg_weight(model: &HypergeometricModel) -> MeijerWeight {
    let mut bottom = vec![0.0];
    bottom.extend(model.b().iter().map(|b| b - 1.0));
    let top = model.a().iter().map(|a| a - 1.0).collect();
    let ln_prefactor = model.a().iter().map(|&a| ln_gamma(a)).sum::<f64>()
        - model.b().iter().map(|&b| ln_gamma(b)).sum::<f64>();
    MeijerWeight::new(top, bottom, 1.0, ln_prefactor).expect("model parameters are finite and positive")
}

/// Weight of the Klauder–Perelomov measure: Mellin transform
/// `Γ(s) ∏Γ(a−1+s) / ∏Γ(b−1+s)`, prefactor `∏Γ(b)/∏Γ(a)`.
pub fn kp_weight(model: &HypergeometricModel) -> MeijerWeight {
    bg_weight(&model.swapped())
}

/// Vertical-line contour for the inverse Mellin transform.
///
/// Unset fields are chosen per evaluation: the abscissa at the saddle point
/// of `|x^{−s} M(s)|` on the real axis (kept at least `MIN_POLE_GAP` right of
/// the rightmost pole), the half height by doubling until the integrand
/// envelope has dropped by `1e−17`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub abscissa: Option<f64>,
    pub half_height: Option<f64>,
    /// Trapezoid nodes on the first pass; the step is then halved until two
    /// passes agree.
    pub nodes: usize,
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec {
            abscissa: None,
            half_height: None,
            nodes: 64,
        }
    }
}

const MIN_POLE_GAP: f64 = 0.25;
const ENVELOPE_DROP: f64 = 1e-17;
const MAX_HALVINGS: usize = 10;

/// Saddle of `φ(c) = −c ln x + Re ln S(c)` on `(pole_edge, ∞)`, clamped to
/// the minimum pole gap.
fn saddle<F: Fn(Complex64) -> Complex64>(ln_x: f64, ln_symbol: &F, pole_edge: f64) -> f64 {
    let phi = |c: f64| -c * ln_x + ln_symbol(Complex64::new(c, 0.0)).re;
    let lo = if pole_edge.is_finite() { pole_edge + MIN_POLE_GAP } else { 1.0 };
    // bracket the minimum of a convex function
    let mut step = 1.0;
    let mut a = lo;
    let mut b = lo + step;
    if phi(b) >= phi(lo) && phi(lo + 1e-3) >= phi(lo) {
        // minimum between lo and lo + 1, or at lo
        a = lo;
    } else {
        while phi(b + step) < phi(b) {
            a = b;
            step *= 2.0;
            b += step;
            if b > 1e7 {
                break;
            }
        }
        b += step;
    }
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (b - g * (b - a), a + g * (b - a));
    let (mut f1, mut f2) = (phi(x1), phi(x2));
    for _ in 0..80 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = phi(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = phi(x2);
        }
        if (b - a).abs() < 1e-6 * (1.0 + a.abs()) {
            break;
        }
    }
    (0.5 * (a + b)).max(lo)
}

/// Inverse Mellin transform `(1/2πi) ∫ x^{−s} S(s) ds` of a symbol that is
/// real on the real axis and analytic right of `pole_edge`.
///
/// By conjugate symmetry only `t ≥ 0` is needed:
/// `G(x) = (1/π) Re ∫₀^∞ x^{−c−it} S(c+it) dt`. The trapezoid rule is
/// spectrally accurate here, so the step is halved until two passes agree to
/// roughly the square root of the target; the finer pass is returned.
pub fn inverse_mellin<F>(x: f64, ln_symbol: F, pole_edge: f64, contour: &ContourSpec) -> Result<f64>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!("inverse Mellin transform needs x > 0, got {x}")));
    }
    let ln_x = x.ln();
    let c = match contour.abscissa {
        Some(c) if c > pole_edge => c,
        Some(c) => {
            return Err(Error::InvalidParameter(format!(
                "contour abscissa {c} must lie right of the pole at {pole_edge}"
            )))
        }
        None => saddle(ln_x, &ln_symbol, pole_edge),
    };
    let ln_f = |t: f64| {
        let s = Complex64::new(c, t);
        ln_symbol(s) - s * ln_x
    };
    let env0 = ln_f(0.0).re;
    let height = match contour.half_height {
        Some(h) => h,
        None => {
            let mut t = 4.0;
            while ln_f(t).re - env0 > ENVELOPE_DROP.ln() || ln_f(1.5 * t).re - env0 > ENVELOPE_DROP.ln() {
                t *= 2.0;
                if t > 1e6 {
                    return Err(Error::non_convergent(
                        "inverse Mellin transform",
                        format!("integrand does not decay along Re s = {c} at x = {x}"),
                    ));
                }
            }
            t
        }
    };
    // values are rescaled by e^{−env0} to keep them near unity
    let f = |t: f64| {
        let l = ln_f(t);
        (Complex64::new(l.re - env0, l.im)).exp().re
    };
    let mut n = contour.nodes.max(8);
    let mut h = height / n as f64;
    let mut sum = 0.5 * f(0.0) + (1..=n).map(|j| f(j as f64 * h)).sum::<f64>();
    let mut abs_sum = (1..=n).map(|j| f(j as f64 * h).abs()).sum::<f64>();
    let mut estimate = sum * h;
    for _ in 0..MAX_HALVINGS {
        let mids: Vec<f64> = (0..n).map(|j| f((j as f64 + 0.5) * h)).collect();
        sum += mids.iter().sum::<f64>();
        abs_sum += mids.iter().map(|v| v.abs()).sum::<f64>();
        n *= 2;
        h *= 0.5;
        let refined = sum * h;
        let scale = refined.abs().max(1e-13 * abs_sum * h);
        if (refined - estimate).abs() <= 1e-9 * scale {
            return Ok(refined / PI * env0.exp());
        }
        estimate = refined;
    }
    Err(Error::non_convergent(
        "inverse Mellin transform",
        format!("trapezoid sums still changing after {n} nodes at x = {x}"),
    ))
}

/// Value of the weight at x (that is, `G(scale · x)` without prefactor).
pub fn weight_eval(w: &MeijerWeight, x: f64, contour: &ContourSpec, budget: &SeriesBudget) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::InvalidParameter(format!("weight argument {x} must be nonnegative")));
    }
    let y = w.scale * x;
    match w.form {
        WeightForm::Exponential { power } => Ok((-y).exp() * y.powf(power)),
        WeightForm::Beta { b, a } => {
            if y >= 1.0 {
                Ok(0.0)
            } else {
                Ok(y.powf(b) * (1.0 - y).powf(a - b - 1.0) / gamma(a - b))
            }
        }
        WeightForm::Contour => contour_value(w, y, contour, budget),
        WeightForm::Invalid => Err(Error::NoWeight(format!(
            "Mellin transform {} has no positive inverse",
            describe(&w.live_bottom, &w.live_top)
        ))),
    }
}

/// The weight by the contour integral even when the registry knows it.
pub fn weight_eval_contour(w: &MeijerWeight, x: f64, contour: &ContourSpec, budget: &SeriesBudget) -> Result<f64> {
    match w.form {
        WeightForm::Exponential { .. } | WeightForm::Contour => contour_value(w, w.scale * x, contour, budget),
        WeightForm::Beta { .. } => Err(Error::Unsupported(
            "contour evaluation of finite-support weights (Mellin transform decays only algebraically)".into(),
        )),
        WeightForm::Invalid => weight_eval(w, x, contour, budget),
    }
}

/// `G(scale·x/r) / G(scale·x)` for 0 < r ≤ 1, in closed form where the
/// registry allows it (including x = 0).
pub fn weight_ratio(w: &MeijerWeight, x: f64, r: f64, contour: &ContourSpec, budget: &SeriesBudget) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) || !(x >= 0.0) {
        return Err(Error::InvalidParameter(format!("weight ratio needs 0 < r <= 1 and x >= 0, got r = {r}, x = {x}")));
    }
    if r == 1.0 {
        return Ok(1.0);
    }
    let y = w.scale * x;
    match w.form {
        WeightForm::Exponential { power } => Ok(r.powf(-power) * (-y * (1.0 / r - 1.0)).exp()),
        WeightForm::Beta { b, a } => {
            if y / r >= 1.0 {
                Ok(0.0)
            } else {
                Ok(r.powf(-b) * ((1.0 - y / r) / (1.0 - y)).powf(a - b - 1.0))
            }
        }
        _ => {
            let den = weight_eval(w, x, contour, budget)?;
            if den < budget.abs_tol {
                return Err(Error::DivisionUnstable { x, value: den });
            }
            Ok(weight_eval(w, x / r, contour, budget)? / den)
        }
    }
}

fn contour_value(w: &MeijerWeight, y: f64, contour: &ContourSpec, budget: &SeriesBudget) -> Result<f64> {
    if y == 0.0 {
        return Err(Error::InvalidParameter("contour-evaluated weights need x > 0".into()));
    }
    let v = inverse_mellin(y, |s| w.ln_mellin(s), w.pole_edge(), contour)?;
    if v < 0.0 {
        if -v > budget.abs_tol {
            return Err(Error::NegativeWeight { x: y / w.scale, value: v });
        }
        return Ok(0.0);
    }
    Ok(v)
}

fn describe(bottom: &[f64], top: &[f64]) -> String {
    let list = |v: &[f64]| v.iter().map(|p| format!("Γ({p}+s)")).collect::<Vec<_>>().join("·");
    let num = if bottom.is_empty() { "1".to_string() } else { list(bottom) };
    let den = if top.is_empty() { "1".to_string() } else { list(top) };
    format!("{num} / {den}")
}

/// One row of [`moment_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub n: usize,
    pub computed: f64,
    pub expected: f64,
    pub rel_err: f64,
}

impl MomentRow {
    /// Relative error, or absolute error when the expected value is 0.
    pub(crate) fn new(n: usize, computed: f64, expected: f64) -> Self {
        let rel_err = if expected == 0.0 {
            computed.abs()
        } else {
            (computed - expected).abs() / expected.abs()
        };
        MomentRow {
            n,
            computed,
            expected,
            rel_err,
        }
    }
}

/// Quadrature rule matched to a weight: Gauss–Laguerre with the weight's own
/// power and scale for exponential weights, adaptive otherwise, on the
/// weight's support.
pub(crate) fn rule_for(w: &MeijerWeight, quad: &RadialQuadrature) -> RadialQuadrature {
    match w.form {
        WeightForm::Exponential { power } => quad.resolve(true, power, 1.0 / w.scale),
        WeightForm::Beta { .. } => quad.on(Domain::Interval(w.support_end())).resolve(false, 0.0, 1.0),
        _ => quad.resolve(false, 0.0, 1.0),
    }
}

/// Compare `∫ xⁿ G(scale·x) dx` with `scale^{−n−1} M(n+1)` for n = 0..=n_max.
pub fn moment_check(
    w: &MeijerWeight,
    n_max: usize,
    quad: &RadialQuadrature,
    contour: &ContourSpec,
    budget: &SeriesBudget,
) -> Result<Vec<MomentRow>> {
    if w.form == WeightForm::Invalid {
        weight_eval(w, 1.0, contour, budget)?;
    }
    let rule = rule_for(w, quad);
    let (values, _) = integrate_vec(&rule, n_max + 1, |x, out| {
        let g = weight_eval(w, x, contour, budget)?;
        let mut p = g;
        for o in out.iter_mut() {
            *o = p;
            p *= x;
        }
        Ok(())
    })?;
    Ok(values
        .into_iter()
        .enumerate()
        .map(|(n, computed)| MomentRow::new(n, computed, w.mellin(n as f64 + 1.0)))
        .collect())
}
