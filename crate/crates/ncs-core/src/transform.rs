//! The generalized Fourier transform pair on radial phase-space functions.
//!
//! For a family with measure `dμ = h(x) dx dφ/2π` and `h = h_red·N`, the
//! angular average of `⟨α|z⟩⟨z|α⟩` is `K(|α|²|z|²)/(N(|α|²) N(|z|²))` with
//! `K(y) = Σ yⁿ/ρ(n)²`, so the transform of a radial f separates:
//!
//! ```text
//! F(A) = ∫ dμ(z) f(|z|²) ⟨α|z⟩⟨z|α⟩ = (1/N(A)) Σₙ Aⁿ/ρ(n) · sₙ,
//! sₙ = (1/ρ(n)) ∫ h_red(x) f(x) xⁿ dx.
//! ```
//!
//! sₙ is the n-th diagonal element of the operator `∫ dμ f |z⟩⟨z|`, and F is
//! that operator's Husimi function. The moments sₙ do not depend on A, so a
//! [`Transformer`] caches them per function in chunks.
//!
//! Applying the same kernel to F does not undo the transform: it smooths
//! again (the Husimi function of a thermal state at n̄ maps to the one at
//! n̄+1). The inverse is instead taken through the Fock diagonal. When the
//! diagonal is a geometric mixture `d(n) = Σⱼ cⱼ rⱼⁿ`, the moment problem
//! `∫ h_red f xⁿ = ρ(n) d(n)` is solved by scaled copies of the weight:
//!
//! ```text
//! f(x) = Σⱼ (cⱼ/rⱼ) · G(x/rⱼ) / G(x)
//! ```
//!
//! because `G(x/r)` has Mellin transform `r^s M(s)`.

use crate::error::{Error, Result};
use crate::hyper::{pfq_eval, HypergeometricModel, SeriesBudget};
use crate::meijer::{weight_ratio, ContourSpec, MomentRow, WeightForm};
use crate::quadrature::{integrate, integrate_vec, laguerre_rule, Domain, RadialQuadrature, Scheme, DEFAULT_GL_ORDER};
use crate::special::bessel_j0;
use crate::states::{normalization, reduced_measure_weight, StateFamily};
use crate::thermal::{p_quasi, ThermalParams};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    Entire,
    /// Defined for x < R.
    Finite(f64),
}

/// A Fock-diagonal operator with `⟨n|D|n⟩ = Σⱼ cⱼ rⱼⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockDiagonal {
    /// Pairs `(cⱼ, rⱼ)` with rⱼ ∈ [0, 1].
    pub terms: Vec<(f64, f64)>,
}

impl FockDiagonal {
    pub fn geometric(c: f64, r: f64) -> Self {
        FockDiagonal { terms: vec![(c, r)] }
    }

    /// `c` times the identity.
    pub fn constant(c: f64) -> Self {
        Self::geometric(c, 1.0)
    }

    pub fn eval(&self, n: usize) -> f64 {
        self.terms.iter().map(|&(c, r)| c * r.powi(n as i32)).sum()
    }

    pub fn scaled(&self, k: f64) -> Self {
        FockDiagonal {
            terms: self.terms.iter().map(|&(c, r)| (k * c, r)).collect(),
        }
    }

    pub fn plus(&self, other: &FockDiagonal) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        FockDiagonal { terms }
    }
}

type Evaluator = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// A function of x = |z|² only.
///
/// Clones share an identity, which keys the moment cache of a
/// [`Transformer`]; a freshly constructed function never hits stale entries.
#[derive(Clone)]
pub struct RadialFunction {
    id: u64,
    eval: Evaluator,
    support: Support,
    diagonal: Option<FockDiagonal>,
    decay: Option<f64>,
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFunction")
            .field("id", &self.id)
            .field("support", &self.support)
            .field("diagonal", &self.diagonal)
            .field("decay", &self.decay)
            .finish()
    }
}

impl RadialFunction {
    pub fn new(eval: Evaluator, support: Support) -> Self {
        static NEXT_ID: AtomicU64 = AtomicU64::new(0);
        RadialFunction {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            eval,
            support,
            diagonal: None,
            decay: None,
        }
    }

    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(f64) -> Result<f64> + Send + Sync + 'static,
    {
        Self::new(Arc::new(f), Support::Entire)
    }

    /// The constant function, whose diagonal is `c` times the identity.
    pub fn constant(c: f64) -> Self {
        Self::from_fn(move |_| Ok(c)).with_diagonal(FockDiagonal::constant(c))
    }

    /// Attach the Fock diagonal of the operator whose Husimi function this
    /// is. Needed by [`gft_inverse`].
    pub fn with_diagonal(mut self, d: FockDiagonal) -> Self {
        self.diagonal = Some(d);
        self
    }

    /// Attach an exponential decay rate: `|f(x)| ≲ e^{−rate·x}` up to powers.
    /// Gauss–Laguerre moment rules absorb it into their scale.
    pub fn with_decay(mut self, rate: f64) -> Self {
        self.decay = Some(rate);
        self
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        (self.eval)(x)
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn diagonal(&self) -> Option<&FockDiagonal> {
        self.diagonal.as_ref()
    }

    pub fn decay(&self) -> Option<f64> {
        self.decay
    }
}

/// The angular-averaged kernel `K(y) = Σ yⁿ/ρ(n)²`.
///
/// With `ρ(n) = n! ∏(b)ₙ/∏(a)ₙ` this is itself hypergeometric:
/// `K = ₂ₚF₂q₊₁(a, a; 1, b, b; y)`.
#[derive(Debug, Clone)]
pub struct KernelSeries {
    fam: StateFamily,
    series: HypergeometricModel,
    budget: SeriesBudget,
}

impl KernelSeries {
    pub fn new(fam: &StateFamily, budget: &SeriesBudget) -> Result<Self> {
        let m = fam.effective_model();
        let a: Vec<f64> = m.a().iter().chain(m.a()).copied().collect();
        let b: Vec<f64> = std::iter::once(1.0).chain(m.b().iter().copied()).chain(m.b().iter().copied()).collect();
        Ok(KernelSeries {
            fam: fam.clone(),
            series: HypergeometricModel::new(a, b)?,
            budget: *budget,
        })
    }

    /// `1/ρ(n)²`.
    pub fn coefficient(&self, n: usize) -> f64 {
        (-2.0 * self.fam.ln_rho(n)).exp()
    }

    pub fn eval(&self, y: f64) -> Result<f64> {
        pfq_eval(&self.series, y, &self.budget)
    }
}

/// Moments are computed this many at a time, so that the values never depend
/// on which A triggered their computation.
const CHUNK: usize = 32;

/// Transform engine for one family, with a moment cache shared across
/// threads.
#[derive(Debug)]
pub struct Transformer {
    fam: StateFamily,
    quad: RadialQuadrature,
    contour: ContourSpec,
    budget: SeriesBudget,
    cache: RwLock<HashMap<(u64, usize), Arc<Vec<f64>>>>,
}

impl Transformer {
    pub fn new(fam: &StateFamily, quad: &RadialQuadrature, contour: &ContourSpec, budget: &SeriesBudget) -> Result<Self> {
        quad.validate()?;
        Ok(Transformer {
            fam: fam.clone(),
            quad: *quad,
            contour: *contour,
            budget: *budget,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn family(&self) -> &StateFamily {
        &self.fam
    }

    /// Quadrature for moments n < `end` of `h_red·f`.
    fn moment_rule(&self, f: &RadialFunction, end: usize) -> RadialQuadrature {
        let w = self.fam.weight();
        match w.form() {
            WeightForm::Exponential { power } => {
                let scale = 1.0 / (w.scale() + f.decay().unwrap_or(0.0));
                let quad = match self.quad.scheme {
                    Scheme::Auto => RadialQuadrature::gauss_laguerre((DEFAULT_GL_ORDER + end / 2).min(256)),
                    _ => self.quad,
                };
                quad.resolve(true, power, scale)
            }
            WeightForm::Beta { .. } => self.quad.on(Domain::Interval(w.support_end())).resolve(false, 0.0, 1.0),
            _ => self.quad.resolve(false, 0.0, 1.0),
        }
    }

    fn compute_chunk(&self, f: &RadialFunction, chunk: usize) -> Result<Vec<f64>> {
        let start = chunk * CHUNK;
        let ln_rho: Vec<f64> = (start..start + CHUNK).map(|n| self.fam.ln_rho(n)).collect();
        let rule = self.moment_rule(f, start + CHUNK);
        let (values, _) = integrate_vec(&rule, CHUNK, |x, out| {
            let hf = reduced_measure_weight(&self.fam, x, &self.contour, &self.budget)? * f.eval(x)?;
            if x == 0.0 {
                out.fill(0.0);
                if start == 0 {
                    out[0] = hf;
                }
                return Ok(());
            }
            let ln_x = x.ln();
            for (j, o) in out.iter_mut().enumerate() {
                let n = (start + j) as f64;
                *o = if hf == 0.0 { 0.0 } else { hf * (n * ln_x - ln_rho[j]).exp() };
            }
            Ok(())
        })?;
        Ok(values)
    }

    fn chunk(&self, f: &RadialFunction, chunk: usize) -> Result<Arc<Vec<f64>>> {
        let key = (f.id, chunk);
        if let Some(v) = self.cache.read().expect("moment cache poisoned").get(&key) {
            return Ok(v.clone());
        }
        // entries are deterministic, so a concurrent duplicate computation
        // only wastes time
        let v = Arc::new(self.compute_chunk(f, chunk)?);
        log::debug!("moments {}..{} of function {}", chunk * CHUNK, (chunk + 1) * CHUNK, f.id);
        self.cache.write().expect("moment cache poisoned").insert(key, v.clone());
        Ok(v)
    }

    /// Scaled moment `sₙ = ∫ h_red f xⁿ dx / ρ(n)`, the n-th diagonal
    /// element of `∫ dμ f |z⟩⟨z|`.
    pub fn scaled_moment(&self, f: &RadialFunction, n: usize) -> Result<f64> {
        Ok(self.chunk(f, n / CHUNK)?[n % CHUNK])
    }

    /// `F(A) = ∫ dμ(z) f(|z|²) ⟨α|z⟩⟨z|α⟩` at A = |α|².
    ///
    /// The kernel series is stopped once the remainder, bounded by the
    /// largest |sₙ| seen so far times the geometric tail of `Aⁿ/ρ(n)`, is
    /// below the budget.
    pub fn gft(&self, f: &RadialFunction, alpha_sq: f64) -> Result<f64> {
        self.fam.check_x(alpha_sq)?;
        let ln_norm = normalization(&self.fam, alpha_sq, &self.budget)?.ln();
        if alpha_sq == 0.0 {
            return self.scaled_moment(f, 0);
        }
        let ln_a = alpha_sq.ln();
        let radius = self.fam.radius();
        let (mut sum, mut s_max) = (0.0f64, 0.0f64);
        let mut ln_rho_n = self.fam.ln_rho(0);
        for n in 0..self.budget.max_terms {
            let s = self.scaled_moment(f, n)?;
            let base = (n as f64 * ln_a - ln_rho_n - ln_norm).exp();
            sum += base * s;
            s_max = s_max.max(s.abs());
            let ln_rho_next = self.fam.ln_rho(n + 1);
            let mut q = (ln_a - (ln_rho_next - ln_rho_n)).exp();
            if radius.is_finite() {
                q = q.max(alpha_sq / radius);
            }
            if n >= 1 && q < 1.0 && s_max * base * q / (1.0 - q) <= self.budget.rel_tol * sum.abs() + self.budget.abs_tol {
                return Ok(sum);
            }
            ln_rho_n = ln_rho_next;
        }
        Err(Error::non_convergent(
            "transform kernel series",
            format!("{} terms at |α|² = {alpha_sq}", self.budget.max_terms),
        ))
    }

    /// The same transform with the kernel summed inside the integral, for
    /// cross-checking the moment route.
    pub fn gft_direct(&self, f: &RadialFunction, alpha_sq: f64) -> Result<f64> {
        self.fam.check_x(alpha_sq)?;
        let kernel = KernelSeries::new(&self.fam, &self.budget)?;
        let norm = normalization(&self.fam, alpha_sq, &self.budget)?;
        let rule = self.moment_rule(f, 2 * CHUNK);
        let (v, _) = integrate(&rule, |x| {
            Ok(reduced_measure_weight(&self.fam, x, &self.contour, &self.budget)? * f.eval(x)? * kernel.eval(alpha_sq * x)?)
        })?;
        Ok(v / norm)
    }

    /// Inverse transform at x = |z|²: the function whose transform is `big_f`.
    ///
    /// Needs the Fock diagonal of `big_f` as a geometric mixture with every
    /// ratio in (0, 1]; anything else (including a pure vacuum term) has no
    /// function-valued inverse here.
    pub fn gft_inverse(&self, big_f: &RadialFunction, z_sq: f64) -> Result<f64> {
        self.fam.check_x(z_sq)?;
        let d = big_f.diagonal().ok_or_else(|| {
            Error::Unsupported("inverse transform of a function without a known Fock diagonal".into())
        })?;
        let w = self.fam.weight();
        let mut total = 0.0;
        for &(c, r) in &d.terms {
            if r <= 0.0 {
                return Err(Error::Unsupported(
                    "inverse transform of a vacuum component (its P function is a distribution)".into(),
                ));
            }
            total += c / r * weight_ratio(&w, z_sq, r, &self.contour, &self.budget)?;
        }
        Ok(total)
    }
}

/// One-shot [`Transformer::gft`].
pub fn gft(
    fam: &StateFamily,
    f: &RadialFunction,
    alpha_sq: f64,
    quad: &RadialQuadrature,
    contour: &ContourSpec,
    budget: &SeriesBudget,
) -> Result<f64> {
    Transformer::new(fam, quad, contour, budget)?.gft(f, alpha_sq)
}

/// One-shot [`Transformer::gft_inverse`].
pub fn gft_inverse(
    fam: &StateFamily,
    big_f: &RadialFunction,
    z_sq: f64,
    contour: &ContourSpec,
    budget: &SeriesBudget,
) -> Result<f64> {
    Transformer::new(fam, &RadialQuadrature::default(), contour, budget)?.gft_inverse(big_f, z_sq)
}

/// A computed value against its closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub computed: f64,
    pub expected: f64,
    pub rel_err: f64,
}

impl Comparison {
    pub fn new(computed: f64, expected: f64) -> Self {
        let rel_err = if expected == 0.0 {
            computed.abs()
        } else {
            (computed - expected).abs() / expected.abs()
        };
        Comparison {
            computed,
            expected,
            rel_err,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexComparison {
    pub computed: Complex64,
    pub expected: Complex64,
    pub rel_err: f64,
}

impl ComplexComparison {
    pub fn new(computed: Complex64, expected: Complex64) -> Self {
        let diff = (computed - expected).norm();
        let rel_err = if expected.norm() == 0.0 { diff } else { diff / expected.norm() };
        ComplexComparison {
            computed,
            expected,
            rel_err,
        }
    }
}

/// `⟨−α|ρ̂|α⟩ e^{|α|²}` for the canonical thermal state, `e^{−rA}/(n̄+1)`.
pub fn mehta_anti_diagonal(t: &ThermalParams, alpha_sq: f64) -> f64 {
    (-t.ratio() * alpha_sq).exp() / (t.nbar + 1.0)
}

const MEHTA_MAX_ORDER: usize = 256;
const MEHTA_AGREEMENT: f64 = 1e-10;

/// Recover `P(x) e^{−x}` for the canonical thermal state from its
/// anti-diagonal elements:
///
/// ```text
/// P(x) e^{−x} = ∫ d²α/π  e^{|α|²}⟨−α|ρ̂|α⟩ e^{zα*−z*α}
///             = ∫₀^∞ dA  e^{A}⟨−α|ρ̂|α⟩ J₀(2√(xA))
/// ```
///
/// The radial integral uses Gauss–Laguerre nodes scaled to the decay of the
/// anti-diagonal, doubling the order until two passes agree.
pub fn mehta_formula_check(t: &ThermalParams, z_sq: f64, quad: &RadialQuadrature) -> Result<Comparison> {
    if t.nbar == 0.0 {
        return Err(Error::InvalidParameter("the P function of the vacuum is not a function".into()));
    }
    if !(z_sq >= 0.0 && z_sq.is_finite()) {
        return Err(Error::InvalidParameter(format!("|z|² = {z_sq} must be finite and nonnegative")));
    }
    let expected = (-z_sq / t.nbar - z_sq).exp() / t.nbar;
    let mut order = match quad.scheme {
        Scheme::GaussLaguerre { order, .. } => order,
        _ => 32,
    };
    let scale = 1.0 / t.ratio();
    // e^{−rA} is the Laguerre weight after A = u/r; returns the value and
    // the sum of absolute contributions
    let pass = |order: usize| -> (f64, f64) {
        let rule = laguerre_rule(order, 0.0);
        let (mut sum, mut l1) = (0.0, 0.0);
        for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
            let v = w * bessel_j0(2.0 * (z_sq * scale * u).sqrt());
            sum += v;
            l1 += v.abs();
        }
        let k = scale / (t.nbar + 1.0);
        (sum * k, l1 * k)
    };
    // The result can be far smaller than the oscillating integrand, so
    // agreement is also accepted at the rounding level of the sum.
    let (mut prev, _) = pass(order);
    while order < MEHTA_MAX_ORDER {
        order = (order * 2).min(MEHTA_MAX_ORDER);
        let (next, l1) = pass(order);
        if (next - prev).abs() <= MEHTA_AGREEMENT * next.abs() + 64.0 * f64::EPSILON * l1 {
            return Ok(Comparison::new(next, expected));
        }
        prev = next;
    }
    Err(Error::non_convergent(
        "anti-diagonal inversion",
        format!("Gauss-Laguerre order {MEHTA_MAX_ORDER} still changing at |z|² = {z_sq}"),
    ))
}

/// Nodes of the angular trapezoid rule in [`gaussian_integral_check`].
const GAUSSIAN_ANGULAR_NODES: usize = 256;

/// `∫ d²z/π e^{−a|z|²} e^{σz*} z^m` against `(1/a)(σ/a)^m`, by an angular
/// trapezoid rule and radial Gauss–Laguerre nodes.
pub fn gaussian_integral_check(a: f64, sigma: Complex64, m: usize) -> Result<ComplexComparison> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("Gaussian width {a} must be positive")));
    }
    let expected = (sigma / a).powu(m as u32) / a;
    let rule = laguerre_rule(DEFAULT_GL_ORDER, 0.0);
    let h = 2.0 * PI / GAUSSIAN_ANGULAR_NODES as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        let x = u / a;
        let r = x.sqrt();
        let ring: Complex64 = (0..GAUSSIAN_ANGULAR_NODES)
            .map(|j| {
                let z = Complex64::from_polar(r, j as f64 * h);
                (sigma * z.conj()).exp() * z.powu(m as u32)
            })
            .sum();
        total += w / a * ring / GAUSSIAN_ANGULAR_NODES as f64;
    }
    Ok(ComplexComparison::new(total, expected))
}

/// Both sides of the optical-equivalence theorem for `f = xⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalEquivalence {
    pub n: usize,
    /// `∫ h_red P xⁿ dx` against `pₙ ρ(n)`.
    pub reduced: MomentRow,
    /// `∫ h P xⁿ dx` against `Tr[ρ̂ A₊ⁿ A₋ⁿ] = Σ_{m≥n} p_m ρ(m)/ρ(m−n)`.
    pub trace: MomentRow,
}

pub fn optical_equivalence_check(
    fam: &StateFamily,
    t: &ThermalParams,
    n: usize,
    quad: &RadialQuadrature,
    contour: &ContourSpec,
    budget: &SeriesBudget,
) -> Result<OpticalEquivalence> {
    let reduced_rule = crate::thermal::rule_for_p(fam, t, quad);
    let w = fam.weight();
    let full_rule = match w.form() {
        WeightForm::Beta { .. } => quad.on(Domain::Interval(w.support_end())).resolve(false, 0.0, 1.0),
        _ => quad.resolve(false, 0.0, t.nbar),
    };
    let hp = |x: f64| -> Result<f64> {
        Ok(reduced_measure_weight(fam, x, contour, budget)? * p_quasi(fam, t, x, contour, budget)? * x.powi(n as i32))
    };
    let (reduced, _) = integrate(&reduced_rule, hp)?;
    let (full, _) = integrate(&full_rule, |x| Ok(hp(x)? * normalization(fam, x, budget)?))?;

    let mut trace = 0.0;
    for m in n.. {
        let term = t.weight(m) * (fam.ln_rho(m) - fam.ln_rho(m - n)).exp();
        trace += term;
        if m > n + 1 && term <= budget.rel_tol * trace {
            break;
        }
        if m - n > budget.max_terms {
            return Err(Error::non_convergent("thermal trace", format!("{} terms", budget.max_terms)));
        }
    }
    Ok(OpticalEquivalence {
        n,
        reduced: MomentRow::new(n, reduced, t.weight(n) * fam.rho(n)?),
        trace: MomentRow::new(n, full, trace),
    })
}
