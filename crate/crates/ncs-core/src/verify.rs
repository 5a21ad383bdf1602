//! Named verification suites over the identities the library implements.
//!
//! Each check compares a computed value with an independent expectation
//! (closed form, structure function, or a different code path) and records
//! the relative error against its tolerance. Numerical breakdown aborts the
//! suite with an error instead of producing a failed record.

use crate::error::{Error, Result};
use crate::hyper::{HypergeometricModel, SeriesBudget};
use crate::meijer::{moment_check, ContourSpec, WeightForm};
use crate::quadrature::RadialQuadrature;
use crate::states::{identity_resolution_check, Flavor, StateFamily};
use crate::thermal::{husimi_function, husimi_q, p_function, p_moment_condition_check, p_quasi, p_quasi_weight_ratio, ThermalParams};
use crate::transform::{
    gaussian_integral_check, mehta_formula_check, optical_equivalence_check, RadialFunction, Transformer,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use std::time::Instant;

pub const SUITES: [&str; 5] = ["canonical", "pho-bg", "pho-kp", "moments", "all"];

/// Grid shared by the round-trip checks.
pub const ROUND_TRIP_GRID: [f64; 6] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];

/// Tolerance for checks whose weights are known in closed form.
pub const REGISTRY_TOL: f64 = 1e-8;
/// Tolerance for checks that go through contour-evaluated weights.
pub const CONTOUR_TOL: f64 = 1e-5;
const CONTOUR_MOMENT_TOL: f64 = 1e-6;
const MEHTA_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// Which identity the check exercises.
    pub tag: String,
    pub computed: f64,
    pub expected: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    pub quad: RadialQuadrature,
    pub contour: ContourSpec,
    pub budget: SeriesBudget,
    /// Replaces every per-check tolerance when set.
    pub tolerance: Option<f64>,
}

struct Recorder<'a> {
    opts: &'a VerifyOptions,
    checks: Vec<CheckRecord>,
}

impl Recorder<'_> {
    fn record(&mut self, id: String, tag: &str, computed: f64, expected: f64, tol: f64) {
        let rel_err = if expected == 0.0 {
            computed.abs()
        } else {
            (computed - expected).abs() / expected.abs()
        };
        self.record_err(id, tag, computed, expected, rel_err, tol);
    }

    fn record_err(&mut self, id: String, tag: &str, computed: f64, expected: f64, rel_err: f64, tol: f64) {
        let tolerance = self.opts.tolerance.unwrap_or(tol);
        self.checks.push(CheckRecord {
            id,
            tag: tag.to_string(),
            computed,
            expected,
            rel_err,
            tolerance,
            pass: rel_err <= tolerance,
        });
    }
}

pub fn run_suite(suite: &str, opts: &VerifyOptions) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut rec = Recorder { opts, checks: Vec::new() };
    match suite {
        "canonical" => canonical(&mut rec)?,
        "pho-bg" => pho_bg(&mut rec)?,
        "pho-kp" => pho_kp(&mut rec)?,
        "moments" => moments(&mut rec)?,
        "all" => {
            canonical(&mut rec)?;
            pho_bg(&mut rec)?;
            pho_kp(&mut rec)?;
            moments(&mut rec)?;
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown suite `{other}` (expected one of {})",
                SUITES.join(", ")
            )))
        }
    }
    let pass = rec.checks.iter().all(|c| c.pass);
    Ok(VerificationReport {
        suite: suite.to_string(),
        checks: rec.checks,
        pass,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

fn pho(k: f64, flavor: Flavor) -> Result<StateFamily> {
    StateFamily::new(HypergeometricModel::from_preset(&format!("pho:{k}"))?, flavor)
}

/// P → Q by the transform, Q → P by the inverse, and Q → P → Q.
fn round_trips(rec: &mut Recorder, label: &str, fam: &StateFamily, nbars: &[f64], tol: f64) -> Result<()> {
    let o = rec.opts;
    let engine = Arc::new(Transformer::new(fam, &o.quad, &o.contour, &o.budget)?);
    for &nbar in nbars {
        let t = ThermalParams::new(nbar, 0.5)?;
        let p = p_function(fam, &t, &o.contour, &o.budget);
        let q = husimi_function(fam, &t, &o.budget);
        let inner = engine.clone();
        let q2 = q.clone();
        let p_rebuilt = RadialFunction::from_fn(move |x| inner.gft_inverse(&q2, x))
            .with_decay(fam.weight().scale() / nbar);
        for x in ROUND_TRIP_GRID {
            let q_exact = husimi_q(fam, &t, x, &o.budget)?;
            let p_exact = p_quasi(fam, &t, x, &o.contour, &o.budget)?;
            rec.record(
                format!("{label}/p-to-q/nbar={nbar}/x={x}"),
                "generalized-fourier",
                engine.gft(&p, x)?,
                q_exact,
                tol,
            );
            rec.record(
                format!("{label}/q-to-p/nbar={nbar}/x={x}"),
                "generalized-fourier-inverse",
                engine.gft_inverse(&q, x)?,
                p_exact,
                tol,
            );
            rec.record(
                format!("{label}/q-to-p-to-q/nbar={nbar}/x={x}"),
                "generalized-fourier-pair",
                engine.gft(&p_rebuilt, x)?,
                q_exact,
                tol,
            );
        }
    }
    Ok(())
}

fn identity_fixed_point(rec: &mut Recorder, label: &str, fam: &StateFamily) -> Result<()> {
    let o = rec.opts;
    let engine = Transformer::new(fam, &o.quad, &o.contour, &o.budget)?;
    let one = RadialFunction::constant(1.0);
    for x in ROUND_TRIP_GRID {
        rec.record(format!("{label}/identity/x={x}"), "resolution-of-identity", engine.gft(&one, x)?, 1.0, 1e-10);
    }
    Ok(())
}

fn optical(rec: &mut Recorder, label: &str, fam: &StateFamily, nbar: f64) -> Result<()> {
    let o = rec.opts;
    let t = ThermalParams::new(nbar, 0.5)?;
    for n in 0..=10 {
        let e = optical_equivalence_check(fam, &t, n, &o.quad, &o.contour, &o.budget)?;
        rec.record(
            format!("{label}/optical-reduced/nbar={nbar}/n={n}"),
            "optical-equivalence",
            e.reduced.computed,
            e.reduced.expected,
            REGISTRY_TOL,
        );
        rec.record(
            format!("{label}/optical-trace/nbar={nbar}/n={n}"),
            "optical-equivalence-trace",
            e.trace.computed,
            e.trace.expected,
            REGISTRY_TOL,
        );
    }
    Ok(())
}

fn canonical(rec: &mut Recorder) -> Result<()> {
    let fam = StateFamily::canonical();
    round_trips(rec, "canonical", &fam, &[0.5, 1.0, 2.0], REGISTRY_TOL)?;
    identity_fixed_point(rec, "canonical", &fam)?;
    for nbar in [0.5, 1.0, 2.0] {
        let t = ThermalParams::new(nbar, 0.5)?;
        for z in [0.0, 1.0, 4.0] {
            let c = mehta_formula_check(&t, z, &rec.opts.quad)?;
            rec.record(format!("canonical/mehta/nbar={nbar}/z2={z}"), "mehta-2d", c.computed, c.expected, MEHTA_TOL);
        }
    }
    let sigma = Complex64::new(0.7, -0.4);
    for a in [0.5, 1.0, 2.0] {
        for m in 0..=4 {
            let c = gaussian_integral_check(a, sigma, m)?;
            // complex values are reported by modulus, the error is |Δ|/|expected|
            rec.record_err(
                format!("canonical/gaussian/a={a}/m={m}"),
                "gaussian-integral",
                c.computed.norm(),
                c.expected.norm(),
                c.rel_err,
                REGISTRY_TOL,
            );
        }
    }
    optical(rec, "canonical", &fam, 1.0)
}

fn pho_bg(rec: &mut Recorder) -> Result<()> {
    let o = *rec.opts;
    for k in [0.5, 1.0, 2.5] {
        let fam = pho(k, Flavor::Bg)?;
        let label = format!("pho-bg/k={k}");
        round_trips(rec, &label, &fam, &[0.5, 2.0], REGISTRY_TOL)?;
        identity_fixed_point(rec, &label, &fam)?;
        let t = ThermalParams::new(1.0, 0.5)?;
        for x in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
            rec.record(
                format!("{label}/p-weight-ratio/x={x}"),
                "p-closed-form",
                p_quasi_weight_ratio(&fam, &t, x, &o.contour, &o.budget)?,
                p_quasi(&fam, &t, x, &o.contour, &o.budget)?,
                1e-10,
            );
        }
        optical(rec, &label, &fam, 0.5)?;
    }
    Ok(())
}

fn pho_kp(rec: &mut Recorder) -> Result<()> {
    for k in [1.0, 2.5] {
        let fam = pho(k, Flavor::Kp)?;
        let label = format!("pho-kp/k={k}");
        round_trips(rec, &label, &fam, &[0.5, 2.0], CONTOUR_TOL)?;
        identity_fixed_point(rec, &label, &fam)?;
    }
    Ok(())
}

fn moments(rec: &mut Recorder) -> Result<()> {
    let o = *rec.opts;
    let families = [
        ("canonical".to_string(), StateFamily::canonical()),
        ("pho-bg/k=1".to_string(), pho(1.0, Flavor::Bg)?),
        ("pho-bg/k=2.5".to_string(), pho(2.5, Flavor::Bg)?),
        ("pho-kp/k=1".to_string(), pho(1.0, Flavor::Kp)?),
        ("pho-kp/k=2.5".to_string(), pho(2.5, Flavor::Kp)?),
    ];
    for (label, fam) in &families {
        let w = fam.weight();
        let tol = if w.form() == WeightForm::Contour { CONTOUR_MOMENT_TOL } else { REGISTRY_TOL };
        for r in moment_check(&w, 10, &o.quad, &o.contour, &o.budget)? {
            rec.record(format!("{label}/mellin-moment/n={}", r.n), "weight-moments", r.computed, r.expected, tol);
        }
        for r in identity_resolution_check(fam, 10, &o.quad, &o.contour, &o.budget)? {
            rec.record(format!("{label}/resolution/n={}", r.n), "resolution-of-identity", r.computed, r.expected, tol);
        }
        let t = ThermalParams::new(1.0, 0.5)?;
        for r in p_moment_condition_check(fam, &t, 10, &o.quad, &o.contour, &o.budget)? {
            rec.record(format!("{label}/p-moment/n={}", r.n), "p-moment-condition", r.computed, r.expected, tol);
        }
    }
    Ok(())
}
