//! Exact routes for linear and homogeneous operators: spectral radius by
//! power iteration with Collatz–Wielandt bounds, finite witnesses of
//! `inf ‖Γⁿ(𝟙)‖∞ < 1`, and MBI through UGES of the scaled operator.

use serde::Serialize;

use super::certificate::{Budget, Certificate, Estimate, Property, Verdict, Witness};
use super::trajectory::OperatorKind;
use crate::cone::{sup_norm, PlusVector};
use crate::error::{Error, Result};
use crate::network::NetworkSpec;
use crate::operators::{GainOperator, Scaled, ScalingMode};
use crate::scalar::ScalarFn;

/// Distance below 1 the spectral radius must keep for an exact pass.
pub const UGES_MARGIN: f64 = 1e-9;

const POWER_TOL: f64 = 1e-12;
const POWER_MAX_ITER: usize = 2_000_000;
const HOMOGENEOUS_GUARD: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralEstimate {
    /// Midpoint of the bracket when it closed, otherwise the upper bound.
    pub value: f64,
    /// Rigorous bracket `lower ≤ r(Γ) ≤ upper` from the last iterate.
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Last positive iterate, normalized to `‖v‖∞ = 1`.
    pub vector: Vec<f64>,
}

/// Power iteration on `Γ + id` from `𝟙`. For a nonnegative matrix `A` and
/// positive `v`, `minᵢ (Av)ᵢ/vᵢ ≤ r(A) ≤ maxᵢ (Av)ᵢ/vᵢ`; the shift keeps the
/// iteration aperiodic and the iterate positive. The operator must be linear.
pub fn spectral_radius<G: GainOperator>(op: &G) -> SpectralEstimate {
    let n = op.dim();
    if n == 0 {
        return SpectralEstimate { value: 0.0, lower: 0.0, upper: 0.0, iterations: 0, converged: true, vector: vec![] };
    }
    let mut v = vec![1.0; n];
    let mut w = vec![0.0; n];
    let (mut lower, mut upper) = (0.0, f64::INFINITY);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < POWER_MAX_ITER {
        iterations += 1;
        op.apply_into(&v, &mut w);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        for (wi, vi) in w.iter_mut().zip(&v) {
            let ratio = *wi / vi;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            *wi += vi;
        }
        lower = f64::max(lower, lo);
        upper = f64::min(upper, hi);
        let norm = sup_norm(&w);
        if !(norm > 0.0 && norm.is_finite()) || w.iter().any(|x| *x <= 0.0) {
            break;
        }
        v.iter_mut().zip(&w).for_each(|(a, b)| *a = b / norm);
        if upper - lower <= POWER_TOL {
            converged = true;
            break;
        }
    }
    let value = if converged { 0.5 * (lower + upper) } else { upper };
    SpectralEstimate { value, lower, upper, iterations, converged, vector: v }
}

fn uges_certificate<G: GainOperator>(op: &G) -> Certificate {
    let n = op.dim();
    let est = spectral_radius(op);
    let budget = Budget { samples: 0, iterations: est.iterations, tolerance: POWER_TOL };
    if est.upper < 1.0 - UGES_MARGIN {
        let gamma = est.value + UGES_MARGIN;
        let mut cur = vec![1.0; n];
        let mut next = vec![0.0; n];
        let mut m = 1.0_f64;
        for k in 1..=2 * n {
            op.apply_into(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
            m = m.max(sup_norm(&cur) / gamma.powi(k as i32));
        }
        Certificate::new(Property::Uges, Verdict::ExactPass)
            .with_estimate(Estimate::Uges { spectral_radius: est.value, m, gamma })
            .with_budget(budget)
    } else if est.lower >= 1.0 - UGES_MARGIN {
        Certificate::new(Property::Uges, Verdict::Falsified)
            .with_witness(Witness::Perron { v: PlusVector::from_vec(est.vector), threshold: 1.0 - UGES_MARGIN })
            .with_estimate(Estimate::SpectralRadius { value: est.value, lower: est.lower, upper: est.upper })
            .with_budget(budget)
    } else {
        Certificate::new(Property::Uges, Verdict::Inconclusive)
            .with_estimate(Estimate::SpectralRadius { value: est.value, lower: est.lower, upper: est.upper })
            .with_budget(budget)
            .with_note("spectral radius bracket straddles 1")
    }
}

/// Exact UGES decision for a nonnegative matrix operator: pass iff
/// `r(Γ) < 1 − 1e-9`, with `(M, γ)` where `γ = r(Γ) + 1e-9` and
/// `M = max_{k ≤ 2n} ‖Γᵏ(𝟙)‖∞ / γᵏ`.
pub fn certify_uges_linear(spec: &NetworkSpec) -> Result<Certificate> {
    if !spec.is_linear_operator() {
        return Err(Error::WrongClass("UGES by spectral radius needs linear gains with sum or weighted-sum MAFs".into()));
    }
    Ok(uges_certificate(spec))
}

fn homogeneous_certificate<G: GainOperator>(op: &G, nmax: usize) -> Certificate {
    let n = op.dim();
    let mut cur = vec![1.0; n];
    let mut next = vec![0.0; n];
    let mut best = (0, f64::INFINITY);
    for k in 1..=nmax {
        op.apply_into(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
        let norm = sup_norm(&cur);
        let budget = Budget { samples: 1, iterations: k, tolerance: 0.0 };
        if norm < 1.0 {
            return Certificate::new(Property::Uges, Verdict::ExactPass)
                .with_estimate(Estimate::FiniteWitness { k, norm })
                .with_budget(budget);
        }
        if !(norm <= HOMOGENEOUS_GUARD) {
            return Certificate::new(Property::Uges, Verdict::Falsified)
                .with_witness(Witness::Divergent {
                    s0: PlusVector::constant(n, 1.0),
                    operator: OperatorKind::Gamma,
                    steps: k,
                    guard: HOMOGENEOUS_GUARD,
                })
                .with_budget(budget);
        }
        if norm < best.1 {
            best = (k, norm);
        }
    }
    Certificate::new(Property::Uges, Verdict::Inconclusive)
        .with_estimate(Estimate::FiniteWitness { k: best.0, norm: best.1 })
        .with_budget(Budget { samples: 1, iterations: nmax, tolerance: 0.0 })
        .with_note(format!("‖Γᵏ(𝟙)‖∞ ≥ 1 for every k ≤ {nmax}"))
}

/// Finite-witness check of `inf_k ‖Γᵏ(𝟙)‖∞ < 1` for homogeneous subadditive
/// operators (linear gains with any of the supported MAFs).
pub fn certify_homogeneous(spec: &NetworkSpec, nmax: usize) -> Result<Certificate> {
    if !spec.is_subadditive_homogeneous() {
        return Err(Error::WrongClass("the finite-witness route needs linear gains".into()));
    }
    if nmax == 0 {
        return Err(Error::Domain("nmax must be at least 1".into()));
    }
    Ok(homogeneous_certificate(spec, nmax))
}

/// MBI through UGES of `ω⁻¹ ∘ Γ` for linear `ω < id` (default `(1 − 1e-3)·id`).
/// The scaled operator is certified directly; a pass is recorded as
/// implied-by-theorem, anything else as inconclusive.
pub fn certify_mbi_via_uges(spec: &NetworkSpec, omega: Option<&ScalarFn>) -> Result<Certificate> {
    let omega = match omega {
        Some(w) => w.clone(),
        None => ScalarFn::linear(1.0 - 1e-3)?,
    };
    if !omega.is_linear() {
        return Err(Error::WrongClass("the UGES route to MBI needs a linear ω".into()));
    }
    if !spec.is_subadditive_homogeneous() {
        return Err(Error::WrongClass("the UGES route to MBI needs linear gains".into()));
    }
    let scaled = Scaled::new(spec, omega.clone(), ScalingMode::PreInverse)?;
    let inner = if spec.is_linear_operator() {
        uges_certificate(&scaled)
    } else {
        homogeneous_certificate(&scaled, 64 * spec.n().max(1))
    };
    let verdict = if inner.verdict == Verdict::ExactPass { Verdict::ImpliedByTheorem } else { Verdict::Inconclusive };
    let mut cert = Certificate::new(Property::Mbi, verdict).with_budget(inner.budget);
    if let Some(e) = inner.estimate {
        cert = cert.with_estimate(e);
    }
    Ok(cert.with_note(format!("UGES of ω⁻¹∘Γ with ω = {omega}: {:?}", inner.verdict)))
}
