//! Side conditions for single-valued paths: MAF lower bound `l`, lower
//! Lipschitz constant `c` of the gains and order contraction of `Γᵏ`.

use serde::Serialize;

use crate::cone::{sup_dist, sup_norm, PlusVector};
use crate::error::{Error, Result};
use crate::maf::Maf;
use crate::network::NetworkSpec;
use crate::operators::GainOperator;
use crate::sampling::Sampler;
use crate::stability::{Budget, Certificate, Estimate, Property, Verdict, Witness, UGES_MARGIN};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MafLowerBound {
    /// Exact `l` with `μᵢ(s²) − μᵢ(s¹) ≥ l(s²ⱼ − s¹ⱼ)` on `[R₁𝟙, R₂𝟙]`, minimized over nodes.
    pub l: f64,
    /// Smallest sampled difference quotient.
    pub sampled: f64,
    /// Sampled quotients never fell below `l`.
    pub confirmed: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideConditions {
    pub maf: MafLowerBound,
    /// Lower Lipschitz constant of all gains on `[a, b]`.
    pub gain_c: f64,
    pub contraction: Certificate,
}

impl SideConditions {
    pub fn compute(spec: &NetworkSpec, r1: f64, r2: f64, k: usize, samples: usize, seed: u64) -> Result<Self> {
        Ok(SideConditions {
            maf: check_maf_lower_bound(spec, r1, r2, samples, seed)?,
            gain_c: check_gain_lower_lipschitz(spec, r1, r2)?,
            contraction: check_order_contraction(spec, k, r1, r2, samples, seed)?,
        })
    }
}

fn check_range(r1: f64, r2: f64) -> Result<()> {
    if !(r1 > 0.0 && r1 < r2 && r2.is_finite()) {
        return Err(Error::Domain(format!("need 0 < R1 < R2, got [{r1}, {r2}]")));
    }
    Ok(())
}

fn exact_l(maf: &Maf, m: usize, r1: f64, r2: f64) -> f64 {
    match maf {
        Maf::Max => 0.0,
        Maf::Sum => 1.0,
        Maf::WeightedSum { weights } => weights.iter().copied().fold(f64::INFINITY, f64::min),
        Maf::PSum { p } => {
            // ∂μ/∂vⱼ = (vⱼ/μ)^(p−1) is smallest at vⱼ = R₁ with every other entry at R₂
            let mu = (r1.powf(*p) + (m as f64 - 1.0) * r2.powf(*p)).powf(1.0 / p);
            (r1 / mu).powf(p - 1.0)
        }
    }
}

/// Exact MAF lower bound on `[R₁𝟙, R₂𝟙]`, confirmed on sampled ordered pairs
/// that differ in a single coordinate.
pub fn check_maf_lower_bound(spec: &NetworkSpec, r1: f64, r2: f64, samples: usize, seed: u64) -> Result<MafLowerBound> {
    check_range(r1, r2)?;
    let mut sampler = Sampler::new(seed);
    let mut l = f64::INFINITY;
    let mut sampled = f64::INFINITY;
    for i in 0..spec.n() {
        let m = spec.neighbors(i).len();
        if m == 0 {
            continue;
        }
        let maf = spec.maf(i);
        l = l.min(exact_l(maf, m, r1, r2));
        for _ in 0..samples {
            let lower = sampler.in_box(m, r1, r2);
            let j = sampler.index(m);
            let mut upper = lower.clone();
            upper[j] = lower[j] + (r2 - lower[j]) * sampler.unit();
            let d = upper[j] - lower[j];
            if d <= 1e-9 * r2 {
                continue;
            }
            sampled = sampled.min((maf.eval(&upper) - maf.eval(&lower)) / d);
        }
    }
    if !l.is_finite() {
        l = 0.0;
    }
    let confirmed = !sampled.is_finite() || sampled >= l - 1e-9 * (1.0 + l);
    let note = spec
        .is_max_type()
        .then(|| "the MAF lower-bound assumption is not necessarily satisfied for max-type operators".to_string());
    Ok(MafLowerBound { l, sampled, confirmed, note })
}

/// `c = min_{(i,j)} min_{t ∈ [a,b]} γᵢⱼ'(t)`, exact for every gain kind;
/// infinite when the spec has no gains.
pub fn check_gain_lower_lipschitz(spec: &NetworkSpec, a: f64, b: f64) -> Result<f64> {
    check_range(a, b)?;
    Ok(spec.all_gains().map(|(_, _, g)| g.min_slope_on(a, b)).fold(f64::INFINITY, f64::min))
}

fn power(spec: &NetworkSpec, s: &[f64], k: usize) -> Vec<f64> {
    let mut cur = s.to_vec();
    let mut next = vec![0.0; s.len()];
    for _ in 0..k {
        spec.apply_into(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

/// `K = sup ‖Γᵏ(s²) − Γᵏ(s¹)‖∞ / ‖s² − s¹‖∞` over `R₁𝟙 ≤ s¹ ≤ s² ≤ R₂𝟙`;
/// pass iff `K < 1 − 1e-9`. Exact (`K = ‖Γᵏ(𝟙)‖∞`) for linear operators,
/// sampled otherwise.
pub fn check_order_contraction(
    spec: &NetworkSpec,
    k: usize,
    r1: f64,
    r2: f64,
    samples: usize,
    seed: u64,
) -> Result<Certificate> {
    check_range(r1, r2)?;
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let n = spec.n();
    let threshold = 1.0 - UGES_MARGIN;
    if spec.is_linear_operator() {
        let constant = sup_norm(&power(spec, &vec![1.0; n], k));
        let budget = Budget { samples: 0, iterations: k, tolerance: 0.0 };
        let cert = if constant < threshold {
            Certificate::new(Property::OrderContraction, Verdict::ExactPass)
        } else {
            Certificate::new(Property::OrderContraction, Verdict::Falsified).with_witness(Witness::OrderedPair {
                lower: PlusVector::constant(n, r1),
                upper: PlusVector::constant(n, r2),
                k,
            })
        };
        return Ok(cert.with_estimate(Estimate::Contraction { k, constant, exact: true }).with_budget(budget));
    }
    let mut sampler = Sampler::new(seed);
    let mut best = (0.0_f64, None);
    for idx in 0..samples.max(1) {
        let a = sampler.in_box(n, r1, r2);
        let b: Vec<f64> = if idx % 2 == 0 {
            sampler.in_box(n, r1, r2)
        } else {
            // small perturbations probe the local derivative
            let h = 1e-4 * (r2 - r1);
            a.iter().map(|&x| (x + h * sampler.unit()).min(r2)).collect()
        };
        let lower: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.min(*y)).collect();
        let upper: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect();
        let den = sup_dist(&lower, &upper);
        if den <= 0.0 {
            continue;
        }
        let ratio = sup_dist(&power(spec, &lower, k), &power(spec, &upper, k)) / den;
        if ratio > best.0 {
            best = (ratio, Some((lower, upper)));
        }
    }
    let constant = best.0;
    let budget = Budget { samples: samples.max(1), iterations: k, tolerance: 0.0 };
    let cert = match best.1 {
        Some((lower, upper)) if constant >= threshold => Certificate::new(Property::OrderContraction, Verdict::Falsified)
            .with_witness(Witness::OrderedPair { lower: PlusVector::from_vec(lower), upper: PlusVector::from_vec(upper), k }),
        _ => Certificate::new(Property::OrderContraction, Verdict::NotFalsified),
    };
    Ok(cert.with_estimate(Estimate::Contraction { k, constant, exact: false }).with_budget(budget).with_seed(seed))
}
