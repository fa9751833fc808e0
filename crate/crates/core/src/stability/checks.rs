//! Sampled and exact checks of points of decay, UGS and the small-gain
//! conditions.

use super::certificate::{Budget, Certificate, Estimate, Property, Verdict, Witness};
use super::trajectory::{iterate_limit, OperatorKind};
use super::IterOptions;
use crate::cone::{sup_dist, sup_norm, PlusVector};
use crate::error::{Error, Result};
use crate::graph::{Direction, InfluenceGraph};
use crate::network::NetworkSpec;
use crate::operators::{check_dim, scaling_probe_grid, GainOperator};
use crate::sampling::{log_grid, Sampler};
use crate::scalar::{ClassTag, ScalarFn};

/// `‖s‖∞` above which a ⊕-MBI limit counts as unbounded.
pub const MBI_BLOWUP: f64 = 1e9;
/// Start level `s₀ = OPLUS_MBI_START·𝟙` of the downward ⊕-MBI iteration.
pub const OPLUS_MBI_START: f64 = 1e10;

/// Relative slack used when deciding `Γ(s) ≥ s` from floating-point data.
const WITNESS_TOL: f64 = 1e-12;

/// `maxᵢ max{0, sᵢ − gᵢ}`: sup-norm distance of `g − s` to the cone.
pub fn cone_distance(s: &[f64], g: &[f64]) -> f64 {
    s.iter().zip(g).map(|(a, b)| (a - b).max(0.0)).fold(0.0, f64::max)
}

fn validate_levels(levels: &[f64]) -> Result<()> {
    if levels.is_empty() || levels.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::Domain("levels must be nonempty, positive and finite".into()));
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("levels must be strictly increasing".into()));
    }
    Ok(())
}

/// Forces `(tₖ, vₖ)` nondecreasing, then strictly increasing, and interpolates
/// from `(0, 0)`. `None` when the first value is not positive.
pub(crate) fn monotone_envelope(levels: &[(f64, f64)]) -> Option<ScalarFn> {
    let mut pts = vec![(0.0, 0.0)];
    let mut prev = 0.0_f64;
    for &(t, v) in levels {
        let mut v = v.max(prev);
        if v <= prev {
            v = if prev == 0.0 { return None } else { prev * (1.0 + 1e-9) };
        }
        pts.push((t, v));
        prev = v;
    }
    ScalarFn::piecewise_linear(pts).ok()
}

/// Exact-pass iff `Γ(s) ≤ s + tol·𝟙`; otherwise falsified at the worst index.
pub fn check_point_of_decay<G: GainOperator>(op: &G, s: &PlusVector, tol: f64) -> Result<Certificate> {
    check_dim(op.dim(), s)?;
    if s.is_zero() {
        return Err(Error::Domain("a point of decay must be nonzero".into()));
    }
    let g = op.apply(s)?;
    let budget = Budget { samples: 1, iterations: 1, tolerance: tol };
    let (worst, excess) = g
        .iter()
        .zip(s.iter())
        .map(|(a, b)| a - b)
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, e)| if e > acc.1 { (i, e) } else { acc });
    let cert = if excess <= tol {
        Certificate::new(Property::PointOfDecay, Verdict::ExactPass)
    } else {
        Certificate::new(Property::PointOfDecay, Verdict::Falsified)
            .with_witness(Witness::Index { s: s.clone(), index: worst })
    };
    Ok(cert.with_budget(budget))
}

/// Samples `‖s₀‖∞ = t` at every level and records `max_k ‖Tᵏ(s₀)‖∞`.
/// Falsified with a divergent start when a trajectory crosses the guard.
pub fn estimate_ugs_phi<G: GainOperator>(
    op: &G,
    kind: &OperatorKind,
    levels: &[f64],
    samples_per_level: usize,
    opts: &IterOptions,
    seed: u64,
) -> Result<Certificate> {
    validate_levels(levels)?;
    kind.validate(op)?;
    let n = op.dim();
    let mut sampler = Sampler::new(seed);
    let mut cur = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut out = Vec::with_capacity(levels.len());
    let mut total_iter = 0;
    let mut unconverged = 0;
    let samples = samples_per_level.max(1);
    for &t in levels {
        let mut worst = 0.0_f64;
        for s0 in sampler.level(n, t, samples) {
            cur.copy_from_slice(s0.as_slice());
            worst = worst.max(s0.sup_norm());
            let mut converged = false;
            for k in 1..=opts.kmax {
                kind.step(op, &cur, &mut next);
                total_iter += 1;
                let norm = sup_norm(&next);
                if !(norm <= opts.guard) {
                    let budget = Budget { samples: out.len() * samples, iterations: total_iter, tolerance: opts.tol };
                    return Ok(Certificate::new(Property::Ugs, Verdict::Falsified)
                        .with_witness(Witness::Divergent { s0, operator: kind.clone(), steps: k, guard: opts.guard })
                        .with_budget(budget)
                        .with_seed(seed));
                }
                worst = worst.max(norm);
                let step = sup_dist(&cur, &next);
                std::mem::swap(&mut cur, &mut next);
                if step <= opts.tol {
                    converged = true;
                    break;
                }
            }
            if !converged {
                unconverged += 1;
            }
        }
        out.push((t, worst));
    }
    let function = monotone_envelope(&out);
    let budget = Budget { samples: levels.len() * samples, iterations: total_iter, tolerance: opts.tol };
    let mut cert = Certificate::new(Property::Ugs, Verdict::NotFalsified)
        .with_estimate(Estimate::Envelope { levels: out, function })
        .with_budget(budget)
        .with_seed(seed);
    if unconverged > 0 {
        cert = cert.with_note(format!("{unconverged} trajectories did not settle within kmax"));
    }
    Ok(cert)
}

fn is_growth_witness(s: &[f64], g: &[f64]) -> bool {
    sup_norm(s) > 0.0 && cone_distance(s, g) <= WITNESS_TOL * (1.0 + sup_norm(s))
}

/// Searches for `s ≠ 0` with `Γ(s) ≥ s` among constant vectors, sampled
/// vectors, their `Γ̂`-limits and a normalized power iteration from `𝟙`.
pub fn check_sgc_sample<G: GainOperator>(op: &G, budget: usize, seed: u64) -> Result<Certificate> {
    if budget == 0 {
        return Err(Error::Domain("budget must be at least 1".into()));
    }
    let n = op.dim();
    let mut levels = log_grid(1e-3, 1e3, 7);
    levels.sort_by(|a, b| a.ln().abs().total_cmp(&b.ln().abs()));
    let per_level = budget.div_ceil(levels.len());
    let opts = IterOptions::default().with_kmax(10_000);
    let mut sampler = Sampler::new(seed);
    let mut g = vec![0.0; n];
    let mut tried = 0;
    let mut found = |s: &[f64], tried: &mut usize| {
        *tried += 1;
        op.apply_into(s, &mut g);
        is_growth_witness(s, &g)
    };
    let falsified = |s: Vec<f64>, tried: usize| {
        Certificate::new(Property::Sgc, Verdict::Falsified)
            .with_witness(Witness::Point { s: PlusVector::from_vec(s) })
            .with_budget(Budget { samples: tried, iterations: 0, tolerance: WITNESS_TOL })
            .with_seed(seed)
    };
    for &t in &levels {
        for s in sampler.level(n, t, per_level) {
            if found(s.as_slice(), &mut tried) {
                return Ok(falsified(s.into_vec(), tried));
            }
            if let Ok((q, _)) = iterate_limit(op, &OperatorKind::GammaHat, s.as_slice(), &opts) {
                if found(&q, &mut tried) {
                    return Ok(falsified(q, tried));
                }
            }
        }
    }
    let mut v = vec![1.0; n];
    let mut h = vec![0.0; n];
    for _ in 0..500 {
        op.apply_into(&v, &mut h);
        let norm = sup_norm(&h);
        if !(norm > 0.0 && norm.is_finite()) {
            break;
        }
        v.iter_mut().zip(&h).for_each(|(a, b)| *a = b / norm);
    }
    if n > 0 && found(&v, &mut tried) {
        return Ok(falsified(v, tried));
    }
    Ok(Certificate::new(Property::Sgc, Verdict::NotFalsified)
        .with_budget(Budget { samples: tried, iterations: 0, tolerance: WITNESS_TOL })
        .with_seed(seed))
}

/// `η̂(t) = min_{‖s‖∞ = t} maxᵢ max{0, sᵢ − Γᵢ(s)}` over samples. Falsified when
/// some nonzero sample has distance zero.
pub fn estimate_uniform_sgc_eta<G: GainOperator>(
    op: &G,
    levels: &[f64],
    samples_per_level: usize,
    seed: u64,
) -> Result<Certificate> {
    validate_levels(levels)?;
    let n = op.dim();
    let samples = samples_per_level.max(1);
    let mut sampler = Sampler::new(seed);
    let mut g = vec![0.0; n];
    let mut out = Vec::with_capacity(levels.len());
    let mut witness = None;
    for &t in levels {
        let mut best = f64::INFINITY;
        for s in sampler.level(n, t, samples) {
            op.apply_into(s.as_slice(), &mut g);
            let d = cone_distance(s.as_slice(), &g);
            if d < best {
                best = d;
                if d <= WITNESS_TOL * (1.0 + t) && witness.is_none() {
                    witness = Some(s);
                }
            }
        }
        out.push((t, best));
    }
    let budget = Budget { samples: levels.len() * samples, iterations: 0, tolerance: WITNESS_TOL };
    let cert = match witness {
        Some(s) => Certificate::new(Property::UniformSgc, Verdict::Falsified).with_witness(Witness::Point { s }),
        None => Certificate::new(Property::UniformSgc, Verdict::NotFalsified),
    };
    let function = monotone_envelope(&out);
    Ok(cert.with_estimate(Estimate::Envelope { levels: out, function }).with_budget(budget).with_seed(seed))
}

/// Largest `s ≤ start·𝟙` with `s ≤ Γ(s) ⊕ b`, by the nonincreasing iteration
/// `s ← s ⊓ (Γ(s) ⊕ b)`. Returns the final state and whether it settled.
fn oplus_mbi_limit<G: GainOperator>(op: &G, b: &[f64], opts: &IterOptions) -> (Vec<f64>, usize, bool) {
    let n = b.len();
    let mut s = vec![OPLUS_MBI_START; n];
    let mut g = vec![0.0; n];
    for k in 1..=opts.kmax {
        op.apply_into(&s, &mut g);
        let mut step = 0.0_f64;
        for i in 0..n {
            let v = s[i].min(g[i].max(b[i]));
            step = step.max(s[i] - v);
            s[i] = v;
        }
        if step <= opts.tol * (1.0 + sup_norm(&s)) {
            return (s, k, true);
        }
    }
    (s, opts.kmax, false)
}

/// Envelope `φ̂(t) = max_{‖b‖∞ = t} ‖s_b‖∞` of the maximal solutions of
/// `s ≤ Γ(s) ⊕ b`; falsified when a limit stays above [`MBI_BLOWUP`].
pub fn estimate_oplus_mbi_phi<G: GainOperator>(
    op: &G,
    levels: &[f64],
    samples_per_level: usize,
    opts: &IterOptions,
    seed: u64,
) -> Result<Certificate> {
    validate_levels(levels)?;
    let n = op.dim();
    let samples = samples_per_level.max(1);
    let mut sampler = Sampler::new(seed);
    let mut out = Vec::with_capacity(levels.len());
    let mut iterations = 0;
    let mut unsettled = 0;
    for &t in levels {
        let mut worst = 0.0_f64;
        for b in sampler.level(n, t, samples) {
            let (s, k, settled) = oplus_mbi_limit(op, b.as_slice(), opts);
            iterations += k;
            let norm = sup_norm(&s);
            if norm > MBI_BLOWUP {
                let budget = Budget { samples: out.len() * samples, iterations, tolerance: opts.tol };
                return Ok(Certificate::new(Property::OplusMbi, Verdict::Falsified)
                    .with_witness(Witness::Pair { s: PlusVector::from_vec(s), b })
                    .with_budget(budget)
                    .with_seed(seed));
            }
            if !settled {
                unsettled += 1;
            }
            worst = worst.max(norm);
        }
        out.push((t, worst));
    }
    let function = monotone_envelope(&out);
    let budget = Budget { samples: levels.len() * samples, iterations, tolerance: opts.tol };
    let mut cert = Certificate::new(Property::OplusMbi, Verdict::NotFalsified)
        .with_estimate(Estimate::Envelope { levels: out, function })
        .with_budget(budget)
        .with_seed(seed);
    if unsettled > 0 {
        cert = cert.with_note(format!("{unsettled} downward iterations stopped at kmax; envelope is an upper estimate"));
    }
    Ok(cert)
}

/// Re-reads a ⊕-MBI pair as an MBI instance: `s − Γ(s) ≤ b` componentwise.
pub fn replay_as_mbi<G: GainOperator>(op: &G, s: &PlusVector, b: &PlusVector) -> Result<bool> {
    check_dim(op.dim(), s)?;
    check_dim(op.dim(), b)?;
    let g = op.apply(s)?;
    let slack = WITNESS_TOL * (1.0 + s.sup_norm());
    Ok(s.iter().zip(g.iter()).zip(b.iter()).all(|((si, gi), bi)| si - gi <= bi + slack))
}

fn check_omega(omega: &ScalarFn) -> Result<()> {
    omega.validate()?;
    if omega.class_tag() != ClassTag::KInfinity {
        return Err(Error::Scaling { t: 0.0, reason: "ω must be of class K∞".into() });
    }
    if let Some(t) = omega.first_point_not_below_identity(&scaling_probe_grid()) {
        return Err(Error::Scaling { t, reason: format!("ω(t) = {} is not below t", omega.eval(t)) });
    }
    Ok(())
}

/// Looks for `(s, i, j)` with `Γ(s) ⊕ ω(sⱼ)eᵢ ≥ s`, which is possible only when
/// `Γ(s)` falls below `s` in at most one component.
fn robust_witness(s: &[f64], g: &[f64], omega: &ScalarFn) -> Option<(usize, usize)> {
    let slack = WITNESS_TOL * (1.0 + sup_norm(s));
    let mut deficit = s.iter().zip(g).enumerate().filter(|(_, (a, b))| **b < **a - slack).map(|(i, _)| i);
    let first = deficit.next();
    if deficit.next().is_some() {
        return None;
    }
    match first {
        None => Some((0, 0)),
        Some(i) => {
            let (j, sj) = s.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |a, (k, v)| if v > a.1 { (k, v) } else { a });
            (omega.eval(sj) >= s[i] - slack).then_some((i, j))
        }
    }
}

/// Sampled search for a violation of the max-robust small-gain condition.
pub fn check_max_robust_sgc(spec: &NetworkSpec, omega: &ScalarFn, budget: usize, seed: u64) -> Result<Certificate> {
    if !spec.is_max_type() {
        return Err(Error::WrongClass("the max-robust SGC check needs max MAFs at every node".into()));
    }
    check_omega(omega)?;
    if budget == 0 {
        return Err(Error::Domain("budget must be at least 1".into()));
    }
    let n = spec.n();
    let levels = log_grid(1e-3, 1e3, 7);
    let per_level = budget.div_ceil(levels.len());
    let opts = IterOptions::default().with_kmax(10_000);
    let mut sampler = Sampler::new(seed);
    let mut g = vec![0.0; n];
    let mut tried = 0;
    let mut check = |s: &[f64], tried: &mut usize| {
        *tried += 1;
        spec.apply_into(s, &mut g);
        robust_witness(s, &g, omega)
    };
    let done = |s: Vec<f64>, (i, j): (usize, usize), tried: usize| {
        Certificate::new(Property::MaxRobustSgc, Verdict::Falsified)
            .with_witness(Witness::Robust { s: PlusVector::from_vec(s), i, j, omega: omega.clone() })
            .with_budget(Budget { samples: tried, iterations: 0, tolerance: WITNESS_TOL })
            .with_seed(seed)
    };
    for &t in &levels {
        for s in sampler.level(n, t, per_level) {
            if let Some(w) = check(s.as_slice(), &mut tried) {
                return Ok(done(s.into_vec(), w, tried));
            }
            if let Ok((q, _)) = iterate_limit(spec, &OperatorKind::GammaHat, s.as_slice(), &opts) {
                if let Some(w) = check(&q, &mut tried) {
                    return Ok(done(q, w, tried));
                }
            }
        }
    }
    Ok(Certificate::new(Property::MaxRobustSgc, Verdict::NotFalsified)
        .with_budget(Budget { samples: tried, iterations: 0, tolerance: WITNESS_TOL })
        .with_seed(seed))
}

/// Decay-index search around every node with `sᵢ ≥ α`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DecayIndex {
    pub alpha: f64,
    pub direction: Direction,
    pub horizon: usize,
    /// One entry per node: `None` when `sᵢ < α`, `Some(None)` when no index
    /// in the influence set decays, `Some(Some(j))` for the smallest such `j`.
    pub witnesses: Vec<Option<Option<usize>>>,
}

impl DecayIndex {
    pub fn all_checked_nodes_witnessed(&self) -> bool {
        self.witnesses.iter().all(|w| !matches!(w, Some(None)))
    }
}

/// For every `i` with `sᵢ ≥ α` (default `‖s‖∞/2`) finds `j ∈ N±ᵢ(horizon)` with
/// `Γⱼ(s) < ω(sⱼ)`.
pub fn check_decay_index(
    spec: &NetworkSpec,
    s: &PlusVector,
    horizon: usize,
    omega: &ScalarFn,
    direction: Direction,
    alpha: Option<f64>,
) -> Result<DecayIndex> {
    check_dim(spec.n(), s)?;
    if s.is_zero() {
        return Err(Error::Domain("decay indices need a nonzero s".into()));
    }
    omega.validate()?;
    let alpha = alpha.unwrap_or(s.sup_norm() / 2.0);
    let graph = InfluenceGraph::new(spec);
    let g = spec.apply(s)?;
    let decays: Vec<bool> = (0..spec.n()).map(|j| g[j] < omega.eval(s[j])).collect();
    let mut witnesses = Vec::with_capacity(spec.n());
    for i in 0..spec.n() {
        if s[i] < alpha {
            witnesses.push(None);
            continue;
        }
        let set = match direction {
            Direction::Backward => graph.backward(i, horizon)?,
            Direction::Forward => graph.forward(i, horizon)?,
        };
        witnesses.push(Some(set.into_iter().find(|&j| decays[j])));
    }
    Ok(DecayIndex { alpha, direction, horizon, witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maf::Maf;
    use crate::network::NetworkBuilder;

    fn pv(v: &[f64]) -> PlusVector {
        PlusVector::new(v.to_vec()).unwrap()
    }

    fn worked() -> NetworkSpec {
        NetworkBuilder::new(2)
            .gain(0, 1, ScalarFn::linear(2.0).unwrap())
            .gain(1, 0, ScalarFn::linear(0.125).unwrap())
            .build()
            .unwrap()
    }

    fn swap(maf: Maf, a: f64) -> NetworkSpec {
        NetworkBuilder::new(2)
            .all_mafs(maf)
            .gain(0, 1, ScalarFn::linear(a).unwrap())
            .gain(1, 0, ScalarFn::linear(a).unwrap())
            .build()
            .unwrap()
    }

    fn zero(n: usize) -> NetworkSpec {
        NetworkBuilder::new(n).build().unwrap()
    }

    #[test]
    fn point_of_decay_examples() {
        let c = check_point_of_decay(&worked(), &pv(&[2.0, 1.0]), 1e-12).unwrap();
        assert_eq!(c.verdict, Verdict::ExactPass);
        let c = check_point_of_decay(&worked(), &pv(&[1.0, 1.0]), 1e-12).unwrap();
        assert_eq!(c.verdict, Verdict::Falsified);
        assert!(matches!(c.witness, Some(Witness::Index { index: 0, .. })));
        assert_eq!(c.replay(&worked()), Some(true));
        assert!(check_point_of_decay(&worked(), &PlusVector::zeros(2), 0.0).is_err());
    }

    #[test]
    fn ugs_envelopes() {
        let levels = [0.5, 1.0, 2.0];
        let c = estimate_ugs_phi(&worked(), &OperatorKind::GammaHat, &levels, 20, &IterOptions::default(), 3).unwrap();
        assert_eq!(c.verdict, Verdict::NotFalsified);
        let Some(Estimate::Envelope { levels: pts, function: Some(phi) }) = &c.estimate else { panic!() };
        for &(t, v) in pts {
            assert!((v - 2.0 * t).abs() < 1e-12, "{t} {v}");
        }
        assert!((phi.eval(1.0) - 2.0).abs() < 1e-6);

        let c = estimate_ugs_phi(&zero(3), &OperatorKind::GammaHat, &levels, 5, &IterOptions::default(), 3).unwrap();
        let Some(Estimate::Envelope { levels: pts, .. }) = &c.estimate else { panic!() };
        assert!(pts.iter().all(|(t, v)| t == v));

        let grow = swap(Maf::Sum, 1.5);
        let c = estimate_ugs_phi(&grow, &OperatorKind::Gamma, &levels, 5, &IterOptions::default(), 3).unwrap();
        assert_eq!(c.verdict, Verdict::Falsified);
        assert_eq!(c.replay(&grow), Some(true));
    }

    #[test]
    fn sgc_examples() {
        let id = swap(Maf::Sum, 1.0);
        let c = check_sgc_sample(&id, 50, 1).unwrap();
        assert_eq!(c.verdict, Verdict::Falsified);
        assert_eq!(c.witness, Some(Witness::Point { s: PlusVector::constant(2, 1.0) }));
        assert_eq!(c.replay(&id), Some(true));
        assert_eq!(check_sgc_sample(&worked(), 200, 1).unwrap().verdict, Verdict::NotFalsified);
        assert_eq!(check_sgc_sample(&zero(4), 200, 1).unwrap().verdict, Verdict::NotFalsified);
    }

    #[test]
    fn uniform_sgc_examples() {
        let c = estimate_uniform_sgc_eta(&swap(Maf::Max, 1.0), &[1.0, 2.0], 10, 1).unwrap();
        assert_eq!(c.verdict, Verdict::Falsified);
        assert_eq!(c.witness, Some(Witness::Point { s: PlusVector::constant(2, 1.0) }));

        let c = estimate_uniform_sgc_eta(&zero(3), &[1.0, 2.0], 10, 1).unwrap();
        let Some(Estimate::Envelope { levels, .. }) = &c.estimate else { panic!() };
        assert_eq!(levels, &vec![(1.0, 1.0), (2.0, 2.0)]);

        let c = estimate_uniform_sgc_eta(&worked(), &[1.0], 50, 1).unwrap();
        let Some(Estimate::Envelope { levels, .. }) = &c.estimate else { panic!() };
        assert!(levels[0].1 <= 0.875);
    }

    #[test]
    fn oplus_mbi_examples() {
        let opts = IterOptions::default();
        let c = estimate_oplus_mbi_phi(&zero(2), &[1.0, 3.0], 10, &opts, 1).unwrap();
        let Some(Estimate::Envelope { levels, .. }) = &c.estimate else { panic!() };
        assert_eq!(levels, &vec![(1.0, 1.0), (3.0, 3.0)]);

        let (s, _, settled) = oplus_mbi_limit(&worked(), &[1.0, 1.0], &opts);
        assert!(settled);
        assert!((s[0] - 2.0).abs() < 1e-8 && (s[1] - 1.0).abs() < 1e-8);
        let c = estimate_oplus_mbi_phi(&worked(), &[1.0], 10, &opts, 1).unwrap();
        let Some(Estimate::Envelope { levels, .. }) = &c.estimate else { panic!() };
        assert!(levels[0].1 >= 2.0 - 1e-8);

        let id = swap(Maf::Sum, 1.0);
        let c = estimate_oplus_mbi_phi(&id, &[1.0], 5, &opts, 1).unwrap();
        assert_eq!(c.verdict, Verdict::Falsified);
        assert_eq!(c.replay(&id), Some(true));
        let Some(Witness::Pair { s, b }) = &c.witness else { panic!() };
        assert!(replay_as_mbi(&id, s, b).unwrap());
    }

    #[test]
    fn max_robust_examples() {
        let half = ScalarFn::linear(0.5).unwrap();
        let id = swap(Maf::Max, 1.0);
        let c = check_max_robust_sgc(&id, &half, 20, 1).unwrap();
        assert_eq!(c.verdict, Verdict::Falsified);
        assert_eq!(c.replay(&id), Some(true));
        assert_eq!(check_max_robust_sgc(&swap(Maf::Max, 0.5), &half, 500, 1).unwrap().verdict, Verdict::NotFalsified);
        let zero_max = NetworkBuilder::new(2).all_mafs(Maf::Max).build().unwrap();
        assert_eq!(check_max_robust_sgc(&zero_max, &half, 500, 1).unwrap().verdict, Verdict::NotFalsified);
        assert!(matches!(check_max_robust_sgc(&worked(), &half, 5, 1), Err(Error::WrongClass(_))));
        assert!(check_max_robust_sgc(&id, &ScalarFn::linear(2.0).unwrap(), 5, 1).is_err());
    }

    #[test]
    fn decay_index_examples() {
        let id = ScalarFn::identity();
        let d = check_decay_index(&worked(), &pv(&[2.0, 1.0]), 2, &id, Direction::Backward, None).unwrap();
        assert_eq!(d.witnesses[0], Some(Some(1)));
        let d = check_decay_index(&swap(Maf::Sum, 1.0), &pv(&[1.0, 1.0]), 5, &id, Direction::Forward, None).unwrap();
        assert_eq!(d.witnesses, vec![Some(None), Some(None)]);
        let d = check_decay_index(&zero(3), &pv(&[1.0, 2.0, 3.0]), 3, &id, Direction::Backward, Some(0.0)).unwrap();
        assert_eq!(d.witnesses, vec![Some(Some(0)), Some(Some(1)), Some(Some(2))]);
    }

    #[test]
    fn envelope_is_strictly_increasing() {
        let f = monotone_envelope(&[(1.0, 2.0), (2.0, 1.5), (3.0, 5.0)]).unwrap();
        assert!(f.eval(2.0) > f.eval(1.0));
        assert!(monotone_envelope(&[(1.0, 0.0)]).is_none());
    }
}
