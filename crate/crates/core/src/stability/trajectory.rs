use serde::{Deserialize, Serialize};

use super::IterOptions;
use crate::cone::{sup_dist, sup_norm, PlusVector};
use crate::error::{Error, Result};
use crate::operators::{check_dim, check_level, gamma_hat_into, gamma_r_into, GainOperator, Scaled, ScalingMode};
use crate::scalar::ScalarFn;

/// Which map drives `s(k+1) = T(s(k))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OperatorKind {
    Gamma,
    GammaHat,
    GammaR { r: f64 },
    Scaled { f: ScalarFn, mode: ScalingMode },
}

impl OperatorKind {
    pub fn validate<G: GainOperator>(&self, op: &G) -> Result<()> {
        match self {
            OperatorKind::GammaR { r } => check_level(*r),
            OperatorKind::Scaled { f, mode } => Scaled::new(op, f.clone(), *mode).map(|_| ()),
            _ => Ok(()),
        }
    }

    #[inline]
    pub(crate) fn step<G: GainOperator + ?Sized>(&self, op: &G, s: &[f64], out: &mut [f64]) {
        match self {
            OperatorKind::Gamma => op.apply_into(s, out),
            OperatorKind::GammaHat => gamma_hat_into(op, s, out),
            OperatorKind::GammaR { r } => gamma_r_into(op, *r, s, out),
            OperatorKind::Scaled { f, mode } => {
                op.apply_into(s, out);
                match mode {
                    ScalingMode::PreInverse => {
                        out.iter_mut().for_each(|o| *o = f.inverse(*o).unwrap_or(f64::INFINITY))
                    }
                    ScalingMode::PostCompose => out.iter_mut().for_each(|o| *o += f.eval(*o)),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Converged,
    MaxIterations,
    Overflow,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub kind: OperatorKind,
    /// `states[0] = s0`, `states[k+1] = T(states[k])`.
    pub states: Vec<PlusVector>,
    pub converged: bool,
    pub limit: Option<PlusVector>,
    pub iterations: usize,
    pub outcome: Outcome,
}

/// Iterates `T` from `s0` until the step drops to `tol`, `kmax` steps pass or
/// the state crosses the divergence guard. Overflow ends the trajectory with
/// [`Outcome::Overflow`] rather than an error so the states stay inspectable.
pub fn simulate<G: GainOperator>(
    op: &G,
    kind: &OperatorKind,
    s0: &PlusVector,
    opts: &IterOptions,
) -> Result<Trajectory> {
    check_dim(op.dim(), s0)?;
    kind.validate(op)?;
    if opts.kmax == 0 || !(opts.tol >= 0.0) {
        return Err(Error::Domain("simulate needs kmax >= 1 and tol >= 0".into()));
    }
    let mut states = vec![s0.clone()];
    let mut cur = s0.as_slice().to_vec();
    let mut next = vec![0.0; cur.len()];
    let mut outcome = Outcome::MaxIterations;
    let mut iterations = 0;
    for k in 1..=opts.kmax {
        kind.step(op, &cur, &mut next);
        iterations = k;
        let norm = sup_norm(&next);
        if !(norm <= opts.guard) {
            // keep the offending state only if it is still a valid cone element
            if next.iter().all(|v| v.is_finite()) {
                states.push(PlusVector::from_vec(next.clone()));
            }
            outcome = Outcome::Overflow;
            break;
        }
        let step = sup_dist(&cur, &next);
        states.push(PlusVector::from_vec(next.clone()));
        std::mem::swap(&mut cur, &mut next);
        if step <= opts.tol {
            outcome = Outcome::Converged;
            break;
        }
    }
    let converged = outcome == Outcome::Converged;
    let limit = converged.then(|| states.last().cloned()).flatten();
    Ok(Trajectory { kind: kind.clone(), states, converged, limit, iterations, outcome })
}

/// Same iteration as [`simulate`] without storing states. Returns the limit and
/// the number of steps; overflow and non-convergence are errors.
pub fn iterate_limit<G: GainOperator + ?Sized>(
    op: &G,
    kind: &OperatorKind,
    s0: &[f64],
    opts: &IterOptions,
) -> Result<(Vec<f64>, usize)> {
    let mut cur = s0.to_vec();
    let mut next = vec![0.0; cur.len()];
    let mut last_step = f64::INFINITY;
    for k in 1..=opts.kmax {
        kind.step(op, &cur, &mut next);
        let norm = sup_norm(&next);
        if !(norm <= opts.guard) {
            return Err(Error::Overflow { iterations: k, norm });
        }
        last_step = sup_dist(&cur, &next);
        std::mem::swap(&mut cur, &mut next);
        if last_step <= opts.tol {
            return Ok((cur, k));
        }
    }
    Err(Error::NonConvergence { iterations: opts.kmax, last_step })
}

/// `Q̂(s)`: limit of the non-decreasing `Γ̂`-trajectory from `s`, a point of
/// decay above `s`. With `phi`, also enforces `‖Q̂(s)‖∞ ≤ φ(‖s‖∞)`.
pub fn compute_qhat<G: GainOperator>(
    op: &G,
    s: &PlusVector,
    opts: &IterOptions,
    phi: Option<&ScalarFn>,
) -> Result<PlusVector> {
    check_dim(op.dim(), s)?;
    let (limit, _) = iterate_limit(op, &OperatorKind::GammaHat, s.as_slice(), opts)?;
    let limit = PlusVector::from_vec(limit);
    if let Some(phi) = phi {
        let bound = phi.eval(s.sup_norm());
        let norm = limit.sup_norm();
        if norm > bound + opts.tol {
            return Err(Error::Domain(format!(
                "Q̂(s) has norm {norm} above the supplied bound φ(‖s‖) = {bound}"
            )));
        }
    }
    Ok(limit)
}
