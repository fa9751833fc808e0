//! Gain operator evaluations: `Γ`, the augmented operator `Γ̂ = id ⊕ Γ`, the
//! projection `Pᵣ = r𝟙 ⊕ ·`, `Γᵣ = Pᵣ ∘ Γ` and scaled variants.
//!
//! Everything downstream (trajectories, certificates, paths) is written
//! against [`GainOperator`], so a scaled operator can stand in for `Γ`.

use serde::{Deserialize, Serialize};

use crate::cone::PlusVector;
use crate::error::{Error, Result};
use crate::network::NetworkSpec;
use crate::scalar::ScalarFn;

/// A monotone operator on the positive cone of a finite truncation.
pub trait GainOperator: Sync {
    fn dim(&self) -> usize;

    /// Writes `Γ(s)` into `out`. Both slices have length [`GainOperator::dim`].
    fn apply_into(&self, s: &[f64], out: &mut [f64]);

    fn apply(&self, s: &PlusVector) -> Result<PlusVector> {
        check_dim(self.dim(), s)?;
        let mut out = vec![0.0; self.dim()];
        self.apply_into(s.as_slice(), &mut out);
        Ok(PlusVector::from_vec(out))
    }
}

impl<G: GainOperator + ?Sized> GainOperator for &G {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply_into(&self, s: &[f64], out: &mut [f64]) {
        (**self).apply_into(s, out)
    }
}

impl GainOperator for NetworkSpec {
    fn dim(&self) -> usize {
        self.n()
    }

    #[inline]
    fn apply_into(&self, s: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.maf(i).eval_iter(self.edges(i).map(|(j, g)| g.eval(s[j])));
        }
    }
}

pub(crate) fn check_dim(n: usize, s: &PlusVector) -> Result<()> {
    if s.len() != n {
        return Err(Error::Dimension { expected: n, got: s.len() });
    }
    Ok(())
}

/// `Γ(s)`
pub fn eval_gamma<G: GainOperator + ?Sized>(op: &G, s: &PlusVector) -> Result<PlusVector> {
    check_dim(op.dim(), s)?;
    let mut out = vec![0.0; op.dim()];
    op.apply_into(s.as_slice(), &mut out);
    Ok(PlusVector::from_vec(out))
}

/// `Γ̂(s) = s ⊕ Γ(s)`
pub fn eval_gamma_hat<G: GainOperator + ?Sized>(op: &G, s: &PlusVector) -> Result<PlusVector> {
    check_dim(op.dim(), s)?;
    let mut out = vec![0.0; op.dim()];
    gamma_hat_into(op, s.as_slice(), &mut out);
    Ok(PlusVector::from_vec(out))
}

/// `Pᵣ(s) = r𝟙 ⊕ s`
pub fn project_pr(r: f64, s: &PlusVector) -> Result<PlusVector> {
    check_level(r)?;
    Ok(PlusVector::from_vec(s.iter().map(|v| v.max(r)).collect()))
}

/// `Γᵣ(s) = r𝟙 ⊕ Γ(s)`
pub fn eval_gamma_r<G: GainOperator + ?Sized>(op: &G, r: f64, s: &PlusVector) -> Result<PlusVector> {
    check_level(r)?;
    check_dim(op.dim(), s)?;
    let mut out = vec![0.0; op.dim()];
    gamma_r_into(op, r, s.as_slice(), &mut out);
    Ok(PlusVector::from_vec(out))
}

/// Applies a scaling to `Γ(s)` componentwise: `ω⁻¹ ∘ Γ` or `(id + ρ) ∘ Γ`.
pub fn eval_scaled<G: GainOperator>(op: &G, f: &ScalarFn, mode: ScalingMode, s: &PlusVector) -> Result<PlusVector> {
    Scaled::new(op, f.clone(), mode)?.apply(s)
}

pub(crate) fn check_level(r: f64) -> Result<()> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("level r must be finite and nonnegative, got {r}")));
    }
    Ok(())
}

#[inline]
pub(crate) fn gamma_hat_into<G: GainOperator + ?Sized>(op: &G, s: &[f64], out: &mut [f64]) {
    op.apply_into(s, out);
    for (o, v) in out.iter_mut().zip(s) {
        *o = o.max(*v);
    }
}

#[inline]
pub(crate) fn gamma_r_into<G: GainOperator + ?Sized>(op: &G, r: f64, s: &[f64], out: &mut [f64]) {
    op.apply_into(s, out);
    for o in out.iter_mut() {
        *o = o.max(r);
    }
}

/// `Γᵏ(s)`
pub fn gamma_power<G: GainOperator + ?Sized>(op: &G, s: &PlusVector, k: usize) -> Result<PlusVector> {
    check_dim(op.dim(), s)?;
    let mut cur = s.as_slice().to_vec();
    let mut next = vec![0.0; cur.len()];
    for _ in 0..k {
        op.apply_into(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(PlusVector::from_vec(cur))
}

/// `Γ̂ᵏ(s)`
pub fn gamma_hat_power<G: GainOperator + ?Sized>(op: &G, s: &PlusVector, k: usize) -> Result<PlusVector> {
    check_dim(op.dim(), s)?;
    let mut cur = s.as_slice().to_vec();
    let mut next = vec![0.0; cur.len()];
    for _ in 0..k {
        gamma_hat_into(op, &cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(PlusVector::from_vec(cur))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingMode {
    /// `ω⁻¹ ∘ Γ` for `ω < id`.
    PreInverse,
    /// `(id + ρ) ∘ Γ`.
    PostCompose,
}

/// Log-spaced probe grid on `[1e-6, 1e6]` used to check `ω < id`.
pub fn scaling_probe_grid() -> Vec<f64> {
    (0..=120).map(|k| 10f64.powf(-6.0 + 0.1 * k as f64)).collect()
}

/// A gain operator with a scaling applied after each evaluation.
#[derive(Debug, Clone)]
pub struct Scaled<G> {
    base: G,
    f: ScalarFn,
    mode: ScalingMode,
}

impl<G: GainOperator> Scaled<G> {
    pub fn new(base: G, f: ScalarFn, mode: ScalingMode) -> Result<Self> {
        f.validate()?;
        match mode {
            ScalingMode::PreInverse => {
                if f.is_zero() {
                    return Err(Error::Scaling { t: 0.0, reason: "zero scaling has no inverse".into() });
                }
                if let Some(t) = f.first_point_not_below_identity(&scaling_probe_grid()) {
                    return Err(Error::Scaling { t, reason: format!("ω(t) = {} is not below t", f.eval(t)) });
                }
            }
            ScalingMode::PostCompose => {}
        }
        Ok(Scaled { base, f, mode })
    }

    pub fn base(&self) -> &G {
        &self.base
    }

    pub fn scaling(&self) -> (&ScalarFn, ScalingMode) {
        (&self.f, self.mode)
    }
}

impl<G: GainOperator> GainOperator for Scaled<G> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn apply_into(&self, s: &[f64], out: &mut [f64]) {
        self.base.apply_into(s, out);
        match self.mode {
            ScalingMode::PreInverse => {
                for o in out.iter_mut() {
                    // nonzero family members are invertible on [0, ∞)
                    *o = self.f.inverse(*o).unwrap_or(f64::INFINITY);
                }
            }
            ScalingMode::PostCompose => {
                for o in out.iter_mut() {
                    *o += self.f.eval(*o);
                }
            }
        }
    }
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

    fn swap_max() -> NetworkSpec {
        NetworkBuilder::new(2)
            .all_mafs(Maf::Max)
            .gain(0, 1, ScalarFn::identity())
            .gain(1, 0, ScalarFn::identity())
            .build()
            .unwrap()
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(eval_gamma(&worked(), &PlusVector::zeros(2)).unwrap(), PlusVector::zeros(2));
        assert_eq!(eval_gamma(&worked(), &pv(&[1.0, 1.0])).unwrap(), pv(&[2.0, 0.125]));
        assert_eq!(eval_gamma(&swap_max(), &pv(&[1.0, 2.0])).unwrap(), pv(&[2.0, 1.0]));
        let err = eval_gamma(&worked(), &pv(&[1.0])).unwrap_err();
        assert_eq!(err, Error::Dimension { expected: 2, got: 1 });
    }

    #[test]
    fn gamma_hat_examples() {
        assert_eq!(eval_gamma_hat(&swap_max(), &pv(&[1.0, 2.0])).unwrap(), pv(&[2.0, 2.0]));
        assert_eq!(eval_gamma_hat(&worked(), &PlusVector::zeros(2)).unwrap(), PlusVector::zeros(2));
        assert_eq!(eval_gamma_hat(&worked(), &pv(&[1.0, 1.0])).unwrap(), pv(&[2.0, 1.0]));
    }

    #[test]
    fn projection_examples() {
        let s = pv(&[1.0, 3.0]);
        assert_eq!(project_pr(0.0, &s).unwrap(), s);
        assert_eq!(project_pr(2.0, &s).unwrap(), pv(&[2.0, 3.0]));
        let a = project_pr(1.0, &pv(&[0.0, 5.0])).unwrap();
        let b = project_pr(1.0, &pv(&[0.5, 5.0])).unwrap();
        // both entries are lifted to r = 1, so the images coincide
        assert_eq!(a.dist(&b), 0.0);
        assert!(a.dist(&b) <= pv(&[0.0, 5.0]).dist(&pv(&[0.5, 5.0])));
        assert!(project_pr(-1.0, &s).is_err());
    }

    #[test]
    fn gamma_r_examples() {
        let spec = worked();
        let s = pv(&[1.0, 1.0]);
        assert_eq!(eval_gamma_r(&spec, 0.0, &s).unwrap(), eval_gamma(&spec, &s).unwrap());
        // Γ((2,1)) = (2, 0.25), joined with 𝟙
        assert_eq!(eval_gamma(&spec, &pv(&[2.0, 1.0])).unwrap(), pv(&[2.0, 0.25]));
        assert_eq!(eval_gamma_r(&spec, 1.0, &pv(&[2.0, 1.0])).unwrap(), pv(&[2.0, 1.0]));
    }

    #[test]
    fn scaled_examples() {
        let spec = worked();
        let half = ScalarFn::linear(0.5).unwrap();
        let s = pv(&[1.0, 1.0]);
        assert_eq!(eval_scaled(&spec, &half, ScalingMode::PreInverse, &s).unwrap(), pv(&[4.0, 0.25]));
        let id = ScalarFn::identity();
        let doubled = eval_scaled(&spec, &id, ScalingMode::PostCompose, &s).unwrap();
        assert_eq!(doubled, eval_gamma(&spec, &s).unwrap().scale(2.0));
        let err = eval_scaled(&spec, &ScalarFn::linear(2.0).unwrap(), ScalingMode::PreInverse, &s).unwrap_err();
        assert!(matches!(err, Error::Scaling { .. }));
    }
}
