//! Full fixed-point set of `Γᵣ` for small additive networks by enumerating
//! the active index set `𝓘 = {i : Γᵢ(s) > r}`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::trajectory::iterate_limit;
use super::{IterOptions, OperatorKind};
use crate::cone::{sup_dist, sup_norm, PlusVector};
use crate::error::{Error, Result};
use crate::network::NetworkSpec;
use crate::operators::{check_level, GainOperator};
use crate::scalar::ScalarFn;

/// Largest network the exponential enumeration accepts.
pub const MAX_ENUMERATION_NODES: usize = 12;

const SINGULAR_PIVOT: f64 = 1e-12;
const DEDUP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointSet {
    pub r: f64,
    pub points: Vec<PlusVector>,
    /// Index sets whose reduced system was singular or did not settle.
    pub unsolved: Vec<Vec<usize>>,
    pub branches: usize,
}

impl FixedPointSet {
    /// Componentwise minimum over all points.
    pub fn lower(&self) -> Option<PlusVector> {
        self.fold(f64::min)
    }

    /// Componentwise maximum over all points.
    pub fn upper(&self) -> Option<PlusVector> {
        self.fold(f64::max)
    }

    fn fold(&self, f: fn(f64, f64) -> f64) -> Option<PlusVector> {
        let first = self.points.first()?.as_slice().to_vec();
        let v = self.points[1..].iter().fold(first, |acc, p| acc.iter().zip(p.iter()).map(|(a, b)| f(*a, *b)).collect());
        Some(PlusVector::from_vec(v))
    }
}

/// Operator `x ↦ Γ_𝓘(x)` on the active coordinates with `sⱼ = r` elsewhere.
struct Reduced<'a> {
    spec: &'a NetworkSpec,
    active: &'a [usize],
    r: f64,
}

impl Reduced<'_> {
    fn embed(&self, x: &[f64]) -> Vec<f64> {
        let mut s = vec![self.r; self.spec.n()];
        for (k, &i) in self.active.iter().enumerate() {
            s[i] = x[k];
        }
        s
    }
}

impl GainOperator for Reduced<'_> {
    fn dim(&self) -> usize {
        self.active.len()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let s = self.embed(x);
        let mut g = vec![0.0; s.len()];
        self.spec.apply_into(&s, &mut g);
        for (k, &i) in self.active.iter().enumerate() {
            out[k] = g[i];
        }
    }
}

fn solve_linear(a: &[Vec<f64>], active: &[usize], r: f64, n: usize) -> Option<Vec<f64>> {
    let m = active.len();
    let mut inside = vec![false; n];
    active.iter().for_each(|&i| inside[i] = true);
    let lhs = DMatrix::from_fn(m, m, |p, q| f64::from(p == q) - a[active[p]][active[q]]);
    let rhs = DVector::from_fn(m, |p, _| (0..n).filter(|&j| !inside[j]).map(|j| a[active[p]][j] * r).sum());
    let lu = lhs.full_piv_lu();
    let diag = lu.u().diagonal();
    let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), d| (lo.min(d.abs()), hi.max(d.abs())));
    if !(lo > SINGULAR_PIVOT * hi.max(1.0)) {
        return None;
    }
    lu.solve(&rhs).map(|x| x.iter().copied().collect())
}

/// Enumerates every fixed point of `Γᵣ(s) = r𝟙 ⊕ Γ(s)` for additive specs with
/// linear or piecewise-linear gains and at most [`MAX_ENUMERATION_NODES`] nodes.
pub fn enumerate_fixed_points_sumtype(spec: &NetworkSpec, r: f64) -> Result<FixedPointSet> {
    check_level(r)?;
    if r == 0.0 {
        return Err(Error::Domain("enumeration needs r > 0".into()));
    }
    let n = spec.n();
    if n > MAX_ENUMERATION_NODES {
        return Err(Error::Size(format!("{n} nodes exceed the enumeration limit of {MAX_ENUMERATION_NODES}")));
    }
    if !spec.is_additive() {
        return Err(Error::WrongClass("enumeration needs sum or weighted-sum MAFs".into()));
    }
    if spec.all_gains().any(|(_, _, g)| matches!(g, ScalarFn::Power { .. })) {
        return Err(Error::WrongClass("enumeration needs linear or piecewise-linear gains".into()));
    }
    let matrix = spec.linear_matrix();
    let opts = IterOptions::default();
    let mut points: Vec<PlusVector> = Vec::new();
    let mut unsolved = Vec::new();
    let mut g = vec![0.0; n];
    for mask in 0u32..(1 << n) {
        let active: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let reduced = Reduced { spec, active: &active, r };
        let x = if active.is_empty() {
            Some(vec![])
        } else if let Some(a) = &matrix {
            solve_linear(a, &active, r, n)
        } else {
            iterate_limit(&reduced, &OperatorKind::Gamma, &vec![r; active.len()], &opts).ok().map(|(x, _)| x)
        };
        let Some(x) = x else {
            unsolved.push(active);
            continue;
        };
        let s = reduced.embed(&x);
        let eps = 1e-12 * (1.0 + r) * (1.0 + sup_norm(&s));
        if s.iter().any(|v| !(v.is_finite() && *v >= r - eps)) {
            continue;
        }
        spec.apply_into(&s, &mut g);
        let consistent = (0..n).all(|i| if mask >> i & 1 == 1 { g[i] >= r - eps } else { g[i] <= r + eps });
        let fixed = s.iter().zip(&g).all(|(si, gi)| (si - gi.max(r)).abs() <= eps);
        if !(consistent && fixed) {
            continue;
        }
        let s: Vec<f64> = s.into_iter().map(|v| v.max(r)).collect();
        if !points.iter().any(|p| sup_dist(p.as_slice(), &s) <= DEDUP_TOL * (1.0 + sup_norm(&s))) {
            points.push(PlusVector::from_vec(s));
        }
    }
    Ok(FixedPointSet { r, points, unsolved, branches: 1 << n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maf::Maf;
    use crate::network::NetworkBuilder;

    fn pv(v: &[f64]) -> PlusVector {
        PlusVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn worked_example_has_one_fixed_point() {
        let spec = NetworkBuilder::new(2)
            .gain(0, 1, ScalarFn::linear(2.0).unwrap())
            .gain(1, 0, ScalarFn::linear(0.125).unwrap())
            .build()
            .unwrap();
        let set = enumerate_fixed_points_sumtype(&spec, 1.0).unwrap();
        assert_eq!(set.points, vec![pv(&[2.0, 1.0])]);
        assert!(set.unsolved.is_empty());
        assert_eq!(set.branches, 4);
    }

    #[test]
    fn zero_operator() {
        let spec = NetworkBuilder::new(3).build().unwrap();
        let set = enumerate_fixed_points_sumtype(&spec, 1.0).unwrap();
        assert_eq!(set.points, vec![PlusVector::constant(3, 1.0)]);
    }

    #[test]
    fn identity_swap_has_singular_branch() {
        let spec = NetworkBuilder::new(2)
            .gain(0, 1, ScalarFn::identity())
            .gain(1, 0, ScalarFn::identity())
            .build()
            .unwrap();
        let set = enumerate_fixed_points_sumtype(&spec, 1.0).unwrap();
        assert_eq!(set.unsolved, vec![vec![0, 1]]);
        assert_eq!(set.points, vec![pv(&[1.0, 1.0])]);
    }

    #[test]
    fn piecewise_linear_branch() {
        // γ(t) = 2t on [0,1], then slope 0.1; fixed point of s₀ = max(1, γ(s₁)), s₁ = max(1, s₀/4)
        let pl = ScalarFn::piecewise_linear(vec![(0.0, 0.0), (1.0, 2.0), (2.0, 2.1)]).unwrap();
        let spec = NetworkBuilder::new(2)
            .gain(0, 1, pl)
            .gain(1, 0, ScalarFn::linear(0.25).unwrap())
            .build()
            .unwrap();
        let set = enumerate_fixed_points_sumtype(&spec, 1.0).unwrap();
        assert_eq!(set.points.len(), 1);
        assert!(sup_dist(set.points[0].as_slice(), &[2.0, 1.0]) < 1e-9);
    }

    #[test]
    fn preconditions() {
        let big = NetworkBuilder::new(13).build().unwrap();
        assert!(matches!(enumerate_fixed_points_sumtype(&big, 1.0), Err(Error::Size(_))));
        let max = NetworkBuilder::new(2).all_mafs(Maf::Max).build().unwrap();
        assert!(matches!(enumerate_fixed_points_sumtype(&max, 1.0), Err(Error::WrongClass(_))));
    }
}
