//! Paths of decay: the minimal and maximal fixed points `σ_*(r)`, `σ^*(r)` of
//! `Γᵣ = Pᵣ ∘ Γ`, tables of `σ` over an `r`-grid and their verification.

mod side;
mod table;
mod verify;

pub use side::{
    check_gain_lower_lipschitz, check_maf_lower_bound, check_order_contraction, MafLowerBound, SideConditions,
};
pub use table::{Lookup, PathMode, PathTable};
pub use verify::{verify_path, P4Interval, PathReport};

use crate::cone::{sup_dist, PlusVector};
use crate::error::{Error, Result};
use crate::operators::{check_level, GainOperator};
use crate::scalar::ScalarFn;
use crate::stability::{iterate_limit, IterOptions, OperatorKind};

fn construction(r: f64, e: Error) -> Error {
    match e {
        Error::Construction { .. } => e,
        other => Error::Construction { r, reason: other.to_string() },
    }
}

/// `σ_*(r) = Q̂(r𝟙)`: limit of the nondecreasing `Γ̂`-iteration from `r𝟙`, the
/// minimal fixed point of `Γᵣ`. `σ_*(0) = 0` without iterating.
pub fn compute_sigma_star<G: GainOperator>(op: &G, r: f64, opts: &IterOptions) -> Result<PlusVector> {
    check_level(r)?;
    let n = op.dim();
    if r == 0.0 {
        return Ok(PlusVector::zeros(n));
    }
    let (limit, _) = iterate_limit(op, &OperatorKind::GammaHat, &vec![r; n], opts).map_err(|e| construction(r, e))?;
    Ok(PlusVector::from_vec(limit))
}

/// `σ^*(r)` from the `Γᵣ`-iteration started at `φ(r)𝟙`.
pub fn compute_sigma_upper<G: GainOperator>(op: &G, r: f64, phi: &ScalarFn, opts: &IterOptions) -> Result<PlusVector> {
    check_level(r)?;
    compute_sigma_upper_from(op, r, phi.eval(r), opts)
}

/// `σ^*(r)` from the `Γᵣ`-iteration started at `level·𝟙`.
///
/// Starting above every fixed point keeps all iterates above every fixed
/// point, so the limit is the maximal one. The bound is cross-checked by a
/// second run from `1.5·level·𝟙`; differing limits mean `level` does not
/// dominate the fixed-point set and the construction fails.
pub fn compute_sigma_upper_from<G: GainOperator>(op: &G, r: f64, level: f64, opts: &IterOptions) -> Result<PlusVector> {
    check_level(r)?;
    let n = op.dim();
    if !(level >= r && level.is_finite()) {
        return Err(Error::Domain(format!("upper start level {level} is below r = {r}")));
    }
    if r == 0.0 {
        return Ok(PlusVector::zeros(n));
    }
    let kind = OperatorKind::GammaR { r };
    let (upper, _) = iterate_limit(op, &kind, &vec![level; n], opts).map_err(|e| construction(r, e))?;
    let probe = iterate_limit(op, &kind, &vec![1.5 * level; n], opts);
    let scale = 1.0 + upper.iter().copied().fold(0.0, f64::max);
    let consistent = matches!(&probe, Ok((p, _)) if sup_dist(p, &upper) <= 1e3 * opts.tol * scale);
    if !consistent {
        return Err(Error::Construction { r, reason: "phi bound does not dominate the fixed-point set".into() });
    }
    let lower = compute_sigma_star(op, r, opts)?;
    if lower.iter().zip(&upper).any(|(a, b)| *a > b + 1e3 * opts.tol * scale) {
        return Err(Error::Construction { r, reason: "maximal fixed point falls below the minimal one".into() });
    }
    Ok(PlusVector::from_vec(upper))
}

/// `‖σ^*(r) − σ_*(r)‖∞`.
pub fn fixed_point_gap<G: GainOperator>(op: &G, r: f64, phi: &ScalarFn, opts: &IterOptions) -> Result<f64> {
    let lower = compute_sigma_star(op, r, opts)?;
    let upper = compute_sigma_upper(op, r, phi, opts)?;
    Ok(lower.dist(&upper))
}

/// Builds `σ` on `grid` (0 is prepended). With `phi`, both endpoints are
/// constructed at every point and the largest gap is recorded; the table
/// carries the endpoint selected by `mode`.
pub fn build_path_table<G: GainOperator>(
    op: &G,
    grid: &[f64],
    phi: Option<&ScalarFn>,
    opts: &IterOptions,
    mode: PathMode,
) -> Result<PathTable> {
    if mode == PathMode::SigmaUpper && phi.is_none() {
        return Err(Error::Domain("the upper selection needs a φ bound".into()));
    }
    let mut sigma = Vec::with_capacity(grid.len());
    let mut gap = 0.0_f64;
    for &r in grid {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("grid point {r} is not positive")));
        }
        let lower = compute_sigma_star(op, r, opts)?;
        match phi {
            Some(phi) => {
                let upper = compute_sigma_upper(op, r, phi, opts)?;
                gap = gap.max(lower.dist(&upper));
                sigma.push(if mode == PathMode::SigmaStar { lower } else { upper });
            }
            None => sigma.push(lower),
        }
    }
    let table = PathTable::new(grid.to_vec(), sigma, mode, opts.tol.max(1e-12) * 1e3)?;
    Ok(if phi.is_some() { table.with_gap(gap) } else { table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maf::Maf;
    use crate::network::{NetworkBuilder, NetworkSpec};

    fn worked() -> NetworkSpec {
        NetworkBuilder::new(2)
            .gain(0, 1, ScalarFn::linear(2.0).unwrap())
            .gain(1, 0, ScalarFn::linear(0.125).unwrap())
            .build()
            .unwrap()
    }

    fn power_spec() -> NetworkSpec {
        NetworkBuilder::new(2)
            .gain(0, 1, ScalarFn::power(0.5, 0.5).unwrap())
            .gain(1, 0, ScalarFn::power(1.0, 2.0).unwrap())
            .build()
            .unwrap()
    }

    fn close(a: &PlusVector, b: &[f64], tol: f64) -> bool {
        sup_dist(a.as_slice(), b) <= tol
    }

    #[test]
    fn sigma_star_examples() {
        let opts = IterOptions::default();
        assert_eq!(compute_sigma_star(&worked(), 1.0, &opts).unwrap(), PlusVector::new(vec![2.0, 1.0]).unwrap());
        assert!(close(&compute_sigma_star(&power_spec(), 0.04, &opts).unwrap(), &[0.1, 0.04], 1e-12));
        assert_eq!(compute_sigma_star(&worked(), 0.0, &opts).unwrap(), PlusVector::zeros(2));
    }

    #[test]
    fn sigma_upper_examples() {
        let opts = IterOptions::default();
        let phi = ScalarFn::linear(4.0).unwrap();
        assert!(close(&compute_sigma_upper(&worked(), 1.0, &phi, &opts).unwrap(), &[2.0, 1.0], 1e-9));
        let zero = NetworkBuilder::new(3).build().unwrap();
        let id = ScalarFn::identity();
        assert_eq!(compute_sigma_upper(&zero, 2.0, &id, &opts).unwrap(), PlusVector::constant(3, 2.0));
        assert!(close(&compute_sigma_upper_from(&power_spec(), 0.04, 1.0, &opts).unwrap(), &[0.1, 0.04], 1e-9));
        assert!(compute_sigma_upper(&worked(), 1.0, &ScalarFn::linear(0.5).unwrap(), &opts).is_err());
    }

    #[test]
    fn identity_gains_fail_construction() {
        let spec = NetworkBuilder::new(2)
            .gain(0, 1, ScalarFn::identity())
            .gain(1, 0, ScalarFn::identity())
            .build()
            .unwrap();
        let phi = ScalarFn::linear(10.0).unwrap();
        let err = fixed_point_gap(&spec, 1.0, &phi, &IterOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Construction { r, .. } if r == 1.0));
    }

    #[test]
    fn gaps_vanish_for_unique_fixed_points() {
        let opts = IterOptions::default();
        assert!(fixed_point_gap(&worked(), 1.0, &ScalarFn::linear(4.0).unwrap(), &opts).unwrap() <= 2e-10);
        let zero = NetworkBuilder::new(2).all_mafs(Maf::Max).build().unwrap();
        for r in [0.1, 1.0, 10.0] {
            assert_eq!(fixed_point_gap(&zero, r, &ScalarFn::identity(), &opts).unwrap(), 0.0);
        }
    }

    #[test]
    fn tables() {
        let opts = IterOptions::default();
        let grid = [0.5, 1.0, 2.0, 4.0];
        let t = build_path_table(&worked(), &grid, Some(&ScalarFn::linear(4.0).unwrap()), &opts, PathMode::SigmaStar)
            .unwrap();
        for (k, &r) in grid.iter().enumerate() {
            assert!(close(&t.sigma()[k + 1], &[2.0 * r, r], 1e-12));
        }
        assert!(t.max_gap.unwrap() <= 2e-10);

        let grid = [0.01, 0.04, 0.16, 0.25, 0.5, 1.0];
        let t = build_path_table(&power_spec(), &grid, None, &opts, PathMode::SigmaStar).unwrap();
        for (k, &r) in grid.iter().enumerate() {
            let s1 = if r < 0.25 { 0.5 * r.sqrt() } else { r };
            assert!(close(&t.sigma()[k + 1], &[s1, r], 1e-9), "{r}");
        }
        assert!(build_path_table(&worked(), &[1.0], None, &opts, PathMode::SigmaUpper).is_err());
    }
}
