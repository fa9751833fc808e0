use serde::Serialize;

use super::table::PathTable;
use crate::error::{Error, Result};
use crate::operators::GainOperator;
use crate::scalar::ScalarFn;

/// Bi-Lipschitz constants of the table components on one subinterval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct P4Interval {
    pub a: f64,
    pub b: f64,
    /// Smallest difference quotient over adjacent grid pairs and components.
    pub c: f64,
    /// Largest difference quotient.
    pub big_c: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathReport {
    /// `(r, minᵢ [(id+ρ)⁻¹(σᵢ(r)) − Γᵢ(σ(r))])` per grid point `r > 0`.
    pub p1_margins: Vec<(f64, f64)>,
    pub p1_worst: f64,
    pub p1_pass: bool,
    /// `(r, σ_min(r), σ_max(r))` per grid point.
    pub p2_envelopes: Vec<(f64, f64, f64)>,
    pub p2_pass: bool,
    /// Smallest forward difference per component.
    pub p3_min_increase: Vec<f64>,
    /// `(component, r₁, r₂)` for components that fail to increase strictly.
    pub p3_failures: Vec<(usize, f64, f64)>,
    pub p3_pass: bool,
    pub p4: Vec<P4Interval>,
    pub p4_pass: bool,
    /// `‖σ^* − σ_*‖∞` carried from the table, when known.
    pub gap: Option<f64>,
}

impl PathReport {
    pub fn passed(&self) -> bool {
        self.p1_pass && self.p2_pass && self.p3_pass && self.p4_pass
    }
}

/// Checks the table against the path-of-decay properties:
/// (P1) `Γ(σ(r)) ≤ (id+ρ)⁻¹(σ(r))` at grid points (`ρ = 0` when absent),
/// (P2) `σ_min(r) ≥ r(1 − tol)`,
/// (P3) strict increase of every component along the grid,
/// (P4) difference-quotient bounds `0 < c ≤ C` on each subinterval.
pub fn verify_path<G: GainOperator>(
    op: &G,
    table: &PathTable,
    rho: Option<&ScalarFn>,
    subintervals: &[(f64, f64)],
    tol: f64,
) -> Result<PathReport> {
    if op.dim() != table.dim() {
        return Err(Error::Dimension { expected: op.dim(), got: table.dim() });
    }
    let grid = table.grid();
    let sigma = table.sigma();
    let (lo, hi) = (grid[1], grid[grid.len() - 1]);
    for &(a, b) in subintervals {
        if !(a > 0.0 && a < b && a >= lo * (1.0 - 1e-12) && b <= hi * (1.0 + 1e-12)) {
            return Err(Error::Domain(format!("subinterval [{a}, {b}] is not inside the grid span [{lo}, {hi}]")));
        }
    }

    let n = table.dim();
    let mut g = vec![0.0; n];
    let mut p1_margins = Vec::with_capacity(grid.len() - 1);
    let mut p1_pass = true;
    for (k, s) in sigma.iter().enumerate().skip(1) {
        op.apply_into(s.as_slice(), &mut g);
        let mut worst = f64::INFINITY;
        for i in 0..n {
            let target = match rho {
                Some(rho) => rho.id_plus_inverse(s[i]),
                None => s[i],
            };
            let margin = target - g[i];
            worst = worst.min(margin);
            if margin < -tol * (1.0 + s[i]) {
                p1_pass = false;
            }
        }
        p1_margins.push((grid[k], worst));
    }
    let p1_worst = p1_margins.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);

    let mins = table.sigma_min();
    let maxs = table.sigma_max();
    let p2_envelopes: Vec<_> = (1..grid.len()).map(|k| (grid[k], mins[k], maxs[k])).collect();
    let p2_pass = p2_envelopes.iter().all(|&(r, m, _)| m >= r * (1.0 - tol));

    let p3_min_increase: Vec<f64> = (0..n)
        .map(|i| sigma.windows(2).map(|w| w[1][i] - w[0][i]).fold(f64::INFINITY, f64::min))
        .collect();
    let p3_failures = table.flat_components();
    let p3_pass = p3_failures.is_empty();

    let p4: Vec<P4Interval> = subintervals
        .iter()
        .map(|&(a, b)| {
            let (mut c, mut big_c) = (f64::INFINITY, 0.0_f64);
            for k in 1..grid.len() - 1 {
                let (r1, r2) = (grid[k], grid[k + 1]);
                if r1 < a * (1.0 - 1e-12) || r2 > b * (1.0 + 1e-12) {
                    continue;
                }
                for (hi, lo) in sigma[k + 1].iter().zip(sigma[k].iter()) {
                    let q = (hi - lo).abs() / (r2 - r1);
                    c = c.min(q);
                    big_c = big_c.max(q);
                }
            }
            let pass = c.is_finite() && c > 0.0 && c <= big_c;
            P4Interval { a, b, c, big_c, pass }
        })
        .collect();
    let p4_pass = p4.iter().all(|p| p.pass);

    Ok(PathReport {
        p1_margins,
        p1_worst,
        p1_pass,
        p2_envelopes,
        p2_pass,
        p3_min_increase,
        p3_failures,
        p3_pass,
        p4,
        p4_pass,
        gap: table.max_gap,
    })
}
