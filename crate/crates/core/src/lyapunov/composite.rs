use serde::Serialize;

use super::model::{offsets, InputSignal, OdeTrajectory, SubsystemModel};
use crate::error::{Error, Result};
use crate::network::NetworkSpec;
use crate::path::PathTable;
use crate::scalar::ScalarFn;

/// `V(x) = maxᵢ σᵢ⁻¹(Vᵢ(xᵢ))` for a path table and node Lyapunov functions.
#[derive(Debug, Clone)]
pub struct CompositeLyapunov {
    table: PathTable,
    models: Vec<SubsystemModel>,
    gamma_u_max: ScalarFn,
    offsets: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VValue {
    pub value: f64,
    /// Some `σᵢ⁻¹` was extrapolated beyond the table.
    pub out_of_range: bool,
}

/// Builds the composite function. The table components must be strictly
/// increasing and match the node count.
pub fn assemble_v(table: PathTable, models: Vec<SubsystemModel>, gamma_u_max: ScalarFn) -> Result<CompositeLyapunov> {
    if table.dim() != models.len() {
        return Err(Error::Assembly(format!("table has {} components for {} nodes", table.dim(), models.len())));
    }
    if let Some((i, a, b)) = table.flat_components().first() {
        return Err(Error::Assembly(format!("component {i} is not strictly increasing on [{a}, {b}]")));
    }
    gamma_u_max.validate()?;
    let offsets = offsets(&models);
    Ok(CompositeLyapunov { table, models, gamma_u_max, offsets })
}

impl CompositeLyapunov {
    pub fn table(&self) -> &PathTable {
        &self.table
    }

    pub fn models(&self) -> &[SubsystemModel] {
        &self.models
    }

    pub fn state_dim(&self) -> usize {
        self.offsets[self.models.len()]
    }

    pub fn node_values(&self, x: &[f64]) -> Vec<f64> {
        (0..self.models.len()).map(|i| self.models[i].lyapunov(&x[self.offsets[i]..self.offsets[i + 1]])).collect()
    }

    pub fn eval(&self, x: &[f64]) -> Result<VValue> {
        if x.len() != self.state_dim() {
            return Err(Error::Dimension { expected: self.state_dim(), got: x.len() });
        }
        let mut out = VValue { value: 0.0, out_of_range: false };
        for (i, vi) in self.node_values(x).into_iter().enumerate() {
            let l = self.table.inverse(i, vi)?;
            out.value = out.value.max(l.value);
            out.out_of_range |= l.out_of_range;
        }
        Ok(out)
    }

    /// Input level below which the implication is not required:
    /// `maxᵢ σᵢ⁻¹(γᵘ_max(‖u‖∞))`.
    pub fn input_threshold(&self, u_norm: f64) -> Result<f64> {
        let g = self.gamma_u_max.eval(u_norm);
        (0..self.models.len()).map(|i| self.table.inverse(i, g).map(|l| l.value)).try_fold(0.0, |acc, v| Ok(f64::max(acc, v?)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    /// Samples where the antecedent held.
    pub checked: usize,
    pub violations: usize,
    /// Smallest `(−α(V) + tol(1+V)) − ΔV/dt` over checked samples.
    pub worst_margin: f64,
    /// Time of the first violation.
    pub first_violation: Option<f64>,
}

impl DecayReport {
    pub fn empty() -> Self {
        DecayReport { checked: 0, violations: 0, worst_margin: f64::INFINITY, first_violation: None }
    }

    fn record(&mut self, t: f64, margin: f64) {
        self.checked += 1;
        self.worst_margin = self.worst_margin.min(margin);
        if margin < 0.0 {
            self.violations += 1;
            self.first_violation.get_or_insert(t);
        }
    }

    pub fn merge(&mut self, other: &DecayReport) {
        self.checked += other.checked;
        self.violations += other.violations;
        self.worst_margin = self.worst_margin.min(other.worst_margin);
        if self.first_violation.is_none() {
            self.first_violation = other.first_violation;
        }
    }
}

/// Forward-difference check of `V(x) > γ(‖u‖) ⇒ D⁺V ≤ −α(V)` along a
/// trajectory, with `‖u‖` the sup over the whole horizon.
pub fn check_iss_decay(
    trajectory: &OdeTrajectory,
    v: &CompositeLyapunov,
    input: &InputSignal,
    alpha: &ScalarFn,
    tol: f64,
) -> Result<DecayReport> {
    let threshold = v.input_threshold(input.sup_norm(v.models()))? * (1.0 + tol);
    let values = trajectory.states.iter().map(|x| v.eval(x).map(|e| e.value)).collect::<Result<Vec<_>>>()?;
    let mut report = DecayReport::empty();
    for k in 0..values.len().saturating_sub(1) {
        let vk = values[k];
        if vk <= threshold {
            continue;
        }
        let d = (values[k + 1] - vk) / trajectory.dt;
        report.record(trajectory.time(k), -alpha.eval(vk) + tol * (1.0 + vk) - d);
    }
    Ok(report)
}

/// Per-node version: `Vᵢ > max{μᵢ(γᵢⱼ(Vⱼ)), γᵢᵤ(|uᵢ|)} ⇒ D⁺Vᵢ ≤ −αᵢ(Vᵢ)`,
/// with the gains of `spec`.
pub fn check_subsystem_decay(
    trajectory: &OdeTrajectory,
    models: &[SubsystemModel],
    spec: &NetworkSpec,
    input: &InputSignal,
    tol: f64,
) -> Result<DecayReport> {
    if spec.n() != models.len() {
        return Err(Error::Dimension { expected: spec.n(), got: models.len() });
    }
    let off = offsets(models);
    let node = |x: &[f64], i: usize| models[i].lyapunov(&x[off[i]..off[i + 1]]);
    let mut report = DecayReport::empty();
    for k in 0..trajectory.states.len().saturating_sub(1) {
        let t = trajectory.time(k);
        let x = &trajectory.states[k];
        let next = &trajectory.states[k + 1];
        let vals: Vec<f64> = (0..models.len()).map(|i| node(x, i)).collect();
        let u = input.at(t);
        for i in 0..models.len() {
            let internal = spec.maf(i).eval_iter(spec.edges(i).map(|(j, g)| g.eval(vals[j])));
            let external = spec.external_gain(i).map_or(0.0, |g| g.eval(models[i].lyapunov(&u[off[i]..off[i + 1]])));
            if vals[i] <= internal.max(external) * (1.0 + tol) {
                continue;
            }
            let d = (node(next, i) - vals[i]) / trajectory.dt;
            report.record(t, -models[i].alpha.eval(vals[i]) + tol * (1.0 + vals[i]) - d);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::PlusVector;
    use crate::lyapunov::simulate_network_ode;
    use crate::path::PathMode;

    fn table(f: impl Fn(f64) -> Vec<f64>) -> PathTable {
        let grid = vec![0.5, 1.0, 2.0, 4.0];
        let sigma = grid.iter().map(|&r| PlusVector::new(f(r)).unwrap()).collect();
        PathTable::new(grid, sigma, PathMode::SigmaStar, 1e-10).unwrap()
    }

    fn nodes(n: usize) -> Vec<SubsystemModel> {
        (0..n).map(|_| SubsystemModel::linear(1.0, vec![], 1.0, ScalarFn::identity())).collect()
    }

    #[test]
    fn worked_example_value() {
        let v = assemble_v(table(|r| vec![2.0 * r, r]), nodes(2), ScalarFn::identity()).unwrap();
        assert_eq!(v.eval(&[4.0, 1.0]).unwrap().value, 2.0);
        assert_eq!(v.eval(&[0.0, 0.0]).unwrap().value, 0.0);
        assert_eq!(v.eval(&[-4.0, 0.0]).unwrap().value, 2.0);
        assert!(v.eval(&[100.0, 0.0]).unwrap().out_of_range);
    }

    #[test]
    fn identity_path_single_node() {
        let v = assemble_v(table(|r| vec![r]), nodes(1), ScalarFn::identity()).unwrap();
        for x in [0.1, 0.7, 3.9] {
            assert_eq!(v.eval(&[x]).unwrap().value, x);
        }
    }

    #[test]
    fn flat_tables_are_rejected() {
        assert!(matches!(
            assemble_v(table(|r| vec![r, 1.0]), nodes(2), ScalarFn::identity()),
            Err(Error::Assembly(_))
        ));
        assert!(assemble_v(table(|r| vec![r]), nodes(2), ScalarFn::identity()).is_err());
    }

    #[test]
    fn decay_and_reversal() {
        let models = vec![SubsystemModel::linear(1.0, vec![], 1.0, ScalarFn::linear(0.5).unwrap())];
        let v = assemble_v(table(|r| vec![r]), models.clone(), ScalarFn::identity()).unwrap();
        let u = InputSignal::zero(1);
        let tr = simulate_network_ode(&models, &[3.0], &u, 2.0, 1e-3).unwrap();
        let alpha = ScalarFn::linear(0.5).unwrap();
        let rep = check_iss_decay(&tr, &v, &u, &alpha, 1e-2).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.checked > 0);

        let mut rev = tr.clone();
        rev.states.reverse();
        assert!(check_iss_decay(&rev, &v, &u, &alpha, 1e-2).unwrap().violations > 0);

        // γ(‖u‖) above every V along the trajectory: nothing to check
        let big = InputSignal::constant(vec![10.0]);
        let tr = simulate_network_ode(&models, &[1.0], &big, 0.5, 1e-3).unwrap();
        let rep = check_iss_decay(&tr, &v, &big, &alpha, 1e-2).unwrap();
        assert_eq!((rep.checked, rep.violations), (0, 0));
    }
}
