use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::NetworkSpec;
use crate::sampling::Sampler;
use crate::scalar::ScalarFn;

/// States whose sup-norm exceeds this end the simulation as a blow-up.
pub const BLOW_UP: f64 = 1e12;

/// Right-hand side of one node, acting componentwise on `xᵢ ∈ ℝ^{nᵢ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Dynamics {
    /// `ẋᵢ = −a·xᵢ + Σⱼ bᵢⱼ·xⱼ + c·uᵢ`
    Linear { a: f64, coupling: Vec<(usize, f64)>, c: f64 },
    /// `ẋᵢ = −a·xᵢ + Σⱼ bᵢⱼ·tanh(xⱼ) + c·uᵢ`
    Saturating { a: f64, coupling: Vec<(usize, f64)>, c: f64 },
}

impl Dynamics {
    pub fn coupling(&self) -> &[(usize, f64)] {
        match self {
            Dynamics::Linear { coupling, .. } | Dynamics::Saturating { coupling, .. } => coupling,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsystemModel {
    pub state_dim: usize,
    pub dynamics: Dynamics,
    /// Lower coercivity bound `ψ₁(|xᵢ|) ≤ Vᵢ(xᵢ)`.
    pub psi1: ScalarFn,
    /// Upper coercivity bound `Vᵢ(xᵢ) ≤ ψ₂(|xᵢ|)`.
    pub psi2: ScalarFn,
    /// Decay rate in the node implication.
    pub alpha: ScalarFn,
}

impl SubsystemModel {
    /// Scalar linear node with `Vᵢ = |xᵢ|` and `ψ₁ = ψ₂ = id`.
    pub fn linear(a: f64, coupling: Vec<(usize, f64)>, c: f64, alpha: ScalarFn) -> Self {
        SubsystemModel {
            state_dim: 1,
            dynamics: Dynamics::Linear { a, coupling, c },
            psi1: ScalarFn::identity(),
            psi2: ScalarFn::identity(),
            alpha,
        }
    }

    pub fn with_state_dim(mut self, d: usize) -> Self {
        self.state_dim = d;
        self
    }

    /// `Vᵢ(xᵢ) = |xᵢ|`, the Euclidean norm of the node state.
    pub fn lyapunov(&self, x: &[f64]) -> f64 {
        if x.len() == 1 {
            x[0].abs()
        } else {
            x.iter().map(|v| v * v).sum::<f64>().sqrt()
        }
    }
}

/// Offsets of each node block in the flat state vector.
pub(crate) fn offsets(models: &[SubsystemModel]) -> Vec<usize> {
    let mut off = Vec::with_capacity(models.len() + 1);
    off.push(0);
    for m in models {
        off.push(off.last().unwrap() + m.state_dim);
    }
    off
}

/// Checks dimensions, parameters and, with a spec, that every coupling
/// `j` of node `i` lies in `Iᵢ`.
pub fn validate_models(models: &[SubsystemModel], spec: Option<&NetworkSpec>) -> Result<()> {
    let n = models.len();
    if let Some(spec) = spec {
        if spec.n() != n {
            return Err(Error::Dimension { expected: spec.n(), got: n });
        }
    }
    for (i, m) in models.iter().enumerate() {
        if m.state_dim == 0 {
            return Err(Error::Domain(format!("node {i} has an empty state")));
        }
        let (a, c) = match &m.dynamics {
            Dynamics::Linear { a, c, .. } | Dynamics::Saturating { a, c, .. } => (*a, *c),
        };
        if !(a.is_finite() && c.is_finite()) {
            return Err(Error::Domain(format!("node {i} has non-finite parameters")));
        }
        for &(j, b) in m.dynamics.coupling() {
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
            if j == i {
                return Err(Error::Structural { i, j, reason: "self-coupling belongs in the decay term".into() });
            }
            if models[j].state_dim != m.state_dim {
                return Err(Error::Structural { i, j, reason: "coupled nodes need equal state dimensions".into() });
            }
            if !b.is_finite() {
                return Err(Error::Domain(format!("coupling ({i}, {j}) is not finite")));
            }
            if let Some(spec) = spec {
                if !spec.neighbors(i).contains(&j) {
                    return Err(Error::Structural { i, j, reason: "coupling outside the neighbor set".into() });
                }
            }
        }
        for f in [&m.psi1, &m.psi2, &m.alpha] {
            f.validate()?;
        }
    }
    Ok(())
}

/// Piecewise-constant input on a uniform mesh, right-continuous:
/// `u(t) = values[⌊t/h⌋]`, held after the last cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSignal {
    pub mesh: f64,
    /// One flat input vector (same layout as the state) per mesh cell.
    pub values: Vec<Vec<f64>>,
}

impl InputSignal {
    pub fn zero(dim: usize) -> Self {
        InputSignal { mesh: f64::INFINITY, values: vec![vec![0.0; dim]] }
    }

    pub fn constant(u: Vec<f64>) -> Self {
        InputSignal { mesh: f64::INFINITY, values: vec![u] }
    }

    /// Uniform random values in `[−amplitude, amplitude]` on cells of width
    /// `mesh` covering `[0, horizon]`.
    pub fn random(dim: usize, amplitude: f64, mesh: f64, horizon: f64, seed: u64) -> Self {
        let cells = (horizon / mesh).ceil().max(1.0) as usize;
        let mut sampler = Sampler::new(seed);
        let values = (0..cells)
            .map(|_| (0..dim).map(|_| amplitude * sampler.rng().random_range(-1.0..=1.0)).collect())
            .collect();
        InputSignal { mesh, values }
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn at(&self, t: f64) -> &[f64] {
        let k = if self.mesh.is_finite() { (t / self.mesh).floor().max(0.0) as usize } else { 0 };
        &self.values[k.min(self.values.len() - 1)]
    }

    /// `‖u‖∞ = sup_t maxᵢ |uᵢ(t)|` with node norms taken over the given blocks.
    pub fn sup_norm(&self, models: &[SubsystemModel]) -> f64 {
        let off = offsets(models);
        self.values
            .iter()
            .flat_map(|u| (0..models.len()).map(|i| models[i].lyapunov(&u[off[i]..off[i + 1]])).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeTrajectory {
    pub dt: f64,
    /// `states[k] = x(k·dt)`, flat.
    pub states: Vec<Vec<f64>>,
    pub blow_up: bool,
}

impl OdeTrajectory {
    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }
}

fn rhs(models: &[SubsystemModel], off: &[usize], x: &[f64], u: &[f64], dx: &mut [f64]) {
    for (i, m) in models.iter().enumerate() {
        let (a, c, coupling, sat) = match &m.dynamics {
            Dynamics::Linear { a, c, coupling } => (*a, *c, coupling, false),
            Dynamics::Saturating { a, c, coupling } => (*a, *c, coupling, true),
        };
        for d in 0..m.state_dim {
            let k = off[i] + d;
            let mut v = -a * x[k] + c * u[k];
            for &(j, b) in coupling {
                let xj = x[off[j] + d];
                v += b * if sat { xj.tanh() } else { xj };
            }
            dx[k] = v;
        }
    }
}

/// Classical fourth-order Runge–Kutta with fixed step `dt`; the input is held
/// at its value at the start of each step. Sampled every step on `[0, T]`.
pub fn simulate_network_ode(
    models: &[SubsystemModel],
    x0: &[f64],
    input: &InputSignal,
    horizon: f64,
    dt: f64,
) -> Result<OdeTrajectory> {
    validate_models(models, None)?;
    let off = offsets(models);
    let dim = off[models.len()];
    if x0.len() != dim {
        return Err(Error::Dimension { expected: dim, got: x0.len() });
    }
    if input.dim() != dim {
        return Err(Error::Dimension { expected: dim, got: input.dim() });
    }
    if !(dt > 0.0 && horizon >= dt && horizon.is_finite()) {
        return Err(Error::Domain("need dt > 0 and T ≥ dt".into()));
    }
    let steps = (horizon / dt).round() as usize;
    let mut states = Vec::with_capacity(steps + 1);
    states.push(x0.to_vec());
    let mut x = x0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
    let mut blow_up = false;
    for step in 0..steps {
        let u = input.at(step as f64 * dt);
        rhs(models, &off, &x, u, &mut k1);
        tmp.iter_mut().enumerate().for_each(|(q, v)| *v = x[q] + 0.5 * dt * k1[q]);
        rhs(models, &off, &tmp, u, &mut k2);
        tmp.iter_mut().enumerate().for_each(|(q, v)| *v = x[q] + 0.5 * dt * k2[q]);
        rhs(models, &off, &tmp, u, &mut k3);
        tmp.iter_mut().enumerate().for_each(|(q, v)| *v = x[q] + dt * k3[q]);
        rhs(models, &off, &tmp, u, &mut k4);
        for q in 0..dim {
            x[q] += dt / 6.0 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
        }
        if !x.iter().all(|v| v.abs() <= BLOW_UP) {
            blow_up = true;
            break;
        }
        states.push(x.clone());
    }
    Ok(OdeTrajectory { dt, states, blow_up })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id() -> ScalarFn {
        ScalarFn::identity()
    }

    #[test]
    fn decoupled_exponential() {
        let m = vec![SubsystemModel::linear(1.0, vec![], 1.0, id())];
        let tr = simulate_network_ode(&m, &[1.0], &InputSignal::zero(1), 1.0, 1e-3).unwrap();
        assert_eq!(tr.states.len(), 1001);
        assert!((tr.states[1000][0] - (-1.0f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn equilibrium_stays_put() {
        let m: Vec<_> = (0..3).map(|i| SubsystemModel::linear(2.0, vec![((i + 1) % 3, 0.5)], 1.0, id())).collect();
        let tr = simulate_network_ode(&m, &[0.0; 3], &InputSignal::zero(3), 2.0, 1e-2).unwrap();
        assert!(tr.states.iter().all(|x| x.iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn constant_input_steady_state() {
        // ẋ = −2x + 1 settles at 1/2
        let m = vec![SubsystemModel::linear(2.0, vec![], 1.0, id())];
        let tr = simulate_network_ode(&m, &[0.0], &InputSignal::constant(vec![1.0]), 10.0, 1e-2).unwrap();
        assert!((tr.states.last().unwrap()[0] - 0.5).abs() < 1e-8);
    }

    #[test]
    fn blow_up_is_flagged() {
        let m = vec![SubsystemModel::linear(-50.0, vec![], 0.0, id())];
        let tr = simulate_network_ode(&m, &[1.0], &InputSignal::zero(1), 10.0, 1e-2).unwrap();
        assert!(tr.blow_up);
    }

    #[test]
    fn vector_nodes_and_validation() {
        let m = vec![
            SubsystemModel::linear(1.0, vec![(1, 0.1)], 0.0, id()).with_state_dim(2),
            SubsystemModel::linear(1.0, vec![], 0.0, id()).with_state_dim(2),
        ];
        assert_eq!(m[0].lyapunov(&[3.0, 4.0]), 5.0);
        assert!(simulate_network_ode(&m, &[1.0; 4], &InputSignal::zero(4), 1.0, 0.1).is_ok());
        let bad = vec![SubsystemModel::linear(1.0, vec![(0, 1.0)], 0.0, id())];
        assert!(validate_models(&bad, None).is_err());
    }

    #[test]
    fn inputs_are_right_continuous() {
        let u = InputSignal { mesh: 1.0, values: vec![vec![1.0], vec![-3.0]] };
        assert_eq!(u.at(0.999), &[1.0]);
        assert_eq!(u.at(1.0), &[-3.0]);
        assert_eq!(u.at(7.0), &[-3.0]);
        let m = vec![SubsystemModel::linear(1.0, vec![], 1.0, id())];
        assert_eq!(u.sup_norm(&m), 3.0);
        let r = InputSignal::random(2, 0.5, 0.1, 1.0, 4);
        assert_eq!(r.values.len(), 10);
        assert!(r.values.iter().flatten().all(|v| v.abs() <= 0.5));
    }
}
