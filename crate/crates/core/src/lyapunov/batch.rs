use serde::{Deserialize, Serialize};

use super::composite::{check_iss_decay, check_subsystem_decay, CompositeLyapunov, DecayReport};
use super::fit::{fit_iss_estimate, IssFit, Measure};
use super::model::{simulate_network_ode, InputSignal, OdeTrajectory};
use crate::error::{Error, Result};
use crate::network::NetworkSpec;
use crate::sampling::Sampler;
use crate::scalar::ScalarFn;

/// Trajectory batch settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatchConfig {
    pub trajectories: usize,
    pub horizon: f64,
    pub dt: f64,
    /// Bound on `|uᵢ(t)|` for the random inputs.
    pub amplitude: f64,
    /// Width of the input hold cells.
    pub mesh: f64,
    /// `‖x₀‖∞` is log-uniform in `[x0_min, x0_max]`.
    pub x0_min: f64,
    pub x0_max: f64,
    /// Relative slack of the forward-difference decay test.
    pub decay_tol: f64,
    /// Samples per trajectory kept for the ISS fit.
    pub fit_samples: usize,
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig {
            trajectories: 100,
            horizon: 10.0,
            dt: 1e-3,
            amplitude: 0.5,
            mesh: 0.5,
            x0_min: 0.05,
            x0_max: 5.0,
            decay_tol: 1e-6,
            fit_samples: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchReport {
    pub trajectories: usize,
    pub blow_ups: usize,
    pub composite: DecayReport,
    pub subsystems: DecayReport,
    pub fit: IssFit,
}

impl BatchReport {
    pub fn passed(&self) -> bool {
        self.blow_ups == 0 && self.composite.violations == 0 && self.subsystems.violations == 0 && self.fit.pass
    }
}

fn thin(tr: &OdeTrajectory, keep: usize) -> OdeTrajectory {
    let stride = (tr.states.len() / keep.max(1)).max(1);
    OdeTrajectory {
        dt: tr.dt * stride as f64,
        states: tr.states.iter().step_by(stride).cloned().collect(),
        blow_up: tr.blow_up,
    }
}

/// Simulates a batch and runs the composite decay check, the per-node
/// implication check and the ISS fit on it. Trajectories come in pairs
/// alternating zero and bounded random inputs, so that both the training
/// (even) and validation (odd) halves of the fit see each kind.
pub fn run_batch(
    v: &CompositeLyapunov,
    spec: &NetworkSpec,
    alpha: &ScalarFn,
    cfg: &BatchConfig,
    seed: u64,
) -> Result<BatchReport> {
    if cfg.trajectories == 0 || !(cfg.x0_min > 0.0 && cfg.x0_max >= cfg.x0_min && cfg.amplitude >= 0.0) {
        return Err(Error::Domain("batch needs trajectories ≥ 1, 0 < x0_min ≤ x0_max and amplitude ≥ 0".into()));
    }
    let models = v.models();
    let dim = v.state_dim();
    let mut sampler = Sampler::new(seed);
    let mut composite = DecayReport::empty();
    let mut subsystems = DecayReport::empty();
    let mut kept = Vec::with_capacity(cfg.trajectories);
    let mut blow_ups = 0;
    for k in 0..cfg.trajectories {
        let scale = cfg.x0_min * (cfg.x0_max / cfg.x0_min).powf(sampler.unit());
        let mut x0: Vec<f64> = (0..dim).map(|_| 2.0 * sampler.unit() - 1.0).collect();
        let m = x0.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        if m > 0.0 {
            x0.iter_mut().for_each(|x| *x *= scale / m);
        }
        let input_seed = seed.wrapping_add(1 + k as u64);
        let input = if (k / 2) % 2 == 0 || cfg.amplitude == 0.0 {
            InputSignal::zero(dim)
        } else {
            InputSignal::random(dim, cfg.amplitude, cfg.mesh, cfg.horizon, input_seed)
        };
        let tr = simulate_network_ode(models, &x0, &input, cfg.horizon, cfg.dt)?;
        if tr.blow_up {
            blow_ups += 1;
        }
        composite.merge(&check_iss_decay(&tr, v, &input, alpha, cfg.decay_tol)?);
        subsystems.merge(&check_subsystem_decay(&tr, models, spec, &input, cfg.decay_tol)?);
        kept.push((thin(&tr, cfg.fit_samples), input));
    }
    let fit = fit_iss_estimate(&kept, Measure::Norm(models))?;
    Ok(BatchReport { trajectories: cfg.trajectories, blow_ups, composite, subsystems, fit })
}
