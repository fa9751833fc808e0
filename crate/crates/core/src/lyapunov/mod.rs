//! Subsystem ODE models, composite Lyapunov functions built from a path
//! table, decay checks along simulated trajectories and empirical ISS fits.

mod batch;
mod composite;
mod fit;
mod model;

pub use batch::{run_batch, BatchConfig, BatchReport};
pub use composite::{assemble_v, check_iss_decay, check_subsystem_decay, CompositeLyapunov, DecayReport, VValue};
pub use fit::{fit_iss_estimate, BetaBucket, IssFit, Measure, FIT_MARGIN};
pub use model::{simulate_network_ode, validate_models, Dynamics, InputSignal, OdeTrajectory, SubsystemModel, BLOW_UP};
