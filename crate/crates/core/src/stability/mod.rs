//! Discrete-time trajectories of the operator systems and certification or
//! falsification of stability and small-gain properties.

mod certificate;
mod checks;
mod fixed_points;
mod linear;
mod trajectory;

pub use certificate::{Budget, Certificate, Estimate, Property, Verdict, Witness};
pub use checks::{
    check_decay_index, check_max_robust_sgc, check_point_of_decay, check_sgc_sample, cone_distance,
    estimate_oplus_mbi_phi, estimate_ugs_phi, estimate_uniform_sgc_eta, replay_as_mbi, DecayIndex,
    MBI_BLOWUP, OPLUS_MBI_START,
};
pub use fixed_points::{enumerate_fixed_points_sumtype, FixedPointSet, MAX_ENUMERATION_NODES};
pub use linear::{
    certify_homogeneous, certify_mbi_via_uges, certify_uges_linear, spectral_radius, SpectralEstimate,
    UGES_MARGIN,
};
pub use trajectory::{compute_qhat, iterate_limit, simulate, Outcome, OperatorKind, Trajectory};

use serde::{Deserialize, Serialize};

/// Iteration controls shared by every fixed-point and trajectory routine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterOptions {
    /// Sup-norm step size at which an iteration counts as converged.
    pub tol: f64,
    pub kmax: usize,
    /// Divergence guard on the sup-norm of the state.
    pub guard: f64,
}

impl Default for IterOptions {
    fn default() -> Self {
        IterOptions { tol: 1e-10, kmax: 100_000, guard: 1e12 }
    }
}

impl IterOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_kmax(mut self, kmax: usize) -> Self {
        self.kmax = kmax;
        self
    }
}
