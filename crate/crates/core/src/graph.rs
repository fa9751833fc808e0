//! Influence sets of the interconnection graph and structural predicates.
//!
//! `j` influences `i` in one step when `j ∈ Iᵢ`. The backward set `N⁻ᵢ(n)`
//! collects every node that reaches `i` by a chain of length `0..n-1`; the
//! forward set `N⁺ᵢ(n)` is the same relation transposed.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::NetworkSpec;
use crate::scalar::ScalarFn;

/// Longest reachability horizon the graph routines accept.
pub const MAX_HORIZON: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Backward,
    Forward,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InfluenceSets {
    pub node: usize,
    pub horizon: usize,
    pub backward: BTreeSet<usize>,
    pub forward: BTreeSet<usize>,
}

impl InfluenceSets {
    pub fn get(&self, direction: Direction) -> &BTreeSet<usize> {
        match direction {
            Direction::Backward => &self.backward,
            Direction::Forward => &self.forward,
        }
    }
}

/// Adjacency in both directions, built once per spec.
#[derive(Debug, Clone)]
pub struct InfluenceGraph {
    /// `pred[i] = Iᵢ`
    pred: Vec<Vec<usize>>,
    /// `succ[j] = {i : j ∈ Iᵢ}`
    succ: Vec<Vec<usize>>,
}

impl InfluenceGraph {
    pub fn new(spec: &NetworkSpec) -> Self {
        let n = spec.n();
        let pred: Vec<Vec<usize>> = (0..n).map(|i| spec.neighbors(i).to_vec()).collect();
        let mut succ = vec![Vec::new(); n];
        for (i, nb) in pred.iter().enumerate() {
            for &j in nb {
                succ[j].push(i);
            }
        }
        InfluenceGraph { pred, succ }
    }

    pub fn n(&self) -> usize {
        self.pred.len()
    }

    fn check(&self, i: usize, horizon: usize) -> Result<()> {
        if i >= self.n() {
            return Err(Error::IndexOutOfRange { index: i, n: self.n() });
        }
        check_horizon(horizon)
    }

    /// Depth-limited BFS from `i`; chains of length up to `horizon - 1`.
    fn reach(&self, adj: &[Vec<usize>], i: usize, horizon: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([i]);
        let mut queue = VecDeque::from([(i, 0usize)]);
        while let Some((v, depth)) = queue.pop_front() {
            if depth + 1 >= horizon {
                continue;
            }
            for &w in &adj[v] {
                if seen.insert(w) {
                    queue.push_back((w, depth + 1));
                }
            }
        }
        seen
    }

    pub fn backward(&self, i: usize, horizon: usize) -> Result<BTreeSet<usize>> {
        self.check(i, horizon)?;
        Ok(self.reach(&self.pred, i, horizon))
    }

    pub fn forward(&self, i: usize, horizon: usize) -> Result<BTreeSet<usize>> {
        self.check(i, horizon)?;
        Ok(self.reach(&self.succ, i, horizon))
    }

    pub fn sets(&self, i: usize, horizon: usize) -> Result<InfluenceSets> {
        Ok(InfluenceSets {
            node: i,
            horizon,
            backward: self.backward(i, horizon)?,
            forward: self.forward(i, horizon)?,
        })
    }
}

fn check_horizon(horizon: usize) -> Result<()> {
    if horizon == 0 {
        return Err(Error::Domain("horizon must be at least 1".into()));
    }
    if horizon > MAX_HORIZON {
        return Err(Error::Domain(format!("horizon {horizon} exceeds the cap {MAX_HORIZON}")));
    }
    Ok(())
}

pub fn neighbor_sets(spec: &NetworkSpec, i: usize, horizon: usize) -> Result<InfluenceSets> {
    InfluenceGraph::new(spec).sets(i, horizon)
}

/// `Bₙ = maxᵢ #N⁺ᵢ(n)`
pub fn influence_bound(spec: &NetworkSpec, horizon: usize) -> Result<usize> {
    check_horizon(horizon)?;
    let graph = InfluenceGraph::new(spec);
    let mut best = 0;
    for i in 0..spec.n() {
        best = best.max(graph.forward(i, horizon)?.len());
    }
    Ok(best)
}

/// True iff `(i, j)` carries a gain exactly when `(j, i)` does.
pub fn check_symmetry(spec: &NetworkSpec) -> bool {
    (0..spec.n()).all(|i| spec.neighbors(i).iter().all(|&j| spec.neighbors(j).contains(&i)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TechnicalReport {
    /// Slope of the linear candidate `ξ(t) = c·t` implied by the MAF kinds.
    pub xi_slope: f64,
    pub xi_ok: bool,
    /// `(i, j, t)` where `Γᵢ(t·eⱼ) < ξ(γᵢⱼ(t))`.
    pub xi_witness: Option<(usize, usize, f64)>,
    /// Grid samples `(t, minᵢⱼ γᵢⱼ(t))`.
    pub eta: Vec<(f64, f64)>,
    pub eta_ok: bool,
    /// `(t, η(t))` where `η` is not positive or not below the identity.
    pub eta_witness: Option<(f64, f64)>,
    /// Always "grid-certified": the check only covers the supplied grid.
    pub certification: &'static str,
}

/// Grid check of the standard technical assumptions: `Γᵢ(s) ≥ ξ(γᵢⱼ(sⱼ))` on
/// single-neighbor vectors, and `η = min γᵢⱼ` positive and below the identity.
pub fn check_standard_technical(spec: &NetworkSpec, grid: &[f64]) -> Result<TechnicalReport> {
    use crate::maf::Maf;
    use crate::operators::GainOperator;

    if grid.is_empty() || grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::Domain("grid must be nonempty and positive".into()));
    }
    let n = spec.n();
    let xi_slope = (0..n)
        .map(|i| match spec.maf(i) {
            Maf::WeightedSum { weights } => weights.iter().copied().fold(f64::INFINITY, f64::min),
            _ => 1.0,
        })
        .fold(1.0, f64::min);

    let mut xi_witness = None;
    let mut s = vec![0.0; n];
    let mut out = vec![0.0; n];
    'outer: for i in 0..n {
        for (j, g) in spec.edges(i) {
            for &t in grid {
                s[j] = t;
                spec.apply_into(&s, &mut out);
                s[j] = 0.0;
                let lower = xi_slope * g.eval(t);
                if out[i] < lower * (1.0 - 1e-14) {
                    xi_witness = Some((i, j, t));
                    break 'outer;
                }
            }
        }
    }

    let eta: Vec<(f64, f64)> = grid
        .iter()
        .map(|&t| (t, spec.all_gains().map(|(_, _, g)| g.eval(t)).fold(f64::INFINITY, f64::min)))
        .collect();
    let eta_witness = eta.iter().copied().find(|&(t, v)| !(v > 0.0 && v < t && v.is_finite()));

    Ok(TechnicalReport {
        xi_slope,
        xi_ok: xi_witness.is_none(),
        xi_witness,
        eta_ok: spec.edge_count() > 0 && eta_witness.is_none(),
        eta,
        eta_witness,
        certification: "grid-certified",
    })
}

/// `η` from [`check_standard_technical`] as a piecewise-linear function through
/// the grid samples, when it is strictly increasing there.
pub fn eta_function(report: &TechnicalReport) -> Option<ScalarFn> {
    let mut points = vec![(0.0, 0.0)];
    points.extend(report.eta.iter().copied());
    ScalarFn::piecewise_linear(points).ok()
}
