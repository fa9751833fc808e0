//! Network specifications: neighbor sets, gains, MAFs and translation-invariant
//! templates for truncation studies.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maf::Maf;
use crate::scalar::ScalarFn;

/// Validated finite network. Gains are stored per node in neighbor order, so
/// the neighbor set `Iᵢ` and the gain support coincide by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    neighbors: Vec<Vec<usize>>,
    gains: Vec<Vec<ScalarFn>>,
    mafs: Vec<Maf>,
    external: Vec<Option<ScalarFn>>,
    template: Option<Template>,
}

impl NetworkSpec {
    /// Builds a spec from separate neighbor lists and a gain map keyed by
    /// `(i, j)`. Every gain key must name a declared neighbor and every
    /// declared neighbor must carry a gain.
    pub fn from_parts(
        neighbors: Vec<Vec<usize>>,
        gains: BTreeMap<(usize, usize), ScalarFn>,
        mafs: Vec<Maf>,
        external: Vec<Option<ScalarFn>>,
    ) -> Result<Self> {
        let n = neighbors.len();
        if mafs.len() != n {
            return Err(Error::Dimension { expected: n, got: mafs.len() });
        }
        if external.len() != n {
            return Err(Error::Dimension { expected: n, got: external.len() });
        }
        for &(i, j) in gains.keys() {
            if i >= n || !neighbors[i].contains(&j) {
                return Err(Error::Structural { i, j, reason: format!("gain key ({i},{j}) but {j} is not a neighbor of {i}") });
            }
        }
        let mut ordered = Vec::with_capacity(n);
        for (i, nb) in neighbors.iter().enumerate() {
            let mut row = Vec::with_capacity(nb.len());
            for &j in nb {
                let g = gains.get(&(i, j)).ok_or_else(|| Error::Structural {
                    i,
                    j,
                    reason: format!("neighbor {j} of {i} has no gain"),
                })?;
                row.push(g.clone());
            }
            ordered.push(row);
        }
        Self::from_rows(neighbors, ordered, mafs, external)
    }

    /// Builds a spec from per-node `(j, γᵢⱼ)` rows.
    pub fn from_rows(
        neighbors: Vec<Vec<usize>>,
        gains: Vec<Vec<ScalarFn>>,
        mafs: Vec<Maf>,
        external: Vec<Option<ScalarFn>>,
    ) -> Result<Self> {
        let spec = NetworkSpec { neighbors, gains, mafs, external, template: None };
        spec.check_structure()?;
        Ok(spec)
    }

    fn check_structure(&self) -> Result<()> {
        let n = self.neighbors.len();
        if self.gains.len() != n || self.mafs.len() != n || self.external.len() != n {
            return Err(Error::Dimension { expected: n, got: self.gains.len().min(self.mafs.len()) });
        }
        for (i, nb) in self.neighbors.iter().enumerate() {
            if self.gains[i].len() != nb.len() {
                return Err(Error::Structural { i, j: i, reason: "gain row length differs from neighbor count".into() });
            }
            for (k, &j) in nb.iter().enumerate() {
                if j >= n {
                    return Err(Error::Structural { i, j, reason: format!("neighbor {j} out of range for {n} nodes") });
                }
                if j == i {
                    return Err(Error::Structural { i, j, reason: "self-loop".into() });
                }
                if nb[..k].contains(&j) {
                    return Err(Error::Structural { i, j, reason: "duplicate neighbor".into() });
                }
                self.gains[i][k]
                    .validate()
                    .map_err(|e| Error::Structural { i, j, reason: e.to_string() })?;
            }
            self.mafs[i]
                .validate(nb.len())
                .map_err(|e| Error::Structural { i, j: i, reason: e.to_string() })?;
            if let Some(g) = &self.external[i] {
                g.validate().map_err(|e| Error::Structural { i, j: i, reason: format!("external gain: {e}") })?;
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn gains_of(&self, i: usize) -> &[ScalarFn] {
        &self.gains[i]
    }

    /// `(j, γᵢⱼ)` pairs for node `i`.
    pub fn edges(&self, i: usize) -> impl Iterator<Item = (usize, &ScalarFn)> + Clone {
        self.neighbors[i].iter().copied().zip(self.gains[i].iter())
    }

    pub fn gain(&self, i: usize, j: usize) -> Option<&ScalarFn> {
        self.edges(i).find(|(k, _)| *k == j).map(|(_, g)| g)
    }

    pub fn all_gains(&self) -> impl Iterator<Item = (usize, usize, &ScalarFn)> {
        (0..self.n()).flat_map(move |i| self.edges(i).map(move |(j, g)| (i, j, g)))
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum()
    }

    pub fn maf(&self, i: usize) -> &Maf {
        &self.mafs[i]
    }

    pub fn external_gain(&self, i: usize) -> Option<&ScalarFn> {
        self.external[i].as_ref()
    }

    pub fn template(&self) -> Option<&Template> {
        self.template.as_ref()
    }

    pub fn is_max_type(&self) -> bool {
        self.mafs.iter().all(|m| matches!(m, Maf::Max))
    }

    pub fn is_sum_type(&self) -> bool {
        self.mafs.iter().all(|m| matches!(m, Maf::Sum))
    }

    /// Sum or weighted-sum MAFs everywhere.
    pub fn is_additive(&self) -> bool {
        self.mafs.iter().all(Maf::is_additive)
    }

    pub fn has_linear_gains(&self) -> bool {
        self.gains.iter().flatten().all(ScalarFn::is_linear)
    }

    /// Additive MAFs with linear gains: the operator is a nonnegative matrix.
    pub fn is_linear_operator(&self) -> bool {
        self.is_additive() && self.has_linear_gains()
    }

    pub fn is_subadditive_homogeneous(&self) -> bool {
        self.has_linear_gains() && self.mafs.iter().all(Maf::is_homogeneous_subadditive)
    }

    /// Row-major dense matrix `A` with `Γ(s) = A s`, when the operator is linear.
    pub fn linear_matrix(&self) -> Option<Vec<Vec<f64>>> {
        if !self.is_linear_operator() {
            return None;
        }
        let n = self.n();
        let mut a = vec![vec![0.0; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            for (k, (j, g)) in self.edges(i).enumerate() {
                row[j] += self.mafs[i].weight(k) * g.linear_slope().unwrap_or(0.0);
            }
        }
        Some(a)
    }

    /// Returns the spec with every gain `γ` replaced by `f(γ)`.
    pub fn map_gains(&self, mut f: impl FnMut(usize, usize, &ScalarFn) -> ScalarFn) -> Result<NetworkSpec> {
        let gains = (0..self.n())
            .map(|i| self.edges(i).map(|(j, g)| f(i, j, g)).collect())
            .collect();
        let mut spec =
            NetworkSpec::from_rows(self.neighbors.clone(), gains, self.mafs.clone(), self.external.clone())?;
        spec.template = None;
        Ok(spec)
    }

    pub(crate) fn with_template(mut self, template: Template) -> Self {
        self.template = Some(template);
        self
    }
}

/// Convenience builder used by tests, examples and the FFI layer.
#[derive(Debug, Clone, Default)]
pub struct NetworkBuilder {
    n: usize,
    edges: BTreeMap<(usize, usize), ScalarFn>,
    mafs: BTreeMap<usize, Maf>,
    external: BTreeMap<usize, ScalarFn>,
    default_maf: Option<Maf>,
}

impl NetworkBuilder {
    pub fn new(n: usize) -> Self {
        NetworkBuilder { n, ..Default::default() }
    }

    pub fn gain(mut self, i: usize, j: usize, g: ScalarFn) -> Self {
        self.edges.insert((i, j), g);
        self
    }

    pub fn maf(mut self, i: usize, m: Maf) -> Self {
        self.mafs.insert(i, m);
        self
    }

    pub fn all_mafs(mut self, m: Maf) -> Self {
        self.default_maf = Some(m);
        self
    }

    pub fn external(mut self, i: usize, g: ScalarFn) -> Self {
        self.external.insert(i, g);
        self
    }

    pub fn build(self) -> Result<NetworkSpec> {
        let mut neighbors = vec![Vec::new(); self.n];
        for &(i, j) in self.edges.keys() {
            if i >= self.n {
                return Err(Error::Structural { i, j, reason: format!("node {i} out of range") });
            }
            neighbors[i].push(j);
        }
        let default = self.default_maf.unwrap_or(Maf::Sum);
        let mafs = (0..self.n).map(|i| self.mafs.get(&i).cloned().unwrap_or_else(|| default.clone())).collect();
        let external = (0..self.n).map(|i| self.external.get(&i).cloned()).collect();
        NetworkSpec::from_parts(neighbors, self.edges, mafs, external)
    }
}

/// One band entry: node `i` listens to `i + offset` with gain `gain`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandEntry {
    pub offset: i64,
    pub gain: ScalarFn,
    /// Weight used when the template MAF is weighted-sum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

/// Translation-invariant band structure; expanding it at size `n` yields the
/// truncation to nodes `0..n` (neighbors outside the range are dropped).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Template {
    pub size: usize,
    pub maf: Maf,
    pub band: Vec<BandEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub external_gain: Option<ScalarFn>,
}

impl Template {
    pub fn expand(&self, size: usize) -> Result<NetworkSpec> {
        let mut neighbors = Vec::with_capacity(size);
        let mut gains = Vec::with_capacity(size);
        let mut mafs = Vec::with_capacity(size);
        let weighted = matches!(self.maf, Maf::WeightedSum { .. });
        for i in 0..size {
            let mut nb = Vec::new();
            let mut row = Vec::new();
            let mut weights = Vec::new();
            for entry in &self.band {
                if entry.offset == 0 {
                    return Err(Error::Structural { i, j: i, reason: "template band has offset 0 (self-loop)".into() });
                }
                let j = i as i64 + entry.offset;
                if j < 0 || j >= size as i64 {
                    continue;
                }
                nb.push(j as usize);
                row.push(entry.gain.clone());
                if weighted {
                    weights.push(entry.weight.ok_or_else(|| Error::Structural {
                        i,
                        j: j as usize,
                        reason: "weighted-sum template entry without weight".into(),
                    })?);
                }
            }
            neighbors.push(nb);
            gains.push(row);
            mafs.push(if weighted { Maf::WeightedSum { weights } } else { self.maf.clone() });
        }
        let external = vec![self.external_gain.clone(); size];
        let mut t = self.clone();
        t.size = size;
        Ok(NetworkSpec::from_rows(neighbors, gains, mafs, external)?.with_template(t))
    }

    pub fn is_symmetric_band(&self) -> bool {
        self.band.iter().all(|e| self.band.iter().any(|o| o.offset == -e.offset))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    /// `(R, supᵢ μᵢ(R·Σ_{j∈Iᵢ} eⱼ))`
    pub maf_bounds: Vec<(f64, f64)>,
    /// Samples `(t, maxᵢⱼ γᵢⱼ(t))` of the uniform gain envelope on `[0, 100]`,
    /// computed for templated specs.
    pub envelope: Option<Vec<(f64, f64)>>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

const MAF_PROBE_LEVELS: [f64; 3] = [1.0, 10.0, 100.0];

/// Runs the non-structural well-definedness checks on a spec. Structural
/// problems are rejected earlier, when the spec is constructed.
pub fn validate_network(spec: &NetworkSpec) -> ValidationReport {
    let mut checks = Vec::new();

    checks.push(match spec.check_structure() {
        Ok(()) => Check { name: "neighbor-sets", passed: true, detail: format!("{} nodes, {} edges", spec.n(), spec.edge_count()) },
        Err(e) => Check { name: "neighbor-sets", passed: false, detail: e.to_string() },
    });

    let bad_gain = spec.all_gains().find(|(_, _, g)| !g.class_tag().is_class_k());
    checks.push(match bad_gain {
        None => Check { name: "gain-class", passed: true, detail: "all gains are class K".into() },
        Some((i, j, g)) => Check { name: "gain-class", passed: false, detail: format!("gain ({i},{j}) = {g} is not class K") },
    });

    let mut maf_bounds = Vec::new();
    let mut finite = true;
    for r in MAF_PROBE_LEVELS {
        let sup = (0..spec.n())
            .map(|i| spec.maf(i).eval_iter(spec.neighbors(i).iter().map(|_| r)))
            .fold(0.0, f64::max);
        finite &= sup.is_finite();
        maf_bounds.push((r, sup));
    }
    checks.push(Check {
        name: "maf-finite",
        passed: finite,
        detail: maf_bounds.iter().map(|(r, v)| format!("R={r}: {v}")).collect::<Vec<_>>().join(", "),
    });

    let envelope = spec.template().map(|_| {
        let grid: Vec<f64> = (0..=200).map(|k| k as f64 * 0.5).collect();
        grid.iter()
            .map(|&t| (t, spec.all_gains().map(|(_, _, g)| g.eval(t)).fold(0.0, f64::max)))
            .collect::<Vec<_>>()
    });
    if let Some(env) = &envelope {
        let monotone = env.windows(2).all(|w| w[1].1 >= w[0].1);
        let positive = env.iter().skip(1).all(|(_, v)| *v > 0.0 && v.is_finite()) || spec.edge_count() == 0;
        let passed = env[0].1 == 0.0 && monotone && positive;
        checks.push(Check {
            name: "uniform-gain-envelope",
            passed,
            detail: format!("envelope on [0,100]: max value {}", env.last().map(|p| p.1).unwrap_or(0.0)),
        });
    }

    ValidationReport { checks, maf_bounds, envelope }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_node() -> NetworkSpec {
        NetworkBuilder::new(2)
            .gain(0, 1, ScalarFn::linear(2.0).unwrap())
            .gain(1, 0, ScalarFn::linear(0.125).unwrap())
            .build()
            .unwrap()
    }

    #[test]
    fn two_node_spec_passes_validation() {
        let report = validate_network(&two_node());
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.maf_bounds, vec![(1.0, 1.0), (10.0, 10.0), (100.0, 100.0)]);
        assert!(report.envelope.is_none());
    }

    #[test]
    fn dangling_gain_key_is_structural_error() {
        let mut gains = BTreeMap::new();
        gains.insert((0, 2), ScalarFn::identity());
        let err = NetworkSpec::from_parts(
            vec![vec![1], vec![], vec![]],
            gains,
            vec![Maf::Sum; 3],
            vec![None; 3],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Structural { i: 0, j: 2, .. }), "{err}");
    }

    #[test]
    fn self_loop_is_structural_error() {
        let err = NetworkBuilder::new(2).gain(1, 1, ScalarFn::identity()).build().unwrap_err();
        assert!(matches!(err, Error::Structural { i: 1, j: 1, .. }));
    }

    #[test]
    fn neighbor_without_gain_is_structural_error() {
        let err = NetworkSpec::from_parts(vec![vec![1], vec![]], BTreeMap::new(), vec![Maf::Sum; 2], vec![None; 2])
            .unwrap_err();
        assert!(matches!(err, Error::Structural { i: 0, j: 1, .. }));
    }

    #[test]
    fn zero_gain_fails_class_check() {
        let spec = NetworkBuilder::new(2).gain(0, 1, ScalarFn::Zero).build().unwrap();
        let report = validate_network(&spec);
        assert!(!report.passed());
        assert!(report.checks.iter().any(|c| c.name == "gain-class" && !c.passed));
    }

    #[test]
    fn templated_chain_envelope() {
        let t = Template {
            size: 100,
            maf: Maf::Sum,
            band: vec![
                BandEntry { offset: -1, gain: ScalarFn::linear(0.25).unwrap(), weight: None },
                BandEntry { offset: 1, gain: ScalarFn::linear(0.25).unwrap(), weight: None },
            ],
            external_gain: None,
        };
        let spec = t.expand(100).unwrap();
        assert_eq!(spec.n(), 100);
        assert_eq!(spec.neighbors(0), &[1]);
        assert_eq!(spec.neighbors(50), &[49, 51]);
        let report = validate_network(&spec);
        assert!(report.passed(), "{report:?}");
        // envelope oracle: max over all gains at each grid point, which is t/4 here
        for (t, v) in report.envelope.unwrap() {
            let oracle = spec.all_gains().map(|(_, _, g)| g.eval(t)).fold(0.0, f64::max);
            assert_eq!(v, oracle);
            assert_eq!(v, t / 4.0);
        }
    }

    #[test]
    fn weighted_template_keeps_surviving_weights() {
        let t = Template {
            size: 3,
            maf: Maf::WeightedSum { weights: vec![] },
            band: vec![
                BandEntry { offset: -1, gain: ScalarFn::identity(), weight: Some(0.5) },
                BandEntry { offset: 1, gain: ScalarFn::identity(), weight: Some(2.0) },
            ],
            external_gain: None,
        };
        let spec = t.expand(3).unwrap();
        assert_eq!(spec.maf(0), &Maf::WeightedSum { weights: vec![2.0] });
        assert_eq!(spec.maf(1), &Maf::WeightedSum { weights: vec![0.5, 2.0] });
        assert_eq!(spec.maf(2), &Maf::WeightedSum { weights: vec![0.5] });
    }

    #[test]
    fn linear_matrix_of_worked_example() {
        let a = two_node().linear_matrix().unwrap();
        assert_eq!(a, vec![vec![0.0, 2.0], vec![0.125, 0.0]]);
    }
}
