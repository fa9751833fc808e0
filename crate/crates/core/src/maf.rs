//! Monotone aggregation functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum Maf {
    Max,
    Sum,
    /// One nonnegative weight per neighbor, in neighbor order.
    WeightedSum { weights: Vec<f64> },
    /// `(Σ vⱼ^p)^(1/p)` with `p ≥ 1`.
    PSum { p: f64 },
}

impl Maf {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Maf::Max => "max",
            Maf::Sum => "sum",
            Maf::WeightedSum { .. } => "weighted-sum",
            Maf::PSum { .. } => "p-sum",
        }
    }

    pub fn validate(&self, neighbor_count: usize) -> Result<()> {
        match self {
            Maf::Max | Maf::Sum => Ok(()),
            Maf::WeightedSum { weights } => {
                if weights.len() != neighbor_count {
                    return Err(Error::InvalidFunction(format!(
                        "weighted-sum has {} weights for {neighbor_count} neighbors",
                        weights.len()
                    )));
                }
                if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
                    return Err(Error::InvalidFunction(format!("negative or non-finite weight {w}")));
                }
                Ok(())
            }
            Maf::PSum { p } => {
                if p.is_finite() && *p >= 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidFunction(format!("p-sum needs p >= 1, got {p}")))
                }
            }
        }
    }

    /// Aggregates neighbor values given in neighbor order.
    #[inline]
    pub fn eval(&self, values: &[f64]) -> f64 {
        match self {
            Maf::Max => values.iter().copied().fold(0.0, f64::max),
            Maf::Sum => values.iter().sum(),
            Maf::WeightedSum { weights } => values.iter().zip(weights).map(|(v, w)| v * w).sum(),
            Maf::PSum { p } => {
                let peak = values.iter().copied().fold(0.0, f64::max);
                if peak == 0.0 || peak.is_infinite() {
                    return peak;
                }
                // scaled to avoid overflow in v^p
                let acc: f64 = values.iter().map(|v| (v / peak).powf(*p)).sum();
                peak * acc.powf(1.0 / p)
            }
        }
    }

    /// Like [`Maf::eval`] but sums are accumulated in a fixed order over an
    /// iterator, avoiding a scratch buffer.
    #[inline]
    pub fn eval_iter<I: Iterator<Item = f64> + Clone>(&self, values: I) -> f64 {
        match self {
            Maf::Max => values.fold(0.0, f64::max),
            Maf::Sum => values.sum(),
            Maf::WeightedSum { weights } => values.zip(weights).map(|(v, w)| v * w).sum(),
            Maf::PSum { p } => {
                let peak = values.clone().fold(0.0, f64::max);
                if peak == 0.0 || peak.is_infinite() {
                    return peak;
                }
                let acc: f64 = values.map(|v| (v / peak).powf(*p)).sum();
                peak * acc.powf(1.0 / p)
            }
        }
    }

    /// Homogeneous and subadditive MAFs: every kind in the family qualifies.
    pub fn is_homogeneous_subadditive(&self) -> bool {
        true
    }

    /// Sum-like MAFs turn linear gains into a nonnegative matrix.
    pub fn is_additive(&self) -> bool {
        matches!(self, Maf::Sum | Maf::WeightedSum { .. })
    }

    /// Coefficient of neighbor `k` when the MAF is additive.
    pub fn weight(&self, k: usize) -> f64 {
        match self {
            Maf::WeightedSum { weights } => weights[k],
            _ => 1.0,
        }
    }
}
