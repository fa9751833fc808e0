use serde::{Deserialize, Serialize};

use super::checks::{cone_distance, MBI_BLOWUP};
use super::trajectory::OperatorKind;
use crate::cone::{sup_norm, PlusVector};
use crate::operators::GainOperator;
use crate::scalar::ScalarFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Ugs,
    Ugas,
    Uges,
    Sgc,
    UniformSgc,
    Mbi,
    OplusMbi,
    MaxRobustSgc,
    PointOfDecay,
    OrderContraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Decided exactly (spectral radius, finite witness, exhaustive check).
    ExactPass,
    /// Sampling found no violation.
    NotFalsified,
    /// Neither decided nor falsified within budget.
    Inconclusive,
    /// Follows from another exact certificate through a known implication.
    ImpliedByTheorem,
    Falsified,
}

impl Verdict {
    pub fn is_failure(self) -> bool {
        self == Verdict::Falsified
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// Nonzero `s` with `Γ(s) ≥ s`.
    Point { s: PlusVector },
    /// `Γᵢ(s) > sᵢ + tol`.
    Index { s: PlusVector, index: usize },
    /// `s ≤ Γ(s) ⊕ b` with `‖s‖∞` beyond the blow-up level.
    Pair { s: PlusVector, b: PlusVector },
    /// `Γ(s) ⊕ ω(sⱼ)eᵢ ≥ s`.
    Robust { s: PlusVector, i: usize, j: usize, omega: ScalarFn },
    /// Start state whose trajectory crosses the divergence guard.
    Divergent { s0: PlusVector, operator: OperatorKind, steps: usize, guard: f64 },
    /// `Γᵏ(upper) − Γᵏ(lower)` does not contract.
    OrderedPair { lower: PlusVector, upper: PlusVector, k: usize },
    /// Positive `v` whose Collatz–Wielandt ratio `minᵢ Γᵢ(v)/vᵢ` is at least the threshold.
    Perron { v: PlusVector, threshold: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Estimate {
    /// Per-level samples and, when strictly increasing, the interpolating function.
    Envelope { levels: Vec<(f64, f64)>, function: Option<ScalarFn> },
    SpectralRadius { value: f64, lower: f64, upper: f64 },
    /// `‖Γᵏ‖ ≤ M γᵏ`.
    Uges { spectral_radius: f64, m: f64, gamma: f64 },
    /// First `k` with `‖Γᵏ(𝟙)‖∞ < 1`, or the smallest value seen.
    FiniteWitness { k: usize, norm: f64 },
    Contraction { k: usize, constant: f64, exact: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct Budget {
    pub samples: usize,
    pub iterations: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub property: Property,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<Estimate>,
    pub budget: Budget,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Certificate {
    pub fn new(property: Property, verdict: Verdict) -> Self {
        Certificate { property, verdict, witness: None, estimate: None, budget: Budget::default(), seed: None, note: None }
    }

    pub fn with_witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn with_estimate(mut self, e: Estimate) -> Self {
        self.estimate = Some(e);
        self
    }

    pub fn with_budget(mut self, b: Budget) -> Self {
        self.budget = b;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Re-checks the witness of a falsified certificate by direct evaluation.
    /// `None` when there is nothing to replay.
    pub fn replay<G: GainOperator>(&self, op: &G) -> Option<bool> {
        if self.verdict != Verdict::Falsified {
            return None;
        }
        let w = self.witness.as_ref()?;
        let tol = self.budget.tolerance;
        let n = op.dim();
        let mut out = vec![0.0; n];
        Some(match w {
            Witness::Point { s } => {
                s.len() == n && !s.is_zero() && {
                    op.apply_into(s.as_slice(), &mut out);
                    cone_distance(s.as_slice(), &out) <= tol * (1.0 + s.sup_norm())
                }
            }
            Witness::Index { s, index } => {
                s.len() == n && *index < n && {
                    op.apply_into(s.as_slice(), &mut out);
                    out[*index] > s[*index] + tol
                }
            }
            Witness::Pair { s, b } => {
                s.len() == n && b.len() == n && s.sup_norm() > MBI_BLOWUP && {
                    op.apply_into(s.as_slice(), &mut out);
                    s.iter().zip(&out).zip(b.iter()).all(|((si, gi), bi)| *si <= gi.max(*bi) * (1.0 + 1e-12) + tol)
                }
            }
            Witness::Robust { s, i, j, omega } => {
                s.len() == n && !s.is_zero() && *i < n && *j < n && {
                    op.apply_into(s.as_slice(), &mut out);
                    out[*i] = out[*i].max(omega.eval(s[*j]));
                    cone_distance(s.as_slice(), &out) <= tol * (1.0 + s.sup_norm())
                }
            }
            Witness::Divergent { s0, operator, steps, guard } => {
                s0.len() == n && {
                    let mut cur = s0.as_slice().to_vec();
                    let mut crossed = false;
                    for _ in 0..*steps {
                        operator.step(op, &cur, &mut out);
                        std::mem::swap(&mut cur, &mut out);
                        if !(sup_norm(&cur) <= *guard) {
                            crossed = true;
                            break;
                        }
                    }
                    crossed
                }
            }
            Witness::OrderedPair { lower, upper, k } => {
                lower.len() == n && upper.len() == n && lower.le(upper) && lower != upper && {
                    let mut a = lower.as_slice().to_vec();
                    let mut b = upper.as_slice().to_vec();
                    let mut tmp = vec![0.0; n];
                    for _ in 0..*k {
                        op.apply_into(&a, &mut tmp);
                        std::mem::swap(&mut a, &mut tmp);
                        op.apply_into(&b, &mut tmp);
                        std::mem::swap(&mut b, &mut tmp);
                    }
                    let num = crate::cone::sup_dist(&a, &b);
                    let den = lower.dist(upper);
                    num / den >= 1.0 - super::UGES_MARGIN
                }
            }
            Witness::Perron { v, threshold } => {
                v.len() == n && v.iter().all(|x| *x > 0.0) && {
                    op.apply_into(v.as_slice(), &mut out);
                    out.iter().zip(v.iter()).map(|(g, x)| g / x).fold(f64::INFINITY, f64::min) >= *threshold
                }
            }
        })
    }
}
