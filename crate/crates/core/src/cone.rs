//! Finite truncations of the positive cone of `ℓ∞`.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nonnegative vector with the sup-norm and the componentwise order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PlusVector(Vec<f64>);

impl TryFrom<Vec<f64>> for PlusVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        PlusVector::new(v)
    }
}

impl From<PlusVector> for Vec<f64> {
    fn from(v: PlusVector) -> Self {
        v.0
    }
}

impl Index<usize> for PlusVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl PlusVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::Domain(format!("entry {i} = {v} is not a finite nonnegative number")));
        }
        Ok(PlusVector(values))
    }

    /// Caller guarantees nonnegativity. Debug builds still check.
    pub(crate) fn from_vec(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| *v >= 0.0), "negative entry in {values:?}");
        PlusVector(values)
    }

    pub fn zeros(n: usize) -> Self {
        PlusVector(vec![0.0; n])
    }

    /// `c·𝟙`
    pub fn constant(n: usize, c: f64) -> Self {
        assert!(c >= 0.0, "constant vector needs c >= 0");
        PlusVector(vec![c; n])
    }

    /// Unit vector `eᵢ`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        PlusVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|v| *v == 0.0)
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &PlusVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Componentwise `self ≤ other + tol`.
    pub fn le_tol(&self, other: &PlusVector, tol: f64) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a <= b + tol)
    }

    /// `s¹ ⊕ s²`, the componentwise maximum.
    pub fn join(&self, other: &PlusVector) -> PlusVector {
        PlusVector(self.0.iter().zip(&other.0).map(|(a, b)| a.max(*b)).collect())
    }

    pub fn scale(&self, c: f64) -> PlusVector {
        assert!(c >= 0.0);
        PlusVector(self.0.iter().map(|v| v * c).collect())
    }

    pub fn add(&self, other: &PlusVector) -> PlusVector {
        PlusVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `‖self − other‖∞`
    pub fn dist(&self, other: &PlusVector) -> f64 {
        sup_dist(&self.0, &other.0)
    }
}

pub(crate) fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub(crate) fn sup_norm(a: &[f64]) -> f64 {
    a.iter().copied().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_and_join() {
        let a = PlusVector::new(vec![1.0, 3.0]).unwrap();
        let b = PlusVector::new(vec![2.0, 2.0]).unwrap();
        assert!(!a.le(&b) && !b.le(&a));
        assert_eq!(a.join(&b).as_slice(), &[2.0, 3.0]);
        assert_eq!(a.sup_norm(), 3.0);
        assert_eq!(a.dist(&b), 1.0);
    }

    #[test]
    fn rejects_negative_and_nan() {
        assert!(PlusVector::new(vec![1.0, -0.5]).is_err());
        assert!(PlusVector::new(vec![f64::NAN]).is_err());
        assert!(serde_json::from_str::<PlusVector>("[1,-1]").is_err());
    }
}
