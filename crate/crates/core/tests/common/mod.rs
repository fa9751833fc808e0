#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use decaypath::cone::PlusVector;
use decaypath::maf::Maf;
use decaypath::network::{NetworkBuilder, NetworkSpec};
use decaypath::scalar::ScalarFn;
use decaypath::stability::spectral_radius;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn worked() -> NetworkSpec {
    NetworkBuilder::new(2)
        .gain(0, 1, ScalarFn::linear(2.0).unwrap())
        .gain(1, 0, ScalarFn::linear(0.125).unwrap())
        .build()
        .unwrap()
}

pub fn power_pair() -> NetworkSpec {
    NetworkBuilder::new(2)
        .gain(0, 1, ScalarFn::power(0.5, 0.5).unwrap())
        .gain(1, 0, ScalarFn::power(1.0, 2.0).unwrap())
        .build()
        .unwrap()
}

pub fn identity_max() -> NetworkSpec {
    NetworkBuilder::new(2)
        .all_mafs(Maf::Max)
        .gain(0, 1, ScalarFn::identity())
        .gain(1, 0, ScalarFn::identity())
        .build()
        .unwrap()
}

pub fn random_gain(rng: &mut ChaCha8Rng) -> ScalarFn {
    match rng.random_range(0..3) {
        0 => ScalarFn::linear(rng.random_range(0.05..1.5)).unwrap(),
        1 => ScalarFn::power(rng.random_range(0.05..1.5), rng.random_range(0.3..2.5)).unwrap(),
        _ => {
            let mut pts = vec![(0.0, 0.0)];
            let (mut x, mut y) = (0.0, 0.0);
            for _ in 0..rng.random_range(1..5) {
                x += rng.random_range(0.1..2.0);
                y += rng.random_range(0.05..2.0);
                pts.push((x, y));
            }
            ScalarFn::piecewise_linear(pts).unwrap()
        }
    }
}

pub fn random_maf(rng: &mut ChaCha8Rng, degree: usize) -> Maf {
    match rng.random_range(0..4) {
        0 => Maf::Max,
        1 => Maf::Sum,
        2 => Maf::WeightedSum { weights: (0..degree).map(|_| rng.random_range(0.1..1.0)).collect() },
        _ => Maf::PSum { p: rng.random_range(1.0..4.0) },
    }
}

/// Random graph on `n` nodes with edge density `p` and no self-loops.
fn edges(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<Vec<usize>> {
    (0..n).map(|i| (0..n).filter(|&j| j != i && rng.random_bool(p)).collect()).collect()
}

pub fn random_mixed(rng: &mut ChaCha8Rng, n: usize) -> NetworkSpec {
    let mut b = NetworkBuilder::new(n);
    for (i, row) in edges(rng, n, 0.3).into_iter().enumerate() {
        let maf = random_maf(rng, row.len());
        b = b.maf(i, maf);
        for j in row {
            b = b.gain(i, j, random_gain(rng));
        }
    }
    b.build().unwrap()
}

pub fn random_max_type(rng: &mut ChaCha8Rng, n: usize) -> NetworkSpec {
    let mut b = NetworkBuilder::new(n).all_mafs(Maf::Max);
    for (i, row) in edges(rng, n, 0.3).into_iter().enumerate() {
        for j in row {
            b = b.gain(i, j, random_gain(rng));
        }
    }
    b.build().unwrap()
}

/// Sum-type network with linear gains, rescaled to spectral radius `target`.
/// A ring through all nodes keeps the radius positive for `n ≥ 2`; a random
/// diagonal similarity `DΓD⁻¹` spreads the row sums without changing it.
pub fn random_linear(rng: &mut ChaCha8Rng, n: usize, target: f64) -> NetworkSpec {
    let mut b = NetworkBuilder::new(n);
    let d: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.random_range(-1.0..1.0))).collect();
    for (i, mut row) in edges(rng, n, 0.5).into_iter().enumerate() {
        if n > 1 && !row.contains(&((i + 1) % n)) {
            row.push((i + 1) % n);
        }
        for j in row {
            b = b.gain(i, j, ScalarFn::linear(rng.random_range(0.1..1.0) * d[i] / d[j]).unwrap());
        }
    }
    let spec = b.build().unwrap();
    let rho = spectral_radius(&spec).value;
    if rho == 0.0 {
        return spec;
    }
    let k = target / rho;
    spec.map_gains(|_, _, g| ScalarFn::linear(g.linear_slope().unwrap() * k).unwrap()).unwrap()
}

pub fn random_point(rng: &mut ChaCha8Rng, n: usize) -> PlusVector {
    PlusVector::new((0..n).map(|_| 10f64.powf(rng.random_range(-2.0..2.0))).collect()).unwrap()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}
