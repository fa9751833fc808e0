mod common;

use proptest::prelude::*;

use common::*;
use decaypath::cone::PlusVector;
use decaypath::graph::InfluenceGraph;
use decaypath::io::{parse_network, serialize_network};
use decaypath::operators::{eval_gamma, eval_gamma_hat, eval_gamma_r, gamma_hat_power, gamma_power, project_pr};
use decaypath::path::{build_path_table, compute_sigma_star, PathMode};
use decaypath::stability::IterOptions;

fn leq(a: &PlusVector, b: &PlusVector, rel: f64) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| x <= y || *x <= y + rel * y.max(1.0))
}

fn close(a: &PlusVector, b: &PlusVector, rel: f64) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| x == y || (x - y).abs() <= rel * x.max(*y).max(1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gamma_is_monotone(seed in any::<u64>(), n in 1usize..12) {
        let mut r = rng(seed);
        let spec = random_mixed(&mut r, n);
        let s = random_point(&mut r, n);
        let t = s.add(&random_point(&mut r, n).scale(0.1));
        prop_assert!(eval_gamma(&spec, &s).unwrap().le(&eval_gamma(&spec, &t).unwrap()));
        prop_assert!(eval_gamma_hat(&spec, &s).unwrap().le(&eval_gamma_hat(&spec, &t).unwrap()));
    }

    #[test]
    fn augmented_recursion_and_sandwich(seed in any::<u64>(), n in 1usize..10, k in 1usize..12) {
        let mut r = rng(seed);
        let spec = random_mixed(&mut r, n);
        let s = random_point(&mut r, n);
        let prev = gamma_hat_power(&spec, &s, k - 1).unwrap();
        let expected = s.join(&eval_gamma(&spec, &prev).unwrap());
        let hat = gamma_hat_power(&spec, &s, k).unwrap();
        prop_assert!(close(&hat, &expected, 1e-14));
        let mut join = s.clone();
        for m in 1..=k {
            join = join.join(&gamma_power(&spec, &s, m).unwrap());
        }
        prop_assert!(leq(&join, &hat, 1e-14));
        prop_assert!(s.le(&hat));
    }

    #[test]
    fn max_type_collapse(seed in any::<u64>(), n in 1usize..10, k in 1usize..12) {
        let mut r = rng(seed);
        let spec = random_max_type(&mut r, n);
        let s = random_point(&mut r, n);
        let mut join = s.clone();
        for m in 1..=k {
            join = join.join(&gamma_power(&spec, &s, m).unwrap());
        }
        prop_assert_eq!(gamma_hat_power(&spec, &s, k).unwrap(), join);
    }

    #[test]
    fn projection_is_idempotent_and_nonexpansive(seed in any::<u64>(), n in 1usize..10, level in 0.0f64..5.0) {
        let mut r = rng(seed);
        let s = random_point(&mut r, n);
        let t = random_point(&mut r, n);
        let ps = project_pr(level, &s).unwrap();
        prop_assert_eq!(project_pr(level, &ps).unwrap(), ps.clone());
        prop_assert!(PlusVector::constant(n, level).le(&ps));
        prop_assert!(ps.dist(&project_pr(level, &t).unwrap()) <= s.dist(&t));
    }

    #[test]
    fn linear_sum_is_additive_and_homogeneous(seed in any::<u64>(), n in 1usize..10, c in 0.1f64..10.0) {
        let mut r = rng(seed);
        let spec = random_linear(&mut r, n, 0.8);
        let s = random_point(&mut r, n);
        let t = random_point(&mut r, n);
        let lhs = eval_gamma(&spec, &s.add(&t)).unwrap();
        let rhs = eval_gamma(&spec, &s).unwrap().add(&eval_gamma(&spec, &t).unwrap());
        prop_assert!(lhs.dist(&rhs) <= 1e-12 * rhs.sup_norm().max(1.0));
        let scaled = eval_gamma(&spec, &s.scale(c)).unwrap();
        prop_assert!(scaled.dist(&eval_gamma(&spec, &s).unwrap().scale(c)) <= 1e-12 * scaled.sup_norm().max(1.0));
    }

    #[test]
    fn sigma_star_is_a_monotone_fixed_point(seed in any::<u64>(), n in 1usize..8, target in 0.1f64..0.9) {
        let mut r = rng(seed);
        let spec = random_linear(&mut r, n, target);
        let opts = IterOptions::default();
        let mut prev = PlusVector::zeros(n);
        for level in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let s = compute_sigma_star(&spec, level, &opts).unwrap();
            let image = eval_gamma_r(&spec, level, &s).unwrap();
            prop_assert!(image.dist(&s) <= 1e-8 * s.sup_norm());
            prop_assert!(PlusVector::constant(n, level).le(&s));
            prop_assert!(prev.le(&s));
            prev = s;
        }
    }

    #[test]
    fn influence_sets_are_dual(seed in any::<u64>(), n in 1usize..12, h in 1usize..6) {
        let mut r = rng(seed);
        let spec = random_mixed(&mut r, n);
        let g = InfluenceGraph::new(&spec);
        // reach[a][b]: a path b -> ... -> a along "listens to" edges of length < h
        let mut reach: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
        for _ in 1..h {
            let mut next = reach.clone();
            for (row, out) in reach.iter().zip(next.iter_mut()) {
                for b in (0..n).filter(|&b| row[b]) {
                    for &c in spec.neighbors(b) {
                        out[c] = true;
                    }
                }
            }
            reach = next;
        }
        for (i, row) in reach.iter().enumerate() {
            let back = g.backward(i, h).unwrap();
            for (j, &reached) in row.iter().enumerate() {
                prop_assert_eq!(back.contains(&j), reached);
                prop_assert_eq!(g.forward(j, h).unwrap().contains(&i), reached);
            }
        }
    }

    #[test]
    fn network_files_round_trip(seed in any::<u64>(), n in 1usize..10) {
        let mut r = rng(seed);
        let spec = random_mixed(&mut r, n);
        let text = serialize_network(&spec).unwrap();
        let back = parse_network(&text).unwrap().spec(None).unwrap();
        for _ in 0..5 {
            let s = random_point(&mut r, n);
            prop_assert_eq!(eval_gamma(&spec, &s).unwrap(), eval_gamma(&back, &s).unwrap());
        }
    }

    #[test]
    fn table_inverse_undoes_eval(seed in any::<u64>(), n in 1usize..6, x in 0.01f64..0.99) {
        let mut r = rng(seed);
        let spec = random_linear(&mut r, n, 0.6);
        let grid = [0.1, 0.3, 1.0, 3.0, 10.0];
        let table = build_path_table(&spec, &grid, None, &IterOptions::default(), PathMode::SigmaStar).unwrap();
        let level = 0.1 + x * 9.9;
        for i in 0..n {
            let v = table.eval(i, level).unwrap().value;
            let back = table.inverse(i, v).unwrap().value;
            prop_assert!((back - level).abs() <= 1e-9 * level);
        }
    }
}
