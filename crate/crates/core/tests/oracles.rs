//! Bounds against brute-force oracles on small instances.

use proptest::prelude::*;
use scpbound::bounds::{first_moment_bound, homogeneous_bound_certified, hypergeometric_first_moment_bound};
use scpbound::decomp::{decomposed_bound, independent_blocks_bound, make_decomposition, Variant};
use scpbound::gen::{BlockParams, GenSpec, Model, SeededRng};
use scpbound::refine::{bonferroni_bound, bonferroni_condition};
use scpbound::{verify_cover, BinaryMatrix};

/// All `k`-subsets of `0..n` as bit masks.
fn subsets(n: usize, k: usize) -> Vec<u32> {
    (0u32..1 << n).filter(|s| s.count_ones() as usize == k).collect()
}

fn row_mask(a: &BinaryMatrix, i: usize) -> u32 {
    (0..a.cols()).filter(|&j| a.get(i, j)).fold(0, |acc, j| acc | 1 << j)
}

fn optimum(a: &BinaryMatrix) -> Option<usize> {
    let rows: Vec<u32> = (0..a.rows()).map(|i| row_mask(a, i)).collect();
    (0..=a.cols()).find(|&k| subsets(a.cols(), k).iter().any(|s| rows.iter().all(|r| r & s != 0)))
}

fn instance(model: Model, m: usize, n: usize, delta: f64, seed: u64) -> BinaryMatrix {
    let spec = match model {
        Model::Planted => {
            let d = delta.min(0.45);
            GenSpec::planted(m, n, BlockParams { d1: 2.0 * d, d2: d / 3.0, d3: d / 3.0, d4: 2.0 * d, mu: 0.0, nu: 0.0 }, seed)
        }
        _ => GenSpec { model, m, n, delta, blocks: None, seed },
    };
    spec.generate().unwrap().matrix
}

fn model_strategy() -> impl Strategy<Value = Model> {
    prop_oneof![Just(Model::ConstantDensity), Just(Model::Karp), Just(Model::Planted)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn sound_bounds_dominate_the_optimum(
        model in model_strategy(),
        m in 3usize..=10,
        n in 4usize..=12,
        delta in prop::sample::select(vec![0.2, 0.4, 0.6]),
        seed in any::<u64>(),
    ) {
        let a = instance(model, m, n, delta, seed);
        let Some(opt) = optimum(&a) else {
            prop_assert!(a.first_zero_row().is_some());
            return Ok(());
        };
        let p = a.row_profile();
        let mut sound = vec![
            first_moment_bound::<f64>(&p).unwrap().k,
            hypergeometric_first_moment_bound::<f64>(&p).unwrap().k,
            homogeneous_bound_certified::<f64>(&p).unwrap().certified.k,
            bonferroni_bound::<f64>(&a).unwrap().k,
        ];
        let dec = make_decomposition::<f64>(&a, m / 2, n / 2).unwrap();
        if let Ok(b) = decomposed_bound(&dec, Variant::Sound) {
            if b.feasible {
                sound.push(Some(b.total));
            }
        }
        if let Ok(Some(b)) = independent_blocks_bound(&dec, Variant::Sound) {
            if b.feasible {
                sound.push(Some(b.total));
            }
        }
        for k in sound.into_iter().flatten() {
            prop_assert!(opt <= k, "optimum {} above bound {}", opt, k);
        }
    }

    #[test]
    fn bonferroni_sums_match_subset_enumeration(
        m in 1usize..=5,
        n in 1usize..=8,
        delta in 0.1f64..0.8,
        seed in any::<u64>(),
        kk in 1usize..=8,
    ) {
        let a = instance(Model::ConstantDensity, m, n, delta, seed);
        prop_assume!(a.first_zero_row().is_none());
        let k = kk.min(n);
        let rows: Vec<u32> = (0..m).map(|i| row_mask(&a, i)).collect();
        let all = subsets(n, k);
        let misses = |set: &[usize]| all.iter().filter(|&&s| set.iter().all(|&i| rows[i] & s == 0)).count() as f64;
        let mut s = [0.0f64; 3];
        let mut union = 0.0;
        for i in 0..m {
            s[0] += misses(&[i]);
            for j in i + 1..m {
                s[1] += misses(&[i, j]);
                for l in j + 1..m {
                    s[2] += misses(&[i, j, l]);
                }
            }
        }
        for &sub in &all {
            if rows.iter().any(|r| r & sub == 0) {
                union += 1.0;
            }
        }
        let w = bonferroni_condition::<f64>(&a, k).unwrap();
        for (got, want) in [w.s1, w.s2, w.s3].into_iter().zip(s) {
            if want == 0.0 {
                prop_assert_eq!(got, f64::NEG_INFINITY);
            } else {
                prop_assert!((got.exp() - want).abs() <= 1e-9 * want, "{} vs {}", got.exp(), want);
            }
        }
        prop_assert!((w.rhs.exp() - all.len() as f64).abs() <= 1e-9 * all.len() as f64);
        // third-order truncation over-estimates the union
        let total = all.len() as f64;
        prop_assert!(w.normalized() >= union / total - 1e-12);
        prop_assert_eq!(w.satisfied, s[0] + s[2] < total + s[1]);
        if w.satisfied {
            prop_assert!(all.iter().any(|&sub| rows.iter().all(|r| r & sub != 0)));
        }
    }
}

#[test]
fn bonferroni_upper_bounds_monte_carlo_union_probability() {
    let (m, n, k) = (30usize, 40usize, 12usize);
    let a = instance(Model::ConstantDensity, m, n, 0.15, 3);
    assert!(a.first_zero_row().is_none());
    let w = bonferroni_condition::<f64>(&a, k).unwrap();
    let rows: Vec<Vec<usize>> = (0..m).map(|i| a.row_support(i)).collect();
    let mut rng = SeededRng::new(99);
    let trials = 100_000;
    let mut hits = 0usize;
    let mut cols: Vec<usize> = (0..n).collect();
    let mut chosen = vec![false; n];
    for _ in 0..trials {
        chosen.iter_mut().for_each(|c| *c = false);
        for p in 0..k {
            let q = p + rng.below((n - p) as u64) as usize;
            cols.swap(p, q);
            chosen[cols[p]] = true;
        }
        if rows.iter().any(|r| r.iter().all(|&j| !chosen[j])) {
            hits += 1;
        }
    }
    let p = hits as f64 / trials as f64;
    let se = (p * (1.0 - p) / trials as f64).sqrt().max(1.0 / trials as f64);
    assert!(w.normalized() >= p - 3.0 * se, "S1-S2+S3 = {} below estimate {p}", w.normalized());
}

#[test]
fn sound_decomposed_bound_is_realised_by_a_split_cover() {
    // k1 columns from the left part and k2 from the right must cover
    let spec = GenSpec::planted(10, 12, BlockParams { d1: 0.8, d2: 0.1, d3: 0.1, d4: 0.8, mu: 0.0, nu: 0.0 }, 8);
    let mut checked = 0;
    for seed in 0..20 {
        let a = GenSpec { seed, ..spec.clone() }.generate().unwrap().matrix;
        if a.first_zero_row().is_some() {
            continue;
        }
        let dec = make_decomposition::<f64>(&a, 5, 6).unwrap();
        let b = decomposed_bound(&dec, Variant::Sound).unwrap();
        if !b.feasible {
            continue;
        }
        let found = subsets(6, b.k1).iter().any(|&l| {
            subsets(6, b.k2).iter().any(|&r| {
                let cols: Vec<usize> = (0..6).filter(|j| l >> j & 1 == 1).chain((0..6).filter(|j| r >> j & 1 == 1).map(|j| j + 6)).collect();
                verify_cover(&a, &cols).unwrap()
            })
        });
        assert!(found, "seed {seed}: no cover with k1 = {}, k2 = {}", b.k1, b.k2);
        checked += 1;
    }
    assert!(checked >= 10, "only {checked} feasible instances");
}
