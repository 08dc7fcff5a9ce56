use proptest::prelude::*;
use scpbound::bounds::{first_moment_bound, homogeneous_bound_certified, hypergeometric_first_moment_bound};
use scpbound::decomp::{
    alpha_star, decomposed_bound, make_decomposition, solve_two_block, two_block_total, BlockDensities, Budget, Variant,
};
use scpbound::gen::{random_permutation, BlockParams, GenSpec};
use scpbound::refine::bonferroni_bound;

/// Valid quadruples: `d1 > d2`, `d4 > d3`, positive determinant.
fn quadruple() -> impl Strategy<Value = BlockDensities<f64>> {
    (0.05f64..0.95, 0.0f64..1.0, 0.05f64..0.95, 0.0f64..1.0).prop_filter_map("ordering", |(d1, f2, d4, f3)| {
        let (d2, d3) = (d1 * f2 * 0.95, d4 * f3 * 0.95);
        let l = |d: f64| -(1.0 - d).ln();
        (d1 > d2 && d4 > d3 && l(d1) * l(d4) > l(d2) * l(d3)).then(|| BlockDensities::new(d1, d2, d3, d4))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn optimal_alpha_minimises_the_real_total(dens in quadruple(), mu in -0.5f64..0.5, m in 10usize..100_000) {
        let m = m as f64;
        let a = alpha_star(&dens).unwrap();
        let at = two_block_total(m, mu, &dens, Budget::Optimal).unwrap();
        for b in [a - 0.01, a + 0.01] {
            let b = b.clamp(1e-6, 1.0 - 1e-6);
            let other = two_block_total(m, mu, &dens, Budget::Fixed(b)).unwrap();
            prop_assert!(at <= other + 1e-9, "alpha* {} gives {}, alpha {} gives {}", a, at, b, other);
        }
    }

    #[test]
    fn real_solution_splits_the_budget(dens in quadruple(), top in 1.0f64..5000.0, bottom in 1.0f64..5000.0) {
        let s = solve_two_block(top, bottom, &dens, Budget::Optimal).unwrap();
        let miss_top = top * (1.0 - dens.d1).powf(s.k1) * (1.0 - dens.d2).powf(s.k2);
        let miss_bottom = bottom * (1.0 - dens.d3).powf(s.k1) * (1.0 - dens.d4).powf(s.k2);
        prop_assert!((miss_top - s.alpha).abs() < 1e-8);
        prop_assert!((miss_bottom - (1.0 - s.alpha)).abs() < 1e-8);
    }

    #[test]
    fn feasible_integer_lift_satisfies_the_condition(
        m in 6usize..60,
        n in 6usize..60,
        d in 0.1f64..0.45,
        eps in 0.0f64..0.1,
        seed in any::<u64>(),
    ) {
        let spec = GenSpec::planted(m, n, BlockParams::bordered(d, eps.min(d * 0.9)), seed);
        let g = spec.generate().unwrap();
        let (r, c) = g.split.unwrap();
        prop_assume!(g.matrix.first_zero_row().is_none());
        let dec = make_decomposition::<f64>(&g.matrix, r, c).unwrap();
        let sound = decomposed_bound(&dec, Variant::Sound);
        let literal = decomposed_bound(&dec, Variant::Literal);
        if let Ok(b) = &sound {
            if b.feasible {
                let q = b.densities;
                let lhs = r as f64 * (1.0 - q.d1).powi(b.k1 as i32) * (1.0 - q.d2).powi(b.k2 as i32)
                    + (m - r) as f64 * (1.0 - q.d3).powi(b.k1 as i32) * (1.0 - q.d4).powi(b.k2 as i32);
                prop_assert!(lhs < 1.0, "lhs = {}", lhs);
                prop_assert!(b.k1 <= c && b.k2 <= n - c);
                // every row's miss probability is dominated by its block minimum
                for i in 0..m {
                    let row = g.matrix.row_support(i);
                    let left = row.iter().filter(|&&j| j < c).count() as f64 / c as f64;
                    let right = row.iter().filter(|&&j| j >= c).count() as f64 / (n - c) as f64;
                    let (a, bb) = if i < r { (q.d1, q.d2) } else { (q.d3, q.d4) };
                    prop_assert!(left >= a - 1e-12 && right >= bb - 1e-12);
                }
            }
        }
        if let (Ok(s), Ok(l)) = (&sound, &literal) {
            if s.feasible && l.feasible {
                prop_assert!(s.total >= l.total);
            }
        }
    }

    #[test]
    fn bounds_are_bit_identical_under_permutation(
        m in 2usize..40,
        n in 2usize..40,
        delta in 0.1f64..0.7,
        seed in any::<u64>(),
        pseed in any::<u64>(),
    ) {
        let a = GenSpec::constant_density(m, n, delta, seed).generate().unwrap().matrix;
        prop_assume!(a.first_zero_row().is_none());
        let b = a.permute(&random_permutation(m, pseed), &random_permutation(n, pseed ^ 1)).unwrap();
        let (pa, pb) = (a.row_profile(), b.row_profile());
        prop_assert_eq!(first_moment_bound::<f64>(&pa).unwrap(), first_moment_bound::<f64>(&pb).unwrap());
        prop_assert_eq!(
            hypergeometric_first_moment_bound::<f64>(&pa).unwrap(),
            hypergeometric_first_moment_bound::<f64>(&pb).unwrap()
        );
        prop_assert_eq!(homogeneous_bound_certified::<f64>(&pa).unwrap(), homogeneous_bound_certified::<f64>(&pb).unwrap());
        prop_assert_eq!(bonferroni_bound::<f64>(&a).unwrap(), bonferroni_bound::<f64>(&b).unwrap());
    }

    #[test]
    fn single_precision_agrees_on_small_instances(
        m in 2usize..30,
        n in 2usize..30,
        delta in 0.1f64..0.7,
        seed in any::<u64>(),
    ) {
        let a = GenSpec::constant_density(m, n, delta, seed).generate().unwrap().matrix;
        prop_assume!(a.first_zero_row().is_none());
        let p = a.row_profile();
        let k64 = first_moment_bound::<f64>(&p).unwrap().k;
        let k32 = first_moment_bound::<f32>(&p).unwrap().k;
        // the wider f32 guard band can only push the answer up, by at most one
        match (k64, k32) {
            (Some(x), Some(y)) => prop_assert!(y == x || y == x + 1),
            (None, None) => {}
            (Some(x), None) => prop_assert_eq!(x, n),
            (None, Some(_)) => prop_assert!(false, "f32 found a bound f64 did not"),
        }
    }
}
