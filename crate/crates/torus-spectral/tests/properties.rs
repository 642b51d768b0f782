//! Property tests for the structural invariants: evenness and coercivity
//! of sampled forms, exactness of the shell identities, partition
//! stability of the arc classification, and the subdeterminant bands.

use num_rational::BigRational;
use proptest::prelude::*;
use torus_spectral::count::{mathcal_f, maximized_bound};
use torus_spectral::lattice::{
    count_points, enumerate_shell, shell_count, shell_count_direct, ShellQuery,
};
use torus_spectral::quadform::{GenericSampler, QuadForm, SamplerFamily};
use torus_spectral::subdet::{max_subdet_prefix_int, SubdetProfile};
use torus_spectral::util::rational_from_f64;
use torus_spectral::weyl::{classify_arc, dirichlet_approx, kernel_1d, ArcLabel};
use torus_spectral::CutoffSpec;

fn sampled_form(seed: u64, full: bool, d: usize) -> QuadForm {
    let family = if full {
        SamplerFamily::Full
    } else {
        SamplerFamily::Rectangular
    };
    GenericSampler::new(seed, family, d).form_at(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eval_even_and_coercive(
        seed in 0u64..500,
        full in any::<bool>(),
        n in prop::collection::vec(-20i64..=20, 2..=3),
    ) {
        let form = sampled_form(seed, full, n.len());
        let v = form.eval(&n).unwrap();
        let neg: Vec<i64> = n.iter().map(|x| -x).collect();
        prop_assert_eq!(v.clone(), form.eval(&neg).unwrap());
        let norm2: i64 = n.iter().map(|x| x * x).sum();
        let lower = BigRational::new((9 * norm2).into(), 10.into());
        prop_assert!(v >= lower);
    }

    #[test]
    fn count_monotone_and_odd(seed in 0u64..200, steps in 2usize..6) {
        let form = sampled_form(seed, seed % 2 == 0, 2);
        let mut prev = 0u128;
        for k in 1..=steps {
            let lambda = rational_from_f64(1.0 + 1.5 * k as f64);
            let n = count_points(&form, &lambda).unwrap();
            prop_assert!(n >= prev);
            prop_assert_eq!(n % 2, 1);
            prev = n;
        }
    }

    #[test]
    fn shell_identity_three_ways(
        seed in 0u64..300,
        lam_th in 1u32..60,
        del_th in 1u32..9,
    ) {
        let form = sampled_form(seed, seed % 2 == 1, 2);
        let lambda = rational_from_f64(2.0 + lam_th as f64 * 0.25);
        let delta = rational_from_f64(del_th as f64 * 0.05);
        let q = ShellQuery::new(&form, lambda.clone(), delta.clone()).unwrap();
        let diff = count_points(&form, &(&lambda + &delta)).unwrap()
            - count_points(&form, &(&lambda - &delta)).unwrap();
        prop_assert_eq!(diff, shell_count(&q).unwrap());
        prop_assert_eq!(diff, shell_count_direct(&q).unwrap());
        let pts = enumerate_shell(&q).unwrap();
        prop_assert_eq!(diff, pts.len() as u128);
        // lexicographic and symmetric
        for w in pts.windows(2) {
            prop_assert!(w[0] < w[1]);
        }
        for p in &pts {
            let neg: Vec<i64> = p.iter().map(|x| -x).collect();
            prop_assert!(pts.binary_search(&neg).is_ok());
        }
    }

    #[test]
    fn kernel_peak_at_origin(n_pow in 3u32..8, t in -2.0f64..2.0, y in 0.0f64..1.0) {
        let n = 1u64 << n_pow;
        let phi = CutoffSpec::smooth();
        let center = kernel_1d(n, 0.0, 0.0, &phi).norm();
        prop_assert!(kernel_1d(n, t, y, &phi).norm() <= center + 1e-9);
    }

    #[test]
    fn dirichlet_always_valid(t in -3.0f64..3.0, n_pow in 2u32..11) {
        let n = 1u64 << n_pow;
        let a = dirichlet_approx(t, n);
        prop_assert!(a.q >= 1 && a.q <= n);
        prop_assert!(a.err <= 1.0 / (a.q as f64 * n as f64) * (1.0 + 1e-9));
    }

    #[test]
    fn arc_labels_well_formed(t in 0.0f64..1.5, n_pow in 4u32..10) {
        let n = 1u64 << n_pow;
        let c0 = 0.125;
        match classify_arc(t, n, c0).unwrap() {
            ArcLabel::Lambda0 => prop_assert!(t.abs() <= 1.0 / n as f64),
            ArcLabel::Major { big_q, a, q } => {
                prop_assert!(a != 0);
                prop_assert!(big_q / 2 <= q && q < big_q);
                prop_assert!((big_q as f64) < c0 * n as f64);
                prop_assert!((t - a as f64 / q as f64).abs() <= 1.0 / (n as f64 * big_q as f64));
            }
            ArcLabel::Minor => {
                prop_assert!(t.abs() > 1.0 / n as f64);
            }
        }
    }

    #[test]
    fn subdet_band_and_prefix_monotone(
        seed in 0u64..400,
        p in 2usize..5,
        q in 2usize..6,
    ) {
        use rand::Rng;
        let mut rng = torus_spectral::util::rng_at(seed, 0xABCD, 0);
        let m: Vec<Vec<i64>> = (0..p)
            .map(|_| (0..q).map(|_| rng.gen_range(-6..=6)).collect())
            .collect();
        let prof = SubdetProfile::of_int(&m).unwrap();
        prop_assert!(prof.corollary_band_ok());
        for k in 1..=p.min(q) {
            let mut prev = 0i128;
            for l in k..=q {
                let v = max_subdet_prefix_int(&m, k, l).unwrap();
                prop_assert!(v >= prev);
                prev = v;
            }
            prop_assert_eq!(prev, prof.d_exact.as_ref().unwrap()[k - 1]);
        }
    }

    #[test]
    fn maximized_bound_monotone_in_delta(
        d in 1usize..4,
        b in 1usize..5,
        lam in 10.0f64..1e4,
    ) {
        let mut prev = 0.0;
        for i in 1..=12 {
            let delta = i as f64 / 13.0;
            let v = maximized_bound(d, b, lam, delta);
            prop_assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn mathcal_f_base_case(
        d in 1usize..4,
        b in 2usize..5,
        lam in 2.0f64..50.0,
    ) {
        // empty index sets and sub-threshold levels leave λ₀ Π μ_i
        let kmax = b.min(d + 1);
        let l = vec![0.0; kmax];
        let mu: Vec<f64> = (0..d).map(|i| 1.0 + i as f64).collect();
        let empty: Vec<Vec<usize>> = vec![vec![]; b - 1];
        let v = mathcal_f(&l, &mu, &empty, &empty, d, b, lam, 0.5).unwrap();
        let expect = lam * mu.iter().product::<f64>();
        prop_assert!((v - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn form_json_round_trip(seed in 0u64..300, d in 2usize..5, full in any::<bool>()) {
        let form = sampled_form(seed, full, d);
        let back = QuadForm::from_json(&form.to_json()).unwrap();
        for i in 0..d {
            for j in 0..d {
                prop_assert_eq!(form.coeff(i, j), back.coeff(i, j));
            }
        }
    }
}
