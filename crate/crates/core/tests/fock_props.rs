mod common;

use common::{gaussian_ish, random_ball_point, rng};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rkhs_core::fock::{self, MultiIndex, Polynomial, TruncatedSpace};

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `alpha! / |alpha|!` straight from factorials.
fn weight(alpha: &[u32]) -> f64 {
    alpha.iter().map(|&a| factorial(a)).product::<f64>() / factorial(alpha.iter().sum())
}

fn random_poly(g: &mut ChaCha8Rng, d: usize, max_deg: u32, terms: usize) -> Polynomial<Complex64> {
    let t = (0..terms).map(|_| {
        let mut e = vec![0u32; d];
        let mut budget = g.gen_range(0..=max_deg);
        for x in e.iter_mut() {
            let k = g.gen_range(0..=budget);
            *x = k;
            budget -= k;
        }
        (MultiIndex::new(e), gaussian_ish(g))
    });
    Polynomial::from_terms(d, t.collect::<Vec<_>>()).unwrap()
}

fn ip(p: &Polynomial<Complex64>, q: &Polynomial<Complex64>) -> Complex64 {
    fock::inner_product(p, q).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn parseval(seed in any::<u64>(), d in 1usize..=3) {
        let p = random_poly(&mut rng(seed), d, 6, 8);
        let want: f64 = p.terms().map(|(a, z)| z.norm_sqr() * weight(a.exponents())).sum();
        prop_assert!((p.norm_sq() - want).abs() <= 1e-12 * want.max(1.0));
        let space = TruncatedSpace::new(d, 6).unwrap();
        let u = space.coords(&p).unwrap();
        prop_assert!((u.norm_squared() - want).abs() <= 1e-12 * want.max(1.0));
        let back = space.polynomial(&u).unwrap();
        prop_assert!(back.sub(&p).unwrap().norm() <= 1e-12 * p.norm().max(1.0));
    }

    #[test]
    fn adjoint_relation(seed in any::<u64>(), d in 1usize..=3) {
        let mut g = rng(seed);
        let phi = random_poly(&mut g, d, 2, 3);
        let f = random_poly(&mut g, d, 6, 8);
        let window = 6usize.max(f.degree());
        let gdeg = (window - phi.degree()) as u32;
        let h = random_poly(&mut g, d, gdeg, 6);
        let adj = fock::mult_adjoint_apply(&phi, &f, window).unwrap();
        let lhs = ip(&phi.multiply(&h).unwrap(), &f);
        let rhs = ip(&h, &adj);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn truncated_kernel_reproduces(seed in any::<u64>(), d in 1usize..=3) {
        let mut g = rng(seed);
        let p = random_poly(&mut g, d, 7, 8);
        let y = random_ball_point(&mut g, d, 0.9);
        let k = fock::truncated_kernel_fn(&y, 7).unwrap().poly;
        let got = ip(&p, &k);
        let want = p.evaluate(&y).unwrap();
        prop_assert!((got - want).norm() <= 1e-12 * want.norm().max(1.0));
    }

    #[test]
    fn exact_and_float_products_agree(seed in any::<u64>(), d in 1usize..=2) {
        let mut g = rng(seed);
        let exact_poly = |g: &mut ChaCha8Rng| {
            let t: Vec<_> = (0..4).map(|_| {
                let e: Vec<u32> = (0..d).map(|_| g.gen_range(0..3)).collect();
                (MultiIndex::new(e), fock::exact((g.gen_range(-9..10), 7), (g.gen_range(-9..10), 5)))
            }).collect();
            Polynomial::from_terms(d, t).unwrap()
        };
        let (p, q) = (exact_poly(&mut g), exact_poly(&mut g));
        let exact = p.multiply(&q).unwrap();
        let float = p.to_numeric().multiply(&q.to_numeric()).unwrap();
        prop_assert!(exact.to_numeric().sub(&float).unwrap().norm() <= 1e-12 * float.norm().max(1.0));
        let n_exact = num_traits::ToPrimitive::to_f64(&exact.norm_sq_exact()).unwrap();
        prop_assert!((n_exact - float.norm_sq()).abs() <= 1e-12 * n_exact.max(1.0));
    }

    #[test]
    fn vanishing_split_is_orthogonal(seed in any::<u64>(), n in 1usize..=5) {
        let mut g = rng(seed);
        let pts: Vec<Vec<Complex64>> = (0..n).map(|_| random_ball_point(&mut g, 2, 0.8)).collect();
        let y = rkhs_core::kernels::PointSet::new(2, pts).unwrap();
        let split = fock::vanishing_subspace(&y, 5).unwrap();
        prop_assert_eq!(split.complement.dim(), n);
        prop_assert!(split.agreement <= 1e-9, "{}", split.agreement);
    }
}

#[test]
fn kernel_span_is_co_invariant() {
    // M_phi^* K(., y) = conj(phi(y)) K(., y) in the full space; inside the
    // window the relation holds for the part of K_N of degree <= N - deg phi.
    let mut g = rng(21);
    for _ in 0..30 {
        let y = random_ball_point(&mut g, 2, 0.6);
        let phi = random_poly(&mut g, 2, 2, 3);
        let n = 14;
        let k = fock::truncated_kernel_fn(&y, n).unwrap().poly;
        let adj = fock::mult_adjoint_apply(&phi, &k, n).unwrap();
        let low = k
            .truncate(n - phi.degree())
            .scale(&phi.evaluate(&y).unwrap().conj());
        let err = adj.sub(&low).unwrap().norm();
        assert!(err <= 1e-12 * low.norm().max(1.0), "{err}");
    }
}
