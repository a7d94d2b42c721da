mod common;

use std::f64::consts::TAU;

use common::{c, gaussian_ish, random_ball_point, rng};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rkhs_core::kernels::{self, KernelSpec, PointSet};
use rkhs_core::linalg::{self, HermitianMatrix};
use rkhs_core::pick::{self, PickProblem};

fn random_points(seed: u64, n: usize, d: usize, max_norm: f64) -> PointSet {
    let mut g = rng(seed);
    PointSet::new(
        d,
        (0..n)
            .map(|_| random_ball_point(&mut g, d, max_norm))
            .collect(),
    )
    .unwrap()
}

fn disk_problem(seed: u64, n: usize) -> PickProblem {
    let mut g = rng(seed);
    let pts = random_points(seed, n, 1, 0.8);
    let targets = (0..n).map(|_| gaussian_ish(&mut g) * 0.7).collect();
    PickProblem::new(KernelSpec::szego(200), pts, targets).unwrap()
}

/// `P = [[a, b], [conj(b), d]]` is PSD iff `a, d >= 0` and `ad >= |b|^2`.
fn two_by_two_psd(t: f64, z: [Complex64; 2], w: [Complex64; 2]) -> bool {
    let k = |x: Complex64, y: Complex64| (c(1.0) - x * y.conj()).inv();
    let p = |i: usize, j: usize| (c(t * t) - w[i] * w[j].conj()) * k(z[i], z[j]);
    let (a, b, d) = (p(0, 0).re, p(0, 1), p(1, 1).re);
    a >= 0.0 && d >= 0.0 && a * d - b.norm_sqr() >= 0.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gram_is_psd(seed in any::<u64>(), n in 1usize..=8, d in 1usize..=3) {
        let pts = random_points(seed, n, d, 0.9);
        let g = kernels::gram(&KernelSpec::drury_arveson(d).unwrap(), &pts).unwrap();
        prop_assert!(linalg::psd_check(&g, 1e-9).unwrap().is_psd);
    }

    #[test]
    fn normalization_is_idempotent(seed in any::<u64>(), n in 1usize..=8, base_pick in any::<usize>()) {
        let pts = random_points(seed, n, 2, 0.8);
        let g = kernels::gram(&KernelSpec::drury_arveson(2).unwrap(), &pts).unwrap();
        let base = base_pick % n;
        let once = kernels::normalize(&g, base).unwrap();
        prop_assert!(once.reconstruction_error(&g) <= 1e-12 * g.max_abs());
        let twice = kernels::normalize(&once.gram_tilde, base).unwrap();
        for i in 0..n {
            prop_assert!((twice.delta[i] - c(1.0)).norm() <= 1e-12);
            prop_assert_eq!(once.gram_tilde.get(base, i), c(1.0));
            for j in 0..n {
                prop_assert!((twice.gram_tilde.get(i, j) - once.gram_tilde.get(i, j)).norm() <= 1e-12 * once.gram_tilde.max_abs());
            }
        }
    }

    #[test]
    fn pick_feasibility_is_upward_closed(seed in any::<u64>(), n in 1usize..=5, t in 0.05f64..2.0, dt in 0.0f64..1.0) {
        let p = disk_problem(seed, n);
        if pick::pick_feasible(&p, t, 1e-9).unwrap().is_psd {
            prop_assert!(pick::pick_feasible(&p, t + dt, 1e-9).unwrap().is_psd);
        }
    }

    #[test]
    fn minimal_norm_scales(seed in any::<u64>(), n in 1usize..=4, s in 0.1f64..3.0, phase in 0.0f64..TAU) {
        let p = disk_problem(seed, n);
        let t = pick::minimal_interpolation_norm(&p, 1e-11).unwrap();
        let scaled = p.scaled(Complex64::from_polar(s, phase));
        let ts = pick::minimal_interpolation_norm(&scaled, 1e-11).unwrap();
        prop_assert!((ts - s * t).abs() <= 1e-8 * s.max(1.0), "{ts} vs {}", s * t);
    }

    #[test]
    fn minimal_norm_matches_two_point_closed_form(seed in any::<u64>()) {
        let mut g = rng(seed);
        let z = [random_ball_point(&mut g, 1, 0.8)[0], random_ball_point(&mut g, 1, 0.8)[0]];
        let w = [gaussian_ish(&mut g), gaussian_ish(&mut g)];
        prop_assume!((z[0] - z[1]).norm() > 0.05);
        let p = PickProblem::new(
            KernelSpec::szego(400),
            PointSet::disk(&z).unwrap(),
            w.to_vec(),
        ).unwrap();
        let got = pick::minimal_interpolation_norm(&p, 1e-11).unwrap();
        let (mut lo, mut hi) = (0.0, 1.0);
        while !two_by_two_psd(hi, z, w) {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if two_by_two_psd(mid, z, w) { hi = mid } else { lo = mid }
        }
        prop_assert!((got - hi).abs() <= 1e-8 * hi.max(1.0), "{got} vs {hi}");
    }
}

#[test]
fn schwarz_pick_dense_sweep() {
    let z = [c(0.0), c(0.5)];
    let w = [c(0.0), c(0.25)];
    let first = (0..=100_000)
        .map(|k| k as f64 * 1e-5)
        .find(|&t| two_by_two_psd(t, z, w))
        .unwrap();
    let p = PickProblem::new(
        KernelSpec::szego(200),
        PointSet::disk(&z).unwrap(),
        w.to_vec(),
    )
    .unwrap();
    let got = pick::minimal_interpolation_norm(&p, 1e-11).unwrap();
    assert!((got - first).abs() <= 1e-5);
    assert!((got - 0.5).abs() <= 1e-8);
}

#[test]
fn partition_of_block_diagonal_sample() {
    let mut g = rng(11);
    for _ in 0..50 {
        let sizes: Vec<usize> = (0..g.gen_range(1..4)).map(|_| g.gen_range(1..4)).collect();
        let n: usize = sizes.iter().sum();
        let mut block_of = Vec::new();
        for (b, &s) in sizes.iter().enumerate() {
            block_of.extend(std::iter::repeat_n(b, s));
        }
        let perm: Vec<usize> = {
            let mut p: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                p.swap(i, g.gen_range(0..=i));
            }
            p
        };
        let pts = random_points(g.gen(), n, 1, 0.7);
        let k = kernels::gram(&KernelSpec::szego(200), &pts).unwrap();
        let gm = HermitianMatrix::from_fn(n, |i, j| {
            if block_of[perm[i]] == block_of[perm[j]] {
                k.get(i, j)
            } else {
                c(0.0)
            }
        })
        .unwrap();
        let classes = kernels::irreducible_partition(&gm, 1e-9);
        assert_eq!(classes.len(), sizes.len());
        for class in &classes {
            let b = block_of[perm[class[0]]];
            assert!(class.iter().all(|&i| block_of[perm[i]] == b));
            assert_eq!(class.len(), sizes[b]);
        }
        assert_eq!(
            kernels::check_irreducible_sample(&gm, 1e-9),
            sizes.len() == 1
        );
    }
}
