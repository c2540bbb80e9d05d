//! Derived examples, each checked against an independent computation.

use blaschke_core::blaschke::BlaschkeProduct;
use blaschke_core::boundary::{hardy_quasinorm, make_grid, weak_quasinorm, BoundaryGrid};
use blaschke_core::disc::DiscPoint;
use blaschke_core::modelspace::{
    claim_statistic, interpolation_infimum, interpolation_solve, weak23_statistic, ModelFunction,
};
use blaschke_core::zeroseq::{
    dyadic_census, fit_geometric_envelope, generate_geometric, generate_power, is_exponential, lemma1_construct,
    AngleRule, ZeroSequence,
};
use num_complex::Complex64;
use std::f64::consts::TAU;

fn random(seed: u64) -> AngleRule {
    AngleRule::UniformRandom { seed }
}

#[test]
fn power_census_matches_integer_count() {
    let z = generate_power(2.0, 2000, &AngleRule::Equispaced).unwrap();
    let census = dyadic_census(&z).unwrap();
    // 2^-11 <= (n+1)^-2 <= 2^-10  <=>  1024 <= (n+1)^2 <= 2048
    let brute = (1u64..=2000)
        .filter(|n| (1024..=2048).contains(&((n + 1) * (n + 1))))
        .count();
    assert_eq!(census.count(10), brute);
    assert!((12..=14).contains(&brute));
    assert!(census.max_count >= 12);
    let check = is_exponential(&z, Some(5)).unwrap();
    assert!(!check.is_exponential);
}

#[test]
fn halving_sequence_has_two_per_annulus() {
    let z = generate_geometric(1.0, 0.5, 40, &random(1)).unwrap();
    assert!(is_exponential(&z, None).unwrap().max_observed <= 2);
}

#[test]
fn power_lag_ratio_tends_to_one() {
    let z = generate_power(2.0, 100, &AngleRule::Equispaced).unwrap();
    let env = fit_geometric_envelope(&z).unwrap();
    let brute = (1..100)
        .map(|n| ((n + 1) as f64 / (n + 2) as f64).powi(2))
        .fold(0.0, f64::max);
    assert!((env.lag_ratios[0] - brute).abs() < 1e-12);
    assert!(env.lag_ratios[0] >= 0.95);
}

#[test]
fn lemma1_sums_by_hand() {
    let eps: Vec<f64> = (1..=30).map(|k| 2f64.powi(-k - 4)).collect();
    let z = ZeroSequence::from_parts(&eps, &vec![0.0; 30]).unwrap();
    let r = lemma1_construct(&z, 16.0).unwrap();
    // n_k is the least n with 4^n >= 100 k^2 / (mu eps_k), found by counting up
    let (mut sc, mut sd) = (0.0, 0.0);
    for (i, &e) in eps.iter().enumerate() {
        let k = (i + 1) as f64;
        let mut n = 0u32;
        while 4f64.powi(n as i32) < 100.0 * k * k / (16.0 * e) {
            n += 1;
        }
        assert_eq!(r.exponents[i], n, "k = {k}");
        sc += 2f64.powi(n as i32) * e;
        sd += 1.0 / (4f64.powi(n as i32) * e);
    }
    assert!((r.s_c - sc).abs() < 1e-12 * sc);
    assert!((r.s_d - sd).abs() < 1e-12 * sd);
    assert!(r.s_d <= 16.0);
    // recorded K; the rounding of every n_k upward costs up to sqrt(2) per term
    assert_eq!(r.s_c * 16.0, 118.531_25);
}

#[test]
fn frostman_shift_stays_comparable() {
    let z = generate_geometric(1.0, 0.5, 15, &random(15)).unwrap();
    let b = BlaschkeProduct::new(z.clone()).unwrap();
    let g = make_grid(&z, 1 << 14, 64).unwrap();
    let base = weak_quasinorm(&g.sample(|p| b.boundary_derivative_modulus_at(p)), &g, 1.0).unwrap();
    let a = Complex64::new(0.0, 0.4);
    let s = g.try_sample(|p| b.frostman_shift_boundary_at(a, p)).unwrap();
    let shifted = weak_quasinorm(&s, &g, 1.0).unwrap();
    assert!(shifted / base <= 4.0 && base / shifted <= 4.0);
}

#[test]
fn hardy_single_zero_against_reference() {
    let z = ZeroSequence::from_parts(&[0.5], &[0.0]).unwrap();
    let b = BlaschkeProduct::new(z.clone()).unwrap();
    let g = make_grid(&z, 1024, 64).unwrap();
    let ours = hardy_quasinorm(&g.sample(|p| b.boundary_derivative_modulus_at(p)), &g, 0.5).unwrap();
    let n = 1 << 14;
    let mean: f64 = (0..n)
        .map(|i| {
            let t = TAU * i as f64 / n as f64;
            (0.75 / (1.25 - t.cos())).sqrt()
        })
        .sum::<f64>()
        / n as f64;
    let reference = mean * mean;
    assert!((ours - reference).abs() <= 0.005 * reference, "{ours} vs {reference}");
}

#[test]
fn hardy_contrast_between_generators() {
    let q = |z: &ZeroSequence| {
        let b = BlaschkeProduct::new(z.clone()).unwrap();
        let g = make_grid(z, 1 << 13, 64).unwrap();
        hardy_quasinorm(&g.sample(|p| b.boundary_derivative_modulus_at(p)), &g, 0.9).unwrap()
    };
    let geo = generate_geometric(1.0, 0.5, 40, &random(2)).unwrap();
    let g: Vec<f64> = [10, 20, 30, 40].iter().map(|&n| q(&geo.truncate(n))).collect();
    // partial sums of eps^{0.1} converge slowly; bounded shows as shrinking steps
    assert!(g.windows(3).all(|w| w[2] - w[1] < w[1] - w[0]), "{g:?}");
    assert!(g[3] / g[1] < 1.5, "{g:?}");
    let pow = generate_power(2.0, 400, &random(2)).unwrap();
    let p: Vec<f64> = [50, 100, 200, 400].iter().map(|&n| q(&pow.truncate(n))).collect();
    assert!(p.windows(2).all(|w| w[1] > w[0]), "{p:?}");
    assert!(p[3] / p[1] > g[3] / g[1], "{p:?}");
}

#[test]
fn weak23_single_kernel_grid_stable() {
    let z = ZeroSequence::from_parts(&[0.5], &[1.0]).unwrap();
    let f = ModelFunction::new(z.clone(), vec![Complex64::new(1.0, 0.0)]).unwrap();
    let a = weak23_statistic(&f, 1.0, &make_grid(&z, 1 << 12, 64).unwrap()).unwrap();
    let b = weak23_statistic(&f, 1.0, &make_grid(&z, 1 << 13, 64).unwrap()).unwrap();
    assert!(a.is_finite() && a > 0.0);
    assert!((a - b).abs() <= 0.02 * b);
}

#[test]
fn claim_kernel_at_deepest_zero_grid_stable() {
    let z = generate_geometric(1.0, 0.5, 12, &random(12)).unwrap();
    let b = BlaschkeProduct::new(z.clone()).unwrap();
    let h = ModelFunction::kernel(&z, 11).unwrap();
    let s1 = claim_statistic(&b, &h, &make_grid(&z, 1 << 12, 64).unwrap()).unwrap();
    let s2 = claim_statistic(&b, &h, &make_grid(&z, 1 << 13, 64).unwrap()).unwrap();
    assert!((s1.ratio - s2.ratio).abs() <= 0.05 * s2.ratio);
}

#[test]
fn claim_rejects_foreign_kernel() {
    let z = generate_geometric(1.0, 0.5, 4, &random(1)).unwrap();
    let b = BlaschkeProduct::new(z.truncate(2)).unwrap();
    let h = ModelFunction::kernel(&z, 3).unwrap();
    assert!(claim_statistic(&b, &h, &BoundaryGrid::uniform(64).unwrap()).is_err());
}

#[test]
fn interpolation_of_divergent_targets() {
    let z = generate_geometric(1.0, 0.25, 20, &random(20)).unwrap();
    let w: Vec<Complex64> = z
        .gaps()
        .enumerate()
        .map(|(i, e)| Complex64::new(1.0 / (e.sqrt() * (i + 1) as f64), 0.0))
        .collect();
    let r = interpolation_solve(&z, &w).unwrap();
    assert!(r.condition < 1e6, "condition {}", r.condition);
    for (zero, target) in z.entries().iter().zip(&w) {
        let v = r.function.evaluate_at(&DiscPoint::new(zero.eps, zero.theta));
        assert!((v - target).norm() <= 1e-9 * target.norm());
    }
    assert!(interpolation_infimum(&z).unwrap() > 0.0);
}

#[test]
fn model_derivative_matches_radial_difference() {
    let z = generate_geometric(1.0, 0.6, 8, &random(8)).unwrap();
    let beta: Vec<Complex64> = (0..8)
        .map(|k| Complex64::new((k as f64).cos(), (k as f64 * 0.7).sin()))
        .collect();
    let f = ModelFunction::new(z, beta).unwrap();
    for th in [0.2, 1.9, 4.0, 5.5] {
        let (r, h) = (0.7, 1e-6);
        let dir = Complex64::from_polar(1.0, th);
        let up = f.evaluate(dir * (r + h));
        let down = f.evaluate(dir * (r - h));
        let fd = (up - down) / (2.0 * h) / dir;
        let exact = f.derivative_boundary(r, th).unwrap();
        assert!(
            (fd - exact).norm() <= 1e-6 * exact.norm(),
            "theta {th}: {fd} vs {exact}"
        );
    }
}

#[test]
fn gram_norm_two_kernels_against_quadrature() {
    let z = ZeroSequence::from_parts(&[0.2, 0.05], &[0.3, 2.2]).unwrap();
    let f = ModelFunction::new(z, vec![Complex64::new(0.8, -1.1), Complex64::new(-0.4, 0.25)]).unwrap();
    let g = BoundaryGrid::uniform(1 << 14).unwrap();
    let s = g.sample(|p| f.evaluate_at(p).norm_sqr());
    let q = g.integrate(&s).unwrap() / TAU;
    let n2 = f.l2_norm().unwrap().powi(2);
    assert!((q - n2).abs() <= 1e-8 * n2, "{q} vs {n2}");
}
