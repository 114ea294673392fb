use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twisted_tf::field::{
    amalgam_norm, inner_product, partial_derivative, Axis, Exponent, GridSpec, SampledField,
};
use twisted_tf::hermite::{l_power, riesz_reconstruct_sqrt_l, PhiExpansion};
use twisted_tf::twistop::twisted_translate;
use twisted_tf::weyl::{compose, hs_norm, weyl_kernel, WeylKernel};
use twisted_tf::zak::{covariance_check, zak_forward, zak_inverse};
use twisted_tf::C64;

fn random_field(grid: GridSpec, seed: u64) -> SampledField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = grid.samples_per_axis();
    let values = (0..m * m)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    SampledField::from_values(grid, values).unwrap()
}

fn random_kernel(n1: usize, k1: usize, seed: u64) -> WeylKernel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m1 = 2 * n1 * k1;
    let values = (0..m1 * m1)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    WeylKernel::from_values(n1, k1, values).unwrap()
}

fn small_grid() -> impl Strategy<Value = GridSpec> {
    (prop::sample::select(vec![4usize, 6, 8]), 1usize..=3)
        .prop_map(|(n, k)| GridSpec::new(n, k).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn inner_product_is_hermitian(grid in small_grid(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let (f, g) = (random_field(grid, s1), random_field(grid, s2));
        let a = inner_product(&f, &g).unwrap();
        let b = inner_product(&g, &f).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * (1.0 + a.norm()));
        let ff = inner_product(&f, &f).unwrap();
        prop_assert!(ff.im.abs() <= 1e-12 * ff.re && ff.re >= 0.0);
    }

    #[test]
    fn derivative_is_linear(grid in small_grid(), s in any::<u64>(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let (f, g) = (random_field(grid, s), random_field(grid, s ^ 0x5555));
        let (ca, cb) = (C64::new(a, 0.5), C64::new(b, -1.0));
        let lhs = partial_derivative(&f.combine(ca, &g, cb).unwrap(), Axis::X);
        let rhs = partial_derivative(&f, Axis::X).combine(ca, &partial_derivative(&g, Axis::X), cb).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-12 * (1.0 + rhs.max_abs()));
    }

    #[test]
    fn amalgam_norms(grid in small_grid(), s in any::<u64>(), c in 0.1..5.0f64) {
        let f = random_field(grid, s);
        let two = amalgam_norm(&f, Exponent::finite(2.0).unwrap(), Exponent::finite(2.0).unwrap()).unwrap();
        prop_assert!((two.value - f.norm()).abs() <= 1e-10 * f.norm());
        let inf1 = amalgam_norm(&f, Exponent::Infinite, Exponent::finite(1.0).unwrap()).unwrap();
        prop_assert!((inf1.recompute() - inf1.value).abs() <= 1e-12 * inf1.value);
        let scaled = amalgam_norm(&f.scale(C64::new(0.0, c)), Exponent::Infinite, Exponent::finite(1.0).unwrap()).unwrap();
        prop_assert!((scaled.value - c * inf1.value).abs() <= 1e-12 * c * inf1.value);
    }

    #[test]
    fn zak_is_unitary_and_invertible(grid in small_grid(), s in any::<u64>(), extra in 0usize..3) {
        let f = random_field(grid, s);
        let n_w = 2 * grid.truncation() + extra;
        let g = zak_forward(&f, n_w).unwrap();
        prop_assert!((g.norm() - f.norm()).abs() <= 1e-10 * f.norm());
        let back = zak_inverse(&g, grid.truncation(), grid.resolution()).unwrap();
        prop_assert!(back.sub(&f).unwrap().max_abs() <= 1e-10);
    }

    #[test]
    fn zak_covariance_on_random_fields(s in any::<u64>(), m in -3i64..=3, n in -3i64..=3) {
        let grid = GridSpec::new(4, 4).unwrap();
        // keep the support where every shift by at most 3 cells stays on the grid
        let f = random_field(grid, s).map_xy(|x, y, v| if x.abs() < 1.0 && y.abs() < 1.0 { v } else { C64::new(0.0, 0.0) });
        let r = covariance_check(&f, m, n, 8).unwrap();
        prop_assert!(r.get("mass_lost").unwrap() <= 1e-12 * f.norm_sqr());
        prop_assert!(r.get("residual").unwrap() <= 1e-12);
    }

    #[test]
    fn integer_twisted_translation_is_isometric(s in any::<u64>(), m in -2i64..=2, n in -2i64..=2) {
        let grid = GridSpec::new(4, 4).unwrap();
        let f = random_field(grid, s).map_xy(|x, y, v| if x.abs() < 1.5 && y.abs() < 1.5 { v } else { C64::new(0.0, 0.0) });
        let t = twisted_translate(&f, m as f64, n as f64);
        prop_assert!((t.norm() - f.norm()).abs() <= 1e-12 * f.norm());
    }

    #[test]
    fn spectral_powers_compose(s in any::<u64>(), a in -1.0..1.0f64, b in -1.0..1.0f64) {
        let e = PhiExpansion::random((4, 4), &mut ChaCha8Rng::seed_from_u64(s));
        let lhs = l_power(&l_power(&e, a), b);
        let rhs = l_power(&e, a + b);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * 9f64.powf(a.abs() + b.abs()));
        prop_assert!(riesz_reconstruct_sqrt_l(&e).max_abs_diff(&l_power(&e, 0.5)) <= 1e-10);
    }

    #[test]
    fn kernel_products(s in any::<u64>()) {
        let (a, b, c) = (random_kernel(4, 1, s), random_kernel(4, 1, s ^ 1), random_kernel(4, 1, s ^ 2));
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        let diff = hs_norm(&left.combine(C64::new(1.0, 0.0), &right, C64::new(-1.0, 0.0)).unwrap());
        prop_assert!(diff <= 1e-10 * hs_norm(&left));
        let ab = compose(&a, &b).unwrap();
        prop_assert!(hs_norm(&ab) <= hs_norm(&a) * hs_norm(&b) * (1.0 + 1e-10));
    }
}

#[test]
fn kernel_is_linear_in_the_field() {
    let grid = GridSpec::new(8, 4).unwrap();
    let (f, g) = (random_field(grid, 1), random_field(grid, 2));
    let (a, b) = (C64::new(0.7, -0.2), C64::new(-1.5, 0.4));
    let lhs = weyl_kernel(&f.combine(a, &g, b).unwrap(), 8, 2).unwrap();
    let rhs = weyl_kernel(&f, 8, 2)
        .unwrap()
        .combine(a, &weyl_kernel(&g, 8, 2).unwrap(), b)
        .unwrap();
    let diff = hs_norm(
        &lhs.combine(C64::new(1.0, 0.0), &rhs, C64::new(-1.0, 0.0))
            .unwrap(),
    );
    assert!(diff <= 1e-12 * hs_norm(&lhs));
}

#[test]
fn operations_are_deterministic() {
    let grid = GridSpec::new(8, 2).unwrap();
    let f = random_field(grid, 9);
    let a = zak_forward(&f, 5).unwrap();
    let b = zak_forward(&f, 5).unwrap();
    assert!(a
        .values()
        .iter()
        .zip(b.values())
        .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
}
