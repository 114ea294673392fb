use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twisted_tf::field::{inner_product, GridSpec, SampledField};
use twisted_tf::hermite::{
    expand, gaussian_window, hermite_1d, l_power, synthesize, PhiExpansion, SpecialHermiteBasis,
};
use twisted_tf::twistop::{
    l_apply, lemma41_audit, twisted_convolve, twisted_translate, z_apply, z_commutator_report,
    zbar_apply,
};
use twisted_tf::weyl::{
    compose, hs_inner, hs_norm, intertwine_ladder_check, pi_action, pi_action_consistency,
    plancherel_report, weyl_kernel,
};
use twisted_tf::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn smooth_field(grid: GridSpec, seed: u64) -> SampledField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (cx, cy) = (rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
    let (a, b) = (
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        rng.gen_range(-0.3..0.3),
    );
    SampledField::from_fn(grid, |x, y| {
        let (u, v) = (x - cx, y - cy);
        (C64::new(1.0, 0.0) + a * 0.3 * u + C64::new(0.0, b * v)) * (-(u * u + v * v) / 4.0).exp()
    })
}

#[test]
fn grid_ladder_relations_up_to_five() {
    let grid = GridSpec::new(16, 8).unwrap();
    let basis = SpecialHermiteBasis::new((5, 6), grid).unwrap();
    let p = |m, n| basis.phi(m, n).unwrap();
    let mut worst: f64 = 0.0;
    for m in 0..=5 {
        for n in 0..=5 {
            let zbar = zbar_apply(p(m, n));
            let want = p(m, n + 1).scale(I * (2.0 * n as f64 + 2.0).sqrt());
            worst = worst.max(zbar.max_abs_diff_interior(&want, 2).unwrap());
            let z = z_apply(p(m, n));
            let want = if n == 0 {
                SampledField::zeros(grid)
            } else {
                p(m, n - 1).scale(I * (2.0 * n as f64).sqrt())
            };
            worst = worst.max(z.max_abs_diff_interior(&want, 2).unwrap());
        }
    }
    assert!(worst < 1e-4, "ladder residual {worst:e}");
}

#[test]
fn eigenrelation_and_parseval() {
    let grid = GridSpec::new(16, 10).unwrap();
    let basis = SpecialHermiteBasis::new((5, 5), grid).unwrap();
    let phi12 = basis.phi(1, 2).unwrap();
    assert!(
        l_apply(phi12)
            .max_abs_diff_interior(&phi12.scale(C64::new(5.0, 0.0)), 4)
            .unwrap()
            < 1e-4
    );

    let e = PhiExpansion::random((5, 5), &mut ChaCha8Rng::seed_from_u64(3));
    let f = synthesize(&e, &basis).unwrap();
    let back = expand(&f, &basis, (5, 5)).unwrap();
    assert!((back.norm_sqr() - f.norm_sqr()).abs() <= 1e-6 * f.norm_sqr());

    // a field outside the span loses mass to the higher modes
    let g = smooth_field(grid, 11).map_xy(|x, _, v| v * C64::new(1.0 + x * x, 0.0));
    assert!(expand(&g, &basis, (5, 5)).unwrap().norm_sqr() <= g.norm_sqr() + 1e-10);

    // ‖L^{1/2} f‖² = ½(‖Zf‖² + ‖Z̄f‖²) in the span
    let lhs = l_power(&e, 0.5).norm_sqr();
    let rhs = 0.5 * (z_apply(&f).norm_sqr() + zbar_apply(&f).norm_sqr());
    assert!((lhs - rhs).abs() <= 1e-4 * e.norm_sqr(), "{lhs} vs {rhs}");
}

#[test]
fn hermite_normalization_on_the_reference_grid() {
    let grid = GridSpec::new(16, 8).unwrap();
    let h = grid.step();
    for k in [0, 1, 3, 10] {
        let s = hermite_1d(k, grid).unwrap();
        let norm: f64 = s.iter().map(|v| v * v).sum::<f64>() * h;
        assert!((norm - 1.0).abs() < 1e-8, "h_{k}: {norm}");
    }
}

#[test]
fn adjoint_relation() {
    let grid = GridSpec::new(16, 8).unwrap();
    let (f, g) = (smooth_field(grid, 1), smooth_field(grid, 2));
    let lhs = inner_product(&z_apply(&f), &g).unwrap();
    let rhs = -inner_product(&f, &zbar_apply(&g)).unwrap();
    assert!((lhs - rhs).norm() < 1e-4, "{lhs} vs {rhs}");
}

#[test]
fn commutator_with_twisted_translation_has_closed_form() {
    let grid = GridSpec::new(16, 8).unwrap();
    let f = smooth_field(grid, 4);
    for (m, n) in [(1, 0), (0, 1), (1, -2)] {
        let r = z_commutator_report(&f, m, n);
        let scale = r.get("commutator_norm").unwrap();
        assert!(scale > 1.0, "the commutator does not vanish");
        // only the stencil error on the phase e^{2πi(nx − my)} remains
        assert!(r.get("closed_form_residual").unwrap() < 2e-2 * scale);
    }
    assert!(
        z_commutator_report(&f, 0, 0)
            .get("commutator_norm")
            .unwrap()
            == 0.0
    );
}

#[test]
fn lemma41_bounds_for_seeded_shifts() {
    let grid = GridSpec::new(16, 6).unwrap();
    let f = gaussian_window(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..20 {
        let eps = loop {
            let e = C64::new(
                rng.gen_range(-8i32..=8) as f64 / 16.0,
                rng.gen_range(-8i32..=8) as f64 / 16.0,
            );
            if e.norm() > 0.0 && e.norm() <= 0.5 {
                break e;
            }
        };
        let r = lemma41_audit(&f, eps).unwrap();
        assert!(r.passed(), "eps = {eps}: {:?}", r.failed_flags());
    }
}

#[test]
fn weyl_plancherel_polarization_and_orthogonality() {
    let grid = GridSpec::new(16, 8).unwrap();
    let (f, g) = (smooth_field(grid, 5), smooth_field(grid, 6));
    let r = plancherel_report(&f, &g, 16, 4).unwrap();
    assert!(r.get("polarized.residual").unwrap() < 1e-3);
    let basis = SpecialHermiteBasis::new((1, 1), grid).unwrap();
    let k00 = weyl_kernel(basis.phi(0, 0).unwrap(), 16, 4).unwrap();
    let k11 = weyl_kernel(basis.phi(1, 1).unwrap(), 16, 4).unwrap();
    assert!(hs_inner(&k00, &k11).unwrap().norm() < 1e-3);
    assert!((hs_inner(&k00, &k00).unwrap().re - hs_norm(&k00).powi(2)).abs() < 1e-12);
}

#[test]
fn intertwining_with_the_adjoint_ladder_under_unit_convention() {
    let grid = GridSpec::new(16, 8).unwrap();
    let f = gaussian_window(grid);
    let r = intertwine_ladder_check(&f, 16, 4).unwrap();
    for label in ["unit.A.relative", "unit.Astar.relative"] {
        assert!(r.get(label).unwrap() < 1e-2, "{label}");
    }
    // the pinned convention is off by O(1), not by a discretization error
    assert!(r.get("pinned.A.relative").unwrap() > 1.0);
    assert_eq!(r.get_flag("A.pass"), Some(false));
}

#[test]
fn pi_action_examples() {
    let grid = GridSpec::new(16, 8).unwrap();
    let f = gaussian_window(grid);
    let kf = weyl_kernel(&f, 16, 4).unwrap();
    assert_eq!(pi_action(0, 0, &kf).unwrap(), kf);
    assert!((hs_norm(&pi_action(1, 0, &kf).unwrap()) - hs_norm(&kf)).abs() < 1e-12);
    assert!(pi_action_consistency(&f, 1, 1, 16, 4).unwrap() < 1e-3);
}

#[test]
fn submultiplicative_on_seeded_pairs() {
    let grid = GridSpec::new(8, 4).unwrap();
    for s in 0..20 {
        let ka = weyl_kernel(&smooth_field(grid, 100 + s), 8, 2).unwrap();
        let kb = weyl_kernel(&smooth_field(grid, 200 + s), 8, 2).unwrap();
        assert!(
            hs_norm(&compose(&ka, &kb).unwrap()) <= hs_norm(&ka) * hs_norm(&kb) * (1.0 + 1e-10)
        );
    }
}

#[test]
fn twisted_convolution_matches_reversed_operator_product() {
    let gauss = |grid: GridSpec, tilt: f64| {
        SampledField::from_fn(grid, |x, y| {
            C64::new((1.0 + tilt * x) * (-PI * (x * x + y * y)).exp(), 0.0)
        })
    };
    let distance = |n: usize| {
        let grid = GridSpec::new(n, 4).unwrap();
        let (f, g) = (gauss(grid, 0.0), gauss(grid, 0.3));
        let conv = twisted_convolve(&f, &g, false).unwrap();
        let kc = weyl_kernel(&conv, n, 2).unwrap();
        let prod = compose(
            &weyl_kernel(&g, n, 2).unwrap(),
            &weyl_kernel(&f, n, 2).unwrap(),
        )
        .unwrap();
        hs_norm(
            &kc.combine(C64::new(1.0, 0.0), &prod, C64::new(-1.0, 0.0))
                .unwrap(),
        ) / hs_norm(&prod)
    };
    let (coarse, fine) = (distance(4), distance(8));
    assert!(fine * 4.0 <= coarse, "{coarse:e} -> {fine:e}");
    assert!(fine < 1e-6);
}

#[test]
fn twisted_translation_moves_the_support_exactly() {
    let grid = GridSpec::new(8, 4).unwrap();
    let f = smooth_field(grid, 8).map_xy(|x, y, v| {
        if x.abs() < 1.0 && y.abs() < 1.0 {
            v
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let t = twisted_translate(&f, 2.0, -1.0);
    let (ix, iy) = (grid.index_of(0.25).unwrap(), grid.index_of(0.5).unwrap());
    let (jx, jy) = (grid.index_of(2.25).unwrap(), grid.index_of(-0.5).unwrap());
    let phase = C64::from_polar(1.0, 2.0 * PI * (-2.25 - 2.0 * -0.5));
    assert!((t.get(jx, jy) - f.get(ix, iy) * phase).norm() < 1e-12);
}
