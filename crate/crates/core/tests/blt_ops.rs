use std::f64::consts::FRAC_1_SQRT_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twisted_tf::blt::{
    beurling_density, bump, divergence_scan, example31_amalgam, example31_field, example32_field,
    example32_majorant, example32_norms, example32_tents, plateau_constraints_hold,
    remark56_checks, scan_fields, sqrt_l_norm, uncertainty_report, weak_blt_report, Comparator,
    LatticePointSet, PlateauRule, ScanKind, BUMP_SUP, DEFAULT_SCAN_HALF_WIDTH,
};
use twisted_tf::field::{amalgam_norm, unit_cell_indicator, Exponent, GridSpec, SampledField};
use twisted_tf::hermite::{gaussian_window, PhiExpansion, SpecialHermiteBasis};
use twisted_tf::twistop::{z_apply, zbar_apply};
use twisted_tf::zak::{
    dual_window, dual_window_regularized, frame_bounds_refined, perturbed_chi,
    tight_window_regularized, zak_forward, DEFAULT_GUARD,
};
use twisted_tf::{Error, C64};

#[test]
fn example31_amalgam_matches_closed_form() {
    let grid = GridSpec::new(16, 9).unwrap();
    for m in [1, 4, 8] {
        let f = example31_field(m, grid).unwrap();
        let a = amalgam_norm(&f, Exponent::Infinite, Exponent::finite(1.0).unwrap()).unwrap();
        assert!((a.value - example31_amalgam(m)).abs() <= 1e-8, "M = {m}");
    }
    // the single bump peaks at the centre of cell (1, 1)
    let one = example31_field(1, grid).unwrap();
    let i = grid.index_of(1.5).unwrap();
    assert!((one.get(i, i).re - BUMP_SUP).abs() < 1e-18);
    assert!((bump(0.5, 0.5) - BUMP_SUP).abs() < 1e-18);
    assert_eq!(bump(1.5, 0.5), 0.0);
    assert!(matches!(
        example31_field(9, grid),
        Err(Error::TruncationTooSmall { .. })
    ));
}

#[test]
fn example31_scan_grows() {
    let scan = divergence_scan(
        ScanKind::Example31Zbar,
        &[4, 8, 16],
        16,
        Comparator::Squared,
    )
    .unwrap();
    assert!(scan.passed(), "{scan:?}");
    assert!(scan.quantities.windows(2).all(|p| p[1] > p[0]));
    assert!(scan.slope > 0.0);
    let csv = scan.to_csv();
    assert!(csv.starts_with("level,quantity,comparator,pass\n"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn example32_tents_and_plateaus() {
    let tents = example32_tents(12, PlateauRule::Shrink).unwrap();
    for t in &tents {
        let kf = t.k as f64;
        assert!((t.height - 1.0 / (kf * kf.ln())).abs() < 1e-15);
        assert_eq!(t.value(0.5 * (t.a + t.b)), t.height);
        assert!(plateau_constraints_hold(t.k, t.a, t.b));
    }
    // default rule at k = 10, checked against the arithmetic directly
    let (a, b) = (10.4, 10.6);
    let direct = a - 0.1 >= 10.0 && b + 0.1 <= 11.0 && b * b * b - a * a * a < 10.0;
    assert_eq!(plateau_constraints_hold(10, a, b), direct);
    assert!(matches!(
        example32_tents(10, PlateauRule::Fixed { lo: 0.0, hi: 1.0 }),
        Err(Error::Constraint(3))
    ));
}

#[test]
fn example32_amalgam_scan_and_norms() {
    let scan = divergence_scan(
        ScanKind::Example32Amalgam,
        &[10, 20, 40],
        4,
        Comparator::Verbatim,
    )
    .unwrap();
    for (q, c) in scan.quantities.iter().zip(&scan.comparators) {
        assert!((q / c - 1.0).abs() <= 1e-6, "{q} vs {c}");
    }
    assert!(scan.quantities.windows(2).all(|p| p[1] > p[0]));

    let (z20, zb20) = example32_norms(20, PlateauRule::Shrink).unwrap();
    let (z40, zb40) = example32_norms(40, PlateauRule::Shrink).unwrap();
    assert!((z40 - z20).abs() < 0.05 * z20 && (zb40 - zb20).abs() < 0.05 * zb20);
    assert!((z40 - z20).abs() <= example32_majorant(20, 40));
}

#[test]
fn example32_grid_norms_converge_to_the_exact_values() {
    let (exact_z, exact_zb) = example32_norms(6, PlateauRule::Shrink).unwrap();
    let err = |n: usize| {
        let f = example32_field(6, GridSpec::new(n, 7).unwrap(), PlateauRule::Shrink).unwrap();
        (
            (z_apply(&f).norm() - exact_z).abs() / exact_z,
            (zbar_apply(&f).norm() - exact_zb).abs() / exact_zb,
        )
    };
    let (c1, c2) = err(32);
    let (f1, f2) = err(64);
    assert!(c1 < 0.05 && c2 < 0.05, "{c1} {c2}");
    assert!(f1 < c1 && f2 < c2);
}

#[test]
fn scans_reject_foreign_fields() {
    let grid = GridSpec::new(4, 5).unwrap();
    let constant = SampledField::from_fn(grid, |_, _| C64::new(1.0, 0.0));
    assert!(matches!(
        scan_fields(
            ScanKind::Example31Zbar,
            &[4],
            &[constant.clone()],
            Comparator::Squared
        ),
        Err(Error::KindMismatch(_))
    ));
    assert!(matches!(
        scan_fields(
            ScanKind::Example32Amalgam,
            &[4],
            &[constant],
            Comparator::Verbatim
        ),
        Err(Error::KindMismatch(_))
    ));
    assert!(matches!(
        divergence_scan(ScanKind::Example31Zbar, &[8, 4], 4, Comparator::Squared),
        Err(Error::NonMonotoneLevels)
    ));
}

#[test]
fn uncertainty_examples() {
    let basis = SpecialHermiteBasis::new((2, 2), GridSpec::new(16, 8).unwrap()).unwrap();
    let r00 = uncertainty_report(&PhiExpansion::unit((2, 2), 0, 0), &basis).unwrap();
    assert!((r00.get("ratio.grid").unwrap() - 1.0).abs() < 1e-4);
    assert_eq!(r00.get("equality_case"), Some(1.0));

    let r01 = uncertainty_report(&PhiExpansion::unit((2, 2), 0, 1), &basis).unwrap();
    assert!((r01.get("ratio.grid").unwrap() - 3.0).abs() < 1e-3);
    assert_eq!(r01.get("equality_case"), Some(0.0));

    let mut mix = PhiExpansion::zeros((2, 2));
    mix.set(0, 0, C64::new(FRAC_1_SQRT_2, 0.0));
    mix.set(1, 1, C64::new(FRAC_1_SQRT_2, 0.0));
    let r = uncertainty_report(&mix, &basis).unwrap();
    assert!((r.get("functional.grid").unwrap() - 4.0 * r.get("norm_sqr").unwrap()).abs() < 1e-4);
    assert!((r.get("functional.coefficients").unwrap() - 4.0).abs() < 1e-12);
}

#[test]
fn uncertainty_on_seeded_expansions() {
    let basis = SpecialHermiteBasis::new((5, 5), GridSpec::new(16, 10).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for i in 0..50 {
        let e = PhiExpansion::random((5, 5), &mut rng);
        let r = uncertainty_report(&e, &basis).unwrap();
        assert!(r.passed(), "expansion {i}: {:?}", r.failed_flags());
        assert!(r.get("ratio.coefficients").unwrap() >= 1.0);
    }
}

#[test]
fn weak_blt_for_the_unit_cell() {
    let grid = GridSpec::new(8, 2).unwrap();
    let chi = unit_cell_indicator(grid, 0.0, 0.0);
    let r = weak_blt_report(&chi, &chi, 1).unwrap();
    assert!((r.get("pairing.re").unwrap() - 1.0).abs() <= 1e-10);
    assert!(r.get("pairing.im").unwrap().abs() <= 1e-10);
}

#[test]
fn weak_blt_product_grows_as_the_dual_sharpens() {
    let g = gaussian_window(GridSpec::new(16, 6).unwrap());
    let z = zak_forward(&g, 12).unwrap();
    let mut products = Vec::new();
    for delta in [1e-1, 3e-2, 1e-2] {
        let gt = dual_window_regularized(&z, delta).unwrap();
        let r = weak_blt_report(&g, &gt, 0).unwrap();
        let p = r.get("product").unwrap();
        assert!(p.is_finite());
        products.push(p);
    }
    assert!(products.windows(2).all(|p| p[1] > p[0]), "{products:?}");
}

#[test]
fn weak_blt_expansion_for_an_exact_frame() {
    let grid = GridSpec::new(16, 4).unwrap();
    let g = perturbed_chi(grid, 0.1).unwrap();
    let gt = dual_window(&zak_forward(&g, 8).unwrap(), DEFAULT_GUARD).unwrap();
    let r = weak_blt_report(&g, &gt, 3).unwrap();
    assert!((r.get("pairing.re").unwrap() - 1.0).abs() < 1e-10);
    let res: Vec<f64> = (1..=3)
        .map(|k| r.get(&format!("expansion.R{k}.residual")).unwrap())
        .collect();
    assert!(
        res.windows(2).all(|p| p[1] <= p[0] * (1.0 + 1e-12)),
        "{res:?}"
    );
}

#[test]
fn remark56_identities() {
    let basis = SpecialHermiteBasis::new((4, 4), GridSpec::new(16, 10).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = PhiExpansion::random((4, 4), &mut rng);
    let gt = PhiExpansion::random((4, 4), &mut rng);
    let r = remark56_checks(&g, &gt, &basis).unwrap();
    for flag in [
        "g.item1.pass",
        "g.item4.pass",
        "dual.item1.pass",
        "dual.item4.pass",
    ] {
        assert_eq!(r.get_flag(flag), Some(true), "{flag}: {r:?}");
    }
    let unit = remark56_checks(
        &PhiExpansion::unit((4, 4), 0, 0),
        &PhiExpansion::unit((4, 4), 2, 1),
        &basis,
    )
    .unwrap();
    assert!((unit.get("g.sqrt_l").unwrap() - 1.0).abs() < 1e-12);
    assert!((unit.get("dual.sqrt_l").unwrap() - 3f64.sqrt()).abs() < 1e-12);
    assert!((unit.get("dual.l").unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn remark56_growth_along_the_tight_family() {
    let g = gaussian_window(GridSpec::new(16, 6).unwrap());
    let z = zak_forward(&g, 12).unwrap();
    let norms: Vec<f64> = [1e-1, 3e-2, 1e-2]
        .iter()
        .map(|&d| sqrt_l_norm(&tight_window_regularized(&z, d).unwrap()))
        .collect();
    assert!(norms.windows(2).all(|p| p[1] > p[0]), "{norms:?}");
}

#[test]
fn densities_of_product_lattices() {
    let z2 = LatticePointSet::product_lattice(&[1.0, 1.0], 45.0).unwrap();
    let r = beurling_density(&z2, &[10.0, 20.0], DEFAULT_SCAN_HALF_WIDTH).unwrap();
    for key in ["r20.D_plus", "r20.D_minus"] {
        assert!((r.get(key).unwrap() - 1.0).abs() <= 0.05, "{key}");
    }
    let two = LatticePointSet::product_lattice(&[2.0, 2.0], 45.0).unwrap();
    let r = beurling_density(&two, &[10.0, 20.0], DEFAULT_SCAN_HALF_WIDTH).unwrap();
    assert!((r.get("r20.D_plus").unwrap() - 0.25).abs() <= 0.0125);
    assert!((r.get("r20.D_minus").unwrap() - 0.25).abs() <= 0.0125);

    let four = LatticePointSet::product_lattice(&[1.0, 1.0, 2.0, 2.0], 22.0).unwrap();
    let r = beurling_density(&four, &[6.0, 10.0], DEFAULT_SCAN_HALF_WIDTH).unwrap();
    assert!((r.get("r10.D_plus").unwrap() - 0.25).abs() <= 0.025);
    assert!((r.get("r10.D_minus").unwrap() - 0.25).abs() <= 0.025);

    let small = LatticePointSet::product_lattice(&[1.0, 1.0], 12.0).unwrap();
    assert!(matches!(
        beurling_density(&small, &[10.0], DEFAULT_SCAN_HALF_WIDTH),
        Err(Error::Coverage { .. })
    ));
}

#[test]
fn twisted_embedding_is_thin_in_four_dimensions() {
    let set = LatticePointSet::twisted_embedding(1.0, 1.0, 22.0).unwrap();
    let r = beurling_density(&set, &[6.0, 10.0], DEFAULT_SCAN_HALF_WIDTH).unwrap();
    assert_eq!(r.get("r10.D_minus"), Some(0.0));
    assert!(r.get("r10.D_plus").unwrap() < r.get("r6.D_plus").unwrap());
}

#[test]
fn amalgam_window_has_no_positive_lower_bound() {
    let f = example31_field(8, GridSpec::new(32, 9).unwrap()).unwrap();
    let fb = frame_bounds_refined(&f, &[8, 16, 32]).unwrap();
    let a: Vec<f64> = fb.history.iter().map(|h| h.a_est).collect();
    assert!(a.windows(2).all(|p| p[1] <= p[0]), "{a:?}");
    assert!(a[2] < 1e-12);
}

#[test]
fn gaussian_family_has_no_positive_lower_bound() {
    let grid = GridSpec::new(32, 6).unwrap();
    for width in [2.0, 1.0, 0.5] {
        let f = SampledField::from_fn(grid, |x, y| {
            C64::new((-(x * x + y * y) / (2.0 * width * width)).exp(), 0.0)
        });
        let fb = frame_bounds_refined(&f, &[8, 16, 32]).unwrap();
        assert!(fb.strictly_decreasing(), "width {width}: {:?}", fb.history);
        assert!(fb.a_est < 1e-3 * fb.b_est, "width {width}");
    }
}
