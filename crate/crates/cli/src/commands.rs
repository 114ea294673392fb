use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twisted_tf::blt::{
    beurling_density, divergence_scan, uncertainty_functional, uncertainty_report, Comparator, LatticePointSet,
    ScanKind, DEFAULT_SCAN_HALF_WIDTH,
};
use twisted_tf::field::{inner_product, unit_cell_indicator, GridSpec, SampledField};
use twisted_tf::hermite::{gaussian_window, PhiExpansion, SpecialHermiteBasis};
use twisted_tf::io::{coefficients_to_csv, field_to_csv, read_field, write_atomic, write_field, write_kernel, write_zak};
use twisted_tf::report::AnalysisReport;
use twisted_tf::twistop::{lemma41_audit, twisted_convolve, z_apply, zbar_apply};
use twisted_tf::weyl::{compose, hs_norm, intertwine_ladder_check, weyl_kernel};
use twisted_tf::zak::{
    biorthogonality_check, covariance_check, dual_window, dual_window_regularized, frame_bounds,
    frame_bounds_refined, linking_circle, obstruction_loop, oscillation_audit, quasiperiodicity_check,
    smoothing_audit, winding, zak_forward, zak_inverse, LatticeSum,
};
use twisted_tf::{Error, C64};

use crate::windows::{grid, input_field, named_window, Window};
use crate::{CliError, CliResult, Command, Common, ComparatorArg, LoopArg, ScanArg, Suite};

pub fn default_wres(k: usize) -> usize {
    (2 * k).max(8)
}

fn wres(common: &Common, g: GridSpec) -> usize {
    common.wres.unwrap_or_else(|| default_wres(g.truncation()))
}

// the oscillation boxes have sides down to 1/16
fn oscillation_wres(common: &Common, g: GridSpec) -> usize {
    common.wres.unwrap_or_else(|| default_wres(g.truncation()).max(16))
}

fn write_csv(common: &Common, text: &str) -> CliResult<()> {
    if let Some(path) = &common.csv {
        write_atomic(path, text.as_bytes())?;
    }
    Ok(())
}

pub fn run(command: &Command, common: &Common) -> CliResult<AnalysisReport> {
    match command {
        Command::Synth => synth(common),
        Command::Zak => zak(common),
        Command::Framebounds => framebounds(common),
        Command::Dual { delta } => dual(common, *delta),
        Command::Biortho { dual, range } => biortho(common, dual.as_deref(), *range),
        Command::Weyl { n1, k1 } => weyl(common, *n1, *k1),
        Command::Uncertainty { caps } => uncertainty(common, *caps),
        Command::BltScan { kind, levels, comparator } => blt_scan(common, *kind, levels, *comparator),
        Command::Density { spacings, twisted, radii, expect } => {
            density(common, spacings.as_deref(), *twisted, radii, *expect)
        }
        Command::Audit { suite } => audit(common, *suite),
        Command::Winding { path, steps, expect } => winding_cmd(common, *path, *steps, *expect),
        Command::Smooth { radius, pairs } => smooth(common, *radius, *pairs),
        Command::Oscillation { eps } => oscillation(common, C64::new(eps.0, eps.1)),
    }
}

fn synth(common: &Common) -> CliResult<AnalysisReport> {
    let spec = common.window.as_ref().ok_or_else(|| CliError("synth needs --window KIND".into()))?;
    let out = common.out.as_ref().ok_or_else(|| CliError("synth needs --out FILE".into()))?;
    let grid = grid(common)?;
    let f = Window::parse(spec)?.synthesize(grid)?;
    write_field(&f, out)?;
    write_csv(common, &field_to_csv(&f))?;
    let mut r = AnalysisReport::new("synth").with_grid(grid);
    r.value("norm", f.norm()).value("max_abs", f.max_abs());
    Ok(r)
}

fn zak(common: &Common) -> CliResult<AnalysisReport> {
    let f = input_field(common)?;
    let grid = f.grid();
    let n_w = wres(common, grid);
    let g = zak_forward(&f, n_w)?;
    if let Some(out) = &common.out {
        write_zak(&g, out)?;
    }
    let tol = common.tol.unwrap_or(1e-10);
    let fb = frame_bounds(&g);
    let back = zak_inverse(&g, grid.truncation(), grid.resolution())?;
    let mut r = AnalysisReport::new("zak").with_grid(grid);
    r.value("N_z", g.n_z() as f64).value("N_w", n_w as f64);
    r.value("norm.field", f.norm()).value("norm.zak", g.norm());
    r.value("A_est", fb.a_est).value("B_est", fb.b_est);
    let unitarity = (g.norm() - f.norm()).abs();
    let round_trip = back.sub(&f)?.max_abs();
    r.value("unitarity.residual", unitarity).value("round_trip.residual", round_trip);
    r.flag("unitarity.pass", unitarity <= tol * f.norm().max(1.0));
    r.flag("round_trip.pass", round_trip <= tol * f.max_abs().max(1.0));
    let quasi = quasiperiodicity_check(&g, &f)?;
    r.absorb("quasi", &quasi);
    Ok(r)
}

fn framebounds(common: &Common) -> CliResult<AnalysisReport> {
    let f = input_field(common)?;
    let grid = f.grid();
    let n = grid.resolution();
    let levels = common.refine.unwrap_or(1);
    if levels == 0 || levels > 16 || n % (1 << (levels - 1)) != 0 {
        return Err(CliError(format!("--refine {levels}: N = {n} must be divisible by 2^(levels-1)")));
    }
    let fb = if levels == 1 {
        frame_bounds(&zak_forward(&f, wres(common, grid))?)
    } else {
        let nz: Vec<usize> = (0..levels).rev().map(|i| n >> i).collect();
        frame_bounds_refined(&f, &nz)?
    };
    let mut csv = String::from("N_z,N_w,A_est,B_est\n");
    for h in &fb.history {
        csv.push_str(&format!("{},{},{:.16e},{:.16e}\n", h.n_z, h.n_w, h.a_est, h.b_est));
    }
    write_csv(common, &csv)?;
    Ok(fb.report().with_grid(grid))
}

fn dual(common: &Common, delta: Option<f64>) -> CliResult<AnalysisReport> {
    let f = input_field(common)?;
    let grid = f.grid();
    let g = zak_forward(&f, wres(common, grid))?;
    let mut r = AnalysisReport::new("dual").with_grid(grid);
    r.value("min_abs", g.min_abs()).value("guard", common.guard);
    let result = match delta {
        Some(d) => {
            r.value("regularized", 1.0).value("delta", d);
            dual_window_regularized(&g, d)
        }
        None => {
            r.value("regularized", 0.0);
            dual_window(&g, common.guard)
        }
    };
    match result {
        Ok(dual) => {
            if let Some(out) = &common.out {
                write_field(&dual, out)?;
            }
            r.value("norm.dual", dual.norm());
            r.flag("frame.pass", true);
            if delta.is_none() {
                let bio = biorthogonality_check(&f, &dual, 1)?;
                r.value("biortho.max_residual", bio.get("max_residual").unwrap_or(f64::NAN));
            }
        }
        Err(Error::NotAFrame { .. }) => {
            r.flag("frame.pass", false);
        }
        Err(e) => return Err(e.into()),
    }
    Ok(r)
}

fn biortho(common: &Common, dual_path: Option<&std::path::Path>, range: i64) -> CliResult<AnalysisReport> {
    let g = input_field(common)?;
    let dual = match dual_path {
        Some(p) => read_field(p).map_err(|e| CliError(format!("{}: {e}", p.display())))?,
        None => dual_window(&zak_forward(&g, wres(common, g.grid()))?, common.guard)?,
    };
    let mut r = biorthogonality_check(&g, &dual, range)?;
    let tol = common.tol.unwrap_or(1e-6);
    let worst = r.get("max_residual").unwrap_or(f64::INFINITY);
    r.flag("biorthogonal.pass", worst <= tol);
    let mut csv = String::from("m,n,re,im,residual\n");
    for m in -range..=range {
        for n in -range..=range {
            let get = |k: &str| r.get(&format!("entry.{m}.{n}.{k}")).unwrap_or(f64::NAN);
            csv.push_str(&format!("{m},{n},{:.16e},{:.16e},{:.16e}\n", get("re"), get("im"), get("residual")));
        }
    }
    write_csv(common, &csv)?;
    Ok(r)
}

fn weyl(common: &Common, n1: Option<usize>, k1: Option<usize>) -> CliResult<AnalysisReport> {
    let f = input_field(common)?;
    let grid = f.grid();
    let n1 = n1.unwrap_or(grid.resolution());
    let k1 = k1.unwrap_or((grid.truncation() / 2).max(1));
    let kf = weyl_kernel(&f, n1, k1)?;
    if let Some(out) = &common.out {
        write_kernel(&kf, out)?;
    }
    let tol = common.tol.unwrap_or(2e-3);
    let (hs, nf) = (hs_norm(&kf), f.norm());
    let mut r = AnalysisReport::new("weyl").with_grid(grid);
    r.value("N1", n1 as f64).value("K1", k1 as f64);
    r.value("hs_norm", hs).value("norm.field", nf).value("ratio", hs / nf);
    r.flag("plancherel.pass", (hs / nf - 0.5).abs() <= tol);
    let polarized = (hs * hs - 0.5 * nf * nf).abs() / (nf * nf);
    r.value("polarized.residual", polarized);
    r.flag("polarized.pass", polarized <= tol);
    r.absorb("intertwine", &intertwine_ladder_check(&f, n1, k1)?);
    Ok(r)
}

fn uncertainty(common: &Common, caps: Option<(usize, usize)>) -> CliResult<AnalysisReport> {
    match caps {
        Some(caps) => {
            let basis = SpecialHermiteBasis::new(caps, grid(common)?)?;
            let e = PhiExpansion::random(caps, &mut ChaCha8Rng::seed_from_u64(common.seed));
            write_csv(common, &coefficients_to_csv(&e))?;
            let mut r = uncertainty_report(&e, &basis)?;
            r.value("seed", common.seed as f64);
            Ok(r)
        }
        None => Ok(uncertainty_functional(&input_field(common)?)),
    }
}

fn blt_scan(common: &Common, kind: ScanArg, levels: &[usize], comparator: ComparatorArg) -> CliResult<AnalysisReport> {
    let kind = match kind {
        ScanArg::Example31Zbar => ScanKind::Example31Zbar,
        ScanArg::Example32Amalgam => ScanKind::Example32Amalgam,
    };
    let comparator = match comparator {
        ComparatorArg::Verbatim => Comparator::Verbatim,
        ComparatorArg::Squared => Comparator::Squared,
    };
    let scan = divergence_scan(kind, levels, common.resolution, comparator)?;
    write_csv(common, &scan.to_csv())?;
    let mut r = scan.report();
    r.value("resolution", common.resolution as f64);
    r.value("comparator.squared", if comparator == Comparator::Squared { 1.0 } else { 0.0 });
    Ok(r)
}

fn density(
    common: &Common,
    spacings: Option<&[f64]>,
    twisted: Option<(f64, f64)>,
    radii: &[f64],
    expect: Option<f64>,
) -> CliResult<AnalysisReport> {
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let extent = (2.0 * r_max).max(DEFAULT_SCAN_HALF_WIDTH + r_max) + 1.0;
    let set = match (spacings, twisted) {
        (Some(s), None) => LatticePointSet::product_lattice(s, extent)?,
        (None, Some((a, b))) => LatticePointSet::twisted_embedding(a, b, extent)?,
        _ => return Err(CliError("density needs exactly one of --spacings or --twisted".into())),
    };
    let mut r = beurling_density(&set, radii, DEFAULT_SCAN_HALF_WIDTH)?;
    if let Some(target) = expect {
        let tol = common.tol.unwrap_or(0.05);
        let key = format!("r{r_max}");
        let plus = r.get(&format!("{key}.D_plus")).unwrap_or(f64::NAN);
        let minus = r.get(&format!("{key}.D_minus")).unwrap_or(f64::NAN);
        r.value("expected", target);
        r.flag("density.pass", (plus - target).abs() <= tol * target && (minus - target).abs() <= tol * target);
    }
    Ok(r)
}

/// Deterministic smooth test field with a linear tilt.
pub fn tilted_gaussian(grid: GridSpec) -> SampledField {
    SampledField::from_fn(grid, |x, y| {
        let (u, v) = (x - 0.3, y + 0.2);
        C64::new(1.0 + 0.3 * x, 0.2 * y) * (-(u * u + v * v) / 4.0).exp()
    })
}

fn audit(common: &Common, suite: Suite) -> CliResult<AnalysisReport> {
    let grid = grid(common)?;
    match suite {
        Suite::Prop11 => audit_prop11(common, grid),
        Suite::Lemma41 => audit_lemma41(common, grid),
        Suite::Zak => audit_zak(common, grid),
        Suite::Convolution => audit_convolution(common, grid),
    }
}

fn audit_prop11(common: &Common, grid: GridSpec) -> CliResult<AnalysisReport> {
    let tol = common.tol.unwrap_or(1e-4);
    let basis = SpecialHermiteBasis::new((5, 6), grid)?;
    let i = C64::new(0.0, 1.0);
    let mut ladder = 0.0f64;
    for m in 0..=5 {
        for n in 0..=5 {
            let p = basis.phi(m, n)?;
            let up = basis.phi(m, n + 1)?.scale(i * (2.0 * n as f64 + 2.0).sqrt());
            ladder = ladder.max(zbar_apply(p).max_abs_diff_interior(&up, 2)?);
            let down = if n == 0 {
                SampledField::zeros(grid)
            } else {
                basis.phi(m, n - 1)?.scale(i * (2.0 * n as f64).sqrt())
            };
            ladder = ladder.max(z_apply(p).max_abs_diff_interior(&down, 2)?);
        }
    }
    let f = tilted_gaussian(grid);
    let g = gaussian_window(grid);
    let comm = z_apply(&zbar_apply(&f)).sub(&zbar_apply(&z_apply(&f)))?;
    let commutator = comm.max_abs_diff_interior(&f.scale(C64::new(-2.0, 0.0)), 4)?;
    let adjoint = (inner_product(&z_apply(&f), &g)? + inner_product(&f, &zbar_apply(&g))?).norm();

    let mut r = AnalysisReport::new("audit.prop11").with_grid(grid);
    r.bound("ladder", ladder, tol);
    r.bound("commutator", commutator, tol);
    r.bound("adjoint", adjoint, tol);
    let n1 = grid.resolution();
    let k1 = (grid.truncation() / 2).max(1);
    for (m, n) in [(0, 0), (1, 0)] {
        r.absorb(&format!("intertwine.phi{m}{n}"), &intertwine_ladder_check(basis.phi(m, n)?, n1, k1)?);
    }
    Ok(r)
}

fn seeded_shifts(grid: GridSpec, count: usize, seed: u64) -> Vec<C64> {
    let n = grid.resolution() as i32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let e = C64::new(rng.gen_range(-n / 2..=n / 2) as f64 / n as f64, rng.gen_range(-n / 2..=n / 2) as f64 / n as f64);
        if e.norm() > 0.0 && e.norm() <= 0.5 {
            out.push(e);
        }
    }
    out
}

fn audit_lemma41(common: &Common, grid: GridSpec) -> CliResult<AnalysisReport> {
    let f = gaussian_window(grid);
    let n_w = oscillation_wres(common, grid);
    let mut r = AnalysisReport::new("audit.lemma41").with_grid(grid);
    let mut min_margin = f64::INFINITY;
    for (k, eps) in seeded_shifts(grid, 20, common.seed).into_iter().enumerate() {
        let lemma = lemma41_audit(&f, eps)?;
        let osc = oscillation_audit(&f, eps, n_w)?;
        for rep in [&lemma, &osc] {
            for (label, v) in rep.values() {
                if label.ends_with(".margin") {
                    min_margin = min_margin.min(*v);
                }
            }
        }
        r.absorb(&format!("eps{k}.lemma41"), &lemma);
        r.absorb(&format!("eps{k}.oscillation"), &osc);
    }
    r.value("min_margin", min_margin);
    Ok(r)
}

fn random_field(grid: GridSpec, seed: u64) -> SampledField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = grid.samples_per_axis();
    let values = (0..m * m).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    SampledField::from_values(grid, values).expect("sizes match")
}

fn audit_zak(common: &Common, grid: GridSpec) -> CliResult<AnalysisReport> {
    let tol = common.tol.unwrap_or(1e-10);
    let n_w = wres(common, grid);
    let mut fields = vec![unit_cell_indicator(grid, 0.0, 0.0), gaussian_window(grid)];
    fields.extend((0..5).map(|s| random_field(grid, common.seed + s)));
    let (mut unitarity, mut inversion, mut quasi) = (0.0f64, 0.0f64, 0.0f64);
    for f in &fields {
        let g = zak_forward(f, n_w)?;
        unitarity = unitarity.max((g.norm() - f.norm()).abs());
        inversion = inversion.max(zak_inverse(&g, grid.truncation(), grid.resolution())?.sub(f)?.max_abs());
        quasi = quasi.max(quasiperiodicity_check(&g, f)?.get("max_residual").unwrap_or(f64::INFINITY));
    }
    // a field supported in |x|, |y| < 1 keeps every shift with |m|, |n| ≤ 3 on a K = 4 grid
    let compact_grid = GridSpec::new(grid.resolution(), 4)?;
    let compact = random_field(compact_grid, common.seed)
        .map_xy(|x, y, v| if x.abs() < 1.0 && y.abs() < 1.0 { v } else { C64::new(0.0, 0.0) });
    let mut covariance = 0.0f64;
    for m in -3..=3 {
        for n in -3..=3 {
            covariance = covariance.max(covariance_check(&compact, m, n, 8)?.get("residual").unwrap_or(f64::INFINITY));
        }
    }
    let mut r = AnalysisReport::new("audit.zak").with_grid(grid);
    r.value("fields", fields.len() as f64).value("N_w", n_w as f64);
    r.bound("unitarity", unitarity, tol);
    r.bound("inversion", inversion, tol);
    r.bound("quasiperiodicity", quasi, tol);
    r.bound("covariance", covariance, tol);
    Ok(r)
}

fn audit_convolution(common: &Common, grid: GridSpec) -> CliResult<AnalysisReport> {
    let tol = common.tol.unwrap_or(1e-6);
    let gauss = |tilt: f64| {
        SampledField::from_fn(grid, move |x, y| {
            C64::new((1.0 + tilt * x) * (-std::f64::consts::PI * (x * x + y * y)).exp(), 0.0)
        })
    };
    let (f, g) = (gauss(0.0), gauss(0.3));
    let conv = twisted_convolve(&f, &g, common.override_size)?;
    let zero = twisted_convolve(&f, &SampledField::zeros(grid), common.override_size)?;
    let scaled = twisted_convolve(&f.scale(C64::new(0.0, 2.0)), &g, common.override_size)?;
    let linear = scaled.sub(&conv.scale(C64::new(0.0, 2.0)))?.max_abs();
    let n1 = grid.resolution();
    let k1 = (grid.truncation() / 2).max(1);
    let kc = weyl_kernel(&conv, n1, k1)?;
    let prod = compose(&weyl_kernel(&g, n1, k1)?, &weyl_kernel(&f, n1, k1)?)?;
    let distance = hs_norm(&kc.combine(C64::new(1.0, 0.0), &prod, C64::new(-1.0, 0.0))?) / hs_norm(&prod);
    let mut r = AnalysisReport::new("audit.convolution").with_grid(grid);
    r.bound("zero", zero.max_abs(), 0.0);
    r.bound("bilinear", linear, 1e-12 * conv.max_abs().max(1.0));
    r.bound("homomorphism", distance, tol);
    Ok(r)
}

fn closed_form(window: Window) -> Option<fn(f64, f64) -> C64> {
    match window {
        Window::Gaussian => Some(|x, y| C64::new((-(x * x + y * y) / 4.0).exp() / TAU.sqrt(), 0.0)),
        Window::Chi => Some(|x, y| {
            C64::new(f64::from((0.0..1.0).contains(&x) && (0.0..1.0).contains(&y)), 0.0)
        }),
        _ => None,
    }
}

fn winding_cmd(common: &Common, path: LoopArg, steps: usize, expect: Option<f64>) -> CliResult<AnalysisReport> {
    let vertices = match path {
        LoopArg::Obstruction => obstruction_loop(),
        LoopArg::Circle => linking_circle((0.5, 0.5), 0.1, 0.0, 0.0, 64),
    };
    let (result, exact) = match named_window(common)?.and_then(closed_form) {
        Some(f) => (winding(&LatticeSum::new(f, 7), &vertices, steps), true),
        None => {
            let field = input_field(common)?;
            let g = zak_forward(&field, wres(common, field.grid()))?;
            (winding(&g, &vertices, steps), false)
        }
    };
    let mut r = match result {
        Ok(w) => w.report(),
        Err(e @ (Error::NearZero(_) | Error::PhaseStep(_))) => {
            let mut r = AnalysisReport::new("winding");
            r.flag("valid", false);
            eprintln!("{e}");
            r
        }
        Err(e) => return Err(e.into()),
    };
    r.value("closed_form", if exact { 1.0 } else { 0.0 });
    if let Some(target) = expect {
        let tol = common.tol.unwrap_or(1e-2);
        let total = r.get("total").unwrap_or(f64::NAN);
        r.value("expected", target);
        r.flag("expect.pass", (total - target).abs() <= tol);
    }
    Ok(r)
}

fn smooth(common: &Common, radius: f64, pairs: usize) -> CliResult<AnalysisReport> {
    let f = input_field(common)?;
    let g = zak_forward(&f, wres(common, f.grid()))?;
    Ok(smoothing_audit(&g, radius, pairs, common.seed)?.with_grid(f.grid()))
}

fn oscillation(common: &Common, eps: C64) -> CliResult<AnalysisReport> {
    let f = input_field(common)?;
    let n_w = oscillation_wres(common, f.grid());
    Ok(oscillation_audit(&f, eps, n_w)?.with_grid(f.grid()))
}
