//! Balian-Low demonstrators: the two divergent counterexamples, the
//! uncertainty functional, weak-BLT and Riesz-transform reports, and Beurling
//! density estimates for lattices.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::field::{amalgam_norm, inner_product, Exponent, GridSpec, SampledField};
use crate::hermite::{
    l_power, riesz_apply, riesz_reconstruct_sqrt_l, synthesize, z_coefficients, zbar_coefficients,
    PhiExpansion, Riesz, SpecialHermiteBasis,
};
use crate::report::AnalysisReport;
use crate::twistop::{twisted_translate, z_apply, zbar_apply};
use crate::C64;

/// First tent index of the second counterexample (`log k` must exceed 1).
pub const FIRST_TENT: usize = 3;

/// `e^{-8}`, the bump's value at the cell centre and its supremum.
pub const BUMP_SUP: f64 = 3.354_626_279_025_119e-4;

/// `e^{−[1/(x(1−x)) + 1/(y(1−y))]}` on the open unit square, zero elsewhere.
pub fn bump(x: f64, y: f64) -> f64 {
    if !(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0) {
        return 0.0;
    }
    let e = -(1.0 / (x * (1.0 - x)) + 1.0 / (y * (1.0 - y)));
    if e < -745.0 {
        0.0
    } else {
        e.exp()
    }
}

/// `Σ_{k ≤ m} 1/k`.
pub fn harmonic(m: usize) -> f64 {
    (1..=m).map(|k| 1.0 / k as f64).sum()
}

/// `g_M(z) = Σ_{1 ≤ k1, k2 ≤ M} (k1 k2)^{-3/2} b(x − k1, y − k2)`.
pub fn example31_field(m: usize, grid: GridSpec) -> Result<SampledField> {
    if m == 0 {
        return Err(Error::InvalidParameter("M must be at least 1".into()));
    }
    if grid.truncation() < m + 1 {
        return Err(Error::TruncationTooSmall {
            k: grid.truncation(),
            needed: m + 1,
        });
    }
    let top = m as f64;
    Ok(SampledField::from_fn(grid, |x, y| {
        let (c1, c2) = (x.floor(), y.floor());
        if c1 < 1.0 || c2 < 1.0 || c1 > top || c2 > top {
            return C64::new(0.0, 0.0);
        }
        C64::new((c1 * c2).powf(-1.5) * bump(x - c1, y - c2), 0.0)
    }))
}

/// Closed form of the `W(L^∞, ℓ¹)` norm of `g_M`.
pub fn example31_amalgam(m: usize) -> f64 {
    let s: f64 = (1..=m).map(|k| (k as f64).powf(-1.5)).sum();
    BUMP_SUP * s * s
}

/// How the plateaus `[a_k, b_k]` of the tent profile are chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PlateauRule {
    /// Start from `(k + 0.4, k + 0.6)` and halve the half-width around
    /// `k + ½` until both constraints hold.
    Shrink,
    /// `(k + lo, k + hi)` for every `k`, rejected where a constraint fails.
    Fixed { lo: f64, hi: f64 },
}

/// `[a − 1/k, b + 1/k] ⊂ [k, k+1]` and `b³ − a³ < k`.
pub fn plateau_constraints_hold(k: usize, a: f64, b: f64) -> bool {
    let kf = k as f64;
    a <= b && a - 1.0 / kf >= kf && b + 1.0 / kf <= kf + 1.0 && b.powi(3) - a.powi(3) < kf
}

/// One tent of the profile: height `1/(k log k)` on `[a, b]`, linear ramps of
/// width `1/k` on both sides.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tent {
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub height: f64,
}

impl Tent {
    fn ramp(&self) -> f64 {
        1.0 / self.k as f64
    }

    pub fn value(&self, x: f64) -> f64 {
        let w = self.ramp();
        if x < self.a - w || x > self.b + w {
            0.0
        } else if x < self.a {
            self.height * (x - (self.a - w)) / w
        } else if x <= self.b {
            self.height
        } else {
            self.height * ((self.b + w) - x) / w
        }
    }

    /// Breakpoints of the piecewise-linear shape.
    fn knots(&self) -> [f64; 4] {
        [self.a - self.ramp(), self.a, self.b, self.b + self.ramp()]
    }
}

fn plateau(k: usize, rule: PlateauRule) -> Result<(f64, f64)> {
    let kf = k as f64;
    match rule {
        PlateauRule::Shrink => {
            let mut half = 0.1;
            while half > 1e-12 {
                let (a, b) = (kf + 0.5 - half, kf + 0.5 + half);
                if plateau_constraints_hold(k, a, b) {
                    return Ok((a, b));
                }
                half /= 2.0;
            }
            Err(Error::Constraint(k))
        }
        PlateauRule::Fixed { lo, hi } => {
            let (a, b) = (kf + lo, kf + hi);
            if plateau_constraints_hold(k, a, b) {
                Ok((a, b))
            } else {
                Err(Error::Constraint(k))
            }
        }
    }
}

/// The tents `k = 3, …, k_max`.
pub fn example32_tents(k_max: usize, rule: PlateauRule) -> Result<Vec<Tent>> {
    if k_max < FIRST_TENT {
        return Err(Error::InvalidParameter(format!(
            "k_max = {k_max} is below the first tent {FIRST_TENT}"
        )));
    }
    (FIRST_TENT..=k_max)
        .map(|k| {
            let (a, b) = plateau(k, rule)?;
            let kf = k as f64;
            Ok(Tent {
                k,
                a,
                b,
                height: 1.0 / (kf * kf.ln()),
            })
        })
        .collect()
}

fn profile(tents: &[Tent], x: f64) -> f64 {
    let c = x.floor();
    if c < FIRST_TENT as f64 {
        return 0.0;
    }
    tents
        .get(c as usize - FIRST_TENT)
        .map_or(0.0, |t| t.value(x))
}

/// `f(z) = g(x) g(y)` with `g` the truncated tent sum.
pub fn example32_field(k_max: usize, grid: GridSpec, rule: PlateauRule) -> Result<SampledField> {
    let tents = example32_tents(k_max, rule)?;
    if grid.truncation() < k_max + 1 {
        return Err(Error::TruncationTooSmall {
            k: grid.truncation(),
            needed: k_max + 1,
        });
    }
    Ok(SampledField::from_fn(grid, |x, y| {
        C64::new(profile(&tents, x) * profile(&tents, y), 0.0)
    }))
}

/// `(Σ_{k=3}^{k_max} 1/(k log k))²`.
pub fn example32_amalgam(k_max: usize) -> f64 {
    let s: f64 = (FIRST_TENT..=k_max)
        .map(|k| 1.0 / (k as f64 * (k as f64).ln()))
        .sum();
    s * s
}

const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

/// `(‖Zf‖₂, ‖Z̄f‖₂)` for the separable tent field, integrated exactly.
///
/// With `u = g' + ½xg`, `v = g' − ½xg` one has `‖Zf‖² = 2‖u‖²‖g‖²` and
/// `‖Z̄f‖² = 2‖v‖²‖g‖²`; every integrand is a quartic on each linear piece.
pub fn example32_norms(k_max: usize, rule: PlateauRule) -> Result<(f64, f64)> {
    let tents = example32_tents(k_max, rule)?;
    let (mut gg, mut uu, mut vv) = (0.0, 0.0, 0.0);
    for t in &tents {
        let knots = t.knots();
        for p in knots.windows(2) {
            let (lo, hi) = (p[0], p[1]);
            let slope = (t.value(hi) - t.value(lo)) / (hi - lo);
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            for &(node, weight) in &GAUSS3 {
                let x = mid + half * node;
                let g = t.value(lo) + slope * (x - lo);
                let w = weight * half;
                gg += w * g * g;
                uu += w * (slope + 0.5 * x * g).powi(2);
                vv += w * (slope - 0.5 * x * g).powi(2);
            }
        }
    }
    Ok(((2.0 * uu * gg).sqrt(), (2.0 * vv * gg).sqrt()))
}

/// The convergent majorant `2 Σ_{k=k0+1}^{k1} 1/(k log² k)`.
pub fn example32_majorant(k0: usize, k1: usize) -> f64 {
    2.0 * (k0 + 1..=k1)
        .map(|k| 1.0 / (k as f64 * (k as f64).ln().powi(2)))
        .sum::<f64>()
}

/// Which divergent quantity a scan follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanKind {
    /// `‖Z̄g_M‖²` against `¼‖b‖₂ H_M`.
    Example31Zbar,
    /// The `W(L^∞, ℓ¹)` norm of the tent field against `(Σ 1/(k log k))²`.
    Example32Amalgam,
}

impl ScanKind {
    pub fn name(self) -> &'static str {
        match self {
            ScanKind::Example31Zbar => "example31_zbar",
            ScanKind::Example32Amalgam => "example32_amalgam",
        }
    }
}

/// Form of the lower bound in the first counterexample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparator {
    /// `¼‖b‖₂ H_M` as printed.
    Verbatim,
    /// `¼‖b‖₂² H_M`.
    Squared,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DivergenceScan {
    pub kind: ScanKind,
    pub levels: Vec<usize>,
    pub quantities: Vec<f64>,
    pub comparators: Vec<f64>,
    pub passes: Vec<bool>,
    /// Least-squares slope of the quantity against `log M` (first example)
    /// or against the comparator (second example).
    pub slope: f64,
}

impl DivergenceScan {
    pub fn passed(&self) -> bool {
        self.passes.iter().all(|&p| p)
    }

    pub fn nondecreasing(&self) -> bool {
        self.quantities.windows(2).all(|p| p[1] >= p[0])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,quantity,comparator,pass\n");
        for i in 0..self.levels.len() {
            let _ = writeln!(
                out,
                "{},{:.16e},{:.16e},{}",
                self.levels[i], self.quantities[i], self.comparators[i], self.passes[i]
            );
        }
        out
    }

    pub fn report(&self) -> AnalysisReport {
        let mut r = AnalysisReport::new("blt-scan");
        for (i, &l) in self.levels.iter().enumerate() {
            r.value(format!("level.{l}.quantity"), self.quantities[i]);
            r.value(format!("level.{l}.comparator"), self.comparators[i]);
            r.flag(format!("level.{l}.pass"), self.passes[i]);
        }
        r.value("slope", self.slope);
        r.flag("nondecreasing", self.nondecreasing());
        r
    }
}

fn check_levels(levels: &[usize]) -> Result<()> {
    if levels.is_empty() || levels.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::NonMonotoneLevels);
    }
    Ok(())
}

/// The counterexample field a scan of `kind` expects at `level`.
pub fn scan_field(kind: ScanKind, level: usize, grid: GridSpec) -> Result<SampledField> {
    match kind {
        ScanKind::Example31Zbar => example31_field(level, grid),
        ScanKind::Example32Amalgam => example32_field(level, grid, PlateauRule::Shrink),
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return f64::NAN;
    }
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Scans the given fields, which must be the generator outputs for `kind`
/// at `levels` (any other field is rejected).
pub fn scan_fields(
    kind: ScanKind,
    levels: &[usize],
    fields: &[SampledField],
    comparator: Comparator,
) -> Result<DivergenceScan> {
    check_levels(levels)?;
    if fields.len() != levels.len() {
        return Err(Error::Dimension(format!(
            "{} fields for {} levels",
            fields.len(),
            levels.len()
        )));
    }
    let mut quantities = Vec::with_capacity(levels.len());
    let mut comparators = Vec::with_capacity(levels.len());
    let mut passes = Vec::with_capacity(levels.len());
    for (&level, f) in levels.iter().zip(fields) {
        let expected = scan_field(kind, level, f.grid()).map_err(|e| {
            Error::KindMismatch(format!("{} field at level {level}: {e}", kind.name()))
        })?;
        let diff = f.sub(&expected)?.max_abs();
        if diff > 1e-12 * expected.max_abs().max(f64::MIN_POSITIVE) {
            return Err(Error::KindMismatch(format!(
                "field at level {level} is not the {} generator output (max deviation {diff:e})",
                kind.name()
            )));
        }
        let (q, c, ok) = match kind {
            ScanKind::Example31Zbar => {
                let b_norm = example31_field(1, f.grid())?.norm();
                let q = zbar_apply(f).norm_sqr();
                let scale = match comparator {
                    Comparator::Verbatim => b_norm,
                    Comparator::Squared => b_norm * b_norm,
                };
                let c = 0.25 * scale * harmonic(level);
                (q, c, q >= c)
            }
            ScanKind::Example32Amalgam => {
                let q = amalgam_norm(f, Exponent::Infinite, Exponent::Finite(1.0))?.value;
                let c = example32_amalgam(level);
                (q, c, (0.9..=1.1).contains(&(q / c)))
            }
        };
        quantities.push(q);
        comparators.push(c);
        passes.push(ok);
    }
    let xs: Vec<f64> = match kind {
        ScanKind::Example31Zbar => levels.iter().map(|&l| (l as f64).ln()).collect(),
        ScanKind::Example32Amalgam => comparators.clone(),
    };
    let slope = slope(&xs, &quantities);
    Ok(DivergenceScan {
        kind,
        levels: levels.to_vec(),
        quantities,
        comparators,
        passes,
        slope,
    })
}

/// Generates the counterexample at every level (truncation `level + 1`,
/// `resolution` samples per unit) and scans it.
pub fn divergence_scan(
    kind: ScanKind,
    levels: &[usize],
    resolution: usize,
    comparator: Comparator,
) -> Result<DivergenceScan> {
    check_levels(levels)?;
    let fields = levels
        .iter()
        .map(|&l| scan_field(kind, l, GridSpec::new(resolution, l + 1)?))
        .collect::<Result<Vec<_>>>()?;
    scan_fields(kind, levels, &fields, comparator)
}

fn sqrt_l_norm_grid(f: &SampledField) -> f64 {
    (0.5 * (z_apply(f).norm_sqr() + zbar_apply(f).norm_sqr())).sqrt()
}

/// `‖Zf‖² + ‖Z̄f‖²` on the grid, against `2‖f‖²`.
pub fn uncertainty_functional(f: &SampledField) -> AnalysisReport {
    let mut r = AnalysisReport::new("uncertainty").with_grid(f.grid());
    let n2 = f.norm_sqr();
    let value = z_apply(f).norm_sqr() + zbar_apply(f).norm_sqr();
    r.value("norm_sqr", n2)
        .value("functional.grid", value)
        .value("ratio.grid", value / (2.0 * n2));
    r.flag("bound.pass", value >= 2.0 * n2 * (1.0 - 1e-3));
    r
}

/// `Σ(4n+2)|c_{m,n}|²` against `2Σ|c|²`, with the equality case marked by
/// `equality_case = 1` when the mass above `n = 0` is at most `1e−6` of the total.
pub fn uncertainty_coefficients(e: &PhiExpansion) -> AnalysisReport {
    let mut r = AnalysisReport::new("uncertainty");
    let n2 = e.norm_sqr();
    let value: f64 = e
        .iter()
        .map(|(_, n, c)| (4.0 * n as f64 + 2.0) * c.norm_sqr())
        .sum();
    let higher: f64 = e.iter().filter(|t| t.1 > 0).map(|t| t.2.norm_sqr()).sum();
    r.value("norm_sqr", n2)
        .value("functional.coefficients", value)
        .value("ratio.coefficients", value / (2.0 * n2))
        .value("higher_mass", higher)
        .value("equality_case", if higher <= 1e-6 * n2 { 1.0 } else { 0.0 });
    r
}

/// Both forms for `f = Σ c φ`, plus their agreement relative to `‖f‖²`.
pub fn uncertainty_report(e: &PhiExpansion, basis: &SpecialHermiteBasis) -> Result<AnalysisReport> {
    let f = synthesize(e, basis)?;
    let mut r = uncertainty_functional(&f);
    let c = uncertainty_coefficients(e);
    for key in [
        "functional.coefficients",
        "ratio.coefficients",
        "higher_mass",
        "equality_case",
    ] {
        r.value(key, c.get(key).expect("coefficient report"));
    }
    let n2 = e.norm_sqr();
    let gap = (r.get("functional.grid").unwrap() - c.get("functional.coefficients").unwrap()).abs();
    r.value("agreement.relative", gap / n2);
    r.flag("agreement.pass", gap <= 1e-3 * n2);
    Ok(r)
}

fn put_complex(r: &mut AnalysisReport, label: &str, v: C64) {
    r.value(format!("{label}.re"), v.re)
        .value(format!("{label}.im"), v.im);
}

/// Quantities entering the weak Balian-Low argument for a window `g` and a
/// (regularized) dual `gt`, and the frame expansion of `⟨Zg, Zg̃⟩` truncated
/// to `|m|, |n| ≤ R` for `R = 1..=range`.
pub fn weak_blt_report(g: &SampledField, gt: &SampledField, range: i64) -> Result<AnalysisReport> {
    let pairing = inner_product(g, gt)?;
    let (zg, zgt) = (z_apply(g), z_apply(gt));
    let (zbg, zbgt) = (zbar_apply(g), zbar_apply(gt));
    let zz = inner_product(&zg, &zgt)?;
    let zbzb = inner_product(&zbg, &zbgt)?;
    let norms = [zg.norm(), zgt.norm(), zbg.norm(), zbgt.norm()];
    let mut r = AnalysisReport::new("weak-blt").with_grid(g.grid());
    put_complex(&mut r, "pairing", pairing);
    put_complex(&mut r, "zz", zz);
    put_complex(&mut r, "zbar_zbar", zbzb);
    r.value("norm.Zg", norms[0]).value("norm.Zgt", norms[1]);
    r.value("norm.Zbar_g", norms[2])
        .value("norm.Zbar_gt", norms[3]);
    r.value("product", norms.iter().product());
    // ⟨g, g̃⟩ = ½(⟨Z̄g, Z̄g̃⟩ − ⟨Zg, Zg̃⟩) from [Z, Z̄] = −2
    let form = 0.5 * (zbzb - zz);
    put_complex(&mut r, "commutator_form", form);
    r.value("commutator_form.residual", (pairing - form).norm());

    let width = (2 * range + 1) as usize;
    let mut terms = vec![C64::new(0.0, 0.0); width * width];
    for m in -range..=range {
        for n in -range..=range {
            let a = inner_product(&zg, &twisted_translate(gt, m as f64, n as f64))?;
            let b = inner_product(&twisted_translate(g, m as f64, n as f64), &zgt)?;
            terms[(m + range) as usize * width + (n + range) as usize] = a * b;
        }
    }
    for radius in 1..=range {
        let mut sum = C64::new(0.0, 0.0);
        for m in -radius..=radius {
            for n in -radius..=radius {
                sum += terms[(m + range) as usize * width + (n + range) as usize];
            }
        }
        put_complex(&mut r, &format!("expansion.R{radius}"), sum);
        r.value(format!("expansion.R{radius}.residual"), (sum - zz).norm());
    }
    Ok(r)
}

fn widen(e: &PhiExpansion, extra: usize) -> PhiExpansion {
    let (m, n) = e.caps();
    e.with_caps((m, n + extra))
}

fn item_values(
    r: &mut AnalysisReport,
    label: &str,
    e: &PhiExpansion,
    basis: &SpecialHermiteBasis,
) -> Result<f64> {
    let sqrt_l = l_power(e, 0.5).norm_sqr().sqrt();
    let f = synthesize(e, basis)?;
    let grid_form = sqrt_l_norm_grid(&f);
    let n2 = e.norm_sqr();
    let gap = (sqrt_l * sqrt_l - grid_form * grid_form).abs();
    r.value(format!("{label}.sqrt_l"), sqrt_l);
    r.value(format!("{label}.item1.grid"), grid_form);
    r.value(format!("{label}.item1.relative"), gap / n2);
    r.flag(format!("{label}.item1.pass"), gap <= 1e-4 * n2);

    let two = widen(e, 2);
    r.value(
        format!("{label}.z_zbar"),
        z_coefficients(&zbar_coefficients(&two)).norm_sqr().sqrt(),
    );
    r.value(
        format!("{label}.zbar_z"),
        zbar_coefficients(&z_coefficients(&two)).norm_sqr().sqrt(),
    );
    r.value(format!("{label}.l"), l_power(e, 1.0).norm_sqr().sqrt());
    r.value(format!("{label}.norm"), n2.sqrt());

    let one = widen(e, 1);
    r.value(
        format!("{label}.zbar_r"),
        zbar_coefficients(&riesz_apply(Riesz::R, &one))
            .norm_sqr()
            .sqrt(),
    );
    r.value(
        format!("{label}.z_rbar"),
        z_coefficients(&riesz_apply(Riesz::RBar, &one))
            .norm_sqr()
            .sqrt(),
    );
    let residual = riesz_reconstruct_sqrt_l(e).max_abs_diff(&l_power(e, 0.5));
    r.value(format!("{label}.item4.residual"), residual);
    r.flag(format!("{label}.item4.pass"), residual <= 1e-10);
    Ok(sqrt_l)
}

/// The four pairs of quantities whose simultaneous finiteness is excluded:
/// `‖L^{1/2}·‖`, `(‖ZZ̄·‖, ‖Z̄Z·‖)`, `(‖L·‖, ‖·‖)` and `(‖Z̄R·‖, ‖ZR̄·‖)`, for
/// the window and its dual, with the identities of items (1) and (4) checked.
pub fn remark56_checks(
    g: &PhiExpansion,
    gt: &PhiExpansion,
    basis: &SpecialHermiteBasis,
) -> Result<AnalysisReport> {
    let mut r = AnalysisReport::new("remark56").with_grid(basis.grid());
    let a = item_values(&mut r, "g", g, basis)?;
    let b = item_values(&mut r, "dual", gt, basis)?;
    r.value("min_sqrt_l", a.min(b))
        .value("product_sqrt_l", a * b);
    Ok(r)
}

/// `‖L^{1/2} f‖` from the grid operators, `(½(‖Zf‖² + ‖Z̄f‖²))^{1/2}`.
pub fn sqrt_l_norm(f: &SampledField) -> f64 {
    sqrt_l_norm_grid(f)
}

/// A finite piece of a uniformly discrete set in `ℝ^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticePointSet {
    dim: usize,
    description: String,
    points: Vec<Vec<f64>>,
    radius: f64,
    min_gap: f64,
}

fn sup_norm(p: &[f64]) -> f64 {
    p.iter().fold(0.0, |a, &x| a.max(x.abs()))
}

impl LatticePointSet {
    /// All points of `s_1ℤ × … × s_dℤ` in the cube `[−radius, radius]^d`.
    pub fn product_lattice(spacings: &[f64], radius: f64) -> Result<Self> {
        if spacings.is_empty() || spacings.iter().any(|&s| !(s > 0.0)) || !(radius > 0.0) {
            return Err(Error::InvalidParameter(
                "spacings and radius must be positive".into(),
            ));
        }
        let ranges: Vec<i64> = spacings
            .iter()
            .map(|s| (radius / s).floor() as i64)
            .collect();
        let mut points = Vec::new();
        let mut idx: Vec<i64> = ranges.iter().map(|r| -r).collect();
        loop {
            points.push(
                idx.iter()
                    .zip(spacings)
                    .map(|(&i, s)| i as f64 * s)
                    .collect(),
            );
            let mut axis = 0;
            while axis < idx.len() && idx[axis] == ranges[axis] {
                idx[axis] = -ranges[axis];
                axis += 1;
            }
            if axis == idx.len() {
                break;
            }
            idx[axis] += 1;
        }
        let description = format!(
            "product lattice {}",
            spacings
                .iter()
                .map(|s| format!("{s}Z"))
                .collect::<Vec<_>>()
                .join(" x ")
        );
        let min_gap = spacings.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(LatticePointSet {
            dim: spacings.len(),
            description,
            points,
            radius,
            min_gap,
        })
    }

    /// The rank-2 image `(m, n) ↦ ((am, bn), (bn, −am))` in `ℝ⁴`, cut to
    /// the cube `[−radius, radius]⁴`.
    pub fn twisted_embedding(a: f64, b: f64, radius: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && radius > 0.0) {
            return Err(Error::InvalidParameter(
                "a, b and radius must be positive".into(),
            ));
        }
        let (mr, nr) = ((radius / a).floor() as i64, (radius / b).floor() as i64);
        let mut points = Vec::new();
        for m in -mr..=mr {
            for n in -nr..=nr {
                let (x, y) = (a * m as f64, b * n as f64);
                points.push(vec![x, y, y, -x]);
            }
        }
        Ok(LatticePointSet {
            dim: 4,
            description: format!("twisted embedding a={a}, b={b}"),
            points,
            radius,
            min_gap: std::f64::consts::SQRT_2 * a.min(b),
        })
    }

    /// An arbitrary finite set, assumed complete inside `[−radius, radius]^d`.
    pub fn from_points(
        dim: usize,
        points: Vec<Vec<f64>>,
        radius: f64,
        description: impl Into<String>,
    ) -> Result<Self> {
        if dim == 0 || points.iter().any(|p| p.len() != dim) {
            return Err(Error::Dimension(format!(
                "every point must have {dim} coordinates"
            )));
        }
        let mut min_gap = f64::INFINITY;
        for (i, p) in points.iter().enumerate() {
            for q in &points[i + 1..] {
                let d = p
                    .iter()
                    .zip(q)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                min_gap = min_gap.min(d);
            }
        }
        if min_gap <= 0.0 {
            return Err(Error::InvalidParameter(
                "points must be pairwise distinct".into(),
            ));
        }
        let points = points
            .into_iter()
            .filter(|p| sup_norm(p) <= radius)
            .collect();
        Ok(LatticePointSet {
            dim,
            description: description.into(),
            points,
            radius,
            min_gap,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn min_gap(&self) -> f64 {
        self.min_gap
    }
}

/// Scan half-width used when none is given.
pub const DEFAULT_SCAN_HALF_WIDTH: f64 = 1.0;

/// `ν^±(r)` = max/min number of points in `c + [0, r)^d` over translate
/// centres `c` on a grid of step `min_gap/2` in `[−s, s)^d`; reported with
/// `ν^±(r)/r^d`.
pub fn beurling_density(
    set: &LatticePointSet,
    radii: &[f64],
    scan_half_width: f64,
) -> Result<AnalysisReport> {
    if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidParameter("radii must be positive".into()));
    }
    if !(scan_half_width > 0.0) {
        return Err(Error::InvalidParameter(
            "scan half-width must be positive".into(),
        ));
    }
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let needed = (2.0 * r_max).max(scan_half_width + r_max);
    if set.radius < needed {
        return Err(Error::Coverage(format!(
            "points cover radius {} but {needed} is needed",
            set.radius
        )));
    }
    let d = set.dim;
    let step = 0.5 * set.min_gap;
    let per_axis = ((2.0 * scan_half_width / step).ceil() as usize).max(1);
    let offsets: Vec<f64> = (0..per_axis)
        .map(|i| -scan_half_width + i as f64 * step)
        .collect();
    let mut rep = AnalysisReport::new("density");
    rep.value("dim", d as f64)
        .value("points", set.len() as f64)
        .value("min_gap", set.min_gap);
    rep.value("translates", (per_axis as f64).powi(d as i32));
    for &r in radii {
        let hi = scan_half_width + r;
        let near: Vec<&Vec<f64>> = set
            .points
            .iter()
            .filter(|p| p.iter().all(|&x| x >= -scan_half_width && x < hi))
            .collect();
        let (mut nu_plus, mut nu_minus) = (0usize, usize::MAX);
        let mut idx = vec![0usize; d];
        loop {
            let count = near
                .iter()
                .filter(|p| {
                    p.iter()
                        .zip(&idx)
                        .all(|(&x, &i)| x >= offsets[i] && x < offsets[i] + r)
                })
                .count();
            nu_plus = nu_plus.max(count);
            nu_minus = nu_minus.min(count);
            let mut axis = 0;
            while axis < d && idx[axis] + 1 == per_axis {
                idx[axis] = 0;
                axis += 1;
            }
            if axis == d {
                break;
            }
            idx[axis] += 1;
        }
        let vol = r.powi(d as i32);
        rep.value(format!("r{r}.nu_plus"), nu_plus as f64);
        rep.value(format!("r{r}.nu_minus"), nu_minus as f64);
        rep.value(format!("r{r}.D_plus"), nu_plus as f64 / vol);
        rep.value(format!("r{r}.D_minus"), nu_minus as f64 / vol);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_sup_at_centre() {
        assert!((bump(0.5, 0.5) - BUMP_SUP).abs() < 1e-18);
        assert_eq!(bump(0.0, 0.5), 0.0);
        assert_eq!(bump(1e-3, 0.5), 0.0);
    }

    #[test]
    fn single_bump_at_level_one() {
        let grid = GridSpec::new(8, 2).unwrap();
        let g = example31_field(1, grid).unwrap();
        let j = grid.index_of(1.5).unwrap();
        assert!((g.get(j, j).re - BUMP_SUP).abs() < 1e-18);
        assert_eq!(g.get(grid.index_of(0.5).unwrap(), j).re, 0.0);
        assert!(matches!(
            example31_field(2, grid),
            Err(Error::TruncationTooSmall { needed: 3, .. })
        ));
    }

    #[test]
    fn plateau_checker_matches_arithmetic() {
        for k in 3..50usize {
            let (a, b) = (k as f64 + 0.4, k as f64 + 0.6);
            let direct = a - 1.0 / k as f64 >= k as f64
                && b + 1.0 / k as f64 <= k as f64 + 1.0
                && b * b * b - a * a * a < k as f64;
            assert_eq!(plateau_constraints_hold(k, a, b), direct);
        }
        assert_eq!(
            plateau(10, PlateauRule::Fixed { lo: 0.4, hi: 0.6 })
                .unwrap_err()
                .to_string(),
            Error::Constraint(10).to_string()
        );
        let (a, b) = plateau(10, PlateauRule::Shrink).unwrap();
        assert!(plateau_constraints_hold(10, a, b));
        assert!(((a + b) / 2.0 - 10.5).abs() < 1e-15);
    }

    #[test]
    fn tent_heights() {
        let tents = example32_tents(12, PlateauRule::Shrink).unwrap();
        for t in &tents {
            assert_eq!(
                t.value(t.k as f64 + 0.5),
                1.0 / (t.k as f64 * (t.k as f64).ln())
            );
            assert_eq!(t.value(t.k as f64), 0.0);
        }
        assert!(example32_tents(2, PlateauRule::Shrink).is_err());
    }

    #[test]
    fn levels_must_increase() {
        let err = divergence_scan(
            ScanKind::Example32Amalgam,
            &[10, 5],
            4,
            Comparator::Verbatim,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonMonotoneLevels));
    }

    #[test]
    fn coefficient_functional() {
        let e = PhiExpansion::unit((2, 2), 0, 1);
        let r = uncertainty_coefficients(&e);
        assert_eq!(r.get("ratio.coefficients"), Some(3.0));
        assert_eq!(r.get("equality_case"), Some(0.0));
    }

    #[test]
    fn product_lattice_counts() {
        let set = LatticePointSet::product_lattice(&[1.0, 2.0], 3.0).unwrap();
        assert_eq!(set.len(), 7 * 3);
        assert_eq!(set.min_gap(), 1.0);
        assert!(matches!(
            beurling_density(&set, &[2.0], 1.0),
            Err(Error::Coverage(_))
        ));
    }
}
