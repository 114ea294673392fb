//! The twisted Zak transform `G(z, w) = Σ_k f(z − k) e^{2πi Im(w k̄)}` on `Q×Q`.
//!
//! z samples sit at `(j₁ + ij₂)/N_z`, w samples at `(l₁ + il₂)/N_w` with
//! `w = r + is`, so `Im(w k̄) = s k₁ − r k₂`. With `N_z` equal to the field
//! resolution and `N_w ≥ 2K` the forward map and its inverse are exact discrete
//! identities, and the quadrature weights `1/N_z²`, `1/N_w²` make it unitary.

mod identity;
mod smooth;
mod winding;

use std::f64::consts::TAU;

pub use identity::zak_derivative_identity;
pub use smooth::{
    oscillation_audit, smooth_gr, smooth_gr_shifted, smoothing_audit, smoothing_deviation,
    OSCILLATION_RADII,
};
pub use winding::{
    linking_circle, obstruction_loop, winding, LatticeSum, WindingReport, ZakEvaluator,
    MAX_DOUBLINGS, NEAR_ZERO,
};

use crate::error::{Error, Result};
use crate::field::{inner_product, SampledField};
use crate::report::AnalysisReport;
use crate::twistop::twisted_translate;
use crate::C64;

/// Default guard on `min |G|` for dual-window synthesis.
pub const DEFAULT_GUARD: f64 = 1e-3;

/// Samples of a Zak transform on `Q×Q`, indexed `(j₁, j₂, l₁, l₂)` row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ZakField {
    n_z: usize,
    n_w: usize,
    truncation: usize,
    values: Vec<C64>,
}

impl ZakField {
    pub fn from_values(
        n_z: usize,
        n_w: usize,
        truncation: usize,
        values: Vec<C64>,
    ) -> Result<Self> {
        if n_z == 0 || truncation == 0 {
            return Err(Error::Dimension(format!(
                "N_z = {n_z}, K = {truncation} must be positive"
            )));
        }
        if n_w < 2 * truncation {
            return Err(Error::Aliasing {
                n_w,
                min: 2 * truncation,
            });
        }
        let len = n_z * n_z * n_w * n_w;
        if values.len() != len {
            return Err(Error::Dimension(format!(
                "expected {len} samples, got {}",
                values.len()
            )));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::Dimension("non-finite sample".into()));
        }
        Ok(ZakField {
            n_z,
            n_w,
            truncation,
            values,
        })
    }

    pub fn constant(n_z: usize, n_w: usize, truncation: usize, c: C64) -> Result<Self> {
        Self::from_values(n_z, n_w, truncation, vec![c; n_z * n_z * n_w * n_w])
    }

    pub fn n_z(&self) -> usize {
        self.n_z
    }

    pub fn n_w(&self) -> usize {
        self.n_w
    }

    /// Truncation `K` of the grid the transform came from.
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    fn index(&self, j1: usize, j2: usize, l1: usize, l2: usize) -> usize {
        ((j1 * self.n_z + j2) * self.n_w + l1) * self.n_w + l2
    }

    pub fn get(&self, j1: usize, j2: usize, l1: usize, l2: usize) -> C64 {
        self.values[self.index(j1, j2, l1, l2)]
    }

    pub fn z_coord(&self, j1: i64, j2: i64) -> C64 {
        C64::new(j1 as f64, j2 as f64) / self.n_z as f64
    }

    pub fn w_coord(&self, l1: i64, l2: i64) -> C64 {
        C64::new(l1 as f64, l2 as f64) / self.n_w as f64
    }

    /// Value at any integer sample position, extended off `Q×Q` by
    /// `G(z + m, w) = e^{2πi Im(w m̄)} G(z, w)` and periodicity in w.
    pub fn at(&self, j1: i64, j2: i64, l1: i64, l2: i64) -> C64 {
        let (nz, nw) = (self.n_z as i64, self.n_w as i64);
        let (m1, m2) = (j1.div_euclid(nz), j2.div_euclid(nz));
        let v = self.get(
            j1.rem_euclid(nz) as usize,
            j2.rem_euclid(nz) as usize,
            l1.rem_euclid(nw) as usize,
            l2.rem_euclid(nw) as usize,
        );
        if m1 == 0 && m2 == 0 {
            return v;
        }
        let w = self.w_coord(l1, l2);
        v * C64::from_polar(1.0, TAU * (w.im * m1 as f64 - w.re * m2 as f64))
    }

    /// Multilinear interpolation of the extended samples at `(z, w)`.
    pub fn interpolate(&self, z: C64, w: C64) -> C64 {
        let t = [
            z.re * self.n_z as f64,
            z.im * self.n_z as f64,
            w.re * self.n_w as f64,
            w.im * self.n_w as f64,
        ];
        let base: Vec<i64> = t.iter().map(|v| v.floor() as i64).collect();
        let frac: Vec<f64> = t.iter().zip(&base).map(|(v, b)| v - *b as f64).collect();
        let mut acc = C64::new(0.0, 0.0);
        for corner in 0..16u32 {
            let mut weight = 1.0;
            let mut idx = [0i64; 4];
            for a in 0..4 {
                let up = (corner >> a) & 1 == 1;
                weight *= if up { frac[a] } else { 1.0 - frac[a] };
                idx[a] = base[a] + up as i64;
            }
            if weight != 0.0 {
                acc += self.at(idx[0], idx[1], idx[2], idx[3]) * weight;
            }
        }
        acc
    }

    /// New field with `f` applied samplewise.
    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        ZakField {
            values: self.values.iter().map(|&v| f(v)).collect(),
            ..self.clone()
        }
    }

    /// `∫_{Q×Q} |G|²` by the matched quadrature.
    pub fn norm_sqr(&self) -> f64 {
        let w = 1.0 / (self.n_z * self.n_z * self.n_w * self.n_w) as f64;
        w * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn min_abs(&self) -> f64 {
        self.values
            .iter()
            .fold(f64::INFINITY, |m, v| m.min(v.norm()))
    }

    fn require_same_shape(&self, other: &ZakField) -> Result<()> {
        if (self.n_z, self.n_w, self.truncation) != (other.n_z, other.n_w, other.truncation) {
            return Err(Error::GridMismatch(format!(
                "Zak fields ({}, {}, {}) vs ({}, {}, {})",
                self.n_z, self.n_w, self.truncation, other.n_z, other.n_w, other.truncation
            )));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &ZakField) -> Result<f64> {
        self.require_same_shape(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm())))
    }

    /// `‖G − H‖_{L²(Q×Q)}`.
    pub fn distance(&self, other: &ZakField) -> Result<f64> {
        self.require_same_shape(other)?;
        let w = 1.0 / (self.n_z * self.n_z * self.n_w * self.n_w) as f64;
        Ok((w * self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>())
        .sqrt())
    }
}

/// `E[l][a] = e^{2πi (l/N_w)(K − a)}`, the characters for `k = K − a`.
fn character_table(n_w: usize, k: usize) -> Vec<C64> {
    let kk = 2 * k;
    let mut e = Vec::with_capacity(n_w * kk);
    for l in 0..n_w {
        for a in 0..kk {
            let t = (l as i64 * (k as i64 - a as i64)).rem_euclid(n_w as i64) as f64 / n_w as f64;
            e.push(C64::from_polar(1.0, TAU * t));
        }
    }
    e
}

/// `G(z, w_l)` for all w-samples, z given by its (possibly out-of-range) field
/// sample index; sums every k that lands on the grid. Layout `l₁·N_w + l₂`.
pub(crate) fn zak_column(f: &SampledField, bx: i64, by: i64, n_w: usize) -> Vec<C64> {
    let g = f.grid();
    let (n, m) = (g.resolution() as i64, g.samples_per_axis() as i64);
    let range = |b: i64| (-(m - 1 - b).div_euclid(n), b.div_euclid(n));
    let ((lo1, hi1), (lo2, hi2)) = (range(bx), range(by));
    let mut out = vec![C64::new(0.0, 0.0); n_w * n_w];
    if hi1 < lo1 || hi2 < lo2 {
        return out;
    }
    let (c1, c2) = ((hi1 - lo1 + 1) as usize, (hi2 - lo2 + 1) as usize);
    let nw = n_w as i64;
    let unit: Vec<C64> = (0..n_w)
        .map(|t| C64::from_polar(1.0, TAU * t as f64 / n_w as f64))
        .collect();
    let ch = |l: usize, k: i64| unit[(l as i64 * k).rem_euclid(nw) as usize];
    // e^{−2πi r k₂}
    let mut half = vec![C64::new(0.0, 0.0); c1 * n_w];
    for a1 in 0..c1 {
        let k1 = lo1 + a1 as i64;
        let row: Vec<C64> = (0..c2)
            .map(|a2| {
                f.get(
                    (bx - k1 * n) as usize,
                    (by - (lo2 + a2 as i64) * n) as usize,
                )
            })
            .collect();
        for l1 in 0..n_w {
            half[a1 * n_w + l1] = row
                .iter()
                .enumerate()
                .map(|(a2, v)| v * ch(l1, lo2 + a2 as i64).conj())
                .sum();
        }
    }
    // e^{2πi s k₁}
    for l1 in 0..n_w {
        for l2 in 0..n_w {
            out[l1 * n_w + l2] = (0..c1)
                .map(|a1| half[a1 * n_w + l1] * ch(l2, lo1 + a1 as i64))
                .sum();
        }
    }
    out
}

/// Transform at `N_z = N`.
pub fn zak_forward(f: &SampledField, n_w: usize) -> Result<ZakField> {
    zak_forward_with(f, f.grid().resolution(), n_w)
}

/// Transform sampled at `N_z` points per unit in z; `N_z` must divide `N`.
pub fn zak_forward_with(f: &SampledField, n_z: usize, n_w: usize) -> Result<ZakField> {
    let g = f.grid();
    let (n, k) = (g.resolution(), g.truncation());
    if n_w < 2 * k {
        return Err(Error::Aliasing { n_w, min: 2 * k });
    }
    if n_z == 0 || n % n_z != 0 {
        return Err(Error::ResolutionMismatch(format!(
            "N_z = {n_z} does not divide N = {n}"
        )));
    }
    let step = n / n_z;
    let kn = (k * n) as i64;
    let mut values = Vec::with_capacity(n_z * n_z * n_w * n_w);
    for j1 in 0..n_z {
        for j2 in 0..n_z {
            values.extend(zak_column(
                f,
                kn + (j1 * step) as i64,
                kn + (j2 * step) as i64,
                n_w,
            ));
        }
    }
    ZakField::from_values(n_z, n_w, k, values)
}

/// Recovers the field on the grid `(N, K)` from `f(z − k) = ∫_Q G(z, w) e^{−2πi Im(w k̄)} dw`.
pub fn zak_inverse(g: &ZakField, k: usize, n: usize) -> Result<SampledField> {
    let grid = crate::field::GridSpec::new(n, k)?;
    if g.n_z != n {
        return Err(Error::ResolutionMismatch(format!(
            "Zak field has N_z = {}, target grid N = {n}",
            g.n_z
        )));
    }
    let n_w = g.n_w;
    if n_w < 2 * k {
        return Err(Error::Aliasing { n_w, min: 2 * k });
    }
    let kk = 2 * k;
    let m = grid.samples_per_axis();
    let e = character_table(n_w, k);
    let scale = 1.0 / (n_w * n_w) as f64;
    let mut out = vec![C64::new(0.0, 0.0); m * m];
    let mut half = vec![C64::new(0.0, 0.0); n_w * kk];
    for j1 in 0..n {
        for j2 in 0..n {
            let base = (j1 * n + j2) * n_w * n_w;
            let slice = &g.values[base..base + n_w * n_w];
            // e^{−2πi s k₁}
            for l1 in 0..n_w {
                for a1 in 0..kk {
                    half[l1 * kk + a1] = (0..n_w)
                        .map(|l2| slice[l1 * n_w + l2] * e[l2 * kk + a1].conj())
                        .sum();
                }
            }
            // e^{2πi r k₂}
            for a1 in 0..kk {
                for a2 in 0..kk {
                    let v: C64 = (0..n_w)
                        .map(|l1| half[l1 * kk + a1] * e[l1 * kk + a2])
                        .sum();
                    out[(j1 + a1 * n) * m + j2 + a2 * n] = v * scale;
                }
            }
        }
    }
    SampledField::from_values(grid, out)
}

/// `Σ_k f(z − k) e^{2πi(s k₁ − r k₂)}` term by term over every k that lands on
/// the grid, z given by its sample index. Independent of [`zak_column`].
pub(crate) fn lattice_sum(f: &SampledField, bx: i64, by: i64, r: f64, s: f64) -> C64 {
    let g = f.grid();
    let (n, m) = (g.resolution() as i64, g.samples_per_axis() as i64);
    let range = |b: i64| -(m - 1 - b).div_euclid(n)..=b.div_euclid(n);
    let mut acc = C64::new(0.0, 0.0);
    for k1 in range(bx) {
        for k2 in range(by) {
            let v = f.get((bx - k1 * n) as usize, (by - k2 * n) as usize);
            if v != C64::new(0.0, 0.0) {
                acc += v * C64::from_polar(1.0, TAU * (s * k1 as f64 - r * k2 as f64));
            }
        }
    }
    acc
}

fn require_source(g: &ZakField, f: &SampledField) -> Result<usize> {
    let grid = f.grid();
    if g.truncation != grid.truncation() || grid.resolution() % g.n_z != 0 {
        return Err(Error::GridMismatch(format!(
            "Zak field (N_z = {}, K = {}) does not come from a grid with N = {}, K = {}",
            g.n_z,
            g.truncation,
            grid.resolution(),
            grid.truncation()
        )));
    }
    Ok(grid.resolution() / g.n_z)
}

/// Evaluates `Z^t f` directly at `z + 1`, `z + i`, `w + 1`, `w + i` and compares
/// with the quasi-periodicity relations applied to `G`.
pub fn quasiperiodicity_check(g: &ZakField, f: &SampledField) -> Result<AnalysisReport> {
    let step = require_source(g, f)? as i64;
    let grid = f.grid();
    let (n, kn) = (
        grid.resolution() as i64,
        (grid.truncation() * grid.resolution()) as i64,
    );
    let mut worst = [0.0f64; 5];
    for j1 in 0..g.n_z {
        for j2 in 0..g.n_z {
            let (bx, by) = (kn + j1 as i64 * step, kn + j2 as i64 * step);
            for l1 in 0..g.n_w {
                for l2 in 0..g.n_w {
                    let v = g.get(j1, j2, l1, l2);
                    let w = g.w_coord(l1 as i64, l2 as i64);
                    let (r, s) = (w.re, w.im);
                    let residuals = [
                        lattice_sum(f, bx, by, r, s) - v,
                        lattice_sum(f, bx + n, by, r, s) - v * C64::from_polar(1.0, TAU * s),
                        lattice_sum(f, bx, by + n, r, s) - v * C64::from_polar(1.0, -TAU * r),
                        lattice_sum(f, bx, by, r + 1.0, s) - v,
                        lattice_sum(f, bx, by, r, s + 1.0) - v,
                    ];
                    for (w, res) in worst.iter_mut().zip(residuals) {
                        *w = w.max(res.norm());
                    }
                }
            }
        }
    }
    let mut rep = AnalysisReport::new("quasiperiodicity").with_grid(grid);
    for (label, v) in ["direct", "z_plus_1", "z_plus_i", "w_plus_1", "w_plus_i"]
        .iter()
        .zip(worst)
    {
        rep.value(format!("residual.{label}"), v);
    }
    let max = worst[1..].iter().fold(0.0f64, |a, &b| a.max(b));
    rep.value("max_residual", max);
    rep.flag("exact", max <= 1e-10 * g.max_abs().max(1.0));
    Ok(rep)
}

/// Compares `Z^t(T^t_{(m,n)} f)` with `e^{2πi(xn − ym)} e^{2πi(rn − sm)} Z^t f`.
///
/// Exact when the shifted field stays on the grid; `mass_lost` reports how much
/// of `f` the zero-filled translation dropped.
pub fn covariance_check(f: &SampledField, m: i64, n: i64, n_w: usize) -> Result<AnalysisReport> {
    let g = zak_forward(f, n_w)?;
    let shifted = twisted_translate(f, m as f64, n as f64);
    let gt = zak_forward(&shifted, n_w)?;
    let (mf, nf) = (m as f64, n as f64);
    let mut worst = 0.0f64;
    for j1 in 0..g.n_z {
        for j2 in 0..g.n_z {
            let z = g.z_coord(j1 as i64, j2 as i64);
            for l1 in 0..g.n_w {
                for l2 in 0..g.n_w {
                    let w = g.w_coord(l1 as i64, l2 as i64);
                    let phase = TAU * (z.re * nf - z.im * mf + w.re * nf - w.im * mf);
                    let d = gt.get(j1, j2, l1, l2)
                        - g.get(j1, j2, l1, l2) * C64::from_polar(1.0, phase);
                    worst = worst.max(d.norm());
                }
            }
        }
    }
    let mut rep = AnalysisReport::new("covariance").with_grid(f.grid());
    rep.value("m", mf).value("n", nf).value("residual", worst);
    rep.value("mass_lost", (f.norm_sqr() - shifted.norm_sqr()).max(0.0));
    Ok(rep)
}

/// Grid minimum and maximum of `|G|²` at one resolution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefinementLevel {
    pub n_z: usize,
    pub n_w: usize,
    pub a_est: f64,
    pub b_est: f64,
}

/// Frame-bound estimates read off `|G|²`, with the per-resolution history.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameBounds {
    pub a_est: f64,
    pub b_est: f64,
    pub argmin_z: C64,
    pub argmin_w: C64,
    pub history: Vec<RefinementLevel>,
}

impl FrameBounds {
    /// True when `A_est` strictly decreases along the history.
    pub fn strictly_decreasing(&self) -> bool {
        self.history.windows(2).all(|p| p[1].a_est < p[0].a_est)
    }

    pub fn report(&self) -> AnalysisReport {
        let mut r = AnalysisReport::new("framebounds");
        r.value("A_est", self.a_est).value("B_est", self.b_est);
        r.value("argmin.z.re", self.argmin_z.re)
            .value("argmin.z.im", self.argmin_z.im);
        r.value("argmin.w.re", self.argmin_w.re)
            .value("argmin.w.im", self.argmin_w.im);
        for (i, h) in self.history.iter().enumerate() {
            r.value(format!("history.{i}.N_z"), h.n_z as f64);
            r.value(format!("history.{i}.N_w"), h.n_w as f64);
            r.value(format!("history.{i}.A_est"), h.a_est);
            r.value(format!("history.{i}.B_est"), h.b_est);
        }
        if self.history.len() > 1 {
            r.flag("A_est.strictly_decreasing", self.strictly_decreasing());
        }
        r
    }
}

pub fn frame_bounds(g: &ZakField) -> FrameBounds {
    let mut best = (f64::INFINITY, 0usize);
    let mut b_est = 0.0f64;
    for (i, v) in g.values.iter().enumerate() {
        let a = v.norm_sqr();
        if a < best.0 {
            best = (a, i);
        }
        b_est = b_est.max(a);
    }
    let (nz, nw) = (g.n_z, g.n_w);
    let i = best.1;
    let (l2, l1) = (i % nw, (i / nw) % nw);
    let (j2, j1) = ((i / (nw * nw)) % nz, i / (nw * nw * nz));
    FrameBounds {
        a_est: best.0,
        b_est,
        argmin_z: g.z_coord(j1 as i64, j2 as i64),
        argmin_w: g.w_coord(l1 as i64, l2 as i64),
        history: vec![RefinementLevel {
            n_z: nz,
            n_w: nw,
            a_est: best.0,
            b_est,
        }],
    }
}

/// w-resolution used by refinement studies: the smallest odd integer at least
/// `max(2K, 2N_z)`. Odd so that `s = ½`, where even windows vanish, is never sampled.
pub fn refinement_w_resolution(n_z: usize, k: usize) -> usize {
    let m = (2 * k).max(2 * n_z);
    m | 1
}

/// Frame bounds at each `N_z` in `levels` (each dividing `N`); the headline
/// values come from the finest level.
pub fn frame_bounds_refined(f: &SampledField, levels: &[usize]) -> Result<FrameBounds> {
    if levels.is_empty() || levels.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::NonMonotoneLevels);
    }
    let k = f.grid().truncation();
    let mut history = Vec::with_capacity(levels.len());
    let mut last = None;
    for &n_z in levels {
        let fb = frame_bounds(&zak_forward_with(f, n_z, refinement_w_resolution(n_z, k))?);
        history.push(fb.history[0]);
        last = Some(fb);
    }
    let mut fb = last.expect("at least one level");
    fb.history = history;
    Ok(fb)
}

/// The window whose Zak transform is `1/conj(G)`.
pub fn dual_window(g: &ZakField, guard: f64) -> Result<SampledField> {
    let min_abs = g.min_abs();
    if min_abs < guard {
        return Err(Error::NotAFrame { min_abs, guard });
    }
    zak_inverse(&g.map(|v| 1.0 / v.conj()), g.truncation, g.n_z)
}

/// Regularized dual with Zak transform `G/(|G|² + δ²)`; defined for any window.
pub fn dual_window_regularized(g: &ZakField, delta: f64) -> Result<SampledField> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} must be positive"
        )));
    }
    zak_inverse(
        &g.map(|v| v / (v.norm_sqr() + delta * delta)),
        g.truncation,
        g.n_z,
    )
}

/// Window with Zak transform `G/(|G|² + δ²)^{1/2}`: a self-dual
/// approximation of the tight frame `G/|G|`.
pub fn tight_window_regularized(g: &ZakField, delta: f64) -> Result<SampledField> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} must be positive"
        )));
    }
    zak_inverse(
        &g.map(|v| v / (v.norm_sqr() + delta * delta).sqrt()),
        g.truncation,
        g.n_z,
    )
}

/// Table of `⟨g̃, T^t_{(m,n)} g⟩` for `|m|, |n| ≤ range` against `δ_{m,0}δ_{n,0}`.
pub fn biorthogonality_check(
    g: &SampledField,
    dual: &SampledField,
    range: i64,
) -> Result<AnalysisReport> {
    crate::field::require_same_grid(g, dual)?;
    let mut rep = AnalysisReport::new("biortho").with_grid(g.grid());
    let mut worst = 0.0f64;
    for m in -range..=range {
        for n in -range..=range {
            let ip = inner_product(dual, &twisted_translate(g, m as f64, n as f64))?;
            let target = if m == 0 && n == 0 { 1.0 } else { 0.0 };
            let res = (ip - target).norm();
            worst = worst.max(res);
            rep.value(format!("entry.{m}.{n}.re"), ip.re);
            rep.value(format!("entry.{m}.{n}.im"), ip.im);
            rep.value(format!("entry.{m}.{n}.residual"), res);
        }
    }
    rep.value("range", range as f64)
        .value("max_residual", worst);
    Ok(rep)
}

/// `χ_Q + amp·χ_{Q+(1,0)}`. Its Zak transform is `1 + amp·e^{−2πi s}` on `Q×Q`,
/// so for `amp < 1` it generates an exact frame with
/// `A = (1 − amp)²`, `B = (1 + amp)²`.
pub fn perturbed_chi(grid: crate::field::GridSpec, amp: f64) -> Result<SampledField> {
    if grid.truncation() < 2 {
        return Err(Error::TruncationTooSmall {
            k: grid.truncation(),
            needed: 2,
        });
    }
    let chi = crate::field::unit_cell_indicator(grid, 0.0, 0.0);
    chi.combine(
        C64::new(1.0, 0.0),
        &crate::field::unit_cell_indicator(grid, 1.0, 0.0),
        C64::new(amp, 0.0),
    )
}

/// `Σ_{|m|,|n| ≤ range} |⟨f, T^t_{(m,n)} g⟩|²`.
pub fn frame_sum(f: &SampledField, g: &SampledField, range: i64) -> Result<f64> {
    crate::field::require_same_grid(f, g)?;
    let mut total = 0.0;
    for m in -range..=range {
        for n in -range..=range {
            total += inner_product(f, &twisted_translate(g, m as f64, n as f64))?.norm_sqr();
        }
    }
    Ok(total)
}
