//! The Weyl transform as an explicit kernel operator on a 1-D grid.
//!
//! `K_f(ξ, η) = ∫ f(x, η − ξ) e^{2πi x(ξ+η)} dx` sampled on `ξ, η ∈ [−K₁, K₁)`
//! with step `h₁ = 1/N₁`. The operator acts by `(W(f)φ)(ξ) = h₁ Σ_η K_f(ξ,η) φ(η)`,
//! so composing operators multiplies kernels with one factor `h₁`, and the
//! Hilbert–Schmidt inner product is `h₁² Σ K_f conj(K_g)`. Kernels of
//! `W(f)B` for a sampled operator matrix `B` are plain matrix products `K_f B`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::field::{inner_product, SampledField};
use crate::report::AnalysisReport;
use crate::stencil;
use crate::twistop::{interpolate, twisted_translate, z_apply, zbar_apply};
use crate::C64;

const I: C64 = C64::new(0.0, 1.0);

/// Kernel samples `K(ξ_a, η_b)` at `values[a·M₁ + b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeylKernel {
    n1: usize,
    k1: usize,
    values: Vec<C64>,
}

impl WeylKernel {
    pub fn from_values(n1: usize, k1: usize, values: Vec<C64>) -> Result<Self> {
        if n1 == 0 || k1 == 0 {
            return Err(Error::Dimension(format!(
                "N₁ = {n1}, K₁ = {k1} must be positive"
            )));
        }
        let m1 = 2 * n1 * k1;
        if values.len() != m1 * m1 {
            return Err(Error::Dimension(format!(
                "expected {} kernel samples, got {}",
                m1 * m1,
                values.len()
            )));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::Dimension("non-finite kernel sample".into()));
        }
        Ok(WeylKernel { n1, k1, values })
    }

    pub fn zeros(n1: usize, k1: usize) -> Result<Self> {
        let m1 = 2 * n1 * k1;
        Self::from_values(n1, k1, vec![C64::new(0.0, 0.0); m1 * m1])
    }

    pub fn resolution(&self) -> usize {
        self.n1
    }

    pub fn truncation(&self) -> usize {
        self.k1
    }

    /// Samples per axis `M₁ = 2K₁N₁`.
    pub fn size(&self) -> usize {
        2 * self.n1 * self.k1
    }

    pub fn step(&self) -> f64 {
        1.0 / self.n1 as f64
    }

    pub fn coord(&self, a: usize) -> f64 {
        a as f64 / self.n1 as f64 - self.k1 as f64
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn get(&self, a: usize, b: usize) -> C64 {
        self.values[a * self.size() + b]
    }

    fn require_same_grid(&self, other: &WeylKernel) -> Result<()> {
        if (self.n1, self.k1) != (other.n1, other.k1) {
            return Err(Error::GridMismatch(format!(
                "kernels on (N₁, K₁) = ({}, {}) and ({}, {})",
                self.n1, self.k1, other.n1, other.k1
            )));
        }
        Ok(())
    }

    pub fn combine(&self, a: C64, other: &WeylKernel, b: C64) -> Result<Self> {
        self.require_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(WeylKernel {
            values,
            ..self.clone()
        })
    }

    pub fn scale(&self, c: C64) -> Self {
        WeylKernel {
            values: self.values.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    /// Product with an `M₁ × M₁` sample matrix on the right, `K B`.
    pub fn times_matrix(&self, b: &[f64]) -> Result<Self> {
        let m = self.size();
        if b.len() != m * m {
            return Err(Error::Dimension(format!(
                "matrix has {} entries, expected {}",
                b.len(),
                m * m
            )));
        }
        let mut out = vec![C64::new(0.0, 0.0); m * m];
        for i in 0..m {
            let row = &self.values[i * m..(i + 1) * m];
            let dst = &mut out[i * m..(i + 1) * m];
            for (k, &a) in row.iter().enumerate() {
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for (d, &bv) in dst.iter_mut().zip(&b[k * m..(k + 1) * m]) {
                    *d += a * bv;
                }
            }
        }
        Ok(WeylKernel {
            values: out,
            ..self.clone()
        })
    }
}

/// Kernel with the pinned phase `e^{2πi x(ξ+η)}`.
pub fn weyl_kernel(f: &SampledField, n1: usize, k1: usize) -> Result<WeylKernel> {
    weyl_kernel_scaled(f, n1, k1, 4.0 * PI)
}

/// Kernel with phase `e^{iα x(ξ+η)/2}`; `α = 4π` is [`weyl_kernel`].
pub fn weyl_kernel_scaled(
    f: &SampledField,
    n1: usize,
    k1: usize,
    alpha: f64,
) -> Result<WeylKernel> {
    let grid = f.grid();
    let (n, k) = (grid.resolution(), grid.truncation());
    if 2 * k1 > k {
        return Err(Error::Range(format!(
            "K₁ = {k1} exceeds K/2 = {}: η − ξ leaves the field's y-range",
            k / 2
        )));
    }
    let m = grid.samples_per_axis();
    let m1 = 2 * n1 * k1;
    let xs = grid.coords();
    // phase by ξ+η index a+b
    let sums: Vec<f64> = (0..2 * m1)
        .map(|s| s as f64 / n1 as f64 - 2.0 * k1 as f64)
        .collect();
    let phase: Vec<C64> = xs
        .iter()
        .flat_map(|&x| {
            sums.iter()
                .map(move |&t| C64::from_polar(1.0, 0.5 * alpha * x * t))
        })
        .collect();
    let h = grid.step();
    let mut values = vec![C64::new(0.0, 0.0); m1 * m1];
    let mut column = vec![C64::new(0.0, 0.0); m];
    for a in 0..m1 {
        for b in 0..m1 {
            let y = (b as f64 - a as f64) / n1 as f64;
            if n1 == n {
                let iy = (k * n) as i64 + b as i64 - a as i64;
                for (ix, c) in column.iter_mut().enumerate() {
                    *c = f.get(ix, iy as usize);
                }
            } else {
                for (ix, c) in column.iter_mut().enumerate() {
                    *c = interpolate(f, xs[ix], y);
                }
            }
            let s = a + b;
            values[a * m1 + b] = h
                * (0..m)
                    .map(|ix| column[ix] * phase[ix * 2 * m1 + s])
                    .sum::<C64>();
        }
    }
    WeylKernel::from_values(n1, k1, values)
}

/// `h₁² Σ K_f conj(K_g)`.
pub fn hs_inner(kf: &WeylKernel, kg: &WeylKernel) -> Result<C64> {
    kf.require_same_grid(kg)?;
    let h = kf.step();
    Ok(h * h
        * kf.values
            .iter()
            .zip(&kg.values)
            .map(|(a, b)| a * b.conj())
            .sum::<C64>())
}

pub fn hs_norm(k: &WeylKernel) -> f64 {
    let h = k.step();
    (h * h * k.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
}

/// Kernel of the operator product `W(f)W(g)`: `h₁ K_f K_g`.
pub fn compose(kf: &WeylKernel, kg: &WeylKernel) -> Result<WeylKernel> {
    kf.require_same_grid(kg)?;
    let m = kf.size();
    let h = kf.step();
    let mut out = vec![C64::new(0.0, 0.0); m * m];
    for i in 0..m {
        let dst = &mut out[i * m..(i + 1) * m];
        for k in 0..m {
            let a = kf.values[i * m + k] * h;
            for (d, &b) in dst.iter_mut().zip(&kg.values[k * m..(k + 1) * m]) {
                *d += a * b;
            }
        }
    }
    WeylKernel::from_values(kf.n1, kf.k1, out)
}

/// `(ξ, η) ↦ e^{4πi(mξ + ½mn)} K_f(ξ + n, η)`, zero beyond the grid.
///
/// Fails when the rows pushed off the grid carry more than `1e−4` of the HS norm.
pub fn pi_action(m: i64, n: i64, kf: &WeylKernel) -> Result<WeylKernel> {
    let size = kf.size();
    let shift = n * kf.n1 as i64;
    let mut out = vec![C64::new(0.0, 0.0); size * size];
    let mut kept = 0.0;
    for a in 0..size {
        let src = a as i64 + shift;
        if src < 0 || src >= size as i64 {
            continue;
        }
        let xi = kf.coord(a);
        let ph = C64::from_polar(1.0, 2.0 * TAU * (m as f64 * xi + 0.5 * (m * n) as f64));
        let src = src as usize;
        for b in 0..size {
            let v = kf.values[src * size + b];
            kept += v.norm_sqr();
            out[a * size + b] = v * ph;
        }
    }
    let total: f64 = kf.values.iter().map(|v| v.norm_sqr()).sum();
    let lost = (total - kept).max(0.0).sqrt();
    if lost > 1e-4 * total.sqrt() {
        return Err(Error::Margin(format!(
            "shift n = {n} pushes {:.3e} of the kernel norm off the ξ-grid",
            lost / total.sqrt()
        )));
    }
    WeylKernel::from_values(kf.n1, kf.k1, out)
}

/// Matrices of `A = −d/dξ + ξ` and `A* = d/dξ + ξ` on the kernel's grid.
pub fn ladder_matrices(n1: usize, k1: usize) -> (Vec<f64>, Vec<f64>) {
    let m = 2 * n1 * k1;
    let h = 1.0 / n1 as f64;
    let d = stencil::derivative_matrix(m, h);
    let mut a = vec![0.0; m * m];
    let mut astar = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            let diag = if i == j {
                i as f64 * h - k1 as f64
            } else {
                0.0
            };
            a[i * m + j] = -d[i * m + j] + diag;
            astar[i * m + j] = d[i * m + j] + diag;
        }
    }
    (a, astar)
}

/// Compares `W(Zf)` with `i W(f) A` and `W(Z̄f)` with `i W(f) A*` in HS norm,
/// relative to `‖K_f‖`. Also reports the unit-frequency kernel residuals of the
/// same relations with `−i`.
pub fn intertwine_ladder_check(f: &SampledField, n1: usize, k1: usize) -> Result<AnalysisReport> {
    let (a, astar) = ladder_matrices(n1, k1);
    let zf = z_apply(f);
    let zbf = zbar_apply(f);
    let mut rep = AnalysisReport::new("intertwine").with_grid(f.grid());
    for (label, alpha, unit) in [("pinned", 4.0 * PI, I), ("unit", 1.0, -I)] {
        let kf = weyl_kernel_scaled(f, n1, k1, alpha)?;
        let norm = hs_norm(&kf);
        let ka = weyl_kernel_scaled(&zf, n1, k1, alpha)?.combine(
            C64::new(1.0, 0.0),
            &kf.times_matrix(&a)?,
            -unit,
        )?;
        let kb = weyl_kernel_scaled(&zbf, n1, k1, alpha)?.combine(
            C64::new(1.0, 0.0),
            &kf.times_matrix(&astar)?,
            -unit,
        )?;
        rep.value(format!("{label}.A.relative"), hs_norm(&ka) / norm);
        rep.value(format!("{label}.Astar.relative"), hs_norm(&kb) / norm);
    }
    let tol = 5e-3;
    let (ra, rb) = (
        rep.get("pinned.A.relative").unwrap(),
        rep.get("pinned.Astar.relative").unwrap(),
    );
    rep.flag("A.pass", ra <= tol).flag("Astar.pass", rb <= tol);
    Ok(rep)
}

/// `‖K_f‖_HS / ‖f‖₂` and the polarized residual `|⟨K_f, K_g⟩ − ½⟨f, g⟩|/(‖f‖‖g‖)`.
pub fn plancherel_report(
    f: &SampledField,
    g: &SampledField,
    n1: usize,
    k1: usize,
) -> Result<AnalysisReport> {
    let kf = weyl_kernel(f, n1, k1)?;
    let kg = weyl_kernel(g, n1, k1)?;
    let (nf, ng) = (f.norm(), g.norm());
    let mut rep = AnalysisReport::new("plancherel").with_grid(f.grid());
    rep.value("ratio", hs_norm(&kf) / nf);
    rep.value("ratio.g", hs_norm(&kg) / ng);
    let lhs = hs_inner(&kf, &kg)?;
    let rhs = 0.5 * inner_product(f, g)?;
    rep.value("polarized.residual", (lhs - rhs).norm() / (nf * ng));
    Ok(rep)
}

/// `pi_action(m, n, K_f)` against `K` of `T^t_{(m,n)} f`, relative to `‖K_f‖`.
pub fn pi_action_consistency(
    f: &SampledField,
    m: i64,
    n: i64,
    n1: usize,
    k1: usize,
) -> Result<f64> {
    let kf = weyl_kernel(f, n1, k1)?;
    let acted = pi_action(m, n, &kf)?;
    let direct = weyl_kernel(&twisted_translate(f, m as f64, n as f64), n1, k1)?;
    Ok(hs_norm(&acted.combine(C64::new(1.0, 0.0), &direct, C64::new(-1.0, 0.0))?) / hs_norm(&kf))
}
