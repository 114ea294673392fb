//! Uniform grids on ℂ, sampled complex fields and the discrete calculus on them.
//!
//! A grid with resolution `N` and truncation `K` covers `[-K, K)²` with step
//! `h = 1/N`; samples sit at cell corners `x_j = -K + j/N`, so shifting by an
//! integer is an exact index shift. Fields are stored row-major in x:
//! `values[ix * M + iy]`. Everything outside the square is treated as zero.

use crate::error::{Error, Result};
use crate::stencil;
use crate::C64;

/// Resolution and truncation of a square grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridSpec {
    resolution: usize,
    truncation: usize,
}

impl GridSpec {
    /// Grid with `n` samples per unit length over `[-k, k)²`.
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "resolution N = {n} must be even and at least 4"
            )));
        }
        if k < 1 {
            return Err(Error::InvalidGrid("truncation K must be at least 1".into()));
        }
        Ok(GridSpec {
            resolution: n,
            truncation: k,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Samples per axis, `M = 2KN`.
    pub fn samples_per_axis(&self) -> usize {
        2 * self.truncation * self.resolution
    }

    pub fn step(&self) -> f64 {
        1.0 / self.resolution as f64
    }

    /// Coordinate of sample `j` along either axis.
    pub fn coord(&self, j: usize) -> f64 {
        j as f64 / self.resolution as f64 - self.truncation as f64
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.samples_per_axis())
            .map(|j| self.coord(j))
            .collect()
    }

    /// Index of the sample at coordinate `x`, if `x` is (to rounding) a grid point.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let t = (x + self.truncation as f64) * self.resolution as f64;
        let j = t.round();
        if (t - j).abs() > 1e-9 || j < 0.0 || j >= self.samples_per_axis() as f64 {
            return None;
        }
        Some(j as usize)
    }

    /// Signed sample offset of an integer coordinate shift.
    pub fn offset_of(&self, shift: i64) -> i64 {
        shift * self.resolution as i64
    }

    pub fn area(&self) -> f64 {
        let side = 2.0 * self.truncation as f64;
        side * side
    }
}

/// Which coordinate to differentiate along.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// A complex field sampled on a [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    grid: GridSpec,
    values: Vec<C64>,
}

impl SampledField {
    pub fn zeros(grid: GridSpec) -> Self {
        let m = grid.samples_per_axis();
        SampledField {
            grid,
            values: vec![C64::new(0.0, 0.0); m * m],
        }
    }

    /// Samples `f(x, y)` at every grid point.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> C64) -> Self {
        let xs = grid.coords();
        let mut values = Vec::with_capacity(xs.len() * xs.len());
        for &x in &xs {
            for &y in &xs {
                values.push(f(x, y));
            }
        }
        SampledField { grid, values }
    }

    /// Wraps raw samples; rejects wrong lengths and non-finite values.
    pub fn from_values(grid: GridSpec, values: Vec<C64>) -> Result<Self> {
        let m = grid.samples_per_axis();
        if values.len() != m * m {
            return Err(Error::Dimension(format!(
                "expected {} samples, got {}",
                m * m,
                values.len()
            )));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::InvalidParameter(
                "field values must be finite".into(),
            ));
        }
        Ok(SampledField { grid, values })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn get(&self, ix: usize, iy: usize) -> C64 {
        self.values[ix * self.grid.samples_per_axis() + iy]
    }

    /// Value at signed indices, zero outside the grid.
    pub fn get_or_zero(&self, ix: i64, iy: i64) -> C64 {
        let m = self.grid.samples_per_axis() as i64;
        if ix < 0 || iy < 0 || ix >= m || iy >= m {
            C64::new(0.0, 0.0)
        } else {
            self.values[(ix * m + iy) as usize]
        }
    }

    /// Pointwise map that also sees the coordinates.
    pub fn map_xy(&self, f: impl Fn(f64, f64, C64) -> C64) -> Self {
        let m = self.grid.samples_per_axis();
        let xs = self.grid.coords();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(xs[i / m], xs[i % m], v))
            .collect();
        SampledField {
            grid: self.grid,
            values,
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        SampledField {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: C64, other: &SampledField, b: C64) -> Result<Self> {
        check_same(&self.grid, &other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| a * u + b * v)
            .collect();
        Ok(SampledField {
            grid: self.grid,
            values,
        })
    }

    pub fn add(&self, other: &SampledField) -> Result<Self> {
        self.combine(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &SampledField) -> Result<Self> {
        self.combine(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    /// Quadrature estimate of ‖f‖₂².
    pub fn norm_sqr(&self) -> f64 {
        let h = self.grid.step();
        h * h * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest |f − g| over samples at least `margin` samples from the boundary.
    pub fn max_abs_diff_interior(&self, other: &SampledField, margin: usize) -> Result<f64> {
        check_same(&self.grid, &other.grid)?;
        let m = self.grid.samples_per_axis();
        let mut worst = 0.0f64;
        for ix in margin..m.saturating_sub(margin) {
            for iy in margin..m.saturating_sub(margin) {
                worst = worst.max((self.get(ix, iy) - other.get(ix, iy)).norm());
            }
        }
        Ok(worst)
    }
}

fn check_same(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch(format!(
            "(N={}, K={}) vs (N={}, K={})",
            a.resolution, a.truncation, b.resolution, b.truncation
        )));
    }
    Ok(())
}

pub(crate) fn require_same_grid(a: &SampledField, b: &SampledField) -> Result<()> {
    check_same(&a.grid, &b.grid)
}

/// Rectangle-rule `h² Σ f·conj(g)`.
pub fn inner_product(f: &SampledField, g: &SampledField) -> Result<C64> {
    check_same(&f.grid, &g.grid)?;
    let h = f.grid.step();
    let s: C64 = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| a * b.conj())
        .sum();
    Ok(s * (h * h))
}

/// Fourth-order partial derivative along `axis`.
pub fn partial_derivative(f: &SampledField, axis: Axis) -> SampledField {
    let m = f.grid.samples_per_axis();
    let h = f.grid.step();
    let mut out = vec![C64::new(0.0, 0.0); m * m];
    let mut line = vec![C64::new(0.0, 0.0); m];
    for a in 0..m {
        let idx = |b: usize| match axis {
            Axis::X => b * m + a,
            Axis::Y => a * m + b,
        };
        for (b, slot) in line.iter_mut().enumerate() {
            *slot = f.values[idx(b)];
        }
        for (b, d) in stencil::derivative(&line, h).into_iter().enumerate() {
            out[idx(b)] = d;
        }
    }
    SampledField {
        grid: f.grid,
        values: out,
    }
}

/// `d/dz = ½(∂x − i∂y)` or, with `conjugate`, `d/dz̄ = ½(∂x + i∂y)`.
pub fn wirtinger(f: &SampledField, conjugate: bool) -> SampledField {
    let dx = partial_derivative(f, Axis::X);
    let dy = partial_derivative(f, Axis::Y);
    let sign = if conjugate { 1.0 } else { -1.0 };
    let values = dx
        .values
        .iter()
        .zip(&dy.values)
        .map(|(a, b)| (a + C64::new(0.0, sign) * b) * 0.5)
        .collect();
    SampledField {
        grid: f.grid,
        values,
    }
}

/// Lebesgue / sequence exponent.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::InvalidExponent(p));
        }
        Ok(Exponent::Finite(p))
    }

    fn validate(self) -> Result<Self> {
        match self {
            Exponent::Finite(p) => Exponent::finite(p),
            Exponent::Infinite => Ok(self),
        }
    }

    /// ℓ^q aggregate of nonnegative terms.
    pub fn aggregate(self, terms: impl IntoIterator<Item = f64>) -> f64 {
        match self {
            Exponent::Infinite => terms.into_iter().fold(0.0, f64::max),
            Exponent::Finite(q) => terms
                .into_iter()
                .map(|t| t.powf(q))
                .sum::<f64>()
                .powf(1.0 / q),
        }
    }
}

/// Wiener amalgam norm with its per-cell breakdown.
#[derive(Clone, Debug, PartialEq)]
pub struct AmalgamNorm {
    pub p: Exponent,
    pub q: Exponent,
    pub value: f64,
    /// `((k1, k2), ‖f·χ_{k+Q}‖_p)` for every unit cell of the domain.
    pub per_cell: Vec<((i64, i64), f64)>,
}

impl AmalgamNorm {
    /// Recomputes the ℓ^q aggregate from `per_cell`.
    pub fn recompute(&self) -> f64 {
        self.q.aggregate(self.per_cell.iter().map(|c| c.1))
    }
}

/// `W(L^p, ℓ^q)` norm over the integer unit cells of the domain.
///
/// Cell `k` holds the samples with `x ∈ [k1, k1+1)`, `y ∈ [k2, k2+1)`.
pub fn amalgam_norm(f: &SampledField, p: Exponent, q: Exponent) -> Result<AmalgamNorm> {
    let p = p.validate()?;
    let q = q.validate()?;
    let n = f.grid.resolution;
    let k = f.grid.truncation as i64;
    let h2 = f.grid.step() * f.grid.step();
    let mut per_cell = Vec::with_capacity((4 * k * k) as usize);
    for c1 in 0..2 * k as usize {
        for c2 in 0..2 * k as usize {
            let cell = (c1 * n..(c1 + 1) * n)
                .flat_map(move |ix| (c2 * n..(c2 + 1) * n).map(move |iy| (ix, iy)));
            let local = match p {
                Exponent::Infinite => cell
                    .map(|(ix, iy)| f.get(ix, iy).norm())
                    .fold(0.0, f64::max),
                Exponent::Finite(p) => {
                    let s: f64 = cell.map(|(ix, iy)| f.get(ix, iy).norm().powf(p)).sum();
                    (h2 * s).powf(1.0 / p)
                }
            };
            per_cell.push(((c1 as i64 - k, c2 as i64 - k), local));
        }
    }
    let value = q.aggregate(per_cell.iter().map(|c| c.1));
    Ok(AmalgamNorm {
        p,
        q,
        value,
        per_cell,
    })
}

/// Indicator of `[x0, x0+1) × [y0, y0+1)` on the grid.
pub fn unit_cell_indicator(grid: GridSpec, x0: f64, y0: f64) -> SampledField {
    SampledField::from_fn(grid, |x, y| {
        let inside =
            x >= x0 - 1e-12 && x < x0 + 1.0 - 1e-12 && y >= y0 - 1e-12 && y < y0 + 1.0 - 1e-12;
        C64::new(if inside { 1.0 } else { 0.0 }, 0.0)
    })
}
