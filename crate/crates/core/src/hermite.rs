//! Hermite functions on ℝ, special Hermite functions φ_{m,n} on ℂ and the
//! spectral calculus of L on coefficient vectors.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{GridSpec, SampledField};
use crate::stencil;
use crate::C64;

/// Largest supported Hermite degree.
pub const HERMITE_CAP: usize = 60;

/// Default caps of a special Hermite basis.
pub const DEFAULT_CAPS: (usize, usize) = (10, 10);

fn check_degree(k: usize) -> Result<()> {
    if k > HERMITE_CAP {
        return Err(Error::CapExceeded {
            degree: k,
            cap: HERMITE_CAP,
        });
    }
    Ok(())
}

/// `h_0(x), …, h_kmax(x)` by the normalized three-term recurrence.
pub fn hermite_values(kmax: usize, x: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(kmax + 1);
    h.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if kmax >= 1 {
        h.push(2f64.sqrt() * x * h[0]);
    }
    for k in 1..kmax {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * h[k] - (kf / (kf + 1.0)).sqrt() * h[k - 1];
        h.push(next);
    }
    h
}

/// Samples of `h_k` on the 1-D grid `x_j = -K + j/N`.
pub fn hermite_1d(k: usize, grid: GridSpec) -> Result<Vec<f64>> {
    check_degree(k)?;
    Ok(grid
        .coords()
        .into_iter()
        .map(|x| hermite_values(k, x)[k])
        .collect())
}

/// Cached samples of `h_0 … h_D` on a 1-D grid.
#[derive(Clone, Debug)]
pub struct HermiteBasis1D {
    cap: usize,
    grid: GridSpec,
    samples: Vec<Vec<f64>>,
}

impl HermiteBasis1D {
    pub fn new(cap: usize, grid: GridSpec) -> Result<Self> {
        check_degree(cap)?;
        let mut samples = vec![Vec::with_capacity(grid.samples_per_axis()); cap + 1];
        for x in grid.coords() {
            for (k, v) in hermite_values(cap, x).into_iter().enumerate() {
                samples[k].push(v);
            }
        }
        Ok(HermiteBasis1D { cap, grid, samples })
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn sample(&self, k: usize) -> Result<&[f64]> {
        if k > self.cap {
            return Err(Error::CapExceeded {
                degree: k,
                cap: self.cap,
            });
        }
        Ok(&self.samples[k])
    }

    /// Rectangle-rule `⟨h_j, h_k⟩`.
    pub fn inner(&self, j: usize, k: usize) -> Result<f64> {
        let (a, b) = (self.sample(j)?, self.sample(k)?);
        Ok(self.grid.step() * a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>())
    }
}

/// The 1-D ladder operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    /// `A = -d/dx + x`
    Creation,
    /// `A* = d/dx + x`
    Annihilation,
}

/// Applies `A` or `A*` to samples on `grid` with fourth-order differences.
pub fn ladder_apply(kind: Ladder, f: &[f64], grid: GridSpec) -> Vec<f64> {
    let d = stencil::derivative(f, grid.step());
    let sign = match kind {
        Ladder::Creation => -1.0,
        Ladder::Annihilation => 1.0,
    };
    f.iter()
        .zip(d)
        .enumerate()
        .map(|(j, (v, dv))| sign * dv + grid.coord(j) * v)
        .collect()
}

/// ξ-quadrature for `φ_{m,n}(x,y) = (2π)^{-1/2} ∫ e^{iξx} h_m(ξ+y/2) h_n(ξ−y/2) dξ`.
struct XiQuadrature {
    xi: Vec<f64>,
    weight: f64,
    /// `e^{iξx}` for the x-indices we evaluate (x ≥ 0 plus the first sample).
    rows: Vec<(usize, Vec<C64>)>,
}

impl XiQuadrature {
    fn new(grid: GridSpec, max_degree: usize) -> Self {
        let n = grid.resolution();
        // integer truncation ≥ K + max(m,n)/2 + 6
        let kx = grid.truncation() + max_degree.div_ceil(2) + 6;
        let xi: Vec<f64> = (0..2 * kx * n)
            .map(|a| a as f64 / n as f64 - kx as f64)
            .collect();
        let m = grid.samples_per_axis();
        let rows = std::iter::once(0)
            .chain(m / 2..m)
            .map(|ix| {
                let x = grid.coord(ix);
                (
                    ix,
                    xi.iter().map(|&t| C64::from_polar(1.0, t * x)).collect(),
                )
            })
            .collect();
        XiQuadrature {
            xi,
            weight: (2.0 * PI).powf(-0.5) / n as f64,
            rows,
        }
    }

    /// Writes one y-column of φ given the ξ-profile `p`.
    fn fill_column(&self, p: &[f64], iy: usize, m: usize, out: &mut [C64]) {
        for (ix, row) in &self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for (e, &pv) in row.iter().zip(p) {
                acc += e * pv;
            }
            let v = acc * self.weight;
            out[ix * m + iy] = v;
            // φ(−x, y) = conj φ(x, y) because the h_k are real
            if *ix >= m / 2 + 1 {
                out[(m - ix) * m + iy] = v.conj();
            }
        }
    }
}

/// Computes every `φ_{m,n}` with `m ≤ caps.0`, `n ≤ caps.1` in one sweep.
fn special_hermite_family(caps: (usize, usize), grid: GridSpec) -> Vec<SampledField> {
    let (mc, nc) = caps;
    let top = mc.max(nc);
    let quad = XiQuadrature::new(grid, top);
    let m = grid.samples_per_axis();
    let mut out: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); m * m]; (mc + 1) * (nc + 1)];
    let mut plus = vec![vec![0.0; quad.xi.len()]; mc + 1];
    let mut minus = vec![vec![0.0; quad.xi.len()]; nc + 1];
    let mut p = vec![0.0; quad.xi.len()];
    for iy in 0..m {
        let y = grid.coord(iy);
        for (a, &t) in quad.xi.iter().enumerate() {
            for (k, v) in hermite_values(mc, t + 0.5 * y).into_iter().enumerate() {
                plus[k][a] = v;
            }
            for (k, v) in hermite_values(nc, t - 0.5 * y).into_iter().enumerate() {
                minus[k][a] = v;
            }
        }
        for mi in 0..=mc {
            for ni in 0..=nc {
                for a in 0..p.len() {
                    p[a] = plus[mi][a] * minus[ni][a];
                }
                quad.fill_column(&p, iy, m, &mut out[mi * (nc + 1) + ni]);
            }
        }
    }
    out.into_iter()
        .map(|v| SampledField::from_values(grid, v).expect("finite samples"))
        .collect()
}

/// Samples of the special Hermite function `φ_{m,n}`.
pub fn special_hermite(m: usize, n: usize, grid: GridSpec) -> Result<SampledField> {
    check_degree(m.max(n))?;
    let quad = XiQuadrature::new(grid, m.max(n));
    let size = grid.samples_per_axis();
    let mut out = vec![C64::new(0.0, 0.0); size * size];
    let mut p = vec![0.0; quad.xi.len()];
    for iy in 0..size {
        let y = grid.coord(iy);
        for (a, &t) in quad.xi.iter().enumerate() {
            p[a] = hermite_values(m, t + 0.5 * y)[m] * hermite_values(n, t - 0.5 * y)[n];
        }
        quad.fill_column(&p, iy, size, &mut out);
    }
    SampledField::from_values(grid, out)
}

/// Closed form `φ_{0,0}(z) = (2π)^{-1/2} e^{-|z|²/4}`.
pub fn gaussian_window(grid: GridSpec) -> SampledField {
    let c = (2.0 * PI).powf(-0.5);
    SampledField::from_fn(grid, |x, y| {
        C64::new(c * (-(x * x + y * y) / 4.0).exp(), 0.0)
    })
}

/// Cached `φ_{m,n}` for `m ≤ caps.0`, `n ≤ caps.1`.
#[derive(Clone, Debug)]
pub struct SpecialHermiteBasis {
    caps: (usize, usize),
    grid: GridSpec,
    samples: Vec<SampledField>,
}

impl SpecialHermiteBasis {
    pub fn new(caps: (usize, usize), grid: GridSpec) -> Result<Self> {
        check_degree(caps.0.max(caps.1))?;
        Ok(SpecialHermiteBasis {
            caps,
            grid,
            samples: special_hermite_family(caps, grid),
        })
    }

    pub fn caps(&self) -> (usize, usize) {
        self.caps
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn phi(&self, m: usize, n: usize) -> Result<&SampledField> {
        if m > self.caps.0 || n > self.caps.1 {
            return Err(Error::CapExceeded {
                degree: m.max(n),
                cap: self.caps.0.min(self.caps.1),
            });
        }
        Ok(&self.samples[m * (self.caps.1 + 1) + n])
    }
}

/// Coefficients `c_{m,n}` of an expansion in the φ basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiExpansion {
    caps: (usize, usize),
    coeffs: Vec<C64>,
}

impl PhiExpansion {
    pub fn zeros(caps: (usize, usize)) -> Self {
        PhiExpansion {
            caps,
            coeffs: vec![C64::new(0.0, 0.0); (caps.0 + 1) * (caps.1 + 1)],
        }
    }

    /// The single basis vector `φ_{m,n}`.
    pub fn unit(caps: (usize, usize), m: usize, n: usize) -> Self {
        let mut e = PhiExpansion::zeros(caps);
        e.set(m, n, C64::new(1.0, 0.0));
        e
    }

    /// Coefficients with real and imaginary parts uniform in [−1, 1).
    pub fn random(caps: (usize, usize), rng: &mut impl Rng) -> Self {
        let mut e = PhiExpansion::zeros(caps);
        for c in &mut e.coeffs {
            *c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        e
    }

    pub fn caps(&self) -> (usize, usize) {
        self.caps
    }

    fn slot(&self, m: usize, n: usize) -> usize {
        assert!(
            m <= self.caps.0 && n <= self.caps.1,
            "({m}, {n}) outside caps {:?}",
            self.caps
        );
        m * (self.caps.1 + 1) + n
    }

    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.coeffs[self.slot(m, n)]
    }

    pub fn set(&mut self, m: usize, n: usize, c: C64) {
        let s = self.slot(m, n);
        self.coeffs[s] = c;
    }

    /// `(m, n, c_{m,n})` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        let w = self.caps.1 + 1;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i / w, i % w, c))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        PhiExpansion {
            caps: self.caps,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Same coefficients under new caps (padding with zeros or clipping).
    pub fn with_caps(&self, caps: (usize, usize)) -> Self {
        let mut e = PhiExpansion::zeros(caps);
        for (m, n, c) in self.iter() {
            if m <= caps.0 && n <= caps.1 {
                e.set(m, n, c);
            }
        }
        e
    }

    pub fn max_abs_diff(&self, other: &PhiExpansion) -> f64 {
        let caps = (self.caps.0.max(other.caps.0), self.caps.1.max(other.caps.1));
        let (a, b) = (self.with_caps(caps), other.with_caps(caps));
        a.coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(u, v)| (u - v).norm())
            .fold(0.0, f64::max)
    }

    fn map_indexed(
        &self,
        caps: (usize, usize),
        f: impl Fn(usize, usize, C64) -> Option<(usize, usize, C64)>,
    ) -> Self {
        let mut out = PhiExpansion::zeros(caps);
        for (m, n, c) in self.iter() {
            if let Some((m2, n2, v)) = f(m, n, c) {
                if m2 <= caps.0 && n2 <= caps.1 {
                    let s = out.slot(m2, n2);
                    out.coeffs[s] += v;
                }
            }
        }
        out
    }
}

/// `c_{m,n} = ⟨f, φ_{m,n}⟩` for all indices within `caps`.
pub fn expand(
    f: &SampledField,
    basis: &SpecialHermiteBasis,
    caps: (usize, usize),
) -> Result<PhiExpansion> {
    if caps.0 > basis.caps.0 || caps.1 > basis.caps.1 {
        return Err(Error::CapExceeded {
            degree: caps.0.max(caps.1),
            cap: basis.caps.0.min(basis.caps.1),
        });
    }
    let mut e = PhiExpansion::zeros(caps);
    for m in 0..=caps.0 {
        for n in 0..=caps.1 {
            e.set(m, n, crate::field::inner_product(f, basis.phi(m, n)?)?);
        }
    }
    Ok(e)
}

/// `Σ c_{m,n} φ_{m,n}` on the basis grid.
pub fn synthesize(e: &PhiExpansion, basis: &SpecialHermiteBasis) -> Result<SampledField> {
    if e.caps.0 > basis.caps.0 || e.caps.1 > basis.caps.1 {
        return Err(Error::CapExceeded {
            degree: e.caps.0.max(e.caps.1),
            cap: basis.caps.0.min(basis.caps.1),
        });
    }
    let m = basis.grid.samples_per_axis();
    let mut acc = vec![C64::new(0.0, 0.0); m * m];
    for (mi, ni, c) in e.iter() {
        if c == C64::new(0.0, 0.0) {
            continue;
        }
        for (a, v) in acc.iter_mut().zip(basis.phi(mi, ni)?.values()) {
            *a += c * v;
        }
    }
    SampledField::from_values(basis.grid, acc)
}

/// `L^s`: multiplies `c_{m,n}` by `(2n+1)^s`.
pub fn l_power(e: &PhiExpansion, s: f64) -> PhiExpansion {
    e.map_indexed(e.caps, |m, n, c| {
        Some((m, n, c * (2.0 * n as f64 + 1.0).powf(s)))
    })
}

/// `Z` on coefficients: `φ_{m,n} ↦ i√(2n) φ_{m,n−1}`.
pub fn z_coefficients(e: &PhiExpansion) -> PhiExpansion {
    e.map_indexed(e.caps, |m, n, c| {
        (n > 0).then(|| (m, n - 1, c * C64::new(0.0, (2.0 * n as f64).sqrt())))
    })
}

/// `Z̄` on coefficients: `φ_{m,n} ↦ i√(2n+2) φ_{m,n+1}`, clipped at the caps.
pub fn zbar_coefficients(e: &PhiExpansion) -> PhiExpansion {
    e.map_indexed(e.caps, |m, n, c| {
        Some((m, n + 1, c * C64::new(0.0, (2.0 * n as f64 + 2.0).sqrt())))
    })
}

/// The Riesz transforms `R = Z L^{-1/2}` and `R̄ = Z̄ L^{-1/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Riesz {
    R,
    RBar,
}

/// Applies `R` or `R̄` on coefficients, clipped at the caps.
pub fn riesz_apply(kind: Riesz, e: &PhiExpansion) -> PhiExpansion {
    let inv_sqrt = l_power(e, -0.5);
    match kind {
        Riesz::R => z_coefficients(&inv_sqrt),
        Riesz::RBar => zbar_coefficients(&inv_sqrt),
    }
}

/// `−½(Z̄R + ZR̄)e`, computed with one extra n-level so nothing is clipped.
pub fn riesz_reconstruct_sqrt_l(e: &PhiExpansion) -> PhiExpansion {
    let wide = e.with_caps((e.caps.0, e.caps.1 + 1));
    let a = zbar_coefficients(&riesz_apply(Riesz::R, &wide));
    let b = z_coefficients(&riesz_apply(Riesz::RBar, &wide));
    let mut sum = a;
    for (s, v) in sum.coeffs.iter_mut().zip(&b.coeffs) {
        *s = (*s + v) * -0.5;
    }
    sum.with_caps(e.caps)
}
