//! Twisted translations, the operators Z, Z̄, L and twisted convolution.
//!
//! With `D = ∂x − i∂y` we use `Z = D + z̄/2` and `Z̄ = D̄ − z/2`. These are the
//! normalizations for which `Zφ_{m,n} = i√(2n) φ_{m,n−1}`, `[Z, Z̄] = −2` and
//! `L = −½(ZZ̄ + Z̄Z)` hold; `D` is twice the Wirtinger derivative of
//! [`crate::field::wirtinger`].

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::field::{partial_derivative, Axis, GridSpec, SampledField};
use crate::report::AnalysisReport;
use crate::stencil;
use crate::C64;

const I: C64 = C64::new(0.0, 1.0);

/// Shift parameters of `T^t_{(m,n)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwistedShift {
    pub m: f64,
    pub n: f64,
}

/// Sample offset if `shift` is a whole number of grid steps.
fn grid_offset(grid: GridSpec, shift: f64) -> Option<i64> {
    let t = shift * grid.resolution() as f64;
    let r = t.round();
    ((t - r).abs() < 1e-9).then_some(r as i64)
}

/// Bilinear interpolation of `f` at `(x, y)`, zero outside the grid.
pub fn interpolate(f: &SampledField, x: f64, y: f64) -> C64 {
    let g = f.grid();
    let n = g.resolution() as f64;
    let k = g.truncation() as f64;
    let (tx, ty) = ((x + k) * n, (y + k) * n);
    let (fx, fy) = (tx.floor(), ty.floor());
    let (ax, ay) = (tx - fx, ty - fy);
    let (ix, iy) = (fx as i64, fy as i64);
    f.get_or_zero(ix, iy) * ((1.0 - ax) * (1.0 - ay))
        + f.get_or_zero(ix + 1, iy) * (ax * (1.0 - ay))
        + f.get_or_zero(ix, iy + 1) * ((1.0 - ax) * ay)
        + f.get_or_zero(ix + 1, iy + 1) * (ax * ay)
}

/// `(τ_ε f)(z) = f(z − ε)`: exact index shift when ε is grid-commensurate,
/// bilinear otherwise; zero fill at the boundary.
pub fn translate(f: &SampledField, ex: f64, ey: f64) -> SampledField {
    let g = f.grid();
    match (grid_offset(g, ex), grid_offset(g, ey)) {
        (Some(dx), Some(dy)) => {
            let m = g.samples_per_axis();
            let mut out = vec![C64::new(0.0, 0.0); m * m];
            for ix in 0..m {
                for iy in 0..m {
                    out[ix * m + iy] = f.get_or_zero(ix as i64 - dx, iy as i64 - dy);
                }
            }
            SampledField::from_values(g, out).expect("shifted samples stay finite")
        }
        _ => f.map_xy(|x, y, _| interpolate(f, x - ex, y - ey)),
    }
}

/// `T^t_{(m,n)} f(z) = e^{2πi(nx − my)} f(x − m, y − n)`.
pub fn twisted_translate(f: &SampledField, m: f64, n: f64) -> SampledField {
    translate(f, m, n).map_xy(|x, y, v| v * C64::from_polar(1.0, TAU * (n * x - m * y)))
}

/// `(Df, D̄f)` with `D = ∂x − i∂y`.
fn d_pair(f: &SampledField) -> (SampledField, SampledField) {
    let dx = partial_derivative(f, Axis::X);
    let dy = partial_derivative(f, Axis::Y);
    let d = dx.combine(C64::new(1.0, 0.0), &dy, -I).expect("same grid");
    let dbar = dx.combine(C64::new(1.0, 0.0), &dy, I).expect("same grid");
    (d, dbar)
}

/// `Zf = (∂x − i∂y)f + ½ z̄ f`.
pub fn z_apply(f: &SampledField) -> SampledField {
    let (d, _) = d_pair(f);
    let mut out = d;
    out = out
        .add(&f.map_xy(|x, y, v| 0.5 * C64::new(x, -y) * v))
        .expect("same grid");
    out
}

/// `Z̄f = (∂x + i∂y)f − ½ z f`.
pub fn zbar_apply(f: &SampledField) -> SampledField {
    let (_, dbar) = d_pair(f);
    dbar.sub(&f.map_xy(|x, y, v| 0.5 * C64::new(x, y) * v))
        .expect("same grid")
}

fn second_partial(f: &SampledField, axis: Axis) -> SampledField {
    let g = f.grid();
    let m = g.samples_per_axis();
    let mut out = vec![C64::new(0.0, 0.0); m * m];
    let mut line = vec![C64::new(0.0, 0.0); m];
    for a in 0..m {
        let idx = |b: usize| match axis {
            Axis::X => b * m + a,
            Axis::Y => a * m + b,
        };
        for (b, slot) in line.iter_mut().enumerate() {
            *slot = f.values()[idx(b)];
        }
        for (b, d) in stencil::second_derivative(&line, g.step())
            .into_iter()
            .enumerate()
        {
            out[idx(b)] = d;
        }
    }
    SampledField::from_values(g, out).expect("finite")
}

/// `Lf = −Δf + ¼|z|² f − i(x∂y − y∂x)f` from the direct formula.
pub fn l_apply(f: &SampledField) -> SampledField {
    let lap = second_partial(f, Axis::X)
        .add(&second_partial(f, Axis::Y))
        .expect("same grid");
    let dx = partial_derivative(f, Axis::X);
    let dy = partial_derivative(f, Axis::Y);
    let m = f.grid().samples_per_axis();
    let xs = f.grid().coords();
    let values = (0..m * m)
        .map(|i| {
            let (x, y) = (xs[i / m], xs[i % m]);
            -lap.values()[i] + 0.25 * (x * x + y * y) * f.values()[i]
                - I * (x * dy.values()[i] - y * dx.values()[i])
        })
        .collect();
    SampledField::from_values(f.grid(), values).expect("finite")
}

/// `Lf = −½(ZZ̄ + Z̄Z)f` by composing the first-order operators.
pub fn l_apply_composed(f: &SampledField) -> SampledField {
    let a = z_apply(&zbar_apply(f));
    let b = zbar_apply(&z_apply(f));
    a.combine(C64::new(-0.5, 0.0), &b, C64::new(-0.5, 0.0))
        .expect("same grid")
}

/// The three fields of the oscillation lemma for a shift ε.
#[derive(Clone, Debug)]
pub struct Lemma41Fields {
    /// `f̃(z) = f(z) e^{2πi(yε₁ − xε₂)}`
    pub tilde: SampledField,
    /// `τ_ε f(z) = f(z − ε)`
    pub tau: SampledField,
    /// `f_ε(z) = f(z − ε) e^{2πi(xε₂ − yε₁)}`
    pub shifted: SampledField,
}

pub fn lemma41_fields(f: &SampledField, eps: C64) -> Result<Lemma41Fields> {
    let limit = f.grid().truncation() as f64 / 2.0;
    if eps.norm() >= limit {
        return Err(Error::ShiftTooLarge {
            eps: eps.norm(),
            limit,
        });
    }
    let (e1, e2) = (eps.re, eps.im);
    let tilde = f.map_xy(|x, y, v| v * C64::from_polar(1.0, TAU * (y * e1 - x * e2)));
    let tau = translate(f, e1, e2);
    let shifted = tau.map_xy(|x, y, v| v * C64::from_polar(1.0, TAU * (x * e2 - y * e1)));
    Ok(Lemma41Fields {
        tilde,
        tau,
        shifted,
    })
}

/// Smallest positive `N` with `(1 + |ε|)^{-N} < |ε|`.
pub fn n_epsilon(eps: C64) -> Result<u32> {
    let a = eps.norm();
    if a == 0.0 {
        return Err(Error::ZeroEpsilon);
    }
    let mut n = 1u32;
    while (1.0 + a).powi(-(n as i32)) >= a {
        n += 1;
    }
    Ok(n)
}

/// Checks the three inequalities of the oscillation lemma for `f` and `ε`.
///
/// ε must be grid-commensurate so the translation is exact.
pub fn lemma41_audit(f: &SampledField, eps: C64) -> Result<AnalysisReport> {
    let g = f.grid();
    for (what, v) in [("eps.re", eps.re), ("eps.im", eps.im)] {
        if grid_offset(g, v).is_none() {
            return Err(Error::Incommensurate {
                what,
                value: v,
                step: g.step(),
            });
        }
    }
    let fields = lemma41_fields(f, eps)?;
    let ne = n_epsilon(eps)?;
    let a = eps.norm();
    let growth = (1.0 + a).powi(ne as i32);
    let nf = f.norm();
    let common = z_apply(&fields.tilde).norm()
        + zbar_apply(&fields.tilde).norm()
        + fields.tilde.norm()
        + growth * nf;
    let rhs23 = 7.5 * PI * a * common;
    let mut r = AnalysisReport::new("lemma41").with_grid(g);
    r.value("eps.abs", a).value("N_eps", ne as f64);
    r.bound("i", fields.tilde.sub(f)?.norm(), TAU * a * growth * nf);
    r.bound("ii", fields.tau.sub(f)?.norm(), rhs23);
    r.bound("iii", fields.shifted.sub(f)?.norm(), rhs23);
    Ok(r)
}

/// `‖[Z, T^t_{(m,n)}] f‖₂` together with the closed form
/// `[Z, T^t_{(m,n)}] = (m − in)(½ − 2π) T^t_{(m,n)}` it must match.
pub fn z_commutator_report(f: &SampledField, m: i64, n: i64) -> AnalysisReport {
    let t = |h: &SampledField| twisted_translate(h, m as f64, n as f64);
    let zt = z_apply(&t(f));
    let tz = t(&z_apply(f));
    let comm = zt.sub(&tz).expect("same grid");
    let predicted = t(f).scale(C64::new(m as f64, -(n as f64)) * (0.5 - TAU));
    let mut r = AnalysisReport::new("z_commutator").with_grid(f.grid());
    r.value("commutator_norm", comm.norm());
    r.value(
        "closed_form_residual",
        comm.sub(&predicted).expect("same grid").norm(),
    );
    r
}

/// Guard for the O(M⁴) direct sums.
pub const DIRECT_SUM_LIMIT: usize = 64;

/// `(f × g)(z) = ∫ f(z − w) g(w) e^{−2πi Im(z w̄)} dw` by direct summation.
pub fn twisted_convolve(
    f: &SampledField,
    g: &SampledField,
    override_size: bool,
) -> Result<SampledField> {
    crate::field::require_same_grid(f, g)?;
    let grid = f.grid();
    let m = grid.samples_per_axis();
    if m > DIRECT_SUM_LIMIT && !override_size {
        return Err(Error::GridTooLarge(m));
    }
    let xs = grid.coords();
    // e^{−2πi a b} over coordinate pairs; Im(z w̄) = y_z x_w − x_z y_w
    let phase: Vec<C64> = xs
        .iter()
        .flat_map(|&a| xs.iter().map(move |&b| C64::from_polar(1.0, -TAU * a * b)))
        .collect();
    let kn = (grid.truncation() * grid.resolution()) as i64;
    let h2 = grid.step() * grid.step();
    let mut out = vec![C64::new(0.0, 0.0); m * m];
    for zx in 0..m {
        for zy in 0..m {
            let mut acc = C64::new(0.0, 0.0);
            for wx in 0..m {
                // x_z − x_w sits at index zx − wx + KN
                let dx = zx as i64 - wx as i64 + kn;
                if dx < 0 || dx >= m as i64 {
                    continue;
                }
                let p1 = phase[zy * m + wx];
                for wy in 0..m {
                    let dy = zy as i64 - wy as i64 + kn;
                    if dy < 0 || dy >= m as i64 {
                        continue;
                    }
                    let gv = g.get(wx, wy);
                    if gv == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let p = p1 * phase[zx * m + wy].conj();
                    acc += f.get(dx as usize, dy as usize) * gv * p;
                }
            }
            out[zx * m + zy] = acc * h2;
        }
    }
    SampledField::from_values(grid, out)
}
