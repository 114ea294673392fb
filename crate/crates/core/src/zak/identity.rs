//! `Z^t(Zf)` and `Z^t(Z̄f)` in terms of derivatives of `G = Z^t f`.
//!
//! `Z^t(Zf) = D_z G + ½ z̄ G − (1/2π) ∂_w G` and
//! `Z^t(Z̄f) = D̄_z G − ½ z G − (1/2π) ∂_w̄ G` with `D_z = ∂x − i∂y` in z and the
//! Wirtinger `∂_w = ½(∂r − i∂s)` in w.

use std::f64::consts::TAU;

use super::{zak_column, zak_forward};
use crate::error::Result;
use crate::field::SampledField;
use crate::report::AnalysisReport;
use crate::stencil;
use crate::twistop::{z_apply, zbar_apply};
use crate::C64;

const I: C64 = C64::new(0.0, 1.0);

/// Residuals of both identities in `L²(Q×Q)`, with z-derivatives from central
/// 4th-order differences of `G` evaluated on a z-grid padded by two samples and
/// w-derivatives from periodic 4th-order differences.
pub fn zak_derivative_identity(f: &SampledField, n_w: usize) -> Result<AnalysisReport> {
    let grid = f.grid();
    let n = grid.resolution();
    let kn = (grid.truncation() * n) as i64;
    let lhs12 = zak_forward(&z_apply(f), n_w)?;
    let lhs13 = zak_forward(&zbar_apply(f), n_w)?;

    // G on j ∈ [−2, N + 2)², summed directly so no quasi-periodic extension is involved
    let pad = 2usize;
    let e = n + 2 * pad;
    let mut ext = Vec::with_capacity(e * e * n_w * n_w);
    for a1 in 0..e {
        for a2 in 0..e {
            ext.extend(zak_column(
                f,
                kn + a1 as i64 - pad as i64,
                kn + a2 as i64 - pad as i64,
                n_w,
            ));
        }
    }
    let at =
        |a1: usize, a2: usize, l1: usize, l2: usize| ext[((a1 * e + a2) * n_w + l1) * n_w + l2];
    let h = 1.0 / n as f64;
    let hw = 1.0 / n_w as f64;
    let central =
        |m2: C64, m1: C64, p1: C64, p2: C64, step: f64| (m2 - p2 + (p1 - m1) * 8.0) / (12.0 * step);

    let mut line = vec![C64::new(0.0, 0.0); n_w];
    let (mut acc12, mut acc13) = (0.0, 0.0);
    let mut lhs_norm = 0.0;
    for j1 in 0..n {
        for j2 in 0..n {
            let (a1, a2) = (j1 + pad, j2 + pad);
            let z = C64::new(j1 as f64, j2 as f64) / n as f64;
            // ∂r along l1 and ∂s along l2, periodic
            let mut dr = vec![C64::new(0.0, 0.0); n_w * n_w];
            let mut ds = vec![C64::new(0.0, 0.0); n_w * n_w];
            for l2 in 0..n_w {
                for (l1, slot) in line.iter_mut().enumerate() {
                    *slot = at(a1, a2, l1, l2);
                }
                for (l1, d) in stencil::periodic_derivative(&line, hw)
                    .into_iter()
                    .enumerate()
                {
                    dr[l1 * n_w + l2] = d;
                }
            }
            for l1 in 0..n_w {
                for (l2, slot) in line.iter_mut().enumerate() {
                    *slot = at(a1, a2, l1, l2);
                }
                for (l2, d) in stencil::periodic_derivative(&line, hw)
                    .into_iter()
                    .enumerate()
                {
                    ds[l1 * n_w + l2] = d;
                }
            }
            for l1 in 0..n_w {
                for l2 in 0..n_w {
                    let g0 = at(a1, a2, l1, l2);
                    let dx = central(
                        at(a1 - 2, a2, l1, l2),
                        at(a1 - 1, a2, l1, l2),
                        at(a1 + 1, a2, l1, l2),
                        at(a1 + 2, a2, l1, l2),
                        h,
                    );
                    let dy = central(
                        at(a1, a2 - 2, l1, l2),
                        at(a1, a2 - 1, l1, l2),
                        at(a1, a2 + 1, l1, l2),
                        at(a1, a2 + 2, l1, l2),
                        h,
                    );
                    let k = l1 * n_w + l2;
                    let dw = 0.5 * (dr[k] - I * ds[k]);
                    let dwbar = 0.5 * (dr[k] + I * ds[k]);
                    let rhs12 = dx - I * dy + 0.5 * z.conj() * g0 - dw / TAU;
                    let rhs13 = dx + I * dy - 0.5 * z * g0 - dwbar / TAU;
                    let l12 = lhs12.get(j1, j2, l1, l2);
                    acc12 += (l12 - rhs12).norm_sqr();
                    acc13 += (lhs13.get(j1, j2, l1, l2) - rhs13).norm_sqr();
                    lhs_norm += l12.norm_sqr();
                }
            }
        }
    }
    let weight = 1.0 / (n * n * n_w * n_w) as f64;
    let (r12, r13) = ((weight * acc12).sqrt(), (weight * acc13).sqrt());
    let mut rep = AnalysisReport::new("zak_derivative_identity").with_grid(grid);
    rep.value("N_w", n_w as f64);
    rep.value("eq12.residual", r12).value("eq13.residual", r13);
    rep.value("eq12.relative", r12 / (weight * lhs_norm).sqrt());
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridSpec;
    use crate::hermite::gaussian_window;

    #[test]
    fn gaussian_identities_are_stencil_limited() {
        let f = gaussian_window(GridSpec::new(16, 6).unwrap());
        let rep = zak_derivative_identity(&f, 64).unwrap();
        assert!(rep.get("eq12.residual").unwrap() <= 1e-3, "{rep:?}");
        assert!(rep.get("eq13.residual").unwrap() <= 1e-3, "{rep:?}");
    }
}
