//! The twisted average `G_r` and the oscillation audits of `Z^t f`.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};

use super::{zak_forward, ZakField};
use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::report::AnalysisReport;
use crate::twistop::{lemma41_fields, n_epsilon, z_apply, zbar_apply};
use crate::C64;

/// Box radii of the L¹ oscillation bounds.
pub const OSCILLATION_RADII: [f64; 3] = [0.5, 0.25, 0.125];

fn whole_steps(v: f64, n: usize, what: &'static str) -> Result<i64> {
    let t = v * n as f64;
    let r = t.round();
    if (t - r).abs() > 1e-9 {
        return Err(Error::Incommensurate {
            what,
            value: v,
            step: 1.0 / n as f64,
        });
    }
    Ok(r as i64)
}

fn box_steps(r: f64, n: usize, what: &'static str) -> Result<usize> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Range(format!("r = {r} must lie in (0, 1]")));
    }
    let s = whole_steps(r, n, what)?;
    Ok(s as usize)
}

/// `G_r(z, w) = r⁻⁴ ∫_{[0,r)⁴} G(z − z', w − w') e^{−2πi Im(z z̄' + w w̄')}` by the
/// left-endpoint rule on the sample grid.
pub fn smooth_gr(g: &ZakField, r: f64) -> Result<ZakField> {
    smooth_gr_shifted(g, r, (0, 0), (0, 0))
}

/// `G_r` at the shifted samples `z_j + dz/N_z`, `w_l + dw/N_w`, stored in the
/// usual `(j, l)` layout. `dz = (N_z, 0)` evaluates at `z + 1`.
pub fn smooth_gr_shifted(g: &ZakField, r: f64, dz: (i64, i64), dw: (i64, i64)) -> Result<ZakField> {
    let (nz, nw) = (g.n_z(), g.n_w());
    let rz = box_steps(r, nz, "r (z-step)")?;
    let rw = box_steps(r, nw, "r (w-step)")?;
    let (ez, ew) = (nz + rz - 1, nw + rw - 1);
    let j0 = (dz.0 - rz as i64 + 1, dz.1 - rz as i64 + 1);
    let l0 = (dw.0 - rw as i64 + 1, dw.1 - rw as i64 + 1);
    let mut ext = Vec::with_capacity(ez * ez * ew * ew);
    for a1 in 0..ez as i64 {
        for a2 in 0..ez as i64 {
            for b1 in 0..ew as i64 {
                for b2 in 0..ew as i64 {
                    ext.push(g.at(j0.0 + a1, j0.1 + a2, l0.0 + b1, l0.1 + b2));
                }
            }
        }
    }
    // average over w' first: e^{−2πi(s q₁ − r q₂)/N_w}
    let mut half = vec![C64::new(0.0, 0.0); ez * ez * nw * nw];
    let mut ps = vec![C64::new(0.0, 0.0); rw];
    let mut pr = vec![C64::new(0.0, 0.0); rw];
    for l1 in 0..nw {
        for l2 in 0..nw {
            let w = g.w_coord(l1 as i64 + dw.0, l2 as i64 + dw.1);
            for q in 0..rw {
                ps[q] = C64::from_polar(1.0, -TAU * w.im * q as f64 / nw as f64);
                pr[q] = C64::from_polar(1.0, TAU * w.re * q as f64 / nw as f64);
            }
            for a in 0..ez * ez {
                let base = a * ew * ew;
                let mut acc = C64::new(0.0, 0.0);
                for q1 in 0..rw {
                    let row = base + (l1 + rw - 1 - q1) * ew;
                    let inner: C64 = (0..rw).map(|q2| ext[row + l2 + rw - 1 - q2] * pr[q2]).sum();
                    acc += inner * ps[q1];
                }
                half[a * nw * nw + l1 * nw + l2] = acc;
            }
        }
    }
    // then over z': e^{−2πi(y p₁ − x p₂)/N_z}
    let norm = 1.0 / (rz * rz * rw * rw) as f64;
    let mut out = vec![C64::new(0.0, 0.0); nz * nz * nw * nw];
    let mut py = vec![C64::new(0.0, 0.0); rz];
    let mut px = vec![C64::new(0.0, 0.0); rz];
    for j1 in 0..nz {
        for j2 in 0..nz {
            let z = g.z_coord(j1 as i64 + dz.0, j2 as i64 + dz.1);
            for p in 0..rz {
                py[p] = C64::from_polar(1.0, -TAU * z.im * p as f64 / nz as f64);
                px[p] = C64::from_polar(1.0, TAU * z.re * p as f64 / nz as f64);
            }
            let base = (j1 * nz + j2) * nw * nw;
            for p1 in 0..rz {
                for p2 in 0..rz {
                    let a = (j1 + rz - 1 - p1) * ez + (j2 + rz - 1 - p2);
                    let ph = py[p1] * px[p2] * norm;
                    let src = &half[a * nw * nw..(a + 1) * nw * nw];
                    for (o, v) in out[base..base + nw * nw].iter_mut().zip(src) {
                        *o += v * ph;
                    }
                }
            }
        }
    }
    ZakField::from_values(nz, nw, g.truncation(), out)
}

/// `max |G_r − G|` over samples whose averaging box (for radius `interior`)
/// stays inside `Q×Q`.
pub fn smoothing_deviation(g: &ZakField, r: f64, interior: f64) -> Result<f64> {
    let gr = smooth_gr(g, r)?;
    let iz = box_steps(interior, g.n_z(), "interior radius (z-step)")? - 1;
    let iw = box_steps(interior, g.n_w(), "interior radius (w-step)")? - 1;
    let (nz, nw) = (g.n_z(), g.n_w());
    let mut worst = 0.0f64;
    for j1 in iz..nz {
        for j2 in iz..nz {
            for l1 in iw..nw {
                for l2 in iw..nw {
                    worst = worst.max((gr.get(j1, j2, l1, l2) - g.get(j1, j2, l1, l2)).norm());
                }
            }
        }
    }
    Ok(worst)
}

/// Sup, ψ and Lipschitz bounds on `G_r` with `B = max |G|²`.
///
/// Lipschitz pairs are every pair of 4-D grid neighbours plus `pairs` seeded
/// random pairs.
pub fn smoothing_audit(g: &ZakField, r: f64, pairs: usize, seed: u64) -> Result<AnalysisReport> {
    let (nz, nw) = (g.n_z(), g.n_w());
    let sqrt_b = g.max_abs();
    let gr = smooth_gr(g, r)?;
    let mut rep = AnalysisReport::new("smooth");
    rep.value("r", r).value("B", sqrt_b * sqrt_b);
    rep.bound("sup", gr.max_abs(), sqrt_b);

    for (label, dw) in [
        ("psi.w_plus_1", (nw as i64, 0)),
        ("psi.w_plus_i", (0, nw as i64)),
    ] {
        let shifted = smooth_gr_shifted(g, r, (0, 0), dw)?;
        rep.bound(label, shifted.max_abs_diff(&gr)?, TAU * sqrt_b * r);
    }
    for (label, dz) in [
        ("quasi.z_plus_1", (nz as i64, 0)),
        ("quasi.z_plus_i", (0, nz as i64)),
    ] {
        let shifted = smooth_gr_shifted(g, r, dz, (0, 0))?;
        let mut worst = 0.0f64;
        for j1 in 0..nz {
            for j2 in 0..nz {
                for l1 in 0..nw {
                    for l2 in 0..nw {
                        let w = g.w_coord(l1 as i64, l2 as i64);
                        let phase = if dz.0 != 0 { TAU * w.im } else { -TAU * w.re };
                        let d = shifted.get(j1, j2, l1, l2)
                            - gr.get(j1, j2, l1, l2) * C64::from_polar(1.0, phase);
                        worst = worst.max(d.norm());
                    }
                }
            }
        }
        rep.value(format!("{label}.deviation"), worst);
    }

    let dims = [nz, nz, nw, nw];
    let point = |i: [usize; 4]| {
        (
            g.z_coord(i[0] as i64, i[1] as i64),
            g.w_coord(i[2] as i64, i[3] as i64),
        )
    };
    let value = |i: [usize; 4]| gr.get(i[0], i[1], i[2], i[3]);
    let mut checked = 0usize;
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let mut check = |a: [usize; 4], b: [usize; 4]| {
        let ((z1, w1), (z2, w2)) = (point(a), point(b));
        let lhs = (value(a) - value(b)).norm();
        let rhs = 2.0
            * (PI * (r + z1.norm().max(w1.norm())) + 1.0 / r)
            * sqrt_b
            * ((z1 - z2).norm() + (w1 - w2).norm());
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if ratio >= worst.0 {
            worst = (ratio, lhs, rhs);
        }
        checked += 1;
    };
    for j1 in 0..nz {
        for j2 in 0..nz {
            for l1 in 0..nw {
                for l2 in 0..nw {
                    let a = [j1, j2, l1, l2];
                    for axis in 0..4 {
                        if a[axis] + 1 < dims[axis] {
                            let mut b = a;
                            b[axis] += 1;
                            check(a, b);
                        }
                    }
                }
            }
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..pairs {
        let mut pick = || [0, 1, 2, 3].map(|a| rng.gen_range(0..dims[a]));
        let (a, b) = (pick(), pick());
        if a != b {
            check(a, b);
        }
    }
    rep.value("lipschitz.pairs", checked as f64)
        .value("lipschitz.max_ratio", worst.0);
    rep.bound("lipschitz", worst.1, worst.2);
    Ok(rep)
}

/// `sqrt(h² Σ |v|²)` over the sample box `[lo, hi)²` of a grid field.
fn box_norm(f: &SampledField, lo: usize, hi: usize) -> f64 {
    let m = f.grid().samples_per_axis();
    let h = f.grid().step();
    let mut acc = 0.0;
    for ix in lo..hi {
        for iy in lo..hi {
            acc += f.values()[ix * m + iy].norm_sqr();
        }
    }
    (h * h * acc).sqrt()
}

/// Twisted translations of `G = Z^t f` in each variable against the
/// oscillation bounds, on `Q×Q` and in L¹ on the boxes of side `r` centred at
/// `(½, ½)` in both variables.
///
/// `T_{ε,1}G(z,w) = e^{2πi Im(z̄ε)} G(z − ε, w)`, `T_{ε,2}G(z,w) = e^{2πi Im(w̄ε)} G(z, w − ε)`.
/// ε must be a whole number of steps of both the field grid and the w-grid.
pub fn oscillation_audit(f: &SampledField, eps: C64, n_w: usize) -> Result<AnalysisReport> {
    let grid = f.grid();
    let n = grid.resolution();
    let ez = (
        whole_steps(eps.re, n, "eps.re")?,
        whole_steps(eps.im, n, "eps.im")?,
    );
    let ew = (
        whole_steps(eps.re, n_w, "eps.re")?,
        whole_steps(eps.im, n_w, "eps.im")?,
    );
    let fields = lemma41_fields(f, eps)?;
    let g = zak_forward(f, n_w)?;
    let a = eps.norm();
    let (ne, growth) = if a == 0.0 {
        (0, 1.0)
    } else {
        let ne = n_epsilon(eps)?;
        (ne, (1.0 + a).powi(ne as i32))
    };

    let (nz, nw) = (g.n_z(), g.n_w());
    let mut d1 = vec![0.0f64; g.values().len()];
    let mut d2 = vec![0.0f64; g.values().len()];
    for j1 in 0..nz {
        for j2 in 0..nz {
            let z = g.z_coord(j1 as i64, j2 as i64);
            for l1 in 0..nw {
                for l2 in 0..nw {
                    let w = g.w_coord(l1 as i64, l2 as i64);
                    let i = ((j1 * nz + j2) * nw + l1) * nw + l2;
                    let v = g.values()[i];
                    let (j1i, j2i, l1i, l2i) = (j1 as i64, j2 as i64, l1 as i64, l2 as i64);
                    let t1 = g.at(j1i - ez.0, j2i - ez.1, l1i, l2i)
                        * C64::from_polar(1.0, TAU * (z.re * eps.im - z.im * eps.re));
                    let t2 = g.at(j1i, j2i, l1i - ew.0, l2i - ew.1)
                        * C64::from_polar(1.0, TAU * (w.re * eps.im - w.im * eps.re));
                    d1[i] = (t1 - v).norm();
                    d2[i] = (t2 - v).norm();
                }
            }
        }
    }
    let weight = 1.0 / (nz * nz * nw * nw) as f64;
    let l2 = |d: &[f64]| (weight * d.iter().map(|x| x * x).sum::<f64>()).sqrt();

    let nf = f.norm();
    let zt = z_apply(&fields.tilde);
    let zbt = zbar_apply(&fields.tilde);
    let mut rep = AnalysisReport::new("oscillation").with_grid(grid);
    rep.value("eps.re", eps.re)
        .value("eps.im", eps.im)
        .value("eps.abs", a)
        .value("N_eps", ne as f64);
    let rhs1 = 8.0 * PI * a * nf
        + 7.5 * PI * a * (zt.norm() + zbt.norm() + fields.tilde.norm() + growth * nf);
    let rhs2 = TAU * a * growth * nf + 8.0 * PI * a * nf;
    rep.bound("thm42.j1", l2(&d1), rhs1);
    rep.bound("thm42.j2", l2(&d2), rhs2);

    let kn = grid.truncation() * n;
    let mut prev: Option<(f64, f64)> = None;
    let (mut dec1, mut dec2) = (true, true);
    for r in OSCILLATION_RADII {
        let half_z = whole_steps(r / 2.0, n, "radius")? as usize;
        let half_w = whole_steps(r / 2.0, nw, "radius")? as usize;
        let (zlo, zhi) = (nz / 2 - half_z, nz / 2 + half_z);
        let (wlo, whi) = (nw / 2 - half_w, nw / 2 + half_w);
        let (mut s1, mut s2) = (0.0, 0.0);
        for j1 in zlo..zhi {
            for j2 in zlo..zhi {
                for l1 in wlo..whi {
                    for l2 in wlo..whi {
                        let i = ((j1 * nz + j2) * nw + l1) * nw + l2;
                        s1 += d1[i];
                        s2 += d2[i];
                    }
                }
            }
        }
        let (lo, hi) = (kn + n / 2 - half_z, kn + n / 2 + half_z);
        let fchi = box_norm(f, lo, hi);
        let c1 = 8.0 * PI * fchi
            + 7.5
                * PI
                * (box_norm(&zt, lo, hi)
                    + box_norm(&zbt, lo, hi)
                    + box_norm(&fields.tilde, lo, hi)
                    + growth * fchi);
        let c2 = 8.0 * PI * growth * fchi + 8.0 * PI * fchi;
        rep.value(format!("C1.r{r}"), c1)
            .value(format!("C2.r{r}"), c2)
            .value(format!("C.r{r}"), c1 + c2);
        rep.bound(&format!("cor43.r{r}.j1"), weight * s1, r * r * a * c1);
        rep.bound(&format!("cor43.r{r}.j2"), weight * s2, r * r * a * c2);
        if let Some((p1, p2)) = prev {
            dec1 &= c1 < p1;
            dec2 &= c2 < p2;
        }
        prev = Some((c1, c2));
    }
    rep.flag("C1.decreasing", dec1).flag("C2.decreasing", dec2);
    Ok(rep)
}
