//! Browser front end: special Hermite magnitudes, Zak transform slices and
//! phase winding along the obstruction loop.
//!
//! The plain functions return `Result<_, String>` and run natively; the
//! `wasm_*` wrappers are what the page calls.

use wasm_bindgen::prelude::*;

use twisted_tf::field::{unit_cell_indicator, GridSpec, SampledField};
use twisted_tf::hermite::{gaussian_window, special_hermite};
use twisted_tf::zak::{frame_bounds, obstruction_loop, perturbed_chi, winding, zak_forward, LatticeSum};
use twisted_tf::C64;

/// Largest samples-per-axis the page will compute.
pub const MAX_SAMPLES: usize = 256;

fn grid(resolution: usize, truncation: usize) -> Result<GridSpec, String> {
    let g = GridSpec::new(resolution, truncation).map_err(|e| e.to_string())?;
    if g.samples_per_axis() > MAX_SAMPLES {
        return Err(format!("2KN = {} exceeds {MAX_SAMPLES}", g.samples_per_axis()));
    }
    Ok(g)
}

/// `chi`, `gaussian`, `hermite M N` or `perturbed-chi AMP`.
pub fn window(spec: &str, g: GridSpec) -> Result<SampledField, String> {
    let parts: Vec<&str> = spec.split_whitespace().collect();
    let num = |i: usize| -> Result<f64, String> {
        parts
            .get(i)
            .ok_or_else(|| format!("{spec:?}: missing parameter"))?
            .parse::<f64>()
            .map_err(|e| format!("{spec:?}: {e}"))
    };
    match parts.as_slice() {
        ["chi"] => Ok(unit_cell_indicator(g, 0.0, 0.0)),
        ["gaussian"] => Ok(gaussian_window(g)),
        ["hermite", _, _] => {
            let (m, n) = (num(1)?, num(2)?);
            if m < 0.0 || n < 0.0 || m.fract() != 0.0 || n.fract() != 0.0 {
                return Err("hermite degrees must be non-negative integers".into());
            }
            special_hermite(m as usize, n as usize, g).map_err(|e| e.to_string())
        }
        ["perturbed-chi", _] => perturbed_chi(g, num(1)?).map_err(|e| e.to_string()),
        _ => Err(format!("unknown window {spec:?}")),
    }
}

/// `|φ_{m,n}|` on the full grid, row-major in `y` then `x`, preceded by the side length.
pub fn hermite_magnitude(m: usize, n: usize, resolution: usize, truncation: usize) -> Result<Vec<f64>, String> {
    let g = grid(resolution, truncation)?;
    let f = special_hermite(m, n, g).map_err(|e| e.to_string())?;
    let side = g.samples_per_axis();
    let mut out = Vec::with_capacity(side * side + 1);
    out.push(side as f64);
    for iy in 0..side {
        out.extend((0..side).map(|ix| f.get(ix, iy).norm()));
    }
    Ok(out)
}

/// `|G(z, w)|` over the `z` grid of `Q` at the fixed `w` sample `(l1, l2)`,
/// followed by `A_est` and `B_est` over the whole of `Q×Q`.
pub fn zak_slice(
    spec: &str,
    resolution: usize,
    truncation: usize,
    n_w: usize,
    l1: usize,
    l2: usize,
) -> Result<Vec<f64>, String> {
    let g = grid(resolution, truncation)?;
    let z = zak_forward(&window(spec, g)?, n_w).map_err(|e| e.to_string())?;
    if l1 >= n_w || l2 >= n_w {
        return Err(format!("w index must be below N_w = {n_w}"));
    }
    let nz = z.n_z();
    let mut out = Vec::with_capacity(nz * nz + 3);
    out.push(nz as f64);
    for j2 in 0..nz {
        out.extend((0..nz).map(|j1| z.get(j1, j2, l1, l2).norm()));
    }
    let fb = frame_bounds(&z);
    out.push(fb.a_est);
    out.push(fb.b_est);
    Ok(out)
}

/// Total phase change of the Zak transform around the obstruction loop.
/// `chi` and `gaussian` use the exact lattice sum; other windows the grid transform.
pub fn obstruction_winding(spec: &str, resolution: usize, truncation: usize, steps: usize) -> Result<f64, String> {
    let loop_ = obstruction_loop();
    let report = match spec.trim() {
        "gaussian" => {
            let c = (2.0 * std::f64::consts::PI).powf(-0.5);
            let f = move |x: f64, y: f64| C64::new(c * (-(x * x + y * y) / 4.0).exp(), 0.0);
            winding(&LatticeSum::new(f, 7), &loop_, steps)
        }
        "chi" => {
            let f = |x: f64, y: f64| {
                C64::new(f64::from((0.0..1.0).contains(&x) && (0.0..1.0).contains(&y)), 0.0)
            };
            winding(&LatticeSum::new(f, 2), &loop_, steps)
        }
        _ => {
            let g = grid(resolution, truncation)?;
            let z = zak_forward(&window(spec, g)?, (2 * truncation).max(2 * resolution) | 1)
                .map_err(|e| e.to_string())?;
            winding(&z, &loop_, steps)
        }
    };
    report.map(|r| r.total).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn wasm_hermite_magnitude(m: usize, n: usize, resolution: usize, truncation: usize) -> Result<Vec<f64>, JsError> {
    hermite_magnitude(m, n, resolution, truncation).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn wasm_zak_slice(
    spec: &str,
    resolution: usize,
    truncation: usize,
    n_w: usize,
    l1: usize,
    l2: usize,
) -> Result<Vec<f64>, JsError> {
    zak_slice(spec, resolution, truncation, n_w, l1, l2).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn wasm_obstruction_winding(spec: &str, resolution: usize, truncation: usize, steps: usize) -> Result<f64, JsError> {
    obstruction_winding(spec, resolution, truncation, steps).map_err(|e| JsError::new(&e))
}
