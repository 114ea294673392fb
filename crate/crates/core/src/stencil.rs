//! Fourth-order finite differences on uniformly spaced lines.

use std::ops::{Add, Mul, Sub};

/// Anything we can differentiate: real or complex samples.
pub trait Sample:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
}

impl<T> Sample for T where
    T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>
{
}

const LEFT0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
const LEFT1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];

fn dot<T: Sample>(c: &[f64; 5], v: [T; 5]) -> T {
    let mut acc = T::default();
    for (ci, vi) in c.iter().zip(v) {
        acc = acc + vi * *ci;
    }
    acc
}

/// Derivative of `f` sampled with spacing `h`.
///
/// Central differences in the interior; one-sided fourth-order closures on the
/// two samples nearest each end. Needs at least 5 samples.
pub fn derivative<T: Sample>(f: &[T], h: f64) -> Vec<T> {
    let n = f.len();
    assert!(n >= 5, "stencil needs at least 5 samples");
    let s = 1.0 / (12.0 * h);
    let mut out = vec![T::default(); n];
    out[0] = dot(&LEFT0, [f[0], f[1], f[2], f[3], f[4]]) * s;
    out[1] = dot(&LEFT1, [f[0], f[1], f[2], f[3], f[4]]) * s;
    for j in 2..n - 2 {
        out[j] = ((f[j + 1] - f[j - 1]) * 8.0 - (f[j + 2] - f[j - 2])) * s;
    }
    // mirrored closures pick up a sign flip
    out[n - 1] = dot(&LEFT0, [f[n - 1], f[n - 2], f[n - 3], f[n - 4], f[n - 5]]) * (-s);
    out[n - 2] = dot(&LEFT1, [f[n - 1], f[n - 2], f[n - 3], f[n - 4], f[n - 5]]) * (-s);
    out
}

const SECOND0: [f64; 6] = [45.0, -154.0, 214.0, -156.0, 61.0, -10.0];
const SECOND1: [f64; 6] = [10.0, -15.0, -4.0, 14.0, -6.0, 1.0];

fn dot6<T: Sample>(c: &[f64; 6], v: [T; 6]) -> T {
    let mut acc = T::default();
    for (ci, vi) in c.iter().zip(v) {
        acc = acc + vi * *ci;
    }
    acc
}

/// Second derivative, fourth order, with one-sided closures at both ends.
/// Needs at least 6 samples.
pub fn second_derivative<T: Sample>(f: &[T], h: f64) -> Vec<T> {
    let n = f.len();
    assert!(n >= 6, "stencil needs at least 6 samples");
    let s = 1.0 / (12.0 * h * h);
    let mut out = vec![T::default(); n];
    let head = [f[0], f[1], f[2], f[3], f[4], f[5]];
    let tail = [f[n - 1], f[n - 2], f[n - 3], f[n - 4], f[n - 5], f[n - 6]];
    out[0] = dot6(&SECOND0, head) * s;
    out[1] = dot6(&SECOND1, head) * s;
    out[n - 1] = dot6(&SECOND0, tail) * s;
    out[n - 2] = dot6(&SECOND1, tail) * s;
    for j in 2..n - 2 {
        out[j] = ((f[j + 1] + f[j - 1]) * 16.0 - (f[j + 2] + f[j - 2]) - f[j] * 30.0) * s;
    }
    out
}

/// Derivative of a periodic sequence (sample `n` wraps to sample 0).
pub fn periodic_derivative<T: Sample>(f: &[T], h: f64) -> Vec<T> {
    let n = f.len();
    assert!(n >= 5, "stencil needs at least 5 samples");
    let s = 1.0 / (12.0 * h);
    (0..n)
        .map(|j| {
            let at = |d: isize| f[(j as isize + d).rem_euclid(n as isize) as usize];
            ((at(1) - at(-1)) * 8.0 - (at(2) - at(-2))) * s
        })
        .collect()
}

/// Matrix of [`derivative`] acting on length-`n` columns, row-major.
pub fn derivative_matrix(n: usize, h: f64) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    let mut e = vec![0.0; n];
    for c in 0..n {
        e[c] = 1.0;
        let d = derivative(&e, h);
        for r in 0..n {
            m[r * n + c] = d[r];
        }
        e[c] = 0.0;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartic_is_differentiated_exactly_everywhere() {
        let h = 0.1;
        let f: Vec<f64> = (0..12).map(|j| (j as f64 * h).powi(4)).collect();
        let d = derivative(&f, h);
        for (j, dj) in d.iter().enumerate() {
            let x = j as f64 * h;
            assert!((dj - 4.0 * x.powi(3)).abs() < 1e-10, "j={j}");
        }
    }

    #[test]
    fn second_derivative_of_quintic_is_exact() {
        let h = 0.25;
        let f: Vec<f64> = (0..10).map(|j| (j as f64 * h - 1.0).powi(5)).collect();
        let d = second_derivative(&f, h);
        for (j, dj) in d.iter().enumerate() {
            let x = j as f64 * h - 1.0;
            assert!((dj - 20.0 * x.powi(3)).abs() < 1e-9, "j={j}");
        }
    }

    #[test]
    fn periodic_sine() {
        let n = 64;
        let h = 1.0 / n as f64;
        let tau = std::f64::consts::TAU;
        let f: Vec<f64> = (0..n).map(|j| (tau * j as f64 * h).sin()).collect();
        let d = periodic_derivative(&f, h);
        for (j, dj) in d.iter().enumerate() {
            assert!((dj - tau * (tau * j as f64 * h).cos()).abs() < 1e-4);
        }
    }
}
