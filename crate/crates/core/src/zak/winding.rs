//! Phase tracking of Zak transforms along closed loops in `ℂ²`.

use std::f64::consts::{PI, TAU};

use super::ZakField;
use crate::error::{Error, Result};
use crate::report::AnalysisReport;
use crate::C64;

/// Refinement cap: a segment's step count is doubled at most this many times.
pub const MAX_DOUBLINGS: u32 = 12;
/// Samples with `|G|` below this abort the unwrap.
pub const NEAR_ZERO: f64 = 1e-8;

// refine until every step is below this; anything under π is still unambiguous
const TARGET_STEP: f64 = PI / 4.0;

/// Anything that can be evaluated at arbitrary `(z, w)`.
pub trait ZakEvaluator {
    fn eval(&self, z: C64, w: C64) -> C64;
}

impl ZakEvaluator for ZakField {
    fn eval(&self, z: C64, w: C64) -> C64 {
        self.interpolate(z, w)
    }
}

/// `Σ_{|k₁|,|k₂| ≤ radius} f(z − k) e^{2πi Im(w k̄)}` for a closed-form `f`.
pub struct LatticeSum<F> {
    f: F,
    radius: i64,
}

impl<F: Fn(f64, f64) -> C64> LatticeSum<F> {
    pub fn new(f: F, radius: i64) -> Self {
        LatticeSum { f, radius }
    }
}

impl<F: Fn(f64, f64) -> C64> ZakEvaluator for LatticeSum<F> {
    fn eval(&self, z: C64, w: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for k1 in -self.radius..=self.radius {
            for k2 in -self.radius..=self.radius {
                let v = (self.f)(z.re - k1 as f64, z.im - k2 as f64);
                acc += v * C64::from_polar(1.0, TAU * (w.im * k1 as f64 - w.re * k2 as f64));
            }
        }
        acc
    }
}

/// Unwrapped phase along a polyline.
#[derive(Clone, Debug, PartialEq)]
pub struct WindingReport {
    /// Polyline vertices `(z, w)`.
    pub vertices: Vec<(C64, C64)>,
    pub segment_increments: Vec<f64>,
    /// Steps finally used on each segment.
    pub segment_steps: Vec<usize>,
    pub total: f64,
    pub max_step: f64,
    pub min_abs: f64,
}

impl WindingReport {
    pub fn closed(&self) -> bool {
        match (self.vertices.first(), self.vertices.last()) {
            (Some(a), Some(b)) => (a.0 - b.0).norm() < 1e-12 && (a.1 - b.1).norm() < 1e-12,
            _ => false,
        }
    }

    /// `total/2π` for closed loops.
    pub fn winding_number(&self) -> Option<f64> {
        self.closed().then_some(self.total / TAU)
    }

    pub fn valid(&self) -> bool {
        self.max_step < PI
    }

    pub fn report(&self) -> AnalysisReport {
        let mut r = AnalysisReport::new("winding");
        for (i, (d, n)) in self
            .segment_increments
            .iter()
            .zip(&self.segment_steps)
            .enumerate()
        {
            r.value(format!("segment.{i}.increment"), *d);
            r.value(format!("segment.{i}.steps"), *n as f64);
        }
        r.value("total", self.total)
            .value("max_step", self.max_step)
            .value("min_abs", self.min_abs);
        if let Some(w) = self.winding_number() {
            r.value("winding_number", w);
        }
        r.flag("valid", self.valid());
        r
    }
}

fn lerp(a: (C64, C64), b: (C64, C64), t: f64) -> (C64, C64) {
    (a.0 + (b.0 - a.0) * t, a.1 + (b.1 - a.1) * t)
}

/// Phase change along one straight segment, doubling the step count until
/// every step is small. Returns (increment, steps, max step, min |G|).
fn unwrap_segment(
    eval: &impl ZakEvaluator,
    a: (C64, C64),
    b: (C64, C64),
    base: usize,
) -> Result<(f64, usize, f64, f64)> {
    let mut steps = base.max(1);
    for doubling in 0..=MAX_DOUBLINGS {
        let mut prev = eval.eval(a.0, a.1);
        let mut min_abs = prev.norm();
        let (mut total, mut max_step) = (0.0, 0.0f64);
        for i in 1..=steps {
            let (z, w) = lerp(a, b, i as f64 / steps as f64);
            let v = eval.eval(z, w);
            min_abs = min_abs.min(v.norm());
            if min_abs < NEAR_ZERO {
                return Err(Error::NearZero(min_abs));
            }
            // nearest branch
            let d = (v * prev.conj()).arg();
            total += d;
            max_step = max_step.max(d.abs());
            prev = v;
        }
        if max_step < TARGET_STEP || (doubling == MAX_DOUBLINGS && max_step < PI) {
            return Ok((total, steps, max_step, min_abs));
        }
        if doubling < MAX_DOUBLINGS {
            steps *= 2;
        } else {
            return Err(Error::PhaseStep(max_step));
        }
    }
    unreachable!("loop returns on the last doubling")
}

/// Tracks the continuous phase of `eval` along the polyline through `vertices`,
/// starting from `base_steps` steps per segment.
pub fn winding(
    eval: &impl ZakEvaluator,
    vertices: &[(C64, C64)],
    base_steps: usize,
) -> Result<WindingReport> {
    if vertices.len() < 2 {
        return Err(Error::InvalidParameter(
            "a loop needs at least two vertices".into(),
        ));
    }
    let mut rep = WindingReport {
        vertices: vertices.to_vec(),
        segment_increments: Vec::new(),
        segment_steps: Vec::new(),
        total: 0.0,
        max_step: 0.0,
        min_abs: f64::INFINITY,
    };
    for pair in vertices.windows(2) {
        let (d, n, step, min_abs) = unwrap_segment(eval, pair[0], pair[1], base_steps)?;
        rep.segment_increments.push(d);
        rep.segment_steps.push(n);
        rep.total += d;
        rep.max_step = rep.max_step.max(step);
        rep.min_abs = rep.min_abs.min(min_abs);
    }
    Ok(rep)
}

/// `(0,1) → (0,i) → (i,i) → (i,1) → (0,1)` in `(z, w)`. For a continuous, zero-free
/// quasi-periodic G the phase change around it is forced to be `−2π`.
pub fn obstruction_loop() -> Vec<(C64, C64)> {
    let (o, one, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0));
    vec![(o, one), (o, i), (i, i), (i, one), (o, one)]
}

/// Closed polygon with `sides` sides approximating the circle of radius `rho`
/// around `(x, s) = center` in the `(Re z, Im w)` plane, with `Im z = y` and `Re w = r`.
pub fn linking_circle(
    center: (f64, f64),
    rho: f64,
    y: f64,
    r: f64,
    sides: usize,
) -> Vec<(C64, C64)> {
    (0..=sides)
        .map(|i| {
            let t = TAU * (i % sides) as f64 / sides as f64;
            let x = center.0 + rho * t.cos();
            let s = center.1 + rho * t.sin();
            (C64::new(x, y), C64::new(r, s))
        })
        .collect()
}
