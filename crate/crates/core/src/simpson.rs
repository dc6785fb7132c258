//! Recursive adaptive Simpson quadrature, used as a baseline.
//!
//! Each interval is compared against the sum over its two halves. The
//! endpoint and midpoint values are handed down the recursion, so every
//! examined half costs exactly two new integrand evaluations. Termination
//! uses the same rounding test as the hp engine.

use serde::{Deserialize, Serialize};

use crate::adaptive::{accept_test, scale_iguess};
use crate::error::{QuadError, Result};

pub const DEFAULT_MAX_DEPTH: usize = 60;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpsonStats {
    pub scalar_evals: u64,
    pub max_depth: usize,
    /// Half intervals examined after a failed comparison; each adds two evaluations.
    pub subdivisions: u64,
    /// Intervals accepted because the depth cap was reached.
    pub forced_accepts: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimpsonResult {
    pub value: f64,
    pub stats: SimpsonStats,
}

struct Run<'f, F> {
    f: &'f F,
    iguess_scaled: f64,
    max_depth: usize,
    stats: SimpsonStats,
}

impl<F: Fn(f64) -> f64> Run<'_, F> {
    fn eval(&mut self, x: f64) -> Result<f64> {
        let v = (self.f)(x);
        self.stats.scalar_evals += 1;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadError::NonFiniteValue { x, value: v })
        }
    }

    /// `whole` is the Simpson value on `[a, b]` from `fa, fm, fb`.
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        depth: usize,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let d = 0.5 * (a + m);
        let e = 0.5 * (m + b);
        let fd = self.eval(d)?;
        let fe = self.eval(e)?;
        self.subdivided(a, b, [fa, fd, fm, fe, fb], whole, depth)
    }

    fn subdivided(&mut self, a: f64, b: f64, v: [f64; 5], whole: f64, depth: usize) -> Result<f64> {
        let [fa, fd, fm, fe, fb] = v;
        let m = 0.5 * (a + b);
        let h = b - a;
        let left = h / 12.0 * (fa + 4.0 * fd + fm);
        let right = h / 12.0 * (fm + 4.0 * fe + fb);
        let halves = left + right;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        let d = 0.5 * (a + m);
        let e = 0.5 * (m + b);
        let degenerate = d <= a || m <= d || e <= m || b <= e;
        if accept_test(whole, halves, self.iguess_scaled) {
            return Ok(halves);
        }
        if depth >= self.max_depth || degenerate {
            self.stats.forced_accepts += 1;
            return Ok(halves);
        }
        self.stats.subdivisions += 2;
        let l = self.recurse(a, m, fa, fd, fm, left, depth + 1)?;
        let r = self.recurse(m, b, fm, fe, fb, right, depth + 1)?;
        Ok(l + r)
    }
}

/// Adaptive Simpson integration of `f` over `[a, b]` with the default depth cap.
pub fn simpson_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<SimpsonResult> {
    simpson_adaptive_with_depth(f, a, b, tol, DEFAULT_MAX_DEPTH)
}

pub fn simpson_adaptive_with_depth<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: usize,
) -> Result<SimpsonResult> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(QuadError::InvalidInterval { a, b });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(QuadError::InvalidConfig(format!(
            "tol must be positive and finite, got {tol}"
        )));
    }
    let mut run = Run {
        f: &f,
        iguess_scaled: 1.0,
        max_depth,
        stats: SimpsonStats::default(),
    };
    let m = 0.5 * (a + b);
    let pts = [a, 0.5 * (a + m), m, 0.5 * (m + b), b];
    let mut v = [0.0; 5];
    for (slot, &x) in v.iter_mut().zip(&pts) {
        *slot = run.eval(x)?;
    }
    let h = b - a;
    let whole = h / 6.0 * (v[0] + 4.0 * v[2] + v[4]);
    // composite Simpson on the five initial points sets the magnitude
    let iguess = h / 12.0 * (v[0] + 4.0 * v[1] + 2.0 * v[2] + 4.0 * v[3] + v[4]);
    run.iguess_scaled = scale_iguess(iguess, tol);
    let value = run.subdivided(a, b, v, whole, 0)?;
    Ok(SimpsonResult {
        value,
        stats: run.stats,
    })
}
