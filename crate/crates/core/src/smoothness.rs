//! Local smoothness estimation from cached quadrature-point values.
//!
//! On a segment carrying `p` Gauss points the integrand values define a unique
//! interpolant of degree `p - 1`. The ratio of its two highest Legendre
//! coefficients, `xi = (2p - 3) |b_{p-1} / b_{p-2}|`, feeds the indicator
//!
//! ```text
//! F(xi) = (1 + xi) / (sqrt(1 + xi^2 / 3) + sqrt(2) xi)
//! ```
//!
//! which lies in `[sqrt(3) / (sqrt(6) + 1), 1]`. Values near 1 mean the
//! integrand looks smooth on the segment. Computing `xi` reuses the values
//! already needed by the quadrature rule, so no extra integrand calls occur.

use serde::{Deserialize, Serialize};

use crate::error::{QuadError, Result};
use crate::tables::RuleTables;

/// Lower end of the indicator range, `sqrt(3) / (sqrt(6) + 1)`, reached as `xi -> inf`.
pub fn indicator_lower_bound() -> f64 {
    3f64.sqrt() / (6f64.sqrt() + 1.0)
}

/// A coefficient ratio together with the indicator value it maps to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessScore {
    pub xi: f64,
    pub value: f64,
}

impl SmoothnessScore {
    pub fn from_xi(xi: f64) -> Result<Self> {
        Ok(Self {
            xi,
            value: indicator(xi)?,
        })
    }

    pub fn from_values(fvals: &[f64], p: usize, tables: &RuleTables) -> Result<Self> {
        Self::from_xi(xi_from_values(fvals, p, tables)?)
    }
}

/// `(2p - 1) |S1 / S2|` with `S1 = sum w_k f_k L_{p-1}(x_k)` and
/// `S2 = sum w_k f_k L_{p-2}(x_k)`.
///
/// A sum whose magnitude does not exceed its own rounding bound,
/// `p * eps * sum w_k |f_k|`, counts as zero. Then `S2 == 0` with `S1 != 0`
/// gives `+inf` and `S1 == 0` gives `0`.
pub fn xi_from_values(fvals: &[f64], p: usize, tables: &RuleTables) -> Result<f64> {
    tables.check_order(p)?;
    if fvals.len() != p {
        return Err(QuadError::LengthMismatch {
            expected: p,
            got: fvals.len(),
        });
    }
    if let Some((index, &value)) = fvals.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(QuadError::NonFiniteInput { index, value });
    }

    let w = tables.weights(p);
    let top = tables.legendre_top(p);
    let next = tables.legendre_next(p);
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    let mut mass = 0.0;
    for k in 0..p {
        let wf = w[k] * fvals[k];
        s1 += wf * top[k];
        s2 += wf * next[k];
        mass += wf.abs();
    }
    // |L| <= 1 on [-1, 1], so both sums carry at most this much rounding
    let noise = p as f64 * f64::EPSILON * mass;

    Ok(match (s1.abs() <= noise, s2.abs() <= noise) {
        (true, _) => 0.0,
        (false, true) => f64::INFINITY,
        (false, false) => (2 * p - 1) as f64 * (s1 / s2).abs(),
    })
}

/// Smoothness indicator for a coefficient ratio `xi >= 0` (possibly infinite).
pub fn indicator(xi: f64) -> Result<f64> {
    if xi.is_nan() || xi < 0.0 {
        return Err(QuadError::InvalidXi(xi));
    }
    if xi.is_infinite() {
        return Ok(indicator_lower_bound());
    }
    let value = (1.0 + xi) / ((1.0 + xi * xi / 3.0).sqrt() + 2f64.sqrt() * xi);
    // rounding near xi ~ 1e8 can leave the value a few ulps off the range
    Ok(value.clamp(indicator_lower_bound(), 1.0))
}

/// Direct evaluation of the norm-ratio indicator, used to cross-check the
/// coefficient-based formula in tests. Never called by the adaptive loop.
pub mod oracle {
    use crate::error::{QuadError, Result};

    /// Number of uniform sub-intervals used for sampling and Simpson's rule.
    pub const SAMPLE_INTERVALS: usize = 10_000;

    /// Central finite-difference approximation of the `order`-th derivative
    /// of `f` at `x` with step `step`. The stencil extends `order * step / 2`
    /// to both sides of `x`.
    pub fn central_difference<F: Fn(f64) -> f64>(f: &F, x: f64, order: usize, step: f64) -> f64 {
        if order == 0 {
            return f(x);
        }
        // sum_j (-1)^j C(n, j) f(x + (n/2 - j) h) / h^n
        let n = order as f64;
        let mut binom = 1.0;
        let mut acc = 0.0;
        for j in 0..=order {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binom * f(x + (n / 2.0 - j as f64) * step);
            binom = binom * (n - j as f64) / (j as f64 + 1.0);
        }
        acc / step.powi(order as i32)
    }

    /// Step for an `order`-th central difference on a scale `scale`:
    /// `eps^(1 / (order + 2)) * scale`, which is `cbrt(eps) * scale` for a
    /// first derivative.
    pub fn fd_step(order: usize, scale: f64) -> f64 {
        f64::EPSILON.powf(1.0 / (order as f64 + 2.0)) * scale
    }

    /// `F_K[g]` for `g = f^(derivative_order)` on `K = (a, b)`:
    ///
    /// ```text
    /// ||g||_inf / (h^(-1/2) ||g||_2 + h^(1/2) ||g'||_2 / sqrt(2))
    /// ```
    ///
    /// The sup-norm is taken over `SAMPLE_INTERVALS + 1` uniform samples, the
    /// L2 norms by composite Simpson on the same grid, and derivatives by
    /// central differences. `f` must be evaluable slightly outside `(a, b)`.
    /// Returns 1 when `g` vanishes on every sample.
    pub fn indicator_direct_oracle<F: Fn(f64) -> f64>(
        f: F,
        interval: (f64, f64),
        derivative_order: usize,
    ) -> Result<f64> {
        let (a, b) = interval;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(QuadError::InvalidInterval { a, b });
        }
        let h = b - a;
        let n = SAMPLE_INTERVALS;
        let dx = h / n as f64;
        let step_g = fd_step(derivative_order, h);
        let step_dg = fd_step(derivative_order + 1, h);

        let mut sup = 0.0f64;
        let mut g2 = 0.0;
        let mut dg2 = 0.0;
        for i in 0..=n {
            let x = if i == n { b } else { a + i as f64 * dx };
            let g = central_difference(&f, x, derivative_order, step_g);
            let dg = central_difference(&f, x, derivative_order + 1, step_dg);
            if !g.is_finite() || !dg.is_finite() {
                return Err(QuadError::NonFiniteValue {
                    x,
                    value: if g.is_finite() { dg } else { g },
                });
            }
            let simpson = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            sup = sup.max(g.abs());
            g2 += simpson * g * g;
            dg2 += simpson * dg * dg;
        }
        if sup == 0.0 {
            return Ok(1.0);
        }
        let g_l2 = (g2 * dx / 3.0).sqrt();
        let dg_l2 = (dg2 * dx / 3.0).sqrt();
        Ok(sup / (g_l2 / h.sqrt() + h.sqrt() * dg_l2 / 2f64.sqrt()))
    }
}

pub use oracle::indicator_direct_oracle;
