//! Vector-form integrands.
//!
//! The adaptive engine gathers every new quadrature point of a refinement pass
//! and hands them to the integrand in one call. An integrand must be pure:
//! the same input always yields the same output.

use crate::error::{QuadError, Result};

/// An integrand evaluated on a whole batch of abscissae at once.
pub trait VectorIntegrand {
    /// Writes `f(xs[i])` to `out[i]`. `out.len() == xs.len()`.
    fn eval_into(&self, xs: &[f64], out: &mut [f64]);
}

impl<F> VectorIntegrand for F
where
    F: Fn(&[f64], &mut [f64]),
{
    fn eval_into(&self, xs: &[f64], out: &mut [f64]) {
        self(xs, out)
    }
}

/// Adapts a scalar function into a [`VectorIntegrand`] by mapping it over the batch.
#[derive(Debug, Clone, Copy)]
pub struct Scalar<F>(pub F);

impl<F: Fn(f64) -> f64> VectorIntegrand for Scalar<F> {
    fn eval_into(&self, xs: &[f64], out: &mut [f64]) {
        for (o, &x) in out.iter_mut().zip(xs) {
            *o = (self.0)(x);
        }
    }
}

/// Evaluation counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalCounts {
    pub vector_calls: u64,
    pub scalar_evals: u64,
}

/// Wraps an integrand and counts how it is called.
pub struct Evaluator<'f, F: ?Sized> {
    f: &'f F,
    counts: EvalCounts,
}

impl<'f, F: VectorIntegrand + ?Sized> Evaluator<'f, F> {
    pub fn new(f: &'f F) -> Self {
        Self {
            f,
            counts: EvalCounts::default(),
        }
    }

    pub fn counts(&self) -> EvalCounts {
        self.counts
    }

    /// Evaluates `f` at every point with one call to the integrand.
    ///
    /// An empty batch does not touch the integrand or the counters.
    pub fn batch_eval(&mut self, points: &[f64]) -> Result<Vec<f64>> {
        if points.is_empty() {
            return Ok(Vec::new());
        }
        if let Some((index, &value)) = points.iter().enumerate().find(|(_, x)| !x.is_finite()) {
            return Err(QuadError::NonFiniteInput { index, value });
        }
        let mut out = vec![0.0; points.len()];
        self.f.eval_into(points, &mut out);
        self.counts.vector_calls += 1;
        self.counts.scalar_evals += points.len() as u64;
        if let Some((x, value)) = points
            .iter()
            .zip(&out)
            .find(|(_, v)| !v.is_finite())
            .map(|(&x, &v)| (x, v))
        {
            return Err(QuadError::NonFiniteValue { x, value });
        }
        Ok(out)
    }
}
