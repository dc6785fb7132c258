//! The five benchmark integrands on `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::integrand::VectorIntegrand;

/// `sech(y)` without overflowing `cosh` for large `|y|`.
pub fn sech(y: f64) -> f64 {
    let t = (-y.abs()).exp();
    2.0 * t / (1.0 + t * t)
}

pub fn f1(x: f64) -> f64 {
    x.exp()
}

pub fn f2(x: f64) -> f64 {
    (x - 1.0 / 3.0).abs().sqrt()
}

/// Smooth, with thin spikes at 1/5, 2/5, 3/5 and 4/5.
pub fn f3(x: f64) -> f64 {
    sech(10.0 * (x - 0.2)).powi(2)
        + sech(100.0 * (x - 0.4)).powi(4)
        + sech(1000.0 * (x - 0.6)).powi(6)
        + sech(1000.0 * (x - 0.8)).powi(8)
}

pub fn f4(x: f64) -> f64 {
    (1000.0 * x).cos()
}

/// Unit step just after 1/3.
pub fn f5(x: f64) -> f64 {
    if x <= 1.0 / 3.0 {
        0.0
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Preset {
    F1,
    F2,
    F3,
    F4,
    F5,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::F1, Preset::F2, Preset::F3, Preset::F4, Preset::F5];

    pub fn name(self) -> &'static str {
        match self {
            Preset::F1 => "f1",
            Preset::F2 => "f2",
            Preset::F3 => "f3",
            Preset::F4 => "f4",
            Preset::F5 => "f5",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(name))
    }

    pub fn formula(self) -> &'static str {
        match self {
            Preset::F1 => "exp(x)",
            Preset::F2 => "sqrt(|x - 1/3|)",
            Preset::F3 => {
                "sech(10(x-1/5))^2 + sech(100(x-2/5))^4 + sech(1000(x-3/5))^6 + sech(1000(x-4/5))^8"
            }
            Preset::F4 => "cos(1000x)",
            Preset::F5 => "0 for x <= 1/3, 1 otherwise",
        }
    }

    pub fn function(self) -> fn(f64) -> f64 {
        match self {
            Preset::F1 => f1,
            Preset::F2 => f2,
            Preset::F3 => f3,
            Preset::F4 => f4,
            Preset::F5 => f5,
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        (self.function())(x)
    }

    pub fn interval(self) -> (f64, f64) {
        (0.0, 1.0)
    }

    /// Closed-form value of the integral over `[0, 1]`, where one exists.
    pub fn exact_value(self) -> Option<f64> {
        match self {
            Preset::F1 => Some(std::f64::consts::E - 1.0),
            Preset::F2 => {
                let third: f64 = 1.0 / 3.0;
                Some(2.0 / 3.0 * (third.powf(1.5) + (2.0 * third).powf(1.5)))
            }
            Preset::F3 => None,
            Preset::F4 => Some(1000f64.sin() / 1000.0),
            Preset::F5 => Some(2.0 / 3.0),
        }
    }
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl VectorIntegrand for Preset {
    fn eval_into(&self, xs: &[f64], out: &mut [f64]) {
        let f = self.function();
        for (o, &x) in out.iter_mut().zip(xs) {
            *o = f(x);
        }
    }
}
