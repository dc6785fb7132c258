//! Gauss-Legendre rules and Legendre value tables for every order `P_MIN..=p_max`.
//!
//! The tables are stored as dense column-major `p_max x (p_max - 1)` matrices.
//! Column `p - 2` belongs to the `p`-point rule; its first `p` rows hold the
//! nodes (ascending), weights or Legendre values and the remaining rows are zero.

use serde::{Deserialize, Serialize};

use crate::error::{QuadError, Result};

/// Smallest supported number of Gauss points. The smoothness ratio needs the
/// two highest Legendre coefficients of the local interpolant.
pub const P_MIN: usize = 2;

const NEWTON_MAX_ITER: usize = 100;

/// Legendre polynomial of degree `l` at `x`, normalised so that `L_l(1) = 1`.
pub fn legendre_eval(l: usize, x: f64) -> f64 {
    legendre_pair(l, x).0
}

/// Returns `(L_l(x), L_{l-1}(x))` from the three-term recurrence.
/// For `l = 0` the second entry is zero.
fn legendre_pair(l: usize, x: f64) -> (f64, f64) {
    if l == 0 {
        return (1.0, 0.0);
    }
    let mut prev = 1.0;
    let mut cur = x;
    for n in 1..l {
        let n = n as f64;
        let next = ((2.0 * n + 1.0) * x * cur - n * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Nodes and weights of a single Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// The `p`-point Gauss-Legendre rule, nodes in ascending order.
///
/// Roots of `L_p` are found by Newton's method started from the usual cosine
/// estimates, then polished with two more Newton steps in double-double
/// arithmetic, from which the weights are also computed. Nodes and weights
/// come out correctly rounded or within one ulp. Only the non-negative half is
/// computed and mirrored, so the rule is exactly symmetric.
pub fn gauss_legendre_rule(p: usize) -> Result<GaussRule> {
    if p < P_MIN {
        return Err(QuadError::InvalidOrder {
            p,
            min: P_MIN,
            max: usize::MAX,
        });
    }
    let n = p as f64;
    let mut nodes = vec![0.0; p];
    let mut weights = vec![0.0; p];

    // k-th largest root, k = 0..ceil(p/2)
    for k in 0..p.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (4.0 * k as f64 + 3.0) / (4.0 * n + 2.0)).cos();
        if 2 * k + 1 == p {
            x = 0.0;
        } else {
            for _ in 0..NEWTON_MAX_ITER {
                let (lp, lm) = legendre_pair(p, x);
                let deriv = n * (lm - x * lp) / (1.0 - x * x);
                let dx = lp / deriv;
                x -= dx;
                if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                    break;
                }
            }
        }
        let (x, w) = polish(p, x);
        nodes[p - 1 - k] = x;
        nodes[k] = -x;
        weights[p - 1 - k] = w;
        weights[k] = w;
    }
    Ok(GaussRule { nodes, weights })
}

/// Newton steps on `L_p` in double-double precision starting at `x0`,
/// returning the rounded root and its weight `2 / ((1 - x^2) L_p'(x)^2)`.
fn polish(p: usize, x0: f64) -> (f64, f64) {
    let n = p as f64;
    let mut x = Dd::from(x0);
    let mut deriv = Dd::from(0.0);
    for step in 0..3 {
        let (lp, lm) = legendre_pair_dd(p, x);
        let one_minus_x2 = (Dd::from(1.0) - x) * (Dd::from(1.0) + x);
        deriv = (lm - x * lp).scale(n) / one_minus_x2;
        if step < 2 && x0 != 0.0 {
            x = x - lp / deriv;
        }
    }
    let one_minus_x2 = (Dd::from(1.0) - x) * (Dd::from(1.0) + x);
    let w = Dd::from(2.0) / (one_minus_x2 * deriv * deriv);
    (x.hi, w.hi)
}

fn legendre_pair_dd(l: usize, x: Dd) -> (Dd, Dd) {
    let mut prev = Dd::from(1.0);
    let mut cur = x;
    for n in 1..l {
        let n = n as f64;
        let next = ((x * cur).scale(2.0 * n + 1.0) - prev.scale(n)) / Dd::from(n + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl From<f64> for Dd {
    fn from(hi: f64) -> Self {
        Dd { hi, lo: 0.0 }
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn fast_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd {
        hi: s,
        lo: b - (s - a),
    }
}

impl Dd {
    fn scale(self, c: f64) -> Dd {
        let p = self.hi * c;
        let e = self.hi.mul_add(c, -p);
        fast_two_sum(p, e + self.lo * c)
    }
}

impl std::ops::Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let r = fast_two_sum(s, e + t);
        fast_two_sum(r.hi, r.lo + f)
    }
}

impl std::ops::Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl std::ops::Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl std::ops::Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        fast_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi))
    }
}

impl std::ops::Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o.scale(q1);
        let q2 = r.hi / o.hi;
        let r = r - o.scale(q2);
        let q3 = r.hi / o.hi;
        fast_two_sum(q1, q2) + Dd::from(q3)
    }
}

/// Dense column-major matrix, one column per quadrature order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ColumnMatrix {
    fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry at zero-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        self.data[col * self.rows + row]
    }

    pub fn column(&self, col: usize) -> &[f64] {
        &self.data[col * self.rows..(col + 1) * self.rows]
    }

    fn column_mut(&mut self, col: usize) -> &mut [f64] {
        &mut self.data[col * self.rows..(col + 1) * self.rows]
    }
}

/// Precomputed Gauss-Legendre data for orders `P_MIN..=p_max`.
///
/// * `x`, `w`: nodes and weights of each rule.
/// * `l1`: `L_{p-1}` at the nodes of the `p`-point rule.
/// * `l2`: `L_{p-2}` at the nodes of the `p`-point rule.
///
/// Immutable once built; share it freely between threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleTables {
    p_max: usize,
    x: ColumnMatrix,
    w: ColumnMatrix,
    l1: ColumnMatrix,
    l2: ColumnMatrix,
}

/// Builds the tables for all orders up to `p_max`.
pub fn build_tables(p_max: usize) -> Result<RuleTables> {
    RuleTables::new(p_max)
}

impl RuleTables {
    pub fn new(p_max: usize) -> Result<Self> {
        if p_max < P_MIN {
            return Err(QuadError::InvalidOrder {
                p: p_max,
                min: P_MIN,
                max: usize::MAX,
            });
        }
        let cols = p_max - 1;
        let mut x = ColumnMatrix::zeros(p_max, cols);
        let mut w = ColumnMatrix::zeros(p_max, cols);
        let mut l1 = ColumnMatrix::zeros(p_max, cols);
        let mut l2 = ColumnMatrix::zeros(p_max, cols);
        for p in P_MIN..=p_max {
            let rule = gauss_legendre_rule(p)?;
            let col = p - P_MIN;
            x.column_mut(col)[..p].copy_from_slice(&rule.nodes);
            w.column_mut(col)[..p].copy_from_slice(&rule.weights);
            for (k, &node) in rule.nodes.iter().enumerate() {
                l1.column_mut(col)[k] = legendre_eval(p - 1, node);
                l2.column_mut(col)[k] = legendre_eval(p - 2, node);
            }
        }
        Ok(Self {
            p_max,
            x,
            w,
            l1,
            l2,
        })
    }

    pub fn p_min(&self) -> usize {
        P_MIN
    }

    pub fn p_max(&self) -> usize {
        self.p_max
    }

    pub fn check_order(&self, p: usize) -> Result<()> {
        if (P_MIN..=self.p_max).contains(&p) {
            Ok(())
        } else {
            Err(QuadError::InvalidOrder {
                p,
                min: P_MIN,
                max: self.p_max,
            })
        }
    }

    /// Zero-based column index for the `p`-point rule.
    pub fn column_index(&self, p: usize) -> usize {
        p - P_MIN
    }

    pub fn nodes(&self, p: usize) -> &[f64] {
        &self.x.column(self.column_index(p))[..p]
    }

    pub fn weights(&self, p: usize) -> &[f64] {
        &self.w.column(self.column_index(p))[..p]
    }

    /// `L_{p-1}` at the nodes of the `p`-point rule.
    pub fn legendre_top(&self, p: usize) -> &[f64] {
        &self.l1.column(self.column_index(p))[..p]
    }

    /// `L_{p-2}` at the nodes of the `p`-point rule.
    pub fn legendre_next(&self, p: usize) -> &[f64] {
        &self.l2.column(self.column_index(p))[..p]
    }

    pub fn x_matrix(&self) -> &ColumnMatrix {
        &self.x
    }

    pub fn w_matrix(&self) -> &ColumnMatrix {
        &self.w
    }

    pub fn l1_matrix(&self) -> &ColumnMatrix {
        &self.l1
    }

    pub fn l2_matrix(&self) -> &ColumnMatrix {
        &self.l2
    }
}
