//! Gauss-Legendre rules on [-1, 1] and collapsed-coordinate rules on ordered simplices.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MAX_GAUSS_POINTS: usize = 64;

/// A one-dimensional quadrature rule on the reference interval [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Iterate `(node, weight)` pairs mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Evaluate `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// The `n`-point Gauss-Legendre rule, exact for polynomials of degree `2n - 1`.
///
/// Nodes are returned in ascending order.
pub fn gauss_legendre_rule(n: usize) -> Result<GaussRule> {
    if n == 0 || n > MAX_GAUSS_POINTS {
        return Err(Error::UnsupportedRule(n));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th largest root.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(GaussRule { nodes, weights })
}

/// Quadrature on the ordered simplex `{-1 <= y_0 <= y_1 <= ... <= y_{g-1} <= 1}`
/// obtained by collapsing a tensor Gauss rule with `q` points per axis.
///
/// Returned nodes carry `g` coordinates; the weights sum to `2^g / g!`.
pub fn ordered_simplex_rule(g: usize, q: usize) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let rule = gauss_legendre_rule(q)?;
    // Gauss rule on [0, 1].
    let unit: Vec<(f64, f64)> = rule.mapped(0.0, 1.0).collect();
    let mut nodes = Vec::with_capacity(q.pow(g as u32));
    let mut weights = Vec::with_capacity(q.pow(g as u32));
    if g == 0 {
        nodes.push(Vec::new());
        weights.push(1.0);
        return Ok((nodes, weights));
    }
    let mut idx = vec![0usize; g];
    loop {
        // y_{g-1} = u_{g-1}, y_{k} = u_k * y_{k+1}; Jacobian is prod_{k>=1} y_k.
        let mut y = vec![0.0; g];
        let mut w = 1.0;
        let mut upper = 1.0;
        for k in (0..g).rev() {
            let (u, wu) = unit[idx[k]];
            y[k] = u * upper;
            w *= wu;
            if k > 0 {
                w *= y[k];
            }
            upper = y[k];
        }
        let scale = (1u32 << g) as f64;
        nodes.push(y.iter().map(|&v| 2.0 * v - 1.0).collect());
        weights.push(w * scale);

        let mut axis = 0;
        loop {
            if axis == g {
                return Ok((nodes, weights));
            }
            idx[axis] += 1;
            if idx[axis] < q {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}
