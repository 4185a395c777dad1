//! Central B-splines and SIAC convolution kernels.
//!
//! B-splines are held as exact piecewise polynomials with rational
//! coefficients, built from the convolution recursion
//! `B^(n+1)(t) = (((n+1)/2 + t) B^(n)(t + 1/2) + ((n+1)/2 - t) B^(n)(t - 1/2)) / n`.
//! Kernel coefficients come from the moment conditions
//! `int K(t) t^m dt = delta_{m0}` for `m = 0..=r`, solved in exact arithmetic.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const MAX_MOMENT_ORDER: usize = 12;
pub const MAX_SPLINE_ORDER: usize = 16;

type Q = BigRational;

fn q_int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn binomial(n: usize, k: usize) -> Q {
    let mut r = Q::one();
    for i in 0..k {
        r = r * q_int((n - i) as i64) / q_int((i + 1) as i64);
    }
    r
}

/// `p(t + s)` for a polynomial with ascending coefficients.
fn shift_poly(p: &[Q], s: &Q) -> Vec<Q> {
    let n = p.len();
    let mut out = vec![Q::zero(); n];
    for (j, a) in p.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        // (t + s)^j = sum_i C(j, i) t^i s^(j - i)
        let mut spow = Q::one();
        for i in (0..=j).rev() {
            out[i] += a * binomial(j, i) * &spow;
            spow *= s;
        }
    }
    out
}

/// `(c0 + c1 t) * p(t)`
fn mul_linear(p: &[Q], c0: &Q, c1: &Q) -> Vec<Q> {
    let mut out = vec![Q::zero(); p.len() + 1];
    for (i, a) in p.iter().enumerate() {
        out[i] += a * c0;
        out[i + 1] += a * c1;
    }
    out
}

fn integrate_poly(p: &[Q], lo: &Q, hi: &Q) -> Q {
    let mut s = Q::zero();
    let mut lo_pow = lo.clone();
    let mut hi_pow = hi.clone();
    for (i, a) in p.iter().enumerate() {
        s += a * (&hi_pow - &lo_pow) / q_int(i as i64 + 1);
        lo_pow *= lo;
        hi_pow *= hi;
    }
    s
}

/// Central B-spline of order `l` (degree `l - 1`), supported on `[-l/2, l/2]`.
#[derive(Debug, Clone)]
pub struct BSpline {
    order: usize,
    // pieces[k] lives on [-l/2 + k, -l/2 + k + 1), coefficients ascending in t.
    exact: Vec<Vec<Q>>,
    pieces: Vec<Vec<f64>>,
}

impl BSpline {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 || order > MAX_SPLINE_ORDER {
            return Err(Error::InvalidKernel(format!(
                "B-spline order must be in 1..={MAX_SPLINE_ORDER}, got {order}"
            )));
        }
        let mut pieces: Vec<Vec<Q>> = vec![vec![Q::one()]];
        for n in 1..order {
            let nq = q_int(n as i64);
            let half_n = q_frac(n as i64 + 1, 2);
            let plus = q_frac(1, 2);
            let minus = q_frac(-1, 2);
            let mut next = Vec::with_capacity(n + 1);
            for k in 0..=n {
                let mut poly = vec![Q::zero(); n + 1];
                if k < n {
                    let shifted = shift_poly(&pieces[k], &plus);
                    for (o, v) in poly.iter_mut().zip(mul_linear(&shifted, &half_n, &Q::one())) {
                        *o += v;
                    }
                }
                if k >= 1 {
                    let shifted = shift_poly(&pieces[k - 1], &minus);
                    for (o, v) in poly.iter_mut().zip(mul_linear(&shifted, &half_n, &-Q::one())) {
                        *o += v;
                    }
                }
                next.push(poly.into_iter().map(|c| c / &nq).collect());
            }
            pieces = next;
        }
        let floats = pieces
            .iter()
            .map(|p| p.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect())
            .collect();
        Ok(Self {
            order,
            exact: pieces,
            pieces: floats,
        })
    }

    /// Cached instance for `order`.
    pub fn cached(order: usize) -> Result<Arc<BSpline>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<BSpline>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("bspline cache poisoned");
        if let Some(b) = guard.get(&order) {
            return Ok(b.clone());
        }
        let b = Arc::new(Self::new(order)?);
        guard.insert(order, b.clone());
        Ok(b)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Exact coefficients of piece `k` (on `[-l/2 + k, -l/2 + k + 1)`), ascending in `t`.
    pub fn exact_piece(&self, k: usize) -> &[BigRational] {
        &self.exact[k]
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        let half = 0.5 * self.order as f64;
        if !(t >= -half && t < half) {
            return 0.0;
        }
        let k = ((t + half).floor() as usize).min(self.order - 1);
        self.pieces[k].iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    /// `int B(u) u^j du`, exact.
    fn moment(&self, j: usize) -> Q {
        let mut s = Q::zero();
        for (k, piece) in self.exact.iter().enumerate() {
            let lo = q_frac(2 * k as i64 - self.order as i64, 2);
            let hi = &lo + Q::one();
            let mut weighted = vec![Q::zero(); j];
            weighted.extend(piece.iter().cloned());
            s += integrate_poly(&weighted, &lo, &hi);
        }
        s
    }
}

/// `B^(l)(t)`: the central B-spline of order `l`, zero outside `[-l/2, l/2]`.
pub fn bspline_eval(order: usize, t: f64) -> f64 {
    BSpline::cached(order).map(|b| b.eval(t)).unwrap_or(0.0)
}

fn solve_exact(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Result<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::InvalidKernel("singular moment system".into()))?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &a[col][col];
            for c in col..n {
                let v = &f * &a[col][c];
                a[r][c] -= v;
            }
            let v = &f * &b[col];
            b[r] -= v;
        }
    }
    let mut x = vec![Q::zero(); n];
    for r in (0..n).rev() {
        let mut s = b[r].clone();
        for c in r + 1..n {
            s -= &a[r][c] * &x[c];
        }
        x[r] = s / &a[r][r];
    }
    Ok(x)
}

fn check_kernel_params(r: usize, order: usize) -> Result<()> {
    if r % 2 != 0 || r > MAX_MOMENT_ORDER {
        return Err(Error::InvalidKernel(format!(
            "moment order r must be even and at most {MAX_MOMENT_ORDER}, got {r}"
        )));
    }
    if order == 0 || order > MAX_SPLINE_ORDER {
        return Err(Error::InvalidKernel(format!("B-spline order must be in 1..={MAX_SPLINE_ORDER}, got {order}")));
    }
    Ok(())
}

/// Exact kernel coefficients `c_gamma`, `gamma = -r/2..=r/2`.
pub fn kernel_coefficients_exact(r: usize, order: usize) -> Result<Vec<BigRational>> {
    check_kernel_params(r, order)?;
    let spline = BSpline::cached(order)?;
    let mu: Vec<Q> = (0..=r).map(|j| spline.moment(j)).collect();
    let half = (r / 2) as i64;
    let gammas: Vec<Q> = (-half..=half).map(q_int).collect();
    // Row m: int B(t - gamma) t^m dt = sum_j C(m, j) gamma^(m - j) mu_j.
    let a: Vec<Vec<Q>> = (0..=r)
        .map(|m| {
            gammas
                .iter()
                .map(|g| {
                    let mut s = Q::zero();
                    let mut gpow = Q::one();
                    for j in (0..=m).rev() {
                        s += binomial(m, j) * &gpow * &mu[j];
                        gpow *= g;
                    }
                    s
                })
                .collect()
        })
        .collect();
    let mut rhs = vec![Q::zero(); r + 1];
    rhs[0] = Q::one();
    solve_exact(a, rhs)
}

/// Kernel coefficients `c_gamma`, `gamma = -r/2..=r/2`, rounded to `f64`.
pub fn kernel_coefficients(r: usize, order: usize) -> Result<Vec<f64>> {
    Ok(kernel_coefficients_exact(r, order)?
        .iter()
        .map(|c| c.to_f64().unwrap_or(f64::NAN))
        .collect())
}

/// `K_H(t) = (1/H) sum_gamma c_gamma B^(l)(t/H - gamma)`.
#[derive(Debug, Clone)]
pub struct SiacKernel {
    r: usize,
    order: usize,
    coeffs: Vec<f64>,
    scale: f64,
    spline: Arc<BSpline>,
}

impl SiacKernel {
    pub fn new(r: usize, order: usize, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidKernel(format!("scaling H must be positive, got {scale}")));
        }
        let coeffs = kernel_coefficients(r, order)?;
        Ok(Self {
            r,
            order,
            coeffs,
            scale,
            spline: BSpline::cached(order)?,
        })
    }

    /// The multiresolution filter for degree-`p` data: `r = 2p`, `l = 1`.
    pub fn for_degree(degree: usize, scale: f64) -> Result<Self> {
        Self::new(2 * degree, 1, scale)
    }

    pub fn with_scale(&self, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidKernel(format!("scaling H must be positive, got {scale}")));
        }
        Ok(Self { scale, ..self.clone() })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn spline(&self) -> &BSpline {
        &self.spline
    }

    /// Half width of the unscaled support, `(r + l) / 2`.
    pub fn unscaled_half_support(&self) -> f64 {
        0.5 * (self.r + self.order) as f64
    }

    /// The kernel `K(tau) = sum_gamma c_gamma B(tau - gamma)` before scaling.
    #[inline]
    pub fn eval_unscaled(&self, tau: f64) -> f64 {
        let half = (self.r / 2) as i64;
        self.coeffs
            .iter()
            .zip(-half..=half)
            .map(|(c, g)| c * self.spline.eval(tau - g as f64))
            .sum()
    }

    /// `K_H(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        self.eval_unscaled(t / self.scale) / self.scale
    }

    /// Knots of the unscaled kernel, `gamma + j - l/2`, ascending.
    pub fn unscaled_breaks(&self) -> Vec<f64> {
        let half = (self.r / 2) as i64;
        let mut b: Vec<f64> = (-half..=half)
            .flat_map(|g| (0..=self.order).map(move |j| g as f64 + j as f64 - 0.5 * self.order as f64))
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// Knots of `K_H`.
    pub fn breaks(&self) -> Vec<f64> {
        self.unscaled_breaks().into_iter().map(|t| t * self.scale).collect()
    }
}

pub fn kernel_eval(kernel: &SiacKernel, t: f64) -> f64 {
    kernel.eval(t)
}

pub fn kernel_breaks(kernel: &SiacKernel) -> Vec<f64> {
    kernel.breaks()
}
