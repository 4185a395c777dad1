//! Orthonormal Legendre basis on the reference element and multi-index bookkeeping.
//!
//! The reference basis is orthonormal on `[-1, 1]` with no mesh-dependent scaling:
//! `phi_k(x) = sqrt((2k + 1) / 2) P_k(x)`. Tensor modes are linearized
//! lexicographically with the first axis most significant.

use crate::MAX_DIM;

/// `phi_k(x)`, the orthonormal Legendre polynomial of degree `k`.
pub fn legendre_orthonormal_eval(k: usize, x: f64) -> f64 {
    debug_assert!(x.abs() <= 1.0 + 1e-9, "reference coordinate {x} outside [-1, 1]");
    let mut p0 = 1.0;
    let mut p1 = x;
    let pk = match k {
        0 => 1.0,
        1 => x,
        _ => {
            for n in 2..=k {
                let n = n as f64;
                let p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
                p0 = p1;
                p1 = p2;
            }
            p1
        }
    };
    ((2 * k + 1) as f64 / 2.0).sqrt() * pk
}

/// Fill `out[k] = phi_k(x)` for `k = 0..out.len()`.
#[inline]
pub fn legendre_orthonormal_all(x: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    let mut p0 = 1.0;
    out[0] = std::f64::consts::FRAC_1_SQRT_2;
    if n == 1 {
        return;
    }
    let mut p1 = x;
    out[1] = 1.5f64.sqrt() * x;
    for k in 2..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
        out[k] = ((2 * k + 1) as f64 / 2.0).sqrt() * p2;
    }
}

/// Number of tensor modes `(p + 1)^d`.
pub fn mode_count(dim: usize, degree: usize) -> usize {
    (degree + 1).pow(dim as u32)
}

/// A multi-index `(alpha_1, ..., alpha_d)` with every component in `0..=p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    comps: [usize; MAX_DIM],
    dim: usize,
}

impl MultiIndex {
    pub fn new(comps: &[usize]) -> Self {
        assert!(comps.len() <= MAX_DIM);
        let mut c = [0; MAX_DIM];
        c[..comps.len()].copy_from_slice(comps);
        Self {
            comps: c,
            dim: comps.len(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[usize] {
        &self.comps[..self.dim]
    }

    pub fn max_component(&self) -> usize {
        self.components().iter().copied().max().unwrap_or(0)
    }

    /// Lexicographic position among all indices with components in `0..=degree`.
    pub fn to_linear(&self, degree: usize) -> usize {
        self.components()
            .iter()
            .fold(0, |acc, &a| acc * (degree + 1) + a)
    }

    pub fn from_linear(mut index: usize, dim: usize, degree: usize) -> Self {
        let np = degree + 1;
        let mut c = [0; MAX_DIM];
        for axis in (0..dim).rev() {
            c[axis] = index % np;
            index /= np;
        }
        Self { comps: c, dim }
    }

    /// All multi-indices in lexicographic order.
    pub fn all(dim: usize, degree: usize) -> impl Iterator<Item = MultiIndex> {
        (0..mode_count(dim, degree)).map(move |i| Self::from_linear(i, dim, degree))
    }
}

/// `sum_alpha coeffs[alpha] * prod_i phis[i][alpha_i]` for a lexicographically
/// ordered coefficient block.
#[inline]
pub fn contract(dim: usize, coeffs: &[f64], phis: &[&[f64]]) -> f64 {
    match dim {
        1 => coeffs.iter().zip(phis[0]).map(|(c, p)| c * p).sum(),
        2 => {
            let n1 = phis[1].len();
            let mut s = 0.0;
            for (a, &pa) in phis[0].iter().enumerate() {
                let row = &coeffs[a * n1..(a + 1) * n1];
                let inner: f64 = row.iter().zip(phis[1]).map(|(c, p)| c * p).sum();
                s += pa * inner;
            }
            s
        }
        3 => {
            let n1 = phis[1].len();
            let n2 = phis[2].len();
            let mut s = 0.0;
            for (a, &pa) in phis[0].iter().enumerate() {
                let mut sa = 0.0;
                for (b, &pb) in phis[1].iter().enumerate() {
                    let off = (a * n1 + b) * n2;
                    let row = &coeffs[off..off + n2];
                    let inner: f64 = row.iter().zip(phis[2]).map(|(c, p)| c * p).sum();
                    sa += pb * inner;
                }
                s += pa * sa;
            }
            s
        }
        _ => unreachable!("dimension {dim}"),
    }
}

/// Outer product `out[alpha] = scale * prod_i phis[i][alpha_i]`, accumulated.
#[inline]
pub fn accumulate_outer(dim: usize, scale: f64, phis: &[&[f64]], out: &mut [f64]) {
    match dim {
        1 => {
            for (o, &p) in out.iter_mut().zip(phis[0]) {
                *o += scale * p;
            }
        }
        2 => {
            let n1 = phis[1].len();
            for (a, &pa) in phis[0].iter().enumerate() {
                let s = scale * pa;
                for (o, &pb) in out[a * n1..(a + 1) * n1].iter_mut().zip(phis[1]) {
                    *o += s * pb;
                }
            }
        }
        3 => {
            let n1 = phis[1].len();
            let n2 = phis[2].len();
            for (a, &pa) in phis[0].iter().enumerate() {
                for (b, &pb) in phis[1].iter().enumerate() {
                    let s = scale * pa * pb;
                    let off = (a * n1 + b) * n2;
                    for (o, &pc) in out[off..off + n2].iter_mut().zip(phis[2]) {
                        *o += s * pc;
                    }
                }
            }
        }
        _ => unreachable!("dimension {dim}"),
    }
}

/// Small dense row-major matrix used for per-axis basis changes.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }
}

/// Apply `mats[0] ⊗ mats[1] ⊗ ...` to a lexicographic tensor whose axis `i`
/// has length `mats[i].cols()`. The result has axis lengths `mats[i].rows()`.
pub fn kron_apply(mats: &[&Matrix], input: &[f64]) -> Vec<f64> {
    let dim = mats.len();
    let mut shape: Vec<usize> = mats.iter().map(|m| m.cols()).collect();
    debug_assert_eq!(shape.iter().product::<usize>(), input.len());
    let mut cur = input.to_vec();
    for axis in 0..dim {
        let m = mats[axis];
        let outer: usize = shape[..axis].iter().product();
        let inner: usize = shape[axis + 1..].iter().product();
        let n_in = shape[axis];
        let n_out = m.rows();
        let mut next = vec![0.0; outer * n_out * inner];
        for o in 0..outer {
            for r in 0..n_out {
                let dst = &mut next[(o * n_out + r) * inner..(o * n_out + r + 1) * inner];
                for c in 0..n_in {
                    let a = m.get(r, c);
                    if a == 0.0 {
                        continue;
                    }
                    let src = &cur[(o * n_in + c) * inner..(o * n_in + c + 1) * inner];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += a * s;
                    }
                }
            }
        }
        shape[axis] = n_out;
        cur = next;
    }
    cur
}
