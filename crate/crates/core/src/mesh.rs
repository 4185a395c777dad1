//! Uniform tensor-product meshes on `[a, b]^d` with periodic index wrap.

use crate::error::{Error, Result};
use crate::MAX_DIM;

/// Uniform partition of `[lower, upper]^dim` into `n^dim` equal cubes.
///
/// Element `(i_0, .., i_{d-1})` covers `[a + i h, a + (i + 1) h)` per axis; the
/// linear element index is lexicographic with axis 0 most significant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformMesh {
    dim: usize,
    n: usize,
    lower: f64,
    upper: f64,
}

impl UniformMesh {
    pub fn new(dim: usize, n: usize, lower: f64, upper: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if n == 0 {
            return Err(Error::InvalidMesh("element count must be positive".into()));
        }
        if !(lower.is_finite() && upper.is_finite() && upper > lower) {
            return Err(Error::InvalidMesh(format!("bad domain [{lower}, {upper}]")));
        }
        Ok(Self { dim, n, lower, upper })
    }

    /// Mesh of the unit cube `[0, 1]^dim`.
    pub fn unit(dim: usize, n: usize) -> Result<Self> {
        Self::new(dim, n, 0.0, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Elements per dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    /// Element width.
    pub fn h(&self) -> f64 {
        (self.upper - self.lower) / self.n as f64
    }

    pub fn num_elements(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn volume(&self) -> f64 {
        self.length().powi(self.dim as i32)
    }

    /// Same domain, `2n` elements per dimension.
    pub fn refined(&self) -> Self {
        Self { n: 2 * self.n, ..*self }
    }

    /// Same domain, `factor * n` elements per dimension.
    pub fn refined_by(&self, factor: usize) -> Self {
        Self { n: factor * self.n, ..*self }
    }

    /// Same domain, `n / 2` elements per dimension.
    pub fn coarsened(&self) -> Result<Self> {
        if self.n % 2 != 0 {
            return Err(Error::OddElementCount(self.n));
        }
        Ok(Self { n: self.n / 2, ..*self })
    }

    #[inline]
    pub fn linear_index(&self, idx: &[usize]) -> usize {
        idx[..self.dim].iter().fold(0, |acc, &i| acc * self.n + i)
    }

    #[inline]
    pub fn multi_index(&self, mut lin: usize) -> [usize; MAX_DIM] {
        let mut idx = [0; MAX_DIM];
        for axis in (0..self.dim).rev() {
            idx[axis] = lin % self.n;
            lin /= self.n;
        }
        idx
    }

    /// Periodic wrap of a signed element index.
    #[inline]
    pub fn wrap(&self, i: i64) -> usize {
        i.rem_euclid(self.n as i64) as usize
    }

    /// Wrap a coordinate into `[a, b)`.
    pub fn wrap_coordinate(&self, x: f64) -> f64 {
        let len = self.length();
        let mut y = (x - self.lower).rem_euclid(len);
        if y >= len {
            y = 0.0;
        }
        self.lower + y
    }

    /// Element containing `x` after periodic wrap, and the reference
    /// coordinates `zeta_i = 2 (x_i - center_i) / h` of `x` in it.
    pub fn locate(&self, x: &[f64]) -> ([usize; MAX_DIM], [f64; MAX_DIM]) {
        let h = self.h();
        let mut idx = [0; MAX_DIM];
        let mut zeta = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            let y = (self.wrap_coordinate(x[axis]) - self.lower) / h;
            let mut i = y.floor() as i64;
            if i >= self.n as i64 {
                i = self.n as i64 - 1;
            }
            let i = i.max(0);
            idx[axis] = i as usize;
            zeta[axis] = (2.0 * (y - i as f64) - 1.0).clamp(-1.0, 1.0);
        }
        (idx, zeta)
    }

    /// Lower corner of an element, per axis.
    pub fn element_origin(&self, idx: &[usize], axis: usize) -> f64 {
        self.lower + idx[axis] as f64 * self.h()
    }

    /// Physical coordinate of a reference coordinate in element `i` along one axis.
    #[inline]
    pub fn to_physical(&self, i: usize, zeta: f64) -> f64 {
        let h = self.h();
        self.lower + (i as f64 + 0.5 * (zeta + 1.0)) * h
    }
}
