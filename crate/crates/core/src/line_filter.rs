//! Line convolution along the mesh diagonal and the smooth regions of its output.
//!
//! With the diagonal direction `v = (1, .., 1) / sqrt(d)` and scaling
//! `H = sqrt(d) h`, a step of `tau` kernel units moves every coordinate by
//! `tau h`. The filtered value at a point with local element coordinates
//! `w_i = (zeta_i + 1) / 2` is
//!
//! ```text
//! u*(x) = int K(tau) u(x + tau h (1, .., 1)) d tau
//! ```
//!
//! which is a polynomial in `tau` between consecutive kernel knots and
//! crossings `tau = m - w_i`. Everything below works in these local units so
//! the result depends on the element index only through which coefficients
//! are read.

use crate::basis::{contract, legendre_orthonormal_all};
use crate::error::{Error, Result};
use crate::field::ModalField;
use crate::kernel::SiacKernel;
use crate::mesh::UniformMesh;
use crate::quadrature::{gauss_legendre_rule, GaussRule};
use crate::{MAX_DEGREE, MAX_DIM};

/// Breakpoints closer than this (in kernel units) are merged.
pub const BREAK_TOLERANCE: f64 = 1e-12;

/// Diagonal filter orientation on a uniform mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterGeometry {
    dim: usize,
    h: f64,
    scale: f64,
}

impl FilterGeometry {
    /// The diagonal `(1, .., 1) / sqrt(d)` with `H = sqrt(d) h`.
    pub fn diagonal(mesh: &UniformMesh) -> Self {
        let dim = mesh.dim();
        let h = mesh.h();
        Self {
            dim,
            h,
            scale: (dim as f64).sqrt() * h,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Kernel scaling `H`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn direction(&self) -> [f64; MAX_DIM] {
        let c = 1.0 / (self.dim as f64).sqrt();
        let mut v = [0.0; MAX_DIM];
        v[..self.dim].fill(c);
        v
    }

    pub(crate) fn check_mesh(&self, mesh: &UniformMesh) -> Result<()> {
        if mesh.dim() != self.dim || (mesh.h() - self.h).abs() > 1e-12 * self.h {
            return Err(Error::KernelMismatch(format!(
                "geometry for d={} h={} used on d={} h={}",
                self.dim,
                self.h,
                mesh.dim(),
                mesh.h()
            )));
        }
        Ok(())
    }

    /// Point on the line through `x` at parameter `t`.
    pub fn point_at(&self, x: &[f64], t: f64) -> [f64; MAX_DIM] {
        let v = self.direction();
        let mut y = [0.0; MAX_DIM];
        for a in 0..self.dim {
            y[a] = x[a] + t * v[a];
        }
        y
    }
}

/// Per-axis Legendre values at one quadrature node.
pub type NodeBasis = [[f64; MAX_DEGREE + 1]; MAX_DIM];

/// A kernel bound to a geometry and a field degree, ready to evaluate.
#[derive(Debug, Clone)]
pub struct LineFilter {
    kernel: SiacKernel,
    dim: usize,
    degree: usize,
    rule: GaussRule,
    knots: Vec<f64>,
}

impl LineFilter {
    pub fn new(kernel: &SiacKernel, geom: &FilterGeometry, degree: usize) -> Result<Self> {
        Self::with_extra_points(kernel, geom, degree, 0)
    }

    /// As [`LineFilter::new`] with `extra` more Gauss points per segment.
    pub fn with_extra_points(
        kernel: &SiacKernel,
        geom: &FilterGeometry,
        degree: usize,
        extra: usize,
    ) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::UnsupportedDegree(degree));
        }
        if geom.dim > 1 && kernel.order() != 1 {
            return Err(Error::KernelMismatch(format!(
                "B-spline order {} is only supported in one dimension",
                kernel.order()
            )));
        }
        if (kernel.scale() - geom.scale).abs() > 1e-12 * geom.scale {
            return Err(Error::KernelMismatch(format!(
                "kernel scaling {} differs from geometry scaling {}",
                kernel.scale(),
                geom.scale
            )));
        }
        let points = (geom.dim * degree + kernel.order()).div_ceil(2) + 1 + extra;
        Ok(Self {
            kernel: kernel.clone(),
            dim: geom.dim,
            degree,
            rule: gauss_legendre_rule(points)?,
            knots: kernel.unscaled_breaks(),
        })
    }

    pub fn kernel(&self) -> &SiacKernel {
        &self.kernel
    }

    pub fn points_per_segment(&self) -> usize {
        self.rule.len()
    }

    /// Sorted, deduplicated segment ends in kernel units for local coordinates `w`.
    pub fn local_breakpoints(&self, w: &[f64]) -> Vec<f64> {
        let reach = self.kernel.unscaled_half_support();
        let mut b = self.knots.clone();
        for &wi in &w[..self.dim] {
            let lo = (wi - reach).ceil() as i64;
            let hi = (wi + reach).floor() as i64;
            for m in lo..=hi {
                let t = m as f64 - wi;
                if t > -reach && t < reach {
                    b.push(t);
                }
            }
        }
        b.sort_by(f64::total_cmp);
        let mut out: Vec<f64> = Vec::with_capacity(b.len());
        for t in b {
            match out.last() {
                Some(&last) if t - last <= BREAK_TOLERANCE => {}
                _ => out.push(t),
            }
        }
        out
    }

    /// Visit every quadrature node of the convolution at local coordinates `w`.
    ///
    /// The callback receives the element offset (relative to the element
    /// holding the point), the combined quadrature and kernel weight, and the
    /// Legendre values at the node's reference coordinates in that element.
    #[inline]
    pub fn for_each_node(&self, w: &[f64], mut f: impl FnMut(&[i64; MAX_DIM], f64, &NodeBasis)) {
        let np = self.degree + 1;
        let breaks = self.local_breakpoints(w);
        let mut offset = [0i64; MAX_DIM];
        let mut basis: NodeBasis = [[0.0; MAX_DEGREE + 1]; MAX_DIM];
        for seg in breaks.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let mid = 0.5 * (a + b);
            for axis in 0..self.dim {
                offset[axis] = (w[axis] + mid).floor() as i64;
            }
            for (tau, wq) in self.rule.mapped(a, b) {
                let weight = wq * self.kernel.eval_unscaled(tau);
                for axis in 0..self.dim {
                    let zeta = 2.0 * (w[axis] + tau - offset[axis] as f64) - 1.0;
                    legendre_orthonormal_all(zeta, &mut basis[axis][..np]);
                }
                f(&offset, weight, &basis);
            }
        }
    }

    /// Filtered value at reference coordinates `zeta` of element `idx`.
    pub fn eval_local(&self, field: &ModalField, idx: &[usize], zeta: &[f64]) -> f64 {
        debug_assert_eq!(field.degree(), self.degree);
        let mesh = field.mesh();
        let np = self.degree + 1;
        let mut w = [0.0; MAX_DIM];
        for a in 0..self.dim {
            w[a] = 0.5 * (zeta[a] + 1.0);
        }
        let mut sum = 0.0;
        let mut target = [0usize; MAX_DIM];
        self.for_each_node(&w, |off, weight, basis| {
            for a in 0..self.dim {
                target[a] = mesh.wrap(idx[a] as i64 + off[a]);
            }
            let phis: [&[f64]; MAX_DIM] = [&basis[0][..np], &basis[1][..np], &basis[2][..np]];
            sum += weight * contract(self.dim, field.element(mesh.linear_index(&target)), &phis);
        });
        sum
    }

    /// Filtered value at the physical point `x` (wrapped into the domain).
    pub fn eval(&self, field: &ModalField, x: &[f64]) -> f64 {
        let (idx, zeta) = field.mesh().locate(x);
        self.eval_local(field, &idx, &zeta)
    }
}

/// Parameters `t` (physical arc length along the line through `x`) that bound
/// the polynomial pieces of the convolution integrand.
pub fn segment_breakpoints(
    field: &ModalField,
    geom: &FilterGeometry,
    kernel: &SiacKernel,
    x: &[f64],
) -> Result<Vec<f64>> {
    geom.check_mesh(field.mesh())?;
    let filter = LineFilter::new(kernel, geom, field.degree())?;
    let (_, zeta) = field.mesh().locate(x);
    let w: Vec<f64> = zeta[..geom.dim].iter().map(|z| 0.5 * (z + 1.0)).collect();
    Ok(filter
        .local_breakpoints(&w)
        .into_iter()
        .map(|t| t * geom.scale)
        .collect())
}

/// `u*(x)`, the line-filtered field at `x`.
pub fn filter_point(
    field: &ModalField,
    geom: &FilterGeometry,
    kernel: &SiacKernel,
    x: &[f64],
) -> Result<f64> {
    geom.check_mesh(field.mesh())?;
    Ok(LineFilter::new(kernel, geom, field.degree())?.eval(field, x))
}

/// Smooth region of the filtered field inside a reference element.
///
/// Bits `0..d` hold the sign pattern (bit `i` set when `zeta_i > 0`); bits
/// `3..6` hold the ordering of same-sign coordinate pairs `(0,1)`, `(0,2)`,
/// `(1,2)` (bit set when the first is larger). Ties clear the bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegionId(u8);

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Quadrants of the 2D reference square, axis 0 horizontal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrant {
    I,
    II,
    III,
    IV,
}

impl RegionId {
    pub fn raw(self) -> u8 {
        self.0
    }

    pub fn sign_mask(self) -> u8 {
        self.0 & 0b111
    }

    pub fn order_bits(self) -> u8 {
        self.0 >> 3
    }

    pub fn is_positive(self, axis: usize) -> bool {
        self.0 >> axis & 1 == 1
    }

    /// Quadrant of a 2D region.
    pub fn quadrant(self) -> Quadrant {
        match (self.is_positive(0), self.is_positive(1)) {
            (true, true) => Quadrant::I,
            (false, true) => Quadrant::II,
            (false, false) => Quadrant::III,
            (true, false) => Quadrant::IV,
        }
    }
}

pub fn classify_region(zeta: &[f64]) -> RegionId {
    let dim = zeta.len().min(MAX_DIM);
    let mut id = 0u8;
    for (a, &z) in zeta[..dim].iter().enumerate() {
        if z > 0.0 {
            id |= 1 << a;
        }
    }
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        if j < dim && (id >> i & 1) == (id >> j & 1) && zeta[i] > zeta[j] {
            id |= 1 << (3 + k);
        }
    }
    RegionId(id)
}
