//! Multiwavelets and the two-scale split of a fine field into a coarse field
//! plus detail coefficients.
//!
//! In one dimension the fine space over a reference element is described by
//! child coefficient vectors `(left modes, right modes)` of length `2(p+1)`;
//! the `L2(-1, 1)` inner product of two such vectors is half their dot
//! product. Detail functions in `d` dimensions are tensor products with at
//! least one wavelet factor, indexed by a type mask `t` in `1..2^d` (bit for
//! axis 0 most significant, set for a wavelet factor) and a mode multi-index.

use rayon::prelude::*;

use crate::basis::{kron_apply, legendre_orthonormal_all, mode_count, Matrix};
use crate::error::{Error, Result};
use crate::field::ModalField;
use crate::kernel::SiacKernel;
use crate::line_filter::FilterGeometry;
use crate::projection::{child_side, TwoScale};
use crate::refine::{refine_once, RefineMode};
use crate::{MAX_DEGREE, MAX_DIM};

/// Orthonormal wavelets of the complement of degree-`p` polynomials in the
/// two-piece degree-`p` space on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct MultiwaveletBasis {
    degree: usize,
    // Rows: p+1 scaling functions then p+1 wavelets, in child coordinates.
    analysis: Matrix,
}

fn half_dot(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
}

pub fn build_multiwavelets(degree: usize) -> Result<MultiwaveletBasis> {
    if degree > MAX_DEGREE {
        return Err(Error::UnsupportedDegree(degree));
    }
    let np = degree + 1;
    let two = TwoScale::new(degree);
    let scaling: Vec<Vec<f64>> = (0..np)
        .map(|k| {
            let mut v = two.half(0).row(k).to_vec();
            v.extend_from_slice(two.half(1).row(k));
            v
        })
        .collect();
    let mut wavelets: Vec<Vec<f64>> = Vec::with_capacity(np);
    for k in 0..np {
        // sign(zeta) phi_k
        let mut v: Vec<f64> = scaling[k][..np].iter().map(|x| -x).collect();
        v.extend_from_slice(&scaling[k][np..]);
        for _ in 0..2 {
            for u in scaling.iter().chain(&wavelets) {
                let c = half_dot(&v, u);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= c * y;
                }
            }
        }
        let norm = half_dot(&v, &v).sqrt();
        for x in v.iter_mut() {
            *x /= norm;
        }
        if let Some(&lead) = v[np..].iter().rev().find(|x| x.abs() > 1e-10) {
            if lead < 0.0 {
                for x in v.iter_mut() {
                    *x = -*x;
                }
            }
        }
        wavelets.push(v);
    }
    let rows: Vec<&Vec<f64>> = scaling.iter().chain(&wavelets).collect();
    let analysis = Matrix::from_fn(2 * np, 2 * np, |i, j| rows[i][j]);
    Ok(MultiwaveletBasis { degree, analysis })
}

impl MultiwaveletBasis {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Child coefficients `(left, right)` of wavelet `k`.
    pub fn wavelet(&self, k: usize) -> (&[f64], &[f64]) {
        let np = self.degree + 1;
        let row = self.analysis.row(np + k);
        row.split_at(np)
    }

    /// Rows `[scaling; wavelets]` by columns `(side, child mode)`.
    pub fn analysis_matrix(&self) -> &Matrix {
        &self.analysis
    }

    /// Detail functions per coarse element, `(2^d - 1)(p+1)^d`.
    pub fn detail_count(&self, dim: usize) -> usize {
        ((1 << dim) - 1) * mode_count(dim, self.degree)
    }

    /// `psi_k(zeta)` on the reference element.
    pub fn eval_wavelet(&self, k: usize, zeta: f64) -> f64 {
        let np = self.degree + 1;
        let (left, right) = self.wavelet(k);
        let (coeffs, eta) = if zeta < 0.0 {
            (left, 2.0 * zeta + 1.0)
        } else {
            (right, 2.0 * zeta - 1.0)
        };
        let mut phi = [0.0; MAX_DEGREE + 1];
        legendre_orthonormal_all(eta, &mut phi[..np]);
        coeffs.iter().zip(&phi[..np]).map(|(c, p)| c * p).sum()
    }

    /// Detail function `index` evaluated at reference coordinates `zeta`.
    pub fn eval_detail(&self, dim: usize, index: usize, zeta: &[f64]) -> f64 {
        let np = self.degree + 1;
        let m = mode_count(dim, self.degree);
        let mask = index / m + 1;
        let mut alpha = index % m;
        let mut value = 1.0;
        for a in (0..dim).rev() {
            let k = alpha % np;
            alpha /= np;
            value *= if (mask >> (dim - 1 - a)) & 1 == 1 {
                self.eval_wavelet(k, zeta[a])
            } else {
                let mut phi = [0.0; MAX_DEGREE + 1];
                legendre_orthonormal_all(zeta[a], &mut phi[..np]);
                phi[k]
            };
        }
        value
    }
}

/// Coarse field plus detail coefficients, ordered by coarse element then detail index.
///
/// Details are coefficients against detail functions normalized on the
/// physical coarse element.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletDecomposition {
    coarse: ModalField,
    details: Vec<f64>,
}

impl WaveletDecomposition {
    pub fn new(coarse: ModalField, details: Vec<f64>) -> Result<Self> {
        let per = ((1 << coarse.dim()) - 1) * coarse.modes_per_element();
        let expected = coarse.mesh().num_elements() * per;
        if details.len() != expected {
            return Err(Error::LayoutMismatch(format!(
                "expected {expected} detail coefficients, got {}",
                details.len()
            )));
        }
        if let Some(i) = details.iter().position(|d| !d.is_finite()) {
            return Err(Error::NonFinite(format!("detail {i} is {}", details[i])));
        }
        Ok(Self { coarse, details })
    }

    pub fn coarse(&self) -> &ModalField {
        &self.coarse
    }

    pub fn details(&self) -> &[f64] {
        &self.details
    }

    pub fn details_per_element(&self) -> usize {
        ((1 << self.coarse.dim()) - 1) * self.coarse.modes_per_element()
    }

    /// Details of one coarse element.
    pub fn element_details(&self, lin: usize) -> &[f64] {
        let n = self.details_per_element();
        &self.details[lin * n..(lin + 1) * n]
    }

    pub fn into_parts(self) -> (ModalField, Vec<f64>) {
        (self.coarse, self.details)
    }

    /// Sum of squared details, the fine-scale energy.
    pub fn detail_energy(&self) -> f64 {
        self.details.iter().map(|d| d * d).sum()
    }
}

fn detail_scale(coarse: &ModalField) -> f64 {
    (0.5 * coarse.mesh().h()).powf(0.5 * coarse.dim() as f64)
}

/// Gather the children of a coarse element into the per-axis `(side, mode)` tensor.
fn gather(fine: &ModalField, cidx: &[usize; MAX_DIM]) -> Vec<f64> {
    let dim = fine.dim();
    let np = fine.degree() + 1;
    let nm = fine.modes_per_element();
    let width = 2 * np;
    let mesh = fine.mesh();
    let mut out = vec![0.0; width.pow(dim as u32)];
    for child in 0..1usize << dim {
        let mut fidx = [0usize; MAX_DIM];
        for a in 0..dim {
            fidx[a] = 2 * cidx[a] + child_side(child, dim, a);
        }
        let block = fine.element(mesh.linear_index(&fidx));
        for (mu, &v) in block.iter().enumerate().take(nm) {
            let mut rest = mu;
            let mut pos = 0;
            let mut stride = 1;
            for a in (0..dim).rev() {
                let m = rest % np;
                rest /= np;
                pos += (child_side(child, dim, a) * np + m) * stride;
                stride *= width;
            }
            out[pos] = v;
        }
    }
    out
}

/// Per-axis `(type, mode)` tensor index of detail `index` (or the coarse mode if `mask == 0`).
fn split_index(dim: usize, np: usize, mask: usize, alpha: usize) -> usize {
    let width = 2 * np;
    let mut rest = alpha;
    let mut pos = 0;
    let mut stride = 1;
    for a in (0..dim).rev() {
        let k = rest % np;
        rest /= np;
        pos += (((mask >> (dim - 1 - a)) & 1) * np + k) * stride;
        stride *= width;
    }
    pos
}

pub fn decompose(fine: &ModalField) -> Result<WaveletDecomposition> {
    let basis = build_multiwavelets(fine.degree())?;
    decompose_with(&basis, fine)
}

pub fn decompose_with(basis: &MultiwaveletBasis, fine: &ModalField) -> Result<WaveletDecomposition> {
    let dim = fine.dim();
    let p = fine.degree();
    if basis.degree != p {
        return Err(Error::LayoutMismatch(format!("wavelets for p={} used with p={p}", basis.degree)));
    }
    let np = p + 1;
    let nm = mode_count(dim, p);
    let coarse_mesh = fine.mesh().coarsened()?;
    let half = 0.5f64.powi(dim as i32);
    let phys = (0.5 * coarse_mesh.h()).powf(0.5 * dim as f64);
    let mats: Vec<&Matrix> = vec![&basis.analysis; dim];
    let parts: Vec<(Vec<f64>, Vec<f64>)> = (0..coarse_mesh.num_elements())
        .into_par_iter()
        .map(|lin| {
            let cidx = coarse_mesh.multi_index(lin);
            let y = kron_apply(&mats, &gather(fine, &cidx));
            let coarse: Vec<f64> = (0..nm).map(|a| half * y[split_index(dim, np, 0, a)]).collect();
            let mut details = Vec::with_capacity(basis.detail_count(dim));
            for mask in 1..1usize << dim {
                for a in 0..nm {
                    details.push(phys * half * y[split_index(dim, np, mask, a)]);
                }
            }
            (coarse, details)
        })
        .collect();
    let (c, d): (Vec<Vec<f64>>, Vec<Vec<f64>>) = parts.into_iter().unzip();
    WaveletDecomposition::new(ModalField::new(coarse_mesh, p, c.concat())?, d.concat())
}

pub fn reconstruct(dec: &WaveletDecomposition) -> Result<ModalField> {
    let basis = build_multiwavelets(dec.coarse.degree())?;
    reconstruct_with(&basis, dec)
}

pub fn reconstruct_with(basis: &MultiwaveletBasis, dec: &WaveletDecomposition) -> Result<ModalField> {
    let coarse = &dec.coarse;
    let dim = coarse.dim();
    let p = coarse.degree();
    if basis.degree != p {
        return Err(Error::LayoutMismatch(format!("wavelets for p={} used with p={p}", basis.degree)));
    }
    let np = p + 1;
    let nm = mode_count(dim, p);
    let width = 2 * np;
    let cmesh = coarse.mesh();
    let fine_mesh = cmesh.refined();
    let inv_phys = 1.0 / detail_scale(coarse);
    let synth = basis.analysis.transpose();
    let mats: Vec<&Matrix> = vec![&synth; dim];
    let per_element: Vec<Vec<f64>> = (0..cmesh.num_elements())
        .into_par_iter()
        .map(|lin| {
            let mut y = vec![0.0; width.pow(dim as u32)];
            for (a, &c) in coarse.element(lin).iter().enumerate() {
                y[split_index(dim, np, 0, a)] = c;
            }
            let details = dec.element_details(lin);
            for mask in 1..1usize << dim {
                for a in 0..nm {
                    y[split_index(dim, np, mask, a)] = inv_phys * details[(mask - 1) * nm + a];
                }
            }
            kron_apply(&mats, &y)
        })
        .collect();
    let mut coeffs = vec![0.0; fine_mesh.num_elements() * nm];
    for (lin, v) in per_element.iter().enumerate() {
        let cidx = cmesh.multi_index(lin);
        for child in 0..1usize << dim {
            let mut fidx = [0usize; MAX_DIM];
            for a in 0..dim {
                fidx[a] = 2 * cidx[a] + child_side(child, dim, a);
            }
            let base = fine_mesh.linear_index(&fidx) * nm;
            for mu in 0..nm {
                let mut rest = mu;
                let mut pos = 0;
                let mut stride = 1;
                for a in (0..dim).rev() {
                    pos += (child_side(child, dim, a) * np + rest % np) * stride;
                    rest /= np;
                    stride *= width;
                }
                coeffs[base + mu] = v[pos];
            }
        }
    }
    ModalField::new(fine_mesh, p, coeffs)
}

/// Decomposition of the filtered refinement of `coarse`.
pub fn enhanced_details(
    coarse: &ModalField,
    kernel: &SiacKernel,
    geom: &FilterGeometry,
    mode: RefineMode,
) -> Result<WaveletDecomposition> {
    decompose(&refine_once(coarse, kernel, geom, mode)?)
}
