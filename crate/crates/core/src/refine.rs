//! Filter-then-project transfer of a modal field onto the twice refined mesh.
//!
//! Each fine element is one child of a coarse element. Inside a child the
//! filtered field is a polynomial on every coordinate-ordering simplex of the
//! axes that share the child's side, so the fine modes are integrated exactly
//! with a collapsed Gauss rule per simplex.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::basis::{accumulate_outer, legendre_orthonormal_all, mode_count};
use crate::error::{Error, Result};
use crate::field::ModalField;
use crate::kernel::SiacKernel;
use crate::line_filter::{classify_region, FilterGeometry, LineFilter, RegionId};
use crate::mesh::UniformMesh;
use crate::projection::{child_of, child_side, refine_by_projection};
use crate::quadrature::ordered_simplex_rule;
use crate::{MAX_DEGREE, MAX_DIM};

/// How the fine modes are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefineMode {
    /// Quadrature of the filtered field evaluated pointwise.
    Direct,
    /// Precomputed translation invariant stencil.
    Stencil,
}

/// Where the filter is applied when refining several levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Filter at the first level only, then refine by exact projection.
    Once,
    /// Filter at every level.
    Each,
}

/// Collapsed Gauss points per axis on each simplex.
pub fn default_simplex_points(degree: usize) -> usize {
    2 * (degree + 2)
}

/// Quadrature for one smooth subregion of a child element, in child coordinates.
#[derive(Debug, Clone)]
pub struct Subregion {
    pub region: RegionId,
    pub nodes: Vec<[f64; MAX_DIM]>,
    pub weights: Vec<f64>,
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// Reference coordinate in the parent of child coordinate `eta` on `side`.
#[inline]
pub fn child_to_parent(eta: f64, side: usize) -> f64 {
    0.5 * (eta + 2.0 * side as f64 - 1.0)
}

/// Smooth subregions of child `child`, sorted by region id, with `q`-point rules.
pub fn child_subregions(dim: usize, child: usize, q: usize) -> Result<Vec<Subregion>> {
    let groups: Vec<Vec<usize>> = (0..2)
        .map(|s| (0..dim).filter(|&a| child_side(child, dim, a) == s).collect())
        .collect();
    let rules: Vec<(Vec<Vec<f64>>, Vec<f64>)> = groups
        .iter()
        .map(|g| ordered_simplex_rule(g.len(), q))
        .collect::<Result<_>>()?;
    let perms: Vec<Vec<Vec<usize>>> = groups.iter().map(|g| permutations(g)).collect();

    let mut out = Vec::new();
    for p0 in &perms[0] {
        for p1 in &perms[1] {
            let mut nodes = Vec::new();
            let mut weights = Vec::new();
            for (y0, w0) in rules[0].0.iter().zip(&rules[0].1) {
                for (y1, w1) in rules[1].0.iter().zip(&rules[1].1) {
                    let mut eta = [0.0; MAX_DIM];
                    for (k, &a) in p0.iter().enumerate() {
                        eta[a] = y0[k];
                    }
                    for (k, &a) in p1.iter().enumerate() {
                        eta[a] = y1[k];
                    }
                    nodes.push(eta);
                    weights.push(w0 * w1);
                }
            }
            let total: f64 = weights.iter().sum();
            let mut centroid = [0.0; MAX_DIM];
            for (n, w) in nodes.iter().zip(&weights) {
                for a in 0..dim {
                    centroid[a] += w * n[a] / total;
                }
            }
            for (a, c) in centroid.iter_mut().enumerate().take(dim) {
                *c = child_to_parent(*c, child_side(child, dim, a));
            }
            out.push(Subregion {
                region: classify_region(&centroid[..dim]),
                nodes,
                weights,
            });
        }
    }
    out.sort_by_key(|s| s.region);
    Ok(out)
}

fn check_kernel(field: &ModalField, kernel: &SiacKernel, geom: &FilterGeometry) -> Result<()> {
    let p = field.degree();
    if kernel.r() != 2 * p || kernel.order() != 1 {
        return Err(Error::KernelMismatch(format!(
            "refinement needs r = {} and l = 1, got r = {} and l = {}",
            2 * p,
            kernel.r(),
            kernel.order()
        )));
    }
    geom.check_mesh(field.mesh())
}

/// One filter-then-project step onto the mesh with `2N` elements per dimension.
pub fn refine_once(
    field: &ModalField,
    kernel: &SiacKernel,
    geom: &FilterGeometry,
    mode: RefineMode,
) -> Result<ModalField> {
    check_kernel(field, kernel, geom)?;
    let q = default_simplex_points(field.degree());
    match mode {
        RefineMode::Direct => refine_direct(field, kernel, geom, q),
        RefineMode::Stencil => {
            LineFilter::new(kernel, geom, field.degree())?;
            let stencil = cached_stencil(field.degree(), field.dim())?;
            stencil.apply(field)
        }
    }
}

/// [`refine_once`] with the canonical diagonal kernel for `field`.
pub fn refine_filtered(field: &ModalField, mode: RefineMode) -> Result<ModalField> {
    let geom = FilterGeometry::diagonal(field.mesh());
    let kernel = SiacKernel::for_degree(field.degree(), geom.scale())?;
    refine_once(field, &kernel, &geom, mode)
}

/// Direct path with `q` simplex points per axis.
pub fn refine_direct(
    field: &ModalField,
    kernel: &SiacKernel,
    geom: &FilterGeometry,
    q: usize,
) -> Result<ModalField> {
    check_kernel(field, kernel, geom)?;
    let dim = field.dim();
    let p = field.degree();
    let np = p + 1;
    let nm = mode_count(dim, p);
    let filter = LineFilter::new(kernel, geom, p)?;
    let rules: Vec<Vec<Subregion>> = (0..1usize << dim)
        .map(|c| child_subregions(dim, c, q))
        .collect::<Result<_>>()?;
    let coarse = field.mesh();
    let fine = coarse.refined();
    let blocks: Vec<Vec<f64>> = (0..fine.num_elements())
        .into_par_iter()
        .map(|lin| {
            let fidx = fine.multi_index(lin);
            let child = child_of(&fidx, dim);
            let mut cidx = [0usize; MAX_DIM];
            for a in 0..dim {
                cidx[a] = fidx[a] / 2;
            }
            let mut out = vec![0.0; nm];
            let mut buf = [[0.0; MAX_DEGREE + 1]; MAX_DIM];
            let mut zeta = [0.0; MAX_DIM];
            for sub in &rules[child] {
                for (eta, &w) in sub.nodes.iter().zip(&sub.weights) {
                    for a in 0..dim {
                        zeta[a] = child_to_parent(eta[a], child_side(child, dim, a));
                        legendre_orthonormal_all(eta[a], &mut buf[a][..np]);
                    }
                    let value = filter.eval_local(field, &cidx, &zeta);
                    let phis: [&[f64]; MAX_DIM] = [&buf[0][..np], &buf[1][..np], &buf[2][..np]];
                    accumulate_outer(dim, w * value, &phis, &mut out);
                }
            }
            out
        })
        .collect();
    ModalField::new(fine, p, blocks.concat())
}

/// One nonzero block of a child stencil: fine modes of the child from the
/// coarse modes of the element at `offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilBlock {
    pub offset: [i64; MAX_DIM],
    /// Row-major `(p+1)^d x (p+1)^d`, rows are fine modes.
    pub matrix: Vec<f64>,
}

/// Fused filter-and-project map for every child position.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionStencil {
    dim: usize,
    degree: usize,
    children: Vec<Vec<StencilBlock>>,
}

impl TransitionStencil {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Element offsets reach `-(p+1)..=p+1` per axis.
    pub fn reach(&self) -> i64 {
        self.degree as i64 + 1
    }

    /// Nonzero blocks of one child, offsets in lexicographic order.
    pub fn blocks(&self, child: usize) -> &[StencilBlock] {
        &self.children[child]
    }

    pub fn apply(&self, field: &ModalField) -> Result<ModalField> {
        if field.dim() != self.dim || field.degree() != self.degree {
            return Err(Error::LayoutMismatch(format!(
                "stencil for d={} p={} applied to d={} p={}",
                self.dim,
                self.degree,
                field.dim(),
                field.degree()
            )));
        }
        let dim = self.dim;
        let nm = mode_count(dim, self.degree);
        let coarse = field.mesh();
        let fine = coarse.refined();
        let blocks: Vec<Vec<f64>> = (0..fine.num_elements())
            .into_par_iter()
            .map(|lin| {
                let fidx = fine.multi_index(lin);
                let child = child_of(&fidx, dim);
                let mut out = vec![0.0; nm];
                let mut src = [0usize; MAX_DIM];
                for block in &self.children[child] {
                    for a in 0..dim {
                        src[a] = coarse.wrap((fidx[a] / 2) as i64 + block.offset[a]);
                    }
                    let u = field.element(coarse.linear_index(&src));
                    for (o, row) in out.iter_mut().zip(block.matrix.chunks_exact(nm)) {
                        *o += row.iter().zip(u).map(|(a, b)| a * b).sum::<f64>();
                    }
                }
                out
            })
            .collect();
        ModalField::new(fine, self.degree, blocks.concat())
    }
}

/// Stencil for degree `p` in dimension `d` with the default simplex rule.
pub fn build_transition_stencil(degree: usize, dim: usize) -> Result<TransitionStencil> {
    build_transition_stencil_with(degree, dim, default_simplex_points(degree))
}

/// Stencil with `q` collapsed Gauss points per axis on every simplex.
pub fn build_transition_stencil_with(degree: usize, dim: usize, q: usize) -> Result<TransitionStencil> {
    if degree > MAX_DEGREE {
        return Err(Error::UnsupportedDegree(degree));
    }
    // Filter weights in local units do not depend on the mesh size.
    let mesh = UniformMesh::unit(dim, 1)?;
    let geom = FilterGeometry::diagonal(&mesh);
    let kernel = SiacKernel::for_degree(degree, geom.scale())?;
    let filter = LineFilter::new(&kernel, &geom, degree)?;
    let np = degree + 1;
    let nm = mode_count(dim, degree);
    let reach = degree as i64 + 1;
    let width = (2 * reach + 1) as usize;
    let nblocks = width.pow(dim as u32);

    let children: Vec<Vec<StencilBlock>> = (0..1usize << dim)
        .into_par_iter()
        .map(|child| -> Result<Vec<StencilBlock>> {
            let mut dense = vec![0.0; nblocks * nm * nm];
            let mut buf = [[0.0; MAX_DEGREE + 1]; MAX_DIM];
            let mut test = vec![0.0; nm];
            let mut trial = vec![0.0; nm];
            let mut w = [0.0; MAX_DIM];
            for sub in child_subregions(dim, child, q)? {
                for (eta, &wq) in sub.nodes.iter().zip(&sub.weights) {
                    for a in 0..dim {
                        legendre_orthonormal_all(eta[a], &mut buf[a][..np]);
                        w[a] = 0.5 * (child_to_parent(eta[a], child_side(child, dim, a)) + 1.0);
                    }
                    test.fill(0.0);
                    let phis: [&[f64]; MAX_DIM] = [&buf[0][..np], &buf[1][..np], &buf[2][..np]];
                    accumulate_outer(dim, wq, &phis, &mut test);
                    filter.for_each_node(&w[..dim], |off, kw, basis| {
                        let b = (0..dim).fold(0usize, |acc, a| {
                            acc * width + (off[a] + reach) as usize
                        });
                        trial.fill(0.0);
                        let phis: [&[f64]; MAX_DIM] =
                            [&basis[0][..np], &basis[1][..np], &basis[2][..np]];
                        accumulate_outer(dim, kw, &phis, &mut trial);
                        let block = &mut dense[b * nm * nm..(b + 1) * nm * nm];
                        for (row, &t) in block.chunks_exact_mut(nm).zip(&test) {
                            for (x, &s) in row.iter_mut().zip(&trial) {
                                *x += t * s;
                            }
                        }
                    });
                }
            }
            let mut blocks = Vec::new();
            for (b, matrix) in dense.chunks_exact(nm * nm).enumerate() {
                if matrix.iter().all(|&v| v == 0.0) {
                    continue;
                }
                let mut offset = [0i64; MAX_DIM];
                let mut rest = b;
                for a in (0..dim).rev() {
                    offset[a] = (rest % width) as i64 - reach;
                    rest /= width;
                }
                blocks.push(StencilBlock {
                    offset,
                    matrix: matrix.to_vec(),
                });
            }
            Ok(blocks)
        })
        .collect::<Result<_>>()?;
    Ok(TransitionStencil {
        dim,
        degree,
        children,
    })
}

fn max_stencil_diff(a: &TransitionStencil, b: &TransitionStencil) -> f64 {
    let mut worst = 0.0f64;
    for (ca, cb) in a.children.iter().zip(&b.children) {
        let lookup: HashMap<[i64; MAX_DIM], &Vec<f64>> =
            cb.iter().map(|blk| (blk.offset, &blk.matrix)).collect();
        for blk in ca {
            match lookup.get(&blk.offset) {
                Some(m) => {
                    for (x, y) in blk.matrix.iter().zip(m.iter()) {
                        worst = worst.max((x - y).abs());
                    }
                }
                None => worst = worst.max(blk.matrix.iter().fold(0.0, |m, v| m.max(v.abs()))),
            }
        }
    }
    worst
}

/// Shared stencil for `(p, d)`, built on first use.
pub fn cached_stencil(degree: usize, dim: usize) -> Result<Arc<TransitionStencil>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<TransitionStencil>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("stencil cache poisoned");
    if let Some(s) = guard.get(&(degree, dim)) {
        return Ok(s.clone());
    }
    let stencil = Arc::new(build_transition_stencil(degree, dim)?);
    if cfg!(debug_assertions) {
        let finer = build_transition_stencil_with(degree, dim, default_simplex_points(degree) + 2)?;
        let diff = max_stencil_diff(&stencil, &finer);
        if diff > 1e-12 {
            log::warn!("stencil d={dim} p={degree}: simplex rule not converged ({diff:.2e})");
        }
    }
    guard.insert((degree, dim), stencil.clone());
    Ok(stencil)
}

/// Refine `levels` times, filtering at the first level or at every level.
pub fn enhance(field: &ModalField, levels: usize, strategy: Strategy, mode: RefineMode) -> Result<ModalField> {
    if levels == 0 {
        return Err(Error::InvalidArgument("levels must be at least 1".into()));
    }
    let mut current = refine_filtered(field, mode)?;
    for _ in 1..levels {
        current = match strategy {
            Strategy::Once => refine_by_projection(&current),
            Strategy::Each => refine_filtered(&current, mode)?,
        };
    }
    Ok(current)
}
