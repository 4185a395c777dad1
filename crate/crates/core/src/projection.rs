//! L2 projection of functions onto modal fields and exact nested transfer
//! between a mesh and its 2x refinement.

use rayon::prelude::*;

use crate::basis::{legendre_orthonormal_all, mode_count, kron_apply, Matrix};
use crate::error::{Error, Result};
use crate::field::ModalField;
use crate::mesh::UniformMesh;
use crate::quadrature::gauss_legendre_rule;
use crate::{MAX_DEGREE, MAX_DIM};

/// Default number of projection quadrature points per axis.
pub fn default_quadrature_points(degree: usize) -> usize {
    (degree + 2).max(10)
}

/// L2-project `f` onto the degree-`p` modal space of `mesh` using a tensor
/// Gauss rule with `q` points per axis on every element.
pub fn project_function<F>(f: F, mesh: UniformMesh, degree: usize, q: usize) -> Result<ModalField>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    project_function_split(f, mesh, degree, q, &[])
}

/// Like [`project_function`], but every element that contains one of the
/// coordinates in `breaks` strictly inside it (along any axis) is split there,
/// so the rule never straddles a kink or jump of `f`.
pub fn project_function_split<F>(
    f: F,
    mesh: UniformMesh,
    degree: usize,
    q: usize,
    breaks: &[f64],
) -> Result<ModalField>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if degree > MAX_DEGREE {
        return Err(Error::UnsupportedDegree(degree));
    }
    if q < degree + 1 {
        return Err(Error::InvalidArgument(format!(
            "projection needs at least p+1 = {} quadrature points, got {q}",
            degree + 1
        )));
    }
    let rule = gauss_legendre_rule(q)?;
    let dim = mesh.dim();
    let np = degree + 1;
    let nm = mode_count(dim, degree);

    // Per axis and element index along the axis: (physical x, phi values, weight).
    // The same table serves every axis because the mesh is uniform.
    let h = mesh.h();
    let axis_nodes: Vec<Vec<(f64, Vec<f64>, f64)>> = (0..mesh.n())
        .map(|i| {
            let origin = mesh.lower() + i as f64 * h;
            let mut cuts = vec![-1.0];
            let mut inner: Vec<f64> = breaks
                .iter()
                .map(|&b| 2.0 * (b - origin) / h - 1.0)
                .filter(|z| *z > -1.0 + 1e-12 && *z < 1.0 - 1e-12)
                .collect();
            inner.sort_by(f64::total_cmp);
            cuts.extend(inner);
            cuts.push(1.0);
            let mut nodes = Vec::new();
            for w in cuts.windows(2) {
                for (z, wt) in rule.mapped(w[0], w[1]) {
                    let mut phi = vec![0.0; np];
                    legendre_orthonormal_all(z, &mut phi);
                    nodes.push((mesh.to_physical(i, z), phi, wt));
                }
            }
            nodes
        })
        .collect();

    let coeffs: Vec<Vec<f64>> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|lin| {
            let idx = mesh.multi_index(lin);
            let lists: Vec<&Vec<(f64, Vec<f64>, f64)>> =
                (0..dim).map(|a| &axis_nodes[idx[a]]).collect();
            let mut out = vec![0.0; nm];
            let mut cursor = [0usize; MAX_DIM];
            let mut x = [0.0; MAX_DIM];
            loop {
                let mut w = 1.0;
                for a in 0..dim {
                    let node = &lists[a][cursor[a]];
                    x[a] = node.0;
                    w *= node.2;
                }
                let v = f(&x[..dim]);
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!("f({:?}) = {v}", &x[..dim])));
                }
                let phis: Vec<&[f64]> = (0..dim).map(|a| lists[a][cursor[a]].1.as_slice()).collect();
                crate::basis::accumulate_outer(dim, w * v, &phis, &mut out);

                let mut a = dim;
                loop {
                    if a == 0 {
                        return Ok(out);
                    }
                    a -= 1;
                    cursor[a] += 1;
                    if cursor[a] < lists[a].len() {
                        break;
                    }
                    cursor[a] = 0;
                }
            }
        })
        .collect::<Result<_>>()?;

    ModalField::new(mesh, degree, coeffs.concat())
}

/// Basis-change tables between a reference element and its two halves.
///
/// `half(s).get(k, m) = int_{-1}^{1} phi_k((eta + 2s - 1) / 2) phi_m(eta) d eta`, i.e. the
/// `m`-th child mode of the parent basis function `phi_k` restricted to half `s`
/// (`s = 0` lower, `s = 1` upper).
#[derive(Debug, Clone)]
pub struct TwoScale {
    degree: usize,
    halves: [Matrix; 2],
    // Transposes, used by refinement.
    refine: [Matrix; 2],
    // Half-scaled tables, used by coarsening.
    coarsen: [Matrix; 2],
}

impl TwoScale {
    pub fn new(degree: usize) -> Self {
        let np = degree + 1;
        let rule = gauss_legendre_rule(np + 1).expect("small rule");
        let table = |side: usize| {
            let shift = 2.0 * side as f64 - 1.0;
            let mut m = Matrix::zeros(np, np);
            let mut parent = vec![0.0; np];
            let mut child = vec![0.0; np];
            for (&eta, &w) in rule.nodes().iter().zip(rule.weights()) {
                legendre_orthonormal_all(0.5 * (eta + shift), &mut parent);
                legendre_orthonormal_all(eta, &mut child);
                for k in 0..np {
                    for j in 0..np {
                        m.set(k, j, m.get(k, j) + w * parent[k] * child[j]);
                    }
                }
            }
            m
        };
        let halves = [table(0), table(1)];
        let refine = [halves[0].transpose(), halves[1].transpose()];
        let coarsen = [halves[0].scaled(0.5), halves[1].scaled(0.5)];
        Self {
            degree,
            halves,
            refine,
            coarsen,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn half(&self, side: usize) -> &Matrix {
        &self.halves[side]
    }

    /// Child coefficients of a parent block on child `child` (numbered as in [`child_side`]).
    pub fn restrict_to_child(&self, dim: usize, child: usize, parent: &[f64]) -> Vec<f64> {
        let mats: Vec<&Matrix> = (0..dim).map(|a| &self.refine[child_side(child, dim, a)]).collect();
        kron_apply(&mats, parent)
    }

    /// Contribution of one child's coefficients to the parent projection.
    pub fn merge_child(&self, dim: usize, child: usize, coeffs: &[f64]) -> Vec<f64> {
        let mats: Vec<&Matrix> = (0..dim).map(|a| &self.coarsen[child_side(child, dim, a)]).collect();
        kron_apply(&mats, coeffs)
    }
}

/// Side (0 lower, 1 upper) of child `child` along `axis`.
///
/// Children are numbered lexicographically like elements: axis 0 is the most
/// significant bit.
#[inline]
pub fn child_side(child: usize, dim: usize, axis: usize) -> usize {
    (child >> (dim - 1 - axis)) & 1
}

/// Child number of a fine element index relative to its parent.
#[inline]
pub fn child_of(fine_idx: &[usize], dim: usize) -> usize {
    (0..dim).fold(0, |acc, a| (acc << 1) | (fine_idx[a] & 1))
}

/// Represent `field` exactly on the mesh with `2N` elements per dimension.
pub fn refine_by_projection(field: &ModalField) -> ModalField {
    let tables = TwoScale::new(field.degree());
    refine_with(&tables, field)
}

pub(crate) fn refine_with(tables: &TwoScale, field: &ModalField) -> ModalField {
    let dim = field.dim();
    let coarse = field.mesh();
    let fine = coarse.refined();
    let coeffs: Vec<Vec<f64>> = (0..fine.num_elements())
        .into_par_iter()
        .map(|lin| {
            let idx = fine.multi_index(lin);
            let mut parent = [0usize; MAX_DIM];
            for a in 0..dim {
                parent[a] = idx[a] / 2;
            }
            let block = field.element(coarse.linear_index(&parent));
            tables.restrict_to_child(dim, child_of(&idx, dim), block)
        })
        .collect();
    ModalField::new(fine, field.degree(), coeffs.concat()).expect("refinement preserves layout")
}

/// L2-orthogonal projection onto the mesh with `N/2` elements per dimension.
pub fn coarsen_by_projection(field: &ModalField) -> Result<ModalField> {
    let tables = TwoScale::new(field.degree());
    coarsen_with(&tables, field)
}

pub(crate) fn coarsen_with(tables: &TwoScale, field: &ModalField) -> Result<ModalField> {
    let dim = field.dim();
    let fine = field.mesh();
    let coarse = fine.coarsened()?;
    let nm = field.modes_per_element();
    let coeffs: Vec<Vec<f64>> = (0..coarse.num_elements())
        .into_par_iter()
        .map(|lin| {
            let idx = coarse.multi_index(lin);
            let mut out = vec![0.0; nm];
            for child in 0..(1usize << dim) {
                let mut fidx = [0usize; MAX_DIM];
                for a in 0..dim {
                    fidx[a] = 2 * idx[a] + child_side(child, dim, a);
                }
                let part = tables.merge_child(dim, child, field.element(fine.linear_index(&fidx)));
                for (o, v) in out.iter_mut().zip(part) {
                    *o += v;
                }
            }
            out
        })
        .collect();
    ModalField::new(coarse, field.degree(), coeffs.concat())
}
