//! Discrete L2 and max errors on a fixed evaluation mesh, with optional
//! exclusion of elements polluted by non-smooth features.

use rayon::prelude::*;

use crate::basis::{contract, legendre_orthonormal_all};
use crate::error::{Error, Result};
use crate::field::ModalField;
use crate::mesh::UniformMesh;
use crate::quadrature::gauss_legendre_rule;
use crate::MAX_DIM;

use super::functions::TestFunction;

pub const DEFAULT_ERROR_NODES: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// L2 norm of the error over the included elements, normalized by the whole domain.
    pub l2: f64,
    /// The same integral normalized by the included measure only.
    pub l2_included: f64,
    pub linf: f64,
    pub eval_n: usize,
    pub nodes: usize,
    pub excluded: usize,
    pub total: usize,
}

/// Elements excluded on a mesh with `n` elements per axis: an element is
/// excluded when its index on any axis is flagged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PollutionMask {
    n: usize,
    flagged: Vec<bool>,
}

impl PollutionMask {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            flagged: vec![false; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Flagged indices along one axis.
    pub fn flagged_indices(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.flagged[i]).collect()
    }

    pub fn is_empty(&self) -> bool {
        !self.flagged.iter().any(|&f| f)
    }

    pub fn excludes(&self, idx: &[usize]) -> bool {
        idx.iter().any(|&i| self.flagged[i])
    }

    /// The same mask on a mesh refined by an integer factor (children inherit).
    pub fn lift_to(&self, n: usize) -> Result<Self> {
        if n % self.n != 0 {
            return Err(Error::NotAMultiple { eval_n: n, n: self.n });
        }
        let r = n / self.n;
        Ok(Self {
            n,
            flagged: (0..n).map(|i| self.flagged[i / r]).collect(),
        })
    }

    pub fn excluded_count(&self, dim: usize) -> usize {
        let kept = self.flagged.iter().filter(|&&f| !f).count();
        self.n.pow(dim as u32) - kept.pow(dim as u32)
    }
}

/// Exclusion radius for a level, in units of the coarse width `h`.
pub fn pollution_radius(level: usize, degree: usize) -> Result<f64> {
    let band = degree as f64 + 0.5;
    match level {
        0 => Ok(0.0),
        1 => Ok(band),
        2 => Ok(1.5 * band),
        _ => Err(Error::InvalidArgument(format!("pollution level must be 0, 1 or 2, got {level}"))),
    }
}

/// Elements of the `target_n` mesh within the level's radius of a coarse
/// element whose closure contains a non-smooth locus of `f`.
///
/// Level 0 keeps only elements overlapping those coarse elements. Levels 1
/// and 2 flag every element of the once refined mesh closer than `h(p + 1/2)`
/// and `1.5 h(p + 1/2)`, with distances taken between closed elements along
/// each axis. The second filter reads whole elements of that mesh, so the
/// level 2 band is flagged there and inherited by the children.
/// `target_n` must be a multiple of that flagging mesh.
pub fn pollution_mask(
    f: &TestFunction,
    coarse_n: usize,
    level: usize,
    target_n: usize,
    degree: usize,
) -> Result<PollutionMask> {
    let radius = pollution_radius(level, degree)?;
    let mask_n = coarse_n << level.min(1);
    if coarse_n == 0 || target_n % mask_n != 0 {
        return Err(Error::InvalidArgument(format!(
            "level {level} mask lives on a multiple of {mask_n} elements, not {target_n}"
        )));
    }
    if f.loci().is_empty() {
        log::warn!("`{}` is smooth; pollution mask is empty", f.name());
        return Ok(PollutionMask::empty(target_n));
    }
    let h = 1.0 / coarse_n as f64;
    let ht = 1.0 / mask_n as f64;
    let eps = 1e-9 * ht;
    let polluted: Vec<usize> = (0..coarse_n)
        .filter(|&k| {
            let (lo, hi) = (k as f64 * h, (k + 1) as f64 * h);
            f.loci().iter().any(|&c| c >= lo - eps && c <= hi + eps)
        })
        .collect();
    let flagged = (0..mask_n)
        .map(|j| {
            let (lo, hi) = (j as f64 * ht, (j + 1) as f64 * ht);
            polluted.iter().any(|&k| {
                let (clo, chi) = (k as f64 * h, (k + 1) as f64 * h);
                let gap = (lo - chi).max(clo - hi);
                gap < radius * h - eps
            })
        })
        .collect();
    PollutionMask { n: mask_n, flagged }.lift_to(target_n)
}

/// Errors of `field` against `f` at `nodes^d` Gauss points per element of the
/// mesh with `eval_n` elements per axis.
///
/// `eval_n` must be a multiple of the field's `N`; the field is evaluated
/// exactly at the sub-element points, which is the same as sampling its
/// nested refinement.
pub fn compute_errors(
    field: &ModalField,
    f: &TestFunction,
    eval_n: usize,
    mask: Option<&PollutionMask>,
    nodes: usize,
) -> Result<ErrorReport> {
    let mesh = field.mesh();
    let dim = mesh.dim();
    if f.dim() != dim {
        return Err(Error::InvalidArgument(format!(
            "function is {}-dimensional, field is {dim}-dimensional",
            f.dim()
        )));
    }
    if eval_n == 0 || eval_n % mesh.n() != 0 {
        return Err(Error::NotAMultiple { eval_n, n: mesh.n() });
    }
    let mask = match mask {
        Some(m) if m.n() != eval_n => Some(m.lift_to(eval_n)?),
        Some(m) => Some(m.clone()),
        None => None,
    };
    let ratio = eval_n / mesh.n();
    let eval_mesh = UniformMesh::new(dim, eval_n, mesh.lower(), mesh.upper())?;
    let rule = gauss_legendre_rule(nodes)?;
    let np = field.degree() + 1;

    // Basis values per sub-element position and node; coordinates per eval index and node.
    let phi: Vec<Vec<Vec<f64>>> = (0..ratio)
        .map(|s| {
            rule.nodes()
                .iter()
                .map(|&xi| {
                    let zeta = 2.0 * (s as f64 + 0.5 * (xi + 1.0)) / ratio as f64 - 1.0;
                    let mut v = vec![0.0; np];
                    legendre_orthonormal_all(zeta, &mut v);
                    v
                })
                .collect()
        })
        .collect();
    let coords: Vec<Vec<f64>> = (0..eval_n)
        .map(|i| rule.nodes().iter().map(|&xi| eval_mesh.to_physical(i, xi)).collect())
        .collect();

    let per_element: Vec<Option<(f64, f64)>> = (0..eval_mesh.num_elements())
        .into_par_iter()
        .map(|lin| {
            let idx = eval_mesh.multi_index(lin);
            if mask.as_ref().is_some_and(|m| m.excludes(&idx[..dim])) {
                return None;
            }
            let mut parent = [0usize; MAX_DIM];
            for a in 0..dim {
                parent[a] = idx[a] / ratio;
            }
            let coeffs = field.element(mesh.linear_index(&parent));
            let mut sum = 0.0;
            let mut max = 0.0f64;
            let mut cursor = [0usize; MAX_DIM];
            let mut x = [0.0; MAX_DIM];
            loop {
                let mut w = 1.0;
                let mut phis: [&[f64]; MAX_DIM] = [&[], &[], &[]];
                for a in 0..dim {
                    x[a] = coords[idx[a]][cursor[a]];
                    w *= rule.weights()[cursor[a]];
                    phis[a] = &phi[idx[a] % ratio][cursor[a]];
                }
                let err = (f.eval(&x[..dim]) - contract(dim, coeffs, &phis)).abs();
                sum += w * err * err;
                max = max.max(err);
                let mut a = dim;
                loop {
                    if a == 0 {
                        return Some((sum, max));
                    }
                    a -= 1;
                    cursor[a] += 1;
                    if cursor[a] < nodes {
                        break;
                    }
                    cursor[a] = 0;
                }
            }
        })
        .collect();

    let total = per_element.len();
    let mut sum = 0.0;
    let mut linf = 0.0f64;
    let mut included = 0usize;
    for (s, m) in per_element.into_iter().flatten() {
        sum += s;
        linf = linf.max(m);
        included += 1;
    }
    // Gauss weights on one element sum to 2^d.
    let mass = 2f64.powi(dim as i32);
    let l2 = (sum / (total as f64 * mass)).sqrt();
    let l2_included = if included == 0 {
        0.0
    } else {
        (sum / (included as f64 * mass)).sqrt()
    };
    if !(l2.is_finite() && linf.is_finite()) {
        return Err(Error::NonFinite(format!("error norms {l2} / {linf}")));
    }
    Ok(ErrorReport {
        l2,
        l2_included,
        linf,
        eval_n,
        nodes,
        excluded: total - included,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_against_zero_function() {
        let f = TestFunction::lookup("zero", 2).unwrap();
        let field = ModalField::zeros(f.mesh(3).unwrap(), 2).unwrap();
        let r = compute_errors(&field, &f, 6, None, 6).unwrap();
        assert_eq!((r.l2, r.linf, r.excluded, r.total), (0.0, 0.0, 0, 36));
        assert!(matches!(compute_errors(&field, &f, 7, None, 6), Err(Error::NotAMultiple { .. })));
    }

    #[test]
    fn unit_constant_error() {
        let f = TestFunction::lookup("one", 1).unwrap();
        let field = ModalField::zeros(f.mesh(4).unwrap(), 0).unwrap();
        let r = compute_errors(&field, &f, 8, None, 3).unwrap();
        assert!((r.l2 - 1.0).abs() < 1e-14 && (r.linf - 1.0).abs() < 1e-15);
    }

    #[test]
    fn level_zero_mask_finds_locus_elements() {
        let f = TestFunction::lookup("ic4", 2).unwrap();
        let m = pollution_mask(&f, 70, 0, 70, 1).unwrap();
        assert_eq!(m.flagged_indices(), vec![17, 52]);
        let m = pollution_mask(&f, 8, 0, 8, 1).unwrap();
        // 1/4 and 3/4 sit on element boundaries: both neighbours touch them.
        assert_eq!(m.flagged_indices(), vec![1, 2, 5, 6]);
    }

    #[test]
    fn level_one_band_width() {
        let f = TestFunction::lookup("ic4", 2).unwrap();
        let m = pollution_mask(&f, 70, 1, 140, 4).unwrap();
        let idx = m.flagged_indices();
        // Coarse element 17 is fine elements 34, 35; 4.5 h = 9 fine elements each side.
        assert_eq!(idx.iter().filter(|&&i| i < 70).copied().collect::<Vec<_>>(), (25..=44).collect::<Vec<_>>());
        assert!(pollution_mask(&f, 70, 1, 210, 4).is_err());
        let smooth = TestFunction::lookup("ic1", 2).unwrap();
        assert!(pollution_mask(&smooth, 70, 2, 280, 4).unwrap().is_empty());
    }

    #[test]
    fn level_two_band_is_flagged_on_the_first_refinement() {
        let f = TestFunction::lookup("ic4", 2).unwrap();
        let m = pollution_mask(&f, 70, 2, 280, 4).unwrap();
        // 6.75 h is 13.5 elements of the 140 mesh, so 14 whole elements each side.
        let low: Vec<usize> = m.flagged_indices().into_iter().filter(|&i| i < 140).collect();
        assert_eq!(low, (40..=99).collect::<Vec<_>>());
    }

    #[test]
    fn lifted_mask_counts() {
        let f = TestFunction::lookup("ic4", 2).unwrap();
        let m = pollution_mask(&f, 70, 0, 70, 1).unwrap().lift_to(280).unwrap();
        assert_eq!(m.flagged_indices().len(), 8);
        assert_eq!(m.excluded_count(2), 280 * 280 - 272 * 272);
    }
}
