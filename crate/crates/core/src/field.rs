//! Modal piecewise-polynomial fields.

use crate::basis::{contract, legendre_orthonormal_all, mode_count};
use crate::error::{Error, Result};
use crate::mesh::UniformMesh;
use crate::{MAX_DEGREE, MAX_DIM};

/// Per-element coefficients of the tensor Legendre basis of degree `p` per variable.
///
/// On element `e` the field is `sum_alpha coeffs[e, alpha] phi_alpha(zeta)` with
/// `zeta` the reference coordinates of the point. Coefficients are stored
/// element-major, modes in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalField {
    mesh: UniformMesh,
    degree: usize,
    coeffs: Vec<f64>,
}

impl ModalField {
    pub fn new(mesh: UniformMesh, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::UnsupportedDegree(degree));
        }
        let expected = mesh.num_elements() * mode_count(mesh.dim(), degree);
        if coeffs.len() != expected {
            return Err(Error::LayoutMismatch(format!(
                "expected {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(format!("coefficient {i} is {}", coeffs[i])));
        }
        Ok(Self { mesh, degree, coeffs })
    }

    pub fn zeros(mesh: UniformMesh, degree: usize) -> Result<Self> {
        let len = mesh.num_elements() * mode_count(mesh.dim(), degree);
        Self::new(mesh, degree, vec![0.0; len])
    }

    pub fn mesh(&self) -> &UniformMesh {
        &self.mesh
    }

    pub fn dim(&self) -> usize {
        self.mesh.dim()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modes_per_element(&self) -> usize {
        mode_count(self.dim(), self.degree)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    #[inline]
    pub fn element(&self, lin: usize) -> &[f64] {
        let m = self.modes_per_element();
        &self.coeffs[lin * m..(lin + 1) * m]
    }

    /// Value at reference coordinates `zeta` of element `idx` (no wrap).
    pub fn eval_local(&self, idx: &[usize], zeta: &[f64]) -> f64 {
        let np = self.degree + 1;
        let mut buf = [[0.0; MAX_DEGREE + 1]; MAX_DIM];
        for axis in 0..self.dim() {
            legendre_orthonormal_all(zeta[axis], &mut buf[axis][..np]);
        }
        let phis: [&[f64]; MAX_DIM] = [&buf[0][..np], &buf[1][..np], &buf[2][..np]];
        contract(self.dim(), self.element(self.mesh.linear_index(idx)), &phis)
    }

    /// Value at the physical point `x`, wrapped periodically into the domain.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let (idx, zeta) = self.mesh.locate(x);
        self.eval_local(&idx, &zeta)
    }

    /// Squared physical L2 norm, `(h/2)^d * sum coeffs^2`.
    pub fn norm_squared(&self) -> f64 {
        let jac = (0.5 * self.mesh.h()).powi(self.dim() as i32);
        jac * self.coeffs.iter().map(|c| c * c).sum::<f64>()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            mesh: self.mesh,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Largest absolute coefficient difference against a field with the same layout.
    pub fn max_coeff_diff(&self, other: &ModalField) -> Result<f64> {
        self.check_same_layout(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub(crate) fn check_same_layout(&self, other: &ModalField) -> Result<()> {
        if self.mesh != other.mesh || self.degree != other.degree {
            return Err(Error::LayoutMismatch(format!(
                "mesh {:?}/p={} vs {:?}/p={}",
                self.mesh, self.degree, other.mesh, other.degree
            )));
        }
        Ok(())
    }
}
