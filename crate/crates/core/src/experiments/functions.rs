//! Registry of analytic test functions on the unit cube.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::ModalField;
use crate::mesh::UniformMesh;
use crate::projection::{default_quadrature_points, project_function_split};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    Smooth,
    Kink,
    Discontinuous,
}

/// A function on `[0, 1]^d` with its non-smooth hyperplanes.
///
/// Every locus `c` stands for the hyperplanes `x_i = c` on all axes.
#[derive(Debug, Clone)]
pub struct TestFunction {
    name: String,
    dim: usize,
    eval: fn(&[f64]) -> f64,
    loci: Vec<f64>,
    smoothness: Smoothness,
}

/// `2 cos(2 pi (2x - 1))` on `[1/4, 3/4]`, `cos(4 pi (2x - 1))` elsewhere.
pub fn f1(x: f64) -> f64 {
    if (0.25..=0.75).contains(&x) {
        2.0 * (2.0 * PI * (2.0 * x - 1.0)).cos()
    } else {
        (4.0 * PI * (2.0 * x - 1.0)).cos()
    }
}

/// `(2/3) sin(2 pi (2x - 1))` on `[1/4, 3/4]`, `cos(pi (2x - 1))` elsewhere.
pub fn f2(x: f64) -> f64 {
    if (0.25..=0.75).contains(&x) {
        2.0 / 3.0 * (2.0 * PI * (2.0 * x - 1.0)).sin()
    } else {
        (PI * (2.0 * x - 1.0)).cos()
    }
}

fn zero(_: &[f64]) -> f64 {
    0.0
}

fn one(_: &[f64]) -> f64 {
    1.0
}

fn sin_sum(x: &[f64]) -> f64 {
    x.iter().map(|&v| (2.0 * PI * v).sin()).sum()
}

fn sin_diag(x: &[f64]) -> f64 {
    (2.0 * PI * x.iter().sum::<f64>()).sin()
}

fn sin_product(x: &[f64]) -> f64 {
    x.iter().map(|&v| (10.0 * PI * v).sin()).product()
}

fn f1_product(x: &[f64]) -> f64 {
    x.iter().map(|&v| f1(v)).product()
}

fn f2_product(x: &[f64]) -> f64 {
    x.iter().map(|&v| f2(v)).product()
}

/// Names accepted by [`TestFunction::lookup`].
pub const FUNCTION_NAMES: [&str; 8] = [
    "zero", "one", "sin-sum", "sin-diag", "ic1", "ic2", "ic3", "ic4",
];

impl TestFunction {
    /// Look up a function by name for dimension `dim`.
    ///
    /// `ic1`..`ic4` are two dimensional; `sin-sum` in 3D is the 3D test case.
    pub fn lookup(name: &str, dim: usize) -> Result<Self> {
        if !(1..=crate::MAX_DIM).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        let breaks = vec![0.25, 0.75];
        let (eval, loci, smoothness, fixed_dim): (fn(&[f64]) -> f64, Vec<f64>, Smoothness, Option<usize>) =
            match name {
                "zero" => (zero, vec![], Smoothness::Smooth, None),
                "one" => (one, vec![], Smoothness::Smooth, None),
                "sin-sum" | "ic3d" => (sin_sum, vec![], Smoothness::Smooth, None),
                "sin-diag" => (sin_diag, vec![], Smoothness::Smooth, None),
                "ic1" => (sin_diag, vec![], Smoothness::Smooth, Some(2)),
                "ic2" => (sin_product, vec![], Smoothness::Smooth, Some(2)),
                "ic3" => (f1_product, breaks, Smoothness::Discontinuous, Some(2)),
                "ic4" => (f2_product, breaks, Smoothness::Kink, Some(2)),
                _ => return Err(Error::UnknownFunction(name.to_string())),
            };
        if let Some(d) = fixed_dim {
            if d != dim {
                return Err(Error::InvalidArgument(format!("function `{name}` is {d}-dimensional, not {dim}")));
            }
        }
        Ok(Self {
            name: name.to_string(),
            dim,
            eval,
            loci,
            smoothness,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn loci(&self) -> &[f64] {
        &self.loci
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    /// Unit-cube mesh with `n` elements per axis.
    pub fn mesh(&self, n: usize) -> Result<UniformMesh> {
        UniformMesh::unit(self.dim, n)
    }

    /// L2 projection, split at the non-smooth loci.
    pub fn project(&self, n: usize, degree: usize) -> Result<ModalField> {
        self.project_with(n, degree, default_quadrature_points(degree))
    }

    /// As [`TestFunction::project`] with `q` Gauss points per axis.
    pub fn project_with(&self, n: usize, degree: usize, q: usize) -> Result<ModalField> {
        let f = self.eval;
        project_function_split(f, self.mesh(n)?, degree, q, &self.loci)
    }
}
