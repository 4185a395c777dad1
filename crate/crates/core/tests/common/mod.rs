#![allow(dead_code)]

use lsiac::kernel::SiacKernel;
use lsiac::quadrature::gauss_legendre_rule;
use lsiac::{ModalField, UniformMesh};
use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Field with uniformly random coefficients in [-1, 1].
pub fn random_field(dim: usize, n: usize, degree: usize, seed: u64) -> ModalField {
    let mesh = UniformMesh::unit(dim, n).unwrap();
    let len = mesh.num_elements() * (degree + 1).pow(dim as u32);
    let mut rng = StdRng::seed_from_u64(seed);
    let coeffs = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
    ModalField::new(mesh, degree, coeffs).unwrap()
}

/// Coefficients of the `l = 1` kernel from its moment conditions, solved in
/// floating point.
pub fn box_kernel_coefficients(r: usize) -> Vec<f64> {
    let n = r + 1;
    let half = (r / 2) as f64;
    let a = DMatrix::from_fn(n, n, |m, j| {
        let g = j as f64 - half;
        let e = m as i32 + 1;
        ((g + 0.5).powi(e) - (g - 0.5).powi(e)) / e as f64
    });
    let mut b = DVector::zeros(n);
    b[0] = 1.0;
    a.lu().solve(&b).unwrap().iter().copied().collect()
}

/// `K_H(t)` for the `l = 1` kernel, from the box function directly.
pub fn box_kernel(coeffs: &[f64], scale: f64, t: f64) -> f64 {
    let tau = t / scale;
    let half = (coeffs.len() / 2) as f64;
    coeffs
        .iter()
        .enumerate()
        .filter(|(j, _)| {
            let s = tau - (*j as f64 - half);
            (-0.5..0.5).contains(&s)
        })
        .map(|(_, c)| c)
        .sum::<f64>()
        / scale
}

/// Brute-force line convolution: every element crossing and kernel knot on
/// the support is found by scanning, then each piece gets a 16-point rule
/// applied to the pointwise field evaluator.
pub fn oracle_filter(field: &ModalField, r: usize, x: &[f64]) -> f64 {
    let dim = field.dim();
    let h = field.mesh().h();
    let scale = (dim as f64).sqrt() * h;
    let v = 1.0 / (dim as f64).sqrt();
    let coeffs = box_kernel_coefficients(r);
    let reach = 0.5 * (r + 1) as f64 * scale;

    let mut breaks = vec![-reach, reach];
    let half = (r / 2) as f64;
    for j in 0..=r + 1 {
        breaks.push((j as f64 - half - 0.5) * scale);
    }
    for &xa in x {
        let lo = ((xa - reach * v) / h).floor() as i64 - 1;
        let hi = ((xa + reach * v) / h).ceil() as i64 + 1;
        for k in lo..=hi {
            breaks.push((k as f64 * h - xa) / v);
        }
    }
    breaks.retain(|t| t.abs() <= reach);
    breaks.sort_by(f64::total_cmp);

    let rule = gauss_legendre_rule(16).unwrap();
    let mut sum = 0.0;
    for pair in breaks.windows(2) {
        if pair[1] - pair[0] < 1e-14 {
            continue;
        }
        for (t, w) in rule.mapped(pair[0], pair[1]) {
            let y: Vec<f64> = x.iter().map(|xa| xa + t * v).collect();
            sum += w * box_kernel(&coeffs, scale, t) * field.eval(&y);
        }
    }
    sum
}

/// Canonical kernel for a field.
pub fn canonical_kernel(field: &ModalField) -> SiacKernel {
    let scale = (field.dim() as f64).sqrt() * field.mesh().h();
    SiacKernel::for_degree(field.degree(), scale).unwrap()
}

/// Field shifted by `by` elements along `axis`: element `i` takes the data of `i - by`.
pub fn shift_field(field: &ModalField, axis: usize, by: i64) -> ModalField {
    let mesh = *field.mesh();
    let nm = field.modes_per_element();
    let mut coeffs = vec![0.0; field.coeffs().len()];
    for lin in 0..mesh.num_elements() {
        let mut idx = mesh.multi_index(lin);
        idx[axis] = mesh.wrap(idx[axis] as i64 - by);
        let src = mesh.linear_index(&idx[..field.dim()]);
        coeffs[lin * nm..(lin + 1) * nm].copy_from_slice(field.element(src));
    }
    ModalField::new(mesh, field.degree(), coeffs).unwrap()
}

/// Least-squares residual of a total-degree polynomial fit to `(points, values)`.
pub fn polynomial_fit_residual(points: &[Vec<f64>], values: &[f64], total_degree: usize) -> f64 {
    let dim = points[0].len();
    let mut exps: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..dim {
        exps = exps
            .into_iter()
            .flat_map(|e| (0..=total_degree).map(move |k| {
                let mut e = e.clone();
                e.push(k);
                e
            }))
            .filter(|e| e.iter().sum::<usize>() <= total_degree)
            .collect();
    }
    let a = DMatrix::from_fn(points.len(), exps.len(), |i, j| {
        exps[j].iter().zip(&points[i]).map(|(&k, &x)| x.powi(k as i32)).product()
    });
    let b = DVector::from_column_slice(values);
    let svd = a.clone().svd(true, true);
    let sol = svd.solve(&b, 1e-14).unwrap();
    (a * sol - b).amax()
}
