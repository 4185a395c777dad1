mod common;

use lsiac::experiments::{compute_errors, TestFunction};
use lsiac::line_filter::FilterGeometry;
use lsiac::mra::{build_multiwavelets, decompose, enhanced_details, reconstruct, WaveletDecomposition};
use lsiac::projection::{coarsen_by_projection, refine_by_projection};
use lsiac::refine::RefineMode;
use lsiac::ModalField;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn round_trip_and_parseval(dim in 1usize..=3, degree in 0usize..=3, half_n in 1usize..=3, seed in any::<u64>()) {
        let fine = common::random_field(dim, 2 * half_n, degree, seed);
        let dec = decompose(&fine).unwrap();
        let back = reconstruct(&dec).unwrap();
        prop_assert!(back.max_coeff_diff(&fine).unwrap() < 1e-11);
        let total = fine.norm_squared();
        let split = dec.coarse().norm_squared() + dec.detail_energy();
        prop_assert!((total - split).abs() < 1e-11 * total.max(1.0), "{} vs {}", total, split);
    }

    #[test]
    fn coarse_part_is_the_projection(dim in 1usize..=3, degree in 0usize..=3, seed in any::<u64>()) {
        let fine = common::random_field(dim, 4, degree, seed);
        let dec = decompose(&fine).unwrap();
        prop_assert!(dec.coarse().max_coeff_diff(&coarsen_by_projection(&fine).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn decomposition_is_linear(dim in 1usize..=2, degree in 0usize..=2, s in -4.0f64..4.0, seed in any::<u64>()) {
        let u = common::random_field(dim, 4, degree, seed);
        let v = common::random_field(dim, 4, degree, seed.wrapping_add(1));
        let w = ModalField::new(*u.mesh(), degree, u.coeffs().iter().zip(v.coeffs()).map(|(a, b)| a + s * b).collect()).unwrap();
        let (du, dv, dw) = (decompose(&u).unwrap(), decompose(&v).unwrap(), decompose(&w).unwrap());
        for ((a, b), c) in du.details().iter().zip(dv.details()).zip(dw.details()) {
            prop_assert!((c - (a + s * b)).abs() < 1e-12);
        }
    }
}

/// A single detail coefficient survives reconstruction and decomposition.
#[test]
fn single_detail_is_recovered() {
    for dim in 1..=3 {
        for degree in 0..=2 {
            let coarse = ModalField::zeros(lsiac::UniformMesh::unit(dim, 3).unwrap(), degree).unwrap();
            let per = build_multiwavelets(degree).unwrap().detail_count(dim);
            for slot in [0, per / 2, per - 1] {
                let mut details = vec![0.0; coarse.mesh().num_elements() * per];
                let at = per + slot;
                details[at] = 3.5;
                let dec = WaveletDecomposition::new(coarse.clone(), details).unwrap();
                let again = decompose(&reconstruct(&dec).unwrap()).unwrap();
                for (i, d) in again.details().iter().enumerate() {
                    let expect = if i == at { 3.5 } else { 0.0 };
                    assert!((d - expect).abs() < 1e-12, "d={dim} p={degree} slot={slot} i={i}: {d}");
                }
                assert!(again.coarse().coeffs().iter().all(|c| c.abs() < 1e-12));
            }
        }
    }
}

/// Detail functions evaluated pointwise reproduce the fine field.
#[test]
fn detail_functions_match_the_coefficients() {
    let dim = 2;
    let degree = 1;
    let fine = common::random_field(dim, 4, degree, 77);
    let dec = decompose(&fine).unwrap();
    let basis = build_multiwavelets(degree).unwrap();
    let h = dec.coarse().mesh().h();
    let norm = (0.5 * h).powf(0.5 * dim as f64);
    for &(x, y) in &[(0.1, 0.2), (0.37, 0.81), (0.66, 0.03), (0.9, 0.55)] {
        let pt = [x, y];
        let (idx, zeta) = dec.coarse().mesh().locate(&pt);
        let lin = dec.coarse().mesh().linear_index(&idx[..dim]);
        let detail: f64 = dec
            .element_details(lin)
            .iter()
            .enumerate()
            .map(|(k, d)| d / norm * basis.eval_detail(dim, k, &zeta[..dim]))
            .sum();
        let value = dec.coarse().eval(&pt) + detail;
        assert!((value - fine.eval(&pt)).abs() < 1e-12, "{pt:?}");
    }
}

#[test]
fn refined_fields_carry_no_details() {
    for dim in 1..=3 {
        let coarse = common::random_field(dim, 3, 2, 8);
        let dec = decompose(&refine_by_projection(&coarse)).unwrap();
        assert!(dec.details().iter().all(|d| d.abs() < 1e-12));
    }
}

#[test]
fn enhanced_details_beat_plain_refinement() {
    let f = TestFunction::lookup("ic1", 2).unwrap();
    let coarse = f.project(35, 4).unwrap();
    let geom = FilterGeometry::diagonal(coarse.mesh());
    let kernel = lsiac::kernel::SiacKernel::for_degree(4, geom.scale()).unwrap();
    let enhanced = reconstruct(&enhanced_details(&coarse, &kernel, &geom, RefineMode::Stencil).unwrap()).unwrap();
    let plain = refine_by_projection(&coarse);
    let a = compute_errors(&enhanced, &f, 140, None, 6).unwrap();
    let b = compute_errors(&plain, &f, 140, None, 6).unwrap();
    assert!(a.l2 < b.l2, "{} vs {}", a.l2, b.l2);
}
