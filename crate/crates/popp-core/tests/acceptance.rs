//! Acceptance suite: every criterion pinned with its tolerance, one
//! pass/fail line per criterion (run with `--nocapture` to see them).

mod common;

use common::{arb_field, arb_poly};
use proptest::strategy::Strategy;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use popp_core::{
    adapted_constants, apply_sublaplacian, builtin, check_volume_preserving, contact_invariant,
    frame_divergence, gram_matrices, is_isometry, oracle_gram_deviation, popp_density_adapted,
    popp_density_coordinates, structure_constants, symmetry_check, AdaptedFrame, Poly,
    SrStructure, VectorField, DEFAULT_FD_STEP, DEFAULT_RANK_TOL,
};

fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x506f_7070_5661_6c00 ^ salt)
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

fn coordinate_density(s: &SrStructure, completion: Option<&[VectorField]>, q: &[f64]) -> f64 {
    let frame = match completion {
        Some(c) => AdaptedFrame::with_completion(s, q, c, DEFAULT_RANK_TOL).unwrap(),
        None => AdaptedFrame::build(s, q, DEFAULT_RANK_TOL).unwrap(),
    };
    let constants = adapted_constants(&frame, q).unwrap();
    let grams = gram_matrices(&constants, DEFAULT_RANK_TOL).unwrap();
    popp_density_coordinates(&frame, &grams, q).unwrap()
}

fn dz(n: usize) -> VectorField {
    VectorField::coordinate(n, n - 1).unwrap()
}

#[test]
fn criterion_01_carnot_k3_coordinate_density_is_one() {
    let s = builtin::structure("carnot-k3").unwrap();
    let mut r = rng(1);
    for _ in 0..20 {
        let q = random_point(&mut r, 6, -1.0, 1.0);
        let density = coordinate_density(&s, None, &q);
        let err = (density - 1.0).abs();
        assert!(
            err < 1e-10,
            "criterion 1: density {density} at {q:?} (error {err:.3e})"
        );
    }
    println!("criterion  1 PASS - carnot-k3 coordinate Popp density = 1 (rel err < 1e-10, 20 points)");
}

#[test]
fn criterion_02_martinet_density_c_over_abs_y() {
    let s = builtin::structure("martinet").unwrap();
    let c = 1.0 / (2.0 * std::f64::consts::SQRT_2);
    let mut r = rng(2);
    let mut scaled = Vec::new();
    for _ in 0..20 {
        let sign = if r.random_bool(0.5) { 1.0 } else { -1.0 };
        let y = sign * r.random_range(0.1..2.0);
        let q = vec![r.random_range(-2.0..2.0), y, r.random_range(-2.0..2.0)];
        let density = coordinate_density(&s, None, &q);
        let expected = c / y.abs();
        let rel = (density - expected).abs() / expected;
        assert!(
            rel < 1e-9,
            "criterion 2: density {density} vs {expected} at y = {y} (rel {rel:.3e})"
        );
        scaled.push(density * y.abs());
    }
    // Proportionality to 1/|y|: density * |y| is the same constant at
    // every sample point.
    let first = scaled[0];
    for v in &scaled {
        assert!(
            (v - first).abs() / first < 1e-9,
            "criterion 2: density*|y| drifts: {v} vs {first}"
        );
    }
    assert!((first - c).abs() / c < 1e-9);
    println!("criterion  2 PASS - martinet coordinate density = (1/(2*sqrt2))/|y| (rel err < 1e-9, 20 points)");
}

#[test]
fn criterion_03_oracle_gram_duality_all_builtins() {
    let mut r = rng(3);
    for name in builtin::NAMES {
        let s = builtin::structure(name).unwrap();
        let n = s.nvars();
        for _ in 0..20 {
            let mut q = random_point(&mut r, n, -1.0, 1.0);
            if *name == "martinet" {
                // Keep clear of the singular plane.
                let sign = if q[1] >= 0.0 { 1.0 } else { -1.0 };
                q[1] = sign * (0.1 + q[1].abs());
            }
            let frame = AdaptedFrame::build(&s, &q, DEFAULT_RANK_TOL).unwrap();
            let deviation = oracle_gram_deviation(&frame, &q).unwrap();
            assert!(
                deviation < 1e-9,
                "criterion 3: {name} at {q:?}: oracle deviation {deviation:.3e}"
            );
        }
    }
    println!("criterion  3 PASS - min-norm oracle Gram = B_j^-1 entrywise (rel err < 1e-9, 4 builtins x 20 points)");
}

#[test]
fn criterion_04_frame_independence_of_coordinate_density() {
    let mut r = rng(4);
    // Heisenberg: complete with dz versus dz + X1.
    let heis = builtin::structure("heisenberg").unwrap();
    let shifted = dz(3).add(&heis.horizontal_fields()[0]).unwrap();
    for _ in 0..10 {
        let q = random_point(&mut r, 3, -2.0, 2.0);
        let d1 = coordinate_density(&heis, Some(&[dz(3)]), &q);
        let d2 = coordinate_density(&heis, Some(&[shifted.clone()]), &q);
        assert!(
            (d1 - d2).abs() / d1 < 1e-10,
            "criterion 4: heisenberg completions disagree: {d1} vs {d2}"
        );
    }
    // Martinet: greedy bracket frame versus the dz completion.
    let mart = builtin::structure("martinet").unwrap();
    for _ in 0..10 {
        let mut q = random_point(&mut r, 3, -2.0, 2.0);
        let sign = if q[1] >= 0.0 { 1.0 } else { -1.0 };
        q[1] = sign * (0.1 + q[1].abs());
        let d1 = coordinate_density(&mart, None, &q);
        let d2 = coordinate_density(&mart, Some(&[dz(3)]), &q);
        assert!(
            (d1 - d2).abs() / d1 < 1e-10,
            "criterion 4: martinet completions disagree: {d1} vs {d2}"
        );
    }
    println!("criterion  4 PASS - coordinate density independent of adapted completion (rel err < 1e-10)");
}

#[test]
fn criterion_05_carnot_sum_of_squares() {
    let mut r = rng(5);
    for name in ["heisenberg", "engel", "carnot-k3"] {
        let s = builtin::structure(name).unwrap();
        let n = s.nvars();
        for _ in 0..20 {
            let q = random_point(&mut r, n, -1.0, 1.0);
            let frame = AdaptedFrame::build(&s, &q, DEFAULT_RANK_TOL).unwrap();
            let data =
                popp_core::sublaplacian_coeffs(&frame, &q, DEFAULT_FD_STEP).unwrap();
            for (i, a) in data.first_order.iter().enumerate() {
                assert!(
                    a.abs() < 1e-8,
                    "criterion 5: {name} at {q:?}: a_{i} = {a:.3e}"
                );
            }
        }
    }
    println!("criterion  5 PASS - first-order coefficients vanish on group examples (< 1e-8, 3 builtins x 20 points)");
}

#[test]
fn criterion_06_martinet_divergence_closed_form() {
    let s = builtin::structure("martinet").unwrap();
    for y in [0.25, 0.5, 1.0, 2.0] {
        let q = [0.0, y, 0.0];
        let frame =
            AdaptedFrame::with_completion(&s, &q, &[dz(3)], DEFAULT_RANK_TOL).unwrap();
        let (div_y, warning) = frame_divergence(&frame, &q, 1, DEFAULT_FD_STEP).unwrap();
        let expected = -1.0 / y;
        let rel = (div_y - expected).abs() / expected.abs();
        assert!(
            rel < 1e-6,
            "criterion 6: div Y = {div_y} vs {expected} at y = {y} (rel {rel:.3e})"
        );
        assert!(warning.is_none(), "criterion 6: unexpected warning {warning:?}");
    }
    println!("criterion  6 PASS - martinet div Y = -1/y (rel err < 1e-6 at y in {{0.25, 0.5, 1, 2}})");
}

#[test]
fn criterion_07_contact_identity() {
    let mut r = rng(7);
    let heis = builtin::structure("heisenberg").unwrap();
    let mart = builtin::structure("martinet").unwrap();
    for _ in 0..10 {
        let q = random_point(&mut r, 3, -2.0, 2.0);
        let j2 = contact_invariant(&heis, &dz(3), &q, DEFAULT_RANK_TOL).unwrap();
        let frame =
            AdaptedFrame::with_completion(&heis, &q, &[dz(3)], DEFAULT_RANK_TOL).unwrap();
        let grams =
            gram_matrices(&adapted_constants(&frame, &q).unwrap(), DEFAULT_RANK_TOL).unwrap();
        let f = popp_density_adapted(&grams);
        let rel = (j2 - 1.0 / (f * f)).abs() / j2;
        assert!(rel < 1e-10, "criterion 7: heisenberg at {q:?} (rel {rel:.3e})");
    }
    for _ in 0..10 {
        let mut q = random_point(&mut r, 3, -2.0, 2.0);
        let sign = if q[1] >= 0.0 { 1.0 } else { -1.0 };
        q[1] = sign * (0.1 + q[1].abs());
        let j2 = contact_invariant(&mart, &dz(3), &q, DEFAULT_RANK_TOL).unwrap();
        let frame =
            AdaptedFrame::with_completion(&mart, &q, &[dz(3)], DEFAULT_RANK_TOL).unwrap();
        let grams =
            gram_matrices(&adapted_constants(&frame, &q).unwrap(), DEFAULT_RANK_TOL).unwrap();
        let f = popp_density_adapted(&grams);
        let rel = (j2 - 1.0 / (f * f)).abs() / j2;
        assert!(rel < 1e-10, "criterion 7: martinet at {q:?} (rel {rel:.3e})");
    }
    println!("criterion  7 PASS - contact invariant = 1/(adapted density)^2 (rel err < 1e-10)");
}

#[test]
fn criterion_08_isometry_invariance_and_dilation_counterexample() {
    let s = builtin::structure("heisenberg").unwrap();
    let mut r = rng(8);
    let sample: Vec<Vec<f64>> = (0..20).map(|_| random_point(&mut r, 3, -1.0, 1.0)).collect();
    for _ in 0..3 {
        let (a, b, c) = (
            r.random_range(-2.0..2.0),
            r.random_range(-2.0..2.0),
            r.random_range(-2.0..2.0),
        );
        let m = builtin::heisenberg_translation("translation", a, b, c).unwrap();
        let iso = is_isometry(&m, &s, &sample, 1e-8).unwrap();
        assert!(
            iso.pass,
            "criterion 8: translation ({a}, {b}, {c}) not an isometry: \
             span {0:.3e}, gram {1:.3e}",
            iso.max_span_residual, iso.max_gram_deviation
        );
        let vol = check_volume_preserving(&m, &s, &sample, 1e-8).unwrap();
        assert!(
            vol.pass,
            "criterion 8: translation not volume preserving: {:.3e}",
            vol.max_rel_error
        );
    }

    let dilation = builtin::heisenberg_dilation().unwrap();
    let iso = is_isometry(&dilation, &s, &sample, 1e-8).unwrap();
    assert!(!iso.pass, "criterion 8: dilation must fail the metric check");
    for check in &iso.checks {
        assert!(check.distribution_preserved);
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 4.0 } else { 0.0 };
                assert!(
                    (check.gram[i][j] - expected).abs() < 1e-8,
                    "criterion 8: dilation Gram {:?} != 4*Id",
                    check.gram
                );
            }
        }
    }
    let vol = check_volume_preserving(&dilation, &s, &sample, 1e-8).unwrap();
    assert!(!vol.pass, "criterion 8: dilation must fail volume preservation");
    for check in &vol.checks {
        let factor = check.pulled_back / check.density;
        assert!(
            (factor - 16.0).abs() < 1e-8 * 16.0,
            "criterion 8: dilation volume factor {factor}"
        );
    }
    println!("criterion  8 PASS - translations are volume-preserving isometries (1e-8); dilation fails with Gram 4*Id and volume factor 16");
}

#[test]
fn criterion_09_integration_by_parts_quadrature() {
    let s = builtin::structure("heisenberg").unwrap();
    let q = [0.0, 0.0, 0.0];
    let frame = AdaptedFrame::build(&s, &q, DEFAULT_RANK_TOL).unwrap();
    // Vanishes to second order on the boundary of the box.
    let f = popp_core::parse_poly(
        "((1 - x^2)*(1 - y^2)*(1 - z^2))^2",
        3,
        None,
    )
    .unwrap();
    let region = [(-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)];

    let (lhs41, rhs41) = symmetry_check(&frame, &f, &f, &region, &[41, 41, 41]).unwrap();
    let err41 = (lhs41 - rhs41).abs() / rhs41.abs();
    assert!(
        err41 < 0.01,
        "criterion 9: 41^3 grid disagreement {err41:.4} (lhs {lhs41}, rhs {rhs41})"
    );

    let (lhs81, rhs81) = symmetry_check(&frame, &f, &f, &region, &[81, 81, 81]).unwrap();
    let err81 = (lhs81 - rhs81).abs() / rhs81.abs();
    assert!(
        err81 < 0.0025,
        "criterion 9: 81^3 grid disagreement {err81:.5} (lhs {lhs81}, rhs {rhs81})"
    );
    assert!(
        err81 < err41,
        "criterion 9: no convergence: 41^3 err {err41:.5}, 81^3 err {err81:.5}"
    );
    println!(
        "criterion  9 PASS - integration by parts: rel diff {err41:.4} on 41^3 (< 1%), {err81:.5} on 81^3 (< 0.25%)"
    );
}

#[test]
fn criterion_10_exact_property_suites_and_bc_consistency() {
    let config = Config {
        cases: 200,
        failure_persistence: None,
        ..Config::default()
    };
    let seed = [7u8; 32];

    // Antisymmetry.
    let mut runner = TestRunner::new_with_rng(
        config.clone(),
        TestRng::from_seed(RngAlgorithm::ChaCha, &seed),
    );
    runner
        .run(
            &(2usize..=5).prop_flat_map(|n| (arb_field(n), arb_field(n))),
            |(x, y)| {
                assert!(x
                    .bracket(&y)
                    .unwrap()
                    .add(&y.bracket(&x).unwrap())
                    .unwrap()
                    .is_zero());
                Ok(())
            },
        )
        .expect("criterion 10: antisymmetry violated");

    // Jacobi.
    let mut runner = TestRunner::new_with_rng(
        config.clone(),
        TestRng::from_seed(RngAlgorithm::ChaCha, &seed),
    );
    runner
        .run(
            &(2usize..=4).prop_flat_map(|n| (arb_field(n), arb_field(n), arb_field(n))),
            |(x, y, z)| {
                let a = x.bracket(&y.bracket(&z).unwrap()).unwrap();
                let b = y.bracket(&z.bracket(&x).unwrap()).unwrap();
                let c = z.bracket(&x.bracket(&y).unwrap()).unwrap();
                assert!(a.add(&b).unwrap().add(&c).unwrap().is_zero());
                Ok(())
            },
        )
        .expect("criterion 10: Jacobi identity violated");

    // Derivation property.
    let mut runner = TestRunner::new_with_rng(
        config,
        TestRng::from_seed(RngAlgorithm::ChaCha, &seed),
    );
    runner
        .run(
            &(2usize..=4).prop_flat_map(|n| (arb_field(n), arb_field(n), arb_poly(n, 3))),
            |(x, y, f)| {
                let lhs = x.bracket(&y.mul_poly(&f).unwrap()).unwrap();
                let rhs = y
                    .mul_poly(&x.apply(&f).unwrap())
                    .unwrap()
                    .add(&x.bracket(&y).unwrap().mul_poly(&f).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);
                Ok(())
            },
        )
        .expect("criterion 10: derivation property violated");

    // Level-2 adapted constants agree with the full structure constants
    // where both are defined.
    let mut r = rng(10);
    for name in builtin::NAMES {
        let s = builtin::structure(name).unwrap();
        let n = s.nvars();
        let k = s.rank();
        for _ in 0..3 {
            let mut q = random_point(&mut r, n, -1.0, 1.0);
            if *name == "martinet" {
                let sign = if q[1] >= 0.0 { 1.0 } else { -1.0 };
                q[1] = sign * (0.2 + q[1].abs());
            }
            let frame = AdaptedFrame::build(&s, &q, DEFAULT_RANK_TOL).unwrap();
            let constants = adapted_constants(&frame, &q).unwrap();
            let c = structure_constants(&frame, &q).unwrap();
            let level2 = constants.level(2);
            let range = frame.level_range(2);
            for i in 0..k {
                for j in 0..k {
                    for (local, l) in range.clone().enumerate() {
                        let b = level2.b[local][i * k + j];
                        let cc = c[i][j][l];
                        assert!(
                            (b - cc).abs() <= 1e-10 * (1.0 + cc.abs()),
                            "criterion 10: {name}: b^{l}_{i}{j} = {b} but c^{l}_{i}{j} = {cc}"
                        );
                    }
                }
            }
        }
    }
    println!("criterion 10 PASS - exact bracket identities (200 cases each) and b = c consistency on all builtins");
}

/// Supplement to criterion 5 mirrors: the sub-Laplacian applied to
/// polynomials matches hand values on the group examples.
#[test]
fn sublaplacian_spot_values() {
    let s = builtin::structure("heisenberg").unwrap();
    let f = popp_core::parse_poly("x^2 + y^2", 3, None).unwrap();
    let mut r = rng(11);
    for _ in 0..5 {
        let q = random_point(&mut r, 3, -1.0, 1.0);
        let frame = AdaptedFrame::build(&s, &q, DEFAULT_RANK_TOL).unwrap();
        let v = apply_sublaplacian(&frame, &f, &q, DEFAULT_FD_STEP).unwrap();
        assert!((v - 4.0).abs() < 1e-8, "Delta(x^2+y^2) = {v} at {q:?}");
    }
}
