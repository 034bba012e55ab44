mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6};

use common::*;
use ips_zeta::matrix::CMatrix;
use ips_zeta::models::{ModelSpec, TensorFactors};
use ips_zeta::special::{chebyshev_t, chebyshev_u};
use ips_zeta::zeta::*;
use num_complex::Complex64;

fn model_grid() -> Vec<ModelSpec<f64>> {
    vec![
        ModelSpec::Dk { p: 0.3, q: 0.8 },
        ModelSpec::Dk { p: 0.5, q: 0.5 },
        ModelSpec::GeneralizedDk { xi: [0.2, 1.0, 2.2, 0.7] },
        ModelSpec::Qca1 { xi1: 0.6, xi2: 1.7 },
        ModelSpec::Qca2 { xi1: 0.0, xi2: FRAC_PI_6 },
        ModelSpec::Qca2 { xi1: 2.1, xi2: 0.4 },
        ModelSpec::Tensor {
            left: CMatrix::from_row_major(2, 2, vec![c(0.9, 0.1), c(0.2, -0.4), c(-0.3, 0.0), c(0.5, 0.5)]).unwrap(),
            right: CMatrix::from_row_major(2, 2, vec![c(0.8, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.1, 0.7)]).unwrap(),
        },
    ]
}

#[test]
fn series_agrees_with_spectrum_inside_the_disk() {
    const R: usize = 40;
    for spec in model_grid() {
        for n in 1..=6 {
            let g = global(spec.clone(), n);
            let rho = g.spectral_radius().unwrap().max(1e-3);
            let series = zeta_log_series(&g, R).unwrap();
            for (scale, phase) in [(0.5, 0.0), (0.3, 1.0), (0.45, 2.5), (0.1, -0.7)] {
                let u = Complex64::from_polar(scale / rho, phase);
                let truncation = 10.0 * scale.powi(R as i32 + 1);
                // floor for rounding in the eigenvalues and the Horner sum
                let bound = truncation + 1e-12;
                let err = (series.evaluate(u) - g.log_det_factor(u).unwrap()).norm();
                assert!(err <= bound, "{spec:?} N={n} u={u}: {err:e} > {bound:e}");
            }
        }
    }
}

#[test]
fn first_trace_obeys_second_order_recurrence() {
    for &xi in &[0.0, 0.3, FRAC_PI_6, 1.2, FRAC_PI_2, 3.5, 5.0] {
        let s = xi.sin();
        let x: Vec<Complex64> = (1..=10).map(|n| qca2(xi, n).trace_powers(1).unwrap().trace(1)).collect();
        for n in 0..8 {
            let res = x[n + 2] - x[n + 1] * (1.0 + s) + x[n] * (2.0 * s);
            assert!(res.norm() < 1e-8, "xi={xi} N={}: {res}", n + 1);
        }
    }
}

#[test]
fn second_trace_obeys_third_order_recurrence() {
    for &xi in &[0.0, 0.3, FRAC_PI_6, 1.2, FRAC_PI_2, 3.5, 5.0] {
        let (s, co) = xi.sin_cos();
        let k = s * co * co;
        let x: Vec<Complex64> = (1..=10).map(|n| qca2(xi, n).trace_powers(2).unwrap().trace(2)).collect();
        for n in 0..7 {
            let res = x[n + 3] - x[n + 2] * (1.0 + s * s) - x[n + 1] * (2.0 * k) + x[n] * (4.0 * k);
            assert!(res.norm() < 1e-8, "xi={xi} N={}: {res}", n + 1);
        }
    }
}

#[test]
fn second_trace_at_pi_over_six_matches_three_root_formula() {
    let s15 = 15f64.sqrt();
    let l1 = c(-1.0, 0.0);
    let l2 = c(9.0, s15) / 8.0;
    let l3 = c(9.0, -s15) / 8.0;
    let a2 = c(35.0, -11.0 * s15) * (3.0 / 95.0);
    let a3 = c(35.0, 11.0 * s15) * (3.0 / 95.0);
    for n in 1..=10u32 {
        let formula = l1.powu(n - 1) * (-4.0 / 19.0) + a2 * l2.powu(n - 1) + a3 * l3.powu(n - 1);
        let brute = qca2(FRAC_PI_6, n as usize).trace_powers(2).unwrap().trace(2);
        let rec = qca2_x2_recurrence(n as usize, FRAC_PI_6).unwrap();
        assert!((formula - brute).norm() < 1e-10, "N={n}: {formula} vs {brute}");
        assert!((formula.re - rec).abs() < 1e-10 && formula.im.abs() < 1e-12);
    }
    assert!((qca2_x2_recurrence(3, FRAC_PI_6).unwrap() - 5.0).abs() < 1e-14);
}

#[test]
fn first_trace_at_pi_over_six_in_chebyshev_form() {
    for n in 2..=9usize {
        let closed = qca2_c1_closed_form(n, FRAC_PI_6).unwrap();
        let cheb = (4.0 * chebyshev_t(n as u32 - 1, 0.75) + chebyshev_u(n as i64 - 2, 0.75)) / 2f64.powi(n as i32 + 1);
        assert!((closed.c1 - c(cheb, 0.0)).norm() < 1e-12, "N={n}");

        let s7 = 7f64.sqrt();
        let e = Complex64::from_polar(1.0, (0.75f64).acos() * (n - 1) as f64);
        let tr = c(0.0, s7 / 7.0) * (-c(1.0, s7) * e + c(1.0, -s7) * e.conj());
        assert!((closed.trace - tr).norm() < 1e-12, "N={n}");
    }
}

#[test]
fn second_coefficient_at_pi_over_six_in_chebyshev_form() {
    let s6 = 6f64.sqrt();
    let x = 3.0 * s6 / 8.0;
    for n in 1..=10usize {
        let brute = qca2(FRAC_PI_6, n).trace_powers(2).unwrap().c(2);
        let cheb = (-2.0 / 19.0) * (-2f64).powi(-(n as i32 - 1))
            + (3.0 / 19.0)
                * (s6 / 4.0).powi(n as i32 - 1)
                * (7.0 * chebyshev_t(n as u32 - 1, x) + 11.0 * s6 / 8.0 * chebyshev_u(n as i64 - 2, x));
        assert!((brute - c(cheb, 0.0)).norm() < 1e-12, "N={n}: {brute} vs {cheb}");
    }
}

#[test]
fn odd_powers_of_rule90_have_trace_two() {
    for n in 1..=8 {
        let tr = rule90(n).trace_powers(11).unwrap();
        for s in 1..=6 {
            assert_eq!(tr.trace(2 * s - 1), c(2.0, 0.0), "N={n} r={}", 2 * s - 1);
        }
    }
}

#[test]
fn second_trace_special_values() {
    for n in 2..=10 {
        assert_eq!(rule90(n).trace_powers(2).unwrap().trace(2), c(4.0, 0.0));
        let x = qca2(FRAC_PI_2, n).trace_powers(2).unwrap().trace(2);
        assert!((x - c(2f64.powi(n as i32), 0.0)).norm() < 1e-9);
    }
    assert_eq!(qca2_x2_recurrence(5, 0.0).unwrap(), 4.0);
    assert!((qca2_x2_recurrence(6, FRAC_PI_2).unwrap() - 64.0).abs() < 1e-12);
}

#[test]
fn period_is_exact() {
    for n in 1..=10 {
        assert!(qca2(FRAC_PI_2, n).matrix_power_equals_identity(2, 1e-10), "N={n}");
    }
    assert!(rule90(2).matrix_power_equals_identity(2, 1e-10));
    assert!(!rule90(2).matrix_power_equals_identity(1, 1e-10));
    for n in [3, 4] {
        assert!(rule90(n).matrix_power_equals_identity(4, 1e-10));
        assert!(!rule90(n).matrix_power_equals_identity(2, 1e-10));
    }
}

#[test]
fn pca_traces_are_real() {
    for spec in [ModelSpec::Dk { p: 0.2, q: 0.65 }, ModelSpec::GeneralizedDk { xi: [1.0, 0.1, 2.0, 0.3] }] {
        for n in 1..=7 {
            let tr = global(spec.clone(), n).trace_powers(15).unwrap();
            for r in 1..=15 {
                assert!(tr.c(r).im.abs() < 1e-12);
            }
        }
    }
}

#[test]
fn tensor_formula_examples() {
    let id = CMatrix::<f64>::identity(2);
    let f = TensorFactors::new(id.clone(), id.clone()).unwrap();
    for n in 2..=6 {
        for r in 1..=5 {
            assert!((tensor_model_cr(&f, n, r).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        }
    }
    let xi = 0.7;
    let rot = ips_zeta::models::rotation(xi);
    let f = TensorFactors::new(rot, id).unwrap();
    for n in 2..=6 {
        for r in 1..=8u32 {
            let expected = (r as f64 * xi).cos().powi(n as i32 - 1);
            assert!((tensor_model_cr(&f, n, r).unwrap() - c(expected, 0.0)).norm() < 1e-13);
        }
    }
    assert!(tensor_model_cr(&f, 1, 1).is_err());
}

#[test]
fn binomial_zeta_examples() {
    let u = c(0.35, -0.2);
    let log1mu = (c(1.0, 0.0) - u).ln();
    assert!((binomial_zeta_qca1(1, 1.3, u).unwrap() - log1mu).norm() < 1e-15);
    for n in 1..=9 {
        assert!((binomial_zeta_qca1(n, 0.0, u).unwrap() - log1mu).norm() < 1e-14);
    }
    let g = global(ModelSpec::Qca1 { xi1: 0.9, xi2: 0.9 }, 4);
    let spectral = g.log_det_factor(c(0.2, 0.0)).unwrap();
    assert!((binomial_zeta_qca1(4, 0.9, c(0.2, 0.0)).unwrap() - spectral).norm() < 1e-12);
    let g = global(ModelSpec::Qca1 { xi1: 0.5, xi2: 0.5 }, 3);
    let spectral = g.log_det_factor(c(0.3, 0.0)).unwrap();
    assert!((binomial_zeta_qca1(3, 0.5, c(0.3, 0.0)).unwrap() - spectral).norm() < 1e-12);
}

#[test]
fn chebyshev_coefficients_of_the_rotation_model() {
    let g = global(ModelSpec::Qca1 { xi1: FRAC_PI_3, xi2: FRAC_PI_3 }, 4);
    let s = zeta_log_series(&g, 12).unwrap();
    for r in 1..=12 {
        let expected = -chebyshev_t(r as u32, FRAC_PI_3.cos()).powi(3) / r as f64;
        assert!((s.coefficient(r) - c(expected, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn gaussian_limit_examples() {
    let u = c(0.4, 0.25);
    let log1mu = (c(1.0, 0.0) - u).ln();
    assert!((clt_limit_zeta(0.0, u, 64).unwrap() - log1mu).norm() < 1e-13);
    assert!(clt_limit_zeta(1.1, c(0.0, 0.0), 64).unwrap().norm() < 1e-15);
    let limit = clt_limit_zeta(0.8, c(0.3, 0.0), 64).unwrap();
    let finite = binomial_zeta_qca1(256, 0.8 / 16.0, c(0.3, 0.0)).unwrap();
    assert!((limit - finite).norm() < 1e-3);
    assert!(clt_limit_zeta(0.8, c(1.0, 0.0), 64).is_err());
    assert!(clt_limit_zeta(0.8, c(0.3, 0.0), 4).is_err());
}

#[test]
fn qca2_zeta_examples() {
    let u = c(0.4, 0.0);
    let series = zeta_log_series(&qca2(FRAC_PI_2, 3), 60).unwrap();
    let closed = zeta_closed_form_qca2(3, Qca2Variant::PiHalf, u).unwrap();
    assert!((series.evaluate(u) - closed).norm() < 1e-10);

    let log1mu = (c(1.0, 0.0) - u).ln();
    assert!((zeta_closed_form_qca2(1, Qca2Variant::Rule90, u).unwrap() - log1mu).norm() < 1e-15);
    assert!(zeta_closed_form_qca2(5, Qca2Variant::Rule90, u).is_err());
    assert!(matches!(
        zeta_closed_form_qca2(3, Qca2Variant::PiHalf, c(1.0, 0.0)),
        Err(ips_zeta::Error::SingularAtU { .. })
    ));

    // the pi/2 coefficient 2^{-(N-1)/2} T_{N-1}(√2/2) dies out, leaving the average of the two logs
    let limit = pi_half_zeta_limit(u);
    let far = zeta_closed_form_qca2(41, Qca2Variant::PiHalf, u).unwrap();
    assert!((far - limit).norm() < 1e-6);
}

#[test]
fn rule90_trace_law_examples() {
    assert_eq!(rule90_trace_general_r::<f64>(4, 1, 3).unwrap(), 4.0);
    assert_eq!(rule90_trace_general_r::<f64>(4, 2, 1).unwrap(), 16.0);
    assert_eq!(rule90_trace_general_r::<f64>(2, 0, 7).unwrap(), 2.0);
    assert!(rule90_trace_general_r::<f64>(5, 0, 1).is_err());
    let tr = rule90(4).trace_powers(13).unwrap();
    assert_eq!(tr.trace(10), c(4.0, 0.0));
    assert_eq!(tr.trace(4), c(16.0, 0.0));
}

#[test]
fn conjecture_check_examples() {
    let r5 = conjecture_test_rule90(5, 64, &[c(0.3, 0.0)]).unwrap();
    assert_eq!(r5.label, "conjecture");
    assert!(r5.max_abs_error.is_finite());
    let r8 = conjecture_test_rule90(8, 64, &[c(0.0, 0.5)]).unwrap();
    assert!(!r8.witness.is_null());
    assert!(matches!(conjecture_test_rule90(4, 64, &[c(0.3, 0.0)]), Err(ips_zeta::Error::DomainError(_))));
}

#[test]
fn report_serializes_with_the_documented_fields() {
    let r = conjecture_test_rule90(5, 32, &[c(0.2, 0.0)]).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    for key in ["formula_id", "grid", "max_abs_error", "passed", "witness"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(r.passed, r.max_abs_error <= r.tolerance);
}
