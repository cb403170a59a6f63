use proptest::prelude::*;

use swanson_core::closedform::{gegenbauer, solitonic_delta, SolitonicClosedForm};
use swanson_core::discrete::{self, BandMatrix, Grid};
use swanson_core::model;
use swanson_core::profiles::{self, ExprJet};
use swanson_core::spectra::{self, QrOptions, SymmetricTridiagonal};
use swanson_core::{ModelParams, Profile};

fn params() -> impl Strategy<Value = ModelParams> {
    (0.0..0.6f64, 0.0..0.6f64, 0.2..2.0f64).prop_map(|(a, b, extra)| ModelParams::new(a + b + extra, a, b).unwrap())
}

fn profile() -> impl Strategy<Value = Profile> {
    prop_oneof![
        Just(profiles::make_harmonic()),
        (0.3..1.5f64, 0.6..3.0f64).prop_map(|(q, k)| profiles::make_solitonic(q, k).unwrap()),
        (0.5..1.5f64, -0.5..0.5f64).prop_map(|(p, mu)| profiles::make_morse(p, mu).unwrap()),
        (0.1..0.9f64).prop_map(|c| profiles::make_custom(&format!("1 + {c}*tanh(x)^2"), "x - 0.2*tanh(x)").unwrap()),
    ]
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn swapping_alpha_beta_inverts_the_map(p in profile(), m in params(), t in 0.0..1.0f64) {
        let (lo, hi) = p.oracle_domain();
        let x = lo + (hi - lo) * t;
        let swapped = m.swapped();
        let product = model::rho_tilde(&p, &m, x).unwrap() * model::rho_tilde(&p, &swapped, x).unwrap();
        prop_assert!(close(product, 1.0, 1e-12));
        prop_assert_eq!(model::v_eff(&p, &m, x), model::v_eff(&p, &swapped, x));
        let z = model::zeta(&p, &m, x).unwrap();
        prop_assert!(close(z, model::zeta_plus(&p, &m, x).unwrap(), 1e-12));
        prop_assert!(z > 0.0);
    }

    #[test]
    fn gauge_route_matches_closed_form(p in profile(), m in params(), t in 0.0..1.0f64) {
        let (lo, hi) = p.oracle_domain();
        let x = lo + (hi - lo) * t;
        prop_assert!(close(model::v_eff_gauge(&p, &m, x), model::v_eff(&p, &m, x), 1e-9));
    }

    #[test]
    fn equal_couplings_give_identity_metric(p in profile(), a in 0.0..0.5f64, t in 0.0..1.0f64) {
        let m = ModelParams::new(1.0 + 2.0 * a, a, a).unwrap();
        let (lo, hi) = p.oracle_domain();
        let x = lo + (hi - lo) * t;
        prop_assert_eq!(model::rho_tilde(&p, &m, x).unwrap(), 1.0);
        prop_assert_eq!(model::gauge_weight(&p, &m, x).unwrap(), 1.0);
    }

    #[test]
    fn hermitian_equivalent_is_symmetric(p in profile(), m in params()) {
        let (lo, hi) = p.oracle_domain();
        let grid = Grid::new(lo, hi, 64).unwrap();
        let small = discrete::build_h_tilde(&p, &m, &grid).unwrap();
        prop_assert!(small.matrix.is_symmetric());
        let big = discrete::build_non_hermitian(&p, &m, &grid).unwrap();
        prop_assert_eq!(big.matrix.bandwidths(), (1, 1));
    }

    #[test]
    fn bisection_agrees_with_dense_qr(
        diag in prop::collection::vec(-5.0..5.0f64, 20),
        off in prop::collection::vec(0.05..2.0f64, 19),
    ) {
        let t = SymmetricTridiagonal::new(diag.clone(), off.clone()).unwrap();
        let values = spectra::lowest_eigenvalues(&t, 20).unwrap();
        prop_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        let mut band = BandMatrix::zeros(20, 1, 1);
        for i in 0..20 {
            band.set(i, i, diag[i]);
            if i + 1 < 20 {
                band.set(i, i + 1, off[i]);
                band.set(i + 1, i, off[i]);
            }
        }
        let dense = spectra::eig_band_nonsymmetric(&band, &QrOptions { deflation_tol: 1e-14, ..QrOptions::default() }).unwrap();
        for (a, z) in values.iter().zip(&dense) {
            prop_assert!((a - z.re).abs() <= 1e-9 * t.norm_inf(), "{} vs {}", a, z.re);
            prop_assert!(z.im.abs() <= 1e-9);
        }
        let (lo, hi) = t.gershgorin_bounds();
        prop_assert!(values[0] >= lo - 1e-12 && values[19] <= hi + 1e-12);
        prop_assume!(values[8] - values[7] > 1e-9);
        prop_assert_eq!(t.sturm_count(0.5 * (values[7] + values[8])), 8);
    }

    #[test]
    fn eigenpairs_have_small_residuals(
        diag in prop::collection::vec(-3.0..3.0f64, 30),
        off in prop::collection::vec(0.1..1.0f64, 29),
    ) {
        let t = SymmetricTridiagonal::new(diag, off).unwrap();
        let eig = spectra::eig_symmetric_tridiagonal(&t, 6).unwrap();
        for (i, p) in eig.pairs.iter().enumerate() {
            let r: Vec<f64> = t.matvec(&p.vector).iter().zip(&p.vector).map(|(a, v)| a - p.value * v).collect();
            prop_assert!(r.iter().map(|x| x * x).sum::<f64>().sqrt() <= 1e-8 * t.norm_inf());
            for q in &eig.pairs[..i] {
                let dot: f64 = q.vector.iter().zip(&p.vector).map(|(a, b)| a * b).sum();
                prop_assert!(dot.abs() < 1e-6);
            }
        }
    }

    #[test]
    fn gegenbauer_three_term_recurrence(n in 1usize..30, l in 0.6..4.0f64, t in -1.0..1.0f64) {
        let nf = n as f64;
        let lhs = (nf + 1.0) * gegenbauer(n + 1, l, t);
        let rhs = 2.0 * (nf + l) * t * gegenbauer(n, l, t) - (nf + 2.0 * l - 1.0) * gegenbauer(n - 1, l, t);
        prop_assert!(close(lhs, rhs, 1e-10));
    }

    #[test]
    fn solitonic_levels_are_quadratic_in_n(q in 0.3..1.5f64, kappa in 0.6..3.0f64, m in params()) {
        let (a, b) = m.reduced();
        prop_assume!(solitonic_delta(kappa, a, b) > 0.0);
        let cf = SolitonicClosedForm::for_params(q, kappa, &m).unwrap();
        let e: Vec<f64> = (0..4).map(|n| cf.energy(n)).collect();
        // constant second difference 2ω̃q²
        let second = e[2] - 2.0 * e[1] + e[0];
        prop_assert!(close(second, 2.0 * m.omega_tilde() * q * q, 1e-10));
        prop_assert!(close(e[3] - 2.0 * e[2] + e[1], second, 1e-10));
        prop_assert!(close(cf.v0, cf.v0_formula(), 1e-12));
    }

    #[test]
    fn expression_derivatives_match_differences(c in 0.1..2.0f64, x in -2.0..2.0f64) {
        let jet = ExprJet::parse(&format!("cosh({c}*x)^2 + exp(-x)*tanh(x) - ln(2 + sinh(x)^2)")).unwrap();
        let f = |t: f64| {
            let p = profiles::make_custom(jet.source(), "0").unwrap();
            p.a_jet(t)
        };
        let h = 1e-4;
        let (m, z, p) = (f(x - h), f(x), f(x + h));
        prop_assert!(close(z.d1, (p.value - m.value) / (2.0 * h), 1e-6));
        prop_assert!(close(z.d2, (p.d1 - m.d1) / (2.0 * h), 1e-6));
    }

    #[test]
    fn refinement_halves_spacing(lo in -20.0..0.0f64, width in 1.0..40.0f64, n in 16usize..500) {
        let g = Grid::new(lo, lo + width, n).unwrap();
        let f = g.refined();
        prop_assert_eq!(f.n, 2 * n + 1);
        prop_assert!(close(f.h(), g.h() / 2.0, 1e-14));
        // every coarse node is a fine node
        prop_assert!(close(f.x(1), g.x(0), 1e-12));
        prop_assert!(close(f.x(2 * n - 1), g.x(n - 1), 1e-12));
    }
}
