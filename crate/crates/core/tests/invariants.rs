use gapprob::coulomb::{appendix_identity_check, density, jue_quartic_residual, jue_support, lue_cubic_residual, lue_density_positive, lue_endpoint, lue_support};
use gapprob::fredholm::{log_det_converged, KernelKind};
use gapprob::orthopoly::{finite_probability, WeightSpec};
use gapprob::painleve::{AsymptoticSeries, SeriesKind};
use gapprob::specfun::log_gamma;
use gapprob::PrecisionContext;
use proptest::prelude::*;
use rug::Rational;

fn ctx(bits: u32) -> PrecisionContext {
    PrecisionContext::new(bits).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gamma_functional_relation(x in 0.05f64..40.0) {
        let c = ctx(128);
        let d = log_gamma(&c.float(x + 1.0), &c).unwrap() - log_gamma(&c.float(x), &c).unwrap();
        prop_assert!((d.to_f64() - x.ln()).abs() < 1e-13 * (1.0 + x.ln().abs()));
    }

    #[test]
    fn identities_hold_on_random_intervals(a in 0.01f64..0.8, w in 0.01f64..0.19, id in 1usize..=11) {
        let b = a + w;
        let r = appendix_identity_check(id, a, b, &ctx(64)).unwrap();
        prop_assert!(r.residual < 1e-10 * r.scale.max(1.0), "id={} a={} b={} {:?}", id, a, b, r);
    }

    #[test]
    fn lue_root_is_on_the_cubic(t in 0.0f64..20.0, alpha in -0.9f64..4.0, n in 1usize..400) {
        let s = lue_support(t, alpha, n).unwrap();
        prop_assert!(s.upper > t);
        prop_assert!(lue_cubic_residual(&s).unwrap().relative < 1e-12);
        let base = 4.0 * n as f64 + 2.0 * alpha + t;
        if alpha > 0.0 { prop_assert!(s.upper <= base); } else { prop_assert!(s.upper >= base); }
        prop_assert_eq!(lue_endpoint(t, 0.0, n).unwrap(), 4.0 * n as f64 + t);
    }

    #[test]
    fn jue_root_is_on_the_quartic(t in 0.001f64..0.95, alpha in -0.9f64..3.0, beta in 0.1f64..3.0, n in 1usize..300) {
        let s = jue_support(t, alpha, beta, n).unwrap();
        prop_assert!(s.upper > t && s.upper < 1.0);
        prop_assert!(jue_quartic_residual(&s).unwrap().relative < 1e-12);
    }

    #[test]
    fn density_is_positive_under_its_condition(t in 0.05f64..5.0, alpha in 0.0f64..2.0, n in 2usize..60, u in 0.001f64..0.999) {
        let s = lue_support(t, alpha, n).unwrap();
        prop_assume!(lue_density_positive(&s));
        let x = t + u * (s.upper - t);
        prop_assert!(density(&s, x).unwrap() > 0.0);
    }

    #[test]
    fn sigma_tail_is_scaled_log_p_tail(num in -7i64..40, den in 1u64..8) {
        let alpha = num as f64 / den as f64;
        prop_assume!(alpha > -1.0);
        let c = ctx(64);
        let lp = AsymptoticSeries::new(SeriesKind::LogPLue { alpha }, 6, &c).unwrap();
        let sg = AsymptoticSeries::new(SeriesKind::SigmaOfS { alpha }, 6, &c).unwrap();
        for j in 1..=6usize {
            let want = lp.tail_coefficient(j).unwrap() * Rational::from((-(j as i64), 2));
            prop_assert_eq!(sg.tail_coefficient(j).unwrap(), want);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn finite_gap_probability_is_a_probability(t in 0.01f64..3.0, dt in 0.01f64..1.0, alpha in -0.5f64..2.0, n in 1usize..6) {
        let c = ctx(256);
        let lo = finite_probability(&WeightSpec::laguerre(alpha, t).unwrap(), n, &c).unwrap().to_f64();
        let hi = finite_probability(&WeightSpec::laguerre(alpha, t + dt).unwrap(), n, &c).unwrap().to_f64();
        prop_assert!(lo < 0.0 && hi < lo);
    }

    #[test]
    fn sine_kernel_splits_into_bessel_pair(b in 0.1f64..1.8) {
        let c = ctx(128);
        let tol = 1e-14;
        let sine = log_det_converged(KernelKind::Sine, &c.float(b), tol, &c).unwrap().value;
        let s = c.float(b * b);
        let m = log_det_converged(KernelKind::Bessel { alpha: -0.5 }, &s, tol, &c).unwrap().value;
        let p = log_det_converged(KernelKind::Bessel { alpha: 0.5 }, &s, tol, &c).unwrap().value;
        prop_assert!((sine - m - p).abs().to_f64() < 1e-12);
    }
}
