mod common;

use common::{bivariate_checklist, chi2_grid_test, density_mass, integrate};
use ecfnorm::alt::{
    density_bivariate, gbpl_printed_density, pearvii_radial_cdf, pearvii_radial_inverse,
    std_normal_cdf,
};
use ecfnorm::{sample_alt, AlternativeSpec, RngStream};

fn spec(s: &str) -> AlternativeSpec {
    AlternativeSpec::parse(s).unwrap()
}

#[test]
fn every_bivariate_density_integrates_to_one() {
    let mut laws = bivariate_checklist();
    laws.extend(AlternativeSpec::bivariate_suite());
    for law in laws {
        let mass = density_mass(&law);
        assert!((mass - 1.0).abs() < 1e-3, "{law}: mass {mass}");
    }
}

#[test]
fn printed_gbpl_density_does_not_normalize() {
    let f = |a: f64, b: f64| gbpl_printed_density(2.0, 0.0, [a, b]).unwrap();
    let mass = common::integrate_2d(
        &f,
        (f64::NEG_INFINITY, f64::INFINITY),
        (f64::NEG_INFINITY, f64::INFINITY),
        48,
    );
    assert!((mass - 1.0).abs() > 0.05, "printed density mass {mass}");
    // The two forms differ exactly by the factor (uv)^{-1/alpha}.
    let x = [0.3, -0.2];
    let uv = std_normal_cdf(x[0]) * std_normal_cdf(x[1]);
    let a = gbpl_printed_density(2.0, 0.5, x).unwrap() * uv.powf(-0.5);
    let b = density_bivariate(&spec("GBPL(2,0.5)"), x).unwrap();
    assert!((a - b).abs() < 1e-13 * b, "{a} vs {b}");
}

#[test]
fn every_sampler_passes_grid_chi_square() {
    for (k, law) in bivariate_checklist().iter().enumerate() {
        let r = chi2_grid_test(law, 100_000, 1000 + k as u64);
        assert!((r.total_probability - 1.0).abs() < 1e-3, "{law}: {r:?}");
        assert!(r.p_value > 0.001, "{law}: {r:?}");
    }
}

#[test]
fn pearson_radius_matches_integrated_density() {
    for alpha in [1.0, 2.5, 10.0] {
        let d = |r: f64| {
            std::f64::consts::TAU
                * r
                * density_bivariate(&AlternativeSpec::PearsonVII { alpha }, [r, 0.0]).unwrap()
        };
        for r in [0.3, 1.0, 2.449489742783178, 7.0] {
            let numeric = integrate(&d, 0.0, r, 16);
            assert!(
                (numeric - pearvii_radial_cdf(r, alpha)).abs() < 1e-12,
                "alpha {alpha}, r {r}"
            );
        }
    }
    for i in 0..1000 {
        let u = i as f64 / 1000.0;
        for alpha in [0.5, 1.0, 10.0] {
            let r = pearvii_radial_inverse(u, alpha).unwrap();
            assert!((pearvii_radial_cdf(r, alpha) - u).abs() <= 1e-12);
        }
    }
    assert!(pearvii_radial_inverse(1.0, 1.0).is_err());
}

#[test]
fn gbpl_margins_are_standard_normal() {
    for (alpha, beta) in [(1.0, 1.0), (2.0, -1.0)] {
        let n = 100_000;
        let x = sample_alt(
            &AlternativeSpec::Gbpl { alpha, beta },
            n,
            &mut RngStream::new(77, 0),
        )
        .unwrap();
        let bound = 1.5 * 1.36 / (n as f64).sqrt();
        for j in 0..2 {
            let mut col = x.column(j);
            col.sort_by(f64::total_cmp);
            let ks = col
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let f = std_normal_cdf(v);
                    (f - i as f64 / n as f64)
                        .abs()
                        .max(((i + 1) as f64 / n as f64 - f).abs())
                })
                .fold(0.0, f64::max);
            assert!(ks < bound, "GBPL({alpha},{beta}) column {j}: KS {ks}");
        }
    }
}

struct Moments {
    mean: f64,
    var: f64,
    se_mean: f64,
    se_var: f64,
}

fn moments(x: &[f64]) -> Moments {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    Moments {
        mean,
        var,
        se_mean: (var / n).sqrt(),
        se_var: ((m4 - var * var) / n).sqrt(),
    }
}

#[test]
fn univariate_samplers_match_textbook_moments() {
    let euler = 0.577_215_664_901_532_9;
    let pi2 = std::f64::consts::PI.powi(2);
    let cases: Vec<(&str, f64, f64)> = vec![
        ("MixN(0.3,1,0.25)", 0.3, 0.7 + 0.3 * 1.25 - 0.09),
        ("MixN(0.5,1,4)", 0.5, 0.5 + 0.5 * 5.0 - 0.25),
        ("t(5)", 0.0, 5.0 / 3.0),
        ("U(-sqrt(3),sqrt(3))", 0.0, 1.0),
        ("ChiSq(5)", 5.0, 10.0),
        ("B(2,5)", 2.0 / 7.0, 10.0 / (49.0 * 8.0)),
        ("Gamma(1,5)", 5.0, 25.0),
        ("Gamma(5,1)", 5.0, 5.0),
        ("Gum(1,2)", 1.0 + 2.0 * euler, pi2 / 6.0 * 4.0),
        (
            "LN(0,0.5)",
            0.125f64.exp(),
            (0.25f64.exp() - 1.0) * 0.25f64.exp(),
        ),
        ("N(1,4)", 1.0, 4.0),
    ];
    for (k, (name, mean, var)) in cases.into_iter().enumerate() {
        let x = sample_alt(&spec(name), 1_000_000, &mut RngStream::new(5, k as u64)).unwrap();
        let m = moments(x.values());
        assert!(
            (m.mean - mean).abs() < 4.0 * m.se_mean,
            "{name}: mean {} vs {mean}",
            m.mean
        );
        assert!(
            (m.var - var).abs() < 4.0 * m.se_var,
            "{name}: var {} vs {var}",
            m.var
        );
    }
}

#[test]
fn bivariate_lognormal_margins_are_standardized() {
    let x = sample_alt(&spec("LogN(1,1,0.5)"), 1_000_000, &mut RngStream::new(8, 0)).unwrap();
    for j in 0..2 {
        let m = moments(&x.column(j));
        assert!(
            m.mean.abs() < 3.0 * m.se_mean,
            "column {j}: mean {}",
            m.mean
        );
        assert!(
            (m.var - 1.0).abs() < 3.0 * m.se_var,
            "column {j}: var {}",
            m.var
        );
    }
}

#[test]
fn nmixb_sign_of_rho_does_not_matter() {
    let a = sample_alt(&spec("NMixB(0.3)"), 500, &mut RngStream::new(4, 4)).unwrap();
    let b = sample_alt(&spec("NMixB(-0.3)"), 500, &mut RngStream::new(4, 4)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn samplers_are_deterministic() {
    for law in bivariate_checklist() {
        let a = sample_alt(&law, 64, &mut RngStream::new(12, 3)).unwrap();
        let b = sample_alt(&law, 64, &mut RngStream::new(12, 3)).unwrap();
        let c = sample_alt(&law, 64, &mut RngStream::new(12, 4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    let bad = AlternativeSpec::Morgenstern { alpha: 1.5 };
    assert!(sample_alt(&bad, 10, &mut RngStream::new(0, 0)).is_err());
    assert!(density_bivariate(&bad, [0.0, 0.0]).is_err());
}
