mod common;

use common::j0_series_oracle;
use ecfnorm::bessel_j0;

#[test]
fn oracle_reproduces_known_values() {
    assert_eq!(j0_series_oracle(0.0), 1.0);
    assert!((j0_series_oracle(1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
    assert!(j0_series_oracle(2.404_825_557_695_773).abs() < 1e-15);
    // Reference values from an independent 40-digit evaluation.
    assert!((j0_series_oracle(50.0) - 0.055_812_327_669_251_815).abs() < 1e-16);
    assert!((j0_series_oracle(100.0) - 0.019_985_850_304_223_122).abs() < 1e-16);
    assert!((j0_series_oracle(200.0) + 0.015_437_439_930_565_092).abs() < 1e-16);
}

#[test]
fn matches_series_oracle_on_dense_grid() {
    let mut worst = (0.0, 0.0);
    for i in 0..=2000 {
        let z = 50.0 * i as f64 / 2000.0;
        let err = (bessel_j0(z).unwrap() - j0_series_oracle(z)).abs();
        if err > worst.1 {
            worst = (z, err);
        }
    }
    assert!(
        worst.1 <= 1e-12,
        "max error {:e} at z = {}",
        worst.1,
        worst.0
    );
}

#[test]
fn matches_series_oracle_out_to_200() {
    for i in 0..=300 {
        let z = 50.0 + 150.0 * i as f64 / 300.0 + 0.123;
        let err = (bessel_j0(z).unwrap() - j0_series_oracle(z)).abs();
        assert!(err <= 1e-12, "error {err:e} at z = {z}");
    }
}

#[test]
fn first_zero_and_reference_point() {
    assert!(bessel_j0(2.404_825_557_695_773).unwrap().abs() < 1e-10);
    assert!((bessel_j0(1.0).unwrap() - 0.765_197_686_557_966_6).abs() < 1e-12);
    // sign change brackets the zero
    assert!(bessel_j0(2.404_825_557_695_773 - 1e-10).unwrap() > 0.0);
    assert!(bessel_j0(2.404_825_557_695_773 + 1e-10).unwrap() < 0.0);
}
