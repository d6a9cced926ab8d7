use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::prelude::*;
use ramanujan_core::arith::{int, rat};
use ramanujan_core::qseries::{
    chazy_residual, chazy_triple, divisor_sigma, eisenstein, eisenstein_triple, verify_chazy, verify_ramanujan,
    QSeriesError, TruncatedQSeries,
};
use ramanujan_core::Rational;

/// Divisor sum by trial division over every candidate.
fn sigma_oracle(k: u32, n: u64) -> i128 {
    (1..=n).filter(|d| n % d == 0).map(|d| (d as i128).pow(k)).sum()
}

fn series(xs: &[i64]) -> TruncatedQSeries {
    TruncatedQSeries::new(xs.iter().map(|&x| int(x)).collect())
}

#[test]
fn divisor_sums() {
    assert_eq!(divisor_sigma(1, 1).unwrap(), BigInt::from(1));
    assert_eq!(divisor_sigma(3, 2).unwrap(), BigInt::from(sigma_oracle(3, 2)));
    assert_eq!(divisor_sigma(5, 4).unwrap(), BigInt::from(sigma_oracle(5, 4)));
    for n in 1..200 {
        for k in [1, 3, 5] {
            assert_eq!(divisor_sigma(k, n).unwrap(), BigInt::from(sigma_oracle(k, n)));
        }
    }
    assert_eq!(divisor_sigma(3, 0), Err(QSeriesError::ZeroIndex));
}

#[test]
fn eisenstein_coefficients() {
    let [e2, e4, e6] = eisenstein_triple(60).unwrap();
    assert_eq!(e2.coeff(1), &int(-24));
    assert_eq!(e4.coeff(2), &int(240 * sigma_oracle(3, 2) as i64));
    assert_eq!(e6.coeff(0), &int(1));
    for n in 1..60u64 {
        let i = n as usize;
        assert_eq!(e2.coeff(i), &Rational::from_integer(BigInt::from(-24 * sigma_oracle(1, n))));
        assert_eq!(e4.coeff(i), &Rational::from_integer(BigInt::from(240 * sigma_oracle(3, n))));
        assert_eq!(e6.coeff(i), &Rational::from_integer(BigInt::from(-504 * sigma_oracle(5, n))));
    }
    assert_eq!(eisenstein(8, 10), Err(QSeriesError::UnsupportedWeight(8)));
    assert!(matches!(eisenstein(2, 0), Err(QSeriesError::OrderTooSmall { .. })));
}

#[test]
fn theta_examples() {
    let one = TruncatedQSeries::constant(int(1), 10);
    assert!(one.theta().is_zero());
    for n in 0..10 {
        let q_n = TruncatedQSeries::monomial(n, 10);
        assert_eq!(q_n.theta(), q_n.scale(&int(n as i64)));
    }
    assert_eq!(eisenstein(2, 10).unwrap().theta().coeff(1), &int(-24));
}

#[test]
fn integrality_to_order_500() {
    for s in eisenstein_triple(500).unwrap() {
        assert_eq!(s.order(), 500);
        assert!(s.is_integral());
    }
}

#[test]
fn ramanujan_system_holds() {
    for order in [2, 3, 17, 200, 500] {
        for r in verify_ramanujan(order).unwrap() {
            assert_eq!(r.order(), order);
            assert!(r.is_zero(), "order {order}: first nonzero at {:?}", r.first_nonzero_index());
        }
    }
    assert!(matches!(verify_ramanujan(1), Err(QSeriesError::OrderTooSmall { min: 2, got: 1 })));
}

#[test]
fn chazy_equation_holds() {
    for order in [2, 3, 200, 500] {
        assert!(verify_chazy(order).unwrap().is_zero());
    }
    // hand expansion of the first two coefficients
    let e2 = series(&[1, -24, -72]);
    let r = chazy_residual(&e2);
    assert_eq!(r.coeff(0), &int(0));
    assert_eq!(r.coeff(1), &int(0));
}

#[test]
fn chazy_triple_is_the_integral_curve() {
    let order = 200;
    let [b2, b4, b6] = chazy_triple(order).unwrap();
    assert_eq!(b2, eisenstein(2, order).unwrap());
    assert_eq!(b4.coeff(1), &int(-12));
    assert_eq!(b2.theta(), b4.scale(&int(2)));
    assert_eq!(b4.theta(), b6.scale(&int(3)));
    let third = b6.theta().sub(&b2.mul(&b6)).add(&b4.mul(&b4));
    assert_eq!(third, verify_chazy(order).unwrap().scale(&rat(1, 6)));
    assert!(third.is_zero());
}

/// Coefficients of `q ∏ (1 - q^n)^24` below `order`.
fn product_oracle(order: usize) -> Vec<i128> {
    let mut c = vec![0i128; order];
    c[1] = 1;
    for n in 1..order {
        for _ in 0..24 {
            for m in (n..order).rev() {
                c[m] -= c[m - n];
            }
        }
    }
    c
}

#[test]
fn discriminant_series() {
    let order = 30;
    let [_, e4, e6] = eisenstein_triple(order).unwrap();
    let delta = e4.mul(&e4).mul(&e4).sub(&e6.mul(&e6));
    assert!(!delta.is_zero());
    assert_eq!(delta.coeff(0), &int(0));
    assert_eq!(delta.coeff(1), &int(1728));
    for (n, c) in product_oracle(order).into_iter().enumerate() {
        assert_eq!(delta.coeff(n), &Rational::from_integer(BigInt::from(1728 * c)), "q^{n}");
    }
}

#[test]
fn evaluation_examples() {
    let one = TruncatedQSeries::constant(int(1), 5);
    let q = Complex64::new(0.3, -0.4);
    assert_eq!(one.evaluate(q).unwrap().value, Complex64::new(1.0, 0.0));
    let e4 = eisenstein(4, 40).unwrap();
    assert_eq!(e4.evaluate(Complex64::new(0.0, 0.0)).unwrap().value, Complex64::new(1.0, 0.0));

    let q = Complex64::new(0.01, 0.0);
    let short = eisenstein(2, 40).unwrap().evaluate(q).unwrap();
    let long = eisenstein(2, 80).unwrap().evaluate(q).unwrap();
    assert!((short.value - long.value).norm() < 1e-12);
    assert!((short.value.re - (1.0 - 0.24 - 72e-4 - 96e-6)).abs() < 1e-5);
    assert!(short.tail_bound >= 0.0 && short.tail_bound < 1e-12);
    assert_eq!(e4.evaluate(Complex64::new(0.6, 0.8)), Err(QSeriesError::OutsideDisc));
}

fn arb_series(order: usize) -> impl Strategy<Value = TruncatedQSeries> {
    prop::collection::vec((-20i64..=20, 1i64..=4), order)
        .prop_map(|cs| TruncatedQSeries::new(cs.into_iter().map(|(n, d)| rat(n, d)).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn theta_is_a_derivation(f in arb_series(24), g in arb_series(24)) {
        prop_assert_eq!(f.mul(&g).theta(), f.mul(&g.theta()).add(&g.mul(&f.theta())));
    }

    #[test]
    fn theta_is_linear(f in arb_series(16), g in arb_series(16), n in -9i64..9, d in 1i64..9) {
        let c = rat(n, d);
        prop_assert_eq!(f.scale(&c).add(&g).theta(), f.theta().scale(&c).add(&g.theta()));
    }

    #[test]
    fn products_truncate_to_the_shorter_order(f in arb_series(12), g in arb_series(20)) {
        let h = f.mul(&g);
        prop_assert_eq!(h.order(), 12);
        prop_assert_eq!(h, f.mul(&g.truncate(12)));
        prop_assert_eq!(f.add(&g).order(), 12);
    }

    #[test]
    fn unit_series_invert(mut f in arb_series(20), g in arb_series(20)) {
        f = f.add(&TruncatedQSeries::constant(int(1), 20).sub(&TruncatedQSeries::constant(f.coeff(0).clone(), 20)));
        let inv = f.inverse().unwrap();
        prop_assert_eq!(f.mul(&inv), TruncatedQSeries::constant(int(1), 20));
        prop_assert_eq!(g.try_div(&f).unwrap().mul(&f), g);
    }

    #[test]
    fn chazy_triple_identity_for_any_series(f in arb_series(20)) {
        // b-coordinates built from f close up iff Chazy's expression vanishes
        let (t1, t2) = (f.theta(), f.theta().theta());
        let (b4, b6) = (t1.scale(&rat(1, 2)), t2.scale(&rat(1, 6)));
        let third = b6.theta().sub(&f.mul(&b6)).add(&b4.mul(&b4));
        prop_assert_eq!(third, chazy_residual(&f).scale(&rat(1, 6)));
    }
}
