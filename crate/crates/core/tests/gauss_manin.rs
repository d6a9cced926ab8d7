use std::collections::BTreeMap;

use proptest::prelude::*;
use ramanujan_core::arith::rat;
use ramanujan_core::arith::text::{parse_poly, parse_ratfunc};
use ramanujan_core::gauss_manin::builtin::{
    builtin_chart, derived_b_chart, derived_e_chart, morphism_b_to_e, morphism_e_to_weierstrass, printed_chart,
    rederive, BuiltinChart,
};
use ramanujan_core::gauss_manin::{pullback_connection, ChartMorphism, ConnectionChart, GaussManinError, RMatrix};
use ramanujan_core::vector_field::{ramanujan_field, PolyVectorField, RamanujanChart};
use ramanujan_core::{MultiPoly, RatFunc};

const CHARTS: [BuiltinChart; 3] = [BuiltinChart::Weierstrass, BuiltinChart::E, BuiltinChart::B];

fn rf(s: &str, vars: &[&str]) -> RatFunc {
    parse_ratfunc(s, vars).unwrap()
}

fn lowering() -> RMatrix {
    RMatrix::from_fn(2, 2, |i, j| if (i, j) == (1, 0) { RatFunc::one() } else { RatFunc::zero() })
}

#[test]
fn weierstrass_and_e_entries_as_printed() {
    let w = printed_chart(BuiltinChart::Weierstrass);
    let gv = ["g2", "g3"];
    let d = RatFunc::from_poly(w.delta().clone());
    assert_eq!(&w.matrix("g2").unwrap()[(1, 0)] * &d, rf("-9/2*g3", &gv));
    assert_eq!(&w.matrix("g3").unwrap()[(1, 0)] * &d, rf("3*g2", &gv));
    assert_eq!(&w.matrix("g2").unwrap()[(0, 0)] * &d, rf("-1/4*g2^2", &gv));

    let e = printed_chart(BuiltinChart::E);
    assert_eq!(e.delta(), &parse_poly("e4^3 - e6^2", &["e2", "e4", "e6"]).unwrap());
}

#[test]
fn e_chart_is_the_pullback_of_weierstrass() {
    let derived = derived_e_chart().unwrap();
    let printed = printed_chart(BuiltinChart::E);
    for c in printed.coords() {
        assert_eq!(derived.matrix(c), printed.matrix(c), "d{c}");
    }
    assert!(rederive(BuiltinChart::E).unwrap().diff.is_empty());
}

#[test]
fn derived_b_chart_invariants() {
    let b = derived_b_chart().unwrap();
    assert_eq!(b.contract(&ramanujan_field(RamanujanChart::B)).unwrap(), lowering());
    for m in b.matrices() {
        assert_eq!(m[(1, 1)], -m[(0, 0)].clone());
    }
    assert!(b.symplectic_compatibility().iter().all(|(_, ok)| *ok));
    assert!(b.is_flat());
    let k = b.kodaira_spencer(&ramanujan_field(RamanujanChart::B)).unwrap();
    assert_eq!(k, RMatrix::identity(1));
}

#[test]
fn printed_b_chart_disagrees_only_off_db2() {
    let r = rederive(BuiltinChart::B).unwrap();
    assert!(!r.diff.is_empty());
    assert!(r.diff.iter().all(|d| d.coord == "b4" || d.coord == "b6"));
    // the printed data still pairs symplectically in its own O22 = -O11 form
    assert!(r.as_printed.is_symplectic());
    // and the db2 column is untouched by the misprint
    assert_eq!(r.as_printed.matrix("b2"), r.derived.matrix("b2"));
}

#[test]
fn pullback_is_functorial_along_the_chain() {
    let w = printed_chart(BuiltinChart::Weierstrass);
    let (be, ew) = (morphism_b_to_e(), morphism_e_to_weierstrass());
    let stepwise = pullback_connection(&pullback_connection(&w, &ew).unwrap(), &be).unwrap();
    let direct = pullback_connection(&w, &be.then(&ew).unwrap()).unwrap();
    assert!(stepwise.same_connection(&direct));
    assert!(direct.same_connection(&derived_b_chart().unwrap()));
}

#[test]
fn identity_pullback_returns_the_chart() {
    for which in CHARTS {
        let c = builtin_chart(which);
        assert!(pullback_connection(&c, &ChartMorphism::identity(&c)).unwrap().same_connection(&c));
    }
}

#[test]
fn builtin_charts_are_flat_and_symplectic() {
    for which in CHARTS {
        let c = builtin_chart(which);
        assert!(c.is_symplectic(), "{}", c.name());
        assert!(c.is_flat(), "{}", c.name());
    }
}

#[test]
fn integrality_of_the_arithmetic_charts() {
    assert!(builtin_chart(BuiltinChart::E).integral_over(&[2, 3]));
    assert!(builtin_chart(BuiltinChart::B).integral_over(&[2]));
    assert!(!builtin_chart(BuiltinChart::E).integral_over(&[2]));
}

#[test]
fn zero_field_contracts_to_zero() {
    for which in CHARTS {
        let c = builtin_chart(which);
        let z = PolyVectorField::zero(c.coords());
        assert!(c.contract(&z).unwrap().is_zero());
        assert!(c.kodaira_spencer(&z).unwrap().is_zero());
    }
}

#[test]
fn mismatched_inputs_are_errors() {
    let e = printed_chart(BuiltinChart::E);
    let w = printed_chart(BuiltinChart::Weierstrass);
    assert!(matches!(pullback_connection(&w, &morphism_b_to_e()), Err(GaussManinError::ChartMismatch { .. })));
    let v = ramanujan_field(RamanujanChart::B);
    assert!(matches!(e.contract(&v), Err(GaussManinError::ChartMismatch { .. })));

    let map: BTreeMap<String, RatFunc> =
        [("g2", "x"), ("g3", "0")].into_iter().map(|(k, s)| (k.to_string(), rf(s, &["x"]))).collect();
    let x = MultiPoly::var("x");
    let m = ChartMorphism::new("line", &["x"], x.clone(), map, RMatrix::identity(2)).unwrap();
    // g2^3 - 27 g3^2 pulls back to x^3, a unit where x is inverted
    assert!(pullback_connection(&w, &m).is_ok());
    let map: BTreeMap<String, RatFunc> =
        [("g2", "x + 1"), ("g3", "0")].into_iter().map(|(k, s)| (k.to_string(), rf(s, &["x"]))).collect();
    let m = ChartMorphism::new("line", &["x"], x, map, RMatrix::identity(2)).unwrap();
    assert_eq!(pullback_connection(&w, &m).unwrap_err(), GaussManinError::DeltaNotUnit);

    let singular = RMatrix::from_fn(2, 2, |_, _| RatFunc::one());
    let map: BTreeMap<String, RatFunc> = e.coords().iter().map(|c| (c.clone(), RatFunc::var(c))).collect();
    assert_eq!(
        ChartMorphism::new("e", e.coords(), e.delta().clone(), map, singular).unwrap_err(),
        GaussManinError::SingularFrameChange
    );
}

/// A random polynomial field with small coefficients on `coords`.
fn arb_field(coords: Vec<String>) -> impl Strategy<Value = PolyVectorField> {
    let n = coords.len();
    let term = (prop::collection::vec(0u32..3, n), -5i64..=5, 1i64..=3);
    prop::collection::vec(prop::collection::vec(term, 0..4), n).prop_map(move |comps| {
        let coeffs = comps
            .into_iter()
            .map(|terms| {
                RatFunc::from_poly(MultiPoly::from_terms(&coords, terms.into_iter().map(|(e, a, b)| (e, rat(a, b)))))
            })
            .collect();
        PolyVectorField::new(&coords, coeffs).unwrap()
    })
}

fn chart_and_field() -> impl Strategy<Value = (ConnectionChart, PolyVectorField, PolyVectorField)> {
    prop::sample::select(CHARTS.to_vec()).prop_flat_map(|which| {
        let c = builtin_chart(which);
        let coords = c.coords().to_vec();
        (Just(c), arb_field(coords.clone()), arb_field(coords))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kodaira_spencer_is_symmetric((c, v, _) in chart_and_field()) {
        let k = c.kodaira_spencer(&v).unwrap();
        prop_assert!(k.is_symmetric());
        prop_assert_eq!(k[(0, 0)].clone(), c.contract(&v).unwrap()[(1, 0)].clone());
    }

    #[test]
    fn contraction_is_linear((c, v, w) in chart_and_field()) {
        let sum = PolyVectorField::new(c.coords(), v.coeffs().iter().zip(w.coeffs()).map(|(a, b)| a + b).collect()).unwrap();
        prop_assert_eq!(c.contract(&sum).unwrap(), c.contract(&v).unwrap().add(&c.contract(&w).unwrap()));
        let f = RatFunc::var(&c.coords()[0]);
        prop_assert_eq!(c.contract(&v.scale(&f)).unwrap(), c.contract(&v).unwrap().scale(&f));
    }

    #[test]
    fn contraction_preserves_the_form((c, v, _) in chart_and_field()) {
        // Ω(v)^T J + J Ω(v) = 0
        let m = c.contract(&v).unwrap();
        let j = RMatrix::from_fn(2, 2, |i, k| match (i, k) {
            (0, 1) => RatFunc::one(),
            (1, 0) => -RatFunc::one(),
            _ => RatFunc::zero(),
        });
        prop_assert!(m.transpose().mul(&j).add(&j.mul(&m)).is_zero());
    }
}
