mod common;

use common::fd_first;
use fracvar::fracops::{frac_deriv, FracOrder, Scheme};
use fracvar::lagrangian::{
    derive_causal_eom, derive_retrocausal_eom, parse_lagrangian, reduce_integer_orders, render_eom,
    ClassicalOde, LagrangianError, LagrangianSpec, ParseError, PotentialSpec, ProductTerm,
};
use fracvar::{Direction, Grid, GridFunction};
use num_rational::Rational64;
use proptest::prelude::*;

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

#[test]
fn parse_examples() {
    let spec = parse_lagrangian("1.0*q[1] + 0.3*q[0.5] + 4.0*q[0]").unwrap();
    let got: Vec<_> = spec.terms.iter().map(|t| (t.coeff, t.order)).collect();
    assert_eq!(got, vec![(1.0, r(1, 1)), (0.3, r(1, 2)), (4.0, r(0, 1))]);
    assert_eq!(spec.potential, PotentialSpec::Free);

    let spec = parse_lagrangian("1.0*q[1] - V(harmonic, 4.0)").unwrap();
    assert_eq!(spec.terms.len(), 1);
    assert_eq!(spec.potential, PotentialSpec::Harmonic { k: 4.0 });

    match parse_lagrangian("1.0*q[1] + 1.0*q[1]") {
        Err(ParseError::DuplicateOrder { offset: 11, first: 0, .. }) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn syntax_errors_carry_offsets() {
    match parse_lagrangian("1.0*q[1] + 2*x[0]") {
        Err(ParseError::Syntax { offset: 13, .. }) => {}
        other => panic!("{other:?}"),
    }
    match parse_lagrangian("1*q[-0.5]") {
        Err(ParseError::NegativeOrder { offset: 4, .. }) => {}
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_lagrangian("1*q[1] - 2*q[0]"), Err(ParseError::Syntax { .. })));
    assert!(parse_lagrangian("1*q[1] - V(harmonic, -1)").is_err());
    assert!(parse_lagrangian("1*q[1] - V(well, 0)").is_err());
}

#[test]
fn whitespace_is_insignificant() {
    let a = parse_lagrangian("1*q[1]+0.3*q[0.5]-V(poly,0,0,2)").unwrap();
    let b = parse_lagrangian("  1 * q [ 1 ] +\t0.3 * q[0.5]\n - V( poly , 0 , 0 , 2 ) ").unwrap();
    assert_eq!(a, b);
}

#[test]
fn damped_pair_is_reproduced_exactly() {
    // m = 1, C = 0.3, ω = 2: mω² = 4
    let spec = parse_lagrangian("1*q[1] + 0.3*q[0.25] + 4*q[0]").unwrap();
    let spec = spec.with_fractional_order(0.5).unwrap();
    let causal = reduce_integer_orders(&derive_causal_eom(&spec).unwrap()).unwrap();
    let retro = reduce_integer_orders(&derive_retrocausal_eom(&spec).unwrap()).unwrap();
    assert_eq!(causal, ClassicalOde { mass_coeff: 1.0, damping_coeff: 0.3, stiffness_coeff: 4.0 });
    assert_eq!(retro, ClassicalOde { mass_coeff: 1.0, damping_coeff: -0.3, stiffness_coeff: 4.0 });
    assert_eq!(causal.render(), "1·q'' + 0.3·q' + 4·q = 0");
    assert_eq!(retro.render(), "1·q'' - 0.3·q' + 4·q = 0");
}

#[test]
fn harmonic_potential_and_stiffness_term_agree() {
    let by_term = parse_lagrangian("2*q[1] + 0.5*q[0.5] + 8*q[0]").unwrap();
    let by_potential = parse_lagrangian("2*q[1] + 0.5*q[0.5] - V(harmonic, 8)").unwrap();
    for derive in [derive_causal_eom, derive_retrocausal_eom] {
        let a = reduce_integer_orders(&derive(&by_term).unwrap()).unwrap();
        let b = reduce_integer_orders(&derive(&by_potential).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn generic_eom_rendering() {
    let spec = parse_lagrangian("1*q[1] + 0.3*q[0.5] + 4*q[0]").unwrap();
    let c = derive_causal_eom(&spec).unwrap();
    assert_eq!(render_eom(&c), "1·D^2[q] + 0.3·D^1[q] + 4·D^0[q] = 0 (causal)");
    let frac = parse_lagrangian("1*q[1] + 0.3*q[0.3]").unwrap();
    let e = derive_retrocausal_eom(&frac).unwrap();
    assert!(render_eom(&e).contains("D^0.6[q]"));
    assert!(matches!(reduce_integer_orders(&e), Err(LagrangianError::NonIntegerOrder(_))));
    let empty = derive_causal_eom(&parse_lagrangian("").unwrap()).unwrap();
    assert!(empty.degenerate);
    assert_eq!(render_eom(&empty), "0 = 0");
}

#[test]
fn free_particle_and_single_stiffness() {
    let e = derive_causal_eom(&parse_lagrangian("3*q[1]").unwrap()).unwrap();
    assert_eq!(
        reduce_integer_orders(&e).unwrap(),
        ClassicalOde { mass_coeff: 3.0, damping_coeff: 0.0, stiffness_coeff: 0.0 }
    );
    let e = derive_retrocausal_eom(&parse_lagrangian("5*q[0]").unwrap()).unwrap();
    assert_eq!(reduce_integer_orders(&e).unwrap().render(), "5·q = 0");
}

#[test]
fn well_has_no_equation_of_motion() {
    let spec = parse_lagrangian("1*q[1] - V(well, 1)").unwrap();
    assert!(matches!(derive_causal_eom(&spec), Err(LagrangianError::NoGradient)));
}

/// The retrocausal `D^n` of a smooth function is `(−1)^n dⁿ/dtⁿ`, which is
/// the sign the reduction assigns.
#[test]
fn reduction_parity_matches_operator() {
    let grid = Grid::new(0.0, 1.0, 2001).unwrap();
    let f = GridFunction::from_fn(grid, |t| (2.0 * t).sin() + t * t * t);
    let derivs: [Box<dyn Fn(f64) -> f64>; 3] = [
        Box::new(|t| (2.0 * t).sin() + t * t * t),
        Box::new(|t| 2.0 * (2.0 * t).cos() + 3.0 * t * t),
        Box::new(|t| -4.0 * (2.0 * t).sin() + 6.0 * t),
    ];
    for n in 0..=2 {
        let spec = LagrangianSpec {
            terms: vec![ProductTerm { coeff: 1.0, order: r(n, 2) }],
            potential: PotentialSpec::Free,
        };
        let ode = reduce_integer_orders(&derive_retrocausal_eom(&spec).unwrap()).unwrap();
        let sign = [ode.stiffness_coeff, ode.damping_coeff, ode.mass_coeff][n as usize];
        let d = frac_deriv(&f, FracOrder::new(n as f64).unwrap(), Scheme::default(), Direction::Retrocausal)
            .unwrap();
        let interior = 10..grid.len() - 10;
        let peak = interior.clone().map(|i| derivs[n as usize](grid.x(i)).abs()).fold(0.0, f64::max);
        for i in interior {
            let want = sign * derivs[n as usize](grid.x(i));
            assert!((d.samples()[i] - want).abs() <= 1e-2 * peak, "n={n} i={i}");
        }
    }
    // finite-difference cross-check of the n = 1 case
    let d1 = frac_deriv(&f, FracOrder::new(1.0).unwrap(), Scheme::default(), Direction::Retrocausal).unwrap();
    let fd = fd_first(f.samples(), grid.h());
    for (a, b) in d1.samples().iter().zip(&fd) {
        assert!((a + b).abs() < 1e-12);
    }
}

fn order_strategy() -> impl Strategy<Value = Rational64> {
    (0i64..40, prop::sample::select(vec![1i64, 2, 4, 5, 10])).prop_map(|(n, d)| Rational64::new(n, d))
}

fn coeff_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![(-1000i32..1000).prop_map(|n| n as f64 / 8.0), -1e3..1e3_f64,]
        .prop_filter("nonzero", |c| *c != 0.0)
}

fn potential_strategy() -> impl Strategy<Value = PotentialSpec> {
    prop_oneof![
        Just(PotentialSpec::Free),
        (0.0..100.0_f64).prop_map(|k| PotentialSpec::Harmonic { k }),
        prop::collection::vec(-10.0..10.0_f64, 1..5).prop_map(|coeffs| PotentialSpec::Polynomial { coeffs }),
    ]
}

fn spec_strategy() -> impl Strategy<Value = LagrangianSpec> {
    (prop::collection::vec((coeff_strategy(), order_strategy()), 0..6), potential_strategy()).prop_map(
        |(raw, potential)| {
            let mut terms: Vec<ProductTerm> = Vec::new();
            for (coeff, order) in raw {
                if terms.iter().all(|t| t.order != order) {
                    terms.push(ProductTerm { coeff, order });
                }
            }
            LagrangianSpec { terms, potential }
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn render_parse_round_trip(spec in spec_strategy()) {
        let text = spec.render();
        let back = parse_lagrangian(&text).unwrap();
        prop_assert_eq!(&back, &spec, "text: {}", text);
        prop_assert_eq!(back.render(), text);
    }

    #[test]
    fn direction_symmetry(spec in spec_strategy()) {
        let c = derive_causal_eom(&spec).unwrap();
        let r = derive_retrocausal_eom(&spec).unwrap();
        prop_assert_eq!(&c.terms, &r.terms);
        prop_assert_eq!(&c.gradient, &r.gradient);
        prop_assert_eq!(c.direction, Direction::Causal);
        prop_assert_eq!(r.direction, Direction::Retrocausal);
        for (t, s) in c.terms.iter().zip(&spec.terms) {
            prop_assert_eq!(t.order, s.order * 2);
            prop_assert_eq!(t.coeff, s.coeff);
        }
    }
}
