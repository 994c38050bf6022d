#[path = "support/oracles.rs"]
mod oracles;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use biquant_core::cochain::cochain_eq;
use biquant_core::geometry::{weight, McParams, PropagatorParams, WeightConvention, EPS_SCHEDULE, PROFILE_ID};
use biquant_core::graph_ops::{gamma3, gamma4};
use biquant_core::poly::{q, Monomial, Rational};
use biquant_core::quantize::{
    build_costar, build_star, check_axioms, compute_table, judge, required_graphs, series_graphs, trend_toward_zero, weight_variable,
    Axiom, DefectComponent, Rescaling, Verdict, WeightTable, WeightValue,
};
use biquant_core::tensor::example_bialgebra;
use biquant_core::{AdmissibleGraph, Cochain, QuantizeError, StructTensor};
use oracles::{cocycle_holds, kk_bracket, known_bialgebras_3d, mono, poisson_cobracket};

/// Weights for every graph up to order `(1,1)` at a small sample count.
fn table() -> &'static WeightTable {
    static T: OnceLock<WeightTable> = OnceLock::new();
    T.get_or_init(|| {
        compute_table(
            &required_graphs((1, 1)),
            WeightConvention::LabelSign,
            &PropagatorParams::default(),
            &EPS_SCHEDULE,
            &McParams::new(4_000, 1),
        )
        .unwrap()
    })
}

/// `±1/2`, the exact corolla weight with the sign the estimate carries.
fn exact_corolla_weight(g: &AdmissibleGraph) -> Rational {
    let w = weight(g, WeightConvention::LabelSign, &PropagatorParams::default(), &McParams::new(20_000, 1)).unwrap();
    assert!((w.value.abs() - 0.5).abs() < 0.05, "{w:?}");
    q(w.value.signum() as i64) / q(2)
}

#[test]
fn first_order_terms_are_twice_the_corolla_weight_times_the_classical_structures() {
    let (alpha, beta) = example_bialgebra();
    let t = table();
    let star = build_star(&alpha, &beta, (1, 0), t, &Rescaling::new()).unwrap();
    let costar = build_costar(&alpha, &beta, (0, 1), t, &Rescaling::new()).unwrap();
    for (series, g, l) in [(&star, gamma3(), (1, 0)), (&costar, gamma4(), (0, 1))] {
        let w = exact_corolla_weight(&g);
        let (var, sign) = weight_variable(&g, WeightConvention::LabelSign);
        let values: BTreeMap<String, Rational> = [(var, w.clone() * q(sign.into()))].into_iter().collect();
        let op = series.term(l).unwrap().substitute(&values).unwrap();
        let factor = q(2) * w;
        for a in Monomial::all_up_to(2, 3) {
            let f = mono(&a);
            if l == (0, 1) {
                let want = poisson_cobracket(&beta, &f).scale(&factor);
                assert_eq!(op.eval(std::slice::from_ref(&f)).unwrap(), want);
                continue;
            }
            for b in Monomial::all_up_to(2, 3) {
                let g = mono(&b);
                let want = kk_bracket(&alpha, &f, &g).scale(&factor);
                assert_eq!(op.eval(&[f.clone(), g]).unwrap().into_poly().unwrap(), want);
            }
        }
    }
}

#[test]
fn zeroth_order_terms_are_product_and_coproduct() {
    let (alpha, beta) = example_bialgebra();
    let star = build_star(&alpha, &beta, (1, 1), table(), &Rescaling::new()).unwrap();
    let costar = build_costar(&alpha, &beta, (1, 1), table(), &Rescaling::new()).unwrap();
    let none = BTreeMap::new();
    assert!(cochain_eq(&star.term((0, 0)).unwrap().substitute(&none).unwrap(), &Cochain::mul(2)).unwrap());
    assert!(cochain_eq(&costar.term((0, 0)).unwrap().substitute(&none).unwrap(), &Cochain::coproduct(2)).unwrap());
}

#[test]
fn abelian_structures_give_the_undeformed_series() {
    let (alpha, beta) = (StructTensor::zero(2, 2, 1), StructTensor::zero(2, 1, 2));
    let empty = WeightTable::new(PROFILE_ID, WeightConvention::LabelSign, 1, 0);
    let star = build_star(&alpha, &beta, (1, 1), &empty, &Rescaling::new()).unwrap();
    let costar = build_costar(&alpha, &beta, (1, 1), &empty, &Rescaling::new()).unwrap();
    for l in [(1, 0), (0, 1), (1, 1)] {
        assert!(star.term(l).unwrap().is_zero());
        assert!(costar.term(l).unwrap().is_zero());
    }
    assert!(star.variables.is_empty());
    let report = check_axioms(&star, &costar, (1, 1), &empty, 2).unwrap();
    assert!(report.lines.iter().all(|l| l.verdict == Verdict::ExactZero));
}

#[test]
fn first_order_axioms_vanish_exactly() {
    let (alpha, beta) = example_bialgebra();
    let t = table();
    let star = build_star(&alpha, &beta, (1, 1), t, &Rescaling::new()).unwrap();
    let costar = build_costar(&alpha, &beta, (1, 1), t, &Rescaling::new()).unwrap();
    let report = check_axioms(&star, &costar, (1, 1), t, 2).unwrap();
    assert_eq!(report.lines.len(), 12);
    for line in &report.lines {
        if line.bidegree != (1, 1) {
            assert_eq!(line.verdict, Verdict::ExactZero, "{:?} {:?}", line.axiom, line.bidegree);
        }
    }
    let text = report.to_text();
    assert!(text.contains("associativity"));
    assert!(text.contains("compatibility"));
}

#[test]
fn series_graphs_have_the_right_vertex_types() {
    for (shape, l) in [((2, 1), (1, 0)), ((1, 2), (0, 1)), ((2, 1), (1, 1)), ((1, 2), (1, 1))] {
        let gs = series_graphs(shape, l);
        assert!(!gs.is_empty());
        for g in &gs {
            let a = (0..g.s).filter(|&k| (g.star[k].len(), g.end[k].len()) == (2, 1)).count();
            let b = (0..g.s).filter(|&k| (g.star[k].len(), g.end[k].len()) == (1, 2)).count();
            assert_eq!((a, b), l);
            assert_eq!(g.weighted_edge_count(), 3 * g.s);
        }
    }
    assert_eq!(series_graphs((2, 1), (1, 0)).len(), 2);
    assert!(series_graphs((2, 1), (0, 1)).is_empty());
}

#[test]
fn inputs_that_are_not_bialgebras_are_refused() {
    // so(3) with the dual Heisenberg cobracket breaks the cocycle condition
    let known = known_bialgebras_3d();
    let (alpha, beta) = (known[1].0.clone(), known[2].1.clone());
    assert!(!cocycle_holds(&alpha, &beta));
    let err = build_star(&alpha, &beta, (1, 0), table(), &Rescaling::new()).unwrap_err();
    assert!(matches!(err, QuantizeError::NotBialgebra(_)));
}

#[test]
fn missing_weights_are_named() {
    let (alpha, beta) = example_bialgebra();
    let empty = WeightTable::new(PROFILE_ID, WeightConvention::LabelSign, 1, 0);
    assert!(matches!(build_star(&alpha, &beta, (1, 0), &empty, &Rescaling::new()), Err(QuantizeError::MissingWeight(_))));
}

#[test]
fn weight_tables_round_trip_and_refuse_mixed_profiles() {
    let t = table();
    let back = WeightTable::from_text(&t.to_text()).unwrap();
    assert_eq!(back.entries.len(), t.entries.len());
    assert_eq!(back.profile, t.profile);
    assert_eq!(back.to_text(), t.to_text());
    let mut other = WeightTable::new("another-profile", WeightConvention::LabelSign, 1, 10);
    assert!(matches!(other.merge(t), Err(QuantizeError::MixedProfiles(_, _))));
    let mut literal = WeightTable::new(PROFILE_ID, WeightConvention::Literal, 1, 10);
    assert!(literal.merge(t).is_err());
    let mixed = format!("{}# profile another-profile\n", t.to_text());
    assert!(matches!(WeightTable::from_text(&mixed), Err(QuantizeError::MixedProfiles(_, _))));
    assert!(matches!(WeightTable::from_text("# profile p\nkey 1 2\n"), Err(QuantizeError::Parse { line: 2, .. })));
    assert!(WeightTable::from_text("# profile p\n").is_err());
    assert_eq!(t.eps_values(), vec![0.1, 0.05, 0.025, 0.0]);
}

#[test]
fn verdicts_follow_the_three_sigma_rule() {
    let comp = |pairs: &[(&str, i64)]| -> DefectComponent { pairs.iter().map(|(v, c)| (vec![v.to_string()], q(*c))).collect() };
    let values: BTreeMap<String, WeightValue> =
        [("a".to_string(), WeightValue { value: 0.5, stderr: 0.01 }), ("b".to_string(), WeightValue { value: 0.5, stderr: 0.01 })]
            .into_iter()
            .collect();
    let key = || (vec![Monomial::new(vec![0, 0])], vec![Monomial::new(vec![0, 0])]);
    let cancel: BTreeMap<_, _> = [(key(), comp(&[("a", 1), ("b", -1)]))].into_iter().collect();
    assert_eq!(judge(&cancel, &values).0, Verdict::ZeroWithin3Sigma);
    let off: BTreeMap<_, _> = [(key(), comp(&[("a", 1), ("b", 1)]))].into_iter().collect();
    assert_eq!(judge(&off, &values).0, Verdict::Violation);
    assert_eq!(judge(&BTreeMap::new(), &values).0, Verdict::ExactZero);
    assert!(trend_toward_zero(&[(0.1, 0.3, 0.01), (0.05, 0.2, 0.01), (0.025, 0.1, 0.01)]));
    assert!(!trend_toward_zero(&[(0.1, 0.1, 0.01), (0.05, 0.3, 0.01)]));
    assert_eq!(Axiom::Compatibility.name(), "compatibility");
}
