use std::collections::BTreeMap;

use freefield::fock::{
    apply, character, graded_dimension, normal_form, normal_form_by_transpositions, FockSpace,
    FockVector, Gen, ModuleLabel, WeylElement,
};
use freefield::{algebra, AlgebraType, FormLabel, Scalar};
use proptest::prelude::*;

fn a1_weyl() -> FockSpace {
    FockSpace::weyl(&algebra(AlgebraType::A1))
}

fn a1_full() -> FockSpace {
    let alg = algebra(AlgebraType::A1);
    let form = alg.inner_product(FormLabel::Kappa0).gram_on_h;
    FockSpace::wakimoto(&alg, form)
}

#[test]
fn commutator_is_inserted() {
    let w = WeylElement::word(&[Gen::a(0, 0), Gen::astar(0, 0)], Scalar::one());
    let mut want = WeylElement::word(&[Gen::astar(0, 0), Gen::a(0, 0)], Scalar::one());
    want.add_word(vec![], Scalar::one());
    assert_eq!(normal_form(&a1_weyl(), &w), want);
}

#[test]
fn commuting_annihilators_are_sorted() {
    let w = WeylElement::word(&[Gen::a(0, 0), Gen::a(0, 1)], Scalar::int(3));
    let nf = normal_form(&a1_weyl(), &w);
    assert_eq!(nf, WeylElement::word(&[Gen::a(0, 1), Gen::a(0, 0)], Scalar::int(3)));
}

#[test]
fn heisenberg_commutator_uses_the_pairing() {
    let w = WeylElement::word(&[Gen::b(0, 1), Gen::b(0, -1)], Scalar::one());
    let mut want = WeylElement::word(&[Gen::b(0, -1), Gen::b(0, 1)], Scalar::one());
    want.add_word(vec![], Scalar::int(2));
    assert_eq!(normal_form(&a1_full(), &w), want);
}

#[test]
fn actions_on_highest_vectors() {
    let sp = a1_full();
    let vac = FockVector::vacuum(1);
    let w = WeylElement::word(&[Gen::a(0, 0)], Scalar::one());
    assert!(apply(&sp, &w, &vac).unwrap().is_zero());

    let lam = Scalar::k().add(&Scalar::int(3));
    let hv = FockVector::highest(vec![lam.clone()]);
    let b0 = WeylElement::word(&[Gen::b(0, 0)], Scalar::one());
    assert_eq!(apply(&sp, &b0, &hv).unwrap(), hv.scale(&lam));

    let v = FockVector::monomial(1, &[Gen::a(0, -1)], Scalar::one());
    let a1 = WeylElement::word(&[Gen::a(0, 1)], Scalar::one());
    // a_1 a_{-1}|0> = [a_1, a_{-1}]|0> = 0 since [a,a] = 0; a*_1 is the contraction partner.
    assert!(apply(&sp, &a1, &v).unwrap().is_zero());
    let s1 = WeylElement::word(&[Gen::astar(0, 1)], Scalar::one());
    assert_eq!(apply(&sp, &s1, &v).unwrap(), vac.scale(&Scalar::int(-1)));
    let v2 = FockVector::monomial(1, &[Gen::astar(0, -1)], Scalar::one());
    assert_eq!(apply(&sp, &a1, &v2).unwrap(), vac);
}

#[test]
fn b_words_need_a_heisenberg_factor() {
    let w = WeylElement::word(&[Gen::b(0, 1)], Scalar::one());
    assert!(apply(&a1_weyl(), &w, &FockVector::vacuum(1)).is_err());
}

#[test]
fn graded_dimensions() {
    let alg = algebra(AlgebraType::A1);
    // Degree-one creators: a*_{-1}, b_{-1}, a_{-1}, one per weight.
    let gens: Vec<Gen> = freefield::fock::creation_generators(&alg, ModuleLabel::Wakimoto, 1)
        .into_iter()
        .filter(|g| g.degree() == 1)
        .collect();
    let mut by_weight = BTreeMap::new();
    for g in &gens {
        *by_weight.entry(g.weight(&alg)).or_insert(0) += 1;
    }
    assert_eq!(by_weight, BTreeMap::from([(vec![-1], 1), (vec![0], 1), (vec![1], 1)]));
    // The full component also contains products with powers of a*_0.
    let t = character(&alg, ModuleLabel::Wakimoto, 1, 2);
    assert_eq!(t.get(&(1, vec![1])), Some(&1));
    assert_eq!(t.get(&(1, vec![0])), Some(&2));
    assert_eq!(t.get(&(1, vec![-1])), Some(&3));
    for depth in 0..=2 {
        assert_eq!(graded_dimension(&alg, ModuleLabel::Weyl, 0, &[-depth]), 1);
    }
    assert_eq!(graded_dimension(&alg, ModuleLabel::Heisenberg, 4, &[0]), 5);
}

#[test]
fn primed_weyl_module_shifts_the_vacuum_conditions() {
    let alg = algebra(AlgebraType::A1);
    let t = character(&alg, ModuleLabel::WeylPrimed, 0, 3);
    // a_{α,0} is a creator for M'_g, and a*_{α,0} is not.
    assert_eq!(t.get(&(0, vec![1])), Some(&1));
    assert_eq!(t.get(&(0, vec![-1])), None);
}

#[test]
fn fock_json_round_trip() {
    let v = FockVector::monomial(1, &[Gen::a(0, -2), Gen::astar(0, 0), Gen::b(0, -1)], "1/(k+2)".parse().unwrap());
    let j = v.to_json();
    assert_eq!(j[0]["monomial"][0], serde_json::json!(["a", 1, -2]));
    assert_eq!(FockVector::from_json(&j, vec![Scalar::zero()]).unwrap(), v);
}

fn gen_strategy() -> impl Strategy<Value = Gen> {
    (0..3u8, -2..=2i32).prop_map(|(f, m)| match f {
        0 => Gen::a(0, m),
        1 => Gen::astar(0, m),
        _ => Gen::b(0, m),
    })
}

fn element_strategy() -> impl Strategy<Value = WeylElement> {
    prop::collection::vec((prop::collection::vec(gen_strategy(), 0..5), -3..=3i64), 1..4).prop_map(|ws| {
        let mut e = WeylElement::zero();
        for (w, c) in ws {
            e.add_word(w, Scalar::int(c));
        }
        e
    })
}

fn vector_strategy() -> impl Strategy<Value = FockVector> {
    let creator = (0..3u8, 0..3i32).prop_map(|(f, d)| match f {
        0 => Gen::a(0, -1 - d),
        1 => Gen::astar(0, -d),
        _ => Gen::b(0, -1 - d),
    });
    prop::collection::vec((prop::collection::vec(creator, 0..4), 1..=3i64), 1..4).prop_map(|ts| {
        let mut v = FockVector::highest(vec![Scalar::int(2)]);
        v.poly = Default::default();
        for (gens, c) in ts {
            let t = FockVector::monomial(1, &gens, Scalar::int(c));
            v.poly.add_assign(&t.poly);
        }
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_matches_transposition_oracle(w in element_strategy()) {
        let sp = a1_full();
        prop_assert_eq!(normal_form(&sp, &w), normal_form_by_transpositions(&sp, &w));
    }

    #[test]
    fn normal_form_is_idempotent(w in element_strategy()) {
        let sp = a1_full();
        let once = normal_form(&sp, &w);
        prop_assert_eq!(normal_form(&sp, &once), once);
    }

    #[test]
    fn normal_form_respects_products(x in element_strategy(), y in element_strategy()) {
        let sp = a1_full();
        let lhs = normal_form(&sp, &x.times(&y));
        let rhs = normal_form(&sp, &normal_form(&sp, &x).times(&normal_form(&sp, &y)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn action_composes(x in element_strategy(), y in element_strategy(), v in vector_strategy()) {
        let sp = a1_full();
        let lhs = apply(&sp, &x.times(&y), &v).unwrap();
        let rhs = apply(&sp, &x, &apply(&sp, &y, &v).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn weights_are_additive_under_the_action() {
    let alg = algebra(AlgebraType::A2);
    let sp = FockSpace::weyl(&alg);
    let v = FockVector::monomial(2, &[Gen::astar(2, 0), Gen::a(0, -1)], Scalar::one());
    let w = WeylElement::word(&[Gen::a(2, 0)], Scalar::one());
    let r = apply(&sp, &w, &v).unwrap();
    let mut seen = BTreeMap::new();
    for wt in r.weights(&alg) {
        seen.insert(wt, ());
    }
    assert_eq!(seen.keys().cloned().collect::<Vec<_>>(), vec![vec![1, 0]]);
}

#[test]
fn wakimoto_character_matches_verma() {
    use freefield::fock::{character_window, product_formula, real_root_factors, verma_factors};
    for kind in [AlgebraType::A1, AlgebraType::A2, AlgebraType::B2] {
        let alg = algebra(kind);
        let (d, depth) = (5, 5);
        let slack = character_window(&alg, d, depth);
        let fock = character(&alg, ModuleLabel::Wakimoto, d, depth);
        let verma = product_formula(alg.rank, &verma_factors(&alg, d), d, depth, slack);
        assert_eq!(fock, verma, "{kind}");
        let weyl = character(&alg, ModuleLabel::Weyl, d, depth);
        let real = product_formula(alg.rank, &real_root_factors(&alg, d), d, depth, slack);
        assert_eq!(weyl, real, "{kind}");
    }
}
