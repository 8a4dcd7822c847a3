use std::time::Instant;

use freefield::fock::{FockVector, Gen};
use freefield::poly::MPoly;
use freefield::scalar::{q, Q};
use freefield::wakimoto::*;
use freefield::{algebra, AlgebraType, FormLabel, Scalar};

fn y(i: usize) -> YPoly {
    MPoly::var(i)
}

#[test]
fn sl2_vector_fields() {
    let alg = algebra(AlgebraType::A1);
    let e = big_cell_action(&alg, &alg.basis_vec::<Q>(0)).unwrap();
    let h = big_cell_action(&alg, &alg.basis_vec::<Q>(1)).unwrap();
    let f = big_cell_action(&alg, &alg.basis_vec::<Q>(2)).unwrap();
    assert_eq!(e.comps, vec![YPoly::constant(q(1))]);
    assert_eq!(h.comps, vec![y(0).scale(&q(-2))]);
    assert_eq!(f.comps, vec![y(0).pow(2).scale(&q(-1))]);
    let r = right_action(&alg, &alg.basis_vec::<Q>(0)).unwrap();
    assert_eq!(r, e);
}

#[test]
fn realizations_all_types() {
    for kind in [AlgebraType::A1, AlgebraType::A2, AlgebraType::B2, AlgebraType::G2] {
        let alg = algebra(kind);
        let t = Instant::now();
        let w = realize(&alg, &FormLabel::Generic(Scalar::k())).unwrap();
        let bad = w.verify_ope().unwrap();
        println!("{kind}: c = {:?} ({:?})", w.constants.iter().map(|c| c.to_string()).collect::<Vec<_>>(), t.elapsed());
        assert!(bad.is_empty(), "{kind}: {bad:?}");
    }
}

#[test]
fn sl2_formulas() {
    let alg = algebra(AlgebraType::A1);
    let w = realize(&alg, &FormLabel::Generic(Scalar::k())).unwrap();
    assert_eq!(w.constants, vec![Scalar::int(-2)]);
    let st = |g: &[Gen], c: Scalar| FockVector::monomial(1, g, c);
    assert_eq!(w.images[0], st(&[Gen::a(0, -1)], Scalar::one()));
    assert_eq!(w.images[1], st(&[Gen::astar(0, 0), Gen::a(0, -1)], Scalar::int(-2)).plus(&st(&[Gen::b(0, -1)], Scalar::one())));
    let f = st(&[Gen::astar(0, 0), Gen::astar(0, 0), Gen::a(0, -1)], Scalar::int(-1))
        .plus(&st(&[Gen::astar(0, -1)], Scalar::k()))
        .plus(&st(&[Gen::astar(0, 0), Gen::b(0, -1)], Scalar::one()));
    assert_eq!(w.images[2], f);
}

#[test]
fn a1_sugawara() {
    let alg = algebra(AlgebraType::A1);
    let w = realize(&alg, &FormLabel::Generic(Scalar::k())).unwrap();
    let s = w.segal_sugawara().unwrap();
    assert_eq!(s, w.segal_sugawara_closed_form().unwrap());
    println!("{s}");
    let wc = realize(&alg, &FormLabel::KappaC).unwrap();
    assert!(wc.verify_quasi_conformal(3).unwrap().is_empty());
}

fn s(n: i64) -> Scalar {
    Scalar::int(n)
}

#[test]
fn correction_constants() {
    for (kind, c) in [(AlgebraType::A2, vec![-3, -2]), (AlgebraType::B2, vec![-3, -2]), (AlgebraType::G2, vec![-12, -2])] {
        let w = realize(&algebra(kind), &FormLabel::Generic(Scalar::k())).unwrap();
        assert_eq!(w.constants, c.into_iter().map(s).collect::<Vec<_>>(), "{kind}");
    }
}

#[test]
fn f_one_on_a_minus_one() {
    let alg = algebra(AlgebraType::A1);
    let w = realize(&alg, &FormLabel::Generic(Scalar::k())).unwrap();
    let v = FockVector { lambda: vec![s(-2)], poly: FockVector::monomial(1, &[Gen::a(0, -1)], s(1)).poly };
    let out = w.act(alg.f(0), 1, &v).unwrap();
    assert_eq!(out, FockVector::highest(vec![s(-2)]).scale(&Scalar::k().add(&s(2))));
}

#[test]
fn highest_weight_vectors() {
    let alg = algebra(AlgebraType::A1);
    let w = realize(&alg, &FormLabel::Generic(Scalar::k())).unwrap();
    for lam in [Scalar::int(0), Scalar::int(3), Scalar::frac(-1, 2), Scalar::k()] {
        let v = FockVector::highest(vec![lam.clone()]);
        for n in 0..3 {
            assert!(w.act(alg.e(0), n, &v).unwrap().is_zero());
            assert!(w.act(alg.f(0), n + 1, &v).unwrap().is_zero());
            assert!(w.act(alg.h(0), n + 1, &v).unwrap().is_zero());
        }
        assert_eq!(w.act(alg.h(0), 0, &v).unwrap(), v.scale(&lam));
        // L₀ = λ(λ+2)/(4(k+2)) from the Segal–Sugawara field.
        let sug = w.segal_sugawara().unwrap();
        let l0 = freefield::ope::field_mode(&w.space, &sug, 1, &v).unwrap();
        let expected = lam.mul(&lam.add(&s(2))).div(&Scalar::k().add(&s(2)).mul(&s(4))).unwrap();
        assert_eq!(l0, v.scale(&expected));
    }
}

#[test]
fn injective_on_low_degrees() {
    let alg = algebra(AlgebraType::A1);
    let w = realize(&alg, &FormLabel::Generic(Scalar::k())).unwrap();
    for (words, rank) in w.injectivity_ranks(3).unwrap() {
        assert_eq!(words, rank);
    }
    let wc = realize(&alg, &FormLabel::KappaC).unwrap();
    for (words, rank) in wc.injectivity_ranks(2).unwrap() {
        assert_eq!(words, rank);
    }
}

#[test]
fn left_and_right_actions_commute() {
    for kind in [AlgebraType::A1, AlgebraType::A2] {
        let alg = algebra(kind);
        let w = realize(&alg, &FormLabel::Generic(Scalar::int(1))).unwrap();
        let vs = basis_vectors(&alg, false, 2, 1, vec![s(0); alg.rank]);
        assert!(w.verify_left_right(2, &vs).unwrap(), "{kind}");
    }
}

#[test]
fn mode_relations_small_suites() {
    let a1 = algebra(AlgebraType::A1);
    let w = realize(&a1, &FormLabel::Generic(Scalar::k())).unwrap();
    let rep = w.verify_modes(2, &basis_vectors(&a1, true, 2, 1, vec![Scalar::k()])).unwrap();
    assert!(rep.passed() && rep.checked > 0, "{:?}", rep.failures);
    for kind in [AlgebraType::A2, AlgebraType::B2, AlgebraType::G2] {
        let alg = algebra(kind);
        let w = realize(&alg, &FormLabel::Generic(s(1))).unwrap();
        let rep = w.verify_modes(1, &basis_vectors(&alg, true, 1, 0, vec![s(0); alg.rank])).unwrap();
        assert!(rep.passed(), "{kind}: {:?}", rep.failures);
    }
}

#[test]
fn critical_module_with_character() {
    // b_{0,n} acts on W_χ(t) by χ_n; the affine relations still hold at κ_c.
    let alg = algebra(AlgebraType::A1);
    let wc = realize(&alg, &FormLabel::KappaC).unwrap();
    let chi = vec![vec![(0, Scalar::int(3)), (-1, Scalar::frac(1, 2)), (-2, Scalar::int(-1)), (1, Scalar::int(2))]];
    let module = WakimotoRealization { space: critical_module_space(&alg, &chi), ..wc };
    let vs = basis_vectors(&alg, false, 2, 1, vec![s(0)]);
    let rep = module.verify_modes(2, &vs).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures);
    let v = FockVector::vacuum(1);
    assert_eq!(module.act(alg.h(0), 0, &v).unwrap(), v.scale(&s(3)));
}
