use freefield::lie::{algebra, build_algebra, AlgebraType, FormLabel};
use freefield::{q, Scalar, Q};

const ALL: [AlgebraType; 4] = [AlgebraType::A1, AlgebraType::A2, AlgebraType::B2, AlgebraType::G2];

#[test]
fn tabulated_data() {
    let a1 = algebra(AlgebraType::A1);
    assert_eq!(a1.rank, 1);
    assert_eq!(a1.cartan_matrix, vec![vec![2]]);
    assert_eq!(a1.positive_roots, vec![vec![1]]);
    assert_eq!(a1.exponents, vec![1]);
    assert_eq!(a1.dual_coxeter, 2);

    let a2 = algebra(AlgebraType::A2);
    assert_eq!(a2.positive_roots, vec![vec![1, 0], vec![0, 1], vec![1, 1]]);
    assert_eq!(a2.exponents, vec![1, 2]);
    assert_eq!(a2.dual_coxeter, 3);
    assert_eq!(a2.rho_covector, vec![q(1), q(1)]);

    let g2 = algebra(AlgebraType::G2);
    assert_eq!(g2.n_pos(), 6);
    assert_eq!(g2.exponents, vec![1, 5]);
    assert_eq!(g2.dual_coxeter, 4);
    assert_eq!(g2.dim(), 14);
    assert_eq!(algebra(AlgebraType::B2).dim(), 10);
}

#[test]
fn unsupported_algebra_is_rejected() {
    assert!("E8".parse::<AlgebraType>().is_err());
    assert!("a2".parse::<AlgebraType>().is_ok());
}

#[test]
fn every_algebra_verifies() {
    for kind in ALL {
        let alg = build_algebra(kind).unwrap();
        alg.verify().unwrap();
    }
}

#[test]
fn inner_product_examples() {
    let a1 = algebra(AlgebraType::A1);
    assert_eq!(a1.inner_product(FormLabel::KappaC).gram_on_h[0][0], Scalar::int(-4));
    assert_eq!(a1.inner_product(FormLabel::Kappa0).gram_on_h[0][0], Scalar::int(2));
    assert_eq!(a1.inner_product(FormLabel::Kappa0).ef_pairing[0], Scalar::int(1));
    let a2 = algebra(AlgebraType::A2);
    assert_eq!(a2.inner_product(FormLabel::KappaK).gram_on_h[0][0], Scalar::int(12));
}

#[test]
fn form_invariants_hold_for_all_types() {
    for kind in ALL {
        let alg = algebra(kind);
        let k0 = alg.inner_product(FormLabel::Kappa0);
        let kk = alg.inner_product(FormLabel::KappaK);
        let kc = alg.inner_product(FormLabel::KappaC);
        let roots = alg.critical_form_from_roots();
        let two_hv = Scalar::int(2 * alg.dual_coxeter);
        for a in 0..alg.dim() {
            for b in 0..alg.dim() {
                assert_eq!(kk.full[a][b], k0.full[a][b].mul(&two_hv));
                assert_eq!(kc.full[a][b], kk.full[a][b].mul(&Scalar::frac(-1, 2)));
                assert_eq!(Scalar::from_q(alg.killing(a, b)), kk.full[a][b]);
            }
        }
        for i in 0..alg.rank {
            for j in 0..alg.rank {
                assert_eq!(kc.gram_on_h[i][j], Scalar::from_q(roots[i][j].clone()));
            }
        }
    }
}

#[test]
fn sl2_triple_for_principal_nilpotent() {
    for kind in ALL {
        let alg = algebra(kind);
        let pm: Vec<Q> = alg.p_minus1();
        let pp: Vec<Q> = alg.p_1();
        let rho: Vec<Q> = alg.rho_vec();
        let two_rho: Vec<Q> = rho.iter().map(|x| x * q(2)).collect();
        assert_eq!(alg.bracket(&pp, &pm), two_rho);
        let hp = alg.bracket(&two_rho, &pp);
        assert_eq!(hp, pp.iter().map(|x| x * q(2)).collect::<Vec<_>>());
    }
}

#[test]
fn representation_round_trip() {
    for kind in ALL {
        let alg = algebra(kind);
        for a in 0..alg.dim() {
            let v: Vec<Q> = alg.basis_vec(a);
            assert_eq!(alg.from_matrix(&alg.to_matrix(&v)).unwrap(), v);
        }
    }
}

#[test]
fn json_dump_lists_structure_constants() {
    let j = algebra(AlgebraType::A2).to_json();
    assert_eq!(j["type"], "A2");
    assert_eq!(j["basis"].as_array().unwrap().len(), 8);
    assert!(!j["structure_constants"].as_array().unwrap().is_empty());
}
