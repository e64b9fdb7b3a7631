use mubcert::certify::verify_external;
use mubcert::constructions::{build_ab_decomposition, build_galois_decomposition, find_galois_subgroup};
use mubcert::io::{from_json, to_json, DecompositionFile, Metadata};
use mubcert::mub::{mub_family, pure_overlap, unbiased_vector_search};
use mubcert::residue::intersect_trivially;
use mubcert::subalgebra::{classify, commutant, phi, phi_inverse, sl2_pair_complementary};
use mubcert::weyl::PureState;
use mubcert::{Gl2Matrix, Prime, SubalgebraDesc, SubalgebraKind};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gl2() -> impl Strategy<Value = Gl2Matrix> {
    (prop::sample::select(vec![5u64, 7, 11, 13]), any::<[[i64; 2]; 2]>())
        .prop_filter_map("singular", |(n, e)| Gl2Matrix::new(e, Prime::new(n).unwrap()).ok())
}

fn sl2_pair() -> impl Strategy<Value = (Gl2Matrix, Gl2Matrix)> {
    let sl2 = |n: u64| {
        any::<[[i64; 2]; 2]>().prop_filter_map("not in SL2", move |e| {
            Gl2Matrix::new(e, Prime::new(n).unwrap()).ok().filter(Gl2Matrix::is_sl2)
        })
    };
    prop::sample::select(vec![5u64, 7, 11]).prop_flat_map(move |n| (sl2(n), sl2(n)))
}

proptest! {
    #[test]
    fn masa_iff_det_one(m in gl2()) {
        let s = phi(&m);
        prop_assert_eq!(classify(&s) == SubalgebraKind::Masa, m.is_sl2());
        prop_assert_eq!(phi_inverse(&s).unwrap(), m);
    }

    #[test]
    fn commutant_is_an_involution(m in gl2()) {
        let c = commutant(&m);
        prop_assert_eq!(commutant(&c), m);
        prop_assert_eq!((m.det() * c.det()).value(), 1);
    }

    #[test]
    fn determinant_test_matches_planes((a, b) in sl2_pair()) {
        prop_assert_eq!(sl2_pair_complementary(&a, &b).unwrap(), intersect_trivially(&phi(&a), &phi(&b)).unwrap());
    }

    #[test]
    fn pure_overlap_in_range(seed in any::<u64>(), n in prop::sample::select(vec![2u64, 3, 5])) {
        let p = Prime::new(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = PureState::random((n * n) as usize, &mut rng);
        let v = pure_overlap(&h, &SubalgebraDesc::product_factor0(p)).unwrap();
        let (lo, hi) = (1.0 / (n * n) as f64, 1.0 / n as f64);
        prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
    }
}

#[test]
fn file_round_trip_preserves_verdicts() {
    for n in [2u64, 3, 5, 7] {
        let p = Prime::new(n).unwrap();
        let h = find_galois_subgroup(p, 11, None).unwrap();
        let mut decs = vec![build_galois_decomposition(p, &h).unwrap()];
        if n > 2 {
            decs.push(build_ab_decomposition(p, None).unwrap());
        }
        for dec in decs {
            let before = verify_external(&dec);
            let text = to_json(&DecompositionFile::from_decomposition(&dec, Metadata::now(Some(11))));
            let back = from_json::<DecompositionFile>(&text).unwrap().to_decomposition().unwrap();
            assert_eq!(back, dec);
            assert_eq!(verify_external(&back), before);
        }
    }
}

#[test]
fn search_is_deterministic() {
    let p = Prime::new(3).unwrap();
    let fam = mub_family(&build_ab_decomposition(p, None).unwrap(), 2).unwrap();
    let a = unbiased_vector_search(&fam, 12, 99);
    let b = unbiased_vector_search(&fam, 12, 99);
    assert_eq!(a.best_residual.to_bits(), b.best_residual.to_bits());
    assert_eq!(a.best_vector, b.best_vector);
}
