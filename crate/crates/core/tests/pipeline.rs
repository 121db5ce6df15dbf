use mixquiv::generators::{sigma_rs, DEFAULT_R_CAP};
use mixquiv::hat::{HatQuiver, Multidegree};
use mixquiv::paths::enumerate_cycles;
use mixquiv::perm::ClassIntervals;
use mixquiv::relations::{substitute_sigma_rs, verify_invariance, verify_vanishing};
use mixquiv::trstar::{contract, trstar_blocks, trstar_contract};
use mixquiv::{DimensionVector, PathElement, Permutation, PrimeField, Quiver, Rationals};
use proptest::prelude::*;

const QUIVER: &str = r#"{
    "vertices": 3, "ordinary": [3], "pairs": [[1, 2]],
    "arrows": [
        {"id": "x", "from": 1, "to": 1},
        {"id": "y", "from": 1, "to": 2},
        {"id": "z", "from": 2, "to": 1},
        {"id": "u", "from": 3, "to": 1},
        {"id": "v", "from": 1, "to": 3}
    ],
    "dims": {"1": 2, "2": 2, "3": 3}
}"#;

fn load() -> (Quiver, DimensionVector) {
    let (q, dv) = Quiver::from_json(QUIVER).unwrap();
    (q, dv.unwrap())
}

#[test]
fn json_quiver_to_relation_report() {
    let (q, dv) = load();
    let f1 = PathElement::parse(&q, "(x) + 2 (u v)").unwrap();
    let f2 = PathElement::parse(&q, "(y x)").unwrap();
    let f3 = PathElement::parse(&q, "(z)").unwrap();
    let e = substitute_sigma_rs(&q, Some(&f1), Some(&f2), Some(&f3), 3, 1, DEFAULT_R_CAP).unwrap();
    assert!(!e.is_zero());
    let field = PrimeField::mersenne61();
    let a = verify_vanishing(&field, &q, &e, &dv, 60, 11).unwrap();
    let b = verify_vanishing(&field, &q, &e, &dv, 60, 11).unwrap();
    assert!(a.passed(), "{:?}", a.witness);
    assert_eq!(a.to_json_stable(), b.to_json_stable());
    assert!(a.prob_bound > 0.0 && a.prob_bound < 1e-15);

    // below the dimension the same relation is a nonzero function
    let e2 = substitute_sigma_rs(&q, None, Some(&f2), Some(&f3), 2, 1, DEFAULT_R_CAP).unwrap();
    let r = verify_vanishing(&field, &q, &e2, &dv, 20, 3).unwrap();
    assert!(!r.passed());
    assert!(r.witness.is_some());
}

#[test]
fn cycles_of_the_json_quiver_are_invariant_over_the_rationals() {
    let (q, dv) = load();
    let field = Rationals::default();
    let cycles = enumerate_cycles(&q, 3, None);
    assert!(cycles.len() > 5);
    for c in cycles {
        let e = mixquiv::TraceExpression::cycle(c);
        assert!(verify_invariance(&field, &q, &e, &dv, 5, 2).unwrap().passed());
    }
}

#[test]
fn rejected_inputs_name_the_problem() {
    let bad = QUIVER.replace(r#""from": 3, "to": 1"#, r#""from": 4, "to": 1"#);
    assert!(Quiver::from_json(&bad).is_err());
    let (q, _) = load();
    assert!(PathElement::parse(&q, "(x y)").is_err());
    assert!(sigma_rs(3, 2, DEFAULT_R_CAP).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn contract_agrees_with_blocks_for_any_passive_set(
        seed in any::<u64>(),
        s in 0usize..3,
        t in 0usize..4,
        mask in any::<u8>(),
    ) {
        let r = t + 2 * s;
        prop_assume!(r > 0);
        let mut images: Vec<usize> = (0..r).collect();
        let mut x = seed;
        for i in (1..r).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            images.swap(i, (x >> 33) as usize % (i + 1));
        }
        let tau = Permutation::from_images(images).unwrap();
        let iv = ClassIntervals { t, s };
        let passive: Vec<usize> = (0..t).filter(|j| mask >> j & 1 == 1).collect();
        let a = contract(&tau, iv).unwrap();
        let b = trstar_blocks(&tau, &passive, iv).unwrap();
        prop_assert!(a.equivalent(&b));
        prop_assert!(a.uses_each_index_once(r));
    }

    #[test]
    fn admissible_words_become_closed_cycles(r in 1usize..5, k in 0usize..50) {
        let q = Quiver::loops(2);
        let rbar = Multidegree(vec![r, 1]);
        let hq = HatQuiver::build(&q, &rbar, None).unwrap();
        let perms = hq.admissibility_sets().admissible();
        let sigma = &perms[k % perms.len()];
        let w = trstar_contract(sigma, &hq).unwrap();
        let m = mixquiv::trstar::word_to_monomial(&w, &hq).unwrap();
        prop_assert_eq!(m.multidegree(2), vec![r, 1]);
    }
}
