use num_bigint::BigUint;
use proptest::prelude::*;
use univnc::identity::{assign_ids, cantor_pair, cantor_tuple_u64, cantor_unpair, cantor_untuple, NodeId};

fn prefix_free_naive(ids: &[NodeId]) -> bool {
    ids.iter().enumerate().all(|(i, a)| ids.iter().enumerate().all(|(j, b)| i == j || !b.bits().starts_with(a.bits())))
}

proptest! {
    #[test]
    fn random_joins_stay_prefix_free(parents in prop::collection::vec(any::<prop::sample::Index>(), 1..60)) {
        let mut reg = assign_ids(&0usize, &[0], &[]);
        for (k, p) in parents.iter().enumerate() {
            let parent = p.index(k + 1);
            reg.assign_new(&parent, k + 1).unwrap();
        }
        let ids = reg.ids();
        prop_assert!(reg.is_prefix_free());
        prop_assert!(prefix_free_naive(&ids));
        let distinct: std::collections::BTreeSet<_> = ids.iter().map(|i| i.bits().to_string()).collect();
        prop_assert_eq!(distinct.len(), ids.len());
    }

    #[test]
    fn pairing_is_a_bijection(x in any::<u64>(), y in any::<u64>()) {
        let (bx, by) = (BigUint::from(x), BigUint::from(y));
        prop_assert_eq!(cantor_unpair(&cantor_pair(&bx, &by)), (bx, by));
    }

    #[test]
    fn tuples_round_trip(v in prop::collection::vec(any::<u32>(), 1..=5)) {
        let wide: Vec<u64> = v.iter().map(|&x| u64::from(x)).collect();
        let n = cantor_tuple_u64(&wide).unwrap();
        let back = cantor_untuple(&n, wide.len()).unwrap();
        prop_assert_eq!(back, wide.into_iter().map(BigUint::from).collect::<Vec<_>>());
    }
}

#[test]
fn pairing_matches_enumeration_order() {
    // Oracle: walk the diagonals x + y = d and count.
    let mut n = 0u32;
    for d in 0u32..30 {
        for y in 0..=d {
            let x = d - y;
            assert_eq!(cantor_pair(&BigUint::from(x), &BigUint::from(y)), BigUint::from(n));
            n += 1;
        }
    }
}

#[test]
fn layered_assignment_is_prefix_free() {
    // A small DAG: 0 → 1, 2; 1 → 3; 2 → 3, 4; 3 → 5.
    let nodes: Vec<u32> = (0..6).collect();
    let edges = [(0, 1), (0, 2), (1, 3), (2, 3), (2, 4), (3, 5)];
    let reg = assign_ids(&0, &nodes, &edges);
    assert_eq!(reg.len(), 6);
    assert!(prefix_free_naive(&reg.ids()));
}
