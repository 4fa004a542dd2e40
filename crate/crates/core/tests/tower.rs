use proptest::prelude::*;

use cantor_towers::odometer::OdometerSpec;
use cantor_towers::tower::{self, ClopenSet, LevelPartition, Tower};

fn c8() -> Tower {
    OdometerSpec::constant(2).unwrap().tower(3).unwrap()
}

/// A partition of `0..8` from block labels.
fn partition(t: &Tower, level: usize, labels: &[usize]) -> LevelPartition {
    let mut blocks = vec![Vec::new(); 8];
    for (x, &b) in labels.iter().enumerate() {
        blocks[b].push(x);
    }
    blocks.retain(|b| !b.is_empty());
    LevelPartition::new(t, level, blocks).unwrap()
}

fn refines_by_labels(p: &[usize], q: &[usize]) -> bool {
    (0..p.len()).all(|x| (0..p.len()).all(|y| p[x] != p[y] || q[x] == q[y]))
}

proptest! {
    #[test]
    fn refinement_matches_labels(p in prop::collection::vec(0usize..4, 8), q in prop::collection::vec(0usize..4, 8)) {
        let t = c8();
        let (pp, qq) = (partition(&t, 2, &p), partition(&t, 2, &q));
        prop_assert_eq!(tower::refines(&pp, &qq, &t).unwrap(), refines_by_labels(&p, &q));
    }

    #[test]
    fn pullback_preserves_refinement(p in prop::collection::vec(0usize..2, 2)) {
        let t = c8();
        let mut blocks = vec![Vec::new(); 2];
        for (x, &b) in p.iter().enumerate() {
            blocks[b].push(x);
        }
        blocks.retain(|b| !b.is_empty());
        let low = LevelPartition::new(&t, 0, blocks).unwrap();
        let high = low.pullback(&t, 2).unwrap();
        prop_assert!(tower::refines(&high, &low, &t).unwrap());
        prop_assert!(tower::refines(&low, &high, &t).unwrap());
        prop_assert!(high.canonical(&t).unwrap().same_as(&low.canonical(&t).unwrap()));
    }

    #[test]
    fn clopen_period_matches_rotation(mask in 1u32..256) {
        let t = c8();
        let states: Vec<usize> = (0..8).filter(|x| mask >> x & 1 == 1).collect();
        let u = ClopenSet::new(&t, 2, states).unwrap();
        let rotate = |m: u32, k: u32| ((m << k) | (m >> (8 - k))) & 0xff;
        let expected = (1..=8).find(|&k| rotate(mask, k % 8) == mask).unwrap() as u64;
        prop_assert_eq!(tower::clopen_period(&t, &u).unwrap(), Some(expected));
    }
}

#[test]
fn composite_is_the_digit_drop() {
    let t = c8();
    assert_eq!(t.composite(2, 0).unwrap(), vec![0, 1, 0, 1, 0, 1, 0, 1]);
    assert_eq!(t.composite(1, 1).unwrap(), vec![0, 1, 2, 3]);
    assert!(t.composite(0, 1).is_err());
}

#[test]
fn star_depth_exceeding_the_tower_is_absent() {
    let t = OdometerSpec::constant(3).unwrap().tower(2).unwrap();
    let w = tower::property_star(&t, 2).unwrap().unwrap();
    assert_eq!(w.digits, vec![3, 3]);
    assert!(tower::property_star(&t, 3).unwrap().is_none());
}
