use std::sync::Arc;

use proptest::prelude::*;

use cantor_towers::findyn::{self, EquivariantMap, FiniteSystem};
use cantor_towers::fraisse::{self, AmalgamProblem};

fn shape(max: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=4, 1..=max)
}

/// A random surjection onto `w`, if the search finds any.
fn some_surjection(x: &Arc<FiniteSystem>, w: &Arc<FiniteSystem>, pick: usize) -> Option<EquivariantMap> {
    let all = findyn::find_equivariant_maps(x, w, true, 64);
    (!all.is_empty()).then(|| all[pick % all.len()].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn larger_amalgams_verify(w in shape(2), x in shape(3), y in shape(3), a in any::<usize>(), b in any::<usize>()) {
        let w = Arc::new(FiniteSystem::from_cycle_type(&w));
        let x = Arc::new(FiniteSystem::from_cycle_type(&x));
        let y = Arc::new(FiniteSystem::from_cycle_type(&y));
        let (Some(f), Some(g)) = (some_surjection(&x, &w, a), some_surjection(&y, &w, b)) else {
            return Ok(());
        };
        let p = AmalgamProblem::new(f, g).unwrap();
        let s = fraisse::amalgamate(&p).unwrap();
        prop_assert!(fraisse::verify_amalgam(&p, &s));
        prop_assert_eq!(AmalgamProblem::from_json(&p.to_json()).unwrap(), p);
    }
}

#[test]
fn chain_levels_divide_orders_and_realize_factors() {
    let schedule = [2, 3, 4];
    let t = fraisse::generic_chain(&schedule, 5).unwrap();
    assert_eq!(t.validate(), Ok(()));
    let orders: Vec<u64> = t.levels().iter().map(|l| findyn::cycle_decomposition(l).unwrap().order()).collect();
    for w in orders.windows(2) {
        assert_eq!(w[1] % w[0], 0, "{orders:?}");
    }
    for step in 1..t.len() {
        let bound = schedule[step.min(schedule.len()) - 1];
        let level = &t.levels()[step];
        for size in 1..=bound {
            for shape in findyn::cycle_types(size) {
                let target = Arc::new(FiniteSystem::from_cycle_type(&shape));
                let found = findyn::find_equivariant_maps(level, &target, true, 1);
                assert!(!found.is_empty(), "level {step} misses {shape:?}");
            }
        }
    }
}

#[test]
fn chain_is_deterministic() {
    let a = fraisse::generic_chain(&[2, 3], 4).unwrap();
    let b = fraisse::generic_chain(&[2, 3], 4).unwrap();
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn certificate_on_a_generic_chain() {
    let t = fraisse::generic_chain(&[2, 3, 4], 5).unwrap();
    let c = fraisse::not_special_certificate(&t, 2).unwrap();
    assert!(c.holds());
    assert_eq!(c.spirals.last().unwrap().wandering, 108);
}
