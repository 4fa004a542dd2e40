use std::sync::Arc;

use proptest::prelude::*;

use cantor_towers::findyn::{self, EquivariantMap, FiniteSystem, MorphismSearch};

fn permutation(max: usize) -> impl Strategy<Value = Vec<usize>> {
    (1..=max).prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())
}

/// A relation on `n` states where every state has 1 to 3 successors.
fn relation(max: usize) -> impl Strategy<Value = FiniteSystem> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::btree_set(0..n, 1..=3.min(n)), n).prop_map(move |succ| {
            let pairs = succ.iter().enumerate().flat_map(|(x, s)| s.iter().map(move |&y| (x, y)));
            FiniteSystem::relation(n, pairs.collect::<Vec<_>>()).unwrap()
        })
    })
}

// Oracle: every assignment, in lexicographic order.
fn brute_force(source: &FiniteSystem, target: &FiniteSystem, surjective: bool) -> Vec<Vec<usize>> {
    let (n, m) = (source.len(), target.len());
    let mut out = Vec::new();
    let mut a = vec![0; n];
    loop {
        if source.edges().all(|(x, y)| target.has_edge(a[x], a[y])) && (!surjective || (0..m).all(|t| a.contains(&t))) {
            out.push(a.clone());
        }
        let Some(i) = (0..n).rev().find(|&i| a[i] + 1 < m) else {
            return out;
        };
        a[i] += 1;
        a[i + 1..].iter_mut().for_each(|v| *v = 0);
    }
}

fn order_by_iteration(p: &[usize]) -> u64 {
    let mut cur = p.to_vec();
    let mut k = 1;
    while cur.iter().enumerate().any(|(x, &y)| x != y) {
        cur = cur.iter().map(|&y| p[y]).collect();
        k += 1;
    }
    k
}

proptest! {
    #[test]
    fn order_matches_iteration(p in permutation(9)) {
        let sys = FiniteSystem::permutation(p.clone()).unwrap();
        let dec = findyn::cycle_decomposition(&sys).unwrap();
        prop_assert_eq!(dec.order(), order_by_iteration(&p));
        prop_assert_eq!(dec.lengths().iter().sum::<usize>(), p.len());
        for c in dec.cycles() {
            prop_assert_eq!(c[0], *c.iter().min().unwrap());
            for w in c.windows(2) {
                prop_assert_eq!(p[w[0]], w[1]);
            }
        }
    }

    #[test]
    fn search_matches_brute_force(src in relation(4), tgt in relation(3), surjective in any::<bool>()) {
        let got = MorphismSearch::new(&src, &tgt).surjective(surjective).run();
        prop_assert_eq!(got, brute_force(&src, &tgt, surjective));
    }

    #[test]
    fn search_on_permutations_matches_brute_force(p in permutation(5), q in permutation(4)) {
        let src = FiniteSystem::permutation(p).unwrap();
        let tgt = FiniteSystem::permutation(q).unwrap();
        let all = brute_force(&src, &tgt, true);
        prop_assert_eq!(MorphismSearch::new(&src, &tgt).surjective(true).run(), all.clone());
        prop_assert_eq!(findyn::has_surjection(&src, &tgt).unwrap(), !all.is_empty());
    }

    #[test]
    fn found_maps_are_equivariant(p in permutation(6), q in permutation(4)) {
        let src = Arc::new(FiniteSystem::permutation(p).unwrap());
        let tgt = Arc::new(FiniteSystem::permutation(q).unwrap());
        for f in findyn::find_equivariant_maps(&src, &tgt, false, 50) {
            prop_assert!(findyn::is_equivariant(&f));
        }
    }

    #[test]
    fn product_cycles_follow_gcd_and_lcm(a in 1usize..8, b in 1usize..8) {
        let (z, px, py) = findyn::product(&Arc::new(FiniteSystem::cycle(a)), &Arc::new(FiniteSystem::cycle(b))).unwrap();
        let g = (1..=a.min(b)).rev().find(|d| a % d == 0 && b % d == 0).unwrap();
        let lengths = findyn::cycle_decomposition(&z).unwrap().lengths();
        prop_assert_eq!(lengths, vec![a * b / g; g]);
        prop_assert!(px.is_equivariant() && px.is_surjective() && py.is_equivariant() && py.is_surjective());
    }

    #[test]
    fn phi_k_matches_divisibility(p in permutation(8), k in 1usize..5) {
        let sys = FiniteSystem::permutation(p).unwrap();
        let lengths = findyn::cycle_decomposition(&sys).unwrap().lengths();
        let w = findyn::phi_k_holds(&sys, k).unwrap();
        prop_assert_eq!(w.is_some(), lengths.iter().all(|l| l % k == 0));
        if let Some(blocks) = w {
            let images = sys.permutation_images().unwrap();
            for (i, b) in blocks.iter().enumerate() {
                let mut img: Vec<_> = b.iter().map(|&x| images[x]).collect();
                img.sort_unstable();
                prop_assert_eq!(&img, &blocks[(i + 1) % k]);
            }
        }
    }

    #[test]
    fn json_round_trip(p in permutation(7), r in relation(5)) {
        let sys = FiniteSystem::permutation(p).unwrap();
        prop_assert_eq!(FiniteSystem::from_json(&sys.to_json()).unwrap(), sys);
        prop_assert_eq!(FiniteSystem::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn composition_of_surjections_is_surjective(p in permutation(6)) {
        let x = Arc::new(FiniteSystem::permutation(p).unwrap());
        let point = EquivariantMap::to_point(x.clone());
        let id = EquivariantMap::identity(x);
        let both = id.then(&point).unwrap();
        prop_assert!(both.is_surjective() && both.is_equivariant());
    }
}

#[test]
fn wandering_states_on_a_tail_into_a_cycle() {
    // 0 → 1 → 2 → 3 → 2
    let sys = FiniteSystem::relation(4, [(0, 1), (1, 2), (2, 3), (3, 2)]).unwrap();
    assert_eq!(findyn::wandering_states(&sys), vec![0, 1]);
}
