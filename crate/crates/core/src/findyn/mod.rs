//! Finite dynamical systems: the finite stages a Cantor system is built from.
//!
//! A [`FiniteSystem`] carries either a permutation or a successor relation in
//! which every state has at least one successor. Maps between systems are
//! [`EquivariantMap`]s; the mixed case (permutation source, relation target) is
//! the one the spiral levels need.

mod cycles;
mod export;
mod map;
mod search;
mod system;

pub use cycles::{
    cycle_decomposition, has_surjection, phi_k_holds, product, wandering_states, CycleDecomposition,
};
pub use map::EquivariantMap;
pub use search::{find_equivariant_maps, MorphismSearch};
pub use system::{Dynamics, FiniteSystem, Kind, StateId};

/// `map.is_equivariant()`, as a free function.
pub fn is_equivariant(map: &EquivariantMap) -> bool {
    map.is_equivariant()
}

/// All cycle types (integer partitions, parts nonincreasing) of `n`, in
/// lexicographically decreasing order: `[n], [n-1, 1], …, [1, …, 1]`.
pub fn cycle_types(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            go(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (1..=8).map(|n| cycle_types(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15, 22]);
        assert_eq!(cycle_types(3), vec![vec![3], vec![2, 1], vec![1, 1, 1]]);
    }
}
