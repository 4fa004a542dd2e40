use std::sync::Arc;

use num_integer::Integer;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::Result;
use crate::findyn::{EquivariantMap, FiniteSystem, StateId};

/// Orbits of a permutation system.
///
/// Each cycle starts at its least state and follows the permutation; cycles are
/// sorted by their least state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleDecomposition {
    cycles: Vec<Vec<StateId>>,
}

impl CycleDecomposition {
    pub fn cycles(&self) -> &[Vec<StateId>] {
        &self.cycles
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.cycles.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// lcm of the cycle lengths, or `None` on `u64` overflow.
    pub fn checked_order(&self) -> Option<u64> {
        self.cycles.iter().try_fold(1u64, |acc, c| {
            let len = c.len() as u64;
            let g = acc.gcd(&len);
            (acc / g).checked_mul(len)
        })
    }

    /// lcm of the cycle lengths.
    ///
    /// # Panics
    /// If the order does not fit in a `u64`.
    pub fn order(&self) -> u64 {
        self.checked_order().expect("permutation order overflows u64")
    }

    /// Index of the cycle containing each state, and the position within it.
    pub fn positions(&self, n: usize) -> Vec<(usize, usize)> {
        let mut pos = vec![(0, 0); n];
        for (ci, c) in self.cycles.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                pos[x] = (ci, i);
            }
        }
        pos
    }
}

pub fn cycle_decomposition(sys: &FiniteSystem) -> Result<CycleDecomposition> {
    let p = sys.require_permutation()?;
    let mut seen = vec![false; p.len()];
    let mut cycles = Vec::new();
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push(x);
            x = p[x];
        }
        cycles.push(cycle);
    }
    Ok(CycleDecomposition { cycles })
}

/// `X × Y` with coordinatewise dynamics, and the two coordinate projections.
///
/// State `(j, k)` has index `j * |Y| + k`.
pub fn product(
    x: &Arc<FiniteSystem>,
    y: &Arc<FiniteSystem>,
) -> Result<(Arc<FiniteSystem>, EquivariantMap, EquivariantMap)> {
    let px = x.require_permutation()?;
    let py = y.require_permutation()?;
    let (nx, ny) = (px.len(), py.len());
    let mut images = Vec::with_capacity(nx * ny);
    let mut labels = Vec::with_capacity(nx * ny);
    for j in 0..nx {
        for k in 0..ny {
            images.push(px[j] * ny + py[k]);
            labels.push(format!("({},{})", x.label(j), y.label(k)));
        }
    }
    let z = Arc::new(FiniteSystem::permutation_labelled(labels, images)?);
    let to_x = EquivariantMap::new(z.clone(), x.clone(), (0..nx * ny).map(|s| s / ny).collect())?;
    let to_y = EquivariantMap::new(z.clone(), y.clone(), (0..nx * ny).map(|s| s % ny).collect())?;
    Ok((z, to_x, to_y))
}

/// A partition of the states into `k` blocks `B_0, …, B_{k-1}` with
/// `σ(B_i) = B_{i+1 mod k}`, if one exists.
///
/// One exists iff `k` divides every cycle length. The witness puts the least
/// state of each cycle into `B_0`.
pub fn phi_k_holds(sys: &FiniteSystem, k: usize) -> Result<Option<Vec<Vec<StateId>>>> {
    assert!(k >= 1, "k must be positive");
    let dec = cycle_decomposition(sys)?;
    if dec.cycles.iter().any(|c| c.len() % k != 0) {
        return Ok(None);
    }
    let mut blocks = vec![Vec::new(); k];
    for c in &dec.cycles {
        for (i, &x) in c.iter().enumerate() {
            blocks[i % k].push(x);
        }
    }
    for b in &mut blocks {
        b.sort_unstable();
    }
    Ok(Some(blocks))
}

/// Whether some surjective equivariant map `source → target` exists, for
/// permutation systems.
///
/// Orbits map onto orbits, and a cycle of length `a` can map onto a cycle of
/// length `c` iff `c | a`. So a surjection exists iff every source cycle has some
/// target cycle length dividing its own, and every target cycle can be matched
/// to a distinct source cycle whose length it divides.
pub fn has_surjection(source: &FiniteSystem, target: &FiniteSystem) -> Result<bool> {
    let src = cycle_decomposition(source)?.lengths();
    let tgt = cycle_decomposition(target)?.lengths();
    if tgt.len() > src.len() || !src.iter().all(|a| tgt.iter().any(|c| a % c == 0)) {
        return Ok(false);
    }
    // Kuhn's augmenting paths: target cycles on the left.
    let mut owner: Vec<Option<usize>> = vec![None; src.len()];
    fn augment(
        t: usize,
        tgt: &[usize],
        src: &[usize],
        owner: &mut [Option<usize>],
        seen: &mut [bool],
    ) -> bool {
        for s in 0..src.len() {
            if src[s] % tgt[t] != 0 || seen[s] {
                continue;
            }
            seen[s] = true;
            if owner[s].is_none_or(|o| augment(o, tgt, src, owner, seen)) {
                owner[s] = Some(t);
                return true;
            }
        }
        false
    }
    for t in 0..tgt.len() {
        let mut seen = vec![false; src.len()];
        if !augment(t, &tgt, &src, &mut owner, &mut seen) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// States from which no path of length ≥ 1 returns to the state.
pub fn wandering_states(sys: &FiniteSystem) -> Vec<StateId> {
    let mut graph = DiGraph::<(), ()>::with_capacity(sys.len(), sys.edge_count());
    let nodes: Vec<_> = (0..sys.len()).map(|_| graph.add_node(())).collect();
    for (x, y) in sys.edges() {
        graph.add_edge(nodes[x], nodes[y], ());
    }
    let mut recurrent = vec![false; sys.len()];
    for scc in tarjan_scc(&graph) {
        let cyclic = scc.len() > 1 || {
            let x = scc[0].index();
            sys.has_edge(x, x)
        };
        if cyclic {
            for v in scc {
                recurrent[v.index()] = true;
            }
        }
    }
    (0..sys.len()).filter(|&x| !recurrent[x]).collect()
}
