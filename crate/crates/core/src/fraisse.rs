//! Joint embedding, amalgamation and generic chains for finite permutation systems.
//!
//! In the dual picture an embedding of clopen algebras is a surjective
//! equivariant map, so amalgamating `f: X → W` and `g: Y → W` means finding
//! `Z` with `h: Z → X`, `i: Z → Y` and `f∘h = g∘i`.

use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::findyn::{self, EquivariantMap, FiniteSystem, MorphismSearch, StateId};
use crate::spiral;
use crate::tower::{self, ClopenSet, Tower};

/// Apex size beyond which [`generic_chain`] gives up.
pub const DEFAULT_CHAIN_CAP: u128 = 200_000;

/// Two surjective equivariant maps `f: X → W` and `g: Y → W` of permutation systems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmalgamProblem {
    left: EquivariantMap,
    right: EquivariantMap,
}

/// `Z` with `h: Z → X` and `i: Z → Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmalgamSolution {
    pub apex: Arc<FiniteSystem>,
    pub h: EquivariantMap,
    pub i: EquivariantMap,
}

fn diagnose(name: &str, map: &EquivariantMap) -> Result<()> {
    for (side, sys) in [("source", map.source()), ("target", map.target())] {
        if !sys.is_permutation() {
            return Err(Error::InvalidMap(format!("{name} map: {side} is not a permutation system")));
        }
    }
    if let Some((x, y)) = map.source().edges().find(|&(x, y)| !map.target().has_edge(map.apply(x), map.apply(y))) {
        return Err(Error::InvalidMap(format!(
            "{name} map is not equivariant: {x} → {y} goes to {} → {}",
            map.apply(x),
            map.apply(y)
        )));
    }
    if let Some(w) = (0..map.target().len()).find(|&w| !map.assignment().contains(&w)) {
        return Err(Error::InvalidMap(format!("{name} map is not surjective: {w} has no preimage")));
    }
    Ok(())
}

impl AmalgamProblem {
    pub fn new(left: EquivariantMap, right: EquivariantMap) -> Result<Self> {
        if !Arc::ptr_eq(left.target(), right.target()) && **left.target() != **right.target() {
            return Err(Error::InvalidMap("left and right maps have different targets".into()));
        }
        diagnose("left", &left)?;
        diagnose("right", &right)?;
        Ok(AmalgamProblem { left, right })
    }

    pub fn base(&self) -> &Arc<FiniteSystem> {
        self.left.target()
    }

    /// `f: X → W`.
    pub fn left(&self) -> &EquivariantMap {
        &self.left
    }

    /// `g: Y → W`.
    pub fn right(&self) -> &EquivariantMap {
        &self.right
    }

    pub fn to_json(&self) -> String {
        let side = |m: &EquivariantMap| SideRepr {
            system: (**m.source()).clone(),
            map: m.assignment().to_vec(),
        };
        let repr = ProblemRepr {
            base: (**self.base()).clone(),
            left: side(&self.left),
            right: side(&self.right),
        };
        serde_json::to_string(&repr).expect("problems always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let repr: ProblemRepr = serde_json::from_str(s)?;
        let base = Arc::new(repr.base);
        let side = |s: SideRepr| EquivariantMap::new(Arc::new(s.system), base.clone(), s.map);
        AmalgamProblem::new(side(repr.left)?, side(repr.right)?)
    }
}

#[derive(Serialize, Deserialize)]
struct SideRepr {
    system: FiniteSystem,
    map: Vec<StateId>,
}

#[derive(Serialize, Deserialize)]
struct ProblemRepr {
    base: FiniteSystem,
    left: SideRepr,
    right: SideRepr,
}

#[derive(Serialize, Deserialize)]
struct SolutionRepr {
    apex: FiniteSystem,
    h: Vec<StateId>,
    i: Vec<StateId>,
}

impl AmalgamSolution {
    pub fn to_json(&self) -> String {
        let repr = SolutionRepr {
            apex: (*self.apex).clone(),
            h: self.h.assignment().to_vec(),
            i: self.i.assignment().to_vec(),
        };
        serde_json::to_string(&repr).expect("solutions always serialize")
    }

    /// Reads a solution whose maps land in the two sides of `p`.
    pub fn from_json(s: &str, p: &AmalgamProblem) -> Result<Self> {
        let repr: SolutionRepr = serde_json::from_str(s)?;
        let apex = Arc::new(repr.apex);
        Ok(AmalgamSolution {
            h: EquivariantMap::new(apex.clone(), p.left.source().clone(), repr.h)?,
            i: EquivariantMap::new(apex.clone(), p.right.source().clone(), repr.i)?,
            apex,
        })
    }
}

/// `X × Y` with both projections, checked surjective and equivariant.
pub fn jep(
    x: &Arc<FiniteSystem>,
    y: &Arc<FiniteSystem>,
) -> Result<(Arc<FiniteSystem>, EquivariantMap, EquivariantMap)> {
    let (z, px, py) = findyn::product(x, y)?;
    for p in [&px, &py] {
        if !(p.is_equivariant() && p.is_surjective()) {
            return Err(Error::InvalidMap("product projection failed its check".into()));
        }
    }
    Ok((z, px, py))
}

/// The cycle/lcm amalgam.
///
/// For each cycle `C` of `W`, with `p` cycles of `X` over `C` and `q` cycles of `Y`
/// over `C`, the apex gets `max(p, q)` cycles of length `m`, the lcm of all their
/// lengths. Apex cycle `r` wraps around the `(r mod p)`-th cycle of `X` from its
/// least state `x₀`, and around the `(r mod q)`-th cycle of `Y` from the least
/// state `y₀` of that cycle with `g(y₀) = f(x₀)`.
pub fn amalgamate(p: &AmalgamProblem) -> Result<AmalgamSolution> {
    let (f, g) = (&p.left, &p.right);
    let (x, y) = (f.source(), g.source());
    let tau = x.require_permutation()?;
    let pi = y.require_permutation()?;
    let base = findyn::cycle_decomposition(p.base())?;
    let (xc, yc) = (findyn::cycle_decomposition(x)?, findyn::cycle_decomposition(y)?);
    let base_cycle = base.positions(p.base().len());

    let mut images = Vec::new();
    let (mut h, mut i) = (Vec::new(), Vec::new());
    for c in 0..base.len() {
        let over = |cycles: &[Vec<StateId>], map: &EquivariantMap| -> Vec<Vec<StateId>> {
            cycles.iter().filter(|cy| base_cycle[map.apply(cy[0])].0 == c).cloned().collect()
        };
        let xs = over(xc.cycles(), f);
        let ys = over(yc.cycles(), g);
        let n = xs.len().max(ys.len());
        let m = xs.iter().chain(&ys).fold(1usize, |m, cy| m.lcm(&cy.len()));
        for r in 0..n {
            let x0 = xs[r % xs.len()][0];
            let w0 = f.apply(x0);
            let y0 = *ys[r % ys.len()]
                .iter()
                .filter(|&&s| g.apply(s) == w0)
                .min()
                .expect("an equivariant map from a cycle onto a cycle hits every state");
            let start = images.len();
            let (mut xt, mut yt) = (x0, y0);
            for t in 0..m {
                images.push(start + (t + 1) % m);
                h.push(xt);
                i.push(yt);
                xt = tau[xt];
                yt = pi[yt];
            }
        }
    }
    let apex = Arc::new(FiniteSystem::permutation(images)?);
    Ok(AmalgamSolution {
        h: EquivariantMap::new(apex.clone(), x.clone(), h)?,
        i: EquivariantMap::new(apex.clone(), y.clone(), i)?,
        apex,
    })
}

/// Both maps surjective and equivariant, and `f∘h = g∘i`, all checked state by state.
pub fn verify_amalgam(p: &AmalgamProblem, s: &AmalgamSolution) -> bool {
    let same = |a: &Arc<FiniteSystem>, b: &Arc<FiniteSystem>| Arc::ptr_eq(a, b) || **a == **b;
    if !s.apex.is_permutation()
        || !same(s.h.source(), &s.apex)
        || !same(s.i.source(), &s.apex)
        || !same(s.h.target(), p.left.source())
        || !same(s.i.target(), p.right.source())
    {
        return false;
    }
    s.h.is_equivariant()
        && s.i.is_equivariant()
        && s.h.is_surjective()
        && s.i.is_surjective()
        && (0..s.apex.len()).all(|z| p.left.apply(s.h.apply(z)) == p.right.apply(s.i.apply(z)))
}

/// A tower of permutation systems built from `C_1` by a fixed task queue.
///
/// Step `s` uses the bound `b = schedule[min(s, len) - 1]`. Its tasks, in order:
/// every cycle type of size `≤ b` must be a factor of the new top (otherwise
/// multiply by it), and every surjection `f: X → top` with `|X| ≤ b` must factor
/// through the bonding (otherwise amalgamate against it). A step that changes
/// nothing multiplies by `C_2` so that levels grow strictly.
pub fn generic_chain(schedule: &[usize], depth: usize) -> Result<Tower> {
    generic_chain_capped(schedule, depth, DEFAULT_CHAIN_CAP)
}

pub fn generic_chain_capped(schedule: &[usize], depth: usize, cap: u128) -> Result<Tower> {
    if depth == 0 {
        return Err(Error::Precondition("a chain has at least one level".into()));
    }
    if schedule.is_empty() || schedule.contains(&0) || schedule.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidSpec(format!(
            "schedule must be a nonempty nondecreasing list of positive sizes, got {schedule:?}"
        )));
    }
    let mut chain = Tower::single(Arc::new(FiniteSystem::cycle(1))).cantor(true);
    for step in 1..depth {
        let bound = schedule[step.min(schedule.len()) - 1];
        let top = chain.top().clone();
        let mut down = EquivariantMap::identity(top.clone());
        let check_cap = |z: &FiniteSystem| {
            if z.len() as u128 > cap {
                Err(Error::ResourceCap {
                    what: "chain level".into(),
                    needed: z.len() as u128,
                    cap,
                })
            } else {
                Ok(())
            }
        };

        for size in 1..=bound {
            for shape in findyn::cycle_types(size) {
                let target = Arc::new(FiniteSystem::from_cycle_type(&shape));
                if !findyn::has_surjection(down.source(), &target)? {
                    let (z, to_current, _) = jep(down.source(), &target)?;
                    check_cap(&z)?;
                    down = to_current.then(&down)?;
                }
            }
        }

        for size in top.len()..=bound {
            for shape in findyn::cycle_types(size) {
                let x = Arc::new(FiniteSystem::from_cycle_type(&shape));
                for f in findyn::find_equivariant_maps(&x, &top, true, usize::MAX) {
                    if factors_through(&down, &f) {
                        continue;
                    }
                    let sol = amalgamate(&AmalgamProblem::new(f, down.clone())?)?;
                    check_cap(&sol.apex)?;
                    down = sol.i.then(&down)?;
                }
            }
        }

        if down.source().len() == top.len() {
            let (_, to_current, _) = jep(down.source(), &Arc::new(FiniteSystem::cycle(2)))?;
            down = to_current.then(&down)?;
        }
        chain.push(down)?;
    }
    Ok(chain)
}

/// Whether some surjective equivariant `q` has `f∘q = down`.
fn factors_through(down: &EquivariantMap, f: &EquivariantMap) -> bool {
    let fibers = {
        let mut fib = vec![Vec::new(); f.target().len()];
        for (x, &w) in f.assignment().iter().enumerate() {
            fib[w].push(x);
        }
        fib
    };
    let domains = down.assignment().iter().map(|&w| fibers[w].clone()).collect();
    MorphismSearch::new(down.source(), f.source())
        .surjective(true)
        .domains(domains)
        .first()
        .is_some()
}

/// Periodicity of the atoms of one chain level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelPeriods {
    pub level: usize,
    pub states: usize,
    pub order: u64,
    pub max_period: u64,
    pub periods_divide_order: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpiralWandering {
    pub n: usize,
    pub wandering: usize,
}

/// The chain side has no wandering atoms; the spiral side has plenty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotSpecialCertificate {
    pub chain: Vec<LevelPeriods>,
    pub spirals: Vec<SpiralWandering>,
}

impl NotSpecialCertificate {
    pub fn holds(&self) -> bool {
        self.chain.iter().all(|l| l.periods_divide_order) && self.spirals.iter().all(|s| s.wandering > 0)
    }
}

pub fn not_special_certificate(chain: &Tower, spiral_depth: usize) -> Result<NotSpecialCertificate> {
    if !chain.all_permutation() {
        return Err(Error::Precondition("the chain must have permutation levels".into()));
    }
    let mut levels = Vec::new();
    for (i, sys) in chain.levels().iter().enumerate() {
        let order = findyn::cycle_decomposition(sys)?
            .checked_order()
            .ok_or_else(|| Error::Precondition(format!("the order of level {i} overflows u64")))?;
        let mut max_period = 0;
        let mut divide = true;
        for x in 0..sys.len() {
            let period = tower::clopen_period(chain, &ClopenSet::new(chain, i, vec![x])?)?
                .expect("permutation levels have periods");
            max_period = max_period.max(period);
            divide &= order % period == 0;
        }
        levels.push(LevelPeriods {
            level: i,
            states: sys.len(),
            order,
            max_period,
            periods_divide_order: divide,
        });
    }
    let spirals = (1..=spiral_depth)
        .map(|n| {
            let level = spiral::build_level(n)?;
            Ok(SpiralWandering {
                n,
                wandering: spiral::wandering_points(&level).len(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(NotSpecialCertificate { chain: levels, spirals })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(s: FiniteSystem) -> Arc<FiniteSystem> {
        Arc::new(s)
    }

    fn problem(w: &Arc<FiniteSystem>, x: FiniteSystem, f: Vec<usize>, y: FiniteSystem, g: Vec<usize>) -> AmalgamProblem {
        let f = EquivariantMap::new(arc(x), w.clone(), f).unwrap();
        let g = EquivariantMap::new(arc(y), w.clone(), g).unwrap();
        AmalgamProblem::new(f, g).unwrap()
    }

    #[test]
    fn jep_examples() {
        let (z, px, py) = jep(&arc(FiniteSystem::cycle(2)), &arc(FiniteSystem::cycle(3))).unwrap();
        assert_eq!(findyn::cycle_decomposition(&z).unwrap().lengths(), vec![6]);
        assert!(px.is_surjective() && py.is_surjective());
        let (z, _, _) = jep(&arc(FiniteSystem::cycle(2)), &arc(FiniteSystem::cycle(2))).unwrap();
        assert_eq!(findyn::cycle_decomposition(&z).unwrap().lengths(), vec![2, 2]);
        let x = arc(FiniteSystem::from_cycle_type(&[3, 1]));
        let (z, px, _) = jep(&x, &arc(FiniteSystem::cycle(1))).unwrap();
        assert_eq!(z.permutation_images(), x.permutation_images());
        assert_eq!(px.assignment(), &[0, 1, 2, 3]);
    }

    #[test]
    fn jep_rejects_relations() {
        let r = arc(FiniteSystem::relation(1, [(0, 0)]).unwrap());
        assert!(jep(&r, &arc(FiniteSystem::cycle(1))).is_err());
    }

    #[test]
    fn coprime_cycles_over_a_point() {
        let w = arc(FiniteSystem::cycle(1));
        let p = problem(&w, FiniteSystem::cycle(2), vec![0, 0], FiniteSystem::cycle(3), vec![0, 0, 0]);
        let s = amalgamate(&p).unwrap();
        assert_eq!(findyn::cycle_decomposition(&s.apex).unwrap().lengths(), vec![6]);
        assert!(verify_amalgam(&p, &s));

        // Oracle: nothing smaller than 6 states amalgamates, and at 6 some
        // (Z, h, i) found by exhaustive search verifies.
        let mut smallest = None;
        'outer: for size in 1..=6 {
            for shape in findyn::cycle_types(size) {
                let z = arc(FiniteSystem::from_cycle_type(&shape));
                for h in findyn::find_equivariant_maps(&z, p.left().source(), true, usize::MAX) {
                    for i in findyn::find_equivariant_maps(&z, p.right().source(), true, usize::MAX) {
                        let cand = AmalgamSolution { apex: z.clone(), h: h.clone(), i };
                        if verify_amalgam(&p, &cand) {
                            smallest = Some(size);
                            break 'outer;
                        }
                    }
                }
            }
        }
        assert_eq!(smallest, Some(6));
    }

    #[test]
    fn identity_problem() {
        let w = arc(FiniteSystem::from_cycle_type(&[3, 2, 1]));
        let id = EquivariantMap::identity(w.clone());
        let p = AmalgamProblem::new(id.clone(), id).unwrap();
        let s = amalgamate(&p).unwrap();
        assert_eq!(s.apex.len(), 6);
        let mut h = s.h.assignment().to_vec();
        h.sort_unstable();
        assert_eq!(h, (0..6).collect::<Vec<_>>());
        assert_eq!(s.h.assignment(), s.i.assignment());
        assert!(verify_amalgam(&p, &s));
    }

    #[test]
    fn four_cycle_over_two_cycle() {
        let w = arc(FiniteSystem::cycle(2));
        let p = problem(&w, FiniteSystem::cycle(4), vec![0, 1, 0, 1], FiniteSystem::cycle(2), vec![0, 1]);
        let s = amalgamate(&p).unwrap();
        assert_eq!(findyn::cycle_decomposition(&s.apex).unwrap().lengths(), vec![4]);
        for z in 0..4 {
            assert_eq!(p.left().apply(s.h.apply(z)), p.right().apply(s.i.apply(z)));
        }
        assert!(verify_amalgam(&p, &s));
    }

    #[test]
    fn corrupted_solution_fails() {
        let w = arc(FiniteSystem::cycle(2));
        let p = problem(&w, FiniteSystem::cycle(4), vec![0, 1, 0, 1], FiniteSystem::cycle(2), vec![0, 1]);
        let s = amalgamate(&p).unwrap();
        let h = s.h.with_reassigned(0, 1).unwrap();
        assert!(!verify_amalgam(&p, &AmalgamSolution { h, ..s }));
    }

    #[test]
    fn invalid_problems_are_diagnosed() {
        let w = arc(FiniteSystem::cycle(2));
        let x = arc(FiniteSystem::cycle(2));
        let const_map = EquivariantMap::new(x.clone(), w.clone(), vec![0, 0]).unwrap();
        let id = EquivariantMap::new(x, w.clone(), vec![0, 1]).unwrap();
        let err = AmalgamProblem::new(const_map, id.clone()).unwrap_err();
        assert!(err.to_string().contains("not equivariant"), "{err}");
        let two = arc(FiniteSystem::identity(2));
        let onto_one = EquivariantMap::new(arc(FiniteSystem::cycle(1)), two.clone(), vec![0]).unwrap();
        let err = AmalgamProblem::new(onto_one, EquivariantMap::identity(two)).unwrap_err();
        assert!(err.to_string().contains("not surjective"), "{err}");
        let other = EquivariantMap::identity(arc(FiniteSystem::cycle(3)));
        assert!(AmalgamProblem::new(id, other).is_err());
    }

    #[test]
    fn problem_json_round_trip() {
        let w = arc(FiniteSystem::cycle(2));
        let p = problem(&w, FiniteSystem::cycle(4), vec![0, 1, 0, 1], FiniteSystem::cycle(2), vec![0, 1]);
        assert_eq!(AmalgamProblem::from_json(&p.to_json()).unwrap(), p);
        let s = amalgamate(&p).unwrap();
        assert_eq!(AmalgamSolution::from_json(&s.to_json(), &p).unwrap(), s);
    }

    #[test]
    fn chain_depth_one() {
        let t = generic_chain(&[3], 1).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.top().len(), 1);
    }

    #[test]
    fn chain_realizes_small_factors() {
        let t = generic_chain(&[2, 3], 3).unwrap();
        assert_eq!(t.validate(), Ok(()));
        for shape in [vec![2], vec![3], vec![1, 1]] {
            let target = arc(FiniteSystem::from_cycle_type(&shape));
            assert!(!findyn::find_equivariant_maps(t.top(), &target, true, 1).is_empty(), "{shape:?}");
        }
    }

    #[test]
    fn chain_rejects_bad_schedules() {
        assert!(generic_chain(&[], 2).is_err());
        assert!(generic_chain(&[3, 2], 2).is_err());
        assert!(generic_chain(&[2], 0).is_err());
        assert!(matches!(generic_chain_capped(&[4], 4, 10), Err(Error::ResourceCap { .. })));
    }

    #[test]
    fn certificate_on_trivial_chain() {
        let t = Tower::single(arc(FiniteSystem::cycle(1)));
        let c = not_special_certificate(&t, 1).unwrap();
        assert!(c.holds());
        assert_eq!(c.chain[0].max_period, 1);
        assert_eq!(c.spirals, vec![SpiralWandering { n: 1, wandering: 6 }]);
        assert!(not_special_certificate(&spiral::spiral_tower(1).unwrap(), 1).is_err());
    }
}
