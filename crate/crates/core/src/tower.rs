//! Inverse-limit towers of finite systems.
//!
//! A [`Tower`] `L_0 ← L_1 ← L_2 ← …` with surjective equivariant bondings stands
//! for the Cantor system it converges to. Clopen sets and clopen partitions of
//! the limit are represented at a finite level and compared by pulling back to a
//! common deeper level. No metric is ever used: "fine enough" is always
//! expressed as refinement of partitions.

use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::findyn::{self, EquivariantMap, FiniteSystem, MorphismSearch, StateId};
use crate::spiral::{self, SpiralLevel};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    levels: Vec<Arc<FiniteSystem>>,
    bondings: Vec<EquivariantMap>,
    cantor: bool,
}

/// The first invariant a tower breaks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TowerViolation {
    /// `bondings[index]` does not respect the dynamics.
    NotEquivariant { bonding: usize },
    /// `bondings[index]` misses some state of the lower level.
    NotSurjective { bonding: usize },
    /// `levels[level]` is smaller than the level below it.
    Shrinking { level: usize },
    /// A Cantor-flagged tower has `levels[level]` no larger than the level below.
    NotProper { level: usize },
}

impl std::fmt::Display for TowerViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TowerViolation::NotEquivariant { bonding } => write!(f, "bonding {bonding} is not equivariant"),
            TowerViolation::NotSurjective { bonding } => write!(f, "bonding {bonding} is not surjective"),
            TowerViolation::Shrinking { level } => write!(f, "level {level} is smaller than level {}", level - 1),
            TowerViolation::NotProper { level } => {
                write!(f, "level {level} does not properly refine level {}", level - 1)
            }
        }
    }
}

impl Tower {
    /// Checks only the shape: `bondings[i]` must map `levels[i + 1]` to `levels[i]`.
    pub fn new(levels: Vec<Arc<FiniteSystem>>, bondings: Vec<EquivariantMap>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidTower("a tower needs at least one level".into()));
        }
        if bondings.len() + 1 != levels.len() {
            return Err(Error::InvalidTower(format!(
                "{} levels need {} bondings, got {}",
                levels.len(),
                levels.len() - 1,
                bondings.len()
            )));
        }
        for (i, b) in bondings.iter().enumerate() {
            let same = |a: &Arc<FiniteSystem>, b: &Arc<FiniteSystem>| Arc::ptr_eq(a, b) || **a == **b;
            if !same(b.source(), &levels[i + 1]) || !same(b.target(), &levels[i]) {
                return Err(Error::InvalidTower(format!("bonding {i} does not map level {} to level {i}", i + 1)));
            }
        }
        Ok(Tower {
            levels,
            bondings,
            cantor: false,
        })
    }

    pub fn single(level: Arc<FiniteSystem>) -> Self {
        Tower {
            levels: vec![level],
            bondings: Vec::new(),
            cantor: false,
        }
    }

    /// Flags the tower as converging to a Cantor set; [`Tower::validate`] then
    /// also demands strictly growing levels.
    pub fn cantor(mut self, yes: bool) -> Self {
        self.cantor = yes;
        self
    }

    pub fn is_cantor_flagged(&self) -> bool {
        self.cantor
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[Arc<FiniteSystem>] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> Result<&Arc<FiniteSystem>> {
        self.levels.get(i).ok_or_else(|| self.level_error(i))
    }

    pub fn top(&self) -> &Arc<FiniteSystem> {
        self.levels.last().expect("towers are nonempty")
    }

    pub fn bondings(&self) -> &[EquivariantMap] {
        &self.bondings
    }

    fn level_error(&self, i: usize) -> Error {
        Error::LevelOutOfRange {
            got: i,
            expected: format!("0..{}", self.levels.len()),
        }
    }

    /// Appends a level with its bonding onto the current top.
    pub fn push(&mut self, bonding: EquivariantMap) -> Result<()> {
        let top = self.top();
        if !Arc::ptr_eq(bonding.target(), top) && **bonding.target() != **top {
            return Err(Error::InvalidTower("new bonding does not land on the top level".into()));
        }
        self.levels.push(bonding.source().clone());
        self.bondings.push(bonding);
        Ok(())
    }

    pub fn validate(&self) -> std::result::Result<(), TowerViolation> {
        for (i, b) in self.bondings.iter().enumerate() {
            if !b.is_equivariant() {
                return Err(TowerViolation::NotEquivariant { bonding: i });
            }
            if !b.is_surjective() {
                return Err(TowerViolation::NotSurjective { bonding: i });
            }
            let (lo, hi) = (self.levels[i].len(), self.levels[i + 1].len());
            if hi < lo {
                return Err(TowerViolation::Shrinking { level: i + 1 });
            }
            if self.cantor && hi == lo {
                return Err(TowerViolation::NotProper { level: i + 1 });
            }
        }
        Ok(())
    }

    /// The composite bonding from level `from` down to level `to` (`from ≥ to`).
    pub fn composite(&self, from: usize, to: usize) -> Result<Vec<StateId>> {
        if from >= self.len() {
            return Err(self.level_error(from));
        }
        if to > from {
            return Err(Error::LevelOutOfRange {
                got: to,
                expected: format!("≤ {from}"),
            });
        }
        let mut a: Vec<StateId> = (0..self.levels[from].len()).collect();
        for b in self.bondings[to..from].iter().rev() {
            for x in &mut a {
                *x = b.apply(*x);
            }
        }
        Ok(a)
    }

    pub fn composite_map(&self, from: usize, to: usize) -> Result<EquivariantMap> {
        let a = self.composite(from, to)?;
        EquivariantMap::new(self.levels[from].clone(), self.levels[to].clone(), a)
    }

    pub fn all_permutation(&self) -> bool {
        self.levels.iter().all(|l| l.is_permutation())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TowerRepr::from(self)).expect("towers always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let repr: TowerRepr = serde_json::from_str(s)?;
        repr.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct TowerRepr {
    levels: Vec<FiniteSystem>,
    bondings: Vec<Vec<StateId>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    cantor: bool,
}

impl From<&Tower> for TowerRepr {
    fn from(t: &Tower) -> Self {
        TowerRepr {
            levels: t.levels.iter().map(|l| (**l).clone()).collect(),
            bondings: t.bondings.iter().map(|b| b.assignment().to_vec()).collect(),
            cantor: t.cantor,
        }
    }
}

impl TryFrom<TowerRepr> for Tower {
    type Error = Error;

    fn try_from(r: TowerRepr) -> Result<Self> {
        let levels: Vec<_> = r.levels.into_iter().map(Arc::new).collect();
        if levels.is_empty() || r.bondings.len() + 1 != levels.len() {
            return Err(Error::InvalidTower(format!(
                "{} levels with {} bondings",
                levels.len(),
                r.bondings.len()
            )));
        }
        let bondings = r
            .bondings
            .into_iter()
            .enumerate()
            .map(|(i, a)| EquivariantMap::new(levels[i + 1].clone(), levels[i].clone(), a))
            .collect::<Result<Vec<_>>>()?;
        Ok(Tower::new(levels, bondings)?.cantor(r.cantor))
    }
}

/// A clopen subset of the limit, given by a set of states at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClopenSet {
    level: usize,
    states: Vec<StateId>,
}

impl ClopenSet {
    pub fn new(t: &Tower, level: usize, mut states: Vec<StateId>) -> Result<Self> {
        let n = t.level(level)?.len();
        states.sort_unstable();
        states.dedup();
        if states.is_empty() {
            return Err(Error::InvalidPartition("clopen sets are nonempty".into()));
        }
        if states.last().is_some_and(|&x| x >= n) {
            return Err(Error::InvalidPartition(format!("state outside level {level}")));
        }
        Ok(ClopenSet { level, states })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    /// The same clopen set, described at the deeper level `to`.
    pub fn pullback(&self, t: &Tower, to: usize) -> Result<ClopenSet> {
        let comp = t.composite(to, self.level)?;
        let states = (0..comp.len()).filter(|&x| self.states.binary_search(&comp[x]).is_ok()).collect();
        Ok(ClopenSet { level: to, states })
    }

    /// The same clopen set at the least level where it is defined.
    pub fn canonical(&self, t: &Tower) -> Result<ClopenSet> {
        for i in 0..self.level {
            let comp = t.composite(self.level, i)?;
            let mut image: Vec<StateId> = self.states.iter().map(|&x| comp[x]).collect();
            image.sort_unstable();
            image.dedup();
            let candidate = ClopenSet { level: i, states: image };
            if candidate.pullback(t, self.level)?.states == self.states {
                return Ok(candidate);
            }
        }
        Ok(self.clone())
    }
}

/// A partition of one level's states. Block order is kept (it matters for
/// cyclically permuted partitions) but ignored by [`LevelPartition::same_as`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelPartition {
    level: usize,
    blocks: Vec<Vec<StateId>>,
}

impl LevelPartition {
    pub fn new(t: &Tower, level: usize, blocks: Vec<Vec<StateId>>) -> Result<Self> {
        let n = t.level(level)?.len();
        Self::checked(n, level, blocks)
    }

    fn checked(n: usize, level: usize, mut blocks: Vec<Vec<StateId>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            b.sort_unstable();
            for &x in b.iter() {
                if x >= n {
                    return Err(Error::InvalidPartition(format!("state {x} outside level {level}")));
                }
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidPartition(format!("state {x} in two blocks")));
                }
            }
        }
        if let Some(x) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("state {x} is in no block")));
        }
        Ok(LevelPartition { level, blocks })
    }

    /// The partition of a level into single states.
    pub fn atoms(t: &Tower, level: usize) -> Result<Self> {
        let n = t.level(level)?.len();
        Ok(LevelPartition {
            level,
            blocks: (0..n).map(|x| vec![x]).collect(),
        })
    }

    /// `A_φ`: the nonempty fibers of a map out of `level`.
    pub fn from_fibers(t: &Tower, level: usize, map: &EquivariantMap) -> Result<Self> {
        let n = t.level(level)?.len();
        if map.source().len() != n {
            return Err(Error::InvalidPartition("map source is not this level".into()));
        }
        Self::checked(n, level, map.fibers())
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn blocks(&self) -> &[Vec<StateId>] {
        &self.blocks
    }

    pub fn block_of(&self) -> Vec<usize> {
        let n = self.blocks.iter().map(Vec::len).sum();
        let mut out = vec![0; n];
        for (i, b) in self.blocks.iter().enumerate() {
            for &x in b {
                out[x] = i;
            }
        }
        out
    }

    pub fn pullback(&self, t: &Tower, to: usize) -> Result<LevelPartition> {
        let comp = t.composite(to, self.level)?;
        let block = self.block_of();
        let mut blocks = vec![Vec::new(); self.blocks.len()];
        for (x, &y) in comp.iter().enumerate() {
            blocks[block[y]].push(x);
        }
        Ok(LevelPartition { level: to, blocks })
    }

    /// Blocks sorted by least state.
    pub fn normalized(&self) -> LevelPartition {
        let mut blocks = self.blocks.clone();
        blocks.sort_unstable_by_key(|b| b[0]);
        LevelPartition {
            level: self.level,
            blocks,
        }
    }

    pub fn same_as(&self, other: &LevelPartition) -> bool {
        self.normalized() == other.normalized()
    }

    /// The same partition at the least level where every block is defined.
    pub fn canonical(&self, t: &Tower) -> Result<LevelPartition> {
        for i in 0..self.level {
            let comp = t.composite(self.level, i)?;
            let block = self.block_of();
            let mut at_i = vec![usize::MAX; t.level(i)?.len()];
            let consistent = comp.iter().enumerate().all(|(x, &y)| {
                let b = block[x];
                std::mem::replace(&mut at_i[y], b) == usize::MAX || at_i[y] == b
            });
            if consistent {
                let mut blocks = vec![Vec::new(); self.blocks.len()];
                for (y, &b) in at_i.iter().enumerate() {
                    blocks[b].push(y);
                }
                return Ok(LevelPartition { level: i, blocks }.normalized());
            }
        }
        Ok(self.normalized())
    }
}

/// Whether every block of `p` lies inside a block of `q`, compared at the deeper
/// of their two levels.
pub fn refines(p: &LevelPartition, q: &LevelPartition, t: &Tower) -> Result<bool> {
    let level = p.level.max(q.level);
    let p = p.pullback(t, level)?;
    let q = q.pullback(t, level)?.block_of();
    Ok(p.blocks.iter().all(|b| b.iter().all(|&x| q[x] == q[b[0]])))
}

/// Least `n ≥ 1` with `σ^n(U) = U`, for a clopen set at a permutation level.
pub fn clopen_period(t: &Tower, u: &ClopenSet) -> Result<Option<u64>> {
    let level = t.level(u.level)?;
    let Some(p) = level.permutation_images() else {
        return Ok(None);
    };
    let mut member = vec![false; p.len()];
    for &x in &u.states {
        member[x] = true;
    }
    let mut cur = u.states.clone();
    let mut n = 0u64;
    loop {
        n += 1;
        for x in &mut cur {
            *x = p[*x];
        }
        if cur.iter().all(|&x| member[x]) {
            return Ok(Some(n));
        }
    }
}

/// A clopen set with no return, searched among the atoms of the first `depth` levels.
///
/// Permutation levels never contribute: every clopen set there is periodic.
/// On relation levels an atom `{x}` qualifies when no relation path of length ≥ 1
/// leads from `x` back to `x`.
pub fn wandering_clopen_exists(t: &Tower, depth: usize) -> Option<ClopenSet> {
    for (i, level) in t.levels.iter().take(depth).enumerate() {
        if level.is_permutation() {
            continue;
        }
        if let Some(&x) = findyn::wandering_states(level).first() {
            return Some(ClopenSet { level: i, states: vec![x] });
        }
    }
    None
}

/// A chain of cyclically permuted partitions, each refining the previous one
/// into `digits[s]` pieces, exactly as the cylinder sets of an odometer do.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarWitness {
    /// The extracted sequence `(a_n)`.
    pub digits: Vec<u64>,
    /// `partitions[s]` has `a_1⋯a_{s+1}` blocks listed in cyclic order:
    /// `σ(B_i) = B_{i+1}`.
    pub partitions: Vec<LevelPartition>,
}

/// Bounded search for `depth` successive cyclic refinements.
///
/// Levels are scanned upward from the level of the previous partition; at the
/// first level admitting one, the least `a ≥ 2` is taken.
pub fn property_star(t: &Tower, depth: usize) -> Result<Option<StarWitness>> {
    if !t.all_permutation() {
        return Err(Error::Precondition("property_star needs permutation levels".into()));
    }
    let mut level = 0usize;
    let mut modulus = 1u64;
    let mut phase: Vec<u64> = vec![0; t.levels[0].len()];
    let mut witness = StarWitness {
        digits: Vec::new(),
        partitions: Vec::new(),
    };
    for _ in 0..depth {
        let mut found = None;
        for j in level..t.len() {
            let dec = findyn::cycle_decomposition(&t.levels[j])?;
            let g = dec.lengths().iter().fold(0u64, |g, &l| g.gcd(&(l as u64)));
            if g % modulus != 0 || g / modulus < 2 {
                continue;
            }
            let room = g / modulus;
            let a = (2..=room).find(|a| room % a == 0).expect("room ≥ 2");
            found = Some((j, a, dec));
            break;
        }
        let Some((j, a, dec)) = found else {
            return Ok(None);
        };
        let comp = t.composite(j, level)?;
        let next_mod = modulus * a;
        let mut next_phase = vec![0u64; t.levels[j].len()];
        for c in dec.cycles() {
            let start = phase[comp[c[0]]];
            for (i, &x) in c.iter().enumerate() {
                next_phase[x] = (start + i as u64) % next_mod;
            }
        }
        let mut blocks = vec![Vec::new(); next_mod as usize];
        for (x, &p) in next_phase.iter().enumerate() {
            blocks[p as usize].push(x);
        }
        witness.digits.push(a);
        witness.partitions.push(LevelPartition { level: j, blocks });
        level = j;
        modulus = next_mod;
        phase = next_phase;
    }
    Ok(Some(witness))
}

/// A solution of one round of the lifting game.
#[derive(Clone, Debug)]
pub struct Lift {
    /// `ψ` lands in `W_{n+k}`.
    pub k: usize,
    /// The tower level `ψ` is defined on.
    pub level: usize,
    pub psi: EquivariantMap,
}

/// Outcome of a bounded lifting search. Absence is a statement about the
/// searched range only.
#[derive(Clone, Debug)]
pub enum LiftOutcome {
    Found(Lift),
    AbsentWithinBounds,
}

/// Searches for `ψ: L_j → W_{n+k}` with `ξ∘ψ = φ∘(L_j → L_source)` and `A_ψ`
/// refining `refinement`, for `k = 1..=max_k` and `j = source_level..=max_level`
/// in that order, with ψ lexicographically least.
///
/// `φ: L_source → W_n` must be a surjective equivariant map and `refinement`
/// must refine `A_φ`; otherwise the call fails with [`Error::Precondition`].
pub fn lifting_check(
    t: &Tower,
    source_level: usize,
    phi: &EquivariantMap,
    n: usize,
    refinement: &LevelPartition,
    max_k: usize,
    max_level: usize,
) -> Result<LiftOutcome> {
    let source = t.level(source_level).map_err(|e| Error::Precondition(e.to_string()))?;
    if **phi.source() != **source {
        return Err(Error::Precondition(format!("φ is not defined on level {source_level}")));
    }
    let base = spiral::build_level(n)?;
    if **phi.target() != **base.system() {
        return Err(Error::Precondition(format!("φ does not land in W_{n}")));
    }
    if !phi.is_equivariant() || !phi.is_surjective() {
        return Err(Error::Precondition("φ must be a surjective equivariant map".into()));
    }
    if refinement.level >= t.len() {
        return Err(Error::Precondition(format!("partition level {} is outside the tower", refinement.level)));
    }
    let a_phi = LevelPartition::from_fibers(t, source_level, phi)?;
    if !refines(refinement, &a_phi, t)? {
        return Err(Error::Precondition("the partition does not refine A_φ".into()));
    }

    let top = max_level.min(t.len() - 1);
    for k in 1..=max_k {
        let upper = spiral::build_level(n + k)?;
        let collapse = spiral::xi_map(&upper, &base)?;
        let mut fibers = vec![Vec::new(); base.len()];
        for (y, &z) in collapse.assignment().iter().enumerate() {
            fibers[z].push(y);
        }
        for j in source_level..=top {
            if let Some(psi) = lift_at_level(t, j, source_level, phi, refinement, &upper, &fibers)? {
                return Ok(LiftOutcome::Found(Lift { k, level: j, psi }));
            }
        }
    }
    Ok(LiftOutcome::AbsentWithinBounds)
}

fn lift_at_level(
    t: &Tower,
    j: usize,
    source_level: usize,
    phi: &EquivariantMap,
    refinement: &LevelPartition,
    upper: &SpiralLevel,
    fibers: &[Vec<StateId>],
) -> Result<Option<EquivariantMap>> {
    let level = &t.levels[j];
    if level.len() < upper.len() {
        return Ok(None);
    }
    // Class of each state of L_j under the refinement; None if the refinement
    // splits the state, in which case no map out of L_j can refine it.
    let classes: Vec<usize> = if refinement.level <= j {
        let comp = t.composite(j, refinement.level)?;
        let block = refinement.block_of();
        comp.iter().map(|&y| block[y]).collect()
    } else {
        let comp = t.composite(refinement.level, j)?;
        let block = refinement.block_of();
        let mut class = vec![usize::MAX; level.len()];
        for (y, &x) in comp.iter().enumerate() {
            if class[x] == usize::MAX {
                class[x] = block[y];
            } else if class[x] != block[y] {
                return Ok(None);
            }
        }
        class
    };
    let comp = t.composite(j, source_level)?;
    let domains = comp.iter().map(|&x| fibers[phi.apply(x)].clone()).collect();
    let found = MorphismSearch::new(level, upper.system())
        .surjective(true)
        .domains(domains)
        .class_pure(classes)
        .first();
    found
        .map(|a| EquivariantMap::new(level.clone(), upper.system().clone(), a))
        .transpose()
}
