//! Spiral systems.
//!
//! An `n`-spiral `S_n` has a left cycle `(l,0) → (l,1) → … → (l,n!-1) → (l,0)`,
//! a right cycle on `(r,k)` of the same length, and a chain
//! `(m,-n+1) → … → (m,n-1)` leading from `(l,0)` to `(r,0)`. The level `W_n` is
//! the disjoint union of `6^n` copies of `S_n`, one per word of length `n` over
//! the letters `L1 L2 M1 M2 G1 G2`, ordered lexicographically.
//!
//! The collapse `ξ: W_{n+1} → W_n` reads the last letter of a point's word,
//! drops it, and moves the coordinates with the left (`L`), middle (`M`) or
//! right (`G`) collapse of that letter's family. Each collapse is fixed on the
//! features that identify it (`L` onto the left cycle with `(l,k) ↦ (l,k mod n!)`,
//! `G` onto the right cycle with `(r,k) ↦ (r,k mod n!)`, `M` straight down on the
//! chain with its ends `(m,∓n)` landing on `(l,0)` and `(r,0)`); the remaining
//! points are placed by phase so that every relation pair of `W_{n+1}` lands on
//! a relation pair of `W_n`. At `n = 1` every cycle has length one and the phases
//! are invisible.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::findyn::{self, EquivariantMap, FiniteSystem, StateId};
use crate::tower::Tower;

/// Largest level built by default: `|W_4| = 71 280`.
pub const DEFAULT_STATE_CAP: u128 = 71_280;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    L1,
    L2,
    M1,
    M2,
    G1,
    G2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Left,
    Middle,
    Right,
}

impl Letter {
    pub const ALL: [Letter; 6] = [Letter::L1, Letter::L2, Letter::M1, Letter::M2, Letter::G1, Letter::G2];

    pub fn family(self) -> Family {
        match self {
            Letter::L1 | Letter::L2 => Family::Left,
            Letter::M1 | Letter::M2 => Family::Middle,
            Letter::G1 | Letter::G2 => Family::Right,
        }
    }

    fn rank(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    L,
    M,
    R,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::L => "l",
            Side::M => "m",
            Side::R => "r",
        })
    }
}

/// A point of `W_n`: the word naming its spiral, a side and an index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpiralPoint {
    pub word: Vec<Letter>,
    pub side: Side,
    pub index: i64,
}

impl SpiralPoint {
    pub fn new(word: Vec<Letter>, side: Side, index: i64) -> Result<Self> {
        let p = SpiralPoint { word, side, index };
        p.validate()?;
        Ok(p)
    }

    pub fn level(&self) -> usize {
        self.word.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.level();
        if n == 0 {
            return Err(Error::LevelOutOfRange {
                got: 0,
                expected: "n ≥ 1".into(),
            });
        }
        let ok = match self.side {
            Side::L | Side::R => factorial(n).is_some_and(|f| self.index >= 0 && (self.index as u128) < f),
            Side::M => self.index.unsigned_abs() < n as u64,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Precondition(format!("index {} out of range for side {} at level {n}", self.index, self.side)))
        }
    }
}

impl fmt::Display for SpiralPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for l in &self.word {
            write!(f, "{l}")?;
        }
        write!(f, "|{}|{})", self.side, self.index)
    }
}

impl FromStr for SpiralPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected (word|side|index), got {s:?}"));
        let inner = s.strip_prefix('(').and_then(|s| s.strip_suffix(')')).ok_or_else(bad)?;
        let mut parts = inner.split('|');
        let (word, side, index) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(w), Some(s), Some(i), None) => (w, s, i),
            _ => return Err(bad()),
        };
        if word.len() % 2 != 0 {
            return Err(bad());
        }
        let word = word
            .as_bytes()
            .chunks(2)
            .map(|c| match c {
                b"L1" => Ok(Letter::L1),
                b"L2" => Ok(Letter::L2),
                b"M1" => Ok(Letter::M1),
                b"M2" => Ok(Letter::M2),
                b"G1" => Ok(Letter::G1),
                b"G2" => Ok(Letter::G2),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>>>()?;
        let side = match side {
            "l" => Side::L,
            "m" => Side::M,
            "r" => Side::R,
            _ => return Err(bad()),
        };
        let index = index.parse().map_err(|_| bad())?;
        SpiralPoint::new(word, side, index)
    }
}

pub fn factorial(n: usize) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

/// `|S_n| = 2·n! + 2n − 1`.
pub fn spiral_size(n: usize) -> Option<u128> {
    factorial(n)?.checked_mul(2)?.checked_add(2 * n as u128 - 1)
}

/// `|W_n| = 6^n·(2·n! + 2n − 1)`.
pub fn level_size(n: usize) -> Option<u128> {
    6u128.checked_pow(u32::try_from(n).ok()?)?.checked_mul(spiral_size(n)?)
}

fn check_level(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::LevelOutOfRange {
            got: 0,
            expected: "n ≥ 1".into(),
        });
    }
    Ok(())
}

/// Coordinates inside one spiral of level `n` with `n! = fact`.
#[derive(Clone, Copy)]
struct Layout {
    n: usize,
    fact: usize,
}

impl Layout {
    fn new(n: usize) -> Result<Self> {
        check_level(n)?;
        let fact = factorial(n)
            .and_then(|f| usize::try_from(f).ok())
            .ok_or_else(|| Error::ResourceCap {
                what: format!("{n}!"),
                needed: u128::MAX,
                cap: usize::MAX as u128,
            })?;
        Ok(Layout { n, fact })
    }

    fn size(self) -> usize {
        2 * self.fact + 2 * self.n - 1
    }

    fn local(self, side: Side, k: i64) -> usize {
        match side {
            Side::L => k as usize,
            Side::M => self.fact + (k + self.n as i64 - 1) as usize,
            Side::R => self.fact + 2 * self.n - 1 + k as usize,
        }
    }

    fn coords(self, local: usize) -> (Side, i64) {
        let chain_start = self.fact;
        let right_start = self.fact + 2 * self.n - 1;
        if local < chain_start {
            (Side::L, local as i64)
        } else if local < right_start {
            (Side::M, (local - chain_start) as i64 - self.n as i64 + 1)
        } else {
            (Side::R, (local - right_start) as i64)
        }
    }

    /// The relation pairs of one spiral, in local indices.
    fn pairs(self) -> Vec<(usize, usize)> {
        let n = self.n as i64;
        let f = self.fact as i64;
        let mut pairs = Vec::with_capacity(self.size() + 1);
        for side in [Side::L, Side::R] {
            for k in 0..f {
                pairs.push((self.local(side, k), self.local(side, (k + 1) % f)));
            }
        }
        for k in -n + 1..n - 1 {
            pairs.push((self.local(Side::M, k), self.local(Side::M, k + 1)));
        }
        pairs.push((self.local(Side::L, 0), self.local(Side::M, -n + 1)));
        pairs.push((self.local(Side::M, n - 1), self.local(Side::R, 0)));
        pairs
    }
}

/// One `n`-spiral `(S_n, R_n)` with labels `(|side|index)`.
pub fn build_spiral(n: usize) -> Result<FiniteSystem> {
    let layout = Layout::new(n)?;
    let labels = (0..layout.size())
        .map(|i| {
            let (side, k) = layout.coords(i);
            format!("(|{side}|{k})")
        })
        .collect();
    FiniteSystem::relation_labelled(labels, layout.pairs())
}

/// The level `(W_n, R_n)`.
#[derive(Clone, Debug)]
pub struct SpiralLevel {
    n: usize,
    system: Arc<FiniteSystem>,
}

pub fn build_level(n: usize) -> Result<SpiralLevel> {
    build_level_capped(n, DEFAULT_STATE_CAP)
}

pub fn build_level_capped(n: usize, cap: u128) -> Result<SpiralLevel> {
    check_level(n)?;
    let needed = level_size(n).unwrap_or(u128::MAX);
    if needed > cap {
        return Err(Error::ResourceCap {
            what: format!("W_{n}"),
            needed,
            cap,
        });
    }
    let layout = Layout::new(n)?;
    let size = layout.size();
    let spirals = 6usize.pow(n as u32);
    let local_pairs = layout.pairs();
    let mut labels = Vec::with_capacity(spirals * size);
    let mut pairs = Vec::with_capacity(spirals * local_pairs.len());
    for rank in 0..spirals {
        let word: String = word_of(n, rank).iter().map(Letter::to_string).collect();
        for i in 0..size {
            let (side, k) = layout.coords(i);
            labels.push(format!("({word}|{side}|{k})"));
        }
        let base = rank * size;
        pairs.extend(local_pairs.iter().map(|&(a, b)| (base + a, base + b)));
    }
    Ok(SpiralLevel {
        n,
        system: Arc::new(FiniteSystem::relation_labelled(labels, pairs)?),
    })
}

/// Word of length `n` with lexicographic rank `rank`.
pub fn word_of(n: usize, mut rank: usize) -> Vec<Letter> {
    let mut word = vec![Letter::L1; n];
    for slot in word.iter_mut().rev() {
        *slot = Letter::ALL[rank % 6];
        rank /= 6;
    }
    word
}

fn rank_of(word: &[Letter]) -> usize {
    word.iter().fold(0, |acc, l| acc * 6 + l.rank())
}

impl SpiralLevel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn system(&self) -> &Arc<FiniteSystem> {
        &self.system
    }

    pub fn len(&self) -> usize {
        self.system.len()
    }

    pub fn is_empty(&self) -> bool {
        self.system.is_empty()
    }

    fn layout(&self) -> Layout {
        Layout::new(self.n).expect("level was built")
    }

    pub fn point(&self, x: StateId) -> SpiralPoint {
        let layout = self.layout();
        let (side, index) = layout.coords(x % layout.size());
        SpiralPoint {
            word: word_of(self.n, x / layout.size()),
            side,
            index,
        }
    }

    pub fn state(&self, p: &SpiralPoint) -> Result<StateId> {
        if p.level() != self.n {
            return Err(Error::LevelOutOfRange {
                got: p.level(),
                expected: format!("a point of W_{}", self.n),
            });
        }
        p.validate()?;
        let layout = self.layout();
        Ok(rank_of(&p.word) * layout.size() + layout.local(p.side, p.index))
    }

    pub fn side(&self, x: StateId) -> Side {
        let layout = self.layout();
        layout.coords(x % layout.size()).0
    }

    /// Copy of this level with one relation pair removed, for negative controls.
    pub fn without_pair(&self, x: StateId, y: StateId) -> Result<SpiralLevel> {
        Ok(SpiralLevel {
            n: self.n,
            system: Arc::new(self.system.without_edge(x, y)?),
        })
    }

    /// Graphviz export with sides color-coded.
    pub fn to_dot(&self) -> String {
        self.system.to_dot_with(&format!("W_{}", self.n), |x| {
            Some(
                match self.side(x) {
                    Side::L => "color=blue",
                    Side::M => "color=red",
                    Side::R => "color=darkgreen",
                }
                .to_string(),
            )
        })
    }
}

/// Where the collapse of `family` sends the coordinates `(side, k)` of a point
/// at level `n + 1`; the result lives at level `n`.
pub fn collapse(family: Family, n: usize, side: Side, k: i64) -> (Side, i64) {
    let fact = factorial(n).expect("factorial overflow") as i64;
    let n = n as i64;
    // Steps along the unique path from (l,0) to the point: the chain point (m,k)
    // sits n + 1 + k steps after (l,0), and (r,0) sits 2n + 2 steps after it.
    let phase = match side {
        Side::L => k,
        Side::M => n + 1 + k,
        Side::R => 2 * n + 2 + k,
    };
    match family {
        Family::Left => (Side::L, phase.rem_euclid(fact)),
        Family::Right => (Side::R, (phase - 2 * n - 2).rem_euclid(fact)),
        Family::Middle => match side {
            Side::L => (Side::L, (k - 1).rem_euclid(fact)),
            Side::R => (Side::R, (k + 1).rem_euclid(fact)),
            Side::M if k == -n => (Side::L, 0),
            Side::M if k == n => (Side::R, 0),
            Side::M => (Side::M, k),
        },
    }
}

/// One collapse step `W_{n+1} → W_n`.
pub fn xi_step(p: &SpiralPoint) -> Result<SpiralPoint> {
    p.validate()?;
    let m = p.level();
    if m < 2 {
        return Err(Error::LevelOutOfRange {
            got: m,
            expected: "level ≥ 2 (there is no level 0)".into(),
        });
    }
    let (last, rest) = p.word.split_last().expect("level ≥ 2");
    let (side, index) = collapse(last.family(), m - 1, p.side, p.index);
    Ok(SpiralPoint {
        word: rest.to_vec(),
        side,
        index,
    })
}

/// The canonical collapse `W_m → W_n` for `m > n`.
pub fn xi(m: usize, n: usize, p: &SpiralPoint) -> Result<SpiralPoint> {
    if m <= n || n == 0 {
        return Err(Error::LevelOutOfRange {
            got: m,
            expected: format!("m > n ≥ 1 (n = {n})"),
        });
    }
    if p.level() != m {
        return Err(Error::LevelOutOfRange {
            got: p.level(),
            expected: format!("a point of W_{m}"),
        });
    }
    let mut q = p.clone();
    for _ in n..m {
        q = xi_step(&q)?;
    }
    Ok(q)
}

/// `ξ` from `upper` (level `n + 1`) to the level below it, as an assignment.
fn step_assignment(upper_n: usize) -> Result<Vec<StateId>> {
    let up = Layout::new(upper_n)?;
    let down = Layout::new(upper_n - 1)?;
    let spirals = 6usize.pow(upper_n as u32);
    // Every spiral with the same last letter collapses the same way.
    let local: Vec<Vec<usize>> = Letter::ALL
        .iter()
        .map(|l| {
            (0..up.size())
                .map(|i| {
                    let (side, k) = up.coords(i);
                    let (s, j) = collapse(l.family(), upper_n - 1, side, k);
                    down.local(s, j)
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(spirals * up.size());
    for rank in 0..spirals {
        let table = &local[rank % 6];
        let base = (rank / 6) * down.size();
        out.extend(table.iter().map(|&j| base + j));
    }
    Ok(out)
}

/// The canonical collapse between two built levels, as a map of systems.
pub fn xi_map(upper: &SpiralLevel, lower: &SpiralLevel) -> Result<EquivariantMap> {
    if upper.n <= lower.n {
        return Err(Error::LevelOutOfRange {
            got: upper.n,
            expected: format!("> {}", lower.n),
        });
    }
    let mut assignment: Vec<StateId> = (0..upper.len()).collect();
    for m in (lower.n + 1..=upper.n).rev() {
        let step = step_assignment(m)?;
        for a in &mut assignment {
            *a = step[*a];
        }
    }
    EquivariantMap::new(upper.system.clone(), lower.system.clone(), assignment)
}

/// Relation pairs `(x, y)` of `upper` whose collapse is not a pair of `lower`.
pub fn collapse_violations(upper: &SpiralLevel, lower: &SpiralLevel) -> Result<Vec<(StateId, StateId)>> {
    if upper.n != lower.n + 1 {
        return Err(Error::LevelOutOfRange {
            got: upper.n,
            expected: format!("{}", lower.n + 1),
        });
    }
    let step = step_assignment(upper.n)?;
    Ok(upper
        .system
        .edges()
        .filter(|&(x, y)| !lower.system.has_edge(step[x], step[y]))
        .collect())
}

/// Whether every relation pair of `W_{n+1}` collapses onto a relation pair of `W_n`.
pub fn verify_xi_morphism(n: usize) -> Result<bool> {
    let lower = build_level(n)?;
    let upper = build_level(n + 1)?;
    Ok(collapse_violations(&upper, &lower)?.is_empty())
}

/// Points with no relation path of length ≥ 1 back to themselves.
pub fn wandering_points(level: &SpiralLevel) -> Vec<SpiralPoint> {
    findyn::wandering_states(&level.system)
        .into_iter()
        .map(|x| level.point(x))
        .collect()
}

/// The tower `W_1 ← W_2 ← … ← W_depth` bonded by `ξ`.
pub fn spiral_tower(depth: usize) -> Result<Tower> {
    check_level(depth)?;
    let levels = (1..=depth).map(build_level).collect::<Result<Vec<_>>>()?;
    let bondings = levels
        .windows(2)
        .map(|w| xi_map(&w[1], &w[0]))
        .collect::<Result<Vec<_>>>()?;
    Tower::new(levels.iter().map(|l| l.system.clone()).collect(), bondings)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str) -> Vec<Letter> {
        format!("({s}|l|0)").parse::<SpiralPoint>().unwrap().word
    }

    #[test]
    fn spiral_one() {
        let s = build_spiral(1).unwrap();
        assert_eq!(s.labels(), &["(|l|0)", "(|m|0)", "(|r|0)"]);
        let mut pairs: Vec<_> = s.edges().collect();
        pairs.sort();
        assert_eq!(pairs, vec![(0, 0), (0, 1), (1, 2), (2, 2)]);
    }

    #[test]
    fn spiral_sizes_and_left_cycle() {
        assert_eq!(build_spiral(2).unwrap().len(), 7);
        let s3 = build_spiral(3).unwrap();
        assert_eq!(s3.len(), 17);
        let l = |k: i64| s3.state_of(&format!("(|l|{k})")).unwrap();
        let mut x = l(0);
        let mut visited = vec![];
        for _ in 0..6 {
            visited.push(x);
            x = *s3.successors(x).iter().find(|&&y| s3.label(y).starts_with("(|l|")).unwrap();
        }
        assert_eq!(visited, (0..6).map(l).collect::<Vec<_>>());
        assert_eq!(x, l(0));
    }

    #[test]
    fn level_zero_rejected() {
        assert!(build_spiral(0).is_err());
        assert!(build_level(0).is_err());
    }

    #[test]
    fn level_cap() {
        assert!(matches!(build_level(5), Err(Error::ResourceCap { .. })));
        assert!(build_level_capped(2, 100).is_err());
    }

    #[test]
    fn successor_counts() {
        let w = build_level(2).unwrap();
        for x in 0..w.len() {
            let p = w.point(x);
            let expected = if p.side == Side::L && p.index == 0 { 2 } else { 1 };
            assert_eq!(w.system().successors(x).len(), expected, "{p}");
        }
    }

    #[test]
    fn point_state_round_trip() {
        let w = build_level(2).unwrap();
        for x in 0..w.len() {
            let p = w.point(x);
            assert_eq!(w.system().label(x), p.to_string());
            assert_eq!(w.state(&p).unwrap(), x);
            assert_eq!(p.to_string().parse::<SpiralPoint>().unwrap(), p);
        }
    }

    #[test]
    fn xi_step_examples() {
        let p = SpiralPoint::new(word("L1M1"), Side::M, 0).unwrap();
        assert_eq!(xi_step(&p).unwrap(), SpiralPoint::new(word("L1"), Side::M, 0).unwrap());
        let p = SpiralPoint::new(word("G2M2"), Side::M, 1).unwrap();
        assert_eq!(xi_step(&p).unwrap(), SpiralPoint::new(word("G2"), Side::R, 0).unwrap());
        let p = SpiralPoint::new(word("M1G1L1"), Side::R, 3).unwrap();
        assert_eq!(xi_step(&p).unwrap(), SpiralPoint::new(word("M1G1"), Side::L, 1).unwrap());
        let p = SpiralPoint::new(word("M1M1"), Side::M, -1).unwrap();
        assert_eq!(xi_step(&p).unwrap(), SpiralPoint::new(word("M1"), Side::L, 0).unwrap());
    }

    #[test]
    fn xi_step_rejects_level_one() {
        let p = SpiralPoint::new(word("L1"), Side::L, 0).unwrap();
        assert!(xi_step(&p).is_err());
        assert!(xi(1, 1, &p).is_err());
    }

    #[test]
    fn point_ranges_enforced() {
        assert!(SpiralPoint::new(word("L1L1"), Side::L, 2).is_err());
        assert!(SpiralPoint::new(word("L1L1"), Side::M, 2).is_err());
        assert!(SpiralPoint::new(word("L1L1"), Side::M, -1).is_ok());
    }

    #[test]
    fn middle_collapse_is_straight_down() {
        for n in 1..=4 {
            for k in -(n as i64)..=(n as i64) {
                let (side, j) = collapse(Family::Middle, n, Side::M, k);
                if k.abs() < n as i64 {
                    assert_eq!((side, j), (Side::M, k));
                } else {
                    assert_eq!(side, if k < 0 { Side::L } else { Side::R });
                    assert_eq!(j, 0);
                }
            }
        }
    }

    #[test]
    fn uncorrected_cycle_collapse_breaks_relations() {
        // Sending every point of a G-spiral to (r, k mod n!) by its own index
        // (rather than by phase) maps (l,0) → (m,-n) onto a non-pair once n! > 2.
        let n = 3usize;
        let lower = build_spiral(n).unwrap();
        let fact = 6i64;
        let r = |k: i64| lower.state_of(&format!("(|r|{})", k.rem_euclid(fact))).unwrap();
        assert!(!lower.has_edge(r(0), r(-(n as i64))));
        let (s0, a) = collapse(Family::Right, n, Side::L, 0);
        let (s1, b) = collapse(Family::Right, n, Side::M, -(n as i64));
        assert_eq!((s0, s1), (Side::R, Side::R));
        assert!(lower.has_edge(r(a), r(b)));
    }

    #[test]
    fn corrupted_level_fails_verification() {
        let w1 = build_level(1).unwrap();
        let w2 = build_level(2).unwrap();
        assert!(collapse_violations(&w2, &w1).unwrap().is_empty());
        let (x, y) = w1.system().edges().nth(1).unwrap();
        let broken = w1.without_pair(x, y).unwrap();
        assert!(!collapse_violations(&w2, &broken).unwrap().is_empty());
    }

    #[test]
    fn wandering_on_single_spiral_without_chain() {
        let s = build_spiral(2).unwrap();
        let keep: Vec<StateId> = (0..s.len()).filter(|&x| !s.label(x).contains("|m|")).collect();
        let idx = |x: StateId| keep.iter().position(|&k| k == x);
        let pairs: Vec<_> = s.edges().filter_map(|(x, y)| Some((idx(x)?, idx(y)?))).collect();
        let cycles_only = FiniteSystem::relation(keep.len(), pairs).unwrap();
        assert_eq!(cycles_only.len(), 4);
        assert!(findyn::wandering_states(&cycles_only).is_empty());
        assert_eq!(findyn::wandering_states(&s).len(), 3);
    }

    #[test]
    fn dot_colors_sides() {
        let dot = build_level(1).unwrap().to_dot();
        assert_eq!(dot.matches("color=red").count(), 6);
        assert_eq!(dot.matches("->").count(), 24);
    }
}
