//! Backtracking search for equivariant maps between finite systems.
//!
//! Sources are assigned in state-index order and candidates are tried in
//! increasing target order, so results come out in lexicographic order of the
//! assignment vector. Pruning never reorders the enumeration: it uses forward
//! checking on the dynamics edges, a cover count for surjectivity and, when
//! fiber classes are given, a purity check.

use std::sync::Arc;

use crate::findyn::{EquivariantMap, FiniteSystem, StateId};

const UNASSIGNED: usize = usize::MAX;

#[derive(Clone, Debug)]
enum Domain {
    Full,
    Set(Vec<StateId>),
}

/// Configurable morphism search. See [`find_equivariant_maps`] for the common case.
#[derive(Clone, Debug)]
pub struct MorphismSearch<'a> {
    source: &'a FiniteSystem,
    target: &'a FiniteSystem,
    surjective: bool,
    max_results: usize,
    domains: Option<Vec<Vec<StateId>>>,
    classes: Option<Vec<usize>>,
}

impl<'a> MorphismSearch<'a> {
    pub fn new(source: &'a FiniteSystem, target: &'a FiniteSystem) -> Self {
        MorphismSearch {
            source,
            target,
            surjective: false,
            max_results: usize::MAX,
            domains: None,
            classes: None,
        }
    }

    pub fn surjective(mut self, yes: bool) -> Self {
        self.surjective = yes;
        self
    }

    pub fn max_results(mut self, max: usize) -> Self {
        self.max_results = max;
        self
    }

    /// Restricts each source state to a list of allowed targets.
    pub fn domains(mut self, domains: Vec<Vec<StateId>>) -> Self {
        assert_eq!(domains.len(), self.source.len());
        self.domains = Some(domains);
        self
    }

    /// Requires every fiber of the map to lie inside one class.
    pub fn class_pure(mut self, classes: Vec<usize>) -> Self {
        assert_eq!(classes.len(), self.source.len());
        self.classes = Some(classes);
        self
    }

    pub fn first(self) -> Option<Vec<StateId>> {
        self.max_results(1).run().pop()
    }

    /// Runs the search. Fewer than `max_results` results means the search was
    /// exhaustive.
    pub fn run(self) -> Vec<Vec<StateId>> {
        let n = self.source.len();
        let m = self.target.len();
        if self.max_results == 0 || (self.surjective && n < m) {
            return Vec::new();
        }
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut state = State::new(&self);
        state.search(self.max_results)
    }
}

struct State<'a> {
    source: &'a FiniteSystem,
    target: &'a FiniteSystem,
    surjective: bool,
    classes: Option<Vec<usize>>,
    src_pred: Vec<Vec<StateId>>,
    tgt_pred: Vec<Vec<StateId>>,
    domain: Vec<Domain>,
    assign: Vec<StateId>,
    cover: Vec<u32>,
    covered: usize,
    owner: Vec<usize>,
    support: Vec<u32>,
    bad: usize,
    trail: Vec<(StateId, Domain)>,
}

impl<'a> State<'a> {
    fn new(cfg: &MorphismSearch<'a>) -> Self {
        let n = cfg.source.len();
        let m = cfg.target.len();
        let domain: Vec<Domain> = match &cfg.domains {
            None => vec![Domain::Full; n],
            Some(ds) => ds
                .iter()
                .map(|d| {
                    let mut d = d.clone();
                    d.sort_unstable();
                    d.dedup();
                    Domain::Set(d)
                })
                .collect(),
        };
        let mut support = vec![0u32; m];
        for d in &domain {
            match d {
                Domain::Full => support.iter_mut().for_each(|s| *s += 1),
                Domain::Set(v) => v.iter().for_each(|&t| support[t] += 1),
            }
        }
        let bad = support.iter().filter(|&&s| s == 0).count();
        State {
            source: cfg.source,
            target: cfg.target,
            surjective: cfg.surjective,
            classes: cfg.classes.clone(),
            src_pred: cfg.source.predecessors(),
            tgt_pred: cfg.target.predecessors(),
            domain,
            assign: vec![UNASSIGNED; n],
            cover: vec![0; m],
            covered: 0,
            owner: vec![0; m],
            support,
            bad,
            trail: Vec::new(),
        }
    }

    fn is_bad(&self, t: StateId) -> bool {
        self.cover[t] == 0 && self.support[t] == 0
    }

    fn add_support(&mut self, t: StateId, delta: i32) {
        let was = self.is_bad(t);
        self.support[t] = (self.support[t] as i32 + delta) as u32;
        self.fix_bad(was, t);
    }

    fn add_cover(&mut self, t: StateId, delta: i32) {
        let was = self.is_bad(t);
        let before = self.cover[t];
        self.cover[t] = (before as i32 + delta) as u32;
        if before == 0 && self.cover[t] > 0 {
            self.covered += 1;
        } else if before > 0 && self.cover[t] == 0 {
            self.covered -= 1;
        }
        self.fix_bad(was, t);
    }

    fn fix_bad(&mut self, was: bool, t: StateId) {
        match (was, self.is_bad(t)) {
            (false, true) => self.bad += 1,
            (true, false) => self.bad -= 1,
            _ => {}
        }
    }

    fn domain_len(&self, x: StateId) -> usize {
        match &self.domain[x] {
            Domain::Full => self.target.len(),
            Domain::Set(v) => v.len(),
        }
    }

    fn candidate(&self, x: StateId, i: usize) -> StateId {
        match &self.domain[x] {
            Domain::Full => i,
            Domain::Set(v) => v[i],
        }
    }

    fn domain_support(&mut self, x: StateId, delta: i32) {
        match std::mem::replace(&mut self.domain[x], Domain::Full) {
            Domain::Full => {
                for t in 0..self.target.len() {
                    self.add_support(t, delta);
                }
            }
            Domain::Set(v) => {
                for &t in &v {
                    self.add_support(t, delta);
                }
                self.domain[x] = Domain::Set(v);
            }
        }
    }

    /// Intersects the domain of `s` with `allowed` (sorted); false if it empties.
    /// A domain newly cut down to one value is queued in `forced`.
    fn restrict(&mut self, s: StateId, allowed: &[StateId], forced: &mut Vec<StateId>) -> bool {
        let new: Vec<StateId> = match &self.domain[s] {
            Domain::Full => allowed.to_vec(),
            Domain::Set(v) => {
                if v.iter().all(|t| allowed.binary_search(t).is_ok()) {
                    return true;
                }
                v.iter().copied().filter(|t| allowed.binary_search(t).is_ok()).collect()
            }
        };
        let old = std::mem::replace(&mut self.domain[s], Domain::Set(new));
        match &old {
            Domain::Full => {
                for t in 0..self.target.len() {
                    if allowed.binary_search(&t).is_err() {
                        self.add_support(t, -1);
                    }
                }
            }
            Domain::Set(v) => {
                for &t in v {
                    if allowed.binary_search(&t).is_err() {
                        self.add_support(t, -1);
                    }
                }
            }
        }
        self.trail.push((s, old));
        match self.domain_len(s) {
            0 => false,
            1 => {
                forced.push(s);
                true
            }
            _ => true,
        }
    }

    /// Restricts the unassigned neighbours of `x` to the neighbours of `v`.
    fn restrict_around(&mut self, x: StateId, v: StateId, forced: &mut Vec<StateId>) -> bool {
        let (source, target) = (self.source, self.target);
        for &s in source.successors(x) {
            if self.assign[s] == UNASSIGNED && !self.restrict(s, target.successors(v), forced) {
                return false;
            }
        }
        let pred = std::mem::take(&mut self.src_pred[x]);
        let tp = std::mem::take(&mut self.tgt_pred[v]);
        let ok = pred
            .iter()
            .all(|&p| self.assign[p] != UNASSIGNED || self.restrict(p, &tp, forced));
        self.src_pred[x] = pred;
        self.tgt_pred[v] = tp;
        ok
    }

    fn try_assign(&mut self, x: StateId, v: StateId) -> bool {
        if self.source.has_edge(x, x) && !self.target.has_edge(v, v) {
            return false;
        }
        if let Some(classes) = &self.classes {
            if self.cover[v] > 0 && self.owner[v] != classes[x] {
                return false;
            }
        }
        let mark = self.trail.len();
        self.assign[x] = v;
        self.add_cover(v, 1);
        if self.cover[v] == 1 {
            if let Some(classes) = &self.classes {
                self.owner[v] = classes[x];
            }
        }
        self.domain_support(x, -1);

        // Forward checking, carried along chains of single-valued domains.
        let mut forced = Vec::new();
        let mut ok = self.restrict_around(x, v, &mut forced);
        while ok {
            let Some(s) = forced.pop() else { break };
            if self.assign[s] == UNASSIGNED && self.domain_len(s) == 1 {
                let t = self.candidate(s, 0);
                ok = self.restrict_around(s, t, &mut forced);
            }
        }
        if ok && self.surjective {
            let unassigned = self.assign.len() - (x + 1);
            ok = self.bad == 0 && self.target.len() - self.covered <= unassigned;
        }
        if !ok {
            self.undo(x, mark);
        }
        ok
    }

    fn undo(&mut self, x: StateId, mark: usize) {
        while self.trail.len() > mark {
            let (s, old) = self.trail.pop().unwrap();
            let cur = std::mem::replace(&mut self.domain[s], old);
            let cur = match cur {
                Domain::Set(v) => v,
                Domain::Full => unreachable!("restricted domains are explicit"),
            };
            match &self.domain[s] {
                Domain::Full => {
                    for t in 0..self.target.len() {
                        if cur.binary_search(&t).is_err() {
                            self.add_support(t, 1);
                        }
                    }
                }
                Domain::Set(v) => {
                    let v = v.clone();
                    for t in v {
                        if cur.binary_search(&t).is_err() {
                            self.add_support(t, 1);
                        }
                    }
                }
            }
        }
        self.domain_support(x, 1);
        let v = self.assign[x];
        self.add_cover(v, -1);
        self.assign[x] = UNASSIGNED;
    }

    fn search(&mut self, max_results: usize) -> Vec<Vec<StateId>> {
        let n = self.assign.len();
        let mut results = Vec::new();
        if self.surjective && self.bad > 0 {
            return results;
        }
        // next[x]: next candidate position to try for x; marks[x]: trail mark at assignment.
        let mut next = vec![0usize; n];
        let mut marks = vec![0usize; n];
        let mut x = 0usize;
        loop {
            if x == n {
                results.push(self.assign.clone());
                if results.len() >= max_results {
                    return results;
                }
                x -= 1;
                self.undo(x, marks[x]);
                continue;
            }
            let mut placed = false;
            while next[x] < self.domain_len(x) {
                let v = self.candidate(x, next[x]);
                next[x] += 1;
                let mark = self.trail.len();
                if self.try_assign(x, v) {
                    marks[x] = mark;
                    placed = true;
                    break;
                }
            }
            if placed {
                x += 1;
                if x < n {
                    next[x] = 0;
                }
            } else {
                if x == 0 {
                    return results;
                }
                x -= 1;
                self.undo(x, marks[x]);
            }
        }
    }
}

/// Up to `max_results` equivariant maps `source → target`, in lexicographic
/// order of assignments. Fewer than `max_results` results means none remain.
pub fn find_equivariant_maps(
    source: &Arc<FiniteSystem>,
    target: &Arc<FiniteSystem>,
    require_surjective: bool,
    max_results: usize,
) -> Vec<EquivariantMap> {
    MorphismSearch::new(source, target)
        .surjective(require_surjective)
        .max_results(max_results)
        .run()
        .into_iter()
        .map(|a| EquivariantMap::new(source.clone(), target.clone(), a).expect("search produces total maps"))
        .collect()
}
