use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index of a state inside a [`FiniteSystem`].
pub type StateId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    #[serde(rename = "perm")]
    Permutation,
    #[serde(rename = "rel")]
    Relation,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Permutation => f.write_str("perm"),
            Kind::Relation => f.write_str("rel"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Dynamics {
    /// `images[x]` is the successor of `x`; a bijection.
    Permutation(Vec<StateId>),
    /// Sorted, deduplicated successor lists, each nonempty.
    Relation(Vec<Vec<StateId>>),
}

/// A finite set of states with either a permutation or a successor relation.
///
/// States are the dense indices `0..len()`. Labels are carried for display and
/// serialization only; two systems compare equal when labels and dynamics agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSystem {
    labels: Vec<String>,
    dynamics: Dynamics,
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn check_labels(labels: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::InvalidSystem(format!("duplicate state label {l:?}")));
        }
    }
    Ok(())
}

impl FiniteSystem {
    /// Permutation system with `images[x]` the successor of `x`.
    pub fn permutation(images: Vec<StateId>) -> Result<Self> {
        let labels = default_labels(images.len());
        Self::permutation_labelled(labels, images)
    }

    pub fn permutation_labelled(labels: Vec<String>, images: Vec<StateId>) -> Result<Self> {
        if labels.len() != images.len() {
            return Err(Error::InvalidSystem(format!(
                "{} labels for {} states",
                labels.len(),
                images.len()
            )));
        }
        check_labels(&labels)?;
        let n = images.len();
        let mut hit = vec![false; n];
        for (x, &y) in images.iter().enumerate() {
            if y >= n {
                return Err(Error::InvalidSystem(format!("state {x} maps to {y}, outside 0..{n}")));
            }
            if std::mem::replace(&mut hit[y], true) {
                return Err(Error::InvalidSystem(format!("state {y} has two predecessors")));
            }
        }
        Ok(FiniteSystem {
            labels,
            dynamics: Dynamics::Permutation(images),
        })
    }

    /// Relation system on `n` states from a list of `(from, to)` pairs.
    pub fn relation(n: usize, pairs: impl IntoIterator<Item = (StateId, StateId)>) -> Result<Self> {
        Self::relation_labelled(default_labels(n), pairs)
    }

    pub fn relation_labelled(
        labels: Vec<String>,
        pairs: impl IntoIterator<Item = (StateId, StateId)>,
    ) -> Result<Self> {
        check_labels(&labels)?;
        let n = labels.len();
        let mut succ = vec![Vec::new(); n];
        for (x, y) in pairs {
            if x >= n || y >= n {
                return Err(Error::InvalidSystem(format!("pair ({x},{y}) outside 0..{n}")));
            }
            succ[x].push(y);
        }
        for (x, s) in succ.iter_mut().enumerate() {
            if s.is_empty() {
                return Err(Error::InvalidSystem(format!("state {x} has no successor")));
            }
            s.sort_unstable();
            s.dedup();
        }
        Ok(FiniteSystem {
            labels,
            dynamics: Dynamics::Relation(succ),
        })
    }

    /// The cyclic system `C_n`: `x ↦ x + 1 mod n`.
    pub fn cycle(n: usize) -> Self {
        assert!(n > 0, "C_0 is empty");
        FiniteSystem {
            labels: default_labels(n),
            dynamics: Dynamics::Permutation((0..n).map(|x| (x + 1) % n).collect()),
        }
    }

    pub fn identity(n: usize) -> Self {
        FiniteSystem {
            labels: default_labels(n),
            dynamics: Dynamics::Permutation((0..n).collect()),
        }
    }

    /// Disjoint union of cycles with the given lengths, laid out consecutively.
    pub fn from_cycle_type(lengths: &[usize]) -> Self {
        let mut images = Vec::with_capacity(lengths.iter().sum());
        let mut start = 0;
        for &len in lengths {
            assert!(len > 0, "cycle lengths must be positive");
            images.extend((0..len).map(|i| start + (i + 1) % len));
            start += len;
        }
        FiniteSystem {
            labels: default_labels(images.len()),
            dynamics: Dynamics::Permutation(images),
        }
    }

    /// Replaces the labels, keeping the dynamics.
    pub fn with_labels(self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::InvalidSystem(format!(
                "{} labels for {} states",
                labels.len(),
                self.len()
            )));
        }
        check_labels(&labels)?;
        Ok(FiniteSystem { labels, ..self })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn kind(&self) -> Kind {
        match self.dynamics {
            Dynamics::Permutation(_) => Kind::Permutation,
            Dynamics::Relation(_) => Kind::Relation,
        }
    }

    pub fn is_permutation(&self) -> bool {
        self.kind() == Kind::Permutation
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.dynamics
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: StateId) -> &str {
        &self.labels[x]
    }

    pub fn state_of(&self, label: &str) -> Option<StateId> {
        self.labels.iter().position(|l| l == label)
    }

    /// The permutation images, if this is a permutation system.
    pub fn permutation_images(&self) -> Option<&[StateId]> {
        match &self.dynamics {
            Dynamics::Permutation(p) => Some(p),
            Dynamics::Relation(_) => None,
        }
    }

    pub(crate) fn require_permutation(&self) -> Result<&[StateId]> {
        self.permutation_images().ok_or(Error::NotPermutation)
    }

    /// Successors of `x`, sorted.
    pub fn successors(&self, x: StateId) -> &[StateId] {
        match &self.dynamics {
            Dynamics::Permutation(p) => std::slice::from_ref(&p[x]),
            Dynamics::Relation(r) => &r[x],
        }
    }

    pub fn has_edge(&self, x: StateId, y: StateId) -> bool {
        match &self.dynamics {
            Dynamics::Permutation(p) => p[x] == y,
            Dynamics::Relation(r) => r[x].binary_search(&y).is_ok(),
        }
    }

    /// All dynamics pairs in `(from, to)` order.
    pub fn edges(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        (0..self.len()).flat_map(move |x| self.successors(x).iter().map(move |&y| (x, y)))
    }

    pub fn edge_count(&self) -> usize {
        match &self.dynamics {
            Dynamics::Permutation(p) => p.len(),
            Dynamics::Relation(r) => r.iter().map(Vec::len).sum(),
        }
    }

    /// Predecessor lists, sorted.
    pub fn predecessors(&self) -> Vec<Vec<StateId>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (x, y) in self.edges() {
            pred[y].push(x);
        }
        pred
    }

    /// Image of `x` under the `power`-th iterate of a permutation system.
    pub fn iterate(&self, x: StateId, power: u64) -> Result<StateId> {
        let p = self.require_permutation()?;
        let mut y = x;
        for _ in 0..power {
            y = p[y];
        }
        Ok(y)
    }

    /// Returns a copy with one relation pair removed. Used to build negative controls.
    pub fn without_edge(&self, x: StateId, y: StateId) -> Result<Self> {
        let pairs = self.edges().filter(|&e| e != (x, y));
        FiniteSystem::relation_labelled(self.labels.clone(), pairs)
    }
}
