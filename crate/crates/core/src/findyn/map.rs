use std::sync::Arc;

use crate::error::{Error, Result};
use crate::findyn::{FiniteSystem, StateId};

/// A total map between two finite systems.
///
/// Equivariance and surjectivity are not assumed at construction; they are
/// checked on demand with [`EquivariantMap::is_equivariant`] and
/// [`EquivariantMap::is_surjective`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantMap {
    source: Arc<FiniteSystem>,
    target: Arc<FiniteSystem>,
    assignment: Vec<StateId>,
}

impl EquivariantMap {
    pub fn new(
        source: Arc<FiniteSystem>,
        target: Arc<FiniteSystem>,
        assignment: Vec<StateId>,
    ) -> Result<Self> {
        if assignment.len() != source.len() {
            return Err(Error::InvalidMap(format!(
                "assignment has {} entries, source has {} states",
                assignment.len(),
                source.len()
            )));
        }
        if let Some((x, &y)) = assignment.iter().enumerate().find(|(_, &y)| y >= target.len()) {
            return Err(Error::InvalidMap(format!(
                "state {x} maps to {y}, target has {} states",
                target.len()
            )));
        }
        Ok(EquivariantMap {
            source,
            target,
            assignment,
        })
    }

    pub fn identity(system: Arc<FiniteSystem>) -> Self {
        let assignment = (0..system.len()).collect();
        EquivariantMap {
            source: system.clone(),
            target: system,
            assignment,
        }
    }

    /// The unique map to the one-point system `C_1`.
    pub fn to_point(source: Arc<FiniteSystem>) -> Self {
        let assignment = vec![0; source.len()];
        EquivariantMap {
            source,
            target: Arc::new(FiniteSystem::cycle(1)),
            assignment,
        }
    }

    pub fn source(&self) -> &Arc<FiniteSystem> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteSystem> {
        &self.target
    }

    pub fn assignment(&self) -> &[StateId] {
        &self.assignment
    }

    pub fn apply(&self, x: StateId) -> StateId {
        self.assignment[x]
    }

    /// Every dynamics pair `x → y` of the source is sent to a dynamics pair of
    /// the target. For two permutation systems this is `f∘σ = τ∘f`.
    pub fn is_equivariant(&self) -> bool {
        self.source
            .edges()
            .all(|(x, y)| self.target.has_edge(self.assignment[x], self.assignment[y]))
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.len()];
        for &y in &self.assignment {
            hit[y] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &EquivariantMap) -> Result<EquivariantMap> {
        if !Arc::ptr_eq(&self.target, &then.source) && *self.target != *then.source {
            return Err(Error::InvalidMap(
                "composition: target of the first map is not the source of the second".into(),
            ));
        }
        Ok(EquivariantMap {
            source: self.source.clone(),
            target: then.target.clone(),
            assignment: self.assignment.iter().map(|&y| then.assignment[y]).collect(),
        })
    }

    /// The nonempty fibers `f⁻¹{y}`, in order of `y`.
    pub fn fibers(&self) -> Vec<Vec<StateId>> {
        let mut fibers = vec![Vec::new(); self.target.len()];
        for (x, &y) in self.assignment.iter().enumerate() {
            fibers[y].push(x);
        }
        fibers.retain(|f| !f.is_empty());
        fibers
    }

    /// Copy of this map with one state reassigned. Used for negative controls.
    pub fn with_reassigned(&self, x: StateId, y: StateId) -> Result<EquivariantMap> {
        let mut assignment = self.assignment.clone();
        assignment[x] = y;
        EquivariantMap::new(self.source.clone(), self.target.clone(), assignment)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_equivariant_and_surjective() {
        for sys in [
            FiniteSystem::cycle(5),
            FiniteSystem::from_cycle_type(&[2, 3]),
            FiniteSystem::relation(3, [(0, 1), (1, 2), (2, 2), (0, 0)]).unwrap(),
        ] {
            let id = EquivariantMap::identity(Arc::new(sys));
            assert!(id.is_equivariant());
            assert!(id.is_surjective());
        }
    }

    #[test]
    fn constant_map_onto_fixed_point() {
        let f = EquivariantMap::to_point(Arc::new(FiniteSystem::cycle(2)));
        assert!(f.is_equivariant());
        assert!(f.is_surjective());
    }

    #[test]
    fn non_equivariant_map_detected() {
        let c3 = Arc::new(FiniteSystem::cycle(3));
        let f = EquivariantMap::new(c3.clone(), c3, vec![0, 0, 1]).unwrap();
        assert!(!f.is_equivariant());
        assert!(!f.is_surjective());
    }

    #[test]
    fn construction_rejects_bad_assignments() {
        let c3 = Arc::new(FiniteSystem::cycle(3));
        assert!(EquivariantMap::new(c3.clone(), c3.clone(), vec![0, 1]).is_err());
        assert!(EquivariantMap::new(c3.clone(), c3, vec![0, 1, 3]).is_err());
    }

    #[test]
    fn fibers_partition_source() {
        let c6 = Arc::new(FiniteSystem::cycle(6));
        let c3 = Arc::new(FiniteSystem::cycle(3));
        let f = EquivariantMap::new(c6, c3, vec![0, 1, 2, 0, 1, 2]).unwrap();
        assert!(f.is_equivariant());
        assert_eq!(f.fibers(), vec![vec![0, 3], vec![1, 4], vec![2, 5]]);
    }
}
