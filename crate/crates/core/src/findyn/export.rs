use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::findyn::{FiniteSystem, Kind, StateId};

#[derive(Serialize, Deserialize)]
struct SystemRepr {
    states: Vec<String>,
    kind: Kind,
    dynamics: Vec<[StateId; 2]>,
}

impl TryFrom<SystemRepr> for FiniteSystem {
    type Error = Error;

    fn try_from(r: SystemRepr) -> Result<Self> {
        let n = r.states.len();
        match r.kind {
            Kind::Permutation => {
                let mut images = vec![None; n];
                for [i, j] in r.dynamics {
                    if i >= n {
                        return Err(Error::InvalidSystem(format!("pair source {i} outside 0..{n}")));
                    }
                    if images[i].replace(j).is_some() {
                        return Err(Error::InvalidSystem(format!("state {i} has two images")));
                    }
                }
                let images = images
                    .into_iter()
                    .enumerate()
                    .map(|(i, j)| j.ok_or_else(|| Error::InvalidSystem(format!("state {i} has no image"))))
                    .collect::<Result<Vec<_>>>()?;
                FiniteSystem::permutation_labelled(r.states, images)
            }
            Kind::Relation => {
                FiniteSystem::relation_labelled(r.states, r.dynamics.into_iter().map(|[i, j]| (i, j)))
            }
        }
    }
}

impl Serialize for FiniteSystem {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SystemRepr {
            states: self.labels().to_vec(),
            kind: self.kind(),
            dynamics: self.edges().map(|(x, y)| [x, y]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteSystem {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SystemRepr::deserialize(deserializer)?;
        FiniteSystem::try_from(repr).map_err(serde::de::Error::custom)
    }
}

impl FiniteSystem {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("systems always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Graphviz digraph: one node per state, one edge per dynamics pair.
    pub fn to_dot(&self, name: &str) -> String {
        self.to_dot_with(name, |_| None)
    }

    /// Like [`FiniteSystem::to_dot`], with extra node attributes (e.g. `color=red`).
    pub fn to_dot_with(&self, name: &str, attrs: impl Fn(StateId) -> Option<String>) -> String {
        let mut out = String::new();
        writeln!(out, "digraph {} {{", quote(name)).unwrap();
        for x in 0..self.len() {
            let extra = attrs(x).map(|a| format!(", {a}")).unwrap_or_default();
            writeln!(out, "  {x} [label={}{extra}];", quote(self.label(x))).unwrap();
        }
        for (x, y) in self.edges() {
            writeln!(out, "  {x} -> {y};").unwrap();
        }
        out.push_str("}\n");
        out
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}
