//! The JSON model file format:
//!
//! ```json
//! { "points": ["x", "y"],
//!   "agents": { "a": { "kind": "monadic-derivative", "edges": [["x","y"],["y","x"]] } },
//!   "valuation": { "p": ["y"] } }
//! ```

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{FrameKind, Model, ModelError};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    points: Vec<String>,
    agents: IndexMap<String, AgentFile>,
    valuation: IndexMap<String, Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentFile {
    kind: FrameKind,
    edges: Vec<(String, String)>,
}

impl Model {
    pub fn from_json(text: &str) -> Result<Model, ModelError> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        let mut b = Model::builder(file.points);
        for (agent, spec) in file.agents {
            b = b.relation_owned(agent, spec.kind, spec.edges);
        }
        for (atom, members) in file.valuation {
            b = b.atom_owned(atom, members);
        }
        b.build()
    }

    pub fn to_json(&self) -> String {
        let name = |i: usize| self.point_name(i).to_string();
        let file = ModelFile {
            points: self.points().to_vec(),
            agents: self
                .relations()
                .map(|(a, r)| {
                    (
                        a.to_string(),
                        AgentFile {
                            kind: r.kind(),
                            edges: r.edges().map(|(s, t)| (name(s), name(t))).collect(),
                        },
                    )
                })
                .collect(),
            valuation: self
                .atoms()
                .iter()
                .enumerate()
                .map(|(i, atom)| (atom.clone(), self.valuation_at(i).iter().map(name).collect()))
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("model files always serialize")
    }
}
