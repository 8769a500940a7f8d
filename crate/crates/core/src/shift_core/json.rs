use super::{format_word, parse_word, Edge, SftGraph};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Serialized shift: explicit labeled graph or forbidden-word list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum SftJson {
    Graph {
        alphabet: Vec<String>,
        vertices: Vec<String>,
        edges: Vec<(String, String, String)>,
    },
    Forbidden {
        alphabet: Vec<String>,
        forbidden: Vec<String>,
    },
}

impl SftJson {
    pub fn to_graph(&self) -> Result<SftGraph> {
        match self {
            SftJson::Graph {
                alphabet,
                vertices,
                edges,
            } => {
                let mut vid = HashMap::new();
                for (i, v) in vertices.iter().enumerate() {
                    if vid.insert(v.as_str(), i).is_some() {
                        return Err(Error::Schema(format!("duplicate vertex {v:?}")));
                    }
                }
                let sid: HashMap<&str, usize> = alphabet
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (s.as_str(), i))
                    .collect();
                let mut out = Vec::with_capacity(edges.len());
                for (s, d, l) in edges {
                    let look = |name: &str| {
                        vid.get(name)
                            .copied()
                            .ok_or_else(|| Error::Schema(format!("unknown vertex {name:?}")))
                    };
                    let label = sid
                        .get(l.as_str())
                        .copied()
                        .ok_or_else(|| Error::Schema(format!("unknown label {l:?}")))?;
                    out.push(Edge {
                        src: look(s)?,
                        dst: look(d)?,
                        label,
                    });
                }
                SftGraph::new(alphabet.clone(), vertices.clone(), out)
            }
            SftJson::Forbidden {
                alphabet,
                forbidden,
            } => {
                super::validate_alphabet(alphabet)?;
                let words = forbidden
                    .iter()
                    .map(|w| parse_word(alphabet, w).map_err(|e| Error::Schema(e.to_string())))
                    .collect::<Result<Vec<_>>>()?;
                SftGraph::from_forbidden_words(alphabet, &words)
            }
        }
    }

    pub fn from_graph(g: &SftGraph) -> Self {
        let v = g.vertices();
        SftJson::Graph {
            alphabet: g.alphabet().to_vec(),
            vertices: v.to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|e| {
                    (
                        v[e.src].clone(),
                        v[e.dst].clone(),
                        g.alphabet()[e.label].clone(),
                    )
                })
                .collect(),
        }
    }

    pub fn forbidden(alphabet: &[String], words: &[super::Word]) -> Self {
        SftJson::Forbidden {
            alphabet: alphabet.to_vec(),
            forbidden: words.iter().map(|w| format_word(alphabet, w)).collect(),
        }
    }
}

impl SftGraph {
    pub fn to_json(&self) -> SftJson {
        SftJson::from_graph(self)
    }
}
