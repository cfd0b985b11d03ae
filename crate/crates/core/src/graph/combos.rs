use std::path::Path;

use serde::{Deserialize, Serialize};

use super::GraphError;
use crate::model::{ArgName, Operator, Property, SemanticTag};

const DEFAULT_COMBINATIONS: &str = include_str!("../../data/combinations.json");

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Requirement {
    pub arg: ArgName,
    /// How many outgoing arcs with this argument name are needed.
    #[serde(default = "one")]
    pub count: usize,
}

/// One row of the table as written in the data file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinationRow {
    pub operator: Operator,
    /// Property sets the row applies to, one property each. Empty means the
    /// bare operator and every single property it allows.
    #[serde(default)]
    pub properties: Vec<Property>,
    pub require: Vec<Requirement>,
    /// Argument names whose presence activates the row. Empty means any of
    /// the required names.
    #[serde(default)]
    pub trigger: Vec<ArgName>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinationFile {
    pub version: u32,
    pub rows: Vec<CombinationRow>,
}

/// A row instantiated for one concrete property set.
///
/// A token that carries any trigger tag must carry the required tags, with
/// at most one requirement unit forgiven when the token's span holds
/// content of its own.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Combination {
    pub require: Vec<(SemanticTag, usize)>,
    pub trigger: Vec<SemanticTag>,
}

impl Combination {
    /// Total number of required units.
    pub fn size(&self) -> usize {
        self.require.iter().map(|(_, k)| k).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinationTable {
    pub rows: Vec<CombinationRow>,
    instances: Vec<Combination>,
}

impl Default for CombinationTable {
    fn default() -> Self {
        Self::from_json(DEFAULT_COMBINATIONS).expect("bundled combination table is valid")
    }
}

impl CombinationTable {
    pub fn empty() -> Self {
        Self {
            rows: Vec::new(),
            instances: Vec::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let file: CombinationFile =
            serde_json::from_str(text).map_err(|e| GraphError::Combinations(e.to_string()))?;
        Self::from_rows(file.rows)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GraphError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| GraphError::Combinations(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks every row and expands it per property set.
    ///
    /// A requirement with a count above one must be the only requirement of
    /// its row, so that the linear form never lets a surplus of one tag
    /// stand in for a missing other tag.
    pub fn from_rows(rows: Vec<CombinationRow>) -> Result<Self, GraphError> {
        let mut instances = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            let bad = |msg: String| GraphError::Combinations(format!("row {}: {msg}", r + 1));
            if row.require.is_empty() {
                return Err(bad("no requirements".into()));
            }
            for q in &row.require {
                if q.count == 0 {
                    return Err(bad(format!("requirement {} has count 0", q.arg)));
                }
                if q.count > 1 && row.require.len() > 1 {
                    return Err(bad(format!("counted requirement {} must stand alone", q.arg)));
                }
            }
            for name in row.require.iter().map(|q| q.arg).chain(row.trigger.iter().copied()) {
                if !row.operator.allows_argument(name) {
                    return Err(bad(format!("{} does not take {name}", row.operator)));
                }
            }
            for p in &row.properties {
                if !row.operator.allows_property(*p) {
                    return Err(bad(format!("{} does not take property {}", row.operator, p.symbol())));
                }
            }
            let prop_sets: Vec<Vec<Property>> = if row.properties.is_empty() {
                std::iter::once(Vec::new())
                    .chain(row.operator.properties().iter().map(|p| vec![*p]))
                    .collect()
            } else {
                row.properties.iter().map(|p| vec![*p]).collect()
            };
            for props in prop_sets {
                let tag = |arg: ArgName| SemanticTag::new(row.operator, props.clone(), arg);
                let require: Vec<(SemanticTag, usize)> = row.require.iter().map(|q| (tag(q.arg), q.count)).collect();
                let trigger = if row.trigger.is_empty() {
                    require.iter().map(|(t, _)| t.clone()).collect()
                } else {
                    row.trigger.iter().map(|a| tag(*a)).collect()
                };
                instances.push(Combination { require, trigger });
            }
        }
        Ok(Self { rows, instances })
    }

    pub fn instances(&self) -> &[Combination] {
        &self.instances
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_expands_per_property() {
        let table = CombinationTable::default();
        let union: Vec<_> = table
            .instances()
            .iter()
            .filter(|c| c.require[0].0.operator == Operator::Union)
            .collect();
        assert_eq!(union.len(), 1 + Operator::Union.properties().len());
        assert_eq!(union[0].size(), 2);
        let diff = table
            .instances()
            .iter()
            .find(|c| c.require[0].0.properties == vec![Property::Diff])
            .unwrap();
        assert_eq!(diff.require.len(), 2);
        assert_eq!(diff.trigger.len(), 2);
    }

    #[test]
    fn rejects_mixed_counted_rows() {
        let text = r#"{"version":1,"rows":[{"operator":"superlative","require":[{"arg":"sub","count":2},{"arg":"attribute"}]}]}"#;
        assert!(CombinationTable::from_json(text).is_err());
        let text = r#"{"version":1,"rows":[{"operator":"union","require":[{"arg":"left"}]}]}"#;
        assert!(CombinationTable::from_json(text).is_err());
    }
}
