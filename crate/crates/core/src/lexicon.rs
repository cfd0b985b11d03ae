//! Vocabularies, property triggers, equivalence classes and inflections.
//!
//! The lexicon is data: the default file ships in `data/lexicon.json` and is
//! compiled into the binary, and any file with the same keys can replace it.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Operator, Property};

const DEFAULT_LEXICON: &str = include_str!("../data/lexicon.json");

/// File name looked up when a directory is given instead of a file.
pub const LEXICON_FILE_NAME: &str = "lexicon.json";

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("lexicon is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid lexicon entry: {0}")]
    InvalidEntry(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyEntry {
    pub operator: Operator,
    pub property: Property,
    pub triggers: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceClass {
    pub representative: String,
    pub members: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inflection {
    pub suffix_from: String,
    pub suffix_to: String,
}

/// On-disk shape of a lexicon.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LexiconFile {
    #[serde(default)]
    pub version: u32,
    pub aux: Vec<String>,
    pub store: Vec<String>,
    pub op: Vec<String>,
    pub properties: Vec<PropertyEntry>,
    pub equivalence_classes: Vec<EquivalenceClass>,
    pub inflections: Vec<Inflection>,
}

/// A trigger phrase split into tokens. The token `#` matches any reference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trigger {
    pub property: Property,
    pub tokens: Vec<String>,
}

pub const REF_WILDCARD: &str = "#";

#[derive(Clone, Debug)]
pub struct Lexicon {
    pub aux: BTreeSet<String>,
    /// Ordered, because the augmented question lays store words out in
    /// this order.
    pub store: Vec<String>,
    pub op: BTreeSet<String>,
    pub properties: Vec<PropertyEntry>,
    /// Disjoint after merging.
    pub equivalence_classes: Vec<EquivalenceClass>,
    pub inflections: Vec<Inflection>,
    class_of: HashMap<String, usize>,
    triggers: BTreeMap<Operator, Vec<Trigger>>,
    trigger_words: BTreeMap<Operator, BTreeSet<String>>,
}

impl Default for Lexicon {
    fn default() -> Self {
        Self::from_json(DEFAULT_LEXICON).expect("bundled lexicon is valid")
    }
}

impl Lexicon {
    pub fn from_json(text: &str) -> Result<Self, LexiconError> {
        let file: LexiconFile = serde_json::from_str(text)?;
        Self::from_file(file)
    }

    /// Loads a lexicon from a file, or from `lexicon.json` inside a directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        let path = if path.is_dir() {
            path.join(LEXICON_FILE_NAME)
        } else {
            path.to_path_buf()
        };
        let text = std::fs::read_to_string(&path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_file(file: LexiconFile) -> Result<Self, LexiconError> {
        let lower = |v: &[String]| -> Vec<String> { v.iter().map(|s| s.trim().to_lowercase()).collect() };
        for entry in &file.properties {
            if !entry.operator.allows_property(entry.property) {
                return Err(LexiconError::InvalidEntry(format!(
                    "{} does not take property {}",
                    entry.operator, entry.property
                )));
            }
        }
        for class in &file.equivalence_classes {
            if !class.members.contains(&class.representative) {
                return Err(LexiconError::InvalidEntry(format!(
                    "representative `{}` is not a member of its class",
                    class.representative
                )));
            }
        }
        let mut inflections = file.inflections.clone();
        // Longest suffix first; stable for equal lengths.
        inflections.sort_by_key(|i| std::cmp::Reverse(i.suffix_from.len()));

        let mut triggers: BTreeMap<Operator, Vec<Trigger>> = BTreeMap::new();
        for entry in &file.properties {
            for phrase in &entry.triggers {
                let tokens: Vec<String> = phrase.split_whitespace().map(str::to_lowercase).collect();
                if tokens.is_empty() {
                    continue;
                }
                triggers.entry(entry.operator).or_default().push(Trigger {
                    property: entry.property,
                    tokens,
                });
            }
        }
        for list in triggers.values_mut() {
            list.sort_by_key(|t| std::cmp::Reverse(t.tokens.len()));
        }

        let mut lexicon = Lexicon {
            aux: lower(&file.aux).into_iter().collect(),
            store: lower(&file.store),
            op: lower(&file.op).into_iter().collect(),
            properties: file.properties.clone(),
            equivalence_classes: Vec::new(),
            inflections,
            class_of: HashMap::new(),
            triggers,
            trigger_words: BTreeMap::new(),
        };
        let classes = merge_classes(file.equivalence_classes.iter().cloned().chain(operational_classes(&file.properties)));
        lexicon.set_classes(classes);

        let mut trigger_words: BTreeMap<Operator, BTreeSet<String>> = BTreeMap::new();
        for (op, list) in &lexicon.triggers {
            let set = trigger_words.entry(*op).or_default();
            for t in list {
                for tok in &t.tokens {
                    if tok != REF_WILDCARD {
                        set.insert(tok.clone());
                        set.insert(lexicon.representative(tok));
                    }
                }
            }
        }
        lexicon.trigger_words = trigger_words;
        Ok(lexicon)
    }

    fn set_classes(&mut self, classes: Vec<EquivalenceClass>) {
        self.class_of.clear();
        for (i, class) in classes.iter().enumerate() {
            for m in &class.members {
                self.class_of.insert(m.clone(), i);
            }
        }
        self.equivalence_classes = classes;
    }

    pub fn to_file(&self) -> LexiconFile {
        LexiconFile {
            version: 1,
            aux: self.aux.iter().cloned().collect(),
            store: self.store.clone(),
            op: self.op.iter().cloned().collect(),
            properties: self.properties.clone(),
            equivalence_classes: self.equivalence_classes.clone(),
            inflections: self.inflections.clone(),
        }
    }

    pub fn is_aux(&self, token: &str) -> bool {
        self.aux.contains(token)
    }

    pub fn is_op(&self, token: &str) -> bool {
        self.op.contains(token)
    }

    /// Strips inflections, longest suffix first, keeping a stem of at least
    /// three characters. A bare `s` is not stripped after `s`, `u` or `i`,
    /// so that `class`, `bus` and `this` survive. After a plural `s` one more
    /// rule may apply, which lets `cylinders` meet `cylinder` at `cylind`.
    pub fn stem(&self, token: &str) -> String {
        let once = |t: &str| -> Option<(String, bool)> {
            for rule in &self.inflections {
                if let Some(base) = t.strip_suffix(rule.suffix_from.as_str()) {
                    if base.chars().count() < 3 {
                        continue;
                    }
                    let plural = rule.suffix_from == "s";
                    if plural && (base.ends_with('s') || base.ends_with('u') || base.ends_with('i')) {
                        continue;
                    }
                    return Some((format!("{base}{}", rule.suffix_to), plural));
                }
            }
            None
        };
        match once(token) {
            Some((base, true)) => once(&base).map_or(base, |(b, _)| b),
            Some((base, false)) => base,
            None => token.to_string(),
        }
    }

    /// The representative of a token: its class representative, else that
    /// of its stem, else the stem itself.
    pub fn representative(&self, token: &str) -> String {
        if let Some(&i) = self.class_of.get(token) {
            return self.equivalence_classes[i].representative.clone();
        }
        let stem = self.stem(token);
        if let Some(&i) = self.class_of.get(&stem) {
            return self.equivalence_classes[i].representative.clone();
        }
        stem
    }

    /// Identical, or sharing a representative.
    pub fn equivalent(&self, a: &str, b: &str) -> bool {
        a == b || self.representative(a) == self.representative(b)
    }

    /// Trigger phrases registered for an operator, longest first.
    pub fn triggers(&self, op: Operator) -> &[Trigger] {
        self.triggers.get(&op).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Every word (and its representative) occurring in some trigger of the
    /// operator.
    pub fn trigger_words(&self, op: Operator) -> Option<&BTreeSet<String>> {
        self.trigger_words.get(&op)
    }
}

/// Max and min classes built from the single-word triggers of every max/min
/// property row, so that `smaller` and `lowest` are interchangeable.
fn operational_classes(rows: &[PropertyEntry]) -> Vec<EquivalenceClass> {
    let mut out = Vec::new();
    for prop in [Property::Max, Property::Min] {
        let mut members: Vec<String> = Vec::new();
        for row in rows.iter().filter(|r| r.property == prop) {
            for t in &row.triggers {
                let t = t.trim().to_lowercase();
                if !t.contains(' ') && !members.contains(&t) {
                    members.push(t);
                }
            }
        }
        if let Some(first) = members.first().cloned() {
            out.push(EquivalenceClass {
                representative: first,
                members,
            });
        }
    }
    out
}

/// Merges classes that share a member. The merged class keeps the
/// representative of its earliest input class.
fn merge_classes(classes: impl Iterator<Item = EquivalenceClass>) -> Vec<EquivalenceClass> {
    let mut merged: Vec<EquivalenceClass> = Vec::new();
    for class in classes {
        let mut members: Vec<String> = class.members.iter().map(|m| m.to_lowercase()).collect();
        let mut representative = class.representative.to_lowercase();
        let mut hits: Vec<usize> = merged
            .iter()
            .enumerate()
            .filter(|(_, c)| c.members.iter().any(|m| members.contains(m)))
            .map(|(i, _)| i)
            .collect();
        if let Some(&first) = hits.first() {
            representative = merged[first].representative.clone();
            let mut combined: Vec<String> = Vec::new();
            for &i in &hits {
                combined.extend(merged[i].members.iter().cloned());
            }
            combined.append(&mut members);
            members = combined;
            hits.reverse();
            for i in &hits[..hits.len() - 1] {
                merged.remove(*i);
            }
            let mut seen = BTreeSet::new();
            members.retain(|m| seen.insert(m.clone()));
            merged[first] = EquivalenceClass {
                representative,
                members,
            };
        } else {
            let mut seen = BTreeSet::new();
            members.retain(|m| seen.insert(m.clone()));
            merged.push(EquivalenceClass {
                representative,
                members,
            });
        }
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_lexicon_loads() {
        let lex = Lexicon::default();
        assert!(lex.is_aux("of"));
        assert!(lex.is_op("which"));
        assert!(lex.store.contains(&"size".to_string()));
        assert!(!lex.triggers(Operator::Aggregate).is_empty());
    }

    #[test]
    fn classes_are_disjoint() {
        let lex = Lexicon::default();
        let mut seen = BTreeSet::new();
        for c in &lex.equivalence_classes {
            assert!(c.members.contains(&c.representative));
            for m in &c.members {
                assert!(seen.insert(m.clone()), "{m} in two classes");
            }
        }
    }

    #[test]
    fn inflections_and_classes() {
        let lex = Lexicon::default();
        assert_eq!(lex.representative("countries"), "country");
        assert_eq!(lex.representative("cubes"), lex.representative("cube"));
        assert_eq!(lex.representative("groups"), "group");
        assert_eq!(lex.representative("matches"), "match");
        assert_eq!(lex.representative("class"), "class");
        assert!(lex.equivalent("smaller", "lowest"));
        assert!(lex.equivalent("biggest", "longest"));
        assert!(!lex.equivalent("biggest", "lowest"));
        assert!(lex.equivalent("height", "elevation"));
        assert!(lex.equivalent("0", "zero"));
        assert!(lex.equivalent("taller", "tall"));
        assert!(lex.equivalent("oldness", "old"));
        assert!(lex.equivalent("working", "work"));
    }

    #[test]
    fn merging_keeps_first_representative() {
        let classes = vec![
            EquivalenceClass { representative: "a".into(), members: vec!["a".into(), "b".into()] },
            EquivalenceClass { representative: "c".into(), members: vec!["c".into(), "d".into()] },
            EquivalenceClass { representative: "e".into(), members: vec!["e".into(), "b".into(), "d".into()] },
        ];
        let merged = merge_classes(classes.into_iter());
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].representative, "a");
        assert_eq!(merged[0].members.len(), 5);
    }

    #[test]
    fn rejects_bad_rows() {
        let mut file = Lexicon::default().to_file();
        file.properties.push(PropertyEntry {
            operator: Operator::Select,
            property: Property::Max,
            triggers: vec!["x".into()],
        });
        assert!(Lexicon::from_file(file).is_err());
    }
}
