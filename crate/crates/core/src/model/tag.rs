use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ArgName, ModelError, Operator, Property};

/// A semantic dependency label `<operator, properties, argument>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SemanticTag {
    pub operator: Operator,
    /// Sorted and deduplicated.
    pub properties: Vec<Property>,
    pub arg: ArgName,
}

impl SemanticTag {
    pub fn new(operator: Operator, mut properties: Vec<Property>, arg: ArgName) -> Self {
        properties.sort();
        properties.dedup();
        Self {
            operator,
            properties,
            arg,
        }
    }

    /// Comma-joined property symbols, empty when there are none.
    pub fn property_key(&self) -> String {
        self.properties
            .iter()
            .map(|p| p.symbol())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn operation(&self) -> Operation {
        Operation::Semantic(self.operator, self.properties.clone())
    }
}

/// An edge label of a dependency graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeTag {
    Span,
    Duplicate,
    Semantic(SemanticTag),
}

impl EdgeTag {
    pub fn semantic(operator: Operator, properties: Vec<Property>, arg: ArgName) -> Self {
        EdgeTag::Semantic(SemanticTag::new(operator, properties, arg))
    }

    pub fn as_semantic(&self) -> Option<&SemanticTag> {
        match self {
            EdgeTag::Semantic(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_span(&self) -> bool {
        matches!(self, EdgeTag::Span)
    }

    pub fn is_duplicate(&self) -> bool {
        matches!(self, EdgeTag::Duplicate)
    }

    pub fn render(&self) -> String {
        match self {
            EdgeTag::Span => "span".to_string(),
            EdgeTag::Duplicate => "duplicate".to_string(),
            EdgeTag::Semantic(t) => {
                let key = t.property_key();
                if key.is_empty() {
                    format!("{}-{}", t.operator, t.arg)
                } else {
                    format!("{}-{}[{}]", t.operator, t.arg, key)
                }
            }
        }
    }

    /// The operation a tag contributes to its source token. Duplicate tags
    /// carry no operation.
    pub fn operation(&self) -> Option<Operation> {
        match self {
            EdgeTag::Span => Some(Operation::Span),
            EdgeTag::Duplicate => None,
            EdgeTag::Semantic(t) => Some(t.operation()),
        }
    }
}

impl fmt::Display for EdgeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromStr for EdgeTag {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "span" => return Ok(EdgeTag::Span),
            "duplicate" => return Ok(EdgeTag::Duplicate),
            _ => {}
        }
        let bad = || ModelError::MalformedTag(s.to_string());
        let (head, props) = match s.find('[') {
            Some(open) => {
                let inner = s[open + 1..].strip_suffix(']').ok_or_else(bad)?;
                (&s[..open], inner)
            }
            None => (s, ""),
        };
        let dash = head.find('-').ok_or_else(bad)?;
        let operator: Operator = head[..dash].parse().map_err(|_| bad())?;
        let arg: ArgName = head[dash + 1..].parse().map_err(|_| bad())?;
        let properties = if props.is_empty() {
            Vec::new()
        } else {
            props
                .split(',')
                .map(str::parse)
                .collect::<Result<Vec<Property>, _>>()?
        };
        Ok(EdgeTag::semantic(operator, properties, arg))
    }
}

impl Serialize for EdgeTag {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for EdgeTag {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// What the outgoing arcs of a token declare about its span.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operation {
    Span,
    Semantic(Operator, Vec<Property>),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_known_tags() {
        let t = EdgeTag::semantic(Operator::Filter, vec![], ArgName::Sub);
        assert_eq!(t.render(), "filter-sub");
        let t = EdgeTag::semantic(Operator::Arithmetic, vec![Property::Diff], ArgName::Left);
        assert_eq!(t.render(), "arithmetic-left[diff]");
        assert_eq!(EdgeTag::Span.render(), "span");
        assert_eq!(EdgeTag::Duplicate.render(), "duplicate");
    }

    #[test]
    fn parses_both_empty_property_spellings() {
        let a: EdgeTag = "filter-sub[]".parse().unwrap();
        let b: EdgeTag = "filter-sub".parse().unwrap();
        assert_eq!(a, b);
        let c: EdgeTag = "comparative-condition[more-than-1]".parse().unwrap();
        assert_eq!(c.render(), "comparative-condition[more-than-1]");
        assert!("bogus".parse::<EdgeTag>().is_err());
        assert!("filter-nope".parse::<EdgeTag>().is_err());
    }
}
