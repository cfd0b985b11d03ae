use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// The closed set of QDMR step operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    Select,
    Filter,
    Project,
    Aggregate,
    Group,
    Superlative,
    Comparative,
    Comparison,
    Union,
    Intersection,
    Discard,
    Sort,
    Boolean,
    Arithmetic,
}

impl Operator {
    pub const ALL: [Operator; 14] = [
        Operator::Select,
        Operator::Filter,
        Operator::Project,
        Operator::Aggregate,
        Operator::Group,
        Operator::Superlative,
        Operator::Comparative,
        Operator::Comparison,
        Operator::Union,
        Operator::Intersection,
        Operator::Discard,
        Operator::Sort,
        Operator::Boolean,
        Operator::Arithmetic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Operator::Select => "select",
            Operator::Filter => "filter",
            Operator::Project => "project",
            Operator::Aggregate => "aggregate",
            Operator::Group => "group",
            Operator::Superlative => "superlative",
            Operator::Comparative => "comparative",
            Operator::Comparison => "comparison",
            Operator::Union => "union",
            Operator::Intersection => "intersection",
            Operator::Discard => "discard",
            Operator::Sort => "sort",
            Operator::Boolean => "boolean",
            Operator::Arithmetic => "arithmetic",
        }
    }

    /// Properties the operator may carry.
    pub fn properties(self) -> &'static [Property] {
        use Property::*;
        match self {
            Operator::Select
            | Operator::Filter
            | Operator::Project
            | Operator::Union
            | Operator::Intersection
            | Operator::Discard
            | Operator::Sort => &[],
            Operator::Aggregate | Operator::Group => &[Max, Min, Count, Sum, Avg],
            Operator::Superlative => &[Max, Min],
            Operator::Comparative => &[
                Equals,
                EqualsN(0),
                EqualsN(1),
                EqualsN(2),
                More,
                MoreThan(0),
                MoreThan(1),
                MoreThan(2),
                Less,
                LessThan(0),
                LessThan(1),
                LessThan(2),
            ],
            Operator::Comparison => &[Max, Min, Count, Sum, Avg, True, False],
            Operator::Boolean => &[
                Equals,
                EqualsN(0),
                EqualsN(1),
                EqualsN(2),
                MoreThan(0),
                MoreThan(1),
                MoreThan(2),
                LessThan(0),
                LessThan(1),
                LessThan(2),
                AndTrue,
                AndFalse,
                OrTrue,
                OrFalse,
                IfExists,
            ],
            Operator::Arithmetic => &[Sum, Diff, Multiply, Div],
        }
    }

    /// Named arguments the operator may carry.
    pub fn arguments(self) -> &'static [ArgName] {
        use ArgName::*;
        match self {
            Operator::Select => &[Sub],
            Operator::Filter => &[Sub, Condition],
            Operator::Project => &[Sub, Projection],
            Operator::Aggregate => &[Arg],
            Operator::Group => &[Key, Value],
            Operator::Superlative => &[Sub, Attribute],
            Operator::Comparative => &[Sub, Attribute, Condition],
            Operator::Comparison => &[Arg],
            Operator::Union => &[Sub],
            Operator::Intersection => &[Intersect, Projection],
            Operator::Discard => &[Sub, Exclude],
            Operator::Sort => &[Sub, Order],
            Operator::Boolean => &[Sub, Condition],
            Operator::Arithmetic => &[Arg, Left, Right],
        }
    }

    /// Whether `name` may appear more than once in a step of this operator.
    pub fn is_repeatable(self, name: ArgName) -> bool {
        matches!(
            (self, name),
            (Operator::Union, ArgName::Sub)
                | (Operator::Comparison, ArgName::Arg)
                | (Operator::Intersection, ArgName::Intersect)
                | (Operator::Arithmetic, ArgName::Arg)
        )
    }

    pub fn allows_property(self, prop: Property) -> bool {
        self.properties().contains(&prop)
    }

    pub fn allows_argument(self, name: ArgName) -> bool {
        self.arguments().contains(&name)
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Operator {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        Operator::ALL
            .iter()
            .copied()
            .find(|op| op.as_str() == lower)
            .ok_or_else(|| ModelError::UnknownOperator(s.to_string()))
    }
}

/// Operator-specific property symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Property {
    Max,
    Min,
    Count,
    Sum,
    Avg,
    Diff,
    Multiply,
    Div,
    Equals,
    EqualsN(u8),
    More,
    MoreThan(u8),
    Less,
    LessThan(u8),
    AndTrue,
    AndFalse,
    OrTrue,
    OrFalse,
    IfExists,
    True,
    False,
}

impl Property {
    pub fn symbol(self) -> String {
        match self {
            Property::Max => "max".into(),
            Property::Min => "min".into(),
            Property::Count => "count".into(),
            Property::Sum => "sum".into(),
            Property::Avg => "avg".into(),
            Property::Diff => "diff".into(),
            Property::Multiply => "multiply".into(),
            Property::Div => "div".into(),
            Property::Equals => "equals".into(),
            Property::EqualsN(n) => format!("equals-{n}"),
            Property::More => "more".into(),
            Property::MoreThan(n) => format!("more-than-{n}"),
            Property::Less => "less".into(),
            Property::LessThan(n) => format!("less-than-{n}"),
            Property::AndTrue => "and-true".into(),
            Property::AndFalse => "and-false".into(),
            Property::OrTrue => "or-true".into(),
            Property::OrFalse => "or-false".into(),
            Property::IfExists => "if-exists".into(),
            Property::True => "true".into(),
            Property::False => "false".into(),
        }
    }
}

impl PartialOrd for Property {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

// Properties order by their rendered symbol so that sorted property lists
// render identically regardless of how they were built.
impl Ord for Property {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.symbol().cmp(&other.symbol())
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol())
    }
}

impl FromStr for Property {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase().replace('_', "-");
        let numbered = |prefix: &str| -> Option<u8> {
            s.strip_prefix(prefix)
                .and_then(|rest| rest.parse::<u8>().ok())
                .filter(|n| *n <= 2)
        };
        let prop = match s.as_str() {
            "max" => Property::Max,
            "min" => Property::Min,
            "count" => Property::Count,
            "sum" => Property::Sum,
            "avg" => Property::Avg,
            "diff" => Property::Diff,
            "multiply" => Property::Multiply,
            "div" => Property::Div,
            "equals" => Property::Equals,
            "more" => Property::More,
            "less" => Property::Less,
            "and-true" => Property::AndTrue,
            "and-false" => Property::AndFalse,
            "or-true" => Property::OrTrue,
            "or-false" => Property::OrFalse,
            "if-exists" => Property::IfExists,
            "true" => Property::True,
            "false" => Property::False,
            _ => {
                if let Some(n) = numbered("equals-") {
                    Property::EqualsN(n)
                } else if let Some(n) = numbered("more-than-") {
                    Property::MoreThan(n)
                } else if let Some(n) = numbered("less-than-") {
                    Property::LessThan(n)
                } else {
                    return Err(ModelError::UnknownProperty(s));
                }
            }
        };
        Ok(prop)
    }
}

impl Serialize for Property {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.symbol())
    }
}

impl<'de> Deserialize<'de> for Property {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Argument names of logical form steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArgName {
    Sub,
    Condition,
    Projection,
    Arg,
    Key,
    Value,
    Attribute,
    Intersect,
    Exclude,
    Order,
    Left,
    Right,
}

impl ArgName {
    pub const ALL: [ArgName; 12] = [
        ArgName::Sub,
        ArgName::Condition,
        ArgName::Projection,
        ArgName::Arg,
        ArgName::Key,
        ArgName::Value,
        ArgName::Attribute,
        ArgName::Intersect,
        ArgName::Exclude,
        ArgName::Order,
        ArgName::Left,
        ArgName::Right,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ArgName::Sub => "sub",
            ArgName::Condition => "condition",
            ArgName::Projection => "projection",
            ArgName::Arg => "arg",
            ArgName::Key => "key",
            ArgName::Value => "value",
            ArgName::Attribute => "attribute",
            ArgName::Intersect => "intersect",
            ArgName::Exclude => "exclude",
            ArgName::Order => "order",
            ArgName::Left => "left",
            ArgName::Right => "right",
        }
    }
}

impl PartialOrd for ArgName {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ArgName {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.as_str().cmp(other.as_str())
    }
}

impl fmt::Display for ArgName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ArgName {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        ArgName::ALL
            .iter()
            .copied()
            .find(|a| a.as_str() == lower)
            .ok_or_else(|| ModelError::UnknownArgument(s.to_string()))
    }
}
