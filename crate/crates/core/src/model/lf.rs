use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use super::{ArgName, ModelError, Operator, Property};

/// A single token inside an argument value: either a word or a reference to
/// an earlier step (0-based index; rendered 1-based as `#k`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ArgToken {
    Ref(usize),
    Word(String),
}

impl ArgToken {
    pub fn word(s: impl Into<String>) -> Self {
        ArgToken::Word(s.into())
    }

    pub fn as_ref_index(&self) -> Option<usize> {
        match self {
            ArgToken::Ref(i) => Some(*i),
            ArgToken::Word(_) => None,
        }
    }

    pub fn as_word(&self) -> Option<&str> {
        match self {
            ArgToken::Word(w) => Some(w),
            ArgToken::Ref(_) => None,
        }
    }
}

impl PartialOrd for ArgToken {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// References sort before words; references numerically, words alphabetically.
impl Ord for ArgToken {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ArgToken::Ref(a), ArgToken::Ref(b)) => a.cmp(b),
            (ArgToken::Ref(_), ArgToken::Word(_)) => Ordering::Less,
            (ArgToken::Word(_), ArgToken::Ref(_)) => Ordering::Greater,
            (ArgToken::Word(a), ArgToken::Word(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ArgToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArgToken::Ref(i) => write!(f, "#{}", i + 1),
            ArgToken::Word(w) => f.write_str(w),
        }
    }
}

/// One named argument of a logical form step.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Argument {
    pub name: ArgName,
    pub value: Vec<ArgToken>,
}

impl Argument {
    pub fn new(name: ArgName, value: Vec<ArgToken>) -> Self {
        Self { name, value }
    }

    pub fn refs(&self) -> impl Iterator<Item = usize> + '_ {
        self.value.iter().filter_map(ArgToken::as_ref_index)
    }

    /// Value tokens in canonical order: references first, then words.
    pub fn sorted_value(&self) -> Vec<&ArgToken> {
        let mut v: Vec<&ArgToken> = self.value.iter().collect();
        v.sort();
        v
    }
}

/// A logical form step `<operator, properties, arguments>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LogicalFormStep {
    pub operator: Operator,
    /// Sorted and deduplicated.
    pub properties: Vec<Property>,
    pub args: Vec<Argument>,
}

impl LogicalFormStep {
    pub fn new(operator: Operator, properties: Vec<Property>, args: Vec<Argument>) -> Self {
        let properties: Vec<Property> = properties
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Self {
            operator,
            properties,
            args,
        }
    }

    pub fn refs(&self) -> BTreeSet<usize> {
        self.args.iter().flat_map(|a| a.refs()).collect()
    }

    pub fn args_named(&self, name: ArgName) -> impl Iterator<Item = &Argument> {
        self.args.iter().filter(move |a| a.name == name)
    }

    /// Canonical `OPERATOR[props](name=value; ...)` string.
    pub fn render(&self) -> String {
        self.render_with(|t| t.to_string())
    }

    /// Renders with a custom token formatter; the formatter sees the
    /// tokens in canonical order. Arguments are sorted by name and then by
    /// their rendered value.
    pub fn render_with<F: Fn(&ArgToken) -> String>(&self, fmt_token: F) -> String {
        let props = self
            .properties
            .iter()
            .map(|p| p.symbol())
            .collect::<Vec<_>>()
            .join(",");
        let mut args: Vec<(ArgName, String)> = self
            .args
            .iter()
            .map(|a| {
                let value = a
                    .sorted_value()
                    .into_iter()
                    .map(&fmt_token)
                    .collect::<Vec<_>>()
                    .join(" ");
                (a.name, value)
            })
            .collect();
        args.sort();
        let args = args
            .iter()
            .map(|(n, v)| format!("{n}={v}"))
            .collect::<Vec<_>>()
            .join("; ");
        format!(
            "{}[{}]({})",
            self.operator.as_str().to_ascii_uppercase(),
            props,
            args
        )
    }

    /// Parses the canonical rendering produced by [`LogicalFormStep::render`].
    pub fn parse(s: &str) -> Result<Self, ModelError> {
        let bad = |why: &str| ModelError::MalformedStep(format!("{why}: {s}"));
        let s = s.trim();
        let open_prop = s.find('[').ok_or_else(|| bad("missing '['"))?;
        let close_prop = s[open_prop..]
            .find(']')
            .map(|i| i + open_prop)
            .ok_or_else(|| bad("missing ']'"))?;
        let operator: Operator = s[..open_prop].parse()?;
        let props_str = &s[open_prop + 1..close_prop];
        let properties = if props_str.trim().is_empty() {
            Vec::new()
        } else {
            props_str
                .split(',')
                .map(str::parse)
                .collect::<Result<Vec<Property>, _>>()?
        };
        let rest = &s[close_prop + 1..];
        let inner = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| bad("arguments must be parenthesised"))?;
        let mut args = Vec::new();
        if !inner.trim().is_empty() {
            for part in inner.split("; ") {
                let eq = part.find('=').ok_or_else(|| bad("argument without '='"))?;
                let name: ArgName = part[..eq].parse()?;
                let value = part[eq + 1..]
                    .split_whitespace()
                    .map(parse_arg_token)
                    .collect::<Result<Vec<_>, _>>()?;
                args.push(Argument::new(name, value));
            }
        }
        Ok(LogicalFormStep::new(operator, properties, args))
    }

    /// Checks operator/property/argument compatibility and that references
    /// point to earlier steps (`index` is this step's 0-based position).
    pub fn validate(&self, index: usize) -> Result<(), ModelError> {
        for p in &self.properties {
            if !self.operator.allows_property(*p) {
                return Err(ModelError::InvalidProperty {
                    operator: self.operator,
                    property: *p,
                });
            }
        }
        for (i, a) in self.args.iter().enumerate() {
            if !self.operator.allows_argument(a.name) {
                return Err(ModelError::InvalidArgument {
                    operator: self.operator,
                    name: a.name,
                });
            }
            if !self.operator.is_repeatable(a.name)
                && self.args[..i].iter().any(|b| b.name == a.name)
            {
                return Err(ModelError::RepeatedArgument {
                    operator: self.operator,
                    name: a.name,
                });
            }
            for r in a.refs() {
                if r >= index {
                    return Err(ModelError::ForwardReference { step: index, target: r });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for LogicalFormStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn parse_arg_token(s: &str) -> Result<ArgToken, ModelError> {
    if let Some(num) = s.strip_prefix('#') {
        if let Ok(k) = num.parse::<usize>() {
            if k == 0 {
                return Err(ModelError::MalformedReference(s.to_string()));
            }
            return Ok(ArgToken::Ref(k - 1));
        }
    }
    Ok(ArgToken::Word(s.to_string()))
}

/// An ordered sequence of logical form steps.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LogicalForm {
    pub steps: Vec<LogicalFormStep>,
}

impl LogicalForm {
    pub fn new(steps: Vec<LogicalFormStep>) -> Self {
        Self { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.steps.is_empty() {
            return Err(ModelError::EmptyLogicalForm);
        }
        for (i, s) in self.steps.iter().enumerate() {
            s.validate(i)?;
        }
        Ok(())
    }

    pub fn render(&self) -> Vec<String> {
        self.steps.iter().map(LogicalFormStep::render).collect()
    }
}

impl fmt::Display for LogicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{}. {}", i + 1, s)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> ArgToken {
        ArgToken::word(s)
    }

    #[test]
    fn renders_select() {
        let step = LogicalFormStep::new(
            Operator::Select,
            vec![],
            vec![Argument::new(ArgName::Sub, vec![w("cubes")])],
        );
        assert_eq!(step.render(), "SELECT[](sub=cubes)");
    }

    #[test]
    fn renders_aggregate_max() {
        let step = LogicalFormStep::new(
            Operator::Aggregate,
            vec![Property::Max],
            vec![Argument::new(ArgName::Arg, vec![ArgToken::Ref(0)])],
        );
        assert_eq!(step.render(), "AGGREGATE[max](arg=#1)");
    }

    #[test]
    fn union_arguments_are_canonicalised() {
        let step = LogicalFormStep::new(
            Operator::Union,
            vec![],
            vec![
                Argument::new(ArgName::Sub, vec![ArgToken::Ref(1)]),
                Argument::new(ArgName::Sub, vec![ArgToken::Ref(0)]),
            ],
        );
        assert_eq!(step.render(), "UNION[](sub=#1; sub=#2)");
    }

    #[test]
    fn value_tokens_put_references_first() {
        let step = LogicalFormStep::new(
            Operator::Filter,
            vec![],
            vec![
                Argument::new(ArgName::Sub, vec![ArgToken::Ref(0)]),
                Argument::new(ArgName::Condition, vec![w("in"), ArgToken::Ref(1), w("alpha")]),
            ],
        );
        assert_eq!(step.render(), "FILTER[](condition=#2 alpha in; sub=#1)");
    }

    #[test]
    fn parse_round_trips_rendering() {
        for s in [
            "SELECT[](sub=cubes)",
            "COMPARATIVE[more](attribute=#2; condition=100; sub=#1)",
            "UNION[](sub=#1; sub=#2)",
            "BOOLEAN[if-exists](condition=red; sub=#1)",
            "SELECT[]()",
        ] {
            let step = LogicalFormStep::parse(s).unwrap();
            assert_eq!(step.render(), s);
        }
    }

    #[test]
    fn validation_rejects_foreign_arguments() {
        let step = LogicalFormStep::new(
            Operator::Select,
            vec![],
            vec![Argument::new(ArgName::Left, vec![w("x")])],
        );
        assert!(step.validate(0).is_err());
        let step = LogicalFormStep::new(
            Operator::Filter,
            vec![],
            vec![
                Argument::new(ArgName::Sub, vec![ArgToken::Ref(0)]),
                Argument::new(ArgName::Sub, vec![ArgToken::Ref(0)]),
            ],
        );
        assert!(matches!(
            step.validate(1),
            Err(ModelError::RepeatedArgument { .. })
        ));
        let step = LogicalFormStep::new(
            Operator::Filter,
            vec![],
            vec![Argument::new(ArgName::Sub, vec![ArgToken::Ref(1)])],
        );
        assert!(step.validate(1).is_err());
    }
}
