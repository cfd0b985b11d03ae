use std::fmt;

use super::ModelError;

/// Lowercases and splits text into tokens; punctuation becomes separate
/// tokens, except commas and periods inside numbers and a trailing `'s`
/// which is split off as its own token.
pub fn tokenize(text: &str) -> Vec<String> {
    const PUNCT: &[char] = &[',', '.', '?', '!', ';', ':', '(', ')', '"', '[', ']', '{', '}'];
    let lower = text.to_lowercase();
    let mut out = Vec::new();
    for raw in lower.split_whitespace() {
        let chars: Vec<char> = raw.chars().collect();
        let mut current = String::new();
        for (i, &c) in chars.iter().enumerate() {
            let inside_number = (c == ',' || c == '.')
                && i > 0
                && chars[i - 1].is_ascii_digit()
                && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit());
            if PUNCT.contains(&c) && !inside_number {
                if !current.is_empty() {
                    out.push(std::mem::take(&mut current));
                }
                out.push(c.to_string());
            } else {
                current.push(c);
            }
        }
        if !current.is_empty() {
            if current.len() > 2 && current.ends_with("'s") {
                let stem = current[..current.len() - 2].to_string();
                out.push(stem);
                out.push("'s".to_string());
            } else {
                out.push(current);
            }
        }
    }
    out
}

/// Punctuation tokens, including the possessive `'s`.
pub fn is_punctuation(w: &str) -> bool {
    w == "'s" || (!w.is_empty() && w.chars().all(|c| c.is_ascii_punctuation()))
}

/// A tokenized, lowercased question.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Question {
    pub tokens: Vec<String>,
}

impl Question {
    pub fn new(tokens: Vec<String>) -> Result<Self, ModelError> {
        if tokens.is_empty() {
            return Err(ModelError::EmptyQuestion);
        }
        if tokens.iter().any(|t| t.is_empty()) {
            return Err(ModelError::EmptyToken);
        }
        Ok(Self { tokens })
    }

    pub fn parse(text: &str) -> Result<Self, ModelError> {
        Self::new(tokenize(text))
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// A QDMR step token: a word or a reference to an earlier step (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StepToken {
    Word(String),
    Ref(usize),
}

impl StepToken {
    pub fn as_word(&self) -> Option<&str> {
        match self {
            StepToken::Word(w) => Some(w),
            StepToken::Ref(_) => None,
        }
    }

    pub fn as_ref_index(&self) -> Option<usize> {
        match self {
            StepToken::Ref(k) => Some(*k),
            StepToken::Word(_) => None,
        }
    }
}

impl fmt::Display for StepToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepToken::Word(w) => f.write_str(w),
            StepToken::Ref(k) => write!(f, "#{}", k + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QdmrStep {
    pub tokens: Vec<StepToken>,
}

impl QdmrStep {
    pub fn refs(&self) -> impl Iterator<Item = usize> + '_ {
        self.tokens.iter().filter_map(StepToken::as_ref_index)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn text(&self) -> String {
        self.tokens
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A question decomposition: steps whose references only point backwards.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Qdmr {
    pub steps: Vec<QdmrStep>,
}

impl Qdmr {
    pub fn new(steps: Vec<QdmrStep>) -> Result<Self, ModelError> {
        if steps.is_empty() {
            return Err(ModelError::EmptyDecomposition);
        }
        for (i, step) in steps.iter().enumerate() {
            if step.tokens.is_empty() {
                return Err(ModelError::EmptyStep(i));
            }
            for r in step.refs() {
                if r >= i {
                    return Err(ModelError::MalformedReference(format!(
                        "#{} in step {}",
                        r + 1,
                        i + 1
                    )));
                }
            }
        }
        Ok(Self { steps })
    }

    /// Parses BREAK-style text: steps separated by `;`, each optionally
    /// prefixed by `return`.
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        if text.trim().is_empty() {
            return Err(ModelError::EmptyDecomposition);
        }
        let mut segments: Vec<&str> = text.split(';').collect();
        while segments.last().is_some_and(|s| s.trim().is_empty()) {
            segments.pop();
        }
        let mut steps = Vec::with_capacity(segments.len());
        for (i, seg) in segments.iter().enumerate() {
            let mut words = tokenize(seg);
            if words.first().map(String::as_str) == Some("return") {
                words.remove(0);
            }
            if words.is_empty() {
                return Err(ModelError::EmptyStep(i));
            }
            let tokens = words
                .into_iter()
                .map(|w| classify_reference(&w))
                .collect::<Result<Vec<_>, _>>()?;
            steps.push(QdmrStep { tokens });
        }
        Self::new(steps)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Renders back to `return ... ;return ...` form.
    pub fn text(&self) -> String {
        self.steps
            .iter()
            .map(|s| format!("return {}", s.text()))
            .collect::<Vec<_>>()
            .join(" ;")
    }
}

fn classify_reference(word: &str) -> Result<StepToken, ModelError> {
    if let Some(rest) = word.strip_prefix('#') {
        return match rest.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(StepToken::Ref(k - 1)),
            _ => Err(ModelError::MalformedReference(word.to_string())),
        };
    }
    Ok(StepToken::Word(word.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const CENSUS: &str = "return census groups ;return #1 that is Pacific islander ;\
        return #1 that is African American ;return size of #2 ;return size of #3 ;\
        return which is lowest of #4 , #5";

    #[test]
    fn tokenizes_punctuation() {
        assert_eq!(
            tokenize("Which group, from the census?"),
            vec!["which", "group", ",", "from", "the", "census", "?"]
        );
        assert_eq!(tokenize("1,000 people"), vec!["1,000", "people"]);
        assert_eq!(tokenize("Obama's wife"), vec!["obama", "'s", "wife"]);
    }

    #[test]
    fn parses_single_step() {
        let q = Qdmr::parse("return cubes").unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(q.steps[0].tokens, vec![StepToken::Word("cubes".into())]);
    }

    #[test]
    fn self_reference_is_malformed() {
        assert!(matches!(
            Qdmr::parse("return #1 ;"),
            Err(ModelError::MalformedReference(_))
        ));
        assert!(matches!(
            Qdmr::parse("return a ;return #0"),
            Err(ModelError::MalformedReference(_))
        ));
        assert!(matches!(
            Qdmr::parse("return a ;return #3"),
            Err(ModelError::MalformedReference(_))
        ));
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(matches!(Qdmr::parse("  "), Err(ModelError::EmptyDecomposition)));
        assert!(matches!(Qdmr::parse("return a ; ;return b"), Err(ModelError::EmptyStep(1))));
    }

    #[test]
    fn parses_census_decomposition() {
        let q = Qdmr::parse(CENSUS).unwrap();
        assert_eq!(q.len(), 6);
        let refs: Vec<usize> = q.steps[5].refs().collect();
        assert_eq!(refs, vec![3, 4]);
        assert_eq!(q.steps[1].text(), "#1 that is pacific islander");
    }
}
