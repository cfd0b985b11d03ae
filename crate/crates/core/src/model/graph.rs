use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::{EdgeTag, Question, SemanticTag};

pub const SEP_TOKEN: &str = "[SEP]";
pub const DUM_TOKEN: &str = "[DUM]";
pub const DUP_TOKEN: &str = "[DUP]";

/// Role of a position in an augmented question.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Question,
    Sep,
    Store,
    Dum,
    Dup,
}

impl TokenKind {
    /// Separator, dummy and duplicate placeholders carry no words.
    pub fn is_structural(self) -> bool {
        matches!(self, TokenKind::Sep | TokenKind::Dum | TokenKind::Dup)
    }
}

/// `base ++ [SEP] ++ store ++ [DUM]*k_dum ++ [DUP]*k_dup`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedQuestion {
    pub base: Question,
    pub tokens: Vec<String>,
    pub kinds: Vec<TokenKind>,
    pub sep_index: usize,
    pub store: Range<usize>,
    pub dum: Range<usize>,
    pub dup: Range<usize>,
}

impl AugmentedQuestion {
    pub fn new(base: Question, store_words: &[String], k_dum: usize, k_dup: usize) -> Self {
        let mut tokens = base.tokens.clone();
        let mut kinds = vec![TokenKind::Question; tokens.len()];
        let sep_index = tokens.len();
        tokens.push(SEP_TOKEN.to_string());
        kinds.push(TokenKind::Sep);
        let store = tokens.len()..tokens.len() + store_words.len();
        tokens.extend(store_words.iter().cloned());
        kinds.extend(std::iter::repeat_n(TokenKind::Store, store_words.len()));
        let dum = tokens.len()..tokens.len() + k_dum;
        tokens.extend(std::iter::repeat_n(DUM_TOKEN.to_string(), k_dum));
        kinds.extend(std::iter::repeat_n(TokenKind::Dum, k_dum));
        let dup = tokens.len()..tokens.len() + k_dup;
        tokens.extend(std::iter::repeat_n(DUP_TOKEN.to_string(), k_dup));
        kinds.extend(std::iter::repeat_n(TokenKind::Dup, k_dup));
        Self {
            base,
            tokens,
            kinds,
            sep_index,
            store,
            dum,
            dup,
        }
    }

    /// Recovers the layout from a flat token list, as stored in graph and
    /// tensor files. Tokens after `[SEP]` that are not placeholders are store
    /// words. Returns `None` when the placeholders are out of order or the
    /// question part is empty.
    pub fn from_tokens(tokens: &[String]) -> Option<Self> {
        let sep_index = tokens.iter().position(|t| t == SEP_TOKEN)?;
        let base = Question::new(tokens[..sep_index].to_vec()).ok()?;
        let rest = &tokens[sep_index + 1..];
        let n_store = rest
            .iter()
            .take_while(|t| *t != DUM_TOKEN && *t != DUP_TOKEN)
            .count();
        let after_store = &rest[n_store..];
        let k_dum = after_store.iter().take_while(|t| *t == DUM_TOKEN).count();
        let k_dup = after_store[k_dum..].iter().take_while(|t| *t == DUP_TOKEN).count();
        if k_dum + k_dup != after_store.len() {
            return None;
        }
        let store: Vec<String> = rest[..n_store].to_vec();
        Some(Self::new(base, &store, k_dum, k_dup))
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn kind(&self, i: usize) -> TokenKind {
        self.kinds[i]
    }

    /// Positions that alignment may target: question words and store words.
    pub fn alignable_len(&self) -> usize {
        self.store.end
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SdgEdge {
    pub src: usize,
    pub dst: usize,
    pub tag: SemanticTag,
}

/// Steps as nodes labelled with token positions of the augmented question.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpanDependencyGraph {
    /// Sorted token positions per node.
    pub nodes: Vec<Vec<usize>>,
    pub edges: Vec<SdgEdge>,
    /// `(dup_position, original_position)`: a `[DUP]` standing in for a
    /// token that an earlier node already owns.
    pub duplicates: Vec<(usize, usize)>,
}

impl SpanDependencyGraph {
    pub fn out_edges(&self, node: usize) -> impl Iterator<Item = &SdgEdge> {
        self.edges.iter().filter(move |e| e.src == node)
    }

    pub fn duplicate_target(&self, dup: usize) -> Option<usize> {
        self.duplicates
            .iter()
            .find(|(d, _)| *d == dup)
            .map(|(_, t)| *t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DgEdge {
    pub src: usize,
    pub dst: usize,
    pub tag: EdgeTag,
}

impl DgEdge {
    pub fn new(src: usize, dst: usize, tag: EdgeTag) -> Self {
        Self { src, dst, tag }
    }
}

/// Token-level labelled graph over an augmented question.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DependencyGraph {
    pub token_count: usize,
    pub edges: Vec<DgEdge>,
}

impl DependencyGraph {
    pub fn new(token_count: usize, mut edges: Vec<DgEdge>) -> Self {
        edges.sort();
        Self { token_count, edges }
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_lengths_add_up() {
        let q = Question::parse("a b c d e").unwrap();
        let store: Vec<String> = ["size", "date", "price"].iter().map(|s| s.to_string()).collect();
        let aug = AugmentedQuestion::new(q.clone(), &store, 4, 4);
        assert_eq!(aug.len(), 17);
        assert_eq!(aug.sep_index, 5);
        assert_eq!(aug.tokens[6], "size");
        assert_eq!(aug.kind(9), TokenKind::Dum);
        assert_eq!(aug.kind(16), TokenKind::Dup);
        let bare = AugmentedQuestion::new(q, &[], 4, 4);
        assert_eq!(bare.len(), 14);
    }

    #[test]
    fn layout_is_recoverable_from_tokens() {
        let q = Question::parse("how many flights").unwrap();
        let store: Vec<String> = vec!["flight".into()];
        let aug = AugmentedQuestion::new(q, &store, 2, 3);
        let back = AugmentedQuestion::from_tokens(&aug.tokens).unwrap();
        assert_eq!(back, aug);
    }
}
