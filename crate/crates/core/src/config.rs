//! Run configuration read from a TOML file.
//!
//! Every key is optional; missing keys keep their defaults and command-line
//! flags override whatever the file sets.
//!
//! ```toml
//! lexicon = "data/lexicon.json"      # file, or directory holding lexicon.json
//! combinations = "data/combinations.json"
//! k_dum = 4
//! k_dup = 4
//!
//! [align]
//! max_run = 6
//! time_limit_ms = 10000
//!
//! [align.weights]
//! min = 1000000
//! unique = 10000
//! seq = 100
//! exact = 1
//! reference = 1
//!
//! [decode]
//! time_limit_ms = 10000
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::align::{AlignConfig, AlignWeights};
use crate::graph::CombinationTable;
use crate::ilp::SolverConfig;
use crate::lexicon::Lexicon;
use crate::pipeline::PipelineConfig;

/// Environment variable naming the default lexicon file or directory.
pub const LEXICON_ENV: &str = "QDMR_DG_LEXICON";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Syntax { path: String, message: String },
    #[error("lexicon: {0}")]
    Lexicon(String),
    #[error("combinations: {0}")]
    Combinations(String),
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub lexicon: Option<PathBuf>,
    pub combinations: Option<PathBuf>,
    pub k_dum: Option<usize>,
    pub k_dup: Option<usize>,
    #[serde(default)]
    pub align: AlignSection,
    #[serde(default)]
    pub decode: DecodeSection,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlignSection {
    pub max_run: Option<usize>,
    pub time_limit_ms: Option<u64>,
    pub weights: Option<WeightsSection>,
}

/// Partial weights; absent entries keep the default value.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSection {
    pub min: Option<i64>,
    pub unique: Option<i64>,
    pub seq: Option<i64>,
    pub exact: Option<i64>,
    pub reference: Option<i64>,
}

impl WeightsSection {
    pub fn apply(&self, w: &mut AlignWeights) {
        if let Some(v) = self.min {
            w.min = v;
        }
        if let Some(v) = self.unique {
            w.unique = v;
        }
        if let Some(v) = self.seq {
            w.seq = v;
        }
        if let Some(v) = self.exact {
            w.exact = v;
        }
        if let Some(v) = self.reference {
            w.reference = v;
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecodeSection {
    pub time_limit_ms: Option<u64>,
}

impl ConfigFile {
    pub fn parse(text: &str, path: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Syntax {
            path: path.to_string(),
            message: e.to_string(),
        })
    }

    /// Reads a file. Relative paths inside it are resolved against the
    /// file's own directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        let mut file = Self::parse(&text, &path.display().to_string())?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut file.lexicon, &mut file.combinations].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(file)
    }
}

/// Everything a run needs, with defaults filled in.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    pub lexicon: Lexicon,
    pub combinations: CombinationTable,
    pub pipeline: PipelineConfig,
    pub decode: SolverConfig,
}

impl Settings {
    /// Resolves a file into settings. `lexicon_override` wins over the file,
    /// which wins over [`LEXICON_ENV`], which wins over the bundled lexicon.
    pub fn resolve(file: &ConfigFile, lexicon_override: Option<&Path>) -> Result<Self, ConfigError> {
        let env = std::env::var_os(LEXICON_ENV).map(PathBuf::from);
        let lexicon_path = lexicon_override
            .map(Path::to_path_buf)
            .or_else(|| file.lexicon.clone())
            .or(env);
        let lexicon = match lexicon_path {
            Some(p) => Lexicon::load(&p).map_err(|e| ConfigError::Lexicon(e.to_string()))?,
            None => Lexicon::default(),
        };
        let combinations = match &file.combinations {
            Some(p) => CombinationTable::load(p).map_err(|e| ConfigError::Combinations(e.to_string()))?,
            None => CombinationTable::default(),
        };

        let mut align = AlignConfig::default();
        if let Some(v) = file.align.max_run {
            align.max_run = v;
        }
        if let Some(v) = file.align.time_limit_ms {
            align.solver.time_limit_ms = v;
        }
        if let Some(w) = &file.align.weights {
            w.apply(&mut align.weights);
        }
        let mut pipeline = PipelineConfig {
            align,
            ..PipelineConfig::default()
        };
        if let Some(v) = file.k_dum {
            pipeline.k_dum = v;
        }
        if let Some(v) = file.k_dup {
            pipeline.k_dup = v;
        }
        let mut decode = SolverConfig::default();
        if let Some(v) = file.decode.time_limit_ms {
            decode.time_limit_ms = v;
        }
        Ok(Self {
            lexicon,
            combinations,
            pipeline,
            decode,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let f = ConfigFile::parse("k_dup = 7\n[align.weights]\nseq = 50\n", "t").unwrap();
        let s = Settings::resolve(&f, None).unwrap();
        assert_eq!(s.pipeline.k_dup, 7);
        assert_eq!(s.pipeline.k_dum, crate::graph::DEFAULT_K_DUM);
        assert_eq!(s.pipeline.align.weights.seq, 50);
        assert_eq!(s.pipeline.align.weights.min, AlignWeights::default().min);
    }

    #[test]
    fn unknown_keys_are_errors() {
        assert!(matches!(ConfigFile::parse("k_dumm = 3\n", "t"), Err(ConfigError::Syntax { .. })));
    }
}
