//! Run configuration, read from a TOML file.
//!
//! ```toml
//! fixtures = "fixtures"          # relative paths resolve against the file
//! output = "out"
//! lexicon = "lexicon.tsv"        # omit to use the bundled common lexicon
//! seed = 7
//! per_iteration_count = 950
//! iterations = 100
//!
//! [[group]]
//! kind = "individual"
//!
//! [[group.subject]]
//! name = "Elon Musk"
//! aliases = ["elon musk", "musk"]
//!
//! [[group.subject]]
//! name = "NYC"
//! geocode = { lat = 40.7, lon = -74.0, radius_km = 10.0 }
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::graph::EdgeKind;
use crate::ingest::{self, Geocode, QueryKind, QuerySpec, ResultType};
use crate::sentiment::Lexicon;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn default_fixtures() -> PathBuf {
    PathBuf::from("fixtures")
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn default_count() -> usize {
    ingest::DEFAULT_PER_ITERATION_COUNT
}
fn default_iterations() -> usize {
    ingest::DEFAULT_ITERATIONS
}
fn default_true() -> bool {
    true
}
fn default_kinds() -> Vec<EdgeKind> {
    EdgeKind::ALL.to_vec()
}
fn default_confidence() -> f64 {
    0.95
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_fixtures")]
    pub fixtures: PathBuf,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub lexicon: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_count")]
    pub per_iteration_count: usize,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default)]
    pub result_type: ResultType,
    #[serde(default = "default_true")]
    pub include_isolates: bool,
    #[serde(default = "default_kinds")]
    pub edge_kinds: Vec<EdgeKind>,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(default, rename = "group")]
    pub groups: Vec<GroupConfig>,
    #[serde(default)]
    pub synth: SynthConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    pub kind: QueryKind,
    /// Defaults to the kind label.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default, rename = "subject")]
    pub subjects: Vec<SubjectConfig>,
}

impl GroupConfig {
    pub fn name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.kind.label().to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubjectConfig {
    pub name: String,
    /// Search terms; defaults to the subject name.
    #[serde(default)]
    pub aliases: Vec<String>,
    #[serde(default)]
    pub geocode: Option<Geocode>,
}

/// Knobs for synthetic fixture trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    pub max_statuses: usize,
    pub alpha_intercept: f64,
    pub alpha_slope: f64,
    pub alpha_noise: f64,
    pub jitter: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            max_statuses: 50,
            alpha_intercept: 0.6,
            alpha_slope: 0.8,
            alpha_noise: 0.1,
            jitter: 0.02,
        }
    }
}

impl Config {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut cfg: Config = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.fixtures = base_dir.join(&cfg.fixtures);
        cfg.output = base_dir.join(&cfg.output);
        if let Some(lex) = &cfg.lexicon {
            cfg.lexicon = Some(base_dir.join(lex));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.per_iteration_count == 0 || self.iterations == 0 {
            return invalid("per_iteration_count and iterations must be >= 1".into());
        }
        if self.iterations > 1000 {
            return invalid("iterations must be <= 1000 (iteration files use three digits)".into());
        }
        if self.edge_kinds.is_empty() {
            return invalid("edge_kinds must not be empty".into());
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return invalid(format!("confidence {} is not in (0, 1)", self.confidence));
        }
        let mut names = BTreeSet::new();
        for g in &self.groups {
            let name = g.name();
            if name.is_empty() || name.contains(['/', '\\']) {
                return invalid(format!("bad group name {name:?}"));
            }
            if !names.insert(name.clone()) {
                return invalid(format!("duplicate group {name:?}"));
            }
            let mut slugs = BTreeSet::new();
            for s in &g.subjects {
                if !slugs.insert(ingest::subject_slug(&s.name)) {
                    return invalid(format!(
                        "group {name:?}: subject {:?} collides with another subject",
                        s.name
                    ));
                }
                self.query_spec(g, s)
                    .validate()
                    .map_err(|e| ConfigError::Invalid(format!("subject {:?}: {e}", s.name)))?;
            }
        }
        Ok(())
    }

    pub fn query_spec(&self, group: &GroupConfig, subject: &SubjectConfig) -> QuerySpec {
        let terms = if subject.aliases.is_empty() {
            vec![subject.name.clone()]
        } else {
            subject.aliases.clone()
        };
        let mut spec = QuerySpec::new(group.kind, subject.name.clone(), terms)
            .with_counts(self.per_iteration_count, self.iterations);
        spec.geocode = subject.geocode;
        spec.result_type = self.result_type;
        spec
    }

    pub fn query_specs(&self, group: &GroupConfig) -> Vec<Arc<QuerySpec>> {
        group
            .subjects
            .iter()
            .map(|s| Arc::new(self.query_spec(group, s)))
            .collect()
    }

    pub fn edge_kind_set(&self) -> BTreeSet<EdgeKind> {
        self.edge_kinds.iter().copied().collect()
    }

    /// Groups whose name is in `only`, or all groups when `only` is empty.
    pub fn selected_groups(&self, only: &[String]) -> Result<Vec<&GroupConfig>, ConfigError> {
        for name in only {
            if !self.groups.iter().any(|g| &g.name() == name) {
                return Err(ConfigError::Invalid(format!("unknown group {name:?}")));
            }
        }
        Ok(self
            .groups
            .iter()
            .filter(|g| only.is_empty() || only.contains(&g.name()))
            .collect())
    }

    pub fn load_lexicon(&self) -> Result<Lexicon, crate::sentiment::SentimentError> {
        match &self.lexicon {
            Some(path) => Lexicon::load(path),
            None => Ok(Lexicon::common()),
        }
    }

    /// A config with the four standard groups and six subjects each.
    pub fn standard(subjects_per_group: usize, iterations: usize, seed: u64) -> Self {
        let groups = QueryKind::ALL
            .into_iter()
            .map(|kind| GroupConfig {
                kind,
                name: None,
                subjects: (0..subjects_per_group)
                    .map(|i| SubjectConfig {
                        name: format!("{} subject {}", kind.label(), i + 1),
                        aliases: Vec::new(),
                        geocode: None,
                    })
                    .collect(),
            })
            .collect();
        Config {
            fixtures: default_fixtures(),
            output: default_output(),
            lexicon: None,
            seed,
            per_iteration_count: default_count(),
            iterations,
            result_type: ResultType::Mixed,
            include_isolates: true,
            edge_kinds: default_kinds(),
            confidence: default_confidence(),
            groups,
            synth: SynthConfig::default(),
        }
    }
}
