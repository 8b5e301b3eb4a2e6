//! Text cleaning and bag-of-words valence scoring.
//!
//! A status scores the sum of the valences of its cleaned tokens; unknown
//! tokens contribute nothing and there is no negation handling. A batch's
//! alpha is the mean status score, and a subject's alpha is the mean of its
//! batch alphas.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use regex::Regex;

use crate::ingest::Status;

/// Small lexicon used by the hand-scored test fixtures.
pub const MINI_LEXICON_TSV: &str = include_str!("../data/lexicons/mini.tsv");
/// Roughly 2,000 common English words.
pub const COMMON_LEXICON_TSV: &str = include_str!("../data/lexicons/common_en.tsv");

#[derive(Debug, thiserror::Error)]
pub enum SentimentError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("lexicon {name}:{line}: {message}")]
    Lexicon { name: String, line: usize, message: String },
    #[error("cannot average an empty batch")]
    EmptyBatch,
    #[error("cannot aggregate an empty list of alphas")]
    EmptyAlphas,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    pub name: String,
    entries: HashMap<String, f64>,
}

impl Lexicon {
    /// Parses `token<TAB>valence` lines. `#` starts a comment line; blank
    /// lines are skipped; duplicate tokens are rejected.
    pub fn parse_tsv(name: &str, text: &str) -> Result<Self, SentimentError> {
        let mut entries = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let err = |message: String| SentimentError::Lexicon {
                name: name.to_string(),
                line: i + 1,
                message,
            };
            let mut cols = line.split('\t');
            let (Some(token), Some(value), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(err("expected two tab-separated columns".into()));
            };
            let token = token.trim();
            let valence: f64 = value
                .trim()
                .parse()
                .map_err(|_| err(format!("bad valence {value:?}")))?;
            if !valence.is_finite() {
                return Err(err(format!("non-finite valence {value:?}")));
            }
            if token.is_empty() || token.chars().any(char::is_whitespace) || token.to_lowercase() != token {
                return Err(err(format!(
                    "token {token:?} must be nonempty, lowercase, without whitespace"
                )));
            }
            if entries.insert(token.to_string(), valence).is_some() {
                return Err(err(format!("duplicate token {token:?}")));
            }
        }
        Ok(Lexicon {
            name: name.to_string(),
            entries,
        })
    }

    pub fn load(path: &Path) -> Result<Self, SentimentError> {
        let text = std::fs::read_to_string(path).map_err(|source| SentimentError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_tsv(&path.display().to_string(), &text)
    }

    pub fn mini() -> Self {
        Self::parse_tsv("mini", MINI_LEXICON_TSV).expect("bundled lexicon is valid")
    }

    pub fn common() -> Self {
        Self::parse_tsv("common_en", COMMON_LEXICON_TSV).expect("bundled lexicon is valid")
    }

    pub fn from_entries<I, S>(name: &str, entries: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        Lexicon {
            name: name.to_string(),
            entries: entries.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }

    pub fn valence(&self, token: &str) -> Option<f64> {
        self.entries.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries sorted by token.
    pub fn sorted_entries(&self) -> Vec<(&str, f64)> {
        let mut v: Vec<_> = self.entries.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Lexicon {
            name: self.name.clone(),
            entries: self.entries.iter().map(|(k, v)| (k.clone(), v * factor)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct SentimentScore(pub f64);

fn url_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)(?:https?://|www\.)\S*").unwrap())
}

fn mention_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"@\w*").unwrap())
}

/// Strips URLs and `@mentions`, drops `#` sigils, lowercases, turns
/// punctuation into spaces (apostrophes between two word characters
/// survive) and collapses whitespace.
pub fn clean_text(raw: &str) -> String {
    let no_urls = url_re().replace_all(raw, " ");
    let no_mentions = mention_re().replace_all(&no_urls, " ");
    let lowered: Vec<char> = no_mentions
        .chars()
        .flat_map(char::to_lowercase)
        .map(|c| if c == '\u{2019}' { '\'' } else { c })
        .collect();

    let mut out = String::with_capacity(lowered.len());
    for (i, &c) in lowered.iter().enumerate() {
        let keep = c.is_alphanumeric()
            || (c == '\''
                && i > 0
                && lowered[i - 1].is_alphanumeric()
                && lowered.get(i + 1).is_some_and(|n| n.is_alphanumeric()));
        if keep {
            out.push(c);
        } else if !out.is_empty() && !out.ends_with(' ') {
            out.push(' ');
        }
    }
    if out.ends_with(' ') {
        out.pop();
    }
    out
}

/// Sum of valences over whitespace-separated tokens of already-cleaned text.
pub fn score_text(cleaned: &str, lex: &Lexicon) -> SentimentScore {
    SentimentScore(cleaned.split_whitespace().filter_map(|t| lex.valence(t)).sum())
}

pub fn score_status(status: &Status, lex: &Lexicon) -> SentimentScore {
    score_text(&clean_text(&status.text), lex)
}

/// Mean status score of a batch.
pub fn batch_alpha(statuses: &[Status], lex: &Lexicon) -> Result<f64, SentimentError> {
    if statuses.is_empty() {
        return Err(SentimentError::EmptyBatch);
    }
    let total: f64 = statuses.iter().map(|s| score_status(s, lex).0).sum();
    Ok(total / statuses.len() as f64)
}

/// Unrounded mean of per-iteration alphas.
pub fn aggregate_alpha(alphas: &[f64]) -> Result<f64, SentimentError> {
    if alphas.is_empty() {
        return Err(SentimentError::EmptyAlphas);
    }
    Ok(alphas.iter().sum::<f64>() / alphas.len() as f64)
}
