//! Conversation data model, fixture files, query strings and the remote
//! search source.
//!
//! A fixture file holds one JSON object per line:
//!
//! ```text
//! {"id":"1","text":"hi @bob","author":"alice","created_at":"2022-12-01T00:00:00Z","mentions":["bob"]}
//! ```
//!
//! Required fields are `id`, `text`, `author` and `created_at`; `reply_to`,
//! `mentions`, `retweet_of` and `quote_of` are optional, and unknown fields
//! are ignored. Fixture trees are laid out as
//! `<root>/<group>/<subject-slug>/iter_<NNN>`.

use std::fmt;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

pub const DEFAULT_PER_ITERATION_COUNT: usize = 950;
pub const DEFAULT_ITERATIONS: usize = 100;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed record: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: missing required field `{field}`")]
    MissingField {
        path: PathBuf,
        line: usize,
        field: &'static str,
    },
    #[error("invalid handle {0:?}")]
    InvalidHandle(String),
    #[error("batch exceeds per_iteration_count ({count} > {limit})")]
    BatchTooLarge { count: usize, limit: usize },
    #[error("iteration index {index} out of range for {iterations} iterations")]
    IndexOutOfRange { index: usize, iterations: usize },
    #[error("invalid query spec: {0}")]
    InvalidSpec(String),
    #[error("query for {0:?} has no terms and no geocode")]
    EmptyQuery(String),
}

/// A user handle: lowercase, no leading `@`, no whitespace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Handle(String);

impl Handle {
    pub fn parse(raw: &str) -> Result<Self, IngestError> {
        normalize_handle(raw).map(Handle)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Handle {
    type Error = IngestError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Handle::parse(&value)
    }
}

impl From<Handle> for String {
    fn from(h: Handle) -> String {
        h.0
    }
}

impl fmt::Display for Handle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Trims, strips leading `@` sigils and lowercases. Idempotent.
pub fn normalize_handle(raw: &str) -> Result<String, IngestError> {
    let h = raw.trim().trim_start_matches('@').to_lowercase();
    if h.is_empty() || h.contains('@') || h.chars().any(char::is_whitespace) {
        return Err(IngestError::InvalidHandle(raw.to_string()));
    }
    Ok(h)
}

/// One message with its directed references to other users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Status {
    pub id: String,
    pub text: String,
    pub author: Handle,
    pub created_at: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reply_to: Option<Handle>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mentions: Vec<Handle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retweet_of: Option<Handle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quote_of: Option<Handle>,
}

impl Status {
    pub fn new(id: impl Into<String>, author: Handle, text: impl Into<String>, created_at: DateTime<Utc>) -> Self {
        Status {
            id: id.into(),
            text: text.into(),
            author,
            created_at,
            reply_to: None,
            mentions: Vec::new(),
            retweet_of: None,
            quote_of: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryKind {
    Topical,
    Event,
    Geographic,
    Individual,
}

impl QueryKind {
    pub const ALL: [QueryKind; 4] = [
        QueryKind::Topical,
        QueryKind::Event,
        QueryKind::Geographic,
        QueryKind::Individual,
    ];

    pub fn label(self) -> &'static str {
        match self {
            QueryKind::Topical => "topical",
            QueryKind::Event => "event",
            QueryKind::Geographic => "geographic",
            QueryKind::Individual => "individual",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        QueryKind::ALL.into_iter().find(|k| k.label() == label)
    }
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResultType {
    #[default]
    Mixed,
    Recent,
    Popular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geocode {
    pub lat: f64,
    pub lon: f64,
    pub radius_km: f64,
}

impl Geocode {
    pub fn validate(&self) -> Result<(), IngestError> {
        let ok = (-90.0..=90.0).contains(&self.lat)
            && (-180.0..=180.0).contains(&self.lon)
            && self.radius_km.is_finite()
            && self.radius_km > 0.0;
        if ok {
            Ok(())
        } else {
            Err(IngestError::InvalidSpec(format!("geocode out of range: {self:?}")))
        }
    }
}

impl fmt::Display for Geocode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}km", self.lat, self.lon, self.radius_km)
    }
}

/// What to search for and how many times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuerySpec {
    pub kind: QueryKind,
    pub subject: String,
    /// Search terms (the subject name plus any aliases); joined with `OR`.
    pub terms: Vec<String>,
    pub geocode: Option<Geocode>,
    pub result_type: ResultType,
    pub per_iteration_count: usize,
    pub iterations: usize,
}

impl QuerySpec {
    pub fn new(kind: QueryKind, subject: impl Into<String>, terms: Vec<String>) -> Self {
        QuerySpec {
            kind,
            subject: subject.into(),
            terms,
            geocode: None,
            result_type: ResultType::Mixed,
            per_iteration_count: DEFAULT_PER_ITERATION_COUNT,
            iterations: DEFAULT_ITERATIONS,
        }
    }

    pub fn with_geocode(mut self, geocode: Geocode) -> Self {
        self.geocode = Some(geocode);
        self
    }

    pub fn with_counts(mut self, per_iteration_count: usize, iterations: usize) -> Self {
        self.per_iteration_count = per_iteration_count;
        self.iterations = iterations;
        self
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        if self.per_iteration_count == 0 {
            return Err(IngestError::InvalidSpec("per_iteration_count must be >= 1".into()));
        }
        if self.iterations == 0 {
            return Err(IngestError::InvalidSpec("iterations must be >= 1".into()));
        }
        if let Some(g) = &self.geocode {
            g.validate()?;
        }
        Ok(())
    }
}

/// Renders the search expression for a spec: terms joined with ` OR `,
/// followed by a `geocode:lat,lon,Rkm` operator when a geocode is set.
pub fn build_query(spec: &QuerySpec) -> Result<String, IngestError> {
    spec.validate()?;
    let terms: Vec<&str> = spec.terms.iter().map(|t| t.trim()).filter(|t| !t.is_empty()).collect();
    let mut query = terms.join(" OR ");
    match (&spec.geocode, query.is_empty()) {
        (None, true) => return Err(IngestError::EmptyQuery(spec.subject.clone())),
        (None, false) => {}
        (Some(g), true) => query = format!("geocode:{g}"),
        (Some(g), false) => query = format!("{query} geocode:{g}"),
    }
    Ok(query)
}

/// One of the repeated pulls for a subject.
#[derive(Debug, Clone)]
pub struct IterationBatch {
    pub spec: Arc<QuerySpec>,
    pub index: usize,
    pub statuses: Vec<Status>,
}

impl IterationBatch {
    pub fn new(spec: Arc<QuerySpec>, index: usize, statuses: Vec<Status>) -> Result<Self, IngestError> {
        if index >= spec.iterations {
            return Err(IngestError::IndexOutOfRange {
                index,
                iterations: spec.iterations,
            });
        }
        if statuses.len() > spec.per_iteration_count {
            return Err(IngestError::BatchTooLarge {
                count: statuses.len(),
                limit: spec.per_iteration_count,
            });
        }
        Ok(IterationBatch { spec, index, statuses })
    }
}

#[derive(Deserialize)]
struct RawStatus {
    id: Option<String>,
    text: Option<String>,
    author: Option<String>,
    created_at: Option<DateTime<Utc>>,
    #[serde(default)]
    reply_to: Option<String>,
    #[serde(default)]
    mentions: Option<Vec<String>>,
    #[serde(default)]
    retweet_of: Option<String>,
    #[serde(default)]
    quote_of: Option<String>,
}

fn parse_line(path: &Path, line_no: usize, line: &str) -> Result<Status, IngestError> {
    let malformed = |message: String| IngestError::Malformed {
        path: path.to_path_buf(),
        line: line_no,
        message,
    };
    let missing = |field| IngestError::MissingField {
        path: path.to_path_buf(),
        line: line_no,
        field,
    };
    let raw: RawStatus = serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
    let id = raw.id.filter(|s| !s.is_empty()).ok_or_else(|| missing("id"))?;
    let author = raw.author.ok_or_else(|| missing("author"))?;
    let text = raw.text.ok_or_else(|| missing("text"))?;
    let created_at = raw.created_at.ok_or_else(|| missing("created_at"))?;
    let handle = |h: &str| Handle::parse(h).map_err(|e| malformed(e.to_string()));
    let opt_handle = |h: Option<String>| h.as_deref().map(handle).transpose();
    Ok(Status {
        id,
        text,
        author: handle(&author)?,
        created_at,
        reply_to: opt_handle(raw.reply_to)?,
        mentions: raw
            .mentions
            .unwrap_or_default()
            .iter()
            .map(|m| handle(m))
            .collect::<Result<_, _>>()?,
        retweet_of: opt_handle(raw.retweet_of)?,
        quote_of: opt_handle(raw.quote_of)?,
    })
}

/// Reads every status of a fixture file, in file order. Blank lines are
/// skipped; line numbers in errors are 1-based.
pub fn read_statuses(path: &Path) -> Result<Vec<Status>, IngestError> {
    let io_err = |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    };
    let reader = BufReader::new(File::open(path).map_err(io_err)?);
    let mut statuses = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        statuses.push(parse_line(path, i + 1, &line)?);
    }
    Ok(statuses)
}

/// Parses one fixture file into the batch for iteration `index` of `spec`.
pub fn parse_fixture(path: &Path, spec: &Arc<QuerySpec>, index: usize) -> Result<IterationBatch, IngestError> {
    let statuses = read_statuses(path)?;
    IterationBatch::new(Arc::clone(spec), index, statuses)
}

pub fn write_fixture(path: &Path, statuses: &[Status]) -> Result<(), IngestError> {
    let io_err = |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err)?;
    }
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    for status in statuses {
        let line = serde_json::to_string(status).expect("status serializes");
        writeln!(w, "{line}").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Directory-safe form of a subject name: lowercase alphanumerics with runs
/// of anything else collapsed to `_`.
pub fn subject_slug(subject: &str) -> String {
    let mut slug = String::new();
    for c in subject.trim().chars().flat_map(char::to_lowercase) {
        if c.is_alphanumeric() {
            slug.push(c);
        } else if !slug.ends_with('_') {
            slug.push('_');
        }
    }
    let slug = slug.trim_matches('_').to_string();
    if slug.is_empty() {
        "_".to_string()
    } else {
        slug
    }
}

pub fn iteration_file_name(index: usize) -> String {
    format!("iter_{index:03}")
}

pub fn subject_dir(root: &Path, group: &str, subject: &str) -> PathBuf {
    root.join(group).join(subject_slug(subject))
}

pub fn fixture_path(root: &Path, group: &str, subject: &str, index: usize) -> PathBuf {
    subject_dir(root, group, subject).join(iteration_file_name(index))
}

/// Lists the `iter_NNN` files of a subject directory as `(index, path)`,
/// sorted by index.
pub fn list_iterations(dir: &Path) -> Result<Vec<(usize, PathBuf)>, IngestError> {
    let io_err = |source| IngestError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut found = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let entry = entry.map_err(io_err)?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        let Some(digits) = name.strip_prefix("iter_") else {
            continue;
        };
        if digits.len() == 3 && digits.bytes().all(|b| b.is_ascii_digit()) {
            found.push((digits.parse().expect("three digits"), entry.path()));
        }
    }
    found.sort();
    Ok(found)
}

#[derive(Debug, thiserror::Error)]
pub enum SourceError {
    #[error("rate limited{}", retry_after.map(|d| format!(", retry after {}s", d.as_secs())).unwrap_or_default())]
    RateLimited { retry_after: Option<Duration> },
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("network failure: {0}")]
    Network(String),
    #[error("source returned unusable data: {0}")]
    Data(String),
}

/// A remote search endpoint. Calls against one client are expected to be
/// serialized by the caller.
pub trait SearchClient {
    fn search(
        &self,
        query: &str,
        count: usize,
        result_type: ResultType,
        geocode: Option<Geocode>,
    ) -> Result<Vec<Status>, SourceError>;
}

/// Runs one search for `spec` and tags the result as iteration `index`.
/// Results beyond `per_iteration_count` are dropped.
pub fn fetch_iteration<C: SearchClient + ?Sized>(
    client: &C,
    spec: &Arc<QuerySpec>,
    index: usize,
) -> crate::Result<IterationBatch> {
    let query = build_query(spec)?;
    if index >= spec.iterations {
        return Err(IngestError::IndexOutOfRange {
            index,
            iterations: spec.iterations,
        }
        .into());
    }
    let mut statuses = client.search(&query, spec.per_iteration_count, spec.result_type, spec.geocode)?;
    statuses.truncate(spec.per_iteration_count);
    Ok(IterationBatch::new(Arc::clone(spec), index, statuses)?)
}

/// Replays the `iter_NNN` files of one subject directory, one file per
/// search call, in index order.
#[derive(Debug)]
pub struct FixtureClient {
    files: Vec<PathBuf>,
    cursor: AtomicUsize,
}

impl FixtureClient {
    pub fn open(dir: &Path) -> Result<Self, IngestError> {
        let files = list_iterations(dir)?.into_iter().map(|(_, p)| p).collect();
        Ok(FixtureClient {
            files,
            cursor: AtomicUsize::new(0),
        })
    }
}

impl SearchClient for FixtureClient {
    fn search(
        &self,
        _query: &str,
        count: usize,
        _: ResultType,
        _: Option<Geocode>,
    ) -> Result<Vec<Status>, SourceError> {
        let i = self.cursor.fetch_add(1, Ordering::SeqCst);
        let path = self
            .files
            .get(i)
            .ok_or_else(|| SourceError::Data(format!("fixture replay exhausted after {} files", self.files.len())))?;
        let mut statuses = read_statuses(path).map_err(|e| SourceError::Data(e.to_string()))?;
        statuses.truncate(count);
        Ok(statuses)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;
    use proptest::prelude::*;

    fn ts() -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2022, 12, 1, 0, 0, 0).unwrap()
    }

    fn spec() -> Arc<QuerySpec> {
        Arc::new(QuerySpec::new(QueryKind::Topical, "HVAC", vec!["HVAC".into()]))
    }

    fn write_lines(lines: &[String]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        for l in lines {
            writeln!(f, "{l}").unwrap();
        }
        f
    }

    fn line(id: usize, author: &str) -> String {
        format!(r#"{{"id":"{id}","text":"hello","author":"{author}","created_at":"2022-12-01T00:00:00Z"}}"#)
    }

    #[test]
    fn three_lines_three_statuses() {
        let f = write_lines(&[line(1, "a"), line(2, "b"), line(3, "c")]);
        let batch = parse_fixture(f.path(), &spec(), 0).unwrap();
        assert_eq!(batch.statuses.len(), 3);
        let ids: Vec<_> = batch.statuses.iter().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, ["1", "2", "3"]);
    }

    #[test]
    fn author_sigil_and_case_normalized() {
        let f = write_lines(&[line(1, "@Alice")]);
        let batch = parse_fixture(f.path(), &spec(), 0).unwrap();
        assert_eq!(batch.statuses[0].author.as_str(), "alice");
    }

    #[test]
    fn references_and_unknown_fields() {
        let f = write_lines(&[r#"{"id":"9","text":"x","author":"A","created_at":"2022-12-01T00:00:00Z","reply_to":"@B","mentions":["C","@d"],"quote_of":"e","lang":"en"}"#.to_string()]);
        let s = &read_statuses(f.path()).unwrap()[0];
        assert_eq!(s.reply_to.as_ref().unwrap().as_str(), "b");
        assert_eq!(s.mentions.iter().map(Handle::as_str).collect::<Vec<_>>(), ["c", "d"]);
        assert_eq!(s.quote_of.as_ref().unwrap().as_str(), "e");
        assert!(s.retweet_of.is_none());
    }

    #[test]
    fn batch_over_default_limit_rejected() {
        let lines: Vec<_> = (0..951).map(|i| line(i, "a")).collect();
        let f = write_lines(&lines);
        let err = parse_fixture(f.path(), &spec(), 0).unwrap_err();
        assert!(matches!(err, IngestError::BatchTooLarge { count: 951, limit: 950 }));
        assert!(err.to_string().contains("batch exceeds per_iteration_count"));

        let f = write_lines(&lines[..950]);
        assert_eq!(parse_fixture(f.path(), &spec(), 0).unwrap().statuses.len(), 950);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let f = write_lines(&[line(1, "a"), "{not json".into()]);
        match read_statuses(f.path()).unwrap_err() {
            IngestError::Malformed { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn missing_required_fields() {
        for (json, field) in [
            (r#"{"text":"x","author":"a","created_at":"2022-12-01T00:00:00Z"}"#, "id"),
            (r#"{"id":"1","text":"x","created_at":"2022-12-01T00:00:00Z"}"#, "author"),
            (r#"{"id":"1","author":"a","created_at":"2022-12-01T00:00:00Z"}"#, "text"),
        ] {
            let f = write_lines(&[json.to_string()]);
            match read_statuses(f.path()).unwrap_err() {
                IngestError::MissingField { field: got, line, .. } => {
                    assert_eq!(got, field);
                    assert_eq!(line, 1);
                }
                e => panic!("unexpected {e}"),
            }
        }
    }

    #[test]
    fn unreadable_file() {
        let err = read_statuses(Path::new("/nonexistent/iter_000")).unwrap_err();
        assert!(matches!(err, IngestError::Io { .. }));
    }

    #[test]
    fn bad_handles() {
        for raw in ["", "@", "two words", "a@b"] {
            assert!(Handle::parse(raw).is_err(), "{raw:?}");
        }
    }

    #[test]
    fn query_strings() {
        let s = QuerySpec::new(
            QueryKind::Individual,
            "Elon Musk",
            vec!["elon musk".into(), "musk".into()],
        );
        assert_eq!(build_query(&s).unwrap(), "elon musk OR musk");

        let s = QuerySpec::new(QueryKind::Topical, "HVAC", vec!["HVAC".into()]);
        assert_eq!(build_query(&s).unwrap(), "HVAC");

        let g = Geocode {
            lat: 40.7,
            lon: -74.0,
            radius_km: 10.0,
        };
        let s = QuerySpec::new(QueryKind::Geographic, "NYC", vec!["NYC".into()]).with_geocode(g);
        let q = build_query(&s).unwrap();
        assert!(q.contains("40.7,-74,10km"), "{q}");
        assert_eq!(q, "NYC geocode:40.7,-74,10km");

        let s = QuerySpec::new(QueryKind::Geographic, "NYC", vec![]).with_geocode(g);
        assert_eq!(build_query(&s).unwrap(), "geocode:40.7,-74,10km");

        let s = QuerySpec::new(QueryKind::Topical, "x", vec![" ".into()]);
        assert!(matches!(build_query(&s), Err(IngestError::EmptyQuery(_))));
    }

    #[test]
    fn invalid_specs() {
        let g = Geocode {
            lat: 91.0,
            lon: 0.0,
            radius_km: 1.0,
        };
        let s = QuerySpec::new(QueryKind::Geographic, "x", vec!["x".into()]).with_geocode(g);
        assert!(build_query(&s).is_err());
        let s = QuerySpec::new(QueryKind::Topical, "x", vec!["x".into()]).with_counts(0, 1);
        assert!(s.validate().is_err());
        let s = QuerySpec::new(QueryKind::Topical, "x", vec!["x".into()]).with_counts(1, 0);
        assert!(s.validate().is_err());
    }

    #[test]
    fn fixture_layout() {
        let p = fixture_path(Path::new("fixtures"), "geographic", "San José", 7);
        assert_eq!(p, Path::new("fixtures/geographic/san_josé/iter_007"));
        assert_eq!(subject_slug("Bills vs Bears"), "bills_vs_bears");
    }

    struct Stub(fn() -> Result<Vec<Status>, SourceError>);

    impl SearchClient for Stub {
        fn search(&self, _: &str, _: usize, _: ResultType, _: Option<Geocode>) -> Result<Vec<Status>, SourceError> {
            (self.0)()
        }
    }

    fn many(n: usize) -> Vec<Status> {
        (0..n)
            .map(|i| Status::new(i.to_string(), Handle::parse("a").unwrap(), "t", ts()))
            .collect()
    }

    #[test]
    fn fetch_passthrough_and_empty() {
        let b = fetch_iteration(&Stub(|| Ok(many(950))), &spec(), 3).unwrap();
        assert_eq!(b.statuses.len(), 950);
        assert_eq!(b.index, 3);
        let b = fetch_iteration(&Stub(|| Ok(many(960))), &spec(), 0).unwrap();
        assert_eq!(b.statuses.len(), 950);
        let b = fetch_iteration(&Stub(|| Ok(Vec::new())), &spec(), 0).unwrap();
        assert!(b.statuses.is_empty());
    }

    #[test]
    fn fetch_errors_are_distinct() {
        let rl = Stub(|| {
            Err(SourceError::RateLimited {
                retry_after: Some(Duration::from_secs(900)),
            })
        });
        match fetch_iteration(&rl, &spec(), 0).unwrap_err() {
            crate::Error::Source(SourceError::RateLimited { retry_after }) => {
                assert_eq!(retry_after, Some(Duration::from_secs(900)))
            }
            e => panic!("unexpected {e}"),
        }
        let auth = Stub(|| Err(SourceError::Auth("bad token".into())));
        assert!(matches!(
            fetch_iteration(&auth, &spec(), 0),
            Err(crate::Error::Source(SourceError::Auth(_)))
        ));
        let net = Stub(|| Err(SourceError::Network("reset".into())));
        assert!(matches!(
            fetch_iteration(&net, &spec(), 0),
            Err(crate::Error::Source(SourceError::Network(_)))
        ));
        assert!(fetch_iteration(&Stub(|| Ok(vec![])), &spec(), 100).is_err());
    }

    #[test]
    fn fixture_client_replays_in_order() {
        let dir = tempfile::tempdir().unwrap();
        for i in 0..3 {
            write_fixture(&dir.path().join(iteration_file_name(i)), &many(i + 1)).unwrap();
        }
        let client = FixtureClient::open(dir.path()).unwrap();
        for i in 0..3 {
            assert_eq!(fetch_iteration(&client, &spec(), i).unwrap().statuses.len(), i + 1);
        }
        assert!(fetch_iteration(&client, &spec(), 3).is_err());
    }

    fn arb_handle() -> impl Strategy<Value = Handle> {
        "[a-z0-9_]{1,8}".prop_map(|s| Handle::parse(&s).unwrap())
    }

    fn arb_status() -> impl Strategy<Value = Status> {
        (
            "[0-9]{1,6}",
            any::<String>(),
            arb_handle(),
            0i64..2_000_000_000,
            proptest::option::of(arb_handle()),
            proptest::collection::vec(arb_handle(), 0..4),
            proptest::option::of(arb_handle()),
            proptest::option::of(arb_handle()),
        )
            .prop_map(
                |(id, text, author, secs, reply_to, mentions, retweet_of, quote_of)| Status {
                    id,
                    text,
                    author,
                    created_at: Utc.timestamp_opt(secs, 0).unwrap(),
                    reply_to,
                    mentions,
                    retweet_of,
                    quote_of,
                },
            )
    }

    proptest! {
        #[test]
        fn fixture_round_trip(statuses in proptest::collection::vec(arb_status(), 0..20)) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("iter_000");
            write_fixture(&path, &statuses).unwrap();
            prop_assert_eq!(read_statuses(&path).unwrap(), statuses);
        }

        #[test]
        fn handle_normalization_idempotent(raw in "@{0,2}[A-Za-z0-9_]{1,10}") {
            let once = normalize_handle(&raw).unwrap();
            prop_assert_eq!(normalize_handle(&once).unwrap(), once);
        }
    }
}
