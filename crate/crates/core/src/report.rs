//! Report files: subject tables, correlation reports, the comparison
//! matrix, per-subject DOT graphs and scatter data.
//!
//! Layout under an output directory:
//!
//! ```text
//! subjects/<group>.csv   subject,strong_count,weak_count,ratio_beta,sentiment_alpha
//! subjects/<group>.json
//! scatter/<group>.csv    subject,beta,alpha
//! graphs/<group>/<subject-slug>.dot
//! correlations.csv       group,n,r,mean_x,mean_y,t_stat,p_two_sided
//! correlations.json
//! comparisons.csv        group_a,group_b,z_score,p_value,zou_low,zou_high
//! comparisons.json
//! ```
//!
//! Floats are written in shortest round-trip form, so tables read back to
//! the identical values.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::components::SubjectSummary;
use crate::error::{Error, Result};
use crate::graph::ConversationGraph;
use crate::ingest::{self, QueryKind};
use crate::pipeline::GroupResult;
use crate::stats::{ComparisonReport, CorrelationReport};

pub const SUBJECTS_DIR: &str = "subjects";
pub const SCATTER_DIR: &str = "scatter";
pub const GRAPHS_DIR: &str = "graphs";
pub const CORRELATIONS: &str = "correlations";
pub const COMPARISONS: &str = "comparisons";

/// Sort key putting the four standard kinds first, in their usual order,
/// then any other group names lexicographically.
pub fn group_rank(name: &str) -> (usize, String) {
    let rank = QueryKind::from_label(name).map_or(QueryKind::ALL.len(), |k| k as usize);
    (rank, name.to_string())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        ensure_dir(parent)?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Serialize(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Error::Serialize(e.to_string()))
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Serialize(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn subject_csv(rows: &[SubjectSummary]) -> Result<Vec<u8>> {
    to_csv(rows)
}

pub fn parse_subject_csv(reader: impl Read) -> std::result::Result<Vec<SubjectSummary>, csv::Error> {
    csv::Reader::from_reader(reader).deserialize().collect()
}

pub fn write_subject_table(out: &Path, group: &str, rows: &[SubjectSummary]) -> Result<()> {
    let dir = out.join(SUBJECTS_DIR);
    write_file(&dir.join(format!("{group}.csv")), &subject_csv(rows)?)?;
    write_file(&dir.join(format!("{group}.json")), &to_json(rows)?)
}

pub fn read_subject_table(path: &Path) -> Result<Vec<SubjectSummary>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_subject_csv(file).map_err(|e| Error::Table {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Reads every `subjects/<group>.csv` under `dir` (or `dir` itself when it
/// holds the CSVs directly), in canonical group order.
pub fn read_subject_tables(dir: &Path) -> Result<Vec<(String, Vec<SubjectSummary>)>> {
    let nested = dir.join(SUBJECTS_DIR);
    let dir = if nested.is_dir() { nested } else { dir.to_path_buf() };
    let mut paths: Vec<(String, PathBuf)> = Vec::new();
    for entry in fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))? {
        let path = entry.map_err(|e| Error::io(&dir, e))?.path();
        if path.extension().is_some_and(|e| e == "csv") {
            let group = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or_default()
                .to_string();
            paths.push((group, path));
        }
    }
    if paths.is_empty() {
        return Err(Error::Table {
            path: dir,
            message: "no subject tables found".into(),
        });
    }
    paths.sort_by_key(|(g, _)| group_rank(g));
    paths
        .into_iter()
        .map(|(g, p)| Ok((g, read_subject_table(&p)?)))
        .collect()
}

#[derive(Serialize)]
struct ScatterRow<'a> {
    subject: &'a str,
    beta: f64,
    alpha: f64,
}

pub fn write_scatter(out: &Path, group: &str, rows: &[SubjectSummary]) -> Result<()> {
    let points: Vec<ScatterRow> = rows
        .iter()
        .map(|s| ScatterRow {
            subject: &s.subject,
            beta: s.beta,
            alpha: s.alpha,
        })
        .collect();
    write_file(&out.join(SCATTER_DIR).join(format!("{group}.csv")), &to_csv(&points)?)
}

pub fn write_graph(out: &Path, group: &str, subject: &str, graph: &ConversationGraph) -> Result<()> {
    let path = out
        .join(GRAPHS_DIR)
        .join(group)
        .join(format!("{}.dot", ingest::subject_slug(subject)));
    write_file(&path, graph.to_dot().as_bytes())
}

pub fn write_correlations(out: &Path, reports: &[CorrelationReport]) -> Result<()> {
    write_file(&out.join(format!("{CORRELATIONS}.csv")), &to_csv(reports)?)?;
    write_file(&out.join(format!("{CORRELATIONS}.json")), &to_json(reports)?)
}

pub fn read_correlations(path: &Path) -> Result<Vec<CorrelationReport>> {
    let path = if path.is_dir() {
        path.join(format!("{CORRELATIONS}.json"))
    } else {
        path.to_path_buf()
    };
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Table {
        path,
        message: e.to_string(),
    })
}

#[derive(Serialize)]
struct ComparisonRow<'a> {
    group_a: &'a str,
    group_b: &'a str,
    z_score: f64,
    p_value: f64,
    zou_low: f64,
    zou_high: f64,
}

pub fn comparison_csv(rows: &[ComparisonReport]) -> Result<Vec<u8>> {
    let rows: Vec<ComparisonRow> = rows
        .iter()
        .map(|c| ComparisonRow {
            group_a: &c.group_a,
            group_b: &c.group_b,
            z_score: c.z_score,
            p_value: c.p_two_sided,
            zou_low: c.zou_low,
            zou_high: c.zou_high,
        })
        .collect();
    to_csv(&rows)
}

pub fn write_comparisons(out: &Path, rows: &[ComparisonReport]) -> Result<()> {
    write_file(&out.join(format!("{COMPARISONS}.csv")), &comparison_csv(rows)?)?;
    write_file(&out.join(format!("{COMPARISONS}.json")), &to_json(rows)?)
}

/// A subject's graph from its final iteration.
#[derive(Debug, Clone)]
pub struct SubjectGraph {
    pub group: String,
    pub subject: String,
    pub graph: ConversationGraph,
}

/// Writes every report for a finished run.
pub fn render_reports(
    out: &Path,
    results: &[GroupResult],
    comparisons: &[ComparisonReport],
    graphs: &[SubjectGraph],
) -> Result<()> {
    if out.as_os_str().is_empty() {
        return Err(Error::EmptyOutDir);
    }
    ensure_dir(out)?;
    for r in results {
        write_subject_table(out, &r.group, &r.subjects)?;
        write_scatter(out, &r.group, &r.subjects)?;
    }
    let correlations: Vec<CorrelationReport> = results.iter().map(|r| r.correlation.clone()).collect();
    write_correlations(out, &correlations)?;
    if !comparisons.is_empty() {
        write_comparisons(out, comparisons)?;
    }
    for g in graphs {
        write_graph(out, &g.group, &g.subject, &g.graph)?;
    }
    Ok(())
}
