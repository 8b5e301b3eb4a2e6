//! End-to-end orchestration: fixtures to subject tables, subject tables to
//! per-group correlations, correlations to pairwise comparisons.
//!
//! Subjects are analysed in parallel; every reduction happens in a fixed
//! order, so results do not depend on the thread count.

use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::components::{self, ComponentSummary, SubjectSummary};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::graph::{self, ConversationGraph};
use crate::ingest::{self, QueryKind, QuerySpec};
use crate::report::{self, SubjectGraph};
use crate::sentiment::{self, Lexicon};
use crate::stats::{self, ComparisonReport, CorrelationReport};

/// One group's subject rows and the correlation over their (beta, alpha)
/// pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupResult {
    pub group: String,
    pub kind: Option<QueryKind>,
    pub subjects: Vec<SubjectSummary>,
    pub correlation: CorrelationReport,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Restrict to these group names; empty means all.
    pub groups: Vec<String>,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct SubjectAnalysis {
    pub summary: SubjectSummary,
    pub final_graph: ConversationGraph,
}

#[derive(Debug, Clone)]
pub struct GroupAnalysis {
    pub group: String,
    pub kind: QueryKind,
    pub subjects: Vec<SubjectAnalysis>,
}

/// Reads every iteration file of one subject and folds them into a table
/// row.
pub fn analyze_subject(config: &Config, group: &str, spec: &Arc<QuerySpec>, lex: &Lexicon) -> Result<SubjectAnalysis> {
    let dir = ingest::subject_dir(&config.fixtures, group, &spec.subject);
    if !dir.is_dir() {
        return Err(Error::MissingFixtures {
            subject: spec.subject.clone(),
            path: dir,
        });
    }
    let files = ingest::list_iterations(&dir)?;
    if files.is_empty() {
        return Err(Error::NoIterations {
            subject: spec.subject.clone(),
        });
    }
    let kinds = config.edge_kind_set();
    let mut counts: Vec<ComponentSummary> = Vec::with_capacity(files.len());
    let mut alphas = Vec::with_capacity(files.len());
    let mut final_graph = ConversationGraph::new();
    for (index, path) in &files {
        let batch = ingest::parse_fixture(path, spec, *index)?;
        let g = graph::build_graph(&batch.statuses, &kinds, config.include_isolates);
        counts.push(components::component_summary(&g));
        alphas.push(
            sentiment::batch_alpha(&batch.statuses, lex)
                .map_err(|e| Error::from(e).in_subject(&format!("{} iteration {index}", spec.subject)))?,
        );
        final_graph = g;
    }
    let summary = components::summarize_subject(&spec.subject, &counts, &alphas)?;
    Ok(SubjectAnalysis { summary, final_graph })
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Serialize(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Fixture tree to per-subject summaries for the selected groups.
pub fn analyze(config: &Config, lex: &Lexicon, opts: &RunOptions) -> Result<Vec<GroupAnalysis>> {
    let groups = config.selected_groups(&opts.groups)?;
    let jobs: Vec<(usize, String, Arc<QuerySpec>)> = groups
        .iter()
        .enumerate()
        .flat_map(|(gi, g)| {
            let name = g.name();
            config.query_specs(g).into_iter().map(move |s| (gi, name.clone(), s))
        })
        .collect();

    let results: Vec<Result<SubjectAnalysis>> = with_pool(opts.threads, || {
        jobs.par_iter()
            .map(|(_, group, spec)| analyze_subject(config, group, spec, lex).map_err(|e| e.in_group(group)))
            .collect()
    })?;

    let mut out: Vec<GroupAnalysis> = groups
        .iter()
        .map(|g| GroupAnalysis {
            group: g.name(),
            kind: g.kind,
            subjects: Vec::new(),
        })
        .collect();
    for ((gi, _, _), result) in jobs.iter().zip(results) {
        out[*gi].subjects.push(result?);
    }
    Ok(out)
}

/// Correlation of beta against alpha across a group's subjects, with `n`
/// equal to the number of subjects.
pub fn correlate_group(group: &str, subjects: &[SubjectSummary]) -> Result<CorrelationReport> {
    if subjects.len() < 3 {
        return Err(Error::TooFewSubjects {
            group: group.to_string(),
            count: subjects.len(),
        });
    }
    let betas: Vec<f64> = subjects.iter().map(|s| s.beta).collect();
    let alphas: Vec<f64> = subjects.iter().map(|s| s.alpha).collect();
    stats::correlation_report(group, &betas, &alphas).map_err(|e| Error::from(e).in_group(group))
}

pub fn group_result(group: &str, subjects: Vec<SubjectSummary>) -> Result<GroupResult> {
    let correlation = correlate_group(group, &subjects)?;
    Ok(GroupResult {
        group: group.to_string(),
        kind: QueryKind::from_label(group),
        subjects,
        correlation,
    })
}

/// Full run: analysis of every selected subject, then per-group
/// correlation. Also returns each subject's final-iteration graph.
pub fn run_pipeline_with_graphs(config: &Config, opts: &RunOptions) -> Result<(Vec<GroupResult>, Vec<SubjectGraph>)> {
    let lex = config.load_lexicon()?;
    let analyses = analyze(config, &lex, opts)?;
    let mut results = Vec::with_capacity(analyses.len());
    let mut graphs = Vec::new();
    for ga in analyses {
        let mut subjects = Vec::with_capacity(ga.subjects.len());
        for sa in ga.subjects {
            graphs.push(SubjectGraph {
                group: ga.group.clone(),
                subject: sa.summary.subject.clone(),
                graph: sa.final_graph,
            });
            subjects.push(sa.summary);
        }
        let correlation = correlate_group(&ga.group, &subjects)?;
        results.push(GroupResult {
            group: ga.group,
            kind: Some(ga.kind),
            subjects,
            correlation,
        });
    }
    Ok((results, graphs))
}

pub fn run_pipeline(config: &Config, opts: &RunOptions) -> Result<Vec<GroupResult>> {
    run_pipeline_with_graphs(config, opts).map(|(r, _)| r)
}

/// Unordered group pairs in canonical order: groups sorted by
/// [`report::group_rank`], then pairs by index distance and first index.
/// For the four standard kinds this gives topical-event, event-geographic,
/// geographic-individual, topical-geographic, event-individual,
/// topical-individual.
pub fn canonical_pairs(k: usize) -> Vec<(usize, usize)> {
    (1..k).flat_map(|gap| (0..k - gap).map(move |i| (i, i + gap))).collect()
}

/// One comparison per unordered pair of groups. `n_override` replaces every
/// group's own sample size when set.
pub fn compare_groups(
    correlations: &[CorrelationReport],
    n_override: Option<usize>,
    confidence: f64,
) -> Result<Vec<ComparisonReport>> {
    if correlations.len() < 2 {
        return Err(Error::TooFewGroups(correlations.len()));
    }
    let mut ordered: Vec<&CorrelationReport> = correlations.iter().collect();
    ordered.sort_by_key(|c| report::group_rank(&c.group));
    canonical_pairs(ordered.len())
        .into_iter()
        .map(|(i, j)| {
            let (a, b) = (ordered[i], ordered[j]);
            let na = n_override.unwrap_or(a.n);
            let nb = n_override.unwrap_or(b.n);
            stats::compare_correlations((&a.group, a.r, na), (&b.group, b.r, nb), confidence)
                .map_err(|e| Error::from(e).in_group(&format!("{} - {}", a.group, b.group)))
        })
        .collect()
}

/// `analyze` stage: fixtures to subject tables, scatter data and
/// final-iteration DOT graphs under `out`.
pub fn stage_analyze(config: &Config, opts: &RunOptions, out: &Path) -> Result<Vec<GroupAnalysis>> {
    if out.as_os_str().is_empty() {
        return Err(Error::EmptyOutDir);
    }
    let lex = config.load_lexicon()?;
    let analyses = analyze(config, &lex, opts)?;
    for ga in &analyses {
        let rows: Vec<SubjectSummary> = ga.subjects.iter().map(|s| s.summary.clone()).collect();
        report::write_subject_table(out, &ga.group, &rows)?;
        report::write_scatter(out, &ga.group, &rows)?;
        for sa in &ga.subjects {
            report::write_graph(out, &ga.group, &sa.summary.subject, &sa.final_graph)?;
        }
    }
    Ok(analyses)
}

/// `correlate` stage over already-loaded subject tables.
pub fn stage_correlate(tables: Vec<(String, Vec<SubjectSummary>)>, out: &Path) -> Result<Vec<GroupResult>> {
    if out.as_os_str().is_empty() {
        return Err(Error::EmptyOutDir);
    }
    let results: Vec<GroupResult> = tables
        .into_iter()
        .map(|(g, rows)| group_result(&g, rows))
        .collect::<Result<_>>()?;
    let reports: Vec<CorrelationReport> = results.iter().map(|r| r.correlation.clone()).collect();
    report::write_correlations(out, &reports)?;
    for r in &results {
        report::write_scatter(out, &r.group, &r.subjects)?;
    }
    Ok(results)
}

/// `compare` stage over correlation reports.
pub fn stage_compare(
    correlations: &[CorrelationReport],
    n_override: Option<usize>,
    confidence: f64,
    out: &Path,
) -> Result<Vec<ComparisonReport>> {
    if out.as_os_str().is_empty() {
        return Err(Error::EmptyOutDir);
    }
    let rows = compare_groups(correlations, n_override, confidence)?;
    report::write_comparisons(out, &rows)?;
    Ok(rows)
}

/// The bundled reference tables as `(group, rows)` pairs.
pub fn bundled_tables() -> Vec<(String, Vec<SubjectSummary>)> {
    crate::reference::tables()
        .into_iter()
        .map(|(k, rows)| (k.label().to_string(), rows))
        .collect()
}
