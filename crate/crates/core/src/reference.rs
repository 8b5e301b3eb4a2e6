//! Published reference data: the four subject tables (six subjects per
//! query kind, counts averaged over 100 pulls) and the printed per-group
//! correlations and pairwise comparison rows.

use crate::components::SubjectSummary;
use crate::ingest::QueryKind;
use crate::report;

const TOPICAL: &str = include_str!("../data/tables/topical.csv");
const EVENT: &str = include_str!("../data/tables/event.csv");
const GEOGRAPHIC: &str = include_str!("../data/tables/geographic.csv");
const INDIVIDUAL: &str = include_str!("../data/tables/individual.csv");

pub fn table_csv(kind: QueryKind) -> &'static str {
    match kind {
        QueryKind::Topical => TOPICAL,
        QueryKind::Event => EVENT,
        QueryKind::Geographic => GEOGRAPHIC,
        QueryKind::Individual => INDIVIDUAL,
    }
}

/// The subject table for one query kind, exactly as printed.
pub fn table(kind: QueryKind) -> Vec<SubjectSummary> {
    report::parse_subject_csv(table_csv(kind).as_bytes()).expect("bundled table is valid")
}

/// All four tables in canonical kind order.
pub fn tables() -> Vec<(QueryKind, Vec<SubjectSummary>)> {
    QueryKind::ALL.into_iter().map(|k| (k, table(k))).collect()
}

/// Correlations as printed (two decimals) for each kind.
pub fn printed_r(kind: QueryKind) -> f64 {
    match kind {
        QueryKind::Topical => -0.77,
        QueryKind::Event => -0.34,
        QueryKind::Geographic => -0.54,
        QueryKind::Individual => -0.94,
    }
}

/// Printed p-values for each kind's correlation.
pub fn printed_p(kind: QueryKind) -> f64 {
    match kind {
        QueryKind::Topical => 0.072,
        QueryKind::Event => 0.52,
        QueryKind::Geographic => 0.27,
        QueryKind::Individual => 0.0048,
    }
}

/// A printed pairwise comparison row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrintedComparison {
    pub a: QueryKind,
    pub b: QueryKind,
    pub z: f64,
    pub zou_low: f64,
    pub zou_high: f64,
}

pub const PRINTED_COMPARISONS: [PrintedComparison; 6] = [
    PrintedComparison {
        a: QueryKind::Topical,
        b: QueryKind::Event,
        z: -12.6348,
        zou_low: -0.5102,
        zou_high: -0.3654,
    },
    PrintedComparison {
        a: QueryKind::Event,
        b: QueryKind::Geographic,
        z: 4.8058,
        zou_low: 0.1219,
        zou_high: 0.2903,
    },
    PrintedComparison {
        a: QueryKind::Geographic,
        b: QueryKind::Individual,
        z: 21.5536,
        zou_low: 0.3499,
        zou_high: 0.4562,
    },
    PrintedComparison {
        a: QueryKind::Topical,
        b: QueryKind::Geographic,
        z: -7.8018,
        zou_low: -0.2915,
        zou_high: -0.1705,
    },
    PrintedComparison {
        a: QueryKind::Event,
        b: QueryKind::Individual,
        z: 26.3594,
        zou_low: 0.5424,
        zou_high: 0.6751,
    },
    PrintedComparison {
        a: QueryKind::Topical,
        b: QueryKind::Individual,
        z: 13.7518,
        zou_low: 0.1413,
        zou_high: 0.2037,
    },
];
