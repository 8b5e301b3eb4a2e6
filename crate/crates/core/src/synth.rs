//! Synthetic conversations with planted component structure and a planted
//! mean sentiment.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)` (the
//! `rand_chacha` stream cipher generator), so equal seeds give identical
//! output on every platform. Sub-seeds for fixture trees are derived with
//! SplitMix64 (see [`derive_seed`]).
//!
//! Graph construction: every strong component of size `s >= 2` is a
//! directed cycle over `s` users; the strong components of one weak
//! component are joined along a path by single one-way edges of random
//! orientation; there are no edges between weak components.

use std::collections::BTreeSet;
use std::path::Path;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::graph::{ConversationGraph, Edge, EdgeKind};
use crate::ingest::{self, Handle, Status};
use crate::sentiment::{self, Lexicon};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("invalid synth spec: {0}")]
    InvalidSpec(String),
    #[error("target mean {target} is unreachable with lexicon {lexicon:?}: {reason}")]
    Unreachable {
        target: f64,
        lexicon: String,
        reason: String,
    },
    #[error(transparent)]
    Write(#[from] WriteError),
}

/// Wrapper so file errors fit in a `Clone + PartialEq` enum.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct WriteError(pub String);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub seed: u64,
    /// One inner list per weak component, holding its strong component sizes.
    pub weak_component_sizes: Vec<Vec<usize>>,
    pub corpus_size: usize,
    pub target_mean: f64,
    pub jitter: f64,
}

impl SynthSpec {
    pub fn validate_graph(&self) -> Result<(), SynthError> {
        if self.weak_component_sizes.is_empty() {
            return Err(SynthError::InvalidSpec(
                "at least one weak component is required".into(),
            ));
        }
        if self.weak_component_sizes.iter().any(|w| w.is_empty() || w.contains(&0)) {
            return Err(SynthError::InvalidSpec("strong component sizes must be >= 1".into()));
        }
        Ok(())
    }

    fn validate_corpus(&self) -> Result<(), SynthError> {
        if !self.target_mean.is_finite() || !self.jitter.is_finite() || self.jitter < 0.0 {
            return Err(SynthError::InvalidSpec(
                "target_mean must be finite and jitter >= 0".into(),
            ));
        }
        Ok(())
    }

    pub fn strong_count(&self) -> usize {
        self.weak_component_sizes.iter().map(Vec::len).sum()
    }

    pub fn weak_count(&self) -> usize {
        self.weak_component_sizes.len()
    }
}

/// SplitMix64 finalizer over `base` mixed with each part in turn.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut x = base;
    for &p in parts {
        x = x.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(p);
        let mut z = x;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        x = z ^ (z >> 31);
    }
    x
}

fn handle(s: String) -> Handle {
    Handle::parse(&s).expect("generated handles are valid")
}

/// Builds a graph whose strong and weak component counts are exactly the
/// planted ones.
pub fn synth_graph(spec: &SynthSpec) -> Result<ConversationGraph, SynthError> {
    spec.validate_graph()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let total: usize = spec.weak_component_sizes.iter().flatten().sum();
    let mut labels: Vec<usize> = (0..total).collect();
    labels.shuffle(&mut rng);
    let mut next_user = labels.into_iter().map(|i| handle(format!("user{i:05}")));

    let mut g = ConversationGraph::new();
    let mut edge_no = 0usize;
    let mut add = |g: &mut ConversationGraph, rng: &mut ChaCha8Rng, a: &Handle, b: &Handle| {
        let kind = *EdgeKind::ALL.choose(rng).expect("nonempty");
        g.add_edge(Edge {
            source: a.clone(),
            target: b.clone(),
            kind,
            status_id: format!("e{edge_no}"),
        });
        edge_no += 1;
    };

    for weak in &spec.weak_component_sizes {
        let mut previous: Option<Vec<Handle>> = None;
        for &size in weak {
            let members: Vec<Handle> = next_user.by_ref().take(size).collect();
            if size == 1 {
                g.add_node(members[0].clone());
            } else {
                for i in 0..size {
                    add(&mut g, &mut rng, &members[i], &members[(i + 1) % size]);
                }
            }
            if let Some(prev) = previous {
                let a = prev.choose(&mut rng).expect("nonempty").clone();
                let b = members.choose(&mut rng).expect("nonempty").clone();
                if rng.gen_bool(0.5) {
                    add(&mut g, &mut rng, &a, &b);
                } else {
                    add(&mut g, &mut rng, &b, &a);
                }
            }
            previous = Some(members);
        }
    }
    Ok(g)
}

const FILLERS: [&str; 24] = [
    "the", "and", "to", "of", "this", "that", "with", "on", "at", "for", "is", "was", "we", "they", "just", "about",
    "today", "thread", "update", "here", "there", "after", "from", "what",
];

struct WordPool<'a> {
    positive: Vec<(&'a str, f64)>,
    negative: Vec<(&'a str, f64)>,
    fillers: Vec<&'static str>,
    /// One representative per distinct valence, plus positive/negative
    /// pairs, used to steer the running total.
    moves: Vec<(Vec<&'a str>, f64)>,
}

impl<'a> WordPool<'a> {
    fn new(lex: &'a Lexicon) -> Self {
        let usable: Vec<(&str, f64)> = lex
            .sorted_entries()
            .into_iter()
            .filter(|(t, v)| *v != 0.0 && sentiment::clean_text(t) == *t)
            .collect();
        let positive: Vec<_> = usable.iter().copied().filter(|(_, v)| *v > 0.0).collect();
        let negative: Vec<_> = usable.iter().copied().filter(|(_, v)| *v < 0.0).collect();
        let fillers = FILLERS.iter().copied().filter(|f| lex.valence(f).is_none()).collect();

        let distinct = |words: &[(&'a str, f64)]| {
            let mut seen: Vec<(&'a str, f64)> = Vec::new();
            for &(t, v) in words {
                if !seen.iter().any(|(_, s)| *s == v) {
                    seen.push((t, v));
                }
            }
            seen
        };
        let (dp, dn) = (distinct(&positive), distinct(&negative));
        let mut moves: Vec<(Vec<&str>, f64)> = dp.iter().chain(&dn).map(|&(t, v)| (vec![t], v)).collect();
        for &(pt, pv) in &dp {
            for &(nt, nv) in &dn {
                moves.push((vec![pt, nt], pv + nv));
            }
        }
        WordPool {
            positive,
            negative,
            fillers,
            moves,
        }
    }
}

/// Generates `n` texts whose mean score under `lex` is within `jitter` of
/// `target`.
fn synth_texts(
    rng: &mut ChaCha8Rng,
    n: usize,
    target: f64,
    jitter: f64,
    lex: &Lexicon,
    pool: &WordPool,
) -> Result<Vec<String>, SynthError> {
    let unreachable = |reason: &str| SynthError::Unreachable {
        target,
        lexicon: lex.name.clone(),
        reason: reason.to_string(),
    };
    if n == 0 {
        return Ok(Vec::new());
    }
    if target - jitter > 0.0 && pool.positive.is_empty() {
        return Err(unreachable("no positive entries"));
    }
    if target + jitter < 0.0 && pool.negative.is_empty() {
        return Err(unreachable("no negative entries"));
    }

    let mut words: Vec<Vec<&str>> = Vec::with_capacity(n);
    let mut total = 0.0;
    let sentiment_words: Vec<(&str, f64)> = pool.positive.iter().chain(&pool.negative).copied().collect();
    for _ in 0..n {
        let mut w: Vec<&str> = Vec::new();
        if !pool.fillers.is_empty() {
            for _ in 0..rng.gen_range(1..=4) {
                w.push(pool.fillers.choose(rng).expect("nonempty"));
            }
        }
        if !sentiment_words.is_empty() {
            for _ in 0..rng.gen_range(0..=2) {
                let &(t, v) = sentiment_words.choose(rng).expect("nonempty");
                w.push(t);
                total += v;
            }
        }
        words.push(w);
    }

    let goal = target * n as f64;
    let tolerance = jitter * n as f64 + 1e-9;
    let max_steps = 64 * n + 10_000;
    let mut steps = 0;
    loop {
        let gap = goal - total;
        if gap.abs() <= tolerance {
            break;
        }
        let best = pool
            .moves
            .iter()
            .min_by(|a, b| (gap - a.1).abs().total_cmp(&(gap - b.1).abs()))
            .ok_or_else(|| unreachable("lexicon has no usable entries"))?;
        if (gap - best.1).abs() >= gap.abs() || steps >= max_steps {
            return Err(unreachable("no combination of entries closes the gap"));
        }
        let i = rng.gen_range(0..n);
        words[i].extend(best.0.iter().copied());
        total += best.1;
        steps += 1;
    }

    Ok(words
        .into_iter()
        .map(|mut w| {
            w.shuffle(rng);
            w.join(" ")
        })
        .collect())
}

fn epoch() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2022, 12, 1, 0, 0, 0).unwrap()
}

fn check_mean(statuses: &[Status], spec: &SynthSpec, lex: &Lexicon) -> Result<(), SynthError> {
    if statuses.is_empty() {
        return Ok(());
    }
    let alpha = sentiment::batch_alpha(statuses, lex).expect("nonempty");
    if (alpha - spec.target_mean).abs() > spec.jitter + 1e-9 {
        return Err(SynthError::Unreachable {
            target: spec.target_mean,
            lexicon: lex.name.clone(),
            reason: format!("generated mean {alpha} drifted outside the jitter band"),
        });
    }
    Ok(())
}

/// `corpus_size` reference-free statuses whose batch alpha is within
/// `jitter` of `target_mean`.
pub fn synth_corpus(spec: &SynthSpec, lex: &Lexicon) -> Result<Vec<Status>, SynthError> {
    spec.validate_corpus()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let texts = synth_texts(
        &mut rng,
        spec.corpus_size,
        spec.target_mean,
        spec.jitter,
        lex,
        &WordPool::new(lex),
    )?;
    let statuses: Vec<Status> = texts
        .into_iter()
        .enumerate()
        .map(|(i, text)| {
            Status::new(
                format!("c{i}"),
                handle(format!("anon{i:05}")),
                text,
                epoch() + Duration::seconds(i as i64),
            )
        })
        .collect();
    check_mean(&statuses, spec, lex)?;
    Ok(statuses)
}

/// Statuses that reproduce [`synth_graph`] exactly when built with every
/// edge kind and isolates included: one status per edge plus one per
/// isolated user. Texts carry the planted mean; `corpus_size` is ignored.
pub fn synth_batch(spec: &SynthSpec, lex: &Lexicon) -> Result<Vec<Status>, SynthError> {
    batch_with_pool(spec, lex, &WordPool::new(lex))
}

fn batch_with_pool(spec: &SynthSpec, lex: &Lexicon, pool: &WordPool) -> Result<Vec<Status>, SynthError> {
    spec.validate_corpus()?;
    let g = synth_graph(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, &[1]));

    let incident: BTreeSet<&Handle> = g.edges().iter().flat_map(|e| [&e.source, &e.target]).collect();
    let mut skeleton: Vec<(Handle, Option<(EdgeKind, Handle)>)> = g
        .edges()
        .iter()
        .map(|e| (e.source.clone(), Some((e.kind, e.target.clone()))))
        .chain(
            g.nodes()
                .iter()
                .filter(|n| !incident.contains(n))
                .map(|n| (n.clone(), None)),
        )
        .collect();
    skeleton.shuffle(&mut rng);

    let texts = synth_texts(&mut rng, skeleton.len(), spec.target_mean, spec.jitter, lex, pool)?;
    let statuses: Vec<Status> = skeleton
        .into_iter()
        .zip(texts)
        .enumerate()
        .map(|(i, ((author, reference), text))| {
            let mut s = Status::new(format!("s{i}"), author, text, epoch() + Duration::seconds(i as i64));
            match reference {
                Some((EdgeKind::Reply, t)) => {
                    s.text = format!("@{t} {}", s.text);
                    s.reply_to = Some(t);
                }
                Some((EdgeKind::Mention, t)) => {
                    s.text = format!("{} @{t}", s.text);
                    s.mentions.push(t);
                }
                Some((EdgeKind::Retweet, t)) => s.retweet_of = Some(t),
                Some((EdgeKind::Quote, t)) => s.quote_of = Some(t),
                None => {}
            }
            s
        })
        .collect();
    check_mean(&statuses, spec, lex)?;
    Ok(statuses)
}

/// Splits `strong` strong components into `weak` weak components (sizes
/// 1 or 2 each), every weak component getting at least one.
pub fn plan_components(rng: &mut impl Rng, strong: usize, weak: usize) -> Vec<Vec<usize>> {
    assert!(weak >= 1 && weak <= strong, "need 1 <= weak <= strong");
    let mut counts = vec![1usize; weak];
    for _ in 0..strong - weak {
        let i = rng.gen_range(0..weak);
        counts[i] += 1;
    }
    counts
        .into_iter()
        .map(|c| (0..c).map(|_| rng.gen_range(1..=2)).collect())
        .collect()
}

/// Planted per-subject targets for a synthetic fixture tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectPlan {
    pub group: String,
    pub subject: String,
    pub beta: f64,
    pub alpha: f64,
}

/// Writes a full fixture tree for every group and subject in `config`.
///
/// Each subject draws a planted beta uniformly from `[0.1, 1.0]` and sets
/// its alpha to `intercept - slope * beta + noise`; every iteration then
/// plants roughly that beta (strong count 8..=14, weak count rounded from
/// beta) and alpha (within `jitter`).
pub fn write_fixture_tree(config: &Config, root: &Path, lex: &Lexicon) -> Result<Vec<SubjectPlan>, SynthError> {
    let synth = &config.synth;
    let pool = WordPool::new(lex);
    let mut plans = Vec::new();
    for (gi, group) in config.groups.iter().enumerate() {
        for (si, subject) in group.subjects.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[gi as u64, si as u64]));
            let beta: f64 = rng.gen_range(0.1..=1.0);
            let noise = if synth.alpha_noise > 0.0 {
                rng.gen_range(-synth.alpha_noise..=synth.alpha_noise)
            } else {
                0.0
            };
            let alpha = synth.alpha_intercept - synth.alpha_slope * beta + noise;
            for it in 0..config.iterations {
                let seed = derive_seed(config.seed, &[gi as u64, si as u64, it as u64 + 1]);
                let mut it_rng = ChaCha8Rng::seed_from_u64(seed);
                let strong = it_rng.gen_range(8..=14usize);
                let weak = ((beta * strong as f64).round() as usize).clamp(1, strong);
                let spec = SynthSpec {
                    seed,
                    weak_component_sizes: plan_components(&mut it_rng, strong, weak),
                    corpus_size: 0,
                    target_mean: alpha,
                    jitter: synth.jitter,
                };
                let statuses = batch_with_pool(&spec, lex, &pool)?;
                let limit = synth.max_statuses.min(config.per_iteration_count);
                if statuses.len() > limit {
                    return Err(SynthError::InvalidSpec(format!(
                        "planned batch has {} statuses, limit is {limit}",
                        statuses.len()
                    )));
                }
                let path = ingest::fixture_path(root, &group.name(), &subject.name, it);
                ingest::write_fixture(&path, &statuses).map_err(|e| WriteError(e.to_string()))?;
            }
            plans.push(SubjectPlan {
                group: group.name(),
                subject: subject.name.clone(),
                beta,
                alpha,
            });
        }
    }
    Ok(plans)
}
