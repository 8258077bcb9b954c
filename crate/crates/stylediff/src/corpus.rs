//! Synthetic style corpus with ground-truth attribute and author labels,
//! plus the preprocessing/splitting pipeline applied to any ingested texts.
//!
//! Generated texts have three kinds of structure the rest of the pipeline
//! relies on:
//!   - attribute: a class-`c` text contains markers of class `c` only, so
//!     the attribute is recoverable from markers alone;
//!   - authorship: each author draws markers from a characteristic
//!     preference distribution over their class's marker set;
//!   - fluency: within a clause, content tokens appear in non-decreasing
//!     synonym-class order, so a token shuffle is detectably "ungrammatical".

use std::collections::HashSet;
use std::io::{BufRead, Write};
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::tokens::TokenSequence;
use crate::vocab::{Vocabulary, PAD, SEP};

/// Shape of the synthetic corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorpusSpec {
    pub marker_classes: usize,
    pub markers_per_class: usize,
    pub content_classes: usize,
    pub synonyms_per_class: usize,
    pub authors: usize,
    pub texts_per_author: usize,
    pub l_max: usize,
    pub min_content: usize,
    pub max_content: usize,
    pub min_markers: usize,
    pub max_markers: usize,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            marker_classes: 2,
            markers_per_class: 8,
            content_classes: 15,
            synonyms_per_class: 3,
            authors: 50,
            texts_per_author: 120,
            l_max: 16,
            min_content: 7,
            max_content: 11,
            min_markers: 2,
            max_markers: 3,
            seed: 0,
        }
    }
}

impl CorpusSpec {
    pub fn vocabulary(&self) -> Result<Vocabulary> {
        Vocabulary::new(
            self.marker_classes,
            self.markers_per_class,
            self.content_classes,
            self.synonyms_per_class,
        )
    }

    pub fn validate(&self) -> Result<()> {
        self.vocabulary()?;
        if self.authors == 0 {
            return Err(Error::Config("corpus needs at least one author".into()));
        }
        if self.min_content == 0 || self.min_content > self.max_content {
            return Err(Error::Config(format!(
                "invalid content length range {}..={}",
                self.min_content, self.max_content
            )));
        }
        if self.min_markers == 0 || self.min_markers > self.max_markers {
            return Err(Error::Config(format!(
                "invalid marker count range {}..={} (each text needs at least one marker)",
                self.min_markers, self.max_markers
            )));
        }
        // longest possible text: content + markers + one separator
        let longest = self.max_content + self.max_markers + 1;
        if longest > self.l_max {
            return Err(Error::Config(format!(
                "l_max {} too small for generated texts (up to {longest} tokens)",
                self.l_max
            )));
        }
        Ok(())
    }
}

/// An unpadded labeled text, before preprocessing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawText {
    pub ids: Vec<usize>,
    pub attribute: usize,
    pub author: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

/// A preprocessed corpus record.
#[derive(Debug, Clone)]
pub struct LabeledText {
    pub tokens: TokenSequence,
    pub attribute: usize,
    pub author: usize,
    pub split: Split,
    pub holdout: bool,
}

/// Per-author marker preference: weights over one class's marker set.
///
/// Two signature markers carry most of the mass, the rest is spread
/// uniformly, so authors are separable but overlapping.
fn author_pref(markers_per_class: usize, rng: &mut rng::Rng) -> Vec<f64> {
    let m = markers_per_class;
    if m == 1 {
        return vec![1.0];
    }
    let sig1 = rng.gen_range(0..m);
    let sig2 = (sig1 + 1 + rng.gen_range(0..m - 1)) % m;
    let background = 0.3 / (m as f64 - 2.0).max(1.0);
    (0..m)
        .map(|j| {
            if j == sig1 || j == sig2 {
                0.35
            } else {
                background
            }
        })
        .collect()
}

/// Deterministically generate the raw corpus described by `spec`.
pub fn generate(spec: &CorpusSpec) -> Result<Vec<RawText>> {
    spec.validate()?;
    let vocab = spec.vocabulary()?;
    let mut rng = rng::stream(spec.seed, 0);

    // prefs[author][attribute_class][marker] drawn up-front in fixed order
    let prefs: Vec<Vec<Vec<f64>>> = (0..spec.authors)
        .map(|_| {
            (0..spec.marker_classes)
                .map(|_| author_pref(spec.markers_per_class, &mut rng))
                .collect()
        })
        .collect();

    let mut texts = Vec::with_capacity(spec.authors * spec.texts_per_author);
    for author in 0..spec.authors {
        for _ in 0..spec.texts_per_author {
            let attribute = rng.gen_range(0..spec.marker_classes);
            let ids = generate_text(spec, &vocab, &prefs[author][attribute], attribute, &mut rng);
            texts.push(RawText {
                ids,
                attribute,
                author,
            });
        }
    }
    Ok(texts)
}

fn generate_text(
    spec: &CorpusSpec,
    vocab: &Vocabulary,
    marker_pref: &[f64],
    attribute: usize,
    rng: &mut rng::Rng,
) -> Vec<usize> {
    let n_content = rng.gen_range(spec.min_content..=spec.max_content);
    let two_clauses = n_content >= 6 && rng.gen_bool(0.5);

    let mut stream: Vec<usize> = Vec::new();
    let clause_sizes = if two_clauses {
        let first = rng.gen_range(2..=n_content - 2);
        vec![first, n_content - first]
    } else {
        vec![n_content]
    };
    for (ci, &size) in clause_sizes.iter().enumerate() {
        if ci > 0 {
            stream.push(SEP);
        }
        let mut classes: Vec<usize> = (0..size)
            .map(|_| rng.gen_range(0..spec.content_classes))
            .collect();
        classes.sort_unstable();
        for c in classes {
            let member = rng.gen_range(0..spec.synonyms_per_class);
            stream.push(vocab.content_id(c, member));
        }
    }

    let n_markers = rng.gen_range(spec.min_markers..=spec.max_markers);
    let dist = WeightedIndex::new(marker_pref).expect("valid preference weights");
    for _ in 0..n_markers {
        let marker = vocab.marker_id(attribute, dist.sample(rng));
        let pos = rng.gen_range(0..=stream.len());
        stream.insert(pos, marker);
    }
    stream
}

/// Preprocessing and split-assignment rules.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PreprocessRules {
    pub min_texts_per_author: usize,
    pub holdout_author_fraction: f64,
    /// train/val/test fractions for non-holdout texts (split globally).
    pub split_fractions: [f64; 3],
    /// train/val/test fractions within each holdout author.
    pub holdout_split_fractions: [f64; 3],
}

impl Default for PreprocessRules {
    fn default() -> Self {
        PreprocessRules {
            min_texts_per_author: 10,
            holdout_author_fraction: 0.1,
            split_fractions: [0.8, 0.1, 0.1],
            holdout_split_fractions: [0.6, 0.2, 0.2],
        }
    }
}

/// floor(train), floor(val), remainder test.
fn split_counts(n: usize, fractions: [f64; 3]) -> (usize, usize, usize) {
    let train = (n as f64 * fractions[0]).floor() as usize;
    let val = (n as f64 * fractions[1]).floor() as usize;
    (train, val, n - train - val)
}

fn assign_splits(indices: &[usize], fractions: [f64; 3], out: &mut [Option<Split>]) {
    let (n_train, n_val, _) = split_counts(indices.len(), fractions);
    for (rank, &idx) in indices.iter().enumerate() {
        let split = if rank < n_train {
            Split::Train
        } else if rank < n_train + n_val {
            Split::Val
        } else {
            Split::Test
        };
        out[idx] = Some(split);
    }
}

/// Dedupe, length-filter, drop sparse authors, pick holdout authors, and
/// assign splits. Deterministic under `seed`.
pub fn preprocess(
    raw: &[RawText],
    rules: &PreprocessRules,
    l_max: usize,
    seed: u64,
) -> Result<Vec<LabeledText>> {
    // exact-duplicate removal, keeping first occurrence
    let mut seen: HashSet<&[usize]> = HashSet::new();
    let mut kept: Vec<&RawText> = Vec::new();
    for text in raw {
        if text.ids.len() <= l_max && seen.insert(&text.ids) {
            kept.push(text);
        }
    }

    // drop authors with too few texts
    let mut author_ids: Vec<usize> = kept.iter().map(|t| t.author).collect::<HashSet<_>>()
        .into_iter()
        .collect();
    author_ids.sort_unstable();
    let counts: Vec<usize> = author_ids
        .iter()
        .map(|&a| kept.iter().filter(|t| t.author == a).count())
        .collect();
    let eligible: HashSet<usize> = author_ids
        .iter()
        .zip(&counts)
        .filter(|&(_, &c)| c >= rules.min_texts_per_author)
        .map(|(&a, _)| a)
        .collect();
    let kept: Vec<&RawText> = kept
        .into_iter()
        .filter(|t| eligible.contains(&t.author))
        .collect();
    if kept.is_empty() {
        return Err(Error::Config(
            "corpus is empty after preprocessing; relax the filters or enlarge the input".into(),
        ));
    }

    // holdout author selection
    let mut rng = rng::stream(seed, 1);
    let mut authors: Vec<usize> = eligible.into_iter().collect();
    authors.sort_unstable();
    authors.shuffle(&mut rng);
    let n_holdout = ((authors.len() as f64) * rules.holdout_author_fraction).round() as usize;
    let holdout: HashSet<usize> = authors.iter().take(n_holdout).copied().collect();

    // split assignment: non-holdout globally, holdout per author
    let mut splits: Vec<Option<Split>> = vec![None; kept.len()];
    let mut nonholdout_idx: Vec<usize> = (0..kept.len())
        .filter(|&i| !holdout.contains(&kept[i].author))
        .collect();
    nonholdout_idx.shuffle(&mut rng);
    assign_splits(&nonholdout_idx, rules.split_fractions, &mut splits);

    let mut holdout_authors: Vec<usize> = holdout.iter().copied().collect();
    holdout_authors.sort_unstable();
    for a in holdout_authors {
        let mut idx: Vec<usize> = (0..kept.len()).filter(|&i| kept[i].author == a).collect();
        idx.shuffle(&mut rng);
        assign_splits(&idx, rules.holdout_split_fractions, &mut splits);
    }

    kept.iter()
        .zip(splits)
        .map(|(t, split)| {
            Ok(LabeledText {
                tokens: TokenSequence::from_content(&t.ids, l_max, PAD)?,
                attribute: t.attribute,
                author: t.author,
                split: split.expect("every kept text gets a split"),
                holdout: holdout.contains(&t.author),
            })
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct CorpusRow {
    tokens: Vec<usize>,
    attribute: usize,
    author: usize,
    split: Split,
    holdout: bool,
}

pub fn write_corpus(path: &Path, corpus: &[LabeledText]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for text in corpus {
        let row = CorpusRow {
            tokens: text.tokens.content().to_vec(),
            attribute: text.attribute,
            author: text.author,
            split: text.split,
            holdout: text.holdout,
        };
        let line = serde_json::to_string(&row).map_err(|e| Error::parse(path, e.to_string()))?;
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_corpus(path: &Path, l_max: usize) -> Result<Vec<LabeledText>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = std::io::BufReader::new(file);
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row: CorpusRow = serde_json::from_str(&line)
            .map_err(|e| Error::parse(path, format!("line {}: {e}", lineno + 1)))?;
        out.push(LabeledText {
            tokens: TokenSequence::from_content(&row.tokens, l_max, PAD)?,
            attribute: row.attribute,
            author: row.author,
            split: row.split,
            holdout: row.holdout,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> CorpusSpec {
        CorpusSpec {
            authors: 6,
            texts_per_author: 30,
            seed: 11,
            ..CorpusSpec::default()
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = small_spec();
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.ids, y.ids);
            assert_eq!((x.attribute, x.author), (y.attribute, y.author));
        }
    }

    #[test]
    fn zero_texts_gives_empty_corpus() {
        let spec = CorpusSpec {
            texts_per_author: 0,
            ..small_spec()
        };
        assert!(generate(&spec).unwrap().is_empty());
    }

    #[test]
    fn marker_purity_and_presence() {
        let spec = small_spec();
        let vocab = spec.vocabulary().unwrap();
        for text in generate(&spec).unwrap() {
            let marker_classes: Vec<usize> = text
                .ids
                .iter()
                .filter_map(|&id| vocab.marker_class_of(id))
                .collect();
            assert!(!marker_classes.is_empty(), "text without markers");
            assert!(
                marker_classes.iter().all(|&c| c == text.attribute),
                "foreign-class marker present"
            );
        }
    }

    /// Majority vote over marker classes recovers the label on every text.
    #[test]
    fn marker_rule_classifier_is_perfect() {
        let spec = small_spec();
        let vocab = spec.vocabulary().unwrap();
        for text in generate(&spec).unwrap() {
            let mut votes = vec![0usize; spec.marker_classes];
            for &id in &text.ids {
                if let Some(c) = vocab.marker_class_of(id) {
                    votes[c] += 1;
                }
            }
            let pred = votes
                .iter()
                .enumerate()
                .max_by_key(|&(_, v)| *v)
                .map(|(c, _)| c)
                .unwrap();
            assert_eq!(pred, text.attribute);
        }
    }

    #[test]
    fn clause_content_classes_are_sorted() {
        let spec = small_spec();
        let vocab = spec.vocabulary().unwrap();
        for text in generate(&spec).unwrap() {
            for clause in text.ids.split(|&id| id == SEP) {
                let classes: Vec<usize> = clause
                    .iter()
                    .filter_map(|&id| vocab.content_class_of(id))
                    .collect();
                assert!(
                    classes.windows(2).all(|w| w[0] <= w[1]),
                    "content classes out of order"
                );
            }
        }
    }

    #[test]
    fn dedupe_removes_exact_duplicates() {
        let raw = vec![
            RawText { ids: vec![5, 6], attribute: 0, author: 0 },
            RawText { ids: vec![5, 6], attribute: 0, author: 0 },
            RawText { ids: vec![6, 5], attribute: 0, author: 0 },
        ];
        let rules = PreprocessRules {
            min_texts_per_author: 1,
            holdout_author_fraction: 0.0,
            ..PreprocessRules::default()
        };
        let corpus = preprocess(&raw, &rules, 8, 3).unwrap();
        assert_eq!(corpus.len(), 2);
    }

    #[test]
    fn overlong_texts_are_dropped() {
        let raw = vec![
            RawText { ids: vec![5; 9], attribute: 0, author: 0 },
            RawText { ids: vec![5; 8], attribute: 0, author: 0 },
        ];
        let rules = PreprocessRules {
            min_texts_per_author: 1,
            holdout_author_fraction: 0.0,
            ..PreprocessRules::default()
        };
        let corpus = preprocess(&raw, &rules, 8, 3).unwrap();
        assert_eq!(corpus.len(), 1);
        assert_eq!(corpus[0].tokens.content_len(), 8);
    }

    /// Counting oracle on a 1000-text input: global non-holdout split sizes
    /// land within one item of 0.8/0.1/0.1 under floor/floor/remainder.
    #[test]
    fn split_fractions_match_counting_oracle() {
        let raw: Vec<RawText> = (0..1000)
            .map(|i| RawText {
                ids: vec![3 + (i % 5), 3 + ((i * 7) % 11), 3 + (i % 13), 3 + (i / 13)],
                attribute: i % 2,
                author: i % 20,
            })
            .collect();
        let rules = PreprocessRules {
            holdout_author_fraction: 0.0,
            ..PreprocessRules::default()
        };
        let corpus = preprocess(&raw, &rules, 8, 5).unwrap();
        let n = corpus.len() as f64;
        let count = |s: Split| corpus.iter().filter(|t| t.split == s).count() as f64;
        assert!((count(Split::Train) - 0.8 * n).abs() <= 1.0);
        assert!((count(Split::Val) - 0.1 * n).abs() <= 1.0);
        assert!((count(Split::Test) - 0.1 * n).abs() <= 1.0);
    }

    #[test]
    fn holdout_isolated_from_nonholdout() {
        let spec = CorpusSpec {
            authors: 20,
            texts_per_author: 20,
            seed: 4,
            ..CorpusSpec::default()
        };
        let raw = generate(&spec).unwrap();
        let corpus = preprocess(&raw, &PreprocessRules::default(), spec.l_max, spec.seed).unwrap();
        let holdout_authors: HashSet<usize> = corpus
            .iter()
            .filter(|t| t.holdout)
            .map(|t| t.author)
            .collect();
        assert_eq!(holdout_authors.len(), 2);
        for t in &corpus {
            assert_eq!(t.holdout, holdout_authors.contains(&t.author));
        }
    }

    #[test]
    fn corpus_jsonl_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        let spec = small_spec();
        let raw = generate(&spec).unwrap();
        let rules = PreprocessRules {
            min_texts_per_author: 1,
            ..PreprocessRules::default()
        };
        let corpus = preprocess(&raw, &rules, spec.l_max, spec.seed).unwrap();
        write_corpus(&path, &corpus).unwrap();
        let back = read_corpus(&path, spec.l_max).unwrap();
        assert_eq!(back.len(), corpus.len());
        for (a, b) in corpus.iter().zip(&back) {
            assert_eq!(a.tokens, b.tokens);
            assert_eq!(a.split, b.split);
        }
    }
}
