//! Inverted IDF index over content-word lemmas and keyword retrieval.
//!
//! Sentences are identified by their position in the corpus. "Lower id" in
//! tie-breaking always means earlier position.
//!
//! Sidecar layout:
//!
//! ```text
//! synqa-idf-index v1
//! <N>
//! <sentence-id>          (N lines, corpus order)
//! <lemma> <df> <pos>,<pos>,...
//! ```

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Corpus, Sentence};

pub const INDEX_MAGIC: &str = "synqa-idf-index v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdfIndex {
    n: usize,
    sentence_ids: Vec<String>,
    postings: BTreeMap<String, Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RetrievalHit {
    /// Corpus position.
    pub position: usize,
    pub sentence_id: String,
    pub idf_sum: f64,
    pub matched_keywords: BTreeSet<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IndexError {
    #[error("cannot index an empty corpus")]
    EmptyCorpus,
    #[error("no keywords")]
    NoKeywords,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("index file line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("index does not match corpus: {0}")]
    Mismatch(String),
}

impl IdfIndex {
    pub fn build(corpus: &Corpus) -> Result<Self, IndexError> {
        if corpus.is_empty() {
            return Err(IndexError::EmptyCorpus);
        }
        let mut postings: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (pos, s) in corpus.sentences().iter().enumerate() {
            let lemmas: BTreeSet<&str> =
                s.tokens().filter(|t| t.pos.is_content()).map(|t| t.lemma.as_str()).collect();
            for l in lemmas {
                postings.entry(l.to_string()).or_default().push(pos);
            }
        }
        Ok(IdfIndex {
            n: corpus.len(),
            sentence_ids: corpus.sentences().iter().map(|s| s.id.clone()).collect(),
            postings,
        })
    }

    pub fn num_sentences(&self) -> usize {
        self.n
    }

    pub fn vocabulary_size(&self) -> usize {
        self.postings.len()
    }

    pub fn df(&self, lemma: &str) -> usize {
        self.postings.get(lemma).map_or(0, Vec::len)
    }

    pub fn postings(&self, lemma: &str) -> &[usize] {
        self.postings.get(lemma).map_or(&[], Vec::as_slice)
    }

    pub fn sentence_id(&self, position: usize) -> &str {
        &self.sentence_ids[position]
    }

    /// `ln(N / df)`, with df clamped to at least 1 for unseen lemmas.
    pub fn idf(&self, lemma: &str) -> f64 {
        idf_value(self.n, self.df(lemma))
    }

    /// Top-`k` sentences by keyword IDF sum, descending, ties by position.
    /// Each sum is accumulated in ascending lemma order.
    pub fn retrieve(&self, keywords: &BTreeSet<String>, k: usize) -> Result<Vec<RetrievalHit>, IndexError> {
        if k == 0 {
            return Err(IndexError::ZeroK);
        }
        if keywords.is_empty() {
            return Err(IndexError::NoKeywords);
        }
        let mut acc: BTreeMap<usize, (f64, BTreeSet<String>)> = BTreeMap::new();
        for kw in keywords {
            let w = self.idf(kw);
            for &pos in self.postings(kw) {
                let e = acc.entry(pos).or_insert_with(|| (0.0, BTreeSet::new()));
                e.0 += w;
                e.1.insert(kw.clone());
            }
        }
        let mut hits: Vec<RetrievalHit> = acc
            .into_iter()
            .map(|(position, (idf_sum, matched_keywords))| RetrievalHit {
                position,
                sentence_id: self.sentence_ids[position].clone(),
                idf_sum,
                matched_keywords,
            })
            .collect();
        hits.sort_by(|a, b| b.idf_sum.total_cmp(&a.idf_sum).then(a.position.cmp(&b.position)));
        hits.truncate(k);
        Ok(hits)
    }

    /// Fails unless the index was built over a corpus with the same sentence ids.
    pub fn check_corpus(&self, corpus: &Corpus) -> Result<(), IndexError> {
        if corpus.len() != self.n {
            return Err(IndexError::Mismatch(format!("index has {} sentences, corpus {}", self.n, corpus.len())));
        }
        for (pos, (a, s)) in self.sentence_ids.iter().zip(corpus.sentences()).enumerate() {
            if a != &s.id {
                return Err(IndexError::Mismatch(format!("position {pos}: `{a}` vs `{}`", s.id)));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{INDEX_MAGIC}\n{}\n", self.n);
        for id in &self.sentence_ids {
            out.push_str(id);
            out.push('\n');
        }
        for (lemma, ids) in &self.postings {
            let list = ids.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
            out.push_str(&format!("{lemma} {} {list}\n", ids.len()));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, IndexError> {
        let err = |line: usize, msg: &str| IndexError::Format { line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, INDEX_MAGIC)) => {}
            _ => return Err(err(1, "missing magic header")),
        }
        let (ln, n_line) = lines.next().ok_or_else(|| err(2, "missing sentence count"))?;
        let n: usize = n_line.trim().parse().map_err(|_| err(ln, "bad sentence count"))?;
        if n == 0 {
            return Err(err(ln, "sentence count must be positive"));
        }
        let mut sentence_ids = Vec::with_capacity(n);
        for _ in 0..n {
            let (_, id) = lines.next().ok_or_else(|| err(ln, "truncated sentence id list"))?;
            sentence_ids.push(id.to_string());
        }
        let mut postings = BTreeMap::new();
        for (ln, line) in lines {
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(' ').collect();
            if parts.len() != 3 {
                return Err(err(ln, "expected `lemma df ids`"));
            }
            let df: usize = parts[1].parse().map_err(|_| err(ln, "bad df"))?;
            let ids = parts[2]
                .split(',')
                .map(|p| p.parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| err(ln, "bad posting id"))?;
            if ids.len() != df || df == 0 || df > n {
                return Err(err(ln, "df inconsistent with postings"));
            }
            if ids.windows(2).any(|w| w[0] >= w[1]) || ids.iter().any(|&i| i >= n) {
                return Err(err(ln, "postings must be strictly increasing and in range"));
            }
            if postings.insert(parts[0].to_string(), ids).is_some() {
                return Err(err(ln, "duplicate lemma"));
            }
        }
        Ok(IdfIndex { n, sentence_ids, postings })
    }
}

pub fn idf_value(n: usize, df: usize) -> f64 {
    (n as f64 / df.max(1) as f64).ln()
}

/// Content lemmas of a question; interrogatives and blanks never qualify.
pub fn extract_keywords(question: &Sentence) -> BTreeSet<String> {
    question
        .tokens()
        .filter(|t| t.pos.is_content() && !t.is_blank())
        .map(|t| t.lemma.clone())
        .collect()
}
