//! Structural matching of a question against a candidate sentence.
//!
//! A candidate's score under an alignment is
//!
//! ```text
//! total = B1 + alpha * B2 - beta * DNUM
//! ```
//!
//! where B1 sums node similarities of aligned question bunsetsus, B2 sums
//! edge similarities of question dependencies whose images are also a
//! dependency in the candidate, and DNUM is the candidate length.
//!
//! Only pairs with positive normalized similarity are ever proposed by the
//! optimizers. Any other pair contributes exactly zero to every term, so the
//! restriction does not change the optimum; it only makes the chosen
//! alignment canonical. Among equal totals the lexicographically smallest
//! alignment wins, reading an unaligned question bunsetsu as larger than any
//! candidate index.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::Sentence;
use crate::index::IdfIndex;
use crate::similarity::{type_match, InterrogativeClass, SemanticClass, SimilarityModel};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchParams {
    pub alpha: f64,
    pub beta: f64,
    pub w_interr: f64,
    pub w_edge: f64,
    /// Largest `|q|·|c|` solved exactly.
    pub exact_limit: usize,
    pub idf_weighting: bool,
    /// Accept a candidate grandparent as the image of a question head.
    pub relaxed_edges: bool,
    /// Node-score multiplier for bunsetsus adjacent to an interrogative; 1 disables it.
    pub interr_proximity: f64,
}

impl Default for MatchParams {
    fn default() -> Self {
        MatchParams {
            alpha: 1.0,
            beta: 0.1,
            w_interr: 10.0,
            w_edge: 2.0,
            exact_limit: 64,
            idf_weighting: true,
            relaxed_edges: false,
            interr_proximity: 1.0,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParamError {
    #[error("unknown parameter `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error("`{0}` must be finite and non-negative")]
    Negative(&'static str),
    #[error("exact_limit must be at least 1")]
    ExactLimit,
    #[error("config line {line}: expected key=value")]
    Syntax { line: usize },
}

impl MatchParams {
    pub const KEYS: [&'static str; 8] =
        ["alpha", "beta", "w_interr", "w_edge", "exact_limit", "idf_weighting", "relaxed_edges", "interr_proximity"];

    pub fn validate(&self) -> Result<(), ParamError> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("w_interr", self.w_interr),
            ("w_edge", self.w_edge),
            ("interr_proximity", self.interr_proximity),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(ParamError::Negative(name));
            }
        }
        if self.exact_limit == 0 {
            return Err(ParamError::ExactLimit);
        }
        Ok(())
    }

    /// Sets one parameter by name; `-` and `_` are interchangeable in keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ParamError> {
        let bad = || ParamError::BadValue { key: key.to_string(), value: value.to_string() };
        let float = || value.trim().parse::<f64>().map_err(|_| bad());
        let flag = || match value.trim() {
            "true" | "1" | "on" | "yes" => Ok(true),
            "false" | "0" | "off" | "no" => Ok(false),
            _ => Err(bad()),
        };
        let mut next = self.clone();
        match key.trim().replace('-', "_").as_str() {
            "alpha" => next.alpha = float()?,
            "beta" => next.beta = float()?,
            "w_interr" => next.w_interr = float()?,
            "w_edge" => next.w_edge = float()?,
            "exact_limit" => next.exact_limit = value.trim().parse().map_err(|_| bad())?,
            "idf_weighting" => next.idf_weighting = flag()?,
            "relaxed_edges" => next.relaxed_edges = flag()?,
            "interr_proximity" => next.interr_proximity = float()?,
            _ => return Err(ParamError::UnknownKey(key.to_string())),
        }
        next.validate()?;
        *self = next;
        Ok(())
    }

    pub fn to_config(&self) -> String {
        format!(
            "alpha={}\nbeta={}\nw_interr={}\nw_edge={}\nexact_limit={}\nidf_weighting={}\nrelaxed_edges={}\ninterr_proximity={}\n",
            self.alpha,
            self.beta,
            self.w_interr,
            self.w_edge,
            self.exact_limit,
            self.idf_weighting,
            self.relaxed_edges,
            self.interr_proximity
        )
    }

    /// Combines the three terms; the only place the total is computed.
    #[inline]
    pub fn combine(&self, b1: f64, b2: f64, dnum: usize) -> f64 {
        b1 + self.alpha * b2 + self.length_term(dnum)
    }

    #[inline]
    pub fn length_term(&self, dnum: usize) -> f64 {
        -(self.beta * dnum as f64)
    }
}

/// Partial injective map from question bunsetsus to candidate bunsetsus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Alignment {
    pairs: Vec<Option<usize>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlignmentError {
    #[error("alignment covers {got} question bunsetsus, question has {expected}")]
    Length { expected: usize, got: usize },
    #[error("candidate index {0} out of range")]
    OutOfRange(usize),
    #[error("candidate bunsetsu {0} aligned twice")]
    NotInjective(usize),
}

impl Alignment {
    pub fn empty(question_len: usize) -> Self {
        Alignment { pairs: vec![None; question_len] }
    }

    pub fn new(pairs: Vec<Option<usize>>, candidate_len: usize) -> Result<Self, AlignmentError> {
        let mut used = vec![false; candidate_len];
        for &j in pairs.iter().flatten() {
            if j >= candidate_len {
                return Err(AlignmentError::OutOfRange(j));
            }
            if std::mem::replace(&mut used[j], true) {
                return Err(AlignmentError::NotInjective(j));
            }
        }
        Ok(Alignment { pairs })
    }

    pub fn get(&self, question_index: usize) -> Option<usize> {
        self.pairs.get(question_index).copied().flatten()
    }

    pub fn pairs(&self) -> &[Option<usize>] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn check(&self, question: &Sentence, candidate: &Sentence) -> Result<(), AlignmentError> {
        if self.pairs.len() != question.len() {
            return Err(AlignmentError::Length { expected: question.len(), got: self.pairs.len() });
        }
        Alignment::new(self.pairs.clone(), candidate.len()).map(|_| ())
    }
}

fn lex_cmp(a: &[Option<usize>], b: &[Option<usize>]) -> Ordering {
    let key = |x: &Option<usize>| x.unwrap_or(usize::MAX);
    a.iter().map(key).cmp(b.iter().map(key))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ContributionKind {
    Node,
    Edge,
    Length,
}

impl fmt::Display for ContributionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContributionKind::Node => "NODE",
            ContributionKind::Edge => "EDGE",
            ContributionKind::Length => "LENGTH",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Contribution {
    pub kind: ContributionKind,
    pub question: Vec<usize>,
    pub candidate: Vec<usize>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreBreakdown {
    pub b1: f64,
    pub b2: f64,
    pub dnum: usize,
    pub total: f64,
    /// NODE rows in question order, then EDGE rows in dependent order, then one LENGTH row.
    pub contributions: Vec<Contribution>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchError {
    #[error("brute force limited to 6x8 bunsetsus, got {q}x{c}")]
    TooLarge { q: usize, c: usize },
    #[error(transparent)]
    Alignment(#[from] AlignmentError),
}

pub const BRUTE_FORCE_MAX_QUESTION: usize = 6;
pub const BRUTE_FORCE_MAX_CANDIDATE: usize = 8;

/// Question-side data reused across candidates.
#[derive(Clone, Debug)]
pub struct QuestionProfile<'q> {
    pub sentence: &'q Sentence,
    pub classes: Vec<Option<InterrogativeClass>>,
    near_interrogative: Vec<bool>,
}

impl<'q> QuestionProfile<'q> {
    pub fn new(question: &'q Sentence, model: &SimilarityModel) -> Self {
        let classes: Vec<_> = question.bunsetsus().iter().map(|b| model.interrogative_class(b)).collect();
        let mut near = vec![false; question.len()];
        for (d, h) in question.edges() {
            if classes[d].is_some() && classes[h].is_none() {
                near[h] = true;
            }
            if classes[h].is_some() && classes[d].is_none() {
                near[d] = true;
            }
        }
        QuestionProfile { sentence: question, classes, near_interrogative: near }
    }

    /// First interrogative (or blank) bunsetsu.
    pub fn interrogative_index(&self) -> Option<usize> {
        self.classes.iter().position(Option::is_some)
    }
}

/// Node and normalized similarities for every question/candidate pair.
struct PairTable {
    m: usize,
    node: Vec<f64>,
    nsim: Vec<f64>,
    /// Admissible candidates per question bunsetsu, ascending.
    options: Vec<Vec<usize>>,
}

impl PairTable {
    #[inline]
    fn node(&self, i: usize, j: usize) -> f64 {
        self.node[i * self.m + j]
    }

    #[inline]
    fn nsim(&self, i: usize, j: usize) -> f64 {
        self.nsim[i * self.m + j]
    }
}

/// Scoring context over immutable resources; cheap to copy into workers.
#[derive(Clone, Copy)]
pub struct Matcher<'a> {
    pub model: &'a SimilarityModel,
    pub params: &'a MatchParams,
    pub idf: &'a IdfIndex,
}

impl<'a> Matcher<'a> {
    pub fn new(model: &'a SimilarityModel, params: &'a MatchParams, idf: &'a IdfIndex) -> Self {
        Matcher { model, params, idf }
    }

    fn weight(&self, lemma: &str) -> f64 {
        if let Some(w) = self.model.weight_override(lemma) {
            return w;
        }
        if self.params.idf_weighting {
            self.idf.idf(lemma)
        } else {
            1.0
        }
    }

    /// BNST1: similarity of question bunsetsu `qb` to candidate bunsetsu `cb`.
    pub fn bnst1(&self, question: &QuestionProfile<'_>, qi: usize, candidate: &Sentence, cj: usize) -> f64 {
        let qb = &question.sentence.bunsetsus()[qi];
        let cb = &candidate.bunsetsus()[cj];
        let base = match &question.classes[qi] {
            Some(class) => self.interrogative_node(&class.expected, candidate, cj),
            None => qb
                .content_lemmas()
                .map(|w| {
                    let best = cb.content_lemmas().map(|v| self.model.word_sim(w, v)).fold(0.0, f64::max);
                    self.weight(w) * best
                })
                .fold(0.0, |acc, x| acc + x),
        };
        if question.near_interrogative[qi] {
            base * self.params.interr_proximity
        } else {
            base
        }
    }

    fn interrogative_node(&self, expected: &SemanticClass, candidate: &Sentence, cj: usize) -> f64 {
        if type_match(expected, &self.model.bunsetsu_types(&candidate.bunsetsus()[cj])) {
            self.params.w_interr
        } else {
            0.0
        }
    }

    /// Unweighted similarity in [0,1]: best lemma pair, or 1/0 for interrogatives.
    pub fn node_similarity(&self, question: &QuestionProfile<'_>, qi: usize, candidate: &Sentence, cj: usize) -> f64 {
        let cb = &candidate.bunsetsus()[cj];
        match &question.classes[qi] {
            Some(class) => {
                if type_match(&class.expected, &self.model.bunsetsu_types(cb)) {
                    1.0
                } else {
                    0.0
                }
            }
            None => {
                let qb = &question.sentence.bunsetsus()[qi];
                qb.content_lemmas()
                    .flat_map(|w| cb.content_lemmas().map(move |v| (w, v)))
                    .map(|(w, v)| self.model.word_sim(w, v))
                    .fold(0.0, f64::max)
            }
        }
    }

    /// Whether `cb1 -> cb2` realizes a question dependency.
    pub fn candidate_edge(&self, candidate: &Sentence, cb1: usize, cb2: usize) -> bool {
        match candidate.head(cb1) {
            Some(h) if h == cb2 => true,
            Some(h) if self.params.relaxed_edges => candidate.head(h) == Some(cb2),
            _ => false,
        }
    }

    /// BNST2 for the question dependency `b1 -> b2` mapped onto `cb1`, `cb2`.
    pub fn bnst2(
        &self,
        question: &QuestionProfile<'_>,
        (b1, b2): (usize, usize),
        candidate: &Sentence,
        (cb1, cb2): (usize, usize),
    ) -> f64 {
        debug_assert_eq!(question.sentence.head(b1), Some(b2));
        if !self.candidate_edge(candidate, cb1, cb2) {
            return 0.0;
        }
        self.params.w_edge * self.node_similarity(question, b1, candidate, cb1) * self.node_similarity(question, b2, candidate, cb2)
    }

    fn table(&self, question: &QuestionProfile<'_>, candidate: &Sentence) -> PairTable {
        let (n, m) = (question.sentence.len(), candidate.len());
        let mut node = Vec::with_capacity(n * m);
        let mut nsim = Vec::with_capacity(n * m);
        let mut options = vec![Vec::new(); n];
        for (i, opts) in options.iter_mut().enumerate() {
            for j in 0..m {
                let s = self.node_similarity(question, i, candidate, j);
                nsim.push(s);
                node.push(if s > 0.0 { self.bnst1(question, i, candidate, j) } else { 0.0 });
                if s > 0.0 {
                    opts.push(j);
                }
            }
        }
        PairTable { m, node, nsim, options }
    }

    /// Evaluates `pairs`, reporting each contribution to `sink`. Returns (b1, b2, total).
    fn evaluate(
        &self,
        table: &PairTable,
        question: &Sentence,
        candidate: &Sentence,
        pairs: &[Option<usize>],
        mut sink: impl FnMut(Contribution),
    ) -> (f64, f64, f64) {
        let mut b1 = 0.0;
        for (i, j) in pairs.iter().enumerate() {
            if let Some(j) = *j {
                let v = table.node(i, j);
                b1 += v;
                sink(Contribution { kind: ContributionKind::Node, question: vec![i], candidate: vec![j], value: v });
            }
        }
        let mut b2 = 0.0;
        for (d, h) in question.edges() {
            if let (Some(cd), Some(ch)) = (pairs[d], pairs[h]) {
                if self.candidate_edge(candidate, cd, ch) {
                    let v = self.params.w_edge * table.nsim(d, cd) * table.nsim(h, ch);
                    b2 += v;
                    sink(Contribution { kind: ContributionKind::Edge, question: vec![d, h], candidate: vec![cd, ch], value: v });
                }
            }
        }
        let dnum = candidate.len();
        sink(Contribution {
            kind: ContributionKind::Length,
            question: vec![],
            candidate: vec![],
            value: self.params.length_term(dnum),
        });
        (b1, b2, self.params.combine(b1, b2, dnum))
    }

    fn breakdown(&self, table: &PairTable, question: &Sentence, candidate: &Sentence, pairs: &[Option<usize>]) -> ScoreBreakdown {
        let mut contributions = Vec::new();
        let (b1, b2, total) = self.evaluate(table, question, candidate, pairs, |c| contributions.push(c));
        ScoreBreakdown { b1, b2, dnum: candidate.len(), total, contributions }
    }

    fn total(&self, table: &PairTable, question: &Sentence, candidate: &Sentence, pairs: &[Option<usize>]) -> f64 {
        self.evaluate(table, question, candidate, pairs, |_| {}).2
    }

    pub fn score_alignment(
        &self,
        question: &QuestionProfile<'_>,
        candidate: &Sentence,
        alignment: &Alignment,
    ) -> Result<ScoreBreakdown, AlignmentError> {
        alignment.check(question.sentence, candidate)?;
        let table = self.table(question, candidate);
        Ok(self.breakdown(&table, question.sentence, candidate, alignment.pairs()))
    }

    /// Exact search when `|q|·|c| <= exact_limit`, otherwise greedy seeding
    /// plus hill climbing.
    pub fn best_alignment(&self, question: &QuestionProfile<'_>, candidate: &Sentence) -> (Alignment, ScoreBreakdown) {
        let table = self.table(question, candidate);
        let q = question.sentence;
        let pairs = if q.len() * candidate.len() <= self.params.exact_limit {
            self.branch_and_bound(&table, q, candidate)
        } else {
            self.local_search(&table, q, candidate)
        };
        let breakdown = self.breakdown(&table, q, candidate, &pairs);
        (Alignment { pairs }, breakdown)
    }

    /// Exhaustive enumeration of every partial injective map; test oracle.
    pub fn brute_force_alignment(
        &self,
        question: &QuestionProfile<'_>,
        candidate: &Sentence,
    ) -> Result<(Alignment, ScoreBreakdown), MatchError> {
        let q = question.sentence;
        if q.len() > BRUTE_FORCE_MAX_QUESTION || candidate.len() > BRUTE_FORCE_MAX_CANDIDATE {
            return Err(MatchError::TooLarge { q: q.len(), c: candidate.len() });
        }
        let table = self.table(question, candidate);
        let mut best: Option<(f64, Vec<Option<usize>>)> = None;
        let mut pairs = vec![None; q.len()];
        let mut used = vec![false; candidate.len()];
        self.enumerate(&table, q, candidate, 0, &mut pairs, &mut used, &mut best);
        let (_, pairs) = best.expect("the empty alignment is always enumerated");
        let breakdown = self.breakdown(&table, q, candidate, &pairs);
        Ok((Alignment { pairs }, breakdown))
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate(
        &self,
        table: &PairTable,
        q: &Sentence,
        c: &Sentence,
        i: usize,
        pairs: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        best: &mut Option<(f64, Vec<Option<usize>>)>,
    ) {
        if i == pairs.len() {
            let t = self.total(table, q, c, pairs);
            if improves(t, pairs, best) {
                *best = Some((t, pairs.clone()));
            }
            return;
        }
        for j in 0..c.len() {
            if used[j] || table.nsim(i, j) <= 0.0 {
                continue;
            }
            used[j] = true;
            pairs[i] = Some(j);
            self.enumerate(table, q, c, i + 1, pairs, used, best);
            used[j] = false;
        }
        pairs[i] = None;
        self.enumerate(table, q, c, i + 1, pairs, used, best);
    }

    fn branch_and_bound(&self, table: &PairTable, q: &Sentence, c: &Sentence) -> Vec<Option<usize>> {
        let n = q.len();
        let alpha = self.params.alpha;
        let c_has_edges = c.len() > 1;
        let max_nsim: Vec<f64> =
            (0..n).map(|i| table.options[i].iter().map(|&j| table.nsim(i, j)).fold(0.0, f64::max)).collect();
        // Each question edge is charged to its later endpoint in search order.
        let mut edges_closing_at: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        let mut edge_ub_from = vec![0.0; n + 1];
        for (d, h) in q.edges() {
            edges_closing_at[d.max(h)].push((d, h));
            if c_has_edges {
                edge_ub_from[d.max(h)] += alpha * self.params.w_edge * max_nsim[d] * max_nsim[h];
            }
        }
        for i in (0..n).rev() {
            edge_ub_from[i] += edge_ub_from[i + 1];
        }

        let seed = self.local_search(table, q, c);
        let mut best = Some((self.total(table, q, c, &seed), seed));

        struct Search<'s> {
            table: &'s PairTable,
            edges_closing_at: &'s [Vec<(usize, usize)>],
            edge_ub_from: &'s [f64],
        }
        let search = Search { table, edges_closing_at: &edges_closing_at, edge_ub_from: &edge_ub_from };

        #[allow(clippy::too_many_arguments)]
        fn dfs(
            m: &Matcher<'_>,
            s: &Search<'_>,
            q: &Sentence,
            c: &Sentence,
            i: usize,
            partial: f64,
            pairs: &mut Vec<Option<usize>>,
            used: &mut Vec<bool>,
            best: &mut Option<(f64, Vec<Option<usize>>)>,
        ) {
            let n = pairs.len();
            if i == n {
                let t = m.total(s.table, q, c, pairs);
                if improves(t, pairs, best) {
                    *best = Some((t, pairs.clone()));
                }
                return;
            }
            let best_total = best.as_ref().map_or(f64::NEG_INFINITY, |b| b.0);
            let node_ub: f64 = (i..n)
                .map(|k| {
                    s.table.options[k].iter().filter(|&&j| !used[j]).map(|&j| s.table.node(k, j)).fold(0.0, f64::max)
                })
                .sum();
            let bound = partial + node_ub + s.edge_ub_from[i] + m.params.length_term(c.len());
            let slack = 1e-9 * (1.0 + bound.abs().max(best_total.abs()));
            if bound + slack < best_total {
                return;
            }
            let closing_gain = |pairs: &[Option<usize>]| -> f64 {
                s.edges_closing_at[i]
                    .iter()
                    .filter_map(|&(d, h)| match (pairs[d], pairs[h]) {
                        (Some(cd), Some(ch)) if m.candidate_edge(c, cd, ch) => {
                            Some(m.params.alpha * m.params.w_edge * s.table.nsim(d, cd) * s.table.nsim(h, ch))
                        }
                        _ => None,
                    })
                    .sum()
            };
            for &j in &s.table.options[i] {
                if used[j] {
                    continue;
                }
                used[j] = true;
                pairs[i] = Some(j);
                let gain = s.table.node(i, j) + closing_gain(pairs);
                dfs(m, s, q, c, i + 1, partial + gain, pairs, used, best);
                used[j] = false;
            }
            pairs[i] = None;
            dfs(m, s, q, c, i + 1, partial, pairs, used, best);
        }

        let mut pairs = vec![None; n];
        let mut used = vec![false; c.len()];
        dfs(self, &search, q, c, 0, 0.0, &mut pairs, &mut used, &mut best);
        best.expect("incumbent always present").1
    }

    fn local_search(&self, table: &PairTable, q: &Sentence, c: &Sentence) -> Vec<Option<usize>> {
        let n = q.len();
        let mut ranked: Vec<(usize, usize)> =
            (0..n).flat_map(|i| table.options[i].iter().map(move |&j| (i, j))).collect();
        ranked.sort_by(|a, b| table.node(b.0, b.1).total_cmp(&table.node(a.0, a.1)).then(a.cmp(b)));
        let mut pairs = vec![None; n];
        let mut used = vec![false; c.len()];
        for (i, j) in ranked {
            if pairs[i].is_none() && !used[j] {
                pairs[i] = Some(j);
                used[j] = true;
            }
        }

        let mut current = self.total(table, q, c, &pairs);
        'climb: loop {
            for i in 0..n {
                let targets = table.options[i].iter().map(|&j| Some(j)).chain(std::iter::once(None));
                for t in targets {
                    if t == pairs[i] {
                        continue;
                    }
                    let mut next = pairs.clone();
                    if let Some(j) = t {
                        if let Some(k) = pairs.iter().position(|&p| p == Some(j)) {
                            // swap images, dropping ones that k cannot take
                            next[k] = pairs[i].filter(|&old| table.nsim(k, old) > 0.0);
                        }
                    }
                    next[i] = t;
                    let total = self.total(table, q, c, &next);
                    if total > current {
                        pairs = next;
                        current = total;
                        continue 'climb;
                    }
                }
            }
            break;
        }
        pairs
    }
}

fn improves(total: f64, pairs: &[Option<usize>], best: &Option<(f64, Vec<Option<usize>>)>) -> bool {
    match best {
        None => true,
        Some((bt, bp)) => total > *bt || (total == *bt && lex_cmp(pairs, bp) == Ordering::Less),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_corpus;

    fn sentences(text: &str) -> Vec<Sentence> {
        parse_corpus(text).unwrap().sentences().to_vec()
    }

    fn flat_idf() -> IdfIndex {
        IdfIndex::build(&parse_corpus("#sent x\n0 -1 zzz zzz NOUN\n").unwrap()).unwrap()
    }

    #[test]
    fn params_set_and_validate() {
        let mut p = MatchParams::default();
        p.set("alpha", "2.5").unwrap();
        p.set("w-edge", "0").unwrap();
        assert_eq!((p.alpha, p.w_edge), (2.5, 0.0));
        assert!(p.set("beta", "-1").is_err());
        assert_eq!(p.beta, 0.1, "failed set leaves params untouched");
        assert!(p.set("gamma", "1").is_err());
        assert!(p.set("exact_limit", "0").is_err());
        p.set("idf_weighting", "off").unwrap();
        assert!(!p.idf_weighting);
    }

    #[test]
    fn alignment_validation() {
        assert_eq!(Alignment::new(vec![Some(0), Some(0)], 2).unwrap_err(), AlignmentError::NotInjective(0));
        assert_eq!(Alignment::new(vec![Some(2)], 2).unwrap_err(), AlignmentError::OutOfRange(2));
        assert_eq!(Alignment::new(vec![None, Some(1)], 2).unwrap().len(), 1);
    }

    #[test]
    fn empty_alignment_length_penalty_only() {
        let s = sentences("#sent q\n0 -1 a a NOUN\n\n#sent c\n0 1 b b NOUN\n1 2 b b NOUN\n2 3 b b NOUN\n3 4 b b NOUN\n4 5 b b NOUN\n5 -1 b b NOUN\n");
        let model = SimilarityModel::default();
        let params = MatchParams { beta: 0.5, ..MatchParams::default() };
        let idf = flat_idf();
        let m = Matcher::new(&model, &params, &idf);
        let qp = QuestionProfile::new(&s[0], &model);
        let b = m.score_alignment(&qp, &s[1], &Alignment::empty(1)).unwrap();
        assert_eq!(b.total, -3.0);
        assert_eq!(b.dnum, 6);
        assert!(m.score_alignment(&qp, &s[1], &Alignment::empty(2)).is_err());
    }

    #[test]
    fn bnst_examples() {
        let s = sentences(
            "#sent q\n0 1 uganda uganda NOUN ; no no PART\n1 2 shuto shuto NOUN ; wa wa PART\n2 -1 doko doko INTERR ; desu desu OTHER ; ka ka PART\n\n\
             #sent c\n0 2 kanpara kanpara NOUN ; wa wa PART\n1 2 uganda-kyouwakoku uganda-kyouwakoku NOUN ; no no PART\n2 -1 shuto shuto NOUN ; desu desu OTHER\n\n\
             #sent z\n0 -1 sora sora NOUN\n",
        );
        let mut model = SimilarityModel::default();
        model.set_types("kanpara\tLOCATION\n").unwrap();
        model.set_synonyms("uganda\tuganda-kyouwakoku\t0.9\n").unwrap();
        model.set_weights("shuto\t5.9\n").unwrap();
        let params = MatchParams { w_interr: 10.0, ..MatchParams::default() };
        let idf = flat_idf();
        let m = Matcher::new(&model, &params, &idf);
        let qp = QuestionProfile::new(&s[0], &model);
        assert_eq!(m.bnst1(&qp, 1, &s[1], 2), 5.9);
        assert_eq!(m.bnst1(&qp, 2, &s[1], 0), 10.0);
        assert_eq!(m.bnst1(&qp, 2, &s[1], 2), 0.0);
        assert_eq!(m.bnst1(&qp, 1, &s[2], 0), 0.0);
        // edge present: w_edge * 0.9 * 1
        assert!((m.bnst2(&qp, (0, 1), &s[1], (1, 2)) - 2.0 * 0.9).abs() < 1e-15);
        // no candidate edge 1 -> 0
        assert_eq!(m.bnst2(&qp, (0, 1), &s[1], (1, 0)), 0.0);
    }

    #[test]
    fn identity_self_alignment_closed_form() {
        let s = sentences("#sent q\n0 2 a a NOUN ; no no PART\n1 2 b b VERB\n2 3 wa wa PART\n3 -1 c c ADJ\n");
        let model = SimilarityModel::default();
        let params = MatchParams { alpha: 1.0, beta: 0.0, idf_weighting: false, w_edge: 2.0, ..MatchParams::default() };
        let idf = flat_idf();
        let m = Matcher::new(&model, &params, &idf);
        let qp = QuestionProfile::new(&s[0], &model);
        let id = Alignment::new((0..4).map(Some).collect(), 4).unwrap();
        let b = m.score_alignment(&qp, &s[0], &id).unwrap();
        // content bunsetsus: 0,1,3 -> 3; content edges: (2->3) has particle-only dependent -> none
        // edges: 0->2 (2 no content), 1->2, 2->3: all touch bunsetsu 2 -> 0
        assert_eq!(b.total, 3.0);
        let (best, bb) = m.best_alignment(&qp, &s[0]);
        assert_eq!(bb.total, 3.0);
        assert_eq!(best.pairs(), &[Some(0), Some(1), None, Some(3)]);
    }

    #[test]
    fn relaxed_edges_accept_grandparent() {
        let s = sentences("#sent q\n0 1 a a NOUN\n1 -1 c c NOUN\n\n#sent c\n0 1 a a NOUN\n1 2 b b NOUN\n2 -1 c c NOUN\n");
        let model = SimilarityModel::default();
        let idf = flat_idf();
        let strict = MatchParams { beta: 0.0, idf_weighting: false, ..MatchParams::default() };
        let relaxed = MatchParams { relaxed_edges: true, ..strict.clone() };
        let qp = QuestionProfile::new(&s[0], &model);
        assert_eq!(Matcher::new(&model, &strict, &idf).best_alignment(&qp, &s[1]).1.total, 2.0);
        assert_eq!(Matcher::new(&model, &relaxed, &idf).best_alignment(&qp, &s[1]).1.total, 4.0);
    }

    #[test]
    fn brute_force_guard_and_one_by_one() {
        let s = sentences("#sent q\n0 -1 a a NOUN\n\n#sent c\n0 -1 a a NOUN\n\n#sent d\n0 -1 b b NOUN\n");
        let model = SimilarityModel::default();
        let params = MatchParams::default();
        let idf = flat_idf();
        let m = Matcher::new(&model, &params, &idf);
        let qp = QuestionProfile::new(&s[0], &model);
        assert_eq!(m.brute_force_alignment(&qp, &s[1]).unwrap().0.pairs(), &[Some(0)]);
        assert_eq!(m.brute_force_alignment(&qp, &s[2]).unwrap().0.pairs(), &[None]);
        let long = sentences(&format!(
            "#sent l\n{}",
            (0..9).map(|i| format!("{i} {} x x NOUN\n", if i == 8 { -1 } else { i + 1 })).collect::<String>()
        ));
        assert_eq!(m.brute_force_alignment(&qp, &long[0]).unwrap_err(), MatchError::TooLarge { q: 1, c: 9 });
    }

    #[test]
    fn proximity_multiplier_scales_neighbours() {
        let s = sentences("#sent q\n0 1 a a NOUN\n1 -1 doko doko INTERR\n\n#sent c\n0 1 a a NOUN\n1 -1 x x NOUN\n");
        let model = SimilarityModel::default();
        let idf = flat_idf();
        let params = MatchParams { interr_proximity: 3.0, idf_weighting: false, ..MatchParams::default() };
        let m = Matcher::new(&model, &params, &idf);
        let qp = QuestionProfile::new(&s[0], &model);
        assert_eq!(m.bnst1(&qp, 0, &s[1], 0), 3.0);
    }
}
