//! Rendering of answer results in the three output formats.
//!
//! TSV columns: `question kind answer sentence score`, one row per ranked
//! answer in rank order. A YES/NO result is one row with the verdict as answer
//! and the normalized score; a question without keywords or answers is one row
//! with `-` in the last three columns.
//!
//! JSON lines: one object per question with `question`, `kind`, `status`
//! (`ok` or `no_keywords`), `answers`, `yesno` and, with `--explain`, an
//! `explain` object holding the breakdown of the explained candidate.

use serde_json::{json, Value};
use synqa_core::qa::{explain_rows, format_score, RankedAnswer};
use synqa_core::{AnswerResult, Corpus, MatchParams, QuestionKind, Sentence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Plain,
    Tsv,
    Json,
}

pub const TSV_HEADER: &str = "question\tkind\tanswer\tsentence\tscore";

pub struct Rendered<'a> {
    pub question: &'a Sentence,
    pub result: Option<&'a AnswerResult>,
    pub corpus: &'a Corpus,
    pub params: &'a MatchParams,
    pub top: usize,
    pub explain: bool,
}

impl Rendered<'_> {
    fn ranked(&self) -> Vec<&RankedAnswer> {
        match self.result {
            Some(r) => r.answers.iter().filter(|a| a.answer.is_some()).take(self.top).collect(),
            None => Vec::new(),
        }
    }

    /// Candidate whose breakdown `--explain` shows.
    fn explained(&self) -> Option<&RankedAnswer> {
        let r = self.result?;
        match r.kind {
            QuestionKind::YesNo => r.answers.first(),
            _ => r.top_answer(),
        }
    }

    fn explain_lines(&self, a: &RankedAnswer) -> Vec<String> {
        let cand = &self.corpus.sentences()[a.position];
        let b = &a.breakdown;
        let mut lines = explain_rows(self.question, cand, b);
        lines.push(format!(
            "Total = B1 + alpha*B2 - beta*DNUM = {} + {}*{} - {}*{} = {}",
            format_score(b.b1),
            self.params.alpha,
            format_score(b.b2),
            self.params.beta,
            b.dnum,
            format_score(b.total)
        ));
        lines
    }

    pub fn plain(&self) -> String {
        let mut out = String::new();
        let Some(r) = self.result else {
            out.push_str("no keywords\n");
            return out;
        };
        if let Some(d) = r.yesno {
            let verdict = serde_json::to_value(d.verdict).unwrap();
            out.push_str(&format!("{} ({:.2})\n", verdict.as_str().unwrap(), d.normalized));
            if self.explain {
                if let Some(a) = self.explained() {
                    out.push_str(&format!("  best candidate: sent {} (score {})\n", a.sentence_id, format_score(a.score)));
                    for l in self.explain_lines(a) {
                        out.push_str(&format!("  {l}\n"));
                    }
                }
            }
            return out;
        }
        let ranked = self.ranked();
        if ranked.is_empty() {
            out.push_str("no answer\n");
        }
        for (n, a) in ranked.iter().enumerate() {
            out.push_str(&format!(
                "{}. {} (score {}, sent {})\n",
                n + 1,
                a.answer.as_deref().unwrap_or("-"),
                format_score(a.score),
                a.sentence_id
            ));
            if self.explain && n == 0 {
                for l in self.explain_lines(a) {
                    out.push_str(&format!("  {l}\n"));
                }
            }
        }
        out
    }

    pub fn tsv(&self) -> String {
        let id = &self.question.id;
        let Some(r) = self.result else {
            return format!("{id}\t-\t-\t-\t-\n");
        };
        let kind = r.kind.as_str();
        if let Some(d) = r.yesno {
            let verdict = serde_json::to_value(d.verdict).unwrap();
            let sent = r.answers.first().map_or("-", |a| a.sentence_id.as_str());
            return format!("{id}\t{kind}\t{}\t{sent}\t{:.4}\n", verdict.as_str().unwrap(), d.normalized);
        }
        let ranked = self.ranked();
        if ranked.is_empty() {
            return format!("{id}\t{kind}\t-\t-\t-\n");
        }
        ranked
            .iter()
            .map(|a| format!("{id}\t{kind}\t{}\t{}\t{}\n", a.answer.as_deref().unwrap_or("-"), a.sentence_id, a.score))
            .collect()
    }

    pub fn json(&self) -> String {
        let id = &self.question.id;
        let Some(r) = self.result else {
            return json!({ "question": id, "status": "no_keywords" }).to_string() + "\n";
        };
        let answers: Vec<Value> = self
            .ranked()
            .iter()
            .enumerate()
            .map(|(n, a)| {
                json!({
                    "rank": n + 1,
                    "answer": a.answer,
                    "score": a.score,
                    "sentence": a.sentence_id,
                    "idf_sum": a.idf_sum,
                    "alignment": a.alignment.pairs(),
                })
            })
            .collect();
        let mut obj = json!({
            "question": id,
            "kind": r.kind.as_str(),
            "status": "ok",
            "answers": answers,
            "yesno": r.yesno,
        });
        if self.explain {
            if let Some(e) = self.explain_value() {
                obj["explain"] = e;
            }
        }
        obj.to_string() + "\n"
    }

    /// Breakdown of the explained candidate: `sentence`, `alpha`, `beta`,
    /// `b1`, `b2`, `dnum`, `total`, `rows` and the printed `lines`.
    pub fn explain_value(&self) -> Option<Value> {
        let a = self.explained()?;
        let cand = &self.corpus.sentences()[a.position];
        Some(json!({
            "sentence": a.sentence_id,
            "alpha": self.params.alpha,
            "beta": self.params.beta,
            "b1": a.breakdown.b1,
            "b2": a.breakdown.b2,
            "dnum": a.breakdown.dnum,
            "total": a.breakdown.total,
            "rows": a.breakdown.contributions,
            "lines": explain_rows(self.question, cand, &a.breakdown),
        }))
    }

    /// One line of the explain stream: the question id plus the breakdown.
    pub fn explain_record(&self) -> String {
        let mut obj = json!({ "question": self.question.id });
        match self.explain_value() {
            Some(e) => obj["explain"] = e,
            None => obj["explain"] = Value::Null,
        }
        obj.to_string() + "\n"
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Plain => self.plain(),
            Format::Tsv => self.tsv(),
            Format::Json => self.json(),
        }
    }
}
