//! The question answering pipeline: classify, retrieve, match, extract.

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Corpus, Pos, Sentence};
use crate::index::{extract_keywords, IdfIndex, IndexError};
use crate::matcher::{Alignment, ContributionKind, MatchParams, Matcher, QuestionProfile, ScoreBreakdown};
use crate::parallel::{self, Execution};
use crate::similarity::{InterrogativeClass, SimilarityModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum QuestionKind {
    Wh,
    YesNo,
    FillBlank,
}

impl QuestionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            QuestionKind::Wh => "WH",
            QuestionKind::YesNo => "YES_NO",
            QuestionKind::FillBlank => "FILL_BLANK",
        }
    }
}

/// A blank placeholder takes precedence over interrogative tokens.
pub fn classify_question(question: &Sentence) -> QuestionKind {
    if question.tokens().any(|t| t.is_blank()) {
        QuestionKind::FillBlank
    } else if question.tokens().any(|t| t.pos == Pos::Interr) {
        QuestionKind::Wh
    } else {
        QuestionKind::YesNo
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Yes,
    No,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct YesNoDecision {
    pub verdict: Verdict,
    pub normalized: f64,
}

/// Compares the best candidate's `b1 + alpha*b2` with the question's self-match.
/// The length penalty is left out of both sides.
pub fn yes_no_decision(best: &ScoreBreakdown, self_score: &ScoreBreakdown, alpha: f64, theta: f64) -> YesNoDecision {
    let denom = self_score.b1 + alpha * self_score.b2;
    if denom.is_nan() || denom <= 0.0 {
        return YesNoDecision { verdict: Verdict::No, normalized: 0.0 };
    }
    let normalized = ((best.b1 + alpha * best.b2) / denom).clamp(0.0, 1.0);
    let verdict = if normalized >= theta { Verdict::Yes } else { Verdict::No };
    YesNoDecision { verdict, normalized }
}

/// Score of the question aligned to itself by identity.
pub fn self_match(matcher: &Matcher<'_>, question: &QuestionProfile<'_>) -> ScoreBreakdown {
    let q = question.sentence;
    let identity = Alignment::new((0..q.len()).map(Some).collect(), q.len()).expect("identity is injective");
    matcher.score_alignment(question, q, &identity).expect("identity fits its own sentence")
}

/// Surface of the candidate bunsetsu aligned to the interrogative, minus
/// trailing particles; a numeric answer drops the unit the question asked for
/// ("nan nen" against "1215 nen" yields "1215").
pub fn extract_answer(
    candidate: &Sentence,
    alignment: &Alignment,
    interr_index: usize,
    class: Option<&InterrogativeClass>,
) -> Option<String> {
    let j = alignment.get(interr_index)?;
    let tokens = &candidate.bunsetsus()[j].tokens;
    let mut end = tokens.len();
    while end > 0 && tokens[end - 1].pos.is_function() {
        end -= 1;
    }
    if end == 0 {
        end = tokens.len();
    }
    let mut kept = &tokens[..end];
    if let Some(unit) = class.and_then(|c| c.noun.as_deref()) {
        if kept.len() >= 2 && kept[kept.len() - 1].lemma == unit && kept[kept.len() - 2].pos == Pos::Num {
            kept = &kept[..kept.len() - 1];
        }
    }
    Some(kept.iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" "))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankedAnswer {
    /// `None` when the interrogative stayed unaligned, or for YES/NO questions.
    pub answer: Option<String>,
    pub sentence_id: String,
    pub position: usize,
    pub score: f64,
    pub idf_sum: f64,
    pub alignment: Alignment,
    pub breakdown: ScoreBreakdown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnswerResult {
    pub kind: QuestionKind,
    pub answers: Vec<RankedAnswer>,
    pub yesno: Option<YesNoDecision>,
}

impl AnswerResult {
    /// First ranked candidate that supplies an answer.
    pub fn top_answer(&self) -> Option<&RankedAnswer> {
        self.answers.iter().find(|a| a.answer.is_some())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QaConfig {
    pub params: MatchParams,
    pub k: usize,
    pub theta: f64,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for QaConfig {
    fn default() -> Self {
        QaConfig { params: MatchParams::default(), k: 20, theta: 0.5, execution: Execution::default() }
    }
}

impl QaConfig {
    /// Applies one `key=value` setting: `k`, `theta`, or any match parameter.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), QaError> {
        match key.trim() {
            "k" => {
                let k: usize = value.trim().parse().map_err(|_| QaError::ZeroK)?;
                if k == 0 {
                    return Err(QaError::ZeroK);
                }
                self.k = k;
            }
            "theta" => {
                let t: f64 = value.trim().parse().map_err(|_| QaError::Theta)?;
                if !(0.0..=1.0).contains(&t) {
                    return Err(QaError::Theta);
                }
                self.theta = t;
            }
            other => self.params.set(other, value)?,
        }
        Ok(())
    }

    /// Plain-text `key=value` lines; `#` starts a comment.
    pub fn apply_config(&mut self, text: &str) -> Result<(), QaError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or(QaError::Params(crate::matcher::ParamError::Syntax { line: i + 1 }))?;
            self.set(k, v)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QaError {
    #[error("no keywords in question")]
    NoKeywords,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("theta must lie in [0,1]")]
    Theta,
    #[error(transparent)]
    Params(#[from] crate::matcher::ParamError),
    #[error("index: {0}")]
    Index(IndexError),
}

pub fn answer(
    question: &Sentence,
    corpus: &Corpus,
    index: &IdfIndex,
    model: &SimilarityModel,
    config: &QaConfig,
) -> Result<AnswerResult, QaError> {
    config.params.validate()?;
    if !(0.0..=1.0).contains(&config.theta) {
        return Err(QaError::Theta);
    }
    let kind = classify_question(question);
    let hits = match index.retrieve(&extract_keywords(question), config.k) {
        Ok(h) => h,
        Err(IndexError::NoKeywords) => return Err(QaError::NoKeywords),
        Err(IndexError::ZeroK) => return Err(QaError::ZeroK),
        Err(e) => return Err(QaError::Index(e)),
    };
    let matcher = Matcher::new(model, &config.params, index);
    let profile = QuestionProfile::new(question, model);
    let interr = profile.interrogative_index();

    let mut answers = parallel::map(config.execution, &hits, |hit| {
        let candidate = &corpus.sentences()[hit.position];
        let (alignment, breakdown) = matcher.best_alignment(&profile, candidate);
        let answer = match (kind, interr) {
            (QuestionKind::YesNo, _) | (_, None) => None,
            (_, Some(i)) => extract_answer(candidate, &alignment, i, profile.classes[i].as_ref()),
        };
        RankedAnswer {
            answer,
            sentence_id: candidate.id.clone(),
            position: hit.position,
            score: breakdown.total,
            idf_sum: hit.idf_sum,
            alignment,
            breakdown,
        }
    });
    answers.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.position.cmp(&b.position)));

    let yesno = (kind == QuestionKind::YesNo).then(|| match answers.first() {
        Some(best) => yes_no_decision(&best.breakdown, &self_match(&matcher, &profile), config.params.alpha, config.theta),
        None => YesNoDecision { verdict: Verdict::No, normalized: 0.0 },
    });
    Ok(AnswerResult { kind, answers, yesno })
}

/// One decimal digit when exact at that precision, else up to four.
pub fn format_score(v: f64) -> String {
    let one = (v * 10.0).round() / 10.0;
    let s = if (v - one).abs() < 1e-9 { format!("{one:.1}") } else { format!("{v:.4}") };
    if s == "-0.0" {
        "0.0".to_string()
    } else {
        s
    }
}

/// One line per ledger entry, `Matching between "X" and "Y": v`.
pub fn explain_rows(question: &Sentence, candidate: &Sentence, breakdown: &ScoreBreakdown) -> Vec<String> {
    let q = |ix: &[usize]| ix.iter().map(|&i| question.bunsetsus()[i].surface()).collect::<Vec<_>>().join(" ");
    let c = |ix: &[usize]| ix.iter().map(|&i| candidate.bunsetsus()[i].surface()).collect::<Vec<_>>().join(" ");
    breakdown
        .contributions
        .iter()
        .map(|row| match row.kind {
            ContributionKind::Node | ContributionKind::Edge => format!(
                "[{}] Matching between \"{}\" and \"{}\": {}",
                row.kind,
                q(&row.question),
                c(&row.candidate),
                format_score(row.value)
            ),
            ContributionKind::Length => {
                format!("[LENGTH] Length penalty (DNUM={}): {}", breakdown.dnum, format_score(row.value))
            }
        })
        .collect()
}
