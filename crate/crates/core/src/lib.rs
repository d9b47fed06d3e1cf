//! Question answering over a dependency-chunked corpus.
//!
//! Candidates are retrieved by the IDF sum of the question's keywords, each
//! candidate is aligned chunk-by-chunk against the question to maximize a
//! node + dependency-edge similarity score with a length penalty, and the
//! chunk aligned with the question's interrogative becomes the answer.

pub mod corpus;
pub mod index;
pub mod matcher;
pub mod parallel;
pub mod qa;
pub mod similarity;

pub use corpus::{parse_corpus, serialize_corpus, Bunsetsu, Corpus, CorpusError, Pos, Sentence, Token};
pub use index::{extract_keywords, IdfIndex, IndexError, RetrievalHit};
pub use matcher::{Alignment, MatchParams, Matcher, QuestionProfile, ScoreBreakdown};
pub use parallel::Execution;
pub use qa::{answer, classify_question, AnswerResult, QaConfig, QaError, QuestionKind};
pub use similarity::{SemanticClass, SimilarityModel};
