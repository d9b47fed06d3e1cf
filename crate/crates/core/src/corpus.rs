//! Chunked dependency corpus: token model, sentence validation, the
//! line-oriented file format, and the dictionary entry-prefix transform.
//!
//! File layout (UTF-8):
//!
//! ```text
//! #corpus v1
//! #doc <doc-id> [source=<name>] [entry-prefix=<word>] [topic-marker=<word>] [entry=<word>]
//! #sent <sent-id>
//! <idx> <head|-1> <surface> <lemma> <POS> [; <surface> <lemma> <POS>]...
//! <blank line terminates the sentence>
//! ```
//!
//! `entry-prefix=w` prepends a `w wa` bunsetsu to every following sentence of
//! that document at load time. Serialized corpora record an already applied
//! prefix as `entry=w`, which is metadata only, so reparsing does not apply it
//! twice. A lemma written as `_` stands for the lowercased surface.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

pub const FORMAT_HEADER: &str = "#corpus v1";
pub const DEFAULT_DOC: &str = "_";
pub const DEFAULT_TOPIC_MARKER: &str = "wa";
/// Surface/lemma of the fill-in-the-blank placeholder token.
pub const BLANK: &str = "___";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
    Pron,
    Interr,
    Num,
    Part,
    Other,
}

impl Pos {
    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Noun => "NOUN",
            Pos::Verb => "VERB",
            Pos::Adj => "ADJ",
            Pos::Adv => "ADV",
            Pos::Pron => "PRON",
            Pos::Interr => "INTERR",
            Pos::Num => "NUM",
            Pos::Part => "PART",
            Pos::Other => "OTHER",
        }
    }

    /// Content words are the ones indexed and compared lexically.
    pub fn is_content(self) -> bool {
        matches!(self, Pos::Noun | Pos::Verb | Pos::Adj | Pos::Num)
    }

    /// Tokens stripped from the tail of an extracted answer.
    pub fn is_function(self) -> bool {
        matches!(self, Pos::Part | Pos::Other)
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "NOUN" => Pos::Noun,
            "VERB" => Pos::Verb,
            "ADJ" => Pos::Adj,
            "ADV" => Pos::Adv,
            "PRON" => Pos::Pron,
            "INTERR" => Pos::Interr,
            "NUM" => Pos::Num,
            "PART" => Pos::Part,
            "OTHER" => Pos::Other,
            _ => return Err(format!("unknown part of speech `{s}`")),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Token {
    pub surface: String,
    pub lemma: String,
    pub pos: Pos,
}

impl Token {
    pub fn new(surface: &str, lemma: &str, pos: Pos) -> Result<Self, CorpusError> {
        if surface.is_empty() || lemma.is_empty() {
            return Err(CorpusError::Invalid("token surface and lemma must be non-empty".into()));
        }
        if surface.chars().any(|c| c.is_whitespace() || c == ';')
            || lemma.chars().any(|c| c.is_whitespace() || c == ';')
        {
            return Err(CorpusError::Invalid(format!(
                "token `{surface}`/`{lemma}` contains whitespace or `;`"
            )));
        }
        Ok(Token { surface: surface.to_string(), lemma: lemma.to_string(), pos })
    }

    /// Token whose lemma is the lowercased surface.
    pub fn unlemmatized(surface: &str, pos: Pos) -> Result<Self, CorpusError> {
        Token::new(surface, &surface.to_lowercase(), pos)
    }

    pub fn is_blank(&self) -> bool {
        self.surface == BLANK || self.lemma == BLANK
    }
}

/// A phrasal chunk; the unit aligned between question and candidate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Bunsetsu {
    pub index: usize,
    pub tokens: Vec<Token>,
}

impl Bunsetsu {
    pub fn new(index: usize, tokens: Vec<Token>) -> Result<Self, CorpusError> {
        if tokens.is_empty() {
            return Err(CorpusError::Invalid(format!("bunsetsu {index} has no tokens")));
        }
        Ok(Bunsetsu { index, tokens })
    }

    pub fn surface(&self) -> String {
        self.tokens.iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" ")
    }

    pub fn content_lemmas(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().filter(|t| t.pos.is_content()).map(|t| t.lemma.as_str())
    }

    pub fn has_interrogative(&self) -> bool {
        self.tokens.iter().any(|t| t.pos == Pos::Interr)
    }

    pub fn has_blank(&self) -> bool {
        self.tokens.iter().any(Token::is_blank)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sentence {
    pub id: String,
    pub doc_id: String,
    bunsetsus: Vec<Bunsetsu>,
    heads: Vec<Option<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeadError {
    SelfHead(usize),
    OutOfRange(usize),
    NoRoot,
    MultipleRoots,
    Cycle(usize),
}

impl fmt::Display for HeadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeadError::SelfHead(i) => write!(f, "bunsetsu {i} lists itself as head"),
            HeadError::OutOfRange(i) => write!(f, "head of bunsetsu {i} is out of range"),
            HeadError::NoRoot => write!(f, "no root bunsetsu"),
            HeadError::MultipleRoots => write!(f, "more than one root bunsetsu"),
            HeadError::Cycle(i) => write!(f, "head chain from bunsetsu {i} never reaches the root"),
        }
    }
}

/// Checks that `heads` forms a single tree.
pub fn validate_heads(heads: &[Option<usize>]) -> Result<(), HeadError> {
    let n = heads.len();
    for (i, h) in heads.iter().enumerate() {
        match *h {
            Some(h) if h == i => return Err(HeadError::SelfHead(i)),
            Some(h) if h >= n => return Err(HeadError::OutOfRange(i)),
            _ => {}
        }
    }
    match heads.iter().filter(|h| h.is_none()).count() {
        0 => return Err(HeadError::NoRoot),
        1 => {}
        _ => return Err(HeadError::MultipleRoots),
    }
    for start in 0..n {
        let mut cur = start;
        let mut steps = 0;
        while let Some(h) = heads[cur] {
            cur = h;
            steps += 1;
            if steps > n {
                return Err(HeadError::Cycle(start));
            }
        }
    }
    Ok(())
}

impl Sentence {
    pub fn new(
        id: impl Into<String>,
        doc_id: impl Into<String>,
        bunsetsus: Vec<Bunsetsu>,
        heads: Vec<Option<usize>>,
    ) -> Result<Self, CorpusError> {
        let id = id.into();
        if bunsetsus.is_empty() {
            return Err(CorpusError::Invalid(format!("sentence `{id}` has no bunsetsus")));
        }
        if bunsetsus.len() != heads.len() {
            return Err(CorpusError::Invalid(format!("sentence `{id}`: head count mismatch")));
        }
        if let Some(b) = bunsetsus.iter().enumerate().find(|(i, b)| b.index != *i) {
            return Err(CorpusError::Invalid(format!(
                "sentence `{id}`: bunsetsu index {} at position {}",
                b.1.index, b.0
            )));
        }
        if let Some(b) = bunsetsus.iter().find(|b| b.tokens.is_empty()) {
            return Err(CorpusError::Invalid(format!("sentence `{id}`: bunsetsu {} empty", b.index)));
        }
        validate_heads(&heads).map_err(|e| CorpusError::Invalid(format!("sentence `{id}`: {e}")))?;
        Ok(Sentence { id, doc_id: doc_id.into(), bunsetsus, heads })
    }

    pub fn bunsetsus(&self) -> &[Bunsetsu] {
        &self.bunsetsus
    }

    pub fn heads(&self) -> &[Option<usize>] {
        &self.heads
    }

    pub fn head(&self, i: usize) -> Option<usize> {
        self.heads[i]
    }

    /// Number of bunsetsus (DNUM).
    pub fn len(&self) -> usize {
        self.bunsetsus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bunsetsus.is_empty()
    }

    pub fn root(&self) -> usize {
        self.heads.iter().position(Option::is_none).expect("validated sentence has a root")
    }

    /// Dependency pairs `(dependent, head)` in dependent order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.heads.iter().enumerate().filter_map(|(i, h)| h.map(|h| (i, h)))
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.bunsetsus.iter().flat_map(|b| b.tokens.iter())
    }

    pub fn surface(&self) -> String {
        self.bunsetsus.iter().map(Bunsetsu::surface).collect::<Vec<_>>().join(" ")
    }
}

/// Bunsetsu made of a single noun; used for dictionary headwords.
pub fn entry_bunsetsu(word: &str) -> Result<Bunsetsu, CorpusError> {
    Bunsetsu::new(0, vec![Token::unlemmatized(word, Pos::Noun)?])
}

/// Prepends `entry + topic_marker` as bunsetsu 0. The new chunk depends on
/// the original root; every other index and head shifts by one.
pub fn apply_entry_prefix(
    sentence: &Sentence,
    entry: Bunsetsu,
    topic_marker: &str,
) -> Result<Sentence, CorpusError> {
    let mut tokens = entry.tokens;
    tokens.push(Token::new(topic_marker, topic_marker, Pos::Part)?);
    let root = sentence.root();
    let mut bunsetsus = Vec::with_capacity(sentence.len() + 1);
    bunsetsus.push(Bunsetsu::new(0, tokens)?);
    bunsetsus.extend(sentence.bunsetsus.iter().map(|b| Bunsetsu {
        index: b.index + 1,
        tokens: b.tokens.clone(),
    }));
    let mut heads = Vec::with_capacity(sentence.len() + 1);
    heads.push(Some(root + 1));
    heads.extend(sentence.heads.iter().map(|h| h.map(|h| h + 1)));
    Sentence::new(sentence.id.clone(), sentence.doc_id.clone(), bunsetsus, heads)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DocInfo {
    pub source: String,
    /// Headword already prefixed to this document's sentences.
    pub entry: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Corpus {
    sentences: Vec<Sentence>,
    docs: BTreeMap<String, DocInfo>,
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn docs(&self) -> &BTreeMap<String, DocInfo> {
        &self.docs
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn get(&self, position: usize) -> Option<&Sentence> {
        self.sentences.get(position)
    }

    pub fn position_of(&self, id: &str) -> Option<usize> {
        self.sentences.iter().position(|s| s.id == id)
    }

    pub fn add_doc(&mut self, doc_id: &str, info: DocInfo) {
        self.docs.insert(doc_id.to_string(), info);
    }

    pub fn push(&mut self, sentence: Sentence) -> Result<(), CorpusError> {
        if self.sentences.iter().any(|s| s.id == sentence.id) {
            return Err(CorpusError::DuplicateId { line: 0, id: sentence.id });
        }
        self.docs.entry(sentence.doc_id.clone()).or_insert_with(|| DocInfo {
            source: sentence.doc_id.clone(),
            entry: None,
        });
        self.sentences.push(sentence);
        Ok(())
    }

    /// Appends every sentence of `other`; ids must stay unique.
    pub fn extend(&mut self, other: Corpus) -> Result<(), CorpusError> {
        for (id, info) in other.docs {
            self.docs.entry(id).or_insert(info);
        }
        for s in other.sentences {
            self.push(s)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("line {line}, column {col}: {msg}")]
    Malformed { line: usize, col: usize, msg: String },
    #[error("line {line}: duplicate sentence id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: sentence `{id}`: cyclic head relation ({detail})")]
    CyclicHead { line: usize, id: String, detail: String },
    #[error("line {line}: sentence `{id}` has multiple roots")]
    MultipleRoots { line: usize, id: String },
    #[error("line {line}: sentence `{id}` has no root")]
    NoRoot { line: usize, id: String },
    #[error("line {line}: {msg}")]
    Structure { line: usize, msg: String },
    #[error("invalid corpus data: {0}")]
    Invalid(String),
}

/// Whitespace-separated fields of `line` with their 1-based columns.
fn fields(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(byte, f)| (line[..byte].chars().count() + 1, f))
        .collect()
}

struct PendingSentence {
    id: String,
    line: usize,
    rows: Vec<(usize, Option<usize>, Vec<Token>)>,
}

struct DocState {
    id: String,
    prefix: Option<(String, String)>,
}

/// Parses the corpus file format; the first violation is reported with its location.
pub fn parse_corpus(text: &str) -> Result<Corpus, CorpusError> {
    let mut corpus = Corpus::new();
    let mut doc = DocState { id: DEFAULT_DOC.to_string(), prefix: None };
    let mut pending: Option<PendingSentence> = None;
    let mut seen = HashSet::new();

    let finish = |pending: PendingSentence,
                      doc: &DocState,
                      corpus: &mut Corpus,
                      seen: &mut HashSet<String>|
     -> Result<(), CorpusError> {
        let PendingSentence { id, line, rows } = pending;
        if rows.is_empty() {
            return Err(CorpusError::Structure { line, msg: format!("sentence `{id}` is empty") });
        }
        let mut bunsetsus = Vec::with_capacity(rows.len());
        let mut heads = Vec::with_capacity(rows.len());
        for (pos, (idx, head, tokens)) in rows.into_iter().enumerate() {
            if idx != pos {
                return Err(CorpusError::Structure {
                    line,
                    msg: format!("sentence `{id}`: expected bunsetsu index {pos}, found {idx}"),
                });
            }
            bunsetsus.push(Bunsetsu { index: idx, tokens });
            heads.push(head);
        }
        validate_heads(&heads).map_err(|e| match e {
            HeadError::MultipleRoots => CorpusError::MultipleRoots { line, id: id.clone() },
            HeadError::NoRoot => CorpusError::NoRoot { line, id: id.clone() },
            HeadError::SelfHead(_) | HeadError::Cycle(_) => {
                CorpusError::CyclicHead { line, id: id.clone(), detail: e.to_string() }
            }
            HeadError::OutOfRange(_) => CorpusError::Structure { line, msg: e.to_string() },
        })?;
        if !seen.insert(id.clone()) {
            return Err(CorpusError::DuplicateId { line, id });
        }
        let mut sentence = Sentence { id, doc_id: doc.id.clone(), bunsetsus, heads };
        if let Some((word, marker)) = &doc.prefix {
            sentence = apply_entry_prefix(&sentence, entry_bunsetsu(word)?, marker)?;
        }
        corpus.sentences.push(sentence);
        Ok(())
    };

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim_end();
        if line.trim().is_empty() {
            if let Some(p) = pending.take() {
                finish(p, &doc, &mut corpus, &mut seen)?;
            }
            continue;
        }
        if line.starts_with("##") || line == FORMAT_HEADER {
            continue;
        }
        let f = fields(line);
        if let Some(directive) = line.strip_prefix('#') {
            if let Some(p) = pending.take() {
                finish(p, &doc, &mut corpus, &mut seen)?;
            }
            let name = directive.split_whitespace().next().unwrap_or("");
            match name {
                "doc" => {
                    let Some(&(_, id)) = f.get(1) else {
                        return Err(CorpusError::Malformed { line: lineno, col: 1, msg: "#doc needs an id".into() });
                    };
                    let mut info = DocInfo { source: id.to_string(), entry: None };
                    let mut prefix = None;
                    let mut marker = DEFAULT_TOPIC_MARKER.to_string();
                    for &(col, opt) in &f[2..] {
                        let Some((k, v)) = opt.split_once('=') else {
                            return Err(CorpusError::Malformed { line: lineno, col, msg: format!("expected key=value, got `{opt}`") });
                        };
                        if v.is_empty() {
                            return Err(CorpusError::Malformed { line: lineno, col, msg: format!("empty value for `{k}`") });
                        }
                        match k {
                            "source" => info.source = v.to_string(),
                            "entry-prefix" => prefix = Some(v.to_string()),
                            "topic-marker" => marker = v.to_string(),
                            "entry" => info.entry = Some(v.to_string()),
                            _ => {
                                return Err(CorpusError::Malformed { line: lineno, col, msg: format!("unknown #doc option `{k}`") })
                            }
                        }
                    }
                    if let Some(p) = &prefix {
                        info.entry = Some(p.clone());
                    }
                    corpus.docs.insert(id.to_string(), info);
                    doc = DocState { id: id.to_string(), prefix: prefix.map(|p| (p, marker)) };
                }
                "sent" => {
                    let Some(&(_, id)) = f.get(1) else {
                        return Err(CorpusError::Malformed { line: lineno, col: 1, msg: "#sent needs an id".into() });
                    };
                    if let Some(&(col, _)) = f.get(2) {
                        return Err(CorpusError::Malformed { line: lineno, col, msg: "trailing text after sentence id".into() });
                    }
                    if !corpus.docs.contains_key(&doc.id) {
                        corpus.docs.insert(doc.id.clone(), DocInfo { source: doc.id.clone(), entry: None });
                    }
                    pending = Some(PendingSentence { id: id.to_string(), line: lineno, rows: Vec::new() });
                }
                _ => {
                    return Err(CorpusError::Malformed { line: lineno, col: 1, msg: format!("unknown directive `#{name}`") })
                }
            }
            continue;
        }
        let Some(p) = pending.as_mut() else {
            return Err(CorpusError::Malformed { line: lineno, col: 1, msg: "bunsetsu line outside a #sent block".into() });
        };
        p.rows.push(parse_bunsetsu_line(line, lineno)?);
    }
    if let Some(p) = pending.take() {
        finish(p, &doc, &mut corpus, &mut seen)?;
    }
    Ok(corpus)
}

fn parse_bunsetsu_line(line: &str, lineno: usize) -> Result<(usize, Option<usize>, Vec<Token>), CorpusError> {
    let malformed = |col: usize, msg: String| CorpusError::Malformed { line: lineno, col, msg };
    let f = fields(line);
    if f.len() < 2 {
        return Err(malformed(1, "expected `<idx> <head> <surface> <lemma> <POS>`".into()));
    }
    let idx: usize = f[0].1.parse().map_err(|_| malformed(f[0].0, format!("bad bunsetsu index `{}`", f[0].1)))?;
    let head = match f[1].1 {
        "-1" => None,
        h => Some(h.parse::<usize>().map_err(|_| malformed(f[1].0, format!("bad head index `{h}`")))?),
    };
    let mut tokens = Vec::new();
    let mut group: Vec<(usize, &str)> = Vec::new();
    let mut flush = |group: &mut Vec<(usize, &str)>, col: usize| -> Result<(), CorpusError> {
        if group.len() != 3 {
            let at = group.first().map_or(col, |g| g.0);
            return Err(malformed(at, format!("token needs `surface lemma POS`, got {} field(s)", group.len())));
        }
        let pos: Pos = group[2].1.parse().map_err(|e: String| malformed(group[2].0, e))?;
        let surface = group[0].1;
        let lemma = if group[1].1 == "_" { surface.to_lowercase() } else { group[1].1.to_string() };
        tokens.push(Token::new(surface, &lemma, pos).map_err(|e| malformed(group[0].0, e.to_string()))?);
        group.clear();
        Ok(())
    };
    for &(col, field) in &f[2..] {
        // `;` may stand alone or be glued to a neighbouring field.
        let mut offset = 0;
        for (k, piece) in field.split(';').enumerate() {
            if k > 0 {
                flush(&mut group, col + offset)?;
            }
            if !piece.is_empty() {
                group.push((col + offset, piece));
            }
            offset += piece.chars().count() + 1;
        }
    }
    flush(&mut group, f.last().map_or(1, |l| l.0))?;
    Ok((idx, head, tokens))
}

/// Deterministic serialization; `parse_corpus(serialize_corpus(c)) == c`.
pub fn serialize_corpus(corpus: &Corpus) -> String {
    let mut out = String::new();
    out.push_str(FORMAT_HEADER);
    out.push('\n');
    let mut written = HashSet::new();
    let mut current: Option<&str> = None;
    let write_doc = |out: &mut String, id: &str, info: &DocInfo| {
        out.push_str("#doc ");
        out.push_str(id);
        if info.source != id {
            out.push_str(&format!(" source={}", info.source));
        }
        if let Some(e) = &info.entry {
            out.push_str(&format!(" entry={e}"));
        }
        out.push('\n');
    };
    for s in &corpus.sentences {
        if current != Some(s.doc_id.as_str()) {
            let info = corpus.docs.get(&s.doc_id).cloned().unwrap_or(DocInfo { source: s.doc_id.clone(), entry: None });
            write_doc(&mut out, &s.doc_id, &info);
            written.insert(s.doc_id.as_str());
            current = Some(s.doc_id.as_str());
        }
        out.push_str("#sent ");
        out.push_str(&s.id);
        out.push('\n');
        for (b, h) in s.bunsetsus.iter().zip(&s.heads) {
            let head = h.map_or_else(|| "-1".to_string(), |h| h.to_string());
            let toks = b
                .tokens
                .iter()
                .map(|t| format!("{} {} {}", t.surface, t.lemma, t.pos))
                .collect::<Vec<_>>()
                .join(" ; ");
            out.push_str(&format!("{} {} {}\n", b.index, head, toks));
        }
        out.push('\n');
    }
    // Documents without sentences still carry metadata.
    for (id, info) in &corpus.docs {
        if !written.contains(id.as_str()) {
            write_doc(&mut out, id, info);
        }
    }
    out
}
