//! One-line question forms for the REPL.
//!
//! Chunks are separated by `||`. A chunk is either inline tokens
//! (`surface/lemma/POS` or `lemma/POS`, space separated, optionally ending in
//! `|head`) or a raw corpus bunsetsu line (`index head surface lemma POS ; ...`).
//! An inline chunk without `|head` depends on the next chunk; the last chunk
//! is the root.

use synqa_core::corpus::{Bunsetsu, Pos, Sentence, Token};
use synqa_core::parse_corpus;

pub fn parse_line(id: &str, line: &str) -> Result<Sentence, String> {
    let chunks: Vec<&str> = line.split("||").map(str::trim).collect();
    if chunks.iter().any(|c| c.is_empty()) {
        return Err("empty chunk".into());
    }
    if chunks.iter().all(|c| !c.contains('/')) {
        let mut text = format!("#sent {id}\n");
        for c in &chunks {
            text.push_str(c);
            text.push('\n');
        }
        let corpus = parse_corpus(&text).map_err(|e| e.to_string())?;
        return Ok(corpus.sentences()[0].clone());
    }
    let n = chunks.len();
    let mut bunsetsus = Vec::with_capacity(n);
    let mut heads = Vec::with_capacity(n);
    for (i, chunk) in chunks.iter().enumerate() {
        let (body, head) = match chunk.rsplit_once('|') {
            Some((body, h)) => {
                let h: i64 = h.trim().parse().map_err(|_| format!("chunk {}: bad head `{}`", i + 1, h.trim()))?;
                let head = match h {
                    -1 => None,
                    h if h >= 0 => Some(h as usize),
                    _ => return Err(format!("chunk {}: bad head `{h}`", i + 1)),
                };
                (body, head)
            }
            None => (*chunk, (i + 1 < n).then_some(i + 1)),
        };
        let tokens = body
            .split_whitespace()
            .map(|t| token(t).map_err(|e| format!("chunk {}: {e}", i + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        if tokens.is_empty() {
            return Err(format!("chunk {}: no tokens", i + 1));
        }
        bunsetsus.push(Bunsetsu::new(i, tokens).map_err(|e| e.to_string())?);
        heads.push(head);
    }
    Sentence::new(id, "_", bunsetsus, heads).map_err(|e| e.to_string())
}

fn token(text: &str) -> Result<Token, String> {
    let parts: Vec<&str> = text.split('/').collect();
    let (surface, lemma, pos) = match parts.as_slice() {
        [lemma, pos] => (*lemma, *lemma, *pos),
        [surface, lemma, pos] => (*surface, *lemma, *pos),
        _ => return Err(format!("token `{text}` is not surface/lemma/POS or lemma/POS")),
    };
    let pos: Pos = pos.parse().map_err(|_| format!("unknown part of speech `{pos}`"))?;
    Token::new(surface, lemma, pos).map_err(|e| e.to_string())
}
