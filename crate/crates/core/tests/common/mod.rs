#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use synqa_core::corpus::{Bunsetsu, Pos, Sentence, Token};
use synqa_core::similarity::ResourceFiles;
use synqa_core::{parse_corpus, Corpus, IdfIndex, MatchParams, QaConfig, SimilarityModel};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub fn corpus() -> Corpus {
    parse_corpus(&read("corpus.txt")).unwrap()
}

pub fn questions() -> Corpus {
    parse_corpus(&read("questions.txt")).unwrap()
}

pub fn question(id: &str) -> Sentence {
    let q = questions();
    q.sentences()[q.position_of(id).unwrap()].clone()
}

pub fn model() -> SimilarityModel {
    ResourceFiles {
        synonyms: Some(fixture("synonyms.tsv")),
        taxonomy: Some(fixture("taxonomy.txt")),
        types: Some(fixture("types.tsv")),
        interrogatives: Some(fixture("interrogatives.tsv")),
        units: Some(fixture("units.tsv")),
        weights: Some(fixture("weights.tsv")),
    }
    .load()
    .unwrap()
}

pub fn config(conf: &str) -> QaConfig {
    let mut c = QaConfig::default();
    c.apply_config(&read(conf)).unwrap();
    c
}

pub fn index(corpus: &Corpus) -> IdfIndex {
    IdfIndex::build(corpus).unwrap()
}

/// Random well-formed sentence over `vocab`; every bunsetsu gets one content
/// word and optionally a particle, heads point to a random later bunsetsu.
pub fn random_sentence(rng: &mut ChaCha8Rng, id: &str, len: usize, vocab: &[&str], interr: bool) -> Sentence {
    let mut bunsetsus = Vec::with_capacity(len);
    let interr_at = if interr { Some(rng.gen_range(0..len)) } else { None };
    for i in 0..len {
        let mut tokens = Vec::new();
        if interr_at == Some(i) {
            tokens.push(Token::new("nani", "nani", Pos::Interr).unwrap());
        } else {
            let w = vocab.choose(rng).unwrap();
            tokens.push(Token::new(w, w, Pos::Noun).unwrap());
        }
        if rng.gen_bool(0.5) {
            tokens.push(Token::new("no", "no", Pos::Part).unwrap());
        }
        bunsetsus.push(Bunsetsu::new(i, tokens).unwrap());
    }
    let heads = (0..len).map(|i| if i + 1 == len { None } else { Some(rng.gen_range(i + 1..len)) }).collect();
    Sentence::new(id, "rand", bunsetsus, heads).unwrap()
}

pub const VOCAB: [&str; 8] = ["w0", "w1", "w2", "w3", "w4", "w5", "w6", "w7"];

/// Synonym table with a random value in [0,1] for a random half of the pairs,
/// and random class memberships so interrogatives can match.
pub fn random_model(rng: &mut ChaCha8Rng) -> SimilarityModel {
    let mut model = SimilarityModel::default();
    for (i, a) in VOCAB.iter().enumerate() {
        for b in &VOCAB[i + 1..] {
            if rng.gen_bool(0.5) {
                model.insert_synonym(a, b, rng.gen_range(0.0..=1.0));
            }
        }
    }
    let types: String = VOCAB.iter().filter(|_| rng.gen_bool(0.4)).map(|w| format!("{w}\tTHING\n")).collect();
    model.set_types(&types).unwrap();
    model.set_interrogatives("nani\tTHING\n").unwrap();
    model
}

pub fn random_params(rng: &mut ChaCha8Rng) -> MatchParams {
    MatchParams {
        alpha: rng.gen_range(0.0..3.0),
        beta: rng.gen_range(0.0..0.5),
        w_interr: rng.gen_range(0.0..5.0),
        w_edge: rng.gen_range(0.0..3.0),
        idf_weighting: rng.gen_bool(0.5),
        ..MatchParams::default()
    }
}

/// IDF source over the random vocabulary with uneven document frequencies.
pub fn random_idf(rng: &mut ChaCha8Rng) -> IdfIndex {
    let mut text = String::new();
    for s in 0..10 {
        text.push_str(&format!("#sent d{s}\n"));
        let words: Vec<&str> = VOCAB.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let words = if words.is_empty() { vec!["w0"] } else { words };
        let toks = words.iter().map(|w| format!("{w} {w} NOUN")).collect::<Vec<_>>().join(" ; ");
        text.push_str(&format!("0 -1 {toks}\n\n"));
    }
    IdfIndex::build(&parse_corpus(&text).unwrap()).unwrap()
}

pub fn random_alignment(rng: &mut ChaCha8Rng, q: usize, c: usize) -> Vec<Option<usize>> {
    let mut free: Vec<usize> = (0..c).collect();
    free.shuffle(rng);
    (0..q).map(|_| if rng.gen_bool(0.7) { free.pop() } else { None }).collect()
}
