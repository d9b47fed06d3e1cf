mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use synqa_core::corpus::{apply_entry_prefix, entry_bunsetsu, DocInfo};
use synqa_core::index::idf_value;
use synqa_core::qa::{yes_no_decision, Verdict};
use synqa_core::similarity::Taxonomy;
use synqa_core::{
    answer, parse_corpus, serialize_corpus, Alignment, Bunsetsu, Corpus, Execution, IdfIndex, MatchParams, Matcher,
    Pos, QaConfig, QuestionKind, QuestionProfile, ScoreBreakdown, Sentence, SimilarityModel, Token,
};

use common::*;

const POS: [Pos; 7] = [Pos::Noun, Pos::Verb, Pos::Adj, Pos::Num, Pos::Part, Pos::Interr, Pos::Other];

fn token() -> impl Strategy<Value = Token> {
    ("[a-z][a-z0-9-]{0,5}", prop::option::of("[a-z][a-z-]{0,5}"), 0..POS.len())
        .prop_map(|(s, l, p)| Token::new(&s, l.as_deref().unwrap_or(&s), POS[p]).unwrap())
}

/// Sentence with `n` bunsetsus; bunsetsu `i` heads to some later one.
fn sentence(id: String) -> impl Strategy<Value = Sentence> {
    (1usize..7)
        .prop_flat_map(|n| {
            let heads: Vec<BoxedStrategy<Option<usize>>> = (0..n)
                .map(|i| if i + 1 == n { Just(None).boxed() } else { (i + 1..n).prop_map(Some).boxed() })
                .collect();
            (prop::collection::vec(prop::collection::vec(token(), 1..4), n), heads)
        })
        .prop_map(move |(chunks, heads)| {
            let bunsetsus = chunks.into_iter().enumerate().map(|(i, t)| Bunsetsu::new(i, t).unwrap()).collect();
            Sentence::new(id.clone(), "_", bunsetsus, heads).unwrap()
        })
}

fn corpus_strategy() -> impl Strategy<Value = Corpus> {
    prop::collection::vec(any::<u8>(), 1..5).prop_flat_map(|ids| {
        let parts: Vec<_> = ids.iter().enumerate().map(|(i, _)| sentence(format!("s{i}"))).collect();
        parts.prop_map(|ss| {
            let mut c = Corpus::new();
            for s in ss {
                c.push(s).unwrap();
            }
            c
        })
    })
}

fn instance(seed: u64, max_q: usize, max_c: usize) -> (SimilarityModel, MatchParams, IdfIndex, Sentence, Sentence) {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = random_model(&mut rng);
    let params = random_params(&mut rng);
    let idf = random_idf(&mut rng);
    let (ql, cl) = (rng.gen_range(1..=max_q), rng.gen_range(1..=max_c));
    let interr = rng.gen_bool(0.5);
    let q = random_sentence(&mut rng, "q", ql, &VOCAB, interr);
    let c = random_sentence(&mut rng, "c", cl, &VOCAB, false);
    (model, params, idf, q, c)
}

/// Taxonomy text for a random tree; node `i` carries lemma `l{i}`.
fn taxonomy_text(parents: &[usize]) -> String {
    fn walk(node: usize, depth: usize, parents: &[usize], out: &mut String) {
        let pad = "  ".repeat(depth);
        out.push_str(&format!("{pad}C{node}\n{pad}  = l{node}\n"));
        for child in 1..parents.len() + 1 {
            if parents[child - 1] == node {
                walk(child, depth + 1, parents, out);
            }
        }
    }
    let mut out = String::new();
    walk(0, 0, parents, &mut out);
    out
}

fn parents() -> impl Strategy<Value = Vec<usize>> {
    (0usize..10).prop_flat_map(|n| (0..n).map(|i| (0..=i).boxed()).collect::<Vec<_>>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn corpus_round_trip(c in corpus_strategy()) {
        let text = serialize_corpus(&c);
        let back = parse_corpus(&text).unwrap();
        prop_assert_eq!(back.sentences(), c.sentences());
        prop_assert_eq!(serialize_corpus(&back), text);
    }

    #[test]
    fn entry_prefix_shifts_structure(s in sentence("s".into()), word in "[a-z]{1,8}") {
        let p = apply_entry_prefix(&s, entry_bunsetsu(&word).unwrap(), "wa").unwrap();
        prop_assert_eq!(p.len(), s.len() + 1);
        prop_assert_eq!(p.root(), s.root() + 1);
        prop_assert_eq!(p.head(0), Some(s.root() + 1));
        prop_assert_eq!(p.bunsetsus()[0].surface(), format!("{word} wa"));
        for i in 0..s.len() {
            prop_assert_eq!(p.head(i + 1), s.head(i).map(|h| h + 1));
            prop_assert_eq!(&p.bunsetsus()[i + 1].tokens, &s.bunsetsus()[i].tokens);
        }
    }

    #[test]
    fn entry_prefix_metadata_is_not_reapplied(s in sentence("s".into()), word in "[a-z]{1,8}") {
        let mut c = Corpus::new();
        c.add_doc("d", DocInfo { source: "dict".into(), entry: Some(word.clone()) });
        let mut text = format!("#corpus v1\n#doc d source=dict entry-prefix={word}\n");
        let body = serialize_corpus(&{ let mut one = Corpus::new(); one.push(s.clone()).unwrap(); one });
        text.push_str(body.lines().filter(|l| !l.starts_with("#corpus") && !l.starts_with("#doc")).collect::<Vec<_>>().join("\n").as_str());
        let loaded = parse_corpus(&text).unwrap();
        prop_assert_eq!(loaded.sentences()[0].len(), s.len() + 1);
        let again = parse_corpus(&serialize_corpus(&loaded)).unwrap();
        prop_assert_eq!(again.sentences(), loaded.sentences());
    }

    #[test]
    fn idf_decreases_with_df(n in 1usize..500, a in 1usize..500, b in 1usize..500) {
        let (a, b) = (a.min(n), b.min(n));
        if a < b {
            prop_assert!(idf_value(n, a) > idf_value(n, b));
        }
        prop_assert!(idf_value(n, a) >= 0.0);
        prop_assert_eq!(idf_value(n, n), 0.0);
    }

    #[test]
    fn retrieval_sorted_unique_and_finds_sources(c in corpus_strategy(), k in 1usize..10) {
        let idx = IdfIndex::build(&c).unwrap();
        for (pos, s) in c.sentences().iter().enumerate() {
            let kw: BTreeSet<String> = s.tokens().filter(|t| t.pos.is_content()).map(|t| t.lemma.clone()).collect();
            if kw.is_empty() {
                continue;
            }
            let all = idx.retrieve(&kw, usize::MAX).unwrap();
            prop_assert!(all.iter().any(|h| h.position == pos));
            let hits = idx.retrieve(&kw, k).unwrap();
            prop_assert!(hits.len() <= k);
            let ids: BTreeSet<usize> = hits.iter().map(|h| h.position).collect();
            prop_assert_eq!(ids.len(), hits.len());
            for w in hits.windows(2) {
                prop_assert!(w[0].idf_sum > w[1].idf_sum || (w[0].idf_sum == w[1].idf_sum && w[0].position < w[1].position));
            }
            prop_assert_eq!(&hits[..], &all[..hits.len()]);
        }
    }

    #[test]
    fn index_text_round_trip(c in corpus_strategy()) {
        let idx = IdfIndex::build(&c).unwrap();
        prop_assert_eq!(IdfIndex::from_text(&idx.to_text()).unwrap(), idx);
    }

    #[test]
    fn word_sim_bounded_and_symmetric(seed in any::<u64>(), i in 0usize..8, j in 0usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(&mut rng);
        let (a, b) = (VOCAB[i], VOCAB[j]);
        let v = m.word_sim(a, b);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert_eq!(v, m.word_sim(b, a));
        prop_assert_eq!(m.word_sim(a, a), 1.0);
    }

    #[test]
    fn taxonomy_similarity_one_only_on_same_node(ps in parents(), a in 0usize..10, b in 0usize..10) {
        let n = ps.len() + 1;
        let (a, b) = (a % n, b % n);
        let tax = Taxonomy::parse(&taxonomy_text(&ps)).unwrap();
        let v = tax.similarity(&format!("l{a}"), &format!("l{b}")).unwrap();
        prop_assert!(v > 0.0 && v <= 1.0);
        prop_assert_eq!(v == 1.0, a == b);
        prop_assert_eq!(v, tax.similarity(&format!("l{b}"), &format!("l{a}")).unwrap());
    }

    #[test]
    fn optimizer_output_is_injective_and_dominates(seed in any::<u64>(), draws in prop::collection::vec(any::<u64>(), 8)) {
        let (model, params, idf, q, c) = instance(seed, 6, 9);
        let m = Matcher::new(&model, &params, &idf);
        let profile = QuestionProfile::new(&q, &model);
        let (a, best) = m.best_alignment(&profile, &c);
        prop_assert!(a.check(&q, &c).is_ok());
        prop_assert_eq!(m.score_alignment(&profile, &c, &a).unwrap(), best.clone());
        let empty = m.score_alignment(&profile, &c, &Alignment::empty(q.len())).unwrap();
        prop_assert!(best.total >= empty.total);
        if q.len() * c.len() <= params.exact_limit {
            for d in draws {
                let mut rng = ChaCha8Rng::seed_from_u64(d);
                let pairs = random_alignment(&mut rng, q.len(), c.len());
                let other = m.score_alignment(&profile, &c, &Alignment::new(pairs, c.len()).unwrap()).unwrap();
                prop_assert!(best.total >= other.total, "{} < {}", best.total, other.total);
            }
        }
    }

    #[test]
    fn heuristic_never_beats_exact(seed in any::<u64>()) {
        let (model, params, idf, q, c) = instance(seed, 5, 7);
        let profile = QuestionProfile::new(&q, &model);
        let exact = Matcher::new(&model, &params, &idf).best_alignment(&profile, &c).1;
        let local = MatchParams { exact_limit: 1, ..params.clone() };
        let (a, h) = Matcher::new(&model, &local, &idf).best_alignment(&profile, &c);
        prop_assert!(a.check(&q, &c).is_ok());
        prop_assert!(h.total <= exact.total);
    }

    #[test]
    fn beta_shifts_every_alignment_equally(seed in any::<u64>(), beta in 0.0f64..2.0) {
        let (model, params, idf, q, c) = instance(seed, 5, 7);
        let profile = QuestionProfile::new(&q, &model);
        let zero = MatchParams { beta: 0.0, ..params.clone() };
        let with = MatchParams { beta, ..params };
        let (a0, s0) = Matcher::new(&model, &zero, &idf).best_alignment(&profile, &c);
        let (a1, s1) = Matcher::new(&model, &with, &idf).best_alignment(&profile, &c);
        prop_assert_eq!(a0, a1);
        prop_assert!((s0.total - beta * c.len() as f64 - s1.total).abs() < 1e-9 * (1.0 + s0.total.abs()));
    }

    #[test]
    fn yes_no_monotone_in_theta(b1 in 0.0f64..20.0, b2 in 0.0f64..20.0, s1 in 0.0f64..20.0, s2 in 0.0f64..20.0, alpha in 0.0f64..3.0, t1 in 0.0f64..=1.0, t2 in 0.0f64..=1.0) {
        let bd = |b1, b2| ScoreBreakdown { b1, b2, dnum: 0, total: 0.0, contributions: vec![] };
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let at_lo = yes_no_decision(&bd(b1, b2), &bd(s1, s2), alpha, lo);
        let at_hi = yes_no_decision(&bd(b1, b2), &bd(s1, s2), alpha, hi);
        prop_assert!((0.0..=1.0).contains(&at_lo.normalized));
        prop_assert_eq!(at_lo.normalized, at_hi.normalized);
        if at_hi.verdict == Verdict::Yes {
            prop_assert_eq!(at_lo.verdict, Verdict::Yes);
        }
    }
}

#[test]
fn zero_similarity_gives_empty_alignment() {
    let model = SimilarityModel::empty();
    let params = MatchParams::default();
    let c = parse_corpus("#sent c\n0 1 aa aa NOUN\n1 -1 bb bb NOUN\n").unwrap();
    let q = parse_corpus("#sent q\n0 1 xx xx NOUN\n1 -1 yy yy NOUN\n").unwrap();
    let idf = IdfIndex::build(&c).unwrap();
    let profile = QuestionProfile::new(&q.sentences()[0], &model);
    let (a, s) = Matcher::new(&model, &params, &idf).best_alignment(&profile, &c.sentences()[0]);
    assert!(a.is_empty());
    assert_eq!(s.b1, 0.0);
    assert_eq!(s.b2, 0.0);
    assert_eq!(s.total, -0.2);
}

#[test]
fn blank_behaves_like_any_interrogative() {
    let corpus = corpus();
    let index = index(&corpus);
    let model = model();
    let cfg = config("uganda.conf");
    let blank = parse_corpus(
        "#sent q\n0 1 uganda uganda NOUN ; no no PART\n1 2 shuto shuto NOUN ; wa wa PART\n2 -1 ___ ___ NOUN ; desu desu OTHER\n",
    )
    .unwrap();
    let nani = parse_corpus(
        "#sent q\n0 1 uganda uganda NOUN ; no no PART\n1 2 shuto shuto NOUN ; wa wa PART\n2 -1 nani nani INTERR ; desu desu OTHER\n",
    )
    .unwrap();
    let b = answer(&blank.sentences()[0], &corpus, &index, &model, &cfg).unwrap();
    let n = answer(&nani.sentences()[0], &corpus, &index, &model, &cfg).unwrap();
    assert_eq!(b.kind, QuestionKind::FillBlank);
    assert_eq!(n.kind, QuestionKind::Wh);
    assert_eq!(b.answers.len(), n.answers.len());
    for (x, y) in b.answers.iter().zip(&n.answers) {
        assert_eq!(x.answer, y.answer);
        assert_eq!(x.score, y.score);
        assert_eq!(x.alignment, y.alignment);
    }
}

#[test]
fn answering_is_deterministic_across_execution_modes() {
    let corpus = corpus();
    let index = index(&corpus);
    let model = model();
    for (qid, conf) in [("q-uganda", "uganda.conf"), ("q-magna", "magna.conf"), ("q-parkinson", "parkinson.conf")] {
        let q = question(qid);
        let mut cfg: QaConfig = config(conf);
        cfg.execution = Execution::Sequential;
        let seq = answer(&q, &corpus, &index, &model, &cfg).unwrap();
        cfg.execution = Execution::Parallel;
        let par = answer(&q, &corpus, &index, &model, &cfg).unwrap();
        let again = answer(&q, &corpus, &index, &model, &cfg).unwrap();
        assert_eq!(seq, par);
        assert_eq!(par, again);
    }
}

#[test]
fn fixture_corpus_loads_in_file_order() {
    let c = corpus();
    let ids: Vec<&str> = c.sentences().iter().map(|s| s.id.as_str()).collect();
    assert_eq!(
        ids,
        [
            "daijirin:uganda",
            "daijirin:magunakaruta",
            "daijirin:nairobi",
            "mainichi:parkinson",
            "mainichi:uganda-coffee",
            "mainichi:magna-exhibit",
            "mainichi:dopamine",
            "mainichi:kampala-rain",
        ]
    );
    let text = serialize_corpus(&c);
    let back = parse_corpus(&text).unwrap();
    assert_eq!(back.sentences(), c.sentences());
    assert_eq!(serialize_corpus(&back), text);
}
