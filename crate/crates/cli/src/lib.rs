//! `synqa` command-line front end.

pub mod inline;
pub mod output;

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use synqa_core::parallel::{self, Execution};
use synqa_core::similarity::ResourceFiles;
use synqa_core::{answer, parse_corpus, AnswerResult, Corpus, IdfIndex, QaConfig, QaError, QuestionKind, Sentence, SimilarityModel};

use output::{Format, Rendered, TSV_HEADER};

#[derive(Parser, Debug)]
#[command(name = "synqa", version, about = "Question answering by structural matching of dependency-chunked sentences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build an IDF index over one or more corpus files.
    Index {
        /// Where to write the index.
        #[arg(long)]
        out: PathBuf,
    },
    /// Answer questions given in corpus format.
    Ask {
        /// Question file in corpus format, `-` for stdin. Every sentence is asked.
        file: Option<PathBuf>,
        /// A single question in the inline chunk form.
        #[arg(long, conflicts_with = "file")]
        inline: Option<String>,
    },
    /// Score answers against a gold file and report accuracy.
    Eval {
        /// Questions in corpus format.
        #[arg(long)]
        questions: PathBuf,
        /// Lines of `question-id<TAB>answer`.
        #[arg(long)]
        gold: PathBuf,
    },
    /// Read one question per line from stdin; `:set key=value` changes a setting.
    Repl,
}

#[derive(Args, Debug)]
pub struct Options {
    /// Corpus file; repeat to concatenate several.
    #[arg(long, global = true)]
    pub corpus: Vec<PathBuf>,
    /// Prebuilt index; rebuilt from the corpus when absent.
    #[arg(long, global = true)]
    pub index: Option<PathBuf>,
    /// Synonym table `lemma<TAB>lemma<TAB>value`.
    #[arg(long, global = true)]
    pub synonyms: Option<PathBuf>,
    /// Indented class taxonomy.
    #[arg(long, global = true)]
    pub taxonomy: Option<PathBuf>,
    /// Type lexicon `lemma<TAB>CLASS,CLASS`.
    #[arg(long, global = true)]
    pub types: Option<PathBuf>,
    /// Interrogative map `word [noun]<TAB>CLASS`; replaces the built-in map.
    #[arg(long, global = true)]
    pub interrogatives: Option<PathBuf>,
    /// Unit rules `POS<TAB>unit<TAB>CLASS`; replaces the built-in rules.
    #[arg(long, global = true)]
    pub units: Option<PathBuf>,
    /// Lemma weights `lemma<TAB>weight`, used instead of IDF in node scores.
    #[arg(long, global = true)]
    pub weights: Option<PathBuf>,
    /// Config file of `key=value` lines.
    #[arg(long, global = true, env = "SYNQA_CONFIG")]
    pub config: Option<PathBuf>,
    /// Weight of the edge term B2 [default: 1]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Per-bunsetsu length penalty [default: 0.1]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Score of an interrogative matching an expected class [default: 10]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub w_interr: Option<f64>,
    /// Scale of edge similarities [default: 2]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub w_edge: Option<f64>,
    /// Candidates retrieved per question [default: 20]
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// YES threshold on the normalized score [default: 0.5]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Print the score breakdown of the top candidate.
    #[arg(long, global = true)]
    pub explain: bool,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "plain")]
    pub format: Format,
    /// Also write one JSON line per question with the full score breakdown.
    #[arg(long, global = true)]
    pub explain_out: Option<PathBuf>,
    /// Answers printed per question.
    #[arg(long, global = true, default_value_t = 5)]
    pub top: usize,
    /// Disable parallel candidate matching.
    #[arg(long, global = true)]
    pub sequential: bool,
}

pub struct Io<'a> {
    pub stdin: &'a mut dyn BufRead,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

type Res<T> = Result<T, String>;

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_corpus(paths: &[PathBuf]) -> Res<Corpus> {
    if paths.is_empty() {
        return Err("--corpus is required".into());
    }
    let mut corpus = Corpus::new();
    for p in paths {
        let part = parse_corpus(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))?;
        corpus.extend(part).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    Ok(corpus)
}

impl Options {
    fn qa_config(&self) -> Res<QaConfig> {
        let mut cfg = QaConfig::default();
        if let Some(p) = &self.config {
            cfg.apply_config(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))?;
        }
        let overrides = [
            ("alpha", self.alpha.map(|v| v.to_string())),
            ("beta", self.beta.map(|v| v.to_string())),
            ("w_interr", self.w_interr.map(|v| v.to_string())),
            ("w_edge", self.w_edge.map(|v| v.to_string())),
            ("k", self.k.map(|v| v.to_string())),
            ("theta", self.theta.map(|v| v.to_string())),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, &v).map_err(|e| format!("--{}: {e}", key.replace('_', "-")))?;
            }
        }
        if self.sequential {
            cfg.execution = Execution::Sequential;
        }
        Ok(cfg)
    }

    fn model(&self) -> Res<SimilarityModel> {
        ResourceFiles {
            synonyms: self.synonyms.clone(),
            taxonomy: self.taxonomy.clone(),
            types: self.types.clone(),
            interrogatives: self.interrogatives.clone(),
            units: self.units.clone(),
            weights: self.weights.clone(),
        }
        .load()
        .map_err(|e| e.to_string())
    }
}

/// Everything a question needs, loaded once.
struct Session {
    corpus: Corpus,
    index: IdfIndex,
    model: SimilarityModel,
    config: QaConfig,
}

impl Session {
    fn load(opts: &Options) -> Res<Self> {
        let config = opts.qa_config()?;
        let model = opts.model()?;
        let corpus = load_corpus(&opts.corpus)?;
        let index = match &opts.index {
            Some(p) => {
                let idx = IdfIndex::from_text(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))?;
                idx.check_corpus(&corpus).map_err(|e| format!("{}: {e}", p.display()))?;
                idx
            }
            None => IdfIndex::build(&corpus).map_err(|e| e.to_string())?,
        };
        Ok(Session { corpus, index, model, config })
    }

    /// `None` for a question without keywords.
    fn ask(&self, q: &Sentence) -> Res<Option<AnswerResult>> {
        match answer(q, &self.corpus, &self.index, &self.model, &self.config) {
            Ok(r) => Ok(Some(r)),
            Err(QaError::NoKeywords) => Ok(None),
            Err(e) => Err(format!("{}: {e}", q.id)),
        }
    }

    fn render(&self, opts: &Options, q: &Sentence, result: Option<&AnswerResult>) -> String {
        self.rendered(opts, q, result).render(opts.format)
    }

    fn rendered<'a>(&'a self, opts: &Options, q: &'a Sentence, result: Option<&'a AnswerResult>) -> Rendered<'a> {
        Rendered {
            question: q,
            result,
            corpus: &self.corpus,
            params: &self.config.params,
            top: opts.top,
            explain: opts.explain,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { io.stderr } else { io.stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Index { out } => cmd_index(&cli.opts, out, io),
        Command::Ask { file, inline } => cmd_ask(&cli.opts, file.as_deref(), inline.as_deref(), io),
        Command::Eval { questions, gold } => cmd_eval(&cli.opts, questions, gold, io),
        Command::Repl => cmd_repl(&cli.opts, io),
    };
    match outcome {
        Ok(()) => 0,
        Err(msg) => {
            let _ = writeln!(io.stderr, "error: {msg}");
            1
        }
    }
}

fn out(io: &mut Io<'_>, text: &str) -> Res<()> {
    io.stdout.write_all(text.as_bytes()).map_err(|e| format!("writing output: {e}"))
}

fn cmd_index(opts: &Options, path: &Path, io: &mut Io<'_>) -> Res<()> {
    let corpus = load_corpus(&opts.corpus)?;
    let index = IdfIndex::build(&corpus).map_err(|e| e.to_string())?;
    std::fs::write(path, index.to_text()).map_err(|e| format!("{}: {e}", path.display()))?;
    out(io, &format!("sentences={} vocabulary={}\n", index.num_sentences(), index.vocabulary_size()))
}

fn read_questions(file: Option<&Path>, io: &mut Io<'_>) -> Res<Corpus> {
    let (name, text) = match file {
        Some(p) if p != Path::new("-") => (p.display().to_string(), read(p)?),
        _ => {
            let mut text = String::new();
            io.stdin.read_to_string(&mut text).map_err(|e| format!("stdin: {e}"))?;
            ("stdin".to_string(), text)
        }
    };
    parse_corpus(&text).map_err(|e| format!("{name}: {e}"))
}

fn ask_all(session: &Session, opts: &Options, questions: &[Sentence], io: &mut Io<'_>) -> Res<()> {
    let results = parallel::map(session.config.execution, questions, |q| session.ask(q));
    if opts.format == Format::Tsv {
        out(io, &format!("{TSV_HEADER}\n"))?;
    }
    let batch = questions.len() > 1;
    let mut stream = String::new();
    for (q, r) in questions.iter().zip(results) {
        let r = r?;
        if batch && opts.format == Format::Plain {
            out(io, &format!("## {}\n", q.id))?;
        }
        out(io, &session.render(opts, q, r.as_ref()))?;
        stream.push_str(&session.rendered(opts, q, r.as_ref()).explain_record());
    }
    if let Some(path) = &opts.explain_out {
        std::fs::write(path, stream).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

fn cmd_ask(opts: &Options, file: Option<&Path>, inline_text: Option<&str>, io: &mut Io<'_>) -> Res<()> {
    let session = Session::load(opts)?;
    let questions: Vec<Sentence> = match inline_text {
        Some(text) => vec![inline::parse_line("q", text)?],
        None => read_questions(file, io)?.sentences().to_vec(),
    };
    if questions.is_empty() {
        return Err("no questions given".into());
    }
    ask_all(&session, opts, &questions, io)
}

fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

fn parse_gold(text: &str) -> Res<BTreeMap<String, String>> {
    let mut gold = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, ans) = line.split_once('\t').ok_or_else(|| format!("gold line {}: expected id<TAB>answer", n + 1))?;
        let (id, ans) = (id.trim(), ans.trim());
        if id.is_empty() || ans.is_empty() {
            return Err(format!("gold line {}: empty id or answer", n + 1));
        }
        if gold.insert(id.to_string(), ans.to_string()).is_some() {
            return Err(format!("gold line {}: duplicate question id `{id}`", n + 1));
        }
    }
    Ok(gold)
}

fn produced(result: Option<&AnswerResult>) -> Option<String> {
    let r = result?;
    match (r.kind, r.yesno) {
        (QuestionKind::YesNo, Some(d)) => Some(serde_json::to_value(d.verdict).ok()?.as_str()?.to_string()),
        _ => r.top_answer().and_then(|a| a.answer.clone()),
    }
}

fn cmd_eval(opts: &Options, questions: &Path, gold: &Path, io: &mut Io<'_>) -> Res<()> {
    let gold_map = parse_gold(&read(gold)?).map_err(|e| format!("{}: {e}", gold.display()))?;
    let qs = parse_corpus(&read(questions)?).map_err(|e| format!("{}: {e}", questions.display()))?;
    for id in gold_map.keys() {
        if qs.position_of(id).is_none() {
            return Err(format!("{}: unknown question id `{id}`", gold.display()));
        }
    }
    for q in qs.sentences() {
        if !gold_map.contains_key(&q.id) {
            return Err(format!("{}: no gold answer for question `{}`", gold.display(), q.id));
        }
    }
    if qs.is_empty() {
        return out(io, "accuracy=0/0 (no questions)\n");
    }
    let session = Session::load(opts)?;
    let results = parallel::map(session.config.execution, qs.sentences(), |q| session.ask(q));
    let mut correct = 0;
    for (q, r) in qs.sentences().iter().zip(results) {
        let got = produced(r?.as_ref());
        let expected = &gold_map[&q.id];
        let ok = got.as_deref().map(normalize) == Some(normalize(expected));
        correct += usize::from(ok);
        let verdict = if ok { "correct" } else { "incorrect" };
        let got = got.as_deref().unwrap_or("-");
        match opts.format {
            Format::Plain => out(io, &format!("{}: {verdict} (got {got}, gold {expected})\n", q.id))?,
            Format::Tsv => out(io, &format!("{}\t{verdict}\t{got}\t{expected}\n", q.id))?,
            Format::Json => out(
                io,
                &(serde_json::json!({ "question": q.id, "correct": ok, "got": got, "gold": expected }).to_string() + "\n"),
            )?,
        }
    }
    let total = qs.len();
    out(io, &format!("accuracy={correct}/{total} ({:.2})\n", correct as f64 / total as f64))
}

fn cmd_repl(opts: &Options, io: &mut Io<'_>) -> Res<()> {
    let mut session = Session::load(opts)?;
    let mut n = 0;
    let mut line = String::new();
    loop {
        line.clear();
        let read = io.stdin.read_line(&mut line).map_err(|e| format!("stdin: {e}"))?;
        if read == 0 {
            return Ok(());
        }
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        if text == ":quit" || text == ":q" {
            return Ok(());
        }
        if let Some(setting) = text.strip_prefix(":set") {
            let result = match setting.trim().split_once('=') {
                Some((k, v)) => session.config.set(k, v).map_err(|e| e.to_string()),
                None => Err("usage: :set key=value".to_string()),
            };
            match result {
                Ok(()) => out(io, &format!("ok {}\n", setting.trim()))?,
                Err(e) => {
                    let _ = writeln!(io.stderr, "error: {e}");
                }
            }
            continue;
        }
        n += 1;
        let reply = inline::parse_line(&format!("repl-{n}"), text).and_then(|q| {
            let r = session.ask(&q)?;
            Ok(session.render(opts, &q, r.as_ref()))
        });
        match reply {
            Ok(text) => out(io, &text)?,
            Err(e) => {
                let _ = writeln!(io.stderr, "error: {e}");
            }
        }
    }
}
