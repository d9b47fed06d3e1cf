//! Lexical and semantic similarity resources: synonym table, class taxonomy,
//! type lexicon, numeric unit rules, interrogative map and term weights.
//!
//! Every resource is a small UTF-8 text file so that similarity evidence can
//! be authored by hand. Lines starting with `#` and blank lines are ignored.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Bunsetsu, Pos, BLANK};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct SemanticClass(String);

impl SemanticClass {
    pub const ANY: &'static str = "ANY";

    pub fn new(name: &str) -> Self {
        SemanticClass(name.trim().to_uppercase())
    }

    pub fn any() -> Self {
        SemanticClass(Self::ANY.to_string())
    }

    pub fn is_any(&self) -> bool {
        self.0 == Self::ANY
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SemanticClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// What an interrogative (or blank) bunsetsu expects of its answer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InterrogativeClass {
    pub lemma: String,
    /// Noun governed by the interrogative inside its bunsetsu ("nan nen").
    pub noun: Option<String>,
    pub expected: SemanticClass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitRule {
    pub pos: Pos,
    /// `*` accepts a bare token of `pos` with no unit.
    pub unit: String,
    pub class: SemanticClass,
}

#[derive(Clone, Debug)]
struct TaxNode {
    parent: Option<usize>,
    depth: usize,
}

/// Forest of semantic classes. Roots have depth 1.
#[derive(Clone, Debug, Default)]
pub struct Taxonomy {
    names: HashMap<String, usize>,
    nodes: Vec<TaxNode>,
    members: HashMap<String, Vec<usize>>,
}

impl Taxonomy {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, lemma: &str) -> bool {
        self.members.contains_key(lemma)
    }

    fn lca(&self, mut a: usize, mut b: usize) -> Option<usize> {
        while self.nodes[a].depth > self.nodes[b].depth {
            a = self.nodes[a].parent?;
        }
        while self.nodes[b].depth > self.nodes[a].depth {
            b = self.nodes[b].parent?;
        }
        while a != b {
            a = self.nodes[a].parent?;
            b = self.nodes[b].parent?;
        }
        Some(a)
    }

    /// `2·depth(lca) / (depth(a) + depth(b))`, maximised over memberships.
    pub fn similarity(&self, a: &str, b: &str) -> Option<f64> {
        let (na, nb) = (self.members.get(a)?, self.members.get(b)?);
        let mut best = 0.0f64;
        for &x in na {
            for &y in nb {
                if let Some(l) = self.lca(x, y) {
                    let s = (2 * self.nodes[l].depth) as f64
                        / (self.nodes[x].depth + self.nodes[y].depth) as f64;
                    best = best.max(s);
                }
            }
        }
        Some(best)
    }

    pub fn parse(text: &str) -> Result<Self, ResourceError> {
        let mut tax = Taxonomy::default();
        // (indent, node) for the open path
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            if raw.starts_with('\t') || raw.trim_start_matches(' ').starts_with('\t') {
                return Err(ResourceError::new("taxonomy", line, "indent with spaces, not tabs"));
            }
            let indent = raw.len() - raw.trim_start().len();
            while stack.last().is_some_and(|&(ind, _)| ind >= indent) {
                stack.pop();
            }
            if let Some(lemma) = body.strip_prefix('=') {
                let lemma = lemma.trim();
                let Some(&(_, node)) = stack.last() else {
                    return Err(ResourceError::new("taxonomy", line, "membership line outside any class"));
                };
                if lemma.is_empty() {
                    return Err(ResourceError::new("taxonomy", line, "empty lemma"));
                }
                let entry = tax.members.entry(lemma.to_string()).or_default();
                if !entry.contains(&node) {
                    entry.push(node);
                }
                continue;
            }
            if body.contains(char::is_whitespace) {
                return Err(ResourceError::new("taxonomy", line, "class names cannot contain spaces"));
            }
            let name = SemanticClass::new(body).0;
            if tax.names.contains_key(&name) {
                return Err(ResourceError::new("taxonomy", line, &format!("class `{name}` declared twice")));
            }
            let parent = stack.last().map(|&(_, n)| n);
            let depth = parent.map_or(1, |p| tax.nodes[p].depth + 1);
            let id = tax.nodes.len();
            tax.nodes.push(TaxNode { parent, depth });
            tax.names.insert(name, id);
            stack.push((indent, id));
        }
        Ok(tax)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{resource} line {line}: {msg}")]
pub struct ResourceError {
    pub resource: &'static str,
    pub line: usize,
    pub msg: String,
}

impl ResourceError {
    fn new(resource: &'static str, line: usize, msg: &str) -> Self {
        ResourceError { resource, line, msg: msg.to_string() }
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches(['\r', '\n'])))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

fn tab_fields<'a>(resource: &'static str, line: usize, l: &'a str, n: usize) -> Result<Vec<&'a str>, ResourceError> {
    let f: Vec<&str> = l.split('\t').map(str::trim).collect();
    if f.len() != n || f.iter().any(|x| x.is_empty()) {
        return Err(ResourceError::new(resource, line, &format!("expected {n} tab-separated fields")));
    }
    Ok(f)
}

fn pair_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

#[derive(Clone, Debug)]
pub struct SimilarityModel {
    synonyms: HashMap<(String, String), f64>,
    taxonomy: Taxonomy,
    types: HashMap<String, BTreeSet<SemanticClass>>,
    unit_rules: Vec<UnitRule>,
    interrogatives: HashMap<(String, Option<String>), SemanticClass>,
    weights: HashMap<String, f64>,
}

impl Default for SimilarityModel {
    /// Empty lexical resources with the built-in interrogative map and unit rules.
    fn default() -> Self {
        let mut m = SimilarityModel::empty();
        m.set_interrogatives(DEFAULT_INTERROGATIVES).expect("built-in interrogative map");
        m.set_unit_rules(DEFAULT_UNIT_RULES).expect("built-in unit rules");
        m
    }
}

pub const DEFAULT_INTERROGATIVES: &str = "doko\tLOCATION\ndare\tPERSON\nitsu\tTIME\nnan nen\tTIME_YEAR\nnani\tANY\nnan\tANY\nikura\tNUMBER\nikutsu\tNUMBER\n";
pub const DEFAULT_UNIT_RULES: &str = "NUM\tnen\tTIME_YEAR\n";

impl SimilarityModel {
    /// No resources at all, not even the built-in maps.
    pub fn empty() -> Self {
        SimilarityModel {
            synonyms: HashMap::new(),
            taxonomy: Taxonomy::default(),
            types: HashMap::new(),
            unit_rules: Vec::new(),
            interrogatives: HashMap::new(),
            weights: HashMap::new(),
        }
    }

    /// `lemma<TAB>lemma<TAB>value`, value in [0,1]. A pair given in both
    /// orders must carry the same value.
    pub fn set_synonyms(&mut self, text: &str) -> Result<(), ResourceError> {
        let mut table = HashMap::new();
        for (line, l) in data_lines(text) {
            let f = tab_fields("synonyms", line, l, 3)?;
            let v: f64 = f[2].parse().map_err(|_| ResourceError::new("synonyms", line, "bad value"))?;
            if !(0.0..=1.0).contains(&v) {
                return Err(ResourceError::new("synonyms", line, "similarity must lie in [0,1]"));
            }
            if let Some(old) = table.insert(pair_key(f[0], f[1]), v) {
                if old != v {
                    return Err(ResourceError::new("synonyms", line, "conflicting value for symmetric pair"));
                }
            }
        }
        self.synonyms = table;
        Ok(())
    }

    pub fn insert_synonym(&mut self, a: &str, b: &str, value: f64) {
        assert!((0.0..=1.0).contains(&value), "similarity out of range");
        self.synonyms.insert(pair_key(a, b), value);
    }

    pub fn set_taxonomy(&mut self, text: &str) -> Result<(), ResourceError> {
        self.taxonomy = Taxonomy::parse(text)?;
        Ok(())
    }

    /// `lemma<TAB>CLASS[,CLASS...]`
    pub fn set_types(&mut self, text: &str) -> Result<(), ResourceError> {
        let mut types: HashMap<String, BTreeSet<SemanticClass>> = HashMap::new();
        for (line, l) in data_lines(text) {
            let f = tab_fields("types", line, l, 2)?;
            let classes = f[1].split(',').map(str::trim).filter(|c| !c.is_empty()).map(SemanticClass::new);
            types.entry(f[0].to_string()).or_default().extend(classes);
        }
        self.types = types;
        Ok(())
    }

    /// `POS<TAB>unit-lemma<TAB>CLASS`
    pub fn set_unit_rules(&mut self, text: &str) -> Result<(), ResourceError> {
        let mut rules = Vec::new();
        for (line, l) in data_lines(text) {
            let f = tab_fields("units", line, l, 3)?;
            let pos: Pos = f[0].parse().map_err(|e: String| ResourceError::new("units", line, &e))?;
            rules.push(UnitRule { pos, unit: f[1].to_string(), class: SemanticClass::new(f[2]) });
        }
        self.unit_rules = rules;
        Ok(())
    }

    /// `lemma[ noun]<TAB>CLASS`
    pub fn set_interrogatives(&mut self, text: &str) -> Result<(), ResourceError> {
        let mut map = HashMap::new();
        for (line, l) in data_lines(text) {
            let f = tab_fields("interrogatives", line, l, 2)?;
            let mut words = f[0].split_whitespace();
            let lemma = words.next().expect("non-empty field").to_string();
            let noun = words.next().map(str::to_string);
            if words.next().is_some() {
                return Err(ResourceError::new("interrogatives", line, "trigger is `lemma` or `lemma noun`"));
            }
            if map.insert((lemma, noun), SemanticClass::new(f[1])).is_some() {
                return Err(ResourceError::new("interrogatives", line, "trigger listed twice"));
            }
        }
        self.interrogatives = map;
        Ok(())
    }

    /// `lemma<TAB>weight`; overrides the IDF weight of a lemma in node scoring.
    pub fn set_weights(&mut self, text: &str) -> Result<(), ResourceError> {
        let mut map = HashMap::new();
        for (line, l) in data_lines(text) {
            let f = tab_fields("weights", line, l, 2)?;
            let v: f64 = f[1].parse().map_err(|_| ResourceError::new("weights", line, "bad weight"))?;
            if !v.is_finite() || v < 0.0 {
                return Err(ResourceError::new("weights", line, "weight must be finite and non-negative"));
            }
            map.insert(f[0].to_string(), v);
        }
        self.weights = map;
        Ok(())
    }

    pub fn weight_override(&self, lemma: &str) -> Option<f64> {
        self.weights.get(lemma).copied()
    }

    /// Exact match, then synonym table, then taxonomy, else 0.
    pub fn word_sim(&self, a: &str, b: &str) -> f64 {
        if a == b {
            return 1.0;
        }
        if let Some(&v) = self.synonyms.get(&pair_key(a, b)) {
            return v;
        }
        self.taxonomy.similarity(a, b).unwrap_or(0.0)
    }

    pub fn lemma_types(&self, lemma: &str) -> Option<&BTreeSet<SemanticClass>> {
        self.types.get(lemma)
    }

    pub fn bunsetsu_types(&self, b: &Bunsetsu) -> BTreeSet<SemanticClass> {
        let mut out = BTreeSet::new();
        for lemma in b.content_lemmas() {
            if let Some(t) = self.types.get(lemma) {
                out.extend(t.iter().cloned());
            }
        }
        for rule in &self.unit_rules {
            for (i, t) in b.tokens.iter().enumerate() {
                if t.pos != rule.pos {
                    continue;
                }
                if rule.unit == "*" || b.tokens[i + 1..].iter().any(|u| u.lemma == rule.unit) {
                    out.insert(rule.class.clone());
                    break;
                }
            }
        }
        out
    }

    /// Class demanded by the first interrogative token of `b`; a blank
    /// placeholder acts as an interrogative of class ANY.
    pub fn interrogative_class(&self, b: &Bunsetsu) -> Option<InterrogativeClass> {
        if let Some(i) = b.tokens.iter().position(|t| t.pos == Pos::Interr) {
            let lemma = b.tokens[i].lemma.clone();
            let noun = b.tokens[i + 1..].iter().find(|t| t.pos.is_content()).map(|t| t.lemma.clone());
            let expected = noun
                .as_ref()
                .and_then(|n| self.interrogatives.get(&(lemma.clone(), Some(n.clone()))))
                .or_else(|| self.interrogatives.get(&(lemma.clone(), None)))
                .cloned()
                .unwrap_or_else(SemanticClass::any);
            return Some(InterrogativeClass { lemma, noun, expected });
        }
        if b.has_blank() {
            return Some(InterrogativeClass { lemma: BLANK.to_string(), noun: None, expected: SemanticClass::any() });
        }
        None
    }
}

/// Optional resource files; a missing entry keeps the default for that resource.
#[derive(Clone, Debug, Default)]
pub struct ResourceFiles {
    pub synonyms: Option<PathBuf>,
    pub taxonomy: Option<PathBuf>,
    pub types: Option<PathBuf>,
    pub interrogatives: Option<PathBuf>,
    pub units: Option<PathBuf>,
    pub weights: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Resource { path: PathBuf, source: ResourceError },
}

impl ResourceFiles {
    pub fn load(&self) -> Result<SimilarityModel, LoadError> {
        type Setter = fn(&mut SimilarityModel, &str) -> Result<(), ResourceError>;
        let mut model = SimilarityModel::default();
        let slots: [(&Option<PathBuf>, Setter); 6] = [
            (&self.synonyms, SimilarityModel::set_synonyms),
            (&self.taxonomy, SimilarityModel::set_taxonomy),
            (&self.types, SimilarityModel::set_types),
            (&self.interrogatives, SimilarityModel::set_interrogatives),
            (&self.units, SimilarityModel::set_unit_rules),
            (&self.weights, SimilarityModel::set_weights),
        ];
        for (path, set) in slots {
            let Some(path) = path else { continue };
            let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.clone(), source })?;
            set(&mut model, &text).map_err(|source| LoadError::Resource { path: path.clone(), source })?;
        }
        Ok(model)
    }
}

pub fn type_match(expected: &SemanticClass, candidate: &BTreeSet<SemanticClass>) -> bool {
    expected.is_any() || candidate.contains(expected)
}
