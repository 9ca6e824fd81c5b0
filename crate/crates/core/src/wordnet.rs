//! Synset store loaded from Princeton WNDB files or from the line-oriented
//! fixture format.
//!
//! Fixture format:
//!
//! ```text
//! # comment
//! entity.n            declares a noun synset with lemma "entity"
//! animal.n
//! animal.n            second noun sense of "animal" (animal.n.02)
//! animal.n -> entity.n
//! animal.n.02 -> animal.n.01
//! ```
//!
//! A reference is `<lemma>.<n|v>` (sense 01) or `<lemma>.<n|v>.<NN>`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph;

/// Synset counts of the WordNet 3.0 release.
pub const WN30_NOUN_SYNSETS: usize = 82_115;
pub const WN30_VERB_SYNSETS: usize = 13_767;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PartOfSpeech {
    Noun,
    Verb,
}

impl PartOfSpeech {
    pub const ALL: [PartOfSpeech; 2] = [PartOfSpeech::Noun, PartOfSpeech::Verb];

    pub fn tag(self) -> char {
        match self {
            PartOfSpeech::Noun => 'n',
            PartOfSpeech::Verb => 'v',
        }
    }

    /// Accepts `n`/`v` (WNDB and canonical names) and `noun`/`verb`.
    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "n" | "N" | "noun" => Some(PartOfSpeech::Noun),
            "v" | "V" | "verb" => Some(PartOfSpeech::Verb),
            _ => None,
        }
    }

    pub fn file_suffix(self) -> &'static str {
        match self {
            PartOfSpeech::Noun => "noun",
            PartOfSpeech::Verb => "verb",
        }
    }
}

impl fmt::Display for PartOfSpeech {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.file_suffix())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SynsetId {
    pub pos: PartOfSpeech,
    pub offset: u32,
}

impl SynsetId {
    pub fn new(pos: PartOfSpeech, offset: u32) -> Self {
        SynsetId { pos, offset }
    }
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08}-{}", self.offset, self.pos.tag())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synset {
    pub id: SynsetId,
    pub lemmas: Vec<String>,
    pub gloss: String,
    pub direct_hypernyms: Vec<SynsetId>,
    pub instance_hypernyms: Vec<SynsetId>,
}

impl Synset {
    /// First lemma, lowercased, spaces as underscores.
    pub fn head_word(&self) -> String {
        normalize_word(&self.lemmas[0])
    }
}

/// Lookup key form of a word: lowercase with underscores for spaces.
pub fn normalize_word(word: &str) -> String {
    word.trim().to_lowercase().replace(' ', "_")
}

#[derive(Debug, Clone, Default)]
pub struct Database {
    synsets: BTreeMap<SynsetId, Synset>,
    lemma_index: HashMap<(String, PartOfSpeech), Vec<SynsetId>>,
    names: HashMap<SynsetId, String>,
    name_index: HashMap<String, SynsetId>,
}

impl Database {
    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    pub fn count(&self, pos: PartOfSpeech) -> usize {
        self.synsets_of(pos).count()
    }

    pub fn lemma_count(&self, pos: PartOfSpeech) -> usize {
        self.lemma_index.keys().filter(|(_, p)| *p == pos).count()
    }

    pub fn get(&self, id: SynsetId) -> Result<&Synset> {
        self.synsets
            .get(&id)
            .ok_or_else(|| Error::UnknownSynset(id.to_string()))
    }

    pub fn contains(&self, id: SynsetId) -> bool {
        self.synsets.contains_key(&id)
    }

    pub fn synsets(&self) -> impl Iterator<Item = &Synset> {
        self.synsets.values()
    }

    /// Synsets of one part of speech in ascending offset order.
    pub fn synsets_of(&self, pos: PartOfSpeech) -> impl Iterator<Item = &Synset> {
        self.synsets.values().filter(move |s| s.id.pos == pos)
    }

    /// All synsets containing `word`, in index sense order.
    pub fn lookup_word(&self, word: &str, pos: PartOfSpeech) -> &[SynsetId] {
        self.lemma_index
            .get(&(normalize_word(word), pos))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn lemma_entries(&self) -> impl Iterator<Item = (&str, PartOfSpeech, &[SynsetId])> {
        self.lemma_index
            .iter()
            .map(|((w, p), ids)| (w.as_str(), *p, ids.as_slice()))
    }

    /// `<head_word>.<n|v>.<NN>`.
    pub fn canonical_name(&self, id: SynsetId) -> Result<&str> {
        self.names
            .get(&id)
            .map(String::as_str)
            .ok_or_else(|| Error::UnknownSynset(id.to_string()))
    }

    pub fn resolve_name(&self, name: &str) -> Result<SynsetId> {
        self.name_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownSynset(name.to_string()))
    }

    /// Combines two databases covering different parts of speech.
    pub fn merge(mut self, other: Database) -> Result<Database> {
        for (id, synset) in other.synsets {
            if self.synsets.insert(id, synset).is_some() {
                return Err(Error::Inconsistent(format!("synset {id} loaded twice")));
            }
        }
        for (key, ids) in other.lemma_index {
            self.lemma_index.entry(key).or_default().extend(ids);
        }
        self.assign_names()?;
        Ok(self)
    }

    fn assign_names(&mut self) -> Result<()> {
        self.names.clear();
        self.name_index.clear();
        for synset in self.synsets.values() {
            let head = synset.head_word();
            let senses = self.lemma_index.get(&(head.clone(), synset.id.pos));
            let position = senses
                .and_then(|ids| ids.iter().position(|&i| i == synset.id))
                .ok_or_else(|| {
                    Error::Inconsistent(format!(
                        "synset {} is not indexed under its head word {head:?}",
                        synset.id
                    ))
                })?;
            let name = format!("{head}.{}.{:02}", synset.id.pos.tag(), position + 1);
            if let Some(prev) = self.name_index.insert(name.clone(), synset.id) {
                return Err(Error::NameCollision(format!("{name} ({prev} and {})", synset.id)));
            }
            self.names.insert(synset.id, name);
        }
        Ok(())
    }

    fn check_lemma_index(&self) -> Result<()> {
        for ((word, pos), ids) in &self.lemma_index {
            for id in ids {
                let synset = self.synsets.get(id).ok_or_else(|| {
                    Error::DanglingPointer(format!("offset {:08} from index entry {word:?} ({pos})", id.offset))
                })?;
                if !synset.lemmas.iter().any(|l| normalize_word(l) == *word) {
                    return Err(Error::Inconsistent(format!(
                        "index entry {word:?} lists {id}, which does not contain that lemma"
                    )));
                }
            }
        }
        for synset in self.synsets.values() {
            for lemma in &synset.lemmas {
                let key = (normalize_word(lemma), synset.id.pos);
                if !self.lemma_index.get(&key).is_some_and(|ids| ids.contains(&synset.id)) {
                    return Err(Error::Inconsistent(format!(
                        "lemma {lemma:?} of {} missing from the index",
                        synset.id
                    )));
                }
            }
        }
        Ok(())
    }

    /// Writes the database in fixture form. Only single-lemma synsets
    /// without instance hypernyms are representable.
    pub fn to_fixture(&self) -> Result<String> {
        let mut out = String::new();
        for synset in self.synsets.values() {
            if synset.lemmas.len() != 1 {
                return Err(Error::Unrepresentable(format!(
                    "{} has {} lemmas",
                    synset.id,
                    synset.lemmas.len()
                )));
            }
            if !synset.instance_hypernyms.is_empty() {
                return Err(Error::Unrepresentable(format!("{} has instance hypernyms", synset.id)));
            }
            out.push_str(&format!("{}.{}\n", synset.head_word(), synset.id.pos.tag()));
        }
        for synset in self.synsets.values() {
            let child = self.canonical_name(synset.id)?;
            for &parent in &synset.direct_hypernyms {
                out.push_str(&format!("{child} -> {}\n", self.canonical_name(parent)?));
            }
        }
        Ok(out)
    }
}

/// Loads `data.{noun,verb}` and `index.{noun,verb}` from a WNDB `dict`
/// directory. Synset counts other than WordNet 3.0's are logged, not fatal.
pub fn load_wndb_dir(dir: impl AsRef<Path>) -> Result<Database> {
    let dir = dir.as_ref();
    let mut db = Database::default();
    for pos in PartOfSpeech::ALL {
        let data = open(dir, &format!("data.{}", pos.file_suffix()))?;
        let index = open(dir, &format!("index.{}", pos.file_suffix()))?;
        let part = parse_wndb(data, index, pos)?;
        let expected = match pos {
            PartOfSpeech::Noun => WN30_NOUN_SYNSETS,
            PartOfSpeech::Verb => WN30_VERB_SYNSETS,
        };
        if part.len() != expected {
            log::warn!(
                "{pos}: {} synsets loaded, WordNet 3.0 has {expected}; other versions are not validated",
                part.len()
            );
        }
        db = db.merge(part)?;
    }
    Ok(db)
}

fn open(dir: &Path, file: &str) -> Result<BufReader<File>> {
    let path = dir.join(file);
    let f =
        File::open(&path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    Ok(BufReader::new(f))
}

/// Parses one part of speech from WNDB `data.*` and `index.*` streams.
pub fn parse_wndb(data: impl BufRead, index: impl BufRead, pos: PartOfSpeech) -> Result<Database> {
    let mut db = Database::default();

    for (n, line) in data.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        if line.starts_with("  ") || line.trim().is_empty() {
            continue;
        }
        let synset = parse_data_line(&line, lineno, pos)?;
        if db.synsets.insert(synset.id, synset).is_some() {
            return Err(Error::malformed(lineno, "duplicate synset offset"));
        }
    }

    for synset in db.synsets.values() {
        for target in synset.direct_hypernyms.iter().chain(&synset.instance_hypernyms) {
            if !db.synsets.contains_key(target) {
                return Err(Error::DanglingPointer(format!(
                    "offset {:08} ({pos}) from {}",
                    target.offset, synset.id
                )));
            }
        }
    }

    for (n, line) in index.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        if line.starts_with("  ") || line.trim().is_empty() {
            continue;
        }
        let (lemma, ids) = parse_index_line(&line, lineno, pos)?;
        if db.lemma_index.insert((lemma, pos), ids).is_some() {
            return Err(Error::malformed(lineno, "duplicate index entry"));
        }
    }

    db.check_lemma_index()?;
    db.assign_names()?;
    Ok(db)
}

struct Fields<'a> {
    inner: std::str::SplitAsciiWhitespace<'a>,
    line: usize,
}

impl<'a> Fields<'a> {
    fn next(&mut self, what: &str) -> Result<&'a str> {
        self.inner
            .next()
            .ok_or_else(|| Error::malformed(self.line, format!("missing {what}")))
    }

    fn number(&mut self, what: &str, radix: u32) -> Result<u32> {
        let field = self.next(what)?;
        u32::from_str_radix(field, radix).map_err(|_| Error::malformed(self.line, format!("bad {what} {field:?}")))
    }
}

fn parse_data_line(line: &str, lineno: usize, pos: PartOfSpeech) -> Result<Synset> {
    let (body, gloss) = line
        .split_once('|')
        .ok_or_else(|| Error::malformed(lineno, "missing gloss separator"))?;
    let mut f = Fields {
        inner: body.split_ascii_whitespace(),
        line: lineno,
    };

    let offset = f.number("synset offset", 10)?;
    f.number("lex_filenum", 10)?;
    let ss_type = f.next("ss_type")?;
    if PartOfSpeech::from_tag(ss_type) != Some(pos) || ss_type.len() != 1 {
        return Err(Error::malformed(lineno, format!("ss_type {ss_type:?} in {pos} file")));
    }
    let id = SynsetId::new(pos, offset);

    let w_cnt = f.number("w_cnt", 16)?;
    if w_cnt == 0 {
        return Err(Error::malformed(lineno, "synset without lemmas"));
    }
    let mut lemmas = Vec::with_capacity(w_cnt as usize);
    for _ in 0..w_cnt {
        lemmas.push(f.next("word")?.to_string());
        f.number("lex_id", 16)?;
    }

    let p_cnt = f.number("p_cnt", 10)?;
    let mut direct_hypernyms = Vec::new();
    let mut instance_hypernyms = Vec::new();
    for _ in 0..p_cnt {
        let symbol = f.next("pointer symbol")?;
        let target = f.number("pointer offset", 10)?;
        let target_pos = f.next("pointer pos")?;
        f.number("source/target", 16)?;
        let list = match symbol {
            "@" => &mut direct_hypernyms,
            "@i" => &mut instance_hypernyms,
            _ => continue,
        };
        if PartOfSpeech::from_tag(target_pos) != Some(pos) {
            return Err(Error::malformed(
                lineno,
                format!("hypernym pointer to pos {target_pos:?}"),
            ));
        }
        if target == offset {
            return Err(Error::malformed(lineno, "synset lists itself as a hypernym"));
        }
        let target = SynsetId::new(pos, target);
        if !list.contains(&target) {
            list.push(target);
        }
    }

    if pos == PartOfSpeech::Verb {
        let f_cnt = f.number("f_cnt", 10)?;
        for _ in 0..f_cnt {
            if f.next("frame marker")? != "+" {
                return Err(Error::malformed(lineno, "expected '+' before verb frame"));
            }
            f.number("f_num", 10)?;
            f.number("w_num", 16)?;
        }
    }
    if let Some(extra) = f.inner.next() {
        return Err(Error::malformed(lineno, format!("unexpected field {extra:?}")));
    }

    Ok(Synset {
        id,
        lemmas,
        gloss: gloss.trim().to_string(),
        direct_hypernyms,
        instance_hypernyms,
    })
}

fn parse_index_line(line: &str, lineno: usize, pos: PartOfSpeech) -> Result<(String, Vec<SynsetId>)> {
    let mut f = Fields {
        inner: line.split_ascii_whitespace(),
        line: lineno,
    };
    let lemma = f.next("lemma")?.to_lowercase();
    let tag = f.next("pos")?;
    if PartOfSpeech::from_tag(tag) != Some(pos) || tag.len() != 1 {
        return Err(Error::malformed(lineno, format!("pos {tag:?} in {pos} index")));
    }
    let synset_cnt = f.number("synset_cnt", 10)?;
    let p_cnt = f.number("p_cnt", 10)?;
    for _ in 0..p_cnt {
        f.next("pointer symbol")?;
    }
    f.number("sense_cnt", 10)?;
    f.number("tagsense_cnt", 10)?;
    let mut ids = Vec::with_capacity(synset_cnt as usize);
    for _ in 0..synset_cnt {
        ids.push(SynsetId::new(pos, f.number("synset offset", 10)?));
    }
    if let Some(extra) = f.inner.next() {
        return Err(Error::malformed(lineno, format!("unexpected field {extra:?}")));
    }
    Ok((lemma, ids))
}

/// Parses the fixture format described in the module docs.
pub fn parse_edge_list(text: &str) -> Result<Database> {
    let mut db = Database::default();
    let mut next_offset: HashMap<PartOfSpeech, u32> = HashMap::new();
    let mut edges: Vec<(usize, String, String)> = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let lineno = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some((child, parent)) = line.split_once("->") {
            let (child, parent) = (child.trim(), parent.trim());
            if child.is_empty() || parent.is_empty() || parent.contains("->") {
                return Err(Error::malformed(lineno, "edge must be `<child> -> <parent>`"));
            }
            edges.push((lineno, child.to_string(), parent.to_string()));
            continue;
        }
        let (word, tag) = line
            .rsplit_once('.')
            .ok_or_else(|| Error::malformed(lineno, "declaration must be `<name>.<n|v>`"))?;
        let pos = PartOfSpeech::from_tag(tag)
            .filter(|_| tag.len() == 1)
            .ok_or_else(|| Error::malformed(lineno, format!("unsupported pos tag {tag:?}")))?;
        if word.is_empty() || word.contains(char::is_whitespace) {
            return Err(Error::malformed(lineno, format!("bad synset name {word:?}")));
        }
        let word = normalize_word(word);
        let slot = next_offset.entry(pos).or_insert(0);
        let id = SynsetId::new(pos, *slot);
        *slot += 1;
        db.lemma_index.entry((word.clone(), pos)).or_default().push(id);
        db.synsets.insert(
            id,
            Synset {
                id,
                lemmas: vec![word],
                gloss: String::new(),
                direct_hypernyms: Vec::new(),
                instance_hypernyms: Vec::new(),
            },
        );
    }

    for (lineno, child, parent) in edges {
        let child_id = resolve_fixture_ref(&db, &child)?;
        let parent_id = resolve_fixture_ref(&db, &parent)?;
        if child_id.pos != parent_id.pos {
            return Err(Error::malformed(lineno, "hypernym edge crosses parts of speech"));
        }
        let synset = db.synsets.get_mut(&child_id).expect("resolved id");
        if !synset.direct_hypernyms.contains(&parent_id) {
            synset.direct_hypernyms.push(parent_id);
        }
    }

    db.assign_names()?;
    for pos in PartOfSpeech::ALL {
        let ids: Vec<SynsetId> = db.synsets_of(pos).map(|s| s.id).collect();
        let dense: HashMap<SynsetId, u32> = ids.iter().enumerate().map(|(i, &id)| (id, i as u32)).collect();
        let parents: Vec<Vec<u32>> = ids
            .iter()
            .map(|id| db.synsets[id].direct_hypernyms.iter().map(|p| dense[p]).collect())
            .collect();
        if let Some(cycle) = graph::find_cycle(&parents) {
            let witness = cycle.iter().map(|&i| db.names[&ids[i as usize]].clone()).collect();
            return Err(Error::CycleDetected { witness });
        }
    }
    Ok(db)
}

fn resolve_fixture_ref(db: &Database, reference: &str) -> Result<SynsetId> {
    let dangling = || Error::DanglingPointer(format!("undeclared synset {reference:?}"));
    let (stem, last) = reference.rsplit_once('.').ok_or_else(dangling)?;
    let (word, tag, sense) = if last.len() == 2 && last.bytes().all(|b| b.is_ascii_digit()) {
        let (word, tag) = stem.rsplit_once('.').ok_or_else(dangling)?;
        (word, tag, last.parse::<usize>().map_err(|_| dangling())?)
    } else {
        (stem, last, 1)
    };
    let pos = PartOfSpeech::from_tag(tag).ok_or_else(dangling)?;
    db.lookup_word(word, pos)
        .get(sense.checked_sub(1).ok_or_else(dangling)?)
        .copied()
        .ok_or_else(dangling)
}
