//! Phrase tables for multilanguage text.
//!
//! Phrases are keyed by their English text. A table has 24 buckets chosen
//! by the first character of the key (`code point % 24`); colliding keys
//! share a chain in insertion order. Looking up a missing key returns the
//! key itself.

use std::fs;
use std::path::Path;

use thiserror::Error;

pub const BUCKETS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum I18nError {
    #[error("phrase key is empty")]
    EmptyKey,
    #[error("line {0}: expected `key=value`")]
    MalformedLine(usize),
    #[error("cannot read locale file: {0}")]
    Io(String),
    #[error("invalid locale tag {0:?}")]
    BadTag(String),
}

pub fn bucket_index(key: &str) -> Result<usize, I18nError> {
    let c = key.chars().next().ok_or(I18nError::EmptyKey)?;
    Ok(c as usize % BUCKETS)
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    key: String,
    value: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhraseTable {
    locale: String,
    buckets: [Vec<Entry>; BUCKETS],
}

impl PhraseTable {
    pub fn new(locale: impl Into<String>) -> Self {
        Self {
            locale: locale.into(),
            buckets: Default::default(),
        }
    }

    pub fn locale(&self) -> &str {
        &self.locale
    }

    /// Inserts a phrase; an existing key keeps its chain position and takes
    /// the new value.
    pub fn insert(&mut self, key: &str, value: &str) -> Result<(), I18nError> {
        let chain = &mut self.buckets[bucket_index(key)?];
        match chain.iter_mut().find(|e| e.key == key) {
            Some(e) => e.value = value.to_owned(),
            None => chain.push(Entry {
                key: key.to_owned(),
                value: value.to_owned(),
            }),
        }
        Ok(())
    }

    pub fn lookup<'a>(&'a self, key: &'a str) -> &'a str {
        self.lookup_counting(key).0
    }

    /// Lookup plus the number of key comparisons made along the chain.
    pub fn lookup_counting<'a>(&'a self, key: &'a str) -> (&'a str, usize) {
        let Ok(index) = bucket_index(key) else {
            return (key, 0);
        };
        let mut comparisons = 0;
        for entry in &self.buckets[index] {
            comparisons += 1;
            if entry.key == key {
                return (&entry.value, comparisons);
            }
        }
        (key, comparisons)
    }

    pub fn contains(&self, key: &str) -> bool {
        bucket_index(key).is_ok_and(|i| self.buckets[i].iter().any(|e| e.key == key))
    }

    pub fn chain_len(&self, bucket: usize) -> usize {
        self.buckets[bucket].len()
    }

    pub fn chain_keys(&self, bucket: usize) -> impl Iterator<Item = &str> {
        self.buckets[bucket].iter().map(|e| e.key.as_str())
    }

    pub fn len(&self) -> usize {
        self.buckets.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.buckets
            .iter()
            .flatten()
            .map(|e| (e.key.as_str(), e.value.as_str()))
    }
}

/// Parses `key=value` lines. Blank lines are skipped, the split happens at
/// the first `=`, and a trailing `\r` is dropped.
pub fn load_locale(contents: &str, locale: &str) -> Result<PhraseTable, I18nError> {
    let mut table = PhraseTable::new(locale);
    let contents = contents.strip_prefix('\u{feff}').unwrap_or(contents);
    for (i, line) in contents.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or(I18nError::MalformedLine(i + 1))?;
        if key.is_empty() {
            return Err(I18nError::MalformedLine(i + 1));
        }
        table.insert(key, value)?;
    }
    Ok(table)
}

/// Locale files shipped with the crate.
pub fn builtin_locale(locale: &str) -> Option<&'static str> {
    match locale {
        "pt_BR" => Some(include_str!("../locales/pt_BR.conf")),
        "en_US" => Some(include_str!("../locales/en_US.conf")),
        _ => None,
    }
}

/// Loads `<dir>/<locale>.conf` when present, else a built-in table, else
/// an empty table whose lookups all fall back to the key.
///
/// Tags are limited to ASCII letters, digits, `_` and `-` since they name
/// files.
pub fn resolve_locale(dir: Option<&Path>, locale: &str) -> Result<PhraseTable, I18nError> {
    let tag_ok = !locale.is_empty()
        && locale.len() <= 32
        && locale
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-');
    if !tag_ok {
        return Err(I18nError::BadTag(locale.to_owned()));
    }
    if let Some(dir) = dir {
        let path = dir.join(format!("{locale}.conf"));
        if path.is_file() {
            let text = fs::read_to_string(&path)
                .map_err(|e| I18nError::Io(format!("{}: {e}", path.display())))?;
            return load_locale(&text, locale);
        }
    }
    match builtin_locale(locale) {
        Some(text) => load_locale(text, locale),
        None => Ok(PhraseTable::new(locale)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bucket_indices() {
        assert_eq!(bucket_index("Hello"), Ok(0));
        assert_eq!(bucket_index("Play"), Ok(8));
        assert_eq!(bucket_index("play"), Ok(16));
        assert_eq!(bucket_index(""), Err(I18nError::EmptyKey));
        assert_eq!(bucket_index("Ó"), Ok(211 % 24));
    }

    #[test]
    fn rejects_path_like_tags() {
        for tag in ["", "../etc", "pt/BR", "a b"] {
            assert!(
                matches!(resolve_locale(None, tag), Err(I18nError::BadTag(_))),
                "{tag}"
            );
        }
        assert_eq!(resolve_locale(None, "xx-YY").unwrap().len(), 0);
    }

    #[test]
    fn loads_pairs() {
        let t = load_locale("Play=Jogar\nQuit=Sair", "pt_BR").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.lookup("Play"), "Jogar");
        assert_eq!(t.lookup("Quit"), "Sair");
        assert_eq!(t.locale(), "pt_BR");
    }

    #[test]
    fn splits_at_first_equals() {
        let t = load_locale("Score=Pontos=Extra", "pt_BR").unwrap();
        assert_eq!(t.lookup("Score"), "Pontos=Extra");
    }

    #[test]
    fn missing_key_returns_key() {
        let t = load_locale("Play=Jogar", "pt_BR").unwrap();
        assert_eq!(t.lookup("Missing Phrase"), "Missing Phrase");
        assert_eq!(t.lookup(""), "");
        assert_eq!(t.lookup("play"), "play");
    }

    #[test]
    fn chained_collisions() {
        let t = load_locale("Score=Pontos\nStart=Iniciar\nSair=Exit", "pt_BR").unwrap();
        let b = bucket_index("Score").unwrap();
        assert_eq!(
            t.chain_keys(b).collect::<Vec<_>>(),
            ["Score", "Start", "Sair"]
        );
        assert_eq!(t.lookup_counting("Score"), ("Pontos", 1));
        assert_eq!(t.lookup_counting("Start"), ("Iniciar", 2));
        assert_eq!(t.lookup_counting("Sair"), ("Exit", 3));
        assert_eq!(t.lookup_counting("Sx"), ("Sx", 3));
    }

    #[test]
    fn duplicates_keep_last_value() {
        let t = load_locale("Play=A\nPlay=B\n", "x").unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.lookup("Play"), "B");
    }

    #[test]
    fn crlf_blank_lines_and_bom() {
        let t = load_locale("\u{feff}Play=Jogar\r\n\r\nQuit=Sair\r\n", "pt_BR").unwrap();
        assert_eq!(t.lookup("Play"), "Jogar");
        assert_eq!(t.lookup("Quit"), "Sair");
    }

    #[test]
    fn malformed_lines() {
        assert_eq!(
            load_locale("Play=Jogar\nno separator", "x"),
            Err(I18nError::MalformedLine(2))
        );
        assert_eq!(load_locale("=value", "x"), Err(I18nError::MalformedLine(1)));
    }

    #[test]
    fn builtin_locales_load() {
        for tag in ["pt_BR", "en_US"] {
            let t = load_locale(builtin_locale(tag).unwrap(), tag).unwrap();
            assert!(t.len() >= 30, "{tag} has {} phrases", t.len());
        }
        let unknown = resolve_locale(None, "xx_XX").unwrap();
        assert!(unknown.is_empty());
        assert_eq!(unknown.lookup("Rock"), "Rock");
    }
}
