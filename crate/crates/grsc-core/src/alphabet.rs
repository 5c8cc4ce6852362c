use std::collections::HashMap;

use thiserror::Error;

use crate::word::{Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("duplicate letter `{0}`")]
    Duplicate(String),
    #[error("invalid letter token `{0}`")]
    InvalidToken(String),
    #[error("unknown letter `{0}`")]
    Unknown(String),
}

/// The ordered generating set S. Order is fixed at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<String>,
    index: HashMap<String, u32>,
}

fn valid_token(t: &str) -> bool {
    !t.is_empty() && !t.starts_with('-') && !t.contains('#') && !t.chars().any(char::is_whitespace)
}

impl Alphabet {
    pub fn new<I, S>(letters: I) -> Result<Self, AlphabetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out = Alphabet { letters: Vec::new(), index: HashMap::new() };
        for l in letters {
            out.push(l.into())?;
        }
        Ok(out)
    }

    pub fn push(&mut self, name: String) -> Result<u32, AlphabetError> {
        if !valid_token(&name) {
            return Err(AlphabetError::InvalidToken(name));
        }
        if self.index.contains_key(&name) {
            return Err(AlphabetError::Duplicate(name));
        }
        let i = self.letters.len() as u32;
        self.index.insert(name.clone(), i);
        self.letters.push(name);
        Ok(i)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.letters
    }

    pub fn name(&self, index: u32) -> &str {
        &self.letters[index as usize]
    }

    pub fn lookup(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    /// Parses a whitespace separated word; `-x` denotes `x⁻¹`.
    pub fn parse_word(&self, s: &str) -> Result<Word, AlphabetError> {
        s.split_whitespace().map(|t| self.parse_letter(t)).collect()
    }

    pub fn parse_letter(&self, t: &str) -> Result<Letter, AlphabetError> {
        let (name, positive) = match t.strip_prefix('-') {
            Some(rest) => (rest, false),
            None => (t, true),
        };
        self.lookup(name)
            .map(|i| Letter::new(i, positive))
            .ok_or_else(|| AlphabetError::Unknown(name.to_string()))
    }

    pub fn format_letter(&self, l: Letter) -> String {
        if l.is_positive() {
            self.name(l.index()).to_string()
        } else {
            format!("-{}", self.name(l.index()))
        }
    }

    pub fn format_word(&self, w: &Word) -> String {
        w.iter().map(|&l| self.format_letter(l)).collect::<Vec<_>>().join(" ")
    }

    /// The sub-alphabet keeping only the listed indices, in their original order,
    /// together with the old-to-new index map.
    pub fn restrict(&self, keep: &[bool]) -> (Alphabet, Vec<Option<u32>>) {
        let mut out = Alphabet { letters: Vec::new(), index: HashMap::new() };
        let mut map = vec![None; self.len()];
        for (i, name) in self.letters.iter().enumerate() {
            if keep[i] {
                map[i] = Some(out.push(name.clone()).expect("names already unique"));
            }
        }
        (out, map)
    }
}
