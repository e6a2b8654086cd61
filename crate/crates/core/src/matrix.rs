//! Markov transition matrices and the language of the shift they define.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{HullError, Result};
use crate::letters::{Letter, LetterSet, MAX_LETTERS};
use crate::word::Word;

/// On-disk form: `{"alphabet": ["a","b"], "matrix": [[1,1],[1,0]]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct MatrixFile {
    pub alphabet: Vec<String>,
    pub matrix: Vec<Vec<i64>>,
}

/// A square 0/1 transition matrix over a named alphabet with no zero rows.
///
/// Row `a` is stored as the set of letters allowed to follow `a`. The
/// intersection-closed family of rows is computed once at construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TransitionMatrix {
    alphabet: Vec<String>,
    rows: Vec<LetterSet>,
    family: Vec<LetterSet>,
}

impl TransitionMatrix {
    pub fn new(alphabet: Vec<String>, entries: Vec<Vec<u8>>) -> Result<Self> {
        let n = alphabet.len();
        if n == 0 {
            return Err(HullError::Input("alphabet must be nonempty".into()));
        }
        if n > MAX_LETTERS {
            return Err(HullError::Input(format!(
                "alphabet has {n} letters; at most {MAX_LETTERS} are supported"
            )));
        }
        let distinct: BTreeSet<&str> = alphabet.iter().map(String::as_str).collect();
        if distinct.len() != n {
            return Err(HullError::Input("alphabet letters must be distinct".into()));
        }
        if alphabet.iter().any(|name| name.is_empty() || name.contains(['.', '|', ',', ' ', '[', ']', '*', '^'])) {
            return Err(HullError::Input(
                "letter names must be nonempty and must not contain '.', '|', ',', '[', ']', '*', '^' or spaces".into(),
            ));
        }
        if alphabet.iter().any(|name| name == "-" || name == "0") {
            return Err(HullError::Input("`-` and `0` are reserved and cannot name letters".into()));
        }
        if entries.len() != n || entries.iter().any(|row| row.len() != n) {
            return Err(HullError::Input(format!(
                "matrix must be {n}x{n} to match the alphabet"
            )));
        }
        let mut rows = Vec::with_capacity(n);
        for (i, row) in entries.iter().enumerate() {
            let mut set = LetterSet::EMPTY;
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => set.insert(j as Letter),
                    other => {
                        return Err(HullError::Input(format!(
                            "entry ({}, {}) is {other}; entries must be 0 or 1",
                            alphabet[i], alphabet[j]
                        )))
                    }
                }
            }
            if set.is_empty() {
                return Err(HullError::Input(format!(
                    "row `{}` is all zero; a transition matrix must contain no zero rows",
                    alphabet[i]
                )));
            }
            rows.push(set);
        }
        let family = intersection_closure(&rows);
        Ok(TransitionMatrix {
            alphabet,
            rows,
            family,
        })
    }

    /// Builds a matrix whose letters are named `a`, `b`, `c`, ... (or `x0`,
    /// `x1`, ... past 26 letters).
    pub fn from_rows(entries: Vec<Vec<u8>>) -> Result<Self> {
        let n = entries.len();
        let alphabet = (0..n).map(|i| default_letter_name(i, n)).collect();
        Self::new(alphabet, entries)
    }

    pub fn from_file(file: &MatrixFile) -> Result<Self> {
        let mut entries = Vec::with_capacity(file.matrix.len());
        for row in &file.matrix {
            let mut r = Vec::with_capacity(row.len());
            for &v in row {
                if v != 0 && v != 1 {
                    return Err(HullError::Input(format!(
                        "matrix entry {v} is not 0 or 1"
                    )));
                }
                r.push(v as u8);
            }
            entries.push(r);
        }
        Self::new(file.alphabet.clone(), entries)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MatrixFile = serde_json::from_str(text)
            .map_err(|e| HullError::Input(format!("malformed matrix JSON: {e}")))?;
        Self::from_file(&file)
    }

    pub fn to_file(&self) -> MatrixFile {
        MatrixFile {
            alphabet: self.alphabet.clone(),
            matrix: self
                .entries()
                .into_iter()
                .map(|r| r.into_iter().map(i64::from).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("matrix serializes")
    }

    pub fn size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.size()).map(|i| i as Letter)
    }

    pub fn all_letters(&self) -> LetterSet {
        LetterSet::full(self.size())
    }

    pub fn entry(&self, a: Letter, b: Letter) -> bool {
        self.rows[a as usize].contains(b)
    }

    pub fn entries(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|row| (0..self.size()).map(|j| row.contains(j as Letter) as u8).collect())
            .collect()
    }

    pub fn name(&self, a: Letter) -> &str {
        &self.alphabet[a as usize]
    }

    pub fn letter_index(&self, name: &str) -> Result<Letter> {
        self.alphabet
            .iter()
            .position(|n| n == name)
            .map(|i| i as Letter)
            .ok_or_else(|| HullError::UnknownLetter(name.to_string()))
    }

    /// Letters that may follow `a`; never empty.
    pub fn follows(&self, a: Letter) -> LetterSet {
        self.rows[a as usize]
    }

    pub fn follows_named(&self, name: &str) -> Result<LetterSet> {
        Ok(self.follows(self.letter_index(name)?))
    }

    /// Letters allowed after `w`; every letter for the empty word.
    pub fn follows_word(&self, w: &Word) -> LetterSet {
        match w.last() {
            Some(a) => self.follows(a),
            None => self.all_letters(),
        }
    }

    pub fn is_valid_word(&self, w: &Word) -> bool {
        w.letters().iter().all(|&a| (a as usize) < self.size())
    }

    /// True iff every adjacent pair of `w` is allowed. The empty word is legal.
    pub fn is_legal(&self, w: &Word) -> bool {
        self.is_valid_word(w) && w.letters().windows(2).all(|p| self.entry(p[0], p[1]))
    }

    /// All legal nonempty words of length at most `max_len`, in shortlex order.
    pub fn enumerate_language(&self, max_len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut level: Vec<Word> = self.letters().map(Word::letter).collect();
        for _ in 0..max_len {
            if level.is_empty() {
                break;
            }
            out.extend(level.iter().cloned());
            let mut next = Vec::new();
            for w in &level {
                for b in self.follows_word(w).iter() {
                    next.push(w.pushed(b));
                }
            }
            level = next;
        }
        out
    }

    /// Legal words of length exactly `len`, the empty word included when `len == 0`.
    pub fn words_of_length(&self, len: usize) -> Vec<Word> {
        let mut level = vec![Word::empty()];
        for _ in 0..len {
            let mut next = Vec::new();
            for w in &level {
                for b in self.follows_word(w).iter() {
                    next.push(w.pushed(b));
                }
            }
            level = next;
        }
        level
    }

    /// The empty word followed by every legal word up to `max_len`.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        out.extend(self.enumerate_language(max_len));
        out
    }

    /// Nonempty intersections of rows, sorted by bitmask.
    pub fn constructible_family(&self) -> &[LetterSet] {
        &self.family
    }

    pub fn is_constructible(&self, x: LetterSet) -> bool {
        self.family.binary_search(&x).is_ok()
    }

    /// Applies the simultaneous row/column permutation `perm`, where letter
    /// `i` becomes letter `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.size();
        if perm.len() != n || perm.iter().collect::<BTreeSet<_>>().len() != n || perm.iter().any(|&p| p >= n) {
            return Err(HullError::Input("not a permutation of the alphabet".into()));
        }
        let old = self.entries();
        let mut entries = vec![vec![0u8; n]; n];
        let mut alphabet = vec![String::new(); n];
        for i in 0..n {
            alphabet[perm[i]] = self.alphabet[i].clone();
            for j in 0..n {
                entries[perm[i]][perm[j]] = old[i][j];
            }
        }
        Self::new(alphabet, entries)
    }

    /// Renders a word. Single-character alphabets concatenate letter names;
    /// longer names are joined with `.`.
    pub fn format_word(&self, w: &Word) -> String {
        let sep = if self.single_char_names() { "" } else { "." };
        w.letters()
            .iter()
            .map(|&a| self.name(a))
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Inverse of [`format_word`](Self::format_word); the empty string is the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Word::empty());
        }
        let letters = if self.single_char_names() && !text.contains('.') {
            text.chars()
                .map(|c| self.letter_index(&c.to_string()))
                .collect::<Result<Vec<_>>>()?
        } else {
            text.split('.')
                .map(|part| self.letter_index(part.trim()))
                .collect::<Result<Vec<_>>>()?
        };
        Ok(Word::from_letters(letters))
    }

    pub fn parse_letter_set(&self, names: &[String]) -> Result<LetterSet> {
        names
            .iter()
            .map(|n| self.letter_index(n.trim()))
            .collect::<Result<LetterSet>>()
    }

    pub fn format_letter_set(&self, x: LetterSet) -> String {
        x.iter().map(|a| self.name(a)).collect::<Vec<_>>().join(",")
    }

    fn single_char_names(&self) -> bool {
        self.alphabet.iter().all(|n| n.chars().count() == 1)
    }
}

impl fmt::Debug for TransitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TransitionMatrix{{")?;
        for (i, row) in self.entries().iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let bits: String = row.iter().map(|&v| if v == 1 { '1' } else { '0' }).collect();
            write!(f, "{}:{}", self.alphabet[i], bits)?;
        }
        write!(f, "}}")
    }
}

fn default_letter_name(i: usize, n: usize) -> String {
    if n <= 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("x{i}")
    }
}

fn intersection_closure(rows: &[LetterSet]) -> Vec<LetterSet> {
    let mut family: BTreeSet<LetterSet> = rows.iter().copied().collect();
    let mut frontier: Vec<LetterSet> = family.iter().copied().collect();
    while let Some(x) = frontier.pop() {
        for &row in rows {
            let y = x.intersection(row);
            if !y.is_empty() && family.insert(y) {
                frontier.push(y);
            }
        }
    }
    family.into_iter().collect()
}
