//! Group presentations, canonical normal forms and word metrics.
//!
//! Elements are identified by a canonical word over the base generators.
//! Each family of presentations supplies its own word-problem strategy:
//! free reduction, alternating free-product syllables, table lookup, or
//! Dehn reduction followed by a shortlex search over half-relator swaps.

mod cayley;
mod dehn;
mod finite;
mod metric;
mod presentation;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

pub(crate) use cayley::LayerWalker;
pub use cayley::{sphere, sphere_sizes, Ball, ElementSet};
pub use dehn::DehnSystem;
pub use finite::{FiniteTable, FreeProduct};
pub use metric::{
    busemann_finite, estimate_delta, gromov_product, word_length, HalfInteger,
    HyperbolicityEstimate, TubeMetric, WordMetric, DEFAULT_CAP, DEFAULT_METRIC_RADIUS,
};
pub use presentation::parse_presentation;

use crate::error::{Error, Result};

/// Index of a letter within a generating set.
pub type Letter = u8;
/// A word over some generating set.
pub type Word = Vec<Letter>;

/// Default element budget for breadth-first searches.
pub const DEFAULT_BUDGET: usize = 40_000_000;

/// Compares two words in shortlex order: length first, then letter by letter.
pub fn shortlex_cmp(a: &[Letter], b: &[Letter]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// A finite symmetric generating set.
///
/// The base set of a presentation has `base_words[i] == [i]`. Foreign sets
/// carry the canonical base word of each of their letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingSet {
    name: String,
    letters: Vec<String>,
    inverse: Vec<Letter>,
    base_words: Vec<Word>,
    is_base: bool,
}

impl GeneratingSet {
    pub(crate) fn base(letters: Vec<String>, inverse: Vec<Letter>) -> Self {
        let base_words = (0..letters.len()).map(|i| vec![i as Letter]).collect();
        GeneratingSet {
            name: "S".to_string(),
            letters,
            inverse,
            base_words,
            is_base: true,
        }
    }

    /// Reassembles a set from its stored parts; used when reading serialized
    /// automata.
    pub(crate) fn from_parts(
        name: String,
        letters: Vec<String>,
        inverse: Vec<Letter>,
        base_words: Vec<Word>,
        is_base: bool,
    ) -> Self {
        GeneratingSet {
            name,
            letters,
            inverse,
            base_words,
            is_base,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_base(&self) -> bool {
        self.is_base
    }

    pub fn letter_name(&self, letter: Letter) -> &str {
        &self.letters[letter as usize]
    }

    pub fn letter_names(&self) -> &[String] {
        &self.letters
    }

    pub fn letter_index(&self, name: &str) -> Result<Letter> {
        self.letters
            .iter()
            .position(|l| l == name)
            .map(|i| i as Letter)
            .ok_or_else(|| Error::UnknownLetter(name.to_string()))
    }

    pub fn inverse(&self, letter: Letter) -> Letter {
        self.inverse[letter as usize]
    }

    pub fn inverse_word(&self, word: &[Letter]) -> Word {
        word.iter().rev().map(|&l| self.inverse(l)).collect()
    }

    /// Canonical base word of a letter.
    pub fn base_word(&self, letter: Letter) -> &[Letter] {
        &self.base_words[letter as usize]
    }

    /// Concatenation of the base words of `word`'s letters (not normalized).
    pub fn to_base(&self, word: &[Letter]) -> Word {
        word.iter()
            .flat_map(|&l| self.base_words[l as usize].iter().copied())
            .collect()
    }

    pub fn format_word(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "e".to_string();
        }
        word.iter()
            .map(|&l| self.letter_name(l))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses whitespace-separated letter names, each optionally raised to an
    /// integer power (`a^-2`). `e` and `1` denote the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut out = Word::new();
        for token in text.split_whitespace() {
            if token == "e" || token == "1" {
                continue;
            }
            let (name, power) = match token.split_once('^') {
                Some((name, exp)) => {
                    let p: i64 = exp
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in {token:?}")))?;
                    (name, p)
                }
                None => (token, 1),
            };
            let letter = self.letter_index(name)?;
            let letter = if power < 0 {
                self.inverse(letter)
            } else {
                letter
            };
            for _ in 0..power.unsigned_abs() {
                out.push(letter);
            }
        }
        Ok(out)
    }

    /// Checks every letter index is in range.
    pub fn check_word(&self, word: &[Letter]) -> Result<()> {
        match word.iter().find(|&&l| l as usize >= self.len()) {
            Some(l) => Err(Error::UnknownLetter(format!("#{l}"))),
            None => Ok(()),
        }
    }
}

/// A group element in canonical normal form over the base generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    word: Word,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement { word: Word::new() }
    }

    pub(crate) fn from_normal_form(word: Word) -> Self {
        GroupElement { word }
    }

    pub fn normal_form(&self) -> &[Letter] {
        &self.word
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }
}

/// The family-specific part of a presentation.
#[derive(Debug, Clone)]
pub enum Family {
    Free { rank: usize },
    FiniteTable(FiniteTable),
    FreeProduct(FreeProduct),
    Dehn(DehnSystem),
}

impl Family {
    pub fn kind(&self) -> &'static str {
        match self {
            Family::Free { .. } => "free",
            Family::FiniteTable(_) => "finite_table",
            Family::FreeProduct(_) => "free_product",
            Family::Dehn(_) => "dehn",
        }
    }
}

/// A group presentation with a decidable word problem, plus any named
/// foreign generating sets declared alongside it.
#[derive(Debug, Clone)]
pub struct Group {
    family: Family,
    base: GeneratingSet,
    gensets: BTreeMap<String, GeneratingSet>,
}

impl Group {
    /// Assembles a group and checks its base generators (no identity letters,
    /// no duplicates).
    pub fn new(family: Family, base: GeneratingSet) -> Result<Self> {
        let group = Group {
            family,
            base,
            gensets: BTreeMap::new(),
        };
        let words: Vec<Word> = (0..group.base.len()).map(|i| vec![i as Letter]).collect();
        group.check_distinct(&words, "S")?;
        Ok(group)
    }

    /// The free group on letters `names`, each paired with an uppercase inverse
    /// (`a`/`A`).
    pub fn free(names: &[&str]) -> Result<Self> {
        let mut letters = Vec::new();
        let mut inverse = Vec::new();
        for (i, n) in names.iter().enumerate() {
            letters.push(n.to_string());
            letters.push(n.to_uppercase());
            inverse.push((2 * i + 1) as Letter);
            inverse.push((2 * i) as Letter);
        }
        Group::new(
            Family::Free { rank: names.len() },
            GeneratingSet::base(letters, inverse),
        )
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn base(&self) -> &GeneratingSet {
        &self.base
    }

    /// Looks up a generating set by name; `S` is the base set.
    pub fn generating_set(&self, name: &str) -> Result<&GeneratingSet> {
        if name == "S" {
            return Ok(&self.base);
        }
        self.gensets
            .get(name)
            .ok_or_else(|| Error::InvalidGenerators(format!("no generating set named {name:?}")))
    }

    pub fn generating_set_names(&self) -> impl Iterator<Item = &str> {
        std::iter::once("S").chain(self.gensets.keys().map(String::as_str))
    }

    /// Registers a named foreign generating set built by [`Group::symmetric_set`].
    pub fn add_generating_set(&mut self, name: &str, words: &[Word]) -> Result<()> {
        let set = self.symmetric_set(name, words)?;
        self.gensets.insert(name.to_string(), set);
        Ok(())
    }

    /// Builds the symmetric closure of `words` (given over base letters).
    ///
    /// Each word contributes a letter and its inverse; a word of order two
    /// contributes one self-inverse letter. Identity-valued and duplicate
    /// letters are rejected.
    pub fn symmetric_set(&self, name: &str, words: &[Word]) -> Result<GeneratingSet> {
        let single_char = self.base.letters.iter().all(|l| l.chars().count() == 1);
        let render = |w: &[Letter]| -> String {
            let names: Vec<&str> = w.iter().map(|&l| self.base.letter_name(l)).collect();
            if single_char {
                names.concat()
            } else {
                names.join(".")
            }
        };
        let mut letters = Vec::new();
        let mut inverse = Vec::new();
        let mut base_words = Vec::new();
        for w in words {
            self.base.check_word(w)?;
            let x = self.normalize(w)?;
            if x.is_identity() {
                return Err(Error::InvalidGenerators(format!(
                    "{name}: word {:?} is the identity",
                    self.base.format_word(w)
                )));
            }
            let winv = self.base.inverse_word(w);
            let xinv = self.normalize(&winv)?;
            let i = letters.len() as Letter;
            letters.push(render(w));
            base_words.push(x.word.clone());
            if xinv == x {
                inverse.push(i);
            } else {
                letters.push(render(&winv));
                base_words.push(xinv.word);
                inverse.push(i + 1);
                inverse.push(i);
            }
        }
        self.check_distinct(&base_words, name)?;
        Ok(GeneratingSet {
            name: name.to_string(),
            letters,
            inverse,
            base_words,
            is_base: false,
        })
    }

    fn check_distinct(&self, words: &[Word], name: &str) -> Result<()> {
        let mut seen = BTreeMap::new();
        for (i, w) in words.iter().enumerate() {
            let x = self.normalize(w)?;
            if x.is_identity() {
                return Err(Error::InvalidGenerators(format!(
                    "{name}: letter {i} is the identity"
                )));
            }
            if let Some(j) = seen.insert(x, i) {
                return Err(Error::InvalidGenerators(format!(
                    "{name}: letters {j} and {i} are the same element"
                )));
            }
        }
        Ok(())
    }

    /// Canonical normal form of a word over the base letters.
    pub fn normalize(&self, word: &[Letter]) -> Result<GroupElement> {
        self.base.check_word(word)?;
        let mut out = Word::new();
        self.normalize_into(word, &mut out)?;
        Ok(GroupElement { word: out })
    }

    /// Parses letter names and normalizes.
    pub fn normalize_names(&self, names: &[&str]) -> Result<GroupElement> {
        let word = names
            .iter()
            .map(|n| self.base.letter_index(n))
            .collect::<Result<Word>>()?;
        self.normalize(&word)
    }

    pub fn parse_element(&self, text: &str) -> Result<GroupElement> {
        let w = self.base.parse_word(text)?;
        self.normalize(&w)
    }

    /// Writes the normal form of `left · right` into `out`; `left` should
    /// already be normal for the cheap families to stay linear.
    pub fn multiply_into(&self, left: &[Letter], right: &[Letter], out: &mut Word) -> Result<()> {
        match &self.family {
            Family::Free { .. } => {
                out.clear();
                out.extend_from_slice(left);
                free_reduce_append(out, right, &self.base.inverse);
                Ok(())
            }
            _ => {
                let mut joined = Vec::with_capacity(left.len() + right.len());
                joined.extend_from_slice(left);
                joined.extend_from_slice(right);
                self.normalize_into(&joined, out)
            }
        }
    }

    fn normalize_into(&self, word: &[Letter], out: &mut Word) -> Result<()> {
        match &self.family {
            Family::Free { .. } => {
                out.clear();
                free_reduce_append(out, word, &self.base.inverse);
                Ok(())
            }
            Family::FiniteTable(t) => {
                out.clear();
                out.extend_from_slice(t.normal_word(t.evaluate(word)));
                Ok(())
            }
            Family::FreeProduct(fp) => {
                fp.normalize_into(word, out);
                Ok(())
            }
            Family::Dehn(d) => d.normalize_into(word, out),
        }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::identity()
    }

    pub fn inverse(&self, x: &GroupElement) -> Result<GroupElement> {
        self.normalize(&self.base.inverse_word(&x.word))
    }

    pub fn product(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        let mut out = Word::new();
        self.multiply_into(&x.word, &y.word, &mut out)?;
        Ok(GroupElement { word: out })
    }

    /// Evaluates a word over generating set `gens`.
    pub fn evaluate(&self, gens: &GeneratingSet, word: &[Letter]) -> Result<GroupElement> {
        gens.check_word(word)?;
        self.normalize(&gens.to_base(word))
    }

    /// Word length of `x` with respect to the base generators. Every family's
    /// normal form is a shortest base word, so this is just its length.
    pub fn base_length(&self, x: &GroupElement) -> u32 {
        x.word.len() as u32
    }

    pub fn format(&self, x: &GroupElement) -> String {
        self.base.format_word(&x.word)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.word)
    }
}

/// Appends `word` to the freely reduced word `out`, cancelling as it goes.
pub(crate) fn free_reduce_append(out: &mut Word, word: &[Letter], inverse: &[Letter]) {
    for &l in word {
        match out.last() {
            Some(&last) if inverse[last as usize] == l => {
                out.pop();
            }
            _ => out.push(l),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_group_reduces() {
        let g = Group::free(&["a", "b"]).unwrap();
        let x = g.normalize_names(&["a", "A", "b"]).unwrap();
        assert_eq!(g.format(&x), "b");
        assert!(g.normalize_names(&[]).unwrap().is_identity());
    }

    #[test]
    fn unknown_letter_is_rejected() {
        let g = Group::free(&["a", "b"]).unwrap();
        assert_eq!(
            g.normalize_names(&["a", "c"]),
            Err(Error::UnknownLetter("c".into()))
        );
        assert!(matches!(g.normalize(&[7]), Err(Error::UnknownLetter(_))));
    }

    #[test]
    fn parse_word_powers() {
        let g = Group::free(&["a", "b"]).unwrap();
        let w = g.base().parse_word("a^2 b^-1 e").unwrap();
        assert_eq!(g.base().format_word(&w), "a a B");
    }

    #[test]
    fn symmetric_set_rejects_identity_and_duplicates() {
        let g = Group::free(&["a", "b"]).unwrap();
        let aa = g.base().parse_word("a A").unwrap();
        assert!(matches!(
            g.symmetric_set("T", &[aa]),
            Err(Error::InvalidGenerators(_))
        ));
        let a = g.base().parse_word("a").unwrap();
        let ainv = g.base().parse_word("A").unwrap();
        assert!(matches!(
            g.symmetric_set("T", &[a.clone(), ainv]),
            Err(Error::InvalidGenerators(_))
        ));
        let ab = g.base().parse_word("a b").unwrap();
        let t = g.symmetric_set("T", &[a, ab]).unwrap();
        assert_eq!(t.letter_names(), &["a", "A", "ab", "BA"]);
        for l in 0..t.len() as Letter {
            assert_eq!(t.inverse(t.inverse(l)), l);
        }
    }
}
