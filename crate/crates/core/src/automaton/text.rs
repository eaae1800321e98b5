//! Line-oriented text form of an automaton.
//!
//! ```text
//! geodesic-automaton 1
//! gens S base
//! letter 0 a 1 0
//! letter 1 A 0 1
//! states 5
//! initial 0
//! level_used 1
//! validated_to 10
//! transition 0 a 1
//! ```
//!
//! A `letter` line holds the index, name, inverse index and the base word
//! of the letter as base-letter indices (`-` for the empty word).
//! Transitions name their letter and are listed by state, then letter.

use std::fmt::Write as _;

use super::GeodesicAutomaton;
use crate::error::{Error, Result};
use crate::group::{GeneratingSet, Letter, Word};

const HEADER: &str = "geodesic-automaton 1";

impl GeodesicAutomaton {
    pub fn to_text(&self) -> String {
        let gens = self.gens();
        let mut out = String::new();
        writeln!(out, "{HEADER}").unwrap();
        let kind = if gens.is_base() { "base" } else { "foreign" };
        writeln!(out, "gens {} {kind}", gens.name()).unwrap();
        for t in 0..gens.len() as Letter {
            let base = gens.base_word(t);
            let base = if base.is_empty() {
                "-".to_string()
            } else {
                base.iter()
                    .map(|l| l.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            writeln!(
                out,
                "letter {t} {} {} {base}",
                gens.letter_name(t),
                gens.inverse(t)
            )
            .unwrap();
        }
        writeln!(out, "states {}", self.num_states()).unwrap();
        writeln!(out, "initial {}", self.initial()).unwrap();
        writeln!(out, "level_used {}", self.level_used()).unwrap();
        writeln!(out, "validated_to {}", self.validated_to()).unwrap();
        for tr in self.transitions() {
            writeln!(
                out,
                "transition {} {} {}",
                tr.from,
                gens.letter_name(tr.letter),
                tr.to
            )
            .unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::Parse(format!("line {}: {msg}", line + 1));
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, l)) if l.trim() == HEADER => {}
            _ => return Err(Error::Parse(format!("expected header {HEADER:?}"))),
        }
        let mut name = None;
        let mut is_base = false;
        let mut letters: Vec<String> = Vec::new();
        let mut inverse: Vec<Letter> = Vec::new();
        let mut base_words: Vec<Word> = Vec::new();
        let mut states = None;
        let mut initial = None;
        let mut level_used = None;
        let mut validated_to = None;
        let mut transitions: Vec<(usize, String, usize)> = Vec::new();
        for (i, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| bad(i, "expected an integer"))
            };
            match fields.as_slice() {
                ["gens", n, kind] => {
                    name = Some(n.to_string());
                    is_base = match *kind {
                        "base" => true,
                        "foreign" => false,
                        _ => return Err(bad(i, "generating set kind must be base or foreign")),
                    };
                }
                ["letter", idx, n, inv, rest @ ..] => {
                    if num(idx)? != letters.len() {
                        return Err(bad(i, "letters out of order"));
                    }
                    letters.push(n.to_string());
                    inverse.push(num(inv)? as Letter);
                    let word = match rest {
                        ["-"] => Word::new(),
                        _ => rest
                            .iter()
                            .map(|s| num(s).map(|v| v as Letter))
                            .collect::<Result<_>>()?,
                    };
                    base_words.push(word);
                }
                ["states", n] => states = Some(num(n)?),
                ["initial", n] => initial = Some(num(n)?),
                ["level_used", n] => level_used = Some(num(n)?),
                ["validated_to", n] => validated_to = Some(num(n)?),
                ["transition", from, letter, to] => {
                    transitions.push((num(from)?, letter.to_string(), num(to)?))
                }
                _ => return Err(bad(i, "unrecognized line")),
            }
        }
        let missing = |what: &str| Error::Parse(format!("missing {what}"));
        let name = name.ok_or_else(|| missing("gens"))?;
        let states = states.ok_or_else(|| missing("states"))?;
        let initial = initial.ok_or_else(|| missing("initial"))?;
        if initial >= states {
            return Err(Error::Parse("initial state out of range".into()));
        }
        if inverse.iter().any(|&l| l as usize >= letters.len()) {
            return Err(Error::Parse("inverse letter out of range".into()));
        }
        let gens = GeneratingSet::from_parts(name, letters, inverse, base_words, is_base);
        let mut table = vec![vec![None; gens.len()]; states];
        for (from, letter, to) in transitions {
            if from >= states || to >= states {
                return Err(Error::Parse("transition state out of range".into()));
            }
            let t = gens.letter_index(&letter)?;
            if table[from][t as usize].replace(to as u32).is_some() {
                return Err(Error::Parse(format!(
                    "duplicate transition {from} {letter}"
                )));
            }
        }
        Ok(GeodesicAutomaton::from_parts(
            gens,
            table,
            initial as u32,
            level_used.ok_or_else(|| missing("level_used"))?,
            validated_to.ok_or_else(|| missing("validated_to"))?,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::build_geodesic_automaton;
    use crate::group::{parse_presentation, Group, DEFAULT_BUDGET};

    #[test]
    fn round_trip() {
        let g = parse_presentation(include_str!("../../groups/f2.grp")).unwrap();
        for name in ["S", "Sstar"] {
            let gens = g.generating_set(name).unwrap();
            let aut = build_geodesic_automaton(&g, gens, 1, 6, DEFAULT_BUDGET).unwrap();
            let text = aut.to_text();
            let back = GeodesicAutomaton::from_text(&text).unwrap();
            assert_eq!(back, aut);
            assert_eq!(back.to_text(), text);
        }
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(GeodesicAutomaton::from_text("").is_err());
        let g = Group::free(&["a", "b"]).unwrap();
        let aut = build_geodesic_automaton(&g, g.base(), 1, 4, DEFAULT_BUDGET).unwrap();
        let text = aut.to_text();
        let dup = format!("{text}transition 0 a 1\n");
        assert!(GeodesicAutomaton::from_text(&dup).is_err());
        let junk = format!("{text}colour blue\n");
        assert!(GeodesicAutomaton::from_text(&junk).is_err());
    }
}
