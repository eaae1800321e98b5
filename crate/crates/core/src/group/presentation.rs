//! Group presentation files.
//!
//! A presentation is a TOML document:
//!
//! ```text
//! family = "free_product"                 # free | finite_table | free_product | dehn
//! generators = ["s", "t", "T"]            # base letters, in shortlex order
//! inverses = { s = "s", t = "T" }         # involution; each pair listed once
//!
//! [[factors]]                             # free_product only
//! table = [[0, 1], [1, 0]]
//! elements = { s = 1 }
//!
//! [[factors]]
//! table = [[0, 1, 2], [1, 2, 0], [2, 0, 1]]
//! elements = { t = 1, T = 2 }
//!
//! [gensets]                               # optional foreign generating sets
//! Sstar = ["s", "t", "s t"]
//! ```
//!
//! Family payloads: `rank` (free), `table` + `elements` (finite_table),
//! `factors` (free_product), `relators` (dehn). Keys belonging to another
//! family, and unknown keys, are rejected.

use std::collections::BTreeMap;

use serde::Deserialize;

use super::{DehnSystem, Family, FiniteTable, FreeProduct, GeneratingSet, Group, Letter};
use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPresentation {
    family: String,
    generators: Vec<String>,
    #[serde(default)]
    inverses: BTreeMap<String, String>,
    rank: Option<usize>,
    table: Option<Vec<Vec<u32>>>,
    elements: Option<BTreeMap<String, u32>>,
    factors: Option<Vec<RawFactor>>,
    relators: Option<Vec<String>>,
    #[serde(default)]
    gensets: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFactor {
    table: Vec<Vec<u32>>,
    elements: BTreeMap<String, u32>,
}

/// Parses and validates a presentation file.
pub fn parse_presentation(text: &str) -> Result<Group> {
    let raw: RawPresentation = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let base = base_generators(&raw.generators, &raw.inverses)?;
    let inverse: Vec<Letter> = (0..base.len() as Letter).map(|l| base.inverse(l)).collect();

    let allowed: &[&str] = match raw.family.as_str() {
        "free" => &["rank"],
        "finite_table" => &["table", "elements"],
        "free_product" => &["factors"],
        "dehn" => &["relators"],
        other => {
            return Err(Error::InvalidPresentation(format!(
                "unknown family {other:?}"
            )));
        }
    };
    let present = [
        ("rank", raw.rank.is_some()),
        ("table", raw.table.is_some()),
        ("elements", raw.elements.is_some()),
        ("factors", raw.factors.is_some()),
        ("relators", raw.relators.is_some()),
    ];
    for (key, is_set) in present {
        if is_set && !allowed.contains(&key) {
            return Err(Error::InvalidPresentation(format!(
                "key {key:?} is not valid for family {:?}",
                raw.family
            )));
        }
        if !is_set && allowed.contains(&key) {
            return Err(Error::InvalidPresentation(format!(
                "family {:?} requires key {key:?}",
                raw.family
            )));
        }
    }

    let letter_map = |elements: &BTreeMap<String, u32>| -> Result<Vec<(Letter, u32)>> {
        elements
            .iter()
            .map(|(name, &e)| Ok((base.letter_index(name)?, e)))
            .collect()
    };

    let family = match raw.family.as_str() {
        "free" => {
            let rank = raw.rank.unwrap();
            let paired = (0..base.len() as Letter).all(|l| base.inverse(l) != l);
            if base.len() != 2 * rank || !paired {
                return Err(Error::InvalidPresentation(format!(
                    "free group of rank {rank} needs {} letters in inverse pairs",
                    2 * rank
                )));
            }
            Family::Free { rank }
        }
        "finite_table" => {
            let letters = letter_map(raw.elements.as_ref().unwrap())?;
            if letters.len() != base.len() {
                return Err(Error::InvalidPresentation(
                    "every generator needs a table element".into(),
                ));
            }
            Family::FiniteTable(FiniteTable::new(raw.table.unwrap(), &letters, &inverse)?)
        }
        "free_product" => {
            let mut factors = Vec::new();
            for f in raw.factors.unwrap() {
                let letters = letter_map(&f.elements)?;
                factors.push(FiniteTable::new(f.table, &letters, &inverse)?);
            }
            Family::FreeProduct(FreeProduct::new(factors, base.len())?)
        }
        "dehn" => {
            let relators = raw
                .relators
                .unwrap()
                .iter()
                .map(|r| base.parse_word(r))
                .collect::<Result<Vec<_>>>()?;
            Family::Dehn(DehnSystem::new(relators, inverse)?)
        }
        _ => unreachable!(),
    };

    let mut group = Group::new(family, base)?;
    for (name, words) in &raw.gensets {
        if name == "S" {
            return Err(Error::InvalidGenerators(
                "the name S is reserved for the base generators".into(),
            ));
        }
        let words = words
            .iter()
            .map(|w| group.base().parse_word(w))
            .collect::<Result<Vec<_>>>()?;
        group.add_generating_set(name, &words)?;
    }
    Ok(group)
}

fn base_generators(names: &[String], inverses: &BTreeMap<String, String>) -> Result<GeneratingSet> {
    if names.is_empty() {
        return Err(Error::InvalidPresentation("no generators".into()));
    }
    if names.len() > Letter::MAX as usize {
        return Err(Error::InvalidPresentation("too many generators".into()));
    }
    for (i, n) in names.iter().enumerate() {
        if n.is_empty()
            || n.contains(char::is_whitespace)
            || n.contains('^')
            || n == "e"
            || n == "1"
        {
            return Err(Error::InvalidPresentation(format!("bad letter name {n:?}")));
        }
        if names[..i].contains(n) {
            return Err(Error::InvalidPresentation(format!(
                "duplicate letter {n:?}"
            )));
        }
    }
    let index = |n: &str| {
        names
            .iter()
            .position(|x| x == n)
            .ok_or_else(|| Error::UnknownLetter(n.to_string()))
    };
    let mut inverse: Vec<Option<Letter>> = vec![None; names.len()];
    for (a, b) in inverses {
        let (i, j) = (index(a)?, index(b)?);
        for (x, y) in [(i, j), (j, i)] {
            match inverse[x] {
                Some(prev) if prev as usize != y => {
                    return Err(Error::InvalidPresentation(format!(
                        "letter {:?} has two inverses",
                        names[x]
                    )))
                }
                _ => inverse[x] = Some(y as Letter),
            }
        }
    }
    let inverse = inverse
        .into_iter()
        .enumerate()
        .map(|(i, inv)| {
            inv.ok_or_else(|| {
                Error::InvalidPresentation(format!("letter {:?} has no inverse", names[i]))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GeneratingSet::base(names.to_vec(), inverse))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PSL: &str = r#"
family = "free_product"
generators = ["s", "t", "T"]
inverses = { s = "s", t = "T" }

[[factors]]
table = [[0, 1], [1, 0]]
elements = { s = 1 }

[[factors]]
table = [[0, 1, 2], [1, 2, 0], [2, 0, 1]]
elements = { t = 1, T = 2 }

[gensets]
Sstar = ["s", "t", "s t"]
"#;

    #[test]
    fn parses_free_product() {
        let g = parse_presentation(PSL).unwrap();
        assert_eq!(g.family().kind(), "free_product");
        let x = g.normalize_names(&["s", "s", "t"]).unwrap();
        assert_eq!(g.format(&x), "t");
        let star = g.generating_set("Sstar").unwrap();
        // s is an involution, t and st are not
        assert_eq!(star.letter_names(), &["s", "t", "T", "st", "Ts"]);
    }

    #[test]
    fn rejects_unknown_and_misplaced_keys() {
        let bad = "family = \"free\"\ngenerators = [\"a\", \"A\"]\ninverses = { a = \"A\" }\nrank = 1\ncolour = 3\n";
        assert!(matches!(parse_presentation(bad), Err(Error::Parse(_))));
        let misplaced = "family = \"free\"\ngenerators = [\"a\", \"A\"]\ninverses = { a = \"A\" }\nrank = 1\nrelators = [\"a a\"]\n";
        assert!(matches!(
            parse_presentation(misplaced),
            Err(Error::InvalidPresentation(_))
        ));
    }

    #[test]
    fn rejects_missing_inverse_and_identity_generator() {
        let missing = "family = \"free\"\ngenerators = [\"a\", \"A\"]\nrank = 1\n";
        assert!(parse_presentation(missing).is_err());
        let ident = "family = \"finite_table\"\ngenerators = [\"x\"]\ninverses = { x = \"x\" }\ntable = [[0, 1], [1, 0]]\nelements = { x = 0 }\n";
        assert!(matches!(
            parse_presentation(ident),
            Err(Error::InvalidGenerators(_))
        ));
    }

    #[test]
    fn dehn_relators_parse() {
        let text = r#"
family = "dehn"
generators = ["a", "A", "b", "B", "c", "C", "d", "D"]
inverses = { a = "A", b = "B", c = "C", d = "D" }
relators = ["a b a^-1 b^-1 c d c^-1 d^-1"]
"#;
        let g = parse_presentation(text).unwrap();
        let x = g.parse_element("a b A B c d C D").unwrap();
        assert!(x.is_identity());
    }
}
