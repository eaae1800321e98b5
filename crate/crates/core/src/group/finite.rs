use std::collections::VecDeque;

use super::{Letter, Word};
use crate::error::{Error, Result};

/// A finite group given by its multiplication table, with some base letters
/// mapped to table elements.
#[derive(Debug, Clone)]
pub struct FiniteTable {
    table: Vec<Vec<u32>>,
    identity: u32,
    /// Table element of each base letter, `None` for letters of other factors.
    letter_elem: Vec<Option<u32>>,
    /// Shortlex-least word for each element reachable from the letters.
    words: Vec<Option<Word>>,
}

impl FiniteTable {
    /// Validates the table (closure, identity, inverses, associativity) and
    /// the letter assignment against the base inverse pairing.
    pub fn new(
        table: Vec<Vec<u32>>,
        letters: &[(Letter, u32)],
        base_inverse: &[Letter],
    ) -> Result<Self> {
        let n = table.len();
        let bad = |msg: String| Error::InvalidPresentation(msg);
        if n == 0 {
            return Err(bad("empty multiplication table".into()));
        }
        for row in &table {
            if row.len() != n {
                return Err(bad("multiplication table is not square".into()));
            }
            if row.iter().any(|&v| v as usize >= n) {
                return Err(bad("table entry out of range".into()));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] as usize == x && table[x][e] as usize == x))
            .ok_or_else(|| bad("table has no identity".into()))? as u32;
        for (x, row) in table.iter().enumerate() {
            if !(0..n).any(|y| row[y] == identity && table[y][x] == identity) {
                return Err(bad(format!("element {x} has no inverse")));
            }
        }
        for x in 0..n {
            for y in 0..n {
                let xy = table[x][y] as usize;
                for z in 0..n {
                    let yz = table[y][z] as usize;
                    if table[xy][z] != table[x][yz] {
                        return Err(bad(format!("table is not associative at ({x},{y},{z})")));
                    }
                }
            }
        }
        let mut letter_elem = vec![None; base_inverse.len()];
        for &(l, e) in letters {
            if e as usize >= n {
                return Err(bad(format!("letter {l} maps outside the table")));
            }
            letter_elem[l as usize] = Some(e);
        }
        for &(l, e) in letters {
            let inv = base_inverse[l as usize];
            match letter_elem[inv as usize] {
                Some(ie) if table[e as usize][ie as usize] == identity => {}
                _ => {
                    return Err(bad(format!(
                        "letter {l} and its declared inverse do not multiply to the identity"
                    )))
                }
            }
        }
        let mut words = vec![None; n];
        words[identity as usize] = Some(Word::new());
        let mut queue = VecDeque::from([identity]);
        while let Some(x) = queue.pop_front() {
            for (l, e) in letter_elem.iter().enumerate() {
                let Some(e) = e else { continue };
                let y = table[x as usize][*e as usize];
                if words[y as usize].is_none() {
                    let mut w = words[x as usize].clone().unwrap();
                    w.push(l as Letter);
                    words[y as usize] = Some(w);
                    queue.push_back(y);
                }
            }
        }
        Ok(FiniteTable {
            table,
            identity,
            letter_elem,
            words,
        })
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn multiply(&self, x: u32, y: u32) -> u32 {
        self.table[x as usize][y as usize]
    }

    pub fn letter_element(&self, letter: Letter) -> Option<u32> {
        self.letter_elem.get(letter as usize).copied().flatten()
    }

    pub(crate) fn evaluate(&self, word: &[Letter]) -> u32 {
        word.iter().fold(self.identity, |acc, &l| {
            let e = self.letter_elem[l as usize].expect("letter belongs to this table");
            self.multiply(acc, e)
        })
    }

    /// Shortlex-least word of a reachable element.
    pub(crate) fn normal_word(&self, x: u32) -> &[Letter] {
        self.words[x as usize]
            .as_deref()
            .expect("products of letters are reachable")
    }

    /// Diameter of the Cayley graph on the letters of this table.
    pub fn diameter(&self) -> usize {
        self.words.iter().flatten().map(Vec::len).max().unwrap_or(0)
    }
}

/// Free product of finite groups; every base letter belongs to one factor.
#[derive(Debug, Clone)]
pub struct FreeProduct {
    factors: Vec<FiniteTable>,
    letter_factor: Vec<usize>,
}

impl FreeProduct {
    pub fn new(factors: Vec<FiniteTable>, letter_count: usize) -> Result<Self> {
        let mut letter_factor = vec![usize::MAX; letter_count];
        for (fi, f) in factors.iter().enumerate() {
            for (l, slot) in letter_factor.iter_mut().enumerate() {
                if f.letter_element(l as Letter).is_some() {
                    if *slot != usize::MAX {
                        return Err(Error::InvalidPresentation(format!(
                            "letter {l} belongs to two factors"
                        )));
                    }
                    *slot = fi;
                }
            }
        }
        if let Some(l) = letter_factor.iter().position(|&f| f == usize::MAX) {
            return Err(Error::InvalidPresentation(format!(
                "letter {l} belongs to no factor"
            )));
        }
        Ok(FreeProduct {
            factors,
            letter_factor,
        })
    }

    pub fn factors(&self) -> &[FiniteTable] {
        &self.factors
    }

    /// Alternating syllable normal form: adjacent letters of one factor are
    /// multiplied out, trivial syllables dropped.
    pub(crate) fn normalize_into(&self, word: &[Letter], out: &mut Word) {
        let mut syllables: Vec<(usize, u32)> = Vec::with_capacity(word.len());
        for &l in word {
            let f = self.letter_factor[l as usize];
            let table = &self.factors[f];
            let e = table.letter_element(l).unwrap();
            match syllables.last_mut() {
                Some((top_f, top_e)) if *top_f == f => {
                    let prod = table.multiply(*top_e, e);
                    if prod == table.identity() {
                        syllables.pop();
                    } else {
                        *top_e = prod;
                    }
                }
                _ => syllables.push((f, e)),
            }
        }
        out.clear();
        for (f, e) in syllables {
            out.extend_from_slice(self.factors[f].normal_word(e));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(n: u32) -> Vec<Vec<u32>> {
        (0..n)
            .map(|i| (0..n).map(|j| (i + j) % n).collect())
            .collect()
    }

    #[test]
    fn rejects_non_associative_table() {
        // A Latin square with identity 0 that is not a group (order 5 loop).
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(
            FiniteTable::new(t, &[(0, 1), (1, 1)], &[1, 0]),
            Err(Error::InvalidPresentation(_))
        ));
    }

    #[test]
    fn rejects_bad_inverse_pairing() {
        // letters 0 -> 1 and 1 -> 1 in Z/3 are not mutually inverse
        assert!(FiniteTable::new(cyclic(3), &[(0, 1), (1, 1)], &[1, 0]).is_err());
        assert!(FiniteTable::new(cyclic(3), &[(0, 1), (1, 2)], &[1, 0]).is_ok());
    }

    #[test]
    fn free_product_syllables() {
        // Z/2 * Z/3 with letters s (0), t (1), T (2)
        let inv = [0, 2, 1];
        let z2 = FiniteTable::new(cyclic(2), &[(0, 1)], &inv).unwrap();
        let z3 = FiniteTable::new(cyclic(3), &[(1, 1), (2, 2)], &inv).unwrap();
        let fp = FreeProduct::new(vec![z2, z3], 3).unwrap();
        let mut out = Word::new();
        fp.normalize_into(&[0, 0, 1], &mut out);
        assert_eq!(out, vec![1]);
        fp.normalize_into(&[1, 1, 0, 2, 2], &mut out);
        assert_eq!(out, vec![2, 0, 1]);
    }
}
