use std::collections::VecDeque;

use rustc_hash::{FxHashMap, FxHashSet};

use super::{free_reduce_append, shortlex_cmp, Letter, Word};
use crate::error::{Error, Result};

/// Default cap on the number of equal-length words visited while searching
/// for the shortlex-least representative.
pub const DEFAULT_SWAP_BUDGET: usize = 200_000;

/// Word problem for small-cancellation presentations.
///
/// Normalization first applies Dehn's algorithm (replace any subword longer
/// than half a relator by the shorter complement), then explores all words
/// reachable by swapping exact half-relators. Any reducible word found
/// restarts the process at the shorter length; otherwise the shortlex-least
/// word of the class is the normal form.
#[derive(Debug, Clone)]
pub struct DehnSystem {
    relators: Vec<Word>,
    inverse: Vec<Letter>,
    long_rules: FxHashMap<Word, Word>,
    long_lengths: Vec<usize>,
    half_rules: FxHashMap<Word, Vec<Word>>,
    half_lengths: Vec<usize>,
    swap_budget: usize,
}

impl DehnSystem {
    /// Cyclically reduces and symmetrizes the relators.
    pub fn new(relators: Vec<Word>, inverse: Vec<Letter>) -> Result<Self> {
        let mut reduced = Vec::new();
        for r in relators {
            let mut w = Word::new();
            free_reduce_append(&mut w, &r, &inverse);
            while w.len() >= 2 && inverse[w[0] as usize] == *w.last().unwrap() {
                w.pop();
                w.remove(0);
            }
            if w.is_empty() {
                return Err(Error::InvalidPresentation(
                    "relator reduces to the empty word".into(),
                ));
            }
            reduced.push(w);
        }
        let mut long_rules: FxHashMap<Word, Word> = FxHashMap::default();
        let mut half_rules: FxHashMap<Word, Vec<Word>> = FxHashMap::default();
        for r in &reduced {
            let rinv: Word = r.iter().rev().map(|&l| inverse[l as usize]).collect();
            for base in [r, &rinv] {
                let n = base.len();
                for shift in 0..n {
                    let rot: Word = base[shift..]
                        .iter()
                        .chain(&base[..shift])
                        .copied()
                        .collect();
                    for len in 1..n {
                        if 2 * len < n {
                            continue;
                        }
                        let (u, v) = rot.split_at(len);
                        let replacement: Word =
                            v.iter().rev().map(|&l| inverse[l as usize]).collect();
                        if 2 * len > n {
                            long_rules.entry(u.to_vec()).or_insert(replacement);
                        } else if u != replacement.as_slice() {
                            let reps = half_rules.entry(u.to_vec()).or_default();
                            if !reps.contains(&replacement) {
                                reps.push(replacement);
                            }
                        }
                    }
                }
            }
        }
        for reps in half_rules.values_mut() {
            reps.sort();
        }
        let mut long_lengths: Vec<usize> = long_rules.keys().map(Vec::len).collect();
        long_lengths.sort_unstable_by(|a, b| b.cmp(a));
        long_lengths.dedup();
        let mut half_lengths: Vec<usize> = half_rules.keys().map(Vec::len).collect();
        half_lengths.sort_unstable();
        half_lengths.dedup();
        Ok(DehnSystem {
            relators: reduced,
            inverse,
            long_rules,
            long_lengths,
            half_rules,
            half_lengths,
            swap_budget: DEFAULT_SWAP_BUDGET,
        })
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn with_swap_budget(mut self, budget: usize) -> Self {
        self.swap_budget = budget;
        self
    }

    /// Free reduction plus greedy Dehn reduction.
    pub fn dehn_reduce(&self, word: &[Letter]) -> Word {
        let mut w = Word::with_capacity(word.len());
        free_reduce_append(&mut w, word, &self.inverse);
        'again: loop {
            for i in 0..w.len() {
                for &len in &self.long_lengths {
                    if i + len > w.len() {
                        continue;
                    }
                    if let Some(rep) = self.long_rules.get(&w[i..i + len]) {
                        let mut next = Word::with_capacity(w.len());
                        next.extend_from_slice(&w[..i]);
                        free_reduce_append(&mut next, rep, &self.inverse);
                        free_reduce_append(&mut next, &w[i + len..], &self.inverse);
                        w = next;
                        continue 'again;
                    }
                }
            }
            return w;
        }
    }

    pub(crate) fn normalize_into(&self, word: &[Letter], out: &mut Word) -> Result<()> {
        let mut current = self.dehn_reduce(word);
        'restart: loop {
            if self.half_lengths.is_empty() {
                break;
            }
            let mut best = current.clone();
            let mut seen: FxHashSet<Word> = FxHashSet::default();
            seen.insert(current.clone());
            let mut queue = VecDeque::from([current.clone()]);
            while let Some(u) = queue.pop_front() {
                for i in 0..u.len() {
                    for &len in &self.half_lengths {
                        if i + len > u.len() {
                            break;
                        }
                        let Some(reps) = self.half_rules.get(&u[i..i + len]) else {
                            continue;
                        };
                        for rep in reps {
                            let mut v = Word::with_capacity(u.len());
                            v.extend_from_slice(&u[..i]);
                            v.extend_from_slice(rep);
                            v.extend_from_slice(&u[i + len..]);
                            let reduced = self.dehn_reduce(&v);
                            if reduced.len() < v.len() {
                                current = reduced;
                                continue 'restart;
                            }
                            if seen.contains(&v) {
                                continue;
                            }
                            if seen.len() >= self.swap_budget {
                                return Err(Error::ResourceLimit {
                                    budget: self.swap_budget,
                                });
                            }
                            if shortlex_cmp(&v, &best).is_lt() {
                                best = v.clone();
                            }
                            seen.insert(v.clone());
                            queue.push_back(v);
                        }
                    }
                }
            }
            current = best;
            break;
        }
        out.clear();
        out.extend_from_slice(&current);
        Ok(())
    }
}
