//! Geodesic automata built from truncated cone types.
//!
//! Paths from the initial state spell exactly one geodesic word per group
//! element (the shortlex-least one over the chosen generating set), so path
//! counts are sphere sizes and uniform paths are uniform sphere elements.

mod build;
mod sample;
mod text;
mod validate;

use num_bigint::BigUint;
use num_traits::{One, Zero};

pub use build::{build_at_level, build_geodesic_automaton, build_with, BuildOptions};
pub use sample::{sample_uniform_sphere, SphereSampler};
pub use validate::{validate_automaton, ValidationReport, ValidationRow};

use crate::group::{GeneratingSet, Group, GroupElement, Letter, Word};
use crate::Result;

/// A deterministic automaton over the letters of a generating set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeodesicAutomaton {
    gens: GeneratingSet,
    /// `transitions[q][t]` is the target of letter `t` from state `q`.
    transitions: Vec<Vec<Option<u32>>>,
    initial: u32,
    level_used: usize,
    validated_to: usize,
}

/// One transition of an automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub from: u32,
    pub letter: Letter,
    pub to: u32,
}

impl GeodesicAutomaton {
    pub(crate) fn from_parts(
        gens: GeneratingSet,
        transitions: Vec<Vec<Option<u32>>>,
        initial: u32,
        level_used: usize,
        validated_to: usize,
    ) -> Self {
        GeodesicAutomaton {
            gens,
            transitions,
            initial,
            level_used,
            validated_to,
        }
    }

    pub fn gens(&self) -> &GeneratingSet {
        &self.gens
    }

    pub fn num_states(&self) -> usize {
        self.transitions.len()
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    pub fn level_used(&self) -> usize {
        self.level_used
    }

    /// Largest radius at which path counts were checked against breadth-first
    /// search; 0 for an unvalidated automaton.
    pub fn validated_to(&self) -> usize {
        self.validated_to
    }

    pub(crate) fn set_validated_to(&mut self, n: usize) {
        self.validated_to = n;
    }

    pub fn target(&self, state: u32, letter: Letter) -> Option<u32> {
        self.transitions[state as usize][letter as usize]
    }

    /// Transitions ordered by source state, then letter.
    pub fn transitions(&self) -> Vec<Transition> {
        let mut out = Vec::new();
        for (q, row) in self.transitions.iter().enumerate() {
            for (t, target) in row.iter().enumerate() {
                if let Some(to) = target {
                    out.push(Transition {
                        from: q as u32,
                        letter: t as Letter,
                        to: *to,
                    });
                }
            }
        }
        out
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions
            .iter()
            .flatten()
            .filter(|t| t.is_some())
            .count()
    }

    /// Follows `word` from the initial state.
    pub fn run(&self, word: &[Letter]) -> Option<u32> {
        word.iter()
            .try_fold(self.initial, |q, &t| self.target(q, t))
    }

    pub fn accepts(&self, word: &[Letter]) -> bool {
        self.run(word).is_some()
    }

    /// `counts[k][q]`: number of length-`k` paths starting at `q`, for `k <= n_max`.
    pub fn paths_from_table(&self, n_max: usize) -> Vec<Vec<BigUint>> {
        let m = self.num_states();
        let mut table = vec![vec![BigUint::one(); m]];
        for k in 1..=n_max {
            let prev = &table[k - 1];
            let row = self
                .transitions
                .iter()
                .map(|targets| {
                    targets
                        .iter()
                        .flatten()
                        .fold(BigUint::zero(), |acc, &to| acc + &prev[to as usize])
                })
                .collect();
            table.push(row);
        }
        table
    }

    /// Number of length-`n` paths from the initial state.
    pub fn sphere_count(&self, n: usize) -> BigUint {
        self.sphere_counts(n).pop().unwrap()
    }

    /// `sphere_count(k)` for `k = 0..=n_max`, by a forward pass.
    pub fn sphere_counts(&self, n_max: usize) -> Vec<BigUint> {
        let m = self.num_states();
        let mut at = vec![BigUint::zero(); m];
        at[self.initial as usize] = BigUint::one();
        let mut out = vec![BigUint::one()];
        for _ in 0..n_max {
            let mut next = vec![BigUint::zero(); m];
            for (q, count) in at.iter().enumerate() {
                if count.is_zero() {
                    continue;
                }
                for &to in self.transitions[q].iter().flatten() {
                    next[to as usize] += count;
                }
            }
            out.push(next.iter().sum());
            at = next;
        }
        out
    }

    /// All length-`n` words accepted from the initial state, depth first in
    /// letter order.
    pub fn enumerate_sphere(&self, n: usize) -> SpherePaths<'_> {
        SpherePaths {
            aut: self,
            n,
            word: Word::new(),
            states: vec![self.initial],
            next_letter: vec![0],
            done: false,
        }
    }

    /// Group elements spelled by [`GeodesicAutomaton::enumerate_sphere`].
    pub fn enumerate_sphere_elements<'a>(
        &'a self,
        group: &'a Group,
        n: usize,
    ) -> impl Iterator<Item = Result<GroupElement>> + 'a {
        self.enumerate_sphere(n)
            .map(move |w| group.evaluate(&self.gens, &w))
    }
}

/// Depth-first iterator over accepted words of a fixed length.
pub struct SpherePaths<'a> {
    aut: &'a GeodesicAutomaton,
    n: usize,
    word: Word,
    states: Vec<u32>,
    next_letter: Vec<usize>,
    done: bool,
}

impl Iterator for SpherePaths<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        let k = self.aut.gens.len();
        loop {
            let depth = self.word.len();
            if depth == self.n {
                let out = self.word.clone();
                self.backtrack();
                return Some(out);
            }
            let q = *self.states.last().unwrap();
            let t = self.next_letter[depth];
            if t >= k {
                if depth == 0 {
                    self.done = true;
                    return None;
                }
                self.backtrack();
                continue;
            }
            self.next_letter[depth] = t + 1;
            if let Some(to) = self.aut.target(q, t as Letter) {
                self.word.push(t as Letter);
                self.states.push(to);
                self.next_letter.push(0);
            }
        }
    }
}

impl SpherePaths<'_> {
    fn backtrack(&mut self) {
        if self.word.is_empty() {
            self.done = true;
            return;
        }
        self.word.pop();
        self.states.pop();
        self.next_letter.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_BUDGET;

    fn f2_automaton() -> (Group, GeodesicAutomaton) {
        let g = Group::free(&["a", "b"]).unwrap();
        let aut = build_geodesic_automaton(&g, g.base(), 1, 6, DEFAULT_BUDGET).unwrap();
        (g, aut)
    }

    #[test]
    fn free_group_cone_types() {
        let (_, aut) = f2_automaton();
        assert_eq!(aut.num_states(), 5);
        assert_eq!(aut.num_transitions(), 16);
        assert_eq!(aut.level_used(), 1);
        assert_eq!(aut.validated_to(), 6);
        assert_eq!(aut.sphere_count(0), BigUint::from(1u32));
        assert_eq!(aut.sphere_count(5), BigUint::from(324u32));
    }

    #[test]
    fn enumeration_matches_counts() {
        let (g, aut) = f2_automaton();
        assert_eq!(
            aut.enumerate_sphere(0).collect::<Vec<_>>(),
            vec![Word::new()]
        );
        let two: Vec<GroupElement> = aut
            .enumerate_sphere_elements(&g, 2)
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(two.len(), 12);
        let distinct: std::collections::BTreeSet<_> = two.iter().collect();
        assert_eq!(distinct.len(), 12);
        for n in 0..6 {
            assert_eq!(
                BigUint::from(aut.enumerate_sphere(n).count()),
                aut.sphere_count(n)
            );
        }
    }

    #[test]
    fn backward_table_agrees_with_forward_counts() {
        let (_, aut) = f2_automaton();
        let table = aut.paths_from_table(8);
        let forward = aut.sphere_counts(8);
        for k in 0..=8 {
            assert_eq!(table[k][aut.initial() as usize], forward[k]);
        }
    }
}
