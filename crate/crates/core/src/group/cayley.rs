use std::hash::BuildHasher;

use hashbrown::{HashSet, HashTable};
use rustc_hash::FxBuildHasher;

use super::{shortlex_cmp, GeneratingSet, Group, GroupElement, Letter, Word};
use crate::error::{Error, Result};

/// An insertion-ordered set of words stored in one flat arena.
#[derive(Clone, Default)]
pub struct ElementSet {
    bytes: Vec<Letter>,
    ends: Vec<u64>,
    table: HashTable<u32>,
    hasher: FxBuildHasher,
}

impl std::fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ElementSet")
            .field("len", &self.len())
            .finish()
    }
}

impl ElementSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Room for `words` words of `letters` letters in total.
    pub fn with_capacity(words: usize, letters: usize) -> Self {
        ElementSet {
            bytes: Vec::with_capacity(letters),
            ends: Vec::with_capacity(words),
            table: HashTable::with_capacity(words),
            hasher: FxBuildHasher,
        }
    }

    pub fn len(&self) -> usize {
        self.ends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ends.is_empty()
    }

    pub fn word(&self, index: usize) -> &[Letter] {
        let start = if index == 0 {
            0
        } else {
            self.ends[index - 1] as usize
        };
        &self.bytes[start..self.ends[index] as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Letter]> + '_ {
        (0..self.len()).map(move |i| self.word(i))
    }

    pub fn get(&self, word: &[Letter]) -> Option<usize> {
        let h = self.hasher.hash_one(word);
        self.table
            .find(h, |&i| self.word(i as usize) == word)
            .map(|&i| i as usize)
    }

    pub fn contains(&self, word: &[Letter]) -> bool {
        self.get(word).is_some()
    }

    /// Inserts `word` if absent; returns its index and whether it was new.
    pub fn insert(&mut self, word: &[Letter]) -> (usize, bool) {
        let h = self.hasher.hash_one(word);
        let Self {
            bytes,
            ends,
            table,
            hasher,
        } = self;
        let word_at = |i: u32| -> &[Letter] {
            let i = i as usize;
            let start = if i == 0 { 0 } else { ends[i - 1] as usize };
            &bytes[start..ends[i] as usize]
        };
        if let Some(&i) = table.find(h, |&i| word_at(i) == word) {
            return (i as usize, false);
        }
        let index = ends.len();
        assert!(index < u32::MAX as usize, "element set overflow");
        bytes.extend_from_slice(word);
        ends.push(bytes.len() as u64);
        let (bytes, ends) = (&*bytes, &*ends);
        table.insert_unique(h, index as u32, |&i| {
            let i = i as usize;
            let start = if i == 0 { 0 } else { ends[i - 1] as usize };
            hasher.hash_one(&bytes[start..ends[i] as usize])
        });
        (index, true)
    }
}

/// Breadth-first exploration of a ball in a Cayley graph.
///
/// Elements are stored in discovery order. Because spheres are expanded in
/// order and letters are tried in order, discovery order is the shortlex
/// order of each element's least geodesic word over the generating set, and
/// the recorded parent edge is the last letter of that word.
#[derive(Debug, Clone)]
pub struct Ball {
    radius: usize,
    gens_len: usize,
    elements: ElementSet,
    parent: Vec<u32>,
    parent_letter: Vec<Letter>,
    sphere_starts: Vec<usize>,
    /// `neighbors[i * gens_len + t]` is the index of `x_i · t`, or `NONE`
    /// when that product lies outside the ball.
    neighbors: Vec<u32>,
}

impl Ball {
    pub const NONE: u32 = u32::MAX;

    /// Explores `B_T(o, radius)` where `T = gens`; fails when the number of
    /// elements would exceed `budget`.
    pub fn explore(
        group: &Group,
        gens: &GeneratingSet,
        radius: usize,
        budget: usize,
    ) -> Result<Ball> {
        let k = gens.len();
        let mut elements = ElementSet::new();
        elements.insert(&[]);
        let mut parent = vec![u32::MAX];
        let mut parent_letter = vec![0];
        let mut sphere_starts = vec![0, 1];
        let mut neighbors = Vec::new();
        let mut buf = Word::new();
        let mut current: Word = Word::new();
        for r in 0..=radius {
            let (lo, hi) = (sphere_starts[r], sphere_starts[r + 1]);
            for i in lo..hi {
                current.clear();
                current.extend_from_slice(elements.word(i));
                for t in 0..k {
                    group.multiply_into(&current, gens.base_word(t as Letter), &mut buf)?;
                    let idx = if r < radius {
                        let (idx, new) = elements.insert(&buf);
                        if new {
                            if elements.len() > budget {
                                return Err(Error::ResourceLimit { budget });
                            }
                            parent.push(i as u32);
                            parent_letter.push(t as Letter);
                        }
                        idx as u32
                    } else {
                        elements.get(&buf).map_or(Self::NONE, |i| i as u32)
                    };
                    neighbors.push(idx);
                }
            }
            if r < radius {
                sphere_starts.push(elements.len());
            }
        }
        Ok(Ball {
            radius,
            gens_len: k,
            elements,
            parent,
            parent_letter,
            sphere_starts,
            neighbors,
        })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &ElementSet {
        &self.elements
    }

    /// Normal form (over the base letters) of element `i`.
    pub fn word(&self, i: usize) -> &[Letter] {
        self.elements.word(i)
    }

    pub fn element(&self, i: usize) -> GroupElement {
        GroupElement::from_normal_form(self.word(i).to_vec())
    }

    pub fn index_of(&self, normal_form: &[Letter]) -> Option<usize> {
        self.elements.get(normal_form)
    }

    /// Index range of the sphere of radius `n`.
    pub fn sphere_range(&self, n: usize) -> std::ops::Range<usize> {
        assert!(
            n <= self.radius,
            "sphere {n} outside ball of radius {}",
            self.radius
        );
        self.sphere_starts[n]..self.sphere_starts[n + 1]
    }

    pub fn sphere_size(&self, n: usize) -> usize {
        self.sphere_range(n).len()
    }

    pub fn sphere_sizes(&self) -> Vec<usize> {
        (0..=self.radius).map(|n| self.sphere_size(n)).collect()
    }

    /// Word length of element `i`.
    pub fn length(&self, i: usize) -> usize {
        self.sphere_starts.partition_point(|&s| s <= i) - 1
    }

    pub fn parent(&self, i: usize) -> Option<(usize, Letter)> {
        (i != 0).then(|| (self.parent[i] as usize, self.parent_letter[i]))
    }

    pub fn neighbor(&self, i: usize, letter: Letter) -> Option<usize> {
        let v = self.neighbors[i * self.gens_len + letter as usize];
        (v != Self::NONE).then_some(v as usize)
    }

    /// Follows `word` from element `i`; `None` if the walk leaves the ball.
    pub fn walk(&self, mut i: usize, word: &[Letter]) -> Option<usize> {
        for &l in word {
            i = self.neighbor(i, l)?;
        }
        Some(i)
    }

    /// The shortlex-least geodesic word over the generating set for element `i`.
    pub fn geodesic_word(&self, mut i: usize) -> Word {
        let mut w = Word::new();
        while let Some((p, l)) = self.parent(i) {
            w.push(l);
            i = p;
        }
        w.reverse();
        w
    }
}

/// Walks the Cayley graph sphere by sphere, keeping only three layers.
pub(crate) struct LayerWalker<'a> {
    group: &'a Group,
    gens: &'a GeneratingSet,
    budget: usize,
    radius: usize,
    previous: ElementSet,
    current: ElementSet,
}

impl<'a> LayerWalker<'a> {
    pub(crate) fn new(group: &'a Group, gens: &'a GeneratingSet, budget: usize) -> Self {
        let mut current = ElementSet::new();
        current.insert(&[]);
        LayerWalker {
            group,
            gens,
            budget,
            radius: 0,
            previous: ElementSet::new(),
            current,
        }
    }

    /// The current sphere.
    pub(crate) fn current(&self) -> &ElementSet {
        &self.current
    }

    pub(crate) fn advance(&mut self) -> Result<()> {
        // over the base set normal forms are geodesic, so the layer of a word
        // is its length and no lookup in the older layers is needed
        let by_length = self.gens.is_base();
        let growth = match self.previous.len() {
            0 => self.gens.len(),
            p => self.current.len().div_ceil(p),
        };
        let hint = (self.current.len() * growth).min(self.budget + 1);
        let mut next = ElementSet::with_capacity(hint, hint * (self.radius + 1));
        let mut buf = Word::new();
        for i in 0..self.current.len() {
            let x = self.current.word(i);
            for t in 0..self.gens.len() {
                self.group
                    .multiply_into(x, self.gens.base_word(t as Letter), &mut buf)?;
                let older = if by_length {
                    buf.len() <= self.radius
                } else {
                    self.previous.contains(&buf) || self.current.contains(&buf)
                };
                if older {
                    continue;
                }
                let (_, new) = next.insert(&buf);
                if new && next.len() > self.budget {
                    return Err(Error::ResourceLimit {
                        budget: self.budget,
                    });
                }
            }
        }
        self.radius += 1;
        self.previous = std::mem::replace(&mut self.current, next);
        Ok(())
    }
}

/// The sphere `S_T(n)`, sorted in shortlex order of normal forms.
pub fn sphere(
    group: &Group,
    gens: &GeneratingSet,
    n: usize,
    budget: usize,
) -> Result<Vec<GroupElement>> {
    let mut walker = LayerWalker::new(group, gens, budget);
    for _ in 0..n {
        walker.advance()?;
        if walker.current.is_empty() {
            return Ok(Vec::new());
        }
    }
    let mut words: Vec<&[Letter]> = walker.current.iter().collect();
    words.sort_by(|a, b| shortlex_cmp(a, b));
    Ok(words
        .into_iter()
        .map(|w| GroupElement::from_normal_form(w.to_vec()))
        .collect())
}

/// Sphere sizes `|S_T(0)|, ..., |S_T(n_max)|` by layered breadth-first search.
pub fn sphere_sizes(
    group: &Group,
    gens: &GeneratingSet,
    n_max: usize,
    budget: usize,
) -> Result<Vec<u64>> {
    let bits = usize::BITS - gens.len().saturating_sub(1).leading_zeros();
    if gens.is_base() && bits as usize * n_max <= 64 {
        return packed_sphere_sizes(group, gens, n_max, bits, budget);
    }
    let mut walker = LayerWalker::new(group, gens, budget);
    let mut sizes = vec![1];
    for _ in 0..n_max {
        if walker.current.is_empty() {
            sizes.push(0);
            continue;
        }
        walker.advance()?;
        sizes.push(walker.current.len() as u64);
    }
    Ok(sizes)
}

/// Base-set spheres hold normal forms of one length, packed `bits` bits per
/// letter into a `u64`.
fn packed_sphere_sizes(
    group: &Group,
    gens: &GeneratingSet,
    n_max: usize,
    bits: u32,
    budget: usize,
) -> Result<Vec<u64>> {
    let mask = (1u64 << bits) - 1;
    let mut current: Vec<u64> = vec![0];
    let mut sizes = vec![1];
    let mut word = Word::new();
    let mut buf = Word::new();
    for n in 0..n_max {
        let mut next: HashSet<u64, FxBuildHasher> = HashSet::with_capacity_and_hasher(
            (current.len() * gens.len()).min(budget + 1),
            FxBuildHasher,
        );
        for &key in &current {
            word.clear();
            word.extend(
                (0..n)
                    .rev()
                    .map(|i| ((key >> (bits as usize * i)) & mask) as Letter),
            );
            for t in 0..gens.len() as Letter {
                group.multiply_into(&word, gens.base_word(t), &mut buf)?;
                if buf.len() != n + 1 {
                    continue;
                }
                let packed = buf.iter().fold(0u64, |acc, &l| (acc << bits) | l as u64);
                if next.insert(packed) && next.len() > budget {
                    return Err(Error::ResourceLimit { budget });
                }
            }
        }
        sizes.push(next.len() as u64);
        current = next.into_iter().collect();
    }
    Ok(sizes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_BUDGET;

    #[test]
    fn element_set_dedups_and_keeps_order() {
        let mut s = ElementSet::new();
        assert_eq!(s.insert(&[1, 2]), (0, true));
        assert_eq!(s.insert(&[]), (1, true));
        assert_eq!(s.insert(&[1, 2]), (0, false));
        assert_eq!(s.word(0), &[1, 2]);
        assert_eq!(s.word(1), &[] as &[u8]);
        assert_eq!(s.get(&[2]), None);
    }

    #[test]
    fn free_group_spheres() {
        let g = Group::free(&["a", "b"]).unwrap();
        let sizes = sphere_sizes(&g, g.base(), 6, DEFAULT_BUDGET).unwrap();
        let expected: Vec<u64> = std::iter::once(1)
            .chain((1..=6).map(|n| 4 * 3u64.pow(n - 1)))
            .collect();
        assert_eq!(sizes, expected);
        let s3 = sphere(&g, g.base(), 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(s3.len(), 36);
    }

    #[test]
    fn packed_and_layered_counts_agree() {
        for text in [
            include_str!("../../groups/psl2z.grp"),
            include_str!("../../groups/surface2.grp"),
        ] {
            let g = crate::group::parse_presentation(text).unwrap();
            let packed = sphere_sizes(&g, g.base(), 5, DEFAULT_BUDGET).unwrap();
            let ball = Ball::explore(&g, g.base(), 5, DEFAULT_BUDGET).unwrap();
            let layered: Vec<u64> = ball.sphere_sizes().into_iter().map(|c| c as u64).collect();
            assert_eq!(packed, layered);
        }
    }

    #[test]
    fn ball_records_shortlex_parents() {
        let g = Group::free(&["a", "b"]).unwrap();
        let ball = Ball::explore(&g, g.base(), 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(ball.sphere_sizes(), vec![1, 4, 12, 36]);
        for i in 0..ball.len() {
            assert_eq!(ball.geodesic_word(i), ball.word(i));
            assert_eq!(ball.length(i), ball.word(i).len());
        }
        let a = ball.index_of(&[0]).unwrap();
        assert_eq!(ball.neighbor(a, 1), Some(0));
        // discovery order is shortlex
        for i in 1..ball.len() {
            assert!(shortlex_cmp(ball.word(i - 1), ball.word(i)).is_lt());
        }
    }

    #[test]
    fn budget_is_enforced() {
        let g = Group::free(&["a", "b"]).unwrap();
        assert!(matches!(
            sphere_sizes(&g, g.base(), 5, 50),
            Err(Error::ResourceLimit { budget: 50 })
        ));
        assert!(Ball::explore(&g, g.base(), 5, 50).is_err());
    }
}
