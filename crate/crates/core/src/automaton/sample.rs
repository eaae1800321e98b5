use num_bigint::BigUint;
use num_traits::Zero;
use rand::Rng;

use super::GeodesicAutomaton;
use crate::error::{Error, Result};
use crate::group::{Group, GroupElement, Letter, Word};
use crate::rng::stream_rng;

/// Exact uniform sampler over the length-`n` paths from the initial state.
///
/// A path is drawn by picking a uniform index below the total count and
/// descending through the backward path-count table. Counts that fit in
/// 128 bits take a fixed-width fast path with the same distribution.
#[derive(Debug, Clone)]
pub struct SphereSampler<'a> {
    aut: &'a GeodesicAutomaton,
    n: usize,
    table: Vec<Vec<BigUint>>,
    narrow: Option<Vec<Vec<u128>>>,
}

impl<'a> SphereSampler<'a> {
    pub fn new(aut: &'a GeodesicAutomaton, n: usize) -> Result<Self> {
        let table = aut.paths_from_table(n);
        if table[n][aut.initial() as usize].is_zero() {
            return Err(Error::EmptySphere(n));
        }
        let narrow = table
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| u128::try_from(c).ok())
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>();
        Ok(SphereSampler {
            aut,
            n,
            table,
            narrow,
        })
    }

    pub fn count(&self) -> &BigUint {
        &self.table[self.n][self.aut.initial() as usize]
    }

    /// A uniform length-`n` accepted word.
    pub fn sample_word<R: Rng + ?Sized>(&self, rng: &mut R) -> Word {
        let k = self.aut.gens().len();
        let mut word = Word::with_capacity(self.n);
        let mut q = self.aut.initial();
        if let Some(narrow) = &self.narrow {
            let mut index = rng.random_range(0..narrow[self.n][q as usize]);
            for remaining in (0..self.n).rev() {
                for t in 0..k as Letter {
                    let Some(to) = self.aut.target(q, t) else {
                        continue;
                    };
                    let c = narrow[remaining][to as usize];
                    if index < c {
                        word.push(t);
                        q = to;
                        break;
                    }
                    index -= c;
                }
            }
        } else {
            let mut index = uniform_below(rng, self.count());
            for remaining in (0..self.n).rev() {
                for t in 0..k as Letter {
                    let Some(to) = self.aut.target(q, t) else {
                        continue;
                    };
                    let c = &self.table[remaining][to as usize];
                    if &index < c {
                        word.push(t);
                        q = to;
                        break;
                    }
                    index -= c;
                }
            }
        }
        debug_assert_eq!(word.len(), self.n);
        word
    }

    pub fn sample<R: Rng + ?Sized>(&self, group: &Group, rng: &mut R) -> Result<GroupElement> {
        let w = self.sample_word(rng);
        group.evaluate(self.aut.gens(), &w)
    }
}

/// Uniform integer in `[0, bound)` by rejection on `bits(bound)` random bits.
pub(crate) fn uniform_below<R: Rng + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    assert!(!bound.is_zero());
    let bits = bound.bits();
    let bytes = bits.div_ceil(8) as usize;
    let excess = (bytes as u64 * 8 - bits) as u32;
    let mut buf = vec![0u8; bytes];
    loop {
        rng.fill(&mut buf[..]);
        // big-endian: mask the leading byte down to `bits` bits
        buf[0] &= 0xffu8 >> excess;
        let candidate = BigUint::from_bytes_be(&buf);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// One uniform element of the sphere of radius `n`, reproducible from `seed`.
pub fn sample_uniform_sphere(
    aut: &GeodesicAutomaton,
    group: &Group,
    n: usize,
    seed: u64,
) -> Result<GroupElement> {
    let sampler = SphereSampler::new(aut, n)?;
    sampler.sample(group, &mut stream_rng(seed, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::build_geodesic_automaton;
    use crate::group::{parse_presentation, DEFAULT_BUDGET};

    #[test]
    fn uniform_below_stays_in_range() {
        let mut rng = stream_rng(1, 0);
        let bound = BigUint::from(1000u32) << 100u32;
        for _ in 0..200 {
            assert!(uniform_below(&mut rng, &bound) < bound);
        }
        let one = BigUint::from(1u32);
        assert!(uniform_below(&mut rng, &one).is_zero());
    }

    #[test]
    fn first_letter_is_a_generator() {
        let g = Group::free(&["a", "b"]).unwrap();
        let aut = build_geodesic_automaton(&g, g.base(), 1, 4, DEFAULT_BUDGET).unwrap();
        for seed in 0..20 {
            let x = sample_uniform_sphere(&aut, &g, 1, seed).unwrap();
            assert_eq!(g.base_length(&x), 1);
        }
        let x = sample_uniform_sphere(&aut, &g, 30, 3).unwrap();
        assert_eq!(g.base_length(&x), 30);
    }

    #[test]
    fn wide_counts_use_the_big_integer_path() {
        let g = Group::free(&["a", "b"]).unwrap();
        let aut = build_geodesic_automaton(&g, g.base(), 1, 4, DEFAULT_BUDGET).unwrap();
        let sampler = SphereSampler::new(&aut, 90).unwrap();
        assert!(sampler.narrow.is_none());
        let mut rng = stream_rng(5, 0);
        let x = sampler.sample(&g, &mut rng).unwrap();
        assert_eq!(g.base_length(&x), 90);
    }

    #[test]
    fn beyond_the_diameter_is_empty() {
        let g = parse_presentation(include_str!("../../groups/s3.grp")).unwrap();
        let aut = build_geodesic_automaton(&g, g.base(), 1, 6, DEFAULT_BUDGET).unwrap();
        assert_eq!(
            sample_uniform_sphere(&aut, &g, 4, 0),
            Err(Error::EmptySphere(4))
        );
    }
}
