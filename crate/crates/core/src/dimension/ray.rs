use rand::Rng;
use serde::Serialize;

use crate::automaton::GeodesicAutomaton;
use crate::distortion::{mean_stderr, ForeignLength};
use crate::error::{Error, Result};
use crate::group::{Group, GroupElement, Letter, Word};
use crate::rng::stream_rng;
use crate::sft::{
    components, growth_rate, maximal_components, parry_gibbs_measure, MarkovMeasure, Potential, Sft,
};

pub(crate) const DRIFT_STREAM: u64 = 2 << 32;
pub(crate) const BILATERAL_STREAM: u64 = 3 << 32;
pub(crate) const DIAGNOSTIC_STREAM: u64 = 4 << 32;

/// A prefix of a geodesic ray: `n` edges of the shift and their letters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RaySample {
    pub edges: Vec<usize>,
    pub word: Word,
}

impl RaySample {
    /// `x_0 = o, ..., x_n`, the elements spelled by the prefixes.
    pub fn trail(&self, group: &Group, aut: &GeodesicAutomaton) -> Result<Vec<GroupElement>> {
        let gens = aut.gens();
        let mut out = vec![group.identity()];
        for &t in &self.word {
            let step = group.evaluate(gens, &[t])?;
            out.push(group.product(out.last().unwrap(), &step)?);
        }
        Ok(out)
    }
}

/// One-sided chains of equilibrium measures on maximal components, entered
/// through the edges reachable from the initial state.
#[derive(Debug, Clone)]
pub struct RaySampler {
    sft: Sft,
    measures: Vec<MarkovMeasure>,
    /// `(measure, symbol, weight)` of the entry distribution.
    entry: Vec<(usize, usize, f64)>,
    entry_total: f64,
}

impl RaySampler {
    /// Uses the equilibrium measures of `-gr` on the maximal components.
    pub fn new(aut: &GeodesicAutomaton) -> Result<Self> {
        let sft = Sft::from_automaton(aut)?;
        let dec = components(&sft);
        let gr = growth_rate(aut)?.gr;
        let psi = Potential::Constant(-gr);
        let maximal = maximal_components(&sft, &dec, &psi)?.maximal;
        let measures = maximal
            .iter()
            .map(|&c| parry_gibbs_measure(&sft, &dec, c, &psi))
            .collect::<Result<Vec<_>>>()?;
        Self::from_measures(aut, sft, measures)
    }

    /// Measures must be on one-symbol blocks of `sft`.
    pub fn from_measures(
        aut: &GeodesicAutomaton,
        sft: Sft,
        measures: Vec<MarkovMeasure>,
    ) -> Result<Self> {
        if measures.iter().any(|m| m.block_length() != 1) {
            return Err(Error::Precondition(
                "ray sampling needs one-symbol measures".into(),
            ));
        }
        let mut reachable = vec![false; aut.num_states()];
        reachable[aut.initial() as usize] = true;
        let mut stack = vec![aut.initial()];
        while let Some(q) = stack.pop() {
            for t in 0..aut.gens().len() as Letter {
                if let Some(to) = aut.target(q, t) {
                    if !reachable[to as usize] {
                        reachable[to as usize] = true;
                        stack.push(to);
                    }
                }
            }
        }
        let mut entry = Vec::new();
        for (mi, m) in measures.iter().enumerate() {
            for (i, sym) in m.symbols().iter().enumerate() {
                let p = m.stationary()[i];
                if p > 0.0 && reachable[sft.edge(sym[0]).from] {
                    entry.push((mi, i, p));
                }
            }
        }
        let entry_total: f64 = entry.iter().map(|e| e.2).sum();
        if entry.is_empty() {
            return Err(Error::EmptySphere(1));
        }
        Ok(RaySampler {
            sft,
            measures,
            entry,
            entry_total,
        })
    }

    pub fn measures(&self) -> &[MarkovMeasure] {
        &self.measures
    }

    fn letter(&self, m: usize, symbol: usize) -> Letter {
        self.sft
            .edge(self.measures[m].symbols()[symbol][0])
            .letter
            .unwrap()
    }

    fn walk<R: Rng + ?Sized>(
        &self,
        m: usize,
        mut symbol: usize,
        n: usize,
        rng: &mut R,
    ) -> RaySample {
        let measure = &self.measures[m];
        let mut edges = Vec::with_capacity(n);
        let mut word = Word::with_capacity(n);
        for k in 0..n {
            if k > 0 {
                symbol = pick(
                    measure.successors(symbol),
                    measure.transitions_from(symbol),
                    1.0,
                    rng,
                );
            }
            edges.push(measure.symbols()[symbol][0]);
            word.push(self.letter(m, symbol));
        }
        RaySample { edges, word }
    }

    /// A path of `n` edges started from the entry distribution.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<RaySample> {
        let (m, symbol, _) =
            self.entry[pick_index(self.entry.iter().map(|e| e.2), self.entry_total, rng)];
        Ok(self.walk(m, symbol, n, rng))
    }

    /// A path of `n` edges started from the stationary distribution of a
    /// measure chosen with equal weights.
    pub fn sample_stationary<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> RaySample {
        let m = rng.random_range(0..self.measures.len());
        let measure = &self.measures[m];
        let symbol = pick_index(measure.stationary().iter().copied(), 1.0, rng);
        self.walk(m, symbol, n, rng)
    }
}

fn pick_index<R: Rng + ?Sized>(
    weights: impl Iterator<Item = f64>,
    total: f64,
    rng: &mut R,
) -> usize {
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

fn pick<R: Rng + ?Sized>(items: &[usize], weights: &[f64], total: f64, rng: &mut R) -> usize {
    items[pick_index(weights.iter().copied(), total, rng)]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftEstimate {
    pub n: usize,
    pub samples: usize,
    pub mean: f64,
    pub stderr: f64,
}

/// Mean and standard error of `|x_n|_T / n` over sampled rays.
pub fn drift(
    sampler: &RaySampler,
    length: &ForeignLength,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<DriftEstimate> {
    if n == 0 || samples == 0 {
        return Err(Error::Precondition("n and samples must be positive".into()));
    }
    let mut rng = stream_rng(seed, DRIFT_STREAM + n as u64);
    let ratios = (0..samples)
        .map(|_| {
            let ray = sampler.sample(n, &mut rng)?;
            Ok(length.length(&ray.word)? as f64 / n as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, stderr) = mean_stderr(&ratios);
    Ok(DriftEstimate {
        n,
        samples,
        mean,
        stderr,
    })
}

/// Mean and standard error of `d_T(x_{-n}, x_n) / 2n` over stationary
/// bilateral paths, where `x_{-n}^{-1} x_n` is spelled by the `2n` letters
/// of the path.
pub fn drift_bilateral(
    sampler: &RaySampler,
    length: &ForeignLength,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<DriftEstimate> {
    if n == 0 || samples == 0 {
        return Err(Error::Precondition("n and samples must be positive".into()));
    }
    let mut rng = stream_rng(seed, BILATERAL_STREAM + n as u64);
    let ratios = (0..samples)
        .map(|_| {
            let path = sampler.sample_stationary(2 * n, &mut rng);
            Ok(length.length(&path.word)? as f64 / (2 * n) as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, stderr) = mean_stderr(&ratios);
    Ok(DriftEstimate {
        n,
        samples,
        mean,
        stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::build_geodesic_automaton;
    use crate::group::DEFAULT_BUDGET;

    #[test]
    fn free_group_rays_are_reduced_words() {
        let g = Group::free(&["a", "b"]).unwrap();
        let aut = build_geodesic_automaton(&g, g.base(), 1, 6, DEFAULT_BUDGET).unwrap();
        let sampler = RaySampler::new(&aut).unwrap();
        let mut rng = stream_rng(3, 0);
        let mut first = [0usize; 4];
        for _ in 0..4000 {
            let ray = sampler.sample(12, &mut rng).unwrap();
            first[ray.word[0] as usize] += 1;
            let trail = ray.trail(&g, &aut).unwrap();
            for (k, x) in trail.iter().enumerate() {
                assert_eq!(g.base_length(x) as usize, k);
            }
        }
        // each first letter has probability 1/4
        assert!(first
            .iter()
            .all(|&c| (c as f64 - 1000.0).abs() < 5.0 * 1000f64.sqrt()));
        assert!(sampler.sample(0, &mut rng).unwrap().word.is_empty());
    }
}
