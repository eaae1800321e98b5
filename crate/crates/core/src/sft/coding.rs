use std::collections::BTreeMap;

use serde::Serialize;

use super::{
    components, growth_rate, maximal_components, parry_gibbs_measure, MarkovMeasure, Potential, Sft,
};
use crate::automaton::GeodesicAutomaton;
use crate::error::{Error, Result};
use crate::group::{Ball, ElementSet, Group, Word};

/// Masses of bilateral cylinders through the identity, sorted by the
/// endpoints `(x, y)` of their length-`n` past and future, compared with
/// the product of shadow sizes `exp(-v n)` at both ends.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodingReport {
    pub n: usize,
    pub radius: usize,
    pub growth_rate: f64,
    pub sphere_size: usize,
    /// Number of pairs `(x, y)` in `S_n x S_n`.
    pub pairs: u128,
    /// Pairs whose neighbourhoods carry no cylinder mass.
    pub zero_pairs: u128,
    pub max_ratio: f64,
    /// Smallest ratio among pairs of positive mass.
    pub min_positive_ratio: f64,
    pub mean_ratio: f64,
}

/// Exhaustive over `S_n x S_n`. The mass near `(x, y)` is the measure of
/// bilateral paths whose past block ends at some `x'` and whose future block
/// ends at some `y'`, with `x'` and `y'` in `S_n` within distance `radius` of
/// `x` and `y`. The measure is the sum of the equilibrium measures of
/// `-v` on the maximal components. Pairs are grouped by their mass vectors,
/// and [`Error::ResourceLimit`] is returned if more than `budget` distinct
/// vector pairs remain.
pub fn ps_coding_check(
    group: &Group,
    aut: &GeodesicAutomaton,
    radius: usize,
    n: usize,
    budget: usize,
) -> Result<CodingReport> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    if aut.validated_to() < 2 * n {
        return Err(Error::Precondition(format!(
            "automaton validated to {}, need {}",
            aut.validated_to(),
            2 * n
        )));
    }
    let gens = aut.gens();
    let sft = Sft::from_automaton(aut)?;
    let dec = components(&sft);
    let v = growth_rate(aut)?.gr;
    let psi = Potential::Constant(-v);
    let maximal = maximal_components(&sft, &dec, &psi)?.maximal;
    let measures = maximal
        .iter()
        .map(|&c| parry_gibbs_measure(&sft, &dec, c, &psi))
        .collect::<Result<Vec<_>>>()?;

    let sphere: Vec<Word> = aut
        .enumerate_sphere_elements(group, n)
        .map(|x| x.map(|x| x.normal_form().to_vec()))
        .collect::<Result<_>>()?;
    let mut sphere_set = ElementSet::new();
    for x in &sphere {
        sphere_set.insert(x);
    }

    // past[x][e]: mass of past blocks ending with symbol e whose endpoint is x;
    // future[y][e]: conditional mass of future blocks after e ending at y
    let dim = sft.len();
    let mut past = vec![vec![0.0; dim]; sphere.len()];
    let mut future = vec![vec![0.0; dim]; sphere.len()];
    for m in &measures {
        let letter = |i: usize| sft.edge(m.symbols()[i][0]).letter.unwrap();
        let edge = |i: usize| m.symbols()[i][0];
        for_each_block(m, n, |ids, weight| {
            let word: Word = ids.iter().map(|&i| letter(i)).collect();
            let x = group.inverse(&group.evaluate(gens, &word)?)?;
            let first = ids[0];
            if let Some(xi) = sphere_set.get(x.normal_form()) {
                past[xi][edge(*ids.last().unwrap())] += m.stationary()[first] * weight;
            }
            let y = group.evaluate(gens, &word)?;
            if let Some(yi) = sphere_set.get(y.normal_form()) {
                for e in 0..m.symbols().len() {
                    let p = m.transition(e, first);
                    if p > 0.0 {
                        future[yi][edge(e)] += p * weight;
                    }
                }
            }
            Ok(())
        })?;
    }

    if radius > 0 {
        let ball = Ball::explore(group, group.base(), radius, usize::MAX)?;
        let spread = |table: &Vec<Vec<f64>>| -> Result<Vec<Vec<f64>>> {
            let mut out = vec![vec![0.0; dim]; sphere.len()];
            let mut buf = Word::new();
            for (i, x) in sphere.iter().enumerate() {
                for g in ball.elements().iter() {
                    group.multiply_into(x, g, &mut buf)?;
                    if let Some(j) = sphere_set.get(&buf) {
                        for (o, t) in out[i].iter_mut().zip(&table[j]) {
                            *o += t;
                        }
                    }
                }
            }
            Ok(out)
        };
        past = spread(&past)?;
        future = spread(&future)?;
    }

    let scale = (2.0 * v * n as f64).exp();
    let past = group_vectors(&past);
    let future = group_vectors(&future);
    let distinct = past.len() as u128 * future.len() as u128;
    if distinct > budget as u128 {
        return Err(Error::ResourceLimit { budget });
    }
    let mut zero_pairs = 0u128;
    let mut max_ratio = 0.0f64;
    let mut min_positive_ratio = f64::INFINITY;
    let mut total = 0.0f64;
    for (b, cb) in &past {
        for (f, cf) in &future {
            let mass: f64 = b
                .iter()
                .zip(f)
                .map(|(x, y)| f64::from_bits(*x) * f64::from_bits(*y))
                .sum();
            let count = *cb as u128 * *cf as u128;
            let ratio = mass * scale;
            if mass == 0.0 {
                zero_pairs += count;
            } else {
                min_positive_ratio = min_positive_ratio.min(ratio);
            }
            max_ratio = max_ratio.max(ratio);
            total += ratio * count as f64;
        }
    }
    let pairs = sphere.len() as u128 * sphere.len() as u128;
    Ok(CodingReport {
        n,
        radius,
        growth_rate: v,
        sphere_size: sphere.len(),
        pairs,
        zero_pairs,
        max_ratio,
        min_positive_ratio,
        mean_ratio: total / pairs as f64,
    })
}

/// Distinct vectors (as bit patterns) with multiplicities.
fn group_vectors(rows: &[Vec<f64>]) -> BTreeMap<Vec<u64>, usize> {
    let mut out = BTreeMap::new();
    for row in rows {
        *out.entry(row.iter().map(|x| x.to_bits()).collect())
            .or_insert(0) += 1;
    }
    out
}

/// Calls `f(ids, weight)` for every block of `n` recoded symbols in the
/// support of `m`, with `weight` the product of its transition probabilities.
fn for_each_block(
    m: &MarkovMeasure,
    n: usize,
    mut f: impl FnMut(&[usize], f64) -> Result<()>,
) -> Result<()> {
    let mut ids: Vec<usize> = Vec::with_capacity(n);
    let mut weights: Vec<f64> = Vec::with_capacity(n);
    let mut next: Vec<usize> = Vec::with_capacity(n);
    let roots: Vec<usize> = (0..m.symbols().len())
        .filter(|&i| m.stationary()[i] > 0.0)
        .collect();
    for root in roots {
        ids.clear();
        weights.clear();
        next.clear();
        ids.push(root);
        weights.push(1.0);
        next.push(0);
        while let Some(&top) = ids.last() {
            if ids.len() == n {
                f(&ids, *weights.last().unwrap())?;
                ids.pop();
                weights.pop();
                next.pop();
                continue;
            }
            let k = next.last_mut().unwrap();
            let succ = m.successors(top);
            if *k >= succ.len() {
                ids.pop();
                weights.pop();
                next.pop();
                continue;
            }
            let (j, p) = (succ[*k], m.transitions_from(top)[*k]);
            *k += 1;
            if p > 0.0 {
                let w = weights.last().unwrap() * p;
                ids.push(j);
                weights.push(w);
                next.push(0);
            }
        }
    }
    Ok(())
}
