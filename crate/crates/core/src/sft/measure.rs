use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rustc_hash::FxHashMap;
use serde::Serialize;

use super::{perron, ComponentDecomposition, Potential, RecodedComponent, Sft};
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// A shift-invariant Markov measure on the blocks of one component.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovMeasure {
    block_length: usize,
    symbols: Vec<Vec<usize>>,
    successors: Vec<Vec<usize>>,
    /// `transition[i][k]` is the probability of `successors[i][k]`.
    transition: Vec<Vec<f64>>,
    stationary: Vec<f64>,
    /// Pressure of the potential when this is its equilibrium measure.
    pressure: Option<f64>,
    index: FxHashMap<Vec<usize>, usize>,
}

impl MarkovMeasure {
    fn new(
        rc: &RecodedComponent,
        transition: Vec<Vec<f64>>,
        stationary: Vec<f64>,
        pressure: Option<f64>,
    ) -> Self {
        let index = rc
            .symbols
            .iter()
            .enumerate()
            .map(|(i, b)| (b.clone(), i))
            .collect();
        MarkovMeasure {
            block_length: rc.block_length,
            symbols: rc.symbols.clone(),
            successors: rc.successors.clone(),
            transition,
            stationary,
            pressure,
            index,
        }
    }

    pub fn block_length(&self) -> usize {
        self.block_length
    }

    pub fn symbols(&self) -> &[Vec<usize>] {
        &self.symbols
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.successors[i]
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn pressure(&self) -> Option<f64> {
        self.pressure
    }

    pub fn index_of(&self, block: &[usize]) -> Option<usize> {
        self.index.get(block).copied()
    }

    /// Transition probability between recoded symbols; 0 if not allowed.
    pub fn transition(&self, i: usize, j: usize) -> f64 {
        self.successors[i]
            .iter()
            .position(|&s| s == j)
            .map_or(0.0, |k| self.transition[i][k])
    }

    /// Transition probabilities out of `i`, parallel to [`MarkovMeasure::successors`].
    pub fn transitions_from(&self, i: usize) -> &[f64] {
        &self.transition[i]
    }

    /// `-sum_i pi_i sum_j P_ij log P_ij`.
    pub fn entropy(&self) -> f64 {
        self.stationary
            .iter()
            .zip(&self.transition)
            .map(|(pi, row)| {
                pi * row
                    .iter()
                    .filter(|&&p| p > 0.0)
                    .map(|p| -p * p.ln())
                    .sum::<f64>()
            })
            .sum()
    }

    /// `sum_i pi_i w_i` for per-symbol values `w`.
    pub fn integral(&self, w: &[f64]) -> f64 {
        self.stationary.iter().zip(w).map(|(p, x)| p * x).sum()
    }

    /// Measure of the cylinder of original symbols `block` at time 0.
    /// Blocks shorter than the recoding length sum over their extensions.
    pub fn cylinder(&self, block: &[usize]) -> f64 {
        let k = self.block_length;
        if block.len() < k {
            return self
                .symbols
                .iter()
                .zip(&self.stationary)
                .filter(|(s, _)| s.starts_with(block))
                .map(|(_, p)| p)
                .sum();
        }
        let mut ids = Vec::with_capacity(block.len() + 1 - k);
        for w in block.windows(k) {
            match self.index_of(w) {
                Some(i) => ids.push(i),
                None => return 0.0,
            }
        }
        self.path_measure(&ids)
    }

    /// Measure of a cylinder given as consecutive recoded symbols.
    pub fn path_measure(&self, ids: &[usize]) -> f64 {
        let Some(&first) = ids.first() else {
            return 1.0;
        };
        ids.windows(2).fold(self.stationary[first], |acc, w| {
            acc * self.transition(w[0], w[1])
        })
    }

    /// Text form: symbols, stationary vector and transition matrix with
    /// 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "markov-measure 1").unwrap();
        writeln!(out, "block_length {}", self.block_length).unwrap();
        if let Some(p) = self.pressure {
            writeln!(out, "pressure {p:.16e}").unwrap();
        }
        for (i, (s, p)) in self.symbols.iter().zip(&self.stationary).enumerate() {
            let s: Vec<String> = s.iter().map(|e| e.to_string()).collect();
            writeln!(out, "symbol {i} {} {p:.16e}", s.join(" ")).unwrap();
        }
        for (i, (succ, probs)) in self.successors.iter().zip(&self.transition).enumerate() {
            for (j, p) in succ.iter().zip(probs) {
                writeln!(out, "transition {i} {j} {p:.16e}").unwrap();
            }
        }
        out
    }
}

impl Serialize for MarkovMeasure {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Edge {
            from: usize,
            to: usize,
            p: f64,
        }
        #[derive(Serialize)]
        struct Repr<'a> {
            block_length: usize,
            pressure: Option<f64>,
            entropy: f64,
            symbols: &'a [Vec<usize>],
            stationary: &'a [f64],
            transitions: Vec<Edge>,
        }
        let transitions = self
            .successors
            .iter()
            .zip(&self.transition)
            .enumerate()
            .flat_map(|(from, (succ, probs))| {
                succ.iter()
                    .zip(probs)
                    .map(move |(&to, &p)| Edge { from, to, p })
            })
            .collect();
        Repr {
            block_length: self.block_length,
            pressure: self.pressure,
            entropy: self.entropy(),
            symbols: &self.symbols,
            stationary: &self.stationary,
            transitions,
        }
        .serialize(serializer)
    }
}

/// The equilibrium measure of `psi` on component `c`:
/// `P(e, e') = exp(psi(e)) r(e') / (lambda r(e))` and `pi = l r`.
pub fn parry_gibbs_measure(
    sft: &Sft,
    dec: &ComponentDecomposition,
    c: usize,
    psi: &Potential,
) -> Result<MarkovMeasure> {
    let rc = RecodedComponent::new(sft, &dec.components[c], psi)?;
    let sol = perron(&rc)?;
    let shift = rc.weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lambda_shifted = (sol.log_lambda - shift).exp();
    let transition = (0..rc.len())
        .map(|i| {
            let a = (rc.weights[i] - shift).exp() / (lambda_shifted * sol.right[i]);
            let row: Vec<f64> = rc.successors[i].iter().map(|&j| a * sol.right[j]).collect();
            let total: f64 = row.iter().sum();
            row.into_iter().map(|p| p / total).collect()
        })
        .collect();
    let mut stationary: Vec<f64> = sol
        .left
        .iter()
        .zip(&sol.right)
        .map(|(l, r)| l * r)
        .collect();
    let total: f64 = stationary.iter().sum();
    stationary.iter_mut().for_each(|p| *p /= total);
    Ok(MarkovMeasure::new(
        &rc,
        transition,
        stationary,
        Some(sol.log_lambda),
    ))
}

/// Stationary vector of an irreducible stochastic matrix by solving
/// `pi (P - I) = 0` with one equation replaced by `sum pi = 1`.
fn stationary_vector(successors: &[Vec<usize>], transition: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = successors.len();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        a[(i, i)] -= 1.0;
        for (&j, &p) in successors[i].iter().zip(&transition[i]) {
            a[(j, i)] += p;
        }
    }
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Precondition("singular stationary system".into()))?;
    Ok(pi.iter().copied().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationalReport {
    pub pressure: f64,
    /// `h + integral of psi` for the equilibrium measure.
    pub equilibrium_value: f64,
    pub equilibrium_gap: f64,
    pub trials: usize,
    /// Largest `h + integral of psi` over random Markov measures.
    pub best_random_value: f64,
    /// Random measures exceeding the pressure by more than 1e-9.
    pub violations: usize,
}

impl VariationalReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.equilibrium_gap <= tol && self.violations == 0
    }
}

/// Compares the pressure with `h + integral of psi` for the equilibrium
/// measure and for `trials` random Markov measures supported on the
/// component's allowed transitions.
pub fn check_variational(
    sft: &Sft,
    dec: &ComponentDecomposition,
    c: usize,
    psi: &Potential,
    trials: usize,
    seed: u64,
) -> Result<VariationalReport> {
    let rc = RecodedComponent::new(sft, &dec.components[c], psi)?;
    let eq = parry_gibbs_measure(sft, dec, c, psi)?;
    let pressure = eq.pressure.unwrap();
    let equilibrium_value = eq.entropy() + eq.integral(&rc.weights);
    let mut rng = stream_rng(seed, 0);
    let mut best_random_value = f64::NEG_INFINITY;
    let mut violations = 0;
    for _ in 0..trials {
        let transition: Vec<Vec<f64>> = rc
            .successors
            .iter()
            .map(|succ| {
                // weights in (0, 1] keep every allowed transition
                let row: Vec<f64> = succ.iter().map(|_| 1.0 - rng.random::<f64>()).collect();
                let total: f64 = row.iter().sum();
                row.into_iter().map(|p| p / total).collect()
            })
            .collect();
        let stationary = stationary_vector(&rc.successors, &transition)?;
        let m = MarkovMeasure::new(&rc, transition, stationary, None);
        let value = m.entropy() + m.integral(&rc.weights);
        best_random_value = best_random_value.max(value);
        if value > pressure + 1e-9 {
            violations += 1;
        }
    }
    Ok(VariationalReport {
        pressure,
        equilibrium_value,
        equilibrium_gap: (equilibrium_value - pressure).abs(),
        trials,
        best_random_value,
        violations,
    })
}

/// Extreme values of `mu[block] / exp(-n P + S_n psi)` over allowed blocks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GibbsScan {
    pub c1: f64,
    pub c2: f64,
    /// `(n, min, max)` for each block length.
    pub by_length: Vec<(usize, f64, f64)>,
    pub blocks: usize,
}

/// Scans every allowed block of `1..=n_max` recoded symbols. Fails with
/// [`Error::ResourceLimit`] beyond `budget` blocks.
pub fn gibbs_ratio_scan(
    m: &MarkovMeasure,
    psi: &Potential,
    n_max: usize,
    budget: usize,
) -> Result<GibbsScan> {
    let pressure = m
        .pressure
        .ok_or_else(|| Error::Precondition("measure is not an equilibrium measure".into()))?;
    let weights = m
        .symbols
        .iter()
        .map(|s| match psi {
            Potential::Block { .. } => psi.value(s),
            _ => psi.value(&s[..1]),
        })
        .collect::<Result<Vec<_>>>()?;
    let mut by_length: Vec<(usize, f64, f64)> =
        (1..=n_max).map(|n| (n, f64::INFINITY, 0.0)).collect();
    let mut blocks = 0usize;
    // (symbol, depth, log mu, S_n psi)
    let mut stack: Vec<(usize, usize, f64, f64)> = (0..m.symbols.len())
        .filter(|&i| m.stationary[i] > 0.0)
        .map(|i| (i, 1, m.stationary[i].ln(), weights[i]))
        .collect();
    while let Some((i, n, log_mu, sum)) = stack.pop() {
        blocks += 1;
        if blocks > budget {
            return Err(Error::ResourceLimit { budget });
        }
        let ratio = (log_mu + n as f64 * pressure - sum).exp();
        let entry = &mut by_length[n - 1];
        entry.1 = entry.1.min(ratio);
        entry.2 = entry.2.max(ratio);
        if n < n_max {
            for (&j, &p) in m.successors[i].iter().zip(&m.transition[i]) {
                if p > 0.0 {
                    stack.push((j, n + 1, log_mu + p.ln(), sum + weights[j]));
                }
            }
        }
    }
    let c1 = by_length.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let c2 = by_length.iter().map(|r| r.2).fold(0.0, f64::max);
    Ok(GibbsScan {
        c1,
        c2,
        by_length,
        blocks,
    })
}
