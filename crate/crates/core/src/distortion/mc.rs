use serde::Serialize;

use super::ForeignLength;
use crate::automaton::{GeodesicAutomaton, SphereSampler};
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Least number of samples per radius.
pub const MIN_SAMPLES: usize = 100;
/// Slack on the growth inequality.
pub const INEQUALITY_TOL: f64 = 1e-6;

/// Stream offsets keep the samplers of different estimators independent.
pub(crate) const MC_STREAM: u64 = 0;
pub(crate) const LLN_STREAM: u64 = 1 << 32;

/// Sample mean and standard error of `|x|_T / n` over the sphere of radius `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McRow {
    pub n: usize,
    pub samples: usize,
    pub mean: f64,
    pub stderr: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub rows: Vec<McRow>,
    /// Mean at the largest radius.
    pub tau_hat: f64,
    /// Three standard errors at the largest radius plus the spread between
    /// the means at the two largest radii.
    pub half_width: f64,
}

/// Mean and standard error of a sample.
pub(crate) fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Lengths `|x|_T` of `samples` uniform elements of the sphere of radius `n`,
/// drawn from stream `stream` of `seed`.
pub(crate) fn sample_lengths(
    aut: &GeodesicAutomaton,
    length: &ForeignLength,
    n: usize,
    samples: usize,
    seed: u64,
    stream: u64,
) -> Result<Vec<u32>> {
    let sampler = SphereSampler::new(aut, n)?;
    let mut rng = stream_rng(seed, stream);
    (0..samples)
        .map(|_| length.length(&sampler.sample_word(&mut rng)))
        .collect()
}

pub fn mean_distortion_mc(
    aut: &GeodesicAutomaton,
    length: &ForeignLength,
    n_list: &[usize],
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::Precondition(format!(
            "need at least {MIN_SAMPLES} samples per radius"
        )));
    }
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(Error::Precondition("radii must be positive".into()));
    }
    let mut n_sorted = n_list.to_vec();
    n_sorted.sort_unstable();
    n_sorted.dedup();
    let mut rows = Vec::with_capacity(n_sorted.len());
    for &n in &n_sorted {
        let lengths = sample_lengths(aut, length, n, samples, seed, MC_STREAM + n as u64)?;
        let ratios: Vec<f64> = lengths.iter().map(|&l| l as f64 / n as f64).collect();
        let (mean, stderr) = mean_stderr(&ratios);
        rows.push(McRow {
            n,
            samples,
            mean,
            stderr,
            min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
            max_ratio: ratios.iter().copied().fold(0.0, f64::max),
        });
    }
    let last = rows.last().unwrap();
    let spread = match rows.len() {
        1 => 0.0,
        k => (last.mean - rows[k - 2].mean).abs(),
    };
    Ok(McEstimate {
        tau_hat: last.mean,
        half_width: 3.0 * last.stderr + spread,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityVerdict {
    pub tau_hat: f64,
    pub half_width: f64,
    pub gr_s: f64,
    pub gr_sstar: f64,
    /// `gr_s / gr_sstar`.
    pub lower_bound: f64,
    /// `tau_hat - lower_bound`.
    pub margin: f64,
    /// `tau_hat + half_width >= lower_bound - 1e-6`.
    pub pass: bool,
    /// `margin > half_width`.
    pub strict: bool,
}

pub fn check_growth_inequality(
    tau_hat: f64,
    half_width: f64,
    gr_s: f64,
    gr_sstar: f64,
) -> InequalityVerdict {
    let lower_bound = gr_s / gr_sstar;
    let margin = tau_hat - lower_bound;
    InequalityVerdict {
        tau_hat,
        half_width,
        gr_s,
        gr_sstar,
        lower_bound,
        margin,
        pass: tau_hat + half_width >= lower_bound - INEQUALITY_TOL,
        strict: margin > half_width,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LlnRow {
    pub n: usize,
    pub eps: f64,
    pub samples: usize,
    pub outliers: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LlnTrend {
    pub eps: f64,
    /// Each fraction is at most the previous one plus two binomial standard
    /// deviations of their difference.
    pub nonincreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LlnTable {
    pub tau_hat: f64,
    pub rows: Vec<LlnRow>,
    pub trends: Vec<LlnTrend>,
}

/// Fractions of sampled `x` in the sphere of radius `n` with
/// `| |x|_T - n tau_hat | > eps n`, one sample set per radius shared by all
/// `eps`.
pub fn lln_check(
    aut: &GeodesicAutomaton,
    length: &ForeignLength,
    tau_hat: f64,
    n_list: &[usize],
    eps_list: &[f64],
    samples: usize,
    seed: u64,
) -> Result<LlnTable> {
    if samples == 0 {
        return Err(Error::Precondition("samples must be positive".into()));
    }
    let mut n_sorted = n_list.to_vec();
    n_sorted.sort_unstable();
    n_sorted.dedup();
    let mut rows = Vec::new();
    for &n in &n_sorted {
        let lengths = sample_lengths(aut, length, n, samples, seed, LLN_STREAM + n as u64)?;
        for &eps in eps_list {
            let outliers = lengths
                .iter()
                .filter(|&&l| (l as f64 - n as f64 * tau_hat).abs() > eps * n as f64)
                .count();
            rows.push(LlnRow {
                n,
                eps,
                samples,
                outliers,
                fraction: outliers as f64 / samples as f64,
            });
        }
    }
    let trends = eps_list
        .iter()
        .map(|&eps| {
            let fr: Vec<&LlnRow> = rows.iter().filter(|r| r.eps == eps).collect();
            let nonincreasing = fr.windows(2).all(|w| {
                let var = |r: &LlnRow| r.fraction * (1.0 - r.fraction) / r.samples as f64;
                w[1].fraction <= w[0].fraction + 2.0 * (var(w[0]) + var(w[1])).sqrt()
            });
            LlnTrend { eps, nonincreasing }
        })
        .collect();
    Ok(LlnTable {
        tau_hat,
        rows,
        trends,
    })
}
