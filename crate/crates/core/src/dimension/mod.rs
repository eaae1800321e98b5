//! Drift along typical geodesics, shadow masses of the sphere-counting
//! measure, regular growth, and the dimension of that measure in a foreign
//! word-metric gauge.

mod ray;
mod shadow;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

pub use ray::{drift, drift_bilateral, DriftEstimate, RaySample, RaySampler};
pub use shadow::{shadow_mass, ShadowMass};

use crate::automaton::GeodesicAutomaton;
use crate::distortion::{mean_distortion_mc, ForeignLength, LengthOptions, McEstimate};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::rng::stream_rng;
use crate::sft::growth_rate;

/// Natural logarithm of a big integer.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        x.to_f64().unwrap().ln()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularGrowth {
    pub gr: f64,
    /// `|S_n| exp(-gr n)` for `n = 0..=n_max`.
    pub values: Vec<f64>,
    /// Extremes over `1 <= n <= n_max`.
    pub c1: f64,
    pub c2: f64,
}

/// `|S_n| exp(-gr n)` from the automaton's path counts.
pub fn regular_growth_check(aut: &GeodesicAutomaton, n_max: usize) -> Result<RegularGrowth> {
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be at least 1".into()));
    }
    let gr = growth_rate(aut)?.gr;
    let values: Vec<f64> = aut
        .sphere_counts(n_max)
        .iter()
        .enumerate()
        .map(|(n, c)| {
            if c.bits() == 0 {
                0.0
            } else {
                (ln_biguint(c) - gr * n as f64).exp()
            }
        })
        .collect();
    let c1 = values[1..].iter().copied().fold(f64::INFINITY, f64::min);
    let c2 = values[1..].iter().copied().fold(0.0, f64::max);
    Ok(RegularGrowth { gr, values, c1, c2 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionParams {
    pub n_list: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    /// Rays whose local dimensions are listed.
    pub diagnostic_rays: usize,
    pub length: LengthOptions,
}

impl Default for DimensionParams {
    fn default() -> Self {
        DimensionParams {
            n_list: vec![10, 20, 40],
            samples: 2000,
            seed: 0,
            diagnostic_rays: 20,
            length: LengthOptions::default(),
        }
    }
}

/// `gr_S k / |x_k|_T` at step `k` of a sampled ray.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalDimension {
    pub ray: usize,
    pub k: usize,
    pub length_sstar: u32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub gr_s: f64,
    pub gr_sstar: f64,
    /// Uniform-sphere estimate of the mean distortion.
    pub tau: McEstimate,
    /// The same limit along rays of the equilibrium measure.
    pub drift: Vec<DriftEstimate>,
    pub drift_mean: f64,
    pub drift_half_width: f64,
    /// `gr_s / tau_hat` and the propagated half-width.
    pub dim_hat: f64,
    pub width: f64,
    /// `gr_s / drift_mean` and its half-width.
    pub dim_hat_drift: f64,
    pub width_drift: f64,
    /// `|drift - tau_hat| / sqrt(se_drift^2 + se_tau^2)` at the largest radius.
    pub z_drift_tau: f64,
    /// `dim_hat <= gr_sstar + width`.
    pub below_target_growth: bool,
    pub local_dimensions: Vec<LocalDimension>,
}

impl DimensionEstimate {
    pub fn csv(&self) -> String {
        let mut out = String::from("ray,k,length_sstar,local_dimension\n");
        for l in &self.local_dimensions {
            out.push_str(&format!(
                "{},{},{},{:.17e}\n",
                l.ray, l.k, l.length_sstar, l.value
            ));
        }
        out
    }
}

/// Half-width of `g / t` for `t` known to within `h`.
fn quotient_width(g: f64, t: f64, h: f64) -> f64 {
    if h == 0.0 {
        0.0
    } else if h >= t {
        f64::INFINITY
    } else {
        g * h / (t * (t - h))
    }
}

/// Dimension of the sphere-counting measure of `aut_s.gens()` in the gauge
/// of `aut_sstar.gens()`.
pub fn ps_dimension_estimate(
    group: &Group,
    aut_s: &GeodesicAutomaton,
    aut_sstar: &GeodesicAutomaton,
    params: &DimensionParams,
) -> Result<DimensionEstimate> {
    let gr_s = growth_rate(aut_s)?.gr;
    let gr_sstar = growth_rate(aut_sstar)?.gr;
    let length = ForeignLength::new(group, aut_s.gens(), aut_sstar.gens(), &params.length)?;
    let tau = mean_distortion_mc(aut_s, &length, &params.n_list, params.samples, params.seed)?;
    let sampler = RaySampler::new(aut_s)?;
    let mut n_sorted = params.n_list.clone();
    n_sorted.sort_unstable();
    n_sorted.dedup();
    let drift_rows = n_sorted
        .iter()
        .map(|&n| drift(&sampler, &length, n, params.samples, params.seed))
        .collect::<Result<Vec<_>>>()?;
    let last = drift_rows.last().unwrap();
    let spread = match drift_rows.len() {
        1 => 0.0,
        k => (last.mean - drift_rows[k - 2].mean).abs(),
    };
    let drift_mean = last.mean;
    let drift_half_width = 3.0 * last.stderr + spread;
    let tau_last = tau.rows.last().unwrap();
    let se = (last.stderr.powi(2) + tau_last.stderr.powi(2)).sqrt();
    let diff = (drift_mean - tau.tau_hat).abs();
    let z_drift_tau = if diff <= 1e-12 { 0.0 } else { diff / se };

    let n = *n_sorted.last().unwrap();
    let checkpoints: Vec<usize> = (1..=4).map(|j| (n * j / 4).max(1)).collect();
    let mut rng = stream_rng(params.seed, ray::DIAGNOSTIC_STREAM);
    let mut local_dimensions = Vec::new();
    for r in 0..params.diagnostic_rays {
        let ray = sampler.sample(n, &mut rng)?;
        let lengths = length.lengths_along(&ray.word)?;
        for &k in &checkpoints {
            local_dimensions.push(LocalDimension {
                ray: r,
                k,
                length_sstar: lengths[k],
                value: gr_s * k as f64 / lengths[k] as f64,
            });
        }
    }
    let dim_hat = gr_s / tau.tau_hat;
    let width = quotient_width(gr_s, tau.tau_hat, tau.half_width);
    Ok(DimensionEstimate {
        gr_s,
        gr_sstar,
        dim_hat,
        width,
        dim_hat_drift: gr_s / drift_mean,
        width_drift: quotient_width(gr_s, drift_mean, drift_half_width),
        below_target_growth: dim_hat <= gr_sstar + width,
        tau,
        drift: drift_rows,
        drift_mean,
        drift_half_width,
        z_drift_tau,
        local_dimensions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::build_geodesic_automaton;
    use crate::group::{parse_presentation, DEFAULT_BUDGET};

    #[test]
    fn free_group_regular_growth() {
        let g = Group::free(&["a", "b"]).unwrap();
        let aut = build_geodesic_automaton(&g, g.base(), 1, 6, DEFAULT_BUDGET).unwrap();
        let rg = regular_growth_check(&aut, 30).unwrap();
        assert_eq!(rg.values[0], 1.0);
        assert!((rg.c1 - 4.0 / 3.0).abs() < 1e-9 && (rg.c2 - 4.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn big_logarithms() {
        let x = BigUint::from(3u32).pow(2000);
        assert!((ln_biguint(&x) - 2000.0 * 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn self_gauge_dimension_is_the_growth_rate() {
        let g = parse_presentation(include_str!("../../groups/f2.grp")).unwrap();
        let aut = build_geodesic_automaton(&g, g.base(), 1, 6, DEFAULT_BUDGET).unwrap();
        let params = DimensionParams {
            n_list: vec![5, 10],
            samples: 200,
            diagnostic_rays: 3,
            ..DimensionParams::default()
        };
        let est = ps_dimension_estimate(&g, &aut, &aut, &params).unwrap();
        assert!((est.dim_hat - 3f64.ln()).abs() < 1e-12);
        assert_eq!(est.width, 0.0);
        assert_eq!(est.drift_mean, 1.0);
        assert_eq!(est.local_dimensions.len(), 12);
        assert!(est.below_target_growth);
    }
}
