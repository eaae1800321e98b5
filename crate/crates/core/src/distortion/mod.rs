//! Mean distortion `tau(T/S)` of one word metric against another: exact
//! sphere averages, Monte Carlo estimates, the growth-ratio inequality, the
//! law of large numbers, and a scan for rough similarity.

mod exact;
mod length;
mod mc;
mod similarity;

use serde::Serialize;

pub(crate) use exact::ratio_to_f64;
pub use exact::{mean_distortion_exact, ExactExpectation};
pub use length::{lipschitz_constant, ForeignLength, LengthMethod, LengthOptions};
pub(crate) use mc::mean_stderr;
pub use mc::{
    check_growth_inequality, lln_check, mean_distortion_mc, InequalityVerdict, LlnRow, LlnTable,
    LlnTrend, McEstimate, McRow, INEQUALITY_TOL, MIN_SAMPLES,
};
pub use similarity::{
    rough_similarity_scan, RayDeviation, SimilarityScan, SimilarityVerdict, FLATNESS_TOL,
};

use crate::automaton::GeodesicAutomaton;
use crate::error::Result;
use crate::group::{Group, Word};
use crate::sft::growth_rate;

/// Standard errors within which exact and sampled means must agree.
pub const AGREEMENT_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionParams {
    /// Exact expectations for `n <= exact_max`.
    pub exact_max: usize,
    pub n_list: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    /// Law-of-large-numbers grid; skipped when empty.
    pub lln_n_list: Vec<usize>,
    pub eps_list: Vec<f64>,
    pub lln_samples: usize,
    /// Similarity scan radius; skipped when 0.
    pub similarity_radius: usize,
    pub similarity_margin: usize,
    /// Base words whose powers the similarity scan follows.
    pub rays: Vec<String>,
    pub length: LengthOptions,
}

impl Default for DistortionParams {
    fn default() -> Self {
        DistortionParams {
            exact_max: 6,
            n_list: vec![10, 20, 40],
            samples: 2000,
            seed: 0,
            lln_n_list: Vec::new(),
            eps_list: vec![0.02, 0.05, 0.1],
            lln_samples: 2000,
            similarity_radius: 0,
            similarity_margin: 2,
            rays: Vec::new(),
            length: LengthOptions::default(),
        }
    }
}

/// Exact against sampled mean at one radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Agreement {
    pub n: usize,
    pub exact: f64,
    pub mc: f64,
    pub stderr: f64,
    /// `|exact - mc| / stderr`; 0 when both agree exactly.
    pub z: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionReport {
    pub from: String,
    pub to: String,
    pub method: LengthMethod,
    pub lip: u32,
    pub exact: Vec<ExactExpectation>,
    pub mc: McEstimate,
    pub agreement: Vec<Agreement>,
    pub gr_s: f64,
    pub gr_sstar: f64,
    pub inequality: InequalityVerdict,
    /// Every sampled ratio lies in `[1/lip, lip]`.
    pub lipschitz_envelope: bool,
    pub lln: Option<LlnTable>,
    pub similarity: Option<SimilarityScan>,
}

impl DistortionReport {
    /// The `(n, exact, mc_mean, mc_stderr, samples)` table, one row per radius
    /// that has either value.
    pub fn csv(&self) -> String {
        let mut ns: Vec<usize> = self
            .exact
            .iter()
            .map(|e| e.n)
            .chain(self.mc.rows.iter().map(|r| r.n))
            .collect();
        ns.sort_unstable();
        ns.dedup();
        let mut out = String::from("n,exact,mc_mean,mc_stderr,samples\n");
        for n in ns {
            let exact = self
                .exact
                .iter()
                .find(|e| e.n == n && n > 0)
                .map(|e| format!("{:.17e}", e.per_letter()))
                .unwrap_or_default();
            let (mean, se, samples) = self
                .mc
                .rows
                .iter()
                .find(|r| r.n == n)
                .map(|r| {
                    (
                        format!("{:.17e}", r.mean),
                        format!("{:.17e}", r.stderr),
                        r.samples.to_string(),
                    )
                })
                .unwrap_or_default();
            out.push_str(&format!("{n},{exact},{mean},{se},{samples}\n"));
        }
        out
    }
}

/// The full comparison of `aut_s.gens()` against `aut_sstar.gens()`.
pub fn distortion_report(
    group: &Group,
    aut_s: &GeodesicAutomaton,
    aut_sstar: &GeodesicAutomaton,
    params: &DistortionParams,
) -> Result<DistortionReport> {
    let s = aut_s.gens();
    let sstar = aut_sstar.gens();
    let length = ForeignLength::new(group, s, sstar, &params.length)?;
    let lip = lipschitz_constant(group, s, sstar, params.length.cap, params.length.budget)?;
    let exact = mean_distortion_exact(
        aut_s,
        group,
        sstar,
        params.exact_max,
        params.length.cap,
        params.length.budget,
    )?;
    let mc = mean_distortion_mc(aut_s, &length, &params.n_list, params.samples, params.seed)?;
    let agreement = mc
        .rows
        .iter()
        .filter_map(|row| {
            let e = exact.iter().find(|e| e.n == row.n)?;
            let diff = (e.per_letter() - row.mean).abs();
            let z = if diff <= 1e-12 {
                0.0
            } else {
                diff / row.stderr
            };
            Some(Agreement {
                n: row.n,
                exact: e.per_letter(),
                mc: row.mean,
                stderr: row.stderr,
                z,
                ok: z <= AGREEMENT_SIGMAS,
            })
        })
        .collect();
    let gr_s = growth_rate(aut_s)?.gr;
    let gr_sstar = growth_rate(aut_sstar)?.gr;
    let inequality = check_growth_inequality(mc.tau_hat, mc.half_width, gr_s, gr_sstar);
    let lip_f = lip as f64;
    let lipschitz_envelope = mc
        .rows
        .iter()
        .all(|r| r.min_ratio >= 1.0 / lip_f - 1e-12 && r.max_ratio <= lip_f + 1e-12);
    let lln = if params.lln_n_list.is_empty() {
        None
    } else {
        Some(lln_check(
            aut_s,
            &length,
            mc.tau_hat,
            &params.lln_n_list,
            &params.eps_list,
            params.lln_samples,
            params.seed,
        )?)
    };
    let similarity = if params.similarity_radius == 0 {
        None
    } else {
        let rays = params
            .rays
            .iter()
            .map(|w| group.base().parse_word(w))
            .collect::<Result<Vec<Word>>>()?;
        Some(rough_similarity_scan(
            group,
            sstar,
            mc.tau_hat,
            params.similarity_radius,
            params.similarity_margin,
            &rays,
            params.length.budget,
        )?)
    };
    Ok(DistortionReport {
        from: s.name().to_string(),
        to: sstar.name().to_string(),
        method: length.method(),
        lip,
        exact,
        mc,
        agreement,
        gr_s,
        gr_sstar,
        inequality,
        lipschitz_envelope,
        lln,
        similarity,
    })
}
