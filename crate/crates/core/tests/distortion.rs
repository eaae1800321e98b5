use geoflow::automaton::{build_geodesic_automaton, GeodesicAutomaton};
use geoflow::battery::{F2, PSL2Z};
use geoflow::dimension::{
    drift_bilateral, ps_dimension_estimate, shadow_mass, DimensionParams, RaySampler,
};
use geoflow::distortion::{
    distortion_report, lln_check, mean_distortion_exact, mean_distortion_mc, DistortionParams,
    ForeignLength, LengthOptions,
};
use geoflow::group::{
    estimate_delta, parse_presentation, Group, HalfInteger, DEFAULT_BUDGET, DEFAULT_CAP,
};
use geoflow::rng::stream_rng;
use geoflow::sft::growth_rate;
use rand::seq::SliceRandom;

fn automaton(g: &Group, gens: &str) -> GeodesicAutomaton {
    build_geodesic_automaton(g, g.generating_set(gens).unwrap(), 1, 8, DEFAULT_BUDGET).unwrap()
}

fn length(g: &Group, from: &str, to: &str) -> ForeignLength {
    ForeignLength::new(
        g,
        g.generating_set(from).unwrap(),
        g.generating_set(to).unwrap(),
        &LengthOptions::default(),
    )
    .unwrap()
}

#[test]
fn enlarging_the_generators_only_shortens() {
    for (text, to) in [(F2, "Sstar"), (F2, "Ssq"), (PSL2Z, "Sstar")] {
        let g = parse_presentation(text).unwrap();
        let aut = automaton(&g, "S");
        let exact = mean_distortion_exact(
            &aut,
            &g,
            g.generating_set(to).unwrap(),
            6,
            DEFAULT_CAP,
            DEFAULT_BUDGET,
        )
        .unwrap();
        for e in &exact {
            assert!(e.mean_length_f64() <= e.n as f64 + 1e-12, "{to}: {e:?}");
        }
    }
}

/// Sampling `S*` spheres and measuring in `S`, then the reverse, the two
/// mean distortions multiply to at least 1 up to their sampling widths.
#[test]
fn reciprocal_distortions_multiply_past_one() {
    for text in [F2, PSL2Z] {
        let g = parse_presentation(text).unwrap();
        let aut_s = automaton(&g, "S");
        let aut_sstar = automaton(&g, "Sstar");
        let forward =
            mean_distortion_mc(&aut_s, &length(&g, "S", "Sstar"), &[10, 20], 1000, 3).unwrap();
        let back =
            mean_distortion_mc(&aut_sstar, &length(&g, "Sstar", "S"), &[10, 20], 1000, 3).unwrap();
        let product = forward.tau_hat * back.tau_hat;
        let slack = forward.half_width * back.tau_hat + back.half_width * forward.tau_hat;
        assert!(product >= 1.0 - slack, "{product} with slack {slack}");
        assert!(back.tau_hat >= 1.0 - back.half_width);
    }
}

#[test]
fn reports_stay_inside_the_lipschitz_envelope() {
    let g = parse_presentation(F2).unwrap();
    let aut_s = automaton(&g, "S");
    let params = DistortionParams {
        n_list: vec![10, 20],
        samples: 500,
        seed: 2,
        exact_max: 4,
        ..DistortionParams::default()
    };
    for to in ["Sstar", "Ssq"] {
        let report = distortion_report(&g, &aut_s, &automaton(&g, to), &params).unwrap();
        assert!(report.lipschitz_envelope);
        let lower = 1.0 / report.lip as f64;
        for row in &report.mc.rows {
            assert!(row.min_ratio >= lower - 1e-12 && row.max_ratio <= 1.0 + 1e-12);
        }
        assert!(report.inequality.pass, "{:?}", report.inequality);
    }
}

#[test]
fn no_sample_strays_past_a_full_length() {
    let g = parse_presentation(F2).unwrap();
    let aut = automaton(&g, "S");
    let len = length(&g, "S", "Sstar");
    let table = lln_check(&aut, &len, 0.7, &[10, 20], &[1.0], 500, 4).unwrap();
    assert!(table.rows.iter().all(|r| r.outliers == 0));
    assert!(table.trends.iter().all(|t| t.nonincreasing));
}

#[test]
fn dimension_stays_below_the_target_growth() {
    let params = DimensionParams {
        n_list: vec![10, 20],
        samples: 1000,
        seed: 6,
        diagnostic_rays: 2,
        ..DimensionParams::default()
    };
    for (text, to) in [(F2, "Sstar"), (F2, "Ssq"), (PSL2Z, "Sstar")] {
        let g = parse_presentation(text).unwrap();
        let est =
            ps_dimension_estimate(&g, &automaton(&g, "S"), &automaton(&g, to), &params).unwrap();
        assert!(
            est.below_target_growth,
            "{to}: {} against {}",
            est.dim_hat, est.gr_sstar
        );
        assert!(est.dim_hat >= est.gr_s - 1e-12);
    }
}

#[test]
fn bilateral_drift_agrees_with_sphere_averages() {
    let g = parse_presentation(F2).unwrap();
    let aut = automaton(&g, "S");
    let len = length(&g, "S", "Sstar");
    let tau = mean_distortion_mc(&aut, &len, &[20], 2000, 8).unwrap();
    let sampler = RaySampler::new(&aut).unwrap();
    let d = drift_bilateral(&sampler, &len, 10, 2000, 8).unwrap();
    let z = (d.mean - tau.tau_hat).abs() / (d.stderr.powi(2) + tau.rows[0].stderr.powi(2)).sqrt();
    assert!(
        z <= 4.0,
        "bilateral {} against tau {} (z = {z:.2})",
        d.mean,
        tau.tau_hat
    );
}

/// `e^{gr |x|}` times the shadow mass of `x` stays in a fixed band as `x`
/// and the sphere radius vary.
#[test]
fn shadows_are_sandwiched() {
    for (text, radius) in [(F2, 0), (PSL2Z, 1)] {
        let g = parse_presentation(text).unwrap();
        let aut = automaton(&g, "S");
        let gr = growth_rate(&aut).unwrap().gr;
        let delta = estimate_delta(&g, g.base(), 3, DEFAULT_BUDGET)
            .unwrap()
            .delta;
        let mut rng = stream_rng(9, 0);
        let mut scaled = Vec::new();
        for k in 1..=8 {
            let mut sphere: Vec<_> = aut
                .enumerate_sphere_elements(&g, k)
                .map(|x| x.unwrap())
                .collect();
            sphere.shuffle(&mut rng);
            for x in sphere.iter().take(3) {
                for extra in [4, 6, 8] {
                    let m =
                        shadow_mass(&aut, &g, x, radius, delta, k + extra, DEFAULT_BUDGET).unwrap();
                    assert!(m.to_f64() > 0.0 && m.to_f64() <= 1.0);
                    scaled.push(m.to_f64() * (gr * k as f64).exp());
                }
            }
        }
        let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = scaled.iter().copied().fold(0.0f64, f64::max);
        assert!(hi / lo <= 16.0, "band [{lo}, {hi}]");
        if delta == HalfInteger::from_int(0) && radius == 0 {
            // a tree shadow of radius 0 is a subtree: exactly 3/4 of 3^-k
            assert!((hi - 0.75).abs() < 1e-9 && (lo - 0.75).abs() < 1e-9);
        }
    }
}
