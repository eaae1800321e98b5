use geoflow::automaton::{build_geodesic_automaton, GeodesicAutomaton};
use geoflow::battery::{F2, PSL2Z};
use geoflow::dimension::ln_biguint;
use geoflow::group::{parse_presentation, Group, DEFAULT_BUDGET};
use geoflow::sft::{
    check_variational, components, gibbs_ratio_scan, growth_rate, maximal_components,
    parry_gibbs_measure, pressure, ps_coding_check, MarkovMeasure, Potential, Sft,
};

fn automaton(text: &str, check_to: usize) -> (Group, GeodesicAutomaton) {
    let g = parse_presentation(text).unwrap();
    let aut = build_geodesic_automaton(&g, g.base(), 1, check_to, DEFAULT_BUDGET).unwrap();
    (g, aut)
}

/// The equilibrium measure of `-gr` on the first maximal component.
fn parry(aut: &GeodesicAutomaton) -> (Sft, MarkovMeasure, Potential) {
    let sft = Sft::from_automaton(aut).unwrap();
    let dec = components(&sft);
    let psi = Potential::Constant(-growth_rate(aut).unwrap().gr);
    let c = maximal_components(&sft, &dec, &psi).unwrap().maximal[0];
    let m = parry_gibbs_measure(&sft, &dec, c, &psi).unwrap();
    (sft, m, psi)
}

#[test]
fn free_group_parry_measure() {
    let (_, aut) = automaton(F2, 6);
    let (sft, m, psi) = parry(&aut);
    assert_eq!(m.symbols().len(), 12);
    assert!(m.pressure().unwrap().abs() < 1e-12);
    for i in 0..12 {
        assert!((m.stationary()[i] - 1.0 / 12.0).abs() < 1e-12);
        assert_eq!(m.successors(i).len(), 3);
        for &p in m.transitions_from(i) {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }
    assert!((m.entropy() - 3f64.ln()).abs() < 1e-9);
    assert!((m.cylinder(&[5]) - 1.0 / 12.0).abs() < 1e-12);
    assert_eq!(m.cylinder(&[]), 1.0);
    let e = 0;
    let blocked = (0..sft.len()).find(|&f| !sft.allowed(e, f)).unwrap();
    assert_eq!(m.cylinder(&[e, blocked]), 0.0);
    // the symmetric tree makes every ratio equal
    let scan = gibbs_ratio_scan(&m, &psi, 10, 1 << 22).unwrap();
    assert!((scan.c2 / scan.c1 - 1.0).abs() < 1e-9);
}

#[test]
fn word_metric_potential_has_zero_pressure() {
    for text in [F2, PSL2Z] {
        let (_, aut) = automaton(text, 8);
        let sft = Sft::from_automaton(&aut).unwrap();
        let dec = components(&sft);
        let gr = growth_rate(&aut).unwrap().gr;
        let max = maximal_components(&sft, &dec, &Potential::Constant(-gr)).unwrap();
        assert!(max.semisimple);
        for &c in &max.maximal {
            assert!(
                pressure(&sft, &dec, c, &Potential::Constant(-gr))
                    .unwrap()
                    .abs()
                    < 1e-12
            );
        }
    }
}

#[test]
fn variational_principle_on_psl() {
    let (_, aut) = automaton(PSL2Z, 8);
    let sft = Sft::from_automaton(&aut).unwrap();
    let dec = components(&sft);
    let psi = Potential::Constant(-growth_rate(&aut).unwrap().gr);
    for c in maximal_components(&sft, &dec, &psi).unwrap().maximal {
        let report = check_variational(&sft, &dec, c, &psi, 500, 9).unwrap();
        assert!(report.passed(1e-9), "{report:?}");
        assert!(report.best_random_value <= report.pressure + 1e-9);
    }
}

#[test]
fn biased_coin_falls_short_of_the_full_shift() {
    // one vertex with two loops: the full 2-shift
    let sft = Sft::from_graph(1, &[(0, 0), (0, 0)]);
    let dec = components(&sft);
    let biased = Potential::Edge(vec![0.9f64.ln(), 0.1f64.ln()]);
    let m = parry_gibbs_measure(&sft, &dec, 0, &biased).unwrap();
    let h = -(0.9f64 * 0.9f64.ln() + 0.1 * 0.1f64.ln());
    assert!((m.entropy() - h).abs() < 1e-12);
    assert!(m.entropy() < 2f64.ln());
    let uniform = parry_gibbs_measure(&sft, &dec, 0, &Potential::Constant(0.0)).unwrap();
    assert!((uniform.entropy() - 2f64.ln()).abs() < 1e-12);
    let scan = gibbs_ratio_scan(&uniform, &Potential::Constant(0.0), 8, 1 << 20).unwrap();
    assert!((scan.c1 - 1.0).abs() < 1e-12 && (scan.c2 - 1.0).abs() < 1e-12);
}

#[test]
fn deterministic_cycle() {
    let sft = Sft::from_graph(3, &[(0, 1), (1, 2), (2, 0)]);
    let dec = components(&sft);
    let zero = Potential::Constant(0.0);
    let m = parry_gibbs_measure(&sft, &dec, 0, &zero).unwrap();
    assert_eq!(m.entropy(), 0.0);
    assert!(m
        .stationary()
        .iter()
        .all(|&p| (p - 1.0 / 3.0).abs() < 1e-12));
    let scan = gibbs_ratio_scan(&m, &zero, 6, 1 << 10).unwrap();
    assert!((scan.c1 - 1.0 / 3.0).abs() < 1e-12 && (scan.c2 - 1.0 / 3.0).abs() < 1e-12);
}

/// Every allowed block of length below 8 splits into its one-symbol
/// extensions on either side.
#[test]
fn cylinders_are_additive() {
    for text in [F2, PSL2Z] {
        let (_, aut) = automaton(text, 8);
        let (sft, m, _) = parry(&aut);
        let mut stack: Vec<Vec<usize>> = (0..sft.len()).map(|e| vec![e]).collect();
        let mut checked = 0;
        while let Some(block) = stack.pop() {
            let mass = m.cylinder(&block);
            if mass == 0.0 || block.len() >= 8 {
                continue;
            }
            let extend = |front: bool| -> f64 {
                (0..sft.len())
                    .map(|e| {
                        let mut b = block.clone();
                        if front {
                            b.insert(0, e);
                        } else {
                            b.push(e);
                        }
                        m.cylinder(&b)
                    })
                    .sum()
            };
            assert!((extend(false) - mass).abs() <= 1e-12 * mass.max(1e-300) + 1e-15);
            assert!((extend(true) - mass).abs() <= 1e-12 * mass.max(1e-300) + 1e-15);
            checked += 1;
            for &f in sft.successors(*block.last().unwrap()) {
                let mut b = block.clone();
                b.push(f);
                stack.push(b);
            }
        }
        assert!(checked >= sft.len());
    }
}

#[test]
fn decomposition_is_a_dag_and_measures_stay_inside() {
    for text in [F2, PSL2Z] {
        let (_, aut) = automaton(text, 8);
        let sft = Sft::from_automaton(&aut).unwrap();
        let dec = components(&sft);
        let k = dec.components.len();
        for i in 0..k {
            assert!(!dec.reaches[i][i]);
            for j in 0..k {
                assert!(!(dec.reaches[i][j] && dec.reaches[j][i]));
            }
        }
        for (c, comp) in dec.components.iter().enumerate() {
            for &e in &comp.edges {
                assert_eq!(dec.component_of[e], Some(c));
            }
            let m = parry_gibbs_measure(&sft, &dec, c, &Potential::Constant(0.0)).unwrap();
            for i in 0..m.symbols().len() {
                for (&j, &p) in m.successors(i).iter().zip(m.transitions_from(i)) {
                    if p > 0.0 {
                        assert!(comp.contains(m.symbols()[j][0]));
                    }
                }
            }
        }
    }
}

#[test]
fn coding_ratios_are_stable_in_n() {
    let g = parse_presentation(F2).unwrap();
    let aut = build_geodesic_automaton(&g, g.base(), 1, 16, 100_000_000).unwrap();
    let maxima: Vec<f64> = [4, 6, 8]
        .iter()
        .map(|&n| ps_coding_check(&g, &aut, 0, n, 1 << 24).unwrap().max_ratio)
        .collect();
    let (lo, hi) = maxima
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
    assert!(lo > 0.0 && hi / lo <= 2.0, "{maxima:?}");
    let one = ps_coding_check(&g, &aut, 0, 1, 1 << 24).unwrap();
    assert!(one.max_ratio.is_finite() && one.pairs == 16);
}

/// The Perron value of the unweighted maximal component against the root
/// `|S_30|^(1/30)` of the independent sphere count, at tolerance 1e-3.
/// For F2 the root is `3 (4/3)^(1/30)`, about 3.029.
#[test]
fn perron_value_matches_sphere_root_at_thirty() {
    let (_, aut) = automaton(F2, 8);
    let lambda = growth_rate(&aut).unwrap().spectral_radius;
    let root = (ln_biguint(&aut.sphere_count(30)) / 30.0).exp();
    assert!(
        (lambda - root).abs() <= 1e-3,
        "lambda {lambda} against root {root}"
    );
}
