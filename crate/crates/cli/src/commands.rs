use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use geoflow::automaton::{build_with, validate_automaton, BuildOptions, GeodesicAutomaton};
use geoflow::battery::{run_battery, BatteryConfig};
use geoflow::dimension::{ps_dimension_estimate, regular_growth_check, DimensionParams};
use geoflow::distortion::{distortion_report, DistortionParams, LengthOptions};
use geoflow::group::{parse_presentation, Group};
use geoflow::report::{to_json, Provenance, Report, Timing};
use geoflow::sft::{
    check_variational, components, gibbs_ratio_scan, growth_rate, maximal_components,
    parry_gibbs_measure, pressure, Potential, Sft,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{BuildArgs, Command, GensArgs, OutArgs, PairArgs};

/// Version of the CSV column layouts.
const CSV_VERSION: u32 = 1;
const VARIATIONAL_TOL: f64 = 1e-9;
const GIBBS_BUDGET: usize = 1 << 24;

pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_bool(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

type CliResult<T> = Result<T, String>;

fn input<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn load_group(path: &Path) -> CliResult<Group> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_presentation(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn build(group: &Group, args: &BuildArgs, name: &str) -> CliResult<GeodesicAutomaton> {
    if args.budget == 0 {
        return Err("budget must be positive".into());
    }
    let gens = group.generating_set(name).map_err(input)?;
    build_with(
        group,
        gens,
        &BuildOptions::new(args.level, args.check, args.budget),
    )
    .map_err(input)
}

fn build_config(args: &BuildArgs) -> Value {
    json!({
        "group": args.group.display().to_string(),
        "level": args.level,
        "check": args.check,
        "budget": args.budget,
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut base, extra) {
        a.extend(b);
    }
    base
}

/// Writes `report` to `--out` with a timing sidecar, or to stdout.
fn emit<T: Serialize>(
    out: &OutArgs,
    provenance: Provenance,
    result: T,
    start: Instant,
) -> CliResult<()> {
    let command = provenance.command.clone();
    let text = Report { provenance, result }.to_json();
    match &out.out {
        Some(path) => {
            write(path, &text)?;
            let timing = Timing {
                command,
                wall_clock_seconds: start.elapsed().as_secs_f64(),
                sections: Vec::new(),
            };
            write(&sidecar(path), &to_json(&timing))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".timing.json");
    PathBuf::from(name)
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn run(command: Command) -> CliResult<Outcome> {
    let start = Instant::now();
    match command {
        Command::Automaton { set, save, out } => automaton(set, save, out, start),
        Command::Growth { set, n_max, out } => growth(set, n_max, out, start),
        Command::Components { set, out } => components_cmd(set, out, start),
        Command::Gibbs {
            set,
            trials,
            block_length,
            seed,
            out,
        } => gibbs(set, trials, block_length, seed, out, start),
        Command::Distortion {
            pair,
            exact_max,
            lln_n,
            eps,
            similarity_radius,
            similarity_margin,
            rays,
            csv,
            out,
        } => {
            let params = DistortionParams {
                exact_max,
                n_list: pair.n.clone(),
                samples: pair.samples,
                seed: pair.seed,
                lln_n_list: lln_n,
                eps_list: eps,
                lln_samples: pair.samples,
                similarity_radius,
                similarity_margin,
                rays,
                length: length_options(&pair),
            };
            distortion(pair, params, csv, out, start)
        }
        Command::Dimension {
            pair,
            diagnostic_rays,
            csv,
            out,
        } => {
            let params = DimensionParams {
                n_list: pair.n.clone(),
                samples: pair.samples,
                seed: pair.seed,
                diagnostic_rays,
                length: length_options(&pair),
            };
            dimension(pair, params, csv, out, start)
        }
        Command::Validate { set, n_max, out } => validate(set, n_max, out, start),
        Command::Battery { seed, only, out } => battery(seed, only, out, start),
    }
}

fn length_options(pair: &PairArgs) -> LengthOptions {
    LengthOptions {
        cap: pair.cap,
        budget: pair.build.budget,
        exact_below: pair.exact_below,
        ..LengthOptions::default()
    }
}

fn automaton(
    set: GensArgs,
    save: Option<PathBuf>,
    out: OutArgs,
    start: Instant,
) -> CliResult<Outcome> {
    let group = load_group(&set.build.group)?;
    let aut = build(&group, &set.build, &set.gens)?;
    if let Some(path) = &save {
        write(path, &aut.to_text())?;
    }
    let gens = aut.gens();
    let transitions: Vec<Value> = aut
        .transitions()
        .iter()
        .map(|t| json!({ "from": t.from, "letter": gens.letter_name(t.letter), "to": t.to }))
        .collect();
    let counts: Vec<String> = aut
        .sphere_counts(aut.validated_to())
        .iter()
        .map(|c| c.to_string())
        .collect();
    let result = json!({
        "gens": gens.name(),
        "letters": gens.letter_names(),
        "states": aut.num_states(),
        "initial": aut.initial(),
        "level_used": aut.level_used(),
        "validated_to": aut.validated_to(),
        "transitions": transitions,
        "sphere_counts": counts,
    });
    eprintln!(
        "{} states, {} transitions, level {}, validated to {}",
        aut.num_states(),
        aut.num_transitions(),
        aut.level_used(),
        aut.validated_to()
    );
    let config = merge(build_config(&set.build), json!({ "gens": set.gens }));
    let provenance =
        Provenance::new("automaton", config, None).with_automaton(&set.gens, aut.validated_to());
    emit(&out, provenance, result, start)?;
    Ok(Outcome::Pass)
}

fn growth(set: GensArgs, n_max: usize, out: OutArgs, start: Instant) -> CliResult<Outcome> {
    let group = load_group(&set.build.group)?;
    let aut = build(&group, &set.build, &set.gens)?;
    let gr = growth_rate(&aut).map_err(input)?;
    let regular = if gr.elementary || n_max == 0 {
        None
    } else {
        Some(regular_growth_check(&aut, n_max).map_err(input)?)
    };
    let counts: Vec<String> = aut
        .sphere_counts(n_max)
        .iter()
        .map(|c| c.to_string())
        .collect();
    eprintln!(
        "gr = {:.12}, spectral radius {:.12}",
        gr.gr, gr.spectral_radius
    );
    let result = json!({ "growth": gr, "sphere_counts": counts, "regular_growth": regular });
    let config = merge(
        build_config(&set.build),
        json!({ "gens": set.gens, "n_max": n_max }),
    );
    let provenance =
        Provenance::new("growth", config, None).with_automaton(&set.gens, aut.validated_to());
    emit(&out, provenance, result, start)?;
    Ok(Outcome::Pass)
}

fn components_cmd(set: GensArgs, out: OutArgs, start: Instant) -> CliResult<Outcome> {
    let group = load_group(&set.build.group)?;
    let aut = build(&group, &set.build, &set.gens)?;
    let sft = Sft::from_automaton(&aut).map_err(input)?;
    let dec = components(&sft);
    let gr = growth_rate(&aut).map_err(input)?.gr;
    let psi = Potential::Constant(-gr);
    let maximal = maximal_components(&sft, &dec, &psi).map_err(input)?;
    let rows = dec
        .components
        .iter()
        .enumerate()
        .map(|(c, comp)| {
            let entropy = pressure(&sft, &dec, c, &Potential::Constant(0.0))?;
            Ok(json!({
                "component": c,
                "edges": comp.edges,
                "period": comp.period,
                "cyclic_class": comp.cyclic_class,
                "entropy": entropy,
                "pressure_psi": maximal.pressures[c],
            }))
        })
        .collect::<geoflow::Result<Vec<Value>>>()
        .map_err(input)?;
    let edges: Vec<Value> = sft
        .edges()
        .iter()
        .map(|e| json!({ "from": e.from, "to": e.to, "letter": e.letter.map(|l| aut.gens().letter_name(l)) }))
        .collect();
    eprintln!(
        "{} symbols, {} components, maximal {:?}, semisimple {}",
        sft.len(),
        dec.components.len(),
        maximal.maximal,
        maximal.semisimple
    );
    let result = json!({
        "gr": gr,
        "symbols": edges,
        "components": rows,
        "reaches": dec.reaches,
        "maximal": maximal.maximal,
        "semisimple": maximal.semisimple,
    });
    let config = merge(build_config(&set.build), json!({ "gens": set.gens }));
    let provenance =
        Provenance::new("components", config, None).with_automaton(&set.gens, aut.validated_to());
    emit(&out, provenance, result, start)?;
    Ok(Outcome::Pass)
}

fn gibbs(
    set: GensArgs,
    trials: usize,
    block_length: usize,
    seed: u64,
    out: OutArgs,
    start: Instant,
) -> CliResult<Outcome> {
    let group = load_group(&set.build.group)?;
    let aut = build(&group, &set.build, &set.gens)?;
    let sft = Sft::from_automaton(&aut).map_err(input)?;
    let dec = components(&sft);
    let psi = Potential::Constant(-growth_rate(&aut).map_err(input)?.gr);
    let maximal = maximal_components(&sft, &dec, &psi).map_err(input)?;
    let mut pass = true;
    let mut rows = Vec::new();
    for &c in &maximal.maximal {
        let measure = parry_gibbs_measure(&sft, &dec, c, &psi).map_err(input)?;
        let variational = check_variational(&sft, &dec, c, &psi, trials, seed).map_err(input)?;
        let scan = gibbs_ratio_scan(&measure, &psi, block_length, GIBBS_BUDGET).map_err(input)?;
        pass &= variational.passed(VARIATIONAL_TOL);
        eprintln!(
            "component {c}: entropy {:.12}, {} violations, gap {:.2e}, c1 {:.6}, c2 {:.6}",
            measure.entropy(),
            variational.violations,
            variational.equilibrium_gap,
            scan.c1,
            scan.c2
        );
        rows.push(json!({ "component": c, "measure": measure, "variational": variational, "gibbs": scan }));
    }
    let config = merge(
        build_config(&set.build),
        json!({ "gens": set.gens, "trials": trials, "block_length": block_length }),
    );
    let provenance =
        Provenance::new("gibbs", config, Some(seed)).with_automaton(&set.gens, aut.validated_to());
    emit(&out, provenance, json!({ "components": rows }), start)?;
    Ok(Outcome::from_bool(pass))
}

fn pair_config(pair: &PairArgs) -> Value {
    merge(
        build_config(&pair.build),
        json!({
            "from": pair.from,
            "to": pair.to,
            "n": pair.n,
            "samples": pair.samples,
            "cap": pair.cap,
            "exact_below": pair.exact_below,
        }),
    )
}

fn distortion(
    pair: PairArgs,
    params: DistortionParams,
    csv: Option<PathBuf>,
    out: OutArgs,
    start: Instant,
) -> CliResult<Outcome> {
    let group = load_group(&pair.build.group)?;
    let aut_s = build(&group, &pair.build, &pair.from)?;
    let aut_t = build(&group, &pair.build, &pair.to)?;
    let report = distortion_report(&group, &aut_s, &aut_t, &params).map_err(input)?;
    if let Some(path) = &csv {
        write(path, &report.csv())?;
    }
    let v = &report.inequality;
    eprintln!(
        "tau_hat = {:.6} +- {:.6}, gr ratio {:.6}, margin {:+.6}, inequality {}",
        v.tau_hat,
        v.half_width,
        v.lower_bound,
        v.margin,
        if v.pass { "holds" } else { "FAILS" }
    );
    let pass = v.pass;
    let config = merge(
        pair_config(&pair),
        json!({ "params": params, "csv_version": CSV_VERSION }),
    );
    let provenance = Provenance::new("distortion", config, Some(pair.seed))
        .with_automaton(&pair.from, aut_s.validated_to())
        .with_automaton(&pair.to, aut_t.validated_to());
    emit(&out, provenance, report, start)?;
    Ok(Outcome::from_bool(pass))
}

fn dimension(
    pair: PairArgs,
    params: DimensionParams,
    csv: Option<PathBuf>,
    out: OutArgs,
    start: Instant,
) -> CliResult<Outcome> {
    let group = load_group(&pair.build.group)?;
    let aut_s = build(&group, &pair.build, &pair.from)?;
    let aut_t = build(&group, &pair.build, &pair.to)?;
    let est = ps_dimension_estimate(&group, &aut_s, &aut_t, &params).map_err(input)?;
    if let Some(path) = &csv {
        write(path, &est.csv())?;
    }
    eprintln!(
        "dim_hat = {:.6} +- {:.6}, gr_S {:.6}, gr_S* {:.6}, tau_hat {:.6}",
        est.dim_hat, est.width, est.gr_s, est.gr_sstar, est.tau.tau_hat
    );
    let pass = est.below_target_growth;
    let summary = json!({
        "dim_hat": est.dim_hat,
        "width": est.width,
        "gr_s": est.gr_s,
        "gr_sstar": est.gr_sstar,
        "tau_hat": est.tau.tau_hat,
    });
    let config = merge(
        pair_config(&pair),
        json!({ "params": params, "csv_version": CSV_VERSION }),
    );
    let provenance = Provenance::new("dimension", config, Some(pair.seed))
        .with_automaton(&pair.from, aut_s.validated_to())
        .with_automaton(&pair.to, aut_t.validated_to());
    emit(
        &out,
        provenance,
        json!({ "summary": summary, "estimate": est }),
        start,
    )?;
    Ok(Outcome::from_bool(pass))
}

fn validate(set: GensArgs, n_max: usize, out: OutArgs, start: Instant) -> CliResult<Outcome> {
    let group = load_group(&set.build.group)?;
    let aut = build(&group, &set.build, &set.gens)?;
    let gens = group.generating_set(&set.gens).map_err(input)?;
    let report = validate_automaton(&aut, &group, gens, n_max, set.build.budget).map_err(input)?;
    eprintln!("{:>4} {:>20} {:>20} match", "n", "paths", "bfs");
    for row in &report.rows {
        eprintln!(
            "{:>4} {:>20} {:>20} {}",
            row.n, row.path_count, row.bfs_count, row.equal
        );
    }
    let pass = report.passed();
    let config = merge(
        build_config(&set.build),
        json!({ "gens": set.gens, "n_max": n_max }),
    );
    let provenance =
        Provenance::new("validate", config, None).with_automaton(&set.gens, aut.validated_to());
    emit(&out, provenance, report, start)?;
    Ok(Outcome::from_bool(pass))
}

fn battery(seed: u64, only: Vec<u8>, out: OutArgs, start: Instant) -> CliResult<Outcome> {
    let config = BatteryConfig { seed, only };
    let run = run_battery(&config).map_err(input)?;
    for r in &run.report.results {
        eprintln!("{}", r.line());
    }
    let pass = run.report.passed;
    let mut provenance = Provenance::new(
        "battery",
        serde_json::to_value(&config).map_err(input)?,
        Some(seed),
    );
    provenance.validated_to = run.validated_to.clone();
    let text = Report {
        provenance,
        result: &run.report,
    }
    .to_json();
    match &out.out {
        Some(path) => {
            write(path, &text)?;
            let timing = Timing {
                command: "battery".into(),
                wall_clock_seconds: start.elapsed().as_secs_f64(),
                sections: run
                    .timings
                    .iter()
                    .map(|(id, s)| (format!("criterion {id}"), *s))
                    .collect(),
            };
            write(&sidecar(path), &to_json(&timing))?;
        }
        None => print!("{text}"),
    }
    Ok(Outcome::from_bool(pass))
}
