use num_bigint::BigUint;
use serde::Serialize;

use super::{GeodesicAutomaton, SphereSampler};
use crate::group::{ElementSet, GeneratingSet, Group, LayerWalker, Word};
use crate::rng::stream_rng;
use crate::Result;

/// Paths per radius enumerated exhaustively before falling back to samples.
pub const EXHAUSTIVE_PATHS: usize = 1 << 20;
/// Sampled paths per radius when enumeration is too large.
pub const SPOT_CHECKS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationRow {
    pub n: usize,
    #[serde(serialize_with = "crate::report::serialize_biguint")]
    pub path_count: BigUint,
    pub bfs_count: u64,
    pub equal: bool,
    /// Paths whose words were evaluated at this radius.
    pub checked_paths: usize,
    /// Checked paths whose element is not in the sphere of radius `n`.
    pub non_geodesic: usize,
    /// Checked paths spelling an element already spelled by another path.
    pub duplicates: usize,
    pub exhaustive: bool,
}

/// Comparison of an automaton with breadth-first search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
    pub first_mismatch: Option<usize>,
    /// Largest radius up to which every path was checked for geodesity and
    /// injectivity.
    pub exhaustive_to: usize,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.equal && r.non_geodesic == 0 && r.duplicates == 0)
    }
}

/// Checks path counts against sphere sizes for `n <= n_max`, and that paths
/// spell distinct elements of the right sphere (every path while there are
/// at most [`EXHAUSTIVE_PATHS`], otherwise [`SPOT_CHECKS`] sampled paths).
pub fn validate_automaton(
    aut: &GeodesicAutomaton,
    group: &Group,
    gens: &GeneratingSet,
    n_max: usize,
    budget: usize,
) -> Result<ValidationReport> {
    let counts = aut.sphere_counts(n_max);
    let mut walker = LayerWalker::new(group, gens, budget);
    let mut rows = Vec::with_capacity(n_max + 1);
    let mut exhaustive_to = 0;
    let mut rng = stream_rng(0x5eed, 0);
    for (n, path_count) in counts.into_iter().enumerate() {
        if n > 0 {
            walker.advance()?;
        }
        let sphere = walker.current();
        let bfs_count = sphere.len() as u64;
        let equal = path_count == BigUint::from(bfs_count);
        let exhaustive = path_count <= BigUint::from(EXHAUSTIVE_PATHS);
        let mut row = ValidationRow {
            n,
            path_count,
            bfs_count,
            equal,
            checked_paths: 0,
            non_geodesic: 0,
            duplicates: 0,
            exhaustive,
        };
        let mut check = |w: &Word, seen: &mut ElementSet| -> Result<()> {
            let x = group.evaluate(aut.gens(), w)?;
            row.checked_paths += 1;
            if !sphere.contains(x.normal_form()) {
                row.non_geodesic += 1;
            }
            if !seen.insert(x.normal_form()).1 {
                row.duplicates += 1;
            }
            Ok(())
        };
        let mut seen = ElementSet::new();
        if exhaustive {
            for w in aut.enumerate_sphere(n) {
                check(&w, &mut seen)?;
            }
        } else {
            let sampler = SphereSampler::new(aut, n)?;
            for _ in 0..SPOT_CHECKS {
                let w = sampler.sample_word(&mut rng);
                check(&w, &mut seen)?;
            }
            // repeated samples are expected here
            row.duplicates = 0;
        }
        if exhaustive && exhaustive_to + 1 == n {
            exhaustive_to = n;
        }
        rows.push(row);
    }
    let first_mismatch = rows
        .iter()
        .find(|r| !r.equal || r.non_geodesic > 0 || r.duplicates > 0)
        .map(|r| r.n);
    Ok(ValidationReport {
        rows,
        first_mismatch,
        exhaustive_to,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{build_at_level, build_geodesic_automaton};
    use crate::group::{parse_presentation, DEFAULT_BUDGET};

    #[test]
    fn valid_free_group_automaton() {
        let g = Group::free(&["a", "b"]).unwrap();
        let aut = build_geodesic_automaton(&g, g.base(), 1, 4, DEFAULT_BUDGET).unwrap();
        let report = validate_automaton(&aut, &g, g.base(), 10, DEFAULT_BUDGET).unwrap();
        assert!(report.passed());
        assert_eq!(report.first_mismatch, None);
        assert_eq!(report.exhaustive_to, 10);
        let one = validate_automaton(&aut, &g, g.base(), 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(one.rows[1].bfs_count, 4);
        assert_eq!(one.rows[1].path_count, BigUint::from(4u32));
    }

    #[test]
    fn too_small_level_on_surface_group_is_caught() {
        let g = parse_presentation(include_str!("../../groups/surface2.grp")).unwrap();
        let aut = build_at_level(&g, g.base(), 1, DEFAULT_BUDGET).unwrap();
        let report = validate_automaton(&aut, &g, g.base(), 5, DEFAULT_BUDGET).unwrap();
        assert!(!report.passed());
        let n = report.first_mismatch.unwrap();
        assert!(n >= 1);
        assert!(report.rows[..n].iter().all(|r| r.equal));
    }
}
