use std::collections::VecDeque;

use num_bigint::BigUint;
use rustc_hash::FxHashMap;

use super::GeodesicAutomaton;
use crate::error::{Error, Result};
use crate::group::{sphere_sizes, Ball, GeneratingSet, Group, Letter};

/// Parameters of [`build_geodesic_automaton`].
#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// First neighbourhood depth tried.
    pub level: usize,
    /// Last neighbourhood depth tried before giving up.
    pub max_level: usize,
    /// Radius up to which path counts must match breadth-first search.
    pub check_to: usize,
    /// Element budget for every ball explored.
    pub budget: usize,
}

impl BuildOptions {
    pub fn new(level: usize, check_to: usize, budget: usize) -> Self {
        BuildOptions {
            level,
            max_level: level.max(6),
            check_to,
            budget,
        }
    }
}

/// Builds and validates a geodesic automaton for `gens`, raising the level
/// from `level` until path counts agree with breadth-first sphere sizes up to
/// `check_to`.
pub fn build_geodesic_automaton(
    group: &Group,
    gens: &GeneratingSet,
    level: usize,
    check_to: usize,
    budget: usize,
) -> Result<GeodesicAutomaton> {
    build_with(group, gens, &BuildOptions::new(level, check_to, budget))
}

pub fn build_with(
    group: &Group,
    gens: &GeneratingSet,
    opts: &BuildOptions,
) -> Result<GeodesicAutomaton> {
    if opts.level < 1 {
        return Err(Error::Precondition("level must be at least 1".into()));
    }
    if opts.check_to < 2 * opts.level {
        return Err(Error::Precondition(format!(
            "check radius {} is below twice the level {}",
            opts.check_to, opts.level
        )));
    }
    let expected = sphere_sizes(group, gens, opts.check_to, opts.budget)?;
    let mut first_mismatch = 0;
    for level in opts.level..=opts.max_level {
        let (mut aut, conflicts) = match construct(group, gens, level, opts.budget) {
            Ok(built) => built,
            Err(Error::ResourceLimit { .. }) if level > opts.level => break,
            Err(e) => return Err(e),
        };
        let counts = aut.sphere_counts(opts.check_to);
        let mismatch = counts
            .iter()
            .zip(&expected)
            .position(|(c, &e)| *c != BigUint::from(e));
        match mismatch {
            None if conflicts == 0 => {
                aut.set_validated_to(opts.check_to);
                return Ok(aut);
            }
            None => first_mismatch = 0,
            Some(n) => first_mismatch = n,
        }
    }
    Err(Error::StabilizationFailure {
        max_level: opts.max_level,
        first_mismatch,
    })
}

/// Builds the automaton at a fixed level without validating it.
///
/// When representatives of a cone type disagree on a transition, the one
/// of least shortlex rank wins. The returned automaton has
/// `validated_to() == 0`.
pub fn build_at_level(
    group: &Group,
    gens: &GeneratingSet,
    level: usize,
    budget: usize,
) -> Result<GeodesicAutomaton> {
    if level < 1 {
        return Err(Error::Precondition("level must be at least 1".into()));
    }
    construct(group, gens, level, budget).map(|(aut, _)| aut)
}

/// What the representatives of one truncated cone type do on one letter.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Observed {
    Unseen,
    Forbidden,
    Targets(Vec<u32>),
    /// Some representatives extend geodesically by the letter and some do not.
    Mixed,
}

/// Truncated cone types of the elements of a ball and their observed moves.
struct Atoms {
    /// Truncated type of each element of depth at most `depth`.
    atom_of: Vec<u32>,
    /// `moves[a][t]`, gathered from every representative strictly inside `depth`.
    moves: Vec<Vec<Observed>>,
}

fn construct(
    group: &Group,
    gens: &GeneratingSet,
    level: usize,
    budget: usize,
) -> Result<(GeodesicAutomaton, usize)> {
    let mut depth = level + 1;
    loop {
        let ball = Ball::explore(group, gens, depth + level, budget)?;
        let atoms = classify(&ball, gens, level, depth);
        let start = atoms.atom_of[0];
        let reachable = reachable_atoms(&atoms.moves, start);
        let unresolved = reachable.iter().any(|&a| {
            atoms.moves[a as usize]
                .iter()
                .all(|m| *m == Observed::Unseen)
        });
        let exhausted = ball.sphere_size(depth) == 0;
        if unresolved && !exhausted {
            depth += 1;
            continue;
        }
        return Ok(merge(gens, &atoms.moves, &reachable, start, level));
    }
}

/// The truncated type of `x` lists, for each `g` in `B(level)`, the change
/// `|xg| - |x|`, and for same-sphere neighbours whether `xg` precedes `x` in
/// shortlex order. Moves record which letters extend `x` along its
/// shortlex-least geodesic.
fn classify(ball: &Ball, gens: &GeneratingSet, level: usize, depth: usize) -> Atoms {
    let k = gens.len();
    // B(level) is the initial segment of the ball in discovery order
    let local = ball.sphere_range(level).end;
    let local_parent: Vec<Option<(usize, Letter)>> = (0..local).map(|g| ball.parent(g)).collect();

    let inner = ball.sphere_range(depth).end;
    let mut ids: FxHashMap<Vec<i8>, u32> = FxHashMap::default();
    let mut atom_of = Vec::with_capacity(inner);
    let mut at = vec![0usize; local];
    for x in 0..inner {
        let lx = ball.length(x) as i64;
        at[0] = x;
        let mut signature = Vec::with_capacity(local - 1);
        for g in 1..local {
            let (p, t) = local_parent[g].unwrap();
            let y = ball
                .neighbor(at[p], t)
                .expect("ball covers the neighbourhood of every classified element");
            at[g] = y;
            let delta = ball.length(y) as i64 - lx;
            let flag = i64::from(delta == 0 && y < x);
            signature.push((2 * delta + flag) as i8);
        }
        let next = ids.len() as u32;
        atom_of.push(*ids.entry(signature).or_insert(next));
    }

    let mut moves = vec![vec![Observed::Unseen; k]; ids.len()];
    let outer = ball.sphere_range(depth).start;
    for x in 0..outer {
        let lx = ball.length(x);
        let row = &mut moves[atom_of[x] as usize];
        for t in 0..k as Letter {
            let target = ball
                .neighbor(x, t)
                .filter(|&y| ball.length(y) == lx + 1 && ball.parent(y) == Some((x, t)))
                .map(|y| atom_of[y]);
            let slot = &mut row[t as usize];
            *slot = match (std::mem::replace(slot, Observed::Unseen), target) {
                (Observed::Unseen, None) => Observed::Forbidden,
                (Observed::Unseen, Some(a)) => Observed::Targets(vec![a]),
                (Observed::Forbidden, None) => Observed::Forbidden,
                (Observed::Targets(mut v), Some(a)) => {
                    if let Err(pos) = v.binary_search(&a) {
                        v.insert(pos, a);
                    }
                    Observed::Targets(v)
                }
                _ => Observed::Mixed,
            };
        }
    }
    Atoms { atom_of, moves }
}

fn reachable_atoms(moves: &[Vec<Observed>], start: u32) -> Vec<u32> {
    let mut seen = vec![false; moves.len()];
    seen[start as usize] = true;
    let mut order = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(a) = queue.pop_front() {
        for m in &moves[a as usize] {
            if let Observed::Targets(v) = m {
                for &b in v {
                    if !seen[b as usize] {
                        seen[b as usize] = true;
                        order.push(b);
                        queue.push_back(b);
                    }
                }
            }
        }
    }
    order
}

/// Merges truncated types with the same future by partition refinement and
/// returns the resulting automaton with the number of inconsistencies left:
/// letters on which representatives disagree, or whose targets end up in
/// different classes.
fn merge(
    gens: &GeneratingSet,
    moves: &[Vec<Observed>],
    reachable: &[u32],
    start: u32,
    level: usize,
) -> (GeodesicAutomaton, usize) {
    let k = gens.len();
    let allowed = |a: u32| -> Vec<u8> {
        moves[a as usize]
            .iter()
            .map(|m| match m {
                Observed::Unseen => 0,
                Observed::Forbidden => 1,
                Observed::Targets(_) => 2,
                Observed::Mixed => 3,
            })
            .collect()
    };
    let mut class: FxHashMap<u32, u32> = FxHashMap::default();
    let mut keys: FxHashMap<Vec<u8>, u32> = FxHashMap::default();
    for &a in reachable {
        let n = keys.len() as u32;
        class.insert(a, *keys.entry(allowed(a)).or_insert(n));
    }
    loop {
        let mut keys: FxHashMap<(u32, Vec<Vec<u32>>), u32> = FxHashMap::default();
        let mut refined: FxHashMap<u32, u32> = FxHashMap::default();
        for &a in reachable {
            let targets: Vec<Vec<u32>> = moves[a as usize]
                .iter()
                .map(|m| match m {
                    Observed::Targets(v) => {
                        let mut cs: Vec<u32> = v.iter().map(|b| class[b]).collect();
                        cs.sort_unstable();
                        cs.dedup();
                        cs
                    }
                    _ => Vec::new(),
                })
                .collect();
            let n = keys.len() as u32;
            refined.insert(a, *keys.entry((class[&a], targets)).or_insert(n));
        }
        let before = class
            .values()
            .collect::<std::collections::BTreeSet<_>>()
            .len();
        let stable = keys.len() == before;
        class = refined;
        if stable {
            break;
        }
    }

    let mut conflicts = 0;
    let num_classes = class.values().max().map_or(0, |&c| c as usize + 1);
    let mut rows: Vec<Option<Vec<Option<u32>>>> = vec![None; num_classes];
    for &a in reachable {
        let row: Vec<Option<u32>> = moves[a as usize]
            .iter()
            .map(|m| match m {
                Observed::Targets(v) => {
                    let c = class[&v[0]];
                    if v.iter().any(|b| class[b] != c) {
                        conflicts += 1;
                    }
                    Some(c)
                }
                Observed::Mixed => {
                    conflicts += 1;
                    None
                }
                _ => None,
            })
            .collect();
        let slot = &mut rows[class[&a] as usize];
        if slot.is_none() {
            *slot = Some(row);
        }
    }
    let rows: Vec<Vec<Option<u32>>> = rows
        .into_iter()
        .map(|r| r.unwrap_or_else(|| vec![None; k]))
        .collect();

    // number classes breadth first from the identity's
    let first = class[&start];
    let mut order = vec![first];
    let mut new_id = vec![u32::MAX; rows.len()];
    new_id[first as usize] = 0;
    let mut i = 0;
    while i < order.len() {
        for &to in rows[order[i] as usize].iter().flatten() {
            if new_id[to as usize] == u32::MAX {
                new_id[to as usize] = order.len() as u32;
                order.push(to);
            }
        }
        i += 1;
    }
    let transitions = order
        .iter()
        .map(|&c| {
            rows[c as usize]
                .iter()
                .map(|t| t.map(|to| new_id[to as usize]))
                .collect()
        })
        .collect();
    (
        GeodesicAutomaton::from_parts(gens.clone(), transitions, 0, level, 0),
        conflicts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{parse_presentation, DEFAULT_BUDGET};

    #[test]
    fn rejects_bad_parameters() {
        let g = Group::free(&["a", "b"]).unwrap();
        assert!(matches!(
            build_geodesic_automaton(&g, g.base(), 0, 4, DEFAULT_BUDGET),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            build_geodesic_automaton(&g, g.base(), 3, 5, DEFAULT_BUDGET),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn finite_group_paths_die_out() {
        let g = parse_presentation(include_str!("../../groups/s3.grp")).unwrap();
        let aut = build_geodesic_automaton(&g, g.base(), 1, 6, DEFAULT_BUDGET).unwrap();
        let counts: Vec<u64> = aut
            .sphere_counts(6)
            .iter()
            .map(|c| u64::try_from(c).unwrap())
            .collect();
        assert_eq!(counts, vec![1, 2, 2, 1, 0, 0, 0]);
    }

    #[test]
    fn free_product_matches_breadth_first_search() {
        let g = parse_presentation(include_str!("../../groups/psl2z.grp")).unwrap();
        let aut = build_geodesic_automaton(&g, g.base(), 1, 12, DEFAULT_BUDGET).unwrap();
        let bfs = sphere_sizes(&g, g.base(), 12, DEFAULT_BUDGET).unwrap();
        let counts: Vec<u64> = aut
            .sphere_counts(12)
            .iter()
            .map(|c| u64::try_from(c).unwrap())
            .collect();
        assert_eq!(counts, bfs);
        assert_eq!(&counts[..6], &[1, 3, 4, 6, 8, 12]);
    }

    #[test]
    fn construction_is_deterministic() {
        let g = parse_presentation(include_str!("../../groups/psl2z.grp")).unwrap();
        let a = build_geodesic_automaton(&g, g.base(), 1, 8, DEFAULT_BUDGET).unwrap();
        let b = build_geodesic_automaton(&g, g.base(), 1, 8, DEFAULT_BUDGET).unwrap();
        assert_eq!(a, b);
    }
}
