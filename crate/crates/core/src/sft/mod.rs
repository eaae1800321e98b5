//! Two-sided subshifts of finite type on automaton edges and their
//! thermodynamic formalism for locally constant potentials.
//!
//! The alphabet is the set of edges that occur in some bi-infinite path;
//! consecutive symbols must match endpoints. Recurrent components, their
//! periods and cyclic classes come from the strongly connected components
//! of the edge graph.

mod coding;
mod measure;
mod perron;
mod potential;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

pub use coding::{ps_coding_check, CodingReport};
pub use measure::{
    check_variational, gibbs_ratio_scan, parry_gibbs_measure, GibbsScan, MarkovMeasure,
    VariationalReport,
};
pub use perron::{perron, PerronSolution, POWER_ITERATION_CAP, POWER_ITERATION_TOL};
pub use potential::{Potential, RecodedComponent};

use crate::automaton::GeodesicAutomaton;
use crate::error::{Error, Result};
use crate::group::Letter;

/// Absolute tolerance on pressures when deciding which components are maximal.
pub const MAXIMAL_TOL: f64 = 1e-9;

/// One symbol of the shift: an edge of the underlying graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SftEdge {
    pub from: usize,
    pub to: usize,
    /// Letter of the automaton transition, if the shift came from an automaton.
    pub letter: Option<Letter>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sft {
    num_vertices: usize,
    edges: Vec<SftEdge>,
    successors: Vec<Vec<usize>>,
}

impl Sft {
    /// The shift on the automaton's essential transitions. Transitions out of
    /// the initial state never occur in a bi-infinite path and are dropped.
    pub fn from_automaton(aut: &GeodesicAutomaton) -> Result<Sft> {
        if aut.validated_to() == 0 {
            return Err(Error::Precondition(
                "automaton has not been validated".into(),
            ));
        }
        if aut.num_transitions() == 0 {
            return Err(Error::Precondition("automaton has no transitions".into()));
        }
        let edges: Vec<SftEdge> = aut
            .transitions()
            .into_iter()
            .map(|t| SftEdge {
                from: t.from as usize,
                to: t.to as usize,
                letter: Some(t.letter),
            })
            .collect();
        Ok(Self::essential(aut.num_states(), edges))
    }

    /// The shift on the essential edges of a directed multigraph.
    pub fn from_graph(num_vertices: usize, edges: &[(usize, usize)]) -> Sft {
        let edges = edges
            .iter()
            .map(|&(from, to)| SftEdge {
                from,
                to,
                letter: None,
            })
            .collect();
        Self::essential(num_vertices, edges)
    }

    /// Keeps edges that lie on a bi-infinite path: their source is reachable
    /// from a cycle and their target reaches one.
    fn essential(num_vertices: usize, edges: Vec<SftEdge>) -> Sft {
        let on_cycle = vertices_on_cycles(num_vertices, &edges);
        let forward = closure(num_vertices, &edges, &on_cycle, false);
        let backward = closure(num_vertices, &edges, &on_cycle, true);
        let edges: Vec<SftEdge> = edges
            .into_iter()
            .filter(|e| forward[e.from] && backward[e.to])
            .collect();
        let mut successors = vec![Vec::new(); edges.len()];
        for (i, e) in edges.iter().enumerate() {
            for (j, f) in edges.iter().enumerate() {
                if e.to == f.from {
                    successors[i].push(j);
                }
            }
        }
        Sft {
            num_vertices,
            edges,
            successors,
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[SftEdge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> SftEdge {
        self.edges[i]
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.successors[i]
    }

    /// `A(e, e') = 1` iff `e` ends where `e'` starts.
    pub fn allowed(&self, e: usize, f: usize) -> bool {
        self.edges[e].to == self.edges[f].from
    }

    pub fn adjacency_matrix(&self) -> Vec<Vec<bool>> {
        (0..self.len())
            .map(|i| (0..self.len()).map(|j| self.allowed(i, j)).collect())
            .collect()
    }

    /// Whether consecutive symbols of `block` are allowed.
    pub fn is_allowed_block(&self, block: &[usize]) -> bool {
        block.iter().all(|&e| e < self.len()) && block.windows(2).all(|w| self.allowed(w[0], w[1]))
    }
}

fn vertices_on_cycles(n: usize, edges: &[SftEdge]) -> Vec<bool> {
    let mut g: DiGraph<(), ()> = DiGraph::new();
    let nodes: Vec<NodeIndex> = (0..n).map(|_| g.add_node(())).collect();
    for e in edges {
        g.add_edge(nodes[e.from], nodes[e.to], ());
    }
    let mut on_cycle = vec![false; n];
    for scc in tarjan_scc(&g) {
        let cyclic = scc.len() > 1
            || edges
                .iter()
                .any(|e| e.from == scc[0].index() && e.to == e.from);
        if cyclic {
            for v in scc {
                on_cycle[v.index()] = true;
            }
        }
    }
    on_cycle
}

/// Vertices reachable from (or, reversed, reaching) a marked vertex.
fn closure(n: usize, edges: &[SftEdge], marked: &[bool], reverse: bool) -> Vec<bool> {
    let mut seen = marked.to_vec();
    let mut stack: Vec<usize> = (0..n).filter(|&v| marked[v]).collect();
    while let Some(v) = stack.pop() {
        for e in edges {
            let (a, b) = if reverse {
                (e.to, e.from)
            } else {
                (e.from, e.to)
            };
            if a == v && !seen[b] {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    seen
}

/// A recurrent component: the edges of one strongly connected piece of the
/// edge graph that carries a cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    /// Sorted symbol indices.
    pub edges: Vec<usize>,
    pub period: usize,
    /// Cyclic class of each edge in `edges`, in `0..period`; successors of an
    /// edge in class `j` lie in class `j + 1 mod period`.
    pub cyclic_class: Vec<usize>,
}

impl Component {
    pub fn contains(&self, e: usize) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn local_index(&self, e: usize) -> Option<usize> {
        self.edges.binary_search(&e).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentDecomposition {
    pub components: Vec<Component>,
    /// Component of each symbol, if any.
    pub component_of: Vec<Option<usize>>,
    /// `reaches[i][j]`: some path leads from component `i` to component
    /// `j != i`. This is the transitive closure of the condensation DAG.
    pub reaches: Vec<Vec<bool>>,
}

/// Recurrent components of the edge graph, ordered by least symbol.
pub fn components(sft: &Sft) -> ComponentDecomposition {
    let n = sft.len();
    let mut g: DiGraph<(), ()> = DiGraph::new();
    let nodes: Vec<NodeIndex> = (0..n).map(|_| g.add_node(())).collect();
    for i in 0..n {
        for &j in sft.successors(i) {
            g.add_edge(nodes[i], nodes[j], ());
        }
    }
    let mut sccs: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|scc| {
            let mut v: Vec<usize> = scc.into_iter().map(|x| x.index()).collect();
            v.sort_unstable();
            v
        })
        .filter(|scc| scc.len() > 1 || sft.successors(scc[0]).contains(&scc[0]))
        .collect();
    sccs.sort();

    let mut component_of = vec![None; n];
    for (c, scc) in sccs.iter().enumerate() {
        for &e in scc {
            component_of[e] = Some(c);
        }
    }
    let components: Vec<Component> = sccs
        .into_iter()
        .enumerate()
        .map(|(c, edges)| cyclic_structure(sft, &component_of, c, edges))
        .collect();

    let k = components.len();
    let mut reaches = vec![vec![false; k]; k];
    for (c, comp) in components.iter().enumerate() {
        let mut seen = vec![false; n];
        let mut stack = comp.edges.clone();
        for &e in &stack {
            seen[e] = true;
        }
        while let Some(e) = stack.pop() {
            for &f in sft.successors(e) {
                if !seen[f] {
                    seen[f] = true;
                    stack.push(f);
                }
            }
        }
        for (d, other) in components.iter().enumerate() {
            if d != c && seen[other.edges[0]] {
                reaches[c][d] = true;
            }
        }
    }
    ComponentDecomposition {
        components,
        component_of,
        reaches,
    }
}

/// Period as the gcd of level differences along internal edges of a
/// breadth-first layering; cyclic classes are levels mod the period.
fn cyclic_structure(
    sft: &Sft,
    component_of: &[Option<usize>],
    c: usize,
    edges: Vec<usize>,
) -> Component {
    let mut level: Vec<Option<usize>> = vec![None; sft.len()];
    level[edges[0]] = Some(0);
    let mut queue = std::collections::VecDeque::from([edges[0]]);
    let mut period = 0usize;
    while let Some(e) = queue.pop_front() {
        let le = level[e].unwrap();
        for &f in sft.successors(e) {
            if component_of[f] != Some(c) {
                continue;
            }
            match level[f] {
                None => {
                    level[f] = Some(le + 1);
                    queue.push_back(f);
                }
                Some(lf) => period = gcd(period, (le + 1).abs_diff(lf)),
            }
        }
    }
    let period = period.max(1);
    let cyclic_class = edges.iter().map(|&e| level[e].unwrap() % period).collect();
    Component {
        edges,
        period,
        cyclic_class,
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Pressure of `psi` on component `c`: the log of the Perron value of
/// `W(e, e') = A(e, e') exp(psi(e))` after recoding blocks to symbols.
pub fn pressure(sft: &Sft, dec: &ComponentDecomposition, c: usize, psi: &Potential) -> Result<f64> {
    let recoded = RecodedComponent::new(sft, &dec.components[c], psi)?;
    Ok(perron(&recoded)?.log_lambda)
}

/// Components of maximal pressure and whether no path joins two of them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximalComponents {
    pub pressures: Vec<f64>,
    pub maximal: Vec<usize>,
    pub semisimple: bool,
}

pub fn maximal_components(
    sft: &Sft,
    dec: &ComponentDecomposition,
    psi: &Potential,
) -> Result<MaximalComponents> {
    let pressures = (0..dec.components.len())
        .map(|c| pressure(sft, dec, c, psi))
        .collect::<Result<Vec<_>>>()?;
    let top = pressures.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let maximal: Vec<usize> = (0..pressures.len())
        .filter(|&c| pressures[c] >= top - MAXIMAL_TOL)
        .collect();
    let semisimple = maximal
        .iter()
        .all(|&i| maximal.iter().all(|&j| i == j || !dec.reaches[i][j]));
    Ok(MaximalComponents {
        pressures,
        maximal,
        semisimple,
    })
}

/// Exponential growth rate of the automaton's path counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRate {
    /// Largest Perron value over recurrent components; 0 when there is none.
    pub spectral_radius: f64,
    /// `log(spectral_radius)`, or 0 for an automaton without cycles.
    pub gr: f64,
    /// Spectral radius at most `1 + 1e-9`: the group is elementary.
    pub elementary: bool,
}

pub fn growth_rate(aut: &GeodesicAutomaton) -> Result<GrowthRate> {
    let sft = Sft::from_automaton(aut)?;
    let dec = components(&sft);
    if dec.components.is_empty() {
        return Ok(GrowthRate {
            spectral_radius: 0.0,
            gr: 0.0,
            elementary: true,
        });
    }
    let maxc = maximal_components(&sft, &dec, &Potential::Constant(0.0))?;
    let gr = maxc
        .pressures
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let spectral_radius = gr.exp();
    Ok(GrowthRate {
        spectral_radius,
        gr,
        elementary: spectral_radius <= 1.0 + 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::build_geodesic_automaton;
    use crate::group::{Group, DEFAULT_BUDGET};

    fn cycle(p: usize) -> Sft {
        Sft::from_graph(p, &(0..p).map(|i| (i, (i + 1) % p)).collect::<Vec<_>>())
    }

    #[test]
    fn free_group_shift() {
        let g = Group::free(&["a", "b"]).unwrap();
        let aut = build_geodesic_automaton(&g, g.base(), 1, 6, DEFAULT_BUDGET).unwrap();
        let sft = Sft::from_automaton(&aut).unwrap();
        assert_eq!(sft.len(), 12);
        for i in 0..12 {
            let a = sft.edge(i).letter.unwrap();
            let next: Vec<Letter> = sft
                .successors(i)
                .iter()
                .map(|&j| sft.edge(j).letter.unwrap())
                .collect();
            assert_eq!(next.len(), 3);
            assert!(!next.contains(&g.base().inverse(a)));
        }
        let dec = components(&sft);
        assert_eq!(dec.components.len(), 1);
        assert_eq!(dec.components[0].edges.len(), 12);
        assert_eq!(dec.components[0].period, 1);
        let gr = growth_rate(&aut).unwrap();
        assert!((gr.gr - 3f64.ln()).abs() < 1e-12);
        assert!(!gr.elementary);
    }

    #[test]
    fn single_loop_and_unvalidated() {
        let sft = Sft::from_graph(1, &[(0, 0)]);
        assert_eq!(sft.adjacency_matrix(), vec![vec![true]]);
        let g = Group::free(&["a", "b"]).unwrap();
        let raw = crate::automaton::build_at_level(&g, g.base(), 1, DEFAULT_BUDGET).unwrap();
        assert!(matches!(
            Sft::from_automaton(&raw),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn cycle_period_and_classes() {
        let dec = components(&cycle(3));
        assert_eq!(dec.components.len(), 1);
        let c = &dec.components[0];
        assert_eq!(c.period, 3);
        let mut classes = c.cyclic_class.clone();
        classes.sort_unstable();
        assert_eq!(classes, vec![0, 1, 2]);
    }

    #[test]
    fn bridge_edges_belong_to_no_component() {
        // 2-cycle on {0,1}, bridge 1 -> 2, 2-cycle on {2,3}
        let sft = Sft::from_graph(4, &[(0, 1), (1, 0), (1, 2), (2, 3), (3, 2)]);
        assert_eq!(sft.len(), 5);
        let dec = components(&sft);
        assert_eq!(dec.components.len(), 2);
        assert_eq!(dec.component_of[2], None);
        assert!(dec.reaches[0][1]);
        assert!(!dec.reaches[1][0]);
    }

    #[test]
    fn maximal_component_selection() {
        // one vertex with two loops, disjoint from a single loop
        let sft = Sft::from_graph(2, &[(0, 0), (0, 0), (1, 1)]);
        let dec = components(&sft);
        assert_eq!(dec.components.len(), 2);
        let m = maximal_components(&sft, &dec, &Potential::Constant(0.0)).unwrap();
        assert_eq!(m.maximal, vec![0]);
        assert!(m.semisimple);
        assert!((m.pressures[0] - 2f64.ln()).abs() < 1e-12);

        // two equal cycles joined one way
        let chain = Sft::from_graph(4, &[(0, 1), (1, 0), (1, 2), (2, 3), (3, 2)]);
        let dec = components(&chain);
        let m = maximal_components(&chain, &dec, &Potential::Constant(0.0)).unwrap();
        assert_eq!(m.maximal, vec![0, 1]);
        assert!(!m.semisimple);
    }

    #[test]
    fn pressures_of_simple_shifts() {
        let two = Sft::from_graph(1, &[(0, 0), (0, 0)]);
        let dec = components(&two);
        let p = pressure(&two, &dec, 0, &Potential::Constant(0.0)).unwrap();
        assert!((p - 2f64.ln()).abs() < 1e-12);
        let c5 = cycle(5);
        let dec = components(&c5);
        let p = pressure(&c5, &dec, 0, &Potential::Constant(0.7)).unwrap();
        assert!((p - 0.7).abs() < 1e-12);
    }
}
