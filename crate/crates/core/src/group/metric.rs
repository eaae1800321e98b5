use std::fmt;

use serde::{Serialize, Serializer};

use super::{Ball, ElementSet, GeneratingSet, Group, GroupElement, Letter, Word};
use crate::error::{Error, Result};

/// Default radius of the precomputed ball used by [`WordMetric`].
pub const DEFAULT_METRIC_RADIUS: usize = 4;
/// Default search cap for foreign word lengths.
pub const DEFAULT_CAP: u32 = 64;

/// An exact half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInteger(i64);

impl HalfInteger {
    pub fn from_doubled(doubled: i64) -> Self {
        HalfInteger(doubled)
    }

    pub fn from_int(value: i64) -> Self {
        HalfInteger(2 * value)
    }

    pub fn doubled(self) -> i64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}", self.0 as f64 / 2.0)
        }
    }
}

impl Serialize for HalfInteger {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.to_f64())
    }
}

/// Exact word lengths over a generating set `T`.
///
/// Lengths up to the precomputed radius are table lookups. Longer elements
/// are found by meeting in the middle: spheres around `x` are grown until
/// they touch the precomputed ball, at which point the length is the
/// sphere radius plus the least ball length hit.
#[derive(Debug, Clone)]
pub struct WordMetric {
    group: Group,
    gens: GeneratingSet,
    ball: Ball,
    cap: u32,
    budget: usize,
}

impl WordMetric {
    pub fn new(
        group: &Group,
        gens: &GeneratingSet,
        radius: usize,
        cap: u32,
        budget: usize,
    ) -> Result<Self> {
        let radius = radius.min(cap as usize);
        let ball = Ball::explore(group, gens, radius, budget)?;
        Ok(WordMetric {
            group: group.clone(),
            gens: gens.clone(),
            ball,
            cap,
            budget,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn gens(&self) -> &GeneratingSet {
        &self.gens
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// `|x|_T` for `x` given by its normal form.
    pub fn length_of(&self, x: &[Letter]) -> Result<u32> {
        if let Some(i) = self.ball.index_of(x) {
            return Ok(self.ball.length(i) as u32);
        }
        let r = self.ball.radius() as u32;
        let mut seen = ElementSet::new();
        seen.insert(x);
        let mut frontier = vec![x.to_vec()];
        let mut buf = Word::new();
        let mut j = 0u32;
        while j + r < self.cap {
            j += 1;
            let mut next = Vec::new();
            let mut best: Option<u32> = None;
            for y in &frontier {
                for t in 0..self.gens.len() {
                    self.group
                        .multiply_into(y, self.gens.base_word(t as Letter), &mut buf)?;
                    if !seen.insert(&buf).1 {
                        continue;
                    }
                    if seen.len() > self.budget {
                        return Err(Error::ResourceLimit {
                            budget: self.budget,
                        });
                    }
                    if let Some(i) = self.ball.index_of(&buf) {
                        let d = j + self.ball.length(i) as u32;
                        best = Some(best.map_or(d, |b| b.min(d)));
                    }
                    next.push(buf.clone());
                }
            }
            if let Some(d) = best {
                return Ok(d);
            }
            frontier = next;
        }
        Err(Error::CapExceeded { cap: self.cap })
    }

    pub fn length(&self, x: &GroupElement) -> Result<u32> {
        self.length_of(x.normal_form())
    }

    pub fn distance(&self, x: &GroupElement, y: &GroupElement) -> Result<u32> {
        let xinv = self.group.inverse(x)?;
        let z = self.group.product(&xinv, y)?;
        self.length(&z)
    }

    /// `(x|y)_o = (|x| + |y| - |x⁻¹y|) / 2`.
    pub fn gromov_product(&self, x: &GroupElement, y: &GroupElement) -> Result<HalfInteger> {
        let lx = self.length(x)? as i64;
        let ly = self.length(y)? as i64;
        let dxy = self.distance(x, y)? as i64;
        Ok(HalfInteger::from_doubled(lx + ly - dxy))
    }

    /// `d(x,z) - d(o,z)`.
    pub fn busemann(&self, x: &GroupElement, z: &GroupElement) -> Result<i64> {
        Ok(self.distance(x, z)? as i64 - self.length(z)? as i64)
    }
}

/// `|x|_T`, exact whenever it is at most `cap`.
pub fn word_length(group: &Group, x: &GroupElement, gens: &GeneratingSet, cap: u32) -> Result<u32> {
    WordMetric::new(
        group,
        gens,
        DEFAULT_METRIC_RADIUS,
        cap,
        super::DEFAULT_BUDGET,
    )?
    .length(x)
}

pub fn gromov_product(
    group: &Group,
    x: &GroupElement,
    y: &GroupElement,
    gens: &GeneratingSet,
    cap: u32,
) -> Result<HalfInteger> {
    WordMetric::new(
        group,
        gens,
        DEFAULT_METRIC_RADIUS,
        cap,
        super::DEFAULT_BUDGET,
    )?
    .gromov_product(x, y)
}

pub fn busemann_finite(
    group: &Group,
    x: &GroupElement,
    z: &GroupElement,
    gens: &GeneratingSet,
    cap: u32,
) -> Result<i64> {
    WordMetric::new(
        group,
        gens,
        DEFAULT_METRIC_RADIUS,
        cap,
        super::DEFAULT_BUDGET,
    )?
    .busemann(x, z)
}

/// Result of a four-point scan over a ball around the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HyperbolicityEstimate {
    pub delta: HalfInteger,
    pub radius: usize,
    #[serde(serialize_with = "serialize_identity")]
    pub basepoint: GroupElement,
}

fn serialize_identity<S: Serializer>(
    x: &GroupElement,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{:?}", x.normal_form()))
}

/// Smallest `delta` such that `(x|y) >= min((x|z), (z|y)) - delta` for all
/// `x, y, z` in `B_T(o, radius)`, with products based at the identity.
pub fn estimate_delta(
    group: &Group,
    gens: &GeneratingSet,
    radius: usize,
    budget: usize,
) -> Result<HyperbolicityEstimate> {
    let big = Ball::explore(group, gens, 2 * radius, budget)?;
    let m = big.sphere_range(radius).end;
    let len: Vec<i64> = (0..m).map(|i| big.length(i) as i64).collect();
    let inverses: Vec<Word> = (0..m)
        .map(|i| {
            group
                .inverse(&big.element(i))
                .map(|x| x.normal_form().to_vec())
        })
        .collect::<Result<_>>()?;
    // doubled Gromov products for all pairs
    let mut gp = vec![0i64; m * m];
    let mut buf = Word::new();
    for i in 0..m {
        for j in i..m {
            group.multiply_into(&inverses[i], big.word(j), &mut buf)?;
            let d = big
                .index_of(&buf)
                .map(|k| big.length(k) as i64)
                .ok_or_else(|| {
                    Error::Precondition("distance within a ball exceeds its diameter".into())
                })?;
            let v = len[i] + len[j] - d;
            gp[i * m + j] = v;
            gp[j * m + i] = v;
        }
    }
    let mut delta2 = 0i64;
    for x in 0..m {
        for y in x..m {
            let xy = gp[x * m + y];
            for z in 0..m {
                let v = gp[x * m + z].min(gp[z * m + y]) - xy;
                delta2 = delta2.max(v);
            }
        }
    }
    Ok(HyperbolicityEstimate {
        delta: HalfInteger::from_doubled(delta2),
        radius,
        basepoint: GroupElement::identity(),
    })
}

/// Word lengths over `T` of the prefixes of a long geodesic, computed by
/// breadth-first search restricted to a tube of base-metric width `width`
/// around the path.
///
/// Tube distances are upper bounds for true distances. In a hyperbolic
/// group geodesics for `T` fellow-travel base geodesics, so the bound is
/// exact once the width exceeds the fellow-traveller constant;
/// [`TubeMetric::calibrate`] finds that width against [`WordMetric`].
#[derive(Debug, Clone)]
pub struct TubeMetric {
    group: Group,
    gens: GeneratingSet,
    width: usize,
    offsets: Vec<Word>,
}

impl TubeMetric {
    pub fn new(group: &Group, gens: &GeneratingSet, width: usize, budget: usize) -> Result<Self> {
        let ball = Ball::explore(group, group.base(), width, budget)?;
        let offsets = (0..ball.len()).map(|i| ball.word(i).to_vec()).collect();
        Ok(TubeMetric {
            group: group.clone(),
            gens: gens.clone(),
            width,
            offsets,
        })
    }

    /// The least width in `0..=max_width` whose tube lengths match exact
    /// lengths on every element of the base sphere of radius `radius`, plus
    /// one for margin.
    pub fn calibrate(
        group: &Group,
        gens: &GeneratingSet,
        exact: &WordMetric,
        radius: usize,
        max_width: usize,
        budget: usize,
    ) -> Result<Self> {
        let base_ball = Ball::explore(group, group.base(), radius, budget)?;
        let range = base_ball.sphere_range(radius);
        let targets: Vec<u32> = range
            .clone()
            .map(|i| exact.length_of(base_ball.word(i)))
            .collect::<Result<_>>()?;
        for width in 0..=max_width {
            let tube = TubeMetric::new(group, gens, width, budget)?;
            let mut ok = true;
            for (i, &target) in range.clone().zip(&targets) {
                let path = base_ball.word(i);
                if tube.lengths_along(path)?.last() != Some(&target) {
                    ok = false;
                    break;
                }
            }
            if ok {
                return TubeMetric::new(group, gens, width + 1, budget);
            }
        }
        Err(Error::Precondition(format!(
            "no tube width up to {max_width} reproduces exact lengths at radius {radius}"
        )))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// `|p_k|_T` for every prefix `p_k` of `path`, a base-geodesic word.
    pub fn lengths_along(&self, path: &[Letter]) -> Result<Vec<u32>> {
        let mut tube = ElementSet::new();
        let mut prefix_index = Vec::with_capacity(path.len() + 1);
        let mut prefix = Word::new();
        let mut buf = Word::new();
        for k in 0..=path.len() {
            if k > 0 {
                self.group
                    .multiply_into(&prefix.clone(), &path[k - 1..k], &mut prefix)?;
            }
            prefix_index.push(tube.insert(&prefix).0);
            for h in &self.offsets {
                self.group.multiply_into(&prefix, h, &mut buf)?;
                tube.insert(&buf);
            }
        }
        let n = tube.len();
        let mut dist = vec![u32::MAX; n];
        let origin = prefix_index[0];
        dist[origin] = 0;
        let mut queue = std::collections::VecDeque::from([origin]);
        let mut current = Word::new();
        while let Some(v) = queue.pop_front() {
            current.clear();
            current.extend_from_slice(tube.word(v));
            for t in 0..self.gens.len() {
                self.group
                    .multiply_into(&current, self.gens.base_word(t as Letter), &mut buf)?;
                if let Some(u) = tube.get(&buf) {
                    if dist[u] == u32::MAX {
                        dist[u] = dist[v] + 1;
                        queue.push_back(u);
                    }
                }
            }
        }
        Ok(prefix_index.into_iter().map(|i| dist[i]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_BUDGET;

    fn f2() -> Group {
        Group::free(&["a", "b"]).unwrap()
    }

    fn with_ab(g: &Group) -> GeneratingSet {
        let words: Vec<Word> = ["a", "b", "a b"]
            .iter()
            .map(|w| g.base().parse_word(w).unwrap())
            .collect();
        g.symmetric_set("Sstar", &words).unwrap()
    }

    #[test]
    fn lengths_in_free_group() {
        let g = f2();
        let t = with_ab(&g);
        let abab = g.parse_element("a b a b").unwrap();
        assert_eq!(word_length(&g, &abab, &t, 64).unwrap(), 2);
        assert_eq!(word_length(&g, &g.identity(), &t, 64).unwrap(), 0);
        let aab = g.parse_element("a a b").unwrap();
        assert_eq!(word_length(&g, &aab, g.base(), 64).unwrap(), 3);
    }

    #[test]
    fn meet_in_middle_beyond_ball() {
        let g = f2();
        let t = with_ab(&g);
        let metric = WordMetric::new(&g, &t, 2, 64, DEFAULT_BUDGET).unwrap();
        let x = g.parse_element("a b a b a b a").unwrap();
        assert_eq!(metric.length(&x).unwrap(), 4);
        let capped = WordMetric::new(&g, &t, 2, 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(capped.length(&x), Err(Error::CapExceeded { cap: 3 }));
    }

    #[test]
    fn gromov_products_and_busemann() {
        let g = f2();
        let s = g.base();
        let p = |a: &str, b: &str| {
            gromov_product(
                &g,
                &g.parse_element(a).unwrap(),
                &g.parse_element(b).unwrap(),
                s,
                64,
            )
            .unwrap()
        };
        assert_eq!(p("a b", "a B"), HalfInteger::from_int(1));
        assert_eq!(p("a", "A"), HalfInteger::from_int(0));
        assert_eq!(p("a b a", "a b a"), HalfInteger::from_int(3));
        let b = |x: &str, z: &str| {
            busemann_finite(
                &g,
                &g.parse_element(x).unwrap(),
                &g.parse_element(z).unwrap(),
                s,
                64,
            )
            .unwrap()
        };
        assert_eq!(b("a", "a^3"), -1);
        assert_eq!(b("a", "b^3"), 1);
        assert_eq!(b("e", "b^3"), 0);
    }

    #[test]
    fn free_group_is_zero_hyperbolic() {
        let g = f2();
        for r in 0..=3 {
            let est = estimate_delta(&g, g.base(), r, DEFAULT_BUDGET).unwrap();
            assert_eq!(est.delta, HalfInteger::from_int(0));
            assert_eq!(est.radius, r);
        }
    }

    #[test]
    fn half_integer_display() {
        assert_eq!(HalfInteger::from_doubled(3).to_string(), "1.5");
        assert_eq!(HalfInteger::from_doubled(4).to_string(), "2");
    }

    #[test]
    fn tube_matches_exact_lengths() {
        let g = f2();
        let t = with_ab(&g);
        let exact = WordMetric::new(&g, &t, 4, 64, DEFAULT_BUDGET).unwrap();
        let tube = TubeMetric::calibrate(&g, &t, &exact, 5, 4, DEFAULT_BUDGET).unwrap();
        let path = g.parse_element("a b a b a a b").unwrap();
        let lengths = tube.lengths_along(path.normal_form()).unwrap();
        for (k, &l) in lengths.iter().enumerate() {
            let prefix = g.normalize(&path.normal_form()[..k]).unwrap();
            assert_eq!(l, exact.length(&prefix).unwrap());
        }
    }
}
