use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{
    GeneratingSet, Group, Letter, TubeMetric, WordMetric, DEFAULT_CAP, DEFAULT_METRIC_RADIUS,
};

/// How foreign word lengths are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LengthMethod {
    /// The target set is the base set: normal-form length.
    Base,
    /// Meet-in-the-middle search.
    Exact,
    /// Exact search up to `exact_below`, tube search of `width` beyond.
    Tube { width: usize, exact_below: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LengthOptions {
    pub cap: u32,
    pub budget: usize,
    /// Radius of the precomputed ball of the exact metric.
    pub exact_radius: usize,
    /// Words of at most this many letters use the exact metric; 0 disables
    /// the tube entirely.
    pub exact_below: usize,
    /// Sphere radius on which the tube width is checked against exact lengths.
    pub calibration_radius: usize,
    pub max_width: usize,
}

impl Default for LengthOptions {
    fn default() -> Self {
        LengthOptions {
            cap: DEFAULT_CAP,
            budget: crate::group::DEFAULT_BUDGET,
            exact_radius: DEFAULT_METRIC_RADIUS,
            exact_below: 8,
            calibration_radius: 8,
            max_width: 6,
        }
    }
}

/// `|x|_T` for elements given as words over a source set.
#[derive(Debug, Clone)]
pub struct ForeignLength {
    group: Group,
    from: GeneratingSet,
    exact: Option<WordMetric>,
    tube: Option<TubeMetric>,
    exact_below: usize,
}

impl ForeignLength {
    pub fn new(
        group: &Group,
        from: &GeneratingSet,
        to: &GeneratingSet,
        opts: &LengthOptions,
    ) -> Result<Self> {
        let (exact, tube) = if to.is_base() {
            (None, None)
        } else {
            let exact = WordMetric::new(group, to, opts.exact_radius, opts.cap, opts.budget)?;
            let tube = if opts.exact_below == 0 {
                None
            } else {
                Some(TubeMetric::calibrate(
                    group,
                    to,
                    &exact,
                    opts.calibration_radius,
                    opts.max_width,
                    opts.budget,
                )?)
            };
            (Some(exact), tube)
        };
        Ok(ForeignLength {
            group: group.clone(),
            from: from.clone(),
            exact,
            tube,
            exact_below: opts.exact_below,
        })
    }

    pub fn method(&self) -> LengthMethod {
        match (&self.exact, &self.tube) {
            (None, _) => LengthMethod::Base,
            (Some(_), None) => LengthMethod::Exact,
            (Some(_), Some(t)) => LengthMethod::Tube {
                width: t.width(),
                exact_below: self.exact_below,
            },
        }
    }

    /// `|w|_T` for a word `w` over the source set.
    pub fn length(&self, word: &[Letter]) -> Result<u32> {
        let x = self.group.evaluate(&self.from, word)?;
        match (&self.exact, &self.tube) {
            (None, _) => Ok(self.group.base_length(&x)),
            (Some(_), Some(tube)) if word.len() > self.exact_below => {
                let lengths = tube.lengths_along(&self.from.to_base(word))?;
                finite(*lengths.last().unwrap())
            }
            (Some(exact), _) => exact.length(&x),
        }
    }

    /// `|w_k|_T` for every prefix `w_k` of `word`.
    pub fn lengths_along(&self, word: &[Letter]) -> Result<Vec<u32>> {
        match (&self.exact, &self.tube) {
            (Some(_), Some(tube)) if word.len() > self.exact_below => {
                // prefixes over the source set are every few base letters
                let mut base_ends = vec![0usize];
                for &t in word {
                    base_ends.push(base_ends.last().unwrap() + self.from.base_word(t).len());
                }
                let lengths = tube.lengths_along(&self.from.to_base(word))?;
                base_ends.into_iter().map(|i| finite(lengths[i])).collect()
            }
            _ => (0..=word.len()).map(|k| self.length(&word[..k])).collect(),
        }
    }
}

fn finite(d: u32) -> Result<u32> {
    if d == u32::MAX {
        Err(Error::Precondition("tube does not connect the path".into()))
    } else {
        Ok(d)
    }
}

/// `max(max_t |t|_S, max_s |s|_T)`: every ratio `|x|_T / |x|_S` lies in
/// `[1/Lip, Lip]`.
pub fn lipschitz_constant(
    group: &Group,
    s: &GeneratingSet,
    t: &GeneratingSet,
    cap: u32,
    budget: usize,
) -> Result<u32> {
    let cross = |from: &GeneratingSet, to: &GeneratingSet| -> Result<u32> {
        let metric = WordMetric::new(group, to, 2, cap, budget)?;
        (0..from.len() as Letter)
            .map(|l| metric.length(&group.evaluate(from, &[l])?))
            .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
    };
    Ok(cross(s, t)?.max(cross(t, s)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_presentation;

    #[test]
    fn tube_agrees_with_exact_lengths() {
        let g = parse_presentation(include_str!("../../groups/f2.grp")).unwrap();
        let sstar = g.generating_set("Sstar").unwrap();
        let opts = LengthOptions {
            exact_below: 2,
            calibration_radius: 5,
            ..LengthOptions::default()
        };
        let tube = ForeignLength::new(&g, g.base(), sstar, &opts).unwrap();
        assert!(matches!(tube.method(), LengthMethod::Tube { .. }));
        let exact = ForeignLength::new(
            &g,
            g.base(),
            sstar,
            &LengthOptions {
                exact_below: 0,
                ..opts
            },
        )
        .unwrap();
        assert_eq!(exact.method(), LengthMethod::Exact);
        let w = g.base().parse_word("a b a b a b b a b A B").unwrap();
        assert_eq!(tube.length(&w).unwrap(), exact.length(&w).unwrap());
        assert_eq!(
            tube.lengths_along(&w).unwrap(),
            exact.lengths_along(&w).unwrap()
        );
        assert_eq!(tube.length(&w[..6]).unwrap(), 3);
    }

    #[test]
    fn base_lengths_and_lipschitz_constants() {
        let g = parse_presentation(include_str!("../../groups/f2.grp")).unwrap();
        let s = g.base();
        let same = ForeignLength::new(&g, s, s, &LengthOptions::default()).unwrap();
        assert_eq!(same.method(), LengthMethod::Base);
        assert_eq!(
            same.lengths_along(&s.parse_word("a b A").unwrap()).unwrap(),
            vec![0, 1, 2, 3]
        );
        let sq = g.generating_set("Ssq").unwrap();
        assert_eq!(lipschitz_constant(&g, s, sq, 64, 1 << 20).unwrap(), 2);
        assert_eq!(lipschitz_constant(&g, s, s, 64, 1 << 20).unwrap(), 1);
    }
}
