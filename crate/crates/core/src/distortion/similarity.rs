use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Ball, GeneratingSet, Group, Letter, Word};

/// Largest increment in the last third of the deviation sequence that still
/// counts as flat.
pub const FLATNESS_TOL: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SimilarityVerdict {
    BoundedLooking,
    Growing,
}

impl std::fmt::Display for SimilarityVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SimilarityVerdict::BoundedLooking => "BOUNDED-LOOKING",
            SimilarityVerdict::Growing => "GROWING",
        })
    }
}

/// `| |w^r|_T - tau r |` along the powers of one base word.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayDeviation {
    pub word: String,
    pub deviations: Vec<f64>,
    /// Least-squares slope of the deviations against `r`.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityScan {
    pub tau: f64,
    /// Margin of the base ball beyond `radius` in which target paths may run.
    pub margin: usize,
    /// `deviations[r - 1]`: max over `|x|_S = r` of `| |x|_T - tau r |`.
    pub deviations: Vec<f64>,
    pub max_increment_last_third: f64,
    pub verdict: SimilarityVerdict,
    pub rays: Vec<RayDeviation>,
}

/// Target lengths of every element of the base ball of radius `radius`, by
/// breadth-first search over target letters inside the base ball of radius
/// `radius + margin`. Each value is an upper bound for the true length, and
/// exact once `margin` covers the distance by which target geodesics stray
/// from base geodesics. `rays` are base words whose powers are tracked.
pub fn rough_similarity_scan(
    group: &Group,
    target: &GeneratingSet,
    tau: f64,
    radius: usize,
    margin: usize,
    rays: &[Word],
    budget: usize,
) -> Result<SimilarityScan> {
    if radius == 0 {
        return Err(Error::Precondition("radius must be positive".into()));
    }
    let ball = Ball::explore(group, group.base(), radius + margin, budget)?;
    let mut dist = vec![u32::MAX; ball.len()];
    let origin = ball.index_of(&[]).unwrap();
    dist[origin] = 0;
    let mut queue = VecDeque::from([origin]);
    let mut buf = Word::new();
    while let Some(v) = queue.pop_front() {
        for t in 0..target.len() as Letter {
            group.multiply_into(ball.word(v), target.base_word(t), &mut buf)?;
            if let Some(u) = ball.index_of(&buf) {
                if dist[u] == u32::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
    }
    let deviation = |i: usize, r: usize| -> Result<f64> {
        if dist[i] == u32::MAX {
            return Err(Error::Precondition(
                "target letters do not connect the ball".into(),
            ));
        }
        Ok((dist[i] as f64 - tau * r as f64).abs())
    };
    let mut deviations = Vec::with_capacity(radius);
    for r in 1..=radius {
        let mut worst = 0.0f64;
        for i in ball.sphere_range(r) {
            worst = worst.max(deviation(i, r)?);
        }
        deviations.push(worst);
    }
    let start = radius - radius / 3;
    let max_increment_last_third = deviations[start.saturating_sub(1)..]
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    let verdict = if max_increment_last_third <= FLATNESS_TOL {
        SimilarityVerdict::BoundedLooking
    } else {
        SimilarityVerdict::Growing
    };

    let mut ray_reports = Vec::new();
    for w in rays {
        let step = group.normalize(w)?;
        let step_len = group.base_length(&step) as usize;
        if step_len == 0 {
            return Err(Error::Precondition("ray word is trivial".into()));
        }
        let mut devs = Vec::new();
        let mut x = group.identity();
        loop {
            x = group.product(&x, &step)?;
            let r = group.base_length(&x) as usize;
            if r > radius {
                break;
            }
            let i = ball.index_of(x.normal_form()).unwrap();
            devs.push(deviation(i, r)?);
        }
        ray_reports.push(RayDeviation {
            word: group.base().format_word(w),
            slope: slope(&devs),
            deviations: devs,
        });
    }
    Ok(SimilarityScan {
        tau,
        margin,
        deviations,
        max_increment_last_third,
        verdict,
        rays: ray_reports,
    })
}

/// Least-squares slope of `ys[k]` against `k + 1`.
fn slope(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    if ys.len() < 2 {
        return 0.0;
    }
    let xbar = (n + 1.0) / 2.0;
    let ybar = ys.iter().sum::<f64>() / n;
    let (num, den) = ys
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(num, den), (k, y)| {
            let dx = k as f64 + 1.0 - xbar;
            (num + dx * (y - ybar), den + dx * dx)
        });
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{parse_presentation, DEFAULT_BUDGET};

    #[test]
    fn own_metric_is_flat() {
        let g = Group::free(&["a", "b"]).unwrap();
        let scan = rough_similarity_scan(&g, g.base(), 1.0, 6, 0, &[], DEFAULT_BUDGET).unwrap();
        assert!(scan.deviations.iter().all(|&d| d == 0.0));
        assert_eq!(scan.verdict, SimilarityVerdict::BoundedLooking);
    }

    #[test]
    fn square_letter_bends_the_a_ray() {
        let g = parse_presentation(include_str!("../../groups/f2.grp")).unwrap();
        let sq = g.generating_set("Ssq").unwrap();
        let a = g.base().parse_word("a").unwrap();
        let scan = rough_similarity_scan(&g, sq, 0.9, 8, 1, &[a], DEFAULT_BUDGET).unwrap();
        let ray = &scan.rays[0];
        assert_eq!(ray.deviations.len(), 8);
        // |a^r| = ceil(r / 2)
        for (k, d) in ray.deviations.iter().enumerate() {
            let r = k as f64 + 1.0;
            assert!((d - (0.9 * r - (r / 2.0).ceil()).abs()).abs() < 1e-12);
        }
        assert!((ray.slope - 0.4).abs() < 0.05);
        assert_eq!(scan.verdict, SimilarityVerdict::Growing);
    }

    #[test]
    fn finite_group_deviation_is_bounded_by_the_diameter() {
        let g = parse_presentation(include_str!("../../groups/s3.grp")).unwrap();
        let scan = rough_similarity_scan(&g, g.base(), 1.0, 3, 0, &[], DEFAULT_BUDGET).unwrap();
        assert!(scan.deviations.iter().all(|&d| d <= 3.0));
    }

    #[test]
    fn regression_slope() {
        assert!((slope(&[1.0, 3.0, 5.0]) - 2.0).abs() < 1e-12);
    }
}
