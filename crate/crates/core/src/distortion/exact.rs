use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::automaton::GeodesicAutomaton;
use crate::error::{Error, Result};
use crate::group::{GeneratingSet, Group, WordMetric};

/// `E |x|_T` over the sphere of radius `n`, exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactExpectation {
    pub n: usize,
    #[serde(serialize_with = "crate::report::serialize_biguint")]
    pub sphere_size: BigUint,
    #[serde(serialize_with = "serialize_rational")]
    pub mean_length: BigRational,
}

impl ExactExpectation {
    pub fn mean_length_f64(&self) -> f64 {
        ratio_to_f64(&self.mean_length)
    }

    /// `E |x|_T / n`, or 0 at `n = 0`.
    pub fn per_letter(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.mean_length_f64() / self.n as f64
        }
    }
}

fn serialize_rational<S: serde::Serializer>(
    x: &BigRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub(crate) fn ratio_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact expectations for `n = 0..=n_max` by enumerating each sphere through
/// the automaton. Fails with [`Error::ResourceLimit`] when a sphere has more
/// than `budget` elements.
pub fn mean_distortion_exact(
    aut: &GeodesicAutomaton,
    group: &Group,
    target: &GeneratingSet,
    n_max: usize,
    cap: u32,
    budget: usize,
) -> Result<Vec<ExactExpectation>> {
    let counts = aut.sphere_counts(n_max);
    if counts.iter().any(|c| *c > BigUint::from(budget)) {
        return Err(Error::ResourceLimit { budget });
    }
    let metric = WordMetric::new(
        group,
        target,
        crate::group::DEFAULT_METRIC_RADIUS,
        cap,
        budget,
    )?;
    let mut out = Vec::with_capacity(n_max + 1);
    for (n, count) in counts.into_iter().enumerate() {
        if count.is_zero() {
            return Err(Error::EmptySphere(n));
        }
        let mut total = 0u64;
        for x in aut.enumerate_sphere_elements(group, n) {
            total += metric.length(&x?)? as u64;
        }
        out.push(ExactExpectation {
            n,
            mean_length: BigRational::new(BigInt::from(total), BigInt::from(count.clone())),
            sphere_size: count,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::build_geodesic_automaton;
    use crate::group::{parse_presentation, DEFAULT_BUDGET};

    #[test]
    fn own_metric_has_no_distortion() {
        let g = Group::free(&["a", "b"]).unwrap();
        let aut = build_geodesic_automaton(&g, g.base(), 1, 4, DEFAULT_BUDGET).unwrap();
        let rows = mean_distortion_exact(&aut, &g, g.base(), 6, 64, DEFAULT_BUDGET).unwrap();
        assert_eq!(rows[0].mean_length, BigRational::zero());
        for row in &rows {
            assert_eq!(
                row.mean_length,
                BigRational::from_integer(BigInt::from(row.n))
            );
        }
    }

    #[test]
    fn free_group_with_product_letter() {
        let g = parse_presentation(include_str!("../../groups/f2.grp")).unwrap();
        let aut = build_geodesic_automaton(&g, g.base(), 1, 4, DEFAULT_BUDGET).unwrap();
        let sstar = g.generating_set("Sstar").unwrap();
        let rows = mean_distortion_exact(&aut, &g, sstar, 2, 64, DEFAULT_BUDGET).unwrap();
        // ab and BA shorten to one letter, the other ten elements of S_2 do not
        assert_eq!(
            rows[2].mean_length,
            BigRational::new(BigInt::from(22), BigInt::from(12))
        );
        assert_eq!(
            rows[1].mean_length,
            BigRational::from_integer(BigInt::from(1))
        );
    }

    #[test]
    fn budget_is_enforced() {
        let g = Group::free(&["a", "b"]).unwrap();
        let aut = build_geodesic_automaton(&g, g.base(), 1, 4, DEFAULT_BUDGET).unwrap();
        assert_eq!(
            mean_distortion_exact(&aut, &g, g.base(), 6, 64, 100),
            Err(Error::ResourceLimit { budget: 100 })
        );
    }
}
