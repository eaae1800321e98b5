use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::automaton::GeodesicAutomaton;
use crate::error::{Error, Result};
use crate::group::{Ball, Group, GroupElement, HalfInteger, Word};

/// Fraction of the sphere of radius `n` inside the shadow of `x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShadowMass {
    #[serde(serialize_with = "crate::report::serialize_biguint")]
    pub inside: BigUint,
    #[serde(serialize_with = "crate::report::serialize_biguint")]
    pub sphere_size: BigUint,
    /// `(R + 2 delta)`, doubled.
    pub effective_radius_doubled: i64,
}

impl ShadowMass {
    pub fn value(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.inside.clone()),
            BigInt::from(self.sphere_size.clone()),
        )
    }

    pub fn to_f64(&self) -> f64 {
        crate::distortion::ratio_to_f64(&self.value())
    }
}

/// Counts `y` with `|y|_S = n` and `(x|y)_o >= |x|_S - R'`, `R' = R + 2 delta`,
/// over the base generators of the automaton. The condition is
/// `d(x, y) <= n - |x| + 2R'`, so only a ball around `x` is searched;
/// [`Error::ResourceLimit`] if that ball exceeds `budget`.
pub fn shadow_mass(
    aut: &GeodesicAutomaton,
    group: &Group,
    x: &GroupElement,
    radius: usize,
    delta: HalfInteger,
    n: usize,
    budget: usize,
) -> Result<ShadowMass> {
    if !aut.gens().is_base() {
        return Err(Error::Precondition(
            "shadows are taken in the base metric".into(),
        ));
    }
    let k = group.base_length(x) as usize;
    if n < k + radius {
        return Err(Error::Precondition(format!(
            "n = {n} is below |x| + R = {}",
            k + radius
        )));
    }
    let sphere_size = aut.sphere_count(n);
    if sphere_size.is_zero() {
        return Err(Error::EmptySphere(n));
    }
    // doubled effective radius and search radius n - k + 2R'
    let r2 = 2 * radius as i64 + 2 * delta.doubled();
    let search = (n - k) as i64 + r2;
    let ball = Ball::explore(group, group.base(), search as usize, budget)?;
    let mut buf = Word::new();
    let mut inside = 0u64;
    for g in ball.elements().iter() {
        group.multiply_into(x.normal_form(), g, &mut buf)?;
        if buf.len() == n {
            inside += 1;
        }
    }
    Ok(ShadowMass {
        inside: BigUint::from(inside),
        sphere_size,
        effective_radius_doubled: r2,
    })
}
