use serde::Serialize;

use super::RecodedComponent;
use crate::error::{Error, Result};

/// Relative width of the Collatz–Wielandt bracket at which iteration stops.
pub const POWER_ITERATION_TOL: f64 = 1e-12;
/// Maximum number of applications of `W^p`.
pub const POWER_ITERATION_CAP: usize = 1_000_000;

/// Perron data of `W(i, j) = exp(w_i)` for `j` a successor of `i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerronSolution {
    pub lambda: f64,
    pub log_lambda: f64,
    /// Positive right eigenvector with maximum entry 1.
    pub right: Vec<f64>,
    /// Positive left eigenvector with `left · right = 1`.
    pub left: Vec<f64>,
    pub iterations: usize,
}

/// Power iteration on `W^p`, `p` the period, which is block diagonal with
/// primitive blocks over the cyclic classes. Weights are shifted by their
/// maximum so that entries stay in `(0, 1]`.
pub fn perron(rc: &RecodedComponent) -> Result<PerronSolution> {
    let n = rc.len();
    if n == 0 {
        return Err(Error::Precondition("empty component".into()));
    }
    let shift = rc.weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale: Vec<f64> = rc.weights.iter().map(|w| (w - shift).exp()).collect();
    let apply = |v: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| scale[i] * rc.successors[i].iter().map(|&j| v[j]).sum::<f64>())
            .collect()
    };
    let apply_transpose = |u: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n];
        for i in 0..n {
            let x = u[i] * scale[i];
            for &j in &rc.successors[i] {
                out[j] += x;
            }
        }
        out
    };
    let (right, lambda, it_r) = iterate(n, rc.period, &apply)?;
    let (left, _, it_l) = iterate(n, rc.period, &apply_transpose)?;
    let dot: f64 = left.iter().zip(&right).map(|(a, b)| a * b).sum();
    let left = left.into_iter().map(|x| x / dot).collect();
    Ok(PerronSolution {
        lambda: lambda * shift.exp(),
        log_lambda: lambda.ln() + shift,
        right,
        left,
        iterations: it_r.max(it_l),
    })
}

/// Returns a positive eigenvector of `apply` and its eigenvalue.
fn iterate(
    n: usize,
    period: usize,
    apply: &dyn Fn(&[f64]) -> Vec<f64>,
) -> Result<(Vec<f64>, f64, usize)> {
    let power = |v: &[f64]| (0..period).fold(v.to_vec(), |acc, _| apply(&acc));
    let mut v = vec![1.0; n];
    let mut lambda_p = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < POWER_ITERATION_CAP {
        iterations += 1;
        let w = power(&v);
        let (lo, hi) = v
            .iter()
            .zip(&w)
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), (a, b)| {
                let r = b / a;
                (lo.min(r), hi.max(r))
            });
        if hi <= 0.0 || !lo.is_finite() {
            return Err(Error::Precondition("matrix is not irreducible".into()));
        }
        let top = w.iter().copied().fold(0.0, f64::max);
        v = w.into_iter().map(|x| x / top).collect();
        lambda_p = 0.5 * (lo + hi);
        if hi - lo <= POWER_ITERATION_TOL * hi {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence { iterations });
    }
    let lambda = lambda_p.powf(1.0 / period as f64);
    // sum_{j<p} lambda^-j W^j v is an eigenvector of W itself
    let mut r = vec![0.0; n];
    let mut term = v;
    for j in 0..period {
        let c = lambda.powi(-(j as i32));
        for (ri, ti) in r.iter_mut().zip(&term) {
            *ri += c * ti;
        }
        term = apply(&term);
    }
    let top = r.iter().copied().fold(0.0, f64::max);
    Ok((r.into_iter().map(|x| x / top).collect(), lambda, iterations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sft::{components, Potential, Sft};

    fn solve(sft: &Sft, psi: &Potential) -> (RecodedComponent, PerronSolution) {
        let dec = components(sft);
        let rc = RecodedComponent::new(sft, &dec.components[0], psi).unwrap();
        let sol = perron(&rc).unwrap();
        (rc, sol)
    }

    fn residual(rc: &RecodedComponent, sol: &PerronSolution) -> f64 {
        (0..rc.len())
            .map(|i| {
                let wr: f64 = rc.weights[i].exp()
                    * rc.successors[i].iter().map(|&j| sol.right[j]).sum::<f64>();
                (wr - sol.lambda * sol.right[i]).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn golden_mean_shift() {
        // vertex 0 has a loop and an edge to 1, vertex 1 returns to 0
        let sft = Sft::from_graph(2, &[(0, 0), (0, 1), (1, 0)]);
        let (rc, sol) = solve(&sft, &Potential::Constant(0.0));
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((sol.lambda - phi).abs() < 1e-12);
        assert!(residual(&rc, &sol) < 1e-10);
        assert!(sol.right.iter().chain(&sol.left).all(|&x| x > 0.0));
    }

    #[test]
    fn periodic_component_with_weights() {
        // a 2-cycle and a 3-cycle sharing a vertex have period 1; two
        // 2-cycles sharing a vertex have period 2
        let sft = Sft::from_graph(3, &[(0, 1), (1, 0), (0, 2), (2, 0)]);
        let dec = components(&sft);
        assert_eq!(dec.components[0].period, 2);
        let psi = Potential::Edge(vec![0.5, -1.0, 2.0, 0.25]);
        let (rc, sol) = solve(&sft, &psi);
        // lambda^2 = e^{0.5 - 1} + e^{2 + 0.25}
        let expected = ((-0.5f64).exp() + 2.25f64.exp()).sqrt();
        assert!((sol.lambda - expected).abs() < 1e-12 * expected);
        assert!(residual(&rc, &sol) < 1e-10 * expected);
    }

    #[test]
    fn large_weights_do_not_overflow() {
        let sft = Sft::from_graph(1, &[(0, 0), (0, 0)]);
        let (_, sol) = solve(&sft, &Potential::Edge(vec![900.0, 900.0]));
        assert!((sol.log_lambda - (900.0 + 2f64.ln())).abs() < 1e-9);
    }
}
