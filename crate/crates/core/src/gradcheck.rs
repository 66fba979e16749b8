//! Central finite-difference gradient checker (double precision).
//!
//! The checker only evaluates the forward pass of the function under test,
//! so it is independent of every backward rule it validates.

use crate::error::Result;
use crate::graph::{Graph, Var};
use crate::tensor::Tensor;

/// Deterministic pseudo-random values in `[-1, 1)`.
pub fn noise(shape: &[usize], seed: u64) -> Tensor<f64> {
    let mut state = seed ^ 0x9E37_79B9_7F4A_7C15;
    Tensor::from_fn(shape, |_| {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    })
}

/// `sum(out ⊙ R)` for a fixed random `R`, so every output element matters.
pub fn project(g: &mut Graph<f64>, out: Var, seed: u64) -> Result<Var> {
    let r = g.constant(noise(g.shape(out), seed));
    let prod = g.mul(out, r)?;
    g.sum_all(prod)
}

#[derive(Debug, Clone)]
pub struct GradCheck {
    /// `‖analytic − numeric‖ / max(‖analytic‖, ‖numeric‖)` per input.
    pub relative_errors: Vec<f64>,
    pub coordinates_checked: usize,
    /// Coordinates left out because the probe straddled a kink (ReLU at zero and the like).
    pub coordinates_skipped: usize,
}

impl GradCheck {
    pub fn max_relative_error(&self) -> f64 {
        self.relative_errors.iter().copied().fold(0.0, f64::max)
    }
}

pub const KINK_TOLERANCE: f64 = 1e-3;

/// Compare backward gradients of `f(inputs)` (a scalar) against central differences.
///
/// `max_coords` caps how many coordinates of each input are perturbed; larger inputs are
/// sampled with a fixed stride. A coordinate whose forward and backward one-sided slopes
/// disagree by more than `KINK_TOLERANCE` sits on a non-differentiable point within `step`
/// and is skipped rather than compared.
pub fn check<F>(inputs: &[Tensor<f64>], step: f64, max_coords: usize, f: F) -> Result<GradCheck>
where
    F: Fn(&mut Graph<f64>, &[Var]) -> Result<Var>,
{
    let mut graph = Graph::new();
    let vars: Vec<Var> = inputs.iter().map(|t| graph.param(t.clone())).collect();
    let loss = f(&mut graph, &vars)?;
    graph.backward(loss)?;
    let analytic: Vec<Tensor<f64>> = vars
        .iter()
        .zip(inputs)
        .map(|(&v, t)| graph.grad(v).cloned().unwrap_or_else(|| Tensor::zeros(t.shape())))
        .collect();

    let eval = |perturbed: &[Tensor<f64>]| -> Result<f64> {
        let mut g = Graph::new();
        let vs: Vec<Var> = perturbed.iter().map(|t| g.constant(t.clone())).collect();
        let out = f(&mut g, &vs)?;
        Ok(g.value(out).data()[0])
    };

    let base = eval(inputs)?;
    let mut relative_errors = Vec::with_capacity(inputs.len());
    let mut coordinates_checked = 0;
    let mut coordinates_skipped = 0;
    let mut work: Vec<Tensor<f64>> = inputs.to_vec();
    for (i, input) in inputs.iter().enumerate() {
        let stride = input.len().div_ceil(max_coords.max(1));
        let offset = (i * 7) % stride;
        let (mut diff_sq, mut a_sq, mut n_sq) = (0.0, 0.0, 0.0);
        for j in (offset..input.len()).step_by(stride) {
            let orig = input.data()[j];
            work[i].data_mut()[j] = orig + step;
            let plus = eval(&work)?;
            work[i].data_mut()[j] = orig - step;
            let minus = eval(&work)?;
            work[i].data_mut()[j] = orig;
            let (fwd, bwd) = ((plus - base) / step, (base - minus) / step);
            if (fwd - bwd).abs() > KINK_TOLERANCE * fwd.abs().max(bwd.abs()) + 1e-7 {
                coordinates_skipped += 1;
                continue;
            }
            let numeric = (plus - minus) / (2.0 * step);
            let a = analytic[i].data()[j];
            diff_sq += (a - numeric).powi(2);
            a_sq += a * a;
            n_sq += numeric * numeric;
            coordinates_checked += 1;
        }
        let denom = a_sq.sqrt().max(n_sq.sqrt());
        relative_errors.push(if denom < 1e-12 { diff_sq.sqrt() } else { diff_sq.sqrt() / denom });
    }
    Ok(GradCheck { relative_errors, coordinates_checked, coordinates_skipped })
}
