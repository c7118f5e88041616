//! Gradient verification against central finite differences.
//!
//! The checker reports the worst-case relative error between reverse-mode
//! gradients and `(f(x + ε) − f(x − ε)) / 2ε`, with the relative error of a
//! component pair defined as `|a − n| / max(1e-8, |a| + |n|)` so that tiny
//! gradients compare in absolute terms.

use ndarray::ArrayD;

use crate::error::AutodiffError;
use crate::tape::{Tape, Var};

/// Floor of the relative-error denominator.
const DENOM_FLOOR: f64 = 1e-8;

/// A scalar-valued function of several tensors, replayable on fresh tapes.
///
/// Implemented for every suitable closure; the named trait (rather than a
/// bare `Fn` bound) lets the single-tensor and multi-tensor entry points
/// share one probing core without higher-ranked closure gymnastics.
trait TensorLoss {
    fn eval<'t>(&self, tape: &'t Tape, vars: &[Var<'t>]) -> Result<Var<'t>, AutodiffError>;
}

struct SingleInput<F>(F);

impl<F> TensorLoss for SingleInput<F>
where
    F: for<'t> Fn(&'t Tape, Var<'t>) -> Result<Var<'t>, AutodiffError>,
{
    fn eval<'t>(&self, tape: &'t Tape, vars: &[Var<'t>]) -> Result<Var<'t>, AutodiffError> {
        debug_assert_eq!(vars.len(), 1);
        (self.0)(tape, vars[0])
    }
}

struct MultiInput<F>(F);

impl<F> TensorLoss for MultiInput<F>
where
    F: for<'t> Fn(&'t Tape, &[Var<'t>]) -> Result<Var<'t>, AutodiffError>,
{
    fn eval<'t>(&self, tape: &'t Tape, vars: &[Var<'t>]) -> Result<Var<'t>, AutodiffError> {
        (self.0)(tape, vars)
    }
}

/// Worst relative error between reverse-mode and central-difference
/// gradients of a scalar function of one tensor.
pub fn grad_check<F>(f: F, x: &ArrayD<f64>, eps: f64) -> Result<f64, AutodiffError>
where
    F: for<'t> Fn(&'t Tape, Var<'t>) -> Result<Var<'t>, AutodiffError>,
{
    let probe_all = vec![(0..x.len()).collect::<Vec<_>>()];
    grad_check_at(&SingleInput(f), std::slice::from_ref(x), eps, &probe_all)
}

/// Worst relative error across every component of every input tensor.
pub fn grad_check_params<F>(
    f: F,
    xs: &[ArrayD<f64>],
    eps: f64,
) -> Result<f64, AutodiffError>
where
    F: for<'t> Fn(&'t Tape, &[Var<'t>]) -> Result<Var<'t>, AutodiffError>,
{
    let probe_all: Vec<Vec<usize>> = xs
        .iter()
        .map(|x| (0..x.len()).collect())
        .collect();
    grad_check_at(&MultiInput(f), xs, eps, &probe_all)
}

/// Like [`grad_check_params`], but probes at most `max_per_tensor` randomly
/// chosen components of each tensor — the practical variant for parameter
/// sets whose full probe would need millions of forward passes. The subset
/// is drawn deterministically from `seed`.
pub fn grad_check_params_sampled<F>(
    f: F,
    xs: &[ArrayD<f64>],
    eps: f64,
    max_per_tensor: usize,
    seed: u64,
) -> Result<f64, AutodiffError>
where
    F: for<'t> Fn(&'t Tape, &[Var<'t>]) -> Result<Var<'t>, AutodiffError>,
{
    let mut state = seed;
    let probes: Vec<Vec<usize>> = xs
        .iter()
        .map(|x| sample_indices(x.len(), max_per_tensor, &mut state))
        .collect();
    grad_check_at(&MultiInput(f), xs, eps, &probes)
}

fn grad_check_at(
    f: &dyn TensorLoss,
    xs: &[ArrayD<f64>],
    eps: f64,
    probes: &[Vec<usize>],
) -> Result<f64, AutodiffError> {
    assert!(eps > 0.0, "finite-difference step must be positive");

    // Reverse-mode gradients in one pass.
    let analytic: Vec<ArrayD<f64>> = {
        let tape = Tape::new();
        let vars: Vec<Var<'_>> = xs
            .iter()
            .map(|x| tape.param(x.clone()))
            .collect::<Result<_, _>>()?;
        let y = f.eval(&tape, &vars)?;
        y.backward()?;
        vars.iter()
            .map(|v| {
                v.grad()
                    .unwrap_or_else(|| ArrayD::zeros(v.value().raw_dim()))
            })
            .collect()
    };

    // Forward evaluation with one component of one tensor displaced.
    let eval = |tensor: usize, flat: usize, delta: f64| -> Result<f64, AutodiffError> {
        let tape = Tape::new();
        let vars: Vec<Var<'_>> = xs
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let mut x = x.clone();
                if i == tensor {
                    x.as_slice_memory_order_mut().expect("owned dense array")[flat] += delta;
                }
                tape.param(x)
            })
            .collect::<Result<_, _>>()?;
        Ok(f.eval(&tape, &vars)?.scalar())
    };

    let mut worst = 0.0f64;
    for (tensor, probe) in probes.iter().enumerate() {
        let grad = analytic[tensor]
            .as_slice_memory_order()
            .expect("owned dense array");
        for &flat in probe {
            let plus = eval(tensor, flat, eps)?;
            let minus = eval(tensor, flat, -eps)?;
            let numeric = (plus - minus) / (2.0 * eps);
            let a = grad[flat];
            let rel = (a - numeric).abs() / DENOM_FLOOR.max(a.abs() + numeric.abs());
            worst = worst.max(rel);
        }
    }
    Ok(worst)
}

/// Up to `count` distinct indices in `0..len`, drawn via splitmix64 so the
/// probe set is reproducible without extra dependencies.
fn sample_indices(len: usize, count: usize, state: &mut u64) -> Vec<usize> {
    if count >= len {
        return (0..len).collect();
    }
    let mut picked = vec![false; len];
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        let idx = (z % len as u64) as usize;
        if !picked[idx] {
            picked[idx] = true;
            out.push(idx);
        }
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr1;

    #[test]
    fn gradient_of_a_plain_sum_is_exact() {
        let x = arr1(&[0.4, -1.2, 3.0]).into_dyn();
        let err = grad_check(|_, v| Ok(v.sum()), &x, 1e-5).unwrap();
        assert!(err < 1e-10, "worst relative error {err}");
    }

    fn mean_square_loss<'t>(
        _: &'t Tape,
        vs: &[Var<'t>],
    ) -> Result<Var<'t>, AutodiffError> {
        Ok(vs[0].square().mean())
    }

    #[test]
    fn sampled_probe_agrees_with_the_full_probe_when_it_covers_everything() {
        let x = arr1(&[0.3, 0.7, -0.2]).into_dyn();
        let full = grad_check_params(mean_square_loss, std::slice::from_ref(&x), 1e-5).unwrap();
        let sampled =
            grad_check_params_sampled(mean_square_loss, std::slice::from_ref(&x), 1e-5, 10, 42)
                .unwrap();
        assert_eq!(full.to_bits(), sampled.to_bits());
    }

    #[test]
    fn probe_subsets_are_deterministic_and_within_bounds() {
        let mut s1 = 7u64;
        let mut s2 = 7u64;
        let a = sample_indices(100, 10, &mut s1);
        let b = sample_indices(100, 10, &mut s2);
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
        assert!(a.iter().all(|&i| i < 100));
        let all = sample_indices(5, 10, &mut s1);
        assert_eq!(all, vec![0, 1, 2, 3, 4]);
    }
}
