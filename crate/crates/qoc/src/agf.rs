//! Average gate fidelity over the six cardinal states.
//!
//! The cardinal states form a state 2-design, so the plain mean of the state
//! fidelities `Tr(U ρ_j U† Λ(ρ_j))` over the six preparations equals the
//! Haar-average gate fidelity of the channel `Λ` against the target `U`.
//! Channel outputs may be trace-deficient (leakage) or non-positive (raw
//! model predictions); the trace formula uses them as-is.

use crate::target::{
    adjoint, cardinal_density, matmul2, re_trace_product, target_bloch_rows, unitarity_defect,
    Matrix2,
};

/// Largest tolerated `‖U†U − 1‖` for a gate target.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Average gate fidelity of `channel` against `u_target`: the mean over the
/// six cardinal states ρ_j of `Tr(U ρ_j U† · channel(ρ_j))`.
pub fn agf(channel: impl Fn(&Matrix2) -> Matrix2, u_target: &Matrix2) -> f64 {
    debug_assert!(unitarity_defect(u_target) < UNITARITY_TOL);
    let ud = adjoint(u_target);
    let mut sum = 0.0;
    for j in 0..6 {
        let rho = cardinal_density(j);
        let ideal = matmul2(&matmul2(u_target, &rho), &ud);
        sum += re_trace_product(&ideal, &channel(&rho));
    }
    sum / 6.0
}

/// AGF from per-preparation channel outputs given as `(block_trace, bloch)`
/// pairs — the form device evolution and model predictions produce. Each
/// output matrix is `(trace·I + w·σ)/2`, so the fidelity term against target
/// Bloch vector `t_j` is `(trace + t_j·w_j)/2`.
pub fn agf_from_outputs(outputs: &[(f64, [f64; 3]); 6], u_target: &Matrix2) -> f64 {
    let targets = target_bloch_rows(u_target);
    let mut sum = 0.0;
    for (t, &(trace, w)) in targets.iter().zip(outputs) {
        sum += 0.5 * (trace + t[0] * w[0] + t[1] * w[1] + t[2] * w[2]);
    }
    sum / 6.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::target::{bloch_to_density, haar_random_unitary, identity_gate, rotation_gate};
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn conjugation(u: &Matrix2) -> impl Fn(&Matrix2) -> Matrix2 + '_ {
        move |rho| matmul2(&matmul2(u, rho), &adjoint(u))
    }

    #[test]
    fn conjugation_by_the_target_scores_exactly_one() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..20 {
            let u = haar_random_unitary(&mut rng);
            let f = agf(conjugation(&u), &u);
            assert!((f - 1.0).abs() < 1e-14, "AGF {f}");
        }
        assert_eq!(agf(|rho| rho.clone(), &identity_gate()), 1.0);
    }

    #[test]
    fn global_phase_of_the_target_is_irrelevant() {
        let u = rotation_gate('x', 1.1).unwrap();
        let phase = Complex64::from_polar(1.0, 0.77);
        let u_phased = u.mapv(|x| x * phase);
        let ch = conjugation(&u);
        assert_abs_diff_eq!(agf(&ch, &u), agf(&ch, &u_phased), epsilon = 1e-14);
    }

    #[test]
    fn depolarizing_channel_gives_one_minus_half_p() {
        let half = Complex64::new(0.5, 0.0);
        for p in [0.0, 1e-6, 0.17, 0.5, 1.0] {
            let depolarize = |rho: &Matrix2| {
                let mut out: Matrix2 = rho.mapv(|x| x * (1.0 - p));
                out[(0, 0)] += half * p;
                out[(1, 1)] += half * p;
                out
            };
            let f = agf(depolarize, &identity_gate());
            assert!(
                (f - (1.0 - p / 2.0)).abs() < 1e-12,
                "p = {p}: AGF {f} vs {}",
                1.0 - p / 2.0
            );
        }
    }

    /// Random channels via their Bloch-affine action; the AGF mean is checked
    /// against the independent process-fidelity route `F̄ = (2·F_pro + 1)/3`
    /// with `F_pro` computed from the channel's action on the Pauli basis.
    #[test]
    fn cardinal_mean_matches_the_process_fidelity_route_on_random_channels() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for trial in 0..25 {
            // Random contraction + small shift, kept affine (hence linear on
            // density matrices with trace preserved).
            let m: [[f64; 3]; 3] =
                std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-0.4..0.4)));
            let shift: [f64; 3] = std::array::from_fn(|_| rng.random_range(-0.15..0.15));
            let channel = |rho: &Matrix2| {
                let b = crate::target::density_to_bloch(rho);
                let out: [f64; 3] = std::array::from_fn(|a| {
                    shift[a] + (0..3).map(|c| m[a][c] * b[c]).sum::<f64>()
                });
                bloch_to_density(out)
            };
            let u = haar_random_unitary(&mut rng);

            // Process (entanglement) fidelity from the Pauli transfer matrix:
            // F_pro = (1 + Σ_a t_aa) / 4 with t_ab = Tr(σ_a U† Λ(σ_b) U)/2,
            // evaluated by linearity from the channel on I and the Paulis.
            let sigma = |a: usize| -> Matrix2 {
                let mut v = [0.0; 3];
                v[a] = 1.0;
                let mut s: Matrix2 = bloch_to_density(v).mapv(|x| x * 2.0);
                s[(0, 0)] -= Complex64::new(1.0, 0.0);
                s[(1, 1)] -= Complex64::new(1.0, 0.0);
                s
            };
            let id2: Matrix2 = Array2::from_diag_elem(2, Complex64::new(1.0, 0.0));
            let lam_id = channel(&id2.mapv(|x| x * 0.5)).mapv(|x| x * 2.0);
            let mut diag_sum = 0.0;
            for a in 0..3 {
                // Λ(σ_a) by linearity: Λ((I+σ)/2) − Λ((I−σ)/2).
                let mut plus = [0.0; 3];
                plus[a] = 1.0;
                let mut minus = [0.0; 3];
                minus[a] = -1.0;
                let lam_sigma_arr = {
                    let p = channel(&bloch_to_density(plus));
                    let q = channel(&bloch_to_density(minus));
                    p - q
                };
                let rotated = matmul2(&matmul2(&adjoint(&u), &lam_sigma_arr), &u);
                diag_sum += re_trace_product(&sigma(a), &rotated) / 2.0;
            }
            let trace_part = re_trace_product(&id2, &matmul2(
                &matmul2(&adjoint(&u), &lam_id),
                &u,
            )) / 2.0;
            let f_pro = (trace_part + diag_sum) / 4.0;
            let expected = (2.0 * f_pro + 1.0) / 3.0;

            let got = agf(channel, &u);
            assert!(
                (got - expected).abs() < 1e-12,
                "trial {trial}: cardinal mean {got} vs process route {expected}"
            );
        }
    }

    #[test]
    fn output_form_agrees_with_the_matrix_form() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let u = haar_random_unitary(&mut rng);
        let decay = 0.83;
        let channel = |rho: &Matrix2| rho.mapv(|x| x * decay);
        let outputs: [(f64, [f64; 3]); 6] = std::array::from_fn(|j| {
            let out = channel(&cardinal_density(j));
            (
                (out[(0, 0)] + out[(1, 1)]).re,
                crate::target::density_to_bloch(&out),
            )
        });
        assert_abs_diff_eq!(
            agf(channel, &u),
            agf_from_outputs(&outputs, &u),
            epsilon = 1e-14
        );
    }
}
