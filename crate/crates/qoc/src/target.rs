//! Gate targets: rotation unitaries, Haar-random unitaries, and the Bloch
//! geometry they induce on the six cardinal preparation states.

use mlqoc_model::PREP_BLOCH;
use ndarray::{array, Array2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::QocError;

/// A 2×2 complex matrix; gate targets are unitary instances of this.
pub type Matrix2 = Array2<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// The identity gate.
pub fn identity_gate() -> Matrix2 {
    array![[ONE, 0.0 * ONE], [0.0 * ONE, ONE]]
}

/// `R_axis(θ) = exp(−i θ σ_axis / 2)` for `axis` ∈ {x, y, z}.
pub fn rotation_gate(axis: char, angle: f64) -> Result<Matrix2, QocError> {
    let c = (angle / 2.0).cos();
    let s = (angle / 2.0).sin();
    let zero = Complex64::default();
    Ok(match axis {
        'x' => array![[c * ONE, -s * I], [-s * I, c * ONE]],
        'y' => array![[c * ONE, -s * ONE], [s * ONE, c * ONE]],
        'z' => array![[Complex64::new(c, -s), zero], [zero, Complex64::new(c, s)]],
        other => return Err(QocError::BadGateSpec(format!("axis '{other}'"))),
    })
}

/// A Haar-distributed 2×2 unitary: complex Ginibre matrix, QR decomposition,
/// then the R diagonal's phases folded into Q so the distribution is exactly
/// invariant. Unitary to better than 1e−12.
pub fn haar_random_unitary(rng: &mut impl Rng) -> Matrix2 {
    let mut g = [[Complex64::default(); 2]; 2];
    for row in &mut g {
        for entry in row.iter_mut() {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            *entry = Complex64::new(re, im);
        }
    }
    // Gram–Schmidt on the columns gives Q; r00 and r11 are the pivots.
    let col0 = [g[0][0], g[1][0]];
    let r00 = (col0[0].norm_sqr() + col0[1].norm_sqr()).sqrt();
    let q0 = [col0[0] / r00, col0[1] / r00];
    let proj = q0[0].conj() * g[0][1] + q0[1].conj() * g[1][1];
    let col1 = [g[0][1] - proj * q0[0], g[1][1] - proj * q0[1]];
    let r11 = (col1[0].norm_sqr() + col1[1].norm_sqr()).sqrt();
    let q1 = [col1[0] / r11, col1[1] / r11];
    // Gram–Schmidt pivots are norms, so R's diagonal is already real and
    // positive — the phase normalization that makes QR sampling exactly
    // Haar-invariant (no residual diagonal gauge to fold back in).
    array![[q0[0], q1[0]], [q0[1], q1[1]]]
}

/// `‖U†U − 1‖_max`; zero for exactly unitary matrices.
pub fn unitarity_defect(u: &Matrix2) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..2 {
        for k in 0..2 {
            let dot: Complex64 = (0..2).map(|m| u[(m, j)].conj() * u[(m, k)]).sum();
            let expect = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((dot - expect * ONE).norm());
        }
    }
    worst
}

/// Density matrix of cardinal preparation `prep` (+Z −Z +X −X +Y −Y).
pub fn cardinal_density(prep: usize) -> Matrix2 {
    let b = PREP_BLOCH[prep];
    bloch_to_density(b)
}

/// `(I + b·σ)/2` — also valid for shrunken (mixed-state) Bloch vectors.
pub fn bloch_to_density(b: [f64; 3]) -> Matrix2 {
    let half = Complex64::new(0.5, 0.0);
    array![
        [
            half * (1.0 + b[2]),
            half * Complex64::new(b[0], -b[1])
        ],
        [
            half * Complex64::new(b[0], b[1]),
            half * (1.0 - b[2])
        ]
    ]
}

/// Bloch components `Tr(σ_a m)` of a 2×2 matrix (real parts; exact for
/// Hermitian inputs).
pub fn density_to_bloch(m: &Matrix2) -> [f64; 3] {
    [
        (m[(0, 1)] + m[(1, 0)]).re,
        ((m[(0, 1)] - m[(1, 0)]) * I).re,
        (m[(0, 0)] - m[(1, 1)]).re,
    ]
}

/// `a · b` for 2×2 complex matrices.
pub fn matmul2(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = Array2::default((2, 2));
    for j in 0..2 {
        for k in 0..2 {
            out[(j, k)] = a[(j, 0)] * b[(0, k)] + a[(j, 1)] * b[(1, k)];
        }
    }
    out
}

/// Conjugate transpose.
pub fn adjoint(u: &Matrix2) -> Matrix2 {
    let mut out = Array2::default((2, 2));
    for j in 0..2 {
        for k in 0..2 {
            out[(j, k)] = u[(k, j)].conj();
        }
    }
    out
}

/// `Re Tr(a · b)`.
pub fn re_trace_product(a: &Matrix2, b: &Matrix2) -> f64 {
    let t = a[(0, 0)] * b[(0, 0)] + a[(0, 1)] * b[(1, 0)] + a[(1, 0)] * b[(0, 1)]
        + a[(1, 1)] * b[(1, 1)];
    t.re
}

/// Bloch vectors of `U ρ_j U†` for the six cardinal preparations, as 6×3
/// rows — the fidelity targets every AGF computation dots against.
pub fn target_bloch_rows(u: &Matrix2) -> [[f64; 3]; 6] {
    let ud = adjoint(u);
    let mut rows = [[0.0; 3]; 6];
    for (j, row) in rows.iter_mut().enumerate() {
        let rotated = matmul2(&matmul2(u, &cardinal_density(j)), &ud);
        *row = density_to_bloch(&rotated);
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn rotations_are_unitary_and_match_known_matrices() {
        for axis in ['x', 'y', 'z'] {
            for angle in [0.0, 0.7, std::f64::consts::PI, -std::f64::consts::FRAC_PI_2] {
                let u = rotation_gate(axis, angle).unwrap();
                assert!(unitarity_defect(&u) < 1e-14, "R_{axis}({angle})");
            }
        }
        // R_X(π) = −iσ_x.
        let u = rotation_gate('x', std::f64::consts::PI).unwrap();
        assert_abs_diff_eq!((u[(0, 1)] + I).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(u[(0, 0)].norm(), 0.0, epsilon = 1e-15);
        // R_Z(π/2) has phases e^{∓iπ/4}.
        let u = rotation_gate('z', std::f64::consts::FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(u[(0, 0)].arg(), -std::f64::consts::FRAC_PI_4, epsilon = 1e-15);
    }

    #[test]
    fn rotations_rotate_bloch_vectors_the_right_way() {
        // R_X(π) swaps ±Z and ±Y, fixes ±X.
        let t = target_bloch_rows(&rotation_gate('x', std::f64::consts::PI).unwrap());
        assert_abs_diff_eq!(t[0][2], -1.0, epsilon = 1e-14); // +Z → −Z
        assert_abs_diff_eq!(t[2][0], 1.0, epsilon = 1e-14); // +X fixed
        assert_abs_diff_eq!(t[4][1], -1.0, epsilon = 1e-14); // +Y → −Y

        // R_Z(π/2) takes +X to +Y.
        let t = target_bloch_rows(&rotation_gate('z', std::f64::consts::FRAC_PI_2).unwrap());
        assert_abs_diff_eq!(t[2][1], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t[2][0], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn haar_samples_are_unitary_with_the_right_trace_moment() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let n = 10_000;
        let mut mean_tr2 = 0.0;
        for _ in 0..n {
            let u = haar_random_unitary(&mut rng);
            assert!(unitarity_defect(&u) < 1e-12);
            let tr = u[(0, 0)] + u[(1, 1)];
            mean_tr2 += tr.norm_sqr();
        }
        mean_tr2 /= n as f64;
        // Haar second moment: E |Tr U|² = 1.
        assert!((mean_tr2 - 1.0).abs() < 0.05, "E|Tr U|² = {mean_tr2}");
    }

    #[test]
    fn haar_eigenphases_are_uniform() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let n = 10_000;
        let mut phases = Vec::with_capacity(2 * n);
        for _ in 0..n {
            let u = haar_random_unitary(&mut rng);
            // Eigenvalues of a 2×2 matrix from trace and determinant.
            let tr = u[(0, 0)] + u[(1, 1)];
            let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
            let disc = (tr * tr - 4.0 * det).sqrt();
            phases.push(((tr + disc) / 2.0).arg());
            phases.push(((tr - disc) / 2.0).arg());
        }
        phases.sort_by(f64::total_cmp);
        // Kolmogorov–Smirnov distance against uniform on (−π, π].
        let m = phases.len() as f64;
        let mut ks: f64 = 0.0;
        for (i, &p) in phases.iter().enumerate() {
            let cdf = (p + std::f64::consts::PI) / std::f64::consts::TAU;
            ks = ks.max((cdf - i as f64 / m).abs());
            ks = ks.max((cdf - (i + 1) as f64 / m).abs());
        }
        assert!(ks < 0.02, "KS distance {ks}");
    }

    #[test]
    fn bloch_round_trip_is_exact() {
        for b in [[0.0, 0.0, 1.0], [0.6, -0.3, 0.2], [0.0, 0.0, 0.0]] {
            let back = density_to_bloch(&bloch_to_density(b));
            for a in 0..3 {
                assert_abs_diff_eq!(back[a], b[a], epsilon = 1e-15);
            }
        }
    }
}
