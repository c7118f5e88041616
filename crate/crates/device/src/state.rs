//! Density matrices and qubit-block readout.

use crate::DeviceError;

/// Hermitian density matrix stored as separate real and imaginary parts in
/// row-major order, the layout the integrator kernels operate on.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

/// Preparation states used for dataset generation and fidelity estimates:
/// the six cardinal points of the qubit Bloch sphere, in the order
/// `+Z, -Z, +X, -X, +Y, -Y`.
pub const PREP_STATES: usize = 6;

/// Measurement axes, in the order `X, Y, Z`.
pub const MEAS_AXES: usize = 3;

impl DensityMatrix {
    /// The zero matrix (not a state; a building block).
    pub fn zeros(n: usize) -> Self {
        Self { n, re: vec![0.0; n * n], im: vec![0.0; n * n] }
    }

    /// Basis state `|k><k|` on `n` levels.
    pub fn basis(k: usize, n: usize) -> Self {
        assert!(k < n, "basis index {k} out of range for {n} levels");
        let mut m = Self::zeros(n);
        m.re[k * n + k] = 1.0;
        m
    }

    /// Pure qubit state `c0|0> + c1|1>` embedded in `n` levels, with the
    /// amplitudes given as `(re, im)` pairs.
    pub fn pure_qubit(c0: (f64, f64), c1: (f64, f64), n: usize) -> Self {
        assert!(n >= 2);
        let mut m = Self::zeros(n);
        let amps = [c0, c1];
        for (j, &(ar, ai)) in amps.iter().enumerate() {
            for (k, &(br, bi)) in amps.iter().enumerate() {
                // rho_jk = c_j * conj(c_k)
                m.re[j * n + k] = ar * br + ai * bi;
                m.im[j * n + k] = ai * br - ar * bi;
            }
        }
        m
    }

    /// Number of levels.
    pub fn n_levels(&self) -> usize {
        self.n
    }

    /// Element `(j, k)` as a `(re, im)` pair.
    #[inline]
    pub fn get(&self, j: usize, k: usize) -> (f64, f64) {
        let i = j * self.n + k;
        (self.re[i], self.im[i])
    }

    /// Set element `(j, k)`; the caller is responsible for Hermiticity.
    #[inline]
    pub fn set(&mut self, j: usize, k: usize, re: f64, im: f64) {
        let i = j * self.n + k;
        self.re[i] = re;
        self.im[i] = im;
    }

    /// Raw parts, for kernels and tests.
    pub fn parts(&self) -> (&[f64], &[f64]) {
        (&self.re, &self.im)
    }

    /// Trace (real part; the imaginary part of a Hermitian trace is zero).
    pub fn trace(&self) -> f64 {
        (0..self.n).map(|j| self.re[j * self.n + j]).sum()
    }

    /// Purity `Tr ρ² = Σ_{jk} |ρ_jk|²` for Hermitian ρ.
    pub fn purity(&self) -> f64 {
        self.re.iter().zip(&self.im).map(|(r, i)| r * r + i * i).sum()
    }

    /// Largest deviation from Hermiticity, for diagnostics.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.n {
            for k in 0..self.n {
                let d_re = (self.re[j * self.n + k] - self.re[k * self.n + j]).abs();
                let d_im = (self.im[j * self.n + k] + self.im[k * self.n + j]).abs();
                worst = worst.max(d_re).max(d_im);
            }
        }
        worst
    }

    /// Population of level `k`.
    pub fn population(&self, k: usize) -> f64 {
        self.re[k * self.n + k]
    }

    /// Total population outside the qubit block.
    pub fn leakage(&self) -> f64 {
        (2..self.n).map(|k| self.population(k)).sum()
    }
}

/// Cardinal preparation state `prep` (see [`PREP_STATES`]) on `n` levels.
pub fn cardinal_state(prep: usize, n: usize) -> Result<DensityMatrix, DeviceError> {
    if n < 2 {
        return Err(DeviceError::BadConfig("cardinal states need at least two levels"));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let m = match prep {
        0 => DensityMatrix::basis(0, n),
        1 => DensityMatrix::basis(1, n),
        2 => DensityMatrix::pure_qubit((r, 0.0), (r, 0.0), n),
        3 => DensityMatrix::pure_qubit((r, 0.0), (-r, 0.0), n),
        4 => DensityMatrix::pure_qubit((r, 0.0), (0.0, r), n),
        5 => DensityMatrix::pure_qubit((r, 0.0), (0.0, -r), n),
        _ => return Err(DeviceError::BadConfig("preparation index must be 0..6")),
    };
    Ok(m)
}

/// Bloch components of the (unnormalized) qubit block in a frame rotating at
/// `frame_freq_ghz`, evaluated at lab time `t_ns`.
///
/// The frame rotation multiplies `ρ_01` by `e^{-i·2π·ν·t}`; components follow
/// the usual convention `x = 2 Re ρ_01`, `y = -2 Im ρ_01`, `z = ρ_00 - ρ_11`.
/// Leakage out of the qubit block shortens the vector rather than being
/// renormalized away, matching what a calibrated dispersive readout sees.
pub fn qubit_bloch(rho_lab: &DensityMatrix, t_ns: f64, frame_freq_ghz: f64) -> [f64; 3] {
    let (re01, im01) = rho_lab.get(0, 1);
    let theta = std::f64::consts::TAU * frame_freq_ghz * t_ns;
    let (s, c) = theta.sin_cos();
    let rot_re = re01 * c + im01 * s;
    let rot_im = im01 * c - re01 * s;
    [2.0 * rot_re, -2.0 * rot_im, rho_lab.population(0) - rho_lab.population(1)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bloch_at_zero(prep: usize) -> [f64; 3] {
        qubit_bloch(&cardinal_state(prep, 5).unwrap(), 0.0, 6.298)
    }

    #[test]
    fn cardinal_states_sit_on_their_axes() {
        let expect = [
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
        ];
        for (prep, want) in expect.iter().enumerate() {
            let got = bloch_at_zero(prep);
            for a in 0..3 {
                assert!((got[a] - want[a]).abs() < 1e-12, "prep {prep} axis {a}");
            }
        }
    }

    #[test]
    fn cardinal_states_are_normalized_and_pure() {
        for prep in 0..PREP_STATES {
            let rho = cardinal_state(prep, 5).unwrap();
            assert!((rho.trace() - 1.0).abs() < 1e-15);
            assert!((rho.purity() - 1.0).abs() < 1e-15);
            assert_eq!(rho.hermiticity_defect(), 0.0);
            assert_eq!(rho.leakage(), 0.0);
        }
        assert!(cardinal_state(6, 5).is_err());
    }

    #[test]
    fn frame_rotation_carries_plus_x_around_the_equator() {
        // A lab-static +X state acquires frame phase e^{-iπ/2} = -i on ρ_01
        // after a quarter carrier period, i.e. it appears at +Y. A state
        // freely precessing at the frame frequency would instead be static.
        let rho = cardinal_state(2, 5).unwrap();
        let nu = 6.298;
        let quarter = 0.25 / nu;
        let b = qubit_bloch(&rho, quarter, nu);
        assert!(b[0].abs() < 1e-9);
        assert!((b[1] - 1.0).abs() < 1e-9);
        assert!(b[2].abs() < 1e-12);
    }
}
