//! Interaction-picture Runge-Kutta integration of the driven Lindblad
//! equation.
//!
//! In the lab frame (angular units, rad/ns) the master equation reads
//!
//! ```text
//! dρ/dt = -i[2π(diag(ε) + Ω(t)·n_op), ρ] + γ·D[b]ρ + 2γ_φ·D[b†b]ρ
//! ```
//!
//! with level energies `ε` in GHz and the drive `Ω(t)` in GHz. The bare
//! energies are rotated away exactly: in the interaction picture each matrix
//! element carries phases `u_j(t) = e^{i·2π·ε_j·t}`, the drive Hamiltonian
//! twists to `ω_d(t)·n_jk·u_j·ū_k`, the lowering operator twists to
//! `√(j+1)·u_j·ū_{j+1}`, and the dephasing dissipator is invariant. The
//! classic fourth-order Runge-Kutta stepper then only has to resolve the
//! drive carrier (~6.3 GHz) instead of the full level splittings, and free
//! evolution is exact by construction. Dissipators are evaluated inside
//! every stage, not split off.
//!
//! Returned density matrices are always in the lab frame.

use mlqoc_pulse::{drive_at, GaussianFilter, PixelPulse};

use crate::distortion::apply_distortion;
use crate::{DensityMatrix, DeviceConfig, DeviceError};

/// Matrix elements of `n_op` below this magnitude are dropped from the
/// drive coupling; parity makes roughly half of them vanish identically.
const NOP_CUTOFF: f64 = 1e-12;

/// Interaction-picture phases are renormalized to unit magnitude this often
/// to stop rounding drift over long integrations.
const PHASE_RENORM_INTERVAL: usize = 4096;

/// Complex matrix scratch in the kernel layout (split re/im, row-major).
#[derive(Clone)]
struct Cm {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Cm {
    fn zeros(n: usize) -> Self {
        Self { re: vec![0.0; n * n], im: vec![0.0; n * n] }
    }
}

/// Lindblad right-hand side at one stage.
///
/// `u_re`/`u_im` hold the interaction-picture phases at the stage time and
/// `wd` the drive in rad/ns; the result lands in `out`, using `comm` as
/// scratch for the drive commutator.
#[allow(clippy::too_many_arguments)]
fn rhs(
    n: usize,
    nnz: &[(usize, usize, f64)],
    decay: &[f64],
    relax: &[f64],
    rho: &Cm,
    u_re: &[f64],
    u_im: &[f64],
    wd: f64,
    comm: &mut Cm,
    out: &mut Cm,
) {
    let cr = &mut comm.re;
    let ci = &mut comm.im;
    cr.fill(0.0);
    ci.fill(0.0);

    // comm = M·ρ - ρ·M with M_jk = n_jk·u_j·ū_k.
    for &(j, k, v) in nnz {
        let mr = v * (u_re[j] * u_re[k] + u_im[j] * u_im[k]);
        let mi = v * (u_im[j] * u_re[k] - u_re[j] * u_im[k]);
        let row_j = j * n;
        let row_k = k * n;
        for c in 0..n {
            // (M·ρ)_{j,c} += m · ρ_{k,c}
            cr[row_j + c] += mr * rho.re[row_k + c] - mi * rho.im[row_k + c];
            ci[row_j + c] += mr * rho.im[row_k + c] + mi * rho.re[row_k + c];
        }
        for r in 0..n {
            // (ρ·M)_{r,k} -= ρ_{r,j} · m
            cr[r * n + k] -= rho.re[r * n + j] * mr - rho.im[r * n + j] * mi;
            ci[r * n + k] -= rho.re[r * n + j] * mi + rho.im[r * n + j] * mr;
        }
    }

    // out = -i·wd·comm + decay ⊙ ρ.
    for i in 0..n * n {
        out.re[i] = wd * ci[i] + decay[i] * rho.re[i];
        out.im[i] = -wd * cr[i] + decay[i] * rho.im[i];
    }

    // Relaxation sandwich: out_jk += γ√((j+1)(k+1))·p_j·p̄_k·ρ_{j+1,k+1}
    // with the twisted-lowering phases p_j = u_j·ū_{j+1}.
    let m = n - 1;
    for j in 0..m {
        let pjr = u_re[j] * u_re[j + 1] + u_im[j] * u_im[j + 1];
        let pji = u_im[j] * u_re[j + 1] - u_re[j] * u_im[j + 1];
        for k in 0..m {
            let pkr = u_re[k] * u_re[k + 1] + u_im[k] * u_im[k + 1];
            let pki = u_im[k] * u_re[k + 1] - u_re[k] * u_im[k + 1];
            // s = p_j · conj(p_k)
            let sr = pjr * pkr + pji * pki;
            let si = pji * pkr - pjr * pki;
            let w = relax[j * m + k];
            let src = (j + 1) * n + (k + 1);
            let (rr, ri) = (rho.re[src], rho.im[src]);
            out.re[j * n + k] += w * (sr * rr - si * ri);
            out.im[j * n + k] += w * (sr * ri + si * rr);
        }
    }
}

/// Precomputed operators and reusable buffers for one integration run.
struct Propagator {
    n: usize,
    /// Step in ns, adjusted to divide the snapshot interval exactly.
    dt: f64,
    /// Nonzero drive couplings `(j, k, n_jk)`, both triangles.
    nnz: Vec<(usize, usize, f64)>,
    /// Per-element decay `-(γ(j+k)/2 + γ_φ(j-k)²)`, row-major.
    decay: Vec<f64>,
    /// Sandwich weights `γ·√((j+1)(k+1))` for `j, k < n-1`.
    relax: Vec<f64>,
    /// Half-step phase increments `e^{i·2π·ε_j·dt/2}`.
    eh_re: Vec<f64>,
    eh_im: Vec<f64>,
    /// Phases at the current step start, half step, and step end.
    u0_re: Vec<f64>,
    u0_im: Vec<f64>,
    uh_re: Vec<f64>,
    uh_im: Vec<f64>,
    u1_re: Vec<f64>,
    u1_im: Vec<f64>,
    k1: Cm,
    k2: Cm,
    k3: Cm,
    k4: Cm,
    tmp: Cm,
    comm: Cm,
}

impl Propagator {
    fn new(cfg: &DeviceConfig, dt: f64) -> Self {
        let sys = &cfg.eigensystem;
        let n = sys.n_levels();
        let gamma = cfg.gamma_per_ns();
        let gamma_phi = cfg.gamma_phi_per_ns();

        let mut nnz = Vec::new();
        for j in 0..n {
            for k in 0..n {
                let v = sys.n_op[(j, k)];
                if v.abs() > NOP_CUTOFF {
                    nnz.push((j, k, v));
                }
            }
        }

        let mut decay = vec![0.0; n * n];
        for j in 0..n {
            for k in 0..n {
                let dd = j as f64 - k as f64;
                decay[j * n + k] = -(0.5 * gamma * (j + k) as f64 + gamma_phi * dd * dd);
            }
        }
        let m = n - 1;
        let mut relax = vec![0.0; m * m];
        for j in 0..m {
            for k in 0..m {
                relax[j * m + k] = gamma * (((j + 1) * (k + 1)) as f64).sqrt();
            }
        }

        let mut eh_re = vec![0.0; n];
        let mut eh_im = vec![0.0; n];
        for j in 0..n {
            let (s, c) = (std::f64::consts::TAU * sys.energies_ghz[j] * 0.5 * dt).sin_cos();
            eh_re[j] = c;
            eh_im[j] = s;
        }

        Self {
            n,
            dt,
            nnz,
            decay,
            relax,
            eh_re,
            eh_im,
            u0_re: vec![1.0; n],
            u0_im: vec![0.0; n],
            uh_re: vec![0.0; n],
            uh_im: vec![0.0; n],
            u1_re: vec![0.0; n],
            u1_im: vec![0.0; n],
            k1: Cm::zeros(n),
            k2: Cm::zeros(n),
            k3: Cm::zeros(n),
            k4: Cm::zeros(n),
            tmp: Cm::zeros(n),
            comm: Cm::zeros(n),
        }
    }

    /// One RK4 step from time-step index `s`; `wd_half` holds the drive in
    /// rad/ns on the half-step grid (index `2s` is the step start).
    fn step(&mut self, rho: &mut Cm, s: usize, wd_half: &[f64]) {
        let n2 = self.n * self.n;
        let dt = self.dt;

        // Advance the phases to the stage times t + dt/2 and t + dt.
        for j in 0..self.n {
            self.uh_re[j] = self.u0_re[j] * self.eh_re[j] - self.u0_im[j] * self.eh_im[j];
            self.uh_im[j] = self.u0_re[j] * self.eh_im[j] + self.u0_im[j] * self.eh_re[j];
            self.u1_re[j] = self.uh_re[j] * self.eh_re[j] - self.uh_im[j] * self.eh_im[j];
            self.u1_im[j] = self.uh_re[j] * self.eh_im[j] + self.uh_im[j] * self.eh_re[j];
        }

        rhs(
            self.n, &self.nnz, &self.decay, &self.relax, rho, &self.u0_re, &self.u0_im,
            wd_half[2 * s], &mut self.comm, &mut self.k1,
        );
        for i in 0..n2 {
            self.tmp.re[i] = rho.re[i] + 0.5 * dt * self.k1.re[i];
            self.tmp.im[i] = rho.im[i] + 0.5 * dt * self.k1.im[i];
        }
        rhs(
            self.n, &self.nnz, &self.decay, &self.relax, &self.tmp, &self.uh_re, &self.uh_im,
            wd_half[2 * s + 1], &mut self.comm, &mut self.k2,
        );
        for i in 0..n2 {
            self.tmp.re[i] = rho.re[i] + 0.5 * dt * self.k2.re[i];
            self.tmp.im[i] = rho.im[i] + 0.5 * dt * self.k2.im[i];
        }
        rhs(
            self.n, &self.nnz, &self.decay, &self.relax, &self.tmp, &self.uh_re, &self.uh_im,
            wd_half[2 * s + 1], &mut self.comm, &mut self.k3,
        );
        for i in 0..n2 {
            self.tmp.re[i] = rho.re[i] + dt * self.k3.re[i];
            self.tmp.im[i] = rho.im[i] + dt * self.k3.im[i];
        }
        rhs(
            self.n, &self.nnz, &self.decay, &self.relax, &self.tmp, &self.u1_re, &self.u1_im,
            wd_half[2 * s + 2], &mut self.comm, &mut self.k4,
        );

        let w = dt / 6.0;
        for i in 0..n2 {
            rho.re[i] +=
                w * (self.k1.re[i] + 2.0 * self.k2.re[i] + 2.0 * self.k3.re[i] + self.k4.re[i]);
            rho.im[i] +=
                w * (self.k1.im[i] + 2.0 * self.k2.im[i] + 2.0 * self.k3.im[i] + self.k4.im[i]);
        }

        self.u0_re.copy_from_slice(&self.u1_re);
        self.u0_im.copy_from_slice(&self.u1_im);
        if (s + 1) % PHASE_RENORM_INTERVAL == 0 {
            for j in 0..self.n {
                let norm = (self.u0_re[j] * self.u0_re[j] + self.u0_im[j] * self.u0_im[j]).sqrt();
                self.u0_re[j] /= norm;
                self.u0_im[j] /= norm;
            }
        }
    }

    /// Undo the interaction-picture twist: `ρ_lab,jk = ū_j · ρ̃_jk · u_k`.
    fn untwist(&self, rho: &Cm) -> DensityMatrix {
        let n = self.n;
        let mut out = DensityMatrix::zeros(n);
        for j in 0..n {
            for k in 0..n {
                // phase = ū_j · u_k
                let pr = self.u0_re[j] * self.u0_re[k] + self.u0_im[j] * self.u0_im[k];
                let pi = self.u0_re[j] * self.u0_im[k] - self.u0_im[j] * self.u0_re[k];
                let (rr, ri) = (rho.re[j * n + k], rho.im[j * n + k]);
                out.set(j, k, pr * rr - pi * ri, pr * ri + pi * rr);
            }
        }
        out
    }
}

fn check_state(cfg: &DeviceConfig, rho0: &DensityMatrix) -> Result<(), DeviceError> {
    cfg.validate()?;
    if rho0.n_levels() != cfg.eigensystem.n_levels() {
        return Err(DeviceError::LevelMismatch {
            expected: cfg.eigensystem.n_levels(),
            got: rho0.n_levels(),
        });
    }
    Ok(())
}

/// Split a snapshot interval into whole integrator steps.
fn steps_per_interval(interval_ns: f64, dt_ns: f64) -> usize {
    ((interval_ns / dt_ns).round() as usize).max(1)
}

fn run(
    cfg: &DeviceConfig,
    rho0: &DensityMatrix,
    dt: f64,
    n_snapshots: usize,
    steps_per_snapshot: usize,
    wd_half: &[f64],
) -> Vec<DensityMatrix> {
    let mut prop = Propagator::new(cfg, dt);
    let n = rho0.n_levels();
    let mut rho = Cm::zeros(n);
    let (re0, im0) = rho0.parts();
    rho.re.copy_from_slice(re0);
    rho.im.copy_from_slice(im0);

    let mut out = Vec::with_capacity(n_snapshots + 1);
    out.push(rho0.clone());
    let mut s = 0;
    for _ in 0..n_snapshots {
        for _ in 0..steps_per_snapshot {
            prop.step(&mut rho, s, wd_half);
            s += 1;
        }
        out.push(prop.untwist(&rho));
    }
    out
}

/// Evolve `rho0` under a pixel pulse through the full synthesis chain
/// (optional distortion, then Gaussian filtering, then LO mixing).
///
/// Returns lab-frame density matrices at every pixel boundary, `t = 0`
/// included, so a pulse of `N` pixels yields `N + 1` states.
pub fn evolve(
    rho0: &DensityMatrix,
    pulse: &PixelPulse,
    cfg: &DeviceConfig,
) -> Result<Vec<DensityMatrix>, DeviceError> {
    let mut out = evolve_set(std::slice::from_ref(rho0), pulse, cfg)?;
    Ok(out.pop().expect("one trajectory per initial state"))
}

/// Evolve several initial states under the same pulse, reusing the sampled
/// drive across trajectories (the drive table is a sizable fraction of one
/// trajectory's cost). Returns one boundary-state vector per initial state.
pub fn evolve_set(
    rho0s: &[DensityMatrix],
    pulse: &PixelPulse,
    cfg: &DeviceConfig,
) -> Result<Vec<Vec<DensityMatrix>>, DeviceError> {
    for rho0 in rho0s {
        check_state(cfg, rho0)?;
    }
    let driven = match &cfg.distortion {
        Some(spec) => apply_distortion(spec, pulse)?,
        None => pulse.clone(),
    };
    let filter = GaussianFilter::from_settings(&cfg.mix, driven.dt_ns)?;
    let lo = cfg.mix.omega_lo_ghz;

    let spp = steps_per_interval(driven.dt_ns, cfg.dt_ns());
    let dt = driven.dt_ns / spp as f64;
    let n_steps = driven.n_pixels() * spp;

    // Drive in rad/ns on the half-step grid; every trajectory over the same
    // pulse shares this table.
    let wd_half: Vec<f64> = (0..=2 * n_steps)
        .map(|i| {
            let t = 0.5 * i as f64 * dt;
            std::f64::consts::TAU * 1e-3 * drive_at(&filter, &driven, lo, t)
        })
        .collect();

    Ok(rho0s
        .iter()
        .map(|rho0| run(cfg, rho0, dt, driven.n_pixels(), spp, &wd_half))
        .collect())
}

/// Evolve `rho0` under an explicitly supplied drive `Ω(t)` in MHz, bypassing
/// the pulse synthesis chain. Intended for analytic reference drives in
/// integrator verification; distortion settings are ignored.
///
/// `duration_ns` must be a whole number of ns; states are returned at every
/// nanosecond boundary.
pub fn evolve_drive(
    rho0: &DensityMatrix,
    drive_mhz: impl Fn(f64) -> f64,
    duration_ns: f64,
    cfg: &DeviceConfig,
) -> Result<Vec<DensityMatrix>, DeviceError> {
    check_state(cfg, rho0)?;
    let n_ns = duration_ns.round();
    if !(duration_ns > 0.0) || (duration_ns - n_ns).abs() > 1e-9 {
        return Err(DeviceError::BadConfig("duration must be a positive whole number of ns"));
    }
    let n_ns = n_ns as usize;
    let spp = steps_per_interval(1.0, cfg.dt_ns());
    let dt = 1.0 / spp as f64;
    let n_steps = n_ns * spp;

    let wd_half: Vec<f64> = (0..=2 * n_steps)
        .map(|i| {
            let t = 0.5 * i as f64 * dt;
            std::f64::consts::TAU * 1e-3 * drive_mhz(t)
        })
        .collect();

    Ok(run(cfg, rho0, dt, n_ns, spp, &wd_half))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{cardinal_state, qubit_bloch};

    fn device() -> DeviceConfig {
        DeviceConfig::standard().unwrap()
    }

    #[test]
    fn zero_drive_keeps_the_frame_bloch_vector_static() {
        let mut cfg = device();
        cfg.gamma_khz = 0.0;
        cfg.gamma_phi_khz = 0.0;
        let rho0 = cardinal_state(4, 5).unwrap();
        let states = evolve(&rho0, &PixelPulse::zeros(30, 1.0), &cfg).unwrap();
        assert_eq!(states.len(), 31);
        for (px, rho) in states.iter().enumerate() {
            let b = qubit_bloch(rho, px as f64, cfg.frame_freq_ghz);
            assert!(b[0].abs() < 1e-6, "pixel {px}: x = {}", b[0]);
            assert!((b[1] - 1.0).abs() < 1e-6, "pixel {px}: y = {}", b[1]);
        }
    }

    #[test]
    fn excited_state_relaxes_at_t1() {
        let cfg = device();
        let rho0 = cardinal_state(1, 5).unwrap();
        let states = evolve(&rho0, &PixelPulse::zeros(30, 1.0), &cfg).unwrap();
        let p1 = states.last().unwrap().population(1);
        let expected = (-30.0 * cfg.gamma_per_ns()).exp();
        assert!((p1 - expected).abs() < 1e-10, "p1 = {p1}, expected {expected}");
        assert!((states.last().unwrap().trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn superposition_dephases_at_t2() {
        let cfg = device();
        let rho0 = cardinal_state(2, 5).unwrap();
        let states = evolve(&rho0, &PixelPulse::zeros(20, 1.0), &cfg).unwrap();
        let rho = states.last().unwrap();
        let b = qubit_bloch(rho, 20.0, cfg.frame_freq_ghz);
        let expected = (-20.0 * cfg.gamma_2_per_ns()).exp();
        assert!((b[0] - expected).abs() < 1e-10, "x = {}, expected {expected}", b[0]);
        assert!(b[1].abs() < 1e-10);
    }

    #[test]
    fn rejects_mismatched_state_dimension() {
        let cfg = device();
        let rho0 = cardinal_state(0, 3).unwrap();
        let err = evolve(&rho0, &PixelPulse::zeros(5, 1.0), &cfg);
        assert!(matches!(err, Err(DeviceError::LevelMismatch { .. })));
    }

    #[test]
    fn rejects_fractional_reference_durations() {
        let cfg = device();
        let rho0 = cardinal_state(0, 5).unwrap();
        assert!(evolve_drive(&rho0, |_| 0.0, 10.5, &cfg).is_err());
        assert!(evolve_drive(&rho0, |_| 0.0, 0.0, &cfg).is_err());
    }
}
