/// Closed-form two-level Rabi trajectory in the rotating frame, used as an
/// oracle for the time-domain integrator.
///
/// A constant drive with Rabi rate `rabi_rate_mhz` and detuning
/// `detuning_mhz = f_qubit - f_drive` (both ordinary frequencies) rotates the
/// Bloch vector about the axis `(rabi, 0, detuning) / W` by the angle
/// `2*pi*W*t`, `W = sqrt(rabi^2 + detuning^2)`. The sign convention matches
/// the device simulator: a resonant phase-0 drive takes `+Z` toward `-Y`,
/// giving excited-state population `sin^2(pi * rabi * t)` from the ground
/// state.
///
/// Returns the Bloch vector at each requested time (ns).
pub fn rwa_reference_evolution(
    rabi_rate_mhz: f64,
    detuning_mhz: f64,
    prep_bloch: [f64; 3],
    times_ns: &[f64],
) -> Vec<[f64; 3]> {
    let rabi_ghz = rabi_rate_mhz * 1e-3;
    let det_ghz = detuning_mhz * 1e-3;
    let w = (rabi_ghz * rabi_ghz + det_ghz * det_ghz).sqrt();
    let axis = if w > 0.0 { [rabi_ghz / w, 0.0, det_ghz / w] } else { [1.0, 0.0, 0.0] };

    times_ns
        .iter()
        .map(|&t| {
            let theta = 2.0 * std::f64::consts::PI * w * t;
            rotate(prep_bloch, axis, theta)
        })
        .collect()
}

/// Rodrigues rotation of `v` about unit axis `n` by angle `theta`.
fn rotate(v: [f64; 3], n: [f64; 3], theta: f64) -> [f64; 3] {
    let (s, c) = theta.sin_cos();
    let cross = [
        n[1] * v[2] - n[2] * v[1],
        n[2] * v[0] - n[0] * v[2],
        n[0] * v[1] - n[1] * v[0],
    ];
    let dot = n[0] * v[0] + n[1] * v[1] + n[2] * v[2];
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = v[i] * c + cross[i] * s + n[i] * dot * (1.0 - c);
    }
    out
}
