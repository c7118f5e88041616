use crate::{diagonalize, TransmonEigensystem, TransmonError, TransmonParams};

/// Find the charging energy that reproduces a target qubit frequency at a
/// fixed `E_J / E_C` ratio. Bisects to well below 1 kHz.
pub fn calibrate_ec(
    target_wq_ghz: f64,
    ratio: f64,
    template: &TransmonParams,
) -> Result<(TransmonParams, TransmonEigensystem), TransmonError> {
    if !(target_wq_ghz.is_finite() && target_wq_ghz > 0.0) {
        return Err(TransmonError::NonFinite { name: "target_wq_ghz", value: target_wq_ghz });
    }
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(TransmonError::NonFinite { name: "ratio", value: ratio });
    }

    let wq_at = |ec: f64| -> Result<f64, TransmonError> {
        let params = TransmonParams { ec_ghz: ec, ej_ghz: ec * ratio, ..template.clone() };
        Ok(diagonalize(&params)?.omega_q_ghz())
    };

    // The perturbative estimate E_C (sqrt(8 r) - 1) is within a few percent,
    // so a factor-of-two window around it brackets the root.
    let ec_guess = target_wq_ghz / ((8.0 * ratio).sqrt() - 1.0);
    let (mut lo, mut hi) = (0.5 * ec_guess, 2.0 * ec_guess);
    let (f_lo, f_hi) = (wq_at(lo)? - target_wq_ghz, wq_at(hi)? - target_wq_ghz);
    if f_lo.signum() == f_hi.signum() {
        return Err(TransmonError::NoBracket { target_ghz: target_wq_ghz });
    }

    let max_iters = 200;
    for _ in 0..max_iters {
        let mid = 0.5 * (lo + hi);
        let f_mid = wq_at(mid)? - target_wq_ghz;
        if f_mid.abs() < 1e-9 || (hi - lo) < 1e-12 {
            let params = TransmonParams { ec_ghz: mid, ej_ghz: mid * ratio, ..template.clone() };
            let sys = diagonalize(&params)?;
            return Ok((params, sys));
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(TransmonError::NoConvergence(max_iters))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hits_target_frequency_within_1khz() {
        let template = TransmonParams::with_ratio(0.22, 110.0);
        let (params, sys) = calibrate_ec(6.298, 110.0, &template).unwrap();
        assert!((sys.omega_q_ghz() - 6.298).abs() < 1e-6);
        assert!((params.ej_ghz / params.ec_ghz - 110.0).abs() < 1e-12);
        assert!(params.ec_ghz > 0.218 && params.ec_ghz < 0.222);
    }

    #[test]
    fn rejects_unbracketable_target() {
        let template = TransmonParams::with_ratio(0.22, 110.0);
        assert!(calibrate_ec(f64::NAN, 110.0, &template).is_err());
    }
}
