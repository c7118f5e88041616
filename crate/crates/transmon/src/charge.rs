use nalgebra::DMatrix;

use crate::{TransmonError, TransmonParams};

/// Build the charge-basis Hamiltonian: diagonal `4 E_C (m - n_g)^2`,
/// first off-diagonals `-E_J / 2`. Row/column `i` corresponds to charge
/// `m = i - charge_cutoff`.
pub fn build_charge_hamiltonian(params: &TransmonParams) -> Result<DMatrix<f64>, TransmonError> {
    params.validate()?;
    let dim = params.basis_dim();
    let cutoff = params.charge_cutoff as f64;
    let mut h = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let m = i as f64 - cutoff;
        h[(i, i)] = 4.0 * params.ec_ghz * (m - params.ng).powi(2);
        if i + 1 < dim {
            h[(i, i + 1)] = -params.ej_ghz / 2.0;
            h[(i + 1, i)] = -params.ej_ghz / 2.0;
        }
    }
    Ok(h)
}
