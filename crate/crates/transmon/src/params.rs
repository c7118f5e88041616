use crate::TransmonError;

/// Physical and numerical parameters of the charge-basis transmon model.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmonParams {
    /// Josephson energy in GHz.
    pub ej_ghz: f64,
    /// Charging energy in GHz.
    pub ec_ghz: f64,
    /// Offset charge in Cooper-pair units; 0 for all standard configurations.
    pub ng: f64,
    /// Number of retained eigenstates.
    pub n_levels: usize,
    /// Charge basis spans `-charge_cutoff ..= +charge_cutoff`.
    pub charge_cutoff: usize,
}

impl TransmonParams {
    /// Standard parameter set: ratio `E_J / E_C` at a given charging energy,
    /// zero offset charge, five retained levels, cutoff 30.
    pub fn with_ratio(ec_ghz: f64, ratio: f64) -> Self {
        Self {
            ej_ghz: ec_ghz * ratio,
            ec_ghz,
            ng: 0.0,
            n_levels: 5,
            charge_cutoff: 30,
        }
    }

    /// Dimension of the charge basis, `2 * charge_cutoff + 1`.
    pub fn basis_dim(&self) -> usize {
        2 * self.charge_cutoff + 1
    }

    pub fn validate(&self) -> Result<(), TransmonError> {
        if !self.ej_ghz.is_finite() {
            return Err(TransmonError::NonFinite { name: "ej_ghz", value: self.ej_ghz });
        }
        if !self.ec_ghz.is_finite() {
            return Err(TransmonError::NonFinite { name: "ec_ghz", value: self.ec_ghz });
        }
        if !self.ng.is_finite() {
            return Err(TransmonError::NonFinite { name: "ng", value: self.ng });
        }
        if self.ej_ghz <= 0.0 || self.ec_ghz <= 0.0 {
            return Err(TransmonError::NonPositiveEnergy {
                ej_ghz: self.ej_ghz,
                ec_ghz: self.ec_ghz,
            });
        }
        if self.charge_cutoff < 20 {
            return Err(TransmonError::CutoffTooSmall(self.charge_cutoff));
        }
        if self.n_levels < 3 {
            return Err(TransmonError::TooFewLevels(self.n_levels));
        }
        if self.n_levels > self.basis_dim() {
            return Err(TransmonError::LevelsExceedBasis {
                requested: self.n_levels,
                basis: self.basis_dim(),
            });
        }
        Ok(())
    }
}
