use nalgebra::{DMatrix, SymmetricEigen};

use crate::{build_charge_hamiltonian, TransmonError, TransmonParams};

/// Retained low-energy eigensystem of a transmon.
///
/// Energies are shifted so the ground state sits at 0 GHz; the charge
/// operator is expressed in the retained eigenbasis with a deterministic
/// gauge (ground state's largest charge component positive, then each
/// excited state's sign chosen so `n_op[(j-1, j)] > 0`), which renders
/// `n_op` real symmetric with a positive superdiagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmonEigensystem {
    /// Parameters the eigensystem was built from.
    pub params: TransmonParams,
    /// Level energies in GHz relative to the ground state; `energies_ghz[0] == 0`.
    pub energies_ghz: Vec<f64>,
    /// Charge operator `<j| n |k>` in the retained eigenbasis.
    pub n_op: DMatrix<f64>,
}

impl TransmonEigensystem {
    pub fn n_levels(&self) -> usize {
        self.energies_ghz.len()
    }

    /// Qubit transition frequency `E_1 - E_0` in GHz.
    pub fn omega_q_ghz(&self) -> f64 {
        self.energies_ghz[1] - self.energies_ghz[0]
    }

    /// Anharmonicity `(E_2 - E_1) - (E_1 - E_0)` in GHz; negative for a transmon.
    pub fn anharmonicity_ghz(&self) -> f64 {
        self.energies_ghz[2] - 2.0 * self.energies_ghz[1] + self.energies_ghz[0]
    }

    /// Bosonic lowering operator `sum_k sqrt(k+1) |k><k+1|` on the retained levels.
    pub fn lowering_op(&self) -> DMatrix<f64> {
        let n = self.n_levels();
        let mut b = DMatrix::zeros(n, n);
        for k in 0..n - 1 {
            b[(k, k + 1)] = ((k + 1) as f64).sqrt();
        }
        b
    }

    /// Restrict to the lowest `n_levels` levels (test helper for reduced models).
    pub fn truncated(&self, n_levels: usize) -> Self {
        assert!(n_levels >= 2 && n_levels <= self.n_levels());
        Self {
            params: TransmonParams { n_levels, ..self.params.clone() },
            energies_ghz: self.energies_ghz[..n_levels].to_vec(),
            n_op: self.n_op.view((0, 0), (n_levels, n_levels)).into_owned(),
        }
    }
}

/// Diagonalize the charge-basis Hamiltonian and retain the lowest levels.
pub fn diagonalize(params: &TransmonParams) -> Result<TransmonEigensystem, TransmonError> {
    let h = build_charge_hamiltonian(params)?;
    let dim = params.basis_dim();
    let eig = SymmetricEigen::new(h);

    // Sort eigenpairs by ascending energy; the solver does not order them.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let n = params.n_levels;
    let e0 = eig.eigenvalues[order[0]];
    let energies_ghz: Vec<f64> = order[..n].iter().map(|&i| eig.eigenvalues[i] - e0).collect();

    // Gauge fix. A per-vector "largest component positive" rule is unstable
    // for odd states whose two dominant lobes tie in magnitude, so instead:
    // anchor the ground state (largest component positive, first index wins
    // ties), then pick each excited state's sign so the nearest-neighbor
    // charge element n_{j-1,j} comes out positive. Those elements are O(1),
    // which makes the gauge reproducible across cutoffs and runs.
    let cutoff = params.charge_cutoff as f64;
    let mut vecs = DMatrix::zeros(dim, n);
    for (col, &i) in order[..n].iter().enumerate() {
        let v = eig.eigenvectors.column(i);
        let sign = if col == 0 {
            let mut arg = 0;
            for (row, &x) in v.iter().enumerate() {
                if x.abs() > v[arg].abs() {
                    arg = row;
                }
            }
            if v[arg] < 0.0 { -1.0 } else { 1.0 }
        } else {
            let mut s = 0.0;
            for row in 0..dim {
                s += (row as f64 - cutoff) * vecs[(row, col - 1)] * v[row];
            }
            if s < 0.0 { -1.0 } else { 1.0 }
        };
        for row in 0..dim {
            vecs[(row, col)] = sign * v[row];
        }
    }

    // Charge operator diag(m) projected into the retained eigenbasis.
    let mut n_op = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let mut s = 0.0;
            for row in 0..dim {
                s += (row as f64 - cutoff) * vecs[(row, j)] * vecs[(row, k)];
            }
            n_op[(j, k)] = s;
        }
    }

    Ok(TransmonEigensystem { params: params.clone(), energies_ghz, n_op })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_energy_is_zero() {
        let sys = diagonalize(&TransmonParams::with_ratio(0.22, 110.0)).unwrap();
        assert_eq!(sys.energies_ghz[0], 0.0);
        assert_eq!(sys.n_levels(), 5);
        assert!(sys.energies_ghz.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn charge_operator_is_symmetric() {
        let sys = diagonalize(&TransmonParams::with_ratio(0.22, 110.0)).unwrap();
        for j in 0..5 {
            for k in 0..5 {
                assert!((sys.n_op[(j, k)] - sys.n_op[(k, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn charge_superdiagonal_is_positive() {
        let sys = diagonalize(&TransmonParams::with_ratio(0.22, 110.0)).unwrap();
        for j in 0..4 {
            assert!(sys.n_op[(j, j + 1)] > 0.0, "n[{j},{}] not positive", j + 1);
        }
    }

    #[test]
    fn lowering_op_matches_bosonic_form() {
        let sys = diagonalize(&TransmonParams::with_ratio(0.22, 110.0)).unwrap();
        let b = sys.lowering_op();
        assert_eq!(b[(0, 1)], 1.0);
        assert_eq!(b[(1, 2)], 2.0_f64.sqrt());
        assert_eq!(b[(3, 4)], 2.0);
        assert_eq!(b[(1, 0)], 0.0);
    }

    #[test]
    fn truncation_keeps_leading_block() {
        let sys = diagonalize(&TransmonParams::with_ratio(0.22, 110.0)).unwrap();
        let two = sys.truncated(2);
        assert_eq!(two.energies_ghz.len(), 2);
        assert_eq!(two.energies_ghz[1], sys.energies_ghz[1]);
        assert_eq!(two.n_op[(0, 1)], sys.n_op[(0, 1)]);
    }
}
