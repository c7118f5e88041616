//! Adam optimizer with bias-corrected first and second moments.

use ndarray::{ArrayD, Zip};

/// Adam with the standard exponential-moving-average moment estimates.
///
/// Moment buffers are allocated lazily on the first [`Adam::step`], so one
/// optimizer can be constructed before the parameter list is known. All
/// subsequent steps must pass the same number of tensors with the same
/// shapes, in the same order.
#[derive(Debug, Clone)]
pub struct Adam {
    /// Learning rate (step size).
    pub lr: f64,
    /// Decay rate of the first-moment (mean) estimate.
    pub beta1: f64,
    /// Decay rate of the second-moment (uncentered variance) estimate.
    pub beta2: f64,
    /// Denominator floor keeping updates finite for tiny second moments.
    pub eps: f64,
    t: u64,
    m: Vec<ArrayD<f64>>,
    v: Vec<ArrayD<f64>>,
}

impl Adam {
    /// Optimizer with the conventional defaults β₁ = 0.9, β₂ = 0.999,
    /// ε = 1e-8 at the given learning rate.
    pub fn new(lr: f64) -> Self {
        Self::with_hyperparams(lr, 0.9, 0.999, 1e-8)
    }

    /// Fully specified optimizer.
    pub fn with_hyperparams(lr: f64, beta1: f64, beta2: f64, eps: f64) -> Self {
        assert!(lr > 0.0 && lr.is_finite(), "learning rate must be positive");
        assert!((0.0..1.0).contains(&beta1), "beta1 must lie in [0, 1)");
        assert!((0.0..1.0).contains(&beta2), "beta2 must lie in [0, 1)");
        assert!(eps > 0.0, "eps must be positive");
        Self {
            lr,
            beta1,
            beta2,
            eps,
            t: 0,
            m: Vec::new(),
            v: Vec::new(),
        }
    }

    /// Number of steps taken so far.
    pub fn steps(&self) -> u64 {
        self.t
    }

    /// Applies one update in place: `p ← p − lr · m̂ / (√v̂ + ε)`.
    ///
    /// # Panics
    /// If the parameter and gradient lists disagree in length or shape, or
    /// differ from the shapes seen on the first step.
    pub fn step(&mut self, params: &mut [&mut ArrayD<f64>], grads: &[ArrayD<f64>]) {
        assert_eq!(
            params.len(),
            grads.len(),
            "one gradient per parameter tensor"
        );
        if self.m.is_empty() {
            self.m = params
                .iter()
                .map(|p| ArrayD::zeros(p.raw_dim()))
                .collect();
            self.v = self.m.clone();
        }
        assert_eq!(params.len(), self.m.len(), "parameter count changed");
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for ((p, g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            assert_eq!(p.shape(), g.shape(), "gradient shape must match parameter");
            assert_eq!(p.shape(), m.shape(), "parameter shape changed");
            let (lr, b1, b2, eps) = (self.lr, self.beta1, self.beta2, self.eps);
            Zip::from(&mut **p)
                .and(g)
                .and(m)
                .and(v)
                .for_each(|p, &g, m, v| {
                    *m = b1 * *m + (1.0 - b1) * g;
                    *v = b2 * *v + (1.0 - b2) * g * g;
                    let m_hat = *m / bc1;
                    let v_hat = *v / bc2;
                    *p -= lr * m_hat / (v_hat.sqrt() + eps);
                });
        }
    }
}
