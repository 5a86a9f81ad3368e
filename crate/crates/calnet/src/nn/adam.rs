//! Adam optimizer over a flat parameter vector.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub step_size: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { step_size: 3e-4, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

/// First and second moment accumulators shaped like the parameter vector,
/// plus the step counter. The counter advances by exactly one per
/// [`AdamState::step`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub steps: u64,
}

impl AdamState {
    pub fn new(param_count: usize, config: AdamConfig) -> Self {
        AdamState { config, m: vec![0.0; param_count], v: vec![0.0; param_count], steps: 0 }
    }

    /// Standard bias-corrected Adam update, applied in place to `params`.
    ///
    /// A non-finite gradient entry aborts with a diagnostic before any
    /// parameter is touched.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::config(format!(
                "adam buffers sized {} but got params {} / grads {}",
                self.m.len(),
                params.len(),
                grads.len()
            )));
        }
        if let Some(idx) = grads.iter().position(|g| !g.is_finite()) {
            return Err(Error::Training {
                iteration: self.steps as usize,
                msg: format!("non-finite gradient at parameter index {idx}: {}", grads[idx]),
            });
        }
        self.steps += 1;
        let t = self.steps as f64;
        let AdamConfig { step_size, beta1, beta2, epsilon } = self.config;
        let bias1 = 1.0 - beta1.powf(t);
        let bias2 = 1.0 - beta2.powf(t);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * g;
            self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * g * g;
            let m_hat = self.m[i] / bias1;
            let v_hat = self.v[i] / bias2;
            params[i] -= step_size * m_hat / (v_hat.sqrt() + epsilon);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_is_a_fixed_point() {
        let mut adam = AdamState::new(3, AdamConfig::default());
        let mut params = vec![1.0, -2.0, 0.5];
        let before = params.clone();
        adam.step(&mut params, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(params, before);
        assert!(adam.m.iter().all(|&x| x == 0.0));
        assert!(adam.v.iter().all(|&x| x == 0.0));
        assert_eq!(adam.steps, 1);
    }

    #[test]
    fn first_step_magnitude_equals_step_size() {
        // With bias correction, step 1 on any constant gradient g moves by
        // step_size * g/|g| (up to epsilon).
        for g in [0.001, 1.0, 250.0] {
            let cfg = AdamConfig { step_size: 0.05, ..AdamConfig::default() };
            let mut adam = AdamState::new(1, cfg);
            let mut params = vec![3.0];
            adam.step(&mut params, &[g]).unwrap();
            let moved = (3.0 - params[0]).abs();
            assert!((moved - 0.05).abs() < 1e-4, "g={g}: moved {moved}");
        }
    }

    #[test]
    fn descends_a_convex_quadratic() {
        // f(x) = x^2, grad = 2x, five steps from x = 1.
        let cfg = AdamConfig { step_size: 0.1, ..AdamConfig::default() };
        let mut adam = AdamState::new(1, cfg);
        let mut params = vec![1.0];
        let mut prev = params[0].abs();
        for _ in 0..5 {
            let g = 2.0 * params[0];
            adam.step(&mut params, &[g]).unwrap();
            assert!(params[0].abs() < prev, "|x| must strictly decrease");
            prev = params[0].abs();
        }
    }

    #[test]
    fn non_finite_gradient_is_rejected() {
        let mut adam = AdamState::new(2, AdamConfig::default());
        let mut params = vec![1.0, 2.0];
        let err = adam.step(&mut params, &[0.1, f64::NAN]).unwrap_err();
        assert!(matches!(err, Error::Training { .. }));
        assert_eq!(params, vec![1.0, 2.0], "params untouched on failure");
        assert_eq!(adam.steps, 0);
    }

    #[test]
    fn step_counter_increments_by_one() {
        let mut adam = AdamState::new(1, AdamConfig::default());
        let mut params = vec![0.0];
        for want in 1..=4 {
            adam.step(&mut params, &[0.3]).unwrap();
            assert_eq!(adam.steps, want);
        }
    }
}
