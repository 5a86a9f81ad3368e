//! Diagonal Gaussian policy head over an MLP mean network.
//!
//! The standard deviation is a state-independent learned vector stored as
//! `log_std`, so `exp(log_std) > 0` by construction.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::nn::mlp::MlpParams;

pub const LN_2PI: f64 = 1.837877066409345483560659472811_f64;

/// Mean network plus state-independent log standard deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianPolicyParams {
    pub mean_net: MlpParams,
    pub log_std: Vec<f64>,
}

impl GaussianPolicyParams {
    /// Fresh policy: `tanh` hidden layers, linear mean head scaled by 0.01 so
    /// the initial policy acts near zero, `log_std` initialized to
    /// `ln(initial_std)`.
    pub fn new<R: Rng + ?Sized>(
        obs_dim: usize,
        hidden: &[usize],
        action_dim: usize,
        initial_std: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let mut dims = Vec::with_capacity(hidden.len() + 2);
        dims.push(obs_dim);
        dims.extend_from_slice(hidden);
        dims.push(action_dim);
        let mut mean_net = MlpParams::new(&dims, rng)?;
        mean_net.scale_output_layer(0.01);
        Ok(GaussianPolicyParams {
            mean_net,
            log_std: vec![initial_std.ln(); action_dim],
        })
    }

    pub fn obs_dim(&self) -> usize {
        self.mean_net.in_dim()
    }

    pub fn action_dim(&self) -> usize {
        self.log_std.len()
    }

    pub fn validate(&self) -> Result<()> {
        self.mean_net.validate()?;
        if self.mean_net.out_dim() != self.log_std.len() {
            return Err(crate::Error::config(format!(
                "mean net out_dim {} does not match log_std length {}",
                self.mean_net.out_dim(),
                self.log_std.len()
            )));
        }
        if !self.log_std.iter().all(|v| v.is_finite()) {
            return Err(crate::Error::config("log_std contains non-finite entries"));
        }
        Ok(())
    }

    /// Mean action at a state.
    pub fn mean(&self, state: &[f64]) -> Result<Vec<f64>> {
        self.mean_net.forward(state)
    }

    /// Log density of `action` at `state`:
    /// `sum_d [ -(a_d - mu_d)^2 / (2 sigma_d^2) - log sigma_d - log(2 pi)/2 ]`.
    pub fn log_prob(&self, state: &[f64], action: &[f64]) -> Result<f64> {
        let mu = self.mean(state)?;
        Ok(log_prob_given_mean(&mu, &self.log_std, action))
    }

    /// Draws `a = mu(state) + sigma ⊙ z`, `z` standard normal.
    pub fn sample<R: Rng + ?Sized>(&self, state: &[f64], rng: &mut R) -> Result<Vec<f64>> {
        let mut mu = self.mean(state)?;
        for (m, ls) in mu.iter_mut().zip(&self.log_std) {
            let z: f64 = rng.sample(StandardNormal);
            *m += ls.exp() * z;
        }
        Ok(mu)
    }

    /// Differential entropy of the diagonal Gaussian, independent of state:
    /// `sum_d (log sigma_d + (1 + log 2 pi)/2)`.
    pub fn entropy(&self) -> f64 {
        self.log_std.iter().map(|ls| ls + 0.5 * (1.0 + LN_2PI)).sum()
    }

    pub fn param_count(&self) -> usize {
        self.mean_net.param_count() + self.log_std.len()
    }

    /// Flat layout: mean-net parameters (see [`MlpParams::write_flat`])
    /// followed by `log_std`.
    pub fn write_flat(&self, out: &mut Vec<f64>) {
        self.mean_net.write_flat(out);
        out.extend_from_slice(&self.log_std);
    }

    pub fn read_flat(&mut self, src: &[f64]) -> usize {
        let mut pos = self.mean_net.read_flat(src);
        self.log_std.copy_from_slice(&src[pos..pos + self.log_std.len()]);
        pos += self.log_std.len();
        pos
    }
}

/// Log density with the mean already computed.
pub fn log_prob_given_mean(mu: &[f64], log_std: &[f64], action: &[f64]) -> f64 {
    debug_assert_eq!(mu.len(), action.len());
    debug_assert_eq!(mu.len(), log_std.len());
    let mut total = 0.0;
    for ((m, ls), a) in mu.iter().zip(log_std).zip(action) {
        let sigma = ls.exp();
        let z = (a - m) / sigma;
        total += -0.5 * z * z - ls - 0.5 * LN_2PI;
    }
    total
}

/// Gradient of [`log_prob_given_mean`] with respect to the mean and to
/// `log_std`:
/// `d/dmu_d = (a_d - mu_d)/sigma_d^2`, `d/dlog_std_d = z_d^2 - 1`.
pub fn log_prob_grads(
    mu: &[f64],
    log_std: &[f64],
    action: &[f64],
    dmu: &mut [f64],
    dlog_std: &mut [f64],
) {
    for d in 0..mu.len() {
        let sigma = log_std[d].exp();
        let z = (action[d] - mu[d]) / sigma;
        dmu[d] = z / sigma;
        dlog_std[d] = z * z - 1.0;
    }
}

/// Closed-form KL divergence `KL(old ‖ new)` between diagonal Gaussians:
/// `sum_d [ log(sigma_new/sigma_old)
///          + (sigma_old^2 + (mu_old - mu_new)^2) / (2 sigma_new^2) - 1/2 ]`.
pub fn kl_diag_gaussian(
    mu_old: &[f64],
    log_std_old: &[f64],
    mu_new: &[f64],
    log_std_new: &[f64],
) -> f64 {
    let mut total = 0.0;
    for d in 0..mu_old.len() {
        let var_old = (2.0 * log_std_old[d]).exp();
        let var_new = (2.0 * log_std_new[d]).exp();
        let dmu = mu_old[d] - mu_new[d];
        total += log_std_new[d] - log_std_old[d] + (var_old + dmu * dmu) / (2.0 * var_new) - 0.5;
    }
    total
}

/// Gradient of [`kl_diag_gaussian`] with respect to the *new* mean and
/// log-std.
pub fn kl_diag_gaussian_grads(
    mu_old: &[f64],
    log_std_old: &[f64],
    mu_new: &[f64],
    log_std_new: &[f64],
    dmu_new: &mut [f64],
    dlog_std_new: &mut [f64],
) {
    for d in 0..mu_old.len() {
        let var_old = (2.0 * log_std_old[d]).exp();
        let var_new = (2.0 * log_std_new[d]).exp();
        let dmu = mu_new[d] - mu_old[d];
        dmu_new[d] = dmu / var_new;
        dlog_std_new[d] = 1.0 - (var_old + dmu * dmu) / var_new;
    }
}
