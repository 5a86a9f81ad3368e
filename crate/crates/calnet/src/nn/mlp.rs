//! Dense multilayer perceptron with hand-derived backpropagation.
//!
//! Layers are affine transforms with an optional `tanh`; hidden layers are
//! `tanh`, the output layer is linear. Everything is `f64` and the gradient
//! of any linear functional of the output is computed analytically, so there
//! is no autodiff machinery and no external numeric framework.

use rand::distributions::{Distribution, Uniform};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Tanh,
    Linear,
}

impl Activation {
    #[inline]
    fn forward(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Linear => z,
        }
    }

    /// Derivative expressed through the post-activation value.
    #[inline]
    fn grad_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
            Activation::Linear => 1.0,
        }
    }
}

/// One dense layer: `a = activation(W x + b)`, weights row-major
/// `(out_dim, in_dim)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Layer {
    fn zeros(in_dim: usize, out_dim: usize, activation: Activation) -> Self {
        Layer {
            in_dim,
            out_dim,
            activation,
            weights: vec![0.0; in_dim * out_dim],
            biases: vec![0.0; out_dim],
        }
    }

    fn init_uniform<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let limit = (6.0 / (self.in_dim + self.out_dim) as f64).sqrt();
        let dist = Uniform::new_inclusive(-limit, limit);
        for w in &mut self.weights {
            *w = dist.sample(rng);
        }
        // Biases start at zero.
    }

    #[inline]
    fn forward_into(&self, input: &[f64], out: &mut [f64]) {
        debug_assert_eq!(input.len(), self.in_dim);
        debug_assert_eq!(out.len(), self.out_dim);
        for (o, slot) in out.iter_mut().enumerate() {
            let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
            let mut sum = self.biases[o];
            for (w, x) in row.iter().zip(input) {
                sum = w.mul_add(*x, sum);
            }
            *slot = self.activation.forward(sum);
        }
    }

    fn param_count(&self) -> usize {
        self.weights.len() + self.biases.len()
    }
}

/// Parameters of a fixed-topology MLP: a chain of [`Layer`]s whose dimensions
/// agree end to end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub layers: Vec<Layer>,
}

impl MlpParams {
    /// Builds a net with `tanh` hidden layers and a linear output layer,
    /// weights uniform in `±sqrt(6 / (fan_in + fan_out))`, biases zero.
    ///
    /// `dims` lists every dimension, input first: `[in, h1, ..., out]`.
    pub fn new<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::config("an MLP needs at least input and output dims"));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::config("layer dimensions must be positive"));
        }
        let mut layers = Vec::with_capacity(dims.len() - 1);
        for k in 0..dims.len() - 1 {
            let activation = if k + 2 == dims.len() {
                Activation::Linear
            } else {
                Activation::Tanh
            };
            let mut layer = Layer::zeros(dims[k], dims[k + 1], activation);
            layer.init_uniform(rng);
            layers.push(layer);
        }
        Ok(MlpParams { layers })
    }

    /// Multiplies the final layer's weights and biases by `scale`. Used to
    /// keep a freshly initialized policy head close to the zero action.
    pub fn scale_output_layer(&mut self, scale: f64) {
        if let Some(last) = self.layers.last_mut() {
            for w in &mut last.weights {
                *w *= scale;
            }
            for b in &mut last.biases {
                *b *= scale;
            }
        }
    }

    pub fn in_dim(&self) -> usize {
        self.layers.first().map_or(0, |l| l.in_dim)
    }

    pub fn out_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.out_dim)
    }

    /// Checks the structural invariants: chained dimensions and finite
    /// entries.
    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::config("MLP has no layers"));
        }
        for (k, pair) in self.layers.windows(2).enumerate() {
            if pair[0].out_dim != pair[1].in_dim {
                return Err(Error::config(format!(
                    "layer {} out_dim {} does not chain into layer {} in_dim {}",
                    k,
                    pair[0].out_dim,
                    k + 1,
                    pair[1].in_dim
                )));
            }
        }
        for (k, layer) in self.layers.iter().enumerate() {
            if layer.weights.len() != layer.in_dim * layer.out_dim
                || layer.biases.len() != layer.out_dim
            {
                return Err(Error::config(format!("layer {k} has inconsistent buffer sizes")));
            }
            if !layer.weights.iter().chain(&layer.biases).all(|v| v.is_finite()) {
                return Err(Error::config(format!("layer {k} contains non-finite entries")));
            }
        }
        Ok(())
    }

    /// Forward pass for a single input vector.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.in_dim() {
            return Err(Error::config(format!(
                "forward input length {} does not match net in_dim {}",
                input.len(),
                self.in_dim()
            )));
        }
        let mut current = input.to_vec();
        let mut next = Vec::new();
        for layer in &self.layers {
            next.resize(layer.out_dim, 0.0);
            layer.forward_into(&current, &mut next);
            std::mem::swap(&mut current, &mut next);
        }
        Ok(current)
    }

    /// Forward pass keeping every post-activation vector (input included),
    /// for reuse by the backward pass.
    fn forward_cached(&self, input: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(input.to_vec());
        for layer in &self.layers {
            let mut out = vec![0.0; layer.out_dim];
            layer.forward_into(acts.last().expect("non-empty"), &mut out);
            acts.push(out);
        }
        acts
    }

    /// Exact gradients of the scalar `upstream_grad · output` with respect to
    /// every parameter and to the input.
    ///
    /// Returns `(param_grads, input_grad)` where `param_grads` follows the
    /// [`MlpParams::write_flat`] layout.
    pub fn backward(&self, input: &[f64], upstream_grad: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut grads = vec![0.0; self.param_count()];
        let input_grad = self.backward_into(input, upstream_grad, 1.0, &mut grads)?;
        Ok((grads, input_grad))
    }

    /// Like [`MlpParams::backward`] but accumulates `scale * grad` into a
    /// caller-provided flat buffer, and returns the input gradient.
    pub fn backward_into(
        &self,
        input: &[f64],
        upstream_grad: &[f64],
        scale: f64,
        grads: &mut [f64],
    ) -> Result<Vec<f64>> {
        if input.len() != self.in_dim() {
            return Err(Error::config(format!(
                "backward input length {} does not match net in_dim {}",
                input.len(),
                self.in_dim()
            )));
        }
        if upstream_grad.len() != self.out_dim() {
            return Err(Error::config(format!(
                "upstream gradient length {} does not match net out_dim {}",
                upstream_grad.len(),
                self.out_dim()
            )));
        }
        if grads.len() != self.param_count() {
            return Err(Error::config("gradient buffer size mismatch"));
        }

        let acts = self.forward_cached(input);

        // delta starts as dL/d(output); output layer is linear.
        let mut delta = upstream_grad.to_vec();
        let mut offset = self.param_count();
        for (k, layer) in self.layers.iter().enumerate().rev() {
            let layer_in = &acts[k];
            let layer_out = &acts[k + 1];

            // Fold the activation derivative into delta (identity for the
            // linear output layer).
            for (d, a) in delta.iter_mut().zip(layer_out) {
                *d *= layer.activation.grad_from_output(*a);
            }

            offset -= layer.param_count();
            let (wgrad, bgrad) = grads[offset..offset + layer.param_count()]
                .split_at_mut(layer.weights.len());

            let mut prev_delta = vec![0.0; layer.in_dim];
            for o in 0..layer.out_dim {
                let dz = delta[o];
                bgrad[o] += scale * dz;
                let row = o * layer.in_dim;
                let wrow = &layer.weights[row..row + layer.in_dim];
                let grow = &mut wgrad[row..row + layer.in_dim];
                for i in 0..layer.in_dim {
                    grow[i] = (scale * dz).mul_add(layer_in[i], grow[i]);
                    prev_delta[i] = wrow[i].mul_add(dz, prev_delta[i]);
                }
            }
            delta = prev_delta;
        }
        Ok(delta)
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Layer::param_count).sum()
    }

    /// Appends all parameters to `out` — per layer, weights row-major then
    /// biases. This order is shared by [`MlpParams::backward_into`] gradients
    /// and the optimizer.
    pub fn write_flat(&self, out: &mut Vec<f64>) {
        for layer in &self.layers {
            out.extend_from_slice(&layer.weights);
            out.extend_from_slice(&layer.biases);
        }
    }

    /// Reads parameters back from a flat slice, returning how many entries
    /// were consumed.
    pub fn read_flat(&mut self, src: &[f64]) -> usize {
        let mut pos = 0;
        for layer in &mut self.layers {
            layer.weights.copy_from_slice(&src[pos..pos + layer.weights.len()]);
            pos += layer.weights.len();
            layer.biases.copy_from_slice(&src[pos..pos + layer.biases.len()]);
            pos += layer.biases.len();
        }
        pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Independent scalar-by-scalar forward pass used as an oracle: no shared
    /// code with `forward_into`.
    fn oracle_forward(net: &MlpParams, input: &[f64]) -> Vec<f64> {
        let mut a: Vec<f64> = input.to_vec();
        for layer in &net.layers {
            let mut z = Vec::with_capacity(layer.out_dim);
            for o in 0..layer.out_dim {
                let mut acc = layer.biases[o];
                for i in 0..layer.in_dim {
                    acc += layer.weights[o * layer.in_dim + i] * a[i];
                }
                z.push(match layer.activation {
                    Activation::Tanh => acc.tanh(),
                    Activation::Linear => acc,
                });
            }
            a = z;
        }
        a
    }

    #[test]
    fn zero_net_maps_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut net = MlpParams::new(&[3, 4, 2], &mut rng).unwrap();
        for layer in &mut net.layers {
            layer.weights.fill(0.0);
            layer.biases.fill(0.0);
        }
        assert_eq!(net.forward(&[1.0, -2.0, 0.5]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn single_linear_layer_is_affine() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut net = MlpParams::new(&[1, 1], &mut rng).unwrap();
        net.layers[0].weights[0] = 2.0;
        net.layers[0].biases[0] = 1.0;
        assert_eq!(net.forward(&[3.0]).unwrap(), vec![7.0]);
    }

    #[test]
    fn forward_matches_independent_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let net = MlpParams::new(&[2, 8, 3], &mut rng).unwrap();
        let input = [0.5, -0.5];
        let got = net.forward(&input).unwrap();
        let want = oracle_forward(&net, &input);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-14, "{g} vs {w}");
        }
    }

    #[test]
    fn forward_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let net = MlpParams::new(&[4, 16, 16, 2], &mut rng).unwrap();
        let input = [0.1, 0.2, -0.3, 0.4];
        let a = net.forward(&input).unwrap();
        let b = net.forward(&input).unwrap();
        assert_eq!(a, b, "identical params and input must give bit-identical output");
    }

    #[test]
    fn forward_rejects_dimension_mismatch() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let net = MlpParams::new(&[4, 8, 2], &mut rng).unwrap();
        assert!(matches!(net.forward(&[1.0, 2.0]), Err(Error::Config(_))));
    }

    #[test]
    fn zero_upstream_gives_zero_grads() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = MlpParams::new(&[3, 5, 2], &mut rng).unwrap();
        let (grads, input_grad) = net.backward(&[0.3, -0.1, 0.8], &[0.0, 0.0]).unwrap();
        assert!(grads.iter().all(|&g| g == 0.0));
        assert!(input_grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn single_linear_layer_grads_are_outer_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = MlpParams::new(&[2, 2], &mut rng).unwrap();
        let input = [3.0, -2.0];
        let g = [0.5, -1.5];
        let (grads, input_grad) = net.backward(&input, &g).unwrap();
        // Flat layout: weights row-major then biases.
        let expect_w = [g[0] * input[0], g[0] * input[1], g[1] * input[0], g[1] * input[1]];
        for (got, want) in grads[..4].iter().zip(&expect_w) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!((grads[4] - g[0]).abs() < 1e-15);
        assert!((grads[5] - g[1]).abs() < 1e-15);
        // dL/dx = W^T g
        let w = &net.layers[0].weights;
        let expect_x = [w[0] * g[0] + w[2] * g[1], w[1] * g[0] + w[3] * g[1]];
        for (got, want) in input_grad.iter().zip(&expect_x) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    /// Central finite differences of `upstream · output` over every
    /// parameter and input entry of a random 3-layer net.
    #[test]
    fn backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let net = MlpParams::new(&[3, 6, 5, 2], &mut rng).unwrap();
        let input = [0.4, -0.9, 0.15];
        let upstream = [1.3, -0.7];

        let (grads, input_grad) = net.backward(&input, &upstream).unwrap();

        let scalar = |net: &MlpParams, input: &[f64]| -> f64 {
            net.forward(input)
                .unwrap()
                .iter()
                .zip(&upstream)
                .map(|(o, g)| o * g)
                .sum()
        };

        let h = 1e-5;
        let mut flat = Vec::new();
        net.write_flat(&mut flat);
        for p in 0..flat.len() {
            let mut plus = net.clone();
            let mut minus = net.clone();
            let mut fp = flat.clone();
            fp[p] += h;
            plus.read_flat(&fp);
            fp[p] -= 2.0 * h;
            minus.read_flat(&fp);
            let numeric = (scalar(&plus, &input) - scalar(&minus, &input)) / (2.0 * h);
            let denom = grads[p].abs().max(numeric.abs()).max(1e-7);
            assert!(
                (grads[p] - numeric).abs() / denom < 1e-4,
                "param {p}: analytic {} vs numeric {numeric}",
                grads[p]
            );
        }
        for i in 0..input.len() {
            let mut xp = input;
            let mut xm = input;
            xp[i] += h;
            xm[i] -= h;
            let numeric = (scalar(&net, &xp) - scalar(&net, &xm)) / (2.0 * h);
            let denom = input_grad[i].abs().max(numeric.abs()).max(1e-7);
            assert!((input_grad[i] - numeric).abs() / denom < 1e-4);
        }
    }

    #[test]
    fn flat_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let net = MlpParams::new(&[5, 9, 4], &mut rng).unwrap();
        let mut flat = Vec::new();
        net.write_flat(&mut flat);
        assert_eq!(flat.len(), net.param_count());
        let mut other = MlpParams::new(&[5, 9, 4], &mut rng).unwrap();
        let consumed = other.read_flat(&flat);
        assert_eq!(consumed, flat.len());
        assert_eq!(net, other);
    }
}
