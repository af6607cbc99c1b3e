//! Dense networks for the WGAN critic and the hybrid generator's
//! classical head: forward evaluation, exact reverse-mode gradients
//! (including the input gradient needed for the gradient penalty),
//! Leaky ReLU, RMSProp, and the WGAN-GP penalty term.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default Leaky ReLU negative slope.
pub const DEFAULT_SLOPE: f64 = 0.01;

/// RMSProp numerical-stability epsilon.
pub const RMSPROP_EPS: f64 = 1e-8;

/// Per-layer pre-activations and activations of one forward pass.
pub(crate) type LayerTrace = (Vec<Vec<f64>>, Vec<Vec<f64>>);

/// A fully connected network with Leaky ReLU activations.
///
/// Hidden layers are always activated. The final layer is affine-only by
/// default (the critic's unbounded output); networks built with
/// `activate_final` also pass the last layer through the Leaky ReLU (the
/// hybrid generator's classical head).
///
/// The Leaky ReLU derivative at a pre-activation of exactly 0 uses the
/// negative-side slope.
#[derive(Clone, Debug)]
pub struct DenseNetwork {
    layer_sizes: Vec<usize>,
    /// Row-major `[output][input]` weights per layer.
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
    slope: f64,
    activate_final: bool,
    init_seed: Option<u64>,
}

impl DenseNetwork {
    /// All-zero weights and biases.
    pub fn zeroed(layer_sizes: &[usize], slope: f64, activate_final: bool) -> Result<Self> {
        Self::validate_shape(layer_sizes, slope)?;
        let weights = layer_pairs(layer_sizes)
            .map(|(i, o)| vec![0.0; i * o])
            .collect();
        let biases = layer_pairs(layer_sizes)
            .map(|(_, o)| vec![0.0; o])
            .collect();
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
            slope,
            activate_final,
            init_seed: None,
        })
    }

    /// Seeded initialisation with weights uniform in
    /// `[−1/√fan_in, +1/√fan_in]` and zero biases.
    pub fn initialised(
        layer_sizes: &[usize],
        slope: f64,
        activate_final: bool,
        seed: u64,
    ) -> Result<Self> {
        let mut net = Self::zeroed(layer_sizes, slope, activate_final)?;
        let mut rng = crate::rng::seeded(seed);
        for (layer, (fan_in, _)) in layer_pairs(layer_sizes).enumerate() {
            let bound = 1.0 / (fan_in as f64).sqrt();
            for w in net.weights[layer].iter_mut() {
                *w = rng.random_range(-bound..bound);
            }
        }
        net.init_seed = Some(seed);
        Ok(net)
    }

    fn validate_shape(layer_sizes: &[usize], slope: f64) -> Result<()> {
        if layer_sizes.len() < 2 {
            return Err(Error::shape(
                "a network needs at least input and output layers".to_string(),
            ));
        }
        if layer_sizes.contains(&0) {
            return Err(Error::shape("layer sizes must be positive".to_string()));
        }
        if !slope.is_finite() {
            return Err(Error::invalid(
                "activation slope must be finite".to_string(),
            ));
        }
        Ok(())
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_size(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_size(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn parameter_count(&self) -> usize {
        self.weights.iter().map(Vec::len).sum::<usize>()
            + self.biases.iter().map(Vec::len).sum::<usize>()
    }

    /// Flattened parameters, layer by layer: weights then biases.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.parameter_count());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.parameter_count() {
            return Err(Error::shape(format!(
                "expected {} parameters, got {}",
                self.parameter_count(),
                params.len()
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid(
                "network parameters must be finite".to_string(),
            ));
        }
        let mut cursor = 0;
        for (w, b) in self.weights.iter_mut().zip(&mut self.biases) {
            let (wn, bn) = (w.len(), b.len());
            w.copy_from_slice(&params[cursor..cursor + wn]);
            cursor += wn;
            b.copy_from_slice(&params[cursor..cursor + bn]);
            cursor += bn;
        }
        Ok(())
    }

    fn activation(&self, z: f64) -> f64 {
        if z > 0.0 {
            z
        } else {
            self.slope * z
        }
    }

    fn activation_derivative(&self, z: f64) -> f64 {
        if z > 0.0 {
            1.0
        } else {
            self.slope
        }
    }

    /// Pre-activations and activations of every layer; `activations[0]`
    /// is the input, `activations.last()` the network output.
    pub(crate) fn forward_trace(&self, x: &[f64]) -> Result<LayerTrace> {
        if x.len() != self.input_size() {
            return Err(Error::shape(format!(
                "expected input of length {}, got {}",
                self.input_size(),
                x.len()
            )));
        }
        let layers = self.weights.len();
        let mut pre = Vec::with_capacity(layers);
        let mut act = Vec::with_capacity(layers + 1);
        act.push(x.to_vec());
        for layer in 0..layers {
            let fan_in = self.layer_sizes[layer];
            let fan_out = self.layer_sizes[layer + 1];
            let input = &act[layer];
            let mut z = self.biases[layer].clone();
            for o in 0..fan_out {
                let row = &self.weights[layer][o * fan_in..(o + 1) * fan_in];
                z[o] += row.iter().zip(input).map(|(w, a)| w * a).sum::<f64>();
            }
            let activated = layer + 1 < layers || self.activate_final;
            let a = if activated {
                z.iter().map(|&v| self.activation(v)).collect()
            } else {
                z.clone()
            };
            pre.push(z);
            act.push(a);
        }
        Ok((pre, act))
    }

    /// Network output.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward_trace(x)?.1.pop().unwrap())
    }

    /// Scalar output of a single-output network.
    pub fn scalar(&self, x: &[f64]) -> Result<f64> {
        if self.output_size() != 1 {
            return Err(Error::shape(
                "scalar evaluation requires one output".to_string(),
            ));
        }
        Ok(self.forward(x)?[0])
    }

    /// Exact reverse-mode gradients of the scalar output with respect to
    /// every parameter (flattened as in [`Self::params`]) and with
    /// respect to the input.
    pub fn backward(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        if self.output_size() != 1 {
            return Err(Error::shape(
                "backward differentiates a scalar output".to_string(),
            ));
        }
        let (pre, act) = self.forward_trace(x)?;
        let layers = self.weights.len();
        let mut weight_grads: Vec<Vec<f64>> =
            self.weights.iter().map(|w| vec![0.0; w.len()]).collect();
        let mut bias_grads: Vec<Vec<f64>> =
            self.biases.iter().map(|b| vec![0.0; b.len()]).collect();

        // delta = d(output)/d(z_layer).
        let mut delta = if self.activate_final {
            vec![self.activation_derivative(pre[layers - 1][0])]
        } else {
            vec![1.0]
        };
        for layer in (0..layers).rev() {
            let fan_in = self.layer_sizes[layer];
            let fan_out = self.layer_sizes[layer + 1];
            for o in 0..fan_out {
                bias_grads[layer][o] = delta[o];
                for i in 0..fan_in {
                    weight_grads[layer][o * fan_in + i] = delta[o] * act[layer][i];
                }
            }
            let mut upstream = vec![0.0; fan_in];
            for (i, up) in upstream.iter_mut().enumerate() {
                for o in 0..fan_out {
                    *up += self.weights[layer][o * fan_in + i] * delta[o];
                }
            }
            if layer > 0 {
                delta = upstream
                    .iter()
                    .zip(&pre[layer - 1])
                    .map(|(u, &z)| u * self.activation_derivative(z))
                    .collect();
            } else {
                delta = upstream;
            }
        }
        let input_grad = delta;

        let mut flat = Vec::with_capacity(self.parameter_count());
        for (w, b) in weight_grads.iter().zip(&bias_grads) {
            flat.extend_from_slice(w);
            flat.extend_from_slice(b);
        }
        Ok((flat, input_grad))
    }

    /// Euclidean norm of the input gradient at `x`.
    pub fn input_gradient_norm(&self, x: &[f64]) -> Result<f64> {
        let (_, input_grad) = self.backward(x)?;
        Ok(input_grad.iter().map(|g| g * g).sum::<f64>().sqrt())
    }
}

fn layer_pairs(layer_sizes: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    layer_sizes.windows(2).map(|w| (w[0], w[1]))
}

/// Per-parameter running mean-square accumulator for RMSProp.
#[derive(Clone, Debug)]
pub struct OptimizerState {
    accum: Vec<f64>,
    beta: f64,
    eps: f64,
}

impl OptimizerState {
    pub fn new(parameter_count: usize, beta: f64) -> Result<Self> {
        if !(0.0 < beta && beta < 1.0) {
            return Err(Error::invalid(format!(
                "RMSProp decay must lie in (0, 1), got {beta}"
            )));
        }
        Ok(Self {
            accum: vec![0.0; parameter_count],
            beta,
            eps: RMSPROP_EPS,
        })
    }

    pub fn accumulators(&self) -> &[f64] {
        &self.accum
    }
}

/// One RMSProp descent step:
/// `s ← β·s + (1−β)·g²`, `p ← p − lr·g/(√s + ε)`.
pub fn rmsprop_step(params: &mut [f64], grads: &[f64], state: &mut OptimizerState, lr: f64) {
    assert_eq!(params.len(), grads.len(), "gradient shape mismatch");
    assert_eq!(
        params.len(),
        state.accum.len(),
        "optimizer state shape mismatch"
    );
    for ((p, &g), s) in params.iter_mut().zip(grads).zip(&mut state.accum) {
        *s = state.beta * *s + (1.0 - state.beta) * g * g;
        *p -= lr * g / (s.sqrt() + state.eps);
    }
}

/// Finite-difference step used for the gradient-penalty parameter
/// gradients. The critic has at most a few dozen parameters, so central
/// differences are exact enough and avoid second-order reverse mode.
const PENALTY_FD_STEP: f64 = 1e-5;

/// WGAN gradient penalty at the interpolate
/// `x̂ = x_real + ζ·(x_fake − x_real)`:
/// returns `(‖∇_x̂ D(x̂)‖₂ − 1)²` together with its gradient with respect
/// to the critic parameters (central finite differences).
pub fn gradient_penalty(
    critic: &DenseNetwork,
    x_real: &[f64],
    x_fake: &[f64],
    zeta: f64,
) -> Result<(f64, Vec<f64>)> {
    if x_real.len() != critic.input_size() || x_fake.len() != critic.input_size() {
        return Err(Error::shape(
            "gradient penalty inputs must match the critic input size".to_string(),
        ));
    }
    if !(0.0..=1.0).contains(&zeta) {
        return Err(Error::invalid(format!(
            "interpolation coefficient must lie in [0, 1], got {zeta}"
        )));
    }
    let x_hat: Vec<f64> = x_real
        .iter()
        .zip(x_fake)
        .map(|(r, f)| r + zeta * (f - r))
        .collect();
    let penalty_at = |net: &DenseNetwork| -> Result<f64> {
        let norm = net.input_gradient_norm(&x_hat)?;
        Ok((norm - 1.0) * (norm - 1.0))
    };
    let penalty = penalty_at(critic)?;

    let mut scratch = critic.clone();
    let mut params = critic.params();
    let mut grads = vec![0.0; params.len()];
    for i in 0..params.len() {
        let original = params[i];
        params[i] = original + PENALTY_FD_STEP;
        scratch.set_params(&params)?;
        let plus = penalty_at(&scratch)?;
        params[i] = original - PENALTY_FD_STEP;
        scratch.set_params(&params)?;
        let minus = penalty_at(&scratch)?;
        params[i] = original;
        grads[i] = (plus - minus) / (2.0 * PENALTY_FD_STEP);
    }
    Ok((penalty, grads))
}

/// Serialisable network checkpoint.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct NetworkCheckpoint {
    pub layer_sizes: Vec<usize>,
    pub slope: f64,
    pub activate_final: bool,
    /// Row-major `[output][input]` weights per layer.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    pub init_seed: Option<u64>,
}

impl From<&DenseNetwork> for NetworkCheckpoint {
    fn from(net: &DenseNetwork) -> Self {
        Self {
            layer_sizes: net.layer_sizes.clone(),
            slope: net.slope,
            activate_final: net.activate_final,
            weights: net.weights.clone(),
            biases: net.biases.clone(),
            init_seed: net.init_seed,
        }
    }
}

impl NetworkCheckpoint {
    pub fn to_network(&self) -> Result<DenseNetwork> {
        let mut net = DenseNetwork::zeroed(&self.layer_sizes, self.slope, self.activate_final)?;
        for (layer, (fan_in, fan_out)) in layer_pairs(&self.layer_sizes).enumerate() {
            let w = self
                .weights
                .get(layer)
                .ok_or_else(|| Error::shape("checkpoint is missing a weight layer".to_string()))?;
            let b = self
                .biases
                .get(layer)
                .ok_or_else(|| Error::shape("checkpoint is missing a bias layer".to_string()))?;
            if w.len() != fan_in * fan_out || b.len() != fan_out {
                return Err(Error::shape(format!(
                    "checkpoint layer {layer} has inconsistent shapes"
                )));
            }
            net.weights[layer] = w.clone();
            net.biases[layer] = b.clone();
        }
        net.init_seed = self.init_seed;
        Ok(net)
    }
}

/// Draws a seeded critic for the WGAN trainers: 4-5-3-1 with Leaky ReLU
/// hidden activations and a linear output.
pub fn critic_network(seed: u64) -> DenseNetwork {
    DenseNetwork::initialised(&[4, 5, 3, 1], DEFAULT_SLOPE, false, seed)
        .expect("static critic shape")
}
