use rand::Rng as _;

use crate::rng::rng_for;
use crate::{Error, Result};

/// Dense layer; `weights` is row-major `[outputs][inputs]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Layer {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Layer { inputs, outputs, weights: vec![0.0; inputs * outputs], biases: vec![0.0; outputs] }
    }

    fn apply(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.weights.chunks_exact(self.inputs).zip(&self.biases).map(|(row, b)| {
            b + row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>()
        }));
    }
}

/// Multilayer perceptron: ReLU on hidden layers, linear scalar output.
///
/// The flattened parameter order is, layer by layer, the weights (row-major)
/// followed by the biases.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    layers: Vec<Layer>,
}

impl Mlp {
    pub fn zeros(sizes: &[usize]) -> Self {
        assert!(sizes.len() >= 2, "need at least input and output sizes");
        assert_eq!(*sizes.last().unwrap(), 1, "output must be scalar");
        Mlp { layers: sizes.windows(2).map(|w| Layer::zeros(w[0], w[1])).collect() }
    }

    /// Uniform weights in `±sqrt(6 / (fan_in + fan_out))`, zero biases.
    pub fn init(sizes: &[usize], seed: u64) -> Self {
        let mut mlp = Mlp::zeros(sizes);
        let mut rng = rng_for(seed, &[0x1A17]);
        for layer in &mut mlp.layers {
            let bound = Self::init_bound(layer.inputs, layer.outputs);
            for w in &mut layer.weights {
                *w = rng.random_range(-bound..=bound);
            }
        }
        mlp
    }

    pub fn init_bound(fan_in: usize, fan_out: usize) -> f64 {
        (6.0 / (fan_in + fan_out) as f64).sqrt()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![self.layers[0].inputs];
        s.extend(self.layers.iter().map(|l| l.outputs));
        s
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    /// Parameter slices in flattened order.
    pub fn param_slices(&self) -> impl Iterator<Item = &[f64]> {
        self.layers.iter().flat_map(|l| [&l.weights[..], &l.biases[..]])
    }

    pub fn param_slices_mut(&mut self) -> impl Iterator<Item = &mut [f64]> {
        self.layers.iter_mut().flat_map(|l| [&mut l.weights[..], &mut l.biases[..]])
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.num_params());
        for s in self.param_slices() {
            v.extend_from_slice(s);
        }
        v
    }

    pub fn unflatten(sizes: &[usize], values: &[f64]) -> Result<Self> {
        let mut mlp = Mlp::zeros(sizes);
        if values.len() != mlp.num_params() {
            return Err(Error::Contract(format!(
                "parameter vector has {} values, layers {:?} need {}",
                values.len(),
                sizes,
                mlp.num_params()
            )));
        }
        let mut rest = values;
        for s in mlp.param_slices_mut() {
            let (head, tail) = rest.split_at(s.len());
            s.copy_from_slice(head);
            rest = tail;
        }
        Ok(mlp)
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.input_dim() {
            return Err(Error::Contract(format!("input has {} features, expected {}", x.len(), self.input_dim())));
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("model input"));
        }
        Ok(self.forward_unchecked(x))
    }

    pub fn forward_unchecked(&self, x: &[f64]) -> f64 {
        let mut a = x.to_vec();
        let mut z = Vec::new();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            layer.apply(&a, &mut z);
            if i < last {
                z.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            std::mem::swap(&mut a, &mut z);
        }
        a[0]
    }

    /// Mean squared error over `batch` and its gradient with respect to
    /// every parameter, by reverse-mode differentiation.
    pub fn backward(&self, batch: &[(&[f64], f64)]) -> (f64, Mlp) {
        assert!(!batch.is_empty(), "empty batch");
        let n = batch.len() as f64;
        let mut grads = Mlp::zeros(&self.sizes());
        let mut loss = 0.0;
        let last = self.layers.len() - 1;
        // acts[0] is the input; acts[i + 1] the post-activation output of layer i.
        let mut acts: Vec<Vec<f64>> = vec![Vec::new(); self.layers.len() + 1];
        let mut delta = Vec::new();
        let mut prev_delta = Vec::new();
        for &(x, y) in batch {
            acts[0].clear();
            acts[0].extend_from_slice(x);
            for (i, layer) in self.layers.iter().enumerate() {
                let (input, rest) = acts.split_at_mut(i + 1);
                layer.apply(&input[i], &mut rest[0]);
                if i < last {
                    rest[0].iter_mut().for_each(|v| *v = v.max(0.0));
                }
            }
            let err = acts[last + 1][0] - y;
            loss += err * err;

            delta.clear();
            delta.push(2.0 * err / n);
            for i in (0..=last).rev() {
                let layer = &self.layers[i];
                let g = &mut grads.layers[i];
                let input = &acts[i];
                for (o, &d) in delta.iter().enumerate() {
                    if d == 0.0 {
                        continue;
                    }
                    g.biases[o] += d;
                    let row = &mut g.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    for (gw, &a) in row.iter_mut().zip(input) {
                        *gw += d * a;
                    }
                }
                if i == 0 {
                    break;
                }
                prev_delta.clear();
                prev_delta.resize(layer.inputs, 0.0);
                for (o, &d) in delta.iter().enumerate() {
                    if d == 0.0 {
                        continue;
                    }
                    let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    for (pd, &w) in prev_delta.iter_mut().zip(row) {
                        *pd += d * w;
                    }
                }
                // ReLU: gradient passes only where the unit was active.
                for (pd, &a) in prev_delta.iter_mut().zip(input) {
                    if a <= 0.0 {
                        *pd = 0.0;
                    }
                }
                std::mem::swap(&mut delta, &mut prev_delta);
            }
        }
        (loss / n, grads)
    }
}
