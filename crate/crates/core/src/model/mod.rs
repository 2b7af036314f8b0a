//! Cost-to-go regressor: a fully connected ReLU network with a scalar
//! output, trained on mean squared error with RMSProp.

mod io;
mod mlp;
mod rmsprop;

pub use io::{decode_params, encode_params, read_params, write_params};
pub use mlp::{Layer, Mlp};
pub use rmsprop::RmsProp;

use rand::seq::SliceRandom;

use crate::features::{FeatureVector, FEATURE_DIM};
use crate::rng::Rng;

/// Input 17, hidden [100, 50], scalar output.
pub const DEFAULT_LAYERS: [usize; 4] = [FEATURE_DIM, 100, 50, 1];
/// Single hidden layer of 100 units, used by the cross-entropy learner.
pub const CEM_LAYERS: [usize; 3] = [FEATURE_DIM, 100, 1];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub epochs: usize,
    pub batch_size: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig { epochs: 3, batch_size: 64 }
    }
}

/// Minibatch training: each epoch visits every sample once in a fresh
/// shuffled order. Returns the mean minibatch loss of each epoch.
pub fn fit(
    mlp: &mut Mlp,
    opt: &mut RmsProp,
    data: &[(FeatureVector, f64)],
    cfg: FitConfig,
    rng: &mut Rng,
) -> Vec<f64> {
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut losses = Vec::with_capacity(cfg.epochs);
    let mut batch: Vec<(&[f64], f64)> = Vec::with_capacity(cfg.batch_size);
    for _ in 0..cfg.epochs {
        order.shuffle(rng);
        let mut total = 0.0;
        let mut batches = 0;
        for chunk in order.chunks(cfg.batch_size.max(1)) {
            batch.clear();
            batch.extend(chunk.iter().map(|&i| (&data[i].0[..], data[i].1)));
            let (loss, grads) = mlp.backward(&batch);
            opt.step(mlp, &grads);
            total += loss;
            batches += 1;
        }
        losses.push(if batches == 0 { 0.0 } else { total / batches as f64 });
    }
    losses
}

/// Mean squared error over a dataset, without updating anything.
pub fn mse(mlp: &Mlp, data: &[(FeatureVector, f64)]) -> f64 {
    if data.is_empty() {
        return 0.0;
    }
    data.iter()
        .map(|(f, y)| {
            let e = mlp.forward_unchecked(f) - y;
            e * e
        })
        .sum::<f64>()
        / data.len() as f64
}
