//! Cross-entropy search over flattened network parameters.

use rand::seq::index;
use rand_distr::{Distribution, StandardNormal};

use super::sail::check_splits;
use super::{evaluate_policy, first_min, CemConfig, Dataset, IterationRecord, PolicySpec, TrainConfig, TrainOutput};
use crate::gridworld::EpisodeSpec;
use crate::model::{Mlp, CEM_LAYERS};
use crate::rng::{rng_for, Rng};
use crate::{Exec, Result};

const TAG_SAMPLE: u64 = 0xCE5;
const TAG_EPISODES: u64 = 0xCE6;

#[derive(Debug, Clone, PartialEq)]
pub struct CemGeneration {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Lowest fitness in the population and the candidate that achieved it.
    pub best_fitness: f64,
    pub best: Vec<f64>,
    pub elite_mean_fitness: f64,
}

/// One generation: sample a diagonal Gaussian population, score it with
/// `fitness` (lower is better), and refit mean and std to the elites.
pub fn cem_generation<F>(mean: &[f64], std: &[f64], cfg: &CemConfig, rng: &mut Rng, exec: Exec, fitness: F) -> CemGeneration
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    let population: Vec<Vec<f64>> = (0..cfg.population)
        .map(|_| {
            mean.iter()
                .zip(std)
                .map(|(m, s)| {
                    let z: f64 = StandardNormal.sample(rng);
                    m + s * z
                })
                .collect()
        })
        .collect();
    let scores = exec.map(population.len(), |i| fitness(&population[i]));
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    let elites = &order[..cfg.elite_count()];

    let n = elites.len() as f64;
    let dim = mean.len();
    let mut new_mean = vec![0.0; dim];
    for &e in elites {
        for (m, x) in new_mean.iter_mut().zip(&population[e]) {
            *m += x / n;
        }
    }
    let mut new_std = vec![0.0; dim];
    for &e in elites {
        for ((s, x), m) in new_std.iter_mut().zip(&population[e]).zip(&new_mean) {
            *s += (x - m).powi(2) / n;
        }
    }
    for s in &mut new_std {
        *s = s.sqrt().max(cfg.std_floor);
    }
    CemGeneration {
        mean: new_mean,
        std: new_std,
        best_fitness: scores[order[0]],
        best: population[order[0]].clone(),
        elite_mean_fitness: elites.iter().map(|&e| scores[e]).sum::<f64>() / n,
    }
}

/// Each generation scores every candidate by its total expansions on the
/// same `rollouts_per_candidate` training episodes.
pub fn cem_train(cfg: &TrainConfig, train: &[EpisodeSpec], val: &[EpisodeSpec]) -> Result<TrainOutput> {
    cfg.validate()?;
    check_splits(train, val)?;
    let dim = Mlp::zeros(&CEM_LAYERS).num_params();
    let mut mean = vec![0.0; dim];
    let mut std = vec![cfg.cem.init_std; dim];
    let mut history = Vec::with_capacity(cfg.iterations);
    let mut snapshots = Vec::with_capacity(cfg.iterations);

    for g in 1..=cfg.iterations {
        let mut pick = rng_for(cfg.seed, &[TAG_EPISODES, g as u64]);
        let r = cfg.cem.rollouts_per_candidate;
        let episodes: Vec<&EpisodeSpec> = if r <= train.len() {
            index::sample(&mut pick, train.len(), r).into_iter().map(|i| &train[i]).collect()
        } else {
            (0..r).map(|i| &train[i % train.len()]).collect()
        };
        let fitness = |theta: &[f64]| -> f64 {
            let Ok(mlp) = Mlp::unflatten(&CEM_LAYERS, theta) else { return f64::INFINITY };
            let p = PolicySpec::Learned(&mlp);
            episodes
                .iter()
                .map(|s| p.run(s, cfg.t_train, 0, false).map_or(f64::INFINITY, |r| r.cost(cfg.t_train) as f64))
                .sum()
        };
        let mut rng = rng_for(cfg.seed, &[TAG_SAMPLE, g as u64]);
        let gen = cem_generation(&mean, &std, &cfg.cem, &mut rng, cfg.exec, fitness);
        mean = gen.mean;
        std = gen.std;
        let params = Mlp::unflatten(&CEM_LAYERS, &mean)?;
        let val_cost = evaluate_policy(&PolicySpec::Learned(&params), val, cfg.t_train, cfg.exec)?.mean_cost();
        history.push(IterationRecord {
            iteration: g,
            mix: std.iter().sum::<f64>() / dim as f64,
            dataset_size: 0,
            added: 0,
            oracle_calls: 0,
            train_loss: gen.elite_mean_fitness,
            val_mean_cost: val_cost,
        });
        snapshots.push(params);
    }
    let best = first_min(history.iter().map(|r| r.val_mean_cost));
    Ok(TrainOutput { params: snapshots.swap_remove(best - 1), best_iteration: best, history, dataset: Dataset::default() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_moves_toward_target() {
        let target = [3.0, -2.0, 0.5];
        let cfg = CemConfig::default();
        let (mut mean, mut std) = (vec![0.0; 3], vec![1.0; 3]);
        let dist = |m: &[f64]| m.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        let start = dist(&mean);
        let mut rng = rng_for(1, &[]);
        for _ in 0..30 {
            let g = cem_generation(&mean, &std, &cfg, &mut rng, Exec::Sequential, dist);
            mean = g.mean;
            std = g.std;
        }
        assert!(dist(&mean) < 0.1 * start, "{mean:?}");
        assert!(std.iter().all(|&s| s >= cfg.std_floor));
    }

    #[test]
    fn std_floor_holds_for_a_degenerate_population() {
        let cfg = CemConfig { population: 10, ..CemConfig::default() };
        let g = cem_generation(&[1.0, 2.0], &[0.0, 0.0], &cfg, &mut rng_for(2, &[]), Exec::Sequential, |_| 0.0);
        assert_eq!(g.mean, vec![1.0, 2.0]);
        assert_eq!(g.std, vec![cfg.std_floor; 2]);
        assert_eq!(g.elite_mean_fitness, 0.0);
    }
}
