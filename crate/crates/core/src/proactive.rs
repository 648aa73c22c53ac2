//! Reactive and proactive optimization on a toy attribute-based zero-shot
//! classification task.
//!
//! The model is one linear layer, `score_c(x) = (W_c + W*_c) · x`, with one row
//! per class. Features are `[1, z, z²]` where `z` is the standardized, noisy
//! side count of a sample. Class `c` is trained to output
//! `B − K·(a(y) − a(c))² / 2` on samples of class `y`, with `a(c)` the side
//! count rescaled to [0, 1]. That target is maximal at `c = y`, and every
//! optimal row (and every gradient-descent iterate from zero) is a quadratic
//! function of `a(c)`.
//!
//! The reactive optimizer is gradient descent on the seen rows of `W`. The
//! proactive optimizer writes the unseen class's row of `W*` as the Lagrange
//! extrapolation, in attribute space, of the three nearest seen rows.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProactiveError {
    #[error("gradient has a non-finite entry")]
    NonFiniteGradient,
    #[error("step size must be positive, got {0}")]
    BadStepSize(f64),
    #[error("class {0} has no attribute vector")]
    UnknownClass(u32),
    #[error("parameter shapes differ")]
    ShapeMismatch,
    #[error("need at least three seen classes to extrapolate")]
    TooFewSeenClasses,
}

pub type Result<T, E = ProactiveError> = std::result::Result<T, E>;

/// One row per class, in the task's class order.
pub type Params = Vec<Vec<f64>>;

pub const FEATURES: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: Vec<f64>,
    pub y: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToyTask {
    /// All classes, seen and unseen, in row order.
    pub classes: Vec<u32>,
    pub unseen: u32,
    /// Attribute of each class in row order.
    pub attributes: Vec<f64>,
    pub train: Vec<Sample>,
    pub val: Vec<Sample>,
    pub zero_shot: Vec<Sample>,
    pub target_offset: f64,
    pub target_scale: f64,
}

/// Parameters of [`ToyTask::constructed`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToyTaskConfig {
    pub min_class: u32,
    pub max_class: u32,
    pub train_per_class: usize,
    pub val_per_class: usize,
    pub zero_shot_samples: usize,
    /// Half-width of the uniform noise on train and zero-shot side counts.
    pub train_noise: f64,
    /// Half-width of the uniform noise on validation side counts.
    pub val_noise: f64,
    pub target_offset: f64,
    pub target_scale: f64,
    pub seed: u64,
}

impl Default for ToyTaskConfig {
    fn default() -> Self {
        ToyTaskConfig {
            min_class: 3,
            max_class: 9,
            train_per_class: 40,
            val_per_class: 10,
            zero_shot_samples: 40,
            train_noise: 0.2,
            val_noise: 0.0,
            target_offset: 1.0,
            target_scale: 10.0,
            seed: 0,
        }
    }
}

impl ToyTask {
    /// Classes `min_class..=max_class`; the largest is unseen.
    pub fn constructed(cfg: &ToyTaskConfig) -> Self {
        let classes: Vec<u32> = (cfg.min_class..=cfg.max_class).collect();
        let unseen = cfg.max_class;
        let span = (cfg.max_class - cfg.min_class).max(1) as f64;
        let attributes = classes.iter().map(|&c| (c - cfg.min_class) as f64 / span).collect();
        let seen: Vec<u32> = classes.iter().copied().filter(|&c| c != unseen).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut draw = |y: u32, noise: f64| -> f64 {
            if noise > 0.0 {
                y as f64 + rng.gen_range(-noise..noise)
            } else {
                y as f64
            }
        };
        let mut raw_train = Vec::new();
        for &c in &seen {
            for _ in 0..cfg.train_per_class {
                raw_train.push((draw(c, cfg.train_noise), c));
            }
        }
        let mut raw_val = Vec::new();
        for &c in &seen {
            for _ in 0..cfg.val_per_class {
                raw_val.push((draw(c, cfg.val_noise), c));
            }
        }
        let raw_zero: Vec<(f64, u32)> = (0..cfg.zero_shot_samples)
            .map(|_| (draw(unseen, cfg.train_noise), unseen))
            .collect();

        let n = raw_train.len() as f64;
        let mean = raw_train.iter().map(|s| s.0).sum::<f64>() / n;
        let sd = (raw_train.iter().map(|s| (s.0 - mean).powi(2)).sum::<f64>() / n).sqrt().max(1e-12);
        let featurize = |raw: Vec<(f64, u32)>| -> Vec<Sample> {
            raw.into_iter()
                .map(|(m, y)| {
                    let z = (m - mean) / sd;
                    Sample { x: vec![1.0, z, z * z], y }
                })
                .collect()
        };
        ToyTask {
            classes,
            unseen,
            attributes,
            train: featurize(raw_train),
            val: featurize(raw_val),
            zero_shot: featurize(raw_zero),
            target_offset: cfg.target_offset,
            target_scale: cfg.target_scale,
        }
    }

    pub fn row(&self, class: u32) -> Option<usize> {
        self.classes.iter().position(|&c| c == class)
    }

    pub fn attribute(&self, class: u32) -> Option<f64> {
        self.row(class).map(|i| self.attributes[i])
    }

    pub fn seen_rows(&self) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&i| self.classes[i] != self.unseen)
            .collect()
    }

    /// Training target of class row `c` on a sample of class `y`.
    pub fn target(&self, c: usize, y: u32) -> f64 {
        let ay = self.attribute(y).expect("sample class is a task class");
        self.target_offset - self.target_scale * (ay - self.attributes[c]).powi(2) / 2.0
    }

    pub fn zero_params(&self) -> Params {
        vec![vec![0.0; FEATURES]; self.classes.len()]
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn combined(w: &Params, w_star: &Params) -> Params {
    w.iter()
        .zip(w_star)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
        .collect()
}

/// Predicted class: argmax of the combined scores (lowest class on ties).
pub fn predict(w: &Params, w_star: &Params, task: &ToyTask, x: &[f64]) -> u32 {
    predict_with(&combined(w, w_star), task, x)
}

fn predict_with(p: &Params, task: &ToyTask, x: &[f64]) -> u32 {
    let mut best = 0;
    for i in 1..p.len() {
        if dot(&p[i], x) > dot(&p[best], x) {
            best = i;
        }
    }
    task.classes[best]
}

/// Half mean squared error over the seen-class outputs.
pub fn loss(w: &Params, w_star: &Params, task: &ToyTask, samples: &[Sample]) -> f64 {
    let p = combined(w, w_star);
    let seen = task.seen_rows();
    let total: f64 = samples
        .iter()
        .map(|s| {
            seen.iter()
                .map(|&c| (dot(&p[c], &s.x) - task.target(c, s.y)).powi(2))
                .sum::<f64>()
        })
        .sum();
    total / (2.0 * samples.len().max(1) as f64)
}

/// Gradient of [`loss`] with respect to `W`; the unseen row's gradient is 0.
pub fn loss_gradient(w: &Params, w_star: &Params, task: &ToyTask, samples: &[Sample]) -> Params {
    let p = combined(w, w_star);
    let mut g = task.zero_params();
    let scale = 1.0 / samples.len().max(1) as f64;
    let seen = task.seen_rows();
    for s in samples {
        for &c in &seen {
            let r = dot(&p[c], &s.x) - task.target(c, s.y);
            for (gj, xj) in g[c].iter_mut().zip(&s.x) {
                *gj += scale * r * xj;
            }
        }
    }
    g
}

/// Plain gradient descent: `params − lr · grad`.
pub fn reactive_step(params: &Params, grad: &Params, lr: f64) -> Result<Params> {
    if !(lr > 0.0) || !lr.is_finite() {
        return Err(ProactiveError::BadStepSize(lr));
    }
    if params.len() != grad.len() || params.iter().zip(grad).any(|(a, b)| a.len() != b.len()) {
        return Err(ProactiveError::ShapeMismatch);
    }
    if grad.iter().flatten().any(|g| !g.is_finite()) {
        return Err(ProactiveError::NonFiniteGradient);
    }
    Ok(params
        .iter()
        .zip(grad)
        .map(|(p, g)| p.iter().zip(g).map(|(a, b)| a - lr * b).collect())
        .collect())
}

/// Auxiliary information: the class whose row the proactive step writes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxInfo {
    pub class: u32,
}

/// What the system knows about itself when the proactive step runs.
#[derive(Clone, Copy, Debug)]
pub struct MetaInfo<'a> {
    pub l_train: f64,
    pub l_val: f64,
    /// Current reactive parameters.
    pub reactive: &'a Params,
}

/// Lagrange weights that extrapolate a quadratic through `(xs[j], ·)` to `at`.
pub fn lagrange_weights(xs: &[f64], at: f64) -> Vec<f64> {
    (0..xs.len())
        .map(|j| {
            (0..xs.len())
                .filter(|&k| k != j)
                .map(|k| (at - xs[k]) / (xs[j] - xs[k]))
                .product()
        })
        .collect()
}

/// Writes the aux class's row of `W*` so that its combined row equals the
/// attribute-weighted combination of the three seen rows nearest in
/// attribute. No other entry changes. Without aux information `W*` is
/// returned unchanged.
pub fn proactive_step(w_star: &Params, aux: Option<AuxInfo>, meta: &MetaInfo, task: &ToyTask) -> Result<Params> {
    let Some(aux) = aux else {
        return Ok(w_star.clone());
    };
    let target = task.row(aux.class).ok_or(ProactiveError::UnknownClass(aux.class))?;
    let a_target = task.attributes[target];
    let mut donors: Vec<usize> = (0..task.classes.len()).filter(|&i| i != target && task.classes[i] != task.unseen).collect();
    if donors.len() < 3 {
        return Err(ProactiveError::TooFewSeenClasses);
    }
    donors.sort_by(|&a, &b| {
        (task.attributes[a] - a_target)
            .abs()
            .total_cmp(&(task.attributes[b] - a_target).abs())
            .then(a.cmp(&b))
    });
    donors.truncate(3);
    let xs: Vec<f64> = donors.iter().map(|&i| task.attributes[i]).collect();
    let weights = lagrange_weights(&xs, a_target);
    let full = combined(meta.reactive, w_star);
    let mut out = w_star.clone();
    for j in 0..FEATURES {
        let want: f64 = donors.iter().zip(&weights).map(|(&d, w)| w * full[d][j]).sum();
        out[target][j] = want - meta.reactive[target][j];
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LfzslConfig {
    pub lr: f64,
    /// Epoch budget.
    pub budget: usize,
    pub reactive: bool,
    pub proactive: bool,
    /// Fire on `L_train < L_val` instead of `L_train > L_val`.
    pub flip_trigger: bool,
}

impl Default for LfzslConfig {
    fn default() -> Self {
        LfzslConfig {
            lr: 0.1,
            budget: 2000,
            reactive: true,
            proactive: true,
            flip_trigger: false,
        }
    }
}

/// One line of the trajectory log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStep {
    pub step: usize,
    #[serde(rename = "L_train")]
    pub l_train: f64,
    #[serde(rename = "L_val")]
    pub l_val: f64,
    pub proactive_fired: bool,
    pub zero_shot_correct: bool,
    pub w_star_row_norms: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LfzslStatus {
    Solved,
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LfzslOutcome {
    pub status: LfzslStatus,
    pub trajectory: Vec<TrajectoryStep>,
    /// Fraction of zero-shot samples classified as the unseen class.
    pub zero_shot_accuracy: f64,
    pub w: Params,
    pub w_star: Params,
}

pub fn zero_shot_accuracy(w: &Params, w_star: &Params, task: &ToyTask) -> f64 {
    if task.zero_shot.is_empty() {
        return 0.0;
    }
    let p = combined(w, w_star);
    let hits = task
        .zero_shot
        .iter()
        .filter(|s| predict_with(&p, task, &s.x) == s.y)
        .count();
    hits as f64 / task.zero_shot.len() as f64
}

/// Each epoch: one reactive step on `W`, then a proactive step for the
/// unseen class when the trigger holds. Stops once every zero-shot sample is
/// classified correctly or the budget runs out.
pub fn run_lfzsl(task: &ToyTask, cfg: &LfzslConfig) -> Result<LfzslOutcome> {
    let mut w = task.zero_params();
    let mut w_star = task.zero_params();
    let mut trajectory = Vec::new();
    for step in 0..cfg.budget {
        if cfg.reactive {
            let g = loss_gradient(&w, &w_star, task, &task.train);
            w = reactive_step(&w, &g, cfg.lr)?;
        }
        let l_train = loss(&w, &w_star, task, &task.train);
        let l_val = loss(&w, &w_star, task, &task.val);
        let trigger = if cfg.flip_trigger { l_train < l_val } else { l_train > l_val };
        let fired = cfg.proactive && trigger;
        if fired {
            let meta = MetaInfo { l_train, l_val, reactive: &w };
            w_star = proactive_step(&w_star, Some(AuxInfo { class: task.unseen }), &meta, task)?;
        }
        let acc = zero_shot_accuracy(&w, &w_star, task);
        trajectory.push(TrajectoryStep {
            step,
            l_train,
            l_val,
            proactive_fired: fired,
            zero_shot_correct: acc == 1.0,
            w_star_row_norms: w_star.iter().map(|r| dot(r, r).sqrt()).collect(),
        });
        if acc == 1.0 {
            return Ok(LfzslOutcome {
                status: LfzslStatus::Solved,
                trajectory,
                zero_shot_accuracy: acc,
                w,
                w_star,
            });
        }
    }
    Ok(LfzslOutcome {
        status: LfzslStatus::BudgetExceeded,
        zero_shot_accuracy: zero_shot_accuracy(&w, &w_star, task),
        trajectory,
        w,
        w_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reactive_examples() {
        assert_eq!(reactive_step(&vec![vec![1.0]], &vec![vec![0.5]], 0.1).unwrap(), vec![vec![0.95]]);
        assert_eq!(reactive_step(&vec![vec![1.0, 2.0]], &vec![vec![0.0, 0.0]], 0.1).unwrap(), vec![vec![1.0, 2.0]]);
        assert_eq!(
            reactive_step(&vec![vec![1.0]], &vec![vec![f64::NAN]], 0.1),
            Err(ProactiveError::NonFiniteGradient)
        );
        assert_eq!(reactive_step(&vec![vec![1.0]], &vec![vec![0.0]], 0.0), Err(ProactiveError::BadStepSize(0.0)));
    }

    #[test]
    fn quadratic_contraction() {
        let target = vec![vec![0.6, -0.8]];
        let mut w = vec![vec![0.0, 0.0]];
        for _ in 0..100 {
            let g: Params = vec![w[0].iter().zip(&target[0]).map(|(a, b)| 2.0 * (a - b)).collect()];
            w = reactive_step(&w, &g, 0.1).unwrap();
        }
        let d = ((w[0][0] - 0.6).powi(2) + (w[0][1] + 0.8).powi(2)).sqrt();
        assert!(d < 1e-4);
    }

    #[test]
    fn proactive_locality() {
        let task = ToyTask::constructed(&ToyTaskConfig::default());
        let nine = task.row(9).unwrap();
        let mut w: Params = (0..task.classes.len()).map(|i| vec![i as f64, 1.0, -(i as f64)]).collect();
        w[nine] = vec![0.0; FEATURES];
        let w_star = task.zero_params();
        let meta = MetaInfo { l_train: 1.0, l_val: 0.5, reactive: &w };
        assert_eq!(proactive_step(&w_star, None, &meta, &task).unwrap(), w_star);
        let out = proactive_step(&w_star, Some(AuxInfo { class: 9 }), &meta, &task).unwrap();
        for (i, row) in out.iter().enumerate() {
            if i != nine {
                assert_eq!(row, &w_star[i]);
            }
        }
        // rows linear in the class index extrapolate exactly
        let expected = [nine as f64, 1.0, -(nine as f64)];
        for j in 0..FEATURES {
            assert!((out[nine][j] - expected[j]).abs() < 1e-9);
        }
        assert_eq!(
            proactive_step(&w_star, Some(AuxInfo { class: 42 }), &meta, &task),
            Err(ProactiveError::UnknownClass(42))
        );
    }

    #[test]
    fn lagrange_reproduces_quadratics() {
        let xs = [0.5, 2.0 / 3.0, 5.0 / 6.0];
        let f = |x: f64| 3.0 - 2.0 * x + 7.0 * x * x;
        let w = lagrange_weights(&xs, 1.0);
        let got: f64 = xs.iter().zip(&w).map(|(x, w)| w * f(*x)).sum();
        assert!((got - f(1.0)).abs() < 1e-12);
    }

    #[test]
    fn budget_zero() {
        let task = ToyTask::constructed(&ToyTaskConfig::default());
        let out = run_lfzsl(&task, &LfzslConfig { budget: 0, ..LfzslConfig::default() }).unwrap();
        assert_eq!(out.status, LfzslStatus::BudgetExceeded);
        assert!(out.trajectory.is_empty());
    }

    #[test]
    fn solves_with_proactive_and_fails_without() {
        let task = ToyTask::constructed(&ToyTaskConfig::default());
        let on = run_lfzsl(&task, &LfzslConfig::default()).unwrap();
        assert_eq!(on.status, LfzslStatus::Solved);
        assert_eq!(on.zero_shot_accuracy, 1.0);
        assert!(on.trajectory.iter().any(|s| s.proactive_fired));
        let off = run_lfzsl(&task, &LfzslConfig { proactive: false, ..LfzslConfig::default() }).unwrap();
        assert_eq!(off.zero_shot_accuracy, 0.0);
        assert_eq!(off.status, LfzslStatus::BudgetExceeded);
    }
}
