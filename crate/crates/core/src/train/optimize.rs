use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::automaton::{CommutativityReport, MultisetAutomaton};
use crate::error::{Error, Result};
use crate::multiset::{Alphabet, Multiset};
use crate::regex::Regex;
use crate::semiring::Literal;

use super::{evaluate, Evaluation, ParameterSet};

/// Range of the initial free-mode transition weights. Nonnegative, so that
/// every multiset starts with positive weight and a finite loss.
pub const DEFAULT_MU_INIT: (f64, f64) = (0.0, 0.1);

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    /// Train the Scale weights of an mc-regular expression.
    RegexSkeleton(Regex<Literal>),
    /// Train every entry of a fully connected automaton.
    Free { states: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig {
    /// Largest multiset size the model assigns probability to.
    pub size_bound: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Penalty weight at epoch 0; free mode only.
    pub penalty_start: f64,
    /// Factor applied to the penalty weight after each epoch.
    pub penalty_growth: f64,
    pub seed: u64,
    pub mode: Mode,
    /// Steps per epoch over shuffled batches of this size; `None` takes a
    /// single full-batch step.
    pub batch_size: Option<usize>,
    pub mu_init: (f64, f64),
}

impl TrainingConfig {
    pub fn new(mode: Mode, size_bound: usize) -> Self {
        TrainingConfig {
            size_bound,
            learning_rate: 1e-2,
            epochs: 100,
            penalty_start: 1.0,
            penalty_growth: 1.1,
            seed: 0,
            mode,
            batch_size: None,
            mu_init: DEFAULT_MU_INIT,
        }
    }

    /// `penalty_start · penalty_growth^epoch` in free mode, zero otherwise.
    pub fn penalty_weight(&self, epoch: usize) -> f64 {
        match self.mode {
            Mode::Free { .. } => self.penalty_start * self.penalty_growth.powf(epoch as f64),
            Mode::RegexSkeleton(_) => 0.0,
        }
    }

    fn validate(&self, data: &[Multiset]) -> Result<()> {
        if data.is_empty() {
            return Err(Error::Invalid("training data is empty".into()));
        }
        if let Some(w) = data.iter().find(|w| w.size() > self.size_bound) {
            return Err(Error::Invalid(format!(
                "data item {w} has size {} above the size bound {}",
                w.size(),
                self.size_bound
            )));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Invalid(format!("learning rate {} is not positive", self.learning_rate)));
        }
        for (name, x) in [("penalty start", self.penalty_start), ("penalty growth", self.penalty_growth)] {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(Error::Invalid(format!("{name} {x} is not a nonnegative real")));
            }
        }
        if self.batch_size == Some(0) {
            return Err(Error::Invalid("batch size must be positive".into()));
        }
        Ok(())
    }
}

/// Loss values before the update of one epoch; the last record is taken
/// after the final update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub nll: f64,
    /// Unweighted commutator penalty.
    pub penalty: f64,
    pub penalty_weight: f64,
    /// Largest entrywise commutator deviation.
    pub commut_violation: f64,
}

impl EpochRecord {
    pub fn objective(&self) -> f64 {
        self.nll + self.penalty_weight * self.penalty
    }
}

#[derive(Debug, Clone)]
pub struct TrainingRun {
    pub params: ParameterSet,
    pub automaton: MultisetAutomaton<f64>,
    pub curve: Vec<EpochRecord>,
    pub commutativity: CommutativityReport,
    /// Smallest weight among the multisets within the size bound; a
    /// negative value means the learned model is not a distribution.
    pub min_weight: Option<f64>,
}

impl TrainingRun {
    pub fn curve_csv(&self) -> String {
        let mut s = String::from("epoch,nll,penalty,commut_violation\n");
        for r in &self.curve {
            writeln!(s, "{},{},{},{}", r.epoch, r.nll, r.penalty, r.commut_violation).expect("string write");
        }
        s
    }

    pub fn final_nll(&self) -> f64 {
        self.curve.last().map_or(f64::NAN, |r| r.nll)
    }
}

/// Train from the initial parameters the mode prescribes: the written
/// weights of a skeleton, or a seeded random free automaton over
/// `alphabet`.
pub fn train(config: &TrainingConfig, data: &[Multiset], alphabet: &Alphabet) -> Result<TrainingRun> {
    let params = match &config.mode {
        Mode::RegexSkeleton(regex) => ParameterSet::skeleton(regex, alphabet)?,
        Mode::Free { states } => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            ParameterSet::free_random(*states, alphabet, config.mu_init, &mut rng)?
        }
    };
    train_from(config, data, params)
}

/// Plain gradient descent from the given parameters.
pub fn train_from(config: &TrainingConfig, data: &[Multiset], mut params: ParameterSet) -> Result<TrainingRun> {
    config.validate(data)?;
    if params.is_skeleton() != matches!(config.mode, Mode::RegexSkeleton(_)) {
        return Err(Error::Invalid("parameter layout does not match the training mode".into()));
    }
    let n = config.size_bound;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut curve = Vec::with_capacity(config.epochs + 1);
    for epoch in 0..=config.epochs {
        let alpha = config.penalty_weight(epoch);
        let full = evaluate(&params, data, n, alpha).map_err(|e| at_epoch(e, epoch))?;
        check_finite(&full, epoch)?;
        let m = params.automaton()?;
        curve.push(EpochRecord {
            epoch,
            nll: full.nll,
            penalty: full.penalty,
            penalty_weight: alpha,
            commut_violation: m.check_commutativity_with(0.0).max_violation,
        });
        if epoch == config.epochs {
            break;
        }
        match config.batch_size {
            Some(size) if size < data.len() => {
                order.shuffle(&mut rng);
                for chunk in order.chunks(size) {
                    let batch: Vec<Multiset> = chunk.iter().map(|&i| data[i].clone()).collect();
                    let e = evaluate(&params, &batch, n, alpha).map_err(|e| at_epoch(e, epoch))?;
                    check_finite(&e, epoch)?;
                    step(&mut params, &e.gradient, config.learning_rate);
                }
            }
            _ => step(&mut params, &full.gradient, config.learning_rate),
        }
    }
    let automaton = params.automaton()?;
    let min_weight = automaton
        .enumerate_language(n)
        .ok()
        .and_then(|items| items.iter().map(|(_, x)| *x).reduce(f64::min));
    Ok(TrainingRun {
        commutativity: automaton.check_commutativity(),
        automaton,
        params,
        curve,
        min_weight,
    })
}

fn step(params: &mut ParameterSet, gradient: &[f64], lr: f64) {
    for (x, g) in params.values.iter_mut().zip(gradient) {
        *x -= lr * g;
    }
}

fn check_finite(e: &Evaluation, epoch: usize) -> Result<()> {
    if e.nll.is_finite() && e.penalty.is_finite() && e.gradient.iter().all(|g| g.is_finite()) {
        Ok(())
    } else {
        Err(Error::Degenerate(format!(
            "loss diverged at epoch {epoch}: nll = {}, penalty = {}",
            e.nll, e.penalty
        )))
    }
}

fn at_epoch(e: Error, epoch: usize) -> Error {
    match e {
        Error::Degenerate(msg) => Error::Degenerate(format!("at epoch {epoch}: {msg}")),
        other => other,
    }
}
