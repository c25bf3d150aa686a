//! Learning weights from multiset data.
//!
//! A real-weighted automaton defines a distribution over the multisets of
//! size at most `N`: `P(w) = λμ(w)ρ / Z` with `Z` the total weight of
//! those multisets. Training minimizes the negative log-likelihood of a
//! data set by gradient descent, either over the Scale weights of an
//! mc-regular expression (commutativity holds by construction) or over
//! every entry of a free automaton with an added commutator penalty.

mod optimize;
mod params;
mod tape;

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::MultisetAutomaton;
use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};
use crate::multiset::Multiset;
use crate::semiring::{Ring, Semiring};

pub use optimize::{train, train_from, EpochRecord, Mode, TrainingConfig, TrainingRun, DEFAULT_MU_INIT};
pub use params::{Binding, ParameterSet};
pub use tape::{Real, Tape, Var};

/// Largest size bound accepted by [`partition`].
pub const MAX_SIZE_BOUND: usize = 100_000;

/// Total weight of all multisets of size at most `n`.
///
/// With `u_k(b)` the summed column vector over count vectors of symbols
/// `k..` of total at most `b`, `u_k(b) = u_(k+1)(b) + μ(a_k) u_k(b−1)`, so
/// the sum costs `O(|Σ| n d²)` and multiplies in canonical symbol order.
pub fn partition<S: Semiring>(m: &MultisetAutomaton<S>, n: usize) -> Result<S> {
    if n > MAX_SIZE_BOUND {
        return Err(Error::Resource(format!("size bound {n} exceeds {MAX_SIZE_BOUND}")));
    }
    let mut u: Vec<Vec<S>> = vec![m.rho().to_vec(); n + 1];
    for k in (0..m.alphabet().len()).rev() {
        let mu = m.mu_at(k);
        let mut next: Vec<Vec<S>> = Vec::with_capacity(n + 1);
        for (b, tail) in u.into_iter().enumerate() {
            let v = if b == 0 {
                tail
            } else {
                let step = mu.mul_vec(&next[b - 1])?;
                tail.iter().zip(&step).map(|(x, y)| x.plus(y)).collect()
            };
            next.push(v);
        }
        u = next;
    }
    Ok(dot(m.lambda(), &u[n]))
}

/// Distinct data items with multiplicities, in canonical order.
fn tally(data: &[Multiset]) -> BTreeMap<&Multiset, (usize, usize)> {
    let mut counts: BTreeMap<&Multiset, (usize, usize)> = BTreeMap::new();
    for (i, w) in data.iter().enumerate() {
        counts.entry(w).or_insert((i, 0)).1 += 1;
    }
    counts
}

/// `Σ_w log Z − log λμ(w)ρ` over the data, with `Z` bounded at `n`.
pub fn nll<R: Real>(m: &MultisetAutomaton<R>, data: &[Multiset], n: usize) -> Result<R> {
    if let Some(w) = data.iter().find(|w| w.size() > n) {
        return Err(Error::Invalid(format!("data item {w} is larger than the size bound {n}")));
    }
    let z = partition(m, n)?;
    if !(z.value() > 0.0) {
        return Err(Error::Degenerate(format!("partition function is {} (must be positive)", z.value())));
    }
    let mut total = z.ln().scale(data.len() as f64);
    for (w, (first, count)) in tally(data) {
        let x = m.weight(w)?;
        if !(x.value() > 0.0) {
            return Err(Error::InfiniteLoss {
                index: first,
                multiset: w.to_string(),
            });
        }
        total = total.minus(&x.ln().scale(count as f64));
    }
    Ok(total)
}

/// `Σ_{a<b} ‖μ(a)μ(b) − μ(b)μ(a)‖²_F`.
pub fn commutativity_penalty<R: Ring>(m: &MultisetAutomaton<R>) -> R {
    let k = m.alphabet().len();
    let mut total = R::zero();
    for i in 0..k {
        for j in i + 1..k {
            let ab = m.mu_at(i).mat_mul(m.mu_at(j)).expect("square");
            let ba = m.mu_at(j).mat_mul(m.mu_at(i)).expect("square");
            let diff: Matrix<R> = ab.sub(&ba).expect("same shape");
            for x in diff.entries() {
                total = total.plus(&x.times(x));
            }
        }
    }
    total
}

/// Objective value and gradient at the current parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub nll: f64,
    pub penalty: f64,
    pub penalty_weight: f64,
    /// Gradient of `nll + penalty_weight · penalty`.
    pub gradient: Vec<f64>,
}

impl Evaluation {
    pub fn objective(&self) -> f64 {
        self.nll + self.penalty_weight * self.penalty
    }
}

/// Reverse-mode evaluation of `nll + penalty_weight · penalty`.
pub fn evaluate(params: &ParameterSet, data: &[Multiset], n: usize, penalty_weight: f64) -> Result<Evaluation> {
    let tape = Tape::new();
    let (m, _) = params.instantiate(&tape)?;
    let l = nll(&m, data, n)?;
    let p = commutativity_penalty(&m);
    let objective = if penalty_weight == 0.0 { l } else { l.plus(&p.scale(penalty_weight)) };
    let mut gradient = tape.gradient(&objective);
    gradient.truncate(params.len());
    Ok(Evaluation {
        nll: l.value(),
        penalty: p.value(),
        penalty_weight,
        gradient,
    })
}

/// Gradient of [`nll`] with respect to every parameter.
pub fn grad_nll(params: &ParameterSet, data: &[Multiset], n: usize) -> Result<Vec<f64>> {
    Ok(evaluate(params, data, n, 0.0)?.gradient)
}

/// Gradient of [`commutativity_penalty`] with respect to every parameter.
pub fn grad_penalty(params: &ParameterSet) -> Result<Vec<f64>> {
    let tape = Tape::new();
    let (m, _) = params.instantiate(&tape)?;
    let mut g = tape.gradient(&commutativity_penalty(&m));
    g.truncate(params.len());
    Ok(g)
}

/// Draws multisets of size at most `n` with probability `λμ(w)ρ / Z`.
#[derive(Debug, Clone)]
pub struct Sampler {
    items: Vec<(Multiset, f64)>,
    z: f64,
    index: WeightedIndex<f64>,
}

impl Sampler {
    pub fn new(m: &MultisetAutomaton<f64>, n: usize) -> Result<Self> {
        let items = m.enumerate_language(n)?;
        if let Some((w, x)) = items.iter().find(|(_, x)| !(*x >= 0.0) || !x.is_finite()) {
            return Err(Error::NotDistribution(format!("weight of {w} is {x}")));
        }
        let z: f64 = items.iter().map(|(_, x)| x).sum();
        if !(z > 0.0) {
            return Err(Error::Degenerate(format!("total weight up to size {n} is {z}")));
        }
        let index = WeightedIndex::new(items.iter().map(|(_, x)| *x))
            .map_err(|e| Error::NotDistribution(e.to_string()))?;
        Ok(Sampler { items, z, index })
    }

    /// Every multiset of size at most the bound with its probability.
    pub fn probabilities(&self) -> impl Iterator<Item = (&Multiset, f64)> {
        self.items.iter().map(|(w, x)| (w, x / self.z))
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Multiset {
        self.items[self.index.sample(rng)].0.clone()
    }

    /// `count` draws from a ChaCha8 stream seeded with `seed`.
    pub fn sample_seeded(&self, count: usize, seed: u64) -> Vec<Multiset> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.sample(&mut rng)).collect()
    }
}

/// One draw; build a [`Sampler`] to draw repeatedly.
pub fn sample(m: &MultisetAutomaton<f64>, n: usize, rng: &mut impl Rng) -> Result<Multiset> {
    Ok(Sampler::new(m, n)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::compile;
    use crate::multiset::{alphabet, sym};
    use crate::regex::parse;
    use crate::semiring::{Literal, Rational};

    fn real(s: &str) -> MultisetAutomaton<f64> {
        let r = parse(s).unwrap();
        compile(&r, &r.symbols()).unwrap()
    }

    fn ms(s: &str) -> Multiset {
        s.parse().unwrap()
    }

    fn two_state() -> MultisetAutomaton<f64> {
        MultisetAutomaton::new(
            alphabet(["a", "b"]),
            vec![1.0, 0.0],
            BTreeMap::from([
                (sym("a"), Matrix::from_rows(vec![vec![0.5, 0.3], vec![0.0, 0.2]]).unwrap()),
                (sym("b"), Matrix::from_rows(vec![vec![0.4, 0.1], vec![0.0, 0.3]]).unwrap()),
            ]),
            vec![0.5, 1.0],
            BTreeMap::new(),
        )
        .unwrap()
    }

    #[test]
    fn partition_examples() {
        assert_eq!(partition(&real("a"), 1).unwrap(), 1.0);
        assert_eq!(partition(&real("a*"), 3).unwrap(), 4.0);
        let m = two_state();
        assert_eq!(partition(&m, 0).unwrap(), dot(m.lambda(), m.rho()));
        assert!(matches!(partition(&m, MAX_SIZE_BOUND + 1), Err(Error::Resource(_))));
    }

    #[test]
    fn partition_equals_enumerated_sum_exactly() {
        let q = |p, r| Literal::from_ratio(p, r).0;
        // Noncommuting on purpose: both sums multiply in canonical order.
        let m: MultisetAutomaton<Rational> = MultisetAutomaton::new(
            alphabet(["a", "b", "c"]),
            vec![q(1, 2), q(-1, 3)],
            BTreeMap::from([
                (sym("a"), Matrix::from_rows(vec![vec![q(1, 2), q(1, 5)], vec![q(0, 1), q(2, 7)]]).unwrap()),
                (sym("b"), Matrix::from_rows(vec![vec![q(1, 3), q(0, 1)], vec![q(1, 4), q(-1, 2)]]).unwrap()),
                (sym("c"), Matrix::from_rows(vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]]).unwrap()),
            ]),
            vec![q(1, 1), q(3, 2)],
            BTreeMap::new(),
        )
        .unwrap();
        for n in 0..=5 {
            let total = Semiring::sum(m.enumerate_language(n).unwrap().iter().map(|(_, x)| x));
            assert_eq!(partition(&m, n).unwrap(), total, "n = {n}");
        }
    }

    #[test]
    fn nll_examples() {
        assert_eq!(nll(&real("a"), &[ms("a")], 1).unwrap(), 0.0);
        let uniform = real("a|b");
        let data = vec![ms("a"), ms("b"), ms("b")];
        assert!((nll(&uniform, &data, 1).unwrap() - 3.0 * 2f64.ln()).abs() < 1e-12);

        let m = two_state();
        let data = vec![ms("a"), ms("a b"), ms(""), ms("b b")];
        let base = nll(&m, &data, 3).unwrap();
        let mut scaled = m.clone();
        scaled.lambda_mut().iter_mut().for_each(|x| *x *= 2.0);
        scaled.rho_mut().iter_mut().for_each(|x| *x *= 2.0);
        assert!((nll(&scaled, &data, 3).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn nll_errors() {
        assert!(matches!(nll(&real("a"), &[ms("b")], 1), Err(Error::Vocabulary(_))));
        assert!(matches!(
            nll(&real("a|b"), &[ms("a"), ms("a b")], 2),
            Err(Error::InfiniteLoss { index: 1, .. })
        ));
        assert!(matches!(nll(&real("[-1]a"), &[ms("a")], 1), Err(Error::Degenerate(_))));
        assert!(matches!(nll(&real("a*"), &[ms("a a a")], 2), Err(Error::Invalid(_))));
    }

    #[test]
    fn penalty_examples() {
        assert_eq!(commutativity_penalty(&real("(a|b)c*[2]d")), 0.0);
        assert_eq!(commutativity_penalty(&real("a*")), 0.0);
        let m = MultisetAutomaton::new(
            alphabet(["a", "b"]),
            vec![1.0, 0.0],
            BTreeMap::from([
                (sym("a"), Matrix::from_rows(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap()),
                (sym("b"), Matrix::from_rows(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap()),
            ]),
            vec![0.0, 1.0],
            BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(commutativity_penalty(&m), 2.0);
    }

    fn relative_error(g: f64, fd: f64) -> f64 {
        (g - fd).abs() / fd.abs().max(g.abs()).max(1.0)
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let data = vec![ms("a"), ms("a b"), ms("b b")];
        for _ in 0..10 {
            let mut p = ParameterSet::free_random(2, &alphabet(["a", "b"]), (0.05, 0.6), &mut rng).unwrap();
            let g = evaluate(&p, &data, 3, 0.7).unwrap().gradient;
            let h = 1e-5;
            for i in 0..p.len() {
                let x = p.values[i];
                p.values[i] = x + h;
                let up = evaluate(&p, &data, 3, 0.7).unwrap().objective();
                p.values[i] = x - h;
                let down = evaluate(&p, &data, 3, 0.7).unwrap().objective();
                p.values[i] = x;
                let fd = (up - down) / (2.0 * h);
                assert!(relative_error(g[i], fd) < 1e-5, "component {i}: {} vs {fd}", g[i]);
            }
        }
    }

    #[test]
    fn unreachable_parameters_have_zero_gradient() {
        let mut m = two_state();
        // State 1 is reachable only through μ(a)[0][1] and μ(b)[0][1]; cut
        // those and nothing out of state 1 matters.
        m.mu_mut(0).set(0, 1, 0.0);
        m.mu_mut(1).set(0, 1, 0.0);
        let p = ParameterSet::free_from(&m);
        let g = grad_nll(&p, &[ms("a"), ms("b")], 2).unwrap();
        for (b, gi) in p.bindings().iter().zip(&g) {
            if let Binding::Mu { row: 1, .. } = b {
                assert_eq!(*gi, 0.0, "{b:?}");
            }
        }
    }

    #[test]
    fn penalty_gradient_vanishes_at_commuting_points() {
        let p = ParameterSet::free_from(&two_state());
        assert!(grad_penalty(&p).unwrap().iter().all(|g| g.abs() < 1e-15));
    }

    #[test]
    fn sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            assert_eq!(sample(&real("a"), 1, &mut rng).unwrap(), ms("a"));
        }
        assert!(matches!(Sampler::new(&real("[-1]a | b"), 1), Err(Error::NotDistribution(_))));
        assert!(matches!(Sampler::new(&real("0a"), 1), Err(Error::Degenerate(_))));
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let s = Sampler::new(&two_state(), 4).unwrap();
        assert_eq!(s.sample_seeded(50, 3), s.sample_seeded(50, 3));
        assert_ne!(s.sample_seeded(50, 3), s.sample_seeded(50, 4));
    }

    #[test]
    fn empirical_frequencies_within_three_sigma() {
        let s = Sampler::new(&two_state(), 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let draws = 100_000;
        let mut counts: BTreeMap<Multiset, usize> = BTreeMap::new();
        for _ in 0..draws {
            *counts.entry(s.sample(&mut rng)).or_default() += 1;
        }
        let total: f64 = s.probabilities().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for (w, p) in s.probabilities() {
            let expected = p * draws as f64;
            let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
            let got = *counts.get(w).unwrap_or(&0) as f64;
            assert!((got - expected).abs() <= 3.0 * sigma.max(1.0), "{w}: {got} vs {expected}");
        }
    }
}
