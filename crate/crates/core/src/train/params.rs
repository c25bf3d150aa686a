use std::collections::BTreeMap;

use rand::Rng;

use crate::automaton::MultisetAutomaton;
use crate::construct::compile_typed;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::multiset::{Alphabet, Symbol};
use crate::regex::Regex;
use crate::semiring::Literal;

use super::tape::{Real, Tape, Var};

/// Where one free parameter lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binding {
    Lambda(usize),
    Rho(usize),
    Mu { symbol: usize, row: usize, col: usize },
    /// A Scale node of the skeleton expression, in pre-order.
    Scale(usize),
}

#[derive(Debug, Clone, PartialEq)]
enum Target {
    Skeleton { regex: Regex<f64>, alphabet: Alphabet },
    Free { alphabet: Vec<Symbol>, d: usize },
}

/// Free parameters and the entries they fill.
///
/// In skeleton mode the parameters are the Scale weights of an mc-regular
/// expression and every automaton entry is a polynomial in them, so the
/// compiled transition matrices commute whatever the values. In free mode
/// every entry of λ, μ and ρ is its own parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSet {
    pub values: Vec<f64>,
    bindings: Vec<Binding>,
    target: Target,
}

impl ParameterSet {
    /// Parameters for the Scale weights of `regex`, initialized to the
    /// weights written in it.
    pub fn skeleton(regex: &Regex<Literal>, alphabet: &Alphabet) -> Result<Self> {
        regex.check_mc()?;
        let regex = regex.map_weights(&mut Literal::to_f64);
        let values: Vec<f64> = regex.weights().into_iter().copied().collect();
        if let Some(bad) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::Invalid(format!("weight {bad} is not a finite real")));
        }
        let p = ParameterSet {
            bindings: (0..values.len()).map(Binding::Scale).collect(),
            values,
            target: Target::Skeleton {
                regex,
                alphabet: alphabet.clone(),
            },
        };
        p.automaton()?;
        Ok(p)
    }

    /// A fully connected `d`-state automaton with μ entries drawn from
    /// `mu_range` and λ, ρ entries from `(0, 1)`.
    pub fn free_random(d: usize, alphabet: &Alphabet, mu_range: (f64, f64), rng: &mut impl Rng) -> Result<Self> {
        if d == 0 {
            return Err(Error::Invalid("free automaton needs at least one state".into()));
        }
        if !(mu_range.0 < mu_range.1) {
            return Err(Error::Invalid(format!("empty initialization range {mu_range:?}")));
        }
        let k = alphabet.len();
        let lambda: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
        let mu: Vec<f64> = (0..k * d * d).map(|_| rng.random_range(mu_range.0..mu_range.1)).collect();
        let rho: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
        Ok(Self::free_layout(alphabet.iter().cloned().collect(), d, lambda, mu, rho))
    }

    /// Free parameters initialized from an existing real automaton.
    pub fn free_from(m: &MultisetAutomaton<f64>) -> Self {
        let mu = (0..m.alphabet().len()).flat_map(|i| m.mu_at(i).entries().to_vec()).collect();
        Self::free_layout(m.alphabet().to_vec(), m.d(), m.lambda().to_vec(), mu, m.rho().to_vec())
    }

    fn free_layout(alphabet: Vec<Symbol>, d: usize, lambda: Vec<f64>, mu: Vec<f64>, rho: Vec<f64>) -> Self {
        let mut bindings: Vec<Binding> = (0..d).map(Binding::Lambda).collect();
        for symbol in 0..alphabet.len() {
            for row in 0..d {
                for col in 0..d {
                    bindings.push(Binding::Mu { symbol, row, col });
                }
            }
        }
        bindings.extend((0..d).map(Binding::Rho));
        let mut values = lambda;
        values.extend(mu);
        values.extend(rho);
        ParameterSet {
            values,
            bindings,
            target: Target::Free { alphabet, d },
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn bindings(&self) -> &[Binding] {
        &self.bindings
    }

    pub fn is_skeleton(&self) -> bool {
        matches!(self.target, Target::Skeleton { .. })
    }

    /// The skeleton expression carrying the current weights.
    pub fn regex(&self) -> Option<Regex<f64>> {
        match &self.target {
            Target::Skeleton { regex, .. } => Some(regex.with_weights(&self.values).expect("one value per scale node")),
            Target::Free { .. } => None,
        }
    }

    pub fn automaton(&self) -> Result<MultisetAutomaton<f64>> {
        self.build(&self.values)
    }

    /// The automaton with every parameter tracked on `tape`; the returned
    /// variables are the first `len()` nodes of the tape.
    pub fn instantiate<'t>(&self, tape: &'t Tape) -> Result<(MultisetAutomaton<Var<'t>>, Vec<Var<'t>>)> {
        let vars: Vec<Var<'t>> = self.values.iter().map(|&x| tape.var(x)).collect();
        Ok((self.build(&vars)?, vars))
    }

    /// The automaton with the parameters replaced by `vals`.
    pub fn build<R: Real>(&self, vals: &[R]) -> Result<MultisetAutomaton<R>> {
        if vals.len() != self.len() {
            return Err(Error::Shape(format!("{} values for {} parameters", vals.len(), self.len())));
        }
        match &self.target {
            Target::Skeleton { regex, alphabet } => compile_typed(&regex.with_weights(vals)?, alphabet),
            Target::Free { alphabet, d } => {
                let d = *d;
                let mut lambda = vec![R::zero(); d];
                let mut rho = vec![R::zero(); d];
                let mut mu: Vec<Vec<R>> = vec![vec![R::zero(); d * d]; alphabet.len()];
                for (b, v) in self.bindings.iter().zip(vals) {
                    match *b {
                        Binding::Lambda(i) => lambda[i] = *v,
                        Binding::Rho(i) => rho[i] = *v,
                        Binding::Mu { symbol, row, col } => mu[symbol][row * d + col] = *v,
                        Binding::Scale(_) => unreachable!("free layouts have no scale bindings"),
                    }
                }
                let mu: BTreeMap<Symbol, Matrix<R>> = alphabet
                    .iter()
                    .cloned()
                    .zip(mu)
                    .map(|(s, entries)| Ok((s, Matrix::new(d, d, entries)?)))
                    .collect::<Result<_>>()?;
                MultisetAutomaton::new(alphabet.iter().cloned().collect(), lambda, mu, rho, BTreeMap::new())
            }
        }
    }
}
