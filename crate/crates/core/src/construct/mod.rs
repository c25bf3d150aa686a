//! Compilation of mc-regular expressions into multiset automata.
//!
//! Every rule keeps the transition matrices pairwise commuting and tracks
//! κ(a), the diagonal marking states that have not read an `a` yet:
//!
//! | expression | states | μ(a) | λ, ρ |
//! |---|---|---|---|
//! | `a` | 2 | `[[0,1],[0,0]]`, zero for other symbols | `[1,0]`, `[0,1]` |
//! | `[k]α` | d | unchanged | ρ scaled by k |
//! | `α₁|α₂` | d₁+d₂ | block diagonal | concatenated |
//! | `α₁α₂` | d₁d₂ | `μ₁(a)⊗κ₂(a) + I⊗μ₂(a)` | `λ₁⊗λ₂`, `ρ₁⊗ρ₂` |
//! | `α₁*` | d | `μ₁(a) + ρ₁λ₁μ₁(a)` | λ₁, `ρ₁ + e_s` |
//!
//! In the star rule `s` is the first state with a nonzero initial weight.
//! Initial states have no incoming transitions, so marking `s` final adds
//! exactly the empty multiset to the language. Subexpressions whose
//! language is empty compile to the one-state empty automaton.

mod lazy;

pub use lazy::LazyAutomaton;

use crate::automaton::MultisetAutomaton;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::multiset::{Alphabet, Symbol};
use crate::regex::Regex;
use crate::semiring::{Literal, Semiring, Weight};

/// Largest automaton [`compile`] will materialize.
pub const MAX_COMPILED_STATES: usize = 4096;

fn kron_vec<S: Semiring>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x.times(y)))
        .collect()
}

fn kron_mask(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x && y)).collect()
}

fn one_state<S: Semiring>(sigma: &[Symbol], rho: S) -> MultisetAutomaton<S> {
    MultisetAutomaton::from_parts(
        sigma.to_vec(),
        vec![S::one()],
        vec![Matrix::zeros(1, 1); sigma.len()],
        vec![rho],
        vec![vec![true]; sigma.len()],
    )
}

/// Accepts only the empty multiset, with weight one.
pub fn epsilon<S: Semiring>(sigma: &Alphabet) -> MultisetAutomaton<S> {
    one_state(&sigma.iter().cloned().collect::<Vec<_>>(), S::one())
}

/// Accepts nothing.
pub fn empty<S: Semiring>(sigma: &Alphabet) -> MultisetAutomaton<S> {
    one_state(&sigma.iter().cloned().collect::<Vec<_>>(), S::zero())
}

pub fn atom<S: Semiring>(a: &Symbol, sigma: &Alphabet) -> Result<MultisetAutomaton<S>> {
    if !sigma.contains(a) {
        return Err(Error::Vocabulary(a.to_string()));
    }
    let (o, z) = (S::one(), S::zero());
    let alphabet: Vec<Symbol> = sigma.iter().cloned().collect();
    let mut mu = Vec::with_capacity(alphabet.len());
    let mut kappa = Vec::with_capacity(alphabet.len());
    for b in &alphabet {
        if b == a {
            mu.push(Matrix::from_rows(vec![vec![z.clone(), o.clone()], vec![z.clone(), z.clone()]])?);
            kappa.push(vec![true, false]);
        } else {
            mu.push(Matrix::zeros(2, 2));
            kappa.push(vec![true, true]);
        }
    }
    Ok(MultisetAutomaton::from_parts(
        alphabet,
        vec![o.clone(), z.clone()],
        mu,
        vec![z, o],
        kappa,
    ))
}

pub fn scale<S: Semiring>(k: &S, m: &MultisetAutomaton<S>) -> MultisetAutomaton<S> {
    let mut out = m.clone();
    for r in out.rho_mut() {
        *r = k.times(r);
    }
    out
}

fn same_alphabet<S>(m1: &MultisetAutomaton<S>, m2: &MultisetAutomaton<S>) -> Result<()>
where
    S: Semiring,
{
    if m1.alphabet() != m2.alphabet() {
        return Err(Error::Invalid("automata have different alphabets".into()));
    }
    Ok(())
}

fn check_size(d: Option<usize>) -> Result<usize> {
    match d {
        Some(d) if d <= MAX_COMPILED_STATES => Ok(d),
        _ => Err(Error::Resource(format!(
            "compiled automaton would exceed {MAX_COMPILED_STATES} states"
        ))),
    }
}

pub fn union<S: Semiring>(m1: &MultisetAutomaton<S>, m2: &MultisetAutomaton<S>) -> Result<MultisetAutomaton<S>> {
    same_alphabet(m1, m2)?;
    let (d1, d2) = (m1.d(), m2.d());
    let d = check_size(d1.checked_add(d2))?;
    let mu = (0..m1.alphabet().len())
        .map(|i| {
            let mut m = Matrix::zeros(d, d);
            for r in 0..d1 {
                for c in 0..d1 {
                    m.set(r, c, m1.mu_at(i).get(r, c).clone());
                }
            }
            for r in 0..d2 {
                for c in 0..d2 {
                    m.set(d1 + r, d1 + c, m2.mu_at(i).get(r, c).clone());
                }
            }
            m
        })
        .collect();
    let kappa = (0..m1.alphabet().len())
        .map(|i| [m1.kappa_at(i), m2.kappa_at(i)].concat())
        .collect();
    Ok(MultisetAutomaton::from_parts(
        m1.alphabet().to_vec(),
        [m1.lambda(), m2.lambda()].concat(),
        mu,
        [m1.rho(), m2.rho()].concat(),
        kappa,
    ))
}

pub fn shuffle<S: Semiring>(m1: &MultisetAutomaton<S>, m2: &MultisetAutomaton<S>) -> Result<MultisetAutomaton<S>> {
    same_alphabet(m1, m2)?;
    check_size(m1.d().checked_mul(m2.d()))?;
    let id1 = Matrix::identity(m1.d());
    let mu = (0..m1.alphabet().len())
        .map(|i| {
            let gated = m1.mu_at(i).kron(&Matrix::from_diagonal_mask(m2.kappa_at(i)));
            gated.add(&id1.kron(m2.mu_at(i)))
        })
        .collect::<Result<Vec<_>>>()?;
    let kappa = (0..m1.alphabet().len())
        .map(|i| kron_mask(m1.kappa_at(i), m2.kappa_at(i)))
        .collect();
    Ok(MultisetAutomaton::from_parts(
        m1.alphabet().to_vec(),
        kron_vec(m1.lambda(), m2.lambda()),
        mu,
        kron_vec(m1.rho(), m2.rho()),
        kappa,
    ))
}

/// Star of an automaton whose language is proper and uses only `a`.
pub fn star_unary<S: Semiring>(m1: &MultisetAutomaton<S>, a: &Symbol) -> Result<MultisetAutomaton<S>> {
    let ai = m1.symbol_index(a)?;
    for (i, b) in m1.alphabet().iter().enumerate() {
        if i != ai && !m1.mu_at(i).is_zero() {
            return Err(Error::Invalid(format!(
                "star operand reads `{b}`; starred operands must use only `{a}`"
            )));
        }
    }
    if !crate::matrix::dot(m1.lambda(), m1.rho()).is_zero() {
        return Err(Error::Invalid("star operand accepts the empty multiset".into()));
    }
    let mu1 = m1.mu_at(ai);
    let restart = mu1.vec_mul(m1.lambda())?;
    let d = m1.d();
    let mut mu_a = mu1.clone();
    for r in 0..d {
        let f = &m1.rho()[r];
        if f.is_zero() {
            continue;
        }
        for (c, x) in restart.iter().enumerate() {
            if !x.is_zero() {
                let v = mu_a.get(r, c).plus(&f.times(x));
                mu_a.set(r, c, v);
            }
        }
    }
    let mut out = m1.clone();
    *out.mu_mut(ai) = mu_a;
    if let Some(s) = m1.lambda().iter().position(|x| !x.is_zero()) {
        let rho = out.rho_mut();
        rho[s] = rho[s].plus(&S::one());
    }
    Ok(out)
}

/// Compile an mc-regular expression over `sigma`, which must contain every
/// symbol of `alpha`.
pub fn compile<S: Weight>(alpha: &Regex<Literal>, sigma: &Alphabet) -> Result<MultisetAutomaton<S>> {
    alpha.check_mc()?;
    let typed = alpha.try_map_weights(&mut S::from_literal)?;
    compile_typed(&typed, sigma)
}

/// [`compile`] for expressions whose weights are already in `S`. The
/// expression must be mc-regular; this is checked structurally.
pub fn compile_typed<S: Semiring>(alpha: &Regex<S>, sigma: &Alphabet) -> Result<MultisetAutomaton<S>> {
    check_alphabet(alpha, sigma)?;
    check_size(state_count(alpha).and_then(|n| usize::try_from(n).ok()))?;
    build(alpha, sigma)
}

pub(crate) fn check_alphabet<W>(alpha: &Regex<W>, sigma: &Alphabet) -> Result<()> {
    if let Some(s) = alpha.symbols().difference(sigma).next() {
        return Err(Error::Vocabulary(s.to_string()));
    }
    Ok(())
}

fn build<S: Semiring>(alpha: &Regex<S>, sigma: &Alphabet) -> Result<MultisetAutomaton<S>> {
    if alpha.language_alphabet().is_none() {
        return Ok(empty(sigma));
    }
    match alpha {
        Regex::Symbol(a) => atom(a, sigma),
        Regex::Epsilon => Ok(epsilon(sigma)),
        Regex::Empty => Ok(empty(sigma)),
        Regex::Scale(k, c) => Ok(scale(k, &build(c, sigma)?)),
        Regex::Union(l, r) => union(&build(l, sigma)?, &build(r, sigma)?),
        Regex::Product(l, r) => shuffle(&build(l, sigma)?, &build(r, sigma)?),
        Regex::Star(c) => {
            let a = star_symbol(c)?;
            star_unary(&build(c, sigma)?, &a)
        }
    }
}

pub(crate) fn star_symbol<W>(operand: &Regex<W>) -> Result<Symbol> {
    if operand.nullable() {
        return Err(Error::Invalid("star operand accepts the empty multiset".into()));
    }
    operand
        .unary_symbol()
        .ok_or_else(|| Error::Invalid("star operand must use exactly one symbol".into()))
}

/// Number of states [`compile`] produces: 2 per symbol, 1 for `&`, `0` and
/// any subexpression with an empty language, sums for unions, products for
/// products, unchanged under star and scaling. `None` on overflow.
pub fn state_count<W>(alpha: &Regex<W>) -> Option<u128> {
    if alpha.language_alphabet().is_none() {
        return Some(1);
    }
    match alpha {
        Regex::Symbol(_) => Some(2),
        Regex::Epsilon | Regex::Empty => Some(1),
        Regex::Scale(_, c) | Regex::Star(c) => state_count(c),
        Regex::Union(l, r) => state_count(l)?.checked_add(state_count(r)?),
        Regex::Product(l, r) => state_count(l)?.checked_mul(state_count(r)?),
    }
}
