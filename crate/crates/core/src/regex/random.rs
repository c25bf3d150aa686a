//! Random expression generators for property tests and benchmarks.

use rand::Rng;

use crate::multiset::{sym, Symbol};
use crate::semiring::Literal;

use super::Regex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightRange {
    /// Small signed rationals `p/q`.
    Signed,
    /// Small positive rationals.
    Positive,
    /// Rationals in `(0, 1]`, valid for the Viterbi semiring.
    UnitInterval,
}

#[derive(Debug, Clone)]
pub struct RegexShape {
    pub max_size: usize,
    pub alphabet: Vec<Symbol>,
    pub weights: WeightRange,
}

impl Default for RegexShape {
    fn default() -> Self {
        RegexShape {
            max_size: 8,
            alphabet: vec![sym("a"), sym("b"), sym("c")],
            weights: WeightRange::Signed,
        }
    }
}

fn random_weight<R: Rng>(rng: &mut R, range: WeightRange) -> Literal {
    match range {
        WeightRange::Signed => {
            let mut p = rng.random_range(-4i64..=4);
            if p == 0 {
                p = 1;
            }
            Literal::from_ratio(p, rng.random_range(1..=3))
        }
        WeightRange::Positive => Literal::from_ratio(rng.random_range(1..=5), rng.random_range(1..=4)),
        WeightRange::UnitInterval => {
            let q = rng.random_range(1..=4);
            Literal::from_ratio(rng.random_range(1..=q), q)
        }
    }
}

fn leaf<R: Rng>(rng: &mut R, alphabet: &[Symbol], allow_eps: bool) -> Regex {
    let roll = rng.random_range(0..10);
    if allow_eps && roll == 0 {
        Regex::Epsilon
    } else if roll == 1 {
        Regex::Empty
    } else {
        Regex::Symbol(alphabet[rng.random_range(0..alphabet.len())].clone())
    }
}

fn gen_sized<R: Rng>(rng: &mut R, n: usize, alphabet: &[Symbol], shape: &RegexShape, mc: bool, allow_eps: bool) -> Regex {
    if n <= 1 {
        return leaf(rng, alphabet, allow_eps);
    }
    let choice = if n == 2 { rng.random_range(2..4) } else { rng.random_range(0..6) };
    match choice {
        0 | 4 => {
            let l = rng.random_range(1..n - 1);
            Regex::union(
                gen_sized(rng, l, alphabet, shape, mc, allow_eps),
                gen_sized(rng, n - 1 - l, alphabet, shape, mc, allow_eps),
            )
        }
        1 | 5 => {
            let l = rng.random_range(1..n - 1);
            Regex::product(
                gen_sized(rng, l, alphabet, shape, mc, allow_eps),
                gen_sized(rng, n - 1 - l, alphabet, shape, mc, allow_eps),
            )
        }
        2 => {
            if mc {
                let a = alphabet[rng.random_range(0..alphabet.len())].clone();
                Regex::star(gen_sized(rng, n - 1, &[a], shape, mc, false))
            } else {
                Regex::star(gen_sized(rng, n - 1, alphabet, shape, mc, allow_eps))
            }
        }
        _ => Regex::scale(
            random_weight(rng, shape.weights),
            gen_sized(rng, n - 1, alphabet, shape, mc, allow_eps),
        ),
    }
}

/// Any expression of size `1..=max_size`; stars may be invalid.
pub fn random_regex<R: Rng>(rng: &mut R, shape: &RegexShape) -> Regex {
    let n = rng.random_range(1..=shape.max_size.max(1));
    gen_sized(rng, n, &shape.alphabet, shape, false, true)
}

/// An mc-regular expression of size `1..=max_size`.
pub fn random_mc_regex<R: Rng>(rng: &mut R, shape: &RegexShape) -> Regex {
    loop {
        let n = rng.random_range(1..=shape.max_size.max(1));
        let r = gen_sized(rng, n, &shape.alphabet, shape, true, true);
        if r.validate_mc().is_empty() {
            return r;
        }
    }
}
