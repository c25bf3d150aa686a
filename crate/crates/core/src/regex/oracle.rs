//! Direct recursive weighted semantics, used as a test oracle for the
//! automaton construction. Exponential in the multiset size.

use crate::error::{Error, Result};
use crate::multiset::Multiset;
use crate::semiring::{Literal, Semiring, Weight};

use super::Regex;

/// Largest multiset size [`oracle_weight`] accepts.
pub const ORACLE_BOUND: usize = 10;

/// Weight of `w` under the mc-regular expression `alpha`, interpreted in `S`.
pub fn oracle_weight<S: Weight>(alpha: &Regex<Literal>, w: &Multiset) -> Result<S> {
    oracle_weight_bounded(alpha, w, ORACLE_BOUND)
}

pub fn oracle_weight_bounded<S: Weight>(alpha: &Regex<Literal>, w: &Multiset, bound: usize) -> Result<S> {
    if w.size() > bound {
        return Err(Error::Resource(format!(
            "oracle bound is {bound}, multiset has size {}",
            w.size()
        )));
    }
    alpha.check_mc()?;
    let typed = alpha.try_map_weights(&mut S::from_literal)?;
    Ok(eval(&typed, w))
}

fn eval<S: Semiring>(r: &Regex<S>, w: &Multiset) -> S {
    match r {
        Regex::Symbol(s) => indicator(w.size() == 1 && w.count(s) == 1),
        Regex::Epsilon => indicator(w.is_empty()),
        Regex::Empty => S::zero(),
        Regex::Scale(k, c) => k.times(&eval(c, w)),
        Regex::Union(l, rr) => eval(l, w).plus(&eval(rr, w)),
        Regex::Product(l, rr) => w.sub_multisets().iter().fold(S::zero(), |acc, u| {
            let v = w.difference(u).expect("sub-multiset");
            let left = eval(l, u);
            if left.is_zero() {
                acc
            } else {
                acc.plus(&left.times(&eval(rr, &v)))
            }
        }),
        Regex::Star(c) => {
            if w.is_empty() {
                return S::one();
            }
            let a = match c.unary_symbol() {
                Some(a) => a,
                None => return S::zero(),
            };
            let m = w.count(&a);
            if m != w.size() {
                return S::zero();
            }
            let parts: Vec<S> = (0..=m).map(|j| eval(c, &Multiset::power(a.clone(), j))).collect();
            let mut table = vec![S::one()];
            for k in 1..=m {
                let mut acc = S::zero();
                for j in 1..=k {
                    acc = acc.plus(&parts[j].times(&table[k - j]));
                }
                table.push(acc);
            }
            table.pop().expect("nonempty")
        }
    }
}

fn indicator<S: Semiring>(b: bool) -> S {
    if b {
        S::one()
    } else {
        S::zero()
    }
}
