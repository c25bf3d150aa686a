//! The two-sided characteristic equation of a square matrix, valid over any
//! commutative semiring.
//!
//! A permutation term of `det(λI − μ)` with a nonzero product is a *linear
//! subgraph*: a set of node-disjoint cycles of the support graph covering
//! some `K ⊆ [d]`. Its weight is the product of the cycle edge weights and
//! it contributes to the coefficient of `λ^(d−|K|)` with sign `(−1)^c`,
//! where `c` is the number of cycles. Collecting odd-`c` terms on one side
//! and even-`c` terms (including `λ^d`, the empty subgraph) on the other
//! yields an identity that needs no subtraction.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::semiring::{Ring, Semiring};

use super::graph::{node_mask, simple_cycles, Digraph};

/// Limit on the number of linear subgraphs visited.
pub const LINEAR_SUBGRAPH_CAP: usize = 10_000_000;

/// `Σ left[i] λ^(d−i) = Σ right[i] λ^(d−i)`, both sides listed from `λ^d`
/// down to `λ^0`. `left` collects subgraphs with an odd number of cycles,
/// `right` those with an even number, so `right[0]` is one and `left[0]`
/// is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CharEquation<S> {
    pub d: usize,
    pub left: Vec<S>,
    pub right: Vec<S>,
}

struct Cycle<S> {
    mask: u64,
    weight: S,
}

pub fn char_equation<S: Semiring>(mu: &Matrix<S>) -> Result<CharEquation<S>> {
    if !mu.is_square() {
        return Err(Error::Shape(format!("{}x{} matrix is not square", mu.rows(), mu.cols())));
    }
    let d = mu.rows();
    let cycles: Vec<Cycle<S>> = simple_cycles(&Digraph::support(mu))?
        .into_iter()
        .map(|c| {
            let weight = (0..c.len()).fold(S::one(), |acc, i| acc.times(mu.get(c[i], c[(i + 1) % c.len()])));
            Cycle {
                mask: node_mask(&c),
                weight,
            }
        })
        .collect();
    let mut eq = CharEquation {
        d,
        left: vec![S::zero(); d + 1],
        right: vec![S::zero(); d + 1],
    };
    eq.right[0] = S::one();
    let mut visited = 0usize;
    collect(&cycles, 0, 0, &S::one(), 0, &mut eq, &mut visited)?;
    Ok(eq)
}

fn collect<S: Semiring>(
    cycles: &[Cycle<S>],
    from: usize,
    used: u64,
    weight: &S,
    count: usize,
    eq: &mut CharEquation<S>,
    visited: &mut usize,
) -> Result<()> {
    for (j, c) in cycles.iter().enumerate().skip(from) {
        if c.mask & used != 0 {
            continue;
        }
        *visited += 1;
        if *visited > LINEAR_SUBGRAPH_CAP {
            return Err(Error::Resource(format!("more than {LINEAR_SUBGRAPH_CAP} linear subgraphs")));
        }
        let mask = used | c.mask;
        let w = weight.times(&c.weight);
        let k = mask.count_ones() as usize;
        let side = if (count + 1) % 2 == 1 { &mut eq.left } else { &mut eq.right };
        side[k] = side[k].plus(&w);
        collect(cycles, j + 1, mask, &w, count + 1, eq, visited)?;
    }
    Ok(())
}

impl<S: Semiring> CharEquation<S> {
    /// True when the even side is just `λ^d`, so `μ^d` equals a
    /// combination of lower powers with no subtraction.
    pub fn is_compressible(&self) -> bool {
        self.right[1..].iter().all(Semiring::is_zero)
    }

    /// Coefficients `r_0 … r_(d−1)` with `μ^d = Σ r_k μ^k`, available
    /// without negation when the equation is compressible.
    pub fn semiring_rule(&self) -> Option<Vec<S>> {
        self.is_compressible().then(|| (0..self.d).map(|k| self.left[self.d - k].clone()).collect())
    }

    /// Both sides with `μ` substituted for `λ`.
    pub fn evaluate(&self, mu: &Matrix<S>) -> Result<(Matrix<S>, Matrix<S>)> {
        let d = self.d;
        let mut left = Matrix::zeros(d, d);
        let mut right = Matrix::zeros(d, d);
        let mut power = Matrix::identity(d);
        for k in 0..=d {
            let i = d - k;
            if !self.left[i].is_zero() {
                left = left.add(&power.scale(&self.left[i]))?;
            }
            if !self.right[i].is_zero() {
                right = right.add(&power.scale(&self.right[i]))?;
            }
            if k < d {
                power = power.mat_mul(mu)?;
            }
        }
        Ok((left, right))
    }
}

impl<S: Ring> CharEquation<S> {
    /// The monic characteristic polynomial `right − left`, from `λ^d` down.
    pub fn collapse(&self) -> Vec<S> {
        self.right.iter().zip(&self.left).map(|(r, l)| r.minus(l)).collect()
    }

    /// Coefficients `r_0 … r_(d−1)` with `μ^d = Σ r_k μ^k`.
    pub fn ring_rule(&self) -> Vec<S> {
        (0..self.d)
            .map(|k| self.left[self.d - k].minus(&self.right[self.d - k]))
            .collect()
    }
}

impl<S: Semiring + fmt::Display> fmt::Display for CharEquation<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |coeffs: &[S]| {
            let terms: Vec<String> = coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| {
                    let p = self.d - i;
                    let power = match p {
                        0 => String::new(),
                        1 => "λ".to_string(),
                        _ => format!("λ^{p}"),
                    };
                    match (c == &S::one(), p) {
                        (true, 0) => "1".to_string(),
                        (true, _) => power,
                        (false, 0) => c.to_string(),
                        (false, _) => format!("{c}·{power}"),
                    }
                })
                .collect();
            if terms.is_empty() {
                "0".to_string()
            } else {
                terms.join(" + ")
            }
        };
        write!(f, "{} = {}", side(&self.right), side(&self.left))
    }
}
