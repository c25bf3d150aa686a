//! Compressed inside weights.
//!
//! The inside weight of a multiset `w` is the matrix `μ(w)`. For a single
//! symbol the characteristic equation rewrites any power of `μ(a)` as a
//! combination of `I, μ(a), …, μ(a)^(d−1)` ([`UnaryInside`]); for automata
//! compiled from expressions a graded generating set of exactly `d`
//! matrices does the same for arbitrary multisets ([`GeneratingSet`]).

mod chareq;
mod graded;
mod graph;
mod unary;

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

pub use chareq::{char_equation, CharEquation, LINEAR_SUBGRAPH_CAP};
pub use graded::{GeneratingSet, StructureConstants, MAX_GENERATING_SET};
pub use graph::{
    has_two_node_disjoint_cycles, make_thomassen_graph, node_mask, simple_cycles, simple_cycles_capped, Digraph,
    CYCLE_CAP, NODE_CAP,
};
pub use unary::UnaryInside;

use crate::automaton::MultisetAutomaton;
use crate::error::Result;
use crate::multiset::{Alphabet, Symbol};
use crate::semiring::Semiring;

fn next_id() -> u64 {
    static NEXT: AtomicU64 = AtomicU64::new(1);
    NEXT.fetch_add(1, Ordering::Relaxed)
}

/// `d` coefficients over an encoder's generators, tagged with the encoder
/// that produced them and the sub-alphabets of the multisets they sum over.
#[derive(Debug, Clone, PartialEq)]
pub struct InsideVector<S> {
    pub id: u64,
    pub grades: BTreeSet<Alphabet>,
    pub coeffs: Vec<S>,
}

impl<S> InsideVector<S> {
    /// The grade, when the vector has exactly one.
    pub fn grade(&self) -> Option<&Alphabet> {
        if self.grades.len() == 1 {
            self.grades.iter().next()
        } else {
            None
        }
    }
}

/// Largest deviation observed for each κ law.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KappaReport {
    /// κ(a)κ(a) = κ(a)
    pub idempotent: f64,
    /// κ(a)κ(b) = κ(b)κ(a)
    pub commute: f64,
    /// μ(a)κ(a) = 0
    pub annihilate: f64,
    /// μ(a)κ(b) = κ(b)μ(a) for a ≠ b
    pub mixed_commute: f64,
}

impl KappaReport {
    pub fn max(&self) -> f64 {
        self.idempotent
            .max(self.commute)
            .max(self.annihilate)
            .max(self.mixed_commute)
    }
}

/// Check the κ laws that compiled automata satisfy. κ is stored as a
/// Boolean diagonal, so the first two laws hold by construction and the
/// products in the other two reduce to entrywise masks.
pub fn verify_kappa_laws<S: Semiring>(m: &MultisetAutomaton<S>) -> KappaReport {
    let d = m.d();
    let n = m.alphabet().len();
    let zero = S::zero();
    let mut report = KappaReport::default();
    for a in 0..n {
        let ka = m.kappa_at(a);
        let mu = m.mu_at(a);
        for i in 0..d {
            for j in 0..d {
                let x = mu.get(i, j);
                if x.is_zero() {
                    continue;
                }
                let size = x.distance(&zero);
                if ka[j] {
                    report.annihilate = report.annihilate.max(size);
                }
                for b in (0..n).filter(|&b| b != a) {
                    let kb = m.kappa_at(b);
                    if kb[i] != kb[j] {
                        report.mixed_commute = report.mixed_commute.max(size);
                    }
                }
            }
        }
    }
    report
}

/// Both compressibility verdicts for one symbol's transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Compressibility {
    pub cycles: usize,
    pub two_disjoint_cycles: bool,
    /// The even side of the characteristic equation is just `λ^d`.
    pub by_coefficients: bool,
}

impl Compressibility {
    /// The coefficient test and the graph test agree; they can only differ
    /// when weights cancel.
    pub fn consistent(&self) -> bool {
        self.by_coefficients != self.two_disjoint_cycles
    }
}

pub fn compressibility<S: Semiring>(m: &MultisetAutomaton<S>, a: &Symbol) -> Result<Compressibility> {
    let mu = m.mu(a)?;
    let g = Digraph::support(mu);
    let cycles = simple_cycles(&g)?;
    let masks: Vec<u64> = cycles.iter().map(|c| node_mask(c)).collect();
    Ok(Compressibility {
        cycles: cycles.len(),
        two_disjoint_cycles: graph::cycle_masks_have_disjoint_pair(&masks),
        by_coefficients: char_equation(mu)?.is_compressible(),
    })
}

pub fn is_compressible<S: Semiring>(m: &MultisetAutomaton<S>, a: &Symbol) -> Result<bool> {
    Ok(compressibility(m, a)?.by_coefficients)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::compile;
    use crate::matrix::Matrix;
    use crate::multiset::{alphabet, sym};
    use crate::regex::parse;
    use crate::semiring::Rational;
    use std::collections::BTreeMap;

    fn comp(s: &str) -> MultisetAutomaton<Rational> {
        let r = parse(s).unwrap();
        compile(&r, &r.symbols()).unwrap()
    }

    #[test]
    fn kappa_laws_on_compiled_automata() {
        for s in ["a", "ab", "a*b", "(a|b)(aa)*", "[2]a b [3]c*", "(a|&)(b|0c)"] {
            assert_eq!(verify_kappa_laws(&comp(s)).max(), 0.0, "{s}");
        }
    }

    #[test]
    fn kappa_law_violation_is_reported() {
        let m = MultisetAutomaton::new(
            alphabet(["a"]),
            vec![1.0, 0.0],
            BTreeMap::from([(sym("a"), Matrix::from_rows(vec![vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap())]),
            vec![0.0, 1.0],
            BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(verify_kappa_laws(&m).annihilate, 2.0);
    }

    #[test]
    fn compressibility_examples() {
        assert!(is_compressible(&comp("a*"), &sym("a")).unwrap());
        assert!(is_compressible(&comp("(aa)*"), &sym("a")).unwrap());
        let diag = MultisetAutomaton::new(
            alphabet(["a"]),
            vec![1u64, 0],
            BTreeMap::from([(sym("a"), Matrix::from_rows(vec![vec![2u64, 0], vec![0, 3]]).unwrap())]),
            vec![1, 1],
            BTreeMap::new(),
        )
        .unwrap();
        let c = compressibility(&diag, &sym("a")).unwrap();
        assert!(!c.by_coefficients && c.two_disjoint_cycles && c.consistent());
        let star = compressibility(&comp("a*"), &sym("a")).unwrap();
        assert!(!star.two_disjoint_cycles && star.consistent());
    }
}
