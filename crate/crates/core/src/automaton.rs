//! Weighted multiset automata: `(λ, μ, ρ)` plus the Boolean `κ` diagonals
//! produced by regex compilation.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};
use crate::multiset::{count_vectors, multisets_up_to, Alphabet, Multiset, Symbol};
use crate::semiring::Semiring;

/// Largest language enumeration `enumerate_language` will attempt.
pub const ENUMERATION_CAP: u128 = 1_000_000;

#[derive(Clone, PartialEq)]
pub struct MultisetAutomaton<S> {
    alphabet: Vec<Symbol>,
    lambda: Vec<S>,
    mu: Vec<Matrix<S>>,
    rho: Vec<S>,
    /// Diagonal of κ(a): state has not read an `a` yet.
    kappa: Vec<Vec<bool>>,
}

impl<S: fmt::Debug> fmt::Debug for MultisetAutomaton<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultisetAutomaton")
            .field("alphabet", &self.alphabet)
            .field("lambda", &self.lambda)
            .field("mu", &self.mu)
            .field("rho", &self.rho)
            .field("kappa", &self.kappa)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommutativityReport {
    pub max_violation: f64,
    /// Symbol pairs whose commutator exceeds the tolerance.
    pub pairs: Vec<(Symbol, Symbol)>,
}

impl CommutativityReport {
    pub fn is_commutative(&self) -> bool {
        self.pairs.is_empty()
    }
}

impl<S: Semiring> MultisetAutomaton<S> {
    /// Build from per-symbol maps. Every alphabet symbol needs a `d x d`
    /// transition matrix; a missing κ entry defaults to all-true.
    pub fn new(
        alphabet: Alphabet,
        lambda: Vec<S>,
        mut mu: BTreeMap<Symbol, Matrix<S>>,
        rho: Vec<S>,
        mut kappa: BTreeMap<Symbol, Vec<bool>>,
    ) -> Result<Self> {
        let d = lambda.len();
        if d == 0 {
            return Err(Error::Shape("automaton needs at least one state".into()));
        }
        if rho.len() != d {
            return Err(Error::Shape(format!("rho has {} entries, expected {d}", rho.len())));
        }
        for s in mu.keys().chain(kappa.keys()) {
            if !alphabet.contains(s) {
                return Err(Error::Vocabulary(s.to_string()));
            }
        }
        let alphabet: Vec<Symbol> = alphabet.into_iter().collect();
        let mut mus = Vec::with_capacity(alphabet.len());
        let mut kappas = Vec::with_capacity(alphabet.len());
        for s in &alphabet {
            let m = mu
                .remove(s)
                .ok_or_else(|| Error::Shape(format!("no transition matrix for `{s}`")))?;
            if m.rows() != d || m.cols() != d {
                return Err(Error::Shape(format!(
                    "mu({s}) is {}x{}, expected {d}x{d}",
                    m.rows(),
                    m.cols()
                )));
            }
            let k = kappa.remove(s).unwrap_or_else(|| vec![true; d]);
            if k.len() != d {
                return Err(Error::Shape(format!("kappa({s}) has {} entries, expected {d}", k.len())));
            }
            mus.push(m);
            kappas.push(k);
        }
        Ok(MultisetAutomaton {
            alphabet,
            lambda,
            mu: mus,
            rho,
            kappa: kappas,
        })
    }

    /// Unchecked constructor for code that builds consistent parts itself.
    pub(crate) fn from_parts(
        alphabet: Vec<Symbol>,
        lambda: Vec<S>,
        mu: Vec<Matrix<S>>,
        rho: Vec<S>,
        kappa: Vec<Vec<bool>>,
    ) -> Self {
        debug_assert_eq!(alphabet.len(), mu.len());
        debug_assert_eq!(alphabet.len(), kappa.len());
        debug_assert_eq!(lambda.len(), rho.len());
        MultisetAutomaton {
            alphabet,
            lambda,
            mu,
            rho,
            kappa,
        }
    }

    pub fn d(&self) -> usize {
        self.lambda.len()
    }

    /// Symbols in canonical order.
    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet
    }

    pub fn alphabet_set(&self) -> Alphabet {
        self.alphabet.iter().cloned().collect()
    }

    pub fn lambda(&self) -> &[S] {
        &self.lambda
    }

    pub fn rho(&self) -> &[S] {
        &self.rho
    }

    pub fn symbol_index(&self, s: &Symbol) -> Result<usize> {
        self.alphabet
            .binary_search(s)
            .map_err(|_| Error::Vocabulary(s.to_string()))
    }

    pub fn mu(&self, s: &Symbol) -> Result<&Matrix<S>> {
        Ok(&self.mu[self.symbol_index(s)?])
    }

    pub fn mu_at(&self, i: usize) -> &Matrix<S> {
        &self.mu[i]
    }

    pub fn kappa(&self, s: &Symbol) -> Result<&[bool]> {
        Ok(&self.kappa[self.symbol_index(s)?])
    }

    pub fn kappa_at(&self, i: usize) -> &[bool] {
        &self.kappa[i]
    }

    pub fn kappa_matrix(&self, s: &Symbol) -> Result<Matrix<S>> {
        Ok(Matrix::from_diagonal_mask(self.kappa(s)?))
    }

    pub fn lambda_mut(&mut self) -> &mut Vec<S> {
        &mut self.lambda
    }

    pub fn rho_mut(&mut self) -> &mut Vec<S> {
        &mut self.rho
    }

    pub fn mu_mut(&mut self, i: usize) -> &mut Matrix<S> {
        &mut self.mu[i]
    }

    fn check_vocabulary(&self, w: &Multiset) -> Result<()> {
        for (s, _) in w.iter() {
            self.symbol_index(s)?;
        }
        Ok(())
    }

    /// μ(w): product of μ(a) over the symbols of `w` in canonical order.
    pub fn mu_of_multiset(&self, w: &Multiset) -> Result<Matrix<S>> {
        self.check_vocabulary(w)?;
        let mut acc = Matrix::identity(self.d());
        for (s, c) in w.iter() {
            let p = self.mu(s)?.pow(c as u64)?;
            acc = acc.mat_mul(&p)?;
        }
        Ok(acc)
    }

    /// λ μ(w), propagated as a row vector.
    pub fn forward(&self, w: &Multiset) -> Result<Vec<S>> {
        self.check_vocabulary(w)?;
        let mut v = self.lambda.clone();
        for s in w.symbols() {
            v = self.mu(s)?.vec_mul(&v)?;
        }
        Ok(v)
    }

    /// M(w) = λ μ(w) ρ.
    pub fn weight(&self, w: &Multiset) -> Result<S> {
        Ok(dot(&self.forward(w)?, &self.rho))
    }

    pub fn check_commutativity(&self) -> CommutativityReport
    where
        S: crate::semiring::Weight,
    {
        self.check_commutativity_with(S::SPEC.equality_tolerance)
    }

    /// Entrywise deviation between μ(a)μ(b) and μ(b)μ(a) over all pairs;
    /// pairs above `tolerance` are reported.
    pub fn check_commutativity_with(&self, tolerance: f64) -> CommutativityReport {
        let mut max_violation: f64 = 0.0;
        let mut pairs = Vec::new();
        for i in 0..self.mu.len() {
            for j in i + 1..self.mu.len() {
                let ab = self.mu[i].mat_mul(&self.mu[j]).expect("square");
                let ba = self.mu[j].mat_mul(&self.mu[i]).expect("square");
                let dev = ab.max_deviation(&ba);
                max_violation = max_violation.max(dev);
                if dev > tolerance {
                    pairs.push((self.alphabet[i].clone(), self.alphabet[j].clone()));
                }
            }
        }
        CommutativityReport {
            max_violation,
            pairs,
        }
    }

    /// Every multiset of size at most `size_bound` with its weight.
    pub fn enumerate_language(&self, size_bound: usize) -> Result<Vec<(Multiset, S)>> {
        let k = self.alphabet.len();
        match multisets_up_to(k, size_bound) {
            Some(n) if n <= ENUMERATION_CAP => {}
            _ => {
                return Err(Error::Resource(format!(
                    "enumerating multisets of size <= {size_bound} over {k} symbols exceeds the cap of {ENUMERATION_CAP}"
                )))
            }
        }
        count_vectors(k, size_bound)
            .into_iter()
            .map(|c| {
                let w = Multiset::from_counts(self.alphabet.iter().cloned().zip(c));
                let x = self.weight(&w)?;
                Ok((w, x))
            })
            .collect()
    }

    pub fn map_weights<T: Semiring>(&self, mut f: impl FnMut(&S) -> T) -> MultisetAutomaton<T> {
        MultisetAutomaton {
            alphabet: self.alphabet.clone(),
            lambda: self.lambda.iter().map(&mut f).collect(),
            mu: self.mu.iter().map(|m| m.map(&mut f)).collect(),
            rho: self.rho.iter().map(&mut f).collect(),
            kappa: self.kappa.clone(),
        }
    }

    /// Graphviz rendering; edges are labelled `sym/weight`.
    pub fn to_dot(&self) -> String
    where
        S: fmt::Display,
    {
        let mut out = String::from("digraph {\n  rankdir=LR;\n");
        for q in 0..self.d() {
            let mut label = format!("q{q}");
            if !self.lambda[q].is_zero() {
                let _ = write!(label, "\\nin {}", self.lambda[q]);
            }
            if !self.rho[q].is_zero() {
                let _ = write!(label, "\\nout {}", self.rho[q]);
            }
            let shape = if self.rho[q].is_zero() { "circle" } else { "doublecircle" };
            let _ = writeln!(out, "  q{q} [shape={shape}, label=\"{label}\"];");
        }
        for (s, m) in self.alphabet.iter().zip(&self.mu) {
            for i in 0..self.d() {
                for j in 0..self.d() {
                    let w = m.get(i, j);
                    if !w.is_zero() {
                        let _ = writeln!(out, "  q{i} -> q{j} [label=\"{s}/{w}\"];");
                    }
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiset::{alphabet, sym};

    fn atom_a() -> MultisetAutomaton<f64> {
        MultisetAutomaton::new(
            alphabet(["a"]),
            vec![1.0, 0.0],
            BTreeMap::from([(
                sym("a"),
                Matrix::from_rows(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap(),
            )]),
            vec![0.0, 1.0],
            BTreeMap::from([(sym("a"), vec![true, false])]),
        )
        .unwrap()
    }

    fn w(s: &str) -> Multiset {
        s.parse().unwrap()
    }

    #[test]
    fn mu_of_empty_multiset_is_identity() {
        assert_eq!(atom_a().mu_of_multiset(&w("")).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn atom_weights() {
        let m = atom_a();
        assert_eq!(
            m.mu_of_multiset(&w("a")).unwrap(),
            Matrix::from_rows(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap()
        );
        assert!(m.mu_of_multiset(&w("a a")).unwrap().is_zero());
        assert_eq!(m.weight(&w("a")).unwrap(), 1.0);
        assert_eq!(m.weight(&w("")).unwrap(), 0.0);
    }

    #[test]
    fn unknown_symbol_is_a_vocabulary_error() {
        assert!(matches!(atom_a().weight(&w("b")), Err(Error::Vocabulary(_))));
    }

    #[test]
    fn enumerate_atom_language() {
        let got = atom_a().enumerate_language(2).unwrap();
        assert_eq!(
            got,
            vec![(w(""), 0.0), (w("a"), 1.0), (w("a a"), 0.0)]
        );
        assert_eq!(atom_a().enumerate_language(0).unwrap(), vec![(w(""), 0.0)]);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        assert!(matches!(atom_a().enumerate_language(usize::MAX / 2), Err(Error::Resource(_))));
    }

    #[test]
    fn non_commuting_pair_is_reported() {
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
        let r = m.check_commutativity();
        assert_eq!(r.max_violation, 1.0);
        assert_eq!(r.pairs, vec![(sym("a"), sym("b"))]);
        assert!(atom_a().check_commutativity().is_commutative());
        assert_eq!(atom_a().check_commutativity().max_violation, 0.0);
    }

    #[test]
    fn constructor_rejects_bad_shapes() {
        let bad = MultisetAutomaton::<f64>::new(
            alphabet(["a"]),
            vec![1.0, 0.0],
            BTreeMap::from([(sym("a"), Matrix::identity(3))]),
            vec![0.0, 1.0],
            BTreeMap::new(),
        );
        assert!(matches!(bad, Err(Error::Shape(_))));
    }

    #[test]
    fn dot_export_labels_edges() {
        let dot = atom_a().to_dot();
        assert!(dot.starts_with("digraph {"));
        assert!(dot.contains("q0 -> q1 [label=\"a/1\"]"));
    }
}
