//! The graded generating set of an automaton compiled from an expression.
//!
//! Built by recursion over the expression:
//!
//! * a subexpression whose language uses at most one symbol `a` gets
//!   `I, μ(a), …, μ(a)^(d−1)`, with `I` in grade `∅` and the powers in
//!   grade `{a}`; the characteristic polynomial has no constant term
//!   because the initial state has no incoming transitions;
//! * scaling leaves the transition matrices, and so the set, unchanged;
//! * a union takes the direct sum of its operands' sets;
//! * a product `α₁α₂` with sets `e_i` (grade `Δ_i`) and `f_j` (grade `Δ_j`)
//!   gets `e_i ⊗ κ₂(Δ_i) f_j` in grade `Δ_i ∪ Δ_j`, where `κ₂(Δ)` is the
//!   product of `κ₂(a)` over `a ∈ Δ`.
//!
//! Structure constants follow the same recursion. For products,
//! `(e_i ⊗ κ₂(Δ_i) f_j)(e_k ⊗ κ₂(Δ_k) f_l)` vanishes when `Δ_j` meets
//! `Δ_k` and otherwise equals `e_i e_k ⊗ κ₂(Δ_i ∪ Δ_k) f_j f_l`. Every
//! constant is checked against the dense matrix identity before the set is
//! handed out.

use std::collections::{BTreeMap, BTreeSet};

use crate::automaton::MultisetAutomaton;
use crate::construct::{self, compile_typed};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::multiset::{Alphabet, Multiset, Symbol};
use crate::regex::Regex;
use crate::semiring::{Literal, Ring, Semiring, Weight};

use super::chareq::char_equation;
use super::unary::{merge_grades, reduce};
use super::{next_id, InsideVector};

/// Largest automaton a generating set is built for.
pub const MAX_GENERATING_SET: usize = 64;

/// `g_i g_j = Σ_k c[i][j][k] g_k`, stored sparsely per pair `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants<S> {
    d: usize,
    entries: Vec<Vec<(usize, S)>>,
}

impl<S> StructureConstants<S> {
    pub fn get(&self, i: usize, j: usize) -> &[(usize, S)] {
        &self.entries[i * self.d + j]
    }

    /// Number of nonzero constants.
    pub fn nnz(&self) -> usize {
        self.entries.iter().map(Vec::len).sum()
    }
}

struct Part<S> {
    automaton: MultisetAutomaton<S>,
    generators: Vec<Matrix<S>>,
    grades: Vec<Alphabet>,
    table: Vec<Vec<(usize, S)>>,
    epsilon: Vec<S>,
    symbols: Vec<Vec<S>>,
}

#[derive(Debug, Clone)]
pub struct GeneratingSet<S> {
    id: u64,
    alphabet: Vec<Symbol>,
    generators: Vec<Matrix<S>>,
    grades: Vec<Alphabet>,
    constants: StructureConstants<S>,
    epsilon: Vec<S>,
    symbols: Vec<Vec<S>>,
}

fn unit<S: Semiring>(d: usize, i: usize) -> Vec<S> {
    let mut v = vec![S::zero(); d];
    v[i] = S::one();
    v
}

fn kron_vec<S: Semiring>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x.times(y)))
        .collect()
}

fn add_vec<S: Semiring>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.plus(y)).collect()
}

fn unary_part<S: Ring>(automaton: MultisetAutomaton<S>, symbol: Option<&Symbol>) -> Result<Part<S>> {
    let d = automaton.d();
    let n = automaton.alphabet().len();
    let mu = match symbol {
        Some(a) => automaton.mu(a)?.clone(),
        None => Matrix::zeros(d, d),
    };
    for (i, b) in automaton.alphabet().iter().enumerate() {
        if Some(b) != symbol && !automaton.mu_at(i).is_zero() {
            return Err(Error::Internal(format!("unary subautomaton reads `{b}`")));
        }
    }
    let rule = char_equation(&mu)?.ring_rule();
    if !rule[0].is_zero() {
        return Err(Error::Internal(
            "unary subautomaton has a characteristic polynomial with a constant term".into(),
        ));
    }
    let mut generators = Vec::with_capacity(d);
    let mut power = Matrix::identity(d);
    for k in 0..d {
        generators.push(power.clone());
        if k + 1 < d {
            power = power.mat_mul(&mu)?;
        }
    }
    let grade = symbol.map(|a| Alphabet::from([a.clone()])).unwrap_or_default();
    let grades = (0..d)
        .map(|k| if k == 0 { Alphabet::new() } else { grade.clone() })
        .collect();
    let mut table = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut poly = vec![S::zero(); i + j + 1];
            poly[i + j] = S::one();
            let coeffs = reduce(poly, &rule);
            table.push(sparse(&coeffs));
        }
    }
    let symbols = (0..n)
        .map(|i| {
            if Some(&automaton.alphabet()[i]) == symbol {
                reduce(vec![S::zero(), S::one()], &rule)
            } else {
                vec![S::zero(); d]
            }
        })
        .collect();
    Ok(Part {
        automaton,
        generators,
        grades,
        table,
        epsilon: unit(d, 0),
        symbols,
    })
}

fn sparse<S: Semiring>(coeffs: &[S]) -> Vec<(usize, S)> {
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k, c.clone()))
        .collect()
}

fn union_part<S: Ring>(p1: Part<S>, p2: Part<S>) -> Result<Part<S>> {
    let automaton = construct::union(&p1.automaton, &p2.automaton)?;
    let (d1, d2) = (p1.generators.len(), p2.generators.len());
    let d = d1 + d2;
    let embed = |g: &Matrix<S>, offset: usize| {
        let mut m = Matrix::zeros(d, d);
        for r in 0..g.rows() {
            for c in 0..g.cols() {
                let x = g.get(r, c);
                if !x.is_zero() {
                    m.set(offset + r, offset + c, x.clone());
                }
            }
        }
        m
    };
    let generators = p1
        .generators
        .iter()
        .map(|g| embed(g, 0))
        .chain(p2.generators.iter().map(|g| embed(g, d1)))
        .collect();
    let mut table = vec![Vec::new(); d * d];
    for i in 0..d1 {
        for j in 0..d1 {
            table[i * d + j] = p1.table[i * d1 + j].clone();
        }
    }
    for i in 0..d2 {
        for j in 0..d2 {
            table[(d1 + i) * d + d1 + j] = p2.table[i * d2 + j]
                .iter()
                .map(|(k, c)| (d1 + k, c.clone()))
                .collect();
        }
    }
    Ok(Part {
        automaton,
        generators,
        grades: [p1.grades, p2.grades].concat(),
        table,
        epsilon: [p1.epsilon, p2.epsilon].concat(),
        symbols: p1
            .symbols
            .iter()
            .zip(&p2.symbols)
            .map(|(a, b)| [a.as_slice(), b.as_slice()].concat())
            .collect(),
    })
}

fn shuffle_part<S: Ring>(p1: Part<S>, p2: Part<S>) -> Result<Part<S>> {
    let automaton = construct::shuffle(&p1.automaton, &p2.automaton)?;
    let (d1, d2) = (p1.generators.len(), p2.generators.len());
    let d = d1 * d2;
    let alphabet = p2.automaton.alphabet();
    let gate = |grade: &Alphabet| -> Result<Vec<bool>> {
        let mut mask = vec![true; d2];
        for a in grade {
            let k = p2.automaton.kappa(a)?;
            mask.iter_mut().zip(k).for_each(|(m, &x)| *m = *m && x);
        }
        Ok(mask)
    };
    let mut generators = Vec::with_capacity(d);
    let mut grades = Vec::with_capacity(d);
    for (e, de) in p1.generators.iter().zip(&p1.grades) {
        let mask = Matrix::from_diagonal_mask(&gate(de)?);
        for (f, df) in p2.generators.iter().zip(&p2.grades) {
            generators.push(e.kron(&mask.mat_mul(f)?));
            grades.push(de.union(df).cloned().collect());
        }
    }
    let mut table = vec![Vec::new(); d * d];
    for i in 0..d1 {
        for j in 0..d2 {
            for k in 0..d1 {
                for l in 0..d2 {
                    if !p2.grades[j].is_disjoint(&p1.grades[k]) {
                        continue;
                    }
                    let mut acc: BTreeMap<usize, S> = BTreeMap::new();
                    for (m, c1) in &p1.table[i * d1 + k] {
                        for (n, c2) in &p2.table[j * d2 + l] {
                            let slot = acc.entry(m * d2 + n).or_insert_with(S::zero);
                            *slot = slot.plus(&c1.times(c2));
                        }
                    }
                    table[(i * d2 + j) * d + k * d2 + l] = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                }
            }
        }
    }
    let symbols = (0..alphabet.len())
        .map(|a| {
            add_vec(
                &kron_vec(&p1.symbols[a], &p2.epsilon),
                &kron_vec(&p1.epsilon, &p2.symbols[a]),
            )
        })
        .collect();
    Ok(Part {
        automaton,
        generators,
        grades,
        table,
        epsilon: kron_vec(&p1.epsilon, &p2.epsilon),
        symbols,
    })
}

fn build_part<S: Ring>(alpha: &Regex<S>, sigma: &Alphabet) -> Result<Part<S>> {
    match alpha.language_alphabet() {
        None => return unary_part(construct::empty(sigma), None),
        Some(a) if a.len() <= 1 => return unary_part(compile_typed(alpha, sigma)?, a.iter().next()),
        Some(_) => {}
    }
    match alpha {
        Regex::Scale(k, c) => {
            let mut p = build_part(c, sigma)?;
            p.automaton = construct::scale(k, &p.automaton);
            Ok(p)
        }
        Regex::Union(l, r) => union_part(build_part(l, sigma)?, build_part(r, sigma)?),
        Regex::Product(l, r) => shuffle_part(build_part(l, sigma)?, build_part(r, sigma)?),
        _ => Err(Error::Internal(
            "a subexpression over several symbols is not a union, product or scaling".into(),
        )),
    }
}

impl<S: Ring> GeneratingSet<S> {
    /// Build the set for `m`, which must be the compilation of `alpha`.
    pub fn build(m: &MultisetAutomaton<S>, alpha: &Regex<S>) -> Result<Self> {
        if m.d() > MAX_GENERATING_SET {
            return Err(Error::Resource(format!(
                "generating sets are built for at most {MAX_GENERATING_SET} states, automaton has {}",
                m.d()
            )));
        }
        let sigma = m.alphabet_set();
        construct::check_alphabet(alpha, &sigma)?;
        let part = build_part(alpha, &sigma)?;
        let same_matrices = part.automaton.d() == m.d()
            && (0..m.alphabet().len()).all(|i| {
                part.automaton.mu_at(i).approx_eq(m.mu_at(i)) && part.automaton.kappa_at(i) == m.kappa_at(i)
            });
        if !same_matrices {
            return Err(Error::Invalid("automaton is not the compilation of the given expression".into()));
        }
        let d = m.d();
        let set = GeneratingSet {
            id: next_id(),
            alphabet: m.alphabet().to_vec(),
            generators: part.generators,
            grades: part.grades,
            constants: StructureConstants { d, entries: part.table },
            epsilon: part.epsilon,
            symbols: part.symbols,
        };
        set.verify(m)?;
        Ok(set)
    }

    /// [`build`](Self::build) from an expression with literal weights.
    pub fn from_literals(m: &MultisetAutomaton<S>, alpha: &Regex<Literal>) -> Result<Self>
    where
        S: Weight,
    {
        alpha.check_mc()?;
        Self::build(m, &alpha.try_map_weights(&mut S::from_literal)?)
    }

    /// Check every structure constant and the symbol encodings against
    /// dense products.
    fn verify(&self, m: &MultisetAutomaton<S>) -> Result<()> {
        let d = self.len();
        for i in 0..d {
            for j in 0..d {
                let lhs = self.generators[i].mat_mul(&self.generators[j])?;
                let rhs = self.combine(self.constants.get(i, j).iter().map(|(k, c)| (*k, c)))?;
                if !lhs.approx_eq(&rhs) {
                    return Err(Error::Internal(format!(
                        "product of generators {i} and {j} does not decompose"
                    )));
                }
            }
        }
        if !self.decode_coeffs(&self.epsilon)?.approx_eq(&Matrix::identity(d)) {
            return Err(Error::Internal("identity is not encoded correctly".into()));
        }
        for (a, coeffs) in self.symbols.iter().enumerate() {
            if !self.decode_coeffs(coeffs)?.approx_eq(m.mu_at(a)) {
                return Err(Error::Internal(format!("μ({}) is not encoded correctly", self.alphabet[a])));
            }
        }
        Ok(())
    }

    fn combine<'a>(&self, terms: impl Iterator<Item = (usize, &'a S)>) -> Result<Matrix<S>>
    where
        S: 'a,
    {
        let d = self.len();
        let mut out = Matrix::zeros(d, d);
        for (k, c) in terms {
            if !c.is_zero() {
                out = out.add(&self.generators[k].scale(c))?;
            }
        }
        Ok(out)
    }

    fn decode_coeffs(&self, coeffs: &[S]) -> Result<Matrix<S>> {
        self.combine(coeffs.iter().enumerate())
    }
}

impl<S: Semiring> GeneratingSet<S> {
    /// Number of generators; equals the automaton's state count.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Matrix<S>] {
        &self.generators
    }

    pub fn grades(&self) -> &[Alphabet] {
        &self.grades
    }

    pub fn constants(&self) -> &StructureConstants<S> {
        &self.constants
    }

    /// Generator indices by grade.
    pub fn grading(&self) -> BTreeMap<Alphabet, Vec<usize>> {
        let mut out: BTreeMap<Alphabet, Vec<usize>> = BTreeMap::new();
        for (i, g) in self.grades.iter().enumerate() {
            out.entry(g.clone()).or_default().push(i);
        }
        out
    }

    fn vector(&self, coeffs: Vec<S>, grades: BTreeSet<Alphabet>) -> InsideVector<S> {
        InsideVector {
            id: self.id,
            grades,
            coeffs,
        }
    }

    fn check(&self, x: &InsideVector<S>) -> Result<()> {
        if x.id != self.id || x.coeffs.len() != self.len() {
            return Err(Error::Invalid("inside vector belongs to a different generating set".into()));
        }
        Ok(())
    }

    /// Coefficients of `μ(w)`, in grade `alphabet(w)`.
    pub fn encode(&self, w: &Multiset) -> Result<InsideVector<S>> {
        let mut x = self.vector(self.epsilon.clone(), BTreeSet::from([Alphabet::new()]));
        for s in w.symbols() {
            let a = self
                .alphabet
                .binary_search(s)
                .map_err(|_| Error::Vocabulary(s.to_string()))?;
            let y = self.vector(self.symbols[a].clone(), BTreeSet::from([Alphabet::from([s.clone()])]));
            x = self.compose(&x, &y)?;
        }
        Ok(x)
    }

    /// Coefficients of the product of the decoded matrices.
    pub fn compose(&self, x: &InsideVector<S>, y: &InsideVector<S>) -> Result<InsideVector<S>> {
        self.check(x)?;
        self.check(y)?;
        let d = self.len();
        let mut z = vec![S::zero(); d];
        for (i, xi) in x.coeffs.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.coeffs.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let xy = xi.times(yj);
                for (k, c) in self.constants.get(i, j) {
                    z[*k] = z[*k].plus(&xy.times(c));
                }
            }
        }
        Ok(self.vector(z, merge_grades(&x.grades, &y.grades)))
    }

    /// Coefficients of the sum of the decoded matrices. Vectors of
    /// different grades occupy disjoint generators, so the sum keeps both.
    pub fn add(&self, x: &InsideVector<S>, y: &InsideVector<S>) -> Result<InsideVector<S>> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.vector(
            add_vec(&x.coeffs, &y.coeffs),
            x.grades.union(&y.grades).cloned().collect(),
        ))
    }

    pub fn decode(&self, x: &InsideVector<S>) -> Result<Matrix<S>> {
        self.check(x)?;
        let d = self.generators.first().map_or(0, Matrix::rows);
        let mut out = Matrix::zeros(d, d);
        for (k, c) in x.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&self.generators[k].scale(c))?;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::compile;
    use crate::multiset::{count_vectors, sym};
    use crate::regex::parse;
    use crate::semiring::Rational;

    fn setup(s: &str) -> (MultisetAutomaton<Rational>, GeneratingSet<Rational>) {
        let r = parse(s).unwrap();
        let m = compile::<Rational>(&r, &r.symbols()).unwrap();
        let g = GeneratingSet::from_literals(&m, &r).unwrap();
        (m, g)
    }

    fn abc(s: &str) -> Alphabet {
        s.chars().map(|c| sym(&c.to_string())).collect()
    }

    #[test]
    fn atom_set() {
        let (m, g) = setup("a");
        assert_eq!(g.len(), 2);
        assert_eq!(g.generators()[0], Matrix::identity(2));
        assert_eq!(&g.generators()[1], m.mu(&sym("a")).unwrap());
        assert_eq!(g.grades(), &[abc(""), abc("a")]);
    }

    #[test]
    fn union_set_is_a_direct_sum() {
        let (_, g) = setup("a|b");
        assert_eq!(g.len(), 4);
        let grading = g.grading();
        assert_eq!(grading[&abc("a")], vec![1]);
        assert_eq!(grading[&abc("b")], vec![3]);
        assert_eq!(grading[&abc("")], vec![0, 2]);
    }

    #[test]
    fn product_set() {
        let (m, g) = setup("ab");
        assert_eq!(g.len(), 4);
        let mu_a = m.mu(&sym("a")).unwrap();
        let mu_b = m.mu(&sym("b")).unwrap();
        assert_eq!(g.generators()[0], Matrix::identity(4));
        assert_eq!(&g.generators()[2], mu_a);
        assert_eq!(&g.generators()[1], mu_b);
        assert_eq!(g.generators()[3], mu_a.mat_mul(mu_b).unwrap());
        assert_eq!(g.grades()[3], abc("ab"));
    }

    #[test]
    fn encode_matches_dense_and_is_graded() {
        for s in ["a", "ab", "(a|b)c", "a*b*", "[2](aa)*(b|[3]c)", "(a|&)(b|0c)a", "abc", "a(b|bb)*c"] {
            let r = parse(s).unwrap();
            let m = compile::<Rational>(&r, &r.symbols()).unwrap();
            let g = GeneratingSet::from_literals(&m, &r).unwrap();
            assert_eq!(g.len(), m.d(), "{s}");
            let syms: Vec<Symbol> = m.alphabet().to_vec();
            for c in count_vectors(syms.len(), 3) {
                let w = Multiset::from_counts(syms.iter().cloned().zip(c));
                let x = g.encode(&w).unwrap();
                assert_eq!(g.decode(&x).unwrap(), m.mu_of_multiset(&w).unwrap(), "{s} on {w}");
                assert_eq!(x.grade(), Some(&w.alphabet()));
            }
        }
    }

    #[test]
    fn compose_and_add_are_homomorphic() {
        let (m, g) = setup("(a|b)(aa)*[3]b");
        let u: Multiset = "a b".parse().unwrap();
        let v: Multiset = "a a b".parse().unwrap();
        let (x, y) = (g.encode(&u).unwrap(), g.encode(&v).unwrap());
        assert_eq!(g.compose(&x, &y).unwrap().coeffs, g.encode(&u.union(&v)).unwrap().coeffs);
        let sum = g.add(&x, &g.encode(&"a".parse().unwrap()).unwrap()).unwrap();
        assert_eq!(sum.grades.len(), 2);
        assert_eq!(
            g.decode(&sum).unwrap(),
            m.mu_of_multiset(&u).unwrap().add(m.mu(&sym("a")).unwrap()).unwrap()
        );
    }

    #[test]
    fn rejects_foreign_inputs() {
        let (m, g) = setup("ab");
        let (_, other) = setup("ab");
        let x = other.encode(&"a".parse().unwrap()).unwrap();
        assert!(g.compose(&x, &x).is_err());
        assert!(GeneratingSet::from_literals(&m, &parse("a|b").unwrap()).is_err());
    }
}
