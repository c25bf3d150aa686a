use crate::error::{Error, Result};
use crate::multiset::{Alphabet, Multiset, Symbol};
use crate::regex::Regex;
use crate::semiring::{Literal, Semiring, Weight};

use super::{check_alphabet, star_symbol, state_count};

/// The automaton [`compile`](super::compile) would build, evaluated without
/// materializing its matrices.
///
/// States are numbered exactly as in the dense construction, so the two
/// agree weight for weight. Only the states reachable while reading a
/// multiset are ever touched, which makes membership queries feasible on
/// expressions whose dense automaton has billions of states.
#[derive(Debug, Clone)]
pub struct LazyAutomaton<S> {
    alphabet: Vec<Symbol>,
    root: Node<S>,
}

#[derive(Debug, Clone)]
enum Node<S> {
    Atom(usize),
    Constant(S),
    Scale(S, Box<Node<S>>),
    Union(Box<Node<S>>, Box<Node<S>>, u64),
    Shuffle(Box<Node<S>>, Box<Node<S>>, u64),
    Star {
        child: Box<Node<S>>,
        symbol: usize,
        first_initial: u64,
        restart: Vec<(u64, S)>,
    },
}

type Sparse<S> = Vec<(u64, S)>;

impl<S: Semiring> Node<S> {
    fn initial(&self, out: &mut Sparse<S>) {
        match self {
            Node::Atom(_) | Node::Constant(_) => out.push((0, S::one())),
            Node::Scale(_, c) | Node::Star { child: c, .. } => c.initial(out),
            Node::Union(l, r, d1) => {
                l.initial(out);
                let start = out.len();
                r.initial(out);
                for e in &mut out[start..] {
                    e.0 += d1;
                }
            }
            Node::Shuffle(l, r, d2) => {
                let (mut a, mut b) = (Vec::new(), Vec::new());
                l.initial(&mut a);
                r.initial(&mut b);
                for (i, x) in &a {
                    for (j, y) in &b {
                        out.push((i * d2 + j, x.times(y)));
                    }
                }
            }
        }
    }

    fn final_weight(&self, q: u64) -> S {
        match self {
            Node::Atom(_) => {
                if q == 1 {
                    S::one()
                } else {
                    S::zero()
                }
            }
            Node::Constant(x) => x.clone(),
            Node::Scale(k, c) => k.times(&c.final_weight(q)),
            Node::Union(l, r, d1) => {
                if q < *d1 {
                    l.final_weight(q)
                } else {
                    r.final_weight(q - d1)
                }
            }
            Node::Shuffle(l, r, d2) => {
                let f = l.final_weight(q / d2);
                if f.is_zero() {
                    f
                } else {
                    f.times(&r.final_weight(q % d2))
                }
            }
            Node::Star {
                child, first_initial, ..
            } => {
                let f = child.final_weight(q);
                if q == *first_initial {
                    f.plus(&S::one())
                } else {
                    f
                }
            }
        }
    }

    fn kappa(&self, q: u64, a: usize) -> bool {
        match self {
            Node::Atom(s) => !(*s == a && q == 1),
            Node::Constant(_) => true,
            Node::Scale(_, c) | Node::Star { child: c, .. } => c.kappa(q, a),
            Node::Union(l, r, d1) => {
                if q < *d1 {
                    l.kappa(q, a)
                } else {
                    r.kappa(q - d1, a)
                }
            }
            Node::Shuffle(l, r, d2) => l.kappa(q / d2, a) && r.kappa(q % d2, a),
        }
    }

    /// Row `q` of μ(a), scaled by `w`, appended to `out`.
    fn step(&self, q: u64, a: usize, w: &S, out: &mut Sparse<S>) {
        match self {
            Node::Atom(s) => {
                if *s == a && q == 0 {
                    out.push((1, w.clone()));
                }
            }
            Node::Constant(_) => {}
            Node::Scale(_, c) => c.step(q, a, w, out),
            Node::Union(l, r, d1) => {
                if q < *d1 {
                    l.step(q, a, w, out)
                } else {
                    let start = out.len();
                    r.step(q - d1, a, w, out);
                    for e in &mut out[start..] {
                        e.0 += d1;
                    }
                }
            }
            Node::Shuffle(l, r, d2) => {
                let (i, j) = (q / d2, q % d2);
                if r.kappa(j, a) {
                    let start = out.len();
                    l.step(i, a, w, out);
                    for e in &mut out[start..] {
                        e.0 = e.0 * d2 + j;
                    }
                }
                let start = out.len();
                r.step(j, a, w, out);
                for e in &mut out[start..] {
                    e.0 += i * d2;
                }
            }
            Node::Star {
                child,
                symbol,
                restart,
                ..
            } => {
                child.step(q, a, w, out);
                if a == *symbol {
                    let f = child.final_weight(q);
                    if !f.is_zero() {
                        let wf = w.times(&f);
                        out.extend(restart.iter().map(|(r, x)| (*r, wf.times(x))));
                    }
                }
            }
        }
    }
}

fn merge<S: Semiring>(mut v: Sparse<S>) -> Sparse<S> {
    v.sort_by_key(|e| e.0);
    let mut out: Sparse<S> = Vec::with_capacity(v.len());
    for (q, x) in v {
        match out.last_mut() {
            Some(last) if last.0 == q => last.1 = last.1.plus(&x),
            _ => out.push((q, x)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    out
}

impl<S: Semiring> LazyAutomaton<S> {
    pub fn new(alpha: &Regex<S>, sigma: &Alphabet) -> Result<Self> {
        check_alphabet(alpha, sigma)?;
        if state_count(alpha).is_none_or(|n| n > u64::MAX as u128) {
            return Err(Error::Resource("state indices do not fit in 64 bits".into()));
        }
        let alphabet: Vec<Symbol> = sigma.iter().cloned().collect();
        let root = build(alpha, &alphabet)?;
        Ok(LazyAutomaton { alphabet, root })
    }

    pub fn from_literals(alpha: &Regex<Literal>, sigma: &Alphabet) -> Result<Self>
    where
        S: Weight,
    {
        alpha.check_mc()?;
        Self::new(&alpha.try_map_weights(&mut S::from_literal)?, sigma)
    }

    /// λ μ(w) as a sparse vector sorted by state.
    pub fn forward(&self, w: &Multiset) -> Result<Vec<(u64, S)>> {
        let mut v = Vec::new();
        self.root.initial(&mut v);
        let mut v = merge(v);
        for s in w.symbols() {
            let a = self
                .alphabet
                .binary_search(s)
                .map_err(|_| Error::Vocabulary(s.to_string()))?;
            let mut next = Vec::new();
            for (q, x) in &v {
                self.root.step(*q, a, x, &mut next);
            }
            v = merge(next);
        }
        Ok(v)
    }

    pub fn weight(&self, w: &Multiset) -> Result<S> {
        Ok(self
            .forward(w)?
            .iter()
            .fold(S::zero(), |acc, (q, x)| acc.plus(&x.times(&self.root.final_weight(*q)))))
    }
}

fn size<S>(n: &Node<S>) -> u64 {
    match n {
        Node::Atom(_) => 2,
        Node::Constant(_) => 1,
        Node::Scale(_, c) | Node::Star { child: c, .. } => size(c),
        Node::Union(l, r, _) => size(l) + size(r),
        Node::Shuffle(l, r, _) => size(l) * size(r),
    }
}

fn build<S: Semiring>(alpha: &Regex<S>, sigma: &[Symbol]) -> Result<Node<S>> {
    if alpha.language_alphabet().is_none() {
        return Ok(Node::Constant(S::zero()));
    }
    let index = |s: &Symbol| sigma.binary_search(s).map_err(|_| Error::Vocabulary(s.to_string()));
    Ok(match alpha {
        Regex::Symbol(a) => Node::Atom(index(a)?),
        Regex::Epsilon => Node::Constant(S::one()),
        Regex::Empty => Node::Constant(S::zero()),
        Regex::Scale(k, c) => Node::Scale(k.clone(), Box::new(build(c, sigma)?)),
        Regex::Union(l, r) => {
            let l = build(l, sigma)?;
            let d1 = size(&l);
            Node::Union(Box::new(l), Box::new(build(r, sigma)?), d1)
        }
        Regex::Product(l, r) => {
            let r = build(r, sigma)?;
            let d2 = size(&r);
            Node::Shuffle(Box::new(build(l, sigma)?), Box::new(r), d2)
        }
        Regex::Star(c) => {
            let symbol = index(&star_symbol(c)?)?;
            let child = build(c, sigma)?;
            let mut init = Vec::new();
            child.initial(&mut init);
            let init = merge(init);
            let first_initial = init.first().map_or(u64::MAX, |e| e.0);
            let mut restart = Vec::new();
            for (q, x) in &init {
                child.step(*q, symbol, x, &mut restart);
            }
            Node::Star {
                restart: merge(restart),
                child: Box::new(child),
                symbol,
                first_initial,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::compile;
    use crate::multiset::count_vectors;
    use crate::regex::random::{random_mc_regex, RegexShape};
    use crate::regex::{parse, CnfFormula, Reduction};
    use crate::semiring::{Boolean, Rational};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn agrees_with_dense_compile() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let shape = RegexShape::default();
        for _ in 0..150 {
            let r = random_mc_regex(&mut rng, &shape);
            let sigma = shape.alphabet.iter().cloned().collect();
            let dense = compile::<Rational>(&r, &sigma).unwrap();
            let lazy = LazyAutomaton::<Rational>::from_literals(&r, &sigma).unwrap();
            for c in count_vectors(3, 4) {
                let w = Multiset::from_counts(shape.alphabet.iter().cloned().zip(c));
                assert_eq!(lazy.weight(&w).unwrap(), dense.weight(&w).unwrap(), "{r} on {w}");
            }
            let mut init = Vec::new();
            lazy.root.initial(&mut init);
            let dense_init: Vec<(u64, Rational)> = dense
                .lambda()
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i as u64, x.clone()))
                .collect();
            assert_eq!(merge(init), dense_init);
        }
    }

    #[test]
    fn handles_reductions_too_large_to_materialize() {
        let phi = CnfFormula::new(3, vec![vec![1, -2, 3], vec![-1, 2], vec![-3, -1, 2]]).unwrap();
        let red = Reduction::new(&phi).unwrap();
        let alpha = red.combined();
        assert!(state_count(&alpha).unwrap() > 1 << 30);
        let lazy = LazyAutomaton::<Boolean>::from_literals(&alpha, &alpha.symbols()).unwrap();
        assert_eq!(lazy.weight(&red.target).unwrap(), Boolean(phi.is_satisfiable()));
    }

    #[test]
    fn vocabulary_errors() {
        let r = parse("a").unwrap();
        let lazy = LazyAutomaton::<f64>::from_literals(&r, &r.symbols()).unwrap();
        assert!(lazy.weight(&"b".parse().unwrap()).is_err());
    }
}
