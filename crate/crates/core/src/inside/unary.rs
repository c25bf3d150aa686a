use std::collections::BTreeSet;

use crate::automaton::MultisetAutomaton;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::multiset::{Alphabet, Symbol};
use crate::semiring::{Semiring, Weight};

use super::chareq::{char_equation, CharEquation};
use super::{next_id, InsideVector};

/// Reduce a polynomial in `μ` modulo `μ^d = Σ rule[k] μ^k`.
pub(crate) fn reduce<S: Semiring>(mut poly: Vec<S>, rule: &[S]) -> Vec<S> {
    let d = rule.len();
    for k in (d..poly.len()).rev() {
        let c = std::mem::replace(&mut poly[k], S::zero());
        if c.is_zero() {
            continue;
        }
        for (j, r) in rule.iter().enumerate() {
            if !r.is_zero() {
                poly[k - d + j] = poly[k - d + j].plus(&c.times(r));
            }
        }
    }
    poly.resize(d, S::zero());
    poly
}

pub(crate) fn poly_mul<S: Semiring>(a: &[S], b: &[S]) -> Vec<S> {
    let mut out = vec![S::zero(); (a.len() + b.len()).saturating_sub(1)];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] = out[i + j].plus(&x.times(y));
            }
        }
    }
    out
}

pub(crate) fn merge_grades(x: &BTreeSet<Alphabet>, y: &BTreeSet<Alphabet>) -> BTreeSet<Alphabet> {
    x.iter()
        .flat_map(|a| y.iter().map(move |b| a.union(b).cloned().collect()))
        .collect()
}

/// Inside weights `μ(a)^n` of one symbol stored as `d` coefficients over
/// `I, μ(a), …, μ(a)^(d−1)`.
///
/// Over a ring the rewrite rule comes from the collapsed characteristic
/// polynomial. Over other semirings it is only available when the
/// equation is compressible, i.e. the support graph of `μ(a)` has no two
/// node-disjoint cycles.
#[derive(Debug, Clone)]
pub struct UnaryInside<S> {
    id: u64,
    symbol: Symbol,
    mu: Matrix<S>,
    equation: CharEquation<S>,
    rule: Vec<S>,
}

impl<S: Weight> UnaryInside<S> {
    pub fn new(m: &MultisetAutomaton<S>, a: &Symbol) -> Result<Self> {
        let mu = m.mu(a)?.clone();
        let equation = char_equation(&mu)?;
        let rule = match equation.semiring_rule() {
            Some(rule) => rule,
            None => {
                let d = equation.d;
                (0..d)
                    .map(|k| {
                        let right = equation.right[d - k].checked_neg().ok_or_else(|| {
                            Error::Unsupported(format!(
                                "μ({a}) is not compressible over the {} semiring: its support graph has two node-disjoint cycles",
                                S::SPEC.name
                            ))
                        })?;
                        Ok(equation.left[d - k].plus(&right))
                    })
                    .collect::<Result<Vec<S>>>()?
            }
        };
        Ok(UnaryInside {
            id: next_id(),
            symbol: a.clone(),
            mu,
            equation,
            rule,
        })
    }
}

impl<S: Semiring> UnaryInside<S> {
    pub fn d(&self) -> usize {
        self.rule.len()
    }

    pub fn equation(&self) -> &CharEquation<S> {
        &self.equation
    }

    /// `r_0 … r_(d−1)` with `μ^d = Σ r_k μ^k`.
    pub fn rule(&self) -> &[S] {
        &self.rule
    }

    fn vector(&self, coeffs: Vec<S>, grades: BTreeSet<Alphabet>) -> InsideVector<S> {
        InsideVector {
            id: self.id,
            grades,
            coeffs,
        }
    }

    fn grade_of(&self, n: u64) -> BTreeSet<Alphabet> {
        let g = if n == 0 {
            Alphabet::new()
        } else {
            Alphabet::from([self.symbol.clone()])
        };
        BTreeSet::from([g])
    }

    /// Coefficients of `μ(a)^n`.
    pub fn encode(&self, n: u64) -> InsideVector<S> {
        let d = self.d();
        let grades = self.grade_of(n);
        if (n as u128) < d as u128 {
            let mut c = vec![S::zero(); d];
            c[n as usize] = S::one();
            return self.vector(c, grades);
        }
        let mut result = reduce(vec![S::one()], &self.rule);
        let mut base = reduce(vec![S::zero(), S::one()], &self.rule);
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = reduce(poly_mul(&result, &base), &self.rule);
            }
            e >>= 1;
            if e > 0 {
                base = reduce(poly_mul(&base, &base), &self.rule);
            }
        }
        self.vector(result, grades)
    }

    fn check(&self, x: &InsideVector<S>) -> Result<()> {
        if x.id != self.id || x.coeffs.len() != self.d() {
            return Err(Error::Invalid("inside vector belongs to a different encoder".into()));
        }
        Ok(())
    }

    pub fn compose(&self, x: &InsideVector<S>, y: &InsideVector<S>) -> Result<InsideVector<S>> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.vector(
            reduce(poly_mul(&x.coeffs, &y.coeffs), &self.rule),
            merge_grades(&x.grades, &y.grades),
        ))
    }

    pub fn add(&self, x: &InsideVector<S>, y: &InsideVector<S>) -> Result<InsideVector<S>> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.vector(
            x.coeffs.iter().zip(&y.coeffs).map(|(a, b)| a.plus(b)).collect(),
            x.grades.union(&y.grades).cloned().collect(),
        ))
    }

    pub fn decode(&self, x: &InsideVector<S>) -> Result<Matrix<S>> {
        self.check(x)?;
        let d = self.mu.rows();
        let mut out = Matrix::zeros(d, d);
        let mut power = Matrix::identity(d);
        for (k, c) in x.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&power.scale(c))?;
            }
            if k + 1 < x.coeffs.len() {
                power = power.mat_mul(&self.mu)?;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::compile;
    use crate::multiset::sym;
    use crate::regex::parse;
    use crate::semiring::{Boolean, Literal, Rational};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn single(mu: Matrix<Rational>) -> MultisetAutomaton<Rational> {
        let d = mu.rows();
        let z = Rational::from_integer(0.into());
        MultisetAutomaton::new(
            crate::multiset::alphabet(["a"]),
            vec![z.clone(); d],
            BTreeMap::from([(sym("a"), mu)]),
            vec![z; d],
            BTreeMap::new(),
        )
        .unwrap()
    }

    fn q(n: i64) -> Rational {
        Literal::from_integer(n).0
    }

    #[test]
    fn low_powers_are_unit_vectors() {
        let m: MultisetAutomaton<f64> = compile(&parse("(aa)*").unwrap(), &crate::multiset::alphabet(["a"])).unwrap();
        let u = UnaryInside::new(&m, &sym("a")).unwrap();
        for n in 0..u.d() {
            let v = u.encode(n as u64);
            assert!(v.coeffs.iter().enumerate().all(|(i, c)| *c == if i == n { 1.0 } else { 0.0 }));
        }
    }

    #[test]
    fn nilpotent_square_is_zero() {
        let u = UnaryInside::new(&single(Matrix::from_rows(vec![vec![q(0), q(1)], vec![q(0), q(0)]]).unwrap()), &sym("a")).unwrap();
        assert!(u.encode(2).coeffs.iter().all(|c| c == &q(0)));
    }

    #[test]
    fn random_rational_powers_decode_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let mu = Matrix::new(3, 3, (0..9).map(|_| q(rng.random_range(-3..=3))).collect()).unwrap();
            let u = UnaryInside::new(&single(mu.clone()), &sym("a")).unwrap();
            assert_eq!(u.decode(&u.encode(7)).unwrap(), mu.pow(7).unwrap());
            let m = rng.random_range(0..=10);
            let n = rng.random_range(0..=10);
            let c = u.compose(&u.encode(m), &u.encode(n)).unwrap();
            assert_eq!(u.decode(&c).unwrap(), mu.pow(m + n).unwrap());
            let s = u.add(&u.encode(m), &u.encode(n)).unwrap();
            assert_eq!(u.decode(&s).unwrap(), mu.pow(m).unwrap().add(&mu.pow(n).unwrap()).unwrap());
            assert_eq!(u.compose(&u.encode(0), &u.encode(n)).unwrap().coeffs, u.encode(n).coeffs);
        }
    }

    #[test]
    fn semirings_need_compressibility() {
        let star: MultisetAutomaton<Boolean> = compile(&parse("a*").unwrap(), &crate::multiset::alphabet(["a"])).unwrap();
        let u = UnaryInside::new(&star, &sym("a")).unwrap();
        let mu = star.mu(&sym("a")).unwrap();
        assert_eq!(u.decode(&u.encode(9)).unwrap(), mu.pow(9).unwrap());

        let mut two_loops = BTreeMap::new();
        two_loops.insert(
            sym("a"),
            Matrix::from_rows(vec![vec![Boolean(true), Boolean(false)], vec![Boolean(false), Boolean(true)]]).unwrap(),
        );
        let m = MultisetAutomaton::new(
            crate::multiset::alphabet(["a"]),
            vec![Boolean(true), Boolean(false)],
            two_loops,
            vec![Boolean(true), Boolean(true)],
            BTreeMap::new(),
        )
        .unwrap();
        assert!(matches!(UnaryInside::new(&m, &sym("a")), Err(Error::Unsupported(_))));
    }

    #[test]
    fn mismatched_encoders_are_rejected() {
        let mu = Matrix::from_rows(vec![vec![q(1), q(1)], vec![q(0), q(1)]]).unwrap();
        let u = UnaryInside::new(&single(mu.clone()), &sym("a")).unwrap();
        let v = UnaryInside::new(&single(mu), &sym("a")).unwrap();
        assert!(u.compose(&u.encode(1), &v.encode(1)).is_err());
    }
}
