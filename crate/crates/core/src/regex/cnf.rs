//! CNF formulas and the reduction from satisfiability to multiset
//! regular-expression membership.
//!
//! For a formula φ with `n` clauses, `alpha` replaces ∨ by union, ∧ by
//! product, `x` by the symbol for `x` and `¬x` by its primed symbol.
//! `beta` is the product over variables of
//! `xⁿ (x'|&)ⁿ | (x|&)ⁿ x'ⁿ`, and the target multiset holds `n` copies of
//! every literal symbol. φ is satisfiable iff the target is in `L(alpha beta)`.

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::multiset::{Multiset, Symbol};

use super::Regex;

const LETTERS: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// The symbol for variable `var` (1-based), primed when `negated`.
pub fn var_symbol(var: u32, negated: bool) -> Result<Symbol> {
    let idx = var
        .checked_sub(1)
        .filter(|&i| (i as usize) < LETTERS.len())
        .ok_or_else(|| Error::Invalid(format!("variable {var} has no symbol (1..={} supported)", LETTERS.len())))?;
    let mut name = (LETTERS[idx as usize] as char).to_string();
    if negated {
        name.push('\'');
    }
    Symbol::new(name)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: u32,
    /// Clauses of nonzero DIMACS literals: `v` is a variable, `-v` its negation.
    pub clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new(num_vars: u32, clauses: Vec<Vec<i32>>) -> Result<Self> {
        for c in &clauses {
            if c.is_empty() {
                return Err(Error::Invalid("empty clause".into()));
            }
            for &l in c {
                if l == 0 || l.unsigned_abs() > num_vars {
                    return Err(Error::Invalid(format!("literal {l} out of range 1..={num_vars}")));
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    /// Parse DIMACS `p cnf` text. Comment lines start with `c`; clauses
    /// end with `0` and may span lines.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(u32, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 4 || parts[1] != "cnf" || header.is_some() {
                    return Err(Error::Invalid(format!("line {}: malformed header `{line}`", lineno + 1)));
                }
                let nv = parts[2].parse().map_err(|_| Error::Invalid(format!("bad variable count `{}`", parts[2])))?;
                let nc = parts[3].parse().map_err(|_| Error::Invalid(format!("bad clause count `{}`", parts[3])))?;
                header = Some((nv, nc));
                continue;
            }
            if header.is_none() {
                return Err(Error::Invalid(format!("line {}: clause before `p cnf` header", lineno + 1)));
            }
            for tok in line.split_whitespace() {
                let lit: i32 = tok
                    .parse()
                    .map_err(|_| Error::Invalid(format!("line {}: bad literal `{tok}`", lineno + 1)))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    current.push(lit);
                }
            }
        }
        if !current.is_empty() {
            clauses.push(current);
        }
        let (nv, nc) = header.ok_or_else(|| Error::Invalid("missing `p cnf` header".into()))?;
        if clauses.len() != nc {
            return Err(Error::Invalid(format!("header declares {nc} clauses, found {}", clauses.len())));
        }
        CnfFormula::new(nv, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                write!(s, "{l} ").expect("string write");
            }
            s.push_str("0\n");
        }
        s
    }

    /// `assignment[i]` is the value of variable `i + 1`.
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
        })
    }

    /// Truth-table satisfiability; exponential in `num_vars`.
    pub fn is_satisfiable(&self) -> bool {
        let n = self.num_vars as usize;
        assert!(n < 32, "truth table too large");
        (0u32..1 << n).any(|bits| {
            let a: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
            self.evaluate(&a)
        })
    }

    pub fn random<R: Rng>(rng: &mut R, max_vars: u32, max_clauses: usize) -> Self {
        let nv = rng.random_range(1..=max_vars);
        let nc = rng.random_range(1..=max_clauses);
        let clauses = (0..nc)
            .map(|_| {
                let len = rng.random_range(1..=3);
                (0..len)
                    .map(|_| {
                        let v = rng.random_range(1..=nv) as i32;
                        if rng.random_bool(0.5) {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect()
            })
            .collect();
        CnfFormula { num_vars: nv, clauses }
    }
}

/// The expressions and target multiset built from a formula.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub alpha: Regex,
    pub beta: Regex,
    pub target: Multiset,
}

impl Reduction {
    pub fn new(phi: &CnfFormula) -> Result<Self> {
        let n = phi.clauses.len();
        let lit = |l: i32| var_symbol(l.unsigned_abs(), l < 0).map(Regex::Symbol);
        let alpha = Regex::product_all(
            phi.clauses
                .iter()
                .map(|c| c.iter().map(|&l| lit(l)).collect::<Result<Vec<_>>>().map(Regex::union_all))
                .collect::<Result<Vec<_>>>()?,
        );
        let power = |r: &Regex| Regex::product_all(std::iter::repeat_n(r.clone(), n));
        let opt = |r: &Regex| Regex::union(r.clone(), Regex::Epsilon);
        let mut factors = Vec::new();
        let mut target = Multiset::empty();
        for v in 1..=phi.num_vars {
            let x = Regex::Symbol(var_symbol(v, false)?);
            let nx = Regex::Symbol(var_symbol(v, true)?);
            factors.push(Regex::union(
                Regex::product(power(&x), power(&opt(&nx))),
                Regex::product(power(&opt(&x)), power(&nx)),
            ));
            target.add(var_symbol(v, false)?, n);
            target.add(var_symbol(v, true)?, n);
        }
        Ok(Reduction {
            alpha,
            beta: Regex::product_all(factors),
            target,
        })
    }

    /// The expression `alpha beta`.
    pub fn combined(&self) -> Regex {
        Regex::product(self.alpha.clone(), self.beta.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regex::{oracle_weight_bounded, parse};
    use crate::semiring::Boolean;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dimacs_round_trip() {
        let text = "c example\np cnf 3 2\n1 -3 0\n2 3\n-1 0\n";
        let phi = CnfFormula::parse_dimacs(text).unwrap();
        assert_eq!(phi.clauses, vec![vec![1, -3], vec![2, 3, -1]]);
        assert_eq!(CnfFormula::parse_dimacs(&phi.to_dimacs()).unwrap(), phi);
    }

    #[test]
    fn dimacs_errors() {
        assert!(CnfFormula::parse_dimacs("1 2 0\n").is_err());
        assert!(CnfFormula::parse_dimacs("p cnf 1 1\n2 0\n").is_err());
        assert!(CnfFormula::parse_dimacs("p cnf 1 2\n1 0\n").is_err());
        assert!(CnfFormula::parse_dimacs("p cnf 1 1\nx 0\n").is_err());
    }

    #[test]
    fn truth_tables() {
        assert!(CnfFormula::new(2, vec![vec![1, 2]]).unwrap().is_satisfiable());
        assert!(!CnfFormula::new(1, vec![vec![1], vec![-1]]).unwrap().is_satisfiable());
        assert!(CnfFormula::new(1, vec![vec![1, -1]]).unwrap().is_satisfiable());
    }

    #[test]
    fn symbols_for_variables() {
        assert_eq!(var_symbol(1, false).unwrap().as_str(), "a");
        assert_eq!(var_symbol(2, true).unwrap().as_str(), "b'");
        assert_eq!(var_symbol(27, false).unwrap().as_str(), "A");
        assert!(var_symbol(0, false).is_err());
        assert!(var_symbol(53, false).is_err());
    }

    #[test]
    fn reduction_shape() {
        let phi = CnfFormula::new(2, vec![vec![1, 2]]).unwrap();
        let r = Reduction::new(&phi).unwrap();
        assert_eq!(r.alpha, parse("a|b").unwrap());
        assert_eq!(r.beta, parse("(a(a'|&)|(a|&)a')(b(b'|&)|(b|&)b')").unwrap());
        assert_eq!(r.target, "a a' b b'".parse().unwrap());
        assert!(r.combined().validate_mc().is_empty());
    }

    fn member(phi: &CnfFormula) -> bool {
        let r = Reduction::new(phi).unwrap();
        let b: Boolean = oracle_weight_bounded(&r.combined(), &r.target, 64).unwrap();
        b.0
    }

    #[test]
    fn membership_matches_satisfiability_on_small_formulas() {
        assert!(member(&CnfFormula::new(2, vec![vec![1, 2]]).unwrap()));
        assert!(!member(&CnfFormula::new(1, vec![vec![1], vec![-1]]).unwrap()));
        assert!(member(&CnfFormula::new(1, vec![vec![1, -1]]).unwrap()));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let phi = CnfFormula::random(&mut rng, 2, 2);
            assert_eq!(member(&phi), phi.is_satisfiable(), "{phi:?}");
        }
    }
}
