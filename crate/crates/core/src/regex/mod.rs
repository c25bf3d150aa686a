//! Weighted multiset regular expressions.
//!
//! Concrete syntax, loosest binding first:
//!
//! ```text
//! expr    := concat ('|' concat)*
//! concat  := prefix+
//! prefix  := ('[' DECIMAL ']')* postfix
//! postfix := atom '*'*
//! atom    := SYM | '&' | '0' | '(' expr ')'
//! SYM     := [a-zA-Z] "'"?
//! ```
//!
//! `&` is the empty multiset, `0` the empty language, `[k]` scales by `k`.
//! Whitespace is ignored.

mod cnf;
mod oracle;
mod parse;
pub mod random;

use std::collections::BTreeSet;
use std::fmt;

pub use cnf::{var_symbol, CnfFormula, Reduction};
pub use oracle::{oracle_weight, oracle_weight_bounded, ORACLE_BOUND};
pub use parse::parse;

use crate::error::{Error, Result};
use crate::multiset::{Alphabet, Symbol};
use crate::semiring::Literal;

#[derive(Debug, Clone, PartialEq)]
pub enum Regex<W = Literal> {
    Symbol(Symbol),
    Epsilon,
    Empty,
    Union(Box<Regex<W>>, Box<Regex<W>>),
    Product(Box<Regex<W>>, Box<Regex<W>>),
    Star(Box<Regex<W>>),
    Scale(W, Box<Regex<W>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    /// The starred operand accepts the empty multiset.
    NotProper,
    /// The starred operand's language does not use exactly one symbol;
    /// `None` means the operand's language is empty.
    NotUnary(Option<Alphabet>),
}

/// A starred subexpression that breaks the mc-regular conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McViolation {
    /// Child indices from the root to the offending star node.
    pub path: Vec<usize>,
    /// The star subexpression, printed.
    pub subtree: String,
    pub kind: ViolationKind,
}

impl fmt::Display for McViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let loc = if self.path.is_empty() {
            "root".to_string()
        } else {
            self.path
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(".")
        };
        match &self.kind {
            ViolationKind::NotProper => write!(
                f,
                "star `{}` at path {loc}: operand accepts the empty multiset (star operands must be proper)",
                self.subtree
            ),
            ViolationKind::NotUnary(alpha) => {
                let desc = match alpha {
                    None => "an empty language".to_string(),
                    Some(a) => format!(
                        "alphabet {{{}}}",
                        a.iter().map(Symbol::as_str).collect::<Vec<_>>().join(",")
                    ),
                };
                write!(
                    f,
                    "star `{}` at path {loc}: operand has {desc} (star-unary rule: a starred operand must use exactly one symbol)",
                    self.subtree
                )
            }
        }
    }
}

impl<W> Regex<W> {
    pub fn sym(name: &str) -> Self {
        Regex::Symbol(crate::multiset::sym(name))
    }

    pub fn union(l: Self, r: Self) -> Self {
        Regex::Union(Box::new(l), Box::new(r))
    }

    pub fn product(l: Self, r: Self) -> Self {
        Regex::Product(Box::new(l), Box::new(r))
    }

    pub fn star(c: Self) -> Self {
        Regex::Star(Box::new(c))
    }

    pub fn scale(k: W, c: Self) -> Self {
        Regex::Scale(k, Box::new(c))
    }

    /// Left-nested union of the items; `Empty` when there are none.
    pub fn union_all(items: impl IntoIterator<Item = Self>) -> Self {
        items
            .into_iter()
            .reduce(Regex::union)
            .unwrap_or(Regex::Empty)
    }

    /// Left-nested product of the items; `Epsilon` when there are none.
    pub fn product_all(items: impl IntoIterator<Item = Self>) -> Self {
        items
            .into_iter()
            .reduce(Regex::product)
            .unwrap_or(Regex::Epsilon)
    }

    pub fn children(&self) -> Vec<&Regex<W>> {
        match self {
            Regex::Symbol(_) | Regex::Epsilon | Regex::Empty => vec![],
            Regex::Union(l, r) | Regex::Product(l, r) => vec![l, r],
            Regex::Star(c) | Regex::Scale(_, c) => vec![c],
        }
    }

    /// Node count |α|.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Symbols occurring anywhere in the expression.
    pub fn symbols(&self) -> Alphabet {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut Alphabet) {
        if let Regex::Symbol(s) = self {
            out.insert(s.clone());
        }
        for c in self.children() {
            c.collect_symbols(out);
        }
    }

    /// Whether ε ∈ L(α). Weights are ignored, so `[0]&` still counts.
    pub fn nullable(&self) -> bool {
        match self {
            Regex::Epsilon | Regex::Star(_) => true,
            Regex::Symbol(_) | Regex::Empty => false,
            Regex::Union(l, r) => l.nullable() || r.nullable(),
            Regex::Product(l, r) => l.nullable() && r.nullable(),
            Regex::Scale(_, c) => c.nullable(),
        }
    }

    /// alphabet(L(α)), or `None` when L(α) is empty.
    pub fn language_alphabet(&self) -> Option<Alphabet> {
        match self {
            Regex::Symbol(s) => Some(BTreeSet::from([s.clone()])),
            Regex::Epsilon => Some(BTreeSet::new()),
            Regex::Empty => None,
            Regex::Union(l, r) => match (l.language_alphabet(), r.language_alphabet()) {
                (None, x) | (x, None) => x,
                (Some(a), Some(b)) => Some(a.union(&b).cloned().collect()),
            },
            Regex::Product(l, r) => {
                let a = l.language_alphabet()?;
                let b = r.language_alphabet()?;
                Some(a.union(&b).cloned().collect())
            }
            Regex::Star(c) => Some(c.language_alphabet().unwrap_or_default()),
            Regex::Scale(_, c) => c.language_alphabet(),
        }
    }

    /// The single symbol of a unary language, if it is one.
    pub fn unary_symbol(&self) -> Option<Symbol> {
        let a = self.language_alphabet()?;
        if a.len() == 1 {
            a.into_iter().next()
        } else {
            None
        }
    }

    pub fn map_weights<V>(&self, f: &mut impl FnMut(&W) -> V) -> Regex<V> {
        self.try_map_weights(&mut |w| Ok::<_, std::convert::Infallible>(f(w)))
            .unwrap_or_else(|e| match e {})
    }

    pub fn try_map_weights<V, E>(&self, f: &mut impl FnMut(&W) -> Result<V, E>) -> Result<Regex<V>, E> {
        Ok(match self {
            Regex::Symbol(s) => Regex::Symbol(s.clone()),
            Regex::Epsilon => Regex::Epsilon,
            Regex::Empty => Regex::Empty,
            Regex::Union(l, r) => Regex::union(l.try_map_weights(f)?, r.try_map_weights(f)?),
            Regex::Product(l, r) => Regex::product(l.try_map_weights(f)?, r.try_map_weights(f)?),
            Regex::Star(c) => Regex::star(c.try_map_weights(f)?),
            Regex::Scale(k, c) => {
                let k = f(k)?;
                Regex::scale(k, c.try_map_weights(f)?)
            }
        })
    }

    /// Scale weights in pre-order.
    pub fn weights(&self) -> Vec<&W> {
        let mut out = Vec::new();
        self.collect_weights(&mut out);
        out
    }

    fn collect_weights<'a>(&'a self, out: &mut Vec<&'a W>) {
        if let Regex::Scale(k, _) = self {
            out.push(k);
        }
        for c in self.children() {
            c.collect_weights(out);
        }
    }

    /// Replace the Scale weights, in pre-order, with the given values.
    pub fn with_weights<V: Clone>(&self, values: &[V]) -> Result<Regex<V>> {
        let n = self.weights().len();
        if values.len() != n {
            return Err(Error::Shape(format!("{} weights for {n} scale nodes", values.len())));
        }
        let mut it = values.iter();
        Ok(self.map_weights(&mut |_| it.next().expect("counted").clone()))
    }
}

impl<W: fmt::Display> Regex<W> {
    /// Every star subexpression must have a proper, unary operand.
    pub fn validate_mc(&self) -> Vec<McViolation> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.validate_at(&mut path, &mut out);
        out
    }

    fn validate_at(&self, path: &mut Vec<usize>, out: &mut Vec<McViolation>) {
        if let Regex::Star(c) = self {
            let kind = if c.nullable() {
                Some(ViolationKind::NotProper)
            } else {
                match c.language_alphabet() {
                    Some(a) if a.len() == 1 => None,
                    other => Some(ViolationKind::NotUnary(other)),
                }
            };
            if let Some(kind) = kind {
                out.push(McViolation {
                    path: path.clone(),
                    subtree: self.to_string(),
                    kind,
                });
            }
        }
        for (i, c) in self.children().into_iter().enumerate() {
            path.push(i);
            c.validate_at(path, out);
            path.pop();
        }
    }

    pub fn check_mc(&self) -> Result<()> {
        let v = self.validate_mc();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validity(v))
        }
    }
}

// Binding strength used by the printer.
fn precedence<W>(r: &Regex<W>) -> u8 {
    match r {
        Regex::Union(..) => 0,
        Regex::Product(..) => 1,
        Regex::Scale(..) => 2,
        Regex::Star(..) => 3,
        Regex::Symbol(_) | Regex::Epsilon | Regex::Empty => 4,
    }
}

fn write_at<W: fmt::Display>(f: &mut fmt::Formatter<'_>, r: &Regex<W>, min: u8) -> fmt::Result {
    if precedence(r) < min {
        f.write_str("(")?;
        write_at(f, r, 0)?;
        return f.write_str(")");
    }
    match r {
        Regex::Symbol(s) => write!(f, "{s}"),
        Regex::Epsilon => f.write_str("&"),
        Regex::Empty => f.write_str("0"),
        Regex::Union(l, rr) => {
            write_at(f, l, 0)?;
            f.write_str("|")?;
            write_at(f, rr, 1)
        }
        Regex::Product(l, rr) => {
            write_at(f, l, 1)?;
            write_at(f, rr, 2)
        }
        Regex::Scale(k, c) => {
            write!(f, "[{k}]")?;
            write_at(f, c, 2)
        }
        Regex::Star(c) => {
            write_at(f, c, 3)?;
            f.write_str("*")
        }
    }
}

impl<W: fmt::Display> fmt::Display for Regex<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(f, self, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiset::alphabet;

    fn p(s: &str) -> Regex {
        parse(s).unwrap()
    }

    #[test]
    fn nullable_cases() {
        assert!(p("a*").nullable());
        assert!(!p("a b").nullable());
        assert!(p("(a|&)").nullable());
        assert!(p("[0]&").nullable());
        assert!(!p("0").nullable());
    }

    #[test]
    fn language_alphabet_propagates_emptiness() {
        assert_eq!(p("a | 0 b").language_alphabet(), Some(alphabet(["a"])));
        assert_eq!(p("0").language_alphabet(), None);
        assert_eq!(p("a b*").language_alphabet(), Some(alphabet(["a", "b"])));
        assert_eq!(p("0*").language_alphabet(), Some(alphabet([])));
        assert_eq!(p("&").language_alphabet(), Some(alphabet([])));
    }

    #[test]
    fn validate_mc_cases() {
        let v = p("(ab)*").validate_mc();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::NotUnary(Some(alphabet(["a", "b"]))));
        assert!(v[0].to_string().contains("star-unary rule"));

        let v = p("(a|&)*").validate_mc();
        assert_eq!(v[0].kind, ViolationKind::NotProper);

        assert!(p("a* b* (a|b)").validate_mc().is_empty());
        assert!(p("(a|0b)*").validate_mc().is_empty());
        assert_eq!(p("0*").validate_mc()[0].kind, ViolationKind::NotUnary(None));
    }

    #[test]
    fn violation_path_points_at_the_star() {
        let v = p("a ([2](bc)*)").validate_mc();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].path, vec![1, 0]);
        assert_eq!(v[0].subtree, "(bc)*");
    }

    #[test]
    fn size_counts_nodes() {
        assert_eq!(p("a").size(), 1);
        assert_eq!(p("[2]a b*").size(), 5);
    }

    #[test]
    fn printing_uses_minimal_parentheses() {
        for s in ["a|b", "ab|c", "a(b|c)", "[0.5](a|b)c*", "([2]a)*", "a(bc)", "a|(b|c)", "a**", "[1/3][2]a", "x'y'"] {
            assert_eq!(p(s).to_string(), s);
        }
    }

    #[test]
    fn weights_are_listed_in_preorder() {
        let r = p("[1]a | [2]([3]b)");
        let w: Vec<String> = r.weights().iter().map(|x| x.to_string()).collect();
        assert_eq!(w, ["1", "2", "3"]);
        let r2 = r.with_weights(&[7.0, 8.0, 9.0]).unwrap();
        assert_eq!(r2.weights(), vec![&7.0, &8.0, &9.0]);
        assert!(r.with_weights(&[1.0]).is_err());
    }
}
