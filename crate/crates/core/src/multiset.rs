//! Symbols and multisets over them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// An alphabet symbol. Ordered lexicographically, which is the canonical
/// order used whenever a product of transition matrices needs one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(String);

impl Symbol {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(Error::Invalid(format!("bad symbol name `{name}`")));
        }
        Ok(Symbol(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Symbol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Symbol::new(s)
    }
}

pub type Alphabet = BTreeSet<Symbol>;

/// Convenience for tests and examples: `sym("a")`.
pub fn sym(name: &str) -> Symbol {
    Symbol::new(name).expect("valid symbol")
}

pub fn alphabet<'a>(names: impl IntoIterator<Item = &'a str>) -> Alphabet {
    names.into_iter().map(sym).collect()
}

/// A finite multiset; zero counts are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiset {
    counts: BTreeMap<Symbol, usize>,
}

impl Multiset {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_symbols<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        let mut m = Self::empty();
        for s in iter {
            m.add(s, 1);
        }
        m
    }

    pub fn from_counts<I: IntoIterator<Item = (Symbol, usize)>>(iter: I) -> Self {
        let mut m = Self::empty();
        for (s, c) in iter {
            m.add(s, c);
        }
        m
    }

    /// `a^n`
    pub fn power(s: Symbol, n: usize) -> Self {
        Self::from_counts([(s, n)])
    }

    pub fn add(&mut self, s: Symbol, n: usize) {
        if n > 0 {
            *self.counts.entry(s).or_insert(0) += n;
        }
    }

    pub fn count(&self, s: &Symbol) -> usize {
        self.counts.get(s).copied().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn alphabet(&self) -> Alphabet {
        self.counts.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, usize)> {
        self.counts.iter().map(|(s, &c)| (s, c))
    }

    /// Multiset union `uv` (pointwise sum of counts).
    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (s, c) in other.iter() {
            out.add(s.clone(), c);
        }
        out
    }

    /// `self - other`, or `None` if `other` is not contained in `self`.
    pub fn difference(&self, other: &Self) -> Option<Self> {
        let mut out = self.clone();
        for (s, c) in other.iter() {
            let have = out.counts.get_mut(s)?;
            if *have < c {
                return None;
            }
            *have -= c;
            if *have == 0 {
                out.counts.remove(s);
            }
        }
        Some(out)
    }

    /// All sub-multisets `u` of `self`; each split `uv = self` appears once.
    pub fn sub_multisets(&self) -> Vec<Multiset> {
        let mut out = vec![Multiset::empty()];
        for (s, c) in self.iter() {
            let mut next = Vec::with_capacity(out.len() * (c + 1));
            for base in &out {
                for k in 0..=c {
                    let mut m = base.clone();
                    m.add(s.clone(), k);
                    next.push(m);
                }
            }
            out = next;
        }
        out
    }

    /// Symbols in canonical order, each repeated by its count.
    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.counts
            .iter()
            .flat_map(|(s, &c)| std::iter::repeat_n(s, c))
    }

    /// One line of the multiset data format: whitespace-separated tokens.
    pub fn parse_line(line: &str) -> Result<Self> {
        line.split_whitespace()
            .map(Symbol::new)
            .collect::<Result<Vec<_>>>()
            .map(Self::from_symbols)
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for s in self.symbols() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for Multiset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Multiset::parse_line(s)
    }
}

/// Parse a data file: one multiset per line, a blank line is the empty
/// multiset. A trailing newline does not add an entry.
pub fn parse_multiset_file(text: &str) -> Result<Vec<Multiset>> {
    let text = text.strip_suffix('\n').unwrap_or(text);
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split('\n')
        .map(|l| Multiset::parse_line(l.trim_end_matches('\r')))
        .collect()
}

pub fn format_multiset_file(data: &[Multiset]) -> String {
    let mut s = String::new();
    for m in data {
        s.push_str(&m.to_string());
        s.push('\n');
    }
    s
}

/// Count vectors of total size at most `bound` over `k` symbols, graded by
/// size and, within a size, with earlier symbols taking larger counts first.
pub fn count_vectors(k: usize, bound: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 0..=bound {
        let mut cur = vec![0; k];
        compositions(k, size, 0, &mut cur, &mut out);
    }
    out
}

fn compositions(k: usize, remaining: usize, pos: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k == 0 {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if pos == k - 1 {
        cur[pos] = remaining;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    for c in (0..=remaining).rev() {
        cur[pos] = c;
        compositions(k, remaining - c, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

/// Number of count vectors over `k` symbols with total at most `n`:
/// `C(n + k, k)`; `None` on overflow.
pub fn multisets_up_to(k: usize, n: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        acc = acc.checked_mul(n as u128 + i)? / i;
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_drops_zero_counts() {
        let mut m = Multiset::empty();
        m.add(sym("a"), 0);
        assert!(m.is_empty());
        let ab = Multiset::from_symbols([sym("b"), sym("a"), sym("b")]);
        assert_eq!(ab.size(), 3);
        assert_eq!(ab.to_string(), "a b b");
        assert_eq!(ab.difference(&ab).unwrap(), Multiset::empty());
        assert!(Multiset::empty().difference(&ab).is_none());
    }

    #[test]
    fn splits_cover_every_sub_multiset_once() {
        let w: Multiset = "a a b".parse().unwrap();
        let subs = w.sub_multisets();
        assert_eq!(subs.len(), 6);
        let unique: BTreeSet<_> = subs.iter().cloned().collect();
        assert_eq!(unique.len(), 6);
        for u in &subs {
            let v = w.difference(u).unwrap();
            assert_eq!(u.union(&v), w);
        }
    }

    #[test]
    fn data_file_with_blank_line_is_epsilon() {
        let data = parse_multiset_file("a b\n\nb a a\n").unwrap();
        assert_eq!(data.len(), 3);
        assert!(data[1].is_empty());
        assert_eq!(data[2].count(&sym("a")), 2);
        assert_eq!(parse_multiset_file(&format_multiset_file(&data)).unwrap(), data);
    }

    #[test]
    fn count_vector_enumeration_matches_closed_form() {
        for k in 0..4 {
            for n in 0..6 {
                let v = count_vectors(k, n);
                assert_eq!(v.len() as u128, multisets_up_to(k, n).unwrap(), "k={k} n={n}");
            }
        }
        assert_eq!(count_vectors(2, 1), vec![vec![0, 0], vec![1, 0], vec![0, 1]]);
    }
}
