//! Compiled automata against the expression-level weight oracle, over the
//! fixture corpus and random expressions.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mswa::construct::{compile, state_count, LazyAutomaton};
use mswa::io::{automaton_from_json, automaton_to_json};
use mswa::multiset::count_vectors;
use mswa::regex::random::{random_mc_regex, RegexShape};
use mswa::regex::{oracle_weight, parse};
use mswa::{Alphabet, Boolean, Literal, Multiset, MultisetAutomaton, Rational, Regex, Semiring, Symbol};

fn fixtures() -> Vec<Regex> {
    include_str!("fixtures/expressions.txt")
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| parse(l).unwrap_or_else(|e| panic!("{l}: {e}")))
        .collect()
}

fn multisets(sigma: &Alphabet, n: usize) -> Vec<Multiset> {
    let letters: Vec<Symbol> = sigma.iter().cloned().collect();
    count_vectors(letters.len(), n)
        .into_iter()
        .map(|c| Multiset::from_counts(letters.iter().cloned().zip(c)))
        .collect()
}

fn positive(alpha: &Regex) -> bool {
    alpha.weights().iter().all(|w| w.0 > Literal::from_integer(0).0)
}

#[test]
fn fixture_corpus_is_mc_regular() {
    let corpus = fixtures();
    assert!(corpus.len() >= 30);
    for alpha in &corpus {
        assert!(alpha.validate_mc().is_empty(), "{alpha}");
        assert_eq!(&parse(&alpha.to_string()).unwrap(), alpha, "display round trip");
    }
}

#[test]
fn fixture_weights_match_the_oracle() {
    for alpha in fixtures() {
        let sigma = alpha.symbols();
        let exact: MultisetAutomaton<Rational> = compile(&alpha, &sigma).unwrap();
        let real: MultisetAutomaton<f64> = compile(&alpha, &sigma).unwrap();
        let boolean: MultisetAutomaton<Boolean> = compile(&alpha, &sigma).unwrap();
        assert_eq!(exact.d() as u128, state_count(&alpha).unwrap(), "{alpha}");
        for w in multisets(&sigma, 4) {
            let expected: Rational = oracle_weight(&alpha, &w).unwrap();
            assert_eq!(exact.weight(&w).unwrap(), expected, "{alpha} on {{{w}}}");
            let expected_real: f64 = oracle_weight(&alpha, &w).unwrap();
            assert!((real.weight(&w).unwrap() - expected_real).abs() < 1e-9, "{alpha} on {{{w}}}");
            if positive(&alpha) {
                assert_eq!(boolean.weight(&w).unwrap(), Boolean(!Semiring::is_zero(&expected)), "{alpha} on {{{w}}}");
            }
        }
    }
}

#[test]
fn lazy_evaluation_agrees_with_dense_compilation() {
    for alpha in fixtures() {
        let sigma = alpha.symbols();
        let dense: MultisetAutomaton<Rational> = compile(&alpha, &sigma).unwrap();
        let lazy: LazyAutomaton<Rational> = LazyAutomaton::from_literals(&alpha, &sigma).unwrap();
        for w in multisets(&sigma, 4) {
            assert_eq!(lazy.weight(&w).unwrap(), dense.weight(&w).unwrap(), "{alpha} on {{{w}}}");
        }
    }
}

#[test]
fn automaton_files_round_trip() {
    for alpha in fixtures() {
        let sigma = alpha.symbols();
        let m: MultisetAutomaton<Rational> = compile(&alpha, &sigma).unwrap();
        let text = automaton_to_json(&m, Some(&alpha.to_string()));
        let (back, source) = automaton_from_json::<Rational>(&text).unwrap();
        assert_eq!(back, m, "{alpha}");
        assert_eq!(source.as_deref(), Some(alpha.to_string().as_str()));
    }
}

#[test]
fn extra_alphabet_symbols_give_zero_weight() {
    let alpha = parse("[2]a(b|bb)*").unwrap();
    let sigma: Alphabet = ["a", "b", "z"].into_iter().map(mswa::multiset::sym).collect();
    let m: MultisetAutomaton<Rational> = compile(&alpha, &sigma).unwrap();
    let seen: BTreeSet<_> = multisets(&sigma, 3)
        .into_iter()
        .filter(|w| w.count(&mswa::multiset::sym("z")) > 0)
        .map(|w| m.weight(&w).unwrap())
        .collect();
    assert_eq!(seen, BTreeSet::from([Literal::from_integer(0).0]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_expressions_match_the_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alpha = random_mc_regex(&mut rng, &RegexShape::default());
        let sigma = RegexShape::default().alphabet.into_iter().collect::<Alphabet>();
        let m: MultisetAutomaton<Rational> = compile(&alpha, &sigma).unwrap();
        prop_assert!(m.check_commutativity().is_commutative());
        prop_assert!(m.d() as u128 <= 1u128 << alpha.size());
        for w in multisets(&sigma, 3) {
            let expected: Rational = oracle_weight(&alpha, &w).unwrap();
            prop_assert_eq!(m.weight(&w).unwrap(), expected);
        }
    }
}
