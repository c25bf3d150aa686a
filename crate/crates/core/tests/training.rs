//! End-to-end training on data drawn from known models.

use std::collections::BTreeMap;

use mswa::construct::compile;
use mswa::io::{automaton_from_json, automaton_to_json};
use mswa::multiset::alphabet;
use mswa::regex::parse;
use mswa::train::{partition, train, Mode, Sampler, TrainingConfig};
use mswa::{Multiset, MultisetAutomaton, Semiring};

#[test]
fn skeleton_training_reaches_empirical_frequencies() {
    let generator = parse("[0.2]a | [0.5]b | [0.3]&").unwrap();
    let sigma = generator.symbols();
    let m: MultisetAutomaton<f64> = compile(&generator, &sigma).unwrap();
    let data = Sampler::new(&m, 1).unwrap().sample_seeded(3000, 4);
    let mut freq: BTreeMap<Multiset, f64> = BTreeMap::new();
    for w in &data {
        *freq.entry(w.clone()).or_default() += 1.0 / data.len() as f64;
    }

    let mut config = TrainingConfig::new(Mode::RegexSkeleton(parse("[1]a | [1]b | [1]&").unwrap()), 1);
    config.learning_rate = 1e-4;
    config.epochs = 2000;
    let run = train(&config, &data, &sigma).unwrap();
    let z = partition(&run.automaton, 1).unwrap();
    for (w, f) in &freq {
        let p = run.automaton.weight(w).unwrap() / z;
        assert!((p - f).abs() < 5e-3, "{{{w}}}: model {p}, empirical {f}");
    }
    assert_eq!(run.commutativity.max_violation, 0.0);
}

#[test]
fn learned_automata_round_trip_through_json() {
    let data: Vec<Multiset> = ["a", "a b", "b b", "", "a"].iter().map(|s| s.parse().unwrap()).collect();
    let mut config = TrainingConfig::new(Mode::Free { states: 2 }, 2);
    config.epochs = 20;
    let run = train(&config, &data, &alphabet(["a", "b"])).unwrap();
    let (back, _) = automaton_from_json::<f64>(&automaton_to_json(&run.automaton, None)).unwrap();
    for (w, x) in run.automaton.enumerate_language(2).unwrap() {
        assert_eq!(back.weight(&w).unwrap(), x);
    }
    let total = Semiring::sum(run.automaton.enumerate_language(2).unwrap().iter().map(|(_, x)| x));
    assert!((partition(&run.automaton, 2).unwrap() - total).abs() < 1e-12);
    assert_eq!(run.curve.len(), 21);
}
