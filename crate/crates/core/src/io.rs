//! The JSON automaton format and dynamic dispatch over semiring names.
//!
//! ```text
//! { "semiring": str, "d": int, "alphabet": [str], "lambda": [num],
//!   "mu": {sym: [[num]]}, "rho": [num], "kappa": {sym: [0|1]} }
//! ```
//!
//! Files written by the compiler also carry an optional `"regex"` string
//! with the source expression so the graded generating set can be rebuilt.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::automaton::MultisetAutomaton;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::multiset::{Alphabet, Symbol};
use crate::semiring::{Boolean, LogWeight, Rational, Viterbi, Weight};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AutomatonFile {
    semiring: String,
    d: usize,
    alphabet: Vec<String>,
    lambda: Vec<Value>,
    mu: BTreeMap<String, Vec<Vec<Value>>>,
    rho: Vec<Value>,
    kappa: BTreeMap<String, Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    regex: Option<String>,
}

pub fn automaton_to_json<S: Weight>(m: &MultisetAutomaton<S>, regex: Option<&str>) -> String {
    let file = AutomatonFile {
        semiring: S::SPEC.name.to_string(),
        d: m.d(),
        alphabet: m.alphabet().iter().map(|s| s.to_string()).collect(),
        lambda: m.lambda().iter().map(Weight::to_json).collect(),
        mu: m
            .alphabet()
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let rows = m
                    .mu_at(i)
                    .to_rows()
                    .iter()
                    .map(|r| r.iter().map(Weight::to_json).collect())
                    .collect();
                (s.to_string(), rows)
            })
            .collect(),
        rho: m.rho().iter().map(Weight::to_json).collect(),
        kappa: m
            .alphabet()
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let k = m.kappa_at(i).iter().map(|&b| Value::from(b as u8)).collect();
                (s.to_string(), k)
            })
            .collect(),
        regex: regex.map(str::to_string),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("serializable");
    s.push('\n');
    s
}

fn kappa_bit(v: &Value) -> Result<bool> {
    match v {
        Value::Bool(b) => Ok(*b),
        Value::Number(n) if n.as_u64() == Some(0) => Ok(false),
        Value::Number(n) if n.as_u64() == Some(1) => Ok(true),
        other => Err(Error::Invalid(format!("kappa entries are 0 or 1, got {other}"))),
    }
}

fn decode<S: Weight>(file: AutomatonFile) -> Result<(MultisetAutomaton<S>, Option<String>)> {
    if file.semiring != S::SPEC.name {
        return Err(Error::Invalid(format!(
            "automaton is over `{}`, expected `{}`",
            file.semiring,
            S::SPEC.name
        )));
    }
    let alphabet: Alphabet = file
        .alphabet
        .iter()
        .map(|s| Symbol::new(s.as_str()))
        .collect::<Result<_>>()?;
    if alphabet.len() != file.alphabet.len() {
        return Err(Error::Invalid("duplicate alphabet symbol".into()));
    }
    let vec = |v: &[Value]| v.iter().map(S::from_json).collect::<Result<Vec<S>>>();
    let lambda = vec(&file.lambda)?;
    let rho = vec(&file.rho)?;
    if lambda.len() != file.d {
        return Err(Error::Shape(format!("lambda has {} entries, d = {}", lambda.len(), file.d)));
    }
    let mut mu = BTreeMap::new();
    for (s, rows) in &file.mu {
        let rows = rows.iter().map(|r| vec(r)).collect::<Result<Vec<_>>>()?;
        mu.insert(Symbol::new(s.as_str())?, Matrix::from_rows(rows)?);
    }
    let mut kappa = BTreeMap::new();
    for (s, bits) in &file.kappa {
        let bits = bits.iter().map(kappa_bit).collect::<Result<Vec<_>>>()?;
        kappa.insert(Symbol::new(s.as_str())?, bits);
    }
    let m = MultisetAutomaton::new(alphabet, lambda, mu, rho, kappa)?;
    Ok((m, file.regex))
}

pub fn automaton_from_json<S: Weight>(text: &str) -> Result<(MultisetAutomaton<S>, Option<String>)> {
    decode(serde_json::from_str(text)?)
}

/// An automaton whose semiring is only known at run time.
#[derive(Debug, Clone)]
pub enum AnyAutomaton {
    Real(MultisetAutomaton<f64>),
    Rational(MultisetAutomaton<Rational>),
    Boolean(MultisetAutomaton<Boolean>),
    Viterbi(MultisetAutomaton<Viterbi>),
    Log(MultisetAutomaton<LogWeight>),
}

/// Run `$body` with `$m` bound to the typed automaton inside an
/// [`AnyAutomaton`](crate::io::AnyAutomaton).
#[macro_export]
macro_rules! with_automaton {
    ($any:expr, $m:ident => $body:expr) => {
        match $any {
            $crate::io::AnyAutomaton::Real($m) => $body,
            $crate::io::AnyAutomaton::Rational($m) => $body,
            $crate::io::AnyAutomaton::Boolean($m) => $body,
            $crate::io::AnyAutomaton::Viterbi($m) => $body,
            $crate::io::AnyAutomaton::Log($m) => $body,
        }
    };
}

impl AnyAutomaton {
    pub fn semiring_name(&self) -> &'static str {
        match self {
            AnyAutomaton::Real(_) => f64::SPEC.name,
            AnyAutomaton::Rational(_) => Rational::SPEC.name,
            AnyAutomaton::Boolean(_) => Boolean::SPEC.name,
            AnyAutomaton::Viterbi(_) => Viterbi::SPEC.name,
            AnyAutomaton::Log(_) => LogWeight::SPEC.name,
        }
    }

    pub fn d(&self) -> usize {
        with_automaton!(self, m => m.d())
    }

    pub fn to_json(&self, regex: Option<&str>) -> String {
        with_automaton!(self, m => automaton_to_json(m, regex))
    }
}

#[derive(Debug, Clone)]
pub struct LoadedAutomaton {
    pub automaton: AnyAutomaton,
    /// Source expression, when the file was written by the compiler.
    pub regex: Option<String>,
}

pub fn load_any(text: &str) -> Result<LoadedAutomaton> {
    let file: AutomatonFile = serde_json::from_str(text)?;
    let (automaton, regex) = match file.semiring.as_str() {
        "real" => decode(file).map(|(m, r)| (AnyAutomaton::Real(m), r))?,
        "rational" => decode(file).map(|(m, r)| (AnyAutomaton::Rational(m), r))?,
        "boolean" => decode(file).map(|(m, r)| (AnyAutomaton::Boolean(m), r))?,
        "viterbi" => decode(file).map(|(m, r)| (AnyAutomaton::Viterbi(m), r))?,
        "log" => decode(file).map(|(m, r)| (AnyAutomaton::Log(m), r))?,
        other => return Err(Error::Invalid(format!("unknown semiring `{other}`"))),
    };
    Ok(LoadedAutomaton { automaton, regex })
}
