use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use mswa::construct::{compile as compile_regex, LazyAutomaton};
use mswa::inside::{char_equation, compressibility, GeneratingSet};
use mswa::io::{automaton_to_json, load_any, AnyAutomaton};
use mswa::multiset::{format_multiset_file, parse_multiset_file};
use mswa::regex::{parse as parse_regex, CnfFormula, Reduction};
use mswa::train::{train as run_training, Mode, Sampler, TrainingConfig};
use mswa::{with_automaton, Alphabet, Boolean, Multiset, MultisetAutomaton, Regex, Ring, Weight};

use crate::{
    AnalyzeArgs, CompileArgs, Failure, ParseArgs, ReduceSatArgs, SampleArgs, SemiringName, Source, TrainArgs, TrainMode,
    WeightArgs,
};

/// Largest variable count `reduce-sat --check` decides by truth table.
const TRUTH_TABLE_VARS: u32 = 24;

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

/// Write to `path`, or to standard output when there is none.
fn emit(path: Option<&PathBuf>, text: &str) -> Outcome {
    match path {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn source_text(source: &Source) -> Result<String, Failure> {
    match (&source.expr, &source.file) {
        (Some(e), _) => Ok(e.clone()),
        (None, Some(f)) => Ok(read(f)?.trim_end().to_string()),
        (None, None) => Err(Failure::usage("an expression (-e) or file (-f) is required")),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn alphabet_json(a: &Alphabet) -> Value {
    Value::from(a.iter().map(|s| s.as_str().to_string()).collect::<Vec<_>>())
}

pub fn parse(args: ParseArgs) -> Outcome {
    let text = source_text(&args.source)?;
    let regex = parse_regex(&text)?;
    let violations = regex.validate_mc();
    let out = if args.json {
        pretty(&json!({
            "regex": regex.to_string(),
            "size": regex.size(),
            "symbols": alphabet_json(&regex.symbols()),
            "nullable": regex.nullable(),
            "mc_regular": violations.is_empty(),
            "violations": violations.iter().map(ToString::to_string).collect::<Vec<_>>(),
        }))
    } else {
        let mut s = String::new();
        writeln!(s, "{regex}").unwrap();
        writeln!(s, "size: {}", regex.size()).unwrap();
        let symbols: Vec<String> = regex.symbols().iter().map(ToString::to_string).collect();
        writeln!(s, "symbols: {}", symbols.join(" ")).unwrap();
        if violations.is_empty() {
            writeln!(s, "mc-regular: yes").unwrap();
        } else {
            writeln!(s, "mc-regular: no").unwrap();
            for v in &violations {
                writeln!(s, "  {v}").unwrap();
            }
        }
        s
    };
    print!("{out}");
    Ok(())
}

fn compile_any(semiring: SemiringName, regex: &Regex, sigma: &Alphabet) -> mswa::Result<AnyAutomaton> {
    Ok(match semiring {
        SemiringName::Real => AnyAutomaton::Real(compile_regex(regex, sigma)?),
        SemiringName::Rational => AnyAutomaton::Rational(compile_regex(regex, sigma)?),
        SemiringName::Boolean => AnyAutomaton::Boolean(compile_regex(regex, sigma)?),
        SemiringName::Viterbi => AnyAutomaton::Viterbi(compile_regex(regex, sigma)?),
        SemiringName::Log => AnyAutomaton::Log(compile_regex(regex, sigma)?),
    })
}

pub fn compile(args: CompileArgs) -> Outcome {
    let regex = parse_regex(&source_text(&args.source)?)?;
    let mut sigma = regex.symbols();
    for name in &args.alphabet {
        sigma.insert(name.parse()?);
    }
    let m = compile_any(args.semiring, &regex, &sigma)?;
    if let Some(path) = &args.dot {
        write(path, &with_automaton!(&m, a => a.to_dot()))?;
    }
    emit(args.out.as_ref(), &m.to_json(Some(&regex.to_string())))
}

fn check_semiring(m: &AnyAutomaton, wanted: Option<SemiringName>) -> Outcome {
    match wanted {
        Some(s) if s.as_str() != m.semiring_name() => Err(Failure::validation(format!(
            "automaton uses the {} semiring, not {}",
            m.semiring_name(),
            s.as_str()
        ))),
        _ => Ok(()),
    }
}

fn weigh<S: Weight>(m: &MultisetAutomaton<S>, items: &[Multiset]) -> mswa::Result<Vec<(String, Value)>> {
    items
        .iter()
        .map(|w| m.weight(w).map(|x| (x.to_string(), x.to_json())))
        .collect()
}

pub fn weight(args: WeightArgs) -> Outcome {
    let loaded = load_any(&read(&args.automaton)?)?;
    check_semiring(&loaded.automaton, args.semiring)?;
    let mut items: Vec<Multiset> = args
        .multisets
        .iter()
        .map(|s| s.parse())
        .collect::<mswa::Result<_>>()?;
    if let Some(path) = &args.data {
        items.extend(parse_multiset_file(&read(path)?)?);
    }
    if items.is_empty() {
        return Err(Failure::usage("no multisets given; use -w or --data"));
    }
    let weights = with_automaton!(&loaded.automaton, m => weigh(m, &items))?;
    let out = if args.json {
        pretty(&Value::from(
            items
                .iter()
                .zip(&weights)
                .map(|(w, (_, j))| json!({ "multiset": w.to_string(), "weight": j }))
                .collect::<Vec<_>>(),
        ))
    } else {
        weights.iter().map(|(s, _)| format!("{s}\n")).collect()
    };
    print!("{out}");
    Ok(())
}

struct SymbolReport {
    symbol: String,
    cycles: usize,
    two_disjoint_cycles: bool,
    compressible: bool,
    consistent: bool,
    equation: String,
    left: Vec<Value>,
    right: Vec<Value>,
}

fn analyze_symbols<S: Weight>(m: &MultisetAutomaton<S>) -> mswa::Result<Vec<SymbolReport>> {
    m.alphabet()
        .iter()
        .map(|a| {
            let c = compressibility(m, a)?;
            let eq = char_equation(m.mu(a)?)?;
            Ok(SymbolReport {
                symbol: a.to_string(),
                cycles: c.cycles,
                two_disjoint_cycles: c.two_disjoint_cycles,
                compressible: c.by_coefficients,
                consistent: c.consistent(),
                equation: eq.to_string(),
                left: eq.left.iter().map(Weight::to_json).collect(),
                right: eq.right.iter().map(Weight::to_json).collect(),
            })
        })
        .collect()
}

fn graded<S: Ring + Weight>(m: &MultisetAutomaton<S>, regex: &str) -> mswa::Result<Vec<Alphabet>> {
    let set = GeneratingSet::from_literals(m, &parse_regex(regex)?)?;
    Ok(set.grades().to_vec())
}

/// Grades of the generating set, or why there is none.
fn generating_set(m: &AnyAutomaton, regex: Option<&str>) -> Result<Vec<Alphabet>, String> {
    let Some(regex) = regex else {
        return Err("the file records no source expression".into());
    };
    let result = match m {
        AnyAutomaton::Real(a) => graded(a, regex),
        AnyAutomaton::Rational(a) => graded(a, regex),
        other => return Err(format!("the {} semiring is not a ring", other.semiring_name())),
    };
    result.map_err(|e| e.to_string())
}

fn grade_label(g: &Alphabet) -> String {
    format!("{{{}}}", g.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(","))
}

pub fn analyze(args: AnalyzeArgs) -> Outcome {
    let loaded = load_any(&read(&args.automaton)?)?;
    let m = &loaded.automaton;
    if let Some(path) = &args.dot {
        write(path, &with_automaton!(m, a => a.to_dot()))?;
    }
    let symbols = with_automaton!(m, a => analyze_symbols(a))?;
    let gens = generating_set(m, loaded.regex.as_deref());
    let alphabet: Vec<String> = with_automaton!(m, a => a.alphabet().iter().map(ToString::to_string).collect());
    let out = if args.json {
        let (size, grades, reason) = match &gens {
            Ok(g) => (Value::from(g.len()), Value::from(g.iter().map(alphabet_json).collect::<Vec<_>>()), Value::Null),
            Err(r) => (Value::Null, Value::Null, Value::from(r.as_str())),
        };
        pretty(&json!({
            "semiring": m.semiring_name(),
            "states": m.d(),
            "alphabet": alphabet,
            "symbols": symbols.iter().map(|s| json!({
                "symbol": s.symbol,
                "cycles": s.cycles,
                "two_disjoint_cycles": s.two_disjoint_cycles,
                "compressible": s.compressible,
                "verdicts_agree": s.consistent,
                "equation": s.equation,
                "left": s.left,
                "right": s.right,
            })).collect::<Vec<_>>(),
            "generating_set": { "size": size, "grades": grades, "unavailable": reason },
        }))
    } else {
        let yes = |b: bool| if b { "yes" } else { "no" };
        let mut s = String::new();
        writeln!(s, "semiring: {}", m.semiring_name()).unwrap();
        writeln!(s, "states: {}", m.d()).unwrap();
        writeln!(s, "alphabet: {}", alphabet.join(" ")).unwrap();
        for r in &symbols {
            writeln!(s, "symbol {}", r.symbol).unwrap();
            writeln!(s, "  simple cycles: {}", r.cycles).unwrap();
            writeln!(s, "  two node-disjoint cycles: {}", yes(r.two_disjoint_cycles)).unwrap();
            writeln!(s, "  characteristic equation: {}", r.equation).unwrap();
            writeln!(s, "  compressible: {}", yes(r.compressible)).unwrap();
            if !r.consistent {
                writeln!(s, "  note: coefficient and cycle verdicts differ (weights cancel)").unwrap();
            }
        }
        match &gens {
            Ok(g) => {
                writeln!(s, "generating set: {} generators", g.len()).unwrap();
                let mut counts: Vec<(String, usize)> = Vec::new();
                for label in g.iter().map(grade_label) {
                    match counts.iter_mut().find(|(l, _)| *l == label) {
                        Some((_, c)) => *c += 1,
                        None => counts.push((label, 1)),
                    }
                }
                for (label, c) in counts {
                    writeln!(s, "  grade {label}: {c}").unwrap();
                }
            }
            Err(reason) => writeln!(s, "generating set: unavailable ({reason})").unwrap(),
        }
        s
    };
    print!("{out}");
    Ok(())
}

pub fn train(args: TrainArgs) -> Outcome {
    if let Some(s) = args.semiring {
        if s != SemiringName::Real {
            return Err(Failure::validation(format!("training uses real weights, not {}", s.as_str())));
        }
    }
    let data = parse_multiset_file(&read(&args.data)?)?;
    let mut sigma: Alphabet = data.iter().flat_map(|w| w.alphabet()).collect();
    let mode = match args.mode {
        TrainMode::Skeleton => {
            let path = args.regex.as_ref().ok_or_else(|| Failure::usage("skeleton mode needs --regex"))?;
            let regex = parse_regex(read(path)?.trim())?;
            sigma.extend(regex.symbols());
            Mode::RegexSkeleton(regex)
        }
        TrainMode::Free => Mode::Free {
            states: args.states.ok_or_else(|| Failure::usage("free mode needs --states"))?,
        },
    };
    let bound = args
        .bound
        .unwrap_or_else(|| data.iter().map(Multiset::size).max().unwrap_or(0));
    let config = TrainingConfig {
        learning_rate: args.lr,
        epochs: args.epochs,
        penalty_start: args.penalty_start,
        penalty_growth: args.penalty_growth,
        seed: args.seed,
        batch_size: args.batch_size,
        ..TrainingConfig::new(mode, bound)
    };
    let run = run_training(&config, &data, &sigma)?;
    if let Some(path) = &args.curve {
        write(path, &run.curve_csv())?;
    }
    let learned = run.params.regex().map(|r| r.to_string());
    emit(args.out.as_ref(), &automaton_to_json(&run.automaton, learned.as_deref()))?;
    eprintln!(
        "final nll {} after {} epochs; commutativity violation {:e}",
        run.final_nll(),
        args.epochs,
        run.commutativity.max_violation
    );
    if let Some(w) = run.min_weight.filter(|w| *w < 0.0) {
        eprintln!("warning: some multiset within the size bound has negative weight {w}; the model is not a distribution");
    }
    Ok(())
}

pub fn sample(args: SampleArgs) -> Outcome {
    let loaded = load_any(&read(&args.automaton)?)?;
    let m: MultisetAutomaton<f64> = match loaded.automaton {
        AnyAutomaton::Real(m) => m,
        AnyAutomaton::Rational(m) => m.map_weights(|x| mswa::Literal(x.clone()).to_f64()),
        other => {
            return Err(Failure::validation(format!(
                "sampling needs real or rational weights, not {}",
                other.semiring_name()
            )))
        }
    };
    let draws = Sampler::new(&m, args.bound)?.sample_seeded(args.count, args.seed);
    emit(args.out.as_ref(), &format_multiset_file(&draws))
}

pub fn reduce_sat(args: ReduceSatArgs) -> Outcome {
    let phi = CnfFormula::parse_dimacs(&read(&args.cnf)?)?;
    let reduction = Reduction::new(&phi)?;
    let combined = reduction.combined();
    let mut verdict = None;
    if args.check {
        if phi.num_vars > TRUTH_TABLE_VARS {
            return Err(mswa::Error::Resource(format!(
                "truth table over {} variables; at most {TRUTH_TABLE_VARS} are checked",
                phi.num_vars
            ))
            .into());
        }
        let sigma: Alphabet = combined.symbols().into_iter().chain(reduction.target.alphabet()).collect();
        let lazy: LazyAutomaton<Boolean> = LazyAutomaton::from_literals(&combined, &sigma)?;
        let member = lazy.weight(&reduction.target)? == Boolean(true);
        verdict = Some((phi.is_satisfiable(), member));
    }
    let line = verdict.map(|(sat, member)| match (sat, member) {
        (true, true) => "SAT-consistent: w in L(alpha beta)".to_string(),
        (false, false) => "UNSAT-consistent: w not in L(alpha beta)".to_string(),
        (true, false) => "INCONSISTENT: satisfiable but w not in L(alpha beta)".to_string(),
        (false, true) => "INCONSISTENT: unsatisfiable but w in L(alpha beta)".to_string(),
    });
    let out = if args.json {
        pretty(&json!({
            "regex": combined.to_string(),
            "alpha": reduction.alpha.to_string(),
            "beta": reduction.beta.to_string(),
            "target": reduction.target.to_string(),
            "satisfiable": verdict.map(|v| v.0),
            "member": verdict.map(|v| v.1),
            "verdict": line,
        }))
    } else {
        let mut s = format!("{combined}\n{}\n", reduction.target);
        if let Some(l) = &line {
            s.push_str(l);
            s.push('\n');
        }
        s
    };
    print!("{out}");
    match verdict {
        Some((sat, member)) if sat != member => Err(Failure {
            code: 4,
            message: "membership disagrees with the truth table".into(),
        }),
        _ => Ok(()),
    }
}
