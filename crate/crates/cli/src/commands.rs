use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use wa_lab::algebra::rational::format_rational;
use wa_lab::algebra::Triangularity;
use wa_lab::analysis::{classify_ambiguity, is_p_triangular};
use wa_lab::determinisability::{
    decide_determinisable, decide_unambiguisable, depump_evaluate, prime_divisor_probe, twin_property, Decision,
    DecisionBasis, TwinVerdict,
};
use wa_lab::equivalence::{zeroness, ZeronessVerdict, DEFAULT_STATE_BUDGET};
use wa_lab::format::automaton_to_value;
use wa_lab::pumpability::{decide_pumpability, DecideMethod, DecideOptions, FalsifierBounds, PumpVerdict};
use wa_lab::{difference, parse_automaton, Error, WeightedAutomaton, Word};

use crate::{Command, GlobalOpts, Method};

pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match e {
            Error::BudgetExceeded { .. } => (2, "resource"),
            Error::Format { .. } | Error::InvalidRational(_) | Error::InvalidAutomaton(_) => (1, "parse"),
            Error::UnknownSymbol(_) => (1, "word"),
            _ => (1, "precondition"),
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 1,
        kind: "io",
        message: format!("{}: {e}", path.display()),
    }
}

struct Input {
    path: PathBuf,
    digest: String,
    automaton: WeightedAutomaton,
}

fn load(path: &Path) -> Result<Input, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    let digest = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    let automaton = parse_automaton(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })?;
    Ok(Input {
        path: path.to_path_buf(),
        digest,
        automaton,
    })
}

fn budget(opts: &GlobalOpts) -> Result<usize, Failure> {
    if let Some(b) = opts.state_budget {
        return Ok(b);
    }
    match std::env::var("WA_LAB_BUDGET") {
        Ok(s) => s.trim().parse().map_err(|_| Failure {
            code: 1,
            kind: "usage",
            message: format!("WA_LAB_BUDGET is not a count: `{s}`"),
        }),
        Err(_) => Ok(DEFAULT_STATE_BUDGET),
    }
}

fn decide_options(opts: &GlobalOpts) -> Result<DecideOptions, Failure> {
    Ok(DecideOptions {
        method: match opts.method {
            Method::Exact => DecideMethod::Exact,
            Method::Falsify => DecideMethod::Falsify,
            Method::Auto => DecideMethod::Auto,
        },
        bounds: FalsifierBounds::new(opts.max_u, opts.max_v, opts.max_w),
        budget: budget(opts)?,
    })
}

fn word(a: &WeightedAutomaton, w: &[usize]) -> Value {
    Value::String(a.format_word(w))
}

fn zeroness_fields(a: &WeightedAutomaton, v: &ZeronessVerdict, out: &mut Map<String, Value>) {
    out.insert(
        "witness".into(),
        match &v.witness {
            Some((w, x)) => json!({"word": word(a, w), "value": format_rational(x)}),
            None => Value::Null,
        },
    );
    out.insert("states_explored".into(), json!(v.states_explored));
    out.insert("basis_size".into(), json!(v.basis_size));
}

fn pump_fields(a: &WeightedAutomaton, v: &PumpVerdict, out: &mut Map<String, Value>) {
    out.insert("method".into(), json!(v.method.as_str()));
    out.insert("exhaustive".into(), json!(v.method == wa_lab::pumpability::PumpMethod::ExactZeroness));
    out.insert("m".into(), json!(v.m));
    out.insert("states_explored".into(), json!(v.states_explored));
    out.insert(
        "witness".into(),
        match &v.witness {
            Some(w) => json!({
                "u": word(a, &w.u),
                "v": word(a, &w.v),
                "w": word(a, &w.w),
                "w2": w.w2.as_ref().map(|x| word(a, x)),
            }),
            None => Value::Null,
        },
    );
}

fn twin_fields(v: &TwinVerdict, out: &mut Map<String, Value>) {
    let t = &v.trimmed;
    out.insert(
        "witness".into(),
        match &v.witness {
            Some(w) => json!({
                "u": word(t, &w.u),
                "v": word(t, &w.v),
                "p": t.states()[w.p],
                "q": t.states()[w.q],
                "weight_p": format_rational(&w.weight_p),
                "weight_q": format_rational(&w.weight_q),
            }),
            None => Value::Null,
        },
    );
}

fn decision_fields(a: &WeightedAutomaton, d: &Decision, out: &mut Map<String, Value>) {
    out.insert("holds".into(), json!(d.holds));
    out.insert("class".into(), json!(format!("{:?}", d.class)));
    match &d.basis {
        DecisionBasis::Class => {
            out.insert("basis".into(), json!("class"));
        }
        DecisionBasis::Twin(t) => {
            out.insert("basis".into(), json!("twin"));
            twin_fields(t, out);
        }
        DecisionBasis::Pump(p) => {
            out.insert("basis".into(), json!("pumpability"));
            pump_fields(a, p, out);
        }
    }
}

pub fn run(command: &Command, opts: &GlobalOpts) -> Result<Value, Failure> {
    let mut out = Map::new();
    let mut inputs = Vec::new();
    let mut open = |path: &Path| -> Result<WeightedAutomaton, Failure> {
        let input = load(path)?;
        inputs.push(json!({"path": input.path.display().to_string(), "sha256": input.digest}));
        Ok(input.automaton)
    };
    let name = match command {
        Command::Eval { file, word: text } => {
            let a = open(file)?;
            let w = a.parse_word(text)?;
            out.insert("value".into(), json!(format_rational(&a.evaluate(&w)?)));
            "eval"
        }
        Command::Zero { file } => {
            let a = open(file)?;
            let v = zeroness(&a, budget(opts)?)?;
            out.insert("zero".into(), json!(v.is_zero));
            zeroness_fields(&a, &v, &mut out);
            "zero"
        }
        Command::Equiv { file1, file2 } => {
            let (a, b) = (open(file1)?, open(file2)?);
            let v = zeroness(&difference(&a, &b)?, budget(opts)?)?;
            out.insert("equivalent".into(), json!(v.is_zero));
            zeroness_fields(&a, &v, &mut out);
            "equiv"
        }
        Command::Classify { file } => {
            let a = open(file)?;
            out.insert("class".into(), json!(format!("{:?}", classify_ambiguity(&a))));
            "classify"
        }
        Command::Trim { file } => {
            let a = open(file)?;
            out.insert("automaton".into(), automaton_to_value(&a.trim()));
            "trim"
        }
        Command::Normalize { file, nonneg, integerize } => {
            let mut a = open(file)?;
            if *nonneg {
                a = a.make_nonnegative();
            }
            if *integerize {
                let (scaled, x) = a.scale_to_integers();
                a = scaled;
                out.insert("scale".into(), json!(x.to_string()));
            }
            out.insert("automaton".into(), automaton_to_value(&a));
            "normalize"
        }
        Command::Triangular { file, word: text } => {
            let a = open(file)?;
            let m = a.word_matrix(&a.parse_word(text)?)?;
            let names = |ix: &[usize]| ix.iter().map(|&i| a.states()[i].clone()).collect::<Vec<_>>();
            match is_p_triangular(&m)? {
                Triangularity::Triangular { order } => {
                    out.insert("p_triangular".into(), json!(true));
                    out.insert("order".into(), json!(names(&order)));
                    let diag: Vec<String> = m.permute(&order).diagonal().iter().map(format_rational).collect();
                    out.insert("diagonal".into(), json!(diag));
                }
                Triangularity::Cycle { cycle } => {
                    out.insert("p_triangular".into(), json!(false));
                    out.insert("cycle".into(), json!(names(&cycle)));
                }
            }
            "triangular"
        }
        Command::Twin { file } => {
            let a = open(file)?;
            let v = twin_property(&a)?;
            out.insert("holds".into(), json!(v.holds));
            twin_fields(&v, &mut out);
            "twin"
        }
        Command::Pumpable { file } | Command::BlindPumpable { file } => {
            let blind = matches!(command, Command::BlindPumpable { .. });
            let a = open(file)?;
            let (v, pre) = decide_pumpability(&a, blind, &decide_options(opts)?)?;
            out.insert("pumpable".into(), json!(v.pumpable));
            out.insert("blind".into(), json!(blind));
            out.insert("scale".into(), json!(pre.scale.to_string()));
            pump_fields(&pre.automaton, &v, &mut out);
            if blind {
                "blind-pumpable"
            } else {
                "pumpable"
            }
        }
        Command::DecideUnamb { file } => {
            let a = open(file)?;
            let d = decide_unambiguisable(&a, &decide_options(opts)?)?;
            decision_fields(&a, &d, &mut out);
            "decide-unamb"
        }
        Command::DecideDet { file } => {
            let a = open(file)?;
            let d = decide_determinisable(&a, &decide_options(opts)?)?;
            decision_fields(&a, &d, &mut out);
            "decide-det"
        }
        Command::PrimeProbe { file, max_len } => {
            let a = open(file)?;
            let p = prime_divisor_probe(&a, *max_len)?;
            out.insert("primes".into(), json!(p.primes.iter().map(ToString::to_string).collect::<Vec<_>>()));
            out.insert("composites".into(), json!(p.composites.iter().map(ToString::to_string).collect::<Vec<_>>()));
            out.insert("growth".into(), json!(p.growth));
            out.insert("values_checked".into(), json!(p.values_checked));
            "prime-probe"
        }
        Command::DepumpEval { file, word: text, window } => {
            let a = open(file)?;
            let w: Word = a.parse_word(text)?;
            out.insert("value".into(), json!(format_rational(&depump_evaluate(&a, &w, *window)?)));
            "depump-eval"
        }
    };
    out.insert("command".into(), json!(name));
    out.insert("inputs".into(), Value::Array(inputs));
    if let Some(seed) = opts.seed {
        out.insert("seed".into(), json!(seed));
    }
    Ok(Value::Object(out))
}
