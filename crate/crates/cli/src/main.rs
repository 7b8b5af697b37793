//! `fqx`: command-line front end for the fqx engine.
//!
//! Operations are read and written in the text format of `fqx::fqop::serialize_operation`:
//!
//! ```text
//! kind=vectorial
//! basis=mixed
//! order=2
//! s=1 w=- num=1 den=1
//! s=1 w=12 num=-1 den=2
//! ```
//!
//! `s` is the component label (`0`, `1`, `2` or `12`), `w` the word as a digit string with `-`
//! for the empty word. Wherever an operation is expected, the argument may be a file path,
//! `-` for standard input, or a builtin name (expanded at `--order` and `--basis`).
//!
//! Property sets are `+`-separated tags with optional parenthesized arguments, e.g.
//! `sC+Opp+O2+CP`, `S(3,1/2)+vC` or `Nat+Axis(AxisC)+Pin(circular,1,4,0)`. Tags:
//! `Nat`, `sC`/`vC`/`psC`, `Opp`, `S2`, `O2`, `S(i,α)`, `SE SH H E CE CH CSH CSE` (optional α,
//! default 1), `XE`, `CXE`, `Hyp(h,j,l,α,β)`, `CD(±)`, `Biv`, `Antiv`, `Liv`, `Riv`, `FC(±)`,
//! `CP`, `FP`, `Inv`, `Idm`, `I3`, `Axis(name)`, `WMT`, `Fix(name)`, `Pin(basis,s,w,value)`,
//! `DS(i,α)`. Long names such as `Natural` or `Idempotent` are accepted too.
//!
//! Exit status: 0 on success, 1 on a mathematical failure (violated property, inconsistent
//! system, non-invertible operation, failed selftest), 2 on usage errors.

use std::io::Read;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fqx::calculus::{compose, invert};
use fqx::fqop::{builtin, evaluate_expression, parse_expression, parse_operation, serialize_operation};
use fqx::invariance::{check, parse_property_set};
use fqx::linsolve::{solve_operation, FiberStatus};
use fqx::{BasisTag, Builtin, Error, FQOperation, OperationKind, PropertySpec};

#[derive(Parser)]
#[command(name = "fqx", version, about = "Exact expansions of formal FQ operations")]
struct Cli {
    /// Worker threads for the solver (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(clap::Args, Clone, Copy)]
struct Expansion {
    /// Truncation order.
    #[arg(long, default_value_t = 2)]
    order: usize,
    /// split, mixed or circular.
    #[arg(long, default_value = "mixed")]
    basis: BasisTag,
}

#[derive(Subcommand)]
enum Verb {
    /// Expand closed-form component expressions in A1, A2.
    Expand {
        /// One expression per component, e.g. `1/2*[A1,A2]`.
        #[arg(required = true)]
        exprs: Vec<String>,
        #[arg(long)]
        kind: OperationKind,
        #[command(flatten)]
        at: Expansion,
    },
    /// Re-express an operation in another basis.
    Transform {
        op: String,
        /// Target basis.
        #[arg(long)]
        to: BasisTag,
        #[command(flatten)]
        at: Expansion,
    },
    /// Check each property of a set; prints the first failing row.
    Check {
        op: String,
        properties: String,
        #[command(flatten)]
        at: Expansion,
    },
    /// `outer ∘ inner`.
    Compose {
        outer: String,
        inner: String,
        #[command(flatten)]
        at: Expansion,
    },
    /// Inverse under composition.
    Invert {
        op: String,
        #[command(flatten)]
        at: Expansion,
    },
    /// Fiber-dimension table of a property set.
    Solve {
        properties: String,
        #[arg(long)]
        kind: OperationKind,
        /// Maximal expansion order.
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// Do not add naturality when it is missing from the set.
        #[arg(long)]
        general: bool,
        /// Print `r= j= d=` records instead of the table.
        #[arg(long)]
        records: bool,
    },
    /// Expand a builtin operation.
    Builtin {
        name: Builtin,
        #[command(flatten)]
        at: Expansion,
    },
    /// Run the worked examples with known answers.
    Selftest {
        /// Skip the examples that take seconds.
        #[arg(long)]
        quick: bool,
    },
}

enum Failure {
    Usage(String),
    Math(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::UnknownBuiltin(_) | Error::Kind(_) | Error::BasisMismatch(..) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Math(e.to_string()),
        }
    }
}

fn load(arg: &str, at: Expansion) -> Result<FQOperation, Failure> {
    let text = if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
        s
    } else if Path::new(arg).is_file() {
        std::fs::read_to_string(arg).map_err(|e| Failure::Usage(format!("{arg}: {e}")))?
    } else {
        let b: Builtin = arg.parse().map_err(|_| Failure::Usage(format!("`{arg}` is neither a file nor a builtin")))?;
        return Ok(builtin(b, at.order, at.basis)?);
    };
    parse_operation(&text).map_err(|e| Failure::Usage(format!("{arg}: {e}")))
}

fn properties(s: &str) -> Result<Vec<PropertySpec>, Failure> {
    let specs = parse_property_set(s)?;
    if specs.is_empty() {
        return Err(Failure::Usage("empty property set".into()));
    }
    Ok(specs)
}

fn run(verb: Verb) -> Result<(), Failure> {
    match verb {
        Verb::Expand { exprs, kind, at } => {
            let exprs = exprs.iter().map(|s| parse_expression(s)).collect::<Result<Vec<_>, _>>()?;
            if exprs.len() != kind.num_components() {
                return Err(Failure::Usage(format!("{kind} needs {} expressions", kind.num_components())));
            }
            print!("{}", serialize_operation(&evaluate_expression(&exprs, kind, at.basis, at.order)?));
        }
        Verb::Transform { op, to, at } => print!("{}", serialize_operation(&load(&op, at)?.transform(to))),
        Verb::Check { op, properties: p, at } => {
            let op = load(&op, at)?;
            let mut violated = false;
            for spec in properties(&p)? {
                let report = check(&op, &spec)?;
                violated |= !report.holds();
                println!("{spec}: {report}");
            }
            if violated {
                return Err(Failure::Math("property violated".into()));
            }
        }
        Verb::Compose { outer, inner, at } => {
            print!("{}", serialize_operation(&compose(&load(&outer, at)?, &load(&inner, at)?)?));
        }
        Verb::Invert { op, at } => print!("{}", serialize_operation(&invert(&load(&op, at)?)?)),
        Verb::Solve { properties: p, kind, order, general, records } => {
            let mut specs = properties(&p)?;
            if !general && !specs.contains(&PropertySpec::Natural) {
                specs.insert(0, PropertySpec::Natural);
            }
            let tags: Vec<String> = specs.iter().map(|s| s.to_string()).collect();
            println!("# {kind}, properties {}", tags.join("+"));
            let out = solve_operation(&specs, kind, order)?;
            if records {
                print!("{}", out.table.records());
            } else {
                print!("{}", out.table);
            }
            if let FiberStatus::Inconsistent { order } = out.table.status {
                return Err(Failure::Math(format!("inconsistent at order {order}")));
            }
        }
        Verb::Builtin { name, at } => print!("{}", serialize_operation(&builtin(name, at.order, at.basis)?)),
        Verb::Selftest { quick } => {
            let results = fqx::golden::run(!quick);
            let failed = results.iter().filter(|(_, r)| r.is_err()).count();
            for (name, r) in &results {
                match r {
                    Ok(()) => println!("ok   {name}"),
                    Err(m) => println!("FAIL {name}: {m}"),
                }
            }
            println!("{} passed, {failed} failed", results.len() - failed);
            if failed > 0 {
                return Err(Failure::Math(format!("{failed} example(s) failed")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("fqx: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.verb) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("fqx: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Math(m)) => {
            eprintln!("fqx: {m}");
            ExitCode::from(1)
        }
    }
}
