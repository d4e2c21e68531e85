use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use vtam::decide::{
    eliminate_negative_with, included_with, inclusion_counterexample, is_empty_with, member_with,
    memory_languages_with, universal_with, witness_with, Budget,
};
use vtam::encodings::EXAMPLES;
use vtam::model::DEFAULT_RUN_BUDGET;
use vtam::{
    build_example, complement, determinize, encode_3sat, enumerate_terms, intersection, load_vtam,
    parse_dimacs, parse_term, print_ta, print_vtam, union, EnumBudget, Error, Runner, Vtam,
};

/// Visibly tree automata with memory: checks, constructions and decisions.
///
/// Exit status: 0 and 1 answer yes/no questions; 2 invalid input,
/// 3 unsupported by the theory, 4 budget exceeded, 5 I/O or parse error.
#[derive(Parser)]
#[command(name = "vtam", version)]
struct Cli {
    /// Overrides the default search budgets (saturation steps, witness
    /// behaviors, run configurations, enumerated terms).
    #[arg(long, global = true, value_name = "N")]
    budget: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate an automaton.
    Check { file: PathBuf },
    /// Whether the automaton accepts a term.
    Member { file: PathBuf, term: String },
    /// Whether the language is empty.
    Empty {
        file: PathBuf,
        /// Print a minimal accepted term when nonempty.
        #[arg(long)]
        witness: bool,
    },
    /// Print a minimal accepted term (exit 1 when the language is empty).
    Witness { file: PathBuf },
    /// Determinize.
    Det {
        file: PathBuf,
        #[arg(short)]
        o: PathBuf,
    },
    /// Boolean operations.
    Bool {
        #[arg(long)]
        op: BoolOp,
        a: PathBuf,
        b: Option<PathBuf>,
        #[arg(short)]
        o: PathBuf,
    },
    /// Memory language of a state as a tree automaton.
    Memlang {
        file: PathBuf,
        state: String,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Accepted terms up to a size, one per line.
    Enum {
        file: PathBuf,
        #[arg(long)]
        max_size: usize,
    },
    /// Whether L(A) is included in L(B); prints a counterexample if not.
    Include { a: PathBuf, b: PathBuf },
    /// Whether every input term is accepted.
    Universal { file: PathBuf },
    /// Reduce a DIMACS 3-CNF to a membership instance.
    Sat3 {
        file: PathBuf,
        #[arg(short)]
        o: PathBuf,
    },
    /// Write a built-in example automaton.
    Example {
        name: String,
        #[arg(short)]
        o: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BoolOp {
    Union,
    Inter,
    Complement,
}

enum Failure {
    Invalid(String),
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Lib(e)
    }
}

impl Failure {
    fn status(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Io(_) => 5,
            Failure::Lib(e) => match e {
                Error::Invalid(_) | Error::Incompatible(_) | Error::Internal(_) => 2,
                Error::Unsupported(_) => 3,
                Error::Budget(_) => 4,
                Error::Syntax { .. }
                | Error::UnknownSymbol(_)
                | Error::Arity { .. }
                | Error::InvalidPosition(_)
                | Error::Signature(_) => 5,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Invalid(m) | Failure::Io(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Vtam, Failure> {
    load_vtam(&read(path)?).map_err(|e| match e {
        Error::Invalid(_) => Failure::Lib(e),
        e => Failure::Io(format!("{}: {e}", path.display())),
    })
}

fn out_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))
}

fn budget(n: Option<usize>) -> Budget {
    match n {
        Some(n) => Budget {
            saturation_steps: n,
            behaviors: n,
            ..Budget::default()
        },
        None => Budget::default(),
    }
}

fn run(cli: Cli) -> Outcome {
    let b = budget(cli.budget);
    match cli.cmd {
        Cmd::Check { file } => {
            load(&file)?;
            println!("valid");
            Ok(true)
        }
        Cmd::Member { file, term } => {
            let a = load(&file)?;
            let t = parse_term(&term, a.sigma.base())?;
            let yes = member_with(&a, &t, cli.budget.unwrap_or(DEFAULT_RUN_BUDGET))?;
            println!("{yes}");
            Ok(yes)
        }
        Cmd::Empty { file, witness } => {
            let a = load(&file)?;
            let empty = is_empty_with(&a, b)?;
            println!("{empty}");
            if !empty && witness {
                if let Some(w) = witness_with(&a, b)? {
                    println!("{w}");
                }
            }
            Ok(empty)
        }
        Cmd::Witness { file } => {
            let a = load(&file)?;
            match witness_with(&a, b)? {
                Some(w) => {
                    println!("{w}");
                    Ok(true)
                }
                None => Ok(false),
            }
        }
        Cmd::Det { file, o } => {
            let d = determinize(&load(&file)?)?;
            write(&o, &print_vtam(&d))?;
            println!("{}", d.states.len());
            Ok(true)
        }
        Cmd::Bool { op, a, b: other, o } => {
            let a = load(&a)?;
            let other = match (op, other) {
                (BoolOp::Complement, None) => None,
                (BoolOp::Complement, Some(_)) => {
                    return Err(Failure::Invalid("complement takes one automaton".into()))
                }
                (_, Some(p)) => Some(load(&p)?),
                (_, None) => {
                    return Err(Failure::Invalid("union and inter take two automata".into()))
                }
            };
            let r = match (op, other) {
                (BoolOp::Union, Some(c)) => union(&a, &c)?,
                (BoolOp::Inter, Some(c)) => intersection(&a, &c)?,
                _ => complement(&a)?,
            };
            write(&o, &print_vtam(&r))?;
            println!("{}", r.states.len());
            Ok(true)
        }
        Cmd::Memlang { file, state, o } => {
            let a = load(&file)?;
            let q = a
                .state_index(&state)
                .ok_or_else(|| Failure::Invalid(format!("unknown state `{state}`")))?;
            let m = memory_languages_with(&eliminate_negative_with(&a, b)?, b)?;
            let text = print_ta(&m.of(q));
            match o {
                Some(o) => {
                    write(&o, &text)?;
                    println!("{}", m.nonempty(q));
                }
                None => print!("{text}"),
            }
            Ok(true)
        }
        Cmd::Enum { file, max_size } => {
            let a = load(&file)?;
            let cap = EnumBudget {
                max_size,
                max_count: cli.budget.unwrap_or(usize::MAX),
            };
            let mut runner = Runner::new(&a);
            for t in enumerate_terms(a.sigma.base(), cap)? {
                if runner.accepts(&t)? {
                    println!("{t}");
                }
            }
            Ok(true)
        }
        Cmd::Include { a, b: other } => {
            let (a, c) = (load(&a)?, load(&other)?);
            if included_with(&a, &c, b)? {
                println!("true");
                return Ok(true);
            }
            println!("false");
            match inclusion_counterexample(&a, &c, b) {
                Ok(Some(t)) => println!("{t}"),
                Ok(None) => {}
                Err(e) => eprintln!("vtam: no counterexample printed: {e}"),
            }
            Ok(false)
        }
        Cmd::Universal { file } => {
            let yes = universal_with(&load(&file)?, b)?;
            println!("{yes}");
            Ok(yes)
        }
        Cmd::Sat3 { file, o } => {
            let cnf = parse_dimacs(&read(&file)?)
                .map_err(|e| Failure::Io(format!("{}: {e}", file.display())))?;
            let (t, a) = encode_3sat(&cnf)?;
            let stem = file.file_stem().and_then(|s| s.to_str()).unwrap_or("sat3");
            out_dir(&o)?;
            let (tp, ap) = (
                o.join(format!("{stem}.term")),
                o.join(format!("{stem}.vtam")),
            );
            write(&tp, &format!("{t}\n"))?;
            write(&ap, &print_vtam(&a))?;
            println!("{}", tp.display());
            println!("{}", ap.display());
            Ok(true)
        }
        Cmd::Example { name, o } => {
            if !EXAMPLES.contains(&name.as_str()) {
                return Err(Failure::Invalid(format!(
                    "unknown example `{name}`; expected one of {}",
                    EXAMPLES.join(", ")
                )));
            }
            let (a, tr) = build_example(&name)?;
            out_dir(&o)?;
            let (ap, wp) = (
                o.join(format!("{name}.vtam")),
                o.join(format!("{name}.shape.ta")),
            );
            write(&ap, &print_vtam(&a))?;
            write(&wp, &print_ta(tr.language_guard()))?;
            println!("{}", ap.display());
            println!("{}", wp.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("vtam: {}", f.message());
            ExitCode::from(f.status())
        }
    }
}
