//! Batch commands over formula and structure files.
//!
//! [`run`] parses arguments and returns what the binary prints, so the
//! whole command surface can be tested in-process.

use std::ffi::OsString;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use spatial_logic::{
    check_split_closure, classify, declared_signature, enumerate_forests, eval, lfp_to_sol,
    parse_formula_document, parse_signature, parse_structure, print_formula, print_structure,
    reduce_to_two_vars, selftest, sol_to_spatial, spatial_to_sol, EvalBudget, Finder, Formula,
    SearchBudget, SearchStatus, Vocabulary,
};

#[derive(Debug, Parser)]
#[command(
    name = "spatial-logic",
    version,
    about = "Evaluate, translate and search spatial-logic formulas"
)]
pub struct Cli {
    /// Limit on structures searched and on splits or extensions per evaluation.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    pub budget: u64,
    /// Worker threads for enumeration.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Signature file `(sig (P 1) …)` adding symbols to the vocabulary.
    #[arg(long, global = true)]
    pub vocab: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a formula on a structure.
    Eval {
        formula: PathBuf,
        structure: PathBuf,
    },
    /// Translate a formula into another fragment.
    Translate {
        formula: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Search for a model of size at most N.
    Solve {
        formula: PathBuf,
        #[arg(long)]
        max_size: usize,
    },
    /// Count the models of size N.
    Count {
        formula: PathBuf,
        #[arg(long)]
        size: usize,
    },
    /// Report syntactic measures of a formula.
    Classify { formula: PathBuf },
    /// Count forests of size N and check that splitting preserves them.
    Forests {
        #[arg(long)]
        size: usize,
    },
    /// Run the built-in correctness checks.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Sep2sol,
    Sol2sep,
    Lfp2sol,
    Twovar,
}

/// What a command prints and its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Output {
    fn ok(stdout: String, code: i32) -> Self {
        Output {
            stdout,
            stderr: String::new(),
            code,
        }
    }
}

/// Runs a command line. Exit codes: 0 success or `true`, 1 `false` or no
/// model, 2 errors and exhausted budgets.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Output::ok(text, 0)
            } else {
                Output {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    match execute(&cli) {
        Ok(out) => out,
        Err(e) => Output {
            stdout: String::new(),
            stderr: format!("error: {e:#}\n"),
            code: 2,
        },
    }
}

fn read(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .context("reading standard input")?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// A parsed formula file and the vocabulary its structures range over:
/// declared symbols plus the predicates it leaves free.
struct Loaded {
    formula: Formula,
    full: Vocabulary,
    structures: Vocabulary,
}

impl Cli {
    fn extra_vocab(&self) -> Result<Option<Vocabulary>> {
        match &self.vocab {
            None => Ok(None),
            Some(p) => Ok(Some(
                parse_signature(&read(p)?).with_context(|| format!("in {}", p.display()))?,
            )),
        }
    }

    fn load(&self, path: &Path) -> Result<Loaded> {
        let text = read(path)?;
        let extra = self.extra_vocab()?;
        let located = || format!("in {}", path.display());
        let (full, formula) =
            parse_formula_document(&text, extra.as_ref()).with_context(located)?;
        let mut declared = declared_signature(&text).with_context(located)?;
        if let Some(extra) = &extra {
            declared.merge(extra)?;
        }
        let free = formula.free_so_vars();
        let structures = full.restrict(|p| declared.contains(p) || free.contains(p));
        Ok(Loaded {
            formula,
            full,
            structures,
        })
    }

    fn finder(&self) -> Finder {
        Finder::new(
            SearchBudget {
                max_structures: self.budget,
                eval: EvalBudget::uniform(self.budget),
            },
            self.jobs,
        )
    }
}

fn execute(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Eval { formula, structure } => {
            let e = parse_structure(&read(structure)?)
                .with_context(|| format!("in {}", structure.display()))?;
            let text = read(formula)?;
            let (_, f) = parse_formula_document(&text, Some(e.vocab()))
                .with_context(|| format!("in {}", formula.display()))?;
            let holds = eval(&f, &e, cli.finder().budget.eval)?;
            Ok(Output::ok(format!("{holds}\n"), if holds { 0 } else { 1 }))
        }
        Command::Translate { formula, mode } => {
            let l = cli.load(formula)?;
            let out = match mode {
                Mode::Sep2sol => spatial_to_sol(&l.formula, &l.full),
                Mode::Sol2sep => sol_to_spatial(&l.formula, &l.full),
                Mode::Lfp2sol => lfp_to_sol(&l.formula, &l.full),
                Mode::Twovar => reduce_to_two_vars(&l.formula, &l.full),
            }?;
            Ok(Output::ok(format!("{}\n", print_formula(&out.formula)), 0))
        }
        Command::Solve { formula, max_size } => {
            let l = cli.load(formula)?;
            let r = cli.finder().sat(&l.formula, &l.structures, *max_size)?;
            Ok(match r.status {
                SearchStatus::Witness => {
                    let w = r.witness.as_ref().expect("witness");
                    Output::ok(format!("WITNESS\n{}\n", print_structure(w)), 0)
                }
                SearchStatus::Exhausted => Output::ok("EXHAUSTED\n".into(), 1),
                SearchStatus::Budget => Output {
                    stdout: "BUDGET\n".into(),
                    stderr: format!(
                        "error: budget exhausted after {} structures\n",
                        r.structures_checked
                    ),
                    code: 2,
                },
            })
        }
        Command::Count { formula, size } => {
            let l = cli.load(formula)?;
            let n = cli.finder().count(&l.formula, &l.structures, *size)?;
            Ok(Output::ok(format!("{n}\n"), 0))
        }
        Command::Classify { formula } => {
            let l = cli.load(formula)?;
            Ok(Output::ok(
                format!("{}\n", classify(&l.formula, &l.full)),
                0,
            ))
        }
        Command::Forests { size } => {
            let vocab = cli
                .extra_vocab()?
                .unwrap_or_else(|| Vocabulary::of(&[("E", 2)]).expect("default vocabulary"));
            let count = enumerate_forests(&vocab, *size)?.len();
            let report = check_split_closure(&vocab, *size)?;
            Ok(match report.counterexample {
                None => Output::ok(format!("forests {count}\nclosure OK\n"), 0),
                Some(v) => Output::ok(
                    format!(
                        "forests {count}\nclosure FAILED\n{}\n{}\n{}\n",
                        print_structure(&v.forest),
                        print_structure(&v.split.left),
                        print_structure(&v.split.right)
                    ),
                    1,
                ),
            })
        }
        Command::Selftest => {
            let reports = selftest::run_all(&cli.finder());
            let mut text = String::new();
            for r in &reports {
                text.push_str(&format!("{r}\n"));
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                text.push_str(&format!("{failed} of {} criteria failed\n", reports.len()));
            } else {
                text.push_str(&format!("all {} criteria passed\n", reports.len()));
            }
            Ok(Output::ok(text, if failed == 0 { 0 } else { 1 }))
        }
    }
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod guide {}
