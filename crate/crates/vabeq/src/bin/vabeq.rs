//! Command-line front end: file-driven, deterministic runs of the
//! reduction, construction, enumeration and growth pipeline.
//!
//! Exit codes: 0 success, 2 parse/config error, 3 invariant violation,
//! 4 enumeration cap saturated, 5 resource guard.

use clap::{Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use vabeq::edt0l::{self, Edt0lError, Edt0lSystem};
use vabeq::equations::{self, EquationError};
use vabeq::format;
use vabeq::group::GroupError;
use vabeq::growth::{self, FitStatus, FitWindows};

#[derive(Parser)]
#[command(name = "vabeq", version, about = "Equations in virtually abelian groups: solution languages and growth")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// Human-oriented summary.
    Text,
    /// Canonical structured text (re-parseable).
    #[default]
    Structured,
    /// Graphviz DOT (control graphs only).
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ClosureOp {
    Union,
    Concat,
    Star,
    Hom,
    Intersect,
}

#[derive(Subcommand)]
enum Command {
    /// Check a group specification file against the extension axioms.
    Validate {
        #[arg(long)]
        group: PathBuf,
    },
    /// Reduce a system to twisted and linear systems per coset tuple.
    Reduce {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solution tuples: brute force over the weight ball, or, with --box,
    /// mapped back from the coset reduction over a coordinate box.
    Solve {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        system: PathBuf,
        #[arg(long, conflicts_with = "box_bound")]
        max_weight: Option<u64>,
        #[arg(long = "box")]
        box_bound: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the EDT0L system accepting the solution language.
    BuildEdt0l {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        system: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Structured)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate solution words (from a stored system or group+system).
    Enumerate {
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long)]
        system: Option<PathBuf>,
        #[arg(long)]
        edt0l: Option<PathBuf>,
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        #[arg(long, default_value_t = 200)]
        max_steps: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Structured)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relative growth of the solution set (or language growth of a stored system).
    Growth {
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long)]
        system: Option<PathBuf>,
        #[arg(long)]
        edt0l: Option<PathBuf>,
        #[arg(long, default_value_t = 24)]
        max_weight: u64,
        #[arg(long, default_value_t = 400)]
        max_steps: usize,
        #[arg(long)]
        fit_len: Option<usize>,
        #[arg(long)]
        verify_len: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Multivariate weight table of the solution set.
    Mgrowth {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value_t = 12)]
        max_weight: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a closure operation to stored EDT0L systems.
    Closure {
        #[arg(long, value_enum)]
        op: ClosureOp,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: Option<PathBuf>,
        /// Homomorphism, e.g. "a => x x ; b =>".
        #[arg(long)]
        map: Option<String>,
        /// Target terminal letters for `hom`, space separated.
        #[arg(long)]
        targets: Option<String>,
        /// Word automaton file for `intersect`.
        #[arg(long)]
        automaton: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Structured)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum AppError {
    Config(String),
    Invariant(String),
    CapSaturated,
    Resource(String),
    Io(String),
}

impl AppError {
    fn code(&self) -> u8 {
        match self {
            AppError::Config(_) => 2,
            AppError::Invariant(_) => 3,
            AppError::CapSaturated => 4,
            AppError::Resource(_) => 5,
            AppError::Io(_) => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            AppError::Config(m) | AppError::Invariant(m) | AppError::Resource(m) | AppError::Io(m) => m.clone(),
            AppError::CapSaturated => "enumeration cap saturated; raise --max-steps or lower the bound".to_string(),
        }
    }
}

impl From<format::FormatError> for AppError {
    fn from(e: format::FormatError) -> Self {
        match e {
            format::FormatError::Parse { .. } | format::FormatError::BadHeader { .. } => {
                AppError::Config(e.to_string())
            }
            _ => AppError::Invariant(e.to_string()),
        }
    }
}

impl From<GroupError> for AppError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::BallResourceLimit { .. } => AppError::Resource(e.to_string()),
            _ => AppError::Invariant(e.to_string()),
        }
    }
}

impl From<EquationError> for AppError {
    fn from(e: EquationError) -> Self {
        match e {
            EquationError::Group(g) => g.into(),
            _ => AppError::Invariant(e.to_string()),
        }
    }
}

impl From<Edt0lError> for AppError {
    fn from(e: Edt0lError) -> Self {
        match e {
            Edt0lError::StateLimit { .. }
            | Edt0lError::TooManySectors { .. }
            | Edt0lError::TooManyHashSites { .. } => AppError::Resource(e.to_string()),
            Edt0lError::Group(g) => g.into(),
            _ => AppError::Invariant(e.to_string()),
        }
    }
}

impl From<growth::GrowthError> for AppError {
    fn from(e: growth::GrowthError) -> Self {
        AppError::Config(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, AppError> {
    std::fs::read_to_string(path)
        .map_err(|e| AppError::Io(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), AppError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| AppError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn load_group(path: &Path) -> Result<format::GroupFile, AppError> {
    Ok(format::parse_group(&read(path)?)?)
}

fn load_system(path: &Path) -> Result<equations::GroupEquationSystem, AppError> {
    Ok(format::parse_system(&read(path)?)?)
}

fn load_edt0l(path: &Path) -> Result<Edt0lSystem, AppError> {
    Ok(format::parse_edt0l(&read(path)?)?)
}

fn build_group_system(
    group: &Path,
    system: &Path,
) -> Result<(format::GroupFile, equations::GroupEquationSystem, Edt0lSystem), AppError> {
    let group_file = load_group(group)?;
    let system_data = load_system(system)?;
    let decomposition = equations::reduce_to_twisted(&system_data, &group_file.spec)?;
    let built = edt0l::assemble_group_solution_language(&decomposition, &group_file.spec)?;
    Ok((group_file, system_data, built))
}

fn parse_hom_map(map: &str) -> Result<BTreeMap<String, Vec<String>>, AppError> {
    let mut out = BTreeMap::new();
    for entry in map.split(';') {
        let entry = entry.trim();
        if entry.is_empty() {
            continue;
        }
        let (from, to) = entry
            .split_once("=>")
            .ok_or_else(|| AppError::Config(format!("bad map entry {entry:?}: expected `from => image`")))?;
        let from = from.trim().to_string();
        let image: Vec<String> = to.split_whitespace().map(str::to_string).collect();
        out.insert(from, image);
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Validate { group } => {
            let file = load_group(&group)?;
            println!(
                "ok: rank {} extension with {} cosets, {} generators",
                file.spec.rank(),
                file.spec.coset_count(),
                file.generators.elements.len()
            );
            Ok(())
        }
        Command::Reduce { group, system, out } => {
            let file = load_group(&group)?;
            let system = load_system(&system)?;
            let decomposition = equations::reduce_to_twisted(&system, &file.spec)?;
            emit(&out, &format::write_reduction(&decomposition))
        }
        Command::Solve { group, system, max_weight, box_bound, out } => {
            let file = load_group(&group)?;
            let system = load_system(&system)?;
            let solutions = match (max_weight, box_bound) {
                (_, Some(bound)) => {
                    let decomposition = equations::reduce_to_twisted(&system, &file.spec)?;
                    decomposition.group_solutions_in_box(bound)
                }
                (weight, None) => equations::brute_force_group_solutions(
                    &system,
                    &file.spec,
                    &file.generators,
                    weight.unwrap_or(6),
                )?,
            };
            emit(&out, &format::write_solutions(&solutions))
        }
        Command::BuildEdt0l { group, system, format: fmt, out } => {
            let (_, _, built) = build_group_system(&group, &system)?;
            let content = match fmt {
                OutputFormat::Dot => format::control_dot(&built),
                OutputFormat::Structured => format::write_edt0l(&built),
                OutputFormat::Text => format!(
                    "edt0l system: {} letters ({} terminal), {} states, {} endomorphisms, {} edges\n",
                    built.alphabet.len(),
                    built.terminals.len(),
                    built.control.states,
                    built.endos.len(),
                    built.control.edges.len()
                ),
            };
            emit(&out, &content)
        }
        Command::Enumerate { group, system, edt0l, max_len, max_steps, format: fmt, out } => {
            let built = match (&edt0l, &group, &system) {
                (Some(path), None, None) => load_edt0l(path)?,
                (None, Some(g), Some(s)) => build_group_system(g, s)?.2,
                _ => {
                    return Err(AppError::Config(
                        "pass either --edt0l or both --group and --system".into(),
                    ))
                }
            };
            let enumeration = built.enumerate(max_len, max_steps);
            let content = match fmt {
                OutputFormat::Text => {
                    let mut s = String::new();
                    for word in &enumeration.words {
                        s.push_str(&built.display_word(word));
                        s.push('\n');
                    }
                    s
                }
                _ => format::write_words(&built, &enumeration.words, !enumeration.saturated),
            };
            emit(&out, &content)?;
            if enumeration.saturated {
                return Err(AppError::CapSaturated);
            }
            Ok(())
        }
        Command::Growth { group, system, edt0l, max_weight, max_steps, fit_len, verify_len, out } => {
            let windows = match (fit_len, verify_len) {
                (Some(f), Some(v)) => Some(FitWindows { fit_len: f, verify_len: v }),
                (Some(f), None) => Some(FitWindows {
                    fit_len: f,
                    verify_len: (max_weight as usize + 1).saturating_sub(f),
                }),
                (None, Some(_)) => {
                    return Err(AppError::Config("--verify-len requires --fit-len".into()))
                }
                (None, None) => None,
            };
            let report = match (&edt0l, &group, &system) {
                (Some(path), None, None) => {
                    let built = load_edt0l(path)?;
                    growth::language_growth(&built, &BTreeMap::new(), max_weight, max_steps, windows)?
                }
                (None, Some(g), Some(s)) => {
                    let file = load_group(g)?;
                    let system = load_system(s)?;
                    let solutions = equations::brute_force_group_solutions(
                        &system,
                        &file.spec,
                        &file.generators,
                        max_weight,
                    )?;
                    let ball = file.spec.ball(&file.generators, max_weight)?;
                    growth::relative_growth(&solutions, &ball, max_weight, windows)?
                }
                _ => {
                    return Err(AppError::Config(
                        "pass either --edt0l or both --group and --system".into(),
                    ))
                }
            };
            emit(&out, &format::write_growth(&report))?;
            if report.status == FitStatus::CapSaturated {
                return Err(AppError::CapSaturated);
            }
            Ok(())
        }
        Command::Mgrowth { group, system, max_weight, out } => {
            let file = load_group(&group)?;
            let system = load_system(&system)?;
            let solutions = equations::brute_force_group_solutions(
                &system,
                &file.spec,
                &file.generators,
                max_weight,
            )?;
            let ball = file.spec.ball(&file.generators, max_weight)?;
            let table = growth::multivariate_growth(&solutions, &ball, max_weight);
            emit(&out, &format::write_mgrowth(&table))
        }
        Command::Closure { op, left, right, map, targets, automaton, format: fmt, out } => {
            let lhs = load_edt0l(&left)?;
            let result = match op {
                ClosureOp::Union => {
                    let rhs = load_edt0l(right.as_ref().ok_or_else(|| {
                        AppError::Config("union needs --right".into())
                    })?)?;
                    edt0l::union(&lhs, &rhs)
                }
                ClosureOp::Concat => {
                    let rhs = load_edt0l(right.as_ref().ok_or_else(|| {
                        AppError::Config("concat needs --right".into())
                    })?)?;
                    edt0l::concat(&lhs, &rhs)
                }
                ClosureOp::Star => edt0l::star(&lhs),
                ClosureOp::Hom => {
                    let map = parse_hom_map(&map.ok_or_else(|| {
                        AppError::Config("hom needs --map".into())
                    })?)?;
                    let targets: Vec<String> = targets
                        .ok_or_else(|| AppError::Config("hom needs --targets".into()))?
                        .split_whitespace()
                        .map(str::to_string)
                        .collect();
                    edt0l::hom_image(&lhs, &map, &targets)?
                }
                ClosureOp::Intersect => {
                    let automaton_path = automaton.as_ref().ok_or_else(|| {
                        AppError::Config("intersect needs --automaton".into())
                    })?;
                    let automaton = format::parse_automaton(&read(automaton_path)?)?;
                    edt0l::intersect_regular(&lhs, &automaton)?
                }
            };
            let content = match fmt {
                OutputFormat::Dot => format::control_dot(&result),
                _ => format::write_edt0l(&result),
            };
            emit(&out, &content)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
