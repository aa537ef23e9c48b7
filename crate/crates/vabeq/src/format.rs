//! Structured text formats for groups, equation systems, EDT0L dumps, word
//! automata, solution lists, growth reports, multivariate tables, and
//! reductions, plus DOT export for control graphs.
//!
//! Every format starts with a `vabeq <kind> v1` header line. Writers emit a
//! canonical form and parsers accept exactly the documented grammar, so
//! write-parse round trips are bit-exact.

use crate::edt0l::{
    Alphabet, ControlAutomaton, Edt0lSystem, Endomorphism, Letter, MultiTapeAutomaton,
    WordAutomaton,
};
use crate::equations::{
    CosetCase, CosetDecomposition, EquationItem, GroupEquation, GroupEquationSystem, LinearSystem,
    TwistedEquation, TwistedSystem,
};
use crate::group::{GroupElement, GroupSpec, WeightedGeneratingSet};
use crate::growth::{FitStatus, GrowthReport, MultivariateTable};
use crate::matrix::IntMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("expected header {expected:?}")]
    BadHeader { expected: String },
    #[error("group data invalid: {0}")]
    Group(#[from] crate::group::GroupError),
    #[error("system data invalid: {0}")]
    Equations(#[from] crate::equations::EquationError),
    #[error("matrix data invalid: {0}")]
    Matrix(#[from] crate::matrix::MatrixError),
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse { line, message: message.into() }
}

/// Line cursor with 1-based positions for error reporting.
struct Lines<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines { lines: text.lines().collect(), pos: 0 }
    }

    fn line_no(&self) -> usize {
        self.pos
    }

    fn peek(&self) -> Option<&'a str> {
        self.lines[self.pos..].iter().find(|l| !l.trim().is_empty()).copied()
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        while self.pos < self.lines.len() {
            let line = self.lines[self.pos];
            self.pos += 1;
            if !line.trim().is_empty() {
                return Some((self.pos, line.trim()));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), FormatError> {
        self.next().ok_or_else(|| err(self.pos + 1, format!("expected {what}, found end of input")))
    }

    fn expect_header(&mut self, kind: &str) -> Result<(), FormatError> {
        let (no, line) = self.expect("header")?;
        let expected = format!("vabeq {kind} v1");
        if line != expected {
            return Err(err(no, format!("expected header {expected:?}, found {line:?}")));
        }
        Ok(())
    }
}

fn parse_usize(no: usize, token: &str) -> Result<usize, FormatError> {
    token.parse().map_err(|_| err(no, format!("expected a count, found {token:?}")))
}

fn parse_u64(no: usize, token: &str) -> Result<u64, FormatError> {
    token.parse().map_err(|_| err(no, format!("expected a number, found {token:?}")))
}

fn parse_int(no: usize, token: &str) -> Result<BigInt, FormatError> {
    BigInt::from_str(token).map_err(|_| err(no, format!("expected an integer, found {token:?}")))
}

fn parse_ints(no: usize, tokens: &[&str]) -> Result<Vec<BigInt>, FormatError> {
    tokens.iter().map(|t| parse_int(no, t)).collect()
}

fn join_ints(v: &[BigInt]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn check_name(no: usize, name: &str) -> Result<(), FormatError> {
    if name.is_empty() || name.chars().any(char::is_whitespace) {
        return Err(err(no, format!("name {name:?} must be nonempty without whitespace")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Group specification files

/// Parsed group file: extension data plus the weighted generating set.
#[derive(Debug)]
pub struct GroupFile {
    pub spec: GroupSpec,
    pub generators: WeightedGeneratingSet,
}

pub fn write_group(spec: &GroupSpec, generators: &WeightedGeneratingSet) -> String {
    let mut out = String::new();
    let k = spec.rank();
    let d = spec.coset_count();
    writeln!(out, "vabeq group v1").unwrap();
    writeln!(out, "rank {k}").unwrap();
    writeln!(out, "cosets {d}").unwrap();
    for i in 0..d {
        writeln!(out, "label {i} {}", spec.label(i)).unwrap();
    }
    for i in 0..d {
        writeln!(out, "action {i}").unwrap();
        for r in 0..k {
            let row: Vec<String> = (0..k).map(|c| spec.action(i)[(r, c)].to_string()).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
    }
    for i in 0..d {
        for j in 0..d {
            writeln!(
                out,
                "cocycle {i} {j} sigma {} vec {}",
                spec.cocycle_index(i, j),
                join_ints(spec.cocycle_vector(i, j))
            )
            .unwrap();
        }
    }
    for ((name, g), &w) in
        generators.names.iter().zip(&generators.elements).zip(&generators.weights)
    {
        writeln!(out, "gen {name} coset {} vec {} weight {w}", g.coset, join_ints(&g.vector))
            .unwrap();
    }
    out
}

pub fn parse_group(text: &str) -> Result<GroupFile, FormatError> {
    let mut lines = Lines::new(text);
    lines.expect_header("group")?;

    let (no, line) = lines.expect("rank")?;
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 2 || toks[0] != "rank" {
        return Err(err(no, "expected `rank <k>`"));
    }
    let rank = parse_usize(no, toks[1])?;

    let (no, line) = lines.expect("cosets")?;
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 2 || toks[0] != "cosets" {
        return Err(err(no, "expected `cosets <d>`"));
    }
    let cosets = parse_usize(no, toks[1])?;
    if cosets == 0 {
        return Err(err(no, "coset count must be positive"));
    }

    let mut labels = Vec::with_capacity(cosets);
    for i in 0..cosets {
        let (no, line) = lines.expect("label")?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 || toks[0] != "label" || parse_usize(no, toks[1])? != i {
            return Err(err(no, format!("expected `label {i} <name>`")));
        }
        check_name(no, toks[2])?;
        labels.push(toks[2].to_string());
    }

    let mut action = Vec::with_capacity(cosets);
    for i in 0..cosets {
        let (no, line) = lines.expect("action")?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 || toks[0] != "action" || parse_usize(no, toks[1])? != i {
            return Err(err(no, format!("expected `action {i}`")));
        }
        let mut entries = Vec::with_capacity(rank * rank);
        for _ in 0..rank {
            let (no, line) = lines.expect("matrix row")?;
            let row: Vec<&str> = line.split_whitespace().collect();
            if row.len() != rank {
                return Err(err(no, format!("expected {rank} entries")));
            }
            entries.extend(parse_ints(no, &row)?);
        }
        action.push(IntMatrix::new(rank, rank, entries)?);
    }

    let mut cocycle_vectors = vec![vec![Vec::new(); cosets]; cosets];
    let mut cocycle_indices = vec![vec![0usize; cosets]; cosets];
    for i in 0..cosets {
        for j in 0..cosets {
            let (no, line) = lines.expect("cocycle")?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 6 + rank
                || toks[0] != "cocycle"
                || parse_usize(no, toks[1])? != i
                || parse_usize(no, toks[2])? != j
                || toks[3] != "sigma"
                || toks[5] != "vec"
            {
                return Err(err(no, format!("expected `cocycle {i} {j} sigma <s> vec <{rank} ints>`")));
            }
            cocycle_indices[i][j] = parse_usize(no, toks[4])?;
            cocycle_vectors[i][j] = parse_ints(no, &toks[6..])?;
        }
    }

    let mut names = Vec::new();
    let mut elements = Vec::new();
    let mut weights = Vec::new();
    while let Some((no, line)) = lines.next() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 7 + rank || toks[0] != "gen" || toks[2] != "coset" || toks[4] != "vec" {
            return Err(err(no, format!("expected `gen <name> coset <i> vec <{rank} ints> weight <w>`")));
        }
        check_name(no, toks[1])?;
        names.push(toks[1].to_string());
        let coset = parse_usize(no, toks[3])?;
        let vector = parse_ints(no, &toks[5..5 + rank])?;
        if toks[5 + rank] != "weight" {
            return Err(err(no, "expected `weight <w>`"));
        }
        weights.push(parse_u64(no, toks[6 + rank])?);
        elements.push(GroupElement::new(vector, coset));
    }

    let spec = GroupSpec::new(rank, labels, action, cocycle_vectors, cocycle_indices)?;
    let generators = WeightedGeneratingSet::new(names, elements, weights)?;
    generators.check(&spec)?;
    Ok(GroupFile { spec, generators })
}

// ---------------------------------------------------------------------------
// Equation system files

fn write_constant(g: &GroupElement) -> String {
    format!("[{}; {}]", join_ints(&g.vector), g.coset)
}

pub fn write_system(system: &GroupEquationSystem) -> String {
    let mut out = String::new();
    writeln!(out, "vabeq system v1").unwrap();
    writeln!(out, "variables {}", system.variables).unwrap();
    for eq in &system.equations {
        let mut tokens = Vec::with_capacity(eq.items.len());
        for item in &eq.items {
            match item {
                EquationItem::Variable { index, inverse } => {
                    let mut t = format!("X{}", index + 1);
                    if *inverse {
                        t.push_str("^-1");
                    }
                    tokens.push(t);
                }
                EquationItem::Constant(g) => tokens.push(write_constant(g)),
            }
        }
        writeln!(out, "eq {}", tokens.join(" ")).unwrap();
    }
    out
}

/// Split an equation line into tokens, keeping `[...]` groups whole.
fn equation_tokens(no: usize, line: &str) -> Result<Vec<String>, FormatError> {
    let mut tokens = Vec::new();
    let mut rest = line.trim();
    while !rest.is_empty() {
        if let Some(stripped) = rest.strip_prefix('[') {
            let close = stripped
                .find(']')
                .ok_or_else(|| err(no, "unterminated constant token"))?;
            tokens.push(format!("[{}]", &stripped[..close]));
            rest = stripped[close + 1..].trim_start();
        } else {
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            tokens.push(rest[..end].to_string());
            rest = rest[end..].trim_start();
        }
    }
    Ok(tokens)
}

fn parse_equation_item(no: usize, token: &str, variables: usize) -> Result<EquationItem, FormatError> {
    if let Some(inner) = token.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
        let (vec_part, coset_part) = inner
            .split_once(';')
            .ok_or_else(|| err(no, format!("constant {token:?} must be `[v1 .. vk; coset]`")))?;
        let vector_tokens: Vec<&str> = vec_part.split_whitespace().collect();
        let vector = parse_ints(no, &vector_tokens)?;
        let coset = parse_usize(no, coset_part.trim())?;
        return Ok(EquationItem::Constant(GroupElement::new(vector, coset)));
    }
    let body = token
        .strip_prefix('X')
        .ok_or_else(|| err(no, format!("unknown token {token:?}")))?;
    let (index_part, inverse) = match body.strip_suffix("^-1") {
        Some(head) => (head, true),
        None => (body, false),
    };
    let index = parse_usize(no, index_part)?;
    if index == 0 || index > variables {
        return Err(err(no, format!("variable X{index} out of range 1..={variables}")));
    }
    Ok(EquationItem::Variable { index: index - 1, inverse })
}

pub fn parse_system(text: &str) -> Result<GroupEquationSystem, FormatError> {
    let mut lines = Lines::new(text);
    lines.expect_header("system")?;
    let (no, line) = lines.expect("variables")?;
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 2 || toks[0] != "variables" {
        return Err(err(no, "expected `variables <n>`"));
    }
    let variables = parse_usize(no, toks[1])?;
    let mut equations = Vec::new();
    while let Some((no, line)) = lines.next() {
        let body = line
            .strip_prefix("eq")
            .ok_or_else(|| err(no, format!("expected `eq ...`, found {line:?}")))?;
        let items = equation_tokens(no, body)?
            .iter()
            .map(|t| parse_equation_item(no, t, variables))
            .collect::<Result<Vec<_>, _>>()?;
        equations.push(GroupEquation { items });
    }
    Ok(GroupEquationSystem::new(variables, equations)?)
}

// ---------------------------------------------------------------------------
// EDT0L system dumps

pub fn write_edt0l(system: &Edt0lSystem) -> String {
    let mut out = String::new();
    writeln!(out, "vabeq edt0l v1").unwrap();
    writeln!(out, "letters {}", system.alphabet.len()).unwrap();
    for (id, name) in system.alphabet.names().iter().enumerate() {
        writeln!(out, "letter {id} {name}").unwrap();
    }
    let terminals: Vec<String> = system.terminals.iter().map(|t| t.to_string()).collect();
    writeln!(out, "terminals {}", terminals.join(" ")).unwrap();
    let start: Vec<String> = system.start_word.iter().map(|c| c.to_string()).collect();
    writeln!(out, "start {}", start.join(" ")).unwrap();
    writeln!(out, "states {}", system.control.states).unwrap();
    writeln!(out, "init {}", system.control.start).unwrap();
    let accepts: Vec<String> = system.control.accepts.iter().map(|s| s.to_string()).collect();
    writeln!(out, "accept {}", accepts.join(" ")).unwrap();
    writeln!(out, "endos {}", system.endos.len()).unwrap();
    for (id, endo) in system.endos.iter().enumerate() {
        writeln!(out, "endo {id}").unwrap();
        for (letter, image) in &endo.map {
            let image: Vec<String> = image.iter().map(|c| c.to_string()).collect();
            writeln!(out, "map {letter} = {}", image.join(" ")).unwrap();
        }
    }
    let mut edges = system.control.edges.clone();
    edges.sort_unstable();
    for (from, endo, to) in edges {
        writeln!(out, "edge {from} {endo} {to}").unwrap();
    }
    out
}

pub fn parse_edt0l(text: &str) -> Result<Edt0lSystem, FormatError> {
    let mut lines = Lines::new(text);
    lines.expect_header("edt0l")?;

    let (no, line) = lines.expect("letters")?;
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 2 || toks[0] != "letters" {
        return Err(err(no, "expected `letters <count>`"));
    }
    let count = parse_usize(no, toks[1])?;
    let mut alphabet = Alphabet::new();
    for id in 0..count {
        let (no, line) = lines.expect("letter")?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 || toks[0] != "letter" || parse_usize(no, toks[1])? != id {
            return Err(err(no, format!("expected `letter {id} <name>`")));
        }
        check_name(no, toks[2])?;
        let interned = alphabet.intern(toks[2]);
        if interned as usize != id {
            return Err(err(no, format!("duplicate letter name {:?}", toks[2])));
        }
    }
    let parse_letter = |no: usize, t: &str| -> Result<Letter, FormatError> {
        let id = parse_usize(no, t)?;
        if id >= count {
            return Err(err(no, format!("letter id {id} out of range")));
        }
        Ok(id as Letter)
    };

    let (no, line) = lines.expect("terminals")?;
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.is_empty() || toks[0] != "terminals" {
        return Err(err(no, "expected `terminals <ids>`"));
    }
    let terminals: BTreeSet<Letter> =
        toks[1..].iter().map(|t| parse_letter(no, t)).collect::<Result<_, _>>()?;

    let (no, line) = lines.expect("start")?;
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.is_empty() || toks[0] != "start" {
        return Err(err(no, "expected `start <ids>`"));
    }
    let start_word: Vec<Letter> =
        toks[1..].iter().map(|t| parse_letter(no, t)).collect::<Result<_, _>>()?;

    let (no, line) = lines.expect("states")?;
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 2 || toks[0] != "states" {
        return Err(err(no, "expected `states <count>`"));
    }
    let states = parse_usize(no, toks[1])?;

    let (no, line) = lines.expect("init")?;
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 2 || toks[0] != "init" {
        return Err(err(no, "expected `init <state>`"));
    }
    let start = parse_usize(no, toks[1])?;

    let (no, line) = lines.expect("accept")?;
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.is_empty() || toks[0] != "accept" {
        return Err(err(no, "expected `accept <states>`"));
    }
    let accepts: BTreeSet<usize> =
        toks[1..].iter().map(|t| parse_usize(no, t)).collect::<Result<_, _>>()?;

    let (no, line) = lines.expect("endos")?;
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 2 || toks[0] != "endos" {
        return Err(err(no, "expected `endos <count>`"));
    }
    let endo_count = parse_usize(no, toks[1])?;
    let mut endos: Vec<Endomorphism> = Vec::with_capacity(endo_count);
    for id in 0..endo_count {
        let (no, line) = lines.expect("endo")?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 || toks[0] != "endo" || parse_usize(no, toks[1])? != id {
            return Err(err(no, format!("expected `endo {id}`")));
        }
        let mut endo = Endomorphism::identity();
        while let Some(next) = lines.peek() {
            if !next.trim().starts_with("map ") {
                break;
            }
            let (no, line) = lines.expect("map")?;
            let (head, image_part) = line
                .split_once('=')
                .ok_or_else(|| err(no, "expected `map <letter> = <ids>`"))?;
            let head_toks: Vec<&str> = head.split_whitespace().collect();
            if head_toks.len() != 2 || head_toks[0] != "map" {
                return Err(err(no, "expected `map <letter> = <ids>`"));
            }
            let letter = parse_letter(no, head_toks[1])?;
            let image: Vec<Letter> = image_part
                .split_whitespace()
                .map(|t| parse_letter(no, t))
                .collect::<Result<_, _>>()?;
            endo.map.insert(letter, image);
        }
        endos.push(endo);
    }

    let mut edges = Vec::new();
    while let Some((no, line)) = lines.next() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 4 || toks[0] != "edge" {
            return Err(err(no, format!("expected `edge <from> <endo> <to>`, found {line:?}")));
        }
        edges.push((
            parse_usize(no, toks[1])?,
            parse_usize(no, toks[2])?,
            parse_usize(no, toks[3])?,
        ));
    }

    let system = Edt0lSystem {
        alphabet,
        terminals,
        start_word,
        endos,
        control: ControlAutomaton { states, start, accepts, edges },
    };
    system
        .validate()
        .map_err(|e| err(0, format!("invalid system: {e}")))?;
    Ok(system)
}

// ---------------------------------------------------------------------------
// Word automaton files

pub fn write_automaton(automaton: &WordAutomaton) -> String {
    let mut out = String::new();
    writeln!(out, "vabeq automaton v1").unwrap();
    writeln!(out, "states {}", automaton.states).unwrap();
    writeln!(out, "start {}", automaton.start).unwrap();
    writeln!(out, "accept {}", automaton.accept).unwrap();
    let mut edges = automaton.edges.clone();
    edges.sort();
    for (from, letter, to) in edges {
        writeln!(out, "edge {from} {letter} {to}").unwrap();
    }
    out
}

pub fn parse_automaton(text: &str) -> Result<WordAutomaton, FormatError> {
    let mut lines = Lines::new(text);
    lines.expect_header("automaton")?;
    let mut field = |name: &str| -> Result<usize, FormatError> {
        let (no, line) = lines.expect(name)?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 || toks[0] != name {
            return Err(err(no, format!("expected `{name} <value>`")));
        }
        parse_usize(no, toks[1])
    };
    let states = field("states")?;
    let start = field("start")?;
    let accept = field("accept")?;
    let mut edges = Vec::new();
    while let Some((no, line)) = lines.next() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 4 || toks[0] != "edge" {
            return Err(err(no, format!("expected `edge <from> <letter> <to>`, found {line:?}")));
        }
        edges.push((parse_usize(no, toks[1])?, toks[2].to_string(), parse_usize(no, toks[3])?));
    }
    Ok(WordAutomaton { states, start, accept, edges })
}

// ---------------------------------------------------------------------------
// Solution lists, word lists

pub fn write_solutions(solutions: &[Vec<GroupElement>]) -> String {
    let mut out = String::new();
    writeln!(out, "vabeq solutions v1").unwrap();
    writeln!(out, "count {}", solutions.len()).unwrap();
    for tuple in solutions {
        let parts: Vec<String> = tuple.iter().map(write_constant).collect();
        writeln!(out, "sol {}", parts.join(" ")).unwrap();
    }
    out
}

pub fn parse_solutions(text: &str) -> Result<Vec<Vec<GroupElement>>, FormatError> {
    let mut lines = Lines::new(text);
    lines.expect_header("solutions")?;
    let (no, line) = lines.expect("count")?;
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 2 || toks[0] != "count" {
        return Err(err(no, "expected `count <n>`"));
    }
    let count = parse_usize(no, toks[1])?;
    let mut out = Vec::with_capacity(count);
    while let Some((no, line)) = lines.next() {
        let body = line
            .strip_prefix("sol")
            .ok_or_else(|| err(no, format!("expected `sol ...`, found {line:?}")))?;
        let mut tuple = Vec::new();
        for token in equation_tokens(no, body)? {
            match parse_equation_item(no, &token, 0)? {
                EquationItem::Constant(g) => tuple.push(g),
                _ => return Err(err(no, "solution entries must be constants")),
            }
        }
        out.push(tuple);
    }
    if out.len() != count {
        return Err(err(lines.line_no(), format!("expected {count} solutions, found {}", out.len())));
    }
    Ok(out)
}

pub fn write_words(system: &Edt0lSystem, words: &BTreeSet<Vec<Letter>>, complete: bool) -> String {
    let mut out = String::new();
    writeln!(out, "vabeq words v1").unwrap();
    writeln!(out, "complete {complete}").unwrap();
    writeln!(out, "count {}", words.len()).unwrap();
    for word in words {
        let names: Vec<&str> = word.iter().map(|&c| system.alphabet.name(c)).collect();
        writeln!(out, "word {}", names.join(" ")).unwrap();
    }
    out
}

// ---------------------------------------------------------------------------
// Growth reports and multivariate tables

pub fn write_growth(report: &GrowthReport) -> String {
    let mut out = String::new();
    writeln!(out, "vabeq growth v1").unwrap();
    writeln!(out, "status {}", report.status.as_str()).unwrap();
    writeln!(out, "fit_len {}", report.fit_len).unwrap();
    writeln!(out, "verify_len {}", report.verify_len).unwrap();
    writeln!(out, "coefficients {}", join_ints(&report.coefficients)).unwrap();
    match &report.recurrence {
        Some(rec) => {
            let parts: Vec<String> = rec
                .iter()
                .map(|r| {
                    if r.denom().is_one() {
                        r.numer().to_string()
                    } else {
                        format!("{}/{}", r.numer(), r.denom())
                    }
                })
                .collect();
            writeln!(out, "recurrence {}", parts.join(" ")).unwrap();
        }
        None => writeln!(out, "recurrence none").unwrap(),
    }
    writeln!(out, "numerator {}", join_ints(&report.numerator)).unwrap();
    writeln!(out, "denominator {}", join_ints(&report.denominator)).unwrap();
    out
}

pub fn parse_growth(text: &str) -> Result<GrowthReport, FormatError> {
    let mut lines = Lines::new(text);
    lines.expect_header("growth")?;
    let mut take = |name: &str| -> Result<(usize, Vec<String>), FormatError> {
        let (no, line) = lines.expect(name)?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() || toks[0] != name {
            return Err(err(no, format!("expected `{name} ...`")));
        }
        Ok((no, toks[1..].iter().map(|t| t.to_string()).collect()))
    };
    let (no, status) = take("status")?;
    let status = match status.first().map(String::as_str) {
        Some("verified") => FitStatus::Verified,
        Some("no-recurrence-at-order") => FitStatus::NoRecurrenceAtOrder,
        Some("cap-saturated") => FitStatus::CapSaturated,
        other => return Err(err(no, format!("unknown status {other:?}"))),
    };
    let (no, fit) = take("fit_len")?;
    let fit_len = parse_usize(no, fit.first().map(String::as_str).unwrap_or(""))?;
    let (no, verify) = take("verify_len")?;
    let verify_len = parse_usize(no, verify.first().map(String::as_str).unwrap_or(""))?;
    let (no, coeff_toks) = take("coefficients")?;
    let coeff_refs: Vec<&str> = coeff_toks.iter().map(String::as_str).collect();
    let coefficients = parse_ints(no, &coeff_refs)?;
    let (no, rec_toks) = take("recurrence")?;
    let recurrence = if rec_toks.first().map(String::as_str) == Some("none") {
        None
    } else {
        let mut rec = Vec::with_capacity(rec_toks.len());
        for t in &rec_toks {
            let r = match t.split_once('/') {
                Some((p, q)) => BigRational::new(parse_int(no, p)?, parse_int(no, q)?),
                None => BigRational::from(parse_int(no, t)?),
            };
            rec.push(r);
        }
        Some(rec)
    };
    let (no, num_toks) = take("numerator")?;
    let num_refs: Vec<&str> = num_toks.iter().map(String::as_str).collect();
    let numerator = parse_ints(no, &num_refs)?;
    let (no, den_toks) = take("denominator")?;
    let den_refs: Vec<&str> = den_toks.iter().map(String::as_str).collect();
    let denominator = parse_ints(no, &den_refs)?;
    Ok(GrowthReport { coefficients, fit_len, verify_len, recurrence, numerator, denominator, status })
}

pub fn write_mgrowth(table: &MultivariateTable) -> String {
    let mut out = String::new();
    writeln!(out, "vabeq mgrowth v1").unwrap();
    writeln!(out, "cap {}", table.cap).unwrap();
    for (weights, count) in &table.entries {
        let ws: Vec<String> = weights.iter().map(|w| w.to_string()).collect();
        writeln!(out, "entry {} = {count}", ws.join(" ")).unwrap();
    }
    out
}

pub fn parse_mgrowth(text: &str) -> Result<MultivariateTable, FormatError> {
    let mut lines = Lines::new(text);
    lines.expect_header("mgrowth")?;
    let (no, line) = lines.expect("cap")?;
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 2 || toks[0] != "cap" {
        return Err(err(no, "expected `cap <n>`"));
    }
    let cap = parse_u64(no, toks[1])?;
    let mut entries = std::collections::BTreeMap::new();
    while let Some((no, line)) = lines.next() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 3 || toks[0] != "entry" {
            return Err(err(no, format!("expected `entry <ws> = <count>`, found {line:?}")));
        }
        let eq = toks
            .iter()
            .position(|&t| t == "=")
            .ok_or_else(|| err(no, "expected `=` in entry"))?;
        let weights: Vec<u64> =
            toks[1..eq].iter().map(|t| parse_u64(no, t)).collect::<Result<_, _>>()?;
        if eq + 2 != toks.len() {
            return Err(err(no, "expected a single count after `=`"));
        }
        entries.insert(weights, parse_u64(no, toks[eq + 1])?);
    }
    Ok(MultivariateTable { cap, entries })
}

// ---------------------------------------------------------------------------
// Reduction dumps

pub fn write_reduction(decomposition: &CosetDecomposition) -> String {
    let mut out = String::new();
    let k = decomposition.rank;
    writeln!(out, "vabeq reduction v1").unwrap();
    writeln!(out, "rank {k}").unwrap();
    writeln!(out, "variables {}", decomposition.variables).unwrap();
    writeln!(out, "cases {}", decomposition.cases.len()).unwrap();
    for case in &decomposition.cases {
        let tuple: Vec<String> = case.tuple.iter().map(|t| t.to_string()).collect();
        writeln!(out, "case {}", tuple.join(" ")).unwrap();
        writeln!(out, "twisted {}", case.twisted.equations.len()).unwrap();
        for eq in &case.twisted.equations {
            writeln!(out, "teq const {}", join_ints(&eq.constant)).unwrap();
            for (i, b) in eq.coefficients.iter().enumerate() {
                writeln!(out, "coef {i}").unwrap();
                for r in 0..k {
                    let row: Vec<String> = (0..k).map(|c| b[(r, c)].to_string()).collect();
                    writeln!(out, "{}", row.join(" ")).unwrap();
                }
            }
        }
        writeln!(out, "linear {} primary {}", case.linear.vars, case.linear.primary_vars).unwrap();
        for r in 0..case.linear.vars {
            writeln!(out, "row {}", join_ints(case.linear.matrix.row(r))).unwrap();
        }
        writeln!(out, "rhs {}", join_ints(&case.linear.rhs)).unwrap();
        writeln!(out, "raw {}", case.linear.raw_equations.len()).unwrap();
        for (coeffs, b) in &case.linear.raw_equations {
            writeln!(out, "raweq {} = {b}", join_ints(coeffs)).unwrap();
        }
    }
    out
}

pub fn parse_reduction(text: &str) -> Result<CosetDecomposition, FormatError> {
    let mut lines = Lines::new(text);
    lines.expect_header("reduction")?;
    let mut field = |name: &str| -> Result<usize, FormatError> {
        let (no, line) = lines.expect(name)?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 || toks[0] != name {
            return Err(err(no, format!("expected `{name} <value>`")));
        }
        parse_usize(no, toks[1])
    };
    let rank = field("rank")?;
    let variables = field("variables")?;
    let case_count = field("cases")?;
    let mut cases = Vec::with_capacity(case_count);
    for _ in 0..case_count {
        let (no, line) = lines.expect("case")?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 1 + variables || toks[0] != "case" {
            return Err(err(no, format!("expected `case <{variables} coset indices>`")));
        }
        let tuple: Vec<usize> =
            toks[1..].iter().map(|t| parse_usize(no, t)).collect::<Result<_, _>>()?;

        let (no, line) = lines.expect("twisted")?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 || toks[0] != "twisted" {
            return Err(err(no, "expected `twisted <count>`"));
        }
        let teq_count = parse_usize(no, toks[1])?;
        let mut equations = Vec::with_capacity(teq_count);
        for _ in 0..teq_count {
            let (no, line) = lines.expect("teq")?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 + rank || toks[0] != "teq" || toks[1] != "const" {
                return Err(err(no, format!("expected `teq const <{rank} ints>`")));
            }
            let constant = parse_ints(no, &toks[2..])?;
            let mut coefficients = Vec::with_capacity(variables);
            for i in 0..variables {
                let (no, line) = lines.expect("coef")?;
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 2 || toks[0] != "coef" || parse_usize(no, toks[1])? != i {
                    return Err(err(no, format!("expected `coef {i}`")));
                }
                let mut entries = Vec::with_capacity(rank * rank);
                for _ in 0..rank {
                    let (no, line) = lines.expect("coef row")?;
                    let row: Vec<&str> = line.split_whitespace().collect();
                    if row.len() != rank {
                        return Err(err(no, format!("expected {rank} entries")));
                    }
                    entries.extend(parse_ints(no, &row)?);
                }
                coefficients.push(IntMatrix::new(rank, rank, entries)?);
            }
            equations.push(TwistedEquation { coefficients, constant });
        }
        let twisted = TwistedSystem { rank, variables, equations };

        let (no, line) = lines.expect("linear")?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 4 || toks[0] != "linear" || toks[2] != "primary" {
            return Err(err(no, "expected `linear <vars> primary <kn>`"));
        }
        let vars = parse_usize(no, toks[1])?;
        let primary_vars = parse_usize(no, toks[3])?;
        let mut entries = Vec::with_capacity(vars * vars);
        for _ in 0..vars {
            let (no, line) = lines.expect("row")?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 1 + vars || toks[0] != "row" {
                return Err(err(no, format!("expected `row <{vars} ints>`")));
            }
            entries.extend(parse_ints(no, &toks[1..])?);
        }
        let matrix = IntMatrix::new(vars, vars, entries)?;
        let (no, line) = lines.expect("rhs")?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 1 + vars || toks[0] != "rhs" {
            return Err(err(no, format!("expected `rhs <{vars} ints>`")));
        }
        let rhs = parse_ints(no, &toks[1..])?;
        let (no, line) = lines.expect("raw")?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 || toks[0] != "raw" {
            return Err(err(no, "expected `raw <count>`"));
        }
        let raw_count = parse_usize(no, toks[1])?;
        let mut raw_equations = Vec::with_capacity(raw_count);
        for _ in 0..raw_count {
            let (no, line) = lines.expect("raweq")?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 + primary_vars || toks[0] != "raweq" || toks[1 + primary_vars] != "=" {
                return Err(err(no, format!("expected `raweq <{primary_vars} ints> = <int>`")));
            }
            let coeffs = parse_ints(no, &toks[1..1 + primary_vars])?;
            let rhs_value = parse_int(no, toks[2 + primary_vars])?;
            raw_equations.push((coeffs, rhs_value));
        }
        let linear = LinearSystem { vars, matrix, rhs, primary_vars, raw_equations };
        cases.push(CosetCase { tuple, twisted, linear });
    }
    Ok(CosetDecomposition { rank, variables, cases })
}

// ---------------------------------------------------------------------------
// DOT export

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn control_dot(system: &Edt0lSystem) -> String {
    let mut out = String::new();
    writeln!(out, "digraph control {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    for (id, endo) in system.endos.iter().enumerate() {
        let rules: Vec<String> = endo
            .map
            .iter()
            .map(|(l, img)| {
                let image: String = img.iter().map(|&c| system.alphabet.name(c)).collect::<Vec<_>>().join(" ");
                format!("{} -> {}", system.alphabet.name(*l), image)
            })
            .collect();
        writeln!(out, "  // endo e{id}: {}", dot_escape(&rules.join("; "))).unwrap();
    }
    for state in 0..system.control.states {
        let shape = if system.control.accepts.contains(&state) { "doublecircle" } else { "circle" };
        let marker = if state == system.control.start { ", style=bold" } else { "" };
        writeln!(out, "  q{state} [shape={shape}{marker}];").unwrap();
    }
    let mut edges = system.control.edges.clone();
    edges.sort_unstable();
    for (from, endo, to) in edges {
        writeln!(out, "  q{from} -> q{to} [label=\"e{endo}\"];").unwrap();
    }
    writeln!(out, "}}").unwrap();
    out
}

pub fn tuple_automaton_dot(automaton: &MultiTapeAutomaton) -> String {
    let mut out = String::new();
    writeln!(out, "digraph tuples {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    for state in 0..automaton.states {
        let shape = if automaton.accepts.contains(&state) { "doublecircle" } else { "circle" };
        let marker = if state == automaton.start { ", style=bold" } else { "" };
        writeln!(out, "  q{state} [shape={shape}{marker}];").unwrap();
    }
    let mut edges: Vec<(usize, String, usize)> = automaton
        .edges
        .iter()
        .map(|(from, labels, to)| {
            let label = labels
                .iter()
                .map(|w| {
                    if w.is_empty() {
                        "-".to_string()
                    } else {
                        w.iter().map(|&c| automaton.alphabet.name(c)).collect::<Vec<_>>().join("")
                    }
                })
                .collect::<Vec<_>>()
                .join(",");
            (*from, label, *to)
        })
        .collect();
    edges.sort();
    for (from, label, to) in edges {
        writeln!(out, "  q{from} -> q{to} [label=\"{}\"];", dot_escape(&label)).unwrap();
    }
    writeln!(out, "}}").unwrap();
    out
}
