//! EDT0L systems with automaton-shaped rational control.
//!
//! A system is a terminal alphabet inside an extended alphabet, a start
//! word, a table of free-monoid endomorphisms, and a finite automaton whose
//! edges are labelled by endomorphism ids. A word is accepted when some
//! control path from the start state to an accept state, applied to the
//! start word, yields it; only words made entirely of terminal letters
//! count as part of the language.

mod bounds;
mod build;
mod closure;

pub use bounds::{compute_bounds, reorder_solution_steps, steps_within_bounds};
pub use build::{
    assemble_group_solution_language, build_solution_system, build_tuple_automaton,
    MultiTapeAutomaton,
};
pub use closure::{
    concat, fix_terminals, hom_image, intersect_regular, separate_hashes, star, union,
    WordAutomaton,
};

use crate::group::GroupError;
use crate::matrix::MatrixError;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Edt0lError {
    #[error("control references endomorphism {endo} but the table has {count}")]
    UnknownEndomorphism { endo: usize, count: usize },
    #[error("control references state {state} but there are {count}")]
    UnknownState { state: usize, count: usize },
    #[error("letter id {letter} out of range")]
    UnknownLetter { letter: u32 },
    #[error("letter {name:?} not present in the alphabet")]
    UnknownLetterName { name: String },
    #[error("linear system has {got} primary variables, expected rank*variables = {expected}")]
    VariableMismatch { expected: usize, got: usize },
    #[error("construction exceeded the state limit of {limit}")]
    StateLimit { limit: usize },
    #[error("too many sign sectors: {vars} primary variables")]
    TooManySectors { vars: usize },
    #[error("endomorphism produces {sites} hash occurrences at once; limit is {limit}")]
    TooManyHashSites { sites: usize, limit: usize },
    #[error("system words contain no hash letter but {blocks} blocks were requested")]
    MissingHashLetter { blocks: usize },
    #[error("word automaton is malformed: {reason}")]
    BadWordAutomaton { reason: String },
    #[error("homomorphism image uses letter {name:?} outside the target alphabet")]
    ImageOutsideTarget { name: String },
    #[error("matrix is not row monotone")]
    NotRowMonotone,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

pub type Letter = u32;
pub type LetterWord = Vec<Letter>;

/// Interned letter names. Ids are stable once assigned.
#[derive(Clone, Debug, Default)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, Letter>,
}

impl Alphabet {
    pub fn new() -> Self {
        Alphabet::default()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn intern(&mut self, name: &str) -> Letter {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len() as Letter;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    /// Intern under a name not already taken, priming with `'` until free.
    pub fn intern_fresh(&mut self, base: &str) -> Letter {
        let mut name = base.to_string();
        while self.index.contains_key(&name) {
            name.push('\'');
        }
        self.intern(&name)
    }

    /// Rename an existing letter, priming the new name until free.
    pub fn rename_fresh(&mut self, letter: Letter, base: &str) {
        let old = self.names[letter as usize].clone();
        self.index.remove(&old);
        let mut name = base.to_string();
        while self.index.contains_key(&name) {
            name.push('\'');
        }
        self.names[letter as usize] = name.clone();
        self.index.insert(name, letter);
    }

    pub fn lookup(&self, name: &str) -> Option<Letter> {
        self.index.get(name).copied()
    }

    pub fn name(&self, letter: Letter) -> &str {
        &self.names[letter as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Tabulated endomorphism of the free monoid over the extended alphabet.
/// Letters absent from the table are fixed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Endomorphism {
    pub map: BTreeMap<Letter, LetterWord>,
}

impl Endomorphism {
    pub fn identity() -> Self {
        Endomorphism::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Letter, LetterWord)>) -> Self {
        Endomorphism { map: pairs.into_iter().collect() }
    }

    pub fn image(&self, letter: Letter) -> LetterWord {
        self.map.get(&letter).cloned().unwrap_or_else(|| vec![letter])
    }

    pub fn apply(&self, word: &[Letter]) -> LetterWord {
        let mut out = Vec::with_capacity(word.len());
        for &c in word {
            match self.map.get(&c) {
                Some(img) => out.extend_from_slice(img),
                None => out.push(c),
            }
        }
        out
    }

    /// Rewrite all letter ids through `f` (for alphabet merges).
    pub fn remap(&self, f: impl Fn(Letter) -> Letter) -> Endomorphism {
        Endomorphism {
            map: self
                .map
                .iter()
                .map(|(&c, img)| (f(c), img.iter().map(|&x| f(x)).collect()))
                .collect(),
        }
    }
}

/// Finite control automaton over endomorphism ids.
#[derive(Clone, Debug, Default)]
pub struct ControlAutomaton {
    pub states: usize,
    pub start: usize,
    pub accepts: BTreeSet<usize>,
    /// (from, endomorphism id, to)
    pub edges: Vec<(usize, usize, usize)>,
}

impl ControlAutomaton {
    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.states];
        let mut edges = self.edges.clone();
        edges.sort_unstable();
        for (from, endo, to) in edges {
            adj[from].push((endo, to));
        }
        adj
    }
}

#[derive(Clone, Debug)]
pub struct Edt0lSystem {
    pub alphabet: Alphabet,
    pub terminals: BTreeSet<Letter>,
    pub start_word: LetterWord,
    pub endos: Vec<Endomorphism>,
    pub control: ControlAutomaton,
}

/// Result of a bounded language enumeration.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub words: BTreeSet<LetterWord>,
    /// True when the step cap stopped exploration before exhaustion; the
    /// reported word set may then be incomplete.
    pub saturated: bool,
}

impl Enumeration {
    pub fn is_complete(&self) -> bool {
        !self.saturated
    }
}

/// Guards against runaway enumerations independent of the step cap.
const ENUMERATION_VISIT_LIMIT: usize = 6_000_000;
const ENUMERATION_FORM_SLACK: usize = 64;

impl Edt0lSystem {
    /// A system accepting the empty language over the given terminals.
    pub fn empty_language(terminal_names: &[String]) -> Edt0lSystem {
        let mut alphabet = Alphabet::new();
        let terminals = terminal_names.iter().map(|n| alphabet.intern(n)).collect();
        Edt0lSystem {
            alphabet,
            terminals,
            start_word: Vec::new(),
            endos: Vec::new(),
            control: ControlAutomaton {
                states: 1,
                start: 0,
                accepts: BTreeSet::new(),
                edges: Vec::new(),
            },
        }
    }

    pub fn validate(&self) -> Result<(), Edt0lError> {
        let letters = self.alphabet.len() as u32;
        let check_word = |w: &LetterWord| {
            w.iter()
                .find(|&&c| c >= letters)
                .map_or(Ok(()), |&c| Err(Edt0lError::UnknownLetter { letter: c }))
        };
        check_word(&self.start_word)?;
        for e in &self.endos {
            for (&c, img) in &e.map {
                if c >= letters {
                    return Err(Edt0lError::UnknownLetter { letter: c });
                }
                check_word(img)?;
            }
        }
        for &t in &self.terminals {
            if t >= letters {
                return Err(Edt0lError::UnknownLetter { letter: t });
            }
        }
        for &(from, endo, to) in &self.control.edges {
            if endo >= self.endos.len() {
                return Err(Edt0lError::UnknownEndomorphism { endo, count: self.endos.len() });
            }
            if from >= self.control.states || to >= self.control.states {
                return Err(Edt0lError::UnknownState {
                    state: from.max(to),
                    count: self.control.states,
                });
            }
        }
        if self.control.start >= self.control.states {
            return Err(Edt0lError::UnknownState {
                state: self.control.start,
                count: self.control.states,
            });
        }
        Ok(())
    }

    pub fn display_word(&self, word: &[Letter]) -> String {
        word.iter().map(|&c| self.alphabet.name(c)).collect()
    }

    pub fn word_from_names(&self, names: &[&str]) -> Result<LetterWord, Edt0lError> {
        names
            .iter()
            .map(|n| {
                self.alphabet
                    .lookup(n)
                    .ok_or_else(|| Edt0lError::UnknownLetterName { name: n.to_string() })
            })
            .collect()
    }

    fn is_terminal_word(&self, word: &[Letter]) -> bool {
        word.iter().all(|c| self.terminals.contains(c))
    }

    /// Letters that can eventually map to the empty word under some
    /// composition of table entries (least fixpoint).
    fn erasable_letters(&self) -> HashSet<Letter> {
        let mut erasable: HashSet<Letter> = HashSet::new();
        loop {
            let mut changed = false;
            for endo in &self.endos {
                for (&c, img) in &endo.map {
                    if !erasable.contains(&c) && img.iter().all(|x| erasable.contains(x)) {
                        erasable.insert(c);
                        changed = true;
                    }
                }
            }
            if !changed {
                return erasable;
            }
        }
    }

    /// All words of the language of length at most `max_len` reachable with
    /// at most `max_steps` control edges. Sentential forms are pruned when
    /// even erasing every erasable letter cannot bring them under the
    /// length cap, which never discards a reachable short word. Forms that
    /// balloon far past the length cap on erasable letters alone trip the
    /// saturation flag instead of exhausting memory.
    pub fn enumerate(&self, max_len: usize, max_steps: usize) -> Enumeration {
        let erasable = self.erasable_letters();
        let min_len =
            |w: &LetterWord| w.iter().filter(|c| !erasable.contains(c)).count();
        let form_cap = max_len.saturating_mul(4) + ENUMERATION_FORM_SLACK;
        let adj = self.control.adjacency();
        let mut words = BTreeSet::new();
        let mut visited: HashSet<(usize, LetterWord)> = HashSet::new();
        let mut frontier: VecDeque<(usize, LetterWord)> = VecDeque::new();
        let mut saturated = false;

        let start = (self.control.start, self.start_word.clone());
        if min_len(&start.1) <= max_len {
            visited.insert(start.clone());
            frontier.push_back(start);
        }

        let consider = |state: usize, word: &LetterWord, words: &mut BTreeSet<LetterWord>| {
            if self.control.accepts.contains(&state)
                && word.len() <= max_len
                && self.is_terminal_word(word)
            {
                words.insert(word.clone());
            }
        };
        for (state, word) in &frontier {
            consider(*state, word, &mut words);
        }

        let mut steps = 0;
        while !frontier.is_empty() {
            if steps == max_steps {
                saturated = true;
                break;
            }
            steps += 1;
            let mut next = VecDeque::new();
            while let Some((state, word)) = frontier.pop_front() {
                for &(endo, to) in &adj[state] {
                    let image = self.endos[endo].apply(&word);
                    if min_len(&image) > max_len {
                        continue;
                    }
                    if image.len() > form_cap {
                        saturated = true;
                        continue;
                    }
                    let pair = (to, image);
                    if visited.contains(&pair) {
                        continue;
                    }
                    if visited.len() >= ENUMERATION_VISIT_LIMIT {
                        return Enumeration { words, saturated: true };
                    }
                    consider(pair.0, &pair.1, &mut words);
                    visited.insert(pair.clone());
                    next.push_back(pair);
                }
            }
            frontier = next;
        }
        Enumeration { words, saturated }
    }

    /// Enumerated words rendered through the alphabet, sorted.
    pub fn enumerate_strings(&self, max_len: usize, max_steps: usize) -> (BTreeSet<String>, bool) {
        let e = self.enumerate(max_len, max_steps);
        (e.words.iter().map(|w| self.display_word(w)).collect(), e.saturated)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Start word "ab", control accepts the empty path only.
    #[test]
    fn fixed_start_word_language() {
        let mut alphabet = Alphabet::new();
        let a = alphabet.intern("a");
        let b = alphabet.intern("b");
        let sys = Edt0lSystem {
            alphabet,
            terminals: [a, b].into_iter().collect(),
            start_word: vec![a, b],
            endos: vec![],
            control: ControlAutomaton {
                states: 1,
                start: 0,
                accepts: [0].into_iter().collect(),
                edges: vec![],
            },
        };
        let (words, saturated) = sys.enumerate_strings(5, 5);
        assert!(!saturated);
        assert_eq!(words.into_iter().collect::<Vec<_>>(), vec!["ab".to_string()]);
    }

    #[test]
    fn no_accepting_path_means_empty() {
        let sys = Edt0lSystem::empty_language(&["a".into()]);
        let e = sys.enumerate(4, 4);
        assert!(e.words.is_empty());
        assert!(!e.saturated);
    }

    /// a^n via the doubling-free system: bottom -> a bottom, erased at end.
    #[test]
    fn counting_system_enumerates_powers() {
        let mut alphabet = Alphabet::new();
        let a = alphabet.intern("a");
        let bot = alphabet.intern("@1");
        let grow = Endomorphism::from_pairs([(bot, vec![a, bot])]);
        let erase = Endomorphism::from_pairs([(bot, vec![])]);
        let sys = Edt0lSystem {
            alphabet,
            terminals: [a].into_iter().collect(),
            start_word: vec![bot],
            endos: vec![grow, erase],
            control: ControlAutomaton {
                states: 2,
                start: 0,
                accepts: [1].into_iter().collect(),
                edges: vec![(0, 0, 0), (0, 1, 1)],
            },
        };
        let (words, saturated) = sys.enumerate_strings(3, 10);
        assert!(!saturated);
        assert_eq!(
            words.into_iter().collect::<Vec<_>>(),
            vec!["".to_string(), "a".to_string(), "aa".to_string(), "aaa".to_string()]
        );
    }

    #[test]
    fn step_cap_reports_saturation() {
        let mut alphabet = Alphabet::new();
        let a = alphabet.intern("a");
        let bot = alphabet.intern("@1");
        let grow = Endomorphism::from_pairs([(bot, vec![a, bot])]);
        let erase = Endomorphism::from_pairs([(bot, vec![])]);
        let sys = Edt0lSystem {
            alphabet,
            terminals: [a].into_iter().collect(),
            start_word: vec![bot],
            endos: vec![grow, erase],
            control: ControlAutomaton {
                states: 2,
                start: 0,
                accepts: [1].into_iter().collect(),
                edges: vec![(0, 0, 0), (0, 1, 1)],
            },
        };
        let e = sys.enumerate(50, 3);
        assert!(e.saturated);
    }
}
