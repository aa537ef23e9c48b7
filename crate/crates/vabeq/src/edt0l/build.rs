//! Construction of the EDT0L system and the multi-tape automaton accepting
//! the solutions of an integer linear system, and the group-level assembly
//! over a coset decomposition.
//!
//! For `x * B = c` the matrix is factored as `B = C * U` with `C` row
//! monotone, the target moved to `b = c * U^{-1}`, and a control automaton
//! built whose states are the bounded partial-sum vectors `x * C`. One
//! component is built per sign sector (each variable coordinate only ever
//! steps in one direction); the components share the start word
//! `@1..@k # @k+1..@2k # ...` and are joined by a common start state, with
//! a final edge erasing the marker letters.

use super::bounds::compute_bounds;
use super::closure::{hom_image, separate_hashes, union};
use super::{
    Alphabet, ControlAutomaton, Edt0lError, Edt0lSystem, Endomorphism, Letter, LetterWord,
};
use crate::equations::{CosetDecomposition, LinearSystem};
use crate::group::GroupSpec;
use crate::matrix::{row_monotone_decompose, unimodular_inverse};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

const SOLUTION_STATE_LIMIT: usize = 2_000_000;
const MAX_SIGN_SECTOR_VARS: usize = 16;

/// Abstract edge label of the solution control graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum StepLabel {
    /// Identity step from the common start into a sector.
    Enter,
    /// Append one generator letter for a variable coordinate.
    Emit { coord: usize, negative: bool },
    /// Final step erasing the marker letters.
    Erase,
}

/// Shared state graph used by both the EDT0L control and the tuple automaton.
struct ControlSkeleton {
    states: usize,
    start: usize,
    accept: usize,
    edges: Vec<(usize, StepLabel, usize)>,
}

/// One trimmed sign-sector component: sorted partial-sum keys, edges as
/// (from, coordinate, negative, to), and the local start/accept states.
struct Sector {
    keys: Vec<Vec<BigInt>>,
    edges: Vec<(usize, usize, bool, usize)>,
    start: usize,
    accept: usize,
}

fn check_shape(linear: &LinearSystem, k: usize, n: usize) -> Result<(), Edt0lError> {
    if linear.primary_vars != k * n {
        return Err(Edt0lError::VariableMismatch {
            expected: k * n,
            got: linear.primary_vars,
        });
    }
    if k * n > MAX_SIGN_SECTOR_VARS {
        return Err(Edt0lError::TooManySectors { vars: k * n });
    }
    Ok(())
}

fn build_skeleton(linear: &LinearSystem, k: usize, n: usize) -> Result<ControlSkeleton, Edt0lError> {
    check_shape(linear, k, n)?;
    let kn = k * n;
    let m = linear.vars;
    let decomposition = row_monotone_decompose(&linear.matrix)?;
    let u_inverse = unimodular_inverse(&decomposition.unimodular)?;
    let target = u_inverse.apply_row(&linear.rhs)?;
    let bounds = compute_bounds(&decomposition.monotone, &target)?;
    let rows: Vec<Vec<BigInt>> = (0..m)
        .map(|j| (0..m).map(|l| decomposition.monotone[(j, l)].clone()).collect())
        .collect();
    // Padding rows of B are zero, hence so are the corresponding rows of C.
    debug_assert!(rows[kn..].iter().all(|r| r.iter().all(|v| v.is_zero())));

    let mut total_states = 0usize;
    let mut sectors: Vec<Sector> = Vec::new();
    let mut seen_signatures: HashSet<Vec<u8>> = HashSet::new();

    for mask in 0u32..(1u32 << kn) {
        let negative: Vec<bool> = (0..kn).map(|j| mask & (1 << j) != 0).collect();
        // Forward search from the zero state inside the bound box.
        let origin = vec![BigInt::zero(); m];
        let mut index: HashMap<Vec<BigInt>, usize> = HashMap::new();
        let mut keys: Vec<Vec<BigInt>> = vec![origin.clone()];
        index.insert(origin, 0);
        let mut queue = VecDeque::from([0usize]);
        let mut edges: Vec<(usize, usize, bool, usize)> = Vec::new();
        while let Some(s) = queue.pop_front() {
            for j in 0..kn {
                let mut next = keys[s].clone();
                let mut inside = true;
                for l in 0..m {
                    if negative[j] {
                        next[l] -= &rows[j][l];
                    } else {
                        next[l] += &rows[j][l];
                    }
                    if next[l].abs() > bounds[l] {
                        inside = false;
                        break;
                    }
                }
                if !inside {
                    continue;
                }
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = keys.len();
                        if total_states + keys.len() >= SOLUTION_STATE_LIMIT {
                            return Err(Edt0lError::StateLimit { limit: SOLUTION_STATE_LIMIT });
                        }
                        index.insert(next.clone(), id);
                        keys.push(next);
                        queue.push_back(id);
                        id
                    }
                };
                edges.push((s, j, negative[j], id));
            }
        }
        let accept_local = match index.get(&target) {
            Some(&id) => id,
            None => continue,
        };
        // Keep only states that can still reach the accept state.
        let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); keys.len()];
        for &(from, _, _, to) in &edges {
            reverse[to].push(from);
        }
        let mut keep = vec![false; keys.len()];
        keep[accept_local] = true;
        let mut stack = vec![accept_local];
        while let Some(s) = stack.pop() {
            for &p in &reverse[s] {
                if !keep[p] {
                    keep[p] = true;
                    stack.push(p);
                }
            }
        }
        if !keep[0] {
            continue;
        }
        let mut kept: Vec<usize> = (0..keys.len()).filter(|&s| keep[s]).collect();
        kept.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        let renumber: HashMap<usize, usize> =
            kept.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let kept_keys: Vec<Vec<BigInt>> = kept.iter().map(|&s| keys[s].clone()).collect();
        let mut kept_edges: Vec<(usize, usize, bool, usize)> = edges
            .iter()
            .filter(|(from, _, _, to)| keep[*from] && keep[*to])
            .map(|&(from, j, neg, to)| (renumber[&from], j, neg, renumber[&to]))
            .collect();
        kept_edges.sort_unstable();
        kept_edges.dedup();

        // Sectors that differ only in the sign of frozen coordinates
        // produce identical components; keep one copy.
        let mut signature = Vec::new();
        for key in &kept_keys {
            for v in key {
                signature.extend_from_slice(&v.to_signed_bytes_le());
                signature.push(0xfe);
            }
            signature.push(0xff);
        }
        for &(a, b, c, d) in &kept_edges {
            signature.extend_from_slice(&(a as u64).to_le_bytes());
            signature.extend_from_slice(&(b as u64).to_le_bytes());
            signature.push(c as u8);
            signature.extend_from_slice(&(d as u64).to_le_bytes());
        }
        if !seen_signatures.insert(signature) {
            continue;
        }

        total_states += kept_keys.len();
        let origin_key = vec![BigInt::zero(); m];
        let start_local = kept_keys.binary_search(&origin_key).expect("origin kept");
        let accept_local = kept_keys.binary_search(&target).expect("accept kept");
        sectors.push(Sector {
            keys: kept_keys,
            edges: kept_edges,
            start: start_local,
            accept: accept_local,
        });
    }

    // Assemble: global start, sector blocks, global accept.
    let mut states = 1usize;
    let mut edges: Vec<(usize, StepLabel, usize)> = Vec::new();
    let mut offsets = Vec::with_capacity(sectors.len());
    for sector in &sectors {
        offsets.push(states);
        states += sector.keys.len();
    }
    let accept = states;
    states += 1;
    for (sector, &off) in sectors.iter().zip(&offsets) {
        edges.push((0, StepLabel::Enter, off + sector.start));
        for &(from, coord, negative, to) in &sector.edges {
            edges.push((off + from, StepLabel::Emit { coord, negative }, off + to));
        }
        edges.push((off + sector.accept, StepLabel::Erase, accept));
    }
    Ok(ControlSkeleton { states, start: 0, accept, edges })
}

/// Names for the standard basis letters of `Z^k`.
pub(crate) fn basis_letter_names(k: usize) -> Vec<String> {
    (0..k)
        .map(|i| if k == 1 { "a".to_string() } else { format!("a{}", i + 1) })
        .collect()
}

/// Build the EDT0L system accepting the solution words of `x * B = c` in
/// normal form: one letter block per variable, `#` between variables.
pub fn build_solution_system(
    linear: &LinearSystem,
    k: usize,
    n: usize,
) -> Result<Edt0lSystem, Edt0lError> {
    let skeleton = build_skeleton(linear, k, n)?;
    let kn = k * n;
    let mut alphabet = Alphabet::new();
    let mut terminals = BTreeSet::new();
    let mut letters = Vec::with_capacity(k);
    let mut inverses = Vec::with_capacity(k);
    for name in basis_letter_names(k) {
        let plain = alphabet.intern(&name);
        let inverse = alphabet.intern(&format!("{name}^-1"));
        terminals.insert(plain);
        terminals.insert(inverse);
        letters.push(plain);
        inverses.push(inverse);
    }
    let hash = alphabet.intern("#");
    terminals.insert(hash);
    let markers: Vec<Letter> = (0..kn).map(|j| alphabet.intern(&format!("@{}", j + 1))).collect();

    let mut endos = vec![Endomorphism::identity()];
    endos.push(Endomorphism::from_pairs(markers.iter().map(|&b| (b, Vec::new()))));
    for j in 0..kn {
        let base = j % k;
        endos.push(Endomorphism::from_pairs([(markers[j], vec![letters[base], markers[j]])]));
        endos.push(Endomorphism::from_pairs([(markers[j], vec![inverses[base], markers[j]])]));
    }

    let mut start_word = Vec::new();
    for i in 0..n {
        if i > 0 {
            start_word.push(hash);
        }
        start_word.extend_from_slice(&markers[i * k..(i + 1) * k]);
    }

    let edges = skeleton
        .edges
        .iter()
        .map(|&(from, label, to)| {
            let endo = match label {
                StepLabel::Enter => 0,
                StepLabel::Erase => 1,
                StepLabel::Emit { coord, negative } => 2 + 2 * coord + usize::from(negative),
            };
            (from, endo, to)
        })
        .collect();

    Ok(Edt0lSystem {
        alphabet,
        terminals,
        start_word,
        endos,
        control: ControlAutomaton {
            states: skeleton.states,
            start: skeleton.start,
            accepts: [skeleton.accept].into_iter().collect(),
            edges,
        },
    })
}

/// Finite automaton over `n`-tuples of words; edges carry one word per tape.
#[derive(Clone, Debug)]
pub struct MultiTapeAutomaton {
    pub alphabet: Alphabet,
    pub tapes: usize,
    pub states: usize,
    pub start: usize,
    pub accepts: BTreeSet<usize>,
    pub edges: Vec<(usize, Vec<LetterWord>, usize)>,
}

impl MultiTapeAutomaton {
    /// Does some path spell exactly this tuple, coordinatewise?
    pub fn accepts_tuple(&self, tuple: &[LetterWord]) -> bool {
        assert_eq!(tuple.len(), self.tapes);
        let mut adjacency: Vec<Vec<(&Vec<LetterWord>, usize)>> = vec![Vec::new(); self.states];
        for (from, labels, to) in &self.edges {
            adjacency[*from].push((labels, *to));
        }
        let mut visited: HashSet<(usize, Vec<usize>)> = HashSet::new();
        let start = (self.start, vec![0usize; self.tapes]);
        let mut stack = vec![start.clone()];
        visited.insert(start);
        while let Some((state, positions)) = stack.pop() {
            if self.accepts.contains(&state)
                && positions.iter().zip(tuple).all(|(&p, w)| p == w.len())
            {
                return true;
            }
            for (labels, to) in &adjacency[state] {
                let mut next_positions = Vec::with_capacity(self.tapes);
                let mut ok = true;
                for t in 0..self.tapes {
                    let p = positions[t];
                    let label = &labels[t];
                    if tuple[t].len() < p + label.len() || tuple[t][p..p + label.len()] != label[..]
                    {
                        ok = false;
                        break;
                    }
                    next_positions.push(p + label.len());
                }
                if !ok {
                    continue;
                }
                let key = (*to, next_positions);
                if visited.insert(key.clone()) {
                    stack.push(key);
                }
            }
        }
        false
    }

    pub fn tuple_from_names(&self, names: &[&[&str]]) -> Result<Vec<LetterWord>, Edt0lError> {
        names
            .iter()
            .map(|word| {
                word.iter()
                    .map(|n| {
                        self.alphabet
                            .lookup(n)
                            .ok_or_else(|| Edt0lError::UnknownLetterName { name: n.to_string() })
                    })
                    .collect()
            })
            .collect()
    }
}

/// Build the multi-tape automaton accepting the solution tuples of
/// `x * B = c` in normal form, one tape per group variable.
pub fn build_tuple_automaton(
    linear: &LinearSystem,
    k: usize,
    n: usize,
) -> Result<MultiTapeAutomaton, Edt0lError> {
    let skeleton = build_skeleton(linear, k, n)?;
    let mut alphabet = Alphabet::new();
    let mut letters = Vec::with_capacity(k);
    let mut inverses = Vec::with_capacity(k);
    for name in basis_letter_names(k) {
        letters.push(alphabet.intern(&name));
        inverses.push(alphabet.intern(&format!("{name}^-1")));
    }
    let empty_tuple = vec![Vec::new(); n];
    let edges = skeleton
        .edges
        .iter()
        .map(|&(from, label, to)| {
            let labels = match label {
                StepLabel::Enter | StepLabel::Erase => empty_tuple.clone(),
                StepLabel::Emit { coord, negative } => {
                    let mut t = empty_tuple.clone();
                    let letter =
                        if negative { inverses[coord % k] } else { letters[coord % k] };
                    t[coord / k] = vec![letter];
                    t
                }
            };
            (from, labels, to)
        })
        .collect();
    Ok(MultiTapeAutomaton {
        alphabet,
        tapes: n,
        states: skeleton.states,
        start: skeleton.start,
        accepts: [skeleton.accept].into_iter().collect(),
        edges,
    })
}

/// Terminal alphabet of the group-level solution language: basis letters,
/// their inverses, the separator, and the non-identity transversal labels.
pub(crate) fn group_terminal_names(spec: &GroupSpec) -> Vec<String> {
    let mut names = Vec::new();
    for base in basis_letter_names(spec.rank()) {
        names.push(base.clone());
        names.push(format!("{base}^-1"));
    }
    names.push("#".to_string());
    for c in 1..spec.coset_count() {
        names.push(spec.label(c).to_string());
    }
    names
}

/// Assemble the EDT0L system accepting the normal forms
/// `h_1 t_1 # ... # h_n t_n` of all solution tuples, as the union over the
/// valid transversal tuples of the per-tuple systems with separators
/// retargeted through a homomorphism.
pub fn assemble_group_solution_language(
    decomposition: &CosetDecomposition,
    spec: &GroupSpec,
) -> Result<Edt0lSystem, Edt0lError> {
    let k = decomposition.rank;
    let n = decomposition.variables;
    let terminal_names = group_terminal_names(spec);
    let mut assembled: Option<Edt0lSystem> = None;
    for case in &decomposition.cases {
        let base = build_solution_system(&case.linear, k, n)?;
        let separated = separate_hashes(&base, n)?;
        let mut mapping: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for i in 1..=n {
            let mut image = Vec::new();
            let coset = case.tuple[i - 1];
            if coset != 0 {
                image.push(spec.label(coset).to_string());
            }
            if i < n {
                image.push("#".to_string());
            }
            mapping.insert(format!("#{i}"), image);
        }
        let mapped = hom_image(&separated, &mapping, &terminal_names)?;
        assembled = Some(match assembled {
            None => mapped,
            Some(acc) => union(&acc, &mapped),
        });
    }
    Ok(assembled.unwrap_or_else(|| Edt0lSystem::empty_language(&terminal_names)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::{
        brute_force_solutions, reduce_to_twisted, EquationItem, GroupEquation,
        GroupEquationSystem,
    };
    use crate::group::GroupSpec;
    use std::collections::BTreeSet;

    fn var(index: usize) -> EquationItem {
        EquationItem::Variable { index, inverse: false }
    }

    fn inv(index: usize) -> EquationItem {
        EquationItem::Variable { index, inverse: true }
    }

    fn constant(v: &[i64], coset: usize) -> EquationItem {
        EquationItem::Constant(crate::group::GroupElement::from_i64(v, coset))
    }

    fn example_linear() -> crate::equations::LinearSystem {
        let spec = GroupSpec::free_abelian(1);
        let sys = GroupEquationSystem::new(
            3,
            vec![
                GroupEquation { items: vec![var(0), inv(1), var(2), constant(&[-1], 0)] },
                GroupEquation { items: vec![inv(1), var(2)] },
            ],
        )
        .unwrap();
        reduce_to_twisted(&sys, &spec).unwrap().cases[0].linear.clone()
    }

    /// Normal-form word for a solution vector of a k=1 system.
    fn word_for(solution: &[i64]) -> String {
        let mut parts = Vec::new();
        for &v in solution {
            let letter = if v >= 0 { "a" } else { "a^-1" };
            parts.push(letter.repeat(v.unsigned_abs() as usize));
        }
        parts.join("#")
    }

    #[test]
    fn example_system_language_matches_brute_force() {
        let linear = example_linear();
        let sys = build_solution_system(&linear, 1, 3).unwrap();
        let (words, saturated) = sys.enumerate_strings(9, 40);
        assert!(!saturated);
        // Letter length of a # a^y # a^y is 3 + 2|y|, so the box-3 solution
        // set is exactly the words of letter length at most 9.
        let expect: BTreeSet<String> = brute_force_solutions(&linear, 3)
            .iter()
            .map(|x| {
                let ints: Vec<i64> =
                    x.iter().map(|v| i64::try_from(v).unwrap()).collect();
                word_for(&ints)
            })
            .collect();
        assert!(expect.contains("a##"));
        assert!(expect.contains("a#a#a"));
        assert_eq!(words, expect);
    }

    #[test]
    fn unsatisfiable_system_has_empty_language() {
        // x * [1] = 1 and x * [1] = 2 cannot both hold: columns (1,1), rhs (1,2).
        let twisted = crate::equations::TwistedSystem {
            rank: 1,
            variables: 1,
            equations: vec![
                crate::equations::TwistedEquation {
                    coefficients: vec![crate::matrix::IntMatrix::identity(1)],
                    constant: vec![num_bigint::BigInt::from(-1)],
                },
                crate::equations::TwistedEquation {
                    coefficients: vec![crate::matrix::IntMatrix::identity(1)],
                    constant: vec![num_bigint::BigInt::from(-2)],
                },
            ],
        };
        let linear = crate::equations::twisted_to_linear(&twisted);
        let sys = build_solution_system(&linear, 1, 1).unwrap();
        let e = sys.enumerate(8, 30);
        assert!(e.words.is_empty());
        assert!(!e.saturated);
    }

    #[test]
    fn rank_two_single_variable() {
        // Y = (1, 2) in Z^2: language is the single word a1 a2 a2.
        let twisted = crate::equations::TwistedSystem {
            rank: 2,
            variables: 1,
            equations: vec![crate::equations::TwistedEquation {
                coefficients: vec![crate::matrix::IntMatrix::identity(2)],
                constant: vec![num_bigint::BigInt::from(-1), num_bigint::BigInt::from(-2)],
            }],
        };
        let linear = crate::equations::twisted_to_linear(&twisted);
        let sys = build_solution_system(&linear, 2, 1).unwrap();
        let (words, saturated) = sys.enumerate_strings(6, 20);
        assert!(!saturated);
        assert_eq!(words.into_iter().collect::<Vec<_>>(), vec!["a1a2a2".to_string()]);
    }

    #[test]
    fn tuple_automaton_accepts_solutions_only() {
        let linear = example_linear();
        let aut = build_tuple_automaton(&linear, 1, 3).unwrap();
        let a = aut.alphabet.lookup("a").unwrap();
        let accepts = |x: i64, y: i64, z: i64| {
            let inv = aut.alphabet.lookup("a^-1").unwrap();
            let word = |v: i64| -> Vec<u32> {
                let letter = if v >= 0 { a } else { inv };
                vec![letter; v.unsigned_abs() as usize]
            };
            aut.accepts_tuple(&[word(x), word(y), word(z)])
        };
        assert!(accepts(1, 2, 2));
        assert!(accepts(1, 0, 0));
        assert!(accepts(1, -3, -3));
        assert!(!accepts(2, 0, 0));
        assert!(!accepts(1, 1, 2));
        assert!(!accepts(0, 0, 0));
    }

    #[test]
    fn tuple_automaton_agrees_with_language() {
        let linear = example_linear();
        let sys = build_solution_system(&linear, 1, 3).unwrap();
        let aut = build_tuple_automaton(&linear, 1, 3).unwrap();
        let hash = sys.alphabet.lookup("#").unwrap();
        for word in &sys.enumerate(13, 60).words {
            let blocks: Vec<Vec<u32>> = word
                .split(|&c| c == hash)
                .map(|block| {
                    block
                        .iter()
                        .map(|&c| aut.alphabet.lookup(sys.alphabet.name(c)).unwrap())
                        .collect()
                })
                .collect();
            assert!(aut.accepts_tuple(&blocks), "tuple rejected for {}", sys.display_word(word));
        }
    }
}
