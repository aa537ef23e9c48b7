//! Helpers shared by the integration and acceptance suites.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::Signed;
use std::collections::{BTreeMap, BTreeSet};
use vabeq::edt0l::Edt0lSystem;
use vabeq::equations::GroupEquationSystem;
use vabeq::format;
use vabeq::group::{GroupElement, GroupSpec, WeightedGeneratingSet};

pub fn z_group() -> (GroupSpec, WeightedGeneratingSet) {
    let spec = GroupSpec::free_abelian(1);
    let gens = WeightedGeneratingSet::standard(&spec);
    (spec, gens)
}

pub fn dihedral_group() -> (GroupSpec, WeightedGeneratingSet) {
    let spec = GroupSpec::infinite_dihedral();
    let gens = WeightedGeneratingSet::standard(&spec);
    (spec, gens)
}

/// Z generated by a^2 and a^3, both of weight 1.
pub fn z_gap_generators() -> WeightedGeneratingSet {
    WeightedGeneratingSet::new(
        vec!["a2".into(), "a3".into()],
        vec![GroupElement::from_i64(&[2], 0), GroupElement::from_i64(&[3], 0)],
        vec![1, 1],
    )
    .unwrap()
}

pub fn dihedral_gap_generators() -> WeightedGeneratingSet {
    WeightedGeneratingSet::new(
        vec!["a2".into(), "a3".into(), "t".into()],
        vec![
            GroupElement::from_i64(&[2], 0),
            GroupElement::from_i64(&[3], 0),
            GroupElement::from_i64(&[0], 1),
        ],
        vec![1, 1, 1],
    )
    .unwrap()
}

pub fn system(variables: usize, equations: &[&str]) -> GroupEquationSystem {
    let mut text = format!("vabeq system v1\nvariables {variables}\n");
    for eq in equations {
        text.push_str("eq ");
        text.push_str(eq);
        text.push('\n');
    }
    format::parse_system(&text).unwrap()
}

/// X - Y + Z = 1 and -Y + Z = 0 over Z, multiplicatively.
pub fn example_system() -> GroupEquationSystem {
    system(3, &["X1 X2^-1 X3 [-1; 0]", "X2^-1 X3"])
}

pub fn xyz_system() -> GroupEquationSystem {
    system(3, &["X1 X2^-1", "X2 X3^-1"])
}

pub fn dihedral_square_system() -> GroupEquationSystem {
    system(1, &["X1 X1"])
}

pub fn dihedral_commute_system() -> GroupEquationSystem {
    system(1, &["X1 [1; 0] X1^-1 [-1; 0]"])
}

pub fn dihedral_square_commute_system() -> GroupEquationSystem {
    system(1, &["X1 X1", "[0; 1] X1 [0; 1] X1^-1"])
}

/// Normal-form word of one group element, rendered with the same letter
/// names the built systems use. Entirely independent of the EDT0L path.
pub fn normal_form(spec: &GroupSpec, g: &GroupElement) -> String {
    let k = spec.rank();
    let mut out = String::new();
    for (i, v) in g.vector.iter().enumerate() {
        let base = if k == 1 { "a".to_string() } else { format!("a{}", i + 1) };
        let letter = if v.is_negative() { format!("{base}^-1") } else { base };
        let count = usize::try_from(v.abs().magnitude().clone()).unwrap();
        for _ in 0..count {
            out.push_str(&letter);
        }
    }
    if g.coset != 0 {
        out.push_str(spec.label(g.coset));
    }
    out
}

/// `h_1 t_1 # ... # h_n t_n` for a solution tuple.
pub fn normal_form_tuple(spec: &GroupSpec, tuple: &[GroupElement]) -> String {
    tuple.iter().map(|g| normal_form(spec, g)).collect::<Vec<_>>().join("#")
}

/// Letter length of the normal-form word (inverse letters count once).
pub fn normal_form_length(tuple: &[GroupElement]) -> usize {
    let letters: usize = tuple
        .iter()
        .map(|g| {
            let content: usize = g
                .vector
                .iter()
                .map(|v| usize::try_from(v.abs().magnitude().clone()).unwrap())
                .sum();
            content + usize::from(g.coset != 0)
        })
        .sum();
    letters + tuple.len().saturating_sub(1)
}

/// Enumerate and insist the caps were not the limiting factor.
pub fn enumerate_complete(system: &Edt0lSystem, max_len: usize, max_steps: usize) -> BTreeSet<String> {
    let (words, saturated) = system.enumerate_strings(max_len, max_steps);
    assert!(!saturated, "enumeration saturated at max_len={max_len} max_steps={max_steps}");
    words
}

/// Largest coordinate magnitude over the ball; any tuple whose total weight
/// fits in the ball has all entries within this bound.
pub fn ball_entry_bound(ball: &BTreeMap<GroupElement, u64>) -> u64 {
    ball.keys()
        .flat_map(|g| g.vector.iter())
        .map(|v| u64::try_from(v.abs().magnitude().clone()).unwrap())
        .max()
        .unwrap_or(0)
}

pub fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}
