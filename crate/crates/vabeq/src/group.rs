//! Arithmetic in a virtually abelian group presented as an extension of
//! `Z^k` by a finite coset set.
//!
//! Elements are kept in the normal form `v t_i`: an integer vector `v`
//! followed by a transversal representative. The extension data is a
//! `GL_k(Z)` action matrix per coset (row-vector convention, `w -> w*phi`),
//! a cocycle table `t_i t_j = z_ij t_{sigma(i,j)}`, and the index table
//! `sigma` itself. All of the group axioms this encodes are checked by
//! [`GroupSpec::new`].

use crate::matrix::{unimodular_inverse, IntMatrix, MatrixError};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("coset count must be at least 1")]
    NoCosets,
    #[error("expected {expected} labels, actions, or cocycle rows, got {got}")]
    TableShape { expected: usize, got: usize },
    #[error("action matrix {coset} is not {rank}x{rank}")]
    ActionShape { coset: usize, rank: usize },
    #[error("cocycle vector ({i},{j}) does not have length {rank}")]
    CocycleShape { i: usize, j: usize, rank: usize },
    #[error("sigma({i},{j}) = {value} is out of range")]
    SigmaRange { i: usize, j: usize, value: usize },
    #[error("action of the identity coset is not the identity matrix")]
    IdentityAction,
    #[error("cocycle vector ({i},{j}) involving the identity coset is nonzero")]
    IdentityCocycle { i: usize, j: usize },
    #[error("sigma({i},{j}) does not fix the identity coset")]
    IdentitySigma { i: usize, j: usize },
    #[error("action matrix {coset} is not unimodular")]
    NonUnimodularAction { coset: usize },
    #[error("action incompatibility at cosets ({i},{j}): phi_j * phi_i != phi_sigma(i,j)")]
    ActionCompatibility { i: usize, j: usize },
    #[error("cocycle vector condition fails at cosets ({i},{j},{l})")]
    CocycleCondition { i: usize, j: usize, l: usize },
    #[error("sigma associativity fails at cosets ({i},{j},{l})")]
    SigmaAssociativity { i: usize, j: usize, l: usize },
    #[error("coset {coset} has no inverse coset")]
    MissingInverse { coset: usize },
    #[error("element has vector length {got}, group rank is {expected}")]
    VectorLength { expected: usize, got: usize },
    #[error("element coset index {got} out of range (coset count {count})")]
    CosetRange { got: usize, count: usize },
    #[error("generator index {index} out of range")]
    GeneratorIndex { index: usize },
    #[error("weights must be positive")]
    NonPositiveWeight,
    #[error("generator list and weight list have different lengths")]
    GeneratorWeightLength,
    #[error("ball search exceeded the resource limit of {limit} elements")]
    BallResourceLimit { limit: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Group element in normal form `v t_i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    pub vector: Vec<BigInt>,
    pub coset: usize,
}

impl GroupElement {
    pub fn new(vector: Vec<BigInt>, coset: usize) -> Self {
        GroupElement { vector, coset }
    }

    pub fn from_i64(vector: &[i64], coset: usize) -> Self {
        GroupElement { vector: vector.iter().map(|&v| BigInt::from(v)).collect(), coset }
    }
}

/// Extension data for a virtually abelian group.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    rank: usize,
    labels: Vec<String>,
    action: Vec<IntMatrix>,
    action_inverse: Vec<IntMatrix>,
    cocycle_vectors: Vec<Vec<Vec<BigInt>>>,
    cocycle_indices: Vec<Vec<usize>>,
    inverse_coset: Vec<usize>,
}

impl GroupSpec {
    /// Validate the extension data and build the spec. Each axiom failure is
    /// reported as its own error; the first violation encountered wins.
    pub fn new(
        rank: usize,
        labels: Vec<String>,
        action: Vec<IntMatrix>,
        cocycle_vectors: Vec<Vec<Vec<BigInt>>>,
        cocycle_indices: Vec<Vec<usize>>,
    ) -> Result<Self, GroupError> {
        let d = labels.len();
        if d == 0 {
            return Err(GroupError::NoCosets);
        }
        if action.len() != d {
            return Err(GroupError::TableShape { expected: d, got: action.len() });
        }
        if cocycle_vectors.len() != d || cocycle_indices.len() != d {
            return Err(GroupError::TableShape {
                expected: d,
                got: cocycle_vectors.len().min(cocycle_indices.len()),
            });
        }
        for (i, m) in action.iter().enumerate() {
            if m.rows() != rank || m.cols() != rank {
                return Err(GroupError::ActionShape { coset: i, rank });
            }
        }
        for i in 0..d {
            if cocycle_vectors[i].len() != d {
                return Err(GroupError::TableShape { expected: d, got: cocycle_vectors[i].len() });
            }
            if cocycle_indices[i].len() != d {
                return Err(GroupError::TableShape { expected: d, got: cocycle_indices[i].len() });
            }
            for j in 0..d {
                if cocycle_vectors[i][j].len() != rank {
                    return Err(GroupError::CocycleShape { i, j, rank });
                }
                if cocycle_indices[i][j] >= d {
                    return Err(GroupError::SigmaRange { i, j, value: cocycle_indices[i][j] });
                }
            }
        }

        // Identity coset conventions.
        if !action[0].is_identity() {
            return Err(GroupError::IdentityAction);
        }
        for j in 0..d {
            if !cocycle_vectors[0][j].iter().all(|v| v.is_zero()) {
                return Err(GroupError::IdentityCocycle { i: 0, j });
            }
            if !cocycle_vectors[j][0].iter().all(|v| v.is_zero()) {
                return Err(GroupError::IdentityCocycle { i: j, j: 0 });
            }
            if cocycle_indices[0][j] != j {
                return Err(GroupError::IdentitySigma { i: 0, j });
            }
            if cocycle_indices[j][0] != j {
                return Err(GroupError::IdentitySigma { i: j, j: 0 });
            }
        }

        // Unimodularity and inverses of the action matrices.
        let mut action_inverse = Vec::with_capacity(d);
        for (i, m) in action.iter().enumerate() {
            match unimodular_inverse(m) {
                Ok(inv) => action_inverse.push(inv),
                Err(MatrixError::NotUnimodular { .. }) => {
                    return Err(GroupError::NonUnimodularAction { coset: i })
                }
                Err(e) => return Err(e.into()),
            }
        }

        // phi_j * phi_i = phi_sigma(i,j) in the row-vector convention.
        for i in 0..d {
            for j in 0..d {
                let composed = action[j].mul(&action[i])?;
                if composed != action[cocycle_indices[i][j]] {
                    return Err(GroupError::ActionCompatibility { i, j });
                }
            }
        }

        // Associativity: sigma and cocycle-vector conditions.
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    let sij = cocycle_indices[i][j];
                    let sjl = cocycle_indices[j][l];
                    if cocycle_indices[sij][l] != cocycle_indices[i][sjl] {
                        return Err(GroupError::SigmaAssociativity { i, j, l });
                    }
                    let left: Vec<BigInt> = cocycle_vectors[i][j]
                        .iter()
                        .zip(&cocycle_vectors[sij][l])
                        .map(|(a, b)| a + b)
                        .collect();
                    let twisted = action[i].apply_row(&cocycle_vectors[j][l])?;
                    let right: Vec<BigInt> = twisted
                        .iter()
                        .zip(&cocycle_vectors[i][sjl])
                        .map(|(a, b)| a + b)
                        .collect();
                    if left != right {
                        return Err(GroupError::CocycleCondition { i, j, l });
                    }
                }
            }
        }

        // Every coset index needs an inverse index.
        let mut inverse_coset = vec![usize::MAX; d];
        for (i, slot) in inverse_coset.iter_mut().enumerate() {
            match (0..d).find(|&j| cocycle_indices[i][j] == 0) {
                Some(j) => *slot = j,
                None => return Err(GroupError::MissingInverse { coset: i }),
            }
        }

        Ok(GroupSpec {
            rank,
            labels,
            action,
            action_inverse,
            cocycle_vectors,
            cocycle_indices,
            inverse_coset,
        })
    }

    /// The free abelian group `Z^k` as a trivial extension.
    pub fn free_abelian(rank: usize) -> Self {
        GroupSpec::new(
            rank,
            vec!["e".to_string()],
            vec![IntMatrix::identity(rank)],
            vec![vec![vec![BigInt::zero(); rank]]],
            vec![vec![0]],
        )
        .expect("trivial extension is valid")
    }

    /// The infinite dihedral group: `Z` extended by an order-2 reflection.
    pub fn infinite_dihedral() -> Self {
        GroupSpec::new(
            1,
            vec!["e".to_string(), "t".to_string()],
            vec![IntMatrix::identity(1), IntMatrix::from_i64(1, 1, &[-1]).unwrap()],
            vec![
                vec![vec![BigInt::zero()], vec![BigInt::zero()]],
                vec![vec![BigInt::zero()], vec![BigInt::zero()]],
            ],
            vec![vec![0, 1], vec![1, 0]],
        )
        .expect("dihedral extension is valid")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn coset_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, coset: usize) -> &str {
        &self.labels[coset]
    }

    pub fn action(&self, coset: usize) -> &IntMatrix {
        &self.action[coset]
    }

    pub fn action_inverse(&self, coset: usize) -> &IntMatrix {
        &self.action_inverse[coset]
    }

    pub fn cocycle_vector(&self, i: usize, j: usize) -> &[BigInt] {
        &self.cocycle_vectors[i][j]
    }

    pub fn cocycle_index(&self, i: usize, j: usize) -> usize {
        self.cocycle_indices[i][j]
    }

    pub fn inverse_coset(&self, i: usize) -> usize {
        self.inverse_coset[i]
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { vector: vec![BigInt::zero(); self.rank], coset: 0 }
    }

    pub fn check_element(&self, g: &GroupElement) -> Result<(), GroupError> {
        if g.vector.len() != self.rank {
            return Err(GroupError::VectorLength { expected: self.rank, got: g.vector.len() });
        }
        if g.coset >= self.coset_count() {
            return Err(GroupError::CosetRange { got: g.coset, count: self.coset_count() });
        }
        Ok(())
    }

    /// `(v, i) * (w, j) = (v + w*phi_i + z_ij, sigma(i,j))`.
    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let twisted = self.action[g.coset].apply_row(&h.vector).expect("rank checked");
        let z = &self.cocycle_vectors[g.coset][h.coset];
        let vector = g
            .vector
            .iter()
            .zip(twisted.iter().zip(z))
            .map(|(a, (b, c))| a + b + c)
            .collect();
        GroupElement { vector, coset: self.cocycle_indices[g.coset][h.coset] }
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        let j = self.inverse_coset[g.coset];
        let shifted: Vec<BigInt> = g
            .vector
            .iter()
            .zip(&self.cocycle_vectors[g.coset][j])
            .map(|(a, b)| -(a + b))
            .collect();
        let vector = self.action_inverse[g.coset].apply_row(&shifted).expect("rank checked");
        GroupElement { vector, coset: j }
    }

    /// Left-to-right product of generators and inverses.
    pub fn evaluate_word(
        &self,
        generators: &WeightedGeneratingSet,
        word: &[(usize, i8)],
    ) -> Result<GroupElement, GroupError> {
        let mut acc = self.identity();
        for &(index, sign) in word {
            let gen = generators
                .elements
                .get(index)
                .ok_or(GroupError::GeneratorIndex { index })?;
            let step = if sign >= 0 { gen.clone() } else { self.inverse(gen) };
            acc = self.multiply(&acc, &step);
        }
        Ok(acc)
    }

    /// Exact geodesic weights of every element of weight at most `max_weight`,
    /// by Dijkstra search over generator steps (inverses included with equal
    /// weight). Deterministic: ties resolve by the `(vector, coset)` order.
    pub fn ball(
        &self,
        generators: &WeightedGeneratingSet,
        max_weight: u64,
    ) -> Result<BTreeMap<GroupElement, u64>, GroupError> {
        self.ball_limited(generators, max_weight, DEFAULT_BALL_LIMIT)
    }

    pub fn ball_limited(
        &self,
        generators: &WeightedGeneratingSet,
        max_weight: u64,
        limit: usize,
    ) -> Result<BTreeMap<GroupElement, u64>, GroupError> {
        generators.check(self)?;
        let steps = generators.steps_with_inverses(self);
        let mut dist: HashMap<GroupElement, u64> = HashMap::new();
        let mut done: BTreeMap<GroupElement, u64> = BTreeMap::new();
        let mut heap: BinaryHeap<std::cmp::Reverse<(u64, GroupElement)>> = BinaryHeap::new();
        let identity = self.identity();
        dist.insert(identity.clone(), 0);
        heap.push(std::cmp::Reverse((0, identity)));
        while let Some(std::cmp::Reverse((w, g))) = heap.pop() {
            if done.contains_key(&g) {
                continue;
            }
            done.insert(g.clone(), w);
            for (step, step_weight) in &steps {
                let next_weight = w + step_weight;
                if next_weight > max_weight {
                    continue;
                }
                let next = self.multiply(&g, step);
                let better = dist.get(&next).is_none_or(|&cur| next_weight < cur);
                if better {
                    dist.insert(next.clone(), next_weight);
                    if dist.len() > limit {
                        return Err(GroupError::BallResourceLimit { limit });
                    }
                    heap.push(std::cmp::Reverse((next_weight, next)));
                }
            }
        }
        Ok(done)
    }
}

pub const DEFAULT_BALL_LIMIT: usize = 4_000_000;

/// Generators as group elements with positive weights. Inverses are treated
/// as available at the same weight whether or not they are listed.
#[derive(Clone, Debug)]
pub struct WeightedGeneratingSet {
    pub names: Vec<String>,
    pub elements: Vec<GroupElement>,
    pub weights: Vec<u64>,
}

impl WeightedGeneratingSet {
    pub fn new(
        names: Vec<String>,
        elements: Vec<GroupElement>,
        weights: Vec<u64>,
    ) -> Result<Self, GroupError> {
        if elements.len() != weights.len() || names.len() != elements.len() {
            return Err(GroupError::GeneratorWeightLength);
        }
        if weights.contains(&0) {
            return Err(GroupError::NonPositiveWeight);
        }
        Ok(WeightedGeneratingSet { names, elements, weights })
    }

    /// Standard generators `a_1..a_k` (plus every non-identity transversal
    /// letter), all of weight 1. This is the normal-form generating set.
    pub fn standard(spec: &GroupSpec) -> Self {
        let mut names = Vec::new();
        let mut elements = Vec::new();
        let k = spec.rank();
        for i in 0..k {
            names.push(if k == 1 { "a".to_string() } else { format!("a{}", i + 1) });
            let mut v = vec![BigInt::zero(); k];
            v[i] = BigInt::one();
            elements.push(GroupElement::new(v, 0));
        }
        for c in 1..spec.coset_count() {
            names.push(spec.label(c).to_string());
            elements.push(GroupElement::new(vec![BigInt::zero(); k], c));
        }
        let weights = vec![1; elements.len()];
        WeightedGeneratingSet { names, elements, weights }
    }

    pub fn check(&self, spec: &GroupSpec) -> Result<(), GroupError> {
        for e in &self.elements {
            spec.check_element(e)?;
        }
        Ok(())
    }

    fn steps_with_inverses(&self, spec: &GroupSpec) -> Vec<(GroupElement, u64)> {
        let mut steps = Vec::with_capacity(self.elements.len() * 2);
        for (g, &w) in self.elements.iter().zip(&self.weights) {
            steps.push((g.clone(), w));
            let inv = spec.inverse(g);
            if inv != *g {
                steps.push((inv, w));
            }
        }
        steps
    }
}
