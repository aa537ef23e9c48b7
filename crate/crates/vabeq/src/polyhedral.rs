//! Polyhedral (Presburger-definable) subsets of `Z^r`.
//!
//! A set is kept as a finite union of basic sets, each basic set a finite
//! conjunction of elementary conditions: a linear equation `u.z = a`, a
//! strict linear inequality `u.z > a`, or a linear congruence
//! `u.z = a mod b`. Non-strict inequalities are encoded as `u.z > a - 1`.
//! The representation is closed under Boolean operations, products and
//! affine preimages; membership and weighted counting are the only queries
//! the rest of the crate needs, so no projection or canonicalization is
//! attempted.

use crate::matrix::IntMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyhedralError {
    #[error("dimension mismatch: set is over Z^{expected}, argument over Z^{got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("weight vector has {got} weights, set dimension is {expected}")]
    WeightLength { expected: usize, got: usize },
    #[error("weights must be positive")]
    NonPositiveWeight,
    #[error("congruence modulus must be positive")]
    NonPositiveModulus,
    #[error("affine map shape mismatch")]
    AffineShape,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElementaryKind {
    /// `u.z = a`
    Equation,
    /// `u.z > a`
    StrictInequality,
    /// `u.z = a (mod b)`, `b > 0`
    Congruence { modulus: BigInt },
}

/// One elementary condition on `Z^r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementarySet {
    pub kind: ElementaryKind,
    pub normal: Vec<BigInt>,
    pub constant: BigInt,
}

impl ElementarySet {
    pub fn equation(normal: Vec<BigInt>, constant: BigInt) -> Self {
        ElementarySet { kind: ElementaryKind::Equation, normal, constant }
    }

    pub fn strict_inequality(normal: Vec<BigInt>, constant: BigInt) -> Self {
        ElementarySet { kind: ElementaryKind::StrictInequality, normal, constant }
    }

    pub fn congruence(
        normal: Vec<BigInt>,
        constant: BigInt,
        modulus: BigInt,
    ) -> Result<Self, PolyhedralError> {
        if !modulus.is_positive() {
            return Err(PolyhedralError::NonPositiveModulus);
        }
        Ok(ElementarySet { kind: ElementaryKind::Congruence { modulus }, normal, constant })
    }

    pub fn dimension(&self) -> usize {
        self.normal.len()
    }

    fn dot(&self, z: &[BigInt]) -> BigInt {
        self.normal.iter().zip(z).map(|(u, v)| u * v).sum()
    }

    pub fn holds(&self, z: &[BigInt]) -> bool {
        let s = self.dot(z);
        match &self.kind {
            ElementaryKind::Equation => s == self.constant,
            ElementaryKind::StrictInequality => s > self.constant,
            ElementaryKind::Congruence { modulus } => {
                (&s - &self.constant).mod_floor(modulus).is_zero()
            }
        }
    }

    /// Complement as a union of elementary conditions.
    fn complement(&self) -> Vec<ElementarySet> {
        match &self.kind {
            ElementaryKind::Equation => vec![
                ElementarySet::strict_inequality(self.normal.clone(), self.constant.clone()),
                ElementarySet::strict_inequality(
                    self.normal.iter().map(|u| -u).collect(),
                    -self.constant.clone(),
                ),
            ],
            ElementaryKind::StrictInequality => vec![ElementarySet::strict_inequality(
                self.normal.iter().map(|u| -u).collect(),
                -self.constant.clone() - 1,
            )],
            ElementaryKind::Congruence { modulus } => {
                let target = self.constant.mod_floor(modulus);
                let mut out = Vec::new();
                let mut residue = BigInt::zero();
                while &residue < modulus {
                    if residue != target {
                        out.push(ElementarySet {
                            kind: ElementaryKind::Congruence { modulus: modulus.clone() },
                            normal: self.normal.clone(),
                            constant: residue.clone(),
                        });
                    }
                    residue += 1;
                }
                out
            }
        }
    }

    /// Condition on `p` equivalent to `self` holding at `p*M + q`.
    fn preimage(&self, m: &IntMatrix, q: &[BigInt]) -> Result<ElementarySet, PolyhedralError> {
        if m.cols() != self.normal.len() || q.len() != self.normal.len() {
            return Err(PolyhedralError::AffineShape);
        }
        // u.(pM + q) = p.(M u) + u.q
        let mut new_normal = vec![BigInt::zero(); m.rows()];
        for (i, slot) in new_normal.iter_mut().enumerate() {
            for j in 0..m.cols() {
                *slot += &m[(i, j)] * &self.normal[j];
            }
        }
        let shift: BigInt = self.normal.iter().zip(q).map(|(u, v)| u * v).sum();
        Ok(ElementarySet {
            kind: self.kind.clone(),
            normal: new_normal,
            constant: &self.constant - shift,
        })
    }
}

/// Conjunction of elementary conditions. An empty conjunction is all of `Z^r`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BasicSet {
    pub conjuncts: Vec<ElementarySet>,
}

impl BasicSet {
    pub fn holds(&self, z: &[BigInt]) -> bool {
        self.conjuncts.iter().all(|e| e.holds(z))
    }
}

/// Finite union of basic sets. An empty union is the empty set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyhedralSet {
    dimension: usize,
    pub disjuncts: Vec<BasicSet>,
}

impl PolyhedralSet {
    pub fn empty(dimension: usize) -> Self {
        PolyhedralSet { dimension, disjuncts: Vec::new() }
    }

    pub fn universe(dimension: usize) -> Self {
        PolyhedralSet { dimension, disjuncts: vec![BasicSet::default()] }
    }

    pub fn from_basic(dimension: usize, conjuncts: Vec<ElementarySet>) -> Result<Self, PolyhedralError> {
        for e in &conjuncts {
            if e.dimension() != dimension {
                return Err(PolyhedralError::DimensionMismatch {
                    expected: dimension,
                    got: e.dimension(),
                });
            }
        }
        Ok(PolyhedralSet { dimension, disjuncts: vec![BasicSet { conjuncts }] })
    }

    pub fn from_elementary(e: ElementarySet) -> Self {
        PolyhedralSet { dimension: e.dimension(), disjuncts: vec![BasicSet { conjuncts: vec![e] }] }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn member(&self, z: &[BigInt]) -> Result<bool, PolyhedralError> {
        if z.len() != self.dimension {
            return Err(PolyhedralError::DimensionMismatch { expected: self.dimension, got: z.len() });
        }
        Ok(self.disjuncts.iter().any(|b| b.holds(z)))
    }

    fn check_same_dimension(&self, other: &PolyhedralSet) -> Result<(), PolyhedralError> {
        if self.dimension != other.dimension {
            return Err(PolyhedralError::DimensionMismatch {
                expected: self.dimension,
                got: other.dimension,
            });
        }
        Ok(())
    }

    pub fn union(&self, other: &PolyhedralSet) -> Result<PolyhedralSet, PolyhedralError> {
        self.check_same_dimension(other)?;
        let mut disjuncts = self.disjuncts.clone();
        disjuncts.extend(other.disjuncts.iter().cloned());
        Ok(PolyhedralSet { dimension: self.dimension, disjuncts })
    }

    pub fn intersection(&self, other: &PolyhedralSet) -> Result<PolyhedralSet, PolyhedralError> {
        self.check_same_dimension(other)?;
        let mut disjuncts = Vec::with_capacity(self.disjuncts.len() * other.disjuncts.len());
        for a in &self.disjuncts {
            for b in &other.disjuncts {
                let mut conjuncts = a.conjuncts.clone();
                conjuncts.extend(b.conjuncts.iter().cloned());
                disjuncts.push(BasicSet { conjuncts });
            }
        }
        Ok(PolyhedralSet { dimension: self.dimension, disjuncts })
    }

    /// De Morgan over the disjuncts; elementary complements as unions.
    pub fn complement(&self) -> PolyhedralSet {
        let mut result = PolyhedralSet::universe(self.dimension);
        for basic in &self.disjuncts {
            let mut basic_complement = PolyhedralSet::empty(self.dimension);
            for e in &basic.conjuncts {
                for piece in e.complement() {
                    basic_complement = basic_complement
                        .union(&PolyhedralSet::from_elementary(piece))
                        .expect("same dimension");
                }
            }
            result = result.intersection(&basic_complement).expect("same dimension");
        }
        result
    }

    pub fn difference(&self, other: &PolyhedralSet) -> Result<PolyhedralSet, PolyhedralError> {
        self.intersection(&other.complement())
    }

    /// Cartesian product; coordinates of `other` follow those of `self`.
    pub fn product(&self, other: &PolyhedralSet) -> PolyhedralSet {
        let r = self.dimension;
        let s = other.dimension;
        let mut disjuncts = Vec::new();
        for a in &self.disjuncts {
            for b in &other.disjuncts {
                let mut conjuncts = Vec::new();
                for e in &a.conjuncts {
                    let mut normal = e.normal.clone();
                    normal.extend(std::iter::repeat_with(BigInt::zero).take(s));
                    conjuncts.push(ElementarySet {
                        kind: e.kind.clone(),
                        normal,
                        constant: e.constant.clone(),
                    });
                }
                for e in &b.conjuncts {
                    let mut normal: Vec<BigInt> =
                        std::iter::repeat_with(BigInt::zero).take(r).collect();
                    normal.extend(e.normal.iter().cloned());
                    conjuncts.push(ElementarySet {
                        kind: e.kind.clone(),
                        normal,
                        constant: e.constant.clone(),
                    });
                }
                disjuncts.push(BasicSet { conjuncts });
            }
        }
        PolyhedralSet { dimension: r + s, disjuncts }
    }

    /// Preimage of `self` (over `Z^s`) under the affine map `p -> p*M + q`.
    pub fn affine_preimage(
        &self,
        m: &IntMatrix,
        q: &[BigInt],
    ) -> Result<PolyhedralSet, PolyhedralError> {
        if m.cols() != self.dimension || q.len() != self.dimension {
            return Err(PolyhedralError::AffineShape);
        }
        let mut disjuncts = Vec::with_capacity(self.disjuncts.len());
        for basic in &self.disjuncts {
            let conjuncts = basic
                .conjuncts
                .iter()
                .map(|e| e.preimage(m, q))
                .collect::<Result<Vec<_>, _>>()?;
            disjuncts.push(BasicSet { conjuncts });
        }
        Ok(PolyhedralSet { dimension: m.rows(), disjuncts })
    }

    /// Split into per-orthant pieces. Piece `j` is contained in orthant `j`
    /// and claims boundary points not claimed by orthants `0..j`; reflecting
    /// it by the returned sign vector yields a set without negative
    /// coordinates. Pieces are pairwise disjoint with union `self`.
    pub fn orthant_decompose(&self) -> Vec<(PolyhedralSet, Vec<i8>)> {
        let r = self.dimension;
        let mut out = Vec::new();
        let mut previous_orthants: Vec<PolyhedralSet> = Vec::new();
        for mask in 0..(1u64 << r) {
            let signs: Vec<i8> =
                (0..r).map(|i| if mask & (1 << i) == 0 { 1 } else { -1 }).collect();
            let orthant = orthant_set(&signs);
            let mut piece = self.intersection(&orthant).expect("same dimension");
            for q in &previous_orthants {
                piece = piece.intersection(&q.complement()).expect("same dimension");
            }
            out.push((piece, signs));
            previous_orthants.push(orthant);
        }
        out
    }

    /// Exact counts `sigma(0..=max_weight)` over the finite search box.
    pub fn enumerate_by_weight(
        &self,
        weights: &WeightVector,
        max_weight: u64,
    ) -> Result<Vec<u64>, PolyhedralError> {
        if weights.weights.len() != self.dimension {
            return Err(PolyhedralError::WeightLength {
                expected: self.dimension,
                got: weights.weights.len(),
            });
        }
        let mut counts = vec![0u64; max_weight as usize + 1];
        let mut point = vec![BigInt::zero(); self.dimension];
        self.enumerate_rec(weights, max_weight, 0, 0, &mut point, &mut counts)?;
        Ok(counts)
    }

    fn enumerate_rec(
        &self,
        weights: &WeightVector,
        max_weight: u64,
        coord: usize,
        used: u64,
        point: &mut Vec<BigInt>,
        counts: &mut Vec<u64>,
    ) -> Result<(), PolyhedralError> {
        if coord == self.dimension {
            if self.member(point)? {
                counts[used as usize] += 1;
            }
            return Ok(());
        }
        let w = weights.weights[coord];
        let reach = ((max_weight - used) / w) as i64;
        for v in -reach..=reach {
            point[coord] = BigInt::from(v);
            let used_here = used + v.unsigned_abs() * w;
            self.enumerate_rec(weights, max_weight, coord + 1, used_here, point, counts)?;
        }
        point[coord] = BigInt::zero();
        Ok(())
    }
}

/// The orthant `{z : sign_i * z_i >= 0}` for a sign vector.
fn orthant_set(signs: &[i8]) -> PolyhedralSet {
    let r = signs.len();
    let conjuncts = signs
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let mut normal = vec![BigInt::zero(); r];
            normal[i] = BigInt::from(s);
            // sign*z_i >= 0 encoded strictly as sign*z_i > -1
            ElementarySet::strict_inequality(normal, BigInt::from(-1))
        })
        .collect();
    PolyhedralSet { dimension: r, disjuncts: vec![BasicSet { conjuncts }] }
}

/// Positive per-coordinate weights; the weight of `z` is `sum |z_i| * w_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector {
    pub weights: Vec<u64>,
}

impl WeightVector {
    pub fn new(weights: Vec<u64>) -> Result<Self, PolyhedralError> {
        if weights.contains(&0) {
            return Err(PolyhedralError::NonPositiveWeight);
        }
        Ok(WeightVector { weights })
    }

    pub fn unit(dimension: usize) -> Self {
        WeightVector { weights: vec![1; dimension] }
    }

    pub fn weight_of(&self, z: &[BigInt]) -> u64 {
        z.iter()
            .zip(&self.weights)
            .map(|(v, &w)| u64::try_from(v.abs().magnitude().clone()).expect("desk-scale weight") * w)
            .sum()
    }
}
