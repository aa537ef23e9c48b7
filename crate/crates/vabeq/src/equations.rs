//! Systems of equations over a virtually abelian group and their reduction,
//! coset tuple by coset tuple, to twisted systems over `Z^k` and then to
//! integer linear systems over `Z`.
//!
//! The reduction substitutes `X_i = Y_i t_{u_i}` for a fixed transversal
//! tuple `u` and evaluates each equation left to right in the group,
//! carrying a formal linear part (one aggregated `k x k` matrix per
//! variable) alongside the concrete constant vector and coset index. A
//! tuple is kept exactly when every equation lands back in the identity
//! coset; the accumulated linear identities form the twisted system.

use crate::group::{GroupElement, GroupError, GroupSpec, WeightedGeneratingSet};
use crate::matrix::IntMatrix;
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EquationError {
    #[error("variable index {index} out of range for {variables} variables")]
    VariableRange { index: usize, variables: usize },
    #[error("equation {index} is empty")]
    EmptyEquation { index: usize },
    #[error("system has no equations")]
    NoEquations,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// One factor of a group equation: a signed variable or a constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquationItem {
    /// Zero-based variable index; `inverse` marks an exponent of -1.
    Variable { index: usize, inverse: bool },
    Constant(GroupElement),
}

/// A single equation `item_1 item_2 ... = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupEquation {
    pub items: Vec<EquationItem>,
}

/// A finite system of equations with a fixed number of variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupEquationSystem {
    pub variables: usize,
    pub equations: Vec<GroupEquation>,
}

impl GroupEquationSystem {
    pub fn new(variables: usize, equations: Vec<GroupEquation>) -> Result<Self, EquationError> {
        if equations.is_empty() {
            return Err(EquationError::NoEquations);
        }
        for (i, eq) in equations.iter().enumerate() {
            if eq.items.is_empty() {
                return Err(EquationError::EmptyEquation { index: i });
            }
            for item in &eq.items {
                if let EquationItem::Variable { index, .. } = item {
                    if *index >= variables {
                        return Err(EquationError::VariableRange { index: *index, variables });
                    }
                }
            }
        }
        Ok(GroupEquationSystem { variables, equations })
    }

    pub fn check_constants(&self, spec: &GroupSpec) -> Result<(), EquationError> {
        for eq in &self.equations {
            for item in &eq.items {
                if let EquationItem::Constant(g) = item {
                    spec.check_element(g)?;
                }
            }
        }
        Ok(())
    }

    /// Evaluate an equation at a concrete assignment; true iff it holds.
    pub fn holds_at(&self, spec: &GroupSpec, assignment: &[GroupElement]) -> bool {
        self.equations.iter().all(|eq| {
            let mut acc = spec.identity();
            for item in &eq.items {
                let factor = match item {
                    EquationItem::Variable { index, inverse: false } => assignment[*index].clone(),
                    EquationItem::Variable { index, inverse: true } => {
                        spec.inverse(&assignment[*index])
                    }
                    EquationItem::Constant(g) => g.clone(),
                };
                acc = spec.multiply(&acc, &factor);
            }
            acc == spec.identity()
        })
    }
}

/// One twisted equation `sum_i Y_i B_i + C = 0` over `Z^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedEquation {
    /// One aggregated `k x k` coefficient matrix per variable.
    pub coefficients: Vec<IntMatrix>,
    pub constant: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedSystem {
    pub rank: usize,
    pub variables: usize,
    pub equations: Vec<TwistedEquation>,
}

impl TwistedSystem {
    /// True iff the assignment `Y_1..Y_n` (each in `Z^k`) satisfies every
    /// equation.
    pub fn holds_at(&self, assignment: &[Vec<BigInt>]) -> bool {
        self.equations.iter().all(|eq| {
            let mut acc = eq.constant.clone();
            for (y, b) in assignment.iter().zip(&eq.coefficients) {
                let contrib = b.apply_row(y).expect("rank checked");
                for (slot, c) in acc.iter_mut().zip(contrib) {
                    *slot += c;
                }
            }
            acc.iter().all(|v| v.is_zero())
        })
    }
}

/// A square integer linear system `x * B = c` over row vectors.
///
/// `primary_vars` counts the scalar variables that correspond to actual
/// group variables (`k * n`); any columns or rows beyond the originals are
/// zero padding and padding variables are unconstrained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    pub vars: usize,
    pub matrix: IntMatrix,
    pub rhs: Vec<BigInt>,
    pub primary_vars: usize,
    /// Unpadded scalar equations over the primary variables, as
    /// (coefficients, right-hand side) pairs.
    pub raw_equations: Vec<(Vec<BigInt>, BigInt)>,
}

impl LinearSystem {
    pub fn holds_at(&self, x: &[BigInt]) -> bool {
        debug_assert_eq!(x.len(), self.vars);
        for j in 0..self.vars {
            let mut acc = BigInt::zero();
            for (i, xi) in x.iter().enumerate() {
                if !xi.is_zero() {
                    acc += xi * &self.matrix[(i, j)];
                }
            }
            if acc != self.rhs[j] {
                return false;
            }
        }
        true
    }
}

/// Reduction of one group system for one valid transversal tuple.
#[derive(Clone, Debug)]
pub struct CosetCase {
    pub tuple: Vec<usize>,
    pub twisted: TwistedSystem,
    pub linear: LinearSystem,
}

/// All valid transversal tuples with their twisted and linear systems.
#[derive(Clone, Debug)]
pub struct CosetDecomposition {
    pub rank: usize,
    pub variables: usize,
    pub cases: Vec<CosetCase>,
}

/// Symbolic product state while scanning an equation left to right:
/// `sum_i Y_i * M_i + constant`, sitting in coset `coset`.
struct SymbolicProduct {
    coefficients: Vec<IntMatrix>,
    constant: Vec<BigInt>,
    coset: usize,
}

impl SymbolicProduct {
    fn new(rank: usize, variables: usize) -> Self {
        SymbolicProduct {
            coefficients: vec![IntMatrix::zero(rank, rank); variables],
            constant: vec![BigInt::zero(); rank],
            coset: 0,
        }
    }

    fn add_constant_vector(&mut self, v: &[BigInt]) {
        for (slot, x) in self.constant.iter_mut().zip(v) {
            *slot += x;
        }
    }

    /// Multiply on the right by the concrete element `(w, j)`.
    fn mul_constant(&mut self, spec: &GroupSpec, g: &GroupElement) {
        let twisted = spec.action(self.coset).apply_row(&g.vector).expect("rank");
        self.add_constant_vector(&twisted);
        self.add_constant_vector(spec.cocycle_vector(self.coset, g.coset));
        self.coset = spec.cocycle_index(self.coset, g.coset);
    }

    /// Multiply on the right by `X_m = Y_m t_u` with `Y_m` formal.
    fn mul_variable(&mut self, spec: &GroupSpec, m: usize, u: usize) {
        let phi = spec.action(self.coset);
        let acc = &mut self.coefficients[m];
        for r in 0..phi.rows() {
            for c in 0..phi.cols() {
                let t = phi[(r, c)].clone();
                acc[(r, c)] += t;
            }
        }
        self.add_constant_vector(spec.cocycle_vector(self.coset, u));
        self.coset = spec.cocycle_index(self.coset, u);
    }

    /// Multiply on the right by `X_m^{-1} = (Y_m t_u)^{-1}`.
    fn mul_variable_inverse(&mut self, spec: &GroupSpec, m: usize, u: usize) {
        let ju = spec.inverse_coset(u);
        // (Y t_u)^{-1} = (-(Y + z_{u,ju}) * phi_u^{-1}, ju)
        let a = spec.action_inverse(u);
        let phi = spec.action(self.coset);
        let composed = a.mul(phi).expect("rank");
        let acc = &mut self.coefficients[m];
        for r in 0..composed.rows() {
            for c in 0..composed.cols() {
                let t = composed[(r, c)].clone();
                acc[(r, c)] -= t;
            }
        }
        let shift = composed
            .apply_row(spec.cocycle_vector(u, ju))
            .expect("rank")
            .iter()
            .map(|v| -v)
            .collect::<Vec<_>>();
        self.add_constant_vector(&shift);
        self.add_constant_vector(spec.cocycle_vector(self.coset, ju));
        self.coset = spec.cocycle_index(self.coset, ju);
    }
}

/// Rotate any leading constants to the end of the equation; conjugating an
/// equation by a constant does not change its solution set.
fn fold_leading_constants(eq: &GroupEquation) -> GroupEquation {
    let first_var = eq
        .items
        .iter()
        .position(|item| matches!(item, EquationItem::Variable { .. }));
    match first_var {
        None | Some(0) => eq.clone(),
        Some(p) => {
            let mut items: Vec<EquationItem> = eq.items[p..].to_vec();
            items.extend(eq.items[..p].iter().cloned());
            GroupEquation { items }
        }
    }
}

/// Reduce a group system to twisted systems over `Z^k`, one per transversal
/// tuple whose equations all land in the identity coset. Tuples whose
/// twisted system is unsatisfiable are still reported; an empty case list
/// means the system is unsatisfiable on every coset combination.
pub fn reduce_to_twisted(
    system: &GroupEquationSystem,
    spec: &GroupSpec,
) -> Result<CosetDecomposition, EquationError> {
    system.check_constants(spec)?;
    let n = system.variables;
    let k = spec.rank();
    let d = spec.coset_count();
    let folded: Vec<GroupEquation> = system.equations.iter().map(fold_leading_constants).collect();

    let mut cases = Vec::new();
    let mut tuple = vec![0usize; n];
    loop {
        let mut equations = Vec::with_capacity(folded.len());
        let mut valid = true;
        for eq in &folded {
            let mut state = SymbolicProduct::new(k, n);
            for item in &eq.items {
                match item {
                    EquationItem::Constant(g) => state.mul_constant(spec, g),
                    EquationItem::Variable { index, inverse: false } => {
                        state.mul_variable(spec, *index, tuple[*index])
                    }
                    EquationItem::Variable { index, inverse: true } => {
                        state.mul_variable_inverse(spec, *index, tuple[*index])
                    }
                }
            }
            if state.coset != 0 {
                valid = false;
                break;
            }
            equations.push(TwistedEquation {
                coefficients: state.coefficients,
                constant: state.constant,
            });
        }
        if valid {
            let twisted = TwistedSystem { rank: k, variables: n, equations };
            let linear = twisted_to_linear(&twisted);
            cases.push(CosetCase { tuple: tuple.clone(), twisted, linear });
        }

        // Next tuple in lexicographic order.
        let mut pos = n;
        while pos > 0 {
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < d {
                break;
            }
            tuple[pos] = 0;
            if pos == 0 {
                return Ok(CosetDecomposition { rank: k, variables: n, cases });
            }
        }
        if n == 0 {
            // No variables: the single empty tuple was just processed.
            return Ok(CosetDecomposition { rank: k, variables: n, cases });
        }
    }
}

/// Flatten a twisted system into a square scalar system `x * B = c` over the
/// `k*n` scalar variables `Y_{ij}`, padding with zero columns (missing
/// equations) or zero rows (padding variables) as needed.
pub fn twisted_to_linear(twisted: &TwistedSystem) -> LinearSystem {
    let k = twisted.rank;
    let n = twisted.variables;
    let kn = k * n;
    let mut raw_equations = Vec::new();
    for eq in &twisted.equations {
        for l in 0..k {
            let mut coeffs = vec![BigInt::zero(); kn];
            for (i, b) in eq.coefficients.iter().enumerate() {
                for j in 0..k {
                    coeffs[i * k + j] = b[(j, l)].clone();
                }
            }
            raw_equations.push((coeffs, -eq.constant[l].clone()));
        }
    }
    let vars = kn.max(raw_equations.len());
    let mut matrix = IntMatrix::zero(vars, vars);
    let mut rhs = vec![BigInt::zero(); vars];
    for (e, (coeffs, b)) in raw_equations.iter().enumerate() {
        for (v, c) in coeffs.iter().enumerate() {
            matrix[(v, e)] = c.clone();
        }
        rhs[e] = b.clone();
    }
    LinearSystem { vars, matrix, rhs, primary_vars: kn, raw_equations }
}

/// All solutions of `x * B = c` with every coordinate in `[-bound, bound]`,
/// in lexicographic order. Depth-first scan with running column sums; each
/// column is checked as soon as every variable it mentions is assigned.
/// Internally the variables appearing in small columns are scanned first,
/// which prunes most of the box.
pub fn brute_force_solutions(linear: &LinearSystem, bound: u64) -> Vec<Vec<BigInt>> {
    let m = linear.vars;
    let bound = bound as i64;
    let mut out = Vec::new();
    if m == 0 {
        if linear.rhs.iter().all(|v| v.is_zero()) {
            out.push(Vec::new());
        }
        return out;
    }
    let column_vars: Vec<Vec<usize>> = (0..m)
        .map(|j| (0..m).filter(|&v| !linear.matrix[(v, j)].is_zero()).collect())
        .collect();
    if column_vars
        .iter()
        .zip(&linear.rhs)
        .any(|(vars, rhs)| vars.is_empty() && !rhs.is_zero())
    {
        return out;
    }
    // Scan variables that occur in short columns first.
    let mut order: Vec<usize> = (0..m).collect();
    let key = |v: usize| {
        column_vars
            .iter()
            .filter(|vars| vars.contains(&v))
            .map(|vars| vars.len())
            .min()
            .unwrap_or(usize::MAX)
    };
    order.sort_by_key(|&v| (key(v), v));
    let position: Vec<usize> = {
        let mut p = vec![0; m];
        for (depth, &v) in order.iter().enumerate() {
            p[v] = depth;
        }
        p
    };
    let mut checks_at_depth: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (j, vars) in column_vars.iter().enumerate() {
        if let Some(&deepest) = vars.iter().max_by_key(|&&v| position[v]) {
            checks_at_depth[position[deepest]].push(j);
        }
    }

    struct Scan<'a> {
        linear: &'a LinearSystem,
        order: &'a [usize],
        checks_at_depth: &'a [Vec<usize>],
        bound: i64,
        x: Vec<i64>,
        out: Vec<Vec<i64>>,
    }
    impl Scan<'_> {
        fn descend(&mut self, depth: usize, sums: &[BigInt]) {
            let m = self.linear.vars;
            if depth == m {
                self.out.push(self.x.clone());
                return;
            }
            let var = self.order[depth];
            for value in -self.bound..=self.bound {
                let passes = self.checks_at_depth[depth].iter().all(|&j| {
                    let coeff = &self.linear.matrix[(var, j)];
                    let total = &sums[j] + coeff * value;
                    total == self.linear.rhs[j]
                });
                if !passes {
                    continue;
                }
                self.x[var] = value;
                if depth + 1 == m {
                    self.out.push(self.x.clone());
                    continue;
                }
                let mut next = sums.to_vec();
                if value != 0 {
                    for (j, s) in next.iter_mut().enumerate() {
                        let coeff = &self.linear.matrix[(var, j)];
                        if !coeff.is_zero() {
                            *s += coeff * value;
                        }
                    }
                }
                self.descend(depth + 1, &next);
            }
            self.x[var] = 0;
        }
    }
    let mut scan = Scan {
        linear,
        order: &order,
        checks_at_depth: &checks_at_depth,
        bound,
        x: vec![0; m],
        out: Vec::new(),
    };
    let zeros = vec![BigInt::zero(); m];
    scan.descend(0, &zeros);
    let mut solutions: Vec<Vec<BigInt>> = scan
        .out
        .into_iter()
        .map(|x| x.into_iter().map(BigInt::from).collect())
        .collect();
    solutions.sort_unstable();
    solutions
}

/// All solution tuples of a group system whose coordinates lie in the ball
/// of the given weight, in lexicographic order of the element normal forms.
/// Each equation is checked as soon as all variables it mentions are
/// assigned, pruning the rest of the subtree.
pub fn brute_force_group_solutions(
    system: &GroupEquationSystem,
    spec: &GroupSpec,
    generators: &WeightedGeneratingSet,
    max_weight: u64,
) -> Result<Vec<Vec<GroupElement>>, EquationError> {
    system.check_constants(spec)?;
    let ball = spec.ball(generators, max_weight)?;
    let elements: Vec<&GroupElement> = ball.keys().collect();
    let n = system.variables;
    if elements.is_empty() {
        return Ok(Vec::new());
    }
    let mut checks_at_depth: Vec<Vec<&GroupEquation>> = vec![Vec::new(); n.max(1)];
    let mut constant_only = Vec::new();
    for eq in &system.equations {
        let mentioned = eq
            .items
            .iter()
            .filter_map(|item| match item {
                EquationItem::Variable { index, .. } => Some(*index),
                EquationItem::Constant(_) => None,
            })
            .max();
        match mentioned {
            Some(v) => checks_at_depth[v].push(eq),
            None => constant_only.push(eq),
        }
    }
    let holds = |eq: &GroupEquation, assignment: &[GroupElement]| -> bool {
        let mut acc = spec.identity();
        for item in &eq.items {
            let factor = match item {
                EquationItem::Variable { index, inverse: false } => assignment[*index].clone(),
                EquationItem::Variable { index, inverse: true } => spec.inverse(&assignment[*index]),
                EquationItem::Constant(g) => g.clone(),
            };
            acc = spec.multiply(&acc, &factor);
        }
        acc == spec.identity()
    };
    if !constant_only.iter().all(|eq| holds(eq, &[])) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut assignment: Vec<GroupElement> = Vec::with_capacity(n);
    fn descend<'a>(
        n: usize,
        elements: &[&GroupElement],
        checks_at_depth: &[Vec<&'a GroupEquation>],
        holds: &dyn Fn(&GroupEquation, &[GroupElement]) -> bool,
        assignment: &mut Vec<GroupElement>,
        out: &mut Vec<Vec<GroupElement>>,
    ) {
        let depth = assignment.len();
        if depth == n {
            out.push(assignment.clone());
            return;
        }
        for element in elements {
            assignment.push((*element).clone());
            if checks_at_depth[depth].iter().all(|eq| holds(eq, assignment)) {
                descend(n, elements, checks_at_depth, holds, assignment, out);
            }
            assignment.pop();
        }
    }
    if n == 0 {
        out.push(Vec::new());
        return Ok(out);
    }
    descend(n, &elements, &checks_at_depth, &holds, &mut assignment, &mut out);
    Ok(out)
}

impl CosetDecomposition {
    /// Map linear-system solutions in the box back to group tuples
    /// `(Y_1 t_{u_1}, ..., Y_n t_{u_n})`, deduplicating padding variables.
    pub fn group_solutions_in_box(&self, bound: u64) -> Vec<Vec<GroupElement>> {
        let k = self.rank;
        let n = self.variables;
        let mut set = BTreeSet::new();
        for case in &self.cases {
            for x in brute_force_solutions(&case.linear, bound) {
                let tuple: Vec<GroupElement> = (0..n)
                    .map(|i| GroupElement::new(x[i * k..(i + 1) * k].to_vec(), case.tuple[i]))
                    .collect();
                set.insert(tuple);
            }
        }
        set.into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;

    fn var(index: usize) -> EquationItem {
        EquationItem::Variable { index, inverse: false }
    }

    fn inv(index: usize) -> EquationItem {
        EquationItem::Variable { index, inverse: true }
    }

    fn constant(v: &[i64], coset: usize) -> EquationItem {
        EquationItem::Constant(GroupElement::from_i64(v, coset))
    }

    /// X - Y + Z = 1, -Y + Z = 0 over Z, written multiplicatively.
    pub fn example_system_z() -> GroupEquationSystem {
        GroupEquationSystem::new(
            3,
            vec![
                GroupEquation { items: vec![var(0), inv(1), var(2), constant(&[-1], 0)] },
                GroupEquation { items: vec![inv(1), var(2)] },
            ],
        )
        .unwrap()
    }

    pub fn xyz_equal_system() -> GroupEquationSystem {
        GroupEquationSystem::new(
            3,
            vec![
                GroupEquation { items: vec![var(0), inv(1)] },
                GroupEquation { items: vec![var(1), inv(2)] },
            ],
        )
        .unwrap()
    }

    #[test]
    fn single_variable_constant_equation() {
        // X = g with g = (v, 0): only the identity tuple, twisted Y * I = v.
        let spec = GroupSpec::infinite_dihedral();
        let sys = GroupEquationSystem::new(
            1,
            vec![GroupEquation { items: vec![var(0), constant(&[-4], 0)] }],
        )
        .unwrap();
        let dec = reduce_to_twisted(&sys, &spec).unwrap();
        assert_eq!(dec.cases.len(), 1);
        assert_eq!(dec.cases[0].tuple, vec![0]);
        let tw = &dec.cases[0].twisted;
        assert_eq!(tw.equations.len(), 1);
        assert_eq!(tw.equations[0].coefficients[0], IntMatrix::identity(1));
        assert_eq!(tw.equations[0].constant, vec![BigInt::from(-4)]);
        let sols = brute_force_solutions(&dec.cases[0].linear, 6);
        assert_eq!(sols, vec![vec![BigInt::from(4)]]);
    }

    #[test]
    fn dihedral_squares_to_identity() {
        let spec = GroupSpec::infinite_dihedral();
        let sys = GroupEquationSystem::new(
            1,
            vec![GroupEquation { items: vec![var(0), var(0)] }],
        )
        .unwrap();
        let dec = reduce_to_twisted(&sys, &spec).unwrap();
        assert_eq!(dec.cases.len(), 2);
        // Identity coset: 2Y = 0.
        assert_eq!(dec.cases[0].tuple, vec![0]);
        assert_eq!(dec.cases[0].twisted.equations[0].coefficients[0],
            IntMatrix::from_i64(1, 1, &[2]).unwrap());
        // Reflection coset: Y * (I + phi_1) = 0, i.e. the zero matrix.
        assert_eq!(dec.cases[1].tuple, vec![1]);
        assert_eq!(dec.cases[1].twisted.equations[0].coefficients[0], IntMatrix::zero(1, 1));

        // Mapped-back solutions match the brute-force group search.
        let gens = WeightedGeneratingSet::standard(&spec);
        let direct = brute_force_group_solutions(&sys, &spec, &gens, 8).unwrap();
        let ball = spec.ball(&gens, 8).unwrap();
        let mapped: Vec<Vec<GroupElement>> = dec
            .group_solutions_in_box(10)
            .into_iter()
            .filter(|tuple| tuple.iter().all(|g| ball.contains_key(g)))
            .collect();
        assert_eq!(mapped, direct);
        // Identity plus the reflections (y, t) with |y| <= 7 at weight |y|+1.
        assert_eq!(direct.len(), 1 + 15);
    }

    #[test]
    fn example_system_reduces_to_known_linear_system() {
        let spec = GroupSpec::free_abelian(1);
        let dec = reduce_to_twisted(&example_system_z(), &spec).unwrap();
        assert_eq!(dec.cases.len(), 1);
        let lin = &dec.cases[0].linear;
        assert_eq!(lin.vars, 3);
        assert_eq!(lin.primary_vars, 3);
        // Columns encode x - y + z and -y + z; third column is padding.
        let b = &lin.matrix;
        let col = |j: usize| (0..3).map(|i| b[(i, j)].clone()).collect::<Vec<_>>();
        assert_eq!(col(0), vec![BigInt::from(1), BigInt::from(-1), BigInt::from(1)]);
        assert_eq!(col(1), vec![BigInt::from(0), BigInt::from(-1), BigInt::from(1)]);
        assert_eq!(col(2), vec![BigInt::from(0), BigInt::from(0), BigInt::from(0)]);
        assert_eq!(lin.rhs, vec![BigInt::from(1), BigInt::from(0), BigInt::from(0)]);
    }

    #[test]
    fn example_system_brute_force_box() {
        let spec = GroupSpec::free_abelian(1);
        let dec = reduce_to_twisted(&example_system_z(), &spec).unwrap();
        let sols = brute_force_solutions(&dec.cases[0].linear, 3);
        let expect: Vec<Vec<BigInt>> = (-3i64..=3)
            .map(|y| vec![BigInt::from(1), BigInt::from(y), BigInt::from(y)])
            .collect();
        assert_eq!(sols, expect);
    }

    #[test]
    fn example_system_group_oracle() {
        let spec = GroupSpec::free_abelian(1);
        let gens = WeightedGeneratingSet::standard(&spec);
        let sols = brute_force_group_solutions(&example_system_z(), &spec, &gens, 5).unwrap();
        // Tuples (1, y, y) with weight 1 + 2|y| <= ... every coordinate in
        // the 5-ball, so |y| <= 5.
        assert_eq!(sols.len(), 11);
        for tuple in &sols {
            assert_eq!(tuple[0], GroupElement::from_i64(&[1], 0));
            assert_eq!(tuple[1], tuple[2]);
        }
    }

    #[test]
    fn inconsistent_system_is_empty() {
        let spec = GroupSpec::free_abelian(1);
        // X * X^-1 * a = 1 has no solutions: constant a != identity.
        let sys = GroupEquationSystem::new(
            1,
            vec![GroupEquation { items: vec![var(0), inv(0), constant(&[1], 0)] }],
        )
        .unwrap();
        let dec = reduce_to_twisted(&sys, &spec).unwrap();
        assert_eq!(dec.cases.len(), 1);
        assert!(brute_force_solutions(&dec.cases[0].linear, 4).is_empty());
        let gens = WeightedGeneratingSet::standard(&spec);
        assert!(brute_force_group_solutions(&sys, &spec, &gens, 4).unwrap().is_empty());
    }

    #[test]
    fn xyz_solutions_are_diagonal() {
        let spec = GroupSpec::free_abelian(1);
        let dec = reduce_to_twisted(&xyz_equal_system(), &spec).unwrap();
        let sols = brute_force_solutions(&dec.cases[0].linear, 2);
        let expect: Vec<Vec<BigInt>> = (-2i64..=2)
            .map(|m| vec![BigInt::from(m); 3])
            .collect();
        assert_eq!(sols, expect);
    }

    #[test]
    fn twisted_and_linear_solutions_agree() {
        // k = 2, one variable: Y * B1 = -C with B1 a genuine 2x2 matrix.
        let twisted = TwistedSystem {
            rank: 2,
            variables: 1,
            equations: vec![TwistedEquation {
                coefficients: vec![IntMatrix::from_i64(2, 2, &[1, 1, 0, 1]).unwrap()],
                constant: vec![BigInt::from(-3), BigInt::from(-5)],
            }],
        };
        let linear = twisted_to_linear(&twisted);
        assert_eq!(linear.vars, 2);
        let sols = brute_force_solutions(&linear, 6);
        // y1 = 3, y1 + y2 = 5.
        assert_eq!(sols, vec![vec![BigInt::from(3), BigInt::from(2)]]);
        for x in -6i64..=6 {
            for y in -6i64..=6 {
                let assignment = vec![vec![BigInt::from(x), BigInt::from(y)]];
                let expected = x == 3 && y == 2;
                assert_eq!(twisted.holds_at(&assignment), expected);
            }
        }
    }

    #[test]
    fn leading_constants_are_folded() {
        // g X = 1 and X g = 1 have the same solution set {g^-1}.
        let spec = GroupSpec::infinite_dihedral();
        let lead = GroupEquationSystem::new(
            1,
            vec![GroupEquation { items: vec![constant(&[2], 1), var(0)] }],
        )
        .unwrap();
        let trail = GroupEquationSystem::new(
            1,
            vec![GroupEquation { items: vec![var(0), constant(&[2], 1)] }],
        )
        .unwrap();
        let da = reduce_to_twisted(&lead, &spec).unwrap();
        let db = reduce_to_twisted(&trail, &spec).unwrap();
        assert_eq!(da.group_solutions_in_box(5), db.group_solutions_in_box(5));
        let expect = spec.inverse(&GroupElement::from_i64(&[2], 1));
        assert_eq!(da.group_solutions_in_box(5), vec![vec![expect]]);
    }
}
