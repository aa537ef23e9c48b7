//! Per-coordinate state bounds for the solution-system control automaton,
//! and the constructive step reordering that witnesses them.
//!
//! For a row-monotone system `x * C = b` the control automaton only needs
//! states `q_y` with `|y_j| <= K_j`, where the `K_j` follow a simple
//! recursion over the columns of `C`. Every solution admits an ordering of
//! its signed unit steps whose partial-sum images stay inside those bounds;
//! [`reorder_solution_steps`] produces one such ordering.

use super::Edt0lError;
use crate::matrix::{is_row_monotone, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Bounds `K_1..K_n`, one per column of the row-monotone matrix.
///
/// `K_1 = |b_1|`; afterwards
/// `K_j = max_l |c_{lj}| + |b_j| + ceil(K_{j-1} / min_l |c_{l(j-1)}|)`,
/// the minimum ranging over nonzero entries only. When column `j-1` is
/// entirely zero the quotient term degenerates to `K_{j-1}` itself; a larger
/// bound only adds states and never loses solutions.
pub fn compute_bounds(c: &IntMatrix, target: &[BigInt]) -> Result<Vec<BigInt>, Edt0lError> {
    if !is_row_monotone(c)? {
        return Err(Edt0lError::NotRowMonotone);
    }
    let n = c.rows();
    assert_eq!(target.len(), n, "target length must match matrix size");
    let mut bounds: Vec<BigInt> = Vec::with_capacity(n);
    for j in 0..n {
        if j == 0 {
            bounds.push(target[0].abs());
            continue;
        }
        let col_max = (0..n).map(|l| c[(l, j)].abs()).max().unwrap_or_else(BigInt::zero);
        let prev_min = (0..n)
            .map(|l| c[(l, j - 1)].abs())
            .filter(|v| !v.is_zero())
            .min();
        let carried = match prev_min {
            Some(m) => {
                // ceil(K_{j-1} / m) for non-negative K and positive m
                let numer: BigInt = &bounds[j - 1] + &m - BigInt::from(1);
                numer.div_floor(&m)
            }
            None => bounds[j - 1].clone(),
        };
        bounds.push(col_max + target[j].abs() + carried);
    }
    Ok(bounds)
}

/// Decompose a solution `x` of `x * C = b` into signed unit steps
/// `(coordinate, sign)` ordered so that every partial sum `y` of their
/// images under `C` stays within the bounds of [`compute_bounds`]. A
/// coordinate only ever steps in one direction.
///
/// Coordinates are handled in column order: steps for coordinate `j` are
/// inserted wherever the running column-`j` sum is zero or opposes the
/// direction the step moves that column, remainder appended at the end.
/// Coordinates with a zero diagonal put no pressure on their own column; if
/// their placement drifts a later column past its bound, the insertion
/// result is replaced by a direct search for an in-bounds ordering over the
/// bounded partial-sum box.
pub fn reorder_solution_steps(c: &IntMatrix, x: &[BigInt]) -> Vec<(usize, i8)> {
    let n = c.rows();
    assert_eq!(x.len(), n);
    let mut seq: Vec<(usize, i8)> = Vec::new();
    for j in 0..n {
        if x[j].is_zero() {
            continue;
        }
        let sign: i8 = if x[j].is_positive() { 1 } else { -1 };
        let mut remaining = u64::try_from(x[j].abs().magnitude().clone())
            .expect("desk-scale solution coordinate");
        // Direction the step moves its own column.
        let movement = (BigInt::from(sign) * &c[(j, j)]).sign();
        if seq.is_empty() || movement == num_bigint::Sign::NoSign {
            seq.extend(std::iter::repeat_n((j, sign), remaining as usize));
            continue;
        }
        let moves_up = movement == num_bigint::Sign::Plus;
        // Walk the existing sequence tracking the column-j partial sum,
        // inserting a step after every position where the sum is zero or
        // sits on the side the step would pull it away from.
        let mut rebuilt: Vec<(usize, i8)> = Vec::with_capacity(seq.len() + remaining as usize);
        let mut sum = BigInt::zero();
        for step in seq {
            let contribution = BigInt::from(step.1) * &c[(step.0, j)];
            sum += contribution;
            rebuilt.push(step);
            if remaining > 0 {
                let opposes =
                    (moves_up && !sum.is_positive()) || (!moves_up && !sum.is_negative());
                if opposes {
                    rebuilt.push((j, sign));
                    sum += BigInt::from(sign) * &c[(j, j)];
                    remaining -= 1;
                }
            }
        }
        rebuilt.extend(std::iter::repeat_n((j, sign), remaining as usize));
        seq = rebuilt;
    }

    let target = c.apply_row(x).expect("square matrix");
    if let Ok(bounds) = compute_bounds(c, &target) {
        if !steps_within_bounds(c, &seq, &bounds) {
            if let Some(found) = search_in_bounds(c, x, &bounds) {
                return found;
            }
        }
    }
    seq
}

/// Exhaustive ordered placement of the remaining steps, pruned to the
/// bounded partial-sum box. Returns the first ordering found, or `None`
/// when no ordering stays within the bounds.
fn search_in_bounds(
    c: &IntMatrix,
    x: &[BigInt],
    bounds: &[BigInt],
) -> Option<Vec<(usize, i8)>> {
    let n = c.rows();
    let mut remaining: Vec<u64> = Vec::with_capacity(n);
    let mut signs: Vec<i8> = Vec::with_capacity(n);
    for v in x {
        signs.push(if v.is_negative() { -1 } else { 1 });
        remaining.push(u64::try_from(v.abs().magnitude().clone()).expect("desk-scale"));
    }
    let mut sum = vec![BigInt::zero(); n];
    let mut steps = Vec::new();
    let mut dead: std::collections::HashSet<(Vec<u64>, Vec<BigInt>)> =
        std::collections::HashSet::new();
    fn descend(
        c: &IntMatrix,
        bounds: &[BigInt],
        signs: &[i8],
        remaining: &mut Vec<u64>,
        sum: &mut Vec<BigInt>,
        steps: &mut Vec<(usize, i8)>,
        dead: &mut std::collections::HashSet<(Vec<u64>, Vec<BigInt>)>,
    ) -> bool {
        let n = c.rows();
        if remaining.iter().all(|&r| r == 0) {
            return true;
        }
        let key = (remaining.clone(), sum.clone());
        if dead.contains(&key) {
            return false;
        }
        for j in 0..n {
            if remaining[j] == 0 {
                continue;
            }
            let mut inside = true;
            for l in 0..n {
                let term = BigInt::from(signs[j]) * &c[(j, l)];
                sum[l] += term;
                if sum[l].abs() > bounds[l] {
                    inside = false;
                }
            }
            if inside {
                remaining[j] -= 1;
                steps.push((j, signs[j]));
                if descend(c, bounds, signs, remaining, sum, steps, dead) {
                    return true;
                }
                steps.pop();
                remaining[j] += 1;
            }
            for l in 0..n {
                let term = BigInt::from(signs[j]) * &c[(j, l)];
                sum[l] -= term;
            }
        }
        dead.insert(key);
        false
    }
    if descend(c, bounds, &signs, &mut remaining, &mut sum, &mut steps, &mut dead) {
        Some(steps)
    } else {
        None
    }
}

/// Check that the partial sums of the reordered steps stay within `bounds`.
pub fn steps_within_bounds(
    c: &IntMatrix,
    steps: &[(usize, i8)],
    bounds: &[BigInt],
) -> bool {
    let n = c.rows();
    let mut sum = vec![BigInt::zero(); n];
    for &(coord, sign) in steps {
        for j in 0..n {
            let term = BigInt::from(sign) * &c[(coord, j)];
            sum[j] += term;
        }
        for j in 0..n {
            if sum[j].abs() > bounds[j] {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::row_monotone_decompose;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn one_by_one_bound_is_target() {
        let c = IntMatrix::from_i64(1, 1, &[3]).unwrap();
        let k = compute_bounds(&c, &big(&[5])).unwrap();
        assert_eq!(k, big(&[5]));
    }

    #[test]
    fn shear_bound_matches_recursion() {
        let c = IntMatrix::from_i64(2, 2, &[1, 1, 0, 1]).unwrap();
        let k = compute_bounds(&c, &big(&[4, -2])).unwrap();
        // K2 = max|col 2| + |b2| + ceil(K1 / min nonzero |col 1|) = 1 + 2 + 4
        assert_eq!(k, big(&[4, 7]));
    }

    #[test]
    fn zero_matrix_uses_fallback() {
        let c = IntMatrix::zero(2, 2);
        let k = compute_bounds(&c, &big(&[0, 0])).unwrap();
        assert_eq!(k, big(&[0, 0]));
    }

    #[test]
    fn non_monotone_input_rejected() {
        let c = IntMatrix::from_i64(2, 2, &[1, -1, 0, 1]).unwrap();
        assert!(compute_bounds(&c, &big(&[0, 0])).is_err());
    }

    #[test]
    fn insertion_handles_negative_diagonal() {
        // Steps of the second coordinate move its column downward; the
        // insertion points must follow the movement, not the step sign.
        let c = IntMatrix::from_i64(2, 2, &[0, -1, 0, -3]).unwrap();
        let x = big(&[-5, 2]);
        let b = c.apply_row(&x).unwrap();
        let bounds = compute_bounds(&c, &b).unwrap();
        let steps = reorder_solution_steps(&c, &x);
        assert!(steps_within_bounds(&c, &steps, &bounds));
    }

    #[test]
    fn zero_diagonal_coordinates_fall_back_to_search() {
        // Two zero-diagonal coordinates pushing a later column in opposite
        // directions: blocks drift out of the box, interleaving stays in.
        let c = IntMatrix::from_i64(3, 3, &[0, 0, 1, 0, 0, -1, 0, 0, 1]).unwrap();
        let x = big(&[6, 6, 1]);
        let b = c.apply_row(&x).unwrap();
        let bounds = compute_bounds(&c, &b).unwrap();
        let steps = reorder_solution_steps(&c, &x);
        let mut acc = vec![0i64; 3];
        for &(coord, sign) in &steps {
            acc[coord] += sign as i64;
        }
        assert_eq!(acc, vec![6, 6, 1]);
        assert!(steps_within_bounds(&c, &steps, &bounds));
    }

    #[test]
    fn reordered_steps_recover_solution_and_stay_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xb0b);
        let mut checked = 0usize;
        for _ in 0..50 {
            let n = 2 + rng.random_range(0..3) as usize;
            let entries: Vec<i64> = (0..n * n).map(|_| rng.random_range(-3..=3)).collect();
            let raw = IntMatrix::from_i64(n, n, &entries).unwrap();
            let c = row_monotone_decompose(&raw).unwrap().monotone;
            let x: Vec<i64> = (0..n).map(|_| rng.random_range(-4..=4)).collect();
            let xb = big(&x);
            let b = c.apply_row(&xb).unwrap();
            let bounds = compute_bounds(&c, &b).unwrap();
            let steps = reorder_solution_steps(&c, &xb);
            // The multiset of steps reconstitutes x.
            let mut acc = vec![0i64; n];
            for &(coord, sign) in &steps {
                acc[coord] += sign as i64;
            }
            assert_eq!(acc, x);
            assert!(
                steps_within_bounds(&c, &steps, &bounds),
                "bounds violated for C={c:?} x={x:?}"
            );
            checked += 1;
        }
        assert_eq!(checked, 50);
    }
}
