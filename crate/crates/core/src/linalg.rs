//! Gaussian elimination over an abstract field.

use num_traits::{One, Zero};

use crate::symkernel::{RatFn, Q};

pub trait Field: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Division by a nonzero element.
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self {
        Self::zero().sub(self)
    }
}

impl Field for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

/// Floating point entries; magnitudes below 1e-12 count as zero.
impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        self.abs() < 1e-12
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

/// Rational functions in the symbolic parameters.
impl Field for RatFn {
    fn zero() -> Self {
        RatFn::zero()
    }
    fn one() -> Self {
        RatFn::one()
    }
    fn is_zero(&self) -> bool {
        RatFn::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        RatFn::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        RatFn::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RatFn::mul(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        RatFn::div(self, o).expect("pivot is nonzero")
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F: Field>(rows: &mut Vec<Vec<F>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = F::one().div(&rows[r][col]);
        for v in rows[r].iter_mut() {
            *v = v.mul(&inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = v.sub(&f.mul(pv));
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Basis of the null space of the system `rows · c = 0`.
#[derive(Debug, Clone)]
pub struct Solution<F> {
    pub dimension: usize,
    pub basis: Vec<Vec<F>>,
    pub free: Vec<usize>,
}

pub fn solve_homogeneous<F: Field>(mut rows: Vec<Vec<F>>, ncols: usize) -> Solution<F> {
    let pivots = rref(&mut rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![F::zero(); ncols];
            v[f] = F::one();
            for (row, &p) in rows.iter().zip(&pivots) {
                v[p] = row[f].neg();
            }
            v
        })
        .collect();
    Solution {
        dimension: free.len(),
        basis,
        free,
    }
}

/// One solution of `rows · z = rhs`, or `None` when inconsistent.
pub fn solve_affine<F: Field>(rows: &[Vec<F>], rhs: &[F], ncols: usize) -> Option<Vec<F>> {
    let mut aug: Vec<Vec<F>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut v = r.clone();
            v.push(b.clone());
            v
        })
        .collect();
    let pivots = rref(&mut aug, ncols + 1);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut z = vec![F::zero(); ncols];
    for (row, &p) in aug.iter().zip(&pivots) {
        z[p] = row[ncols].clone();
    }
    Some(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::poly::q;

    #[test]
    fn identity_has_trivial_kernel() {
        let rows = vec![vec![q(1), q(0)], vec![q(0), q(1)]];
        assert_eq!(solve_homogeneous(rows, 2).dimension, 0);
    }

    #[test]
    fn one_equation_two_unknowns() {
        let s = solve_homogeneous(vec![vec![q(1), q(1)]], 2);
        assert_eq!(s.dimension, 1);
        assert_eq!(s.basis[0], vec![q(-1), q(1)]);
    }

    #[test]
    fn affine_consistency() {
        let rows = vec![vec![1.0, 1.0]];
        assert!(solve_affine(&rows, &[2.0], 2).is_some());
        let rows = vec![vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(solve_affine(&rows, &[1.0, 3.0], 2).is_none());
    }
}
