use super::matrix::BigMatrix;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// Smith normal form data: `u * a * v = s` with `u`, `v` unimodular, `s`
/// diagonal with non-negative entries satisfying `s[i] | s[i+1]`.
///
/// The inverses of the transforms are tracked during elimination so that
/// coordinate changes in both directions stay exact and cheap.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SmithDecomposition {
    pub u: BigMatrix,
    pub s: BigMatrix,
    pub v: BigMatrix,
    pub u_inv: BigMatrix,
    pub v_inv: BigMatrix,
}

impl SmithDecomposition {
    /// Diagonal entries, padded with zeros up to `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.s.rows().min(self.s.cols());
        (0..k).map(|i| self.s.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

struct Worker {
    s: BigMatrix,
    u: BigMatrix,
    u_inv: BigMatrix,
    v: BigMatrix,
    v_inv: BigMatrix,
}

impl Worker {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.s.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.s.swap_cols(a, b);
        self.v.swap_cols(a, b);
        self.v_inv.swap_rows(a, b);
    }

    /// row a += c * row b, mirrored on u and u_inv.
    fn add_row(&mut self, a: usize, b: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        self.s.add_row_multiple(a, b, c);
        self.u.add_row_multiple(a, b, c);
        let neg = -c;
        self.u_inv.add_col_multiple(b, a, &neg);
    }

    /// col a += c * col b, mirrored on v and v_inv.
    fn add_col(&mut self, a: usize, b: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        self.s.add_col_multiple(a, b, c);
        self.v.add_col_multiple(a, b, c);
        let neg = -c;
        self.v_inv.add_row_multiple(b, a, &neg);
    }

    fn negate_row(&mut self, a: usize) {
        self.s.negate_row(a);
        self.u.negate_row(a);
        self.u_inv.negate_col(a);
    }
}

/// Position of a nonzero entry of minimal absolute value in the trailing
/// submatrix starting at `(t, t)`.
fn min_pivot(s: &BigMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..s.rows() {
        for j in t..s.cols() {
            let x = s.get(i, j);
            if x.is_zero() {
                continue;
            }
            let a = x.abs();
            match &best {
                Some((_, _, m)) if *m <= a => {}
                _ => best = Some((i, j, a)),
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Truncated quotient, so that `x - q*p` has absolute value below `|p|`.
fn quot(x: &BigInt, p: &BigInt) -> BigInt {
    x / p
}

/// Computes the Smith normal form of `a`.
///
/// Pivots are chosen by minimal absolute value; after each pivot settles, any
/// trailing entry not divisible by it is folded into the pivot row, which makes
/// the divisibility chain hold by construction. Diagonal entries are made
/// non-negative at the end of each pivot step.
pub fn smith_normal_form(a: &BigMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut w = Worker {
        s: a.clone(),
        u: BigMatrix::identity(m),
        u_inv: BigMatrix::identity(m),
        v: BigMatrix::identity(n),
        v_inv: BigMatrix::identity(n),
    };
    let k = m.min(n);
    for t in 0..k {
        loop {
            let Some((pi, pj)) = min_pivot(&w.s, t) else {
                break;
            };
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);
            let mut dirty = false;
            for r in t + 1..m {
                let q = quot(w.s.get(r, t), w.s.get(t, t));
                let neg = -q;
                w.add_row(r, t, &neg);
                if !w.s.get(r, t).is_zero() {
                    dirty = true;
                }
            }
            for c in t + 1..n {
                let q = quot(w.s.get(t, c), w.s.get(t, t));
                let neg = -q;
                w.add_col(c, t, &neg);
                if !w.s.get(t, c).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // pivot row/column clear; force divisibility over the rest
            let pivot = w.s.get(t, t).clone();
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(w.s.get(i, j) % &pivot).is_zero()));
            match offender {
                Some(i) => {
                    let one = BigInt::from(1);
                    w.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if w.s.get(t, t).is_negative() {
            w.negate_row(t);
        }
    }
    SmithDecomposition {
        u: w.u,
        s: w.s,
        v: w.v,
        u_inv: w.u_inv,
        v_inv: w.v_inv,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn check_invariants(a: &BigMatrix, d: &SmithDecomposition) {
        assert_eq!(d.u.mul(a).mul(&d.v), d.s, "u*a*v != s");
        assert!(d.u.mul(&d.u_inv).is_identity(), "u_inv wrong");
        assert!(d.v.mul(&d.v_inv).is_identity(), "v_inv wrong");
        assert_eq!(d.u.det().abs(), BigInt::one(), "u not unimodular");
        assert_eq!(d.v.det().abs(), BigInt::one(), "v not unimodular");
        let diag = d.diagonal();
        for (i, x) in diag.iter().enumerate() {
            assert!(!x.is_negative(), "negative diagonal");
            if i + 1 < diag.len() && !x.is_zero() {
                assert!((diag[i + 1].clone() % x).is_zero(), "divisibility chain broken");
            }
            if x.is_zero() && i + 1 < diag.len() {
                assert!(diag[i + 1].is_zero(), "zero before nonzero on diagonal");
            }
        }
        // everything off the diagonal vanishes
        for i in 0..d.s.rows() {
            for j in 0..d.s.cols() {
                if i != j {
                    assert!(d.s.get(i, j).is_zero());
                }
            }
        }
    }

    #[test]
    fn two_by_two_classic() {
        let a = BigMatrix::from_i64_rows(&[&[2, 4], &[6, 8]]);
        let d = smith_normal_form(&a);
        check_invariants(&a, &d);
        // invariant factor oracle: d1 = gcd of entries, d1*d2 = gcd of 2x2 minors
        assert_eq!(d.s.get(0, 0), &BigInt::from(2));
        assert_eq!(d.s.get(1, 1), &BigInt::from(4));
    }

    #[test]
    fn zero_matrix() {
        let a = BigMatrix::zeros(3, 2);
        let d = smith_normal_form(&a);
        check_invariants(&a, &d);
        assert!(d.s.is_zero());
        assert!(d.u.is_identity());
    }

    #[test]
    fn wide_matrix_with_unit_factor() {
        let a = BigMatrix::from_i64_rows(&[&[4, 0, 2], &[0, 4, -2]]);
        let d = smith_normal_form(&a);
        check_invariants(&a, &d);
        assert_eq!(d.s.get(0, 0), &BigInt::from(2));
        assert_eq!(d.s.get(1, 1), &BigInt::from(4));
    }

    #[test]
    fn rank_deficient() {
        let a = BigMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]);
        let d = smith_normal_form(&a);
        check_invariants(&a, &d);
        assert_eq!(d.rank(), 1);
        assert_eq!(d.s.get(0, 0), &BigInt::from(1));
        assert!(d.s.get(1, 1).is_zero());
    }

    proptest::proptest! {
        #[test]
        fn invariants_on_random_matrices(
            rows in 1usize..=5,
            cols in 1usize..=5,
            entries in proptest::collection::vec(-30i64..=30, 25),
        ) {
            let a = BigMatrix::from_fn(rows, cols, |i, j| BigInt::from(entries[i * 5 + j]));
            let d = smith_normal_form(&a);
            check_invariants(&a, &d);
        }
    }
}
