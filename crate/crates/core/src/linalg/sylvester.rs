//! Sylvester equations `Y X - X V = Z`.

use super::{lin_solve, AffineSolution, Matrix};
use crate::error::{Error, Result};

/// A backend for `Y X - X V = Z` with a unique solution.
pub trait SylvesterSolver {
    fn solve(&self, y: &Matrix, v: &Matrix, z: &Matrix) -> Result<Matrix>;
}

/// Solves the n^2 x n^2 system `(Id (x) Y - V^t (x) Id) vec X = vec Z`
/// with [`lin_solve`]. Cubic in n^2, which is fine for small n.
#[derive(Clone, Copy, Debug, Default)]
pub struct KroneckerSylvester;

impl SylvesterSolver for KroneckerSylvester {
    fn solve(&self, y: &Matrix, v: &Matrix, z: &Matrix) -> Result<Matrix> {
        let n = y.rows();
        if !y.is_square() || v.shape() != (n, n) || z.shape() != (n, n) {
            return Err(Error::DimensionMismatch { op: "sylvester_solve", left: y.shape(), right: z.shape() });
        }
        let f = *y.field();
        let nn = n * n;
        // unknown X[a][b] sits at a * n + b
        let mut big = Matrix::zeros(f, nn, nn);
        let mut rhs = Matrix::zeros(f, nn, 1);
        for a in 0..n {
            for b in 0..n {
                let row = a * n + b;
                rhs.set(row, 0, z.get(a, b));
                for c in 0..n {
                    let i = c * n + b;
                    big.set(row, i, f.add(big.get(row, i), y.get(a, c)));
                    let j = a * n + c;
                    big.set(row, j, f.sub(big.get(row, j), v.get(c, b)));
                }
            }
        }
        match lin_solve(&big, &rhs)? {
            AffineSolution::Solved { particular, nullspace } if nullspace.cols() == 0 => {
                let x = Matrix::from_vec(f, n, n, particular.data().to_vec());
                debug_assert_eq!(&y.mul(&x).sub(&x.mul(v)), z, "Sylvester solution fails substitution");
                Ok(x)
            }
            _ => Err(Error::SylvesterSingular),
        }
    }
}

/// Solves `Y X - X V = Z` with the default backend.
pub fn sylvester_solve(y: &Matrix, v: &Matrix, z: &Matrix) -> Result<Matrix> {
    KroneckerSylvester.solve(y, v, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    #[test]
    fn scalar() {
        let f = PrimeField::new(101).unwrap();
        let y = Matrix::from_i64_rows(f, &[&[0]]);
        let v = Matrix::from_i64_rows(f, &[&[1]]);
        let z = Matrix::from_i64_rows(f, &[&[7]]);
        assert_eq!(sylvester_solve(&y, &v, &z).unwrap(), Matrix::from_i64_rows(f, &[&[-7]]));
    }

    #[test]
    fn diagonal_entrywise_formula() {
        let f = PrimeField::new(101).unwrap();
        let y = Matrix::from_i64_rows(f, &[&[1, 0], &[0, 2]]);
        let v = Matrix::from_i64_rows(f, &[&[3, 0], &[0, 4]]);
        let z = Matrix::from_i64_rows(f, &[&[1, 1], &[1, 1]]);
        let x = sylvester_solve(&y, &v, &z).unwrap();
        let inv = |a: i64| f.inv(f.from_i64(a)).unwrap();
        let expected = Matrix::from_vec(f, 2, 2, vec![inv(-2), inv(-3), inv(-1), inv(-2)]);
        assert_eq!(x, expected);
    }

    #[test]
    fn shared_spectrum_is_rejected() {
        let f = PrimeField::new(101).unwrap();
        let id = Matrix::identity(f, 2);
        let z = Matrix::from_i64_rows(f, &[&[1, 0], &[0, 0]]);
        assert_eq!(sylvester_solve(&id, &id, &z), Err(Error::SylvesterSingular));
    }
}
