use num_complex::Complex64;

use super::{ComplexMatrix, LinalgError};

/// Relative pivot threshold below which a matrix is declared singular.
pub const PIVOT_TOLERANCE: f64 = 1e-14;

/// LU factorization with partial pivoting, `P·M = L·U` packed in one matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(m: &ComplexMatrix) -> Result<Self, LinalgError> {
        if !m.is_square() {
            return Err(LinalgError::NotSquare(m.rows(), m.cols()));
        }
        let n = m.rows();
        let threshold = PIVOT_TOLERANCE * m.norm();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmag) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if pmag <= threshold || pmag == 0.0 {
                return Err(LinalgError::SingularMatrix {
                    pivot: pmag.max(0.0),
                    threshold,
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        let n = self.lu.rows();
        if rhs.rows() != n {
            return Err(LinalgError::DimensionMismatch {
                expected: (n, rhs.cols()),
                found: (rhs.rows(), rhs.cols()),
            });
        }
        let mut x = ComplexMatrix::from_fn(n, rhs.cols(), |i, j| rhs[(self.perm[i], j)]);
        for c in 0..rhs.cols() {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }

    pub fn determinant(&self) -> Complex64 {
        let n = self.lu.rows();
        let mut det = Complex64::new(1.0, 0.0);
        for i in 0..n {
            det *= self.lu[(i, i)];
        }
        // sign of the permutation
        let mut seen = vec![false; n];
        let mut transpositions = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.perm[j];
                len += 1;
            }
            transpositions += len - 1;
        }
        if transpositions % 2 == 1 {
            -det
        } else {
            det
        }
    }
}

/// Solves `M·X = rhs` by partial-pivoting LU.
pub fn solve_linear(m: &ComplexMatrix, rhs: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    Lu::factor(m)?.solve(rhs)
}

pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    Lu::factor(m)?.solve(&ComplexMatrix::identity(m.rows()))
}
