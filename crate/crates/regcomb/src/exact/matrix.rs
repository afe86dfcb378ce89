//! Dense matrices with arbitrary-precision rational entries.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat_int(v: &Int) -> Rat {
    Rat::from_integer(v.clone())
}

/// Row-major matrix over the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "dimensions must be positive");
        ExactMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        assert!(r > 0);
        let c = rows[0].len();
        assert!(c > 0 && rows.iter().all(|row| row.len() == c));
        ExactMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_int_rows(rows: Vec<Vec<Int>>) -> Self {
        Self::from_rows(
            rows.into_iter()
                .map(|row| row.into_iter().map(Rat::from_integer).collect())
                .collect(),
        )
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries_mut(&mut self) -> impl Iterator<Item = &mut Rat> {
        self.data.iter_mut()
    }

    pub fn is_integer(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    /// Entries as integers; panics if any denominator is not 1.
    pub fn int_entries(&self) -> Vec<Int> {
        self.data.iter().map(|x| x.to_integer()).collect()
    }

    pub fn max_abs_int(&self) -> Int {
        self.data
            .iter()
            .map(|x| x.to_integer().abs())
            .max()
            .unwrap_or_else(Int::zero)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in mul");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = a * &rhs[(k, j)];
                    out[(i, j)] += v;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .fold(Rat::zero(), |acc, x| acc + x)
            })
            .collect()
    }

    /// Gram matrix mᵗm, kept in integers when the input is integer.
    pub fn gram(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.cols);
        for i in 0..self.cols {
            for j in i..self.cols {
                let mut s = Rat::zero();
                for b in 0..self.rows {
                    s += &self[(b, i)] * &self[(b, j)];
                }
                out[(j, i)] = s.clone();
                out[(i, j)] = s;
            }
        }
        out
    }

    /// Rank via exact Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut work: Vec<Vec<Rat>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..work.len()).find(|&r| !work[r][col].is_zero()) else {
                continue;
            };
            work.swap(rank, pivot);
            let inv = work[rank][col].recip();
            for x in work[rank][col..].iter_mut() {
                *x *= &inv;
            }
            for r in 0..work.len() {
                if r != rank && !work[r][col].is_zero() {
                    let f = work[r][col].clone();
                    for c in col..self.cols {
                        let sub = &f * &work[rank][c];
                        work[r][c] -= sub;
                    }
                }
            }
            rank += 1;
            if rank == work.len() {
                break;
            }
        }
        rank
    }

    /// Exact inverse of a square matrix.
    pub fn inverse(&self) -> Result<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut work: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                let mut row = self.row(i).to_vec();
                row.extend((0..n).map(|j| {
                    if i == j {
                        Rat::one()
                    } else {
                        Rat::zero()
                    }
                }));
                row
            })
            .collect();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !work[r][col].is_zero()) else {
                return Err(Error::RankDeficient {
                    found: col,
                    expected: n,
                });
            };
            work.swap(col, pivot);
            let inv = work[col][col].recip();
            for x in work[col].iter_mut() {
                *x *= &inv;
            }
            for r in 0..n {
                if r != col && !work[r][col].is_zero() {
                    let f = work[r][col].clone();
                    for c in 0..2 * n {
                        let sub = &f * &work[col][c];
                        work[r][c] -= sub;
                    }
                }
            }
        }
        Ok(Self::from_rows(
            work.into_iter().map(|row| row[n..].to_vec()).collect(),
        ))
    }
}

impl std::ops::Index<(usize, usize)> for ExactMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

/// Fraction-free Bareiss determinant of a square integer matrix.
pub fn det_bareiss(n: usize, entries: &[Int]) -> Int {
    assert_eq!(entries.len(), n * n);
    if n == 0 {
        return Int::one();
    }
    let mut a: Vec<Vec<Int>> = (0..n).map(|i| entries[i * n..(i + 1) * n].to_vec()).collect();
    let mut sign = 1i32;
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return Int::zero();
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = &num / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 { -d } else { d }
}

/// det(mᵗm) for an integer matrix with independent columns.
pub fn gram_determinant(m: &ExactMatrix) -> Result<Int> {
    assert!(m.is_integer(), "gram_determinant expects an integer matrix");
    let g = m.gram();
    let d = det_bareiss(m.cols, &g.int_entries());
    if d.is_zero() {
        return Err(Error::RankDeficient {
            found: m.rank(),
            expected: m.cols,
        });
    }
    Ok(d)
}

/// Exact solve of m·x = b for symmetric positive definite m.
pub fn solve_spd(m: &ExactMatrix, b: &[Rat]) -> Result<Vec<Rat>> {
    let n = m.rows;
    if m.cols != n || b.len() != n {
        return Err(Error::Dimension(format!(
            "solve_spd: {}x{} with rhs length {}",
            m.rows,
            m.cols,
            b.len()
        )));
    }
    for i in 0..n {
        for j in i + 1..n {
            if m[(i, j)] != m[(j, i)] {
                return Err(Error::NotSpd);
            }
        }
    }
    let mut work: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row = m.row(i).to_vec();
            row.push(b[i].clone());
            row
        })
        .collect();
    // Elimination without pivoting: SPD leading principal minors are positive.
    for col in 0..n {
        if work[col][col] <= Rat::zero() {
            return Err(Error::NotSpd);
        }
        for r in col + 1..n {
            if work[r][col].is_zero() {
                continue;
            }
            let f = &work[r][col] / &work[col][col];
            for c in col..=n {
                let sub = &f * &work[col][c];
                work[r][c] -= sub;
            }
        }
    }
    let mut x = vec![Rat::zero(); n];
    for i in (0..n).rev() {
        let mut s = work[i][n].clone();
        for j in i + 1..n {
            s -= &work[i][j] * &x[j];
        }
        x[i] = s / &work[i][i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngExt as _;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn im(rows: Vec<Vec<i64>>) -> ExactMatrix {
        ExactMatrix::from_int_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(Int::from).collect())
                .collect(),
        )
    }

    #[test]
    fn gram_identity() {
        assert_eq!(gram_determinant(&ExactMatrix::identity(4)).unwrap(), int(1));
    }

    #[test]
    fn gram_k4_incidence() {
        // Edges of K4 as a 6x4 incidence matrix; eigenvalues of 2I+J are 2,2,2,6.
        let mut rows = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                let mut r = vec![0i64; 4];
                r[i] = 1;
                r[j] = 1;
                rows.push(r);
            }
        }
        assert_eq!(gram_determinant(&im(rows)).unwrap(), int(48));
    }

    #[test]
    fn gram_rank_deficient() {
        let m = im(vec![vec![1, 2], vec![2, 4], vec![3, 6]]);
        assert!(matches!(
            gram_determinant(&m),
            Err(Error::RankDeficient { found: 1, expected: 2 })
        ));
    }

    #[test]
    fn solve_spd_examples() {
        let m = im(vec![vec![2, 0], vec![0, 4]]);
        let b = vec![Rat::one(), Rat::one()];
        let x = solve_spd(&m, &b).unwrap();
        assert_eq!(x[0], Rat::new(int(1), int(2)));
        assert_eq!(x[1], Rat::new(int(1), int(4)));

        // (2I+J) 3x3 has row sums 5.
        let m = im(vec![vec![3, 1, 1], vec![1, 3, 1], vec![1, 1, 3]]);
        let b = vec![Rat::one(), Rat::one(), Rat::one()];
        let x = solve_spd(&m, &b).unwrap();
        assert!(x.iter().all(|v| *v == Rat::new(int(1), int(5))));
    }

    #[test]
    fn solve_spd_rejects_indefinite() {
        let m = im(vec![vec![0, 1], vec![1, 0]]);
        assert!(matches!(
            solve_spd(&m, &[Rat::one(), Rat::one()]),
            Err(Error::NotSpd)
        ));
    }

    fn det_cofactor(n: usize, a: &[Int]) -> Int {
        if n == 1 {
            return a[0].clone();
        }
        let mut acc = Int::zero();
        for col in 0..n {
            if a[col].is_zero() {
                continue;
            }
            let mut minor = Vec::with_capacity((n - 1) * (n - 1));
            for i in 1..n {
                for j in 0..n {
                    if j != col {
                        minor.push(a[i * n + j].clone());
                    }
                }
            }
            let term = &a[col] * det_cofactor(n - 1, &minor);
            if col % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor(n in 1usize..=5, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let entries: Vec<Int> = (0..n * n).map(|_| int(rng.random_range(-9i64..=9))).collect();
            prop_assert_eq!(det_bareiss(n, &entries), det_cofactor(n, &entries));
        }

        #[test]
        fn rank_bounded(n in 1usize..=4, m in 1usize..=4, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let rows: Vec<Vec<Int>> = (0..n)
                .map(|_| (0..m).map(|_| int(rng.random_range(-3i64..=3))).collect())
                .collect();
            let mat = ExactMatrix::from_int_rows(rows);
            let r = mat.rank();
            prop_assert!(r <= n.min(m));
            prop_assert!(r.to_i64().is_some());
        }
    }
}
