//! Smith normal form, Hermite bases and full-rank integer lattices.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::matrix::{ExactMatrix, Int, Rat};

/// Smith normal form with unimodular transform certificates: u * m * v = diag(divisors).
#[derive(Debug, Clone)]
pub struct Snf {
    pub divisors: Vec<Int>,
    pub u: Vec<Vec<Int>>,
    pub v: Vec<Vec<Int>>,
}

fn mat_is_zero(a: &[Vec<Int>], from: usize) -> bool {
    a.iter()
        .skip(from)
        .all(|row| row.iter().skip(from).all(|x| x.is_zero()))
}

/// Pivot choice: smallest nonzero absolute value, ties broken by ascending (row, col).
fn find_pivot(a: &[Vec<Int>], from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(from) {
        for (j, x) in row.iter().enumerate().skip(from) {
            if x.is_zero() {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some((bi, bj)) => {
                    let cur = x.abs();
                    let b = a[bi][bj].abs();
                    if cur < b {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    best
}

pub fn smith_normal_form(rows: usize, cols: usize, entries: &[Int]) -> Snf {
    assert_eq!(entries.len(), rows * cols);
    let mut a: Vec<Vec<Int>> = (0..rows)
        .map(|i| entries[i * cols..(i + 1) * cols].to_vec())
        .collect();
    let mut u: Vec<Vec<Int>> = (0..rows)
        .map(|i| (0..rows).map(|j| Int::from((i == j) as i64)).collect())
        .collect();
    let mut v: Vec<Vec<Int>> = (0..cols)
        .map(|i| (0..cols).map(|j| Int::from((i == j) as i64)).collect())
        .collect();

    let n = rows.min(cols);
    let mut k = 0;
    while k < n && !mat_is_zero(&a, k) {
        // Reduce until a[k][k] divides its whole row, column and trailing block.
        loop {
            let (pi, pj) = find_pivot(&a, k).expect("nonzero block has a pivot");
            if pi != k {
                a.swap(k, pi);
                u.swap(k, pi);
            }
            if pj != k {
                for row in a.iter_mut() {
                    row.swap(k, pj);
                }
                for row in v.iter_mut() {
                    row.swap(k, pj);
                }
            }
            let mut dirty = false;
            // Clear column k below the pivot.
            for i in k + 1..rows {
                if a[i][k].is_zero() {
                    continue;
                }
                let q = div_round(&a[i][k], &a[k][k]);
                if !q.is_zero() {
                    for j in 0..cols {
                        let s = &q * &a[k][j];
                        a[i][j] -= s;
                    }
                    for j in 0..rows {
                        let s = &q * &u[k][j];
                        u[i][j] -= s;
                    }
                }
                if !a[i][k].is_zero() {
                    dirty = true;
                }
            }
            // Clear row k right of the pivot.
            for j in k + 1..cols {
                if a[k][j].is_zero() {
                    continue;
                }
                let q = div_round(&a[k][j], &a[k][k]);
                if !q.is_zero() {
                    for i in 0..rows {
                        let s = &q * &a[i][k];
                        a[i][j] -= s;
                    }
                    for i in 0..cols {
                        let s = &q * &v[i][k];
                        v[i][j] -= s;
                    }
                }
                if !a[k][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Row and column are clear; enforce divisibility on the trailing block.
            let mut fixed = true;
            'scan: for i in k + 1..rows {
                for j in k + 1..cols {
                    if !(&a[i][j] % &a[k][k]).is_zero() {
                        // Fold row i into row k to expose a smaller pivot.
                        for c in 0..cols {
                            let add = a[i][c].clone();
                            a[k][c] += add;
                        }
                        for c in 0..rows {
                            let add = u[i][c].clone();
                            u[k][c] += add;
                        }
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if a[k][k].is_negative() {
            for j in 0..cols {
                a[k][j] = -a[k][j].clone();
            }
            for j in 0..rows {
                u[k][j] = -u[k][j].clone();
            }
        }
        k += 1;
    }

    let divisors = (0..k).map(|i| a[i][i].clone()).collect();
    Snf { divisors, u, v }
}

/// Quotient rounded to nearest, which keeps remainders at most |d|/2.
fn div_round(a: &Int, d: &Int) -> Int {
    let (q, r) = a.div_rem(d);
    let two_r: Int = &r * 2;
    if two_r.abs() > d.abs() {
        if (r.is_negative()) == (d.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Full-rank integer lattice in Z^dim with a canonical Hermite basis:
/// lower-triangular rows, positive diagonal, off-diagonal entries reduced
/// into [0, diagonal) of their column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerLattice {
    pub dim: usize,
    pub basis: Vec<Vec<Int>>,
    pub snf_divisors: Vec<Int>,
}

impl IntegerLattice {
    pub fn from_generators(gens: &ExactMatrix) -> Result<Self> {
        assert!(gens.is_integer(), "lattice generators must be integer");
        let dim = gens.cols;
        let mut work: Vec<Vec<Int>> = (0..gens.rows)
            .map(|i| gens.row(i).iter().map(|x| x.to_integer()).collect())
            .collect();

        // Lower-triangular HNF: pivot columns processed right to left, so each
        // pivot row is zero in all later columns.
        let mut basis: Vec<Option<Vec<Int>>> = vec![None; dim];
        for col in (0..dim).rev() {
            // Combine rows via gcd steps until one nonzero entry remains in `col`.
            loop {
                let nz: Vec<usize> = (0..work.len()).filter(|&r| !work[r][col].is_zero()).collect();
                if nz.len() <= 1 {
                    break;
                }
                // Reduce the larger entry by the smaller.
                let mut a = nz[0];
                for &r in &nz[1..] {
                    if work[r][col].abs() < work[a][col].abs() {
                        a = r;
                    }
                }
                for &r in &nz {
                    if r == a {
                        continue;
                    }
                    let q = Int::from(&work[r][col] / &work[a][col]);
                    if !q.is_zero() {
                        for c in 0..dim {
                            let s = &q * &work[a][c];
                            work[r][c] -= s;
                        }
                    }
                }
            }
            if let Some(r) = (0..work.len()).find(|&r| !work[r][col].is_zero()) {
                let mut row = work.remove(r);
                if row[col].is_negative() {
                    for x in row.iter_mut() {
                        *x = -x.clone();
                    }
                }
                basis[col] = Some(row);
            }
        }
        let found = basis.iter().filter(|b| b.is_some()).count();
        if found < dim {
            return Err(Error::RankDeficient {
                found,
                expected: dim,
            });
        }
        let mut basis: Vec<Vec<Int>> = basis.into_iter().map(|b| b.unwrap()).collect();
        // Reduce off-diagonal entries mod the diagonal of their column.
        for i in 0..dim {
            for j in (0..i).rev() {
                let d = basis[j][j].clone();
                let q = basis[i][j].div_floor(&d);
                if !q.is_zero() {
                    for c in 0..=j {
                        let s = &q * &basis[j][c];
                        basis[i][c] -= s;
                    }
                }
            }
        }

        let entries: Vec<Int> = gens.int_entries();
        let snf = smith_normal_form(gens.rows, gens.cols, &entries);
        Ok(IntegerLattice {
            dim,
            basis,
            snf_divisors: snf.divisors,
        })
    }

    pub fn standard(dim: usize) -> Self {
        IntegerLattice {
            dim,
            basis: (0..dim)
                .map(|i| (0..dim).map(|j| Int::from((i == j) as i64)).collect())
                .collect(),
            snf_divisors: vec![Int::one(); dim],
        }
    }

    pub fn det(&self) -> Int {
        self.basis
            .iter()
            .enumerate()
            .fold(Int::one(), |acc, (i, row)| acc * &row[i])
    }

    /// Coordinates y with y·basis = v, if the system is consistent (it always
    /// is for a full-rank lattice).
    fn coordinates(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.dim);
        let mut y = vec![Rat::zero(); self.dim];
        for col in (0..self.dim).rev() {
            let mut s = v[col].clone();
            for i in col + 1..self.dim {
                s -= &y[i] * &Rat::from_integer(self.basis[i][col].clone());
            }
            y[col] = s / Rat::from_integer(self.basis[col][col].clone());
        }
        y
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.minimal_multiplier(v).is_one()
    }

    /// Least positive integer N with N·v in the lattice.
    pub fn minimal_multiplier(&self, v: &[Rat]) -> Int {
        self.coordinates(v)
            .iter()
            .fold(Int::one(), |acc, y| acc.lcm(y.denom()))
    }

    /// Rows of the dual basis: integer inner products against every lattice
    /// vector, det(dual)·det(primal) = 1.
    pub fn dual_basis(&self) -> ExactMatrix {
        let b = ExactMatrix::from_int_rows(self.basis.clone());
        b.inverse().expect("full-rank lattice basis").transpose()
    }
}
