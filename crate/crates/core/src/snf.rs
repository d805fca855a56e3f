//! Smith normal form of integer matrices.
//!
//! Elimination runs in `i128` with checked arithmetic and restarts over
//! arbitrary-precision integers if any intermediate value overflows.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Sparse integer matrix stored by rows; entries are kept sorted by column
/// and never store zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, i64)>>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = IntMatrix::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        match self.data[i].binary_search_by_key(&j, |&(c, _)| c) {
            Ok(k) => self.data[i][k].1,
            Err(_) => 0,
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        let row = &mut self.data[i];
        match row.binary_search_by_key(&j, |&(c, _)| c) {
            Ok(k) if v == 0 => {
                row.remove(k);
            }
            Ok(k) => row[k].1 = v,
            Err(_) if v == 0 => {}
            Err(k) => row.insert(k, (j, v)),
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: i64) {
        let cur = self.get(i, j);
        self.set(i, j, cur + v);
    }

    pub fn row(&self, i: usize) -> &[(usize, i64)] {
        &self.data[i]
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0; self.cols]; self.rows];
        for (i, row) in self.data.iter().enumerate() {
            for &(j, v) in row {
                out[i][j] = v;
            }
        }
        out
    }

    /// Product `self * other`, exact in `i128` and narrowed back.
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for (i, row) in self.data.iter().enumerate() {
            let mut acc: std::collections::BTreeMap<usize, i128> = Default::default();
            for &(k, a) in row {
                for &(j, b) in &other.data[k] {
                    *acc.entry(j).or_default() += a as i128 * b as i128;
                }
            }
            out.data[i] = acc
                .into_iter()
                .filter(|&(_, v)| v != 0)
                .map(|(j, v)| (j, i64::try_from(v).expect("matrix product overflows i64")))
                .collect();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    /// Positive invariant factors, each dividing the next.
    pub factors: Vec<BigInt>,
    pub rank: usize,
}

impl SmithForm {
    /// Factors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.factors.iter().filter(|f| !f.is_one()).cloned().collect()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let small: Vec<Vec<(usize, i128)>> = a
        .data
        .iter()
        .map(|row| row.iter().map(|&(j, v)| (j, v as i128)).collect())
        .collect();
    let diagonal = match diagonalize(small, a.cols) {
        Some(d) => d.into_iter().map(BigInt::from).collect(),
        None => {
            let big = a
                .data
                .iter()
                .map(|row| row.iter().map(|&(j, v)| (j, BigInt::from(v))).collect())
                .collect();
            diagonalize(big, a.cols).expect("arbitrary precision cannot overflow")
        }
    };
    let rank = diagonal.len();
    SmithForm { factors: normalize_diagonal(diagonal), rank }
}

/// Integer arithmetic used by the elimination; `None` signals overflow.
trait Scalar: Clone + PartialEq + Zero {
    fn abs_cmp(&self, other: &Self) -> Ordering;
    fn is_unit(&self) -> bool;
    fn quot(&self, d: &Self) -> Self;
    /// `self - q * x`
    fn sub_mul(&self, q: &Self, x: &Self) -> Option<Self>;
    fn magnitude(&self) -> Self;
}

impl Scalar for i128 {
    fn abs_cmp(&self, other: &Self) -> Ordering {
        self.unsigned_abs().cmp(&other.unsigned_abs())
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn quot(&self, d: &Self) -> Self {
        self / d
    }
    fn sub_mul(&self, q: &Self, x: &Self) -> Option<Self> {
        let r = self.checked_sub(q.checked_mul(*x)?)?;
        (r != i128::MIN).then_some(r)
    }
    fn magnitude(&self) -> Self {
        self.abs()
    }
}

impl Scalar for BigInt {
    fn abs_cmp(&self, other: &Self) -> Ordering {
        self.magnitude().cmp(other.magnitude())
    }
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
    fn quot(&self, d: &Self) -> Self {
        self / d
    }
    fn sub_mul(&self, q: &Self, x: &Self) -> Option<Self> {
        Some(self - q * x)
    }
    fn magnitude(&self) -> Self {
        self.abs()
    }
}

type Row<T> = Vec<(usize, T)>;

fn entry<T: Scalar>(row: &Row<T>, j: usize) -> Option<&T> {
    row.binary_search_by_key(&j, |(c, _)| *c).ok().map(|k| &row[k].1)
}

/// `target - q * source`, merged by column.
fn row_sub_mul<T: Scalar>(target: &Row<T>, q: &T, source: &Row<T>) -> Option<Row<T>> {
    let mut out = Vec::with_capacity(target.len() + source.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < source.len() {
        let ti = target.get(i).map(|e| e.0);
        let sj = source.get(j).map(|e| e.0);
        match (ti, sj) {
            (Some(a), Some(b)) if a == b => {
                let v = target[i].1.sub_mul(q, &source[j].1)?;
                if !v.is_zero() {
                    out.push((a, v));
                }
                i += 1;
                j += 1;
            }
            (Some(a), Some(b)) if a < b => {
                out.push(target[i].clone());
                i += 1;
            }
            (Some(a), None) => {
                out.push((a, target[i].1.clone()));
                i += 1;
            }
            (_, Some(b)) => {
                let v = T::zero().sub_mul(q, &source[j].1)?;
                out.push((b, v));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    Some(out)
}

/// Reduces to a diagonal by unimodular row and column operations; returns
/// the absolute values of the pivots, or `None` on overflow.
fn diagonalize<T: Scalar>(mut rows: Vec<Row<T>>, cols: usize) -> Option<Vec<T>> {
    let mut row_active: Vec<bool> = rows.iter().map(|r| !r.is_empty()).collect();
    let mut col_active = vec![true; cols];
    let mut pivots = Vec::new();

    loop {
        // Least-magnitude active entry; any unit ends the search early.
        let mut best: Option<(usize, usize)> = None;
        'search: for (i, row) in rows.iter().enumerate() {
            if !row_active[i] {
                continue;
            }
            for (j, v) in row {
                if !col_active[*j] {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bi, bj)) => v.abs_cmp(entry(&rows[bi], bj).unwrap()) == Ordering::Less,
                };
                if better {
                    best = Some((i, *j));
                    if v.is_unit() {
                        break 'search;
                    }
                }
            }
        }
        let Some((mut r, mut c)) = best else { break };

        loop {
            // Clear column c below/above the pivot with row operations.
            let mut smallest_rem: Option<usize> = None;
            for i in 0..rows.len() {
                if i == r || !row_active[i] {
                    continue;
                }
                let Some(v) = entry(&rows[i], c) else { continue };
                let p = entry(&rows[r], c).unwrap();
                let q = v.quot(p);
                if !q.is_zero() {
                    rows[i] = row_sub_mul(&rows[i], &q, &rows[r])?;
                }
                if let Some(rem) = entry(&rows[i], c) {
                    let replace = match smallest_rem {
                        None => true,
                        Some(s) => rem.abs_cmp(entry(&rows[s], c).unwrap()) == Ordering::Less,
                    };
                    if replace {
                        smallest_rem = Some(i);
                    }
                }
                if rows[i].is_empty() {
                    row_active[i] = false;
                }
            }
            if let Some(i) = smallest_rem {
                r = i;
                continue;
            }

            // Column c now vanishes outside row r, so column operations only touch row r.
            let p = entry(&rows[r], c).unwrap().clone();
            let mut new_row = Vec::with_capacity(1);
            let mut smallest: Option<usize> = None;
            for (j, v) in std::mem::take(&mut rows[r]) {
                if j == c || !col_active[j] {
                    new_row.push((j, v));
                    continue;
                }
                let q = v.quot(&p);
                let rem = v.sub_mul(&q, &p)?;
                if !rem.is_zero() {
                    new_row.push((j, rem));
                }
            }
            rows[r] = new_row;
            for (j, v) in &rows[r] {
                if *j != c && col_active[*j] {
                    let replace = match smallest {
                        None => true,
                        Some(s) => v.abs_cmp(entry(&rows[r], s).unwrap()) == Ordering::Less,
                    };
                    if replace {
                        smallest = Some(*j);
                    }
                }
            }
            match smallest {
                Some(j) => c = j,
                None => break,
            }
        }

        let p = entry(&rows[r], c).unwrap().magnitude();
        pivots.push(p);
        row_active[r] = false;
        col_active[c] = false;
    }
    Some(pivots)
}

/// Replaces a diagonal by the equivalent divisibility chain.
fn normalize_diagonal(mut d: Vec<BigInt>) -> Vec<BigInt> {
    d.sort();
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            if g != d[i] {
                let l = d[i].lcm(&d[j]);
                d[i] = g;
                d[j] = l;
            }
        }
    }
    d
}

/// Rank over the rationals by fraction-free elimination.
pub fn rational_rank(a: &IntMatrix) -> usize {
    let mut m: Vec<Vec<BigInt>> = a
        .to_dense()
        .into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect();
    let (rows, cols) = (a.rows, a.cols);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(rank, p);
        for i in rank + 1..rows {
            if m[i][c].is_zero() {
                continue;
            }
            let (a, b) = (m[rank][c].clone(), m[i][c].clone());
            let pivot = m[rank].clone();
            for (x, y) in m[i][c..cols].iter_mut().zip(&pivot[c..cols]) {
                *x = &*x * &a - y * &b;
            }
            let g = m[i].iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            if !g.is_zero() && !g.is_one() {
                for x in m[i].iter_mut() {
                    *x = &*x / &g;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factors(rows: &[Vec<i64>]) -> Vec<i64> {
        smith_normal_form(&IntMatrix::from_rows(rows))
            .factors
            .iter()
            .map(|f| i64::try_from(f).unwrap())
            .collect()
    }

    #[test]
    fn identity() {
        let f = smith_normal_form(&IntMatrix::identity(3));
        assert_eq!(f.rank, 3);
        assert_eq!(factors(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]), vec![1, 1, 1]);
    }

    #[test]
    fn zero_and_empty() {
        assert_eq!(smith_normal_form(&IntMatrix::zeros(3, 4)).rank, 0);
        assert_eq!(smith_normal_form(&IntMatrix::zeros(0, 0)).factors, Vec::<BigInt>::new());
        assert_eq!(smith_normal_form(&IntMatrix::zeros(0, 5)).rank, 0);
    }

    #[test]
    fn small_examples() {
        assert_eq!(factors(&[vec![2, 4], vec![6, 8]]), vec![2, 4]);
        assert_eq!(factors(&[vec![2, 0], vec![0, 3]]), vec![1, 6]);
        assert_eq!(factors(&[vec![4, 0], vec![0, 6]]), vec![2, 12]);
        assert_eq!(factors(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]), vec![2, 6, 12]);
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = i64::MAX / 3;
        let rows = vec![vec![big, big - 1, 7], vec![big - 5, big, 11], vec![13, big - 2, big]];
        let f = smith_normal_form(&IntMatrix::from_rows(&rows));
        assert_eq!(f.rank, 3);
        assert_eq!(f.rank, rational_rank(&IntMatrix::from_rows(&rows)));
    }

    #[test]
    fn product_of_sparse_matrices() {
        let a = IntMatrix::from_rows(&[vec![1, -1, 0], vec![0, 1, -1]]);
        let b = IntMatrix::from_rows(&[vec![1], vec![1], vec![1]]);
        assert!(a.mul(&b).is_zero());
    }
}
