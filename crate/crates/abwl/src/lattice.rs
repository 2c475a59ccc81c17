//! Exact integer matrices, Smith normal form and the quotient `Z^m / G`
//! where `G` is the lattice spanned by the rows of a nonsingular matrix.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("rows have unequal lengths")]
    Ragged,
}

type Result<T> = std::result::Result<T, LatticeError>;

fn ck(x: Option<i64>) -> Result<i64> {
    x.ok_or(LatticeError::Overflow)
}

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = LatticeError;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        IntMatrix::from_rows(&rows)
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        (0..m.rows).map(|i| m.row(i).to_vec()).collect()
    }
}

impl IntMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(LatticeError::Ragged);
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.concat(),
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(LatticeError::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0i64;
                for t in 0..self.cols {
                    acc = ck(acc.checked_add(ck(self.get(i, t).checked_mul(other.get(t, j)))?))?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Row vector `v` times this matrix.
    pub fn left_mul(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.rows {
            return Err(LatticeError::DimensionMismatch {
                expected: self.rows,
                got: v.len(),
            });
        }
        (0..self.cols)
            .map(|j| {
                v.iter().enumerate().try_fold(0i64, |acc, (i, &x)| {
                    ck(acc.checked_add(ck(x.checked_mul(self.get(i, j)))?))
                })
            })
            .collect()
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(LatticeError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<i64> {
        self.require_square()?;
        let n = self.rows;
        if n == 0 {
            return Ok(1);
        }
        let mut a: Vec<i128> = self.data.iter().map(|&x| x as i128).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k * n + k] == 0 {
                let Some(p) = (k + 1..n).find(|&i| a[i * n + k] != 0) else {
                    return Ok(0);
                };
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[i * n + j]
                        .checked_mul(a[k * n + k])
                        .and_then(|x| x.checked_sub(a[i * n + k].checked_mul(a[k * n + j])?))
                        .ok_or(LatticeError::Overflow)?;
                    a[i * n + j] = num / prev;
                }
            }
            prev = a[k * n + k];
        }
        i64::try_from(sign * a[n * n - 1]).map_err(|_| LatticeError::Overflow)
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> IntMatrix {
        let n = self.rows;
        let mut data = Vec::with_capacity((n - 1) * (n - 1));
        for i in (0..n).filter(|&i| i != skip_r) {
            for j in (0..n).filter(|&j| j != skip_c) {
                data.push(self.get(i, j));
            }
        }
        IntMatrix {
            rows: n - 1,
            cols: n - 1,
            data,
        }
    }

    /// Classical adjoint: `self * adj = det * I`.
    pub fn adjugate(&self) -> Result<IntMatrix> {
        self.require_square()?;
        let n = self.rows;
        if n == 1 {
            return Ok(IntMatrix::identity(1));
        }
        let mut adj = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let c = self.minor(i, j).det()?;
                let c = if (i + j) % 2 == 0 {
                    c
                } else {
                    ck(c.checked_neg())?
                };
                adj.set(j, i, c);
            }
        }
        Ok(adj)
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|&x| x as f64).collect())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += q * row[src]
    fn add_row(&mut self, dst: usize, src: usize, q: i64) -> Result<()> {
        for j in 0..self.cols {
            let v = ck(self
                .get(dst, j)
                .checked_add(ck(q.checked_mul(self.get(src, j)))?))?;
            self.set(dst, j, v);
        }
        Ok(())
    }

    /// col[dst] += q * col[src]
    fn add_col(&mut self, dst: usize, src: usize, q: i64) -> Result<()> {
        for i in 0..self.rows {
            let v = ck(self
                .get(i, dst)
                .checked_add(ck(q.checked_mul(self.get(i, src)))?))?;
            self.set(i, dst, v);
        }
        Ok(())
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self.get(r, j);
            self.set(r, j, v);
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, c);
            self.set(i, c, v);
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let r: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", r.join(" "))?;
        }
        write!(f, ")")
    }
}

/// `M = U * D * V` with `U`, `V` unimodular and `D` diagonal in divisibility order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// `V^{-1}`, kept because projection onto the quotient needs it.
    pub v_inv: IntMatrix,
}

impl SmithDecomposition {
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i))
            .collect()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Result<SmithDecomposition> {
    let (r, c) = (m.rows(), m.cols());
    let mut a = m.clone();
    // Invariant: a = L * m * R, with u = L^{-1}, v = R^{-1}.
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    let mut rr = IntMatrix::identity(c);

    for t in 0..r.min(c) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = a.get(i, j);
                    if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(a, u, v, rr);
            };
            a.swap_rows(t, pi);
            u.swap_cols(t, pi);
            a.swap_cols(t, pj);
            rr.swap_cols(t, pj);
            v.swap_rows(t, pj);

            let p = a.get(t, t);
            let mut clean = true;
            for i in t + 1..r {
                let q = a.get(i, t) / p;
                if q != 0 {
                    a.add_row(i, t, -q)?;
                    u.add_col(t, i, q)?;
                }
                clean &= a.get(i, t) == 0;
            }
            for j in t + 1..c {
                let q = a.get(t, j) / p;
                if q != 0 {
                    a.add_col(j, t, -q)?;
                    rr.add_col(j, t, -q)?;
                    v.add_row(t, j, q)?;
                }
                clean &= a.get(t, j) == 0;
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| a.get(i, j) % p != 0));
            match bad {
                Some(i) => {
                    a.add_row(t, i, 1)?;
                    u.add_col(i, t, -1)?;
                }
                None => break,
            }
        }
        if a.get(t, t) < 0 {
            a.negate_row(t);
            u.negate_col(t);
        }
    }
    finish(a, u, v, rr)
}

fn finish(
    d: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
) -> Result<SmithDecomposition> {
    Ok(SmithDecomposition { u, d, v, v_inv })
}

/// Finite abelian group `Z/n_1 x ... x Z/n_r` with `n_1 | n_2 | ...` and every `n_i >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    pub invariant_factors: Vec<i64>,
}

/// An element in invariant-factor coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    pub coords: Vec<i64>,
}

impl GroupElement {
    pub fn new(coords: Vec<i64>) -> Self {
        Self { coords }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.len() == 1 {
            return write!(f, "{}", self.coords[0]);
        }
        let s: Vec<String> = self.coords.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl FiniteAbelianGroup {
    pub fn cyclic(n: i64) -> Self {
        if n <= 1 {
            Self::trivial()
        } else {
            Self {
                invariant_factors: vec![n],
            }
        }
    }

    pub fn trivial() -> Self {
        Self {
            invariant_factors: Vec::new(),
        }
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().map(|&x| x as u64).product()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement::new(vec![0; self.rank()])
    }

    pub fn reduce(&self, coords: &[i64]) -> GroupElement {
        GroupElement::new(
            coords
                .iter()
                .zip(&self.invariant_factors)
                .map(|(&x, &n)| x.rem_euclid(n))
                .collect(),
        )
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let s: Vec<i64> = a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect();
        self.reduce(&s)
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let s: Vec<i64> = a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect();
        self.reduce(&s)
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        self.sub(&self.zero(), a)
    }

    pub fn scale(&self, a: &GroupElement, c: i64) -> GroupElement {
        let s: Vec<i64> = a
            .coords
            .iter()
            .zip(&self.invariant_factors)
            .map(|(&x, &n)| ((x as i128 * c as i128).rem_euclid(n as i128)) as i64)
            .collect();
        GroupElement::new(s)
    }

    /// Mixed-radix index in `0..order`.
    pub fn index_of(&self, a: &GroupElement) -> usize {
        a.coords
            .iter()
            .zip(&self.invariant_factors)
            .fold(0usize, |acc, (&x, &n)| acc * n as usize + x as usize)
    }

    pub fn element_at(&self, mut idx: usize) -> GroupElement {
        let mut coords = vec![0; self.rank()];
        for (c, &n) in coords.iter_mut().zip(&self.invariant_factors).rev() {
            *c = (idx % n as usize) as i64;
            idx /= n as usize;
        }
        GroupElement::new(coords)
    }

    /// All elements in lexicographic coordinate order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order() as usize).map(|i| self.element_at(i))
    }

    pub fn contains(&self, a: &GroupElement) -> bool {
        a.coords.len() == self.rank()
            && a.coords
                .iter()
                .zip(&self.invariant_factors)
                .all(|(&x, &n)| (0..n).contains(&x))
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariant_factors.is_empty() {
            return write!(f, "0");
        }
        let s: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|n| format!("Z/{n}"))
            .collect();
        write!(f, "{}", s.join(" x "))
    }
}

/// `Z^m / G` for the row lattice `G` of a nonsingular square matrix, with a
/// cached projection map.
#[derive(Clone, Debug)]
pub struct Quotient {
    matrix: IntMatrix,
    det: i64,
    adj: IntMatrix,
    snf: SmithDecomposition,
    group: FiniteAbelianGroup,
    /// Columns of `V^{-1}` belonging to nontrivial invariant factors.
    first: usize,
}

impl Quotient {
    pub fn new(m: &IntMatrix) -> Result<Self> {
        m.require_square()?;
        let det = m.det()?;
        if det == 0 {
            return Err(LatticeError::SingularMatrix);
        }
        let adj = m.adjugate()?;
        let snf = smith_normal_form(m)?;
        let diag = snf.diagonal();
        let first = diag.iter().position(|&x| x != 1).unwrap_or(diag.len());
        let group = FiniteAbelianGroup {
            invariant_factors: diag[first..].to_vec(),
        };
        Ok(Self {
            matrix: m.clone(),
            det,
            adj,
            snf,
            group,
            first,
        })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn det(&self) -> i64 {
        self.det
    }

    pub fn adjugate(&self) -> &IntMatrix {
        &self.adj
    }

    pub fn smith(&self) -> &SmithDecomposition {
        &self.snf
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Class of `v` in invariant-factor coordinates.
    pub fn project(&self, v: &[i64]) -> Result<GroupElement> {
        let w = self.snf.v_inv.left_mul(v)?;
        Ok(self.group.reduce(&w[self.first..]))
    }

    /// Adjugate residue test: `v = yM` has an integer solution iff every
    /// coordinate of `v * adj(M)` is divisible by `det M`.
    pub fn contains(&self, v: &[i64]) -> Result<bool> {
        let w = self.adj.left_mul(v)?;
        Ok(w.iter().all(|&x| x % self.det == 0))
    }

    /// Exact `y` with `yM = v`, if integral.
    pub fn solve(&self, v: &[i64]) -> Result<Option<Vec<i64>>> {
        let w = self.adj.left_mul(v)?;
        if w.iter().any(|&x| x % self.det != 0) {
            return Ok(None);
        }
        Ok(Some(w.iter().map(|&x| x / self.det).collect()))
    }
}

pub fn lattice_contains(m: &IntMatrix, v: &[i64]) -> Result<bool> {
    Quotient::new(m)?.contains(v)
}

pub fn quotient(m: &IntMatrix) -> Result<FiniteAbelianGroup> {
    Ok(Quotient::new(m)?.group().clone())
}

pub fn project(m: &IntMatrix, v: &[i64]) -> Result<GroupElement> {
    Quotient::new(m)?.project(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(r: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&r.iter().map(|x| x.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn smith_examples() {
        let s = smith_normal_form(&mat(&[&[4, 1], &[1, 2]])).unwrap();
        assert_eq!(s.diagonal(), vec![1, 7]);
        let s = smith_normal_form(&mat(&[&[7, 4], &[4, 5]])).unwrap();
        assert_eq!(s.diagonal(), vec![1, 19]);
        let id = IntMatrix::identity(3);
        let s = smith_normal_form(&id).unwrap();
        assert_eq!(s.d, id);
    }

    #[test]
    fn reconstruction_and_inverse() {
        let m = mat(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith_normal_form(&m).unwrap();
        assert_eq!(s.diagonal(), vec![2, 6, 12]);
        assert_eq!(s.u.mul(&s.d).unwrap().mul(&s.v).unwrap(), m);
        assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntMatrix::identity(3));
    }

    #[test]
    fn quotients() {
        assert_eq!(
            quotient(&mat(&[&[5, 2], &[2, 3]])).unwrap(),
            FiniteAbelianGroup::cyclic(11)
        );
        assert_eq!(
            quotient(&mat(&[&[4, 1], &[3, 3]])).unwrap(),
            FiniteAbelianGroup::cyclic(9)
        );
        assert_eq!(quotient(&IntMatrix::identity(2)).unwrap().order(), 1);
        assert_eq!(
            quotient(&mat(&[&[1, 1], &[1, 1]])),
            Err(LatticeError::SingularMatrix)
        );
    }

    #[test]
    fn membership() {
        let m = mat(&[&[4, 1], &[1, 2]]);
        assert!(lattice_contains(&m, &[3, -1]).unwrap());
        assert!(lattice_contains(&m, &[0, 0]).unwrap());
        assert!(!lattice_contains(&m, &[1, 0]).unwrap());
    }

    #[test]
    fn projections() {
        let q = Quotient::new(&mat(&[&[4, 1], &[1, 2]])).unwrap();
        assert_eq!(q.project(&[3, 0]).unwrap(), q.project(&[0, 1]).unwrap());
        assert_eq!(q.project(&[0, 0]).unwrap(), q.group().zero());
        let q = Quotient::new(&mat(&[&[5, 2], &[2, 3]])).unwrap();
        assert_eq!(q.project(&[4, 1]).unwrap(), q.project(&[1, 2]).unwrap());
    }

    #[test]
    fn determinant_and_adjugate() {
        let m = mat(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 2]]);
        assert_eq!(m.det().unwrap(), 6);
        let adj = m.adjugate().unwrap();
        let mut six = IntMatrix::identity(3);
        for i in 0..3 {
            six.set(i, i, 6);
        }
        assert_eq!(m.mul(&adj).unwrap(), six);
        assert_eq!(mat(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 1]]).det().unwrap(), 0);
        assert_eq!(mat(&[&[0, 1], &[1, 0]]).det().unwrap(), -1);
    }

    #[test]
    fn overflow_is_reported() {
        let big = i64::MAX / 2;
        let m = mat(&[&[big, 3], &[5, big]]);
        assert_eq!(m.det(), Err(LatticeError::Overflow));
    }

    #[test]
    fn matrix_json() {
        let m = mat(&[&[4, 1], &[1, 2]]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[4,1],[1,2]]");
        let back: IntMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
