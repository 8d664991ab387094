//! Small dense matrices over exact rationals. Dimensions in this crate never
//! exceed the ambient dimension of an `E8` realization, so everything is
//! plain Gaussian elimination without pivindexing tricks.

use crate::rat::{rat_i, Rat};
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMat {
    pub nrows: usize,
    pub ncols: usize,
    data: Vec<Rat>,
}

impl RatMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        RatMat {
            nrows,
            ncols,
            data: vec![Rat::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let nrows = rows.len();
        let ncols = if nrows == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged matrix rows");
            data.extend(r);
        }
        RatMat { nrows, ncols, data }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        RatMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat_i(x)).collect())
                .collect(),
        )
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.ncols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.ncols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn transpose(&self) -> RatMat {
        let mut t = RatMat::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.ncols, other.nrows);
        let mut out = RatMat::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.ncols, v.len());
        (0..self.nrows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Rat::zero(), |acc, (a, x)| acc + a * x)
            })
            .collect()
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut m = self.clone();
        let mut det = Rat::one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m.get(r, col).is_zero());
            let Some(p) = pivot else {
                return Rat::zero();
            };
            if p != col {
                for j in 0..n {
                    let a = m.get(col, j).clone();
                    let b = m.get(p, j).clone();
                    m.set(col, j, b);
                    m.set(p, j, a);
                }
                det = -det;
            }
            let pv = m.get(col, col).clone();
            det *= &pv;
            for r in col + 1..n {
                let f = m.get(r, col) / &pv;
                if f.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = m.get(r, j) - &f * m.get(col, j);
                    m.set(r, j, v);
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse; `None` if singular.
    pub fn inverse(&self) -> Option<RatMat> {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut m = self.clone();
        let mut inv = RatMat::identity(n);
        for col in 0..n {
            let p = (col..n).find(|&r| !m.get(r, col).is_zero())?;
            if p != col {
                for j in 0..n {
                    let (a, b) = (m.get(col, j).clone(), m.get(p, j).clone());
                    m.set(col, j, b);
                    m.set(p, j, a);
                    let (a, b) = (inv.get(col, j).clone(), inv.get(p, j).clone());
                    inv.set(col, j, b);
                    inv.set(p, j, a);
                }
            }
            let pv = m.get(col, col).clone();
            for j in 0..n {
                let v = m.get(col, j) / &pv;
                m.set(col, j, v);
                let v = inv.get(col, j) / &pv;
                inv.set(col, j, v);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = m.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = m.get(r, j) - &f * m.get(col, j);
                    m.set(r, j, v);
                    let v = inv.get(r, j) - &f * inv.get(col, j);
                    inv.set(r, j, v);
                }
            }
        }
        Some(inv)
    }
}

/// Solves the square system `rows * x = rhs`; `None` if singular or
/// inconsistent dimensions are a caller bug (asserted).
pub fn solve_square(rows: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let n = rows.len();
    assert_eq!(rhs.len(), n);
    let mut aug: Vec<Vec<Rat>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            assert_eq!(r.len(), n);
            let mut v = r.clone();
            v.push(b.clone());
            v
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, p);
        let pv = aug[col][col].clone();
        for j in col..=n {
            aug[col][j] = &aug[col][j] / &pv;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = aug[r][col].clone();
            if f.is_zero() {
                continue;
            }
            for j in col..=n {
                aug[r][j] = &aug[r][j] - &f * &aug[col][j];
            }
        }
    }
    Some(aug.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Coordinates of `v` in the full-column-rank spanning set `cols` (vectors of
/// a common ambient dimension), via the normal equations. `None` when `v`
/// lies outside the span.
pub fn coords_in_span(cols: &[Vec<Rat>], v: &[Rat]) -> Option<Vec<Rat>> {
    let l = cols.len();
    let gram: Vec<Vec<Rat>> = (0..l)
        .map(|i| (0..l).map(|j| dot(&cols[i], &cols[j])).collect())
        .collect();
    let rhs: Vec<Rat> = (0..l).map(|i| dot(&cols[i], v)).collect();
    let x = solve_square(&gram, &rhs)?;
    // Residual check: the normal equations alone project onto the span.
    let n = v.len();
    for k in 0..n {
        let mut s = Rat::zero();
        for (i, c) in cols.iter().enumerate() {
            s += &x[i] * &c[k];
        }
        if s != v[k] {
            return None;
        }
    }
    Some(x)
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn det_and_inverse_agree() {
        let m = RatMat::from_i64(&[vec![2, -1], vec![-1, 2]]);
        assert_eq!(m.det(), rat_i(3));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), RatMat::identity(2));
        assert_eq!(*inv.get(0, 0), rat(2, 3));
    }

    #[test]
    fn singular_has_no_inverse() {
        let m = RatMat::from_i64(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(m.det(), rat_i(0));
        assert!(m.inverse().is_none());
    }

    #[test]
    fn coords_in_span_detects_outside_vectors() {
        // Two columns spanning the sum-zero plane of R^3.
        let cols = vec![
            vec![rat_i(1), rat_i(-1), rat_i(0)],
            vec![rat_i(0), rat_i(1), rat_i(-1)],
        ];
        let inside = vec![rat_i(1), rat_i(0), rat_i(-1)];
        assert_eq!(
            coords_in_span(&cols, &inside),
            Some(vec![rat_i(1), rat_i(1)])
        );
        let outside = vec![rat_i(1), rat_i(1), rat_i(1)];
        assert_eq!(coords_in_span(&cols, &outside), None);
    }

    #[test]
    fn solve_square_roundtrip() {
        let rows = vec![vec![rat_i(2), rat_i(1)], vec![rat_i(1), rat_i(3)]];
        let x = solve_square(&rows, &[rat_i(5), rat_i(10)]).unwrap();
        assert_eq!(x, vec![rat_i(1), rat_i(3)]);
    }
}
