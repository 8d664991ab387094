//! Even positive definite lattices spanned by root systems, with two
//! bilinear forms: the standard form `( , )` of the rational realization and
//! the normalized form `< , > = scale * ( , )`, where `scale = 2` exactly
//! when the standard Gram matrix has an odd diagonal entry (so that the
//! normalized lattice is even).
//!
//! Vectors are coordinate vectors over the stored lattice basis. Elliptic
//! exponents elsewhere in the crate are `d`-vectors `d_i = <l, b_i>`; for
//! `l` in the dual lattice these are exactly the integer vectors.

use crate::error::KernelError;
use crate::matrix::RatMat;
use crate::rat::{rat_i, rat_to_i64, Rat};
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BilinearForm {
    Standard,
    Normalized,
}

#[derive(Clone, Debug)]
pub struct Lattice {
    pub name: String,
    pub rank: usize,
    /// Gram matrix of the basis under the standard form; rational entries.
    pub gram_standard: RatMat,
    /// Gram matrix under the normalized form; integer entries, even diagonal.
    pub gram_normalized: Vec<Vec<i64>>,
    /// 1 or 2; equals 2 exactly when `gram_standard` has an odd diagonal entry.
    pub scale: i64,
    gram_norm_inv: RatMat,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank
            && self.scale == other.scale
            && self.gram_normalized == other.gram_normalized
    }
}
impl Eq for Lattice {}

impl Lattice {
    /// Builds a lattice from the standard-form Gram matrix of a basis.
    /// The normalization scale is decided here, not by the caller.
    pub fn from_standard_gram(name: &str, gram_standard: RatMat) -> Result<Lattice, KernelError> {
        let rank = gram_standard.nrows;
        if gram_standard.ncols != rank {
            return Err(KernelError::DimensionMismatch(
                "gram matrix must be square".into(),
            ));
        }
        for i in 0..rank {
            for j in 0..rank {
                if gram_standard.get(i, j) != gram_standard.get(j, i) {
                    return Err(KernelError::Internal("gram matrix not symmetric".into()));
                }
            }
        }
        let mut odd_diag = false;
        for i in 0..rank {
            let d = gram_standard.get(i, i);
            match rat_to_i64(d) {
                Some(v) if v % 2 != 0 => odd_diag = true,
                Some(_) => {}
                None => {
                    return Err(KernelError::IntegralityViolation(format!(
                        "standard gram diagonal entry {} is not an integer",
                        d
                    )))
                }
            }
        }
        let scale = if odd_diag { 2 } else { 1 };
        let mut gram_normalized = vec![vec![0i64; rank]; rank];
        for i in 0..rank {
            for j in 0..rank {
                let v = gram_standard.get(i, j) * rat_i(scale);
                gram_normalized[i][j] = rat_to_i64(&v).ok_or_else(|| {
                    KernelError::IntegralityViolation(format!(
                        "normalized gram entry ({i},{j}) = {v} is not an integer"
                    ))
                })?;
            }
        }
        for (i, row) in gram_normalized.iter().enumerate() {
            if row[i] % 2 != 0 {
                return Err(KernelError::IntegralityViolation(format!(
                    "normalized gram diagonal entry ({i},{i}) is odd"
                )));
            }
        }
        // Positive definiteness: leading principal minors.
        for k in 1..=rank {
            let sub = RatMat::from_rows(
                (0..k)
                    .map(|i| (0..k).map(|j| gram_standard.get(i, j).clone()).collect())
                    .collect(),
            );
            if !sub.det().is_positive() {
                return Err(KernelError::Internal(
                    "gram matrix is not positive definite".into(),
                ));
            }
        }
        let norm_mat = RatMat::from_i64(&gram_normalized);
        let gram_norm_inv = norm_mat
            .inverse()
            .ok_or_else(|| KernelError::Internal("normalized gram not invertible".into()))?;
        Ok(Lattice {
            name: name.to_string(),
            rank,
            gram_standard,
            gram_normalized,
            scale,
            gram_norm_inv,
        })
    }

    pub fn pairing(&self, u: &LatticeVector, v: &LatticeVector, form: BilinearForm) -> Rat {
        assert_eq!(u.coords.len(), self.rank);
        assert_eq!(v.coords.len(), self.rank);
        let mut acc = Rat::zero();
        for i in 0..self.rank {
            for j in 0..self.rank {
                let g = match form {
                    BilinearForm::Standard => self.gram_standard.get(i, j).clone(),
                    BilinearForm::Normalized => rat_i(self.gram_normalized[i][j]),
                };
                acc += &u.coords[i] * &v.coords[j] * g;
            }
        }
        acc
    }

    /// `<l, l>` for the dual vector determined by a d-vector in half-units.
    pub fn norm_of_d2(&self, d2: &[i64]) -> Rat {
        let d: Vec<Rat> = d2.iter().map(|&x| Rat::new(x.into(), 2.into())).collect();
        let c = self.gram_norm_inv.mul_vec(&d);
        crate::matrix::dot(&d, &c)
    }

    /// `2r/(r,r)` under the standard form.
    pub fn coroot(&self, r: &LatticeVector) -> Result<LatticeVector, KernelError> {
        let n = self.pairing(r, r, BilinearForm::Standard);
        if n.is_zero() {
            return Err(KernelError::ZeroVector);
        }
        let f = rat_i(2) / n;
        Ok(LatticeVector {
            coords: r.coords.iter().map(|c| c * &f).collect(),
        })
    }

    /// Reflection in `r` as a matrix on basis coordinates:
    /// `v -> v - (2<r,v>/<r,r>) r`. Scale-independent.
    pub fn reflection(&self, r: &LatticeVector) -> Result<RatMat, KernelError> {
        let rr = self.pairing(r, r, BilinearForm::Standard);
        if rr.is_zero() {
            return Err(KernelError::ZeroVector);
        }
        let n = self.rank;
        let mut m = RatMat::identity(n);
        for j in 0..n {
            let e_j = LatticeVector::unit(n, j);
            let f = rat_i(2) * self.pairing(r, &e_j, BilinearForm::Standard) / &rr;
            for i in 0..n {
                let v = m.get(i, j) - &f * &r.coords[i];
                m.set(i, j, v);
            }
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LatticeVector {
    pub coords: Vec<Rat>,
}

impl LatticeVector {
    pub fn new(coords: Vec<Rat>) -> Self {
        LatticeVector { coords }
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        LatticeVector {
            coords: coords.iter().map(|&c| rat_i(c)).collect(),
        }
    }

    pub fn zero(rank: usize) -> Self {
        LatticeVector {
            coords: vec![Rat::zero(); rank],
        }
    }

    pub fn unit(rank: usize, j: usize) -> Self {
        let mut v = LatticeVector::zero(rank);
        v.coords[j] = rat_i(1);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }
}

/// Orbit of `v` under the group generated by `generators` (matrices on basis
/// coordinates). Breadth-first closure; the caller is responsible for only
/// asking for orbits of tractable size (roots, weights of small systems).
pub fn weyl_orbit(generators: &[RatMat], v: &LatticeVector) -> BTreeSet<LatticeVector> {
    let mut seen: BTreeSet<LatticeVector> = BTreeSet::new();
    let mut frontier = vec![v.clone()];
    seen.insert(v.clone());
    while let Some(w) = frontier.pop() {
        for g in generators {
            let img = LatticeVector::new(g.mul_vec(&w.coords));
            if seen.insert(img.clone()) {
                frontier.push(img);
            }
        }
    }
    seen
}

/// All integer vectors `c` with `c^T A c + b . c + c0 < bound`, for positive
/// definite rational `A`. Exact Fincke-Pohst style recursion on an LDL^T
/// decomposition; integer ranges are found by outward scanning from the
/// center, so no square roots are ever taken.
pub fn integer_points_below(
    a: &RatMat,
    b: &[Rat],
    c0: &Rat,
    bound: &Rat,
) -> Result<Vec<Vec<i64>>, KernelError> {
    let n = a.nrows;
    assert_eq!(a.ncols, n);
    assert_eq!(b.len(), n);
    // Shift to center: Q(c) = (c+s)^T A (c+s) + c0 - s^T A s, s = A^{-1} b / 2.
    let inv = a
        .inverse()
        .ok_or_else(|| KernelError::Internal("quadratic form is singular".into()))?;
    let half_b: Vec<Rat> = b.iter().map(|x| x / rat_i(2)).collect();
    let s = inv.mul_vec(&half_b);
    let s_as = crate::matrix::dot(&s, &a.mul_vec(&s));
    let radius = bound - c0 + &s_as;
    if !radius.is_positive() {
        return Ok(vec![]);
    }

    // LDL^T with unit upper triangular U: Q'(y) = sum_i d_i (y_i + sum_{j>i} u_ij y_j)^2.
    let mut d = vec![Rat::zero(); n];
    let mut u = RatMat::identity(n);
    for i in 0..n {
        let mut di = a.get(i, i).clone();
        for k in 0..i {
            di -= &d[k] * u.get(k, i) * u.get(k, i);
        }
        if !di.is_positive() {
            return Err(KernelError::Internal(
                "quadratic form is not positive definite".into(),
            ));
        }
        for j in i + 1..n {
            let mut v = a.get(i, j).clone();
            for k in 0..i {
                v -= &d[k] * u.get(k, i) * u.get(k, j);
            }
            v = v / &di;
            u.set(i, j, v);
        }
        d[i] = di;
    }

    let mut out = Vec::new();
    let mut y = vec![Rat::zero(); n]; // y_i = c_i + s_i, fixed from i = n-1 down
    let mut c = vec![0i64; n];
    rec_enum(n, &d, &u, &s, &radius, n, &mut y, &mut c, &mut out);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn rec_enum(
    n: usize,
    d: &[Rat],
    u: &RatMat,
    s: &[Rat],
    rem: &Rat,
    level: usize, // coordinates level..n-1 are fixed
    y: &mut Vec<Rat>,
    c: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
) {
    if level == 0 {
        out.push(c.clone());
        return;
    }
    let i = level - 1;
    // term_i = d_i (y_i + sum_{j>i} u_ij y_j)^2 with y_i = c_i + s_i.
    let mut tail = Rat::zero();
    for j in i + 1..n {
        tail += u.get(i, j) * &y[j];
    }
    let center = -(&s[i] + &tail); // term vanishes at c_i = center
                                   // Scan outward from floor(center); the term is monotone on each side of
                                   // the center, so the first failure ends the scan.
    let start = center.floor().to_integer();
    for dir in [1i64, -1] {
        let mut k = if dir == 1 { &start + 1 } else { start.clone() };
        loop {
            let kq = Rat::from_integer(k.clone());
            let expr = &kq + &s[i] + &tail;
            let term = &d[i] * &expr * &expr;
            if &term >= rem {
                break;
            }
            c[i] = i64::try_from(&k).expect("enumeration coordinate exceeds i64");
            y[i] = &kq + &s[i];
            let next_rem = rem - &term;
            rec_enum(n, d, u, s, &next_rem, i, y, c, out);
            k += dir;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn a1() -> Lattice {
        Lattice::from_standard_gram("A1", RatMat::from_i64(&[vec![2]])).unwrap()
    }

    fn b2_lattice() -> Lattice {
        // Z^2 with the identity standard form; odd diagonal forces scale 2.
        Lattice::from_standard_gram("2A1", RatMat::identity(2).clone()).unwrap()
    }

    #[test]
    fn a1_self_pairing() {
        let l = a1();
        let alpha = LatticeVector::from_i64(&[1]);
        assert_eq!(l.scale, 1);
        assert_eq!(
            l.pairing(&alpha, &alpha, BilinearForm::Normalized),
            rat_i(2)
        );
        let zero = LatticeVector::zero(1);
        assert_eq!(l.pairing(&alpha, &zero, BilinearForm::Normalized), rat_i(0));
    }

    #[test]
    fn odd_standard_form_gets_rescaled() {
        let l = b2_lattice();
        assert_eq!(l.scale, 2);
        let e1 = LatticeVector::unit(2, 0);
        assert_eq!(l.pairing(&e1, &e1, BilinearForm::Standard), rat_i(1));
        assert_eq!(l.pairing(&e1, &e1, BilinearForm::Normalized), rat_i(2));
    }

    #[test]
    fn coroot_of_short_root_doubles() {
        let l = b2_lattice();
        let e1 = LatticeVector::unit(2, 0);
        let co = l.coroot(&e1).unwrap();
        assert_eq!(co.coords, vec![rat_i(2), rat_i(0)]);
        // A root of squared length 2 is its own coroot.
        let l = a1();
        let alpha = LatticeVector::from_i64(&[1]);
        assert_eq!(l.coroot(&alpha).unwrap(), alpha);
    }

    #[test]
    fn coroot_of_zero_rejected() {
        let l = a1();
        assert!(matches!(
            l.coroot(&LatticeVector::zero(1)),
            Err(KernelError::ZeroVector)
        ));
    }

    #[test]
    fn reflection_is_an_involution_with_det_minus_one() {
        let l = b2_lattice();
        let r = LatticeVector::from_i64(&[1, -1]);
        let m = l.reflection(&r).unwrap();
        assert_eq!(m.det(), rat_i(-1));
        assert_eq!(m.mul(&m), RatMat::identity(2));
        // sends r to -r
        let img = m.mul_vec(&r.coords);
        assert_eq!(img, vec![rat_i(-1), rat_i(1)]);
        // fixes the orthogonal complement
        let perp = LatticeVector::from_i64(&[1, 1]);
        assert_eq!(m.mul_vec(&perp.coords), perp.coords);
    }

    #[test]
    fn orbit_of_zero_is_trivial_and_a1_orbit_is_pm() {
        let l = a1();
        let alpha = LatticeVector::from_i64(&[1]);
        let gens = vec![l.reflection(&alpha).unwrap()];
        let orb = weyl_orbit(&gens, &LatticeVector::zero(1));
        assert_eq!(orb.len(), 1);
        let orb = weyl_orbit(&gens, &alpha);
        assert_eq!(orb.len(), 2);
    }

    #[test]
    fn integer_point_enumeration_counts_a1_shells() {
        // Q(c) = 2c^2 < 9  =>  c in {-2,...,2}
        let a = RatMat::from_i64(&[vec![2]]);
        let pts = integer_points_below(&a, &[rat_i(0)], &rat_i(0), &rat_i(9)).unwrap();
        assert_eq!(pts.len(), 5);
        // Shifted: 2c^2 + 2c < 4 => c in {-1, 0} wait: c=-1: 0 < 4 yes; c=0: 0 yes; c=1: 4 not < 4.
        let pts = integer_points_below(&a, &[rat_i(2)], &rat_i(0), &rat_i(4)).unwrap();
        let mut got: Vec<i64> = pts.into_iter().map(|p| p[0]).collect();
        got.sort_unstable();
        assert_eq!(got, vec![-1, 0]);
        // Rational center via odd linear term: 2c^2 + c < 9/2 => c in {-1, 0, 1}.
        let pts = integer_points_below(&a, &[rat(1, 1)], &rat_i(0), &rat(9, 2)).unwrap();
        let mut got: Vec<i64> = pts.into_iter().map(|p| p[0]).collect();
        got.sort_unstable();
        assert_eq!(got, vec![-1, 0, 1]);
    }
}
