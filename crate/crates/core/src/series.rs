//! Sparse Fourier expansions in `q` and a vector of elliptic variables.
//!
//! A term is indexed by `(n24, d2)`: `n24` is the q-exponent in 1/24 units
//! and `d2` the vector of z-exponents in half units, so `d2 = [3, -1]` means
//! `zeta_1^{3/2} zeta_2^{-1/2}`. Coefficients are exact rationals. A series
//! carries its truncation: q-orders with `n24 >= trunc24` are unknown, not
//! zero. z-exponents are never truncated.

use crate::error::KernelError;
use crate::lattice::Lattice;
use crate::qseries::QSeries;
use crate::rat::{rat, Rat};
use num_traits::Zero;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Laurent polynomial in the elliptic variables: exponent vector (half
/// units) to coefficient. Zero coefficients are never stored.
pub type ZPoly = BTreeMap<Vec<i64>, Rat>;

pub(crate) fn zpoly_add_into(dst: &mut ZPoly, src: &ZPoly) {
    for (k, v) in src {
        match dst.entry(k.clone()) {
            Entry::Vacant(e) => {
                e.insert(v.clone());
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += v;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }
}

pub(crate) fn zpoly_sub_into(dst: &mut ZPoly, src: &ZPoly) {
    for (k, v) in src {
        match dst.entry(k.clone()) {
            Entry::Vacant(e) => {
                e.insert(-v.clone());
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() -= v;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }
}

pub(crate) fn zpoly_mul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let mut out = ZPoly::new();
    for (ka, va) in a {
        for (kb, vb) in b {
            let k: Vec<i64> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
            let c = va * vb;
            match out.entry(k) {
                Entry::Vacant(e) => {
                    e.insert(c);
                }
                Entry::Occupied(mut e) => {
                    *e.get_mut() += c;
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
            }
        }
    }
    out
}

fn comp_min(p: &ZPoly) -> Vec<i64> {
    let mut it = p.keys();
    let first = it.next().expect("comp_min of empty poly").clone();
    it.fold(first, |acc, k| {
        acc.iter().zip(k).map(|(a, b)| (*a).min(*b)).collect()
    })
}

/// Graded-lex key: total degree first, then the exponent vector itself.
/// `BTreeMap::last_key_value` is then the division leader.
type Glex = (i64, Vec<i64>);

fn glex_shift(p: &ZPoly, s: &[i64]) -> BTreeMap<Glex, Rat> {
    p.iter()
        .map(|(k, v)| {
            let e: Vec<i64> = k.iter().zip(s).map(|(a, b)| a - b).collect();
            ((e.iter().sum(), e), v.clone())
        })
        .collect()
}

/// Exact division of Laurent polynomials, failing fast if `den` does not
/// divide `num`. Both are shifted by their componentwise minimum exponents
/// first; after the shift each variable appears with exponent zero in some
/// term of the divisor, which makes single-divisor leading-term division a
/// complete exactness test. `n24` only labels the error.
pub(crate) fn zpoly_divide(num: &ZPoly, den: &ZPoly, n24: i64) -> Result<ZPoly, KernelError> {
    if num.is_empty() {
        return Ok(ZPoly::new());
    }
    if den.is_empty() {
        return Err(KernelError::NotDivisible { n24 });
    }
    let a = comp_min(num);
    let b = comp_min(den);
    let mut r = glex_shift(num, &a);
    let d = glex_shift(den, &b);
    let (dk, dc) = {
        let (k, c) = d.last_key_value().expect("nonempty divisor");
        (k.clone(), c.clone())
    };
    let mut quo = ZPoly::new();
    while let Some((rk0, rc0)) = r.last_key_value() {
        let rk = rk0.clone();
        let rc = rc0.clone();
        if !rk.1.iter().zip(&dk.1).all(|(x, y)| x >= y) {
            return Err(KernelError::NotDivisible { n24 });
        }
        let qe: Vec<i64> = rk.1.iter().zip(&dk.1).map(|(x, y)| x - y).collect();
        let qdeg = rk.0 - dk.0;
        let qc = &rc / &dc;
        for (k, c) in &d {
            let e: Vec<i64> = k.1.iter().zip(&qe).map(|(x, y)| x + y).collect();
            let key = (k.0 + qdeg, e);
            let sub = &qc * c;
            match r.entry(key) {
                Entry::Vacant(en) => {
                    en.insert(-sub);
                }
                Entry::Occupied(mut en) => {
                    *en.get_mut() -= sub;
                    if en.get().is_zero() {
                        en.remove();
                    }
                }
            }
        }
        let fe: Vec<i64> = qe
            .iter()
            .zip(&a)
            .zip(&b)
            .map(|((q, aa), bb)| q + aa - bb)
            .collect();
        quo.insert(fe, qc);
    }
    Ok(quo)
}

/// Fourier expansion over a fixed lattice.
#[derive(Clone, Debug)]
pub struct QZSeries {
    pub lat: Arc<Lattice>,
    terms: BTreeMap<i64, ZPoly>,
    pub trunc24: i64,
}

impl PartialEq for QZSeries {
    fn eq(&self, other: &Self) -> bool {
        *self.lat == *other.lat && self.trunc24 == other.trunc24 && self.terms == other.terms
    }
}

impl QZSeries {
    pub fn zero(lat: Arc<Lattice>, trunc24: i64) -> Self {
        QZSeries {
            lat,
            terms: BTreeMap::new(),
            trunc24,
        }
    }

    pub fn constant(lat: Arc<Lattice>, c: Rat, trunc24: i64) -> Self {
        let rank = lat.rank;
        Self::monomial(lat, 0, vec![0; rank], c, trunc24)
    }

    pub fn monomial(lat: Arc<Lattice>, n24: i64, d2: Vec<i64>, c: Rat, trunc24: i64) -> Self {
        assert_eq!(d2.len(), lat.rank, "exponent vector length");
        let mut s = Self::zero(lat, trunc24);
        s.set_coeff(n24, d2, c);
        s
    }

    pub fn from_qseries(lat: Arc<Lattice>, qs: &QSeries) -> Self {
        let rank = lat.rank;
        let mut s = Self::zero(lat, qs.trunc24);
        for (n24, c) in qs.iter() {
            s.set_coeff(*n24, vec![0; rank], c.clone());
        }
        s
    }

    pub fn set_coeff(&mut self, n24: i64, d2: Vec<i64>, c: Rat) {
        if n24 >= self.trunc24 {
            return;
        }
        let poly = self.terms.entry(n24).or_default();
        if c.is_zero() {
            poly.remove(&d2);
        } else {
            poly.insert(d2, c);
        }
        if poly.is_empty() {
            self.terms.remove(&n24);
        }
    }

    pub fn coefficient(&self, n24: i64, d2: &[i64]) -> Rat {
        self.terms
            .get(&n24)
            .and_then(|p| p.get(d2))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn q_term(&self, n24: i64) -> Option<&ZPoly> {
        self.terms.get(&n24)
    }

    pub fn orders(&self) -> impl Iterator<Item = (&i64, &ZPoly)> {
        self.terms.iter()
    }

    pub fn min_order(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.values().map(|p| p.len()).sum()
    }

    pub fn is_z_independent(&self) -> bool {
        self.terms
            .values()
            .all(|p| p.keys().all(|k| k.iter().all(|x| *x == 0)))
    }

    /// Collapse to a pure q-series; requires `is_z_independent`.
    pub fn as_qseries(&self) -> Result<QSeries, KernelError> {
        let mut out = QSeries::zero(self.trunc24);
        for (n24, p) in &self.terms {
            for (k, v) in p {
                if k.iter().any(|x| *x != 0) {
                    return Err(KernelError::Internal(format!(
                        "as_qseries on a z-dependent series (q-order {n24}/24)"
                    )));
                }
                out.set_coeff(*n24, v.clone());
            }
        }
        Ok(out)
    }

    pub fn truncate_to(&self, trunc24: i64) -> QZSeries {
        let t = trunc24.min(self.trunc24);
        QZSeries {
            lat: self.lat.clone(),
            terms: self
                .terms
                .range(..t)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
            trunc24: t,
        }
    }

    /// Equality on the common known range.
    pub fn agrees_with(&self, other: &QZSeries) -> bool {
        let t = self.trunc24.min(other.trunc24);
        self.truncate_to(t) == other.truncate_to(t)
    }

    pub fn add(&self, other: &QZSeries) -> QZSeries {
        assert_eq!(*self.lat, *other.lat, "lattice mismatch in add");
        let t = self.trunc24.min(other.trunc24);
        let mut out = self.truncate_to(t);
        for (n24, p) in other.terms.range(..t) {
            let dst = out.terms.entry(*n24).or_default();
            zpoly_add_into(dst, p);
            if dst.is_empty() {
                out.terms.remove(n24);
            }
        }
        out
    }

    pub fn sub(&self, other: &QZSeries) -> QZSeries {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> QZSeries {
        self.scale(&rat(-1, 1))
    }

    pub fn scale(&self, f: &Rat) -> QZSeries {
        if f.is_zero() {
            return QZSeries::zero(self.lat.clone(), self.trunc24);
        }
        QZSeries {
            lat: self.lat.clone(),
            terms: self
                .terms
                .iter()
                .map(|(n, p)| (*n, p.iter().map(|(k, v)| (k.clone(), v * f)).collect()))
                .collect(),
            trunc24: self.trunc24,
        }
    }

    fn mul_impl(&self, other: &QZSeries, cap: Option<usize>) -> Result<QZSeries, KernelError> {
        assert_eq!(*self.lat, *other.lat, "lattice mismatch in mul");
        let vf = self.min_order().unwrap_or(0);
        let vg = other.min_order().unwrap_or(0);
        let t = (self.trunc24 + vg).min(other.trunc24 + vf);
        let mut out = QZSeries::zero(self.lat.clone(), t);
        for (n1, p1) in &self.terms {
            if n1 + vg >= t {
                break;
            }
            for (n2, p2) in other.terms.range(..t - n1) {
                let prod = zpoly_mul(p1, p2);
                let n = n1 + n2;
                let dst = out.terms.entry(n).or_default();
                zpoly_add_into(dst, &prod);
                if dst.is_empty() {
                    out.terms.remove(&n);
                }
            }
            if let Some(cap) = cap {
                let c = out.term_count();
                if c > cap {
                    return Err(KernelError::CapExceeded(format!(
                        "product holds {c} terms, cap is {cap}"
                    )));
                }
            }
        }
        Ok(out)
    }

    /// Product; the truncation is `min(t_f + v_g, t_g + v_f)`.
    pub fn mul(&self, other: &QZSeries) -> QZSeries {
        self.mul_impl(other, None).expect("uncapped mul")
    }

    pub fn mul_capped(&self, other: &QZSeries, cap: usize) -> Result<QZSeries, KernelError> {
        self.mul_impl(other, Some(cap))
    }

    pub fn mul_qseries(&self, qs: &QSeries) -> QZSeries {
        let vf = self.min_order().unwrap_or(0);
        let vg = qs.valuation().unwrap_or(0);
        let t = (self.trunc24 + vg).min(qs.trunc24 + vf);
        let mut out = QZSeries::zero(self.lat.clone(), t);
        for (n1, p1) in &self.terms {
            if n1 + vg >= t {
                break;
            }
            for (n2, c) in qs.iter() {
                let n = n1 + n2;
                if n >= t {
                    break;
                }
                let scaled: ZPoly = p1.iter().map(|(k, v)| (k.clone(), v * c)).collect();
                let dst = out.terms.entry(n).or_default();
                zpoly_add_into(dst, &scaled);
                if dst.is_empty() {
                    out.terms.remove(&n);
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> QZSeries {
        if e == 0 {
            return QZSeries::constant(self.lat.clone(), rat(1, 1), self.trunc24);
        }
        let mut acc: Option<QZSeries> = None;
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc.unwrap()
    }

    /// Normalized derivative in the i-th elliptic variable: the term with
    /// z-exponent vector `d2` is scaled by `d2[i]/2`.
    pub fn dz(&self, i: usize) -> QZSeries {
        assert!(i < self.lat.rank, "derivative index in range");
        let mut out = QZSeries::zero(self.lat.clone(), self.trunc24);
        for (n24, p) in &self.terms {
            let mut dst = ZPoly::new();
            for (k, v) in p {
                if k[i] != 0 {
                    dst.insert(k.clone(), v * rat(k[i], 2));
                }
            }
            if !dst.is_empty() {
                out.terms.insert(*n24, dst);
            }
        }
        out
    }

    /// Substitute the elliptic variables by an integral linear action on the
    /// exponent vectors: `d2 -> A d2`.
    pub fn apply_d_matrix(&self, a: &[Vec<i64>]) -> QZSeries {
        let rank = self.lat.rank;
        assert_eq!(a.len(), rank);
        let mut out = QZSeries::zero(self.lat.clone(), self.trunc24);
        for (n24, p) in &self.terms {
            let dst = out.terms.entry(*n24).or_default();
            for (k, v) in p {
                let nk: Vec<i64> = a
                    .iter()
                    .map(|row| row.iter().zip(k).map(|(x, y)| x * y).sum())
                    .collect();
                match dst.entry(nk) {
                    Entry::Vacant(e) => {
                        e.insert(v.clone());
                    }
                    Entry::Occupied(mut e) => {
                        *e.get_mut() += v;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                }
            }
            if dst.is_empty() {
                out.terms.remove(n24);
            }
        }
        out
    }

    /// Exact quotient `self / g`, order by order in q. The quotient is known
    /// to `min(t_f, t_g) - ord(g)`. Fails with the first q-order at which the
    /// coefficient polynomial of `self` is not divisible.
    pub fn exact_divide(&self, g: &QZSeries) -> Result<QZSeries, KernelError> {
        if *self.lat != *g.lat {
            return Err(KernelError::LatticeMismatch(
                "quotient of series on different lattices".into(),
            ));
        }
        let vg = match g.min_order() {
            Some(v) => v,
            None => return Err(KernelError::NotDivisible { n24: 0 }),
        };
        let glead = g.terms.get(&vg).expect("divisor leading poly").clone();
        let t_out = self.trunc24.min(g.trunc24) - vg;
        let mut h = QZSeries::zero(self.lat.clone(), t_out);
        let vf = match self.min_order() {
            Some(v) => v,
            None => return Ok(h),
        };
        let start = vf - vg;
        for m in start..t_out {
            let mut num = self.terms.get(&(m + vg)).cloned().unwrap_or_default();
            for (j, hj) in h.terms.range(start..m) {
                if let Some(gj) = g.terms.get(&(m + vg - j)) {
                    let prod = zpoly_mul(hj, gj);
                    zpoly_sub_into(&mut num, &prod);
                }
            }
            if num.is_empty() {
                continue;
            }
            let q = zpoly_divide(&num, &glead, m + vg)?;
            if !q.is_empty() {
                h.terms.insert(m, q);
            }
        }
        Ok(h)
    }

    /// All stored terms, outermost q-order first, exponent vectors in lex
    /// order inside each q-order. The iteration order is the file format.
    pub fn iter_terms(&self) -> impl Iterator<Item = (i64, &Vec<i64>, &Rat)> {
        self.terms
            .iter()
            .flat_map(|(n, p)| p.iter().map(move |(k, v)| (*n, k, v)))
    }
}
