//! Truncated q-expansions with exact rational coefficients. Exponents are
//! kept in 1/24 units (`n24`), so `eta = q^{1/24} * (1 - q - q^2 + ...)` has
//! integer keys. A series knows its truncation: coefficients with
//! `n24 >= trunc24` are unknown, not zero.

use crate::error::KernelError;
use crate::rat::{rat_i, Rat};
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    terms: BTreeMap<i64, Rat>,
    pub trunc24: i64,
}

impl QSeries {
    pub fn zero(trunc24: i64) -> Self {
        QSeries {
            terms: BTreeMap::new(),
            trunc24,
        }
    }

    pub fn one(trunc24: i64) -> Self {
        QSeries::monomial(0, rat_i(1), trunc24)
    }

    pub fn monomial(n24: i64, c: Rat, trunc24: i64) -> Self {
        let mut s = QSeries::zero(trunc24);
        if !c.is_zero() && n24 < trunc24 {
            s.terms.insert(n24, c);
        }
        s
    }

    pub fn coeff(&self, n24: i64) -> Rat {
        self.terms.get(&n24).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn set_coeff(&mut self, n24: i64, c: Rat) {
        if c.is_zero() {
            self.terms.remove(&n24);
        } else if n24 < self.trunc24 {
            self.terms.insert(n24, c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &Rat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn truncate(&self, trunc24: i64) -> QSeries {
        let t = trunc24.min(self.trunc24);
        QSeries {
            terms: self
                .terms
                .range(..t)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
            trunc24: t,
        }
    }

    /// Shift exponents by `s` (in 1/24 units); the truncation shifts with it.
    pub fn shift(&self, s: i64) -> QSeries {
        QSeries {
            terms: self.terms.iter().map(|(k, v)| (k + s, v.clone())).collect(),
            trunc24: self.trunc24 + s,
        }
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let t = self.trunc24.min(other.trunc24);
        let mut out = self.truncate(t);
        for (k, v) in other.terms.range(..t) {
            let c = out.coeff(*k) + v;
            out.set_coeff(*k, c);
        }
        out
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.add(&other.scale(&rat_i(-1)))
    }

    pub fn scale(&self, f: &Rat) -> QSeries {
        if f.is_zero() {
            return QSeries::zero(self.trunc24);
        }
        QSeries {
            terms: self.terms.iter().map(|(k, v)| (*k, v * f)).collect(),
            trunc24: self.trunc24,
        }
    }

    /// Truncation of a product: `min(t_f + v_g, t_g + v_f)` where `v` is the
    /// valuation (0 for a zero factor), never above `min(t_f, t_g)` + shifts.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let vf = self.valuation().unwrap_or(0);
        let vg = other.valuation().unwrap_or(0);
        let t = (self.trunc24 + vg).min(other.trunc24 + vf);
        let mut out = QSeries::zero(t);
        for (ka, va) in &self.terms {
            if *ka + vg >= t {
                break;
            }
            for (kb, vb) in other.terms.range(..t - *ka) {
                let k = ka + kb;
                let c = out.coeff(k) + va * vb;
                out.set_coeff(k, c);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> QSeries {
        if e == 0 {
            return QSeries::one(self.trunc24);
        }
        // square-and-multiply; truncation bookkeeping rides on mul
        let mut acc: Option<QSeries> = None;
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

    /// Multiplicative inverse. The leading term `c q^{v}` must be nonzero;
    /// the inverse is known to `trunc24 - 2v`.
    pub fn invert(&self) -> Result<QSeries, KernelError> {
        let v = self
            .valuation()
            .ok_or_else(|| KernelError::NotDivisible { n24: 0 })?;
        let c = self.coeff(v);
        let t_out = self.trunc24 - 2 * v;
        // u = f * q^{-v} / c - 1 has positive valuation; invert 1 + u order
        // by order: h_0 = 1, h_m = -sum_{0<k<=m} u_k h_{m-k}.
        let mut u = self.shift(-v).scale(&(rat_i(1) / &c));
        u.set_coeff(0, Rat::zero());
        let umap: Vec<(i64, Rat)> = u.terms.iter().map(|(k, v)| (*k, v.clone())).collect();
        let mut inv = QSeries::zero(t_out + v);
        inv.set_coeff(0, rat_i(1));
        for m in 1..(t_out + v).max(0) {
            let mut acc = Rat::zero();
            for (k, uc) in &umap {
                if *k > m {
                    break;
                }
                let prev = inv.coeff(m - k);
                if !prev.is_zero() {
                    acc += uc * &prev;
                }
            }
            if !acc.is_zero() {
                inv.set_coeff(m, -acc);
            }
        }
        Ok(inv.shift(-v).scale(&(rat_i(1) / &c)))
    }
}

/// Euler product `prod_{n>=1} (1 - q^n)`, exponents in 1/24 units.
pub fn euler_product(trunc24: i64) -> QSeries {
    let mut acc = QSeries::one(trunc24);
    let mut n = 1i64;
    while 24 * n < trunc24 {
        let factor = {
            let mut f = QSeries::one(trunc24);
            f.set_coeff(24 * n, rat_i(-1));
            f
        };
        acc = acc.mul(&factor);
        n += 1;
    }
    acc
}

/// Dedekind eta `q^{1/24} prod (1 - q^n)`.
pub fn eta(trunc24: i64) -> QSeries {
    euler_product(trunc24).shift(1).truncate(trunc24)
}

/// `eta^p` for any integer `p` (negative powers via series inversion).
pub fn eta_power(p: i64, trunc24: i64) -> QSeries {
    if p == 0 {
        return QSeries::one(trunc24);
    }
    // Build with headroom so the final shifted truncation reaches trunc24.
    let head = trunc24 + p.abs();
    let base = euler_product(head);
    let powed = if p > 0 {
        base.pow(p as u32)
    } else {
        base.invert()
            .expect("euler product is a unit")
            .pow((-p) as u32)
    };
    powed.shift(p).truncate(trunc24)
}

fn sigma(k: u32, n: i64) -> BigInt {
    let mut acc = BigInt::zero();
    for d in 1..=n {
        if n % d == 0 {
            acc += BigInt::from(d).pow(k);
        }
    }
    acc
}

/// A modular form for the full modular group as a pure q-series: exponents
/// are multiples of 24 in `n24` units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularForm {
    pub series: QSeries,
    pub weight: i64,
}

impl ModularForm {
    pub fn q_coeff(&self, n: i64) -> Rat {
        self.series.coeff(24 * n)
    }
}

/// Normalized Eisenstein series `E4` or `E6`.
pub fn eisenstein(k: u32, trunc24: i64) -> Result<ModularForm, KernelError> {
    let factor: i64 = match k {
        4 => 240,
        6 => -504,
        _ => {
            return Err(KernelError::UnsupportedConstruction(format!(
                "Eisenstein weight {k} (only 4 and 6 are provided)"
            )))
        }
    };
    let mut s = QSeries::zero(trunc24);
    s.set_coeff(0, rat_i(1));
    let mut n = 1i64;
    while 24 * n < trunc24 {
        let c = Rat::from_integer(BigInt::from(factor) * sigma(k - 1, n));
        s.set_coeff(24 * n, c);
        n += 1;
    }
    Ok(ModularForm {
        series: s,
        weight: k as i64,
    })
}

/// The discriminant `Delta = eta^24`.
pub fn delta(trunc24: i64) -> ModularForm {
    ModularForm {
        series: eta_power(24, trunc24),
        weight: 12,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    /// Euler's pentagonal-number series, the independent route to the
    /// product expansion.
    fn pentagonal(trunc24: i64) -> QSeries {
        let mut s = QSeries::zero(trunc24);
        let mut k = 0i64;
        loop {
            let done_pos = 24 * (k * (3 * k - 1) / 2) >= trunc24;
            let done_neg = 24 * (k * (3 * k + 1) / 2) >= trunc24;
            if k > 0 && done_pos && done_neg {
                break;
            }
            let sign = if k % 2 == 0 { 1 } else { -1 };
            for e in [k * (3 * k - 1) / 2, k * (3 * k + 1) / 2] {
                if 24 * e < trunc24 {
                    s.set_coeff(24 * e, rat_i(sign));
                }
            }
            k += 1;
        }
        s
    }

    #[test]
    fn euler_product_matches_pentagonal_series() {
        let t = 24 * 30;
        assert_eq!(euler_product(t), pentagonal(t));
    }

    #[test]
    fn eta_low_order_coefficients() {
        // q^{1/24} (1 - q - q^2 + q^5 + q^7 - ...)
        let e = eta(24 * 9);
        let expected: Vec<(i64, i64)> = vec![
            (0, 1),
            (1, -1),
            (2, -1),
            (3, 0),
            (4, 0),
            (5, 1),
            (6, 0),
            (7, 1),
            (8, 0),
        ];
        for (n, c) in expected {
            assert_eq!(e.coeff(1 + 24 * n), rat_i(c), "eta coefficient at q^{n}");
        }
    }

    #[test]
    fn eta_power_roundtrip_and_negative() {
        let t = 24 * 8;
        let e3 = eta_power(3, t);
        let em3 = eta_power(-3, t);
        let prod = e3.mul(&em3);
        assert_eq!(prod.coeff(0), rat_i(1));
        for (k, v) in prod.iter() {
            if *k != 0 {
                assert!(v.is_zero(), "eta^3 * eta^-3 has stray term at {k}");
            }
        }
    }

    #[test]
    fn invert_fractional_leading_coefficient() {
        // f = 2 q^{1/8} (1 + q): n24 = 3.
        let mut f = QSeries::zero(24 * 4 + 3);
        f.set_coeff(3, rat_i(2));
        f.set_coeff(27, rat_i(2));
        let inv = f.invert().unwrap();
        let prod = f.mul(&inv);
        assert_eq!(prod.coeff(0), rat_i(1));
        assert_eq!(inv.coeff(-3), rat(1, 2));
    }

    #[test]
    fn eisenstein_frozen_coefficients() {
        let e4 = eisenstein(4, 24 * 6).unwrap();
        for (n, c) in [
            (0, 1i64),
            (1, 240),
            (2, 2160),
            (3, 6720),
            (4, 17520),
            (5, 30240),
        ] {
            assert_eq!(e4.q_coeff(n), rat_i(c), "E4 q^{n}");
        }
        let e6 = eisenstein(6, 24 * 5).unwrap();
        for (n, c) in [
            (0, 1i64),
            (1, -504),
            (2, -16632),
            (3, -122976),
            (4, -532728),
        ] {
            assert_eq!(e6.q_coeff(n), rat_i(c), "E6 q^{n}");
        }
        assert!(eisenstein(8, 24).is_err());
    }

    #[test]
    fn delta_is_the_discriminant() {
        let t = 24 * 8;
        let d = delta(t);
        for (n, c) in [
            (1, 1i64),
            (2, -24),
            (3, 252),
            (4, -1472),
            (5, 4830),
            (6, -6048),
            (7, -16744),
        ] {
            assert_eq!(d.q_coeff(n), rat_i(c), "Delta q^{n}");
        }
        // E4^3 - E6^2 = 1728 Delta
        let e4 = eisenstein(4, t).unwrap().series;
        let e6 = eisenstein(6, t).unwrap().series;
        let lhs = e4.pow(3).sub(&e6.pow(2));
        let rhs = d.series.scale(&rat_i(1728));
        assert_eq!(lhs.truncate(t), rhs.truncate(lhs.trunc24));
    }
}
