//! The Jacobian of a tuple of Jacobi forms on a rank-l lattice: the
//! determinant whose first row holds each form scaled by its index and
//! whose remaining rows hold the l normalized z-derivatives.
//!
//! For a tuple of l+1 forms this is a single determinant; for l+2 forms
//! the family of cofactor Jacobians (each omitting one form) is assembled
//! from one shared table of minors of the derivative block, so common
//! subdeterminants are computed once.

use crate::error::KernelError;
use crate::jacobi::{Character, JacobiForm};
use crate::lattice::Lattice;
use crate::rat::rat_i;
use crate::series::QZSeries;
use std::sync::Arc;

fn tuple_checks(
    forms: &[JacobiForm],
    extra: usize,
) -> Result<(usize, Arc<Lattice>, i64), KernelError> {
    let first = forms
        .first()
        .ok_or_else(|| KernelError::DimensionMismatch("empty tuple of forms".into()))?;
    let l = first.series.lat.rank;
    if forms.len() != l + extra {
        return Err(KernelError::DimensionMismatch(format!(
            "rank {l} needs {} forms, got {}",
            l + extra,
            forms.len()
        )));
    }
    for f in forms {
        if *f.series.lat != *first.series.lat || f.group != first.group {
            return Err(KernelError::LatticeMismatch(
                "forms in a tuple must share lattice and group".into(),
            ));
        }
    }
    let trunc = forms
        .iter()
        .map(|f| f.series.trunc24)
        .min()
        .expect("nonempty");
    Ok((l, first.series.lat.clone(), trunc))
}

/// Minors of the derivative block `d` (l rows, `ncols` columns): for every
/// column subset of size k <= `max_size`, the determinant over the first k
/// rows. Indexed by column bitmask; built bottom-up by expansion along the
/// last row, so every subdeterminant is computed exactly once.
fn minor_table(
    d: &[Vec<QZSeries>],
    ncols: usize,
    max_size: usize,
    lat: &Arc<Lattice>,
    trunc24: i64,
) -> Vec<Option<QZSeries>> {
    let full = 1usize << ncols;
    let mut table: Vec<Option<QZSeries>> = vec![None; full];
    table[0] = Some(QZSeries::constant(lat.clone(), rat_i(1), trunc24));
    for mask in 1..full {
        let k = mask.count_ones() as usize;
        if k > max_size {
            continue;
        }
        let cols: Vec<usize> = (0..ncols).filter(|c| mask >> c & 1 == 1).collect();
        let mut acc = QZSeries::zero(lat.clone(), trunc24);
        for (p0, &c) in cols.iter().enumerate() {
            let sub = table[mask ^ (1 << c)]
                .as_ref()
                .expect("smaller minors are built first");
            let term = d[k - 1][c].mul(sub);
            // cofactor sign of entry (k, p0+1) in a k x k determinant
            acc = if (k + p0 + 1) % 2 == 0 {
                acc.add(&term)
            } else {
                acc.sub(&term)
            };
        }
        table[mask] = Some(acc);
    }
    table
}

fn derivative_block(forms: &[JacobiForm], l: usize) -> Vec<Vec<QZSeries>> {
    (0..l)
        .map(|i| forms.iter().map(|f| f.series.dz(i)).collect())
        .collect()
}

/// The Jacobian of exactly rank+1 forms. Weight is `rank + sum of
/// weights`, index is the sum of indices, and the character is the product
/// of the characters twisted by the determinant.
pub fn jacobian(forms: &[JacobiForm]) -> Result<JacobiForm, KernelError> {
    let (l, lat, trunc) = tuple_checks(forms, 1)?;
    let d = derivative_block(forms, l);
    let table = minor_table(&d, l + 1, l, &lat, trunc);
    let full = (1usize << (l + 1)) - 1;
    let mut acc = QZSeries::zero(lat.clone(), trunc);
    for (j, f) in forms.iter().enumerate() {
        let minor = table[full ^ (1 << j)].as_ref().expect("size-l minor");
        let term = f.series.scale(&rat_i(f.index)).mul(minor);
        acc = if j % 2 == 0 {
            acc.add(&term)
        } else {
            acc.sub(&term)
        };
    }
    finish(acc, forms, l, usize::MAX)
}

/// The rank+2 cofactor family: entry t (0-based) is the Jacobian of the
/// tuple with form t removed, in the induced column order.
pub fn cofactor_jacobians(forms: &[JacobiForm]) -> Result<Vec<JacobiForm>, KernelError> {
    let (l, lat, trunc) = tuple_checks(forms, 2)?;
    let n = l + 2;
    let d = derivative_block(forms, l);
    let table = minor_table(&d, n, l, &lat, trunc);
    let full = (1usize << n) - 1;
    (0..n)
        .map(|r| {
            let mut acc = QZSeries::zero(lat.clone(), trunc);
            for (j, f) in forms.iter().enumerate() {
                if j == r {
                    continue;
                }
                let p = if j < r { j + 1 } else { j };
                let minor = table[full ^ (1 << r) ^ (1 << j)]
                    .as_ref()
                    .expect("size-l minor");
                let term = f.series.scale(&rat_i(f.index)).mul(minor);
                acc = if p % 2 == 1 {
                    acc.add(&term)
                } else {
                    acc.sub(&term)
                };
            }
            finish(acc, forms, l, r)
        })
        .collect()
}

/// Wrap a Jacobian series with its bookkeeping, skipping form `skip` from
/// the sums (pass an out-of-range value to include all forms).
fn finish(
    series: QZSeries,
    forms: &[JacobiForm],
    l: usize,
    skip: usize,
) -> Result<JacobiForm, KernelError> {
    let picked = || forms.iter().enumerate().filter(|(j, _)| *j != skip);
    let weight = l as i64 + picked().map(|(_, f)| f.weight).sum::<i64>();
    let index = picked().map(|(_, f)| f.index).sum();
    let character = picked().fold(Character::Determinant, |c, (_, f)| c.mul(f.character));
    JacobiForm::new(series, weight, index, character, forms[0].group.clone())
}

/// Whether the Jacobian certifies algebraic independence of the tuple over
/// the modular forms of level one. A nonzero Jacobian is a proof; a zero
/// one at finite truncation distinguishes nothing, so it stays open.
#[derive(Clone, Debug)]
pub enum Independence {
    /// Nonzero Jacobian: the forms are independent, with the witness.
    Certified(JacobiForm),
    /// Jacobian vanishes to the computed order: dependent, or the
    /// truncation is too small to tell.
    Inconclusive(JacobiForm),
}

pub fn is_algebraically_independent(forms: &[JacobiForm]) -> Result<Independence, KernelError> {
    let j = jacobian(forms)?;
    if j.series.is_zero() {
        Ok(Independence::Inconclusive(j))
    } else {
        Ok(Independence::Certified(j))
    }
}
