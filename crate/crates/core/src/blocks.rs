//! Theta building blocks: the odd one-variable theta function pulled back
//! along coroots, the theta block of a root system, the classical rank-one
//! generator pair, and its symmetrizations over orthogonal axes.
//!
//! Theta factors are built from their sum expansions, so a factor costs
//! O(sqrt(order)) terms. Intermediate factors carry half-integral
//! z-exponents; only the assembled blocks are wrapped as Jacobi forms,
//! which re-validates integrality.

use crate::error::KernelError;
use crate::jacobi::{Character, JacobiForm};
use crate::lattice::Lattice;
use crate::qseries::{eta_power, QSeries};
use crate::rat::{rat_i, Rat};
use crate::rootsys::{catalog, RootSystemData, RootSystemTag};
use crate::series::QZSeries;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::sync::Arc;

/// The odd theta function evaluated at `(r, z)` for a fixed vector with
/// basis pairings `w`: the expansion `sum_k (-1)^k q^{(2k+1)^2/8}
/// zeta^{(2k+1) w / 2}`. The lowest term is `q^{3/24} (zeta^{w/2} -
/// zeta^{-w/2})`.
pub fn theta_pullback(lat: Arc<Lattice>, w: &[i64], trunc24: i64) -> QZSeries {
    let mut s = QZSeries::zero(lat, trunc24);
    let mut j = 1i64;
    while 3 * j * j < trunc24 {
        let sign = if (j / 2) % 2 == 0 { 1 } else { -1 };
        let plus: Vec<i64> = w.iter().map(|x| x * j).collect();
        let minus: Vec<i64> = w.iter().map(|x| -x * j).collect();
        s.set_coeff(3 * j * j, plus, rat_i(sign));
        s.set_coeff(3 * j * j, minus, rat_i(-sign));
        j += 2;
    }
    s
}

/// The odd theta function in one elliptic variable, over the rank-one root
/// lattice.
pub fn theta1d(trunc24: i64) -> Result<QZSeries, KernelError> {
    let data = catalog(RootSystemTag::A(1))?;
    Ok(theta_pullback(data.lattice, &[1], trunc24))
}

/// Theta block of a root system: the product of odd theta factors over the
/// positive coroots of the dual system, divided by eta^3 per factor. The
/// result is a weak Jacobi form of weight `-|R|/2` with the determinant
/// character; its index is the catalog's theta block index.
///
/// `max_terms` caps the term count of every intermediate product and turns
/// an overrun into a resource error instead of an unbounded computation.
pub fn phi_r(
    data: &RootSystemData,
    trunc24: i64,
    max_terms: Option<usize>,
) -> Result<JacobiForm, KernelError> {
    if trunc24 < 24 {
        return Err(KernelError::TruncationTooSmall(format!(
            "theta block needs trunc24 >= 24 to hold its q^0 term, got {trunc24}"
        )));
    }
    let lat = data.lattice.clone();
    let half = data.positive_dual_coroots.len() as i64;
    let mut acc: Option<QZSeries> = None;
    for coroot in &data.positive_dual_coroots {
        let w = data.dual_pairing_vector(coroot)?;
        let factor = theta_pullback(lat.clone(), &w, trunc24 + 3);
        acc = Some(match acc {
            None => factor,
            Some(p) => match max_terms {
                Some(cap) => p.mul_capped(&factor, cap)?,
                None => p.mul(&factor),
            },
        });
    }
    let prod = acc.ok_or_else(|| KernelError::Internal("empty root system".into()))?;
    let series = prod
        .mul_qseries(&eta_power(-3 * half, trunc24))
        .truncate_to(trunc24);
    if series.q_term(0).map_or(true, |t| t.is_empty()) {
        return Err(KernelError::Internal(
            "theta block lost its q^0 term".into(),
        ));
    }
    JacobiForm::new(
        series,
        data.phi_weight,
        data.phi_index,
        Character::Determinant,
        data.group.clone(),
    )
}

/// One even theta characteristic as (series in z, value at z = 0).
/// `half_char` selects summation over odd z-exponents, `alternating` the
/// sign `(-1)^n`.
fn theta_even(
    lat: &Arc<Lattice>,
    trunc24: i64,
    half_char: bool,
    alternating: bool,
) -> (QZSeries, QSeries) {
    let mut z = QZSeries::zero(lat.clone(), trunc24);
    let mut c = QSeries::zero(trunc24);
    let mut j: i64 = i64::from(half_char);
    while 3 * j * j < trunc24 {
        let sign = if alternating && (j / 2) % 2 == 1 {
            -1
        } else {
            1
        };
        let n24 = 3 * j * j;
        if j == 0 {
            z.set_coeff(0, vec![0], rat_i(1));
            c.set_coeff(0, rat_i(1));
        } else {
            z.set_coeff(n24, vec![j], rat_i(sign));
            z.set_coeff(n24, vec![-j], rat_i(sign));
            c.set_coeff(n24, rat_i(2 * sign));
        }
        j += 2;
    }
    (z, c)
}

/// The classical generator pair in one elliptic variable: the weight 0 and
/// weight -2 forms of index 1, both with trivial character and the stored
/// normalization (coprime integer q^0 row, positive leading coefficient).
pub fn a1_generators(trunc24: i64) -> Result<(JacobiForm, JacobiForm), KernelError> {
    if trunc24 < 24 {
        return Err(KernelError::TruncationTooSmall(format!(
            "generator pair needs trunc24 >= 24, got {trunc24}"
        )));
    }
    let data = catalog(RootSystemTag::A(1))?;
    let lat = data.lattice.clone();
    let t_in = trunc24 + 24;

    let mut sum: Option<QZSeries> = None;
    for (half_char, alternating) in [(true, false), (false, false), (false, true)] {
        let (z, c) = theta_even(&lat, t_in, half_char, alternating);
        let ratio = z.mul(&z).mul_qseries(&c.mul(&c).invert()?);
        sum = Some(match sum {
            None => ratio,
            Some(a) => a.add(&ratio),
        });
    }
    let phi0 = sum.unwrap().scale(&rat_i(4)).truncate_to(trunc24);

    let th = theta_pullback(lat.clone(), &[1], t_in);
    let phim2 = th
        .mul(&th)
        .mul_qseries(&eta_power(-6, trunc24))
        .truncate_to(trunc24);

    let g = data.group;
    let phi0 = normalize_generator(&JacobiForm::new(phi0, 0, 1, Character::Trivial, g.clone())?)?;
    let phim2 = normalize_generator(&JacobiForm::new(phim2, -2, 1, Character::Trivial, g)?)?;
    Ok((phi0, phim2))
}

fn embed_axis(f: &QZSeries, lat: &Arc<Lattice>, axis: usize) -> QZSeries {
    let rank = lat.rank;
    let mut out = QZSeries::zero(lat.clone(), f.trunc24);
    for (n24, d2, c) in f.iter_terms() {
        let mut v = vec![0i64; rank];
        v[axis] = d2[0];
        out.set_coeff(n24, v, c.clone());
    }
    out
}

/// Generator tower for the B family: the s-th form is the sum over all
/// s-element subsets S of the axes of `prod_{i in S} phi_{-2}(z_i) *
/// prod_{i not in S} phi_0(z_i)`, an index 1 form of weight `-2s` for the
/// full orthogonal group of the axis lattice. Returned in order s = 0..l.
pub fn b_tower(data: &RootSystemData, trunc24: i64) -> Result<Vec<JacobiForm>, KernelError> {
    let l = match data.tag {
        RootSystemTag::B(l) => l,
        t => {
            return Err(KernelError::UnsupportedConstruction(format!(
                "the symmetrized tower is defined for the B family, not {t}"
            )))
        }
    };
    let (phi0, phim2) = a1_generators(trunc24)?;
    let lat = data.lattice.clone();
    let mut layers: Vec<QZSeries> = vec![QZSeries::constant(lat.clone(), rat_i(1), trunc24)];
    for i in 0..l {
        let a = embed_axis(&phi0.series, &lat, i);
        let b = embed_axis(&phim2.series, &lat, i);
        let mut next: Vec<QZSeries> = Vec::with_capacity(layers.len() + 1);
        for s in 0..=layers.len() {
            let mut term: Option<QZSeries> = None;
            if s < layers.len() {
                term = Some(layers[s].mul(&a));
            }
            if s > 0 {
                let with_b = layers[s - 1].mul(&b);
                term = Some(match term {
                    None => with_b,
                    Some(x) => x.add(&with_b),
                });
            }
            next.push(term.expect("tower layer"));
        }
        layers = next;
    }
    layers
        .into_iter()
        .enumerate()
        .map(|(s, series)| {
            JacobiForm::new(
                series,
                -2 * s as i64,
                1,
                Character::Trivial,
                data.group.clone(),
            )
        })
        .collect()
}

/// Rescale so the q^0 row has coprime integer coefficients and the
/// lexicographically largest z-exponent carries a positive one.
pub fn normalize_generator(f: &JacobiForm) -> Result<JacobiForm, KernelError> {
    let q0 = f
        .series
        .q_term(0)
        .filter(|t| !t.is_empty())
        .ok_or_else(|| {
            KernelError::Internal("cannot normalize a form with an empty q^0 term".into())
        })?;
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for c in q0.values() {
        num = num.gcd(&c.numer().abs());
        den = den.lcm(c.denom());
    }
    let mut content = Rat::new(num, den);
    let (_, lead) = q0.last_key_value().expect("nonempty q^0 term");
    if lead.is_negative() {
        content = -content;
    }
    Ok(f.scale(&content.recip()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use std::collections::BTreeMap;

    fn a1() -> RootSystemData {
        catalog(RootSystemTag::A(1)).unwrap()
    }

    // Triple product: q^{1/8}(z^{1/2}-z^{-1/2}) prod (1-q^n)(1-q^n z)(1-q^n z^{-1}),
    // an expansion of the same function along a different route.
    fn theta_product_oracle(trunc24: i64) -> QZSeries {
        let lat = a1().lattice;
        let mut acc = QZSeries::zero(lat.clone(), trunc24);
        acc.set_coeff(3, vec![1], rat_i(1));
        acc.set_coeff(3, vec![-1], rat_i(-1));
        let mut n = 1i64;
        while 24 * n < trunc24 {
            for d2 in [2i64, -2, 0] {
                let mut f = QZSeries::constant(lat.clone(), rat_i(1), trunc24);
                f.set_coeff(24 * n, vec![d2], rat_i(-1));
                acc = acc.mul(&f);
            }
            n += 1;
        }
        acc
    }

    #[test]
    fn theta_matches_triple_product() {
        let t = 24 * 6;
        assert_eq!(theta1d(t).unwrap(), theta_product_oracle(t));
    }

    #[test]
    fn theta_frozen_values_and_oddness() {
        let th = theta1d(240).unwrap();
        assert_eq!(th.coefficient(3, &[1]), rat_i(1));
        assert_eq!(th.coefficient(3, &[-1]), rat_i(-1));
        assert_eq!(th.coefficient(27, &[3]), rat_i(-1));
        assert_eq!(th.coefficient(27, &[-3]), rat_i(1));
        assert_eq!(th.coefficient(75, &[5]), rat_i(1));
        assert_eq!(th.apply_d_matrix(&[vec![-1]]), th.scale(&rat_i(-1)));
    }

    #[test]
    fn rank_one_theta_block() {
        let f = phi_r(&a1(), 120, None).unwrap();
        assert_eq!((f.weight, f.index), (-1, 2));
        assert_eq!(f.character, Character::Determinant);
        let q0: Vec<_> = f.series.q_term(0).unwrap().iter().collect();
        assert_eq!(q0.len(), 2);
        assert_eq!(f.series.coefficient(0, &[2]), rat_i(1));
        assert_eq!(f.series.coefficient(0, &[-2]), rat_i(-1));
        // q^1 row of theta(2z)/eta^3
        assert_eq!(f.series.coefficient(24, &[2]), rat_i(3));
        assert_eq!(f.series.coefficient(24, &[6]), rat_i(-1));
        let e = f.check_elliptic();
        assert!(e.ok() && e.checked > 0, "{e}");
        assert!(f.check_group_invariance().ok());
    }

    fn weyl_denominator_oracle(data: &RootSystemData) -> BTreeMap<Vec<i64>, Rat> {
        let mut acc: BTreeMap<Vec<i64>, Rat> = BTreeMap::new();
        acc.insert(vec![0; data.rank], rat_i(1));
        for c in &data.positive_dual_coroots {
            let w = data.dual_pairing_vector(c).unwrap();
            let mut next: BTreeMap<Vec<i64>, Rat> = BTreeMap::new();
            for (k, v) in &acc {
                for sgn in [1i64, -1] {
                    let key: Vec<i64> = k.iter().zip(&w).map(|(a, b)| a + sgn * b).collect();
                    let add = if sgn == 1 { v.clone() } else { -v.clone() };
                    let now_zero = {
                        let e = next.entry(key.clone()).or_insert_with(Rat::zero);
                        *e += add;
                        e.is_zero()
                    };
                    if now_zero {
                        next.remove(&key);
                    }
                }
            }
            acc = next;
        }
        acc
    }

    #[test]
    fn rank_two_theta_blocks() {
        let a2 = catalog(RootSystemTag::A(2)).unwrap();
        let f = phi_r(&a2, 72, None).unwrap();
        assert_eq!((f.weight, f.index), (-3, 3));
        assert_eq!(f.series.q_term(0).unwrap(), &weyl_denominator_oracle(&a2));
        assert!(f.check_elliptic().ok());
        assert!(f.check_group_invariance().ok());

        let b2 = catalog(RootSystemTag::B(2)).unwrap();
        let f = phi_r(&b2, 72, None).unwrap();
        assert_eq!((f.weight, f.index), (-4, 3));
        assert_eq!(f.series.q_term(0).unwrap(), &weyl_denominator_oracle(&b2));
        assert!(f.check_elliptic().ok(), "{}", f.check_elliptic());
        assert!(f.check_group_invariance().ok());

        let g2 = catalog(RootSystemTag::G2).unwrap();
        let f = phi_r(&g2, 72, None).unwrap();
        assert_eq!((f.weight, f.index), (-6, 4));
        assert!(f.check_elliptic().ok());
        assert!(f.check_group_invariance().ok());
    }

    fn at_z0(s: &QZSeries) -> QSeries {
        let mut out = QSeries::zero(s.trunc24);
        for (n24, _, c) in s.iter_terms() {
            let v = out.coeff(n24) + c;
            out.set_coeff(n24, v);
        }
        out
    }

    #[test]
    fn generator_pair_frozen_rows() {
        let (phi0, phim2) = a1_generators(120).unwrap();
        assert_eq!((phi0.weight, phi0.index), (0, 1));
        assert_eq!((phim2.weight, phim2.index), (-2, 1));

        for (d2, c) in [(0, 10), (2, 1), (-2, 1)] {
            assert_eq!(phi0.series.coefficient(0, &[d2]), rat_i(c));
        }
        for (d2, c) in [(0, 108), (2, -64), (4, 10), (-2, -64), (-4, 10)] {
            assert_eq!(phi0.series.coefficient(24, &[d2]), rat_i(c));
        }
        for (d2, c) in [(0, -2), (2, 1), (-2, 1)] {
            assert_eq!(phim2.series.coefficient(0, &[d2]), rat_i(c));
        }
        for (d2, c) in [(0, -12), (2, 8), (4, -2), (-2, 8), (-4, -2)] {
            assert_eq!(phim2.series.coefficient(24, &[d2]), rat_i(c));
        }

        // specializing z = 0 gives a weight 0 form (a constant) and a
        // weight -2 form (zero); this couples every q-row
        let z0 = at_z0(&phi0.series);
        assert_eq!(z0, QSeries::monomial(0, rat_i(12), 120));
        assert!(at_z0(&phim2.series).is_zero());

        assert!(phi0.check_elliptic().ok());
        assert!(phim2.check_elliptic().ok());
        assert!(phi0.check_group_invariance().ok());
        assert!(phim2.check_group_invariance().ok());

        let prod = phi0.mul(&phim2).unwrap();
        assert_eq!((prod.weight, prod.index), (-2, 2));
    }

    #[test]
    fn b2_tower_matches_subset_oracle() {
        let b2 = catalog(RootSystemTag::B(2)).unwrap();
        let tower = b_tower(&b2, 48).unwrap();
        assert_eq!(tower.len(), 3);
        for (s, f) in tower.iter().enumerate() {
            assert_eq!((f.weight, f.index), (-2 * s as i64, 1));
            assert!(f.check_elliptic().ok(), "psi_{s}: {}", f.check_elliptic());
            assert!(f.check_group_invariance().ok(), "psi_{s}");
        }

        let (phi0, phim2) = a1_generators(48).unwrap();
        let a = |i| embed_axis(&phi0.series, &b2.lattice, i);
        let b = |i| embed_axis(&phim2.series, &b2.lattice, i);
        assert_eq!(tower[0].series, a(0).mul(&a(1)));
        assert_eq!(tower[1].series, b(0).mul(&a(1)).add(&a(0).mul(&b(1))));
        assert_eq!(tower[2].series, b(0).mul(&b(1)));
    }

    #[test]
    fn normalization_is_idempotent_and_fixes_scale() {
        let (_, phim2) = a1_generators(48).unwrap();
        for c in [rat(7, 3), rat(-2, 1), rat(1, 5)] {
            let scaled = phim2.scale(&c);
            assert_eq!(normalize_generator(&scaled).unwrap(), phim2);
        }
        assert_eq!(normalize_generator(&phim2).unwrap(), phim2);
    }

    #[test]
    fn resource_errors() {
        assert!(matches!(
            phi_r(&a1(), 12, None),
            Err(KernelError::TruncationTooSmall(_))
        ));
        assert!(matches!(
            a1_generators(0),
            Err(KernelError::TruncationTooSmall(_))
        ));
        let f4 = catalog(RootSystemTag::F4).unwrap();
        assert!(matches!(
            phi_r(&f4, 48, Some(10)),
            Err(KernelError::CapExceeded(_))
        ));
        assert!(phi_r(&f4, 24, Some(2_000_000)).is_ok());
        let b3 = catalog(RootSystemTag::B(3)).unwrap();
        assert!(matches!(
            b_tower(&catalog(RootSystemTag::A(2)).unwrap(), 48),
            Err(KernelError::UnsupportedConstruction(_))
        ));
        assert_eq!(b_tower(&b3, 24).unwrap().len(), 4);
    }
}
