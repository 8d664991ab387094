//! Structure of the invariant algebra: certificates that a generator tower
//! is free, and the constructive decomposition of an invariant form into a
//! polynomial in the generators with coefficients in the level-one modular
//! forms Q[E4, E6].
//!
//! The engine is the cofactor identity: appending a target form to the
//! tower and expanding the extended Jacobian family along its first row
//! expresses (index of target) * target * (Jacobian / theta block) as a
//! combination of generators times lower-index invariant forms. Recursing
//! on those, with base case index 0 handled by exact linear algebra in
//! Q[E4, E6], yields the polynomial. When the tower's Jacobian is a
//! constant multiple of the theta block the result is exact; when it is a
//! modular form g of positive weight, the identity holds after multiplying
//! the target by a certified power of g.

use crate::blocks::{a1_generators, b_tower, phi_r};
use crate::error::KernelError;
use crate::jacobi::{Character, JacobiForm};
use crate::jacobian::{cofactor_jacobians, jacobian};
use crate::matrix::solve_square;
use crate::qseries::{eisenstein, ModularForm, QSeries};
use crate::rat::{rat, rat_i, Rat};
use crate::rootsys::{sakai_signature, RootSystemData, RootSystemTag};
use crate::series::QZSeries;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Dimension of the space of level-one modular forms of the given weight.
pub fn dim_modular(weight: i64) -> usize {
    if weight < 0 || weight % 2 != 0 {
        return 0;
    }
    let q = (weight / 12) as usize;
    if weight % 12 == 2 {
        q
    } else {
        q + 1
    }
}

/// A polynomial in E4 and E6 with rational coefficients, keyed by the
/// exponent pair (a, b) for E4^a E6^b.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ModPoly {
    pub terms: BTreeMap<(u32, u32), Rat>,
}

impl ModPoly {
    pub fn zero() -> Self {
        ModPoly::default()
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = ModPoly::zero();
        if !c.is_zero() {
            p.terms.insert((0, 0), c);
        }
        p
    }

    pub fn monomial(a: u32, b: u32, c: Rat) -> Self {
        let mut p = ModPoly::zero();
        if !c.is_zero() {
            p.terms.insert((a, b), c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_scaled(&mut self, other: &ModPoly, f: &Rat) {
        for (k, v) in &other.terms {
            let now_zero = {
                let e = self.terms.entry(*k).or_insert_with(Rat::zero);
                *e += v * f;
                e.is_zero()
            };
            if now_zero {
                self.terms.remove(k);
            }
        }
    }

    pub fn scale(&self, f: &Rat) -> ModPoly {
        if f.is_zero() {
            return ModPoly::zero();
        }
        ModPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, v * f)).collect(),
        }
    }

    pub fn mul(&self, other: &ModPoly) -> ModPoly {
        let mut out = ModPoly::zero();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &other.terms {
                let k = (a1 + a2, b1 + b2);
                let now_zero = {
                    let e = out.terms.entry(k).or_insert_with(Rat::zero);
                    *e += c1 * c2;
                    e.is_zero()
                };
                if now_zero {
                    out.terms.remove(&k);
                }
            }
        }
        out
    }

    /// Weight if homogeneous (each term has the same 4a + 6b), else None.
    /// The zero polynomial reports weight 0.
    pub fn weight(&self) -> Option<i64> {
        let mut w: Option<i64> = None;
        for (a, b) in self.terms.keys() {
            let t = 4 * *a as i64 + 6 * *b as i64;
            match w {
                None => w = Some(t),
                Some(x) if x == t => {}
                Some(_) => return None,
            }
        }
        Some(w.unwrap_or(0))
    }

    pub fn evaluate(&self, trunc24: i64) -> Result<QSeries, KernelError> {
        let e4 = eisenstein(4, trunc24)?.series;
        let e6 = eisenstein(6, trunc24)?.series;
        let mut acc = QSeries::zero(trunc24);
        for ((a, b), c) in &self.terms {
            acc = acc.add(&e4.pow(*a).mul(&e6.pow(*b)).scale(c));
        }
        Ok(acc)
    }
}

impl fmt::Display for ModPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((a, b), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            if *a > 0 {
                write!(f, "*E4")?;
                if *a > 1 {
                    write!(f, "^{a}")?;
                }
            }
            if *b > 0 {
                write!(f, "*E6")?;
                if *b > 1 {
                    write!(f, "^{b}")?;
                }
            }
        }
        Ok(())
    }
}

/// Express a one-variable q-series as a polynomial in E4, E6 of the given
/// weight. The first dim coefficients determine the candidate (the basis
/// E4^a E6^b of fixed weight is a basis); every further known coefficient
/// is checked, and any mismatch means the input was not modular.
pub fn index0_to_poly(series: &QSeries, weight: i64) -> Result<ModPoly, KernelError> {
    if series.is_zero() {
        return Ok(ModPoly::zero());
    }
    if series.iter().any(|(n24, _)| *n24 < 0 || *n24 % 24 != 0) {
        return Err(KernelError::NonModularResidue(
            "series has exponents outside nonnegative integers".into(),
        ));
    }
    let d = dim_modular(weight);
    if d == 0 {
        return Err(KernelError::NonModularResidue(format!(
            "weight {weight} admits no level-one forms but the series is nonzero"
        )));
    }
    if series.trunc24 < 24 * d as i64 {
        return Err(KernelError::TruncationExhausted {
            site: "index0_to_poly".into(),
            needed: 24 * d as i64,
            have: series.trunc24,
        });
    }
    let mut basis_keys: Vec<(u32, u32)> = Vec::new();
    let mut b = 0i64;
    while 6 * b <= weight {
        if (weight - 6 * b) % 4 == 0 {
            basis_keys.push((((weight - 6 * b) / 4) as u32, b as u32));
        }
        b += 1;
    }
    if basis_keys.len() != d {
        return Err(KernelError::Internal(format!(
            "basis count {} differs from dimension {d} at weight {weight}",
            basis_keys.len()
        )));
    }
    let basis_series: Vec<QSeries> = {
        let e4 = eisenstein(4, series.trunc24)?.series;
        let e6 = eisenstein(6, series.trunc24)?.series;
        basis_keys
            .iter()
            .map(|(a, b)| e4.pow(*a).mul(&e6.pow(*b)))
            .collect()
    };
    let rows: Vec<Vec<Rat>> = (0..d)
        .map(|i| {
            basis_series
                .iter()
                .map(|s| s.coeff(24 * i as i64))
                .collect()
        })
        .collect();
    let rhs: Vec<Rat> = (0..d).map(|i| series.coeff(24 * i as i64)).collect();
    let sol = solve_square(&rows, &rhs)
        .ok_or_else(|| KernelError::Internal("modular basis system is singular".into()))?;
    let mut combo = QSeries::zero(series.trunc24);
    for (c, s) in sol.iter().zip(&basis_series) {
        combo = combo.add(&s.scale(c));
    }
    if combo != *series {
        return Err(KernelError::NonModularResidue(format!(
            "series deviates from every weight {weight} form within the known range"
        )));
    }
    let mut poly = ModPoly::zero();
    for ((a, b), c) in basis_keys.into_iter().zip(sol) {
        if !c.is_zero() {
            poly.terms.insert((a, b), c);
        }
    }
    Ok(poly)
}

/// The Jacobian of a generator tower divided by the theta block: either a
/// nonzero constant (free tower) or a modular form of positive weight.
#[derive(Clone, Debug)]
pub enum ScalarOrG {
    Constant(Rat),
    Modular { g: ModularForm, poly: ModPoly },
}

/// A validated generator system: the tower, its Jacobian, the theta block
/// of the root system, and the certified quotient of the two.
#[derive(Clone, Debug)]
pub struct GeneratorSystem {
    pub data: RootSystemData,
    pub generators: Vec<JacobiForm>,
    pub jacobian: JacobiForm,
    pub theta_block: JacobiForm,
    pub factor: ScalarOrG,
}

impl GeneratorSystem {
    pub fn trunc24(&self) -> i64 {
        self.generators
            .iter()
            .map(|f| f.series.trunc24)
            .chain([
                self.jacobian.series.trunc24,
                self.theta_block.series.trunc24,
            ])
            .min()
            .expect("nonempty system")
    }

    pub fn is_free(&self) -> bool {
        matches!(self.factor, ScalarOrG::Constant(_))
    }
}

fn build_system(
    data: &RootSystemData,
    generators: &[JacobiForm],
    enforce_signature: bool,
) -> Result<GeneratorSystem, KernelError> {
    let sig = data
        .generator_signature
        .as_ref()
        .ok_or(KernelError::E8Excluded)?;
    if generators.len() != sig.len() {
        return Err(KernelError::SignatureMismatch(format!(
            "{} needs {} generators, got {}",
            data.tag,
            sig.len(),
            generators.len()
        )));
    }
    for (j, f) in generators.iter().enumerate() {
        if *f.series.lat != *data.lattice || f.group != data.group {
            return Err(KernelError::LatticeMismatch(format!(
                "generator {} lives on a different lattice or group",
                j + 1
            )));
        }
        if f.character != Character::Trivial {
            return Err(KernelError::SignatureMismatch(format!(
                "generator {} must carry the trivial character",
                j + 1
            )));
        }
        if f.index < 1 {
            return Err(KernelError::IndexMismatch(format!(
                "generator {} must have positive index, got {}",
                j + 1,
                f.index
            )));
        }
        if enforce_signature {
            let (k, m) = sig[j];
            if f.weight != -k || f.index != m {
                return Err(KernelError::SignatureMismatch(format!(
                    "slot {}: expected weight {} index {m}, got weight {} index {}",
                    j + 1,
                    -k,
                    f.weight,
                    f.index
                )));
            }
        }
    }
    let j = jacobian(generators)?;
    if j.series.is_zero() {
        return Err(KernelError::ZeroJacobian);
    }
    if j.index != data.phi_index {
        return Err(KernelError::IndexMismatch(format!(
            "Jacobian index {} differs from theta block index {}",
            j.index, data.phi_index
        )));
    }
    let phi = phi_r(data, j.series.trunc24, None)?;
    let wq = j.weight - phi.weight;
    if enforce_signature && wq != 0 {
        return Err(KernelError::NonConstantQuotient(format!(
            "Jacobian weight {} exceeds theta block weight {} by {wq}; the tower is not free",
            j.weight, phi.weight
        )));
    }
    let q = j.series.exact_divide(&phi.series)?;
    if !q.is_z_independent() {
        return Err(KernelError::NonConstantQuotient(
            "Jacobian over theta block depends on z".into(),
        ));
    }
    let qs = q.as_qseries()?;
    let factor = if wq == 0 {
        if qs.len() != 1 || qs.coeff(0).is_zero() {
            return Err(KernelError::NonConstantQuotient(
                "weight zero quotient is not a nonzero constant".into(),
            ));
        }
        ScalarOrG::Constant(qs.coeff(0))
    } else {
        let poly = index0_to_poly(&qs, wq)?;
        ScalarOrG::Modular {
            g: ModularForm {
                series: qs,
                weight: wq,
            },
            poly,
        }
    };
    Ok(GeneratorSystem {
        data: data.clone(),
        generators: generators.to_vec(),
        jacobian: j,
        theta_block: phi,
        factor,
    })
}

/// Certify that a tower matching the catalog signature freely generates:
/// its Jacobian must be a nonzero constant multiple of the theta block.
pub fn check_free_criterion(
    data: &RootSystemData,
    generators: &[JacobiForm],
) -> Result<GeneratorSystem, KernelError> {
    build_system(data, generators, true)
}

/// Accept any tower of positive-index invariant forms whose Jacobian is a
/// modular multiple of the theta block; decomposition then certifies
/// polynomials after multiplying by a power of that multiple.
pub fn build_g_system(
    data: &RootSystemData,
    generators: &[JacobiForm],
) -> Result<GeneratorSystem, KernelError> {
    build_system(data, generators, false)
}

/// The built-in generator towers.
pub fn builtin_tower(data: &RootSystemData, trunc24: i64) -> Result<Vec<JacobiForm>, KernelError> {
    match data.tag {
        RootSystemTag::A(1) => {
            let (phi0, phim2) = a1_generators(trunc24)?;
            Ok(vec![phi0, phim2])
        }
        RootSystemTag::B(_) => b_tower(data, trunc24),
        RootSystemTag::E8 => Err(KernelError::E8Excluded),
        t => Err(KernelError::UnsupportedConstruction(format!(
            "no built-in generator tower for {t}; supply generators explicitly"
        ))),
    }
}

/// Build the built-in tower and certify the free criterion for it.
pub fn verify_wirthmuller(
    data: &RootSystemData,
    trunc24: i64,
) -> Result<GeneratorSystem, KernelError> {
    let gens = builtin_tower(data, trunc24)?;
    check_free_criterion(data, &gens)
}

/// Decomposition certificate: a polynomial in the generators X_1..X_{l+1}
/// with coefficients in Q[E4, E6], valid after multiplying the target by
/// `g_power` copies of the system's modular factor (0 for free systems).
#[derive(Clone, Debug, PartialEq)]
pub struct DecompResult {
    pub polynomial: BTreeMap<Vec<u32>, ModPoly>,
    pub g_power: u32,
    pub certified_trunc24: i64,
}

impl DecompResult {
    pub fn evaluate(&self, system: &GeneratorSystem) -> Result<QZSeries, KernelError> {
        let lat = system.data.lattice.clone();
        let trunc = system.trunc24();
        let mut acc = QZSeries::zero(lat.clone(), trunc);
        for (key, coeff) in &self.polynomial {
            let mut term = QZSeries::constant(lat.clone(), rat_i(1), trunc);
            for (j, &e) in key.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&system.generators[j].series.pow(e));
                }
            }
            acc = acc.add(&term.mul_qseries(&coeff.evaluate(trunc)?));
        }
        Ok(acc)
    }
}

impl fmt::Display for DecompResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "g_power = {}", self.g_power)?;
        if self.polynomial.is_empty() {
            return writeln!(f, "0");
        }
        for (key, coeff) in &self.polynomial {
            let mut mono = String::new();
            for (j, &e) in key.iter().enumerate() {
                if e > 0 {
                    mono.push_str(&format!("*X{}", j + 1));
                    if e > 1 {
                        mono.push_str(&format!("^{e}"));
                    }
                }
            }
            if mono.is_empty() {
                mono.push_str("*1");
            }
            writeln!(f, "{} : ({})", &mono[1..], coeff)?;
        }
        Ok(())
    }
}

/// Worst-case q-order (in 1/24 units) the decomposition recursion needs:
/// walk the (weight, index) tree; every index-0 leaf asks for dim(M_k)
/// orders of exact linear algebra.
fn decompose_budget(system: &GeneratorSystem, k0: i64, m0: i64) -> i64 {
    let wg = match &system.factor {
        ScalarOrG::Constant(_) => 0,
        ScalarOrG::Modular { g, .. } => g.weight,
    };
    let mut needed = 24i64;
    let mut seen: BTreeSet<(i64, i64)> = BTreeSet::new();
    let mut stack = vec![(k0, m0)];
    while let Some((k, m)) = stack.pop() {
        if !seen.insert((k, m)) {
            continue;
        }
        if m == 0 {
            needed = needed.max(24 * dim_modular(k) as i64);
            continue;
        }
        for f in &system.generators {
            if m - f.index >= 0 {
                stack.push((k - f.weight + wg, m - f.index));
            }
        }
    }
    needed
}

type GenPoly = BTreeMap<Vec<u32>, ModPoly>;

fn poly_accumulate(
    out: &mut GenPoly,
    part: &GenPoly,
    slot: usize,
    gmul: Option<&ModPoly>,
    f: &Rat,
) {
    for (key, coeff) in part {
        let mut k = key.clone();
        k[slot] += 1;
        let mut c = match gmul {
            Some(g) => coeff.mul(g),
            None => coeff.clone(),
        };
        c = c.scale(f);
        let now_zero = {
            let e = out.entry(k.clone()).or_insert_with(ModPoly::zero);
            e.add_scaled(&c, &rat_i(1));
            e.is_zero()
        };
        if now_zero {
            out.remove(&k);
        }
    }
}

fn decompose_rec(
    system: &GeneratorSystem,
    series: &QZSeries,
    weight: i64,
    index: i64,
) -> Result<(GenPoly, u32), KernelError> {
    if series.is_zero() {
        return Ok((GenPoly::new(), 0));
    }
    let nslots = system.generators.len();
    if index == 0 {
        if !series.is_z_independent() {
            return Err(KernelError::NonModularResidue(
                "an index 0 component depends on z; the input is not invariant".into(),
            ));
        }
        let p = index0_to_poly(&series.as_qseries()?, weight)?;
        let mut poly = GenPoly::new();
        if !p.is_zero() {
            poly.insert(vec![0; nslots], p);
        }
        return Ok((poly, 0));
    }

    let target = JacobiForm::new(
        series.clone(),
        weight,
        index,
        Character::Trivial,
        system.data.group.clone(),
    )?;
    let mut tuple = system.generators.clone();
    tuple.push(target);
    let cof = cofactor_jacobians(&tuple)?;

    let mut parts: Vec<(usize, GenPoly, u32)> = Vec::new();
    for (t0, gen) in system.generators.iter().enumerate() {
        let child_index = index - gen.index;
        if child_index < 0 {
            if !cof[t0].series.is_zero() {
                return Err(KernelError::NegativeIndexCofactor(t0 + 1));
            }
            continue;
        }
        if cof[t0].series.is_zero() {
            continue;
        }
        let gt = cof[t0].series.exact_divide(&system.theta_block.series)?;
        let wg = match &system.factor {
            ScalarOrG::Constant(_) => 0,
            ScalarOrG::Modular { g, .. } => g.weight,
        };
        let child_weight = weight - gen.weight + wg;
        let (pt, et) = decompose_rec(system, &gt, child_weight, child_index)?;
        parts.push((t0, pt, et));
    }
    if parts.is_empty() {
        return Err(KernelError::ValidationFailed(
            "every cofactor vanishes for a nonzero form; it is not in the invariant algebra of this tower".into(),
        ));
    }

    let l = system.data.rank;
    let m = index;
    let mut out = GenPoly::new();
    match &system.factor {
        ScalarOrG::Constant(c) => {
            for (t0, pt, et) in &parts {
                debug_assert_eq!(*et, 0, "free systems never raise the factor power");
                let sign = if (t0 + l) % 2 == 0 { 1 } else { -1 };
                let f = rat_i(sign * system.generators[*t0].index) / (rat_i(m) * c);
                poly_accumulate(&mut out, pt, *t0, None, &f);
            }
            Ok((out, 0))
        }
        ScalarOrG::Modular { poly: gpoly, .. } => {
            let emax = parts.iter().map(|(_, _, e)| *e).max().unwrap_or(0);
            let mut gpowers: Vec<ModPoly> = vec![ModPoly::constant(rat_i(1))];
            for _ in 0..emax {
                let next = gpowers.last().unwrap().mul(gpoly);
                gpowers.push(next);
            }
            for (t0, pt, et) in &parts {
                let sign = if (t0 + l) % 2 == 0 { 1 } else { -1 };
                let f = rat(sign * system.generators[*t0].index, m);
                poly_accumulate(&mut out, pt, *t0, Some(&gpowers[(emax - et) as usize]), &f);
            }
            Ok((out, emax + 1))
        }
    }
}

/// Decompose an invariant form over a certified generator system. The
/// certificate is verified against the input to the working truncation
/// before it is returned.
pub fn decompose(
    system: &GeneratorSystem,
    target: &JacobiForm,
) -> Result<DecompResult, KernelError> {
    if *target.series.lat != *system.data.lattice || target.group != system.data.group {
        return Err(KernelError::LatticeMismatch(
            "target lives on a different lattice or group".into(),
        ));
    }
    if target.character != Character::Trivial {
        return Err(KernelError::UnsupportedConstruction(
            "decomposition applies to forms with the trivial character".into(),
        ));
    }
    if target.index < 0 {
        return Err(KernelError::IndexMismatch(format!(
            "target index {} is negative",
            target.index
        )));
    }
    let inv = target.check_group_invariance();
    if !inv.ok() {
        return Err(KernelError::ValidationFailed(format!(
            "target is not invariant: {inv}"
        )));
    }
    let ell = target.check_elliptic();
    if !ell.ok() {
        return Err(KernelError::ValidationFailed(format!(
            "target breaks the elliptic law: {ell}"
        )));
    }

    let trunc = system.trunc24().min(target.series.trunc24);
    let needed = decompose_budget(system, target.weight, target.index);
    if trunc < needed {
        return Err(KernelError::TruncationExhausted {
            site: "decompose".into(),
            needed,
            have: trunc,
        });
    }

    let (polynomial, g_power) = decompose_rec(system, &target.series, target.weight, target.index)?;
    let result = DecompResult {
        polynomial,
        g_power,
        certified_trunc24: trunc,
    };

    let lhs = match &system.factor {
        ScalarOrG::Constant(_) => target.series.clone(),
        ScalarOrG::Modular { g, .. } => target.series.mul_qseries(&g.series.pow(g_power)),
    };
    let rhs = result.evaluate(system)?;
    if !lhs.agrees_with(&rhs) {
        return Err(KernelError::Internal(
            "assembled decomposition failed its own verification".into(),
        ));
    }
    Ok(result)
}

/// Staged analysis of a nine-form tuple over E8. The tuple is validated
/// against the declared (weight, index) table, the bookkeeping identities
/// are reported, and the Jacobian is computed. A vanishing Jacobian is
/// only checkable to the ingested order and yields a report; a nonzero one
/// must be supported at q^8 or beyond, and the follow-up theta block
/// computation runs under the caller's term cap.
#[derive(Clone, Debug)]
pub struct E8Report {
    pub lines: Vec<String>,
    pub jacobian_is_zero: bool,
}

impl fmt::Display for E8Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

pub fn e8_pipeline(
    data: &RootSystemData,
    forms: &[JacobiForm],
    max_terms: usize,
    declared_m: i64,
) -> Result<E8Report, KernelError> {
    if data.tag != RootSystemTag::E8 {
        return Err(KernelError::UnsupportedConstruction(
            "the staged pipeline is specific to E8".into(),
        ));
    }
    let sig = sakai_signature();
    let mut lines = Vec::new();

    if forms.len() != sig.len() {
        return Err(KernelError::SignatureMismatch(format!(
            "expected {} forms, got {}",
            sig.len(),
            forms.len()
        )));
    }
    for (j, ((k, m), f)) in sig.iter().zip(forms).enumerate() {
        if f.weight != *k || f.index != *m {
            return Err(KernelError::SignatureMismatch(format!(
                "slot {}: expected weight {k} index {m}, got weight {} index {}",
                j + 1,
                f.weight,
                f.index
            )));
        }
        if *f.series.lat != *data.lattice || f.group != data.group {
            return Err(KernelError::LatticeMismatch(format!(
                "form {} is not over the E8 lattice and group",
                j + 1
            )));
        }
    }
    lines.push("signature: nine forms match the declared (weight, index) table".into());

    let m_sum: i64 = forms.iter().map(|f| f.index).sum();
    lines.push(format!(
        "bookkeeping: index sum {m_sum} matches theta block index {}",
        data.phi_index
    ));
    let j_weight = 8 + forms.iter().map(|f| f.weight).sum::<i64>();
    let g_weight = j_weight - data.phi_weight;
    lines.push(format!(
        "bookkeeping: Jacobian weight {j_weight}, quotient weight {g_weight}, dim M_{g_weight} = {}",
        dim_modular(g_weight)
    ));
    lines.push(format!(
        "declared minimal non-polynomial index M = {declared_m}"
    ));

    for (j, f) in forms.iter().enumerate() {
        if let Some(q0) = f.series.q_term(0) {
            if q0.keys().any(|k| k.iter().any(|x| *x != 0)) {
                return Err(KernelError::ValidationFailed(format!(
                    "form {} has a z-dependent q^0 term",
                    j + 1
                )));
            }
        }
    }
    lines.push("q^0 rows are z-independent".into());

    let trunc = forms.iter().map(|f| f.series.trunc24).min().unwrap();
    let jac = jacobian(forms)?;
    if jac.series.is_zero() {
        lines.push(format!(
            "jacobian vanishes through q^{}; vanishing is only checkable to the ingested order",
            trunc / 24
        ));
        return Ok(E8Report {
            lines,
            jacobian_is_zero: true,
        });
    }

    if jac.series.iter_terms().any(|(n24, _, _)| n24 < 192) {
        return Err(KernelError::ValidationFailed(
            "a nonzero Jacobian coefficient sits below q^8, contradicting z-independent q^0 rows"
                .into(),
        ));
    }
    lines.push("jacobian is nonzero and supported at q^8 and beyond".into());

    let phi = phi_r(data, jac.series.trunc24, Some(max_terms))?;
    let g = jac.series.exact_divide(&phi.series)?;
    if !g.is_z_independent() {
        return Err(KernelError::ValidationFailed(
            "Jacobian over theta block depends on z".into(),
        ));
    }
    let poly = index0_to_poly(&g.as_qseries()?, g_weight)?;
    lines.push(format!("quotient certified: {poly}"));
    Ok(E8Report {
        lines,
        jacobian_is_zero: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::delta;
    use crate::rootsys::catalog;
    use std::sync::Arc;

    fn a1_system(trunc24: i64) -> GeneratorSystem {
        let data = catalog(RootSystemTag::A(1)).unwrap();
        verify_wirthmuller(&data, trunc24).unwrap()
    }

    #[test]
    fn modular_dimensions() {
        for (k, d) in [
            (0, 1),
            (2, 0),
            (4, 1),
            (6, 1),
            (8, 1),
            (10, 1),
            (12, 2),
            (14, 1),
            (16, 2),
            (18, 2),
            (172, 15),
            (-2, 0),
            (5, 0),
        ] {
            assert_eq!(dim_modular(k), d, "weight {k}");
        }
    }

    #[test]
    fn index0_roundtrip_weight_12() {
        let t = 24 * 6;
        let e4 = eisenstein(4, t).unwrap().series;
        let d = delta(t);
        let input = e4.pow(3).scale(&rat_i(5)).sub(&d.series.scale(&rat(2, 1)));
        let p = index0_to_poly(&input, 12).unwrap();
        assert_eq!(p.evaluate(t).unwrap(), input);
        // delta = (E4^3 - E6^2)/1728
        let mut expect = ModPoly::zero();
        expect.terms.insert((3, 0), rat_i(5) - rat(2, 1728));
        expect.terms.insert((0, 2), rat(2, 1728));
        assert_eq!(p, expect);
        assert_eq!(p.weight(), Some(12));
    }

    #[test]
    fn index0_rejections() {
        let t = 24 * 6;
        // weight 2 has no forms
        let one = QSeries::one(t);
        assert!(matches!(
            index0_to_poly(&one, 2),
            Err(KernelError::NonModularResidue(_))
        ));
        // a perturbed coefficient beyond the solve range is caught
        let mut bad = eisenstein(4, t).unwrap().series;
        let c = bad.coeff(24 * 3) + rat_i(1);
        bad.set_coeff(24 * 3, c);
        assert!(matches!(
            index0_to_poly(&bad, 4),
            Err(KernelError::NonModularResidue(_))
        ));
        // not enough orders to pin weight 12
        let short = eisenstein(4, 24).unwrap().series;
        match index0_to_poly(&short, 12) {
            Err(KernelError::TruncationExhausted { needed, have, .. }) => {
                assert_eq!((needed, have), (48, 24));
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
        // zero series is the zero polynomial at any weight
        assert!(index0_to_poly(&QSeries::zero(t), 7).unwrap().is_zero());
    }

    #[test]
    fn free_criterion_rank_one() {
        let sys = a1_system(120);
        assert!(sys.is_free());
        match &sys.factor {
            ScalarOrG::Constant(c) => assert_eq!(c, &rat_i(12)),
            _ => panic!("rank one tower is free"),
        }
        assert_eq!((sys.jacobian.weight, sys.jacobian.index), (-1, 2));
        assert_eq!(sys.theta_block.weight, -1);
    }

    #[test]
    fn free_criterion_error_routes() {
        let data = catalog(RootSystemTag::A(1)).unwrap();
        let (phi0, phim2) = a1_generators(72).unwrap();

        // reversed signature
        assert!(matches!(
            check_free_criterion(&data, &[phim2.clone(), phi0.clone()]),
            Err(KernelError::SignatureMismatch(_))
        ));
        // a zero slot passes the signature but kills the Jacobian
        let zero = phim2.scale(&rat_i(0));
        assert!(matches!(
            check_free_criterion(&data, &[phi0.clone(), zero]),
            Err(KernelError::ZeroJacobian)
        ));
        // weight drift routes to the non-free report before any division
        let e4 = eisenstein(4, 72).unwrap();
        let heavy = phim2.mul_modular(&e4);
        assert!(matches!(
            build_g_system(&data, &[phi0.clone(), phim2.clone()]).map(|s| s.is_free()),
            Ok(true)
        ));
        assert!(matches!(
            check_free_criterion(&data, &[phi0.clone(), heavy]),
            Err(KernelError::SignatureMismatch(_))
        ));
    }

    #[test]
    fn g_system_anchor() {
        let data = catalog(RootSystemTag::A(1)).unwrap();
        let (phi0, phim2) = a1_generators(96).unwrap();
        let e4 = eisenstein(4, 96).unwrap();
        let gens = vec![phi0, phim2.mul_modular(&e4)];
        let sys = build_g_system(&data, &gens).unwrap();
        assert!(!sys.is_free());
        match &sys.factor {
            ScalarOrG::Modular { g, poly } => {
                assert_eq!(g.weight, 4);
                assert_eq!(g.series, e4.series.scale(&rat_i(12)));
                assert_eq!(poly, &ModPoly::monomial(1, 0, rat_i(12)));
            }
            _ => panic!("expected a modular factor"),
        }

        let res = decompose(&sys, &phim2).unwrap();
        assert_eq!(res.g_power, 1);
        let mut expect = GenPoly::new();
        expect.insert(vec![0, 1], ModPoly::constant(rat_i(12)));
        assert_eq!(res.polynomial, expect);
    }

    #[test]
    fn decompose_anchors() {
        // psi_1 over the rank two tower is exactly X2
        let b2 = catalog(RootSystemTag::B(2)).unwrap();
        let sys = verify_wirthmuller(&b2, 48).unwrap();
        let tower = b_tower(&b2, 48).unwrap();
        let res = decompose(&sys, &tower[1]).unwrap();
        assert_eq!(res.g_power, 0);
        let mut expect = GenPoly::new();
        expect.insert(vec![0, 1, 0], ModPoly::constant(rat_i(1)));
        assert_eq!(res.polynomial, expect);

        // phi_0 * phi_-2 over rank one is exactly X1 X2
        let sys = a1_system(72);
        let prod = sys.generators[0].mul(&sys.generators[1]).unwrap();
        let res = decompose(&sys, &prod).unwrap();
        assert_eq!(res.g_power, 0);
        let mut expect = GenPoly::new();
        expect.insert(vec![1, 1], ModPoly::constant(rat_i(1)));
        assert_eq!(res.polynomial, expect);

        // a cubic monomial decomposes to itself
        let cube = prod.mul(&sys.generators[0]).unwrap();
        let res = decompose(&sys, &cube).unwrap();
        let mut expect = GenPoly::new();
        expect.insert(vec![2, 1], ModPoly::constant(rat_i(1)));
        assert_eq!(res.polynomial, expect);
    }

    #[test]
    fn decompose_theta_block_square() {
        let sys = a1_system(120);
        let phi = &sys.theta_block;
        let sq = phi.mul(phi).unwrap();
        assert_eq!(sq.character, Character::Trivial);
        assert_eq!((sq.weight, sq.index), (-2, 4));
        let res = decompose(&sys, &sq).unwrap();
        assert_eq!(res.g_power, 0);
        assert!(!res.polynomial.is_empty());
        // index homogeneity: every monomial has total index 4
        for key in res.polynomial.keys() {
            let mi: i64 = key
                .iter()
                .zip(&sys.generators)
                .map(|(e, g)| *e as i64 * g.index)
                .sum();
            assert_eq!(mi, 4);
        }
        // weight homogeneity: monomial weight plus coefficient weight is -2
        for (key, coeff) in &res.polynomial {
            let wk: i64 = key
                .iter()
                .zip(&sys.generators)
                .map(|(e, g)| *e as i64 * g.weight)
                .sum();
            assert_eq!(wk + coeff.weight().unwrap(), -2);
        }
        let lhs = sq.series.clone();
        assert!(lhs.agrees_with(&res.evaluate(&sys).unwrap()));
    }

    #[test]
    fn decompose_budget_and_guards() {
        let sys = a1_system(24);
        let e4 = eisenstein(4, 24).unwrap();
        let target = sys.generators[1]
            .mul(&sys.generators[1])
            .unwrap()
            .mul_modular(&e4)
            .mul_modular(&e4)
            .mul_modular(&e4);
        assert_eq!((target.weight, target.index), (8, 2));
        match decompose(&sys, &target) {
            Err(KernelError::TruncationExhausted { needed, have, .. }) => {
                assert_eq!((needed, have), (48, 24));
            }
            other => panic!("expected truncation error, got {other:?}"),
        }

        // determinant character targets are rejected
        let sys = a1_system(72);
        let phi = sys.theta_block.clone();
        assert!(matches!(
            decompose(&sys, &phi),
            Err(KernelError::UnsupportedConstruction(_))
        ));

        // non-invariant targets are rejected
        let data = catalog(RootSystemTag::A(1)).unwrap();
        let skew = JacobiForm::new(
            QZSeries::monomial(data.lattice.clone(), 0, vec![2], rat_i(1), 72),
            0,
            1,
            Character::Trivial,
            data.group.clone(),
        )
        .unwrap();
        assert!(matches!(
            decompose(&sys, &skew),
            Err(KernelError::ValidationFailed(_))
        ));
    }

    #[test]
    fn builtin_tower_routing() {
        let a2 = catalog(RootSystemTag::A(2)).unwrap();
        assert!(matches!(
            verify_wirthmuller(&a2, 48),
            Err(KernelError::UnsupportedConstruction(_))
        ));
        let e8 = catalog(RootSystemTag::E8).unwrap();
        assert!(matches!(
            verify_wirthmuller(&e8, 48),
            Err(KernelError::E8Excluded)
        ));
        let b3 = catalog(RootSystemTag::B(3)).unwrap();
        let sys = verify_wirthmuller(&b3, 48).unwrap();
        assert_eq!((sys.jacobian.weight, sys.jacobian.index), (-9, 4));
        assert!(sys.is_free());
    }

    fn e8_group() -> (RootSystemData, Arc<crate::lattice::Lattice>) {
        let data = catalog(RootSystemTag::E8).unwrap();
        let lat = data.lattice.clone();
        (data, lat)
    }

    fn constant_e8_forms(trunc24: i64) -> Vec<JacobiForm> {
        let (data, lat) = e8_group();
        sakai_signature()
            .iter()
            .map(|(k, m)| {
                JacobiForm::new(
                    QZSeries::constant(lat.clone(), rat_i(1), trunc24),
                    *k,
                    *m,
                    Character::Trivial,
                    data.group.clone(),
                )
                .unwrap()
            })
            .collect()
    }

    #[test]
    fn e8_vanishing_report() {
        let (data, _) = e8_group();
        let forms = constant_e8_forms(240);
        let rep = e8_pipeline(&data, &forms, 1_000_000, 2).unwrap();
        assert!(rep.jacobian_is_zero);
        assert!(rep.lines.iter().any(|l| l.contains("only checkable")));
        assert!(rep
            .lines
            .iter()
            .any(|l| l.contains("index sum 30 matches theta block index 30")));
        assert!(rep.lines.iter().any(|l| l.contains("dim M_172 = 15")));
    }

    #[test]
    fn e8_error_categories() {
        let (data, lat) = e8_group();
        // wrong signature
        let mut forms = constant_e8_forms(240);
        forms.swap(0, 5);
        assert!(matches!(
            e8_pipeline(&data, &forms, 1_000_000, 2),
            Err(KernelError::SignatureMismatch(_))
        ));

        // z-dependent q^0 term
        let mut forms = constant_e8_forms(240);
        let mut s = QZSeries::constant(lat.clone(), rat_i(1), 240);
        let mut d2 = vec![0i64; 8];
        d2[0] = 2;
        s.set_coeff(0, d2, rat_i(1));
        forms[0] = JacobiForm::new(s, 4, 1, Character::Trivial, data.group.clone()).unwrap();
        assert!(matches!(
            e8_pipeline(&data, &forms, 1_000_000, 2),
            Err(KernelError::ValidationFailed(_))
        ));
    }

    #[test]
    fn e8_nonzero_jacobian_hits_the_cap() {
        let (data, lat) = e8_group();
        let sig = sakai_signature();
        let forms: Vec<JacobiForm> = sig
            .iter()
            .enumerate()
            .map(|(j, (k, m))| {
                let mut s = QZSeries::constant(lat.clone(), rat_i(1), 216);
                let mut d2 = vec![0i64; 8];
                if j < 8 {
                    d2[j] = 2;
                } else {
                    d2 = vec![2; 8];
                }
                s.set_coeff(24, d2, rat_i(1));
                JacobiForm::new(s, *k, *m, Character::Trivial, data.group.clone()).unwrap()
            })
            .collect();
        match e8_pipeline(&data, &forms, 50_000, 2) {
            Err(KernelError::CapExceeded(_)) => {}
            other => panic!("expected the term cap, got {other:?}"),
        }
    }
}
