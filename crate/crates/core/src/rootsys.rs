//! Catalog of irreducible root systems A1..A8, B2..B8, C3..C8, D4..D8,
//! E6, E7, E8, F4, G2, each realized in fixed rational coordinates.
//!
//! For every system the catalog produces: the even lattice it acts on (with
//! standard and normalized forms), simple and positive roots in lattice
//! basis coordinates, the positive coroots of the dual system in the same
//! order, the acting reflection group (as integral basis matrices with
//! their induced actions on Fourier exponent vectors), and the frozen
//! numeric data: the dual Coxeter number, the root count, and the weight,
//! index and generator signature of the associated theta block.

use crate::error::KernelError;
use crate::jacobi::{GroupGen, GroupGenerators};
use crate::lattice::{weyl_orbit, BilinearForm, Lattice, LatticeVector};
use crate::matrix::{coords_in_span, dot, RatMat};
use crate::rat::{rat, rat_i, rat_to_i64, Rat};
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RootSystemTag {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    E6,
    E7,
    E8,
    F4,
    G2,
}

impl RootSystemTag {
    /// Parse "A3", "E8", "G2", ... The rank ranges follow the
    /// classification: A_l (l>=1), B_l (l>=2), C_l (l>=3), D_l (l>=4),
    /// capped at rank 8.
    pub fn parse(s: &str) -> Result<Self, KernelError> {
        let err = || KernelError::UnknownRootSystem(s.to_string());
        let (fam, num) = s.split_at(1.min(s.len()));
        let rank: usize = num.parse().map_err(|_| err())?;
        let tag = match fam {
            "A" if (1..=8).contains(&rank) => RootSystemTag::A(rank),
            "B" if (2..=8).contains(&rank) => RootSystemTag::B(rank),
            "C" if (3..=8).contains(&rank) => RootSystemTag::C(rank),
            "D" if (4..=8).contains(&rank) => RootSystemTag::D(rank),
            "E" if rank == 6 => RootSystemTag::E6,
            "E" if rank == 7 => RootSystemTag::E7,
            "E" if rank == 8 => RootSystemTag::E8,
            "F" if rank == 4 => RootSystemTag::F4,
            "G" if rank == 2 => RootSystemTag::G2,
            _ => return Err(err()),
        };
        Ok(tag)
    }

    pub fn rank(&self) -> usize {
        match *self {
            RootSystemTag::A(l)
            | RootSystemTag::B(l)
            | RootSystemTag::C(l)
            | RootSystemTag::D(l) => l,
            RootSystemTag::E6 => 6,
            RootSystemTag::E7 => 7,
            RootSystemTag::E8 => 8,
            RootSystemTag::F4 => 4,
            RootSystemTag::G2 => 2,
        }
    }

    /// Every instantiable tag, in catalog order.
    pub fn all() -> Vec<RootSystemTag> {
        let mut v = Vec::new();
        v.extend((1..=8).map(RootSystemTag::A));
        v.extend((2..=8).map(RootSystemTag::B));
        v.extend((3..=8).map(RootSystemTag::C));
        v.extend((4..=8).map(RootSystemTag::D));
        v.extend([
            RootSystemTag::E6,
            RootSystemTag::E7,
            RootSystemTag::E8,
            RootSystemTag::F4,
            RootSystemTag::G2,
        ]);
        v
    }
}

impl fmt::Display for RootSystemTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RootSystemTag::A(l) => write!(f, "A{l}"),
            RootSystemTag::B(l) => write!(f, "B{l}"),
            RootSystemTag::C(l) => write!(f, "C{l}"),
            RootSystemTag::D(l) => write!(f, "D{l}"),
            RootSystemTag::E6 => write!(f, "E6"),
            RootSystemTag::E7 => write!(f, "E7"),
            RootSystemTag::E8 => write!(f, "E8"),
            RootSystemTag::F4 => write!(f, "F4"),
            RootSystemTag::G2 => write!(f, "G2"),
        }
    }
}

/// Everything the kernel knows about one root system. All vectors are in
/// lattice basis coordinates; pair them through the lattice's forms.
#[derive(Clone, Debug)]
pub struct RootSystemData {
    pub tag: RootSystemTag,
    pub rank: usize,
    pub lattice: Arc<Lattice>,
    pub simple_roots: Vec<LatticeVector>,
    /// Sorted by (height, coordinates); height taken over the simple roots.
    pub positive_roots: Vec<LatticeVector>,
    /// Coroot of positive_roots[i] under the standard form, same order.
    pub positive_dual_coroots: Vec<LatticeVector>,
    pub group: GroupGenerators,
    pub h_dual: i64,
    pub num_roots: i64,
    pub phi_weight: i64,
    pub phi_index: i64,
    /// (k_j, m_j) pairs: the free tower has l+1 generators of weight -k_j
    /// and index m_j. Absent exactly for E8.
    pub generator_signature: Option<Vec<(i64, i64)>>,
    /// The nine-form (weight, index) signature used by the E8 pipeline.
    pub sakai_signature: Option<Vec<(i64, i64)>>,
}

impl RootSystemData {
    /// Pairings (r, b_i) of a coroot against the lattice basis under the
    /// standard form. These are the z-exponent weights used to pull a
    /// one-variable theta factor back to the lattice; integrality is a
    /// catalog invariant.
    pub fn dual_pairing_vector(&self, coroot: &LatticeVector) -> Result<Vec<i64>, KernelError> {
        let w = self.lattice.gram_standard.mul_vec(&coroot.coords);
        w.iter()
            .map(|x| {
                rat_to_i64(x).ok_or_else(|| {
                    KernelError::IntegralityViolation(format!(
                        "coroot pairing {x} with a basis vector is not an integer"
                    ))
                })
            })
            .collect()
    }

    /// Reflection matrices of the group generators as rational matrices.
    pub fn generator_matrices(&self) -> Vec<RatMat> {
        self.group
            .gens
            .iter()
            .map(|g| RatMat::from_i64(&g.basis_matrix))
            .collect()
    }

    pub fn orbit(&self, v: &LatticeVector) -> BTreeSet<LatticeVector> {
        weyl_orbit(&self.generator_matrices(), v)
    }
}

fn table_numbers(tag: RootSystemTag) -> (i64, i64) {
    let (h, half) = match tag {
        RootSystemTag::A(l) => (l as i64 + 1, (l * (l + 1) / 2) as i64),
        RootSystemTag::B(l) => (2 * l as i64 + 2, (l * l) as i64),
        RootSystemTag::C(l) => (2 * l as i64 - 1, (l * l) as i64),
        RootSystemTag::D(l) => (2 * (l as i64 - 1), (l * (l - 1)) as i64),
        RootSystemTag::E6 => (12, 36),
        RootSystemTag::E7 => (18, 63),
        RootSystemTag::E8 => (30, 120),
        RootSystemTag::F4 => (18, 24),
        RootSystemTag::G2 => (4, 6),
    };
    (h, half)
}

fn lattice_name(tag: RootSystemTag) -> String {
    match tag {
        RootSystemTag::A(l) => format!("A{l}"),
        RootSystemTag::B(l) => format!("{l}A1"),
        RootSystemTag::C(l) | RootSystemTag::D(l) => format!("D{l}"),
        RootSystemTag::E6 => "E6".into(),
        RootSystemTag::E7 => "E7".into(),
        RootSystemTag::E8 => "E8".into(),
        RootSystemTag::F4 => "D4".into(),
        RootSystemTag::G2 => "A2".into(),
    }
}

fn group_name(tag: RootSystemTag) -> String {
    match tag {
        RootSystemTag::A(l) => format!("W(A{l})"),
        RootSystemTag::B(l) => format!("O({l}A1)"),
        RootSystemTag::C(l) => format!("W(C{l})"),
        RootSystemTag::D(l) => format!("W(D{l})"),
        RootSystemTag::E6 => "W(E6)".into(),
        RootSystemTag::E7 => "W(E7)".into(),
        RootSystemTag::E8 => "W(E8)".into(),
        RootSystemTag::F4 => "O(D4)".into(),
        RootSystemTag::G2 => "O(A2)".into(),
    }
}

fn generator_signature(tag: RootSystemTag) -> Option<Vec<(i64, i64)>> {
    let sig = match tag {
        RootSystemTag::A(l) => {
            let mut v = vec![(0, 1)];
            v.extend((2..=l as i64 + 1).map(|s| (s, 1)));
            v
        }
        RootSystemTag::B(l) => (0..=l as i64).map(|s| (2 * s, 1)).collect(),
        RootSystemTag::C(l) => {
            let mut v = vec![(0, 1), (2, 1), (4, 1)];
            v.extend((3..=l as i64).map(|s| (2 * s, 2)));
            v
        }
        RootSystemTag::D(l) => {
            let mut v = vec![(0, 1), (2, 1), (4, 1), (l as i64, 1)];
            v.extend((3..=l as i64 - 1).map(|s| (2 * s, 2)));
            v
        }
        RootSystemTag::E6 => vec![(0, 1), (2, 1), (5, 1), (6, 2), (8, 2), (9, 2), (12, 3)],
        RootSystemTag::E7 => vec![
            (0, 1),
            (2, 1),
            (6, 2),
            (8, 2),
            (10, 2),
            (12, 3),
            (14, 3),
            (18, 4),
        ],
        RootSystemTag::E8 => return None,
        RootSystemTag::F4 => vec![(0, 1), (2, 1), (6, 2), (8, 2), (12, 3)],
        RootSystemTag::G2 => vec![(0, 1), (2, 1), (6, 2)],
    };
    Some(sig)
}

/// The nine (weight, index) pairs of the E8 ingestion pipeline.
pub fn sakai_signature() -> Vec<(i64, i64)> {
    vec![
        (4, 1),
        (4, 2),
        (4, 3),
        (4, 4),
        (4, 5),
        (6, 2),
        (6, 3),
        (6, 4),
        (6, 6),
    ]
}

fn unit(dim: usize, i: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); dim];
    v[i] = rat_i(1);
    v
}

fn diff(dim: usize, i: usize, j: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); dim];
    v[i] = rat_i(1);
    v[j] = rat_i(-1);
    v
}

fn sum2(dim: usize, i: usize, j: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); dim];
    v[i] = rat_i(1);
    v[j] = rat_i(1);
    v
}

fn e_simples() -> Vec<Vec<Rat>> {
    let half = rat(1, 2);
    let mut a1 = vec![-half.clone(); 8];
    a1[0] = half.clone();
    a1[7] = half;
    let mut simples = vec![a1, sum2(8, 0, 1), diff(8, 1, 0)];
    for i in 2..7 {
        simples.push(diff(8, i, i - 1));
    }
    simples
}

/// Ambient coordinates of (lattice basis, simple roots) for each family.
fn ambient_data(tag: RootSystemTag) -> (Vec<Vec<Rat>>, Vec<Vec<Rat>>) {
    match tag {
        RootSystemTag::A(l) => {
            let simples: Vec<_> = (0..l).map(|i| diff(l + 1, i, i + 1)).collect();
            (simples.clone(), simples)
        }
        RootSystemTag::B(l) => {
            let basis: Vec<_> = (0..l).map(|i| unit(l, i)).collect();
            let mut simples: Vec<_> = (0..l - 1).map(|i| diff(l, i, i + 1)).collect();
            simples.push(unit(l, l - 1));
            (basis, simples)
        }
        RootSystemTag::C(l) => {
            let mut basis: Vec<_> = (0..l - 1).map(|i| diff(l, i, i + 1)).collect();
            basis.push(sum2(l, l - 2, l - 1));
            let mut simples: Vec<_> = (0..l - 1).map(|i| diff(l, i, i + 1)).collect();
            let mut last = unit(l, l - 1);
            last[l - 1] = rat_i(2);
            simples.push(last);
            (basis, simples)
        }
        RootSystemTag::D(l) => {
            let mut basis: Vec<_> = (0..l - 1).map(|i| diff(l, i, i + 1)).collect();
            basis.push(sum2(l, l - 2, l - 1));
            (basis.clone(), basis)
        }
        RootSystemTag::E6 => {
            let s: Vec<_> = e_simples().into_iter().take(6).collect();
            (s.clone(), s)
        }
        RootSystemTag::E7 => {
            let s: Vec<_> = e_simples().into_iter().take(7).collect();
            (s.clone(), s)
        }
        RootSystemTag::E8 => {
            let s = e_simples();
            (s.clone(), s)
        }
        RootSystemTag::F4 => {
            let half = rat(1, 2);
            let basis = vec![unit(4, 0), unit(4, 1), unit(4, 2), vec![half.clone(); 4]];
            let mut a4 = vec![-half.clone(); 4];
            a4[0] = half;
            let simples = vec![diff(4, 1, 2), diff(4, 2, 3), unit(4, 3), a4];
            (basis, simples)
        }
        RootSystemTag::G2 => {
            let basis = vec![diff(3, 0, 1), diff(3, 1, 2)];
            let beta = vec![rat_i(-1), rat_i(2), rat_i(-1)];
            let simples = vec![diff(3, 0, 1), beta];
            (basis, simples)
        }
    }
}

fn int_matrix(m: &RatMat, what: &str) -> Result<Vec<Vec<i64>>, KernelError> {
    let n = m.nrows;
    (0..n)
        .map(|i| {
            (0..m.ncols)
                .map(|j| {
                    rat_to_i64(m.get(i, j)).ok_or_else(|| {
                        KernelError::Internal(format!("{what} has a non-integer entry"))
                    })
                })
                .collect()
        })
        .collect()
}

/// Build the full record for one root system.
pub fn catalog(tag: RootSystemTag) -> Result<RootSystemData, KernelError> {
    let rank = tag.rank();
    let (h_dual, half_roots) = table_numbers(tag);
    let (basis_amb, simple_amb) = ambient_data(tag);

    let mut gram = RatMat::zeros(rank, rank);
    for i in 0..rank {
        for j in 0..rank {
            gram.set(i, j, dot(&basis_amb[i], &basis_amb[j]));
        }
    }
    let lat = Arc::new(Lattice::from_standard_gram(&lattice_name(tag), gram)?);

    let simple_roots: Vec<LatticeVector> = simple_amb
        .iter()
        .map(|s| {
            coords_in_span(&basis_amb, s)
                .map(LatticeVector::new)
                .ok_or_else(|| KernelError::Internal("simple root outside the lattice span".into()))
        })
        .collect::<Result<_, _>>()?;

    let refls: Vec<RatMat> = simple_roots
        .iter()
        .map(|r| lat.reflection(r))
        .collect::<Result<_, _>>()?;

    let mut roots: BTreeSet<LatticeVector> = BTreeSet::new();
    for s in &simple_roots {
        roots.extend(weyl_orbit(&refls, s));
    }
    if roots.len() as i64 != 2 * half_roots {
        return Err(KernelError::Internal(format!(
            "{tag}: root closure found {} roots, expected {}",
            roots.len(),
            2 * half_roots
        )));
    }

    // positivity: nonnegative coordinates over the simple roots
    let smat = {
        let mut m = RatMat::zeros(rank, rank);
        for (j, s) in simple_roots.iter().enumerate() {
            for i in 0..rank {
                m.set(i, j, s.coords[i].clone());
            }
        }
        m
    };
    let sinv = smat
        .inverse()
        .ok_or_else(|| KernelError::Internal("simple roots do not span".into()))?;
    let mut pos: Vec<(Rat, LatticeVector)> = Vec::new();
    for r in &roots {
        let c = sinv.mul_vec(&r.coords);
        if c.iter().all(|x| !x.is_negative()) {
            let height = c.iter().fold(Rat::zero(), |a, b| a + b);
            pos.push((height, r.clone()));
        }
    }
    pos.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    if pos.len() as i64 != half_roots {
        return Err(KernelError::Internal(format!(
            "{tag}: found {} positive roots, expected {half_roots}",
            pos.len()
        )));
    }
    let positive_roots: Vec<LatticeVector> = pos.into_iter().map(|(_, r)| r).collect();
    let positive_dual_coroots: Vec<LatticeVector> = positive_roots
        .iter()
        .map(|r| lat.coroot(r))
        .collect::<Result<_, _>>()?;

    let gens: Vec<GroupGen> = refls
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let basis_matrix = int_matrix(m, "reflection matrix")?;
            let dinv = m
                .transpose()
                .inverse()
                .ok_or_else(|| KernelError::Internal("singular reflection".into()))?;
            let d_action = int_matrix(&dinv, "exponent action")?;
            let det = rat_to_i64(&m.det())
                .ok_or_else(|| KernelError::Internal("non-integer determinant".into()))?;
            Ok::<GroupGen, KernelError>(GroupGen {
                label: format!("s{}", i + 1),
                basis_matrix,
                d_action,
                det,
            })
        })
        .collect::<Result<_, _>>()?;
    let group = GroupGenerators {
        name: group_name(tag),
        rank,
        gens,
    };

    if h_dual % lat.scale != 0 {
        return Err(KernelError::Internal(
            "dual Coxeter number not divisible by the rescale factor".into(),
        ));
    }
    let phi_index = h_dual / lat.scale;

    Ok(RootSystemData {
        tag,
        rank,
        lattice: lat,
        simple_roots,
        positive_roots,
        positive_dual_coroots,
        group,
        h_dual,
        num_roots: 2 * half_roots,
        phi_weight: -half_roots,
        phi_index,
        generator_signature: generator_signature(tag),
        sakai_signature: if tag == RootSystemTag::E8 {
            Some(sakai_signature())
        } else {
            None
        },
    })
}

/// Report from re-deriving the catalog invariants of one record.
#[derive(Clone, Debug)]
pub struct CatalogReport {
    pub system: String,
    pub checks: Vec<(String, bool, String)>,
}

impl CatalogReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok, _)| *ok)
    }

    fn push(&mut self, name: &str, ok: bool, detail: String) {
        self.checks.push((name.to_string(), ok, detail));
    }
}

impl fmt::Display for CatalogReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "catalog {}", self.system)?;
        for (name, ok, detail) in &self.checks {
            writeln!(
                f,
                "  {} {name}: {detail}",
                if *ok { "ok  " } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

fn lcg_next(state: &mut u64) -> u64 {
    *state = state
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    *state
}

/// Re-verify every numeric invariant of a catalog record from scratch.
pub fn verify_catalog(data: &RootSystemData) -> CatalogReport {
    let mut report = CatalogReport {
        system: data.tag.to_string(),
        checks: Vec::new(),
    };
    let lat = &data.lattice;
    let rank = data.rank;

    let even = (0..rank).all(|i| lat.gram_normalized[i][i] % 2 == 0);
    report.push("even normalized form", even, format!("scale {}", lat.scale));

    let odd_diag = (0..rank).any(|i| {
        let d = lat.gram_standard.get(i, i);
        rat_to_i64(d).map(|x| x % 2 != 0).unwrap_or(true)
    });
    report.push(
        "rescale rule",
        (lat.scale == 2) == odd_diag,
        format!("odd standard diagonal: {odd_diag}"),
    );

    // dual Coxeter identity at 10 pseudo-random integer vectors
    let mut state: u64 = 0x9e3779b97f4a7c15 ^ (rank as u64);
    let mut identity_ok = true;
    let mut witness = String::from("all agree");
    for _ in 0..10 {
        let coords: Vec<Rat> = (0..rank)
            .map(|_| rat_i(((lcg_next(&mut state) >> 33) % 9) as i64 - 4))
            .collect();
        let z = LatticeVector::new(coords);
        let lhs = rat_i(data.h_dual) * lat.pairing(&z, &z, BilinearForm::Standard);
        let mut rhs = Rat::zero();
        for c in &data.positive_dual_coroots {
            let p = lat.pairing(c, &z, BilinearForm::Standard);
            rhs += &p * &p;
        }
        if lhs != rhs {
            identity_ok = false;
            witness = format!("lhs {lhs} != rhs {rhs}");
            break;
        }
    }
    report.push("dual Coxeter identity", identity_ok, witness);

    let sig = data
        .generator_signature
        .as_ref()
        .or(data.sakai_signature.as_ref());
    match sig {
        Some(sig) => {
            let m_sum: i64 = sig.iter().map(|(_, m)| m).sum();
            report.push(
                "index sum equals theta block index",
                m_sum == data.phi_index,
                format!("{m_sum} vs {}", data.phi_index),
            );
        }
        None => report.push(
            "index sum equals theta block index",
            false,
            "no signature".into(),
        ),
    }
    if let Some(sig) = &data.generator_signature {
        let k_sum: i64 = sig.iter().map(|(k, _)| -k).sum();
        let expect = data.phi_weight - rank as i64;
        report.push(
            "weight sum equals theta block weight minus rank",
            k_sum == expect,
            format!("{k_sum} vs {expect}"),
        );
        report.push(
            "tower size is rank+1",
            sig.len() == rank + 1,
            format!("{} generators", sig.len()),
        );
    }

    let mats = data.generator_matrices();
    let mut refl_ok = true;
    for m in &mats {
        let sq = m.mul(m);
        if sq != RatMat::identity(rank) || m.det() != rat_i(-1) {
            refl_ok = false;
        }
    }
    report.push(
        "generators are reflections",
        refl_ok,
        format!("{} generators", mats.len()),
    );

    let mut d_ok = true;
    for g in &data.group.gens {
        let s = RatMat::from_i64(&g.basis_matrix);
        let a = RatMat::from_i64(&g.d_action);
        if s.transpose().mul(&a) != RatMat::identity(rank) {
            d_ok = false;
        }
    }
    report.push("exponent actions invert transposes", d_ok, String::new());

    let mut orbit_union: BTreeSet<LatticeVector> = BTreeSet::new();
    for s in &data.simple_roots {
        orbit_union.extend(weyl_orbit(&mats, s));
    }
    report.push(
        "orbit closure of simple roots has size |R|",
        orbit_union.len() as i64 == data.num_roots,
        format!("{} vs {}", orbit_union.len(), data.num_roots),
    );
    report.push(
        "positive roots are half of |R|",
        2 * data.positive_roots.len() as i64 == data.num_roots,
        format!("{}", data.positive_roots.len()),
    );

    let pairing_ok = data
        .positive_dual_coroots
        .iter()
        .all(|c| data.dual_pairing_vector(c).is_ok());
    report.push("coroot pairings are integral", pairing_ok, String::new());

    report
}
