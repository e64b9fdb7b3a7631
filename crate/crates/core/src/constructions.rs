//! Complete complementary decompositions of `M_p (x) M_p`.
//!
//! Two families are built: the Galois family (the two product factors plus
//! `π(H)` for a subgroup `H <= SL2(p)` of order `p^2 - 1`) and the A/B family
//! parametrized by a quadratic non-residue `D`. For `p = 1 (mod 4)` the
//! B-part can be recombined into `p + 1` MASAs, completing the A-MASAs to a
//! full set of mutually unbiased bases.

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::residue::{
    enumerate_sl2, intersect_trivially, is_square, mod_inv, smallest_nonresidue, Gl2Matrix,
    Prime, ResidueScalar, Subspace2, Vec4,
};
use crate::subalgebra::{has_order_p, phi, sl2_pair_complementary, SubalgebraDesc, SubalgebraKind};

pub const DEFAULT_SEARCH_BUDGET: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Galois,
    Ab,
    Custom,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Galois => "galois",
            Family::Ab => "ab",
            Family::Custom => "custom",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub p: Prime,
    pub family: Family,
    pub nonresidue: Option<ResidueScalar>,
    pub subalgebras: Vec<SubalgebraDesc>,
    /// Subgroup generators, Galois family only.
    pub generators: Option<Vec<Gl2Matrix>>,
}

impl Decomposition {
    pub fn factor_count(&self) -> usize {
        self.subalgebras.iter().filter(|s| s.kind.is_factor()).count()
    }

    pub fn masa_count(&self) -> usize {
        self.subalgebras.len() - self.factor_count()
    }

    pub fn masas(&self) -> impl Iterator<Item = &SubalgebraDesc> {
        self.subalgebras.iter().filter(|s| s.kind == SubalgebraKind::Masa)
    }

    /// `p^2 + 1`, the size of a complete decomposition.
    pub fn complete_size(&self) -> usize {
        let p = self.p.get() as usize;
        p * p + 1
    }
}

/// Index pairs `(i, j)` whose planes meet nontrivially.
pub fn pairwise_overlaps(subspaces: &[Subspace2]) -> Vec<(usize, usize)> {
    let n = subspaces.len();
    let mut bad: Vec<(usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..n)
                .filter(move |&j| !intersect_trivially(&subspaces[i], &subspaces[j]).unwrap_or(false))
                .map(move |j| (i, j))
        })
        .collect();
    bad.sort_unstable();
    bad
}

fn check_nonresidue(d: ResidueScalar, p: Prime) -> Result<()> {
    if d.modulus() != p {
        return Err(Error::ModulusMismatch(p.get(), d.modulus().get()));
    }
    if is_square(d) {
        return Err(Error::NotNonresidue { d: d.value(), p: p.get() });
    }
    Ok(())
}

/// `A_{i,j} = [[i, -j], [j^-1 (1 - D i^2), D i]]`, always in SL2(p).
pub fn ab_matrix_a(i: ResidueScalar, j: ResidueScalar, d: ResidueScalar) -> Result<Gl2Matrix> {
    if j.is_zero() {
        return Err(Error::ZeroJ);
    }
    let one = j.modulus().one();
    let lower_left = mod_inv(j)? * (one - d * i * i);
    Gl2Matrix::from_scalars([[i, -j], [lower_left, d * i]])
}

/// `B_i = [[i, 0], [0, -i D]]`, determinant `-D i^2`.
pub fn ab_matrix_b(i: ResidueScalar, d: ResidueScalar) -> Result<Gl2Matrix> {
    if i.is_zero() {
        return Err(Error::ZeroI);
    }
    let zero = i.modulus().zero();
    Gl2Matrix::from_scalars([[i, zero], [zero, -(i * d)]])
}

/// The two product factors, the `p(p-1)` planes `φ(A_{i,j})` and the `p - 1`
/// planes `φ(B_i)`, in that order.
pub fn build_ab_decomposition(p: Prime, d: Option<ResidueScalar>) -> Result<Decomposition> {
    if !p.is_odd() {
        return Err(Error::NotOddPrime(p.get()));
    }
    let d = match d {
        Some(d) => {
            check_nonresidue(d, p)?;
            d
        }
        None => smallest_nonresidue(p)?,
    };
    let mut subalgebras = vec![SubalgebraDesc::product_factor0(p), SubalgebraDesc::product_factor1(p)];
    for i in p.elements() {
        for j in p.units() {
            subalgebras.push(SubalgebraDesc::from_gl2(ab_matrix_a(i, j, d)?));
        }
    }
    for i in p.units() {
        subalgebras.push(SubalgebraDesc::from_gl2(ab_matrix_b(i, d)?));
    }
    Ok(Decomposition { p, family: Family::Ab, nonresidue: Some(d), subalgebras, generators: None })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupSearchResult {
    pub generators: Vec<Gl2Matrix>,
    /// Sorted group elements.
    pub elements: Vec<Gl2Matrix>,
    pub order: usize,
    /// Random generator pairs tried (hints not counted).
    pub attempts: u64,
    pub seed: u64,
    /// Rejected hint sets and how the result was obtained.
    pub notes: Vec<String>,
}

/// Breadth-first closure of `generators` under multiplication. Stops and
/// returns `None` once more than `limit` elements are found or, when
/// `reject_order_p` is set, an element of order divisible by `p` appears.
fn bounded_closure(generators: &[Gl2Matrix], limit: usize, reject_order_p: bool) -> Option<Vec<Gl2Matrix>> {
    let p = generators.first()?.modulus();
    let id = Gl2Matrix::identity(p);
    let mut seen: HashSet<u64> = HashSet::with_capacity(limit + 1);
    let mut elements = vec![id];
    seen.insert(id.key());
    let mut next = 0;
    while next < elements.len() {
        let e = elements[next];
        next += 1;
        for g in generators {
            let prod = e * *g;
            if seen.insert(prod.key()) {
                if reject_order_p && order_divisible_by_p(&prod) {
                    return None;
                }
                elements.push(prod);
                if elements.len() > limit {
                    return None;
                }
            }
        }
    }
    Some(elements)
}

/// True for `±T` with `T` of order `p`: traces `±2` other than `±I`.
fn order_divisible_by_p(m: &Gl2Matrix) -> bool {
    let p = m.modulus();
    let t = m.trace();
    let two = ResidueScalar::new(2, p);
    let is_scalar = m.entry(0, 1).is_zero() && m.entry(1, 0).is_zero() && m.entry(0, 0) == m.entry(1, 1);
    (t == two || t == -two) && !is_scalar
}

/// The subgroup generated by `generators`, as a sorted element list.
pub fn subgroup_closure(generators: &[Gl2Matrix]) -> Vec<Gl2Matrix> {
    let Some(first) = generators.first() else {
        return Vec::new();
    };
    let p = first.modulus().get() as usize;
    let mut els = bounded_closure(generators, p * (p * p - 1), false).unwrap_or_default();
    els.sort();
    els
}

/// Generator sets printed alongside the construction for small primes.
pub fn builtin_hints(p: Prime) -> Vec<Vec<Gl2Matrix>> {
    let sets: &[[[i64; 2]; 2]] = match p.get() {
        2 => &[[[1, 1], [0, 1]], [[1, 0], [1, 1]]],
        3 => &[[[0, 1], [2, 0]], [[2, 2], [2, 1]]],
        _ => &[],
    };
    if sets.is_empty() {
        return Vec::new();
    }
    vec![sets.iter().map(|e| Gl2Matrix::new(*e, p).expect("hint is invertible")).collect()]
}

fn fmt_matrices(ms: &[Gl2Matrix]) -> String {
    ms.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(", ")
}

/// Validates a candidate generator set; `Err` carries the rejection reason.
fn validate_candidate(p: Prime, gens: &[Gl2Matrix]) -> std::result::Result<Vec<Gl2Matrix>, String> {
    let target = (p.get() * p.get() - 1) as usize;
    if let Some(g) = gens.iter().find(|g| !g.is_sl2() || g.modulus() != p) {
        return Err(format!("generator {g} is not in SL2({p})"));
    }
    let closure = subgroup_closure(gens);
    let order_p: Vec<&Gl2Matrix> = closure.iter().filter(|m| has_order_p(m).unwrap_or(true)).collect();
    if closure.len() != target || !order_p.is_empty() {
        return Err(format!(
            "closure has order {} (need {target}) and {} element(s) of order {p}, e.g. {}",
            closure.len(),
            order_p.len(),
            order_p.first().map(|m| m.to_string()).unwrap_or_else(|| "none".into())
        ));
    }
    Ok(closure)
}

/// Searches SL2(p) for a subgroup of order `p^2 - 1` with no element of
/// order `p`. Hint sets (built-in ones first, then `hint_generators`) are
/// revalidated before use; afterwards random generator pairs are drawn from
/// a seeded stream until `budget` pairs have been tried.
pub fn find_galois_subgroup(
    p: Prime,
    seed: u64,
    hint_generators: Option<&[Gl2Matrix]>,
) -> Result<SubgroupSearchResult> {
    find_galois_subgroup_with_budget(p, seed, hint_generators, DEFAULT_SEARCH_BUDGET)
}

pub fn find_galois_subgroup_with_budget(
    p: Prime,
    seed: u64,
    hint_generators: Option<&[Gl2Matrix]>,
    budget: u64,
) -> Result<SubgroupSearchResult> {
    let mut notes = Vec::new();
    let mut hints = builtin_hints(p);
    if let Some(h) = hint_generators {
        hints.push(h.to_vec());
    }
    for gens in hints {
        match validate_candidate(p, &gens) {
            Ok(elements) => {
                notes.push(format!("hint generators {} accepted", fmt_matrices(&gens)));
                return Ok(SubgroupSearchResult {
                    order: elements.len(),
                    generators: gens,
                    elements,
                    attempts: 0,
                    seed,
                    notes,
                });
            }
            Err(why) => notes.push(format!("hint generators {} rejected: {why}", fmt_matrices(&gens))),
        }
    }

    let target = (p.get() * p.get() - 1) as usize;
    let candidates: Vec<Gl2Matrix> = enumerate_sl2(p)
        .into_iter()
        .filter(|m| !m.is_identity() && !order_divisible_by_p(m))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0;
    while attempts < budget && !candidates.is_empty() {
        attempts += 1;
        let a = candidates[rng.random_range(0..candidates.len())];
        let b = candidates[rng.random_range(0..candidates.len())];
        let gens = [a, b];
        let Some(mut elements) = bounded_closure(&gens, target, true) else {
            continue;
        };
        if elements.len() != target {
            continue;
        }
        elements.sort();
        let generators = if a == b { vec![a] } else { gens.to_vec() };
        notes.push(format!(
            "random search found generators {} after {attempts} attempt(s) (seed {seed})",
            fmt_matrices(&generators)
        ));
        return Ok(SubgroupSearchResult { generators, order: target, elements, attempts, seed, notes });
    }
    Err(Error::SearchExhausted { p: p.get(), attempts })
}

/// `F0`, `F1` and `φ(h)` for every `h` in the subgroup.
pub fn build_galois_decomposition(p: Prime, subgroup: &SubgroupSearchResult) -> Result<Decomposition> {
    let target = (p.get() * p.get() - 1) as usize;
    if subgroup.elements.len() != target {
        return Err(Error::InvalidSubgroup(format!(
            "order {} instead of {target}",
            subgroup.elements.len()
        )));
    }
    let els = &subgroup.elements;
    for (i, a) in els.iter().enumerate() {
        if a.modulus() != p {
            return Err(Error::ModulusMismatch(p.get(), a.modulus().get()));
        }
        for b in &els[i + 1..] {
            if !sl2_pair_complementary(a, b).map_err(|e| Error::InvalidSubgroup(e.to_string()))? {
                return Err(Error::InvalidSubgroup(format!("{a} and {b} are not complementary")));
            }
        }
    }
    let mut subalgebras = vec![SubalgebraDesc::product_factor0(p), SubalgebraDesc::product_factor1(p)];
    subalgebras.extend(els.iter().map(|m| SubalgebraDesc::from_gl2(*m)));
    Ok(Decomposition {
        p,
        family: Family::Galois,
        nonresidue: None,
        subalgebras,
        generators: Some(subgroup.generators.clone()),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    /// The `p + 1` replacement MASA planes.
    pub subspaces: Vec<Subspace2>,
    /// Nonzero points covered by the replacements.
    pub union_points: usize,
    /// Whether the covered point set equals that of `F0`, `F1` and the `φ(B_i)`.
    pub union_matches: bool,
}

/// For `p = 1 (mod 4)`: the planes `Sp{(0,1,0,0),(0,0,1,0)}`,
/// `Sp{(1,0,0,0),(0,0,0,1)}` and `Sp{(i,1,0,0),(0,0,1,-iD)}` (`i != 0`).
/// Together they cover exactly the nonzero points of `F0`, `F1` and the
/// `φ(B_i)`: both are the nonzero zeros of `x2 x4 + D x1 x3`.
pub fn recombine_extension(p: Prime, d: ResidueScalar) -> Result<Extension> {
    if p.mod4() != 1 {
        return Err(Error::WrongResidueClass(p.get()));
    }
    check_nonresidue(d, p)?;
    let mut subspaces = vec![
        Subspace2::from_rows([[0, 1, 0, 0], [0, 0, 1, 0]], p)?,
        Subspace2::from_rows([[1, 0, 0, 0], [0, 0, 0, 1]], p)?,
    ];
    for i in p.units() {
        let u = Vec4::from_scalars([i, p.one(), p.zero(), p.zero()])?;
        let v = Vec4::from_scalars([p.zero(), p.zero(), p.one(), -(i * d)])?;
        subspaces.push(Subspace2::from_basis(&u, &v)?);
    }

    let mut original = vec![Subspace2::f0(p), Subspace2::f1(p)];
    for i in p.units() {
        original.push(phi(&ab_matrix_b(i, d)?));
    }
    let nonzero_points = |planes: &[Subspace2]| -> BTreeSet<Vec4> {
        planes.iter().flat_map(|s| s.points()).filter(|v| !v.is_zero()).collect()
    };
    let replaced = nonzero_points(&subspaces);
    let union_matches = replaced == nonzero_points(&original);
    Ok(Extension { union_points: replaced.len(), subspaces, union_matches })
}

/// The A-family MASAs together with the recombined planes: `p^2 + 1`
/// pairwise complementary MASAs, i.e. a complete set of MUBs (`p = 1 mod 4`).
pub fn build_extended_masa_decomposition(p: Prime, d: Option<ResidueScalar>) -> Result<Decomposition> {
    if p.mod4() != 1 {
        return Err(Error::WrongResidueClass(p.get()));
    }
    let ab = build_ab_decomposition(p, d)?;
    let d = ab.nonresidue.expect("A/B decomposition records D");
    let ext = recombine_extension(p, d)?;
    let mut subalgebras: Vec<SubalgebraDesc> = ext.subspaces.into_iter().map(SubalgebraDesc::from_subspace).collect();
    let n = p.get() as usize;
    // the A-planes sit right after the two product factors
    subalgebras.extend_from_slice(&ab.subalgebras[2..2 + n * (n - 1)]);
    Ok(Decomposition { p, family: Family::Custom, nonresidue: Some(d), subalgebras, generators: None })
}
