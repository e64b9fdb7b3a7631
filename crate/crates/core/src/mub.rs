//! Mutually unbiased bases from MASAs, the pure-state overlap bound, span
//! bounds, unextendibility certificates and a numerical search for vectors
//! unbiased to a family of bases.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{pairwise_overlaps, subgroup_closure, Decomposition, Family};
use crate::error::{Error, Result};
use crate::residue::{Gl2Matrix, Prime, Subspace2};
use crate::subalgebra::{classify, has_order_p, phi, SubalgebraDesc, SubalgebraKind};
use crate::weyl::{self, ComplexMatrix, ComplexVector, PureState};

/// Max eigenvector residual `|W v - λ v|` accepted by [`masa_eigenbasis`].
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-8;
const SPLIT_ATTEMPTS: usize = 16;
const MIN_EIGEN_GAP: f64 = 1e-6;

/// Orthonormal bases of `C^{p^2}`, one per source MASA, stored as the
/// columns of unitary matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct MubFamily {
    pub p: Prime,
    pub bases: Vec<ComplexMatrix>,
    pub source_masas: Vec<SubalgebraDesc>,
}

impl MubFamily {
    pub fn dimension(&self) -> usize {
        let n = self.p.get() as usize;
        n * n
    }
}

fn hermitian_parts(w: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let adj = w.adjoint();
    let re = (w + &adj) * Complex64::new(0.5, 0.0);
    let im = (w - &adj) * Complex64::new(0.0, -0.5);
    (re, im)
}

/// Position of `λ` among the `2p`-th roots of unity. Every tensor Weyl
/// operator satisfies `W^p = ±I`, so its spectrum lies there.
fn root_index(lambda: Complex64, p: Prime) -> u32 {
    let m = 2 * p.get();
    let k = (lambda.arg() / (2.0 * PI) * m as f64).round() as i64;
    k.rem_euclid(m as i64) as u32
}

/// A common eigenbasis of the MASA `π(S)`: columns sorted by the joint
/// eigenvalues of the two echelon generators, each with its first
/// significant amplitude real and positive.
///
/// The generators are split by one eigendecomposition of a random real
/// combination of their Hermitian and anti-Hermitian parts; degenerate or
/// unverifiable splits are retried with fresh coefficients.
pub fn masa_eigenbasis(s: &SubalgebraDesc, seed: u64) -> Result<ComplexMatrix> {
    if classify(&s.subspace) != SubalgebraKind::Masa {
        return Err(Error::NotAMasa);
    }
    let p = s.subspace.modulus();
    let [r0, r1] = s.subspace.basis();
    let gens = [weyl::weyl_tensor(&r0), weyl::weyl_tensor(&r1)];
    let parts: Vec<ComplexMatrix> = gens
        .iter()
        .flat_map(|g| {
            let (a, b) = hermitian_parts(g);
            [a, b]
        })
        .collect();
    let dim = gens[0].nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    'attempt: for _ in 0..SPLIT_ATTEMPTS {
        let mut h = ComplexMatrix::zeros(dim, dim);
        for part in &parts {
            let coeff: f64 = rng.random_range(-1.0..1.0);
            h += part * Complex64::new(coeff, 0.0);
        }
        let eig = SymmetricEigen::new(h);
        let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        values.sort_by(f64::total_cmp);
        if values.windows(2).any(|w| w[1] - w[0] < MIN_EIGEN_GAP) {
            continue;
        }

        let mut columns: Vec<((u32, u32), ComplexVector)> = Vec::with_capacity(dim);
        for col in eig.eigenvectors.column_iter() {
            let v: ComplexVector = col.into_owned();
            let mut key = [0u32; 2];
            for (k, g) in gens.iter().enumerate() {
                let gv = g * &v;
                let lambda = v.dotc(&gv);
                if (gv - &v * lambda).norm() > EIGEN_RESIDUAL_TOL {
                    continue 'attempt;
                }
                key[k] = root_index(lambda, p);
            }
            columns.push(((key[0], key[1]), normalize_phase(v)));
        }
        columns.sort_by_key(|(key, _)| *key);
        if columns.windows(2).any(|w| w[0].0 == w[1].0) {
            continue;
        }
        let cols: Vec<ComplexVector> = columns.into_iter().map(|(_, v)| v).collect();
        return Ok(ComplexMatrix::from_columns(&cols));
    }
    Err(Error::DegenerateSplit(SPLIT_ATTEMPTS))
}

fn normalize_phase(v: ComplexVector) -> ComplexVector {
    let lead = v.iter().copied().find(|z| z.norm() > 1e-6).unwrap_or(Complex64::new(1.0, 0.0));
    let phase = lead.conj() / lead.norm();
    let norm = v.norm();
    v * (phase / norm)
}

/// Eigenbases of every MASA of the decomposition. MASA `k` uses seed
/// `seed + k`.
pub fn mub_family(dec: &Decomposition, seed: u64) -> Result<MubFamily> {
    let masas: Vec<SubalgebraDesc> = dec
        .subalgebras
        .iter()
        .filter(|s| classify(&s.subspace) == SubalgebraKind::Masa)
        .copied()
        .collect();
    mub_family_from_masas(dec.p, &masas, seed)
}

pub fn mub_family_from_masas(p: Prime, masas: &[SubalgebraDesc], seed: u64) -> Result<MubFamily> {
    let bases = masas
        .par_iter()
        .enumerate()
        .map(|(k, s)| masa_eigenbasis(s, seed.wrapping_add(k as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MubFamily { p, bases, source_masas: masas.to_vec() })
}

/// `max_{i,j} | |<f_i|g_j>|^2 - 1/d |` against `tol`.
pub fn unbiasedness_check(b1: &ComplexMatrix, b2: &ComplexMatrix, tol: f64) -> Result<(bool, f64)> {
    if b1.nrows() != b2.nrows() {
        return Err(Error::DimensionMismatch(b1.nrows(), b2.nrows()));
    }
    let d = b1.nrows() as f64;
    let gram = b1.adjoint() * b2;
    let dev = gram.iter().map(|z| (z.norm_sqr() - 1.0 / d).abs()).fold(0.0, f64::max);
    Ok((dev <= tol, dev))
}

/// Worst deviation over all pairs of bases in the family.
pub fn family_unbiasedness(family: &MubFamily) -> f64 {
    let n = family.bases.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| unbiasedness_check(&family.bases[i], &family.bases[j], 0.0).map(|r| r.1).unwrap_or(f64::INFINITY))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// `<h| E_F(|h><h|) |h>` for a factor `F = π(S)`, evaluated as
/// `Σ_{u ∈ S} |<h|W_u|h>|^2 / p^2`. Lies in `[1/p^2, 1/p]`.
pub fn pure_overlap(h: &PureState, s: &SubalgebraDesc) -> Result<f64> {
    if !classify(&s.subspace).is_factor() {
        return Err(Error::NotAFactor);
    }
    let n = s.subspace.modulus().get() as usize;
    if h.dim() != n * n {
        return Err(Error::DimensionMismatch(h.dim(), n * n));
    }
    let v = h.amplitudes();
    let total: f64 = s
        .subspace
        .points()
        .iter()
        .map(|u| v.dotc(&weyl::weyl_apply(u, v)).norm_sqr())
        .sum();
    Ok(total / (n * n) as f64)
}

/// Least `k` with `k >= d + (d-1)/(n-1)`: the number of pairwise
/// complementary `M_n`-factors of `M_d (x) M_n` needed before their span
/// can contain a pure state.
pub fn factor_span_bound(d: u64, n: u64) -> u64 {
    assert!(d >= 2 && n >= 2, "factor_span_bound needs d, n >= 2");
    d + (d - 1).div_ceil(n - 1)
}

/// Number of pairwise complementary MASAs needed before their span can
/// contain an `M_n`-factor.
pub fn masa_span_bound(n: u64) -> u64 {
    assert!(n >= 2, "masa_span_bound needs n >= 2");
    n + 1
}

/// `Tr(E_A E_C) = Σ |<a, c>|^2` for HS-orthonormal bases of `A` and `C`.
pub fn trace_overlap(a: &[ComplexMatrix], c: &[ComplexMatrix]) -> f64 {
    a.iter()
        .flat_map(|x| c.iter().map(move |y| weyl::hs_inner(x, y).expect("equal dimensions").norm_sqr()))
        .sum()
}

/// HS-orthonormal basis of the MASA diagonal in the columns of `u`.
pub fn masa_projectors(u: &ComplexMatrix) -> Vec<ComplexMatrix> {
    u.column_iter().map(|c| c * c.adjoint()).collect()
}

/// HS-orthonormal basis of `π(S)`.
pub fn normalized_weyl_basis(s: &SubalgebraDesc) -> Vec<ComplexMatrix> {
    let n = s.subspace.modulus().get() as f64;
    weyl::materialize(s).into_iter().map(|w| w / Complex64::new(n, 0.0)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    StronglyUnextendible,
    BoundNotMet,
    Invalid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateReport {
    pub format_version: String,
    pub p: u32,
    pub family: Family,
    pub subalgebra_count: usize,
    pub factor_count: usize,
    pub bound_required: u64,
    pub verdict: Verdict,
    /// Pass/fail per named check.
    pub checks: BTreeMap<String, bool>,
    /// Worst residual per named check; exact checks report counts of failures.
    pub residuals: BTreeMap<String, f64>,
    pub issues: Vec<String>,
    pub provenance: BTreeMap<String, String>,
}

/// Symbolic certificate: the subalgebras must form a complete complementary
/// decomposition, and fewer than `p + 1` of them may be factors. Stored kind
/// tags and GL2 representatives are recomputed, never trusted.
pub fn certify_strong_unextendibility(dec: &Decomposition) -> CertificateReport {
    let p = dec.p;
    let mut checks = BTreeMap::new();
    let mut residuals = BTreeMap::new();
    let mut issues = Vec::new();

    let mut modulus_ok = true;
    for (k, s) in dec.subalgebras.iter().enumerate() {
        if s.subspace.modulus() != p {
            modulus_ok = false;
            issues.push(format!("subalgebra {k} is over Z_{} instead of Z_{p}", s.subspace.modulus()));
        }
    }
    checks.insert("modulus".into(), modulus_ok);

    let count_ok = dec.subalgebras.len() == dec.complete_size();
    if !count_ok {
        issues.push(format!(
            "{} subalgebras, a complete decomposition has {}",
            dec.subalgebras.len(),
            dec.complete_size()
        ));
    }
    checks.insert("count".into(), count_ok);

    let mut tags_ok = true;
    let mut factor_count = 0;
    for (k, s) in dec.subalgebras.iter().enumerate() {
        let kind = classify(&s.subspace);
        if kind.is_factor() {
            factor_count += 1;
        }
        if kind != s.kind {
            tags_ok = false;
            issues.push(format!("subalgebra {k} {} tagged {:?}, reclassified as {kind:?}", s.subspace, s.kind));
        }
        if let Some(m) = s.gl2_rep {
            if m.modulus() != s.subspace.modulus() || phi(&m) != s.subspace {
                tags_ok = false;
                issues.push(format!("subalgebra {k}: phi({m}) does not match {}", s.subspace));
            }
        }
    }
    checks.insert("kind_tags".into(), tags_ok);

    if matches!(dec.family, Family::Galois | Family::Ab) {
        let has = |t: Subspace2| dec.subalgebras.iter().filter(|s| s.subspace == t).count() == 1;
        let ok = has(Subspace2::f0(p)) && has(Subspace2::f1(p));
        if !ok {
            issues.push("product factors M_p (x) I and I (x) M_p must each appear once".into());
        }
        checks.insert("product_factors".into(), ok);
    }

    if let Some(gens) = &dec.generators {
        let ok = generators_match(dec, gens);
        if !ok {
            issues.push("stored generators do not close to an order p^2 - 1 subgroup labelling the MASAs".into());
        }
        checks.insert("subgroup_generators".into(), ok);
    }

    let planes: Vec<Subspace2> = dec.subalgebras.iter().map(|s| s.subspace).collect();
    let overlaps = if modulus_ok { pairwise_overlaps(&planes) } else { Vec::new() };
    for (i, j) in overlaps.iter().take(10) {
        issues.push(format!("subalgebras {i} {} and {j} {} intersect nontrivially", planes[*i], planes[*j]));
    }
    if overlaps.len() > 10 {
        issues.push(format!("... {} overlapping pairs in total", overlaps.len()));
    }
    checks.insert("pairwise_complementary".into(), modulus_ok && overlaps.is_empty());
    residuals.insert("pairwise_overlap_count".into(), overlaps.len() as f64);

    let bound = factor_span_bound(p.get() as u64, p.get() as u64);
    let valid = checks.values().all(|&ok| ok);
    let verdict = if !valid {
        Verdict::Invalid
    } else if (factor_count as u64) < bound {
        Verdict::StronglyUnextendible
    } else {
        Verdict::BoundNotMet
    };
    checks.insert("factor_bound".into(), (factor_count as u64) < bound);

    CertificateReport {
        format_version: "1".into(),
        p: p.get(),
        family: dec.family,
        subalgebra_count: dec.subalgebras.len(),
        factor_count,
        bound_required: bound,
        verdict,
        checks,
        residuals,
        issues,
        provenance: BTreeMap::new(),
    }
}

/// The closure of `gens` is an order `p^2 - 1` subgroup of SL2(p) without
/// elements of order `p`, and its `φ`-images are exactly the MASAs.
fn generators_match(dec: &Decomposition, gens: &[Gl2Matrix]) -> bool {
    let p = dec.p;
    let n = p.get() as usize;
    if gens.is_empty() || gens.iter().any(|g| g.modulus() != p || !g.is_sl2()) {
        return false;
    }
    let group = subgroup_closure(gens);
    if group.len() != n * n - 1 || group.iter().any(|g| has_order_p(g).unwrap_or(true)) {
        return false;
    }
    let labelled: BTreeSet<Subspace2> = group.iter().map(phi).collect();
    let masas: BTreeSet<Subspace2> = dec
        .subalgebras
        .iter()
        .map(|s| s.subspace)
        .filter(|s| s.modulus() == p && classify(s) == SubalgebraKind::Masa)
        .collect();
    labelled == masas
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub best_vector: PureState,
    pub best_residual: f64,
    pub restarts: usize,
    pub seed: u64,
}

pub const SEARCH_ITERATIONS: usize = 500;
/// Restarts run in parallel chunks of this size; the search stops after
/// the first chunk whose best residual drops below [`SEARCH_EARLY_STOP`].
pub const SEARCH_CHUNK: usize = 16;
pub const SEARCH_EARLY_STOP: f64 = 1e-12;

/// `R(v) = Σ_bases Σ_i (|<b_i|v>|^2 - 1/d)^2` and its Wirtinger gradient
/// `∂R/∂v̄ = Σ 2 (|<b_i|v>|^2 - 1/d) <b_i|v> b_i`.
fn residual_and_gradient(bases: &[ComplexMatrix], v: &ComplexVector) -> (f64, ComplexVector) {
    let d = v.len() as f64;
    let mut r = 0.0;
    let mut grad = ComplexVector::zeros(v.len());
    for b in bases {
        let mut c = b.ad_mul(v);
        for z in c.iter_mut() {
            let dev = z.norm_sqr() - 1.0 / d;
            r += dev * dev;
            *z *= 2.0 * dev;
        }
        grad += b * c;
    }
    (r, grad)
}

pub fn unbiased_residual(bases: &[ComplexMatrix], v: &ComplexVector) -> f64 {
    residual_and_gradient(bases, v).0
}

fn descend(bases: &[ComplexMatrix], mut v: ComplexVector) -> (f64, ComplexVector) {
    let d = v.len() as f64;
    // the curvature of R scales like the number of bases over d
    let base_step = 0.5 * d / bases.len().max(1) as f64;
    let mut best = (f64::INFINITY, v.clone());
    for it in 0..SEARCH_ITERATIONS {
        let (r, mut g) = residual_and_gradient(bases, &v);
        if r < best.0 {
            best = (r, v.clone());
        }
        let radial = v.dotc(&g);
        g -= &v * radial;
        let step = if it < SEARCH_ITERATIONS / 2 { base_step } else { 0.5 * base_step };
        v -= g * Complex64::new(step, 0.0);
        let norm = v.norm();
        v /= Complex64::new(norm, 0.0);
    }
    let r = unbiased_residual(bases, &v);
    if r < best.0 {
        best = (r, v);
    }
    best
}

/// Projected gradient descent on the unit sphere from `restarts` random
/// starts. Restart `k` draws its start from a stream seeded by `seed` and
/// `k`, so the result depends only on `(seed, restarts)`.
pub fn unbiased_vector_search(family: &MubFamily, restarts: usize, seed: u64) -> SearchResult {
    let dim = family.dimension();
    search_bases(&family.bases, dim, restarts, seed)
}

pub fn search_bases(bases: &[ComplexMatrix], dim: usize, restarts: usize, seed: u64) -> SearchResult {
    let restarts = restarts.max(1);
    let mut best: Option<(f64, ComplexVector)> = None;
    let mut done = 0;
    while done < restarts {
        let chunk = SEARCH_CHUNK.min(restarts - done);
        let runs: Vec<(f64, ComplexVector)> = (done..done + chunk)
            .into_par_iter()
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k as u64);
                let start = PureState::random(dim, &mut rng);
                descend(bases, start.amplitudes().clone())
            })
            .collect();
        done += chunk;
        for run in runs {
            if best.as_ref().is_none_or(|b| run.0 < b.0) {
                best = Some(run);
            }
        }
        if best.as_ref().is_some_and(|b| b.0 < SEARCH_EARLY_STOP) {
            break;
        }
    }
    let (best_residual, v) = best.expect("at least one restart");
    SearchResult { best_vector: PureState::normalized(v), best_residual, restarts: done, seed }
}

/// Product-state helper: the MASA of `Z (x) I`, `I (x) Z`.
pub fn computational_masa(p: Prime) -> SubalgebraDesc {
    SubalgebraDesc::from_subspace(
        Subspace2::from_rows([[0, 1, 0, 0], [0, 0, 0, 1]], p).expect("independent rows"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions;
    use crate::weyl::{max_abs_diff, unitarity_defect};

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn fourier(d: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(d, d, |j, k| {
            Complex64::from_polar(1.0 / (d as f64).sqrt(), 2.0 * PI * (j * k) as f64 / d as f64)
        })
    }

    #[test]
    fn computational_masa_gives_standard_basis() {
        let u = masa_eigenbasis(&computational_masa(p(3)), 0).unwrap();
        // a permutation matrix up to phases
        for col in u.column_iter() {
            let big: Vec<f64> = col.iter().map(|z| z.norm()).filter(|x| *x > 1e-9).collect();
            assert_eq!(big.len(), 1);
            assert!((big[0] - 1.0).abs() < 1e-12);
        }
        assert!(unitarity_defect(&u) < 1e-10);
    }

    #[test]
    fn eigenbasis_rejects_factors() {
        let f0 = SubalgebraDesc::product_factor0(p(3));
        assert_eq!(masa_eigenbasis(&f0, 0), Err(Error::NotAMasa));
    }

    #[test]
    fn eigenbasis_is_deterministic_and_verified() {
        let dec = constructions::build_ab_decomposition(p(3), None).unwrap();
        for s in dec.masas() {
            let u = masa_eigenbasis(s, 5).unwrap();
            assert_eq!(u, masa_eigenbasis(s, 5).unwrap());
            assert!(unitarity_defect(&u) < 1e-10);
            for w in weyl::materialize(s) {
                for col in u.column_iter() {
                    let v: ComplexVector = col.into_owned();
                    let wv = &w * &v;
                    let lambda = v.dotc(&wv);
                    assert!((wv - &v * lambda).norm() < EIGEN_RESIDUAL_TOL);
                }
            }
        }
    }

    #[test]
    fn galois_p2_vectors_are_maximally_entangled() {
        let h = constructions::find_galois_subgroup(p(2), 0, None).unwrap();
        let dec = constructions::build_galois_decomposition(p(2), &h).unwrap();
        let fam = mub_family(&dec, 0).unwrap();
        assert_eq!(fam.bases.len(), 3);
        let half = weyl::identity(2) * Complex64::new(0.5, 0.0);
        for b in &fam.bases {
            assert_eq!(b.ncols(), 4);
            for col in b.column_iter() {
                let state = PureState::new(col.into_owned()).unwrap();
                let rho = weyl::partial_trace_2(&state.projector(), 2, 2).unwrap();
                assert!(max_abs_diff(&rho, &half) < 1e-10);
            }
        }
        assert!(family_unbiasedness(&fam) < 1e-10);
    }

    #[test]
    fn unbiasedness_examples() {
        let id = weyl::identity(4);
        let (ok, dev) = unbiasedness_check(&id, &fourier(4), 1e-12).unwrap();
        assert!(ok && dev < 1e-14);
        let (ok, dev) = unbiasedness_check(&id, &id, 1e-12).unwrap();
        assert!(!ok && (dev - 0.75).abs() < 1e-15);
        assert_eq!(unbiasedness_check(&id, &fourier(3), 1e-9), Err(Error::DimensionMismatch(4, 3)));
    }

    /// `Σ_ij |<h_i|h_j>|^2 / p` with `h = Σ_i e_i (x) h_i`.
    fn overlap_oracle(h: &PureState, n: usize) -> f64 {
        let v = h.amplitudes();
        let blocks: Vec<ComplexVector> = (0..n).map(|i| v.rows(i * n, n).into_owned()).collect();
        let mut total = 0.0;
        for a in &blocks {
            for b in &blocks {
                total += a.dotc(b).norm_sqr();
            }
        }
        total / n as f64
    }

    #[test]
    fn pure_overlap_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in [2u64, 3, 5] {
            let q = p(n);
            let k = n as usize;
            let f1 = SubalgebraDesc::product_factor1(q);
            let sep = PureState::product_basis(k, k, 0, 0);
            assert!((pure_overlap(&sep, &f1).unwrap() - 1.0 / n as f64).abs() < 1e-12);
            let ent = PureState::normalized(ComplexVector::from_fn(k * k, |idx, _| {
                if idx / k == idx % k { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
            }));
            let expected = 1.0 / (n * n) as f64;
            assert!((pure_overlap(&ent, &f1).unwrap() - expected).abs() < 1e-12);
            assert!((overlap_oracle(&ent, k) - expected).abs() < 1e-12);
            for _ in 0..50 {
                let h = PureState::random(k * k, &mut rng);
                let v = pure_overlap(&h, &f1).unwrap();
                assert!((v - overlap_oracle(&h, k)).abs() < 1e-12);
                let via_expectation = h
                    .amplitudes()
                    .dotc(&(weyl::conditional_expectation_second_factor(&h.projector(), k, k).unwrap() * h.amplitudes()))
                    .re;
                assert!((v - via_expectation).abs() < 1e-12);
                assert!(v <= 1.0 / n as f64 + 1e-12 && v >= expected - 1e-12);
            }
        }
        let masa = computational_masa(p(3));
        assert_eq!(pure_overlap(&PureState::product_basis(3, 3, 0, 0), &masa), Err(Error::NotAFactor));
    }

    #[test]
    fn masa_vectors_sum_to_trace_overlap() {
        let dec = constructions::build_ab_decomposition(p(3), None).unwrap();
        let f0 = &dec.subalgebras[0];
        for s in dec.masas().take(3) {
            let u = masa_eigenbasis(s, 1).unwrap();
            let total: f64 = u
                .column_iter()
                .map(|c| pure_overlap(&PureState::new(c.into_owned()).unwrap(), f0).unwrap())
                .sum();
            let tr = trace_overlap(&normalized_weyl_basis(f0), &masa_projectors(&u));
            assert!((total - 1.0).abs() < 1e-9);
            assert!((tr - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn bounds() {
        assert_eq!(factor_span_bound(2, 2), 3);
        assert_eq!(factor_span_bound(2, 4), 3);
        for n in [2, 3, 5, 7, 11, 13] {
            assert_eq!(factor_span_bound(n, n), n + 1);
            assert_eq!(masa_span_bound(n), n + 1);
        }
        assert_eq!(masa_span_bound(2), 3);
        assert_eq!(masa_span_bound(3), 4);
        // brute force: least integer k with k (n - 1) >= d (n - 1) + d - 1
        for d in 2..20u64 {
            for n in 2..20u64 {
                let k = (1..).find(|k| k * (n - 1) >= d * (n - 1) + d - 1).unwrap();
                assert_eq!(factor_span_bound(d, n), k);
            }
        }
    }

    #[test]
    fn certificate_verdicts() {
        let ab7 = constructions::build_ab_decomposition(p(7), None).unwrap();
        let r = certify_strong_unextendibility(&ab7);
        assert_eq!(r.verdict, Verdict::StronglyUnextendible);
        assert_eq!((r.factor_count, r.bound_required), (6, 8));
        let ab5 = constructions::build_ab_decomposition(p(5), None).unwrap();
        let r = certify_strong_unextendibility(&ab5);
        assert_eq!(r.verdict, Verdict::BoundNotMet);
        assert_eq!((r.factor_count, r.bound_required), (6, 6));
    }

    #[test]
    fn certificate_catches_tampering() {
        let mut dec = constructions::build_ab_decomposition(p(3), None).unwrap();
        dec.subalgebras[4] = dec.subalgebras[3];
        let r = certify_strong_unextendibility(&dec);
        assert_eq!(r.verdict, Verdict::Invalid);
        assert!(r.issues.iter().any(|i| i.contains("subalgebras 3") && i.contains("and 4")));
        assert!(!r.checks["pairwise_complementary"]);

        let mut dec = constructions::build_ab_decomposition(p(3), None).unwrap();
        dec.subalgebras[3].kind = SubalgebraKind::Factor;
        let r = certify_strong_unextendibility(&dec);
        assert_eq!(r.verdict, Verdict::Invalid);
        assert!(r.issues.iter().any(|i| i.contains("reclassified as Masa")));
    }

    #[test]
    fn certificate_checks_stored_generators() {
        let h = constructions::find_galois_subgroup(p(3), 0, None).unwrap();
        let mut dec = constructions::build_galois_decomposition(p(3), &h).unwrap();
        let r = certify_strong_unextendibility(&dec);
        assert_eq!(r.verdict, Verdict::StronglyUnextendible);
        assert!(r.checks["subgroup_generators"]);
        dec.generators = Some(vec![Gl2Matrix::new([[1, 1], [0, 1]], p(3)).unwrap()]);
        let r = certify_strong_unextendibility(&dec);
        assert_eq!(r.verdict, Verdict::Invalid);
    }

    #[test]
    fn search_finds_witness_for_single_basis() {
        let basis = weyl::identity(4);
        let res = search_bases(&[basis], 4, 4, 3);
        assert!(res.best_residual < 1e-8, "{}", res.best_residual);
        let again = search_bases(&[weyl::identity(4)], 4, 4, 3);
        assert_eq!(res.best_residual.to_bits(), again.best_residual.to_bits());
    }
}
