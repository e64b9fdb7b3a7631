//! End-to-end pipelines: build a decomposition, certify it symbolically,
//! optionally cross-check numerically and extract the MUBs.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::constructions::{
    build_ab_decomposition, build_galois_decomposition, find_galois_subgroup_with_budget, recombine_extension,
    Decomposition, Family, DEFAULT_SEARCH_BUDGET,
};
use crate::error::{Error, Result};
use crate::mub::{
    certify_strong_unextendibility, family_unbiasedness, masa_eigenbasis, mub_family, search_bases,
    unbiased_residual, CertificateReport, MubFamily,
};
use crate::residue::{Prime, ResidueScalar};
use crate::subalgebra::SubalgebraDesc;
use crate::weyl::{self, ComplexVector};

pub const TOL_COMPLEMENTARITY: &str = "complementarity";
pub const TOL_UNBIASEDNESS: &str = "unbiasedness";
pub const TOL_WITNESS: &str = "witness";

/// Largest `p` for which the numeric layer runs unless forced.
pub const NUMERIC_AUTO_MAX_P: u32 = 7;

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub p: Prime,
    pub family: Family,
    pub nonresidue: Option<ResidueScalar>,
    /// Certify this decomposition instead of building one.
    pub decomposition: Option<Decomposition>,
    pub seed: u64,
    pub numeric_enabled: bool,
    /// Run the numeric layer even above [`NUMERIC_AUTO_MAX_P`].
    pub force_numeric: bool,
    pub tolerances: BTreeMap<String, f64>,
    pub attempt_budget: u64,
    /// Restarts for the unbiased-vector search; 0 skips it.
    pub search_restarts: usize,
}

impl PipelineConfig {
    pub fn new(p: Prime, family: Family) -> Self {
        let tolerances = BTreeMap::from([
            (TOL_COMPLEMENTARITY.to_string(), weyl::DEFAULT_TOLERANCE),
            (TOL_UNBIASEDNESS.to_string(), 1e-9),
            (TOL_WITNESS.to_string(), 1e-6),
        ]);
        PipelineConfig {
            p,
            family,
            nonresidue: None,
            decomposition: None,
            seed: 0,
            numeric_enabled: true,
            force_numeric: false,
            tolerances,
            attempt_budget: DEFAULT_SEARCH_BUDGET,
            search_restarts: 0,
        }
    }

    pub fn numeric_active(&self) -> bool {
        self.numeric_enabled && (self.p.get() <= NUMERIC_AUTO_MAX_P || self.force_numeric)
    }

    pub fn tolerance(&self, key: &str) -> f64 {
        self.tolerances[key]
    }

    fn validate(&self) -> Result<()> {
        for key in [TOL_COMPLEMENTARITY, TOL_UNBIASEDNESS, TOL_WITNESS] {
            match self.tolerances.get(key) {
                Some(t) if *t > 0.0 && t.is_finite() => {}
                Some(t) => return Err(Error::Config(format!("tolerance {key} must be positive, got {t}"))),
                None => return Err(Error::Config(format!("missing tolerance {key}"))),
            }
        }
        if let Some(d) = &self.decomposition {
            if d.p != self.p {
                return Err(Error::Config(format!("decomposition is over p = {}, config says {}", d.p, self.p)));
            }
        }
        Ok(())
    }
}

fn build(cfg: &PipelineConfig) -> Result<(Decomposition, BTreeMap<String, String>)> {
    let mut prov = BTreeMap::new();
    if let Some(d) = &cfg.decomposition {
        prov.insert("source".into(), "supplied".into());
        return Ok((d.clone(), prov));
    }
    prov.insert("source".into(), "built".into());
    let dec = match cfg.family {
        Family::Ab => build_ab_decomposition(cfg.p, cfg.nonresidue)?,
        Family::Galois => {
            let h = find_galois_subgroup_with_budget(cfg.p, cfg.seed, None, cfg.attempt_budget)?;
            prov.insert("subgroup_attempts".into(), h.attempts.to_string());
            for (k, note) in h.notes.iter().enumerate() {
                prov.insert(format!("subgroup_note_{k}"), note.clone());
            }
            build_galois_decomposition(cfg.p, &h)?
        }
        Family::Custom => return Err(Error::Config("the custom family needs a supplied decomposition".into())),
    };
    Ok((dec, prov))
}

/// Build (or take) a decomposition, certify it and, when the numeric layer
/// is active, cross-check complementarity and unbiasedness in floating point.
/// The verdict always comes from the exact layer.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<(Decomposition, Option<MubFamily>, CertificateReport)> {
    cfg.validate()?;
    let (dec, prov) = build(cfg)?;
    let mut report = certify_strong_unextendibility(&dec);
    report.provenance = prov;
    report.provenance.insert("seed".into(), cfg.seed.to_string());
    report.provenance.insert("tool_version".into(), env!("CARGO_PKG_VERSION").into());
    report.provenance.insert("numeric".into(), cfg.numeric_active().to_string());

    if !cfg.numeric_active() || report.verdict == crate::mub::Verdict::Invalid {
        return Ok((dec, None, report));
    }

    let tol = cfg.tolerance(TOL_COMPLEMENTARITY);
    let (agree, worst) = numeric_agreement(&dec.subalgebras, tol);
    report.checks.insert("numeric_complementarity".into(), agree);
    report.residuals.insert("numeric_complementarity".into(), worst);

    let family = mub_family(&dec, cfg.seed)?;
    let dev = family_unbiasedness(&family);
    report.checks.insert("numeric_unbiasedness".into(), dev < cfg.tolerance(TOL_UNBIASEDNESS));
    report.residuals.insert("numeric_unbiasedness".into(), dev);

    if dec.family == Family::Ab && dec.p.mod4() == 1 {
        let r = extension_witness_residual(&dec, &family, cfg.seed)?;
        report.checks.insert("extension_witness".into(), r < cfg.tolerance(TOL_WITNESS));
        report.residuals.insert("extension_witness".into(), r);
    }
    if cfg.search_restarts > 0 {
        let res = search_bases(&family.bases, family.dimension(), cfg.search_restarts, cfg.seed);
        report.checks.insert("unbiased_search_witness".into(), res.best_residual < cfg.tolerance(TOL_WITNESS));
        report.residuals.insert("unbiased_search".into(), res.best_residual);
        report.provenance.insert("search_restarts".into(), res.restarts.to_string());
    }
    Ok((dec, Some(family), report))
}

/// Whether the numeric complementarity verdict of every pair matches the
/// exact one, and the worst residual seen on pairs that are exactly
/// complementary.
pub fn numeric_agreement(subalgebras: &[SubalgebraDesc], tol: f64) -> (bool, f64) {
    let ops: Vec<_> = subalgebras.par_iter().map(weyl::materialize).collect();
    let n = subalgebras.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    pairs
        .par_iter()
        .map(|&(i, j)| {
            let exact = crate::residue::intersect_trivially(&subalgebras[i].subspace, &subalgebras[j].subspace)
                .unwrap_or(false);
            let (numeric, res) = weyl::complementary_bases(&ops[i], &ops[j], tol);
            (exact == numeric, if exact { res } else { 0.0 })
        })
        .reduce(|| (true, 0.0), |a, b| (a.0 && b.0, a.1.max(b.1)))
}

/// Residual of the first eigenvector of a recombined MASA against the
/// family: a vector unbiased to every basis, witnessing extendibility.
fn extension_witness_residual(dec: &Decomposition, family: &MubFamily, seed: u64) -> Result<f64> {
    let d = dec.nonresidue.ok_or_else(|| Error::Config("A/B decomposition without non-residue".into()))?;
    let ext = recombine_extension(dec.p, d)?;
    let u = masa_eigenbasis(&SubalgebraDesc::from_subspace(ext.subspaces[0]), seed)?;
    let v: ComplexVector = u.column(0).into_owned();
    Ok(unbiased_residual(&family.bases, &v))
}

/// Re-runs every symbolic check on an imported decomposition; stored kind
/// tags and representatives are recomputed rather than trusted.
pub fn verify_external(dec: &Decomposition) -> CertificateReport {
    let mut report = certify_strong_unextendibility(dec);
    report.provenance.insert("source".into(), "external".into());
    report
}
