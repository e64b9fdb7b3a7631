use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mubcert::certify::{run_pipeline, verify_external, PipelineConfig, TOL_COMPLEMENTARITY};
use mubcert::constructions::{
    build_ab_decomposition, build_galois_decomposition, find_galois_subgroup, recombine_extension,
};
use mubcert::io::{from_json, to_json, DecompositionFile, Metadata, MubVectorsFile};
use mubcert::mub::{mub_family, unbiased_vector_search, CertificateReport, Verdict};
use mubcert::{Error, Prime, ResidueScalar};
use serde_json::json;

const EXIT_INVALID: u8 = 2;
const EXIT_BOUND_NOT_MET: u8 = 3;
const EXIT_NO_WITNESS: u8 = 4;
const EXIT_USAGE: u8 = 64;
const EXIT_FAILURE: u8 = 1;
const WITNESS_THRESHOLD: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "mubcert", version, about = "Complementary decompositions of M_p (x) M_p and MUB certificates")]
struct Cli {
    /// Print a single JSON document on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Galois,
    Ab,
}

#[derive(Subcommand)]
enum Command {
    /// Build a complete decomposition and write it as JSON.
    Decompose {
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long = "non-residue")]
        non_residue: Option<i64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a decomposition file and print the certificate report.
    Verify {
        file: PathBuf,
        /// Also run the floating-point cross-checks (any p).
        #[arg(long)]
        numeric: bool,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Strong-unextendibility verdict for a decomposition file.
    Certify { file: PathBuf },
    /// Extract the MUBs of a decomposition's MASAs.
    Mubs {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the p+1 recombined MASA planes (p = 1 mod 4).
    Extend {
        #[arg(long)]
        p: u64,
        #[arg(long = "non-residue")]
        non_residue: Option<i64>,
    },
    /// Search for a vector unbiased to every basis in a vectors file.
    SearchUnbiased {
        file: PathBuf,
        #[arg(long, default_value_t = 200)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotPrime(_)
            | Error::NotOddPrime(_)
            | Error::NoNonresidue
            | Error::NotNonresidue { .. }
            | Error::WrongResidueClass(_)
            | Error::Config(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Failure { code, message: e.to_string() }
    }
}

type CliResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    let json = cli.json;
    match cli.command {
        Command::Decompose { p, family, non_residue, seed, out } => decompose(p, family, non_residue, seed, out, json),
        Command::Verify { file, numeric, tol } => verify(&file, numeric, tol, json),
        Command::Certify { file } => certify(&file, json),
        Command::Mubs { file, out, seed } => mubs(&file, &out, seed, json),
        Command::Extend { p, non_residue } => extend(p, non_residue, json),
        Command::SearchUnbiased { file, restarts, seed } => search(&file, restarts, seed, json),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure { code: EXIT_FAILURE, message: format!("{}: {e}", path.display()) })
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure { code: EXIT_FAILURE, message: format!("{}: {e}", path.display()) })
}

fn with_path(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    }
}

fn load_decomposition(path: &Path) -> Result<mubcert::constructions::Decomposition, Failure> {
    let file: DecompositionFile = from_json(&read(path)?).map_err(with_path(path))?;
    file.to_decomposition().map_err(with_path(path))
}

fn decompose(p: u64, family: FamilyArg, non_residue: Option<i64>, seed: u64, out: Option<PathBuf>, json: bool) -> CliResult {
    let p = Prime::new(p)?;
    let dec = match family {
        FamilyArg::Ab => build_ab_decomposition(p, non_residue.map(|d| ResidueScalar::new(d, p)))?,
        FamilyArg::Galois => {
            let h = find_galois_subgroup(p, seed, None)?;
            for note in &h.notes {
                eprintln!("note: {note}");
            }
            build_galois_decomposition(p, &h)?
        }
    };
    let file = DecompositionFile::from_decomposition(&dec, Metadata::now(Some(seed)));
    let text = to_json(&file);
    eprintln!(
        "p={p} family={} subalgebras={} factors={} seed={seed}",
        dec.family,
        dec.subalgebras.len(),
        dec.factor_count()
    );
    match out {
        Some(path) => {
            write(&path, &text)?;
            if json {
                let summary = json!({
                    "out": path.display().to_string(),
                    "p": p.get(),
                    "family": dec.family,
                    "subalgebras": dec.subalgebras.len(),
                    "factors": dec.factor_count(),
                    "seed": seed,
                });
                println!("{summary}");
            }
        }
        None => println!("{text}"),
    }
    Ok(0)
}

fn print_report(report: &CertificateReport, json: bool) {
    if json {
        println!("{}", to_json(report));
        return;
    }
    println!("verdict: {:?}", report.verdict);
    println!("p: {}  family: {}", report.p, report.family);
    println!(
        "subalgebras: {}  factors: {}  bound: {}",
        report.subalgebra_count, report.factor_count, report.bound_required
    );
    for (name, ok) in &report.checks {
        let residual = report.residuals.get(name).map(|r| format!("  residual {r:e}")).unwrap_or_default();
        println!("  {name}: {}{residual}", if *ok { "pass" } else { "FAIL" });
    }
    for issue in &report.issues {
        println!("issue: {issue}");
    }
}

fn verify(path: &Path, numeric: bool, tol: Option<f64>, json: bool) -> CliResult {
    let dec = load_decomposition(path)?;
    let mut cfg = PipelineConfig::new(dec.p, dec.family);
    cfg.numeric_enabled = numeric;
    cfg.force_numeric = numeric;
    if let Some(t) = tol {
        cfg.tolerances.insert(TOL_COMPLEMENTARITY.into(), t);
    }
    let report = if numeric {
        cfg.decomposition = Some(dec);
        let (_, _, mut report) = run_pipeline(&cfg)?;
        report.provenance.insert("source".into(), "external".into());
        report
    } else {
        verify_external(&dec)
    };
    print_report(&report, json);
    Ok(if report.verdict == Verdict::Invalid { EXIT_INVALID } else { 0 })
}

fn certify(path: &Path, json: bool) -> CliResult {
    let report = verify_external(&load_decomposition(path)?);
    print_report(&report, json);
    Ok(match report.verdict {
        Verdict::StronglyUnextendible => 0,
        Verdict::BoundNotMet => EXIT_BOUND_NOT_MET,
        Verdict::Invalid => EXIT_INVALID,
    })
}

fn mubs(path: &Path, out: &Path, seed: u64, json: bool) -> CliResult {
    let dec = load_decomposition(path)?;
    if verify_external(&dec).verdict == Verdict::Invalid {
        eprintln!("warning: {} does not verify; extracting its MASAs anyway", path.display());
    }
    let family = mub_family(&dec, seed)?;
    write(out, &to_json(&MubVectorsFile::from_family(&family, Some(seed))))?;
    eprintln!("bases={} dimension={} seed={seed}", family.bases.len(), family.dimension());
    if json {
        let summary = json!({
            "out": out.display().to_string(),
            "bases": family.bases.len(),
            "dimension": family.dimension(),
            "seed": seed,
        });
        println!("{summary}");
    }
    Ok(0)
}

fn extend(p: u64, non_residue: Option<i64>, json: bool) -> CliResult {
    let p = Prime::new(p)?;
    if !p.is_odd() || p.mod4() != 1 {
        return Err(Error::WrongResidueClass(p.get()).into());
    }
    let d = match non_residue {
        Some(d) => ResidueScalar::new(d, p),
        None => mubcert::residue::smallest_nonresidue(p)?,
    };
    let ext = recombine_extension(p, d)?;
    if json {
        let planes: Vec<_> = ext.subspaces.iter().map(|s| s.rows()).collect();
        let doc = json!({
            "p": p.get(),
            "nonresidue": d.value(),
            "subspaces": planes,
            "union_points": ext.union_points,
            "union_matches": ext.union_matches,
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
    } else {
        for s in &ext.subspaces {
            println!("{s}");
        }
        eprintln!(
            "p={p} D={} planes={} union_points={} union_matches={}",
            d.value(),
            ext.subspaces.len(),
            ext.union_points,
            ext.union_matches
        );
    }
    Ok(0)
}

fn search(path: &Path, restarts: usize, seed: u64, json: bool) -> CliResult {
    let file: MubVectorsFile = from_json(&read(path)?).map_err(with_path(path))?;
    let family = file.to_family().map_err(with_path(path))?;
    let res = unbiased_vector_search(&family, restarts, seed);
    let witness = res.best_residual < WITNESS_THRESHOLD;
    if json {
        let v = res.best_vector.amplitudes();
        let doc = json!({
            "best_residual": res.best_residual,
            "witness": witness,
            "restarts": res.restarts,
            "seed": res.seed,
            "best_vector": { "re": v.iter().map(|z| z.re).collect::<Vec<_>>(), "im": v.iter().map(|z| z.im).collect::<Vec<_>>() },
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
    } else {
        println!("best_residual: {:e}", res.best_residual);
        println!("witness: {witness}");
        println!("restarts: {}", res.restarts);
        println!("seed: {}", res.seed);
    }
    Ok(if witness { 0 } else { EXIT_NO_WITNESS })
}
