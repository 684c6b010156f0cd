use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use gibbs_ground::classical::metropolis::metropolis_run;
use gibbs_ground::classical::metropolis::Estimate;
use gibbs_ground::config::{parse_config, RunConfig};
use gibbs_ground::spectral::EigenOptions;
use gibbs_ground::verify::{
    check_groundstate_hypotheses, lro_scan, model_digest, quantum_expectation, tol, verify_model, ScanOptions,
    VerifyOptions,
};
use gibbs_ground::{Axis, Error, GibbsMeasure, ModelInstance, OperatorMatrix, SiteSet, SpinConfiguration};

const AFTER_HELP: &str = "\
Site caps (override with \"caps\" in the config):
  quantum      14  largest lattice for Hamiltonians and state vectors
  dense        12  largest lattice for the dense eigensolver (Lanczos above)
  enumeration  24  largest lattice for exact classical sums (Metropolis above)

Exit status: 0 on success, 1 if an asserted verify check fails, 2 on errors.";

#[derive(Debug, Parser)]
#[command(name = "gibbs-ground", version, about = "Spin-1/2 Hamiltonians with Gibbsian ground states", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the model and print a JSON summary.
    Build(Args),
    /// Run every check and print the JSON report.
    Verify(Args),
    /// CSV of <S^l_x S^l_y> (l = 1, 2, 3) for each configured pair and alpha.
    Correlate(Args),
    /// CSV of the order-parameter scan over the alpha grid.
    Sweep(Args),
    /// JSON of Metropolis estimates with standard errors.
    Sample(Args),
}

#[derive(Debug, clap::Args)]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Write the artifact into this directory instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Keep per-check wall times in the verify report (breaks byte-identity).
    #[arg(long)]
    timings: bool,
}

struct Artifact {
    file_name: &'static str,
    body: String,
    exit: u8,
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn to_csv<T: Serialize>(rows: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("serializable row");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}

#[derive(Serialize)]
struct CorrelationRow {
    alpha: f64,
    x: usize,
    y: usize,
    axis: u8,
    value: f64,
    std_error: f64,
    tolerance: f64,
    method: &'static str,
}

fn config_digest(text: &str, seed: u64) -> String {
    let mut h = Sha256::new();
    h.update(text.as_bytes());
    h.update(seed.to_le_bytes());
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn model(cfg: &RunConfig) -> Result<ModelInstance<f64>, Error> {
    ModelInstance::with_cap(
        cfg.lattice.clone(),
        cfg.couplings.clone(),
        cfg.potential.clone(),
        cfg.alpha(),
        cfg.caps.quantum,
    )
}

fn default_pairs(cfg: &RunConfig) -> Vec<(usize, usize)> {
    if !cfg.pairs.is_empty() {
        cfg.pairs.clone()
    } else if cfg.lattice.len() > 1 {
        vec![(0, cfg.lattice.len() - 1)]
    } else {
        Vec::new()
    }
}

fn build(cfg: &RunConfig) -> Result<Artifact, Error> {
    let hypotheses = check_groundstate_hypotheses(&cfg.couplings, &cfg.lattice)?;
    let m = model(cfg)?;
    let h = m.hamiltonian();
    let mut warnings = Vec::new();
    if !hypotheses.odd_twist_entries.is_empty() {
        warnings.push("odd |A'| entries: H is not Hermitian");
    }
    if !hypotheses.satisfied {
        warnings.push("ground-state hypotheses violated");
    }
    let summary = json!({
        "schema": 1,
        "inputs_digest": model_digest(&m),
        "lattice": {
            "dimension": cfg.lattice.dimension(),
            "side_length": cfg.lattice.side_length(),
            "sites": cfg.lattice.len(),
        },
        "hilbert_dimension": h.dim(),
        "alpha": m.alpha(),
        "coupling_entries": m.couplings().entries().len(),
        "potential_terms": m.potential().terms().len(),
        "nonzeros": h.nnz(),
        "h_max": h.max_abs(),
        "hermitian": h.is_hermitian(),
        "hermitian_deviation": h.hermitian_deviation(),
        "assembly_deviation": m.assembly_deviation(),
        "hypotheses": hypotheses,
        "warnings": warnings,
    });
    Ok(Artifact {
        file_name: "build.json",
        body: to_json(&summary),
        exit: 0,
    })
}

fn verify(cfg: &RunConfig, timings: bool) -> Result<Artifact, Error> {
    let m = model(cfg)?;
    let options = VerifyOptions {
        trials: cfg.trials,
        seed: cfg.seed,
        spectral_site_cap: cfg.caps.quantum,
        eigen: EigenOptions {
            dense_max_dim: 1 << cfg.caps.dense,
            ..Default::default()
        },
        pairs: cfg.pairs.clone(),
    };
    let mut report = verify_model(&m, &options)?;
    if !timings {
        report = report.without_timings();
    }
    let failures: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    for name in &failures {
        eprintln!("FAILED: {name}");
    }
    Ok(Artifact {
        file_name: "verify.json",
        body: to_json(&report),
        exit: if failures.is_empty() { 0 } else { 1 },
    })
}

/// `⟨S^l_x S^l_y⟩` in the Gibbsian state. Within the quantum cap the values
/// come from the state vector; above it from the classical reductions
/// `⟨S¹S¹⟩ = ⟨e^{−(α/2)W}⟩`, `⟨S²S²⟩ = −⟨s_x s_y e^{−(α/2)W}⟩`, `⟨S³S³⟩ = ⟨s_x s_y⟩`.
fn correlate(cfg: &RunConfig) -> Result<Artifact, Error> {
    let pairs = default_pairs(cfg);
    let n = cfg.lattice.len();
    let mut rows = Vec::new();
    for (k, &alpha) in cfg.alphas.iter().enumerate() {
        if n <= cfg.caps.quantum {
            let m = ModelInstance::with_cap(
                cfg.lattice.clone(),
                Default::default(),
                cfg.potential.clone(),
                alpha,
                cfg.caps.quantum,
            )?;
            for &(x, y) in &pairs {
                for (l, axis) in [(1, Axis::X), (2, Axis::Y), (3, Axis::Z)] {
                    let op = OperatorMatrix::product_operator(axis, SiteSet::from_sites([x, y]), n)?;
                    let v = quantum_expectation(&op, m.gibbs_state())?;
                    rows.push(CorrelationRow {
                        alpha,
                        x,
                        y,
                        axis: l,
                        value: v.re,
                        std_error: 0.0,
                        tolerance: tol::EXPECTATION,
                        method: "quantum",
                    });
                }
            }
            continue;
        }
        let half = alpha / 2.0;
        let u = &cfg.potential;
        let mut fs: Vec<Box<dyn Fn(SpinConfiguration) -> f64 + Sync + '_>> = Vec::new();
        for &(x, y) in &pairs {
            let a = SiteSet::from_sites([x, y]);
            let ss = move |s: SpinConfiguration| f64::from(s.spin(x) * s.spin(y));
            fs.push(Box::new(move |s| (-half * u.flip_energy(s, a)).exp()));
            fs.push(Box::new(move |s| -ss(s) * (-half * u.flip_energy(s, a)).exp()));
            fs.push(Box::new(ss));
        }
        let (values, method): (Vec<Estimate>, &'static str) = if n <= cfg.caps.enumeration {
            let refs: Vec<&(dyn Fn(SpinConfiguration) -> f64 + Sync)> = fs.iter().map(|f| f.as_ref()).collect();
            let v = GibbsMeasure::new(&cfg.lattice, u, alpha)?
                .with_cap(cfg.caps.enumeration)
                .expectations(&refs)?;
            (
                v.into_iter().map(|mean| Estimate { mean, std_error: 0.0 }).collect(),
                "exact",
            )
        } else {
            let refs: Vec<&dyn Fn(SpinConfiguration) -> f64> = fs
                .iter()
                .map(|f| f.as_ref() as &dyn Fn(SpinConfiguration) -> f64)
                .collect();
            let mut mc = cfg.metropolis();
            mc.seed = mc.seed.wrapping_add(k as u64);
            let run = metropolis_run(&refs, u, alpha, &cfg.lattice, mc)?;
            (run.estimates, "metropolis")
        };
        for (p, &(x, y)) in pairs.iter().enumerate() {
            for (l, e) in values[3 * p..3 * p + 3].iter().enumerate() {
                rows.push(CorrelationRow {
                    alpha,
                    x,
                    y,
                    axis: l as u8 + 1,
                    value: e.mean,
                    std_error: e.std_error,
                    tolerance: if method == "exact" { tol::EXPECTATION } else { 0.0 },
                    method,
                });
            }
        }
    }
    Ok(Artifact {
        file_name: "correlate.csv",
        body: to_csv(&rows),
        exit: 0,
    })
}

fn scan_options(cfg: &RunConfig, enumeration_cap: usize) -> ScanOptions {
    ScanOptions {
        enumeration_cap,
        monte_carlo: cfg.metropolis(),
    }
}

fn sweep(cfg: &RunConfig) -> Result<Artifact, Error> {
    let rows = lro_scan(
        &cfg.lattice,
        &cfg.potential,
        &default_pairs(cfg),
        &cfg.alphas,
        scan_options(cfg, cfg.caps.enumeration),
    )?;
    Ok(Artifact {
        file_name: "sweep.csv",
        body: to_csv(&rows),
        exit: 0,
    })
}

fn sample(cfg: &RunConfig, digest: &str) -> Result<Artifact, Error> {
    let pairs = default_pairs(cfg);
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("sample needs at least two sites".into()));
    }
    let rows = lro_scan(&cfg.lattice, &cfg.potential, &pairs, &cfg.alphas, scan_options(cfg, 0))?;
    let estimate = |mean: f64, std_error: f64| json!({ "mean": mean, "std_error": std_error });
    let per_alpha: Vec<_> = rows
        .chunks(pairs.len())
        .enumerate()
        .map(|(k, chunk)| {
            let first = &chunk[0];
            json!({
                "alpha": first.alpha,
                "seed": cfg.seed.wrapping_add(k as u64),
                "m3_squared": estimate(first.m3_squared, first.m3_squared_err),
                "m1": estimate(first.m1, first.m1_err),
                "pairs": chunk.iter().map(|r| json!({
                    "x": r.x,
                    "y": r.y,
                    "s1s1": estimate(r.s1s1, r.s1s1_err),
                    "s3s3": estimate(r.s3s3, r.s3s3_err),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let out = json!({
        "schema": 1,
        "inputs_digest": digest,
        "seed": cfg.seed,
        "sweeps": cfg.sweeps,
        "burn_in": cfg.burn_in,
        "batches": cfg.batches,
        "sites": cfg.lattice.len(),
        "estimates": per_alpha,
    });
    Ok(Artifact {
        file_name: "sample.json",
        body: to_json(&out),
        exit: 0,
    })
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::SizeLimit { .. } => "size-limit",
        Error::InvalidArgument(_) => "invalid-argument",
        Error::SiteOutOfRange { .. } => "site-out-of-range",
        Error::OverlappingSets { .. } => "overlapping-sets",
        Error::DuplicateKey { .. } => "duplicate-key",
        Error::DimensionMismatch { .. } => "dimension-mismatch",
        Error::NonFinite { .. } => "non-finite",
        Error::ZeroVector => "zero-vector",
        Error::NotHermitian { .. } => "not-hermitian",
        Error::NoConvergence { .. } => "no-convergence",
        Error::Consistency { .. } => "consistency",
        Error::UnsupportedModel(_) => "unsupported-model",
        Error::ConfigSyntax { .. } => "config-syntax",
        Error::ConfigField { .. } => "config-field",
    }
}

fn emit(out: Option<&Path>, file_name: &str, body: &str) -> std::io::Result<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(file_name), body)
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<Artifact, (Error, Option<PathBuf>)> {
    let (args, kind) = match command {
        Command::Build(a) => (a, "build"),
        Command::Verify(a) => (a, "verify"),
        Command::Correlate(a) => (a, "correlate"),
        Command::Sweep(a) => (a, "sweep"),
        Command::Sample(a) => (a, "sample"),
    };
    let out = args.out.clone();
    let fail = |e: Error| (e, out.clone());
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| fail(Error::InvalidArgument(format!("--threads: {e}"))))?;
    }
    let text = fs::read_to_string(&args.config).map_err(|e| {
        fail(Error::InvalidArgument(format!(
            "cannot read {}: {e}",
            args.config.display()
        )))
    })?;
    let mut cfg = parse_config(&text).map_err(fail)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let artifact = match kind {
        "build" => build(&cfg),
        "verify" => verify(&cfg, args.timings),
        "correlate" => correlate(&cfg),
        "sweep" => sweep(&cfg),
        _ => sample(&cfg, &config_digest(&text, cfg.seed)),
    }
    .map_err(fail)?;
    emit(out.as_deref(), artifact.file_name, &artifact.body)
        .map_err(|e| fail(Error::InvalidArgument(format!("cannot write output: {e}"))))?;
    Ok(artifact)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(a) => ExitCode::from(a.exit),
        Err((e, out)) => {
            let record = to_json(&json!({ "error": { "kind": error_kind(&e), "message": e.to_string() } }));
            eprint!("{record}");
            if let Some(dir) = out {
                let _ = emit(Some(&dir), "error.json", &record);
            }
            ExitCode::from(2)
        }
    }
}
