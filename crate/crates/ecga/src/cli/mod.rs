//! The `ecga` command-line surface: sequence generation and optimization,
//! statistical analysis, pairwise comparison, and bit export for external
//! test batteries.
//!
//! Sequence files are raw bytes, one byte per symbol (the CLI fixes m = 8;
//! the library keeps m generic). All metadata lives in the JSON run
//! manifest, which is sufficient to replay a run byte-for-byte.

pub mod pgm;

pub use pgm::{parse_pgm, read_pgm, ImageBuffer};

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field_ec::{self, AffinePoint, CurveParams};
use crate::idprng::{generate_initial, GenerationConfig, Sequence};
use crate::material::BitString;
use crate::moga::{self, OptimizerConfig, StopReason};
use crate::stats::{self, NistConfig, NistEntry, StatsReport, TestOutcome};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "ecga", version, about = "Image-dependent pseudo-random sequence generator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a sequence from an image and curve, optionally optimized
    Generate(GenerateArgs),
    /// Compute statistics of a sequence file
    Analyze(AnalyzeArgs),
    /// Compare two sequence files (correlation and bit-change rate)
    Compare(CompareArgs),
    /// Convert a sequence file to a bit stream for external batteries
    ExportBits(ExportBitsArgs),
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// PGM image (P2 or P5) that seeds the run
    #[arg(long, required_unless_present = "from_manifest", conflicts_with = "from_manifest")]
    pub image: Option<PathBuf>,
    /// Built-in curve name (p256, p521) or path to a curve TOML file
    #[arg(long, required_unless_present = "from_manifest", conflicts_with = "from_manifest")]
    pub curve: Option<String>,
    #[arg(long, required_unless_present = "from_manifest", conflicts_with = "from_manifest")]
    pub phi: Option<u16>,
    #[arg(long, required_unless_present = "from_manifest", conflicts_with = "from_manifest")]
    pub psi: Option<u16>,
    #[arg(long, required_unless_present = "from_manifest", conflicts_with = "from_manifest")]
    pub varphi: Option<u16>,
    /// Mask key as hex, at least 32 bytes
    #[arg(long, required_unless_present = "from_manifest", conflicts_with = "from_manifest")]
    pub bz_seed: Option<String>,
    /// Output length in symbols
    #[arg(long, required_unless_present = "from_manifest", conflicts_with = "from_manifest")]
    pub length: Option<usize>,
    /// Hill-climb the initial sequence before writing it
    #[arg(long, conflicts_with = "from_manifest")]
    pub optimize: bool,
    #[arg(long, default_value_t = 0, conflicts_with = "from_manifest")]
    pub rng_seed: u64,
    #[arg(long, default_value_t = 1_000_000, conflicts_with = "from_manifest")]
    pub max_generations: u64,
    /// Where the raw sequence bytes go
    #[arg(long)]
    pub out: PathBuf,
    /// Write a JSON run manifest here
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Write the per-generation optimizer trace CSV here
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Replay a previously written manifest instead of passing flags
    #[arg(long)]
    pub from_manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Comma-separated subset of entropy,period,hurst,nist
    #[arg(long, default_value = "entropy,period,hurst,nist", value_delimiter = ',')]
    pub tests: Vec<String>,
    /// NIST significance level
    #[arg(long, default_value_t = 0.01)]
    pub lambda: f64,
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BitFormat {
    Ascii01,
    Raw,
}

#[derive(Args, Debug)]
pub struct ExportBitsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = BitFormat::Ascii01)]
    pub format: BitFormat,
}

/// Curve parameters echoed into the manifest, decimal strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveEcho {
    pub name: String,
    pub p: String,
    pub a: String,
    pub b: String,
    pub gx: String,
    pub gy: String,
}

impl CurveEcho {
    fn of(curve: &CurveParams) -> Self {
        let (gx, gy) = match curve.base_point() {
            AffinePoint::Finite { x, y } => (x.to_str_radix(10), y.to_str_radix(10)),
            AffinePoint::Infinity => unreachable!("base point is always finite"),
        };
        CurveEcho {
            name: curve.name().to_string(),
            p: curve.p().to_str_radix(10),
            a: curve.a().to_str_radix(10),
            b: curve.b().to_str_radix(10),
            gx,
            gy,
        }
    }

    fn to_curve(&self) -> Result<CurveParams> {
        let big = |s: &str| -> Result<BigUint> {
            BigUint::parse_bytes(s.as_bytes(), 10)
                .ok_or_else(|| Error::InvalidManifest(format!("not a decimal integer: {s}")))
        };
        CurveParams::new(
            self.name.clone(),
            big(&self.p)?,
            big(&self.a)?,
            big(&self.b)?,
            big(&self.gx)?,
            big(&self.gy)?,
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OptimizerEcho {
    pub rng_seed: u64,
    pub max_generations: u64,
    pub epsilon: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunResult {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<StopReason>,
    pub entropy: f64,
    pub period: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generations: Option<u64>,
    pub output_digest: String,
}

/// Everything needed to replay a generation run byte-for-byte, plus the
/// observed outcome.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool_version: String,
    pub created_at: String,
    pub image_path: String,
    pub image_digest: String,
    pub curve: CurveEcho,
    pub phi: u16,
    pub psi: u16,
    pub varphi: u16,
    pub bz_seed: String,
    pub m: u8,
    pub length: usize,
    pub optimize: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerEcho>,
    pub result: RunResult,
}

impl RunManifest {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let manifest: RunManifest =
            serde_json::from_str(&text).map_err(|e| Error::InvalidManifest(e.to_string()))?;
        if manifest.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidManifest(format!(
                "unsupported schema_version {}",
                manifest.schema_version
            )));
        }
        Ok(manifest)
    }
}

/// Resolves a curve flag: built-in name, explicit file path, or a file in
/// `$ECGA_CURVE_DIR`.
pub fn resolve_curve(spec: &str) -> Result<CurveParams> {
    if let Ok(curve) = field_ec::by_name(spec) {
        return Ok(curve);
    }
    let direct = Path::new(spec);
    if direct.is_file() {
        return field_ec::from_file(direct);
    }
    if let Ok(dir) = std::env::var("ECGA_CURVE_DIR") {
        for candidate in [
            Path::new(&dir).join(spec),
            Path::new(&dir).join(format!("{spec}.toml")),
        ] {
            if candidate.is_file() {
                return field_ec::from_file(&candidate);
            }
        }
    }
    Err(Error::UnknownCurve(spec.to_string()))
}

/// Writes via a temp file in the destination directory plus rename, so a
/// crash never leaves a half-written artifact behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

struct RunSpec {
    cfg: GenerationConfig,
    image_path: String,
    optimize: bool,
    optimizer: OptimizerConfig,
}

fn spec_from_flags(args: &GenerateArgs) -> Result<RunSpec> {
    // clap guarantees presence; unwraps here are unreachable.
    let image_path = args.image.clone().expect("required by clap");
    let image = read_pgm(&image_path)?;
    let curve = resolve_curve(args.curve.as_deref().expect("required by clap"))?;
    let bz_hex = args.bz_seed.as_deref().expect("required by clap");
    let bz_seed = hex::decode(bz_hex)
        .map_err(|e| Error::InvalidArgument(format!("--bz-seed is not valid hex: {e}")))?;
    let cfg = GenerationConfig {
        image: image.into_pixels(),
        curve,
        phi: args.phi.expect("required by clap"),
        psi: args.psi.expect("required by clap"),
        varphi: args.varphi.expect("required by clap"),
        bz_seed,
        m: 8,
        target_length: args.length.expect("required by clap"),
    };
    Ok(RunSpec {
        cfg,
        image_path: image_path.display().to_string(),
        optimize: args.optimize,
        optimizer: OptimizerConfig {
            max_generations: args.max_generations,
            rng_seed: args.rng_seed,
            ..OptimizerConfig::default()
        },
    })
}

fn spec_from_manifest(path: &Path) -> Result<RunSpec> {
    let m = RunManifest::from_file(path)?;
    let image = read_pgm(Path::new(&m.image_path))?;
    let digest = crate::material::hash_image(image.pixels())?.to_hex();
    if digest != m.image_digest {
        return Err(Error::InvalidManifest(format!(
            "image at {} no longer matches the recorded digest",
            m.image_path
        )));
    }
    let bz_seed = hex::decode(&m.bz_seed)
        .map_err(|e| Error::InvalidManifest(format!("bz_seed is not valid hex: {e}")))?;
    let optimizer = match &m.optimizer {
        Some(o) => OptimizerConfig {
            max_generations: o.max_generations,
            rng_seed: o.rng_seed,
            epsilon: o.epsilon,
        },
        None => OptimizerConfig::default(),
    };
    Ok(RunSpec {
        cfg: GenerationConfig {
            image: image.into_pixels(),
            curve: m.curve.to_curve()?,
            phi: m.phi,
            psi: m.psi,
            varphi: m.varphi,
            bz_seed,
            m: m.m,
            target_length: m.length,
        },
        image_path: m.image_path,
        optimize: m.optimize,
        optimizer,
    })
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    if args.trace.is_some() && !args.optimize && args.from_manifest.is_none() {
        return Err(Error::InvalidArgument(
            "--trace requires --optimize".to_string(),
        ));
    }
    let spec = match &args.from_manifest {
        Some(path) => spec_from_manifest(path)?,
        None => spec_from_flags(args)?,
    };

    let initial = generate_initial(&spec.cfg)?;
    let (sequence, outcome) = if spec.optimize {
        let outcome = moga::optimize(&initial, &spec.optimizer)?;
        (outcome.sequence.clone(), Some(outcome))
    } else {
        (initial, None)
    };

    let bytes = sequence.to_bytes()?;
    write_atomic(&args.out, &bytes)?;

    if let (Some(trace_path), Some(outcome)) = (&args.trace, &outcome) {
        let mut buf = Vec::new();
        outcome.trace.write_csv(&mut buf)?;
        write_atomic(trace_path, &buf)?;
    }

    if let Some(manifest_path) = &args.manifest {
        let fitness = match &outcome {
            Some(o) => o.fitness,
            None => moga::evaluate(&sequence),
        };
        let manifest = RunManifest {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            created_at: chrono::Utc::now().to_rfc3339(),
            image_path: spec.image_path.clone(),
            image_digest: crate::material::hash_image(&spec.cfg.image)?.to_hex(),
            curve: CurveEcho::of(&spec.cfg.curve),
            phi: spec.cfg.phi,
            psi: spec.cfg.psi,
            varphi: spec.cfg.varphi,
            bz_seed: hex::encode(&spec.cfg.bz_seed),
            m: spec.cfg.m,
            length: spec.cfg.target_length,
            optimize: spec.optimize,
            optimizer: spec.optimize.then(|| OptimizerEcho {
                rng_seed: spec.optimizer.rng_seed,
                max_generations: spec.optimizer.max_generations,
                epsilon: spec.optimizer.epsilon,
            }),
            result: RunResult {
                status: outcome.as_ref().map(|o| o.reason),
                entropy: fitness.entropy,
                period: fitness.period,
                generations: outcome.as_ref().map(|o| o.generations),
                output_digest: sha256_hex(&bytes),
            },
        };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        write_atomic(manifest_path, json.as_bytes())?;
    }
    Ok(())
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<()> {
    for t in &args.tests {
        if !matches!(t.as_str(), "entropy" | "period" | "hurst" | "nist") {
            return Err(Error::InvalidArgument(format!("unknown test {t:?}")));
        }
    }
    let bytes = fs::read(&args.input)?;
    if bytes.is_empty() {
        return Err(Error::SequenceTooShort { len: 0, min: 1 });
    }
    let seq = Sequence::from_bytes(&bytes);
    let want = |name: &str| args.tests.iter().any(|t| t == name);

    let mut report = StatsReport {
        schema_version: SCHEMA_VERSION,
        input_digest: sha256_hex(&bytes),
        entropy: None,
        period: None,
        hurst: None,
        hurst_error: None,
        nist: None,
    };
    if want("entropy") {
        report.entropy = Some(stats::entropy(&seq));
    }
    if want("period") {
        report.period = Some(stats::period(&seq));
    }
    if want("hurst") {
        match stats::hurst_rs(&seq) {
            Ok(h) => report.hurst = Some(h),
            Err(e) => report.hurst_error = Some(e.to_string()),
        }
    }
    if want("nist") {
        let bits = BitString::from_bytes_msb(&bytes);
        let cfg = NistConfig {
            lambda: args.lambda,
            ..NistConfig::default()
        };
        let entries = stats::nist_subset(&bits, &cfg)?
            .into_iter()
            .map(|r| {
                let (p_value, pass, skipped) = match r.outcome {
                    TestOutcome::Computed { p_value, pass } => (Some(p_value), Some(pass), None),
                    TestOutcome::Skipped { skipped } => (None, None, Some(skipped)),
                };
                NistEntry {
                    name: r.name,
                    p_value,
                    pass,
                    skipped,
                }
            })
            .collect();
        report.nist = Some(entries);
    }
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_atomic(&args.report, json.as_bytes())
}

#[derive(Debug, Serialize)]
struct CompareReport {
    schema_version: u32,
    a_digest: String,
    b_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pearson: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pearson_error: Option<String>,
    nbcr_percent: f64,
}

pub fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let a_bytes = fs::read(&args.a)?;
    let b_bytes = fs::read(&args.b)?;
    let a = Sequence::from_bytes(&a_bytes);
    let b = Sequence::from_bytes(&b_bytes);
    let nbcr = stats::nbcr(&a, &b)?;
    // A constant input has no defined correlation; keep the NBCR and say so.
    let (pearson, pearson_error) = match stats::pearson(&a, &b) {
        Ok(r) => (Some(r), None),
        Err(Error::ConstantSequence) => (None, Some(Error::ConstantSequence.to_string())),
        Err(e) => return Err(e),
    };
    let report = CompareReport {
        schema_version: SCHEMA_VERSION,
        a_digest: sha256_hex(&a_bytes),
        b_digest: sha256_hex(&b_bytes),
        pearson,
        pearson_error,
        nbcr_percent: nbcr,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_atomic(&args.report, json.as_bytes())
}

pub fn cmd_export_bits(args: &ExportBitsArgs) -> Result<()> {
    let bytes = fs::read(&args.input)?;
    let out = match args.format {
        BitFormat::Ascii01 => BitString::from_bytes_msb(&bytes).to_string01().into_bytes(),
        BitFormat::Raw => bytes,
    };
    write_atomic(&args.out, &out)
}

pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Compare(args) => cmd_compare(args),
        Command::ExportBits(args) => cmd_export_bits(args),
    }
}
