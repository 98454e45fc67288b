//! `keyedgen`: password generation, randomness validation, timing and
//! known-answer checks from one binary.
//!
//! Exit codes: 0 all checks passed, 1 a statistical or vector check failed,
//! 2 usage or input error.

mod bench;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use keyedgen::engine::{recover_seed, LCG_MASK};
use keyedgen::passgen::{
    derive_key, generate_password, required_length, PasswordSpec, DEFAULT_CHAR_BITS,
};
use keyedgen::validation::{
    build_restart_matrix, char_uniformity_test, McvAggregation, RestartMatrix, ValidationReport,
    CHAR_P_THRESHOLD,
};
use keyedgen::{vectors, Charset, EngineDescriptor, EngineKind, Execution, KeySource};

/// Medians of the Ind, GF and LRS p-values published for each engine, shown
/// beside our own for comparison.
const REFERENCE_MEDIANS: [(EngineKind, [f64; 3]); 4] = [
    (EngineKind::Lcg, [0.401, 0.285, 1.000]),
    (EngineKind::Hmac, [0.398, 0.288, 1.000]),
    (EngineKind::Cmac, [0.391, 0.310, 1.000]),
    (EngineKind::Kmac, [0.398, 0.294, 1.000]),
];

#[derive(Parser)]
#[command(
    name = "keyedgen",
    version,
    about = "Keyed random bit generators, password generation and randomness validation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one password.
    Generate(GenerateArgs),
    /// Run the entropy and IID battery on a 1000x1000 restart matrix.
    Validate(ValidateArgs),
    /// Chi-square test of password characters against the uniform distribution.
    Chars(CharsArgs),
    /// Time password generation for every engine and charset.
    Bench(BenchArgs),
    /// Check the MAC, hash and cipher known-answer files.
    Vectors(VectorsArgs),
    /// Recover an LCG seed from consecutive full-state outputs.
    AttackLcg(AttackArgs),
    /// Write a raw engine bit stream (packed bytes, MSB-first).
    Stream(StreamArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EngineArg {
    Lcg,
    Hmac,
    Cmac,
    Kmac,
}

impl From<EngineArg> for EngineKind {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Lcg => EngineKind::Lcg,
            EngineArg::Hmac => EngineKind::Hmac,
            EngineArg::Cmac => EngineKind::Cmac,
            EngineArg::Kmac => EngineKind::Kmac,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Text,
    JsonLines,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum AggArg {
    #[default]
    Max,
    PerLine,
}

#[derive(Args, Clone)]
struct KeyArgs {
    /// Key as hex; must match the engine's key length (LCG: 8-byte seed).
    #[arg(long, conflicts_with = "key_time")]
    key_hex: Option<String>,
    /// Derive the key from this timestamp by iterated SHA-256.
    #[arg(long)]
    key_time: Option<u64>,
    /// Message mixed into every MAC input.
    #[arg(long, default_value = "")]
    message: String,
}

impl KeyArgs {
    fn source(&self, default_time: impl FnOnce() -> u64) -> Result<KeySource, CliError> {
        Ok(match (&self.key_hex, self.key_time) {
            (Some(hex), _) => KeySource::from_hex(hex)?,
            (None, Some(t)) => KeySource::Timestamp(t),
            (None, None) => KeySource::Timestamp(default_time()),
        })
    }

    fn descriptor(
        &self,
        kind: EngineKind,
        source: &KeySource,
    ) -> Result<EngineDescriptor, CliError> {
        let key = derive_key(source, kind.key_bits())?;
        Ok(EngineDescriptor::new(
            kind,
            key,
            self.message.as_bytes().to_vec(),
        ))
    }
}

fn now_millis() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum, default_value = "kmac")]
    engine: EngineArg,
    /// 1: letters, 2: letters and digits, 3: letters, digits and ~!@#$%^+-=
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=3))]
    charset: u8,
    /// Password length; overrides --strength.
    #[arg(long, conflicts_with = "strength")]
    length: Option<usize>,
    /// Target strength in bits; the length is ceil(strength / log2 q).
    #[arg(long, default_value_t = 128)]
    strength: u32,
    /// Random bits consumed per character.
    #[arg(long, default_value_t = DEFAULT_CHAR_BITS)]
    char_bits: u32,
    #[command(flatten)]
    key: KeyArgs,
    /// Also print engine, length, N, charset and key fingerprint to stderr.
    #[arg(long)]
    provenance: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value = "kmac")]
    engine: EngineArg,
    /// Load a 125000-byte restart matrix instead of generating one.
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Write the generated matrix here.
    #[arg(long, value_name = "FILE", conflicts_with = "input")]
    dump: Option<PathBuf>,
    /// Key flags default to --key-time 0.
    #[command(flatten)]
    key: KeyArgs,
    #[arg(long, value_enum, default_value = "max")]
    mcv_agg: AggArg,
    /// Worker threads for row tests (default: available parallelism).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct CharsArgs {
    #[arg(long, value_enum, default_value = "kmac")]
    engine: EngineArg,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    charset: u8,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_CHAR_BITS)]
    char_bits: u32,
    /// Key flags default to --key-time 0.
    #[command(flatten)]
    key: KeyArgs,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct BenchArgs {
    /// Passwords timed per engine and charset.
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_CHAR_BITS)]
    char_bits: u32,
    /// Directory receiving bench_runs.csv and bench_summary.csv.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Key flags default to --key-time 0. A --key-hex must hold at least 64
    /// bytes; each engine takes the leading bytes it needs.
    #[command(flatten)]
    key: KeyArgs,
}

#[derive(Args)]
struct VectorsArgs {
    /// Directory of vector files (default: the bundled set).
    #[arg(long = "in", value_name = "DIR")]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct AttackArgs {
    /// Consecutive 48-bit outputs in hex, separated by commas or spaces.
    #[arg(long, required = true)]
    outputs: String,
    /// Index of the first output (f_1 is the first value a fresh generator emits).
    #[arg(long, default_value_t = 1)]
    first_index: u32,
}

#[derive(Args)]
struct StreamArgs {
    #[arg(long, value_enum, default_value = "kmac")]
    engine: EngineArg,
    /// Number of bits to generate.
    #[arg(long)]
    bits: usize,
    /// Output file (default: stdout).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Key flags default to --key-time 0.
    #[command(flatten)]
    key: KeyArgs,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] keyedgen::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Check(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            _ => 2,
        }
    }
}

/// Whether every check a command ran passed.
type Outcome = Result<bool, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Chars(a) => cmd_chars(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Vectors(a) => cmd_vectors(a),
        Command::AttackLcg(a) => cmd_attack_lcg(a),
        Command::Stream(a) => cmd_stream(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execution(jobs: Option<usize>) -> Execution {
    match jobs {
        Some(1) => Execution::Sequential,
        _ => Execution::Parallel,
    }
}

/// Runs `f` on a pool of `jobs` threads when requested.
fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match jobs {
        Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
        #[cfg(feature = "parallel")]
        Some(n) if n > 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| CliError::Usage(e.to_string())),
        _ => Ok(f()),
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string(value).expect("serializable"));
}

fn cmd_generate(a: GenerateArgs) -> Outcome {
    let kind = EngineKind::from(a.engine);
    let charset = Charset::preset(a.charset)?;
    let length = match a.length {
        Some(n) => n,
        None => required_length(charset.size(), a.strength)?,
    };
    let spec = PasswordSpec::new(charset, length, a.char_bits)?;
    let source = a.key.source(now_millis)?;
    let desc = a.key.descriptor(kind, &source)?;
    let password = generate_password(&mut desc.engine()?, &spec)?;

    #[derive(Serialize)]
    struct Generated<'a> {
        password: &'a str,
        engine: &'a str,
        length: usize,
        char_bits: u32,
        charset: u8,
        key_fingerprint: String,
    }
    let record = Generated {
        password: password.as_str(),
        engine: kind.name(),
        length,
        char_bits: spec.char_bits,
        charset: a.charset,
        key_fingerprint: desc.key.fingerprint(),
    };
    match a.format {
        Format::Text => {
            println!("{password}");
            if a.provenance {
                eprintln!(
                    "engine={} n={} N={} charset={} key_fp={}",
                    record.engine,
                    record.length,
                    record.char_bits,
                    record.charset,
                    record.key_fingerprint
                );
            }
        }
        Format::JsonLines => print_json(&record),
    }
    Ok(true)
}

fn cmd_validate(a: ValidateArgs) -> Outcome {
    let kind = EngineKind::from(a.engine);
    let exec = execution(a.jobs);
    let aggregation = match a.mcv_agg {
        AggArg::Max => McvAggregation::Max,
        AggArg::PerLine => McvAggregation::PerLine,
    };
    let (label, matrix) = match &a.input {
        Some(path) => (path.display().to_string(), RestartMatrix::read(path)?),
        None => {
            let desc = a.key.descriptor(kind, &a.key.source(|| 0)?)?;
            let m = with_jobs(a.jobs, || build_restart_matrix(&desc, exec))??;
            if let Some(dump) = &a.dump {
                m.write(dump)?;
            }
            (kind.name().to_string(), m)
        }
    };
    let report = with_jobs(a.jobs, || {
        ValidationReport::run(label, &matrix, aggregation, exec)
    })?;
    match a.format {
        Format::Text => {
            print!("{}", report.to_text());
            if a.input.is_none() {
                if let Some((_, [ind, gf, lrs])) = REFERENCE_MEDIANS.iter().find(|r| r.0 == kind) {
                    println!(
                        "reference_medians: ind {ind:.3} gf {gf:.3} lrs {lrs:.3} (informational)"
                    );
                }
            }
            println!("result: {}", if report.pass() { "PASS" } else { "FAIL" });
        }
        Format::JsonLines => println!("{}", report.to_json_line()),
    }
    Ok(report.pass())
}

fn cmd_chars(a: CharsArgs) -> Outcome {
    let kind = EngineKind::from(a.engine);
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let charset = Charset::preset(a.charset)?;
    let desc = a.key.descriptor(kind, &a.key.source(|| 0)?)?;
    let exec = execution(a.jobs);
    let r = with_jobs(a.jobs, || {
        char_uniformity_test(&desc, &charset, a.trials, a.char_bits, exec)
    })??;
    let expected_per_symbol = (r.trials * r.password_length) as f64 / charset.size() as f64;
    match a.format {
        Format::Text => {
            println!("engine: {kind}");
            println!("charset: {} (q = {})", a.charset, charset.size());
            println!(
                "trials: {} passwords of {} chars",
                r.trials, r.password_length
            );
            println!("chi_square: {:.4} (df {})", r.statistic, r.df);
            println!("p_value: {:.6}", r.p_value.value());
            if expected_per_symbol < 5.0 {
                println!("note: expected count per symbol is {expected_per_symbol:.2} (< 5); the chi-square approximation is unreliable at this scale");
            }
            println!(
                "result: {} (threshold p > {CHAR_P_THRESHOLD})",
                if r.pass { "PASS" } else { "FAIL" }
            );
        }
        Format::JsonLines => {
            #[derive(Serialize)]
            struct Chars<'a> {
                engine: &'a str,
                charset: u8,
                trials: usize,
                password_length: usize,
                statistic: f64,
                df: u32,
                p_value: f64,
                pass: bool,
            }
            print_json(&Chars {
                engine: kind.name(),
                charset: a.charset,
                trials: r.trials,
                password_length: r.password_length,
                statistic: r.statistic,
                df: r.df,
                p_value: r.p_value.value(),
                pass: r.pass,
            });
        }
    }
    Ok(r.pass)
}

fn cmd_bench(a: BenchArgs) -> Outcome {
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let source = match a.key.source(|| 0)? {
        KeySource::Explicit(bytes) if bytes.len() < 64 => {
            return Err(CliError::Usage(format!(
                "bench --key-hex needs at least 64 bytes, got {}",
                bytes.len()
            )))
        }
        other => other,
    };
    let mut records = Vec::with_capacity(a.trials * 12);
    for kind in EngineKind::ALL {
        let src = match &source {
            KeySource::Explicit(bytes) => {
                KeySource::Explicit(bytes[..kind.key_bits() / 8].to_vec())
            }
            t => t.clone(),
        };
        let desc = a.key.descriptor(kind, &src)?;
        for charset in 1..=3 {
            let spec = bench::spec_for(charset, a.char_bits)?;
            records.extend(bench::time_group(&desc, charset, &spec, a.trials)?);
        }
    }
    let rows = bench::summary(&records);
    std::fs::create_dir_all(&a.out)?;
    let runs_path = a.out.join("bench_runs.csv");
    let summary_path = a.out.join("bench_summary.csv");
    std::fs::write(&runs_path, bench::runs_csv(&records))?;
    std::fs::write(&summary_path, bench::summary_csv(&rows))?;
    println!("wrote {} runs to {}", records.len(), runs_path.display());
    println!("wrote {} groups to {}", rows.len(), summary_path.display());
    for note in bench::ordering_notes(&rows) {
        println!("note: {note}");
    }
    Ok(true)
}

fn cmd_vectors(a: VectorsArgs) -> Outcome {
    let files = match &a.input {
        Some(dir) => vectors::load_dir(dir)?,
        None => vectors::bundled(),
    };
    let outcomes = vectors::run(&files)?;
    if outcomes.is_empty() {
        return Err(CliError::Usage("vector files contain no cases".into()));
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    for o in &outcomes {
        match a.format {
            Format::Text => println!(
                "{} {}:{}{}",
                if o.pass { "PASS" } else { "FAIL" },
                o.file,
                o.line,
                if o.pass {
                    String::new()
                } else {
                    format!(" expected {} got {}", o.expected, o.actual)
                }
            ),
            Format::JsonLines => print_json(o),
        }
    }
    if a.format == Format::Text {
        println!("{} cases, {} failed", outcomes.len(), failed);
    }
    Ok(failed == 0)
}

fn cmd_attack_lcg(a: AttackArgs) -> Outcome {
    let outputs = a
        .outputs
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            let digits = s.trim_start_matches("0x").trim_start_matches("0X");
            u64::from_str_radix(digits, 16)
                .map_err(|e| CliError::Usage(format!("bad output {s:?}: {e}")))
        })
        .collect::<Result<Vec<u64>, _>>()?;
    if outputs.is_empty() {
        return Err(CliError::Usage("--outputs needs at least one value".into()));
    }
    if let Some(big) = outputs.iter().find(|&&v| v > LCG_MASK) {
        return Err(CliError::Usage(format!("output {big:#x} exceeds 48 bits")));
    }
    let recovery =
        recover_seed(&outputs, a.first_index).map_err(|e| CliError::Check(e.to_string()))?;
    println!("f0: {:#014x}", recovery.initial_state.value());
    println!(
        "seed_low48: {} ({:#014x})",
        recovery.seed_bits, recovery.seed_bits
    );
    println!("verified: {} outputs re-simulated from f0", outputs.len());
    Ok(true)
}

fn cmd_stream(a: StreamArgs) -> Outcome {
    let kind = EngineKind::from(a.engine);
    let desc = a.key.descriptor(kind, &a.key.source(|| 0)?)?;
    let bits = desc.engine()?.fill(a.bits)?;
    match &a.out {
        Some(path) => std::fs::write(path, bits.as_bytes())?,
        None => std::io::stdout().lock().write_all(bits.as_bytes())?,
    }
    Ok(true)
}
