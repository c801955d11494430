//! `locword`: encode and decode numbers as words, run bounded partition
//! searches, and produce or re-verify recurrence certificates.
//!
//! Exit codes: 0 success (including honest exhaustion), 2 domain errors
//! (zero inputs, malformed words), 3 configuration or schema errors,
//! 4 certificate verification failures.

use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;

use locword::certificate::{
    self, IpCertificate, IpConfig, MultiCertificate, MultiConfig, PartitionCertificate,
    PartitionConfig, RecurrenceCertificate, RecurrenceConfig, SemigroupCertificate,
    SemigroupConfig,
};
use locword::codec::{Codec, MixedRadix};
use locword::ramsey::SearchOutcome;
use locword::word::Word;

const EXIT_DOMAIN: i32 = 2;
const EXIT_CONFIG: i32 = 3;
const EXIT_VERIFY: i32 = 4;

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn domain(msg: impl fmt::Display) -> CliError {
        CliError { code: EXIT_DOMAIN, message: msg.to_string() }
    }
    fn config(msg: impl fmt::Display) -> CliError {
        CliError { code: EXIT_CONFIG, message: msg.to_string() }
    }
    fn verify(msg: impl fmt::Display) -> CliError {
        CliError { code: EXIT_VERIFY, message: msg.to_string() }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "locword", version, about = "Words over bounded alphabets: codecs, partition searches, recurrence certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CodecName {
    Rational,
    Integer,
    Natural,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a number as its canonical word.
    Encode {
        #[arg(long, value_enum)]
        codec: CodecName,
        /// Base for the natural codec (at least 2).
        #[arg(long, default_value_t = 2)]
        base: u64,
        /// Number: integers as decimals, rationals as "p/q".
        number: String,
    },
    /// Decode a canonical word back to its number.
    Decode {
        #[arg(long, value_enum)]
        codec: CodecName,
        #[arg(long, default_value_t = 2)]
        base: u64,
        /// Word JSON, inline or @path, or - for stdin.
        word: String,
    },
    /// Search for a monochromatic witness under a configured coloring.
    VerifyPartition(RunArgs),
    /// Search for a recurrent point of a configured system.
    FindRecurrence(RunArgs),
    /// Simultaneous recurrence for several commuting systems.
    MultiRecurrence(RunArgs),
    /// Compare the chain-order limit with the uniform substitution
    /// reading on a configured net.
    CheckIp(RunArgs),
    /// Recurrence for a system indexed through a semigroup image.
    SemigroupRun(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Run configuration: path or - for stdin.
    #[arg(long, required_unless_present = "check")]
    config: Option<String>,
    /// Write the certificate here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Re-verify an existing certificate instead of searching.
    #[arg(long)]
    check: Option<PathBuf>,
    /// Also write the residual table as CSV.
    #[arg(long)]
    emit_csv: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.code);
        }
    }
}

fn read_input(spec: &str) -> CliResult<String> {
    if spec == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::config(format!("reading stdin: {e}")))?;
        Ok(buf)
    } else if let Some(path) = spec.strip_prefix('@') {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("reading {path}: {e}")))
    } else if Path::new(spec).exists() && spec.ends_with(".json") {
        std::fs::read_to_string(spec)
            .map_err(|e| CliError::config(format!("reading {spec}: {e}")))
    } else {
        Ok(spec.to_string())
    }
}

/// Atomic write: temp file in the target directory, then rename.
fn write_atomic(path: &Path, contents: &str) -> CliResult {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)
        .map_err(|e| CliError::config(format!("writing {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| CliError::config(format!("renaming into {}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, payload: &str) -> CliResult {
    match out {
        Some(path) => write_atomic(path, payload),
        None => {
            println!("{payload}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string(value).map_err(|e| CliError::config(format!("serializing: {e}")))
}

fn codec_for(name: CodecName, base: u64) -> CliResult<Codec> {
    Ok(match name {
        CodecName::Rational => Codec::Rational,
        CodecName::Integer => Codec::Integer { radix: MixedRadix::factorial() },
        CodecName::Natural => {
            if base < 2 {
                return Err(CliError::domain(format!("base {base} is below 2")));
            }
            Codec::Natural { base }
        }
    })
}

fn cmd_encode(name: CodecName, base: u64, number: &str) -> CliResult {
    let codec = codec_for(name, base)?;
    let q = BigRational::from_str(number.trim())
        .map_err(|e| CliError::domain(format!("bad number {number:?}: {e}")))?;
    let word = codec.encode(&q).map_err(CliError::domain)?;
    println!("{}", to_json(&word.to_word())?);
    Ok(())
}

fn cmd_decode(name: CodecName, base: u64, word_spec: &str) -> CliResult {
    let codec = codec_for(name, base)?;
    let raw = read_input(word_spec)?;
    // Words may omit "kind"; the codec fixes it.
    let value: serde_json::Value = serde_json::from_str(raw.trim())
        .map_err(|e| CliError::domain(format!("bad word JSON: {e}")))?;
    let mut value = value;
    if value.get("kind").is_none() {
        let kind = match codec.kind() {
            locword::Kind::TwoSided => "two-sided",
            locword::Kind::OneSided => "one-sided",
        };
        value["kind"] = serde_json::json!(kind);
    }
    let word: Word =
        serde_json::from_value(value).map_err(|e| CliError::domain(format!("bad word: {e}")))?;
    let constant = word
        .as_constant()
        .ok_or_else(|| CliError::domain("variable words have no single value"))?;
    let q = codec.decode(constant).map_err(CliError::domain)?;
    if q.is_integer() {
        println!("{}", q.to_integer());
    } else {
        println!("{q}");
    }
    Ok(())
}

fn parse_config<T: serde::de::DeserializeOwned>(args: &RunArgs) -> CliResult<T> {
    let spec = args.config.as_deref().ok_or_else(|| CliError::config("missing --config"))?;
    let raw = read_input(spec)?;
    serde_json::from_str(&raw).map_err(|e| CliError::config(format!("bad config: {e}")))
}

fn load_cert<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&raw)
        .map_err(|e| CliError::verify(format!("certificate does not parse: {e}")))
}

fn residual_csv_recurrence(cert: &RecurrenceCertificate) -> String {
    let mut out = String::from("depth,word,orbit_residual,recurrence_residual\n");
    if let SearchOutcome::Found { witness } = &cert.outcome {
        for (word, orbit_d, rec_d) in &witness.residuals {
            let depth = word.len();
            let word_json = serde_json::to_string(word).unwrap_or_default().replace('"', "\"\"");
            out.push_str(&format!("{depth},\"{word_json}\",{orbit_d},{rec_d}\n"));
        }
    }
    out
}

fn residual_csv_multi(cert: &MultiCertificate) -> String {
    let mut out = String::from("depth,word,system,recurrence_residual\n");
    if let SearchOutcome::Found { witness } = &cert.outcome {
        for (word, per_system) in &witness.residuals {
            let depth = word.len();
            let word_json = serde_json::to_string(word).unwrap_or_default().replace('"', "\"\"");
            for (i, d) in per_system.iter().enumerate() {
                out.push_str(&format!("{depth},\"{word_json}\",{i},{d}\n"));
            }
        }
    }
    out
}

fn cmd_verify_partition(args: &RunArgs) -> CliResult {
    if let Some(cert_path) = &args.check {
        let cert: PartitionCertificate = load_cert(cert_path)?;
        certificate::verify_partition(&cert).map_err(CliError::verify)?;
        println!("certificate verified");
        return Ok(());
    }
    let config: PartitionConfig = parse_config(args)?;
    let cert = certificate::run_partition(&config).map_err(CliError::config)?;
    emit(&args.out, &to_json(&cert)?)
}

fn cmd_find_recurrence(args: &RunArgs) -> CliResult {
    if let Some(cert_path) = &args.check {
        let cert: RecurrenceCertificate = load_cert(cert_path)?;
        certificate::verify_recurrence(&cert).map_err(CliError::verify)?;
        if let Some(csv) = &args.emit_csv {
            write_atomic(csv, &residual_csv_recurrence(&cert))?;
        }
        println!("certificate verified");
        return Ok(());
    }
    let config: RecurrenceConfig = parse_config(args)?;
    let cert = certificate::run_recurrence(&config).map_err(CliError::config)?;
    if let Some(csv) = &args.emit_csv {
        write_atomic(csv, &residual_csv_recurrence(&cert))?;
    }
    emit(&args.out, &to_json(&cert)?)
}

fn cmd_multi_recurrence(args: &RunArgs) -> CliResult {
    if let Some(cert_path) = &args.check {
        let cert: MultiCertificate = load_cert(cert_path)?;
        certificate::verify_multi(&cert).map_err(CliError::verify)?;
        if let Some(csv) = &args.emit_csv {
            write_atomic(csv, &residual_csv_multi(&cert))?;
        }
        println!("certificate verified");
        return Ok(());
    }
    let config: MultiConfig = parse_config(args)?;
    let cert = certificate::run_multi(&config).map_err(CliError::config)?;
    if let Some(csv) = &args.emit_csv {
        write_atomic(csv, &residual_csv_multi(&cert))?;
    }
    emit(&args.out, &to_json(&cert)?)
}

fn cmd_check_ip(args: &RunArgs) -> CliResult {
    if let Some(cert_path) = &args.check {
        let cert: IpCertificate = load_cert(cert_path)?;
        certificate::verify_check_ip(&cert).map_err(CliError::verify)?;
        println!("certificate verified");
        return Ok(());
    }
    let config: IpConfig = parse_config(args)?;
    let cert = certificate::run_check_ip(&config).map_err(CliError::config)?;
    emit(&args.out, &to_json(&cert)?)
}

fn cmd_semigroup(args: &RunArgs) -> CliResult {
    if let Some(cert_path) = &args.check {
        let cert: SemigroupCertificate = load_cert(cert_path)?;
        certificate::verify_semigroup(&cert).map_err(CliError::verify)?;
        println!("certificate verified");
        return Ok(());
    }
    let config: SemigroupConfig = parse_config(args)?;
    let cert = certificate::run_semigroup(&config).map_err(CliError::config)?;
    emit(&args.out, &to_json(&cert)?)
}

fn dispatch(cli: Cli) -> CliResult {
    match cli.command {
        Command::Encode { codec, base, number } => cmd_encode(codec, base, &number),
        Command::Decode { codec, base, word } => cmd_decode(codec, base, &word),
        Command::VerifyPartition(args) => cmd_verify_partition(&args),
        Command::FindRecurrence(args) => cmd_find_recurrence(&args),
        Command::MultiRecurrence(args) => cmd_multi_recurrence(&args),
        Command::CheckIp(args) => cmd_check_ip(&args),
        Command::SemigroupRun(args) => cmd_semigroup(&args),
    }
}
