//! `pmds`: Pascal-matrix MDS codes from the command line.

use std::fs::{self, OpenOptions};
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;

use pmds_core::codec::{self, CodecConfig, Frame, GeneratorKind};
use pmds_core::codes::{is_mds_with, rs_generator, supplement, MdsOptions, DEFAULT_SUBSET_CAP};
use pmds_core::fields::FieldParams;
use pmds_core::matrices::MatrixGF;
use pmds_core::ncsim::{run_sim, Scheme, SimConfig};
use pmds_core::pascal::{sparsity_report, supplemented_pascal, truncated_pascal};

const SUBSET_CAP_VAR: &str = "PMDS_SUBSET_CAP";

#[derive(Parser, Debug)]
#[command(name = "pmds", version, about = "Truncated and supplemented Pascal matrices over GF(p^h)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a generator matrix in matrix text format.
    GenMatrix {
        /// Field as `p^h` or a bare prime.
        #[arg(long)]
        field: String,
        #[arg(long)]
        k: usize,
        /// Append the unit column s_k.
        #[arg(long)]
        supplemented: bool,
        /// Emit a k x N Reed-Solomon generator instead of a Pascal matrix.
        #[arg(long, value_name = "N")]
        rs: Option<usize>,
    },
    /// Check that every k columns of a matrix are independent.
    VerifyMds {
        /// Matrix text file, `-` for standard input.
        #[arg(long = "in")]
        input: String,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Report the zero count of a matrix against the MDS bound.
    Sparsity {
        #[arg(long = "in")]
        input: String,
    },
    /// Split a file into share files.
    Encode {
        #[arg(long)]
        field: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "supplemented_pascal")]
        kind: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Rebuild a file from share files.
    Decode {
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        shares: Vec<PathBuf>,
    },
    /// Simulate network-coded broadcast over erasure channels.
    Simulate {
        #[arg(long)]
        field: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        receivers: usize,
        /// Per-transmission erasure probability in [0, 1).
        #[arg(long, default_value_t = 0.0)]
        loss: f64,
        #[arg(long)]
        scheme: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "max-tx")]
        max_tx: Option<usize>,
        /// Also push this many payload symbols per packet through the coder.
        #[arg(long)]
        payload: Option<usize>,
        /// Append one row per receiver to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Verify the MDS property of H_{q,k} and P_{q,k} for q <= 16, k <= 6.
    Selftest {
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
}

enum Failure {
    /// Bad flag values; exit 2.
    Usage(String),
    /// The command ran and the answer is negative or an operation failed; exit 1.
    Domain(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Domain(e)
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure::Usage(msg.to_string())
}

fn parse_field(spec: &str) -> Result<FieldParams, Failure> {
    spec.parse()
        .map_err(|e| usage(format!("--field {spec}: {e}")))
}

fn read_input(path: &str) -> anyhow::Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading standard input")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn read_matrix(path: &str) -> anyhow::Result<MatrixGF> {
    let text = read_input(path)?;
    MatrixGF::from_text(&text).with_context(|| format!("parsing matrix from {path}"))
}

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn subset_cap() -> Result<u64, Failure> {
    match std::env::var(SUBSET_CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("{SUBSET_CAP_VAR}={v:?} is not a nonnegative integer"))),
        Err(_) => Ok(DEFAULT_SUBSET_CAP),
    }
}

fn gen_matrix(field: &str, k: usize, supplemented: bool, rs: Option<usize>) -> CmdResult {
    let field = parse_field(field)?;
    let m = match rs {
        Some(n) => {
            let g = rs_generator(&field, k, n).map_err(usage)?;
            if supplemented {
                supplement(&g).map_err(usage)?
            } else {
                g
            }
        }
        None if supplemented => supplemented_pascal(&field, k).map_err(usage)?,
        None => truncated_pascal(&field, k).map_err(usage)?,
    };
    io::stdout()
        .lock()
        .write_all(m.to_text().as_bytes())
        .map_err(anyhow::Error::from)?;
    Ok(ExitCode::SUCCESS)
}

fn verify_mds(input: &str, threads: usize) -> CmdResult {
    if threads == 0 {
        return Err(usage("--threads must be at least 1"));
    }
    let opts = MdsOptions {
        subset_cap: subset_cap()?,
        threads,
    };
    let m = read_matrix(input)?;
    let verdict = is_mds_with(&m, &opts).map_err(anyhow::Error::from)?;
    print_json(&verdict)?;
    Ok(if verdict.is_mds {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn sparsity(input: &str) -> CmdResult {
    let m = read_matrix(input)?;
    print_json(&sparsity_report(&m))?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct EncodeSummary {
    field: String,
    k: usize,
    kind: GeneratorKind,
    n: usize,
    payload_bytes: u64,
    symbols_per_share: usize,
    out_dir: String,
}

fn encode(field: &str, k: usize, kind: &str, input: &Path, out_dir: &Path) -> CmdResult {
    let field = parse_field(field)?;
    let kind: GeneratorKind = kind.parse().map_err(|e| usage(format!("--kind: {e}")))?;
    let config = CodecConfig::full(field, k, kind).map_err(usage)?;
    let bytes = fs::read(input).with_context(|| format!("reading {}", input.display()))?;
    let frames = codec::encode_bytes(&config, &bytes).map_err(anyhow::Error::from)?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    for frame in &frames {
        let path = out_dir.join(format!("share_{}.bin", frame.share.u));
        fs::write(&path, frame.to_bytes()).with_context(|| format!("writing {}", path.display()))?;
    }
    print_json(&EncodeSummary {
        field: config.field().to_string(),
        k,
        kind,
        n: config.n(),
        payload_bytes: bytes.len() as u64,
        symbols_per_share: frames.first().map_or(0, |f| f.share.symbols.len()),
        out_dir: out_dir.display().to_string(),
    })?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct DecodeSummary {
    bytes: usize,
    shares_read: usize,
    out: String,
}

fn decode(out: &Path, shares: &[PathBuf]) -> CmdResult {
    let frames = shares
        .iter()
        .map(|p| {
            let raw = fs::read(p).with_context(|| format!("reading {}", p.display()))?;
            Frame::from_bytes(&raw).with_context(|| format!("parsing {}", p.display()))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let bytes = codec::decode_frames(&frames).map_err(anyhow::Error::from)?;
    fs::write(out, &bytes).with_context(|| format!("writing {}", out.display()))?;
    print_json(&DecodeSummary {
        bytes: bytes.len(),
        shares_read: frames.len(),
        out: out.display().to_string(),
    })?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    field: &'a str,
    k: usize,
    scheme: Scheme,
    seed: u64,
    loss: f64,
    receiver: usize,
    transmissions_observed: u64,
    received_count: u64,
    decoded: bool,
    receptions_at_decode: Option<u64>,
    transmissions_at_decode: Option<u64>,
    dependent_receptions: u64,
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    field: &str,
    k: usize,
    receivers: usize,
    loss: f64,
    scheme: &str,
    seed: u64,
    max_tx: Option<usize>,
    payload: Option<usize>,
    csv_path: Option<&Path>,
) -> CmdResult {
    let field = parse_field(field)?;
    let scheme: Scheme = scheme.parse().map_err(|e| usage(format!("--scheme: {e}")))?;
    let config = SimConfig {
        receivers,
        erasure_prob: loss,
        max_transmissions: max_tx,
        payload_symbols: payload,
        ..SimConfig::new(field, k, scheme, seed)
    };
    config.validate().map_err(usage)?;
    let report = run_sim(&config).map_err(anyhow::Error::from)?;
    if let Some(path) = csv_path {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .with_context(|| format!("opening {}", path.display()))?;
        let fresh = file.metadata().map(|m| m.len() == 0).unwrap_or(true);
        let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
        for s in &report.receivers {
            w.serialize(CsvRow {
                field: &report.field,
                k,
                scheme,
                seed,
                loss,
                receiver: s.receiver,
                transmissions_observed: s.transmissions_observed,
                received_count: s.received_count,
                decoded: s.decoded,
                receptions_at_decode: s.receptions_at_decode,
                transmissions_at_decode: s.transmissions_at_decode,
                dependent_receptions: s.dependent_receptions,
            })
            .map_err(anyhow::Error::from)?;
        }
        w.flush().map_err(anyhow::Error::from)?;
    }
    print_json(&report)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SelftestCase {
    q: u32,
    k: usize,
    matrix: &'static str,
    is_mds: bool,
    subsets_checked: u64,
}

#[derive(Serialize)]
struct SelftestReport {
    passed: usize,
    failed: usize,
    all_passed: bool,
    cases: Vec<SelftestCase>,
}

fn selftest(threads: usize) -> CmdResult {
    if threads == 0 {
        return Err(usage("--threads must be at least 1"));
    }
    let opts = MdsOptions {
        subset_cap: subset_cap()?,
        threads,
    };
    let mut cases = Vec::new();
    for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
        let field = pmds_core::fields::field_of_order(q).map_err(anyhow::Error::from)?;
        for k in 1..=(q as usize).min(6) {
            for (name, m) in [
                ("supplemented_pascal", supplemented_pascal(&field, k)),
                ("truncated_pascal", truncated_pascal(&field, k)),
            ] {
                let m = m.map_err(anyhow::Error::from)?;
                let v = is_mds_with(&m, &opts).map_err(anyhow::Error::from)?;
                cases.push(SelftestCase {
                    q: q as u32,
                    k,
                    matrix: name,
                    is_mds: v.is_mds,
                    subsets_checked: v.subsets_checked,
                });
            }
        }
    }
    let passed = cases.iter().filter(|c| c.is_mds).count();
    let failed = cases.len() - passed;
    for c in cases.iter().filter(|c| !c.is_mds) {
        eprintln!("pmds: selftest: {} q={} k={} is not MDS", c.matrix, c.q, c.k);
    }
    print_json(&SelftestReport {
        passed,
        failed,
        all_passed: failed == 0,
        cases,
    })?;
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::GenMatrix {
            field,
            k,
            supplemented,
            rs,
        } => gen_matrix(&field, k, supplemented, rs),
        Command::VerifyMds { input, threads } => verify_mds(&input, threads),
        Command::Sparsity { input } => sparsity(&input),
        Command::Encode {
            field,
            k,
            kind,
            input,
            out_dir,
        } => encode(&field, k, &kind, &input, &out_dir),
        Command::Decode { out, shares } => decode(&out, &shares),
        Command::Simulate {
            field,
            k,
            receivers,
            loss,
            scheme,
            seed,
            max_tx,
            payload,
            csv,
        } => simulate(&field, k, receivers, loss, &scheme, seed, max_tx, payload, csv.as_deref()),
        Command::Selftest { threads } => selftest(threads),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            ErrorKind::InvalidValue | ErrorKind::ValueValidation => {
                let msg = e.to_string();
                let first = msg.lines().next().unwrap_or("invalid value");
                eprintln!("pmds: {}", first.trim_start_matches("error: "));
                return ExitCode::from(2);
            }
            _ => {
                let _ = e.print();
                return ExitCode::from(2);
            }
        },
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("pmds: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            let broken_pipe = e
                .chain()
                .filter_map(|c| c.downcast_ref::<io::Error>())
                .any(|io| io.kind() == io::ErrorKind::BrokenPipe);
            if broken_pipe {
                return ExitCode::SUCCESS;
            }
            eprintln!("pmds: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::from(1)
        }
    }
}

