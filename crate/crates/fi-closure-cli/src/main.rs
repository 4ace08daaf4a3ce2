//! Command-line front end: JSON in, JSON out, deterministic for a fixed
//! seed. Exit codes: 0 success, 1 verification failures, 2 bad input,
//! 3 membership violation (the witness is printed), 4 internal invariant
//! failure.

use clap::{Args, Parser, Subcommand};
use fi_closure::{
    canonical_generators, complete, factor_model_preset, membership_witness, run_verify_with,
    shift_profile, Error, EquivariantMap, MatrixPoint, MinorWitness, OffDiagTensor, VerifyOptions,
};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fi-closure", version, about = "Determinantal-locus equations, equivariant pushforwards, and bounded-rank completion over exact rationals")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate the canonical defining equations of the rank-`l` locus for
    /// order-`d` off-diagonal tensors.
    GenEqs {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        l: usize,
        /// Write the JSON here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Push a matrix point forward through a map; prints one tensor per
    /// component.
    Push {
        #[command(flatten)]
        map: MapSource,
        /// Matrix point JSON file.
        #[arg(long)]
        point: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Test membership in the rank-`l` locus; exits 3 with the first
    /// violated minor when the tensor is outside.
    Member {
        /// Off-diagonal tensor JSON file.
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Complete an off-diagonal tensor to a full tensor of certified
    /// bounded rank.
    Complete {
        /// Off-diagonal tensor JSON file.
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long)]
        l: usize,
        /// Also write the recursion trace to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Include the dense tensor in the output (subject to the
        /// FI_CLOSURE_DENSE_CAP materialization cap).
        #[arg(long)]
        dense: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print the factor-model map with `k` latent rows.
    Preset {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generator multiplicities of the order-`d` coordinate algebra after
    /// shifting by an `m`-element set.
    ShiftProfile {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run seeded end-to-end verification trials against a map.
    Verify {
        #[command(flatten)]
        map: MapSource,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// Corrupt one pushforward per trial to prove failures are caught.
        #[arg(long)]
        negative_control: bool,
        /// Include per-stage wall-clock times (breaks byte determinism).
        #[arg(long)]
        timings: bool,
        /// Screen the membership stage modulo this prime; rejections stay
        /// exact.
        #[arg(long)]
        modulus: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Where the map comes from: a JSON file or the factor-model preset.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct MapSource {
    /// Equivariant map JSON file.
    #[arg(long)]
    map: Option<PathBuf>,
    /// Use factor_model_preset(k) instead of a file.
    #[arg(long)]
    preset_k: Option<usize>,
}

#[derive(Serialize)]
struct MemberOut<'a> {
    member: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<&'a MinorWitness>,
}

#[derive(Serialize)]
struct CountsOut {
    counts: Vec<u128>,
}

enum Failure {
    BadInput(String),
    Violation(MinorWitness),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::NotInVariety { witness, .. } => Failure::Violation(witness),
            Error::AlgorithmInvariant(msg) => Failure::Invariant(msg),
            other => Failure::BadInput(other.to_string()),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::BadInput(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::BadInput(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(value: &T, output: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string(value)
        .map_err(|e| Failure::Invariant(format!("serialization failed: {e}")))?;
    text.push('\n');
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::BadInput(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_map(source: &MapSource) -> Result<EquivariantMap, Failure> {
    match (&source.map, source.preset_k) {
        (Some(path), None) => read_json(path),
        (None, Some(k)) => Ok(factor_model_preset(k)?),
        _ => unreachable!("clap enforces exactly one map source"),
    }
}

fn run(cmd: Cmd) -> Result<u8, Failure> {
    match cmd {
        Cmd::GenEqs { d, l, output } => {
            emit(&canonical_generators(d, l), output.as_deref())?;
            Ok(0)
        }
        Cmd::Push { map, point, output } => {
            let map = load_map(&map)?;
            let point: MatrixPoint = read_json(&point)?;
            emit(&map.pushforward(&point)?, output.as_deref())?;
            Ok(0)
        }
        Cmd::Member { tensor, l, output } => {
            let tensor: OffDiagTensor = read_json(&tensor)?;
            match membership_witness(&tensor, l) {
                None => {
                    emit(&MemberOut { member: true, witness: None }, output.as_deref())?;
                    Ok(0)
                }
                Some(w) => {
                    emit(&MemberOut { member: false, witness: Some(&w) }, output.as_deref())?;
                    Ok(3)
                }
            }
        }
        Cmd::Complete { tensor, l, trace, dense, output } => {
            let tensor: OffDiagTensor = read_json(&tensor)?;
            let result = complete(&tensor, l)?;
            if let Some(path) = trace {
                emit(&result.trace, Some(&path))?;
            }
            #[derive(Serialize)]
            struct CompleteOut<'a> {
                certified_cap: u128,
                realized_terms: usize,
                decomposition: &'a fi_closure::RankDecomposition,
                #[serde(skip_serializing_if = "Option::is_none")]
                dense: Option<fi_closure::DenseTensor>,
            }
            let dense = if dense { Some(result.decomposition.densify()?) } else { None };
            emit(
                &CompleteOut {
                    certified_cap: result.certified_cap,
                    realized_terms: result.decomposition.term_count(),
                    decomposition: &result.decomposition,
                    dense,
                },
                output.as_deref(),
            )?;
            Ok(0)
        }
        Cmd::Preset { k, output } => {
            emit(&factor_model_preset(k)?, output.as_deref())?;
            Ok(0)
        }
        Cmd::ShiftProfile { d, m, output } => {
            emit(&CountsOut { counts: shift_profile(d, m).counts }, output.as_deref())?;
            Ok(0)
        }
        Cmd::Verify {
            map,
            width,
            trials,
            seed,
            negative_control,
            timings,
            modulus,
            output,
        } => {
            let map = load_map(&map)?;
            let options =
                VerifyOptions { negative_control, modulus, collect_timings: timings };
            let report = run_verify_with(&map, width, trials, seed, &options)?;
            emit(&report, output.as_deref())?;
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::BadInput(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Violation(witness)) => {
            // The witness goes to stdout so scripted callers can parse it.
            match serde_json::to_string(&MemberOut { member: false, witness: Some(&witness) }) {
                Ok(text) => println!("{text}"),
                Err(e) => eprintln!("error: serialization failed: {e}"),
            }
            eprintln!("error: a minor of size l+1 is nonzero at {witness}");
            ExitCode::from(3)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(4)
        }
    }
}
