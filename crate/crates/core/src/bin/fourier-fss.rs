use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use fourier_fss::access::PartySet;
use fourier_fss::harness::audit::{self, SecurityConfig};
use fourier_fss::harness::{self, InstanceConfig, KeyFile, ShareFile};
use fourier_fss::Result;

/// Function secret sharing over monotone access structures.
#[derive(Parser)]
#[command(name = "fourier-fss", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split the configured function into party_1.key ... party_p.key.
    Keygen {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Overrides the config seed. Ignored without --insecure-test-rng.
        #[arg(long)]
        seed: Option<u64>,
        /// Allow a fixed seed. Keys generated this way are not secret.
        #[arg(long)]
        insecure_test_rng: bool,
    },
    /// Evaluate one key at x.
    Eval {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        x: u64,
        /// Defaults to party_<i>.share next to the key.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct f(x) from share files.
    Decode {
        #[arg(required = true)]
        shares: Vec<PathBuf>,
        /// Use only these parties, e.g. "1,3".
        #[arg(long)]
        parties: Option<PartySet>,
    },
    /// Check the span program against the formula on every subset.
    AuditStructure {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        parties: usize,
        #[arg(long)]
        q: u64,
    },
    /// Enumerate all dealer randomness and compare forbidden-set views.
    AuditSecurity {
        #[arg(long)]
        config: PathBuf,
    },
}

enum Outcome {
    Ok,
    Violations,
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Keygen {
            config,
            out,
            seed,
            insecure_test_rng,
        } => {
            let cfg = InstanceConfig::load(&config)?;
            let seed = seed.or(cfg.seed);
            let mut rng = match (seed, insecure_test_rng) {
                (Some(s), true) => {
                    eprintln!("warning: deterministic test rng in use; these keys are not secret");
                    ChaCha20Rng::seed_from_u64(s)
                }
                (Some(_), false) => {
                    eprintln!("warning: seed ignored without --insecure-test-rng");
                    ChaCha20Rng::from_entropy()
                }
                (None, _) => ChaCha20Rng::from_entropy(),
            };
            let keys = harness::keygen(&cfg, &mut rng)?;
            for path in harness::write_keys(&out, &keys)? {
                println!("{}", path.display());
            }
        }
        Command::Eval { key, x, out } => {
            let file = KeyFile::load(&key)?;
            let share = harness::eval(&file, x)?;
            let out = out.unwrap_or_else(|| {
                harness::share_path(key.parent().unwrap_or(std::path::Path::new(".")), share.party)
            });
            share.save(&out)?;
            println!("{}", out.display());
        }
        Command::Decode { shares, parties } => {
            let files = shares.iter().map(|p| ShareFile::load(p)).collect::<Result<Vec<_>>>()?;
            print!("{}", harness::decode(&files, parties)?);
        }
        Command::AuditStructure { formula, parties, q } => {
            let report = audit::audit_structure(&formula, parties, q)?;
            print!("{report}");
            if !report.passed() {
                return Ok(Outcome::Violations);
            }
        }
        Command::AuditSecurity { config } => {
            let report = SecurityConfig::load(&config)?.run()?;
            print!("{report}");
            if !report.all_zero() {
                return Ok(Outcome::Violations);
            }
        }
    }
    Ok(Outcome::Ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violations) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

