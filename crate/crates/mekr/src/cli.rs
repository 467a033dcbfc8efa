//! Command-line front end.
//!
//! Data goes to standard output, diagnostics to standard error. Exit codes:
//! 0 = success / all checks pass, 1 = property violation found (witness on
//! stderr), 2 = usage or resource error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::OpenOptions;
use std::io::Write as IoWrite;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::coeffs::{build_coeff_table, DEFAULT_ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::lattice::enumerate_maximal_intersecting;
use crate::multiset::fst_family_capped;
use crate::spectrum::{
    check_order_inequalities, check_transform_range, check_unimodality_range,
    check_window_dominance_range, check_window_intervals, spectrum_profile, window_set,
    CheckReport,
};
use crate::verify::{construct_exceptional_family, sweep, verify_instance, Method};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
enum Format {
    Csv,
    #[default]
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum, Default)]
enum MethodArg {
    #[default]
    Auto,
    Reduction,
    Brute,
    Both,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Auto => Method::Auto,
            MethodArg::Reduction => Method::Reduction,
            MethodArg::Brute => Method::Brute,
            MethodArg::Both => Method::Both,
        }
    }
}

/// Multiplicity bound; `inf` (or `unbounded`) is normalized to `m := k`.
fn resolve_m(raw: &str, k: u32) -> Result<u32> {
    match raw {
        "inf" | "infinity" | "unbounded" => Ok(k.max(1)),
        _ => raw
            .parse::<u32>()
            .ok()
            .filter(|&m| m >= 1)
            .ok_or_else(|| Error::usage(format!("invalid multiplicity bound '{raw}'"))),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mekr",
    version,
    about = "Exact verification of extremal intersecting families of bounded multisets"
)]
struct Cli {
    /// Worker threads (default: available parallelism; env MEKR_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Cap on materialized enumerations.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the coefficient row C(k, l) for l in the nonzero range.
    Coeffs {
        #[arg(long)]
        k: u32,
        /// Multiplicity bound, or `inf`.
        #[arg(long)]
        m: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// First-maximum profile of the coefficient row.
    Spectrum {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: String,
    },
    /// The threshold window set for (j, l, r).
    Window {
        #[arg(long)]
        j: u32,
        #[arg(long)]
        l: u64,
        #[arg(long)]
        r: u32,
    },
    /// Exhaustive range checks.
    Check {
        #[command(subcommand)]
        what: CheckCommand,
    },
    /// Enumerate all maximal intersecting families of proper subsets of [n].
    Maximal {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = false)]
        count_only: bool,
    },
    /// Construct distinguished families as multiplicity vectors.
    Construct {
        #[command(subcommand)]
        what: ConstructCommand,
    },
    /// Verify one instance end to end.
    Verify {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: String,
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Append the JSON record to this ledger file.
        #[arg(long)]
        ledger: Option<PathBuf>,
    },
    /// Verify every instance in a parameter box, with a JSON-lines ledger.
    Sweep {
        #[arg(long)]
        n_max: u32,
        #[arg(long)]
        m_max: u32,
        #[arg(long)]
        k_max: u32,
        #[arg(long)]
        ledger: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum CheckCommand {
    /// The coefficient transform identity over its tuple grid.
    Transform {
        #[arg(long, default_value_t = 6)]
        m_max: u32,
        #[arg(long, default_value_t = 6)]
        q_max: u32,
        /// Collect every violating witness instead of stopping at the first.
        #[arg(long, default_value_t = false)]
        all_witnesses: bool,
    },
    /// Unimodality, window consecutiveness, row-order and window dominance.
    Inequalities {
        #[arg(long, default_value_t = 300)]
        k_max: u32,
        #[arg(long, default_value_t = 8)]
        m_max: u32,
        #[arg(long, default_value_t = 20)]
        n_pad: u32,
        #[arg(long, default_value_t = 40)]
        window_k_max: u32,
        #[arg(long, default_value_t = 5)]
        window_m_max: u32,
        #[arg(long, default_value_t = 12)]
        interval_m_max: u32,
        #[arg(long, default_value_t = false)]
        all_witnesses: bool,
    },
}

#[derive(Debug, Subcommand)]
enum ConstructCommand {
    /// The star of all k-multisets containing symbol 1.
    Star(InstanceArgs),
    /// k-multisets with at least s + t elements among the first 2s + t symbols.
    Fst {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        t: u32,
    },
    /// The non-trivial extremal family for boundary instances.
    Remark(InstanceArgs),
}

#[derive(Debug, Args)]
struct InstanceArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    m: String,
    #[arg(long)]
    k: u32,
}

fn emit_reports(reports: &[CheckReport]) -> Result<()> {
    println!(
        "{}",
        serde_json::to_string(reports).expect("reports serialize")
    );
    if let Some(bad) = reports.iter().find(|r| !r.pass) {
        return Err(Error::violation(
            bad.property.clone(),
            bad.witness.clone().unwrap_or_else(|| "unknown".to_string()),
        ));
    }
    Ok(())
}

fn append_ledger(path: &PathBuf, line: &str) -> Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(f, "{line}")?;
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    let cap = cli.cap;
    if cap < 1 {
        return Err(Error::usage("--cap must be >= 1"));
    }
    match cli.command {
        Command::Coeffs { k, m, format } => {
            let m = resolve_m(&m, k)?;
            let table = build_coeff_table(k, m)?;
            match format {
                Format::Csv => {
                    println!("l,C");
                    for l in table.q()..=k {
                        println!("{l},{}", table.value(l as i64));
                    }
                }
                Format::Json => {
                    let map: BTreeMap<u32, String> = (table.q()..=k)
                        .map(|l| (l, table.value(l as i64).to_string()))
                        .collect();
                    println!("{}", serde_json::to_string(&map).expect("map serializes"));
                }
            }
            Ok(())
        }
        Command::Spectrum { k, m } => {
            let m = resolve_m(&m, k)?;
            let profile = spectrum_profile(k, m)?;
            println!("{}", profile.to_json());
            Ok(())
        }
        Command::Window { j, l, r } => {
            let w = window_set(j, l, r)?;
            println!("{}", serde_json::to_string(&w).expect("window serializes"));
            Ok(())
        }
        Command::Check { what } => match what {
            CheckCommand::Transform {
                m_max,
                q_max,
                all_witnesses,
            } => emit_reports(&[check_transform_range(m_max, q_max, all_witnesses)]),
            CheckCommand::Inequalities {
                k_max,
                m_max,
                n_pad,
                window_k_max,
                window_m_max,
                interval_m_max,
                all_witnesses,
            } => emit_reports(&[
                check_unimodality_range(k_max, 2, m_max, all_witnesses),
                check_window_intervals(interval_m_max, all_witnesses),
                check_order_inequalities(k_max, 2, m_max, n_pad, all_witnesses),
                check_window_dominance_range(window_k_max, 2, window_m_max, all_witnesses),
            ]),
        },
        Command::Maximal { n, count_only } => {
            let families = enumerate_maximal_intersecting(n)?;
            if count_only {
                println!("{}", serde_json::json!({ "n": n, "count": families.len() }));
            } else {
                let masks: Vec<&[u32]> = families.iter().map(|f| f.members()).collect();
                println!(
                    "{}",
                    serde_json::to_string(&masks).expect("masks serialize")
                );
            }
            Ok(())
        }
        Command::Construct { what } => {
            let family = match what {
                ConstructCommand::Star(args) => {
                    let m = resolve_m(&args.m, args.k)?;
                    fst_family_capped(args.n, m, args.k, 0, 1, cap)?
                }
                ConstructCommand::Fst { instance, s, t } => {
                    let m = resolve_m(&instance.m, instance.k)?;
                    fst_family_capped(instance.n, m, instance.k, s, t, cap)?
                }
                ConstructCommand::Remark(args) => {
                    let m = resolve_m(&args.m, args.k)?;
                    construct_exceptional_family(args.n, m, args.k, cap)?
                }
            };
            println!(
                "{}",
                serde_json::to_string(&family.to_vectors()).expect("vectors serialize")
            );
            Ok(())
        }
        Command::Verify {
            n,
            m,
            k,
            method,
            ledger,
        } => {
            let m = resolve_m(&m, k)?;
            let report = verify_instance(n, m, k, method.into(), cap)?;
            let line = serde_json::to_string(&report.to_record()).expect("record serializes");
            println!("{line}");
            if let Some(path) = ledger {
                append_ledger(&path, &line)?;
            }
            Ok(())
        }
        Command::Sweep {
            n_max,
            m_max,
            k_max,
            ledger,
        } => {
            let summary = sweep(n_max, m_max, k_max, ledger.as_deref(), cap)?;
            println!(
                "{}",
                serde_json::to_string(&summary).expect("summary serializes")
            );
            Ok(())
        }
    }
}

fn thread_count(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| {
        std::env::var("MEKR_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .filter(|&t| t >= 1)
}

/// Parses arguments, dispatches, and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let msg = e.to_string();
            eprintln!(
                "{}",
                msg.lines().next().unwrap_or("error: invalid arguments")
            );
            return 2;
        }
    };

    let outcome = match thread_count(cli.threads) {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build();
            match pool {
                Ok(pool) => pool.install(|| dispatch(cli)),
                Err(e) => Err(Error::usage(format!("could not build thread pool: {e}"))),
            }
        }
        None => dispatch(cli),
    };

    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
