//! Command line front end. Every subcommand resolves a root system from
//! the catalog, runs the exact kernel, and emits either the line-based
//! form format or a human-readable report. Failures exit nonzero with a
//! stable `error: category=<Name>` line on stderr.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use weyljf_core::error::KernelError;
use weyljf_core::io::{read_form, read_form_from, write_form};
use weyljf_core::jacobi::JacobiForm;
use weyljf_core::jacobian::jacobian;
use weyljf_core::rootsys::{catalog, verify_catalog, RootSystemData, RootSystemTag};
use weyljf_core::structure::{
    build_g_system, check_free_criterion, decompose, e8_pipeline, ScalarOrG,
};

#[derive(Parser)]
#[command(
    name = "weyljf",
    version,
    about = "Exact computations with Weyl-invariant weak Jacobi forms on root lattices"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Show catalog data, either one root system or a summary of all
    Catalog {
        /// Root system tag (A1..A8, B2..B8, C3..C8, D4..D8, E6..E8, F4, G2),
        /// or just the family letter together with --rank
        #[arg(long)]
        root_system: Option<String>,
        /// Rank, if the family letter alone was given
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Compute the theta block of a root system
    Phi {
        #[arg(long)]
        root_system: String,
        #[arg(long)]
        rank: Option<usize>,
        /// Number of q-orders to compute (trunc24 = 24 * q-order)
        #[arg(long)]
        q_order: i64,
        /// Abort if an intermediate product exceeds this many stored terms
        #[arg(long)]
        max_terms: Option<usize>,
        /// Write the form here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the built-in generator tower of a root system
    Generators {
        #[arg(long)]
        root_system: String,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        q_order: i64,
        /// Write one file per generator into this directory
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Jacobian of rank + 1 serialized forms
    Jacobian {
        /// Form files, in slot order
        #[arg(required = true)]
        forms: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify that a generator tower freely generates the invariant algebra
    VerifyFree {
        #[arg(long)]
        root_system: String,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        q_order: i64,
        /// Generator form files; the built-in tower is used when absent
        #[arg(long, num_args = 1..)]
        generators: Vec<PathBuf>,
    },
    /// Decompose an invariant form into a polynomial in the generators
    Decompose {
        #[arg(long)]
        root_system: String,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        q_order: i64,
        /// The form to decompose
        #[arg(long)]
        target: PathBuf,
        /// Generator form files; the built-in tower is used when absent
        #[arg(long, num_args = 1..)]
        generators: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a serialized form: parse, elliptic law, group invariance
    Check { form: PathBuf },
    /// Staged analysis of a nine-form tuple over E8
    E8 {
        /// Nine form files matching the declared (weight, index) table
        #[arg(required = true)]
        forms: Vec<PathBuf>,
        #[arg(long, default_value_t = 2_000_000)]
        max_terms: usize,
        /// Smallest index treated as non-polynomial, reporting only
        #[arg(long = "declared-M", default_value_t = 2)]
        declared_m: i64,
    },
}

fn resolve_tag(root_system: &str, rank: Option<usize>) -> Result<RootSystemTag, KernelError> {
    match rank {
        Some(r) => RootSystemTag::parse(&format!("{root_system}{r}")),
        None => RootSystemTag::parse(root_system),
    }
}

fn trunc_from(q_order: i64) -> Result<i64, KernelError> {
    if q_order < 1 {
        return Err(KernelError::Parse(format!(
            "q-order must be at least 1, got {q_order}"
        )));
    }
    Ok(24 * q_order)
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os("WEYLJF_CACHE_DIR").map(PathBuf::from)
}

fn cache_read(name: &str) -> Option<(JacobiForm, String)> {
    let p = cache_dir()?.join(name);
    let text = std::fs::read_to_string(p).ok()?;
    let form = read_form(&text).ok()?;
    Some((form, text))
}

fn cache_write(name: &str, text: &str) -> Result<(), KernelError> {
    if let Some(dir) = cache_dir() {
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join(name), text)?;
    }
    Ok(())
}

/// Theta block, reusing the serialized cache entry byte for byte when the
/// cache directory is set.
fn phi_cached(
    data: &RootSystemData,
    q_order: i64,
    max_terms: Option<usize>,
) -> Result<(JacobiForm, String), KernelError> {
    let name = format!("phi-{}-q{q_order}.form", data.tag);
    if let Some(hit) = cache_read(&name) {
        return Ok(hit);
    }
    let trunc = trunc_from(q_order)?;
    let form = weyljf_core::blocks::phi_r(data, trunc, max_terms)?;
    let text = write_form(&form)?;
    cache_write(&name, &text)?;
    Ok((form, text))
}

/// Built-in tower with the same caching discipline: all slots must hit,
/// otherwise everything is rebuilt and rewritten.
fn tower_cached(
    data: &RootSystemData,
    q_order: i64,
) -> Result<Vec<(JacobiForm, String)>, KernelError> {
    let count = data
        .generator_signature
        .as_ref()
        .map(|s| s.len())
        .unwrap_or(0);
    let names: Vec<String> = (1..=count)
        .map(|i| format!("tower-{}-q{q_order}-{i}.form", data.tag))
        .collect();
    if count > 0 {
        let hits: Vec<_> = names.iter().filter_map(|n| cache_read(n)).collect();
        if hits.len() == count {
            return Ok(hits);
        }
    }
    let trunc = trunc_from(q_order)?;
    let tower = weyljf_core::structure::builtin_tower(data, trunc)?;
    let mut out = Vec::with_capacity(tower.len());
    for (form, name) in tower.into_iter().zip(&names) {
        let text = write_form(&form)?;
        cache_write(name, &text)?;
        out.push((form, text));
    }
    Ok(out)
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), KernelError> {
    match out {
        Some(p) => {
            std::fs::write(p, text)?;
            eprintln!("wrote {}", p.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn load_forms(paths: &[PathBuf]) -> Result<Vec<JacobiForm>, KernelError> {
    paths.iter().map(|p| read_form_from(p)).collect()
}

fn describe(f: &JacobiForm) -> String {
    format!(
        "weight {} index {} character {} trunc24 {}",
        f.weight, f.index, f.character, f.series.trunc24
    )
}

fn run(cli: Cli) -> Result<(), KernelError> {
    match cli.cmd {
        Cmd::Catalog { root_system, rank } => {
            match root_system {
                Some(rs) => {
                    let tag = resolve_tag(&rs, rank)?;
                    let data = catalog(tag)?;
                    let report = verify_catalog(&data);
                    print!("{report}");
                    if !report.passed() {
                        return Err(KernelError::ValidationFailed(format!(
                            "catalog self-check failed for {tag}"
                        )));
                    }
                }
                None => {
                    for tag in RootSystemTag::all() {
                        let data = catalog(tag)?;
                        println!(
                            "{tag} rank={} roots={} h_dual={} theta_block=({}, {}) group={}",
                            data.rank,
                            data.num_roots,
                            data.h_dual,
                            data.phi_weight,
                            data.phi_index,
                            data.group.name
                        );
                    }
                }
            }
            Ok(())
        }
        Cmd::Phi {
            root_system,
            rank,
            q_order,
            max_terms,
            out,
        } => {
            let tag = resolve_tag(&root_system, rank)?;
            let data = catalog(tag)?;
            let (_, text) = phi_cached(&data, q_order, max_terms)?;
            emit(&text, &out)
        }
        Cmd::Generators {
            root_system,
            rank,
            q_order,
            out_dir,
        } => {
            let tag = resolve_tag(&root_system, rank)?;
            let data = catalog(tag)?;
            let tower = tower_cached(&data, q_order)?;
            match out_dir {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)?;
                    for (i, (_, text)) in tower.iter().enumerate() {
                        let p = dir.join(format!("gen-{tag}-q{q_order}-{}.form", i + 1));
                        std::fs::write(&p, text)?;
                        println!("{}", p.display());
                    }
                }
                None => {
                    for (_, text) in &tower {
                        print!("{text}");
                    }
                }
            }
            Ok(())
        }
        Cmd::Jacobian { forms, out } => {
            let tuple = load_forms(&forms)?;
            let j = jacobian(&tuple)?;
            let text = write_form(&j)?;
            emit(&text, &out)
        }
        Cmd::VerifyFree {
            root_system,
            rank,
            q_order,
            generators,
        } => {
            let tag = resolve_tag(&root_system, rank)?;
            let data = catalog(tag)?;
            let system = if generators.is_empty() {
                let tower: Vec<JacobiForm> = tower_cached(&data, q_order)?
                    .into_iter()
                    .map(|(f, _)| f)
                    .collect();
                check_free_criterion(&data, &tower)?
            } else {
                check_free_criterion(&data, &load_forms(&generators)?)?
            };
            println!("system: {tag}");
            println!("generators: {}", system.generators.len());
            println!("jacobian: {}", describe(&system.jacobian));
            println!("theta block: {}", describe(&system.theta_block));
            match &system.factor {
                ScalarOrG::Constant(c) => println!("factor: constant {c}"),
                ScalarOrG::Modular { g, poly } => {
                    println!("factor: modular of weight {} ({poly})", g.weight)
                }
            }
            println!("verdict: free");
            Ok(())
        }
        Cmd::Decompose {
            root_system,
            rank,
            q_order,
            target,
            generators,
            out,
        } => {
            let tag = resolve_tag(&root_system, rank)?;
            let data = catalog(tag)?;
            let system = if generators.is_empty() {
                let tower: Vec<JacobiForm> = tower_cached(&data, q_order)?
                    .into_iter()
                    .map(|(f, _)| f)
                    .collect();
                check_free_criterion(&data, &tower)?
            } else {
                build_g_system(&data, &load_forms(&generators)?)?
            };
            let target = read_form_from(&target)?;
            let result = decompose(&system, &target)?;
            let mut text = String::new();
            text.push_str(&format!("system: {tag}\n"));
            text.push_str(&format!("target: {}\n", describe(&target)));
            text.push_str(&format!(
                "certified_trunc24 = {}\n",
                result.certified_trunc24
            ));
            text.push_str(&result.to_string());
            emit(&text, &out)
        }
        Cmd::Check { form } => {
            let f = read_form_from(&form)?;
            println!("form: {} over {}", describe(&f), f.series.lat.name);
            let ell = f.check_elliptic();
            println!("elliptic: {ell}");
            let grp = f.check_group_invariance();
            println!("group: {grp}");
            if !ell.ok() || !grp.ok() {
                return Err(KernelError::ValidationFailed(
                    "the form fails its invariance checks".into(),
                ));
            }
            Ok(())
        }
        Cmd::E8 {
            forms,
            max_terms,
            declared_m,
        } => {
            let data = catalog(RootSystemTag::E8)?;
            let tuple = load_forms(&forms)?;
            let report = e8_pipeline(&data, &tuple, max_terms, declared_m)?;
            print!("{report}");
            Ok(())
        }
    }
}

fn main() -> std::process::ExitCode {
    // die quietly when a downstream pipe closes early
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: category={}", e.category());
            eprintln!("{e}");
            std::process::ExitCode::FAILURE
        }
    }
}
