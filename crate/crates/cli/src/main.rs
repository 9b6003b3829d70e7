use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use caysum::formats::{self, GroupSpecFile, RegionFile, SubgroupSpec, WitnessFile};
use caysum::graph::subgroup_profile_fast;
use caysum::oracle::{composed_region, stated_region};
use caysum::subgroup::{subgroup_invariants, DEFAULT_SUBGROUP_CAP_G};
use caysum::verify::{CrosscheckOptions, DEFAULT_MAX_CLASSES};
use caysum::{construct_s, DicyclicGroup, Error, Profile, Subgroup};

const EXIT_MISMATCH: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_CAP: u8 = 4;

#[derive(Parser)]
#[command(name = "caysum", version, about = "Regular sets in Cayley sum graphs of generalized dicyclic groups")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Structure of the group: lambda, mu, k, B, A', squares, involutions, classes.
    Info { group: PathBuf },
    /// Every subgroup with its invariants and case label.
    Subgroups {
        group: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SUBGROUP_CAP_G)]
        cap: usize,
    },
    /// Predicted (alpha, beta) pairs for one subgroup, or for all of them.
    Feasible {
        group: PathBuf,
        #[arg(long)]
        subgroup: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SUBGROUP_CAP_G)]
        cap: usize,
    },
    /// Build a connection set realising (alpha, beta) on a subgroup.
    Construct {
        group: PathBuf,
        #[arg(long)]
        subgroup: PathBuf,
        #[arg(long)]
        alpha: usize,
        #[arg(long)]
        beta: usize,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Validate a connection set and report the subgroup's profile.
    Verify {
        group: PathBuf,
        #[arg(long)]
        subgroup: PathBuf,
        #[arg(long)]
        set: PathBuf,
    },
    /// Compare predictions with exhaustive enumeration for every subgroup.
    Crosscheck {
        group: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_CLASSES)]
        max_classes: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Write the CSV table here (`-` for stdout, replacing the JSON).
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SUBGROUP_CAP_G)]
        cap: usize,
        /// Report all timings as 0 so the output is reproducible.
        #[arg(long)]
        no_timings: bool,
    },
}

enum Failure {
    Lib(Error),
    Io(String),
    Code(u8),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible { .. } | Error::RecipeUnavailable(_) => EXIT_INFEASIBLE,
        Error::CapExceeded { .. } => EXIT_CAP,
        Error::RegionMismatch { .. } | Error::Internal(_) => EXIT_MISMATCH,
        _ => EXIT_INPUT,
    }
}

type Run = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Run {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn out(text: &str) {
    // a closed pipe (`caysum info g.json | head`) is not an error
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn emit(v: &impl serde::Serialize) {
    out(&format!("{}\n", serde_json::to_string_pretty(v).expect("serializable")));
}

fn load_group(path: &Path) -> Result<DicyclicGroup, Failure> {
    Ok(formats::parse_group_spec(&read(path)?)?)
}

fn load_subgroup(g: &DicyclicGroup, path: &Path) -> Result<Subgroup, Failure> {
    Ok(formats::parse_subgroup_spec(g, &read(path)?)?)
}

fn region_file(g: &DicyclicGroup, k: &Subgroup) -> RegionFile {
    let region = composed_region(g, k);
    let file = RegionFile::new(k, &region, stated_region(g, k).as_ref());
    if file.stated_pairs.is_some() {
        eprintln!("warning: {}: closed form differs from the composed region; `pairs` is the composed one", k.label());
    }
    file
}

fn info(path: &Path) -> Run {
    let g = load_group(path)?;
    let spec = g.spec();
    let user = GroupSpecFile::from_group(&g);
    emit(&json!({
        "group": g.id(),
        "order": g.order(),
        "input": user,
        "canonical_orders": spec.canonical_orders(),
        "normalization": spec.user_map(),
        "b_squared": g.b_squared(),
        "lambda": spec.lambda(),
        "mu": spec.mu(),
        "k": spec.k(),
        "B": g.b_subgroup().elements(),
        "A_prime": g.a_prime().elements(),
        "squares": g.square_set(),
        "involutions": g.involution_set(),
        "conjugacy_classes": g.conjugacy_classes(),
    }));
    Ok(())
}

fn subgroups(path: &Path, cap: usize) -> Run {
    let g = load_group(path)?;
    let out: Vec<Value> = caysum::enumerate_all_subgroups(&g, cap)?
        .iter()
        .map(|k| {
            json!({
                "spec": SubgroupSpec::from_subgroup(k),
                "invariants": subgroup_invariants(&g, k),
            })
        })
        .collect();
    emit(&out);
    Ok(())
}

fn feasible(path: &Path, subgroup: Option<&Path>, cap: usize) -> Run {
    let g = load_group(path)?;
    match subgroup {
        Some(s) => emit(&region_file(&g, &load_subgroup(&g, s)?)),
        None => {
            let all: Vec<RegionFile> =
                caysum::enumerate_all_subgroups(&g, cap)?.iter().map(|k| region_file(&g, k)).collect();
            emit(&all);
        }
    }
    Ok(())
}

fn construct(path: &Path, subgroup: &Path, alpha: usize, beta: usize, output: Option<&Path>) -> Run {
    let g = load_group(path)?;
    let k = load_subgroup(&g, subgroup)?;
    let w = construct_s(&g, &k, alpha, beta)?;
    let text = serde_json::to_string_pretty(&WitnessFile::from_witness(&w)).expect("serializable");
    match output {
        Some(dest) => {
            write(dest, &format!("{text}\n"))?;
            eprintln!("wrote {} elements to {}", w.set.len(), dest.display());
        }
        None => out(&format!("{text}\n")),
    }
    Ok(())
}

fn verify(path: &Path, subgroup: &Path, set: &Path) -> Run {
    let g = load_group(path)?;
    let k = load_subgroup(&g, subgroup)?;
    let s = formats::parse_connection_set(&g, &read(set)?)?;
    let profile = if s.is_valid() { Some(subgroup_profile_fast(&g, &s, &k)?) } else { None };
    let pair = profile.as_ref().and_then(Profile::pair);
    let in_region = pair.map(|p| composed_region(&g, &k).pairs.contains(&p));
    let note = match (&profile, pair, in_region) {
        (None, ..) => "invalid connection set",
        (_, Some(p), _) if p.is_zero() => "excluded by theorems",
        (_, Some(_), Some(true)) => "predicted",
        (_, Some(_), _) => "not predicted",
        (_, None, _) => "not regular",
    };
    emit(&json!({
        "subgroup": k.label(),
        "size": s.len(),
        "valid": s.is_valid(),
        "normal": s.is_normal(),
        "square_free": s.is_square_free(),
        "missing_conjugates": s.missing_conjugates(),
        "squares_present": s.squares_present(),
        "profile": profile,
        "pair": pair,
        "in_region": in_region,
        "note": note,
    }));
    if !s.is_valid() {
        eprintln!("error: {}", s.require_valid().err().map(|e| e.to_string()).unwrap_or_default());
        return Err(Failure::Code(EXIT_INPUT));
    }
    Ok(())
}

fn crosscheck(path: &Path, opts: CrosscheckOptions, csv: Option<&Path>, no_timings: bool) -> Run {
    let g = load_group(path)?;
    let mut report = caysum::crosscheck(&g, &opts)?;
    if no_timings {
        report.seconds = 0.0;
        report.subgroups.iter_mut().for_each(|s| s.seconds = 0.0);
    }
    match csv {
        Some(p) if p.as_os_str() == "-" => out(&report.to_csv()?),
        Some(p) => {
            write(p, &report.to_csv()?)?;
            emit(&report);
        }
        None => emit(&report),
    }
    for f in report.failures() {
        eprintln!("mismatch: {} [{}]", f.label, f.case_label);
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Code(EXIT_MISMATCH))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Info { group } => info(group),
        Cmd::Subgroups { group, cap } => subgroups(group, *cap),
        Cmd::Feasible { group, subgroup, cap } => feasible(group, subgroup.as_deref(), *cap),
        Cmd::Construct { group, subgroup, alpha, beta, output } => {
            construct(group, subgroup, *alpha, *beta, output.as_deref())
        }
        Cmd::Verify { group, subgroup, set } => verify(group, subgroup, set),
        Cmd::Crosscheck { group, max_classes, workers, csv, cap, no_timings } => {
            let opts = CrosscheckOptions { max_classes: *max_classes, workers: *workers, subgroup_cap: *cap };
            crosscheck(group, opts, csv.as_deref(), *no_timings)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Code(c)) => ExitCode::from(c),
    }
}
