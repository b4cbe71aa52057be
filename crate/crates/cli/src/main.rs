//! `sofic`: batch front end for the sofic-core library.
//!
//! Exit codes: 0 success (or a passing check), 1 malformed input or
//! internal error, 2 honest refusal (hypotheses not met, search budget or
//! size cap exhausted), 3 a witness that was checked and fails.

use clap::{Args, Parser, Subcommand, ValueEnum};
use sofic_core::builder::{
    bicyclic_defect_probe, build_witness, check_hypotheses, BuildOptions, ProbeFamily,
};
use sofic_core::fixtures::{list_fixtures, load_fixture, parse_elements};
use sofic_core::green::eggbox_summary;
use sofic_core::groups::folner::FolnerReport;
use sofic_core::groups::{
    find_folner, folner_quality, AbelianGroup, GroupElem, GroupHandle, SearchBudget,
};
use sofic_core::monoid::{split_labels, ElementRef, FiniteMonoid, FiniteStructured, StructuredMonoid};
use sofic_core::witness::{
    check_witness, diagonal_power_report, diagonal_power_witness, passes, read_witness,
    witness_to_json, DEFAULT_GROUND_CAP,
};
use sofic_core::{rational, Error, Rational, Result};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "sofic", version, about = "Finite approximate actions of monoids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Worker threads for defect counting.
    #[arg(long, default_value_t = 1, global = true)]
    workers: usize,
}

#[derive(Args)]
struct MonoidSource {
    /// Built-in monoid (see `sofic fixtures list`).
    #[arg(long, conflicts_with = "monoid")]
    fixture: Option<String>,
    /// Finite monoid JSON file.
    #[arg(long)]
    monoid: Option<PathBuf>,
}

#[derive(Args)]
struct Caps {
    /// Largest ground set to materialise.
    #[arg(long, env = "SOFIC_GROUND_CAP", default_value_t = DEFAULT_GROUND_CAP)]
    ground_cap: usize,
    /// Largest candidate set measured by Folner searches.
    #[arg(long, env = "SOFIC_SEARCH_BUDGET", default_value_t = SearchBudget::default().max_set)]
    search_budget: usize,
}

impl Caps {
    fn options(&self, workers: usize) -> Result<BuildOptions> {
        if self.ground_cap == 0 || self.search_budget == 0 {
            return Err(Error::InvalidArgument("caps must be positive".into()));
        }
        Ok(BuildOptions {
            ground_cap: self.ground_cap,
            budget: SearchBudget {
                max_set: self.search_budget,
                ..SearchBudget::default()
            },
            workers: workers.max(1),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Egg-box, unit group and Schutzenberger report for a finite monoid.
    Analyze {
        #[command(flatten)]
        source: MonoidSource,
        #[command(flatten)]
        common: Common,
    },
    /// Which sufficient conditions for soficity the monoid meets.
    Hypotheses {
        #[command(flatten)]
        source: MonoidSource,
        /// Elements of K (comma-separated labels, or `all`).
        #[arg(long = "K")]
        k: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Build a (K, eps)-action and write it as a witness file.
    BuildWitness {
        #[command(flatten)]
        source: MonoidSource,
        #[arg(long = "K")]
        k: String,
        #[arg(long)]
        eps: String,
        /// Witness output path.
        #[arg(long, default_value = "witness.json")]
        out: PathBuf,
        /// Also write the provenance log as JSON.
        #[arg(long)]
        log: Option<PathBuf>,
        #[command(flatten)]
        caps: Caps,
        #[command(flatten)]
        common: Common,
    },
    /// Measure a witness file against (K, eps).
    CheckWitness {
        #[command(flatten)]
        source: MonoidSource,
        #[arg(long = "K")]
        k: String,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        witness: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Diagonal power of the left regular action of a finite monoid.
    OracleWitness {
        #[command(flatten)]
        source: MonoidSource,
        #[arg(long = "K")]
        k: String,
        #[arg(long)]
        eps: String,
        /// Witness output path; omitted means report only.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        caps: Caps,
        #[command(flatten)]
        common: Common,
    },
    /// Search for (or measure) a Folner set in a finitely generated abelian group.
    Folner {
        /// `Z`, `Z^2`, `Z/6`, `Z^2xZ/3`, ...
        #[arg(long)]
        group: String,
        /// Elements: integers, or tuples such as `(1,0)`.
        #[arg(long = "K")]
        k: String,
        /// Threshold for the search; the result has quality > 1 - delta.
        #[arg(long, required_unless_present = "box_side")]
        delta: Option<String>,
        /// Measure the box [0, side)^r instead of searching.
        #[arg(long = "box")]
        box_side: Option<i64>,
        #[command(flatten)]
        caps: Caps,
        #[command(flatten)]
        common: Common,
    },
    /// Measure the truncation action of the bicyclic monoid.
    ProbeBicyclic {
        /// Ground set size.
        #[arg(long)]
        n: usize,
        #[arg(long = "K")]
        k: String,
        #[arg(long, default_value = "truncation")]
        family: String,
        #[command(flatten)]
        common: Common,
    },
    /// Built-in monoids.
    Fixtures {
        #[command(subcommand)]
        action: FixturesAction,
    },
}

#[derive(Subcommand)]
enum FixturesAction {
    /// List the built-in monoids and their element syntax.
    List {
        #[command(flatten)]
        common: Common,
    },
}

enum Loaded {
    Finite(FiniteStructured),
    Structured(Arc<dyn StructuredMonoid>),
}

impl Loaded {
    fn structured(&self) -> &dyn StructuredMonoid {
        match self {
            Loaded::Finite(f) => f,
            Loaded::Structured(s) => s.as_ref(),
        }
    }

    fn finite(&self) -> Result<&FiniteMonoid> {
        match self {
            Loaded::Finite(f) => Ok(f.monoid()),
            Loaded::Structured(s) => Err(Error::InvalidArgument(format!(
                "{} is not given by a finite table",
                s.name()
            ))),
        }
    }
}

fn load(source: &MonoidSource) -> Result<Loaded> {
    match (&source.fixture, &source.monoid) {
        (Some(name), None) => {
            let f = load_fixture(name)?;
            Ok(match f.monoid {
                sofic_core::fixtures::FixtureMonoid::Finite(m) => Loaded::Finite(m),
                sofic_core::fixtures::FixtureMonoid::Structured(m) => Loaded::Structured(m),
            })
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            let m = FiniteMonoid::from_json(&text)?;
            Ok(Loaded::Finite(FiniteStructured::named(m, "monoid from file")))
        }
        _ => Err(Error::InvalidArgument(
            "give exactly one of --fixture or --monoid".into(),
        )),
    }
}

fn table_indices(m: &dyn StructuredMonoid, k: &[ElementRef]) -> Result<Vec<usize>> {
    k.iter()
        .map(|e| {
            e.index()
                .ok_or_else(|| Error::InvalidArgument(format!("{} is not a table element", m.label(e))))
        })
        .collect()
}

/// Parses `Z^r` and `Z/n` factors joined by `x`.
fn parse_group(spec: &str) -> Result<GroupHandle> {
    let bad = || Error::InvalidArgument(format!("unrecognised group {spec:?}"));
    let mut free = 0usize;
    let mut torsion = Vec::new();
    for part in spec.split('x').map(str::trim) {
        if part == "Z" {
            free += 1;
        } else if let Some(r) = part.strip_prefix("Z^") {
            free += r.parse::<usize>().map_err(|_| bad())?;
        } else if let Some(n) = part.strip_prefix("Z/") {
            let n: u64 = n.parse().map_err(|_| bad())?;
            if n == 0 {
                return Err(bad());
            }
            torsion.push(n);
        } else {
            return Err(bad());
        }
    }
    if free + torsion.len() == 0 {
        return Err(bad());
    }
    Ok(GroupHandle::abelian(AbelianGroup::with_torsion(free, &torsion)))
}

fn parse_group_elements(g: &GroupHandle, spec: &str) -> Result<Vec<GroupElem>> {
    let GroupHandle::Abelian(a) = g else {
        unreachable!("the command line only builds abelian groups")
    };
    let rank = a.ambient_rank();
    split_labels(spec)
        .iter()
        .map(|s| {
            let bad = || Error::UnknownElement(s.clone());
            let t = s.trim();
            let v: Vec<i64> = match t.strip_prefix('(').and_then(|x| x.strip_suffix(')')) {
                Some(inner) => inner
                    .split(',')
                    .map(|x| x.trim().parse().map_err(|_| bad()))
                    .collect::<Result<_>>()?,
                None => vec![t.parse().map_err(|_| bad())?],
            };
            if v.len() != rank {
                return Err(bad());
            }
            Ok(GroupElem::Vector(a.reduce(&v)))
        })
        .collect()
}

fn box_elements(g: &GroupHandle, side: i64) -> Result<Vec<GroupElem>> {
    let GroupHandle::Abelian(a) = g else {
        unreachable!()
    };
    if side <= 0 {
        return Err(Error::InvalidArgument("box side must be positive".into()));
    }
    let mut pts: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..a.ambient_rank() {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                (0..side).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    let mut seen = std::collections::HashSet::new();
    Ok(pts
        .into_iter()
        .map(|v| GroupElem::Vector(a.reduce(&v)))
        .filter(|e| seen.insert(e.clone()))
        .collect())
}

fn emit(format: Format, json: String, text: String) {
    match format {
        Format::Json => println!("{}", json.trim_end()),
        Format::Text => print!("{text}"),
    }
}

fn write_file(path: &PathBuf, contents: &str) -> Result<()> {
    std::fs::write(path, contents)?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Analyze { source, common } => {
            let loaded = load(&source)?;
            let report = eggbox_summary(loaded.finite()?);
            emit(common.format, report.to_json(), report.to_text());
        }
        Command::Hypotheses { source, k, common } => {
            let loaded = load(&source)?;
            let m = loaded.structured();
            let k = k.map(|s| parse_elements(m, &s)).transpose()?;
            let report = check_hypotheses(m, k.as_deref());
            emit(common.format, report.to_json(), report.to_text());
        }
        Command::BuildWitness {
            source,
            k,
            eps,
            out,
            log,
            caps,
            common,
        } => {
            let loaded = load(&source)?;
            let m = loaded.structured();
            let k = parse_elements(m, &k)?;
            let eps = rational::parse(&eps)?;
            let built = build_witness(m, &k, &eps, &caps.options(common.workers)?)?;
            write_file(&out, &witness_to_json(&built.witness))?;
            if let Some(path) = log {
                write_file(&path, &built.log.to_json())?;
            }
            emit(
                common.format,
                built.log.to_json(),
                format!("{}wrote {} (N = {})\n", built.log.to_text(), out.display(), built.witness.n),
            );
        }
        Command::CheckWitness {
            source,
            k,
            eps,
            witness,
            common,
        } => {
            let loaded = load(&source)?;
            let m = loaded.structured();
            let k = parse_elements(m, &k)?;
            let eps = rational::parse(&eps)?;
            let w = read_witness(&witness)?;
            let report = check_witness(m, &k, &w, common.workers.max(1))?;
            let ok = passes(&report, &eps);
            let verdict = if ok { "PASS" } else { "FAIL" };
            emit(
                common.format,
                format!(
                    "{{\"verdict\":\"{verdict}\",\"eps\":\"{}\",\"report\":{}}}",
                    rational::render(&eps),
                    report.to_json().trim_end()
                ),
                format!("{}{verdict}\n", report.to_text()),
            );
            if !ok {
                return Ok(ExitCode::from(3));
            }
        }
        Command::OracleWitness {
            source,
            k,
            eps,
            out,
            caps,
            common,
        } => {
            let loaded = load(&source)?;
            let fm = loaded.finite()?;
            let m = loaded.structured();
            let k = parse_elements(m, &k)?;
            let idx = table_indices(m, &k)?;
            let eps = rational::parse(&eps)?;
            let (plan, report) = diagonal_power_report(fm, &idx, &eps)?;
            if let Some(path) = out {
                let w = diagonal_power_witness(fm, &idx, &eps, caps.ground_cap)?;
                write_file(&path, &witness_to_json(&w))?;
            }
            let verdict = if passes(&report, &eps) { "PASS" } else { "FAIL" };
            emit(
                common.format,
                format!(
                    "{{\"power\":{},\"agreement\":\"{}\",\"verdict\":\"{verdict}\",\"report\":{}}}",
                    plan.power,
                    rational::render(&plan.agreement),
                    report.to_json().trim_end()
                ),
                format!(
                    "diagonal power n = {} (agreement {}), N = {}\n{}{verdict}\n",
                    plan.power,
                    rational::render(&plan.agreement),
                    plan.ground_size,
                    report.to_text()
                ),
            );
        }
        Command::Folner {
            group,
            k,
            delta,
            box_side,
            caps,
            common,
        } => {
            let g = parse_group(&group)?;
            let k = parse_group_elements(&g, &k)?;
            let (f_size, quality): (usize, Rational) = match box_side {
                Some(side) => {
                    let f = box_elements(&g, side)?;
                    let q = folner_quality(&g, &k, &f)?;
                    (f.len(), q)
                }
                None => {
                    let delta = rational::parse(delta.as_deref().unwrap_or_default())?;
                    let budget = caps.options(common.workers)?.budget;
                    let f = find_folner(&g, &k, &delta, &budget)?;
                    (f.len(), f.quality)
                }
            };
            let report = FolnerReport {
                group: g.describe(),
                k: k.iter().map(|x| g.label(x)).collect(),
                f_size,
                quality: rational::render(&quality),
            };
            emit(
                common.format,
                serde_json::to_string(&report).expect("report serializes"),
                format!(
                    "group: {}\nK: [{}]\n|F| = {}\nquality = {}\n",
                    report.group,
                    report.k.join(", "),
                    report.f_size,
                    report.quality
                ),
            );
        }
        Command::ProbeBicyclic {
            n,
            k,
            family,
            common,
        } => {
            let family: ProbeFamily = family.parse()?;
            let k = parse_elements(&sofic_core::monoid::Bicyclic, &k)?;
            let report = bicyclic_defect_probe(n, &k, family, common.workers.max(1))?;
            emit(common.format, report.to_json(), report.to_text());
        }
        Command::Fixtures {
            action: FixturesAction::List { common },
        } => {
            let list = list_fixtures();
            let json: Vec<serde_json::Value> = list
                .iter()
                .map(|(n, d, g)| serde_json::json!({"name": n, "description": d, "elements": g}))
                .collect();
            let width = list.iter().map(|e| e.0.len()).max().unwrap_or(0);
            let text: String = list
                .iter()
                .map(|(n, d, g)| format!("{n:<width$}  {d}\n{:<width$}  elements: {g}\n", ""))
                .collect();
            emit(common.format, serde_json::Value::Array(json).to_string(), text);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.module());
            if e.is_refusal() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
