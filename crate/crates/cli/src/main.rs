//! `toricmirror`: exact toric mirror-symmetry pipeline.
//!
//! Inputs are bundled fixture names (`quintic`, `weierstrass`,
//! `elliptic-lambda`, `k3-six-lines`, `p4xp4`, `square-toy`) or JSON
//! documents.  Artifacts are canonical pretty-printed JSON with all numbers
//! as decimal/rational strings, written atomically; two runs on the same
//! inputs produce byte-identical files.  The enumeration scale guard is
//! controlled by the `TORICMIRROR_MAX_COLUMNS` environment variable.

mod pipeline;
mod sources;

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use toricmirror_core::config::kernel_lattice;
use toricmirror_core::fixtures;
use toricmirror_core::gkz::{annihilation_check, frobenius_w0, gkz_operators};
use toricmirror_core::jsonio::{
    read_json, series_doc, to_canonical_string, write_json_atomic, ChartDoc, ConfigDoc,
    EnumerationDoc, FacesDoc, KernelDoc, MirrorMapDoc, MirrorReportDoc, MonodromyDoc,
    PeriodsDoc, PolytopeDoc, RingDoc, SecondaryFanDoc, VerifyDoc,
};
use toricmirror_core::periods::{
    invert_mirror_map, mirror_map, mirror_roundtrip_ok, monodromy_data,
    verify_mirror_isomorphism,
};
use toricmirror_core::polytope::hodge_numbers_hypersurface;
use toricmirror_core::triangulation::{gkz_vector, is_maximal};

use sources::{
    build_ring, chart_bundle, enumerate, first_order_mirror, gkz_system, invalid,
    period_bundle, resolve_input, resolve_polytope, tag, truncation, CliResult,
};

#[derive(Parser)]
#[command(
    name = "toricmirror",
    version,
    about = "Exact toric mirror-symmetry pipeline: reflexive polytopes, regular triangulations, GKZ series, and integral periods"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lattice polytopes: polar duals, reflexivity, Hodge numbers, faces.
    #[command(subcommand)]
    Polytope(PolytopeCmd),
    /// Point configurations and their kernel lattices.
    #[command(subcommand)]
    Config(ConfigCmd),
    /// Regular triangulations, GKZ vectors, and series charts.
    #[command(subcommand)]
    Triangulate(TriangulateCmd),
    /// Hypergeometric series and operator annihilation checks.
    #[command(subcommand)]
    Gkz(GkzCmd),
    /// Toric cohomology rings.
    #[command(subcommand)]
    Ring(RingCmd),
    /// Period vectors, monodromy, and mirror maps.
    #[command(subcommand)]
    Periods(PeriodsCmd),
    /// Recompute a bundled fixture and compare against its golden values.
    Verify(VerifyArgs),
    /// Execute the full pipeline described by a JSON manifest.
    Run(RunArgs),
}

#[derive(Args)]
struct OutOpt {
    /// Write the JSON artifact to this path (atomically) instead of stdout.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InputArg {
    /// Fixture name or JSON document path.
    input: String,
}

#[derive(Subcommand)]
enum PolytopeCmd {
    /// Polar dual polytope.
    Dual {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Reflexivity report (exit 0 if reflexive, 1 otherwise).
    Reflexive {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Hodge numbers (h11, h21) of the associated hypersurface.
    Hodge {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Face lattice with interior lattice point counts.
    Faces {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        out: OutOpt,
    },
}

#[derive(Subcommand)]
enum ConfigCmd {
    /// Build the homogenised point configuration.
    Build {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Saturated kernel lattice of the configuration.
    Kernel {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        out: OutOpt,
    },
}

#[derive(Subcommand)]
enum TriangulateCmd {
    /// Enumerate all regular triangulations.
    Enumerate {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        out: OutOpt,
    },
    /// GKZ vector of every regular triangulation (secondary-polytope data).
    Gkz {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Series chart at a triangulation (default: the base triangulation).
    Chart {
        #[command(flatten)]
        input: InputArg,
        /// Index into the enumeration order.
        #[arg(short, long)]
        triangulation: Option<usize>,
        #[command(flatten)]
        out: OutOpt,
    },
}

#[derive(Subcommand)]
enum GkzCmd {
    /// The holomorphic solution w0 on the chart.
    Series {
        #[command(flatten)]
        input: InputArg,
        #[arg(short, long)]
        triangulation: Option<usize>,
        /// Total truncation order (default: the fixture's bundled order, else 6).
        #[arg(long)]
        order: Option<u32>,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Check that the box/Euler (and any named) operators annihilate w0.
    Check {
        #[command(flatten)]
        input: InputArg,
        #[arg(short, long)]
        triangulation: Option<usize>,
        #[arg(long)]
        order: Option<u32>,
        #[command(flatten)]
        out: OutOpt,
    },
}

#[derive(Subcommand)]
enum RingCmd {
    /// Build the even cohomology ring of the chart's toric variety.
    Build {
        #[command(flatten)]
        input: InputArg,
        #[arg(short, long)]
        triangulation: Option<usize>,
        /// Hodge pair `h11,h21` forcing the toric hypersurface construction.
        #[arg(long, value_parser = parse_hodge)]
        hodge: Option<(usize, usize)>,
        #[command(flatten)]
        out: OutOpt,
    },
}

#[derive(Args)]
struct PeriodsCommon {
    #[command(flatten)]
    input: InputArg,
    #[arg(long, value_parser = parse_hodge)]
    hodge: Option<(usize, usize)>,
    #[arg(long)]
    order: Option<u32>,
    #[command(flatten)]
    out: OutOpt,
}

#[derive(Subcommand)]
enum PeriodsCmd {
    /// Assemble the integral symplectic period vector.
    Build(PeriodsCommon),
    /// Monodromy matrices and their logarithms around each coordinate axis.
    Monodromy(PeriodsCommon),
    /// Canonical coordinates t(x) and the inverted series x(q).
    MirrorMap(PeriodsCommon),
    /// Check log T_k against the cup-product structure (exit 0 iff all hold).
    VerifyMirror(PeriodsCommon),
}

#[derive(Args)]
struct VerifyArgs {
    /// Fixture name.
    fixture: String,
    /// Compare the computed values against this golden map (label -> value).
    #[arg(long)]
    golden: Option<PathBuf>,
    /// Write the computed values as a golden map for later comparison.
    #[arg(long)]
    emit_golden: Option<PathBuf>,
    /// Write the full verification report as JSON.
    #[command(flatten)]
    out: OutOpt,
}

#[derive(Args)]
struct RunArgs {
    /// Pipeline manifest (JSON).
    manifest: PathBuf,
    /// Output directory (overrides the manifest's `out`).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Total truncation order (overrides the manifest's `order`).
    #[arg(long)]
    order: Option<u32>,
}

fn parse_hodge(raw: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != 2 {
        return Err("expected `h11,h21`".into());
    }
    let h11 = parts[0].trim().parse::<usize>().map_err(|e| e.to_string())?;
    let h21 = parts[1].trim().parse::<usize>().map_err(|e| e.to_string())?;
    Ok((h11, h21))
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("{err}");
            std::process::exit(if err.is_usage() { 2 } else { 1 });
        }
    }
}

/// Emit an artifact: atomically to `--out`, else canonical JSON on stdout.
fn emit<T: Serialize>(out: &OutOpt, value: &T) -> CliResult<()> {
    match &out.out {
        Some(path) => write_json_atomic(path, value).map_err(tag("cli")),
        None => {
            print!("{}", to_canonical_string(value).map_err(tag("cli"))?);
            Ok(())
        }
    }
}

/// A labelled pass/fail table printed by check-style subcommands.
struct CheckTable {
    checks: Vec<(String, bool)>,
}

impl CheckTable {
    fn new() -> Self {
        CheckTable { checks: Vec::new() }
    }

    fn push(&mut self, label: impl Into<String>, ok: bool) {
        self.checks.push((label.into(), ok));
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    fn print(&self) {
        for (label, ok) in &self.checks {
            println!("[{}] {label}", if *ok { "PASS" } else { "FAIL" });
        }
    }

    fn to_json(&self) -> serde_json::Value {
        json!({
            "checks": self.checks
                .iter()
                .map(|(label, ok)| json!({ "label": label, "ok": ok }))
                .collect::<Vec<_>>(),
            "passed": self.passed(),
        })
    }
}

fn dispatch(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Polytope(cmd) => polytope_cmd(cmd),
        Command::Config(cmd) => config_cmd(cmd),
        Command::Triangulate(cmd) => triangulate_cmd(cmd),
        Command::Gkz(cmd) => gkz_cmd(cmd),
        Command::Ring(cmd) => ring_cmd(cmd),
        Command::Periods(cmd) => periods_cmd(cmd),
        Command::Verify(args) => verify_cmd(args),
        Command::Run(args) => pipeline::run(&args.manifest, args.out_dir, args.order),
    }
}

fn polytope_cmd(cmd: PolytopeCmd) -> CliResult<i32> {
    match cmd {
        PolytopeCmd::Dual { input, out } => {
            let (_, p) = resolve_polytope(&input.input)?;
            let dual = p.polar_dual().map_err(tag("polytope"))?;
            emit(&out, &PolytopeDoc::from_polytope(&dual))?;
            Ok(0)
        }
        PolytopeCmd::Reflexive { input, out } => {
            let (name, p) = resolve_polytope(&input.input)?;
            let reflexive = p.is_reflexive().map_err(tag("polytope"))?;
            emit(&out, &json!({ "name": name, "rank": p.rank(), "reflexive": reflexive }))?;
            Ok(if reflexive { 0 } else { 1 })
        }
        PolytopeCmd::Hodge { input, out } => {
            let (_, p) = resolve_polytope(&input.input)?;
            let (h11, h21) = hodge_numbers_hypersurface(&p).map_err(tag("polytope"))?;
            emit(&out, &json!({ "h11": h11.to_string(), "h21": h21.to_string() }))?;
            Ok(0)
        }
        PolytopeCmd::Faces { input, out } => {
            let (_, p) = resolve_polytope(&input.input)?;
            let lattice = p.face_lattice().map_err(tag("polytope"))?;
            emit(&out, &FacesDoc::from_lattice(lattice))?;
            Ok(0)
        }
    }
}

fn config_cmd(cmd: ConfigCmd) -> CliResult<i32> {
    match cmd {
        ConfigCmd::Build { input, out } => {
            let res = resolve_input(&input.input)?;
            emit(&out, &ConfigDoc::from_config(&res.config))?;
            Ok(0)
        }
        ConfigCmd::Kernel { input, out } => {
            let res = resolve_input(&input.input)?;
            let kernel = kernel_lattice(&res.config).map_err(tag("config"))?;
            emit(&out, &KernelDoc::from_kernel(&kernel))?;
            Ok(0)
        }
    }
}

fn triangulate_cmd(cmd: TriangulateCmd) -> CliResult<i32> {
    match cmd {
        TriangulateCmd::Enumerate { input, out } => {
            let res = resolve_input(&input.input)?;
            let triangulations = enumerate(&res)?;
            let maximal = triangulations
                .iter()
                .enumerate()
                .filter(|(_, t)| is_maximal(&res.config, t))
                .map(|(i, _)| i)
                .collect();
            emit(
                &out,
                &EnumerationDoc {
                    config: res.name.clone(),
                    count: triangulations.len(),
                    maximal,
                    triangulations: triangulations.iter().map(|t| t.simplices.clone()).collect(),
                },
            )?;
            Ok(0)
        }
        TriangulateCmd::Gkz { input, out } => {
            let res = resolve_input(&input.input)?;
            let triangulations = enumerate(&res)?;
            let vectors: CliResult<Vec<Vec<String>>> = triangulations
                .iter()
                .map(|t| {
                    Ok(gkz_vector(&res.config, t)
                        .map_err(tag("triangulation"))?
                        .iter()
                        .map(|v| v.to_string())
                        .collect())
                })
                .collect();
            emit(
                &out,
                &SecondaryFanDoc {
                    config: res.name.clone(),
                    kernel_rank: sources::kernel_rank(&res)?,
                    vectors: vectors?,
                },
            )?;
            Ok(0)
        }
        TriangulateCmd::Chart { input, triangulation, out } => {
            let res = resolve_input(&input.input)?;
            let bundle = chart_bundle(&res, triangulation)?;
            emit(&out, &ChartDoc::from_chart(&bundle.chart))?;
            Ok(0)
        }
    }
}

fn gkz_cmd(cmd: GkzCmd) -> CliResult<i32> {
    match cmd {
        GkzCmd::Series { input, triangulation, order, out } => {
            let res = resolve_input(&input.input)?;
            let bundle = chart_bundle(&res, triangulation)?;
            let sys = gkz_system(&res)?;
            let w0 = frobenius_w0(&sys, &bundle.chart, truncation(&res, order))
                .map_err(tag("gkz"))?;
            emit(&out, &series_doc(&w0))?;
            Ok(0)
        }
        GkzCmd::Check { input, triangulation, order, out } => {
            let res = resolve_input(&input.input)?;
            let bundle = chart_bundle(&res, triangulation)?;
            let sys = gkz_system(&res)?;
            let w0 = frobenius_w0(&sys, &bundle.chart, truncation(&res, order))
                .map_err(tag("gkz"))?;
            let ops = gkz_operators(&sys, &bundle.chart).map_err(tag("gkz"))?;
            let mut table = CheckTable::new();
            table.push("Euler residuals vanish", ops.euler_ok());
            table.push(
                "box operators annihilate the holomorphic solution",
                annihilation_check(&ops.boxes, &w0).all_zero(),
            );
            if let Some(f) = &res.fixture {
                if !f.named_operators.is_empty() {
                    table.push(
                        "named operators annihilate the holomorphic solution",
                        annihilation_check(&f.named_operators, &w0).all_zero(),
                    );
                }
            }
            table.print();
            if out.out.is_some() {
                emit(&out, &table.to_json())?;
            }
            Ok(if table.passed() { 0 } else { 1 })
        }
    }
}

fn ring_cmd(cmd: RingCmd) -> CliResult<i32> {
    match cmd {
        RingCmd::Build { input, triangulation, hodge, out } => {
            let res = resolve_input(&input.input)?;
            let bundle = chart_bundle(&res, triangulation)?;
            let ring = build_ring(&res, &bundle, hodge)?.ok_or_else(|| {
                invalid(
                    "toricring",
                    format!(
                        "no cohomology-ring construction for `{}`; pass --hodge h11,h21",
                        res.name
                    ),
                )
            })?;
            emit(&out, &RingDoc::from_ring(&ring))?;
            Ok(0)
        }
    }
}

fn periods_cmd(cmd: PeriodsCmd) -> CliResult<i32> {
    match cmd {
        PeriodsCmd::Build(args) => {
            let res = resolve_input(&args.input.input)?;
            let bundle = chart_bundle(&res, None)?;
            let pb = period_bundle(&res, &bundle, args.hodge, args.order)?;
            emit(&args.out, &PeriodsDoc::from_periods(&pb.pv))?;
            Ok(0)
        }
        PeriodsCmd::Monodromy(args) => {
            let res = resolve_input(&args.input.input)?;
            let bundle = chart_bundle(&res, None)?;
            let pb = period_bundle(&res, &bundle, args.hodge, args.order)?;
            let md = monodromy_data(&pb.pv, &pb.basis).map_err(tag("periods"))?;
            emit(&args.out, &MonodromyDoc::from_data(&md))?;
            Ok(0)
        }
        PeriodsCmd::MirrorMap(args) => {
            let res = resolve_input(&args.input.input)?;
            let bundle = chart_bundle(&res, None)?;
            let has_ring = args.hodge.is_some()
                || res
                    .fixture
                    .as_ref()
                    .is_some_and(|f| !matches!(f.ring, fixtures::RingSource::None));
            let (ts, xs, roundtrip) = if has_ring {
                let pb = period_bundle(&res, &bundle, args.hodge, args.order)?;
                let ts = mirror_map(&pb.pv).map_err(tag("periods"))?;
                let xs = invert_mirror_map(&ts).map_err(tag("periods"))?;
                let rt = mirror_roundtrip_ok(&ts, &xs).map_err(tag("periods"))?;
                (ts, xs, rt)
            } else {
                first_order_mirror(&res, &bundle, args.order)?
            };
            emit(
                &args.out,
                &MirrorMapDoc {
                    t_series: ts.iter().map(series_doc).collect(),
                    x_series: xs.iter().map(series_doc).collect(),
                    roundtrip,
                },
            )?;
            Ok(if roundtrip { 0 } else { 1 })
        }
        PeriodsCmd::VerifyMirror(args) => {
            let res = resolve_input(&args.input.input)?;
            let bundle = chart_bundle(&res, None)?;
            let pb = period_bundle(&res, &bundle, args.hodge, args.order)?;
            let md = monodromy_data(&pb.pv, &pb.basis).map_err(tag("periods"))?;
            let report = verify_mirror_isomorphism(&md, &pb.basis);
            for check in &report.checks {
                println!(
                    "[{}] log T_{} matches the cup-product matrix",
                    if check.ok { "PASS" } else { "FAIL" },
                    check.k + 1
                );
            }
            if args.out.out.is_some() {
                emit(&args.out, &MirrorReportDoc::from_report(&report))?;
            }
            Ok(if report.all_ok { 0 } else { 1 })
        }
    }
}

fn verify_cmd(args: VerifyArgs) -> CliResult<i32> {
    let report = fixtures::verify_fixture(&args.fixture).map_err(tag("cli"))?;
    if let Some(path) = &args.emit_golden {
        let map: BTreeMap<&str, &str> = report
            .checks
            .iter()
            .map(|c| (c.label.as_str(), c.got.as_str()))
            .collect();
        write_json_atomic(path, &map).map_err(tag("cli"))?;
    }
    let mut all_ok = true;
    for check in &report.checks {
        if check.ok {
            println!("[PASS] {}", check.label);
        } else {
            all_ok = false;
            println!(
                "[FAIL] {}: expected {}, got {}",
                check.label, check.expected, check.got
            );
        }
    }
    if let Some(path) = &args.golden {
        let overrides: BTreeMap<String, String> = read_json(path).map_err(tag("cli"))?;
        for (label, expected) in &overrides {
            let Some(check) = report.checks.iter().find(|c| &c.label == label) else {
                return Err(invalid(
                    "cli",
                    format!("golden file references unknown check `{label}`"),
                ));
            };
            if &check.got == expected {
                println!("[PASS] golden {label}");
            } else {
                all_ok = false;
                println!(
                    "[FAIL] golden {label}: expected {expected}, got {}",
                    check.got
                );
            }
        }
    }
    let n = report.checks.len();
    let passed = report.checks.iter().filter(|c| c.ok).count();
    println!(
        "fixture {}: {} ({passed}/{n} checks)",
        report.fixture,
        if all_ok { "PASS" } else { "FAIL" }
    );
    if args.out.out.is_some() {
        emit(&args.out, &VerifyDoc::from_report(&report))?;
    }
    Ok(if all_ok { 0 } else { 1 })
}
