//! Full-pipeline execution from a JSON manifest.
//!
//! Stages run in order — polytope, config, triangulation, gkz, ring,
//! periods — short-circuiting on the first module error.  Every artifact is
//! written atomically; the summary records each stage's status, checks, and
//! artifact list.  Exit code 0 only if every executed check passed.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use toricmirror_core::gkz::{annihilation_check, frobenius_w0, gkz_operators};
use toricmirror_core::jsonio::{
    matrix_doc, read_json, series_doc, write_json_atomic, ChartDoc, CoeffDoc, ConfigDoc,
    EnumerationDoc, KernelDoc, MirrorMapDoc, MirrorReportDoc, MonodromyDoc, PeriodsDoc,
    PipelineDoc, PolytopeDoc, RingDoc, SecondaryFanDoc,
};
use toricmirror_core::config::kernel_lattice;
use toricmirror_core::linalg::ZMat;
use toricmirror_core::num::Q;
use toricmirror_core::periods::{
    invert_mirror_map, mirror_map, mirror_roundtrip_ok, monodromy_data,
    verify_mirror_isomorphism,
};
use toricmirror_core::polytope::hodge_numbers_hypersurface;
use toricmirror_core::triangulation::{gkz_vector, is_maximal};
use toricmirror_core::Error as CoreError;

use crate::sources::{
    build_ring, chart_bundle, first_order_mirror, gkz_system, invalid, kernel_rank,
    period_bundle, resolve_input, resolve_path, tag, truncation, CliError, CliResult,
    Resolved,
};

struct Stage {
    module: &'static str,
    status: &'static str,
    reason: Option<String>,
    code: Option<&'static str>,
    notes: Vec<String>,
    checks: Vec<(String, bool)>,
    artifacts: Vec<String>,
}

impl Stage {
    fn new(module: &'static str) -> Self {
        Stage {
            module,
            status: "ok",
            reason: None,
            code: None,
            notes: Vec::new(),
            checks: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    fn skipped(module: &'static str, reason: impl Into<String>) -> Self {
        let mut s = Stage::new(module);
        s.status = "skipped";
        s.reason = Some(reason.into());
        s
    }

    fn failed(err: &CliError) -> Self {
        let mut s = Stage::new(err.module);
        s.status = "failed";
        s.reason = Some(err.source.to_string());
        s.code = Some(err.code());
        s
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.checks.push((label.into(), ok));
    }

    fn to_json(&self) -> serde_json::Value {
        json!({
            "module": self.module,
            "status": self.status,
            "reason": self.reason,
            "code": self.code,
            "notes": self.notes,
            "checks": self.checks
                .iter()
                .map(|(label, ok)| json!({ "label": label, "ok": ok }))
                .collect::<Vec<_>>(),
            "artifacts": self.artifacts,
        })
    }
}

fn write_artifact<T: Serialize>(
    dir: &Path,
    stage: &mut Stage,
    name: &str,
    value: &T,
) -> CliResult<()> {
    write_json_atomic(&dir.join(name), value).map_err(tag("cli"))?;
    stage.artifacts.push(name.into());
    Ok(())
}

/// Atomic text write (temp file + rename), mirroring the JSON writer.
fn write_text_atomic(path: &Path, text: &str) -> CliResult<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| tag("cli")(e.into()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| tag("cli")(e.into()))?;
    tmp.write_all(text.as_bytes()).map_err(|e| tag("cli")(e.into()))?;
    tmp.flush().map_err(|e| tag("cli")(e.into()))?;
    tmp.persist(path).map_err(|e| tag("cli")(CoreError::Io(e.error)))?;
    Ok(())
}

fn fmt_rows(rows: &[Vec<String>]) -> String {
    rows.iter()
        .map(|r| format!("[{}]", r.join(", ")))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Run the pipeline described by `manifest`; returns the process exit code.
pub fn run(
    manifest: &Path,
    out_dir_flag: Option<PathBuf>,
    order_flag: Option<u32>,
) -> CliResult<i32> {
    // Fail-fast phase: parse and validate the manifest and every referenced
    // file before computing or writing anything.
    let doc: PipelineDoc = read_json(manifest).map_err(tag("cli"))?;
    doc.validate().map_err(tag("cli"))?;
    let base = manifest.parent().unwrap_or_else(|| Path::new("."));
    let res = if let Some(name) = &doc.fixture {
        resolve_input(name)?
    } else if let Some(p) = &doc.polytope {
        resolve_path(&base.join(p))?
    } else if let Some(c) = &doc.config {
        resolve_path(&base.join(c))?
    } else {
        unreachable!("validated above")
    };
    let out_dir = match out_dir_flag {
        Some(d) => d,
        None => match &doc.out {
            Some(o) => base.join(o),
            None => {
                return Err(invalid(
                    "cli",
                    "no output directory: set `out` in the manifest or pass --out-dir",
                ))
            }
        },
    };
    let order = order_flag.or(doc.order);
    let hodge = doc.hodge.map(|[a, b]| (a, b));

    let mut stages = Vec::new();
    let outcome = execute(&res, order, hodge, &out_dir, &mut stages);
    if let Err(err) = &outcome {
        eprintln!("{err}");
        stages.push(Stage::failed(err));
    }
    let passed = outcome.is_ok()
        && stages.iter().all(|s| s.checks.iter().all(|(_, ok)| *ok));

    let summary = json!({
        "source": res.name,
        "passed": passed,
        "stages": stages.iter().map(Stage::to_json).collect::<Vec<_>>(),
    });
    write_json_atomic(&out_dir.join("summary.json"), &summary).map_err(tag("cli"))?;
    let text = render_summary(&res.name, passed, &stages);
    write_text_atomic(&out_dir.join("summary.txt"), &text)?;
    print!("{text}");
    Ok(if passed { 0 } else { 1 })
}

fn render_summary(name: &str, passed: bool, stages: &[Stage]) -> String {
    let mut out = String::new();
    out.push_str(&format!("pipeline: {name}\n"));
    out.push_str(&format!("result: {}\n", if passed { "PASS" } else { "FAIL" }));
    for stage in stages {
        match stage.status {
            "ok" => out.push_str(&format!("\n[{}] ok\n", stage.module)),
            "skipped" => {
                out.push_str(&format!(
                    "\n[{}] skipped: {}\n",
                    stage.module,
                    stage.reason.as_deref().unwrap_or("")
                ));
            }
            _ => {
                out.push_str(&format!(
                    "\n[{}] FAILED [{}]: {}\n",
                    stage.module,
                    stage.code.unwrap_or("unknown"),
                    stage.reason.as_deref().unwrap_or("")
                ));
            }
        }
        for note in &stage.notes {
            out.push_str(&format!("  {note}\n"));
        }
        for (label, ok) in &stage.checks {
            out.push_str(&format!(
                "  check: {label} ... {}\n",
                if *ok { "ok" } else { "FAIL" }
            ));
        }
        for artifact in &stage.artifacts {
            out.push_str(&format!("  wrote {artifact}\n"));
        }
    }
    out
}

fn execute(
    res: &Resolved,
    order: Option<u32>,
    hodge: Option<(usize, usize)>,
    out_dir: &Path,
    stages: &mut Vec<Stage>,
) -> CliResult<()> {
    // --- polytope ----------------------------------------------------------
    if let Some(p) = &res.polytope {
        let mut stage = Stage::new("polytope");
        write_artifact(out_dir, &mut stage, "polytope.json", &PolytopeDoc::from_polytope(p))?;
        stage.note(format!("rank {}, {} vertices", p.rank(), p.vertices().len()));
        let reflexive = p.is_reflexive().map_err(tag("polytope"))?;
        stage.check("polytope is reflexive", reflexive);
        if reflexive {
            let dual = p.polar_dual().map_err(tag("polytope"))?;
            write_artifact(
                out_dir,
                &mut stage,
                "polytope_dual.json",
                &PolytopeDoc::from_polytope(&dual),
            )?;
            if p.rank() == 4 {
                let (h11, h21) = hodge_numbers_hypersurface(&dual).map_err(tag("polytope"))?;
                let (d11, d21) = hodge_numbers_hypersurface(p).map_err(tag("polytope"))?;
                write_artifact(
                    out_dir,
                    &mut stage,
                    "hodge.json",
                    &json!({
                        "h11": h11.to_string(),
                        "h21": h21.to_string(),
                        "fan_polytope_h11": d11.to_string(),
                        "fan_polytope_h21": d21.to_string(),
                    }),
                )?;
                stage.note(format!("hypersurface Hodge numbers: ({h11}, {h21})"));
                stage.check(
                    "Hodge numbers swap under polar duality",
                    h11 == d21 && h21 == d11,
                );
            } else {
                stage.note("Hodge numbers computed only in rank 4");
            }
        }
        stages.push(stage);
    } else {
        stages.push(Stage::skipped(
            "polytope",
            "input supplies a point configuration directly",
        ));
    }

    // --- config -------------------------------------------------------------
    let mut stage = Stage::new("config");
    write_artifact(out_dir, &mut stage, "config.json", &ConfigDoc::from_config(&res.config))?;
    let kernel = kernel_lattice(&res.config).map_err(tag("config"))?;
    write_artifact(out_dir, &mut stage, "kernel.json", &KernelDoc::from_kernel(&kernel))?;
    stage.note(format!(
        "{} columns, kernel rank {}",
        res.config.columns.len(),
        kernel.rank()
    ));
    let rows: Vec<Vec<toricmirror_core::num::Z>> = (0..res.config.ambient_rank)
        .map(|i| res.config.columns.iter().map(|c| c[i].clone()).collect())
        .collect();
    let a_matrix = ZMat::from_z_rows(rows);
    let annihilates = kernel.basis.iter().all(|l| {
        a_matrix
            .mul_vec(l)
            .iter()
            .all(|x| x == &toricmirror_core::num::z(0))
    });
    stage.check("kernel basis annihilates the point matrix", annihilates);
    stages.push(stage);

    // --- triangulation -------------------------------------------------------
    let mut stage = Stage::new("triangulation");
    let bundle = chart_bundle(res, None)?;
    let maximal: Vec<usize> = bundle
        .triangulations
        .iter()
        .enumerate()
        .filter(|(_, t)| is_maximal(&res.config, t))
        .map(|(i, _)| i)
        .collect();
    write_artifact(
        out_dir,
        &mut stage,
        "triangulations.json",
        &EnumerationDoc {
            config: res.name.clone(),
            count: bundle.triangulations.len(),
            maximal: maximal.clone(),
            triangulations: bundle
                .triangulations
                .iter()
                .map(|t| t.simplices.clone())
                .collect(),
        },
    )?;
    let vectors: CliResult<Vec<Vec<String>>> = bundle
        .triangulations
        .iter()
        .map(|t| {
            Ok(gkz_vector(&res.config, t)
                .map_err(tag("triangulation"))?
                .iter()
                .map(|v| v.to_string())
                .collect())
        })
        .collect();
    write_artifact(
        out_dir,
        &mut stage,
        "secondary_fan.json",
        &SecondaryFanDoc {
            config: res.name.clone(),
            kernel_rank: kernel_rank(res)?,
            vectors: vectors?,
        },
    )?;
    write_artifact(out_dir, &mut stage, "chart.json", &ChartDoc::from_chart(&bundle.chart))?;
    stage.note(format!(
        "{} regular triangulations ({} maximal), base #{}",
        bundle.triangulations.len(),
        maximal.len(),
        bundle.base
    ));
    for monomial in &bundle.chart.monomials {
        stage.note(format!("chart coordinate {monomial}"));
    }
    stage.check("at least one regular triangulation", !bundle.triangulations.is_empty());
    stages.push(stage);

    // --- gkz -----------------------------------------------------------------
    let mut stage = Stage::new("gkz");
    let sys = gkz_system(res)?;
    let trunc = truncation(res, order);
    let w0 = frobenius_w0(&sys, &bundle.chart, trunc.clone()).map_err(tag("gkz"))?;
    let w0_doc = series_doc(&w0);
    for term in w0_doc.terms.iter().take(8) {
        if let Some(CoeffDoc::Plain(p)) = term.coeff.get("1") {
            stage.note(format!("w0 coefficient at {:?}: {}", term.exp, p));
        }
    }
    write_artifact(out_dir, &mut stage, "w0.json", &w0_doc)?;
    let ops = gkz_operators(&sys, &bundle.chart).map_err(tag("gkz"))?;
    stage.check("Euler residuals vanish", ops.euler_ok());
    stage.check(
        "box operators annihilate the holomorphic solution",
        annihilation_check(&ops.boxes, &w0).all_zero(),
    );
    if let Some(f) = &res.fixture {
        if !f.named_operators.is_empty() {
            stage.check(
                "named operators annihilate the holomorphic solution",
                annihilation_check(&f.named_operators, &w0).all_zero(),
            );
        }
    }
    stages.push(stage);

    // --- ring ----------------------------------------------------------------
    let ring = build_ring(res, &bundle, hodge)?;
    match &ring {
        Some(r) => {
            let mut stage = Stage::new("toricring");
            write_artifact(out_dir, &mut stage, "ring.json", &RingDoc::from_ring(r))?;
            stage.note(format!(
                "h11 = {}, h21 = {}, chi = {}",
                r.h11, r.h21, r.chi
            ));
            if r.top_degree() == 3 {
                let expected = Q::from_integer((2 * (r.h11 as i64 - r.h21 as i64)).into());
                stage.check("Euler number equals 2(h11 - h21)", r.chi == expected);
            }
            stages.push(stage);
        }
        None => {
            stages.push(Stage::skipped(
                "toricring",
                "no cohomology-ring construction for this input (set `hodge` in the manifest to attempt the toric one)",
            ));
        }
    }

    // --- periods ---------------------------------------------------------------
    let mut stage = Stage::new("periods");
    if ring.is_some() {
        let pb = period_bundle(res, &bundle, hodge, order)?;
        write_artifact(out_dir, &mut stage, "periods.json", &PeriodsDoc::from_periods(&pb.pv))?;
        let md = monodromy_data(&pb.pv, &pb.basis).map_err(tag("periods"))?;
        write_artifact(out_dir, &mut stage, "monodromy.json", &MonodromyDoc::from_data(&md))?;
        stage.note(format!("T_1 = {}", fmt_rows(&matrix_doc(&md.ts[0]))));
        let symplectic = md.ts.iter().all(|t| {
            t.transpose().mul(&md.sigma).mul(t).to_rows() == md.sigma.to_rows()
        });
        stage.check("monodromy preserves the symplectic form", symplectic);
        let report = verify_mirror_isomorphism(&md, &pb.basis);
        write_artifact(
            out_dir,
            &mut stage,
            "mirror_check.json",
            &MirrorReportDoc::from_report(&report),
        )?;
        stage.check("monodromy logs match the cup-product structure", report.all_ok);
        let ts = mirror_map(&pb.pv).map_err(tag("periods"))?;
        let xs = invert_mirror_map(&ts).map_err(tag("periods"))?;
        let roundtrip = mirror_roundtrip_ok(&ts, &xs).map_err(tag("periods"))?;
        write_artifact(
            out_dir,
            &mut stage,
            "mirror_map.json",
            &MirrorMapDoc {
                t_series: ts.iter().map(series_doc).collect(),
                x_series: xs.iter().map(series_doc).collect(),
                roundtrip,
            },
        )?;
        stage.check("mirror map round-trip is exact", roundtrip);
    } else {
        let (ts, xs, roundtrip) = first_order_mirror(res, &bundle, order)?;
        stage.note("no cohomology ring: first-order mirror map only");
        write_artifact(
            out_dir,
            &mut stage,
            "mirror_map.json",
            &MirrorMapDoc {
                t_series: ts.iter().map(series_doc).collect(),
                x_series: xs.iter().map(series_doc).collect(),
                roundtrip,
            },
        )?;
        stage.check("mirror map round-trip is exact", roundtrip);
    }
    stages.push(stage);

    Ok(())
}
