//! Input resolution and shared pipeline plumbing.
//!
//! Every subcommand accepts either a bundled fixture name or a path to a
//! JSON document; the document shape (`vertices`, `parts`, or `columns`)
//! selects the loader.  All referenced files are read and validated before
//! any computation starts.

use std::path::Path;

use toricmirror_core::config::{
    build_cicy_config, build_hypersurface_config, kernel_lattice, PointConfiguration,
};
use toricmirror_core::fixtures::{self, Fixture};
use toricmirror_core::gkz::{frobenius_cohomology, GkzSystem, RingData};
use toricmirror_core::jsonio::{read_json, ConfigDoc, NefPartitionDoc, PolytopeDoc};
use toricmirror_core::periods::{
    invert_mirror_map, mirror_map_from_family, mirror_roundtrip_ok, period_vector,
    PeriodVector, SymplecticBasis,
};
use toricmirror_core::polytope::{LatticePolytope, NefPartition};
use toricmirror_core::series::{LogSeries, Truncation};
use toricmirror_core::toricring::{hypersurface_ring, CohomologyRing};
use toricmirror_core::triangulation::{
    chart_basis, enumerate_regular_triangulations, is_maximal, ChartBasis, Triangulation,
};
use toricmirror_core::Error as CoreError;

/// An error attributed to the pipeline module that produced it.
#[derive(Debug)]
pub struct CliError {
    pub module: &'static str,
    pub source: CoreError,
}

impl CliError {
    pub fn code(&self) -> &'static str {
        self.source.code()
    }

    /// Whether this is a usage/input problem rather than a mathematical or
    /// computational failure (drives the exit code).
    pub fn is_usage(&self) -> bool {
        matches!(
            self.source,
            CoreError::InvalidInput(_)
                | CoreError::UnknownFixture(_)
                | CoreError::Json(_)
                | CoreError::Io(_)
        )
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "error in module {} [{}]: {}",
            self.module,
            self.code(),
            self.source
        )
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;

/// Attribute core errors to a module: `.map_err(tag("gkz"))`.
pub fn tag(module: &'static str) -> impl Fn(CoreError) -> CliError {
    move |source| CliError { module, source }
}

pub fn invalid(module: &'static str, message: impl Into<String>) -> CliError {
    CliError { module, source: CoreError::InvalidInput(message.into()) }
}

/// A resolved computation input.
pub struct Resolved {
    /// Display name used inside artifacts (fixture name or file stem).
    pub name: String,
    pub fixture: Option<Fixture>,
    pub polytope: Option<LatticePolytope>,
    pub config: PointConfiguration,
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".into())
}

/// Resolve a polytope-valued input without building a configuration.
pub fn resolve_polytope(input: &str) -> CliResult<(String, LatticePolytope)> {
    if fixtures::NAMES.contains(&input) {
        let fixture = fixtures::load(input).map_err(tag("cli"))?;
        return match fixture.polytope {
            Some(p) => Ok((input.into(), p)),
            None => Err(invalid(
                "polytope",
                format!("fixture `{input}` is defined by a point configuration, not a polytope"),
            )),
        };
    }
    let path = existing_path(input)?;
    let doc: PolytopeDoc = read_json(path).map_err(tag("cli"))?;
    Ok((stem(path), doc.to_polytope().map_err(tag("polytope"))?))
}

fn existing_path(input: &str) -> CliResult<&Path> {
    let path = Path::new(input);
    if !path.exists() {
        return Err(invalid(
            "cli",
            format!(
                "`{input}` is neither a bundled fixture ({}) nor an existing file",
                fixtures::NAMES.join(", ")
            ),
        ));
    }
    Ok(path)
}

/// Resolve any input into a point configuration (plus fixture/polytope
/// context when available).
pub fn resolve_input(input: &str) -> CliResult<Resolved> {
    if fixtures::NAMES.contains(&input) {
        let fixture = fixtures::load(input).map_err(tag("cli"))?;
        return Ok(Resolved {
            name: input.into(),
            polytope: fixture.polytope.clone(),
            config: fixture.config.clone(),
            fixture: Some(fixture),
        });
    }
    let path = existing_path(input)?;
    resolve_path(path)
}

/// Resolve a JSON document path directly, bypassing fixture-name lookup.
pub fn resolve_path(path: &Path) -> CliResult<Resolved> {
    if !path.exists() {
        return Err(invalid("cli", format!("missing input file `{}`", path.display())));
    }
    let value: serde_json::Value = read_json(path).map_err(tag("cli"))?;
    resolve_document(path, value)
}

fn resolve_document(path: &Path, value: serde_json::Value) -> CliResult<Resolved> {
    let name = stem(path);
    if value.get("vertices").is_some() {
        let doc: PolytopeDoc =
            serde_json::from_value(value).map_err(|e| tag("cli")(e.into()))?;
        let polytope = doc.to_polytope().map_err(tag("polytope"))?;
        let config = build_hypersurface_config(&polytope).map_err(tag("config"))?;
        Ok(Resolved { name, fixture: None, polytope: Some(polytope), config })
    } else if value.get("parts").is_some() {
        let doc: NefPartitionDoc =
            serde_json::from_value(value).map_err(|e| tag("cli")(e.into()))?;
        let config = nef_partition_config(path, &doc)?;
        Ok(Resolved { name, fixture: None, polytope: None, config })
    } else if value.get("columns").is_some() {
        let doc: ConfigDoc =
            serde_json::from_value(value).map_err(|e| tag("cli")(e.into()))?;
        let config = doc.to_config().map_err(tag("config"))?;
        Ok(Resolved { name, fixture: None, polytope: None, config })
    } else {
        Err(invalid(
            "cli",
            format!(
                "`{}` is not a recognized document: expected `vertices` (polytope), \
                 `parts` (nef partition), or `columns` (configuration)",
                path.display()
            ),
        ))
    }
}

/// Build the complete-intersection configuration of a nef partition; the
/// referenced polytope path is taken relative to the partition document.
fn nef_partition_config(
    doc_path: &Path,
    doc: &NefPartitionDoc,
) -> CliResult<PointConfiguration> {
    let base = doc_path.parent().unwrap_or_else(|| Path::new("."));
    let polytope_path = base.join(&doc.polytope);
    if !polytope_path.exists() {
        return Err(invalid(
            "cli",
            format!("nef partition references missing polytope `{}`", polytope_path.display()),
        ));
    }
    let pdoc: PolytopeDoc = read_json(&polytope_path).map_err(tag("cli"))?;
    let delta = pdoc.to_polytope().map_err(tag("polytope"))?;
    let partition = NefPartition::new(delta, doc.parts.clone()).map_err(tag("polytope"))?;
    let dual = partition.dualize().map_err(tag("polytope"))?;
    build_cicy_config(&dual.nabla_parts).map_err(tag("config"))
}

/// Regular triangulations and the series chart at the base triangulation.
pub struct ChartBundle {
    pub triangulations: Vec<Triangulation>,
    pub base: usize,
    pub chart: ChartBasis,
}

pub fn enumerate(res: &Resolved) -> CliResult<Vec<Triangulation>> {
    enumerate_regular_triangulations(&res.config).map_err(tag("triangulation"))
}

/// The base triangulation: an explicit index, the fixture's choice, or the
/// first maximal one.
pub fn base_index(
    res: &Resolved,
    triangulations: &[Triangulation],
    explicit: Option<usize>,
) -> CliResult<usize> {
    if let Some(i) = explicit {
        if i >= triangulations.len() {
            return Err(invalid(
                "triangulation",
                format!(
                    "triangulation index {i} out of range: the configuration has {} regular triangulations",
                    triangulations.len()
                ),
            ));
        }
        return Ok(i);
    }
    Ok(match &res.fixture {
        Some(f) => f.base_index(triangulations),
        None => triangulations
            .iter()
            .position(|t| is_maximal(&res.config, t))
            .unwrap_or(0),
    })
}

pub fn chart_bundle(res: &Resolved, explicit: Option<usize>) -> CliResult<ChartBundle> {
    let triangulations = enumerate(res)?;
    let base = base_index(res, &triangulations, explicit)?;
    let chart = match (&res.fixture, explicit) {
        (Some(f), None) => f.chart_basis(&triangulations).map_err(tag("triangulation"))?,
        _ => chart_basis(&res.config, &triangulations, base).map_err(tag("triangulation"))?,
    };
    Ok(ChartBundle { triangulations, base, chart })
}

pub fn gkz_system(res: &Resolved) -> CliResult<GkzSystem> {
    match &res.fixture {
        Some(f) => f.gkz_system(),
        None => GkzSystem::standard(res.config.clone()),
    }
    .map_err(tag("gkz"))
}

/// Truncation order: an explicit `--order`, the fixture's bundled order, or
/// total degree 6.
pub fn truncation(res: &Resolved, order: Option<u32>) -> Truncation {
    match order {
        Some(n) => Truncation::total(n),
        None => match &res.fixture {
            Some(f) => f.golden.trunc.clone(),
            None => Truncation::total(6),
        },
    }
}

/// Build a cohomology ring: an explicit `--hodge` pair forces the toric
/// hypersurface construction; otherwise the fixture decides.
pub fn build_ring(
    res: &Resolved,
    bundle: &ChartBundle,
    hodge: Option<(usize, usize)>,
) -> CliResult<Option<CohomologyRing>> {
    if let Some(pair) = hodge {
        return hypersurface_ring(
            &res.config,
            &bundle.triangulations[bundle.base],
            &bundle.chart,
            pair,
        )
        .map(Some)
        .map_err(tag("toricring"));
    }
    match &res.fixture {
        Some(f) => f.build_ring(&bundle.triangulations, &bundle.chart).map_err(tag("toricring")),
        None => Ok(None),
    }
}

/// The full cohomology-valued period package.
pub struct PeriodBundle {
    pub basis: SymplecticBasis,
    pub pv: PeriodVector,
}

pub fn period_bundle(
    res: &Resolved,
    bundle: &ChartBundle,
    hodge: Option<(usize, usize)>,
    order: Option<u32>,
) -> CliResult<PeriodBundle> {
    let ring = build_ring(res, bundle, hodge)?.ok_or_else(|| {
        invalid(
            "toricring",
            format!(
                "no cohomology-ring construction for `{}`; pass --hodge h11,h21 to attempt the toric hypersurface ring",
                res.name
            ),
        )
    })?;
    let sys = gkz_system(res)?;
    let trunc = truncation(res, order);
    let data = ring.ring_data();
    let family = frobenius_cohomology(&sys, &bundle.chart, &data, trunc).map_err(tag("gkz"))?;
    let basis = SymplecticBasis::new(ring).map_err(tag("periods"))?;
    let pv = period_vector(&family, &basis).map_err(tag("periods"))?;
    Ok(PeriodBundle { basis, pv })
}

/// Mirror map for charts without a cohomology ring, via the first-order
/// coefficient algebra (single-logarithm data only).
pub fn first_order_mirror(
    res: &Resolved,
    bundle: &ChartBundle,
    order: Option<u32>,
) -> CliResult<(Vec<LogSeries>, Vec<LogSeries>, bool)> {
    let sys = gkz_system(res)?;
    let trunc = truncation(res, order);
    let algebra = fixtures::first_order_algebra(bundle.chart.vectors.len());
    let family = frobenius_cohomology(&sys, &bundle.chart, &RingData::bare(algebra), trunc)
        .map_err(tag("gkz"))?;
    let ts = mirror_map_from_family(&family).map_err(tag("periods"))?;
    let xs = invert_mirror_map(&ts).map_err(tag("periods"))?;
    let roundtrip = mirror_roundtrip_ok(&ts, &xs).map_err(tag("periods"))?;
    Ok((ts, xs, roundtrip))
}

/// Kernel rank, shared by several artifact builders.
pub fn kernel_rank(res: &Resolved) -> CliResult<usize> {
    Ok(kernel_lattice(&res.config).map_err(tag("config"))?.rank())
}
