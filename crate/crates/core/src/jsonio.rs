//! JSON artifact schemas and deterministic, atomic file I/O.
//!
//! Every number is serialized as a decimal or `p/q` rational string — no
//! JSON numbers carry lattice or coefficient data, so nothing is subject to
//! floating-point truncation. All maps are ordered and every list is emitted
//! in a canonical order, so serializing the same value twice produces
//! byte-identical text. Writes go to a temporary file in the target
//! directory followed by an atomic rename, so failed runs leave no partial
//! artifacts.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::{build_explicit_config, KernelLattice, PointConfiguration};
use crate::error::Error;
use crate::linalg::QMat;
use crate::num::{format_q, parse_q, Q, Z};
use crate::periods::{MirrorReport, MonodromyData, PeriodVector};
use crate::polytope::{FaceLattice, LatticePolytope};
use crate::series::{LogSeries, RingSeries, Scalar, Truncation};
use crate::toricring::CohomologyRing;
use crate::triangulation::{ChartBasis, Triangulation};
use crate::Result;

fn z_str(x: &Z) -> String {
    x.to_string()
}

fn parse_z_str(s: &str) -> Result<Z> {
    s.parse::<Z>()
        .map_err(|_| Error::InvalidInput(format!("`{s}` is not a decimal integer")))
}

fn q_str(x: &Q) -> String {
    format_q(x)
}

#[cfg(test)]
fn parse_q_str(s: &str) -> Result<Q> {
    parse_q(s).ok_or_else(|| Error::InvalidInput(format!("`{s}` is not a rational `p/q`")))
}

fn vec_q_str(xs: &[Q]) -> Vec<String> {
    xs.iter().map(q_str).collect()
}

/// Rows of a rational matrix as `p/q` strings.
pub fn matrix_doc(m: &QMat) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|row| vec_q_str(row)).collect()
}

/// Lattice polytope artifact: `{"rank": n, "vertices": [["-1", "0", …]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeDoc {
    pub rank: usize,
    pub vertices: Vec<Vec<String>>,
}

impl PolytopeDoc {
    pub fn from_polytope(p: &LatticePolytope) -> Self {
        PolytopeDoc {
            rank: p.rank(),
            vertices: p.vertices().iter().map(|v| v.iter().map(z_str).collect()).collect(),
        }
    }

    pub fn to_polytope(&self) -> Result<LatticePolytope> {
        let vertices: Vec<Vec<Z>> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|s| parse_z_str(s)).collect::<Result<Vec<Z>>>())
            .collect::<Result<_>>()?;
        LatticePolytope::new(self.rank, vertices)
    }
}

/// Nef-partition artifact: the polytope file it refers to plus the vertex
/// index classes.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NefPartitionDoc {
    pub polytope: String,
    pub parts: Vec<Vec<usize>>,
}

/// Point-configuration artifact.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    /// Ambient rank (rows of the matrix).
    pub rank: usize,
    /// Number of leading origin columns.
    pub r: usize,
    pub columns: Vec<Vec<String>>,
    pub labels: Vec<String>,
}

impl ConfigDoc {
    pub fn from_config(c: &PointConfiguration) -> Self {
        ConfigDoc {
            rank: c.ambient_rank,
            r: c.r,
            columns: c.columns.iter().map(|col| col.iter().map(z_str).collect()).collect(),
            labels: c.labels.clone(),
        }
    }

    pub fn to_config(&self) -> Result<PointConfiguration> {
        let columns: Vec<Vec<Z>> = self
            .columns
            .iter()
            .map(|col| col.iter().map(|s| parse_z_str(s)).collect::<Result<Vec<Z>>>())
            .collect::<Result<_>>()?;
        if let Some(col) = columns.iter().find(|col| col.len() != self.rank) {
            return Err(Error::InvalidInput(format!(
                "column of length {} in a rank-{} configuration",
                col.len(),
                self.rank
            )));
        }
        if self.labels.len() != columns.len() {
            return Err(Error::InvalidInput(format!(
                "{} labels for {} columns",
                self.labels.len(),
                columns.len()
            )));
        }
        build_explicit_config(self.r, columns, Some(self.labels.clone()))
    }
}

/// Kernel-lattice artifact.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelDoc {
    pub rank: usize,
    pub basis: Vec<Vec<String>>,
}

impl KernelDoc {
    pub fn from_kernel(k: &KernelLattice) -> Self {
        KernelDoc {
            rank: k.rank(),
            basis: k.basis.iter().map(|row| row.iter().map(z_str).collect()).collect(),
        }
    }
}

/// One triangulation: simplices as column-index sets.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangulationDoc {
    pub config: String,
    pub simplices: Vec<Vec<usize>>,
}

impl TriangulationDoc {
    pub fn from_triangulation(config: impl Into<String>, t: &Triangulation) -> Self {
        TriangulationDoc { config: config.into(), simplices: t.simplices.clone() }
    }

    pub fn to_triangulation(&self) -> Triangulation {
        Triangulation::new(self.simplices.clone())
    }
}

/// Enumeration artifact: all regular triangulations in canonical order, with
/// maximality flags.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnumerationDoc {
    pub config: String,
    pub count: usize,
    pub maximal: Vec<usize>,
    pub triangulations: Vec<Vec<Vec<usize>>>,
}

/// Secondary-polytope data: one lattice vector per regular triangulation.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecondaryFanDoc {
    pub config: String,
    pub kernel_rank: usize,
    /// GKZ vector of each triangulation, in enumeration order.
    pub vectors: Vec<Vec<String>>,
}

/// Chart artifact: kernel vectors, coordinate signs, and display monomials.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartDoc {
    pub vectors: Vec<Vec<String>>,
    pub signs: Vec<i64>,
    pub monomials: Vec<String>,
}

impl ChartDoc {
    pub fn from_chart(chart: &ChartBasis) -> Self {
        ChartDoc {
            vectors: chart.vectors.iter().map(|v| v.iter().map(z_str).collect()).collect(),
            signs: chart.signs.iter().map(|&s| s as i64).collect(),
            monomials: chart.monomials.clone(),
        }
    }
}

/// One series coefficient: either a plain rational or a map from symbol
/// (`Z3`, `P`, `P^2*Z3`, …) to its rational multiplier.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffDoc {
    Plain(String),
    Parts(BTreeMap<String, String>),
}

fn symbol_name(p: u32, z: u32) -> String {
    let mut parts = Vec::new();
    match p {
        0 => {}
        1 => parts.push("P".to_string()),
        k => parts.push(format!("P^{k}")),
    }
    match z {
        0 => {}
        1 => parts.push("Z3".to_string()),
        k => parts.push(format!("Z3^{k}")),
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

fn scalar_doc(s: &Scalar) -> CoeffDoc {
    if s.coeffs.len() == 1 {
        if let Some(v) = s.coeffs.get(&(0, 0)) {
            return CoeffDoc::Plain(q_str(v));
        }
    }
    CoeffDoc::Parts(
        s.coeffs.iter().map(|(&(p, z), v)| (symbol_name(p, z), q_str(v))).collect(),
    )
}

/// One term of a logarithmic series: monomial exponent, coefficient per
/// basis element, and logarithm multidegree.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub exp: Vec<u32>,
    pub coeff: BTreeMap<String, CoeffDoc>,
    pub logs: Vec<u32>,
}

/// Series artifact.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesDoc {
    pub variables: Vec<String>,
    /// Exponent offsets of the expansion point (zero on resolved charts).
    pub offsets: Vec<String>,
    /// Total truncation order.
    pub order: u32,
    /// Per-variable exponent caps, when box truncation is in force.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub caps: Option<Vec<u32>>,
    pub terms: Vec<TermDoc>,
}

fn chart_variables(nvars: usize) -> Vec<String> {
    (1..=nvars).map(|k| format!("x{k}")).collect()
}

fn trunc_fields(trunc: &Truncation) -> (u32, Option<Vec<u32>>) {
    (trunc.total, trunc.per_var.clone())
}

/// Serialize a scalar-valued series; the single basis element is `1`.
pub fn series_doc(series: &LogSeries) -> SeriesDoc {
    let (order, caps) = trunc_fields(&series.trunc);
    let mut terms = Vec::new();
    for (exp, poly) in &series.terms {
        for (logs, scalar) in &poly.coeffs {
            if scalar.is_zero() {
                continue;
            }
            let mut coeff = BTreeMap::new();
            coeff.insert("1".to_string(), scalar_doc(scalar));
            terms.push(TermDoc { exp: exp.clone(), coeff, logs: logs.clone() });
        }
    }
    SeriesDoc {
        variables: chart_variables(series.nvars),
        offsets: vec!["0".to_string(); series.nvars],
        order,
        caps,
        terms,
    }
}

/// Serialize a cohomology-valued series; terms collect every basis element
/// with a nonzero coefficient at the same `(exp, logs)` key.
pub fn ring_series_doc(series: &RingSeries) -> SeriesDoc {
    let nvars = series.nvars();
    let trunc = series
        .comps
        .first()
        .map(|c| c.trunc.clone())
        .unwrap_or_else(|| Truncation::total(0));
    let (order, caps) = trunc_fields(&trunc);
    let names = &series.algebra.names;
    let mut keyed: BTreeMap<(Vec<u32>, Vec<u32>), BTreeMap<String, CoeffDoc>> = BTreeMap::new();
    for (name, comp) in names.iter().zip(&series.comps) {
        for (exp, poly) in &comp.terms {
            for (logs, scalar) in &poly.coeffs {
                if scalar.is_zero() {
                    continue;
                }
                keyed
                    .entry((exp.clone(), logs.clone()))
                    .or_default()
                    .insert(name.clone(), scalar_doc(scalar));
            }
        }
    }
    SeriesDoc {
        variables: chart_variables(nvars),
        offsets: vec!["0".to_string(); nvars],
        order,
        caps,
        terms: keyed
            .into_iter()
            .map(|((exp, logs), coeff)| TermDoc { exp, coeff, logs })
            .collect(),
    }
}

/// Cohomology-ring artifact.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingDoc {
    pub labels: Vec<String>,
    pub degrees: Vec<u32>,
    /// `e_i e_j = Σ_c table[i][j][c] e_c`, entries as rationals.
    pub table: Vec<Vec<Vec<String>>>,
    /// Triple intersections of the generators.
    pub triple: Vec<Vec<Vec<String>>>,
    pub c2_j: Vec<String>,
    pub chi: String,
    pub h11: usize,
    pub h21: usize,
}

impl RingDoc {
    pub fn from_ring(ring: &CohomologyRing) -> Self {
        let a = &ring.algebra;
        RingDoc {
            labels: a.names.clone(),
            degrees: a.degrees.clone(),
            table: a
                .table
                .iter()
                .map(|plane| plane.iter().map(|row| vec_q_str(row)).collect())
                .collect(),
            triple: ring
                .triple
                .iter()
                .map(|plane| plane.iter().map(|row| vec_q_str(row)).collect())
                .collect(),
            c2_j: vec_q_str(&ring.c2_j),
            chi: q_str(&ring.chi),
            h11: ring.h11,
            h21: ring.h21,
        }
    }
}

/// Period-vector artifact: the component series in basis order plus the
/// symplectic form they are written in.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodsDoc {
    /// Number of chart variables.
    pub s: usize,
    /// Top grading degree of the coefficient ring.
    pub top: u32,
    pub components: Vec<SeriesDoc>,
    pub sigma: Vec<Vec<String>>,
}

impl PeriodsDoc {
    pub fn from_periods(pv: &PeriodVector) -> Self {
        PeriodsDoc {
            s: pv.s,
            top: pv.top,
            components: pv.entries.iter().map(series_doc).collect(),
            sigma: matrix_doc(&pv.sigma),
        }
    }
}

/// Monodromy artifact: one matrix and one nilpotent logarithm per chart
/// variable, plus the preserved symplectic form.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonodromyDoc {
    pub matrices: Vec<Vec<Vec<String>>>,
    pub logs: Vec<Vec<Vec<String>>>,
    pub sigma: Vec<Vec<String>>,
}

impl MonodromyDoc {
    pub fn from_data(data: &MonodromyData) -> Self {
        MonodromyDoc {
            matrices: data.ts.iter().map(matrix_doc).collect(),
            logs: data.ns.iter().map(matrix_doc).collect(),
            sigma: matrix_doc(&data.sigma),
        }
    }
}

/// Mirror-map artifact: the canonical coordinates and the inverted series.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MirrorMapDoc {
    pub t_series: Vec<SeriesDoc>,
    pub x_series: Vec<SeriesDoc>,
    pub roundtrip: bool,
}

/// Mirror-isomorphism check artifact.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MirrorReportDoc {
    pub checks: Vec<MirrorCheckDoc>,
    pub all_ok: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MirrorCheckDoc {
    pub variable: usize,
    pub ok: bool,
}

impl MirrorReportDoc {
    pub fn from_report(report: &MirrorReport) -> Self {
        MirrorReportDoc {
            checks: report
                .checks
                .iter()
                .map(|c| MirrorCheckDoc { variable: c.k + 1, ok: c.ok })
                .collect(),
            all_ok: report.all_ok,
        }
    }
}

/// Face-lattice artifact.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacesDoc {
    pub faces: Vec<FaceDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceDoc {
    pub dim: usize,
    pub vertices: Vec<usize>,
    pub interior_lattice_points: usize,
}

impl FacesDoc {
    pub fn from_lattice(fl: &FaceLattice) -> Self {
        FacesDoc {
            faces: fl
                .faces
                .iter()
                .map(|f| FaceDoc {
                    dim: f.dim,
                    vertices: f.vertex_set.iter().copied().collect(),
                    interior_lattice_points: f.interior_lattice_points,
                })
                .collect(),
        }
    }
}

/// Fixture verification artifact.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyDoc {
    pub fixture: String,
    pub checks: Vec<VerifyCheckDoc>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyCheckDoc {
    pub label: String,
    pub expected: String,
    pub got: String,
    pub ok: bool,
}

impl VerifyDoc {
    pub fn from_report(report: &crate::fixtures::VerifyReport) -> Self {
        VerifyDoc {
            fixture: report.fixture.clone(),
            checks: report
                .checks
                .iter()
                .map(|c| VerifyCheckDoc {
                    label: c.label.clone(),
                    expected: c.expected.clone(),
                    got: c.got.clone(),
                    ok: c.ok,
                })
                .collect(),
            passed: report.passed(),
        }
    }
}

/// Pipeline request consumed by the `run` front end: exactly one input
/// source, plus options.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polytope: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hodge: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl PipelineDoc {
    /// Fail-fast shape validation: exactly one input source.
    pub fn validate(&self) -> Result<()> {
        let sources =
            usize::from(self.fixture.is_some()) + usize::from(self.polytope.is_some())
                + usize::from(self.config.is_some());
        if sources != 1 {
            return Err(Error::InvalidInput(
                "pipeline needs exactly one of `fixture`, `polytope`, `config`".into(),
            ));
        }
        Ok(())
    }
}

/// Canonical serialized form: pretty-printed with a trailing newline.
pub fn to_canonical_string<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// Parse an artifact file.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Write an artifact atomically: serialize, write to a temporary file in the
/// same directory, then rename onto the target path.
pub fn write_json_atomic<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = to_canonical_string(value)?;
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, qr, z};
    use crate::series::LogSeries;

    fn sample_polytope() -> LatticePolytope {
        LatticePolytope::new(
            2,
            vec![vec![z(1), z(0)], vec![z(0), z(1)], vec![z(-1), z(-1)]],
        )
        .unwrap()
    }

    #[test]
    fn polytope_doc_roundtrips() {
        let p = sample_polytope();
        let doc = PolytopeDoc::from_polytope(&p);
        let text = to_canonical_string(&doc).unwrap();
        let back: PolytopeDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_polytope().unwrap().vertices(), p.vertices());
    }

    #[test]
    fn config_doc_roundtrips_and_validates() {
        let config = build_explicit_config(
            1,
            vec![
                vec![z(1), z(0), z(0)],
                vec![z(1), z(1), z(0)],
                vec![z(1), z(0), z(1)],
                vec![z(1), z(1), z(1)],
            ],
            None,
        )
        .unwrap();
        let doc = ConfigDoc::from_config(&config);
        let back = doc.to_config().unwrap();
        assert_eq!(back, config);

        let mut bad = doc.clone();
        bad.labels.pop();
        assert!(bad.to_config().is_err());
    }

    #[test]
    fn malformed_numbers_are_rejected() {
        let doc = PolytopeDoc { rank: 1, vertices: vec![vec!["1.5".to_string()]] };
        assert!(doc.to_polytope().is_err());
        assert!(parse_q_str("0.25").is_err());
        assert_eq!(parse_q_str("-3/4").unwrap(), qr(-3, 4));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"rank": 2, "vertices": [], "color": "blue"}"#;
        assert!(serde_json::from_str::<PolytopeDoc>(text).is_err());
    }

    #[test]
    fn scalar_coefficients_use_symbol_keys() {
        assert_eq!(scalar_doc(&Scalar::from_q(qr(3, 4))), CoeffDoc::Plain("3/4".to_string()));
        let mixed = Scalar::from_q(q(2)).add(&Scalar::z3().scale(&q(200)));
        let CoeffDoc::Parts(parts) = scalar_doc(&mixed) else {
            panic!("expected symbol map");
        };
        assert_eq!(parts.get("1"), Some(&"2".to_string()));
        assert_eq!(parts.get("Z3"), Some(&"200".to_string()));
        assert_eq!(symbol_name(2, 1), "P^2*Z3");
    }

    #[test]
    fn series_doc_orders_terms_canonically() {
        let mut s = LogSeries::zero(2, Truncation::total(3));
        s.insert(vec![1, 0], vec![0, 0], Scalar::from_q(q(5)));
        s.insert(vec![0, 1], vec![1, 0], Scalar::from_q(qr(1, 2)));
        let doc = series_doc(&s);
        assert_eq!(doc.variables, vec!["x1", "x2"]);
        assert_eq!(doc.offsets, vec!["0", "0"]);
        assert_eq!(doc.order, 3);
        assert_eq!(doc.terms.len(), 2);
        assert_eq!(doc.terms[0].exp, vec![0, 1]);
        assert_eq!(doc.terms[0].logs, vec![1, 0]);
        assert_eq!(doc.terms[1].coeff.get("1"), Some(&CoeffDoc::Plain("5".to_string())));
    }

    #[test]
    fn atomic_writes_are_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("artifact.json");
        let doc = PolytopeDoc::from_polytope(&sample_polytope());
        write_json_atomic(&path, &doc).unwrap();
        let first = std::fs::read(&path).unwrap();
        write_json_atomic(&path, &doc).unwrap();
        let second = std::fs::read(&path).unwrap();
        assert_eq!(first, second);
        assert!(first.ends_with(b"\n"));
        let back: PolytopeDoc = read_json(&path).unwrap();
        assert_eq!(back.vertices, doc.vertices);
    }

    #[test]
    fn pipeline_doc_requires_one_source() {
        let none: PipelineDoc = serde_json::from_str("{}").unwrap();
        assert!(none.validate().is_err());
        let one: PipelineDoc = serde_json::from_str(r#"{"fixture": "quintic"}"#).unwrap();
        one.validate().unwrap();
        let two: PipelineDoc =
            serde_json::from_str(r#"{"fixture": "quintic", "config": "c.json"}"#).unwrap();
        assert!(two.validate().is_err());
    }
}
