//! Bundled worked examples with golden values, and a verification driver
//! that recomputes every recorded quantity from scratch.
//!
//! Each [`Fixture`] packages a point configuration together with everything
//! the pipeline needs to run it end to end: an optional non-standard
//! exponent vector for the hypergeometric system, the source of the chart
//! basis, the source of the cohomology ring (if a geometric phase exists at
//! this scale), optional extra differential operators known in closed form,
//! and the [`Golden`] record of expected outputs. [`verify_fixture`] replays
//! the pipeline and reports one labelled comparison per golden value.

use std::sync::Arc;

use num::{One, Zero};

use crate::config::{
    build_cicy_config, build_explicit_config, build_hypersurface_config, kernel_lattice,
    PointConfiguration,
};
use crate::error::Error;
use crate::gkz::{
    annihilation_check, annihilation_check_ring, frobenius_cohomology, frobenius_w0,
    gkz_operators, GkzSystem, LinForm, PushedOperator, RingData,
};
use crate::linalg::QMat;
use crate::num::{format_q, q, qr, z, Q, Z};
use crate::periods::{
    filtration_lambda_independent, invert_mirror_map, mirror_map, mirror_map_from_family,
    mirror_roundtrip_ok, monodromy_data, period_vector, verify_mirror_isomorphism,
    weight_filtration, SymplecticBasis,
};
use crate::polytope::{hodge_numbers_hypersurface, LatticePolytope, NefPartition};
use crate::series::{NilpotentAlgebra, Truncation};
use crate::toricring::{hypersurface_ring, CohomologyRing, Fan};
use crate::triangulation::{
    chart_basis, enumerate_regular_triangulations, is_maximal, render_monomial, ChartBasis,
    Triangulation,
};
use crate::Result;

/// Names of the bundled fixtures, in canonical order.
pub const NAMES: [&str; 6] = [
    "quintic",
    "weierstrass",
    "elliptic-lambda",
    "k3-six-lines",
    "p4xp4",
    "square-toy",
];

/// Where a fixture's chart basis comes from.
#[derive(Clone, Debug)]
pub enum ChartSource {
    /// Derived from the secondary-polytope tangent cone at the base
    /// (first maximal) triangulation.
    Secondary,
    /// Fixed kernel vectors; signs and coordinate monomials follow the same
    /// conventions as the derived charts.
    Explicit { vectors: Vec<Vec<i64>> },
}

/// Where a fixture's cohomology ring comes from.
#[derive(Clone, Debug)]
pub enum RingSource {
    /// Anticanonical (complete-intersection) ring of the fan of the base
    /// triangulation, with the stated Hodge numbers.
    Hypersurface { hodge: (usize, usize) },
    /// The rank-two algebra `1, J` of an elliptic curve.
    EllipticCurve,
    /// No ring at this scale.
    None,
}

/// Expected outputs used by [`verify_fixture`]. Empty vectors and `None`
/// skip the corresponding check.
#[derive(Clone, Debug)]
pub struct Golden {
    /// Truncation order used for all series computations.
    pub trunc: Truncation,
    /// Number of regular triangulations.
    pub triangulations: usize,
    /// Rank of the kernel lattice.
    pub kernel_rank: usize,
    /// Hodge numbers `(h11, h21)` of the hypersurface with this fan polytope.
    pub hodge: Option<(usize, usize)>,
    /// Rational coefficients of the holomorphic solution, by chart exponent.
    pub series: Vec<(Vec<u32>, Q)>,
    /// Whether to check the box operators and Euler residuals.
    pub check_gkz_annihilation: bool,
    /// Expected chart coordinate monomials.
    pub chart_monomials: Option<Vec<String>>,
    /// Expected number of base triangulations whose tangent cone is not
    /// simplicial (so no chart exists there).
    pub nonsimplicial_charts: Option<usize>,
    /// Euler number of the ring.
    pub euler: Option<Q>,
    /// Monodromy matrix around `x_1 = 0` in the symplectic basis.
    pub monodromy_t1: Option<Vec<Vec<Q>>>,
    /// Coefficients of the inverted mirror map `x_1(q)`.
    pub mirror_x_of_q: Vec<(Vec<u32>, Q)>,
    /// Whether to check that the mirror map inverts exactly.
    pub check_mirror_roundtrip: bool,
    /// Dimensions of the weight filtration of `N = Σ_k N_k`.
    pub filtration_dims: Option<Vec<usize>>,
    /// Positive coefficient samples for the filtration independence check.
    pub lambda_samples: Vec<Vec<Q>>,
}

impl Golden {
    fn new(trunc: Truncation, triangulations: usize, kernel_rank: usize) -> Self {
        Golden {
            trunc,
            triangulations,
            kernel_rank,
            hodge: None,
            series: Vec::new(),
            check_gkz_annihilation: false,
            chart_monomials: None,
            nonsimplicial_charts: None,
            euler: None,
            monodromy_t1: None,
            mirror_x_of_q: Vec::new(),
            check_mirror_roundtrip: false,
            filtration_dims: None,
            lambda_samples: Vec::new(),
        }
    }
}

/// A worked example: configuration, pipeline choices, and golden values.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    /// Fan polytope, when the configuration comes from one.
    pub polytope: Option<LatticePolytope>,
    pub config: PointConfiguration,
    /// Exponent vector of the hypergeometric system; `None` means the
    /// standard `(-1,…,-1, 0,…,0)`.
    pub beta: Option<Vec<Q>>,
    pub chart: ChartSource,
    pub ring: RingSource,
    /// Extra operators known in closed form that must annihilate the
    /// holomorphic solution.
    pub named_operators: Vec<PushedOperator>,
    pub golden: Golden,
}

impl Fixture {
    /// The hypergeometric system of this configuration.
    pub fn gkz_system(&self) -> Result<GkzSystem> {
        match &self.beta {
            Some(beta) => GkzSystem::with_beta(self.config.clone(), beta.clone()),
            None => GkzSystem::standard(self.config.clone()),
        }
    }

    /// Index of the base triangulation: the first maximal one.
    pub fn base_index(&self, triangulations: &[Triangulation]) -> usize {
        triangulations
            .iter()
            .position(|t| is_maximal(&self.config, t))
            .unwrap_or(0)
    }

    /// The chart basis, either derived at the base triangulation or fixed.
    pub fn chart_basis(&self, triangulations: &[Triangulation]) -> Result<ChartBasis> {
        match &self.chart {
            ChartSource::Secondary => {
                chart_basis(&self.config, triangulations, self.base_index(triangulations))
            }
            ChartSource::Explicit { vectors } => Ok(explicit_chart(&self.config, vectors)),
        }
    }

    /// The cohomology ring, when one exists at this scale.
    pub fn build_ring(
        &self,
        triangulations: &[Triangulation],
        chart: &ChartBasis,
    ) -> Result<Option<CohomologyRing>> {
        match &self.ring {
            RingSource::Hypersurface { hodge } => Ok(Some(hypersurface_ring(
                &self.config,
                &triangulations[self.base_index(triangulations)],
                chart,
                *hodge,
            )?)),
            RingSource::EllipticCurve => Ok(Some(elliptic_curve_ring())),
            RingSource::None => Ok(None),
        }
    }
}

/// Load a bundled fixture by name.
pub fn load(name: &str) -> Result<Fixture> {
    match name {
        "quintic" => quintic(),
        "weierstrass" => weierstrass(),
        "elliptic-lambda" => elliptic_lambda(),
        "k3-six-lines" => k3_six_lines(),
        "p4xp4" => p4xp4(),
        "square-toy" => square_toy(),
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

fn zp(v: &[i64]) -> Vec<Z> {
    v.iter().map(|&x| z(x)).collect()
}

/// Chart basis with fixed kernel vectors, using the shared sign convention
/// `s_k = (-1)^(origin sum)` and the shared monomial renderer.
fn explicit_chart(config: &PointConfiguration, vectors: &[Vec<i64>]) -> ChartBasis {
    let origin = config.origin_columns();
    let vectors: Vec<Vec<Z>> = vectors.iter().map(|v| zp(v)).collect();
    let signs: Vec<i32> = vectors
        .iter()
        .map(|v| {
            let total: i64 = origin.clone().map(|j| v[j].clone().try_into().unwrap_or(0)).sum();
            if total.rem_euclid(2) == 1 {
                -1
            } else {
                1
            }
        })
        .collect();
    let monomials = vectors
        .iter()
        .zip(&signs)
        .map(|(v, &s)| render_monomial(config, v, s))
        .collect();
    ChartBasis { vectors, signs, monomials }
}

/// The algebra `1, J_1..J_s` with all products of generators zero: the
/// smallest coefficient ring exposing single-logarithm data, used for the
/// mirror map on charts without a cohomology ring.
pub fn first_order_algebra(s: usize) -> Arc<NilpotentAlgebra> {
    let dim = s + 1;
    let mut table = vec![vec![vec![Q::zero(); dim]; dim]; dim];
    for i in 0..dim {
        table[0][i][i] = Q::one();
        if i > 0 {
            table[i][0][i] = Q::one();
        }
    }
    let mut names = vec!["1".to_string()];
    let mut degrees = vec![0u32];
    for k in 1..=s {
        names.push(format!("J{k}"));
        degrees.push(1);
    }
    let algebra = NilpotentAlgebra::new(names, degrees, table, (1..=s).collect())
        .expect("first-order algebra is graded and commutative");
    Arc::new(algebra)
}

/// The rank-two cohomology algebra `1, J` of an elliptic curve.
pub fn elliptic_curve_ring() -> CohomologyRing {
    let table = vec![
        vec![vec![q(1), q(0)], vec![q(0), q(1)]],
        vec![vec![q(0), q(1)], vec![q(0), q(0)]],
    ];
    let algebra =
        NilpotentAlgebra::new(vec!["1".into(), "J".into()], vec![0, 1], table, vec![1])
            .expect("elliptic curve algebra is graded and commutative");
    CohomologyRing {
        fan: Fan {
            rays: vec![],
            maximal_cones: vec![],
            multiplicities: vec![],
            smooth: vec![],
            ray_blocks: vec![],
            num_blocks: 0,
        },
        algebra: Arc::new(algebra),
        j_coeffs: vec![],
        triple: vec![],
        c2_j: vec![],
        chi: q(0),
        h11: 1,
        h21: 1,
    }
}

/// The reflexive simplex whose fan gives `P^4`.
pub fn quintic_simplex() -> Result<LatticePolytope> {
    LatticePolytope::new(
        4,
        vec![
            zp(&[1, 0, 0, 0]),
            zp(&[0, 1, 0, 0]),
            zp(&[0, 0, 1, 0]),
            zp(&[0, 0, 0, 1]),
            zp(&[-1, -1, -1, -1]),
        ],
    )
}

fn quintic() -> Result<Fixture> {
    let simplex = quintic_simplex()?;
    let config = build_hypersurface_config(&simplex)?;
    let mut golden = Golden::new(Truncation::total(5), 2, 1);
    golden.hodge = Some((1, 101));
    golden.series = vec![
        (vec![1], q(120)),
        (vec![2], q(113400)),
        (vec![3], q(168168000)),
        (vec![4], q(305540235000)),
    ];
    golden.check_gkz_annihilation = true;
    golden.euler = Some(q(-200));
    golden.monodromy_t1 = Some(vec![
        vec![q(1), q(0), q(0), q(0)],
        vec![q(1), q(1), q(0), q(0)],
        vec![qr(5, 2), q(5), q(1), q(0)],
        vec![q(-5), qr(-5, 2), q(-1), q(1)],
    ]);
    golden.mirror_x_of_q = vec![
        (vec![1], q(1)),
        (vec![2], q(-770)),
        (vec![3], q(171525)),
    ];
    golden.check_mirror_roundtrip = true;
    golden.filtration_dims = Some(vec![1, 1, 2, 2, 3, 3, 4]);
    Ok(Fixture {
        name: "quintic",
        description: "Anticanonical quintic hypersurface in P^4; one-parameter \
                      family with the classical mirror map.",
        polytope: Some(simplex),
        config,
        beta: None,
        chart: ChartSource::Secondary,
        ring: RingSource::Hypersurface { hodge: (1, 101) },
        named_operators: vec![],
        golden,
    })
}

fn weierstrass() -> Result<Fixture> {
    let config = build_explicit_config(
        1,
        vec![zp(&[1, 0, 0]), zp(&[1, -1, 1]), zp(&[1, 2, -1]), zp(&[1, -1, -1])],
        None,
    )?;
    let mut golden = Golden::new(Truncation::total(5), 2, 1);
    golden.series = vec![
        (vec![1], q(60)),
        (vec![2], q(13860)),
        (vec![3], q(4084080)),
    ];
    golden.check_gkz_annihilation = true;
    golden.chart_monomials = Some(vec!["a1^3*a2^2*a3/a0^6".to_string()]);
    golden.euler = Some(q(0));
    golden.check_mirror_roundtrip = true;
    Ok(Fixture {
        name: "weierstrass",
        description: "Cubic in weighted P^2 in Weierstrass form; elliptic \
                      curve with the modular coordinate as chart variable.",
        polytope: None,
        config,
        beta: None,
        chart: ChartSource::Secondary,
        ring: RingSource::Hypersurface { hodge: (1, 1) },
        named_operators: vec![],
        golden,
    })
}

fn elliptic_lambda() -> Result<Fixture> {
    let config = build_explicit_config(
        2,
        vec![zp(&[1, 0, 0]), zp(&[0, 1, 0]), zp(&[1, 0, -1]), zp(&[0, 1, 1])],
        None,
    )?;
    let mut golden = Golden::new(Truncation::total(8), 2, 1);
    golden.series = vec![(vec![1], qr(1, 4)), (vec![2], qr(9, 64))];
    golden.check_gkz_annihilation = true;
    golden.chart_monomials = Some(vec!["a2*a3/(a0*a1)".to_string()]);
    golden.euler = Some(q(0));
    golden.check_mirror_roundtrip = true;
    Ok(Fixture {
        name: "elliptic-lambda",
        description: "Legendre family of elliptic curves; half-integral \
                      exponent vector and the classical lambda coordinate.",
        polytope: None,
        config,
        beta: Some(vec![qr(-1, 2), qr(-1, 2), q(0)]),
        chart: ChartSource::Secondary,
        ring: RingSource::EllipticCurve,
        named_operators: vec![],
        golden,
    })
}

/// Linear factor `constant + Σ coeffs_k θ_k` in the four chart derivatives.
fn lf(constant: Q, coeffs: [i64; 4]) -> LinForm {
    LinForm { constant, theta: coeffs.iter().map(|&x| q(x)).collect() }
}

/// Pushed operator `∏ plus − σ x^shift ∏ minus` for the six-line K3 chart.
fn k3_operator(
    name: &str,
    shift: [u32; 4],
    sigma: i64,
    plus: [LinForm; 2],
    minus: [LinForm; 2],
) -> PushedOperator {
    PushedOperator {
        name: name.to_string(),
        shift: shift.to_vec(),
        sigma: q(sigma),
        plus: plus.to_vec(),
        minus: minus.to_vec(),
    }
}

fn k3_six_lines() -> Result<Fixture> {
    let labels = ["a04", "a15", "a06", "a14", "a24", "a25", "a05", "a16", "a26"];
    let columns = vec![
        zp(&[1, 0, 0, 0, 0]),
        zp(&[0, 1, 0, 0, 0]),
        zp(&[0, 0, 1, 0, 0]),
        zp(&[1, 0, 0, -1, 1]),
        zp(&[1, 0, 0, -1, 0]),
        zp(&[0, 1, 0, 0, -1]),
        zp(&[0, 1, 0, 1, -1]),
        zp(&[0, 0, 1, 1, 0]),
        zp(&[0, 0, 1, 0, 1]),
    ];
    let config = build_explicit_config(
        3,
        columns,
        Some(labels.iter().map(|s| s.to_string()).collect()),
    )?;
    let half = qr(1, 2);
    let named_operators = vec![
        k3_operator(
            "D1",
            [1, 0, 0, 0],
            -1,
            [lf(q(0), [1, 1, 0, -1]), lf(q(0), [1, 0, 1, -1])],
            [lf(half.clone(), [1, 0, 0, 0]), lf(q(0), [1, 0, 0, -1])],
        ),
        k3_operator(
            "D2",
            [0, 1, 0, 0],
            -1,
            [lf(q(0), [1, 1, 0, -1]), lf(q(0), [0, 1, 1, -1])],
            [lf(half.clone(), [0, 1, 0, 0]), lf(q(0), [0, 1, 0, -1])],
        ),
        k3_operator(
            "D3",
            [0, 0, 1, 0],
            -1,
            [lf(q(0), [1, 0, 1, -1]), lf(q(0), [0, 1, 1, -1])],
            [lf(half.clone(), [0, 0, 1, 0]), lf(q(0), [0, 0, 1, -1])],
        ),
        k3_operator(
            "D4",
            [1, 0, 0, 1],
            1,
            [lf(q(0), [0, 1, 0, -1]), lf(q(0), [0, 0, 1, -1])],
            [lf(half.clone(), [1, 0, 0, 0]), lf(q(0), [0, 1, 1, -1])],
        ),
        k3_operator(
            "D5",
            [0, 1, 0, 1],
            1,
            [lf(q(0), [1, 0, 0, -1]), lf(q(0), [0, 0, 1, -1])],
            [lf(half.clone(), [0, 1, 0, 0]), lf(q(0), [1, 0, 1, -1])],
        ),
        k3_operator(
            "D6",
            [0, 0, 1, 1],
            1,
            [lf(q(0), [1, 0, 0, -1]), lf(q(0), [0, 1, 0, -1])],
            [lf(half.clone(), [0, 0, 1, 0]), lf(q(0), [1, 1, 0, -1])],
        ),
        k3_operator(
            "D7",
            [1, 1, 0, 1],
            -1,
            [lf(q(0), [1, 1, 0, -1]), lf(q(0), [0, 0, 1, -1])],
            [lf(half.clone(), [1, 0, 0, 0]), lf(half.clone(), [0, 1, 0, 0])],
        ),
        k3_operator(
            "D8",
            [1, 0, 1, 1],
            -1,
            [lf(q(0), [1, 0, 1, -1]), lf(q(0), [0, 1, 0, -1])],
            [lf(half.clone(), [1, 0, 0, 0]), lf(half.clone(), [0, 0, 1, 0])],
        ),
        k3_operator(
            "D9",
            [0, 1, 1, 1],
            -1,
            [lf(q(0), [0, 1, 1, -1]), lf(q(0), [1, 0, 0, -1])],
            [lf(half.clone(), [0, 1, 0, 0]), lf(half, [0, 0, 1, 0])],
        ),
    ];
    let mut golden = Golden::new(Truncation::boxed(vec![3, 3, 3, 3]), 108, 4);
    golden.series = vec![
        (vec![1, 1, 0, 1], qr(1, 4)),
        (vec![1, 1, 1, 1], qr(1, 8)),
        (vec![2, 1, 1, 2], qr(3, 16)),
    ];
    golden.check_gkz_annihilation = true;
    golden.nonsimplicial_charts = Some(6);
    golden.check_mirror_roundtrip = true;
    Ok(Fixture {
        name: "k3-six-lines",
        description: "K3 double cover of P^2 branched along six lines; \
                      four-parameter system of resonant half-integral type.",
        polytope: None,
        config,
        beta: Some(vec![qr(-1, 2), qr(-1, 2), qr(-1, 2), q(0), q(0)]),
        chart: ChartSource::Explicit {
            vectors: vec![
                vec![-1, 0, 0, 1, 0, 0, 0, 1, -1],
                vec![0, -1, 0, 1, -1, 1, 0, 0, 0],
                vec![0, 0, -1, 0, 0, 1, -1, 1, 0],
                vec![0, 0, 0, -1, 1, -1, 1, -1, 1],
            ],
        },
        ring: RingSource::None,
        named_operators,
        golden,
    })
}

fn p4xp4() -> Result<Fixture> {
    let simplex: Vec<Vec<i64>> = vec![
        vec![1, 0, 0, 0],
        vec![0, 1, 0, 0],
        vec![0, 0, 1, 0],
        vec![0, 0, 0, 1],
        vec![-1, -1, -1, -1],
    ];
    let newton: Vec<Vec<i64>> = vec![
        vec![4, -1, -1, -1],
        vec![-1, 4, -1, -1],
        vec![-1, -1, 4, -1],
        vec![-1, -1, -1, 4],
        vec![-1, -1, -1, -1],
    ];
    let mut product = Vec::new();
    for a in &newton {
        for b in &newton {
            let mut v = a.clone();
            v.extend(b.iter().copied());
            product.push(zp(&v));
        }
    }
    let delta = LatticePolytope::new(8, product)?;
    let dual = delta.polar_dual()?;
    let parts: Vec<Vec<usize>> = (0..5)
        .map(|i| {
            let mut left = vec![0i64; 8];
            left[..4].copy_from_slice(&simplex[i]);
            let mut right = vec![0i64; 8];
            right[4..].copy_from_slice(&simplex[i]);
            let find = |target: Vec<Z>| {
                dual.vertices()
                    .iter()
                    .position(|v| *v == target)
                    .expect("paired vertex of the product polytope")
            };
            vec![find(zp(&left)), find(zp(&right))]
        })
        .collect();
    let partition = NefPartition::new(delta, parts)?;
    let config = build_cicy_config(&partition.dualize()?.nabla_parts)?;
    let mut golden = Golden::new(Truncation::total(4), 3, 2);
    golden.series = vec![
        (vec![1, 0], q(1)),
        (vec![0, 1], q(1)),
        (vec![1, 1], q(32)),
        (vec![2, 1], q(243)),
        (vec![2, 2], q(7776)),
    ];
    golden.check_gkz_annihilation = true;
    golden.euler = Some(q(-100));
    golden.check_mirror_roundtrip = true;
    golden.filtration_dims = Some(vec![1, 1, 3, 3, 5, 5, 6]);
    golden.lambda_samples = vec![vec![q(1), q(1)], vec![q(2), q(3)], vec![qr(1, 2), q(5)]];
    Ok(Fixture {
        name: "p4xp4",
        description: "Complete intersection of two anticanonical pieces in \
                      P^4 x P^4; two-parameter threefold family.",
        polytope: None,
        config,
        beta: None,
        chart: ChartSource::Secondary,
        ring: RingSource::Hypersurface { hodge: (2, 52) },
        named_operators: vec![],
        golden,
    })
}

fn square_toy() -> Result<Fixture> {
    let config = build_explicit_config(
        1,
        vec![zp(&[1, 0, 0]), zp(&[1, 1, 0]), zp(&[1, 0, 1]), zp(&[1, 1, 1])],
        None,
    )?;
    let mut golden = Golden::new(Truncation::total(3), 2, 1);
    golden.chart_monomials = Some(vec!["-a1*a2/(a0*a3)".to_string()]);
    golden.mirror_x_of_q = vec![(vec![1], q(1))];
    golden.check_mirror_roundtrip = true;
    Ok(Fixture {
        name: "square-toy",
        description: "Unit square with no interior point; smallest \
                      configuration with two triangulations and a flip.",
        polytope: None,
        config,
        beta: None,
        chart: ChartSource::Secondary,
        ring: RingSource::None,
        named_operators: vec![],
        golden,
    })
}

/// One labelled comparison of a recomputed value against its golden value.
#[derive(Clone, Debug)]
pub struct VerifyCheck {
    pub label: String,
    pub expected: String,
    pub got: String,
    pub ok: bool,
}

/// The result of replaying a fixture's pipeline.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub fixture: String,
    pub checks: Vec<VerifyCheck>,
}

impl VerifyReport {
    /// Whether every check matched.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    fn push(
        &mut self,
        label: impl Into<String>,
        expected: impl std::fmt::Display,
        got: impl std::fmt::Display,
    ) {
        let expected = expected.to_string();
        let got = got.to_string();
        let ok = expected == got;
        self.checks.push(VerifyCheck { label: label.into(), expected, got, ok });
    }
}

fn fmt_mat(rows: &[Vec<Q>]) -> String {
    let body: Vec<String> = rows
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(format_q).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", body.join(", "))
}

fn fmt_opt_q(v: Option<Q>) -> String {
    match v {
        Some(v) => format_q(&v),
        None => "absent".to_string(),
    }
}

/// Inversion and coefficient checks shared by both mirror-map routes.
fn push_mirror_checks(
    report: &mut VerifyReport,
    golden: &Golden,
    ts: &[crate::series::LogSeries],
) -> Result<()> {
    let xs = invert_mirror_map(ts)?;
    report.push("mirror map roundtrip", true, mirror_roundtrip_ok(ts, &xs)?);
    for (exp, expected) in &golden.mirror_x_of_q {
        let got = xs[0].rational_coeff(exp);
        report.push(format!("x(q) coefficient {exp:?}"), format_q(expected), fmt_opt_q(got));
    }
    Ok(())
}

/// Recompute every golden value of the named fixture and report the
/// comparisons. Computation errors abort with `Err`; value mismatches are
/// reported as failed checks.
pub fn verify_fixture(name: &str) -> Result<VerifyReport> {
    let fixture = load(name)?;
    let golden = &fixture.golden;
    let mut report = VerifyReport { fixture: fixture.name.to_string(), checks: Vec::new() };

    let kernel = kernel_lattice(&fixture.config)?;
    report.push("kernel rank", golden.kernel_rank, kernel.rank());

    if let (Some(polytope), Some((h11, h21))) = (&fixture.polytope, golden.hodge) {
        let (a, b) = hodge_numbers_hypersurface(&polytope.polar_dual()?)?;
        report.push("hodge numbers", format!("({h11}, {h21})"), format!("({a}, {b})"));
    }

    let triangulations = enumerate_regular_triangulations(&fixture.config)?;
    report.push("regular triangulations", golden.triangulations, triangulations.len());

    let chart = fixture.chart_basis(&triangulations)?;
    if let Some(monomials) = &golden.chart_monomials {
        report.push(
            "chart monomials",
            format!("{monomials:?}"),
            format!("{:?}", chart.monomials),
        );
    }
    if let Some(count) = golden.nonsimplicial_charts {
        let got = (0..triangulations.len())
            .filter(|&i| {
                matches!(
                    chart_basis(&fixture.config, &triangulations, i),
                    Err(Error::NonSimplicialChart { .. })
                )
            })
            .count();
        report.push("non-simplicial charts", count, got);
    }

    let sys = fixture.gkz_system()?;
    let w0 = frobenius_w0(&sys, &chart, golden.trunc.clone())?;
    for (exp, expected) in &golden.series {
        let got = w0.rational_coeff(exp);
        report.push(
            format!("series coefficient {exp:?}"),
            format_q(expected),
            fmt_opt_q(got),
        );
    }

    if golden.check_gkz_annihilation {
        let ops = gkz_operators(&sys, &chart)?;
        report.push("euler residuals vanish", true, ops.euler_ok());
        report.push("box annihilation", true, annihilation_check(&ops.boxes, &w0).all_zero());
    }
    if !fixture.named_operators.is_empty() {
        report.push(
            "named operator annihilation",
            true,
            annihilation_check(&fixture.named_operators, &w0).all_zero(),
        );
    }

    let Some(ring) = fixture.build_ring(&triangulations, &chart)? else {
        // No ring at this scale: mirror-map checks run on the first-order
        // family instead of a period vector.
        if golden.check_mirror_roundtrip {
            let algebra = first_order_algebra(chart.vectors.len());
            let family = frobenius_cohomology(
                &sys,
                &chart,
                &RingData::bare(algebra),
                golden.trunc.clone(),
            )?;
            let ts = mirror_map_from_family(&family)?;
            push_mirror_checks(&mut report, golden, &ts)?;
        }
        return Ok(report);
    };
    if let Some(chi) = &golden.euler {
        report.push("euler number", format_q(chi), format_q(&ring.chi));
    }

    let family = frobenius_cohomology(&sys, &chart, &ring.ring_data(), golden.trunc.clone())?;
    if golden.check_gkz_annihilation {
        let ops = gkz_operators(&sys, &chart)?;
        report.push(
            "ring-valued annihilation",
            true,
            annihilation_check_ring(&ops.boxes, &family.w0).all_zero(),
        );
    }

    let basis = SymplecticBasis::new(ring)?;
    let pv = period_vector(&family, &basis)?;
    let data = monodromy_data(&pv, &basis)?;
    if let Some(expected) = &golden.monodromy_t1 {
        report.push("monodromy around x1 = 0", fmt_mat(expected), fmt_mat(&data.ts[0].to_rows()));
    }
    report.push(
        "mirror monodromy identity",
        true,
        verify_mirror_isomorphism(&data, &basis).all_ok,
    );

    let ts = mirror_map(&pv)?;
    if golden.check_mirror_roundtrip {
        push_mirror_checks(&mut report, golden, &ts)?;
    }

    let center = pv.top as usize;
    if let Some(dims) = &golden.filtration_dims {
        let dim = data.ns[0].rows;
        let mut sum = vec![vec![Q::zero(); dim]; dim];
        for n in &data.ns {
            for (i, row) in n.to_rows().into_iter().enumerate() {
                for (j, v) in row.into_iter().enumerate() {
                    sum[i][j] += v;
                }
            }
        }
        let filtration = weight_filtration(&QMat::from_rows(sum), center)?;
        report.push("weight filtration dims", format!("{dims:?}"), format!("{:?}", filtration.dims));
        report.push(
            "filtration pattern is large-structure type",
            true,
            filtration.is_lcsl_pattern(basis.num_generators()),
        );
    }
    if !golden.lambda_samples.is_empty() {
        report.push(
            "filtration independent of coefficients",
            true,
            filtration_lambda_independent(&data.ns, &golden.lambda_samples, center)?,
        );
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_load() {
        for name in NAMES {
            let fixture = load(name).unwrap();
            assert_eq!(fixture.name, name);
            assert!(fixture.config.num_columns() > 0);
        }
    }

    #[test]
    fn unknown_name_is_an_error() {
        assert!(matches!(load("sextic"), Err(Error::UnknownFixture(_))));
    }

    #[test]
    fn square_toy_verifies() {
        let report = verify_fixture("square-toy").unwrap();
        assert!(report.passed(), "{:#?}", report.checks);
    }

    #[test]
    fn elliptic_lambda_verifies() {
        let report = verify_fixture("elliptic-lambda").unwrap();
        assert!(report.passed(), "{:#?}", report.checks);
    }

    #[test]
    fn explicit_chart_signs_follow_origin_parity() {
        let fixture = load("k3-six-lines").unwrap();
        let ChartSource::Explicit { vectors } = &fixture.chart else {
            panic!("fixed chart expected");
        };
        let chart = explicit_chart(&fixture.config, vectors);
        assert_eq!(chart.signs, vec![-1, -1, -1, 1]);
        assert_eq!(chart.monomials.len(), 4);
    }
}
