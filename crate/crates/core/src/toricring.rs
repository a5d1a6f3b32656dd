//! Fans from maximal triangulations, Stanley–Reisner presentations of even
//! cohomology, exact intersection numbers, Chern data, and the Calabi–Yau
//! hypersurface/complete-intersection ring.
//!
//! The degree-`n` intersection functional on divisor monomials is computed
//! exactly: a squarefree monomial spanning a maximal cone evaluates to
//! `1/multiplicity`, a non-face evaluates to `0`, and repeated factors are
//! reduced with the linear relations `Σ_i ⟨m, ν_i⟩ D_i = 0`.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use itertools::Itertools;
use num::{Integer, One, Signed, Zero};

use crate::config::PointConfiguration;
use crate::error::Error;
use crate::gkz::RingData;
use crate::linalg::{QMat, ZMat};
use crate::num::{Q, Z};
use crate::series::NilpotentAlgebra;
use crate::triangulation::{is_maximal, ChartBasis, Triangulation};
use crate::Result;

// ---------------------------------------------------------------------------
// Fans
// ---------------------------------------------------------------------------

/// A complete simplicial fan obtained from a maximal triangulation: rays are
/// the non-origin configuration points, maximal cones the simplices with the
/// origin columns removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    /// Primitive ray generators `ν_1..ν_p`.
    pub rays: Vec<Vec<Z>>,
    /// Maximal cones as sorted ray-index sets.
    pub maximal_cones: Vec<Vec<usize>>,
    /// `|det|` of the ray matrix of each maximal cone.
    pub multiplicities: Vec<Z>,
    /// Whether each maximal cone is unimodular.
    pub smooth: Vec<bool>,
    /// For configurations with `r` origin blocks: which block each ray's
    /// column belongs to (all zero for hypersurface configurations).
    pub ray_blocks: Vec<usize>,
    /// Number of origin blocks `r` of the parent configuration.
    pub num_blocks: usize,
}

impl Fan {
    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.rays.first().map(|r| r.len()).unwrap_or(0)
    }

    /// Whether every maximal cone is unimodular.
    pub fn is_smooth(&self) -> bool {
        self.smooth.iter().all(|&s| s)
    }
}

/// Block index of a configuration column: the position of the (unique)
/// nonzero entry among the first `r` coordinates.
fn column_block(config: &PointConfiguration, j: usize) -> Result<usize> {
    let mut block = None;
    for i in 0..config.r {
        if !config.columns[j][i].is_zero() {
            if block.is_some() {
                return Err(Error::InvalidInput(format!(
                    "column {j} has several nonzero block coordinates"
                )));
            }
            block = Some(i);
        }
    }
    block.ok_or_else(|| {
        Error::InvalidInput(format!("column {j} has no block coordinate"))
    })
}

/// Build the fan of a maximal triangulation.
pub fn fan_from_triangulation(
    config: &PointConfiguration,
    t: &Triangulation,
) -> Result<Fan> {
    if !is_maximal(config, t) {
        return Err(Error::NotMaximal {
            reason: "every column must be used and every simplex must contain all origin columns"
                .to_string(),
        });
    }
    let r = config.r;
    let n = config.lattice_rank();
    // Rays: the ν-parts of the non-origin columns, in column order.
    let mut rays = Vec::new();
    let mut ray_blocks = Vec::new();
    let mut col_to_ray = vec![usize::MAX; config.num_columns()];
    for j in r..config.num_columns() {
        let nu: Vec<Z> = config.columns[j][r..].to_vec();
        debug_assert!(
            {
                let g = nu.iter().fold(Z::zero(), |acc, v| acc.gcd(v));
                g == Z::one()
            },
            "boundary points of a reflexive polytope are primitive"
        );
        col_to_ray[j] = rays.len();
        ray_blocks.push(column_block(config, j)?);
        rays.push(nu);
    }
    let mut maximal_cones = Vec::new();
    let mut multiplicities = Vec::new();
    let mut smooth = Vec::new();
    for simplex in &t.simplices {
        let cone: Vec<usize> = simplex
            .iter()
            .filter(|&&j| j >= r)
            .map(|&j| col_to_ray[j])
            .sorted()
            .collect();
        if cone.len() != n {
            return Err(Error::NotMaximal {
                reason: format!(
                    "simplex {simplex:?} induces a cone with {} rays in dimension {n}",
                    cone.len()
                ),
            });
        }
        let mat = ZMat::from_z_rows(cone.iter().map(|&i| rays[i].clone()).collect());
        let det = mat.det().abs();
        if det.is_zero() {
            return Err(Error::NotComplete {
                reason: format!("cone {cone:?} is degenerate"),
            });
        }
        smooth.push(det == Z::one());
        multiplicities.push(det);
        maximal_cones.push(cone);
    }
    let fan = Fan {
        rays,
        maximal_cones,
        multiplicities,
        smooth,
        ray_blocks,
        num_blocks: r,
    };
    check_complete(&fan)?;
    Ok(fan)
}

/// Completeness: the origin must be strictly interior to the convex hull of
/// the ray generators (together with the triangulation property this makes
/// the cones cover `ℝⁿ`).
fn check_complete(fan: &Fan) -> Result<()> {
    let poly = crate::polytope::LatticePolytope::new(fan.dim(), fan.rays.clone())
        .map_err(|_| Error::NotComplete {
            reason: "rays do not span the ambient space".to_string(),
        })?;
    if !poly.origin_interior() {
        return Err(Error::NotComplete {
            reason: "origin is not interior to the convex hull of the rays".to_string(),
        });
    }
    Ok(())
}

/// Minimal non-faces of the fan (generators of the Stanley–Reisner ideal),
/// as sorted index sets in lexicographic order.
pub fn stanley_reisner(fan: &Fan) -> Vec<Vec<usize>> {
    let p = fan.rays.len();
    // All faces: subsets of maximal cones.
    let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
    for cone in &fan.maximal_cones {
        for k in 0..=cone.len() {
            for sub in cone.iter().copied().combinations(k) {
                faces.insert(sub);
            }
        }
    }
    let mut generators: Vec<Vec<usize>> = Vec::new();
    let is_minimal_nonface = |s: &[usize], faces: &BTreeSet<Vec<usize>>| -> bool {
        if faces.contains(s) {
            return false;
        }
        // Every proper maximal subset must be a face.
        for skip in 0..s.len() {
            let sub: Vec<usize> = s
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, &v)| v)
                .collect();
            if !faces.contains(&sub) {
                return false;
            }
        }
        true
    };
    for size in 1..=(fan.dim() + 1).min(p) {
        for s in (0..p).combinations(size) {
            if is_minimal_nonface(&s, &faces) {
                generators.push(s);
            }
        }
    }
    generators
}

// ---------------------------------------------------------------------------
// Intersection functional
// ---------------------------------------------------------------------------

/// The exact top-degree intersection functional of a complete simplicial fan.
pub struct IntersectionFunctional {
    fan: Fan,
    /// sorted cone → 1/multiplicity.
    cone_values: BTreeMap<Vec<usize>, Q>,
    faces: BTreeSet<Vec<usize>>,
    memo: RefCell<BTreeMap<Vec<u32>, Q>>,
}

/// Build the intersection functional (requires a complete fan).
pub fn intersection_numbers(fan: &Fan) -> Result<IntersectionFunctional> {
    check_complete(fan)?;
    let mut cone_values = BTreeMap::new();
    let mut faces = BTreeSet::new();
    for (cone, mult) in fan.maximal_cones.iter().zip(&fan.multiplicities) {
        cone_values.insert(cone.clone(), Q::new(Z::one(), mult.clone()));
        for k in 0..=cone.len() {
            for sub in cone.iter().copied().combinations(k) {
                faces.insert(sub);
            }
        }
    }
    Ok(IntersectionFunctional {
        fan: fan.clone(),
        cone_values,
        faces,
        memo: RefCell::new(BTreeMap::new()),
    })
}

impl IntersectionFunctional {
    /// The fan.
    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    /// Evaluate `∫ ∏_i D_i^{e_i}` for a monomial of total degree `dim`.
    pub fn eval(&self, exponents: &[u32]) -> Result<Q> {
        let n = self.fan.dim();
        let total: u32 = exponents.iter().sum();
        if exponents.len() != self.fan.rays.len() || total as usize != n {
            return Err(Error::InvalidInput(format!(
                "intersection monomial must have degree {n} over {} rays",
                self.fan.rays.len()
            )));
        }
        self.eval_inner(exponents.to_vec())
    }

    fn eval_inner(&self, exponents: Vec<u32>) -> Result<Q> {
        if let Some(v) = self.memo.borrow().get(&exponents) {
            return Ok(v.clone());
        }
        let support: Vec<usize> = exponents
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| i)
            .collect();
        let value = if !self.faces.contains(&support) {
            Q::zero()
        } else if let Some(&first_repeated) = support
            .iter()
            .find(|&&i| exponents[i] > 1)
        {
            self.reduce_repeated(&exponents, &support, first_repeated)?
        } else {
            // Squarefree monomial whose support is a face of full dimension:
            // in a simplicial fan this is a maximal cone.
            self.cone_values
                .get(&support)
                .cloned()
                .ok_or_else(|| Error::NotComplete {
                    reason: format!("face {support:?} of full size is not a maximal cone"),
                })?
        };
        self.memo.borrow_mut().insert(exponents, value.clone());
        Ok(value)
    }

    /// Rewrite one factor `D_i` (with `i` repeated) using the linear relation
    /// of a form `m` with `⟨m, ν_i⟩ = 1` and `⟨m, ν_ρ⟩ = 0` for the other
    /// support rays: `D_i · rest = −Σ_{ρ ∉ support} ⟨m, ν_ρ⟩ D_ρ · rest`.
    fn reduce_repeated(&self, exponents: &[u32], support: &[usize], i: usize) -> Result<Q> {
        let n = self.fan.dim();
        let mut rows: Vec<Vec<Q>> = Vec::new();
        let mut rhs: Vec<Q> = Vec::new();
        for &s in support {
            rows.push(self.fan.rays[s].iter().map(|v| Q::from(v.clone())).collect());
            rhs.push(if s == i { Q::one() } else { Q::zero() });
        }
        let mat = QMat::from_rows(rows).transpose();
        // Solve ᵗ(ν_s) m = rhs, i.e. mat is n × |support| — transpose again:
        // we need ⟨m, ν_s⟩ = rhs_s, rows indexed by support rays.
        let system = mat.transpose();
        let m = system.solve(&rhs).ok_or_else(|| Error::InvalidInput(
            "no separating form exists for a face (fan not simplicial?)".to_string(),
        ))?;
        debug_assert_eq!(m.len(), n);
        let mut value = Q::zero();
        for (rho, ray) in self.fan.rays.iter().enumerate() {
            if support.contains(&rho) {
                continue;
            }
            let pairing: Q = ray
                .iter()
                .zip(&m)
                .map(|(v, mi)| Q::from(v.clone()) * mi)
                .sum();
            if pairing.is_zero() {
                continue;
            }
            let mut next = exponents.to_vec();
            next[i] -= 1;
            next[rho] += 1;
            value -= pairing * self.eval_inner(next)?;
        }
        Ok(value)
    }
}

// ---------------------------------------------------------------------------
// Divisor polynomials (internal helper)
// ---------------------------------------------------------------------------

/// Sparse polynomial in the divisor classes `D_1..D_p` with rational
/// coefficients, truncated at a maximal total degree.
#[derive(Clone, Debug, PartialEq, Eq)]
struct DivisorPoly {
    nrays: usize,
    max_degree: u32,
    terms: BTreeMap<Vec<u32>, Q>,
}

impl DivisorPoly {
    fn zero(nrays: usize, max_degree: u32) -> Self {
        DivisorPoly {
            nrays,
            max_degree,
            terms: BTreeMap::new(),
        }
    }

    fn one(nrays: usize, max_degree: u32) -> Self {
        let mut p = DivisorPoly::zero(nrays, max_degree);
        p.insert(vec![0; nrays], Q::one());
        p
    }

    fn insert(&mut self, exp: Vec<u32>, coeff: Q) {
        if coeff.is_zero() || exp.iter().sum::<u32>() > self.max_degree {
            return;
        }
        let entry = self.terms.entry(exp.clone()).or_insert_with(Q::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    /// Linear polynomial `Σ coeffs[i] D_i`.
    fn linear(coeffs: &[Q], max_degree: u32) -> Self {
        let mut p = DivisorPoly::zero(coeffs.len(), max_degree);
        for (i, c) in coeffs.iter().enumerate() {
            let mut exp = vec![0; coeffs.len()];
            exp[i] = 1;
            p.insert(exp, c.clone());
        }
        p
    }

    fn add(&self, other: &DivisorPoly) -> DivisorPoly {
        let mut out = self.clone();
        for (exp, c) in &other.terms {
            out.insert(exp.clone(), c.clone());
        }
        out
    }

    fn mul(&self, other: &DivisorPoly) -> DivisorPoly {
        let mut out = DivisorPoly::zero(self.nrays, self.max_degree.min(other.max_degree));
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let exp: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.insert(exp, c1.clone() * c2);
            }
        }
        out
    }

    fn scale(&self, factor: &Q) -> DivisorPoly {
        let mut out = DivisorPoly::zero(self.nrays, self.max_degree);
        for (exp, c) in &self.terms {
            out.insert(exp.clone(), c.clone() * factor);
        }
        out
    }

    /// The homogeneous part of a given degree.
    fn graded_part(&self, degree: u32) -> DivisorPoly {
        let mut out = DivisorPoly::zero(self.nrays, self.max_degree);
        for (exp, c) in &self.terms {
            if exp.iter().sum::<u32>() == degree {
                out.insert(exp.clone(), c.clone());
            }
        }
        out
    }

    /// `1/(1 + z)` truncated: `Σ_k (−z)^k` for `z` with no constant term.
    fn geometric_inverse(z: &DivisorPoly) -> DivisorPoly {
        let mut out = DivisorPoly::one(z.nrays, z.max_degree);
        let mut power = DivisorPoly::one(z.nrays, z.max_degree);
        let mut sign = Q::one();
        for _ in 0..z.max_degree {
            power = power.mul(z);
            if power.terms.is_empty() {
                break;
            }
            sign = -sign;
            out = out.add(&power.scale(&sign));
        }
        out
    }

    /// Evaluate the functional on the degree-`n` part.
    fn integrate(&self, functional: &IntersectionFunctional) -> Result<Q> {
        let n = functional.fan().dim() as u32;
        let mut total = Q::zero();
        for (exp, c) in &self.terms {
            if exp.iter().sum::<u32>() == n {
                total += c.clone() * functional.eval(exp)?;
            }
        }
        Ok(total)
    }
}

// ---------------------------------------------------------------------------
// The hypersurface / complete-intersection cohomology ring
// ---------------------------------------------------------------------------

/// Even cohomology ring of the Calabi–Yau inside the toric ambient space:
/// a graded basis `1, J_k, (duals), vol` with exact intersection data.
#[derive(Clone, Debug)]
pub struct CohomologyRing {
    /// The ambient fan.
    pub fan: Fan,
    /// The graded algebra on the basis `1, J_1..J_s, …, vol`.
    pub algebra: Arc<NilpotentAlgebra>,
    /// Expression of each generator in divisor classes: `J_k = Σ_i c_i D_i`.
    pub j_coeffs: Vec<Vec<Q>>,
    /// Triple intersections `K_klm = ∫ J_k J_l J_m` (empty below threefolds).
    pub triple: Vec<Vec<Vec<Q>>>,
    /// `∫ c₂ · J_k` for each generator (empty below threefolds).
    pub c2_j: Vec<Q>,
    /// Euler number `χ = ∫ c_top`.
    pub chi: Q,
    /// Hodge numbers `(h¹¹, h²¹)` supplied by the caller.
    pub h11: usize,
    /// See `h11`.
    pub h21: usize,
}

impl CohomologyRing {
    /// Dimension of the Calabi–Yau (top grading degree).
    pub fn top_degree(&self) -> u32 {
        self.algebra.top_degree()
    }

    /// The ring data (algebra + Chern classes) for the series layer: the
    /// second Chern class has dual-basis coordinates `∫ c₂ J_m`, the third is
    /// `χ ·` the normalized top class.
    pub fn ring_data(&self) -> RingData {
        let algebra = self.algebra.clone();
        let dim = algebra.dim();
        let mut c2 = vec![Q::zero(); dim];
        let mut c3 = vec![Q::zero(); dim];
        if algebra.top_degree() == 3 {
            let s = algebra.generators.len();
            for m in 0..s {
                // b_m sits right after the generators in the basis order.
                c2[1 + s + m] = self.c2_j[m].clone();
            }
            c3[dim - 1] = self.chi.clone();
        }
        RingData { algebra, c2, c3 }
    }
}

/// Normal-crossing block classes `Z_b = Σ_{rays in block b} D_i`.
fn block_classes(fan: &Fan, max_degree: u32) -> Vec<DivisorPoly> {
    let p = fan.rays.len();
    (0..fan.num_blocks)
        .map(|b| {
            let coeffs: Vec<Q> = (0..p)
                .map(|i| {
                    if fan.ray_blocks[i] == b {
                        Q::one()
                    } else {
                        Q::zero()
                    }
                })
                .collect();
            DivisorPoly::linear(&coeffs, max_degree)
        })
        .collect()
}

/// Build the Calabi–Yau cohomology ring from a maximal triangulation, the
/// chart basis it induces (for the generator pairing `⟨J_k, l^{(m)}⟩ =
/// δ_km`), and the Hodge numbers from the polytope combinatorics.
pub fn hypersurface_ring(
    config: &PointConfiguration,
    t: &Triangulation,
    chart: &ChartBasis,
    hodge: (usize, usize),
) -> Result<CohomologyRing> {
    let fan = fan_from_triangulation(config, t)?;
    let (h11, h21) = hodge;
    let s = chart.vectors.len();
    if s != h11 {
        return Err(Error::TwistedSectorMismatch {
            toric_rank: s,
            h11,
        });
    }
    let n = fan.dim();
    let r = fan.num_blocks;
    if n < r + 1 {
        return Err(Error::InvalidInput(format!(
            "ambient dimension {n} too small for {r} hypersurface classes"
        )));
    }
    let top = (n - r) as u32; // complex dimension of the Calabi–Yau
    let p = fan.rays.len();
    let functional = intersection_numbers(&fan)?;

    // J_k = Σ_i c_i D_i with Σ_i c_i l_i^{(m)} = δ_km (entries of the chart
    // vectors on the non-origin columns); deterministic underdetermined
    // solve.  Any representative works: the difference of two solutions is a
    // linear relation, which the functional annihilates.
    let rows: Vec<Vec<Q>> = chart
        .vectors
        .iter()
        .map(|l| l[r..].iter().map(|v| Q::from(v.clone())).collect())
        .collect();
    let pairing = QMat::from_rows(rows);
    let mut j_coeffs = Vec::with_capacity(s);
    for k in 0..s {
        let mut rhs = vec![Q::zero(); s];
        rhs[k] = Q::one();
        let c = pairing.solve(&rhs).ok_or_else(|| Error::PairingMismatch {
            reason: format!("no divisor class pairs as δ with chart vector {}", k + 1),
        })?;
        j_coeffs.push(c);
    }

    let max_degree = n as u32;
    let blocks = block_classes(&fan, max_degree);
    // Restriction: ∫_CY α = ∫_ambient α · ∏_b Z_b.
    let mut restriction = DivisorPoly::one(p, max_degree);
    for zb in &blocks {
        restriction = restriction.mul(zb);
    }
    let integrate_cy = |poly: &DivisorPoly| -> Result<Q> {
        // Lift to the full ambient degree bound before multiplying by the
        // restriction class, so the degree-n products are retained.
        let lifted = DivisorPoly {
            nrays: p,
            max_degree,
            terms: poly.terms.clone(),
        };
        lifted.mul(&restriction).integrate(&functional)
    };

    // Total Chern class of the Calabi–Yau: ∏(1+D_i) / ∏_b (1+Z_b), truncated
    // at the top grading degree.
    let mut chern = DivisorPoly::one(p, top.min(3));
    for i in 0..p {
        let mut lin = DivisorPoly::one(p, top.min(3));
        let mut exp = vec![0; p];
        exp[i] = 1;
        lin.insert(exp, Q::one());
        chern = chern.mul(&lin);
    }
    for zb in &blocks {
        let zb_trunc = DivisorPoly {
            nrays: p,
            max_degree: top.min(3),
            terms: zb.terms.clone(),
        };
        chern = chern.mul(&DivisorPoly::geometric_inverse(&zb_trunc));
    }
    // First Chern class must vanish identically (Calabi–Yau condition).
    if chern.graded_part(1).terms.iter().any(|(_, c)| !c.is_zero()) {
        return Err(Error::RingMismatch {
            reason: "first Chern class of the restriction does not vanish".to_string(),
        });
    }

    let j_polys: Vec<DivisorPoly> = j_coeffs
        .iter()
        .map(|c| DivisorPoly::linear(c, max_degree))
        .collect();

    let require_integer = |v: &Q, what: &str| -> Result<Q> {
        if v.is_integer() {
            Ok(v.clone())
        } else {
            Err(Error::RingMismatch {
                reason: format!("{what} = {} is not an integer", crate::num::format_q(v)),
            })
        }
    };

    // Euler number: χ = ∫_CY c_top.
    let chi = integrate_cy(&chern.graded_part(top))?;
    let chi = require_integer(&chi, "Euler number")?;
    if top == 3 {
        let expected = Q::from(Z::from(2 * (h11 as i64 - h21 as i64)));
        if chi != expected {
            return Err(Error::RingMismatch {
                reason: format!(
                    "Euler number {} does not match 2(h11 − h21) = {}",
                    crate::num::format_q(&chi),
                    crate::num::format_q(&expected)
                ),
            });
        }
    }

    // Assemble the graded algebra.
    let algebra;
    let mut triple = Vec::new();
    let mut c2_j = Vec::new();
    match top {
        1 => {
            // Curve: basis (1, J) with ∫ J = 1, so J is the top class.
            if s != 1 {
                return Err(Error::TwistedSectorMismatch {
                    toric_rank: s,
                    h11: 1,
                });
            }
            let degree = integrate_cy(&j_polys[0])?;
            if degree != Q::one() {
                return Err(Error::RingMismatch {
                    reason: format!(
                        "curve generator has degree {}, expected 1",
                        crate::num::format_q(&degree)
                    ),
                });
            }
            let mut table = vec![vec![vec![Q::zero(); 2]; 2]; 2];
            table[0][0][0] = Q::one();
            table[0][1][1] = Q::one();
            table[1][0][1] = Q::one();
            algebra = NilpotentAlgebra::new(
                vec!["1".into(), "J1".into()],
                vec![0, 1],
                table,
                vec![1],
            )?;
        }
        2 => {
            // Surface: basis (1, J_k, vol) with J_i J_k = (∫ J_i J_k) vol.
            let dim = s + 2;
            let mut table = vec![vec![vec![Q::zero(); dim]; dim]; dim];
            for j in 0..dim {
                table[0][j][j] = Q::one();
                table[j][0][j] = Q::one();
            }
            for i in 0..s {
                for k in 0..s {
                    let g = integrate_cy(&j_polys[i].mul(&j_polys[k]))?;
                    let g = require_integer(&g, "surface intersection")?;
                    table[1 + i][1 + k][dim - 1] = g;
                }
            }
            let mut names = vec!["1".to_string()];
            names.extend((0..s).map(|k| format!("J{}", k + 1)));
            names.push("vol".into());
            let mut degrees = vec![0];
            degrees.extend(std::iter::repeat_n(1, s));
            degrees.push(2);
            algebra =
                NilpotentAlgebra::new(names, degrees, table, (1..=s).collect())?;
        }
        3 => {
            // Threefold: basis (1, J_k, b_m, vol) with ∫ J_k b_m = δ_km.
            let mut k_tensor = vec![vec![vec![Q::zero(); s]; s]; s];
            for k in 0..s {
                for l in 0..s {
                    for m in 0..s {
                        let v =
                            integrate_cy(&j_polys[k].mul(&j_polys[l]).mul(&j_polys[m]))?;
                        k_tensor[k][l][m] = require_integer(&v, "triple intersection")?;
                    }
                }
            }
            let c2 = chern.graded_part(2);
            for jp in &j_polys {
                let v = integrate_cy(&c2.mul(jp))?;
                c2_j.push(require_integer(&v, "c2 pairing")?);
            }
            let dim = 2 * s + 2;
            let mut table = vec![vec![vec![Q::zero(); dim]; dim]; dim];
            for j in 0..dim {
                table[0][j][j] = Q::one();
                table[j][0][j] = Q::one();
            }
            let jdx = |k: usize| 1 + k;
            let bdx = |m: usize| 1 + s + m;
            let vdx = dim - 1;
            for k in 0..s {
                for l in 0..s {
                    for m in 0..s {
                        table[jdx(k)][jdx(l)][bdx(m)] = k_tensor[k][l][m].clone();
                    }
                }
            }
            for k in 0..s {
                table[jdx(k)][bdx(k)][vdx] = Q::one();
                table[bdx(k)][jdx(k)][vdx] = Q::one();
            }
            let mut names = vec!["1".to_string()];
            names.extend((0..s).map(|k| format!("J{}", k + 1)));
            names.extend((0..s).map(|m| format!("b{}", m + 1)));
            names.push("vol".into());
            let mut degrees = vec![0];
            degrees.extend(std::iter::repeat_n(1, s));
            degrees.extend(std::iter::repeat_n(2, s));
            degrees.push(3);
            algebra =
                NilpotentAlgebra::new(names, degrees, table, (1..=s).collect())?;
            triple = k_tensor;
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "cohomology ring not implemented for dimension {other}"
            )));
        }
    }

    Ok(CohomologyRing {
        fan,
        algebra: Arc::new(algebra),
        j_coeffs,
        triple,
        c2_j,
        chi,
        h11,
        h21,
    })
}

// ---------------------------------------------------------------------------
// Kähler (ample) cone certificate
// ---------------------------------------------------------------------------

/// Certificate that a divisor class is convex (nef) or strictly convex
/// (ample) as a piecewise-linear support function on the fan: on each maximal
/// cone `σ` the linear form `m_σ` with `⟨m_σ, ν_i⟩ = c_i (i ∈ σ)` must
/// satisfy `⟨m_σ, ν_q⟩ ≤ c_q` for every other ray (`<` for strict).
pub fn convexity_certificate(fan: &Fan, class: &[Q], strict: bool) -> Result<()> {
    if class.len() != fan.rays.len() {
        return Err(Error::InvalidInput(format!(
            "class has {} coordinates for {} rays",
            class.len(),
            fan.rays.len()
        )));
    }
    for (ci, cone) in fan.maximal_cones.iter().enumerate() {
        let rows: Vec<Vec<Q>> = cone
            .iter()
            .map(|&i| fan.rays[i].iter().map(|v| Q::from(v.clone())).collect())
            .collect();
        let rhs: Vec<Q> = cone.iter().map(|&i| class[i].clone()).collect();
        let m = QMat::from_rows(rows)
            .solve(&rhs)
            .ok_or_else(|| Error::InvalidInput(format!("cone {ci} is degenerate")))?;
        for (q, ray) in fan.rays.iter().enumerate() {
            if cone.contains(&q) {
                continue;
            }
            let value: Q = ray
                .iter()
                .zip(&m)
                .map(|(v, mi)| Q::from(v.clone()) * mi)
                .sum();
            let violated = if strict {
                value >= class[q]
            } else {
                value > class[q]
            };
            if violated {
                return Err(Error::NotConvex {
                    wall: format!("cone {:?} against ray {q}", cone),
                });
            }
        }
    }
    Ok(())
}

/// Result of certifying that the chart generators span the Kähler cone.
#[derive(Clone, Debug)]
pub struct KahlerCertificate {
    /// Each generator class is convex (nef).
    pub generators_nef: bool,
    /// The sum of the generators is strictly convex (ample).
    pub interior_ample: bool,
}

/// Certify the chart/Kähler-cone correspondence: every generator class
/// `J_k = Σ c_i D_i` must be convex and the interior point `Σ_k J_k` strictly
/// convex.
pub fn kahler_cone_certificate(fan: &Fan, j_coeffs: &[Vec<Q>]) -> Result<KahlerCertificate> {
    for c in j_coeffs {
        convexity_certificate(fan, c, false)?;
    }
    let p = fan.rays.len();
    let mut interior = vec![Q::zero(); p];
    for c in j_coeffs {
        for (i, v) in c.iter().enumerate() {
            interior[i] += v;
        }
    }
    convexity_certificate(fan, &interior, true)?;
    Ok(KahlerCertificate {
        generators_nef: true,
        interior_ample: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::build_hypersurface_config;
    use crate::num::{q, qr, z};
    use crate::polytope::LatticePolytope;
    use crate::triangulation::{chart_basis, enumerate_regular_triangulations, placing_triangulation};

    fn p4_setup() -> (PointConfiguration, Triangulation) {
        let delta_star = LatticePolytope::new(
            4,
            vec![
                vec![z(1), z(0), z(0), z(0)],
                vec![z(0), z(1), z(0), z(0)],
                vec![z(0), z(0), z(1), z(0)],
                vec![z(0), z(0), z(0), z(1)],
                vec![z(-1), z(-1), z(-1), z(-1)],
            ],
        )
        .unwrap();
        let config = build_hypersurface_config(&delta_star).unwrap();
        let t = placing_triangulation(&config).unwrap();
        assert!(is_maximal(&config, &t));
        (config, t)
    }

    fn p2_fan() -> Fan {
        let delta_star = LatticePolytope::new(
            2,
            vec![vec![z(1), z(0)], vec![z(0), z(1)], vec![z(-1), z(-1)]],
        )
        .unwrap();
        let config = build_hypersurface_config(&delta_star).unwrap();
        let t = placing_triangulation(&config).unwrap();
        fan_from_triangulation(&config, &t).unwrap()
    }

    fn p1xp1_fan() -> Fan {
        let square = LatticePolytope::new(
            2,
            vec![vec![z(1), z(0)], vec![z(-1), z(0)], vec![z(0), z(1)], vec![z(0), z(-1)]],
        )
        .unwrap();
        let config = build_hypersurface_config(&square).unwrap();
        let t = placing_triangulation(&config).unwrap();
        assert!(is_maximal(&config, &t));
        fan_from_triangulation(&config, &t).unwrap()
    }

    #[test]
    fn projective_space_fan() {
        let (config, t) = p4_setup();
        let fan = fan_from_triangulation(&config, &t).unwrap();
        assert_eq!(fan.rays.len(), 5);
        assert_eq!(fan.maximal_cones.len(), 5);
        assert!(fan.is_smooth());
        let sr = stanley_reisner(&fan);
        assert_eq!(sr, vec![vec![0, 1, 2, 3, 4]]);
    }

    #[test]
    fn plane_fan_and_stanley_reisner() {
        let fan = p2_fan();
        assert_eq!(fan.rays.len(), 3);
        assert_eq!(fan.maximal_cones.len(), 3);
        let sr = stanley_reisner(&fan);
        assert_eq!(sr, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn quadric_fan_stanley_reisner_pairs() {
        let fan = p1xp1_fan();
        assert_eq!(fan.rays.len(), 4);
        assert_eq!(fan.maximal_cones.len(), 4);
        let sr = stanley_reisner(&fan);
        // Opposite rays: (1,0)/(−1,0) and (0,1)/(0,−1).  Rays are in column
        // (lexicographic point) order: (−1,0), (0,−1), (0,1), (1,0).
        assert_eq!(sr.len(), 2);
        for gen in &sr {
            assert_eq!(gen.len(), 2);
            let a = &fan.rays[gen[0]];
            let b = &fan.rays[gen[1]];
            let sum: Vec<Z> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            assert!(sum.iter().all(|v| v.is_zero()));
        }
    }

    #[test]
    fn intersection_functional_on_smooth_fans() {
        let (config, t) = p4_setup();
        let fan = fan_from_triangulation(&config, &t).unwrap();
        let f = intersection_numbers(&fan).unwrap();
        // H⁴ = 1 for any ray class in projective space.
        assert_eq!(f.eval(&[4, 0, 0, 0, 0]).unwrap(), q(1));
        assert_eq!(f.eval(&[1, 1, 1, 1, 0]).unwrap(), q(1));
        assert_eq!(f.eval(&[2, 2, 0, 0, 0]).unwrap(), q(1));

        let fan2 = p1xp1_fan();
        let f2 = intersection_numbers(&fan2).unwrap();
        // Rays in order: (−1,0),(0,−1),(0,1),(1,0); H1·H2 = 1, H1² = 0.
        assert_eq!(f2.eval(&[1, 1, 0, 0]).unwrap(), q(1));
        assert_eq!(f2.eval(&[1, 0, 0, 1]).unwrap(), q(0));
        assert_eq!(f2.eval(&[2, 0, 0, 0]).unwrap(), q(0));
        assert_eq!(f2.eval(&[0, 2, 0, 0]).unwrap(), q(0));

        let fan3 = p2_fan();
        let f3 = intersection_numbers(&fan3).unwrap();
        assert_eq!(f3.eval(&[1, 1, 0]).unwrap(), q(1));
        assert_eq!(f3.eval(&[2, 0, 0]).unwrap(), q(1));
    }

    #[test]
    fn multiplicity_two_cone_gives_one_half() {
        // Weighted plane with rays (1,0), (0,1), (−1,−2): the cone
        // ((0,1),(−1,−2)) has multiplicity 1, ((1,0),(−1,−2)) multiplicity 2.
        let fan = Fan {
            rays: vec![vec![z(1), z(0)], vec![z(0), z(1)], vec![z(-1), z(-2)]],
            maximal_cones: vec![vec![0, 1], vec![0, 2], vec![1, 2]],
            multiplicities: vec![Z::one(), Z::from(2), Z::one()],
            smooth: vec![true, false, true],
            ray_blocks: vec![0, 0, 0],
            num_blocks: 1,
        };
        let f = intersection_numbers(&fan).unwrap();
        assert_eq!(f.eval(&[1, 0, 1]).unwrap(), qr(1, 2));
        assert_eq!(f.eval(&[1, 1, 0]).unwrap(), q(1));
        // Reduction with repeated factors stays consistent:
        // D₃ ~ relations give D₃² = 1/2.
        assert_eq!(f.eval(&[0, 0, 2]).unwrap(), qr(1, 2));
    }

    #[test]
    fn quintic_cohomology_ring() {
        let (config, t) = p4_setup();
        let triangulations = enumerate_regular_triangulations(&config).unwrap();
        let base = triangulations
            .iter()
            .position(|x| is_maximal(&config, x))
            .unwrap();
        let chart = chart_basis(&config, &triangulations, base).unwrap();
        let ring = hypersurface_ring(&config, &t, &chart, (1, 101)).unwrap();
        assert_eq!(ring.triple[0][0][0], q(5));
        assert_eq!(ring.c2_j[0], q(50));
        assert_eq!(ring.chi, q(-200));
        assert_eq!(ring.algebra.top_degree(), 3);
        // Table: J² = 5 b₁, J·b₁ = vol.
        assert_eq!(ring.algebra.table[1][1][2], q(5));
        assert_eq!(ring.algebra.table[1][2][3], q(1));
        // Ring data for the series layer.
        let data = ring.ring_data();
        assert_eq!(data.c2, vec![q(0), q(0), q(50), q(0)]);
        assert_eq!(data.c3, vec![q(0), q(0), q(0), q(-200)]);
    }

    #[test]
    fn elliptic_curve_ring_degenerates_correctly() {
        // Weighted-plane elliptic curve: explicit 4-column configuration.
        let config = crate::config::build_explicit_config(
            1,
            vec![
                vec![z(1), z(0), z(0)],
                vec![z(1), z(1), z(0)],
                vec![z(1), z(0), z(1)],
                vec![z(1), z(-2), z(-3)],
            ],
            None,
        )
        .unwrap();
        let t = placing_triangulation(&config).unwrap();
        assert!(is_maximal(&config, &t));
        let chart = ChartBasis {
            vectors: vec![vec![z(-6), z(2), z(3), z(1)]],
            signs: vec![1],
            monomials: vec!["x".into()],
        };
        let ring = hypersurface_ring(&config, &t, &chart, (1, 1)).unwrap();
        assert_eq!(ring.algebra.top_degree(), 1);
        assert_eq!(ring.algebra.dim(), 2);
        assert_eq!(ring.chi, q(0));
        // κ is trivial on a curve.
        let data = ring.ring_data();
        assert_eq!(data.kappa(), data.algebra.unit_elt());
    }

    #[test]
    fn twisted_sector_mismatch_detected() {
        let (config, t) = p4_setup();
        let triangulations = enumerate_regular_triangulations(&config).unwrap();
        let base = triangulations
            .iter()
            .position(|x| is_maximal(&config, x))
            .unwrap();
        let chart = chart_basis(&config, &triangulations, base).unwrap();
        let err = hypersurface_ring(&config, &t, &chart, (2, 101));
        assert!(matches!(err, Err(Error::TwistedSectorMismatch { .. })));
    }

    #[test]
    fn kahler_certificate_accepts_hyperplane_and_rejects_difference() {
        let (config, t) = p4_setup();
        let fan = fan_from_triangulation(&config, &t).unwrap();
        // Hyperplane class: coefficient 1 on one ray.
        convexity_certificate(&fan, &[q(1), q(0), q(0), q(0), q(0)], true).unwrap();
        // Difference of ray classes is linearly trivial, hence not strictly
        // convex.
        let err = convexity_certificate(&fan, &[q(1), q(-1), q(0), q(0), q(0)], true);
        assert!(matches!(err, Err(Error::NotConvex { .. })));
        let cert = kahler_cone_certificate(&fan, &[vec![q(1), q(0), q(0), q(0), q(0)]]).unwrap();
        assert!(cert.generators_nef && cert.interior_ample);
    }

    #[test]
    fn nonmaximal_triangulation_rejected() {
        let (config, _) = p4_setup();
        // A fake triangulation missing the origin column.
        let bad = Triangulation {
            simplices: vec![vec![1, 2, 3, 4, 5]],
        };
        assert!(matches!(
            fan_from_triangulation(&config, &bad),
            Err(Error::NotMaximal { .. })
        ));
    }
}
