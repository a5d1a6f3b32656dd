//! Hypergeometric systems of GKZ type and their Frobenius series solutions.
//!
//! A system is determined by a point configuration `A` (columns `ν̄_j`) and a
//! rational exponent vector `β`.  On a local chart of the moduli space —
//! given by a [`ChartBasis`] of kernel vectors `l^(1)..l^(s)` with coordinate
//! signs — the box operators push forward to exact operators in the Euler
//! derivatives `θ_k = x_k ∂/∂x_k`, and the holomorphic solution and its
//! cohomology-valued deformation are computed by closed-form coefficient
//! ratios.  Everything is exact rational/symbolic arithmetic.

use std::sync::Arc;

use num::{One, Signed, Zero};

use crate::config::{kernel_lattice, KernelLattice, PointConfiguration};
use crate::error::Error;
use crate::num::{format_q, Q, Z};
use crate::series::{
    LogSeries, NilpotentAlgebra, RingElt, RingSeries, Scalar, Truncation,
};
use crate::triangulation::ChartBasis;
use crate::Result;

// ---------------------------------------------------------------------------
// The system
// ---------------------------------------------------------------------------

/// A GKZ-type hypergeometric system: configuration `A`, its saturated kernel
/// lattice `L`, and the exponent vector `β`.
#[derive(Clone, Debug)]
pub struct GkzSystem {
    /// The point configuration (columns of `A`).
    pub config: PointConfiguration,
    /// Saturated kernel lattice of `A`.
    pub kernel: KernelLattice,
    /// Exponent vector `β` (length = ambient rank).
    pub beta: Vec<Q>,
}

impl GkzSystem {
    /// The standard exponent: `β = −1` on the `r` origin rows, `0` elsewhere.
    /// This covers hypersurface systems (`r = 1`) and complete intersections
    /// (`r ≥ 1`).
    pub fn standard(config: PointConfiguration) -> Result<Self> {
        let mut beta = vec![Q::zero(); config.ambient_rank];
        for row in beta.iter_mut().take(config.r) {
            *row = -Q::one();
        }
        GkzSystem::with_beta(config, beta)
    }

    /// A system with an explicitly supplied exponent vector.
    pub fn with_beta(config: PointConfiguration, beta: Vec<Q>) -> Result<Self> {
        if beta.len() != config.ambient_rank {
            return Err(Error::InvalidInput(format!(
                "exponent vector has length {}, expected {}",
                beta.len(),
                config.ambient_rank
            )));
        }
        let kernel = kernel_lattice(&config)?;
        Ok(GkzSystem {
            config,
            kernel,
            beta,
        })
    }

    /// Number of columns of `A`.
    pub fn num_columns(&self) -> usize {
        self.config.num_columns()
    }
}

/// Canonical rational solution of `A c = β`:
/// first try `c = −1` on each origin column and `0` elsewhere; otherwise the
/// solution supported on the shortest prefix of columns (free variables zero).
pub fn exponent_shift(sys: &GkzSystem) -> Result<Vec<Q>> {
    let a = sys.config.a_matrix().to_q();
    let p = sys.num_columns();
    let rank = sys.config.ambient_rank;

    let residual = |c: &[Q]| -> bool {
        (0..rank).all(|i| {
            let mut dot = Q::zero();
            for j in 0..p {
                dot += a[(i, j)].clone() * &c[j];
            }
            dot == sys.beta[i]
        })
    };

    let mut origin = vec![Q::zero(); p];
    for j in sys.config.origin_columns() {
        origin[j] = -Q::one();
    }
    if residual(&origin) {
        return Ok(origin);
    }

    for k in 1..=p {
        let rows: Vec<Vec<Q>> = (0..rank)
            .map(|i| (0..k).map(|j| a[(i, j)].clone()).collect())
            .collect();
        let sub = crate::linalg::QMat::from_rows(rows);
        if let Some(partial) = sub.solve(&sys.beta) {
            let mut c = partial;
            c.resize(p, Q::zero());
            debug_assert!(residual(&c));
            return Ok(c);
        }
    }
    Err(Error::NoSolution)
}

// ---------------------------------------------------------------------------
// Pushed-forward operators
// ---------------------------------------------------------------------------

/// A first-order linear form `constant + Σ_k theta[k] · θ_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinForm {
    /// Constant part.
    pub constant: Q,
    /// Coefficient of each `θ_k`.
    pub theta: Vec<Q>,
}

impl LinForm {
    fn apply(&self, w: &LogSeries) -> LogSeries {
        let mut out = w.scale_q(&self.constant);
        for (k, coeff) in self.theta.iter().enumerate() {
            if !coeff.is_zero() {
                out.add_assign(&w.theta(k).scale_q(coeff));
            }
        }
        out
    }

    fn apply_ring(&self, w: &RingSeries) -> RingSeries {
        let mut out = w.scale(&Scalar::from_q(self.constant.clone()));
        for (k, coeff) in self.theta.iter().enumerate() {
            if !coeff.is_zero() {
                out = out
                    .add(&w.theta(k).scale(&Scalar::from_q(coeff.clone())))
                    .expect("same algebra");
            }
        }
        out
    }
}

impl std::fmt::Display for LinForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}", format_q(&self.constant))?;
        for (k, c) in self.theta.iter().enumerate() {
            if !c.is_zero() {
                write!(f, " + {}·θ{}", format_q(c), k + 1)?;
            }
        }
        write!(f, ")")
    }
}

/// A box operator pushed to chart coordinates:
/// `∏ plus  −  sigma · x^shift · ∏ minus`,
/// where each factor is a [`LinForm`] in the Euler derivatives.
#[derive(Clone, Debug)]
pub struct PushedOperator {
    /// Display name.
    pub name: String,
    /// Monomial multiplying the minus product.
    pub shift: Vec<u32>,
    /// Sign `∏_k s_k^{c_k}` of the chart coordinates of the shift monomial.
    pub sigma: Q,
    /// Factors of the first product.
    pub plus: Vec<LinForm>,
    /// Factors of the second product.
    pub minus: Vec<LinForm>,
}

impl PushedOperator {
    /// Apply to a scalar series.
    pub fn apply(&self, w: &LogSeries) -> LogSeries {
        let mut lhs = w.clone();
        for f in &self.plus {
            lhs = f.apply(&lhs);
        }
        let mut rhs = w.clone();
        for f in &self.minus {
            rhs = f.apply(&rhs);
        }
        rhs = rhs.mul_monomial(&self.shift).scale_q(&self.sigma);
        lhs.sub(&rhs)
    }

    /// Apply to a cohomology-valued series.
    pub fn apply_ring(&self, w: &RingSeries) -> RingSeries {
        let mut lhs = w.clone();
        for f in &self.plus {
            lhs = f.apply_ring(&lhs);
        }
        let mut rhs = w.clone();
        for f in &self.minus {
            rhs = f.apply_ring(&rhs);
        }
        rhs = rhs
            .mul_monomial(&self.shift)
            .scale(&Scalar::from_q(self.sigma.clone()));
        lhs.sub(&rhs).expect("same algebra")
    }
}

impl std::fmt::Display for PushedOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: ", self.name)?;
        if self.plus.is_empty() {
            write!(f, "1")?;
        }
        for form in &self.plus {
            write!(f, "{form}")?;
        }
        write!(f, " - {}·x^{:?}·", format_q(&self.sigma), self.shift)?;
        if self.minus.is_empty() {
            write!(f, "1")?;
        }
        for form in &self.minus {
            write!(f, "{form}")?;
        }
        Ok(())
    }
}

/// Per-column multipliers `m_j = Σ_k l_j^{(k)} n_k` as a function of the
/// chart exponent `n` (here returned as the column-major matrix `L`).
fn chart_columns(chart: &ChartBasis, p: usize) -> Vec<Vec<Z>> {
    (0..p)
        .map(|j| chart.vectors.iter().map(|l| l[j].clone()).collect())
        .collect()
}

/// The box operator for the kernel vector `ℓ = Σ_k c_k l^(k)`, pushed to the
/// chart coordinates: with `D_j = ε_j + Σ_k l_j^{(k)} θ_k`,
///
/// `∏_{j: ℓ_j > 0} ∏_{t=0}^{ℓ_j−1} (D_j − t)  −  σ x^c ∏_{j: ℓ_j < 0} ∏_{t=0}^{−ℓ_j−1} (D_j − t)`,
///
/// where `σ = ∏_k s_k^{c_k}` accounts for the chart coordinate signs.
pub fn box_operator(
    sys: &GkzSystem,
    chart: &ChartBasis,
    c: &[u32],
    name: impl Into<String>,
) -> Result<PushedOperator> {
    let s = chart.vectors.len();
    if c.len() != s {
        return Err(Error::InvalidInput(format!(
            "box exponent has length {}, expected {s}",
            c.len()
        )));
    }
    let p = sys.num_columns();
    let eps = exponent_shift(sys)?;
    let mut ell = vec![Z::zero(); p];
    for (k, ck) in c.iter().enumerate() {
        for (j, l) in chart.vectors[k].iter().enumerate() {
            ell[j] += l * Z::from(*ck);
        }
    }
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for j in 0..p {
        let reps: i64 = i64::try_from(&ell[j]).map_err(|_| {
            Error::InvalidInput(format!("kernel entry {} too large", ell[j]))
        })?;
        let d_j = LinForm {
            constant: eps[j].clone(),
            theta: (0..s).map(|k| Q::from(chart.vectors[k][j].clone())).collect(),
        };
        let bucket = if reps > 0 { &mut plus } else { &mut minus };
        for t in 0..reps.unsigned_abs() {
            let mut f = d_j.clone();
            f.constant -= Q::from(Z::from(t));
            bucket.push(f);
        }
    }
    let mut sigma = Q::one();
    for (k, ck) in c.iter().enumerate() {
        if chart.signs[k] < 0 && ck % 2 == 1 {
            sigma = -sigma;
        }
    }
    Ok(PushedOperator {
        name: name.into(),
        shift: c.to_vec(),
        sigma,
        plus,
        minus,
    })
}

/// The pushed box operators for the chart generators, together with the data
/// of the Euler (torus-weight) operators.  On a chart the Euler operators act
/// diagonally: the term `x^{n+shift-part}` has eigenvalue
/// `A(ε + Σ n_k l^{(k)}) − β`, so they annihilate the series exactly when
/// `A ε = β` and `A l^{(k)} = 0`; both residuals are reported.
#[derive(Clone, Debug)]
pub struct GkzOperators {
    /// One pushed box operator per chart generator.
    pub boxes: Vec<PushedOperator>,
    /// `A l^{(k)}` for each chart vector (must vanish).
    pub kernel_residuals: Vec<Vec<Q>>,
    /// `A ε − β` (must vanish).
    pub shift_residual: Vec<Q>,
}

impl GkzOperators {
    /// Whether every Euler operator annihilates the chart series identically.
    pub fn euler_ok(&self) -> bool {
        self.shift_residual.iter().all(|v| v.is_zero())
            && self
                .kernel_residuals
                .iter()
                .all(|row| row.iter().all(|v| v.is_zero()))
    }
}

/// Build the operator package for a chart.
pub fn gkz_operators(sys: &GkzSystem, chart: &ChartBasis) -> Result<GkzOperators> {
    let s = chart.vectors.len();
    let a = sys.config.a_matrix();
    let rank = sys.config.ambient_rank;
    let mut boxes = Vec::with_capacity(s);
    for k in 0..s {
        let mut c = vec![0u32; s];
        c[k] = 1;
        boxes.push(box_operator(sys, chart, &c, format!("box[{}]", k + 1))?);
    }
    let mut kernel_residuals = Vec::with_capacity(s);
    for l in &chart.vectors {
        let mut row = Vec::with_capacity(rank);
        for i in 0..rank {
            let mut dot = Z::zero();
            for (j, lj) in l.iter().enumerate() {
                dot += a[(i, j)].clone() * lj;
            }
            row.push(Q::from(dot));
        }
        kernel_residuals.push(row);
    }
    let eps = exponent_shift(sys)?;
    let aq = a.to_q();
    let mut shift_residual = Vec::with_capacity(rank);
    for i in 0..rank {
        let mut dot = Q::zero();
        for (j, e) in eps.iter().enumerate() {
            dot += aq[(i, j)].clone() * e;
        }
        shift_residual.push(dot - &sys.beta[i]);
    }
    Ok(GkzOperators {
        boxes,
        kernel_residuals,
        shift_residual,
    })
}

// ---------------------------------------------------------------------------
// Frobenius series
// ---------------------------------------------------------------------------

/// All exponent vectors inside a truncation region, in lexicographic order.
pub fn enumerate_exponents(nvars: usize, trunc: &Truncation) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; nvars];
    fn rec(k: usize, total_left: u32, trunc: &Truncation, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == current.len() {
            out.push(current.clone());
            return;
        }
        let cap = match &trunc.per_var {
            Some(caps) => caps[k].min(total_left),
            None => total_left,
        };
        for e in 0..=cap {
            current[k] = e;
            rec(k + 1, total_left - e, trunc, current, out);
        }
        current[k] = 0;
    }
    rec(0, trunc.total, trunc, &mut current, &mut out);
    out
}

/// Per-column multipliers `m = L n` for a chart exponent `n`.
fn multipliers(cols: &[Vec<Z>], n: &[u32]) -> Vec<Z> {
    cols.iter()
        .map(|col| {
            col.iter()
                .zip(n)
                .map(|(l, nk)| l * Z::from(*nk))
                .sum::<Z>()
        })
        .collect()
}

/// Chart sign factor `∏_k s_k^{n_k}`.
fn sign_factor(chart: &ChartBasis, n: &[u32]) -> Q {
    let mut s = Q::one();
    for (k, nk) in n.iter().enumerate() {
        if chart.signs[k] < 0 && nk % 2 == 1 {
            s = -s;
        }
    }
    s
}

fn support_unstable(eps_j: &Q, t: u64, label: &str) -> Error {
    Error::SupportUnstable {
        factor: format!("{} + {} (column {})", format_q(eps_j), t, label),
    }
}

/// Exact rational coefficient ratio `c(n+ε)/c(ε)` times the chart signs: for
/// each column `j` with multiplier `m_j = (L n)_j`,
/// `m_j > 0` contributes `1/∏_{t=1}^{m_j} (ε_j + t)` and `m_j < 0`
/// contributes `∏_{t=0}^{|m_j|−1} (ε_j − t)`.
fn scalar_ratio(
    sys: &GkzSystem,
    chart: &ChartBasis,
    eps: &[Q],
    cols: &[Vec<Z>],
    n: &[u32],
) -> Result<Q> {
    let m = multipliers(cols, n);
    let mut value = sign_factor(chart, n);
    for (j, mj) in m.iter().enumerate() {
        let steps: i64 = i64::try_from(mj).map_err(|_| {
            Error::InvalidInput(format!("multiplier {mj} too large"))
        })?;
        if steps > 0 {
            for t in 1..=steps as u64 {
                let factor = eps[j].clone() + Q::from(Z::from(t));
                if factor.is_zero() {
                    return Err(support_unstable(&eps[j], t, &sys.config.labels[j]));
                }
                value /= factor;
            }
        } else {
            for t in 0..steps.unsigned_abs() {
                value *= eps[j].clone() - Q::from(Z::from(t));
            }
        }
        if value.is_zero() {
            return Ok(value);
        }
    }
    Ok(value)
}

/// Validate that a chart is usable for the Frobenius construction: the right
/// number of independent kernel vectors with matching sign data.
fn validate_chart(sys: &GkzSystem, chart: &ChartBasis) -> Result<()> {
    let s = sys.kernel.rank();
    if chart.vectors.len() != s || chart.signs.len() != s {
        return Err(Error::NonMaximalChart {
            reason: format!(
                "chart has {} vectors for kernel rank {s}",
                chart.vectors.len()
            ),
        });
    }
    let a = sys.config.a_matrix();
    for (k, l) in chart.vectors.iter().enumerate() {
        if l.len() != sys.num_columns() {
            return Err(Error::NonMaximalChart {
                reason: format!("chart vector {} has wrong length", k + 1),
            });
        }
        for i in 0..sys.config.ambient_rank {
            let dot: Z = (0..l.len()).map(|j| a[(i, j)].clone() * &l[j]).sum();
            if !dot.is_zero() {
                return Err(Error::NonMaximalChart {
                    reason: format!("chart vector {} is not in the kernel", k + 1),
                });
            }
        }
    }
    Ok(())
}

/// The holomorphic Frobenius solution on a chart: the power series with
/// `w₀(0) = 1` and exact rational coefficients.
pub fn frobenius_w0(sys: &GkzSystem, chart: &ChartBasis, trunc: Truncation) -> Result<LogSeries> {
    validate_chart(sys, chart)?;
    let eps = exponent_shift(sys)?;
    let cols = chart_columns(chart, sys.num_columns());
    let s = chart.vectors.len();
    let mut w = LogSeries::zero(s, trunc.clone());
    for n in enumerate_exponents(s, &trunc) {
        let value = scalar_ratio(sys, chart, &eps, &cols, &n)?;
        if !value.is_zero() {
            w.insert(n, vec![0; s], Scalar::from_q(value));
        }
    }
    Ok(w)
}

// ---------------------------------------------------------------------------
// Cohomology-valued Frobenius series
// ---------------------------------------------------------------------------

/// The coefficient ring data needed for the cohomology-valued series: the
/// graded algebra plus the second Chern class (a degree-2 element) and the
/// third Chern class (a degree-3 element, `χ ·` normalized top class).
#[derive(Clone, Debug)]
pub struct RingData {
    /// The even-cohomology algebra.
    pub algebra: Arc<NilpotentAlgebra>,
    /// Second Chern class in basis coordinates (zero for curves).
    pub c2: Vec<Q>,
    /// Third Chern class in basis coordinates (zero below threefolds).
    pub c3: Vec<Q>,
}

impl RingData {
    /// Ring data with vanishing Chern classes (suitable for curves and for
    /// tests that do not involve the Γ-normalizer).
    pub fn bare(algebra: Arc<NilpotentAlgebra>) -> Self {
        let dim = algebra.dim();
        RingData {
            algebra,
            c2: vec![Q::zero(); dim],
            c3: vec![Q::zero(); dim],
        }
    }

    /// The Γ-normalizer `κ = 1 − c₂/24 + Z₃·c₃` as a ring element.
    pub fn kappa(&self) -> RingElt {
        let mut k = self.algebra.unit_elt();
        let z3 = Scalar::z3();
        for i in 0..self.algebra.dim() {
            if !self.c2[i].is_zero() {
                k[i].add_assign(&Scalar::from_q(-self.c2[i].clone() / Q::from(Z::from(24))));
            }
            if !self.c3[i].is_zero() {
                k[i].add_assign(&z3.scale(&self.c3[i]));
            }
        }
        k
    }
}

/// The full family of cohomology-valued Frobenius series on a chart.
#[derive(Clone, Debug)]
pub struct FrobeniusFamily {
    /// `w₀(x, Ĵ) = κ · w_s`: the Γ-normalized series (classical periods).
    pub w0: RingSeries,
    /// `w₀` with the `x^{Ĵ}` factor stripped (no logarithms).
    pub w0_tilde: RingSeries,
    /// `w_s(x, Ĵ) = Σ_n [c(n+PĴ)/c(PĴ)] x^n · x^{PĴ}` (ratio-normalized).
    pub ws: RingSeries,
    /// `w_s` with the `x^{Ĵ}` factor stripped.
    pub ws_tilde: RingSeries,
    /// The normalizer `κ` relating the two: `w₀ = κ · w_s`.
    pub kappa: RingElt,
}

/// Inverse of `a + η` with `a` a nonzero rational and `η` nilpotent of
/// positive degree: `(1/a) Σ_i (−η/a)^i`.
fn invert_unit_plus_nilpotent(algebra: &NilpotentAlgebra, a: &Q, eta: &RingElt) -> RingElt {
    let mut out = algebra.zero_elt();
    out[0] = Scalar::from_q(a.recip());
    let mut power = algebra.unit_elt();
    let minus_inv_a = -a.recip();
    for i in 1..=(algebra.top_degree() as usize) {
        power = algebra.mul_elts(&power, eta);
        if power.iter().all(|c| c.is_zero()) {
            break;
        }
        let mut coeff = a.recip(); // (1/a) · (−1/a)^i
        for _ in 0..i {
            coeff *= &minus_inv_a;
        }
        for (o, p) in out.iter_mut().zip(&power) {
            o.add_assign(&p.scale(&coeff));
        }
    }
    out
}

/// Cohomology-valued coefficient ratio `c(n+PĴ)/c(PĴ)` times chart signs,
/// as a ring element with `ℚ[P]` coordinates.
fn ring_ratio(
    sys: &GkzSystem,
    chart: &ChartBasis,
    ring: &RingData,
    eps: &[Q],
    cols: &[Vec<Z>],
    n: &[u32],
) -> Result<RingElt> {
    let algebra = &ring.algebra;
    let m = multipliers(cols, n);
    let p_symbol = Scalar::p();
    let mut value = algebra.unit_elt();
    value[0] = Scalar::from_q(sign_factor(chart, n));
    for (j, mj) in m.iter().enumerate() {
        let steps: i64 = i64::try_from(mj).map_err(|_| {
            Error::InvalidInput(format!("multiplier {mj} too large"))
        })?;
        if steps == 0 {
            continue;
        }
        // η_j = P · Σ_k l_j^{(k)} J_k.
        let mut eta = algebra.zero_elt();
        for (k, l) in chart.vectors.iter().enumerate() {
            let lv = Q::from(l[j].clone());
            if !lv.is_zero() {
                eta[algebra.generators[k]].add_assign(&p_symbol.scale(&lv));
            }
        }
        if steps > 0 {
            for t in 1..=steps as u64 {
                let a = eps[j].clone() + Q::from(Z::from(t));
                if a.is_zero() {
                    return Err(support_unstable(&eps[j], t, &sys.config.labels[j]));
                }
                let inv = invert_unit_plus_nilpotent(algebra, &a, &eta);
                value = algebra.mul_elts(&value, &inv);
            }
        } else {
            for t in 0..steps.unsigned_abs() {
                let mut factor = eta.clone();
                factor[0].add_assign(&Scalar::from_q(eps[j].clone() - Q::from(Z::from(t))));
                value = algebra.mul_elts(&value, &factor);
            }
        }
    }
    Ok(value)
}

/// The formal factor `x^{PĴ} = ∏_k exp(J_k L_k)` as a ring-valued series.
pub fn log_monomial_factor(
    algebra: Arc<NilpotentAlgebra>,
    nvars: usize,
    trunc: Truncation,
) -> Result<RingSeries> {
    let mut jl = RingSeries::zero(algebra.clone(), nvars, trunc);
    for k in 0..algebra.generators.len() {
        let mut logs = vec![0u32; nvars];
        logs[k] = 1;
        jl.comps[algebra.generators[k]].insert(vec![0; nvars], logs, Scalar::one());
    }
    jl.exp()
}

/// Build the cohomology-valued Frobenius family on a chart.  Requires ring
/// generators in bijection with the chart basis.
pub fn frobenius_cohomology(
    sys: &GkzSystem,
    chart: &ChartBasis,
    ring: &RingData,
    trunc: Truncation,
) -> Result<FrobeniusFamily> {
    validate_chart(sys, chart)?;
    let algebra = &ring.algebra;
    let s = chart.vectors.len();
    if algebra.generators.len() != s {
        return Err(Error::PairingMismatch {
            reason: format!(
                "{} ring generators for {} chart coordinates",
                algebra.generators.len(),
                s
            ),
        });
    }
    if ring.c2.len() != algebra.dim() || ring.c3.len() != algebra.dim() {
        return Err(Error::RingMismatch {
            reason: "Chern class coordinates have wrong length".to_string(),
        });
    }
    let eps = exponent_shift(sys)?;
    let cols = chart_columns(chart, sys.num_columns());

    let mut ws_tilde = RingSeries::zero(algebra.clone(), s, trunc.clone());
    for n in enumerate_exponents(s, &trunc) {
        let elt = ring_ratio(sys, chart, ring, &eps, &cols, &n)?;
        for (comp, value) in ws_tilde.comps.iter_mut().zip(&elt) {
            if !value.is_zero() {
                comp.insert(n.clone(), vec![0; s], value.clone());
            }
        }
    }
    let xj = log_monomial_factor(algebra.clone(), s, trunc.clone())?;
    let ws = ws_tilde.mul(&xj)?;
    let kappa = ring.kappa();
    let w0 = ws.mul_elt(&kappa);
    let w0_tilde = ws_tilde.mul_elt(&kappa);

    // Definitional consistency: the degree-0 part of w_s is the holomorphic
    // solution.
    debug_assert_eq!(
        ws.comps[0],
        frobenius_w0(sys, chart, trunc.clone())?,
        "degree-0 part of the deformed series must match the scalar solution"
    );

    Ok(FrobeniusFamily {
        w0,
        w0_tilde,
        ws,
        ws_tilde,
        kappa,
    })
}

// ---------------------------------------------------------------------------
// Gamma-function log expansion (symbolic oracle)
// ---------------------------------------------------------------------------

/// A constant of the form `rational + gamma·γ + ln2·log 2 + zeta2·ζ(2) +
/// zeta3·ζ(3)`, tracked symbolically.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SymbolicConstant {
    /// Rational part.
    pub rational: Q,
    /// Coefficient of Euler's γ.
    pub gamma: Q,
    /// Coefficient of `log 2`.
    pub ln2: Q,
    /// Coefficient of `ζ(2)`.
    pub zeta2: Q,
    /// Coefficient of `ζ(3)`.
    pub zeta3: Q,
}

impl SymbolicConstant {
    fn sub(&self, other: &SymbolicConstant) -> SymbolicConstant {
        SymbolicConstant {
            rational: self.rational.clone() - &other.rational,
            gamma: self.gamma.clone() - &other.gamma,
            ln2: self.ln2.clone() - &other.ln2,
            zeta2: self.zeta2.clone() - &other.zeta2,
            zeta3: self.zeta3.clone() - &other.zeta3,
        }
    }

    /// The rational value if all transcendental parts vanish.
    pub fn as_rational(&self) -> Option<Q> {
        if self.gamma.is_zero() && self.ln2.is_zero() && self.zeta2.is_zero() && self.zeta3.is_zero()
        {
            Some(self.rational.clone())
        } else {
            None
        }
    }
}

/// Maximum supported expansion depth (threefold grading).
pub const MAX_GAMMA_DEPTH: usize = 3;

/// Taylor coefficients of `log Γ(1+z+ε) − log Γ(1+z)` in `ε` up to `ε^depth`,
/// for `z` a nonnegative integer or half-integer `≥ −1/2`.  Built from the
/// polygamma values at `1` and `1/2`:
/// `ψ(1) = −γ`, `ψ′(1) = ζ(2)`, `ψ″(1) = −2ζ(3)`,
/// `ψ(1/2) = −γ − 2 log 2`, `ψ′(1/2) = 3ζ(2)`, `ψ″(1/2) = −14ζ(3)`,
/// shifted by harmonic-type sums.
pub fn gamma_log_expansion(z: &Q, depth: usize) -> Result<Vec<SymbolicConstant>> {
    if depth > MAX_GAMMA_DEPTH {
        return Err(Error::DepthExceeded {
            depth,
            max: MAX_GAMMA_DEPTH,
        });
    }
    let two = Z::from(2);
    let arg = z + Q::one(); // expansion point 1 + z
    let (psi0, psi1, psi2);
    if arg.is_integer() {
        let m = arg.to_integer();
        if m < Z::one() {
            return Err(Error::InvalidInput(format!(
                "gamma expansion at non-positive integer argument {}",
                format_q(&arg)
            )));
        }
        // ψ at a positive integer m: −γ + H_{m−1}, etc.
        let mut h1 = Q::zero();
        let mut h2 = Q::zero();
        let mut h3 = Q::zero();
        let mut j = Z::one();
        while j < m {
            let inv = Q::new(Z::one(), j.clone());
            h1 += &inv;
            h2 += inv.clone() * &inv;
            h3 += inv.clone() * &inv * &inv;
            j += Z::one();
        }
        psi0 = SymbolicConstant {
            rational: h1,
            gamma: -Q::one(),
            ..Default::default()
        };
        psi1 = SymbolicConstant {
            rational: -h2,
            zeta2: Q::one(),
            ..Default::default()
        };
        psi2 = SymbolicConstant {
            rational: Q::from(two.clone()) * h3,
            zeta3: -Q::from(two.clone()),
            ..Default::default()
        };
    } else if (&arg * Q::from(two.clone())).is_integer() {
        // arg = m + 1/2 with integer m ≥ 0.
        let m = (&arg - Q::new(Z::one(), two.clone())).to_integer();
        if m.is_negative() {
            return Err(Error::InvalidInput(format!(
                "gamma expansion at argument {} below 1/2",
                format_q(&arg)
            )));
        }
        // Odd harmonic sums Σ_{j=1}^{m} 1/(2j−1)^k.
        let mut o1 = Q::zero();
        let mut o2 = Q::zero();
        let mut o3 = Q::zero();
        let mut j = Z::one();
        while j <= m {
            let odd = Z::from(2) * &j - Z::one();
            let inv = Q::new(Z::one(), odd);
            o1 += &inv;
            o2 += inv.clone() * &inv;
            o3 += inv.clone() * &inv * &inv;
            j += Z::one();
        }
        psi0 = SymbolicConstant {
            rational: Q::from(two.clone()) * o1,
            gamma: -Q::one(),
            ln2: -Q::from(two.clone()),
            ..Default::default()
        };
        psi1 = SymbolicConstant {
            rational: -Q::from(Z::from(4)) * o2,
            zeta2: Q::from(Z::from(3)),
            ..Default::default()
        };
        psi2 = SymbolicConstant {
            rational: Q::from(Z::from(16)) * o3,
            zeta3: -Q::from(Z::from(14)),
            ..Default::default()
        };
    } else {
        return Err(Error::InvalidInput(format!(
            "gamma expansion supports integer and half-integer shifts, got {}",
            format_q(z)
        )));
    }
    let mut coeffs = vec![SymbolicConstant::default(); depth + 1];
    if depth >= 1 {
        coeffs[1] = psi0;
    }
    if depth >= 2 {
        coeffs[2] = SymbolicConstant {
            rational: psi1.rational / Q::from(two.clone()),
            gamma: psi1.gamma / Q::from(two.clone()),
            ln2: psi1.ln2 / Q::from(two.clone()),
            zeta2: psi1.zeta2 / Q::from(two.clone()),
            zeta3: psi1.zeta3 / Q::from(two.clone()),
        };
    }
    if depth >= 3 {
        let six = Q::from(Z::from(6));
        coeffs[3] = SymbolicConstant {
            rational: psi2.rational / &six,
            gamma: psi2.gamma / &six,
            ln2: psi2.ln2 / &six,
            zeta2: psi2.zeta2 / &six,
            zeta3: psi2.zeta3 / &six,
        };
    }
    Ok(coeffs)
}

/// Taylor coefficients of the ratio `Γ(1+z1+ε)/Γ(1+z2+ε) · Γ(1+z2)/Γ(1+z1)`
/// in `ε`.  The two shifts must have equal fractional part so that every
/// transcendental constant cancels; the cancellation is asserted.
pub fn gamma_ratio_series(z1: &Q, z2: &Q, depth: usize) -> Result<Vec<Q>> {
    let e1 = gamma_log_expansion(z1, depth)?;
    let e2 = gamma_log_expansion(z2, depth)?;
    let mut log_coeffs = Vec::with_capacity(depth + 1);
    for (a, b) in e1.iter().zip(&e2) {
        let d = a.sub(b);
        let rational = d.as_rational().ok_or_else(|| {
            Error::InvalidInput(format!(
                "transcendental constants failed to cancel in Γ-ratio expansion: γ:{} ln2:{} ζ2:{} ζ3:{}",
                format_q(&d.gamma),
                format_q(&d.ln2),
                format_q(&d.zeta2),
                format_q(&d.zeta3)
            ))
        })?;
        log_coeffs.push(rational);
    }
    // Exponentiate the log series (constant term is zero).
    let mut out = vec![Q::zero(); depth + 1];
    out[0] = Q::one();
    let mut term = vec![Q::zero(); depth + 1];
    term[0] = Q::one();
    let mut factorial = Q::one();
    for m in 1..=depth {
        // term ← term · log_coeffs (truncated convolution).
        let mut next = vec![Q::zero(); depth + 1];
        for i in 0..=depth {
            if term[i].is_zero() {
                continue;
            }
            for (j, lc) in log_coeffs.iter().enumerate().take(depth + 1 - i).skip(1) {
                if !lc.is_zero() {
                    let add = term[i].clone() * lc;
                    next[i + j] += add;
                }
            }
        }
        term = next;
        factorial *= Q::from(Z::from(m as u64));
        for i in 0..=depth {
            if !term[i].is_zero() {
                out[i] += term[i].clone() / &factorial;
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Annihilation checks
// ---------------------------------------------------------------------------

/// Outcome of applying one operator to a series.
#[derive(Clone, Debug)]
pub struct OperatorResidual {
    /// Operator name.
    pub name: String,
    /// Whether the residual vanishes identically within the truncation.
    pub ok: bool,
    /// A nonzero residual exponent of maximal total degree, if any.
    pub witness: Option<Vec<u32>>,
    /// Number of nonzero residual terms.
    pub nonzero_terms: usize,
}

/// Report for a family of operators.
#[derive(Clone, Debug)]
pub struct AnnihilationReport {
    /// One entry per operator, in input order.
    pub entries: Vec<OperatorResidual>,
}

impl AnnihilationReport {
    /// Whether every operator annihilated the series.
    pub fn all_zero(&self) -> bool {
        self.entries.iter().all(|e| e.ok)
    }
}

fn residual_entry(name: &str, residual: &LogSeries) -> OperatorResidual {
    let witness = residual
        .terms
        .keys()
        .max_by_key(|exp| exp.iter().sum::<u32>())
        .cloned();
    OperatorResidual {
        name: name.to_string(),
        ok: residual.is_zero(),
        witness,
        nonzero_terms: residual.terms.len(),
    }
}

/// Apply each operator to a scalar series; residuals must vanish identically
/// within the truncation region (which is exact for non-negative shifts).
pub fn annihilation_check(ops: &[PushedOperator], w: &LogSeries) -> AnnihilationReport {
    let entries = ops
        .iter()
        .map(|op| residual_entry(&op.name, &op.apply(w)))
        .collect();
    AnnihilationReport { entries }
}

/// Apply each operator to a cohomology-valued series; every component of the
/// residual must vanish.
pub fn annihilation_check_ring(ops: &[PushedOperator], w: &RingSeries) -> AnnihilationReport {
    let entries = ops
        .iter()
        .map(|op| {
            let residual = op.apply_ring(w);
            let mut merged = residual_entry(&op.name, &residual.comps[0]);
            for comp in &residual.comps[1..] {
                let e = residual_entry(&op.name, comp);
                merged.ok &= e.ok;
                merged.nonzero_terms += e.nonzero_terms;
                if merged.witness.is_none() {
                    merged.witness = e.witness;
                }
            }
            merged
        })
        .collect();
    AnnihilationReport { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{build_explicit_config, build_hypersurface_config};
    use crate::num::{q, qr, z};
    use crate::polytope::LatticePolytope;
    use crate::triangulation::{chart_basis, enumerate_regular_triangulations, is_maximal};

    /// The reflexive simplex for degree-5 hypersurfaces in P⁴.
    fn quintic_system() -> (GkzSystem, ChartBasis) {
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
        let triangulations = enumerate_regular_triangulations(&config).unwrap();
        let base = triangulations
            .iter()
            .position(|t| is_maximal(&config, t))
            .expect("a maximal triangulation exists");
        let chart = chart_basis(&config, &triangulations, base).unwrap();
        let sys = GkzSystem::standard(config).unwrap();
        (sys, chart)
    }

    fn weierstrass_system() -> (GkzSystem, ChartBasis) {
        let config = build_explicit_config(
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
        let sys = GkzSystem::standard(config).unwrap();
        let chart = ChartBasis {
            vectors: vec![vec![z(-6), z(2), z(3), z(1)]],
            signs: vec![1],
            monomials: vec!["x".into()],
        };
        (sys, chart)
    }

    fn legendre_system() -> (GkzSystem, ChartBasis) {
        let config = build_explicit_config(
            2,
            vec![
                vec![z(1), z(0), z(0)],
                vec![z(0), z(1), z(0)],
                vec![z(1), z(0), z(-1)],
                vec![z(0), z(1), z(1)],
            ],
            None,
        )
        .unwrap();
        let beta = vec![qr(-1, 2), qr(-1, 2), q(0)];
        let sys = GkzSystem::with_beta(config, beta).unwrap();
        let chart = ChartBasis {
            vectors: vec![vec![z(-1), z(-1), z(1), z(1)]],
            signs: vec![1],
            monomials: vec!["lambda".into()],
        };
        (sys, chart)
    }

    #[test]
    fn quintic_exponent_shift_is_origin_column() {
        let (sys, _) = quintic_system();
        let c = exponent_shift(&sys).unwrap();
        assert_eq!(c[0], q(-1));
        assert!(c[1..].iter().all(|v| v.is_zero()));
    }

    #[test]
    fn legendre_exponent_shift_is_half_integer_prefix() {
        let (sys, _) = legendre_system();
        let c = exponent_shift(&sys).unwrap();
        assert_eq!(c, vec![qr(-1, 2), qr(-1, 2), q(0), q(0)]);
    }

    #[test]
    fn quintic_series_coefficients() {
        let (sys, chart) = quintic_system();
        let w = frobenius_w0(&sys, &chart, Truncation::total(4)).unwrap();
        assert_eq!(w.rational_coeff(&[0]), Some(q(1)));
        assert_eq!(w.rational_coeff(&[1]), Some(q(120)));
        assert_eq!(w.rational_coeff(&[2]), Some(q(113400)));
        assert_eq!(w.rational_coeff(&[3]), Some(q(168168000)));
        assert_eq!(w.rational_coeff(&[4]), Some(q(305540235000)));
    }

    #[test]
    fn weierstrass_series_coefficients() {
        let (sys, chart) = weierstrass_system();
        let w = frobenius_w0(&sys, &chart, Truncation::total(3)).unwrap();
        assert_eq!(w.rational_coeff(&[1]), Some(q(60)));
        assert_eq!(w.rational_coeff(&[2]), Some(q(13860)));
        assert_eq!(w.rational_coeff(&[3]), Some(q(4084080)));
    }

    #[test]
    fn legendre_series_coefficients() {
        let (sys, chart) = legendre_system();
        let w = frobenius_w0(&sys, &chart, Truncation::total(2)).unwrap();
        assert_eq!(w.rational_coeff(&[1]), Some(qr(1, 4)));
        assert_eq!(w.rational_coeff(&[2]), Some(qr(9, 64)));
    }

    #[test]
    fn quintic_box_operator_is_classical() {
        let (sys, chart) = quintic_system();
        let ops = gkz_operators(&sys, &chart).unwrap();
        assert!(ops.euler_ok());
        let op = &ops.boxes[0];
        // θ⁵ on the plus side.
        assert_eq!(op.plus.len(), 5);
        for f in &op.plus {
            assert!(f.constant.is_zero());
            assert_eq!(f.theta, vec![q(1)]);
        }
        // −x(5θ+1)…(5θ+5): five factors (−1−5θ−t), overall σ = −1.
        assert_eq!(op.minus.len(), 5);
        assert_eq!(op.sigma, q(-1));
        let constants: Vec<Q> = op.minus.iter().map(|f| f.constant.clone()).collect();
        assert_eq!(constants, vec![q(-1), q(-2), q(-3), q(-4), q(-5)]);
        for f in &op.minus {
            assert_eq!(f.theta, vec![q(-5)]);
        }
    }

    #[test]
    fn legendre_box_operator_is_classical() {
        let (sys, chart) = legendre_system();
        let op = box_operator(&sys, &chart, &[1], "box").unwrap();
        // θ² − λ(θ+1/2)².
        assert_eq!(op.plus.len(), 2);
        for f in &op.plus {
            assert!(f.constant.is_zero());
            assert_eq!(f.theta, vec![q(1)]);
        }
        assert_eq!(op.minus.len(), 2);
        assert_eq!(op.sigma, q(1));
        for f in &op.minus {
            assert_eq!(f.constant, qr(-1, 2));
            assert_eq!(f.theta, vec![q(-1)]);
        }
    }

    #[test]
    fn box_operators_annihilate_scalar_series() {
        for (sys, chart, order) in [
            {
                let (s, c) = quintic_system();
                (s, c, 5)
            },
            {
                let (s, c) = weierstrass_system();
                (s, c, 5)
            },
            {
                let (s, c) = legendre_system();
                (s, c, 8)
            },
        ] {
            let ops = gkz_operators(&sys, &chart).unwrap();
            assert!(ops.euler_ok());
            let w = frobenius_w0(&sys, &chart, Truncation::total(order)).unwrap();
            let report = annihilation_check(&ops.boxes, &w);
            assert!(report.all_zero(), "residual: {:?}", report.entries);
        }
    }

    /// Threefold algebra of the quintic: (1, J, b, v) with J² = 5b, J·b = v.
    fn quintic_ring() -> RingData {
        let dim = 4;
        let mut table = vec![vec![vec![Q::zero(); dim]; dim]; dim];
        for j in 0..dim {
            table[0][j][j] = Q::one();
            table[j][0][j] = Q::one();
        }
        table[1][1][2] = q(5);
        table[1][2][3] = Q::one();
        table[2][1][3] = Q::one();
        let algebra = NilpotentAlgebra::new(
            vec!["1".into(), "J".into(), "b".into(), "v".into()],
            vec![0, 1, 2, 3],
            table,
            vec![1],
        )
        .unwrap();
        RingData {
            algebra: Arc::new(algebra),
            c2: vec![q(0), q(0), q(50), q(0)],
            c3: vec![q(0), q(0), q(0), q(-200)],
        }
    }

    #[test]
    fn cohomology_family_degree_zero_and_kappa() {
        let (sys, chart) = quintic_system();
        let ring = quintic_ring();
        let trunc = Truncation::total(3);
        let fam = frobenius_cohomology(&sys, &chart, &ring, trunc.clone()).unwrap();
        let w0_scalar = frobenius_w0(&sys, &chart, trunc).unwrap();
        assert_eq!(fam.ws.comps[0], w0_scalar);
        // κ = 1 − (50/24) b − 200 Z₃ v.
        assert_eq!(fam.kappa[0], Scalar::one());
        assert!(fam.kappa[1].is_zero());
        assert_eq!(fam.kappa[2], Scalar::from_q(qr(-50, 24)));
        assert_eq!(fam.kappa[3], Scalar::z3().scale(&q(-200)));
        // Γ-normalizer relation in degree 2: w0 b-component = ws b-component
        // − (25/12) · ws unit component.
        let lhs = &fam.w0.comps[2];
        let rhs = fam.ws.comps[2].add(&fam.ws.comps[0].scale_q(&qr(-25, 12)));
        assert_eq!(*lhs, rhs);
    }

    #[test]
    fn box_operator_annihilates_cohomology_family() {
        let (sys, chart) = quintic_system();
        let ring = quintic_ring();
        let fam = frobenius_cohomology(&sys, &chart, &ring, Truncation::total(4)).unwrap();
        let ops = gkz_operators(&sys, &chart).unwrap();
        for series in [&fam.ws, &fam.w0] {
            let report = annihilation_check_ring(&ops.boxes, series);
            assert!(report.all_zero(), "residual: {:?}", report.entries);
        }
    }

    #[test]
    fn legendre_cohomology_family_on_curve_algebra() {
        let (sys, chart) = legendre_system();
        // Curve algebra: basis (1, J) with J² = 0.
        let mut table = vec![vec![vec![Q::zero(); 2]; 2]; 2];
        table[0][0][0] = Q::one();
        table[0][1][1] = Q::one();
        table[1][0][1] = Q::one();
        let algebra = NilpotentAlgebra::new(
            vec!["1".into(), "J".into()],
            vec![0, 1],
            table,
            vec![1],
        )
        .unwrap();
        let ring = RingData::bare(Arc::new(algebra));
        let fam = frobenius_cohomology(&sys, &chart, &ring, Truncation::total(8)).unwrap();
        // κ = 1 on a curve.
        assert_eq!(fam.kappa, ring.algebra.unit_elt());
        let op = box_operator(&sys, &chart, &[1], "box").unwrap();
        let report = annihilation_check_ring(&[op], &fam.w0);
        assert!(report.all_zero(), "residual: {:?}", report.entries);
    }

    #[test]
    fn gamma_ratio_matches_direct_atom_expansion() {
        // Γ(1+ε)/Γ(4+ε) = 1/((1+ε)(2+ε)(3+ε)); compare Taylor coefficients.
        let ratio = gamma_ratio_series(&q(0), &q(3), 3).unwrap();
        let atoms = {
            // Direct expansion of the product of 1/(a+ε).
            let mut coeffs = vec![Q::one(), Q::zero(), Q::zero(), Q::zero()];
            for a in [q(1), q(2), q(3)] {
                // 1/(a+ε) = 1/a − ε/a² + ε²/a³ − ε³/a⁴.
                let inv = vec![
                    a.recip(),
                    -a.recip() * a.recip(),
                    a.recip() * a.recip() * a.recip(),
                    -a.recip() * a.recip() * a.recip() * a.recip(),
                ];
                let mut next = vec![Q::zero(); 4];
                for i in 0..4 {
                    for j in 0..4 - i {
                        let prod = coeffs[i].clone() * &inv[j];
                        next[i + j] += prod;
                    }
                }
                coeffs = next;
            }
            // Normalize to constant term 1 (the ratio series divides out the
            // ε = 0 value Γ(1)/Γ(4) = 1/6).
            let lead = coeffs[0].recip();
            coeffs.iter().map(|c| c * &lead).collect::<Vec<Q>>()
        };
        assert_eq!(ratio, atoms);
    }

    #[test]
    fn gamma_ratio_half_integer_cancellation() {
        // Γ(1/2+ε)·Γ(5/2)/(Γ(5/2+ε)Γ(1/2)) = 1/((1/2+ε)(3/2+ε)):
        // γ and log 2 cancel between the two half-integer shifts.
        let ratio = gamma_ratio_series(&qr(-1, 2), &qr(3, 2), 2).unwrap();
        let a = qr(1, 2);
        let b = qr(3, 2);
        assert_eq!(ratio[0], Q::one());
        assert_eq!(ratio[1], -(a.recip() + b.recip()));
        let e2 = a.recip() * a.recip() + b.recip() * b.recip() + a.recip() * b.recip();
        assert_eq!(ratio[2], e2);
    }

    #[test]
    fn gamma_expansion_guards() {
        assert!(matches!(
            gamma_log_expansion(&q(1), 4),
            Err(Error::DepthExceeded { .. })
        ));
        assert!(gamma_log_expansion(&q(-2), 2).is_err());
        assert!(gamma_log_expansion(&qr(1, 3), 2).is_err());
        // Mismatched fractional parts leave log 2 uncancelled.
        assert!(gamma_ratio_series(&q(0), &qr(1, 2), 1).is_err());
    }

    #[test]
    fn support_instability_is_detected() {
        // A system whose shift makes a denominator vanish: ε = (−1, 0) with a
        // positive multiplier on the origin column.
        let config = build_explicit_config(
            1,
            vec![vec![z(1), z(0)], vec![z(1), z(1)], vec![z(1), z(-1)]],
            None,
        )
        .unwrap();
        let sys = GkzSystem::standard(config).unwrap();
        let chart = ChartBasis {
            // Deliberately flipped sign: positive entry on the origin column.
            vectors: vec![vec![z(2), z(-1), z(-1)]],
            signs: vec![1],
            monomials: vec!["x".into()],
        };
        let err = frobenius_w0(&sys, &chart, Truncation::total(2));
        assert!(matches!(err, Err(Error::SupportUnstable { .. })));
    }

    #[test]
    fn pairing_mismatch_is_detected() {
        let (sys, chart) = quintic_system();
        // Algebra with two generators for a one-parameter chart.
        let mut table = vec![vec![vec![Q::zero(); 3]; 3]; 3];
        for j in 0..3 {
            table[0][j][j] = Q::one();
            table[j][0][j] = Q::one();
        }
        let algebra = NilpotentAlgebra::new(
            vec!["1".into(), "J1".into(), "J2".into()],
            vec![0, 1, 1],
            table,
            vec![1, 2],
        )
        .unwrap();
        let ring = RingData::bare(Arc::new(algebra));
        let err = frobenius_cohomology(&sys, &chart, &ring, Truncation::total(2));
        assert!(matches!(err, Err(Error::PairingMismatch { .. })));
    }

    #[test]
    fn nonmaximal_chart_is_rejected() {
        let (sys, _) = quintic_system();
        let chart = ChartBasis {
            vectors: vec![vec![z(0); 6]],
            signs: vec![1],
            monomials: vec!["x".into()],
        };
        // The zero vector is in the kernel but the chart must still have the
        // right rank; a wrong-length chart is rejected outright.
        let short = ChartBasis {
            vectors: vec![],
            signs: vec![],
            monomials: vec![],
        };
        assert!(matches!(
            frobenius_w0(&sys, &short, Truncation::total(1)),
            Err(Error::NonMaximalChart { .. })
        ));
        // A non-kernel vector is also rejected.
        let bogus = ChartBasis {
            vectors: vec![vec![z(1), z(0), z(0), z(0), z(0), z(0)]],
            signs: vec![1],
            monomials: vec!["x".into()],
        };
        assert!(matches!(
            frobenius_w0(&sys, &bogus, Truncation::total(1)),
            Err(Error::NonMaximalChart { .. })
        ));
        let _ = chart;
    }

    #[test]
    fn euler_data_reports_torus_weights() {
        let (sys, chart) = legendre_system();
        let ops = gkz_operators(&sys, &chart).unwrap();
        assert!(ops.euler_ok());
        assert_eq!(ops.shift_residual.len(), 3);
        assert_eq!(ops.kernel_residuals.len(), 1);
    }
}
