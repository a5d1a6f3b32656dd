//! Exact formal series with logarithms and nilpotent coefficients.
//!
//! This module provides the arithmetic backbone for period computations:
//!
//! * [`Scalar`] — the coefficient ring `ℚ[P, Z3]`, where `P` is the formal
//!   symbol `1/(2πi)` and `Z3` the formal symbol `ζ(3)/(2πi)³`.  All
//!   transcendental bookkeeping is exact; nothing is ever evaluated as a
//!   float.
//! * [`LogPoly`] — polynomials in the formal logarithms `L_k`, where
//!   `L_k := log(x_k)/(2πi)`, with [`Scalar`] coefficients.  Under the local
//!   monodromy `x_k → e^{2πi} x_k` the symbol shifts as `L_k → L_k + 1`.
//! * [`LogSeries`] — truncated multivariate power series in `x_1..x_s` whose
//!   coefficients are [`LogPoly`]s.  The Euler operator acts exactly:
//!   `θ_k (x^a L_k^m) = a_k x^a L_k^m + m P x^a L_k^{m-1}`.
//! * [`NilpotentAlgebra`] — a finite graded commutative algebra given by a
//!   multiplication table (an even-cohomology ring), with distinguished
//!   nilpotent generators.
//! * [`RingSeries`] — a [`LogSeries`] for each algebra basis element, i.e. a
//!   series with values in `NilpotentAlgebra ⊗ ℚ[P, Z3] ⊗ ℚ[L_1..L_s]`.
//!
//! All containers are `BTreeMap`-based so that iteration order, printing and
//! serialisation are deterministic.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{One, Zero};

use crate::error::Error;
use crate::num::{binomial, format_q, Q, Z};
use crate::Result;

// ---------------------------------------------------------------------------
// Scalar: the exact coefficient ring ℚ[P, Z3]
// ---------------------------------------------------------------------------

/// Element of `ℚ[P, Z3]`: a sparse polynomial keyed by `(P-power, Z3-power)`.
///
/// `P` stands for `1/(2πi)` and `Z3` for `ζ(3)/(2πi)³`.  The two symbols are
/// algebraically independent here; identities such as `ζ(2) P² = −1/24` are
/// applied at the point where `ζ(2)` would be produced, so `ζ(2)` never needs
/// a symbol of its own.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Scalar {
    /// Nonzero coefficients, keyed by `(power of P, power of Z3)`.
    pub coeffs: BTreeMap<(u32, u32), Q>,
}

impl Scalar {
    /// The zero element.
    pub fn zero() -> Self {
        Scalar::default()
    }

    /// The unit element `1`.
    pub fn one() -> Self {
        Scalar::from_q(Q::one())
    }

    /// Embed a rational number.
    pub fn from_q(value: Q) -> Self {
        let mut coeffs = BTreeMap::new();
        if !value.is_zero() {
            coeffs.insert((0, 0), value);
        }
        Scalar { coeffs }
    }

    /// The monomial `value · P^p · Z3^z`.
    pub fn monomial(p: u32, z: u32, value: Q) -> Self {
        let mut coeffs = BTreeMap::new();
        if !value.is_zero() {
            coeffs.insert((p, z), value);
        }
        Scalar { coeffs }
    }

    /// The symbol `P = 1/(2πi)`.
    pub fn p() -> Self {
        Scalar::monomial(1, 0, Q::one())
    }

    /// The symbol `Z3 = ζ(3)/(2πi)³`.
    pub fn z3() -> Self {
        Scalar::monomial(0, 1, Q::one())
    }

    /// Whether this is the zero element.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// If the element is a pure rational (no `P` or `Z3`), return it.
    pub fn as_rational(&self) -> Option<Q> {
        match self.coeffs.len() {
            0 => Some(Q::zero()),
            1 => {
                let ((p, z), v) = self.coeffs.iter().next().unwrap();
                if *p == 0 && *z == 0 {
                    Some(v.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Coefficient of `P^p Z3^z` (zero if absent).
    pub fn coeff(&self, p: u32, z: u32) -> Q {
        self.coeffs.get(&(p, z)).cloned().unwrap_or_else(Q::zero)
    }

    /// In-place addition.
    pub fn add_assign(&mut self, other: &Scalar) {
        for (key, v) in &other.coeffs {
            let entry = self.coeffs.entry(*key).or_insert_with(Q::zero);
            *entry += v;
            if entry.is_zero() {
                self.coeffs.remove(key);
            }
        }
    }

    /// Sum.
    pub fn add(&self, other: &Scalar) -> Scalar {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    /// Difference.
    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    /// Negation.
    pub fn neg(&self) -> Scalar {
        Scalar {
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, v)| (*k, -v.clone()))
                .collect(),
        }
    }

    /// Product.
    pub fn mul(&self, other: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for ((p1, z1), v1) in &self.coeffs {
            for ((p2, z2), v2) in &other.coeffs {
                let key = (p1 + p2, z1 + z2);
                let entry = out.coeffs.entry(key).or_insert_with(Q::zero);
                *entry += v1 * v2;
                if entry.is_zero() {
                    out.coeffs.remove(&key);
                }
            }
        }
        out
    }

    /// Multiply by a rational.
    pub fn scale(&self, factor: &Q) -> Scalar {
        if factor.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, v)| (*k, v * factor))
                .collect(),
        }
    }

    /// Multiplicative inverse, defined only for nonzero pure rationals (the
    /// units of `ℚ[P, Z3]`).
    pub fn invert(&self) -> Result<Scalar> {
        match self.as_rational() {
            Some(q) if !q.is_zero() => Ok(Scalar::from_q(q.recip())),
            _ => Err(Error::NotInvertible {
                reason: format!("scalar {self} is not a nonzero rational"),
            }),
        }
    }
}

impl std::fmt::Display for Scalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((p, z), v) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", format_q(v))?;
            if *p > 0 {
                write!(f, "*P^{p}")?;
            }
            if *z > 0 {
                write!(f, "*Z3^{z}")?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// LogPoly: polynomials in the formal logarithms L_1..L_s
// ---------------------------------------------------------------------------

/// Polynomial in `L_1..L_s` with [`Scalar`] coefficients, keyed by the
/// per-variable log exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LogPoly {
    /// Nonzero coefficients, keyed by the vector of `L_k` exponents.
    pub coeffs: BTreeMap<Vec<u32>, Scalar>,
}

impl LogPoly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        LogPoly::default()
    }

    /// A log-free constant.
    pub fn constant(nvars: usize, value: Scalar) -> Self {
        let mut out = LogPoly::zero();
        out.add_term(vec![0; nvars], value);
        out
    }

    /// Whether this is the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Accumulate `value · L^logs`.
    pub fn add_term(&mut self, logs: Vec<u32>, value: Scalar) {
        if value.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(logs.clone()).or_insert_with(Scalar::zero);
        entry.add_assign(&value);
        if entry.is_zero() {
            self.coeffs.remove(&logs);
        }
    }

    /// In-place addition.
    pub fn add_assign(&mut self, other: &LogPoly) {
        for (logs, v) in &other.coeffs {
            self.add_term(logs.clone(), v.clone());
        }
    }

    /// Negation.
    pub fn neg(&self) -> LogPoly {
        LogPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, v)| (k.clone(), v.neg()))
                .collect(),
        }
    }

    /// Product.
    pub fn mul(&self, other: &LogPoly) -> LogPoly {
        let mut out = LogPoly::zero();
        for (l1, v1) in &self.coeffs {
            for (l2, v2) in &other.coeffs {
                let logs: Vec<u32> = l1.iter().zip(l2).map(|(a, b)| a + b).collect();
                out.add_term(logs, v1.mul(v2));
            }
        }
        out
    }

    /// Multiply every coefficient by a scalar.
    pub fn scale(&self, factor: &Scalar) -> LogPoly {
        let mut out = LogPoly::zero();
        for (logs, v) in &self.coeffs {
            out.add_term(logs.clone(), v.mul(factor));
        }
        out
    }

    /// Formal derivative `∂/∂L_k`.
    pub fn d_log(&self, k: usize) -> LogPoly {
        let mut out = LogPoly::zero();
        for (logs, v) in &self.coeffs {
            let m = logs[k];
            if m == 0 {
                continue;
            }
            let mut lower = logs.clone();
            lower[k] = m - 1;
            out.add_term(lower, v.scale(&Q::from(Z::from(m))));
        }
        out
    }

    /// Substitute `L_k → L_k + 1` (local monodromy action on logarithms).
    pub fn shift_log(&self, k: usize) -> LogPoly {
        let mut out = LogPoly::zero();
        for (logs, v) in &self.coeffs {
            let m = logs[k];
            for j in 0..=m {
                let mut shifted = logs.clone();
                shifted[k] = j;
                let c = Q::from(binomial(m as u64, j as u64));
                out.add_term(shifted, v.scale(&c));
            }
        }
        out
    }

    /// Largest total log degree appearing.
    pub fn max_log_degree(&self) -> u32 {
        self.coeffs
            .keys()
            .map(|logs| logs.iter().sum())
            .max()
            .unwrap_or(0)
    }

    /// The coefficient of `L^logs` (zero if absent).
    pub fn coeff(&self, logs: &[u32]) -> Scalar {
        self.coeffs.get(logs).cloned().unwrap_or_else(Scalar::zero)
    }

    /// If the polynomial is a log-free constant, return it.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.coeffs.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (logs, v) = self.coeffs.iter().next().unwrap();
                if logs.iter().all(|&e| e == 0) {
                    Some(v.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Truncation policy
// ---------------------------------------------------------------------------

/// Truncation policy for power series: a total-degree bound and optional
/// per-variable caps.  An exponent vector is kept iff its total degree is
/// `≤ total` and, when caps are present, each component is within its cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    /// Total-degree bound.
    pub total: u32,
    /// Optional per-variable exponent caps.
    pub per_var: Option<Vec<u32>>,
}

impl Truncation {
    /// Total-degree truncation.
    pub fn total(order: u32) -> Self {
        Truncation {
            total: order,
            per_var: None,
        }
    }

    /// Box truncation: per-variable caps (total bound = sum of caps).
    pub fn boxed(caps: Vec<u32>) -> Self {
        Truncation {
            total: caps.iter().sum(),
            per_var: Some(caps),
        }
    }

    /// Whether `exp` is inside the truncation region.
    pub fn admits(&self, exp: &[u32]) -> bool {
        if exp.iter().sum::<u32>() > self.total {
            return false;
        }
        if let Some(caps) = &self.per_var {
            exp.iter().zip(caps).all(|(e, c)| e <= c)
        } else {
            true
        }
    }

    /// Intersection of two truncation regions.
    pub fn meet(&self, other: &Truncation) -> Truncation {
        let per_var = match (&self.per_var, &other.per_var) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| *x.min(y)).collect()),
        };
        Truncation {
            total: self.total.min(other.total),
            per_var,
        }
    }
}

// ---------------------------------------------------------------------------
// LogSeries
// ---------------------------------------------------------------------------

/// Truncated power series in `x_1..x_s` whose coefficients are polynomials in
/// the formal logarithms `L_k = log(x_k)/(2πi)` over `ℚ[P, Z3]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogSeries {
    /// Number of variables.
    pub nvars: usize,
    /// Truncation region; terms outside it are identically dropped.
    pub trunc: Truncation,
    /// Nonzero terms keyed by the monomial exponent vector.
    pub terms: BTreeMap<Vec<u32>, LogPoly>,
}

impl LogSeries {
    /// The zero series.
    pub fn zero(nvars: usize, trunc: Truncation) -> Self {
        LogSeries {
            nvars,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    /// A constant (scalar) series.
    pub fn constant(nvars: usize, trunc: Truncation, value: Scalar) -> Self {
        let mut out = LogSeries::zero(nvars, trunc);
        out.insert(vec![0; nvars], vec![0; nvars], value);
        out
    }

    /// The unit series `1`.
    pub fn one(nvars: usize, trunc: Truncation) -> Self {
        LogSeries::constant(nvars, trunc, Scalar::one())
    }

    /// Whether the series is identically zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Accumulate `value · x^exp · L^logs` (dropped if outside truncation).
    pub fn insert(&mut self, exp: Vec<u32>, logs: Vec<u32>, value: Scalar) {
        debug_assert_eq!(exp.len(), self.nvars);
        debug_assert_eq!(logs.len(), self.nvars);
        if value.is_zero() || !self.trunc.admits(&exp) {
            return;
        }
        let entry = self.terms.entry(exp.clone()).or_default();
        entry.add_term(logs, value);
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    /// Accumulate a whole [`LogPoly`] at `x^exp`.
    pub fn insert_poly(&mut self, exp: Vec<u32>, poly: LogPoly) {
        debug_assert_eq!(exp.len(), self.nvars);
        if poly.is_zero() || !self.trunc.admits(&exp) {
            return;
        }
        let entry = self.terms.entry(exp.clone()).or_default();
        entry.add_assign(&poly);
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    /// The coefficient of `x^exp` (zero polynomial if absent).
    pub fn coeff(&self, exp: &[u32]) -> LogPoly {
        self.terms.get(exp).cloned().unwrap_or_default()
    }

    /// The log-free rational coefficient of `x^exp`, if the coefficient is of
    /// that shape (absent terms count as zero).
    pub fn rational_coeff(&self, exp: &[u32]) -> Option<Q> {
        self.coeff(exp).as_constant().and_then(|s| s.as_rational())
    }

    /// In-place addition (truncations must agree).
    pub fn add_assign(&mut self, other: &LogSeries) {
        debug_assert_eq!(self.nvars, other.nvars);
        for (exp, poly) in &other.terms {
            self.insert_poly(exp.clone(), poly.clone());
        }
    }

    /// Sum; the result carries the intersection of the truncation regions.
    pub fn add(&self, other: &LogSeries) -> LogSeries {
        let mut out = LogSeries::zero(self.nvars, self.trunc.meet(&other.trunc));
        for (exp, poly) in &self.terms {
            out.insert_poly(exp.clone(), poly.clone());
        }
        for (exp, poly) in &other.terms {
            out.insert_poly(exp.clone(), poly.clone());
        }
        out
    }

    /// Difference.
    pub fn sub(&self, other: &LogSeries) -> LogSeries {
        self.add(&other.neg())
    }

    /// Negation.
    pub fn neg(&self) -> LogSeries {
        LogSeries {
            nvars: self.nvars,
            trunc: self.trunc.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v.neg()))
                .collect(),
        }
    }

    /// Multiply every term by a scalar.
    pub fn scale(&self, factor: &Scalar) -> LogSeries {
        let mut out = LogSeries::zero(self.nvars, self.trunc.clone());
        for (exp, poly) in &self.terms {
            out.insert_poly(exp.clone(), poly.scale(factor));
        }
        out
    }

    /// Multiply every term by a rational.
    pub fn scale_q(&self, factor: &Q) -> LogSeries {
        self.scale(&Scalar::from_q(factor.clone()))
    }

    /// Product; the result carries the intersection of the truncations.
    pub fn mul(&self, other: &LogSeries) -> LogSeries {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = LogSeries::zero(self.nvars, self.trunc.meet(&other.trunc));
        for (e1, p1) in &self.terms {
            for (e2, p2) in &other.terms {
                let exp: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                if !out.trunc.admits(&exp) {
                    continue;
                }
                out.insert_poly(exp, p1.mul(p2));
            }
        }
        out
    }

    /// The Euler operator `θ_k = x_k ∂/∂x_k`, acting exactly:
    /// `θ_k (x^a L_k^m) = a_k x^a L_k^m + m P x^a L_k^{m-1}`.
    pub fn theta(&self, k: usize) -> LogSeries {
        assert!(k < self.nvars, "variable index out of range");
        let p = Scalar::p();
        let mut out = LogSeries::zero(self.nvars, self.trunc.clone());
        for (exp, poly) in &self.terms {
            let a = Q::from(Z::from(exp[k]));
            out.insert_poly(exp.clone(), poly.scale(&Scalar::from_q(a)));
            out.insert_poly(exp.clone(), poly.d_log(k).scale(&p));
        }
        out
    }

    /// Multiply by the monomial `x^shift` (truncation-respecting).
    pub fn mul_monomial(&self, shift: &[u32]) -> LogSeries {
        debug_assert_eq!(shift.len(), self.nvars);
        let mut out = LogSeries::zero(self.nvars, self.trunc.clone());
        for (exp, poly) in &self.terms {
            let moved: Vec<u32> = exp.iter().zip(shift).map(|(a, b)| a + b).collect();
            out.insert_poly(moved, poly.clone());
        }
        out
    }

    /// The local monodromy substitution `L_k → L_k + 1`.
    pub fn shift_l(&self, k: usize) -> LogSeries {
        let mut out = LogSeries::zero(self.nvars, self.trunc.clone());
        for (exp, poly) in &self.terms {
            out.insert_poly(exp.clone(), poly.shift_log(k));
        }
        out
    }

    /// Restrict to a smaller truncation region.
    pub fn truncate(&self, trunc: Truncation) -> LogSeries {
        let mut out = LogSeries::zero(self.nvars, trunc);
        for (exp, poly) in &self.terms {
            out.insert_poly(exp.clone(), poly.clone());
        }
        out
    }

    /// Multiplicative inverse.  Requires the constant term to be a log-free
    /// nonzero rational.
    pub fn invert(&self) -> Result<LogSeries> {
        let zero_exp = vec![0u32; self.nvars];
        let lead = self
            .coeff(&zero_exp)
            .as_constant()
            .and_then(|s| s.as_rational())
            .ok_or_else(|| Error::NotInvertible {
                reason: "constant term is not a log-free rational".to_string(),
            })?;
        if lead.is_zero() {
            return Err(Error::NotInvertible {
                reason: "constant term vanishes".to_string(),
            });
        }
        // self = lead (1 - u) with u having no constant term; invert by the
        // geometric series, which terminates at the truncation order.
        let normalized = self.scale_q(&lead.recip());
        let mut u = LogSeries::one(self.nvars, self.trunc.clone()).sub(&normalized);
        u.terms.remove(&zero_exp);
        let mut out = LogSeries::one(self.nvars, self.trunc.clone());
        let mut power = LogSeries::one(self.nvars, self.trunc.clone());
        for _ in 0..self.trunc.total {
            power = power.mul(&u);
            if power.is_zero() {
                break;
            }
            out.add_assign(&power);
        }
        Ok(out.scale_q(&lead.recip()))
    }

    /// Exponential of a series with no constant term and no `x^0` log terms.
    pub fn exp(&self) -> Result<LogSeries> {
        let zero_exp = vec![0u32; self.nvars];
        if self.terms.contains_key(&zero_exp) {
            return Err(Error::InvalidInput(
                "exp requires a series with vanishing constant term".to_string(),
            ));
        }
        let mut out = LogSeries::one(self.nvars, self.trunc.clone());
        let mut power = LogSeries::one(self.nvars, self.trunc.clone());
        let mut factorial = Q::one();
        for m in 1..=(self.trunc.total as u64 + 1) {
            power = power.mul(self);
            if power.is_zero() {
                return Ok(out);
            }
            factorial *= Q::from(Z::from(m));
            out.add_assign(&power.scale_q(&factorial.recip()));
        }
        if power.mul(self).is_zero() {
            Ok(out)
        } else {
            Err(Error::DepthExceeded {
                depth: self.trunc.total as usize + 1,
                max: self.trunc.total as usize,
            })
        }
    }

    /// Substitute `x_k = subs[k]`.  The outer series must be log-free, and
    /// each substituted series must be log-free with no constant term.
    pub fn compose(&self, subs: &[LogSeries]) -> Result<LogSeries> {
        if subs.len() != self.nvars {
            return Err(Error::InvalidInput(format!(
                "compose expects {} substitution series, got {}",
                self.nvars,
                subs.len()
            )));
        }
        let mut trunc = self.trunc.clone();
        for sub in subs {
            let zero_exp = vec![0u32; sub.nvars];
            if sub.terms.contains_key(&zero_exp) {
                return Err(Error::InvalidInput(
                    "compose requires substitutions with zero constant term".to_string(),
                ));
            }
            if sub.terms.values().any(|p| p.max_log_degree() > 0) {
                return Err(Error::InvalidInput(
                    "compose requires log-free substitutions".to_string(),
                ));
            }
            trunc = trunc.meet(&sub.trunc);
        }
        let inner_vars = subs.first().map(|s| s.nvars).unwrap_or(self.nvars);
        let mut out = LogSeries::zero(inner_vars, trunc.clone());
        // Memoized powers subs[k]^e for each variable.
        let mut powers: Vec<Vec<LogSeries>> = subs
            .iter()
            .map(|s| vec![LogSeries::one(inner_vars, trunc.clone()), s.truncate(trunc.clone())])
            .collect();
        for (exp, poly) in &self.terms {
            let constant = poly.as_constant().ok_or_else(|| {
                Error::InvalidInput("compose requires a log-free outer series".to_string())
            })?;
            let mut term = LogSeries::one(inner_vars, trunc.clone());
            for (k, &e) in exp.iter().enumerate() {
                while powers[k].len() <= e as usize {
                    let next = powers[k].last().unwrap().mul(&powers[k][1]);
                    powers[k].push(next);
                }
                term = term.mul(&powers[k][e as usize]);
            }
            out.add_assign(&term.scale(&constant));
        }
        Ok(out)
    }

    /// Whether any term carries a logarithm.
    pub fn has_logs(&self) -> bool {
        self.terms.values().any(|p| p.max_log_degree() > 0)
    }
}

// ---------------------------------------------------------------------------
// NilpotentAlgebra
// ---------------------------------------------------------------------------

/// A finite-dimensional graded commutative algebra with unit, described by a
/// multiplication table on a homogeneous basis `e_0 = 1, e_1, …`.  The
/// distinguished generators (degree-1 classes `J_1..J_s`) are nilpotent
/// because the grading is bounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotentAlgebra {
    /// Basis element names, for display.
    pub names: Vec<String>,
    /// Grading: half the cohomological degree (0 for the unit, 1 for divisor
    /// classes, up to the top degree).
    pub degrees: Vec<u32>,
    /// `e_i · e_j = Σ_c table[i][j][c] e_c`.
    pub table: Vec<Vec<Vec<Q>>>,
    /// Indices of the distinguished degree-1 generators `J_1..J_s`.
    pub generators: Vec<usize>,
}

/// An algebra element in basis coordinates with [`Scalar`] entries.
pub type RingElt = Vec<Scalar>;

impl NilpotentAlgebra {
    /// Validate and build: checks unit row, grading compatibility,
    /// commutativity and associativity of the table, and that generators have
    /// degree 1.
    pub fn new(
        names: Vec<String>,
        degrees: Vec<u32>,
        table: Vec<Vec<Vec<Q>>>,
        generators: Vec<usize>,
    ) -> Result<Self> {
        let dim = names.len();
        if degrees.len() != dim || table.len() != dim {
            return Err(Error::RingMismatch {
                reason: "inconsistent basis sizes".to_string(),
            });
        }
        for row in &table {
            if row.len() != dim || row.iter().any(|entry| entry.len() != dim) {
                return Err(Error::RingMismatch {
                    reason: "multiplication table is not dim × dim × dim".to_string(),
                });
            }
        }
        if dim == 0 || degrees[0] != 0 {
            return Err(Error::RingMismatch {
                reason: "basis must start with the unit in degree 0".to_string(),
            });
        }
        let algebra = NilpotentAlgebra {
            names,
            degrees,
            table,
            generators,
        };
        // Unit row: e_0 · e_j = e_j.
        for j in 0..dim {
            let mut expected = vec![Q::zero(); dim];
            expected[j] = Q::one();
            if algebra.table[0][j] != expected {
                return Err(Error::RingMismatch {
                    reason: format!("e_0 is not a unit on basis element {j}"),
                });
            }
        }
        // Grading: e_i e_j lives in degree deg(i)+deg(j).
        for i in 0..dim {
            for j in 0..dim {
                let d = algebra.degrees[i] + algebra.degrees[j];
                for (c, v) in algebra.table[i][j].iter().enumerate() {
                    if !v.is_zero() && algebra.degrees[c] != d {
                        return Err(Error::RingMismatch {
                            reason: format!(
                                "product e_{i} e_{j} has a component in degree {} (expected {d})",
                                algebra.degrees[c]
                            ),
                        });
                    }
                }
            }
        }
        // Commutativity.
        for i in 0..dim {
            for j in 0..dim {
                if algebra.table[i][j] != algebra.table[j][i] {
                    return Err(Error::RingMismatch {
                        reason: format!("table is not commutative at ({i}, {j})"),
                    });
                }
            }
        }
        // Associativity: (e_i e_j) e_k = e_i (e_j e_k).
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let mut lhs = vec![Q::zero(); dim];
                    for (c, v) in algebra.table[i][j].iter().enumerate() {
                        if v.is_zero() {
                            continue;
                        }
                        for (d, w) in algebra.table[c][k].iter().enumerate() {
                            lhs[d] += v * w;
                        }
                    }
                    let mut rhs = vec![Q::zero(); dim];
                    for (c, v) in algebra.table[j][k].iter().enumerate() {
                        if v.is_zero() {
                            continue;
                        }
                        for (d, w) in algebra.table[i][c].iter().enumerate() {
                            rhs[d] += v * w;
                        }
                    }
                    if lhs != rhs {
                        return Err(Error::RingMismatch {
                            reason: format!("table is not associative at ({i}, {j}, {k})"),
                        });
                    }
                }
            }
        }
        for &g in &algebra.generators {
            if g >= dim || algebra.degrees[g] != 1 {
                return Err(Error::RingMismatch {
                    reason: format!("generator index {g} is not a degree-1 basis element"),
                });
            }
        }
        Ok(algebra)
    }

    /// Number of basis elements.
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// Top grading degree.
    pub fn top_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// The zero element.
    pub fn zero_elt(&self) -> RingElt {
        vec![Scalar::zero(); self.dim()]
    }

    /// The unit element.
    pub fn unit_elt(&self) -> RingElt {
        let mut e = self.zero_elt();
        e[0] = Scalar::one();
        e
    }

    /// The basis element `e_i`.
    pub fn basis_elt(&self, i: usize) -> RingElt {
        let mut e = self.zero_elt();
        e[i] = Scalar::one();
        e
    }

    /// The `k`-th distinguished generator `J_{k+1}`.
    pub fn generator_elt(&self, k: usize) -> RingElt {
        self.basis_elt(self.generators[k])
    }

    /// Multiply two elements via the table.
    pub fn mul_elts(&self, a: &RingElt, b: &RingElt) -> RingElt {
        let dim = self.dim();
        let mut out = self.zero_elt();
        for i in 0..dim {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..dim {
                if b[j].is_zero() {
                    continue;
                }
                let prod = a[i].mul(&b[j]);
                for (c, v) in self.table[i][j].iter().enumerate() {
                    if !v.is_zero() {
                        out[c].add_assign(&prod.scale(v));
                    }
                }
            }
        }
        out
    }

    /// Sum of two elements.
    pub fn add_elts(&self, a: &RingElt, b: &RingElt) -> RingElt {
        a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
    }

    /// Exponential of an element with vanishing degree-0 component
    /// (terminates by nilpotency).
    pub fn exp_elt(&self, a: &RingElt) -> Result<RingElt> {
        if !a[0].is_zero() {
            return Err(Error::InvalidInput(
                "exp_elt requires a vanishing unit component".to_string(),
            ));
        }
        let mut out = self.unit_elt();
        let mut power = self.unit_elt();
        let mut factorial = Q::one();
        for m in 1..=(self.top_degree() as u64 + 1) {
            power = self.mul_elts(&power, a);
            if power.iter().all(|c| c.is_zero()) {
                return Ok(out);
            }
            factorial *= Q::from(Z::from(m));
            let inv = factorial.recip();
            for (o, p) in out.iter_mut().zip(&power) {
                o.add_assign(&p.scale(&inv));
            }
        }
        Err(Error::DepthExceeded {
            depth: self.top_degree() as usize + 1,
            max: self.top_degree() as usize,
        })
    }
}

// ---------------------------------------------------------------------------
// RingSeries
// ---------------------------------------------------------------------------

/// A series with values in `NilpotentAlgebra ⊗ ℚ[P, Z3] ⊗ ℚ[L]`: one
/// [`LogSeries`] component per algebra basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingSeries {
    /// The coefficient algebra (shared).
    pub algebra: Arc<NilpotentAlgebra>,
    /// One component per basis element, in basis order.
    pub comps: Vec<LogSeries>,
}

impl RingSeries {
    /// The zero series over `algebra`.
    pub fn zero(algebra: Arc<NilpotentAlgebra>, nvars: usize, trunc: Truncation) -> Self {
        let comps = (0..algebra.dim())
            .map(|_| LogSeries::zero(nvars, trunc.clone()))
            .collect();
        RingSeries { algebra, comps }
    }

    /// Constant series equal to an algebra element.
    pub fn from_elt(
        algebra: Arc<NilpotentAlgebra>,
        nvars: usize,
        trunc: Truncation,
        elt: &RingElt,
    ) -> Self {
        let mut out = RingSeries::zero(algebra, nvars, trunc);
        for (comp, value) in out.comps.iter_mut().zip(elt) {
            if !value.is_zero() {
                comp.insert(vec![0; nvars], vec![0; nvars], value.clone());
            }
        }
        out
    }

    /// Number of series variables.
    pub fn nvars(&self) -> usize {
        self.comps[0].nvars
    }

    /// Whether all components vanish.
    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    fn check_same_algebra(&self, other: &RingSeries) -> Result<()> {
        if !Arc::ptr_eq(&self.algebra, &other.algebra) && self.algebra != other.algebra {
            return Err(Error::RingMismatch {
                reason: "operands live over different algebras".to_string(),
            });
        }
        Ok(())
    }

    /// Sum.
    pub fn add(&self, other: &RingSeries) -> Result<RingSeries> {
        self.check_same_algebra(other)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.add(b))
            .collect();
        Ok(RingSeries {
            algebra: self.algebra.clone(),
            comps,
        })
    }

    /// Difference.
    pub fn sub(&self, other: &RingSeries) -> Result<RingSeries> {
        self.add(&other.neg())
    }

    /// Negation.
    pub fn neg(&self) -> RingSeries {
        RingSeries {
            algebra: self.algebra.clone(),
            comps: self.comps.iter().map(|c| c.neg()).collect(),
        }
    }

    /// Product, via the algebra multiplication table.
    pub fn mul(&self, other: &RingSeries) -> Result<RingSeries> {
        self.check_same_algebra(other)?;
        let dim = self.algebra.dim();
        let trunc = self.comps[0].trunc.meet(&other.comps[0].trunc);
        let mut out = RingSeries::zero(self.algebra.clone(), self.nvars(), trunc);
        for i in 0..dim {
            if self.comps[i].is_zero() {
                continue;
            }
            for j in 0..dim {
                if other.comps[j].is_zero() {
                    continue;
                }
                let prod = self.comps[i].mul(&other.comps[j]);
                for (c, v) in self.algebra.table[i][j].iter().enumerate() {
                    if !v.is_zero() {
                        out.comps[c].add_assign(&prod.scale_q(v));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Multiply by a constant algebra element.
    pub fn mul_elt(&self, elt: &RingElt) -> RingSeries {
        let dim = self.algebra.dim();
        let trunc = self.comps[0].trunc.clone();
        let mut out = RingSeries::zero(self.algebra.clone(), self.nvars(), trunc);
        for i in 0..dim {
            if self.comps[i].is_zero() {
                continue;
            }
            for (j, value) in elt.iter().enumerate() {
                if value.is_zero() {
                    continue;
                }
                let prod = self.comps[i].scale(value);
                for (c, v) in self.algebra.table[i][j].iter().enumerate() {
                    if !v.is_zero() {
                        out.comps[c].add_assign(&prod.scale_q(v));
                    }
                }
            }
        }
        out
    }

    /// Multiply every component by the same scalar-valued series.
    pub fn mul_scalar_series(&self, series: &LogSeries) -> RingSeries {
        RingSeries {
            algebra: self.algebra.clone(),
            comps: self.comps.iter().map(|c| c.mul(series)).collect(),
        }
    }

    /// Multiply every component by a scalar.
    pub fn scale(&self, factor: &Scalar) -> RingSeries {
        RingSeries {
            algebra: self.algebra.clone(),
            comps: self.comps.iter().map(|c| c.scale(factor)).collect(),
        }
    }

    /// The Euler operator `θ_k`, componentwise.
    pub fn theta(&self, k: usize) -> RingSeries {
        RingSeries {
            algebra: self.algebra.clone(),
            comps: self.comps.iter().map(|c| c.theta(k)).collect(),
        }
    }

    /// Multiply by the monomial `x^shift`, componentwise.
    pub fn mul_monomial(&self, shift: &[u32]) -> RingSeries {
        RingSeries {
            algebra: self.algebra.clone(),
            comps: self.comps.iter().map(|c| c.mul_monomial(shift)).collect(),
        }
    }

    /// The local monodromy substitution `L_k → L_k + 1`, componentwise.
    pub fn shift_l(&self, k: usize) -> RingSeries {
        RingSeries {
            algebra: self.algebra.clone(),
            comps: self.comps.iter().map(|c| c.shift_l(k)).collect(),
        }
    }

    /// Zero out every component except those in grading degree `d`.
    pub fn graded_part(&self, d: u32) -> RingSeries {
        let comps = self
            .comps
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if self.algebra.degrees[i] == d {
                    c.clone()
                } else {
                    LogSeries::zero(c.nvars, c.trunc.clone())
                }
            })
            .collect();
        RingSeries {
            algebra: self.algebra.clone(),
            comps,
        }
    }

    /// Exponential (terminates by nilpotency and/or positive x-support).
    pub fn exp(&self) -> Result<RingSeries> {
        let nvars = self.nvars();
        let trunc = self.comps[0].trunc.clone();
        let zero_exp = vec![0u32; nvars];
        if self.comps[0].terms.contains_key(&zero_exp) {
            return Err(Error::InvalidInput(
                "exp requires a vanishing constant term in the unit component".to_string(),
            ));
        }
        let unit = RingSeries::from_elt(
            self.algebra.clone(),
            nvars,
            trunc.clone(),
            &self.algebra.unit_elt(),
        );
        let mut out = unit.clone();
        let mut power = unit;
        let mut factorial = Q::one();
        let cap = self.comps[0].trunc.total as u64 + self.algebra.top_degree() as u64 + 1;
        for m in 1..=cap {
            power = power.mul(self)?;
            if power.is_zero() {
                return Ok(out);
            }
            factorial *= Q::from(Z::from(m));
            out = out.add(&power.scale(&Scalar::from_q(factorial.recip())))?;
        }
        if power.mul(self)?.is_zero() {
            Ok(out)
        } else {
            Err(Error::DepthExceeded {
                depth: cap as usize + 1,
                max: cap as usize,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, qr};

    fn tv(order: u32) -> Truncation {
        Truncation::total(order)
    }

    #[test]
    fn scalar_ring_arithmetic() {
        let one = Scalar::one();
        let p = Scalar::p();
        let lhs = one.add(&p).mul(&one.sub(&p));
        let expected = one.sub(&p.mul(&p));
        assert_eq!(lhs, expected);
        let z = Scalar::z3().scale(&q(3));
        assert_eq!(z.coeff(0, 1), q(3));
        assert!(Scalar::from_q(q(0)).is_zero());
        assert_eq!(Scalar::from_q(qr(2, 3)).invert().unwrap().as_rational(), Some(qr(3, 2)));
        assert!(p.invert().is_err());
    }

    #[test]
    fn log_shift_is_binomial_expansion() {
        // L^2 under L -> L+1 becomes L^2 + 2L + 1.
        let mut poly = LogPoly::zero();
        poly.add_term(vec![2], Scalar::one());
        let shifted = poly.shift_log(0);
        assert_eq!(shifted.coeff(&[2]).as_rational(), Some(q(1)));
        assert_eq!(shifted.coeff(&[1]).as_rational(), Some(q(2)));
        assert_eq!(shifted.coeff(&[0]).as_rational(), Some(q(1)));
    }

    #[test]
    fn theta_acts_on_powers_and_logs() {
        // theta(x^2 L^2) = 2 x^2 L^2 + 2 P x^2 L.
        let mut s = LogSeries::zero(1, tv(4));
        s.insert(vec![2], vec![2], Scalar::one());
        let t = s.theta(0);
        let poly = t.coeff(&[2]);
        assert_eq!(poly.coeff(&[2]).as_rational(), Some(q(2)));
        assert_eq!(poly.coeff(&[1]), Scalar::p().scale(&q(2)));
    }

    #[test]
    fn exp_and_invert_round_trip() {
        // exp(x) * exp(-x) = 1, and invert(exp(x)) = exp(-x), to order 5.
        let mut x = LogSeries::zero(1, tv(5));
        x.insert(vec![1], vec![0], Scalar::one());
        let ex = x.exp().unwrap();
        assert_eq!(ex.rational_coeff(&[3]), Some(qr(1, 6)));
        let inv = ex.invert().unwrap();
        let emx = x.neg().exp().unwrap();
        assert_eq!(inv, emx);
        assert_eq!(ex.mul(&inv), LogSeries::one(1, tv(5)));
    }

    #[test]
    fn compose_substitutes_series() {
        // f(x) = x^2, g(q) = q + q^2  =>  f(g) = q^2 + 2 q^3 + q^4.
        let mut f = LogSeries::zero(1, tv(4));
        f.insert(vec![2], vec![0], Scalar::one());
        let mut g = LogSeries::zero(1, tv(4));
        g.insert(vec![1], vec![0], Scalar::one());
        g.insert(vec![2], vec![0], Scalar::one());
        let h = f.compose(std::slice::from_ref(&g)).unwrap();
        assert_eq!(h.rational_coeff(&[2]), Some(q(1)));
        assert_eq!(h.rational_coeff(&[3]), Some(q(2)));
        assert_eq!(h.rational_coeff(&[4]), Some(q(1)));
    }

    /// Toy threefold-like algebra: basis (1, J, b, v) with J² = 5b, J·b = v.
    fn toy_algebra() -> NilpotentAlgebra {
        let dim = 4;
        let mut table = vec![vec![vec![Q::zero(); dim]; dim]; dim];
        for j in 0..dim {
            table[0][j][j] = Q::one();
            table[j][0][j] = Q::one();
        }
        table[1][1][2] = q(5);
        table[1][2][3] = Q::one();
        table[2][1][3] = Q::one();
        NilpotentAlgebra::new(
            vec!["1".into(), "J".into(), "b".into(), "v".into()],
            vec![0, 1, 2, 3],
            table,
            vec![1],
        )
        .unwrap()
    }

    #[test]
    fn algebra_validation_rejects_broken_tables() {
        let good = toy_algebra();
        assert_eq!(good.top_degree(), 3);
        // Break associativity: J*(J*J) != (J*J)*J after tampering J*b.
        let mut bad_table = good.table.clone();
        bad_table[1][2][3] = q(2);
        let err = NilpotentAlgebra::new(
            good.names.clone(),
            good.degrees.clone(),
            bad_table,
            vec![1],
        );
        assert!(err.is_err());
    }

    #[test]
    fn exp_elt_terminates_by_nilpotency() {
        let a = toy_algebra();
        let j = a.generator_elt(0);
        let e = a.exp_elt(&j).unwrap();
        // exp(J) = 1 + J + (5/2) b + (5/6) v.
        assert_eq!(e[0].as_rational(), Some(q(1)));
        assert_eq!(e[1].as_rational(), Some(q(1)));
        assert_eq!(e[2].as_rational(), Some(qr(5, 2)));
        assert_eq!(e[3].as_rational(), Some(qr(5, 6)));
    }

    #[test]
    fn monodromy_shift_matches_generator_exponential() {
        // For X = exp(J ⊗ L): shifting L → L+1 equals multiplying by exp(J).
        let a = Arc::new(toy_algebra());
        let mut jl = RingSeries::zero(a.clone(), 1, tv(3));
        jl.comps[1].insert(vec![0], vec![1], Scalar::one());
        let x_hat = jl.exp().unwrap();
        // Degree-2 component must be (5/2) L².
        assert_eq!(x_hat.comps[2].coeff(&[0]).coeff(&[2]).as_rational(), Some(qr(5, 2)));
        let shifted = x_hat.shift_l(0);
        let ej = a.exp_elt(&a.generator_elt(0)).unwrap();
        let via_mult = x_hat.mul_elt(&ej);
        assert_eq!(shifted, via_mult);
    }

    #[test]
    fn ring_series_products_respect_grading() {
        let a = Arc::new(toy_algebra());
        let j_series = RingSeries::from_elt(a.clone(), 1, tv(3), &a.generator_elt(0));
        let j2 = j_series.mul(&j_series).unwrap();
        assert_eq!(j2.comps[2].rational_coeff(&[0]), Some(q(5)));
        let j4 = j2.mul(&j2).unwrap();
        assert!(j4.is_zero());
        let graded = j2.graded_part(2);
        assert_eq!(graded, j2);
    }

    #[test]
    fn truncation_caps_are_respected() {
        let trunc = Truncation::boxed(vec![2, 1]);
        assert!(trunc.admits(&[2, 1]));
        assert!(!trunc.admits(&[3, 0]));
        assert!(!trunc.admits(&[0, 2]));
        let mut s = LogSeries::zero(2, trunc);
        s.insert(vec![2, 1], vec![0, 0], Scalar::one());
        s.insert(vec![0, 2], vec![0, 0], Scalar::one());
        assert_eq!(s.terms.len(), 1);
    }
}
