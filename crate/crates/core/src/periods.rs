//! The canonical symplectic period layer: Riemann–Roch pairing, symplectic
//! cohomology bases, period vectors assembled from the cohomology-valued
//! Frobenius series, mirror maps and their inversion, large-complex-structure
//! monodromy matrices with weight filtrations, the cup-product monodromy
//! identity, and central charges.

use std::collections::BTreeSet;

use num::{One, Zero};

use crate::error::Error;
use crate::gkz::FrobeniusFamily;
use crate::Result;
use crate::linalg::QMat;
use crate::num::{Q, Z};
use crate::series::{LogSeries, NilpotentAlgebra, RingSeries, Scalar};
use crate::toricring::CohomologyRing;

// ---------------------------------------------------------------------------
// Algebra helpers on rational component vectors
// ---------------------------------------------------------------------------

/// Product of two ring elements given in rational basis coordinates.
fn q_mul(algebra: &NilpotentAlgebra, a: &[Q], b: &[Q]) -> Vec<Q> {
    let dim = algebra.dim();
    let mut out = vec![Q::zero(); dim];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            for (c, t) in algebra.table[i][j].iter().enumerate() {
                if !t.is_zero() {
                    out[c] += ai * bj * t;
                }
            }
        }
    }
    out
}

/// The involution `*`: multiply each graded component by `(−1)^degree`.
fn star(algebra: &NilpotentAlgebra, a: &[Q]) -> Vec<Q> {
    a.iter()
        .enumerate()
        .map(|(i, v)| {
            if algebra.degrees[i] % 2 == 1 {
                -v.clone()
            } else {
                v.clone()
            }
        })
        .collect()
}

/// Index of the (unique) top-degree basis element, the normalized volume
/// class with `∫ vol = 1`.
fn volume_index(algebra: &NilpotentAlgebra) -> Result<usize> {
    let top = algebra.top_degree();
    let slots: Vec<usize> = (0..algebra.dim())
        .filter(|&i| algebra.degrees[i] == top)
        .collect();
    match slots.as_slice() {
        [v] => Ok(*v),
        _ => Err(Error::RingMismatch {
            reason: "the top grading degree is not one-dimensional".to_string(),
        }),
    }
}

/// The Todd-type correction class `1 + c₂/12` in basis coordinates.
fn todd_element(ring: &CohomologyRing) -> Vec<Q> {
    let algebra = &ring.algebra;
    let mut todd = vec![Q::zero(); algebra.dim()];
    todd[0] = Q::one();
    if algebra.top_degree() == 3 {
        let s = algebra.generators.len();
        for (m, v) in ring.c2_j.iter().enumerate() {
            todd[1 + s + m] = v / Q::from(Z::from(12));
        }
    }
    todd
}

/// `∫ α · β · (1 + c₂/12)` — the bilinear integral without the involution.
fn todd_integral(ring: &CohomologyRing, alpha: &[Q], beta: &[Q]) -> Result<Q> {
    let algebra = &ring.algebra;
    let vol = volume_index(algebra)?;
    let prod = q_mul(algebra, &q_mul(algebra, alpha, beta), &todd_element(ring));
    Ok(prod[vol].clone())
}

/// The Riemann–Roch bilinear form `⟨α, β⟩ = ∫ (*α) · β · (1 + c₂/12)` on the
/// even cohomology ring; `*` negates the odd graded components.
pub fn rr_pairing(alpha: &[Q], beta: &[Q], ring: &CohomologyRing) -> Result<Q> {
    let algebra = &ring.algebra;
    if alpha.len() != algebra.dim() || beta.len() != algebra.dim() {
        return Err(Error::RingMismatch {
            reason: "pairing arguments must have one coordinate per basis element".to_string(),
        });
    }
    todd_integral(ring, &star(algebra, alpha), beta)
}

/// Matrix of multiplication by `elt` on basis coordinates: column `j` holds
/// the coordinates of `elt · e_j`.
fn mult_matrix(algebra: &NilpotentAlgebra, elt: &[Q]) -> QMat {
    let dim = algebra.dim();
    let mut rows = vec![vec![Q::zero(); dim]; dim];
    for (l, v) in elt.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        for j in 0..dim {
            for (c, t) in algebra.table[l][j].iter().enumerate() {
                if !t.is_zero() {
                    rows[c][j] += v * t;
                }
            }
        }
    }
    QMat::from_rows(rows)
}

fn algebras_match(a: &NilpotentAlgebra, b: &NilpotentAlgebra) -> bool {
    a.degrees == b.degrees && a.table == b.table && a.generators == b.generators
}

// ---------------------------------------------------------------------------
// Small exact-matrix helpers
// ---------------------------------------------------------------------------

fn mat_sub(a: &QMat, b: &QMat) -> QMat {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    let rows = (0..a.rows)
        .map(|i| (0..a.cols).map(|j| &a[(i, j)] - &b[(i, j)]).collect())
        .collect();
    QMat::from_rows(rows)
}

fn mat_scale(a: &QMat, f: &Q) -> QMat {
    let rows = (0..a.rows)
        .map(|i| (0..a.cols).map(|j| &a[(i, j)] * f).collect())
        .collect();
    QMat::from_rows(rows)
}

fn mat_add(a: &QMat, b: &QMat) -> QMat {
    mat_sub(a, &mat_scale(b, &-Q::one()))
}

fn mat_is_zero(a: &QMat) -> bool {
    (0..a.rows).all(|i| (0..a.cols).all(|j| a[(i, j)].is_zero()))
}

/// Logarithm of a unipotent matrix: `Σ_{j≥1} (−1)^{j+1} (T−I)^j / j`.
fn unipotent_log(t: &QMat) -> Result<QMat> {
    let n = t.rows;
    let nil = mat_sub(t, &QMat::identity(n));
    let mut out = QMat::zero(n, n);
    let mut power = QMat::identity(n);
    for j in 1..=n {
        power = power.mul(&nil);
        if mat_is_zero(&power) {
            return Ok(out);
        }
        let sign = if j % 2 == 1 { Q::one() } else { -Q::one() };
        out = mat_add(&out, &mat_scale(&power, &(sign / Q::from(Z::from(j as i64)))));
    }
    Err(Error::NotNilpotent {
        reason: format!("matrix is not unipotent of index at most {n}"),
    })
}

// ---------------------------------------------------------------------------
// SymplecticBasis
// ---------------------------------------------------------------------------

/// The symplectic basis of `H^even`: `b⁰ = 1`, `bᵢ¹ = Jᵢ − (∫c₂Jᵢ/12)·vol −
/// Σ_k a_{ki} b_k²`, the dual classes `bⱼ²`, and `b³ = −vol`, with free
/// symmetric parameters `a_{ki}` (default 0).  Elements are stored in the
/// arrangement order `(b⁰, b₁¹..b_s¹, b_s²..b₁², b³)`, and the Gram matrix of
/// the Riemann–Roch pairing is verified to be the standard antidiagonal
/// symplectic form.
#[derive(Clone, Debug)]
pub struct SymplecticBasis {
    /// The underlying cohomology ring.
    pub ring: CohomologyRing,
    /// Free parameters `a_{ki}` (s × s); the pairing forces symmetry.
    pub a_params: Vec<Vec<Q>>,
    /// Basis elements in arrangement order, as rational coordinate vectors.
    pub elements: Vec<Vec<Q>>,
    /// Gram matrix of the pairing on `elements` (the symplectic form).
    pub sigma: QMat,
}

impl SymplecticBasis {
    /// The canonical basis with all `a_{ki} = 0`.
    pub fn new(ring: CohomologyRing) -> Result<Self> {
        let s = ring.algebra.generators.len();
        let a = vec![vec![Q::zero(); s]; s];
        SymplecticBasis::with_a_params(ring, a)
    }

    /// Basis with explicit `a_{ki}`; fails with [`Error::PairingMismatch`] if
    /// the Gram matrix is not the standard symplectic form (in particular for
    /// non-symmetric parameters).
    pub fn with_a_params(ring: CohomologyRing, a_params: Vec<Vec<Q>>) -> Result<Self> {
        let algebra = ring.algebra.clone();
        let top = algebra.top_degree();
        let dim = algebra.dim();
        let s = algebra.generators.len();
        let vol = volume_index(&algebra)?;
        if top != 1 && top != 3 {
            return Err(Error::RingMismatch {
                reason: format!(
                    "symplectic bases exist only in odd complex dimension, got {top}"
                ),
            });
        }
        if top == 3 && dim != 2 * s + 2 {
            return Err(Error::RingMismatch {
                reason: format!(
                    "threefold ring must have dimension 2s+2 = {}, got {dim}",
                    2 * s + 2
                ),
            });
        }
        if a_params.len() != s || a_params.iter().any(|row| row.len() != s) {
            return Err(Error::InvalidInput(format!(
                "a-parameter matrix must be {s} × {s}"
            )));
        }
        let mut elements = Vec::with_capacity(if top == 3 { 2 * s + 2 } else { 2 });
        let mut unit = vec![Q::zero(); dim];
        unit[0] = Q::one();
        elements.push(unit);
        if top == 3 {
            for i in 0..s {
                let mut b1 = vec![Q::zero(); dim];
                b1[1 + i] = Q::one();
                b1[vol] = -&ring.c2_j[i] / Q::from(Z::from(12));
                for k in 0..s {
                    b1[1 + s + k] -= &a_params[k][i];
                }
                elements.push(b1);
            }
            for j in (0..s).rev() {
                let mut b2 = vec![Q::zero(); dim];
                b2[1 + s + j] = Q::one();
                elements.push(b2);
            }
        }
        let mut b_top = vec![Q::zero(); dim];
        b_top[vol] = -Q::one();
        elements.push(b_top);

        // Gram matrix check: antidiagonal, −1 in the upper half.
        let d = elements.len();
        let mut gram = QMat::zero(d, d);
        for i in 0..d {
            for j in 0..d {
                gram[(i, j)] = rr_pairing(&elements[i], &elements[j], &ring)?;
            }
        }
        let mut expected = QMat::zero(d, d);
        for i in 0..d {
            expected[(i, d - 1 - i)] = if i < d / 2 { -Q::one() } else { Q::one() };
        }
        if gram != expected {
            return Err(Error::PairingMismatch {
                reason: format!(
                    "Gram matrix of the basis is not the symplectic form: {:?}",
                    gram.to_rows()
                ),
            });
        }
        Ok(SymplecticBasis {
            ring,
            a_params,
            elements,
            sigma: gram,
        })
    }

    /// Number of distinguished degree-1 generators.
    pub fn num_generators(&self) -> usize {
        self.ring.algebra.generators.len()
    }

    /// Size of the basis (= length of the period vector).
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    /// The matrix `B` with `Π = B · (algebra components of w₀)`: row `a`
    /// expresses the coefficient of the basis element `𝓑_a` in the
    /// 𝓑-expansion of a ring-valued series in terms of its raw components.
    pub fn expansion_matrix(&self) -> QMat {
        let algebra = &self.ring.algebra;
        let dim = algebra.dim();
        let s = self.num_generators();
        let vol = volume_index(algebra).expect("validated in constructor");
        let mut rows = Vec::with_capacity(self.dim());
        let mut row0 = vec![Q::zero(); dim];
        row0[0] = Q::one();
        rows.push(row0);
        if algebra.top_degree() == 3 {
            for i in 0..s {
                let mut row = vec![Q::zero(); dim];
                row[1 + i] = Q::one();
                rows.push(row);
            }
            for k in (0..s).rev() {
                let mut row = vec![Q::zero(); dim];
                row[1 + s + k] = Q::one();
                for i in 0..s {
                    row[1 + i] = self.a_params[k][i].clone();
                }
                rows.push(row);
            }
            let mut row = vec![Q::zero(); dim];
            row[vol] = -Q::one();
            for i in 0..s {
                row[1 + i] = -&self.ring.c2_j[i] / Q::from(Z::from(12));
            }
            rows.push(row);
        } else {
            let mut row = vec![Q::zero(); dim];
            row[vol] = -Q::one();
            rows.push(row);
        }
        QMat::from_rows(rows)
    }

    /// The alignment involution `S = diag((−1)^degree)` in arrangement order.
    pub fn sign_involution(&self) -> QMat {
        let s = self.num_generators();
        let d = self.dim();
        let mut m = QMat::zero(d, d);
        for i in 0..d {
            let sign = if self.ring.algebra.top_degree() == 3 {
                if i == 0 {
                    Q::one()
                } else if i <= s {
                    -Q::one()
                } else if i <= 2 * s {
                    Q::one()
                } else {
                    -Q::one()
                }
            } else if i == 0 {
                Q::one()
            } else {
                -Q::one()
            };
            m[(i, i)] = sign;
        }
        m
    }
}

// ---------------------------------------------------------------------------
// PeriodVector
// ---------------------------------------------------------------------------

/// The canonical symplectic period vector in the arrangement
/// `ᵗ(Π₀, Π₁¹..Π_s¹, Π_s²..Π₁², Π³)`, together with the exact symplectic form
/// `Σ` its monodromies preserve.
#[derive(Clone, Debug)]
pub struct PeriodVector {
    /// Entries in arrangement order.
    pub entries: Vec<LogSeries>,
    /// Number of degree-1 generators (chart variables).
    pub s: usize,
    /// Complex dimension of the underlying space.
    pub top: u32,
    /// The symplectic form preserved by the monodromy.
    pub sigma: QMat,
}

impl PeriodVector {
    /// Length of the vector.
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// `Π₀`.
    pub fn pi0(&self) -> &LogSeries {
        &self.entries[0]
    }

    /// The single-logarithm period attached to generator `k` (the coefficient
    /// of `J_k` in the ring-valued series): `Π_k¹` on threefolds, `−Π^{(top)}`
    /// on curves.
    pub fn generator_period(&self, k: usize) -> LogSeries {
        if self.top == 3 {
            self.entries[1 + k].clone()
        } else {
            self.entries[1].neg()
        }
    }
}

/// Shared invariant checks for both assembly routes.
fn validate_period_vector(entries: &[LogSeries], s: usize, top: u32) -> Result<()> {
    let pi0 = &entries[0];
    let nvars = pi0.nvars;
    let zero_exp = vec![0u32; nvars];
    if pi0.has_logs() || pi0.rational_coeff(&zero_exp) != Some(Q::one()) {
        return Err(Error::RingMismatch {
            reason: "Π₀ must be log-free with constant term 1".to_string(),
        });
    }
    let slot_degree = |a: usize| -> u32 {
        if top == 3 {
            if a == 0 {
                0
            } else if a <= s {
                1
            } else if a <= 2 * s {
                2
            } else {
                3
            }
        } else if a == 0 {
            0
        } else {
            1
        }
    };
    for (a, entry) in entries.iter().enumerate() {
        let max_log = entry
            .terms
            .values()
            .map(|p| p.max_log_degree())
            .max()
            .unwrap_or(0);
        let deg = slot_degree(a);
        if max_log > deg {
            return Err(Error::RingMismatch {
                reason: format!("entry {a} has log-degree {max_log} > {deg}"),
            });
        }
        if deg == 1 && max_log != 1 {
            return Err(Error::RingMismatch {
                reason: format!("entry {a} must have log-degree exactly 1"),
            });
        }
        let has_z3 = entry
            .terms
            .values()
            .flat_map(|p| p.coeffs.values())
            .flat_map(|sc| sc.coeffs.keys())
            .any(|&(_, z)| z > 0);
        if has_z3 && a + 1 != entries.len() {
            return Err(Error::RingMismatch {
                reason: format!("Z₃ may appear only in the last entry, found in entry {a}"),
            });
        }
    }
    Ok(())
}

/// Assemble the canonical period vector from the ratio-normalized series
/// `w_s`:
/// `Π₀ = w_s⁽⁰⁾`, `Πᵢ¹ = w_{s,i}⁽¹⁾`,
/// `Π_k² = (b_k²-coefficient of w_s) − (∫c₂J_k/24)·w_s⁽⁰⁾ + Σᵢ a_{ki}·w_{s,i}⁽¹⁾`,
/// `Π³ = −(vol-coefficient of w_s) − Σ_k (∫c₂J_k/24)·w_{s,k}⁽¹⁾ − Z₃·χ·w_s⁽⁰⁾`.
pub fn period_vector(family: &FrobeniusFamily, basis: &SymplecticBasis) -> Result<PeriodVector> {
    let algebra = &basis.ring.algebra;
    if !algebras_match(&family.ws.algebra, algebra) {
        return Err(Error::RingMismatch {
            reason: "series and basis are built over different rings".to_string(),
        });
    }
    let comps = &family.ws.comps;
    let s = basis.num_generators();
    let top = algebra.top_degree();
    let vol = volume_index(algebra)?;
    let q24 = Q::from(Z::from(24));
    let mut entries = Vec::with_capacity(basis.dim());
    entries.push(comps[0].clone());
    if top == 3 {
        for i in 0..s {
            entries.push(comps[1 + i].clone());
        }
        for k in (0..s).rev() {
            let mut pi2 = comps[1 + s + k].clone();
            pi2 = pi2.sub(&comps[0].scale_q(&(&basis.ring.c2_j[k] / &q24)));
            for i in 0..s {
                if !basis.a_params[k][i].is_zero() {
                    pi2 = pi2.add(&comps[1 + i].scale_q(&basis.a_params[k][i]));
                }
            }
            entries.push(pi2);
        }
        let mut pi3 = comps[vol].neg();
        for k in 0..s {
            pi3 = pi3.sub(&comps[1 + k].scale_q(&(&basis.ring.c2_j[k] / &q24)));
        }
        pi3 = pi3.sub(&comps[0].scale(&Scalar::z3().scale(&basis.ring.chi)));
        entries.push(pi3);
    } else {
        entries.push(comps[vol].neg());
    }
    validate_period_vector(&entries, s, top)?;
    Ok(PeriodVector {
        entries,
        s,
        top,
        sigma: basis.sigma.clone(),
    })
}

/// Assemble the period vector by expanding the Γ-normalized series `w₀`
/// directly in the basis 𝓑 (the dual route; agrees with [`period_vector`]).
pub fn period_vector_from_w0(w0: &RingSeries, basis: &SymplecticBasis) -> Result<PeriodVector> {
    let algebra = &basis.ring.algebra;
    if !algebras_match(&w0.algebra, algebra) {
        return Err(Error::RingMismatch {
            reason: "series and basis are built over different rings".to_string(),
        });
    }
    let b = basis.expansion_matrix();
    let dim = algebra.dim();
    let s = basis.num_generators();
    let top = algebra.top_degree();
    let mut entries = Vec::with_capacity(basis.dim());
    for a in 0..b.rows {
        let mut entry = LogSeries::zero(w0.nvars(), w0.comps[0].trunc.clone());
        for j in 0..dim {
            let c = &b[(a, j)];
            if !c.is_zero() {
                entry = entry.add(&w0.comps[j].scale_q(c));
            }
        }
        entries.push(entry);
    }
    validate_period_vector(&entries, s, top)?;
    Ok(PeriodVector {
        entries,
        s,
        top,
        sigma: basis.sigma.clone(),
    })
}

// ---------------------------------------------------------------------------
// Mirror map and inversion
// ---------------------------------------------------------------------------

/// The mirror map `t_k = Π_k¹ / Π₀`; each `t_k` has the shape
/// `L_k + P · h_k(x)` with `h_k` a rational power series vanishing at 0.
pub fn mirror_map(pv: &PeriodVector) -> Result<Vec<LogSeries>> {
    let inv = pv.pi0().invert()?;
    let s = if pv.top == 3 { pv.s } else { 1 };
    let mut ts = Vec::with_capacity(s);
    for k in 0..s {
        let t = pv.generator_period(k).mul(&inv);
        map_exponent(&t, k)?; // shape guard
        ts.push(t);
    }
    Ok(ts)
}

/// The mirror map computed directly from a Frobenius family (usable even when
/// no symplectic basis exists, e.g. on K3 charts): `t_k = (J_k-component of
/// w_s) / (unit component)`.
pub fn mirror_map_from_family(family: &FrobeniusFamily) -> Result<Vec<LogSeries>> {
    let inv = family.ws.comps[0].invert()?;
    let algebra = &family.ws.algebra;
    let mut ts = Vec::with_capacity(algebra.generators.len());
    for (k, &slot) in algebra.generators.iter().enumerate() {
        let t = family.ws.comps[slot].mul(&inv);
        map_exponent(&t, k)?;
        ts.push(t);
    }
    Ok(ts)
}

/// Extract `h_k` from `t_k = L_k + P·h_k(x)`; fails if the shape is off.
fn map_exponent(t: &LogSeries, k: usize) -> Result<LogSeries> {
    let nvars = t.nvars;
    let mut l_term = LogSeries::zero(nvars, t.trunc.clone());
    let mut logs = vec![0u32; nvars];
    logs[k] = 1;
    l_term.insert(vec![0; nvars], logs, Scalar::one());
    let rest = t.sub(&l_term);
    let mut h = LogSeries::zero(nvars, t.trunc.clone());
    for (exp, poly) in &rest.terms {
        let constant = poly.as_constant().ok_or_else(|| Error::NotInvertible {
            reason: format!("mirror map t_{} carries unexpected logarithms", k + 1),
        })?;
        for (&(p, z), v) in &constant.coeffs {
            if (p, z) != (1, 0) {
                return Err(Error::NotInvertible {
                    reason: format!(
                        "mirror map t_{} has a coefficient outside P·ℚ",
                        k + 1
                    ),
                });
            }
            if exp.iter().all(|&e| e == 0) {
                return Err(Error::NotInvertible {
                    reason: format!("mirror map t_{} has a constant correction", k + 1),
                });
            }
            h.insert(exp.clone(), vec![0; nvars], Scalar::from_q(v.clone()));
        }
    }
    Ok(h)
}

/// Invert the mirror map: from `t_k = L_k + P·h_k(x)` (equivalently
/// `q_k = x_k·e^{h_k(x)}`) compute `x_k(q) = q_k(1 + …)` as log-free power
/// series in the exp-normalized coordinates `q`.
pub fn invert_mirror_map(ts: &[LogSeries]) -> Result<Vec<LogSeries>> {
    let s = ts.len();
    let hs: Vec<LogSeries> = ts
        .iter()
        .enumerate()
        .map(|(k, t)| map_exponent(t, k))
        .collect::<Result<_>>()?;
    let trunc = hs
        .iter()
        .fold(ts[0].trunc.clone(), |acc, h| acc.meet(&h.trunc));
    let monomial = |k: usize| -> LogSeries {
        let mut m = LogSeries::zero(s, trunc.clone());
        let mut exp = vec![0u32; s];
        exp[k] = 1;
        m.insert(exp, vec![0; s], Scalar::one());
        m
    };
    let mut xs: Vec<LogSeries> = (0..s).map(monomial).collect();
    let rounds = trunc.total as usize + 1;
    for _ in 0..rounds {
        let mut next = Vec::with_capacity(s);
        for k in 0..s {
            let inner = hs[k].compose(&xs)?;
            next.push(monomial(k).mul(&inner.neg().exp()?));
        }
        if next == xs {
            return Ok(xs);
        }
        xs = next;
    }
    // One extra round must be stationary at this truncation order.
    let mut check = Vec::with_capacity(s);
    for k in 0..s {
        let inner = hs[k].compose(&xs)?;
        check.push(monomial(k).mul(&inner.neg().exp()?));
    }
    if check == xs {
        Ok(xs)
    } else {
        Err(Error::NotInvertible {
            reason: "mirror-map inversion did not stabilize at this order".to_string(),
        })
    }
}

/// Round-trip check: substituting `x(q)` back into the exp-normalized map
/// must reproduce the coordinates, `x_k(q)·e^{h_k(x(q))} = q_k` exactly to
/// the truncation order.
pub fn mirror_roundtrip_ok(ts: &[LogSeries], xs: &[LogSeries]) -> Result<bool> {
    let s = ts.len();
    for (k, t) in ts.iter().enumerate() {
        let h = map_exponent(t, k)?;
        let q_of_x = xs[k].mul(&h.compose(xs)?.exp()?);
        let mut exp = vec![0u32; s];
        exp[k] = 1;
        let mut monomial = LogSeries::zero(xs[k].nvars, q_of_x.trunc.clone());
        monomial.insert(exp, vec![0; s], Scalar::one());
        if q_of_x.truncate(monomial.trunc.clone()) != monomial {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Monodromy
// ---------------------------------------------------------------------------

/// Exact monodromy data at the large-complex-structure point: `T_k` realizes
/// the shift `L_k → L_k + 1` on the period vector, `N_k = log T_k`.
#[derive(Clone, Debug)]
pub struct MonodromyData {
    /// Monodromy matrices, one per chart variable.
    pub ts: Vec<QMat>,
    /// Their (nilpotent) logarithms.
    pub ns: Vec<QMat>,
    /// The symplectic form they preserve.
    pub sigma: QMat,
}

type CoeffKey = (Vec<u32>, Vec<u32>, u32, u32);

fn coefficient_keys(entries: &[LogSeries]) -> BTreeSet<CoeffKey> {
    let mut keys = BTreeSet::new();
    for entry in entries {
        for (exp, poly) in &entry.terms {
            for (logs, scalar) in &poly.coeffs {
                for &(p, z) in scalar.coeffs.keys() {
                    keys.insert((exp.clone(), logs.clone(), p, z));
                }
            }
        }
    }
    keys
}

fn flatten(entry: &LogSeries, keys: &BTreeSet<CoeffKey>) -> Vec<Q> {
    keys.iter()
        .map(|(exp, logs, p, z)| {
            entry
                .terms
                .get(exp)
                .map(|poly| poly.coeff(logs).coeff(*p, *z))
                .unwrap_or_else(Q::zero)
        })
        .collect()
}

/// The monodromy matrix `T_k` with `Π(L_k → L_k + 1) = T_k · Π`, solved as an
/// exact overdetermined linear system over all series coefficients.  Asserts
/// unipotency, symplecticity, and agreement with the matrix of
/// `e^{J_k}`-multiplication transported through the 𝓑-expansion.
pub fn lcsl_monodromy(pv: &PeriodVector, basis: &SymplecticBasis, k: usize) -> Result<QMat> {
    let d = pv.dim();
    let shifted: Vec<LogSeries> = pv.entries.iter().map(|e| e.shift_l(k)).collect();
    let mut all = pv.entries.clone();
    all.extend(shifted.iter().cloned());
    let keys = coefficient_keys(&all);
    let columns: Vec<Vec<Q>> = pv.entries.iter().map(|e| flatten(e, &keys)).collect();
    let system = QMat::from_rows(
        (0..keys.len())
            .map(|r| columns.iter().map(|c| c[r].clone()).collect())
            .collect(),
    );
    let mut rows = Vec::with_capacity(d);
    for (a, sh) in shifted.iter().enumerate() {
        let rhs = flatten(sh, &keys);
        let t_row = system.solve(&rhs).ok_or_else(|| Error::SolveFailed {
            reason: format!(
                "no exact expression of the shifted period {a} in the original ones \
                 (series-order deficit; raise the truncation order)"
            ),
        })?;
        // Residual re-check: the solution must reproduce the shift exactly.
        let mut recombined = LogSeries::zero(sh.nvars, sh.trunc.clone());
        for (b, coeff) in t_row.iter().enumerate() {
            if !coeff.is_zero() {
                recombined = recombined.add(&pv.entries[b].scale_q(coeff));
            }
        }
        if recombined != *sh {
            return Err(Error::SolveFailed {
                reason: format!("shifted period {a} is not a combination of the originals"),
            });
        }
        rows.push(t_row);
    }
    let t = QMat::from_rows(rows);

    // Unipotency of index at most top + 1.
    let nil = mat_sub(&t, &QMat::identity(d));
    let mut power = QMat::identity(d);
    for _ in 0..=pv.top {
        power = power.mul(&nil);
    }
    if !mat_is_zero(&power) {
        return Err(Error::NotNilpotent {
            reason: format!("(T − I)^{} does not vanish", pv.top + 1),
        });
    }
    // Symplecticity.
    if t.transpose().mul(&pv.sigma).mul(&t) != pv.sigma {
        return Err(Error::PairingMismatch {
            reason: "monodromy does not preserve the symplectic form".to_string(),
        });
    }
    // Agreement with the transported e^{J_k}-multiplication.
    let transported = transported_generator_exp(basis, k)?;
    if t != transported {
        return Err(Error::SolveFailed {
            reason: "monodromy disagrees with the transported generator exponential \
                     (series-order deficit; raise the truncation order)"
                .to_string(),
        });
    }
    Ok(t)
}

/// `B · M(e^{J_k}) · B^{-1}`: the matrix of multiplication by `e^{J_k}`
/// transported to period coordinates by the 𝓑-expansion matrix.
fn transported_generator_exp(basis: &SymplecticBasis, k: usize) -> Result<QMat> {
    let algebra = &basis.ring.algebra;
    let gen = algebra.exp_elt(&algebra.generator_elt(k))?;
    let gen_q: Vec<Q> = gen
        .iter()
        .map(|s| {
            s.as_rational().ok_or_else(|| Error::RingMismatch {
                reason: "generator exponential has non-rational coordinates".to_string(),
            })
        })
        .collect::<Result<_>>()?;
    let m = mult_matrix(algebra, &gen_q);
    let b = basis.expansion_matrix();
    let b_inv = b.inverse().ok_or_else(|| Error::RingMismatch {
        reason: "basis expansion matrix is singular".to_string(),
    })?;
    Ok(b.mul(&m).mul(&b_inv))
}

/// All monodromies `T_k` with their logarithms; checks pairwise commutation
/// of the `N_k` (the normal-crossing property of the boundary divisors).
pub fn monodromy_data(pv: &PeriodVector, basis: &SymplecticBasis) -> Result<MonodromyData> {
    let nvars = pv.pi0().nvars;
    let mut ts = Vec::with_capacity(nvars);
    let mut ns = Vec::with_capacity(nvars);
    for k in 0..nvars {
        let t = lcsl_monodromy(pv, basis, k)?;
        let n = unipotent_log(&t)?;
        ts.push(t);
        ns.push(n);
    }
    for i in 0..ns.len() {
        for j in (i + 1)..ns.len() {
            if ns[i].mul(&ns[j]) != ns[j].mul(&ns[i]) {
                return Err(Error::SolveFailed {
                    reason: format!("monodromy logarithms N_{} and N_{} do not commute", i + 1, j + 1),
                });
            }
        }
    }
    Ok(MonodromyData {
        ts,
        ns,
        sigma: pv.sigma.clone(),
    })
}

// ---------------------------------------------------------------------------
// Weight filtration
// ---------------------------------------------------------------------------

/// Monodromy weight filtration `W₀ ⊆ … ⊆ W_{2c}` of a nilpotent matrix,
/// centered at weight `c`.
#[derive(Clone, Debug)]
pub struct WeightFiltration {
    /// The center `c` (complex dimension for LCSL filtrations).
    pub center: usize,
    /// `dim W_k` for `k = 0..=2c`.
    pub dims: Vec<usize>,
    /// Canonical (reduced-echelon) bases of the subspaces.
    pub bases: Vec<QMat>,
}

impl WeightFiltration {
    /// Whether the dimension pattern matches the large-complex-structure
    /// shape `0 ⊂ W₀ = W₁ ⊂ W₂ = W₃ ⊂ … ⊂ W_{2c}` with jumps
    /// `1, 1+s, 1+2s, …` for `s` chart parameters.
    pub fn is_lcsl_pattern(&self, s: usize) -> bool {
        let expected: Vec<usize> = match self.center {
            3 => vec![1, 1, 1 + s, 1 + s, 1 + 2 * s, 1 + 2 * s, 2 + 2 * s],
            1 => vec![1, 1, 2],
            _ => return false,
        };
        self.dims == expected
    }

    /// Exact equality of filtrations (same subspaces, not just dimensions).
    pub fn same_filtration(&self, other: &WeightFiltration) -> bool {
        self.center == other.center && self.bases == other.bases
    }
}

/// Canonical row-space form: reduced echelon basis with zero rows dropped.
fn row_space(rows: Vec<Vec<Q>>, n: usize) -> QMat {
    if rows.is_empty() {
        return QMat::zero(0, n);
    }
    let mut m = QMat::from_rows(rows);
    let rank = m.rref().len();
    if rank == 0 {
        return QMat::zero(0, n);
    }
    QMat::from_rows((0..rank).map(|i| m.row(i).to_vec()).collect())
}

fn kernel_basis(m: &QMat) -> QMat {
    row_space(m.nullspace(), m.cols)
}

fn image_basis(m: &QMat) -> QMat {
    row_space(m.transpose().to_rows(), m.rows)
}

fn subspace_sum(a: &QMat, b: &QMat) -> QMat {
    let mut rows = a.to_rows();
    rows.extend(b.to_rows());
    row_space(rows, a.cols)
}

fn subspace_intersect(a: &QMat, b: &QMat) -> QMat {
    let n = a.cols;
    if a.rows == 0 || b.rows == 0 {
        return QMat::zero(0, n);
    }
    // Solve αᵀA = βᵀB: kernel of the n × (rows(A)+rows(B)) stacked matrix.
    let mut cols_mat = QMat::zero(n, a.rows + b.rows);
    for i in 0..a.rows {
        for j in 0..n {
            cols_mat[(j, i)] = a[(i, j)].clone();
        }
    }
    for i in 0..b.rows {
        for j in 0..n {
            cols_mat[(j, a.rows + i)] = -b[(i, j)].clone();
        }
    }
    let mut rows = Vec::new();
    for v in cols_mat.nullspace() {
        let mut x = vec![Q::zero(); n];
        for i in 0..a.rows {
            if !v[i].is_zero() {
                for j in 0..n {
                    x[j] += &v[i] * &a[(i, j)];
                }
            }
        }
        rows.push(x);
    }
    row_space(rows, n)
}

/// The unique monodromy weight filtration of the nilpotent matrix `N`
/// centered at weight `center`: `W_{c+ℓ} = Σ_i ker N^{ℓ+i+1} ∩ im N^i`.
pub fn weight_filtration(n: &QMat, center: usize) -> Result<WeightFiltration> {
    let d = n.rows;
    let mut powers = vec![QMat::identity(d)];
    while !mat_is_zero(powers.last().unwrap()) {
        let next = powers.last().unwrap().mul(n);
        powers.push(next);
        if powers.len() > d + 1 {
            return Err(Error::NotNilpotent {
                reason: "matrix is not nilpotent".to_string(),
            });
        }
    }
    let index = powers.len() - 1; // smallest j with N^j = 0
    if index > center + 1 {
        return Err(Error::NotNilpotent {
            reason: format!(
                "nilpotency index {index} exceeds center + 1 = {}",
                center + 1
            ),
        });
    }
    let power = |j: usize| -> &QMat { &powers[j.min(index)] };
    let mut bases = Vec::with_capacity(2 * center + 1);
    let mut dims = Vec::with_capacity(2 * center + 1);
    for kk in 0..=(2 * center) {
        let ell = kk as i64 - center as i64;
        let mut w = QMat::zero(0, d);
        for i in 0..=index {
            let kexp = ell + i as i64 + 1;
            if kexp < 1 {
                continue;
            }
            let term = subspace_intersect(&kernel_basis(power(kexp as usize)), &image_basis(power(i)));
            w = subspace_sum(&w, &term);
        }
        dims.push(w.rows);
        bases.push(w);
    }
    Ok(WeightFiltration {
        center,
        dims,
        bases,
    })
}

/// Cattani–Kaplan independence check: the filtration of `N_λ = Σ λ_k N_k`
/// must be the same subspace chain for every positive choice of `λ`.
pub fn filtration_lambda_independent(
    ns: &[QMat],
    lambdas: &[Vec<Q>],
    center: usize,
) -> Result<bool> {
    let mut first: Option<WeightFiltration> = None;
    for lambda in lambdas {
        if lambda.len() != ns.len() || lambda.iter().any(|v| v <= &Q::zero()) {
            return Err(Error::InvalidInput(
                "each λ must assign a positive weight to every divisor".to_string(),
            ));
        }
        let d = ns[0].rows;
        let mut combined = QMat::zero(d, d);
        for (n, l) in ns.iter().zip(lambda) {
            combined = mat_add(&combined, &mat_scale(n, l));
        }
        let w = weight_filtration(&combined, center)?;
        match &first {
            None => first = Some(w),
            Some(f) => {
                if !f.same_filtration(&w) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Mirror cup-product identity
// ---------------------------------------------------------------------------

/// Per-generator outcome of the cup-product monodromy identity.
#[derive(Clone, Debug)]
pub struct MirrorCheck {
    /// Chart variable index.
    pub k: usize,
    /// Whether `log T_k = S · M(−J_k ∪) · S` holds exactly.
    pub ok: bool,
    /// The residual matrix when the identity fails.
    pub residual: Option<QMat>,
}

/// Report of [`verify_mirror_isomorphism`].
#[derive(Clone, Debug)]
pub struct MirrorReport {
    /// One check per chart variable.
    pub checks: Vec<MirrorCheck>,
    /// Conjunction of all checks.
    pub all_ok: bool,
}

/// Verify, as exact matrix identities, that each monodromy logarithm equals
/// the matrix of cup-multiplication by `−J_k` in the 𝓑-expansion
/// coordinates, conjugated by the degree-sign alignment `S`.
pub fn verify_mirror_isomorphism(
    monodromy: &MonodromyData,
    basis: &SymplecticBasis,
) -> MirrorReport {
    let algebra = &basis.ring.algebra;
    let b = basis.expansion_matrix();
    let b_inv = b.inverse().expect("validated in constructor");
    let s_mat = basis.sign_involution();
    let mut checks = Vec::with_capacity(monodromy.ns.len());
    let mut all_ok = true;
    for (k, n_k) in monodromy.ns.iter().enumerate() {
        let mut gen = vec![Q::zero(); algebra.dim()];
        gen[algebra.generators[k]] = -Q::one();
        let cup = b.mul(&mult_matrix(algebra, &gen)).mul(&b_inv);
        let aligned = s_mat.mul(&cup).mul(&s_mat);
        let residual = mat_sub(n_k, &aligned);
        let ok = mat_is_zero(&residual);
        all_ok &= ok;
        checks.push(MirrorCheck {
            k,
            ok,
            residual: if ok { None } else { Some(residual) },
        });
    }
    MirrorReport { checks, all_ok }
}

// ---------------------------------------------------------------------------
// Central charge
// ---------------------------------------------------------------------------

/// The central-charge series `Z(E) = ∫ ch(E) · w₀(x, Ĵ) · (1 + c₂/12)`,
/// expressed through the 𝓑-expansion as `Σ_a (∫ ch(E)·𝓑_a·Todd) · Π_a`.
pub fn central_charge(
    ch_e: &[Q],
    pv: &PeriodVector,
    basis: &SymplecticBasis,
) -> Result<LogSeries> {
    let algebra = &basis.ring.algebra;
    if ch_e.len() != algebra.dim() {
        return Err(Error::RingMismatch {
            reason: "ch(E) must have one coordinate per basis element".to_string(),
        });
    }
    if pv.dim() != basis.dim() {
        return Err(Error::RingMismatch {
            reason: "period vector and basis have different sizes".to_string(),
        });
    }
    let mut out = LogSeries::zero(pv.pi0().nvars, pv.pi0().trunc.clone());
    for (a, elem) in basis.elements.iter().enumerate() {
        let c = todd_integral(&basis.ring, ch_e, elem)?;
        if !c.is_zero() {
            out = out.add(&pv.entries[a].scale_q(&c));
        }
    }
    Ok(out)
}
