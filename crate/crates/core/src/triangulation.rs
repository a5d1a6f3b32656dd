//! Regular triangulations of point configurations and their secondary-fan
//! combinatorics: placing seeds, circuit (bistellar) flips, exact LP
//! regularity certificates, GKZ vectors, the secondary polytope in kernel
//! coordinates, and local chart bases at distinguished vertices.

use crate::config::{kernel_lattice, PointConfiguration};
use crate::error::Error;
use crate::linalg::{QMat, ZMat};
use crate::lp::{maximize, LpOutcome, Rel, VarMode};
use crate::num::{primitive_integer_vector, Q, Z};
use crate::polytope::affine_lattice_coords;
use crate::Result;
use num::{Integer, One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// Environment variable raising the column guard for enumeration.
pub const MAX_COLUMNS_ENV: &str = "TORICMIRROR_MAX_COLUMNS";
const DEFAULT_MAX_COLUMNS: usize = 16;

/// A triangulation of a configuration: canonically sorted simplices given
/// as sorted column-index sets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Triangulation {
    pub simplices: Vec<Vec<usize>>,
}

impl Triangulation {
    pub fn new(mut simplices: Vec<Vec<usize>>) -> Self {
        for s in simplices.iter_mut() {
            s.sort_unstable();
        }
        simplices.sort();
        simplices.dedup();
        Triangulation { simplices }
    }

    /// Column indices used by at least one simplex.
    pub fn used_columns(&self) -> BTreeSet<usize> {
        self.simplices.iter().flatten().copied().collect()
    }
}

/// Outcome of the exact regularity test.
#[derive(Clone, Debug)]
pub enum Regularity {
    /// Witness heights: lifting the columns by these heights has the given
    /// triangulation as its strictly-lower hull.
    Regular { heights: Vec<Q> },
    /// Gordan-type infeasibility witness: a nonzero, nonnegative combination
    /// of the fold rows (ordered by simplex index, then by excluded column)
    /// that sums to zero, so no strict height vector can exist.
    NotRegular { dependence: Vec<Q> },
}

impl Regularity {
    pub fn is_regular(&self) -> bool {
        matches!(self, Regularity::Regular { .. })
    }
}

/// Full-dimensional coordinates of the configuration columns on their
/// common affine hyperplane (exact lattice reduction).
pub fn reduced_points(config: &PointConfiguration) -> Vec<Vec<Z>> {
    let (_, _, reduced) = affine_lattice_coords(&config.columns);
    reduced
}

fn dot_z(a: &[Z], b: &[Z]) -> Z {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Normalized volume of a simplex (|det| of its edge vectors with respect
/// to the affine lattice of the configuration).
pub fn normalized_volume(config: &PointConfiguration, simplex: &[usize]) -> Result<Z> {
    let pts = reduced_points(config);
    let d = pts[0].len();
    if simplex.len() != d + 1 {
        return Err(Error::InvalidInput(format!(
            "simplex has {} vertices, expected {}",
            simplex.len(),
            d + 1
        )));
    }
    for &i in simplex {
        if i >= pts.len() {
            return Err(Error::InvalidInput(format!("column index {i} out of range")));
        }
    }
    Ok(simplex_volume(&pts, simplex))
}

fn simplex_volume(pts: &[Vec<Z>], simplex: &[usize]) -> Z {
    let d = pts[0].len();
    let base = &pts[simplex[0]];
    let rows: Vec<Vec<Z>> = simplex[1..]
        .iter()
        .map(|&i| pts[i].iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    debug_assert_eq!(rows.len(), d);
    let det = ZMat::from_z_rows(rows).det();
    if det.is_negative() {
        -det
    } else {
        det
    }
}

/// Primitive affine dependence among the columns indexed by `subset`
/// (which must have exactly one more element than its affine rank).
fn unique_dependence(pts: &[Vec<Z>], subset: &[usize]) -> Vec<Z> {
    // Homogenise: rows (1, pt); kernel of the transposed matrix.
    let rows: Vec<Vec<Z>> = subset
        .iter()
        .map(|&i| {
            let mut r = Vec::with_capacity(pts[i].len() + 1);
            r.push(Z::one());
            r.extend(pts[i].iter().cloned());
            r
        })
        .collect();
    let m = ZMat::from_z_rows(rows).transpose();
    let ker = m.kernel_rows();
    assert_eq!(ker.rows, 1, "subset does not carry a unique dependence");
    ker.row_vec(0)
}

/// Orientation data for a boundary facet during placing construction.
fn facet_inequality(pts: &[Vec<Z>], facet: &[usize], inside: &[Q]) -> (Vec<Z>, Z) {
    let d = pts[0].len();
    // Normal orthogonal to the facet's edge vectors.
    let (mut normal, mut rhs) = if d == 1 {
        (vec![Z::one()], pts[facet[0]][0].clone())
    } else {
        let base = &pts[facet[0]];
        let diffs: Vec<Vec<Z>> = facet[1..]
            .iter()
            .map(|&i| pts[i].iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        let mut normal = Vec::with_capacity(d);
        for j in 0..d {
            let minor: Vec<Vec<Z>> = diffs
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let det = ZMat::from_z_rows(minor).det();
            normal.push(if j % 2 == 0 { det } else { -det });
        }
        let nq: Vec<Q> = normal.iter().map(|x| Q::from_integer(x.clone())).collect();
        let a = primitive_integer_vector(&nq).expect("facet spans a hyperplane");
        let rhs = dot_z(&a, base);
        (a, rhs)
    };
    // Orient away from the inside reference point.
    let val: Q = normal
        .iter()
        .zip(inside)
        .map(|(a, x)| Q::from_integer(a.clone()) * x)
        .sum();
    if val > Q::from_integer(rhs.clone()) {
        normal = normal.iter().map(|x| -x).collect();
        rhs = -rhs;
    }
    (normal, rhs)
}

/// Placing (pushing) triangulation: insert the columns in index order,
/// coning visible boundary facets to each new point.  Always regular.
pub fn placing_triangulation(config: &PointConfiguration) -> Result<Triangulation> {
    let pts = reduced_points(config);
    let d = pts[0].len();
    let p = pts.len();
    // Initial simplex: greedy lexicographic affinely independent set.
    let mut init = vec![0usize];
    for i in 1..p {
        if init.len() == d + 1 {
            break;
        }
        let mut cand: Vec<Vec<Z>> = init.iter().map(|&j| pts[j].clone()).collect();
        cand.push(pts[i].clone());
        if crate::linalg::affine_rank(&cand) == cand.len() - 1 {
            init.push(i);
        }
    }
    if init.len() < d + 1 {
        return Err(Error::NotFullDimensional { rank: init.len() - 1, dim: d });
    }
    let mut simplices: BTreeSet<Vec<usize>> = BTreeSet::new();
    simplices.insert(init.clone());
    for q in 0..p {
        if init.contains(&q) {
            continue;
        }
        // Boundary facets: d-subsets contained in exactly one simplex.
        let mut facet_owner: BTreeMap<Vec<usize>, Vec<Vec<usize>>> = BTreeMap::new();
        for s in &simplices {
            for drop in 0..s.len() {
                let mut f = s.clone();
                f.remove(drop);
                facet_owner.entry(f).or_default().push(s.clone());
            }
        }
        let mut added: Vec<Vec<usize>> = Vec::new();
        for (facet, owners) in &facet_owner {
            if owners.len() != 1 {
                continue;
            }
            // Interior reference: centroid of the owning simplex.
            let owner = &owners[0];
            let centroid: Vec<Q> = (0..d)
                .map(|c| {
                    let s: Z = owner.iter().map(|&i| pts[i][c].clone()).sum();
                    Q::new(s, Z::from(owner.len() as i64))
                })
                .collect();
            let (normal, rhs) = facet_inequality(&pts, facet, &centroid);
            if dot_z(&normal, &pts[q]) > rhs {
                let mut s = facet.clone();
                s.push(q);
                s.sort_unstable();
                added.push(s);
            }
        }
        for s in added {
            simplices.insert(s);
        }
    }
    Ok(Triangulation::new(simplices.into_iter().collect()))
}

/// Exact regularity test with replayable certificates.
pub fn is_regular(config: &PointConfiguration, t: &Triangulation) -> Result<Regularity> {
    let pts = reduced_points(config);
    let rows = fold_rows(&pts, t);
    let p = pts.len();
    // Primal: maximize delta subject to <g, w> >= delta, delta <= 1.
    let mut cons: Vec<(Vec<Q>, Rel, Q)> = Vec::new();
    for g in &rows {
        let mut row: Vec<Q> = g.clone();
        row.push(-Q::one()); // -delta
        cons.push((row, Rel::Ge, Q::zero()));
    }
    let mut bound = vec![Q::zero(); p];
    bound.push(Q::one());
    cons.push((bound, Rel::Le, Q::one()));
    let mut obj = vec![Q::zero(); p];
    obj.push(Q::one());
    match maximize(&obj, &cons, VarMode::Free) {
        LpOutcome::Optimal { value, point } if value > Q::zero() => {
            Ok(Regularity::Regular { heights: point[..p].to_vec() })
        }
        LpOutcome::Unbounded => unreachable!("delta is bounded by 1"),
        _ => {
            // Gordan alternative: y >= 0, sum y = 1, G^T y = 0.
            let m = rows.len();
            let mut cons: Vec<(Vec<Q>, Rel, Q)> = Vec::new();
            cons.push((vec![Q::one(); m], Rel::Eq, Q::one()));
            for c in 0..p {
                let row: Vec<Q> = rows.iter().map(|g| g[c].clone()).collect();
                cons.push((row, Rel::Eq, Q::zero()));
            }
            match maximize(&vec![Q::zero(); m], &cons, VarMode::NonNegative) {
                LpOutcome::Optimal { point, .. } => {
                    Ok(Regularity::NotRegular { dependence: point })
                }
                _ => unreachable!("Gordan alternative must be feasible"),
            }
        }
    }
}

/// Fold rows `g` of the regularity system: for every simplex `s` and every
/// column `q` not in `s`, the row of `w_q - phi_s(q)` as a linear form in
/// the height vector `w`.  Row order: by simplex (in the triangulation's
/// canonical order), then by `q` increasing.
pub fn fold_rows(pts: &[Vec<Z>], t: &Triangulation) -> Vec<Vec<Q>> {
    let p = pts.len();
    let d = pts[0].len();
    let mut rows = Vec::new();
    for s in &t.simplices {
        // Barycentric solve matrix: columns are (1; pt_i) for i in s.
        let mut cols: Vec<Vec<Q>> = Vec::new();
        for &i in s {
            let mut c = Vec::with_capacity(d + 1);
            c.push(Q::one());
            c.extend(pts[i].iter().map(|x| Q::from_integer(x.clone())));
            cols.push(c);
        }
        let m = QMat::from_rows(cols).transpose();
        let minv = m.inverse().expect("simplex matrix invertible");
        for q in 0..p {
            if s.contains(&q) {
                continue;
            }
            let mut rhs = Vec::with_capacity(d + 1);
            rhs.push(Q::one());
            rhs.extend(pts[q].iter().map(|x| Q::from_integer(x.clone())));
            let bary = minv.mul_vec(&rhs);
            let mut g = vec![Q::zero(); p];
            g[q] = Q::one();
            for (idx, &i) in s.iter().enumerate() {
                g[i] -= bary[idx].clone();
            }
            rows.push(g);
        }
    }
    rows
}

/// All circuit flips of a triangulation (regularity not filtered).
fn find_flips(pts: &[Vec<Z>], t: &Triangulation) -> Vec<Triangulation> {
    let p = pts.len();
    let current: BTreeSet<Vec<usize>> = t.simplices.iter().cloned().collect();
    let mut results: BTreeSet<Triangulation> = BTreeSet::new();
    let mut seen_circuits: BTreeSet<(Vec<usize>, Vec<usize>)> = BTreeSet::new();
    for s in &t.simplices {
        for q in 0..p {
            if s.contains(&q) {
                continue;
            }
            let mut u = s.clone();
            u.push(q);
            u.sort_unstable();
            let lambda = unique_dependence(pts, &u);
            // Normalise: the coefficient of q positive.
            let qpos = u.iter().position(|&i| i == q).unwrap();
            if lambda[qpos].is_zero() {
                continue; // q is affinely independent from s minus something
            }
            let lambda: Vec<Z> = if lambda[qpos].is_negative() {
                lambda.iter().map(|x| -x).collect()
            } else {
                lambda
            };
            let z_plus: Vec<usize> = u
                .iter()
                .enumerate()
                .filter(|&(k, _)| lambda[k].is_positive())
                .map(|(_, &i)| i)
                .collect();
            let z_minus: Vec<usize> = u
                .iter()
                .enumerate()
                .filter(|&(k, _)| lambda[k].is_negative())
                .map(|(_, &i)| i)
                .collect();
            if !seen_circuits.insert((z_plus.clone(), z_minus.clone())) {
                continue;
            }
            // The triangulation is locally on the positive side (each
            // simplex omits one element of z_plus).  Gather links.
            let mut links: Vec<BTreeSet<Vec<usize>>> = Vec::new();
            let mut ok = true;
            for &j in &z_plus {
                let base: Vec<usize> =
                    z_plus.iter().chain(&z_minus).filter(|&&i| i != j).copied().collect();
                let base: BTreeSet<usize> = base.into_iter().collect();
                let mut lset: BTreeSet<Vec<usize>> = BTreeSet::new();
                for simp in &current {
                    let sset: BTreeSet<usize> = simp.iter().copied().collect();
                    if base.is_subset(&sset) {
                        let link: Vec<usize> = sset.difference(&base).copied().collect();
                        lset.insert(link);
                    }
                }
                if lset.is_empty() {
                    ok = false;
                    break;
                }
                links.push(lset);
            }
            if !ok || links.iter().any(|l| *l != links[0]) {
                continue;
            }
            let link_family = &links[0];
            // Build the flipped triangulation.
            let mut new_simplices = current.clone();
            for &j in &z_plus {
                let base: BTreeSet<usize> = z_plus
                    .iter()
                    .chain(&z_minus)
                    .filter(|&&i| i != j)
                    .copied()
                    .collect();
                for link in link_family {
                    let mut simp: Vec<usize> =
                        base.iter().copied().chain(link.iter().copied()).collect();
                    simp.sort_unstable();
                    new_simplices.remove(&simp);
                }
            }
            for &k in &z_minus {
                let base: BTreeSet<usize> = z_plus
                    .iter()
                    .chain(&z_minus)
                    .filter(|&&i| i != k)
                    .copied()
                    .collect();
                for link in link_family {
                    let mut simp: Vec<usize> =
                        base.iter().copied().chain(link.iter().copied()).collect();
                    simp.sort_unstable();
                    new_simplices.insert(simp);
                }
            }
            let flipped = Triangulation::new(new_simplices.into_iter().collect());
            if flipped != *t {
                // Volume is preserved by a genuine flip.
                debug_assert_eq!(
                    total_volume(pts, t),
                    total_volume(pts, &flipped),
                    "flip changed total volume"
                );
                results.insert(flipped);
            }
        }
    }
    results.into_iter().collect()
}

fn total_volume(pts: &[Vec<Z>], t: &Triangulation) -> Z {
    t.simplices.iter().map(|s| simplex_volume(pts, s)).sum()
}

/// Enumerate all regular triangulations by breadth-first circuit flips from
/// the placing seed (the flip graph restricted to regular triangulations is
/// the edge graph of the secondary polytope, hence connected).
pub fn enumerate_regular_triangulations(
    config: &PointConfiguration,
) -> Result<Vec<Triangulation>> {
    let limit = std::env::var(MAX_COLUMNS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(DEFAULT_MAX_COLUMNS);
    if config.num_columns() > limit {
        return Err(Error::ScaleGuard {
            what: format!("configuration with {} columns", config.num_columns()),
            limit,
            env_var: MAX_COLUMNS_ENV.into(),
        });
    }
    let pts = reduced_points(config);
    let seed = placing_triangulation(config)?;
    debug_assert!(is_regular(config, &seed)?.is_regular(), "placing seed must be regular");
    let mut seen: BTreeSet<Triangulation> = BTreeSet::new();
    let mut regular: BTreeSet<Triangulation> = BTreeSet::new();
    let mut queue = std::collections::VecDeque::new();
    seen.insert(seed.clone());
    regular.insert(seed.clone());
    queue.push_back(seed);
    while let Some(t) = queue.pop_front() {
        for next in find_flips(&pts, &t) {
            if seen.insert(next.clone()) && is_regular(config, &next)?.is_regular() {
                regular.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(regular.into_iter().collect())
}

/// GKZ vector: for each column, the total normalized volume of the
/// simplices containing it.
pub fn gkz_vector(config: &PointConfiguration, t: &Triangulation) -> Result<Vec<Z>> {
    let pts = reduced_points(config);
    let mut v = vec![Z::zero(); pts.len()];
    for s in &t.simplices {
        let vol = simplex_volume(&pts, s);
        for &i in s {
            v[i] += &vol;
        }
    }
    Ok(v)
}

/// Secondary polytope data: the convex hull of the GKZ vectors expressed in
/// kernel coordinates (pairing each GKZ vector with the canonical kernel
/// basis rows), together with the triangulation attached to every vertex.
#[derive(Debug)]
pub struct SecondaryPolytope {
    pub polytope: crate::polytope::LatticePolytope,
    /// For each vertex (in the polytope's canonical vertex order), the index
    /// into the input triangulation list.
    pub vertex_triangulations: Vec<usize>,
}

pub fn secondary_polytope(
    config: &PointConfiguration,
    triangulations: &[Triangulation],
) -> Result<SecondaryPolytope> {
    if triangulations.is_empty() {
        return Err(Error::InvalidInput("no triangulations given".into()));
    }
    let kernel = kernel_lattice(config)?;
    let rank = kernel.rank();
    let mut coords = Vec::with_capacity(triangulations.len());
    for t in triangulations {
        let v = gkz_vector(config, t)?;
        let c: Vec<Z> = kernel.basis.iter().map(|row| dot_z(row, &v)).collect();
        coords.push(c);
    }
    let polytope = crate::polytope::LatticePolytope::new(rank, coords.clone())?;
    if !polytope.is_full_dimensional() {
        return Err(Error::NotFullDimensional { rank: polytope.dim(), dim: rank });
    }
    let mut vertex_triangulations = Vec::with_capacity(polytope.vertices().len());
    for v in polytope.vertices() {
        let idx = coords
            .iter()
            .position(|c| c == v)
            .ok_or_else(|| Error::InvalidInput("vertex not among GKZ images".into()))?;
        vertex_triangulations.push(idx);
    }
    Ok(SecondaryPolytope { polytope, vertex_triangulations })
}

/// A triangulation is maximal (distinguished for the series construction)
/// when it uses every column and every simplex contains all origin columns.
pub fn is_maximal(config: &PointConfiguration, t: &Triangulation) -> bool {
    let all: BTreeSet<usize> = (0..config.num_columns()).collect();
    if t.used_columns() != all {
        return false;
    }
    t.simplices
        .iter()
        .all(|s| config.origin_columns().all(|k| s.contains(&k)))
}

/// Local chart at a distinguished triangulation: the primitive extreme
/// generators of the secondary (tangent) cone, expressed in the kernel
/// lattice, with the sign convention and coordinate monomials attached.
#[derive(Clone, Debug)]
pub struct ChartBasis {
    /// Basis vectors `l^(k)` as elements of the kernel inside Z^p.
    pub vectors: Vec<Vec<Z>>,
    /// Coordinate signs `(-1)^(origin sum of l^(k))`.
    pub signs: Vec<i32>,
    /// Rendered coordinate monomials `x_k = sign * a^{l^(k)}`.
    pub monomials: Vec<String>,
}

pub fn chart_basis(
    config: &PointConfiguration,
    triangulations: &[Triangulation],
    base_index: usize,
) -> Result<ChartBasis> {
    if base_index >= triangulations.len() {
        return Err(Error::InvalidInput("base triangulation index out of range".into()));
    }
    let kernel = kernel_lattice(config)?;
    let rank = kernel.rank();
    let v0 = gkz_vector(config, &triangulations[base_index])?;
    // Tangent-cone generators: differences of GKZ vectors, in kernel coords.
    let basis_q = QMat::from_rows(
        kernel
            .basis
            .iter()
            .map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect())
            .collect::<Vec<_>>(),
    )
    .transpose(); // p x rank
    let a = config.a_matrix();
    // Primitive kernel coordinates of a GKZ difference (integral by
    // saturation).
    let primitive_coords = |diff: &[Z]| -> Result<Option<Vec<Z>>> {
        debug_assert!(
            a.mul_vec(diff).iter().all(|x| x.is_zero()),
            "GKZ difference not in the kernel"
        );
        let rhs: Vec<Q> = diff.iter().map(|x| Q::from_integer(x.clone())).collect();
        let sol = basis_q.solve(&rhs).ok_or_else(|| {
            Error::InvalidInput("GKZ difference outside the kernel lattice".into())
        })?;
        let coords: Vec<Q> = sol
            .iter()
            .map(|x| {
                debug_assert!(x.denom().is_one());
                x.clone()
            })
            .collect();
        Ok(primitive_integer_vector(&coords))
    };
    let mut gens: BTreeSet<Vec<Z>> = BTreeSet::new();
    for (i, t) in triangulations.iter().enumerate() {
        if i == base_index {
            continue;
        }
        let v = gkz_vector(config, t)?;
        let diff: Vec<Z> = v.iter().zip(&v0).map(|(a, b)| a - b).collect();
        if let Some(prim) = primitive_coords(&diff)? {
            gens.insert(prim);
        }
    }
    let gens: Vec<Vec<Z>> = gens.into_iter().collect();
    // Feasibility of `target ∈ cone(pool)`.
    let in_cone = |target: &[Z], pool: &[&Vec<Z>]| -> bool {
        if pool.is_empty() {
            return false;
        }
        let mut cons: Vec<(Vec<Q>, Rel, Q)> = Vec::new();
        for c in 0..rank {
            let row: Vec<Q> = pool.iter().map(|o| Q::from_integer(o[c].clone())).collect();
            cons.push((row, Rel::Eq, Q::from_integer(target[c].clone())));
        }
        matches!(
            maximize(&vec![Q::zero(); pool.len()], &cons, VarMode::NonNegative),
            LpOutcome::Optimal { .. }
        )
    };
    // Fast path: edges of the secondary polytope at a vertex join it to its
    // regular flip neighbours, so when differences to those neighbours span
    // every other difference, extreme rays can be read off that small set.
    // Verified exactly here, with the full generator set as fallback.
    let pts = reduced_points(config);
    let mut neighbor_dirs: BTreeSet<Vec<Z>> = BTreeSet::new();
    for next in find_flips(&pts, &triangulations[base_index]) {
        if !is_regular(config, &next)?.is_regular() {
            continue;
        }
        let v = gkz_vector(config, &next)?;
        let diff: Vec<Z> = v.iter().zip(&v0).map(|(a, b)| a - b).collect();
        if let Some(prim) = primitive_coords(&diff)? {
            neighbor_dirs.insert(prim);
        }
    }
    let candidates: Vec<Vec<Z>> =
        gens.iter().filter(|g| neighbor_dirs.contains(*g)).cloned().collect();
    let candidate_refs: Vec<&Vec<Z>> = candidates.iter().collect();
    let fast_ok = !candidates.is_empty()
        && gens
            .iter()
            .all(|g| neighbor_dirs.contains(g) || in_cone(g, &candidate_refs));
    let pool: &[Vec<Z>] = if fast_ok { &candidates } else { &gens };
    // Extreme rays: a generator is extreme iff it is not a nonnegative
    // combination of the others.
    let mut extreme: Vec<Vec<Z>> = Vec::new();
    for (i, g) in pool.iter().enumerate() {
        let others: Vec<&Vec<Z>> =
            pool.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, o)| o).collect();
        if others.is_empty() {
            extreme.push(g.clone());
            continue;
        }
        if !in_cone(g, &others) {
            extreme.push(g.clone());
        }
    }
    if extreme.len() != rank {
        return Err(Error::NonSimplicialChart { generators: extreme.len(), rank });
    }
    let det = ZMat::from_z_rows(extreme.clone()).det();
    if !det.clone().abs().is_one() {
        return Err(Error::NonUnimodularChart { index: det.abs().to_string() });
    }
    // Map back to Z^p and attach signs and monomials.
    let mut vectors = Vec::with_capacity(rank);
    for coords in &extreme {
        let mut v = vec![Z::zero(); config.num_columns()];
        for (k, c) in coords.iter().enumerate() {
            for (j, item) in v.iter_mut().enumerate() {
                *item += c * &kernel.basis[k][j];
            }
        }
        vectors.push(v);
    }
    vectors.sort();
    let signs: Vec<i32> = vectors
        .iter()
        .map(|v| {
            let s: Z = v[..config.r].iter().sum();
            if s.is_odd() {
                -1
            } else {
                1
            }
        })
        .collect();
    let monomials: Vec<String> = vectors
        .iter()
        .zip(&signs)
        .map(|(v, &s)| render_monomial(config, v, s))
        .collect();
    Ok(ChartBasis { vectors, signs, monomials })
}

/// Render `sign * prod a_j^{v_j}` as `[-]num/den` in the column labels.
pub(crate) fn render_monomial(config: &PointConfiguration, v: &[Z], sign: i32) -> String {
    let mut num: Vec<String> = Vec::new();
    let mut den: Vec<String> = Vec::new();
    for (j, e) in v.iter().enumerate() {
        if e.is_zero() {
            continue;
        }
        let label = &config.labels[j];
        let a = e.clone().abs();
        let factor = if a.is_one() { label.clone() } else { format!("{label}^{a}") };
        if e.is_positive() {
            num.push(factor);
        } else {
            den.push(factor);
        }
    }
    let num_str = if num.is_empty() { "1".to_string() } else { num.join("*") };
    let mut out = String::new();
    if sign < 0 {
        out.push('-');
    }
    out.push_str(&num_str);
    if !den.is_empty() {
        out.push('/');
        if den.len() == 1 {
            out.push_str(&den[0]);
        } else {
            out.push('(');
            out.push_str(&den.join("*"));
            out.push(')');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{build_explicit_config, build_hypersurface_config};
    use crate::num::z;
    use crate::polytope::LatticePolytope;

    fn zp(v: &[i64]) -> Vec<Z> {
        v.iter().map(|&x| z(x)).collect()
    }

    fn quintic_config() -> PointConfiguration {
        let ds = LatticePolytope::new(
            4,
            vec![
                zp(&[1, 0, 0, 0]),
                zp(&[0, 1, 0, 0]),
                zp(&[0, 0, 1, 0]),
                zp(&[0, 0, 0, 1]),
                zp(&[-1, -1, -1, -1]),
            ],
        )
        .unwrap();
        build_hypersurface_config(&ds).unwrap()
    }

    fn square_config() -> PointConfiguration {
        build_explicit_config(
            1,
            vec![zp(&[1, 0, 0]), zp(&[1, 0, 1]), zp(&[1, 1, 0]), zp(&[1, 1, 1])],
            None,
        )
        .unwrap()
    }

    fn weierstrass_config() -> PointConfiguration {
        let t = LatticePolytope::new(2, vec![zp(&[-1, -1]), zp(&[0, 1]), zp(&[3, 1])]).unwrap();
        build_hypersurface_config(&t).unwrap()
    }

    fn segment_config() -> PointConfiguration {
        build_explicit_config(1, vec![zp(&[1, 0]), zp(&[1, 1]), zp(&[1, 2])], None).unwrap()
    }

    /// Brute-force triangulation enumeration for tiny configurations:
    /// all collections of full-dimensional simplices with pairwise disjoint
    /// interiors whose volumes sum to the total volume.
    fn brute_force_triangulations(config: &PointConfiguration) -> Vec<Triangulation> {
        let pts = reduced_points(config);
        let d = pts[0].len();
        let p = pts.len();
        let total = total_volume(&pts, &placing_triangulation(config).unwrap());
        // Candidate simplices.
        use itertools::Itertools;
        let cands: Vec<(Vec<usize>, Z)> = (0..p)
            .combinations(d + 1)
            .filter_map(|idx| {
                let vol = simplex_volume(&pts, &idx);
                if vol.is_zero() {
                    None
                } else {
                    Some((idx, vol))
                }
            })
            .collect();
        fn interiors_overlap(pts: &[Vec<Z>], a: &[usize], b: &[usize]) -> bool {
            // Shared relative-interior point: barycentric coords >= delta in
            // both simplices, maximize delta.
            let d = pts[0].len();
            let na = a.len();
            let nb = b.len();
            let nvars = na + nb + 1; // lambdas, mus, delta
            let mut cons: Vec<(Vec<Q>, Rel, Q)> = Vec::new();
            let mut row = vec![Q::zero(); nvars];
            for item in row.iter_mut().take(na) {
                *item = Q::one();
            }
            cons.push((row, Rel::Eq, Q::one()));
            let mut row = vec![Q::zero(); nvars];
            for item in row.iter_mut().skip(na).take(nb) {
                *item = Q::one();
            }
            cons.push((row, Rel::Eq, Q::one()));
            for c in 0..d {
                let mut row = vec![Q::zero(); nvars];
                for (k, &i) in a.iter().enumerate() {
                    row[k] = Q::from_integer(pts[i][c].clone());
                }
                for (k, &i) in b.iter().enumerate() {
                    row[na + k] = -Q::from_integer(pts[i][c].clone());
                }
                cons.push((row, Rel::Eq, Q::zero()));
            }
            // lambda_i - delta >= 0, mu_j - delta >= 0.
            for k in 0..na + nb {
                let mut row = vec![Q::zero(); nvars];
                row[k] = Q::one();
                row[na + nb] = -Q::one();
                cons.push((row, Rel::Ge, Q::zero()));
            }
            let mut obj = vec![Q::zero(); nvars];
            obj[na + nb] = Q::one();
            let mut row = vec![Q::zero(); nvars];
            row[na + nb] = Q::one();
            cons.push((row, Rel::Le, Q::one()));
            matches!(
                maximize(&obj, &cons, VarMode::NonNegative),
                LpOutcome::Optimal { value, .. } if value > Q::zero()
            )
        }
        let mut out: Vec<Triangulation> = Vec::new();
        let mut chosen: Vec<usize> = Vec::new();
        fn rec(
            pts: &[Vec<Z>],
            cands: &[(Vec<usize>, Z)],
            start: usize,
            chosen: &mut Vec<usize>,
            acc: Z,
            total: &Z,
            out: &mut Vec<Triangulation>,
        ) {
            if acc == *total {
                out.push(Triangulation::new(
                    chosen.iter().map(|&i| cands[i].0.clone()).collect(),
                ));
                return;
            }
            for i in start..cands.len() {
                let vol = acc.clone() + &cands[i].1;
                if vol > *total {
                    continue;
                }
                let ok = chosen
                    .iter()
                    .all(|&j| !interiors_overlap(pts, &cands[j].0, &cands[i].0));
                if ok {
                    chosen.push(i);
                    rec(pts, cands, i + 1, chosen, vol, total, out);
                    chosen.pop();
                }
            }
        }
        rec(&pts, &cands, 0, &mut chosen, Z::zero(), &total, &mut out);
        out.sort();
        out
    }

    #[test]
    fn quintic_two_triangulations() {
        let cfg = quintic_config();
        let ts = enumerate_regular_triangulations(&cfg).unwrap();
        assert_eq!(ts.len(), 2);
        assert_eq!(ts, brute_force_triangulations(&cfg));
        let star = ts.iter().find(|t| is_maximal(&cfg, t)).expect("star triangulation");
        let big = ts.iter().find(|t| !is_maximal(&cfg, t)).unwrap();
        assert_eq!(star.simplices.len(), 5);
        assert_eq!(big.simplices.len(), 1);
        assert_eq!(gkz_vector(&cfg, star).unwrap(), zp(&[5, 4, 4, 4, 4, 4]));
        assert_eq!(gkz_vector(&cfg, big).unwrap(), zp(&[0, 5, 5, 5, 5, 5]));
    }

    #[test]
    fn quintic_chart() {
        let cfg = quintic_config();
        let ts = enumerate_regular_triangulations(&cfg).unwrap();
        let star_idx = ts.iter().position(|t| is_maximal(&cfg, t)).unwrap();
        let chart = chart_basis(&cfg, &ts, star_idx).unwrap();
        assert_eq!(chart.vectors, vec![zp(&[-5, 1, 1, 1, 1, 1])]);
        assert_eq!(chart.signs, vec![-1]);
        assert_eq!(chart.monomials, vec!["-a1*a2*a3*a4*a5/a0^5".to_string()]);
    }

    #[test]
    fn square_triangulations_and_secondary_segment() {
        let cfg = square_config();
        let ts = enumerate_regular_triangulations(&cfg).unwrap();
        assert_eq!(ts.len(), 2);
        assert_eq!(ts, brute_force_triangulations(&cfg));
        let gkzs: Vec<Vec<Z>> =
            ts.iter().map(|t| gkz_vector(&cfg, t).unwrap()).collect();
        assert!(gkzs.contains(&zp(&[2, 1, 1, 2])));
        assert!(gkzs.contains(&zp(&[1, 2, 2, 1])));
        let sec = secondary_polytope(&cfg, &ts).unwrap();
        assert_eq!(sec.polytope.rank(), 1);
        assert_eq!(sec.polytope.vertices(), &[zp(&[-2]), zp(&[2])]);
        // The diagonal through the origin column is the maximal one.
        let max: Vec<bool> = ts.iter().map(|t| is_maximal(&cfg, t)).collect();
        assert_eq!(max.iter().filter(|&&b| b).count(), 1);
        let star_idx = max.iter().position(|&b| b).unwrap();
        let chart = chart_basis(&cfg, &ts, star_idx).unwrap();
        assert_eq!(chart.vectors, vec![zp(&[-1, 1, 1, -1])]);
        assert_eq!(chart.signs, vec![-1]);
        assert_eq!(chart.monomials, vec!["-a1*a2/(a0*a3)".to_string()]);
    }

    #[test]
    fn square_regularity_certificates_replay() {
        let cfg = square_config();
        let pts = reduced_points(&cfg);
        let ts = enumerate_regular_triangulations(&cfg).unwrap();
        for t in &ts {
            match is_regular(&cfg, t).unwrap() {
                Regularity::Regular { heights } => {
                    // Replay: every fold row must be strictly positive.
                    for g in fold_rows(&pts, t) {
                        let v: Q = g.iter().zip(&heights).map(|(a, w)| a * w).sum();
                        assert!(v > Q::zero(), "certificate replay failed");
                    }
                }
                Regularity::NotRegular { .. } => panic!("enumerated T must be regular"),
            }
        }
    }

    #[test]
    fn weierstrass_star_and_chart() {
        let cfg = weierstrass_config();
        let ts = enumerate_regular_triangulations(&cfg).unwrap();
        assert_eq!(ts.len(), 2);
        assert_eq!(ts, brute_force_triangulations(&cfg));
        let star_idx = ts.iter().position(|t| is_maximal(&cfg, t)).unwrap();
        let star = &ts[star_idx];
        let mut vols: Vec<Z> = star
            .simplices
            .iter()
            .map(|s| normalized_volume(&cfg, s).unwrap())
            .collect();
        vols.sort();
        assert_eq!(vols, zp(&[1, 2, 3]));
        assert_eq!(gkz_vector(&cfg, star).unwrap(), zp(&[6, 3, 4, 5]));
        let chart = chart_basis(&cfg, &ts, star_idx).unwrap();
        assert_eq!(chart.vectors, vec![zp(&[-6, 3, 2, 1])]);
        assert_eq!(chart.signs, vec![1]);
        assert_eq!(chart.monomials, vec!["a1^3*a2^2*a3/a0^6".to_string()]);
    }

    #[test]
    fn segment_three_points() {
        let cfg = segment_config();
        let ts = enumerate_regular_triangulations(&cfg).unwrap();
        assert_eq!(ts.len(), 2);
        assert_eq!(ts, brute_force_triangulations(&cfg));
        let fine = ts.iter().position(|t| t.simplices.len() == 2).unwrap();
        let chart = chart_basis(&cfg, &ts, fine).unwrap();
        assert_eq!(chart.vectors, vec![zp(&[1, -2, 1])]);
        assert_eq!(chart.signs, vec![-1]);
        assert_eq!(chart.monomials, vec!["-a0*a2/a1^2".to_string()]);
    }

    #[test]
    fn pinwheel_is_not_regular() {
        // Two nested triangles with the classic pinwheel triangulation.
        let cfg = build_explicit_config(
            1,
            vec![
                zp(&[1, 0, 0]), // 0: outer A
                zp(&[1, 4, 0]), // 1: outer B
                zp(&[1, 0, 4]), // 2: outer C
                zp(&[1, 1, 1]), // 3: inner a
                zp(&[1, 2, 1]), // 4: inner b
                zp(&[1, 1, 2]), // 5: inner c
            ],
            None,
        )
        .unwrap();
        let pts = reduced_points(&cfg);
        let pinwheel = Triangulation::new(vec![
            vec![0, 1, 4],
            vec![1, 2, 5],
            vec![2, 0, 3],
            vec![0, 3, 4],
            vec![1, 4, 5],
            vec![2, 5, 3],
            vec![3, 4, 5],
        ]);
        assert_eq!(total_volume(&pts, &pinwheel), z(16));
        match is_regular(&cfg, &pinwheel).unwrap() {
            Regularity::NotRegular { dependence } => {
                // Replay the Gordan witness: y >= 0, y != 0, G^T y = 0.
                let rows = fold_rows(&pts, &pinwheel);
                assert_eq!(dependence.len(), rows.len());
                assert!(dependence.iter().all(|y| *y >= Q::zero()));
                assert!(dependence.iter().any(|y| *y > Q::zero()));
                for c in 0..pts.len() {
                    let s: Q = rows
                        .iter()
                        .zip(&dependence)
                        .map(|(g, y)| g[c].clone() * y)
                        .sum();
                    assert_eq!(s, Q::zero(), "Gordan witness does not annihilate column {c}");
                }
            }
            Regularity::Regular { .. } => panic!("pinwheel must not be regular"),
        }
        // The flip search from the pinwheel still reaches valid neighbours.
        let flips = find_flips(&pts, &pinwheel);
        assert!(!flips.is_empty());
    }

    #[test]
    fn scale_guard_trips() {
        let cols: Vec<Vec<Z>> = (0..17)
            .map(|j| {
                let mut c = vec![Z::one()];
                c.push(z(j));
                c.push(z(j * j));
                c
            })
            .collect();
        let cfg = build_explicit_config(1, cols, None).unwrap();
        match enumerate_regular_triangulations(&cfg) {
            Err(Error::ScaleGuard { limit, .. }) => assert_eq!(limit, 16),
            other => panic!("expected scale guard, got {other:?}"),
        }
    }
}
