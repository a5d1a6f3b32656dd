//! Lattice polytopes: hulls, face lattices, polar duality, reflexivity,
//! anticanonical Hodge numbers, and nef partitions.
//!
//! Conventions:
//! * facet inequalities are stored in inner form `<a, x> >= -c` with `a`
//!   primitive integral; for a reflexive polytope every `c` is 1 and the
//!   polar dual's vertices are exactly the facet normals `a`;
//! * vertex lists are lexicographically sorted, so every construction is
//!   deterministic;
//! * polytopes may be lower-dimensional (needed for nef-partition parts);
//!   operations that require full dimension say so and fail loudly.

use crate::error::Error;
use crate::linalg::{affine_rank, QMat, ZMat};
use crate::num::{primitive_integer_vector, Q, Z};
use crate::Result;
use num::{Integer, One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

/// Facet inequality `<normal, x> >= -rhs` (inner form, primitive normal).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacetIneq {
    pub normal: Vec<Z>,
    pub rhs: Z,
}

/// A face of a full-dimensional polytope.
#[derive(Clone, Debug)]
pub struct Face {
    /// Affine dimension of the face.
    pub dim: usize,
    /// Indices into the parent's vertex list.
    pub vertex_set: BTreeSet<usize>,
    /// Indices of the facets containing this face.
    pub facet_set: BTreeSet<usize>,
    /// Number of lattice points in the relative interior (l').
    pub interior_lattice_points: usize,
    /// For reflexive polytopes: index of the dual face in the polar dual's
    /// face lattice (dimension n - 1 - dim).
    pub dual_face: Option<usize>,
}

/// Face lattice of a full-dimensional polytope (proper nonempty faces only,
/// sorted by dimension then vertex set).
#[derive(Clone, Debug)]
pub struct FaceLattice {
    pub faces: Vec<Face>,
}

impl FaceLattice {
    pub fn faces_of_dim(&self, d: usize) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(move |f| f.dim == d)
    }
}

/// A lattice polytope (convex hull of finitely many integer points).
#[derive(Debug)]
pub struct LatticePolytope {
    rank: usize,
    dim: usize,
    vertices: Vec<Vec<Z>>,
    /// Facet inequalities; populated only when dim == rank.
    facets: Vec<FacetIneq>,
    lattice_points: OnceLock<Vec<Vec<Z>>>,
    face_lattice: OnceLock<FaceLattice>,
}

impl Clone for LatticePolytope {
    fn clone(&self) -> Self {
        LatticePolytope {
            rank: self.rank,
            dim: self.dim,
            vertices: self.vertices.clone(),
            facets: self.facets.clone(),
            lattice_points: OnceLock::new(),
            face_lattice: OnceLock::new(),
        }
    }
}

impl PartialEq for LatticePolytope {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.vertices == other.vertices
    }
}
impl Eq for LatticePolytope {}

fn lex_sorted(mut v: Vec<Vec<Z>>) -> Vec<Vec<Z>> {
    v.sort();
    v.dedup();
    v
}

fn dot(a: &[Z], b: &[Z]) -> Z {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dot_q(a: &[Z], b: &[Q]) -> Q {
    a.iter()
        .zip(b)
        .map(|(x, y)| Q::from_integer(x.clone()) * y)
        .sum()
}

/// Primitive integral normal of the hyperplane through `pts` (which must be
/// `n` affinely independent points in rank-`n` space, `n >= 2`), together
/// with its (integral) offset: `<a, p> = off` for all the points.
///
/// Computed as the generalized cross product of the difference vectors
/// (signed maximal minors, exact integer arithmetic).
fn hyperplane_through(pts: &[&[Z]], rank: usize) -> (Vec<Z>, Z) {
    assert!(rank >= 2 && pts.len() == rank);
    let base = pts[0];
    let diffs: Vec<Vec<Z>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let mut normal = Vec::with_capacity(rank);
    for j in 0..rank {
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
        let d = ZMat::from_z_rows(minor).det();
        normal.push(if j % 2 == 0 { d } else { -d });
    }
    assert!(normal.iter().any(|x| !x.is_zero()), "points do not span a hyperplane");
    let nq: Vec<Q> = normal.iter().map(|x| Q::from_integer(x.clone())).collect();
    let a = primitive_integer_vector(&nq).expect("nonzero normal");
    let off = dot(&a, base);
    (a, off)
}

/// Simplicial boundary facet used during incremental hull construction.
#[derive(Clone, Debug)]
struct SimpFacet {
    verts: Vec<usize>,
    /// Outward form: `<normal, x> <= rhs` on the hull.
    normal: Vec<Z>,
    rhs: Z,
}

/// Convex hull of full-dimensional integer point sets, by incremental
/// insertion with a triangulated boundary.  Returns (extreme point indices,
/// facet inequalities in inner form), both canonically sorted.
fn full_dim_hull(points: &[Vec<Z>], rank: usize) -> Result<(Vec<usize>, Vec<FacetIneq>)> {
    assert!(points.len() > rank);
    if rank == 1 {
        let min = points.iter().enumerate().min_by_key(|(_, p)| p[0].clone()).unwrap();
        let max = points.iter().enumerate().max_by_key(|(_, p)| p[0].clone()).unwrap();
        let mut facets = vec![
            FacetIneq { normal: vec![Z::one()], rhs: -min.1[0].clone() },
            FacetIneq { normal: vec![-Z::one()], rhs: max.1[0].clone() },
        ];
        facets.sort_by(|a, b| (&a.normal, &a.rhs).cmp(&(&b.normal, &b.rhs)));
        let mut vs = vec![min.0, max.0];
        vs.sort_unstable();
        return Ok((vs, facets));
    }

    // Initial simplex: greedily extend an affinely independent set.
    let mut simplex = vec![0usize];
    for i in 1..points.len() {
        if simplex.len() == rank + 1 {
            break;
        }
        let mut cand: Vec<Vec<Z>> = simplex.iter().map(|&j| points[j].clone()).collect();
        cand.push(points[i].clone());
        if affine_rank(&cand) == cand.len() - 1 {
            simplex.push(i);
        }
    }
    if simplex.len() < rank + 1 {
        return Err(Error::NotFullDimensional {
            rank: affine_rank(points),
            dim: rank,
        });
    }

    // Interior reference point: centroid of the initial simplex.
    let centroid: Vec<Q> = (0..rank)
        .map(|c| {
            let s: Z = simplex.iter().map(|&i| points[i][c].clone()).sum();
            Q::new(s, Z::from(simplex.len() as i64))
        })
        .collect();

    let orient = |verts: &[usize]| -> SimpFacet {
        let pts: Vec<&[Z]> = verts.iter().map(|&i| points[i].as_slice()).collect();
        let (mut a, mut off) = hyperplane_through(&pts, rank);
        let c = dot_q(&a, &centroid);
        debug_assert!(c != Q::from_integer(off.clone()), "centroid on facet hyperplane");
        if c > Q::from_integer(off.clone()) {
            a = a.iter().map(|x| -x).collect();
            off = -off;
        }
        let mut v = verts.to_vec();
        v.sort_unstable();
        SimpFacet { verts: v, normal: a, rhs: off }
    };

    let mut boundary: Vec<SimpFacet> = (0..=rank)
        .map(|drop| {
            let verts: Vec<usize> =
                simplex.iter().enumerate().filter(|&(k, _)| k != drop).map(|(_, &i)| i).collect();
            orient(&verts)
        })
        .collect();

    for q in 0..points.len() {
        if simplex.contains(&q) {
            continue;
        }
        let qp = &points[q];
        let visible: Vec<usize> = (0..boundary.len())
            .filter(|&f| dot(&boundary[f].normal, qp) > boundary[f].rhs)
            .collect();
        if visible.is_empty() {
            continue;
        }
        // Horizon ridges: ridges of visible facets seen exactly once.
        let mut ridge_count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for &f in &visible {
            for drop in 0..boundary[f].verts.len() {
                let mut r = boundary[f].verts.clone();
                r.remove(drop);
                *ridge_count.entry(r).or_insert(0) += 1;
            }
        }
        let mut new_facets = Vec::new();
        for (ridge, count) in ridge_count {
            if count == 1 {
                let mut verts = ridge;
                verts.push(q);
                new_facets.push(orient(&verts));
            }
        }
        let visible_set: BTreeSet<usize> = visible.into_iter().collect();
        let mut next: Vec<SimpFacet> = boundary
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !visible_set.contains(i))
            .map(|(_, f)| f)
            .collect();
        next.extend(new_facets);
        boundary = next;

        // Internal consistency: a closed triangulated boundary has every
        // ridge in exactly two facets.
        #[cfg(debug_assertions)]
        {
            let mut rc: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
            for f in &boundary {
                for drop in 0..f.verts.len() {
                    let mut r = f.verts.clone();
                    r.remove(drop);
                    *rc.entry(r).or_insert(0) += 1;
                }
            }
            debug_assert!(rc.values().all(|&c| c == 2), "boundary is not closed");
        }
    }

    // Merge simplicial facets into honest facets (outer form -> inner form).
    let mut facet_map: BTreeMap<(Vec<Z>, Z), ()> = BTreeMap::new();
    for f in &boundary {
        facet_map.insert((f.normal.clone(), f.rhs.clone()), ());
    }
    let facets: Vec<FacetIneq> = facet_map
        .into_keys()
        .map(|(outward, rhs)| FacetIneq {
            normal: outward.iter().map(|x| -x).collect(),
            rhs,
        })
        .collect();
    let mut facets = facets;
    facets.sort_by(|a, b| (&a.normal, &a.rhs).cmp(&(&b.normal, &b.rhs)));

    // Extreme points: tight facet normals span the ambient space.
    let mut extreme = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let tight: Vec<Vec<Z>> = facets
            .iter()
            .filter(|f| dot(&f.normal, p) == -f.rhs.clone())
            .map(|f| f.normal.clone())
            .collect();
        if !tight.is_empty() && ZMat::from_z_rows(tight).rank() == rank {
            extreme.push(i);
        }
    }
    Ok((extreme, facets))
}

/// Saturated lattice basis of the affine span of `points` (rows), together
/// with the reduced coordinates of every point with respect to that basis
/// and the base point.  The reduced points are full-dimensional in `Z^d`.
pub(crate) fn affine_lattice_coords(points: &[Vec<Z>]) -> (Vec<Z>, ZMat, Vec<Vec<Z>>) {
    let base = points[0].clone();
    let n = base.len();
    let diffs: Vec<Vec<Z>> = points
        .iter()
        .map(|p| p.iter().zip(&base).map(|(a, b)| a - b).collect())
        .collect();
    let d_mat = ZMat::from_z_rows(diffs.clone());
    // Saturation of the row span: integer kernel of the kernel.
    let ker = d_mat.kernel_rows(); // rows y with D y = 0 ... (columns of D)
    // Rows of `ker` span { y : <row_i, y> = 0 } -- i.e. the orthogonal
    // complement in the column space; the saturated row span is the integer
    // kernel of `ker` (viewed as a matrix acting on Z^n).
    let basis = if ker.rows == 0 {
        ZMat::identity(n)
    } else {
        ker.kernel_rows().hnf_rows()
    };
    let d = basis.rows;
    // Express each difference in the basis (guaranteed integral).
    let bq = basis.to_q().transpose(); // n x d
    let reduced: Vec<Vec<Z>> = diffs
        .iter()
        .map(|p| {
            let rhs: Vec<Q> = p.iter().map(|x| Q::from_integer(x.clone())).collect();
            let sol = bq.solve(&rhs).expect("difference lies in the affine span");
            debug_assert_eq!(sol.len(), d);
            sol.iter()
                .map(|x| {
                    debug_assert!(x.denom().is_one(), "saturated basis must give integer coords");
                    x.to_integer()
                })
                .collect()
        })
        .collect();
    (base, basis, reduced)
}

impl LatticePolytope {
    /// Build a polytope from (not necessarily extreme, not necessarily
    /// deduplicated) integer points.
    pub fn new(rank: usize, points: Vec<Vec<Z>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("empty point list".into()));
        }
        for p in &points {
            if p.len() != rank {
                return Err(Error::InvalidInput(format!(
                    "point of length {} in rank-{} polytope",
                    p.len(),
                    rank
                )));
            }
        }
        let points = lex_sorted(points);
        let dim = affine_rank(&points);
        if dim == rank {
            if points.len() == rank + 1 {
                // A simplex: all points are vertices; facets drop one vertex.
                let (extreme, facets) = simplex_facets(&points, rank);
                return Ok(LatticePolytope {
                    rank,
                    dim,
                    vertices: extreme,
                    facets,
                    lattice_points: OnceLock::new(),
                    face_lattice: OnceLock::new(),
                });
            }
            let (extreme_idx, facets) = full_dim_hull(&points, rank)?;
            let vertices = lex_sorted(extreme_idx.into_iter().map(|i| points[i].clone()).collect());
            Ok(LatticePolytope {
                rank,
                dim,
                vertices,
                facets,
                lattice_points: OnceLock::new(),
                face_lattice: OnceLock::new(),
            })
        } else {
            // Lower-dimensional: reduce to a full-dimensional copy to find
            // the extreme points, then map back.
            let (base, basis, reduced) = affine_lattice_coords(&points);
            let vertices = if dim == 0 {
                vec![points[0].clone()]
            } else if reduced.len() == dim + 1 {
                points.clone()
            } else {
                let (extreme_idx, _) = full_dim_hull(&reduced, dim)?;
                lex_sorted(extreme_idx.into_iter().map(|i| points[i].clone()).collect())
            };
            let _ = (base, basis);
            Ok(LatticePolytope {
                rank,
                dim,
                vertices,
                facets: Vec::new(),
                lattice_points: OnceLock::new(),
                face_lattice: OnceLock::new(),
            })
        }
    }

    /// Ambient lattice rank.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Affine dimension (== rank iff full-dimensional).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim == self.rank
    }

    /// Lexicographically sorted extreme points.
    pub fn vertices(&self) -> &[Vec<Z>] {
        &self.vertices
    }

    /// Facet inequalities (inner form); full-dimensional polytopes only.
    pub fn facets(&self) -> Result<&[FacetIneq]> {
        if !self.is_full_dimensional() {
            return Err(Error::NotFullDimensional { rank: self.dim, dim: self.rank });
        }
        Ok(&self.facets)
    }

    /// Exact membership test.
    pub fn contains(&self, p: &[Z]) -> bool {
        if self.is_full_dimensional() {
            self.facets.iter().all(|f| dot(&f.normal, p) >= -f.rhs.clone())
        } else {
            // Work in reduced coordinates of the affine span.
            let mut pts = self.vertices.clone();
            pts.push(p.to_vec());
            if affine_rank(&pts) != self.dim {
                return false;
            }
            let (_, _, reduced) = affine_lattice_coords(&pts);
            let target = reduced.last().unwrap().clone();
            let verts = &reduced[..reduced.len() - 1];
            if self.dim == 0 {
                return target.iter().all(|x| x.is_zero());
            }
            point_in_hull_z(&target, verts)
        }
    }

    /// All lattice points of the polytope, lexicographically sorted.
    pub fn lattice_points(&self) -> &[Vec<Z>] {
        self.lattice_points.get_or_init(|| {
            if self.dim == 0 {
                return self.vertices.clone();
            }
            if self.is_full_dimensional() {
                lattice_points_full(&self.vertices, &self.facets)
            } else {
                let (base, basis, reduced) = affine_lattice_coords(&self.vertices);
                let sub = LatticePolytope::new(self.dim, reduced)
                    .expect("reduced polytope is full-dimensional");
                let pts = sub.lattice_points().to_vec();
                let mapped: Vec<Vec<Z>> = pts
                    .iter()
                    .map(|c| {
                        (0..self.rank)
                            .map(|j| {
                                let mut x = base[j].clone();
                                for (k, ck) in c.iter().enumerate() {
                                    x += ck * &basis[(k, j)];
                                }
                                x
                            })
                            .collect()
                    })
                    .collect();
                lex_sorted(mapped)
            }
        })
    }

    /// Number of lattice points, l(P).
    pub fn lattice_point_count(&self) -> usize {
        self.lattice_points().len()
    }

    /// Number of integer points in the vertex bounding box (scan cost bound).
    fn bounding_box_size(&self) -> u128 {
        use num::ToPrimitive;
        let mut size: u128 = 1;
        for c in 0..self.rank {
            let lo = self.vertices.iter().map(|v| v[c].clone()).min().unwrap();
            let hi = self.vertices.iter().map(|v| v[c].clone()).max().unwrap();
            let width = (hi - lo + Z::one()).to_u128().unwrap_or(u128::MAX);
            size = size.saturating_mul(width);
        }
        size
    }

    /// True when the origin is strictly interior.
    pub fn origin_interior(&self) -> bool {
        self.is_full_dimensional() && self.facets.iter().all(|f| f.rhs.is_positive())
    }

    /// Polar dual `{ y : <y, x> >= -1 for all x }`.
    ///
    /// Errors with `OriginNotInterior` when the dual is unbounded, and with
    /// `NonLatticeDual` describing the fractional vertices when the dual is
    /// not a lattice polytope.
    pub fn polar_dual(&self) -> Result<LatticePolytope> {
        if !self.origin_interior() {
            return Err(Error::OriginNotInterior);
        }
        let mut dual_vertices = Vec::new();
        let mut fractional = Vec::new();
        for f in &self.facets {
            if f.normal.iter().all(|x| x.is_multiple_of(&f.rhs)) {
                dual_vertices.push(f.normal.iter().map(|x| x / &f.rhs).collect::<Vec<Z>>());
            } else {
                fractional.push(format!(
                    "({})/{}",
                    f.normal.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
                    f.rhs
                ));
            }
        }
        if !fractional.is_empty() {
            return Err(Error::NonLatticeDual { vertices: fractional.join("; ") });
        }
        // Reflexive fast path: the dual needs no hull computation.  Its
        // vertices are exactly the facet normals, and its facets are
        // `<v, y> >= -1` for the vertices `v` of this polytope (which are
        // primitive for a reflexive polytope; verified below as the gate).
        let reflexive = self.facets.iter().all(|f| f.rhs.is_one());
        let verts_primitive = self.vertices.iter().all(|v| {
            let g = v.iter().fold(Z::zero(), |acc, x| acc.gcd(x));
            g.is_one()
        });
        if reflexive && verts_primitive {
            let vertices = lex_sorted(dual_vertices);
            let mut facets: Vec<FacetIneq> = self
                .vertices
                .iter()
                .map(|v| FacetIneq { normal: v.clone(), rhs: Z::one() })
                .collect();
            facets.sort_by(|a, b| (&a.normal, &a.rhs).cmp(&(&b.normal, &b.rhs)));
            return Ok(LatticePolytope {
                rank: self.rank,
                dim: self.rank,
                vertices,
                facets,
                lattice_points: OnceLock::new(),
                face_lattice: OnceLock::new(),
            });
        }
        LatticePolytope::new(self.rank, dual_vertices)
    }

    /// Reflexivity: origin interior and all facets at lattice distance 1.
    /// Cross-checks that the origin is then the unique interior point.
    pub fn is_reflexive(&self) -> Result<bool> {
        if !self.is_full_dimensional() {
            return Err(Error::NotFullDimensional { rank: self.dim, dim: self.rank });
        }
        if !self.origin_interior() {
            return Err(Error::OriginNotInterior);
        }
        let reflexive = self.facets.iter().all(|f| f.rhs.is_one());
        if reflexive && self.bounding_box_size() <= 50_000 {
            // Cross-check: the origin is then the only interior point.
            let interior: Vec<_> = self
                .lattice_points()
                .iter()
                .filter(|p| self.facets.iter().all(|f| dot(&f.normal, p) > -f.rhs.clone()))
                .collect();
            debug_assert_eq!(interior.len(), 1, "reflexive polytope with extra interior points");
        }
        Ok(reflexive)
    }

    /// Face lattice with interior-point counts; proper nonempty faces only.
    /// Dual pairing is attached separately by [`dual_paired_face_lattices`].
    pub fn face_lattice(&self) -> Result<&FaceLattice> {
        if !self.is_full_dimensional() {
            return Err(Error::NotFullDimensional { rank: self.dim, dim: self.rank });
        }
        Ok(self.face_lattice.get_or_init(|| build_face_lattice(self)))
    }

    /// Minkowski sum by pairwise vertex sums and hull reduction.
    pub fn minkowski_sum(&self, other: &LatticePolytope) -> Result<LatticePolytope> {
        if self.rank != other.rank {
            return Err(Error::InvalidInput("Minkowski sum rank mismatch".into()));
        }
        let mut sums = Vec::new();
        for a in &self.vertices {
            for b in &other.vertices {
                sums.push(a.iter().zip(b).map(|(x, y)| x + y).collect());
            }
        }
        LatticePolytope::new(self.rank, sums)
    }
}

/// Facets of a full-dimensional simplex (each omits one vertex).
fn simplex_facets(points: &[Vec<Z>], rank: usize) -> (Vec<Vec<Z>>, Vec<FacetIneq>) {
    let centroid: Vec<Q> = (0..rank)
        .map(|c| {
            let s: Z = points.iter().map(|p| p[c].clone()).sum();
            Q::new(s, Z::from(points.len() as i64))
        })
        .collect();
    let mut facets = Vec::new();
    for drop in 0..points.len() {
        let verts: Vec<&[Z]> = points
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != drop)
            .map(|(_, p)| p.as_slice())
            .collect();
        let (mut a, mut off) = if rank == 1 {
            (vec![Z::one()], verts[0][0].clone())
        } else {
            hyperplane_through(&verts, rank)
        };
        if dot_q(&a, &centroid) > Q::from_integer(off.clone()) {
            a = a.iter().map(|x| -x).collect();
            off = -off;
        }
        facets.push(FacetIneq { normal: a.iter().map(|x| -x).collect(), rhs: off });
    }
    facets.sort_by(|a, b| (&a.normal, &a.rhs).cmp(&(&b.normal, &b.rhs)));
    facets.dedup();
    (points.to_vec(), facets)
}

/// Exact test for `sum of parts == target` (Minkowski sum), without hull
/// computations: the sum's support function is the sum of the parts'
/// support functions (checked on the target's facet normals), and the
/// reverse inclusion reduces to one small feasibility LP per target vertex.
pub fn minkowski_sum_equals(parts: &[LatticePolytope], target: &LatticePolytope) -> Result<bool> {
    use crate::lp::{maximize, LpOutcome, Rel, VarMode};
    let facets = target.facets()?;
    let n = target.rank();
    // Inclusion `sum parts ⊆ target`: for each inner facet <a, x> >= -c,
    // sum over parts of min_v <a, v> must be >= -c.
    for f in facets {
        let mut total = Z::zero();
        for p in parts {
            let m = p.vertices().iter().map(|v| dot(&f.normal, v)).min().unwrap();
            total += m;
        }
        if total < -f.rhs.clone() {
            return Ok(false);
        }
    }
    // Inclusion `target ⊆ sum parts`: each vertex w of the target must be a
    // sum of convex combinations of the parts' vertices.
    for w in target.vertices() {
        let sizes: Vec<usize> = parts.iter().map(|p| p.vertices().len()).collect();
        let nvars: usize = sizes.iter().sum();
        let mut cons: Vec<(Vec<Q>, Rel, Q)> = Vec::new();
        // One convexity row per part.
        let mut offset = 0usize;
        for &s in &sizes {
            let mut row = vec![Q::zero(); nvars];
            for item in row.iter_mut().skip(offset).take(s) {
                *item = Q::one();
            }
            cons.push((row, Rel::Eq, Q::one()));
            offset += s;
        }
        // Coordinate rows.
        for c in 0..n {
            let mut row = vec![Q::zero(); nvars];
            let mut off = 0usize;
            for p in parts {
                for v in p.vertices() {
                    row[off] = Q::from_integer(v[c].clone());
                    off += 1;
                }
            }
            cons.push((row, Rel::Eq, Q::from_integer(w[c].clone())));
        }
        let feasible = matches!(
            maximize(&vec![Q::zero(); nvars], &cons, VarMode::NonNegative),
            LpOutcome::Optimal { .. }
        );
        if !feasible {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rational membership x in conv(points), all integer, full-dim not required.
fn point_in_hull_z(x: &[Z], points: &[Vec<Z>]) -> bool {
    use crate::lp::{maximize, LpOutcome, Rel, VarMode};
    let n = x.len();
    let m = points.len();
    // lambda >= 0, sum lambda = 1, sum lambda p = x.
    let mut cons: Vec<(Vec<Q>, Rel, Q)> = Vec::new();
    cons.push((vec![Q::one(); m], Rel::Eq, Q::one()));
    for c in 0..n {
        let coef: Vec<Q> = points.iter().map(|p| Q::from_integer(p[c].clone())).collect();
        cons.push((coef, Rel::Eq, Q::from_integer(x[c].clone())));
    }
    matches!(
        maximize(&vec![Q::zero(); m], &cons, VarMode::NonNegative),
        LpOutcome::Optimal { .. }
    )
}

/// Lattice points by bounding-box scan with facet membership tests.
fn lattice_points_full(vertices: &[Vec<Z>], facets: &[FacetIneq]) -> Vec<Vec<Z>> {
    let rank = vertices[0].len();
    let lo: Vec<Z> = (0..rank)
        .map(|c| vertices.iter().map(|v| v[c].clone()).min().unwrap())
        .collect();
    let hi: Vec<Z> = (0..rank)
        .map(|c| vertices.iter().map(|v| v[c].clone()).max().unwrap())
        .collect();
    let mut out = Vec::new();
    let mut cur = lo.clone();
    'scan: loop {
        if facets.iter().all(|f| dot(&f.normal, &cur) >= -f.rhs.clone()) {
            out.push(cur.clone());
        }
        // Odometer increment.
        for c in (0..rank).rev() {
            if cur[c] < hi[c] {
                cur[c] += 1;
                for (j, item) in cur.iter_mut().enumerate().skip(c + 1) {
                    *item = lo[j].clone();
                }
                continue 'scan;
            }
        }
        break;
    }
    out.sort();
    out
}

/// Face lattice of a full-dimensional polytope.
fn build_face_lattice(p: &LatticePolytope) -> FaceLattice {
    let verts = &p.vertices;
    let facets = &p.facets;
    // Tight vertex sets of the facets.
    let tight: Vec<BTreeSet<usize>> = facets
        .iter()
        .map(|f| {
            verts
                .iter()
                .enumerate()
                .filter(|(_, v)| dot(&f.normal, v) == -f.rhs.clone())
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    // Closure under intersection.
    let mut sets: BTreeSet<BTreeSet<usize>> = tight.iter().cloned().collect();
    loop {
        let snapshot: Vec<BTreeSet<usize>> = sets.iter().cloned().collect();
        let mut added = false;
        for i in 0..snapshot.len() {
            for j in i + 1..snapshot.len() {
                let inter: BTreeSet<usize> =
                    snapshot[i].intersection(&snapshot[j]).copied().collect();
                if !inter.is_empty() && sets.insert(inter) {
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    // Interior lattice points, keyed by tight facet sets.
    let mut interior_count: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
    for pt in p.lattice_points() {
        let key: BTreeSet<usize> = facets
            .iter()
            .enumerate()
            .filter(|(_, f)| dot(&f.normal, pt) == -f.rhs.clone())
            .map(|(i, _)| i)
            .collect();
        if !key.is_empty() {
            *interior_count.entry(key).or_insert(0) += 1;
        }
    }
    let mut faces: Vec<Face> = sets
        .into_iter()
        .map(|vertex_set| {
            let pts: Vec<Vec<Z>> = vertex_set.iter().map(|&i| verts[i].clone()).collect();
            let dim = affine_rank(&pts);
            let facet_set: BTreeSet<usize> =
                (0..facets.len()).filter(|&f| vertex_set.is_subset(&tight[f])).collect();
            let interior_lattice_points = interior_count.get(&facet_set).copied().unwrap_or(0);
            Face { dim, vertex_set, facet_set, interior_lattice_points, dual_face: None }
        })
        .collect();
    faces.sort_by(|a, b| (a.dim, &a.vertex_set).cmp(&(b.dim, &b.vertex_set)));
    FaceLattice { faces }
}

/// Face lattices of a reflexive polytope and its polar dual, with the
/// dimension-reversing dual-face bijection attached on both sides.
pub fn dual_paired_face_lattices(
    p: &LatticePolytope,
    dual: &LatticePolytope,
) -> Result<(FaceLattice, FaceLattice)> {
    if !p.is_reflexive()? {
        return Err(Error::NotReflexive { facet: 0, distance: "non-unit".into() });
    }
    let n = p.rank();
    let mut fl_p = p.face_lattice()?.clone();
    let mut fl_d = dual.face_lattice()?.clone();
    // Facet i of p corresponds to the dual vertex equal to its inner normal.
    let facet_to_dual_vertex: Vec<usize> = p
        .facets()?
        .iter()
        .map(|f| {
            dual.vertices()
                .iter()
                .position(|v| *v == f.normal)
                .expect("dual vertex for facet normal")
        })
        .collect();
    let dual_facet_to_p_vertex: Vec<usize> = dual
        .facets()?
        .iter()
        .map(|f| {
            p.vertices()
                .iter()
                .position(|v| *v == f.normal)
                .expect("primal vertex for dual facet normal")
        })
        .collect();
    // Dual face of a face with facet set S: the face of `dual` whose vertex
    // set is exactly { dual vertex of facet F : F in S }.
    let dual_index: BTreeMap<BTreeSet<usize>, usize> = fl_d
        .faces
        .iter()
        .enumerate()
        .map(|(i, f)| (f.vertex_set.clone(), i))
        .collect();
    for face in fl_p.faces.iter_mut() {
        let dv: BTreeSet<usize> =
            face.facet_set.iter().map(|&f| facet_to_dual_vertex[f]).collect();
        let di = *dual_index.get(&dv).unwrap_or_else(|| {
            panic!("missing dual face for facet set {:?}", face.facet_set)
        });
        debug_assert_eq!(face.dim + fl_d.faces[di].dim, n - 1, "dual pairing dimension");
        face.dual_face = Some(di);
    }
    let p_index: BTreeMap<BTreeSet<usize>, usize> = fl_p
        .faces
        .iter()
        .enumerate()
        .map(|(i, f)| (f.vertex_set.clone(), i))
        .collect();
    for face in fl_d.faces.iter_mut() {
        let pv: BTreeSet<usize> =
            face.facet_set.iter().map(|&f| dual_facet_to_p_vertex[f]).collect();
        let pi = *p_index.get(&pv).unwrap_or_else(|| {
            panic!("missing primal face for facet set {:?}", face.facet_set)
        });
        debug_assert_eq!(face.dim + fl_p.faces[pi].dim, n - 1, "dual pairing dimension");
        face.dual_face = Some(pi);
    }
    Ok((fl_p, fl_d))
}

/// Value of the anticanonical-hypersurface Hodge-number formula
/// `l(P) - (n+1) - sum over codim-1 faces of l' + sum over codim-2 faces of
/// l'(face) * l'(dual face)`, where the codim-2 duals live in `dual`.
pub fn batyrev_formula_value(p: &LatticePolytope, dual: &LatticePolytope) -> Result<Z> {
    let n = p.rank();
    let (fl_p, fl_d) = dual_paired_face_lattices(p, dual)?;
    let mut value = Z::from(p.lattice_point_count() as i64) - Z::from((n + 1) as i64);
    for f in fl_p.faces_of_dim(n - 1) {
        value -= Z::from(f.interior_lattice_points as i64);
    }
    for f in fl_p.faces_of_dim(n - 2) {
        let d = f.dual_face.expect("paired lattice");
        value += Z::from(f.interior_lattice_points as i64)
            * Z::from(fl_d.faces[d].interior_lattice_points as i64);
    }
    Ok(value)
}

/// Hodge numbers (h11, h21) of the anticanonical hypersurface associated
/// with a reflexive 4-polytope `delta`.
pub fn hodge_numbers_hypersurface(delta: &LatticePolytope) -> Result<(Z, Z)> {
    if delta.rank() != 4 {
        return Err(Error::HodgeDimension { dim: delta.rank() });
    }
    if !delta.is_reflexive()? {
        return Err(Error::NotReflexive { facet: 0, distance: "non-unit".into() });
    }
    let dual = delta.polar_dual()?;
    let h11 = batyrev_formula_value(&dual, delta)?;
    let h21 = batyrev_formula_value(delta, &dual)?;
    Ok((h11, h21))
}

/// A nef partition of a reflexive polytope: a partition of the polar dual's
/// vertex set.
#[derive(Clone, Debug)]
pub struct NefPartition {
    pub delta: LatticePolytope,
    pub delta_star: LatticePolytope,
    /// Disjoint vertex-index groups covering all vertices of delta_star.
    pub parts: Vec<Vec<usize>>,
}

/// Result of dualising a nef partition.
#[derive(Debug)]
pub struct NefPartitionDual {
    /// The Minkowski sum of the parts (a reflexive polytope).
    pub nabla: LatticePolytope,
    /// The parts (possibly lower-dimensional polytopes containing 0).
    pub nabla_parts: Vec<LatticePolytope>,
    /// The dual-side parts (support polytopes), with Delta = their
    /// Minkowski sum.
    pub delta_parts: Vec<LatticePolytope>,
}

impl NefPartition {
    pub fn new(delta: LatticePolytope, parts: Vec<Vec<usize>>) -> Result<Self> {
        if !delta.is_reflexive()? {
            return Err(Error::InvalidNefPartition { reason: "polytope is not reflexive".into() });
        }
        let delta_star = delta.polar_dual()?;
        let nv = delta_star.vertices().len();
        let mut seen = vec![false; nv];
        for part in &parts {
            if part.is_empty() {
                return Err(Error::InvalidNefPartition { reason: "empty part".into() });
            }
            for &i in part {
                if i >= nv {
                    return Err(Error::InvalidNefPartition {
                        reason: format!("vertex index {i} out of range"),
                    });
                }
                if seen[i] {
                    return Err(Error::InvalidNefPartition {
                        reason: format!("vertex index {i} occurs twice"),
                    });
                }
                seen[i] = true;
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::InvalidNefPartition {
                reason: "parts do not cover all polar-dual vertices".into(),
            });
        }
        Ok(NefPartition { delta, delta_star, parts })
    }

    /// Part index of each polar-dual vertex.
    fn assignment(&self) -> Vec<usize> {
        let mut a = vec![0usize; self.delta_star.vertices().len()];
        for (k, part) in self.parts.iter().enumerate() {
            for &i in part {
                a[i] = k;
            }
        }
        a
    }

    /// Construct the dual nef partition with all the validation the
    /// combinatorics demands: `Conv(union of nabla_i) = Delta*`, each
    /// support polytope `Delta_i` integral, `sum Delta_i = Delta`, and
    /// `Conv(union of Delta_i)` reflexive with polar dual `nabla`.
    pub fn dualize(&self) -> Result<NefPartitionDual> {
        let n = self.delta.rank();
        let r = self.parts.len();
        let zero = vec![Z::zero(); n];
        // nabla_i = Conv({0} + part vertices).
        let mut nabla_parts = Vec::with_capacity(r);
        for part in &self.parts {
            let mut pts: Vec<Vec<Z>> = part
                .iter()
                .map(|&i| self.delta_star.vertices()[i].clone())
                .collect();
            pts.push(zero.clone());
            nabla_parts.push(LatticePolytope::new(n, pts)?);
        }
        // Conv of the union must be Delta*.
        let mut union_pts: Vec<Vec<Z>> = Vec::new();
        for p in &nabla_parts {
            union_pts.extend(p.vertices().iter().cloned());
        }
        let conv_union = LatticePolytope::new(n, union_pts)?;
        if conv_union != self.delta_star {
            return Err(Error::InvalidNefPartition {
                reason: "convex hull of the parts differs from the polar dual".into(),
            });
        }
        // Support polytopes Delta_i: phi_i = 1 on part i's vertices, 0 on
        // the others, extended linearly over each facet cone of Delta*;
        // the vertex of Delta_i attached to a facet F is the functional u
        // with <u, v> = -phi_i(v) on F's vertices.
        let assignment = self.assignment();
        let facets = self.delta_star.facets()?;
        let dsv = self.delta_star.vertices();
        let mut delta_parts = Vec::with_capacity(r);
        for k in 0..r {
            let mut candidates: Vec<Vec<Z>> = Vec::new();
            for f in facets {
                let tight: Vec<usize> = dsv
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| dot(&f.normal, v) == -f.rhs.clone())
                    .map(|(i, _)| i)
                    .collect();
                let rows: Vec<Vec<Q>> = tight
                    .iter()
                    .map(|&i| dsv[i].iter().map(|x| Q::from_integer(x.clone())).collect())
                    .collect();
                let rhs: Vec<Q> = tight
                    .iter()
                    .map(|&i| {
                        if assignment[i] == k {
                            -Q::one()
                        } else {
                            Q::zero()
                        }
                    })
                    .collect();
                let m = QMat::from_rows(rows.clone());
                let Some(u) = m.solve(&rhs) else {
                    return Err(Error::InvalidNefPartition {
                        reason: "support function is not linear on a facet cone".into(),
                    });
                };
                // The solve used free-variable = 0 completion; verify all
                // equations (consistency of phi_i on the cone).
                for (row, b) in rows.iter().zip(&rhs) {
                    let got: Q = row.iter().zip(&u).map(|(a, x)| a * x).sum();
                    if got != *b {
                        return Err(Error::InvalidNefPartition {
                            reason: "support function is not linear on a facet cone".into(),
                        });
                    }
                }
                if u.iter().any(|x| !x.denom().is_one()) {
                    return Err(Error::InvalidNefPartition {
                        reason: "support polytope has a fractional vertex".into(),
                    });
                }
                candidates.push(u.iter().map(|x| x.to_integer()).collect());
            }
            // Keep candidates satisfying all inequalities <u, v> >= -phi_k(v).
            let valid: Vec<Vec<Z>> = candidates
                .into_iter()
                .filter(|u| {
                    dsv.iter().enumerate().all(|(i, v)| {
                        let phi = if assignment[i] == k { Z::one() } else { Z::zero() };
                        dot(u, v) >= -phi
                    })
                })
                .collect();
            if valid.is_empty() {
                return Err(Error::InvalidNefPartition {
                    reason: "support polytope is empty".into(),
                });
            }
            delta_parts.push(LatticePolytope::new(n, valid)?);
        }
        // sum Delta_i = Delta (support-function + membership-LP test; no
        // large hulls).
        if !minkowski_sum_equals(&delta_parts, &self.delta)? {
            return Err(Error::InvalidNefPartition {
                reason: "support polytopes do not Minkowski-sum to the parent".into(),
            });
        }
        // Conv(union Delta_i) must be reflexive; its polar dual (hull-free
        // for a reflexive polytope) is nabla, which must equal the Minkowski
        // sum of the parts.
        let mut dunion: Vec<Vec<Z>> = Vec::new();
        for p in &delta_parts {
            dunion.extend(p.vertices().iter().cloned());
        }
        let conv_dunion = LatticePolytope::new(n, dunion)?;
        if !conv_dunion.is_reflexive()? {
            return Err(Error::InvalidNefPartition {
                reason: "hull of the support polytopes is not reflexive".into(),
            });
        }
        let nabla = conv_dunion.polar_dual()?;
        if !minkowski_sum_equals(&nabla_parts, &nabla)? {
            return Err(Error::InvalidNefPartition {
                reason: "parts do not Minkowski-sum to the dual of the support hull".into(),
            });
        }
        Ok(NefPartitionDual { nabla, nabla_parts, delta_parts })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::z;

    fn zp(v: &[i64]) -> Vec<Z> {
        v.iter().map(|&x| z(x)).collect()
    }

    fn poly(rank: usize, pts: &[&[i64]]) -> LatticePolytope {
        LatticePolytope::new(rank, pts.iter().map(|p| zp(p)).collect()).unwrap()
    }

    fn quintic_delta() -> LatticePolytope {
        poly(
            4,
            &[
                &[4, -1, -1, -1],
                &[-1, 4, -1, -1],
                &[-1, -1, 4, -1],
                &[-1, -1, -1, 4],
                &[-1, -1, -1, -1],
            ],
        )
    }

    fn quintic_delta_star() -> LatticePolytope {
        poly(4, &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1], &[-1, -1, -1, -1]])
    }

    #[test]
    fn segment_rank_one() {
        let p = poly(1, &[&[-2], &[3], &[0]]);
        assert_eq!(p.vertices(), &[zp(&[-2]), zp(&[3])]);
        assert_eq!(p.lattice_point_count(), 6);
        assert!(p.contains(&zp(&[1])));
        assert!(!p.contains(&zp(&[4])));
    }

    #[test]
    fn triangle_points_and_polar_dual() {
        let t = poly(2, &[&[1, 0], &[0, 1], &[-1, -1]]);
        assert_eq!(t.lattice_point_count(), 4); // three vertices + origin
        assert!(t.is_reflexive().unwrap());
        let d = t.polar_dual().unwrap();
        assert_eq!(d.vertices(), &[zp(&[-1, -1]), zp(&[-1, 2]), zp(&[2, -1])]);
        // Polar duality is an involution on reflexive polytopes.
        assert_eq!(d.polar_dual().unwrap(), t);
    }

    #[test]
    fn cross_polytope_dual_is_square() {
        let cross = poly(2, &[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]]);
        let square = cross.polar_dual().unwrap();
        assert_eq!(
            square.vertices(),
            &[zp(&[-1, -1]), zp(&[-1, 1]), zp(&[1, -1]), zp(&[1, 1])]
        );
        assert!(square.is_reflexive().unwrap());
        assert_eq!(square.lattice_point_count(), 9);
    }

    #[test]
    fn quintic_simplex_counts() {
        let d = quintic_delta();
        assert_eq!(d.vertices().len(), 5);
        assert_eq!(d.facets().unwrap().len(), 5);
        // l(5 Delta_4 shifted) = C(9,4): multisets of degree 5 in 5 variables.
        assert_eq!(d.lattice_point_count(), 126);
        let ds = d.polar_dual().unwrap();
        assert_eq!(ds, quintic_delta_star());
        assert_eq!(ds.lattice_point_count(), 6);
        assert!(d.is_reflexive().unwrap());
        assert!(ds.is_reflexive().unwrap());
    }

    #[test]
    fn reflexivity_negatives() {
        // Dilated triangle: origin interior but facets at distance 2.
        let big = poly(2, &[&[2, 0], &[0, 2], &[-2, -2]]);
        assert!(!big.is_reflexive().unwrap());
        match big.polar_dual() {
            Err(Error::NonLatticeDual { vertices }) => {
                assert!(vertices.contains('/'), "{vertices}")
            }
            other => panic!("expected NonLatticeDual, got {other:?}"),
        }
        // Origin on the boundary.
        let corner = poly(2, &[&[0, 0], &[1, 0], &[0, 1]]);
        assert!(matches!(corner.is_reflexive(), Err(Error::OriginNotInterior)));
        // Lower-dimensional input.
        let flat = LatticePolytope::new(2, vec![zp(&[0, 0]), zp(&[1, 0]), zp(&[2, 0])]).unwrap();
        assert_eq!(flat.dim(), 1);
        assert!(matches!(flat.is_reflexive(), Err(Error::NotFullDimensional { .. })));
    }

    #[test]
    fn face_lattice_of_quintic_simplex() {
        let d = quintic_delta();
        let fl = d.face_lattice().unwrap();
        let count = |k: usize| fl.faces_of_dim(k).count();
        assert_eq!((count(0), count(1), count(2), count(3)), (5, 10, 10, 5));
        // Each facet (a 3-face) of the dilated simplex holds 4 interior points,
        // each 2-face holds 6, each edge 4, each vertex 0.
        for f in fl.faces_of_dim(3) {
            assert_eq!(f.interior_lattice_points, 4);
        }
        for f in fl.faces_of_dim(2) {
            assert_eq!(f.interior_lattice_points, 6);
        }
        for f in fl.faces_of_dim(1) {
            assert_eq!(f.interior_lattice_points, 4);
        }
        // The relative interior of a vertex is the vertex itself.
        for f in fl.faces_of_dim(0) {
            assert_eq!(f.interior_lattice_points, 1);
        }
    }

    #[test]
    fn dual_face_pairing_dimensions() {
        let d = quintic_delta();
        let ds = d.polar_dual().unwrap();
        let (fl_p, fl_d) = dual_paired_face_lattices(&d, &ds).unwrap();
        for f in &fl_p.faces {
            let dual = f.dual_face.expect("paired");
            assert_eq!(f.dim + fl_d.faces[dual].dim, 3);
        }
        // The pairing is a bijection.
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        for f in &fl_p.faces {
            assert!(seen.insert(f.dual_face.unwrap()));
        }
        assert_eq!(seen.len(), fl_d.faces.len());
    }

    #[test]
    fn hodge_numbers_of_quintic() {
        let (h11, h21) = hodge_numbers_hypersurface(&quintic_delta()).unwrap();
        assert_eq!((h11, h21), (z(1), z(101)));
        // Mirror side: swap the polytopes.
        let (h11m, h21m) = hodge_numbers_hypersurface(&quintic_delta_star()).unwrap();
        assert_eq!((h11m, h21m), (z(101), z(1)));
    }

    #[test]
    fn hodge_requires_rank_four() {
        let oct = poly(3, &[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0], &[0, 0, 1], &[0, 0, -1]]);
        assert!(matches!(
            hodge_numbers_hypersurface(&oct),
            Err(Error::HodgeDimension { dim: 3 })
        ));
        assert!(oct.is_reflexive().unwrap());
    }

    #[test]
    fn minkowski_sum_of_segments_is_square() {
        let s1 = LatticePolytope::new(2, vec![zp(&[0, 0]), zp(&[1, 0])]).unwrap();
        let s2 = LatticePolytope::new(2, vec![zp(&[0, 0]), zp(&[0, 1])]).unwrap();
        assert_eq!(s1.dim(), 1);
        let sq = s1.minkowski_sum(&s2).unwrap();
        assert_eq!(sq.vertices().len(), 4);
        assert_eq!(sq.lattice_point_count(), 4);
    }

    #[test]
    fn lower_dimensional_lattice_points() {
        // A 2-dimensional triangle inside rank 4.
        let t = LatticePolytope::new(
            4,
            vec![zp(&[0, 0, 0, 0]), zp(&[2, 0, 0, 0]), zp(&[0, 0, 2, 0])],
        )
        .unwrap();
        assert_eq!(t.dim(), 2);
        assert_eq!(t.lattice_point_count(), 6);
        assert!(t.contains(&zp(&[1, 0, 1, 0])));
        assert!(!t.contains(&zp(&[1, 1, 0, 0])));
    }

    #[test]
    fn nef_partition_of_quintic_is_trivial() {
        let np = NefPartition::new(quintic_delta(), vec![vec![0, 1, 2, 3, 4]]).unwrap();
        let dual = np.dualize().unwrap();
        assert_eq!(dual.nabla, quintic_delta_star());
        assert_eq!(dual.nabla_parts.len(), 1);
        assert_eq!(dual.nabla_parts[0], quintic_delta_star());
        assert_eq!(dual.delta_parts[0], quintic_delta());
    }

    #[test]
    fn nef_partition_validation() {
        let d = quintic_delta();
        assert!(matches!(
            NefPartition::new(d.clone(), vec![vec![0, 1], vec![1, 2, 3, 4]]),
            Err(Error::InvalidNefPartition { .. })
        ));
        assert!(matches!(
            NefPartition::new(d, vec![vec![0, 1, 2]]),
            Err(Error::InvalidNefPartition { .. })
        ));
    }

    #[test]
    fn nef_partition_of_two_projective_spaces() {
        // Product of two copies of the rank-4 simplex geometry: the parent is
        // the product polytope, the polar dual the free sum, and the nef
        // partition pairs corresponding rays of the two factors.
        let f1: Vec<Vec<i64>> = vec![
            vec![1, 0, 0, 0],
            vec![0, 1, 0, 0],
            vec![0, 0, 1, 0],
            vec![0, 0, 0, 1],
            vec![-1, -1, -1, -1],
        ];
        let dv: Vec<Vec<i64>> = vec![
            vec![4, -1, -1, -1],
            vec![-1, 4, -1, -1],
            vec![-1, -1, 4, -1],
            vec![-1, -1, -1, 4],
            vec![-1, -1, -1, -1],
        ];
        let mut product = Vec::new();
        for a in &dv {
            for b in &dv {
                let mut v = a.clone();
                v.extend(b.iter().copied());
                product.push(zp(&v));
            }
        }
        let delta = LatticePolytope::new(8, product).unwrap();
        assert_eq!(delta.vertices().len(), 25);
        let ds = delta.polar_dual().unwrap();
        assert_eq!(ds.vertices().len(), 10);
        // Pair ray i of factor one with ray i of factor two.
        let parts: Vec<Vec<usize>> = (0..5)
            .map(|i| {
                let mut left = vec![0i64; 8];
                left[..4].copy_from_slice(&f1[i]);
                let mut right = vec![0i64; 8];
                right[4..].copy_from_slice(&f1[i]);
                let li = ds.vertices().iter().position(|v| *v == zp(&left)).unwrap();
                let ri = ds.vertices().iter().position(|v| *v == zp(&right)).unwrap();
                vec![li, ri]
            })
            .collect();
        let np = NefPartition::new(delta, parts).unwrap();
        let dual = np.dualize().unwrap();
        assert_eq!(dual.nabla_parts.len(), 5);
        for p in &dual.nabla_parts {
            assert_eq!(p.dim(), 2);
            assert_eq!(p.lattice_point_count(), 3);
        }
        for p in &dual.delta_parts {
            assert_eq!(p.vertices().len(), 25);
        }
        assert!(dual.nabla.is_reflexive().unwrap());
    }
}
