//! Point configurations and their kernel (Gale) data.
//!
//! A configuration is an integer matrix `A` whose columns are homogenised
//! lattice points.  For a hypersurface family the columns are `(1, nu)` with
//! `nu` running over the non-facet-interior lattice points of a reflexive
//! polytope; for a complete-intersection family the columns are the
//! Cayley-style blocks `(e_k; nu)` with `nu` in the k-th part.  In both
//! cases the first `r` columns are the distinguished "origin" columns
//! `(e_k; 0)`.

use crate::error::Error;
use crate::linalg::ZMat;
use crate::num::Z;
use crate::polytope::LatticePolytope;
use crate::Result;
use num::{One, Signed, Zero};

/// An integer point configuration with distinguished origin columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointConfiguration {
    /// Number of rows of `A` (homogenising rows plus lattice rank).
    pub ambient_rank: usize,
    /// Number of homogenising rows / origin columns (1 for hypersurfaces).
    pub r: usize,
    /// Columns of `A`; the first `r` are `(e_k; 0)`.
    pub columns: Vec<Vec<Z>>,
    /// Stable per-column labels (`a0`, `a1`, ...).
    pub labels: Vec<String>,
}

impl PointConfiguration {
    /// The configuration matrix `A` (ambient_rank x p).
    pub fn a_matrix(&self) -> ZMat {
        let mut m = ZMat::zero(self.ambient_rank, self.columns.len());
        for (j, col) in self.columns.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    /// Number of columns.
    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    /// Lattice rank `n` of the underlying polytope side.
    pub fn lattice_rank(&self) -> usize {
        self.ambient_rank - self.r
    }

    /// Indices of the origin columns (always `0..r`).
    pub fn origin_columns(&self) -> std::ops::Range<usize> {
        0..self.r
    }

    fn validate(self) -> Result<Self> {
        if self.columns.is_empty() {
            return Err(Error::InvalidInput("configuration has no columns".into()));
        }
        for col in &self.columns {
            if col.len() != self.ambient_rank {
                return Err(Error::InvalidInput("column length mismatch".into()));
            }
        }
        if self.labels.len() != self.columns.len() {
            return Err(Error::InvalidInput("label count mismatch".into()));
        }
        // Distinct columns.
        let mut sorted = self.columns.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.columns.len() {
            return Err(Error::InvalidInput("configuration has repeated columns".into()));
        }
        // The first r columns are (e_k; 0).
        for k in 0..self.r {
            for (i, x) in self.columns[k].iter().enumerate() {
                let expect = if i == k { Z::one() } else { Z::zero() };
                if *x != expect {
                    return Err(Error::InvalidInput(format!(
                        "column {k} is not the origin column e_{k}"
                    )));
                }
            }
        }
        // Every column has homogenising block equal to some e_k.
        for col in &self.columns {
            let ones = col[..self.r].iter().filter(|x| x.is_one()).count();
            let zeros = col[..self.r].iter().filter(|x| x.is_zero()).count();
            if ones != 1 || ones + zeros != self.r {
                return Err(Error::InvalidInput(
                    "column homogenising block is not a unit vector".into(),
                ));
            }
        }
        // Full row rank.
        let rank = self.a_matrix().rank();
        if rank != self.ambient_rank {
            return Err(Error::InvalidInput(format!(
                "configuration matrix has rank {rank}, expected {}",
                self.ambient_rank
            )));
        }
        Ok(self)
    }
}

fn default_labels(p: usize) -> Vec<String> {
    (0..p).map(|j| format!("a{j}")).collect()
}

/// Hypersurface configuration: columns `(1, nu)` over the lattice points of
/// a reflexive polytope that do not lie in the relative interior of a facet,
/// with the origin first and the rest in lexicographic order.
pub fn build_hypersurface_config(polytope: &LatticePolytope) -> Result<PointConfiguration> {
    if !polytope.is_reflexive()? {
        return Err(Error::NotReflexive { facet: 0, distance: "non-unit".into() });
    }
    let n = polytope.rank();
    let facets = polytope.facets()?;
    let zero = vec![Z::zero(); n];
    let mut points: Vec<Vec<Z>> = Vec::new();
    for p in polytope.lattice_points() {
        if *p == zero {
            continue;
        }
        // Drop points interior to a facet: tight on exactly one facet.
        let tight = facets
            .iter()
            .filter(|f| {
                let v: Z = f.normal.iter().zip(p).map(|(a, x)| a * x).sum();
                v == -f.rhs.clone()
            })
            .count();
        if tight == 1 {
            continue;
        }
        points.push(p.clone());
    }
    points.sort();
    let mut columns = Vec::with_capacity(points.len() + 1);
    let mut origin = vec![Z::zero(); n + 1];
    origin[0] = Z::one();
    columns.push(origin);
    for p in points {
        let mut col = Vec::with_capacity(n + 1);
        col.push(Z::one());
        col.extend(p);
        columns.push(col);
    }
    let labels = default_labels(columns.len());
    PointConfiguration { ambient_rank: n + 1, r: 1, columns, labels }.validate()
}

/// Complete-intersection configuration from the parts of a dualised nef
/// partition: all `r` origin columns `(e_k; 0)` first, then for each part
/// the columns `(e_k; nu)` over its nonzero lattice points in lexicographic
/// order.
pub fn build_cicy_config(parts: &[LatticePolytope]) -> Result<PointConfiguration> {
    if parts.is_empty() {
        return Err(Error::InvalidInput("no parts given".into()));
    }
    let n = parts[0].rank();
    if parts.iter().any(|p| p.rank() != n) {
        return Err(Error::InvalidInput("parts have mismatched ranks".into()));
    }
    let r = parts.len();
    let zero = vec![Z::zero(); n];
    let mut columns = Vec::new();
    for k in 0..r {
        let mut col = vec![Z::zero(); r + n];
        col[k] = Z::one();
        columns.push(col);
    }
    for (k, part) in parts.iter().enumerate() {
        let mut pts: Vec<Vec<Z>> =
            part.lattice_points().iter().filter(|p| **p != zero).cloned().collect();
        pts.sort();
        for p in pts {
            let mut col = vec![Z::zero(); r + n];
            col[k] = Z::one();
            col[r..].clone_from_slice(&p);
            columns.push(col);
        }
    }
    let labels = default_labels(columns.len());
    PointConfiguration { ambient_rank: r + n, r, columns, labels }.validate()
}

/// A configuration given directly by its matrix (used for reduced systems
/// whose columns are quoted verbatim rather than derived from a polytope).
pub fn build_explicit_config(
    r: usize,
    columns: Vec<Vec<Z>>,
    labels: Option<Vec<String>>,
) -> Result<PointConfiguration> {
    let ambient_rank = columns.first().map(|c| c.len()).unwrap_or(0);
    let labels = labels.unwrap_or_else(|| default_labels(columns.len()));
    PointConfiguration { ambient_rank, r, columns, labels }.validate()
}

/// Saturated kernel lattice of a configuration, with a canonical basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelLattice {
    /// Basis rows `l` with `A l = 0`, Hermite-reduced, each row's sign fixed
    /// so that the total entry over the origin columns is non-positive.
    pub basis: Vec<Vec<Z>>,
    /// Number of origin columns of the parent configuration.
    pub r: usize,
}

impl KernelLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_matrix(&self) -> ZMat {
        ZMat::from_z_rows(self.basis.clone())
    }
}

/// Compute the saturated integer kernel `{ l : A l = 0 }` of the
/// configuration matrix, canonicalised by Hermite reduction followed by a
/// per-row sign rule: a row whose origin-column sum is positive is negated
/// (the distinguished coordinates come out with non-positive origin
/// entries, matching the classical normalisation of the examples).
pub fn kernel_lattice(config: &PointConfiguration) -> Result<KernelLattice> {
    let a = config.a_matrix();
    let ker = a.kernel_rows().hnf_rows();
    let mut basis: Vec<Vec<Z>> = Vec::with_capacity(ker.rows);
    for i in 0..ker.rows {
        let mut row = ker.row_vec(i);
        let origin_sum: Z = row[..config.r].iter().sum();
        if origin_sum.is_positive() {
            row = row.iter().map(|x| -x).collect();
        }
        basis.push(row);
    }
    // Deterministic row order.
    basis.sort();
    // Invariants: A l = 0 and the basis is primitive (saturated lattice).
    for row in &basis {
        let image = a.mul_vec(row);
        debug_assert!(image.iter().all(|x| x.is_zero()), "kernel row not in kernel");
    }
    if !basis.is_empty() {
        let snf = ZMat::from_z_rows(basis.clone()).smith();
        let all_unit = (0..basis.len()).all(|i| snf.d[(i, i)].is_one());
        debug_assert!(all_unit, "kernel basis is not saturated");
    }
    Ok(KernelLattice { basis, r: config.r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::z;
    use crate::polytope::{LatticePolytope, NefPartition};

    fn zp(v: &[i64]) -> Vec<Z> {
        v.iter().map(|&x| z(x)).collect()
    }

    fn quintic_delta_star() -> LatticePolytope {
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
        .unwrap()
    }

    #[test]
    fn quintic_configuration_and_kernel() {
        let cfg = build_hypersurface_config(&quintic_delta_star()).unwrap();
        assert_eq!(cfg.ambient_rank, 5);
        assert_eq!(cfg.r, 1);
        assert_eq!(cfg.num_columns(), 6);
        assert_eq!(cfg.columns[0], zp(&[1, 0, 0, 0, 0]));
        // Lex order after the origin.
        assert_eq!(cfg.columns[1], zp(&[1, -1, -1, -1, -1]));
        assert_eq!(cfg.columns[5], zp(&[1, 1, 0, 0, 0]));
        let ker = kernel_lattice(&cfg).unwrap();
        assert_eq!(ker.rank(), 1);
        assert_eq!(ker.basis[0], zp(&[-5, 1, 1, 1, 1, 1]));
    }

    #[test]
    fn weierstrass_configuration_drops_facet_interior_points() {
        // Reflexive triangle with 7 lattice points, 3 of them interior to
        // facets; the configuration keeps origin + 3 vertices.
        let t = LatticePolytope::new(2, vec![zp(&[-1, -1]), zp(&[0, 1]), zp(&[3, 1])]).unwrap();
        assert_eq!(t.lattice_point_count(), 7);
        let cfg = build_hypersurface_config(&t).unwrap();
        assert_eq!(cfg.num_columns(), 4);
        assert_eq!(cfg.columns[1], zp(&[1, -1, -1]));
        assert_eq!(cfg.columns[2], zp(&[1, 0, 1]));
        assert_eq!(cfg.columns[3], zp(&[1, 3, 1]));
        let ker = kernel_lattice(&cfg).unwrap();
        assert_eq!(ker.rank(), 1);
        assert_eq!(ker.basis[0], zp(&[-6, 3, 2, 1]));
    }

    #[test]
    fn square_configuration_kernel_sign() {
        // Unit square: origin, e1, e2, e1+e2 (a non-reflexive toy; build the
        // configuration directly).
        let cfg = build_explicit_config(
            1,
            vec![zp(&[1, 0, 0]), zp(&[1, 0, 1]), zp(&[1, 1, 0]), zp(&[1, 1, 1])],
            None,
        )
        .unwrap();
        let ker = kernel_lattice(&cfg).unwrap();
        assert_eq!(ker.rank(), 1);
        // Hermite form gives (1,-1,-1,1); the origin entry must be
        // non-positive, so the canonical generator is negated.
        assert_eq!(ker.basis[0], zp(&[-1, 1, 1, -1]));
    }

    #[test]
    fn cicy_configuration_for_two_projective_spaces() {
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
        let ds = delta.polar_dual().unwrap();
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
        let cfg = build_cicy_config(&dual.nabla_parts).unwrap();
        assert_eq!(cfg.ambient_rank, 13);
        assert_eq!(cfg.r, 5);
        assert_eq!(cfg.num_columns(), 15);
        // Origin columns first.
        for k in 0..5 {
            assert!(cfg.columns[k][..5].iter().enumerate().all(|(i, x)| {
                if i == k {
                    x.is_one()
                } else {
                    x.is_zero()
                }
            }));
            assert!(cfg.columns[k][5..].iter().all(|x| x.is_zero()));
        }
        let ker = kernel_lattice(&cfg).unwrap();
        assert_eq!(ker.rank(), 2);
        // The classical relation vectors (-1^5; block selectors) span the
        // same lattice as the canonical basis.
        let a = cfg.a_matrix();
        for row in &ker.basis {
            assert!(a.mul_vec(row).iter().all(|x| x.is_zero()));
        }
        let mut l1 = vec![z(-1); 5];
        let mut l2 = vec![z(-1); 5];
        for j in 5..15 {
            // Column (e_k; nu) with nu in the first factor iff its last four
            // coordinates vanish.
            let first_factor = cfg.columns[j][9..].iter().all(|x| x.is_zero());
            l1.push(if first_factor { z(1) } else { z(0) });
            l2.push(if first_factor { z(0) } else { z(1) });
        }
        // Both classical vectors lie in the computed lattice: stacking them
        // on the basis does not change the Hermite form.
        let basis_hnf = ker.basis_matrix().hnf_rows();
        let mut stacked_rows = ker.basis.clone();
        stacked_rows.push(l1);
        stacked_rows.push(l2);
        let stacked_hnf = ZMat::from_z_rows(stacked_rows).hnf_rows();
        assert_eq!(basis_hnf.to_rows(), stacked_hnf.to_rows());
    }

    #[test]
    fn kernel_is_saturated() {
        // A configuration whose naive row-reduction kernel is easy to get
        // wrong: scaled relation (2, -2) would not be primitive.
        let cfg = build_explicit_config(
            1,
            vec![zp(&[1, 0]), zp(&[1, 2]), zp(&[1, 4])],
            None,
        )
        .unwrap();
        let ker = kernel_lattice(&cfg).unwrap();
        assert_eq!(ker.rank(), 1);
        assert_eq!(ker.basis[0], zp(&[-1, 2, -1]));
    }
}
