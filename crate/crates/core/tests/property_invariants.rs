//! Property-based checks of the exact-arithmetic kernels: normal forms,
//! kernel saturation, LP certificates, lattice-basis invariance, and
//! triangulation volume bookkeeping.

use num::{One, Signed, Zero};
use proptest::prelude::*;

use toricmirror_core::config::build_explicit_config;
use toricmirror_core::linalg::ZMat;
use toricmirror_core::lp::{maximize, LpOutcome, Rel, VarMode};
use toricmirror_core::num::{primitive_integer_vector, q, z, Q, Z};
use toricmirror_core::polytope::{hodge_numbers_hypersurface, LatticePolytope};
use toricmirror_core::triangulation::{
    enumerate_regular_triangulations, gkz_vector, is_maximal,
};

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=4, 1usize..=5).prop_flat_map(|(rows, cols)| {
        proptest::collection::vec(proptest::collection::vec(-6i64..=6, cols), rows)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// `U M V = D` with unimodular transforms and a divisibility chain on
    /// the diagonal.
    #[test]
    fn smith_decomposition_is_valid(rows in small_matrix()) {
        let m = ZMat::from_rows(&rows);
        let smith = m.smith();
        prop_assert!(smith.u.det().abs().is_one());
        prop_assert!(smith.v.det().abs().is_one());
        let product = smith.u.mul(&m).mul(&smith.v);
        prop_assert_eq!(product.to_rows(), smith.d.to_rows());
        let d = smith.d.to_rows();
        let mut diagonal = Vec::new();
        for (i, row) in d.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if i == j {
                    diagonal.push(v.clone());
                } else {
                    prop_assert!(v.is_zero(), "off-diagonal entry {v} at ({i}, {j})");
                }
            }
        }
        for w in diagonal.windows(2) {
            if !w[0].is_zero() {
                prop_assert!((&w[1] % &w[0]).is_zero(), "{} does not divide {}", w[0], w[1]);
            } else {
                prop_assert!(w[1].is_zero());
            }
        }
    }

    /// Row Hermite reduction is a normal form: reducing twice changes
    /// nothing, and the rank is preserved.
    #[test]
    fn hermite_reduction_is_idempotent(rows in small_matrix()) {
        let m = ZMat::from_rows(&rows);
        let once = m.hnf_rows();
        let twice = once.hnf_rows();
        prop_assert_eq!(once.to_rows(), twice.to_rows());
        prop_assert_eq!(m.rank(), once.rank());
    }

    /// Integer kernel rows annihilate the matrix and span a saturated
    /// lattice: every primitive rational kernel vector is an integer
    /// combination of them.
    #[test]
    fn kernel_rows_are_saturated(rows in small_matrix()) {
        let m = ZMat::from_rows(&rows);
        let kernel = m.kernel_rows();
        for i in 0..kernel.rows {
            let image = m.mul_vec(kernel.row(i));
            prop_assert!(image.iter().all(|x| x.is_zero()));
        }
        let rational = m.to_q().nullspace();
        prop_assert_eq!(rational.len(), kernel.rows);
        if kernel.rows == 0 {
            return Ok(());
        }
        let basis_t = kernel.to_q().transpose();
        for v in rational {
            let primitive = primitive_integer_vector(&v).expect("nonzero nullspace vector");
            let rhs: Vec<Q> = primitive.iter().map(|x| Q::from_integer(x.clone())).collect();
            let combo = basis_t.solve(&rhs);
            prop_assert!(combo.is_some(), "kernel vector outside the computed lattice");
            for c in combo.unwrap() {
                prop_assert!(c.denom().is_one(), "non-integer combination: lattice not saturated");
            }
        }
    }
}

fn lp_instance() -> impl Strategy<
    Value = (Vec<i64>, Vec<(Vec<i64>, u8, i64)>),
> {
    (2usize..=3).prop_flat_map(|n| {
        let objective = proptest::collection::vec(-3i64..=3, n);
        let constraint = (
            proptest::collection::vec(-3i64..=3, n),
            0u8..=2,
            -5i64..=5,
        );
        (objective, proptest::collection::vec(constraint, 1..=4))
    })
}

fn rel_of(tag: u8) -> Rel {
    match tag {
        0 => Rel::Le,
        1 => Rel::Ge,
        _ => Rel::Eq,
    }
}

fn satisfies(point: &[Q], coef: &[Q], rel: &Rel, rhs: &Q) -> bool {
    let lhs: Q = coef.iter().zip(point).map(|(c, x)| c * x).sum();
    match rel {
        Rel::Le => lhs <= *rhs,
        Rel::Ge => lhs >= *rhs,
        Rel::Eq => lhs == *rhs,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// An optimal point replays against the constraints exactly, and an
    /// infeasibility verdict survives a grid search for counterexamples.
    #[test]
    fn lp_outcomes_replay_exactly((objective, raw) in lp_instance()) {
        let n = objective.len();
        let obj: Vec<Q> = objective.iter().map(|&c| q(c)).collect();
        let cons: Vec<(Vec<Q>, Rel, Q)> = raw
            .iter()
            .map(|(coef, tag, rhs)| {
                (coef.iter().map(|&c| q(c)).collect(), rel_of(*tag), q(*rhs))
            })
            .collect();
        match maximize(&obj, &cons, VarMode::NonNegative) {
            LpOutcome::Optimal { value, point } => {
                prop_assert_eq!(point.len(), n);
                prop_assert!(point.iter().all(|x| !x.is_negative()));
                for (coef, rel, rhs) in &cons {
                    prop_assert!(satisfies(&point, coef, rel, rhs));
                }
                let recomputed: Q = obj.iter().zip(&point).map(|(c, x)| c * x).sum();
                prop_assert_eq!(recomputed, value);
            }
            LpOutcome::Infeasible => {
                // No nonnegative integer point below 4 may be feasible.
                let mut grid = vec![0i64; n];
                loop {
                    let point: Vec<Q> = grid.iter().map(|&g| q(g)).collect();
                    let feasible =
                        cons.iter().all(|(coef, rel, rhs)| satisfies(&point, coef, rel, rhs));
                    prop_assert!(!feasible, "grid point {grid:?} refutes infeasibility");
                    let mut carry = 0;
                    while carry < n {
                        grid[carry] += 1;
                        if grid[carry] <= 3 {
                            break;
                        }
                        grid[carry] = 0;
                        carry += 1;
                    }
                    if carry == n {
                        break;
                    }
                }
            }
            LpOutcome::Unbounded => {}
        }
    }
}

/// A random word in elementary row operations: an integer unimodular matrix.
fn unimodular() -> impl Strategy<Value = Vec<Vec<i64>>> {
    let op = prop_oneof![
        (0usize..4, 0usize..4, -2i64..=2).prop_map(|(i, j, k)| (0u8, i, j, k)),
        (0usize..4, 0usize..4).prop_map(|(i, j)| (1u8, i, j, 0)),
        (0usize..4).prop_map(|i| (2u8, i, 0, 0)),
    ];
    proptest::collection::vec(op, 0..8).prop_map(|ops| {
        let mut m = vec![vec![0i64; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        for (tag, i, j, k) in ops {
            match tag {
                0 if i != j => {
                    let source: Vec<i64> = m[i].clone();
                    for (t, s) in m[j].iter_mut().zip(source) {
                        *t += k * s;
                    }
                }
                1 => m.swap(i, j),
                2 => {
                    for t in m[i].iter_mut() {
                        *t = -*t;
                    }
                }
                _ => {}
            }
        }
        m
    })
}

fn apply_basis_change(u: &[Vec<i64>], points: &[Vec<i64>]) -> Vec<Vec<Z>> {
    points
        .iter()
        .map(|p| {
            (0..4)
                .map(|r| z((0..4).map(|c| u[r][c] * p[c]).sum()))
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Reflexivity, lattice point counts, and Hodge numbers are lattice
    /// invariants: any change of basis preserves them.
    #[test]
    fn polytope_invariants_survive_basis_change(u in unimodular()) {
        let shapes: Vec<Vec<Vec<i64>>> = vec![
            // Simplex whose fan gives P^4.
            vec![
                vec![1, 0, 0, 0],
                vec![0, 1, 0, 0],
                vec![0, 0, 1, 0],
                vec![0, 0, 0, 1],
                vec![-1, -1, -1, -1],
            ],
            // Cross-polytope.
            vec![
                vec![1, 0, 0, 0],
                vec![-1, 0, 0, 0],
                vec![0, 1, 0, 0],
                vec![0, -1, 0, 0],
                vec![0, 0, 1, 0],
                vec![0, 0, -1, 0],
                vec![0, 0, 0, 1],
                vec![0, 0, 0, -1],
            ],
        ];
        for shape in shapes {
            let original = LatticePolytope::new(
                4,
                shape.iter().map(|p| p.iter().map(|&x| z(x)).collect()).collect(),
            )
            .unwrap();
            let moved = LatticePolytope::new(4, apply_basis_change(&u, &shape)).unwrap();
            prop_assert_eq!(original.is_reflexive().unwrap(), moved.is_reflexive().unwrap());
            prop_assert_eq!(original.lattice_point_count(), moved.lattice_point_count());
            prop_assert_eq!(original.vertices().len(), moved.vertices().len());
            prop_assert_eq!(
                hodge_numbers_hypersurface(&original).unwrap(),
                hodge_numbers_hypersurface(&moved).unwrap()
            );
        }
    }
}

fn small_config_points() -> impl Strategy<Value = Vec<(i64, i64)>> {
    proptest::collection::btree_set((-2i64..=2, -2i64..=2), 3..=5)
        .prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Every regular triangulation of a configuration covers the same total
    /// volume, and each GKZ vector's entries sum to (dim + 1) times it.
    #[test]
    fn triangulations_share_total_volume(points in small_config_points()) {
        let mut columns = vec![vec![z(1), z(0), z(0)]];
        for (x, y) in &points {
            if (*x, *y) == (0, 0) {
                continue;
            }
            columns.push(vec![z(1), z(*x), z(*y)]);
        }
        let Ok(config) = build_explicit_config(1, columns, None) else {
            return Ok(());
        };
        let triangulations = enumerate_regular_triangulations(&config).unwrap();
        prop_assert!(!triangulations.is_empty());
        let totals: Vec<Z> = triangulations
            .iter()
            .map(|t| {
                let gkz = gkz_vector(&config, t).unwrap();
                gkz.into_iter().sum::<Z>()
            })
            .collect();
        for total in &totals {
            prop_assert_eq!(total.clone(), totals[0].clone());
            // Affine dimension 2: each simplex counts its volume three times.
            prop_assert!((total % z(3)).is_zero());
        }
        for t in &triangulations {
            for simplex in &t.simplices {
                prop_assert_eq!(simplex.len(), 3);
            }
            let gkz = gkz_vector(&config, t).unwrap();
            prop_assert!(gkz.iter().all(|v| !v.is_negative()));
            if is_maximal(&config, t) {
                prop_assert!(gkz.iter().all(|v| v.is_positive()));
            }
        }
    }
}
