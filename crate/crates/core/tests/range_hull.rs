use jnr_core::direction::{fibonacci_sphere, planar_angles, uniform_sphere, Direction};
use jnr_core::fixtures;
use jnr_core::herm::{random_hermitian, random_mixture, random_pure_vector};
use jnr_core::hull::{convex_hull, Hull};
use jnr_core::range::{
    level_sweep, project, supporting_point, supporting_point_h, sweep, sweep_planar, OperatorTuple,
};
use nalgebra::Matrix3;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn max_excess(hull: &Hull, points: &[Vec<f64>]) -> f64 {
    let m = hull.mesh().expect("full-dimensional hull");
    points
        .iter()
        .flat_map(|p| {
            m.face_normals
                .iter()
                .zip(&m.face_offsets)
                .map(move |(n, c)| n.iter().zip(p).map(|(a, b)| a * b).sum::<f64>() - c)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn pure_oracle(t: &OperatorTuple, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| t.expectations(&random_pure_vector(t.dim(), &mut rng)))
        .collect()
}

/// Distinct outward normals of the edges of a 2D polygon longer than
/// `min_len`, merged within `tol`, and the fraction of the perimeter they
/// carry.
fn long_edge_normals(hull: &Hull, min_len: f64, tol: f64) -> (Vec<[f64; 2]>, f64) {
    let m = hull.mesh().expect("polygon");
    let (mut out, mut long, mut total): (Vec<[f64; 2]>, f64, f64) = (Vec::new(), 0.0, 0.0);
    for (f, n) in m.faces.iter().zip(&m.face_normals) {
        let (a, b) = (&m.vertices[f[0]], &m.vertices[f[1]]);
        let len = (a[0] - b[0]).hypot(a[1] - b[1]);
        total += len;
        if len < min_len {
            continue;
        }
        long += len;
        if !out.iter().any(|o| (o[0] - n[0]).hypot(o[1] - n[1]) < tol) {
            out.push([n[0], n[1]]);
        }
    }
    (out, long / total)
}

#[test]
fn discretization_excess_shrinks_with_more_directions() {
    for t in [fixtures::pauli_triple(), fixtures::class(7)] {
        let oracle = pure_oracle(&t, 10_000, 3);
        let coarse = convex_hull(&sweep(&t, &fibonacci_sphere(2000)).unwrap().cloud()).unwrap();
        let fine = convex_hull(&sweep(&t, &fibonacci_sphere(8000)).unwrap().cloud()).unwrap();
        let (a, b) = (max_excess(&coarse, &oracle), max_excess(&fine, &oracle));
        assert!(a < 1e-2, "{a}");
        assert!(b < 0.5 * a, "{a} -> {b}");
    }
}

#[test]
fn mixed_states_lie_inside_the_fine_hull() {
    let t = fixtures::class(5);
    let hull = convex_hull(&sweep(&t, &fibonacci_sphere(8000)).unwrap().cloud()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..2000 {
        let (_, _, rho) = random_mixture(3, 2, &mut rng);
        assert!(hull.contains(&t.expectations_of(&rho).unwrap(), 1e-3));
    }
}

#[test]
fn class4_xy_projection_is_a_triangle() {
    let t = fixtures::class(4);
    let cloud = project(&sweep(&t, &fibonacci_sphere(4000)).unwrap().cloud(), (0, 1)).unwrap();
    let hull = convex_hull(&cloud).unwrap();
    let (normals, share) = long_edge_normals(&hull, 0.05, 1e-5);
    assert_eq!(normals.len(), 3, "{normals:?}");
    assert!(share > 0.99, "{share}");
    let r = 0.5f64.sqrt();
    for inward in [[1.0, 0.0], [-r, -r], [-r, r]] {
        assert!(
            normals
                .iter()
                .any(|n| (n[0] + inward[0]).hypot(n[1] + inward[1]) < 1e-5),
            "{inward:?} in {normals:?}"
        );
    }
}

#[test]
fn class8_xz_projection_is_a_triangle() {
    let t = fixtures::class(8);
    let cloud = project(&sweep(&t, &fibonacci_sphere(4000)).unwrap().cloud(), (0, 2)).unwrap();
    let (normals, share) = long_edge_normals(&convex_hull(&cloud).unwrap(), 0.05, 1e-5);
    assert_eq!(normals.len(), 3, "{normals:?}");
    assert!(share > 0.99, "{share}");
}

#[test]
fn projection_keeps_coordinates() {
    let cloud = sweep(&fixtures::class(3), &fibonacci_sphere(50))
        .unwrap()
        .cloud();
    let p = project(&cloud, (0, 2)).unwrap();
    for (a, b) in cloud.points.iter().zip(&p.points) {
        assert_eq!((a[0], a[2]), (b[0], b[1]));
    }
    assert!(project(&cloud, (1, 1)).is_err());
}

#[test]
fn pauli_pair_boundary_is_the_unit_circle() {
    let s = sweep_planar(&fixtures::pauli_pair(), &planar_angles(360)).unwrap();
    let k0 = level_sweep(&fixtures::pauli_pair(), 0, &planar_angles(360)).unwrap();
    for (b, p) in s.samples.iter().zip(&k0.points) {
        assert!((b.point[0].hypot(b.point[1]) - 1.0).abs() < 1e-12);
        assert!((b.point[0] - p[0]).abs() < 1e-12 && (b.point[1] - p[1]).abs() < 1e-12);
    }
}

#[test]
fn reducible_range_has_a_planar_hull() {
    let hull = convex_hull(
        &sweep(&fixtures::reducible_triple(), &fibonacci_sphere(500))
            .unwrap()
            .cloud(),
    )
    .unwrap();
    match hull {
        Hull::Degenerate(d) => assert_eq!(d.affine_rank, 2),
        Hull::Full(_) => panic!("expected a degenerate hull"),
    }
}

fn random_triple(seed: u64) -> OperatorTuple {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    OperatorTuple::new((0..3).map(|_| random_hermitian(3, &mut rng)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn affine_maps_carry_boundary_points(
        seed in any::<u64>(),
        m in prop::array::uniform9(-2.0f64..2.0),
        t in prop::array::uniform3(-1.0f64..1.0),
    ) {
        let mm = Matrix3::from_row_slice(&m);
        prop_assume!(mm.determinant().abs() > 0.1);
        let ops = random_triple(seed);
        let rows: Vec<Vec<f64>> = (0..3).map(|i| m[3 * i..3 * i + 3].to_vec()).collect();
        let mapped = ops.affine_transformed(&rows, &t).unwrap();
        let inv_t = mm.try_inverse().unwrap().transpose();
        for g in uniform_sphere(20, seed ^ 1) {
            let b = supporting_point(&ops, &g).unwrap();
            prop_assume!(b.gap > 1e-6);
            let h = inv_t * nalgebra::Vector3::from(g.vector());
            let h = h / h.norm();
            let b2 = supporting_point_h(&mapped, h.as_slice()).unwrap();
            let want = mm * nalgebra::Vector3::from_row_slice(&b.point) + nalgebra::Vector3::from(t);
            for k in 0..3 {
                prop_assert!((b2.point[k] - want[k]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn supporting_planes_bound_random_states(seed in any::<u64>(), theta in 0.0..std::f64::consts::PI, phi in 0.0..std::f64::consts::TAU) {
        let ops = random_triple(seed);
        let dir = Direction::from_angles(theta, phi);
        let b = supporting_point(&ops, &dir).unwrap();
        let h = dir.vector();
        let hp: f64 = h.iter().zip(&b.point).map(|(a, x)| a * x).sum();
        prop_assert!((hp - b.energy).abs() < 1e-10 * ops.scale());
        for q in pure_oracle(&ops, 200, seed ^ 2) {
            let hq: f64 = h.iter().zip(&q).map(|(a, x)| a * x).sum();
            prop_assert!(hq >= b.energy - 1e-9 * ops.scale());
        }
    }
}
