use jnr_core::direction::uniform_sphere;
use jnr_core::fixtures;
use jnr_core::herm::QuantumState;
use jnr_core::photonic::{measure_tuple, prepare_state, similarity, solve_prep_angles};
use jnr_core::range::supporting_point;

#[test]
fn noiseless_measurements_reproduce_boundary_points() {
    for k in 1..=8 {
        let t = fixtures::class(k);
        for d in uniform_sphere(50, k as u64) {
            let b = supporting_point(&t, &d).unwrap();
            let recs = measure_tuple(&t, &b.ground_state, 0, 0, 1.0).unwrap();
            for (r, x) in recs.iter().zip(&b.point) {
                assert!((r.expectation - x).abs() < 1e-10, "class {k}");
            }
        }
    }
}

#[test]
fn prepared_ground_states_give_the_same_points() {
    let t = fixtures::class(6);
    for d in uniform_sphere(100, 4) {
        let b = supporting_point(&t, &d).unwrap();
        let psi = b.ground_state.as_pure().unwrap();
        let prepared = QuantumState::pure(prepare_state(&solve_prep_angles(psi).unwrap())).unwrap();
        let p = t.expectations_of(&prepared).unwrap();
        for (a, x) in p.iter().zip(&b.point) {
            assert!((a - x).abs() < 1e-10);
        }
    }
}

#[test]
fn reduced_visibility_lowers_similarity_to_the_ideal_distribution() {
    let t = fixtures::class(2);
    let b = supporting_point(&t, &uniform_sphere(1, 9)[0]).unwrap();
    let ideal = measure_tuple(&t, &b.ground_state, 0, 0, 1.0).unwrap();
    let noisy = measure_tuple(&t, &b.ground_state, 0, 0, 0.9).unwrap();
    for (i, n) in ideal.iter().zip(&noisy) {
        let s = similarity(&n.probabilities, &i.probabilities).unwrap();
        assert!(s < 1.0 && s > 0.9, "{s}");
    }
}

#[test]
fn sampling_is_reproducible_and_seed_dependent() {
    let t = fixtures::class(3);
    let psi = supporting_point(&t, &uniform_sphere(1, 2)[0])
        .unwrap()
        .ground_state;
    let a = measure_tuple(&t, &psi, 1000, 17, 1.0).unwrap();
    let b = measure_tuple(&t, &psi, 1000, 17, 1.0).unwrap();
    let c = measure_tuple(&t, &psi, 1000, 18, 1.0).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.iter().all(|r| r.counts.iter().sum::<u64>() == 1000));
}
