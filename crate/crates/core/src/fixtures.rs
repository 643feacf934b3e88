//! Built-in operator tuples: the eight irreducible `(s, e)` classes for
//! `d = n = 3`, two further Class 1 sets, Pauli operators and a few
//! reducible constructions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::herm::{c, random_hermitian, HermitianOperator};
use crate::range::OperatorTuple;

fn real3(rows: [[f64; 3]; 3]) -> HermitianOperator {
    HermitianOperator::from_real(rows).expect("fixture is Hermitian")
}

fn cplx3(rows: [[(f64, f64); 3]; 3]) -> HermitianOperator {
    HermitianOperator::from_rows(rows.map(|r| r.map(|(re, im)| c(re, im))))
        .expect("fixture is Hermitian")
}

fn tuple(ops: Vec<HermitianOperator>) -> OperatorTuple {
    OperatorTuple::new(ops).expect("fixture operators share a dimension")
}

fn proj2() -> HermitianOperator {
    real3([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
}

fn x01() -> HermitianOperator {
    real3([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
}

fn x02() -> HermitianOperator {
    real3([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
}

fn x12() -> HermitianOperator {
    real3([[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
}

/// `[[0, i, 1], [-i, 0, 0], [1, 0, 0]]`
fn f43() -> HermitianOperator {
    cplx3([
        [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)],
        [(0.0, -1.0), (0.0, 0.0), (0.0, 0.0)],
        [(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
    ])
}

fn operators(k: usize) -> [HermitianOperator; 3] {
    match k {
        1 => [
            x02(),
            cplx3([
                [(0.0, 0.0), (0.0, 0.0), (0.0, 1.0)],
                [(0.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
                [(0.0, -1.0), (0.0, 0.0), (0.0, 0.0)],
            ]),
            x12(),
        ],
        2 => [
            proj2(),
            real3([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]),
            f43(),
        ],
        3 => [
            proj2(),
            real3([[0.0, 1.0, -1.0], [1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]),
            real3([[1.0, 0.0, 0.0], [0.0, -1.0, 1.0], [0.0, 1.0, 0.0]]),
        ],
        4 => [proj2(), x01(), f43()],
        5 => [
            proj2(),
            real3([[1.0, 0.0, 1.0], [0.0, -1.0, 0.0], [1.0, 0.0, 0.0]]),
            x01(),
        ],
        6 => [
            cplx3([
                [(0.0, 0.0), (0.0, 1.0), (0.0, 0.0)],
                [(0.0, -1.0), (0.0, 0.0), (0.0, 0.0)],
                [(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)],
            ]),
            x01(),
            x02(),
        ],
        7 => [
            proj2(),
            real3([[0.0, 0.0, -1.0], [0.0, 0.0, 1.0], [-1.0, 1.0, 0.0]]),
            real3([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]),
        ],
        8 => [proj2(), x02(), x01()],
        _ => panic!("class index must be in 1..=8, got {k}"),
    }
}

/// Operator triple of irreducible class `k` (1..=8), with expected
/// `(s, e)` given by [`class_feature`].
pub fn class(k: usize) -> OperatorTuple {
    tuple(operators(k).to_vec())
}

/// Single operator `F_{k i}` (i in 1..=3).
pub fn class_operator(k: usize, i: usize) -> HermitianOperator {
    operators(k)[i - 1].clone()
}

/// `(s, e)` of class `k`.
pub fn class_feature(k: usize) -> (usize, usize) {
    [
        (0, 0),
        (0, 1),
        (0, 2),
        (0, 3),
        (0, 4),
        (1, 0),
        (1, 1),
        (1, 2),
    ][k - 1]
}

/// Class 1 set without ground-state degeneracies (same operators as class 1).
pub fn set_a() -> OperatorTuple {
    class(1)
}

/// Class 1 set with a single point-like degeneracy at `h = (1, 0, 0)`.
pub fn set_b() -> OperatorTuple {
    tuple(vec![proj2(), x02(), x12()])
}

pub fn pauli_x() -> HermitianOperator {
    HermitianOperator::from_real([[0.0, 1.0], [1.0, 0.0]]).expect("Hermitian")
}

pub fn pauli_y() -> HermitianOperator {
    HermitianOperator::from_rows([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]])
        .expect("Hermitian")
}

pub fn pauli_z() -> HermitianOperator {
    HermitianOperator::from_real([[1.0, 0.0], [0.0, -1.0]]).expect("Hermitian")
}

pub fn pauli_triple() -> OperatorTuple {
    tuple(vec![pauli_x(), pauli_y(), pauli_z()])
}

/// `(sigma_x, sigma_z)`.
pub fn pauli_pair() -> OperatorTuple {
    tuple(vec![pauli_x(), pauli_z()])
}

/// `(sigma_x (+) 0, sigma_z (+) 0)`: the Bloch disc with the extra level
/// sitting at its centre.
pub fn embedded_pauli_pair() -> OperatorTuple {
    let zero = HermitianOperator::diagonal(&[0.0, 0.0]).expect("d = 2");
    let pad = |f: HermitianOperator| {
        let m = f.direct_sum(&zero);
        HermitianOperator::new(m.matrix().view((0, 0), (3, 3)).into_owned()).expect("Hermitian")
    };
    tuple(vec![pad(pauli_x()), pad(pauli_z())])
}

/// `(F_51, F_53, F_53)`: linearly dependent, the rotated-triangle body.
pub fn reducible_triple() -> OperatorTuple {
    let [f1, _, f3] = operators(5);
    tuple(vec![f1, f3.clone(), f3])
}

/// `(sigma_x (+) 0, sigma_y (+) 0, 0 (+) 1)`: linearly independent but
/// block diagonal. The body is a cone over the Bloch disc, with a circle of
/// segment-type degeneracies and one elliptical base.
pub fn cone_triple() -> OperatorTuple {
    tuple(vec![
        x01(),
        cplx3([
            [(0.0, 0.0), (0.0, -1.0), (0.0, 0.0)],
            [(0.0, 1.0), (0.0, 0.0), (0.0, 0.0)],
            [(0.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
        ]),
        proj2(),
    ])
}

/// Seeded pair of random `d x d` Hermitians for nested-level sweeps.
pub fn random_pair(d: usize, seed: u64) -> OperatorTuple {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_hermitian(d, &mut rng);
    let b = random_hermitian(d, &mut rng);
    tuple(vec![a, b])
}

/// Every built-in operator triple with its name.
pub fn named_triples() -> Vec<(String, OperatorTuple)> {
    let mut out: Vec<(String, OperatorTuple)> =
        (1..=8).map(|k| (format!("class{k}"), class(k))).collect();
    out.push(("setA".into(), set_a()));
    out.push(("setB".into(), set_b()));
    out.push(("pauli".into(), pauli_triple()));
    out.push(("reducible".into(), reducible_triple()));
    out.push(("cone".into(), cone_triple()));
    out
}

/// Built-in tuple by name: `class1` .. `class8`, `setA`, `setB`, `pauli`,
/// `pauli_pair`, `embedded_pauli_pair`, `reducible`, `cone`.
pub fn by_name(name: &str) -> Option<OperatorTuple> {
    match name {
        "pauli_pair" => Some(pauli_pair()),
        "embedded_pauli_pair" => Some(embedded_pauli_pair()),
        _ => named_triples()
            .into_iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t),
    }
}
