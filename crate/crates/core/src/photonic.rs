//! Prepare-and-measure simulation of a qutrit encoded in three optical modes.
//!
//! States come from a waveplate chain parameterized by [`PrepAngles`]. An
//! observable `F` is measured by rotating its eigenbasis onto the three
//! detector modes with `U_F = U_3 U_2 U_1`, a product of beam-splitter-like
//! blocks on mode pairs (0,1), (0,2) and (1,2), and counting clicks.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::herm::{c, eigh, unitarity_defect, CMatrix, CVector, HermitianOperator, QuantumState};
use crate::range::OperatorTuple;

/// Waveplate parameters of a pure qutrit,
/// `e^{i phi2} sA sB |0> + e^{i phi1} cA |1> - sA cB |2>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrepAngles {
    pub theta_a: f64,
    pub theta_b: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl PrepAngles {
    pub fn new(theta_a: f64, theta_b: f64, phi1: f64, phi2: f64) -> Result<Self> {
        if ![theta_a, theta_b, phi1, phi2].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidArgument(
                "preparation angles must be finite".into(),
            ));
        }
        Ok(Self {
            theta_a,
            theta_b,
            phi1,
            phi2,
        })
    }

    /// True when thetas lie in `[0, pi/2]` and phases in `[0, 2 pi)`.
    pub fn is_canonical(&self) -> bool {
        let t = |x: f64| (0.0..=FRAC_PI_2).contains(&x);
        let p = |x: f64| (0.0..TAU).contains(&x);
        t(self.theta_a) && t(self.theta_b) && p(self.phi1) && p(self.phi2)
    }
}

fn expi(x: f64) -> Complex64 {
    c(x.cos(), x.sin())
}

/// Output of the preparation chain; unit norm by construction.
pub fn prepare_state(a: &PrepAngles) -> CVector {
    let (sa, ca) = a.theta_a.sin_cos();
    let (sb, cb) = a.theta_b.sin_cos();
    CVector::from_vec(vec![
        expi(a.phi2) * (sa * sb),
        expi(a.phi1) * ca,
        c(-sa * cb, 0.0),
    ])
}

/// Multiplies `v` by the phase making its first component of magnitude
/// above `1e-12` real and positive.
pub fn canonical_phase(v: &CVector) -> CVector {
    match v.iter().find(|z| z.norm() > 1e-12) {
        Some(z) => v * (z.conj() / z.norm()),
        None => v.clone(),
    }
}

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y >= TAU {
        0.0
    } else {
        y
    }
}

/// Angles reproducing `psi` up to a global phase. Thetas are taken in
/// `[0, pi/2]`; free parameters are set to 0.
pub fn solve_prep_angles(psi: &CVector) -> Result<PrepAngles> {
    if psi.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: psi.len(),
        });
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!("state norm {norm} is not 1")));
    }
    let (a0, a1, a2) = (psi[0], psi[1], psi[2]);
    let sa = a0.norm().hypot(a2.norm());
    let theta_a = sa.atan2(a1.norm());
    const TINY: f64 = 1e-14;
    // Global phase: make the |2> amplitude real negative, or the |0>
    // amplitude real positive when |2> is absent, or |1> real otherwise.
    let gauge = if a2.norm() > TINY {
        -(a2.conj() / a2.norm())
    } else if a0.norm() > TINY {
        a0.conj() / a0.norm()
    } else if a1.norm() > TINY {
        a1.conj() / a1.norm()
    } else {
        c(1.0, 0.0)
    };
    let (b0, b1) = (a0 * gauge, a1 * gauge);
    let theta_b = if sa > TINY {
        a0.norm().atan2(a2.norm())
    } else {
        0.0
    };
    let phi1 = if b1.norm() > TINY {
        wrap(b1.arg())
    } else {
        0.0
    };
    let phi2 = if b0.norm() > TINY {
        wrap(b0.arg())
    } else {
        0.0
    };
    PrepAngles::new(theta_a, theta_b, phi1, phi2)
}

/// A 2x2 unitary on a fixed pair of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeBlock {
    pub stage: u8,
    pub block: CMatrix,
}

impl TwoModeBlock {
    /// Modes acted on: stage 1 -> (0, 1), stage 2 -> (0, 2), stage 3 -> (1, 2).
    pub fn modes(&self) -> (usize, usize) {
        match self.stage {
            1 => (0, 1),
            2 => (0, 2),
            _ => (1, 2),
        }
    }

    pub fn embed(&self) -> CMatrix {
        let (p, q) = self.modes();
        let mut m = CMatrix::identity(3, 3);
        m[(p, p)] = self.block[(0, 0)];
        m[(p, q)] = self.block[(0, 1)];
        m[(q, p)] = self.block[(1, 0)];
        m[(q, q)] = self.block[(1, 1)];
        m
    }
}

/// Column rotation on `(p, q)` that zeroes entry `(0, q)` of `u` when
/// applied on the right; returned as the 2x2 block `G` with `u <- u G`.
fn zeroing_block(u: &CMatrix, p: usize, q: usize) -> CMatrix {
    let (x, y) = (u[(0, p)], u[(0, q)]);
    let n = x.norm().hypot(y.norm());
    if y.norm() == 0.0 || n == 0.0 {
        return CMatrix::identity(2, 2);
    }
    CMatrix::from_row_slice(2, 2, &[x.conj() / n, -y / n, y.conj() / n, x / n])
}

fn embed_pair(g: &CMatrix, p: usize, q: usize) -> CMatrix {
    TwoModeBlock {
        stage: if (p, q) == (0, 1) { 1 } else { 2 },
        block: g.clone(),
    }
    .embed()
}

/// `[U_1, U_2, U_3]` with `U_3 U_2 U_1 = U`.
pub fn decompose_unitary(u: &CMatrix) -> Result<[TwoModeBlock; 3]> {
    if u.nrows() != 3 || u.ncols() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: u.nrows().max(u.ncols()),
        });
    }
    let deviation = unitarity_defect(u);
    if deviation > 1e-10 {
        return Err(Error::NotUnitary { deviation });
    }
    let g1 = zeroing_block(u, 0, 1);
    let w1 = u * embed_pair(&g1, 0, 1);
    let g2 = zeroing_block(&w1, 0, 2);
    let w = &w1 * embed_pair(&g2, 0, 2);
    // w = diag(r, 1, 1) (1 (+) B) with |r| = 1; the phase r joins U_2.
    let r = w[(0, 0)] / w[(0, 0)].norm();
    let b3 = CMatrix::from_row_slice(2, 2, &[w[(1, 1)], w[(1, 2)], w[(2, 1)], w[(2, 2)]]);
    let mut b2 = g2.adjoint();
    b2[(0, 0)] *= r;
    b2[(0, 1)] *= r;
    Ok([
        TwoModeBlock {
            stage: 1,
            block: g1.adjoint(),
        },
        TwoModeBlock {
            stage: 2,
            block: b2,
        },
        TwoModeBlock {
            stage: 3,
            block: b3,
        },
    ])
}

/// `U_3 U_2 U_1`.
pub fn compose(blocks: &[TwoModeBlock; 3]) -> CMatrix {
    blocks[2].embed() * blocks[1].embed() * blocks[0].embed()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSetup {
    pub observable: HermitianOperator,
    pub eigenvalues: Vec<f64>,
    /// Row `j` is the conjugated `j`-th eigenvector, so `U_F v_j = |j>`.
    pub u: CMatrix,
    pub blocks: [TwoModeBlock; 3],
}

pub fn measurement_unitary(f: &HermitianOperator) -> Result<MeasurementSetup> {
    if f.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: f.dim(),
        });
    }
    let s = eigh(f)?;
    let u = s.vectors.adjoint();
    let blocks = decompose_unitary(&u)?;
    Ok(MeasurementSetup {
        observable: f.clone(),
        eigenvalues: s.values,
        u,
        blocks,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountRecord {
    /// Zero for the noiseless mode.
    pub shots: u64,
    pub counts: [u64; 3],
    /// Empirical frequencies, or the exact probabilities when `shots = 0`.
    pub probabilities: [f64; 3],
    /// Detector probabilities before sampling (after visibility mixing).
    pub exact: [f64; 3],
    /// `sum_j p_j lambda_j` from `probabilities`.
    pub expectation: f64,
}

/// Exact detector probabilities `|<j| U_3 U_2 U_1 |psi>|^2` (diagonal of
/// `U rho U^dagger` for mixed input).
pub fn detector_probabilities(psi: &QuantumState, setup: &MeasurementSetup) -> Result<[f64; 3]> {
    if psi.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: psi.dim(),
        });
    }
    let u = compose(&setup.blocks);
    let mut q = [0.0; 3];
    match psi {
        QuantumState::Pure(v) => {
            let out = &u * v;
            for (j, qj) in q.iter_mut().enumerate() {
                *qj = out[j].norm_sqr();
            }
        }
        QuantumState::Mixed(rho) => {
            let out = &u * rho * u.adjoint();
            for (j, qj) in q.iter_mut().enumerate() {
                *qj = out[(j, j)].re.max(0.0);
            }
        }
    }
    let total: f64 = q.iter().sum();
    Ok(q.map(|x| x / total))
}

/// Three-outcome counts with multinomial shot noise. `visibility` mixes the
/// exact probabilities with the uniform distribution,
/// `p' = v q + (1 - v) / 3`; `shots = 0` returns `p'` without sampling.
pub fn simulate_measurement(
    psi: &QuantumState,
    setup: &MeasurementSetup,
    shots: u64,
    seed: u64,
    visibility: f64,
) -> Result<CountRecord> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(Error::InvalidArgument(format!(
            "visibility {visibility} outside [0, 1]"
        )));
    }
    let q = detector_probabilities(psi, setup)?;
    let exact = q.map(|x| visibility * x + (1.0 - visibility) / 3.0);
    let (counts, probabilities) = if shots == 0 {
        ([0; 3], exact)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let counts = multinomial(shots, &exact, &mut rng);
        (counts, counts.map(|n| n as f64 / shots as f64))
    };
    let expectation = probabilities
        .iter()
        .zip(&setup.eigenvalues)
        .map(|(p, l)| p * l)
        .sum();
    Ok(CountRecord {
        shots,
        counts,
        probabilities,
        exact,
        expectation,
    })
}

/// Sequential conditional binomials.
fn multinomial<R: rand::Rng + ?Sized>(n: u64, p: &[f64; 3], rng: &mut R) -> [u64; 3] {
    let mut out = [0u64; 3];
    let mut left = n;
    let mut mass = 1.0;
    for j in 0..2 {
        let pj = if mass > 0.0 {
            (p[j] / mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let k = Binomial::new(left, pj)
            .expect("probability in [0, 1]")
            .sample(rng);
        out[j] = k;
        left -= k;
        mass -= p[j];
    }
    out[2] = left;
    out
}

/// Independent stream seed for measurement `op` of state `state`.
pub fn derive_seed(base: u64, state: u64, op: u64) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    splitmix(base ^ splitmix(state.wrapping_mul(0x1_0000).wrapping_add(op)))
}

/// Measures every operator of `ops` on `psi`, one record per operator.
pub fn measure_tuple(
    ops: &OperatorTuple,
    psi: &QuantumState,
    shots: u64,
    seed: u64,
    visibility: f64,
) -> Result<Vec<CountRecord>> {
    ops.ops()
        .iter()
        .enumerate()
        .map(|(j, f)| {
            simulate_measurement(
                psi,
                &measurement_unitary(f)?,
                shots,
                derive_seed(seed, 0, j as u64),
                visibility,
            )
        })
        .collect()
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "negative or non-finite entry in {p:?}"
        )));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
    }
    Ok(())
}

/// `(sum_j sqrt(p_j q_j))^2`.
pub fn similarity(p: &[f64], p_th: &[f64]) -> Result<f64> {
    if p.len() != p_th.len() {
        return Err(Error::DimensionMismatch {
            expected: p_th.len(),
            found: p.len(),
        });
    }
    check_distribution(p)?;
    check_distribution(p_th)?;
    let b: f64 = p.iter().zip(p_th).map(|(a, b)| (a * b).sqrt()).sum();
    Ok((b * b).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Waveplate {
    Half,
    Quarter,
}

/// Jones matrix in the `(H, V)` basis with the fast axis at `angle` from H.
pub fn jones_waveplate(kind: Waveplate, angle: f64) -> CMatrix {
    let (s, co) = angle.sin_cos();
    match kind {
        Waveplate::Half => {
            let (s2, c2) = (2.0 * angle).sin_cos();
            CMatrix::from_row_slice(2, 2, &[c(c2, 0.0), c(s2, 0.0), c(s2, 0.0), c(-c2, 0.0)])
        }
        Waveplate::Quarter => CMatrix::from_row_slice(
            2,
            2,
            &[
                c(co * co, s * s),
                c(s * co, -s * co),
                c(s * co, -s * co),
                c(s * s, co * co),
            ],
        ),
    }
}

/// `QWP(45 deg) HWP(phi / 4) QWP(45 deg)`.
pub fn qhq_phase(phi: f64) -> CMatrix {
    let q = jones_waveplate(Waveplate::Quarter, PI / 4.0);
    &q * jones_waveplate(Waveplate::Half, phi / 4.0) * &q
}

/// Largest entry of `a - g b` over the best global phase `g`.
pub fn distance_up_to_phase(a: &CMatrix, b: &CMatrix) -> f64 {
    let overlap: Complex64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let g = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        c(1.0, 0.0)
    };
    (a - b * g).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
