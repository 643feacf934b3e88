//! Small dense complex Hermitian linear algebra.
//!
//! Everything in the crate that needs a spectrum goes through the cyclic
//! Jacobi solver in this module, so eigenvector phases and the ordering of
//! degenerate eigenvectors are reproducible bit for bit.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Construction tolerance for the Hermiticity check.
pub const HERMITIAN_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 64;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A d x d complex Hermitian matrix, d >= 2.
///
/// The stored matrix is exactly Hermitian: the strict lower triangle is the
/// conjugate of the upper one and the diagonal is real.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    m: CMatrix,
}

impl HermitianOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let d = m.nrows();
        if d < 2 {
            return Err(Error::DimensionTooSmall { min: 2, got: d });
        }
        for i in 0..d {
            for j in i..d {
                let deviation = (m[(i, j)] - m[(j, i)].conj()).norm();
                if deviation > HERMITIAN_TOL || !deviation.is_finite() {
                    return Err(Error::NotHermitian {
                        row: i,
                        col: j,
                        deviation,
                    });
                }
            }
        }
        Ok(Self::hermitize(m))
    }

    /// Builds from separate real and imaginary parts, given row by row.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let d = re.len();
        if im.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: im.len(),
            });
        }
        for row in re.iter().chain(im) {
            if row.len() != d {
                return Err(Error::NotSquare {
                    rows: d,
                    cols: row.len(),
                });
            }
        }
        Self::new(CMatrix::from_fn(d, d, |i, j| c(re[i][j], im[i][j])))
    }

    /// Builds from complex rows, e.g. `[[c(0,0), c(0,1)], [c(0,-1), c(0,0)]]`.
    pub fn from_rows<const D: usize>(rows: [[Complex64; D]; D]) -> Result<Self> {
        Self::new(CMatrix::from_fn(D, D, |i, j| rows[i][j]))
    }

    /// Builds from real symmetric rows.
    pub fn from_real<const D: usize>(rows: [[f64; D]; D]) -> Result<Self> {
        Self::new(CMatrix::from_fn(D, D, |i, j| c(rows[i][j], 0.0)))
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let d = values.len();
        Self::new(CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                c(values[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        }))
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::diagonal(&vec![1.0; d])
    }

    fn hermitize(mut m: CMatrix) -> Self {
        let d = m.nrows();
        for i in 0..d {
            m[(i, i)] = c(m[(i, i)].re, 0.0);
            for j in i + 1..d {
                let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
        }
        Self { m }
    }

    /// Hermitian part of an arbitrary square matrix, `(m + m^dagger) / 2`.
    pub fn hermitian_part(m: &CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() < 2 {
            return Err(Error::DimensionTooSmall {
                min: 2,
                got: m.nrows(),
            });
        }
        Ok(Self::hermitize(m.clone()))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    /// `sum_i coeffs[i] * ops[i]`.
    pub fn linear_combination(coeffs: &[f64], ops: &[HermitianOperator]) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty operator list".into()))?;
        if coeffs.len() != ops.len() {
            return Err(Error::DimensionMismatch {
                expected: ops.len(),
                found: coeffs.len(),
            });
        }
        let d = first.dim();
        let mut m = CMatrix::zeros(d, d);
        for (&w, op) in coeffs.iter().zip(ops) {
            if op.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: op.dim(),
                });
            }
            m.zip_apply(&op.m, |acc, x| *acc += x * w);
        }
        Ok(Self::hermitize(m))
    }

    /// `a * self + b * I`.
    pub fn affine(&self, a: f64, b: f64) -> Self {
        let mut m = self.m.map(|x| x * a);
        for i in 0..self.dim() {
            m[(i, i)] += b;
        }
        Self::hermitize(m)
    }

    /// `U self U^dagger`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.nrows(),
            });
        }
        Ok(Self::hermitize(u * &self.m * u.adjoint()))
    }

    /// Block-diagonal direct sum `self (+) other`.
    pub fn direct_sum(&self, other: &HermitianOperator) -> Self {
        let (a, b) = (self.dim(), other.dim());
        let mut m = CMatrix::zeros(a + b, a + b);
        m.view_mut((0, 0), (a, a)).copy_from(&self.m);
        m.view_mut((a, a), (b, b)).copy_from(&other.m);
        Self { m }
    }

    /// `lambda_max - lambda_min`.
    pub fn spectral_range(&self) -> Result<f64> {
        let values = eigvalsh(self)?;
        Ok(values[values.len() - 1] - values[0])
    }

    /// Coordinates in the real basis of Hermitian matrices: diagonal entries
    /// followed by `sqrt(2) Re` and `sqrt(2) Im` of the strict upper triangle.
    /// The map is an isometry for the Frobenius inner product.
    pub fn real_coordinates(&self) -> Vec<f64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            out.push(self.m[(i, i)].re);
        }
        let r2 = std::f64::consts::SQRT_2;
        for i in 0..d {
            for j in i + 1..d {
                out.push(r2 * self.m[(i, j)].re);
                out.push(r2 * self.m[(i, j)].im);
            }
        }
        out
    }

    /// `<v|self|v>` for an arbitrary (not necessarily normalized) vector.
    pub fn quadratic_form(&self, v: &CVector) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for i in 0..d {
            let vi = v[i];
            acc += self.m[(i, i)].re * vi.norm_sqr();
            for j in i + 1..d {
                acc += 2.0 * (vi.conj() * self.m[(i, j)] * v[j]).re;
            }
        }
        acc
    }
}

/// Eigenvalues in ascending order with eigenvectors as matching columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).into_owned()
    }

    pub fn ground_energy(&self) -> f64 {
        self.values[0]
    }

    /// `lambda_1 - lambda_0`, clamped at zero.
    pub fn gap(&self) -> f64 {
        (self.values[1] - self.values[0]).max(0.0)
    }

    pub fn range(&self) -> f64 {
        self.values[self.dim() - 1] - self.values[0]
    }

    /// `sum_k lambda_k v_k v_k^dagger`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for k in 0..d {
            let v = self.vectors.column(k);
            m += (&v * v.adjoint()) * c(self.values[k], 0.0);
        }
        m
    }
}

/// Full eigendecomposition by cyclic complex Jacobi rotations.
///
/// Eigenvalues come out ascending. Each eigenvector is scaled so its first
/// component of magnitude above `1e-10` is real and positive. Within a
/// cluster of eigenvalues closer than `1e-12 (1 + range)` the eigenvectors
/// are ordered lexicographically (descending) on their `(re, im)` entries.
pub fn eigh(h: &HermitianOperator) -> Result<Spectrum> {
    let d = h.dim();
    let (diag, vectors) = jacobi(h, true)?;
    let vectors = vectors.expect("vectors requested");

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
    let values: Vec<f64> = order.iter().map(|&k| diag[k]).collect();

    let mut cols: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&k| {
            let mut col: Vec<Complex64> = (0..d).map(|i| vectors[i * d + k]).collect();
            fix_phase(&mut col);
            col
        })
        .collect();

    let tie_tol = 1e-12 * (1.0 + values[d - 1] - values[0]);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && values[end] - values[end - 1] <= tie_tol {
            end += 1;
        }
        if end - start > 1 {
            cols[start..end].sort_by(|a, b| lexicographic_desc(a, b));
        }
        start = end;
    }

    let vectors = CMatrix::from_fn(d, d, |i, k| cols[k][i]);
    Ok(Spectrum { values, vectors })
}

/// Eigenvalues only (ascending); the same Jacobi iteration without the
/// eigenvector accumulation.
pub fn eigvalsh(h: &HermitianOperator) -> Result<Vec<f64>> {
    let (mut diag, _) = jacobi(h, false)?;
    diag.sort_by(f64::total_cmp);
    Ok(diag)
}

fn fix_phase(col: &mut [Complex64]) {
    let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(idx) = col
        .iter()
        .position(|z| z.norm() > 1e-10 * max.max(f64::MIN_POSITIVE))
    {
        let pivot = col[idx];
        let phase = pivot.conj() / pivot.norm();
        for z in col.iter_mut() {
            *z *= phase;
        }
        col[idx] = c(pivot.norm(), 0.0);
    }
}

fn lexicographic_desc(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im));
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    std::cmp::Ordering::Equal
}

/// Returns the unsorted diagonal and, optionally, the row-major
/// accumulated rotation matrix.
fn jacobi(h: &HermitianOperator, want_vectors: bool) -> Result<(Vec<f64>, Option<Vec<Complex64>>)> {
    let d = h.dim();
    let mut a: Vec<Complex64> = (0..d * d).map(|k| h.m[(k / d, k % d)]).collect();
    let mut v: Option<Vec<Complex64>> = want_vectors.then(|| {
        (0..d * d)
            .map(|k| {
                if k / d == k % d {
                    c(1.0, 0.0)
                } else {
                    c(0.0, 0.0)
                }
            })
            .collect()
    });

    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let off_norm = |a: &[Complex64]| -> f64 {
        let mut s = 0.0;
        for p in 0..d {
            for q in p + 1..d {
                s += a[p * d + q].norm_sqr();
            }
        }
        (2.0 * s).sqrt()
    };

    let mut off = off_norm(&a);
    let mut sweeps = 0;
    while off > 1e-15 * norm && off > f64::MIN_POSITIVE {
        if sweeps == MAX_SWEEPS {
            if off <= 1e-12 * norm {
                break;
            }
            return Err(Error::NoConvergence {
                dim: d,
                sweeps,
                off_norm: off,
            });
        }
        for p in 0..d {
            for q in p + 1..d {
                rotate(&mut a, v.as_deref_mut(), d, p, q);
            }
        }
        sweeps += 1;
        let next = off_norm(&a);
        // Rounding floor reached: further sweeps cannot reduce the norm.
        if next >= off && next <= 1e-12 * norm {
            break;
        }
        off = next;
    }

    let diag = (0..d).map(|i| a[i * d + i].re).collect();
    Ok((diag, v))
}

#[inline]
fn rotate(a: &mut [Complex64], v: Option<&mut [Complex64]>, d: usize, p: usize, q: usize) {
    let b = a[p * d + q];
    let abs_b = b.norm();
    if abs_b == 0.0 {
        return;
    }
    let phase = b / abs_b;
    let app = a[p * d + p].re;
    let aqq = a[q * d + q].re;
    let tau = (aqq - app) / (2.0 * abs_b);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;

    // U restricted to (p, q): [[c, s], [-s conj(phase), c conj(phase)]]
    let u_pp = c(cs, 0.0);
    let u_pq = c(sn, 0.0);
    let u_qp = -phase.conj() * sn;
    let u_qq = phase.conj() * cs;

    // A <- A U
    for k in 0..d {
        let akp = a[k * d + p];
        let akq = a[k * d + q];
        a[k * d + p] = akp * u_pp + akq * u_qp;
        a[k * d + q] = akp * u_pq + akq * u_qq;
    }
    // A <- U^dagger A
    for k in 0..d {
        let apk = a[p * d + k];
        let aqk = a[q * d + k];
        a[p * d + k] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[q * d + k] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[p * d + q] = c(0.0, 0.0);
    a[q * d + p] = c(0.0, 0.0);
    a[p * d + p] = c(app - t * abs_b, 0.0);
    a[q * d + q] = c(aqq + t * abs_b, 0.0);

    if let Some(v) = v {
        for k in 0..d {
            let vkp = v[k * d + p];
            let vkq = v[k * d + q];
            v[k * d + p] = vkp * u_pp + vkq * u_qp;
            v[k * d + q] = vkp * u_pq + vkq * u_qq;
        }
    }
}

/// A pure state vector or a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(CVector),
    Mixed(CMatrix),
}

impl QuantumState {
    pub fn pure(v: CVector) -> Result<Self> {
        let n2 = v.norm_squared();
        if v.len() < 2 || (n2 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!(
                "pure state must be a unit vector (squared norm {n2})"
            )));
        }
        Ok(Self::Pure(v))
    }

    /// Normalizes `v`; fails only for the zero vector.
    pub fn pure_normalized(v: CVector) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::pure(v.unscale(n))
    }

    pub fn mixed(rho: CMatrix) -> Result<Self> {
        let op = HermitianOperator::new(rho)
            .map_err(|e| Error::InvalidState(format!("density matrix: {e}")))?;
        let tr = op.trace();
        if (tr - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!(
                "density matrix trace {tr} != 1"
            )));
        }
        let min = eigvalsh(&op)?[0];
        if min < -1e-12 {
            return Err(Error::InvalidState(format!(
                "density matrix has negative eigenvalue {min}"
            )));
        }
        Ok(Self::Mixed(op.m))
    }

    pub fn basis(d: usize, k: usize) -> Self {
        Self::Pure(CVector::from_fn(d, |i, _| {
            if i == k {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        }))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::Mixed(CMatrix::identity(d, d) * c(1.0 / d as f64, 0.0))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Pure(v) => v.len(),
            Self::Mixed(rho) => rho.nrows(),
        }
    }

    pub fn as_pure(&self) -> Option<&CVector> {
        match self {
            Self::Pure(v) => Some(v),
            Self::Mixed(_) => None,
        }
    }

    pub fn density_matrix(&self) -> CMatrix {
        match self {
            Self::Pure(v) => v * v.adjoint(),
            Self::Mixed(rho) => rho.clone(),
        }
    }
}

/// `<psi|F|psi>` or `Tr(rho F)`.
pub fn expectation(f: &HermitianOperator, state: &QuantumState) -> Result<f64> {
    if f.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: state.dim(),
        });
    }
    Ok(match state {
        QuantumState::Pure(v) => f.quadratic_form(v),
        QuantumState::Mixed(rho) => {
            // Tr(rho F) = sum_ij rho_ij F_ji; the imaginary residue is discarded.
            let d = f.dim();
            let mut acc = 0.0;
            for i in 0..d {
                for j in 0..d {
                    acc += (rho[(i, j)] * f.m[(j, i)]).re;
                }
            }
            acc
        }
    })
}

/// Vector of independent standard complex Gaussians, normalized.
pub fn random_pure_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::from_fn(d, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            c(re, im)
        });
        let n = v.norm();
        if n > 1e-300 {
            return v.unscale(n);
        }
    }
}

/// Haar-random pure state, reproducible from `seed`.
pub fn random_pure_state(d: usize, seed: u64) -> Result<QuantumState> {
    if d < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: d });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(QuantumState::Pure(random_pure_vector(d, &mut rng)))
}

/// `sum_k p_k |x_k><x_k|` with `rank` Haar vectors and weights uniform on
/// the simplex. Returns the weights and vectors alongside the state.
pub fn random_mixture<R: Rng + ?Sized>(
    d: usize,
    rank: usize,
    rng: &mut R,
) -> (Vec<f64>, Vec<CVector>, QuantumState) {
    let mut weights: Vec<f64> = (0..rank)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let vectors: Vec<CVector> = (0..rank).map(|_| random_pure_vector(d, rng)).collect();
    let mut rho = CMatrix::zeros(d, d);
    for (w, x) in weights.iter().zip(&vectors) {
        rho += (x * x.adjoint()) * c(*w, 0.0);
    }
    let rho = HermitianOperator::hermitize(rho).m;
    (weights, vectors, QuantumState::Mixed(rho))
}

/// Hermitian part of a complex Ginibre matrix.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator {
    let m = CMatrix::from_fn(d, d, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    HermitianOperator::hermitian_part(&m).expect("square matrix of dimension >= 2")
}

/// Haar-random unitary via Gram-Schmidt on a complex Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<CVector> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v = CVector::from_fn(d, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            c(re, im)
        });
        for _ in 0..2 {
            for u in &cols {
                let proj = u.dotc(&v);
                v -= u * proj;
            }
        }
        let n = v.norm();
        if n > 1e-8 {
            cols.push(v.unscale(n));
        }
    }
    CMatrix::from_columns(&cols)
}

/// Orthonormalizes the columns of `x` in place order (modified Gram-Schmidt,
/// two passes).
pub fn orthonormalize_columns(x: &CMatrix) -> CMatrix {
    let mut cols: Vec<CVector> = Vec::with_capacity(x.ncols());
    for k in 0..x.ncols() {
        let mut v = x.column(k).into_owned();
        for _ in 0..2 {
            for u in &cols {
                let proj = u.dotc(&v);
                v -= u * proj;
            }
        }
        let n = v.norm();
        cols.push(if n > 0.0 { v.unscale(n) } else { v });
    }
    CMatrix::from_columns(&cols)
}

/// Max entrywise deviation of `U^dagger U` from the identity.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let p = u.adjoint() * u;
    let mut dev: f64 = 0.0;
    for i in 0..p.nrows() {
        for j in 0..p.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((p[(i, j)] - c(target, 0.0)).norm());
        }
    }
    dev
}
