//! Boundary sampling of joint numerical ranges through supporting
//! Hamiltonians `H(h) = sum_i h_i F_i`.
//!
//! The ground state of `H(h)` is a point of the range at which the plane
//! `{x : h . x = lambda_0(H(h))}` supports the convex hull from below.

use rayon::prelude::*;

use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::herm::{eigh, CMatrix, CVector, HermitianOperator, QuantumState};

/// A tuple `(F_1, ..., F_n)` of Hermitian operators of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTuple {
    ops: Vec<HermitianOperator>,
    scale: f64,
}

impl OperatorTuple {
    pub fn new(ops: Vec<HermitianOperator>) -> Result<Self> {
        let d = ops
            .first()
            .ok_or_else(|| Error::InvalidArgument("operator tuple is empty".into()))?
            .dim();
        let mut max_range: f64 = 0.0;
        for op in &ops {
            if op.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: op.dim(),
                });
            }
            max_range = max_range.max(op.spectral_range()?);
        }
        Ok(Self {
            ops,
            scale: 1.0 + max_range,
        })
    }

    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[HermitianOperator] {
        &self.ops
    }

    pub fn get(&self, i: usize) -> &HermitianOperator {
        &self.ops[i]
    }

    /// `1 + max_i (spectral range of F_i)`; multiplies absolute tolerances.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn hamiltonian(&self, h: &[f64]) -> Result<HermitianOperator> {
        HermitianOperator::linear_combination(h, &self.ops)
    }

    /// `(<v|F_1|v>, ..., <v|F_n|v>)` for a unit vector `v`.
    pub fn expectations(&self, v: &CVector) -> Vec<f64> {
        self.ops.iter().map(|f| f.quadratic_form(v)).collect()
    }

    pub fn expectations_of(&self, state: &QuantumState) -> Result<Vec<f64>> {
        self.ops
            .iter()
            .map(|f| crate::herm::expectation(f, state))
            .collect()
    }

    /// Subset of operators by index.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let ops = indices
            .iter()
            .map(|&i| {
                self.ops.get(i).cloned().ok_or_else(|| {
                    Error::InvalidArgument(format!("operator index {i} out of range"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ops)
    }

    /// Every operator conjugated by the same unitary.
    pub fn conjugated(&self, u: &CMatrix) -> Result<Self> {
        Self::new(
            self.ops
                .iter()
                .map(|f| f.conjugate_by(u))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// `F'_i = sum_j m[i][j] F_j + t[i] I`.
    pub fn affine_transformed(&self, m: &[Vec<f64>], t: &[f64]) -> Result<Self> {
        if m.len() != t.len() || m.iter().any(|row| row.len() != self.len()) {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: m.len(),
            });
        }
        let ops = m
            .iter()
            .zip(t)
            .map(|(row, &ti)| {
                HermitianOperator::linear_combination(row, &self.ops).map(|f| f.affine(1.0, ti))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ops)
    }

    /// Rank of `{F_1, ..., F_n, I}` as real vectors (singular values below
    /// `1e-10` times the largest count as zero).
    pub fn rank_with_identity(&self) -> usize {
        let d = self.dim();
        let mut rows: Vec<Vec<f64>> = self.ops.iter().map(|f| f.real_coordinates()).collect();
        rows.push(
            HermitianOperator::identity(d)
                .expect("d >= 2")
                .real_coordinates(),
        );
        crate::linalg::numerical_rank(&rows, 1e-10)
    }
}

/// Where a point of a [`PointCloud`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Direction(usize),
    Level { direction: usize, level: usize },
    Oracle(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub provenance: Vec<Provenance>,
}

impl PointCloud {
    pub fn new(dim: usize, points: Vec<Vec<f64>>, provenance: Vec<Provenance>) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidArgument(format!(
                "point clouds live in 2 or 3 dimensions, got {dim}"
            )));
        }
        if provenance.len() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                found: provenance.len(),
            });
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(
                    "point cloud contains a non-finite coordinate".into(),
                ));
            }
        }
        Ok(Self {
            dim,
            points,
            provenance,
        })
    }

    /// Points without provenance, tagged as oracle samples.
    pub fn from_points(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        let provenance = (0..points.len()).map(Provenance::Oracle).collect();
        Self::new(dim, points, provenance)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Ground-state data of one supporting Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySample {
    /// Unit direction `h` of the supporting Hamiltonian.
    pub h: Vec<f64>,
    /// `(<F_1>, ..., <F_n>)` in the returned ground state.
    pub point: Vec<f64>,
    /// `lambda_0(H(h))`.
    pub energy: f64,
    /// `lambda_1(H(h)) - lambda_0(H(h))`.
    pub gap: f64,
    pub ground_state: QuantumState,
}

/// Ground state of `H(h)` for a unit vector `h` of length `n`.
///
/// For a degenerate ground space the Jacobi eigenvector is returned as is;
/// it is one valid point of the flat, not a distinguished one.
pub fn supporting_point_h(ops: &OperatorTuple, h: &[f64]) -> Result<BoundarySample> {
    if h.len() != ops.len() {
        return Err(Error::DimensionMismatch {
            expected: ops.len(),
            found: h.len(),
        });
    }
    let spectrum = eigh(&ops.hamiltonian(h)?)?;
    let v = spectrum.vector(0);
    let point = ops.expectations(&v);
    Ok(BoundarySample {
        h: h.to_vec(),
        point,
        energy: spectrum.ground_energy(),
        gap: spectrum.gap(),
        ground_state: QuantumState::Pure(v),
    })
}

/// [`supporting_point_h`] for an operator triple.
pub fn supporting_point(ops: &OperatorTuple, dir: &Direction) -> Result<BoundarySample> {
    if ops.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: ops.len(),
        });
    }
    supporting_point_h(ops, &dir.vector())
}

/// [`supporting_point_h`] for an operator pair with `h = (cos a, sin a)`.
pub fn supporting_point_planar(ops: &OperatorTuple, angle: f64) -> Result<BoundarySample> {
    if ops.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: ops.len(),
        });
    }
    supporting_point_h(ops, &[angle.cos(), angle.sin()])
}

/// Boundary samples for a grid of directions, in grid order.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub samples: Vec<BoundarySample>,
}

impl Sweep {
    pub fn cloud(&self) -> PointCloud {
        let points = self.samples.iter().map(|s| s.point.clone()).collect();
        let provenance = (0..self.samples.len()).map(Provenance::Direction).collect();
        PointCloud {
            dim: self.samples.first().map_or(3, |s| s.point.len()),
            points,
            provenance,
        }
    }
}

pub fn sweep(ops: &OperatorTuple, grid: &[Direction]) -> Result<Sweep> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("direction grid is empty".into()));
    }
    let samples = grid
        .par_iter()
        .map(|d| supporting_point(ops, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(Sweep { samples })
}

pub fn sweep_planar(ops: &OperatorTuple, angles: &[f64]) -> Result<Sweep> {
    if angles.is_empty() {
        return Err(Error::InvalidArgument("angle grid is empty".into()));
    }
    let samples = angles
        .par_iter()
        .map(|&a| supporting_point_planar(ops, a))
        .collect::<Result<Vec<_>>>()?;
    Ok(Sweep { samples })
}

/// Expectation pairs of the `level`-th eigenvector of `cos(a) F_1 + sin(a) F_2`.
/// `level = 0` reproduces the boundary sweep.
pub fn level_sweep(ops: &OperatorTuple, level: usize, angles: &[f64]) -> Result<PointCloud> {
    if ops.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: ops.len(),
        });
    }
    if level >= ops.dim() {
        return Err(Error::InvalidArgument(format!(
            "level {level} out of range for d = {}",
            ops.dim()
        )));
    }
    let points = angles
        .par_iter()
        .map(|&a| -> Result<Vec<f64>> {
            let s = eigh(&ops.hamiltonian(&[a.cos(), a.sin()])?)?;
            Ok(ops.expectations(&s.vector(level)))
        })
        .collect::<Result<Vec<_>>>()?;
    let provenance = (0..angles.len())
        .map(|direction| Provenance::Level { direction, level })
        .collect();
    PointCloud::new(2, points, provenance)
}

/// Coordinates `(axes.0, axes.1)` of each point, provenance kept.
pub fn project(cloud: &PointCloud, axes: (usize, usize)) -> Result<PointCloud> {
    let (i, j) = axes;
    if i == j || i >= cloud.dim || j >= cloud.dim {
        return Err(Error::InvalidArgument(format!(
            "invalid projection axes ({i}, {j}) for dimension {}",
            cloud.dim
        )));
    }
    let points = cloud.points.iter().map(|p| vec![p[i], p[j]]).collect();
    Ok(PointCloud {
        dim: 2,
        points,
        provenance: cloud.provenance.clone(),
    })
}
