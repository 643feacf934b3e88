//! Energy bands `E_k(theta, phi)` of the supporting Hamiltonian over the
//! direction sphere, and their gap closings.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::direction::{grid_axes, Direction};
use crate::error::{Error, Result};
use crate::flat::{self, grid_candidates, refine_seeds, FlatKind, Outcome, SearchConfig};
use crate::herm::eigvalsh;
use crate::range::OperatorTuple;

/// Default band grid, `theta x phi`.
pub const DEFAULT_BAND_RES: (usize, usize) = (181, 360);

#[derive(Debug, Clone, PartialEq)]
pub struct BandGrid {
    pub theta_res: usize,
    pub phi_res: usize,
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    /// `energies[k][i][j]` is the `k`-th eigenvalue at `(thetas[i], phis[j])`.
    pub energies: Vec<Vec<Vec<f64>>>,
}

impl BandGrid {
    pub fn levels(&self) -> usize {
        self.energies.len()
    }

    pub fn energy(&self, level: usize, i: usize, j: usize) -> f64 {
        self.energies[level][i][j]
    }

    /// `E_1 - E_0` at every node.
    pub fn gap01(&self) -> Vec<Vec<f64>> {
        self.energies[0]
            .iter()
            .zip(&self.energies[1])
            .map(|(r0, r1)| r0.iter().zip(r1).map(|(a, b)| b - a).collect())
            .collect()
    }

    pub fn min_gap(&self) -> f64 {
        self.gap01()
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn direction(&self, i: usize, j: usize) -> Direction {
        Direction::from_angles(self.thetas[i], self.phis[j])
    }
}

/// Eigenvalues of `H(theta, phi)` on a `theta_res x phi_res` grid.
pub fn band_surface(ops: &OperatorTuple, theta_res: usize, phi_res: usize) -> Result<BandGrid> {
    if ops.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: ops.len(),
        });
    }
    if theta_res < 16 || phi_res < 16 {
        return Err(Error::InvalidArgument(format!(
            "band grid must be at least 16x16, got {theta_res}x{phi_res}"
        )));
    }
    let (thetas, phis) = grid_axes(theta_res, phi_res);
    let rows: Vec<Vec<Vec<f64>>> = thetas
        .par_iter()
        .map(|&t| {
            phis.iter()
                .map(|&p| eigvalsh(&ops.hamiltonian(&Direction::from_angles(t, p).vector())?))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let d = ops.dim();
    let energies = (0..d)
        .map(|k| {
            rows.iter()
                .map(|row| row.iter().map(|ev| ev[k]).collect())
                .collect()
        })
        .collect();
    Ok(BandGrid {
        theta_res,
        phi_res,
        thetas,
        phis,
        energies,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Closing {
    pub direction: Direction,
    pub kind: FlatKind,
    pub refined_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    /// Smallest `E_1 - E_0` over the grid nodes.
    pub min_gap: f64,
    pub closings: Vec<Closing>,
}

impl GapReport {
    pub fn count(&self, kind: FlatKind) -> usize {
        self.closings.iter().filter(|c| c.kind == kind).count()
    }
}

/// Gap closings of `grid`, refined with the flat-portion search and checked
/// one-to-one against [`flat::classify`] within the merge radius.
pub fn locate_band_degeneracies(grid: &BandGrid, ops: &OperatorTuple) -> Result<GapReport> {
    locate_with(grid, ops, &SearchConfig::default())
}

pub fn locate_with(grid: &BandGrid, ops: &OperatorTuple, cfg: &SearchConfig) -> Result<GapReport> {
    if grid.levels() != ops.dim() {
        return Err(Error::DimensionMismatch {
            expected: ops.dim(),
            found: grid.levels(),
        });
    }
    let scale = ops.scale();
    let gaps = grid.gap01();
    let seeds = grid_candidates(&gaps, cfg.promote_rel * scale, 1e-12 * scale);
    let step = 0.5 * PI / (grid.theta_res - 1) as f64;
    let search = refine_seeds(ops, &seeds, step, cfg)?;
    let tau = cfg.tau_rel * scale;

    let reference = flat::classify_with(ops, cfg)?;
    let Outcome::Classified(reference) = reference else {
        return Err(Error::InvalidArgument(
            "band closings are only annotated for linearly independent triples".into(),
        ));
    };
    let known: Vec<_> = reference.degenerate_directions().collect();

    let mut closings = Vec::new();
    let mut matched = vec![false; known.len()];
    for (dir, gap) in search.accepted(tau) {
        let hit = known
            .iter()
            .enumerate()
            .filter(|(k, _)| !matched[*k])
            .map(|(k, f)| (k, f.at.direction.angle_to(&dir)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match hit {
            Some((k, angle)) if angle < cfg.merge_radius => {
                matched[k] = true;
                closings.push(Closing {
                    direction: dir,
                    kind: known[k].kind,
                    refined_gap: gap,
                });
            }
            _ => {
                return Err(Error::BandInconsistency(format!(
                    "closing at theta={:.6}, phi={:.6} (gap {gap:e}) has no matching flat portion",
                    dir.theta(),
                    dir.phi()
                )))
            }
        }
    }
    if let Some(k) = matched.iter().position(|m| !m) {
        let d = known[k].at.direction;
        return Err(Error::BandInconsistency(format!(
            "{} at theta={:.6}, phi={:.6} has no closing on the {}x{} band grid",
            known[k].kind,
            d.theta(),
            d.phi(),
            grid.theta_res,
            grid.phi_res
        )));
    }
    Ok(GapReport {
        min_gap: grid.min_gap(),
        closings,
    })
}
