//! Flat portions of three-dimensional ranges and the `(s, e)` census.
//!
//! A flat portion sits where the supporting Hamiltonian `H(h)` has a
//! degenerate ground space. With `X` an orthonormal basis of that space the
//! compressed operators `G_i = X^dagger F_i X` satisfy `sum h_i G_i = E I`,
//! so `span {I, G_1, G_2, G_3}` has dimension 1, 2 or 3, which makes the
//! face a point, a segment or a filled ellipse.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::direction::{grid_axes, planar_angles, Direction};
use crate::error::{Error, Result};
use crate::herm::{
    c, eigh, eigvalsh, orthonormalize_columns, random_pure_vector, CMatrix, CVector,
    HermitianOperator,
};
use crate::linalg::{numerical_rank, principal_axes, singular_values, symmetric_eigen};
use crate::optimize::{brent, nelder_mead, NelderMeadConfig};
use crate::range::OperatorTuple;

/// Refined candidates with gap below this (times scale) get the axis polish.
const POLISH_REL: f64 = 1e-4;

/// Relative singular-value threshold for `dim S`.
pub const SPAN_REL_TOL: f64 = 1e-7;

/// Knobs of the degenerate-direction search. Absolute tolerances are these
/// relative values times the tuple scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub theta_res: usize,
    pub phi_res: usize,
    /// Refined gaps below `tau_rel * scale` count as degenerate.
    pub tau_rel: f64,
    /// Grid minima below `promote_rel * scale` are refined.
    pub promote_rel: f64,
    /// Directions closer than this (radians) are merged.
    pub merge_radius: f64,
    pub max_iterations: usize,
    pub simplex_tol: f64,
    /// Nelder–Mead restarts with a shrinking simplex.
    pub max_rounds: usize,
    /// Minimum number of segment directions lying on one circle before the
    /// degenerate set is reported as a curve.
    pub curve_min_points: usize,
    pub curve_residual: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            theta_res: 128,
            phi_res: 256,
            tau_rel: 1e-9,
            promote_rel: 1e-2,
            merge_radius: 1e-3,
            max_iterations: 200,
            simplex_tol: 1e-12,
            max_rounds: 8,
            curve_min_points: 12,
            curve_residual: 1e-6,
        }
    }
}

impl SearchConfig {
    /// Square-ish grid with `coarse_res` polar rows and twice as many
    /// azimuthal columns.
    pub fn with_resolution(coarse_res: usize) -> Self {
        Self {
            theta_res: coarse_res,
            phi_res: 2 * coarse_res,
            ..Self::default()
        }
    }
}

/// A direction whose supporting Hamiltonian has a (numerically) degenerate
/// ground space.
#[derive(Debug, Clone, PartialEq)]
pub struct DegenerateDirection {
    pub direction: Direction,
    pub refined_gap: f64,
    /// `d x 2`, orthonormal columns spanning the two lowest eigenvectors.
    pub x: CMatrix,
    pub energy: f64,
}

/// A refinement that did not settle on a degeneracy and did not converge.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchWarning {
    pub start: Direction,
    pub reached: Direction,
    pub gap: f64,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FlatKind {
    Point,
    Segment,
    Ellipse,
}

impl FlatKind {
    pub fn from_span_dim(dim_s: usize) -> Self {
        match dim_s {
            0 | 1 => FlatKind::Point,
            2 => FlatKind::Segment,
            _ => FlatKind::Ellipse,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            FlatKind::Point => "point",
            FlatKind::Segment => "segment",
            FlatKind::Ellipse => "ellipse",
        }
    }
}

impl fmt::Display for FlatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatPortion {
    pub at: DegenerateDirection,
    pub compressed: Vec<HermitianOperator>,
    pub dim_s: usize,
    pub kind: FlatKind,
}

impl FlatPortion {
    /// Largest entry of `sum h_i G_i - E I`.
    pub fn relation_residual(&self) -> f64 {
        let h = self.at.direction.vector();
        let mut m = CMatrix::zeros(2, 2);
        for (hi, g) in h.iter().zip(&self.compressed) {
            m += g.matrix().map(|z| z * *hi);
        }
        for k in 0..2 {
            m[(k, k)] -= c(self.at.energy, 0.0);
        }
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Images `(<G_1>, <G_2>, <G_3>)` of `n` pure states of the ground space.
    ///
    /// For an ellipse the states are taken on the Bloch great circle that
    /// the compression maps onto the rim, so the points trace its boundary.
    /// For segments and points the states are Haar random.
    pub fn image_points(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let states: Vec<CVector> = match self.kind {
            FlatKind::Ellipse => {
                let a =
                    DMatrix::from_fn(3, 3, |i, j| pauli_coefficients(&self.compressed[i])[j + 1]);
                let svd = a.svd(false, true);
                let vt = svd.v_t.expect("requested");
                let mut idx = [0usize, 1, 2];
                idx.sort_by(|&p, &q| svd.singular_values[q].total_cmp(&svd.singular_values[p]));
                let (u, v) = (vt.row(idx[0]).transpose(), vt.row(idx[1]).transpose());
                (0..n)
                    .map(|k| {
                        let t = 2.0 * PI * k as f64 / n as f64;
                        bloch_state(&(&u * t.cos() + &v * t.sin()))
                    })
                    .collect()
            }
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..n).map(|_| random_pure_vector(2, &mut rng)).collect()
            }
        };
        states
            .iter()
            .map(|psi| {
                self.compressed
                    .iter()
                    .map(|g| g.quadratic_form(psi))
                    .collect()
            })
            .collect()
    }
}

fn bloch_state(r: &nalgebra::DVector<f64>) -> CVector {
    let theta = r[2].clamp(-1.0, 1.0).acos();
    let phi = r[1].atan2(r[0]);
    CVector::from_vec(vec![
        c((theta / 2.0).cos(), 0.0),
        c(phi.cos(), phi.sin()) * (theta / 2.0).sin(),
    ])
}

/// Pauli coefficients `(tr G, tr G sx, tr G sy, tr G sz) / 2` of a 2x2
/// Hermitian.
pub fn pauli_coefficients(g: &HermitianOperator) -> [f64; 4] {
    let m = g.matrix();
    [
        (m[(0, 0)].re + m[(1, 1)].re) / 2.0,
        m[(0, 1)].re,
        -m[(0, 1)].im,
        (m[(0, 0)].re - m[(1, 1)].re) / 2.0,
    ]
}

/// `lambda_1 - lambda_0` of `H(h)`.
pub fn gap_function(ops: &OperatorTuple, dir: &Direction) -> Result<f64> {
    gap_at(ops, &dir.vector())
}

fn gap_at(ops: &OperatorTuple, h: &[f64]) -> Result<f64> {
    let ev = eigvalsh(&ops.hamiltonian(h)?)?;
    Ok((ev[1] - ev[0]).max(0.0))
}

/// `G_i = X^dagger F_i X` for each operator.
pub fn compress(ops: &OperatorTuple, x: &CMatrix) -> Result<Vec<HermitianOperator>> {
    if x.nrows() != ops.dim() {
        return Err(Error::DimensionMismatch {
            expected: ops.dim(),
            found: x.nrows(),
        });
    }
    ops.ops()
        .iter()
        .map(|f| HermitianOperator::hermitian_part(&(x.adjoint() * f.matrix() * x)))
        .collect()
}

/// Dimension of `span {I, G_1, ..., G_n}` for 2x2 Hermitians.
pub fn span_dim(g: &[HermitianOperator]) -> usize {
    let mut rows = vec![vec![1.0, 0.0, 0.0, 0.0]];
    rows.extend(g.iter().map(|gi| pauli_coefficients(gi).to_vec()));
    numerical_rank(&rows, SPAN_REL_TOL)
}

/// Outcome of the degenerate-direction search before thresholding, so that
/// several `tau` values can be applied to one search.
#[derive(Debug, Clone, PartialEq)]
pub struct Search {
    pub scale: f64,
    /// Refined candidates with their gaps, merged and sorted by `(theta, phi)`.
    pub candidates: Vec<(Direction, f64)>,
    pub warnings: Vec<SearchWarning>,
    pub config: SearchConfig,
}

impl Search {
    pub fn tau(&self) -> f64 {
        self.config.tau_rel * self.scale
    }

    /// Candidates below `tau`, merged again at the configured radius.
    pub fn accepted(&self, tau: f64) -> Vec<(Direction, f64)> {
        merge(
            self.candidates
                .iter()
                .filter(|(_, g)| *g < tau)
                .cloned()
                .collect(),
            self.config.merge_radius,
        )
    }
}

/// Gap values on the `(theta, phi)` grid, row-major in theta.
pub fn gap_grid(ops: &OperatorTuple, theta_res: usize, phi_res: usize) -> Result<Vec<Vec<f64>>> {
    let (thetas, phis) = grid_axes(theta_res, phi_res);
    thetas
        .par_iter()
        .map(|&t| {
            phis.iter()
                .map(|&p| gap_function(ops, &Direction::from_angles(t, p)))
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

/// Grid nodes worth refining: local minima of `gaps` (poles counted once)
/// that are below `promote` or strictly below every neighbour by more than
/// `strict`.
pub fn grid_candidates(gaps: &[Vec<f64>], promote: f64, strict: f64) -> Vec<Direction> {
    let rows = gaps.len();
    let cols = gaps.first().map_or(0, |r| r.len());
    if rows < 3 || cols < 3 {
        return Vec::new();
    }
    let (thetas, phis) = grid_axes(rows, cols);
    let mut out = Vec::new();
    let mut consider = |value: f64, neighbours: &mut dyn Iterator<Item = f64>, dir: Direction| {
        let mut lowest = f64::INFINITY;
        for nb in neighbours {
            lowest = lowest.min(nb);
        }
        if value <= lowest && (value < promote || value < lowest - strict) {
            out.push(dir);
        }
    };
    for (pole, next) in [(0, 1), (rows - 1, rows - 2)] {
        consider(
            gaps[pole][0],
            &mut gaps[next].iter().copied(),
            Direction::from_angles(thetas[pole], 0.0),
        );
    }
    for i in 1..rows - 1 {
        for j in 0..cols {
            let mut nbs = Vec::with_capacity(8);
            for di in [-1i64, 0, 1] {
                let ii = (i as i64 + di) as usize;
                if ii == 0 || ii == rows - 1 {
                    nbs.push(gaps[ii][0]);
                    continue;
                }
                for dj in [-1i64, 0, 1] {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    nbs.push(gaps[ii][(j as i64 + dj).rem_euclid(cols as i64) as usize]);
                }
            }
            consider(
                gaps[i][j],
                &mut nbs.into_iter(),
                Direction::from_angles(thetas[i], phis[j]),
            );
        }
    }
    out
}

/// Greedy merge: lowest gap first, dropping anything within `radius` of an
/// accepted direction. The result is sorted by `(theta, phi)`.
fn merge(mut found: Vec<(Direction, f64)>, radius: f64) -> Vec<(Direction, f64)> {
    found.sort_by(|a, b| {
        a.1.total_cmp(&b.1)
            .then(a.0.theta().total_cmp(&b.0.theta()))
            .then(a.0.phi().total_cmp(&b.0.phi()))
    });
    let mut kept: Vec<(Direction, f64)> = Vec::new();
    for (d, g) in found {
        if kept.iter().all(|(k, _)| k.angle_to(&d) >= radius) {
            kept.push((d, g));
        }
    }
    kept.sort_by(|a, b| {
        a.0.theta()
            .total_cmp(&b.0.theta())
            .then(a.0.phi().total_cmp(&b.0.phi()))
    });
    kept
}

/// Nelder–Mead on `gap^2` in the tangent chart at `start`, restarted with a
/// simplex ten times smaller each round.
fn nelder_mead_refine(
    ops: &OperatorTuple,
    start: &Direction,
    step: f64,
    cfg: &SearchConfig,
) -> (Direction, f64, bool) {
    let basis = start.tangent_basis();
    let objective = |x: &[f64]| {
        let d = start.chart(&basis, x[0], x[1]);
        gap_at(ops, &d.vector())
            .map(|g| g * g)
            .unwrap_or(f64::INFINITY)
    };
    let nm = NelderMeadConfig {
        max_iterations: cfg.max_iterations,
        simplex_tol: cfg.simplex_tol,
        value_tol: 0.0,
    };
    let mut x = vec![0.0, 0.0];
    let mut best = objective(&x);
    let mut step = step;
    let mut converged = false;
    for _ in 0..cfg.max_rounds {
        let m = nelder_mead(objective, &x, step, nm);
        converged = m.converged;
        let improved = m.value < best;
        if improved {
            x = m.x;
            best = m.value;
        }
        step *= 0.1;
        if !improved && converged || step < cfg.simplex_tol || best == 0.0 {
            break;
        }
    }
    (start.chart(&basis, x[0], x[1]), best.sqrt(), converged)
}

/// First-order response of the compressed ground-space block to tilting `h`
/// along the tangent vectors; its right singular vectors split the tangent
/// plane into a steep and a soft axis.
fn tilt_axes(ops: &OperatorTuple, dir: &Direction) -> Result<([f64; 3], [f64; 3])> {
    let spectrum = eigh(&ops.hamiltonian(&dir.vector())?)?;
    let x = orthonormalize_columns(&spectrum.vectors.columns(0, 2).into_owned());
    let g = compress(ops, &x)?;
    let (a, b) = dir.tangent_basis();
    let traceless = |t: [f64; 3]| -> Result<[f64; 3]> {
        let op = HermitianOperator::linear_combination(&t, &g)?;
        let p = pauli_coefficients(&op);
        Ok([p[1], p[2], p[3]])
    };
    let (ja, jb) = (traceless(a)?, traceless(b)?);
    let j = DMatrix::from_fn(3, 2, |r, col| if col == 0 { ja[r] } else { jb[r] });
    let svd = j.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let (first, second) = if svd.singular_values[0] >= svd.singular_values[1] {
        (0, 1)
    } else {
        (1, 0)
    };
    let combine = |row: usize| {
        [
            vt[(row, 0)] * a[0] + vt[(row, 1)] * b[0],
            vt[(row, 0)] * a[1] + vt[(row, 1)] * b[1],
            vt[(row, 0)] * a[2] + vt[(row, 1)] * b[2],
        ]
    };
    Ok((combine(first), combine(second)))
}

/// Nested Brent search: outer along the soft axis, inner along the steep
/// axis, each over `[-width, width]`.
fn polish(ops: &OperatorTuple, dir: &Direction, width: f64) -> Result<(Direction, f64)> {
    let (steep, soft) = tilt_axes(ops, dir)?;
    let h = dir.vector();
    let at = |s: f64, t: f64| {
        Direction::from_vector([
            h[0] + s * soft[0] + t * steep[0],
            h[1] + s * soft[1] + t * steep[1],
            h[2] + s * soft[2] + t * steep[2],
        ])
        .expect("small tilt of a unit vector")
    };
    const ABS_TOL: f64 = 1e-14;
    let inner = |s: f64| {
        let m = brent(
            |t| gap_at(ops, &at(s, t).vector()).unwrap_or(f64::INFINITY),
            -width,
            width,
            ABS_TOL,
            200,
        );
        (m.value, m.x[0])
    };
    let outer = brent(|s| inner(s).0, -width, width, ABS_TOL, 200);
    let s = outer.x[0];
    let (g, t) = inner(s);
    Ok((at(s, t), g))
}

/// Refine each seed direction and merge the results.
pub fn refine_seeds(
    ops: &OperatorTuple,
    seeds: &[Direction],
    step: f64,
    cfg: &SearchConfig,
) -> Result<Search> {
    if ops.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: ops.len(),
        });
    }
    let scale = ops.scale();
    let tau = cfg.tau_rel * scale;
    let coarse: Vec<(Direction, Direction, f64, bool)> = seeds
        .par_iter()
        .map(|s| {
            let (d, g, conv) = nelder_mead_refine(ops, s, step, cfg);
            (*s, d, g, conv)
        })
        .collect();

    let mut warnings = Vec::new();
    let mut promising = Vec::new();
    for (start, reached, gap, converged) in coarse {
        // Anything far from a closing after refinement is a genuine gap
        // minimum; the polish only helps candidates already close to zero.
        if gap < POLISH_REL * scale || gap < tau {
            promising.push((reached, gap));
        } else if !converged {
            warnings.push(SearchWarning {
                start,
                reached,
                gap,
                message: format!(
                    "refinement stopped after {} rounds without converging (gap {gap:e})",
                    cfg.max_rounds
                ),
            });
        }
    }
    let clusters = merge(promising, cfg.merge_radius);
    let polished: Vec<(Direction, f64)> = clusters
        .par_iter()
        .map(|(d, g)| -> Result<(Direction, f64)> {
            let (p, pg) = polish(ops, d, 5e-3)?;
            Ok(if pg <= *g { (p, pg) } else { (*d, *g) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Search {
        scale,
        candidates: merge(polished, cfg.merge_radius),
        warnings,
        config: *cfg,
    })
}

/// Grid scan plus refinement.
pub fn search(ops: &OperatorTuple, cfg: &SearchConfig) -> Result<Search> {
    if cfg.theta_res < 32 || cfg.phi_res < 32 {
        return Err(Error::InvalidArgument(format!(
            "coarse grid must be at least 32 in each direction, got {}x{}",
            cfg.theta_res, cfg.phi_res
        )));
    }
    let gaps = gap_grid(ops, cfg.theta_res, cfg.phi_res)?;
    let seeds = grid_candidates(&gaps, cfg.promote_rel * ops.scale(), 1e-12 * ops.scale());
    let step = 0.5 * PI / (cfg.theta_res - 1) as f64;
    refine_seeds(ops, &seeds, step, cfg)
}

/// Eigen-data at an accepted direction.
pub fn degenerate_direction(
    ops: &OperatorTuple,
    dir: Direction,
    gap: f64,
) -> Result<DegenerateDirection> {
    let spectrum = eigh(&ops.hamiltonian(&dir.vector())?)?;
    let x = orthonormalize_columns(&spectrum.vectors.columns(0, 2).into_owned());
    let energy = 0.5 * (spectrum.values[0] + spectrum.values[1]);
    Ok(DegenerateDirection {
        direction: dir,
        refined_gap: gap,
        x,
        energy,
    })
}

/// Degenerate directions with gap below `tau_deg` (absolute), searched on a
/// `coarse_res x 2 coarse_res` grid.
pub fn find_degenerate_directions(
    ops: &OperatorTuple,
    coarse_res: usize,
    tau_deg: f64,
) -> Result<(Vec<DegenerateDirection>, Vec<SearchWarning>)> {
    let cfg = SearchConfig {
        tau_rel: tau_deg / ops.scale(),
        ..SearchConfig::with_resolution(coarse_res)
    };
    let s = search(ops, &cfg)?;
    let dirs = s
        .accepted(tau_deg)
        .into_iter()
        .map(|(d, g)| degenerate_direction(ops, d, g))
        .collect::<Result<Vec<_>>>()?;
    Ok((dirs, s.warnings))
}

pub fn flat_portion(ops: &OperatorTuple, at: DegenerateDirection) -> Result<FlatPortion> {
    let compressed = compress(ops, &at.x)?;
    let dim_s = span_dim(&compressed);
    Ok(FlatPortion {
        at,
        compressed,
        dim_s,
        kind: FlatKind::from_span_dim(dim_s),
    })
}

/// Number of segments, `None` standing for a continuous family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segments {
    Finite(usize),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassLabel {
    pub s: Segments,
    pub e: usize,
    pub irreducible: bool,
}

impl ClassLabel {
    pub fn finite(s: usize, e: usize) -> Self {
        Self {
            s: Segments::Finite(s),
            e,
            irreducible: true,
        }
    }

    pub fn class_name(&self) -> String {
        match self.s {
            Segments::Finite(s) => format!("s{s}e{}", self.e),
            Segments::Infinite => format!("s_inf_e{}", self.e),
        }
    }

    /// `(s, e)` with `s = None` for infinitely many segments.
    pub fn counts(&self) -> (Option<usize>, usize) {
        match self.s {
            Segments::Finite(s) => (Some(s), self.e),
            Segments::Infinite => (None, self.e),
        }
    }

    /// One of the eight irreducible `(s, e)` pairs.
    pub fn is_irreducible_pattern(&self) -> bool {
        matches!(self.counts(), (Some(0), 0..=4) | (Some(1), 0..=2))
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.class_name())
    }
}

/// Degenerate directions of segment type lying on one circle of the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct DegenerateCurve {
    /// Unit normal and offset of the plane `n . h = c` cutting the circle.
    pub normal: [f64; 3],
    pub offset: f64,
    pub residual: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub label: ClassLabel,
    /// Segment and ellipse flats, by `(theta, phi)`.
    pub flats: Vec<FlatPortion>,
    /// Point-kind degeneracies; not counted in `(s, e)`.
    pub points: Vec<FlatPortion>,
    pub curve: Option<DegenerateCurve>,
    pub warnings: Vec<SearchWarning>,
    pub tau_deg: f64,
}

impl Classification {
    pub fn degenerate_directions(&self) -> impl Iterator<Item = &FlatPortion> {
        let mut all: Vec<&FlatPortion> = self.flats.iter().chain(&self.points).collect();
        all.sort_by(|a, b| {
            let (x, y) = (&a.at.direction, &b.at.direction);
            x.theta()
                .total_cmp(&y.theta())
                .then(x.phi().total_cmp(&y.phi()))
        });
        all.into_iter()
    }
}

/// Shape of the range of a pair of `3 x 3` Hermitians.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanarClass {
    Oval,
    FlatPortion,
    EllipsePlusPoint,
    Triangle,
    Unclassified { segments: usize, corners: usize },
}

impl PlanarClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            PlanarClass::Oval => "oval",
            PlanarClass::FlatPortion => "flat_portion",
            PlanarClass::EllipsePlusPoint => "ellipse_plus_point",
            PlanarClass::Triangle => "triangle",
            PlanarClass::Unclassified { .. } => "unclassified",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarReport {
    pub class: PlanarClass,
    /// Planar angles of segment-type degeneracies.
    pub segment_angles: Vec<f64>,
    /// Corner points with the angular width of their normal cones.
    pub corners: Vec<(Vec<f64>, f64)>,
}

/// The input was linearly dependent together with the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducibleInput {
    /// Rank of `{F_1, F_2, F_3, I}`.
    pub rank: usize,
    /// Indices of an independent pair carrying the whole range.
    pub pair: Option<(usize, usize)>,
    pub planar: Option<PlanarReport>,
    /// Class of the body obtained by rotating the planar range about its
    /// symmetry axis: triangle -> `s_inf_e1`, ellipse plus point -> `s_inf_e0`.
    pub label: Option<ClassLabel>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Classified(Classification),
    Reducible(ReducibleInput),
}

impl Outcome {
    pub fn label(&self) -> Option<&ClassLabel> {
        match self {
            Outcome::Classified(c) => Some(&c.label),
            Outcome::Reducible(r) => r.label.as_ref(),
        }
    }

    pub fn classification(&self) -> Option<&Classification> {
        match self {
            Outcome::Classified(c) => Some(c),
            Outcome::Reducible(_) => None,
        }
    }
}

fn check_classifiable(ops: &OperatorTuple) -> Result<()> {
    if ops.dim() != 3 || ops.len() != 3 {
        return Err(Error::UnsupportedForClassification {
            dim: ops.dim(),
            count: ops.len(),
        });
    }
    Ok(())
}

/// `(s, e)` class of a `d = 3` triple with the default search.
pub fn classify(ops: &OperatorTuple) -> Result<Outcome> {
    classify_with(ops, &SearchConfig::default())
}

pub fn classify_with(ops: &OperatorTuple, cfg: &SearchConfig) -> Result<Outcome> {
    check_classifiable(ops)?;
    let rank = ops.rank_with_identity();
    if rank < 4 {
        return reducible(ops, rank).map(Outcome::Reducible);
    }
    let s = search(ops, cfg)?;
    Ok(Outcome::Classified(census(ops, &s, s.tau())?))
}

/// Census of one search at threshold `tau` (absolute).
pub fn census(ops: &OperatorTuple, s: &Search, tau: f64) -> Result<Classification> {
    let mut flats = Vec::new();
    let mut points = Vec::new();
    for (d, g) in s.accepted(tau) {
        let f = flat_portion(ops, degenerate_direction(ops, d, g)?)?;
        if f.kind == FlatKind::Point {
            points.push(f);
        } else {
            flats.push(f);
        }
    }
    let segments: Vec<[f64; 3]> = flats
        .iter()
        .filter(|f| f.kind == FlatKind::Segment)
        .map(|f| f.at.direction.vector())
        .collect();
    let curve = fit_circle(
        &segments,
        s.config.curve_min_points,
        s.config.curve_residual,
    );
    let e = flats.iter().filter(|f| f.kind == FlatKind::Ellipse).count();
    let label = match curve {
        Some(_) => ClassLabel {
            s: Segments::Infinite,
            e,
            irreducible: false,
        },
        None => ClassLabel::finite(segments.len(), e),
    };
    Ok(Classification {
        label,
        flats,
        points,
        curve,
        warnings: s.warnings.clone(),
        tau_deg: tau,
    })
}

/// Plane through more than `min_points` unit vectors, if they all lie on it
/// within `max_residual`.
fn fit_circle(dirs: &[[f64; 3]], min_points: usize, max_residual: f64) -> Option<DegenerateCurve> {
    if dirs.len() <= min_points {
        return None;
    }
    let pts: Vec<Vec<f64>> = dirs.iter().map(|d| d.to_vec()).collect();
    let (centroid, axes, _) = principal_axes(&pts);
    let n = [axes[2][0], axes[2][1], axes[2][2]];
    let offset = n[0] * centroid[0] + n[1] * centroid[1] + n[2] * centroid[2];
    let residual = dirs
        .iter()
        .map(|d| (n[0] * d[0] + n[1] * d[1] + n[2] * d[2] - offset).abs())
        .fold(0.0, f64::max);
    (residual < max_residual).then_some(DegenerateCurve {
        normal: n,
        offset,
        residual,
        count: dirs.len(),
    })
}

fn reducible(ops: &OperatorTuple, rank: usize) -> Result<ReducibleInput> {
    let mut pair = None;
    'outer: for i in 0..3 {
        for j in i + 1..3 {
            let p = ops.select(&[i, j])?;
            if p.rank_with_identity() == rank && rank == 3 {
                pair = Some((i, j));
                break 'outer;
            }
        }
    }
    let planar = match pair {
        Some((i, j)) => Some(classify_projection_2d(
            &ops.select(&[i, j])?,
            PLANAR_SAMPLES,
        )?),
        None => None,
    };
    let label = planar.as_ref().and_then(|p| match p.class {
        PlanarClass::Triangle => Some(ClassLabel {
            s: Segments::Infinite,
            e: 1,
            irreducible: false,
        }),
        PlanarClass::EllipsePlusPoint => Some(ClassLabel {
            s: Segments::Infinite,
            e: 0,
            irreducible: false,
        }),
        _ => None,
    });
    Ok(ReducibleInput {
        rank,
        pair,
        planar,
        label,
    })
}

/// Census at each threshold `tau_rel * scale`, reusing one search.
pub fn tolerance_sweep(
    ops: &OperatorTuple,
    cfg: &SearchConfig,
    tau_rels: &[f64],
) -> Result<Vec<(f64, ClassLabel)>> {
    check_classifiable(ops)?;
    let s = search(ops, cfg)?;
    tau_rels
        .iter()
        .map(|&t| Ok((t * s.scale, census(ops, &s, t * s.scale)?.label)))
        .collect()
}

/// Thresholds `1e-6, 1e-7, ..., 1e-12`.
pub fn default_tolerance_ladder() -> Vec<f64> {
    (6..=12).map(|k| 10f64.powi(-k)).collect()
}

/// Planar angle samples used by [`classify_projection_2d`] inside `classify`.
pub const PLANAR_SAMPLES: usize = 3600;

/// Shape of the range of a `d = 3` pair from a dense planar sweep.
///
/// Segments are planar directions where the ground space is degenerate and
/// the compressed pair spans more than the identity; corners are points
/// returned for a run of consecutive directions covering more than `1e-3`
/// radians.
pub fn classify_projection_2d(ops: &OperatorTuple, samples: usize) -> Result<PlanarReport> {
    if ops.dim() != 3 || ops.len() != 2 {
        return Err(Error::UnsupportedForClassification {
            dim: ops.dim(),
            count: ops.len(),
        });
    }
    if samples < 360 {
        return Err(Error::InvalidArgument(format!(
            "need at least 360 planar samples, got {samples}"
        )));
    }
    let scale = ops.scale();
    let angles = planar_angles(samples);
    let data = angles
        .par_iter()
        .map(|&a| -> Result<(f64, Vec<f64>)> {
            let s = eigh(&ops.hamiltonian(&[a.cos(), a.sin()])?)?;
            Ok((s.gap(), ops.expectations(&s.vector(0))))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = samples;
    let step = 2.0 * PI / n as f64;

    let planar_gap = |a: f64| gap_at(ops, &[a.cos(), a.sin()]).unwrap_or(f64::INFINITY);
    let mut segment_angles: Vec<f64> = Vec::new();
    for k in 0..n {
        let g = data[k].0;
        if g <= data[(k + n - 1) % n].0 && g <= data[(k + 1) % n].0 && g < 1e-2 * scale {
            let m = brent(planar_gap, angles[k] - step, angles[k] + step, 1e-14, 200);
            let a = m.x[0].rem_euclid(2.0 * PI);
            if m.value >= 1e-9 * scale
                || segment_angles
                    .iter()
                    .any(|&b| angular_distance(a, b) < 1e-3)
            {
                continue;
            }
            let spectrum = eigh(&ops.hamiltonian(&[a.cos(), a.sin()])?)?;
            let x = orthonormalize_columns(&spectrum.vectors.columns(0, 2).into_owned());
            if span_dim(&compress(ops, &x)?) >= 2 {
                segment_angles.push(a);
            }
        }
    }
    segment_angles.sort_by(f64::total_cmp);

    let diam = {
        let pts: Vec<Vec<f64>> = data.iter().map(|d| d.1.clone()).collect();
        let (_, _, sv) = principal_axes(&pts);
        let spread = pts
            .iter()
            .flat_map(|p| {
                pts.iter()
                    .step_by(37)
                    .map(move |q| crate::linalg::distance(p, q))
            })
            .fold(0.0, f64::max);
        spread.max(sv[0] * 1e-12)
    };
    let same = |i: usize, j: usize| crate::linalg::distance(&data[i].1, &data[j].1) <= 1e-6 * diam;
    let mut corners = Vec::new();
    // Start the cyclic scan just after a change of point.
    if let Some(start) = (0..n).find(|&k| !same(k, (k + n - 1) % n)) {
        let mut k = 0;
        while k < n {
            let i = (start + k) % n;
            let mut len = 1;
            while len < n && same(i, (i + len) % n) {
                len += 1;
            }
            let width = (len - 1) as f64 * step;
            if width > 1e-3 {
                corners.push((data[i].1.clone(), width));
            }
            k += len;
        }
    }
    let class = match (segment_angles.len(), corners.len()) {
        (0, 0) => PlanarClass::Oval,
        (1, 0) => PlanarClass::FlatPortion,
        (2, 1) => PlanarClass::EllipsePlusPoint,
        (3, _) => PlanarClass::Triangle,
        (segments, corners) => PlanarClass::Unclassified { segments, corners },
    };
    Ok(PlanarReport {
        class,
        segment_angles,
        corners,
    })
}

fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Algebraic conic fit `a x^2 + b xy + c y^2 + d x + e y + f = 0` through
/// 2D points: the eigenvector of the scatter matrix with the smallest
/// eigenvalue, after centring and scaling to unit diameter. Returns the
/// coefficients and the RMS algebraic residual.
pub fn fit_conic(points: &[[f64; 2]]) -> ([f64; 6], f64) {
    let n = points.len() as f64;
    let (mx, my) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p[0] / n, sy + p[1] / n));
    let r = points
        .iter()
        .map(|p| (p[0] - mx).hypot(p[1] - my))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut scatter = DMatrix::<f64>::zeros(6, 6);
    for p in points {
        let (x, y) = ((p[0] - mx) / r, (p[1] - my) / r);
        let row = [x * x, x * y, y * y, x, y, 1.0];
        for i in 0..6 {
            for j in 0..6 {
                scatter[(i, j)] += row[i] * row[j];
            }
        }
    }
    let (_, vectors) = symmetric_eigen(scatter);
    let v = &vectors[0];
    let q = [v[0], v[1], v[2], v[3], v[4], v[5]];
    let sq: f64 = points
        .iter()
        .map(|p| {
            let (x, y) = ((p[0] - mx) / r, (p[1] - my) / r);
            (q[0] * x * x + q[1] * x * y + q[2] * y * y + q[3] * x + q[4] * y + q[5]).powi(2)
        })
        .sum();
    (q, (sq / n).sqrt())
}

/// Checks that the rim of an ellipse flat lies in the supporting plane and on
/// one ellipse. Returns `(max plane residual, conic residual, is ellipse)`.
pub fn verify_ellipse(flat: &FlatPortion, n: usize) -> (f64, f64, bool) {
    let pts = flat.image_points(n, 0);
    let h = flat.at.direction.vector();
    let plane = pts
        .iter()
        .map(|p| (h[0] * p[0] + h[1] * p[1] + h[2] * p[2] - flat.at.energy).abs())
        .fold(0.0, f64::max);
    let (a, b) = flat.at.direction.tangent_basis();
    let coords: Vec<[f64; 2]> = pts
        .iter()
        .map(|p| {
            [
                a[0] * p[0] + a[1] * p[1] + a[2] * p[2],
                b[0] * p[0] + b[1] * p[1] + b[2] * p[2],
            ]
        })
        .collect();
    let (conic, residual) = fit_conic(&coords);
    (
        plane,
        residual,
        conic[1] * conic[1] - 4.0 * conic[0] * conic[2] < 0.0,
    )
}

/// Ratio of the second to the first singular value of the centred images of
/// `n` random ground-space states.
pub fn segment_flatness(flat: &FlatPortion, n: usize, seed: u64) -> f64 {
    let pts = flat.image_points(n, seed);
    let (centroid, _, _) = principal_axes(&pts);
    let centred: Vec<Vec<f64>> = pts
        .iter()
        .map(|p| p.iter().zip(&centroid).map(|(x, m)| x - m).collect())
        .collect();
    let sv = singular_values(&centred);
    if sv[0] == 0.0 {
        0.0
    } else {
        sv[1] / sv[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn dir(v: [f64; 3]) -> Direction {
        Direction::from_vector(v).unwrap()
    }

    #[test]
    fn gap_examples() {
        let pauli = fixtures::pauli_triple();
        for d in crate::direction::uniform_sphere(20, 4) {
            assert!((gap_function(&pauli, &d).unwrap() - 2.0).abs() < 1e-12);
        }
        assert!(gap_function(&fixtures::class(8), &dir([1.0, 0.0, 0.0])).unwrap() < 1e-15);
    }

    #[test]
    fn compress_class4_and_class8_with_leading_block() {
        let x = CMatrix::from_fn(3, 2, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let g = compress(&fixtures::class(4), &x).unwrap();
        assert_eq!(pauli_coefficients(&g[0]), [0.0; 4]);
        assert_eq!(pauli_coefficients(&g[1]), [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(g[2].entry(0, 1), c(0.0, 1.0));
        assert_eq!(span_dim(&g), 3);
        let g = compress(&fixtures::class(8), &x).unwrap();
        assert_eq!(pauli_coefficients(&g[0]), [0.0; 4]);
        assert_eq!(pauli_coefficients(&g[1]), [0.0; 4]);
        assert_eq!(pauli_coefficients(&g[2]), [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(span_dim(&g), 2);
    }

    #[test]
    fn span_of_zero_and_diagonal() {
        let zero = HermitianOperator::diagonal(&[0.0, 0.0]).unwrap();
        assert_eq!(span_dim(&[zero.clone(), zero.clone(), zero]), 1);
        let ops = crate::range::OperatorTuple::new(vec![
            HermitianOperator::diagonal(&[1.0, 2.0, 3.0]).unwrap(),
            HermitianOperator::diagonal(&[0.0, -1.0, 5.0]).unwrap(),
        ])
        .unwrap();
        let x = CMatrix::from_fn(3, 2, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        for g in compress(&ops, &x).unwrap() {
            assert_eq!(g.entry(0, 1), c(0.0, 0.0));
        }
    }

    #[test]
    fn grid_candidates_skip_constant_gap() {
        let flat = vec![vec![1.0; 16]; 8];
        assert!(grid_candidates(&flat, 1e-2, 1e-12).is_empty());
        let mut dip = flat.clone();
        dip[3][5] = 0.5;
        assert_eq!(grid_candidates(&dip, 1e-2, 1e-12).len(), 1);
    }

    #[test]
    fn conic_fit_of_ellipse_and_line() {
        let ellipse: Vec<[f64; 2]> = (0..50)
            .map(|k| {
                let t = k as f64 * 0.3;
                [2.0 + 3.0 * t.cos(), -1.0 + 0.5 * t.sin()]
            })
            .collect();
        let (q, r) = fit_conic(&ellipse);
        assert!(r < 1e-12);
        assert!(q[1] * q[1] - 4.0 * q[0] * q[2] < 0.0);
    }

    #[test]
    fn class_label_names() {
        assert_eq!(ClassLabel::finite(1, 2).class_name(), "s1e2");
        assert_eq!(
            ClassLabel {
                s: Segments::Infinite,
                e: 1,
                irreducible: false
            }
            .class_name(),
            "s_inf_e1"
        );
        assert!(ClassLabel::finite(0, 4).is_irreducible_pattern());
        assert!(!ClassLabel::finite(2, 0).is_irreducible_pattern());
    }

    #[test]
    fn classify_rejects_wrong_shapes() {
        assert!(matches!(
            classify(&fixtures::pauli_triple()),
            Err(Error::UnsupportedForClassification { dim: 2, count: 3 })
        ));
        assert!(search(&fixtures::class(1), &SearchConfig::with_resolution(16)).is_err());
    }
}
