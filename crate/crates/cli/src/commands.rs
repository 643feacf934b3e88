use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use jnr_core::bands::{band_surface, locate_band_degeneracies};
use jnr_core::direction::{angle_grid, fibonacci_sphere, planar_angles, uniform_sphere, Direction};
use jnr_core::fixtures;
use jnr_core::herm::QuantumState;
use jnr_core::hull::convex_hull;
use jnr_core::photonic::{
    derive_seed, measurement_unitary, prepare_state, similarity, simulate_measurement,
    solve_prep_angles, MeasurementSetup, PrepAngles,
};
use jnr_core::range::{level_sweep, sweep, sweep_planar, OperatorTuple, PointCloud};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::io::{self, num, OperatorFileV1};
use crate::report::{build_report, ReportOptions, ReportV1};

#[derive(Debug, Parser)]
#[command(
    name = "jnr",
    version,
    about = "Joint numerical ranges of Hermitian operator tuples"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Operator file (OperatorFileV1 JSON).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Built-in operator set, see `jnr fixture --list`.
    #[arg(long)]
    pub fixture: Option<String>,
}

impl Source {
    /// The tuple and the digest of its operator file.
    pub fn load(&self) -> CliResult<(OperatorTuple, String)> {
        let file = match (&self.input, &self.fixture) {
            (Some(p), _) => OperatorFileV1::read(p)?,
            (None, Some(name)) => {
                let t = fixtures::by_name(name)
                    .ok_or_else(|| CliError::input(format!("unknown fixture {name:?}")))?;
                OperatorFileV1::from_tuple(&t, None)
            }
            (None, None) => return Err(CliError::input("one of --input or --fixture is required")),
        };
        Ok((file.to_tuple()?, file.digest()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Lattice {
    /// Seeded uniform random directions.
    Uniform,
    /// Deterministic Fibonacci lattice.
    Fibonacci,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Boundary points from ground states of supporting Hamiltonians.
    Sample {
        #[command(flatten)]
        source: Source,
        /// Number of directions (planar angles for operator pairs).
        #[arg(long, conflicts_with = "grid")]
        directions: Option<usize>,
        /// Theta x phi grid, e.g. 64x128.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, value_enum, default_value = "uniform")]
        lattice: Lattice,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Accept operator dimensions other than 3.
        #[arg(long)]
        allow_any_dim: bool,
    },
    /// Flat-portion classification report.
    Classify {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Add the class obtained along a ladder of degeneracy tolerances.
        #[arg(long)]
        tol_sweep: bool,
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Convex hull of a point CSV as an ASCII PLY mesh.
    Hull {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Band energies on a theta x phi grid, cross-checked against the flat census.
    Bands {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "181x360")]
        res: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two coordinates of a point CSV.
    Project {
        #[arg(long)]
        points: PathBuf,
        /// Axis pair such as 12, 13, 23 or xy, xz, yz.
        #[arg(long)]
        axes: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Detector counts for prepared states.
    Simulate {
        #[command(flatten)]
        source: Source,
        /// Preparation angles CSV (theta_a,theta_b,phi1,phi2).
        #[arg(long)]
        states: PathBuf,
        /// Shots per state and operator; 0 gives exact probabilities.
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        visibility: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// All exports for one built-in class.
    Reproduce {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=8))]
        class: u8,
        #[arg(long)]
        outdir: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 300)]
        states: usize,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Writes a built-in operator set as an operator file.
    Fixture {
        #[arg(long, required_unless_present = "list")]
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        list: bool,
    },
    /// Expectation pairs of excited eigenvectors of an operator pair.
    Levels {
        #[command(flatten)]
        source: Source,
        /// Comma-separated levels.
        #[arg(long, default_value = "0,1,2", value_delimiter = ',')]
        levels: Vec<usize>,
        #[arg(long, default_value_t = 720)]
        angles: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_grid(s: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::input(format!("grid {s:?} is not of the form TxP"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let t = a.trim().parse().map_err(|_| bad())?;
    let p = b.trim().parse().map_err(|_| bad())?;
    if t < 2 || p < 1 {
        return Err(bad());
    }
    Ok((t, p))
}

fn parse_axes(s: &str) -> CliResult<(usize, usize)> {
    let axis = |c: char| match c {
        '1' | 'x' => Some(0),
        '2' | 'y' => Some(1),
        '3' | 'z' => Some(2),
        _ => None,
    };
    let chars: Vec<char> = s.trim().chars().collect();
    match chars.as_slice() {
        [a, b] => match (axis(*a), axis(*b)) {
            (Some(i), Some(j)) if i != j => Ok((i, j)),
            _ => Err(CliError::input(format!("invalid axes {s:?}"))),
        },
        _ => Err(CliError::input(format!("invalid axes {s:?}"))),
    }
}

fn write_rows(path: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut out = io::output(path)?;
    io::write_csv(&mut out, header, rows)
}

fn write_json<T: serde::Serialize>(path: Option<&Path>, value: &T) -> CliResult<()> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::input(e.to_string()))?;
    text.push('\n');
    let mut out = io::output(path)?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn point_rows(ops: &OperatorTuple, dirs: &[Direction]) -> CliResult<Vec<Vec<String>>> {
    Ok(sweep(ops, dirs)?
        .samples
        .iter()
        .zip(dirs)
        .map(|(b, d)| {
            vec![
                num(d.theta()),
                num(d.phi()),
                num(b.point[0]),
                num(b.point[1]),
                num(b.point[2]),
                num(b.energy),
                num(b.gap),
            ]
        })
        .collect())
}

pub fn sample(
    ops: &OperatorTuple,
    directions: Option<usize>,
    grid: Option<&str>,
    lattice: Lattice,
    seed: u64,
    allow_any_dim: bool,
) -> CliResult<Vec<Vec<String>>> {
    if ops.dim() != 3 && !allow_any_dim {
        return Err(CliError::input(format!(
            "sampling expects d = 3 operators (got d = {}); pass --allow-any-dim to sweep other dimensions",
            ops.dim()
        )));
    }
    match ops.len() {
        3 => {
            let dirs = match (directions, grid) {
                (Some(n), None) if n > 0 => match lattice {
                    Lattice::Uniform => uniform_sphere(n, seed),
                    Lattice::Fibonacci => fibonacci_sphere(n),
                },
                (None, Some(g)) => {
                    let (t, p) = parse_grid(g)?;
                    angle_grid(t, p)
                }
                _ => return Err(CliError::input("give a positive --directions or a --grid")),
            };
            point_rows(ops, &dirs)
        }
        2 => {
            let n = match (directions, grid) {
                (Some(n), None) if n > 0 => n,
                _ => {
                    return Err(CliError::input(
                        "operator pairs take --directions N (equally spaced planar angles)",
                    ))
                }
            };
            let angles = planar_angles(n);
            Ok(sweep_planar(ops, &angles)?
                .samples
                .iter()
                .zip(&angles)
                .map(|(b, a)| {
                    vec![
                        num(*a),
                        String::new(),
                        num(b.point[0]),
                        num(b.point[1]),
                        String::new(),
                        num(b.energy),
                        num(b.gap),
                    ]
                })
                .collect())
        }
        n => Err(CliError::input(format!(
            "sampling takes 2 or 3 operators, got {n}"
        ))),
    }
}

fn classify_input(ops: &OperatorTuple) -> CliResult<()> {
    if ops.dim() != 3 || ops.len() != 3 {
        return Err(CliError::input(format!(
            "classification needs three 3x3 operators (got {} operators of dimension {})",
            ops.len(),
            ops.dim()
        )));
    }
    Ok(())
}

pub fn band_rows(
    ops: &OperatorTuple,
    res: (usize, usize),
) -> CliResult<(Vec<String>, Vec<Vec<String>>, f64)> {
    classify_input(ops)?;
    let grid = band_surface(ops, res.0, res.1)?;
    if ops.rank_with_identity() == 4 {
        locate_band_degeneracies(&grid, ops)?;
    }
    let d = grid.levels();
    let mut header = vec!["theta".to_string(), "phi".to_string()];
    header.extend((0..d).map(|k| format!("e{k}")));
    header.push("gap01".into());
    let mut rows = Vec::with_capacity(res.0 * res.1);
    for (i, t) in grid.thetas.iter().enumerate() {
        for (j, p) in grid.phis.iter().enumerate() {
            let mut r = vec![num(*t), num(*p)];
            r.extend((0..d).map(|k| num(grid.energy(k, i, j))));
            r.push(num(grid.energy(1, i, j) - grid.energy(0, i, j)));
            rows.push(r);
        }
    }
    Ok((header, rows, grid.min_gap()))
}

/// Count and similarity rows for prepared states.
pub fn simulate_rows(
    ops: &OperatorTuple,
    states: &[PrepAngles],
    shots: u64,
    seed: u64,
    visibility: f64,
) -> CliResult<(Vec<Vec<String>>, Vec<Vec<String>>)> {
    if ops.dim() != 3 {
        return Err(CliError::input(format!(
            "the qutrit simulator needs d = 3 operators, got d = {}",
            ops.dim()
        )));
    }
    let setups: Vec<MeasurementSetup> = ops
        .ops()
        .iter()
        .map(measurement_unitary)
        .collect::<Result<_, _>>()?;
    let per_state: Vec<(Vec<Vec<String>>, Vec<Vec<String>>)> = states
        .par_iter()
        .enumerate()
        .map(|(i, a)| -> CliResult<_> {
            let psi = QuantumState::pure(prepare_state(a))?;
            let (mut counts, mut sims) = (Vec::new(), Vec::new());
            for (j, setup) in setups.iter().enumerate() {
                let r = simulate_measurement(
                    &psi,
                    setup,
                    shots,
                    derive_seed(seed, i as u64, j as u64),
                    visibility,
                )?;
                let theory = ops
                    .get(j)
                    .quadratic_form(psi.as_pure().expect("pure state"));
                let mut row = vec![i.to_string(), j.to_string(), shots.to_string()];
                row.extend(r.counts.iter().map(|c| c.to_string()));
                row.extend(r.probabilities.iter().map(|x| num(*x)));
                row.extend(r.exact.iter().map(|x| num(*x)));
                row.extend(setup.eigenvalues.iter().map(|x| num(*x)));
                row.push(num(r.expectation));
                row.push(num(theory));
                counts.push(row);
                sims.push(vec![
                    i.to_string(),
                    j.to_string(),
                    num(similarity(&r.probabilities, &r.exact)?),
                ]);
            }
            Ok((counts, sims))
        })
        .collect::<CliResult<_>>()?;
    let (counts, sims): (Vec<_>, Vec<_>) = per_state.into_iter().unzip();
    Ok((counts.concat(), sims.concat()))
}

fn hull_of(cloud: &PointCloud, out: Option<&Path>) -> CliResult<()> {
    let hull = convex_hull(cloud)?;
    let mut w = io::output(out)?;
    io::write_ply(&mut w, &hull)
}

pub fn reproduce(
    class: usize,
    outdir: &Path,
    seed: u64,
    n_states: usize,
    shots: u64,
    timestamp: bool,
) -> CliResult<ReportV1> {
    fs::create_dir_all(outdir)
        .map_err(|e| CliError::input(format!("{}: {e}", outdir.display())))?;
    let ops = fixtures::class(class);
    let file = OperatorFileV1::from_tuple(&ops, None);

    let dirs = uniform_sphere(n_states, seed);
    write_rows(
        Some(&outdir.join("points.csv")),
        &io::POINTS_HEADER,
        &point_rows(&ops, &dirs)?,
    )?;
    hull_of(
        &sweep(&ops, &fibonacci_sphere(2000))?.cloud(),
        Some(&outdir.join("mesh.ply")),
    )?;

    let opts = ReportOptions {
        digest: file.digest(),
        timestamp,
        ..Default::default()
    };
    let report = build_report(&ops, &opts)?;
    write_json(Some(&outdir.join("report.json")), &report)?;

    let (header, rows, _) = band_rows(&ops, opts.band_res)?;
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_rows(Some(&outdir.join("bands.csv")), &header, &rows)?;

    let prep: Vec<PrepAngles> = sweep(&ops, &dirs)?
        .samples
        .iter()
        .map(|b| solve_prep_angles(b.ground_state.as_pure().expect("ground states are pure")))
        .collect::<Result<_, _>>()?;
    let prep_rows: Vec<Vec<String>> = prep
        .iter()
        .map(|a| vec![num(a.theta_a), num(a.theta_b), num(a.phi1), num(a.phi2)])
        .collect();
    write_rows(Some(&outdir.join("prep.csv")), &io::PREP_HEADER, &prep_rows)?;
    let (counts, sims) = simulate_rows(&ops, &prep, shots, seed, 1.0)?;
    write_rows(
        Some(&outdir.join("counts.csv")),
        &io::COUNTS_HEADER,
        &counts,
    )?;
    write_rows(
        Some(&outdir.join("similarity.csv")),
        &io::SIMILARITY_HEADER,
        &sims,
    )?;
    Ok(report)
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Sample {
            source,
            directions,
            grid,
            lattice,
            seed,
            out,
            allow_any_dim,
        } => {
            let (ops, _) = source.load()?;
            let rows = sample(
                &ops,
                directions,
                grid.as_deref(),
                lattice,
                seed,
                allow_any_dim,
            )?;
            write_rows(out.as_deref(), &io::POINTS_HEADER, &rows)
        }
        Command::Classify {
            source,
            out,
            tol_sweep,
            no_timestamp,
        } => {
            let (ops, digest) = source.load()?;
            classify_input(&ops)?;
            let report = build_report(
                &ops,
                &ReportOptions {
                    digest,
                    timestamp: !no_timestamp,
                    tol_sweep,
                    ..Default::default()
                },
            )?;
            write_json(out.as_deref(), &report)?;
            if let (Some(_), Some(table)) = (&out, &report.tolerance_sweep) {
                println!("tau_deg,class_name,s,e");
                for r in table {
                    let s = r.s.map_or("inf".to_string(), |s| s.to_string());
                    println!("{},{},{s},{}", num(r.tau_deg), r.class_name, r.e);
                }
            }
            Ok(())
        }
        Command::Hull { points, out } => {
            let (dim, coords, _) = io::read_points(&points)?;
            hull_of(&PointCloud::from_points(dim, coords)?, out.as_deref())
        }
        Command::Bands { source, res, out } => {
            let (ops, _) = source.load()?;
            let (header, rows, _) = band_rows(&ops, parse_grid(&res)?)?;
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            write_rows(out.as_deref(), &header, &rows)
        }
        Command::Project { points, axes, out } => {
            let (i, j) = parse_axes(&axes)?;
            let (dim, coords, angles) = io::read_points(&points)?;
            if i >= dim || j >= dim {
                return Err(CliError::input(format!(
                    "axes {axes:?} exceed the point dimension {dim}"
                )));
            }
            let blank = |x: f64| if x.is_nan() { String::new() } else { num(x) };
            let rows: Vec<Vec<String>> = coords
                .iter()
                .zip(&angles)
                .map(|(p, a)| vec![blank(a[0]), blank(a[1]), num(p[i]), num(p[j])])
                .collect();
            write_rows(out.as_deref(), &io::PROJECTED_HEADER, &rows)
        }
        Command::Simulate {
            source,
            states,
            shots,
            seed,
            visibility,
            out,
        } => {
            let (ops, _) = source.load()?;
            let prep: Vec<PrepAngles> = io::read_prep(&states)?
                .into_iter()
                .map(|[a, b, c, d]| PrepAngles::new(a, b, c, d))
                .collect::<Result<_, _>>()?;
            let (counts, _) = simulate_rows(&ops, &prep, shots, seed, visibility)?;
            write_rows(out.as_deref(), &io::COUNTS_HEADER, &counts)
        }
        Command::Reproduce {
            class,
            outdir,
            seed,
            states,
            shots,
            no_timestamp,
        } => reproduce(class as usize, &outdir, seed, states, shots, !no_timestamp).map(|_| ()),
        Command::Fixture { name, out, list } => {
            if list {
                let mut names: Vec<String> = fixtures::named_triples()
                    .into_iter()
                    .map(|(n, _)| n)
                    .collect();
                names.extend(["pauli_pair".to_string(), "embedded_pauli_pair".to_string()]);
                println!("{}", names.join("\n"));
                return Ok(());
            }
            let name = name.unwrap_or_default();
            let t = fixtures::by_name(&name)
                .ok_or_else(|| CliError::input(format!("unknown fixture {name:?}")))?;
            write_json(out.as_deref(), &OperatorFileV1::from_tuple(&t, None))
        }
        Command::Levels {
            source,
            levels,
            angles,
            out,
        } => {
            let (ops, _) = source.load()?;
            if ops.len() != 2 {
                return Err(CliError::input(format!(
                    "level sweeps take an operator pair, got {} operators",
                    ops.len()
                )));
            }
            if angles == 0 {
                return Err(CliError::input("--angles must be positive"));
            }
            let grid = planar_angles(angles);
            let mut rows = Vec::new();
            for &k in &levels {
                let cloud = level_sweep(&ops, k, &grid)?;
                rows.extend(
                    cloud
                        .points
                        .iter()
                        .zip(&grid)
                        .map(|(p, a)| vec![num(*a), k.to_string(), num(p[0]), num(p[1])]),
                );
            }
            write_rows(out.as_deref(), &io::LEVELS_HEADER, &rows)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_and_axes_parsing() {
        assert_eq!(parse_grid("64x128").unwrap(), (64, 128));
        assert!(parse_grid("64").is_err() && parse_grid("1x5").is_err());
        assert_eq!(parse_axes("13").unwrap(), (0, 2));
        assert_eq!(parse_axes("yz").unwrap(), (1, 2));
        assert!(parse_axes("11").is_err() && parse_axes("124").is_err());
    }
}
