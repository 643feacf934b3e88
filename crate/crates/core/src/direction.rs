//! Unit directions on the 2-sphere and the grids used to sample them.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// A unit vector `h = (sin t cos p, sin t sin p, cos t)` with its polar
/// angle `theta` in `[0, pi]` and azimuth `phi` in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta: f64,
    phi: f64,
    h: [f64; 3],
}

impl Direction {
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let theta = theta.clamp(0.0, PI);
        let phi = phi.rem_euclid(TAU);
        let phi = if phi >= TAU { 0.0 } else { phi };
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            theta,
            phi,
            h: [st * cp, st * sp, ct],
        }
    }

    /// Normalizes `v`. At the poles the azimuth is reported as 0.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "cannot normalize direction {v:?}"
            )));
        }
        let h = [v[0] / n, v[1] / n, v[2] / n];
        let theta = h[2].clamp(-1.0, 1.0).acos();
        let phi = if h[0] == 0.0 && h[1] == 0.0 {
            0.0
        } else {
            h[1].atan2(h[0]).rem_euclid(TAU)
        };
        let phi = if phi >= TAU { 0.0 } else { phi };
        Ok(Self { theta, phi, h })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn vector(&self) -> [f64; 3] {
        self.h
    }

    pub fn dot(&self, p: &[f64]) -> f64 {
        self.h.iter().zip(p).map(|(a, b)| a * b).sum()
    }

    pub fn antipode(&self) -> Self {
        Self::from_vector([-self.h[0], -self.h[1], -self.h[2]]).expect("unit vector")
    }

    /// Great-circle distance in radians.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        let cross = cross(self.h, other.h);
        let sin = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
        sin.atan2(self.dot(&other.h))
    }

    /// An orthonormal pair spanning the tangent plane at `h`.
    pub fn tangent_basis(&self) -> ([f64; 3], [f64; 3]) {
        let h = self.h;
        // Pick the coordinate axis least aligned with h.
        let axis = if h[0].abs() <= h[1].abs() && h[0].abs() <= h[2].abs() {
            [1.0, 0.0, 0.0]
        } else if h[1].abs() <= h[2].abs() {
            [0.0, 1.0, 0.0]
        } else {
            [0.0, 0.0, 1.0]
        };
        let a = normalize(cross(h, axis));
        let b = cross(h, a);
        (a, b)
    }

    /// `normalize(h + u a + v b)` in the tangent chart at `self`.
    pub fn chart(&self, basis: &([f64; 3], [f64; 3]), u: f64, v: f64) -> Direction {
        let (a, b) = basis;
        let h = self.h;
        Direction::from_vector([
            h[0] + u * a[0] + v * b[0],
            h[1] + u * a[1] + v * b[1],
            h[2] + u * a[2] + v * b[2],
        ])
        .expect("chart point is nonzero for small offsets")
    }
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Fibonacci lattice of `n` nearly uniform directions.
pub fn fibonacci_sphere(n: usize) -> Vec<Direction> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let a = golden * i as f64;
            Direction::from_vector([r * a.cos(), r * a.sin(), z]).expect("unit")
        })
        .collect()
}

/// `n` directions drawn uniformly on the sphere from a seeded stream.
pub fn uniform_sphere(n: usize, seed: u64) -> Vec<Direction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_direction(&mut rng)).collect()
}

pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> Direction {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        if let Ok(d) = Direction::from_vector(v) {
            return d;
        }
    }
}

/// Rectangular `(theta, phi)` grid, row-major in theta. Theta spans
/// `[0, pi]` inclusive, phi spans `[0, 2 pi)`.
pub fn angle_grid(theta_res: usize, phi_res: usize) -> Vec<Direction> {
    let (thetas, phis) = grid_axes(theta_res, phi_res);
    thetas
        .iter()
        .flat_map(|&t| phis.iter().map(move |&p| Direction::from_angles(t, p)))
        .collect()
}

pub fn grid_axes(theta_res: usize, phi_res: usize) -> (Vec<f64>, Vec<f64>) {
    let thetas = (0..theta_res)
        .map(|i| PI * i as f64 / (theta_res - 1).max(1) as f64)
        .collect();
    let phis = (0..phi_res)
        .map(|j| TAU * j as f64 / phi_res as f64)
        .collect();
    (thetas, phis)
}

/// `n` equally spaced planar angles in `[0, 2 pi)`.
pub fn planar_angles(n: usize) -> Vec<f64> {
    (0..n).map(|j| TAU * j as f64 / n as f64).collect()
}
