//! Real dense helpers built on nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Rank of the row set, counting singular values above `rel_tol` times the
/// largest.
pub fn numerical_rank(rows: &[Vec<f64>], rel_tol: f64) -> usize {
    let sv = singular_values(rows);
    let max = sv.first().copied().unwrap_or(0.0);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Singular values in descending order.
pub fn singular_values(rows: &[Vec<f64>]) -> Vec<f64> {
    if rows.is_empty() || rows[0].is_empty() {
        return Vec::new();
    }
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending.
pub fn symmetric_eigen(m: DMatrix<f64>) -> (Vec<f64>, Vec<DVector<f64>>) {
    let eig = SymmetricEigen::new(m);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = idx.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = idx
        .iter()
        .map(|&k| eig.eigenvectors.column(k).into_owned())
        .collect();
    (values, vectors)
}

/// Centroid and principal axes (descending spread) of a point set, with
/// the singular values of the centered data.
pub fn principal_axes(points: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    let n = points.len();
    let dim = points.first().map_or(0, |p| p.len());
    let mut centroid = vec![0.0; dim];
    for p in points {
        for (c, x) in centroid.iter_mut().zip(p) {
            *c += x / n as f64;
        }
    }
    let mut scatter = DMatrix::<f64>::zeros(dim, dim);
    for p in points {
        for i in 0..dim {
            for j in 0..dim {
                scatter[(i, j)] += (p[i] - centroid[i]) * (p[j] - centroid[j]);
            }
        }
    }
    let (values, vectors) = symmetric_eigen(scatter);
    let axes = vectors
        .iter()
        .rev()
        .map(|v| v.iter().copied().collect())
        .collect();
    let sv = values.iter().rev().map(|&l| l.max(0.0).sqrt()).collect();
    (centroid, axes, sv)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_dependent_rows() {
        let rows = vec![
            vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 6.0],
            vec![0.0, 1.0, 0.0],
        ];
        assert_eq!(numerical_rank(&rows, 1e-12), 2);
        assert_eq!(numerical_rank(&[vec![0.0, 0.0]], 1e-12), 0);
    }

    #[test]
    fn principal_axes_of_a_line() {
        let pts: Vec<Vec<f64>> = (0..10)
            .map(|i| vec![i as f64, 2.0 * i as f64, 1.0])
            .collect();
        let (c, axes, sv) = principal_axes(&pts);
        assert!((c[2] - 1.0).abs() < 1e-12);
        assert!(sv[1] < 1e-7 * sv[0]);
        assert!((axes[0][1] / axes[0][0] - 2.0).abs() < 1e-9);
    }
}
