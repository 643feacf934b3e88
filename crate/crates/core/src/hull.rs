//! Convex hulls of point clouds in two and three dimensions.
//!
//! The 3D hull is built by quickhull with exact orientation predicates, so
//! visibility decisions stay consistent on the large coplanar patches that
//! flat portions produce. Clouds of lower affine rank are hulled inside
//! their affine span.

use std::collections::{HashMap, VecDeque};

use robust::{orient2d, orient3d, Coord, Coord3D};

use crate::error::{Error, Result};
use crate::linalg::{distance, dot, principal_axes};
use crate::range::PointCloud;

/// Relative tolerance for the face-offset invariant and the affine rank.
pub const HULL_REL_TOL: f64 = 1e-9;

/// Default angular tolerance (radians) for merging triangles into facets.
pub const FACET_ANGLE_TOL: f64 = 1e-6;

/// Full-dimensional hull: triangles in 3D, a counter-clockwise polygon in 2D.
#[derive(Debug, Clone, PartialEq)]
pub struct HullMesh {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    /// Index of each vertex in the source cloud.
    pub sources: Vec<usize>,
    /// Vertex triples in 3D (counter-clockwise seen from outside), or
    /// consecutive polygon edges `[i, i + 1]` in 2D.
    pub faces: Vec<Vec<usize>>,
    /// Outward unit normals.
    pub face_normals: Vec<Vec<f64>>,
    /// Face planes are `{x : n . x = c}`.
    pub face_offsets: Vec<f64>,
    pub diameter: f64,
}

/// Hull of a cloud whose affine rank is below its ambient dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DegenerateHull {
    pub ambient_dim: usize,
    pub affine_rank: usize,
    pub origin: Vec<f64>,
    /// Orthonormal basis of the affine span, `affine_rank` vectors.
    pub basis: Vec<Vec<f64>>,
    /// Hull in the span's coordinates (rank 2 only).
    pub inner: Option<HullMesh>,
    /// Coordinate interval along the single basis vector (rank 1 only).
    pub interval: Option<(f64, f64)>,
    /// Extreme points in ambient coordinates.
    pub vertices: Vec<Vec<f64>>,
    pub diameter: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Hull {
    Full(HullMesh),
    Degenerate(DegenerateHull),
}

impl Hull {
    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        match self {
            Hull::Full(m) => contains(m, p, tol),
            Hull::Degenerate(d) => d.contains(p, tol),
        }
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        match self {
            Hull::Full(m) => &m.vertices,
            Hull::Degenerate(d) => &d.vertices,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Hull::Full(m) => m.diameter,
            Hull::Degenerate(d) => d.diameter,
        }
    }

    pub fn mesh(&self) -> Option<&HullMesh> {
        match self {
            Hull::Full(m) => Some(m),
            Hull::Degenerate(_) => None,
        }
    }
}

impl DegenerateHull {
    fn coordinates(&self, p: &[f64]) -> (Vec<f64>, f64) {
        let rel: Vec<f64> = p.iter().zip(&self.origin).map(|(a, b)| a - b).collect();
        let coords: Vec<f64> = self.basis.iter().map(|b| dot(b, &rel)).collect();
        let mut off = rel.clone();
        for (c, b) in coords.iter().zip(&self.basis) {
            for (o, bi) in off.iter_mut().zip(b) {
                *o -= c * bi;
            }
        }
        (coords, off.iter().map(|x| x * x).sum::<f64>().sqrt())
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        let (coords, off) = self.coordinates(p);
        if off > tol {
            return false;
        }
        match (self.affine_rank, &self.inner, self.interval) {
            (2, Some(inner), _) => contains(inner, &coords, tol),
            (1, _, Some((lo, hi))) => coords[0] >= lo - tol && coords[0] <= hi + tol,
            _ => true,
        }
    }
}

/// True when `n_f . p <= c_f + tol` for every face.
pub fn contains(mesh: &HullMesh, p: &[f64], tol: f64) -> bool {
    mesh.face_normals
        .iter()
        .zip(&mesh.face_offsets)
        .all(|(n, c)| dot(n, p) <= c + tol)
}

/// Triangles of a 3D mesh grouped by nearly equal normals.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub faces: Vec<usize>,
    pub normal: Vec<f64>,
    pub offset: f64,
    pub area: f64,
}

impl HullMesh {
    /// Largest violation of `n_f . p <= c_f` over `points`.
    pub fn max_violation(&self, points: &[Vec<f64>]) -> f64 {
        points
            .iter()
            .flat_map(|p| {
                self.face_normals
                    .iter()
                    .zip(&self.face_offsets)
                    .map(move |(n, c)| dot(n, p) - c)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Every directed edge of a 3D mesh has its reverse in another face.
    pub fn is_closed(&self) -> bool {
        if self.dim != 3 {
            return self.faces.len() >= 3;
        }
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &self.faces {
            for k in 0..3 {
                *count.entry((f[k], f[(k + 1) % 3])).or_default() += 1;
            }
        }
        count
            .iter()
            .all(|(&(a, b), &n)| n == 1 && count.get(&(b, a)) == Some(&1))
    }

    pub fn triangle_area(&self, f: usize) -> f64 {
        let v = &self.faces[f];
        let (a, b, c) = (
            &self.vertices[v[0]],
            &self.vertices[v[1]],
            &self.vertices[v[2]],
        );
        let e1 = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let e2 = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        let n = crate::direction::cross(e1, e2);
        0.5 * (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt()
    }

    /// Region-grow edge-adjacent triangles whose normals are within
    /// `angle_tol` of the seed triangle's normal. Facets come out ordered by
    /// decreasing area.
    pub fn facets(&self, angle_tol: f64) -> Vec<Facet> {
        if self.dim != 3 {
            return Vec::new();
        }
        let mut by_edge: HashMap<(usize, usize), usize> = HashMap::new();
        for (i, f) in self.faces.iter().enumerate() {
            for k in 0..3 {
                by_edge.insert((f[k], f[(k + 1) % 3]), i);
            }
        }
        let angle = |a: &[f64], b: &[f64]| {
            let cr = crate::direction::cross([a[0], a[1], a[2]], [b[0], b[1], b[2]]);
            (cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2])
                .sqrt()
                .atan2(dot(a, b))
        };
        let mut group = vec![usize::MAX; self.faces.len()];
        let mut facets = Vec::new();
        for seed in 0..self.faces.len() {
            if group[seed] != usize::MAX {
                continue;
            }
            let id = facets.len();
            group[seed] = id;
            let mut members = vec![seed];
            let mut queue = VecDeque::from([seed]);
            while let Some(f) = queue.pop_front() {
                let v = &self.faces[f];
                for k in 0..3 {
                    if let Some(&g) = by_edge.get(&(v[(k + 1) % 3], v[k])) {
                        if group[g] == usize::MAX
                            && angle(&self.face_normals[seed], &self.face_normals[g]) < angle_tol
                        {
                            group[g] = id;
                            members.push(g);
                            queue.push_back(g);
                        }
                    }
                }
            }
            let area: f64 = members.iter().map(|&f| self.triangle_area(f)).sum();
            let mut normal = vec![0.0; 3];
            for &f in &members {
                let w = self.triangle_area(f);
                for (n, x) in normal.iter_mut().zip(&self.face_normals[f]) {
                    *n += w * x;
                }
            }
            let len = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
            let normal = if len > 0.0 {
                normal.iter().map(|x| x / len).collect()
            } else {
                self.face_normals[seed].clone()
            };
            let offset = members
                .iter()
                .flat_map(|&f| {
                    self.faces[f]
                        .iter()
                        .map(|&v| dot(&normal, &self.vertices[v]))
                })
                .fold(f64::NEG_INFINITY, f64::max);
            members.sort_unstable();
            facets.push(Facet {
                faces: members,
                normal,
                offset,
                area,
            });
        }
        facets.sort_by(|a, b| b.area.total_cmp(&a.area).then(a.faces[0].cmp(&b.faces[0])));
        facets
    }

    /// Vertex indices of the 2D polygon in counter-clockwise order.
    pub fn polygon(&self) -> Vec<usize> {
        self.faces.iter().map(|e| e[0]).collect()
    }
}

/// Convex hull of a 2D or 3D cloud.
pub fn convex_hull(cloud: &PointCloud) -> Result<Hull> {
    if cloud.points.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot hull an empty point cloud".into(),
        ));
    }
    let n = cloud.dim;
    let (centroid, axes, sv) = principal_axes(&cloud.points);
    let rank = if sv[0] == 0.0 {
        0
    } else {
        sv.iter().filter(|&&s| s > HULL_REL_TOL * sv[0]).count()
    };
    if rank == n {
        let idx: Vec<usize> = (0..cloud.points.len()).collect();
        let mesh = if n == 3 {
            hull3(&cloud.points, &idx)
        } else {
            hull2(&cloud.points, &idx)
        };
        if let Some(mesh) = mesh {
            return Ok(Hull::Full(mesh));
        }
    }
    Ok(Hull::Degenerate(degenerate(
        &cloud.points,
        n,
        rank.min(n - 1),
        centroid,
        axes,
    )))
}

fn degenerate(
    points: &[Vec<f64>],
    n: usize,
    rank: usize,
    origin: Vec<f64>,
    axes: Vec<Vec<f64>>,
) -> DegenerateHull {
    let basis: Vec<Vec<f64>> = axes.into_iter().take(rank).collect();
    let coords: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            let rel: Vec<f64> = p.iter().zip(&origin).map(|(a, b)| a - b).collect();
            basis.iter().map(|b| dot(b, &rel)).collect()
        })
        .collect();
    let mut hull = DegenerateHull {
        ambient_dim: n,
        affine_rank: rank,
        origin: origin.clone(),
        basis,
        inner: None,
        interval: None,
        vertices: Vec::new(),
        diameter: 0.0,
    };
    match rank {
        2 => {
            let idx: Vec<usize> = (0..points.len()).collect();
            if let Some(inner) = hull2(&coords, &idx) {
                hull.vertices = inner.sources.iter().map(|&i| points[i].clone()).collect();
                hull.diameter = inner.diameter;
                hull.inner = Some(inner);
            }
        }
        1 => {
            let (mut lo, mut hi) = (0, 0);
            for (i, c) in coords.iter().enumerate() {
                if c[0] < coords[lo][0] {
                    lo = i;
                }
                if c[0] > coords[hi][0] {
                    hi = i;
                }
            }
            hull.interval = Some((coords[lo][0], coords[hi][0]));
            hull.vertices = vec![points[lo].clone(), points[hi].clone()];
            hull.diameter = coords[hi][0] - coords[lo][0];
        }
        _ => hull.vertices = vec![points[0].clone()],
    }
    hull
}

fn diameter(vertices: &[Vec<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in vertices.iter().enumerate() {
        for b in &vertices[i + 1..] {
            d = d.max(distance(a, b));
        }
    }
    d
}

fn c2(p: &[f64]) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

fn c3(p: &[f64]) -> Coord3D<f64> {
    Coord3D {
        x: p[0],
        y: p[1],
        z: p[2],
    }
}

/// Monotone chain; collinear boundary points are dropped.
fn hull2(points: &[Vec<f64>], idx: &[usize]) -> Option<HullMesh> {
    let mut order = idx.to_vec();
    order.sort_by(|&a, &b| {
        points[a][0]
            .total_cmp(&points[b][0])
            .then(points[a][1].total_cmp(&points[b][1]))
    });
    order.dedup_by(|a, b| points[*a] == points[*b]);
    if order.len() < 3 {
        return None;
    }
    let turn =
        |a: usize, b: usize, c: usize| orient2d(c2(&points[a]), c2(&points[b]), c2(&points[c]));
    let mut chain: Vec<usize> = Vec::with_capacity(2 * order.len());
    for pass in 0..2 {
        let start = chain.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(order.iter())
        } else {
            Box::new(order.iter().rev())
        };
        for &p in iter {
            while chain.len() >= start + 2
                && turn(chain[chain.len() - 2], chain[chain.len() - 1], p) <= 0.0
            {
                chain.pop();
            }
            chain.push(p);
        }
        chain.pop();
    }
    if chain.len() < 3 {
        return None;
    }
    let vertices: Vec<Vec<f64>> = chain.iter().map(|&i| points[i].clone()).collect();
    let m = vertices.len();
    let mut faces = Vec::with_capacity(m);
    let mut normals = Vec::with_capacity(m);
    let mut offsets = Vec::with_capacity(m);
    for i in 0..m {
        let (a, b) = (&vertices[i], &vertices[(i + 1) % m]);
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len = dx.hypot(dy);
        let nrm = vec![dy / len, -dx / len];
        offsets.push(dot(&nrm, a).max(dot(&nrm, b)));
        normals.push(nrm);
        faces.push(vec![i, (i + 1) % m]);
    }
    let diameter = diameter(&vertices);
    Some(HullMesh {
        dim: 2,
        vertices,
        sources: chain,
        faces,
        face_normals: normals,
        face_offsets: offsets,
        diameter,
    })
}

struct Face {
    v: [usize; 3],
    normal: [f64; 3],
    offset: f64,
    alive: bool,
    outside: Vec<usize>,
}

struct Builder<'a> {
    pts: &'a [Vec<f64>],
    faces: Vec<Face>,
    edges: HashMap<(usize, usize), usize>,
}

impl<'a> Builder<'a> {
    /// Strictly above the face plane, i.e. outside.
    fn above(&self, f: usize, p: usize) -> bool {
        let [a, b, c] = self.faces[f].v;
        orient3d(
            c3(&self.pts[a]),
            c3(&self.pts[b]),
            c3(&self.pts[c]),
            c3(&self.pts[p]),
        ) < 0.0
    }

    fn height(&self, f: usize, p: usize) -> f64 {
        let face = &self.faces[f];
        dot(&face.normal, &self.pts[p]) - face.offset
    }

    fn add_face(&mut self, v: [usize; 3]) -> usize {
        let (normal, offset) = plane(self.pts, v);
        let id = self.faces.len();
        self.faces.push(Face {
            v,
            normal,
            offset,
            alive: true,
            outside: Vec::new(),
        });
        for k in 0..3 {
            self.edges.insert((v[k], v[(k + 1) % 3]), id);
        }
        id
    }

    fn assign(&mut self, p: usize, among: &[usize]) {
        let mut best: Option<(usize, f64)> = None;
        for &f in among {
            if self.above(f, p) {
                let h = self.height(f, p);
                if best.is_none_or(|(_, bh)| h > bh) {
                    best = Some((f, h));
                }
            }
        }
        if let Some((f, _)) = best {
            self.faces[f].outside.push(p);
        }
    }
}

/// Outward normal from the cross product of the two shortest edges.
fn plane(pts: &[Vec<f64>], v: [usize; 3]) -> ([f64; 3], f64) {
    let p: Vec<[f64; 3]> = v
        .iter()
        .map(|&i| [pts[i][0], pts[i][1], pts[i][2]])
        .collect();
    let sub = |a: [f64; 3], b: [f64; 3]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let len2 = |e: [f64; 3]| e[0] * e[0] + e[1] * e[1] + e[2] * e[2];
    // Edge opposite vertex k is shared by the other two; pair the two
    // shortest edges at their common vertex.
    let opp = [
        len2(sub(p[2], p[1])),
        len2(sub(p[0], p[2])),
        len2(sub(p[1], p[0])),
    ];
    let longest = (0..3)
        .max_by(|&a, &b| opp[a].total_cmp(&opp[b]))
        .unwrap_or(0);
    // The vertex opposite the longest edge joins the two shortest ones.
    let k = longest;
    let (a, b, c) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
    let n = crate::direction::cross(sub(b, a), sub(c, a));
    let len = len2(n).sqrt();
    let n = if len > 0.0 {
        [n[0] / len, n[1] / len, n[2] / len]
    } else {
        [0.0, 0.0, 0.0]
    };
    let offset = p
        .iter()
        .map(|q| n[0] * q[0] + n[1] * q[1] + n[2] * q[2])
        .fold(f64::NEG_INFINITY, f64::max);
    (n, offset)
}

fn hull3(points: &[Vec<f64>], idx: &[usize]) -> Option<HullMesh> {
    let far = |from: &dyn Fn(usize) -> f64| -> usize {
        idx.iter()
            .copied()
            .max_by(|&a, &b| from(a).total_cmp(&from(b)).then(b.cmp(&a)))
            .unwrap_or(idx[0])
    };
    let i0 = far(&|i| points[i][0] + 1e-3 * points[i][1] + 1e-6 * points[i][2]);
    let i1 = far(&|i| distance(&points[i], &points[i0]));
    let line = |i: usize| {
        let (a, b, p) = (&points[i0], &points[i1], &points[i]);
        let e = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let w = [p[0] - a[0], p[1] - a[1], p[2] - a[2]];
        let cr = crate::direction::cross(e, w);
        cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2]
    };
    let i2 = far(&line);
    let i3 = far(&|i| {
        orient3d(
            c3(&points[i0]),
            c3(&points[i1]),
            c3(&points[i2]),
            c3(&points[i]),
        )
        .abs()
    });
    if orient3d(
        c3(&points[i0]),
        c3(&points[i1]),
        c3(&points[i2]),
        c3(&points[i3]),
    ) == 0.0
    {
        return None;
    }

    let mut b = Builder {
        pts: points,
        faces: Vec::new(),
        edges: HashMap::new(),
    };
    let simplex = [i0, i1, i2, i3];
    for skip in 0..4 {
        let tri: Vec<usize> = (0..4).filter(|&k| k != skip).map(|k| simplex[k]).collect();
        let w = simplex[skip];
        let mut v = [tri[0], tri[1], tri[2]];
        if orient3d(
            c3(&points[v[0]]),
            c3(&points[v[1]]),
            c3(&points[v[2]]),
            c3(&points[w]),
        ) < 0.0
        {
            v.swap(1, 2);
        }
        b.add_face(v);
    }
    let initial: Vec<usize> = (0..4).collect();
    for &p in idx {
        if !simplex.contains(&p) {
            b.assign(p, &initial);
        }
    }

    let mut pending: VecDeque<usize> = (0..4).collect();
    while let Some(f) = pending.pop_front() {
        if !b.faces[f].alive || b.faces[f].outside.is_empty() {
            continue;
        }
        let apex = {
            let face = &b.faces[f];
            *face
                .outside
                .iter()
                .max_by(|&&x, &&y| b.height(f, x).total_cmp(&b.height(f, y)).then(y.cmp(&x)))
                .expect("nonempty")
        };
        // Faces visible from the apex form a connected patch around f.
        let mut visible = vec![f];
        let mut seen: HashMap<usize, bool> = HashMap::from([(f, true)]);
        let mut k = 0;
        while k < visible.len() {
            let v = b.faces[visible[k]].v;
            for e in 0..3 {
                if let Some(&g) = b.edges.get(&(v[(e + 1) % 3], v[e])) {
                    if let std::collections::hash_map::Entry::Vacant(slot) = seen.entry(g) {
                        let vis = b.above(g, apex);
                        slot.insert(vis);
                        if vis {
                            visible.push(g);
                        }
                    }
                }
            }
            k += 1;
        }
        let mut horizon = Vec::new();
        for &g in &visible {
            let v = b.faces[g].v;
            for e in 0..3 {
                let (x, y) = (v[e], v[(e + 1) % 3]);
                let twin = b.edges.get(&(y, x)).copied();
                if twin.is_none_or(|t| !seen.get(&t).copied().unwrap_or(false)) {
                    horizon.push((x, y));
                }
            }
        }
        let mut orphans = Vec::new();
        for &g in &visible {
            let face = &mut b.faces[g];
            face.alive = false;
            orphans.append(&mut face.outside);
            let v = face.v;
            for e in 0..3 {
                b.edges.remove(&(v[e], v[(e + 1) % 3]));
            }
        }
        let created: Vec<usize> = horizon
            .iter()
            .map(|&(x, y)| b.add_face([x, y, apex]))
            .collect();
        for p in orphans {
            if p != apex {
                b.assign(p, &created);
            }
        }
        pending.extend(created);
    }

    let alive: Vec<&Face> = b.faces.iter().filter(|f| f.alive).collect();
    let mut remap: HashMap<usize, usize> = HashMap::new();
    let mut sources = Vec::new();
    for f in &alive {
        for &v in &f.v {
            remap.entry(v).or_insert_with(|| {
                sources.push(v);
                sources.len() - 1
            });
        }
    }
    let vertices: Vec<Vec<f64>> = sources.iter().map(|&i| points[i].clone()).collect();
    let faces = alive
        .iter()
        .map(|f| f.v.iter().map(|v| remap[v]).collect())
        .collect();
    let face_normals = alive.iter().map(|f| f.normal.to_vec()).collect();
    let face_offsets = alive.iter().map(|f| f.offset).collect();
    let diameter = diameter(&vertices);
    Some(HullMesh {
        dim: 3,
        vertices,
        sources,
        faces,
        face_normals,
        face_offsets,
        diameter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direction::fibonacci_sphere;

    fn cube_cloud() -> PointCloud {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(vec![
                (i & 1) as f64,
                ((i >> 1) & 1) as f64,
                ((i >> 2) & 1) as f64,
            ]);
        }
        for k in 0..20 {
            let t = k as f64 / 20.0;
            pts.push(vec![0.1 + 0.8 * t, 0.5, 0.2 + 0.6 * t * t]);
        }
        PointCloud::from_points(3, pts).unwrap()
    }

    #[test]
    fn cube_has_eight_vertices_and_twelve_triangles() {
        let hull = convex_hull(&cube_cloud()).unwrap();
        let mesh = hull.mesh().unwrap();
        assert_eq!(mesh.vertices.len(), 8);
        assert_eq!(mesh.faces.len(), 12);
        assert!(mesh.is_closed());
        assert_eq!(mesh.facets(FACET_ANGLE_TOL).len(), 6);
        for f in mesh.facets(FACET_ANGLE_TOL) {
            assert!((f.area - 1.0).abs() < 1e-12);
        }
        let centroid: Vec<f64> = (0..3)
            .map(|k| mesh.vertices.iter().map(|v| v[k]).sum::<f64>() / 8.0)
            .collect();
        assert!(contains(mesh, &centroid, 0.0));
        assert!(!contains(mesh, &[1.5, 0.5, 0.5], 1e-9));
        for v in &mesh.vertices {
            assert!(contains(mesh, v, 1e-9));
        }
    }

    #[test]
    fn sphere_hull_offsets_track_chord_error() {
        let pts: Vec<Vec<f64>> = fibonacci_sphere(2000)
            .iter()
            .map(|d| d.vector().to_vec())
            .collect();
        let mesh = convex_hull(&PointCloud::from_points(3, pts.clone()).unwrap()).unwrap();
        let mesh = mesh.mesh().unwrap().clone();
        assert_eq!(mesh.vertices.len(), 2000);
        assert_eq!(mesh.faces.len(), 2 * 2000 - 4);
        assert!(mesh.is_closed());
        let worst = mesh
            .face_offsets
            .iter()
            .map(|c| (1.0 - c).abs())
            .fold(0.0, f64::max);
        assert!(worst < 5e-3, "{worst}");
        assert!(mesh.max_violation(&pts) <= HULL_REL_TOL * mesh.diameter);
    }

    #[test]
    fn square_polygon_is_counter_clockwise() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![0.5, 0.0],
            vec![0.3, 0.4],
        ];
        let hull = convex_hull(&PointCloud::from_points(2, pts).unwrap()).unwrap();
        let mesh = hull.mesh().unwrap();
        assert_eq!(mesh.vertices.len(), 4);
        let poly = mesh.polygon();
        let mut area = 0.0;
        for i in 0..poly.len() {
            let (a, b) = (
                &mesh.vertices[poly[i]],
                &mesh.vertices[poly[(i + 1) % poly.len()]],
            );
            area += a[0] * b[1] - a[1] * b[0];
        }
        assert!((area / 2.0 - 1.0).abs() < 1e-15);
        assert!(contains(mesh, &[0.5, 0.5], 0.0));
        assert!(!contains(mesh, &[0.5, -0.1], 1e-9));
    }

    #[test]
    fn planar_cloud_is_degenerate_with_rank_two() {
        let pts: Vec<Vec<f64>> = fibonacci_sphere(200)
            .iter()
            .map(|d| {
                let [x, y, _] = d.vector();
                vec![x, y, y]
            })
            .collect();
        let hull = convex_hull(&PointCloud::from_points(3, pts).unwrap()).unwrap();
        let Hull::Degenerate(d) = &hull else {
            panic!("expected degenerate hull")
        };
        assert_eq!(d.affine_rank, 2);
        assert!(hull.contains(&[0.0, 0.2, 0.2], 1e-9));
        assert!(!hull.contains(&[0.0, 0.2, 0.3], 1e-9));
        assert!(!hull.contains(&[2.0, 0.0, 0.0], 1e-9));
    }

    #[test]
    fn collinear_and_single_point_clouds() {
        let pts = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 1.0, 1.0],
            vec![0.5, 0.5, 0.5],
        ];
        let hull = convex_hull(&PointCloud::from_points(3, pts).unwrap()).unwrap();
        let Hull::Degenerate(d) = &hull else { panic!() };
        assert_eq!(d.affine_rank, 1);
        assert!((d.diameter - 3f64.sqrt()).abs() < 1e-12);
        assert!(hull.contains(&[0.25, 0.25, 0.25], 1e-12));
        assert!(!hull.contains(&[1.25, 1.25, 1.25], 1e-9));
        let one = convex_hull(&PointCloud::from_points(2, vec![vec![1.0, 2.0]]).unwrap()).unwrap();
        let Hull::Degenerate(d) = &one else { panic!() };
        assert_eq!(d.affine_rank, 0);
    }
}
