//! Median filtering of triangle mesh normals with vertex repositioning.
//!
//! The mesh analogue of the grid smoother: each face gathers the unit
//! normals of its edge neighbors, vertex neighbors, and itself, and replaces
//! its normal with the gathered normal minimizing the weighted sum of
//! angular distances to all others (a vector median, so the result is always
//! one of the gathered normals). Vertices are then moved to follow the
//! filtered normal field: for vertex `v`,
//!
//! `v <- v + sum_T A(T) * <m(T), C(T) - v> * m(T) / sum_T A(T)`
//!
//! over the faces `T` incident to `v`, with `A` the face area, `C` the face
//! centroid, and `m` the median normal. Connectivity never changes; only
//! vertex positions move.

use crate::types::Point3;
use std::collections::HashMap;
use thiserror::Error;

/// Cross products below this norm are treated as degenerate geometry.
const ZERO_AREA_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("face {face} references vertex {vertex} but the mesh has {vertex_count} vertices")]
    VertexIndexOutOfRange {
        face: usize,
        vertex: usize,
        vertex_count: usize,
    },
    #[error("face {face} repeats vertex {vertex}")]
    RepeatedVertex { face: usize, vertex: usize },
    #[error("edge ({a}, {b}) is traversed in the same direction by faces {first} and {second}; orientation is inconsistent")]
    InconsistentOrientation {
        a: usize,
        b: usize,
        first: usize,
        second: usize,
    },
    #[error("edge ({a}, {b}) is shared by more than two faces")]
    NonManifoldEdge { a: usize, b: usize },
    #[error("face {face} has zero area")]
    ZeroAreaFace { face: usize },
    #[error("non-finite vertex coordinate in face {face}")]
    NonFiniteVertex { face: usize },
}

/// Indexed triangle mesh with consistently oriented faces.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Point3>,
    faces: Vec<[usize; 3]>,
}

impl TriangleMesh {
    /// Validates that every face references three distinct existing
    /// vertices and that any edge shared by two faces is traversed in
    /// opposite directions (consistent orientation, at most two faces per
    /// edge).
    pub fn new(vertices: Vec<Point3>, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let vertex_count = vertices.len();
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (fi, face) in faces.iter().enumerate() {
            for &v in face {
                if v >= vertex_count {
                    return Err(MeshError::VertexIndexOutOfRange {
                        face: fi,
                        vertex: v,
                        vertex_count,
                    });
                }
            }
            if face[0] == face[1] || face[1] == face[2] || face[0] == face[2] {
                let repeated = if face[0] == face[1] || face[0] == face[2] {
                    face[0]
                } else {
                    face[1]
                };
                return Err(MeshError::RepeatedVertex {
                    face: fi,
                    vertex: repeated,
                });
            }
            for (a, b) in [(face[0], face[1]), (face[1], face[2]), (face[2], face[0])] {
                if let Some(&first) = directed.get(&(a, b)) {
                    return Err(MeshError::InconsistentOrientation {
                        a,
                        b,
                        first,
                        second: fi,
                    });
                }
                directed.insert((a, b), fi);
            }
        }
        // A directed edge and its reverse account for the two permitted
        // incidences, so any third face on an undirected edge has already
        // tripped the duplicate-direction check above. Nothing more to do
        // for the two-faces-per-edge rule.
        Ok(Self { vertices, faces })
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    fn face_cross(&self, face: usize) -> Result<Point3, MeshError> {
        let [a, b, c] = self.faces[face];
        let (va, vb, vc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        for v in [va, vb, vc] {
            if !(v.x.is_finite() && v.y.is_finite() && v.z.is_finite()) {
                return Err(MeshError::NonFiniteVertex { face });
            }
        }
        Ok(vb.sub(va).cross(vc.sub(va)))
    }

    /// Unit normal of a face under the right-hand rule; zero-area faces are
    /// an error naming the face.
    pub fn face_normal(&self, face: usize) -> Result<Point3, MeshError> {
        let cross = self.face_cross(face)?;
        let norm = cross.norm();
        if norm < ZERO_AREA_EPS {
            return Err(MeshError::ZeroAreaFace { face });
        }
        Ok(cross.scale(1.0 / norm))
    }

    pub fn face_area(&self, face: usize) -> Result<f64, MeshError> {
        Ok(self.face_cross(face)?.norm() * 0.5)
    }

    pub fn face_centroid(&self, face: usize) -> Point3 {
        let [a, b, c] = self.faces[face];
        self.vertices[a]
            .add(self.vertices[b])
            .add(self.vertices[c])
            .scale(1.0 / 3.0)
    }
}

/// Neighbor faces of one face, split by the kind of adjacency: edge
/// neighbors share two vertices, vertex neighbors share exactly one. The
/// face itself belongs to neither list and the lists are disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleNeighborhood {
    pub edge_neighbors: Vec<usize>,
    pub vertex_neighbors: Vec<usize>,
}

/// Neighborhoods for every face. Connectivity is fixed for the lifetime of
/// a smoothing run, so this is computed once up front.
pub fn face_neighborhoods(mesh: &TriangleMesh) -> Vec<TriangleNeighborhood> {
    let mut by_vertex: Vec<Vec<usize>> = vec![Vec::new(); mesh.vertex_count()];
    for (fi, face) in mesh.faces().iter().enumerate() {
        for &v in face {
            by_vertex[v].push(fi);
        }
    }
    mesh.faces()
        .iter()
        .enumerate()
        .map(|(fi, face)| {
            let mut shared: HashMap<usize, usize> = HashMap::new();
            for &v in face {
                for &other in &by_vertex[v] {
                    if other != fi {
                        *shared.entry(other).or_insert(0) += 1;
                    }
                }
            }
            let mut edge_neighbors = Vec::new();
            let mut vertex_neighbors = Vec::new();
            for (other, count) in shared {
                if count >= 2 {
                    edge_neighbors.push(other);
                } else {
                    vertex_neighbors.push(other);
                }
            }
            edge_neighbors.sort_unstable();
            vertex_neighbors.sort_unstable();
            TriangleNeighborhood {
                edge_neighbors,
                vertex_neighbors,
            }
        })
        .collect()
}

/// Gather weights for the vector median. The filtered face itself always
/// participates with weight 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeshMedianWeights {
    pub edge: u64,
    pub vertex: u64,
}

impl Default for MeshMedianWeights {
    fn default() -> Self {
        Self { edge: 1, vertex: 1 }
    }
}

fn angular_distance(a: Point3, b: Point3) -> f64 {
    a.dot(b).clamp(-1.0, 1.0).acos()
}

/// Vector median over the gathered normals of `face`'s neighborhood: the
/// gathered normal minimizing the weighted sum of angular distances to all
/// gathered normals. Ties resolve to the candidate with the smallest face
/// index.
pub fn median_normal(
    mesh: &TriangleMesh,
    neighborhoods: &[TriangleNeighborhood],
    face: usize,
    weights: &MeshMedianWeights,
) -> Result<Point3, MeshError> {
    let hood = &neighborhoods[face];
    let mut gathered: Vec<(usize, u64)> = Vec::with_capacity(
        1 + hood.edge_neighbors.len() + hood.vertex_neighbors.len(),
    );
    gathered.push((face, 1));
    gathered.extend(hood.edge_neighbors.iter().map(|&f| (f, weights.edge)));
    gathered.extend(hood.vertex_neighbors.iter().map(|&f| (f, weights.vertex)));
    gathered.sort_unstable_by_key(|&(f, _)| f);

    let normals: Vec<Point3> = gathered
        .iter()
        .map(|&(f, _)| mesh.face_normal(f))
        .collect::<Result<_, _>>()?;

    let mut best = 0;
    let mut best_cost = f64::INFINITY;
    for (ci, &candidate) in normals.iter().enumerate() {
        let cost: f64 = normals
            .iter()
            .zip(&gathered)
            .map(|(&n, &(_, w))| w as f64 * angular_distance(candidate, n))
            .sum();
        if cost < best_cost {
            best_cost = cost;
            best = ci;
        }
    }
    Ok(normals[best])
}

/// Runs `iterations` rounds of normal median filtering plus the vertex
/// update with default gather weights (edge and vertex neighbors both 1).
pub fn smooth_mesh(mesh: &TriangleMesh, iterations: usize) -> Result<TriangleMesh, MeshError> {
    smooth_mesh_with(mesh, iterations, &MeshMedianWeights::default())
}

/// [`smooth_mesh`] with explicit gather weights.
pub fn smooth_mesh_with(
    mesh: &TriangleMesh,
    iterations: usize,
    weights: &MeshMedianWeights,
) -> Result<TriangleMesh, MeshError> {
    let neighborhoods = face_neighborhoods(mesh);
    let mut by_vertex: Vec<Vec<usize>> = vec![Vec::new(); mesh.vertex_count()];
    for (fi, face) in mesh.faces().iter().enumerate() {
        for &v in face {
            by_vertex[v].push(fi);
        }
    }

    let mut current = mesh.clone();
    for _ in 0..iterations {
        let medians: Vec<Point3> = (0..current.face_count())
            .map(|f| median_normal(&current, &neighborhoods, f, weights))
            .collect::<Result<_, _>>()?;
        let areas: Vec<f64> = (0..current.face_count())
            .map(|f| current.face_area(f))
            .collect::<Result<_, _>>()?;
        let centroids: Vec<Point3> = (0..current.face_count())
            .map(|f| current.face_centroid(f))
            .collect();

        // All reads come from the current iteration's geometry; writes land
        // in a fresh buffer so update order cannot matter.
        let vertices: Vec<Point3> = current
            .vertices()
            .iter()
            .enumerate()
            .map(|(vi, &v)| {
                let incident = &by_vertex[vi];
                if incident.is_empty() {
                    return v;
                }
                let mut push = Point3::new(0.0, 0.0, 0.0);
                let mut area_sum = 0.0;
                for &f in incident {
                    let m = medians[f];
                    let along = m.dot(centroids[f].sub(v));
                    push = push.add(m.scale(areas[f] * along));
                    area_sum += areas[f];
                }
                v.add(push.scale(1.0 / area_sum))
            })
            .collect();
        current = TriangleMesh {
            vertices,
            faces: current.faces,
        };
    }
    Ok(current)
}
