//! Combinatorial planar maps given by rotation systems.
//!
//! Edge `e` owns the half-edges `2e` (leaving its tail) and `2e + 1`
//! (leaving its head). Faces are traced with `next = ccw_prev(twin(h))`,
//! which walks the face on the left of `h`.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct PlanarMap {
    vertex_count: usize,
    origin: Vec<usize>,
    ccw_next: Vec<usize>,
    ccw_prev: Vec<usize>,
    face: Vec<usize>,
    face_count: usize,
}

pub fn twin(h: usize) -> usize {
    h ^ 1
}

impl PlanarMap {
    /// `rotations[v]` lists the half-edges leaving `v` in counterclockwise order.
    pub fn new(edge_count: usize, rotations: &[Vec<usize>]) -> Result<PlanarMap> {
        let n_half = 2 * edge_count;
        let mut origin = vec![usize::MAX; n_half];
        let mut ccw_next = vec![usize::MAX; n_half];
        let mut ccw_prev = vec![usize::MAX; n_half];
        for (v, rot) in rotations.iter().enumerate() {
            for (k, &h) in rot.iter().enumerate() {
                if h >= n_half || origin[h] != usize::MAX {
                    return Err(Error::Invariant(format!("half-edge {h} misplaced in rotation")));
                }
                origin[h] = v;
                ccw_next[h] = rot[(k + 1) % rot.len()];
                ccw_prev[h] = rot[(k + rot.len() - 1) % rot.len()];
            }
        }
        if origin.iter().any(|&o| o == usize::MAX) {
            return Err(Error::Invariant("half-edge missing from rotations".into()));
        }
        let mut face = vec![usize::MAX; n_half];
        let mut face_count = 0;
        for start in 0..n_half {
            if face[start] != usize::MAX {
                continue;
            }
            let mut h = start;
            loop {
                face[h] = face_count;
                h = ccw_prev[twin(h)];
                if h == start {
                    break;
                }
            }
            face_count += 1;
        }
        Ok(PlanarMap { vertex_count: rotations.len(), origin, ccw_next, ccw_prev, face, face_count })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.origin.len() / 2
    }

    pub fn face_count(&self) -> usize {
        self.face_count
    }

    pub fn origin(&self, h: usize) -> usize {
        self.origin[h]
    }

    pub fn ccw_next(&self, h: usize) -> usize {
        self.ccw_next[h]
    }

    pub fn ccw_prev(&self, h: usize) -> usize {
        self.ccw_prev[h]
    }

    /// Face on the left of `h`.
    pub fn left_face(&self, h: usize) -> usize {
        self.face[h]
    }

    pub fn right_face(&self, h: usize) -> usize {
        self.face[twin(h)]
    }

    /// Number of connected components, isolated vertices included.
    pub fn components(&self) -> usize {
        let mut uf = UnionFind::new(self.vertex_count);
        for e in 0..self.edge_count() {
            uf.union(self.origin[2 * e], self.origin[2 * e + 1]);
        }
        uf.count()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edge_count() as i64 + self.face_count as i64
    }

    /// A connected map is spherical iff `V − E + F = 2`.
    pub fn is_spherical(&self) -> bool {
        self.components() == 1 && self.euler_characteristic() == 2
    }

    /// Groups faces that stay connected once the edges in `cut` are removed.
    pub fn face_regions(&self, cut: impl Fn(usize) -> bool) -> UnionFind {
        let mut uf = UnionFind::new(self.face_count);
        for e in 0..self.edge_count() {
            if !cut(e) {
                uf.union(self.face[2 * e], self.face[2 * e + 1]);
            }
        }
        uf
    }
}

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    pub fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        self.parent[rx.max(ry)] = rx.min(ry);
        true
    }

    pub fn same(&mut self, x: usize, y: usize) -> bool {
        self.find(x) == self.find(y)
    }

    pub fn count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&x| self.find(x) == x).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loop_has_inside_on_its_left() {
        // one vertex, one loop leaving east and returning from the north
        let m = PlanarMap::new(1, &[vec![0, 1]]).unwrap();
        assert_eq!(m.face_count(), 2);
        assert!(m.is_spherical());
        assert_ne!(m.left_face(0), m.right_face(0));
    }

    #[test]
    fn theta_graph() {
        // two vertices joined by three edges
        let m = PlanarMap::new(3, &[vec![0, 2, 4], vec![1, 5, 3]]).unwrap();
        assert_eq!(m.face_count(), 3);
        assert!(m.is_spherical());
    }

    #[test]
    fn twisted_rotation_is_not_planar() {
        // a vertex with two loops interleaved has genus one
        let m = PlanarMap::new(2, &[vec![0, 2, 1, 3]]).unwrap();
        assert_eq!(m.euler_characteristic(), 0);
        assert!(!m.is_spherical());
    }

    #[test]
    fn regions_after_cut() {
        let m = PlanarMap::new(3, &[vec![0, 2, 4], vec![1, 5, 3]]).unwrap();
        let mut uf = m.face_regions(|e| e <= 1);
        assert_eq!(uf.count(), 2);
    }
}
