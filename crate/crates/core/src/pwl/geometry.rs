//! Exact polyhedral cells over the unit cube.
//!
//! A cell is a convex polytope carried in H-representation together with
//! its complete vertex set. Cells are only ever created by cutting the
//! cube (or an existing cell) with half-spaces, so vertices are maintained
//! incrementally: a cut keeps the vertices on the feasible side and adds
//! the crossing points of edges, never re-enumerating from scratch.
//!
//! Edges are recovered from vertex/constraint incidence: two vertices are
//! adjacent exactly when their common tight constraints have rank n-1.

use std::sync::Arc;

use num::{One, Signed, Zero};

use crate::rational::Rat;

pub type Point = Vec<Rat>;

/// `normal . x <= bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Halfspace {
    pub normal: Vec<Rat>,
    pub bound: Rat,
}

impl Halfspace {
    pub fn new(normal: Vec<Rat>, bound: Rat) -> Self {
        Halfspace { normal, bound }
    }

    pub fn flip(&self) -> Halfspace {
        Halfspace {
            normal: self.normal.iter().map(|c| -c).collect(),
            bound: -&self.bound,
        }
    }

    /// `normal . p - bound`; negative strictly inside.
    pub fn excess(&self, p: &Point) -> Rat {
        dot(&self.normal, p) - &self.bound
    }

    fn is_trivial(&self) -> bool {
        self.normal.iter().all(|c| c.is_zero())
    }

    /// Scale so the first nonzero coefficient is +-1, for deduplication.
    fn normalized(&self) -> Halfspace {
        let Some(pivot) = self.normal.iter().find(|c| !c.is_zero()) else {
            return self.clone();
        };
        let scale = pivot.abs();
        Halfspace {
            normal: self.normal.iter().map(|c| c / &scale).collect(),
            bound: &self.bound / &scale,
        }
    }
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rank of a rational matrix, by Gaussian elimination.
pub fn rank(mut rows: Vec<Vec<Rat>>) -> usize {
    let mut r = 0;
    let cols = rows.first().map(|row| row.len()).unwrap_or(0);
    for col in 0..cols {
        let Some(pivot) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pivot);
        let pivot_row = rows[r].clone();
        for row in rows.iter_mut().skip(r + 1) {
            if !row[col].is_zero() {
                let factor = &row[col] / &pivot_row[col];
                for (entry, pivot_entry) in row.iter_mut().zip(&pivot_row) {
                    *entry = &*entry - &factor * pivot_entry;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Convex polytope inside `[0,1]^dim` with exact vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub dim: usize,
    ineqs: Vec<Halfspace>,
    verts: Vec<Point>,
}

/// Result of cutting a cell with a half-space.
pub enum CutResult {
    /// The cell lies entirely inside the half-space.
    Whole,
    /// The feasible side is empty or lower-dimensional.
    Gone,
    /// Proper split; the new cell on the feasible side.
    Split(Cell),
}

impl Cell {
    /// The full cube `[0,1]^n`.
    pub fn cube(dim: usize) -> Arc<Cell> {
        assert!(dim >= 1, "cells need at least one dimension");
        let mut ineqs = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            let mut up = vec![Rat::zero(); dim];
            up[i] = Rat::one();
            ineqs.push(Halfspace::new(up, Rat::one()));
            let mut down = vec![Rat::zero(); dim];
            down[i] = -Rat::one();
            ineqs.push(Halfspace::new(down, Rat::zero()));
        }
        let mut verts = Vec::with_capacity(1 << dim);
        for bits in 0..(1u32 << dim) {
            verts.push(
                (0..dim)
                    .map(|i| {
                        if bits & (1 << i) != 0 {
                            Rat::one()
                        } else {
                            Rat::zero()
                        }
                    })
                    .collect(),
            );
        }
        Arc::new(Cell { dim, ineqs, verts })
    }

    pub fn ineqs(&self) -> &[Halfspace] {
        &self.ineqs
    }

    pub fn vertices(&self) -> &[Point] {
        &self.verts
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.ineqs.iter().all(|h| !h.excess(p).is_positive())
    }

    /// Per-vertex bitmask of tight constraints.
    fn tight_masks(&self) -> Vec<u128> {
        assert!(
            self.ineqs.len() <= 128,
            "cell has too many constraints for tightness masks"
        );
        self.verts
            .iter()
            .map(|v| {
                let mut mask = 0u128;
                for (i, h) in self.ineqs.iter().enumerate() {
                    if h.excess(v).is_zero() {
                        mask |= 1 << i;
                    }
                }
                mask
            })
            .collect()
    }

    /// Vertex pairs forming edges: common tight constraints of rank n-1.
    fn edges(&self) -> Vec<(usize, usize)> {
        let masks = self.tight_masks();
        let need = self.dim.saturating_sub(1);
        let mut out = Vec::new();
        for i in 0..self.verts.len() {
            for j in (i + 1)..self.verts.len() {
                let common = masks[i] & masks[j];
                if (common.count_ones() as usize) < need {
                    continue;
                }
                if need == 0 {
                    out.push((i, j));
                    continue;
                }
                let rows: Vec<Vec<Rat>> = self
                    .ineqs
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| common & (1 << k) != 0)
                    .map(|(_, h)| h.normal.clone())
                    .collect();
                if rank(rows) == need {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Drop constraints tight at no vertex and duplicate constraints.
    fn pruned(mut self) -> Cell {
        let mut kept: Vec<Halfspace> = Vec::new();
        let mut seen: Vec<Halfspace> = Vec::new();
        for h in std::mem::take(&mut self.ineqs) {
            if h.is_trivial() {
                continue;
            }
            if !self.verts.iter().any(|v| h.excess(v).is_zero()) {
                continue;
            }
            let norm = h.normalized();
            if seen.contains(&norm) {
                continue;
            }
            seen.push(norm);
            kept.push(h);
        }
        self.ineqs = kept;
        self
    }

    /// Cut by `h`, keeping the side `normal . x <= bound`. Only
    /// full-dimensional results are produced; a cut that would leave a
    /// lower-dimensional sliver reports `Gone`.
    pub fn cut(&self, h: &Halfspace) -> CutResult {
        let excess: Vec<Rat> = self.verts.iter().map(|v| h.excess(v)).collect();
        let any_inside = excess.iter().any(|e| e.is_negative());
        let any_outside = excess.iter().any(|e| e.is_positive());
        if !any_outside {
            return CutResult::Whole;
        }
        if !any_inside {
            return CutResult::Gone;
        }
        let mut verts: Vec<Point> = Vec::new();
        for (v, e) in self.verts.iter().zip(&excess) {
            if !e.is_positive() {
                verts.push(v.clone());
            }
        }
        for (i, j) in self.edges() {
            let (ei, ej) = (&excess[i], &excess[j]);
            if (ei.is_negative() && ej.is_positive()) || (ei.is_positive() && ej.is_negative()) {
                let t = ei / (ei - ej); // in (0,1)
                let crossing: Point = self.verts[i]
                    .iter()
                    .zip(&self.verts[j])
                    .map(|(a, b)| a + &t * (b - a))
                    .collect();
                if !verts.contains(&crossing) {
                    verts.push(crossing);
                }
            }
        }
        let mut ineqs = self.ineqs.clone();
        ineqs.push(h.clone());
        let cell = Cell {
            dim: self.dim,
            ineqs,
            verts,
        }
        .pruned();
        CutResult::Split(cell)
    }

    /// Restrict to the hyperplane `normal . x = bound`. The result may be
    /// lower-dimensional; `None` means the intersection is empty.
    pub fn slice(&self, h: &Halfspace) -> Option<Cell> {
        let excess: Vec<Rat> = self.verts.iter().map(|v| h.excess(v)).collect();
        if excess.iter().all(|e| e.is_zero()) {
            return Some(self.clone());
        }
        let mut verts: Vec<Point> = Vec::new();
        for (v, e) in self.verts.iter().zip(&excess) {
            if e.is_zero() {
                verts.push(v.clone());
            }
        }
        let any_inside = excess.iter().any(|e| e.is_negative());
        let any_outside = excess.iter().any(|e| e.is_positive());
        if any_inside && any_outside {
            for (i, j) in self.edges() {
                let (ei, ej) = (&excess[i], &excess[j]);
                if (ei.is_negative() && ej.is_positive())
                    || (ei.is_positive() && ej.is_negative())
                {
                    let t = ei / (ei - ej);
                    let crossing: Point = self.verts[i]
                        .iter()
                        .zip(&self.verts[j])
                        .map(|(a, b)| a + &t * (b - a))
                        .collect();
                    if !verts.contains(&crossing) {
                        verts.push(crossing);
                    }
                }
            }
        }
        if verts.is_empty() {
            return None;
        }
        let mut ineqs = self.ineqs.clone();
        ineqs.push(h.clone());
        ineqs.push(h.flip());
        Some(Cell {
            dim: self.dim,
            ineqs,
            verts,
        })
    }

    /// Intersection of two full-dimensional cells, `None` when empty or
    /// lower-dimensional.
    pub fn intersect(a: &Cell, b: &Cell) -> Option<Cell> {
        let mut acc: Option<Cell> = None;
        for h in &b.ineqs {
            let current = acc.as_ref().unwrap_or(a);
            match current.cut(h) {
                CutResult::Whole => {}
                CutResult::Gone => return None,
                CutResult::Split(cell) => acc = Some(cell),
            }
        }
        Some(acc.unwrap_or_else(|| a.clone()))
    }

    /// Intersection of the closures, allowing lower-dimensional results;
    /// used by the audit pass to compare neighbors along shared faces.
    pub fn intersect_face(a: &Cell, b: &Cell) -> Option<Cell> {
        let mut acc = a.clone();
        for h in &b.ineqs {
            let excess: Vec<Rat> = acc.verts.iter().map(|v| h.excess(v)).collect();
            if excess.iter().all(|e| !e.is_positive()) {
                continue;
            }
            if excess.iter().all(|e| !e.is_negative()) {
                // only the face on the hyperplane survives
                acc = acc.slice(&Halfspace {
                    normal: h.normal.clone(),
                    bound: h.bound.clone(),
                })?;
                continue;
            }
            match acc.cut(h) {
                CutResult::Whole => {}
                CutResult::Gone => return None,
                CutResult::Split(cell) => acc = cell,
            }
        }
        if acc.verts.is_empty() {
            None
        } else {
            Some(acc)
        }
    }

    /// Affine dimension of the vertex set.
    pub fn affine_rank(&self) -> usize {
        if self.verts.len() <= 1 {
            return 0;
        }
        let base = &self.verts[0];
        let rows: Vec<Vec<Rat>> = self.verts[1..]
            .iter()
            .map(|v| v.iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        rank(rows)
    }

    /// Exact volume for ambient dimension <= 3 (full-dimensional cells).
    pub fn volume(&self) -> Rat {
        match self.dim {
            1 => {
                let min = self.verts.iter().map(|v| &v[0]).min().unwrap().clone();
                let max = self.verts.iter().map(|v| &v[0]).max().unwrap().clone();
                max - min
            }
            2 => polygon_area(&self.verts, None),
            3 => {
                let centroid = centroid(&self.verts);
                let masks = self.tight_masks();
                let mut vol = Rat::zero();
                for (k, h) in self.ineqs.iter().enumerate() {
                    let facet: Vec<Point> = self
                        .verts
                        .iter()
                        .zip(&masks)
                        .filter(|(_, m)| *m & (1 << k) != 0)
                        .map(|(v, _)| v.clone())
                        .collect();
                    if facet.len() < 3 {
                        continue;
                    }
                    vol += pyramid_volume(&facet, &h.normal, &centroid);
                }
                vol
            }
            other => panic!("exact volume unsupported in dimension {other}"),
        }
    }
}

fn centroid(verts: &[Point]) -> Point {
    let n = verts[0].len();
    let count = Rat::from_integer(verts.len().into());
    (0..n)
        .map(|i| verts.iter().map(|v| &v[i]).sum::<Rat>() / &count)
        .collect()
}

/// Area of a convex polygon given unordered vertices. `axes` selects two
/// coordinates to project onto (used for 3-d facets); `None` means the
/// points are 2-d already.
fn polygon_area(verts: &[Point], axes: Option<(usize, usize)>) -> Rat {
    let project = |p: &Point| -> (Rat, Rat) {
        match axes {
            None => (p[0].clone(), p[1].clone()),
            Some((a, b)) => (p[a].clone(), p[b].clone()),
        }
    };
    let pts: Vec<(Rat, Rat)> = verts.iter().map(project).collect();
    let ordered = order_convex(&pts);
    let mut twice = Rat::zero();
    for i in 0..ordered.len() {
        let (x1, y1) = &pts[ordered[i]];
        let (x2, y2) = &pts[ordered[(i + 1) % ordered.len()]];
        twice += x1 * y2 - x2 * y1;
    }
    twice.abs() / Rat::from_integer(2.into())
}

/// Order the vertices of a convex polygon counterclockwise (or clockwise)
/// around their centroid, with exact comparisons.
fn order_convex(pts: &[(Rat, Rat)]) -> Vec<usize> {
    let count = Rat::from_integer(pts.len().into());
    let cx = pts.iter().map(|(x, _)| x).sum::<Rat>() / &count;
    let cy = pts.iter().map(|(_, y)| y).sum::<Rat>() / &count;
    let half = |i: usize| -> u8 {
        let dx = &pts[i].0 - &cx;
        let dy = &pts[i].1 - &cy;
        if dy.is_positive() || (dy.is_zero() && dx.is_positive()) {
            0
        } else {
            1
        }
    };
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| {
        half(a).cmp(&half(b)).then_with(|| {
            let (ax, ay) = (&pts[a].0 - &cx, &pts[a].1 - &cy);
            let (bx, by) = (&pts[b].0 - &cx, &pts[b].1 - &cy);
            // cross < 0 means a is clockwise of b
            let cross = &ax * &by - &bx * &ay;
            if cross.is_positive() {
                std::cmp::Ordering::Less
            } else if cross.is_negative() {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Equal
            }
        })
    });
    idx
}

/// Volume of the pyramid from `apex` over a planar convex facet with the
/// given normal: triangulate the facet and sum tetrahedron determinants.
fn pyramid_volume(facet: &[Point], normal: &[Rat], apex: &Point) -> Rat {
    // project out the axis with the largest |normal| component
    let drop_axis = (0..3)
        .max_by(|&a, &b| normal[a].abs().cmp(&normal[b].abs()))
        .unwrap();
    let axes = match drop_axis {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let pts: Vec<(Rat, Rat)> = facet
        .iter()
        .map(|p| (p[axes.0].clone(), p[axes.1].clone()))
        .collect();
    let ordered = order_convex(&pts);
    let mut vol = Rat::zero();
    let base = &facet[ordered[0]];
    for w in 1..(ordered.len() - 1) {
        let (b, c) = (&facet[ordered[w]], &facet[ordered[w + 1]]);
        let m: Vec<Vec<Rat>> = vec![
            b.iter().zip(base).map(|(x, y)| x - y).collect(),
            c.iter().zip(base).map(|(x, y)| x - y).collect(),
            apex.iter().zip(base).map(|(x, y)| x - y).collect(),
        ];
        let det = &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
            - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0]);
        vol += det.abs();
    }
    vol / Rat::from_integer(6.into())
}

/// Lexicographic comparison of rational points.
pub fn lex_cmp(a: &Point, b: &Point) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn hs(normal: &[i64], bound: (i64, i64)) -> Halfspace {
        Halfspace::new(
            normal.iter().map(|&c| rat(c, 1)).collect(),
            rat(bound.0, bound.1),
        )
    }

    #[test]
    fn cube_has_expected_vertices() {
        let c = Cell::cube(2);
        assert_eq!(c.vertices().len(), 4);
        assert_eq!(c.ineqs().len(), 4);
        assert_eq!(c.volume(), rat(1, 1));
    }

    #[test]
    fn cut_square_in_half() {
        let c = Cell::cube(2);
        // x + y <= 1
        let h = hs(&[1, 1], (1, 1));
        let CutResult::Split(lower) = c.cut(&h) else {
            panic!("expected split");
        };
        assert_eq!(lower.vertices().len(), 3);
        assert_eq!(lower.volume(), rat(1, 2));
        let CutResult::Split(upper) = c.cut(&h.flip()) else {
            panic!("expected split");
        };
        assert_eq!(upper.volume(), rat(1, 2));
    }

    #[test]
    fn cut_whole_and_gone() {
        let c = Cell::cube(1);
        assert!(matches!(c.cut(&hs(&[1], (2, 1))), CutResult::Whole));
        assert!(matches!(c.cut(&hs(&[-1], (-2, 1))), CutResult::Gone));
        // tangent cut leaves only a face
        assert!(matches!(c.cut(&hs(&[-1], (-1, 1))), CutResult::Gone));
    }

    #[test]
    fn cube_cut_in_three_dims() {
        let c = Cell::cube(3);
        // corner cut x + y + z <= 1/2
        let CutResult::Split(corner) = c.cut(&hs(&[1, 1, 1], (1, 2))) else {
            panic!("expected split");
        };
        assert_eq!(corner.vertices().len(), 4); // simplex
        assert_eq!(corner.volume(), rat(1, 48)); // (1/2)^3 / 6
        let CutResult::Split(rest) = c.cut(&hs(&[1, 1, 1], (1, 2)).flip()) else {
            panic!("expected split");
        };
        assert_eq!(&corner.volume() + &rest.volume(), rat(1, 1));
    }

    #[test]
    fn slice_gives_lower_dimensional_face() {
        let c = Cell::cube(2);
        // diagonal x = y
        let slice = c.slice(&hs(&[1, -1], (0, 1))).unwrap();
        assert_eq!(slice.vertices().len(), 2);
        assert_eq!(slice.affine_rank(), 1);
        // plane through a single vertex
        let corner = c.slice(&hs(&[1, 1], (0, 1))).unwrap();
        assert_eq!(corner.vertices().len(), 1);
        // empty slice
        assert!(c.slice(&hs(&[1, 1], (5, 1))).is_none());
    }

    #[test]
    fn intersection_of_cells() {
        let c = Cell::cube(2);
        let CutResult::Split(left) = c.cut(&hs(&[1, 0], (1, 2))) else {
            panic!()
        };
        let CutResult::Split(bottom) = c.cut(&hs(&[0, 1], (1, 2))) else {
            panic!()
        };
        let both = Cell::intersect(&left, &bottom).unwrap();
        assert_eq!(both.volume(), rat(1, 4));
        let CutResult::Split(right) = c.cut(&hs(&[-1, 0], (-1, 2))) else {
            panic!()
        };
        // left and right only share a segment: not full-dimensional
        assert!(Cell::intersect(&left, &right).is_none());
        let face = Cell::intersect_face(&left, &right).unwrap();
        assert_eq!(face.affine_rank(), 1);
    }

    #[test]
    fn contains_checks_all_constraints() {
        let c = Cell::cube(2);
        let CutResult::Split(tri) = c.cut(&hs(&[1, 1], (1, 1))) else {
            panic!()
        };
        assert!(tri.contains(&vec![rat(1, 4), rat(1, 4)]));
        assert!(!tri.contains(&vec![rat(3, 4), rat(3, 4)]));
    }
}
