//! Lattice points and axis directions on Z².
//!
//! The y axis grows upward. Counterclockwise rotation order of the four
//! directions is E → N → W → S.

use serde::{Deserialize, Serialize};

/// A point of the square lattice Z².
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Pt {
    pub x: i32,
    pub y: i32,
}

pub const fn pt(x: i32, y: i32) -> Pt {
    Pt { x, y }
}

impl Pt {
    pub fn step(self, d: Dir) -> Pt {
        let (dx, dy) = d.delta();
        pt(self.x + dx, self.y + dy)
    }

    /// Chebyshev norm, the natural radius for the boxes Λ_n = [-n,n]².
    pub fn norm_inf(self) -> i32 {
        self.x.abs().max(self.y.abs())
    }
}

impl std::fmt::Display for Pt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Axis direction; discriminants fixed so rotation is arithmetic mod 4.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    E = 0,
    N = 1,
    W = 2,
    S = 3,
}

pub const DIRS: [Dir; 4] = [Dir::E, Dir::N, Dir::W, Dir::S];

impl Dir {
    pub fn delta(self) -> (i32, i32) {
        match self {
            Dir::E => (1, 0),
            Dir::N => (0, 1),
            Dir::W => (-1, 0),
            Dir::S => (0, -1),
        }
    }

    pub fn from_index(i: usize) -> Dir {
        DIRS[i & 3]
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Rotate counterclockwise by `k` quarter turns.
    pub fn rot_ccw(self, k: usize) -> Dir {
        Dir::from_index(self.index() + k)
    }

    /// Rotate clockwise by `k` quarter turns.
    pub fn rot_cw(self, k: usize) -> Dir {
        Dir::from_index(self.index() + 4 - (k & 3))
    }

    pub fn reverse(self) -> Dir {
        self.rot_ccw(2)
    }
}

/// Axis-aligned bounding box, inclusive on both ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BBox {
    pub x0: i32,
    pub y0: i32,
    pub x1: i32,
    pub y1: i32,
}

impl BBox {
    pub fn of_points<I: IntoIterator<Item = Pt>>(points: I) -> Option<BBox> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut b = BBox { x0: first.x, y0: first.y, x1: first.x, y1: first.y };
        for p in it {
            b.x0 = b.x0.min(p.x);
            b.y0 = b.y0.min(p.y);
            b.x1 = b.x1.max(p.x);
            b.y1 = b.y1.max(p.y);
        }
        Some(b)
    }

    pub fn width(&self) -> i32 {
        self.x1 - self.x0 + 1
    }

    pub fn height(&self) -> i32 {
        self.y1 - self.y0 + 1
    }

    pub fn contains(&self, p: Pt) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }
}

/// Dense map from a rectangle of lattice points to ids, used as a fast
/// point index by the domain and annulus code.
#[derive(Clone, Debug)]
pub struct GridIndex {
    bbox: BBox,
    cells: Vec<i32>,
}

impl GridIndex {
    pub fn new(bbox: BBox) -> GridIndex {
        let n = (bbox.width() as usize) * (bbox.height() as usize);
        GridIndex { bbox, cells: vec![-1; n] }
    }

    fn offset(&self, p: Pt) -> Option<usize> {
        if !self.bbox.contains(p) {
            return None;
        }
        let w = self.bbox.width() as usize;
        Some((p.y - self.bbox.y0) as usize * w + (p.x - self.bbox.x0) as usize)
    }

    pub fn insert(&mut self, p: Pt, id: u32) {
        let off = self.offset(p).expect("point outside grid bbox");
        self.cells[off] = id as i32;
    }

    pub fn get(&self, p: Pt) -> Option<u32> {
        let off = self.offset(p)?;
        let v = self.cells[off];
        (v >= 0).then_some(v as u32)
    }

    pub fn contains(&self, p: Pt) -> bool {
        self.get(p).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_is_ccw() {
        assert_eq!(Dir::E.rot_ccw(1), Dir::N);
        assert_eq!(Dir::N.rot_ccw(1), Dir::W);
        assert_eq!(Dir::S.rot_ccw(1), Dir::E);
        assert_eq!(Dir::E.rot_cw(1), Dir::S);
        assert_eq!(Dir::W.reverse(), Dir::E);
    }

    #[test]
    fn grid_index_roundtrip() {
        let b = BBox { x0: -2, y0: -1, x1: 3, y1: 4 };
        let mut g = GridIndex::new(b);
        g.insert(pt(0, 0), 7);
        g.insert(pt(-2, 4), 9);
        assert_eq!(g.get(pt(0, 0)), Some(7));
        assert_eq!(g.get(pt(-2, 4)), Some(9));
        assert_eq!(g.get(pt(1, 1)), None);
        assert_eq!(g.get(pt(10, 10)), None);
    }
}
