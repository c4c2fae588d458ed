//! Annulus and half-annulus lattice geometry for arm events.
//!
//! Both lattices are represented in doubled coordinates: the primal vertex
//! (x,y) sits at (2x,2y), the dual vertex (x+1/2,y+1/2) at (2x+1,2y+1).
//! Rings are Chebyshev norms of doubled points.
//!
//! Fixed conventions (every algorithm in this module shares them):
//! * primal arms live on rings 2(n+1)..2N and terminate on the extreme
//!   rings; for n = 0 the inner terminal is the origin alone;
//! * dual arms live on rings 2n+1..2N+1; angular dual steps along the two
//!   extreme rings are excluded, so a dual arm enters its terminal rings
//!   radially, crossing a primal ring edge. Every admissible dual step
//!   crosses exactly one primal edge with both endpoints in the primal
//!   annulus, which makes primal and dual arms mutually non-crossing and
//!   gives every arm an unambiguous clockwise/counterclockwise position;
//! * for n = 0 dual arms anchor at the single face (1/2,1/2) and may share
//!   it, mirroring the shared primal origin.

use crate::domain::DiscreteDomain;
use crate::geom::{pt, Pt};

/// Arm color: type 1 = open primal path, type 0 = dual-open dual path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArmKind {
    Primal,
    Dual,
}

impl ArmKind {
    pub fn of_letter(bit: u8) -> ArmKind {
        if bit == 1 {
            ArmKind::Primal
        } else {
            ArmKind::Dual
        }
    }
}

/// Read access to a bond configuration by primal edge endpoints. Edges
/// outside the stored region count as closed.
pub trait Omega {
    fn open(&self, a: Pt, b: Pt) -> bool;
}

/// Configuration stored on a simulation-box domain.
pub struct BoxOmega<'a> {
    pub domain: &'a DiscreteDomain,
    pub open: &'a [bool],
}

impl Omega for BoxOmega<'_> {
    fn open(&self, a: Pt, b: Pt) -> bool {
        match self.domain.edge_between(a, b) {
            Some(e) => self.open[e as usize],
            None => false,
        }
    }
}

/// Dense standalone configuration on a box, for randomized tests.
#[derive(Clone, Debug)]
pub struct GridOmega {
    pub x0: i32,
    pub y0: i32,
    pub w: usize,
    pub h: usize,
    /// Horizontal edges: (x,y)-(x+1,y).
    pub horiz: Vec<bool>,
    /// Vertical edges: (x,y)-(x,y+1).
    pub vert: Vec<bool>,
}

impl GridOmega {
    pub fn closed(x0: i32, y0: i32, w: usize, h: usize) -> GridOmega {
        GridOmega { x0, y0, w, h, horiz: vec![false; w * h], vert: vec![false; w * h] }
    }

    fn slot(&self, x: i32, y: i32) -> Option<usize> {
        let (dx, dy) = ((x - self.x0) as i64, (y - self.y0) as i64);
        if dx < 0 || dy < 0 || dx >= self.w as i64 || dy >= self.h as i64 {
            return None;
        }
        Some(dy as usize * self.w + dx as usize)
    }

    pub fn set(&mut self, a: Pt, b: Pt, open: bool) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if hi.x == lo.x + 1 && hi.y == lo.y {
            if let Some(s) = self.slot(lo.x, lo.y) {
                self.horiz[s] = open;
            }
        } else if hi.y == lo.y + 1 && hi.x == lo.x {
            if let Some(s) = self.slot(lo.x, lo.y) {
                self.vert[s] = open;
            }
        } else {
            panic!("not a lattice edge: {lo} {hi}");
        }
    }
}

impl Omega for GridOmega {
    fn open(&self, a: Pt, b: Pt) -> bool {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let horiz = hi.x == lo.x + 1 && hi.y == lo.y;
        match self.slot(lo.x, lo.y) {
            Some(s) if horiz => self.horiz[s],
            Some(s) if hi.y == lo.y + 1 && hi.x == lo.x => self.vert[s],
            _ => false,
        }
    }
}

/// Geometry of an arm event.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    Full,
    Half,
}

/// Vertex tables of the two lattices in an annulus.
pub struct ArmLattice {
    pub n: i32,
    pub big_n: i32,
    pub half: bool,
    /// Primal vertices, doubled coordinates.
    pub pv: Vec<Pt>,
    pidx: crate::geom::GridIndex,
    /// Dual vertices, doubled coordinates.
    pub dv: Vec<Pt>,
    didx: crate::geom::GridIndex,
    pub p_inner: Vec<u32>,
    pub p_outer: Vec<u32>,
    pub d_inner: Vec<u32>,
    pub d_outer: Vec<u32>,
}

impl ArmLattice {
    pub fn new(n: i32, big_n: i32, geometry: Geometry) -> ArmLattice {
        assert!(n < big_n && n >= 0, "need 0 <= n < N");
        let half = geometry == Geometry::Half;
        let r_in_p = if n == 0 { 0 } else { 2 * (n + 1) };
        let r_out_p = 2 * big_n;
        let mut pv = Vec::new();
        let mut dv = Vec::new();
        let bb = crate::geom::BBox {
            x0: -2 * big_n - 1,
            y0: -2 * big_n - 1,
            x1: 2 * big_n + 1,
            y1: 2 * big_n + 1,
        };
        let mut pidx = crate::geom::GridIndex::new(bb);
        let mut didx = crate::geom::GridIndex::new(bb);
        for y in -big_n..=big_n {
            for x in -big_n..=big_n {
                let d = pt(2 * x, 2 * y);
                let r = d.norm_inf();
                if r >= r_in_p && r <= r_out_p && (!half || y >= 0) {
                    pidx.insert(d, pv.len() as u32);
                    pv.push(d);
                }
            }
        }
        let (r_in_d, r_out_d) = (2 * n + 1, 2 * big_n + 1);
        for y in (-big_n - 1)..=big_n {
            for x in (-big_n - 1)..=big_n {
                let d = pt(2 * x + 1, 2 * y + 1);
                let r = d.norm_inf();
                if r >= r_in_d && r <= r_out_d && (!half || d.y >= 1) {
                    didx.insert(d, dv.len() as u32);
                    dv.push(d);
                }
            }
        }
        let p_inner: Vec<u32> = if n == 0 {
            vec![pidx.get(pt(0, 0)).expect("origin in lattice")]
        } else {
            pv.iter()
                .enumerate()
                .filter(|(_, p)| p.norm_inf() == r_in_p)
                .map(|(i, _)| i as u32)
                .collect()
        };
        let p_outer: Vec<u32> = pv
            .iter()
            .enumerate()
            .filter(|(_, p)| p.norm_inf() == r_out_p)
            .map(|(i, _)| i as u32)
            .collect();
        let d_inner: Vec<u32> = if n == 0 {
            didx.get(pt(1, 1)).into_iter().collect()
        } else {
            dv.iter()
                .enumerate()
                .filter(|(_, p)| p.norm_inf() == r_in_d)
                .map(|(i, _)| i as u32)
                .collect()
        };
        let d_outer: Vec<u32> = dv
            .iter()
            .enumerate()
            .filter(|(_, p)| p.norm_inf() == r_out_d)
            .map(|(i, _)| i as u32)
            .collect();
        ArmLattice { n, big_n, half, pv, pidx, dv, didx, p_inner, p_outer, d_inner, d_outer }
    }

    pub fn verts(&self, kind: ArmKind) -> &[Pt] {
        match kind {
            ArmKind::Primal => &self.pv,
            ArmKind::Dual => &self.dv,
        }
    }

    pub fn index(&self, kind: ArmKind, doubled: Pt) -> Option<u32> {
        match kind {
            ArmKind::Primal => self.pidx.get(doubled),
            ArmKind::Dual => self.didx.get(doubled),
        }
    }

    pub fn inner(&self, kind: ArmKind) -> &[u32] {
        match kind {
            ArmKind::Primal => &self.p_inner,
            ArmKind::Dual => &self.d_inner,
        }
    }

    pub fn outer(&self, kind: ArmKind) -> &[u32] {
        match kind {
            ArmKind::Primal => &self.p_outer,
            ArmKind::Dual => &self.d_outer,
        }
    }

    /// Anchors that several arms may share (the point case n = 0).
    pub fn shared_anchors(&self, kind: ArmKind) -> Vec<u32> {
        if self.n == 0 {
            self.inner(kind).to_vec()
        } else {
            Vec::new()
        }
    }

    /// Whether a step between doubled points of the given lattice is
    /// admissible (both endpoints present, terminal-ring angular steps
    /// excluded on the dual lattice).
    pub fn step_allowed(&self, kind: ArmKind, a: Pt, b: Pt) -> bool {
        if self.index(kind, a).is_none() || self.index(kind, b).is_none() {
            return false;
        }
        if kind == ArmKind::Dual {
            let (ra, rb) = (a.norm_inf(), b.norm_inf());
            let (r_in, r_out) = (2 * self.n + 1, 2 * self.big_n + 1);
            if ra == rb && (ra == r_in || ra == r_out) {
                return false;
            }
            // Half geometry: the bottom dual row hugs the axis the same way
            // the terminal rings do; angular steps along it would cross only
            // sub-axis stubs and are excluded.
            if self.half && a.y == 1 && b.y == 1 {
                return false;
            }
        }
        true
    }

    /// Whether the step is open under the configuration: primal steps use
    /// the primal edge itself, dual steps the crossed primal edge, closed.
    pub fn step_open(&self, kind: ArmKind, omega: &impl Omega, a: Pt, b: Pt) -> bool {
        match kind {
            ArmKind::Primal => omega.open(pt(a.x / 2, a.y / 2), pt(b.x / 2, b.y / 2)),
            ArmKind::Dual => {
                let (pa, pb) = crossed_primal_edge(a, b);
                !omega.open(pa, pb)
            }
        }
    }

    /// Neighbours of a doubled point within the lattice.
    pub fn neighbors(&self, kind: ArmKind, a: Pt) -> impl Iterator<Item = Pt> + '_ {
        crate::geom::DIRS.into_iter().filter_map(move |d| {
            let (dx, dy) = d.delta();
            let b = pt(a.x + 2 * dx, a.y + 2 * dy);
            self.step_allowed(kind, a, b).then_some(b)
        })
    }
}

/// The primal edge crossed by a dual step between doubled dual points.
pub fn crossed_primal_edge(a: Pt, b: Pt) -> (Pt, Pt) {
    let m = pt((a.x + b.x) / 2, (a.y + b.y) / 2);
    if a.y == b.y {
        // Horizontal dual step crosses a vertical primal edge.
        (pt(m.x / 2, (m.y - 1) / 2), pt(m.x / 2, (m.y + 1) / 2))
    } else {
        (pt((m.x - 1) / 2, m.y / 2), pt((m.x + 1) / 2, m.y / 2))
    }
}

/// Square-perimeter angle of a doubled point on its own ring, normalized to
/// [0,8) with 0 on the positive x axis, growing counterclockwise.
pub fn theta(p: Pt) -> f64 {
    let r = p.norm_inf();
    if r == 0 {
        return 0.0;
    }
    let (x, y, r) = (p.x as f64, p.y as f64, r as f64);
    let t = if p.x.abs() >= p.y.abs() && p.x > 0 && p.y > -p.x {
        // East side, y from -r (exclusive) to r.
        y
    } else if p.y.abs() >= p.x.abs() && p.y > 0 {
        // North side, x from r to -r.
        2.0 * r - x
    } else if p.x.abs() >= p.y.abs() && p.x < 0 {
        // West side, y from r down to -r.
        4.0 * r - y
    } else {
        // South side, x from -r to r.
        6.0 * r + x
    };
    (t / r).rem_euclid(8.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_orders_the_ring() {
        let r = 6;
        let mut pts = Vec::new();
        for x in -r..=r {
            for y in -r..=r {
                let p = pt(x, y);
                if p.norm_inf() == r {
                    pts.push(p);
                }
            }
        }
        pts.sort_by(|a, b| theta(*a).partial_cmp(&theta(*b)).unwrap());
        // Distinct angles for distinct ring points, starting at (r,0).
        assert_eq!(pts[0], pt(r, 0));
        for w in pts.windows(2) {
            assert!(theta(w[0]) < theta(w[1]));
        }
        // Counterclockwise: the next point after (r,0) is (r,1).
        assert_eq!(pts[1], pt(r, 1));
    }

    #[test]
    fn lattice_sizes() {
        let lat = ArmLattice::new(2, 6, Geometry::Full);
        // Primal ring range 6..=12 in doubled coordinates.
        assert!(lat.pv.iter().all(|p| p.norm_inf() >= 6 && p.norm_inf() <= 12));
        assert!(lat.dv.iter().all(|p| p.norm_inf() >= 5 && p.norm_inf() <= 13));
        assert_eq!(lat.p_inner.len(), 8 * 3);
        assert_eq!(lat.p_outer.len(), 8 * 6);
    }

    #[test]
    fn half_lattice_excludes_lower_half() {
        let lat = ArmLattice::new(1, 4, Geometry::Half);
        assert!(lat.pv.iter().all(|p| p.y >= 0));
        assert!(lat.dv.iter().all(|p| p.y >= 1));
    }

    #[test]
    fn dual_terminal_angular_steps_excluded() {
        let lat = ArmLattice::new(1, 4, Geometry::Full);
        // Two adjacent dual vertices on the inner dual ring (radius 3).
        assert!(!lat.step_allowed(ArmKind::Dual, pt(3, 1), pt(3, 3)));
        assert!(lat.step_allowed(ArmKind::Dual, pt(3, 1), pt(5, 1)));
        // Outer dual ring radius 9.
        assert!(!lat.step_allowed(ArmKind::Dual, pt(9, 1), pt(9, 3)));
    }

    #[test]
    fn every_dual_step_crosses_an_annulus_primal_edge() {
        let lat = ArmLattice::new(1, 4, Geometry::Full);
        for (i, &a) in lat.dv.iter().enumerate() {
            let _ = i;
            for b in lat.neighbors(ArmKind::Dual, a).collect::<Vec<_>>() {
                let (pa, pb) = crossed_primal_edge(a, b);
                let (da, db) = (pt(2 * pa.x, 2 * pa.y), pt(2 * pb.x, 2 * pb.y));
                assert!(
                    lat.index(ArmKind::Primal, da).is_some()
                        && lat.index(ArmKind::Primal, db).is_some(),
                    "dual step {a}-{b} crosses {pa}-{pb} outside the annulus"
                );
            }
        }
    }

    #[test]
    fn point_case_anchors() {
        let lat = ArmLattice::new(0, 4, Geometry::Full);
        assert_eq!(lat.p_inner.len(), 1);
        assert_eq!(lat.pv[lat.p_inner[0] as usize], pt(0, 0));
        assert_eq!(lat.d_inner.len(), 1);
        assert_eq!(lat.dv[lat.d_inner[0] as usize], pt(1, 1));
    }
}
