//! Topological rectangles: a domain with four counterclockwise boundary
//! marks, their arcs, and bridge pruning.

use crate::domain::{DiscreteDomain, DomainError};
use crate::geom::Pt;
use std::sync::Arc;

/// Indices of the four arcs (ab), (bc), (cd), (da).
pub const ARC_AB: usize = 0;
pub const ARC_BC: usize = 1;
pub const ARC_CD: usize = 2;
pub const ARC_DA: usize = 3;

#[derive(Clone, Debug)]
pub struct TopologicalRectangle {
    domain: Arc<DiscreteDomain>,
    /// Boundary visit ids of a, b, c, d.
    marks: [u32; 4],
}

impl TopologicalRectangle {
    /// Resolve four marked points to boundary visits and validate their
    /// counterclockwise order. Pinch vertices resolve to their first visit.
    pub fn new(
        domain: Arc<DiscreteDomain>,
        a: Pt,
        b: Pt,
        c: Pt,
        d: Pt,
    ) -> Result<TopologicalRectangle, DomainError> {
        let mut marks = [0u32; 4];
        for (slot, p) in [a, b, c, d].into_iter().enumerate() {
            let v = domain.vertex_at(p).ok_or(DomainError::MarkNotOnBoundary(p))?;
            let visits = domain.visits_of(v);
            if visits.is_empty() {
                return Err(DomainError::MarkNotOnBoundary(p));
            }
            marks[slot] = visits[0];
        }
        let n = domain.n_visits() as i64;
        let rel = |m: u32| ((m as i64 - marks[0] as i64).rem_euclid(n)) as u32;
        let (rb, rc, rd) = (rel(marks[1]), rel(marks[2]), rel(marks[3]));
        if !(rb <= rc && rc <= rd) {
            return Err(DomainError::OrderViolation);
        }
        Ok(TopologicalRectangle { domain, marks })
    }

    pub fn from_masked(domain: DiscreteDomain, marks: [Pt; 4]) -> Result<Self, DomainError> {
        Self::new(Arc::new(domain), marks[0], marks[1], marks[2], marks[3])
    }

    pub fn domain(&self) -> &DiscreteDomain {
        &self.domain
    }

    pub fn domain_arc(&self) -> Arc<DiscreteDomain> {
        self.domain.clone()
    }

    pub fn mark_visits(&self) -> [u32; 4] {
        self.marks
    }

    pub fn mark_points(&self) -> [Pt; 4] {
        let d = &self.domain;
        self.marks.map(|m| d.point(d.visit_vertex(m)))
    }

    /// Visits of arc `i` (0 = (ab), 1 = (bc), 2 = (cd), 3 = (da)),
    /// inclusive of both marks.
    pub fn arc_visits(&self, i: usize) -> Vec<u32> {
        self.domain.visit_arc(self.marks[i], self.marks[(i + 1) % 4])
    }

    /// Vertex ids of arc `i`, deduplicated, order preserved.
    pub fn arc_vertices(&self, i: usize) -> Vec<u32> {
        self.domain.arc_vertices(self.marks[i], self.marks[(i + 1) % 4])
    }

    /// External mark of corner `i` (0=a..3=d): the last external edge of the
    /// mark's visit when tracking the external cycle counterclockwise.
    pub fn ext_mark(&self, i: usize) -> u32 {
        self.domain.ext_mark_of_visit(self.marks[i])
    }

    /// External edges of the external arc from corner `i` to corner `i+1`,
    /// inclusive of both external marks.
    pub fn ext_arc(&self, i: usize) -> Vec<u32> {
        self.domain.ext_arc(self.ext_mark(i), self.ext_mark((i + 1) % 4))
    }

    /// Remove every bridge that does not separate (ab) from (cd), together
    /// with the arc-free component behind it. Returns the pruned rectangle
    /// and the number of remaining separating bridges.
    pub fn prune_bridges(&self) -> (TopologicalRectangle, usize) {
        let mut cur = self.clone();
        loop {
            let dom = cur.domain();
            let bridges = dom.bridges();
            if bridges.is_empty() {
                return (cur, 0);
            }
            let mut protected = vec![false; dom.len()];
            for arc in [ARC_AB, ARC_CD] {
                for v in cur.arc_vertices(arc) {
                    protected[v as usize] = true;
                }
            }
            let mut removed = None;
            for &e in &bridges {
                let (u, v) = dom.edge_endpoints(e);
                let side_u = component_without_edge(dom, u, e);
                let side_u_clear = side_u.iter().all(|&w| !protected[w as usize]);
                if side_u_clear {
                    removed = Some(side_u);
                    break;
                }
                let in_u: Vec<bool> = {
                    let mut f = vec![false; dom.len()];
                    for &w in &side_u {
                        f[w as usize] = true;
                    }
                    f
                };
                let side_v: Vec<u32> =
                    (0..dom.len() as u32).filter(|&w| !in_u[w as usize]).collect();
                debug_assert!(side_v.contains(&v));
                if side_v.iter().all(|&w| !protected[w as usize]) {
                    removed = Some(side_v);
                    break;
                }
            }
            match removed {
                None => {
                    let count = bridges
                        .iter()
                        .filter(|&&e| cur.bridge_separates(e))
                        .count();
                    return (cur, count);
                }
                Some(side) => {
                    let mut drop = vec![false; dom.len()];
                    for &w in &side {
                        drop[w as usize] = true;
                    }
                    let keep: Vec<Pt> = (0..dom.len() as u32)
                        .filter(|&w| !drop[w as usize])
                        .map(|w| dom.point(w))
                        .collect();
                    let nd = DiscreteDomain::from_cells(keep)
                        .expect("pruned domain stays valid");
                    let [a, b, c, d] = cur.mark_points();
                    cur = TopologicalRectangle::new(Arc::new(nd), a, b, c, d)
                        .expect("marks survive pruning");
                }
            }
        }
    }

    /// Whether removing bridge `e` leaves (ab) and (cd) in different
    /// components.
    fn bridge_separates(&self, e: u32) -> bool {
        let dom = self.domain();
        let (u, _) = dom.edge_endpoints(e);
        let side_u = component_without_edge(dom, u, e);
        let mut in_u = vec![false; dom.len()];
        for &w in &side_u {
            in_u[w as usize] = true;
        }
        let ab = self.arc_vertices(ARC_AB);
        let cd = self.arc_vertices(ARC_CD);
        let ab_in_u = ab.iter().any(|&w| in_u[w as usize]);
        let ab_in_v = ab.iter().any(|&w| !in_u[w as usize]);
        let cd_in_u = cd.iter().any(|&w| in_u[w as usize]);
        let cd_in_v = cd.iter().any(|&w| !in_u[w as usize]);
        // Every (ab)-(cd) path must use e: no side holds parts of both.
        !((ab_in_u && cd_in_u) || (ab_in_v && cd_in_v))
    }

    /// Rectangle with the roles of the arc pairs swapped:
    /// (b,c,d,a), i.e. crossing (bc) to (da).
    pub fn rotated(&self) -> TopologicalRectangle {
        TopologicalRectangle {
            domain: self.domain.clone(),
            marks: [self.marks[1], self.marks[2], self.marks[3], self.marks[0]],
        }
    }
}

fn component_without_edge(dom: &DiscreteDomain, start: u32, skip_edge: u32) -> Vec<u32> {
    let mut seen = vec![false; dom.len()];
    let mut stack = vec![start];
    seen[start as usize] = true;
    let mut out = vec![start];
    while let Some(v) = stack.pop() {
        for d in crate::geom::DIRS {
            if let Some(e) = dom.edge_id(v, d) {
                if e == skip_edge {
                    continue;
                }
                let w = dom.vertex_at(dom.point(v).step(d)).unwrap();
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    out.push(w);
                    stack.push(w);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::pt;

    fn block(w: i32, h: i32) -> DiscreteDomain {
        DiscreteDomain::from_cells((0..w).flat_map(|x| (0..h).map(move |y| pt(x, y)))).unwrap()
    }

    #[test]
    fn corner_marks_on_square() {
        let d = Arc::new(block(3, 3));
        let r =
            TopologicalRectangle::new(d, pt(0, 0), pt(2, 0), pt(2, 2), pt(0, 2)).unwrap();
        // (ab) is the bottom side, (cd) the top side; three vertices each.
        let ab: Vec<Pt> =
            r.arc_vertices(ARC_AB).iter().map(|&v| r.domain().point(v)).collect();
        assert_eq!(ab, vec![pt(0, 0), pt(1, 0), pt(2, 0)]);
        let cd: Vec<Pt> =
            r.arc_vertices(ARC_CD).iter().map(|&v| r.domain().point(v)).collect();
        assert_eq!(cd, vec![pt(2, 2), pt(1, 2), pt(0, 2)]);
        // Arc partition: the four arcs cover the boundary, marks shared.
        let total: usize = (0..4).map(|i| r.arc_visits(i).len()).sum();
        assert_eq!(total, r.domain().n_visits() + 4);
    }

    #[test]
    fn clockwise_marks_rejected() {
        let d = Arc::new(block(3, 3));
        let r = TopologicalRectangle::new(d, pt(0, 0), pt(0, 2), pt(2, 2), pt(2, 0));
        assert!(matches!(r, Err(DomainError::OrderViolation)));
    }

    #[test]
    fn mark_off_boundary_rejected() {
        let d = Arc::new(block(5, 5));
        let r = TopologicalRectangle::new(d, pt(2, 2), pt(4, 0), pt(4, 4), pt(0, 4));
        assert!(matches!(r, Err(DomainError::MarkNotOnBoundary(_))));
    }

    #[test]
    fn spur_is_pruned() {
        // 4x3 block with a one-wide spur hanging off the (bc) side.
        let mut cells: Vec<Pt> =
            (0..4).flat_map(|x| (0..3).map(move |y| pt(x, y))).collect();
        cells.push(pt(4, 1));
        cells.push(pt(5, 1));
        let d = DiscreteDomain::from_cells(cells).unwrap();
        let r = TopologicalRectangle::new(
            Arc::new(d),
            pt(0, 0),
            pt(3, 0),
            pt(3, 2),
            pt(0, 2),
        )
        .unwrap();
        let (pruned, nsep) = r.prune_bridges();
        assert_eq!(nsep, 0);
        assert_eq!(pruned.domain().len(), 12);
        assert!(!pruned.domain().has_bridges());
    }

    #[test]
    fn separating_bridge_counted() {
        // Two 2x2 blocks joined by a bridge; (ab) in one block, (cd) in the
        // other.
        let mut cells: Vec<Pt> =
            (0..2).flat_map(|x| (0..2).map(move |y| pt(x, y))).collect();
        cells.extend((3..5).flat_map(|x| (0..2).map(move |y| pt(x, y))));
        cells.push(pt(2, 0));
        let d = DiscreteDomain::from_cells(cells).unwrap();
        let r = TopologicalRectangle::new(
            Arc::new(d),
            pt(0, 1),
            pt(0, 0),
            pt(4, 0),
            pt(4, 1),
        )
        .unwrap();
        let (pruned, nsep) = r.prune_bridges();
        assert_eq!(nsep, 2);
        assert_eq!(pruned.domain().len(), 9);
    }

    #[test]
    fn bridge_free_rectangle_unchanged() {
        let d = Arc::new(block(4, 4));
        let r =
            TopologicalRectangle::new(d, pt(0, 0), pt(3, 0), pt(3, 3), pt(0, 3)).unwrap();
        let (pruned, nsep) = r.prune_bridges();
        assert_eq!(nsep, 0);
        assert_eq!(pruned.domain().len(), 16);
    }
}
