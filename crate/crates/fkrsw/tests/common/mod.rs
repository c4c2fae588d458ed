//! Shared fixtures for the integration suites.

use fkrsw::domain::DiscreteDomain;
use fkrsw::geom::{pt, Pt};
use fkrsw::rect::TopologicalRectangle;
use std::sync::Arc;

pub fn block(w: i32, h: i32) -> DiscreteDomain {
    DiscreteDomain::from_cells((0..w).flat_map(|x| (0..h).map(move |y| pt(x, y)))).unwrap()
}

pub fn block_rect(w: i32, h: i32) -> TopologicalRectangle {
    TopologicalRectangle::new(
        Arc::new(block(w, h)),
        pt(0, 0),
        pt(w - 1, 0),
        pt(w - 1, h - 1),
        pt(0, h - 1),
    )
    .unwrap()
}

/// Ten small marked fixtures, all with at most 22 edges.
pub fn small_fixtures() -> Vec<(&'static str, TopologicalRectangle)> {
    let mut out: Vec<(&'static str, TopologicalRectangle)> = vec![
        ("block2x2", block_rect(2, 2)),
        ("block3x2", block_rect(3, 2)),
        ("block3x3", block_rect(3, 3)),
        ("block4x2", block_rect(4, 2)),
        ("block5x2", block_rect(5, 2)),
        ("block2x6", block_rect(2, 6)),
        ("block4x3", block_rect(4, 3)),
    ];
    // Side-midpoint marks on the 3x3 block.
    let d = Arc::new(block(3, 3));
    out.push((
        "block3x3-mid",
        TopologicalRectangle::new(d, pt(1, 0), pt(2, 1), pt(1, 2), pt(0, 1)).unwrap(),
    ));
    // L-shape: 4x4 block without its top-right corner vertex (22 edges).
    let l = DiscreteDomain::from_cells(
        (0..4)
            .flat_map(|x| (0..4).map(move |y| pt(x, y)))
            .filter(|&p| p != pt(3, 3)),
    )
    .unwrap();
    out.push((
        "lshape",
        TopologicalRectangle::new(Arc::new(l), pt(0, 0), pt(3, 0), pt(3, 2), pt(0, 3)).unwrap(),
    ));
    // Slit: 5x3 block with a one-wide slit up from the bottom at x = 2.
    let s = DiscreteDomain::from_cells(
        (0..5)
            .flat_map(|x| (0..3).map(move |y| pt(x, y)))
            .filter(|&p| !(p.x == 2 && p.y < 2)),
    )
    .unwrap();
    out.push((
        "slit",
        TopologicalRectangle::new(Arc::new(s), pt(0, 2), pt(0, 0), pt(4, 0), pt(4, 2)).unwrap(),
    ));
    out
}

/// Bridge-free fixtures for the duality identity.
pub fn duality_fixtures() -> Vec<(&'static str, TopologicalRectangle)> {
    small_fixtures()
        .into_iter()
        .filter(|(_, r)| !r.domain().has_bridges())
        .collect()
}

/// Dyadic refinement: every vertex square becomes a 2x2 block of squares;
/// marks re-resolve to the nearest boundary vertex of the doubled point.
pub fn refine(rect: &TopologicalRectangle) -> TopologicalRectangle {
    let dom = rect.domain();
    let cells: Vec<Pt> = dom
        .vertices()
        .iter()
        .flat_map(|p| {
            [
                pt(2 * p.x, 2 * p.y),
                pt(2 * p.x + 1, 2 * p.y),
                pt(2 * p.x, 2 * p.y + 1),
                pt(2 * p.x + 1, 2 * p.y + 1),
            ]
        })
        .collect();
    let refined = Arc::new(DiscreteDomain::from_cells(cells).unwrap());
    let nearest = |target: Pt| -> Pt {
        let mut best = None;
        let mut best_d = i32::MAX;
        for vis in refined.boundary_visits() {
            let q = refined.point(vis.vertex);
            let d = (q.x - target.x).abs().max((q.y - target.y).abs());
            if d < best_d {
                best_d = d;
                best = Some(q);
            }
        }
        best.unwrap()
    };
    let [a, b, c, d] = rect.mark_points();
    // Nudge marks in counterclockwise-safe order; re-resolution keeps the
    // cyclic order because refinement preserves the boundary geometry.
    TopologicalRectangle::new(
        refined.clone(),
        nearest(pt(2 * a.x, 2 * a.y)),
        nearest(pt(2 * b.x, 2 * b.y)),
        nearest(pt(2 * c.x, 2 * c.y)),
        nearest(pt(2 * d.x, 2 * d.y)),
    )
    .expect("refined marks stay counterclockwise")
}
