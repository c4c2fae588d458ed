//! Dual domains on (Z²)*.
//!
//! Dual vertices are faces of Z², keyed by the lower-left corner of the
//! face. One dual edge corresponds to each primal edge. A dual vertex is
//! counted with multiplicity (split in two) when exactly two opposite dual
//! edges incident to it are present; for domains with induced edge sets
//! this never fires (two opposite sides of a face force all four corners,
//! hence all four sides), but the rule is implemented for generality and
//! exercised on synthetic edge sets in tests.

use crate::domain::{side_cells, DiscreteDomain, DomainError};
use crate::geom::{pt, Pt};
use crate::rect::TopologicalRectangle;
use std::collections::HashMap;

/// A dual vertex: a face plus a part index (0 except for split faces).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DualVert {
    pub cell: Pt,
    pub part: u8,
}

#[derive(Clone, Debug)]
pub struct DualDomain {
    verts: Vec<DualVert>,
    /// Dual edge endpoints, indexed by the primal edge id.
    edges: Vec<(u32, u32)>,
    /// Number of faces split by the two-opposite-edges rule.
    n_split: usize,
    index: HashMap<DualVert, u32>,
    /// Interior subgraph: faces of the primal domain. Connected iff the
    /// primal domain has no bridges; stored as a domain in face coordinates
    /// when connected.
    interior: Option<DiscreteDomain>,
    interior_components: usize,
    /// Right faces of the external cycle, one per external edge;
    /// `None` where the face carries no dual edge.
    boundary_chain: Vec<Option<u32>>,
}

/// Sides of a face in counterclockwise order: S, E, N, W as primal edges.
fn face_sides(cell: Pt) -> [(Pt, Pt); 4] {
    let (x, y) = (cell.x, cell.y);
    [
        (pt(x, y), pt(x + 1, y)),         // S
        (pt(x + 1, y), pt(x + 1, y + 1)), // E
        (pt(x, y + 1), pt(x + 1, y + 1)), // N
        (pt(x, y), pt(x, y + 1)),         // W
    ]
}

/// The face on the other side of side `k` of `cell` (S,E,N,W order).
fn face_neighbor(cell: Pt, k: usize) -> Pt {
    match k {
        0 => pt(cell.x, cell.y - 1),
        1 => pt(cell.x + 1, cell.y),
        2 => pt(cell.x, cell.y + 1),
        _ => pt(cell.x - 1, cell.y),
    }
}

/// Build the dual graph of an explicit primal edge list. Each edge is a
/// pair of adjacent lattice points. Exposed for tests; library callers go
/// through [`DualDomain::of`].
pub fn dual_of_edges(primal_edges: &[(Pt, Pt)]) -> (Vec<DualVert>, Vec<(u32, u32)>, usize) {
    // Which sides of each face are present.
    let mut present: HashMap<Pt, [bool; 4]> = HashMap::new();
    let mut edge_set: HashMap<(Pt, Pt), ()> = HashMap::new();
    for &(a, b) in primal_edges {
        let key = if a <= b { (a, b) } else { (b, a) };
        edge_set.insert(key, ());
    }
    for (&(a, b), _) in &edge_set {
        let (c1, c2) = crate::domain::flanking_cells(a, b);
        for c in [c1, c2] {
            let sides = face_sides(c);
            let entry = present.entry(c).or_insert([false; 4]);
            for (k, &(sa, sb)) in sides.iter().enumerate() {
                if (sa, sb) == (a.min(b), a.max(b)) || (sa, sb) == (a, b) || (sa, sb) == (b, a) {
                    entry[k] = true;
                }
            }
        }
    }

    // Allocate dual vertices, applying the split rule.
    let mut verts = Vec::new();
    let mut index: HashMap<DualVert, u32> = HashMap::new();
    let mut part_of_side: HashMap<(Pt, usize), u8> = HashMap::new();
    let mut n_split = 0usize;
    let mut cells: Vec<Pt> = present.keys().copied().collect();
    cells.sort();
    for c in cells {
        let s = present[&c];
        let split = (s == [true, false, true, false]) || (s == [false, true, false, true]);
        if split {
            n_split += 1;
        }
        let mut next_part = 0u8;
        for k in 0..4 {
            if !s[k] {
                continue;
            }
            let part = if split { next_part } else { 0 };
            if split {
                next_part += 1;
            }
            part_of_side.insert((c, k), part);
            let dv = DualVert { cell: c, part };
            index.entry(dv).or_insert_with(|| {
                verts.push(dv);
                (verts.len() - 1) as u32
            });
        }
    }

    // One dual edge per primal edge, joining the side-resolved parts.
    let mut edges = Vec::with_capacity(primal_edges.len());
    for &(a, b) in primal_edges {
        let (c1, c2) = crate::domain::flanking_cells(a, b);
        let mut ends = [0u32; 2];
        for (slot, c) in [c1, c2].into_iter().enumerate() {
            let k = face_sides(c)
                .iter()
                .position(|&(sa, sb)| (sa, sb) == (a.min(b), a.max(b)))
                .expect("edge is a side of its flanking face");
            let part = part_of_side[&(c, k)];
            ends[slot] = index[&DualVert { cell: c, part }];
        }
        edges.push((ends[0], ends[1]));
    }
    (verts, edges, n_split)
}

impl DualDomain {
    pub fn of(domain: &DiscreteDomain) -> DualDomain {
        let primal: Vec<(Pt, Pt)> = domain
            .edges()
            .iter()
            .map(|&(u, v)| (domain.point(u), domain.point(v)))
            .collect();
        let (verts, edges, n_split) = dual_of_edges(&primal);
        let index: HashMap<DualVert, u32> =
            verts.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();

        // Interior subgraph: faces of the domain.
        let cells = domain.interior_cells().to_vec();
        let (interior, interior_components) = if cells.is_empty() {
            (None, 0)
        } else {
            let comps = count_cell_components(&cells);
            let dom = if comps == 1 {
                Some(
                    DiscreteDomain::from_cells(cells.iter().copied())
                        .expect("interior dual of a valid domain is valid"),
                )
            } else {
                None
            };
            (dom, comps)
        };

        // Right faces along the external cycle.
        let boundary_chain = domain
            .ext_cycle()
            .iter()
            .map(|e| {
                let (_, right) = side_cells(domain.point(e.base), e.dir);
                // Any part of a split face on the outer chain belongs to the
                // side facing the walk; induced domains never split, so part
                // 0 is correct whenever the face exists.
                index.get(&DualVert { cell: right, part: 0 }).copied()
            })
            .collect();

        DualDomain {
            verts,
            edges,
            n_split,
            index,
            interior,
            interior_components,
            boundary_chain,
        }
    }

    pub fn n_verts(&self) -> usize {
        self.verts.len()
    }

    pub fn verts(&self) -> &[DualVert] {
        &self.verts
    }

    /// Dual edge endpoints for primal edge `e`.
    pub fn dual_edge(&self, e: u32) -> (u32, u32) {
        self.edges[e as usize]
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_split(&self) -> usize {
        self.n_split
    }

    pub fn vert_id(&self, cell: Pt) -> Option<u32> {
        self.index.get(&DualVert { cell, part: 0 }).copied()
    }

    /// Faces of the primal domain as a discrete domain in face coordinates,
    /// available when the interior subgraph is connected (primal bridge-free).
    pub fn interior(&self) -> Option<&DiscreteDomain> {
        self.interior.as_ref()
    }

    pub fn interior_components(&self) -> usize {
        self.interior_components
    }

    /// Right face of external edge `i`, when it carries a dual edge.
    pub fn chain_at(&self, i: usize) -> Option<u32> {
        self.boundary_chain[i]
    }

    /// Dual vertices along the counterclockwise external range
    /// `raw_from..=raw_to` (indices into the external cycle), skipping
    /// faces without dual edges.
    pub fn chain_range(&self, raw_from: u32, raw_to: u32) -> Vec<u32> {
        let l = self.boundary_chain.len() as u32;
        let mut out = Vec::new();
        let mut i = raw_from;
        loop {
            if let Some(v) = self.boundary_chain[i as usize] {
                if out.last() != Some(&v) {
                    out.push(v);
                }
            }
            if i == raw_to {
                break;
            }
            i = (i + 1) % l;
        }
        out
    }
}

fn count_cell_components(cells: &[Pt]) -> usize {
    let set: std::collections::HashSet<Pt> = cells.iter().copied().collect();
    let mut seen: std::collections::HashSet<Pt> = std::collections::HashSet::new();
    let mut comps = 0;
    for &c in cells {
        if seen.contains(&c) {
            continue;
        }
        comps += 1;
        let mut stack = vec![c];
        seen.insert(c);
        while let Some(q) = stack.pop() {
            for k in 0..4 {
                let nb = face_neighbor(q, k);
                if set.contains(&nb) && !seen.contains(&nb) {
                    seen.insert(nb);
                    stack.push(nb);
                }
            }
        }
    }
    comps
}

/// Dual marks of a topological rectangle, for the duality identity and the
/// dual-domain partition functions.
pub struct DualMarks {
    /// Left faces of the external marks a..d (the paper's a*..d*), as dual
    /// vertex ids when present.
    pub star: [Option<u32>; 4],
    /// Right faces of the external marks (a*_r .. d*_r).
    pub star_r: [Option<u32>; 4],
    /// Raw external-cycle positions of the left faces (chain position of x*).
    star_raw: [u32; 4],
    /// Raw positions of the right faces.
    star_r_raw: [u32; 4],
}

impl DualMarks {
    pub fn of(rect: &TopologicalRectangle, dual: &DualDomain) -> DualMarks {
        let dom = rect.domain();
        let l = dom.n_ext() as u32;
        let mut star = [None; 4];
        let mut star_r = [None; 4];
        let mut star_raw = [0u32; 4];
        let mut star_r_raw = [0u32; 4];
        for i in 0..4 {
            let e = rect.ext_mark(i);
            // The chain stores right faces; the left face of edge e is the
            // right face of the next external edge.
            star_raw[i] = (e + 1) % l;
            star_r_raw[i] = e;
            star[i] = dual.chain_at(star_raw[i] as usize);
            star_r[i] = dual.chain_at(star_r_raw[i] as usize);
        }
        DualMarks { star, star_r, star_raw, star_r_raw }
    }

    /// Dual boundary arc (b* c*_r): dual vertices from the left face of b to
    /// the right face of c, counterclockwise. Used by the duality identity.
    pub fn arc_bstar_cstar_r(&self, dual: &DualDomain) -> Vec<u32> {
        dual.chain_range(self.star_raw[1], self.star_r_raw[2])
    }

    /// Dual boundary arc (d* a*_r).
    pub fn arc_dstar_astar_r(&self, dual: &DualDomain) -> Vec<u32> {
        dual.chain_range(self.star_raw[3], self.star_r_raw[0])
    }
}

/// External marks of the rectangle inside the interior dual domain: for each
/// corner x, the external edge of Ω*_int corresponding to the dual of the
/// primal edge x x', where x x' is the counterclockwise neighbour edge of x
/// bounding the face x*. Requires a bridge-free domain.
pub fn interior_dual_ext_marks(
    rect: &TopologicalRectangle,
    dual: &DualDomain,
) -> Result<[u32; 4], DomainError> {
    let dom = rect.domain();
    let int = dual.interior().ok_or(DomainError::HasBridges)?;
    let mut out = [0u32; 4];
    for i in 0..4 {
        let e = dom.ext_edge(rect.ext_mark(i));
        let base = dom.point(e.base);
        let (left, _) = side_cells(base, e.dir);
        // Face across the primal edge x x' from x*: interior when bridge-free.
        let xp = base.step(e.dir.rot_ccw(1));
        debug_assert!(dom.contains(xp), "x' must lie in a bridge-free domain");
        let (c1, c2) = crate::domain::flanking_cells(base, xp);
        let inner = if c1 == left { c2 } else { c1 };
        let inner_id = int
            .vertex_at(inner)
            .expect("face across a non-bridge edge is interior");
        // Locate the external edge of the interior domain pointing from the
        // inner face toward x*.
        let dir = crate::geom::DIRS
            .into_iter()
            .find(|d| inner.step(*d) == left)
            .expect("x* is adjacent to the inner face");
        let ext = int
            .ext_cycle()
            .iter()
            .position(|xe| xe.base == inner_id && xe.dir == dir)
            .expect("dual mark edge is external to the interior domain");
        out[i] = ext as u32;
    }
    Ok(out)
}
