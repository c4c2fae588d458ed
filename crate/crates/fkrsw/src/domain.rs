//! Discrete domains: simply connected subgraphs of Z² with their boundary
//! structure.
//!
//! A domain is built from a vertex set; the edge set is induced (every
//! Z²-edge with both endpoints in the set). Validation enforces
//! connectivity and simple connectivity: every edge enclosed by a cycle of
//! the edge set must belong to the edge set, which for induced edge sets
//! means no enclosed face of the plane may miss a corner.
//!
//! The boundary is represented two ways:
//! * `boundary_cycle`: counterclockwise cycle of boundary *visits*. A
//!   vertex appears once per visit, so a pinch vertex shows up several
//!   times.
//! * `ext_cycle`: counterclockwise cycle of oriented external edges
//!   (x → y with x in the domain, y outside). External endpoints are
//!   abstract: geometrically coincident outside points stay distinct.

use crate::geom::{pt, BBox, Dir, GridIndex, Pt, DIRS};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DomainError {
    #[error("empty domain")]
    EmptyDomain,
    #[error("domain is not connected (vertex {0} unreachable)")]
    NotConnected(Pt),
    #[error("domain is not simply connected (enclosed edge {0}-{1} is absent)")]
    NotSimplyConnected(Pt, Pt),
    #[error("mark {0} is not on the domain boundary")]
    MarkNotOnBoundary(Pt),
    #[error("marks are not in counterclockwise order")]
    OrderViolation,
    #[error("mask parse error at line {line}: {msg}")]
    MaskParse { line: usize, msg: String },
    #[error("domain contains bridges")]
    HasBridges,
}

/// Oriented external edge x → y, stored as the base vertex and direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtEdge {
    pub base: u32,
    pub dir: Dir,
}

/// One visit of the boundary cycle: a vertex together with the external
/// edges swept at this visit, in counterclockwise order.
#[derive(Clone, Debug)]
pub struct Visit {
    pub vertex: u32,
    pub exts: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct DiscreteDomain {
    verts: Vec<Pt>,
    grid: GridIndex,
    edges: Vec<(u32, u32)>,
    adj: Vec<[Option<u32>; 4]>,
    degree: Vec<u8>,
    interior_cells: Vec<Pt>,
    cell_grid: GridIndex,
    visits: Vec<Visit>,
    ext_cycle: Vec<ExtEdge>,
    ext_visit: Vec<u32>,
    visits_of_vertex: HashMap<u32, Vec<u32>>,
    bbox: BBox,
}

impl DiscreteDomain {
    /// Build a domain from a set of lattice points.
    pub fn from_cells<I: IntoIterator<Item = Pt>>(cells: I) -> Result<DiscreteDomain, DomainError> {
        let mut verts: Vec<Pt> = cells.into_iter().collect();
        verts.sort();
        verts.dedup();
        if verts.is_empty() {
            return Err(DomainError::EmptyDomain);
        }
        let bbox = BBox::of_points(verts.iter().copied()).unwrap();
        let mut grid = GridIndex::new(bbox);
        for (i, &p) in verts.iter().enumerate() {
            grid.insert(p, i as u32);
        }

        // Induced edges, canonical order: E then N from each vertex.
        let mut edges = Vec::new();
        let mut adj = vec![[None; 4]; verts.len()];
        for (i, &p) in verts.iter().enumerate() {
            for d in [Dir::E, Dir::N] {
                if let Some(j) = grid.get(p.step(d)) {
                    let eid = edges.len() as u32;
                    edges.push((i as u32, j));
                    adj[i][d.index()] = Some(eid);
                    adj[j as usize][d.reverse().index()] = Some(eid);
                }
            }
        }
        let degree: Vec<u8> =
            adj.iter().map(|a| a.iter().filter(|e| e.is_some()).count() as u8).collect();

        // Connectivity.
        {
            let mut seen = vec![false; verts.len()];
            let mut stack = vec![0u32];
            seen[0] = true;
            let mut found = 1usize;
            while let Some(v) = stack.pop() {
                let p = verts[v as usize];
                for d in DIRS {
                    if adj[v as usize][d.index()].is_some() {
                        let w = grid.get(p.step(d)).unwrap();
                        if !seen[w as usize] {
                            seen[w as usize] = true;
                            found += 1;
                            stack.push(w);
                        }
                    }
                }
            }
            if found != verts.len() {
                let missing = (0..verts.len()).find(|&i| !seen[i]).unwrap();
                return Err(DomainError::NotConnected(verts[missing]));
            }
        }

        // Simple connectivity via a flood fill over plane faces. A face is
        // keyed by its lower-left corner. Two adjacent faces communicate if
        // the primal edge between them is absent; faces not reachable from
        // the outside are enclosed and must be faces of the domain.
        let frange = BBox { x0: bbox.x0 - 1, y0: bbox.y0 - 1, x1: bbox.x1, y1: bbox.y1 };
        let fw = frange.width() as usize;
        let fh = frange.height() as usize;
        let fidx = |c: Pt| -> usize {
            ((c.y - frange.y0) as usize) * fw + ((c.x - frange.x0) as usize)
        };
        let has_edge = |a: Pt, b: Pt| -> bool { grid.contains(a) && grid.contains(b) };
        let mut reached = vec![false; fw * fh];
        let mut stack: Vec<Pt> = Vec::new();
        for cy in frange.y0..=frange.y1 {
            for cx in frange.x0..=frange.x1 {
                if cx == frange.x0 || cx == frange.x1 || cy == frange.y0 || cy == frange.y1 {
                    let c = pt(cx, cy);
                    if !reached[fidx(c)] {
                        reached[fidx(c)] = true;
                        stack.push(c);
                    }
                }
            }
        }
        while let Some(c) = stack.pop() {
            // Shared primal edges with the four neighbouring faces.
            let sides = [
                (pt(c.x + 1, c.y), pt(c.x + 1, c.y), pt(c.x + 1, c.y + 1)), // east face, right edge
                (pt(c.x - 1, c.y), pt(c.x, c.y), pt(c.x, c.y + 1)),         // west face, left edge
                (pt(c.x, c.y + 1), pt(c.x, c.y + 1), pt(c.x + 1, c.y + 1)), // north face, top edge
                (pt(c.x, c.y - 1), pt(c.x, c.y), pt(c.x + 1, c.y)),         // south face, bottom edge
            ];
            for (nc, ea, eb) in sides {
                if !frange.contains(nc) || reached[fidx(nc)] {
                    continue;
                }
                if !has_edge(ea, eb) {
                    reached[fidx(nc)] = true;
                    stack.push(nc);
                }
            }
        }
        let mut interior_cells = Vec::new();
        for cy in frange.y0..=frange.y1 {
            for cx in frange.x0..=frange.x1 {
                let c = pt(cx, cy);
                if reached[fidx(c)] {
                    continue;
                }
                let corners =
                    [c, pt(c.x + 1, c.y), pt(c.x, c.y + 1), pt(c.x + 1, c.y + 1)];
                if let Some(&missing) = corners.iter().find(|&&q| !grid.contains(q)) {
                    // Any absent side of this enclosed face is an enclosed
                    // absent edge; report one incident to the missing corner.
                    let other = corners
                        .iter()
                        .copied()
                        .find(|&q| {
                            q != missing && (q.x == missing.x || q.y == missing.y)
                        })
                        .unwrap();
                    return Err(DomainError::NotSimplyConnected(missing, other));
                }
                interior_cells.push(c);
            }
        }
        interior_cells.sort();
        let mut cell_grid = GridIndex::new(frange);
        for (i, &c) in interior_cells.iter().enumerate() {
            cell_grid.insert(c, i as u32);
        }

        let mut dom = DiscreteDomain {
            verts,
            grid,
            edges,
            adj,
            degree,
            interior_cells,
            cell_grid,
            visits: Vec::new(),
            ext_cycle: Vec::new(),
            ext_visit: Vec::new(),
            visits_of_vertex: HashMap::new(),
            bbox,
        };
        dom.trace_boundary();
        Ok(dom)
    }

    /// Counterclockwise outer-face walk producing the boundary cycle and
    /// the external edge cycle.
    fn trace_boundary(&mut self) {
        let n = self.verts.len();
        // Bottom-most then left-most vertex; its S and W neighbours are absent.
        let v0 = (0..n)
            .map(|i| i as u32)
            .min_by_key(|&i| {
                let p = self.verts[i as usize];
                (p.y, p.x)
            })
            .unwrap();

        let mut visits: Vec<Visit> = Vec::new();
        let mut ext_cycle: Vec<ExtEdge> = Vec::new();

        if self.degree[v0 as usize] == 0 {
            // Single-vertex domain.
            let exts: Vec<u32> = (0..4).map(|k| k as u32).collect();
            for d in DIRS {
                ext_cycle.push(ExtEdge { base: v0, dir: d });
            }
            visits.push(Visit { vertex: v0, exts });
        } else {
            // Starting dart: rotate CCW from S at v0 to the first present dir.
            let p0 = self.verts[v0 as usize];
            let d_start = (1..=3)
                .map(|k| Dir::S.rot_ccw(k))
                .find(|d| self.grid.contains(p0.step(*d)))
                .unwrap();
            let start = (v0, d_start);
            let mut cur = start;
            loop {
                let (u, d) = cur;
                let v = self.grid.get(self.verts[u as usize].step(d)).unwrap();
                // Arrived at v heading d; sweep CCW from the reverse dart.
                let pv = self.verts[v as usize];
                let mut exts = Vec::new();
                let mut out = None;
                for k in 1..=4 {
                    let cand = d.reverse().rot_ccw(k);
                    if self.grid.contains(pv.step(cand)) {
                        out = Some(cand);
                        break;
                    }
                    exts.push(ext_cycle.len() as u32 + exts.len() as u32);
                }
                let out = out.expect("walk vertex lost all edges");
                for (k, _) in exts.iter().enumerate() {
                    let cand = d.reverse().rot_ccw(k + 1);
                    ext_cycle.push(ExtEdge { base: v, dir: cand });
                }
                if !exts.is_empty() {
                    visits.push(Visit { vertex: v, exts });
                }
                cur = (v, out);
                if cur == start {
                    break;
                }
            }
        }

        // Rotate so the lexicographically smallest external edge comes first,
        // keeping each visit's sweep contiguous by rotating whole visits.
        let lex_min = (0..ext_cycle.len())
            .min_by_key(|&i| {
                let e = &ext_cycle[i];
                let p = self.verts[e.base as usize];
                (p.x, p.y, e.dir.index())
            })
            .expect("boundary with no external edges");
        let owner = visits
            .iter()
            .position(|vis| vis.exts.contains(&(lex_min as u32)))
            .unwrap();
        let shift_ext = visits[owner].exts[0] as usize;
        let l = ext_cycle.len();
        let rotated_ext: Vec<ExtEdge> =
            (0..l).map(|i| ext_cycle[(i + shift_ext) % l]).collect();
        let mut rotated_visits: Vec<Visit> = Vec::with_capacity(visits.len());
        let vn = visits.len();
        for i in 0..vn {
            let vis = &visits[(i + owner) % vn];
            let exts = vis
                .exts
                .iter()
                .map(|&e| ((e as usize + l - shift_ext) % l) as u32)
                .collect();
            rotated_visits.push(Visit { vertex: vis.vertex, exts });
        }

        let mut ext_visit = vec![0u32; l];
        let mut visits_of_vertex: HashMap<u32, Vec<u32>> = HashMap::new();
        for (vi, vis) in rotated_visits.iter().enumerate() {
            for &e in &vis.exts {
                ext_visit[e as usize] = vi as u32;
            }
            visits_of_vertex.entry(vis.vertex).or_default().push(vi as u32);
        }

        self.visits = rotated_visits;
        self.ext_cycle = rotated_ext;
        self.ext_visit = ext_visit;
        self.visits_of_vertex = visits_of_vertex;
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn vertices(&self) -> &[Pt] {
        &self.verts
    }

    pub fn point(&self, v: u32) -> Pt {
        self.verts[v as usize]
    }

    pub fn vertex_at(&self, p: Pt) -> Option<u32> {
        self.grid.get(p)
    }

    pub fn contains(&self, p: Pt) -> bool {
        self.grid.contains(p)
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_endpoints(&self, e: u32) -> (u32, u32) {
        self.edges[e as usize]
    }

    pub fn edge_id(&self, v: u32, d: Dir) -> Option<u32> {
        self.adj[v as usize][d.index()]
    }

    pub fn edge_between(&self, a: Pt, b: Pt) -> Option<u32> {
        let va = self.grid.get(a)?;
        let d = DIRS
            .into_iter()
            .find(|d| a.step(*d) == b)?;
        self.adj[va as usize][d.index()]
    }

    pub fn neighbor(&self, v: u32, d: Dir) -> Option<u32> {
        self.adj[v as usize][d.index()].map(|_| self.grid.get(self.point(v).step(d)).unwrap())
    }

    pub fn degree(&self, v: u32) -> u8 {
        self.degree[v as usize]
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }

    /// Faces of the domain (unit cells with all four sides present),
    /// keyed by lower-left corner.
    pub fn interior_cells(&self) -> &[Pt] {
        &self.interior_cells
    }

    pub fn interior_cell_at(&self, c: Pt) -> Option<u32> {
        self.cell_grid.get(c)
    }

    /// Boundary cycle as visits, counterclockwise.
    pub fn boundary_visits(&self) -> &[Visit] {
        &self.visits
    }

    pub fn n_visits(&self) -> usize {
        self.visits.len()
    }

    pub fn visit_vertex(&self, visit: u32) -> u32 {
        self.visits[visit as usize].vertex
    }

    pub fn visits_of(&self, vertex: u32) -> &[u32] {
        self.visits_of_vertex.get(&vertex).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Oriented external edges, counterclockwise.
    pub fn ext_cycle(&self) -> &[ExtEdge] {
        &self.ext_cycle
    }

    pub fn n_ext(&self) -> usize {
        self.ext_cycle.len()
    }

    pub fn ext_edge(&self, e: u32) -> ExtEdge {
        self.ext_cycle[e as usize]
    }

    /// The boundary visit an external edge is swept from.
    pub fn visit_of_ext(&self, e: u32) -> u32 {
        self.ext_visit[e as usize]
    }

    /// The last external edge of a visit when tracking the external cycle
    /// counterclockwise; this is the canonical `x_ext` of the visit.
    pub fn ext_mark_of_visit(&self, visit: u32) -> u32 {
        *self.visits[visit as usize].exts.last().unwrap()
    }

    /// Cyclic counterclockwise range of visits, inclusive of both ends.
    pub fn visit_arc(&self, from: u32, to: u32) -> Vec<u32> {
        cyclic_range(from, to, self.visits.len())
    }

    /// Cyclic counterclockwise range of external edges, inclusive.
    pub fn ext_arc(&self, from: u32, to: u32) -> Vec<u32> {
        cyclic_range(from, to, self.ext_cycle.len())
    }

    /// Vertices of a visit arc, deduplicated.
    pub fn arc_vertices(&self, from_visit: u32, to_visit: u32) -> Vec<u32> {
        let mut out = Vec::new();
        for vi in self.visit_arc(from_visit, to_visit) {
            let v = self.visit_vertex(vi);
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }

    /// Bridges: edges bounding no face of the domain.
    pub fn bridges(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for (eid, &(u, v)) in self.edges.iter().enumerate() {
            let (pa, pb) = (self.verts[u as usize], self.verts[v as usize]);
            let (c1, c2) = flanking_cells(pa, pb);
            if self.cell_grid.get(c1).is_none() && self.cell_grid.get(c2).is_none() {
                out.push(eid as u32);
            }
        }
        out
    }

    pub fn has_bridges(&self) -> bool {
        !self.bridges().is_empty()
    }

    /// Restrict to a vertex subset (used by separators and pruning).
    pub fn subdomain(&self, keep: &[u32]) -> Result<DiscreteDomain, DomainError> {
        DiscreteDomain::from_cells(keep.iter().map(|&v| self.point(v)))
    }

    /// ASCII mask: `#` in the domain, `.` outside, row 0 at the top.
    pub fn render_mask(&self) -> String {
        let b = self.bbox;
        let mut out = String::new();
        for y in (b.y0..=b.y1).rev() {
            for x in b.x0..=b.x1 {
                out.push(if self.grid.contains(pt(x, y)) { '#' } else { '.' });
            }
            out.push('\n');
        }
        out
    }
}

/// Cells flanking a primal edge, by lower-left corner.
pub fn flanking_cells(a: Pt, b: Pt) -> (Pt, Pt) {
    if a.y == b.y {
        let x = a.x.min(b.x);
        (pt(x, a.y), pt(x, a.y - 1))
    } else {
        let y = a.y.min(b.y);
        (pt(a.x - 1, y), pt(a.x, y))
    }
}

fn cyclic_range(from: u32, to: u32, len: usize) -> Vec<u32> {
    let len = len as u32;
    let mut out = Vec::new();
    let mut i = from;
    loop {
        out.push(i);
        if i == to {
            break;
        }
        i = (i + 1) % len;
        if out.len() > len as usize {
            panic!("cyclic range longer than cycle");
        }
    }
    out
}

/// Left and right faces of an oriented edge starting at `base` heading `dir`,
/// keyed by lower-left corner.
pub fn side_cells(base: Pt, dir: Dir) -> (Pt, Pt) {
    match dir {
        Dir::E => (pt(base.x, base.y), pt(base.x, base.y - 1)),
        Dir::N => (pt(base.x - 1, base.y), pt(base.x, base.y)),
        Dir::W => (pt(base.x - 1, base.y - 1), pt(base.x - 1, base.y)),
        Dir::S => (pt(base.x, base.y - 1), pt(base.x - 1, base.y - 1)),
    }
}

/// Parse a domain file: `#`/`.` rows (row 0 on top, y growing upward),
/// optionally followed by `@marks a=x,y b=x,y c=x,y d=x,y`.
pub fn parse_domain_text(text: &str) -> Result<(DiscreteDomain, Option<[Pt; 4]>), DomainError> {
    let mut rows: Vec<&str> = Vec::new();
    let mut marks = None;
    for (ln, line) in text.lines().enumerate() {
        let trimmed = line.trim_end();
        if trimmed.starts_with("@marks") {
            marks = Some(parse_marks(trimmed, ln + 1)?);
        } else if trimmed.is_empty() && rows.is_empty() {
            continue;
        } else if !trimmed.is_empty() {
            rows.push(trimmed);
        }
    }
    if rows.is_empty() {
        return Err(DomainError::EmptyDomain);
    }
    let nrows = rows.len() as i32;
    let mut cells = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        for (cx, ch) in row.chars().enumerate() {
            match ch {
                '#' => cells.push(pt(cx as i32, nrows - 1 - r as i32)),
                '.' | ' ' => {}
                other => {
                    return Err(DomainError::MaskParse {
                        line: r + 1,
                        msg: format!("unexpected character {other:?}"),
                    })
                }
            }
        }
    }
    Ok((DiscreteDomain::from_cells(cells)?, marks))
}

fn parse_marks(line: &str, ln: usize) -> Result<[Pt; 4], DomainError> {
    let mut out = [pt(0, 0); 4];
    let mut seen = [false; 4];
    for tok in line.trim_start_matches("@marks").split_whitespace() {
        let (name, coords) = tok.split_once('=').ok_or(DomainError::MaskParse {
            line: ln,
            msg: format!("bad mark token {tok:?}"),
        })?;
        let idx = match name {
            "a" => 0,
            "b" => 1,
            "c" => 2,
            "d" => 3,
            _ => {
                return Err(DomainError::MaskParse {
                    line: ln,
                    msg: format!("unknown mark {name:?}"),
                })
            }
        };
        let (xs, ys) = coords.split_once(',').ok_or(DomainError::MaskParse {
            line: ln,
            msg: format!("bad coordinates {coords:?}"),
        })?;
        let x = xs.parse().map_err(|_| DomainError::MaskParse {
            line: ln,
            msg: format!("bad x {xs:?}"),
        })?;
        let y = ys.parse().map_err(|_| DomainError::MaskParse {
            line: ln,
            msg: format!("bad y {ys:?}"),
        })?;
        out[idx] = pt(x, y);
        seen[idx] = true;
    }
    if seen.iter().all(|&s| s) {
        Ok(out)
    } else {
        Err(DomainError::MaskParse { line: ln, msg: "marks require a,b,c,d".into() })
    }
}

/// Parse a JSON coordinate list `[[x,y],...]` into a domain.
pub fn parse_domain_json(text: &str) -> Result<DiscreteDomain, DomainError> {
    let coords: Vec<(i32, i32)> = serde_json::from_str(text).map_err(|e| {
        DomainError::MaskParse { line: 0, msg: format!("json: {e}") }
    })?;
    DiscreteDomain::from_cells(coords.into_iter().map(|(x, y)| pt(x, y)))
}
