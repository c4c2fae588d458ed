//! δ-well-separated arm families.
//!
//! A witness family is δ-well-separated when the outer endpoints are
//! pairwise more than 2δN apart, the inner endpoints pairwise more than
//! 2δn apart, and every endpoint extends in its own color to distance δN
//! beyond the outer ring (respectively δn inward of the inner ring) inside
//! the δ-box around it. The decision searches over endpoint perturbations
//! within each arm's cluster, preferring the detector's own endpoints.

use super::geometry::{theta, ArmKind, ArmLattice, Omega};
use super::greedy::Witness;
use crate::geom::{pt, Pt};

#[derive(Clone, Copy, Debug)]
pub struct SeparationParams {
    pub delta: f64,
    /// Candidate endpoints inspected per arm during perturbation.
    pub max_candidates: usize,
}

impl Default for SeparationParams {
    fn default() -> Self {
        SeparationParams { delta: 1.0 / 16.0, max_candidates: 24 }
    }
}

/// Free-form BFS on one lattice restricted to a doubled-coordinate box,
/// following open (primal) or dual-open (dual) steps. No annulus clipping:
/// used for the local extension checks which leave the annulus.
fn local_reach(
    omega: &impl Omega,
    kind: ArmKind,
    start: Pt,
    center: Pt,
    radius_doubled: i32,
    target: impl Fn(Pt) -> bool,
) -> bool {
    let inside = |p: Pt| -> bool {
        (p.x - center.x).abs() <= radius_doubled && (p.y - center.y).abs() <= radius_doubled
    };
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![start];
    seen.insert(start);
    while let Some(v) = stack.pop() {
        if target(v) {
            return true;
        }
        for d in crate::geom::DIRS {
            let (dx, dy) = d.delta();
            let w = pt(v.x + 2 * dx, v.y + 2 * dy);
            if !inside(w) || seen.contains(&w) {
                continue;
            }
            let open = match kind {
                ArmKind::Primal => omega.open(pt(v.x / 2, v.y / 2), pt(w.x / 2, w.y / 2)),
                ArmKind::Dual => {
                    let (a, b) = super::geometry::crossed_primal_edge(v, w);
                    !omega.open(a, b)
                }
            };
            if open {
                seen.insert(w);
                stack.push(w);
            }
        }
    }
    false
}

fn endpoint_extends(
    lat: &ArmLattice,
    omega: &impl Omega,
    kind: ArmKind,
    endpoint: Pt,
    outward: bool,
    delta: f64,
) -> bool {
    let scale = if outward { lat.big_n } else { lat.n };
    let d = ((delta * scale as f64).floor() as i32).max(1);
    let r2 = 2 * d;
    // The extension demand is relative to the endpoint's own terminal
    // ring: reach distance d beyond it (outward at N, inward at n) inside
    // the box of radius d around the endpoint.
    let r0 = endpoint.norm_inf();
    if outward {
        local_reach(omega, kind, endpoint, endpoint, r2, |p| p.norm_inf() >= r0 + r2)
    } else {
        if r0 - r2 <= 0 {
            // Inward extension degenerates at tiny inner radii.
            return true;
        }
        local_reach(omega, kind, endpoint, endpoint, r2, |p| p.norm_inf() <= r0 - r2)
    }
}

/// Candidate replacement endpoints: terminal contacts of the endpoint's
/// own open (or dual-open) cluster, nearest in angle first.
fn endpoint_candidates(
    lat: &ArmLattice,
    omega: &impl Omega,
    kind: ArmKind,
    endpoint: Pt,
    inner: bool,
    cap: usize,
) -> Vec<Pt> {
    let terminals: std::collections::HashSet<Pt> = if inner {
        lat.inner(kind).iter().map(|&v| lat.verts(kind)[v as usize]).collect()
    } else {
        lat.outer(kind).iter().map(|&v| lat.verts(kind)[v as usize]).collect()
    };
    // Cluster of the endpoint within the annulus.
    let mut found = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![endpoint];
    seen.insert(endpoint);
    while let Some(v) = stack.pop() {
        if terminals.contains(&v) {
            found.push(v);
        }
        for w in lat.neighbors(kind, v) {
            if !seen.contains(&w) && lat.step_open(kind, omega, v, w) {
                seen.insert(w);
                stack.push(w);
            }
        }
    }
    let base = theta(endpoint);
    found.sort_by(|a, b| {
        let da = (theta(*a) - base).abs();
        let db = (theta(*b) - base).abs();
        da.partial_cmp(&db).unwrap()
    });
    found.truncate(cap);
    found
}

/// Decide δ-well-separation of a witness family, searching endpoint
/// perturbations within clusters (bounded, endpoint-nearest first).
pub fn well_separated(
    lat: &ArmLattice,
    omega: &impl Omega,
    witnesses: &[Witness],
    params: SeparationParams,
) -> bool {
    if witnesses.is_empty() {
        return false;
    }
    let delta = params.delta;
    // Candidate endpoint lists per arm, filtered by the extension bullets.
    let mut inner_opts: Vec<Vec<Pt>> = Vec::new();
    let mut outer_opts: Vec<Vec<Pt>> = Vec::new();
    for w in witnesses {
        let inner = endpoint_candidates(
            lat,
            omega,
            w.kind,
            *w.pts.first().unwrap(),
            true,
            params.max_candidates,
        );
        let outer = endpoint_candidates(
            lat,
            omega,
            w.kind,
            *w.pts.last().unwrap(),
            false,
            params.max_candidates,
        );
        inner_opts.push(
            inner
                .into_iter()
                .filter(|&p| endpoint_extends(lat, omega, w.kind, p, false, delta))
                .collect(),
        );
        outer_opts.push(
            outer
                .into_iter()
                .filter(|&p| endpoint_extends(lat, omega, w.kind, p, true, delta))
                .collect(),
        );
        if inner_opts.last().unwrap().is_empty() || outer_opts.last().unwrap().is_empty() {
            return false;
        }
    }
    // Pairwise spacing in Chebyshev distance on doubled coordinates:
    // > 2δN means > 4δN doubled.
    let need_out = 4.0 * delta * lat.big_n as f64;
    let need_in = 4.0 * delta * lat.n as f64;
    let spaced = |a: Pt, b: Pt, need: f64| -> bool {
        let d = (a.x - b.x).abs().max((a.y - b.y).abs()) as f64;
        d > need
    };
    // Greedy assignment with backtracking over the candidate lists.
    fn assign(
        idx: usize,
        opts: &[Vec<Pt>],
        chosen: &mut Vec<Pt>,
        need: f64,
        spaced: &impl Fn(Pt, Pt, f64) -> bool,
    ) -> bool {
        if idx == opts.len() {
            return true;
        }
        for &cand in &opts[idx] {
            if chosen.iter().all(|&c| spaced(c, cand, need)) {
                chosen.push(cand);
                if assign(idx + 1, opts, chosen, need, spaced) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::new();
    if !assign(0, &outer_opts, &mut chosen, need_out, &spaced) {
        return false;
    }
    let mut chosen_in = Vec::new();
    if lat.n > 0 && !assign(0, &inner_opts, &mut chosen_in, need_in, &spaced) {
        return false;
    }
    true
}
