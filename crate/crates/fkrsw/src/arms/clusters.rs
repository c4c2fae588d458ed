//! Crossing clusters of an annulus: connected sets of one lattice touching
//! both terminal rings, with their angular order.
//!
//! Inner footprints of distinct crossing clusters never interleave (a
//! cluster entering another's span could not reach the outer ring without
//! meeting it), so sorting clusters of both colors by the angle of their
//! first inner contact produces the counterclockwise order in which any
//! disjoint arm family must traverse them.

use super::geometry::{theta, ArmKind, ArmLattice, Omega};
use crate::geom::Pt;

#[derive(Clone, Debug)]
pub struct Cluster {
    pub kind: ArmKind,
    pub verts: Vec<u32>,
    /// Inner terminal contacts, by vertex id.
    pub inner: Vec<u32>,
    pub outer: Vec<u32>,
    /// Angle of the first inner contact.
    pub theta_min: f64,
}

/// Crossing clusters of one lattice within the alive vertex set.
pub fn crossing_clusters(
    lat: &ArmLattice,
    omega: &impl Omega,
    kind: ArmKind,
    alive: &[bool],
) -> Vec<Cluster> {
    let verts = lat.verts(kind);
    let n = verts.len();
    let mut comp = vec![u32::MAX; n];
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut is_inner = vec![false; n];
    for &v in lat.inner(kind) {
        is_inner[v as usize] = true;
    }
    let mut is_outer = vec![false; n];
    for &v in lat.outer(kind) {
        is_outer[v as usize] = true;
    }
    let mut stack = Vec::new();
    for start in 0..n as u32 {
        if comp[start as usize] != u32::MAX || !alive[start as usize] {
            continue;
        }
        let id = clusters.len() as u32;
        comp[start as usize] = id;
        stack.push(start);
        let mut members = vec![start];
        while let Some(v) = stack.pop() {
            let pv = verts[v as usize];
            for w_pt in lat.neighbors(kind, pv) {
                let w = lat.index(kind, w_pt).unwrap();
                if comp[w as usize] != u32::MAX || !alive[w as usize] {
                    continue;
                }
                if lat.step_open(kind, omega, pv, w_pt) {
                    comp[w as usize] = id;
                    members.push(w);
                    stack.push(w);
                }
            }
        }
        let inner: Vec<u32> =
            members.iter().copied().filter(|&v| is_inner[v as usize]).collect();
        let outer: Vec<u32> =
            members.iter().copied().filter(|&v| is_outer[v as usize]).collect();
        if !inner.is_empty() && !outer.is_empty() {
            let theta_min = inner
                .iter()
                .map(|&v| theta(verts[v as usize]))
                .fold(f64::INFINITY, f64::min);
            clusters.push(Cluster { kind, verts: members, inner, outer, theta_min });
        } else {
            // Not a crossing cluster; forget the slot but keep comp marks.
            comp.iter_mut().for_each(|c| {
                if *c == id {
                    *c = u32::MAX - 1;
                }
            });
        }
    }
    clusters
}

/// Crossing clusters of both lattices merged by angular position.
pub fn merged_clusters(
    lat: &ArmLattice,
    omega: &impl Omega,
    p_alive: &[bool],
    d_alive: &[bool],
) -> Vec<Cluster> {
    let mut all = crossing_clusters(lat, omega, ArmKind::Primal, p_alive);
    all.extend(crossing_clusters(lat, omega, ArmKind::Dual, d_alive));
    all.sort_by(|a, b| a.theta_min.partial_cmp(&b.theta_min).unwrap());
    all
}

/// Doubled coordinates of a cluster's vertices (debug/witness helper).
pub fn cluster_points(lat: &ArmLattice, cluster: &Cluster) -> Vec<Pt> {
    cluster.verts.iter().map(|&v| lat.verts(cluster.kind)[v as usize]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arms::geometry::{ArmLattice, Geometry, GridOmega};
    use crate::geom::pt;

    fn all_alive(lat: &ArmLattice, kind: ArmKind) -> Vec<bool> {
        vec![true; lat.verts(kind).len()]
    }

    #[test]
    fn all_open_has_one_primal_cluster() {
        let lat = ArmLattice::new(1, 4, Geometry::Full);
        let mut omega = GridOmega::closed(-8, -8, 17, 17);
        for x in -8..8 {
            for y in -8..=8 {
                omega.set(pt(x, y), pt(x + 1, y), true);
            }
        }
        for x in -8..=8 {
            for y in -8..8 {
                omega.set(pt(x, y), pt(x, y + 1), true);
            }
        }
        let pc = crossing_clusters(&lat, &omega, ArmKind::Primal, &all_alive(&lat, ArmKind::Primal));
        assert_eq!(pc.len(), 1);
        let dc = crossing_clusters(&lat, &omega, ArmKind::Dual, &all_alive(&lat, ArmKind::Dual));
        assert!(dc.is_empty());
    }

    #[test]
    fn all_closed_has_one_dual_cluster() {
        let lat = ArmLattice::new(1, 4, Geometry::Full);
        let omega = GridOmega::closed(-8, -8, 17, 17);
        let pc = crossing_clusters(&lat, &omega, ArmKind::Primal, &all_alive(&lat, ArmKind::Primal));
        assert!(pc.is_empty());
        let dc = crossing_clusters(&lat, &omega, ArmKind::Dual, &all_alive(&lat, ArmKind::Dual));
        assert_eq!(dc.len(), 1);
    }

    #[test]
    fn single_radial_path_is_one_cluster() {
        let lat = ArmLattice::new(1, 4, Geometry::Full);
        let mut omega = GridOmega::closed(-8, -8, 17, 17);
        for x in 2..4 {
            omega.set(pt(x, 0), pt(x + 1, 0), true);
        }
        let pc = crossing_clusters(&lat, &omega, ArmKind::Primal, &all_alive(&lat, ArmKind::Primal));
        assert_eq!(pc.len(), 1);
        assert_eq!(pc[0].inner.len(), 1);
        assert_eq!(pc[0].outer.len(), 1);
        // Dual still crosses somewhere away from the path.
        let dc = crossing_clusters(&lat, &omega, ArmKind::Dual, &all_alive(&lat, ArmKind::Dual));
        assert_eq!(dc.len(), 1);
    }
}
