//! Exact arm detection: per-cluster capacities from unit-capacity max flow
//! and full dynamic programming over the angular cluster order. The
//! independent cross-check for the greedy peeling detector.

use super::clusters::{merged_clusters, Cluster};
use super::flow::{edge_disjoint_paths, vertex_disjoint_paths};
use super::geometry::{ArmKind, ArmLattice, Omega};
use super::greedy::Disjointness;
use super::ArmsError;

/// Max number of disjoint arms inside one cluster, by max flow.
pub fn flow_capacity(
    lat: &ArmLattice,
    omega: &impl Omega,
    cluster: &Cluster,
    limit: u32,
    mode: Disjointness,
) -> u32 {
    let kind = cluster.kind;
    let verts = lat.verts(kind);
    // Local reindex of the cluster.
    let mut local = std::collections::HashMap::new();
    for (i, &v) in cluster.verts.iter().enumerate() {
        local.insert(v, i as u32);
    }
    let mut edges = Vec::new();
    for &v in &cluster.verts {
        let pv = verts[v as usize];
        for w_pt in lat.neighbors(kind, pv) {
            let w = lat.index(kind, w_pt).unwrap();
            if w > v {
                if let Some(&lw) = local.get(&w) {
                    if lat.step_open(kind, omega, pv, w_pt) {
                        edges.push((local[&v], lw));
                    }
                }
            }
        }
    }
    let sources: Vec<u32> = cluster.inner.iter().map(|v| local[v]).collect();
    let sinks: Vec<u32> = cluster.outer.iter().map(|v| local[v]).collect();
    match mode {
        Disjointness::Vertex => {
            let uncapped: Vec<u32> = lat
                .shared_anchors(kind)
                .into_iter()
                .filter_map(|v| local.get(&v).copied())
                .collect();
            vertex_disjoint_paths(cluster.verts.len(), &edges, &sources, &sinks, &uncapped, limit)
        }
        Disjointness::Edge => {
            edge_disjoint_paths(cluster.verts.len(), &edges, &sources, &sinks, limit)
        }
    }
}

/// Maximum number of pairwise disjoint arms of one type across the whole
/// annulus, by max flow. The exact oracle for `max_disjoint_arms`.
pub fn max_disjoint_arms(
    lat: &ArmLattice,
    omega: &impl Omega,
    kind: ArmKind,
    mode: Disjointness,
    size_cap: usize,
) -> Result<u32, ArmsError> {
    let n = lat.verts(kind).len();
    if n > size_cap {
        return Err(ArmsError::GeometryTooLarge { size: n, cap: size_cap });
    }
    let mut edges = Vec::new();
    for (v, &pv) in lat.verts(kind).iter().enumerate() {
        for w_pt in lat.neighbors(kind, pv) {
            let w = lat.index(kind, w_pt).unwrap();
            if (w as usize) > v && lat.step_open(kind, omega, pv, w_pt) {
                edges.push((v as u32, w));
            }
        }
    }
    let limit = (n as u32).max(8);
    Ok(match mode {
        Disjointness::Vertex => vertex_disjoint_paths(
            n,
            &edges,
            lat.inner(kind),
            lat.outer(kind),
            &lat.shared_anchors(kind),
            limit,
        ),
        Disjointness::Edge => {
            edge_disjoint_paths(n, &edges, lat.inner(kind), lat.outer(kind), limit)
        }
    })
}

struct FlowCache<'a, O: Omega> {
    lat: &'a ArmLattice,
    omega: &'a O,
    clusters: &'a [Cluster],
    mode: Disjointness,
    caps: Vec<Option<u32>>,
    limit: u32,
}

impl<'a, O: Omega> FlowCache<'a, O> {
    fn capacity(&mut self, ci: usize) -> u32 {
        if self.caps[ci].is_none() {
            self.caps[ci] = Some(flow_capacity(
                self.lat,
                self.omega,
                &self.clusters[ci],
                self.limit,
                self.mode,
            ));
        }
        self.caps[ci].unwrap()
    }
}

/// DP over an ordered cluster slice: can positions 0..j of the word be
/// assigned monotonically with per-cluster flow capacities?
fn dp_linear<O: Omega>(
    order: &[usize],
    clusters: &[Cluster],
    word: &[u8],
    cache: &mut FlowCache<O>,
) -> bool {
    let j = word.len();
    let mut reach = vec![false; j + 1];
    reach[0] = true;
    for &ci in order {
        let color = clusters[ci].kind;
        let cap = cache.capacity(ci) as usize;
        if cap == 0 {
            continue;
        }
        // Take t in 1..=cap consecutive positions of this color; sweep
        // positions descending so one cluster is not reused.
        let mut next = reach.clone();
        for pos in 0..j {
            if !reach[pos] {
                continue;
            }
            let mut t = 0;
            while pos + t < j
                && t < cap
                && ArmKind::of_letter(word[pos + t]) == color
            {
                t += 1;
                next[pos + t] = true;
            }
        }
        reach = next;
        if reach[j] {
            return true;
        }
    }
    reach[j]
}

/// Exact decision of the arm event by flows and order DP.
pub fn oracle_decide<O: Omega>(
    lat: &ArmLattice,
    omega: &O,
    word: &[u8],
    mode: Disjointness,
    size_cap: usize,
) -> Result<bool, ArmsError> {
    let size = lat.pv.len() + lat.dv.len();
    if size > size_cap {
        return Err(ArmsError::GeometryTooLarge { size, cap: size_cap });
    }
    let p_alive = vec![true; lat.pv.len()];
    let d_alive = vec![true; lat.dv.len()];
    let clusters = merged_clusters(lat, omega, &p_alive, &d_alive);
    let m = clusters.len();
    let j = word.len();
    let mut cache = FlowCache {
        lat,
        omega,
        clusters: &clusters,
        mode,
        caps: vec![None; m],
        limit: j as u32,
    };
    if lat.half {
        let order: Vec<usize> = (0..m).collect();
        return Ok(dp_linear(&order, &clusters, word, &mut cache));
    }
    // Cyclic case.
    if word.iter().all(|&b| b == word[0]) {
        let color = ArmKind::of_letter(word[0]);
        let mut total = 0usize;
        for ci in 0..m {
            if clusters[ci].kind == color {
                total += cache.capacity(ci) as usize;
                if total >= j {
                    return Ok(true);
                }
            }
        }
        return Ok(false);
    }
    for rot in 0..j {
        let rotated: Vec<u8> = (0..j).map(|i| word[(i + rot) % j]).collect();
        for s in 0..m {
            if clusters[s].kind != ArmKind::of_letter(rotated[0]) {
                continue;
            }
            let order: Vec<usize> = (0..m).map(|i| (s + i) % m).collect();
            if dp_linear(&order, &clusters, &rotated, &mut cache) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arms::geometry::{ArmLattice, Geometry, GridOmega};
    use crate::geom::pt;

    #[test]
    fn flow_counts_radial_arms() {
        // All open on a full annulus: at least one disjoint open arm per
        // side, exact value by flow equals the greedy peel count.
        let lat = ArmLattice::new(1, 3, Geometry::Full);
        let mut omega = GridOmega::closed(-6, -6, 13, 13);
        for x in -6..6 {
            for y in -6..=6 {
                omega.set(pt(x, y), pt(x + 1, y), true);
            }
        }
        for x in -6..=6 {
            for y in -6..6 {
                omega.set(pt(x, y), pt(x, y + 1), true);
            }
        }
        let flow =
            max_disjoint_arms(&lat, &omega, ArmKind::Primal, Disjointness::Vertex, 100_000)
                .unwrap();
        assert!(flow >= 4, "flow {flow}");
        // All closed gives zero open arms.
        let closed = GridOmega::closed(-6, -6, 13, 13);
        let none =
            max_disjoint_arms(&lat, &closed, ArmKind::Primal, Disjointness::Vertex, 100_000)
                .unwrap();
        assert_eq!(none, 0);
    }

    #[test]
    fn single_radial_path_counts_one() {
        let lat = ArmLattice::new(1, 4, Geometry::Full);
        let mut omega = GridOmega::closed(-8, -8, 17, 17);
        for x in 2..4 {
            omega.set(pt(x, 0), pt(x + 1, 0), true);
        }
        let flow =
            max_disjoint_arms(&lat, &omega, ArmKind::Primal, Disjointness::Vertex, 100_000)
                .unwrap();
        assert_eq!(flow, 1);
    }

    #[test]
    fn size_cap_respected() {
        let lat = ArmLattice::new(1, 4, Geometry::Full);
        let omega = GridOmega::closed(-8, -8, 17, 17);
        let r = oracle_decide(&lat, &omega, &[1], Disjointness::Vertex, 10);
        assert!(matches!(r, Err(ArmsError::GeometryTooLarge { .. })));
    }
}
