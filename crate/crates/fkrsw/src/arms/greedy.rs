//! Witness-producing arm detection.
//!
//! Per cluster, a maximum family of pairwise disjoint crossings is peeled
//! out of an integral max flow: the flow is decomposed into paths by
//! repeated breadth-first extraction on its support, and the paths are
//! ordered by the angle of their inner contacts. Across clusters the word
//! is matched greedily along the angular order (the exact detector in
//! `oracle` replaces both steps by capacity queries and a DP).

use super::clusters::{merged_clusters, Cluster};
use super::flow::FlowNet;
use super::geometry::{theta, ArmKind, ArmLattice, Omega};
use crate::geom::Pt;

/// Vertex- or edge-disjointness of same-lattice arms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Disjointness {
    #[default]
    Vertex,
    Edge,
}

/// A witness arm: self-avoiding path in doubled coordinates, inner to
/// outer.
#[derive(Clone, Debug)]
pub struct Witness {
    pub kind: ArmKind,
    pub pts: Vec<Pt>,
}

impl Witness {
    pub fn inner_theta(&self) -> f64 {
        theta(self.pts[0])
    }
}

/// Extract a maximum disjoint arm family from one cluster, ordered by
/// inner-contact angle; at most `need` arms are returned.
pub fn peel_cluster(
    lat: &ArmLattice,
    omega: &impl Omega,
    cluster: &Cluster,
    need: usize,
    mode: Disjointness,
) -> Vec<Witness> {
    if need == 0 {
        return Vec::new();
    }
    let kind = cluster.kind;
    let verts = lat.verts(kind);
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
    let uncapped: Vec<u32> = lat
        .shared_anchors(kind)
        .into_iter()
        .filter_map(|v| local.get(&v).copied())
        .collect();
    let limit = need.min(cluster.inner.len().max(1) * 4 + cluster.outer.len()) as u32;
    let mut net = match mode {
        Disjointness::Vertex => {
            FlowNet::vertex_disjoint(cluster.verts.len(), &edges, &sources, &sinks, &uncapped, limit)
        }
        Disjointness::Edge => {
            FlowNet::edge_disjoint(cluster.verts.len(), &edges, &sources, &sinks, limit)
        }
    };
    let k = net.run(limit);
    let mut arms: Vec<Witness> = net
        .decompose(k)
        .into_iter()
        .map(|path| Witness {
            kind,
            pts: path
                .into_iter()
                .map(|lv| verts[cluster.verts[lv as usize] as usize])
                .collect(),
        })
        .collect();
    arms.sort_by(|a, b| a.inner_theta().partial_cmp(&b.inner_theta()).unwrap());
    arms.truncate(need);
    arms
}

/// Capacity cache: peeled witnesses per cluster, extended on demand.
pub struct PeelCache<'a, O: Omega> {
    lat: &'a ArmLattice,
    omega: &'a O,
    clusters: &'a [Cluster],
    peeled: Vec<Vec<Witness>>,
    asked: Vec<usize>,
    mode: Disjointness,
}

impl<'a, O: Omega> PeelCache<'a, O> {
    pub fn new(
        lat: &'a ArmLattice,
        omega: &'a O,
        clusters: &'a [Cluster],
        mode: Disjointness,
    ) -> Self {
        PeelCache {
            lat,
            omega,
            clusters,
            peeled: vec![Vec::new(); clusters.len()],
            asked: vec![0; clusters.len()],
            mode,
        }
    }

    /// Number of disjoint arms available in cluster `ci`, up to `need`.
    pub fn capacity(&mut self, ci: usize, need: usize) -> usize {
        if need > self.asked[ci] {
            self.peeled[ci] =
                peel_cluster(self.lat, self.omega, &self.clusters[ci], need, self.mode);
            self.asked[ci] = need;
        }
        self.peeled[ci].len().min(need)
    }

    pub fn witnesses(&self, ci: usize, count: usize) -> Vec<Witness> {
        self.peeled[ci][..count].to_vec()
    }
}

/// Greedy left-to-right matching of the word against an ordered cluster
/// slice. Returns per-cluster assignment counts.
pub fn match_linear<O: Omega>(
    order: &[usize],
    clusters: &[Cluster],
    word: &[u8],
    cache: &mut PeelCache<O>,
) -> Option<Vec<(usize, usize)>> {
    let j = word.len();
    let mut pos = 0usize;
    let mut assignment = Vec::new();
    for &ci in order {
        if pos == j {
            break;
        }
        let color = ArmKind::of_letter(word[pos]);
        if clusters[ci].kind != color {
            continue;
        }
        let mut run = 0usize;
        while pos + run < j && ArmKind::of_letter(word[pos + run]) == color {
            run += 1;
        }
        let take = cache.capacity(ci, run);
        if take > 0 {
            assignment.push((ci, take));
            pos += take;
        }
    }
    (pos == j).then_some(assignment)
}

/// Greedy decision for a linear (half-annulus) word.
pub fn decide_linear<O: Omega>(
    lat: &ArmLattice,
    omega: &O,
    word: &[u8],
    mode: Disjointness,
    want_witnesses: bool,
) -> (bool, Vec<Witness>) {
    let p_alive = vec![true; lat.pv.len()];
    let d_alive = vec![true; lat.dv.len()];
    let clusters = merged_clusters(lat, omega, &p_alive, &d_alive);
    let order: Vec<usize> = (0..clusters.len()).collect();
    let mut cache = PeelCache::new(lat, omega, &clusters, mode);
    match match_linear(&order, &clusters, word, &mut cache) {
        Some(assignment) => {
            let witnesses = if want_witnesses {
                assignment.iter().flat_map(|&(ci, t)| cache.witnesses(ci, t)).collect()
            } else {
                Vec::new()
            };
            (true, witnesses)
        }
        None => (false, Vec::new()),
    }
}

/// Landing zones: one square-perimeter angle interval of the outer ring
/// per word position (wrap-around allowed as lo > hi).
pub type LandingZones = Vec<(f64, f64)>;

fn zone_contains(zone: (f64, f64), th: f64) -> bool {
    let (lo, hi) = zone;
    if lo <= hi {
        th >= lo && th <= hi
    } else {
        th >= lo || th <= hi
    }
}

/// Whether the cluster holds an arm landing inside the zone.
pub fn cluster_lands_in(
    lat: &ArmLattice,
    cluster: &Cluster,
    zone: (f64, f64),
) -> bool {
    cluster
        .outer
        .iter()
        .any(|&v| zone_contains(zone, theta(lat.verts(cluster.kind)[v as usize])))
}

/// Greedy decision with per-position landing zones; every same-color run of
/// the word must have length one.
pub fn decide_with_landing<O: Omega>(
    lat: &ArmLattice,
    omega: &O,
    word: &[u8],
    zones: &LandingZones,
    mode: Disjointness,
) -> Result<bool, crate::arms::ArmsError> {
    if zones.len() != word.len() {
        return Err(crate::arms::ArmsError::UnsupportedSpec(
            "need one landing zone per arm",
        ));
    }
    for w in word.windows(2) {
        if w[0] == w[1] {
            return Err(crate::arms::ArmsError::UnsupportedSpec(
                "landing zones need runs of length one",
            ));
        }
    }
    let p_alive = vec![true; lat.pv.len()];
    let d_alive = vec![true; lat.dv.len()];
    let clusters = merged_clusters(lat, omega, &p_alive, &d_alive);
    let m = clusters.len();
    let j = word.len();
    let mut cache = PeelCache::new(lat, omega, &clusters, mode);
    let try_order = |order: &[usize], rotated: &[u8], rzones: &[(f64, f64)], cache: &mut PeelCache<O>| -> bool {
        let mut pos = 0usize;
        for &ci in order {
            if pos == j {
                break;
            }
            let color = ArmKind::of_letter(rotated[pos]);
            if clusters[ci].kind != color {
                continue;
            }
            if cluster_lands_in(lat, &clusters[ci], rzones[pos])
                && cache.capacity(ci, 1) >= 1
            {
                pos += 1;
            }
        }
        pos == j
    };
    if lat.half {
        let order: Vec<usize> = (0..m).collect();
        return Ok(try_order(&order, word, zones, &mut cache));
    }
    for rot in 0..j {
        let rotated: Vec<u8> = (0..j).map(|i| word[(i + rot) % j]).collect();
        let rzones: Vec<(f64, f64)> = (0..j).map(|i| zones[(i + rot) % j]).collect();
        for s in 0..m {
            if clusters[s].kind != ArmKind::of_letter(rotated[0]) {
                continue;
            }
            let order: Vec<usize> = (0..m).map(|i| (s + i) % m).collect();
            if try_order(&order, &rotated, &rzones, &mut cache) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Greedy decision for a cyclic (full-annulus) word: anchored at the
/// positive-x axis and quantified over rotations and over the cluster
/// where the first block starts.
pub fn decide_cyclic<O: Omega>(
    lat: &ArmLattice,
    omega: &O,
    word: &[u8],
    mode: Disjointness,
    want_witnesses: bool,
) -> (bool, Vec<Witness>) {
    let p_alive = vec![true; lat.pv.len()];
    let d_alive = vec![true; lat.dv.len()];
    let clusters = merged_clusters(lat, omega, &p_alive, &d_alive);
    let m = clusters.len();
    let j = word.len();
    let mut cache = PeelCache::new(lat, omega, &clusters, mode);
    if word.iter().all(|&b| b == word[0]) {
        // Single-color cyclic word: arms may spread over any clusters.
        let color = ArmKind::of_letter(word[0]);
        let mut left = j;
        let mut assignment = Vec::new();
        for ci in 0..m {
            if clusters[ci].kind != color || left == 0 {
                continue;
            }
            let take = cache.capacity(ci, left);
            if take > 0 {
                assignment.push((ci, take));
                left -= take;
            }
        }
        if left > 0 {
            return (false, Vec::new());
        }
        let witnesses = if want_witnesses {
            assignment.iter().flat_map(|&(ci, t)| cache.witnesses(ci, t)).collect()
        } else {
            Vec::new()
        };
        return (true, witnesses);
    }
    for rot in 0..j {
        let rotated: Vec<u8> = (0..j).map(|i| word[(i + rot) % j]).collect();
        for s in 0..m {
            if clusters[s].kind != ArmKind::of_letter(rotated[0]) {
                continue;
            }
            let order: Vec<usize> = (0..m).map(|i| (s + i) % m).collect();
            if let Some(assignment) = match_linear(&order, &clusters, &rotated, &mut cache) {
                let witnesses = if want_witnesses {
                    assignment.iter().flat_map(|&(ci, t)| cache.witnesses(ci, t)).collect()
                } else {
                    Vec::new()
                };
                return (true, witnesses);
            }
        }
    }
    (false, Vec::new())
}
