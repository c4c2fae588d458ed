//! The critical FK-Ising measure on discrete domains: wirings, exact
//! enumeration, Swendsen-Wang sampling, connectivity events, the planar
//! duality identity and the second-moment pipeline.

mod exact;
mod second_moment;
mod sw;

pub use exact::{
    dual_identity_check, exact_probabilities, enumerate_configs, fk_log_weight, fk_weight,
    ConfigView, DualityReport, DEFAULT_EDGE_CAP,
};
pub use second_moment::{lemma46_check, second_moment_report, SecondMomentMode, SecondMomentReport};
pub use sw::{estimate_event, estimate_statistic, Estimate, HeatBathChain, RunParams, SwChain};

use crate::domain::DiscreteDomain;
use crate::rect::{TopologicalRectangle, ARC_AB, ARC_BC, ARC_CD, ARC_DA};
use crate::P_CRIT;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum FkError {
    #[error("too many edges for exact enumeration: {n} > cap {cap}")]
    TooManyEdges { n: usize, cap: usize },
    #[error("sampler supports q = 2 only, got q = {0}")]
    UnsupportedQ(f64),
    #[error("vector entries must be positive")]
    NonPositiveEntry,
    #[error("operation requires a bridge-free domain")]
    HasBridges,
}

/// Model parameters. The default is the self-dual point p = √2/(√2+1),
/// q = 2; the exact oracle accepts any q > 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub p: f64,
    pub q: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams { p: P_CRIT, q: 2.0 }
    }
}

impl ModelParams {
    pub fn critical() -> Self {
        Self::default()
    }

    pub fn with_p(p: f64) -> Self {
        ModelParams { p, q: 2.0 }
    }
}

/// Boundary conditions: a partition of the boundary into wired classes;
/// singletons are implicit.
#[derive(Clone, Debug, Default)]
pub struct WiringPartition {
    classes: Vec<Vec<u32>>,
}

impl WiringPartition {
    pub fn free() -> Self {
        WiringPartition { classes: Vec::new() }
    }

    pub fn wired(domain: &DiscreteDomain) -> Self {
        let mut class: Vec<u32> = domain.boundary_visits().iter().map(|v| v.vertex).collect();
        class.sort_unstable();
        class.dedup();
        WiringPartition { classes: vec![class] }
    }

    /// Dobrushin conditions: the arc (ab) of the rectangle wired together.
    pub fn dobrushin(rect: &TopologicalRectangle) -> Self {
        Self::from_classes(vec![rect.arc_vertices(ARC_AB)])
    }

    /// Alternating conditions ((ab),(cd)): the two crossing arcs each wired.
    pub fn alternating(rect: &TopologicalRectangle) -> Self {
        Self::from_classes(vec![rect.arc_vertices(ARC_AB), rect.arc_vertices(ARC_CD)])
    }

    /// Wiring used by the Edwards-Sokal spin coupling: (bc) ∪ (da) as one
    /// class, the rest free.
    pub fn spin_plus_arcs(rect: &TopologicalRectangle) -> Self {
        let mut class = rect.arc_vertices(ARC_BC);
        class.extend(rect.arc_vertices(ARC_DA));
        Self::from_classes(vec![class])
    }

    /// Normalize arbitrary classes: dedup within classes, merge overlapping
    /// classes so the result is a partition.
    pub fn from_classes(raw: Vec<Vec<u32>>) -> Self {
        let mut classes: Vec<Vec<u32>> = Vec::new();
        for mut class in raw {
            class.sort_unstable();
            class.dedup();
            if class.len() < 2 {
                continue;
            }
            let mut merged = class;
            loop {
                let hit = classes.iter().position(|c| {
                    c.iter().any(|v| merged.binary_search(v).is_ok())
                });
                match hit {
                    Some(i) => {
                        let other = classes.swap_remove(i);
                        merged.extend(other);
                        merged.sort_unstable();
                        merged.dedup();
                    }
                    None => break,
                }
            }
            classes.push(merged);
        }
        classes.sort();
        WiringPartition { classes }
    }

    pub fn classes(&self) -> &[Vec<u32>] {
        &self.classes
    }

    pub fn is_free(&self) -> bool {
        self.classes.is_empty()
    }

    /// Contracted node ids: one node per wired class, one per free vertex.
    /// Returns (node_of_vertex, n_nodes).
    pub fn contract(&self, n_vertices: usize) -> (Vec<u32>, usize) {
        let mut node_of: Vec<u32> = vec![u32::MAX; n_vertices];
        let mut next = 0u32;
        for class in &self.classes {
            for &v in class {
                node_of[v as usize] = next;
            }
            next += 1;
        }
        for slot in node_of.iter_mut() {
            if *slot == u32::MAX {
                *slot = next;
                next += 1;
            }
        }
        (node_of, next as usize)
    }

    /// Whether `self` ≤ `other`: every pair wired here is wired there.
    pub fn le(&self, other: &WiringPartition, n_vertices: usize) -> bool {
        let (node_self, _) = self.contract(n_vertices);
        let (node_other, _) = other.contract(n_vertices);
        for ci in 0..self.classes.len() {
            let c = &self.classes[ci];
            for w in c.windows(2) {
                let _ = node_self;
                if node_other[w[0] as usize] != node_other[w[1] as usize] {
                    return false;
                }
            }
        }
        true
    }
}

/// Union-find with path halving.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect() }
    }

    pub fn reset(&mut self, n: usize) {
        self.parent.clear();
        self.parent.extend(0..n as u32);
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let g = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = g;
            x = g;
        }
        x
    }

    pub fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Smaller root wins, keeping labels canonical.
            if ra < rb {
                self.parent[rb as usize] = ra;
            } else {
                self.parent[ra as usize] = rb;
            }
        }
    }

    pub fn same(&mut self, a: u32, b: u32) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn count_roots(&mut self) -> usize {
        (0..self.parent.len() as u32).filter(|&i| self.find(i) == i).count()
    }
}

/// A bond configuration over the edges of a domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FkConfig {
    pub open: Vec<bool>,
}

impl FkConfig {
    pub fn empty(domain: &DiscreteDomain) -> Self {
        FkConfig { open: vec![false; domain.n_edges()] }
    }

    pub fn full(domain: &DiscreteDomain) -> Self {
        FkConfig { open: vec![true; domain.n_edges()] }
    }

    pub fn n_open(&self) -> usize {
        self.open.iter().filter(|&&b| b).count()
    }

    /// Union-find over vertices from the open edges, with the wiring's
    /// classes pre-merged.
    pub fn clusters(&self, domain: &DiscreteDomain, wiring: &WiringPartition) -> UnionFind {
        let mut uf = UnionFind::new(domain.len());
        for class in wiring.classes() {
            for w in class.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        for (e, &(u, v)) in domain.edges().iter().enumerate() {
            if self.open[e] {
                uf.union(u, v);
            }
        }
        uf
    }

    /// Number of clusters of ω ∪ ξ.
    pub fn k(&self, domain: &DiscreteDomain, wiring: &WiringPartition) -> usize {
        self.clusters(domain, wiring).count_roots()
    }
}

/// Whether some vertex of X is joined to some vertex of Y in ω ∪ ξ.
pub fn connected(
    config: &FkConfig,
    domain: &DiscreteDomain,
    wiring: &WiringPartition,
    x_set: &[u32],
    y_set: &[u32],
) -> bool {
    let mut uf = config.clusters(domain, wiring);
    let mut xroots: Vec<u32> = x_set.iter().map(|&v| uf.find(v)).collect();
    xroots.sort_unstable();
    xroots.dedup();
    y_set.iter().any(|&v| xroots.binary_search(&uf.find(v)).is_ok())
}

/// The crossing event of a rectangle: an open path (no wiring) joining
/// (ab) to (cd).
pub fn crossing(config: &FkConfig, rect: &TopologicalRectangle) -> bool {
    connected(
        config,
        rect.domain(),
        &WiringPartition::free(),
        &rect.arc_vertices(ARC_AB),
        &rect.arc_vertices(ARC_CD),
    )
}
