//! Swendsen-Wang sampling of the FK-Ising measure under arbitrary wirings,
//! a single-edge heat-bath chain for cross-validation, and batch-means
//! estimation.

use super::{FkConfig, FkError, ModelParams, UnionFind, WiringPartition};
use crate::domain::DiscreteDomain;
use crate::rng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Swendsen-Wang chain: clusters of ω ∪ ξ (wired classes contracted to
/// single nodes) are colored by independent fair coins, then every edge is
/// resampled, open with probability p when its endpoints agree.
pub struct SwChain<'a> {
    domain: &'a DiscreteDomain,
    node_of: Vec<u32>,
    n_nodes: usize,
    p: f64,
    rng: ChaCha8Rng,
    open: Vec<bool>,
    uf: UnionFind,
    spin: Vec<i8>,
    raw_uf: UnionFind,
}

impl<'a> SwChain<'a> {
    pub fn new(
        domain: &'a DiscreteDomain,
        wiring: &WiringPartition,
        params: ModelParams,
        rng: ChaCha8Rng,
    ) -> Result<SwChain<'a>, FkError> {
        if params.q != 2.0 {
            return Err(FkError::UnsupportedQ(params.q));
        }
        let (node_of, n_nodes) = wiring.contract(domain.len());
        Ok(SwChain {
            domain,
            node_of,
            n_nodes,
            p: params.p,
            rng,
            open: vec![false; domain.n_edges()],
            uf: UnionFind::new(n_nodes),
            spin: vec![0; n_nodes],
            raw_uf: UnionFind::new(domain.len()),
        })
    }

    pub fn sweep(&mut self) {
        let ne = self.domain.n_edges();
        self.uf.reset(self.n_nodes);
        for (e, &(u, v)) in self.domain.edges().iter().enumerate() {
            if self.open[e] {
                self.uf.union(self.node_of[u as usize], self.node_of[v as usize]);
            }
        }
        // Fair spin per cluster, assigned at first-seen roots in node order.
        for s in self.spin.iter_mut() {
            *s = 0;
        }
        for node in 0..self.n_nodes as u32 {
            let root = self.uf.find(node);
            if self.spin[root as usize] == 0 {
                self.spin[root as usize] = if self.rng.gen::<bool>() { 1 } else { -1 };
            }
        }
        for e in 0..ne {
            let (u, v) = self.domain.edges()[e];
            let su = self.spin[self.uf.find(self.node_of[u as usize]) as usize];
            let sv = self.spin[self.uf.find(self.node_of[v as usize]) as usize];
            self.open[e] = su == sv && self.rng.gen::<f64>() < self.p;
        }
    }

    pub fn open_edges(&self) -> &[bool] {
        &self.open
    }

    pub fn config(&self) -> FkConfig {
        FkConfig { open: self.open.clone() }
    }

    /// Union-find over vertices of ω only, rebuilt for the current state.
    pub fn raw_clusters(&mut self) -> &mut UnionFind {
        self.raw_uf.reset(self.domain.len());
        for (e, &(u, v)) in self.domain.edges().iter().enumerate() {
            if self.open[e] {
                self.raw_uf.union(u, v);
            }
        }
        &mut self.raw_uf
    }

    pub fn domain(&self) -> &DiscreteDomain {
        self.domain
    }
}

/// Single-edge heat-bath chain; the conditional connectivity query is
/// recomputed from scratch at every step. Cross-validation use only.
pub struct HeatBathChain<'a> {
    domain: &'a DiscreteDomain,
    wiring: WiringPartition,
    p: f64,
    q: f64,
    rng: ChaCha8Rng,
    pub open: Vec<bool>,
}

impl<'a> HeatBathChain<'a> {
    pub fn new(
        domain: &'a DiscreteDomain,
        wiring: &WiringPartition,
        params: ModelParams,
        rng: ChaCha8Rng,
    ) -> HeatBathChain<'a> {
        HeatBathChain {
            domain,
            wiring: wiring.clone(),
            p: params.p,
            q: params.q,
            rng,
            open: vec![false; domain.n_edges()],
        }
    }

    pub fn sweep(&mut self) {
        for e in 0..self.domain.n_edges() {
            let (u, v) = self.domain.edges()[e];
            self.open[e] = false;
            let cfg = FkConfig { open: self.open.clone() };
            let joined = super::connected(&cfg, self.domain, &self.wiring, &[u], &[v]);
            let p_open = if joined {
                self.p
            } else {
                self.p / (self.p + (1.0 - self.p) * self.q)
            };
            self.open[e] = self.rng.gen::<f64>() < p_open;
        }
    }
}

/// Monte-Carlo estimate with batch-means error bars.
#[derive(Clone, Debug)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_sweeps: u64,
    pub n_batches: u32,
    pub burn_in: u64,
    pub seed: u64,
    pub wall_ms: u64,
}

impl Estimate {
    /// Statistical fields agree bit for bit (wall time excluded).
    pub fn same_statistics(&self, other: &Estimate) -> bool {
        self.mean.to_bits() == other.mean.to_bits()
            && self.stderr.to_bits() == other.stderr.to_bits()
            && self.n_sweeps == other.n_sweeps
            && self.n_batches == other.n_batches
            && self.seed == other.seed
    }

    fn from_batches(batches: &[f64], n_sweeps: u64, burn_in: u64, seed: u64, wall_ms: u64) -> Estimate {
        let b = batches.len() as f64;
        let mean = batches.iter().sum::<f64>() / b;
        let var = if batches.len() > 1 {
            batches.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (b - 1.0)
        } else {
            0.0
        };
        Estimate {
            mean,
            stderr: (var / b).sqrt(),
            n_sweeps,
            n_batches: batches.len() as u32,
            burn_in,
            seed,
            wall_ms,
        }
    }
}

/// Run parameters for sampling estimates.
#[derive(Clone, Copy, Debug)]
pub struct RunParams {
    /// Measurement sweeps per chain (after burn-in).
    pub sweeps: u64,
    pub burn_in: u64,
    /// Batches per chain for the batch-means error bar.
    pub batches: u32,
    pub chains: u32,
    pub seed: u64,
    /// Purpose label separating this run's random streams.
    pub purpose: &'static str,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            sweeps: 10_000,
            burn_in: 1_000,
            batches: 32,
            chains: 1,
            seed: 1,
            purpose: "fk-estimate",
        }
    }
}

/// Estimate the probability of a configuration event by Swendsen-Wang
/// sampling. The predicate sees the chain state after each sweep; chains
/// run in parallel on independent streams and merge deterministically.
pub fn estimate_event<F>(
    domain: &DiscreteDomain,
    wiring: &WiringPartition,
    params: ModelParams,
    run: RunParams,
    event: F,
) -> Result<Estimate, FkError>
where
    F: Fn(&mut SwChain) -> bool + Sync,
{
    estimate_statistic(domain, wiring, params, run, |chain| {
        if event(chain) {
            1.0
        } else {
            0.0
        }
    })
}

/// Estimate the mean of a per-sweep statistic.
pub fn estimate_statistic<F>(
    domain: &DiscreteDomain,
    wiring: &WiringPartition,
    params: ModelParams,
    run: RunParams,
    stat: F,
) -> Result<Estimate, FkError>
where
    F: Fn(&mut SwChain) -> f64 + Sync,
{
    if params.q != 2.0 {
        return Err(FkError::UnsupportedQ(params.q));
    }
    let started = std::time::Instant::now();
    let per_batch = (run.sweeps / run.batches as u64).max(1);
    let chain_batches: Vec<Vec<f64>> = (0..run.chains)
        .into_par_iter()
        .map(|chain_idx| {
            let rng = rng::stream(run.seed, run.purpose, chain_idx as u64);
            let mut chain = SwChain::new(domain, wiring, params, rng)
                .expect("q checked above");
            for _ in 0..run.burn_in {
                chain.sweep();
            }
            let mut batches = Vec::with_capacity(run.batches as usize);
            for _ in 0..run.batches {
                let mut acc = 0.0;
                for _ in 0..per_batch {
                    chain.sweep();
                    acc += stat(&mut chain);
                }
                batches.push(acc / per_batch as f64);
            }
            batches
        })
        .collect();
    let batches: Vec<f64> = chain_batches.into_iter().flatten().collect();
    let n_sweeps = per_batch * run.batches as u64 * run.chains as u64;
    Ok(Estimate::from_batches(
        &batches,
        n_sweeps,
        run.burn_in,
        run.seed,
        started.elapsed().as_millis() as u64,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fk::{exact_probabilities, ConfigView};
    use crate::geom::pt;
    use crate::rect::TopologicalRectangle;
    use std::sync::Arc;

    fn block(w: i32, h: i32) -> DiscreteDomain {
        DiscreteDomain::from_cells((0..w).flat_map(|x| (0..h).map(move |y| pt(x, y)))).unwrap()
    }

    #[test]
    fn rejects_q_not_two() {
        let d = block(2, 2);
        let rng = rng::stream(0, "t", 0);
        let r = SwChain::new(&d, &WiringPartition::free(), ModelParams { p: 0.5, q: 3.0 }, rng);
        assert!(matches!(r, Err(FkError::UnsupportedQ(_))));
    }

    #[test]
    fn p_one_absorbs_at_all_open() {
        let d = block(2, 2);
        let rng = rng::stream(7, "t", 0);
        let mut chain =
            SwChain::new(&d, &WiringPartition::free(), ModelParams { p: 1.0, q: 2.0 }, rng)
                .unwrap();
        for _ in 0..3 {
            chain.sweep();
        }
        assert!(chain.open_edges().iter().all(|&b| b));
        chain.sweep();
        assert!(chain.open_edges().iter().all(|&b| b));
    }

    #[test]
    fn sure_event_estimate() {
        let d = block(2, 2);
        let est = estimate_event(
            &d,
            &WiringPartition::free(),
            ModelParams::critical(),
            RunParams { sweeps: 640, burn_in: 10, batches: 8, chains: 1, seed: 3, purpose: "t" },
            |_| true,
        )
        .unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn same_seed_bit_identical() {
        let d = block(3, 2);
        let run = RunParams { sweeps: 500, burn_in: 50, batches: 10, chains: 2, seed: 11, purpose: "t" };
        let x = d.vertex_at(pt(0, 0)).unwrap();
        let y = d.vertex_at(pt(2, 1)).unwrap();
        let f = |chain: &mut SwChain| {
            let uf = chain.raw_clusters();
            uf.same(x, y)
        };
        let e1 = estimate_event(&d, &WiringPartition::free(), ModelParams::critical(), run, f)
            .unwrap();
        let e2 = estimate_event(&d, &WiringPartition::free(), ModelParams::critical(), run, f)
            .unwrap();
        assert!(e1.same_statistics(&e2));
    }

    #[test]
    fn sw_matches_exact_on_small_fixture() {
        // Edge-open probability under wired conditions on the 2x2 block.
        let d = block(2, 2);
        let wired = WiringPartition::wired(&d);
        let params = ModelParams::critical();
        let exact = exact_probabilities(
            &d,
            &wired,
            params,
            22,
            &mut [&mut |v: &mut ConfigView| v.open(0)],
        )
        .unwrap()[0];
        let est = estimate_event(
            &d,
            &wired,
            params,
            RunParams {
                sweeps: 40_000,
                burn_in: 500,
                batches: 32,
                chains: 1,
                seed: 5,
                purpose: "t-edge",
            },
            |chain| chain.open_edges()[0],
        )
        .unwrap();
        assert!(
            (est.mean - exact).abs() <= 3.0 * est.stderr.max(1e-4),
            "exact {exact} vs mc {} ± {}",
            est.mean,
            est.stderr
        );
    }

    #[test]
    fn heat_bath_agrees_with_sw() {
        // Crossing probability of the 2x2 block under alternating
        // conditions, heat-bath vs exact.
        let d = Arc::new(block(2, 2));
        let r = TopologicalRectangle::new(d.clone(), pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1))
            .unwrap();
        let wiring = WiringPartition::alternating(&r);
        let params = ModelParams::critical();
        let ab = r.arc_vertices(crate::rect::ARC_AB);
        let cd = r.arc_vertices(crate::rect::ARC_CD);
        let exact = exact_probabilities(
            &d,
            &wiring,
            params,
            22,
            &mut [&mut |v: &mut ConfigView| v.connected_raw(&ab, &cd)],
        )
        .unwrap()[0];
        let mut hb = HeatBathChain::new(&d, &wiring, params, rng::stream(9, "hb", 0));
        for _ in 0..500 {
            hb.sweep();
        }
        let mut hits = 0usize;
        let n = 40_000;
        for _ in 0..n {
            hb.sweep();
            let cfg = FkConfig { open: hb.open.clone() };
            if crate::fk::connected(&cfg, &d, &WiringPartition::free(), &ab, &cd) {
                hits += 1;
            }
        }
        let mc = hits as f64 / n as f64;
        assert!((mc - exact).abs() < 0.02, "exact {exact} vs hb {mc}");
    }
}
