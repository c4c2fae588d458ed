//! The second-moment pipeline for the pair-connection count
//! N = Σ_{u∈(ab)} Σ_{v∈(cd)} φ^∅[u↔v] · 1_{u↔v}, with the ratio
//! diagnostics that tie its moments to the random-walk partition
//! functions on the domain and its dual.

use super::{
    estimate_event, estimate_statistic, exact_probabilities, ConfigView, FkError, ModelParams,
    RunParams, WiringPartition,
};
use crate::dca::{Network, Profile};
use crate::dual::{interior_dual_ext_marks, DualDomain};
use crate::rect::{TopologicalRectangle, ARC_AB, ARC_CD};

/// How the pair-connection probabilities and moments are computed.
#[derive(Clone, Copy, Debug)]
pub enum SecondMomentMode {
    /// Exact enumeration (edge count capped).
    Exact { cap: usize },
    /// Monte Carlo; pair probabilities and moments come from independent
    /// streams.
    MonteCarlo { run: RunParams },
}

#[derive(Clone, Debug)]
pub struct SecondMomentReport {
    /// φ^∅[u↔v] for u in (ab), v in (cd), row-major.
    pub pair_probs: Vec<f64>,
    pub n_ab: usize,
    pub n_cd: usize,
    pub e_n: f64,
    pub e_n2: f64,
    pub p_pos: f64,
    /// P[N>0] - E[N]²/E[N²]; nonnegative up to statistical noise.
    pub cs_slack: f64,
    /// φ^{(ab),(cd)}[(ab)↔(cd)] / √(Z_Ω[(ab),(cd)]).
    pub prop41_ratio: f64,
    /// φ^∅[a↔c] / √(Z_{Ω*_int}[a*,c*]); needs a bridge-free domain.
    pub prop43_ratio: Option<f64>,
    /// E[N] / Z_{Ω*_int}[(a*b*),(c*d*)].
    pub cor44_ratio: Option<f64>,
    /// E[N²] / Z_Ω[(ab),(cd)]^{3/2}.
    pub prop46_ratio: f64,
    /// φ^{(cd)}[{u↔(cd)} ∩ {v↔(cd)}] / √(Z[u,(cd)] Z[v,(cd)] / Z[(uv),(cd)])
    /// for sampled pairs u,v on (ab), Dobrushin conditions on (cd).
    pub lemma45_ratios: Vec<f64>,
    /// Crossing probability under alternating conditions (numerator of
    /// the Prop. 4.1 ratio).
    pub alt_crossing: f64,
}

pub fn second_moment_report(
    rect: &TopologicalRectangle,
    params: ModelParams,
    mode: SecondMomentMode,
) -> Result<SecondMomentReport, FkError> {
    let domain = rect.domain();
    let ab = rect.arc_vertices(ARC_AB);
    let cd = rect.arc_vertices(ARC_CD);
    let free = WiringPartition::free();

    // Pair-connection probabilities under the free measure.
    let pair_probs: Vec<f64> = match mode {
        SecondMomentMode::Exact { cap } => {
            let mut hits = vec![0.0f64; ab.len() * cd.len()];
            let mut total = 0.0f64;
            super::enumerate_configs(domain, &free, params, cap, |view, logw| {
                let w = logw.exp();
                total += w;
                for (i, &u) in ab.iter().enumerate() {
                    for (j, &v) in cd.iter().enumerate() {
                        if view.connected_raw(&[u], &[v]) {
                            hits[i * cd.len() + j] += w;
                        }
                    }
                }
            })?;
            hits.iter().map(|h| h / total).collect()
        }
        SecondMomentMode::MonteCarlo { run } => {
            let pair_run = RunParams { purpose: "n-pairs", ..run };
            let mut probs = vec![0.0; ab.len() * cd.len()];
            // One chain pass accumulating all pair indicators.
            let counts = estimate_pair_matrix(domain, &free, params, pair_run, &ab, &cd)?;
            probs.copy_from_slice(&counts);
            probs
        }
    };

    // Moments of N with the q-weights fixed from the pass above.
    let (e_n, e_n2, p_pos) = match mode {
        SecondMomentMode::Exact { cap } => {
            let mut acc = MomentAccum::default();
            let q = &pair_probs;
            let mut total = 0.0f64;
            super::enumerate_configs(domain, &free, params, cap, |view, logw| {
                let w = logw.exp();
                total += w;
                let mut s = 0.0;
                for (i, &u) in ab.iter().enumerate() {
                    for (j, &v) in cd.iter().enumerate() {
                        if view.connected_raw(&[u], &[v]) {
                            s += q[i * cd.len() + j];
                        }
                    }
                }
                acc.add(w, s);
            })?;
            acc.finish(total)
        }
        SecondMomentMode::MonteCarlo { run } => {
            let mom_run = RunParams { purpose: "n-moments", ..run };
            let q = pair_probs.clone();
            let ab2 = ab.clone();
            let cd2 = cd.clone();
            let s_est = estimate_statistic(domain, &free, params, mom_run, |chain| {
                let uf = chain.raw_clusters();
                let mut s = 0.0;
                for (i, &u) in ab2.iter().enumerate() {
                    for (j, &v) in cd2.iter().enumerate() {
                        if uf.same(u, v) {
                            s += q[i * cd2.len() + j];
                        }
                    }
                }
                s
            })?;
            let mom2_run = RunParams { purpose: "n-moments-2", ..run };
            let q2 = pair_probs.clone();
            let ab2 = ab.clone();
            let cd2 = cd.clone();
            let s2_est = estimate_statistic(domain, &free, params, mom2_run, |chain| {
                let uf = chain.raw_clusters();
                let mut s = 0.0;
                for (i, &u) in ab2.iter().enumerate() {
                    for (j, &v) in cd2.iter().enumerate() {
                        if uf.same(u, v) {
                            s += q2[i * cd2.len() + j];
                        }
                    }
                }
                s * s
            })?;
            let pos_run = RunParams { purpose: "n-pos", ..run };
            let ab2 = ab.clone();
            let cd2 = cd.clone();
            let pos_est = estimate_event(domain, &free, params, pos_run, |chain| {
                let uf = chain.raw_clusters();
                ab2.iter().any(|&u| cd2.iter().any(|&v| uf.same(u, v)))
            })?;
            (s_est.mean, s2_est.mean, pos_est.mean)
        }
    };

    // Alternating-conditions crossing probability for Prop. 4.1.
    let alt = WiringPartition::alternating(rect);
    let alt_crossing = match mode {
        SecondMomentMode::Exact { cap } => {
            let ab2 = ab.clone();
            let cd2 = cd.clone();
            exact_probabilities(
                domain,
                &alt,
                params,
                cap,
                &mut [&mut |v: &mut ConfigView| v.connected_raw(&ab2, &cd2)],
            )?[0]
        }
        SecondMomentMode::MonteCarlo { run } => {
            let alt_run = RunParams { purpose: "n-alt", ..run };
            let ab2 = ab.clone();
            let cd2 = cd.clone();
            estimate_event(domain, &alt, params, alt_run, |chain| {
                let uf = chain.raw_clusters();
                ab2.iter().any(|&u| cd2.iter().any(|&v| uf.same(u, v)))
            })?
            .mean
        }
    };

    // Partition-function denominators.
    let net = Network::build(domain, Profile::Primal);
    let z_abcd = net
        .z_interior(&ab, &cd)
        .expect("partition function solve on a valid rectangle");
    let prop41_ratio = alt_crossing / z_abcd.sqrt();
    let prop46_ratio = e_n2 / z_abcd.powf(1.5);

    let dual = DualDomain::of(domain);
    let (prop43_ratio, cor44_ratio) = match dual.interior() {
        Some(int) => {
            let marks = interior_dual_ext_marks(rect, &dual).expect("bridge-free");
            let dual_net = Network::build(int, Profile::Dual);
            let z_ac_star = dual_net
                .z_ext(&[marks[0]], &[marks[2]])
                .expect("dual solve");
            let arc_ab_star = int.ext_arc(marks[0], marks[1]);
            let arc_cd_star = int.ext_arc(marks[2], marks[3]);
            let z_arcs_star = dual_net
                .z_ext(&arc_ab_star, &arc_cd_star)
                .expect("dual solve");
            // φ^∅[a↔c] exactly or by MC.
            let a_v = ab[0];
            let c_v = cd[0];
            let p_ac = match mode {
                SecondMomentMode::Exact { cap } => exact_probabilities(
                    domain,
                    &free,
                    params,
                    cap,
                    &mut [&mut |v: &mut ConfigView| v.connected_raw(&[a_v], &[c_v])],
                )?[0],
                SecondMomentMode::MonteCarlo { run } => {
                    let r = RunParams { purpose: "n-ac", ..run };
                    estimate_event(domain, &free, params, r, |chain| {
                        chain.raw_clusters().same(a_v, c_v)
                    })?
                    .mean
                }
            };
            (Some(p_ac / z_ac_star.sqrt()), Some(e_n / z_arcs_star))
        }
        None => (None, None),
    };

    // Lemma 4.5 two-point diagnostics under Dobrushin (cd) conditions.
    let dob_cd = WiringPartition::from_classes(vec![cd.clone()]);
    let mut lemma45_ratios = Vec::new();
    let pairs: Vec<(u32, u32)> = sample_pairs(&ab);
    for &(u, v) in &pairs {
        let p_both = match mode {
            SecondMomentMode::Exact { cap } => {
                let cd2 = cd.clone();
                exact_probabilities(
                    domain,
                    &dob_cd,
                    params,
                    cap,
                    &mut [&mut |view: &mut ConfigView| {
                        view.connected_raw(&[u], &cd2) && view.connected_raw(&[v], &cd2)
                    }],
                )?[0]
            }
            SecondMomentMode::MonteCarlo { run } => {
                let r = RunParams { purpose: "n-two-point", ..run };
                let cd2 = cd.clone();
                estimate_event(domain, &dob_cd, params, r, |chain| {
                    let uf = chain.raw_clusters();
                    cd2.iter().any(|&w| uf.same(u, w)) && cd2.iter().any(|&w| uf.same(v, w))
                })?
                .mean
            }
        };
        let z_u = net.z_interior(&[u], &cd).expect("solve");
        let z_v = net.z_interior(&[v], &cd).expect("solve");
        // (uv) ⊂ (ab): vertices of (ab) between u and v inclusive.
        let iu = ab.iter().position(|&x| x == u).unwrap();
        let iv = ab.iter().position(|&x| x == v).unwrap();
        let (lo, hi) = (iu.min(iv), iu.max(iv));
        let z_uv = net.z_interior(&ab[lo..=hi], &cd).expect("solve");
        lemma45_ratios.push(p_both / (z_u * z_v / z_uv).sqrt());
    }

    Ok(SecondMomentReport {
        pair_probs,
        n_ab: ab.len(),
        n_cd: cd.len(),
        e_n,
        e_n2,
        p_pos,
        cs_slack: p_pos - e_n * e_n / e_n2.max(f64::MIN_POSITIVE),
        prop41_ratio,
        prop43_ratio,
        cor44_ratio,
        prop46_ratio,
        lemma45_ratios,
        alt_crossing,
    })
}

fn sample_pairs(ab: &[u32]) -> Vec<(u32, u32)> {
    let n = ab.len();
    if n < 2 {
        return Vec::new();
    }
    let mut out = vec![(ab[0], ab[n - 1])];
    if n >= 3 {
        out.push((ab[0], ab[n / 2]));
        out.push((ab[n / 2], ab[n - 1]));
    }
    out
}

#[derive(Default)]
struct MomentAccum {
    w_s: f64,
    w_s2: f64,
    w_pos: f64,
}

impl MomentAccum {
    fn add(&mut self, w: f64, s: f64) {
        self.w_s += w * s;
        self.w_s2 += w * s * s;
        if s > 0.0 {
            self.w_pos += w;
        }
    }

    fn finish(&self, total: f64) -> (f64, f64, f64) {
        (self.w_s / total, self.w_s2 / total, self.w_pos / total)
    }
}

/// One sampling pass for the pair-connection probability matrix.
fn estimate_pair_matrix(
    domain: &crate::domain::DiscreteDomain,
    wiring: &WiringPartition,
    params: ModelParams,
    run: RunParams,
    ab: &[u32],
    cd: &[u32],
) -> Result<Vec<f64>, FkError> {
    use crate::rng;
    if params.q != 2.0 {
        return Err(FkError::UnsupportedQ(params.q));
    }
    let mut chain = super::SwChain::new(
        domain,
        wiring,
        params,
        rng::stream(run.seed, run.purpose, 0),
    )?;
    for _ in 0..run.burn_in {
        chain.sweep();
    }
    let mut counts = vec![0u64; ab.len() * cd.len()];
    let total = run.sweeps.max(1);
    for _ in 0..total {
        chain.sweep();
        let uf = chain.raw_clusters();
        let roots_cd: Vec<u32> = cd.iter().map(|&v| uf.find(v)).collect();
        for (i, &u) in ab.iter().enumerate() {
            let ru = uf.find(u);
            for (j, &rv) in roots_cd.iter().enumerate() {
                if ru == rv {
                    counts[i * cd.len() + j] += 1;
                }
            }
        }
    }
    Ok(counts.iter().map(|&c| c as f64 / total as f64).collect())
}

/// Both sides of the technical positivity inequality: for x_1..x_n > 0,
/// Σ_{k,m} x_k x_m / X_{km}^{1/2} ≤ (8/3) (Σ x)^{3/2}, where X_{km} sums
/// the entries between indices k and m inclusive.
pub fn lemma46_check(x: &[f64]) -> Result<(f64, f64), FkError> {
    if x.is_empty() || x.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
        return Err(FkError::NonPositiveEntry);
    }
    let n = x.len();
    // Prefix sums so X_{km} = pre[m+1] - pre[k].
    let mut pre = vec![0.0; n + 1];
    for i in 0..n {
        pre[i + 1] = pre[i] + x[i];
    }
    let mut lhs = 0.0;
    for k in 0..n {
        for m in 0..n {
            let (lo, hi) = (k.min(m), k.max(m));
            let xkm = pre[hi + 1] - pre[lo];
            lhs += x[k] * x[m] / xkm.sqrt();
        }
    }
    let rhs = (8.0 / 3.0) * pre[n].powf(1.5);
    Ok((lhs, rhs))
}
