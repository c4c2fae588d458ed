//! Exact enumeration of the FK measure on small edge sets.
//!
//! Weights are accumulated in log space with online rescaling and
//! compensated summation: 2^|E| terms spread over a wide dynamic range.

use super::{FkError, ModelParams, UnionFind, WiringPartition};
use crate::domain::DiscreteDomain;
use crate::dual::{DualDomain, DualMarks};
use crate::rect::{TopologicalRectangle, ARC_AB, ARC_CD};

pub const DEFAULT_EDGE_CAP: usize = 22;

/// Per-configuration view handed to event predicates and statistics.
pub struct ConfigView<'a> {
    domain: &'a DiscreteDomain,
    open: &'a [bool],
    raw: UnionFind,
    wired: UnionFind,
    pub o: usize,
    pub c: usize,
    pub k: usize,
}

impl<'a> ConfigView<'a> {
    pub fn open(&self, e: u32) -> bool {
        self.open[e as usize]
    }

    pub fn open_edges(&self) -> &[bool] {
        self.open
    }

    /// Connectivity in ω only.
    pub fn connected_raw(&mut self, x_set: &[u32], y_set: &[u32]) -> bool {
        set_connected(&mut self.raw, x_set, y_set)
    }

    /// Connectivity in ω ∪ ξ.
    pub fn connected_wired(&mut self, x_set: &[u32], y_set: &[u32]) -> bool {
        set_connected(&mut self.wired, x_set, y_set)
    }

    pub fn domain(&self) -> &DiscreteDomain {
        self.domain
    }
}

fn set_connected(uf: &mut UnionFind, x_set: &[u32], y_set: &[u32]) -> bool {
    y_set.iter().any(|&y| {
        let ry = uf.find(y);
        x_set.iter().any(|&x| uf.find(x) == ry)
    })
}

/// Log weight of a configuration: o ln p + c ln(1-p) + k ln q, with the
/// zero-probability cases handled explicitly.
pub fn fk_log_weight(
    domain: &DiscreteDomain,
    wiring: &WiringPartition,
    params: ModelParams,
    open: &[bool],
) -> f64 {
    let o = open.iter().filter(|&&b| b).count();
    let c = open.len() - o;
    let mut uf = UnionFind::new(domain.len());
    for class in wiring.classes() {
        for w in class.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    for (e, &(u, v)) in domain.edges().iter().enumerate() {
        if open[e] {
            uf.union(u, v);
        }
    }
    let k = uf.count_roots();
    log_weight_terms(params, o, c, k)
}

fn log_weight_terms(params: ModelParams, o: usize, c: usize, k: usize) -> f64 {
    let mut lw = (k as f64) * params.q.ln();
    if o > 0 {
        if params.p == 0.0 {
            return f64::NEG_INFINITY;
        }
        lw += (o as f64) * params.p.ln();
    }
    if c > 0 {
        if params.p == 1.0 {
            return f64::NEG_INFINITY;
        }
        lw += (c as f64) * (1.0 - params.p).ln();
    }
    lw
}

/// Unnormalized weight p^o (1-p)^c q^k of a configuration.
pub fn fk_weight(
    domain: &DiscreteDomain,
    wiring: &WiringPartition,
    params: ModelParams,
    open: &[bool],
) -> f64 {
    fk_log_weight(domain, wiring, params, open).exp()
}

/// Kahan-compensated accumulator for exp(logw - shift) sums with online
/// rescaling of the shift.
struct LogAccum {
    shift: f64,
    sum: f64,
    comp: f64,
}

impl LogAccum {
    fn new() -> Self {
        LogAccum { shift: f64::NEG_INFINITY, sum: 0.0, comp: 0.0 }
    }

    fn add(&mut self, logw: f64) {
        if logw == f64::NEG_INFINITY {
            return;
        }
        if logw > self.shift {
            let factor = if self.shift == f64::NEG_INFINITY {
                0.0
            } else {
                (self.shift - logw).exp()
            };
            self.sum *= factor;
            self.comp *= factor;
            self.shift = logw;
        }
        let term = (logw - self.shift).exp();
        let y = term - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    fn ratio_to(&self, total: &LogAccum) -> f64 {
        if self.sum == 0.0 {
            return 0.0;
        }
        (self.sum / total.sum) * (self.shift - total.shift).exp()
    }
}

/// Enumerate all configurations, invoking the visitor with the view and the
/// log weight. Returns the log partition function.
pub fn enumerate_configs<F: FnMut(&mut ConfigView, f64)>(
    domain: &DiscreteDomain,
    wiring: &WiringPartition,
    params: ModelParams,
    cap: usize,
    mut visit: F,
) -> Result<f64, FkError> {
    let ne = domain.n_edges();
    if ne > cap {
        return Err(FkError::TooManyEdges { n: ne, cap });
    }
    let nv = domain.len();
    let mut open = vec![false; ne];
    let mut total = LogAccum::new();
    let mut raw = UnionFind::new(nv);
    let mut wired = UnionFind::new(nv);
    for mask in 0u64..(1u64 << ne) {
        let mut o = 0usize;
        for e in 0..ne {
            let b = (mask >> e) & 1 == 1;
            open[e] = b;
            o += b as usize;
        }
        raw.reset(nv);
        wired.reset(nv);
        for class in wiring.classes() {
            for w in class.windows(2) {
                wired.union(w[0], w[1]);
            }
        }
        for (e, &(u, v)) in domain.edges().iter().enumerate() {
            if open[e] {
                raw.union(u, v);
                wired.union(u, v);
            }
        }
        let k = wired.count_roots();
        let logw = log_weight_terms(params, o, ne - o, k);
        total.add(logw);
        let mut view = ConfigView {
            domain,
            open: &open,
            raw: raw.clone(),
            wired: wired.clone(),
            o,
            c: ne - o,
            k,
        };
        visit(&mut view, logw);
    }
    Ok(total.shift + total.sum.ln())
}

/// Exact probabilities of event predicates under the measure.
pub fn exact_probabilities(
    domain: &DiscreteDomain,
    wiring: &WiringPartition,
    params: ModelParams,
    cap: usize,
    events: &mut [&mut dyn FnMut(&mut ConfigView) -> bool],
) -> Result<Vec<f64>, FkError> {
    let mut total = LogAccum::new();
    let mut hits: Vec<LogAccum> = events.iter().map(|_| LogAccum::new()).collect();
    {
        let hits = &mut hits;
        let total = &mut total;
        enumerate_configs(domain, wiring, params, cap, |view, logw| {
            total.add(logw);
            for (i, ev) in events.iter_mut().enumerate() {
                if ev(view) {
                    hits[i].add(logw);
                }
            }
        })?;
    }
    Ok(hits.iter().map(|h| h.ratio_to(&total)).collect())
}

/// Result of the exact planar-duality check.
#[derive(Clone, Debug)]
pub struct DualityReport {
    /// 1 - φ^{∂Ω}[(ab) ↔ (cd)], primal enumeration under wired conditions.
    pub primal_no_crossing: f64,
    /// φ^∅_{Ω*}[(b* c*_r) ↔ (d* a*_r)], dual weights on the coupled ω*.
    pub dual_crossing: f64,
    pub residual: f64,
    /// Configurations where the two events disagree (must be zero).
    pub event_mismatches: usize,
}

/// Exact verification of the duality identity on a bridge-free rectangle:
/// couples each primal configuration with its dual (e* open iff e closed),
/// weighs the primal side with wired and the dual side with free boundary
/// conditions, and compares the two crossing probabilities.
pub fn dual_identity_check(
    rect: &TopologicalRectangle,
    params: ModelParams,
    cap: usize,
) -> Result<DualityReport, FkError> {
    let domain = rect.domain();
    if domain.has_bridges() {
        return Err(FkError::HasBridges);
    }
    let ne = domain.n_edges();
    if ne > cap {
        return Err(FkError::TooManyEdges { n: ne, cap });
    }
    let dual = DualDomain::of(domain);
    let marks = DualMarks::of(rect, &dual);
    let arc_bc = marks.arc_bstar_cstar_r(&dual);
    let arc_da = marks.arc_dstar_astar_r(&dual);
    let ab = rect.arc_vertices(ARC_AB);
    let cd = rect.arc_vertices(ARC_CD);
    let wired = WiringPartition::wired(domain);

    // Dual parameter: p*/(1-p*) = q(1-p)/p, equal to p at the self-dual
    // point √q/(√q+1).
    let dual_params = {
        let r = params.q * (1.0 - params.p) / params.p;
        ModelParams { p: r / (1.0 + r), q: params.q }
    };
    let n_dual = dual.n_verts();
    let mut dual_uf = UnionFind::new(n_dual);
    let mut primal_total = LogAccum::new();
    let mut primal_nc = LogAccum::new();
    let mut dual_total = LogAccum::new();
    let mut dual_cross = LogAccum::new();
    let mut mismatches = 0usize;

    enumerate_configs(domain, &wired, params, cap, |view, logw| {
        let no_cross = !view.connected_raw(&ab, &cd);
        primal_total.add(logw);
        if no_cross {
            primal_nc.add(logw);
        }
        // Coupled dual configuration: e* open iff e closed.
        dual_uf.reset(n_dual);
        let mut o_star = 0usize;
        for e in 0..ne as u32 {
            if !view.open(e) {
                let (f, g) = dual.dual_edge(e);
                dual_uf.union(f, g);
                o_star += 1;
            }
        }
        let k_star = dual_uf.count_roots();
        let dual_logw = log_weight_terms(dual_params, o_star, ne - o_star, k_star);
        let dcross = set_connected(&mut dual_uf, &arc_bc, &arc_da);
        dual_total.add(dual_logw);
        if dcross {
            dual_cross.add(dual_logw);
        }
        if no_cross != dcross {
            mismatches += 1;
        }
    })?;

    let primal_no_crossing = primal_nc.ratio_to(&primal_total);
    let dual_crossing = dual_cross.ratio_to(&dual_total);
    Ok(DualityReport {
        primal_no_crossing,
        dual_crossing,
        residual: (primal_no_crossing - dual_crossing).abs(),
        event_mismatches: mismatches,
    })
}
