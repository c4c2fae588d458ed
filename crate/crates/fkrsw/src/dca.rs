//! Discrete complex analysis: conductance networks on domain closures,
//! random-walk partition functions, extremal length and separators.
//!
//! The random walk lives on the closure of a domain: its vertices plus one
//! abstract external vertex per oriented external edge. Conductances follow
//! the fixed profile w = 1 on interior edges and w = 2(√2-1) on external
//! edges (primal profile), or w = 1 everywhere (dual profile); external
//! vertices carry mass 2√2+1 regardless.
//!
//! For x in the domain, Z[x,E] = (2√2+1)⁻¹ times the probability that the
//! walk started at x exits through E. Values on external vertices extend by
//! the factor w_{x x_ext}/m_{x_ext}, which is the weight of forcing the
//! first step of the walk; this choice keeps Z symmetric in its arguments.

use crate::domain::DiscreteDomain;
use crate::dual::{interior_dual_ext_marks, DualDomain};
use crate::rect::{TopologicalRectangle, ARC_AB, ARC_CD};
use crate::{M_EXT, W_EXT};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum DcaError {
    #[error("linear solver did not converge (residual {residual:e} after {iters} iterations)")]
    SolverDivergence { residual: f64, iters: usize },
    #[error("empty target set")]
    EmptyTarget,
    #[error("degenerate electrodes: {0}")]
    DegenerateElectrodes(&'static str),
    #[error("no valid cross-cut on the search grid")]
    NoValidCut,
    #[error("operation requires a bridge-free domain")]
    RequiresBridgeFree,
}

/// Conductance profile of a network.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// w = 1 on interior edges, 2(√2-1) on external edges.
    Primal,
    /// w = 1 everywhere (used on dual domains).
    Dual,
}

/// Conductance network on the closure of a domain.
#[derive(Clone, Debug)]
pub struct Network {
    n: usize,
    /// CSR adjacency over interior vertices: (neighbor, conductance).
    offsets: Vec<u32>,
    nbrs: Vec<(u32, f64)>,
    /// Per external vertex (aligned with the domain's external cycle):
    /// attached interior vertex and conductance.
    ext: Vec<(u32, f64)>,
    /// Interior masses: sum of all incident conductances.
    mass: Vec<f64>,
}

impl Network {
    pub fn build(domain: &DiscreteDomain, profile: Profile) -> Network {
        let n = domain.len();
        let w_int = 1.0;
        let w_ext = match profile {
            Profile::Primal => W_EXT,
            Profile::Dual => 1.0,
        };
        let mut deg = vec![0u32; n];
        for &(u, v) in domain.edges() {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let mut offsets = vec![0u32; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + deg[i];
        }
        let mut nbrs = vec![(0u32, 0.0); offsets[n] as usize];
        let mut fill = offsets.clone();
        for &(u, v) in domain.edges() {
            nbrs[fill[u as usize] as usize] = (v, w_int);
            fill[u as usize] += 1;
            nbrs[fill[v as usize] as usize] = (u, w_int);
            fill[v as usize] += 1;
        }
        let ext: Vec<(u32, f64)> =
            domain.ext_cycle().iter().map(|e| (e.base, w_ext)).collect();
        let mut mass = vec![0.0; n];
        for i in 0..n {
            for k in offsets[i]..offsets[i + 1] {
                mass[i] += nbrs[k as usize].1;
            }
        }
        for &(b, w) in &ext {
            mass[b as usize] += w;
        }
        Network { n, offsets, nbrs, ext, mass }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn mass(&self, v: u32) -> f64 {
        self.mass[v as usize]
    }

    pub fn ext_conductance(&self, e: u32) -> f64 {
        self.ext[e as usize].1
    }

    pub fn ext_base(&self, e: u32) -> u32 {
        self.ext[e as usize].0
    }

    /// Multiply by A = D - W on the interior block.
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = self.mass[i] * x[i];
            for k in self.offsets[i]..self.offsets[i + 1] {
                let (j, w) = self.nbrs[k as usize];
                acc -= w * x[j as usize];
            }
            out[i] = acc;
        }
    }

    /// Preconditioned conjugate gradient for (D - W) x = b.
    fn solve(&self, b: &[f64]) -> Result<Vec<f64>, DcaError> {
        let n = self.n;
        let cap = 50 * n + 50;
        let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if bnorm == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let mut x = vec![0.0; n];
        let mut r = b.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&self.mass).map(|(ri, m)| ri / m).collect();
        let mut p = z.clone();
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let mut ap = vec![0.0; n];
        let mut residual = 1.0;
        for _ in 0..cap {
            self.apply(&p, &mut ap);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if pap <= 0.0 {
                break;
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            residual = r.iter().map(|v| v * v).sum::<f64>().sqrt() / bnorm;
            if residual <= 1e-13 {
                return Ok(x);
            }
            for i in 0..n {
                z[i] = r[i] / self.mass[i];
            }
            let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        if residual <= 1e-10 {
            Ok(x)
        } else {
            Err(DcaError::SolverDivergence { residual, iters: cap })
        }
    }

    /// Dense Gaussian elimination, used as a cross-check on small systems.
    pub fn solve_dense(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = self.mass[i];
            for k in self.offsets[i]..self.offsets[i + 1] {
                let (j, w) = self.nbrs[k as usize];
                a[i * n + j as usize] -= w;
            }
        }
        let mut rhs = b.to_vec();
        gaussian_solve(&mut a, &mut rhs, n);
        rhs
    }

    /// Hitting probability of the external target set before the rest of the
    /// external boundary, per interior vertex.
    pub fn hit_probability(&self, targets: &[u32]) -> Result<Vec<f64>, DcaError> {
        if targets.is_empty() {
            return Err(DcaError::EmptyTarget);
        }
        let mut b = vec![0.0; self.n];
        for &e in targets {
            let (base, w) = self.ext[e as usize];
            b[base as usize] += w;
        }
        self.solve(&b)
    }

    /// Harmonic field Z[·, E] for an external target set E: interior values
    /// plus the extension to every external vertex.
    pub fn harmonic_measure(&self, targets: &[u32]) -> Result<HarmonicField, DcaError> {
        let h = self.hit_probability(targets)?;
        let interior: Vec<f64> = h.iter().map(|v| v / M_EXT).collect();
        let exterior: Vec<f64> = self
            .ext
            .iter()
            .map(|&(base, w)| (w / M_EXT) * interior[base as usize])
            .collect();
        let mut out = vec![0.0; self.n];
        self.apply(&h, &mut out);
        let mut b = vec![0.0; self.n];
        for &e in targets {
            let (base, w) = self.ext[e as usize];
            b[base as usize] += w;
        }
        let residual = out
            .iter()
            .zip(&b)
            .map(|(a, c)| (a - c).abs())
            .fold(0.0f64, f64::max);
        Ok(HarmonicField { interior, exterior, residual })
    }

    /// Z[X, Y] for external vertex sets X, Y: one harmonic solve for Y,
    /// summed over X with the first-step extension.
    pub fn z_ext(&self, x_set: &[u32], y_set: &[u32]) -> Result<f64, DcaError> {
        let h = self.hit_probability(y_set)?;
        let mut total = 0.0;
        for &e in x_set {
            let (base, w) = self.ext[e as usize];
            total += (w / M_EXT) * (h[base as usize] / M_EXT);
        }
        Ok(total)
    }

    /// Z[x, Y] for an interior vertex and external set.
    pub fn z_point_ext(&self, x: u32, y_set: &[u32]) -> Result<f64, DcaError> {
        let h = self.hit_probability(y_set)?;
        Ok(h[x as usize] / M_EXT)
    }

    /// Green-route partition function Z[X, Y] for interior vertex sets:
    /// solves (D - W) z = 1_Y so that z(x) = Z[x, Y].
    pub fn z_interior(&self, x_set: &[u32], y_set: &[u32]) -> Result<f64, DcaError> {
        if y_set.is_empty() || x_set.is_empty() {
            return Err(DcaError::EmptyTarget);
        }
        let z = self.green_field(y_set)?;
        Ok(x_set.iter().map(|&v| z[v as usize]).sum())
    }

    /// Green field z(x) = Z[x, Y] for an interior target set.
    pub fn green_field(&self, y_set: &[u32]) -> Result<Vec<f64>, DcaError> {
        let mut b = vec![0.0; self.n];
        for &v in y_set {
            b[v as usize] += 1.0;
        }
        self.solve(&b)
    }
}

fn gaussian_solve(a: &mut [f64], b: &mut [f64], n: usize) {
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                a[i * n + col].abs().partial_cmp(&a[j * n + col].abs()).unwrap()
            })
            .unwrap();
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for row in (col + 1)..n {
            let f = a[row * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in (col + 1)..n {
            acc -= a[col * n + k] * b[k];
        }
        b[col] = acc / a[col * n + col];
    }
}

/// A solved harmonic field Z[·, E].
#[derive(Clone, Debug)]
pub struct HarmonicField {
    /// Z[x, E] for interior vertices.
    pub interior: Vec<f64>,
    /// Z[x_ext, E] for external vertices, via the first-step extension.
    pub exterior: Vec<f64>,
    pub residual: f64,
}

/// Effective resistance between two terminal vertex sets of a weighted
/// graph; each terminal set is shorted to a single node.
pub fn effective_resistance(
    n: usize,
    edges: &[(u32, u32, f64)],
    s_set: &[u32],
    t_set: &[u32],
) -> Result<f64, DcaError> {
    if s_set.is_empty() || t_set.is_empty() {
        return Err(DcaError::DegenerateElectrodes("empty terminal set"));
    }
    let mut role = vec![0u8; n]; // 0 free, 1 source (0V), 2 sink (1V)
    for &v in s_set {
        role[v as usize] = 1;
    }
    for &v in t_set {
        if role[v as usize] == 1 {
            // The electrodes share a vertex: zero resistance.
            return Ok(0.0);
        }
        role[v as usize] = 2;
    }
    let free_ids: Vec<u32> = (0..n as u32).filter(|&v| role[v as usize] == 0).collect();
    let mut reindex = vec![u32::MAX; n];
    for (i, &v) in free_ids.iter().enumerate() {
        reindex[v as usize] = i as u32;
    }
    let nf = free_ids.len();
    let mut diag = vec![0.0; nf];
    let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); nf];
    let mut rhs = vec![0.0; nf];
    for &(u, v, w) in edges {
        let (ru, rv) = (role[u as usize], role[v as usize]);
        match (ru, rv) {
            (0, 0) => {
                let (iu, iv) = (reindex[u as usize] as usize, reindex[v as usize] as usize);
                diag[iu] += w;
                diag[iv] += w;
                rows[iu].push((iv as u32, w));
                rows[iv].push((iu as u32, w));
            }
            (0, t) => {
                let iu = reindex[u as usize] as usize;
                diag[iu] += w;
                if t == 2 {
                    rhs[iu] += w;
                }
            }
            (t, 0) => {
                let iv = reindex[v as usize] as usize;
                diag[iv] += w;
                if t == 2 {
                    rhs[iv] += w;
                }
            }
            _ => {}
        }
    }
    let pot = if nf > 0 { cg_generic(&diag, &rows, &rhs)? } else { Vec::new() };
    let potential = |v: u32| -> f64 {
        match role[v as usize] {
            1 => 0.0,
            2 => 1.0,
            _ => pot[reindex[v as usize] as usize],
        }
    };
    let mut into_t = 0.0;
    let mut out_s = 0.0;
    for &(u, v, w) in edges {
        let (ru, rv) = (role[u as usize], role[v as usize]);
        if ru == 2 && rv != 2 {
            into_t += w * (1.0 - potential(v));
        } else if rv == 2 && ru != 2 {
            into_t += w * (1.0 - potential(u));
        }
        if ru == 1 && rv != 1 {
            out_s += w * potential(v);
        } else if rv == 1 && ru != 1 {
            out_s += w * potential(u);
        }
    }
    if into_t <= 0.0 {
        return Err(DcaError::DegenerateElectrodes("no current path"));
    }
    debug_assert!(
        (into_t - out_s).abs() <= 1e-7 * into_t.max(1.0),
        "Kirchhoff mismatch {into_t} vs {out_s}"
    );
    Ok(1.0 / into_t)
}

fn cg_generic(
    diag: &[f64],
    rows: &[Vec<(u32, f64)>],
    b: &[f64],
) -> Result<Vec<f64>, DcaError> {
    let n = diag.len();
    let apply = |x: &[f64], out: &mut [f64]| {
        for i in 0..n {
            let mut acc = diag[i] * x[i];
            for &(j, w) in &rows[i] {
                acc -= w * x[j as usize];
            }
            out[i] = acc;
        }
    };
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let cap = 50 * n + 50;
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(ri, m)| ri / m).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, c)| a * c).sum();
    let mut ap = vec![0.0; n];
    let mut residual = 1.0;
    for _ in 0..cap {
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, c)| a * c).sum();
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        residual = r.iter().map(|v| v * v).sum::<f64>().sqrt() / bnorm;
        if residual <= 1e-13 {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, c)| a * c).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    if residual <= 1e-10 {
        Ok(x)
    } else {
        Err(DcaError::SolverDivergence { residual, iters: cap })
    }
}

/// Extremal length variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EllVariant {
    /// Resistance between (ab) and (cd) in Ω with unit conductances.
    Omega,
    /// Resistance between the external arcs in the closure, profile
    /// conductances.
    Closure,
    /// Resistance between the dual external arcs in the extension of the
    /// interior dual domain, unit conductances.
    Dual,
}

/// Discrete extremal length of a topological rectangle.
pub fn extremal_length(rect: &TopologicalRectangle, variant: EllVariant) -> Result<f64, DcaError> {
    let dom = rect.domain();
    match variant {
        EllVariant::Omega => {
            let edges: Vec<(u32, u32, f64)> =
                dom.edges().iter().map(|&(u, v)| (u, v, 1.0)).collect();
            let s = rect.arc_vertices(ARC_AB);
            let t = rect.arc_vertices(ARC_CD);
            effective_resistance(dom.len(), &edges, &s, &t)
        }
        EllVariant::Closure => {
            let n = dom.len();
            let mut edges: Vec<(u32, u32, f64)> =
                dom.edges().iter().map(|&(u, v)| (u, v, 1.0)).collect();
            for (i, e) in dom.ext_cycle().iter().enumerate() {
                edges.push((e.base, (n + i) as u32, W_EXT));
            }
            let s: Vec<u32> =
                rect.ext_arc(ARC_AB).iter().map(|&e| (n + e as usize) as u32).collect();
            let t: Vec<u32> =
                rect.ext_arc(ARC_CD).iter().map(|&e| (n + e as usize) as u32).collect();
            effective_resistance(n + dom.n_ext(), &edges, &s, &t)
        }
        EllVariant::Dual => {
            let dual = DualDomain::of(dom);
            let int = dual.interior().ok_or(DcaError::RequiresBridgeFree)?;
            let marks = interior_dual_ext_marks(rect, &dual)
                .map_err(|_| DcaError::RequiresBridgeFree)?;
            let n = int.len();
            let mut edges: Vec<(u32, u32, f64)> =
                int.edges().iter().map(|&(u, v)| (u, v, 1.0)).collect();
            for (i, e) in int.ext_cycle().iter().enumerate() {
                edges.push((e.base, (n + i) as u32, 1.0));
            }
            let arc = |from: u32, to: u32| -> Vec<u32> {
                int.ext_arc(from, to).iter().map(|&e| (n + e as usize) as u32).collect()
            };
            let s = arc(marks[0], marks[1]);
            let t = arc(marks[2], marks[3]);
            effective_resistance(n + int.n_ext(), &edges, &s, &t)
        }
    }
}

/// A discrete cross-cut separating two external arcs.
#[derive(Clone, Debug)]
pub struct CrossCut {
    pub k: f64,
    /// Primal edge ids between the two sides.
    pub cut_edges: Vec<u32>,
    pub omega_a: Vec<u32>,
    pub omega_b: Vec<u32>,
    /// Z_{Ω_A}[A, L].
    pub z_a: f64,
    /// Z_{Ω_B}[L, B].
    pub z_b: f64,
    /// Ratio field Z[u;A] / Z[u;B] per interior vertex of the host domain.
    pub ratio: Vec<f64>,
}

/// Search the geometric grid k = 2^{j/4} over [2⁻²⁰, 2²⁰] for the cross-cut
/// whose Z_{Ω_A}[A, L_k] lands closest to ζ from below. Ties
/// Z[u;A] = k Z[u;B] resolve to Ω_A. When no cut lands below ζ, the closest
/// valid cut from above is returned.
pub fn find_separator(
    domain: &DiscreteDomain,
    net: &Network,
    a_set: &[u32],
    b_set: &[u32],
    zeta: f64,
) -> Result<CrossCut, DcaError> {
    let h_a = net.hit_probability(a_set)?;
    let h_b = net.hit_probability(b_set)?;
    let ratio: Vec<f64> = h_a.iter().zip(&h_b).map(|(a, b)| a / b).collect();
    let a_bases: Vec<u32> = a_set.iter().map(|&e| net.ext_base(e)).collect();
    let b_bases: Vec<u32> = b_set.iter().map(|&e| net.ext_base(e)).collect();

    let mut best: Option<(f64, CrossCut)> = None;
    for j in -80..=80 {
        let k = (2f64).powf(j as f64 / 4.0);
        let in_a: Vec<bool> = (0..domain.len()).map(|i| h_a[i] >= k * h_b[i]).collect();
        if let Some(cut) = try_cut(domain, &in_a, &a_bases, &b_bases, a_set, b_set, k)? {
            let penalty =
                if cut.z_a <= zeta { zeta - cut.z_a } else { 1e6 + (cut.z_a - zeta) };
            if best.as_ref().map_or(true, |(p, _)| penalty < *p) {
                best = Some((penalty, CrossCut { ratio: ratio.clone(), ..cut }));
            }
        }
    }
    best.map(|(_, c)| c).ok_or(DcaError::NoValidCut)
}

/// The cross-cut at a fixed threshold k, when both sides are nonempty and
/// connected.
pub fn cross_cut_at(
    domain: &DiscreteDomain,
    net: &Network,
    a_set: &[u32],
    b_set: &[u32],
    k: f64,
) -> Result<CrossCut, DcaError> {
    let h_a = net.hit_probability(a_set)?;
    let h_b = net.hit_probability(b_set)?;
    let ratio: Vec<f64> = h_a.iter().zip(&h_b).map(|(a, b)| a / b).collect();
    let a_bases: Vec<u32> = a_set.iter().map(|&e| net.ext_base(e)).collect();
    let b_bases: Vec<u32> = b_set.iter().map(|&e| net.ext_base(e)).collect();
    let in_a: Vec<bool> = (0..domain.len()).map(|i| h_a[i] >= k * h_b[i]).collect();
    match try_cut(domain, &in_a, &a_bases, &b_bases, a_set, b_set, k)? {
        Some(cut) => Ok(CrossCut { ratio, ..cut }),
        None => Err(DcaError::NoValidCut),
    }
}

fn try_cut(
    domain: &DiscreteDomain,
    in_a: &[bool],
    a_bases: &[u32],
    b_bases: &[u32],
    a_set: &[u32],
    b_set: &[u32],
    k: f64,
) -> Result<Option<CrossCut>, DcaError> {
    let side_a: Vec<u32> = (0..domain.len() as u32).filter(|&v| in_a[v as usize]).collect();
    let side_b: Vec<u32> = (0..domain.len() as u32).filter(|&v| !in_a[v as usize]).collect();
    if side_a.is_empty() || side_b.is_empty() {
        return Ok(None);
    }
    if !a_bases.iter().all(|&v| in_a[v as usize])
        || !b_bases.iter().all(|&v| !in_a[v as usize])
    {
        return Ok(None);
    }
    if !is_connected(domain, &side_a) || !is_connected(domain, &side_b) {
        return Ok(None);
    }
    let sub_a = match domain.subdomain(&side_a) {
        Ok(d) => d,
        Err(_) => return Ok(None),
    };
    let sub_b = match domain.subdomain(&side_b) {
        Ok(d) => d,
        Err(_) => return Ok(None),
    };
    let mut cut_edges = Vec::new();
    for (eid, &(u, v)) in domain.edges().iter().enumerate() {
        if in_a[u as usize] != in_a[v as usize] {
            cut_edges.push(eid as u32);
        }
    }
    let z_a = {
        let net_a = Network::build(&sub_a, Profile::Primal);
        let a_ids = map_ext(domain, &sub_a, a_set);
        let l_ids = cut_ext_ids(domain, &sub_a, &cut_edges, in_a, true);
        match (a_ids, l_ids) {
            (Some(a), Some(l)) if !a.is_empty() && !l.is_empty() => net_a.z_ext(&a, &l)?,
            _ => return Ok(None),
        }
    };
    let z_b = {
        let net_b = Network::build(&sub_b, Profile::Primal);
        let b_ids = map_ext(domain, &sub_b, b_set);
        let l_ids = cut_ext_ids(domain, &sub_b, &cut_edges, in_a, false);
        match (b_ids, l_ids) {
            (Some(b), Some(l)) if !b.is_empty() && !l.is_empty() => net_b.z_ext(&l, &b)?,
            _ => return Ok(None),
        }
    };
    Ok(Some(CrossCut {
        k,
        cut_edges,
        omega_a: side_a,
        omega_b: side_b,
        z_a,
        z_b,
        ratio: Vec::new(),
    }))
}

/// Map external edges of the host domain into a subdomain by base point and
/// direction. None if any of them is not external to the subdomain.
fn map_ext(host: &DiscreteDomain, sub: &DiscreteDomain, ids: &[u32]) -> Option<Vec<u32>> {
    let mut out = Vec::with_capacity(ids.len());
    for &e in ids {
        let ee = host.ext_edge(e);
        let base = host.point(ee.base);
        let sid = sub
            .ext_cycle()
            .iter()
            .position(|se| sub.point(se.base) == base && se.dir == ee.dir)?;
        out.push(sid as u32);
    }
    Some(out)
}

fn cut_ext_ids(
    host: &DiscreteDomain,
    sub: &DiscreteDomain,
    cut_edges: &[u32],
    in_a: &[bool],
    side_a: bool,
) -> Option<Vec<u32>> {
    let mut out = Vec::new();
    for &eid in cut_edges {
        let (u, v) = host.edge_endpoints(eid);
        let (from, to) = if in_a[u as usize] == side_a { (u, v) } else { (v, u) };
        let pf = host.point(from);
        let pto = host.point(to);
        let dir = crate::geom::DIRS.into_iter().find(|d| pf.step(*d) == pto)?;
        let sid = sub
            .ext_cycle()
            .iter()
            .position(|se| sub.point(se.base) == pf && se.dir == dir)?;
        out.push(sid as u32);
    }
    Some(out)
}

fn is_connected(domain: &DiscreteDomain, set: &[u32]) -> bool {
    if set.is_empty() {
        return false;
    }
    let mut inset = vec![false; domain.len()];
    for &v in set {
        inset[v as usize] = true;
    }
    let mut seen = vec![false; domain.len()];
    let mut stack = vec![set[0]];
    seen[set[0] as usize] = true;
    let mut count = 1usize;
    while let Some(v) = stack.pop() {
        for d in crate::geom::DIRS {
            if domain.edge_id(v, d).is_some() {
                let w = domain.vertex_at(domain.point(v).step(d)).unwrap();
                if inset[w as usize] && !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
    }
    count == set.len()
}

/// Per-rectangle record of the uniform-comparability diagnostics.
#[derive(Clone, Debug)]
pub struct DcaReport {
    pub ell_omega: f64,
    pub ell_closure: f64,
    pub ell_dual: Option<f64>,
    /// ℓ(ab,cd) · ℓ(bc,da), both closure variant.
    pub self_duality_product: f64,
    /// Z[a,(cd)] / sqrt(Z[a,c] Z[a,d] / Z[c,d]), external marks.
    pub triangle_ratio: f64,
    /// Z[(ab),(cd)] / sqrt(Z[a,c] Z[b,d] / (Z[a,b] Z[c,d])), external arcs.
    pub rectangle_ratio: f64,
    /// Z[(ab),(cd)] between the external arcs.
    pub z_ext_abcd: f64,
    /// Z[(ab),(cd)] between the boundary arcs themselves (Green route).
    pub z_int_abcd: f64,
    /// Separator factorization ratio Z[A,B] / (Z_{Ω_A}[A,L]·Z_{Ω_B}[L,B]).
    pub separator_ratio: Option<f64>,
    pub separator_k: Option<f64>,
}

pub fn dca_inequality_report(rect: &TopologicalRectangle) -> Result<DcaReport, DcaError> {
    let dom = rect.domain();
    let net = Network::build(dom, Profile::Primal);
    let ell_omega = extremal_length(rect, EllVariant::Omega)?;
    let ell_closure = extremal_length(rect, EllVariant::Closure)?;
    let ell_dual = extremal_length(rect, EllVariant::Dual).ok();
    let rotated = rect.rotated();
    let ell_rot = extremal_length(&rotated, EllVariant::Closure)?;
    let self_duality_product = ell_closure * ell_rot;

    let m = |i: usize| vec![rect.ext_mark(i)];
    let (ma, mb, mc, md) = (m(0), m(1), m(2), m(3));
    let arc_ab = rect.ext_arc(ARC_AB);
    let arc_cd = rect.ext_arc(ARC_CD);
    let z = |x: &[u32], y: &[u32]| net.z_ext(x, y);
    let z_ac = z(&ma, &mc)?;
    let z_ad = z(&ma, &md)?;
    let z_cd_k = z(&mc, &md)?;
    let z_ab_k = z(&ma, &mb)?;
    let z_bd = z(&mb, &md)?;
    let z_a_cd = z(&ma, &arc_cd)?;
    let z_ext_abcd = z(&arc_ab, &arc_cd)?;
    let triangle_ratio = z_a_cd / (z_ac * z_ad / z_cd_k).sqrt();
    let rectangle_ratio = z_ext_abcd / (z_ac * z_bd / (z_ab_k * z_cd_k)).sqrt();

    let ab_verts = rect.arc_vertices(ARC_AB);
    let cd_verts = rect.arc_vertices(ARC_CD);
    let z_int_abcd = net.z_interior(&ab_verts, &cd_verts)?;

    let (separator_ratio, separator_k) =
        match find_separator(dom, &net, &arc_ab, &arc_cd, z_ext_abcd.sqrt().min(1.0)) {
            Ok(cut) => (Some(z_ext_abcd / (cut.z_a * cut.z_b)), Some(cut.k)),
            Err(_) => (None, None),
        };

    Ok(DcaReport {
        ell_omega,
        ell_closure,
        ell_dual,
        self_duality_product,
        triangle_ratio,
        rectangle_ratio,
        z_ext_abcd,
        z_int_abcd,
        separator_ratio,
        separator_k,
    })
}

/// Monte-Carlo random walk exit sampler, the independent oracle for the
/// harmonic solver: frequency of exits through the target set.
pub fn rw_exit_frequency(
    domain: &DiscreteDomain,
    net: &Network,
    start: u32,
    targets: &[u32],
    walks: usize,
    rng: &mut impl rand::Rng,
) -> f64 {
    let mut is_target = vec![false; domain.n_ext()];
    for &t in targets {
        is_target[t as usize] = true;
    }
    let mut hits = 0usize;
    for _ in 0..walks {
        let mut v = start;
        'walk: loop {
            let m = net.mass(v);
            let mut pick = rng.gen::<f64>() * m;
            let p = domain.point(v);
            for d in crate::geom::DIRS {
                if domain.edge_id(v, d).is_some() {
                    if pick < 1.0 {
                        v = domain.vertex_at(p.step(d)).unwrap();
                        continue 'walk;
                    }
                    pick -= 1.0;
                }
            }
            for &vi in domain.visits_of(v) {
                for &e in &domain.boundary_visits()[vi as usize].exts {
                    let w = net.ext_conductance(e);
                    if pick < w {
                        if is_target[e as usize] {
                            hits += 1;
                        }
                        break 'walk;
                    }
                    pick -= w;
                }
            }
            // Numerical slack at the end of the mass: exit via the last
            // external edge of the vertex.
            let vi = *domain.visits_of(v).last().unwrap();
            let e = *domain.boundary_visits()[vi as usize].exts.last().unwrap();
            if is_target[e as usize] {
                hits += 1;
            }
            break;
        }
    }
    hits as f64 / walks as f64
}
