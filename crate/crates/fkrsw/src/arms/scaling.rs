//! Arm-probability estimation and the scaling experiments: exponent fits,
//! quasi-multiplicativity ratios, and the five-arm landing-zone density.
//!
//! Infinite-volume probabilities are approximated by sampling in the box
//! Λ_{mult·N} under both free and wired boundary conditions; the two runs
//! bracket the infinite-volume value.

use super::geometry::{ArmLattice, BoxOmega, Geometry, Omega};
use super::greedy::Disjointness;
use super::{arms_occur, flow::zone_edge_disjoint};
use crate::domain::DiscreteDomain;
use crate::fk::{estimate_event, Estimate, ModelParams, RunParams, WiringPartition};
use crate::geom::{pt, Pt};

/// An arm event specification.
#[derive(Clone, Debug)]
pub struct ArmSpec {
    pub word: Vec<u8>,
    pub n: i32,
    pub big_n: i32,
    pub geometry: Geometry,
    pub disjointness: Disjointness,
}

impl ArmSpec {
    pub fn word_string(&self) -> String {
        self.word.iter().map(|b| char::from(b'0' + b)).collect()
    }
}

/// Boundary conditions of the simulation box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bc {
    Free,
    Wired,
}

impl Bc {
    pub fn label(self) -> &'static str {
        match self {
            Bc::Free => "free",
            Bc::Wired => "wired",
        }
    }
}

/// Square box Λ_m as a domain.
pub fn box_domain(m: i32) -> DiscreteDomain {
    DiscreteDomain::from_cells(
        (-m..=m).flat_map(|x| (-m..=m).map(move |y| pt(x, y))),
    )
    .expect("box is a valid domain")
}

/// Estimate φ[A_σ(n,N)] in the box Λ_{mult·N} under the given conditions.
pub fn arm_probability(
    spec: &ArmSpec,
    bc: Bc,
    run: RunParams,
    box_mult: i32,
) -> Estimate {
    let m = box_mult.max(2) * spec.big_n;
    let domain = box_domain(m);
    let wiring = match bc {
        Bc::Free => WiringPartition::free(),
        Bc::Wired => WiringPartition::wired(&domain),
    };
    let lat = ArmLattice::new(spec.n, spec.big_n, spec.geometry);
    let word = spec.word.clone();
    let mode = spec.disjointness;
    estimate_event(&domain, &wiring, ModelParams::critical(), run, move |chain| {
        let omega = BoxOmega { domain: chain.domain(), open: chain.open_edges() };
        arms_occur(&lat, &omega, &word, mode)
    })
    .expect("q = 2")
}

/// One estimate row of a scan.
#[derive(Clone, Debug)]
pub struct ScanRow {
    pub sigma: String,
    pub n: i32,
    pub big_n: i32,
    pub bc: &'static str,
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl ScanRow {
    fn of(spec: &ArmSpec, bc: Bc, est: &Estimate) -> ScanRow {
        ScanRow {
            sigma: spec.word_string(),
            n: spec.n,
            big_n: spec.big_n,
            bc: bc.label(),
            mean: est.mean,
            stderr: est.stderr,
            samples: est.n_sweeps,
            seed: est.seed,
        }
    }
}

/// Exponent scan: estimates across the radius grid under both boundary
/// proxies, with a weighted log-log slope fit per proxy.
#[derive(Clone, Debug)]
pub struct ExponentScan {
    pub rows: Vec<ScanRow>,
    /// (slope, stderr) per boundary condition, fit of log φ on log(n/N).
    pub slope_free: (f64, f64),
    pub slope_wired: (f64, f64),
}

/// Weighted least squares fit of log y against log x; weights from the
/// relative errors. Returns (slope, slope standard error).
pub fn slope_fit(points: &[(f64, f64, f64)]) -> (f64, f64) {
    // points: (x, y, sigma_y); fit log y = a + b log x.
    let data: Vec<(f64, f64, f64)> = points
        .iter()
        .filter(|(x, y, _)| *x > 0.0 && *y > 0.0)
        .map(|&(x, y, sy)| (x.ln(), y.ln(), (sy / y).max(1e-9)))
        .collect();
    let wsum: f64 = data.iter().map(|(_, _, s)| 1.0 / (s * s)).sum();
    let xbar: f64 = data.iter().map(|(x, _, s)| x / (s * s)).sum::<f64>() / wsum;
    let ybar: f64 = data.iter().map(|(_, y, s)| y / (s * s)).sum::<f64>() / wsum;
    let sxx: f64 = data.iter().map(|(x, _, s)| (x - xbar) * (x - xbar) / (s * s)).sum();
    let sxy: f64 =
        data.iter().map(|(x, y, s)| (x - xbar) * (y - ybar) / (s * s)).sum();
    let slope = sxy / sxx;
    (slope, (1.0 / sxx).sqrt())
}

/// Run the exponent scan for a word over (n, N) pairs.
pub fn exponent_scan(
    word: &[u8],
    geometry: Geometry,
    pairs: &[(i32, i32)],
    run: RunParams,
    box_mult: i32,
) -> ExponentScan {
    let mut rows = Vec::new();
    let mut pts_free = Vec::new();
    let mut pts_wired = Vec::new();
    for (i, &(n, big_n)) in pairs.iter().enumerate() {
        let spec = ArmSpec {
            word: word.to_vec(),
            n,
            big_n,
            geometry,
            disjointness: Disjointness::Vertex,
        };
        for bc in [Bc::Free, Bc::Wired] {
            let r = RunParams { seed: run.seed.wrapping_add(i as u64), ..run };
            let est = arm_probability(&spec, bc, r, box_mult);
            rows.push(ScanRow::of(&spec, bc, &est));
            let point = (n as f64 / big_n as f64, est.mean, est.stderr.max(1e-12));
            match bc {
                Bc::Free => pts_free.push(point),
                Bc::Wired => pts_wired.push(point),
            }
        }
    }
    ExponentScan {
        rows,
        slope_free: slope_fit(&pts_free),
        slope_wired: slope_fit(&pts_wired),
    }
}

/// Quasi-multiplicativity row for one triple n1 < n2 < n3.
#[derive(Clone, Debug)]
pub struct QuasiMultRow {
    pub sigma: String,
    pub n1: i32,
    pub n2: i32,
    pub n3: i32,
    pub p13: f64,
    pub p12: f64,
    pub p23: f64,
    pub ratio: f64,
}

/// Ratios φ[A(n1,n3)] / (φ[A(n1,n2)] φ[A(n2,n3)]) over triples. Pair
/// probabilities are estimated once per (n,N) and cached.
pub fn quasi_mult_scan(
    word: &[u8],
    triples: &[(i32, i32, i32)],
    run: RunParams,
    box_mult: i32,
    bc: Bc,
) -> Vec<QuasiMultRow> {
    let mut cache: std::collections::HashMap<(i32, i32), f64> =
        std::collections::HashMap::new();
    let mut probe = |n: i32, big_n: i32, salt: u64| -> f64 {
        *cache.entry((n, big_n)).or_insert_with(|| {
            let spec = ArmSpec {
                word: word.to_vec(),
                n,
                big_n,
                geometry: Geometry::Full,
                disjointness: Disjointness::Vertex,
            };
            let r = RunParams { seed: run.seed.wrapping_add(salt), ..run };
            arm_probability(&spec, bc, r, box_mult).mean
        })
    };
    let mut out = Vec::new();
    for (i, &(n1, n2, n3)) in triples.iter().enumerate() {
        let p13 = probe(n1, n3, 1000 + i as u64);
        let p12 = probe(n1, n2, 2000 + i as u64);
        let p23 = probe(n2, n3, 3000 + i as u64);
        out.push(QuasiMultRow {
            sigma: word.iter().map(|b| char::from(b'0' + b)).collect(),
            n1,
            n2,
            n3,
            p13,
            p12,
            p23,
            ratio: p13 / (p12 * p23),
        });
    }
    out
}

fn div_floor(a: i32, b: i32) -> i32 {
    (a as f64 / b as f64).floor() as i32
}

fn div_ceil_i(a: i32, b: i32) -> i32 {
    (a as f64 / b as f64).ceil() as i32
}

/// The five-arm landing pattern at x: three mutually edge-avoiding open
/// arms from x to the upper-right/left/bottom landing zones of ∂Λ_N, one
/// dual arm from the face x + (1/2,1/2) to the top dual zone and one from
/// the face x + (1/2,-1/2) to the lower-right dual zone, all five
/// edge-avoiding; together they realize the word 10110 counterclockwise.
pub fn five_arm_pattern_at(omega: &impl Omega, big_n: i32, x: Pt) -> bool {
    let n = big_n;
    // Primal flow inside Λ_N over open edges.
    let side = (2 * n + 1) as usize;
    let vid = |p: Pt| -> Option<u32> {
        if p.norm_inf() > n {
            return None;
        }
        Some(((p.y + n) as usize * side + (p.x + n) as usize) as u32)
    };
    let mut edges = Vec::new();
    for px in -n..=n {
        for py in -n..=n {
            let p = pt(px, py);
            for (q, _) in [(pt(px + 1, py), 0), (pt(px, py + 1), 1)] {
                if q.norm_inf() <= n && omega.open(p, q) {
                    edges.push((vid(p).unwrap(), vid(q).unwrap()));
                }
            }
        }
    }
    let z1: Vec<u32> = (div_ceil_i(n, 4)..=div_floor(n, 2))
        .filter_map(|y| vid(pt(n, y)))
        .collect();
    let z3: Vec<u32> = (-div_floor(n, 2)..=div_floor(n, 2))
        .filter_map(|y| vid(pt(-n, y)))
        .collect();
    let z4: Vec<u32> = (-div_floor(n, 2)..=div_floor(n, 2))
        .filter_map(|xx| vid(pt(xx, -n)))
        .collect();
    let Some(src) = vid(x) else { return false };
    if !zone_edge_disjoint(side * side, &edges, &[(src, 3)], &[z1, z3, z4]) {
        return false;
    }
    // Dual flow: faces with doubled ring <= 2N+1, angular steps on the
    // extreme ring excluded; dual-openness from the crossed primal edges.
    let dside = (2 * n + 2) as usize;
    let did = |d: Pt| -> Option<u32> {
        // d is doubled odd; face index over [-N-1, N] x [-N-1, N].
        if d.norm_inf() > 2 * n + 1 {
            return None;
        }
        let fx = (d.x - 1) / 2 + n + 1;
        let fy = (d.y - 1) / 2 + n + 1;
        Some((fy as usize * dside + fx as usize) as u32)
    };
    let mut dedges = Vec::new();
    for fx in -(n + 1)..=n {
        for fy in -(n + 1)..=n {
            let d = pt(2 * fx + 1, 2 * fy + 1);
            if d.norm_inf() > 2 * n + 1 {
                continue;
            }
            for q in [pt(d.x + 2, d.y), pt(d.x, d.y + 2)] {
                if q.norm_inf() > 2 * n + 1 {
                    continue;
                }
                if d.norm_inf() == 2 * n + 1 && q.norm_inf() == 2 * n + 1 {
                    continue;
                }
                let (a, b) = super::geometry::crossed_primal_edge(d, q);
                if !omega.open(a, b) {
                    dedges.push((did(d).unwrap(), did(q).unwrap()));
                }
            }
        }
    }
    let dsrc_ne = pt(2 * x.x + 1, 2 * x.y + 1);
    let dsrc_se = pt(2 * x.x + 1, 2 * x.y - 1);
    let (Some(ne), Some(se)) = (did(dsrc_ne), did(dsrc_se)) else { return false };
    // Top zone: faces (a+1/2, N+1/2) with a+1/2 in [-N/2-1/2, N/2+1/2].
    let z2: Vec<u32> = (-div_floor(n, 2) - 1..=div_floor(n, 2))
        .filter_map(|a| did(pt(2 * a + 1, 2 * n + 1)))
        .collect();
    // Lower-right zone: faces (N+1/2, b+1/2) with b+1/2 in
    // [-N/2+1/2, -N/4+1/2].
    let z5: Vec<u32> = (-div_floor(n, 2)..=-div_ceil_i(n, 4))
        .filter_map(|b| did(pt(2 * n + 1, 2 * b + 1)))
        .collect();
    // Crossed pairings uncross in the plane, so a flow of two units from
    // the paired sources decides the pattern.
    zone_edge_disjoint(dside * dside, &dedges, &[(ne, 1), (se, 1)], &[z2, z5])
}

/// Five-arm density row: count of pattern vertices and the disjointness
/// audit over a sample.
#[derive(Clone, Debug)]
pub struct FiveArmRow {
    pub big_n: i32,
    pub bc: &'static str,
    /// Mean count of vertices x in Λ_{N/2} realizing the pattern.
    pub mean_count: f64,
    pub stderr: f64,
    /// N² · φ[pattern at the origin].
    pub density_origin: f64,
    pub origin_stderr: f64,
    pub samples: u64,
    /// Samples where two or more vertices realized the pattern at once
    /// (must stay zero).
    pub audit_violations: u64,
}

/// Scan the five-arm point density over N, with the per-sample audit that
/// no two vertices realize the pattern for the same landing zones.
pub fn five_arm_scan(
    big_ns: &[i32],
    bc: Bc,
    run: RunParams,
    box_mult: i32,
    scan_vertices: bool,
) -> Vec<FiveArmRow> {
    let mut out = Vec::new();
    for (i, &n) in big_ns.iter().enumerate() {
        let m = box_mult.max(2) * n;
        let domain = box_domain(m);
        let wiring = match bc {
            Bc::Free => WiringPartition::free(),
            Bc::Wired => WiringPartition::wired(&domain),
        };
        let run_i = RunParams { seed: run.seed.wrapping_add(i as u64), purpose: "five-arm", ..run };
        let mut chain = crate::fk::SwChain::new(
            &domain,
            &wiring,
            ModelParams::critical(),
            crate::rng::stream(run_i.seed, run_i.purpose, 0),
        )
        .unwrap();
        for _ in 0..run_i.burn_in {
            chain.sweep();
        }
        let mut origin_hits = 0u64;
        let mut counts: Vec<f64> = Vec::new();
        let mut violations = 0u64;
        let total = run_i.sweeps.max(1);
        for _ in 0..total {
            chain.sweep();
            let omega = BoxOmega { domain: &domain, open: chain.open_edges() };
            let origin = five_arm_pattern_at(&omega, n, pt(0, 0));
            if origin {
                origin_hits += 1;
            }
            if scan_vertices {
                let mut count = 0u64;
                let half = n / 2;
                for x in -half..=half {
                    for y in -half..=half {
                        if five_arm_pattern_at(&omega, n, pt(x, y)) {
                            count += 1;
                        }
                    }
                }
                if count > 1 {
                    violations += 1;
                }
                counts.push(count as f64);
            }
        }
        let p_origin = origin_hits as f64 / total as f64;
        let p_err = (p_origin * (1.0 - p_origin) / total as f64).sqrt();
        let (mean_count, count_err) = if scan_vertices {
            let m0 = counts.iter().sum::<f64>() / counts.len() as f64;
            let var = counts.iter().map(|c| (c - m0) * (c - m0)).sum::<f64>()
                / (counts.len() as f64 - 1.0).max(1.0);
            (m0, (var / counts.len() as f64).sqrt())
        } else {
            (f64::NAN, f64::NAN)
        };
        out.push(FiveArmRow {
            big_n: n,
            bc: bc.label(),
            mean_count,
            stderr: count_err,
            density_origin: (n as f64) * (n as f64) * p_origin,
            origin_stderr: (n as f64) * (n as f64) * p_err,
            samples: total,
            audit_violations: violations,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arms::geometry::GridOmega;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64, f64)> = [8.0, 16.0, 32.0, 64.0]
            .iter()
            .map(|&r: &f64| (1.0 / r, (1.0 / r).powi(2) * 3.0, 1e-6))
            .collect();
        let (slope, err) = slope_fit(&pts);
        assert!((slope - 2.0).abs() < 1e-6, "slope {slope}");
        assert!(err < 1e-3);
    }

    #[test]
    fn five_arm_pattern_needs_structure() {
        // All closed: no open arms at all.
        let omega = GridOmega::closed(-20, -20, 41, 41);
        assert!(!five_arm_pattern_at(&omega, 8, pt(0, 0)));
        // All open: no dual arms.
        let mut all = GridOmega::closed(-20, -20, 41, 41);
        for x in -20..20 {
            for y in -20..=20 {
                all.set(pt(x, y), pt(x + 1, y), true);
            }
        }
        for x in -20..=20 {
            for y in -20..20 {
                all.set(pt(x, y), pt(x, y + 1), true);
            }
        }
        assert!(!five_arm_pattern_at(&all, 8, pt(0, 0)));
    }

    #[test]
    fn five_arm_pattern_on_a_constructed_config() {
        // Build exactly three open radial paths to the three zones and keep
        // everything else closed; the dual zones are then reachable.
        let n = 8;
        let mut omega = GridOmega::closed(-20, -20, 41, 41);
        // Right arm: east along y = 0, bending up before the boundary so
        // the lower-right dual zone stays reachable; lands at (n, 2).
        for x in 0..(n - 1) {
            omega.set(pt(x, 0), pt(x + 1, 0), true);
        }
        for y in 0..2 {
            omega.set(pt(n - 1, y), pt(n - 1, y + 1), true);
        }
        omega.set(pt(n - 1, 2), pt(n, 2), true);
        // Left arm along y = 0.
        for x in -n..0 {
            omega.set(pt(x, 0), pt(x + 1, 0), true);
        }
        // Bottom arm along x = 0.
        for y in -n..0 {
            omega.set(pt(0, y), pt(0, y + 1), true);
        }
        assert!(five_arm_pattern_at(&omega, n, pt(0, 0)));
        // A shifted center without arms fails.
        assert!(!five_arm_pattern_at(&omega, n, pt(2, 2)));
    }
}
