//! Acceptance suite: one test per criterion, each printing a pass line
//! with its measured quantities. The long-running scaling suite for the
//! universal exponents is `#[ignore]`d (run with `cargo test -- --ignored`);
//! a fast smoke twin runs by default.

mod common;

use common::{block_rect, duality_fixtures, refine, small_fixtures};
use fkrsw::arms::{self, Bc, Disjointness, Geometry};
use fkrsw::dca::{self, EllVariant, Network, Profile};
use fkrsw::fk::{self, ModelParams, RunParams, WiringPartition};
use fkrsw::geom::pt;
use fkrsw::harness::{self, CorpusSpec};
use fkrsw::rect::{ARC_AB, ARC_CD};
use fkrsw::M_EXT;
use rand::Rng;
use std::sync::OnceLock;
use std::time::Instant;

fn corpus() -> &'static Vec<harness::CorpusEntry> {
    static CORPUS: OnceLock<Vec<harness::CorpusEntry>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        harness::corpus_generate(&CorpusSpec { count: 50, seed: 2026, ..CorpusSpec::default() })
            .expect("corpus generation")
    })
}

fn spread(values: &[f64]) -> f64 {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!(lo > 0.0 && hi.is_finite(), "values must be positive finite, got [{lo}, {hi}]");
    hi / lo
}

#[test]
fn criterion_1_exact_oracle_agreement() {
    let started = Instant::now();
    let fixtures = small_fixtures();
    assert!(fixtures.len() >= 10);
    let params = ModelParams::critical();
    let mut cases = 0usize;
    let mut failures = 0usize;
    for (name, rect) in &fixtures {
        let dom = rect.domain();
        let ab = rect.arc_vertices(ARC_AB);
        let cd = rect.arc_vertices(ARC_CD);
        let a = ab[0];
        let c = cd[0];
        let b = *ab.last().unwrap();
        let d = *cd.last().unwrap();
        let half = dom.n_edges().div_ceil(2);
        let wirings = [
            WiringPartition::free(),
            WiringPartition::wired(dom),
            WiringPartition::dobrushin(rect),
            WiringPartition::alternating(rect),
        ];
        for (wi, wiring) in wirings.iter().enumerate() {
            let exact = {
                let (ab, cd) = (ab.clone(), cd.clone());
                fk::exact_probabilities(
                    dom,
                    wiring,
                    params,
                    fk::DEFAULT_EDGE_CAP,
                    &mut [
                        &mut |v: &mut fk::ConfigView| v.connected_raw(&ab, &cd),
                        &mut |v: &mut fk::ConfigView| v.connected_raw(&[a], &[c]),
                        &mut |v: &mut fk::ConfigView| v.connected_raw(&[b], &[d]),
                        &mut |v: &mut fk::ConfigView| v.open(0),
                        &mut |v: &mut fk::ConfigView| v.o >= half,
                    ],
                )
                .unwrap()
            };
            for ev in 0..5usize {
                let run = RunParams {
                    sweeps: 24_000,
                    burn_in: 500,
                    batches: 32,
                    chains: 1,
                    seed: 90_000 + (cases as u64),
                    purpose: "accept-1",
                };
                let (ab, cd) = (ab.clone(), cd.clone());
                let est = fk::estimate_event(dom, wiring, params, run, move |chain| {
                    let half_open =
                        chain.open_edges().iter().filter(|&&o| o).count() >= half;
                    let open0 = chain.open_edges()[0];
                    let uf = chain.raw_clusters();
                    match ev {
                        0 => ab.iter().any(|&u| cd.iter().any(|&v| uf.same(u, v))),
                        1 => uf.same(a, c),
                        2 => uf.same(b, d),
                        3 => open0,
                        _ => half_open,
                    }
                })
                .unwrap();
                cases += 1;
                let tol = 3.0 * est.stderr.max(1e-4);
                if (est.mean - exact[ev]).abs() > tol {
                    failures += 1;
                    eprintln!(
                        "  mismatch {name} wiring {wi} event {ev}: exact {} mc {} ± {}",
                        exact[ev], est.mean, est.stderr
                    );
                }
            }
        }
    }
    // Chi-square over the full configuration distribution of the 2x2 block.
    let rect = block_rect(2, 2);
    let dom = rect.domain();
    let exact_probs = {
        let mut probs = vec![0.0f64; 16];
        let mut events: Vec<Box<dyn FnMut(&mut fk::ConfigView) -> bool>> = Vec::new();
        for mask in 0..16usize {
            events.push(Box::new(move |v: &mut fk::ConfigView| {
                (0..4).all(|e| v.open(e) == ((mask >> e) & 1 == 1))
            }));
        }
        let mut refs: Vec<&mut dyn FnMut(&mut fk::ConfigView) -> bool> = Vec::new();
        for e in events.iter_mut() {
            refs.push(e.as_mut());
        }
        let got = fk::exact_probabilities(
            dom,
            &WiringPartition::free(),
            params,
            fk::DEFAULT_EDGE_CAP,
            &mut refs,
        )
        .unwrap();
        probs.copy_from_slice(&got);
        probs
    };
    let mut chain = fk::SwChain::new(
        dom,
        &WiringPartition::free(),
        params,
        fkrsw::rng::stream(4242, "accept-1-chi2", 0),
    )
    .unwrap();
    for _ in 0..1000 {
        chain.sweep();
    }
    let n_sweeps = 1_000_000u64;
    let mut counts = [0u64; 16];
    for _ in 0..n_sweeps {
        chain.sweep();
        let mut mask = 0usize;
        for (e, &o) in chain.open_edges().iter().enumerate() {
            if o {
                mask |= (o as usize) << e;
            }
        }
        counts[mask] += 1;
    }
    let mut chi2 = 0.0;
    for m in 0..16 {
        let expected = exact_probs[m] * n_sweeps as f64;
        let diff = counts[m] as f64 - expected;
        chi2 += diff * diff / expected;
    }
    let dist = statrs::distribution::ChiSquared::new(15.0).unwrap();
    let p_value =
        1.0 - statrs::distribution::ContinuousCDF::cdf(&dist, chi2);
    let pass_rate = 1.0 - failures as f64 / cases as f64;
    let elapsed = started.elapsed().as_secs_f64();
    assert!(pass_rate >= 0.99, "pass rate {pass_rate} over {cases} cases");
    assert!(p_value > 0.001, "chi-square p = {p_value} (chi2 = {chi2})");
    assert!(elapsed < 300.0, "runtime {elapsed}s");
    println!(
        "criterion 1: PASS ({cases} cases, {failures} outside 3 stderr, chi2 p = {p_value:.4}, {elapsed:.1}s)"
    );
}

#[test]
fn criterion_2_duality_identity() {
    let started = Instant::now();
    let fixtures = duality_fixtures();
    assert!(fixtures.len() >= 5, "need at least five bridge-free fixtures");
    for (name, rect) in &fixtures {
        let rep =
            fk::dual_identity_check(rect, ModelParams::critical(), fk::DEFAULT_EDGE_CAP)
                .unwrap();
        assert!(
            rep.residual <= 1e-12,
            "{name}: residual {} (1 - wired crossing {} vs dual {})",
            rep.residual,
            1.0 - rep.primal_no_crossing,
            rep.dual_crossing
        );
        assert_eq!(rep.event_mismatches, 0, "{name}: coupled events disagree");
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "runtime {elapsed}s");
    println!(
        "criterion 2: PASS ({} bridge-free fixtures, residual <= 1e-12, {elapsed:.1}s)",
        fixtures.len()
    );
}

#[test]
fn criterion_3_harmonic_engine() {
    let started = Instant::now();
    // Normalization and symmetry on every corpus domain.
    for entry in corpus() {
        let dom = entry.rect.domain();
        let net = Network::build(dom, Profile::Primal);
        let l = dom.n_ext() as u32;
        let q = l / 4;
        let parts: [Vec<u32>; 4] = [
            (0..q).collect(),
            (q..2 * q).collect(),
            (2 * q..3 * q).collect(),
            (3 * q..l).collect(),
        ];
        for x in (0..dom.len() as u32).step_by((dom.len() / 8).max(1)) {
            let total: f64 =
                parts.iter().map(|p| net.z_point_ext(x, p).unwrap()).sum();
            assert!(
                (total - 1.0 / M_EXT).abs() < 1e-9,
                "{}: normalization {total}",
                entry.name
            );
        }
        let pairs = [(0u32, (dom.len() / 2) as u32), (1, (dom.len() - 1) as u32)];
        for (x, y) in pairs {
            if x == y {
                continue;
            }
            let zxy = net.z_interior(&[x], &[y]).unwrap();
            let zyx = net.z_interior(&[y], &[x]).unwrap();
            assert!(
                (zxy - zyx).abs() <= 1e-9,
                "{}: symmetry {zxy} vs {zyx}",
                entry.name
            );
        }
        let e1 = 0u32;
        let e2 = l / 2;
        let z12 = net.z_ext(&[e1], &[e2]).unwrap();
        let z21 = net.z_ext(&[e2], &[e1]).unwrap();
        assert!((z12 - z21).abs() <= 1e-9, "{}", entry.name);
    }
    // Solver against the direct random-walk simulation on five fixtures.
    let mut checked = 0;
    for (name, rect) in small_fixtures().into_iter().take(5) {
        let dom = rect.domain();
        let net = Network::build(dom, Profile::Primal);
        let targets = rect.ext_arc(ARC_CD);
        let x = (dom.len() / 2) as u32;
        let h = net.z_point_ext(x, &targets).unwrap() * M_EXT;
        let walks = 1_000_000usize;
        let mut rng = fkrsw::rng::stream(777, "accept-3-rw", checked);
        let freq = dca::rw_exit_frequency(dom, &net, x, &targets, walks, &mut rng);
        let se = (h * (1.0 - h) / walks as f64).sqrt();
        assert!(
            (freq - h).abs() <= 3.0 * se,
            "{name}: solver {h} vs walk {freq} (3se = {})",
            3.0 * se
        );
        checked += 1;
    }
    // Extremal length of full-side rectangles.
    for (m, k) in [(4, 3), (9, 4), (6, 6), (13, 5)] {
        let d = std::sync::Arc::new(common::block(m, k));
        let r = fkrsw::rect::TopologicalRectangle::new(
            d,
            pt(0, k - 1),
            pt(0, 0),
            pt(m - 1, 0),
            pt(m - 1, k - 1),
        )
        .unwrap();
        let ell = dca::extremal_length(&r, EllVariant::Omega).unwrap();
        assert!(
            (ell - (m - 1) as f64 / k as f64).abs() < 1e-9,
            "ell({m}x{k}) = {ell}"
        );
    }
    let elapsed = started.elapsed().as_secs_f64();
    println!(
        "criterion 3: PASS (50 corpus domains, 5 RW fixtures, exact rectangle ell, {elapsed:.1}s)"
    );
}

#[test]
fn criterion_4_crossing_band() {
    let started = Instant::now();
    let corpus = corpus();
    assert_eq!(corpus.len(), 50);
    assert!(corpus.iter().any(|e| e.tag == harness::ShapeTag::Rough));
    assert!(corpus.iter().any(|e| e.tag == harness::ShapeTag::Slit));
    let run = RunParams {
        sweeps: 20_000,
        burn_in: 1000,
        batches: 32,
        chains: 1,
        seed: 11_000,
        purpose: "accept-4",
    };
    let records = harness::theorem1_records(corpus, run).unwrap();
    let mut min_free = f64::INFINITY;
    let mut max_wired = f64::NEG_INFINITY;
    let mut ells = Vec::new();
    let mut frees = Vec::new();
    for r in &records {
        min_free = min_free.min(r.free.mean - 3.0 * r.free.stderr);
        max_wired = max_wired.max(r.wired.mean + 3.0 * r.wired.stderr);
        assert!(
            r.free.mean <= r.wired.mean + 3.0 * (r.free.stderr + r.wired.stderr),
            "{}: free {} above wired {}",
            r.name,
            r.free.mean,
            r.wired.mean
        );
        ells.push(r.ell_omega);
        frees.push(r.free.mean);
    }
    let rho = harness::spearman(&ells, &frees);
    let elapsed = started.elapsed().as_secs_f64();
    assert!(min_free >= 0.005, "min adjusted free crossing {min_free}");
    assert!(max_wired <= 0.995, "max adjusted wired crossing {max_wired}");
    assert!(rho <= -0.9, "Spearman(ell, free crossing) = {rho}");
    assert!(elapsed < 7200.0, "runtime {elapsed}s");
    println!(
        "criterion 4: PASS (min free {min_free:.4}, max wired {max_wired:.4}, spearman {rho:.3}, {elapsed:.1}s)"
    );
}

#[test]
fn criterion_5_factorization_bands() {
    let started = Instant::now();
    let mut triangle = Vec::new();
    let mut separator = Vec::new();
    for entry in corpus() {
        let rep = dca::dca_inequality_report(&entry.rect).unwrap();
        triangle.push(rep.triangle_ratio);
        if let Some(s) = rep.separator_ratio {
            separator.push(s);
        }
    }
    let tri_spread = spread(&triangle);
    let sep_spread = spread(&separator);
    assert!(tri_spread <= 100.0, "triangle spread {tri_spread}");
    assert!(sep_spread <= 100.0, "separator spread {sep_spread}");
    assert!(
        separator.len() >= corpus().len() / 2,
        "separator found on only {} rectangles",
        separator.len()
    );
    // Stability under one dyadic refinement of five domains.
    let mut tri2 = Vec::new();
    let mut sep2 = Vec::new();
    for entry in corpus().iter().take(5) {
        let refined = refine(&entry.rect);
        let rep = dca::dca_inequality_report(&refined).unwrap();
        tri2.push(rep.triangle_ratio);
        if let Some(s) = rep.separator_ratio {
            sep2.push(s);
        }
    }
    let tri_all: Vec<f64> = triangle.iter().chain(&tri2).copied().collect();
    let sep_all: Vec<f64> = separator.iter().chain(&sep2).copied().collect();
    let tri_grow = spread(&tri_all) / tri_spread;
    let sep_grow = spread(&sep_all) / sep_spread;
    assert!(tri_grow <= 2.0, "triangle spread grew {tri_grow}x after refinement");
    assert!(sep_grow <= 2.0, "separator spread grew {sep_grow}x after refinement");
    let elapsed = started.elapsed().as_secs_f64();
    println!(
        "criterion 5: PASS (triangle spread {tri_spread:.2}, separator spread {sep_spread:.2}, refinement growth {tri_grow:.2}/{sep_grow:.2}, {elapsed:.1}s)"
    );
}

#[test]
fn criterion_6_second_moment_pipeline() {
    let started = Instant::now();
    // Exact fixtures.
    for (name, rect) in small_fixtures().into_iter().take(4) {
        if rect.domain().has_bridges() {
            continue;
        }
        let rep = fk::second_moment_report(
            &rect,
            ModelParams::critical(),
            fk::SecondMomentMode::Exact { cap: fk::DEFAULT_EDGE_CAP },
        )
        .unwrap();
        let sum_sq: f64 = rep.pair_probs.iter().map(|q| q * q).sum();
        assert!((rep.e_n - sum_sq).abs() < 1e-12, "{name}: E[N] vs sum of squares");
        assert!(
            rep.p_pos - rep.e_n * rep.e_n / rep.e_n2 >= -1e-12,
            "{name}: Cauchy-Schwarz violated"
        );
    }
    // Technical lemma on 10^4 random vectors.
    let mut rng = fkrsw::rng::stream(606, "accept-6-lemma", 0);
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=64);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0f64..10.0).max(1e-9)).collect();
        let (lhs, rhs) = fk::lemma46_check(&x).unwrap();
        assert!(lhs <= rhs + 1e-9, "lemma violated: {lhs} > {rhs}");
    }
    // Ratio diagnostics over the corpus, Monte Carlo.
    let run = RunParams {
        sweeps: 6_000,
        burn_in: 500,
        batches: 16,
        chains: 1,
        seed: 33_000,
        purpose: "accept-6",
    };
    let mut p41 = Vec::new();
    let mut c44 = Vec::new();
    let mut p46 = Vec::new();
    for entry in corpus() {
        let (pruned, _) = entry.rect.prune_bridges();
        let rep = fk::second_moment_report(
            &pruned,
            ModelParams::critical(),
            fk::SecondMomentMode::MonteCarlo { run },
        )
        .unwrap();
        assert!(rep.prop41_ratio.is_finite() && rep.prop41_ratio > 0.0);
        p41.push(rep.prop41_ratio);
        if let Some(v) = rep.cor44_ratio {
            if v > 0.0 {
                c44.push(v);
            }
        }
        if rep.e_n2 > 0.0 {
            p46.push(rep.prop46_ratio);
        }
    }
    let (s41, s44, s46) = (spread(&p41), spread(&c44), spread(&p46));
    assert!(s41 <= 100.0, "Prop 4.1 spread {s41}");
    assert!(s44 <= 100.0, "Cor 4.4 spread {s44}");
    assert!(s46 <= 100.0, "Prop 4.6 spread {s46}");
    let elapsed = started.elapsed().as_secs_f64();
    println!(
        "criterion 6: PASS (exact identities, 10^4 lemma vectors, spreads {s41:.1}/{s44:.1}/{s46:.1}, {elapsed:.1}s)"
    );
}

fn exponent_suite(
    ratios: &[i32],
    sweeps: u64,
    tol10: f64,
    tol101: f64,
) -> (f64, f64, f64, f64) {
    let n = 2;
    let pairs: Vec<(i32, i32)> = ratios.iter().map(|&r| (n, n * r)).collect();
    let run = RunParams {
        sweeps,
        burn_in: 600,
        batches: 16,
        chains: 1,
        seed: 77_000,
        purpose: "accept-7",
    };
    let scan10 = arms::exponent_scan(&[1, 0], Geometry::Half, &pairs, run, 2);
    let scan101 = arms::exponent_scan(&[1, 0, 1], Geometry::Half, &pairs, run, 2);
    for (label, slope, tol, target) in [
        ("10 free", scan10.slope_free.0, tol10, -1.0),
        ("10 wired", scan10.slope_wired.0, tol10, -1.0),
        ("101 free", scan101.slope_free.0, tol101, -2.0),
        ("101 wired", scan101.slope_wired.0, tol101, -2.0),
    ] {
        assert!(
            (slope - target).abs() <= tol,
            "half-plane {label}: slope {slope} not within {tol} of {target}"
        );
    }
    (
        scan10.slope_free.0,
        scan10.slope_wired.0,
        scan101.slope_free.0,
        scan101.slope_wired.0,
    )
}

/// Full-scale universal-exponent suite; several hours of sampling.
#[test]
#[ignore = "slow suite: run with cargo test -- --ignored"]
fn criterion_7_universal_exponents() {
    let started = Instant::now();
    let (s10f, s10w, s101f, s101w) =
        exponent_suite(&[8, 16, 32, 64], 100_000, 0.15, 0.3);
    // Five-arm point density over N, both-BC free proxy.
    let rows = arms::five_arm_scan(
        &[16, 32, 64, 128],
        Bc::Free,
        RunParams {
            sweeps: 100_000,
            burn_in: 1000,
            batches: 16,
            chains: 1,
            seed: 78_000,
            purpose: "accept-7-five",
        },
        2,
        false,
    );
    let densities: Vec<f64> = rows.iter().map(|r| r.density_origin).collect();
    let ratio = spread(&densities);
    assert!(ratio <= 3.0, "five-arm density varies by {ratio}");
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 8.0 * 3600.0, "runtime {elapsed}s");
    println!(
        "criterion 7: PASS (slopes {s10f:.3}/{s10w:.3} and {s101f:.3}/{s101w:.3}, five-arm density spread {ratio:.2}, {elapsed:.0}s)"
    );
}

/// Reduced-scale smoke twin of the exponent suite.
#[test]
fn criterion_7_smoke() {
    let started = Instant::now();
    let (s10f, s10w, s101f, s101w) = exponent_suite(&[8, 16], 12_000, 0.45, 0.8);
    let rows = arms::five_arm_scan(
        &[12, 24],
        Bc::Free,
        RunParams {
            sweeps: 4_000,
            burn_in: 400,
            batches: 8,
            chains: 1,
            seed: 78_500,
            purpose: "accept-7-smoke",
        },
        2,
        false,
    );
    for r in &rows {
        assert!(r.density_origin.is_finite() && r.density_origin > 0.0);
        assert_eq!(r.audit_violations, 0);
    }
    let elapsed = started.elapsed().as_secs_f64();
    println!(
        "criterion 7 (smoke): PASS (slopes {s10f:.2}/{s10w:.2}, {s101f:.2}/{s101w:.2}, {elapsed:.0}s)"
    );
}

#[test]
fn criterion_8_quasi_multiplicativity_and_oracle() {
    let started = Instant::now();
    // Greedy versus flow oracle on 10^4 random small-annulus configurations.
    let words: [&[u8]; 3] = [&[1], &[1, 0], &[1, 0, 1]];
    let mut rng = fkrsw::rng::stream(88_000, "accept-8-xcheck", 0);
    let mut disagreements = 0usize;
    let mut configs = 0usize;
    for geom in [Geometry::Full, Geometry::Half] {
        let lat = arms::ArmLattice::new(2, 6, geom);
        for trial in 0..5_000 {
            let p = [0.3, 0.45, 0.5857864376269049, 0.7][trial % 4];
            let r = 12;
            let mut omega =
                arms::GridOmega::closed(-r, -r, (2 * r + 1) as usize, (2 * r + 1) as usize);
            for x in -r..r {
                for y in -r..=r {
                    if rng.gen::<f64>() < p {
                        omega.set(pt(x, y), pt(x + 1, y), true);
                    }
                }
            }
            for x in -r..=r {
                for y in -r..r {
                    if rng.gen::<f64>() < p {
                        omega.set(pt(x, y), pt(x, y + 1), true);
                    }
                }
            }
            configs += 1;
            for word in words {
                let g = arms::detect_arms(
                    &lat,
                    &omega,
                    word,
                    Disjointness::Vertex,
                    arms::Method::Greedy,
                    0,
                )
                .unwrap()
                .occurs;
                let o = arms::oracle_decide(&lat, &omega, word, Disjointness::Vertex, 1_000_000)
                    .unwrap();
                if g != o {
                    disagreements += 1;
                }
            }
        }
    }
    assert!(configs >= 10_000);
    assert_eq!(disagreements, 0, "greedy and oracle disagree");
    // Quasi-multiplicativity bands for sigma in {1, 10}.
    let radii = [2, 3, 4, 6, 8, 12];
    let mut triples = Vec::new();
    for i in 0..radii.len() {
        for j in (i + 1)..radii.len() {
            for k in (j + 1)..radii.len() {
                triples.push((radii[i], radii[j], radii[k]));
            }
        }
    }
    assert!(triples.len() >= 20);
    let run = RunParams {
        sweeps: 5_000,
        burn_in: 500,
        batches: 16,
        chains: 1,
        seed: 88_500,
        purpose: "accept-8-qm",
    };
    let mut spreads = Vec::new();
    for word in [[1u8].as_slice(), [1u8, 0].as_slice()] {
        let rows = arms::quasi_mult_scan(word, &triples, run, 2, Bc::Free);
        let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
        let s = spread(&ratios);
        assert!(s <= 10.0, "sigma {word:?}: quasi-mult spread {s}");
        spreads.push(s);
    }
    let elapsed = started.elapsed().as_secs_f64();
    println!(
        "criterion 8: PASS ({configs} configs x 3 words x 2 geometries, 0 disagreements; quasi-mult spreads {:.2}/{:.2}; {elapsed:.0}s)",
        spreads[0], spreads[1]
    );
}

#[test]
fn criterion_9_spin_crossings() {
    let started = Instant::now();
    // Corpus restricted to ell <= 2.
    let spec = CorpusSpec { count: 12, ell_max: 2.0, seed: 2027, ..CorpusSpec::default() };
    let corpus = harness::corpus_generate(&spec).unwrap();
    let rects: Vec<_> = corpus.iter().map(|e| e.rect.clone()).collect();
    let run = RunParams {
        sweeps: 20_000,
        burn_in: 1000,
        batches: 32,
        chains: 1,
        seed: 99_000,
        purpose: "accept-9",
    };
    let records =
        fkrsw::spin::spin_crossing_report(&rects, ModelParams::critical(), run).unwrap();
    let mut min_adj = f64::INFINITY;
    for r in &records {
        min_adj = min_adj.min(r.estimate.mean - 3.0 * r.estimate.stderr);
        assert_eq!(r.exclusion_violations, 0, "topological exclusion violated");
    }
    assert!(min_adj >= 0.002, "min adjusted minus-crossing {min_adj}");
    // Sampler against the exact spin oracle on small fixtures.
    let beta = fkrsw::beta_crit();
    for (name, rect) in small_fixtures().into_iter().take(3) {
        if rect.domain().len() > 20 {
            continue;
        }
        let exact = fkrsw::spin::exact_minus_crossing(&rect, beta, 20).unwrap();
        let mut sampler =
            fkrsw::spin::SpinSampler::new(&rect, ModelParams::critical(), 99_100, 0, 800)
                .unwrap();
        let n = 30_000;
        let mut hits = 0u64;
        for _ in 0..n {
            let cfg = sampler.sample();
            assert!(
                !fkrsw::spin::exclusion_violated(&cfg, &rect),
                "{name}: exclusion violated in a sample"
            );
            if fkrsw::spin::minus_crossing(&cfg, &rect) {
                hits += 1;
            }
        }
        let mc = hits as f64 / n as f64;
        let se = (exact * (1.0 - exact) / n as f64).sqrt();
        assert!(
            (mc - exact).abs() <= 3.0 * se.max(1e-3),
            "{name}: exact {exact} vs es {mc}"
        );
    }
    let elapsed = started.elapsed().as_secs_f64();
    println!(
        "criterion 9: PASS (min adjusted crossing {min_adj:.4} over {} rectangles, oracle match, {elapsed:.0}s)",
        records.len()
    );
}
