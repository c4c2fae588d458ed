//! Thin command-line front end. All functionality lives in the library;
//! this binary parses arguments, dispatches, and writes CSV files.
//! Exit code 0 only when every validation passes.

use clap::{Parser, Subcommand};
use fkrsw::arms::{self, ArmSpec, Bc, Disjointness, Geometry};
use fkrsw::dca::{self, EllVariant, Network, Profile};
use fkrsw::domain::parse_domain_text;
use fkrsw::fk::{self, ModelParams, RunParams, WiringPartition};
use fkrsw::geom::{pt, Pt};
use fkrsw::harness::{self, f as ff, Config, CorpusSpec, CsvOut};
use fkrsw::rect::{TopologicalRectangle, ARC_AB, ARC_CD};
use fkrsw::spin;
use std::path::PathBuf;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "fkrsw", about = "Critical FK-Ising crossings on discrete domains")]
struct Cli {
    /// Master seed for all random streams.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Output directory for CSV files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate and describe a domain file.
    Domain {
        #[arg(long)]
        domain: PathBuf,
    },
    /// Discrete complex analysis on a marked domain.
    Dca {
        #[arg(value_parser = ["z", "ell", "separator", "report"])]
        op: String,
        #[arg(long)]
        domain: PathBuf,
        /// Marks override: "ax,ay bx,by cx,cy dx,dy".
        #[arg(long)]
        marks: Option<String>,
    },
    /// FK measure operations.
    Fk {
        #[arg(value_parser = ["exact", "sample", "crossing", "n-report", "dual-check"])]
        op: String,
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        marks: Option<String>,
        /// free | wired | dob | alt
        #[arg(long, default_value = "free")]
        bc: String,
        #[arg(long, default_value_t = fkrsw::P_CRIT)]
        p: f64,
        #[arg(long, default_value_t = 10_000)]
        sweeps: u64,
        #[arg(long, default_value_t = 1000)]
        burn_in: u64,
    },
    /// Arm events and scaling scans.
    Arms {
        #[arg(value_parser = ["event", "prob", "scan"])]
        op: String,
        #[arg(long, default_value = "10")]
        sigma: String,
        #[arg(long, default_value = "half", value_parser = ["full", "half"])]
        geometry: String,
        #[arg(long, default_value_t = 2)]
        n: i32,
        #[arg(long = "N", default_value_t = 16)]
        big_n: i32,
        #[arg(long, default_value = "free", value_parser = ["free", "wired"])]
        bc: String,
        /// Landing zones, square-perimeter angles: "lo:hi lo:hi ...".
        #[arg(long)]
        landing: Option<String>,
        #[arg(long)]
        delta: Option<f64>,
        /// Scan ratios N/n for `scan`.
        #[arg(long, default_value = "8 16 32")]
        ratios: String,
        #[arg(long, default_value_t = 2_000)]
        sweeps: u64,
        #[arg(long, default_value_t = 500)]
        burn_in: u64,
        #[arg(long, default_value = "vertex", value_parser = ["vertex", "edge"])]
        disjoint: String,
    },
    /// Edwards-Sokal spin crossing estimate on a marked domain.
    Spin {
        #[arg(value_parser = ["crossing"])]
        op: String,
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        marks: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        sweeps: u64,
        #[arg(long, default_value_t = 1000)]
        burn_in: u64,
    },
    /// Generate a domain corpus into the output directory.
    Corpus {
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 6)]
        min_size: i32,
        #[arg(long, default_value_t = 14)]
        max_size: i32,
        #[arg(long, default_value_t = 0.25)]
        ell_min: f64,
        #[arg(long, default_value_t = 4.0)]
        ell_max: f64,
    },
    /// Run a config-file experiment pipeline.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// ASCII-render a marked domain.
    Render {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        marks: Option<String>,
    },
}

fn main() {
    let cli = Cli::parse();
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .ok();
    }
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}

fn parse_marks_arg(s: &str) -> Result<[Pt; 4], String> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    if parts.len() != 4 {
        return Err("marks want four x,y pairs".into());
    }
    let mut out = [pt(0, 0); 4];
    for (i, p) in parts.iter().enumerate() {
        let (x, y) = p.split_once(',').ok_or("marks want x,y pairs")?;
        out[i] = pt(
            x.parse().map_err(|_| "bad mark x")?,
            y.parse().map_err(|_| "bad mark y")?,
        );
    }
    Ok(out)
}

fn load_rect(path: &PathBuf, marks: &Option<String>) -> Result<TopologicalRectangle, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let (domain, file_marks) = parse_domain_text(&text).map_err(|e| e.to_string())?;
    let marks = match marks {
        Some(s) => parse_marks_arg(s)?,
        None => file_marks.ok_or("domain file has no @marks line; pass --marks")?,
    };
    TopologicalRectangle::new(Arc::new(domain), marks[0], marks[1], marks[2], marks[3])
        .map_err(|e| e.to_string())
}

fn wiring_for(bc: &str, rect: &TopologicalRectangle) -> Result<WiringPartition, String> {
    match bc {
        "free" => Ok(WiringPartition::free()),
        "wired" => Ok(WiringPartition::wired(rect.domain())),
        "dob" => Ok(WiringPartition::dobrushin(rect)),
        "alt" => Ok(WiringPartition::alternating(rect)),
        other => Err(format!("unknown bc {other:?}")),
    }
}

fn write_csv(dir: &PathBuf, csv: &CsvOut) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let path = dir.join(&csv.name);
    std::fs::write(&path, &csv.text).map_err(|e| e.to_string())?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), String> {
    let seed = cli.seed;
    match cli.cmd {
        Cmd::Domain { domain } => {
            let text = std::fs::read_to_string(&domain).map_err(|e| e.to_string())?;
            let (dom, marks) = parse_domain_text(&text).map_err(|e| e.to_string())?;
            println!(
                "vertices={} edges={} boundary_visits={} external_edges={} faces={} bridges={}",
                dom.len(),
                dom.n_edges(),
                dom.n_visits(),
                dom.n_ext(),
                dom.interior_cells().len(),
                dom.bridges().len()
            );
            if let Some(m) = marks {
                println!("marks: a={} b={} c={} d={}", m[0], m[1], m[2], m[3]);
            }
            Ok(())
        }
        Cmd::Dca { op, domain, marks } => {
            let rect = load_rect(&domain, &marks)?;
            let net = Network::build(rect.domain(), Profile::Primal);
            match op.as_str() {
                "z" => {
                    let z_ext = net
                        .z_ext(&rect.ext_arc(ARC_AB), &rect.ext_arc(ARC_CD))
                        .map_err(|e| e.to_string())?;
                    let z_int = net
                        .z_interior(&rect.arc_vertices(ARC_AB), &rect.arc_vertices(ARC_CD))
                        .map_err(|e| e.to_string())?;
                    let mut csv = harness::csv_with_provenance(
                        "z.csv", seed, 0, "z_ext_abcd,z_int_abcd",
                    );
                    csv.row(&[ff(z_ext), ff(z_int)]);
                    write_csv(&cli.out, &csv)
                }
                "ell" => {
                    let lo = dca::extremal_length(&rect, EllVariant::Omega)
                        .map_err(|e| e.to_string())?;
                    let lc = dca::extremal_length(&rect, EllVariant::Closure)
                        .map_err(|e| e.to_string())?;
                    let ld = dca::extremal_length(&rect, EllVariant::Dual).ok();
                    let mut csv = harness::csv_with_provenance(
                        "ell.csv", seed, 0, "ell_omega,ell_closure,ell_dual",
                    );
                    csv.row(&[ff(lo), ff(lc), ld.map(ff).unwrap_or_default()]);
                    write_csv(&cli.out, &csv)
                }
                "separator" => {
                    let a = rect.ext_arc(ARC_AB);
                    let b = rect.ext_arc(ARC_CD);
                    let z = net.z_ext(&a, &b).map_err(|e| e.to_string())?;
                    let cut =
                        dca::find_separator(rect.domain(), &net, &a, &b, z.sqrt().min(1.0))
                            .map_err(|e| e.to_string())?;
                    let mut csv = harness::csv_with_provenance(
                        "separator.csv",
                        seed,
                        0,
                        "k,cut_edges,z_a,z_b,z_ab,factorization_ratio",
                    );
                    csv.row(&[
                        ff(cut.k),
                        cut.cut_edges.len().to_string(),
                        ff(cut.z_a),
                        ff(cut.z_b),
                        ff(z),
                        ff(z / (cut.z_a * cut.z_b)),
                    ]);
                    write_csv(&cli.out, &csv)
                }
                _ => {
                    let rep = dca::dca_inequality_report(&rect).map_err(|e| e.to_string())?;
                    let mut csv = harness::csv_with_provenance(
                        "dca_report.csv",
                        seed,
                        0,
                        "ell_omega,ell_closure,ell_dual,self_duality,triangle_ratio,rectangle_ratio,z_ext,z_int,separator_ratio",
                    );
                    csv.row(&[
                        ff(rep.ell_omega),
                        ff(rep.ell_closure),
                        rep.ell_dual.map(ff).unwrap_or_default(),
                        ff(rep.self_duality_product),
                        ff(rep.triangle_ratio),
                        ff(rep.rectangle_ratio),
                        ff(rep.z_ext_abcd),
                        ff(rep.z_int_abcd),
                        rep.separator_ratio.map(ff).unwrap_or_default(),
                    ]);
                    write_csv(&cli.out, &csv)
                }
            }
        }
        Cmd::Fk { op, domain, marks, bc, p, sweeps, burn_in } => {
            let rect = load_rect(&domain, &marks)?;
            let dom = rect.domain();
            let wiring = wiring_for(&bc, &rect)?;
            let params = ModelParams { p, q: 2.0 };
            let run = RunParams {
                sweeps,
                burn_in,
                batches: 32,
                chains: 1,
                seed,
                purpose: "cli",
            };
            match op.as_str() {
                "exact" | "crossing" if dom.n_edges() <= fk::DEFAULT_EDGE_CAP && op == "exact" => {
                    let ab = rect.arc_vertices(ARC_AB);
                    let cd = rect.arc_vertices(ARC_CD);
                    let probs = fk::exact_probabilities(
                        dom,
                        &wiring,
                        params,
                        fk::DEFAULT_EDGE_CAP,
                        &mut [&mut |v: &mut fk::ConfigView| v.connected_raw(&ab, &cd)],
                    )
                    .map_err(|e| e.to_string())?;
                    let mut csv = harness::csv_with_provenance(
                        "fk_exact.csv", seed, 0, "event,probability",
                    );
                    csv.row(&["crossing_ab_cd".into(), ff(probs[0])]);
                    write_csv(&cli.out, &csv)
                }
                "sample" | "crossing" | "exact" => {
                    let ab = rect.arc_vertices(ARC_AB);
                    let cd = rect.arc_vertices(ARC_CD);
                    let est = fk::estimate_event(dom, &wiring, params, run, move |chain| {
                        let uf = chain.raw_clusters();
                        ab.iter().any(|&u| cd.iter().any(|&v| uf.same(u, v)))
                    })
                    .map_err(|e| e.to_string())?;
                    let mut csv = harness::csv_with_provenance(
                        "fk_crossing.csv",
                        seed,
                        0,
                        "event,mean,stderr,n_sweeps,seed",
                    );
                    csv.row(&[
                        "crossing_ab_cd".into(),
                        ff(est.mean),
                        ff(est.stderr),
                        est.n_sweeps.to_string(),
                        est.seed.to_string(),
                    ]);
                    write_csv(&cli.out, &csv)
                }
                "n-report" => {
                    let (pruned, _) = rect.prune_bridges();
                    let rep = fk::second_moment_report(
                        &pruned,
                        params,
                        if pruned.domain().n_edges() <= fk::DEFAULT_EDGE_CAP {
                            fk::SecondMomentMode::Exact { cap: fk::DEFAULT_EDGE_CAP }
                        } else {
                            fk::SecondMomentMode::MonteCarlo { run }
                        },
                    )
                    .map_err(|e| e.to_string())?;
                    let mut csv = harness::csv_with_provenance(
                        "n_report.csv",
                        seed,
                        0,
                        "e_n,e_n2,p_pos,cs_slack,prop41,prop43,cor44,prop46",
                    );
                    csv.row(&[
                        ff(rep.e_n),
                        ff(rep.e_n2),
                        ff(rep.p_pos),
                        ff(rep.cs_slack),
                        ff(rep.prop41_ratio),
                        rep.prop43_ratio.map(ff).unwrap_or_default(),
                        rep.cor44_ratio.map(ff).unwrap_or_default(),
                        ff(rep.prop46_ratio),
                    ]);
                    write_csv(&cli.out, &csv)
                }
                _ => {
                    let rep = fk::dual_identity_check(&rect, params, fk::DEFAULT_EDGE_CAP)
                        .map_err(|e| e.to_string())?;
                    let mut csv = harness::csv_with_provenance(
                        "dual_check.csv",
                        seed,
                        0,
                        "primal_no_crossing,dual_crossing,residual,event_mismatches",
                    );
                    csv.row(&[
                        ff(rep.primal_no_crossing),
                        ff(rep.dual_crossing),
                        ff(rep.residual),
                        rep.event_mismatches.to_string(),
                    ]);
                    write_csv(&cli.out, &csv)?;
                    if rep.residual > 1e-12 || rep.event_mismatches > 0 {
                        return Err(format!("duality identity violated: {rep:?}"));
                    }
                    Ok(())
                }
            }
        }
        Cmd::Arms {
            op,
            sigma,
            geometry,
            n,
            big_n,
            bc,
            landing,
            delta,
            ratios,
            sweeps,
            burn_in,
            disjoint,
        } => {
            let word: Vec<u8> =
                sigma.chars().map(|c| if c == '1' { 1 } else { 0 }).collect();
            let geom = if geometry == "full" { Geometry::Full } else { Geometry::Half };
            let mode = if disjoint == "edge" { Disjointness::Edge } else { Disjointness::Vertex };
            let bc = if bc == "wired" { Bc::Wired } else { Bc::Free };
            let run = RunParams {
                sweeps,
                burn_in,
                batches: 32,
                chains: 1,
                seed,
                purpose: "arms-cli",
            };
            match op.as_str() {
                "event" => {
                    // Sample one configuration and report the verdict plus
                    // separation when delta is given.
                    let spec = ArmSpec {
                        word: word.clone(),
                        n,
                        big_n,
                        geometry: geom,
                        disjointness: mode,
                    };
                    let m = 2 * spec.big_n;
                    let domain = arms::box_domain(m);
                    let wiring = match bc {
                        Bc::Free => WiringPartition::free(),
                        Bc::Wired => WiringPartition::wired(&domain),
                    };
                    let mut chain = fk::SwChain::new(
                        &domain,
                        &wiring,
                        ModelParams::critical(),
                        fkrsw::rng::stream(seed, "arms-event", 0),
                    )
                    .map_err(|e| e.to_string())?;
                    for _ in 0..burn_in {
                        chain.sweep();
                    }
                    chain.sweep();
                    let lat = arms::ArmLattice::new(n, big_n, geom);
                    let open = chain.open_edges().to_vec();
                    let omega = arms::BoxOmega { domain: &domain, open: &open };
                    let verdict = match &landing {
                        Some(l) => {
                            let zones: arms::LandingZones = l
                                .split_whitespace()
                                .filter_map(|t| {
                                    let (a, b) = t.split_once(':')?;
                                    Some((a.parse().ok()?, b.parse().ok()?))
                                })
                                .collect();
                            let occurs =
                                arms::decide_with_landing(&lat, &omega, &word, &zones, mode)
                                    .map_err(|e| e.to_string())?;
                            println!("event={occurs} (landing-restricted)");
                            occurs
                        }
                        None => {
                            let v = arms::detect_arms(
                                &lat,
                                &omega,
                                &word,
                                mode,
                                arms::Method::Greedy,
                                0,
                            )
                            .map_err(|e| e.to_string())?;
                            println!("event={}", v.occurs);
                            if v.occurs {
                                if let Some(d) = delta {
                                    let sep = arms::well_separated(
                                        &lat,
                                        &omega,
                                        &v.witnesses,
                                        arms::SeparationParams {
                                            delta: d,
                                            max_candidates: 24,
                                        },
                                    );
                                    println!("well_separated(delta={d})={sep}");
                                }
                            }
                            v.occurs
                        }
                    };
                    let _ = verdict;
                    Ok(())
                }
                "prob" => {
                    let spec = ArmSpec {
                        word,
                        n,
                        big_n,
                        geometry: geom,
                        disjointness: mode,
                    };
                    let est = arms::arm_probability(&spec, bc, run, 2);
                    let mut csv = harness::csv_with_provenance(
                        "arm_prob.csv",
                        seed,
                        0,
                        "sigma,n,N,bc,mean,stderr,samples,seed",
                    );
                    csv.row(&[
                        sigma,
                        n.to_string(),
                        big_n.to_string(),
                        bc.label().to_string(),
                        ff(est.mean),
                        ff(est.stderr),
                        est.n_sweeps.to_string(),
                        est.seed.to_string(),
                    ]);
                    write_csv(&cli.out, &csv)
                }
                _ => {
                    let pairs: Vec<(i32, i32)> = ratios
                        .split_whitespace()
                        .filter_map(|t| t.parse::<i32>().ok())
                        .map(|r| (n, n * r))
                        .collect();
                    let scan = arms::exponent_scan(&word, geom, &pairs, run, 2);
                    let mut csv = harness::csv_with_provenance(
                        "arm_scan.csv",
                        seed,
                        0,
                        "sigma,n,N,bc,mean,stderr,samples,seed",
                    );
                    for r in &scan.rows {
                        csv.row(&[
                            r.sigma.clone(),
                            r.n.to_string(),
                            r.big_n.to_string(),
                            r.bc.to_string(),
                            ff(r.mean),
                            ff(r.stderr),
                            r.samples.to_string(),
                            r.seed.to_string(),
                        ]);
                    }
                    println!(
                        "slope free = {:.4} ± {:.4}, wired = {:.4} ± {:.4}",
                        scan.slope_free.0,
                        scan.slope_free.1,
                        scan.slope_wired.0,
                        scan.slope_wired.1
                    );
                    write_csv(&cli.out, &csv)
                }
            }
        }
        Cmd::Spin { op: _, domain, marks, sweeps, burn_in } => {
            let rect = load_rect(&domain, &marks)?;
            let run = RunParams {
                sweeps,
                burn_in,
                batches: 32,
                chains: 1,
                seed,
                purpose: "spin-cli",
            };
            let records =
                spin::spin_crossing_report(&[rect], ModelParams::critical(), run)
                    .map_err(|e| e.to_string())?;
            let r = &records[0];
            let mut csv = harness::csv_with_provenance(
                "spin_crossing.csv",
                seed,
                0,
                "ell_omega,minus_crossing_mean,stderr,exclusion_violations,n_sweeps",
            );
            csv.row(&[
                ff(r.ell_omega),
                ff(r.estimate.mean),
                ff(r.estimate.stderr),
                r.exclusion_violations.to_string(),
                r.estimate.n_sweeps.to_string(),
            ]);
            write_csv(&cli.out, &csv)?;
            if r.exclusion_violations > 0 {
                return Err("topological exclusion violated".into());
            }
            Ok(())
        }
        Cmd::Corpus { count, min_size, max_size, ell_min, ell_max } => {
            let spec = CorpusSpec {
                count,
                min_size,
                max_size,
                ell_min,
                ell_max,
                seed,
                ..CorpusSpec::default()
            };
            let corpus = harness::corpus_generate(&spec).map_err(|e| e.to_string())?;
            std::fs::create_dir_all(&cli.out).map_err(|e| e.to_string())?;
            for e in &corpus {
                let path = cli.out.join(format!("{}.domain", e.name));
                std::fs::write(&path, e.to_text()).map_err(|er| er.to_string())?;
                println!("wrote {} (ell = {:.3})", path.display(), e.ell_omega);
            }
            Ok(())
        }
        Cmd::Run { config } => {
            let text = std::fs::read_to_string(&config).map_err(|e| e.to_string())?;
            let cfg = Config::parse(&text).map_err(|e| e.to_string())?;
            let outputs = harness::run_experiment(&cfg).map_err(|e| e.to_string())?;
            for csv in &outputs {
                write_csv(&cli.out, csv)?;
            }
            Ok(())
        }
        Cmd::Render { domain, marks } => {
            let rect = load_rect(&domain, &marks)?;
            print!("{}", harness::render(&rect, None));
            Ok(())
        }
    }
}
