use fkrsw::fk::{ModelParams, RunParams};
use fkrsw::harness::{self, CorpusSpec};

fn main() {
    let spec = CorpusSpec { count: 12, ell_max: 2.0, seed: 2027, ..CorpusSpec::default() };
    let corpus = harness::corpus_generate(&spec).unwrap();
    let rects: Vec<_> = corpus.iter().map(|e| e.rect.clone()).collect();
    let run = RunParams { sweeps: 20_000, burn_in: 1000, batches: 32, chains: 1, seed: 99_000, purpose: "accept-9" };
    let records = fkrsw::spin::spin_crossing_report(&rects, ModelParams::critical(), run).unwrap();
    for (e, r) in corpus.iter().zip(&records) {
        println!("{} tag={} ell={:.3} mean={:.5} se={:.5} adj={:.5} |ab|={} |cd|={} n={}",
            e.name, e.tag.label(), r.ell_omega, r.estimate.mean, r.estimate.stderr,
            r.estimate.mean - 3.0 * r.estimate.stderr,
            e.rect.arc_vertices(fkrsw::rect::ARC_AB).len(),
            e.rect.arc_vertices(fkrsw::rect::ARC_CD).len(),
            e.rect.domain().len());
    }
}
