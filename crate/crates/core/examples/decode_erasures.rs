//! Decodes sampled distance-5 shots with peeling and union-find and reports
//! how often each one fails.

use erasure_qec::circuit::{build_code_capacity_circuit, sample_shots, CheckSpec, SiteNoise};
use erasure_qec::code::{build_rotated_surface_code, CheckBasis};
use erasure_qec::decoder::{build_decoding_graph, DecoderKind, ErasureSet};

fn main() -> erasure_qec::Result<()> {
    let code = build_rotated_surface_code(5)?;
    let circuit = build_code_capacity_circuit(&code, &SiteNoise::new(0.25, 0.02)?, &CheckSpec::PERFECT, CheckBasis::X)?;
    let graph = build_decoding_graph(&circuit)?;
    println!("graph: {} detectors, {} edges", graph.num_detectors, graph.num_edges());
    let shots = sample_shots(&circuit, 20_000, 3)?;
    for kind in [DecoderKind::Peeling, DecoderKind::UnionFind] {
        let mut decoder = kind.build();
        let mut fails = 0;
        for shot in &shots {
            let erasure = ErasureSet::from_flags(&graph, &shot.flags);
            let corr = decoder.decode(&graph, &erasure, &shot.detectors)?;
            fails += (corr.flips(0) != shot.observables[0]) as u32;
        }
        println!("{:>10}: {fails} / {} failures", kind.as_str(), shots.len());
    }
    Ok(())
}
