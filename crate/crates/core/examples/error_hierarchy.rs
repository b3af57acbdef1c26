//! Missed erasures, Pauli errors and heralded erasures at the same rate, and
//! the single-event census on the four-qubit code.

use erasure_qec::code::CheckBasis;
use erasure_qec::decoder::DecoderKind;
use erasure_qec::montecarlo::{d2_single_event_census, hierarchy_experiment};

fn main() -> erasure_qec::Result<()> {
    let rep = hierarchy_experiment(3, 0.02, 50_000, 5, DecoderKind::UnionFind)?;
    for (label, row) in [("missed", &rep.missed), ("pauli", &rep.pauli), ("heralded", &rep.heralded)] {
        println!("{label:>9}: p_L = {:.2e} ({} / {})", row.p_l, row.failures, row.shots);
    }
    println!("gaps: {:.1} sigma, {:.1} sigma", rep.gap_missed_pauli, rep.gap_pauli_heralded);
    let c = d2_single_event_census(CheckBasis::X, DecoderKind::Peeling)?;
    println!("d=2 census: {c:#?}");
    Ok(())
}
