//! Single-error syndromes of the four-qubit code and what a flagged location
//! adds: the syndrome names the error type, the flag names the qubit.

use erasure_qec::code::{build_d2_surface_code, logical_class, syndrome_of};
use erasure_qec::decoder::{ml_decode_bruteforce, ErrorPrior};
use erasure_qec::pauli::{Pauli, PauliOp};

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn main() -> erasure_qec::Result<()> {
    let code = build_d2_surface_code();
    for p in [Pauli::X, Pauli::Y, Pauli::Z] {
        for q in 0..4 {
            let err = PauliOp::single(4, q, p);
            let syn = syndrome_of(&code, &err)?;
            let blind = ml_decode_bruteforce(&code, &ErrorPrior::uniform(4, 0.0, 0.01), &[], &syn)?;
            let flagged = ml_decode_bruteforce(&code, &ErrorPrior::uniform(4, 0.01, 0.0), &[q], &syn)?;
            let ok = |c: &PauliOp| logical_class(&code, &err.mul(c).unwrap()).unwrap() == Pauli::I;
            println!(
                "{p}{}: syndrome {}  unflagged {}  flagged {}",
                q + 1,
                bits(&syn),
                if ok(&blind.correction) { "corrected" } else { "logical error" },
                if ok(&flagged.correction) { "corrected" } else { "logical error" },
            );
        }
    }
    Ok(())
}
