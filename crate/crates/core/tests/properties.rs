use erasure_qec::channel::{pauli_twirl, validate_cptp, CMatrix, DenseChannel};
use erasure_qec::circuit::{build_code_capacity_circuit, sample_shots, CheckSpec, SiteNoise};
use erasure_qec::code::{build_rotated_surface_code, logical_class, syndrome_of, CheckBasis, StabilizerCode};
use erasure_qec::config::RunConfig;
use erasure_qec::decoder::{build_decoding_graph, peel_decode, union_find_decode, ErasureSet};
use erasure_qec::montecarlo::{least_squares, wilson_interval};
use erasure_qec::pauli::{Pauli, PauliOp};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn code(d: usize) -> StabilizerCode {
    build_rotated_surface_code(d).unwrap()
}

fn pauli_op(n: usize, bits: &[(bool, bool)]) -> PauliOp {
    let x: Vec<bool> = bits.iter().take(n).map(|b| b.0).collect();
    let z: Vec<bool> = bits.iter().take(n).map(|b| b.1).collect();
    PauliOp::from_bools(&x, &z).unwrap()
}

fn stabilizer_product(code: &StabilizerCode, pick: &[bool]) -> PauliOp {
    let mut s = PauliOp::identity(code.n);
    for (stab, &on) in code.stabilizers.iter().zip(pick) {
        if on {
            s.mul_assign(&stab.op).unwrap();
        }
    }
    s
}

/// Kraus operators cut from a random isometry `C^2 -> C^(2k)`.
fn random_channel(k: usize, entries: &[(f64, f64)]) -> DenseChannel {
    let m = DMatrix::from_fn(2 * k, 2, |r, c| {
        let (re, im) = entries[(r * 2 + c) % entries.len()];
        Complex64::new(re + 0.01 * (r + 3 * c) as f64, im)
    });
    let q = m.qr().q();
    let kraus: Vec<CMatrix> = (0..k).map(|i| q.rows(2 * i, 2).into_owned()).collect();
    DenseChannel::new(kraus).unwrap()
}

#[test]
fn generators_commute_and_logicals_anticommute() {
    for d in [3, 5, 7, 9] {
        let c = code(d);
        for a in &c.stabilizers {
            for b in &c.stabilizers {
                assert!(a.op.commutes(&b.op).unwrap());
            }
            assert!(a.op.commutes(&c.logical_x).unwrap());
            assert!(a.op.commutes(&c.logical_z).unwrap());
        }
        assert!(c.logical_x.anticommutes(&c.logical_z).unwrap());
        assert_eq!(c.stabilizers.len(), d * d - 1);
    }
}

#[test]
fn no_low_weight_logical_at_d3() {
    let c = code(3);
    let mut ops = Vec::new();
    for q in 0..9 {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            ops.push(PauliOp::single(9, q, p));
        }
    }
    let singles = ops.clone();
    for (i, a) in singles.iter().enumerate() {
        for b in &singles[i + 1..] {
            ops.push(a.mul(b).unwrap());
        }
    }
    for op in ops {
        let silent = syndrome_of(&c, &op).unwrap().iter().all(|&s| !s);
        if silent {
            assert_eq!(logical_class(&c, &op).unwrap(), Pauli::I, "{op:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stabilizer_products_are_silent(d in prop::sample::select(vec![3usize, 5, 7]), pick in prop::collection::vec(any::<bool>(), 48)) {
        let c = code(d);
        let s = stabilizer_product(&c, &pick);
        prop_assert!(syndrome_of(&c, &s).unwrap().iter().all(|&b| !b));
        prop_assert_eq!(logical_class(&c, &s).unwrap(), Pauli::I);
    }

    #[test]
    fn logical_class_ignores_stabilizers(
        d in prop::sample::select(vec![3usize, 5]),
        lx in any::<bool>(),
        lz in any::<bool>(),
        a in prop::collection::vec(any::<bool>(), 24),
        b in prop::collection::vec(any::<bool>(), 24),
    ) {
        let c = code(d);
        let mut logical = PauliOp::identity(c.n);
        if lx {
            logical.mul_assign(&c.logical_x).unwrap();
        }
        if lz {
            logical.mul_assign(&c.logical_z).unwrap();
        }
        let err = logical.mul(&stabilizer_product(&c, &a)).unwrap();
        let moved = err.mul(&stabilizer_product(&c, &b)).unwrap();
        prop_assert!(syndrome_of(&c, &err).unwrap().iter().all(|&s| !s));
        prop_assert_eq!(logical_class(&c, &err).unwrap(), Pauli::from_bits(lx, lz));
        prop_assert_eq!(logical_class(&c, &err).unwrap(), logical_class(&c, &moved).unwrap());
    }

    #[test]
    fn syndrome_is_linear(
        a in prop::collection::vec(any::<(bool, bool)>(), 25),
        b in prop::collection::vec(any::<(bool, bool)>(), 25),
    ) {
        let c = code(5);
        let (pa, pb) = (pauli_op(25, &a), pauli_op(25, &b));
        let sa = syndrome_of(&c, &pa).unwrap();
        let sb = syndrome_of(&c, &pb).unwrap();
        let sab = syndrome_of(&c, &pa.mul(&pb).unwrap()).unwrap();
        let xor: Vec<bool> = sa.iter().zip(&sb).map(|(x, y)| x ^ y).collect();
        prop_assert_eq!(sab, xor);
    }

    #[test]
    fn twirl_of_random_channel_is_a_distribution(
        k in 1usize..5,
        entries in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4..20),
    ) {
        let ch = random_channel(k, &entries);
        prop_assert!(validate_cptp(&ch));
        let t = pauli_twirl(&ch).unwrap();
        let probs = t.probs();
        prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(probs.iter().all(|&p| p >= -1e-12));
    }

    #[test]
    fn wilson_interval_contains_estimate(shots in 1u64..100_000, frac in 0.0f64..=1.0) {
        let failures = ((shots as f64) * frac).floor() as u64;
        let (lo, hi) = wilson_interval(failures, shots);
        let p = failures as f64 / shots as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-15 && p <= hi + 1e-15 && hi <= 1.0);
    }

    #[test]
    fn least_squares_recovers_power_laws(exp in 1.0f64..8.0, scale in 0.01f64..10.0) {
        let xs: Vec<f64> = [0.01f64, 0.02, 0.05, 0.1].iter().map(|r| r.ln()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| scale.ln() + exp * x).collect();
        let fit = least_squares(&xs, &ys).unwrap();
        prop_assert!((fit.slope - exp).abs() < 1e-9);
    }

    #[test]
    fn sampling_is_deterministic(seed in any::<u64>(), e in 0.0f64..0.3, p in 0.0f64..0.3) {
        let c = code(3);
        let circuit = build_code_capacity_circuit(&c, &SiteNoise::new(e, p).unwrap(), &CheckSpec::PERFECT, CheckBasis::X).unwrap();
        let a = sample_shots(&circuit, 50, seed).unwrap();
        let b = sample_shots(&circuit, 50, seed).unwrap();
        prop_assert_eq!(&a, &b);
        for shot in &a {
            prop_assert_eq!(shot.detectors.len(), circuit.num_detectors());
        }
    }

    #[test]
    fn decoders_reproduce_the_syndrome(
        d in prop::sample::select(vec![3usize, 5, 7]),
        basis in prop::sample::select(vec![CheckBasis::X, CheckBasis::Z]),
        fault_bits in prop::collection::vec(any::<u8>(), 60),
        erase_bits in prop::collection::vec(any::<u8>(), 60),
    ) {
        let c = code(d);
        let circuit = build_code_capacity_circuit(&c, &SiteNoise::new(0.1, 0.1).unwrap(), &CheckSpec::PERFECT, basis).unwrap();
        let graph = build_decoding_graph(&circuit).unwrap();
        let m = graph.num_edges();
        let faults: Vec<usize> = fault_bits.iter().map(|&b| b as usize % m).take(d).collect();
        let syndrome = graph.syndrome_of_edges(&faults);
        let uf = union_find_decode(&graph, &ErasureSet::default(), &syndrome).unwrap();
        prop_assert!(graph.is_valid(&uf, &syndrome));

        // Erasures covering the faults make the syndrome peelable.
        let mut erased: Vec<usize> = erase_bits.iter().map(|&b| b as usize % m).take(d).collect();
        erased.extend(&faults);
        let erasure = ErasureSet::new(erased);
        let peeled = peel_decode(&graph, &erasure, &syndrome).unwrap();
        prop_assert!(graph.is_valid(&peeled, &syndrome));
        prop_assert!(peeled.edges.iter().all(|e| erasure.edges().contains(e)));
        let uf = union_find_decode(&graph, &erasure, &syndrome).unwrap();
        prop_assert!(graph.is_valid(&uf, &syndrome));
    }

    #[test]
    fn config_shot_override_keeps_budget_ratio(shots in 1u64..1_000_000, ratio in 1u64..200) {
        let text = format!(
            "seed = 1\n[[experiment]]\nname = \"a\"\nmodel = \"code_capacity\"\ndistances = [3]\naxis = \"e\"\nrates = [0.1]\nshots = 100\nmax_shots = {}\nmin_failures = 5\n",
            100 * ratio
        );
        let mut cfg = RunConfig::parse(&text).unwrap();
        cfg.override_shots(shots);
        prop_assert_eq!(cfg.experiment[0].shots, shots);
        prop_assert_eq!(cfg.experiment[0].max_shots, Some(ratio * shots));
        prop_assert!(cfg.validate().is_ok());
    }
}
