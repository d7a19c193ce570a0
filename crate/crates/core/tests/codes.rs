use std::collections::BTreeSet;

use mpqc::backend::physical::QubitBackend;
use mpqc::backend::statevector::StateVector;
use mpqc::backend::{pure_density, trace_distance, Gate, Pauli, C64};
use mpqc::css::CssCode;
use mpqc::gf2::{BinaryCode, Bits};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn amps(u: f64, phi: f64) -> [C64; 2] {
    [C64::new(u.sqrt(), 0.0), C64::from_polar((1.0 - u).sqrt(), phi)]
}

fn pauli(i: u8) -> Pauli {
    [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][i as usize % 4]
}

proptest! {
    #[test]
    fn hamming_corrects_single_errors(msg in 0u64..16, pos in 0usize..8) {
        let code = BinaryCode::hamming7();
        let c = code.encode(&Bits::from_u64(4, msg));
        let mut word = c.clone();
        if pos < 7 {
            word.flip(pos);
        }
        let r = code.syndrome_decode(&word);
        prop_assert!(r.is_corrected());
        prop_assert_eq!(&r.codeword, &c);
        prop_assert_eq!(r.errors, if pos < 7 { BTreeSet::from([pos]) } else { BTreeSet::new() });
    }

    #[test]
    fn hamming_recovers_two_erasures(msg in 0u64..16, a in 0usize..7, b in 0usize..7, junk in any::<u8>()) {
        let code = BinaryCode::hamming7();
        let c = code.encode(&Bits::from_u64(4, msg));
        let erased = BTreeSet::from([a, b]);
        let mut word = c.clone();
        for (i, &j) in erased.iter().enumerate() {
            word.set(j, (junk >> i) & 1 == 1);
        }
        let r = code.erasure_decode(&word, &erased).unwrap();
        prop_assert_eq!(r.codeword, c);
    }

    #[test]
    fn parse_round_trips(rows in proptest::collection::vec(1u64..128, 1..4)) {
        let gen: Vec<Bits> = rows.iter().map(|&r| Bits::from_u64(7, r)).collect();
        if let Ok(code) = BinaryCode::from_generator(7, gen) {
            let back = BinaryCode::parse(&code.to_text()).unwrap();
            prop_assert!(back.same_code(&code));
        }
    }

    #[test]
    fn dual_of_dual_is_original(rows in proptest::collection::vec(1u64..128, 1..5)) {
        let gen: Vec<Bits> = rows.iter().map(|&r| Bits::from_u64(7, r)).collect();
        if let Ok(code) = BinaryCode::from_generator(7, gen) {
            prop_assert!(code.dual().dual().same_code(&code));
            prop_assert_eq!(code.k() + code.dual().k(), 7);
        }
    }

    /// Encode, hit one qubit with a Pauli, correct and decode.
    #[test]
    fn steane_round_trip_with_one_error(u in 0.0f64..1.0, phi in 0.0f64..6.283, pos in 0usize..7, p in 0u8..4, seed in any::<u64>()) {
        let code = CssCode::steane();
        let psi = amps(u, phi);
        let mut sv = StateVector::default();
        let q = sv.alloc_state(psi);
        let qs = code.encoding_circuit().encode(&mut sv, q).unwrap();
        if let Some(g) = pauli(p).gate(qs[pos]) {
            sv.apply(&g).unwrap();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (out, report) = code.correct_and_decode(&mut sv, &qs, &mut rng).unwrap();
        let rho = QubitBackend::single_density(&mut sv, out).unwrap();
        prop_assert!(trace_distance(&rho, &pure_density(&psi)) < 1e-10);
        prop_assert!(report.positions().is_subset(&BTreeSet::from([pos])));
    }

    /// Transversal H, P and CNOT act as the logical gates on encoded random states.
    #[test]
    fn transversal_gates_are_logical(u in 0.0f64..1.0, phi in 0.0f64..6.283, which in 0u8..3, seed in any::<u64>()) {
        let code = CssCode::steane();
        let psi = amps(u, phi);
        let mut sv = StateVector::default();
        let a = sv.alloc_state(psi);
        let b = sv.alloc_state(amps(0.3, 1.0));
        let qa = code.encoding_circuit().encode(&mut sv, a).unwrap();
        let qb = code.encoding_circuit().encode(&mut sv, b).unwrap();
        for j in 0..7 {
            let g = match which {
                0 => Gate::H(qa[j]),
                1 => Gate::P(qa[j]),
                _ => Gate::Cnot(qb[j], qa[j]),
            };
            sv.apply(&g).unwrap();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (out_b, _) = code.correct_and_decode(&mut sv, &qb, &mut rng).unwrap();
        let (out_a, _) = code.correct_and_decode(&mut sv, &qa, &mut rng).unwrap();

        let mut ideal = StateVector::default();
        let ia = ideal.alloc_state(psi);
        let ib = ideal.alloc_state(amps(0.3, 1.0));
        // transversal P on Steane is logical P† on the bare qubit
        let g = match which {
            0 => Gate::H(ia),
            1 => Gate::Pdg(ia),
            _ => Gate::Cnot(ib, ia),
        };
        ideal.apply(&g).unwrap();
        let got = sv.reduced_density(&[out_a, out_b]).unwrap();
        let want = ideal.reduced_density(&[ia, ib]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                prop_assert!((got[i][j] - want[i][j]).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn steane_passes_transversality_check() {
    let r = CssCode::steane().check_transversal_cliffords();
    assert!(r.ok, "{:?}", r.reasons);
}

#[test]
fn mutated_codes_fail_with_reason() {
    let rows: Vec<Bits> = ["111111000", "110000110", "101000101", "100100011"].iter().map(|s| s.parse().unwrap()).collect();
    let v = BinaryCode::from_generator(9, rows).unwrap().dual();
    let r = CssCode::new(v.clone(), v).unwrap().check_transversal_cliffords();
    assert!(r.reasons.iter().any(|s| s.contains("weight 6")));
    let c = CssCode::new(BinaryCode::repetition(3), BinaryCode::full_space(3)).unwrap();
    assert!(c.check_transversal_cliffords().reasons.iter().any(|r| r.starts_with("property 1")));
}
