use std::collections::BTreeSet;

use mpqc::adversary::{Adversary, GridRole};
use mpqc::backend::register::Prep;
use mpqc::backend::{pure_density, trace_distance, BackendKind, Mat2};
use mpqc::circuit::Circuit;
use mpqc::netsim::NetworkConfig;
use mpqc::protocol::{mpqc_run, vqss_share, vqss_verify, vqss_zero_verify, RunResult, Session};

fn cnot() -> Circuit {
    Circuit::parse("WIRES 2\nCNOT 1 2\nOUT 1 1\nOUT 2 2\n").unwrap()
}

fn out(r: &RunResult, w: usize) -> Mat2 {
    *r.outputs[&w].1.value().expect("non-bottom output")
}

fn rho(p: &Prep) -> Mat2 {
    pure_density(&p.amplitudes())
}

#[test]
fn cnot_frame_level2_honest() {
    let cfg = NetworkConfig::new(7, 1, 3, BackendKind::Frame);
    let r = mpqc_run(&cfg, &cnot(), &[Prep::One, Prep::Zero], Adversary::honest()).unwrap();
    assert!(!r.abort);
    assert!(r.sets.global.is_empty());
    assert!(trace_distance(&out(&r, 0), &rho(&Prep::One)) < 1e-12);
    assert!(trace_distance(&out(&r, 1), &rho(&Prep::One)) < 1e-12);
    assert_eq!(r.ledger.max_hwm(), 28);
}

#[test]
fn cnot_statevector_level1_honest() {
    let mut cfg = NetworkConfig::new(7, 1, 5, BackendKind::Statevector);
    cfg.level = 1;
    let r = mpqc_run(&cfg, &cnot(), &[Prep::Plus, Prep::Zero], Adversary::honest()).unwrap();
    assert!(!r.abort);
    // Bell pair: both reduced states maximally mixed
    let half = [[0.5, 0.0], [0.0, 0.5]];
    for w in 0..2 {
        let m = out(&r, w);
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[i][j].re - half[i][j]).abs() < 1e-9 && m[i][j].im.abs() < 1e-9, "{m:?}");
            }
        }
    }
}

#[test]
fn cnot_tableau_level2_honest() {
    let cfg = NetworkConfig::new(7, 1, 8, BackendKind::Tableau);
    let r = mpqc_run(&cfg, &cnot(), &[Prep::One, Prep::Plus], Adversary::honest()).unwrap();
    assert!(!r.abort);
    assert!(trace_distance(&out(&r, 0), &rho(&Prep::One)) < 1e-12);
    assert!(trace_distance(&out(&r, 1), &rho(&Prep::Minus)) > 1.0 - 1e-9 || trace_distance(&out(&r, 1), &rho(&Prep::Plus)) < 1e-12);
}

#[test]
fn t_gate_frame_level2() {
    let c = Circuit::parse("WIRES 1\nT 1\nOUT 1 1\n").unwrap();
    let cfg = NetworkConfig::new(7, 1, 4, BackendKind::Frame);
    let r = mpqc_run(&cfg, &c, &[Prep::Plus], Adversary::honest()).unwrap();
    assert!(!r.abort);
    assert!(trace_distance(&out(&r, 0), &rho(&Prep::Magic)) < 1e-12);
    assert!(r.ledger.max_hwm() <= 77, "{}", r.ledger.max_hwm());
}

#[test]
fn t_gate_statevector_level1() {
    let c = Circuit::parse("WIRES 1\nT 1\nOUT 1 1\n").unwrap();
    for seed in 0..4 {
        let mut cfg = NetworkConfig::new(7, 1, seed, BackendKind::Statevector);
        cfg.level = 1;
        let r = mpqc_run(&cfg, &c, &[Prep::Plus], Adversary::honest()).unwrap();
        assert!(trace_distance(&out(&r, 0), &rho(&Prep::Magic)) < 1e-9);
    }
}

#[test]
fn two_cheaters_abort() {
    let cfg = NetworkConfig::new(7, 1, 1, BackendKind::Frame);
    let adv = Adversary::by_name("two-cheater-collusion", 7, None, 2).unwrap();
    let r = mpqc_run(&cfg, &cnot(), &[Prep::One, Prep::Zero], adv).unwrap();
    assert!(r.abort);
    assert!(r.all_honest_bottom());
}

#[test]
fn single_cheaters_are_localized() {
    for name in ["single-x-on-share", "z-spray", "lie-on-broadcast", "corrupt-before-reconstruct", "bad-own-encode"] {
        let cfg = NetworkConfig::new(7, 1, 2, BackendKind::Frame);
        let adv = Adversary::by_name(name, 7, None, 3).unwrap();
        let r = mpqc_run(&cfg, &cnot(), &[Prep::One, Prep::Zero], adv).unwrap();
        assert!(!r.abort, "{name}");
        assert!(r.sets.global.is_subset(&BTreeSet::from([6])), "{name}: {:?}", r.sets.global);
        assert!(trace_distance(&out(&r, 0), &rho(&Prep::One)) < 1e-12, "{name}");
        assert!(trace_distance(&out(&r, 1), &rho(&Prep::One)) < 1e-12, "{name}");
    }
}

#[test]
fn vqss_round_counts() {
    let cfg = NetworkConfig::new(7, 2, 1, BackendKind::Frame);
    let mut sess = Session::new(&cfg, Adversary::honest()).unwrap();
    let g = vqss_share(&mut sess, 0, &Prep::Plus, GridRole::Data).unwrap();
    let rep = vqss_verify(&mut sess, &g).unwrap();
    assert!(rep.passed);
    assert_eq!(rep.iterations, 8);
    assert!(rep.apparent.is_empty());
    let one = vqss_share(&mut sess, 1, &Prep::One, GridRole::Zero).unwrap();
    let rep = vqss_zero_verify(&mut sess, &one).unwrap();
    assert!(!rep.passed && rep.nonzero);
}

#[test]
fn t_circuit_survives_single_cheaters() {
    let c = Circuit::parse("WIRES 2\nANC 3\nH 1\nCNOT 1 2\nT 2\nCNOT 2 3\nOUT 1 1\nOUT 2 2\nOUT 3 3\n").unwrap();
    let inputs = [Prep::One, Prep::Plus];
    let ideal = mpqc::harness::ideal_oracle(&c, &inputs);
    for strategy in mpqc::adversary::corpus() {
        if strategy.expected() == mpqc::adversary::Verdict::Abort {
            continue;
        }
        for seed in 0..10 {
            let cfg = NetworkConfig::new(7, 2, seed, BackendKind::Frame);
            let adv = Adversary::by_name(strategy.name(), 7, None, seed).unwrap();
            let r = mpqc_run(&cfg, &c, &inputs, adv).unwrap();
            assert!(!r.abort, "{} seed {seed}", strategy.name());
            assert_eq!(mpqc::harness::discrepancy(&r, &ideal), 0.0, "{} seed {seed}", strategy.name());
            assert!(r.sets.global.iter().all(|j| r.corrupt.contains(j)), "{} seed {seed}: {:?}", strategy.name(), r.sets.global);
        }
    }
}
