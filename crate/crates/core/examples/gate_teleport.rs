//! A T gate by magic-state teleportation, first on two bare qubits, then through the protocol.

use mpqc::adversary::Adversary;
use mpqc::backend::register::Prep;
use mpqc::backend::statevector::StateVector;
use mpqc::backend::{bloch_vector, magic_state, BackendKind, Gate};
use mpqc::circuit::Circuit;
use mpqc::netsim::NetworkConfig;
use mpqc::protocol::mpqc_run;

fn main() {
    for branch in 0..2u8 {
        let mut sv = StateVector::new(2);
        let data = sv.alloc_state(Prep::Plus.amplitudes());
        let magic = sv.alloc_state(magic_state());
        sv.apply(&Gate::Cnot(magic, data)).unwrap();
        sv.project(data, branch).unwrap();
        if branch == 1 {
            sv.apply(&Gate::Pdg(magic)).unwrap();
            sv.apply(&Gate::X(magic)).unwrap();
        }
        println!("bare, outcome {branch}: bloch {:?}", bloch_vector(&sv.single_density(magic).unwrap()));
    }

    let circuit = Circuit::parse("WIRES 1\nT 1\nOUT 1 1\n").unwrap();
    for seed in 0..4 {
        let cfg = NetworkConfig::new(7, 1, seed, BackendKind::Frame);
        let run = mpqc_run(&cfg, &circuit, &[Prep::Plus], Adversary::honest()).unwrap();
        let out = run.outputs[&0].1.value().map(bloch_vector);
        let bit = run.transcript.decoded.iter().find(|d| d.label == "gate-teleport").map(|d| d.value);
        println!("protocol seed {seed}: readout {bit:?}, bloch {out:?}");
    }
}
