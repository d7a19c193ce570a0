//! The same single-level run on the statevector, tableau and Pauli-frame backends.

use mpqc::adversary::Adversary;
use mpqc::backend::register::Prep;
use mpqc::backend::{bloch_vector, BackendKind};
use mpqc::circuit::Circuit;
use mpqc::netsim::NetworkConfig;
use mpqc::protocol::mpqc_run;

fn main() {
    let circuit = Circuit::parse("WIRES 2\nH 1\nCNOT 1 2\nOUT 1 1\nOUT 2 2\n").unwrap();
    for kind in [BackendKind::Statevector, BackendKind::Tableau, BackendKind::Frame] {
        let mut cfg = NetworkConfig::new(7, 2, 3, kind);
        cfg.level = 1;
        let start = std::time::Instant::now();
        let run = mpqc_run(&cfg, &circuit, &[Prep::Zero, Prep::Zero], Adversary::by_name("z-spray", 7, None, 1).unwrap()).unwrap();
        let outs: Vec<_> = run.outputs.values().map(|(_, o)| o.value().map(bloch_vector)).collect();
        println!("{:<8} {:>10.2?} digest {} outputs {outs:?}", kind.to_string(), start.elapsed(), &run.digest[..16]);
    }
}
