//! Every corpus strategy against the CNOT circuit, a few seeds each.

use mpqc::adversary::{corpus, Adversary};
use mpqc::backend::register::Prep;
use mpqc::backend::BackendKind;
use mpqc::circuit::Circuit;
use mpqc::harness::{discrepancy, ideal_oracle};
use mpqc::netsim::NetworkConfig;
use mpqc::protocol::mpqc_run;

fn main() {
    let circuit = Circuit::parse("WIRES 2\nCNOT 1 2\nOUT 1 1\nOUT 2 2\n").unwrap();
    let inputs = [Prep::One, Prep::Plus];
    let ideal = ideal_oracle(&circuit, &inputs);
    println!("{:<28} {:<14} {:>6} {:>10} {:>8}", "strategy", "expected", "aborts", "max disc", "B");
    for s in corpus() {
        let mut aborts = 0;
        let mut worst: f64 = 0.0;
        let mut b = Default::default();
        for seed in 0..10 {
            let cfg = NetworkConfig::new(7, 3, seed, BackendKind::Frame);
            let adv = Adversary::by_name(s.name(), 7, None, seed).unwrap();
            let run = mpqc_run(&cfg, &circuit, &inputs, adv).unwrap();
            aborts += usize::from(run.abort);
            worst = worst.max(discrepancy(&run, &ideal));
            b = run.sets.global;
        }
        println!("{:<28} {:<14} {:>6} {:>10.2e} {:>8}", s.name(), format!("{:?}", s.expected()), aborts, worst, format!("{b:?}"));
    }
}
